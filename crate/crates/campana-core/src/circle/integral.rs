//! The singular integral `J = int_R prod_i (int_0^1 e(lambda d_i xi^(m_i)) dxi) dlambda`,
//! equal to the density of the solution hypersurface in the unit box.
//!
//! Two unrelated schemes are implemented and cross-checked:
//!
//! * slab: `Vol{ xi : |f(xi)| <= eps } / (2 eps)` by seeded Monte Carlo over
//!   a decreasing epsilon ladder, extrapolated linearly to eps -> 0;
//! * oscillatory: direct quadrature of the lambda-integral with
//!   Gauss–Legendre panels for the inner integrals and dyadic lambda blocks
//!   refined until two successive refinements agree.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

const TWO_PI: f64 = std::f64::consts::TAU;

/// How to evaluate the singular integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum IntegralMethod {
    Slab {
        samples: u64,
        seed: u64,
        /// Ladder scale; `None` picks `sum |d_i| / 4`.
        scale: Option<f64>,
    },
    Oscillatory {
        lambda_cutoff: f64,
        rel_tol: f64,
    },
}

/// One epsilon rung of the slab ladder.
#[derive(Debug, Clone, Serialize)]
pub struct LadderPoint {
    pub epsilon: f64,
    pub hits: u64,
    pub estimate: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IntegralValue {
    pub value: f64,
    pub std_error: f64,
    pub method: IntegralMethod,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ladder: Option<Vec<LadderPoint>>,
    /// Epsilon powers of the extrapolation basis (slab only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_powers: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refinements: Option<Vec<f64>>,
}

pub fn singular_integral(d: &[i64], m_tilde: &[u32], method: &IntegralMethod) -> Result<IntegralValue> {
    assert_eq!(d.len(), m_tilde.len(), "shape mismatch");
    if d.len() < 2 {
        return Err(Error::InvalidParameter("need at least two variables".into()));
    }
    if m_tilde.iter().any(|&m| m < 1) {
        return Err(Error::InvalidParameter("exponents must be >= 1".into()));
    }
    match *method {
        IntegralMethod::Slab { samples, seed, scale } => slab(d, m_tilde, samples, seed, scale, *method),
        IntegralMethod::Oscillatory { lambda_cutoff, rel_tol } => {
            oscillatory(d, m_tilde, lambda_cutoff, rel_tol, *method)
        }
    }
}

const SHARD: u64 = 1 << 20;
const LADDER_EXPONENTS: std::ops::RangeInclusive<u32> = 4..=10;

fn slab(
    d: &[i64],
    m_tilde: &[u32],
    samples: u64,
    seed: u64,
    scale: Option<f64>,
    method: IntegralMethod,
) -> Result<IntegralValue> {
    if samples < 1000 {
        return Err(Error::InvalidParameter("slab needs at least 1000 samples".into()));
    }
    let scale = scale.unwrap_or_else(|| d.iter().map(|&di| di.abs() as f64).sum::<f64>() / 4.0);
    if !(scale > 0.0) {
        return Err(Error::InvalidParameter("ladder scale must be positive".into()));
    }
    let ladder: Vec<f64> = LADDER_EXPONENTS.map(|j| scale * 0.5f64.powi(j as i32)).collect();
    let n_vars = d.len();
    let n_shards = samples.div_ceil(SHARD);

    // Each shard draws from its own counter-indexed stream, so hit counts
    // are exact integers independent of scheduling.
    let shard_hits: Vec<Vec<u64>> = (0..n_shards)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s + 1);
            let count = SHARD.min(samples - s * SHARD);
            let mut hits = vec![0u64; ladder.len()];
            let mut xi = vec![0.0f64; n_vars];
            for _ in 0..count {
                for x in xi.iter_mut() {
                    *x = rng.random::<f64>();
                }
                let mut f = 0.0;
                for i in 0..n_vars {
                    f += d[i] as f64 * xi[i].powi(m_tilde[i] as i32);
                }
                let af = f.abs();
                for (j, &eps) in ladder.iter().enumerate() {
                    if af <= eps {
                        hits[j] += 1;
                    }
                }
            }
            hits
        })
        .collect();
    let mut hits = vec![0u64; ladder.len()];
    for shard in shard_hits {
        for (h, s) in hits.iter_mut().zip(shard) {
            *h += s;
        }
    }

    let n = samples as f64;
    let points: Vec<LadderPoint> = ladder
        .iter()
        .zip(&hits)
        .map(|(&eps, &h)| {
            let p = h as f64 / n;
            // probability floor keeps the weight finite on empty rungs
            let p_eff = p.max(1.0 / n);
            LadderPoint {
                epsilon: eps,
                hits: h,
                estimate: p / (2.0 * eps),
                std_error: (p_eff * (1.0 - p_eff) / n).sqrt() / (2.0 * eps),
            }
        })
        .collect();

    // Weighted fit of the slab density against eps and extrapolation to
    // eps -> 0. The critical point of f at the origin contributes a term
    // of order eps^Gamma~ (box scaling); when that power lies below 1 it
    // must be in the basis or the intercept is biased.
    let gamma_tilde: f64 = m_tilde.iter().map(|&m| 1.0 / m as f64).sum::<f64>() - 1.0;
    let mut powers = vec![0.0];
    if gamma_tilde > 0.05 && gamma_tilde < 0.95 {
        powers.push(gamma_tilde);
    }
    powers.push(1.0);
    let (intercept, intercept_var) = wls_intercept(&points, &powers);
    Ok(IntegralValue {
        value: intercept,
        std_error: intercept_var.sqrt(),
        method,
        ladder: Some(points),
        fit_powers: Some(powers),
        refinements: None,
    })
}

/// Weighted least squares of `estimate ~ sum_j beta_j eps^powers[j]`
/// (powers[0] = 0 is the intercept); returns (intercept, variance).
fn wls_intercept(points: &[LadderPoint], powers: &[f64]) -> (f64, f64) {
    let k = powers.len();
    let mut ata = vec![vec![0.0f64; k]; k];
    let mut atb = vec![0.0f64; k];
    for pt in points {
        let w = 1.0 / (pt.std_error * pt.std_error);
        let row: Vec<f64> = powers.iter().map(|&p| pt.epsilon.powf(p)).collect();
        for i in 0..k {
            for j in 0..k {
                ata[i][j] += w * row[i] * row[j];
            }
            atb[i] += w * row[i] * pt.estimate;
        }
    }
    let inv = invert_small(&ata);
    let mut intercept = 0.0;
    for j in 0..k {
        intercept += inv[0][j] * atb[j];
    }
    (intercept, inv[0][0])
}

/// Gauss–Jordan inverse for the tiny normal-equation matrices.
fn invert_small(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let k = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..k).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
            .unwrap();
        m.swap(col, pivot);
        let d = m[col][col];
        for x in m[col].iter_mut() {
            *x /= d;
        }
        for row in 0..k {
            if row != col {
                let f = m[row][col];
                for j in 0..2 * k {
                    m[row][j] -= f * m[col][j];
                }
            }
        }
    }
    m.into_iter().map(|r| r[k..].to_vec()).collect()
}

/// 8-point Gauss–Legendre nodes and weights on [0, 1].
const GL_NODES: [f64; 8] = [
    0.019855071751231856,
    0.10166676129318664,
    0.2372337950418355,
    0.40828267875217505,
    0.5917173212478249,
    0.7627662049581645,
    0.8983332387068134,
    0.9801449282487681,
];
const GL_WEIGHTS: [f64; 8] = [
    0.05061426814518813,
    0.11119051722668723,
    0.15685332293894363,
    0.18134189168918097,
    0.18134189168918097,
    0.15685332293894363,
    0.11119051722668723,
    0.05061426814518813,
];

/// `int_0^1 e(lambda * d * xi^m) dxi` by composite Gauss–Legendre with one
/// panel per oscillation.
fn inner_integral(lambda: f64, d: f64, m: u32) -> Complex64 {
    let cycles = (lambda * d).abs();
    let panels = (cycles.ceil() as usize).clamp(1, 200_000);
    let h = 1.0 / panels as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let base = p as f64 * h;
        for (node, weight) in GL_NODES.iter().zip(&GL_WEIGHTS) {
            let xi = base + node * h;
            let phase = TWO_PI * lambda * d * xi.powi(m as i32);
            let (sin, cos) = phase.sin_cos();
            acc += Complex64::new(cos, sin) * (weight * h);
        }
    }
    acc
}

/// `prod_i I_i(lambda)` with per-distinct-coefficient memoization.
fn integrand(lambda: f64, keys: &[(f64, u32, usize)]) -> Complex64 {
    let mut prod = Complex64::new(1.0, 0.0);
    for &(coeff, m, mult) in keys {
        prod *= inner_integral(lambda, coeff, m).powu(mult as u32);
    }
    prod
}

fn oscillatory(
    d: &[i64],
    m_tilde: &[u32],
    lambda_cutoff: f64,
    rel_tol: f64,
    method: IntegralMethod,
) -> Result<IntegralValue> {
    if !(lambda_cutoff > 0.0) || !(rel_tol > 0.0) {
        return Err(Error::InvalidParameter("cutoff and tolerance must be positive".into()));
    }
    // collapse repeated (d_i, m_i) pairs; the product is a power
    let mut keys: Vec<(f64, u32, usize)> = Vec::new();
    for (&di, &mi) in d.iter().zip(m_tilde) {
        if let Some(k) = keys.iter_mut().find(|k| k.0 == di as f64 && k.1 == mi) {
            k.2 += 1;
        } else {
            keys.push((di as f64, mi, 1));
        }
    }
    let freq: f64 = d.iter().map(|&di| di.abs() as f64).sum();
    let decay: f64 = m_tilde.iter().map(|&m| 1.0 / m as f64).sum();

    // dyadic lambda blocks out to the cutoff
    let mut blocks: Vec<(f64, f64)> = vec![(0.0, 1.0)];
    let mut hi = 1.0;
    while hi < lambda_cutoff {
        let next = (hi * 2.0).min(lambda_cutoff);
        blocks.push((hi, next));
        hi = next;
    }

    let eval_block = |lo: f64, hi: f64, res: usize| -> (f64, f64) {
        // composite Simpson with res points per oscillation cycle
        let cycles = (hi - lo) * freq;
        let mut n = ((cycles * res as f64).ceil() as usize).max(16);
        if n % 2 == 1 {
            n += 1;
        }
        let h = (hi - lo) / n as f64;
        let values: Vec<Complex64> = (0..=n)
            .into_par_iter()
            .map(|j| integrand(lo + j as f64 * h, &keys))
            .collect();
        let mut sum = values[0].re + values[n].re;
        let mut amp = values[0].norm().max(values[n].norm());
        for (j, v) in values.iter().enumerate().skip(1).take(n - 1) {
            sum += v.re * if j % 2 == 1 { 4.0 } else { 2.0 };
            amp = amp.max(v.norm());
        }
        (sum * h / 3.0, amp)
    };

    let integrate = |res: usize| -> (f64, f64) {
        // returns (2 * int_0^L Re prod, tail estimate at stopping point)
        let mut total = 0.0;
        let mut tail = 0.0;
        for &(lo, hi) in &blocks {
            let (v, amp) = eval_block(lo, hi, res);
            total += v;
            // |prod| ~ C lambda^(-decay): integrate the remaining tail
            tail = if decay > 1.0 {
                amp * hi / (decay - 1.0)
            } else {
                f64::INFINITY
            };
            if tail.is_finite() && tail < rel_tol * total.abs() / 8.0 {
                break;
            }
        }
        (2.0 * total, 2.0 * tail)
    };

    let mut res = 8usize;
    let mut refinements = Vec::new();
    let (mut prev, _) = integrate(res);
    refinements.push(prev);
    let (value, tail) = loop {
        res *= 2;
        let (next, next_tail) = integrate(res);
        refinements.push(next);
        let delta = (next - prev).abs();
        prev = next;
        if delta <= rel_tol * next.abs().max(1e-12) || res >= 256 {
            break (next, next_tail);
        }
    };
    let last_delta = refinements[refinements.len() - 1] - refinements[refinements.len() - 2];
    let std_error = last_delta.abs() + if tail.is_finite() { tail } else { 0.0 };
    Ok(IntegralValue {
        value,
        std_error,
        method,
        ladder: None,
        fit_powers: None,
        refinements: Some(refinements),
    })
}

/// Assert two independent evaluations agree within `k_sigma` combined error
/// bars.
pub fn cross_check(a: &IntegralValue, b: &IntegralValue, k_sigma: f64) -> Result<()> {
    let tol = k_sigma * (a.std_error + b.std_error);
    if (a.value - b.value).abs() > tol {
        return Err(Error::NumericalDisagreement(format!(
            "singular integral methods disagree: {} vs {} (tolerance {tol})",
            a.value, b.value
        )));
    }
    Ok(())
}
