//! Singular series: complete exponential sums, the q-expansion, Euler-product
//! local factors, and exact p-adic solution densities.
//!
//! Two independent routes exist for every local quantity:
//!
//! * complete-sum route — `sum_(a mod q, (a,q)=1) prod_i S_i(a/q)` evaluated
//!   with exact modular reduction before any trigonometry;
//! * counting route — p-adic densities `#{u mod p^l : f(u) = 0} / p^(l n)`,
//!   exact rationals by convolution counting.
//!
//! The two are related by `1 + sum_(j<=l) A(p^j) = density(p, l)`; the
//! acceptance suite checks that identity numerically rather than assuming it.

use std::collections::HashMap;

use num_complex::Complex64;
use num_rational::Ratio;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::counting::CountBudget;
use crate::error::{Error, Result};

const TWO_PI: f64 = std::f64::consts::TAU;

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut base: u64, mut exp: u32, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

fn reduce_mod(x: i128, q: u64) -> u64 {
    (x.rem_euclid(q as i128)) as u64
}

/// Complete exponential sum `sum_(r=1..q) e(a * coeff * r^m / q)`, with the
/// exponent reduced mod q exactly before evaluation.
pub fn complete_sum(a: i64, q: u64, coeff: i128, m: u32) -> Result<Complex64> {
    if q < 1 {
        return Err(Error::InvalidParameter("complete_sum needs q >= 1".into()));
    }
    let b = reduce_mod(a as i128 * coeff, q);
    let mut acc = Complex64::new(0.0, 0.0);
    for r in 1..=q {
        let res = mulmod(b, powmod(r, m, q), q);
        let (sin, cos) = (TWO_PI * res as f64 / q as f64).sin_cos();
        acc += Complex64::new(cos, sin);
    }
    Ok(acc)
}

/// One q-term of the singular series:
/// `A(q) = q^-(n+1) sum_(gcd(a,q)=1) prod_i S(a, q, d_i zeta_i, m~_i)`.
///
/// Complete sums are memoized per residue `b = a * coeff mod q` with the
/// conjugation symmetry `G(q - b) = conj(G(b))`.
pub fn qsum_term(q: u64, d: &[i64], zeta: &[u128], m_tilde: &[u32]) -> f64 {
    let n_plus_1 = d.len();
    // distinct exponent values and their residue power tables
    let mut pow_tables: HashMap<u32, Vec<u64>> = HashMap::new();
    for &m in m_tilde {
        pow_tables
            .entry(m)
            .or_insert_with(|| (0..q).map(|r| powmod(r + 1, m, q)).collect());
    }
    // memoized G_m(b); keyed by exponent then residue
    let mut g_cache: HashMap<u32, Vec<Option<Complex64>>> = pow_tables
        .keys()
        .map(|&m| (m, vec![None; q as usize]))
        .collect();
    let mut g_value = |m: u32, b: u64| -> Complex64 {
        let cache = g_cache.get_mut(&m).unwrap();
        if let Some(v) = cache[b as usize] {
            return v;
        }
        let conj_b = (q - b) % q;
        if let Some(v) = cache[conj_b as usize] {
            let v = v.conj();
            cache[b as usize] = Some(v);
            return v;
        }
        let pows = &pow_tables[&m];
        let mut acc = Complex64::new(0.0, 0.0);
        for &pw in pows {
            let res = mulmod(b, pw, q);
            let (sin, cos) = (TWO_PI * res as f64 / q as f64).sin_cos();
            acc += Complex64::new(cos, sin);
        }
        cache[b as usize] = Some(acc);
        acc
    };

    let coeffs: Vec<u64> = (0..n_plus_1)
        .map(|i| reduce_mod(d[i] as i128 * (zeta[i] % q as u128) as i128, q))
        .collect();
    let mut total = Complex64::new(0.0, 0.0);
    for a in 1..=q {
        if num_integer::gcd(a, q) != 1 {
            continue;
        }
        let mut prod = Complex64::new(1.0, 0.0);
        for i in 0..n_plus_1 {
            let b = mulmod(a % q, coeffs[i], q);
            prod *= g_value(m_tilde[i], b);
        }
        total += prod;
    }
    total.re / (q as f64).powi(n_plus_1 as i32)
}

/// Euler local factor at p through level l, from the prime-power q-terms:
/// `1 + sum_(j=1..l) A(p^j)`.
pub fn euler_factor_from_complete_sums(
    p: u64,
    level: u32,
    d: &[i64],
    zeta: &[u128],
    m_tilde: &[u32],
) -> Result<f64> {
    let mut factor = 1.0;
    let mut q = 1u64;
    for _ in 0..level {
        q = q.checked_mul(p).ok_or(Error::Overflow("euler factor"))?;
        factor += qsum_term(q, d, zeta, m_tilde);
    }
    Ok(factor)
}

/// Euler local factor at p through level l as a solution density, computed
/// by FFT convolution over Z/p^l. Equal to the complete-sum route by the
/// standard identity; used where the modulus is too large for exact
/// counting.
pub fn euler_factor_fft(
    p: u64,
    level: u32,
    d: &[i64],
    zeta: &[u128],
    m_tilde: &[u32],
) -> Result<f64> {
    let modulus = (p as u128)
        .checked_pow(level)
        .filter(|&m| m <= (1 << 26))
        .ok_or_else(|| Error::BudgetExceeded(format!("FFT modulus p^l = {p}^{level} too large")))?
        as usize;
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(modulus);
    let mut spectra: Vec<Vec<Complex64>> = Vec::with_capacity(d.len());
    let mut hist_cache: HashMap<(u64, u32), usize> = HashMap::new();
    for i in 0..d.len() {
        let coeff = reduce_mod(d[i] as i128 * (zeta[i] % modulus as u128) as i128, modulus as u64);
        if let Some(&j) = hist_cache.get(&(coeff, m_tilde[i])) {
            spectra.push(spectra[j].clone());
            continue;
        }
        let mut buf = vec![Complex64::new(0.0, 0.0); modulus];
        for u in 0..modulus as u64 {
            let w = mulmod(coeff, powmod(u, m_tilde[i], modulus as u64), modulus as u64);
            buf[w as usize].re += 1.0;
        }
        fft.process(&mut buf);
        hist_cache.insert((coeff, m_tilde[i]), spectra.len());
        spectra.push(buf);
    }
    // density = (1/M^(n+1)) * sum_b prod_i H_i(b)
    let mut total = Complex64::new(0.0, 0.0);
    for b in 0..modulus {
        let mut prod = Complex64::new(1.0, 0.0);
        for s in &spectra {
            prod *= s[b];
        }
        total += prod;
    }
    Ok(total.re / (modulus as f64).powi(d.len() as i32))
}

/// Truncation mode for the singular series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum SeriesMode {
    QSum { q_max: u32 },
    Euler { p_max: u64, level: u32 },
}

/// A truncated singular-series value with a tail heuristic.
#[derive(Debug, Clone, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    /// Heuristic bound on the truncated tail (analytic sum of q^(1-Gamma~)
    /// scaled to the last computed terms); None when Gamma~ <= 1 leaves the
    /// tail without a finite model. In Euler mode this models the prime
    /// cutoff only, not the per-prime level truncation — cross-validate
    /// against the q-sum for that.
    pub tail_estimate: Option<f64>,
    pub mode: SeriesMode,
    /// Gamma~ = sum 1/m~_i - 1 as f64, for the record.
    pub gamma_tilde: f64,
    /// Set when sum 1/m~_i <= 3, the boundary of the theorem's regime.
    pub outside_theorem: bool,
}

/// Evaluate the singular series for `sum d_i zeta_i u_i^(m~_i) = 0`.
///
/// Refuses when Gamma~ <= 0 (the q-terms do not decay; e.g. a single
/// variable); computes with an `outside_theorem` tag when
/// `sum 1/m~_i <= 3`.
pub fn singular_series(
    d: &[i64],
    zeta: &[u128],
    m_tilde: &[u32],
    mode: &SeriesMode,
) -> Result<SeriesValue> {
    assert!(d.len() == zeta.len() && d.len() == m_tilde.len(), "shape mismatch");
    if m_tilde.iter().any(|&m| m < 1) {
        return Err(Error::InvalidParameter("exponents must be >= 1".into()));
    }
    if d.iter().any(|&di| di == 0) || zeta.iter().any(|&z| z == 0) {
        return Err(Error::InvalidParameter(
            "coefficients must be nonzero and zeta entries >= 1".into(),
        ));
    }
    let inv_sum: f64 = m_tilde.iter().map(|&m| 1.0 / m as f64).sum();
    let gamma_tilde = inv_sum - 1.0;
    let outside_theorem = inv_sum <= 3.0;

    match *mode {
        SeriesMode::QSum { q_max } => {
            if q_max < 1 {
                return Err(Error::InvalidParameter("q_max must be >= 1".into()));
            }
            // the q-terms scale like q^(-Gamma~): with Gamma~ <= 0 the sum
            // has no truncation meaning at all (e.g. a single variable)
            if gamma_tilde <= 0.0 {
                return Err(Error::DivergentSeries(format!(
                    "Gamma~ = {gamma_tilde:.4} <= 0, the q-terms q^(-Gamma~) do not decay"
                )));
            }
            let terms: Vec<f64> = (1..=q_max as u64)
                .into_par_iter()
                .map(|q| qsum_term(q, d, zeta, m_tilde))
                .collect();
            // sequential sum in q order keeps output byte-deterministic
            let value: f64 = terms.iter().sum();
            // scale |A(q)| * q^Gamma~ over the last decade of terms, then sum
            // the model q^(-Gamma~) tail analytically
            let lo = (q_max as usize * 9 / 10).max(1);
            let scale = terms[lo - 1..]
                .iter()
                .enumerate()
                .map(|(off, &t)| t.abs() * ((lo + off) as f64).powf(gamma_tilde))
                .fold(0.0f64, f64::max);
            let tail_estimate = (gamma_tilde > 1.0)
                .then(|| scale * (q_max as f64).powf(1.0 - gamma_tilde) / (gamma_tilde - 1.0));
            Ok(SeriesValue {
                value,
                tail_estimate,
                mode: *mode,
                gamma_tilde,
                outside_theorem,
            })
        }
        SeriesMode::Euler { p_max, level } => {
            if level < 1 {
                return Err(Error::InvalidParameter("level must be >= 1".into()));
            }
            let primes = crate::arith::primes_up_to(p_max);
            let factors: Vec<f64> = primes
                .par_iter()
                .map(|&p| euler_factor_fft(p, level, d, zeta, m_tilde))
                .collect::<Result<_>>()?;
            let value: f64 = factors.iter().product();
            // |sigma_p - 1| ~ C p^(-Gamma~); integrate the prime tail
            let scale = primes
                .iter()
                .zip(&factors)
                .rev()
                .take(3)
                .map(|(&p, &f)| (f - 1.0).abs() * (p as f64).powf(gamma_tilde))
                .fold(0.0f64, f64::max);
            let tail_estimate = (gamma_tilde > 1.0).then(|| {
                let x = p_max as f64;
                value.abs() * scale * x.powf(1.0 - gamma_tilde) / ((gamma_tilde - 1.0) * x.ln())
            });
            Ok(SeriesValue {
                value,
                tail_estimate,
                mode: *mode,
                gamma_tilde,
                outside_theorem,
            })
        }
    }
}

/// Exact p-adic density of solutions of `sum d_i zeta_i u_i^(m~_i) = 0`
/// modulo p^level: count over p^(level * n), reduced.
#[derive(Debug, Clone, Serialize)]
pub struct LocalDensity {
    pub p: u64,
    pub level: u32,
    pub count: u128,
    pub denominator: u128,
}

impl LocalDensity {
    pub fn ratio(&self) -> Ratio<u128> {
        Ratio::new(self.count, self.denominator)
    }

    pub fn to_f64(&self) -> f64 {
        self.count as f64 / self.denominator as f64
    }
}

/// Count solutions modulo p^level exactly: per-coordinate residue
/// histograms, cyclic convolution within two balanced halves, and a final
/// matching inner product. Level 0 is the empty condition (density 1).
pub fn local_density(
    d: &[i64],
    zeta: &[u128],
    m_tilde: &[u32],
    p: u64,
    level: u32,
    budget: &CountBudget,
) -> Result<LocalDensity> {
    assert!(d.len() == zeta.len() && d.len() == m_tilde.len(), "shape mismatch");
    if !crate::arith::is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let n = d.len() - 1;
    if level == 0 {
        return Ok(LocalDensity {
            p,
            level,
            count: 1,
            denominator: 1,
        });
    }
    let modulus_u128 = (p as u128)
        .checked_pow(level)
        .ok_or(Error::Overflow("local_density"))?;
    let modulus = u64::try_from(modulus_u128).map_err(|_| Error::Overflow("local_density"))?;
    // conv cost: one length-M cyclic convolution per extra axis
    let ops = (d.len() as u128 - 1) * modulus_u128 * modulus_u128;
    if ops > budget.max_local_ops as u128 {
        return Err(Error::BudgetExceeded(format!(
            "local density at modulus {modulus} needs ~{ops} ops (cap {})",
            budget.max_local_ops
        )));
    }

    let axis = |i: usize| -> Vec<u64> {
        let coeff = reduce_mod(d[i] as i128 * (zeta[i] % modulus as u128) as i128, modulus);
        let mut hist = vec![0u64; modulus as usize];
        for u in 0..modulus {
            hist[mulmod(coeff, powmod(u, m_tilde[i], modulus), modulus) as usize] += 1;
        }
        hist
    };

    fn cyclic_convolve(a: &[u64], b: &[u64], modulus: usize) -> Result<Vec<u64>> {
        let out: Vec<Result<u64>> = (0..modulus)
            .into_par_iter()
            .map(|w| {
                let mut acc: u64 = 0;
                for v in 0..modulus {
                    let bv = b[(w + modulus - v) % modulus];
                    if bv != 0 && a[v] != 0 {
                        acc = acc
                            .checked_add(a[v].checked_mul(bv).ok_or(Error::Overflow("local_density"))?)
                            .ok_or(Error::Overflow("local_density"))?;
                    }
                }
                Ok(acc)
            })
            .collect();
        out.into_iter().collect()
    }

    let half = d.len() / 2;
    let fold_half = |range: std::ops::Range<usize>| -> Result<Vec<u64>> {
        let mut acc = axis(range.start);
        for i in range.skip(1) {
            acc = cyclic_convolve(&acc, &axis(i), modulus as usize)?;
        }
        Ok(acc)
    };
    let left = fold_half(0..half)?;
    let right = fold_half(half..d.len())?;
    let mut count: u128 = 0;
    for w in 0..modulus as usize {
        let neg = (modulus as usize - w) % modulus as usize;
        count += left[w] as u128 * right[neg] as u128;
    }
    let denominator = modulus_u128.pow(n as u32);
    Ok(LocalDensity {
        p,
        level,
        count,
        denominator,
    })
}
