//! Assembly of the predicted main term, the leading constant of the
//! asymptotic, and empirical-versus-predicted comparison tables.

use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::Serialize;

use crate::circle::integral::{singular_integral, IntegralMethod, IntegralValue};
use crate::circle::series::{singular_series, SeriesMode, SeriesValue};
use crate::counting::{count_campana, count_m, CountBudget};
use crate::error::{Error, Result};
use crate::inclusion_exclusion::{enumerate_t, enumerate_v, gamma_of, VarpiTable};
use crate::orbifold::{big_ratio, rational_to_f64, s0, CampanaOrbifold, RationalRepr};

/// Which integral evaluator a prediction uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntegralChoice {
    Slab,
    Oscillatory,
}

/// All truncation knobs, echoed verbatim into output records so every
/// number is reproducible.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Truncation {
    pub series_mode: SeriesMode,
    pub integral: IntegralChoice,
    pub mc_samples: u64,
    pub seed: u64,
    /// Slab epsilon-ladder scale; None = sum |d_i| / 4.
    pub slab_scale: Option<f64>,
    pub lambda_cutoff: f64,
    pub osc_rel_tol: f64,
    /// Weight cap for the (s, t, v~) triple sum of the leading constant.
    pub t_cap: u128,
    /// Euler truncation used for the per-gamma series inside the constant.
    pub constant_p_max: u64,
    pub constant_level: u32,
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation {
            series_mode: SeriesMode::QSum { q_max: 500 },
            integral: IntegralChoice::Slab,
            mc_samples: 10_000_000,
            seed: 0,
            slab_scale: None,
            lambda_cutoff: 1e3,
            osc_rel_tol: 1e-3,
            t_cap: 64,
            constant_p_max: 29,
            constant_level: 3,
        }
    }
}

impl Truncation {
    pub fn integral_method(&self) -> IntegralMethod {
        match self.integral {
            IntegralChoice::Slab => IntegralMethod::Slab {
                samples: self.mc_samples,
                seed: self.seed,
                scale: self.slab_scale,
            },
            IntegralChoice::Oscillatory => IntegralMethod::Oscillatory {
                lambda_cutoff: self.lambda_cutoff,
                rel_tol: self.osc_rel_tol,
            },
        }
    }
}

/// Predicted main term `S * J * prod zeta^(-1/m~) * B~^Gamma~` with its
/// ingredients and truncation diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct Prediction {
    pub gamma_tilde: RationalRepr,
    pub theta_tilde: RationalRepr,
    pub series_value: f64,
    /// None when the truncation tail has no finite model (outside the
    /// theorem regime).
    pub series_tail: Option<f64>,
    pub integral_value: f64,
    pub integral_std_error: f64,
    /// prod_i zeta_i^(-1/m~_i).
    pub zeta_factor: f64,
    pub b_tilde: f64,
    /// B~^Gamma~.
    pub b_power: f64,
    pub main_term: f64,
    /// Heuristic: series tail and integral standard error propagated
    /// linearly into the main term.
    pub uncertainty: f64,
    pub outside_theorem: bool,
    pub truncation: Truncation,
}

pub fn gamma_tilde_exact(m_tilde: &[u32]) -> BigRational {
    let mut acc = -BigRational::one();
    for &m in m_tilde {
        acc += big_ratio(1, m as i64);
    }
    acc
}

pub fn theta_tilde_exact(m_tilde: &[u32]) -> Result<BigRational> {
    let mut acc = -BigRational::one();
    for &m in m_tilde {
        acc += big_ratio(1, 2 * s0(m)? as i64);
    }
    Ok(acc)
}

/// Main-term prediction for the power-box count M_(d,zeta)(B~).
pub fn predict_m(
    d: &[i64],
    zeta: &[u64],
    m_tilde: &[u32],
    b_tilde: f64,
    truncation: &Truncation,
) -> Result<Prediction> {
    assert!(d.len() == zeta.len() && d.len() == m_tilde.len(), "shape mismatch");
    if zeta.iter().any(|&z| z == 0) {
        return Err(Error::InvalidParameter("zeta entries must be >= 1".into()));
    }
    if !(b_tilde > 0.0) {
        return Err(Error::InvalidParameter("B~ must be positive".into()));
    }
    let gamma = gamma_tilde_exact(m_tilde);
    let theta = theta_tilde_exact(m_tilde)?;
    let inv_sum: f64 = m_tilde.iter().map(|&m| 1.0 / m as f64).sum();
    let outside_theorem = !theta.is_positive() || inv_sum <= 3.0;

    let zeta_big: Vec<u128> = zeta.iter().map(|&z| z as u128).collect();
    let series = singular_series(d, &zeta_big, m_tilde, &truncation.series_mode)?;
    let integral = singular_integral(d, m_tilde, &truncation.integral_method())?;

    let zeta_factor: f64 = zeta
        .iter()
        .zip(m_tilde)
        .map(|(&z, &m)| (z as f64).powf(-1.0 / m as f64))
        .product();
    let b_power = b_tilde.powf(rational_to_f64(&gamma));
    let main_term = series.value * integral.value * zeta_factor * b_power;
    let uncertainty = (series.tail_estimate.unwrap_or(0.0).abs() * integral.value.abs()
        + integral.std_error * series.value.abs())
        * zeta_factor
        * b_power;
    Ok(Prediction {
        gamma_tilde: RationalRepr::of(&gamma),
        theta_tilde: RationalRepr::of(&theta),
        series_value: series.value,
        series_tail: series.tail_estimate,
        integral_value: integral.value,
        integral_std_error: integral.std_error,
        zeta_factor,
        b_tilde,
        b_power,
        main_term,
        uncertainty,
        outside_theorem,
        truncation: *truncation,
    })
}

/// Partial sum of the constant's triple sum at one weight level.
#[derive(Debug, Clone, Serialize)]
pub struct PartialRow {
    pub weight_cap: u128,
    pub triples: usize,
    pub partial_sum: f64,
    pub delta: f64,
}

/// Truncated evaluation of the leading constant
/// `C_d = J_d * sum_(s,t) varpi(s,t) * sum_v~ S_(d,gamma) * prod gamma^(-1/(k m))`.
#[derive(Debug, Clone, Serialize)]
pub struct ConstantEstimate {
    pub value: f64,
    /// Last partial-sum delta plus propagated series/integral uncertainty.
    /// Outside the convergent regime the series tail has no finite model
    /// and is excluded; `series_tail_bounded` records that.
    pub uncertainty: f64,
    pub series_tail_bounded: bool,
    pub integral_value: f64,
    pub integral_std_error: f64,
    pub triple_sum: f64,
    pub partials: Vec<PartialRow>,
    pub triples_used: usize,
    pub pairs_pruned_by_varpi: usize,
    pub admissible: bool,
}

pub fn leading_constant(
    d: &[i64],
    orbifold: &CampanaOrbifold,
    truncation: &Truncation,
) -> Result<ConstantEstimate> {
    let k = orbifold.form.k();
    let weights = &orbifold.weights;
    assert_eq!(d.len(), weights.len(), "coefficient/weight length mismatch");
    let m_tilde: Vec<u32> = weights
        .m()
        .iter()
        .map(|&mi| {
            k.checked_mul(mi)
                .ok_or(Error::Overflow("leading_constant"))
        })
        .collect::<Result<_>>()?;
    let admissible = crate::orbifold::check_admissible(orbifold)?.in_theorem_range;

    let integral = singular_integral(d, &m_tilde, &truncation.integral_method())?;

    let table = VarpiTable::new(weights);
    let pairs = enumerate_t(truncation.t_cap, weights);
    let series_mode = SeriesMode::Euler {
        p_max: truncation.constant_p_max,
        level: truncation.constant_level,
    };

    // (weight, varpi, gamma) for every surviving triple, in weight order
    let mut terms: Vec<(u128, f64)> = Vec::new();
    let mut pruned = 0usize;
    let mut max_series_tail = 0.0f64;
    for pair in &pairs {
        let w = table.varpi(pair);
        if w == 0 {
            pruned += 1;
            continue;
        }
        for vt in enumerate_v(truncation.t_cap, pair, weights, k) {
            let gamma = gamma_of(pair, &vt, k, weights)?;
            let series = singular_series(d, &gamma, &m_tilde, &series_mode)?;
            max_series_tail = match series.tail_estimate {
                Some(t) => max_series_tail.max(t.abs()),
                None => f64::INFINITY,
            };
            let gamma_factor: f64 = gamma
                .iter()
                .zip(&m_tilde)
                .map(|(&g, &km)| (g as f64).powf(-1.0 / km as f64))
                .product();
            let weight = pair
                .weight(weights)?
                .saturating_mul(vtilde_total_weight(&vt, weights));
            terms.push((weight, w as f64 * series.value * gamma_factor));
        }
    }
    terms.sort_by_key(|&(w, _)| w);

    let mut partials = Vec::new();
    let mut acc = 0.0;
    let mut prev = 0.0;
    let mut idx = 0;
    while idx < terms.len() {
        let cap = terms[idx].0;
        while idx < terms.len() && terms[idx].0 == cap {
            acc += terms[idx].1;
            idx += 1;
        }
        partials.push(PartialRow {
            weight_cap: cap,
            triples: idx,
            partial_sum: acc,
            delta: acc - prev,
        });
        prev = acc;
    }
    let triple_sum = acc;
    let value = integral.value * triple_sum;
    let last_delta = partials.last().map(|p| p.delta.abs()).unwrap_or(0.0);
    let series_tail_bounded = max_series_tail.is_finite();
    let tail_part = if series_tail_bounded { max_series_tail } else { 0.0 };
    let uncertainty = integral.value.abs() * (last_delta + tail_part)
        + integral.std_error * triple_sum.abs();
    Ok(ConstantEstimate {
        value,
        uncertainty,
        series_tail_bounded,
        integral_value: integral.value,
        integral_std_error: integral.std_error,
        triple_sum,
        partials,
        triples_used: terms.len(),
        pairs_pruned_by_varpi: pruned,
        admissible,
    })
}

fn vtilde_total_weight(vt: &[Vec<u64>], weights: &crate::orbifold::OrbifoldWeights) -> u128 {
    let mut w = 1u128;
    for (i, row) in vt.iter().enumerate() {
        for (r0, &v) in row.iter().enumerate() {
            let e = weights.m()[i] + r0 as u32 + 1;
            w = w.saturating_mul((v as u128).saturating_pow(e));
        }
    }
    w
}

/// The full constant of the asymptotic: `2^n C_c` for even degree, the
/// half-sum of C over coefficient sign patterns for odd degree. Definite
/// sign patterns contribute a vanishing singular integral and are skipped
/// exactly.
#[derive(Debug, Clone, Serialize)]
pub struct FullConstant {
    pub value: f64,
    pub uncertainty: f64,
    pub patterns_evaluated: usize,
    pub patterns_definite: usize,
}

pub fn leading_constant_full(
    orbifold: &CampanaOrbifold,
    truncation: &Truncation,
) -> Result<FullConstant> {
    let k = orbifold.form.k();
    let c = orbifold.form.coefficients();
    if k % 2 == 0 {
        let base = leading_constant(c, orbifold, truncation)?;
        let scale = 2f64.powi(orbifold.n() as i32);
        return Ok(FullConstant {
            value: scale * base.value,
            uncertainty: scale * base.uncertainty,
            patterns_evaluated: 1,
            patterns_definite: 0,
        });
    }
    let n_plus_1 = c.len();
    let mut value = 0.0;
    let mut uncertainty = 0.0;
    let mut evaluated = 0;
    let mut definite = 0;
    for mask in 0u64..(1 << n_plus_1) {
        let flipped: Vec<i64> = c
            .iter()
            .enumerate()
            .map(|(i, &ci)| if mask >> i & 1 == 1 { -ci } else { ci })
            .collect();
        if flipped.iter().all(|&x| x > 0) || flipped.iter().all(|&x| x < 0) {
            definite += 1;
            continue;
        }
        let est = leading_constant(&flipped, orbifold, truncation)?;
        value += est.value;
        uncertainty += est.uncertainty;
        evaluated += 1;
    }
    Ok(FullConstant {
        value: value / 2.0,
        uncertainty: uncertainty / 2.0,
        patterns_evaluated: evaluated,
        patterns_definite: definite,
    })
}

/// What `compare` counts against the prediction.
#[derive(Debug, Clone)]
pub enum CompareInstance {
    /// Campana points of the orbifold, against C * B^(k Gamma).
    Orbifold(CampanaOrbifold),
    /// Power-box counts, against the Theorem main term.
    PowerBox {
        d: Vec<i64>,
        zeta: Vec<u64>,
        m_tilde: Vec<u32>,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct CompareRow {
    pub bound: u64,
    /// None when the exact count exceeded its budget; the row is kept but
    /// excluded from the fit.
    pub exact: Option<u64>,
    pub predicted: f64,
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComparisonTable {
    pub rows: Vec<CompareRow>,
    /// Least-squares slope of log(count) against log(B) over rows with a
    /// positive exact count.
    pub fitted_exponent: Option<f64>,
    pub expected_exponent: f64,
}

pub fn compare(
    instance: &CompareInstance,
    b_grid: &[u64],
    truncation: &Truncation,
    budget: &CountBudget,
) -> Result<ComparisonTable> {
    if b_grid.is_empty() {
        return Err(Error::InvalidParameter("empty B grid".into()));
    }
    let mut rows = Vec::with_capacity(b_grid.len());
    let expected_exponent: f64;
    match instance {
        CompareInstance::PowerBox { d, zeta, m_tilde } => {
            expected_exponent = rational_to_f64(&gamma_tilde_exact(m_tilde));
            for &b in b_grid {
                let exact = match count_m(d, zeta, m_tilde, b, budget, None) {
                    Ok(sc) => Some(sc.count),
                    Err(Error::BudgetExceeded(_)) | Err(Error::Overflow(_)) => None,
                    Err(e) => return Err(e),
                };
                let predicted = predict_m(d, zeta, m_tilde, b as f64, truncation)?.main_term;
                rows.push(make_row(b, exact, predicted));
            }
        }
        CompareInstance::Orbifold(orbifold) => {
            expected_exponent = rational_to_f64(&crate::orbifold::fujita_exponent(orbifold));
            let constant = leading_constant_full(orbifold, truncation)?;
            for &b in b_grid {
                let exact = match count_campana(orbifold, b, budget) {
                    Ok(sc) => Some(sc.count),
                    Err(Error::BudgetExceeded(_)) | Err(Error::Overflow(_)) => None,
                    Err(e) => return Err(e),
                };
                let predicted = constant.value * (b as f64).powf(expected_exponent);
                rows.push(make_row(b, exact, predicted));
            }
        }
    }

    // log-log fit over rows with positive exact counts
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.exact.filter(|&c| c > 0).map(|c| ((r.bound as f64).ln(), (c as f64).ln())))
        .collect();
    let fitted_exponent = if pts.len() >= 2 {
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        Some((n * sxy - sx * sy) / (n * sxx - sx * sx))
    } else {
        None
    };
    Ok(ComparisonTable {
        rows,
        fitted_exponent,
        expected_exponent,
    })
}

fn make_row(bound: u64, exact: Option<u64>, predicted: f64) -> CompareRow {
    let ratio = exact.and_then(|c| {
        if predicted != 0.0 {
            Some(c as f64 / predicted)
        } else {
            None
        }
    });
    CompareRow {
        bound,
        exact,
        predicted,
        ratio,
    }
}

/// Convenience: run both integral methods and fail on disagreement beyond
/// `k_sigma` combined error bars. Returns (slab, oscillatory).
pub fn integral_cross_checked(
    d: &[i64],
    m_tilde: &[u32],
    truncation: &Truncation,
    k_sigma: f64,
) -> Result<(IntegralValue, IntegralValue)> {
    let slab = singular_integral(
        d,
        m_tilde,
        &IntegralMethod::Slab {
            samples: truncation.mc_samples,
            seed: truncation.seed,
            scale: truncation.slab_scale,
        },
    )?;
    let osc = singular_integral(
        d,
        m_tilde,
        &IntegralMethod::Oscillatory {
            lambda_cutoff: truncation.lambda_cutoff,
            rel_tol: truncation.osc_rel_tol,
        },
    )?;
    crate::circle::integral::cross_check(&slab, &osc, k_sigma)?;
    Ok((slab, osc))
}

/// Convenience: run both series modes and fail on relative disagreement
/// beyond `rel_tol`. Returns (q-sum, euler).
pub fn series_cross_checked(
    d: &[i64],
    zeta: &[u128],
    m_tilde: &[u32],
    q_max: u32,
    p_max: u64,
    level: u32,
    rel_tol: f64,
) -> Result<(SeriesValue, SeriesValue)> {
    let qs = singular_series(d, zeta, m_tilde, &SeriesMode::QSum { q_max })?;
    let eu = singular_series(d, zeta, m_tilde, &SeriesMode::Euler { p_max, level })?;
    let denom = qs.value.abs().max(1e-300);
    if ((qs.value - eu.value) / denom).abs() > rel_tol {
        return Err(Error::NumericalDisagreement(format!(
            "series modes disagree: q-sum {} vs euler {}",
            qs.value, eu.value
        )));
    }
    Ok((qs, eu))
}
