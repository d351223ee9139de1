//! Orbifold data and predicates: the diagonal form, multiplicity weights,
//! heights, bad primes, Campana membership, and the admissibility and
//! exponent computations that decide whether an instance sits inside the
//! counting theorem's range.
//!
//! All inequality checks here are exact rational arithmetic; boundary cases
//! (for example 16 versus 17 weights of 2 at degree 2) must never depend on
//! floating point.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, is_m_full, p_adic_valuation};
use crate::error::{Error, Result};

/// The hypersurface `c_0 x_0^k + ... + c_n x_n^k = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalForm {
    k: u32,
    c: Vec<i64>,
}

impl DiagonalForm {
    pub fn new(k: u32, c: Vec<i64>) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidOrbifold("degree k must be >= 1".into()));
        }
        if c.len() < 2 {
            return Err(Error::InvalidOrbifold(
                "need at least two coefficients (n >= 1)".into(),
            ));
        }
        if c.iter().any(|&ci| ci == 0) {
            return Err(Error::InvalidOrbifold("coefficients must be nonzero".into()));
        }
        let g = c.iter().fold(0u64, |g, &ci| num_integer::gcd(g, ci.unsigned_abs()));
        if g != 1 {
            return Err(Error::InvalidOrbifold(format!(
                "coefficients must be coprime (gcd = {g})"
            )));
        }
        Ok(DiagonalForm { k, c })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.c
    }

    pub fn n(&self) -> usize {
        self.c.len() - 1
    }
}

/// Multiplicities m_0, ..., m_n (each >= 2) encoding the boundary divisor
/// `sum_i (1 - 1/m_i) {x_i = 0}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbifoldWeights {
    m: Vec<u32>,
}

impl OrbifoldWeights {
    pub fn new(m: Vec<u32>) -> Result<Self> {
        if m.is_empty() {
            return Err(Error::InvalidOrbifold("empty weight vector".into()));
        }
        if m.iter().any(|&mi| mi < 2) {
            return Err(Error::InvalidOrbifold("all weights must be >= 2".into()));
        }
        Ok(OrbifoldWeights { m })
    }

    pub fn m(&self) -> &[u32] {
        &self.m
    }

    pub fn len(&self) -> usize {
        self.m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m.is_empty()
    }

    /// Lambda = sum_i (m_i - 1), the number of t/v slots.
    pub fn lambda(&self) -> usize {
        self.m.iter().map(|&mi| mi as usize - 1).sum()
    }

    /// The divisor coefficients eps_i = 1 - 1/m_i.
    pub fn epsilons(&self) -> Vec<BigRational> {
        self.m
            .iter()
            .map(|&mi| BigRational::one() - big_ratio(1, mi as i64))
            .collect()
    }
}

/// A diagonal hypersurface together with its boundary multiplicities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CampanaOrbifold {
    pub form: DiagonalForm,
    pub weights: OrbifoldWeights,
}

impl CampanaOrbifold {
    pub fn new(form: DiagonalForm, weights: OrbifoldWeights) -> Result<Self> {
        if form.coefficients().len() != weights.len() {
            return Err(Error::InvalidOrbifold(format!(
                "{} coefficients but {} weights",
                form.coefficients().len(),
                weights.len()
            )));
        }
        Ok(CampanaOrbifold { form, weights })
    }

    pub fn n(&self) -> usize {
        self.form.n()
    }
}

/// A primitive projective point with all coordinates nonzero (off the
/// boundary divisor).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjPoint {
    x: Vec<i64>,
}

impl ProjPoint {
    pub fn new(x: Vec<i64>) -> Result<Self> {
        if x.len() < 2 {
            return Err(Error::InvalidOrbifold("need at least two coordinates".into()));
        }
        if x.iter().any(|&xi| xi == 0) {
            return Err(Error::InvalidOrbifold(
                "coordinates must be nonzero (point off the boundary)".into(),
            ));
        }
        let g = x.iter().fold(0u64, |g, &xi| num_integer::gcd(g, xi.unsigned_abs()));
        if g != 1 {
            return Err(Error::InvalidOrbifold(format!(
                "coordinates must be primitive (gcd = {g})"
            )));
        }
        Ok(ProjPoint { x })
    }

    pub fn coords(&self) -> &[i64] {
        &self.x
    }
}

/// Weil height of a primitive representative: max |x_i|.
pub fn height(p: &ProjPoint) -> u64 {
    p.x.iter().map(|&xi| xi.unsigned_abs()).max().unwrap()
}

/// Primes dividing k * c_0 * ... * c_n; inverting them yields a smooth model.
pub fn bad_primes(form: &DiagonalForm) -> Vec<u64> {
    let mut primes: Vec<u64> = factorize(form.k() as u64).into_iter().map(|(p, _)| p).collect();
    for &ci in form.coefficients() {
        primes.extend(factorize(ci.unsigned_abs()).into_iter().map(|(p, _)| p));
    }
    primes.sort_unstable();
    primes.dedup();
    primes
}

/// Local intersection multiplicity of the point with the i-th coordinate
/// divisor at p, i.e. val_p(x_i).
pub fn intersection_multiplicity(point: &ProjPoint, i: usize, p: u64) -> Result<u32> {
    let xi = *point
        .x
        .get(i)
        .ok_or_else(|| Error::InvalidParameter(format!("coordinate index {i} out of range")))?;
    p_adic_valuation(xi, p)
}

/// Campana membership: the point lies on the hypersurface and every
/// coordinate is m_i-full outside `outside`. `outside = {}` is the plain
/// integral model; `outside = bad_primes(..)` is the smooth model.
pub fn is_campana_point(
    point: &ProjPoint,
    orbifold: &CampanaOrbifold,
    outside: &[u64],
) -> Result<bool> {
    assert_eq!(
        point.x.len(),
        orbifold.weights.len(),
        "point/orbifold dimension mismatch"
    );
    let k = orbifold.form.k();
    let mut sum: i128 = 0;
    for (&ci, &xi) in orbifold.form.coefficients().iter().zip(&point.x) {
        let pow = (xi as i128)
            .checked_pow(k)
            .ok_or(Error::Overflow("is_campana_point"))?;
        sum = sum
            .checked_add((ci as i128).checked_mul(pow).ok_or(Error::Overflow("is_campana_point"))?)
            .ok_or(Error::Overflow("is_campana_point"))?;
    }
    if sum != 0 {
        return Ok(false);
    }
    for (&mi, &xi) in orbifold.weights.m().iter().zip(&point.x) {
        if !is_m_full(xi, mi, outside)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Fujita invariant of the pair with respect to O(1): sum_i 1/m_i - k.
/// This exponent governs the growth B^(k*Gamma) of the point count.
pub fn fujita_exponent(orbifold: &CampanaOrbifold) -> BigRational {
    let mut acc = BigRational::zero();
    for &mi in orbifold.weights.m() {
        acc += big_ratio(1, mi as i64);
    }
    acc - BigRational::from(BigInt::from(orbifold.form.k()))
}

/// Vinogradov mean-value exponent: the smallest admissible moment order,
/// `min { 2^(m-1), m(m-1)/2 + floor(sqrt(2m+2)) }`.
pub fn s0(m: u32) -> Result<u64> {
    if m < 2 {
        return Err(Error::InvalidParameter("s0 requires m >= 2".into()));
    }
    let poly = (m as u128) * (m as u128 - 1) / 2 + num_integer::Roots::sqrt(&(2 * m as u128 + 2));
    let value = if m <= 128 {
        poly.min(1u128 << (m - 1))
    } else {
        poly
    };
    u64::try_from(value).map_err(|_| Error::Overflow("s0"))
}

/// Minor-arc exponent sigma(m) = 1 / (2 s0(m)), exact.
pub fn sigma(m: u32) -> Result<BigRational> {
    Ok(big_ratio(1, 2 * s0(m)? as i64))
}

/// Exact admissibility data for an orbifold: the quantities Theta and Gamma
/// and the inequalities the counting theorem assumes.
#[derive(Debug, Clone, Serialize)]
pub struct AdmissibilityReport {
    /// k * Gamma = sum 1/m_i - k, the growth exponent.
    pub k_gamma: RationalRepr,
    /// Gamma = sum 1/(k m_i) - 1.
    pub gamma: RationalRepr,
    /// Theta = sum 1/(2 s0(k m_i)) - 1.
    pub theta: RationalRepr,
    /// s0(k * m_i) in user order.
    pub s0_values: Vec<u64>,
    /// Main admissibility condition: sum 1/(2 s0(k m_i)) > 1.
    pub condition_main: bool,
    /// Series-regime condition: sum 1/(k m_i) > 3.
    pub condition_gamma: bool,
    /// Degree in theorem range (k >= 2).
    pub k_in_range: bool,
    /// Weights in theorem range: after ascending normalization,
    /// 2 <= m_0 <= ... <= m_n.
    pub weights_in_range: bool,
    /// All of the above.
    pub in_theorem_range: bool,
}

/// Exact rational rendered as numerator/denominator plus an f64 view.
#[derive(Debug, Clone, Serialize)]
pub struct RationalRepr {
    pub num: String,
    pub den: String,
    pub approx: f64,
}

impl RationalRepr {
    pub fn of(r: &BigRational) -> Self {
        RationalRepr {
            num: r.numer().to_string(),
            den: r.denom().to_string(),
            approx: rational_to_f64(r),
        }
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

/// Evaluate the admissibility conditions with exact rationals. Inputs with
/// k = 1 are computed anyway and flagged as outside the theorem range.
pub fn check_admissible(orbifold: &CampanaOrbifold) -> Result<AdmissibilityReport> {
    let k = orbifold.form.k();
    // Theorem normalization sorts the weights ascending; every quantity
    // below is permutation-invariant, so only the m_i >= 2 bound matters.
    let mut sorted = orbifold.weights.m().to_vec();
    sorted.sort_unstable();
    let weights_in_range = sorted.first().is_some_and(|&m0| m0 >= 2);

    let mut theta = -BigRational::one();
    let mut gamma = -BigRational::one();
    let mut s0_values = Vec::with_capacity(orbifold.weights.len());
    for &mi in orbifold.weights.m() {
        let km = k
            .checked_mul(mi)
            .ok_or(Error::Overflow("check_admissible"))?;
        let s = s0(km)?;
        s0_values.push(s);
        theta += big_ratio(1, 2 * s as i64);
        gamma += big_ratio(1, km as i64);
    }
    let k_gamma = fujita_exponent(orbifold);

    let condition_main = theta.is_positive();
    // sum 1/(k m_i) > 3  <=>  Gamma > 2.
    let condition_gamma = gamma > big_ratio(2, 1);
    let k_in_range = k >= 2;
    Ok(AdmissibilityReport {
        k_gamma: RationalRepr::of(&k_gamma),
        gamma: RationalRepr::of(&gamma),
        theta: RationalRepr::of(&theta),
        s0_values,
        condition_main,
        condition_gamma,
        k_in_range,
        weights_in_range,
        in_theorem_range: condition_main && k_in_range && weights_in_range,
    })
}

pub fn big_ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// On-disk orbifold description: `{"k": int, "c": [int], "m": [int]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbifoldSpec {
    pub k: u32,
    pub c: Vec<i64>,
    pub m: Vec<u32>,
}

impl OrbifoldSpec {
    pub fn parse(json: &str) -> Result<Self> {
        serde_json::from_str(json)
            .map_err(|e| Error::Usage(format!("malformed orbifold spec: {e}")))
    }

    pub fn build(&self) -> Result<CampanaOrbifold> {
        CampanaOrbifold::new(
            DiagonalForm::new(self.k, self.c.clone())?,
            OrbifoldWeights::new(self.m.clone())?,
        )
    }
}
