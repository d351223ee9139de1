//! Exponential sums and the major/minor arc dissection of [0, 1].

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::orbifold::{rational_to_f64, s0, sigma};

const TWO_PI: f64 = std::f64::consts::TAU;

/// Number of terms of the generating sum on axis i: floor((B~/zeta)^(1/m~)).
pub fn axis_length(zeta: u64, m_tilde: u32, b_tilde: f64) -> u64 {
    if b_tilde < zeta as f64 {
        return 0;
    }
    let mut n = (b_tilde / zeta as f64).powf(1.0 / m_tilde as f64).floor() as u64;
    // float roundoff guard on the boundary
    while (zeta as u128).saturating_mul(((n + 1) as u128).saturating_pow(m_tilde)) as f64 <= b_tilde
    {
        n += 1;
    }
    while n > 0 && (zeta as u128 * (n as u128).pow(m_tilde)) as f64 > b_tilde {
        n -= 1;
    }
    n
}

/// `S_i(alpha) = sum_(1 <= u <= (B~/zeta)^(1/m~)) e(alpha d zeta u^m~)`.
/// The exponent integer is computed exactly and reduced mod 1 before any
/// trigonometry.
pub fn weyl_sum(alpha: f64, d: i64, zeta: u64, m_tilde: u32, b_tilde: f64) -> Complex64 {
    let len = axis_length(zeta, m_tilde, b_tilde);
    let mut acc = Complex64::new(0.0, 0.0);
    for u in 1..=len {
        let n = d as i128 * zeta as i128 * (u as i128).pow(m_tilde);
        let t = alpha * n as f64;
        let phase = TWO_PI * (t - t.floor());
        let (sin, cos) = phase.sin_cos();
        acc += Complex64::new(cos, sin);
    }
    acc
}

/// The dissection of [0, 1]: major arcs are `|alpha - a/q| < B~^(delta-1)`
/// for `0 <= a <= q <= B~^delta`, gcd(a, q) = 1, merged where they overlap;
/// the minor arcs are the complement.
#[derive(Debug, Clone, Serialize)]
pub struct ArcDissection {
    pub b_tilde: f64,
    pub delta: f64,
    /// Q = B~^delta.
    pub q_cap: f64,
    /// Half-width B~^(delta - 1) of each major arc.
    pub half_width: f64,
    /// Merged major arcs clipped to [0, 1].
    pub major: Vec<(f64, f64)>,
}

impl ArcDissection {
    pub fn minor(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        let mut cursor = 0.0;
        for &(lo, hi) in &self.major {
            if lo > cursor {
                out.push((cursor, lo));
            }
            cursor = cursor.max(hi);
        }
        if cursor < 1.0 {
            out.push((cursor, 1.0));
        }
        out
    }

    pub fn major_measure(&self) -> f64 {
        self.major.iter().map(|(lo, hi)| hi - lo).sum()
    }

    pub fn minor_measure(&self) -> f64 {
        self.minor().iter().map(|(lo, hi)| hi - lo).sum()
    }

    /// Whether delta sits inside the minor-arc lemma's range
    /// `delta < 1 / ((2n+5) m_max (m_max + 1))` for the given dimensions.
    pub fn delta_in_lemma_range(&self, n: usize, m_max: u32) -> bool {
        self.delta < 1.0 / ((2 * n + 5) as f64 * m_max as f64 * (m_max as f64 + 1.0))
    }
}

pub fn minor_arcs(b_tilde: f64, delta: f64) -> Result<ArcDissection> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "delta = {delta} outside (0, 1)"
        )));
    }
    if !(b_tilde > 1.0) {
        return Err(Error::InvalidParameter("B~ must exceed 1".into()));
    }
    let q_cap = b_tilde.powf(delta);
    let half_width = b_tilde.powf(delta - 1.0);
    let mut arcs: Vec<(f64, f64)> = Vec::new();
    for q in 1..=(q_cap.floor() as u64) {
        for a in 0..=q {
            if num_integer::gcd(a, q) != 1 {
                continue;
            }
            let center = a as f64 / q as f64;
            arcs.push(((center - half_width).max(0.0), (center + half_width).min(1.0)));
        }
    }
    arcs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut major: Vec<(f64, f64)> = Vec::new();
    for (lo, hi) in arcs {
        match major.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => major.push((lo, hi)),
        }
    }
    Ok(ArcDissection {
        b_tilde,
        delta,
        q_cap,
        half_width,
        major,
    })
}

/// Sampled sup of one generating sum over the minor arcs, against the
/// minor-arc bound's main factor (implicit constants unknown, so this is a
/// report, not an assertion).
#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    pub axis: usize,
    pub sampled_sup: f64,
    pub at_alpha: f64,
    /// B~^(1/m~ - delta sigma(m~)) * zeta^(-1/m~ + sigma(m~)).
    pub reference: f64,
    pub ratio: f64,
    pub trivial_bound: f64,
    /// Whether delta sits inside the minor-arc lemma's admissible range for
    /// these dimensions; the reference column is only meaningful when true.
    pub delta_in_lemma_range: bool,
}

/// Deterministic stratified scan of |S_i| over the minor arcs.
pub fn minor_arc_scan(
    d: &[i64],
    zeta: &[u64],
    m_tilde: &[u32],
    b_tilde: f64,
    delta: f64,
    samples: usize,
) -> Result<Vec<ScanRow>> {
    assert!(d.len() == zeta.len() && d.len() == m_tilde.len(), "shape mismatch");
    if samples < 1 {
        return Err(Error::InvalidParameter("need at least one sample".into()));
    }
    let dissection = minor_arcs(b_tilde, delta)?;
    let minor = dissection.minor();
    let total: f64 = minor.iter().map(|(lo, hi)| hi - lo).sum();
    if total <= 0.0 {
        return Err(Error::InvalidParameter(
            "major arcs cover [0,1]; nothing to scan".into(),
        ));
    }
    let mut alphas = Vec::with_capacity(samples + minor.len());
    for &(lo, hi) in &minor {
        let n = (((hi - lo) / total * samples as f64).round() as usize).max(1);
        for j in 0..n {
            alphas.push(lo + (hi - lo) * (j as f64 + 0.5) / n as f64);
        }
    }

    let m_max = *m_tilde.iter().max().unwrap();
    let in_range = dissection.delta_in_lemma_range(d.len() - 1, m_max);
    let mut rows = Vec::with_capacity(d.len());
    for i in 0..d.len() {
        let mut sup = 0.0;
        let mut at = alphas[0];
        for &alpha in &alphas {
            let v = weyl_sum(alpha, d[i], zeta[i], m_tilde[i], b_tilde).norm();
            if v > sup {
                sup = v;
                at = alpha;
            }
        }
        let sg = rational_to_f64(&sigma(m_tilde[i])?);
        let _ = s0(m_tilde[i])?;
        let reference = b_tilde.powf(1.0 / m_tilde[i] as f64 - delta * sg)
            * (zeta[i] as f64).powf(-1.0 / m_tilde[i] as f64 + sg);
        rows.push(ScanRow {
            axis: i,
            sampled_sup: sup,
            at_alpha: at,
            reference,
            ratio: sup / reference,
            trivial_bound: axis_length(zeta[i], m_tilde[i], b_tilde) as f64,
            delta_in_lemma_range: in_range,
        });
    }
    Ok(rows)
}
