//! C ABI for the campana counting engine.
//!
//! Conventions: every fallible call returns a [`CampanaStatus`] and writes
//! its result through out-pointers; orbifolds are opaque handles created by
//! [`campana_orbifold_new`] and released by [`campana_orbifold_free`].
//! The header `include/campana.h` is generated by cbindgen at build time.

use std::ffi::c_char;
use std::panic::{catch_unwind, UnwindSafe};

use campana_core::arith::{m_full_compose, m_full_decompose, moebius, MFullDecomposition};
use campana_core::circle::{predict_m, Truncation};
use campana_core::counting::{count_campana, count_m, count_n, CountBudget};
use campana_core::orbifold::{
    check_admissible, fujita_exponent, s0, CampanaOrbifold as CoreOrbifold, DiagonalForm,
    OrbifoldWeights,
};
use campana_core::Error;

/// Status codes returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CampanaStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DomainError = 3,
    BudgetExceeded = 4,
    Overflow = 5,
    Disagreement = 6,
    InternalError = 7,
}

fn status_of(e: &Error) -> CampanaStatus {
    match e {
        Error::BudgetExceeded(_) => CampanaStatus::BudgetExceeded,
        Error::Overflow(_) => CampanaStatus::Overflow,
        Error::NumericalDisagreement(_) => CampanaStatus::Disagreement,
        _ => CampanaStatus::DomainError,
    }
}

fn guarded<F: FnOnce() -> CampanaStatus + UnwindSafe>(f: F) -> CampanaStatus {
    catch_unwind(f).unwrap_or(CampanaStatus::InternalError)
}

/// Opaque orbifold handle.
pub struct CampanaOrbifold {
    inner: CoreOrbifold,
}

/// Version string of the library; static, do not free.
#[no_mangle]
pub extern "C" fn campana_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Human-readable description of a status code; static, do not free.
#[no_mangle]
pub extern "C" fn campana_status_message(status: CampanaStatus) -> *const c_char {
    let msg: &'static str = match status {
        CampanaStatus::Ok => "ok\0",
        CampanaStatus::NullPointer => "null pointer argument\0",
        CampanaStatus::InvalidArgument => "invalid argument\0",
        CampanaStatus::DomainError => "domain error\0",
        CampanaStatus::BudgetExceeded => "resource budget exceeded\0",
        CampanaStatus::Overflow => "integer overflow\0",
        CampanaStatus::Disagreement => "cross-check disagreement\0",
        CampanaStatus::InternalError => "internal error\0",
    };
    msg.as_ptr() as *const c_char
}

/// Moebius function of n (requires n >= 1); writes -1, 0 or 1.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn campana_moebius(n: u64, out: *mut i32) -> CampanaStatus {
    if out.is_null() {
        return CampanaStatus::NullPointer;
    }
    guarded(|| match moebius(n) {
        Ok(v) => {
            unsafe { *out = v as i32 };
            CampanaStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Is x m-full (every prime divisor to order >= m)? Writes 0 or 1.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn campana_is_m_full(x: i64, m: u32, out: *mut i32) -> CampanaStatus {
    if out.is_null() {
        return CampanaStatus::NullPointer;
    }
    guarded(|| match campana_core::arith::is_m_full(x, m, &[]) {
        Ok(v) => {
            unsafe { *out = v as i32 };
            CampanaStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Vinogradov mean-value exponent s0(m), m >= 2.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn campana_s0(m: u32, out: *mut u64) -> CampanaStatus {
    if out.is_null() {
        return CampanaStatus::NullPointer;
    }
    guarded(|| match s0(m) {
        Ok(v) => {
            unsafe { *out = v };
            CampanaStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Canonical decomposition x = sign * u^m * prod v_r^(m+r) of an m-full
/// integer. `v_out` must hold exactly m-1 slots.
///
/// # Safety
/// `sign_out` and `u_out` must be valid pointers; `v_out` must point to at
/// least m-1 writable u64 slots (it may be null when m == 1).
#[no_mangle]
pub unsafe extern "C" fn campana_mfull_decompose(
    x: i64,
    m: u32,
    sign_out: *mut i32,
    u_out: *mut u64,
    v_out: *mut u64,
) -> CampanaStatus {
    if sign_out.is_null() || u_out.is_null() || (m > 1 && v_out.is_null()) {
        return CampanaStatus::NullPointer;
    }
    guarded(|| match m_full_decompose(x, m) {
        Ok(d) => {
            unsafe {
                *sign_out = d.sign as i32;
                *u_out = d.u;
                for (i, &v) in d.v.iter().enumerate() {
                    *v_out.add(i) = v;
                }
            }
            CampanaStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Rebuild sign * u^m * prod v_r^(m+r); the exact inverse of the
/// decomposition. `v` must hold m-1 entries.
///
/// # Safety
/// `v` must point to `v_len` readable u64 values (null allowed when
/// `v_len == 0`); `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn campana_mfull_compose(
    sign: i32,
    u: u64,
    v: *const u64,
    v_len: usize,
    m: u32,
    out: *mut i64,
) -> CampanaStatus {
    if out.is_null() || (v_len > 0 && v.is_null()) {
        return CampanaStatus::NullPointer;
    }
    if sign != 1 && sign != -1 {
        return CampanaStatus::InvalidArgument;
    }
    let v = if v_len == 0 {
        Vec::new()
    } else {
        unsafe { std::slice::from_raw_parts(v, v_len) }.to_vec()
    };
    guarded(move || {
        let d = MFullDecomposition {
            sign: sign as i8,
            u,
            v,
            m,
        };
        match m_full_compose(&d) {
            Ok(value) => {
                unsafe { *out = value };
                CampanaStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Create an orbifold from degree k, coefficients `c[0..len]` and
/// multiplicities `m[0..len]`. On success writes a handle that must be
/// released with
/// [`campana_orbifold_free`].
///
/// # Safety
/// `c` and `m` must point to `len` readable elements; `out` must be a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn campana_orbifold_new(
    k: u32,
    c: *const i64,
    m: *const u32,
    len: usize,
    out: *mut *mut CampanaOrbifold,
) -> CampanaStatus {
    if c.is_null() || m.is_null() || out.is_null() {
        return CampanaStatus::NullPointer;
    }
    if len < 2 {
        return CampanaStatus::InvalidArgument;
    }
    let c = unsafe { std::slice::from_raw_parts(c, len) }.to_vec();
    let m = unsafe { std::slice::from_raw_parts(m, len) }.to_vec();
    guarded(move || {
        let built = DiagonalForm::new(k, c)
            .and_then(|form| OrbifoldWeights::new(m).map(|w| (form, w)))
            .and_then(|(form, w)| CoreOrbifold::new(form, w));
        match built {
            Ok(inner) => {
                unsafe { *out = Box::into_raw(Box::new(CampanaOrbifold { inner })) };
                CampanaStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Release an orbifold handle. Null is a no-op.
///
/// # Safety
/// `handle` must be null or a pointer returned by [`campana_orbifold_new`]
/// that has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn campana_orbifold_free(handle: *mut CampanaOrbifold) {
    if !handle.is_null() {
        drop(unsafe { Box::from_raw(handle) });
    }
}

/// Does the orbifold satisfy the main admissibility condition
/// `sum 1/(2 s0(k m_i)) > 1` (with k >= 2)? Writes 0 or 1.
///
/// # Safety
/// `handle` must be a live orbifold handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn campana_orbifold_admissible(
    handle: *const CampanaOrbifold,
    out: *mut i32,
) -> CampanaStatus {
    let Some(orb) = (unsafe { handle.as_ref() }) else {
        return CampanaStatus::NullPointer;
    };
    if out.is_null() {
        return CampanaStatus::NullPointer;
    }
    guarded(|| match check_admissible(&orb.inner) {
        Ok(rep) => {
            unsafe { *out = rep.in_theorem_range as i32 };
            CampanaStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Fujita invariant k*Gamma = sum 1/m_i - k as an exact fraction.
///
/// # Safety
/// `handle` must be a live orbifold handle; `num` and `den` must be valid
/// pointers.
#[no_mangle]
pub unsafe extern "C" fn campana_fujita_exponent(
    handle: *const CampanaOrbifold,
    num: *mut i64,
    den: *mut i64,
) -> CampanaStatus {
    let Some(orb) = (unsafe { handle.as_ref() }) else {
        return CampanaStatus::NullPointer;
    };
    if num.is_null() || den.is_null() {
        return CampanaStatus::NullPointer;
    }
    guarded(|| {
        use num_traits::ToPrimitive;
        let r = fujita_exponent(&orb.inner);
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(n), Some(d)) => {
                unsafe {
                    *num = n;
                    *den = d;
                }
                CampanaStatus::Ok
            }
            _ => CampanaStatus::Overflow,
        }
    })
}

/// Exact number of Campana points of height <= bound (half the primitive
/// solution count).
///
/// # Safety
/// `handle` must be a live orbifold handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn campana_count_campana(
    handle: *const CampanaOrbifold,
    bound: u64,
    out: *mut u64,
) -> CampanaStatus {
    let Some(orb) = (unsafe { handle.as_ref() }) else {
        return CampanaStatus::NullPointer;
    };
    if out.is_null() {
        return CampanaStatus::NullPointer;
    }
    guarded(|| match count_campana(&orb.inner, bound, &CountBudget::default()) {
        Ok(sc) => {
            unsafe { *out = sc.count };
            CampanaStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Exact N(bound): primitive tuples with m_i-full nonzero coordinates
/// solving the form.
///
/// # Safety
/// `handle` must be a live orbifold handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn campana_count_n(
    handle: *const CampanaOrbifold,
    bound: u64,
    out: *mut u64,
) -> CampanaStatus {
    let Some(orb) = (unsafe { handle.as_ref() }) else {
        return CampanaStatus::NullPointer;
    };
    if out.is_null() {
        return CampanaStatus::NullPointer;
    }
    guarded(|| match count_n(&orb.inner, bound, &CountBudget::default(), None) {
        Ok(sc) => {
            unsafe { *out = sc.count };
            CampanaStatus::Ok
        }
        Err(e) => status_of(&e),
    })
}

/// Exact power-box count M: tuples u with zeta_i u_i^(m~_i) <= b_tilde and
/// sum d_i zeta_i u_i^(m~_i) = 0, by histogram convolution.
///
/// # Safety
/// `d`, `zeta` and `m_tilde` must each point to `len` readable elements;
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn campana_count_m(
    d: *const i64,
    zeta: *const u64,
    m_tilde: *const u32,
    len: usize,
    b_tilde: u64,
    out: *mut u64,
) -> CampanaStatus {
    if d.is_null() || zeta.is_null() || m_tilde.is_null() || out.is_null() {
        return CampanaStatus::NullPointer;
    }
    if len < 2 {
        return CampanaStatus::InvalidArgument;
    }
    let d = unsafe { std::slice::from_raw_parts(d, len) }.to_vec();
    let zeta = unsafe { std::slice::from_raw_parts(zeta, len) }.to_vec();
    let m_tilde = unsafe { std::slice::from_raw_parts(m_tilde, len) }.to_vec();
    guarded(move || {
        match count_m(&d, &zeta, &m_tilde, b_tilde, &CountBudget::default(), None) {
            Ok(sc) => {
                unsafe { *out = sc.count };
                CampanaStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}

/// Predicted main term for the power-box count at `b_tilde` (singular
/// series times singular integral times b_tilde^Gamma~), with default
/// truncations and the given Monte Carlo seed. Writes the value and a
/// heuristic uncertainty.
///
/// # Safety
/// `d`, `zeta` and `m_tilde` must each point to `len` readable elements;
/// `main_term_out` and `uncertainty_out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn campana_predict_m(
    d: *const i64,
    zeta: *const u64,
    m_tilde: *const u32,
    len: usize,
    b_tilde: f64,
    seed: u64,
    main_term_out: *mut f64,
    uncertainty_out: *mut f64,
) -> CampanaStatus {
    if d.is_null() || zeta.is_null() || m_tilde.is_null() || main_term_out.is_null() || uncertainty_out.is_null() {
        return CampanaStatus::NullPointer;
    }
    if len < 2 {
        return CampanaStatus::InvalidArgument;
    }
    let d = unsafe { std::slice::from_raw_parts(d, len) }.to_vec();
    let zeta = unsafe { std::slice::from_raw_parts(zeta, len) }.to_vec();
    let m_tilde = unsafe { std::slice::from_raw_parts(m_tilde, len) }.to_vec();
    guarded(move || {
        let truncation = Truncation {
            seed,
            ..Truncation::default()
        };
        match predict_m(&d, &zeta, &m_tilde, b_tilde, &truncation) {
            Ok(p) => {
                unsafe {
                    *main_term_out = p.main_term;
                    *uncertainty_out = p.uncertainty;
                }
                CampanaStatus::Ok
            }
            Err(e) => status_of(&e),
        }
    })
}
