//! Exact integer arithmetic: valuations, the Möbius function, m-full
//! recognition, the canonical m-full decomposition, and sieve-free
//! enumeration of m-full numbers.
//!
//! An integer `x != 0` is *m-full* if every prime dividing it does so to
//! order at least `m` ("squareful" is the case m = 2). Every nonzero m-full
//! integer has a unique representation
//!
//! ```text
//!     x = sign * u^m * v_1^(m+1) * v_2^(m+2) * ... * v_{m-1}^(2m-1)
//! ```
//!
//! with the `v_r` squarefree and pairwise coprime. All arithmetic here is
//! checked; overflow is an error, never a wraparound.

use crate::error::{Error, Result};

/// Simple sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for p in 2..=n {
        if !composite[p] {
            primes.push(p as u64);
            let mut q = p * p;
            while q <= n {
                composite[q] = true;
                q += p;
            }
        }
    }
    primes
}

/// Deterministic primality by trial division with a 6k±1 wheel.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 || n % 3 == 0 {
        return false;
    }
    let mut d = 5u64;
    while d * d <= n {
        if n % d == 0 || n % (d + 2) == 0 {
            return false;
        }
        d += 6;
    }
    true
}

/// Prime factorization by trial division, `(prime, exponent)` pairs in
/// ascending prime order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    for p in [2u64, 3] {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    }
    let mut d = 5u64;
    while d * d <= n {
        for p in [d, d + 2] {
            if n % p == 0 {
                let mut e = 0;
                while n % p == 0 {
                    n /= p;
                    e += 1;
                }
                out.push((p, e));
            }
        }
        d += 6;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Largest exponent `e` with `p^e | x`. Errors on `x = 0` (valuation
/// undefined) and on composite `p`.
pub fn p_adic_valuation(x: i64, p: u64) -> Result<u32> {
    if x == 0 {
        return Err(Error::ZeroArgument);
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let mut n = x.unsigned_abs();
    let mut e = 0;
    while n % p == 0 {
        n /= p;
        e += 1;
    }
    Ok(e)
}

/// Möbius function: 0 on non-squarefree input, otherwise (-1)^(number of
/// prime factors).
pub fn moebius(n: u64) -> Result<i8> {
    if n == 0 {
        return Err(Error::ZeroArgument);
    }
    let mut sign = 1i8;
    for (_, e) in factorize(n) {
        if e >= 2 {
            return Ok(0);
        }
        sign = -sign;
    }
    Ok(sign)
}

pub fn is_squarefree(n: u64) -> bool {
    n > 0 && factorize(n).iter().all(|&(_, e)| e == 1)
}

/// Is `x` m-full outside the prime set `outside`? Every prime divisor
/// p not in `outside` must satisfy `p^m | x`. With `outside` empty this is
/// plain m-fullness; m = 1 accepts every nonzero integer.
pub fn is_m_full(x: i64, m: u32, outside: &[u64]) -> Result<bool> {
    if x == 0 {
        return Err(Error::ZeroArgument);
    }
    if m <= 1 {
        return Ok(true);
    }
    Ok(factorize(x.unsigned_abs())
        .into_iter()
        .all(|(p, e)| e >= m || outside.contains(&p)))
}

/// The unique representation of an m-full integer as
/// `sign * u^m * prod_r v_r^(m+r)` with squarefree pairwise-coprime `v_r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MFullDecomposition {
    pub sign: i8,
    pub u: u64,
    /// `v[r-1]` holds v_r for r = 1..m-1 (empty for m = 1).
    pub v: Vec<u64>,
    pub m: u32,
}

impl MFullDecomposition {
    /// Check squarefreeness and pairwise coprimality of the `v_r`.
    pub fn check_invariants(&self) -> Result<()> {
        if self.m < 1 || self.u == 0 || self.v.len() + 1 != self.m as usize {
            return Err(Error::InvalidDecomposition(format!(
                "need u >= 1 and exactly m-1 = {} values v_r",
                self.m.saturating_sub(1)
            )));
        }
        for (idx, &v) in self.v.iter().enumerate() {
            if v == 0 || !is_squarefree(v) {
                return Err(Error::InvalidDecomposition(format!(
                    "v_{} = {v} is not squarefree",
                    idx + 1
                )));
            }
        }
        for i in 0..self.v.len() {
            for j in i + 1..self.v.len() {
                if num_integer::gcd(self.v[i], self.v[j]) != 1 {
                    return Err(Error::InvalidDecomposition(format!(
                        "v_{} = {} and v_{} = {} are not coprime",
                        i + 1,
                        self.v[i],
                        j + 1,
                        self.v[j]
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Decompose an m-full integer per the greedy residue rule: for a prime p
/// with e = val_p(x), write e = qm + r; r = 0 sends p^q to u, otherwise p
/// goes to v_r and p^((e-m-r)/m) to u. Errors on input that is not m-full,
/// reporting the witnessing prime.
pub fn m_full_decompose(x: i64, m: u32) -> Result<MFullDecomposition> {
    if x == 0 {
        return Err(Error::ZeroArgument);
    }
    if m == 0 {
        return Err(Error::InvalidParameter("m must be >= 1".into()));
    }
    let sign = if x < 0 { -1 } else { 1 };
    let n = x.unsigned_abs();
    if m == 1 {
        return Ok(MFullDecomposition {
            sign,
            u: n,
            v: Vec::new(),
            m,
        });
    }
    let mut u: u64 = 1;
    let mut v = vec![1u64; m as usize - 1];
    for (p, e) in factorize(n) {
        if e < m {
            return Err(Error::NotMFull {
                x,
                m,
                witness: p,
                valuation: e,
            });
        }
        let q = e / m;
        let r = e % m;
        let u_exp = if r == 0 { q } else { q - 1 };
        if r > 0 {
            v[r as usize - 1] = v[r as usize - 1]
                .checked_mul(p)
                .ok_or(Error::Overflow("m_full_decompose"))?;
        }
        u = u
            .checked_mul(p.checked_pow(u_exp).ok_or(Error::Overflow("m_full_decompose"))?)
            .ok_or(Error::Overflow("m_full_decompose"))?;
    }
    Ok(MFullDecomposition { sign, u, v, m })
}

/// Rebuild the integer from its decomposition; exact inverse of
/// [`m_full_decompose`]. Validates the invariants first.
pub fn m_full_compose(d: &MFullDecomposition) -> Result<i64> {
    d.check_invariants()?;
    let mut acc: u128 = pow_u128(d.u as u128, d.m)?;
    for (idx, &v) in d.v.iter().enumerate() {
        let exp = d.m + idx as u32 + 1;
        acc = acc
            .checked_mul(pow_u128(v as u128, exp)?)
            .ok_or(Error::Overflow("m_full_compose"))?;
    }
    if acc > i64::MAX as u128 {
        return Err(Error::Overflow("m_full_compose"));
    }
    Ok(d.sign as i64 * acc as i64)
}

pub(crate) fn pow_u128(base: u128, exp: u32) -> Result<u128> {
    base.checked_pow(exp).ok_or(Error::Overflow("pow_u128"))
}

/// Largest r >= 0 with r^n <= x.
pub fn integer_nth_root(x: u64, n: u32) -> u64 {
    if n == 0 {
        panic!("zeroth root");
    }
    if n == 1 || x <= 1 {
        return x;
    }
    let mut r = (x as f64).powf(1.0 / n as f64).round() as u64 + 1;
    while pow_u128(r as u128, n).map(|p| p > x as u128).unwrap_or(true) {
        r -= 1;
    }
    r
}

/// Optional divisibility constraint on a decomposition: `s | u` and
/// `t[r-1] | v_r` for each r.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisibilityConstraint {
    pub s: u64,
    pub t: Vec<u64>,
}

impl DivisibilityConstraint {
    pub fn trivial(m: u32) -> Self {
        DivisibilityConstraint {
            s: 1,
            t: vec![1; m.saturating_sub(1) as usize],
        }
    }
}

/// All m-full integers in `[1, bound]`, ascending. Generated by looping the
/// `(u, v)` parametrization (not by trial division over the interval); with
/// a constraint, only values whose decomposition satisfies `s | u` and
/// `t_r | v_r` are produced.
pub fn enumerate_m_full(
    m: u32,
    bound: u64,
    constraint: Option<&DivisibilityConstraint>,
) -> Vec<u64> {
    assert!(m >= 1, "m must be >= 1");
    if bound == 0 {
        return Vec::new();
    }
    let trivial = DivisibilityConstraint::trivial(m);
    let con = constraint.unwrap_or(&trivial);
    assert_eq!(con.t.len(), m as usize - 1, "constraint shape mismatch");
    let mut out = Vec::new();
    if m == 1 {
        // Every integer is 1-full; u runs over multiples of s.
        let mut u = con.s.max(1);
        while u <= bound {
            out.push(u);
            u += con.s.max(1);
        }
        return out;
    }
    let mut v = vec![1u64; m as usize - 1];
    collect_m_full(m, bound, con, 1, 1, &mut v, &mut out);
    out.sort_unstable();
    out
}

fn collect_m_full(
    m: u32,
    bound: u64,
    con: &DivisibilityConstraint,
    r: u32,
    weight: u128,
    v: &mut Vec<u64>,
    out: &mut Vec<u64>,
) {
    if r == m {
        // All v_r fixed; u runs over multiples of s with u^m * weight <= bound.
        let s = con.s.max(1);
        let mut u = s;
        loop {
            let val = match pow_u128(u as u128, m).ok().and_then(|p| p.checked_mul(weight)) {
                Some(val) if val <= bound as u128 => val as u64,
                _ => break,
            };
            out.push(val);
            u += s;
        }
        return;
    }
    let t = con.t[r as usize - 1].max(1);
    let mut vr = t;
    loop {
        let w = match pow_u128(vr as u128, m + r).ok().and_then(|p| p.checked_mul(weight)) {
            Some(w) if w <= bound as u128 => w,
            _ => break,
        };
        let coprime_ok = v[..r as usize - 1]
            .iter()
            .all(|&prev| num_integer::gcd(prev, vr) == 1);
        if is_squarefree(vr) && coprime_ok {
            v[r as usize - 1] = vr;
            collect_m_full(m, bound, con, r + 1, w, v, out);
            v[r as usize - 1] = 1;
        }
        vr += t;
    }
}
