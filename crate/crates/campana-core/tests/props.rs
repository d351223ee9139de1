//! Property-based invariants.

use num_complex::Complex64;
use proptest::prelude::*;

use campana_core::arith::{
    enumerate_m_full, is_m_full, m_full_compose, m_full_decompose, MFullDecomposition,
};
use campana_core::circle::complete_sum;
use campana_core::inclusion_exclusion::{STPair, VarpiTable};
use campana_core::orbifold::OrbifoldWeights;

/// Squarefree values small enough that any decomposition we build fits i64.
const SQUAREFREE_POOL: [u64; 12] = [1, 2, 3, 5, 6, 7, 10, 11, 13, 14, 15, 17];

fn decomposition_strategy() -> impl Strategy<Value = MFullDecomposition> {
    (2u32..=4, 1u64..40, any::<bool>(), proptest::collection::vec(0usize..SQUAREFREE_POOL.len(), 3))
        .prop_filter_map("v must be pairwise coprime", |(m, u, neg, idx)| {
            let v: Vec<u64> = idx[..m as usize - 1]
                .iter()
                .map(|&i| SQUAREFREE_POOL[i])
                .collect();
            for i in 0..v.len() {
                for j in i + 1..v.len() {
                    if num_integer::gcd(v[i], v[j]) != 1 {
                        return None;
                    }
                }
            }
            Some(MFullDecomposition {
                sign: if neg { -1 } else { 1 },
                u,
                v,
                m,
            })
        })
}

proptest! {
    /// compose then decompose returns the canonical representation of the
    /// same integer, and re-composing returns the integer.
    #[test]
    fn compose_decompose_round_trip(d in decomposition_strategy()) {
        if let Ok(x) = m_full_compose(&d) {
            let back = m_full_decompose(x, d.m).unwrap();
            back.check_invariants().unwrap();
            prop_assert_eq!(m_full_compose(&back).unwrap(), x);
            // uniqueness: the canonical decomposition is exactly d
            prop_assert_eq!(back, d);
        }
    }

    /// The (u,v)-parametrized enumeration equals the membership scan.
    #[test]
    fn enumeration_matches_scan(m in 2u32..=4, bound in 1u64..2500) {
        let listed = enumerate_m_full(m, bound, None);
        let scanned: Vec<u64> = (1..=bound)
            .filter(|&x| is_m_full(x as i64, m, &[]).unwrap())
            .collect();
        prop_assert_eq!(listed, scanned);
    }

    /// Products of coprime m-full integers stay m-full.
    #[test]
    fn coprime_products_stay_m_full(m in 2u32..=3, a in 1usize..40, b in 1usize..40) {
        let pool = enumerate_m_full(m, 5000, None);
        let x = pool[a % pool.len()];
        let y = pool[b % pool.len()];
        prop_assume!(num_integer::gcd(x, y) == 1);
        prop_assume!(x.checked_mul(y).is_some());
        prop_assert!(is_m_full((x * y) as i64, m, &[]).unwrap());
    }

    /// Complete sums are periodic in a and conjugate under negation.
    #[test]
    fn complete_sum_symmetries(a in 1i64..50, q in 1u64..60, c in -9i128..9, m in 1u32..5) {
        prop_assume!(c != 0);
        let s = complete_sum(a, q, c, m).unwrap();
        let shifted = complete_sum(a + q as i64, q, c, m).unwrap();
        prop_assert!((s - shifted).norm() < 1e-9);
        let negated = complete_sum(-a, q, c, m).unwrap();
        prop_assert!((s.conj() - negated).norm() < 1e-9);
        // q = 1 collapses to the single term e(0) = 1
        let unit = complete_sum(a, 1, c, m).unwrap();
        prop_assert!((unit - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    /// varpi is multiplicative across disjoint prime supports.
    #[test]
    fn varpi_multiplicative(pa in 0usize..3, pb in 0usize..3, slots in proptest::collection::vec(0u8..5, 4)) {
        let primes_a = [2u64, 3, 5];
        let primes_b = [7u64, 11, 13];
        let (p, q) = (primes_a[pa], primes_b[pb]);
        let weights = OrbifoldWeights::new(vec![2, 2]).unwrap();
        let table = VarpiTable::new(&weights);
        // slot codes: 0 none, 1 s only, 2 t only, 3 both, 4 square in s
        let build = |prime: u64, codes: &[u8]| {
            let mut pair = STPair::trivial(&weights);
            for i in 0..2 {
                match codes[i] {
                    1 => pair.s[i] *= prime,
                    2 => pair.t[i][0] *= prime,
                    3 => {
                        pair.s[i] *= prime;
                        pair.t[i][0] *= prime;
                    }
                    4 => pair.s[i] *= prime * prime,
                    _ => {}
                }
            }
            pair
        };
        let pair_a = build(p, &slots[..2]);
        let pair_b = build(q, &slots[2..]);
        let merged = STPair {
            s: vec![pair_a.s[0] * pair_b.s[0], pair_a.s[1] * pair_b.s[1]],
            t: vec![
                vec![pair_a.t[0][0] * pair_b.t[0][0]],
                vec![pair_a.t[1][0] * pair_b.t[1][0]],
            ],
        };
        prop_assert_eq!(
            table.varpi(&merged),
            table.varpi(&pair_a) * table.varpi(&pair_b)
        );
    }
}
