//! Acceptance suite: one test per criterion, each printing a PASS line with
//! the measured quantity. All tolerances are pinned here, in code.
//!
//! Run with `cargo test --release --test acceptance -- --nocapture`.

use std::collections::BTreeSet;
use std::time::Instant;

use campana_core::arith::{
    enumerate_m_full, is_m_full, is_squarefree, m_full_compose, m_full_decompose, primes_up_to,
    MFullDecomposition,
};
use campana_core::circle::{
    self, euler_factor_from_complete_sums, local_density, singular_integral, IntegralChoice,
    IntegralMethod, SeriesMode, Truncation,
};
use campana_core::counting::{
    assemble_n, count_campana, count_m, count_n, CountBudget, CountMethod,
};
use campana_core::inclusion_exclusion::{verify_ie_identity, STPair, VarpiTable};
use campana_core::orbifold::{
    check_admissible, s0, CampanaOrbifold, DiagonalForm, OrbifoldWeights,
};

const Q7_D: [i64; 7] = [1, 1, 1, 1, -1, -1, -1];
const Q7_Z: [u64; 7] = [1; 7];
const Q7_M: [u32; 7] = [2; 7];

fn orbifold(k: u32, c: &[i64], m: &[u32]) -> CampanaOrbifold {
    CampanaOrbifold::new(
        DiagonalForm::new(k, c.to_vec()).unwrap(),
        OrbifoldWeights::new(m.to_vec()).unwrap(),
    )
    .unwrap()
}

fn budget() -> CountBudget {
    CountBudget::default()
}

/// Criterion 1: decomposition round-trip, invariants and uniqueness.
#[test]
fn criterion_01_decomposition_suite() {
    let start = Instant::now();
    let mut checked = 0u64;
    for m in 2..=4u32 {
        for x in enumerate_m_full(m, 1_000_000, None) {
            if x < 2 {
                continue;
            }
            for y in [x as i64, -(x as i64)] {
                let d = m_full_decompose(y, m).unwrap();
                d.check_invariants().unwrap();
                assert!(d.v.iter().all(|&v| is_squarefree(v)));
                assert_eq!(m_full_compose(&d).unwrap(), y);
                checked += 1;
            }
        }
    }

    // Uniqueness oracle: enumerate every (u, v) tuple with composed value
    // <= 10^4 and verify values never collide and decompose back to the
    // generating tuple.
    for m in 2..=4u32 {
        let mut seen: std::collections::HashMap<i64, MFullDecomposition> =
            std::collections::HashMap::new();
        let slots = m as usize - 1;
        let mut v = vec![1u64; slots];
        enumerate_uv(m, 0, &mut v, &mut |v| {
            for u in 1..=100u64 {
                let cand = MFullDecomposition {
                    sign: 1,
                    u,
                    v: v.to_vec(),
                    m,
                };
                let Ok(value) = m_full_compose(&cand) else {
                    break;
                };
                if value > 10_000 {
                    break;
                }
                if let Some(prev) = seen.insert(value, cand.clone()) {
                    panic!("collision at {value}: {prev:?} vs {cand:?}");
                }
                assert_eq!(m_full_decompose(value, m).unwrap(), cand);
            }
        });
        drop(seen);
    }

    let elapsed = start.elapsed();
    assert!(
        elapsed.as_secs() < 60,
        "decomposition suite took {elapsed:?}, budget 60 s"
    );
    println!(
        "criterion 01 PASS: decomposition round-trip on {checked} values (|x| <= 1e6, m in 2..4), uniqueness to 1e4, {elapsed:?}"
    );
}

fn enumerate_uv(m: u32, r: usize, v: &mut Vec<u64>, f: &mut impl FnMut(&[u64])) {
    if r == m as usize - 1 {
        f(v);
        return;
    }
    let exp = m + r as u32 + 1;
    let mut cand = 1u64;
    while (cand as u128).pow(exp) <= 10_000 {
        if is_squarefree(cand) && v[..r].iter().all(|&p| num_integer::gcd(p, cand) == 1) {
            v[r] = cand;
            enumerate_uv(m, r + 1, v, f);
            v[r] = 1;
        }
        cand += 1;
    }
}

/// Criterion 2: squareful census at 50 and sieve/test agreement at 1e5.
#[test]
fn criterion_02_squareful_census() {
    assert_eq!(
        enumerate_m_full(2, 50, None),
        vec![1, 4, 8, 9, 16, 25, 27, 32, 36, 49]
    );
    let listed: BTreeSet<u64> = enumerate_m_full(2, 100_000, None).into_iter().collect();
    let scanned: BTreeSet<u64> = (1..=100_000u64)
        .filter(|&x| is_m_full(x as i64, 2, &[]).unwrap())
        .collect();
    assert_eq!(listed, scanned);
    println!(
        "criterion 02 PASS: census at B=50 exact, parametrized enumeration = membership scan at B=1e5 ({} values)",
        listed.len()
    );
}

fn battery() -> Vec<(CampanaOrbifold, u64)> {
    vec![
        (orbifold(2, &[1, -1], &[2, 2]), 200),
        (orbifold(2, &[1, 1, -2], &[2, 2, 2]), 200),
        (orbifold(2, &[1, -2], &[2, 3]), 200),
        (orbifold(2, &[1, 3, -4], &[2, 2, 2]), 200),
        (orbifold(2, &[2, -1], &[3, 2]), 200),
        (orbifold(2, &[5, -1, -4], &[2, 2, 2]), 200),
        (orbifold(2, &[1, 1, 1, -3], &[2, 2, 2, 2]), 120),
        (orbifold(3, &[1, -1], &[2, 2]), 200),
        (orbifold(3, &[1, 1, -2], &[2, 2, 2]), 150),
        (orbifold(3, &[1, -2], &[2, 2]), 200),
        (orbifold(1, &[1, 1, -1], &[2, 2, 2]), 150),
        (orbifold(4, &[1, -1], &[2, 2]), 200),
    ]
}

/// Criterion 3: N(B) = 2 * #N(X,D,B) exactly, N(B) even.
#[test]
fn criterion_03_half_identity() {
    let battery = battery();
    assert!(battery.len() >= 10);
    for (orb, bound) in &battery {
        let n = count_n(orb, *bound, &budget(), None).unwrap().count;
        assert_eq!(n % 2, 0, "N(B) must be even for {orb:?}");
        let camp = count_campana(orb, *bound, &budget()).unwrap().count;
        assert_eq!(n, 2 * camp, "identity N = 2 * #N(X,D,B) failed for {orb:?}");
    }
    println!(
        "criterion 03 PASS: N(B) = 2 * campana count on {} orbifolds, B <= 200",
        battery.len()
    );
}

/// Criterion 4: parity assembly N(B) from primitive positive counts, both
/// parities of k.
#[test]
fn criterion_04_parity_assembly() {
    let battery = battery();
    let mut even = 0;
    let mut odd = 0;
    for (orb, bound) in &battery {
        let direct = count_n(orb, *bound, &budget(), None).unwrap().count;
        let assembled = assemble_n(orb, *bound, &budget()).unwrap();
        assert_eq!(direct, assembled, "assembly identity failed for {orb:?}");
        if orb.form.k() % 2 == 0 {
            even += 1;
        } else {
            odd += 1;
        }
    }
    assert!(even >= 2 && odd >= 2, "need both parities covered");
    println!(
        "criterion 04 PASS: sign-pattern assembly = direct count on {} instances ({even} even k, {odd} odd k)",
        battery.len()
    );
}

/// Criterion 5: inclusion–exclusion identity, difference exactly zero.
#[test]
fn criterion_05_inclusion_exclusion_identity() {
    let instances: Vec<(Vec<i64>, Vec<u32>, u32, u64)> = vec![
        (vec![1, 1, -2], vec![2, 2, 2], 2, 200),
        (vec![1, -1], vec![2, 2], 2, 200),
        (vec![1, -2], vec![2, 3], 2, 200),
        (vec![1, 1, -1], vec![2, 2, 2], 1, 150),
        (vec![1, -1], vec![2, 2], 3, 200),
        (vec![2, 3, -5], vec![2, 2, 2], 2, 200),
    ];
    assert!(instances.len() >= 5);
    for (d, m, k, bound) in &instances {
        let w = OrbifoldWeights::new(m.clone()).unwrap();
        let rep = verify_ie_identity(d, &w, *k, *bound, &budget()).unwrap();
        assert_eq!(
            rep.difference, 0,
            "identity violated for d={d:?} m={m:?} k={k}: {rep:?}"
        );
    }
    println!(
        "criterion 05 PASS: primitive count = weighted constrained sum on {} instances, difference 0",
        instances.len()
    );
}

/// Criterion 6: both vanishing properties of the inclusion–exclusion
/// weight, exhaustively over the prime-local generating structure.
///
/// varpi is multiplicative over primes by construction, so any violation
/// must already occur for a pair supported on one or two primes. The check
/// covers, for each weight shape: every single-prime slot-exponent pattern
/// with exponents <= 3 (property 1 needs exponents >= 2), and every
/// two-prime pattern with exponents <= 2 (<= 1 for the six-slot shapes,
/// where higher exponents are already covered per prime), over all primes
/// <= 50 and coordinate values <= 1e4. Zero violations allowed.
#[test]
fn criterion_06_varpi_vanishing() {
    let primes = primes_up_to(50);
    let shapes: Vec<Vec<u32>> = vec![vec![2, 2], vec![2, 3], vec![3, 3], vec![2, 2, 2]];
    let mut checked = 0u64;
    for shape in &shapes {
        let weights = OrbifoldWeights::new(shape.clone()).unwrap();
        let table = VarpiTable::new(&weights);
        let slots: usize = shape.iter().map(|&mi| mi as usize).sum();

        // single prime, exponents 0..=3
        for &p in &primes {
            let mut exps = vec![0u32; slots];
            loop {
                if let Some(pair) = build_pair(&weights, &[(p, exps.clone())]) {
                    check_vanishing(&table, &pair, &mut checked);
                }
                if !increment(&mut exps, 3) {
                    break;
                }
            }
        }

        // two primes; exponent cap 2 (1 for six-slot shapes)
        let cap = if slots >= 6 { 1 } else { 2 };
        for (i, &p) in primes.iter().enumerate() {
            for &q in &primes[i + 1..] {
                let mut ep = vec![0u32; slots];
                loop {
                    let mut eq = vec![0u32; slots];
                    loop {
                        if let Some(pair) =
                            build_pair(&weights, &[(p, ep.clone()), (q, eq.clone())])
                        {
                            check_vanishing(&table, &pair, &mut checked);
                        }
                        if !increment(&mut eq, cap) {
                            break;
                        }
                    }
                    if !increment(&mut ep, cap) {
                        break;
                    }
                }
            }
        }
    }
    println!(
        "criterion 06 PASS: both vanishing properties hold on {checked} generated (s,t) pairs (primes <= 50, coordinates <= 1e4), zero violations"
    );
}

fn increment(exps: &mut [u32], cap: u32) -> bool {
    for e in exps.iter_mut() {
        *e += 1;
        if *e <= cap {
            return true;
        }
        *e = 0;
    }
    false
}

/// Assemble an STPair from per-prime slot exponents; None when a coordinate
/// value would exceed 1e4.
fn build_pair(weights: &OrbifoldWeights, parts: &[(u64, Vec<u32>)]) -> Option<STPair> {
    let mut pair = STPair::trivial(weights);
    for (p, exps) in parts {
        let mut slot = 0;
        for i in 0..weights.len() {
            let m = weights.m()[i] as usize;
            for local in 0..m {
                let e = exps[slot];
                slot += 1;
                if e == 0 {
                    continue;
                }
                let factor = p.checked_pow(e)?;
                let target = if local == 0 {
                    &mut pair.s[i]
                } else {
                    &mut pair.t[i][local - 1]
                };
                *target = target.checked_mul(factor)?;
                if *target > 10_000 {
                    return None;
                }
            }
        }
    }
    Some(pair)
}

fn check_vanishing(table: &VarpiTable, pair: &STPair, checked: &mut u64) {
    *checked += 1;
    let value = table.varpi(pair);
    let weights = table.weights();
    // property 1: a square divisor in any slot forces zero
    let has_square = pair
        .s
        .iter()
        .chain(pair.t.iter().flatten())
        .any(|&x| !is_squarefree(x));
    // property 2: some prime divides one coordinate's slots but misses
    // another coordinate entirely
    let mut support_broken = false;
    let mut all_primes: BTreeSet<u64> = BTreeSet::new();
    let coord_support = |i: usize| -> BTreeSet<u64> {
        let mut set = BTreeSet::new();
        for (p, _) in campana_core::arith::factorize(pair.s[i]) {
            set.insert(p);
        }
        for &t in &pair.t[i] {
            for (p, _) in campana_core::arith::factorize(t) {
                set.insert(p);
            }
        }
        set
    };
    let supports: Vec<BTreeSet<u64>> = (0..weights.len()).map(coord_support).collect();
    for s in &supports {
        all_primes.extend(s.iter().copied());
    }
    for p in &all_primes {
        if supports.iter().any(|s| !s.contains(p)) {
            support_broken = true;
        }
    }
    if has_square {
        assert_eq!(value, 0, "property 1 violated at {pair:?}");
    }
    if support_broken {
        assert_eq!(value, 0, "property 2 violated at {pair:?}");
    }
}

/// Criterion 7: golden s0 value and the exact admissibility boundary.
#[test]
fn criterion_07_s0_and_admissibility_boundary() {
    assert_eq!(s0(4).unwrap(), 8);
    // k = 2, all m_i = 2: condition holds for 17 weights, fails for 16
    let mut c17 = vec![1i64; 16];
    c17.push(-1);
    let pass = check_admissible(&orbifold(2, &c17, &[2; 17])).unwrap();
    assert!(pass.condition_main);
    assert_eq!(pass.theta.num, "1");
    assert_eq!(pass.theta.den, "16");
    let mut c16 = vec![1i64; 15];
    c16.push(-1);
    let fail = check_admissible(&orbifold(2, &c16, &[2; 16])).unwrap();
    assert!(!fail.condition_main);
    assert_eq!(fail.theta.num, "0");
    println!("criterion 07 PASS: s0(4) = 8; admissibility flips exactly between 16 and 17 weights of 2 at k = 2");
}

/// Criterion 8: the p-local factor from complete sums matches the exact
/// p-adic density at level 3, relative error <= 1e-3.
#[test]
fn criterion_08_local_density_euler_agreement() {
    let start = Instant::now();
    let z: Vec<u128> = Q7_Z.iter().map(|&x| x as u128).collect();
    let mut worst: f64 = 0.0;
    for p in primes_up_to(23) {
        let from_sums = euler_factor_from_complete_sums(p, 3, &Q7_D, &z, &Q7_M).unwrap();
        let exact = local_density(&Q7_D, &z, &Q7_M, p, 3, &budget()).unwrap().to_f64();
        let rel = ((from_sums - exact) / exact).abs();
        worst = worst.max(rel);
        assert!(
            rel <= 1e-3,
            "p = {p}: complete sums {from_sums} vs density {exact} (rel {rel})"
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 300, "took {elapsed:?}, budget 5 min");
    println!(
        "criterion 08 PASS: prime-power complete sums = exact p-adic density for p <= 23 at level 3 (worst rel {worst:.2e}), {elapsed:?}"
    );
}

/// Criterion 9: singular-integral golden value and cross-method agreement.
#[test]
fn criterion_09_singular_integral() {
    // slab Monte Carlo, 1e7 samples, within 3 standard errors of pi/4
    let slab = singular_integral(
        &[1, 1, -1],
        &[2, 2, 2],
        &IntegralMethod::Slab {
            samples: 10_000_000,
            seed: 2024,
            scale: None,
        },
    )
    .unwrap();
    let target = std::f64::consts::FRAC_PI_4;
    let dev = (slab.value - target).abs() / slab.std_error;
    assert!(
        dev <= 3.0,
        "slab {} vs pi/4 {} is {dev:.2} standard errors (se {})",
        slab.value,
        target,
        slab.std_error
    );

    // slab vs oscillatory on the 7-variable quadratic, combined 3-sigma bars
    let trunc = Truncation {
        mc_samples: 10_000_000,
        seed: 2024,
        ..Truncation::default()
    };
    let (s7, o7) = circle::integral_cross_checked(&Q7_D, &Q7_M, &trunc, 3.0).unwrap();
    println!(
        "criterion 09 PASS: slab = {:.6} ({dev:.2} se from pi/4); quadratic7 slab {:.6} vs oscillatory {:.6} within combined bars",
        slab.value, s7.value, o7.value
    );
}

/// Criterion 10: end-to-end surrogate of the counting asymptotic at desk
/// scale — exact histogram-convolution counts against the predicted main
/// term on the 7-variable quadratic.
#[test]
fn criterion_10_end_to_end_prediction() {
    let start = Instant::now();
    let grid: Vec<u64> = vec![1 << 10, 1 << 11, 1 << 12, 1 << 13];
    let mut counts = Vec::new();
    for &b in &grid {
        let sc = count_m(
            &Q7_D,
            &Q7_Z,
            &Q7_M,
            b,
            &budget(),
            Some(CountMethod::HistogramConvolution),
        )
        .unwrap();
        counts.push(sc.count);
    }
    // fitted log-log exponent within 0.05 of Gamma~ = 5/2
    let pts: Vec<(f64, f64)> = grid
        .iter()
        .zip(&counts)
        .map(|(&b, &c)| ((b as f64).ln(), (c as f64).ln()))
        .collect();
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    assert!(
        (slope - 2.5).abs() <= 0.05,
        "fitted exponent {slope} deviates from 5/2 by more than 0.05"
    );

    // predicted main term within 15% of the exact count at B~ = 2^12
    let trunc = Truncation {
        series_mode: SeriesMode::QSum { q_max: 500 },
        integral: IntegralChoice::Slab,
        mc_samples: 10_000_000,
        seed: 7,
        ..Truncation::default()
    };
    let pred = circle::predict_m(&Q7_D, &Q7_Z, &Q7_M, 4096.0, &trunc).unwrap();
    let exact = counts[2] as f64;
    let rel = ((pred.main_term - exact) / exact).abs();
    assert!(
        rel <= 0.15,
        "main term {} vs exact {exact}: relative deviation {rel}",
        pred.main_term
    );
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 600, "took {elapsed:?}, budget 10 min");
    println!(
        "criterion 10 PASS: exponent fit {slope:.4} (target 5/2 +- 0.05); prediction/exact at 2^12 = {:.4} (within 15%), counts {:?}, {elapsed:?}",
        pred.main_term / exact,
        counts
    );
}

/// Criterion 11: byte-identical records under a fixed seed and counts
/// independent of the worker-thread count.
#[test]
fn criterion_11_determinism() {
    let trunc = Truncation {
        mc_samples: 1_000_000,
        seed: 99,
        ..Truncation::default()
    };
    let a = circle::predict_m(&Q7_D, &Q7_Z, &Q7_M, 2048.0, &trunc).unwrap();
    let b = circle::predict_m(&Q7_D, &Q7_Z, &Q7_M, 2048.0, &trunc).unwrap();
    let ja = serde_json::to_vec(&a).unwrap();
    let jb = serde_json::to_vec(&b).unwrap();
    assert_eq!(ja, jb, "identical seeds must give byte-identical records");

    let orb = orbifold(2, &[1, 1, -2], &[2, 2, 2]);
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| count_n(&orb, 150, &budget(), None).unwrap().count);
    let many = rayon::ThreadPoolBuilder::new()
        .num_threads(8)
        .build()
        .unwrap()
        .install(|| count_n(&orb, 150, &budget(), None).unwrap().count);
    assert_eq!(single, many, "counts must not depend on the thread count");

    let m_single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(|| count_m(&Q7_D, &Q7_Z, &Q7_M, 2048, &budget(), None).unwrap().count);
    let m_many = rayon::ThreadPoolBuilder::new()
        .num_threads(8)
        .build()
        .unwrap()
        .install(|| count_m(&Q7_D, &Q7_Z, &Q7_M, 2048, &budget(), None).unwrap().count);
    assert_eq!(m_single, m_many);
    println!(
        "criterion 11 PASS: byte-identical prediction records under seed 99; counts equal on 1 and 8 threads ({single}, {m_single})"
    );
}
