//! End-to-end acceptance gate. One test per shipping criterion, so the
//! harness prints one pass/fail line for each.

use std::collections::BTreeSet;
use std::path::PathBuf;

use num::{BigInt, BigRational, One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use geoiis::adversary::{AdversaryAutomaton, Alphabet, InstantGraph, Lasso};
use geoiis::classes::{classify_geo_class, geo_preimage_at_depth, Cardinality};
use geoiis::geometry::complex::Complex;
use geoiis::geometry::export::complex_to_svg;
use geoiis::geometry::{
    contraction_constants, geo_lasso, geo_prefix, simplex_diameter_l1, word_matrix,
};
use geoiis::linalg::ratio;
use geoiis::setagreement::{
    coverage_report, hole_at_depth, lower_bound_check, run_aw, synthesize_and_verify,
};
use geoiis::sperner::{lambda_tau, panchromatic_simplices, psi_labellings, verify_panlabelling};
use geoiis::{Error, Limits};

fn alpha(n: usize) -> Alphabet {
    Alphabet::generate(n, &Limits::default()).unwrap()
}

fn lasso(prefix: &[usize], period: &[usize]) -> Lasso {
    Lasso::new(prefix.to_vec(), period.to_vec()).unwrap()
}

fn fixture(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name]
        .iter()
        .collect();
    std::fs::read_to_string(path).unwrap()
}

/// Letter counts for n = 0..3 against a brute-force filter over all
/// self-including view assignments.
#[test]
fn criterion_01_alphabet_counts() {
    let expected = [1usize, 3, 13, 75];
    for (n, &want) in expected.iter().enumerate() {
        let a = alpha(n);
        assert_eq!(a.len(), want, "catalogue size for n = {n}");

        // Every process picks any view containing itself; keep the
        // assignments that validate. Containment and Immediacy do the
        // filtering, with no reference to ordered partitions.
        let procs = n + 1;
        let mut valid: BTreeSet<Vec<u64>> = BTreeSet::new();
        let mut assignment = vec![0u64; procs];
        fn rec(
            procs: usize,
            q: usize,
            assignment: &mut Vec<u64>,
            valid: &mut BTreeSet<Vec<u64>>,
        ) {
            if q == procs {
                let views: Vec<BTreeSet<usize>> = assignment
                    .iter()
                    .map(|m| (0..procs).filter(|p| m & (1 << p) != 0).collect())
                    .collect();
                if InstantGraph::new(procs - 1, views).is_ok() {
                    valid.insert(assignment.clone());
                }
                return;
            }
            for mask in 0..(1u64 << procs) {
                if mask & (1 << q) == 0 {
                    continue;
                }
                assignment[q] = mask;
                rec(procs, q + 1, assignment, valid);
            }
        }
        rec(procs, 0, &mut assignment, &mut valid);
        assert_eq!(valid.len(), want, "brute-force count for n = {n}");

        let catalogue: BTreeSet<Vec<u64>> =
            a.letters().iter().map(|g| g.view_masks()).collect();
        assert_eq!(catalogue, valid, "catalogue misses or invents letters");
    }
}

/// One-round geometry of the subdivided triangle: edge points at thirds,
/// the central vertex a fifth of the way from the barycenter's owner,
/// and the rendered layout.
#[test]
fn criterion_02_triangle_geometry() {
    let a = alpha(2);
    let c = Complex::iterated(&a, 1, &Limits::default()).unwrap();
    let lv = c.level(1);

    let third = ratio(1, 3);
    let two_thirds = ratio(2, 3);
    let fifth = ratio(1, 5);
    let two_fifths = ratio(2, 5);

    let mut edge_points = 0;
    let mut central_points = 0;
    for v in &lv.vertices {
        let support: Vec<usize> = (0..3).filter(|&p| !v.coords[p].is_zero()).collect();
        match support.len() {
            2 => {
                // A two-process exchange splits its edge at exact thirds.
                let mut vals: Vec<&BigRational> =
                    support.iter().map(|&p| &v.coords[p]).collect();
                vals.sort();
                assert_eq!(*vals[0], third);
                assert_eq!(*vals[1], two_thirds);
                edge_points += 1;
            }
            3 => {
                // Full-view placement: own weight 1/5, others 2/5.
                for p in 0..3 {
                    let want = if p == v.color { &fifth } else { &two_fifths };
                    assert_eq!(&v.coords[p], want);
                }
                central_points += 1;
            }
            _ => {}
        }
    }
    assert_eq!(edge_points, 6);
    assert_eq!(central_points, 3);

    // The color-1 central vertex reads (2/5, 1/5, 2/5). In the unit-side
    // embedding with the color-1 corner on top, its height is b_1 * √3/2
    // = √3/10. The tempting misreading (height a fifth of √3, i.e. b_1 =
    // 2/5) confuses the own weight with the others' weight.
    let central_1 = lv
        .vertices
        .iter()
        .find(|v| v.color == 1 && v.coords.iter().all(|c| !c.is_zero()))
        .unwrap();
    assert_eq!(
        central_1.coords,
        vec![two_fifths.clone(), fifth.clone(), two_fifths.clone()]
    );
    assert_eq!(central_1.coords[1], fifth);
    assert_ne!(central_1.coords[1], two_fifths);

    // Rendered layout: 13 triangles, one shaded, three corner dots.
    let svg = complex_to_svg(&c).unwrap();
    assert_eq!(svg.matches("<polygon").count(), 13);
    assert_eq!(svg.matches("#cccccc").count(), 1);
    assert_eq!(svg.matches("fill=\"black\"").count(), 3);
}

/// Subdivision correctness with exact volume accounting, through two
/// rounds in dimensions one and two.
#[test]
fn criterion_03_subdivision_verification() {
    for (n, rounds) in [(1, 1), (2, 1), (1, 2), (2, 2)] {
        let a = alpha(n);
        let c = Complex::iterated(&a, rounds, &Limits::default()).unwrap();
        let report = c.verify_subdivision();
        assert!(
            report.passed,
            "subdivision check failed for n = {n}, rounds = {rounds}: {:?}",
            report.violations
        );
        assert!(report.violations.is_empty());
    }
}

/// Contraction certificates: the exact constant in dimension one, and
/// the diameter bound diam(w) <= 2 K^|w| on random words, all exact.
#[test]
fn criterion_04_contraction() {
    let report1 = contraction_constants(&alpha(1)).unwrap();
    assert_eq!(report1.k_upper, ratio(1, 3));
    assert_eq!(report1.k_lower, ratio(1, 3));

    let mut rng = ChaCha8Rng::seed_from_u64(0xC0_4711);
    for n in 1..=3usize {
        let a = alpha(n);
        let report = contraction_constants(&a).unwrap();
        assert!(report.k_lower > BigRational::zero());
        assert!(report.k_lower <= report.k_upper);
        assert!(report.k_upper < BigRational::one());

        // Base simplex has l1 diameter 2; each letter shrinks by its own
        // worst pair coefficient, hence by K at worst.
        for _ in 0..100 {
            let len = rng.random_range(1..=5);
            let word: Vec<usize> = (0..len).map(|_| rng.random_range(0..a.len())).collect();
            let v = geo_prefix(&a, &word).unwrap();
            let diam = simplex_diameter_l1(&v);
            let mut product = ratio(2, 1);
            for &id in &word {
                product *= report.per_letter[id].2.clone();
            }
            let k_pow = ratio(2, 1)
                * num::pow::pow(report.k_upper.clone(), word.len());
            assert!(diam <= product, "per-letter product bound broke on {word:?}");
            assert!(product <= k_pow);
        }
    }
}

/// Limit points: the all-to-all lasso lands on the uniform barycenter,
/// and the exact solve matches long power iteration far below 2^-64.
#[test]
fn criterion_05_geo_fixed_points() {
    let eps = BigRational::new(BigInt::one(), BigInt::one() << 64);
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0_0505);
    for n in 1..=3usize {
        let a = alpha(n);
        let complete = a.complete_id();
        let uniform = ratio(1, (n + 1) as i64);
        let point = geo_lasso(&a, &lasso(&[], &[complete])).unwrap();
        for coord in &point {
            assert_eq!(coord, &uniform);
        }

        let mut cases = vec![lasso(&[], &[complete])];
        for _ in 0..3 {
            let plen = rng.random_range(0..=2);
            let qlen = rng.random_range(1..=3);
            let prefix: Vec<usize> = (0..plen).map(|_| rng.random_range(0..a.len())).collect();
            let period: Vec<usize> = (0..qlen).map(|_| rng.random_range(0..a.len())).collect();
            cases.push(lasso(&prefix, &period));
        }
        for l in cases {
            let exact = geo_lasso(&a, &l).unwrap();
            let m_prefix = word_matrix(&a, &l.prefix).unwrap();
            let m_period = word_matrix(&a, &l.period).unwrap();
            // Words compose by left multiplication, so the lasso's round-r
            // matrix is M(period)^k * M(prefix). Row 0 of the period power
            // is iterated as a row vector, then pushed through the prefix.
            let row_mul = |x: &[BigRational], m: &Vec<Vec<BigRational>>| -> Vec<BigRational> {
                (0..=n)
                    .map(|j| {
                        (0..=n)
                            .map(|k| &x[k] * &m[k][j])
                            .fold(BigRational::zero(), |acc, t| acc + t)
                    })
                    .collect()
            };
            let mut x: Vec<BigRational> = (0..=n)
                .map(|j| {
                    if j == 0 {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect();
            for _ in 0..200 {
                x = row_mul(&x, &m_period);
            }
            x = row_mul(&x, &m_prefix);
            for (approx, exact) in x.iter().zip(&exact) {
                assert!((approx - exact).abs() < eps, "power iteration drifted on {l}");
            }
        }
    }
}

/// The class trichotomy on the three reference executions, confirmed by
/// the finite-depth preimage sizes 1, 2, and growing.
#[test]
fn criterion_06_classification_trichotomy() {
    let a2 = alpha(2);
    let a1 = alpha(1);
    let k2 = a2.complete_id();

    let one = classify_geo_class(&a2, &lasso(&[], &[k2])).unwrap();
    assert_eq!(one.cardinality, Cardinality::One);

    let two = classify_geo_class(&a1, &lasso(&[2], &[0])).unwrap();
    assert_eq!(two.cardinality, Cardinality::Two);
    assert!(two.twin.as_ref().unwrap().same_word(&lasso(&[1], &[0])));

    let inf = classify_geo_class(&a2, &lasso(&[], &[0])).unwrap();
    assert_eq!(inf.cardinality, Cardinality::Infinite);

    let limits = Limits::default();
    let mut previous_inf = 0usize;
    for depth in 2..=5usize {
        let p1 = geo_lasso(&a2, &lasso(&[], &[k2])).unwrap();
        let pre1 = geo_preimage_at_depth(&a2, &p1, depth, &limits).unwrap();
        assert_eq!(pre1.len(), 1);

        let p2 = geo_lasso(&a1, &lasso(&[2], &[0])).unwrap();
        let pre2 = geo_preimage_at_depth(&a1, &p2, depth, &limits).unwrap();
        assert_eq!(pre2.len(), 2);

        let p3 = geo_lasso(&a2, &lasso(&[], &[0])).unwrap();
        let pre3 = geo_preimage_at_depth(&a2, &p3, depth, &limits).unwrap();
        assert!(pre3.len() >= 3, "infinite class looks finite at depth {depth}");
        assert!(pre3.len() > previous_inf, "preimage stopped growing");
        previous_inf = pre3.len();
    }
}

/// Panlabelling uniqueness: exhaustive over one-round targets in
/// dimensions one and two, sampled in dimension three, and through
/// three rounds for the all-to-all word.
#[test]
fn criterion_07_panlabelling_uniqueness() {
    let limits = Limits::default();
    for n in [1usize, 2] {
        let a = alpha(n);
        let c = Complex::iterated(&a, 1, &limits).unwrap();
        for tau in 0..a.len() {
            let labels = lambda_tau(&a, &c, tau).unwrap();
            let report = verify_panlabelling(&a, &c, tau, &labels).unwrap();
            assert!(report.sperner_ok, "labels left a carrier at tau = {tau}, n = {n}");
            assert!(
                report.unique_expected,
                "panchromatic simplex not unique at tau = {tau}, n = {n}"
            );
        }
    }

    let a3 = alpha(3);
    let c3 = Complex::iterated(&a3, 1, &limits).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0_0707);
    let mut sampled = BTreeSet::new();
    while sampled.len() < 10 {
        sampled.insert(rng.random_range(0..a3.len()));
    }
    for tau in sampled {
        let labels = lambda_tau(&a3, &c3, tau).unwrap();
        let report = verify_panlabelling(&a3, &c3, tau, &labels).unwrap();
        assert!(report.sperner_ok && report.unique_expected, "tau = {tau}, n = 3");
    }

    let a2 = alpha(2);
    let k2 = a2.complete_id();
    let word = vec![k2, k2, k2];
    let c = Complex::iterated(&a2, 3, &limits).unwrap();
    let levels = psi_labellings(&a2, &c, &word).unwrap();
    for (i, labels) in levels.iter().enumerate() {
        let level = i + 1;
        let expected = c.simplex_by_word(&word[..level]).unwrap();
        let pan = panchromatic_simplices(&c, level, labels);
        assert_eq!(pan, vec![expected], "round {level} of the tracked labelling");
    }
}

/// Any labelling confined to carriers owns a panchromatic simplex:
/// a thousand randomized labellings of the twice-subdivided triangle.
#[test]
fn criterion_08_sperner_oracle() {
    let a = alpha(2);
    let c = Complex::iterated(&a, 2, &Limits::default()).unwrap();
    let verts = &c.level(2).vertices;
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0_0808);
    for round in 0..1000 {
        let labels: Vec<usize> = verts
            .iter()
            .map(|v| {
                let support: Vec<usize> =
                    (0..3).filter(|&p| !v.coords[p].is_zero()).collect();
                support[rng.random_range(0..support.len())]
            })
            .collect();
        let pan = panchromatic_simplices(&c, 2, &labels);
        assert!(!pan.is_empty(), "labelling {round} has no panchromatic simplex");
    }
}

/// End-to-end solvability against the adversary that forbids an
/// all-to-all first round: hole found at depth one, synthesis verified
/// through probe depth three, coverage census exact.
#[test]
fn criterion_09_end_to_end_solvability() {
    let a = alpha(2);
    let limits = Limits::default();
    let ma = AdversaryAutomaton::parse(&fixture("forbid_first_complete.adv"), &a).unwrap();
    let k2 = a.complete_id();

    let hole = hole_at_depth(&a, &ma, 1).unwrap().unwrap();
    assert_eq!(hole.word, vec![k2]);
    assert!(hole.excluded_execution.same_word(&lasso(&[], &[k2])));

    let rule = lasso(&[], &[k2]);
    let report = synthesize_and_verify(&a, &ma, &rule, 3, 10, &limits).unwrap();
    assert!(report.probes.len() >= 2028, "probe family too small");
    assert!(report.all_ok, "a probe failed: {:?}", report.failures().next());

    let coverage = coverage_report(&a, &ma, 2, &limits).unwrap();
    assert_eq!((coverage.allowed, coverage.total), (156, 169));
}

/// While an execution tracks an excluded class, some process stays
/// undecided: checked through round six on both members of the
/// two-element class and on the singleton class.
#[test]
fn criterion_10_lower_bound() {
    let a2 = alpha(2);
    let k2 = a2.complete_id();
    let rule2 = lasso(&[], &[k2]);
    let a1 = alpha(1);
    let rule1 = lasso(&[2], &[0]);
    let twin1 = lasso(&[1], &[0]);

    for t in 1..=6usize {
        assert!(lower_bound_check(&a2, &rule2, &rule2, t).unwrap());
        // Tracks the singleton class for t rounds, then deviates.
        let deviate = lasso(&vec![k2; t], &[0]);
        assert!(lower_bound_check(&a2, &rule2, &deviate, t).unwrap());

        assert!(lower_bound_check(&a1, &rule1, &rule1, t).unwrap());
        assert!(lower_bound_check(&a1, &rule1, &twin1, t).unwrap());
        // Tracks the twin for t rounds, then leaves the class.
        let mut prefix = vec![1];
        prefix.extend(std::iter::repeat_n(0, t - 1));
        let twin_then_k = lasso(&prefix, &[2]);
        assert!(lower_bound_check(&a1, &rule1, &twin_then_k, t).unwrap());
    }

    // An execution that deviates in round one is no witness.
    assert!(matches!(
        lower_bound_check(&a1, &rule1, &lasso(&[0], &[0]), 1),
        Err(Error::PreconditionFailed(_))
    ));
}

/// Under the unrestricted adversary no rule is certifiable, and every
/// probed rule meets a violating execution: running a rule on itself
/// never decides anything.
#[test]
fn criterion_11_impossibility() {
    let a = alpha(2);
    let limits = Limits::default();
    let full = AdversaryAutomaton::parse(&fixture("full_is2.adv"), &a).unwrap();
    let k2 = a.complete_id();

    assert!(matches!(
        synthesize_and_verify(&a, &full, &lasso(&[], &[k2]), 2, 8, &limits),
        Err(Error::VerificationRefused(_))
    ));

    let mut rules: Vec<Lasso> = (0..a.len()).map(|g| lasso(&[], &[g])).collect();
    rules.push(lasso(&[5], &[k2]));
    rules.push(lasso(&[k2, 4], &[7]));
    for rule in rules {
        let run = run_aw(&a, &rule, &rule, 6).unwrap();
        assert!(
            run.outcomes.iter().all(|o| o.decided_round.is_none()),
            "rule {rule} decided on itself"
        );
    }
}
