mod common;

use blinkwrt::algebra::AlgebraTables;
use blinkwrt::blink::catalog;
use blinkwrt::statesum::{kappa, kappa_prime, kappa_prime_total};
use common::*;
use num_complex::Complex64;
use proptest::prelude::*;

#[test]
fn pruned_equals_brute_force_on_all_small_blinks() {
    let t = AlgebraTables::new(3).unwrap();
    let oracle = Oracle { r: 3 };
    let maps = plane_maps(5);
    // sensed plane maps with 0..=5 edges
    assert_eq!(maps.iter().map(Vec::len).collect::<Vec<_>>(), vec![1, 2, 4, 14, 57, 312]);
    let mut checked = 0;
    for level in maps.iter().skip(1) {
        for m in level {
            for b in colorings(m) {
                let (pruned, _) = kappa_prime(&b, &t).unwrap();
                let brute = oracle.brute_kappa_prime(&b);
                assert!(close_rel(pruned, brute, 1e-10), "{}: {pruned} vs {brute}", b.to_text());
                checked += 1;
            }
        }
    }
    assert!(checked > 1000, "{checked}");
}

#[test]
fn brute_force_at_higher_levels() {
    for r in [4u32, 5] {
        let t = AlgebraTables::new(r).unwrap();
        let oracle = Oracle { r };
        for (name, b) in corpus() {
            if !b.is_connected() || b.n_edges() == 0 || b.n_edges() > 4 {
                continue;
            }
            let (pruned, _) = kappa_prime(&b, &t).unwrap();
            let brute = oracle.brute_kappa_prime(&b);
            assert!(close_rel(pruned, brute, 1e-10), "{name} r={r}: {pruned} vs {brute}");
        }
    }
}

#[test]
fn cube_matches_brute_force_at_r3() {
    let t = AlgebraTables::new(3).unwrap();
    for c in [B, G] {
        let b = catalog::cube(c);
        let (pruned, _) = kappa_prime(&b, &t).unwrap();
        let brute = Oracle { r: 3 }.brute_kappa_prime(&b);
        assert!(close_rel(pruned, brute, 1e-10), "{pruned} vs {brute}");
    }
}

#[test]
fn sphere_and_handle() {
    for r in 3..=8 {
        let eta = (std::f64::consts::PI / r as f64).sin() * (2.0 / r as f64).sqrt();
        for c in [B, G] {
            let k = kappa(&catalog::single_edge(c), r).unwrap().kappa;
            assert!(close(k, Complex64::new(eta, 0.0), 1e-9));
        }
        let k = kappa(&catalog::isolated_vertex(), r).unwrap().kappa;
        assert!(close(k, Complex64::new(1.0, 0.0), 1e-9));
    }
}

#[test]
fn conjugation_and_duality_on_corpus() {
    for r in 3..=6 {
        let t = AlgebraTables::new(r).unwrap();
        for (name, b) in corpus() {
            let k = blinkwrt::statesum::kappa_with(&b, &t).unwrap().kappa;
            let neg = blinkwrt::statesum::kappa_with(&b.negate(), &t).unwrap().kappa;
            assert!(close(k, neg.conj(), 1e-9), "{name} r={r}: {k} vs {neg}");
            if b.is_connected() {
                let nd = blinkwrt::statesum::kappa_with(&b.dual().unwrap().negate(), &t).unwrap().kappa;
                assert!(close(k, nd, 1e-9), "{name} r={r}: {k} vs {nd}");
            }
        }
    }
}

#[test]
fn multiplicative_over_disjoint_union() {
    let all = corpus();
    for r in [3u32, 5] {
        let t = AlgebraTables::new(r).unwrap();
        for (i, (_, a)) in all.iter().enumerate().step_by(3) {
            for (_, b) in all.iter().skip(i).step_by(4) {
                let (ka, _) = kappa_prime_total(a, &t).unwrap();
                let (kb, _) = kappa_prime_total(b, &t).unwrap();
                let (kab, _) = kappa_prime_total(&a.disjoint_union(b), &t).unwrap();
                assert!(close_rel(kab, ka * kb, 1e-9));
            }
        }
    }
}

#[test]
fn infinite_face_choice_does_not_matter() {
    let t = AlgebraTables::new(4).unwrap();
    for (_, b) in corpus() {
        if !b.is_connected() || b.n_edges() == 0 {
            continue;
        }
        let base = kappa_prime(&b, &t).unwrap().0;
        for d in b.darts() {
            for side in ["L", "R"] {
                let text = format!("{}Finf {d} {side}\n", b.to_text());
                let moved = blinkwrt::parse_blink(&text).unwrap();
                assert!(close_rel(kappa_prime(&moved, &t).unwrap().0, base, 1e-9));
            }
        }
    }
}

#[test]
fn worker_count_does_not_change_bits() {
    let t = AlgebraTables::new(6).unwrap();
    let b = catalog::k4(&[B, G, B, G, B, B]);
    let run = |n: usize| {
        rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap().install(|| kappa_prime(&b, &t).unwrap())
    };
    let one = run(1);
    for n in [2, 3, 8] {
        let other = run(n);
        assert_eq!(one.0.re.to_bits(), other.0.re.to_bits());
        assert_eq!(one.0.im.to_bits(), other.0.im.to_bits());
        assert_eq!(one.1, other.1);
    }
}

fn random_blink() -> impl Strategy<Value = blinkwrt::Blink> {
    (
        prop::collection::vec((0u8..2, 0usize..64, 0usize..64), 1..7),
        prop::collection::vec(prop::bool::ANY, 1..7),
    )
        .prop_map(|(ops, colors)| {
            let colors: Vec<_> = colors.into_iter().map(|g| if g { G } else { B }).collect();
            from_ops(&ops, &colors)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_blinks_satisfy_the_identities(b in random_blink(), r in 3u32..6) {
        let t = AlgebraTables::new(r).unwrap();
        let k = blinkwrt::statesum::kappa_with(&b, &t).unwrap().kappa;
        let neg = blinkwrt::statesum::kappa_with(&b.negate(), &t).unwrap().kappa;
        prop_assert!(close(k, neg.conj(), 1e-9));
        let nd = blinkwrt::statesum::kappa_with(&b.dual().unwrap().negate(), &t).unwrap().kappa;
        prop_assert!(close(k, nd, 1e-9), "{} {} {}", b.to_text(), k, nd);
    }

    #[test]
    fn random_blinks_match_brute_force(b in random_blink()) {
        let t = AlgebraTables::new(3).unwrap();
        let (pruned, count) = kappa_prime(&b, &t).unwrap();
        let brute = Oracle { r: 3 }.brute_kappa_prime(&b);
        prop_assert!(close_rel(pruned, brute, 1e-10));
        prop_assert!(count >= 1);
    }
}
