mod common;

use std::collections::HashSet;

use blinkwrt::blink::catalog;
use blinkwrt::flink::{build_flink, build_flink_oriented, signature};
use blinkwrt::gem::{blink_to_gem, gem_to_codes, parse_gem};
use blinkwrt::homology::{h1_from_linking, homology, mat_mul, smith_normal_form, to_big};
use common::*;
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

#[test]
fn corpus_gems_are_valid_and_see_the_same_homology() {
    for (name, b) in corpus() {
        let g = blink_to_gem(&b).unwrap();
        let c = g.counts();
        assert!(g.is_connected(), "{name}");
        assert!(g.is_bipartite(), "{name}");
        assert_eq!(c.v + c.t, c.b, "{name}");
        assert_eq!(g.homology(), homology(&b), "{name}");
        for v in 0..g.n_vertices() {
            let mut seen = [false; 4];
            for col in 0..4u8 {
                let w = g.neighbor(v, col);
                assert_ne!(w, v);
                assert_eq!(g.neighbor(w, col), v);
                seen[col as usize] = true;
            }
            assert!(seen.iter().all(|&x| x));
        }
        assert_eq!(parse_gem(&g.to_text()).unwrap(), g);
    }
}

#[test]
fn larger_gems() {
    for c in [B, G] {
        let b = catalog::cube(c);
        let g = blink_to_gem(&b).unwrap();
        assert!(g.is_valid());
        assert_eq!(g.homology(), homology(&b));
        assert_eq!(g.homology().to_string(), "Z/3");
    }
}

#[test]
fn codes_are_well_formed() {
    for (name, b) in corpus().into_iter().take(8) {
        let g = blink_to_gem(&b).unwrap();
        let codes = gem_to_codes(&g);
        let c = g.counts();
        assert_eq!(codes.tetrahedra.len(), 24 * c.v, "{name}");
        assert_eq!(codes.points.len(), 3 * c.v + c.b + c.t, "{name}");
        let distinct: HashSet<_> = codes.points.iter().collect();
        assert_eq!(distinct.len(), codes.points.len());
        for tet in &codes.tetrahedra {
            let p: Vec<_> = tet.iter().map(|&i| &codes.points[i]).collect();
            assert!(p[0].colors.is_empty());
            for w in p.windows(2) {
                assert_eq!(w[1].colors.len(), w[0].colors.len() + 1);
                assert!(w[0].colors.iter().all(|x| w[1].colors.contains(x)));
                assert!(w[1].k <= w[0].k);
            }
        }
        for (i, coord) in codes.coordinates.iter().enumerate() {
            let x = i as u128 + 1;
            assert_eq!(coord[0], x);
            assert_eq!(coord[6], x.pow(7));
        }
    }
}

#[test]
fn homology_oracles() {
    assert_eq!(h1_from_linking(&[vec![0]]).to_string(), "Z");
    assert!(h1_from_linking(&[vec![1]]).is_trivial());
    assert!(h1_from_linking(&[vec![-1]]).is_trivial());
    for n in 2..30 {
        assert_eq!(h1_from_linking(&[vec![n]]).to_string(), format!("Z/{n}"));
    }
    assert_eq!(homology(&catalog::isolated_vertex()).to_string(), "Z");
    assert!(homology(&catalog::single_edge(B)).is_trivial());
}

#[test]
fn smith_form_reconstructs() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    for _ in 0..100 {
        let m: Vec<Vec<i64>> = (0..5).map(|_| (0..5).map(|_| rng.gen_range(-9..=9)).collect()).collect();
        let big = to_big(&m);
        let s = smith_normal_form(&big);
        assert_eq!(mat_mul(&mat_mul(&s.u, &big), &s.v), s.d);
        let d = s.diagonal();
        for i in 0..5 {
            for j in 0..5 {
                if i != j {
                    assert!(s.d[i][j].is_zero());
                }
            }
        }
        for w in d.windows(2) {
            assert!(w[1].is_zero() || (!w[0].is_zero() && (&w[1] % &w[0]).is_zero()));
        }
        assert!(d.iter().all(|x| !x.is_negative()));
        for u in [&s.u, &s.v] {
            let du = smith_normal_form(u).diagonal();
            assert!(du.iter().all(|x| x.is_one()));
        }
    }
}

/// Integer determinant by fraction-free elimination.
fn det(m: &[Vec<i64>]) -> BigInt {
    let n = m.len();
    let mut a: Vec<Vec<BigInt>> = to_big(m);
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[k][k].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !a[i][k].is_zero()) else { return BigInt::zero() };
            a.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

#[test]
fn order_is_the_determinant() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(11);
    for _ in 0..200 {
        let n = rng.gen_range(1..=4);
        let mut m = vec![vec![0i64; n]; n];
        for i in 0..n {
            for j in i..n {
                let x = rng.gen_range(-5..=5);
                m[i][j] = x;
                m[j][i] = x;
            }
        }
        let d = det(&m);
        let g = h1_from_linking(&m);
        match g.order() {
            Some(o) => assert_eq!(o, d.abs()),
            None => assert!(d.is_zero()),
        }
    }
}

#[test]
fn orientation_choices_keep_signature_and_homology() {
    for (name, b) in corpus() {
        let base = build_flink(&b);
        let n = base.n_components();
        if n > 4 {
            continue;
        }
        let h = h1_from_linking(&base.linking_matrix);
        for mask in 0..(1u32 << n) {
            let rev: Vec<bool> = (0..n).map(|i| mask >> i & 1 == 1).collect();
            let f = build_flink_oriented(&b, &rev).unwrap();
            assert_eq!(f.signature(), base.signature(), "{name} {rev:?}");
            assert_eq!(signature(&f.linking_matrix), base.signature());
            assert_eq!(h1_from_linking(&f.linking_matrix), h, "{name}");
            for i in 0..n {
                assert_eq!(f.linking_matrix[i][i], base.linking_matrix[i][i]);
                for j in 0..n {
                    let s = if rev[i] != rev[j] { -1 } else { 1 };
                    assert_eq!(f.linking_matrix[i][j], s * base.linking_matrix[i][j]);
                }
            }
        }
    }
}

#[test]
fn map_structure() {
    for (name, b) in corpus() {
        assert_eq!(b.angles().len(), 2 * b.n_edges(), "{name}");
        let traversals: usize = b.zigzags().iter().map(Vec::len).sum();
        assert_eq!(traversals, 2 * b.n_edges());
        assert_eq!(b.negate().negate(), b);
        if b.is_connected() {
            let dd = b.dual().unwrap().dual().unwrap();
            assert_eq!(dd.canonical_text(), b.canonical_text(), "{name}");
            if b.n_edges() > 0 {
                assert_eq!(b.dual().unwrap().n_vertices(), b.faces().len(), "{name}");
            }
        }
        // every edge's sextuple reproduces the four angles at its ends
        let angles: HashSet<(usize, usize, usize)> =
            b.angles().iter().map(|a| (a.vertex, a.face, a.zigzag)).collect();
        for i in b.edge_incidences() {
            for t in [(i.v1, i.f1, i.z1), (i.v1, i.f2, i.z2), (i.v2, i.f1, i.z2), (i.v2, i.f2, i.z1)] {
                assert!(angles.contains(&t), "{name}: {t:?}");
            }
        }
    }
}

fn random_blink() -> impl Strategy<Value = blinkwrt::Blink> {
    (
        prop::collection::vec((0u8..2, 0usize..64, 0usize..64), 1..9),
        prop::collection::vec(prop::bool::ANY, 1..9),
    )
        .prop_map(|(ops, colors)| {
            let colors: Vec<_> = colors.into_iter().map(|g| if g { G } else { B }).collect();
            from_ops(&ops, &colors)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gems_of_random_blinks(b in random_blink()) {
        let g = blink_to_gem(&b).unwrap();
        prop_assert!(g.is_valid());
        prop_assert!(g.is_bipartite());
        prop_assert_eq!(g.homology(), homology(&b));
    }

    #[test]
    fn homology_ignores_duality_and_negation(b in random_blink()) {
        let h = homology(&b);
        prop_assert_eq!(homology(&b.negate()), h.clone());
        prop_assert_eq!(homology(&b.dual().unwrap().negate()), h);
    }

    #[test]
    fn snf_of_random_matrices(m in prop::collection::vec(prop::collection::vec(-20i64..20, 4), 1..6)) {
        let big = to_big(&m);
        let s = smith_normal_form(&big);
        prop_assert_eq!(mat_mul(&mat_mul(&s.u, &big), &s.v), s.d);
    }
}
