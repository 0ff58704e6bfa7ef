#![allow(dead_code)]

use std::collections::BTreeMap;
use std::f64::consts::PI;

use blinkwrt::blink::{catalog, Blink, Dart, EdgeColor};
use num_complex::Complex64;

pub use EdgeColor::{Black as B, Gray as G};

/// Twenty fixed blinks with at most eight edges.
pub fn corpus() -> Vec<(&'static str, Blink)> {
    vec![
        ("vertex", catalog::isolated_vertex()),
        ("edge_b", catalog::single_edge(B)),
        ("edge_g", catalog::single_edge(G)),
        ("loop_b", catalog::single_loop(B)),
        ("loop_g", catalog::single_loop(G)),
        ("digon_bg", catalog::digon(B, G)),
        ("digon_bb", catalog::digon(B, B)),
        ("path3_b", catalog::path(3, B)),
        ("triangle_bbb", catalog::cycle(&[B, B, B])),
        ("triangle_bgb", catalog::cycle(&[B, G, B])),
        ("square_bgbb", catalog::cycle(&[B, G, B, B])),
        ("bond3_bbb", catalog::bond(&[B, B, B])),
        ("bond4_bgbg", catalog::bond(&[B, G, B, G])),
        ("k4_mixed", catalog::k4(&[B, G, B, G, B, B])),
        ("k4_black", catalog::k4(&[B; 6])),
        ("theta_tail", from_ops(&[(1, 0, 0), (1, 0, 1), (0, 1, 0), (0, 2, 1)], &[B, G, B, B])),
        ("seven", from_ops(&[(1, 0, 0), (0, 0, 1), (1, 1, 2), (0, 2, 0), (1, 3, 4), (0, 1, 3), (1, 2, 5)], &[B, G, B, G, G, B, B])),
        ("eight", from_ops(&[(1, 0, 0), (1, 1, 0), (0, 0, 2), (1, 2, 3), (0, 3, 1), (1, 4, 0), (0, 5, 2), (1, 1, 1)], &[G, B, B, G, B, B, G, B])),
        ("edge_and_loop", catalog::single_edge(B).disjoint_union(&catalog::single_loop(G))),
        ("edge_and_vertex", catalog::single_edge(G).disjoint_union(&catalog::isolated_vertex())),
    ]
}

/// All corners of a rotation system as `(vertex, insertion index)`.
fn corners(rot: &[Vec<Dart>]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for (v, r) in rot.iter().enumerate() {
        for i in 0..r.len().max(1) {
            out.push((v, i));
        }
    }
    out
}

fn is_plane(rot: &[Vec<Dart>], n_edges: usize) -> bool {
    Blink::new(rot.to_vec(), vec![B; n_edges], None).is_ok()
}

/// Adds a new vertex joined to the corner `(v, i)`.
fn add_pendant(rot: &mut Vec<Vec<Dart>>, n_edges: &mut usize, (v, i): (usize, usize)) {
    let e = *n_edges;
    *n_edges += 1;
    let i = i.min(rot[v].len());
    rot[v].insert(i, Dart::new(e, 0));
    rot.push(vec![Dart::new(e, 1)]);
}

/// Adds an edge between two corners; `None` when they lie on different faces.
fn add_chord(
    rot: &[Vec<Dart>],
    n_edges: usize,
    (v1, i1): (usize, usize),
    (v2, i2): (usize, usize),
) -> Option<Vec<Vec<Dart>>> {
    let mut r = rot.to_vec();
    let i1 = i1.min(r[v1].len());
    r[v1].insert(i1, Dart::new(n_edges, 0));
    let i2 = i2.min(r[v2].len());
    r[v2].insert(i2, Dart::new(n_edges, 1));
    is_plane(&r, n_edges + 1).then_some(r)
}

/// A connected plane map built from one vertex by a list of operations
/// `(kind, a, b)`: kind 0 attaches a pendant edge at corner `a`, kind 1 adds
/// an edge between corners `a` and `b` (or a pendant edge when that would
/// not be plane). Corner indices wrap around.
pub fn from_ops(ops: &[(u8, usize, usize)], colors: &[EdgeColor]) -> Blink {
    let mut rot: Vec<Vec<Dart>> = vec![Vec::new()];
    let mut n = 0;
    for &(kind, a, b) in ops {
        let cs = corners(&rot);
        let ca = cs[a % cs.len()];
        if kind == 1 {
            let cb = cs[b % cs.len()];
            let cb = (cb.0, cb.1 + usize::from(cb.0 == ca.0 && cb.1 >= ca.1));
            if let Some(r) = add_chord(&rot, n, ca, cb) {
                rot = r;
                n += 1;
                continue;
            }
        }
        add_pendant(&mut rot, &mut n, ca);
    }
    let colors = (0..n).map(|e| colors[e % colors.len()]).collect();
    Blink::new(rot, colors, None).expect("operations keep the map plane")
}

/// Every connected plane map with `1..=max_edges` edges, up to
/// orientation-preserving isomorphism, all edges black.
pub fn plane_maps(max_edges: usize) -> Vec<Vec<Blink>> {
    let mut levels: Vec<Vec<Blink>> = vec![vec![catalog::isolated_vertex()]];
    for _ in 1..=max_edges {
        let mut seen = BTreeMap::new();
        for m in levels.last().unwrap() {
            let rot = m.rotations().to_vec();
            let n = m.n_edges();
            let cs = corners(&rot);
            let mut push = |r: Vec<Vec<Dart>>| {
                let b = Blink::new(r, vec![B; n + 1], None).unwrap();
                seen.entry(b.canonical_text()).or_insert_with(|| b.canonical());
            };
            for &c in &cs {
                let mut r = rot.clone();
                let mut k = n;
                add_pendant(&mut r, &mut k, c);
                push(r);
            }
            for &(v1, i1) in &cs {
                let mut first = rot.clone();
                let i1 = i1.min(first[v1].len());
                first[v1].insert(i1, Dart::new(n, 0));
                for (v2, r2) in first.iter().enumerate() {
                    for i2 in 0..=r2.len() {
                        let mut r = first.clone();
                        r[v2].insert(i2, Dart::new(n, 1));
                        if is_plane(&r, n + 1) {
                            push(r);
                        }
                    }
                }
            }
        }
        levels.push(seen.into_values().collect());
    }
    levels
}

/// All colourings of a map, up to isomorphism.
pub fn colorings(m: &Blink) -> Vec<Blink> {
    let n = m.n_edges();
    let mut seen = BTreeMap::new();
    for mask in 0u32..(1 << n) {
        let colors = (0..n).map(|e| if mask >> e & 1 == 1 { G } else { B }).collect();
        let b = Blink::new(m.rotations().to_vec(), colors, None).unwrap();
        seen.entry(b.canonical_text()).or_insert(b);
    }
    seen.into_values().collect()
}

/// Closed-form ingredients at level `r`, written out independently of the
/// library tables.
pub struct Oracle {
    pub r: u32,
}

impl Oracle {
    pub fn qint(&self, n: i64) -> f64 {
        let r = self.r as f64;
        (n as f64 * PI / r).sin() / (PI / r).sin()
    }

    pub fn fact(&self, n: i64) -> f64 {
        (1..=n).map(|k| self.qint(k)).product()
    }

    pub fn delta(&self, n: usize) -> f64 {
        if n % 2 == 0 {
            self.qint(n as i64 + 1)
        } else {
            -self.qint(n as i64 + 1)
        }
    }

    pub fn admissible(&self, a: usize, b: usize, c: usize) -> bool {
        let (a, b, c) = (a as i64, b as i64, c as i64);
        let (x, y, z) = (a + b - c, b + c - a, c + a - b);
        x >= 0 && y >= 0 && z >= 0 && x % 2 == 0 && y % 2 == 0 && z % 2 == 0 && a + b + c <= 2 * self.r as i64 - 4
    }

    pub fn theta(&self, a: usize, b: usize, c: usize) -> f64 {
        if !self.admissible(a, b, c) {
            return 0.0;
        }
        let (a, b, c) = (a as i64, b as i64, c as i64);
        let m = (a + b - c) / 2;
        let n = (b + c - a) / 2;
        let p = (c + a - b) / 2;
        let sign = if (m + n + p) % 2 == 0 { 1.0 } else { -1.0 };
        sign * self.fact(m + n + p + 1) * self.fact(m) * self.fact(n) * self.fact(p)
            / (self.fact(m + n) * self.fact(n + p) * self.fact(p + m))
    }

    /// `Tet[al be ep; ga de ph]`.
    pub fn tet(&self, al: usize, be: usize, ga: usize, de: usize, ep: usize, ph: usize) -> f64 {
        if !(self.admissible(al, be, ph)
            && self.admissible(al, de, ep)
            && self.admissible(ga, de, ph)
            && self.admissible(be, ga, ep))
        {
            return 0.0;
        }
        let [al, be, ga, de, ep, ph] = [al, be, ga, de, ep, ph].map(|x| x as i64);
        let a = [(al + de + ep) / 2, (be + ga + ep) / 2, (al + be + ph) / 2, (ga + de + ph) / 2];
        let b = [(be + de + ep + ph) / 2, (al + ga + ep + ph) / 2, (al + be + ga + de) / 2];
        let int: f64 = a.iter().flat_map(|&x| b.iter().map(move |&y| (x, y))).map(|(x, y)| self.fact(y - x)).product();
        let ext: f64 = [al, be, ga, de, ep, ph].iter().map(|&x| self.fact(x)).product();
        let lo = *a.iter().max().unwrap();
        let hi = *b.iter().min().unwrap();
        let mut sum = 0.0;
        for s in lo..=hi {
            let den: f64 = a.iter().map(|&x| self.fact(s - x)).product::<f64>()
                * b.iter().map(|&y| self.fact(y - s)).product::<f64>();
            let sign = if s % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * self.fact(s + 1) / den;
        }
        int / ext * sum
    }

    pub fn a_pow(&self, k: i64) -> Complex64 {
        Complex64::from_polar(1.0, PI * k as f64 / (2 * self.r) as f64)
    }

    /// `lambda^{f1 z2}_{v1} * conj(lambda^{v2 z2}_{f2})` as one monomial:
    /// `(-1)^{(f1+f2-v1-v2)/2} A^{(f1(f1+2) + f2(f2+2) - v1(v1+2) - v2(v2+2))/2}`.
    pub fn edge_phase(&self, f1: usize, f2: usize, v1: usize, v2: usize) -> Complex64 {
        let [f1, f2, v1, v2] = [f1, f2, v1, v2].map(|x| x as i64);
        let cas = |x: i64| x * (x + 2);
        let sign = if ((f1 + f2 - v1 - v2) / 2) % 2 == 0 { 1.0 } else { -1.0 };
        self.a_pow((cas(f1) + cas(f2) - cas(v1) - cas(v2)) / 2) * sign
    }

    /// Sum of every state of a connected blink, with no pruning: all
    /// `(r-1)^(sites-1)` labellings, infinite face pinned to 0.
    pub fn brute_kappa_prime(&self, b: &Blink) -> Complex64 {
        let cells = b.cells();
        let nv = b.n_vertices();
        let nf = cells.faces.len();
        let nz = cells.zigzags.len();
        let n_sites = nv + nf + nz;
        let pinned = nv + cells.outer_faces[0].expect("blink has edges");
        let labels_n = (self.r - 1) as usize;
        let free: Vec<usize> = (0..n_sites).filter(|&s| s != pinned).collect();
        let mut l = vec![0usize; n_sites];
        let mut total = Complex64::new(0.0, 0.0);
        let states = labels_n.pow(free.len() as u32);
        for code in 0..states {
            let mut c = code;
            for &s in &free {
                l[s] = c % labels_n;
                c /= labels_n;
            }
            let mut value = Complex64::new(1.0, 0.0);
            for x in &l {
                value *= self.delta(*x);
            }
            for a in &cells.angles {
                let t = self.theta(l[a.vertex], l[nv + a.face], l[nv + nf + a.zigzag]);
                if t == 0.0 {
                    value = Complex64::new(0.0, 0.0);
                    break;
                }
                value /= t;
            }
            if value == Complex64::new(0.0, 0.0) {
                continue;
            }
            for i in &cells.incidences {
                let (v1, f1, z1) = (l[i.v1], l[nv + i.f1], l[nv + nf + i.z1]);
                let (v2, f2, z2) = (l[i.v2], l[nv + i.f2], l[nv + nf + i.z2]);
                let tet = self.tet(f1, v1, f2, v2, z2, z1);
                let x = self.edge_phase(f1, f2, v1, v2);
                value *= match i.color {
                    EdgeColor::Black => x * tet,
                    EdgeColor::Gray => x.conj() * tet,
                };
            }
            total += value;
        }
        total
    }
}

pub fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol
}

pub fn close_rel(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * a.norm().max(b.norm()).max(1.0)
}
