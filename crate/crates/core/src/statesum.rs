//! The state sum `kappa'_r` over labelings of vertices, faces and zigzags,
//! and its normalization `kappa_r`.
//!
//! A state assigns a label of `I` to every vertex, face and zigzag, with the
//! infinite face fixed to 0. Its value is the product of
//!
//! * `Tet[f1 v1 z2; f2 v2 z1]` times a twist phase for every edge,
//! * `1 / theta(v, f, z)` for every corner,
//! * `Delta` of every vertex, face and zigzag label,
//!
//! and is zero unless every corner triple is admissible. The twist phase of a
//! black edge is `lambda^{f1 z2}_{v1} * conj(lambda^{v2 z2}_{f2})`, taken from
//! the closed formula even where one of those two triples is not admissible;
//! gray edges use the conjugate.
//!
//! `kappa_r = kappa'_r * eta^{|F|+1} * zeta^{-n(F)}` where `|F|` is the number
//! of link components, `n(F)` the signature of the linking matrix,
//! `eta = sin(pi/r) sqrt(2/r)` and `zeta = (-i)^{r-2} exp(3 i pi (r-2) / 4r)`.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::{AlgebraError, AlgebraTables};
use crate::blink::{Blink, EdgeColor, Site, SiteKind};
use crate::flink::{build_flink, FlinkError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StateSumError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Flink(#[from] FlinkError),
    #[error("state sum needs a connected blink with at least one edge")]
    NotConnectedWithEdges,
    #[error("state has {got} labels, the blink has {expected} sites")]
    StateShape { expected: usize, got: usize },
    #[error("label {label} is outside 0..={max}")]
    LabelOutOfRange { label: usize, max: usize },
}

/// Below this many subtrees the search runs without splitting.
const MIN_SUBTREES: usize = 256;

/// A labeling of every site of a connected blink.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct State {
    pub vertices: Vec<usize>,
    pub faces: Vec<usize>,
    pub zigzags: Vec<usize>,
}

impl State {
    pub fn get(&self, s: Site) -> usize {
        match s.kind {
            SiteKind::Vertex => self.vertices[s.index],
            SiteKind::Face => self.faces[s.index],
            SiteKind::Zigzag => self.zigzags[s.index],
        }
    }
}

/// Sites of a connected blink flattened into one index space: vertices,
/// then faces, then zigzags. Face 0 (global index `n_vertices`) is pinned.
#[derive(Clone, Debug)]
pub struct Model {
    pub n_vertices: usize,
    pub n_faces: usize,
    pub n_zigzags: usize,
    pub angles: Vec<[usize; 3]>,
    pub edges: Vec<([usize; 6], EdgeColor)>,
}

impl Model {
    pub fn new(b: &Blink) -> Result<Self, StateSumError> {
        if !b.is_connected() || b.n_edges() == 0 {
            return Err(StateSumError::NotConnectedWithEdges);
        }
        let cells = b.cells();
        let nv = b.n_vertices();
        let nf = cells.faces.len();
        let nz = cells.zigzags.len();
        let angles = cells
            .angles
            .iter()
            .map(|a| [a.vertex, nv + a.face, nv + nf + a.zigzag])
            .collect();
        let edges = cells
            .incidences
            .iter()
            .map(|i| {
                (
                    [nv + i.f1, i.v1, nv + i.f2, i.v2, nv + nf + i.z2, nv + nf + i.z1],
                    i.color,
                )
            })
            .collect();
        Ok(Model {
            n_vertices: nv,
            n_faces: nf,
            n_zigzags: nz,
            angles,
            edges,
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_vertices + self.n_faces + self.n_zigzags
    }

    pub fn pinned(&self) -> usize {
        self.n_vertices
    }

    pub fn flatten(&self, s: &State) -> Result<Vec<u8>, StateSumError> {
        if s.vertices.len() != self.n_vertices
            || s.faces.len() != self.n_faces
            || s.zigzags.len() != self.n_zigzags
        {
            return Err(StateSumError::StateShape {
                expected: self.n_sites(),
                got: s.vertices.len() + s.faces.len() + s.zigzags.len(),
            });
        }
        Ok(s.vertices
            .iter()
            .chain(&s.faces)
            .chain(&s.zigzags)
            .map(|&x| x as u8)
            .collect())
    }

    /// Value of a flattened state; zero when a corner is not admissible.
    pub fn value(&self, t: &AlgebraTables, labels: &[u8]) -> Complex64 {
        let l = |i: usize| labels[i] as usize;
        if !self.angles.iter().all(|a| t.is_admissible(l(a[0]), l(a[1]), l(a[2]))) {
            return Complex64::new(0.0, 0.0);
        }
        let mut acc = Complex64::new(1.0, 0.0);
        for &x in labels {
            acc *= t.delta(x as usize);
        }
        for a in &self.angles {
            acc /= t.theta(l(a[0]), l(a[1]), l(a[2]));
        }
        for (s, c) in &self.edges {
            acc *= edge_factor(t, [l(s[0]), l(s[1]), l(s[2]), l(s[3]), l(s[4]), l(s[5])], *c);
        }
        acc
    }
}

/// Edge factor for labels `[f1, v1, f2, v2, z2, z1]`.
pub fn edge_factor(t: &AlgebraTables, l: [usize; 6], color: EdgeColor) -> Complex64 {
    let [f1, v1, f2, v2, z2, z1] = l;
    let tet = t.tet(f1, v1, f2, v2, z2, z1);
    if tet == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let r2 = 2 * t.r() as i64;
    let h = |x: usize| {
        let x = x as i64;
        r2 * x + x * (x + 2)
    };
    let e = (h(f1) + h(f2) - h(v1) - h(v2)) / 2;
    let phase = match color {
        EdgeColor::Black => t.a_pow(e),
        EdgeColor::Gray => t.a_pow(-e),
    };
    phase * tet
}

/// Value of one state of a connected blink.
pub fn state_value(b: &Blink, t: &AlgebraTables, sigma: &State) -> Result<Complex64, StateSumError> {
    let m = Model::new(b)?;
    let flat = m.flatten(sigma)?;
    if let Some(&x) = flat.iter().find(|&&x| x as usize >= t.n_labels()) {
        return Err(StateSumError::LabelOutOfRange {
            label: x as usize,
            max: t.n_labels() - 1,
        });
    }
    Ok(m.value(t, &flat))
}

struct Step {
    site: usize,
    /// Two already-labeled sites sharing a corner with `site`.
    generator: Option<[usize; 2]>,
    /// Corners completed by this site: the two other sites.
    closing: Vec<[usize; 2]>,
    /// Edges whose six sites are all labeled after this step.
    edges: Vec<usize>,
}

/// Labeling order: each step takes the site completing the most corners,
/// then the one touching the most labeled corners, then the smallest id.
fn plan(m: &Model) -> Vec<Step> {
    let n = m.n_sites();
    let mut assigned = vec![false; n];
    assigned[m.pinned()] = true;
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (k, a) in m.angles.iter().enumerate() {
        for &s in a {
            incident[s].push(k);
        }
    }
    let mut edge_done = vec![false; m.edges.len()];
    let mut steps = Vec::with_capacity(n - 1);
    for _ in 1..n {
        let mut best: Option<(usize, usize, usize)> = None;
        for s in (0..n).filter(|&s| !assigned[s]) {
            let mut closes = 0;
            let mut touches = 0;
            for &k in &incident[s] {
                let others = m.angles[k].iter().filter(|&&o| o != s && assigned[o]).count();
                if others == 2 {
                    closes += 1;
                }
                if others >= 1 {
                    touches += 1;
                }
            }
            let better = match best {
                None => true,
                Some((bc, bt, _)) => (closes, touches) > (bc, bt),
            };
            if better {
                best = Some((closes, touches, s));
            }
        }
        let (_, _, s) = best.expect("an unassigned site remains");
        assigned[s] = true;
        let closing: Vec<[usize; 2]> = incident[s]
            .iter()
            .filter_map(|&k| {
                let a = m.angles[k];
                let o: Vec<usize> = a.iter().copied().filter(|&x| x != s).collect();
                (assigned[o[0]] && assigned[o[1]]).then(|| [o[0], o[1]])
            })
            .collect();
        let mut edges = Vec::new();
        for (k, (sites, _)) in m.edges.iter().enumerate() {
            if !edge_done[k] && sites.iter().all(|&x| assigned[x]) {
                edge_done[k] = true;
                edges.push(k);
            }
        }
        steps.push(Step {
            site: s,
            generator: closing.first().copied(),
            closing,
            edges,
        });
    }
    steps
}

struct Search<'a> {
    m: &'a Model,
    t: &'a AlgebraTables,
    steps: Vec<Step>,
    all_labels: Vec<u8>,
}

impl<'a> Search<'a> {
    fn candidates<'s>(&'s self, k: usize, labels: &[u8]) -> &'s [u8] {
        match self.steps[k].generator {
            Some([a, b]) => self.t.completions(labels[a] as usize, labels[b] as usize),
            None => &self.all_labels,
        }
    }

    /// Factor picked up by giving `x` to step `k`, or `None` if a corner
    /// becomes inadmissible.
    fn factor(&self, k: usize, labels: &[u8]) -> Option<Complex64> {
        let st = &self.steps[k];
        let x = labels[st.site] as usize;
        let mut f = Complex64::new(self.t.delta(x), 0.0);
        for &[a, b] in &st.closing {
            let (a, b) = (labels[a] as usize, labels[b] as usize);
            if !self.t.is_admissible(x, a, b) {
                return None;
            }
            f /= self.t.theta(x, a, b);
        }
        for &e in &st.edges {
            let (s, c) = &self.m.edges[e];
            let l = |i: usize| labels[s[i]] as usize;
            f *= edge_factor(self.t, [l(0), l(1), l(2), l(3), l(4), l(5)], *c);
        }
        Some(f)
    }

    fn dfs(&self, k: usize, labels: &mut [u8], acc: Complex64) -> (Complex64, u64) {
        if k == self.steps.len() {
            return (acc, 1);
        }
        let site = self.steps[k].site;
        let mut sum = Complex64::new(0.0, 0.0);
        let mut count = 0;
        for &x in self.candidates(k, labels) {
            labels[site] = x;
            if let Some(f) = self.factor(k, labels) {
                let (s, c) = self.dfs(k + 1, labels, acc * f);
                sum += s;
                count += c;
            }
        }
        labels[site] = 0;
        (sum, count)
    }

    /// Admissible partial labelings of the first `depth` steps, in DFS order.
    fn prefixes(&self, depth: usize) -> Vec<(Vec<u8>, Complex64)> {
        let mut out = Vec::new();
        let mut labels = vec![0u8; self.m.n_sites()];
        self.collect(0, depth, &mut labels, Complex64::new(1.0, 0.0), &mut out);
        out
    }

    fn collect(&self, k: usize, depth: usize, labels: &mut [u8], acc: Complex64, out: &mut Vec<(Vec<u8>, Complex64)>) {
        if k == depth {
            out.push((labels.to_vec(), acc));
            return;
        }
        let site = self.steps[k].site;
        for &x in self.candidates(k, labels).to_vec().iter() {
            labels[site] = x;
            if let Some(f) = self.factor(k, labels) {
                self.collect(k + 1, depth, labels, acc * f, out);
            }
        }
        labels[site] = 0;
    }
}

/// `kappa'_r` of a connected blink with at least one edge, and the number of
/// admissible states.
///
/// Subtrees are summed in parallel on the current rayon pool and combined in
/// DFS order, so the result does not depend on the number of workers.
pub fn kappa_prime(b: &Blink, t: &AlgebraTables) -> Result<(Complex64, u64), StateSumError> {
    let m = Model::new(b)?;
    let search = Search {
        m: &m,
        t,
        steps: plan(&m),
        all_labels: (0..t.n_labels() as u8).collect(),
    };
    // Split depth depends only on the blink and the level.
    let mut depth = 0;
    let mut frontier = search.prefixes(0);
    while depth < search.steps.len() && frontier.len() < MIN_SUBTREES {
        depth += 1;
        frontier = search.prefixes(depth);
    }
    let parts: Vec<(Complex64, u64)> = frontier
        .into_par_iter()
        .map(|(mut labels, acc)| search.dfs(depth, &mut labels, acc))
        .collect();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut count = 0;
    for (s, c) in parts {
        sum += s;
        count += c;
    }
    Ok((sum, count))
}

/// Contribution of an edgeless vertex: `sum_n Delta_n^2`.
pub fn edgeless_factor(t: &AlgebraTables) -> f64 {
    t.deltas().iter().map(|d| d * d).sum()
}

/// `kappa'_r` of any blink: the product over its components.
pub fn kappa_prime_total(b: &Blink, t: &AlgebraTables) -> Result<(Complex64, u64), StateSumError> {
    let mut value = Complex64::new(1.0, 0.0);
    let mut count = 1u64;
    for c in b.components() {
        let (v, n) = if c.n_edges() == 0 {
            (Complex64::new(edgeless_factor(t), 0.0), t.n_labels() as u64)
        } else {
            kappa_prime(&c, t)?
        };
        value *= v;
        count = count.saturating_mul(n);
    }
    Ok((value, count))
}

/// `zeta^{-n}` folded to a single angle: `zeta = exp(i pi (r-2)(3-2r) / 4r)`.
pub fn signature_phase(r: u32, n: i64) -> Complex64 {
    let r = r as i64;
    let m = 8 * r;
    let num = (-n * (r - 2) * (3 - 2 * r)).rem_euclid(m);
    Complex64::from_polar(1.0, PI * num as f64 / (4 * r) as f64)
}

#[derive(Clone, Debug)]
pub struct StateSumResult {
    pub r: u32,
    pub kappa_prime: Complex64,
    pub kappa: Complex64,
    pub admissible_states: u64,
    /// `(r-1)^(|V| + |F| - 1 + |Z|)` summed over components, as a decimal string.
    pub total_state_space: String,
    pub components_f: usize,
    pub signature_nf: i64,
    pub elapsed: Duration,
}

impl StateSumResult {
    pub fn polar(&self) -> (f64, f64) {
        polar_form(self.kappa)
    }

    pub fn to_json(&self, blink_id: &str) -> serde_json::Value {
        let (modulus, angle) = self.polar();
        serde_json::json!({
            "blink_id": blink_id,
            "r": self.r,
            "kappa": {"re": self.kappa.re, "im": self.kappa.im},
            "polar": {"mod": modulus, "angle_over_pi": angle},
            "kappa_prime": {"re": self.kappa_prime.re, "im": self.kappa_prime.im},
            "admissible_states": self.admissible_states,
            "components_F": self.components_f,
            "signature_nF": self.signature_nf,
            "elapsed_ms": self.elapsed.as_secs_f64() * 1e3,
        })
    }
}

/// `kappa_r` of any blink at level `r`.
pub fn kappa(b: &Blink, r: u32) -> Result<StateSumResult, StateSumError> {
    let t = AlgebraTables::new(r)?;
    kappa_with(b, &t)
}

pub fn kappa_with(b: &Blink, t: &AlgebraTables) -> Result<StateSumResult, StateSumError> {
    let start = Instant::now();
    let (kp, count) = kappa_prime_total(b, t)?;
    let flink = build_flink(b);
    let nf = flink.n_components();
    let sig = flink.signature();
    let eta = t.level().eta();
    let value = kp * eta.powi(nf as i32 + 1) * signature_phase(t.r(), sig);

    let n = BigUint::from(t.n_labels());
    let mut space = BigUint::from(0u32);
    for c in b.components() {
        let free = if c.n_edges() == 0 {
            1
        } else {
            c.n_vertices() + c.faces().len() - 1 + c.zigzags().len()
        };
        space += n.pow(free as u32);
    }
    Ok(StateSumResult {
        r: t.r(),
        kappa_prime: kp,
        kappa: value,
        admissible_states: count,
        total_state_space: space.to_string(),
        components_f: nf,
        signature_nf: sig,
        elapsed: start.elapsed(),
    })
}

/// `(|z|, arg(z)/pi)` with the angle in `(-1, 1]` and `0 -> (0, 0)`.
pub fn polar_form(z: Complex64) -> (f64, f64) {
    let m = z.norm();
    if m == 0.0 {
        return (0.0, 0.0);
    }
    let mut a = z.im.atan2(z.re) / PI;
    if a <= -1.0 {
        a = 1.0;
    }
    (m, a)
}
