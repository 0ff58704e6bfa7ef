//! 3-gems: 4-regular graphs with a proper 4-edge-colouring, the blink to gem
//! construction and the triangulation codes of a gem.
//!
//! The gem of a blink is the flag graph of a polyhedral decomposition of the
//! surgery manifold. The link of the blink is drawn on the boundary `Σ` of a
//! regular neighbourhood `N` of its diagram. `N` is cut along one disc per
//! crossing (separating the over strand from the under strand) into solid
//! tori, one around each component; surgery replaces each of them by a solid
//! torus whose meridian is the blackboard push-off of the component, drawn on
//! `Σ` and cut open along a meridian disc. The outside of `N` is cut along the
//! regions of the diagram into an upper and a lower ball. Every piece is
//! built crossing by crossing and tube by tube, so the gem is a local
//! substitution along the link.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use serde::Serialize;
use thiserror::Error;

use crate::blink::{Blink, Dart, EdgeColor, Strand};
use crate::homology::{smith_normal_form, AbelianGroup};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GemError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("vertex {0} declared twice")]
    DuplicateVertex(u64),
    #[error("edge refers to undeclared vertex {0}")]
    UnknownVertex(u64),
    #[error("vertex {vertex} has {count} edges of color {color}")]
    Improper { vertex: u64, color: u8, count: usize },
    #[error("a gem needs at least one vertex")]
    Empty,
    #[error("gem construction produced an invalid graph: {0}")]
    Construction(String),
}

/// A 4-regular graph with a proper edge colouring by `0..4`, stored as
/// `adj[v][c]` = the neighbour of `v` along its edge of colour `c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gem {
    adj: Vec<[usize; 4]>,
}

/// Vertices, 2-residues and 3-residues of a gem.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ResidueCounts {
    pub v: usize,
    pub b: usize,
    pub t: usize,
}

impl ResidueCounts {
    pub fn gem_condition(&self) -> bool {
        self.v + self.t == self.b
    }
}

const PAIRS: [[u8; 2]; 6] = [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]];
const TRIPLES: [[u8; 3]; 4] = [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]];

impl Gem {
    /// Checks that `adj` describes a proper colouring: every colour class is a
    /// fixed-point-free involution.
    pub fn from_adjacency(adj: Vec<[usize; 4]>) -> Result<Self, GemError> {
        if adj.is_empty() {
            return Err(GemError::Empty);
        }
        for (v, row) in adj.iter().enumerate() {
            for (c, &w) in row.iter().enumerate() {
                if w >= adj.len() || w == v || adj[w][c] != v {
                    return Err(GemError::Improper { vertex: v as u64, color: c as u8, count: 0 });
                }
            }
        }
        Ok(Gem { adj })
    }

    pub fn n_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbor(&self, v: usize, color: u8) -> usize {
        self.adj[v][color as usize]
    }

    pub fn adjacency(&self) -> &[[usize; 4]] {
        &self.adj
    }

    /// Edges as `(u, w, color)` with `u < w`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize, u8)> {
        let mut out = Vec::with_capacity(2 * self.adj.len());
        for (u, row) in self.adj.iter().enumerate() {
            for (c, &w) in row.iter().enumerate() {
                if u < w {
                    out.push((u, w, c as u8));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Component label of every vertex in the subgraph of the given colours,
    /// labels numbered by smallest vertex.
    pub fn residue_labels(&self, colors: &[u8]) -> (Vec<usize>, usize) {
        let n = self.adj.len();
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = count;
            stack.push(s);
            while let Some(u) = stack.pop() {
                for &c in colors {
                    let w = self.adj[u][c as usize];
                    if label[w] == usize::MAX {
                        label[w] = count;
                        stack.push(w);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    pub fn counts(&self) -> ResidueCounts {
        ResidueCounts {
            v: self.adj.len(),
            b: PAIRS.iter().map(|p| self.residue_labels(p).1).sum(),
            t: TRIPLES.iter().map(|t| self.residue_labels(t).1).sum(),
        }
    }

    pub fn is_connected(&self) -> bool {
        self.residue_labels(&[0, 1, 2, 3]).1 == 1
    }

    pub fn is_bipartite(&self) -> bool {
        self.bipartition().is_some()
    }

    fn bipartition(&self) -> Option<Vec<u8>> {
        let mut side = vec![u8::MAX; self.adj.len()];
        for s in 0..self.adj.len() {
            if side[s] != u8::MAX {
                continue;
            }
            side[s] = 0;
            let mut stack = vec![s];
            while let Some(u) = stack.pop() {
                for &w in &self.adj[u] {
                    if side[w] == u8::MAX {
                        side[w] = 1 - side[u];
                        stack.push(w);
                    } else if side[w] == side[u] {
                        return None;
                    }
                }
            }
        }
        Some(side)
    }

    /// Connected and satisfying `v + t = b`, i.e. a closed 3-manifold.
    pub fn is_valid(&self) -> bool {
        self.is_connected() && self.counts().gem_condition()
    }

    /// First homology of the induced 3-manifold. Generators are the edges
    /// outside a spanning tree, relations the bicoloured cycles.
    pub fn homology(&self) -> AbelianGroup {
        let n = self.adj.len();
        let side = self.bipartition().unwrap_or_else(|| vec![0; n]);
        // Edge (u, c) is oriented from side 0 to side 1.
        let edge_of = |u: usize, c: usize| -> (usize, i64) {
            if side[u] == 0 {
                (4 * u + c, 1)
            } else {
                (4 * self.adj[u][c] + c, -1)
            }
        };
        let mut in_tree = vec![false; 4 * n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(u) = queue.pop_front() {
            for c in 0..4 {
                let w = self.adj[u][c];
                if !seen[w] {
                    seen[w] = true;
                    in_tree[edge_of(u, c).0] = true;
                    queue.push_back(w);
                }
            }
        }
        let mut gen_of = vec![usize::MAX; 4 * n];
        let mut n_gens = 0;
        for u in 0..n {
            if side[u] == 0 {
                for c in 0..4 {
                    if !in_tree[4 * u + c] {
                        gen_of[4 * u + c] = n_gens;
                        n_gens += 1;
                    }
                }
            }
        }
        let mut relations: Vec<HashMap<usize, i128>> = Vec::new();
        for [i, j] in PAIRS {
            let (label, count) = self.residue_labels(&[i, j]);
            let mut done = vec![false; count];
            for s in 0..n {
                if done[label[s]] {
                    continue;
                }
                done[label[s]] = true;
                let mut rel: HashMap<usize, i128> = HashMap::new();
                let (mut u, mut c) = (s, i as usize);
                loop {
                    let (e, sign) = edge_of(u, c);
                    if gen_of[e] != usize::MAX {
                        *rel.entry(gen_of[e]).or_default() += sign as i128;
                    }
                    u = self.adj[u][c];
                    c = if c == i as usize { j as usize } else { i as usize };
                    if u == s && c == i as usize {
                        break;
                    }
                }
                rel.retain(|_, v| *v != 0);
                if !rel.is_empty() {
                    relations.push(rel);
                }
            }
        }
        reduce_presentation(n_gens, relations)
    }

    /// Connected sum: removes vertex 0 of each gem and joins the dangling
    /// edges colour by colour.
    pub fn connected_sum(&self, other: &Gem) -> Gem {
        let n1 = self.adj.len();
        let n2 = other.adj.len();
        let map1 = |v: usize| v - 1;
        let map2 = |v: usize| n1 - 1 + v - 1;
        let mut adj = Vec::with_capacity(n1 + n2 - 2);
        for v in 1..n1 {
            let mut row = [0; 4];
            for c in 0..4 {
                let w = self.adj[v][c];
                row[c] = if w == 0 { map2(other.adj[0][c]) } else { map1(w) };
            }
            adj.push(row);
        }
        for v in 1..n2 {
            let mut row = [0; 4];
            for c in 0..4 {
                let w = other.adj[v][c];
                row[c] = if w == 0 { map1(self.adj[0][c]) } else { map2(w) };
            }
            adj.push(row);
        }
        Gem { adj }
    }

    /// Renumbers vertices in breadth-first order from vertex 0, scanning
    /// colours in increasing order.
    fn relabeled(&self) -> Gem {
        let n = self.adj.len();
        let mut new_id = vec![usize::MAX; n];
        let mut order = Vec::with_capacity(n);
        for s in 0..n {
            if new_id[s] != usize::MAX {
                continue;
            }
            new_id[s] = order.len();
            order.push(s);
            let mut head = order.len() - 1;
            while head < order.len() {
                let u = order[head];
                head += 1;
                for c in 0..4 {
                    let w = self.adj[u][c];
                    if new_id[w] == usize::MAX {
                        new_id[w] = order.len();
                        order.push(w);
                    }
                }
            }
        }
        let adj = order
            .iter()
            .map(|&u| {
                let mut row = [0; 4];
                for c in 0..4 {
                    row[c] = new_id[self.adj[u][c]];
                }
                row
            })
            .collect();
        Gem { adj }
    }

    /// Text form: `v <id>` lines followed by `e <id1> <id2> <color>` lines.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for v in 0..self.adj.len() {
            s.push_str(&format!("v {v}\n"));
        }
        for (u, w, c) in self.edges() {
            s.push_str(&format!("e {u} {w} {c}\n"));
        }
        s
    }
}

impl fmt::Display for Gem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Connected components of the subgraph spanned by `colors`, each as a sorted
/// vertex list, ordered by smallest vertex.
pub fn residues(g: &Gem, colors: &[u8]) -> Vec<Vec<usize>> {
    let (label, count) = g.residue_labels(colors);
    let mut out = vec![Vec::new(); count];
    for (v, &l) in label.iter().enumerate() {
        out[l].push(v);
    }
    out
}

/// Eliminates generators with a unit coefficient, then takes the Smith form
/// of what is left.
fn reduce_presentation(n_gens: usize, mut relations: Vec<HashMap<usize, i128>>) -> AbelianGroup {
    let mut alive = vec![true; n_gens];
    let mut occurs: Vec<Vec<usize>> = vec![Vec::new(); n_gens];
    for (ri, rel) in relations.iter().enumerate() {
        for &g in rel.keys() {
            occurs[g].push(ri);
        }
    }
    let mut changed = true;
    while changed {
        changed = false;
        for ri in 0..relations.len() {
            let Some(g) = relations[ri]
                .iter()
                .filter(|(_, v)| v.abs() == 1)
                .map(|(&g, _)| g)
                .min()
            else {
                continue;
            };
            let rel = std::mem::take(&mut relations[ri]);
            let cg = rel[&g];
            // g = -cg * (sum of the other terms)
            let subst: Vec<(usize, i128)> =
                rel.iter().filter(|(&a, _)| a != g).map(|(&a, &v)| (a, -v * cg)).collect();
            let targets = std::mem::take(&mut occurs[g]);
            for rj in targets {
                if rj == ri {
                    continue;
                }
                let Some(m) = relations[rj].remove(&g) else { continue };
                for &(a, v) in &subst {
                    let entry = relations[rj].entry(a).or_default();
                    *entry += m * v;
                    if *entry == 0 {
                        relations[rj].remove(&a);
                    } else {
                        occurs[a].push(rj);
                    }
                }
            }
            alive[g] = false;
            changed = true;
        }
    }
    let gens: Vec<usize> = (0..n_gens).filter(|&g| alive[g]).collect();
    let index: HashMap<usize, usize> = gens.iter().enumerate().map(|(i, &g)| (g, i)).collect();
    let rows: Vec<Vec<BigInt>> = relations
        .iter()
        .filter(|r| !r.is_empty())
        .map(|r| {
            let mut row = vec![BigInt::from(0); gens.len()];
            for (g, v) in r {
                row[index[g]] = BigInt::from(*v);
            }
            row
        })
        .collect();
    if rows.is_empty() {
        return AbelianGroup { free_rank: gens.len(), torsion: Vec::new() };
    }
    let diag = smith_normal_form(&rows).diagonal();
    let nonzero: Vec<BigInt> = diag.into_iter().filter(|d| *d != BigInt::from(0)).collect();
    AbelianGroup {
        free_rank: gens.len() - nonzero.len(),
        torsion: nonzero.into_iter().filter(|d| *d != BigInt::from(1)).collect(),
    }
}

/// Parses the text form. Vertex ids may be any distinct non-negative
/// integers; they are renumbered in increasing order.
pub fn parse_gem(text: &str) -> Result<Gem, GemError> {
    let mut ids: Vec<u64> = Vec::new();
    let mut edges: Vec<(u64, u64, u8, usize)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let mut words = content.split_whitespace();
        let syntax = |message: &str| GemError::Syntax { line, message: message.to_string() };
        let number = |w: Option<&str>, what: &str| -> Result<u64, GemError> {
            w.ok_or_else(|| syntax(&format!("missing {what}")))?
                .parse::<u64>()
                .map_err(|_| syntax(&format!("invalid {what}")))
        };
        match words.next() {
            Some("v") => ids.push(number(words.next(), "vertex id")?),
            Some("e") => {
                let a = number(words.next(), "vertex id")?;
                let b = number(words.next(), "vertex id")?;
                let c = number(words.next(), "color")?;
                if c > 3 {
                    return Err(syntax("color must be 0, 1, 2 or 3"));
                }
                edges.push((a, b, c as u8, line));
            }
            Some(other) => return Err(syntax(&format!("unknown directive '{other}'"))),
            None => unreachable!(),
        }
        if words.next().is_some() {
            return Err(syntax("trailing input"));
        }
    }
    if ids.is_empty() {
        return Err(GemError::Empty);
    }
    let mut sorted = ids.clone();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(GemError::DuplicateVertex(w[0]));
    }
    let index: HashMap<u64, usize> = sorted.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let mut slots: Vec<[Vec<usize>; 4]> = vec![Default::default(); sorted.len()];
    for &(a, b, c, line) in &edges {
        let ia = *index.get(&a).ok_or(GemError::UnknownVertex(a))?;
        let ib = *index.get(&b).ok_or(GemError::UnknownVertex(b))?;
        if ia == ib {
            return Err(GemError::Syntax { line, message: "loops are not allowed".into() });
        }
        slots[ia][c as usize].push(ib);
        slots[ib][c as usize].push(ia);
    }
    let mut adj = Vec::with_capacity(sorted.len());
    for (v, s) in slots.iter().enumerate() {
        let mut row = [0; 4];
        for c in 0..4 {
            if s[c].len() != 1 {
                return Err(GemError::Improper { vertex: sorted[v], color: c as u8, count: s[c].len() });
            }
            row[c] = s[c][0];
        }
        adj.push(row);
    }
    Gem::from_adjacency(adj)
}

/// An eight-vertex gem of `S² × S¹`.
pub fn s2_x_s1() -> Gem {
    Gem {
        adj: vec![
            [4, 4, 5, 7],
            [5, 6, 4, 5],
            [6, 7, 7, 4],
            [7, 5, 6, 6],
            [0, 0, 1, 2],
            [1, 3, 0, 1],
            [2, 1, 3, 3],
            [3, 2, 2, 0],
        ],
    }
}

/// Builds a gem of the manifold presented by `b`. Components of the blink give
/// a connected sum; an edgeless vertex contributes `S² × S¹`.
pub fn blink_to_gem(b: &Blink) -> Result<Gem, GemError> {
    let mut pieces = Vec::new();
    for comp in b.components() {
        if comp.n_edges() == 0 {
            pieces.push(s2_x_s1());
        } else {
            pieces.push(Builder::new(&comp).build()?);
        }
    }
    let mut gem = pieces.first().cloned().ok_or(GemError::Empty)?;
    for p in &pieces[1..] {
        gem = gem.connected_sum(p);
    }
    let gem = gem.relabeled();
    if !gem.is_valid() || !gem.is_bipartite() {
        let c = gem.counts();
        return Err(GemError::Construction(format!(
            "v = {}, b = {}, t = {}, bipartite = {}",
            c.v,
            c.b,
            c.t,
            gem.is_bipartite()
        )));
    }
    Ok(gem)
}

// ---------------------------------------------------------------------------
// Polyhedral decomposition.
//
// Around a crossing the edge `e+` points east; the four regions are N (face
// left of `e+`), E (head), S and W (tail), the four tube openings sit at the
// diagonals. NW and SE carry the left strand, NE and SW the right one.

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Region {
    N,
    E,
    S,
    W,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Hole {
    NW,
    NE,
    SE,
    SW,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Level {
    Top,
    Bottom,
}

/// Positions in clockwise order, starting north.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Pos {
    R(Region),
    H(Hole),
}

const CLOCKWISE: [Pos; 8] = [
    Pos::R(Region::N),
    Pos::H(Hole::NE),
    Pos::R(Region::E),
    Pos::H(Hole::SE),
    Pos::R(Region::S),
    Pos::H(Hole::SW),
    Pos::R(Region::W),
    Pos::H(Hole::NW),
];

const HOLES: [Hole; 4] = [Hole::NW, Hole::NE, Hole::SE, Hole::SW];

impl Hole {
    /// Regions before and after the hole, clockwise.
    fn regions(self) -> (Region, Region) {
        match self {
            Hole::NW => (Region::W, Region::N),
            Hole::NE => (Region::N, Region::E),
            Hole::SE => (Region::E, Region::S),
            Hole::SW => (Region::S, Region::W),
        }
    }

    fn strand(self) -> Strand {
        match self {
            Hole::NW | Hole::SE => Strand::Left,
            Hole::NE | Hole::SW => Strand::Right,
        }
    }

    fn opposite(self) -> Hole {
        match self {
            Hole::NW => Hole::SE,
            Hole::SE => Hole::NW,
            Hole::NE => Hole::SW,
            Hole::SW => Hole::NE,
        }
    }

    fn side_region(self, vertex_side: bool) -> Region {
        match (self, vertex_side) {
            (Hole::NW | Hole::SW, true) => Region::W,
            (Hole::NE | Hole::SE, true) => Region::E,
            (Hole::NW | Hole::NE, false) => Region::N,
            (Hole::SE | Hole::SW, false) => Region::S,
        }
    }

    fn position(self) -> usize {
        CLOCKWISE.iter().position(|&p| p == Pos::H(self)).unwrap()
    }

    /// Opening of the corner right of `x` on the crossing of `x.edge`.
    fn after(x: Dart) -> Hole {
        if x.end == 0 {
            Hole::SW
        } else {
            Hole::NE
        }
    }

    /// Opening of the corner left of `y` on the crossing of `y.edge`.
    fn before(y: Dart) -> Hole {
        if y.end == 0 {
            Hole::NW
        } else {
            Hole::SE
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Pt {
    /// Where a tube opening meets the equator.
    Opening(usize, Hole, Region),
    /// Where the crossing disc meets the equator.
    Disc(usize, Region),
    /// Where the surgery curve crosses a tube opening.
    Curve(usize, Hole),
    /// Where the surgery curve crosses the left side of a tube.
    Flip(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Seg {
    Equator(usize, Region, Hole),
    DiscArc(usize, Hole),
    Opening(usize, Hole, Level, Option<Region>),
    CurveX(usize, Level),
    Side(usize, bool, Option<u8>),
    CurveT(usize, Option<u8>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Tag {
    Region,
    Disc,
    Corner(Level),
    /// The bool marks the half on the left of the surgery curve, seen from above.
    Middle(Level, bool),
    Strip(Level, Option<bool>),
    Meridian,
}

impl Tag {
    fn surface_level(self) -> Option<Level> {
        match self {
            Tag::Corner(l) | Tag::Middle(l, _) | Tag::Strip(l, _) => Some(l),
            _ => None,
        }
    }

    fn plane_left(self) -> Option<bool> {
        match self {
            Tag::Middle(_, b) => Some(b),
            Tag::Strip(_, b) => b,
            _ => None,
        }
    }
}

struct Face {
    tag: Tag,
    walk: Vec<(usize, bool)>,
}

/// A face side: `(face, 0 | 1)`. Sides are up/down for regions and crossing
/// discs, out/in for pieces of `Σ`, left/right for meridian discs.
type Occ = (usize, u8);

#[derive(Clone, Copy)]
struct Tube {
    corner: usize,
    start: (usize, Hole),
    end: (usize, Hole),
    left_is_vertex: bool,
    levels: (Level, Level),
}

struct Builder<'a> {
    b: &'a Blink,
    pts: HashMap<Pt, usize>,
    seg_ends: Vec<(usize, usize)>,
    seg_id: HashMap<Seg, usize>,
    seg_key: Vec<Seg>,
    faces: Vec<Face>,
}

impl<'a> Builder<'a> {
    fn new(b: &'a Blink) -> Self {
        Builder {
            b,
            pts: HashMap::new(),
            seg_ends: Vec::new(),
            seg_id: HashMap::new(),
            seg_key: Vec::new(),
            faces: Vec::new(),
        }
    }

    fn level(&self, e: usize, strand: Strand) -> Level {
        let over = match self.b.color(e) {
            EdgeColor::Black => Strand::Left,
            EdgeColor::Gray => Strand::Right,
        };
        if strand == over {
            Level::Top
        } else {
            Level::Bottom
        }
    }

    fn hole_level(&self, e: usize, h: Hole) -> Level {
        self.level(e, h.strand())
    }

    fn pt(&mut self, p: Pt) -> usize {
        let n = self.pts.len();
        *self.pts.entry(p).or_insert(n)
    }

    fn seg(&mut self, key: Seg, a: Pt, b: Pt) {
        let (a, b) = (self.pt(a), self.pt(b));
        let id = self.seg_ends.len();
        let prev = self.seg_id.insert(key, id);
        debug_assert!(prev.is_none(), "segment {key:?} added twice");
        self.seg_ends.push((a, b));
        self.seg_key.push(key);
    }

    fn face(&mut self, tag: Tag, start: Pt, segs: &[Seg]) -> Result<(), GemError> {
        let start = self.pt(start);
        let mut cur = start;
        let mut walk = Vec::with_capacity(segs.len());
        for key in segs {
            let id = *self
                .seg_id
                .get(key)
                .ok_or_else(|| GemError::Construction(format!("missing segment {key:?}")))?;
            let (a, b) = self.seg_ends[id];
            if a == cur {
                walk.push((id, false));
                cur = b;
            } else if b == cur {
                walk.push((id, true));
                cur = a;
            } else {
                return Err(GemError::Construction(format!("open boundary at {key:?} in {tag:?}")));
            }
        }
        if cur != start {
            return Err(GemError::Construction(format!("unclosed boundary of {tag:?}")));
        }
        self.faces.push(Face { tag, walk });
        Ok(())
    }

    /// Segments along a tube opening at level `l`, from region `from` to `to`.
    fn opening_arc(&self, e: usize, h: Hole, l: Level, from: Region, to: Region) -> Vec<Seg> {
        if self.hole_level(e, h) == l {
            vec![Seg::Opening(e, h, l, Some(from)), Seg::Opening(e, h, l, Some(to))]
        } else {
            vec![Seg::Opening(e, h, l, None)]
        }
    }

    fn build(mut self) -> Result<Gem, GemError> {
        let b = self.b;
        let zigzags = b.zigzags();
        let n_edges = b.n_edges();

        // Crossing balls: equator, crossing disc, tube openings.
        for e in 0..n_edges {
            for h in HOLES {
                let (r1, r2) = h.regions();
                for r in [r1, r2] {
                    self.seg(Seg::Equator(e, r, h), Pt::Disc(e, r), Pt::Opening(e, h, r));
                }
                self.seg(Seg::DiscArc(e, h), Pt::Disc(e, r1), Pt::Disc(e, r2));
                for l in [Level::Top, Level::Bottom] {
                    if self.hole_level(e, h) == l {
                        self.seg(Seg::Opening(e, h, l, Some(r1)), Pt::Opening(e, h, r1), Pt::Curve(e, h));
                        self.seg(Seg::Opening(e, h, l, Some(r2)), Pt::Curve(e, h), Pt::Opening(e, h, r2));
                    } else {
                        self.seg(Seg::Opening(e, h, l, None), Pt::Opening(e, h, r1), Pt::Opening(e, h, r2));
                    }
                }
            }
            let arcs: Vec<Seg> =
                [Hole::NE, Hole::SE, Hole::SW, Hole::NW].iter().map(|&h| Seg::DiscArc(e, h)).collect();
            self.face(Tag::Disc, Pt::Disc(e, Region::N), &arcs)?;
        }

        // Passages of the surgery curves through the crossing balls.
        let mut passage: HashMap<(usize, Level), (Hole, Hole)> = HashMap::new();
        for z in &zigzags {
            for s in z {
                let h_in = match (s.strand, s.forward) {
                    (Strand::Left, true) => Hole::NW,
                    (Strand::Left, false) => Hole::SE,
                    (Strand::Right, true) => Hole::SW,
                    (Strand::Right, false) => Hole::NE,
                };
                passage.insert((s.edge, self.level(s.edge, s.strand)), (h_in, h_in.opposite()));
            }
        }
        for e in 0..n_edges {
            for l in [Level::Top, Level::Bottom] {
                let (h_in, h_out) = passage[&(e, l)];
                self.seg(Seg::CurveX(e, l), Pt::Curve(e, h_in), Pt::Curve(e, h_out));
            }
        }

        for e in 0..n_edges {
            for l in [Level::Top, Level::Bottom] {
                for h in HOLES {
                    if self.hole_level(e, h) != l {
                        let (r1, r2) = h.regions();
                        let mut segs = vec![Seg::Equator(e, r1, h)];
                        segs.extend(self.opening_arc(e, h, l, r1, r2));
                        segs.extend([Seg::Equator(e, r2, h), Seg::DiscArc(e, h)]);
                        self.face(Tag::Corner(l), Pt::Disc(e, r1), &segs)?;
                    }
                }
                self.middle_faces(e, l, passage[&(e, l)])?;
            }
        }

        // Tubes, one per corner, oriented along the zigzags.
        let mut tubes = Vec::with_capacity(2 * n_edges);
        for z in &zigzags {
            for (k, s) in z.iter().enumerate() {
                let next = z[(k + 1) % z.len()];
                let h0 = passage[&(s.edge, self.level(s.edge, s.strand))].1;
                let h1 = passage[&(next.edge, self.level(next.edge, next.strand))].0;
                tubes.push(Tube {
                    corner: next.corner.index(),
                    start: (s.edge, h0),
                    end: (next.edge, h1),
                    left_is_vertex: next.strand == Strand::Right,
                    levels: (self.level(s.edge, s.strand), self.level(next.edge, next.strand)),
                });
            }
        }
        let mut tube_of = vec![None; 2 * n_edges];
        for t in &tubes {
            tube_of[t.corner] = Some(*t);
        }
        for t in &tubes {
            self.tube_faces(t)?;
        }

        // Region discs.
        for v in 0..b.n_vertices() {
            let seq: Vec<(usize, Region, Hole, Hole, Dart)> = b
                .rotation(v)
                .iter()
                .map(|&x| {
                    let r = if x.end == 0 { Region::W } else { Region::E };
                    (x.edge, r, Hole::before(x), Hole::after(x), x)
                })
                .collect();
            self.region_face(&seq, true, &tube_of)?;
        }
        for walk in b.faces() {
            let seq: Vec<(usize, Region, Hole, Hole, Dart)> = walk
                .iter()
                .map(|&d| {
                    let o = d.opposite();
                    let r = if d.end == 0 { Region::N } else { Region::S };
                    (d.edge, r, Hole::before(d), Hole::after(o), o)
                })
                .collect();
            self.region_face(&seq, false, &tube_of)?;
        }

        // Meridian discs of the surgery tori.
        for z in &zigzags {
            let mut segs = Vec::new();
            for (k, s) in z.iter().enumerate() {
                segs.push(Seg::CurveX(s.edge, self.level(s.edge, s.strand)));
                let t = tube_of[z[(k + 1) % z.len()].corner.index()].unwrap();
                if t.levels.0 == t.levels.1 {
                    segs.push(Seg::CurveT(t.corner, None));
                } else {
                    segs.extend([Seg::CurveT(t.corner, Some(0)), Seg::CurveT(t.corner, Some(1))]);
                }
            }
            let s = z[0];
            let h_in = passage[&(s.edge, self.level(s.edge, s.strand))].0;
            self.face(Tag::Meridian, Pt::Curve(s.edge, h_in), &segs)?;
        }

        self.flag_graph()
    }

    /// The part of the level-`l` hemisphere between the two corners, split in
    /// two by the surgery curve passing from `h_in` to `h_out`.
    fn middle_faces(&mut self, e: usize, l: Level, (h_in, h_out): (Hole, Hole)) -> Result<(), GemError> {
        let mut segs = vec![Seg::Opening(e, h_in, l, Some(h_in.regions().1))];
        let mut cut = None;
        let mut idx = h_in.position() + 1;
        loop {
            let Pos::R(r) = CLOCKWISE[idx % 8] else { unreachable!() };
            let Pos::H(prev) = CLOCKWISE[(idx + 7) % 8] else { unreachable!() };
            let Pos::H(next) = CLOCKWISE[(idx + 1) % 8] else { unreachable!() };
            if self.hole_level(e, prev) == l {
                segs.push(Seg::Equator(e, r, prev));
            }
            if self.hole_level(e, next) == l {
                segs.push(Seg::Equator(e, r, next));
                let (n1, n2) = next.regions();
                segs.push(Seg::Opening(e, next, l, Some(n1)));
                if next == h_in {
                    break;
                }
                if next == h_out {
                    cut = Some(segs.len());
                }
                segs.push(Seg::Opening(e, next, l, Some(n2)));
            } else {
                segs.push(Seg::DiscArc(e, next));
            }
            idx += 2;
        }
        let cut = cut.ok_or_else(|| GemError::Construction("curve does not cross the crossing".into()))?;
        let mut left = segs[..cut].to_vec();
        left.push(Seg::CurveX(e, l));
        let mut right = segs[cut..].to_vec();
        right.push(Seg::CurveX(e, l));
        self.face(Tag::Middle(l, true), Pt::Curve(e, h_in), &left)?;
        self.face(Tag::Middle(l, false), Pt::Curve(e, h_out), &right)
    }

    fn tube_faces(&mut self, t: &Tube) -> Result<(), GemError> {
        let x = t.corner;
        let (e0, h0) = t.start;
        let (e1, h1) = t.end;
        let lv = t.left_is_vertex;
        let (rl0, rr0) = (h0.side_region(lv), h0.side_region(!lv));
        let (rl1, rr1) = (h1.side_region(lv), h1.side_region(!lv));
        let (l0, l1) = t.levels;
        self.seg(Seg::Side(x, !lv, None), Pt::Opening(e0, h0, rr0), Pt::Opening(e1, h1, rr1));
        let left_side: Vec<Seg> = if l0 == l1 {
            self.seg(Seg::Side(x, lv, None), Pt::Opening(e0, h0, rl0), Pt::Opening(e1, h1, rl1));
            self.seg(Seg::CurveT(x, None), Pt::Curve(e0, h0), Pt::Curve(e1, h1));
            vec![Seg::Side(x, lv, None)]
        } else {
            self.seg(Seg::Side(x, lv, Some(0)), Pt::Opening(e0, h0, rl0), Pt::Flip(x));
            self.seg(Seg::Side(x, lv, Some(1)), Pt::Flip(x), Pt::Opening(e1, h1, rl1));
            self.seg(Seg::CurveT(x, Some(0)), Pt::Curve(e0, h0), Pt::Flip(x));
            self.seg(Seg::CurveT(x, Some(1)), Pt::Flip(x), Pt::Curve(e1, h1));
            vec![Seg::Side(x, lv, Some(0)), Seg::Side(x, lv, Some(1))]
        };
        let right = Seg::Side(x, !lv, None);
        for l in [Level::Top, Level::Bottom] {
            let a0 = self.opening_arc(e0, h0, l, rl0, rr0);
            let a1 = self.opening_arc(e1, h1, l, rr1, rl1);
            if l0 == l1 && l == l0 {
                let mut lp = vec![a0[0], left_side[0], a1[1], Seg::CurveT(x, None)];
                self.face(Tag::Strip(l, Some(true)), Pt::Curve(e0, h0), &lp)?;
                lp = vec![a0[1], right, a1[0], Seg::CurveT(x, None)];
                self.face(Tag::Strip(l, Some(false)), Pt::Curve(e0, h0), &lp)?;
            } else if l0 != l1 && l == l0 {
                let tri = [a0[0], left_side[0], Seg::CurveT(x, Some(0))];
                self.face(Tag::Strip(l, Some(true)), Pt::Curve(e0, h0), &tri)?;
                let mut rest = vec![a0[1], right];
                rest.extend(&a1);
                rest.extend([left_side[1], Seg::CurveT(x, Some(0))]);
                self.face(Tag::Strip(l, Some(false)), Pt::Curve(e0, h0), &rest)?;
            } else if l0 != l1 {
                let tri = [Seg::CurveT(x, Some(1)), a1[1], left_side[1]];
                self.face(Tag::Strip(l, Some(true)), Pt::Flip(x), &tri)?;
                let mut rest = vec![Seg::CurveT(x, Some(1)), a1[0], right];
                rest.extend(a0.iter().rev());
                rest.push(left_side[0]);
                self.face(Tag::Strip(l, Some(false)), Pt::Flip(x), &rest)?;
            } else {
                let mut full = a0.clone();
                full.push(right);
                full.extend(&a1);
                full.extend(left_side.iter().rev());
                self.face(Tag::Strip(l, None), Pt::Opening(e0, h0, rl0), &full)?;
            }
        }
        Ok(())
    }

    /// Boundary of a region of the diagram: an equator arc at every crossing
    /// and a side of every tube around it.
    fn region_face(
        &mut self,
        seq: &[(usize, Region, Hole, Hole, Dart)],
        vertex_side: bool,
        tube_of: &[Option<Tube>],
    ) -> Result<(), GemError> {
        let mut segs = Vec::new();
        for &(e, r, h_in, h_out, x) in seq {
            segs.extend([Seg::Equator(e, r, h_in), Seg::Equator(e, r, h_out)]);
            let t = tube_of[x.index()].unwrap();
            if self.seg_id.contains_key(&Seg::Side(x.index(), vertex_side, None)) {
                segs.push(Seg::Side(x.index(), vertex_side, None));
            } else if t.start == (e, h_out) {
                segs.extend([Seg::Side(x.index(), vertex_side, Some(0)), Seg::Side(x.index(), vertex_side, Some(1))]);
            } else {
                segs.extend([Seg::Side(x.index(), vertex_side, Some(1)), Seg::Side(x.index(), vertex_side, Some(0))]);
            }
        }
        let (e, r, h_in, _, _) = seq[0];
        self.face(Tag::Region, Pt::Opening(e, h_in, r), &segs)
    }

    /// How the faces around every segment pair up inside the 3-cells.
    fn wedges(&self) -> Result<HashMap<(Occ, usize), Occ>, GemError> {
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); self.seg_ends.len()];
        for (f, face) in self.faces.iter().enumerate() {
            for &(s, _) in &face.walk {
                incident[s].push(f);
            }
        }
        let mut partner = HashMap::new();
        let mut join = |s: usize, p: Occ, q: Occ| {
            partner.insert((p, s), q);
            partner.insert((q, s), p);
        };
        let bad = |s: usize| GemError::Construction(format!("unexpected faces around {:?}", self.seg_key[s]));
        for (s, fs) in incident.iter().enumerate() {
            let tag = |f: usize| self.faces[f].tag;
            let find = |pred: &dyn Fn(Tag) -> bool| fs.iter().copied().find(|&f| pred(tag(f)));
            match self.seg_key[s] {
                Seg::Equator(..) | Seg::Side(..) => {
                    let r = find(&|t| t == Tag::Region).ok_or_else(|| bad(s))?;
                    let top = find(&|t| t.surface_level() == Some(Level::Top)).ok_or_else(|| bad(s))?;
                    let bot = find(&|t| t.surface_level() == Some(Level::Bottom)).ok_or_else(|| bad(s))?;
                    if fs.len() != 3 {
                        return Err(bad(s));
                    }
                    join(s, (r, 0), (top, 0));
                    join(s, (r, 1), (bot, 0));
                    join(s, (top, 1), (bot, 1));
                }
                Seg::DiscArc(..) => {
                    let disc = find(&|t| t == Tag::Disc).ok_or_else(|| bad(s))?;
                    let mid = find(&|t| matches!(t, Tag::Middle(..))).ok_or_else(|| bad(s))?;
                    let cor = find(&|t| matches!(t, Tag::Corner(_))).ok_or_else(|| bad(s))?;
                    if fs.len() != 3 {
                        return Err(bad(s));
                    }
                    // The middle of the top hemisphere bounds the over strand's
                    // piece, which lies above the disc.
                    let mid_side = if tag(mid).surface_level() == Some(Level::Top) { 0 } else { 1 };
                    join(s, (mid, 0), (cor, 0));
                    join(s, (mid, 1), (disc, mid_side));
                    join(s, (cor, 1), (disc, 1 - mid_side));
                }
                Seg::Opening(..) => {
                    if fs.len() != 2 {
                        return Err(bad(s));
                    }
                    join(s, (fs[0], 0), (fs[1], 0));
                    join(s, (fs[0], 1), (fs[1], 1));
                }
                Seg::CurveX(..) | Seg::CurveT(..) => {
                    let m = find(&|t| t == Tag::Meridian).ok_or_else(|| bad(s))?;
                    let pl = find(&|t| t.plane_left() == Some(true)).ok_or_else(|| bad(s))?;
                    let pr = find(&|t| t.plane_left() == Some(false)).ok_or_else(|| bad(s))?;
                    if fs.len() != 3 {
                        return Err(bad(s));
                    }
                    // Left with respect to the outward normal of the surgery
                    // torus: plane-left on top, plane-right underneath.
                    let (lp, rp) = if tag(pl).surface_level() == Some(Level::Top) { (pl, pr) } else { (pr, pl) };
                    join(s, (lp, 0), (rp, 0));
                    join(s, (lp, 1), (m, 0));
                    join(s, (m, 1), (rp, 1));
                }
            }
        }
        Ok(partner)
    }

    /// One gem vertex per (face side, boundary segment, segment end).
    fn flag_graph(&self) -> Result<Gem, GemError> {
        let partner = self.wedges()?;
        let mut offset = Vec::with_capacity(self.faces.len());
        let mut total = 0;
        for f in &self.faces {
            offset.push(total);
            total += 4 * f.walk.len();
        }
        let position: Vec<HashMap<usize, usize>> = self
            .faces
            .iter()
            .map(|f| f.walk.iter().enumerate().map(|(k, &(s, _))| (s, k)).collect())
            .collect();
        let id = |f: usize, side: u8, k: usize, end: usize| {
            offset[f] + side as usize * 2 * self.faces[f].walk.len() + 2 * k + end
        };
        let mut adj = vec![[0usize; 4]; total];
        for (f, face) in self.faces.iter().enumerate() {
            let len = face.walk.len();
            for side in 0..2u8 {
                for (k, &(s, rev)) in face.walk.iter().enumerate() {
                    // end 0 is the segment's first point, end 1 its second
                    let exit = if rev { 0 } else { 1 };
                    for end in 0..2 {
                        let u = id(f, side, k, end);
                        adj[u][0] = id(f, side, k, 1 - end);
                        adj[u][1] = if end == exit {
                            let k2 = (k + 1) % len;
                            let enter = if face.walk[k2].1 { 1 } else { 0 };
                            id(f, side, k2, enter)
                        } else {
                            let k2 = (k + len - 1) % len;
                            let leave = if face.walk[k2].1 { 0 } else { 1 };
                            id(f, side, k2, leave)
                        };
                        let &(f2, side2) = partner.get(&((f, side), s)).ok_or_else(|| {
                            GemError::Construction(format!("face without a neighbour at {:?}", self.seg_key[s]))
                        })?;
                        adj[u][2] = id(f2, side2, position[f2][&s], end);
                        adj[u][3] = id(f, 1 - side, k, end);
                    }
                }
            }
        }
        Gem::from_adjacency(adj).map_err(|e| GemError::Construction(e.to_string()))
    }
}

// ---------------------------------------------------------------------------
// Triangulation codes.

/// A point of the triangulation: a vertex (no colours), an edge (its colour),
/// a 2-residue or a 3-residue (its colours), tagged by the smallest gem
/// vertex it contains.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct CodePoint {
    pub k: usize,
    pub colors: Vec<u8>,
}

impl fmt::Display for CodePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.colors.is_empty() {
            write!(f, "{}", self.k)
        } else {
            let c: String = self.colors.iter().map(|c| char::from(b'0' + c)).collect();
            write!(f, "{}^{}", self.k, c)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TriangulationCodes {
    pub points: Vec<CodePoint>,
    /// Point indices `[vertex, edge, 2-residue, 3-residue]` of each chain.
    pub tetrahedra: Vec<[usize; 4]>,
    /// `(i, i², ..., i⁷)` for point `i`, counting from 1.
    pub coordinates: Vec<[u128; 7]>,
}

impl TriangulationCodes {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "points": self.points.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "tetrahedra": self.tetrahedra,
            // decimal strings: the powers overflow JSON's 64-bit integers
            "coordinates": self
                .coordinates
                .iter()
                .map(|c| c.iter().map(|x| x.to_string()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }
}

/// Moment-curve coordinates of the point with index `i`.
pub fn moment_coordinates(i: u128) -> [u128; 7] {
    let mut out = [0; 7];
    let mut p = 1u128;
    for slot in out.iter_mut() {
        p *= i;
        *slot = p;
    }
    out
}

/// Points and tetrahedra of the triangulation dual to `g`: one point per
/// vertex, edge, 2-residue and 3-residue, one tetrahedron per chain
/// `vertex ⊂ edge ⊂ 2-residue ⊂ 3-residue`.
pub fn gem_to_codes(g: &Gem) -> TriangulationCodes {
    let n = g.n_vertices();
    let mut points: Vec<CodePoint> = (0..n).map(|k| CodePoint { k, colors: Vec::new() }).collect();
    let mut index: HashMap<CodePoint, usize> = HashMap::new();
    let mut intern = |p: CodePoint, points: &mut Vec<CodePoint>| -> usize {
        *index.entry(p.clone()).or_insert_with(|| {
            points.push(p);
            points.len() - 1
        })
    };
    let sets: Vec<Vec<u8>> = {
        let mut s = Vec::new();
        for c in 0..4u8 {
            s.push(vec![c]);
        }
        for p in PAIRS {
            s.push(p.to_vec());
        }
        for t in TRIPLES {
            s.push(t.to_vec());
        }
        s
    };
    // smallest vertex of the residue through each vertex, per colour set
    let mut least: HashMap<Vec<u8>, Vec<usize>> = HashMap::new();
    for cs in &sets {
        let (label, count) = g.residue_labels(cs);
        let mut min = vec![usize::MAX; count];
        for (v, &l) in label.iter().enumerate() {
            min[l] = min[l].min(v);
        }
        least.insert(cs.clone(), label.iter().map(|&l| min[l]).collect());
    }
    for cs in &sets {
        for v in 0..n {
            let k = least[cs][v];
            if k == v {
                intern(CodePoint { k, colors: cs.clone() }, &mut points);
            }
        }
    }
    let mut tetrahedra = Vec::with_capacity(24 * n);
    for v in 0..n {
        for a in 0..4u8 {
            for b in 0..4u8 {
                for c in 0..4u8 {
                    if a == b || a == c || b == c {
                        continue;
                    }
                    let mut ab = vec![a, b];
                    ab.sort_unstable();
                    let mut abc = vec![a, b, c];
                    abc.sort_unstable();
                    let p1 = intern(CodePoint { k: least[&vec![a]][v], colors: vec![a] }, &mut points);
                    let p2 = intern(CodePoint { k: least[&ab][v], colors: ab.clone() }, &mut points);
                    let p3 = intern(CodePoint { k: least[&abc][v], colors: abc.clone() }, &mut points);
                    tetrahedra.push([v, p1, p2, p3]);
                }
            }
        }
    }
    let coordinates = (0..points.len()).map(|i| moment_coordinates(i as u128 + 1)).collect();
    TriangulationCodes { points, tetrahedra, coordinates }
}
