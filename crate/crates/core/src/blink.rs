//! Blinks as plane combinatorial maps.
//!
//! A blink is stored as a rotation system: every edge `e` owns two darts,
//! `e+` (end 0) and `e-` (end 1), and every vertex lists the darts leaving it
//! in clockwise order. Faces are the orbits of `d -> next_cw(opposite(d))`,
//! so the orbit of `d` is the face on the left of `d`.
//!
//! Corners ("angles") are indexed by darts: the corner of `d` is the wedge at
//! `tail(d)` swept clockwise from `d` to `next_cw(d)`. Each corner lies in
//! exactly one face, one vertex and one zigzag. Each corner is also an arc of
//! the medial link, running between the crossings sitting on the two edges
//! that bound it.
//!
//! Around an edge `e`, drawn with `e+` pointing east, the four corners are
//! NW (left of `e+`, at the tail), NE (left of `e+`, at the head), SE and SW.
//! The [`Strand::Left`] strand of the medial crossing on `e` runs NW–SE
//! through the two corners lying to the left of each dart; the
//! [`Strand::Right`] strand runs SW–NE.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BlinkError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("dart {0} occurs more than once in the rotation system")]
    RepeatedDart(Dart),
    #[error("dart {0} is missing from the rotation system")]
    MissingDart(Dart),
    #[error("edge {0} is referenced but never declared")]
    UnknownEdge(usize),
    #[error("edge {0} has no color")]
    MissingColor(usize),
    #[error("vertex {0} declared twice")]
    DuplicateVertex(usize),
    #[error("vertex ids are not dense: vertex {0} is missing")]
    MissingVertex(usize),
    #[error(
        "component {component} is not a sphere embedding: V - E + F = {vertices} - {edges} + {faces} = {euler}"
    )]
    NotPlanar {
        component: usize,
        vertices: usize,
        edges: usize,
        faces: usize,
        euler: i64,
    },
    #[error("operation requires a connected blink, found {0} components")]
    Disconnected(usize),
}

/// One end of an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Dart {
    pub edge: usize,
    pub end: u8,
}

impl Dart {
    pub fn new(edge: usize, end: u8) -> Self {
        debug_assert!(end < 2);
        Dart { edge, end }
    }

    pub fn opposite(self) -> Self {
        Dart {
            edge: self.edge,
            end: 1 - self.end,
        }
    }

    pub fn index(self) -> usize {
        2 * self.edge + self.end as usize
    }

    pub fn from_index(i: usize) -> Self {
        Dart {
            edge: i / 2,
            end: (i % 2) as u8,
        }
    }
}

impl fmt::Display for Dart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.edge, if self.end == 0 { '+' } else { '-' })
    }
}

impl FromStr for Dart {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (num, end) = match s.as_bytes().last() {
            Some(b'+') => (&s[..s.len() - 1], 0),
            Some(b'-') => (&s[..s.len() - 1], 1),
            _ => return Err(format!("dart `{s}` must end in `+` or `-`")),
        };
        let edge = num
            .parse::<usize>()
            .map_err(|_| format!("dart `{s}` has an invalid edge id"))?;
        Ok(Dart::new(edge, end))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EdgeColor {
    Black,
    Gray,
}

impl EdgeColor {
    pub fn flipped(self) -> Self {
        match self {
            EdgeColor::Black => EdgeColor::Gray,
            EdgeColor::Gray => EdgeColor::Black,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            EdgeColor::Black => 'b',
            EdgeColor::Gray => 'g',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

/// The two strands of the medial crossing sitting on an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Strand {
    /// NW–SE: through the corners left of `e+` (at its tail) and left of `e-`.
    Left,
    /// SW–NE: through the corners right of `e+` and right of `e-`.
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SiteKind {
    Vertex,
    Face,
    Zigzag,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Site {
    pub kind: SiteKind,
    pub index: usize,
}

impl Site {
    pub fn vertex(index: usize) -> Self {
        Site {
            kind: SiteKind::Vertex,
            index,
        }
    }
    pub fn face(index: usize) -> Self {
        Site {
            kind: SiteKind::Face,
            index,
        }
    }
    pub fn zigzag(index: usize) -> Self {
        Site {
            kind: SiteKind::Zigzag,
            index,
        }
    }
}

/// A corner: two consecutive edges at a vertex, inside one face, on one zigzag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Angle {
    /// The corner is swept clockwise from this dart to the next one.
    pub corner: Dart,
    pub vertex: usize,
    pub face: usize,
    pub zigzag: usize,
    pub edge_pair: (usize, usize),
}

/// The six sites around an edge, in the arrangement used by the edge factor.
///
/// `v1 = tail(e+)`, `f1` = face left of `e+`, `v2 = tail(e-)`, `f2` = face
/// left of `e-`, `z1` = zigzag on the [`Strand::Left`] strand (corners
/// `(v1,f1)` and `(v2,f2)`), `z2` = zigzag on the [`Strand::Right`] strand
/// (corners `(v1,f2)` and `(v2,f1)`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeIncidence {
    pub edge: usize,
    pub color: EdgeColor,
    pub v1: usize,
    pub f1: usize,
    pub z1: usize,
    pub v2: usize,
    pub f2: usize,
    pub z2: usize,
}

impl EdgeIncidence {
    /// The same edge seen from `e-`: a half turn swaps the ends and the sides
    /// while each strand keeps its zigzag.
    pub fn half_turn(&self) -> Self {
        EdgeIncidence {
            v1: self.v2,
            f1: self.f2,
            v2: self.v1,
            f2: self.f1,
            ..*self
        }
    }

    /// The mirror image across the edge axis: sides swap, and so do strands.
    pub fn reflected(&self) -> Self {
        EdgeIncidence {
            f1: self.f2,
            f2: self.f1,
            z1: self.z2,
            z2: self.z1,
            ..*self
        }
    }
}

/// One passage of a zigzag through an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZigzagStep {
    /// Corner the zigzag is leaving.
    pub corner: Dart,
    pub edge: usize,
    pub strand: Strand,
    /// True when the passage goes from the tail side of `e+` to its head side.
    pub forward: bool,
}

/// Faces, zigzags and corners derived from a blink.
#[derive(Clone, Debug)]
pub struct Cells {
    /// Face walks; each walk lists the darts having the face on their left.
    pub faces: Vec<Vec<Dart>>,
    pub face_of_dart: Vec<usize>,
    /// For each component (in [`Blink::component_vertices`] order), its
    /// infinite face, or `None` for an edgeless vertex.
    pub outer_faces: Vec<Option<usize>>,
    pub zigzags: Vec<Vec<ZigzagStep>>,
    /// Zigzag through each corner, indexed by corner dart.
    pub zigzag_of_corner: Vec<usize>,
    pub angles: Vec<Angle>,
    pub incidences: Vec<EdgeIncidence>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Blink {
    rotations: Vec<Vec<Dart>>,
    colors: Vec<EdgeColor>,
    infinite: Option<(Dart, Side)>,
    tail: Vec<usize>,
    position: Vec<usize>,
}

impl Blink {
    /// Builds a blink and checks it is a sphere embedding per component.
    pub fn new(
        rotations: Vec<Vec<Dart>>,
        colors: Vec<EdgeColor>,
        infinite: Option<(Dart, Side)>,
    ) -> Result<Self, BlinkError> {
        let b = Self::from_rotations(rotations, colors, infinite)?;
        b.validate_planarity()?;
        Ok(b)
    }

    /// Structural checks only; call [`Blink::validate_planarity`] before
    /// deriving anything from the result.
    pub fn from_rotations(
        rotations: Vec<Vec<Dart>>,
        colors: Vec<EdgeColor>,
        infinite: Option<(Dart, Side)>,
    ) -> Result<Self, BlinkError> {
        let n_edges = colors.len();
        let mut tail = vec![usize::MAX; 2 * n_edges];
        let mut position = vec![usize::MAX; 2 * n_edges];
        for (v, rot) in rotations.iter().enumerate() {
            for (i, &d) in rot.iter().enumerate() {
                if d.edge >= n_edges || d.end > 1 {
                    return Err(BlinkError::MissingColor(d.edge));
                }
                if tail[d.index()] != usize::MAX {
                    return Err(BlinkError::RepeatedDart(d));
                }
                tail[d.index()] = v;
                position[d.index()] = i;
            }
        }
        if let Some(i) = tail.iter().position(|&t| t == usize::MAX) {
            return Err(BlinkError::MissingDart(Dart::from_index(i)));
        }
        if let Some((d, _)) = infinite {
            if d.edge >= n_edges {
                return Err(BlinkError::UnknownEdge(d.edge));
            }
        }
        Ok(Blink {
            rotations,
            colors,
            infinite,
            tail,
            position,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.rotations.len()
    }

    pub fn n_edges(&self) -> usize {
        self.colors.len()
    }

    pub fn rotation(&self, v: usize) -> &[Dart] {
        &self.rotations[v]
    }

    pub fn rotations(&self) -> &[Vec<Dart>] {
        &self.rotations
    }

    pub fn color(&self, e: usize) -> EdgeColor {
        self.colors[e]
    }

    pub fn colors(&self) -> &[EdgeColor] {
        &self.colors
    }

    pub fn infinite_face_spec(&self) -> Option<(Dart, Side)> {
        self.infinite
    }

    pub fn tail(&self, d: Dart) -> usize {
        self.tail[d.index()]
    }

    pub fn head(&self, d: Dart) -> usize {
        self.tail[d.opposite().index()]
    }

    /// Next dart clockwise around `tail(d)`.
    pub fn next_cw(&self, d: Dart) -> Dart {
        let rot = &self.rotations[self.tail(d)];
        rot[(self.position[d.index()] + 1) % rot.len()]
    }

    /// Next dart counterclockwise around `tail(d)`.
    pub fn next_ccw(&self, d: Dart) -> Dart {
        let rot = &self.rotations[self.tail(d)];
        let n = rot.len();
        rot[(self.position[d.index()] + n - 1) % n]
    }

    /// Successor of `d` along the boundary of the face on its left.
    pub fn face_step(&self, d: Dart) -> Dart {
        self.next_cw(d.opposite())
    }

    pub fn darts(&self) -> impl Iterator<Item = Dart> {
        (0..2 * self.n_edges()).map(Dart::from_index)
    }

    pub fn is_monochromatic(&self) -> bool {
        self.colors.windows(2).all(|w| w[0] == w[1])
    }

    /// Vertex sets of the connected components, ordered by smallest vertex.
    pub fn component_vertices(&self) -> Vec<Vec<usize>> {
        let n = self.n_vertices();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &d in &self.rotations[v] {
                    let w = self.head(d);
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                        stack.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.component_vertices().len() <= 1
    }

    fn face_orbits(&self) -> (Vec<usize>, Vec<Vec<Dart>>) {
        let mut face_of = vec![usize::MAX; 2 * self.n_edges()];
        let mut walks = Vec::new();
        for d in self.darts() {
            if face_of[d.index()] != usize::MAX {
                continue;
            }
            let id = walks.len();
            let mut walk = Vec::new();
            let mut x = d;
            while face_of[x.index()] == usize::MAX {
                face_of[x.index()] = id;
                walk.push(x);
                x = self.face_step(x);
            }
            walks.push(walk);
        }
        (face_of, walks)
    }

    /// Checks `V - E + F = 2` on every connected component.
    pub fn validate_planarity(&self) -> Result<(), BlinkError> {
        let (face_of, walks) = self.face_orbits();
        for (ci, comp) in self.component_vertices().iter().enumerate() {
            let edges: usize = comp.iter().map(|&v| self.rotations[v].len()).sum::<usize>() / 2;
            let faces = if edges == 0 {
                1
            } else {
                let mut ids: Vec<usize> = comp
                    .iter()
                    .flat_map(|&v| self.rotations[v].iter().map(|d| face_of[d.index()]))
                    .collect();
                ids.sort_unstable();
                ids.dedup();
                ids.len()
            };
            let euler = comp.len() as i64 - edges as i64 + faces as i64;
            if euler != 2 {
                return Err(BlinkError::NotPlanar {
                    component: ci,
                    vertices: comp.len(),
                    edges,
                    faces,
                    euler,
                });
            }
        }
        debug_assert_eq!(walks.iter().map(Vec::len).sum::<usize>(), 2 * self.n_edges());
        Ok(())
    }

    /// Face walks with the infinite face first.
    ///
    /// The infinite face is the one named by the `Finf` directive; when the
    /// blink has none, it is the face on the left of the smallest dart.
    pub fn faces(&self) -> Vec<Vec<Dart>> {
        self.cells().faces
    }

    pub fn zigzags(&self) -> Vec<Vec<ZigzagStep>> {
        self.cells().zigzags
    }

    pub fn angles(&self) -> Vec<Angle> {
        self.cells().angles
    }

    pub fn edge_incidences(&self) -> Vec<EdgeIncidence> {
        self.cells().incidences
    }

    /// Derives every site of the blink in one pass.
    pub fn cells(&self) -> Cells {
        let (raw_face_of, raw_walks) = self.face_orbits();
        let components = self.component_vertices();

        // Pick the infinite face of every component.
        let mut outer_raw: Vec<Option<usize>> = Vec::with_capacity(components.len());
        for comp in &components {
            let darts: Vec<Dart> = comp.iter().flat_map(|&v| self.rotations[v].iter().copied()).collect();
            let chosen = match self.infinite {
                Some((d, side)) if comp.contains(&self.tail(d)) => Some(match side {
                    Side::Left => d,
                    Side::Right => d.opposite(),
                }),
                _ => darts.iter().min().copied(),
            };
            outer_raw.push(chosen.map(|d| raw_face_of[d.index()]));
        }
        // Face 0 is the infinite face of the component holding the Finf dart
        // (or of the first component with edges).
        let primary = self
            .infinite
            .and_then(|(d, _)| components.iter().position(|c| c.contains(&self.tail(d))))
            .or_else(|| outer_raw.iter().position(Option::is_some));
        let mut order: Vec<usize> = Vec::with_capacity(raw_walks.len());
        if let Some(p) = primary {
            if let Some(f) = outer_raw[p] {
                order.push(f);
            }
        }
        for f in 0..raw_walks.len() {
            if !order.contains(&f) {
                order.push(f);
            }
        }
        let mut relabel = vec![0; raw_walks.len()];
        for (new, &old) in order.iter().enumerate() {
            relabel[old] = new;
        }
        let faces: Vec<Vec<Dart>> = order.iter().map(|&f| raw_walks[f].clone()).collect();
        let face_of_dart: Vec<usize> = raw_face_of.iter().map(|&f| relabel[f]).collect();
        let outer_faces = outer_raw.iter().map(|o| o.map(|f| relabel[f])).collect();

        let (zigzags, zigzag_of_corner) = self.trace_zigzags();

        let angles = self
            .darts()
            .map(|x| {
                let next = self.next_cw(x);
                Angle {
                    corner: x,
                    vertex: self.tail(x),
                    face: face_of_dart[next.index()],
                    zigzag: zigzag_of_corner[x.index()],
                    edge_pair: (x.edge, next.edge),
                }
            })
            .collect();

        let incidences = (0..self.n_edges())
            .map(|e| {
                let d0 = Dart::new(e, 0);
                let d1 = Dart::new(e, 1);
                EdgeIncidence {
                    edge: e,
                    color: self.colors[e],
                    v1: self.tail(d0),
                    f1: face_of_dart[d0.index()],
                    z1: zigzag_of_corner[self.next_ccw(d0).index()],
                    v2: self.tail(d1),
                    f2: face_of_dart[d1.index()],
                    z2: zigzag_of_corner[d0.index()],
                }
            })
            .collect();

        Cells {
            faces,
            face_of_dart,
            outer_faces,
            zigzags,
            zigzag_of_corner,
            angles,
            incidences,
        }
    }

    /// Follows the medial link straight through every crossing.
    ///
    /// A corner `x` touches the crossings on `x.edge` (it is the corner right
    /// of `x` there) and on `next_cw(x).edge` (left of `next_cw(x)`). Leaving
    /// through the latter continues into the corner left of the opposite
    /// dart, which is entered from its clockwise side; the walk therefore
    /// alternates between the two kinds of exit.
    fn trace_zigzags(&self) -> (Vec<Vec<ZigzagStep>>, Vec<usize>) {
        let n_darts = 2 * self.n_edges();
        let mut zig_of = vec![usize::MAX; n_darts];
        let mut zigzags = Vec::new();
        for start in self.darts() {
            if zig_of[start.index()] != usize::MAX {
                continue;
            }
            let id = zigzags.len();
            let mut steps = Vec::new();
            let mut x = start;
            let mut exit_left = true;
            loop {
                if zig_of[x.index()] != usize::MAX {
                    debug_assert!(x == start && exit_left, "medial walk reversed on itself");
                    break;
                }
                zig_of[x.index()] = id;
                if exit_left {
                    let y = self.next_cw(x);
                    steps.push(ZigzagStep {
                        corner: x,
                        edge: y.edge,
                        strand: Strand::Left,
                        forward: y.end == 0,
                    });
                    x = self.next_ccw(y.opposite());
                } else {
                    steps.push(ZigzagStep {
                        corner: x,
                        edge: x.edge,
                        strand: Strand::Right,
                        forward: x.end == 0,
                    });
                    x = x.opposite();
                }
                exit_left = !exit_left;
            }
            zigzags.push(steps);
        }
        (zigzags, zig_of)
    }

    /// Vertices with no incident edge.
    pub fn edgeless_vertices(&self) -> Vec<usize> {
        (0..self.n_vertices()).filter(|&v| self.rotations[v].is_empty()).collect()
    }

    /// `-B`: every edge color switched.
    pub fn negate(&self) -> Blink {
        Blink {
            colors: self.colors.iter().map(|c| c.flipped()).collect(),
            ..self.clone()
        }
    }

    /// Plane dual. Dual vertex `i` is face `i` of this blink, so the old
    /// infinite face becomes dual vertex 0; the dual's infinite face is the
    /// one around old vertex 0.
    pub fn dual(&self) -> Result<Blink, BlinkError> {
        let comps = self.component_vertices();
        if comps.len() != 1 {
            return Err(BlinkError::Disconnected(comps.len()));
        }
        if self.n_edges() == 0 {
            return Ok(self.clone());
        }
        let cells = self.cells();
        let rotations: Vec<Vec<Dart>> = cells
            .faces
            .iter()
            .map(|walk| walk.iter().rev().copied().collect())
            .collect();
        let anchor = self.rotations[0][0];
        Blink::new(
            rotations,
            self.colors.clone(),
            Some((anchor.opposite(), Side::Left)),
        )
    }

    /// Connected components as standalone blinks (vertices renumbered in
    /// order, edges renumbered by first appearance).
    pub fn components(&self) -> Vec<Blink> {
        self.component_vertices()
            .into_iter()
            .map(|comp| self.sub_blink(&comp))
            .collect()
    }

    fn sub_blink(&self, vertices: &[usize]) -> Blink {
        let mut edge_map = vec![usize::MAX; self.n_edges()];
        let mut colors = Vec::new();
        let mut rotations = Vec::with_capacity(vertices.len());
        for &v in vertices {
            let mut rot = Vec::with_capacity(self.rotations[v].len());
            for &d in &self.rotations[v] {
                if edge_map[d.edge] == usize::MAX {
                    edge_map[d.edge] = colors.len();
                    colors.push(self.colors[d.edge]);
                }
                rot.push(Dart::new(edge_map[d.edge], d.end));
            }
            rotations.push(rot);
        }
        let infinite = self.infinite.and_then(|(d, side)| {
            (edge_map[d.edge] != usize::MAX).then(|| (Dart::new(edge_map[d.edge], d.end), side))
        });
        Blink::from_rotations(rotations, colors, infinite).expect("component of a valid blink")
    }

    /// Disjoint union; `other` is renumbered after `self`.
    pub fn disjoint_union(&self, other: &Blink) -> Blink {
        let dv = self.n_vertices();
        let de = self.n_edges();
        let _ = dv;
        let mut rotations = self.rotations.clone();
        rotations.extend(other.rotations.iter().map(|rot| {
            rot.iter().map(|d| Dart::new(d.edge + de, d.end)).collect::<Vec<_>>()
        }));
        let mut colors = self.colors.clone();
        colors.extend_from_slice(&other.colors);
        Blink::from_rotations(rotations, colors, self.infinite).expect("union of valid blinks")
    }

    /// Serializes in the blink v1 text format.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (v, rot) in self.rotations.iter().enumerate() {
            s.push_str(&format!("V {v} :"));
            for d in rot {
                s.push_str(&format!(" {d}"));
            }
            s.push('\n');
        }
        for (e, c) in self.colors.iter().enumerate() {
            s.push_str(&format!("E {e} {}\n", c.symbol()));
        }
        if let Some((d, side)) = self.infinite {
            let side = match side {
                Side::Left => 'L',
                Side::Right => 'R',
            };
            s.push_str(&format!("Finf {d} {side}\n"));
        }
        s
    }

    /// A relabeling that depends only on the map up to orientation-preserving
    /// isomorphism (colors included, infinite face ignored).
    pub fn canonical(&self) -> Blink {
        let mut parts: Vec<(Vec<u32>, Vec<Vec<Dart>>, Vec<EdgeColor>)> = self
            .components()
            .iter()
            .map(|c| c.canonical_component())
            .collect();
        parts.sort_by(|a, b| a.0.cmp(&b.0));
        let mut rotations = Vec::new();
        let mut colors = Vec::new();
        for (_, rots, cols) in parts {
            let off = colors.len();
            rotations.extend(
                rots.into_iter()
                    .map(|r| r.into_iter().map(|d| Dart::new(d.edge + off, d.end)).collect()),
            );
            colors.extend(cols);
        }
        Blink::from_rotations(rotations, colors, None).expect("relabeling of a valid blink")
    }

    /// Canonical text: [`Blink::canonical`] serialized.
    pub fn canonical_text(&self) -> String {
        self.canonical().to_text()
    }

    fn canonical_component(&self) -> (Vec<u32>, Vec<Vec<Dart>>, Vec<EdgeColor>) {
        if self.n_edges() == 0 {
            return (vec![0], vec![Vec::new(); self.n_vertices()], Vec::new());
        }
        let mut best: Option<(Vec<u32>, Vec<Vec<Dart>>, Vec<EdgeColor>)> = None;
        for root in self.darts() {
            let labeled = self.relabel_from(root);
            if best.as_ref().map_or(true, |b| labeled.0 < b.0) {
                best = Some(labeled);
            }
        }
        best.expect("component has darts")
    }

    fn relabel_from(&self, root: Dart) -> (Vec<u32>, Vec<Vec<Dart>>, Vec<EdgeColor>) {
        let mut new_of: Vec<Option<Dart>> = vec![None; 2 * self.n_edges()];
        let mut colors = Vec::new();
        let mut visited = vec![false; self.n_vertices()];
        let mut queue = VecDeque::new();
        visited[self.tail(root)] = true;
        queue.push_back(root);
        let mut rotations = Vec::new();
        let mut code = Vec::new();
        while let Some(entry) = queue.pop_front() {
            let v = self.tail(entry);
            let rot = &self.rotations[v];
            let start = self.position[entry.index()];
            let mut new_rot = Vec::with_capacity(rot.len());
            code.push(rot.len() as u32);
            for k in 0..rot.len() {
                let d = rot[(start + k) % rot.len()];
                if new_of[d.index()].is_none() {
                    let id = colors.len();
                    colors.push(self.colors[d.edge]);
                    new_of[d.index()] = Some(Dart::new(id, 0));
                    new_of[d.opposite().index()] = Some(Dart::new(id, 1));
                    let w = self.tail(d.opposite());
                    if !visited[w] {
                        visited[w] = true;
                        queue.push_back(d.opposite());
                    }
                }
                let nd = new_of[d.index()].expect("labeled above");
                code.push(nd.index() as u32);
                new_rot.push(nd);
            }
            rotations.push(new_rot);
        }
        code.extend(colors.iter().map(|c| *c as u32));
        (code, rotations, colors)
    }
}

/// Parses the blink v1 text format.
///
/// ```text
/// # comment
/// V 0 : 0+ 1- 1+
/// V 1 : 0-
/// E 0 b
/// E 1 g
/// Finf 0+ L
/// ```
pub fn parse_blink(text: &str) -> Result<Blink, BlinkError> {
    let mut vertices: Vec<Option<Vec<Dart>>> = Vec::new();
    let mut colors: Vec<Option<EdgeColor>> = Vec::new();
    let mut infinite = None;
    let mut max_edge: Option<usize> = None;

    for (ln, raw) in text.lines().enumerate() {
        let line_no = ln + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<(usize, &str)> = tokenize(content);
        let Some(&(col0, head)) = tokens.first() else {
            continue;
        };
        let syntax = |column: usize, message: String| BlinkError::Syntax {
            line: line_no,
            column,
            message,
        };
        match head {
            "V" => {
                let (c, id) = tokens
                    .get(1)
                    .ok_or_else(|| syntax(col0, "expected vertex id after `V`".into()))?;
                let vid: usize = id
                    .parse()
                    .map_err(|_| syntax(*c, format!("invalid vertex id `{id}`")))?;
                match tokens.get(2) {
                    Some((_, ":")) => {}
                    Some((c, t)) => return Err(syntax(*c, format!("expected `:`, found `{t}`"))),
                    None => return Err(syntax(c + id.len(), "expected `:`".into())),
                }
                let mut rot = Vec::new();
                for &(c, tok) in &tokens[3..] {
                    let d: Dart = tok.parse().map_err(|m| syntax(c, m))?;
                    max_edge = Some(max_edge.map_or(d.edge, |m: usize| m.max(d.edge)));
                    rot.push(d);
                }
                if vid >= vertices.len() {
                    vertices.resize(vid + 1, None);
                }
                if vertices[vid].is_some() {
                    return Err(BlinkError::DuplicateVertex(vid));
                }
                vertices[vid] = Some(rot);
            }
            "E" => {
                if tokens.len() != 3 {
                    return Err(syntax(col0, "expected `E <edge-id> <b|g>`".into()));
                }
                let (c, id) = tokens[1];
                let eid: usize = id
                    .parse()
                    .map_err(|_| syntax(c, format!("invalid edge id `{id}`")))?;
                let (c, col) = tokens[2];
                let color = match col {
                    "b" => EdgeColor::Black,
                    "g" => EdgeColor::Gray,
                    _ => return Err(syntax(c, format!("edge color must be `b` or `g`, found `{col}`"))),
                };
                if eid >= colors.len() {
                    colors.resize(eid + 1, None);
                }
                if colors[eid].is_some() {
                    return Err(syntax(col0, format!("edge {eid} declared twice")));
                }
                colors[eid] = Some(color);
            }
            "Finf" => {
                if tokens.len() != 3 {
                    return Err(syntax(col0, "expected `Finf <dart> <L|R>`".into()));
                }
                let (c, tok) = tokens[1];
                let d: Dart = tok.parse().map_err(|m| syntax(c, m))?;
                let (c, s) = tokens[2];
                let side = match s {
                    "L" => Side::Left,
                    "R" => Side::Right,
                    _ => return Err(syntax(c, format!("side must be `L` or `R`, found `{s}`"))),
                };
                infinite = Some((d, side));
            }
            other => return Err(syntax(col0, format!("unknown directive `{other}`"))),
        }
    }

    let rotations = vertices
        .into_iter()
        .enumerate()
        .map(|(v, r)| r.ok_or(BlinkError::MissingVertex(v)))
        .collect::<Result<Vec<_>, _>>()?;
    let n_edges = colors.len().max(max_edge.map_or(0, |m| m + 1));
    colors.resize(n_edges, None);
    let mut seen = vec![false; n_edges];
    for d in rotations.iter().flatten() {
        seen[d.edge] = true;
    }
    let colors = colors
        .into_iter()
        .enumerate()
        .map(|(e, c)| match (c, seen[e]) {
            (Some(c), true) => Ok(c),
            (None, true) => Err(BlinkError::MissingColor(e)),
            (_, false) => Err(BlinkError::UnknownEdge(e)),
        })
        .collect::<Result<Vec<_>, _>>()?;
    if let Some((d, _)) = infinite {
        if d.edge >= n_edges {
            return Err(BlinkError::UnknownEdge(d.edge));
        }
    }
    Blink::new(rotations, colors, infinite)
}

fn tokenize(s: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in s.char_indices() {
        if ch.is_whitespace() {
            if let Some(st) = start.take() {
                out.push((st + 1, &s[st..i]));
            }
        } else if ch == ':' {
            if let Some(st) = start.take() {
                out.push((st + 1, &s[st..i]));
            }
            out.push((i + 1, &s[i..i + 1]));
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(st) = start {
        out.push((st + 1, &s[st..]));
    }
    out
}

/// Small named blinks used throughout docs, tests and examples.
pub mod catalog {
    use super::*;

    fn d(e: usize, end: u8) -> Dart {
        Dart::new(e, end)
    }

    fn mono(n: usize, c: EdgeColor) -> Vec<EdgeColor> {
        vec![c; n]
    }

    /// `∘`: a single vertex with no edge (S²×S¹).
    pub fn isolated_vertex() -> Blink {
        Blink::new(vec![vec![]], vec![], None).unwrap()
    }

    /// One edge between two vertices (S³).
    pub fn single_edge(c: EdgeColor) -> Blink {
        Blink::new(vec![vec![d(0, 0)], vec![d(0, 1)]], vec![c], None).unwrap()
    }

    /// One vertex carrying one loop.
    pub fn single_loop(c: EdgeColor) -> Blink {
        Blink::new(vec![vec![d(0, 0), d(0, 1)]], vec![c], None).unwrap()
    }

    /// Two vertices joined by two parallel edges; monochromatic gives the
    /// 0-framed Hopf link.
    pub fn digon(c0: EdgeColor, c1: EdgeColor) -> Blink {
        Blink::new(
            vec![vec![d(0, 0), d(1, 0)], vec![d(0, 1), d(1, 1)]],
            vec![c0, c1],
            None,
        )
        .unwrap()
    }

    /// Path with `n` edges: an unknot with `n` curls, framing `±n`.
    pub fn path(n: usize, c: EdgeColor) -> Blink {
        let mut rots = vec![Vec::new(); n + 1];
        for e in 0..n {
            rots[e].push(d(e, 0));
            rots[e + 1].push(d(e, 1));
        }
        Blink::new(rots, mono(n, c), None).unwrap()
    }

    /// Cycle with `n` edges.
    pub fn cycle(colors: &[EdgeColor]) -> Blink {
        let n = colors.len();
        assert!(n >= 1);
        if n == 1 {
            return single_loop(colors[0]);
        }
        let rots = (0..n)
            .map(|v| vec![d(v, 0), d((v + n - 1) % n, 1)])
            .collect();
        Blink::new(rots, colors.to_vec(), None).unwrap()
    }

    /// Two vertices joined by `colors.len()` parallel edges.
    pub fn bond(colors: &[EdgeColor]) -> Blink {
        let n = colors.len();
        let r0 = (0..n).map(|e| d(e, 0)).collect();
        let r1 = (0..n).rev().map(|e| d(e, 1)).collect();
        Blink::new(vec![r0, r1], colors.to_vec(), None).unwrap()
    }

    /// The tetrahedron map K4.
    pub fn k4(colors: &[EdgeColor; 6]) -> Blink {
        Blink::new(
            vec![
                vec![d(0, 0), d(1, 0), d(2, 0)],
                vec![d(0, 1), d(4, 0), d(3, 0)],
                vec![d(1, 1), d(3, 1), d(5, 0)],
                vec![d(2, 1), d(5, 1), d(4, 1)],
            ],
            colors.to_vec(),
            None,
        )
        .unwrap()
    }

    /// The cube: 8 vertices, 12 edges, 6 faces, 4 zigzags.
    pub fn cube(c: EdgeColor) -> Blink {
        // Bottom square 0-1-2-3 (edges 0..4), top square 4-5-6-7 (edges
        // 4..8), verticals i -> i+4 (edges 8..12). Drawn with the top square
        // inside the bottom square.
        let rots = vec![
            vec![d(0, 0), d(8, 0), d(3, 1)],
            vec![d(1, 0), d(9, 0), d(0, 1)],
            vec![d(2, 0), d(10, 0), d(1, 1)],
            vec![d(3, 0), d(11, 0), d(2, 1)],
            vec![d(8, 1), d(4, 0), d(7, 1)],
            vec![d(9, 1), d(5, 0), d(4, 1)],
            vec![d(10, 1), d(6, 0), d(5, 1)],
            vec![d(11, 1), d(7, 0), d(6, 1)],
        ];
        Blink::new(rots, mono(12, c), None).unwrap()
    }
}
