//! The blackboard-framed link drawn by a blink.
//!
//! Every zigzag of the blink is one link component and every edge carries one
//! crossing. Draw an edge with `e+` pointing east: the [`Strand::Left`]
//! strand runs NW–SE and the [`Strand::Right`] strand SW–NE. A black edge
//! puts the NW–SE strand on top, a gray edge the other one. (Rotated so the
//! edge is vertical, black puts the NE–SW strand on top.) With this choice the
//! black single-edge blink is the unknot with writhe -1.
//!
//! A crossing is positive when turning the over-strand direction a quarter
//! turn counterclockwise gives the under-strand direction.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::blink::{Blink, Dart, EdgeColor, Strand, ZigzagStep};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FlinkError {
    #[error("strand directions {over:?} and {under:?} do not form a crossing")]
    DegenerateCrossing { over: (i8, i8), under: (i8, i8) },
    #[error("components {0} and {1} cross an odd number of times")]
    OddLinking(usize, usize),
    #[error("expected {expected} orientation flags, got {got}")]
    OrientationCount { expected: usize, got: usize },
}

/// One component of the framed link.
#[derive(Clone, Debug, Serialize)]
pub struct Component {
    /// Zigzag of the blink traced by this component, if any.
    pub zigzag: Option<usize>,
    /// Edgeless vertex encircled by this component, if any.
    pub vertex: Option<usize>,
    /// True when the component runs against its zigzag's first traversal.
    pub reversed: bool,
    /// Passages through crossings in the component's direction.
    #[serde(skip)]
    pub steps: Vec<ZigzagStep>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Crossing {
    pub edge: usize,
    pub color: EdgeColor,
    pub over: usize,
    pub under: usize,
    /// Unit diagonal directions in the frame where `e+` points east.
    pub over_dir: (i8, i8),
    pub under_dir: (i8, i8),
    pub sign: i8,
    /// Corners around the crossing, counterclockwise from NW.
    #[serde(skip)]
    pub quadrants: [Dart; 4],
    /// Planar-diagram code: arc labels counterclockwise from the incoming
    /// under-strand.
    pub pd: [usize; 4],
}

#[derive(Clone, Debug, Serialize)]
pub struct FlinkDiagram {
    pub components: Vec<Component>,
    pub crossings: Vec<Crossing>,
    pub linking_matrix: Vec<Vec<i64>>,
}

impl FlinkDiagram {
    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    /// Self-writhes, i.e. the blackboard framings.
    pub fn framings(&self) -> Vec<i64> {
        (0..self.n_components()).map(|i| self.linking_matrix[i][i]).collect()
    }

    pub fn signature(&self) -> i64 {
        signature(&self.linking_matrix)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let components: Vec<_> = self
            .components
            .iter()
            .enumerate()
            .map(|(i, c)| {
                serde_json::json!({
                    "index": i,
                    "zigzag": c.zigzag,
                    "vertex": c.vertex,
                    "passages": c.steps.len(),
                })
            })
            .collect();
        let crossings: Vec<_> = self
            .crossings
            .iter()
            .map(|x| {
                serde_json::json!({
                    "edge": x.edge,
                    "over": x.over,
                    "under": x.under,
                    "sign": x.sign,
                    "pd": x.pd,
                })
            })
            .collect();
        serde_json::json!({
            "components": components,
            "crossings": crossings,
            "linking_matrix": self.linking_matrix,
            "framings": self.framings(),
        })
    }
}

/// `+1` iff the over direction turned a quarter counterclockwise is the
/// under direction.
pub fn crossing_sign(over: (i8, i8), under: (i8, i8)) -> Result<i8, FlinkError> {
    let unit = |d: (i8, i8)| d.0.abs() == 1 && d.1.abs() == 1;
    let turned = (-over.1, over.0);
    if !unit(over) || !unit(under) {
        return Err(FlinkError::DegenerateCrossing { over, under });
    }
    if turned == under {
        Ok(1)
    } else if (-turned.0, -turned.1) == under {
        Ok(-1)
    } else {
        Err(FlinkError::DegenerateCrossing { over, under })
    }
}

fn step_dir(s: &ZigzagStep) -> (i8, i8) {
    match (s.strand, s.forward) {
        (Strand::Left, true) => (1, -1),
        (Strand::Left, false) => (-1, 1),
        (Strand::Right, true) => (1, 1),
        (Strand::Right, false) => (-1, -1),
    }
}

/// Builds the framed link with every component in its first-traversal
/// direction.
pub fn build_flink(b: &Blink) -> FlinkDiagram {
    let n = b.zigzags().len() + b.edgeless_vertices().len();
    build_flink_oriented(b, &vec![false; n]).expect("default orientation is consistent")
}

/// Builds the framed link, reversing the components flagged in `reversed`
/// (zigzags first, then edgeless vertices).
pub fn build_flink_oriented(b: &Blink, reversed: &[bool]) -> Result<FlinkDiagram, FlinkError> {
    let zigzags = b.zigzags();
    let lone = b.edgeless_vertices();
    let n = zigzags.len() + lone.len();
    if reversed.len() != n {
        return Err(FlinkError::OrientationCount {
            expected: n,
            got: reversed.len(),
        });
    }

    // Arcs of the diagram are the corners; number them along each component.
    let mut arc_of_corner = vec![0usize; 2 * b.n_edges()];
    let mut next_arc = 1;
    let mut components = Vec::with_capacity(n);
    for (z, steps) in zigzags.iter().enumerate() {
        let mut oriented = steps.clone();
        if reversed[z] {
            // Reversed: leave each corner through the other edge, in reverse order.
            let len = steps.len();
            oriented = (0..len)
                .map(|k| {
                    let s = &steps[len - 1 - k];
                    let from = &steps[(2 * len - k) % len];
                    ZigzagStep {
                        corner: from.corner,
                        edge: s.edge,
                        strand: s.strand,
                        forward: !s.forward,
                    }
                })
                .collect();
        }
        for s in &oriented {
            arc_of_corner[s.corner.index()] = next_arc;
            next_arc += 1;
        }
        components.push(Component {
            zigzag: Some(z),
            vertex: None,
            reversed: reversed[z],
            steps: oriented,
        });
    }
    for (k, &v) in lone.iter().enumerate() {
        components.push(Component {
            zigzag: None,
            vertex: Some(v),
            reversed: reversed[zigzags.len() + k],
            steps: Vec::new(),
        });
    }

    // For each edge and strand: (component, direction, incoming arc, outgoing arc).
    let mut passage: Vec<[Option<(usize, (i8, i8), usize, usize)>; 2]> = vec![[None; 2]; b.n_edges()];
    for (ci, comp) in components.iter().enumerate() {
        let len = comp.steps.len();
        for (k, s) in comp.steps.iter().enumerate() {
            let next = &comp.steps[(k + 1) % len];
            let slot = match s.strand {
                Strand::Left => 0,
                Strand::Right => 1,
            };
            passage[s.edge][slot] = Some((
                ci,
                step_dir(s),
                arc_of_corner[s.corner.index()],
                arc_of_corner[next.corner.index()],
            ));
        }
    }

    let mut crossings = Vec::with_capacity(b.n_edges());
    for (e, pass) in passage.iter().enumerate() {
        let left = pass[0].expect("every edge is crossed by a Left strand");
        let right = pass[1].expect("every edge is crossed by a Right strand");
        let color = b.color(e);
        let (over, under) = match color {
            EdgeColor::Black => (left, right),
            EdgeColor::Gray => (right, left),
        };
        let sign = crossing_sign(over.1, under.1)?;
        let at = |dir: (i8, i8)| {
            if dir == under.1 {
                under.3
            } else if dir == (-under.1 .0, -under.1 .1) {
                under.2
            } else if dir == over.1 {
                over.3
            } else {
                over.2
            }
        };
        let ccw = |d: (i8, i8)| (-d.1, d.0);
        let start = (-under.1 .0, -under.1 .1);
        let p1 = ccw(start);
        let p2 = ccw(p1);
        let p3 = ccw(p2);
        let d0 = Dart::new(e, 0);
        let d1 = Dart::new(e, 1);
        crossings.push(Crossing {
            edge: e,
            color,
            over: over.0,
            under: under.0,
            over_dir: over.1,
            under_dir: under.1,
            sign,
            quadrants: [b.next_ccw(d0), d0, b.next_ccw(d1), d1],
            pd: [under.2, at(p1), at(p2), at(p3)],
        });
    }

    let mut doubled = vec![vec![0i64; n]; n];
    for x in &crossings {
        if x.over == x.under {
            doubled[x.over][x.over] += 2 * x.sign as i64;
        } else {
            doubled[x.over][x.under] += x.sign as i64;
            doubled[x.under][x.over] += x.sign as i64;
        }
    }
    let mut linking_matrix = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            if doubled[i][j] % 2 != 0 {
                return Err(FlinkError::OddLinking(i.min(j), i.max(j)));
            }
            linking_matrix[i][j] = doubled[i][j] / 2;
        }
    }

    Ok(FlinkDiagram {
        components,
        crossings,
        linking_matrix,
    })
}

/// Linking matrix with the default orientations.
pub fn linking_matrix(b: &Blink) -> Vec<Vec<i64>> {
    build_flink(b).linking_matrix
}

/// Positive minus negative eigenvalue count of a symmetric integer matrix,
/// by exact congruence diagonalization over the rationals.
pub fn signature(m: &[Vec<i64>]) -> i64 {
    let n = m.len();
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .map(|row| row.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect())
        .collect();
    let mut active: Vec<usize> = (0..n).collect();
    let mut sig = 0i64;
    while !active.is_empty() {
        let pivot = active.iter().position(|&i| !a[i][i].is_zero());
        let p = match pivot {
            Some(k) => active[k],
            None => {
                // Zero diagonal: add row/column j to i where a[i][j] != 0.
                let pair = active.iter().enumerate().find_map(|(ki, &i)| {
                    active[ki + 1..].iter().find(|&&j| !a[i][j].is_zero()).map(|&j| (i, j))
                });
                let Some((i, j)) = pair else { break };
                for k in 0..n {
                    let v = a[j][k].clone();
                    a[i][k] += v;
                }
                for k in 0..n {
                    let v = a[k][j].clone();
                    a[k][i] += v;
                }
                i
            }
        };
        let d = a[p][p].clone();
        sig += if d.is_positive() { 1 } else { -1 };
        active.retain(|&i| i != p);
        for &i in &active {
            if a[i][p].is_zero() {
                continue;
            }
            let f = &a[i][p] / &d;
            for &k in &active {
                let v = &f * &a[p][k];
                a[i][k] -= v;
            }
        }
        for &i in &active {
            a[i][p] = BigRational::zero();
            a[p][i] = BigRational::zero();
        }
    }
    sig
}

/// Planar-diagram code and Dehn-filling coefficients.
pub fn export_pd(f: &FlinkDiagram) -> String {
    let mut out = String::new();
    for x in &f.crossings {
        let _ = writeln!(out, "X[{},{},{},{}]", x.pd[0], x.pd[1], x.pd[2], x.pd[3]);
    }
    for w in f.framings() {
        let _ = writeln!(out, "({w}, 1)");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::blink::catalog::*;
    use EdgeColor::*;

    #[test]
    fn sign_rule() {
        assert_eq!(crossing_sign((1, 1), (-1, 1)), Ok(1));
        assert_eq!(crossing_sign((1, 1), (1, -1)), Ok(-1));
        assert!(crossing_sign((1, 1), (-1, -1)).is_err());
        assert!(crossing_sign((1, 0), (0, 1)).is_err());
    }

    #[test]
    fn single_edge_is_unknot_with_one_curl() {
        let f = build_flink(&single_edge(Black));
        assert_eq!(f.n_components(), 1);
        assert_eq!(f.crossings.len(), 1);
        assert_eq!(f.linking_matrix, vec![vec![-1]]);
        assert_eq!(build_flink(&single_edge(Gray)).linking_matrix, vec![vec![1]]);
    }

    #[test]
    fn isolated_vertex_is_zero_framed_unknot() {
        let f = build_flink(&isolated_vertex());
        assert_eq!(f.n_components(), 1);
        assert!(f.crossings.is_empty());
        assert_eq!(f.linking_matrix, vec![vec![0]]);
        assert_eq!(export_pd(&f), "(0, 1)\n");
    }

    #[test]
    fn disjoint_loops_diagonal() {
        let b = single_loop(Black).disjoint_union(&single_loop(Gray));
        let l = build_flink(&b).linking_matrix;
        assert_eq!(l.len(), 2);
        assert_eq!((l[0][1], l[1][0]), (0, 0));
    }

    #[test]
    fn hopf_link() {
        let f = build_flink(&digon(Black, Black));
        assert_eq!(f.n_components(), 2);
        assert_eq!(f.linking_matrix[0][1].abs(), 1);
        assert_eq!(f.linking_matrix[0][0], 0);
        assert_eq!(export_pd(&f).lines().filter(|l| l.starts_with('X')).count(), 2);
    }

    #[test]
    fn recolor_negates_sign() {
        for b in [cube(Black), k4(&[Black, Gray, Gray, Black, Black, Gray])] {
            let f = build_flink(&b);
            let g = build_flink(&b.negate());
            for (x, y) in f.crossings.iter().zip(&g.crossings) {
                assert_eq!(x.sign, -y.sign);
            }
        }
    }

    #[test]
    fn reversing_a_strand_negates_sign() {
        let b = cube(Black);
        let f = build_flink(&b);
        let mut flags = vec![false; f.n_components()];
        flags[0] = true;
        let g = build_flink_oriented(&b, &flags).unwrap();
        for (x, y) in f.crossings.iter().zip(&g.crossings) {
            let touched = (x.over == 0) as u8 + (x.under == 0) as u8;
            if touched == 1 {
                assert_eq!(x.sign, -y.sign);
            } else {
                assert_eq!(x.sign, y.sign);
            }
        }
        assert_eq!(f.signature(), g.signature());
    }

    #[test]
    fn signature_examples() {
        assert_eq!(signature(&[vec![1]]), 1);
        assert_eq!(signature(&[vec![0]]), 0);
        assert_eq!(signature(&[vec![2, 1], vec![1, -3]]), 0);
        assert_eq!(signature(&[vec![0, 1], vec![1, 0]]), 0);
        assert_eq!(signature(&[]), 0);
        assert_eq!(signature(&[vec![0, 0], vec![0, 0]]), 0);
        assert_eq!(signature(&[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, -4]]), -1);
    }

    #[test]
    fn pd_labels_each_arc_twice() {
        let f = build_flink(&cube(Gray));
        let mut count = [0; 25];
        for x in &f.crossings {
            for a in x.pd {
                count[a] += 1;
            }
        }
        assert!(count[1..].iter().all(|&c| c == 2));
    }
}
