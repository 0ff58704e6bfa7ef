//! Quantum invariants of closed, oriented 3-manifolds presented by blinks.
//!
//! A blink is a plane graph with edges colored black or gray. Its medial
//! graph, with crossings chosen by the edge colors, is a blackboard-framed
//! link, and the blink stands for the 3-manifold obtained by surgery on it.
//!
//! The crate computes, for a root of unity of order `4r`, the normalized
//! state-sum invariant `kappa_r`, together with the framed link, its linking
//! matrix and signature, first homology, a colored 4-regular graph (gem)
//! model, and a classifier that groups blinks sharing all these invariants.
//!
//! ```
//! use blinkwrt::blink::catalog;
//! use blinkwrt::statesum::kappa;
//! use blinkwrt::EdgeColor;
//!
//! let s3 = catalog::single_edge(EdgeColor::Black);
//! let k = kappa(&s3, 5).unwrap();
//! let eta = blinkwrt::algebra::Level::new(5).unwrap().eta();
//! assert!((k.kappa.re - eta).abs() < 1e-12 && k.kappa.im.abs() < 1e-12);
//! ```

pub mod algebra;
pub mod blink;
pub mod classify;
pub mod flink;
pub mod gem;
pub mod homology;
pub mod statesum;

pub use blink::{parse_blink, Blink, BlinkError, Dart, EdgeColor};
