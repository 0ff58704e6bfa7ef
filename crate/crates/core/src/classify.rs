//! Grouping blinks by first homology and `kappa_3 .. kappa_n`.
//!
//! Blinks whose invariants agree after rounding share a class. Inside a class
//! the classifier also marks the pairs `(B, -B*)`, which induce the same
//! manifold.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::AlgebraTables;
use crate::blink::{parse_blink, Blink};
use crate::homology::homology;
use crate::statesum::{kappa_with, polar_form};

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("r_max must be at least 3, got {0}")]
    BadRange(u32),
    #[error("could not start a pool of {workers} workers: {message}")]
    Pool { workers: usize, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Algebra(#[from] crate::algebra::AlgebraError),
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub id: String,
    pub blink: Blink,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Skipped {
    pub id: String,
    pub error: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ClassifyParams {
    pub r_min: u32,
    pub r_max: u32,
    /// Decimals kept in the moduli and angles of the key.
    pub round: u32,
}

impl ClassifyParams {
    pub fn new(r_max: u32, round: u32) -> Self {
        ClassifyParams { r_min: 3, r_max, round }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct RoundedKappa {
    pub r: u32,
    #[serde(rename = "mod")]
    pub modulus: String,
    pub angle_over_pi: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct InvariantKey {
    pub homology: String,
    pub kappas: Vec<RoundedKappa>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HgqiClass {
    pub key: InvariantKey,
    pub members: Vec<String>,
    pub pairs: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub params: ClassifyParams,
    pub classes: Vec<HgqiClass>,
    pub skipped: Vec<Skipped>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    /// One line per class: index, homology, size, members separated by `;`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("class,homology,size,members\n");
        for (i, c) in self.classes.iter().enumerate() {
            let _ = writeln!(s, "{},{},{},{}", i, c.key.homology, c.members.len(), c.members.join(";"));
        }
        s
    }
}

/// Fixed-point text with `digits` decimals and no negative zero.
pub fn round_str(x: f64, digits: u32) -> String {
    let s = format!("{:.*}", digits as usize, x);
    match s.strip_prefix('-') {
        Some(rest) if rest.bytes().all(|c| c == b'0' || c == b'.') => rest.to_string(),
        _ => s,
    }
}

fn rounded_polar(r: u32, z: num_complex::Complex64, digits: u32) -> RoundedKappa {
    let (m, a) = polar_form(z);
    let modulus = round_str(m, digits);
    let zero = round_str(0.0, digits);
    let angle = if modulus == zero {
        zero
    } else {
        // -1 and 1 are the same angle
        let a = round_str(a, digits);
        if a == round_str(-1.0, digits) {
            round_str(1.0, digits)
        } else {
            a
        }
    };
    RoundedKappa { r, modulus, angle_over_pi: angle }
}

/// The classification key of one blink.
pub fn invariant_key(b: &Blink, tables: &[AlgebraTables], digits: u32) -> Result<InvariantKey, String> {
    let mut kappas = Vec::with_capacity(tables.len());
    for t in tables {
        let k = kappa_with(b, t).map_err(|e| e.to_string())?;
        kappas.push(rounded_polar(t.r(), k.kappa, digits));
    }
    Ok(InvariantKey { homology: homology(b).to_string(), kappas })
}

/// Canonical text of `-B*`, or `None` when the dual is undefined.
fn negated_dual(b: &Blink) -> Option<String> {
    b.dual().ok().map(|d| d.negate().canonical_text())
}

/// Classifies `corpus` on a pool of `workers` threads. The report depends
/// only on the corpus order and `params`.
pub fn classify(
    corpus: &[CorpusEntry],
    params: ClassifyParams,
    workers: usize,
) -> Result<Report, ClassifyError> {
    if params.r_max < 3 {
        return Err(ClassifyError::BadRange(params.r_max));
    }
    let tables: Vec<AlgebraTables> =
        (params.r_min..=params.r_max).map(AlgebraTables::new).collect::<Result<_, _>>()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| ClassifyError::Pool { workers, message: e.to_string() })?;
    let computed: Vec<Result<(InvariantKey, String, Option<String>), String>> = pool.install(|| {
        corpus
            .par_iter()
            .map(|entry| {
                let key = invariant_key(&entry.blink, &tables, params.round)?;
                Ok((key, entry.blink.canonical_text(), negated_dual(&entry.blink)))
            })
            .collect()
    });

    let mut classes: Vec<HgqiClass> = Vec::new();
    let mut class_of: HashMap<InvariantKey, usize> = HashMap::new();
    let mut member_data: Vec<Vec<(String, Option<String>)>> = Vec::new();
    let mut skipped = Vec::new();
    for (entry, result) in corpus.iter().zip(computed) {
        match result {
            Ok((key, canon, neg_dual)) => {
                let idx = *class_of.entry(key.clone()).or_insert_with(|| {
                    classes.push(HgqiClass { key, members: Vec::new(), pairs: Vec::new() });
                    member_data.push(Vec::new());
                    classes.len() - 1
                });
                classes[idx].members.push(entry.id.clone());
                member_data[idx].push((canon, neg_dual));
            }
            Err(error) => skipped.push(Skipped { id: entry.id.clone(), error }),
        }
    }
    for (class, data) in classes.iter_mut().zip(&member_data) {
        for i in 0..data.len() {
            for j in i..data.len() {
                let matches = |a: usize, b: usize| data[b].1.as_deref() == Some(data[a].0.as_str());
                if matches(i, j) || matches(j, i) {
                    class.pairs.push((class.members[i].clone(), class.members[j].clone()));
                }
            }
        }
    }
    Ok(Report { params, classes, skipped })
}

/// Reads every `*.blink` file of `dir`, in file name order; the id is the
/// file stem. Files that fail to parse are returned as skipped.
pub fn load_corpus(dir: &Path) -> Result<(Vec<CorpusEntry>, Vec<Skipped>), ClassifyError> {
    let io = |e: std::io::Error| ClassifyError::Io { path: dir.display().to_string(), source: e };
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "blink"))
        .collect();
    paths.sort();
    let mut corpus = Vec::new();
    let mut skipped = Vec::new();
    for p in paths {
        let id = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        let text = std::fs::read_to_string(&p)
            .map_err(|e| ClassifyError::Io { path: p.display().to_string(), source: e })?;
        match parse_blink(&text) {
            Ok(blink) => corpus.push(CorpusEntry { id, blink }),
            Err(e) => skipped.push(Skipped { id, error: e.to_string() }),
        }
    }
    Ok((corpus, skipped))
}
