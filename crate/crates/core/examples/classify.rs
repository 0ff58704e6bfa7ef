//! Group a handful of blinks by homology and kappa_3..kappa_6.

use blinkwrt::blink::catalog;
use blinkwrt::classify::{classify, ClassifyParams, CorpusEntry};
use blinkwrt::EdgeColor::{Black, Gray};

fn main() {
    let corpus = [
        ("edge_b", catalog::single_edge(Black)),
        ("edge_g", catalog::single_edge(Gray)),
        ("loop_b", catalog::single_loop(Black)),
        ("cycle_bbb", catalog::cycle(&[Black, Black, Black])),
        ("cycle_ggg", catalog::cycle(&[Gray, Gray, Gray])),
        ("bond_bbb", catalog::bond(&[Black, Black, Black])),
        ("vertex", catalog::isolated_vertex()),
    ];
    let entries: Vec<CorpusEntry> =
        corpus.into_iter().map(|(id, blink)| CorpusEntry { id: id.into(), blink }).collect();
    let report = classify(&entries, ClassifyParams::new(6, 9), 2).unwrap();
    for class in &report.classes {
        println!("H1={:<4} {:?}", class.key.homology, class.members);
        for (a, b) in &class.pairs {
            println!("      {a} and {b} are negated duals");
        }
    }
    print!("\n{}", report.to_csv());
}
