//! The blackboard framed link of a blink: crossings, linking matrix, PD code.

use blinkwrt::blink::catalog;
use blinkwrt::flink::{build_flink, build_flink_oriented, export_pd};
use blinkwrt::EdgeColor::{Black, Gray};

fn main() {
    let b = catalog::k4(&[Black, Gray, Black, Gray, Black, Black]);
    let f = build_flink(&b);
    println!("{} components, {} crossings", f.n_components(), f.crossings.len());
    println!("framings {:?}", f.framings());
    for row in &f.linking_matrix {
        println!("  {row:?}");
    }
    println!("signature {}", f.signature());

    // reversing a component flips the signs of its off-diagonal entries only
    let mut rev = vec![false; f.n_components()];
    rev[0] = true;
    let g = build_flink_oriented(&b, &rev).unwrap();
    println!("with component 0 reversed: {:?}, signature {}", g.linking_matrix[0], g.signature());

    println!("\n{}", export_pd(&f));
}
