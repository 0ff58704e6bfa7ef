//! Parse a blink from text and look at the maps derived from it.

use blinkwrt::parse_blink;

const THETA: &str = "\
V 0 : 0+ 1+ 2+
V 1 : 0- 2- 1-
E 0 b
E 1 b
E 2 g
";

fn main() {
    let b = parse_blink(THETA).expect("valid blink");
    println!("{} vertices, {} edges, {} faces", b.n_vertices(), b.n_edges(), b.faces().len());
    println!("zigzags (link components): {}", b.zigzags().len());
    for (i, f) in b.faces().iter().enumerate() {
        println!("  face {i}: {} darts", f.len());
    }

    let neg = b.negate();
    let dual = b.dual().unwrap();
    println!("\nnegated:\n{}", neg.to_text());
    println!("dual:\n{}", dual.to_text());
    println!("canonical form of the original:\n{}", b.canonical_text());
    assert_eq!(dual.dual().unwrap().canonical_text(), b.canonical_text());
}
