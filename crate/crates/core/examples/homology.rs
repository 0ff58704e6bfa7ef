//! First homology from the linking matrix, and the Smith form behind it.

use blinkwrt::blink::catalog;
use blinkwrt::homology::{h1_from_linking, homology, mat_mul, smith_normal_form, to_big};
use blinkwrt::EdgeColor::{Black, Gray};

fn main() {
    for (name, b) in [
        ("edge", catalog::single_edge(Black)),
        ("vertex", catalog::isolated_vertex()),
        ("bbb cycle", catalog::cycle(&[Black, Black, Black])),
        ("bgbg bond", catalog::bond(&[Black, Gray, Black, Gray])),
        ("cube", catalog::cube(Black)),
    ] {
        println!("{name:<10} H1 = {}", homology(&b));
    }

    let l = vec![vec![2, 1, 0], vec![1, -3, 1], vec![0, 1, 4]];
    println!("\nL = {l:?}: H1 = {}", h1_from_linking(&l));
    let m = to_big(&l);
    let s = smith_normal_form(&m);
    assert_eq!(mat_mul(&mat_mul(&s.u, &m), &s.v), s.d);
    let diag: Vec<String> = s.diagonal().iter().map(|x| x.to_string()).collect();
    println!("Smith diagonal [{}]", diag.join(", "));
}
