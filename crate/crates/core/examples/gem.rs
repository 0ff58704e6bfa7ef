//! Build the gem of a blink, check it, and export triangulation codes.

use blinkwrt::blink::catalog;
use blinkwrt::gem::{blink_to_gem, gem_to_codes, parse_gem};
use blinkwrt::EdgeColor::Black;

fn main() {
    let b = catalog::cycle(&[Black, Black, Black]);
    let g = blink_to_gem(&b).unwrap();
    let c = g.counts();
    println!("{} vertices; v={} b={} t={}; v+t=b: {}", g.n_vertices(), c.v, c.b, c.t, c.gem_condition());
    println!("bipartite: {}, H1 = {}", g.is_bipartite(), g.homology());

    let text = g.to_text();
    assert_eq!(parse_gem(&text).unwrap(), g);
    println!("edge lines of the text form:");
    for line in text.lines().filter(|l| l.starts_with('e')).take(4) {
        println!("  {line}");
    }

    let codes = gem_to_codes(&g);
    println!("{} points, {} tetrahedra", codes.points.len(), codes.tetrahedra.len());
    let tet = codes.tetrahedra[0];
    let names: Vec<String> = tet.iter().map(|&i| codes.points[i].to_string()).collect();
    println!("first tetrahedron: {}", names.join(" < "));

    let handle = blink_to_gem(&catalog::isolated_vertex()).unwrap();
    println!("\nS2xS1 gem, H1 = {}:\n{}", handle.homology(), handle);
}
