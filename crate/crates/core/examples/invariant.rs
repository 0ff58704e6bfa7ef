//! kappa_r of a few small manifolds for r = 3..8.

use blinkwrt::algebra::AlgebraTables;
use blinkwrt::blink::catalog;
use blinkwrt::statesum::kappa_with;
use blinkwrt::EdgeColor::{Black, Gray};

fn main() {
    let blinks = [
        ("sphere", catalog::single_edge(Black)),
        ("S2xS1", catalog::isolated_vertex()),
        ("L(3,1)", catalog::cycle(&[Black, Black, Black])),
        ("cube", catalog::cube(Gray)),
    ];
    for r in 3..=8 {
        let t = AlgebraTables::new(r).unwrap();
        for (name, b) in &blinks {
            let k = kappa_with(b, &t).unwrap();
            let (m, a) = k.polar();
            println!(
                "r={r} {name:<7} |kappa|={m:.9} arg/pi={a:+.9} states={} ({:.1} ms)",
                k.admissible_states,
                k.elapsed.as_secs_f64() * 1e3
            );
        }
    }
    let t = AlgebraTables::new(5).unwrap();
    let b = &blinks[2].1;
    println!("\n{}", kappa_with(b, &t).unwrap().to_json("L(3,1)"));
}
