//! Quantum integers, loop values and 6j-type coefficients at one level.

use blinkwrt::algebra::AlgebraTables;

fn main() {
    let r = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let t = AlgebraTables::new(r).unwrap();
    println!("r = {r}, labels 0..={}, A = {}", t.n_labels() - 1, t.a_pow(1));
    for n in 0..t.n_labels() {
        println!("  [{}] = {:>9.6}   Delta_{n} = {:>9.6}", n + 1, t.qint(n + 1), t.delta(n));
    }
    let mut admissible = Vec::new();
    for a in 0..t.n_labels() {
        for b in a..t.n_labels() {
            for c in b..t.n_labels() {
                if t.is_admissible(a, b, c) {
                    admissible.push((a, b, c));
                }
            }
        }
    }
    println!("{} admissible triples (up to order)", admissible.len());
    for &(a, b, c) in admissible.iter().take(6) {
        println!("  theta({a},{b},{c}) = {:.6}  lambda = {:.6}", t.theta(a, b, c), t.lambda(a, b, c));
    }
    println!("Tet[1 1 2; 1 1 0] = {:.6}", t.tet(1, 1, 1, 1, 2, 0));
}
