//! Certify χ(−1/τ) = Σ S χ(τ) and χ(τ+1) = T χ(τ) for every built-in example.
//!
//!     cargo run --release --example verify

use orbichar::builtin;
use orbichar::characters::classify;
use orbichar::transforms::{default_taus, s_coefficients, t_matrix, verify_transforms};

fn main() -> orbichar::Result<()> {
    for (name, p, t) in [("a2bar", 2, 1), ("a3", 2, 1), ("d4", 3, 1), ("perm", 3, 1), ("perm", 5, 1)] {
        let (l, s) = builtin::by_name(name, p, t)?;
        let c = classify(&l, &s)?;
        let smat = s_coefficients(&c)?;
        let rep = verify_transforms(&c, &smat, &t_matrix(&c), &default_taus(), 1e-12, 1e-8)?;
        println!(
            "{name:<6} p={p}: {:>3} labels  S {:.1e}  T {:.1e}  sum rule {:.1e}  degenerate {}  {}",
            c.len(),
            rep.max_s_residual,
            rep.max_t_residual,
            rep.sum_rule_residual,
            smat.degenerate,
            if rep.pass { "PASS" } else { "FAIL" }
        );
    }
    Ok(())
}
