//! S- and T-matrices of the A₃ orbifold by its diagram automorphism, printed
//! in the basis χ₀^±, χ_{Λ₁}, χ_{Λ₂}^±, χ₀^{σ,±}, χ_{α₂/2}^{σ,±}.
//!
//!     cargo run --example a3_modular_data

use orbichar::builtin;
use orbichar::characters::classify;
use orbichar::cli::fmt_complex;
use orbichar::transforms::{s_coefficients, t_matrix};

fn main() -> orbichar::Result<()> {
    let (l, s) = builtin::a3()?;
    let c = classify(&l, &s)?;
    let order = builtin::a3_reference_order(&c);
    let smat = s_coefficients(&c)?;
    let tmat = t_matrix(&c);

    println!("4·S =");
    for &i in &order {
        let row: Vec<String> = order.iter().map(|&j| format!("{:>7.4}", (smat.entries[i][j] * 4.0).re)).collect();
        println!("  {}", row.join(" "));
    }
    println!("unitarity residual {:.2e}", smat.unitarity_residual());

    // T relative to the vacuum phase e^{−πi/4}
    let vac = tmat.entries[order[0]][order[0]];
    println!("T / e^(-pi i/4) = diag(");
    for &i in &order {
        println!("  {:<16} {}", c.labels[i].to_string(), fmt_complex(tmat.entries[i][i] / vac));
    }
    println!(")");
    Ok(())
}
