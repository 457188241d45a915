//! Drive the pipeline from a JSON job spec, here A₂ with its order-3
//! rotation α₁ ↦ α₂ ↦ −α₁ − α₂.
//!
//!     cargo run --example custom_spec

use orbichar::characters::classify;
use orbichar::cli::parse_spec;
use orbichar::transforms::{dimensions, s_coefficients, t_matrix, verify_transforms};

const SPEC: &str = r#"{
  "name": "a2-rotation",
  "gram": [[2, -1], [-1, 2]],
  "isometry": [[0, -1], [1, -1]],
  "options": {"tol": 1e-9, "taus": [{"re": 0.0, "im": 1.0}, {"re": 0.1, "im": 1.3}]}
}"#;

fn main() -> orbichar::Result<()> {
    let spec = parse_spec(SPEC)?;
    let (l, s) = spec.build()?;
    let c = classify(&l, &s)?;
    println!("{}: {}", spec.name, c.summary());
    let d = dimensions(&c);
    for (label, q) in c.labels.iter().zip(&d.quantum) {
        println!("  {label:<18} qdim {q:.6}");
    }
    let taus: Vec<_> = spec.options.taus.unwrap().iter().map(|z| num_complex::Complex64::new(z.re, z.im)).collect();
    let smat = s_coefficients(&c)?;
    let rep = verify_transforms(&c, &smat, &t_matrix(&c), &taus, 1e-13, spec.options.tol.unwrap())?;
    println!("certified: {} (max S residual {:.1e})", rep.pass, rep.max_s_residual);
    Ok(())
}
