//! Exact q-expansions and numeric values of the orbifold characters of
//! Q̄(A₂) under the root swap, with the exact/numeric cross-check.
//!
//!     cargo run --example characters

use num_complex::Complex64;
use orbichar::builtin;
use orbichar::characters::{char_orbifold, char_orbifold_qexpansion, classify};
use orbichar::modular::{ModularPoint, SeriesTolerance};

fn main() -> orbichar::Result<()> {
    let (l, s) = builtin::a2bar()?;
    let c = classify(&l, &s)?;
    let tau = Complex64::new(0.05, 1.1);
    let tol = SeriesTolerance::new(1e-14);
    for label in &c.labels {
        let series = char_orbifold_qexpansion(&c, label, 12)?;
        let numeric = char_orbifold(&c, label, &ModularPoint::new(tau), &tol)?;
        let shown: Vec<String> = series
            .terms
            .iter()
            .take(5)
            .map(|(e, x)| format!("{}·q^{e}", x.as_rational().map(|r| r.to_string()).unwrap_or_else(|| format!("{x:?}"))))
            .collect();
        println!("{label:<18} {} + …", shown.join(" + "));
        // The truncated series already agrees with the direct evaluation to many digits.
        println!("{:<18} series {:.10}  direct {:.10}", "", series.evaluate(tau), numeric);
    }
    Ok(())
}
