//! Verlinde fusion rules of the A₃ orbifold, written with the usual names
//! V_Q^±, α/2^±, λ₁, T₁^±, T₂^±. Degenerate examples refuse, by design.
//!
//!     cargo run --example fusion

use orbichar::builtin;
use orbichar::characters::classify;
use orbichar::transforms::{s_coefficients, verlinde_fusion};

const NAMES: [&str; 9] = ["V+", "V-", "l1", "a/2+", "a/2-", "T1+", "T1-", "T2+", "T2-"];

fn main() -> orbichar::Result<()> {
    let (l, s) = builtin::a3()?;
    let c = classify(&l, &s)?;
    let order = builtin::a3_reference_order(&c);
    let name_of = |idx: usize| NAMES[order.iter().position(|&o| o == idx).unwrap()];
    let f = verlinde_fusion(&s_coefficients(&c)?, c.vacuum())?;
    for (a, &i) in order.iter().enumerate() {
        for &j in &order[a..] {
            let rhs: Vec<String> = f
                .product(i, j)
                .into_iter()
                .map(|(k, m)| if m == 1 { name_of(k).to_string() } else { format!("{m}{}", name_of(k)) })
                .collect();
            println!("{:>5} x {:<5} = {}", name_of(i), name_of(j), rhs.join(" + "));
        }
    }

    let (l, s) = builtin::d4()?;
    let c = classify(&l, &s)?;
    match verlinde_fusion(&s_coefficients(&c)?, c.vacuum()) {
        Ok(_) => println!("D4: unexpected success"),
        Err(e) => println!("D4: {e}"),
    }
    Ok(())
}
