//! Classify the irreducible modules of each built-in orbifold and list
//! their conformal weights.
//!
//!     cargo run --example classify

use orbichar::builtin;
use orbichar::characters::{classify, conformal_weight};

fn main() -> orbichar::Result<()> {
    for name in builtin::NAMES {
        let (l, s) = builtin::by_name(name, 3, 1)?;
        let c = classify(&l, &s)?;
        println!("{name}: {}", c.summary());
        for label in &c.labels {
            println!("    {label:<20} h = {}", conformal_weight(&c, label)?);
        }
    }
    Ok(())
}
