//! Permutation orbifolds of Q₀ = Zα (|α|² = 2t): module counts against the
//! closed formula and the constants c₀ entering the twisted S-block.
//!
//!     cargo run --example permutation -- 3 4

use orbichar::builtin;
use orbichar::characters::classify;
use orbichar::transforms::v_constants;

fn main() -> orbichar::Result<()> {
    let mut args = std::env::args().skip(1);
    let p: u32 = args.next().and_then(|a| a.parse().ok()).unwrap_or(3);
    let tmax: i64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(3);
    for t in 1..=tmax {
        let (l, s) = builtin::perm(p, t)?;
        let c = classify(&l, &s)?;
        let n0 = 2 * t;
        let pi = p as i64;
        let expected = (n0.pow(p) + (pi.pow(3) - 1) * n0) / pi;
        let v = v_constants(&c)?;
        println!(
            "p={p} t={t}: {}   closed formula {expected}   c0 = {:.6}",
            c.summary(),
            v.c_beta0
        );
    }
    Ok(())
}
