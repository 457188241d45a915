//! Asymptotic and quantum dimensions, one line per module type, for every
//! built-in example and a few permutation orbifolds.
//!
//!     cargo run --example dimensions

use orbichar::builtin;
use orbichar::characters::{classify, OrbifoldModuleLabel};
use orbichar::transforms::dimensions;

fn main() -> orbichar::Result<()> {
    let mut cases: Vec<(String, u32, i64)> = ["a2bar", "a3", "d4"].iter().map(|n| (n.to_string(), 3, 1)).collect();
    for (p, t) in [(2, 1), (3, 1), (3, 2), (5, 1)] {
        cases.push(("perm".into(), p, t));
    }
    for (name, p, t) in cases {
        let (l, s) = builtin::by_name(&name, p, t)?;
        let c = classify(&l, &s)?;
        let d = dimensions(&c);
        let first = |k: usize| c.labels.iter().position(|x| x.kind() == k);
        let tag = if name == "perm" { format!("perm(p={p}, t={t})") } else { name.clone() };
        print!("{tag:<16} order {}:", c.data.p);
        for (k, tag) in [(1, "Type1"), (2, "Type2"), (3, "Type3")] {
            if let Some(i) = first(k) {
                print!("  {tag} asdim {:.6} qdim {:.6}", d.asymptotic[i], d.quantum[i]);
            }
        }
        let vac = c.vacuum();
        assert!(matches!(c.labels[vac], OrbifoldModuleLabel::Type1 { j: 0, .. }));
        println!();
    }
    Ok(())
}
