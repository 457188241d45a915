//! The four worked examples shipped with the crate.

use crate::characters::{permutation_lattice, Classification, OrbifoldModuleLabel};
use crate::error::{OrbiError, Result};
use crate::isometry::{new_isometry, Isometry};
use crate::lattice::{new_lattice, Lattice};

pub const NAMES: [&str; 4] = ["a2bar", "a3", "d4", "perm"];

/// Q̄ for A₂ under the swap of its simple roots: Zα ⊕ Zβ with α = α₁ + α₂
/// (norm 2, fixed) and β = α₁ − α₂ (norm 6, negated).
pub fn a2bar() -> Result<(Lattice, Isometry)> {
    let l = new_lattice(vec![vec![2, 0], vec![0, 6]])?;
    let s = new_isometry(&l, vec![vec![1, 0], vec![0, -1]])?;
    Ok((l, s))
}

/// A₃ with the Dynkin diagram automorphism α₁ ↔ α₃.
pub fn a3() -> Result<(Lattice, Isometry)> {
    let l = new_lattice(vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]])?;
    let s = new_isometry(&l, vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]])?;
    Ok((l, s))
}

/// D₄ (α₂ the central node) with the triality 3-cycle α₁ → α₃ → α₄ → α₁.
pub fn d4() -> Result<(Lattice, Isometry)> {
    let l = new_lattice(vec![vec![2, -1, 0, 0], vec![-1, 2, -1, -1], vec![0, -1, 2, 0], vec![0, -1, 0, 2]])?;
    let s = new_isometry(&l, vec![vec![0, 0, 0, 1], vec![0, 1, 0, 0], vec![1, 0, 0, 0], vec![0, 0, 1, 0]])?;
    Ok((l, s))
}

/// p copies of Q₀ = Zα with |α|² = 2t, permuted cyclically.
pub fn perm(p: u32, t: i64) -> Result<(Lattice, Isometry)> {
    if t < 1 {
        return Err(OrbiError::Validation(format!("t must be positive, got {t}")));
    }
    let q0 = new_lattice(vec![vec![2 * t]])?;
    permutation_lattice(&q0, p)
}

pub fn by_name(name: &str, p: u32, t: i64) -> Result<(Lattice, Isometry)> {
    match name {
        "a2bar" => a2bar(),
        "a3" => a3(),
        "d4" => d4(),
        "perm" => perm(p, t),
        other => Err(OrbiError::Validation(format!(
            "unknown example '{other}' (expected one of {})",
            NAMES.join(", ")
        ))),
    }
}

/// Label indices of the A₃ orbifold in the order used in the literature:
/// χ₀^±, χ_{Λ₁}, χ_{Λ₂}^±, χ₀^{σ,±}, χ_{α₂/2}^{σ,±}.
pub fn a3_reference_order(c: &Classification) -> Vec<usize> {
    let mut untwisted_fixed = Vec::new();
    let mut free = Vec::new();
    let mut twisted = Vec::new();
    for (i, l) in c.labels.iter().enumerate() {
        match l {
            OrbifoldModuleLabel::Type1 { .. } => untwisted_fixed.push(i),
            OrbifoldModuleLabel::Type2 { .. } => free.push(i),
            OrbifoldModuleLabel::Type3 { .. } => twisted.push(i),
        }
    }
    // Labels are sorted so that the zero coset (and μ = 0) comes first and j = 0 precedes j = 1.
    let mut out = untwisted_fixed[..2].to_vec();
    out.extend(&free);
    out.extend(&untwisted_fixed[2..]);
    out.extend(&twisted);
    out
}
