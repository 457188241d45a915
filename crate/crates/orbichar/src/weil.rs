//! SL₂(ℤ) words and the Weil representation of an even lattice's
//! discriminant form, used to transform theta functions under arbitrary
//! modular matrices one generator at a time.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::BigRational;

use crate::error::{OrbiError, Result};
use crate::lattice::*;
use crate::linalg::*;
use crate::modular::{e2pi, epi, I};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Generator {
    /// τ ↦ τ + n
    T(i64),
    /// τ ↦ −1/τ
    S,
}

/// Write `[[a, b], [c, d]]` as a product of generators, up to sign:
/// the matrix acts on the upper half-plane as `W₁ ∘ W₂ ∘ … ∘ Wₙ`.
pub fn sl2_word(a: i64, b: i64, c: i64, d: i64) -> Result<Vec<Generator>> {
    if a * d - b * c != 1 {
        return Err(OrbiError::Validation(format!("det [[{a},{b}],[{c},{d}]] ≠ 1")));
    }
    let (mut a, mut b, mut c, mut d) = (a, b, c, d);
    let mut word = Vec::new();
    while c != 0 {
        // 0 ≤ a − nc < |c|, so |c| strictly decreases.
        let n = a.div_euclid(c);
        // A = Tⁿ S · (S⁻¹ T⁻ⁿ A)
        word.push(Generator::T(n));
        word.push(Generator::S);
        let (a1, b1) = (a - n * c, b - n * d);
        (a, b, c, d) = (c, d, -a1, -b1);
    }
    // Now A = ±[[1, b·d], [0, 1]].
    word.push(Generator::T(b * d));
    word.retain(|g| *g != Generator::T(0));
    Ok(word)
}

pub fn mobius(g: Generator, tau: Complex64) -> Complex64 {
    match g {
        Generator::T(n) => tau + n as f64,
        Generator::S => -1.0 / tau,
    }
}

pub fn apply_word(word: &[Generator], tau: Complex64) -> Complex64 {
    word.iter().rev().fold(tau, |t, g| mobius(*g, t))
}

pub type CMat = Vec<Vec<Complex64>>;

pub fn cmul(a: &CMat, b: &CMat) -> CMat {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    let mut out = vec![vec![Complex64::new(0.0, 0.0); m]; n];
    for i in 0..n {
        for l in 0..k {
            let x = a[i][l];
            if x.norm_sqr() == 0.0 {
                continue;
            }
            for j in 0..m {
                out[i][j] += x * b[l][j];
            }
        }
    }
    out
}

/// The Weil representation on ℂ[L*/L]: ρ(T) = diag e^{πi|γ|²},
/// ρ(S)_{γδ} = |L*/L|^{−1/2} e^{−2πi(γ|δ)}, normalised so that the theta
/// vector Θ_γ = θ_{γ+L} satisfies Θ(−1/τ) = (−iτ)^{r/2} ρ(S) Θ(τ).
#[derive(Debug, Clone)]
pub struct WeilRep {
    pub lattice: Lattice,
    pub disc: DiscriminantGroup,
    pub keys: Vec<CosetKey>,
    pub reps: Vec<QVec>,
    pub norms: Vec<BigRational>,
    index: BTreeMap<CosetKey, usize>,
}

impl WeilRep {
    pub fn new(lattice: Lattice) -> Self {
        let disc = discriminant_group(&lattice);
        let keys = disc.quotient.keys();
        let reps: Vec<QVec> = keys.iter().map(|k| disc.rep(k).0).collect();
        let norms = reps.iter().map(|v| lattice.form().norm(v)).collect();
        let index = keys.iter().enumerate().map(|(i, k)| (k.clone(), i)).collect();
        WeilRep { lattice, disc, keys, reps, norms, index }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    /// Index of the coset containing `v` (in lattice coordinates).
    pub fn index_of(&self, v: &[BigRational]) -> Option<usize> {
        let k = self.disc.quotient.key(v)?;
        self.index.get(&k).copied()
    }

    pub fn rho(&self, g: Generator) -> CMat {
        let n = self.len();
        match g {
            Generator::T(m) => (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| if i == j { epi(&(&self.norms[i] * rat(m, 1))) } else { Complex64::new(0.0, 0.0) })
                        .collect()
                })
                .collect(),
            Generator::S => {
                let s = 1.0 / (n as f64).sqrt();
                (0..n)
                    .map(|i| {
                        (0..n)
                            .map(|j| e2pi(&-self.lattice.form().pair(&self.reps[i], &self.reps[j])) * s)
                            .collect()
                    })
                    .collect()
            }
        }
    }

    pub fn rho_word(&self, word: &[Generator]) -> CMat {
        let n = self.len();
        let mut m: CMat =
            (0..n).map(|i| (0..n).map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect()).collect();
        for g in word {
            m = cmul(&m, &self.rho(*g));
        }
        m
    }

    /// Automorphy factor J with Θ(Aτ) = J(τ)·ρ(A)Θ(τ), the product of
    /// (−iw)^{r/2} over the S steps (principal branch at every step).
    pub fn automorphy(&self, word: &[Generator], tau: Complex64) -> Complex64 {
        let r = self.lattice.rank() as i32;
        let mut w = tau;
        let mut j = Complex64::new(1.0, 0.0);
        for g in word.iter().rev() {
            if *g == Generator::S {
                j *= (-I * w).sqrt().powi(r);
            }
            w = mobius(*g, w);
        }
        j
    }
}
