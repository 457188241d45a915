//! Classification of the irreducible modules of a prime-order lattice
//! orbifold and their characters.
//!
//! Every character is assembled from three building blocks:
//!
//! * `U₀(λ) = θ_{λ+Q}/ηʳ` — the untwisted trace of the identity;
//! * `U'(λ) = θ_{λ'+M}/P_{1,σ}` — the untwisted trace of σᵏ (k ≠ 0), where
//!   λ' is a σ-fixed representative of λ + Q (the trace vanishes if none exists);
//! * `X_k(μ) = d·e^{−πik|μ|²}·θ_{μ+π₀Q}(τ+k)/P_{σ,σᵏ}(τ)` — the σ-twisted trace of σᵏ.
//!
//! Type 1 and Type 3 characters are projector averages of these over k;
//! Type 2 characters are plain untwisted traces.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{OrbiError, Result};
use crate::isometry::*;
use crate::lattice::*;
use crate::linalg::*;
use crate::modular::*;
use crate::qseries::{Cyc, QSeries, Ring};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum OrbifoldModuleLabel {
    /// σ-stable coset λ + Q and eigenvalue ωʲ of σ.
    Type1 { lambda: CosetKey, j: u32 },
    /// Canonical representative of a free σ-orbit of cosets.
    Type2 { gamma: CosetKey },
    /// σˡ-twisted module over μ + π₀(Q), central character index ζ, eigenvalue ωʲ.
    Type3 { mu: CosetKey, zeta: u32, l: u32, j: u32 },
}

impl OrbifoldModuleLabel {
    pub fn kind(&self) -> usize {
        match self {
            OrbifoldModuleLabel::Type1 { .. } => 1,
            OrbifoldModuleLabel::Type2 { .. } => 2,
            OrbifoldModuleLabel::Type3 { .. } => 3,
        }
    }
}

fn fmt_key(k: &[u64]) -> String {
    if k.is_empty() {
        return "(0)".into();
    }
    let parts: Vec<String> = k.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

impl fmt::Display for OrbifoldModuleLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OrbifoldModuleLabel::Type1 { lambda, j } => write!(f, "V{}^{}", fmt_key(lambda), j),
            OrbifoldModuleLabel::Type2 { gamma } => write!(f, "V{}", fmt_key(gamma)),
            OrbifoldModuleLabel::Type3 { mu, zeta, l, j } => {
                write!(f, "W{}[z{},s^{}]^{}", fmt_key(mu), zeta, l, j)
            }
        }
    }
}

/// Everything the character and transformation formulas need about (Q, σ).
#[derive(Debug, Clone)]
pub struct OrbifoldData {
    pub sigma: Isometry,
    pub p: u32,
    pub eigen: EigenData,
    pub delta: BigRational,
    pub defect: u64,
    pub z_mu: u64,
    pub disc: DiscriminantGroup,
    pub fixed_cosets: Vec<CosetKey>,
    pub orbit_reps: Vec<CosetKey>,
    /// Minimal-norm representative of every coset of Q*/Q.
    pub coset_reps: BTreeMap<CosetKey, QVec>,
    /// A σ-fixed representative of each σ-stable coset, if one exists.
    pub fixed_reps: BTreeMap<CosetKey, Option<QVec>>,
    /// M = Q ∩ 𝔥₀
    pub m: Sublattice,
    pub pi_q: Sublattice,
    pub pi_qdual: Sublattice,
    /// Q* ∩ 𝔥₀
    pub qdual_fixed: Sublattice,
    /// π₀(Q*)/π₀(Q)
    pub twisted: FiniteQuotient,
    /// Minimal-norm representative of each coset μ + π₀(Q).
    pub mu_reps: BTreeMap<CosetKey, QVec>,
}

impl OrbifoldData {
    pub fn rank(&self) -> usize {
        self.sigma.rank()
    }

    pub fn lattice(&self) -> &Lattice {
        self.sigma.lattice()
    }

    pub fn norm(&self, v: &[BigRational]) -> BigRational {
        self.lattice().form().norm(v)
    }

    pub fn pair(&self, a: &[BigRational], b: &[BigRational]) -> BigRational {
        self.lattice().form().pair(a, b)
    }

    /// |M*/M|
    pub fn m_disc(&self) -> BigRational {
        self.m.discriminant()
    }

    /// |π₀(Q)/M|
    pub fn pi_index(&self) -> u64 {
        index_of(&self.pi_q, &self.m)
    }
}

#[derive(Debug, Clone)]
pub struct Classification {
    pub labels: Vec<OrbifoldModuleLabel>,
    /// Number of labels of Type 1, 2, 3.
    pub counts: [usize; 3],
    pub data: OrbifoldData,
}

impl Classification {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, label: &OrbifoldModuleLabel) -> Option<usize> {
        self.labels.iter().position(|x| x == label)
    }

    pub fn vacuum(&self) -> usize {
        let zero = vec![0u64; self.data.disc.orders.len()];
        self.index_of(&OrbifoldModuleLabel::Type1 { lambda: zero, j: 0 }).expect("vacuum label")
    }

    pub fn summary(&self) -> String {
        format!(
            "{} modules ({} Type1, {} Type2, {} Type3)",
            self.labels.len(),
            self.counts[0],
            self.counts[1],
            self.counts[2]
        )
    }
}

/// Minimal-norm element of the coset `v + sub`, ties broken lexicographically
/// in the sublattice coordinates.
pub fn min_norm_rep(sub: &Sublattice, v: &[BigRational]) -> QVec {
    if sub.rank() == 0 {
        return v.to_vec();
    }
    let form = sub.form();
    let c = sub.coords_of(v).expect("vector in the span of the sublattice");
    let bound = form.norm(&c);
    let en = enumerate_coset(&form, &c, &bound, DEFAULT_ENUMERATION_CAP).expect("small bound");
    let best = (0..en.len()).min_by_key(|&i| en.norm_num[i]).expect("the shift itself qualifies");
    sub.to_ambient(&en.vector(best))
}

/// A σ-fixed element of λ + Q, found by solving (1 − π₀)γ = −(1 − π₀)λ over ℤ.
fn fixed_representative(s: &Isometry, lambda: &[BigRational]) -> Option<QVec> {
    let r = s.rank();
    let p = fixed_projector(s);
    let gens: QMat = (0..r)
        .map(|i| (0..r).map(|a| rat(i64::from(a == i), 1) - &p[a][i]).collect())
        .collect();
    let perp_part: QVec = (0..r)
        .map(|a| lambda[a].clone() - (0..r).map(|b| &p[a][b] * &lambda[b]).sum::<BigRational>())
        .collect();
    let target: QVec = perp_part.iter().map(|x| -x).collect();
    let c = integer_combination(&gens, &target)?;
    let x: QVec = lambda.iter().zip(&c).map(|(a, b)| a + rat_int(b)).collect();
    debug_assert_eq!(s.apply(&x), x);
    Some(x)
}

/// Classify the irreducible V_Q^σ-modules for σ of prime order.
pub fn classify(l: &Lattice, s: &Isometry) -> Result<Classification> {
    if s.lattice() != l {
        return Err(OrbiError::DimensionMismatch { expected: l.rank(), got: s.rank() });
    }
    let p = s.prime_order()?;
    if p == 2 && index_of(&l.as_sublattice(), &qbar_sublattice(s)) != 1 {
        return Err(OrbiError::QbarMismatch);
    }
    let disc = discriminant_group(l);
    let od = orbit_decomposition(s)?;
    let qs = l.as_sublattice();
    let coset_reps: BTreeMap<CosetKey, QVec> =
        disc.quotient.keys().into_iter().map(|k| (k.clone(), min_norm_rep(&qs, &disc.rep(&k).0))).collect();
    let m = fixed_sublattice(s);
    let fixed_reps = od
        .fixed
        .iter()
        .map(|k| {
            let rep = fixed_representative(s, &coset_reps[k]).map(|x| min_norm_rep(&m, &x));
            (k.clone(), rep)
        })
        .collect();
    let pi_q = projected_lattice(s, Which::Q);
    let pi_qdual = projected_lattice(s, Which::QDual);
    let twisted = FiniteQuotient::new(&pi_qdual, &pi_q)?;
    let mu_reps = twisted.keys().into_iter().map(|k| (k.clone(), min_norm_rep(&pi_q, &twisted.rep(&k)))).collect();
    let data = OrbifoldData {
        sigma: s.clone(),
        p,
        eigen: s.eigen_data(),
        delta: delta_sigma(s),
        defect: defect(s)?,
        z_mu: z_mu_cardinality(s)?,
        disc,
        fixed_cosets: od.fixed,
        orbit_reps: od.orbits,
        coset_reps,
        fixed_reps,
        m,
        pi_q,
        pi_qdual,
        qdual_fixed: fixed_dual_sublattice(s),
        twisted,
        mu_reps,
    };

    let mut labels = Vec::new();
    for lam in &data.fixed_cosets {
        for j in 0..p {
            labels.push(OrbifoldModuleLabel::Type1 { lambda: lam.clone(), j });
        }
    }
    for g in &data.orbit_reps {
        labels.push(OrbifoldModuleLabel::Type2 { gamma: g.clone() });
    }
    for mu in data.mu_reps.keys() {
        for zeta in 1..=data.z_mu as u32 {
            for l in 1..p {
                for j in 0..p {
                    labels.push(OrbifoldModuleLabel::Type3 { mu: mu.clone(), zeta, l, j });
                }
            }
        }
    }
    labels.sort();
    let pu = p as usize;
    let counts = [
        pu * data.fixed_cosets.len(),
        data.orbit_reps.len(),
        pu * (pu - 1) * data.z_mu as usize * data.mu_reps.len(),
    ];
    debug_assert_eq!(counts.iter().sum::<usize>(), labels.len());
    Ok(Classification { labels, counts, data })
}

/// Q = Q₀^{⊕p} with the cyclic shift of the summands.
pub fn permutation_lattice(q0: &Lattice, p: u32) -> Result<(Lattice, Isometry)> {
    if !is_prime(p) {
        return Err(OrbiError::NotPrime(p));
    }
    let r0 = q0.rank();
    let n = r0 * p as usize;
    let mut gram = vec![vec![0i64; n]; n];
    let mut u = vec![vec![0i64; n]; n];
    for b in 0..p as usize {
        for i in 0..r0 {
            for j in 0..r0 {
                gram[b * r0 + i][b * r0 + j] = q0.gram()[i][j];
            }
            // σ e_{(b,i)} = e_{(b+1,i)}
            u[((b + 1) % p as usize) * r0 + i][b * r0 + i] = 1;
        }
    }
    let l = new_lattice(gram)?;
    let s = new_isometry(&l, u)?;
    Ok((l, s))
}

pub fn permutation_orbifold(q0: &Lattice, p: u32) -> Result<(Lattice, Isometry, Classification)> {
    let (l, s) = permutation_lattice(q0, p)?;
    let c = classify(&l, &s)?;
    Ok((l, s, c))
}

// ---------------------------------------------------------------------------
// Numeric building blocks

/// Pairing vector w with (γ|h) = Σ cᵢwᵢ for γ = Σ cᵢbᵢ in the basis of `sub`.
fn pairing_for(sub: &Sublattice, h: Option<&Vec<Complex64>>) -> Option<Vec<Complex64>> {
    let h = h?;
    let g = sub.ambient_gram();
    Some(
        sub.basis()
            .iter()
            .map(|b| {
                let mut acc = Complex64::zero();
                for (a, ba) in b.iter().enumerate() {
                    let ba = ba.to_f64().unwrap();
                    for (c, hc) in h.iter().enumerate() {
                        acc += hc * ba * g[a][c].to_f64().unwrap();
                    }
                }
                acc
            })
            .collect(),
    )
}

fn theta_on(sub: &Sublattice, shift: &[BigRational], tau: Complex64, h: Option<&Vec<Complex64>>, tol: &SeriesTolerance) -> Result<Complex64> {
    if sub.rank() == 0 {
        return Ok(Complex64::one());
    }
    let c = sub.coords_of(shift).ok_or(OrbiError::NotProjected)?;
    let w = pairing_for(sub, h);
    Ok(theta_paired(&sub.form(), &c, tau, Complex64::zero(), w.as_deref(), tol)?.value)
}

/// U₀(λ) = θ_{λ+Q}(τ, h)/ηʳ.
fn block_u0(d: &OrbifoldData, lambda: &[BigRational], pt: &ModularPoint, tol: &SeriesTolerance) -> Result<Complex64> {
    let th = theta_on(&d.lattice().as_sublattice(), lambda, pt.tau, pt.z.as_ref(), tol)?;
    Ok(th / p_denominator(&d.sigma, 0, 0, pt.tau, tol)?)
}

/// U'(λ) = θ_{λ'+M}(τ, h)/P_{1,σ} for a σ-fixed representative λ'.
fn block_u1(d: &OrbifoldData, fixed_rep: &Option<QVec>, pt: &ModularPoint, tol: &SeriesTolerance) -> Result<Complex64> {
    match fixed_rep {
        None => Ok(Complex64::zero()),
        Some(x) => Ok(theta_on(&d.m, x, pt.tau, pt.z.as_ref(), tol)? / p_denominator(&d.sigma, 0, 1, pt.tau, tol)?),
    }
}

/// X_k(μ) = d·e^{−πik|μ|²}·θ_{μ+π₀Q}(τ+k, h)/P_{σ,σᵏ}(τ).
fn block_x(d: &OrbifoldData, mu: &[BigRational], k: u32, pt: &ModularPoint, tol: &SeriesTolerance) -> Result<Complex64> {
    let th = theta_on(&d.pi_q, mu, pt.tau + k as f64, pt.z.as_ref(), tol)?;
    let phase = epi(&(-d.norm(mu) * rat(k as i64, 1)));
    Ok(phase * d.defect as f64 * th / p_denominator(&d.sigma, 1, k, pt.tau, tol)?)
}

fn omega(p: u32, k: i64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * k.rem_euclid(p as i64) as f64 / p as f64)
}

/// χ^{1,σᵏ}_{V_{λ+Q}}: the trace of σᵏ on the untwisted module V_{λ+Q}.
pub fn char_untwisted_trace(c: &Classification, lambda: &DualVector, k: u32, pt: &ModularPoint, tol: &SeriesTolerance) -> Result<Complex64> {
    let d = &c.data;
    let k = k % d.p;
    if !d.lattice().is_dual(lambda) {
        return Err(OrbiError::NotSublattice);
    }
    if k == 0 {
        return block_u0(d, &lambda.0, pt, tol);
    }
    let img = d.sigma.apply(&lambda.0);
    let diff: QVec = lambda.0.iter().zip(&img).map(|(a, b)| a - b).collect();
    if !is_integral(&diff) {
        return Err(OrbiError::InvalidTwist);
    }
    let rep = fixed_representative(&d.sigma, &lambda.0);
    block_u1(d, &rep, pt, tol)
}

/// χ^{σˡ,σᵏ}_{W(μ)}: reduces to the σ-twisted trace of σ^{k·l⁻¹}.
pub fn char_twisted_trace(c: &Classification, mu: &DualVector, l: u32, k: u32, pt: &ModularPoint, tol: &SeriesTolerance) -> Result<Complex64> {
    let d = &c.data;
    let p = d.p;
    if l.is_multiple_of(p) {
        return Err(OrbiError::InvalidTwist);
    }
    if !d.pi_qdual.contains(&mu.0) {
        return Err(OrbiError::NotProjected);
    }
    let keff = ((k % p) as u64 * modinv(l as u64, p as u64) % p as u64) as u32;
    block_x(d, &mu.0, keff, pt, tol)
}

/// Numeric values of all building blocks at one point.
#[derive(Debug, Clone)]
pub struct BlockValues {
    pub u0: BTreeMap<CosetKey, Complex64>,
    pub u1: BTreeMap<CosetKey, Complex64>,
    /// x[μ][k] = X_k(μ)
    pub x: BTreeMap<CosetKey, Vec<Complex64>>,
}

pub fn evaluate_blocks(d: &OrbifoldData, pt: &ModularPoint, tol: &SeriesTolerance) -> Result<BlockValues> {
    let u0 = d
        .coset_reps
        .par_iter()
        .map(|(k, v)| Ok((k.clone(), block_u0(d, v, pt, tol)?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    let u1 = d
        .fixed_reps
        .par_iter()
        .map(|(k, v)| Ok((k.clone(), block_u1(d, v, pt, tol)?)))
        .collect::<Result<BTreeMap<_, _>>>()?;
    let x = d
        .mu_reps
        .par_iter()
        .map(|(k, v)| {
            let row = (0..d.p).map(|kk| block_x(d, v, kk, pt, tol)).collect::<Result<Vec<_>>>()?;
            Ok((k.clone(), row))
        })
        .collect::<Result<BTreeMap<_, _>>>()?;
    Ok(BlockValues { u0, u1, x })
}

fn combine(d: &OrbifoldData, label: &OrbifoldModuleLabel, b: &BlockValues) -> Complex64 {
    let p = d.p;
    match label {
        OrbifoldModuleLabel::Type1 { lambda, j } => {
            let mut acc = b.u0[lambda];
            for k in 1..p {
                acc += omega(p, (*j * k) as i64) * b.u1[lambda];
            }
            acc / p as f64
        }
        OrbifoldModuleLabel::Type2 { gamma } => b.u0[gamma],
        OrbifoldModuleLabel::Type3 { mu, j, .. } => {
            let xs = &b.x[mu];
            (0..p).map(|k| omega(p, (*j * k) as i64) * xs[k as usize]).sum::<Complex64>() / p as f64
        }
    }
}

/// Value of one orbifold character.
pub fn char_orbifold(c: &Classification, label: &OrbifoldModuleLabel, pt: &ModularPoint, tol: &SeriesTolerance) -> Result<Complex64> {
    let d = &c.data;
    let p = d.p;
    match label {
        OrbifoldModuleLabel::Type1 { lambda, j } => {
            let u0 = block_u0(d, &d.coset_reps[lambda], pt, tol)?;
            let u1 = block_u1(d, &d.fixed_reps[lambda], pt, tol)?;
            let s: Complex64 = (1..p).map(|k| omega(p, (*j * k) as i64)).sum();
            Ok((u0 + s * u1) / p as f64)
        }
        OrbifoldModuleLabel::Type2 { gamma } => block_u0(d, &d.coset_reps[gamma], pt, tol),
        OrbifoldModuleLabel::Type3 { mu, j, .. } => {
            let v = &d.mu_reps[mu];
            let mut acc = Complex64::zero();
            for k in 0..p {
                acc += omega(p, (*j * k) as i64) * block_x(d, v, k, pt, tol)?;
            }
            Ok(acc / p as f64)
        }
    }
}

/// Values of every character, in label order.
pub fn char_all(c: &Classification, pt: &ModularPoint, tol: &SeriesTolerance) -> Result<Vec<Complex64>> {
    let b = evaluate_blocks(&c.data, pt, tol)?;
    Ok(c.labels.iter().map(|l| combine(&c.data, l, &b)).collect())
}

// ---------------------------------------------------------------------------
// Exact q-expansions

fn theta_series_on(sub: &Sublattice, shift: &[BigRational], trunc: &BigRational) -> Result<QSeries<BigInt>> {
    if sub.rank() == 0 {
        return Ok(QSeries::monomial(BigRational::zero(), BigInt::one(), trunc.clone()));
    }
    let c = sub.coords_of(shift).ok_or(OrbiError::NotProjected)?;
    theta_qseries(&sub.form(), &c, trunc)
}

fn to_cyc(s: &QSeries<BigInt>, p: usize) -> QSeries<Cyc> {
    s.map(|x| Cyc::from_rational(p, rat_int(x)), s.truncation.clone())
}

/// θ-series ÷ P-series, exact below absolute exponent `trunc`.
fn quotient(num: impl Fn(&BigRational) -> Result<QSeries<Cyc>>, den: impl Fn(&BigRational) -> Result<QSeries<Cyc>>, trunc: &BigRational, lead: &BigRational) -> Result<QSeries<Cyc>> {
    let tn = trunc + lead;
    let pad = trunc + lead + lead.abs() + rat(1, 1);
    let n = num(&tn)?;
    let dd = den(&pad)?;
    let (_, c0) = dd.leading().expect("denominator has leading term 1");
    debug_assert!(c0.as_rational() == Some(BigRational::one()));
    let p = c0.order();
    let q = n.div_by(&dd, &Cyc::from_int(p, 1));
    Ok(q.truncate(trunc))
}

fn series_u0(d: &OrbifoldData, lambda: &[BigRational], trunc: &BigRational) -> Result<QSeries<Cyc>> {
    let p = d.p as usize;
    let lead = rat(d.rank() as i64, 24);
    let qs = d.lattice().as_sublattice();
    quotient(
        |t| Ok(to_cyc(&theta_series_on(&qs, lambda, t)?, p)),
        |t| p_denominator_qseries(&d.sigma, 0, 0, t),
        trunc,
        &lead,
    )
}

fn series_u1(d: &OrbifoldData, fixed_rep: &Option<QVec>, trunc: &BigRational) -> Result<QSeries<Cyc>> {
    let p = d.p as usize;
    match fixed_rep {
        None => Ok(QSeries::new(trunc.clone())),
        Some(x) => quotient(
            |t| Ok(to_cyc(&theta_series_on(&d.m, x, t)?, p)),
            |t| p_denominator_qseries(&d.sigma, 0, 1, t),
            trunc,
            &rat(d.rank() as i64, 24),
        ),
    }
}

fn series_x(d: &OrbifoldData, mu: &[BigRational], k: u32, trunc: &BigRational) -> Result<QSeries<Cyc>> {
    let p = d.p as usize;
    let mu_norm = d.norm(mu);
    let num = |t: &BigRational| -> Result<QSeries<Cyc>> {
        let th = theta_series_on(&d.pi_q, mu, t)?;
        let mut out = QSeries::new(th.truncation.clone());
        for (e, c) in &th.terms {
            // e^{πik(|γ|² − |μ|²)} = ω^{kn} with n = p(|γ|² − |μ|²)/2 ∈ ℤ
            let n = (e * rat(2, 1) - &mu_norm) * rat(p as i64, 2);
            assert!(n.is_integer(), "twisted phase is a p-th root of unity");
            let n = n.to_integer().to_i64().unwrap();
            let w = Cyc::root(p, n * k as i64).scale(&rat_int(c)).scale(&rat(d.defect as i64, 1));
            out.add_term(e.clone(), w);
        }
        Ok(out)
    };
    let lead = rat(d.rank() as i64, 24) - &d.delta;
    quotient(num, |t| p_denominator_qseries(&d.sigma, 1, k, t), trunc, &lead)
}

/// Exact q-expansion of a character, complete below the absolute exponent `trunc`.
pub fn char_orbifold_qseries(c: &Classification, label: &OrbifoldModuleLabel, trunc: &BigRational) -> Result<QSeries<Cyc>> {
    let d = &c.data;
    let p = d.p as usize;
    let inv_p = Cyc::from_rational(p, rat(1, p as i64));
    match label {
        OrbifoldModuleLabel::Type1 { lambda, j } => {
            let u0 = series_u0(d, &d.coset_reps[lambda], trunc)?;
            let u1 = series_u1(d, &d.fixed_reps[lambda], trunc)?;
            let mut s = Cyc::zero(p);
            for k in 1..d.p {
                s = s.add(&Cyc::root(p, (*j * k) as i64));
            }
            Ok(u0.add(&u1.scale(&s)).scale(&inv_p))
        }
        OrbifoldModuleLabel::Type2 { gamma } => series_u0(d, &d.coset_reps[gamma], trunc),
        OrbifoldModuleLabel::Type3 { mu, j, .. } => {
            let v = &d.mu_reps[mu];
            let mut acc: QSeries<Cyc> = QSeries::new(trunc.clone());
            for k in 0..d.p {
                acc = acc.add(&series_x(d, v, k, trunc)?.scale(&Cyc::root(p, (*j * k) as i64)));
            }
            Ok(acc.scale(&inv_p))
        }
    }
}

/// Exact expansion covering `n_terms` integer steps above the vacuum exponent −r/24.
pub fn char_orbifold_qexpansion(c: &Classification, label: &OrbifoldModuleLabel, n_terms: usize) -> Result<QSeries<Cyc>> {
    let trunc = rat(n_terms as i64, 1) - rat(c.data.rank() as i64, 24);
    char_orbifold_qseries(c, label, &trunc)
}

/// The conformal weight: the lowest exponent in the character plus r/24.
pub fn conformal_weight(c: &Classification, label: &OrbifoldModuleLabel) -> Result<BigRational> {
    let shift = rat(c.data.rank() as i64, 24);
    let mut n = 2i64;
    loop {
        let s = char_orbifold_qseries(c, label, &(rat(n, 1) - &shift))?;
        if let Some((e, _)) = s.leading() {
            return Ok(e + &shift);
        }
        if n > 64 {
            return Err(OrbiError::Validation(format!("no states found for {label} below weight {n}")));
        }
        n *= 2;
    }
}

/// ½·min|λ + γ|² over γ ∈ Q (or over μ + π₀Q for twisted labels, plus Δ_σ).
pub fn lowest_weight_bound(c: &Classification, label: &OrbifoldModuleLabel) -> BigRational {
    let d = &c.data;
    match label {
        OrbifoldModuleLabel::Type1 { lambda, .. } => d.norm(&d.coset_reps[lambda]) / rat(2, 1),
        OrbifoldModuleLabel::Type2 { gamma } => d.norm(&d.coset_reps[gamma]) / rat(2, 1),
        OrbifoldModuleLabel::Type3 { mu, .. } => &d.delta + d.norm(&d.mu_reps[mu]) / rat(2, 1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a3() -> Classification {
        let l = new_lattice(vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]]).unwrap();
        let s = new_isometry(&l, vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]).unwrap();
        classify(&l, &s).unwrap()
    }

    #[test]
    fn a3_counts() {
        let c = a3();
        assert_eq!(c.counts, [4, 1, 4]);
    }

    #[test]
    fn qexpansion_matches_numeric() {
        let c = a3();
        let tol = SeriesTolerance::new(1e-13);
        let tau = Complex64::new(0.1, 1.1);
        for label in &c.labels {
            let s = char_orbifold_qexpansion(&c, label, 8).unwrap();
            let exact: Complex64 = s.evaluate(tau);
            let num = char_orbifold(&c, label, &ModularPoint::new(tau), &tol).unwrap();
            assert!((exact - num).norm() < 1e-9, "{label}: {exact} vs {num}");
        }
    }
}
