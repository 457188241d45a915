//! T-matrix, S-transformation coefficients, the constants v_k and β₀,
//! asymptotic and quantum dimensions, Verlinde fusion, and the numeric
//! certification of every transformation law.
//!
//! The S-coefficients of the twisted-to-twisted block are obtained by
//! writing the matrix `A = [[k, −m], [p, −k']]` that relates
//! `(−1/τ + k)/p` to `(τ + k')/p` as a word in S and T and transforming the
//! theta functions of `L = √p·π₀(Q)` one generator at a time. The overall
//! constant in front of that block is fixed numerically at two sample
//! points and must agree between them.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::characters::*;
use crate::error::{OrbiError, Result};
use crate::isometry::modinv;
use crate::lattice::*;
use crate::linalg::*;
use crate::modular::*;
use crate::qseries::Ring;
use crate::weil::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MatrixKind {
    S,
    T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransformMatrix {
    pub kind: MatrixKind,
    #[serde(skip)]
    pub entries: CMat,
    /// True when the characters are linearly dependent, so that the
    /// coefficient matrix is one valid expansion but not a canonical S-matrix.
    pub degenerate: bool,
}

impl TransformMatrix {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// max |(M M†)_{ij} − δ_{ij}|
    pub fn unitarity_residual(&self) -> f64 {
        let n = self.len();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let x: Complex64 = (0..n).map(|k| self.entries[i][k] * self.entries[j][k].conj()).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((x - want).norm());
            }
        }
        worst
    }
}

fn omega(p: u32, k: i64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * k.rem_euclid(p as i64) as f64 / p as f64)
}

fn zero_mat(n: usize) -> CMat {
    vec![vec![Complex64::zero(); n]; n]
}

fn fmin(x: &BigRational) -> f64 {
    x.to_f64().unwrap()
}

/// Diagonal T-matrix: e^{πi(|λ|² − r/12)} on untwisted labels and
/// ω^{−j}e^{2πiΔ_σ}e^{πi(|μ|² − r/12)} on twisted ones.
pub fn t_matrix(c: &Classification) -> TransformMatrix {
    let d = &c.data;
    let r12 = rat(d.rank() as i64, 12);
    let mut m = zero_mat(c.len());
    for (i, label) in c.labels.iter().enumerate() {
        m[i][i] = match label {
            OrbifoldModuleLabel::Type1 { lambda, .. } => epi(&(d.norm(&d.coset_reps[lambda]) - &r12)),
            OrbifoldModuleLabel::Type2 { gamma } => epi(&(d.norm(&d.coset_reps[gamma]) - &r12)),
            OrbifoldModuleLabel::Type3 { mu, j, .. } => {
                omega(d.p, -(*j as i64)) * e2pi(&d.delta) * epi(&(d.norm(&d.mu_reps[mu]) - &r12))
            }
        };
    }
    TransformMatrix { kind: MatrixKind::T, entries: m, degenerate: false }
}

/// The even lattice L = √p·π₀(Q), in the coordinates of the basis of π₀(Q).
pub fn scaled_lattice(d: &OrbifoldData) -> Result<Option<Lattice>> {
    if d.pi_q.rank() == 0 {
        return Ok(None);
    }
    let g = d.pi_q.gram();
    let mut out = Vec::new();
    for row in &g {
        let mut r = Vec::new();
        for x in row {
            let y = x * rat(d.p as i64, 1);
            if !y.is_integer() {
                return Err(OrbiError::Validation("√p·π₀(Q) is not integral".into()));
            }
            r.push(y.to_integer().to_i64().unwrap());
        }
        out.push(r);
    }
    Ok(Some(new_lattice(out)?))
}

/// Representative k' of −k⁻¹ mod p and m = (kk' + 1)/p, using symmetric residues.
pub fn twist_partner(k: i64, p: i64) -> (i64, i64, i64) {
    let sym = |x: i64| {
        let r = x.rem_euclid(p);
        if r > p / 2 {
            r - p
        } else {
            r
        }
    };
    let ks = sym(k);
    let kinv = modinv(k.rem_euclid(p) as u64, p as u64) as i64;
    let kp = sym(-kinv);
    let m = (ks * kp + 1) / p;
    debug_assert_eq!(ks * kp + 1, m * p);
    (ks, kp, m)
}

const SAMPLES: [Complex64; 2] = [Complex64::new(0.13, 1.07), Complex64::new(-0.21, 0.86)];

/// The twisted block constant and the Weil matrix for one k ≠ 0:
/// X_k(μ)(−1/τ) = κ·e^{−πik|μ|²} Σ_δ ρ(A)_{μδ} e^{πik'|δ|²} X_{k'}(δ)(τ).
struct TwistedBlock {
    ks: i64,
    kp: i64,
    kappa: Complex64,
    rho: CMat,
}

fn twisted_block(d: &OrbifoldData, weil: Option<&WeilRep>, k: i64) -> Result<TwistedBlock> {
    let p = d.p as i64;
    let (ks, kp, m) = twist_partner(k, p);
    let word = sl2_word(ks, -m, p, -kp)?;
    let tol = SeriesTolerance::new(1e-14);
    let rho = match weil {
        Some(w) => w.rho_word(&word),
        None => vec![vec![Complex64::new(1.0, 0.0)]],
    };
    let mut kappas = Vec::new();
    for tau in SAMPLES {
        let tp = (tau + kp as f64) / p as f64;
        let j = weil.map(|w| w.automorphy(&word, tp)).unwrap_or(Complex64::new(1.0, 0.0));
        let num = p_denominator(&d.sigma, 1, kp.rem_euclid(p) as u32, tau, &tol)?;
        let den = p_denominator(&d.sigma, 1, k.rem_euclid(p) as u32, -1.0 / tau, &tol)?;
        kappas.push(j * num / den);
    }
    if (kappas[0] - kappas[1]).norm() > 1e-9 {
        return Err(OrbiError::InconsistentSamples(format!("twisted block constant {} vs {}", kappas[0], kappas[1])));
    }
    let mut kappa = kappas[0];
    // Snap to a 24th root of unity when it clearly is one.
    let ang = kappa.arg() * 12.0 / PI;
    let snapped = Complex64::from_polar(1.0, ang.round() * PI / 12.0);
    if (snapped - kappa).norm() < 1e-9 {
        kappa = snapped;
    }
    Ok(TwistedBlock { ks, kp, kappa, rho })
}

fn weil_rep(d: &OrbifoldData) -> Result<Option<WeilRep>> {
    Ok(scaled_lattice(d)?.map(WeilRep::new))
}

/// Index in the Weil representation of the coset of √p·μ for μ ∈ 𝔥₀.
fn weil_index(d: &OrbifoldData, w: Option<&WeilRep>, mu: &[BigRational]) -> usize {
    match w {
        None => 0,
        Some(w) => {
            let c = d.pi_q.coords_of(mu).expect("μ ∈ 𝔥₀");
            w.index_of(&c).expect("√p·μ ∈ L*")
        }
    }
}

/// The S-transformation coefficient matrix C with χ_j(−1/τ) = Σ_k C_{jk} χ_k(τ).
pub fn s_coefficients(c: &Classification) -> Result<TransformMatrix> {
    let d = &c.data;
    let p = d.p;
    let pf = p as f64;
    let n = c.len();
    let mut s = zero_mat(n);
    let sq = (d.disc.cardinality as f64).sqrt();
    let zf = d.z_mu as f64;
    let mdisc = fmin(&d.m_disc()).sqrt();
    let defect = d.defect as f64;
    let dd = d.eigen.d as i32;
    let v0 = defect * pf.powf(-(dd as f64) / 2.0) * d.pi_index() as f64 / mdisc;

    let idx: BTreeMap<&OrbifoldModuleLabel, usize> = c.labels.iter().enumerate().map(|(i, l)| (l, i)).collect();
    let t1 = |lam: &CosetKey, j: u32| idx[&OrbifoldModuleLabel::Type1 { lambda: lam.clone(), j }];
    let t2 = |g: &CosetKey| idx[&OrbifoldModuleLabel::Type2 { gamma: g.clone() }];
    let t3 = |mu: &CosetKey, zeta: u32, l: u32, j: u32| {
        idx[&OrbifoldModuleLabel::Type3 { mu: mu.clone(), zeta, l: l % p, j: j % p }]
    };
    let orbit_of = |g: &CosetKey| -> Vec<QVec> {
        let v = &d.coset_reps[g];
        (0..p).map(|i| d.sigma.apply_pow(i, v)).collect()
    };
    // E_{λ,γ} = Σ_i e^{−2πi(λ|σⁱγ)}
    let e_sum = |lam: &[BigRational], g: &CosetKey| -> Complex64 {
        orbit_of(g).iter().map(|x| e2pi(&-d.pair(lam, x))).sum()
    };

    // Type 1 and Type 2 rows.
    for (row, label) in c.labels.iter().enumerate() {
        let (lam, j, is_fixed) = match label {
            OrbifoldModuleLabel::Type1 { lambda, j } => (lambda, *j, true),
            OrbifoldModuleLabel::Type2 { gamma } => (gamma, 0, false),
            _ => continue,
        };
        let lv = &d.coset_reps[lam];
        let pre = if is_fixed { 1.0 / pf } else { 1.0 };
        for g in &d.fixed_cosets {
            let ph = e2pi(&-d.pair(lv, &d.coset_reps[g])) * (pre / sq);
            for t in 0..p {
                s[row][t1(g, t)] += ph;
            }
        }
        for g in &d.orbit_reps {
            s[row][t2(g)] += e_sum(lv, g) * (pre / sq);
        }
        if !is_fixed {
            continue;
        }
        if let Some(lp) = &d.fixed_reps[lam] {
            let dl = pf.powf(dd as f64 / 2.0) / (mdisc * defect);
            for (mu, mv) in &d.mu_reps {
                let ph = e2pi(&-d.pair(lp, mv)) * (dl / (pf * zf));
                for zeta in 1..=d.z_mu as u32 {
                    for k in 1..p {
                        let w = omega(p, (j * k) as i64) * ph;
                        for t in 0..p {
                            s[row][t3(mu, zeta, k, t)] += w;
                        }
                    }
                }
            }
        }
    }

    // Type 3 rows, untwisted block: (Q* ∩ 𝔥₀)/M mapped to σ-stable cosets.
    let qm = FiniteQuotient::new(&d.qdual_fixed, &d.m)?;
    let lambda_list: Vec<(QVec, CosetKey)> = qm
        .keys()
        .iter()
        .map(|k| {
            let v = qm.rep(k);
            let key = d.disc.quotient.key(&v).expect("Q* ∩ 𝔥₀ ⊆ Q*");
            (v, key)
        })
        .collect();
    let weil = weil_rep(d)?;
    let blocks: Vec<TwistedBlock> = (1..p as i64).map(|k| twisted_block(d, weil.as_ref(), k)).collect::<Result<_>>()?;
    // Weil index → twisted coset key, when the coset lies in π₀(Q*).
    let mut weil_to_mu: BTreeMap<usize, CosetKey> = BTreeMap::new();
    for (mu, mv) in &d.mu_reps {
        weil_to_mu.insert(weil_index(d, weil.as_ref(), mv), mu.clone());
    }
    let wlen = weil.as_ref().map(|w| w.len()).unwrap_or(1);

    for (row, label) in c.labels.iter().enumerate() {
        let OrbifoldModuleLabel::Type3 { mu, zeta, l, j } = label else { continue };
        let mv = &d.mu_reps[mu];
        for (lv, key) in &lambda_list {
            let ph = e2pi(&-d.pair(mv, lv)) * (v0 / pf);
            for t in 0..p {
                s[row][t1(key, t)] += ph * omega(p, (*l * t) as i64);
            }
        }
        let wi = weil_index(d, weil.as_ref(), mv);
        for (bi, blk) in blocks.iter().enumerate() {
            let k = bi as i64 + 1;
            let front = blk.kappa * epi(&(-d.norm(mv) * rat(blk.ks, 1))) * omega(p, *j as i64 * k) / pf;
            for di in 0..wlen {
                let coef = blk.rho[wi][di];
                match weil_to_mu.get(&di) {
                    None => {
                        if coef.norm() > 1e-9 {
                            return Err(OrbiError::Validation(format!(
                                "twisted transformation leaves π₀(Q*) (coefficient {coef})"
                            )));
                        }
                    }
                    Some(delta) => {
                        let dv = &d.mu_reps[delta];
                        let x = front * coef * epi(&(d.norm(dv) * rat(blk.kp, 1)));
                        let sector = (*l as i64 * k).rem_euclid(p as i64) as u32;
                        for t in 0..p {
                            s[row][t3(delta, *zeta, sector, t)] += x * omega(p, -(t as i64) * blk.kp);
                        }
                    }
                }
            }
        }
    }
    for row in s.iter_mut() {
        for x in row.iter_mut() {
            if x.re.abs() < 1e-15 {
                x.re = 0.0;
            }
            if x.im.abs() < 1e-15 {
                x.im = 0.0;
            }
        }
    }
    let degenerate = character_rank(c, 20)? < n;
    Ok(TransformMatrix { kind: MatrixKind::S, entries: s, degenerate })
}

/// Numerical rank of the matrix of character q-expansion coefficients over
/// (at least) `n_exponents` distinct exponents.
pub fn character_rank(c: &Classification, n_exponents: usize) -> Result<usize> {
    let shift = rat(c.data.rank() as i64, 24);
    let mut steps = 2i64;
    let series = loop {
        let trunc = rat(steps, 1) - &shift;
        let series: Vec<_> = c
            .labels
            .par_iter()
            .map(|l| char_orbifold_qseries(c, l, &trunc))
            .collect::<Result<Vec<_>>>()?;
        let mut exps: Vec<&BigRational> = series.iter().flat_map(|s| s.terms.keys()).collect();
        exps.sort();
        exps.dedup();
        if exps.len() >= n_exponents || steps > 32 {
            break series;
        }
        steps *= 2;
    };
    let mut exps: Vec<BigRational> = series.iter().flat_map(|s| s.terms.keys().cloned()).collect();
    exps.sort();
    exps.dedup();
    let rows: CMat = series
        .iter()
        .map(|s| {
            exps.iter().map(|e| s.coefficient(e).map(|x| x.to_complex()).unwrap_or_default()).collect()
        })
        .collect();
    Ok(numeric_rank(rows, 1e-9))
}

/// Rank by Gaussian elimination with complete pivoting and a relative tolerance.
pub fn numeric_rank(mut a: CMat, rel_tol: f64) -> usize {
    for row in a.iter_mut() {
        let nrm = row.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if nrm > 0.0 {
            for x in row.iter_mut() {
                *x /= nrm;
            }
        }
    }
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut rank = 0;
    let mut used = vec![false; cols];
    for _ in 0..rows.min(cols) {
        let mut best = (0.0, 0, 0);
        for (i, row) in a.iter().enumerate().skip(rank) {
            for (j, x) in row.iter().enumerate() {
                if !used[j] && x.norm() > best.0 {
                    best = (x.norm(), i, j);
                }
            }
        }
        if best.0 < rel_tol {
            break;
        }
        let (_, pi, pj) = best;
        a.swap(rank, pi);
        used[pj] = true;
        let piv = a[rank][pj];
        let prow = a[rank].clone();
        for row in a.iter_mut().skip(rank + 1) {
            let f = row[pj] / piv;
            if f.norm() == 0.0 {
                continue;
            }
            for (x, y) in row.iter_mut().zip(&prow) {
                *x -= f * y;
            }
        }
        rank += 1;
    }
    rank
}

// ---------------------------------------------------------------------------
// β₀ and v_k

/// A vector β₀ ∈ L* with a·c|ν|² ≡ 2(ν|β₀) mod 2 for every ν ∈ L* with cν ∈ L
/// (a = 1), chosen of minimal norm among coset representatives.
pub fn beta0_vector(l: &Lattice, c: i64) -> Result<DualVector> {
    let r = l.rank();
    if c % 2 != 0 {
        return Ok(DualVector::zero(r));
    }
    let dual = l.dual_sublattice();
    let scaled = Sublattice::new(l, identity_q(r).into_iter().map(|row| row.into_iter().map(|x| x / rat(c, 1)).collect()).collect());
    let sub = intersect(&dual, &scaled);
    let quot = FiniteQuotient::new(&sub, &l.as_sublattice())?;
    let nus: Vec<QVec> = quot.keys().iter().map(|k| quot.rep(k)).collect();
    let disc = discriminant_group(l);
    let qs = l.as_sublattice();
    // Within a 2-torsion class prefer the lexicographically larger of ±v, so α/2 wins over −α/2.
    let mut cands: Vec<QVec> = disc
        .representatives()
        .iter()
        .map(|v| {
            let v = min_norm_rep(&qs, &v.0);
            let neg: QVec = v.iter().map(|x| -x).collect();
            let twice: QVec = v.iter().map(|x| x * rat(2, 1)).collect();
            if qs.contains(&twice) && neg > v {
                neg
            } else {
                v
            }
        })
        .collect();
    cands.sort_by(|a, b| l.form().norm(a).cmp(&l.form().norm(b)).then(b.cmp(a)));
    let form = l.form();
    for beta in cands {
        let ok = nus.iter().all(|nu| {
            let x = form.norm(nu) * rat(c, 1) - form.pair(nu, &beta) * rat(2, 1);
            (x / rat(2, 1)).is_integer()
        });
        if ok {
            return Ok(DualVector(beta));
        }
    }
    Err(OrbiError::NoSolution)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VkConstants {
    /// k ↦ v_k (k = 0..p−1)
    #[serde(skip)]
    pub values: BTreeMap<u32, Complex64>,
    /// β₀ in the coordinates of L = √p·π₀(Q)
    #[serde(skip)]
    pub beta0: DualVector,
    /// c_{β₀} for p = 2, c₀ = Σ e^{pπi|ν|²} otherwise
    #[serde(skip)]
    pub c_beta0: Complex64,
    /// |L*/L|
    pub disc_order: u64,
}

fn l_data(d: &OrbifoldData) -> Result<(Lattice, Vec<QVec>)> {
    let l = scaled_lattice(d)?.ok_or_else(|| OrbiError::Validation("σ has no fixed vectors".into()))?;
    let disc = discriminant_group(&l);
    let reps = disc.representatives().into_iter().map(|v| v.0).collect();
    Ok((l, reps))
}

/// c_{β₀} = Σ_{μ ∈ L*/L} e^{−2πi(|μ|² + (μ|β₀))}.
pub fn c_beta(l: &Lattice, beta0: &DualVector) -> Complex64 {
    let disc = discriminant_group(l);
    disc.representatives()
        .iter()
        .map(|m| e2pi(&-(l.form().norm(&m.0) + l.form().pair(&m.0, &beta0.0))))
        .sum()
}

/// c₀ = Σ_{μ ∈ L*/L} e^{pπi|μ|²}.
pub fn c_zero(l: &Lattice, p: u32) -> Complex64 {
    let disc = discriminant_group(l);
    disc.representatives().iter().map(|m| epi(&(l.form().norm(&m.0) * rat(p as i64, 1)))).sum()
}

pub fn v_constants(c: &Classification) -> Result<VkConstants> {
    let d = &c.data;
    let p = d.p;
    let (l, _) = l_data(d)?;
    let ord = discriminant_group(&l).cardinality;
    let n = ord as f64;
    let r0 = d.eigen.r0 as i32;
    let mut values = BTreeMap::new();
    let v0 = d.defect as f64 * (p as f64).powf(-(d.eigen.d as f64) / 2.0) * d.pi_index() as f64
        / fmin(&d.m_disc()).sqrt();
    values.insert(0, Complex64::new(v0, 0.0));
    let (beta0, cval) = if p == 2 {
        let b = beta0_vector(&l, 2)?;
        let cb = c_beta(&l, &b);
        values.insert(1, cb / n);
        (b, cb)
    } else {
        let c0 = c_zero(&l, p);
        values.insert(1, c0.conj() / n);
        values.insert(p - 1, I.powi(r0) * c0 / n);
        for k in 2..p - 1 {
            let (ks, kp, m) = twist_partner(k as i64, p as i64);
            values.insert(k, v_numeric(&l, [ks, -m, p as i64, -kp])?);
        }
        (DualVector::zero(l.rank()), c0)
    };
    Ok(VkConstants { values, beta0, c_beta0: cval, disc_order: ord })
}

/// v(A) determined numerically from θ_L(Aτ) = (cτ+d)^{r/2} v(A) Σ_μ e^{πi(cd|μ|² + 2d(μ|β₀))} θ_{cμ+L}(τ)
/// at λ = 0, evaluated at two independent points that must agree.
pub fn v_numeric(l: &Lattice, abcd: [i64; 4]) -> Result<Complex64> {
    let beta0 = beta0_vector(l, abcd[2])?;
    v_numeric_with(l, abcd, &beta0)
}

/// As [`v_numeric`] with an explicitly supplied β₀.
pub fn v_numeric_with(l: &Lattice, abcd: [i64; 4], beta0: &DualVector) -> Result<Complex64> {
    let [a, b, c, d] = abcd;
    let form = l.form();
    let disc = discriminant_group(l);
    let qs = l.as_sublattice();
    // One μ ∈ L* per coset cμ + L.
    let mut seen: BTreeMap<CosetKey, QVec> = BTreeMap::new();
    let mut reps: Vec<QVec> = disc.representatives().iter().map(|v| min_norm_rep(&qs, &v.0)).collect();
    reps.sort_by(|x, y| form.norm(x).cmp(&form.norm(y)).then(x.cmp(y)));
    for mu in reps {
        let cm: QVec = mu.iter().map(|x| x * rat(c, 1)).collect();
        let key = disc.quotient.key(&cm).expect("cμ ∈ L*");
        seen.entry(key).or_insert(mu);
    }
    let tol = SeriesTolerance::new(1e-14);
    let word = sl2_word(a, b, c, d)?;
    let rk = l.rank() as i64;
    let mut vals = Vec::new();
    for tau in SAMPLES {
        let lhs = theta(l, &DualVector::zero(l.rank()), &ModularPoint::new(apply_word(&word, tau)), &tol)?.value;
        let mut sum = Complex64::zero();
        for mu in seen.values() {
            let cm: QVec = mu.iter().map(|x| x * rat(c, 1)).collect();
            let ph = epi(&(form.norm(mu) * rat(c * d, 1) + form.pair(mu, &beta0.0) * rat(2 * d, 1)));
            sum += ph * theta(l, &DualVector(cm), &ModularPoint::new(tau), &tol)?.value;
        }
        vals.push(lhs / (half_power(tau * c as f64 + d as f64, rk) * sum));
    }
    if (vals[0] - vals[1]).norm() > 1e-8 {
        return Err(OrbiError::InconsistentSamples(format!("v(A) = {} vs {}", vals[0], vals[1])));
    }
    Ok(vals[0])
}

// ---------------------------------------------------------------------------
// Dimensions and fusion

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionReport {
    pub asymptotic: Vec<f64>,
    pub quantum: Vec<f64>,
}

pub fn dimensions(c: &Classification) -> DimensionReport {
    let d = &c.data;
    let p = d.p as f64;
    let sq = (d.disc.cardinality as f64).sqrt();
    let asymptotic: Vec<f64> = c
        .labels
        .iter()
        .map(|l| match l {
            OrbifoldModuleLabel::Type1 { .. } => 1.0 / (p * sq),
            OrbifoldModuleLabel::Type2 { .. } => 1.0 / sq,
            OrbifoldModuleLabel::Type3 { .. } => {
                p.powf(d.eigen.d as f64 / 2.0) / (p * d.z_mu as f64 * d.defect as f64) / fmin(&d.m_disc()).sqrt()
            }
        })
        .collect();
    let quantum = asymptotic.iter().map(|a| a * p * sq).collect();
    DimensionReport { asymptotic, quantum }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FusionTensor {
    /// n[i][j][k] = N_{ij}^k
    pub n: Vec<Vec<Vec<i64>>>,
}

impl FusionTensor {
    pub fn get(&self, i: usize, j: usize, k: usize) -> i64 {
        self.n[i][j][k]
    }

    /// The fusion product i ⊠ j as (k, multiplicity) pairs.
    pub fn product(&self, i: usize, j: usize) -> Vec<(usize, i64)> {
        self.n[i][j].iter().enumerate().filter(|(_, &m)| m != 0).map(|(k, &m)| (k, m)).collect()
    }
}

/// N_{ij}^k = Σ_l S_{il}S_{jl}S̄_{kl}/S_{0l}, with the vacuum at index `vacuum`.
pub fn verlinde_fusion(s: &TransformMatrix, vacuum: usize) -> Result<FusionTensor> {
    if s.degenerate {
        return Err(OrbiError::DegenerateBasis);
    }
    let res = s.unitarity_residual();
    if res > 1e-8 {
        return Err(OrbiError::NotUnitary(res));
    }
    let m = &s.entries;
    let n = m.len();
    let mut out = vec![vec![vec![0i64; n]; n]; n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let x: Complex64 = (0..n).map(|l| m[i][l] * m[j][l] * m[k][l].conj() / m[vacuum][l]).sum();
                let rounded = x.re.round();
                if (x - rounded).norm() > 1e-6 || rounded < 0.0 {
                    return Err(OrbiError::Validation(format!("N[{i}][{j}][{k}] = {x} is not a nonnegative integer")));
                }
                out[i][j][k] = rounded as i64;
            }
        }
    }
    Ok(FusionTensor { n: out })
}

// ---------------------------------------------------------------------------
// Certification

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowResidual {
    pub label: String,
    pub s_residual: f64,
    pub t_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub rows: Vec<RowResidual>,
    pub sum_rule_residual: f64,
    pub max_s_residual: f64,
    pub max_t_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Evaluate every character at each sample τ, at −1/τ and at τ + 1, and
/// compare with the S- and T-matrix predictions.
pub fn verify_transforms(
    c: &Classification,
    s: &TransformMatrix,
    t: &TransformMatrix,
    taus: &[Complex64],
    series_tol: f64,
    tol: f64,
) -> Result<VerificationReport> {
    let st = SeriesTolerance::new(series_tol);
    let n = c.len();
    let per_sample: Vec<(Vec<f64>, Vec<f64>)> = taus
        .par_iter()
        .map(|&tau| {
            let at = char_all(c, &ModularPoint::new(tau), &st)?;
            let inv = char_all(c, &ModularPoint::new(-1.0 / tau), &st)?;
            let shifted = char_all(c, &ModularPoint::new(tau + 1.0), &st)?;
            let sres = (0..n)
                .map(|i| {
                    let pred: Complex64 = (0..n).map(|k| s.entries[i][k] * at[k]).sum();
                    (inv[i] - pred).norm()
                })
                .collect();
            let tres = (0..n).map(|i| (shifted[i] - t.entries[i][i] * at[i]).norm()).collect();
            Ok((sres, tres))
        })
        .collect::<Result<_>>()?;
    let rows: Vec<RowResidual> = (0..n)
        .map(|i| RowResidual {
            label: c.labels[i].to_string(),
            s_residual: per_sample.iter().map(|x| x.0[i]).fold(0.0, f64::max),
            t_residual: per_sample.iter().map(|x| x.1[i]).fold(0.0, f64::max),
        })
        .collect();
    let v = c.vacuum();
    let sum_rule_residual = ((0..n).map(|j| s.entries[v][j].norm_sqr()).sum::<f64>() - 1.0).abs();
    let max_s_residual = rows.iter().map(|r| r.s_residual).fold(0.0, f64::max);
    let max_t_residual = rows.iter().map(|r| r.t_residual).fold(0.0, f64::max);
    let pass = max_s_residual < tol && max_t_residual < tol && sum_rule_residual < 1e-10;
    Ok(VerificationReport { rows, sum_rule_residual, max_s_residual, max_t_residual, tolerance: tol, pass })
}

pub fn default_taus() -> Vec<Complex64> {
    vec![Complex64::new(0.0, 1.0), Complex64::new(0.3, 0.8)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::isometry::new_isometry;

    fn a3() -> Classification {
        let l = new_lattice(vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]]).unwrap();
        let s = new_isometry(&l, vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]).unwrap();
        classify(&l, &s).unwrap()
    }

    #[test]
    fn a3_transformations_certify() {
        let c = a3();
        let s = s_coefficients(&c).unwrap();
        let t = t_matrix(&c);
        let rep = verify_transforms(&c, &s, &t, &default_taus(), 1e-12, 1e-8).unwrap();
        assert!(rep.pass, "{rep:#?}");
        assert!(!s.degenerate);
    }

    #[test]
    fn beta0_examples() {
        let a1 = new_lattice(vec![vec![2]]).unwrap();
        assert_eq!(beta0_vector(&a1, 2).unwrap(), DualVector(vec![rat(1, 2)]));
        assert_eq!(beta0_vector(&a1, 3).unwrap(), DualVector::zero(1));
        let a2 = new_lattice(vec![vec![2, -1], vec![-1, 2]]).unwrap();
        assert_eq!(beta0_vector(&a2, 2).unwrap(), DualVector::zero(2));
    }

    #[test]
    fn d4_constants_and_numeric_path_agree() {
        let l = new_lattice(vec![vec![2, -1, 0, 0], vec![-1, 2, -1, -1], vec![0, -1, 2, 0], vec![0, -1, 0, 2]]).unwrap();
        let s = new_isometry(&l, vec![vec![0, 0, 0, 1], vec![0, 1, 0, 0], vec![1, 0, 0, 0], vec![0, 0, 1, 0]]).unwrap();
        let c = classify(&l, &s).unwrap();
        let v = v_constants(&c).unwrap();
        assert!((v.c_beta0 - 3.0).norm() < 1e-12);
        assert!((v.values[&1] - 1.0).norm() < 1e-12);
        assert!((v.values[&2] + 1.0).norm() < 1e-12);
        let sl = scaled_lattice(&c.data).unwrap().unwrap();
        assert!((v_numeric(&sl, [1, 0, 3, 1]).unwrap() - v.values[&1]).norm() < 1e-9);
        assert!((v_numeric(&sl, [-1, 0, 3, -1]).unwrap() - v.values[&2]).norm() < 1e-9);
    }

    #[test]
    fn twist_partner_matches_known_matrices() {
        assert_eq!(twist_partner(1, 3), (1, -1, 0));
        assert_eq!(twist_partner(2, 3), (-1, 1, 0));
        assert_eq!(twist_partner(1, 2), (1, 1, 1));
    }
}
