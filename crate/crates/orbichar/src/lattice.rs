//! Even positive-definite lattices, their duals and discriminant groups,
//! sublattices in rational coordinates, and bounded-norm enumeration.
//!
//! Vectors are always stored as coordinates in the lattice basis; norms and
//! pairings go through the Gram matrix, so nothing here ever leaves exact
//! arithmetic except the Fincke–Pohst pruning bounds (which are padded and
//! followed by an exact norm test).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{OrbiError, Result};
use crate::linalg::*;

/// Default safety cap on the number of vectors a single enumeration may return.
pub const DEFAULT_ENUMERATION_CAP: usize = 4_000_000;

/// A positive-definite quadratic form with rational Gram matrix.
///
/// Integral even lattices, projected lattices like π₀(Q) and rescaled
/// lattices all share this representation for enumeration and theta sums.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadForm {
    gram: QMat,
    /// lcm of the Gram denominators
    den: i128,
    /// `den · gram` as machine integers
    gram_int: Vec<Vec<i128>>,
    /// Fincke–Pohst coefficients: `q[i][i]` diagonal, `q[i][j]` (j > i) multipliers
    fp: Vec<Vec<f64>>,
    inv_diag: Vec<f64>,
}

impl QuadForm {
    pub fn new(gram: QMat) -> Result<Self> {
        let n = gram.len();
        for (i, row) in gram.iter().enumerate() {
            if row.len() != n {
                return Err(OrbiError::DimensionMismatch { expected: n, got: row.len() });
            }
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(OrbiError::NotSymmetric(i, j));
                }
            }
        }
        // Leading principal minors.
        for k in 1..=n {
            let minor: QMat = gram[..k].iter().map(|r| r[..k].to_vec()).collect();
            if !qdet(&minor).is_positive() {
                return Err(OrbiError::NotPositiveDefinite(k));
            }
        }
        let den = lcm_denominators(gram.iter().flatten());
        let gram_int = gram
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| (x * rat_int(&den)).to_integer().to_i128().expect("gram entry fits in i128"))
                    .collect()
            })
            .collect();
        // Exact square-completion, then converted to floating point.
        let mut q = gram.clone();
        for i in 0..n {
            for j in i + 1..n {
                q[j][i] = q[i][j].clone();
                q[i][j] = &q[i][j] / &q[i][i];
            }
            for k in i + 1..n {
                for l in k..n {
                    let t = &q[k][i] * &q[i][l];
                    q[k][l] -= t;
                }
            }
        }
        let fp = (0..n)
            .map(|i| (0..n).map(|j| if j >= i { q[i][j].to_f64().unwrap() } else { 0.0 }).collect())
            .collect();
        let inv = qinverse(&gram).expect("positive definite");
        let inv_diag = (0..n).map(|i| inv[i][i].to_f64().unwrap()).collect();
        Ok(QuadForm { gram, den: den.to_i128().expect("denominator fits"), gram_int, fp, inv_diag })
    }

    pub fn from_int(gram: &[Vec<i64>]) -> Result<Self> {
        QuadForm::new(to_qmat(&to_imat(gram)))
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &QMat {
        &self.gram
    }

    pub fn pair(&self, a: &[BigRational], b: &[BigRational]) -> BigRational {
        qform(&self.gram, a, b)
    }

    pub fn norm(&self, a: &[BigRational]) -> BigRational {
        self.pair(a, a)
    }

    pub fn det(&self) -> BigRational {
        qdet(&self.gram)
    }

    /// Gram matrix as floating point.
    pub fn gram_f64(&self) -> Vec<Vec<f64>> {
        self.gram.iter().map(|r| r.iter().map(|x| x.to_f64().unwrap()).collect()).collect()
    }

    /// True when the Gram matrix is integral with even diagonal.
    pub fn is_even_integral(&self) -> bool {
        self.gram.iter().flatten().all(|x| x.is_integer())
            && (0..self.rank()).all(|i| self.gram[i][i].to_integer().is_even())
    }
}

/// The vectors of a coset `shift + L` with norm at most a bound.
///
/// Vector `i` is `shift + offsets[i]`; its norm is `norm_num[i] / norm_den`.
#[derive(Debug, Clone)]
pub struct Enumeration {
    pub shift: QVec,
    pub offsets: Vec<Vec<i64>>,
    pub norm_num: Vec<i128>,
    pub norm_den: i128,
}

impl Enumeration {
    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn norm(&self, i: usize) -> BigRational {
        BigRational::new(BigInt::from(self.norm_num[i]), BigInt::from(self.norm_den))
    }

    pub fn vector(&self, i: usize) -> QVec {
        self.shift
            .iter()
            .zip(&self.offsets[i])
            .map(|(s, &x)| s + rat(x, 1))
            .collect()
    }

    pub fn vector_f64(&self, i: usize) -> Vec<f64> {
        self.shift
            .iter()
            .zip(&self.offsets[i])
            .map(|(s, &x)| s.to_f64().unwrap() + x as f64)
            .collect()
    }
}

struct Scaled {
    a: Vec<i128>,
    sden: i128,
    norm_den: i128,
    limit_num: BigInt,
    limit_den: BigInt,
}

fn scaled(form: &QuadForm, shift: &[BigRational], bound: &BigRational) -> Scaled {
    let sden = lcm_denominators(shift.iter());
    let a = shift
        .iter()
        .map(|s| (s * rat_int(&sden)).to_integer().to_i128().expect("shift fits"))
        .collect();
    let sden = sden.to_i128().unwrap();
    let norm_den = form.den * sden * sden;
    Scaled {
        a,
        sden,
        norm_den,
        limit_num: bound.numer() * BigInt::from(norm_den),
        limit_den: bound.denom().clone(),
    }
}

fn exact_norm(form: &QuadForm, sc: &Scaled, x: &[i64]) -> i128 {
    let w: Vec<i128> = sc.a.iter().zip(x).map(|(&a, &x)| a + sc.sden * x as i128).collect();
    let mut s = 0i128;
    for i in 0..w.len() {
        if w[i] == 0 {
            continue;
        }
        let mut t = 0i128;
        for j in 0..w.len() {
            t += form.gram_int[i][j] * w[j];
        }
        s += w[i] * t;
    }
    s
}

fn within(sc: &Scaled, n: i128) -> bool {
    BigInt::from(n) * &sc.limit_den <= sc.limit_num
}

/// All vectors of `shift + L` with norm ≤ `bound`, in lexicographic order of
/// their coordinates (Fincke–Pohst).
pub fn enumerate_coset(
    form: &QuadForm,
    shift: &[BigRational],
    bound: &BigRational,
    cap: usize,
) -> Result<Enumeration> {
    let r = form.rank();
    if shift.len() != r {
        return Err(OrbiError::DimensionMismatch { expected: r, got: shift.len() });
    }
    let sc = scaled(form, shift, bound);
    let mut out: Vec<(Vec<i64>, i128)> = Vec::new();
    if bound.is_negative() {
        return Ok(finish(shift, out, sc.norm_den));
    }
    let b = bound.to_f64().unwrap();
    let slack = 1e-9 * (1.0 + b.abs());
    let s: Vec<f64> = shift.iter().map(|x| x.to_f64().unwrap()).collect();
    let mut y = vec![0f64; r];
    let mut x = vec![0i64; r];
    if r == 0 {
        out.push((Vec::new(), 0));
        return Ok(finish(shift, out, sc.norm_den));
    }
    fp_rec(form, &sc, &s, b + slack, r - 1, 0.0, &mut y, &mut x, &mut out, cap)?;
    out.sort_by(|p, q| p.0.cmp(&q.0));
    Ok(finish(shift, out, sc.norm_den))
}

#[allow(clippy::too_many_arguments)]
fn fp_rec(
    form: &QuadForm,
    sc: &Scaled,
    s: &[f64],
    b: f64,
    i: usize,
    used: f64,
    y: &mut [f64],
    x: &mut [i64],
    out: &mut Vec<(Vec<i64>, i128)>,
    cap: usize,
) -> Result<()> {
    let r = y.len();
    let q = &form.fp;
    let mut c = 0.0;
    for j in i + 1..r {
        c -= q[i][j] * y[j];
    }
    let rem = (b - used).max(0.0);
    let rad = (rem / q[i][i]).sqrt() + 1e-9;
    let lo = (c - rad - s[i]).ceil() as i64;
    let hi = (c + rad - s[i]).floor() as i64;
    for xi in lo..=hi {
        x[i] = xi;
        y[i] = s[i] + xi as f64;
        let t = y[i] - c;
        let u = used + q[i][i] * t * t;
        if u > b + 1e-9 * (1.0 + b) {
            continue;
        }
        if i == 0 {
            let n = exact_norm(form, sc, x);
            if within(sc, n) {
                if out.len() >= cap {
                    return Err(OrbiError::BoundTooLarge { cap });
                }
                out.push((x.to_vec(), n));
            }
        } else {
            fp_rec(form, sc, s, b, i - 1, u, y, x, out, cap)?;
        }
    }
    Ok(())
}

fn finish(shift: &[BigRational], v: Vec<(Vec<i64>, i128)>, norm_den: i128) -> Enumeration {
    let (offsets, norm_num) = v.into_iter().unzip();
    Enumeration { shift: shift.to_vec(), offsets, norm_num, norm_den }
}

/// Naive box search over a coordinate box that provably contains every
/// vector of norm ≤ `bound` (|yᵢ|² ≤ bound·(G⁻¹)ᵢᵢ). Kept as a test oracle.
pub fn enumerate_box(form: &QuadForm, shift: &[BigRational], bound: &BigRational) -> Enumeration {
    let r = form.rank();
    let sc = scaled(form, shift, bound);
    let b = bound.to_f64().unwrap().max(0.0);
    let ranges: Vec<(i64, i64)> = (0..r)
        .map(|i| {
            let rad = (b * form.inv_diag[i]).sqrt() + 1e-6;
            let s = shift[i].to_f64().unwrap();
            ((-rad - s).ceil() as i64, (rad - s).floor() as i64)
        })
        .collect();
    let mut out = Vec::new();
    let mut x: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    if ranges.iter().any(|(lo, hi)| lo > hi) {
        return finish(shift, out, sc.norm_den);
    }
    loop {
        let n = exact_norm(form, &sc, &x);
        if within(&sc, n) && !bound.is_negative() {
            out.push((x.clone(), n));
        }
        // Odometer increment, last coordinate fastest (lexicographic order).
        let mut k = r;
        loop {
            if k == 0 {
                return finish(shift, out, sc.norm_den);
            }
            k -= 1;
            if x[k] < ranges[k].1 {
                x[k] += 1;
                for j in k + 1..r {
                    x[j] = ranges[j].0;
                }
                break;
            }
        }
    }
}

/// Integral even positive-definite lattice given by its Gram matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    gram: Vec<Vec<i64>>,
    form: QuadForm,
}

/// Coordinates (in the lattice basis) of an integral lattice vector.
pub type LatticeVector = Vec<i64>;

/// Exact rational coordinates of a vector of Q ⊗ ℚ; lies in Q* iff
/// `gram · coords` is integral.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DualVector(pub QVec);

impl DualVector {
    pub fn zero(r: usize) -> Self {
        DualVector(vec![BigRational::zero(); r])
    }

    pub fn from_ints(v: &[i64]) -> Self {
        DualVector(v.iter().map(|&x| rat(x, 1)).collect())
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.0
    }
}

/// Validate a Gram matrix and build the lattice.
pub fn new_lattice(gram: Vec<Vec<i64>>) -> Result<Lattice> {
    let n = gram.len();
    for row in &gram {
        if row.len() != n {
            return Err(OrbiError::DimensionMismatch { expected: n, got: row.len() });
        }
    }
    for i in 0..n {
        for j in 0..i {
            if gram[i][j] != gram[j][i] {
                return Err(OrbiError::NotSymmetric(i, j));
            }
        }
    }
    for (i, row) in gram.iter().enumerate() {
        if row[i] % 2 != 0 {
            return Err(OrbiError::NotEven { index: i, value: row[i] });
        }
    }
    let form = QuadForm::from_int(&gram)?;
    Ok(Lattice { gram, form })
}

impl Lattice {
    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn form(&self) -> &QuadForm {
        &self.form
    }

    pub fn gram_q(&self) -> &QMat {
        self.form.gram()
    }

    pub fn det(&self) -> BigInt {
        self.form.det().to_integer()
    }

    pub fn is_dual(&self, v: &DualVector) -> bool {
        is_integral(&qmat_apply(self.gram_q(), &v.0))
    }

    /// Basis of Q* as rows (the rows of G⁻¹).
    pub fn dual_basis(&self) -> QMat {
        qinverse(self.gram_q()).expect("nonsingular")
    }

    pub fn as_sublattice(&self) -> Sublattice {
        Sublattice::new(self, to_qmat(&identity_i(self.rank())))
    }

    pub fn dual_sublattice(&self) -> Sublattice {
        Sublattice::new(self, self.dual_basis())
    }
}

/// (v|w) = vᵀ G w.
pub fn bilinear(l: &Lattice, v: &DualVector, w: &DualVector) -> Result<BigRational> {
    let r = l.rank();
    for x in [v, w] {
        if x.0.len() != r {
            return Err(OrbiError::DimensionMismatch { expected: r, got: x.0.len() });
        }
    }
    Ok(qform(l.gram_q(), &v.0, &w.0))
}

/// Every γ ∈ shift + L with (γ|γ) ≤ bound, lexicographically ordered.
pub fn enumerate_vectors(l: &Lattice, shift: &DualVector, bound: &BigRational) -> Result<Vec<DualVector>> {
    let e = enumerate_coset(l.form(), &shift.0, bound, DEFAULT_ENUMERATION_CAP)?;
    Ok((0..e.len()).map(|i| DualVector(e.vector(i))).collect())
}

/// A lattice spanned by rational rows inside the ambient space of a lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct Sublattice {
    basis: QMat,
    ambient_gram: QMat,
}

impl Sublattice {
    /// Span of the given rows; the basis is HNF-reduced (and may be of
    /// smaller size if the rows were dependent over ℤ-span).
    pub fn new(ambient: &Lattice, rows: QMat) -> Self {
        Sublattice::in_space(ambient.gram_q().clone(), rows)
    }

    pub fn in_space(ambient_gram: QMat, rows: QMat) -> Self {
        let basis = qhnf_rows(&rows);
        Sublattice { basis, ambient_gram }
    }

    pub fn from_int_rows(ambient: &Lattice, rows: &IMat) -> Self {
        Sublattice::new(ambient, to_qmat(rows))
    }

    pub fn basis(&self) -> &QMat {
        &self.basis
    }

    pub fn ambient_gram(&self) -> &QMat {
        &self.ambient_gram
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn dim(&self) -> usize {
        self.ambient_gram.len()
    }

    pub fn gram(&self) -> QMat {
        let gb: QMat = self.basis.iter().map(|b| qmat_apply(&self.ambient_gram, b)).collect();
        self.basis.iter().map(|a| gb.iter().map(|g| qdot(a, g)).collect()).collect()
    }

    pub fn form(&self) -> QuadForm {
        QuadForm::new(self.gram()).expect("restriction of a positive-definite form")
    }

    /// Determinant of the induced Gram matrix (squared covolume).
    pub fn discriminant(&self) -> BigRational {
        if self.rank() == 0 {
            return BigRational::one();
        }
        qdet(&self.gram())
    }

    /// Coordinates of an ambient vector in this basis, if it lies in the span.
    pub fn coords_of(&self, v: &[BigRational]) -> Option<QVec> {
        solve_rows(&self.basis, v)
    }

    pub fn contains(&self, v: &[BigRational]) -> bool {
        self.coords_of(v).is_some_and(|c| is_integral(&c))
    }

    pub fn to_ambient(&self, c: &[BigRational]) -> QVec {
        qvec_mul(c, &self.basis)
    }

    pub fn contains_lattice(&self, t: &Sublattice) -> bool {
        t.basis.iter().all(|b| self.contains(b))
    }

    /// Dual lattice inside the rational span of this sublattice.
    pub fn dual(&self) -> Sublattice {
        let inv = qinverse(&self.gram()).expect("nondegenerate");
        Sublattice { basis: qhnf_rows(&qmul(&inv, &self.basis)), ambient_gram: self.ambient_gram.clone() }
    }
}

/// |S/T| for T ⊆ S of the same rank.
pub fn sublattice_index(s: &Sublattice, t: &Sublattice) -> Result<BigInt> {
    if s.rank() != t.rank() {
        return Err(OrbiError::RankMismatch(s.rank(), t.rank()));
    }
    if s.rank() == 0 {
        return Ok(BigInt::one());
    }
    let mut coords = Vec::new();
    for b in t.basis() {
        match s.coords_of(b) {
            Some(c) if is_integral(&c) => coords.push(c),
            _ => return Err(OrbiError::NotSublattice),
        }
    }
    Ok(qdet(&coords).abs().to_integer())
}

/// S ∩ T, via the integer left kernel of the stacked bases.
pub fn intersect(s: &Sublattice, t: &Sublattice) -> Sublattice {
    let gram = s.ambient_gram.clone();
    if s.rank() == 0 || t.rank() == 0 {
        return Sublattice { basis: Vec::new(), ambient_gram: gram };
    }
    let d = lcm_denominators(s.basis.iter().chain(t.basis.iter()).flatten());
    let dq = rat_int(&d);
    let mut stacked: IMat = s
        .basis
        .iter()
        .map(|r| r.iter().map(|x| (x * &dq).to_integer()).collect())
        .collect();
    stacked.extend(t.basis.iter().map(|r| r.iter().map(|x| -(x * &dq).to_integer()).collect::<Vec<_>>()));
    let ker = left_kernel(&stacked);
    let k = s.rank();
    let rows: QMat = ker
        .iter()
        .map(|z| {
            let x: QVec = z[..k].iter().map(rat_int).collect();
            qvec_mul(&x, &s.basis)
        })
        .collect();
    Sublattice::in_space(gram, rows)
}

/// A finite quotient S/T of lattices with T ⊆ S of equal rank, presented via
/// the Smith normal form of the inclusion.
///
/// Elements are keyed by their SNF coordinates `c` with `0 ≤ cᵢ < dᵢ`; the
/// canonical representative of a key is `Σ cᵢ gᵢ` for the SNF generators gᵢ.
#[derive(Debug, Clone)]
pub struct FiniteQuotient {
    outer: Sublattice,
    orders_all: Vec<BigInt>,
    v: IMat,
    vinv: IMat,
    active: Vec<usize>,
}

pub type CosetKey = Vec<u64>;

impl FiniteQuotient {
    pub fn new(outer: &Sublattice, inner: &Sublattice) -> Result<Self> {
        if outer.rank() != inner.rank() {
            return Err(OrbiError::RankMismatch(outer.rank(), inner.rank()));
        }
        let mut a: IMat = Vec::new();
        for b in inner.basis() {
            match outer.coords_of(b) {
                Some(c) if is_integral(&c) => a.push(c.iter().map(|x| x.to_integer()).collect()),
                _ => return Err(OrbiError::NotSublattice),
            }
        }
        let k = a.len();
        let (_u, d, v) = if k == 0 { (Vec::new(), Vec::new(), Vec::new()) } else { snf(&a) };
        let vinv = if k == 0 { Vec::new() } else { iinverse_unimodular(&v) };
        let active = (0..k).filter(|&i| d[i] > BigInt::one()).collect();
        Ok(FiniteQuotient { outer: outer.clone(), orders_all: d, v, vinv, active })
    }

    pub fn outer(&self) -> &Sublattice {
        &self.outer
    }

    /// Invariant factors > 1, in divisibility order.
    pub fn orders(&self) -> Vec<u64> {
        self.active.iter().map(|&i| self.orders_all[i].to_u64().expect("small group")).collect()
    }

    pub fn cardinality(&self) -> u64 {
        self.orders().iter().product()
    }

    /// Key of an ambient vector, or `None` if it is not in the outer lattice.
    pub fn key(&self, v: &[BigRational]) -> Option<CosetKey> {
        let x = self.outer.coords_of(v)?;
        if !is_integral(&x) {
            return None;
        }
        let xi: Vec<BigInt> = x.iter().map(|t| t.to_integer()).collect();
        Some(
            self.active
                .iter()
                .map(|&i| {
                    let mut s = BigInt::zero();
                    for (k, xk) in xi.iter().enumerate() {
                        s += xk * &self.v[k][i];
                    }
                    s.mod_floor(&self.orders_all[i]).to_u64().unwrap()
                })
                .collect(),
        )
    }

    /// Canonical ambient representative of a key.
    pub fn rep(&self, key: &[u64]) -> QVec {
        let k = self.orders_all.len();
        let mut c = vec![BigRational::zero(); k];
        for (slot, &i) in self.active.iter().enumerate() {
            c[i] = rat(key[slot] as i64, 1);
        }
        // x = c · V⁻¹ (coordinates in the outer basis)
        let vq = to_qmat(&self.vinv);
        let x = qvec_mul(&c, &vq);
        self.outer.to_ambient(&x)
    }

    pub fn generators(&self) -> Vec<QVec> {
        (0..self.active.len())
            .map(|s| {
                let mut key = vec![0u64; self.active.len()];
                key[s] = 1;
                self.rep(&key)
            })
            .collect()
    }

    /// All keys in lexicographic order.
    pub fn keys(&self) -> Vec<CosetKey> {
        let orders = self.orders();
        let mut out = Vec::new();
        let mut key = vec![0u64; orders.len()];
        loop {
            out.push(key.clone());
            let mut i = orders.len();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                key[i] += 1;
                if key[i] < orders[i] {
                    break;
                }
                key[i] = 0;
            }
        }
    }

    pub fn add_keys(&self, a: &[u64], b: &[u64]) -> CosetKey {
        a.iter().zip(b).zip(self.orders()).map(|((x, y), d)| (x + y) % d).collect()
    }
}

/// The discriminant group Q*/Q.
#[derive(Debug, Clone)]
pub struct DiscriminantGroup {
    pub orders: Vec<u64>,
    pub generators: Vec<DualVector>,
    pub cardinality: u64,
    pub quotient: FiniteQuotient,
}

impl DiscriminantGroup {
    pub fn key(&self, v: &DualVector) -> Option<CosetKey> {
        self.quotient.key(&v.0)
    }

    pub fn rep(&self, key: &[u64]) -> DualVector {
        DualVector(self.quotient.rep(key))
    }

    /// Canonical representatives of all cosets, ordered by key.
    pub fn representatives(&self) -> Vec<DualVector> {
        self.quotient.keys().iter().map(|k| self.rep(k)).collect()
    }
}

pub fn discriminant_group(l: &Lattice) -> DiscriminantGroup {
    let quotient = FiniteQuotient::new(&l.dual_sublattice(), &l.as_sublattice()).expect("Q ⊆ Q*");
    let orders = quotient.orders();
    let generators = quotient.generators().into_iter().map(DualVector).collect();
    let cardinality = orders.iter().product();
    DiscriminantGroup { orders, generators, cardinality, quotient }
}
