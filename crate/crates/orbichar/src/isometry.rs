//! Finite-order isometries and the lattice data they determine: the
//! projector π₀ onto the fixed space, the fixed and perpendicular
//! sublattices, Q̄, the defect, Δ_σ, and the orbit structure on Q*/Q.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{OrbiError, Result};
use crate::lattice::*;
use crate::linalg::*;

pub const ORDER_CAP: u32 = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct Isometry {
    lattice: Lattice,
    matrix: Vec<Vec<i64>>,
    order: u32,
}

/// Eigenspace dimensions of σ on 𝔥 = ℂ ⊗ Q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EigenData {
    /// `dims[j] = dim 𝔥_{j/N}`
    pub dims: Vec<usize>,
    pub r0: usize,
    /// `dim 𝔥_{1/p}` for prime order (the number of p-cycles for permutations)
    pub d: usize,
    /// `r0 - d` for prime order (the number of singleton orbits for permutations)
    pub e: usize,
}

impl EigenData {
    pub fn dim_perp(&self) -> usize {
        self.dims.iter().sum::<usize>() - self.r0
    }
}

/// Cosets of Q*/Q fixed by σ, and one representative per order-p orbit.
#[derive(Debug, Clone)]
pub struct OrbitDecomposition {
    pub fixed: Vec<CosetKey>,
    pub orbits: Vec<CosetKey>,
}

pub fn is_prime(n: u32) -> bool {
    n >= 2 && (2..).take_while(|k| k * k <= n).all(|k| !n.is_multiple_of(k))
}

fn imat_mul_i64(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| a[i][k] * b[k][j]).sum()).collect()).collect()
}

fn id_i64(n: usize) -> Vec<Vec<i64>> {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

pub fn new_isometry(l: &Lattice, u: Vec<Vec<i64>>) -> Result<Isometry> {
    let r = l.rank();
    if u.len() != r || u.iter().any(|row| row.len() != r) {
        return Err(OrbiError::DimensionMismatch { expected: r, got: u.len() });
    }
    // Uᵀ G U = G
    let g = l.gram();
    for i in 0..r {
        for j in 0..r {
            let mut s = 0i64;
            for a in 0..r {
                for b in 0..r {
                    s += u[a][i] * g[a][b] * u[b][j];
                }
            }
            if s != g[i][j] {
                return Err(OrbiError::NotIsometry);
            }
        }
    }
    let id = id_i64(r);
    let mut p = u.clone();
    let mut order = 1;
    while p != id {
        order += 1;
        if order > ORDER_CAP {
            return Err(OrbiError::InfiniteOrder(ORDER_CAP));
        }
        p = imat_mul_i64(&p, &u);
    }
    Ok(Isometry { lattice: l.clone(), matrix: u, order })
}

impl Isometry {
    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.matrix
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    pub fn prime_order(&self) -> Result<u32> {
        if is_prime(self.order) {
            Ok(self.order)
        } else {
            Err(OrbiError::UnsupportedOrder(self.order))
        }
    }

    pub fn power(&self, k: u32) -> Vec<Vec<i64>> {
        let mut p = id_i64(self.rank());
        for _ in 0..k % self.order {
            p = imat_mul_i64(&p, &self.matrix);
        }
        p
    }

    pub fn matrix_q(&self) -> QMat {
        to_qmat(&to_imat(&self.matrix))
    }

    /// σᵏ applied to a coordinate vector.
    pub fn apply_pow(&self, k: u32, v: &[BigRational]) -> QVec {
        qmat_apply(&to_qmat(&to_imat(&self.power(k))), v)
    }

    pub fn apply(&self, v: &[BigRational]) -> QVec {
        qmat_apply(&self.matrix_q(), v)
    }

    /// Σ_{m<N} σᵐ as an integer matrix.
    fn norm_map(&self) -> Vec<Vec<i64>> {
        let r = self.rank();
        let mut s = vec![vec![0i64; r]; r];
        let mut p = id_i64(r);
        for _ in 0..self.order {
            for i in 0..r {
                for j in 0..r {
                    s[i][j] += p[i][j];
                }
            }
            p = imat_mul_i64(&p, &self.matrix);
        }
        s
    }

    pub fn eigen_data(&self) -> EigenData {
        let n = self.order as usize;
        let traces: Vec<i64> = (0..n)
            .map(|m| {
                let p = self.power(m as u32);
                (0..self.rank()).map(|i| p[i][i]).sum()
            })
            .collect();
        let dims: Vec<usize> = (0..n)
            .map(|j| {
                let mut re = 0.0;
                for (m, &t) in traces.iter().enumerate() {
                    let ang = 2.0 * std::f64::consts::PI * (j * m) as f64 / n as f64;
                    re += t as f64 * ang.cos();
                }
                (re / n as f64).round() as usize
            })
            .collect();
        let r0 = dims[0];
        let (d, e) = if n > 1 && is_prime(self.order) { (dims[1], r0 - dims[1].min(r0)) } else { (0, r0) };
        EigenData { dims, r0, d, e }
    }
}

/// π₀ = (1/N) Σ σᵐ.
pub fn fixed_projector(s: &Isometry) -> QMat {
    let n = BigRational::from_integer(BigInt::from(s.order));
    to_qmat(&to_imat(&s.norm_map()))
        .into_iter()
        .map(|r| r.into_iter().map(|x| x / &n).collect())
        .collect()
}

/// M = Q ∩ 𝔥₀, the integer kernel of 1 − σ.
pub fn fixed_sublattice(s: &Isometry) -> Sublattice {
    let r = s.rank();
    let m: Vec<Vec<i64>> =
        (0..r).map(|i| (0..r).map(|j| i64::from(i == j) - s.matrix[i][j]).collect()).collect();
    Sublattice::from_int_rows(&s.lattice, &right_kernel(&to_imat(&m)))
}

/// Q ∩ 𝔥_⊥, the integer kernel of Σ σᵐ.
pub fn perp_sublattice(s: &Isometry) -> Sublattice {
    Sublattice::from_int_rows(&s.lattice, &right_kernel(&to_imat(&s.norm_map())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    Q,
    QDual,
}

/// π₀(Q) or π₀(Q*) inside 𝔥₀.
pub fn projected_lattice(s: &Isometry, which: Which) -> Sublattice {
    let pi = fixed_projector(s);
    let gens: QMat = match which {
        Which::Q => transpose(&pi),
        Which::QDual => {
            let dual = s.lattice.dual_basis();
            dual.iter().map(|b| qmat_apply(&pi, b)).collect()
        }
    };
    Sublattice::new(&s.lattice, gens)
}

/// Q* ∩ 𝔥₀.
pub fn fixed_dual_sublattice(s: &Isometry) -> Sublattice {
    let r = s.rank();
    let ginv = s.lattice.dual_basis();
    let one_minus: QMat = (0..r)
        .map(|i| (0..r).map(|j| rat(i64::from(i == j) - s.matrix[i][j], 1)).collect())
        .collect();
    // x ∈ ℤʳ with (1 − σ) G⁻¹ x = 0, scaled to an integer system.
    let m = qmul(&one_minus, &ginv);
    let d = lcm_denominators(m.iter().flatten());
    let mi: IMat = m.iter().map(|row| row.iter().map(|x| (x * rat_int(&d)).to_integer()).collect()).collect();
    let ker = right_kernel(&mi);
    let rows: QMat = ker.iter().map(|x| qmat_apply(&ginv, &x.iter().map(rat_int).collect::<Vec<_>>())).collect();
    Sublattice::new(&s.lattice, rows)
}

/// (1 − σ)Q* as a sublattice of Q ⊗ ℚ.
pub fn one_minus_sigma_dual(s: &Isometry) -> Sublattice {
    let ginv = s.lattice.dual_basis();
    let rows: QMat = ginv
        .iter()
        .map(|b| {
            let sb = s.apply(b);
            b.iter().zip(&sb).map(|(x, y)| x - y).collect()
        })
        .collect();
    Sublattice::new(&s.lattice, rows)
}

/// (1 − σ)Q.
pub fn one_minus_sigma(s: &Isometry) -> Sublattice {
    let r = s.rank();
    let rows: QMat = (0..r)
        .map(|i| (0..r).map(|j| rat(i64::from(i == j) - s.matrix[j][i], 1)).collect())
        .collect();
    Sublattice::new(&s.lattice, rows)
}

/// Q̄: the kernel of α ↦ (α|σ^{N/2}α) mod 2 when N is even, Q otherwise.
pub fn qbar_sublattice(s: &Isometry) -> Sublattice {
    let r = s.rank();
    if s.order % 2 == 1 {
        return s.lattice.as_sublattice();
    }
    let half = s.power(s.order / 2);
    let g = s.lattice.gram();
    let parity = |i: usize| -> bool {
        let mut t = 0i64;
        for a in 0..r {
            t += g[i][a] * half[a][i];
        }
        t.rem_euclid(2) == 1
    };
    let failing: Vec<usize> = (0..r).filter(|&i| parity(i)).collect();
    if failing.is_empty() {
        return s.lattice.as_sublattice();
    }
    let f = failing[0];
    let unit = |i: usize| -> Vec<i64> { (0..r).map(|j| i64::from(i == j)).collect() };
    let mut rows: Vec<Vec<i64>> = Vec::new();
    for i in 0..r {
        if i == f {
            rows.push(unit(f).into_iter().map(|x| 2 * x).collect());
        } else if failing.contains(&i) {
            rows.push(unit(i).iter().zip(unit(f)).map(|(a, b)| a + b).collect());
        } else {
            rows.push(unit(i));
        }
    }
    Sublattice::from_int_rows(&s.lattice, &to_imat(&rows))
}

/// Restrict σ to a σ-stable full-rank sublattice, returning the sublattice as
/// a lattice in its own basis together with the induced isometry.
pub fn restrict(s: &Isometry, sub: &Sublattice) -> Result<(Lattice, Isometry)> {
    let basis = sub.basis();
    if basis.len() != s.rank() {
        return Err(OrbiError::RankMismatch(s.rank(), basis.len()));
    }
    let gram: Vec<Vec<i64>> = sub
        .gram()
        .iter()
        .map(|r| r.iter().map(|x| x.to_integer().to_i64().unwrap()).collect())
        .collect();
    let lat = new_lattice(gram)?;
    let mut cols: Vec<Vec<i64>> = Vec::new();
    for b in basis {
        let img = s.apply(b);
        let c = sub.coords_of(&img).filter(|c| is_integral(c)).ok_or(OrbiError::NotSublattice)?;
        cols.push(c.iter().map(|x| x.to_integer().to_i64().unwrap()).collect());
    }
    let u = transpose(&cols);
    let iso = new_isometry(&lat, u)?;
    Ok((lat, iso))
}

pub fn index_of(s: &Sublattice, t: &Sublattice) -> u64 {
    sublattice_index(s, t).expect("nested lattices").to_u64().expect("small index")
}

/// The defect d(σ), with d² = |(Q∩𝔥_⊥)/(Q∩(1−σ)Q*)|.
pub fn defect(s: &Isometry) -> Result<u64> {
    let perp = perp_sublattice(s);
    if perp.rank() == 0 {
        return Ok(1);
    }
    let omq = one_minus_sigma(s);
    if sublattice_index(&perp, &omq)? == BigInt::one() {
        return Ok(1);
    }
    let qs = intersect(&s.lattice.as_sublattice(), &one_minus_sigma_dual(s));
    let idx = index_of(&perp, &qs);
    let root = (idx as f64).sqrt().round() as u64;
    if root * root != idx {
        return Err(OrbiError::NotPerfectSquare(idx.to_string()));
    }
    Ok(root)
}

/// Δ_σ = ¼ Σ_{j=1}^{N−1} (j/N)(1 − j/N) dim 𝔥_{j/N}.
pub fn delta_sigma(s: &Isometry) -> BigRational {
    let e = s.eigen_data();
    let n = s.order as i64;
    let mut t = BigRational::zero();
    for j in 1..n {
        t += rat(j * (n - j) * e.dims[j as usize] as i64, n * n);
    }
    t / rat(4, 1)
}

/// tr s where σ = e^{−2πi s} with the eigenvalues of s in (−1, 0].
pub fn trace_s(s: &Isometry) -> BigRational {
    let e = s.eigen_data();
    let n = s.order as i64;
    let mut t = BigRational::zero();
    for j in 1..n {
        t -= rat(j * e.dims[j as usize] as i64, n);
    }
    t
}

/// det of (1 − σᵏ) restricted to 𝔥_⊥, computed in a basis of Q∩𝔥_⊥.
pub fn det_perp_one_minus(s: &Isometry, k: u32) -> BigRational {
    let perp = perp_sublattice(s);
    if perp.rank() == 0 {
        return BigRational::one();
    }
    let m: QMat = perp
        .basis()
        .iter()
        .map(|b| {
            let img = s.apply_pow(k, b);
            let diff: QVec = b.iter().zip(&img).map(|(x, y)| x - y).collect();
            perp.coords_of(&diff).expect("σ preserves 𝔥_⊥")
        })
        .collect();
    qdet(&m)
}

/// Fixed cosets and order-N orbit representatives (smallest key in each orbit).
pub fn orbit_decomposition(s: &Isometry) -> Result<OrbitDecomposition> {
    s.prime_order()?;
    let disc = discriminant_group(&s.lattice);
    let mut fixed = Vec::new();
    let mut orbits = Vec::new();
    let mut seen: BTreeSet<CosetKey> = BTreeSet::new();
    for key in disc.quotient.keys() {
        if seen.contains(&key) {
            continue;
        }
        let v = disc.quotient.rep(&key);
        let mut orbit = vec![key.clone()];
        let mut w = s.apply(&v);
        loop {
            let k = disc.quotient.key(&w).expect("σ preserves Q*");
            if k == key {
                break;
            }
            orbit.push(k);
            w = s.apply(&w);
        }
        seen.extend(orbit.iter().cloned());
        if orbit.len() == 1 {
            fixed.push(key);
        } else {
            orbits.push(key);
        }
    }
    debug_assert_eq!(fixed.len() + s.order as usize * orbits.len(), disc.cardinality as usize);
    Ok(OrbitDecomposition { fixed, orbits })
}

/// |Z_μ| = p^{dim 𝔥_⊥/(p−1)} / (d(σ)² |π₀(Q)/M|).
pub fn z_mu_cardinality(s: &Isometry) -> Result<u64> {
    let p = s.prime_order()? as u64;
    let e = s.eigen_data();
    let num = p.pow((e.dim_perp() / (p as usize - 1)) as u32);
    let d = defect(s)?;
    let idx = index_of(&projected_lattice(s, Which::Q), &fixed_sublattice(s));
    let den = d * d * idx;
    if !num.is_multiple_of(den) {
        return Err(OrbiError::NonIntegerCardinality(format!("{num}/{den}")));
    }
    Ok(num / den)
}

/// Inverse of `a` modulo a prime `p`.
pub fn modinv(a: u64, p: u64) -> u64 {
    let a = a % p;
    (1..p).find(|&x| (a * x) % p == 1).expect("invertible mod p")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a3() -> Isometry {
        let l = new_lattice(vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]]).unwrap();
        new_isometry(&l, vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]).unwrap()
    }

    #[test]
    fn a3_data() {
        let s = a3();
        assert_eq!(s.order(), 2);
        assert_eq!(delta_sigma(&s), rat(1, 16));
        assert_eq!(defect(&s).unwrap(), 1);
        assert_eq!(z_mu_cardinality(&s).unwrap(), 1);
        assert_eq!(fixed_sublattice(&s).rank(), 2);
        assert_eq!(perp_sublattice(&s).rank(), 1);
        let od = orbit_decomposition(&s).unwrap();
        assert_eq!((od.fixed.len(), od.orbits.len()), (2, 1));
        assert_eq!(qbar_sublattice(&s), s.lattice().as_sublattice());
    }

    #[test]
    fn a2_swap_needs_qbar() {
        let l = new_lattice(vec![vec![2, -1], vec![-1, 2]]).unwrap();
        let s = new_isometry(&l, vec![vec![0, 1], vec![1, 0]]).unwrap();
        let qb = qbar_sublattice(&s);
        assert_eq!(index_of(&l.as_sublattice(), &qb), 2);
        let (lb, sb) = restrict(&s, &qb).unwrap();
        assert_eq!(lb.det(), BigInt::from(12));
        assert_eq!(z_mu_cardinality(&sb).unwrap(), 2);
    }

    #[test]
    fn identity_has_order_one() {
        let l = new_lattice(vec![vec![2]]).unwrap();
        let s = new_isometry(&l, vec![vec![1]]).unwrap();
        assert_eq!(s.order(), 1);
        assert_eq!(delta_sigma(&s), BigRational::zero());
        assert_eq!(fixed_projector(&s), identity_q(1));
    }

    #[test]
    fn non_isometry_rejected() {
        let l = new_lattice(vec![vec![2, -1], vec![-1, 2]]).unwrap();
        assert_eq!(new_isometry(&l, vec![vec![1, 1], vec![0, 1]]), Err(OrbiError::NotIsometry));
    }
}
