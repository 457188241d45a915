//! Exact integer and rational linear algebra on small dense matrices.
//!
//! Everything here works over `BigInt`/`BigRational`; matrices are row-major
//! `Vec<Vec<_>>` and lattices are always spanned by *rows*.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type IMat = Vec<Vec<BigInt>>;
pub type QMat = Vec<Vec<BigRational>>;
pub type QVec = Vec<BigRational>;

pub fn int(v: i64) -> BigInt {
    BigInt::from(v)
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: &BigInt) -> BigRational {
    BigRational::from_integer(n.clone())
}

pub fn to_imat(m: &[Vec<i64>]) -> IMat {
    m.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
}

pub fn to_qmat(m: &IMat) -> QMat {
    m.iter().map(|r| r.iter().map(rat_int).collect()).collect()
}

pub fn identity_q(n: usize) -> QMat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect()
}

pub fn identity_i(n: usize) -> IMat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

pub fn transpose<T: Clone>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len()).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn qmul(a: &QMat, b: &QMat) -> QMat {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut s = BigRational::zero();
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            s += &row[k] * &b[k][j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

pub fn imul(a: &IMat, b: &IMat) -> IMat {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut s = BigInt::zero();
                    for k in 0..inner {
                        s += &row[k] * &b[k][j];
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// Row vector times matrix.
pub fn qvec_mul(v: &[BigRational], m: &QMat) -> QVec {
    let cols = if m.is_empty() { 0 } else { m[0].len() };
    (0..cols)
        .map(|j| {
            let mut s = BigRational::zero();
            for (k, x) in v.iter().enumerate() {
                if !x.is_zero() {
                    s += x * &m[k][j];
                }
            }
            s
        })
        .collect()
}

/// Matrix times column vector.
pub fn qmat_apply(m: &QMat, v: &[BigRational]) -> QVec {
    m.iter()
        .map(|row| {
            let mut s = BigRational::zero();
            for (a, b) in row.iter().zip(v) {
                if !a.is_zero() && !b.is_zero() {
                    s += a * b;
                }
            }
            s
        })
        .collect()
}

pub fn qdot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    let mut s = BigRational::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            s += x * y;
        }
    }
    s
}

/// `aᵀ G b` for a rational Gram matrix.
pub fn qform(gram: &QMat, a: &[BigRational], b: &[BigRational]) -> BigRational {
    qdot(a, &qmat_apply(gram, b))
}

pub fn is_integral(v: &[BigRational]) -> bool {
    v.iter().all(|x| x.is_integer())
}

pub fn lcm_denominators<'a>(it: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    it.into_iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

/// Fractional part in `[0, 1)`.
pub fn frac(x: &BigRational) -> BigRational {
    x - x.floor()
}

/// Determinant by fraction-free elimination over the rationals.
pub fn qdet(m: &QMat) -> BigRational {
    let n = m.len();
    let mut a = m.clone();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
            return BigRational::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        let piv = a[c][c].clone();
        det *= &piv;
        for r in c + 1..n {
            if a[r][c].is_zero() {
                continue;
            }
            let f = &a[r][c] / &piv;
            for k in c..n {
                let t = &f * &a[c][k];
                a[r][k] -= t;
            }
        }
    }
    det
}

pub fn idet(m: &IMat) -> BigInt {
    let d = qdet(&to_qmat(m));
    debug_assert!(d.is_integer());
    d.to_integer()
}

pub fn qinverse(m: &QMat) -> Option<QMat> {
    let n = m.len();
    let mut a: QMat = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
            r
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(p, c);
        let piv = a[c][c].clone();
        for k in 0..2 * n {
            a[c][k] = &a[c][k] / &piv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                for k in 0..2 * n {
                    let t = &f * &a[c][k];
                    a[r][k] -= t;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Reduced row echelon form; returns (rref, pivot columns).
pub fn qrref(m: &QMat) -> (QMat, Vec<usize>) {
    let mut a = m.clone();
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(p, r);
        let piv = a[r][c].clone();
        for k in c..cols {
            a[r][k] = &a[r][k] / &piv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for k in c..cols {
                    let t = &f * &a[r][k];
                    a[i][k] -= t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn qrank(m: &QMat) -> usize {
    qrref(m).1.len()
}

/// Solve `x · B = v` for a row vector `x`, where the rows of `B` are
/// linearly independent. Returns `None` when `v` is outside the row span.
pub fn solve_rows(b: &QMat, v: &[BigRational]) -> Option<QVec> {
    let k = b.len();
    if k == 0 {
        return if v.iter().all(|x| x.is_zero()) { Some(Vec::new()) } else { None };
    }
    // Augmented system Bᵀ x = v.
    let bt = transpose(b);
    let aug: QMat = bt
        .iter()
        .zip(v)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let (rr, piv) = qrref(&aug);
    if piv.contains(&k) {
        return None;
    }
    let mut x = vec![BigRational::zero(); k];
    for (i, &c) in piv.iter().enumerate() {
        x[c] = rr[i][k].clone();
    }
    Some(x)
}

/// Integer row reduction to Hermite normal form, tracking the unimodular
/// transform: returns `(H, U)` with `U · m = H`, `H` in row echelon form with
/// positive pivots and reduced entries above pivots. Zero rows are kept at
/// the bottom so that `U` stays square.
pub fn hnf_with_transform(m: &IMat) -> (IMat, IMat) {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut h = m.clone();
    let mut u = identity_i(rows);
    let mut pr = 0usize;
    let mut pivots = Vec::new();
    for c in 0..cols {
        if pr == rows {
            break;
        }
        loop {
            // Pick the smallest nonzero entry at or below the pivot row.
            let mut best: Option<usize> = None;
            for r in pr..rows {
                if !h[r][c].is_zero() && best.is_none_or(|b| h[r][c].abs() < h[b][c].abs()) {
                    best = Some(r);
                }
            }
            let Some(b) = best else { break };
            h.swap(pr, b);
            u.swap(pr, b);
            let mut done = true;
            for r in pr + 1..rows {
                if h[r][c].is_zero() {
                    continue;
                }
                let q = h[r][c].div_floor(&h[pr][c]);
                for k in 0..cols {
                    let t = &q * &h[pr][k];
                    h[r][k] -= t;
                }
                for k in 0..rows {
                    let t = &q * &u[pr][k];
                    u[r][k] -= t;
                }
                if !h[r][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[pr][c].is_zero() {
            continue;
        }
        if h[pr][c].is_negative() {
            for k in 0..cols {
                h[pr][k] = -&h[pr][k];
            }
            for k in 0..rows {
                u[pr][k] = -&u[pr][k];
            }
        }
        for r in 0..pr {
            let q = h[r][c].div_floor(&h[pr][c]);
            if q.is_zero() {
                continue;
            }
            for k in 0..cols {
                let t = &q * &h[pr][k];
                h[r][k] -= t;
            }
            for k in 0..rows {
                let t = &q * &u[pr][k];
                u[r][k] -= t;
            }
        }
        pivots.push(c);
        pr += 1;
    }
    (h, u)
}

/// Integer coefficients `c` with `Σ cᵢ·gensᵢ = target`, if any exist.
pub fn integer_combination(gens: &QMat, target: &[BigRational]) -> Option<Vec<BigInt>> {
    if gens.is_empty() {
        return if target.iter().all(|x| x.is_zero()) { Some(Vec::new()) } else { None };
    }
    let d = lcm_denominators(gens.iter().flatten().chain(target.iter()));
    let scale = |x: &BigRational| (x * rat_int(&d)).to_integer();
    let g: IMat = gens.iter().map(|r| r.iter().map(scale).collect()).collect();
    let t: QVec = target.iter().map(|x| rat_int(&scale(x))).collect();
    let (h, u) = hnf_with_transform(&g);
    let live: Vec<usize> = (0..h.len()).filter(|&i| h[i].iter().any(|x| !x.is_zero())).collect();
    let hq: QMat = live.iter().map(|&i| h[i].iter().map(rat_int).collect()).collect();
    let x = solve_rows(&hq, &t)?;
    if !is_integral(&x) {
        return None;
    }
    let mut c = vec![BigInt::zero(); gens.len()];
    for (xi, &row) in x.iter().zip(&live) {
        let xi = xi.to_integer();
        for (cj, uj) in c.iter_mut().zip(&u[row]) {
            *cj += &xi * uj;
        }
    }
    Some(c)
}

/// Basis (HNF, nonzero rows) of the row lattice spanned by `m`.
pub fn hnf_rows(m: &IMat) -> IMat {
    let (h, _) = hnf_with_transform(m);
    h.into_iter().filter(|r| r.iter().any(|x| !x.is_zero())).collect()
}

/// HNF basis of the Z-span of rational rows.
pub fn qhnf_rows(m: &QMat) -> QMat {
    if m.is_empty() {
        return Vec::new();
    }
    let d = lcm_denominators(m.iter().flatten());
    let scaled: IMat = m
        .iter()
        .map(|r| r.iter().map(|x| (x * rat_int(&d)).to_integer()).collect())
        .collect();
    hnf_rows(&scaled)
        .into_iter()
        .map(|r| r.iter().map(|x| BigRational::new(x.clone(), d.clone())).collect())
        .collect()
}

/// Integer basis of the left kernel `{x ∈ Zᵏ : x · m = 0}`.
pub fn left_kernel(m: &IMat) -> IMat {
    let (h, u) = hnf_with_transform(m);
    let ker: IMat = h
        .iter()
        .zip(&u)
        .filter(|(hr, _)| hr.iter().all(|x| x.is_zero()))
        .map(|(_, ur)| ur.clone())
        .collect();
    if ker.is_empty() {
        ker
    } else {
        hnf_rows(&ker)
    }
}

/// Integer basis of the right kernel `{x ∈ Zⁿ : m · x = 0}`, as rows.
pub fn right_kernel(m: &IMat) -> IMat {
    left_kernel(&transpose(m))
}

/// Smith normal form `U · m · V = D` for a square nonsingular integer matrix.
/// Returns `(U, diag, V)` with `diag[i] | diag[i+1]` and all entries positive.
pub fn snf(m: &IMat) -> (IMat, Vec<BigInt>, IMat) {
    let n = m.len();
    let mut a = m.clone();
    let mut u = identity_i(n);
    let mut v = identity_i(n);
    for t in 0..n {
        loop {
            // Move the smallest nonzero entry of the trailing block to (t, t).
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    if !a[i][j].is_zero()
                        && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { break };
            a.swap(t, bi);
            u.swap(t, bi);
            for row in a.iter_mut() {
                row.swap(t, bj);
            }
            for row in v.iter_mut() {
                row.swap(t, bj);
            }
            let mut clean = true;
            for i in t + 1..n {
                let q = a[i][t].div_floor(&a[t][t]);
                if !q.is_zero() {
                    for k in 0..n {
                        let x = &q * &a[t][k];
                        a[i][k] -= x;
                        let y = &q * &u[t][k];
                        u[i][k] -= y;
                    }
                }
                if !a[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                let q = a[t][j].div_floor(&a[t][t]);
                if !q.is_zero() {
                    for k in 0..n {
                        let x = &q * &a[k][t];
                        a[k][j] -= x;
                        let y = &q * &v[k][t];
                        v[k][j] -= y;
                    }
                }
                if !a[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // Divisibility: every trailing entry must be a multiple of the pivot.
            let mut fix = None;
            'outer: for i in t + 1..n {
                for j in t + 1..n {
                    if !(&a[i][j] % &a[t][t]).is_zero() {
                        fix = Some(i);
                        break 'outer;
                    }
                }
            }
            match fix {
                Some(i) => {
                    for k in 0..n {
                        let x = a[i][k].clone();
                        a[t][k] += x;
                        let y = u[i][k].clone();
                        u[t][k] += y;
                    }
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for k in 0..n {
                a[t][k] = -&a[t][k];
                u[t][k] = -&u[t][k];
            }
        }
    }
    let diag = (0..n).map(|i| a[i][i].clone()).collect();
    (u, diag, v)
}

/// Inverse of a unimodular integer matrix.
pub fn iinverse_unimodular(m: &IMat) -> IMat {
    let inv = qinverse(&to_qmat(m)).expect("unimodular matrix is invertible");
    inv.into_iter()
        .map(|r| {
            r.into_iter()
                .map(|x| {
                    debug_assert!(x.is_integer());
                    x.to_integer()
                })
                .collect()
        })
        .collect()
}
