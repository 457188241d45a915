//! Checks shared by the property, oracle and acceptance suites. Every check
//! returns the worst residual (or a description of the first mismatch) so the
//! callers can decide how to report it.
#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;

use orbichar::characters::{char_orbifold_qexpansion, classify, Classification};
use orbichar::isometry::*;
use orbichar::lattice::*;
use orbichar::linalg::{qinverse, rat, QVec};
use orbichar::modular::*;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

// ---------------------------------------------------------------------------
// Random even lattices

/// A random positive-definite even lattice of rank 1..=4 with |L*/L| ≤ `max_disc`:
/// an orthogonal sum of small root-like blocks, seen through a random
/// unimodular change of basis and possibly an index-2 sublattice.
pub fn random_even_lattice<R: Rng>(rng: &mut R, max_disc: i64) -> Lattice {
    loop {
        let r = rng.gen_range(1..=4usize);
        let mut g = vec![vec![0i64; r]; r];
        let mut i = 0;
        while i < r {
            if i + 1 < r && rng.gen_bool(0.4) {
                // A₂-type block scaled by 1 or 2
                let s = rng.gen_range(1..=2);
                g[i][i] = 2 * s;
                g[i + 1][i + 1] = 2 * s;
                g[i][i + 1] = -s;
                g[i + 1][i] = -s;
                i += 2;
            } else {
                g[i][i] = 2 * rng.gen_range(1..=3);
                i += 1;
            }
        }
        // Unipotent upper-triangular change of basis.
        let mut a = vec![vec![0i64; r]; r];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = 1;
            for x in row.iter_mut().skip(i + 1) {
                *x = rng.gen_range(-1..=1);
            }
        }
        if r > 1 && rng.gen_bool(0.3) {
            let j = rng.gen_range(0..r);
            for row in a.iter_mut() {
                row[j] *= 2;
            }
        }
        // Aᵀ G A
        let mut h = vec![vec![0i64; r]; r];
        for x in 0..r {
            for y in 0..r {
                for u in 0..r {
                    for v in 0..r {
                        h[x][y] += a[u][x] * g[u][v] * a[v][y];
                    }
                }
            }
        }
        let l = new_lattice(h).expect("even positive definite by construction");
        if l.det().to_i64().unwrap() <= max_disc {
            return l;
        }
    }
}

/// A random point of the upper half-plane away from the real axis.
pub fn random_tau<R: Rng>(rng: &mut R) -> Complex64 {
    c(rng.gen_range(-0.5..0.5), rng.gen_range(0.7..1.4))
}

// ---------------------------------------------------------------------------
// Transformation laws

/// Worst residual of the S- and T-laws of the theta functions of all cosets
/// of `l`, at τ with elliptic variable z (lattice coordinates).
pub fn theta_law_residual(l: &Lattice, tau: Complex64, z: &[Complex64]) -> f64 {
    let tol = SeriesTolerance::new(1e-13);
    let disc = discriminant_group(l);
    let reps = disc.representatives();
    let n = reps.len() as f64;
    let r = l.rank() as i64;
    let form = l.form();
    let at = ModularPoint::with_z(tau, z.to_vec(), Complex64::zero());
    let vals: Vec<Complex64> = reps.iter().map(|m| theta(l, m, &at, &tol).unwrap().value).collect();
    let g = form.gram_f64();
    let zz: Complex64 = (0..z.len()).map(|i| (0..z.len()).map(|j| z[i] * g[i][j] * z[j]).sum::<Complex64>()).sum();
    let inv = ModularPoint::with_z(-1.0 / tau, z.iter().map(|x| x / tau).collect(), -zz / (2.0 * tau));
    let shifted = ModularPoint::with_z(tau + 1.0, z.to_vec(), Complex64::zero());
    let mut worst: f64 = 0.0;
    for (i, lam) in reps.iter().enumerate() {
        let lhs = theta(l, lam, &inv, &tol).unwrap().value;
        let sum: Complex64 = reps.iter().zip(&vals).map(|(mu, v)| e2pi(&-form.pair(&lam.0, &mu.0)) * v).sum();
        let rhs = half_power(-I * tau, r) / n.sqrt() * sum;
        worst = worst.max((lhs - rhs).norm());
        let t_lhs = theta(l, lam, &shifted, &tol).unwrap().value;
        worst = worst.max((t_lhs - epi(&form.norm(&lam.0)) * vals[i]).norm());
    }
    worst
}

pub fn eta_law_residual(tau: Complex64) -> f64 {
    let tol = SeriesTolerance::new(1e-14);
    let e = eta(tau, &tol).unwrap().value;
    let t = eta(tau + 1.0, &tol).unwrap().value - (PI * I / 12.0).exp() * e;
    let s = eta(-1.0 / tau, &tol).unwrap().value - (-I * tau).sqrt() * e;
    t.norm().max(s.norm())
}

/// Residuals of the S-law, T-law and l ↔ −l symmetry of K_l(τ, ζ; m).
pub fn k_law_residuals(m: i64, tau: Complex64, zeta: Complex64) -> [f64; 3] {
    let tol = SeriesTolerance::new(1e-14);
    let k = |l: i64, t: Complex64, z: Complex64| k_function(l, t, z, m, &tol).unwrap();
    let mf = m as f64;
    let mut worst = [0f64; 3];
    for l in 0..m {
        let lhs = k(l, -1.0 / tau, zeta / tau);
        let sum: Complex64 = (0..m)
            .map(|lp| Complex64::from_polar(1.0, -2.0 * PI * (l * lp) as f64 / mf) * k(lp, tau, zeta))
            .sum();
        let rhs = (PI * I * mf * zeta * zeta / (4.0 * tau)).exp() / mf.sqrt() * sum;
        worst[0] = worst[0].max((lhs - rhs).norm());
        let phase = (PI * I * ((l * l) as f64 / mf - 1.0 / 12.0)).exp();
        worst[1] = worst[1].max((k(l, tau + 1.0, zeta) - phase * k(l, tau, zeta)).norm());
        worst[2] = worst[2].max((k(l, tau, zeta) - k(-l, tau, -zeta)).norm());
    }
    worst
}

/// |P(τ, ζ) − q^{1/8}/η(τ) Σ (−z)^m q^{m(m−1)/2}|.
pub fn triple_product_residual(tau: Complex64, zeta: Complex64) -> f64 {
    let tol = SeriesTolerance::new(1e-15);
    let p = p_triple(tau, zeta, &tol).unwrap();
    let mut sum = Complex64::zero();
    for m in -60i64..=60 {
        let e = 2.0 * PI * I * (m as f64 * zeta + tau * (m * (m - 1)) as f64 / 2.0);
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * e.exp();
    }
    let rhs = (2.0 * PI * I * tau / 8.0).exp() / eta(tau, &tol).unwrap().value * sum;
    (p - rhs).norm()
}

/// Fincke–Pohst and box search must return the same vectors, in the same order.
pub fn enumeration_mismatch(form: &QuadForm, shift: &[BigRational], bound: &BigRational) -> Option<String> {
    let fp = enumerate_coset(form, shift, bound, DEFAULT_ENUMERATION_CAP).unwrap();
    let bx = enumerate_box(form, shift, bound);
    let a: Vec<QVec> = (0..fp.len()).map(|i| fp.vector(i)).collect();
    let b: Vec<QVec> = (0..bx.len()).map(|i| bx.vector(i)).collect();
    let na: Vec<BigRational> = (0..fp.len()).map(|i| fp.norm(i)).collect();
    let nb: Vec<BigRational> = (0..bx.len()).map(|i| bx.norm(i)).collect();
    if a != b || na != nb {
        return Some(format!("Fincke–Pohst found {} vectors, box search {}", a.len(), b.len()));
    }
    None
}

// ---------------------------------------------------------------------------
// Exact identities

pub fn identity_cases() -> Vec<(String, Lattice, Isometry)> {
    let mut out = Vec::new();
    for name in ["a2bar", "a3", "d4"] {
        let (l, s) = orbichar::builtin::by_name(name, 3, 1).unwrap();
        out.push((name.to_string(), l, s));
    }
    for (p, t) in [(2, 1), (2, 3), (3, 1), (3, 2), (5, 1), (7, 1)] {
        let (l, s) = orbichar::builtin::perm(p, t).unwrap();
        out.push((format!("perm p={p} t={t}"), l, s));
    }
    let a2 = new_lattice(vec![vec![2, -1], vec![-1, 2]]).unwrap();
    let rot = new_isometry(&a2, vec![vec![0, -1], vec![1, -1]]).unwrap();
    out.push(("A2 rotation".into(), a2, rot));
    out
}

/// det_{𝔥⊥}(1 − σᵏ) = p^d, tr s = −½ dim 𝔥⊥, p^{dim 𝔥⊥/(p−1)} = |Z|·d(σ)²·|π₀Q/M|,
/// the Type 3 count, and multiplicativity of indices along two chains.
pub fn exact_identity_failures(l: &Lattice, s: &Isometry) -> Vec<String> {
    let mut bad = Vec::new();
    let p = s.prime_order().unwrap();
    let e = s.eigen_data();
    let perp_dim = e.dim_perp();
    for k in 1..p {
        let det = det_perp_one_minus(s, k);
        let want = rat((p as i64).pow(e.d as u32), 1);
        if det != want {
            bad.push(format!("det(1 − σ^{k}) = {det}, expected {want}"));
        }
    }
    let tr = trace_s(s);
    if tr != rat(-(perp_dim as i64), 2) {
        bad.push(format!("tr s = {tr}, expected −{perp_dim}/2"));
    }
    let z = z_mu_cardinality(s).unwrap();
    let d = defect(s).unwrap();
    let pi_q = projected_lattice(s, Which::Q);
    let m = fixed_sublattice(s);
    let idx = index_of(&pi_q, &m);
    let lhs = (p as u64).pow((perp_dim / (p as usize - 1)) as u32);
    if lhs != z * d * d * idx {
        bad.push(format!("{lhs} ≠ |Z|·d²·|π₀Q/M| = {z}·{d}²·{idx}"));
    }
    let cls = classify(l, s).unwrap();
    let twisted = index_of(&projected_lattice(s, Which::QDual), &pi_q) as usize;
    let want3 = twisted * z as usize * (p as usize - 1) * p as usize;
    if cls.counts[2] != want3 {
        bad.push(format!("{} twisted-type modules, expected {want3}", cls.counts[2]));
    }
    // Q ∩ 𝔥⊥ ⊇ Q ∩ (1 − σ)Q* ⊇ (1 − σ)Q
    let perp = perp_sublattice(s);
    let mid = intersect(&l.as_sublattice(), &one_minus_sigma_dual(s));
    let low = one_minus_sigma(s);
    if perp.rank() > 0 && index_of(&perp, &low) != index_of(&perp, &mid) * index_of(&mid, &low) {
        bad.push("index along Q∩𝔥⊥ ⊇ Q∩(1−σ)Q* ⊇ (1−σ)Q is not multiplicative".into());
    }
    // π₀Q* ⊇ π₀Q ⊇ M
    let top = projected_lattice(s, Which::QDual);
    if index_of(&top, &m) != index_of(&top, &pi_q) * index_of(&pi_q, &m) {
        bad.push("index along π₀Q* ⊇ π₀Q ⊇ M is not multiplicative".into());
    }
    bad
}

// ---------------------------------------------------------------------------
// Brute-force oracles

/// Vectors of `shift + ℤʳ` counted by |v|²/2, exponents below `trunc`, found
/// by scanning an integer box with plain integer arithmetic.
pub fn brute_theta(l: &Lattice, shift: &[BigRational], trunc: i64) -> BTreeMap<BigRational, u64> {
    let r = l.rank();
    let den: BigInt = shift.iter().fold(BigInt::from(1), |acc, x| num_integer::lcm(acc, x.denom().clone()));
    let den = den.to_i64().unwrap();
    let num: Vec<i64> = shift.iter().map(|x| (x * rat(den, 1)).to_integer().to_i64().unwrap()).collect();
    let ginv = qinverse(l.gram_q()).unwrap();
    let radius: Vec<i64> =
        (0..r).map(|i| ((2 * trunc) as f64 * ginv[i][i].to_f64().unwrap()).sqrt().ceil() as i64 + 2).collect();
    let g = l.gram();
    let mut counts = BTreeMap::new();
    let mut x: Vec<i64> = radius.iter().map(|b| -b).collect();
    loop {
        let y: Vec<i64> = (0..r).map(|i| num[i] + den * x[i]).collect();
        let mut n2 = 0i64;
        for i in 0..r {
            for j in 0..r {
                n2 += y[i] * g[i][j] * y[j];
            }
        }
        // |v|²/2 = n2 / (2 den²)
        let e = BigRational::new(BigInt::from(n2), BigInt::from(2 * den * den));
        if e < rat(trunc, 1) {
            *counts.entry(e).or_insert(0) += 1;
        }
        let mut k = r;
        loop {
            if k == 0 {
                return counts;
            }
            k -= 1;
            if x[k] < radius[k] {
                x[k] += 1;
                for (j, v) in x.iter_mut().enumerate().skip(k + 1) {
                    *v = -radius[j];
                }
                break;
            }
        }
    }
}

/// Compare the exact θ expansion of every coset of `l` with a brute-force count.
pub fn theta_oracle_mismatch(l: &Lattice, n_terms: usize) -> Option<String> {
    let disc = discriminant_group(l);
    for rep in disc.representatives() {
        let s = theta_qexpansion(l, &rep, n_terms).unwrap();
        let trunc = s.truncation.clone();
        let cut = trunc.ceil().to_integer().to_i64().unwrap() + 1;
        let brute = brute_theta(l, &rep.0, cut);
        for (e, n) in &brute {
            if *e >= trunc {
                continue;
            }
            let got = s.coefficient(e).cloned().unwrap_or_default();
            if got != BigInt::from(*n) {
                return Some(format!("coset {:?}: coefficient of q^{e} is {got}, counted {n}", rep.0));
            }
        }
        for e in s.terms.keys() {
            if !brute.contains_key(e) {
                return Some(format!("coset {:?}: spurious exponent {e}", rep.0));
            }
        }
    }
    None
}

/// For σ a signed permutation of the basis of order 2: dim and tr σ of the
/// weight-n space of V_Q (n < `n_max`) by listing Fock monomials and lattice
/// vectors one at a time. σ acts on e^λ for σ-fixed λ with eigenvalue 1.
pub fn brute_graded_traces(l: &Lattice, s: &Isometry, n_max: usize) -> (Vec<i64>, Vec<i64>) {
    let r = l.rank();
    let u = s.matrix();
    // σ(e_i) = sign[i]·e_{target[i]}
    let mut target = vec![0usize; r];
    let mut sign = vec![0i64; r];
    for i in 0..r {
        let nz: Vec<usize> = (0..r).filter(|&a| u[a][i] != 0).collect();
        assert!(nz.len() == 1 && u[nz[0]][i].abs() == 1, "σ must be a signed permutation");
        target[i] = nz[0];
        sign[i] = u[nz[0]][i];
    }
    // Fock space: monomials in h_i(−m), as sorted lists of (m, i).
    let slots: Vec<(usize, usize)> = (1..n_max).flat_map(|m| (0..r).map(move |i| (m, i))).collect();
    let mut fock_dim = vec![0i64; n_max];
    let mut fock_tr = vec![0i64; n_max];
    let mut mono: Vec<(usize, usize)> = Vec::new();
    type Visit<'a> = dyn FnMut(&[(usize, usize)], usize) + 'a;
    fn rec(
        slots: &[(usize, usize)],
        from: usize,
        weight: usize,
        n_max: usize,
        mono: &mut Vec<(usize, usize)>,
        visit: &mut Visit,
    ) {
        visit(mono, weight);
        for k in from..slots.len() {
            let w = weight + slots[k].0;
            if w >= n_max {
                continue;
            }
            mono.push(slots[k]);
            rec(slots, k, w, n_max, mono, visit);
            mono.pop();
        }
    }
    let mut visit = |m: &[(usize, usize)], w: usize| {
        fock_dim[w] += 1;
        let mut img: Vec<(usize, usize)> = m.iter().map(|&(mm, i)| (mm, target[i])).collect();
        img.sort();
        if img == m {
            fock_tr[w] += m.iter().map(|&(_, i)| sign[i]).product::<i64>();
        }
    };
    rec(&slots, 0, 0, n_max, &mut mono, &mut visit);
    // Lattice vectors by |λ|²/2, and the σ-fixed ones.
    let ginv = qinverse(l.gram_q()).unwrap();
    let radius: Vec<i64> =
        (0..r).map(|i| ((2 * n_max) as f64 * ginv[i][i].to_f64().unwrap()).sqrt().ceil() as i64 + 1).collect();
    let g = l.gram();
    let mut lat_dim = vec![0i64; n_max];
    let mut lat_fixed = vec![0i64; n_max];
    let mut x: Vec<i64> = radius.iter().map(|b| -b).collect();
    'outer: loop {
        let mut n2 = 0i64;
        for i in 0..r {
            for j in 0..r {
                n2 += x[i] * g[i][j] * x[j];
            }
        }
        let w = (n2 / 2) as usize;
        if w < n_max {
            lat_dim[w] += 1;
            let sx: Vec<i64> = (0..r).map(|a| (0..r).map(|b| u[a][b] * x[b]).sum()).collect();
            if sx == x {
                lat_fixed[w] += 1;
            }
        }
        let mut k = r;
        loop {
            if k == 0 {
                break 'outer;
            }
            k -= 1;
            if x[k] < radius[k] {
                x[k] += 1;
                for (j, v) in x.iter_mut().enumerate().skip(k + 1) {
                    *v = -radius[j];
                }
                break;
            }
        }
    }
    let mut dim = vec![0i64; n_max];
    let mut tr = vec![0i64; n_max];
    for a in 0..n_max {
        for b in 0..n_max - a {
            dim[a + b] += lat_dim[a] * fock_dim[b];
            tr[a + b] += lat_fixed[a] * fock_tr[b];
        }
    }
    (dim, tr)
}

/// Compare the exact vacuum character of a ℤ₂-orbifold with (dim + tr σ)/2
/// counted state by state, for `n_terms` weights.
pub fn vacuum_oracle_mismatch(cls: &Classification, l: &Lattice, s: &Isometry, n_terms: usize) -> Option<String> {
    let (dim, tr) = brute_graded_traces(l, s, n_terms);
    let vac = &cls.labels[cls.vacuum()];
    let series = char_orbifold_qexpansion(cls, vac, n_terms).unwrap();
    let shift = rat(l.rank() as i64, 24);
    for n in 0..n_terms {
        let want = (dim[n] + tr[n]) / 2;
        let e = rat(n as i64, 1) - &shift;
        let got = series.coefficient(&e).map(|x| x.as_rational().expect("rational coefficient"));
        let got = got.unwrap_or_else(|| rat(0, 1));
        if got != rat(want, 1) {
            return Some(format!("weight {n}: character gives {got}, counting gives {want}"));
        }
    }
    if let Some(e) = series.terms.keys().find(|e| !(*e + &shift).is_integer()) {
        return Some(format!("unexpected non-integral weight {}", e + &shift));
    }
    None
}
