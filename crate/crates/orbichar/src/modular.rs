//! Numeric and exact evaluation of η, lattice theta functions, K_l, the
//! triple product P(τ, ζ) and the twisted Fock-space denominators P_{σ,φ}.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{OrbiError, Result};
use crate::isometry::{delta_sigma, modinv, Isometry};
use crate::lattice::*;
use crate::linalg::*;
use crate::qseries::{Cyc, QSeries, Ring};

pub const PI: f64 = std::f64::consts::PI;
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// A point (τ, z, u); `z` is given in the coordinates of whatever lattice
/// the theta function is taken over.
#[derive(Debug, Clone, PartialEq)]
pub struct ModularPoint {
    pub tau: Complex64,
    pub z: Option<Vec<Complex64>>,
    pub u: Complex64,
}

impl ModularPoint {
    pub fn new(tau: Complex64) -> Self {
        ModularPoint { tau, z: None, u: Complex64::zero() }
    }

    pub fn with_z(tau: Complex64, z: Vec<Complex64>, u: Complex64) -> Self {
        ModularPoint { tau, z: Some(z), u }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesTolerance {
    pub abs_tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesTolerance {
    fn default() -> Self {
        SeriesTolerance { abs_tol: 1e-12, max_terms: 100_000 }
    }
}

impl SeriesTolerance {
    pub fn new(abs_tol: f64) -> Self {
        SeriesTolerance { abs_tol, ..Default::default() }
    }
}

/// A value together with a bound on the truncation error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Approx {
    pub value: Complex64,
    pub bound: f64,
}

pub fn check_uhp(tau: Complex64) -> Result<()> {
    if tau.im > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(OrbiError::NotUpperHalfPlane(format!("{tau}")))
    }
}

/// z^{n/2} with the principal square root, i.e. (√z)ⁿ.
pub fn half_power(z: Complex64, n: i64) -> Complex64 {
    z.sqrt().powi(n as i32)
}

/// e^{2πi x} for an exact rational x, reduced mod 1 first.
pub fn e2pi(x: &BigRational) -> Complex64 {
    let f = frac(x).to_f64().unwrap();
    Complex64::from_polar(1.0, 2.0 * PI * f)
}

/// e^{πi x} for an exact rational x.
pub fn epi(x: &BigRational) -> Complex64 {
    e2pi(&(x / rat(2, 1)))
}

fn q_of(tau: Complex64) -> Complex64 {
    (2.0 * PI * I * tau).exp()
}

/// Π_{n≥1}(1 − qⁿ) together with a tail bound.
fn euler_product(tau: Complex64, tol: &SeriesTolerance) -> Approx {
    let q = q_of(tau);
    let aq = q.norm();
    let mut prod = Complex64::one();
    let mut qn = q;
    let mut n = 1usize;
    loop {
        prod *= Complex64::one() - qn;
        let tail = qn.norm() * aq / (1.0 - aq);
        if tail * 2.0 < tol.abs_tol || n >= tol.max_terms {
            return Approx { value: prod, bound: 2.0 * tail * prod.norm() };
        }
        qn *= q;
        n += 1;
    }
}

/// Dedekind η(τ) = e^{πiτ/12} Π(1 − qⁿ).
pub fn eta(tau: Complex64, tol: &SeriesTolerance) -> Result<Approx> {
    check_uhp(tau)?;
    let e = euler_product(tau, tol);
    let pre = (PI * I * tau / 12.0).exp();
    Ok(Approx { value: pre * e.value, bound: pre.norm() * e.bound })
}

/// θ_{shift+L}(τ, z, u) = e^{2πiu} Σ_{γ∈shift+L} e^{2πi(γ|z)} q^{|γ|²/2}.
pub fn theta_form(form: &QuadForm, shift: &[BigRational], pt: &ModularPoint, tol: &SeriesTolerance) -> Result<Approx> {
    // (γ|z) = Σ_i γ_i (G z)_i
    let pairing: Option<Vec<Complex64>> = pt.z.as_ref().map(|z| {
        let g = form.gram_f64();
        (0..form.rank()).map(|i| (0..form.rank()).map(|j| g[i][j] * z[j]).sum()).collect()
    });
    theta_paired(form, shift, pt.tau, pt.u, pairing.as_deref(), tol)
}

/// Theta series with the elliptic variable given directly as a pairing
/// vector: e^{2πi(γ|z)} is e^{2πi Σ γᵢwᵢ} for γ in form coordinates.
pub fn theta_paired(
    form: &QuadForm,
    shift: &[BigRational],
    tau: Complex64,
    u: Complex64,
    pairing: Option<&[Complex64]>,
    tol: &SeriesTolerance,
) -> Result<Approx> {
    check_uhp(tau)?;
    let y = tau.im;
    let r = form.rank() as f64;
    // |e^{2πi(γ|z)}| ≤ e^{2π|γ|·c} with c the dual norm of Im z, so a term is at
    // most e^{−πy(|γ| − c/y)² + πc²/y}: shift the norm bound accordingly.
    let c = pairing.map_or(0.0, |w| imaginary_dual_norm(form, shift.len(), w));
    let grow = PI * c * c / y;
    let tail_at = |b: f64| (-PI * y * (b.sqrt() - c / y).max(0.0).powi(2) + grow).exp();
    // Grow the norm bound B until the tail estimate ≤ tail_at(B)·#(norm ≤ B + r) is small.
    let b0 = ((-tol.abs_tol.ln() + grow) / (PI * y)).max(1.0);
    let mut b = (b0.sqrt() + c / y).powi(2).ceil();
    let (en, tail) = loop {
        let en = enumerate_coset(form, shift, &rat((b + r) as i64, 1), DEFAULT_ENUMERATION_CAP)?;
        let tail = tail_at(b) * en.len() as f64;
        if tail < tol.abs_tol {
            break (en, tail);
        }
        b += (b * 0.25).max(1.0).ceil();
    };
    let pi_i_tau = PI * I * tau;
    let den = en.norm_den as f64;
    let mut sum = Complex64::zero();
    match pairing {
        None => {
            // Group equal norms to save exponentials.
            let mut order: Vec<usize> = (0..en.len()).collect();
            order.sort_by_key(|&k| en.norm_num[k]);
            let mut i = 0;
            while i < order.len() {
                let n = en.norm_num[order[i]];
                let mut j = i;
                while j < order.len() && en.norm_num[order[j]] == n {
                    j += 1;
                }
                sum += (pi_i_tau * (n as f64 / den)).exp() * (j - i) as f64;
                i = j;
            }
        }
        Some(w) => {
            for k in 0..en.len() {
                let v = en.vector_f64(k);
                let gz: Complex64 = v.iter().zip(w).map(|(a, b)| b * *a).sum();
                sum += (pi_i_tau * (en.norm_num[k] as f64 / den) + 2.0 * PI * I * gz).exp();
            }
        }
    }
    let pre = (2.0 * PI * I * u).exp();
    Ok(Approx { value: pre * sum, bound: pre.norm() * tail })
}

/// sqrt(vᵀG⁻¹v) for v = Im w: the largest |Im(γ|z)| per unit length of γ.
fn imaginary_dual_norm(form: &QuadForm, r: usize, w: &[Complex64]) -> f64 {
    let v: Vec<f64> = w.iter().map(|x| x.im).collect();
    if v.iter().all(|x| *x == 0.0) {
        return 0.0;
    }
    let inv = qinverse(form.gram()).expect("positive definite");
    let mut t = 0.0;
    for i in 0..r {
        for j in 0..r {
            t += v[i] * inv[i][j].to_f64().unwrap() * v[j];
        }
    }
    t.max(0.0).sqrt()
}

pub fn theta(l: &Lattice, shift: &DualVector, pt: &ModularPoint, tol: &SeriesTolerance) -> Result<Approx> {
    theta_form(l.form(), &shift.0, pt, tol)
}

/// Exact expansion of θ_{shift+L} for exponents |γ|²/2 < `trunc`.
pub fn theta_qseries(form: &QuadForm, shift: &[BigRational], trunc: &BigRational) -> Result<QSeries<BigInt>> {
    let bound = trunc * rat(2, 1);
    let en = enumerate_coset(form, shift, &bound, DEFAULT_ENUMERATION_CAP)?;
    let mut s = QSeries::new(trunc.clone());
    for k in 0..en.len() {
        s.add_term(en.norm(k) / rat(2, 1), BigInt::one());
    }
    Ok(s)
}

/// Exact expansion of θ_{shift+L} with `n_terms` distinct exponents.
pub fn theta_qexpansion(l: &Lattice, shift: &DualVector, n_terms: usize) -> Result<QSeries<BigInt>> {
    let mut t = rat(n_terms as i64 + 1, 1);
    loop {
        let s = theta_qseries(l.form(), &shift.0, &t)?;
        if s.len() >= n_terms {
            let cut = s.terms.keys().nth(n_terms - 1).unwrap().clone();
            // truncation = first exponent beyond the n-th term
            let next = s.terms.keys().nth(n_terms).cloned().unwrap_or(t.clone());
            let mut out = s.truncate(&next);
            out.terms.retain(|e, _| *e <= cut);
            return Ok(out);
        }
        t *= rat(2, 1);
    }
}

/// K_l(τ, ζ; m) = θ_{(l/m)α+ℤα}(τ, (ζ/2)α, 0)/η(τ) with |α|² = m.
pub fn k_function(l: i64, tau: Complex64, zeta: Complex64, m: i64, tol: &SeriesTolerance) -> Result<Complex64> {
    check_uhp(tau)?;
    let form = QuadForm::new(vec![vec![rat(m, 1)]])?;
    let pt = ModularPoint::with_z(tau, vec![zeta / 2.0], Complex64::zero());
    let th = theta_form(&form, &[rat(l, m)], &pt, tol)?;
    Ok(th.value / eta(tau, tol)?.value)
}

/// P(τ, ζ) = q^{1/12} Π (1 − e^{−2πiζ}qⁿ)(1 − e^{2πiζ}q^{n−1}).
pub fn p_triple(tau: Complex64, zeta: Complex64, tol: &SeriesTolerance) -> Result<Complex64> {
    check_uhp(tau)?;
    let q = q_of(tau);
    let z = (2.0 * PI * I * zeta).exp();
    let mut prod = Complex64::one();
    let mut qn = q;
    for _ in 0..tol.max_terms {
        prod *= (Complex64::one() - qn / z) * (Complex64::one() - z * qn / q);
        if qn.norm() * (1.0 + z.norm() + 1.0 / z.norm()) < tol.abs_tol * 1e-3 {
            break;
        }
        qn *= q;
    }
    Ok((2.0 * PI * I * tau / 12.0).exp() * prod)
}

type Factor = (i64, i64, usize);

/// The factor list of Π_m det(1 − σ_l^{k} q^{m+s}) for prime order, as
/// (root exponent j of ω, exponent offset a/p, multiplicity): each entry
/// contributes Π_{m≥1} (1 − ω^j q^{m − a/p})^mult.
fn denominator_factors(s: &Isometry, l: u32, k: u32) -> Result<(Vec<Factor>, BigRational)> {
    let n = s.order();
    let r = s.rank() as i64;
    let e = s.eigen_data();
    if n == 1 || (l.is_multiple_of(n) && k.is_multiple_of(n)) {
        return Ok((vec![(0, 0, r as usize)], rat(r, 24)));
    }
    let p = s.prime_order()? as i64;
    if l.is_multiple_of(n) {
        // Untwisted sector, insertion σᵏ: (1 − q^m)^{r₀} Π_{j≠0} (1 − ωʲq^m)^d.
        let mut f = vec![(0, 0, e.r0)];
        // (1 − q^{mp}) = Π_j (1 − ω^j q^m)
        for j in 1..p {
            f.push((j, 0, e.d));
        }
        return Ok((f, rat(r, 24)));
    }
    let keff = (k as u64 * modinv(l as u64, p as u64)) % p as u64;
    let mut f = vec![(0, 0, e.r0)];
    for j in 1..p {
        f.push((-(j * keff as i64), j, e.d));
    }
    Ok((f, rat(r, 24) - delta_sigma(s)))
}

/// P_{σˡ,σᵏ}(τ); `l = 0` gives the untwisted row P_{1,σᵏ} (with P_{1,1} = ηʳ).
pub fn p_denominator(s: &Isometry, l: u32, k: u32, tau: Complex64, tol: &SeriesTolerance) -> Result<Complex64> {
    check_uhp(tau)?;
    let (factors, lead) = denominator_factors(s, l, k)?;
    let p = s.order().max(1) as f64;
    let q = q_of(tau);
    let mut prod = Complex64::one();
    for &(j, a, mult) in &factors {
        if mult == 0 {
            continue;
        }
        let w = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / p);
        let mut m = 1;
        loop {
            let qe = (2.0 * PI * I * tau * (m as f64 - a as f64 / p)).exp();
            prod *= (Complex64::one() - w * qe).powi(mult as i32);
            if qe.norm() < tol.abs_tol * 1e-3 || m > tol.max_terms {
                break;
            }
            m += 1;
        }
    }
    let _ = q;
    Ok((2.0 * PI * I * tau * lead.to_f64().unwrap()).exp() * prod)
}

/// Exact expansion of P_{σˡ,σᵏ} with exponents below `trunc`.
pub fn p_denominator_qseries(s: &Isometry, l: u32, k: u32, trunc: &BigRational) -> Result<QSeries<Cyc>> {
    let (factors, lead) = denominator_factors(s, l, k)?;
    let p = s.order().max(1) as usize;
    let rel = trunc - &lead;
    let one = Cyc::from_int(p, 1);
    let mut acc: QSeries<Cyc> = QSeries::monomial(BigRational::zero(), one.clone(), rel.clone());
    for &(j, a, mult) in &factors {
        let mut m = 1i64;
        loop {
            let ex = rat(m * p as i64 - a, p as i64);
            if ex >= rel {
                break;
            }
            let mut fac = QSeries::monomial(BigRational::zero(), one.clone(), rel.clone());
            fac.add_term(ex, Cyc::root(p, j).neg());
            for _ in 0..mult {
                acc = acc.mul(&fac);
            }
            m += 1;
        }
    }
    Ok(acc.shift(&lead))
}

/// Exact expansion of P_{σˡ,σᵏ} with `n_terms` grid points (spacing 1/N).
pub fn p_denominator_qexpansion(s: &Isometry, l: u32, k: u32, n_terms: usize) -> Result<QSeries<Cyc>> {
    let (_, lead) = denominator_factors(s, l, k)?;
    let n = s.order().max(1) as i64;
    p_denominator_qseries(s, l, k, &(lead + rat(n_terms as i64, n)))
}
