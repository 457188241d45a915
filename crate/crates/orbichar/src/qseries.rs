//! Exact truncated q-series with rational exponents.
//!
//! A [`QSeries`] knows every coefficient with exponent strictly below its
//! truncation order. Coefficients live in any [`Ring`]; the cyclotomic ring
//! [`Cyc`] carries the p-th roots of unity that twisted traces introduce.

use std::collections::BTreeMap;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub trait Ring: Clone + PartialEq + Debug {
    fn zero_like(&self) -> Self;
    fn is_zero_elem(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn to_complex(&self) -> Complex64;
    fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
}

impl Ring for BigInt {
    fn zero_like(&self) -> Self {
        BigInt::zero()
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(self.to_f64().unwrap(), 0.0)
    }
}

impl Ring for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn is_zero_elem(&self) -> bool {
        self.is_zero()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn to_complex(&self) -> Complex64 {
        Complex64::new(self.to_f64().unwrap(), 0.0)
    }
}

/// An element of ℚ(ω), ω = e^{2πi/p}, stored in the power basis
/// 1, ω, …, ω^{p−1} and normalised so the last coordinate is zero
/// (using 1 + ω + … + ω^{p−1} = 0 for prime p).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cyc {
    c: Vec<BigRational>,
}

impl Cyc {
    pub fn zero(p: usize) -> Self {
        Cyc { c: vec![BigRational::zero(); p.max(1)] }
    }

    pub fn from_rational(p: usize, x: BigRational) -> Self {
        let mut z = Cyc::zero(p);
        z.c[0] = x;
        z.normalize()
    }

    pub fn from_int(p: usize, x: i64) -> Self {
        Cyc::from_rational(p, BigRational::from_integer(BigInt::from(x)))
    }

    /// ωᵏ
    pub fn root(p: usize, k: i64) -> Self {
        let mut z = Cyc::zero(p);
        let idx = k.rem_euclid(p.max(1) as i64) as usize;
        z.c[idx] = BigRational::one();
        z.normalize()
    }

    pub fn order(&self) -> usize {
        self.c.len()
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.c
    }

    fn normalize(mut self) -> Self {
        let p = self.c.len();
        if p > 1 {
            let last = self.c[p - 1].clone();
            if !last.is_zero() {
                for x in self.c.iter_mut() {
                    *x -= &last;
                }
            }
        }
        self
    }

    /// The rational value if this element lies in ℚ.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.c[1..].iter().all(|x| x.is_zero()) {
            Some(self.c[0].clone())
        } else {
            None
        }
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Cyc { c: self.c.iter().map(|x| x * s).collect() }
    }
}

impl Ring for Cyc {
    fn zero_like(&self) -> Self {
        Cyc::zero(self.c.len())
    }
    fn is_zero_elem(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }
    fn add(&self, o: &Self) -> Self {
        Cyc { c: self.c.iter().zip(&o.c).map(|(a, b)| a + b).collect() }.normalize()
    }
    fn mul(&self, o: &Self) -> Self {
        let p = self.c.len();
        let mut out = vec![BigRational::zero(); p];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if !b.is_zero() {
                    out[(i + j) % p] += a * b;
                }
            }
        }
        Cyc { c: out }.normalize()
    }
    fn neg(&self) -> Self {
        Cyc { c: self.c.iter().map(|x| -x).collect() }
    }
    fn to_complex(&self) -> Complex64 {
        let p = self.c.len() as f64;
        self.c
            .iter()
            .enumerate()
            .map(|(k, x)| {
                let ang = 2.0 * std::f64::consts::PI * k as f64 / p;
                Complex64::from_polar(x.to_f64().unwrap(), ang)
            })
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QSeries<C: Ring> {
    pub terms: BTreeMap<BigRational, C>,
    /// Every coefficient with exponent < `truncation` is exact.
    pub truncation: BigRational,
}

impl<C: Ring> QSeries<C> {
    pub fn new(truncation: BigRational) -> Self {
        QSeries { terms: BTreeMap::new(), truncation }
    }

    pub fn monomial(exp: BigRational, c: C, truncation: BigRational) -> Self {
        let mut s = QSeries::new(truncation);
        s.add_term(exp, c);
        s
    }

    pub fn add_term(&mut self, exp: BigRational, c: C) {
        if exp >= self.truncation || c.is_zero_elem() {
            return;
        }
        match self.terms.get_mut(&exp) {
            Some(v) => {
                *v = v.add(&c);
                if v.is_zero_elem() {
                    self.terms.remove(&exp);
                }
            }
            None => {
                self.terms.insert(exp, c);
            }
        }
    }

    pub fn coefficient(&self, exp: &BigRational) -> Option<&C> {
        self.terms.get(exp)
    }

    pub fn leading(&self) -> Option<(&BigRational, &C)> {
        self.terms.iter().next()
    }

    pub fn truncate(&self, t: &BigRational) -> Self {
        let t = t.clone().min(self.truncation.clone());
        QSeries {
            terms: self.terms.iter().filter(|(e, _)| **e < t).map(|(e, c)| (e.clone(), c.clone())).collect(),
            truncation: t,
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let t = self.truncation.clone().min(o.truncation.clone());
        let mut out = self.truncate(&t);
        for (e, c) in &o.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        QSeries {
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect(),
            truncation: self.truncation.clone(),
        }
    }

    pub fn scale(&self, s: &C) -> Self {
        let mut out = QSeries::new(self.truncation.clone());
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.mul(s));
        }
        out
    }

    /// Multiply by q^e.
    pub fn shift(&self, e: &BigRational) -> Self {
        QSeries {
            terms: self.terms.iter().map(|(x, c)| (x + e, c.clone())).collect(),
            truncation: &self.truncation + e,
        }
    }

    fn lower(&self) -> BigRational {
        self.leading().map(|(e, _)| e.clone()).unwrap_or_else(|| self.truncation.clone())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let t = (self.lower() + &o.truncation).min(o.lower() + &self.truncation);
        let mut out = QSeries::new(t);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e = e1 + e2;
                if e < out.truncation {
                    out.add_term(e, c1.mul(c2));
                }
            }
        }
        out
    }

    /// `self / o` where the leading coefficient of `o` is ±1 (or any unit
    /// whose inverse is supplied by `inv_lead`).
    pub fn div_by(&self, o: &Self, inv_lead: &C) -> Self {
        let (e0, _) = o.leading().expect("nonzero divisor");
        let e0 = e0.clone();
        let a_low = self.lower();
        let t = (&self.truncation - &e0).min(&o.truncation + &a_low - &e0 - &e0);
        let mut rem = self.truncate(&(&t + &e0));
        let mut out = QSeries::new(t.clone());
        while let Some((e, c)) = rem.leading().map(|(e, c)| (e.clone(), c.clone())) {
            let x = &e - &e0;
            if x >= t {
                break;
            }
            let coef = c.mul(inv_lead);
            for (f, d) in &o.terms {
                let ee = &x + f;
                if ee >= rem.truncation {
                    break;
                }
                rem.add_term(ee, d.mul(&coef).neg());
            }
            // Exact cancellation of the leading term is guaranteed; guard anyway.
            rem.terms.remove(&e);
            out.add_term(x, coef);
        }
        out
    }

    pub fn map<D: Ring>(&self, f: impl Fn(&C) -> D, truncation: BigRational) -> QSeries<D> {
        let mut out = QSeries::new(truncation);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }

    /// Σ c·e^{2πiτe}.
    pub fn evaluate(&self, tau: Complex64) -> Complex64 {
        let two_pi_i_tau = Complex64::new(0.0, 2.0 * std::f64::consts::PI) * tau;
        self.terms
            .iter()
            .map(|(e, c)| c.to_complex() * (two_pi_i_tau * e.to_f64().unwrap()).exp())
            .sum()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

impl QSeries<Cyc> {
    /// Convert to rational coefficients if every coefficient is rational.
    pub fn to_rational(&self) -> Option<QSeries<BigRational>> {
        let mut out = QSeries::new(self.truncation.clone());
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.as_rational()?);
        }
        Some(out)
    }
}

/// Sign-aware helper: true if all coefficients are nonnegative integers.
pub fn is_nonneg_integral(s: &QSeries<BigRational>) -> bool {
    s.terms.values().all(|c| c.is_integer() && !c.is_negative())
}
