//! Rational maps between affine charts.
//!
//! A map is a tuple of reduced fractions of polynomials in the source
//! variables. Torus parameters are ordinary source variables that are allowed
//! in denominators; they are listed last and flagged so renderings and
//! callers can tell them apart. Two maps are equal when they agree as rational
//! functions, i.e. on a dense open set.

use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::poly::{gcd, Poly};
use crate::Q;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MapError {
    #[error("cannot compose: inner map has {inner} outputs, outer map expects {outer} inputs")]
    Arity { inner: usize, outer: usize },
    #[error("component {0} has a zero denominator after substitution")]
    ZeroDenominator(usize),
    #[error("zero denominator")]
    ZeroFraction,
}

/// A reduced fraction `num / den` with monic denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fraction {
    num: Poly,
    den: Poly,
}

impl Fraction {
    pub fn new(num: Poly, den: Poly) -> Result<Self, MapError> {
        if den.is_zero() {
            return Err(MapError::ZeroFraction);
        }
        let n = num.nvars();
        if num.is_zero() {
            return Ok(Fraction { num, den: Poly::one(n) });
        }
        let g = gcd(&num, &den);
        let mut num = num.div_exact(&g).expect("gcd divides");
        let mut den = den.div_exact(&g).expect("gcd divides");
        let lc = den.leading().map(|(_, c)| c.clone()).expect("nonzero");
        if !lc.is_one() {
            let inv = lc.recip();
            num = num.scale(&inv);
            den = den.scale(&inv);
        }
        Ok(Fraction { num, den })
    }

    pub fn poly(p: Poly) -> Self {
        let n = p.nvars();
        Fraction { num: p, den: Poly::one(n) }
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::poly(Poly::var(nvars, i))
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        Self::poly(Poly::constant(nvars, c))
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, other: &Fraction) -> Fraction {
        if self.den == other.den {
            return Fraction::new(&self.num + &other.num, self.den.clone()).expect("nonzero");
        }
        let num = &(&self.num * &other.den) + &(&other.num * &self.den);
        Fraction::new(num, &self.den * &other.den).expect("nonzero")
    }

    pub fn neg(&self) -> Fraction {
        Fraction { num: -&self.num, den: self.den.clone() }
    }

    pub fn mul(&self, other: &Fraction) -> Fraction {
        Fraction::new(&self.num * &other.num, &self.den * &other.den).expect("nonzero")
    }

    pub fn inv(&self) -> Result<Fraction, MapError> {
        Fraction::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &Fraction) -> Result<Fraction, MapError> {
        Ok(self.mul(&other.inv()?))
    }

    /// Laurent power: negative `k` inverts.
    pub fn powi(&self, k: i32) -> Result<Fraction, MapError> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        Ok(Fraction { num: base.num.pow(k.unsigned_abs()), den: base.den.pow(k.unsigned_abs()) })
    }

    /// Value of a polynomial when its variables are replaced by fractions.
    pub fn eval_poly(p: &Poly, args: &[Fraction]) -> Fraction {
        let n = args.first().map_or(0, Fraction::nvars);
        let mut acc = Fraction::constant(n, Q::zero());
        let mut cache: Vec<Vec<Fraction>> = args.iter().map(|a| vec![Fraction::constant(n, Q::one()), a.clone()]).collect();
        for (e, c) in p.terms() {
            let mut t = Fraction::constant(n, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while cache[i].len() <= k as usize {
                    let next = cache[i].last().expect("nonempty").mul(&args[i]);
                    cache[i].push(next);
                }
                t = t.mul(&cache[i][k as usize]);
            }
            acc = acc.add(&t);
        }
        acc
    }

    /// Substitutes fractions for the variables.
    pub fn substitute(&self, args: &[Fraction]) -> Result<Fraction, MapError> {
        let num = Self::eval_poly(&self.num, args);
        let den = Self::eval_poly(&self.den, args);
        num.div(&den)
    }

    pub fn same_function(&self, other: &Fraction) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }

    pub fn render(&self, names: &[String]) -> String {
        let wrap = |p: &Poly| {
            let r = p.render(names);
            if p.num_terms() > 1 {
                format!("({r})")
            } else {
                r
            }
        };
        if self.den.is_constant() {
            self.num.render(names)
        } else {
            format!("{}/{}", wrap(&self.num), wrap(&self.den))
        }
    }
}

/// A rational map `Q^source -> Q^target`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalMap {
    vars: Vec<String>,
    // number of trailing source variables that are torus parameters
    ntorus: usize,
    comps: Vec<Fraction>,
}

impl RationalMap {
    pub fn new(vars: Vec<String>, ntorus: usize, comps: Vec<Fraction>) -> Self {
        assert!(ntorus <= vars.len());
        assert!(comps.iter().all(|c| c.nvars() == vars.len()), "component arity mismatch");
        RationalMap { vars, ntorus, comps }
    }

    pub fn from_polys(vars: Vec<String>, ntorus: usize, comps: Vec<Poly>) -> Self {
        Self::new(vars, ntorus, comps.into_iter().map(Fraction::poly).collect())
    }

    pub fn identity(vars: Vec<String>) -> Self {
        let n = vars.len();
        Self::new(vars, 0, (0..n).map(|i| Fraction::var(n, i)).collect())
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn source_arity(&self) -> usize {
        self.vars.len()
    }

    pub fn target_arity(&self) -> usize {
        self.comps.len()
    }

    pub fn ntorus(&self) -> usize {
        self.ntorus
    }

    pub fn components(&self) -> &[Fraction] {
        &self.comps
    }

    /// `self ∘ inner`: first `inner`, then `self`.
    pub fn compose(&self, inner: &RationalMap) -> Result<RationalMap, MapError> {
        if inner.target_arity() != self.source_arity() {
            return Err(MapError::Arity { inner: inner.target_arity(), outer: self.source_arity() });
        }
        let comps = self
            .comps
            .iter()
            .enumerate()
            .map(|(i, c)| c.substitute(&inner.comps).map_err(|_| MapError::ZeroDenominator(i)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RationalMap { vars: inner.vars.clone(), ntorus: inner.ntorus, comps })
    }

    /// `(x, y) -> (self(x), y)` where `y` are new trailing variables.
    pub fn with_passthrough(&self, extra: &[String], torus: bool) -> RationalMap {
        let mut vars = self.vars.clone();
        vars.extend(extra.iter().cloned());
        let n = vars.len();
        let old = self.vars.len();
        let map: Vec<usize> = (0..old).collect();
        let lift = |f: &Fraction| Fraction { num: f.num.remap(n, &map), den: f.den.remap(n, &map) };
        let mut comps: Vec<Fraction> = self.comps.iter().map(lift).collect();
        comps.extend((old..n).map(|i| Fraction::var(n, i)));
        let ntorus = if torus { self.ntorus + extra.len() } else { 0 };
        RationalMap { vars, ntorus, comps }
    }

    /// Identity as rational functions, by cross-multiplication.
    pub fn equal_on_dense(&self, other: &RationalMap) -> bool {
        self.source_arity() == other.source_arity()
            && self.target_arity() == other.target_arity()
            && self.comps.iter().zip(&other.comps).all(|(a, b)| a.same_function(b))
    }

    /// Value at a point, or `None` if some denominator vanishes there.
    pub fn eval(&self, point: &[Q]) -> Option<Vec<Q>> {
        self.comps
            .iter()
            .map(|c| {
                let d = c.den.eval(point);
                if d.is_zero() {
                    None
                } else {
                    Some(c.num.eval(point) / d)
                }
            })
            .collect()
    }

    pub fn render(&self) -> String {
        let parts: Vec<String> = self.comps.iter().map(|c| c.render(&self.vars)).collect();
        format!("({})", parts.join(", "))
    }
}

impl fmt::Display for RationalMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (plain, torus) = self.vars.split_at(self.vars.len() - self.ntorus);
        if torus.is_empty() {
            write!(f, "({}) -> {}", plain.join(", "), self.render())
        } else {
            write!(f, "({}; {}) -> {}", plain.join(", "), torus.join(", "), self.render())
        }
    }
}

/// `prefix1, .., prefixk`.
pub fn numbered(prefix: &str, k: usize) -> Vec<String> {
    (1..=k).map(|i| format!("{prefix}{i}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    fn x(n: usize, i: usize) -> Fraction {
        Fraction::var(n, i)
    }

    #[test]
    fn fractions_reduce() {
        let n = 2;
        let f = Fraction::new(&Poly::var(n, 0) * &Poly::var(n, 1).pow(2), Poly::var(n, 1)).unwrap();
        assert_eq!(f, Fraction::poly(&Poly::var(n, 0) * &Poly::var(n, 1)));
        let g = Fraction::new(Poly::constant(n, q(2)), Poly::var(n, 0).scale(&q(4))).unwrap();
        assert_eq!(g.den(), &Poly::var(n, 0));
        assert_eq!(g.num().constant_term(), crate::qf(1, 2));
    }

    #[test]
    fn compose_with_identity() {
        let vars = numbered("u", 2);
        let f = RationalMap::new(vars.clone(), 0, vec![x(2, 0).mul(&x(2, 1)), x(2, 1).inv().unwrap()]);
        let id = RationalMap::identity(vars);
        assert_eq!(f.compose(&id).unwrap(), f);
        assert_eq!(id.compose(&f).unwrap(), f);
        // f is an involution-like change: (u1 u2, 1/u2) twice is (u1, u2)
        assert!(f.compose(&f).unwrap().equal_on_dense(&id));
    }

    #[test]
    fn zero_denominator_detected() {
        let vars = numbered("u", 1);
        let inv = RationalMap::new(vars.clone(), 0, vec![x(1, 0).inv().unwrap()]);
        let zero = RationalMap::new(vars, 0, vec![Fraction::constant(1, q(0))]);
        assert_eq!(inv.compose(&zero), Err(MapError::ZeroDenominator(0)));
    }

    #[test]
    fn render_map() {
        let vars = numbered("u", 2);
        let f = RationalMap::new(vars, 0, vec![x(2, 0).mul(&x(2, 1)), x(2, 1).inv().unwrap()]);
        assert_eq!(f.render(), "(u1*u2, 1/u2)");
    }
}
