//! Sparse multivariate polynomials over the rationals.
//!
//! Terms are kept in a `BTreeMap` keyed by exponent vectors, so iteration is
//! in lexicographic order with variable 0 most significant. The leading term
//! is the last entry. The zero polynomial has no terms.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::Q;

pub type Exponent = Vec<u32>;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Exponent, Q>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Q::one())
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        Self::monomial(nvars, vec![0; nvars], c)
    }

    /// The `i`-th variable.
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable index {i} out of range for {nvars} variables");
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(nvars, e, Q::one())
    }

    pub fn monomial(nvars: usize, exp: Exponent, c: Q) -> Self {
        assert_eq!(exp.len(), nvars);
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exp, c);
        }
        Poly { nvars, terms }
    }

    pub fn from_terms<I: IntoIterator<Item = (Exponent, Q)>>(nvars: usize, it: I) -> Self {
        let mut p = Poly::zero(nvars);
        for (e, c) in it {
            assert_eq!(e.len(), nvars);
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Q)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    /// Constant coefficient (coefficient of the empty monomial).
    pub fn constant_term(&self) -> Q {
        self.terms.get(&vec![0; self.nvars]).cloned().unwrap_or_else(Q::zero)
    }

    pub fn coeff(&self, exp: &[u32]) -> Q {
        self.terms.get(exp).cloned().unwrap_or_else(Q::zero)
    }

    fn add_term(&mut self, e: Exponent, c: Q) {
        if c.is_zero() {
            return;
        }
        let remove = {
            let slot = self.terms.entry(e.clone()).or_insert_with(Q::zero);
            *slot += c;
            slot.is_zero()
        };
        if remove {
            self.terms.remove(&e);
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|e| e[var]).max().unwrap_or(0)
    }

    pub fn involves(&self, var: usize) -> bool {
        self.terms.keys().any(|e| e[var] > 0)
    }

    /// Lexicographic leading term.
    pub fn leading(&self) -> Option<(&Exponent, &Q)> {
        self.terms.iter().next_back()
    }

    pub fn scale(&self, c: &Q) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, exp: &[u32], c: &Q) -> Poly {
        let mut out = Poly::zero(self.nvars);
        if c.is_zero() {
            return out;
        }
        for (e, x) in &self.terms {
            let ne: Exponent = e.iter().zip(exp).map(|(a, b)| a + b).collect();
            out.terms.insert(ne, x * c);
        }
        out
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut acc = Poly::one(self.nvars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Drops every term of total degree `>= bound`.
    pub fn truncate_degree(&self, bound: u32) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() < bound)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Scales so the leading coefficient is 1. Zero stays zero.
    pub fn monic(&self) -> Poly {
        match self.leading() {
            Some((_, c)) => {
                let inv = c.recip();
                self.scale(&inv)
            }
            None => self.clone(),
        }
    }

    /// Re-embeds into a ring with `nvars` variables, sending variable `i` to `map[i]`.
    pub fn remap(&self, nvars: usize, map: &[usize]) -> Poly {
        assert_eq!(map.len(), self.nvars);
        let mut out = Poly::zero(nvars);
        for (e, c) in &self.terms {
            let mut ne = vec![0; nvars];
            for (i, &x) in e.iter().enumerate() {
                ne[map[i]] += x;
            }
            out.add_term(ne, c.clone());
        }
        out
    }

    /// Substitutes polynomials (all in a common ring) for the variables.
    pub fn substitute(&self, images: &[Poly]) -> Poly {
        assert_eq!(images.len(), self.nvars);
        let target = images.first().map(|p| p.nvars).unwrap_or(0);
        let mut cache: Vec<Vec<Poly>> = images.iter().map(|p| vec![Poly::one(p.nvars), p.clone()]).collect();
        let mut out = Poly::zero(target);
        for (e, c) in &self.terms {
            let mut t = Poly::constant(target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while cache[i].len() <= k as usize {
                    let next = &cache[i][cache[i].len() - 1] * &images[i];
                    cache[i].push(next);
                }
                t = &t * &cache[i][k as usize];
            }
            out = &out + &t;
        }
        out
    }

    pub fn eval(&self, point: &[Q]) -> Q {
        assert_eq!(point.len(), self.nvars);
        let mut acc = Q::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                for _ in 0..k {
                    t *= x;
                }
            }
            acc += t;
        }
        acc
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        assert_eq!(self.nvars, d.nvars);
        let (lead_e, lead_c) = d.leading()?;
        let lead_e = lead_e.clone();
        let lead_c = lead_c.clone();
        let mut rem = self.clone();
        let mut quot = Poly::zero(self.nvars);
        while let Some((re, rc)) = rem.leading() {
            if !re.iter().zip(&lead_e).all(|(a, b)| a >= b) {
                return None;
            }
            let qe: Exponent = re.iter().zip(&lead_e).map(|(a, b)| a - b).collect();
            let qc = rc / &lead_c;
            rem = &rem - &d.mul_monomial(&qe, &qc);
            quot.add_term(qe, qc);
        }
        Some(quot)
    }

    /// Coefficients with respect to `var`: entry `k` is the coefficient of `var^k`,
    /// as a polynomial not involving `var`.
    fn coefficients_in(&self, var: usize) -> Vec<Poly> {
        let deg = self.degree_in(var) as usize;
        let mut out = vec![Poly::zero(self.nvars); deg + 1];
        for (e, c) in &self.terms {
            let k = e[var] as usize;
            let mut ne = e.clone();
            ne[var] = 0;
            out[k].add_term(ne, c.clone());
        }
        out
    }

    fn content_in(&self, var: usize) -> Poly {
        self.coefficients_in(var)
            .into_iter()
            .filter(|c| !c.is_zero())
            .fold(Poly::zero(self.nvars), |g, c| gcd(&g, &c))
    }

    fn pseudo_rem(&self, d: &Poly, var: usize) -> Poly {
        let dd = d.degree_in(var);
        if dd == 0 {
            return Poly::zero(self.nvars);
        }
        let lc = d.coefficients_in(var).pop().expect("nonzero divisor");
        let mut r = self.clone();
        while !r.is_zero() && r.involves(var) && r.degree_in(var) >= dd {
            let rd = r.degree_in(var);
            let rlc = r.coefficients_in(var).pop().expect("nonzero");
            let mut shift = vec![0; self.nvars];
            shift[var] = rd - dd;
            let sub = &(&rlc * d).mul_monomial(&shift, &Q::one());
            r = &(&lc * &r) - sub;
        }
        r
    }

    pub fn render(&self, names: &[String]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(v, &k)| if k == 1 { names[v].clone() } else { format!("{}^{}", names[v], k) })
                .collect();
            if mono.is_empty() {
                out.push_str(&abs.to_string());
            } else {
                if !abs.is_one() {
                    out.push_str(&abs.to_string());
                    out.push('*');
                }
                out.push_str(&mono.join("*"));
            }
        }
        out
    }
}

/// Greatest common divisor in `Q[x_1..x_n]`, normalised to be monic
/// (lexicographic leading coefficient 1). `gcd(0, 0) = 0`.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    assert_eq!(a.nvars, b.nvars);
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    let n = a.nvars;
    if a.num_terms() == 1 || b.num_terms() == 1 {
        // gcd with a monomial is the monomial of common minimal exponents
        let mut e = vec![u32::MAX; n];
        for (x, _) in a.terms.iter().chain(&b.terms) {
            for (m, k) in e.iter_mut().zip(x) {
                *m = (*m).min(*k);
            }
        }
        return Poly::monomial(n, e, Q::one());
    }
    let var = (0..n).rev().find(|&v| a.involves(v) || b.involves(v));
    let Some(var) = var else {
        return Poly::one(n);
    };
    if !a.involves(var) {
        return gcd(a, &b.content_in(var));
    }
    if !b.involves(var) {
        return gcd(&a.content_in(var), b);
    }
    let ca = a.content_in(var);
    let cb = b.content_in(var);
    let c = gcd(&ca, &cb);
    let mut r0 = a.div_exact(&ca).expect("content divides");
    let mut r1 = b.div_exact(&cb).expect("content divides");
    if r0.degree_in(var) < r1.degree_in(var) {
        std::mem::swap(&mut r0, &mut r1);
    }
    let g = loop {
        let r = r0.pseudo_rem(&r1, var);
        if r.is_zero() {
            break r1;
        }
        if !r.involves(var) {
            break Poly::one(n);
        }
        let pr = r.div_exact(&r.content_in(var)).expect("content divides");
        r0 = r1;
        r1 = pr;
    };
    let g = g.div_exact(&g.content_in(var)).expect("content divides");
    (&c * &g).monic()
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(&-Q::one())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = Poly::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Exponent = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = (1..=self.nvars).map(|i| format!("x{i}")).collect();
        f.write_str(&self.render(&names))
    }
}

/// Serialized polynomial term: coefficient as `p/q` text plus exponent vector.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct TermJson {
    pub coeff: String,
    pub exp: Vec<u32>,
}

impl Poly {
    pub fn to_json(&self) -> Vec<TermJson> {
        self.terms
            .iter()
            .map(|(e, c)| TermJson { coeff: crate::render_q(c), exp: e.clone() })
            .collect()
    }

    pub fn from_json(nvars: usize, terms: &[TermJson]) -> Result<Poly, String> {
        let mut p = Poly::zero(nvars);
        for t in terms {
            if t.exp.len() != nvars {
                return Err(format!("exponent vector {:?} has wrong length (expected {nvars})", t.exp));
            }
            let c = crate::parse_q(&t.coeff).ok_or_else(|| format!("bad rational '{}'", t.coeff))?;
            p.add_term(t.exp.clone(), c);
        }
        Ok(p)
    }
}

/// Parses a polynomial written over the given variable names, e.g.
/// `"1 + 2*c - s^2/3"`. Division is only allowed by nonzero constants.
pub fn parse_poly(src: &str, names: &[String]) -> Result<Poly, String> {
    let mut p = Parser { chars: src.chars().filter(|c| !c.is_whitespace()).collect(), pos: 0, names };
    let out = p.expr()?;
    if p.pos != p.chars.len() {
        return Err(format!("unexpected '{}' in '{}'", p.chars[p.pos], src));
    }
    Ok(out)
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    names: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Poly, String> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            if c != '+' && c != '-' {
                break;
            }
            self.pos += 1;
            let t = self.term()?;
            acc = if c == '+' { &acc + &t } else { &acc - &t };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly, String> {
        let mut acc = self.unary()?;
        while let Some(c) = self.peek() {
            if c != '*' && c != '/' {
                break;
            }
            self.pos += 1;
            let f = self.unary()?;
            if c == '*' {
                acc = &acc * &f;
            } else {
                if !f.is_constant() || f.is_zero() {
                    return Err("division by a non-constant or zero".into());
                }
                acc = acc.scale(&f.constant_term().recip());
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Poly, String> {
        if self.peek() == Some('-') {
            self.pos += 1;
            return Ok(-&self.unary()?);
        }
        if self.peek() == Some('+') {
            self.pos += 1;
            return self.unary();
        }
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let start = self.pos;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
            let e: String = self.chars[start..self.pos].iter().collect();
            let e: u32 = e.parse().map_err(|_| "expected exponent after '^'".to_string())?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Poly, String> {
        let n = self.names.len();
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(')') {
                    return Err("missing ')'".into());
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let text: String = self.chars[start..self.pos].iter().collect();
                let v = crate::parse_q(&text).ok_or_else(|| format!("bad number '{text}'"))?;
                Ok(Poly::constant(n, v))
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_alphanumeric() || c == '_') {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                let i = self
                    .names
                    .iter()
                    .position(|x| *x == name)
                    .ok_or_else(|| format!("unknown variable '{name}'"))?;
                Ok(Poly::var(n, i))
            }
            Some(c) => Err(format!("unexpected '{c}'")),
            None => Err("unexpected end of input".into()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::q;

    fn x(n: usize, i: usize) -> Poly {
        Poly::var(n, i)
    }

    #[test]
    fn arithmetic_basics() {
        let a = &x(2, 0) + &x(2, 1);
        let sq = a.pow(2);
        assert_eq!(sq.num_terms(), 3);
        assert_eq!(sq.coeff(&[1, 1]), q(2));
        assert!((&sq - &sq).is_zero());
    }

    #[test]
    fn exact_division() {
        let a = &x(2, 0) + &x(2, 1);
        let b = &x(2, 0) - &x(2, 1);
        let p = &a * &b;
        assert_eq!(p.div_exact(&a), Some(b.clone()));
        assert_eq!((&p + &Poly::one(2)).div_exact(&a), None);
    }

    #[test]
    fn gcd_of_products() {
        let n = 3;
        let a = &x(n, 0) + &x(n, 2);
        let b = &(&x(n, 1) * &x(n, 1)) - &Poly::constant(n, q(3));
        let c = &x(n, 0) * &x(n, 1);
        let g = gcd(&(&a * &b), &(&a * &c));
        assert_eq!(g, a.monic());
        let g = gcd(&(&a * &b).scale(&q(4)), &(&(&a * &b) * &c));
        assert_eq!(g, (&a * &b).monic());
        assert_eq!(gcd(&b, &c), Poly::one(n));
    }

    #[test]
    fn gcd_with_monomials() {
        let n = 2;
        let m = x(n, 0).pow(3).mul_monomial(&[0, 2], &q(5));
        let m2 = x(n, 0).mul_monomial(&[0, 4], &q(7));
        assert_eq!(gcd(&m, &m2), Poly::monomial(n, vec![1, 2], q(1)));
    }

    #[test]
    fn render_is_readable() {
        let names = vec!["u1".to_string(), "u2".to_string()];
        let p = &(&x(2, 0) * &x(2, 1)) - &Poly::constant(2, crate::qf(1, 2));
        assert_eq!(p.render(&names), "u1*u2 - 1/2");
    }

    #[test]
    fn substitution_composes() {
        // p(x, y) = x*y ; x -> t+1, y -> t-1 gives t^2 - 1
        let p = &x(2, 0) * &x(2, 1);
        let t = x(1, 0);
        let one = Poly::one(1);
        let r = p.substitute(&[&t + &one, &t - &one]);
        assert_eq!(r, &t.pow(2) - &one);
    }

    #[test]
    fn parse_roundtrip() {
        let names = vec!["s".to_string(), "c".to_string()];
        let p = parse_poly("1 + 2*c - s^2/3 + (s+c)*(s-c)", &names).unwrap();
        let back = parse_poly(&p.render(&names), &names).unwrap();
        assert_eq!(p, back);
        assert_eq!(p.coeff(&[2, 0]), crate::qf(2, 3));
        assert!(parse_poly("x + 1", &names).is_err());
        assert!(parse_poly("1/s", &names).is_err());
    }
}
