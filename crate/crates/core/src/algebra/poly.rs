use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};

use super::{parse_rational, Coefficient, LinearValue, Rational};
use crate::error::{Error, Result};

/// Sparse polynomial over the rationals in a fixed, ordered list of variables.
///
/// Terms map exponent vectors (one entry per variable) to non-zero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    vars: Vec<String>,
    terms: BTreeMap<Vec<u32>, Rational>,
}

/// Value bound to a variable by [`MultiPoly::substitute`].
#[derive(Clone, Debug)]
pub enum Binding {
    Int(i64),
    Rat(Rational),
    Poly(MultiPoly),
}

impl MultiPoly {
    pub fn zero(vars: &[String]) -> Self {
        MultiPoly { vars: vars.to_vec(), terms: BTreeMap::new() }
    }

    pub fn constant(vars: &[String], c: Rational) -> Self {
        let mut p = Self::zero(vars);
        p.add_term(vec![0; vars.len()], c);
        p
    }

    pub fn one(vars: &[String]) -> Self {
        Self::constant(vars, Rational::one())
    }

    /// The polynomial consisting of the single variable `name`.
    pub fn var(vars: &[String], name: &str) -> Result<Self> {
        let idx = Self::index_in(vars, name)?;
        let mut e = vec![0; vars.len()];
        e[idx] = 1;
        let mut p = Self::zero(vars);
        p.add_term(e, Rational::one());
        Ok(p)
    }

    pub fn monomial(vars: &[String], exponents: Vec<u32>, c: Rational) -> Self {
        assert_eq!(exponents.len(), vars.len(), "exponent length mismatch");
        let mut p = Self::zero(vars);
        p.add_term(exponents, c);
        p
    }

    /// Univariate polynomial `sum coeffs[k] * name^k`.
    pub fn univariate(name: &str, coeffs: &[Rational]) -> Self {
        let vars = vec![name.to_string()];
        let mut p = Self::zero(&vars);
        for (k, c) in coeffs.iter().enumerate() {
            p.add_term(vec![k as u32], c.clone());
        }
        p
    }

    /// Variable names `prefix1, ..., prefixN`.
    pub fn indexed_vars(prefix: &str, n: usize) -> Vec<String> {
        (1..=n).map(|i| format!("{prefix}{i}")).collect()
    }

    fn index_in(vars: &[String], name: &str) -> Result<usize> {
        vars.iter()
            .position(|v| v == name)
            .ok_or_else(|| Error::InvalidInput(format!("unknown variable {name:?}")))
    }

    pub fn variables(&self) -> &[String] {
        &self.vars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, exponents: Vec<u32>, c: Rational) {
        debug_assert_eq!(exponents.len(), self.vars.len());
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exponents);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn coefficient(&self, exponents: &[u32]) -> Rational {
        self.terms.get(exponents).cloned().unwrap_or_else(Rational::zero)
    }

    /// Constant term, i.e. the coefficient of the zero exponent vector.
    pub fn constant_term(&self) -> Rational {
        self.coefficient(&vec![0; self.vars.len()])
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    fn check_compatible(&self, other: &Self) {
        assert_eq!(self.vars, other.vars, "polynomials over different variable lists");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_compatible(other);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, s: &Rational) -> Self {
        if s.is_zero() {
            return Self::zero(&self.vars);
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_compatible(other);
        let mut out = Self::zero(&self.vars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(&self.vars);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Evaluates at a point given as one rational per variable.
    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.vars.len());
        let mut total = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(e) {
                for _ in 0..k {
                    t *= x;
                }
            }
            total += t;
        }
        total
    }

    pub fn eval_int(&self, point: &[i64]) -> Rational {
        let p: Vec<Rational> = point.iter().map(|&x| super::int(x)).collect();
        self.eval(&p)
    }

    /// Substitutes integers, rationals or polynomials (over the same variable
    /// list) for the named variables. Unbound variables stay symbolic.
    pub fn substitute(&self, bindings: &[(&str, Binding)]) -> Result<Self> {
        let mut table: Vec<Option<MultiPoly>> = vec![None; self.vars.len()];
        for (name, b) in bindings {
            let idx = Self::index_in(&self.vars, name)?;
            let p = match b {
                Binding::Int(v) => Self::constant(&self.vars, super::int(*v)),
                Binding::Rat(v) => Self::constant(&self.vars, v.clone()),
                Binding::Poly(p) => {
                    if p.vars != self.vars {
                        return Err(Error::InvalidInput(
                            "substituted polynomial uses a different variable list".into(),
                        ));
                    }
                    p.clone()
                }
            };
            table[idx] = Some(p);
        }
        let mut out = Self::zero(&self.vars);
        for (e, c) in &self.terms {
            let mut kept = e.clone();
            let mut term = Self::one(&self.vars);
            for (i, slot) in table.iter().enumerate() {
                if let Some(p) = slot {
                    term = term.mul(&p.pow(e[i]));
                    kept[i] = 0;
                }
            }
            out = out.add(&term.mul(&Self::monomial(&self.vars, kept, c.clone())));
        }
        Ok(out)
    }
}

impl fmt::Display for MultiPoly {
    /// `vars(a1,a2): 3/2*a1^2 + -1*a2`, terms in descending exponent order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "vars({}): ", self.vars.join(","))?;
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (name, &k) in self.vars.iter().zip(e) {
                match k {
                    0 => {}
                    1 => write!(f, "*{name}")?,
                    _ => write!(f, "*{name}^{k}")?,
                }
            }
        }
        Ok(())
    }
}

impl FromStr for MultiPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let rest = s
            .strip_prefix("vars(")
            .ok_or_else(|| Error::Parse(format!("polynomial must start with vars(: {s:?}")))?;
        let close = rest
            .find("):")
            .ok_or_else(|| Error::Parse("missing '):' after variable list".into()))?;
        let vars: Vec<String> = if rest[..close].is_empty() {
            Vec::new()
        } else {
            rest[..close].split(',').map(|v| v.trim().to_string()).collect()
        };
        let body = rest[close + 2..].trim();
        let mut p = MultiPoly::zero(&vars);
        if body == "0" {
            return Ok(p);
        }
        for term in body.split(" + ") {
            let mut factors = term.split('*');
            let c = parse_rational(factors.next().unwrap_or(""))?;
            let mut e = vec![0u32; vars.len()];
            for fac in factors {
                let (name, k) = match fac.split_once('^') {
                    Some((n, k)) => {
                        (n, k.parse::<u32>().map_err(|e| Error::Parse(e.to_string()))?)
                    }
                    None => (fac, 1),
                };
                let idx = MultiPoly::index_in(&vars, name)?;
                e[idx] += k;
            }
            p.add_term(e, c);
        }
        Ok(p)
    }
}

impl LinearValue for MultiPoly {
    fn zero_like(&self) -> Self {
        MultiPoly::zero(&self.vars)
    }
    fn add_scaled(&mut self, other: &Self, factor: &Rational) {
        *self = self.add(&other.scale(factor));
    }
}

impl Coefficient for MultiPoly {
    fn coeff_is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add_assign_ref(&mut self, other: &Self) {
        self.check_compatible(other);
        for (e, c) in &other.terms {
            self.add_term(e.clone(), c.clone());
        }
    }
    fn scale(&self, s: &Rational) -> Self {
        MultiPoly::scale(self, s)
    }
    fn mul(&self, other: &Self) -> Self {
        MultiPoly::mul(self, other)
    }
    fn to_text(&self) -> String {
        self.to_string()
    }
    fn from_text(s: &str) -> Result<Self> {
        s.parse()
    }
}
