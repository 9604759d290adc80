use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::exponent::ExponentVector;
use crate::error::{Error, Result};

pub type Coeff = BigRational;

pub fn rat(n: i64) -> Coeff {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat2(n: i64, d: i64) -> Coeff {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Canonical text for a rational: `a` or `a/b`.
pub fn format_rational(c: &Coeff) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

pub fn parse_rational(s: &str) -> Result<Coeff> {
    let bad = || Error::Invalid(format!("not a rational number: {s:?}"));
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

/// Ordered coordinate names of an affine chart.
#[derive(Clone)]
pub struct Chart(Arc<Vec<String>>);

impl Chart {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Chart> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_string()).collect();
        for (i, a) in names.iter().enumerate() {
            if a.is_empty() || !valid_identifier(a) {
                return Err(Error::Invalid(format!("bad coordinate name {a:?}")));
            }
            if names[..i].contains(a) {
                return Err(Error::Invalid(format!("duplicate coordinate {a:?}")));
            }
        }
        Ok(Chart(Arc::new(names)))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn names(&self) -> &[String] {
        &self.0
    }

    pub fn name(&self, i: usize) -> &str {
        &self.0[i]
    }

    pub fn index(&self, name: &str) -> Option<usize> {
        self.0.iter().position(|n| n == name)
    }

    /// Chart with a fresh coordinate prepended (used for elimination).
    pub fn with_prefix(&self, name: &str) -> Chart {
        let mut v = Vec::with_capacity(self.dim() + 1);
        v.push(name.to_string());
        v.extend(self.0.iter().cloned());
        Chart(Arc::new(v))
    }

    /// A coordinate name not yet used in the chart.
    pub fn fresh_name(&self, stem: &str) -> String {
        if self.index(stem).is_none() {
            return stem.to_string();
        }
        (0..)
            .map(|k| format!("{stem}{k}"))
            .find(|c| self.index(c).is_none())
            .unwrap()
    }
}

pub fn valid_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl PartialEq for Chart {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for Chart {}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Chart({})", self.0.join(","))
    }
}

/// Exact polynomial over Q. Terms are kept sorted in decreasing graded order.
#[derive(Clone, PartialEq, Eq)]
pub struct Polynomial {
    chart: Chart,
    terms: Vec<(ExponentVector, Coeff)>,
}

impl Polynomial {
    pub fn zero(chart: &Chart) -> Self {
        Polynomial {
            chart: chart.clone(),
            terms: Vec::new(),
        }
    }

    pub fn constant(chart: &Chart, c: Coeff) -> Self {
        let mut p = Polynomial::zero(chart);
        if !c.is_zero() {
            p.terms.push((ExponentVector::zero(chart.dim()), c));
        }
        p
    }

    pub fn one(chart: &Chart) -> Self {
        Polynomial::constant(chart, Coeff::one())
    }

    pub fn var(chart: &Chart, i: usize) -> Self {
        Polynomial {
            chart: chart.clone(),
            terms: vec![(ExponentVector::unit(chart.dim(), i), Coeff::one())],
        }
    }

    pub fn var_named(chart: &Chart, name: &str) -> Result<Self> {
        let i = chart
            .index(name)
            .ok_or_else(|| Error::Invalid(format!("unknown coordinate {name:?}")))?;
        Ok(Polynomial::var(chart, i))
    }

    pub fn monomial(chart: &Chart, e: ExponentVector, c: Coeff) -> Self {
        assert_eq!(e.len(), chart.dim());
        let mut p = Polynomial::zero(chart);
        if !c.is_zero() {
            p.terms.push((e, c));
        }
        p
    }

    /// Builds a polynomial from arbitrary (possibly repeated, zero) terms.
    pub fn from_terms<I>(chart: &Chart, terms: I) -> Self
    where
        I: IntoIterator<Item = (ExponentVector, Coeff)>,
    {
        let mut acc: BTreeMap<ExponentVector, Coeff> = BTreeMap::new();
        for (e, c) in terms {
            assert_eq!(e.len(), chart.dim(), "exponent length");
            let slot = acc.entry(e).or_insert_with(Coeff::zero);
            *slot += c;
        }
        Polynomial {
            chart: chart.clone(),
            terms: acc.into_iter().rev().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn parse(chart: &Chart, text: &str) -> Result<Self> {
        super::parse::parse_polynomial(chart, text)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn terms(&self) -> &[(ExponentVector, Coeff)] {
        &self.terms
    }

    pub fn nterms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(e, _)| e.is_zero())
    }

    pub fn constant_term(&self) -> Coeff {
        match self.terms.last() {
            Some((e, c)) if e.is_zero() => c.clone(),
            _ => Coeff::zero(),
        }
    }

    /// Total degree; -1 encoded as None for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.first().map(|(e, _)| e.degree())
    }

    /// Order at the origin: least total degree of a term.
    pub fn order(&self) -> Option<u32> {
        self.terms.iter().map(|(e, _)| e.degree()).min()
    }

    /// Largest term in the graded order.
    pub fn leading(&self) -> Option<&(ExponentVector, Coeff)> {
        self.terms.first()
    }

    /// Initial exponent exp(f): the smallest element of the support.
    pub fn initial(&self) -> Option<&(ExponentVector, Coeff)> {
        self.terms.last()
    }

    pub fn coefficient(&self, e: &ExponentVector) -> Coeff {
        self.terms
            .iter()
            .find(|(x, _)| x == e)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Coeff::zero)
    }

    pub fn involves(&self, i: usize) -> bool {
        self.terms.iter().any(|(e, _)| e.0[i] > 0)
    }

    pub fn variables(&self) -> Vec<usize> {
        (0..self.chart.dim()).filter(|&i| self.involves(i)).collect()
    }

    fn check_chart(&self, other: &Polynomial) {
        assert!(
            self.chart == other.chart,
            "chart mismatch: {:?} vs {:?}",
            self.chart,
            other.chart
        );
    }

    pub fn try_add(&self, other: &Polynomial) -> Result<Polynomial> {
        if self.chart != other.chart {
            return Err(Error::ChartMismatch(format!(
                "{:?} vs {:?}",
                self.chart, other.chart
            )));
        }
        Ok(self + other)
    }

    pub fn try_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        if self.chart != other.chart {
            return Err(Error::ChartMismatch(format!(
                "{:?} vs {:?}",
                self.chart, other.chart
            )));
        }
        Ok(self * other)
    }

    pub fn scale(&self, c: &Coeff) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.chart);
        }
        Polynomial {
            chart: self.chart.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, a)| (e.clone(), a * c))
                .collect(),
        }
    }

    pub fn mul_monomial(&self, e: &ExponentVector, c: &Coeff) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(&self.chart);
        }
        Polynomial {
            chart: self.chart.clone(),
            terms: self
                .terms
                .iter()
                .map(|(x, a)| (x.add(e), a * c))
                .collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        let mut acc = Polynomial::one(&self.chart);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Scales so that the leading coefficient is 1.
    pub fn monic(&self) -> Polynomial {
        match self.leading() {
            Some((_, c)) => self.scale(&c.recip()),
            None => self.clone(),
        }
    }

    pub fn eval(&self, point: &[Coeff]) -> Coeff {
        assert_eq!(point.len(), self.chart.dim());
        let mut acc = Coeff::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, &k) in point.iter().zip(&e.0) {
                if k > 0 {
                    if x.is_zero() {
                        t = Coeff::zero();
                        break;
                    }
                    t *= num_traits::pow(x.clone(), k as usize);
                }
            }
            acc += t;
        }
        acc
    }

    /// Ring homomorphism sending coordinate i to `images[i]` (all in one target chart).
    pub fn substitute(&self, target: &Chart, images: &[Polynomial]) -> Polynomial {
        assert_eq!(images.len(), self.chart.dim());
        let mut powers: Vec<Vec<Polynomial>> = images.iter().map(|p| vec![Polynomial::one(target), p.clone()]).collect();
        let mut acc: BTreeMap<ExponentVector, Coeff> = BTreeMap::new();
        for (e, c) in &self.terms {
            let mut t = Polynomial::constant(target, c.clone());
            for (i, &k) in e.0.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap() * &images[i];
                    powers[i].push(next);
                }
                t = &t * &powers[i][k as usize];
            }
            for (x, a) in t.terms {
                *acc.entry(x).or_insert_with(Coeff::zero) += a;
            }
        }
        Polynomial {
            chart: target.clone(),
            terms: acc.into_iter().rev().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    /// Substitution by coordinate name; unmapped coordinates map to the
    /// same-named coordinate of the target chart.
    pub fn substitute_named(
        &self,
        target: &Chart,
        map: &BTreeMap<String, Polynomial>,
    ) -> Result<Polynomial> {
        let mut images = Vec::with_capacity(self.chart.dim());
        for name in self.chart.names() {
            match map.get(name) {
                Some(p) => {
                    if p.chart != *target {
                        return Err(Error::ChartMismatch(format!("image of {name}")));
                    }
                    images.push(p.clone())
                }
                None => images.push(Polynomial::var_named(target, name)?),
            }
        }
        Ok(self.substitute(target, &images))
    }

    /// f(x + a): moves the point `a` to the origin.
    pub fn translate(&self, a: &[Coeff]) -> Polynomial {
        if a.iter().all(|c| c.is_zero()) {
            return self.clone();
        }
        let images: Vec<Polynomial> = (0..self.chart.dim())
            .map(|i| &Polynomial::var(&self.chart, i) + &Polynomial::constant(&self.chart, a[i].clone()))
            .collect();
        self.substitute(&self.chart, &images)
    }

    /// Re-expresses the polynomial in another chart containing all used names.
    pub fn embed(&self, target: &Chart) -> Result<Polynomial> {
        if *target == self.chart {
            return Ok(self.clone());
        }
        let mut idx = Vec::with_capacity(self.chart.dim());
        for (i, name) in self.chart.names().iter().enumerate() {
            match target.index(name) {
                Some(j) => idx.push(Some(j)),
                None if self.involves(i) => {
                    return Err(Error::ChartMismatch(format!("{name} missing in target chart")))
                }
                None => idx.push(None),
            }
        }
        let n = target.dim();
        Ok(Polynomial::from_terms(
            target,
            self.terms.iter().map(|(e, c)| {
                let mut v = vec![0; n];
                for (i, &k) in e.0.iter().enumerate() {
                    if let Some(j) = idx[i] {
                        v[j] += k;
                    }
                }
                (ExponentVector(v), c.clone())
            }),
        ))
    }

    /// Sets the given coordinates to zero.
    pub fn set_zero(&self, vars: &[usize]) -> Polynomial {
        Polynomial {
            chart: self.chart.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| vars.iter().all(|&i| e.0[i] == 0))
                .cloned()
                .collect(),
        }
    }

    /// Largest k with x_i^k dividing f, and the cofactor.
    pub fn split_var_power(&self, i: usize) -> (u32, Polynomial) {
        if self.is_zero() {
            return (0, self.clone());
        }
        let k = self.terms.iter().map(|(e, _)| e.0[i]).min().unwrap();
        if k == 0 {
            return (0, self.clone());
        }
        let mut d = ExponentVector::zero(self.chart.dim());
        d.0[i] = k;
        (
            k,
            Polynomial {
                chart: self.chart.clone(),
                terms: self.terms.iter().map(|(e, c)| (e.sub(&d), c.clone())).collect(),
            },
        )
    }

    /// Exact division; None when `other` does not divide `self`.
    pub fn divide_exact(&self, other: &Polynomial) -> Option<Polynomial> {
        self.check_chart(other);
        let (lm, lc) = other.leading()?.clone();
        let mut rem = self.clone();
        let mut quot: Vec<(ExponentVector, Coeff)> = Vec::new();
        while let Some((e, c)) = rem.leading().cloned() {
            if !lm.divides(&e) {
                return None;
            }
            let m = e.sub(&lm);
            let q = c / &lc;
            rem = &rem - &other.mul_monomial(&m, &q);
            quot.push((m, q));
        }
        Some(Polynomial::from_terms(&self.chart, quot))
    }

    /// Coefficients of the degree-one part (after translating a point to 0).
    pub fn linear_part(&self) -> Vec<Coeff> {
        let mut v = vec![Coeff::zero(); self.chart.dim()];
        for (e, c) in &self.terms {
            if e.degree() == 1 {
                let i = e.0.iter().position(|&k| k == 1).unwrap();
                v[i] = c.clone();
            }
        }
        v
    }

    /// When the polynomial is `c * x_i` for a single coordinate, returns i.
    pub fn as_scaled_variable(&self) -> Option<usize> {
        if self.terms.len() != 1 {
            return None;
        }
        let (e, _) = &self.terms[0];
        if e.degree() == 1 {
            e.0.iter().position(|&k| k == 1)
        } else {
            None
        }
    }

    /// Normalized representative up to a nonzero scalar.
    pub fn normalized(&self) -> Polynomial {
        let mut p = self.monic();
        p.terms.shrink_to_fit();
        p
    }

    fn merge(&self, other: &Polynomial, negate: bool) -> Polynomial {
        self.check_chart(other);
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let a = &self.terms;
        let b = &other.terms;
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    let c = if negate { -b[j].1.clone() } else { b[j].1.clone() };
                    out.push((b[j].0.clone(), c));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let c = if negate { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        for t in &b[j..] {
            let c = if negate { -t.1.clone() } else { t.1.clone() };
            out.push((t.0.clone(), c));
        }
        Polynomial {
            chart: self.chart.clone(),
            terms: out,
        }
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, other: &Polynomial) -> Polynomial {
        self.merge(other, false)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, other: &Polynomial) -> Polynomial {
        self.merge(other, true)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(&-Coeff::one())
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, other: &Polynomial) -> Polynomial {
        self.check_chart(other);
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero(&self.chart);
        }
        let mut acc: BTreeMap<ExponentVector, Coeff> = BTreeMap::new();
        for (e, c) in &self.terms {
            for (x, a) in &other.terms {
                *acc.entry(e.add(x)).or_insert_with(Coeff::zero) += c * a;
            }
        }
        Polynomial {
            chart: self.chart.clone(),
            terms: acc.into_iter().rev().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            let a = c.abs();
            let mono = format_monomial(&self.chart, e);
            if mono.is_empty() {
                write!(f, "{}", format_rational(&a))?;
            } else if a.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{}*{mono}", format_rational(&a))?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({self})")
    }
}

pub fn format_monomial(chart: &Chart, e: &ExponentVector) -> String {
    let mut parts = Vec::new();
    for (i, &k) in e.0.iter().enumerate() {
        match k {
            0 => {}
            1 => parts.push(chart.name(i).to_string()),
            _ => parts.push(format!("{}^{}", chart.name(i), k)),
        }
    }
    parts.join("*")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chart(names: &[&str]) -> Chart {
        Chart::new(names).unwrap()
    }

    #[test]
    fn difference_of_squares() {
        let c = chart(&["x", "y"]);
        let f = Polynomial::parse(&c, "x + y").unwrap();
        let g = Polynomial::parse(&c, "x - y").unwrap();
        assert_eq!((&f * &g).to_string(), "x^2 - y^2");
    }

    #[test]
    fn chart_substitution() {
        let src = chart(&["x1", "x2", "x3"]);
        let dst = chart(&["y1", "y2", "y3"]);
        let f = Polynomial::parse(&src, "x1^2 - x2^2*x3").unwrap();
        let images = vec![
            Polynomial::parse(&dst, "y1*y2").unwrap(),
            Polynomial::parse(&dst, "y2").unwrap(),
            Polynomial::parse(&dst, "y3").unwrap(),
        ];
        let g = f.substitute(&dst, &images);
        let expected = Polynomial::parse(&dst, "y2^2*(y1^2 - y3)").unwrap();
        assert_eq!(g, expected);
    }

    #[test]
    fn identity_substitution() {
        let c = chart(&["a", "b"]);
        let f = Polynomial::parse(&c, "3/2*a^2*b - b + 7").unwrap();
        let images: Vec<_> = (0..2).map(|i| Polynomial::var(&c, i)).collect();
        assert_eq!(f.substitute(&c, &images), f);
    }

    #[test]
    fn canonical_printing() {
        let c = chart(&["x1", "x2", "y"]);
        let f = Polynomial::parse(&c, "1 - y + x2*x1 - 1/3*x1^2").unwrap();
        assert_eq!(f.to_string(), "-1/3*x1^2 + x1*x2 - y + 1");
    }

    #[test]
    fn exact_division() {
        let c = chart(&["x", "y"]);
        let f = Polynomial::parse(&c, "x^2 - y^2").unwrap();
        let g = Polynomial::parse(&c, "x - y").unwrap();
        assert_eq!(f.divide_exact(&g).unwrap().to_string(), "x + y");
        assert!(g.divide_exact(&f).is_none());
    }

    #[test]
    fn translation_moves_point() {
        let c = chart(&["x", "y"]);
        let f = Polynomial::parse(&c, "x*y - 2").unwrap();
        let t = f.translate(&[rat(1), rat(2)]);
        assert!(t.constant_term().is_zero());
        assert_eq!(t.to_string(), "x*y + 2*x + y");
    }

    #[test]
    fn initial_exponent_is_minimal() {
        let c = chart(&["y1", "y2", "y3"]);
        let f = Polynomial::parse(&c, "y1^2 - y3").unwrap();
        assert_eq!(f.initial().unwrap().0 .0, vec![0, 0, 1]);
    }
}
