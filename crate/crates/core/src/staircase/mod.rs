//! Diagrams of initial exponents and Hilbert–Samuel functions.

pub mod mora;
pub mod oracle;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::algebra::{Chart, Coeff, ExponentVector, Ideal, Polynomial};
use crate::error::{Error, Result};
use crate::limits::Limits;

pub use mora::{local_normal_form, standard_basis_at_origin, standard_basis_local};
pub use oracle::brute_force_hs;

/// Minimal generators (vertices) of a diagram 𝒩 = vertices + ℕⁿ.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Staircase {
    n: usize,
    vertices: Vec<ExponentVector>,
}

impl Staircase {
    pub fn new(n: usize, vertices: Vec<ExponentVector>) -> Staircase {
        assert!(vertices.iter().all(|v| v.len() == n));
        Staircase {
            n,
            vertices: mora::minimalize(vertices),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Vertices in increasing graded order.
    pub fn vertices(&self) -> &[ExponentVector] {
        &self.vertices
    }

    pub fn contains(&self, e: &ExponentVector) -> bool {
        self.vertices.iter().any(|v| v.divides(e))
    }

    pub fn is_unit(&self) -> bool {
        self.vertices.iter().any(|v| v.is_zero())
    }

    pub fn hilbert(&self) -> HilbertFunction {
        hilbert_function(self)
    }

    pub fn describe(&self, chart: &Chart) -> Vec<String> {
        self.vertices
            .iter()
            .map(|v| {
                let m = crate::algebra::poly::format_monomial(chart, v);
                if m.is_empty() {
                    "1".to_string()
                } else {
                    m
                }
            })
            .collect()
    }
}

/// Standard basis and diagram of I at the point a.
pub fn diagram(i: &Ideal, a: &[Coeff], lim: &Limits) -> Result<(Vec<Polynomial>, Staircase)> {
    let n = i.chart().dim();
    if i.is_zero() {
        return Ok((Vec::new(), Staircase::new(n, Vec::new())));
    }
    let basis = standard_basis_local(i, a, lim)?;
    let verts = mora::minimal_initial_exponents(&basis);
    Ok((basis, Staircase::new(n, verts)))
}

/// Exact Hilbert–Samuel function k ↦ #{α ∉ 𝒩 : |α| ≤ k}, stored through the
/// numerator N(t) of the Hilbert series of K[x]/mon(I).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertFunction {
    n: usize,
    numerator: BTreeMap<u32, BigInt>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HSComparison {
    Equal,
    Less,
    Greater,
    Incomparable,
}

impl HSComparison {
    pub fn reverse(self) -> HSComparison {
        match self {
            HSComparison::Less => HSComparison::Greater,
            HSComparison::Greater => HSComparison::Less,
            o => o,
        }
    }

    /// "f ≥ g" in the partial order.
    pub fn is_ge(self) -> bool {
        matches!(self, HSComparison::Equal | HSComparison::Greater)
    }
}

impl fmt::Display for HSComparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            HSComparison::Equal => "equal",
            HSComparison::Less => "less",
            HSComparison::Greater => "greater",
            HSComparison::Incomparable => "incomparable",
        };
        write!(f, "{s}")
    }
}

fn binom(m: i64, n: usize) -> BigInt {
    if m < n as i64 {
        return BigInt::zero();
    }
    let mut acc = BigInt::one();
    for i in 0..n {
        acc *= BigInt::from(m - i as i64);
    }
    for i in 1..=n {
        acc /= BigInt::from(i);
    }
    acc
}

fn poly_mul_t(a: &BTreeMap<u32, BigInt>, b: &BTreeMap<u32, BigInt>) -> BTreeMap<u32, BigInt> {
    let mut out: BTreeMap<u32, BigInt> = BTreeMap::new();
    for (da, ca) in a {
        for (db, cb) in b {
            *out.entry(da + db).or_insert_with(BigInt::zero) += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

/// Hilbert series numerator of K[x]/(monomials), by pivoting on a generator:
/// N(G) = N(G ∖ m) − t^{|m|}·N((G ∖ m) : m).
fn numerator(gens: Vec<ExponentVector>, memo: &mut BTreeMap<Vec<Vec<u32>>, BTreeMap<u32, BigInt>>) -> BTreeMap<u32, BigInt> {
    let gens = mora::minimalize(gens);
    let key: Vec<Vec<u32>> = gens.iter().map(|g| g.0.clone()).collect();
    if let Some(v) = memo.get(&key) {
        return v.clone();
    }
    let result = if gens.is_empty() {
        BTreeMap::from([(0u32, BigInt::one())])
    } else if gens.iter().any(|g| g.is_zero()) {
        BTreeMap::new()
    } else if gens
        .iter()
        .enumerate()
        .all(|(i, a)| gens[..i].iter().all(|b| a.coprime(b)))
    {
        let mut acc = BTreeMap::from([(0u32, BigInt::one())]);
        for g in &gens {
            let f = BTreeMap::from([(0u32, BigInt::one()), (g.degree(), -BigInt::one())]);
            acc = poly_mul_t(&acc, &f);
        }
        acc
    } else {
        let mut rest = gens.clone();
        let m = rest.pop().unwrap();
        let colon: Vec<ExponentVector> = rest.iter().map(|r| r.sub(&r.gcd(&m))).collect();
        let a = numerator(rest, memo);
        let b = numerator(colon, memo);
        let mut out = a;
        for (d, c) in b {
            *out.entry(d + m.degree()).or_insert_with(BigInt::zero) -= c;
        }
        out.retain(|_, c| !c.is_zero());
        out
    };
    memo.insert(key, result.clone());
    result
}

pub fn hilbert_function(s: &Staircase) -> HilbertFunction {
    let mut memo = BTreeMap::new();
    HilbertFunction {
        n: s.n,
        numerator: numerator(s.vertices.clone(), &mut memo),
    }
}

impl HilbertFunction {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn value(&self, k: usize) -> BigInt {
        let mut acc = BigInt::zero();
        for (d, c) in &self.numerator {
            acc += c * binom(k as i64 - *d as i64 + self.n as i64, self.n);
        }
        acc
    }

    pub fn value_u64(&self, k: usize) -> u64 {
        self.value(k).to_u64().expect("Hilbert value fits u64")
    }

    pub fn values(&self, upto: usize) -> Vec<BigInt> {
        (0..=upto).map(|k| self.value(k)).collect()
    }

    /// Degree from which the tail polynomial agrees with the function.
    pub fn tail_start(&self) -> usize {
        let top = self.numerator.keys().max().copied().unwrap_or(0) as i64;
        (top - self.n as i64).max(0) as usize
    }

    /// Coefficients (constant term first) of the polynomial P with
    /// H(k) = P(k) for k ≥ tail_start.
    pub fn tail_polynomial(&self) -> Vec<BigRational> {
        let n = self.n;
        let mut out = vec![BigRational::zero(); n + 1];
        let mut fact = BigInt::one();
        for i in 1..=n {
            fact *= BigInt::from(i);
        }
        for (d, c) in &self.numerator {
            // Π_{i=1..n} (k − d + i)
            let mut p = vec![BigRational::one()];
            for i in 1..=n {
                let shift = BigRational::from_integer(BigInt::from(i as i64 - *d as i64));
                let mut next = vec![BigRational::zero(); p.len() + 1];
                for (j, a) in p.iter().enumerate() {
                    next[j + 1] += a;
                    next[j] += a * &shift;
                }
                p = next;
            }
            let scale = BigRational::new(c.clone(), fact.clone());
            for (j, a) in p.iter().enumerate() {
                out[j] += a * &scale;
            }
        }
        while out.len() > 1 && out.last().unwrap().is_zero() {
            out.pop();
        }
        out
    }

    pub fn format_tail(&self) -> String {
        let coeffs = self.tail_polynomial();
        let chart = Chart::new(&["k"]).unwrap();
        let p = Polynomial::from_terms(
            &chart,
            coeffs
                .iter()
                .enumerate()
                .map(|(j, c)| (ExponentVector(vec![j as u32]), c.clone())),
        );
        p.to_string()
    }
}

fn eval_poly(p: &[BigRational], k: i64) -> BigRational {
    let x = BigRational::from_integer(BigInt::from(k));
    p.iter().rev().fold(BigRational::zero(), |acc, c| acc * &x + c)
}

/// Exact comparison of two Hilbert functions at every k.
pub fn compare_hs(a: &HilbertFunction, b: &HilbertFunction) -> HSComparison {
    let pa = a.tail_polynomial();
    let pb = b.tail_polynomial();
    let len = pa.len().max(pb.len());
    let mut d = vec![BigRational::zero(); len];
    for (j, c) in pa.iter().enumerate() {
        d[j] += c;
    }
    for (j, c) in pb.iter().enumerate() {
        d[j] -= c;
    }
    while d.len() > 1 && d.last().unwrap().is_zero() {
        d.pop();
    }
    let start = a.tail_start().max(b.tail_start());
    // beyond the Cauchy root bound the sign of d equals the sign of its leading coefficient
    let lead = d.last().unwrap().clone();
    let mut check_to = start;
    if !lead.is_zero() {
        let mut bound = BigRational::zero();
        for c in &d[..d.len() - 1] {
            let r = (c / &lead).abs();
            if r > bound {
                bound = r;
            }
        }
        let bound = (bound + BigRational::one()).ceil().to_integer().to_usize().unwrap_or(usize::MAX / 2);
        check_to = check_to.max(bound);
    }
    let (mut ge, mut le) = (true, true);
    for k in 0..=check_to {
        let (x, y) = (a.value(k), b.value(k));
        if x < y {
            ge = false;
        }
        if x > y {
            le = false;
        }
        if !ge && !le {
            return HSComparison::Incomparable;
        }
    }
    debug_assert!(eval_poly(&d, check_to as i64 + 1).is_positive() == lead.is_positive() || lead.is_zero());
    if lead.is_positive() {
        le = false;
    } else if lead.is_negative() {
        ge = false;
    }
    match (ge, le) {
        (true, true) => HSComparison::Equal,
        (true, false) => HSComparison::Greater,
        (false, true) => HSComparison::Less,
        (false, false) => HSComparison::Incomparable,
    }
}

/// Staircase of (x1⋯xp, y1⋯yq) in n variables (coordinates x1..xp, y1..).
pub fn hpq_staircase(p: usize, q: usize, n: usize) -> Result<Staircase> {
    if p < 1 || p + q > n {
        return Err(Error::Invalid(format!("hpq({p},{q},{n}) needs p ≥ 1 and p + q ≤ n")));
    }
    let mut x = vec![0u32; n];
    for e in x.iter_mut().take(p) {
        *e = 1;
    }
    let mut verts = vec![ExponentVector(x)];
    if q > 0 {
        let mut y = vec![0u32; n];
        for e in y.iter_mut().skip(p).take(q) {
            *e = 1;
        }
        verts.push(ExponentVector(y));
    }
    Ok(Staircase::new(n, verts))
}

pub fn hpq(p: usize, q: usize, n: usize) -> Result<HilbertFunction> {
    Ok(hilbert_function(&hpq_staircase(p, q, n)?))
}

/// Hilbert function of I at a point, through its diagram.
pub fn hilbert_at(i: &Ideal, a: &[Coeff], lim: &Limits) -> Result<HilbertFunction> {
    Ok(hilbert_function(&diagram(i, a, lim)?.1))
}
