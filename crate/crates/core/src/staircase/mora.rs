//! Local standard bases with Mora's tangent-cone normal form.
//!
//! The local order compares |α| first and then (α1, …, αn) lexicographically;
//! the initial exponent of f is the smallest element of its support.

use num_traits::{One, Zero};

use crate::algebra::{Coeff, ExponentVector, Ideal, Polynomial};
use crate::error::{Error, Result};
use crate::limits::Limits;

type Term = (ExponentVector, Coeff);

/// Terms sorted increasingly, so the initial term comes first.
#[derive(Clone, Debug)]
struct LPoly {
    terms: Vec<Term>,
}

impl LPoly {
    fn from_poly(p: &Polynomial) -> LPoly {
        let mut terms: Vec<Term> = p.terms().to_vec();
        terms.reverse();
        LPoly { terms }
    }

    fn to_poly(&self, like: &Polynomial) -> Polynomial {
        Polynomial::from_terms(like.chart(), self.terms.iter().cloned())
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn lm(&self) -> &ExponentVector {
        &self.terms[0].0
    }

    fn ecart(&self) -> u32 {
        let top = self.terms.iter().map(|(e, _)| e.degree()).max().unwrap_or(0);
        top - self.lm().degree()
    }

    fn max_degree(&self) -> u32 {
        self.terms.iter().map(|(e, _)| e.degree()).max().unwrap_or(0)
    }

    fn make_monic(&mut self) {
        if let Some((_, c)) = self.terms.first() {
            if !c.is_one() {
                let inv = c.recip();
                for t in &mut self.terms {
                    t.1 *= &inv;
                }
            }
        }
    }

    /// self − c·x^m·g, merging in increasing order.
    fn sub_scaled(&self, g: &LPoly, m: &ExponentVector, c: &Coeff) -> LPoly {
        let shifted: Vec<Term> = g.terms.iter().map(|(e, a)| (e.add(m), a * c)).collect();
        let mut out = Vec::with_capacity(self.terms.len() + shifted.len());
        let (mut i, mut j) = (0, 0);
        let a = &self.terms;
        let b = &shifted;
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((b[j].0.clone(), -b[j].1.clone()));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let s = &a[i].1 - &b[j].1;
                    if !s.is_zero() {
                        out.push((a[i].0.clone(), s));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().map(|(e, c)| (e.clone(), -c.clone())));
        LPoly { terms: out }
    }
}

fn reduce_step(h: &LPoly, g: &LPoly) -> LPoly {
    let m = h.lm().sub(g.lm());
    let c = &h.terms[0].1 / &g.terms[0].1;
    h.sub_scaled(g, &m, &c)
}

/// Mora's weak normal form with écart selection.
fn nf_mora(f: &LPoly, basis: &[LPoly], lim: &Limits) -> Result<LPoly> {
    let mut h = f.clone();
    let mut t: Vec<LPoly> = basis.to_vec();
    let mut steps = 0usize;
    while !h.is_zero() {
        let pick = t
            .iter()
            .enumerate()
            .filter(|(_, g)| g.lm().divides(h.lm()))
            .min_by_key(|(i, g)| (g.ecart(), *i))
            .map(|(i, _)| i);
        let Some(i) = pick else { break };
        let g = t[i].clone();
        if g.ecart() > h.ecart() {
            t.push(h.clone());
        }
        h = reduce_step(&h, &g);
        steps += 1;
        if h.max_degree() > lim.max_degree {
            return Err(Error::CapExceeded(format!(
                "Mora reduction exceeded degree cap {}",
                lim.max_degree
            )));
        }
        if steps > 200_000 {
            return Err(Error::CapExceeded("Mora reduction step budget".into()));
        }
    }
    Ok(h)
}

fn spoly(f: &LPoly, g: &LPoly) -> LPoly {
    let l = f.lm().lcm(g.lm());
    let mf = l.sub(f.lm());
    let mg = l.sub(g.lm());
    let a = LPoly {
        terms: f
            .terms
            .iter()
            .map(|(e, c)| (e.add(&mf), c / &f.terms[0].1))
            .collect(),
    };
    let inv = g.terms[0].1.recip();
    a.sub_scaled(g, &mg, &inv)
}

/// Standard basis at the origin of the given generators.
pub fn standard_basis_at_origin(gens: &[Polynomial], lim: &Limits) -> Result<Vec<Polynomial>> {
    let Some(like) = gens.iter().find(|g| !g.is_zero()).cloned() else {
        return Ok(Vec::new());
    };
    if gens.iter().any(|g| !g.constant_term().is_zero()) {
        return Ok(vec![Polynomial::one(like.chart())]);
    }
    let mut s: Vec<LPoly> = Vec::new();
    for g in gens.iter().filter(|g| !g.is_zero()) {
        let mut l = LPoly::from_poly(g);
        l.make_monic();
        s.push(l);
    }
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for j in 0..s.len() {
        for i in 0..j {
            pairs.push((i, j));
        }
    }
    while let Some((i, j)) = pairs.pop() {
        let sp = spoly(&s[i], &s[j]);
        if sp.is_zero() {
            continue;
        }
        let mut h = nf_mora(&sp, &s, lim)?;
        if h.is_zero() {
            continue;
        }
        h.make_monic();
        if h.lm().degree() == 0 {
            return Ok(vec![Polynomial::one(like.chart())]);
        }
        let k = s.len();
        // newest pairs first keeps the search close to depth-first
        for m in 0..k {
            pairs.insert(0, (m, k));
        }
        s.push(h);
        if s.len() > lim.max_basis {
            return Err(Error::CapExceeded(format!(
                "standard basis exceeds {} elements",
                lim.max_basis
            )));
        }
    }
    Ok(s.iter().map(|l| l.to_poly(&like)).collect())
}

/// Mora normal form of `f` with respect to a standard basis (at the origin).
pub fn local_normal_form(f: &Polynomial, basis: &[Polynomial], lim: &Limits) -> Result<Polynomial> {
    let b: Vec<LPoly> = basis.iter().map(LPoly::from_poly).collect();
    let r = nf_mora(&LPoly::from_poly(f), &b, lim)?;
    Ok(r.to_poly(f))
}

/// Initial exponents of a standard basis reduced to a minimal set.
pub fn minimal_initial_exponents(basis: &[Polynomial]) -> Vec<ExponentVector> {
    let lms: Vec<ExponentVector> = basis
        .iter()
        .filter_map(|g| g.initial().map(|(e, _)| e.clone()))
        .collect();
    minimalize(lms)
}

pub fn minimalize(mut v: Vec<ExponentVector>) -> Vec<ExponentVector> {
    v.sort();
    v.dedup();
    let mut out: Vec<ExponentVector> = Vec::new();
    for e in v {
        if !out.iter().any(|o| o.divides(&e)) {
            out.push(e);
        }
    }
    out
}

/// Standard basis of I at the point a (coordinates translated so a = 0).
pub fn standard_basis_local(i: &Ideal, a: &[Coeff], lim: &Limits) -> Result<Vec<Polynomial>> {
    let gens: Vec<Polynomial> = i.gens().iter().map(|g| g.translate(a)).collect();
    standard_basis_at_origin(&gens, lim)
}
