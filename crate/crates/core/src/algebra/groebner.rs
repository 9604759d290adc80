//! Buchberger's algorithm for global monomial orders.

use std::cmp::Ordering;

use num_traits::{One, Zero};

use super::exponent::{ExponentVector, MonomialOrder};
use super::poly::{Chart, Coeff, Polynomial};
use crate::error::{Error, Result};
use crate::limits::Limits;

type Term = (Vec<u32>, Coeff);

/// Polynomial with terms sorted decreasingly in a fixed order.
#[derive(Clone, Debug)]
pub(crate) struct OPoly {
    pub terms: Vec<Term>,
}

fn add_exp(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn lcm(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

impl OPoly {
    pub fn from_poly(p: &Polynomial, order: MonomialOrder) -> OPoly {
        let mut terms: Vec<Term> = p.terms().iter().map(|(e, c)| (e.0.clone(), c.clone())).collect();
        terms.sort_by(|a, b| order.cmp(&b.0, &a.0));
        OPoly { terms }
    }

    pub fn to_poly(&self, chart: &Chart) -> Polynomial {
        Polynomial::from_terms(
            chart,
            self.terms.iter().map(|(e, c)| (ExponentVector(e.clone()), c.clone())),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lm(&self) -> &[u32] {
        &self.terms[0].0
    }

    pub fn make_monic(&mut self) {
        if let Some((_, c)) = self.terms.first() {
            if !c.is_one() {
                let inv = c.recip();
                for t in &mut self.terms {
                    t.1 *= &inv;
                }
            }
        }
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(e, _)| e.iter().sum::<u32>()).max().unwrap_or(0)
    }

    /// self - c * x^m * g
    pub fn sub_scaled(&self, g: &OPoly, m: &[u32], c: &Coeff, order: MonomialOrder) -> OPoly {
        let mut out = Vec::with_capacity(self.terms.len() + g.terms.len());
        let shifted: Vec<Term> = g.terms.iter().map(|(e, a)| (add_exp(e, m), a * c)).collect();
        let (mut i, mut j) = (0, 0);
        let a = &self.terms;
        let b = &shifted;
        while i < a.len() && j < b.len() {
            match order.cmp(&a[i].0, &b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push((b[j].0.clone(), -b[j].1.clone()));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = &a[i].1 - &b[j].1;
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().map(|(e, c)| (e.clone(), -c.clone())));
        OPoly { terms: out }
    }
}

/// Full reduction of `f` modulo `basis`; returns the remainder.
pub(crate) fn reduce(f: &OPoly, basis: &[OPoly], order: MonomialOrder) -> OPoly {
    let mut p = f.clone();
    let mut rem: Vec<Term> = Vec::new();
    while !p.is_zero() {
        let (lm, lc) = p.terms[0].clone();
        let mut hit = false;
        for g in basis {
            if divides(g.lm(), &lm) {
                let m: Vec<u32> = lm.iter().zip(g.lm()).map(|(a, b)| a - b).collect();
                let c = &lc / &g.terms[0].1;
                p = p.sub_scaled(g, &m, &c, order);
                hit = true;
                break;
            }
        }
        if !hit {
            rem.push(p.terms.remove(0));
        }
    }
    OPoly { terms: rem }
}

fn spoly(f: &OPoly, g: &OPoly, order: MonomialOrder) -> OPoly {
    let l = lcm(f.lm(), g.lm());
    let mf: Vec<u32> = l.iter().zip(f.lm()).map(|(a, b)| a - b).collect();
    let mg: Vec<u32> = l.iter().zip(g.lm()).map(|(a, b)| a - b).collect();
    let cf = f.terms[0].1.recip();
    let cg = g.terms[0].1.recip();
    let a = OPoly {
        terms: f.terms.iter().map(|(e, c)| (add_exp(e, &mf), c * &cf)).collect(),
    };
    a.sub_scaled(g, &mg, &cg, order)
}

/// Reduced Groebner basis (monic) of the given generators.
pub(crate) fn groebner(gens: Vec<OPoly>, order: MonomialOrder, lim: &Limits) -> Result<Vec<OPoly>> {
    let mut basis: Vec<OPoly> = Vec::new();
    for mut g in gens.into_iter().filter(|g| !g.is_zero()) {
        g.make_monic();
        basis.push(g);
    }
    if basis.iter().any(|g| g.lm().iter().all(|&e| e == 0)) {
        let n = basis[0].lm().len();
        return Ok(vec![OPoly {
            terms: vec![(vec![0; n], Coeff::one())],
        }]);
    }
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for j in 0..basis.len() {
        for i in 0..j {
            pairs.push((i, j));
        }
    }
    let mut dead = vec![false; basis.len()];
    while !pairs.is_empty() {
        // normal strategy: smallest lcm first
        let (k, _) = pairs
            .iter()
            .enumerate()
            .min_by(|(_, a), (_, b)| {
                let la = lcm(basis[a.0].lm(), basis[a.1].lm());
                let lb = lcm(basis[b.0].lm(), basis[b.1].lm());
                order.cmp(&la, &lb).then_with(|| a.cmp(b))
            })
            .unwrap();
        let (i, j) = pairs.swap_remove(k);
        if dead[i] || dead[j] {
            continue;
        }
        let (li, lj) = (basis[i].lm().to_vec(), basis[j].lm().to_vec());
        if li.iter().zip(&lj).all(|(a, b)| *a == 0 || *b == 0) {
            continue;
        }
        let l = lcm(&li, &lj);
        // chain criterion
        let chain = (0..basis.len()).any(|m| {
            m != i
                && m != j
                && !dead[m]
                && divides(basis[m].lm(), &l)
                && !pairs.contains(&(i.min(m), i.max(m)))
                && !pairs.contains(&(j.min(m), j.max(m)))
        });
        if chain {
            continue;
        }
        let s = spoly(&basis[i], &basis[j], order);
        let live: Vec<OPoly> = basis
            .iter()
            .zip(&dead)
            .filter(|(_, d)| !**d)
            .map(|(g, _)| g.clone())
            .collect();
        let mut h = reduce(&s, &live, order);
        if h.is_zero() {
            continue;
        }
        h.make_monic();
        if h.lm().iter().all(|&e| e == 0) {
            return Ok(vec![h]);
        }
        if h.degree() > lim.max_degree {
            return Err(Error::CapExceeded(format!(
                "Groebner basis element of degree {} exceeds cap {}",
                h.degree(),
                lim.max_degree
            )));
        }
        let new = basis.len();
        for m in 0..new {
            if !dead[m] {
                pairs.push((m, new));
            }
        }
        basis.push(h);
        dead.push(false);
        if basis.len() > lim.max_basis {
            return Err(Error::CapExceeded(format!(
                "Groebner basis exceeds {} elements",
                lim.max_basis
            )));
        }
    }
    let live: Vec<OPoly> = basis
        .into_iter()
        .zip(dead)
        .filter(|(_, d)| !*d)
        .map(|(g, _)| g)
        .collect();
    Ok(interreduce(live, order))
}

fn interreduce(basis: Vec<OPoly>, order: MonomialOrder) -> Vec<OPoly> {
    // drop elements whose leading monomial is divisible by another's
    let mut minimal: Vec<OPoly> = Vec::new();
    for (i, g) in basis.iter().enumerate() {
        let redundant = basis.iter().enumerate().any(|(j, h)| {
            j != i
                && divides(h.lm(), g.lm())
                && (h.lm() != g.lm() || j < i)
        });
        if !redundant {
            minimal.push(g.clone());
        }
    }
    let mut out = Vec::with_capacity(minimal.len());
    for i in 0..minimal.len() {
        let others: Vec<OPoly> = minimal
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, g)| g.clone())
            .collect();
        let head = OPoly {
            terms: vec![minimal[i].terms[0].clone()],
        };
        let tail = OPoly {
            terms: minimal[i].terms[1..].to_vec(),
        };
        let r = reduce(&tail, &others, order);
        let mut terms = head.terms;
        terms.extend(r.terms);
        let mut g = OPoly { terms };
        g.make_monic();
        out.push(g);
    }
    out.sort_by(|a, b| order.cmp(a.lm(), b.lm()));
    out
}

/// Reduced Groebner basis of polynomials in one chart.
pub fn groebner_basis(
    gens: &[Polynomial],
    order: MonomialOrder,
    lim: &Limits,
) -> Result<Vec<Polynomial>> {
    let chart = match gens.first() {
        Some(g) => g.chart().clone(),
        None => return Ok(Vec::new()),
    };
    let ops: Vec<OPoly> = gens.iter().map(|g| OPoly::from_poly(g, order)).collect();
    let gb = groebner(ops, order, lim)?;
    Ok(gb.iter().map(|g| g.to_poly(&chart)).collect())
}

/// Remainder of `f` on division by a Groebner basis for `order`.
pub fn normal_form(f: &Polynomial, basis: &[Polynomial], order: MonomialOrder) -> Polynomial {
    let b: Vec<OPoly> = basis.iter().map(|g| OPoly::from_poly(g, order)).collect();
    reduce(&OPoly::from_poly(f, order), &b, order).to_poly(f.chart())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn already_a_basis() {
        let c = Chart::new(&["x", "y"]).unwrap();
        let gens = vec![
            Polynomial::parse(&c, "x^2").unwrap(),
            Polynomial::parse(&c, "x*y").unwrap(),
        ];
        let gb = groebner_basis(&gens, MonomialOrder::Graded, &Limits::default()).unwrap();
        let s: Vec<String> = gb.iter().map(|g| g.to_string()).collect();
        assert_eq!(s, vec!["x*y", "x^2"]);
    }

    #[test]
    fn unit_detection() {
        let c = Chart::new(&["x", "y"]).unwrap();
        let gens = vec![
            Polynomial::parse(&c, "x*y - 1").unwrap(),
            Polynomial::parse(&c, "x").unwrap(),
        ];
        let gb = groebner_basis(&gens, MonomialOrder::Graded, &Limits::default()).unwrap();
        assert_eq!(gb.len(), 1);
        assert!(gb[0].is_constant());
    }

    #[test]
    fn twisted_cubic_reduced_basis() {
        let c = Chart::new(&["x", "y", "z"]).unwrap();
        let gens = vec![
            Polynomial::parse(&c, "y - x^2").unwrap(),
            Polynomial::parse(&c, "z - x^3").unwrap(),
        ];
        let gb = groebner_basis(&gens, MonomialOrder::Graded, &Limits::default()).unwrap();
        for g in &gens {
            assert!(normal_form(g, &gb, MonomialOrder::Graded).is_zero());
        }
        let f = Polynomial::parse(&c, "x*z - y^2").unwrap();
        assert!(normal_form(&f, &gb, MonomialOrder::Graded).is_zero());
    }
}
