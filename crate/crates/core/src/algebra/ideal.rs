use std::fmt;

use num_traits::Zero;

use super::exponent::MonomialOrder;
use super::groebner::{groebner_basis, normal_form};
use super::poly::{Chart, Coeff, Polynomial};
use crate::error::{Error, Result};
use crate::limits::Limits;

/// Finitely generated ideal in a named chart. Empty generator list = zero ideal.
#[derive(Clone, PartialEq, Eq)]
pub struct Ideal {
    chart: Chart,
    gens: Vec<Polynomial>,
}

impl Ideal {
    pub fn new(chart: &Chart, gens: Vec<Polynomial>) -> Result<Ideal> {
        for g in &gens {
            if g.chart() != chart {
                return Err(Error::ChartMismatch(format!("generator {g}")));
            }
            if g.is_zero() {
                return Err(Error::Invalid("zero polynomial as ideal generator".into()));
            }
        }
        let mut out: Vec<Polynomial> = Vec::with_capacity(gens.len());
        for g in gens {
            if !out.contains(&g) {
                out.push(g);
            }
        }
        Ok(Ideal {
            chart: chart.clone(),
            gens: out,
        })
    }

    /// Builds from possibly-zero polynomials, silently skipping zeros.
    pub fn from_polys(chart: &Chart, gens: Vec<Polynomial>) -> Ideal {
        Ideal::new(chart, gens.into_iter().filter(|g| !g.is_zero()).collect()).unwrap()
    }

    pub fn parse(chart: &Chart, text: &str) -> Result<Ideal> {
        let gens = super::parse::parse_polynomial_list(chart, text)?;
        Ideal::new(chart, gens)
    }

    pub fn unit(chart: &Chart) -> Ideal {
        Ideal {
            chart: chart.clone(),
            gens: vec![Polynomial::one(chart)],
        }
    }

    pub fn zero(chart: &Chart) -> Ideal {
        Ideal {
            chart: chart.clone(),
            gens: Vec::new(),
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn gens(&self) -> &[Polynomial] {
        &self.gens
    }

    pub fn is_zero(&self) -> bool {
        self.gens.is_empty()
    }

    fn same_chart(&self, other: &Ideal) -> Result<()> {
        if self.chart != other.chart {
            return Err(Error::ChartMismatch(format!(
                "{:?} vs {:?}",
                self.chart, other.chart
            )));
        }
        Ok(())
    }

    pub fn sum(&self, other: &Ideal) -> Result<Ideal> {
        self.same_chart(other)?;
        let mut g = self.gens.clone();
        g.extend(other.gens.iter().cloned());
        Ideal::new(&self.chart, g)
    }

    pub fn product(&self, other: &Ideal) -> Result<Ideal> {
        self.same_chart(other)?;
        let mut g = Vec::new();
        for a in &self.gens {
            for b in &other.gens {
                g.push(a * b);
            }
        }
        Ideal::new(&self.chart, g)
    }

    pub fn with(&self, extra: &[Polynomial]) -> Result<Ideal> {
        let mut g = self.gens.clone();
        g.extend(extra.iter().cloned());
        Ideal::new(&self.chart, g)
    }

    pub fn groebner(&self, order: MonomialOrder) -> Result<Ideal> {
        self.groebner_with(order, &Limits::default())
    }

    pub fn groebner_with(&self, order: MonomialOrder, lim: &Limits) -> Result<Ideal> {
        let gb = groebner_basis(&self.gens, order, lim)?;
        Ok(Ideal {
            chart: self.chart.clone(),
            gens: gb,
        })
    }

    /// Reduced graded Groebner basis.
    pub fn basis(&self) -> Result<Ideal> {
        self.groebner(MonomialOrder::Graded)
    }

    pub fn is_unit(&self) -> Result<bool> {
        if self.gens.iter().any(|g| g.is_constant()) {
            return Ok(true);
        }
        Ok(self.basis()?.gens.iter().any(|g| g.is_constant()))
    }

    pub fn contains(&self, f: &Polynomial) -> Result<bool> {
        if f.is_zero() {
            return Ok(true);
        }
        let gb = self.basis()?;
        Ok(normal_form(f, &gb.gens, MonomialOrder::Graded).is_zero())
    }

    pub fn contains_ideal(&self, other: &Ideal) -> Result<bool> {
        self.same_chart(other)?;
        let gb = self.basis()?;
        Ok(other
            .gens
            .iter()
            .all(|f| normal_form(f, &gb.gens, MonomialOrder::Graded).is_zero()))
    }

    /// Equality by mutual membership.
    pub fn equals(&self, other: &Ideal) -> Result<bool> {
        Ok(self.contains_ideal(other)? && other.contains_ideal(self)?)
    }

    fn lift(&self, ext: &Chart) -> Vec<Polynomial> {
        self.gens.iter().map(|g| g.embed(ext).unwrap()).collect()
    }

    fn eliminate_first(ext: &Chart, gens: Vec<Polynomial>, base: &Chart) -> Result<Ideal> {
        let gb = groebner_basis(&gens, MonomialOrder::Elimination { block: 1 }, &Limits::default())?;
        let kept: Vec<Polynomial> = gb
            .into_iter()
            .filter(|g| !g.involves(0))
            .map(|g| g.embed(base).unwrap())
            .collect();
        let _ = ext;
        Ideal::new(base, kept)
    }

    /// I ∩ J via t·I + (1 − t)·J, eliminating t.
    pub fn intersection(&self, other: &Ideal) -> Result<Ideal> {
        self.same_chart(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Ideal::zero(&self.chart));
        }
        if self.is_unit()? {
            return Ok(other.clone());
        }
        if other.is_unit()? {
            return Ok(self.clone());
        }
        let tname = self.chart.fresh_name("t");
        let ext = self.chart.with_prefix(&tname);
        let t = Polynomial::var(&ext, 0);
        let one_minus_t = &Polynomial::one(&ext) - &t;
        let mut gens: Vec<Polynomial> = self.lift(&ext).iter().map(|g| &t * g).collect();
        gens.extend(other.lift(&ext).iter().map(|g| &one_minus_t * g));
        let out = Ideal::eliminate_first(&ext, gens, &self.chart)?;
        out.basis()
    }

    pub fn intersection_all(ideals: &[Ideal]) -> Result<Ideal> {
        let mut it = ideals.iter();
        let mut acc = it
            .next()
            .ok_or_else(|| Error::Invalid("empty intersection".into()))?
            .clone();
        for i in it {
            acc = acc.intersection(i)?;
        }
        Ok(acc)
    }

    /// [I : g] = (I ∩ (g)) / g.
    pub fn quotient_by(&self, g: &Polynomial) -> Result<Ideal> {
        if g.is_zero() {
            return Err(Error::Invalid("quotient by the zero polynomial".into()));
        }
        if g.is_constant() {
            return Ok(self.clone());
        }
        let principal = Ideal::new(&self.chart, vec![g.clone()])?;
        let inter = self.intersection(&principal)?;
        let mut out = Vec::with_capacity(inter.gens.len());
        for h in &inter.gens {
            match h.divide_exact(g) {
                Some(q) => out.push(q),
                None => {
                    return Err(Error::Internal(format!(
                        "quotient division failed: {h} not divisible by {g}"
                    )))
                }
            }
        }
        Ideal::new(&self.chart, out)?.basis()
    }

    /// [I : J] = ∩_g [I : g] over the generators of J.
    pub fn quotient(&self, other: &Ideal) -> Result<Ideal> {
        self.same_chart(other)?;
        if other.is_zero() {
            return Err(Error::Invalid("quotient by the zero ideal".into()));
        }
        let parts: Vec<Ideal> = other
            .gens
            .iter()
            .map(|g| self.quotient_by(g))
            .collect::<Result<_>>()?;
        Ideal::intersection_all(&parts)?.basis()
    }

    /// I : u^∞ via I + (1 − t·u), eliminating t.
    pub fn saturation(&self, u: &Polynomial) -> Result<Ideal> {
        if self.is_zero() {
            return Ok(self.clone());
        }
        let tname = self.chart.fresh_name("t");
        let ext = self.chart.with_prefix(&tname);
        let t = Polynomial::var(&ext, 0);
        let mut gens = self.lift(&ext);
        gens.push(&Polynomial::one(&ext) - &(&t * &u.embed(&ext)?));
        Ideal::eliminate_first(&ext, gens, &self.chart)
    }

    /// Saturation by repeated quotients, J ← [J : u] until stable.
    pub fn saturation_iterated(&self, u: &Polynomial) -> Result<Ideal> {
        let mut cur = self.basis()?;
        for _ in 0..64 {
            let next = cur.quotient_by(u)?;
            if next.contains_ideal(&cur)? && cur.contains_ideal(&next)? {
                return Ok(next);
            }
            cur = next;
        }
        Err(Error::CapExceeded("saturation did not stabilize".into()))
    }

    /// Does the localization at `a` equal the whole local ring?
    pub fn contains_unit_at(&self, a: &[Coeff]) -> bool {
        // I_a = O_a iff I ⊄ m_a iff some generator is nonzero at a
        self.gens.iter().any(|g| !g.translate(a).constant_term().is_zero())
    }

    /// Generators with the point moved to the origin.
    pub fn translate(&self, a: &[Coeff]) -> Ideal {
        Ideal {
            chart: self.chart.clone(),
            gens: self.gens.iter().map(|g| g.translate(a)).collect(),
        }
    }

    pub fn embed(&self, target: &Chart) -> Result<Ideal> {
        let gens = self
            .gens
            .iter()
            .map(|g| g.embed(target))
            .collect::<Result<Vec<_>>>()?;
        Ideal::new(target, gens)
    }
}

impl fmt::Display for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, g) in self.gens.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ideal{self}")
    }
}
