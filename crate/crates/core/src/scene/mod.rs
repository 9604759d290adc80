//! Triples (X, D, E) in coordinate normal form on one affine chart.

pub mod io;
pub mod probes;
pub mod strata;
pub mod validate;

use std::fmt;

use num_traits::{One, Zero};

use crate::algebra::{Chart, Coeff, Polynomial, RationalPoint};
use crate::error::{Error, Result};

pub use probes::probe_points;
pub use strata::{
    k_set, monotone_closure, nonempty_strata, precedes, stratum_at, stratum_order_key, MonotoneSet,
    StratumLabel,
};
pub use validate::{validate_scene, Severity, Violation};

/// Component(s) of X carrying a D-record.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Host {
    Single(usize),
    /// A component of D lying in X_i ∩ X_j (only before singular-locus removal).
    Pair(usize, usize),
}

impl Host {
    pub fn indices(&self) -> Vec<usize> {
        match *self {
            Host::Single(i) => vec![i],
            Host::Pair(i, j) => vec![i, j],
        }
    }
}

/// D-record: on X_host, the divisor (x_host = f = 0) with f = product of factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DComponent {
    pub host: Host,
    pub factors: Vec<Polynomial>,
    pub mult: Coeff,
    /// Declared product of the factors, checked by validation.
    pub declared: Option<Polynomial>,
}

impl DComponent {
    pub fn single(host: usize, factors: Vec<Polynomial>, mult: Coeff) -> DComponent {
        DComponent {
            host: Host::Single(host),
            factors,
            mult,
            declared: None,
        }
    }

    pub fn product(&self, chart: &Chart) -> Polynomial {
        self.factors
            .iter()
            .fold(Polynomial::one(chart), |acc, f| &acc * f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EComponent {
    pub name: String,
    pub origin: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scene {
    pub chart: Chart,
    /// Names of the coordinates x_i with X_i = (x_i = 0), in component order.
    pub x: Vec<String>,
    pub d: Vec<DComponent>,
    pub e: Vec<EComponent>,
    /// User-supplied (or inherited) probe points.
    pub probes: Vec<RationalPoint>,
    /// The chart is the open set where these do not vanish.
    pub units: Vec<Polynomial>,
}

/// One irreducible component of D: a factor on its host, reduced mod x_host.
#[derive(Clone, Debug)]
pub struct FactorRef {
    pub record: usize,
    pub slot: usize,
    pub host: usize,
    pub restricted: Polynomial,
    pub mult: Coeff,
}

impl Scene {
    pub fn new(chart: Chart, x: Vec<String>) -> Scene {
        Scene {
            chart,
            x,
            d: Vec::new(),
            e: Vec::new(),
            probes: Vec::new(),
            units: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.chart.dim()
    }

    pub fn coord(&self, name: &str) -> Result<usize> {
        self.chart
            .index(name)
            .ok_or_else(|| Error::Invalid(format!("unknown coordinate {name:?}")))
    }

    /// Chart indices of the X coordinates.
    pub fn x_coords(&self) -> Vec<usize> {
        self.x.iter().map(|n| self.chart.index(n).expect("X coordinate in chart")).collect()
    }

    pub fn e_coords(&self) -> Vec<usize> {
        self.e
            .iter()
            .map(|c| self.chart.index(&c.name).expect("E coordinate in chart"))
            .collect()
    }

    pub fn parse_poly(&self, text: &str) -> Result<Polynomial> {
        Polynomial::parse(&self.chart, text)
    }

    /// Convenience for building scenes in code.
    pub fn add_d(&mut self, host: &str, factors: &[&str], mult: Coeff) -> Result<()> {
        let h = self
            .x
            .iter()
            .position(|n| n == host)
            .ok_or_else(|| Error::Invalid(format!("{host} is not an X coordinate")))?;
        let fs = factors
            .iter()
            .map(|f| self.parse_poly(f))
            .collect::<Result<Vec<_>>>()?;
        self.d.push(DComponent::single(h, fs, mult));
        Ok(())
    }

    pub fn add_pair(&mut self, a: &str, b: &str, mult: Coeff) -> Result<()> {
        let i = self.x.iter().position(|n| n == a);
        let j = self.x.iter().position(|n| n == b);
        match (i, j) {
            (Some(i), Some(j)) if i != j => {
                self.d.push(DComponent {
                    host: Host::Pair(i.min(j), i.max(j)),
                    factors: Vec::new(),
                    mult,
                    declared: None,
                });
                Ok(())
            }
            _ => Err(Error::Invalid(format!("bad pair host ({a}, {b})"))),
        }
    }

    pub fn add_e(&mut self, name: &str, origin: &str) {
        self.e.push(EComponent {
            name: name.to_string(),
            origin: origin.to_string(),
        });
    }

    pub fn on_x(&self, a: &[Coeff]) -> bool {
        self.x_coords().iter().any(|&i| a[i].is_zero())
    }

    /// Inside the open set of the chart.
    pub fn in_chart(&self, a: &[Coeff]) -> bool {
        self.units.iter().all(|u| !u.eval(a).is_zero())
    }

    /// Positions (in X order) of the components through a.
    pub fn x_through(&self, a: &[Coeff]) -> Vec<usize> {
        self.x_coords()
            .iter()
            .enumerate()
            .filter(|(_, &c)| a[c].is_zero())
            .map(|(k, _)| k)
            .collect()
    }

    /// Every single-host factor, reduced modulo its host coordinate.
    pub fn factor_refs(&self) -> Vec<FactorRef> {
        let xc = self.x_coords();
        let mut out = Vec::new();
        for (r, rec) in self.d.iter().enumerate() {
            if let Host::Single(h) = rec.host {
                for (s, f) in rec.factors.iter().enumerate() {
                    out.push(FactorRef {
                        record: r,
                        slot: s,
                        host: h,
                        restricted: f.set_zero(&[xc[h]]),
                        mult: rec.mult.clone(),
                    });
                }
            }
        }
        out
    }

    pub fn has_pair_hosts(&self) -> bool {
        self.d.iter().any(|r| matches!(r.host, Host::Pair(..)))
    }

    /// D with every multiplicity set to one.
    pub fn reduced(&self) -> Scene {
        let mut s = self.clone();
        for r in &mut s.d {
            r.mult = Coeff::one();
        }
        s
    }

    pub fn all_unit_multiplicities(&self) -> bool {
        self.d.iter().all(|r| r.mult.is_one())
    }

    /// Renames coordinates (positions fixed) and appends unused ones.
    pub fn relabeled(&self, names: &[String], extra: &[String]) -> Result<Scene> {
        if names.len() != self.dim() {
            return Err(Error::Invalid("relabel needs one name per coordinate".into()));
        }
        let mut all = names.to_vec();
        all.extend(extra.iter().cloned());
        let chart = Chart::new(&all)?;
        let rename = |n: &str| names[self.chart.index(n).unwrap()].clone();
        let images: Vec<Polynomial> = (0..self.dim()).map(|i| Polynomial::var(&chart, i)).collect();
        let map = |p: &Polynomial| p.substitute(&chart, &images);
        Ok(Scene {
            x: self.x.iter().map(|n| rename(n)).collect(),
            d: self
                .d
                .iter()
                .map(|r| DComponent {
                    host: r.host,
                    factors: r.factors.iter().map(map).collect(),
                    mult: r.mult.clone(),
                    declared: r.declared.as_ref().map(map),
                })
                .collect(),
            e: self
                .e
                .iter()
                .map(|c| EComponent {
                    name: rename(&c.name),
                    origin: c.origin.clone(),
                })
                .collect(),
            probes: self
                .probes
                .iter()
                .map(|p| {
                    let mut q = p.clone();
                    q.extend(extra.iter().map(|_| Coeff::zero()));
                    q
                })
                .collect(),
            units: self.units.iter().map(map).collect(),
            chart,
        })
    }
}

impl fmt::Display for Scene {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", io::to_json(self))
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::algebra::rat;

    pub fn example_4_8() -> Scene {
        let chart = Chart::new(&["x1", "x2", "y", "z"]).unwrap();
        let mut s = Scene::new(chart, vec!["x1".into(), "x2".into()]);
        s.add_d("x1", &["y"], rat(1)).unwrap();
        s.add_d("x2", &["x1 + y*z"], rat(1)).unwrap();
        s
    }

    pub fn example_4_6() -> Scene {
        let chart = Chart::new(&["x1", "x2", "y", "z"]).unwrap();
        let mut s = Scene::new(chart, vec!["x1".into(), "x2".into()]);
        s.add_d("x1", &["y"], rat(1)).unwrap();
        s.add_d("x2", &["z"], rat(1)).unwrap();
        s
    }
}
