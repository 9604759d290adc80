//! Semi-snc verdicts at rational points.

pub mod factorization;
pub mod jideal;
pub mod overlay;

use num_traits::Zero;
use serde_json::{json, Value};

use crate::algebra::{format_point, Chart, Coeff, Ideal, Polynomial, RationalPoint};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::scene::{stratum_at, strata::stratum_hs, Host, Scene, StratumLabel};
use crate::staircase::{compare_hs, diagram, HSComparison};

pub use factorization::{normalize_factorization, Association, FactorPresentation};
pub use jideal::{compute_j, j_of_pair};
pub use overlay::{equivalence_classes, iota};

/// X components and D+E factors through one point, moved to the origin.
#[derive(Clone, Debug)]
pub struct LocalPair {
    pub chart: Chart,
    /// Chart indices of the X coordinates through the point, in component order.
    pub xs: Vec<usize>,
    /// Restricted factors through the point, one list per entry of `xs`.
    pub factors: Vec<Vec<Polynomial>>,
    pub singular_component: bool,
}

impl LocalPair {
    /// The view (X^m, D^m + E^m) at a, where E^m also holds x_k for k ≥ m.
    pub fn at(s: &Scene, a: &[Coeff], m: usize) -> LocalPair {
        let xc = s.x_coords();
        let mut xs = Vec::new();
        let mut pos = Vec::new();
        for (k, &c) in xc.iter().enumerate().take(m) {
            if a[c].is_zero() {
                xs.push(c);
                pos.push(k);
            }
        }
        let mut hyper: Vec<usize> = s.e_coords().into_iter().filter(|&e| a[e].is_zero()).collect();
        hyper.extend(xc.iter().skip(m).filter(|&&c| a[c].is_zero()));
        let mut factors: Vec<Vec<Polynomial>> = vec![Vec::new(); xs.len()];
        for f in s.factor_refs() {
            if let Some(slot) = pos.iter().position(|&k| k == f.host) {
                if f.restricted.eval(a).is_zero() {
                    factors[slot].push(f.restricted.translate(a));
                }
            }
        }
        for list in factors.iter_mut() {
            for &e in &hyper {
                list.push(Polynomial::var(&s.chart, e));
            }
        }
        let singular_component = s.d.iter().any(|r| match r.host {
            Host::Pair(i, j) => pos.contains(&i) && pos.contains(&j),
            _ => false,
        });
        LocalPair {
            chart: s.chart.clone(),
            xs,
            factors,
            singular_component,
        }
    }

    pub fn p(&self) -> usize {
        self.xs.len()
    }

    /// Minimum number of factors on a component.
    pub fn q(&self) -> usize {
        self.factors.iter().map(|f| f.len()).min().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.factors.iter().all(|f| f.is_empty())
    }

    /// Drops the last component, which becomes a hyperplane of E.
    pub fn truncated(&self) -> LocalPair {
        let m = self.xs.len() - 1;
        let last = Polynomial::var(&self.chart, self.xs[m]);
        LocalPair {
            chart: self.chart.clone(),
            xs: self.xs[..m].to_vec(),
            factors: self.factors[..m]
                .iter()
                .map(|f| {
                    let mut f = f.clone();
                    f.push(last.clone());
                    f
                })
                .collect(),
            singular_component: false,
        }
    }

    pub fn x_var(&self, k: usize) -> Polynomial {
        Polynomial::var(&self.chart, self.xs[k])
    }

    pub fn component_ideal(&self, k: usize) -> Ideal {
        let prod = self.factors[k]
            .iter()
            .fold(Polynomial::one(&self.chart), |acc, f| &acc * f);
        Ideal::from_polys(&self.chart, vec![self.x_var(k), prod])
    }

    /// Ideal of Supp D near the point.
    pub fn support_ideal(&self) -> Result<Ideal> {
        let parts: Vec<Ideal> = (0..self.p())
            .filter(|&k| !self.factors[k].is_empty())
            .map(|k| self.component_ideal(k))
            .collect();
        if parts.is_empty() {
            return Ok(Ideal::unit(&self.chart));
        }
        Ideal::intersection_all(&parts)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Answer {
    SemiSnc,
    NotSemiSnc,
    OutOfClass,
}

impl Answer {
    pub fn as_str(&self) -> &'static str {
        match self {
            Answer::SemiSnc => "semi-snc",
            Answer::NotSemiSnc => "not-semi-snc",
            Answer::OutOfClass => "out-of-class",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Failure {
    /// The truncated pair is not semi-snc.
    Condition1,
    /// Hilbert–Samuel function of Supp D differs from the normal form's.
    Condition2,
    /// J is a proper ideal at the point.
    Condition3,
    /// Single component, D + E not snc.
    Snc,
    /// A component of D lies in the singular locus of X.
    SingularLocus,
    /// Equivalent components with different multiplicities.
    Multiplicity,
}

impl Failure {
    pub fn as_str(&self) -> &'static str {
        match self {
            Failure::Condition1 => "1",
            Failure::Condition2 => "2",
            Failure::Condition3 => "3",
            Failure::Snc => "snc-failure",
            Failure::SingularLocus => "singular-locus",
            Failure::Multiplicity => "multiplicity",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    Ideal(Ideal),
    Hilbert { found: Vec<u64>, expected: Vec<u64> },
    Factors(Vec<Polynomial>),
    Multiplicities(Vec<Vec<(String, Coeff)>>),
    Nested(Box<Obstruction>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Obstruction {
    pub failed: Failure,
    pub witness: Witness,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub point: RationalPoint,
    pub answer: Answer,
    pub stratum: StratumLabel,
    pub obstruction: Option<Obstruction>,
    /// What was checked when the answer is semi-snc.
    pub certificate: Vec<String>,
    pub note: Option<String>,
}

impl Verdict {
    pub fn is_semisnc(&self) -> bool {
        self.answer == Answer::SemiSnc
    }

    pub fn failed_condition(&self) -> Option<Failure> {
        self.obstruction.as_ref().map(|o| o.failed)
    }

    /// J when condition 3 failed (possibly inside the recursion).
    pub fn j_witness(&self) -> Option<&Ideal> {
        let mut o = self.obstruction.as_ref()?;
        loop {
            match &o.witness {
                Witness::Ideal(i) => return Some(i),
                Witness::Nested(inner) => o = inner,
                _ => return None,
            }
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "point": self.point.iter().map(crate::algebra::format_rational).collect::<Vec<_>>(),
            "answer": self.answer.as_str(),
            "stratum": [self.stratum.p, self.stratum.q],
        });
        if let Some(o) = &self.obstruction {
            v["failed_condition"] = json!(o.failed.as_str());
            v["witness"] = witness_json(&o.witness);
        } else if self.is_semisnc() {
            v["certificate"] = json!(self.certificate);
        }
        if let Some(n) = &self.note {
            v["note"] = json!(n);
        }
        v
    }

    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{} {} stratum ({},{})",
            format_point(&self.point),
            self.answer.as_str(),
            self.stratum.p,
            self.stratum.q
        );
        if let Some(o) = &self.obstruction {
            s.push_str(&format!(" failed {} witness {}", o.failed.as_str(), witness_json(&o.witness)));
        }
        if let Some(n) = &self.note {
            s.push_str(&format!(" ({n})"));
        }
        s
    }
}

fn witness_json(w: &Witness) -> Value {
    match w {
        Witness::Ideal(i) => json!({ "ideal": i.to_string() }),
        Witness::Hilbert { found, expected } => json!({ "hilbert": found, "expected": expected }),
        Witness::Factors(f) => json!({ "factors": f.iter().map(|p| p.to_string()).collect::<Vec<_>>() }),
        Witness::Multiplicities(classes) => json!({
            "classes": classes
                .iter()
                .map(|c| c
                    .iter()
                    .map(|(n, m)| json!([n, crate::algebra::format_rational(m)]))
                    .collect::<Vec<_>>())
                .collect::<Vec<_>>()
        }),
        Witness::Nested(o) => json!({ "failed_condition": o.failed.as_str(), "witness": witness_json(&o.witness) }),
    }
}

const HS_WITNESS_LEN: usize = 6;

/// Linear independence of rows over Q.
pub(crate) fn rank(rows: &[Vec<Coeff>]) -> usize {
    let mut m: Vec<Vec<Coeff>> = rows.to_vec();
    let cols = m.first().map(|r| r.len()).unwrap_or(0);
    let mut r = 0;
    for c in 0..cols {
        let Some(k) = (r..m.len()).find(|&k| !m[k][c].is_zero()) else { continue };
        m.swap(r, k);
        for k in r + 1..m.len() {
            if !m[k][c].is_zero() {
                let f = &m[k][c] / &m[r][c];
                for j in c..cols {
                    let d = &f * &m[r][j];
                    m[k][j] -= d;
                }
            }
        }
        r += 1;
    }
    r
}

/// Snc test for a single component: smooth factors meeting transversally.
fn check_single(lp: &LocalPair) -> Option<Obstruction> {
    let mut rows = vec![lp.x_var(0).linear_part()];
    for f in &lp.factors[0] {
        let l = f.linear_part();
        if l.iter().all(|c| c.is_zero()) {
            return Some(Obstruction {
                failed: Failure::Snc,
                witness: Witness::Factors(vec![f.clone()]),
            });
        }
        rows.push(l);
    }
    if rank(&rows) < rows.len() {
        return Some(Obstruction {
            failed: Failure::Snc,
            witness: Witness::Factors(lp.factors[0].clone()),
        });
    }
    None
}

/// Three-condition test on a local pair (at the origin).
pub fn check_pair(lp: &LocalPair, lim: &Limits) -> Result<Option<Obstruction>> {
    if lp.singular_component {
        return Ok(Some(Obstruction {
            failed: Failure::SingularLocus,
            witness: Witness::Factors(Vec::new()),
        }));
    }
    if lp.is_empty() {
        return Ok(None);
    }
    if lp.p() == 1 {
        return Ok(check_single(lp));
    }
    if let Some(inner) = check_pair(&lp.truncated(), lim)? {
        return Ok(Some(Obstruction {
            failed: Failure::Condition1,
            witness: Witness::Nested(Box::new(inner)),
        }));
    }
    let n = lp.chart.dim();
    let supp = lp.support_ideal()?;
    let origin = vec![Coeff::zero(); n];
    let (_, stair) = diagram(&supp, &origin, lim)?;
    let found = stair.hilbert();
    let expected = stratum_hs(StratumLabel::new(lp.p(), lp.q()), n)?;
    if compare_hs(&found, &expected) != HSComparison::Equal {
        return Ok(Some(Obstruction {
            failed: Failure::Condition2,
            witness: Witness::Hilbert {
                found: (0..HS_WITNESS_LEN).map(|k| found.value_u64(k)).collect(),
                expected: (0..HS_WITNESS_LEN).map(|k| expected.value_u64(k)).collect(),
            },
        }));
    }
    let j = j_of_pair(lp, lim)?;
    if !j.contains_unit_at(&origin) {
        return Ok(Some(Obstruction {
            failed: Failure::Condition3,
            witness: Witness::Ideal(j),
        }));
    }
    Ok(None)
}

/// Reduced check on the view with the first m components (no multiplicities).
pub fn check_view(s: &Scene, a: &[Coeff], m: usize, lim: &Limits) -> Result<Option<Obstruction>> {
    let lp = LocalPair::at(s, a, m);
    let mut o = check_pair(&lp, lim)?;
    if let Some(ob) = o.as_mut() {
        untranslate(&mut ob.witness, a);
    }
    Ok(o)
}

fn untranslate(w: &mut Witness, a: &[Coeff]) {
    let back: Vec<Coeff> = a.iter().map(|c| -c.clone()).collect();
    match w {
        Witness::Ideal(i) => *i = i.translate(&back),
        Witness::Factors(fs) => {
            for f in fs.iter_mut() {
                *f = f.translate(&back);
            }
        }
        Witness::Nested(o) => untranslate(&mut o.witness, a),
        _ => {}
    }
}

/// Full verdict, including the multiplicity overlay.
pub fn is_semisnc_at(s: &Scene, a: &[Coeff], lim: &Limits) -> Result<Verdict> {
    let stratum = stratum_at(s, a)?;
    let mut v = Verdict {
        point: a.to_vec(),
        answer: Answer::SemiSnc,
        stratum,
        obstruction: None,
        certificate: Vec::new(),
        note: None,
    };
    match check_view(s, a, s.x.len(), lim) {
        Ok(Some(o)) => {
            v.answer = Answer::NotSemiSnc;
            v.obstruction = Some(o);
            return Ok(v);
        }
        Ok(None) => {}
        Err(Error::CapExceeded(msg)) => {
            v.answer = Answer::OutOfClass;
            v.note = Some(msg);
            return Ok(v);
        }
        Err(e) => return Err(e),
    }
    let lp = LocalPair::at(s, a, s.x.len());
    v.certificate = if lp.is_empty() {
        vec!["no component of D or E through the point".into()]
    } else if lp.p() == 1 {
        vec!["smooth transverse factors".into()]
    } else {
        vec!["condition 1".into(), "condition 2".into(), "condition 3".into()]
    };
    if let Some(o) = overlay::check_multiplicities(s, a) {
        v.answer = Answer::NotSemiSnc;
        v.obstruction = Some(o);
        v.certificate.clear();
    } else if !s.all_unit_multiplicities() {
        v.certificate.push("equal multiplicities on equivalent components".into());
    }
    Ok(v)
}

/// Verdicts at many points, in parallel; output order follows input order.
pub fn verdicts(s: &Scene, points: &[RationalPoint], lim: &Limits) -> Result<Vec<Verdict>> {
    use rayon::prelude::*;
    points.par_iter().map(|a| is_semisnc_at(s, a, lim)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{origin, rat};
    use crate::scene::fixtures::{example_4_6, example_4_8};

    #[test]
    fn example_4_8_condition_3() {
        let lim = Limits::default();
        let v = is_semisnc_at(&example_4_8(), &origin(4), &lim).unwrap();
        assert_eq!(v.answer, Answer::NotSemiSnc);
        assert_eq!(v.failed_condition(), Some(Failure::Condition3));
        let j = v.j_witness().unwrap();
        let c = &example_4_8().chart;
        assert!(j.equals(&Ideal::parse(c, "x1, x2, z").unwrap()).unwrap());
        // away from z = 0 the pair is semi-snc
        let v = is_semisnc_at(&example_4_8(), &[rat(0), rat(0), rat(0), rat(1)], &lim).unwrap();
        assert!(v.is_semisnc(), "{v:?}");
    }

    #[test]
    fn example_4_6_condition_2() {
        let v = is_semisnc_at(&example_4_6(), &origin(4), &Limits::default()).unwrap();
        assert_eq!(v.failed_condition(), Some(Failure::Condition2));
        match &v.obstruction.as_ref().unwrap().witness {
            Witness::Hilbert { found, expected } => {
                assert_eq!(found[1], 5);
                assert_eq!(expected[1], 4);
            }
            w => panic!("{w:?}"),
        }
    }

    #[test]
    fn normal_form_is_semisnc() {
        let c = Chart::new(&["x1", "x2", "y1"]).unwrap();
        let mut s = Scene::new(c, vec!["x1".into(), "x2".into()]);
        s.add_d("x1", &["y1"], rat(1)).unwrap();
        s.add_d("x2", &["y1"], rat(1)).unwrap();
        assert!(is_semisnc_at(&s, &origin(3), &Limits::default()).unwrap().is_semisnc());
    }

    #[test]
    fn tangency_is_not_snc() {
        let c = Chart::new(&["x1", "y1", "y2"]).unwrap();
        let mut s = Scene::new(c, vec!["x1".into()]);
        s.add_d("x1", &["y1", "y1 + y2^2"], rat(1)).unwrap();
        let v = is_semisnc_at(&s, &origin(3), &Limits::default()).unwrap();
        assert_eq!(v.failed_condition(), Some(Failure::Snc));
        let mut t = Scene::new(s.chart.clone(), vec!["x1".into()]);
        t.add_d("x1", &["y1", "y2"], rat(1)).unwrap();
        assert!(is_semisnc_at(&t, &origin(3), &Limits::default()).unwrap().is_semisnc());
    }
}
