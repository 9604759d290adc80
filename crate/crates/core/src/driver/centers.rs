//! Center selection for each phase, on coordinate-normal-form scenes.

use std::collections::BTreeSet;

use num_traits::Zero;
use serde_json::{json, Value};

use super::{Diagnostic, Phase, Reason};
use crate::algebra::{Coeff, ExponentVector, Ideal, MonomialOrder, Polynomial, RationalPoint};
use crate::blowup::CenterSpec;
use crate::detector::{factorization, j_of_pair, overlay, rank, LocalPair};
use crate::error::Result;
use crate::limits::Limits;
use crate::scene::{strata::stratum_hs, EComponent, Host, Scene, StratumLabel};
use crate::staircase::{compare_hs, diagram, HSComparison};

/// A chosen center with the point that motivated it and a descent measure.
#[derive(Clone, Debug)]
pub struct Choice {
    pub phase: Phase,
    pub center: CenterSpec,
    pub point: RationalPoint,
    pub measure: Value,
}

pub type Selection = std::result::Result<Choice, Diagnostic>;

fn diag(phase: Phase, reason: Reason, a: &[Coeff], message: impl Into<String>) -> Diagnostic {
    Diagnostic {
        phase: Some(phase),
        reason,
        location: Some(a.to_vec()),
        message: message.into(),
    }
}

/// (X^m, D^m, E^m): the first m components, later ones moved into E.
pub fn view(s: &Scene, m: usize) -> Scene {
    if m >= s.x.len() {
        return s.clone();
    }
    let mut v = s.clone();
    v.x.truncate(m);
    v.d.retain(|r| r.host.indices().iter().all(|&h| h < m));
    for name in &s.x[m..] {
        v.e.push(EComponent {
            name: name.clone(),
            origin: "X".into(),
        });
    }
    v
}

/// Restricted D factors through `a` on component `host` (no E).
pub fn d_factors_through(s: &Scene, a: &[Coeff], host: usize) -> Vec<Polynomial> {
    s.factor_refs()
        .into_iter()
        .filter(|f| f.host == host && f.restricted.eval(a).is_zero())
        .map(|f| f.restricted)
        .collect()
}

/// The subspace through `a` where the given coordinates take their values at `a`.
fn center_of(s: &Scene, idx: BTreeSet<usize>, a: &[Coeff]) -> Result<CenterSpec> {
    let v: Vec<usize> = idx.into_iter().collect();
    CenterSpec::through(&s.chart, &v, a)
}

/// Coordinates cutting out V(x's through a, factors), when that locus is a
/// coordinate subspace translated to pass through a.
fn coordinate_center(s: &Scene, a: &[Coeff], factors: &[Polynomial]) -> Result<Option<BTreeSet<usize>>> {
    let xc = s.x_coords();
    let mut gens: Vec<Polynomial> = s
        .x_through(a)
        .into_iter()
        .map(|k| Polynomial::var(&s.chart, xc[k]))
        .collect();
    gens.extend(factors.iter().cloned());
    coordinate_radical(&Ideal::from_polys(&s.chart, gens).translate(a))
}

fn all_d_through(s: &Scene, a: &[Coeff]) -> Vec<Polynomial> {
    s.x_through(a)
        .into_iter()
        .flat_map(|k| d_factors_through(s, a, k))
        .collect()
}

/// Blow up the deepest intersection of the singular-locus records first.
pub fn step2(s: &Scene) -> Option<Result<Choice>> {
    let xc = s.x_coords();
    let loci: Vec<[usize; 2]> = s
        .d
        .iter()
        .filter_map(|r| match r.host {
            Host::Pair(i, j) => Some([xc[i], xc[j]]),
            _ => None,
        })
        .collect();
    if loci.is_empty() {
        return None;
    }
    let idx: BTreeSet<usize> = loci.iter().flatten().copied().collect();
    let center = match center_of(s, idx, &vec![Coeff::zero(); s.dim()]) {
        Ok(c) => c,
        Err(e) => return Some(Err(e)),
    };
    Some(Ok(Choice {
        phase: Phase::Step2,
        center,
        point: vec![Coeff::zero(); s.dim()],
        measure: json!({ "singular_locus_records": loci.len() }),
    }))
}

/// Hilbert–Samuel equalization, then the C_{p,q} center.
pub fn case_a(v: &Scene, a: &[Coeff], label: StratumLabel, lim: &Limits) -> Result<Selection> {
    let n = v.dim();
    let lp = LocalPair::at(v, a, v.x.len());
    let supp = lp.support_ideal()?;
    let origin = vec![Coeff::zero(); n];
    let (_, stair) = diagram(&supp, &origin, lim)?;
    let found = stair.hilbert();
    let expected = stratum_hs(label, n)?;
    let values = |h: &crate::staircase::HilbertFunction| (0..6).map(|k| h.value_u64(k)).collect::<Vec<_>>();
    if compare_hs(&found, &expected) != HSComparison::Equal {
        let Some(idx) = coordinate_center(v, a, &all_d_through(v, a))? else {
            return Ok(Err(diag(
                Phase::CaseAStep1,
                Reason::NeedsGeneralDesingInvariant,
                a,
                "maximal Hilbert–Samuel locus is not a coordinate subspace",
            )));
        };
        return Ok(Ok(Choice {
            phase: Phase::CaseAStep1,
            center: center_of(v, idx, a)?,
            point: a.to_vec(),
            measure: json!({ "hilbert": values(&found), "target": values(&expected) }),
        }));
    }
    // C_{p,q}: the last component through a meets the y-locus of the others
    let through = v.x_through(a);
    let (last, earlier) = through.split_last().expect("p ≥ 3");
    let earlier_factors: Vec<Polynomial> = earlier.iter().flat_map(|&k| d_factors_through(v, a, k)).collect();
    let Some(idx) = coordinate_center(v, a, &earlier_factors)? else {
        return Ok(Err(diag(
            Phase::CaseAStep2,
            Reason::NeedsGeneralDesingInvariant,
            a,
            "C_{p,q} is not a coordinate subspace",
        )));
    };
    let xc = v.x_coords();
    let xs: Vec<usize> = earlier.iter().map(|&k| xc[k]).collect();
    let ys: Vec<usize> = idx.iter().copied().filter(|i| !xc.contains(i)).collect();
    let last_factors: Vec<Polynomial> = d_factors_through(v, a, *last).iter().map(|f| f.translate(a)).collect();
    let mut g2 = Value::Null;
    if !last_factors.is_empty() && !ys.is_empty() {
        match factorization::normalize_factorization(&last_factors, &xs, &ys) {
            Ok(fp) => g2 = json!(fp.g2.to_string()),
            Err(e) => {
                return Ok(Err(diag(Phase::CaseAStep2, Reason::FactorizationNeeded, a, e.to_string())));
            }
        }
    }
    Ok(Ok(Choice {
        phase: Phase::CaseAStep2,
        center: center_of(v, idx, a)?,
        point: a.to_vec(),
        measure: json!({ "stratum": [label.p, label.q], "g2": g2 }),
    }))
}

/// Monomial part and the cofactor.
fn monomial_content(f: &Polynomial) -> (ExponentVector, Polynomial) {
    let n = f.chart().dim();
    let mut e = vec![0u32; n];
    let mut rest = f.clone();
    for (i, slot) in e.iter_mut().enumerate() {
        let (k, r) = rest.split_var_power(i);
        *slot = k;
        rest = r;
    }
    (ExponentVector(e), rest)
}

/// J cleaning, then reduction of r, at a point on exactly two components.
pub fn case_b(v: &Scene, a: &[Coeff], lim: &Limits) -> Result<Selection> {
    let lp = LocalPair::at(v, a, v.x.len());
    let xc = v.x_coords();
    let through = v.x_through(a);
    let x_idx: Vec<usize> = through.iter().map(|&k| xc[k]).collect();
    let j = j_of_pair(&lp, lim)?;
    let origin = vec![Coeff::zero(); v.dim()];
    if !j.contains_unit_at(&origin) {
        let back: Vec<Coeff> = a.iter().map(|c| -c.clone()).collect();
        let shown = j.translate(&back);
        let j = j.groebner(MonomialOrder::Graded)?;
        let rest: Vec<Polynomial> = j
            .gens()
            .iter()
            .map(|g| g.set_zero(&x_idx))
            .filter(|g| !g.is_zero())
            .collect();
        // V(J) ∩ (x = 0) must be cut out by monomials times units at a
        let mut monos: Vec<ExponentVector> = Vec::new();
        for g in &rest {
            let (e, unit) = monomial_content(g);
            if unit.eval(&origin).is_zero() {
                return Ok(Err(diag(
                    Phase::CaseBCleanJ,
                    Reason::NeedsGeneralLogResolution,
                    a,
                    format!("V(J) is not monomial at the point: {shown}"),
                )));
            }
            monos.push(e);
        }
        monos.sort_by(|p, q| p.degree().cmp(&q.degree()).then(q.0.cmp(&p.0)));
        let Some(m) = monos.first() else {
            return Ok(Err(diag(Phase::CaseBCleanJ, Reason::NeedsGeneralLogResolution, a, "J has no monomial part")));
        };
        // a coordinate dividing every monomial gives a component X_1 ∩ X_2 ∩ H
        let u = (0..m.0.len()).find(|&i| m.0[i] > 0 && monos.iter().all(|e| e.0[i] > 0));
        let Some(u) = u else {
            return Ok(Err(diag(
                Phase::CaseBCleanJ,
                Reason::NeedsGeneralLogResolution,
                a,
                format!("V(J) has several components through the point: {shown}"),
            )));
        };
        let mut idx: BTreeSet<usize> = x_idx.iter().copied().collect();
        idx.insert(u);
        return Ok(Ok(Choice {
            phase: Phase::CaseBCleanJ,
            center: center_of(v, idx, a)?,
            point: a.to_vec(),
            measure: json!({
                "J": shown.to_string(),
                "exponent": m.0.iter().enumerate().filter(|(_, &k)| k > 0)
                    .map(|(i, &k)| json!([v.chart.name(i), k])).collect::<Vec<_>>(),
            }),
        }));
    }
    // J is a unit: reduce r, the number of D components of the first component
    let first = through[0];
    let d1 = d_factors_through(v, a, first);
    let Some(idx) = coordinate_center(v, a, &d1)? else {
        return Ok(Err(diag(
            Phase::CaseBReduceR,
            Reason::NeedsGeneralLogResolution,
            a,
            "C_r is not a coordinate subspace",
        )));
    };
    Ok(Ok(Choice {
        phase: Phase::CaseBReduceR,
        center: center_of(v, idx, a)?,
        point: a.to_vec(),
        measure: json!({ "r": d1.len() }),
    }))
}

/// Radical of an ideal generated by pure powers of coordinates, as those coordinates.
fn coordinate_radical(i: &Ideal) -> Result<Option<BTreeSet<usize>>> {
    let g = i.groebner(MonomialOrder::Graded)?;
    let mut out = BTreeSet::new();
    for p in g.gens() {
        if p.nterms() != 1 {
            return Ok(None);
        }
        let vars = p.variables();
        if vars.len() != 1 {
            return Ok(None);
        }
        out.insert(vars[0]);
    }
    Ok(Some(out))
}

/// Smooth X: separate tangent or singular D+E components along coordinate loci.
pub fn case_c(v: &Scene, a: &[Coeff]) -> Result<Selection> {
    let lp = LocalPair::at(v, a, v.x.len());
    let chart = &v.chart;
    let back: Vec<Coeff> = a.iter().map(|c| -c.clone()).collect();
    let host = lp.x_var(0);
    let factors = &lp.factors[0];
    let stuck = |msg: String| Ok(Err(diag(Phase::CaseC, Reason::NeedsGeneralLogResolution, a, msg)));
    let locus: Ideal;
    let measure: Value;
    if let Some(f) = factors.iter().find(|f| f.linear_part().iter().all(|c| c.is_zero())) {
        // singular locus of the factor on X
        let mut gens = vec![host.clone(), f.clone()];
        for i in f.variables() {
            if i != lp.xs[0] {
                gens.push(derivative(f, i));
            }
        }
        locus = Ideal::from_polys(chart, gens);
        measure = json!({ "singular_factor": f.translate(&back).to_string() });
    } else {
        let rows: Vec<Vec<Coeff>> = factors.iter().map(|f| f.linear_part()).collect();
        let hl = host.linear_part();
        let mut found = None;
        'size: for k in 2..=rows.len() {
            for subset in subsets(rows.len(), k) {
                let mut r = vec![hl.clone()];
                r.extend(subset.iter().map(|&i| rows[i].clone()));
                if rank(&r) < r.len() {
                    found = Some(subset);
                    break 'size;
                }
            }
        }
        let Some(subset) = found else {
            return stuck("no dependent set of components found".into());
        };
        let mut gens = vec![host.clone()];
        gens.extend(subset.iter().map(|&i| factors[i].clone()));
        locus = Ideal::from_polys(chart, gens);
        measure = json!({
            "tangent": subset.iter().map(|&i| factors[i].translate(&back).to_string()).collect::<Vec<_>>()
        });
    }
    let Some(idx) = coordinate_radical(&locus)? else {
        return stuck(format!("bad locus is not a coordinate subspace: {}", locus.translate(&back)));
    };
    if idx.len() < 2 {
        return stuck("bad locus is not a coordinate subspace of the chart".into());
    }
    Ok(Ok(Choice {
        phase: Phase::CaseC,
        center: center_of(v, idx, a)?,
        point: a.to_vec(),
        measure,
    }))
}

fn derivative(f: &Polynomial, i: usize) -> Polynomial {
    Polynomial::from_terms(
        f.chart(),
        f.terms().iter().filter(|(e, _)| e.0[i] > 0).map(|(e, c)| {
            let mut d = e.clone();
            d.0[i] -= 1;
            (d, c * Coeff::from_integer(e.0[i].into()))
        }),
    )
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Multiplicities: blow up the maximal-ι locus through an offending point.
pub fn step4(s: &Scene, bad: &[RationalPoint]) -> Result<Selection> {
    let mut best: Option<((usize, usize), &RationalPoint)> = None;
    for a in bad {
        let i = overlay::iota(s, a);
        if best.as_ref().map_or(true, |(b, _)| i > *b) {
            best = Some((i, a));
        }
    }
    let (iota, a) = best.expect("at least one offending point");
    let Some(idx) = coordinate_center(s, a, &all_d_through(s, a))? else {
        return Ok(Err(diag(
            Phase::Step4,
            Reason::NeedsGeneralDesingInvariant,
            a,
            "maximal ι locus is not a coordinate subspace",
        )));
    };
    Ok(Ok(Choice {
        phase: Phase::Step4,
        center: center_of(s, idx, a)?,
        point: a.clone(),
        measure: json!({ "iota": [iota.0, iota.1] }),
    }))
}
