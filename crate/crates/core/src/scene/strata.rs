//! Strata Σ_{p,q}, their order, monotone sets and maximal unprocessed strata.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::Zero;
use serde::Serialize;

use super::{Host, Scene};
use crate::algebra::{Chart, Coeff, Ideal, Polynomial};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::staircase::{compare_hs, hpq, HSComparison, HilbertFunction, Staircase};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct StratumLabel {
    pub p: usize,
    pub q: usize,
}

impl StratumLabel {
    pub fn new(p: usize, q: usize) -> StratumLabel {
        StratumLabel { p, q }
    }

    pub fn delta(&self) -> usize {
        self.p.min(3)
    }
}

impl fmt::Display for StratumLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.p, self.q)
    }
}

/// (p, q) at a point of X; q counts factors through a on each component and
/// takes the minimum.
pub fn stratum_at(s: &Scene, a: &[Coeff]) -> Result<StratumLabel> {
    if a.len() != s.dim() {
        return Err(Error::Invalid("point has the wrong dimension".into()));
    }
    let through = s.x_through(a);
    if through.is_empty() {
        return Err(Error::Invalid("point does not lie on X".into()));
    }
    let mut counts: BTreeMap<usize, usize> = through.iter().map(|&i| (i, 0)).collect();
    for f in s.factor_refs() {
        if let Some(c) = counts.get_mut(&f.host) {
            if f.restricted.eval(a).is_zero() {
                *c += 1;
            }
        }
    }
    for rec in &s.d {
        if let Host::Pair(i, j) = rec.host {
            for h in [i, j] {
                if counts.contains_key(&i) && counts.contains_key(&j) {
                    *counts.get_mut(&h).unwrap() += 1;
                }
            }
        }
    }
    Ok(StratumLabel::new(through.len(), *counts.values().min().unwrap()))
}

/// Hilbert function of the reduced divisor of the stratum's normal form,
/// the ideal (x1⋯xp, y1⋯yq). With q = 0 the divisor is empty near the point
/// and the function vanishes identically.
pub fn stratum_hs(label: StratumLabel, n: usize) -> Result<HilbertFunction> {
    if label.q == 0 {
        if label.p < 1 || label.p > n {
            return Err(Error::Invalid(format!("stratum {label} does not fit in dimension {n}")));
        }
        return Ok(Staircase::new(n, vec![crate::algebra::ExponentVector::zero(n)]).hilbert());
    }
    hpq(label.p, label.q, n)
}

pub fn stratum_order_key(label: StratumLabel, n: usize) -> Result<(usize, HilbertFunction)> {
    Ok((label.delta(), stratum_hs(label, n)?))
}

/// Does `a` strictly precede (come before, rank higher than) `b`?
pub fn precedes(a: StratumLabel, b: StratumLabel, n: usize) -> Result<bool> {
    let (da, ha) = stratum_order_key(a, n)?;
    let (db, hb) = stratum_order_key(b, n)?;
    Ok(match da.cmp(&db) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Less => false,
        std::cmp::Ordering::Equal => compare_hs(&ha, &hb) == HSComparison::Greater,
    })
}

/// Set of labels closed upwards in the stratum order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct MonotoneSet {
    pub labels: BTreeSet<StratumLabel>,
}

impl MonotoneSet {
    pub fn contains(&self, l: &StratumLabel) -> bool {
        self.labels.contains(l)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

fn universe(n: usize) -> Vec<StratumLabel> {
    (1..=n)
        .flat_map(|p| (0..=n - p).map(move |q| StratumLabel::new(p, q)))
        .collect()
}

/// Every label that precedes or equals a member of `labels`.
pub fn monotone_closure(labels: &BTreeSet<StratumLabel>, n: usize) -> Result<MonotoneSet> {
    let mut out = labels.clone();
    for y in universe(n) {
        if out.contains(&y) {
            continue;
        }
        for x in labels {
            if precedes(y, *x, n)? {
                out.insert(y);
                break;
            }
        }
    }
    Ok(MonotoneSet { labels: out })
}

/// Is {eqs = 0, ineq ≠ 0} nonempty over the algebraic closure?
pub(crate) fn consistent(chart: &Chart, eqs: &[Polynomial], ineq: &Polynomial, lim: &Limits) -> Result<bool> {
    if ineq.is_zero() {
        return Ok(false);
    }
    if eqs.iter().any(|e| e.is_constant() && !e.is_zero()) {
        return Ok(false);
    }
    let tname = chart.fresh_name("t");
    let ext = chart.with_prefix(&tname);
    let t = Polynomial::var(&ext, 0);
    let mut gens: Vec<Polynomial> = eqs
        .iter()
        .filter(|e| !e.is_zero())
        .map(|e| e.embed(&ext))
        .collect::<Result<_>>()?;
    gens.push(&Polynomial::one(&ext) - &(&t * &ineq.embed(&ext)?));
    let basis = Ideal::new(&ext, gens)?.groebner_with(crate::algebra::MonomialOrder::Graded, lim)?;
    Ok(!basis.gens().iter().any(|g| g.is_constant()))
}

/// Labels (p, q) whose strata are nonempty, decided from the equations.
pub fn nonempty_strata(s: &Scene, lim: &Limits) -> Result<BTreeSet<StratumLabel>> {
    let xc = s.x_coords();
    let m = xc.len();
    let refs = s.factor_refs();
    let mut found = BTreeSet::new();
    for mask in 1u64..(1u64 << m) {
        let inside: Vec<usize> = (0..m).filter(|i| mask >> i & 1 == 1).collect();
        let zero_coords: Vec<usize> = inside.iter().map(|&i| xc[i]).collect();
        let mut outside = s.units.iter().fold(Polynomial::one(&s.chart), |acc, u| &acc * u);
        for i in (0..m).filter(|i| mask >> i & 1 == 0) {
            outside = &outside * &Polynomial::var(&s.chart, xc[i]);
        }
        let pairs: BTreeMap<usize, usize> = inside
            .iter()
            .map(|&i| {
                let c = s
                    .d
                    .iter()
                    .filter(|r| match r.host {
                        Host::Pair(a, b) => (a == i || b == i) && inside.contains(&a) && inside.contains(&b),
                        _ => false,
                    })
                    .count();
                (i, c)
            })
            .collect();
        // restricted factors on the chosen components, grouped by equation
        let mut eq_of: Vec<(usize, usize)> = Vec::new();
        let mut distinct: Vec<Polynomial> = Vec::new();
        for f in refs.iter().filter(|f| inside.contains(&f.host)) {
            let g = f.restricted.set_zero(&zero_coords);
            if g.is_constant() && !g.is_zero() {
                continue;
            }
            let key = if g.is_zero() { g } else { g.normalized() };
            let k = match distinct.iter().position(|d| *d == key) {
                Some(k) => k,
                None => {
                    distinct.push(key);
                    distinct.len() - 1
                }
            };
            eq_of.push((f.host, k));
        }
        let forced: Vec<bool> = distinct.iter().map(|d| d.is_zero()).collect();
        let base: Vec<Polynomial> = zero_coords.iter().map(|&c| Polynomial::var(&s.chart, c)).collect();
        let mut memo: BTreeMap<Vec<bool>, bool> = BTreeMap::new();
        let label_of = |chosen: &[bool]| {
            let q = inside
                .iter()
                .map(|&i| {
                    pairs[&i]
                        + eq_of
                            .iter()
                            .filter(|(h, k)| *h == i && chosen[*k])
                            .count()
                })
                .min()
                .unwrap();
            StratumLabel::new(inside.len(), q)
        };
        // depth-first over vanishing patterns of the distinct equations
        let mut stack: Vec<Vec<bool>> = vec![Vec::new()];
        while let Some(prefix) = stack.pop() {
            let depth = prefix.len();
            let mut eqs = base.clone();
            for (k, &on) in prefix.iter().enumerate() {
                if on {
                    eqs.push(distinct[k].clone());
                }
            }
            if depth == distinct.len() {
                let label = label_of(&prefix);
                if found.contains(&label) {
                    continue;
                }
                let mut ineq = outside.clone();
                for (k, &on) in prefix.iter().enumerate() {
                    if !on {
                        ineq = &ineq * &distinct[k];
                    }
                }
                if consistent(&s.chart, &eqs, &ineq, lim)? {
                    found.insert(label);
                }
                continue;
            }
            if depth > 0 && prefix[depth - 1] {
                let ok = match memo.get(&prefix) {
                    Some(v) => *v,
                    None => {
                        let v = consistent(&s.chart, &eqs, &outside, lim)?;
                        memo.insert(prefix.clone(), v);
                        v
                    }
                };
                if !ok {
                    continue;
                }
            }
            let mut with = prefix.clone();
            with.push(true);
            if !forced[depth] {
                let mut without = prefix;
                without.push(false);
                stack.push(without);
            }
            stack.push(with);
        }
    }
    Ok(found)
}

/// Maximal nonempty strata outside `done`, in (p, q) order.
pub fn k_set(s: &Scene, done: &MonotoneSet, lim: &Limits) -> Result<Vec<StratumLabel>> {
    let n = s.dim();
    let open: Vec<StratumLabel> = nonempty_strata(s, lim)?
        .into_iter()
        .filter(|l| !done.contains(l))
        .collect();
    let mut out = Vec::new();
    for &l in &open {
        let mut dominated = false;
        for &o in &open {
            if o != l && precedes(o, l, n)? {
                dominated = true;
                break;
            }
        }
        if !dominated {
            out.push(l);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{origin, rat};
    use crate::scene::fixtures::{example_4_6, example_4_8};

    #[test]
    fn strata_at_points() {
        let c = Chart::new(&["x1", "x2", "y1", "y2"]).unwrap();
        let mut s = Scene::new(c, vec!["x1".into(), "x2".into()]);
        s.add_d("x1", &["y1"], rat(1)).unwrap();
        s.add_d("x2", &["y1*y2"], rat(1)).unwrap();
        assert_eq!(stratum_at(&s, &origin(4)).unwrap(), StratumLabel::new(2, 1));
        assert_eq!(stratum_at(&example_4_6(), &origin(4)).unwrap(), StratumLabel::new(2, 1));
        let a = vec![rat(0), rat(1), rat(0), rat(0)];
        assert_eq!(stratum_at(&example_4_6(), &a).unwrap(), StratumLabel::new(1, 1));
        assert!(stratum_at(&example_4_6(), &[rat(1), rat(1), rat(0), rat(0)]).is_err());
    }

    #[test]
    fn order() {
        let l = StratumLabel::new;
        assert!(precedes(l(3, 1), l(1, 1), 6).unwrap());
        assert!(precedes(l(3, 2), l(3, 1), 6).unwrap());
        assert!(!precedes(l(2, 1), l(2, 1), 6).unwrap());
        assert!(precedes(l(2, 1), l(2, 0), 6).unwrap());
        let c = monotone_closure(&BTreeSet::from([l(3, 1)]), 6).unwrap();
        assert!(c.contains(&l(3, 2)) && c.contains(&l(4, 1)));
        assert!(!c.contains(&l(2, 1)));
        let again = monotone_closure(&c.labels, 6).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn k_sets() {
        let lim = Limits::default();
        let s = example_4_6();
        let strata = nonempty_strata(&s, &lim).unwrap();
        let l = StratumLabel::new;
        assert_eq!(strata, BTreeSet::from([l(1, 0), l(1, 1), l(2, 0), l(2, 1)]));
        assert_eq!(k_set(&s, &MonotoneSet::default(), &lim).unwrap(), vec![l(2, 1)]);
        let all = MonotoneSet { labels: strata };
        assert!(k_set(&s, &all, &lim).unwrap().is_empty());
        let e = example_4_8();
        assert!(nonempty_strata(&e, &lim).unwrap().contains(&l(2, 1)));
    }
}
