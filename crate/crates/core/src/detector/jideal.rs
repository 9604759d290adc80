//! The quotient ideal J of the last component against the others.

use std::collections::BTreeSet;

use num_traits::Zero;

use super::LocalPair;
use crate::algebra::{Coeff, ExponentVector, Ideal, Polynomial};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::scene::Scene;

/// J = (x_m, F_m, x_1⋯x_{m-1}) : (∩_{i<m} (x_i, F_i) + (x_m)) for a pair at the origin.
pub fn j_of_pair(lp: &LocalPair, _lim: &Limits) -> Result<Ideal> {
    let p = lp.p();
    if p < 2 {
        return Err(Error::Invalid("J needs at least two components through the point".into()));
    }
    let chart = &lp.chart;
    let m = p - 1;
    if lp.factors[m].is_empty() {
        return Ok(Ideal::unit(chart));
    }
    let prod_x = (0..m).fold(Polynomial::one(chart), |acc, k| &acc * &lp.x_var(k));
    let f_m = lp.factors[m].iter().fold(Polynomial::one(chart), |acc, f| &acc * f);
    let xm = lp.x_var(m);
    if lp.factors[..m].iter().all(|f| f.is_empty()) {
        return Ok(Ideal::from_polys(chart, vec![xm, f_m, prod_x]));
    }
    if let Some(g2) = fast_quotient(lp, &f_m) {
        return Ok(Ideal::from_polys(chart, vec![xm, prod_x, g2]));
    }
    j_generic(lp)
}

/// When every earlier component carries the same coordinate hyperplanes y_j
/// (none of them an X coordinate) and F_m = P g1 + Y g2 termwise, J = (x_m, P, g2).
fn fast_quotient(lp: &LocalPair, f_m: &Polynomial) -> Option<Polynomial> {
    let m = lp.p() - 1;
    let var_set = |fs: &[Polynomial]| -> Option<BTreeSet<usize>> {
        let mut out = BTreeSet::new();
        for f in fs {
            let v = f.as_scaled_variable()?;
            if !out.insert(v) {
                return None;
            }
        }
        Some(out)
    };
    let first = var_set(&lp.factors[0])?;
    for f in &lp.factors[1..m] {
        if var_set(f)? != first {
            return None;
        }
    }
    if lp.xs.iter().any(|x| first.contains(x)) || first.is_empty() {
        return None;
    }
    let n = lp.chart.dim();
    let mut p_exp = vec![0u32; n];
    for &x in &lp.xs[..m] {
        p_exp[x] = 1;
    }
    let mut y_exp = vec![0u32; n];
    for &y in &first {
        y_exp[y] = 1;
    }
    let (p_exp, y_exp) = (ExponentVector(p_exp), ExponentVector(y_exp));
    let mut g2_terms: Vec<(ExponentVector, Coeff)> = Vec::new();
    for (e, c) in f_m.terms() {
        if p_exp.divides(e) {
            continue;
        }
        if !y_exp.divides(e) {
            return None;
        }
        g2_terms.push((e.sub(&y_exp), c.clone()));
    }
    let g2 = Polynomial::from_terms(&lp.chart, g2_terms);
    // the scalar multiple of the y-product does not change the ideal
    debug_assert!(!g2.is_zero() || f_m.terms().iter().all(|(e, _)| p_exp.divides(e)));
    Some(g2)
}

/// J at a point of the scene, in the scene's own coordinates.
pub fn compute_j(s: &Scene, a: &[Coeff], lim: &Limits) -> Result<Ideal> {
    if !s.on_x(a) {
        return Err(Error::Invalid("point is not on X".into()));
    }
    let lp = LocalPair::at(s, a, s.x.len());
    let last = *s.x_coords().last().ok_or_else(|| Error::Invalid("X is empty".into()))?;
    if !a[last].is_zero() {
        return Err(Error::Invalid("J needs the point on the last component of X".into()));
    }
    let j = j_of_pair(&lp, lim)?;
    let back: Vec<Coeff> = a.iter().map(|c| -c.clone()).collect();
    Ok(j.translate(&back))
}

/// The quotient computed without the coordinate shortcut, for cross-checks.
pub fn j_generic(lp: &LocalPair) -> Result<Ideal> {
    let chart = &lp.chart;
    let m = lp.p() - 1;
    let prod_x = (0..m).fold(Polynomial::one(chart), |acc, k| &acc * &lp.x_var(k));
    let f_m = lp.factors[m].iter().fold(Polynomial::one(chart), |acc, f| &acc * f);
    let xm = lp.x_var(m);
    let numerator = Ideal::from_polys(chart, vec![xm.clone(), f_m, prod_x]);
    let parts: Vec<Ideal> = (0..m).map(|k| lp.component_ideal(k)).collect();
    let denominator = Ideal::intersection_all(&parts)?.with(&[xm])?;
    numerator.quotient(&denominator)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{origin, rat, Chart};
    use crate::scene::fixtures::example_4_8;

    #[test]
    fn example_j() {
        let s = example_4_8();
        let j = compute_j(&s, &origin(4), &Limits::default()).unwrap();
        assert!(j.equals(&Ideal::parse(&s.chart, "x1, x2, z").unwrap()).unwrap());
        let lp = LocalPair::at(&s, &origin(4), 2);
        assert!(j_generic(&lp).unwrap().equals(&j).unwrap());
    }

    #[test]
    fn normal_form_unit() {
        let c = Chart::new(&["x1", "x2", "x3", "y1", "y2"]).unwrap();
        let mut s = Scene::new(c, vec!["x1".into(), "x2".into(), "x3".into()]);
        for x in ["x1", "x2", "x3"] {
            s.add_d(x, &["y1", "y2"], rat(1)).unwrap();
        }
        let j = compute_j(&s, &origin(5), &Limits::default()).unwrap();
        assert!(j.contains_unit_at(&origin(5)));
    }

    #[test]
    fn cleaning_scene() {
        let c = Chart::new(&["x1", "x2", "y1", "u1", "w"]).unwrap();
        let mut s = Scene::new(c, vec!["x1".into(), "x2".into()]);
        s.add_d("x1", &["y1"], rat(1)).unwrap();
        s.add_d("x2", &["x1*(1 + w) + x2*w + y1*u1^2"], rat(1)).unwrap();
        let j = compute_j(&s, &origin(5), &Limits::default()).unwrap();
        assert!(j.equals(&Ideal::parse(&s.chart, "x1, x2, u1^2").unwrap()).unwrap());
        let lp = LocalPair::at(&s, &origin(5), 2);
        assert!(j_generic(&lp).unwrap().equals(&j).unwrap());
    }

    #[test]
    fn needs_two_components() {
        let c = Chart::new(&["x1", "y"]).unwrap();
        let mut s = Scene::new(c, vec!["x1".into()]);
        s.add_d("x1", &["y"], rat(1)).unwrap();
        assert!(compute_j(&s, &origin(2), &Limits::default()).is_err());
    }
}
