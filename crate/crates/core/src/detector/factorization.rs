//! Presentation of a product of order-one factors as x₁⋯x_{p−1}·g₁ + y₁⋯y_q·g₂.

use num_traits::Zero;
use serde::Serialize;

use crate::algebra::{Coeff, ExponentVector, Polynomial};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "index")]
pub enum Association {
    X(usize),
    Y(usize),
    None,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FactorPresentation {
    /// One entry per input factor; indices are positions in `xs` / `ys`.
    pub associations: Vec<Association>,
    pub g1: Polynomial,
    pub g2: Polynomial,
    /// g₂ is a unit or lies in (x₁,…,x_{p−1}, y₁,…,y_q).
    pub g2_in_coordinate_ideal: bool,
}

fn associate(h: &Polynomial, xs: &[usize], ys: &[usize]) -> Association {
    let lin = h.linear_part();
    let support: Vec<usize> = (0..lin.len()).filter(|&i| !lin[i].is_zero()).collect();
    if let [v] = support.as_slice() {
        if let Some(j) = ys.iter().position(|y| y == v) {
            return Association::Y(j);
        }
    }
    let hits: Vec<usize> = (0..xs.len())
        .filter(|&i| ys.iter().any(|&y| h.set_zero(&[xs[i], y]).is_zero()))
        .collect();
    match hits.as_slice() {
        [i] => Association::X(*i),
        _ => Association::None,
    }
}

fn exponent_of(n: usize, vars: &[usize]) -> ExponentVector {
    let mut e = vec![0u32; n];
    for &v in vars {
        e[v] += 1;
    }
    ExponentVector(e)
}

/// `xs` holds the p−1 coordinates x₁…x_{p−1}, `ys` the q coordinates y_j.
pub fn normalize_factorization(factors: &[Polynomial], xs: &[usize], ys: &[usize]) -> Result<FactorPresentation> {
    if xs.len() + 1 < 3 {
        return Err(Error::Invalid("factor normalization requires p ≥ 3".into()));
    }
    let first = factors
        .first()
        .ok_or_else(|| Error::Invalid("no factors to normalize".into()))?;
    let chart = first.chart().clone();
    for f in factors {
        if f.order() != Some(1) {
            return Err(Error::Invalid(format!("factor {f} does not have order 1")));
        }
    }
    let associations: Vec<Association> = factors.iter().map(|h| associate(h, xs, ys)).collect();

    // (P, Y) is a monomial ideal, so membership and the split are termwise.
    let n = chart.dim();
    let product = factors.iter().fold(Polynomial::one(&chart), |acc, f| &acc * f);
    let px = exponent_of(n, xs);
    let py = exponent_of(n, ys);
    let mut t1: Vec<(ExponentVector, Coeff)> = Vec::new();
    let mut t2: Vec<(ExponentVector, Coeff)> = Vec::new();
    for (e, c) in product.terms() {
        if px.divides(e) {
            t1.push((e.sub(&px), c.clone()));
        } else if py.divides(e) {
            t2.push((e.sub(&py), c.clone()));
        } else {
            return Err(Error::Invalid(format!(
                "product {product} is not in (x₁⋯x_{{p−1}}, y₁⋯y_q)"
            )));
        }
    }
    let g1 = Polynomial::from_terms(&chart, t1);
    let g2 = Polynomial::from_terms(&chart, t2);
    let coords: Vec<usize> = xs.iter().chain(ys).copied().collect();
    let g2_in_coordinate_ideal =
        !g2.constant_term().is_zero() || g2.set_zero(&coords).is_zero();
    Ok(FactorPresentation {
        associations,
        g1,
        g2,
        g2_in_coordinate_ideal,
    })
}
