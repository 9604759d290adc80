//! Standing hypotheses on scenes, reported as data.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::{Host, Scene};
use crate::algebra::{Coeff, Polynomial};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Violation {
    pub severity: Severity,
    pub kind: String,
    pub message: String,
}

fn err(kind: &str, message: String) -> Violation {
    Violation {
        severity: Severity::Error,
        kind: kind.to_string(),
        message,
    }
}

fn is_rational_square(c: &Coeff) -> bool {
    if c.is_negative() {
        return false;
    }
    let sq = |n: &BigInt| {
        let r = n.sqrt();
        &r * &r == *n
    };
    sq(c.numer()) && sq(c.denom())
}

/// Nonzero diagonal entries after congruence-diagonalizing a symmetric matrix.
fn diagonalize(mut m: Vec<Vec<Coeff>>) -> Vec<Coeff> {
    let mut out = Vec::new();
    loop {
        let n = m.len();
        if n == 0 {
            return out;
        }
        let piv = (0..n).find(|&i| !m[i][i].is_zero());
        let piv = match piv {
            Some(i) => i,
            None => {
                // zero diagonal: e_i += e_j creates a nonzero diagonal entry
                let Some((i, j)) = (0..n)
                    .flat_map(|i| (0..n).map(move |j| (i, j)))
                    .find(|&(i, j)| i != j && !m[i][j].is_zero())
                else {
                    return out;
                };
                for k in 0..n {
                    let v = m[j][k].clone();
                    m[i][k] += v;
                }
                for k in 0..n {
                    let v = m[k][j].clone();
                    m[k][i] += v;
                }
                i
            }
        };
        let d = m[piv][piv].clone();
        let rest: Vec<usize> = (0..n).filter(|&k| k != piv).collect();
        let next: Vec<Vec<Coeff>> = rest
            .iter()
            .map(|&r| {
                rest.iter()
                    .map(|&c| &m[r][c] - &(&m[r][piv] * &m[piv][c] / &d))
                    .collect()
            })
            .collect();
        out.push(d);
        m = next;
    }
}

/// Irreducibility over Q of a polynomial of total degree two.
pub fn quadric_irreducible(f: &Polynomial) -> bool {
    debug_assert_eq!(f.degree(), Some(2));
    let vars = f.variables();
    let k = vars.len();
    // homogenize: last slot is the homogenizing variable
    let mut m = vec![vec![Coeff::zero(); k + 1]; k + 1];
    let two = Coeff::from_integer(2.into());
    for (e, c) in f.terms() {
        let idx: Vec<usize> = vars
            .iter()
            .enumerate()
            .flat_map(|(slot, &v)| std::iter::repeat(slot).take(e.0[v] as usize))
            .collect();
        match idx.as_slice() {
            [] => m[k][k] += c,
            [a] => {
                m[*a][k] += c / &two;
                m[k][*a] += c / &two;
            }
            [a, b] if a == b => m[*a][*a] += c,
            [a, b] => {
                m[*a][*b] += c / &two;
                m[*b][*a] += c / &two;
            }
            _ => unreachable!("degree two"),
        }
    }
    let diag = diagonalize(m);
    match diag.len() {
        0 | 1 => false,
        2 => !is_rational_square(&-(&diag[0] * &diag[1])),
        _ => true,
    }
}

/// Empty iff the scene satisfies every standing hypothesis. With
/// `forbid_pairs`, singular-locus (pair-host) records are violations too.
pub fn validate_scene(s: &Scene, forbid_pairs: bool) -> Vec<Violation> {
    let mut out = Vec::new();
    let n = s.dim();
    let mut seen = BTreeSet::new();
    for name in &s.x {
        if !seen.insert(name.clone()) {
            out.push(err("duplicate-name", format!("X coordinate {name} listed twice")));
        }
        if s.chart.index(name).is_none() {
            out.push(err("unknown-coordinate", format!("X coordinate {name} not in chart")));
        }
    }
    for c in &s.e {
        if !seen.insert(c.name.clone()) {
            out.push(err("duplicate-name", format!("E coordinate {} reused", c.name)));
        }
        if s.chart.index(&c.name).is_none() {
            out.push(err("unknown-coordinate", format!("E coordinate {} not in chart", c.name)));
        }
    }
    if !out.is_empty() {
        return out;
    }
    let xc = s.x_coords();
    let mut components: BTreeSet<(usize, String)> = BTreeSet::new();
    let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (r, rec) in s.d.iter().enumerate() {
        if !rec.mult.is_positive() {
            out.push(err("bad-multiplicity", format!("D[{r}] has multiplicity {}", rec.mult)));
        }
        match rec.host {
            Host::Pair(i, j) => {
                if i == j || i >= s.x.len() || j >= s.x.len() {
                    out.push(err("bad-host", format!("D[{r}] has pair host ({i}, {j})")));
                    continue;
                }
                if !rec.factors.is_empty() {
                    out.push(err("bad-host", format!("D[{r}]: a pair-host record carries no factors")));
                }
                if forbid_pairs {
                    out.push(err(
                        "pair-host",
                        format!("D[{r}] lies in the singular locus X_{i} ∩ X_{j}"),
                    ));
                }
                if !pairs.insert((i.min(j), i.max(j))) {
                    out.push(err("duplicate-component", format!("D[{r}] repeats a singular-locus component")));
                }
            }
            Host::Single(h) => {
                if h >= s.x.len() {
                    out.push(err("bad-host", format!("D[{r}] has host {h}")));
                    continue;
                }
                if rec.factors.is_empty() {
                    out.push(err("empty-factors", format!("D[{r}] has no factors")));
                }
                if let Some(decl) = &rec.declared {
                    if rec.product(&s.chart) != *decl {
                        out.push(err(
                            "factorization-mismatch",
                            format!("D[{r}]: product of factors is not {decl}"),
                        ));
                    }
                }
                for (k, f) in rec.factors.iter().enumerate() {
                    let g = f.set_zero(&[xc[h]]);
                    if g.is_zero() {
                        out.push(err(
                            "factor-in-host-ideal",
                            format!("D[{r}].factors[{k}] = {f} lies in ({})", s.x[h]),
                        ));
                        continue;
                    }
                    if g.is_constant() {
                        out.push(err("unit-factor", format!("D[{r}].factors[{k}] = {f} is a unit on X_{h}")));
                        continue;
                    }
                    if let Some(v) = g.as_scaled_variable() {
                        let name = s.chart.name(v);
                        if s.x.iter().any(|x| x == name) {
                            out.push(err(
                                "singular-locus-factor",
                                format!("D[{r}].factors[{k}] = {f} cuts X_{h} ∩ ({name} = 0); use a pair host"),
                            ));
                        }
                        if s.e.iter().any(|e| e.name == name) {
                            out.push(err(
                                "factor-is-exceptional",
                                format!("D[{r}].factors[{k}] = {f} is an E component"),
                            ));
                        }
                    }
                    if !components.insert((h, g.normalized().to_string())) {
                        out.push(err(
                            "duplicate-component",
                            format!("D[{r}].factors[{k}] = {f} repeats a component on X_{h}"),
                        ));
                    }
                    match g.degree() {
                        Some(2) if !quadric_irreducible(&g) => out.push(err(
                            "reducible-factor",
                            format!("D[{r}].factors[{k}] = {f} is reducible on X_{h}"),
                        )),
                        Some(d) if d > 2 => out.push(Violation {
                            severity: Severity::Warning,
                            kind: "irreducibility-unchecked".into(),
                            message: format!("D[{r}].factors[{k}] has degree {d}; irreducibility is trusted"),
                        }),
                        _ => {}
                    }
                }
            }
        }
    }
    for (k, p) in s.probes.iter().enumerate() {
        if p.len() != n {
            out.push(err("probe-dimension", format!("probes[{k}] has wrong length")));
        } else if !s.on_x(p) {
            out.push(err("probe-off-X", format!("probes[{k}] does not lie on X")));
        } else if !s.in_chart(p) {
            out.push(err("probe-off-chart", format!("probes[{k}] is outside the open set of the chart")));
        }
    }
    out
}

pub fn has_errors(v: &[Violation]) -> bool {
    v.iter().any(|x| x.severity == Severity::Error)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, Chart};
    use crate::scene::fixtures::example_4_8;

    fn kinds(v: &[Violation]) -> Vec<&str> {
        v.iter().map(|x| x.kind.as_str()).collect()
    }

    #[test]
    fn example_is_valid() {
        assert!(validate_scene(&example_4_8(), true).is_empty());
    }

    #[test]
    fn host_ideal_and_mismatch() {
        let mut s = example_4_8();
        s.d[0].factors[0] = s.parse_poly("x1*y").unwrap();
        assert_eq!(kinds(&validate_scene(&s, true)), vec!["factor-in-host-ideal"]);
        let mut s = example_4_8();
        s.d[1].declared = Some(s.parse_poly("x1 + y").unwrap());
        assert_eq!(kinds(&validate_scene(&s, true)), vec!["factorization-mismatch"]);
    }

    #[test]
    fn quadrics() {
        let c = Chart::new(&["a", "b", "c"]).unwrap();
        let p = |t: &str| Polynomial::parse(&c, t).unwrap();
        assert!(quadric_irreducible(&p("a^2 - b")));
        assert!(quadric_irreducible(&p("a^2 - 2*b^2")));
        assert!(!quadric_irreducible(&p("a^2 - 4*b^2")));
        assert!(!quadric_irreducible(&p("a*b")));
        assert!(!quadric_irreducible(&p("(a + b + 1)^2")));
        assert!(quadric_irreducible(&p("a*b - 1")));
        assert!(!quadric_irreducible(&p("a*b + a")));
        assert!(quadric_irreducible(&p("a*b + c")));
    }

    #[test]
    fn pairs_and_probes() {
        let c = Chart::new(&["x1", "x2", "y"]).unwrap();
        let mut s = Scene::new(c, vec!["x1".into(), "x2".into()]);
        s.add_pair("x1", "x2", rat(1)).unwrap();
        assert!(validate_scene(&s, false).is_empty());
        assert_eq!(kinds(&validate_scene(&s, true)), vec!["pair-host"]);
        s.probes.push(vec![rat(1), rat(1), rat(0)]);
        assert_eq!(kinds(&validate_scene(&s, false)), vec!["probe-off-X"]);
    }
}
