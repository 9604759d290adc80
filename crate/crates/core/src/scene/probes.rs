//! Finite set of rational points at which a scene is certified.

use std::collections::BTreeSet;

use num_traits::{One, Zero};

use super::Scene;
use crate::algebra::{Coeff, Polynomial, RationalPoint};

/// Affine hyperplane Σ c_i x_i + c0 = 0.
type Hyperplane = (Vec<Coeff>, Coeff);

fn hyperplane_of(f: &Polynomial) -> Option<Hyperplane> {
    if f.degree() != Some(1) {
        return None;
    }
    let lin = f.linear_part();
    let c0 = f.constant_term();
    // scale so the first nonzero coefficient is one
    let lead = lin.iter().find(|c| !c.is_zero())?.clone();
    Some((lin.iter().map(|c| c / &lead).collect(), c0 / &lead))
}

/// Solutions of the system with free coordinates set to 0 and then to 1.
fn solve(planes: &[&Hyperplane], n: usize) -> Vec<RationalPoint> {
    let mut rows: Vec<Vec<Coeff>> = planes
        .iter()
        .map(|(c, c0)| {
            let mut r = c.clone();
            r.push(-c0.clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..n {
        let Some(k) = (r..rows.len()).find(|&k| !rows[k][col].is_zero()) else { continue };
        rows.swap(r, k);
        let inv = rows[r][col].recip();
        for v in rows[r].iter_mut() {
            *v *= &inv;
        }
        for k in 0..rows.len() {
            if k != r && !rows[k][col].is_zero() {
                let f = rows[k][col].clone();
                for j in 0..=n {
                    let d = &f * &rows[r][j];
                    rows[k][j] -= d;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[n].is_zero()) {
        return Vec::new();
    }
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut out = Vec::new();
    for fill in [Coeff::zero(), Coeff::one()] {
        let mut p = vec![Coeff::zero(); n];
        for &c in &free {
            p[c] = fill.clone();
        }
        for (k, &col) in pivots.iter().enumerate() {
            let mut v = rows[k][n].clone();
            for &c in &free {
                v -= &rows[k][c] * &p[c];
            }
            p[col] = v;
        }
        out.push(p);
        if free.is_empty() {
            break;
        }
    }
    out
}

const MAX_SUBSETS: usize = 1 << 16;

/// Origin, intersections of X, E and linear D hyperplanes, and user probes,
/// restricted to X, deduplicated and sorted.
pub fn probe_points(s: &Scene) -> Vec<RationalPoint> {
    let n = s.dim();
    let mut planes: Vec<Hyperplane> = Vec::new();
    let mut add = |h: Option<Hyperplane>| {
        if let Some(h) = h {
            if !planes.contains(&h) {
                planes.push(h);
            }
        }
    };
    for &c in s.x_coords().iter().chain(s.e_coords().iter()) {
        add(hyperplane_of(&Polynomial::var(&s.chart, c)));
    }
    for f in s.factor_refs() {
        let raw = &s.d[f.record].factors[f.slot];
        add(hyperplane_of(raw).or_else(|| hyperplane_of(&f.restricted)));
    }
    let mut points: BTreeSet<RationalPoint> = BTreeSet::new();
    points.insert(vec![Coeff::zero(); n]);
    let h = planes.len();
    let mut count = 0usize;
    // subsets in increasing size, so small intersections win under the cap
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    'outer: for _ in 0..n.min(h) {
        let mut next = Vec::new();
        for sub in &frontier {
            let start = sub.last().map(|&l| l + 1).unwrap_or(0);
            for k in start..h {
                let mut t = sub.clone();
                t.push(k);
                let chosen: Vec<&Hyperplane> = t.iter().map(|&i| &planes[i]).collect();
                let sols = solve(&chosen, n);
                if sols.is_empty() {
                    continue;
                }
                points.extend(sols);
                next.push(t);
                count += 1;
                if count >= MAX_SUBSETS {
                    break 'outer;
                }
            }
        }
        frontier = next;
    }
    points.extend(s.probes.iter().cloned());
    points.into_iter().filter(|p| s.on_x(p) && s.in_chart(p)).collect()
}
