//! Hilbert–Samuel values by linear algebra on truncated power series.
//! Deliberately shares nothing with the standard-basis code.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::algebra::{Coeff, ExponentVector, Ideal};
use crate::error::{Error, Result};
use crate::limits::Limits;

fn monomials_upto(n: usize, k: u32) -> Vec<ExponentVector> {
    fn rec(i: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<ExponentVector>) {
        if i == cur.len() {
            out.push(ExponentVector(cur.clone()));
            return;
        }
        for e in 0..=left {
            cur[i] = e;
            rec(i + 1, left - e, cur, out);
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    rec(0, k, &mut vec![0; n], &mut out);
    out.sort();
    out
}

/// Rank of sparse rows (column index → value) by exact elimination.
fn rank(rows: Vec<BTreeMap<usize, Coeff>>) -> usize {
    let mut pivots: BTreeMap<usize, BTreeMap<usize, Coeff>> = BTreeMap::new();
    for mut row in rows {
        loop {
            let Some((&col, _)) = row.iter().next() else { break };
            match pivots.get(&col) {
                Some(p) => {
                    let f = row[&col].clone() / &p[&col];
                    for (c, v) in p {
                        let e = row.entry(*c).or_insert_with(Coeff::zero);
                        *e -= &f * v;
                        if e.is_zero() {
                            row.remove(c);
                        }
                    }
                }
                None => {
                    pivots.insert(col, row);
                    break;
                }
            }
        }
    }
    pivots.len()
}

/// dim_K of O/(I + m^{k+1}) at the point `a`.
pub fn brute_force_hs(i: &Ideal, a: &[Coeff], k: usize, lim: &Limits) -> Result<u64> {
    if k > lim.oracle_k {
        return Err(Error::CapExceeded(format!(
            "oracle degree {k} exceeds cap {}",
            lim.oracle_k
        )));
    }
    let n = i.chart().dim();
    let k = k as u32;
    let basis = monomials_upto(n, k);
    let index: BTreeMap<&ExponentVector, usize> = basis.iter().enumerate().map(|(j, e)| (e, j)).collect();
    let gens: Vec<_> = i.gens().iter().map(|g| g.translate(a)).collect();
    if gens.iter().any(|g| !g.constant_term().is_zero()) {
        return Ok(0);
    }
    let mut rows = Vec::new();
    for g in &gens {
        let Some(ord) = g.order() else { continue };
        if ord > k {
            continue;
        }
        for m in monomials_upto(n, k - ord) {
            let mut row = BTreeMap::new();
            for (e, c) in g.terms() {
                let s = e.add(&m);
                if s.degree() <= k {
                    row.insert(index[&s], c.clone());
                }
            }
            if !row.is_empty() {
                rows.push(row);
            }
        }
    }
    Ok((basis.len() - rank(rows)) as u64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{origin, Chart};

    fn c4() -> Chart {
        Chart::new(&["x1", "x2", "y", "z"]).unwrap()
    }

    #[test]
    fn counts() {
        let lim = Limits::default();
        let i = Ideal::parse(&c4(), "x1*x2, y").unwrap();
        assert_eq!(brute_force_hs(&i, &origin(4), 2, &lim).unwrap(), 9);
        let u = Ideal::unit(&c4());
        assert_eq!(brute_force_hs(&u, &origin(4), 3, &lim).unwrap(), 0);
        let e = Ideal::parse(&c4(), "x1*x2, x2*y, x1 + y*z").unwrap();
        assert_eq!(brute_force_hs(&e, &origin(4), 2, &lim).unwrap(), 9);
        assert!(brute_force_hs(&e, &origin(4), 9, &lim).is_err());
    }
}
