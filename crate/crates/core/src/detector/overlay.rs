//! Multiplicity classes of D components through a point.

use num_traits::Zero;

use super::{rank, Failure, Obstruction, Witness};
use crate::algebra::{Coeff, Polynomial};
use crate::scene::{FactorRef, Scene};

fn find(parent: &mut [usize], i: usize) -> usize {
    let mut r = i;
    while parent[r] != r {
        r = parent[r];
    }
    let mut k = i;
    while parent[k] != r {
        let next = parent[k];
        parent[k] = r;
        k = next;
    }
    r
}

/// D factors through `a` on different components are equivalent when they
/// meet in codimension two of X there (rank of the four linear parts is 3).
/// Returns the factor refs through a, grouped into classes.
pub fn equivalence_classes(s: &Scene, a: &[Coeff]) -> Vec<Vec<FactorRef>> {
    let xc = s.x_coords();
    let through: Vec<FactorRef> = s
        .factor_refs()
        .into_iter()
        .filter(|f| a[xc[f.host]].is_zero() && f.restricted.eval(a).is_zero())
        .collect();
    let lin = |p: &Polynomial| p.translate(a).linear_part();
    let mut parent: Vec<usize> = (0..through.len()).collect();
    for i in 0..through.len() {
        for k in i + 1..through.len() {
            let (f, g) = (&through[i], &through[k]);
            if f.host == g.host {
                continue;
            }
            let rows = vec![
                Polynomial::var(&s.chart, xc[f.host]).linear_part(),
                Polynomial::var(&s.chart, xc[g.host]).linear_part(),
                lin(&f.restricted),
                lin(&g.restricted),
            ];
            if rank(&rows) == 3 {
                let (ri, rk) = (find(&mut parent, i), find(&mut parent, k));
                parent[ri] = rk;
            }
        }
    }
    let mut classes: Vec<Vec<FactorRef>> = Vec::new();
    let mut root_slot: Vec<Option<usize>> = vec![None; through.len()];
    for (i, f) in through.into_iter().enumerate() {
        let r = find(&mut parent, i);
        match root_slot[r] {
            Some(slot) => classes[slot].push(f),
            None => {
                root_slot[r] = Some(classes.len());
                classes.push(vec![f]);
            }
        }
    }
    classes
}

/// (number of X components, number of D classes) at a point.
pub fn iota(s: &Scene, a: &[Coeff]) -> (usize, usize) {
    (s.x_through(a).len(), equivalence_classes(s, a).len())
}

/// Classes whose members carry different multiplicities.
pub fn unequal_classes(s: &Scene, a: &[Coeff]) -> Vec<Vec<FactorRef>> {
    equivalence_classes(s, a)
        .into_iter()
        .filter(|c| c.iter().any(|f| f.mult != c[0].mult))
        .collect()
}

pub(crate) fn check_multiplicities(s: &Scene, a: &[Coeff]) -> Option<Obstruction> {
    let bad = unequal_classes(s, a);
    if bad.is_empty() {
        return None;
    }
    Some(Obstruction {
        failed: Failure::Multiplicity,
        witness: Witness::Multiplicities(
            bad.iter()
                .map(|c| {
                    c.iter()
                        .map(|f| (format!("{}: {}", s.x[f.host], f.restricted), f.mult.clone()))
                        .collect()
                })
                .collect(),
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{origin, rat, Chart};

    fn s3(m1: i64, m2: i64) -> Scene {
        let c = Chart::new(&["x", "y", "z"]).unwrap();
        let mut s = Scene::new(c, vec!["x".into(), "y".into()]);
        s.add_d("x", &["z"], rat(m1)).unwrap();
        s.add_d("y", &["z"], rat(m2)).unwrap();
        s
    }

    #[test]
    fn classes_and_iota() {
        let s = s3(2, 3);
        assert_eq!(iota(&s, &origin(3)), (2, 1));
        assert_eq!(unequal_classes(&s, &origin(3)).len(), 1);
        assert!(check_multiplicities(&s3(2, 2), &origin(3)).is_none());
        // away from the double locus only one component passes
        assert_eq!(iota(&s, &[rat(0), rat(1), rat(0)]), (1, 1));
    }

    #[test]
    fn distinct_loci_not_equivalent() {
        let c = Chart::new(&["x", "y", "z", "w"]).unwrap();
        let mut s = Scene::new(c, vec!["x".into(), "y".into()]);
        s.add_d("x", &["z"], rat(1)).unwrap();
        s.add_d("y", &["w"], rat(2)).unwrap();
        assert_eq!(iota(&s, &origin(4)), (2, 2));
    }
}
