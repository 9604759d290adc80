//! Blow-ups along coordinate-subspace centers, one affine chart at a time.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_traits::{Signed, Zero};
use serde_json::{json, Value};

use crate::algebra::{format_rational, Chart, Coeff, Ideal, Polynomial, RationalPoint};
use crate::error::{Error, Result};
use crate::scene::{DComponent, EComponent, Host, Scene};

/// Center (c_1 = v_1, …, c_k = v_k), by coordinate name, sorted by name.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct CenterSpec {
    coords: Vec<String>,
    values: Vec<Coeff>,
}

impl CenterSpec {
    pub fn new<S: AsRef<str>>(coords: &[S]) -> Result<CenterSpec> {
        let pairs: Vec<(&str, Coeff)> = coords.iter().map(|c| (c.as_ref(), Coeff::zero())).collect();
        CenterSpec::with_values(&pairs)
    }

    /// A translated coordinate subspace.
    pub fn with_values(pairs: &[(&str, Coeff)]) -> Result<CenterSpec> {
        let mut map: BTreeMap<String, Coeff> = BTreeMap::new();
        for (c, v) in pairs {
            if let Some(old) = map.insert(c.to_string(), v.clone()) {
                if old != *v {
                    return Err(Error::Invalid(format!("coordinate {c} given two values")));
                }
            }
        }
        if map.is_empty() {
            return Err(Error::Invalid("empty center".into()));
        }
        let (coords, values) = map.into_iter().unzip();
        Ok(CenterSpec { coords, values })
    }

    /// The subspace through `a` cut out by the given chart coordinates.
    pub fn through(chart: &Chart, idx: &[usize], a: &[Coeff]) -> Result<CenterSpec> {
        let pairs: Vec<(&str, Coeff)> = idx.iter().map(|&i| (chart.name(i), a[i].clone())).collect();
        CenterSpec::with_values(&pairs)
    }

    pub fn from_indices(chart: &Chart, idx: &[usize]) -> Result<CenterSpec> {
        let names: Vec<&str> = idx.iter().map(|&i| chart.name(i)).collect();
        CenterSpec::new(&names)
    }

    pub fn coords(&self) -> &[String] {
        &self.coords
    }

    pub fn codim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_linear(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    /// Value of a chart coordinate on the center, if it is constrained.
    pub fn value_of(&self, name: &str) -> Option<&Coeff> {
        self.coords.iter().position(|c| c == name).map(|k| &self.values[k])
    }

    /// Chart indices, in the chart's coordinate order.
    pub fn indices(&self, chart: &Chart) -> Result<Vec<usize>> {
        let mut out = self
            .coords
            .iter()
            .map(|c| {
                chart
                    .index(c)
                    .ok_or_else(|| Error::Invalid(format!("center coordinate {c} not in chart")))
            })
            .collect::<Result<Vec<_>>>()?;
        out.sort();
        Ok(out)
    }

    fn value_at(&self, chart: &Chart, i: usize) -> Coeff {
        self.value_of(chart.name(i)).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn generators(&self, chart: &Chart) -> Result<Vec<Polynomial>> {
        self.indices(chart)?
            .into_iter()
            .map(|i| {
                Ok(&Polynomial::var(chart, i) - &Polynomial::constant(chart, self.value_at(chart, i)))
            })
            .collect()
    }

    pub fn ideal(&self, chart: &Chart) -> Result<Ideal> {
        Ok(Ideal::from_polys(chart, self.generators(chart)?))
    }

    /// Generators as text, e.g. `["x1", "e2 + 1"]`.
    pub fn generator_strings(&self) -> Vec<String> {
        self.coords
            .iter()
            .zip(&self.values)
            .map(|(c, v)| {
                if v.is_zero() {
                    c.clone()
                } else if v.is_negative() {
                    format!("{c} + {}", format_rational(&-v.clone()))
                } else {
                    format!("{c} - {}", format_rational(v))
                }
            })
            .collect()
    }

    pub fn contains_point(&self, chart: &Chart, a: &[Coeff]) -> bool {
        self.indices(chart)
            .map(|idx| idx.iter().all(|&i| a[i] == self.value_at(chart, i)))
            .unwrap_or(false)
    }
}

impl fmt::Display for CenterSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.generator_strings().join(", "))
    }
}

/// The c-chart of a blow-up: c − v ↦ u, c' − v' ↦ u·c' for the other center
/// coordinates. A map without exceptional coordinate is the inclusion of an
/// open subset of the parent chart.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartMap {
    pub parent: Chart,
    pub child: Chart,
    /// Image of each parent coordinate, in the child chart.
    pub images: Vec<Polynomial>,
    /// Parent coordinate whose chart this is (empty for an open subset).
    pub chart_coord: String,
    /// Child index of the exceptional coordinate.
    pub exceptional: Option<usize>,
    pub center: CenterSpec,
}

impl ChartMap {
    pub fn exceptional_name(&self) -> Option<&str> {
        self.exceptional.map(|e| self.child.name(e))
    }

    pub fn pull_back(&self, f: &Polynomial) -> Polynomial {
        f.substitute(&self.child, &self.images)
    }

    /// The rational point of the chart over `a`: the point itself off the
    /// center, the fibre point with the other center coordinates 0 on it.
    pub fn preimage(&self, a: &[Coeff]) -> Option<RationalPoint> {
        let Some(_) = self.exceptional else {
            let k = self.parent.index(&self.chart_coord)?;
            return (a[k] != self.center.value_at(&self.parent, k)).then(|| a.to_vec());
        };
        let idx = self.center.indices(&self.parent).ok()?;
        let c = self.parent.index(&self.chart_coord)?;
        let shifted = |i: usize| &a[i] - &self.center.value_at(&self.parent, i);
        let mut out = a.to_vec();
        if self.center.contains_point(&self.parent, a) {
            for &i in &idx {
                out[i] = Coeff::zero();
            }
            return Some(out);
        }
        let u = shifted(c);
        if u.is_zero() {
            return None;
        }
        for &i in &idx {
            out[i] = if i == c { u.clone() } else { &shifted(i) / &u };
        }
        Some(out)
    }

    pub fn to_json(&self) -> Value {
        let map: serde_json::Map<String, Value> = self
            .parent
            .names()
            .iter()
            .zip(&self.images)
            .filter(|(n, p)| Polynomial::var_named(&self.child, n).ok().as_ref() != Some(*p))
            .map(|(n, p)| (n.clone(), json!(p.to_string())))
            .collect();
        match self.exceptional_name() {
            Some(e) => json!({
                "chart": self.chart_coord,
                "exceptional": e,
                "substitution": map,
            }),
            None => {
                let k = self.parent.index(&self.chart_coord).expect("chart coordinate");
                let v = self.center.value_at(&self.parent, k);
                let g = &Polynomial::var(&self.parent, k) - &Polynomial::constant(&self.parent, v);
                json!({ "open": format!("{g} != 0") })
            }
        }
    }
}

/// Admissible here: a coordinate subspace of codimension at least two.
pub fn check_admissible(center: &CenterSpec, s: &Scene) -> bool {
    center.codim() >= 2 && center.indices(&s.chart).is_ok()
}

/// One chart per center coordinate; `exceptional` names the new coordinate.
pub fn blow_up_chart(chart: &Chart, center: &CenterSpec, exceptional: &str) -> Result<Vec<ChartMap>> {
    let idx = center.indices(chart)?;
    let exc_name = if chart.index(exceptional).is_some() {
        chart.fresh_name(exceptional)
    } else {
        exceptional.to_string()
    };
    let mut out = Vec::new();
    for &c in &idx {
        let mut names: Vec<String> = chart.names().to_vec();
        names[c] = exc_name.clone();
        let child = Chart::new(&names)?;
        let u = Polynomial::var(&child, c);
        let images = (0..chart.dim())
            .map(|i| {
                let v = Polynomial::constant(&child, center.value_at(chart, i));
                if i == c {
                    &v + &u
                } else if idx.contains(&i) {
                    &v + &(&u * &Polynomial::var(&child, i))
                } else {
                    Polynomial::var(&child, i)
                }
            })
            .collect();
        out.push(ChartMap {
            parent: chart.clone(),
            child,
            images,
            chart_coord: chart.name(c).to_string(),
            exceptional: Some(c),
            center: center.clone(),
        });
    }
    Ok(out)
}

/// f∘σ = u^d · f′ with f′ not divisible by the exceptional coordinate u.
pub fn strict_transform(f: &Polynomial, map: &ChartMap) -> (Polynomial, u32) {
    let pulled = map.pull_back(f);
    let Some(exc) = map.exceptional else {
        return (pulled, 0);
    };
    let (d, rest) = pulled.split_var_power(exc);
    if cfg!(debug_assertions) {
        let u = Polynomial::var(&map.child, exc).pow(d);
        debug_assert_eq!(&u * &rest, pulled);
    }
    (rest, d)
}

/// Saturation of the pulled-back ideal by u; generator-wise for principal
/// ideals and for (x_i, f) with f free of x_i.
pub fn strict_transform_ideal(i: &Ideal, map: &ChartMap) -> Result<Ideal> {
    if let Some(gens) = fast_generators(i) {
        let out: Vec<Polynomial> = gens.iter().map(|g| strict_transform(g, map).0).collect();
        return Ok(Ideal::from_polys(&map.child, out));
    }
    let pulled = Ideal::from_polys(&map.child, i.gens().iter().map(|g| map.pull_back(g)).collect());
    match map.exceptional {
        Some(e) => pulled.saturation(&Polynomial::var(&map.child, e)),
        None => Ok(pulled),
    }
}

fn fast_generators(i: &Ideal) -> Option<Vec<Polynomial>> {
    match i.gens() {
        [f] => Some(vec![f.clone()]),
        [a, b] => {
            let (v, f) = match (a.as_scaled_variable(), b.as_scaled_variable()) {
                (Some(v), _) => (v, b),
                (_, Some(v)) => (v, a),
                _ => return None,
            };
            Some(vec![Polynomial::var(i.chart(), v), f.set_zero(&[v])])
        }
        _ => None,
    }
}

/// Everything a chart of a blow-up did to the scene.
#[derive(Clone, Debug)]
pub struct ChartResult {
    pub map: ChartMap,
    pub scene: Scene,
    /// Names of X components that do not meet this chart.
    pub dropped_x: Vec<String>,
}

/// Strict transforms of X and D, E plus the new exceptional, probes pulled back.
///
/// A translated center is disjoint from the X and E hyperplanes it moves off.
/// Their transforms are not coordinate hyperplanes in the blow-up charts, so
/// the charts exclude them and one open subset of the parent per such
/// hyperplane is added, where the map is an isomorphism.
pub fn transform_scene(s: &Scene, center: &CenterSpec, exceptional: &str, origin: &str) -> Result<Vec<ChartResult>> {
    if !check_admissible(center, s) {
        return Err(Error::Invalid(format!("center {center} is not admissible")));
    }
    let maps = blow_up_chart(&s.chart, center, exceptional)?;
    let mut out = maps
        .into_iter()
        .map(|m| transform_in_chart(s, m, origin))
        .collect::<Result<Vec<_>>>()?;
    for i in center.indices(&s.chart)? {
        let name = s.chart.name(i);
        let v = center.value_at(&s.chart, i);
        if v.is_zero() || !is_hyperplane(s, name) {
            continue;
        }
        out.push(localize(s, center, i));
    }
    Ok(out)
}

fn is_hyperplane(s: &Scene, name: &str) -> bool {
    s.x.iter().any(|x| x == name) || s.e.iter().any(|e| e.name == name)
}

fn localize(s: &Scene, center: &CenterSpec, i: usize) -> ChartResult {
    let chart = s.chart.clone();
    let v = center.value_at(&chart, i);
    let unit = &Polynomial::var(&chart, i) - &Polynomial::constant(&chart, v);
    let map = ChartMap {
        parent: chart.clone(),
        child: chart.clone(),
        images: (0..chart.dim()).map(|k| Polynomial::var(&chart, k)).collect(),
        chart_coord: chart.name(i).to_string(),
        exceptional: None,
        center: center.clone(),
    };
    let mut scene = s.clone();
    scene.units.push(unit);
    scene.probes = s.probes.iter().filter(|p| scene.in_chart(p)).cloned().collect();
    ChartResult {
        map,
        scene,
        dropped_x: Vec::new(),
    }
}

fn transform_in_chart(s: &Scene, map: ChartMap, origin: &str) -> Result<ChartResult> {
    let child = map.child.clone();
    let c = map.exceptional.expect("blow-up chart");
    let xc = s.x_coords();
    let center = &map.center;
    // hyperplanes whose transforms leave this chart or become units on it
    let gone = |name: &str| {
        name == map.chart_coord || center.value_of(name).is_some_and(|v| !v.is_zero())
    };
    let mut units: Vec<Polynomial> = Vec::new();
    for name in s.x.iter().chain(s.e.iter().map(|e| &e.name)) {
        if center.value_of(name).is_some_and(|v| !v.is_zero()) {
            let k = s.chart.index(name).expect("validated");
            units.push(map.images[k].clone());
        }
    }
    for u in &s.units {
        let (g, _) = strict_transform(u, &map);
        if !g.is_constant() {
            units.push(g);
        }
    }
    let mut new_pos: Vec<Option<usize>> = Vec::new();
    let mut x = Vec::new();
    let mut dropped_x = Vec::new();
    for (k, name) in s.x.iter().enumerate() {
        if xc[k] == c || gone(name) {
            new_pos.push(None);
            dropped_x.push(name.clone());
        } else {
            new_pos.push(Some(x.len()));
            x.push(name.clone());
        }
    }
    let mut d = Vec::new();
    for rec in &s.d {
        match rec.host {
            Host::Pair(i, j) => {
                if let (Some(a), Some(b)) = (new_pos[i], new_pos[j]) {
                    // (x_i, x_j) pulls back to (x_i', x_j') up to a power of u
                    d.push(DComponent {
                        host: Host::Pair(a, b),
                        factors: Vec::new(),
                        mult: rec.mult.clone(),
                        declared: None,
                    });
                }
            }
            Host::Single(h) => {
                let Some(nh) = new_pos[h] else { continue };
                let mut factors = Vec::new();
                for f in &rec.factors {
                    let g = f.set_zero(&[xc[h]]);
                    let (g2, _) = strict_transform(&g, &map);
                    if !g2.is_constant() {
                        factors.push(g2);
                    }
                }
                if !factors.is_empty() {
                    d.push(DComponent::single(nh, factors, rec.mult.clone()));
                }
            }
        }
    }
    let mut e: Vec<EComponent> = s.e.iter().filter(|comp| !gone(&comp.name)).cloned().collect();
    e.push(EComponent {
        name: child.name(c).to_string(),
        origin: origin.to_string(),
    });
    let mut scene = Scene::new(child, x);
    scene.d = d;
    scene.e = e;
    scene.units = units;
    let mut probes: BTreeSet<RationalPoint> = BTreeSet::new();
    for a in &s.probes {
        if let Some(b) = map.preimage(a) {
            probes.insert(b);
        }
    }
    probes.insert(vec![Coeff::zero(); scene.dim()]);
    scene.probes = probes
        .into_iter()
        .filter(|p| scene.on_x(p) && scene.in_chart(p))
        .collect();
    Ok(ChartResult { map, scene, dropped_x })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{rat, rat2};
    use crate::detector::is_semisnc_at;
    use crate::limits::Limits;
    use crate::scene::fixtures::example_4_8;

    fn chart(names: &[&str]) -> Chart {
        Chart::new(names).unwrap()
    }

    #[test]
    fn chart_maps() {
        let c = chart(&["x1", "x2", "x3"]);
        let maps = blow_up_chart(&c, &CenterSpec::new(&["x1", "x2"]).unwrap(), "e1").unwrap();
        assert_eq!(maps.len(), 2);
        let m = &maps[1];
        assert_eq!(m.child.names(), &["x1", "e1", "x3"]);
        let shown: Vec<String> = m.images.iter().map(|p| p.to_string()).collect();
        assert_eq!(shown, vec!["x1*e1", "e1", "x3"]);
        let f = Polynomial::parse(&c, "x1^2 - x2^2*x3").unwrap();
        let (g, d) = strict_transform(&f, m);
        assert_eq!(d, 2);
        assert_eq!(g, Polynomial::parse(&m.child, "x1^2 - x3").unwrap());
    }

    #[test]
    fn ideal_transforms() {
        let c = chart(&["x1", "x2", "y", "z"]);
        let maps = blow_up_chart(&c, &CenterSpec::new(&["x1", "x2", "z"]).unwrap(), "e1").unwrap();
        let zc = &maps[2];
        let i = Ideal::parse(&c, "x1, y").unwrap();
        let fast = strict_transform_ideal(&i, zc).unwrap();
        let slow = Ideal::from_polys(&zc.child, i.gens().iter().map(|g| zc.pull_back(g)).collect())
            .saturation(&Polynomial::var(&zc.child, 3))
            .unwrap();
        assert!(fast.equals(&slow).unwrap());
        assert!(fast.equals(&Ideal::parse(&zc.child, "x1, y").unwrap()).unwrap());

        let c2 = chart(&["x1", "x2"]);
        let m = &blow_up_chart(&c2, &CenterSpec::new(&["x1", "x2"]).unwrap(), "e1").unwrap()[1];
        let t = strict_transform_ideal(&Ideal::parse(&c2, "x1*x2").unwrap(), m).unwrap();
        assert!(t.equals(&Ideal::parse(&m.child, "x1").unwrap()).unwrap());
        assert!(strict_transform_ideal(&Ideal::unit(&c2), m).unwrap().is_unit().unwrap());
    }

    #[test]
    fn example_4_8_blowup() {
        let s = example_4_8();
        let center = CenterSpec::new(&["x1", "x2", "z"]).unwrap();
        let kids = transform_scene(&s, &center, "e1", "test").unwrap();
        assert_eq!(kids.len(), 3);
        let zc = &kids[2];
        assert_eq!(zc.scene.x, vec!["x1", "x2"]);
        assert_eq!(zc.scene.d[1].factors[0], Polynomial::parse(&zc.scene.chart, "x1 + y").unwrap());
        let lim = Limits::default();
        for k in &kids {
            for p in crate::scene::probe_points(&k.scene) {
                assert!(is_semisnc_at(&k.scene, &p, &lim).unwrap().is_semisnc(), "{p:?}");
            }
        }
        assert_eq!(kids[0].dropped_x, vec!["x1"]);
    }

    #[test]
    fn s3_y_chart() {
        let c = chart(&["x", "y", "z"]);
        let mut s = Scene::new(c, vec!["x".into(), "y".into()]);
        s.add_d("x", &["z"], rat(2)).unwrap();
        s.add_d("y", &["z"], rat(3)).unwrap();
        let kids = transform_scene(&s, &CenterSpec::new(&["x", "y", "z"]).unwrap(), "e1", "t").unwrap();
        let yc = &kids[1].scene;
        assert_eq!(yc.x, vec!["x"]);
        assert_eq!(yc.d.len(), 1);
        assert_eq!(yc.d[0].mult, rat(2));
        assert_eq!(yc.e.len(), 1);
    }

    #[test]
    fn admissibility_and_preimages() {
        let s = example_4_8();
        assert!(check_admissible(&CenterSpec::new(&["x1", "x2", "z"]).unwrap(), &s));
        assert!(!check_admissible(&CenterSpec::new(&["x1"]).unwrap(), &s));
        let m = &blow_up_chart(&s.chart, &CenterSpec::new(&["x1", "z"]).unwrap(), "e1").unwrap()[1];
        let b = m.preimage(&[rat(2), rat(0), rat(0), rat(4)]).unwrap();
        assert_eq!(b, vec![rat2(1, 2), rat(0), rat(0), rat(4)]);
        assert!(m.preimage(&[rat(2), rat(0), rat(0), rat(0)]).is_none());
    }

    #[test]
    fn translated_center_localizes() {
        let c = chart(&["x1", "x2", "y", "e1"]);
        let mut s = Scene::new(c.clone(), vec!["x1".into(), "x2".into()]);
        s.add_d("x1", &["y"], rat(1)).unwrap();
        s.add_d("x2", &["y"], rat(1)).unwrap();
        s.add_e("e1", "input");
        let center = CenterSpec::with_values(&[("x1", rat(0)), ("x2", rat(0)), ("e1", rat(-1))]).unwrap();
        assert_eq!(center.to_string(), "(e1 + 1, x1, x2)");
        assert!(center.contains_point(&c, &[rat(0), rat(0), rat(5), rat(-1)]));
        let kids = transform_scene(&s, &center, "e2", "test").unwrap();
        assert_eq!(kids.len(), 4);
        // the e1-chart: e1 = -1 + e2, x_i = e2*x_i
        let m = &kids[2].map;
        assert_eq!(m.chart_coord, "e1");
        assert_eq!(m.images[3].to_string(), "e2 - 1");
        for k in &kids[..3] {
            assert!(k.scene.e.iter().all(|e| e.name != "e1"));
            assert_eq!(k.scene.units.len(), 1);
        }
        let open = &kids[3];
        assert_eq!(open.map.exceptional, None);
        assert_eq!(open.scene.units, vec![Polynomial::parse(&c, "e1 + 1").unwrap()]);
        assert_eq!(open.scene.e, s.e);
        assert_eq!(open.map.preimage(&[rat(0), rat(0), rat(0), rat(-1)]), None);
        let b = kids[1].map.preimage(&[rat(2), rat(4), rat(0), rat(0)]).unwrap();
        assert_eq!(b, vec![rat2(1, 2), rat(4), rat(0), rat2(1, 4)]);
    }
}
