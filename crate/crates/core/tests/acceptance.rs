//! End-to-end acceptance checks, one line per criterion.

use std::io::Write;
use std::path::Path;

use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;

use semisnc::algebra::{origin, rat, Chart, Coeff, Ideal, Polynomial, RationalPoint};
use semisnc::blowup::{blow_up_chart, strict_transform, strict_transform_ideal, transform_scene, CenterSpec};
use semisnc::detector::{compute_j, is_semisnc_at, Answer};
use semisnc::driver::{resolve, BlowupTree, Phase};
use semisnc::scene::{io, stratum_at, Scene};
use semisnc::staircase::{brute_force_hs, compare_hs, diagram, hilbert_at, hpq, hpq_staircase, HSComparison};
use semisnc::Limits;

type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

const FIXTURES: &[&str] = &[
    "example4_8",
    "example4_6",
    "s3",
    "s6",
    "s8",
    "tangency",
    "normal_form",
    "singular_locus",
    "two_singular_loci",
];

fn fixture(name: &str) -> Scene {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.json"));
    io::from_json(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn lim() -> Limits {
    Limits::default()
}

fn e<T, E: std::fmt::Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|x| x.to_string())
}

fn ideal(chart: &Chart, text: &str) -> Ideal {
    Ideal::parse(chart, text).unwrap()
}

/// I ⊂ J near a.
fn locally_contained(i: &Ideal, j: &Ideal, a: &[Coeff]) -> Result<bool, String> {
    Ok(e(j.quotient(i))?.contains_unit_at(a))
}

fn locally_equal(i: &Ideal, j: &Ideal, a: &[Coeff]) -> Result<bool, String> {
    Ok(locally_contained(i, j, a)? && locally_contained(j, i, a)?)
}

fn pick<S: Strategy>(runner: &mut TestRunner, s: S) -> S::Value {
    s.new_tree(runner).unwrap().current()
}

fn center_strings(t: &BlowupTree) -> Vec<String> {
    t.centers().iter().map(|(p, c)| format!("{p} {c}")).collect()
}

fn example_4_8() -> Check {
    let s = fixture("example4_8");
    let o = origin(4);
    let v = e(is_semisnc_at(&s, &o, &lim()))?;
    ensure!(v.answer == Answer::NotSemiSnc, "origin verdict {}", v.answer.as_str());
    let j = e(compute_j(&s, &o, &lim()))?;
    ensure!(e(j.equals(&ideal(&s.chart, "x1, x2, z")))?, "J = {j}");
    let supp = ideal(&s.chart, "x1*x2, x2*y, x1 + y*z");
    let (_, stair) = e(diagram(&supp, &o, &lim()))?;
    let mut verts = stair.describe(&s.chart);
    verts.sort();
    ensure!(verts == ["x1", "x2*y"], "vertices {verts:?}");
    let h = stair.hilbert();
    let target = e(hpq(2, 1, 4))?;
    ensure!(h.values(20) == target.values(20), "H differs for k ≤ 20");
    ensure!(h.tail_polynomial() == target.tail_polynomial(), "tails differ");
    ensure!(compare_hs(&h, &target) == HSComparison::Equal, "compare_hs not equal");
    let (t, c) = e(resolve(&s, &lim()))?;
    ensure!(t.blowups == 1, "{} blow-ups", t.blowups);
    ensure!(center_strings(&t) == ["case_B.clean_J (x1, x2, z)"], "centers {:?}", center_strings(&t));
    ensure!(c.all_certified, "not all leaves certified");
    Ok(())
}

fn example_4_6() -> Check {
    let chart = Chart::new(&["x1", "x2", "y", "z"]).unwrap();
    let i = e(ideal(&chart, "x1, y").product(&ideal(&chart, "x2, z")))?;
    let o = origin(4);
    let h = e(hilbert_at(&i, &o, &lim()))?;
    let target = e(hpq(2, 1, 4))?;
    let cmp = compare_hs(&h, &target);
    ensure!(cmp != HSComparison::Equal, "compare_hs is equal");
    ensure!(h.value_u64(1) == 5 && target.value_u64(1) == 4, "H(1) = {} vs {}", h.value_u64(1), target.value_u64(1));
    for k in 0..=6 {
        let b = e(brute_force_hs(&i, &o, k, &lim()))?;
        ensure!(b == h.value_u64(k), "k = {k}: oracle {b}, staircase {}", h.value_u64(k));
    }
    Ok(())
}

fn strict_transform_example() -> Check {
    let c = Chart::new(&["y1", "y2", "y3"]).unwrap();
    let maps = e(blow_up_chart(&c, &e(CenterSpec::new(&["y1", "y2"]))?, "y2"))?;
    let m = maps.iter().find(|m| m.chart_coord == "y2").ok_or("no y2-chart")?;
    let f = Polynomial::parse(&c, "y1^2 - y2^2*y3").unwrap();
    let (g, d) = strict_transform(&f, m);
    let expected = e(Polynomial::parse(&m.child, "y1^2 - y3"))?;
    ensure!(d == 2 && g == expected, "got {g} with d = {d}");
    Ok(())
}

fn quotient_formulas() -> Check {
    let mut runner = TestRunner::deterministic();
    let consts = [rat(1), rat(2), rat(-3), Coeff::new(1.into(), 2.into())];
    for case in 0..30 {
        // (x_p, x_1⋯x_{p-1}, g2) for the normal form with F_p = P·g1 + Y·g2
        let p = pick(&mut runner, 2usize..=3);
        let q = pick(&mut runner, 1usize..=3);
        let mut names: Vec<String> = (1..=p).map(|i| format!("x{i}")).collect();
        names.extend((1..=q).map(|j| format!("y{j}")));
        names.extend(["w1".to_string(), "w2".to_string()]);
        let chart = Chart::new(&names).unwrap();
        let c = consts[pick(&mut runner, 0usize..consts.len())].clone();
        let g2 = match pick(&mut runner, 0usize..3) {
            0 => format!("{c}"),
            1 => "w1".to_string(),
            _ => format!("w1 + {c}"),
        };
        let g1 = ["0", "1", "w2", "y1", "w1*w2"][pick(&mut runner, 0usize..5)];
        let pp: Vec<String> = (1..p).map(|i| format!("x{i}")).collect();
        let yy: Vec<String> = (1..=q).map(|j| format!("y{j}")).collect();
        let (pm, ym) = (pp.join("*"), yy.join("*"));
        let f = format!("{pm}*({g1}) + {ym}*({g2})");
        let mut s = Scene::new(chart.clone(), names[..p].to_vec());
        let yrefs: Vec<&str> = yy.iter().map(|s| s.as_str()).collect();
        for i in 1..p {
            e(s.add_d(&format!("x{i}"), &yrefs, rat(1)))?;
        }
        e(s.add_d(&format!("x{p}"), &[f.as_str()], rat(1)))?;
        let o = origin(chart.dim());
        let closed = ideal(&chart, &format!("x{p}, {pm}, {g2}"));
        // N : Q straight from the definition
        let n = ideal(&chart, &format!("x{p}, {f}, {pm}"));
        let earlier: Vec<Ideal> = (1..p).map(|i| ideal(&chart, &format!("x{i}, {ym}"))).collect();
        let qi = e(e(Ideal::intersection_all(&earlier))?.sum(&ideal(&chart, &format!("x{p}"))))?;
        let generic = e(n.quotient(&qi))?;
        ensure!(locally_equal(&generic, &closed, &o)?, "case {case}: {generic} vs {closed}");
        let lib = e(compute_j(&s, &o, &lim()))?;
        ensure!(locally_equal(&lib, &closed, &o)?, "case {case}: library J {lib} vs {closed}");

        // [(x1, x2, f) : (y1⋯yq)] = (x1, x2, g3)
        let g3 = match pick(&mut runner, 0usize..3) {
            0 => format!("{c}"),
            1 => "w1".to_string(),
            _ => format!("w1 + {c}"),
        };
        let g0 = ["0", "1", "w2", "y1"][pick(&mut runner, 0usize..4)];
        let g1 = ["0", "w1", "w2^2", "y1*w2"][pick(&mut runner, 0usize..4)];
        let f = format!("x1*({g0}) + x2*({g1}) + {ym}*({g3})");
        let lhs = e(ideal(&chart, &format!("x1, x2, {f}")).quotient(&ideal(&chart, &ym)))?;
        let rhs = ideal(&chart, &format!("x1, x2, {g3}"));
        ensure!(locally_equal(&lhs, &rhs, &o)?, "case {case}: {lhs} vs {rhs}");
    }
    Ok(())
}

fn random_monomial(runner: &mut TestRunner, names: &[String], max_deg: usize) -> String {
    let deg = pick(runner, 1..=max_deg);
    let vars: Vec<&str> = (0..deg).map(|_| names[pick(runner, 0..names.len())].as_str()).collect();
    vars.join("*")
}

fn hilbert_oracle() -> Check {
    let mut runner = TestRunner::deterministic();
    for case in 0..50 {
        let n = pick(&mut runner, 1usize..=4);
        let names: Vec<String> = ["a", "b", "c", "d"][..n].iter().map(|s| s.to_string()).collect();
        let chart = Chart::new(&names).unwrap();
        let mut gens: Vec<String> = (0..pick(&mut runner, 1usize..=3))
            .map(|_| random_monomial(&mut runner, &names, 3))
            .collect();
        for _ in 0..pick(&mut runner, 0usize..=2) {
            let c = pick(&mut runner, -3i64..=3);
            let c = if c == 0 { 1 } else { c };
            let m1 = random_monomial(&mut runner, &names, 3);
            let m2 = random_monomial(&mut runner, &names, 3);
            if Polynomial::parse(&chart, &format!("{m1} + {c}*{m2}")).unwrap().is_zero() {
                continue;
            }
            gens.push(format!("{m1} + {c}*{m2}"));
        }
        let i = ideal(&chart, &gens.join(", "));
        let o = origin(n);
        let h = e(hilbert_at(&i, &o, &lim()))?;
        for k in 0..=6 {
            let b = e(brute_force_hs(&i, &o, k, &lim()))?;
            ensure!(b == h.value_u64(k), "case {case} ({i}), k = {k}: oracle {b}, staircase {}", h.value_u64(k));
        }
    }
    Ok(())
}

fn hpq_vertices() -> Check {
    for p in 1..=4usize {
        for q in 1..=4usize {
            let s = e(hpq_staircase(p, q, p + q))?;
            let mut degs: Vec<u32> = s.vertices().iter().map(|v| v.degree()).collect();
            degs.sort();
            let mut want = vec![p as u32, q as u32];
            want.sort();
            ensure!(degs == want, "p = {p}, q = {q}: vertex degrees {degs:?}");
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug)]
enum Branch {
    NotMember,
    HighOrder,
    ManyY,
    Equal,
}

/// I_D = (x1⋯x_{p-1}, y1⋯y_r) ∩ (x_p, f) as a scene plus its support ideal.
fn hs_instance(runner: &mut TestRunner, branch: Branch) -> Result<(Scene, Ideal, usize, usize), String> {
    let p = pick(runner, 2usize..=3);
    let q = pick(runner, 1usize..=2);
    let r = match branch {
        Branch::ManyY => q + pick(runner, 1usize..=2),
        _ => q,
    };
    let mut names: Vec<String> = (1..=p).map(|i| format!("x{i}")).collect();
    names.extend((1..=r).map(|j| format!("y{j}")));
    names.extend(["w1".to_string(), "w2".to_string()]);
    let chart = Chart::new(&names).unwrap();
    let pm: String = (1..p).map(|i| format!("x{i}")).collect::<Vec<_>>().join("*");
    let ts = ["0", "1", "2", "w1", "w2", "-1"];
    let mut factors: Vec<String> = (1..=q)
        .map(|j| format!("y{j} + {pm}*({})", ts[pick(runner, 0..ts.len())]))
        .collect();
    match branch {
        Branch::NotMember => {
            let c = pick(runner, 1i64..=3);
            factors[0] = format!("w1 + {c}*w2 + {pm}*({})", ts[pick(runner, 0..ts.len())]);
        }
        Branch::HighOrder => {
            let extra = ["w1", "w1 + w2", "w2 + y1", "w1 - 2*w2"][pick(runner, 0usize..4)];
            factors.push(extra.to_string());
        }
        Branch::ManyY | Branch::Equal => {}
    }
    let mut s = Scene::new(chart.clone(), names[..p].to_vec());
    let ys: Vec<String> = (1..=r).map(|j| format!("y{j}")).collect();
    let yrefs: Vec<&str> = ys.iter().map(|s| s.as_str()).collect();
    for i in 1..p {
        e(s.add_d(&format!("x{i}"), &yrefs, rat(1)))?;
    }
    let frefs: Vec<&str> = factors.iter().map(|s| s.as_str()).collect();
    e(s.add_d(&format!("x{p}"), &frefs, rat(1)))?;
    let f = factors.iter().map(|t| format!("({t})")).collect::<Vec<_>>().join("*");
    let a = ideal(&chart, &format!("{pm}, {}", ys.join("*")));
    let b = ideal(&chart, &format!("x{p}, {f}"));
    let id = e(a.intersection(&b))?;
    Ok((s, id, p, q))
}

fn hilbert_trichotomy() -> Check {
    let mut runner = TestRunner::deterministic();
    for branch in [Branch::NotMember, Branch::HighOrder, Branch::ManyY, Branch::Equal] {
        for case in 0..20 {
            let (s, id, p, q) = hs_instance(&mut runner, branch)?;
            let o = origin(s.dim());
            let label = e(stratum_at(&s, &o))?;
            ensure!((label.p, label.q) == (p, q), "{branch:?} case {case}: stratum ({}, {})", label.p, label.q);
            let h = e(hilbert_at(&id, &o, &lim()))?;
            let cmp = compare_hs(&h, &e(hpq(p, q, s.dim()))?);
            let ok = match branch {
                Branch::Equal => cmp == HSComparison::Equal,
                _ => matches!(cmp, HSComparison::Greater | HSComparison::Incomparable),
            };
            ensure!(ok, "{branch:?} case {case}: {id} compares {cmp}");
        }
    }
    Ok(())
}

fn cleaning_descent() -> Check {
    let (t, c) = e(resolve(&fixture("s6"), &lim()))?;
    let cleans: Vec<_> = t
        .root
        .nodes()
        .into_iter()
        .filter(|n| n.phase == Some(Phase::CaseBCleanJ))
        .collect();
    ensure!(cleans.len() == 2 && t.blowups == 2, "{} cleaning rounds, {} blow-ups", cleans.len(), t.blowups);
    let exps: Vec<u64> = cleans
        .iter()
        .map(|n| n.measure.as_ref().unwrap()["exponent"][0][1].as_u64().unwrap())
        .collect();
    ensure!(exps.windows(2).all(|w| w[1] < w[0]), "exponents {exps:?}");
    for leaf in t.leaves() {
        let s = &leaf.scene;
        for a in s.probes.iter().filter(|a| s.x_through(a).len() == 2) {
            let j = e(compute_j(s, a, &lim()))?;
            ensure!(j.contains_unit_at(a), "J = {j} at a leaf");
        }
    }
    ensure!(c.all_certified, "not all leaves certified");
    Ok(())
}

fn case_a_s8() -> Check {
    let (t, c) = e(resolve(&fixture("s8"), &lim()))?;
    let (phase, center) = t.centers()[0];
    ensure!(phase == Phase::CaseAStep2, "first phase {phase}");
    ensure!(center.to_string() == "(x1, x2, x3, y1, y2)", "first center {center}");
    for edge in &t.root.children {
        let exc = edge.map.exceptional.ok_or("localized first chart")?;
        let s = edge.node.scene.reduced();
        for a in s.probes.iter().filter(|a| num_traits::Zero::is_zero(&a[exc])) {
            let l = e(stratum_at(&s, a))?;
            ensure!(l.p <= 3 && l.q <= 2 && (l.p, l.q) != (3, 2), "child stratum ({}, {})", l.p, l.q);
        }
    }
    ensure!(c.all_certified, "{} of {} leaves certified", c.certified_leaves, c.leaves);
    Ok(())
}

fn step4_s3() -> Check {
    let s = fixture("s3");
    let (t, c) = e(resolve(&s, &lim()))?;
    ensure!(center_strings(&t) == ["step4 (x, y, z)"], "centers {:?}", center_strings(&t));
    ensure!(c.all_certified, "not all leaves certified");
    let before = semisnc::detector::iota(&s, &origin(3));
    for edge in &t.root.children {
        let exc = edge.map.exceptional.ok_or("localized chart")?;
        let cs = &edge.node.scene;
        for a in cs.probes.iter().filter(|a| num_traits::Zero::is_zero(&a[exc])) {
            let after = semisnc::detector::iota(cs, a);
            ensure!(after.0 <= before.0 && after.1 <= before.1 && after != before, "ι {after:?} vs {before:?}");
        }
    }
    Ok(())
}

/// Points of the child lying on both surviving components.
fn on_both(s: &Scene) -> Vec<RationalPoint> {
    s.probes.iter().filter(|a| s.x_through(a).len() == 2).cloned().collect()
}

fn j_inclusion() -> Check {
    let mut checked = 0;
    for (name, center) in [("example4_8", vec!["x1", "x2", "z"]), ("s6", vec!["u1", "x1", "x2"])] {
        let s = fixture(name);
        let o = origin(s.dim());
        let j = e(compute_j(&s, &o, &lim()))?;
        let kids = e(transform_scene(&s, &e(CenterSpec::new(&center))?, "e1", "test"))?;
        for k in kids.iter().filter(|k| k.scene.x.len() == 2) {
            let jt = e(strict_transform_ideal(&j, &k.map))?;
            for a in on_both(&k.scene) {
                let jc = e(compute_j(&k.scene, &a, &lim()))?;
                ensure!(locally_contained(&jc, &jt, &a)?, "{name}: J' = {jc} not in {jt}");
                checked += 1;
            }
        }
    }
    ensure!(checked > 0, "no points on both components");
    Ok(())
}

fn hygiene() -> Check {
    for name in FIXTURES {
        let (t, c) = e(resolve(&fixture(name), &lim()))?;
        for n in t.root.nodes() {
            if let Some(center) = &n.center {
                for v in &n.verdicts {
                    ensure!(
                        !(v.is_semisnc() && center.contains_point(&n.scene.chart, &v.point)),
                        "{name}: center {center} contains a semi-snc point"
                    );
                }
            }
        }
        ensure!(c.all_certified, "{name}: not all leaves certified");
    }
    let (t, c) = e(resolve(&fixture("normal_form"), &lim()))?;
    ensure!(t.blowups == 0 && c.all_certified, "semi-snc scene needed {} blow-ups", t.blowups);
    Ok(())
}

fn relabeling() -> Check {
    for name in FIXTURES {
        let s = fixture(name);
        // reverse the names of the non-exceptional coordinates, add a spare one
        let movable: Vec<usize> = (0..s.dim())
            .filter(|&i| !s.e.iter().any(|c| c.name == s.chart.name(i)))
            .collect();
        let mut names: Vec<String> = s.chart.names().to_vec();
        for (k, &i) in movable.iter().enumerate() {
            names[i] = format!("v{}", movable.len() - k);
        }
        let r = e(s.relabeled(&names, &["spare".to_string()]))?;
        let rename = |c: &str| match s.chart.index(c) {
            Some(i) => names[i].clone(),
            None => c.to_string(),
        };
        let (t1, _) = e(resolve(&s, &lim()))?;
        let (t2, c2) = e(resolve(&r, &lim()))?;
        let a: Vec<(Phase, Vec<(String, Coeff)>)> = t1
            .centers()
            .iter()
            .map(|(p, c)| {
                let mut v: Vec<(String, Coeff)> =
                    c.coords().iter().map(|n| (rename(n), c.value_of(n).unwrap().clone())).collect();
                v.sort();
                (*p, v)
            })
            .collect();
        let b: Vec<(Phase, Vec<(String, Coeff)>)> = t2
            .centers()
            .iter()
            .map(|(p, c)| (*p, c.coords().iter().map(|n| (n.clone(), c.value_of(n).unwrap().clone())).collect()))
            .collect();
        ensure!(a == b, "{name}: centers differ after relabeling");
        ensure!(c2.all_certified, "{name}: relabeled run not certified");
    }
    Ok(())
}

fn determinism() -> Check {
    for name in FIXTURES {
        let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(format!("{name}.json"));
        let argv = ["semisnc", "resolve", path.to_str().unwrap(), "--format", "json", "--trace"];
        let a = semisnc::report::run(argv);
        let b = semisnc::report::run(argv);
        ensure!(a.code == 0, "{name}: exit {}", a.code);
        ensure!(a == b, "{name}: reports differ");
    }
    Ok(())
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Check); 14] = [
        ("example 4.8 pipeline", example_4_8),
        ("example 4.6 Hilbert-Samuel anomaly", example_4_6),
        ("strict transform worked example", strict_transform_example),
        ("quotient closed forms", quotient_formulas),
        ("Hilbert-Samuel oracle", hilbert_oracle),
        ("hpq staircases", hpq_vertices),
        ("Hilbert-Samuel trichotomy", hilbert_trichotomy),
        ("cleaning descent", cleaning_descent),
        ("case A on S8", case_a_s8),
        ("step 4 on S3", step4_s3),
        ("J inclusion under blow-up", j_inclusion),
        ("center hygiene and identity over U", hygiene),
        ("relabeling", relabeling),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    let mut out = std::io::stdout().lock();
    for (k, (name, check)) in criteria.iter().enumerate() {
        let line = match check() {
            Ok(()) => format!("acceptance {:>2} PASS {name}", k + 1),
            Err(why) => {
                failed.push(k + 1);
                format!("acceptance {:>2} FAIL {name}: {why}", k + 1)
            }
        };
        writeln!(out, "{line}").unwrap();
    }
    assert!(failed.is_empty(), "failed criteria {failed:?}");
}
