use super::*;
use num_traits::Zero;
use crate::detector::overlay::iota;
use crate::scene::io::from_json;
use crate::scene::stratum_at;

fn fixture(name: &str) -> Scene {
    let text = match name {
        "example4_8" => include_str!("../../fixtures/example4_8.json"),
        "example4_6" => include_str!("../../fixtures/example4_6.json"),
        "s3" => include_str!("../../fixtures/s3.json"),
        "s6" => include_str!("../../fixtures/s6.json"),
        "s8" => include_str!("../../fixtures/s8.json"),
        "tangency" => include_str!("../../fixtures/tangency.json"),
        "normal_form" => include_str!("../../fixtures/normal_form.json"),
        "singular_locus" => include_str!("../../fixtures/singular_locus.json"),
        "two_singular_loci" => include_str!("../../fixtures/two_singular_loci.json"),
        _ => panic!("no fixture {name}"),
    };
    from_json(text).unwrap()
}

fn run(s: &Scene) -> (BlowupTree, Certification) {
    resolve(s, &Limits::default()).unwrap()
}

fn centers(t: &BlowupTree) -> Vec<String> {
    t.centers().iter().map(|(p, c)| format!("{p} {c}")).collect()
}

fn hygienic(t: &BlowupTree) -> bool {
    t.root.nodes().iter().all(|n| match &n.center {
        Some(c) => n.verdicts.iter().all(|v| !(v.is_semisnc() && c.contains_point(&n.scene.chart, &v.point))),
        None => true,
    })
}

#[test]
fn example_4_8_one_blowup() {
    let (t, c) = run(&fixture("example4_8"));
    assert_eq!(centers(&t), vec!["case_B.clean_J (x1, x2, z)"]);
    assert_eq!(t.blowups, 1);
    assert_eq!(t.depth(), 1);
    assert_eq!(c.leaves, 3);
    assert!(c.all_certified);
    assert!(hygienic(&t));
}

#[test]
fn example_4_6_cleans_then_reduces() {
    let (t, c) = run(&fixture("example4_6"));
    assert_eq!(
        centers(&t),
        vec!["case_B.clean_J (x1, x2, z)", "case_B.reduce_r (x1, x2, y)"]
    );
    assert!(c.all_certified);
}

#[test]
fn semisnc_scene_is_untouched() {
    let (t, c) = run(&fixture("normal_form"));
    assert_eq!(t.blowups, 0);
    assert_eq!(t.depth(), 0);
    assert!(c.all_certified);
    assert!(c.points_checked >= 2);
}

#[test]
fn multiplicities_fixed_in_one_blowup() {
    let s = fixture("s3");
    let (t, c) = run(&s);
    assert_eq!(centers(&t), vec!["step4 (x, y, z)"]);
    assert!(c.all_certified);
    let before = iota(&s, &crate::algebra::origin(3));
    assert_eq!(before, (2, 1));
    for e in &t.root.children {
        let exc = e.map.exceptional.unwrap();
        for p in e.node.scene.probes.iter().filter(|p| p[exc].is_zero()) {
            let after = iota(&e.node.scene, p);
            assert!(after.0 <= before.0 && after.1 <= before.1 && after != before);
        }
    }
}

#[test]
fn cleaning_takes_two_rounds() {
    let (t, c) = run(&fixture("s6"));
    assert_eq!(
        centers(&t),
        vec!["case_B.clean_J (u1, x1, x2)", "case_B.clean_J (e1, x1, x2)"]
    );
    let exps: Vec<Value> = t.root.nodes().iter().filter_map(|n| n.measure.clone()).map(|m| m["exponent"].clone()).collect();
    assert_eq!(exps, vec![json!([["u1", 2]]), json!([["e1", 1]])]);
    assert!(c.all_certified);
}

#[test]
fn case_a_lowers_strata() {
    let (t, c) = run(&fixture("s8"));
    let (phase, center) = t.centers()[0];
    assert_eq!(phase, Phase::CaseAStep2);
    assert_eq!(center.to_string(), "(x1, x2, x3, y1, y2)");
    for e in &t.root.children {
        let exc = e.map.exceptional.unwrap();
        let s = e.node.scene.reduced();
        for p in s.probes.iter().filter(|p| p[exc].is_zero()) {
            let l = stratum_at(&s, p).unwrap();
            assert!(l.p <= 3 && l.q <= 2 && (l.p, l.q) != (3, 2), "{l:?}");
        }
    }
    assert!(c.all_certified);
    assert!(t.diagnostics().is_empty());
    assert!(hygienic(&t));
}

#[test]
fn tangency_is_separated() {
    let (t, c) = run(&fixture("tangency"));
    assert_eq!(centers(&t)[0], "case_C (x1, y1, y2)");
    assert!(c.all_certified);
}

#[test]
fn singular_locus_records_are_blown_away() {
    let (t, c) = run(&fixture("singular_locus"));
    assert_eq!(centers(&t)[0], "step2 (x1, x2)");
    for n in t.root.children.iter().map(|e| &e.node) {
        assert!(!n.scene.has_pair_hosts());
    }
    assert!(c.all_certified);

    let (t, c) = run(&fixture("two_singular_loci"));
    let cs = centers(&t);
    assert_eq!(cs[0], "step2 (x1, x2, x3)");
    assert!(cs.iter().all(|c| c.starts_with("step2")));
    assert!(t.leaves().iter().all(|n| !n.scene.has_pair_hosts()));
    assert!(c.all_certified);
}

#[test]
fn every_fixture_is_hygienic_and_deterministic() {
    for name in ["example4_8", "example4_6", "s3", "s6", "s8", "tangency", "normal_form", "singular_locus"] {
        let s = fixture(name);
        let (a, _) = run(&s);
        let (b, _) = run(&s);
        assert!(hygienic(&a), "{name}");
        assert_eq!(a.root.to_json(true).to_string(), b.root.to_json(true).to_string(), "{name}");
    }
}

#[test]
fn caps_are_reported() {
    let lim = Limits {
        max_blowups: 1,
        ..Limits::default()
    };
    let (t, c) = resolve(&fixture("s6"), &lim).unwrap();
    assert_eq!(t.blowups, 1);
    assert!(!c.all_certified);
    assert!(t.diagnostics().iter().all(|d| d.reason == Reason::CapExceeded));
}
