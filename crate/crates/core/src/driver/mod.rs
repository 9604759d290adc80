//! The resolution loop: step 2, the strata loop (cases A, B, C), step 4.

pub mod centers;

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;
use serde_json::{json, Value};

use crate::algebra::{format_point, RationalPoint};
use crate::blowup::{transform_scene, CenterSpec, ChartMap};
use crate::detector::{overlay, verdicts, Verdict};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::scene::{
    io, k_set, monotone_closure, probe_points, stratum_at, validate_scene, validate::has_errors, MonotoneSet,
    Scene, StratumLabel,
};

use centers::{view, Choice};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Phase {
    Step2,
    CaseAStep1,
    CaseAStep2,
    CaseBCleanJ,
    CaseBReduceR,
    CaseC,
    Step4,
}

impl Phase {
    pub fn as_str(&self) -> &'static str {
        match self {
            Phase::Step2 => "step2",
            Phase::CaseAStep1 => "case_A.step1",
            Phase::CaseAStep2 => "case_A.step2",
            Phase::CaseBCleanJ => "case_B.clean_J",
            Phase::CaseBReduceR => "case_B.reduce_r",
            Phase::CaseC => "case_C",
            Phase::Step4 => "step4",
        }
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reason {
    NeedsGeneralLogResolution,
    NeedsGeneralDesingInvariant,
    CapExceeded,
    FactorizationNeeded,
}

impl Reason {
    pub fn as_str(&self) -> &'static str {
        match self {
            Reason::NeedsGeneralLogResolution => "needs-general-log-resolution",
            Reason::NeedsGeneralDesingInvariant => "needs-general-desing-invariant",
            Reason::CapExceeded => "cap-exceeded",
            Reason::FactorizationNeeded => "factorization-needed",
        }
    }
}

/// Why the driver stopped on a node instead of choosing a center.
#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostic {
    pub phase: Option<Phase>,
    pub reason: Reason,
    pub location: Option<RationalPoint>,
    pub message: String,
}

impl Diagnostic {
    pub fn to_json(&self) -> Value {
        json!({
            "phase": self.phase.map(|p| p.as_str()),
            "reason": self.reason.as_str(),
            "location": self.location.as_ref().map(|p| format_point(p)),
            "message": self.message,
        })
    }
}

/// What a node carries down to its charts.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DriverState {
    /// Number of leading X components being worked on (0 before step 3).
    pub components: usize,
    /// Strata already known to be semi-snc for that view.
    pub done: MonotoneSet,
}

#[derive(Clone, Debug)]
pub struct Node {
    pub scene: Scene,
    pub depth: usize,
    pub state: DriverState,
    pub center: Option<CenterSpec>,
    pub phase: Option<Phase>,
    pub measure: Option<Value>,
    pub children: Vec<Edge>,
    pub dropped_x: Vec<String>,
    /// Final verdicts at the probe points (leaves only).
    pub verdicts: Vec<Verdict>,
    pub diagnostic: Option<Diagnostic>,
}

#[derive(Clone, Debug)]
pub struct Edge {
    pub map: ChartMap,
    pub node: Node,
}

impl Node {
    fn new(scene: Scene, depth: usize, state: DriverState) -> Node {
        Node {
            scene,
            depth,
            state,
            center: None,
            phase: None,
            measure: None,
            children: Vec::new(),
            dropped_x: Vec::new(),
            verdicts: Vec::new(),
            diagnostic: None,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    pub fn certified(&self) -> bool {
        self.is_leaf() && self.diagnostic.is_none() && self.verdicts.iter().all(|v| v.is_semisnc())
    }

    pub fn leaves(&self) -> Vec<&Node> {
        if self.is_leaf() {
            return vec![self];
        }
        self.children.iter().flat_map(|e| e.node.leaves()).collect()
    }

    /// Pre-order walk.
    pub fn nodes(&self) -> Vec<&Node> {
        let mut out = vec![self];
        for e in &self.children {
            out.extend(e.node.nodes());
        }
        out
    }

    pub fn to_json(&self, with_scenes: bool) -> Value {
        let mut v = json!({ "depth": self.depth });
        if with_scenes || self.is_leaf() {
            v["scene"] = io::to_value(&self.scene);
        }
        if let Some(c) = &self.center {
            v["center"] = json!(c.generator_strings());
            v["phase"] = json!(self.phase.map(|p| p.as_str()));
            v["measure"] = self.measure.clone().unwrap_or(Value::Null);
        }
        if !self.dropped_x.is_empty() {
            v["dropped_x"] = json!(self.dropped_x);
        }
        if let Some(d) = &self.diagnostic {
            v["diagnostic"] = d.to_json();
        }
        if self.is_leaf() {
            v["certified"] = json!(self.certified());
            v["verdicts"] = json!(self.verdicts.iter().map(|x| x.to_json()).collect::<Vec<_>>());
        } else {
            v["children"] = json!(self
                .children
                .iter()
                .map(|e| json!({ "map": e.map.to_json(), "node": e.node.to_json(with_scenes) }))
                .collect::<Vec<_>>());
        }
        v
    }
}

#[derive(Clone, Debug)]
pub struct BlowupTree {
    pub root: Node,
    pub blowups: usize,
}

impl BlowupTree {
    pub fn depth(&self) -> usize {
        self.root.nodes().iter().map(|n| n.depth).max().unwrap_or(0)
    }

    pub fn leaves(&self) -> Vec<&Node> {
        self.root.leaves()
    }

    /// Centers in pre-order, with their phase.
    pub fn centers(&self) -> Vec<(Phase, &CenterSpec)> {
        self.root
            .nodes()
            .into_iter()
            .filter_map(|n| Some((n.phase?, n.center.as_ref()?)))
            .collect()
    }

    pub fn diagnostics(&self) -> Vec<&Diagnostic> {
        self.root.nodes().into_iter().filter_map(|n| n.diagnostic.as_ref()).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certification {
    pub leaves: usize,
    pub certified_leaves: usize,
    pub points_checked: usize,
    pub all_certified: bool,
}

impl Certification {
    fn of(tree: &BlowupTree) -> Certification {
        let leaves = tree.leaves();
        let certified = leaves.iter().filter(|n| n.certified()).count();
        Certification {
            leaves: leaves.len(),
            certified_leaves: certified,
            points_checked: leaves.iter().map(|n| n.verdicts.len()).sum(),
            all_certified: certified == leaves.len(),
        }
    }
}

enum Plan {
    Leaf(Vec<Verdict>),
    Blowup(Choice, DriverState, Vec<Verdict>),
    Stuck(Diagnostic, Vec<Verdict>),
}

struct Resolver<'a> {
    lim: &'a Limits,
    blowups: usize,
    next_exceptional: usize,
}

/// Runs the whole algorithm; the tree is returned even when a node gets stuck.
pub fn resolve(s: &Scene, lim: &Limits) -> Result<(BlowupTree, Certification)> {
    let violations = validate_scene(s, false);
    if has_errors(&violations) {
        let msgs: Vec<String> = violations.iter().map(|v| format!("{}: {}", v.kind, v.message)).collect();
        return Err(Error::Invalid(msgs.join("; ")));
    }
    let first_free = s
        .chart
        .names()
        .iter()
        .filter_map(|n| n.strip_prefix('e').and_then(|k| k.parse::<usize>().ok()))
        .max()
        .map_or(1, |k| k + 1);
    let mut r = Resolver {
        lim,
        blowups: 0,
        next_exceptional: first_free,
    };
    let mut root = Node::new(s.clone(), 0, DriverState::default());
    r.grow(&mut root)?;
    let tree = BlowupTree {
        root,
        blowups: r.blowups,
    };
    let cert = Certification::of(&tree);
    Ok((tree, cert))
}

impl Resolver<'_> {
    fn grow(&mut self, node: &mut Node) -> Result<()> {
        match self.plan(&node.scene, &node.state)? {
            Plan::Leaf(v) => node.verdicts = v,
            Plan::Stuck(d, v) => {
                node.diagnostic = Some(d);
                node.verdicts = v;
            }
            Plan::Blowup(choice, state, full) => {
                node.verdicts = full;
                if self.blowups >= self.lim.max_blowups || node.depth >= self.lim.max_depth {
                    node.diagnostic = Some(Diagnostic {
                        phase: Some(choice.phase),
                        reason: Reason::CapExceeded,
                        location: Some(choice.point.clone()),
                        message: format!(
                            "blow-up budget exhausted ({} blow-ups, depth {})",
                            self.blowups, node.depth
                        ),
                    });
                    return Ok(());
                }
                self.blowups += 1;
                let name = format!("e{}", self.next_exceptional);
                self.next_exceptional += 1;
                let origin = format!("{} {}", choice.phase, choice.center);
                let kids = transform_scene(&node.scene, &choice.center, &name, &origin)?;
                node.center = Some(choice.center);
                node.phase = Some(choice.phase);
                node.measure = Some(choice.measure);
                for k in kids {
                    let mut child = Node::new(k.scene, node.depth + 1, state.clone());
                    child.dropped_x = k.dropped_x;
                    self.grow(&mut child)?;
                    node.children.push(Edge { map: k.map, node: child });
                }
            }
        }
        Ok(())
    }

    fn plan(&self, s: &Scene, state: &DriverState) -> Result<Plan> {
        let lim = self.lim;
        let probes = probe_points(s);
        let full = verdicts(s, &probes, lim)?;
        let stuck = |d: Diagnostic| Ok(Plan::Stuck(d, full.clone()));
        if let Some(ch) = centers::step2(s) {
            return self.checked(s, ch?, &full, &full, DriverState::default());
        }
        // step 3 on the reduced divisor, one leading view at a time
        let reduced = s.reduced();
        let red = verdicts(&reduced, &probes, lim)?;
        if red.iter().any(|v| !v.is_semisnc()) {
            let mut chosen = None;
            for m in 1..=s.x.len() {
                let v = view(&reduced, m);
                let pts: Vec<RationalPoint> = probes.iter().filter(|p| v.on_x(p)).cloned().collect();
                let vv = verdicts(&v, &pts, lim)?;
                let bad: Vec<RationalPoint> = vv
                    .iter()
                    .filter(|x| !x.is_semisnc())
                    .map(|x| x.point.clone())
                    .collect();
                if !bad.is_empty() {
                    chosen = Some((m, v, bad));
                    break;
                }
            }
            let Some((m, v, bad)) = chosen else {
                return Err(Error::Internal("reduced scene fails but no view does".into()));
            };
            let mut done = if state.components == m {
                state.done.clone()
            } else {
                MonotoneSet::default()
            };
            let n = v.dim();
            loop {
                let k = k_set(&v, &done, lim)?;
                if k.is_empty() {
                    return stuck(Diagnostic {
                        phase: None,
                        reason: Reason::NeedsGeneralDesingInvariant,
                        location: bad.first().cloned(),
                        message: "non-semi-snc probe points outside every unprocessed stratum".into(),
                    });
                }
                let mut hits: Vec<(StratumLabel, RationalPoint)> = Vec::new();
                for a in &bad {
                    let l = stratum_at(&v, a)?;
                    if k.contains(&l) {
                        hits.push((l, a.clone()));
                    }
                }
                if hits.is_empty() {
                    let mut labels: BTreeSet<StratumLabel> = done.labels.clone();
                    labels.extend(k.iter().copied());
                    done = monotone_closure(&labels, n)?;
                    continue;
                }
                hits.sort();
                let delta = hits.iter().map(|(l, _)| l.delta()).max().unwrap();
                let (label, a) = hits.into_iter().rev().find(|(l, _)| l.delta() == delta).unwrap();
                let sel = match delta {
                    3 => centers::case_a(&v, &a, label, lim)?,
                    2 => centers::case_b(&v, &a, lim)?,
                    _ => centers::case_c(&v, &a)?,
                };
                let next = DriverState { components: m, done };
                return match sel {
                    Ok(ch) => self.checked(s, ch, &red, &full, next),
                    Err(d) => stuck(d),
                };
            }
        }
        let bad: Vec<RationalPoint> = full
            .iter()
            .filter(|v| !v.is_semisnc())
            .map(|v| v.point.clone())
            .collect();
        if bad.is_empty() {
            return Ok(Plan::Leaf(full));
        }
        if bad.iter().any(|a| overlay::unequal_classes(s, a).is_empty()) {
            return Err(Error::Internal("reduced divisor is semi-snc but a verdict fails".into()));
        }
        match centers::step4(s, &bad)? {
            Ok(ch) => self.checked(s, ch, &full, &full, DriverState::default()),
            Err(d) => stuck(d),
        }
    }

    /// Center hygiene: no probe point certified semi-snc may lie in the center.
    fn checked(&self, s: &Scene, ch: Choice, against: &[Verdict], full: &[Verdict], next: DriverState) -> Result<Plan> {
        for v in against {
            if v.is_semisnc() && ch.center.contains_point(&s.chart, &v.point) {
                let d = Diagnostic {
                    phase: Some(ch.phase),
                    reason: Reason::NeedsGeneralDesingInvariant,
                    location: Some(v.point.clone()),
                    message: format!("center {} contains the semi-snc point {}", ch.center, format_point(&v.point)),
                };
                return Ok(Plan::Stuck(d, full.to_vec()));
            }
        }
        Ok(Plan::Blowup(ch, next, full.to_vec()))
    }
}

#[cfg(test)]
mod tests;
