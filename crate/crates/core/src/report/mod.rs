//! Command-line front end and run reports.

use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::algebra::{format_point, format_rational, origin, parse_rational, Chart, Ideal, RationalPoint};
use crate::blowup::{transform_scene, CenterSpec};
use crate::detector::{verdicts, Answer, Verdict};
use crate::driver::{resolve, BlowupTree, Certification, Node, Reason};
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::scene::{io, probe_points, validate_scene, Scene, Severity};
use crate::staircase::diagram;

pub const REPORT_VERSION: u32 = 1;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DIAGNOSTIC: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "semisnc", version, about = "Semi-snc detection and resolution by blow-ups")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub opts: Options,
}

#[derive(Args, Debug, Clone)]
pub struct Options {
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    /// Include per-node measures, verdicts and scenes.
    #[arg(long, global = true)]
    pub trace: bool,
    /// Blow-up budget for `resolve`.
    #[arg(long, global = true)]
    pub max_steps: Option<usize>,
    /// Point as comma-separated rationals; repeatable.
    #[arg(long, global = true)]
    pub probe: Vec<String>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Verdicts at the probe points of a scene.
    Analyze { scene: String },
    /// Blow up until every probe point is semi-snc.
    Resolve { scene: String },
    /// Hilbert–Samuel function of an ideal at a point.
    Hilbert(IdealArgs),
    /// Standard basis and staircase of an ideal at a point.
    Diagram(IdealArgs),
    /// Ideal quotient I : J.
    Quotient {
        #[arg(long)]
        ideal: String,
        #[arg(long)]
        by: String,
        #[arg(long)]
        coords: Option<String>,
    },
    /// One blow-up of a scene along a center.
    Blowup {
        scene: String,
        /// Generators such as "x1, x2, e1 + 1".
        #[arg(long)]
        center: String,
        #[arg(long)]
        exceptional: Option<String>,
    },
}

#[derive(Args, Debug)]
pub struct IdealArgs {
    #[arg(long)]
    pub ideal: String,
    /// "origin" or comma-separated rationals.
    #[arg(long, default_value = "origin")]
    pub at: String,
    /// Coordinate names; defaults to the names in order of appearance.
    #[arg(long)]
    pub coords: Option<String>,
    /// Last k for which values are listed.
    #[arg(long, default_value_t = 10)]
    pub upto: usize,
}

/// What a run prints and how it exits.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `argv` (program name first) and runs the subcommand.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code, stdout: String::new(), stderr: text }
            };
        }
    };
    match execute(&cli) {
        Ok(report) => Outcome {
            code: report.exit,
            stdout: render(&report, cli.opts.format),
            stderr: String::new(),
        },
        Err(e) => Outcome {
            code: exit_for(&e),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

fn exit_for(e: &Error) -> i32 {
    match e {
        Error::CapExceeded(_) => EXIT_CAP,
        _ => EXIT_USAGE,
    }
}

/// A finished run: JSON body plus the text lines.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub subcommand: &'static str,
    pub digest: String,
    pub body: Value,
    pub lines: Vec<String>,
    pub diagnostics: Vec<Value>,
    pub exit: i32,
}

impl RunReport {
    pub fn to_json(&self) -> Value {
        json!({
            "report_version": REPORT_VERSION,
            "subcommand": self.subcommand,
            "input_digest": self.digest,
            "result": self.body,
            "diagnostics": self.diagnostics,
            "exit_status": self.exit,
        })
    }
}

pub fn render(r: &RunReport, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&r.to_json()).expect("serializable");
            s.push('\n');
            s
        }
        Format::Text => {
            let mut s = String::new();
            let _ = writeln!(s, "{} report_version {} digest {}", r.subcommand, REPORT_VERSION, r.digest);
            for l in &r.lines {
                let _ = writeln!(s, "{l}");
            }
            for d in &r.diagnostics {
                let _ = writeln!(s, "diagnostic {d}");
            }
            let _ = writeln!(s, "exit {}", r.exit);
            s
        }
    }
}

pub fn digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn read_scene(path: &str) -> Result<(Scene, String, Vec<String>)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("{path}: {e}")))?;
    let scene = io::from_json(&text)?;
    let violations = validate_scene(&scene, false);
    let errors: Vec<String> = violations
        .iter()
        .filter(|v| v.severity == Severity::Error)
        .map(|v| format!("{}: {}", v.kind, v.message))
        .collect();
    if !errors.is_empty() {
        return Err(Error::Invalid(format!("{path}: {}", errors.join("; "))));
    }
    let warnings = violations
        .iter()
        .filter(|v| v.severity == Severity::Warning)
        .map(|v| format!("warning {}: {}", v.kind, v.message))
        .collect();
    Ok((scene, digest(text.as_bytes()), warnings))
}

pub fn parse_point(text: &str, n: usize) -> Result<RationalPoint> {
    if text.trim() == "origin" {
        return Ok(origin(n));
    }
    let p = text
        .split(',')
        .map(|t| parse_rational(t.trim()))
        .collect::<Result<Vec<_>>>()?;
    if p.len() != n {
        return Err(Error::Invalid(format!("point {text} has {} coordinates, expected {n}", p.len())));
    }
    Ok(p)
}

/// Identifiers in order of first appearance.
fn names_in(texts: &[&str]) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    for t in texts {
        let mut cur = String::new();
        for ch in t.chars().chain(std::iter::once(' ')) {
            if ch.is_ascii_alphabetic() || ch == '_' || (!cur.is_empty() && ch.is_ascii_digit()) {
                cur.push(ch);
            } else if !cur.is_empty() {
                if !out.contains(&cur) {
                    out.push(cur.clone());
                }
                cur.clear();
            }
        }
    }
    out
}

fn chart_for(coords: &Option<String>, texts: &[&str]) -> Result<Chart> {
    let names: Vec<String> = match coords {
        Some(c) => c.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
        None => names_in(texts),
    };
    Chart::new(&names)
}

fn limits(opts: &Options) -> Limits {
    let mut lim = Limits::default();
    if let Some(k) = opts.max_steps {
        lim.max_blowups = k;
    }
    lim
}

pub fn execute(cli: &Cli) -> Result<RunReport> {
    let opts = &cli.opts;
    match &cli.command {
        Command::Analyze { scene } => analyze(scene, opts),
        Command::Resolve { scene } => resolve_cmd(scene, opts),
        Command::Hilbert(a) => hilbert(a, false),
        Command::Diagram(a) => hilbert(a, true),
        Command::Quotient { ideal, by, coords } => quotient(ideal, by, coords),
        Command::Blowup {
            scene,
            center,
            exceptional,
        } => blowup(scene, center, exceptional.as_deref()),
    }
}

fn analyze(path: &str, opts: &Options) -> Result<RunReport> {
    let (s, digest, warnings) = read_scene(path)?;
    let lim = limits(opts);
    let points = if opts.probe.is_empty() {
        probe_points(&s)
    } else {
        opts.probe.iter().map(|p| parse_point(p, s.dim())).collect::<Result<Vec<_>>>()?
    };
    let vs = verdicts(&s, &points, &lim)?;
    let good = vs.iter().filter(|v| v.is_semisnc()).count();
    let out_of_class = vs.iter().filter(|v| v.answer == Answer::OutOfClass).count();
    let mut lines = warnings;
    lines.push(format!("coords {}", s.chart.names().join(" ")));
    lines.extend(vs.iter().map(|v| format!("point {}", v.to_text())));
    lines.push(format!("summary points {} semi-snc {} out-of-class {}", vs.len(), good, out_of_class));
    Ok(RunReport {
        subcommand: "analyze",
        digest,
        body: json!({
            "coords": s.chart.names(),
            "verdicts": vs.iter().map(Verdict::to_json).collect::<Vec<_>>(),
            "semisnc_everywhere": good == vs.len(),
        }),
        lines,
        diagnostics: Vec::new(),
        exit: if out_of_class > 0 { EXIT_DIAGNOSTIC } else { EXIT_OK },
    })
}

fn resolve_cmd(path: &str, opts: &Options) -> Result<RunReport> {
    let (s, digest, warnings) = read_scene(path)?;
    let lim = limits(opts);
    let (tree, cert) = resolve(&s, &lim)?;
    let diags: Vec<Value> = tree.diagnostics().iter().map(|d| d.to_json()).collect();
    let exit = if tree.diagnostics().iter().any(|d| d.reason == Reason::CapExceeded) {
        EXIT_CAP
    } else if !diags.is_empty() {
        EXIT_DIAGNOSTIC
    } else {
        EXIT_OK
    };
    let mut lines = warnings;
    tree_lines(&tree.root, "", opts.trace, &mut lines);
    lines.push(certification_line(&tree, &cert));
    Ok(RunReport {
        subcommand: "resolve",
        digest,
        body: json!({
            "blowups": tree.blowups,
            "depth": tree.depth(),
            "centers": tree.centers().iter().map(|(p, c)| json!({
                "phase": p.as_str(),
                "center": c.generator_strings(),
            })).collect::<Vec<_>>(),
            "certification": {
                "leaves": cert.leaves,
                "certified_leaves": cert.certified_leaves,
                "points_checked": cert.points_checked,
                "all_certified": cert.all_certified,
            },
            "tree": tree.root.to_json(opts.trace),
        }),
        lines,
        diagnostics: diags,
        exit,
    })
}

fn certification_line(tree: &BlowupTree, c: &Certification) -> String {
    format!(
        "summary blowups {} depth {} leaves {} certified {} points {} all-certified {}",
        tree.blowups,
        tree.depth(),
        c.leaves,
        c.certified_leaves,
        c.points_checked,
        c.all_certified
    )
}

fn tree_lines(n: &Node, indent: &str, trace: bool, out: &mut Vec<String>) {
    if let (Some(c), Some(p)) = (&n.center, n.phase) {
        let mut l = format!("{indent}blowup {p} center {c}");
        if trace {
            if let Some(m) = &n.measure {
                l.push_str(&format!(" measure {m}"));
            }
        }
        out.push(l);
        if trace {
            for v in &n.verdicts {
                out.push(format!("{indent}  point {}", v.to_text()));
            }
        }
        for e in &n.children {
            let label = match e.map.exceptional_name() {
                Some(x) => format!("chart {} exceptional {x}", e.map.chart_coord),
                None => format!("open {}", e.map.to_json()["open"].as_str().unwrap_or("")),
            };
            out.push(format!("{indent}  {label}"));
            tree_lines(&e.node, &format!("{indent}    "), trace, out);
        }
        return;
    }
    let status = if n.certified() { "certified" } else { "not-certified" };
    out.push(format!("{indent}leaf {status} coords {} points {}", n.scene.chart.names().join(" "), n.verdicts.len()));
    if let Some(d) = &n.diagnostic {
        out.push(format!("{indent}  diagnostic {} {}", d.reason.as_str(), d.message));
    }
    if trace {
        for v in &n.verdicts {
            out.push(format!("{indent}  point {}", v.to_text()));
        }
    }
}

fn hilbert(a: &IdealArgs, with_basis: bool) -> Result<RunReport> {
    let chart = chart_for(&a.coords, &[&a.ideal])?;
    let ideal = Ideal::parse(&chart, &a.ideal)?;
    let point = parse_point(&a.at, chart.dim())?;
    let (basis, stair) = diagram(&ideal, &point, &Limits::default())?;
    let h = stair.hilbert();
    let values: Vec<String> = h.values(a.upto).iter().map(|v| v.to_string()).collect();
    let verts = stair.describe(&chart);
    let digest = digest(format!("{}|{}|{}", chart.names().join(","), a.ideal, a.at).as_bytes());
    let mut lines = vec![
        format!("coords {}", chart.names().join(" ")),
        format!("point {}", format_point(&point)),
        format!("staircase {}", verts.join(" ")),
    ];
    let mut body = json!({
        "coords": chart.names(),
        "point": point.iter().map(format_rational).collect::<Vec<_>>(),
        "staircase": verts,
    });
    if with_basis {
        let b: Vec<String> = basis.iter().map(|p| p.to_string()).collect();
        lines.push(format!("standard_basis {}", b.join(", ")));
        body["standard_basis"] = json!(b);
    } else {
        lines.push(format!("values {}", values.join(" ")));
        lines.push(format!("tail from k={} {}", h.tail_start(), h.format_tail()));
        body["values"] = json!(values);
        body["tail_start"] = json!(h.tail_start());
        body["tail"] = json!(h.format_tail());
    }
    Ok(RunReport {
        subcommand: if with_basis { "diagram" } else { "hilbert" },
        digest,
        body,
        lines,
        diagnostics: Vec::new(),
        exit: EXIT_OK,
    })
}

fn quotient(ideal: &str, by: &str, coords: &Option<String>) -> Result<RunReport> {
    let chart = chart_for(coords, &[ideal, by])?;
    let i = Ideal::parse(&chart, ideal)?;
    let j = Ideal::parse(&chart, by)?;
    let q = i.quotient(&j)?.basis()?;
    let gens: Vec<String> = q.gens().iter().map(|g| g.to_string()).collect();
    Ok(RunReport {
        subcommand: "quotient",
        digest: digest(format!("{}|{ideal}|{by}", chart.names().join(",")).as_bytes()),
        body: json!({ "coords": chart.names(), "quotient": gens }),
        lines: vec![
            format!("coords {}", chart.names().join(" ")),
            format!("quotient ({})", gens.join(", ")),
        ],
        diagnostics: Vec::new(),
        exit: EXIT_OK,
    })
}

/// Reads generators `c`, `c - v`, `2*c + 1`, … as a translated coordinate subspace.
pub fn parse_center(chart: &Chart, text: &str) -> Result<CenterSpec> {
    let ideal = Ideal::parse(chart, text)?;
    let mut pairs: Vec<(String, crate::algebra::Coeff)> = Vec::new();
    for g in ideal.gens() {
        let vars = g.variables();
        let lin = g.linear_part();
        if vars.len() != 1 || g.degree() != Some(1) {
            return Err(Error::Invalid(format!("center generator {g} is not c - v for a coordinate c")));
        }
        let i = vars[0];
        let value = -(g.eval(&origin(chart.dim())) / &lin[i]);
        pairs.push((chart.name(i).to_string(), value));
    }
    let refs: Vec<(&str, crate::algebra::Coeff)> = pairs.iter().map(|(n, v)| (n.as_str(), v.clone())).collect();
    CenterSpec::with_values(&refs)
}

fn blowup(path: &str, center: &str, exceptional: Option<&str>) -> Result<RunReport> {
    let (s, digest, warnings) = read_scene(path)?;
    let c = parse_center(&s.chart, center)?;
    let name = match exceptional {
        Some(n) => n.to_string(),
        None => {
            let k = (1..).find(|k| s.chart.index(&format!("e{k}")).is_none()).expect("unbounded");
            format!("e{k}")
        }
    };
    let kids = transform_scene(&s, &c, &name, &format!("blowup {c}"))?;
    let mut lines = warnings;
    lines.push(format!("center {c}"));
    let mut charts = Vec::new();
    for k in &kids {
        let head = match k.map.exceptional_name() {
            Some(x) => format!("chart {} exceptional {x}", k.map.chart_coord),
            None => format!("open {}", k.map.to_json()["open"].as_str().unwrap_or("")),
        };
        lines.push(head);
        lines.push(format!("  scene {}", io::to_value(&k.scene)));
        charts.push(json!({
            "map": k.map.to_json(),
            "scene": io::to_value(&k.scene),
            "dropped_x": k.dropped_x,
        }));
    }
    Ok(RunReport {
        subcommand: "blowup",
        digest,
        body: json!({ "center": c.generator_strings(), "charts": charts }),
        lines,
        diagnostics: Vec::new(),
        exit: EXIT_OK,
    })
}
