//! Python module `semisnc`: scene analysis and resolution on JSON scenes.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde_json::{json, Value};

use semisnc_core::algebra::{Chart, Ideal};
use semisnc_core::detector::verdicts;
use semisnc_core::report::parse_point;
use semisnc_core::scene::{io, probe_points, validate_scene, Scene, Severity};
use semisnc_core::staircase::diagram;
use semisnc_core::Limits;

fn scene(text: &str) -> semisnc_core::Result<Scene> {
    let s = io::from_json(text)?;
    let errors: Vec<String> = validate_scene(&s, false)
        .into_iter()
        .filter(|v| v.severity == Severity::Error)
        .map(|v| format!("{}: {}", v.kind, v.message))
        .collect();
    if errors.is_empty() {
        Ok(s)
    } else {
        Err(semisnc_core::Error::Invalid(errors.join("; ")))
    }
}

pub fn analyze_json(text: &str, probes: &[String]) -> semisnc_core::Result<Value> {
    let s = scene(text)?;
    let points = if probes.is_empty() {
        probe_points(&s)
    } else {
        probes.iter().map(|p| parse_point(p, s.dim())).collect::<semisnc_core::Result<Vec<_>>>()?
    };
    let vs = verdicts(&s, &points, &Limits::default())?;
    Ok(json!(vs.iter().map(|v| v.to_json()).collect::<Vec<_>>()))
}

pub fn resolve_json(text: &str, max_blowups: Option<usize>) -> semisnc_core::Result<Value> {
    let s = scene(text)?;
    let mut lim = Limits::default();
    if let Some(k) = max_blowups {
        lim.max_blowups = k;
    }
    let (tree, cert) = semisnc_core::driver::resolve(&s, &lim)?;
    Ok(json!({
        "blowups": tree.blowups,
        "centers": tree.centers().iter().map(|(p, c)| json!([p.as_str(), c.generator_strings()])).collect::<Vec<_>>(),
        "leaves": cert.leaves,
        "certified_leaves": cert.certified_leaves,
        "all_certified": cert.all_certified,
        "diagnostics": tree.diagnostics().iter().map(|d| d.to_json()).collect::<Vec<_>>(),
        "tree": tree.root.to_json(false),
    }))
}

pub fn hilbert_values(ideal: &str, coords: &[String], at: &str, upto: usize) -> semisnc_core::Result<Vec<u64>> {
    let chart = Chart::new(coords)?;
    let i = Ideal::parse(&chart, ideal)?;
    let a = parse_point(at, chart.dim())?;
    let (_, stair) = diagram(&i, &a, &Limits::default())?;
    let h = stair.hilbert();
    Ok((0..=upto).map(|k| h.value_u64(k)).collect())
}

fn py_err(e: semisnc_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Verdicts at the probe points (or the given points) as a JSON string.
#[pyfunction]
#[pyo3(signature = (scene_json, probes = Vec::new()))]
fn analyze(scene_json: &str, probes: Vec<String>) -> PyResult<String> {
    analyze_json(scene_json, &probes).map(|v| v.to_string()).map_err(py_err)
}

/// Blow-up tree summary as a JSON string.
#[pyfunction]
#[pyo3(signature = (scene_json, max_blowups = None))]
fn resolve(scene_json: &str, max_blowups: Option<usize>) -> PyResult<String> {
    resolve_json(scene_json, max_blowups).map(|v| v.to_string()).map_err(py_err)
}

/// H(0), …, H(upto) of the ideal at the point.
#[pyfunction]
#[pyo3(signature = (ideal, coords, at = "origin", upto = 10))]
fn hilbert(ideal: &str, coords: Vec<String>, at: &str, upto: usize) -> PyResult<Vec<u64>> {
    hilbert_values(ideal, &coords, at, upto).map_err(py_err)
}

/// Runs the command line with the given arguments: (exit code, stdout, stderr).
#[pyfunction]
fn run(args: Vec<String>) -> (i32, String, String) {
    let mut argv = vec!["semisnc".to_string()];
    argv.extend(args);
    let out = semisnc_core::report::run(argv);
    (out.code, out.stdout, out.stderr)
}

#[pymodule]
fn semisnc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(resolve, m)?)?;
    m.add_function(wrap_pyfunction!(hilbert, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add("REPORT_VERSION", semisnc_core::report::REPORT_VERSION)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const EX: &str = r#"{"version": 1, "coords": ["x1", "x2", "y", "z"], "X": ["x1", "x2"],
        "D": [{"host": 0, "factors": ["y"], "mult": 1}, {"host": 1, "factors": ["x1 + y*z"], "mult": 1}]}"#;

    #[test]
    fn analyze_finds_the_bad_origin() {
        let v = analyze_json(EX, &["origin".to_string()]).unwrap();
        assert_eq!(v[0]["answer"], "not-semi-snc");
        assert_eq!(v[0]["failed_condition"], "3");
    }

    #[test]
    fn resolve_summary() {
        let v = resolve_json(EX, None).unwrap();
        assert_eq!(v["blowups"], 1);
        assert_eq!(v["all_certified"], true);
    }

    #[test]
    fn hilbert_of_normal_crossing() {
        let names: Vec<String> = ["x1", "x2", "y", "z"].iter().map(|s| s.to_string()).collect();
        assert_eq!(hilbert_values("x1*x2, y", &names, "origin", 3).unwrap(), vec![1, 4, 9, 16]);
    }

    #[test]
    fn bad_scene_is_an_error() {
        assert!(resolve_json("{}", None).is_err());
    }
}
