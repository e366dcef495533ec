use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::OnceLock;

use ripsnet_cli::report::Outcome;
use ripsnet_cli::{
    emit_svg, run_complexity_sweep, run_scenario, CliError, Layer, Report, Scenario,
};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn docs(name: &str) -> serde_json::Value {
    let p = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../docs")
        .join(name);
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

fn grid_hole() -> &'static Report {
    static R: OnceLock<Report> = OnceLock::new();
    R.get_or_init(|| run_scenario(&Scenario::load(&fixture("grid-hole.json")).unwrap()).unwrap())
}

fn report_validator() -> jsonschema::Validator {
    let registry = jsonschema::Registry::new()
        .add("urn:ripsnet:scenario", docs("scenario.schema.json"))
        .unwrap()
        .prepare()
        .unwrap();
    jsonschema::options()
        .with_registry(&registry)
        .build(&docs("report.schema.json"))
        .unwrap()
}

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_ripsnet"));
    c.env_remove(ripsnet_cli::OUT_DIR_ENV);
    c
}

const MINIMAL: &str = r#"{
  "name": "minimal",
  "seed": 3,
  "deployment": { "n": 30, "r_c": 0.6, "r_s": 0.4 }
}"#;

#[test]
fn minimal_scenario_has_no_survivors() {
    let s = Scenario::parse(MINIMAL).unwrap();
    let r = run_scenario(&s).unwrap();
    assert!(r.localization.survivors.is_empty());
    assert!(r.verdicts.is_empty());
    assert_eq!(r.outcome, Outcome::Ok);
    assert_eq!(r.ground_truth.betti1, 0);
}

#[test]
fn unknown_fields_are_rejected() {
    let bad = MINIMAL.replace(r#""seed": 3,"#, r#""seed": 3, "colour": "red","#);
    assert!(matches!(
        Scenario::parse(&bad),
        Err(CliError::Validation(_))
    ));
    let nested = MINIMAL.replace(r#""r_s": 0.4"#, r#""r_s": 0.4, "extra": 1"#);
    assert!(matches!(
        Scenario::parse(&nested),
        Err(CliError::Validation(_))
    ));
}

#[test]
fn scenario_fixtures_satisfy_the_schema() {
    let v = jsonschema::validator_for(&docs("scenario.schema.json")).unwrap();
    for f in ["grid-hole.json", "sparse-wormhole.json"] {
        let s: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(fixture(f)).unwrap()).unwrap();
        assert!(v.is_valid(&s), "{f}");
    }
    assert!(v.is_valid(&serde_json::from_str(MINIMAL).unwrap()));
    let bad: serde_json::Value =
        serde_json::from_str(&MINIMAL.replace(r#""seed": 3,"#, r#""seed": 3, "x": 1,"#)).unwrap();
    assert!(!v.is_valid(&bad));
}

#[test]
fn golden_grid_hole_report() {
    let golden = fixture("../golden/grid-hole.report.json");
    let text = grid_hole().normalized().to_json();
    if std::env::var_os("RIPSNET_UPDATE_GOLDEN").is_some() {
        std::fs::write(&golden, &text).unwrap();
    }
    let expected = std::fs::read_to_string(&golden).expect("golden file");
    assert!(text == expected, "report differs from {}", golden.display());
}

#[test]
fn reports_round_trip_and_validate() {
    let r = grid_hole();
    let text = r.to_json();
    let back: Report = serde_json::from_str(&text).unwrap();
    assert_eq!(&back, r);
    assert_eq!(back.to_json(), text);
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    let v = report_validator();
    let errors: Vec<String> = v
        .iter_errors(&value)
        .map(|e| format!("{} at {}", e, e.instance_path()))
        .collect();
    assert!(errors.is_empty(), "{errors:#?}");
}

#[test]
fn runs_are_deterministic() {
    let s = Scenario::load(&fixture("grid-hole.json")).unwrap();
    assert_eq!(
        run_scenario(&s).unwrap().normalized(),
        grid_hole().normalized()
    );
}

#[test]
fn svg_layers() {
    let r = grid_hole();
    let bare = emit_svg(r, &[]);
    for id in ["coverage", "boundary", "survivor", "removed", "flagged"] {
        assert!(!bare.contains(&format!(r#"<g id="{id}""#)), "{id}");
    }
    assert!(bare.contains(r#"<g id="edges""#) && bare.contains(r#"<g id="nodes""#));

    let full = emit_svg(r, &Layer::ALL);
    assert_eq!(full, emit_svg(r, &Layer::ALL));
    let polylines: Vec<&str> = full
        .lines()
        .filter(|l| l.starts_with("<polyline"))
        .collect();
    assert_eq!(polylines.len(), r.localization.survivors.len());
    assert!(polylines.iter().all(|l| l.contains(r#"class="survivor""#)));
    // closed: one point per cycle node plus the repeated start
    let points = polylines[0]
        .split("points=\"")
        .nth(1)
        .unwrap()
        .trim_end_matches("\"/>");
    assert_eq!(
        points.split(' ').count(),
        r.localization.survivors[0].cycle.len() + 1
    );
}

#[test]
fn sweep_needs_two_sizes() {
    let cfg = ripsnet::locator::LocatorConfig::default();
    assert!(matches!(
        run_complexity_sweep(&[50], 2, 0, &cfg),
        Err(CliError::Validation(_))
    ));
    assert!(matches!(
        run_complexity_sweep(&[50, 50], 2, 0, &cfg),
        Err(CliError::Validation(_))
    ));
}

#[test]
fn small_sweep_writes_a_table() {
    let cfg = ripsnet::locator::LocatorConfig::default();
    let t = run_complexity_sweep(&[30, 60], 2, 0, &cfg).unwrap();
    assert_eq!(t.rows.len(), 4);
    assert!(t.error.is_none());
    // each node broadcasts every id of its partition exactly once
    assert!(t
        .rows
        .iter()
        .all(|r| r.f_words == (r.nodes * r.nodes) as u64));
    let mut buf = Vec::new();
    t.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.starts_with("n,repeat,seed,nodes,f_words,f_words_per_node"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    };
    // r_s below r_c / sqrt(3)
    let tight = write(
        "tight.json",
        &MINIMAL.replace(r#""r_s": 0.4"#, r#""r_s": 0.3"#),
    );
    let st = bin()
        .args(["run"])
        .arg(&tight)
        .arg("--out")
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(2));

    let unknown = write(
        "unknown.json",
        &MINIMAL.replace(r#""seed": 3,"#, r#""seed": 3, "x": 1,"#),
    );
    let st = bin().arg("run").arg(&unknown).status().unwrap();
    assert_eq!(st.code(), Some(2));

    let st = bin()
        .arg("run")
        .arg(dir.path().join("missing.json"))
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(4));

    let ok = write("ok.json", MINIMAL);
    let st = bin()
        .arg("run")
        .arg(&ok)
        .arg("--svg")
        .arg("--out")
        .arg(dir.path().join("a"))
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
    assert!(dir.path().join("a/minimal.report.json").exists());
    assert!(dir.path().join("a/minimal.svg").exists());

    // one iteration cannot converge: inconclusive even after the retry
    let st = bin()
        .arg("run")
        .arg(fixture("grid-hole.json"))
        .args(["--max-iters", "1", "--out"])
        .arg(dir.path().join("b"))
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(3));
}

#[test]
fn environment_overrides_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    let s = dir.path().join("s.json");
    std::fs::write(&s, MINIMAL).unwrap();
    let st = bin()
        .env(ripsnet_cli::OUT_DIR_ENV, dir.path().join("env"))
        .arg("run")
        .arg(&s)
        .arg("--out")
        .arg(dir.path().join("flag"))
        .status()
        .unwrap();
    assert_eq!(st.code(), Some(0));
    assert!(dir.path().join("env/minimal.report.json").exists());
    assert!(!dir.path().join("flag").exists());
}
