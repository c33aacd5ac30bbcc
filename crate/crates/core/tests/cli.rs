use std::path::Path;
use std::process::Command;

use fracgrad::io::{read_field_csv, write_od_csv, FieldData};
use fracgrad::operators::frac_gradient;
use fracgrad::testlib::{sample_scalar, ScalarFnSpec};
use fracgrad::make_grid;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_fracgrad"));
    c.env_remove("FRACGRAD_OUT_DIR").env_remove("RUST_LOG");
    c
}

fn read(path: &Path) -> FieldData {
    read_field_csv(std::io::BufReader::new(std::fs::File::open(path).unwrap())).unwrap()
}

#[test]
fn gradient_output_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g.csv");
    let st = bin()
        .args(["gradient", "--spec", "gaussian(width=0.7)", "--s", "0.3", "--points", "24", "--half-width", "4"])
        .arg("--output")
        .arg(&out)
        .status()
        .unwrap();
    assert!(st.success());
    let g = make_grid(1, 4.0, 24).unwrap();
    let u = sample_scalar(&ScalarFnSpec::gaussian(0.0, 0.7, 1.0), &g).unwrap();
    let want = frac_gradient(&u, 0.3).unwrap();
    match read(&out) {
        FieldData::OffDiagonal(f) => assert_eq!(f.upper(), want.upper()),
        _ => panic!("expected a pair field"),
    }
}

#[test]
fn pair_csv_round_trips_through_divergence() {
    let dir = tempfile::tempdir().unwrap();
    let g = make_grid(1, 3.0, 12).unwrap();
    let u = sample_scalar(&ScalarFnSpec::bump(0.0, 2.0), &g).unwrap();
    let f = frac_gradient(&u, 0.5).unwrap();
    let inp = dir.path().join("in.csv");
    let mut buf = Vec::new();
    write_od_csv(&f, &mut buf).unwrap();
    std::fs::write(&inp, &buf).unwrap();
    let again = match read(&inp) {
        FieldData::OffDiagonal(back) => back,
        _ => panic!("expected a pair field"),
    };
    assert_eq!(again.upper(), f.upper());

    let out = dir.path().join("d.csv");
    let st = bin().arg("divergence").arg("--input").arg(&inp).args(["--s", "0.5", "--output"]).arg(&out).status().unwrap();
    assert!(st.success());
    assert!(matches!(read(&out), FieldData::Scalar(_)));
}

#[test]
fn default_output_goes_to_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let st = bin()
        .env("FRACGRAD_OUT_DIR", dir.path())
        .args(["laplacian", "--spec", "gaussian()", "--s", "0.5", "--points", "32"])
        .status()
        .unwrap();
    assert!(st.success());
    let names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    assert_eq!(names.len(), 1);
    assert!(names[0].starts_with("laplacian_") && names[0].ends_with(".csv"), "{names:?}");
}

#[test]
fn norms_prints_one_row_per_param_set_in_order() {
    let out = bin()
        .args(["norms", "--spec", "bump(radius=2)", "--kind", "wspq", "--points", "64"])
        .args(["--params", "s=0.5,p=2,q=2", "--params", "s=0.25,p=2,q=4"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "kind,s,p,q,n,N,L,value");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("wspq,5.0"));
    assert!(lines[2].starts_with("wspq,2.5"));
}

#[test]
fn bad_inputs_exit_with_code_two() {
    let cases: &[&[&str]] = &[
        &["gradient", "--spec", "gaussian(width=-1)", "--s", "0.5"],
        &["gradient", "--s", "0.5"],
        &["gradient", "--spec", "gaussian()", "--s", "1.5"],
        &["verify", "nonexistent"],
        &["norms", "--spec", "gaussian()", "--params", "s=0.5,r=2"],
    ];
    for args in cases {
        let out = bin().args(*args).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(!err.contains("panicked"), "{err}");
    }
}

#[test]
fn malformed_csv_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let inp = dir.path().join("bad.csv");
    std::fs::write(&inp, "# grid n=1 L=1 N=3\n0,1\n1,x\n2,0\n").unwrap();
    let out = bin().arg("gradient").arg("--input").arg(&inp).args(["--s", "0.5"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn config_file_overrides_suite_settings() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[suites.adjointness]\npoints = 64\ns = [0.5]\n").unwrap();
    let out = bin()
        .arg("--out-dir")
        .arg(dir.path())
        .args(["verify", "adjointness", "--stamp", "cfg", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rep: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("adjointness_cfg.json")).unwrap()).unwrap();
    assert_eq!(rep["config"]["points"], 64);
    assert_eq!(rep["verdict"], "pass");

    std::fs::write(&cfg, "[suites.adjointness]\nbogus = 1\n").unwrap();
    let out = bin().args(["verify", "adjointness", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn divergence_of_pair_file_is_bit_exact() {
    use fracgrad::operators::frac_divergence;
    use fracgrad::testlib::{sample_od, OdFnSpec};
    let dir = tempfile::tempdir().unwrap();
    let g = make_grid(1, 5.0, 40).unwrap();
    let spec: OdFnSpec = "disjoint_bumps(b=bump(center=-2, radius=1), c=bump(center=2, radius=1))".parse().unwrap();
    let big_g = sample_od(&spec, &g).unwrap();
    let inp = dir.path().join("G.csv");
    let mut buf = Vec::new();
    write_od_csv(&big_g, &mut buf).unwrap();
    std::fs::write(&inp, &buf).unwrap();
    let out = dir.path().join("div.csv");
    let st = bin().arg("divergence").arg("--input").arg(&inp).args(["--s", "0.5", "--output"]).arg(&out).status().unwrap();
    assert!(st.success());
    let want = frac_divergence(&big_g, 0.5).unwrap();
    match read(&out) {
        FieldData::Scalar(u) => assert_eq!(u.values(), want.values()),
        _ => panic!("expected a scalar field"),
    }
}

#[test]
fn laplacian_of_constant_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.csv");
    let st = bin().args(["laplacian", "--spec", "constant", "--s", "0.5", "--output"]).arg(&out).status().unwrap();
    assert!(st.success());
    match read(&out) {
        FieldData::Scalar(u) => assert!(u.values().iter().all(|&v| v == 0.0)),
        _ => panic!("expected a scalar field"),
    }
}

#[test]
fn counterexample_report_carries_ladder_and_slope() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().arg("--out-dir").arg(dir.path()).args(["verify", "counterexample", "--stamp", "c"]).output().unwrap();
    // the Gaussian contrast grows like log R, so this suite reports a failure
    assert_eq!(out.status.code(), Some(1));
    let rep: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("counterexample_c.json")).unwrap()).unwrap();
    let ladder: Vec<f64> = rep["cases"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["label"].as_str().unwrap().starts_with("indicator"))
        .map(|c| c["lhs"].as_f64().unwrap())
        .collect();
    assert_eq!(ladder.len(), 4);
    assert!(ladder.windows(2).all(|w| w[1] > w[0]));
    assert!(rep["fits"]["log_slope"].as_f64().unwrap() > 0.0);
}

#[test]
fn shipped_config_parses() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/desk.toml");
    let cfg = fracgrad::config::RunConfig::load(&path).unwrap();
    assert_eq!(cfg.select("all").unwrap(), fracgrad::verify::SUITES);
    assert_eq!(cfg.suites.laplacian.s, vec![0.5]);
}
