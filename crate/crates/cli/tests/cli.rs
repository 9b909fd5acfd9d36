use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_distress-lda"));
    cmd.env_remove("DISTRESS_LDA_CONFIG");
    cmd
}

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn d(name: &str) -> String {
    data(name).display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("bad JSON ({e}): {}", stdout(o)))
}

fn num(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn evaluate_fixture_panels(extra: &[&str]) -> Output {
    let model = d("paper_model.json");
    let a = d("appendix_a.csv");
    let b = d("appendix_b.csv");
    let mut args = vec![
        "evaluate", "--model", &model, "--panel", &a, "--panel", &b, "--zones", "paper", "--mode",
        "raw",
    ];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn fit_reproduces_training_summary_and_writes_model() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("model.json");
    let train = d("table2.csv");
    let o = run(&[
        "fit",
        "--train",
        &train,
        "--window",
        "2012:2015",
        "--model",
        model.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = json(&o);
    assert!((num(&r["centroids"]["bankrupt"]) + 4.016).abs() < 0.1);
    assert!((num(&r["centroids"]["nonbankrupt"]) - 0.669).abs() < 0.1);
    assert_eq!(
        r["confusion"]["counts"],
        serde_json::json!([[2, 0], [0, 12]])
    );
    for z in r["z_check"].as_array().unwrap() {
        assert!(num(&z["mean"]).abs() < 1e-12);
        assert!((num(&z["sd"]) - 1.0).abs() < 1e-12);
    }

    let saved: Value = serde_json::from_str(&std::fs::read_to_string(&model).unwrap()).unwrap();
    assert_eq!(saved["format"], "distress-lda-model/1");
    assert_eq!(saved["training"]["scores"].as_array().unwrap().len(), 14);

    let o = run(&["diagnose", "--model", model.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("discriminant function is significant"));
}

#[test]
fn fit_on_printed_z_table_matches_published_eigenvalue() {
    let o = run(&[
        "fit",
        "--train",
        &d("table3_zscores.csv"),
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = json(&o);
    assert!((num(&r["eigenvalue"]) - 3.136).abs() < 0.02);
    assert!((num(&r["centroids"]["bankrupt"]) + 4.016).abs() < 0.1);
    assert!((num(&r["centroids"]["nonbankrupt"]) - 0.669).abs() < 0.1);
    let text = stdout(&run(&["fit", "--train", &d("table3_zscores.csv")]));
    assert!(text.contains("eigenvalue 3.136"), "{text}");
}

#[test]
fn fit_text_summary_sections() {
    let o = run(&["fit", "--train", &d("table2.csv")]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    for section in [
        "Case processing summary",
        "Discriminant function coefficients",
        "Classification function coefficients",
        "Functions at group centroids",
        "14 of 14 training cases correctly classified",
    ] {
        assert!(out.contains(section), "missing `{section}` in\n{out}");
    }
}

#[test]
fn inverted_window_is_config_error_before_io() {
    let o = run(&[
        "fit",
        "--train",
        "/nonexistent/train.csv",
        "--window",
        "2016:2015",
    ]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("window"), "{}", stderr(&o));
}

#[test]
fn out_of_range_thresholds_are_config_errors() {
    let model = d("paper_model.json");
    assert_eq!(
        code(&run(&["diagnose", "--model", &model, "--alpha", "0"])),
        2
    );
    assert_eq!(
        code(&run(&[
            "diagnose",
            "--model",
            &model,
            "--collinearity-threshold",
            "1.5"
        ])),
        2
    );
}

#[test]
fn missing_label_column_is_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let train = write(
        dir.path(),
        "train.csv",
        "bank,year,eaa,roae,roaa,nii,laaa,bdtla\nA,2015,0.1,0.1,0.01,0.05,0.6,0.02\n",
    );
    let o = run(&["fit", "--train", &train]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stderr(&o).contains("label"), "{}", stderr(&o));
}

#[test]
fn malformed_number_reports_row_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let panel = write(
        dir.path(),
        "panel.csv",
        "bank,year,eaa,roae,roaa,nii,laaa,bdtla,label\nA,2015,0.1,abc,0.01,0.05,0.6,0.02,bankrupt\n",
    );
    let o = run(&[
        "classify",
        "--model",
        &d("paper_model.json"),
        "--panel",
        &panel,
    ]);
    assert_eq!(code(&o), 3);
    let err = stderr(&o);
    assert!(err.contains("roae") && err.contains('2'), "{err}");
}

#[test]
fn corrupt_model_file_is_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(
        dir.path(),
        "model.json",
        "{\"format\": \"distress-lda-model/1\"}",
    );
    let o = run(&["diagnose", "--model", &model]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
}

#[test]
fn missing_files_and_bad_zones_are_config_errors() {
    let o = run(&["diagnose", "--model", "/nonexistent/model.json"]);
    assert_eq!(code(&o), 2);
    let dir = tempfile::tempdir().unwrap();
    let zones = write(
        dir.path(),
        "zones.json",
        r#"{"cutoff": 0.0, "grey": {"lo": 2.0, "hi": 1.0}, "source": "explicit-override"}"#,
    );
    let o = run(&[
        "classify",
        "--model",
        &d("paper_model.json"),
        "--panel",
        &d("appendix_a.csv"),
        "--zones",
        &zones,
    ]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));
}

#[test]
fn singular_training_data_is_fit_error() {
    let dir = tempfile::tempdir().unwrap();
    // nii is an exact copy of eaa, so the pooled covariance is singular.
    let rows = [
        ("A", 0.10, 0.20, 0.01, 0.6, 0.02, "bankrupt"),
        ("B", 0.12, 0.10, 0.02, 0.5, 0.03, "bankrupt"),
        ("C", 0.20, 0.30, 0.03, 0.7, 0.01, "nonbankrupt"),
        ("D", 0.25, 0.25, 0.04, 0.4, 0.05, "nonbankrupt"),
        ("E", 0.30, 0.15, 0.02, 0.6, 0.04, "nonbankrupt"),
        ("F", 0.18, 0.35, 0.05, 0.5, 0.02, "nonbankrupt"),
        ("G", 0.22, 0.05, 0.01, 0.3, 0.06, "nonbankrupt"),
        ("H", 0.28, 0.22, 0.03, 0.8, 0.03, "nonbankrupt"),
    ];
    let mut text = String::from("bank,year,eaa,roae,roaa,nii,laaa,bdtla,label\n");
    for (bank, eaa, roae, roaa, laaa, bdtla, label) in rows {
        text += &format!("{bank},2015,{eaa},{roae},{roaa},{eaa},{laaa},{bdtla},{label}\n");
    }
    let train = write(dir.path(), "train.csv", &text);
    let o = run(&["fit", "--train", &train]);
    assert_eq!(code(&o), 4, "{}", stderr(&o));
}

#[test]
fn unlabeled_bank_is_evaluation_error_naming_it() {
    let dir = tempfile::tempdir().unwrap();
    let panel = write(
        dir.path(),
        "panel.csv",
        "bank,year,eaa,roae,roaa,nii,laaa,bdtla\nMystery Bank,2015,0.1,0.1,0.01,0.05,0.6,0.02\n",
    );
    let o = run(&[
        "evaluate",
        "--model",
        &d("paper_model.json"),
        "--panel",
        &panel,
    ]);
    assert_eq!(code(&o), 5);
    assert!(stderr(&o).contains("Mystery Bank"), "{}", stderr(&o));

    let o = run(&[
        "evaluate",
        "--model",
        &d("paper_model.json"),
        "--panel",
        &panel,
        "--label",
        "Mystery Bank=nonbankrupt",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn evaluate_2019_is_perfect() {
    let o = evaluate_fixture_panels(&["--format", "json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = json(&o);
    for panel in ["with_grey", "cutoff_only"] {
        let y2019 = r[panel]["years"]
            .as_array()
            .unwrap()
            .iter()
            .find(|y| y["year"] == 2019)
            .expect("2019 present");
        assert_eq!(num(&y2019["accuracy"]), 1.0);
        assert_eq!(y2019["hits"], 17);
    }
}

#[test]
fn evaluate_text_layout_and_moza_2015() {
    let o = evaluate_fixture_panels(&[]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    let header = out
        .lines()
        .find(|l| l.starts_with("With grey zone"))
        .unwrap();
    let years: Vec<&str> = header.split_whitespace().skip(3).collect();
    assert_eq!(
        years,
        ["2020", "2019", "2018", "2017", "2016", "2015", "2014", "2013", "2012"]
    );
    for row in [
        "Grey zone",
        "Hit numbers",
        "Type I %",
        "Type II %",
        "Accuracy",
        "Cut-off only",
    ] {
        assert!(out.contains(row), "missing row `{row}`");
    }

    let moza = out.lines().find(|l| l.starts_with("Moza Banco")).unwrap();
    let cells: Vec<&str> = moza
        .split("  ")
        .map(str::trim)
        .filter(|c| !c.is_empty())
        .collect();
    // Bank name, then 2020 … 2012: 2015 is the sixth year column.
    let cell = cells[6];
    assert!(cell.starts_with('▼'), "{cell}");
    let value: f64 = cell
        .trim_start_matches('▼')
        .trim()
        .trim_end_matches('%')
        .parse()
        .unwrap();
    assert!((value - -8.98).abs() <= 2.0, "{value}");
    assert_eq!(cells[5], "n.a", "Moza 2016 has no data");
}

#[test]
fn only_unavailable_rows_give_notice_and_success() {
    let dir = tempfile::tempdir().unwrap();
    let panel = write(
        dir.path(),
        "panel.csv",
        "bank,year,eaa,roae,roaa,nii,laaa,bdtla,label\n\
         A,2016,0,0,0,0,0,0,bankrupt\nB,2016,,,,,,,nonbankrupt\n",
    );
    let o = run(&[
        "evaluate",
        "--model",
        &d("paper_model.json"),
        "--panel",
        &panel,
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = json(&o);
    assert!(r["with_grey"]["years"].as_array().unwrap().is_empty());
    let notices = r["notices"].as_array().unwrap();
    assert!(notices
        .iter()
        .any(|n| n.as_str().unwrap().contains("no available records")));
}

#[test]
fn json_reports_are_byte_identical_across_runs() {
    for args in [
        vec!["evaluate", "--zones", "paper"],
        vec!["classify", "--mode", "normalized"],
        vec!["diagnose"],
    ] {
        let model = d("paper_model.json");
        let a = d("appendix_a.csv");
        let b = d("appendix_b.csv");
        let mut full = args.clone();
        full.extend([
            "--model", &model, "--panel", &a, "--panel", &b, "--format", "json",
        ]);
        let first = run(&full);
        let second = run(&full);
        assert_eq!(code(&first), 0, "{}", stderr(&first));
        assert_eq!(first.stdout, second.stdout, "{args:?}");
    }
}

#[test]
fn diagnose_reproduces_wilks_and_box_blocks() {
    let o = run(&[
        "diagnose",
        "--model",
        &d("paper_model.json"),
        "--format",
        "json",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = json(&o);
    let w = &r["wilks"];
    assert!((num(&w["lambda"]) - 0.242).abs() <= 0.001);
    assert!((num(&w["chi_square"]) - 12.778).abs() <= 0.02);
    assert_eq!(w["df"], 6);
    assert!((num(&w["p_value"]) - 0.047).abs() <= 0.002);
    assert_eq!(w["verdict"], "discriminant function is significant");

    let b = &r["box_m"];
    assert!((num(&b["m"]) - 4.416).abs() <= 0.01);
    assert!((num(&b["f_approx"]) - 3.722).abs() <= 0.01);
    assert_eq!(num(&b["df1"]), 1.0);
    assert!((num(&b["df2"]) - 26.596).abs() <= 0.01);
    assert!((num(&b["p_value"]) - 0.064).abs() <= 0.002);
    assert_eq!(b["verdict"], "variance of the groups is homogenous");

    let flagged = r["collinearity"]["flagged"].as_array().unwrap();
    assert_eq!(flagged.len(), 2);

    let text = stdout(&run(&["diagnose", "--model", &d("paper_model.json")]));
    for cell in ["0.242", "12.778", "0.047", "3.722", "26.596", "0.064"] {
        assert!(text.contains(cell), "missing {cell} in\n{text}");
    }
}

#[test]
fn stricter_alpha_flips_wilks_verdict() {
    let o = run(&[
        "diagnose",
        "--model",
        &d("paper_model.json"),
        "--alpha",
        "0.01",
        "--format",
        "json",
    ]);
    assert_eq!(
        json(&o)["wilks"]["verdict"],
        "discriminant function is not significant"
    );
}

#[test]
fn zero_eigenvalue_model_is_not_significant() {
    let dir = tempfile::tempdir().unwrap();
    let mut m: Value =
        serde_json::from_str(&std::fs::read_to_string(data("paper_model.json")).unwrap()).unwrap();
    m["eigenvalue"] = 0.0.into();
    m["canonical_correlation"] = 0.0.into();
    m["wilks_lambda"] = 1.0.into();
    m["centroids"]["bankrupt"] = 0.0.into();
    m["centroids"]["nonbankrupt"] = 0.0.into();
    let model = write(dir.path(), "flat.json", &m.to_string());
    let o = run(&["diagnose", "--model", &model, "--format", "json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(
        json(&o)["wilks"]["verdict"],
        "discriminant function is not significant"
    );
}

#[test]
fn config_file_and_env_var_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "run.conf",
        &format!(
            "# evaluation defaults\nmodel = {}\npanel = {}\nzones = paper\nformat = json\nalpha = 0.1\n",
            d("paper_model.json"),
            d("appendix_a.csv")
        ),
    );
    let o = run(&["evaluate", "--config", &cfg]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(
        json(&o)["with_grey"]["zones"]["source"],
        "explicit-override"
    );

    let o = bin()
        .args(["evaluate", "--format", "text"])
        .env("DISTRESS_LDA_CONFIG", &cfg)
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).starts_with("scoring mode raw"));

    let json_cfg = write(
        dir.path(),
        "run.json",
        &serde_json::json!({
            "model": d("paper_model.json"),
            "collinearity-threshold": 0.85,
            "format": "json",
        })
        .to_string(),
    );
    let o = run(&["diagnose", "--config", &json_cfg]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(
        json(&o)["collinearity"]["flagged"]
            .as_array()
            .unwrap()
            .len(),
        1
    );

    let bad = write(dir.path(), "bad.conf", "window = 2016:2015\n");
    assert_eq!(code(&run(&["diagnose", "--config", &bad])), 2);
}

#[test]
fn classify_lists_unavailable_rows() {
    let o = run(&[
        "classify",
        "--model",
        &d("paper_model.json"),
        "--panel",
        &d("appendix_a.csv"),
        "--zones",
        "paper",
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    let moza_2016 = out
        .lines()
        .find(|l| l.starts_with("Moza Banco") && l.contains("2016"))
        .unwrap();
    assert!(moza_2016.contains("n.a"));
    let ecobank = run(&[
        "classify",
        "--model",
        &d("paper_model.json"),
        "--panel",
        &d("appendix_b.csv"),
        "--zones",
        "paper",
        "--format",
        "json",
    ]);
    let rows = json(&ecobank)["rows"].as_array().unwrap().clone();
    let eco_2020 = rows
        .iter()
        .find(|r| r["bank"].as_str().unwrap().starts_with("Ecobank") && r["year"] == 2020)
        .unwrap();
    assert_eq!(eco_2020["zone"], "grey");
}
