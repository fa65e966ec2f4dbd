use std::fs;
use std::path::Path;

use energy_models_cli::run;

fn run_cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["energy-models"];
    full.extend_from_slice(args);
    let code = run(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn describe_writes_stats() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = run_cli(&["describe", "--out", s(dir.path())]);
    assert_eq!(code, 0, "{err}");
    let csv = fs::read_to_string(dir.path().join("stats.csv")).unwrap();
    assert!(csv.starts_with("country,variable,mean,sd,min,max,n\n"));
    // five countries, four variables
    assert_eq!(csv.lines().count(), 1 + 5 * 4);
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("stats.json")).unwrap()).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 20);
}

#[test]
fn input_errors_map_to_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = run_cli(&[
        "describe",
        "--input",
        s(&dir.path().join("missing.csv")),
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("missing.csv"));

    let empty = dir.path().join("empty.csv");
    fs::write(
        &empty,
        "country,year,co2_mt_per_capita,gdp_const2010_usd,energy_use_kgoe_per_capita,population\n",
    )
    .unwrap();
    let (code, _, err) = run_cli(&["describe", "--input", s(&empty), "--out", s(dir.path())]);
    assert_eq!(code, 2);
    assert!(err.contains("empty"), "{err}");

    let bad = dir.path().join("bad.csv");
    fs::write(
        &bad,
        "country,year,co2_mt_per_capita,gdp_const2010_usd,energy_use_kgoe_per_capita,population\nA,2000,1,2,3,4\nA,2001,1,x,3,4\n",
    )
    .unwrap();
    let (code, _, err) = run_cli(&["describe", "--input", s(&bad), "--out", s(dir.path())]);
    assert_eq!(code, 2);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn usage_and_config_errors_exit_one() {
    assert_eq!(run_cli(&["frobnicate"]).0, 1);
    assert_eq!(run_cli(&["fit-mlp", "--max-epochs", "0"]).0, 1);
    assert_eq!(run_cli(&["fit-reg", "--split", "0.5,0.5"]).0, 1);
    assert_eq!(
        run_cli(&["fit-reg", "--alpha-enter", "0.2", "--alpha-remove", "0.1"]).0,
        1
    );
    let (code, out, _) = run_cli(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("fit-mlp"));
}

#[test]
fn fit_reg_reports_elasticities_largest_first() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, err) = run_cli(&["fit-reg", "--out", s(dir.path())]);
    assert_eq!(code, 0, "{err}");
    assert!(out.contains("ln_co2"));
    let el = fs::read_to_string(dir.path().join("elasticities.csv")).unwrap();
    let rows: Vec<&str> = el.lines().collect();
    assert_eq!(rows[0], "variable,elasticity");
    assert!(rows[1].starts_with("ln_co2,"));
    for f in [
        "regression.json",
        "stepwise_trace.csv",
        "eval_regression.json",
        "series_regression.csv",
    ] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let series = fs::read_to_string(dir.path().join("series_regression.csv")).unwrap();
    assert!(series.starts_with("country,year,actual,predicted,model\n"));
    assert_eq!(series.lines().count(), 101);
}

#[test]
fn no_log_fits_raw_variables() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out, err) = run_cli(&["fit-reg", "--no-log", "--out", s(dir.path())]);
    assert_eq!(code, 0, "{err}");
    assert!(!out.contains("ln_"));
    assert!(out.contains("energy_use"));
    assert!(!dir.path().join("elasticities.csv").exists());
    let art: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("regression.json")).unwrap()).unwrap();
    assert_eq!(art["log_transform"], false);
    assert!(art["elasticities"].is_null());
}

#[test]
fn config_file_is_applied_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(
        &cfg,
        format!(
            "out = {:?}\nhidden = 3\nmax_epochs = 20\nseed = 4\n",
            s(&dir.path().join("a"))
        ),
    )
    .unwrap();
    let (code, _, err) = run_cli(&["fit-mlp", "--config", s(&cfg), "--seed", "5"]);
    assert_eq!(code, 0, "{err}");
    let model: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("a/mlp_model.json")).unwrap()).unwrap();
    assert_eq!(model["model"]["sizes"]["hidden"], 3);
    assert_eq!(model["model"]["seed"], 5);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("a/train_report.json")).unwrap()).unwrap();
    assert!(report["epochs"].as_u64().unwrap() <= 20);

    fs::write(&cfg, "hiden = 3\n").unwrap();
    assert_eq!(run_cli(&["fit-mlp", "--config", s(&cfg)]).0, 1);
}

#[test]
fn fit_mlp_default_layout_and_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, err) = run_cli(&["fit-mlp", "--max-epochs", "50", "--out", s(dir.path())]);
    assert_eq!(code, 0, "{err}");
    let model: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("mlp_model.json")).unwrap()).unwrap();
    let sizes = &model["model"]["sizes"];
    assert_eq!(
        (
            sizes["inputs"].as_u64(),
            sizes["hidden"].as_u64(),
            sizes["outputs"].as_u64()
        ),
        (Some(3), Some(2), Some(1))
    );
    assert_eq!(model["format"], "energy-models/mlp");
    assert!(model["input_fingerprint"].is_string());
    for f in [
        "train_report.json",
        "loss.csv",
        "importance.json",
        "eval_mlp.json",
        "series_mlp.csv",
        "partition.json",
    ] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let part: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("partition.json")).unwrap()).unwrap();
    assert_eq!(part["train_idx"].as_array().unwrap().len(), 70);
    assert_eq!(part["test_idx"].as_array().unwrap().len(), 18);
    assert_eq!(part["holdout_idx"].as_array().unwrap().len(), 12);
}

fn snapshot_with_row_removed(dir: &Path) -> std::path::PathBuf {
    let csv = energy_models::snapshot::BALKAN_CSV;
    let mut lines: Vec<&str> = csv.lines().collect();
    lines.remove(5);
    let path = dir.join("trimmed.csv");
    fs::write(&path, lines.join("\n") + "\n").unwrap();
    path
}

#[test]
fn compare_flags_winner_tie_and_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    assert_eq!(run_cli(&["fit-reg", "--out", s(out)]).0, 0);
    assert_eq!(run_cli(&["fit-mlp", "--max-epochs", "200", "--out", s(out)]).0, 0);
    let reg = out.join("regression.json");
    let mlp = out.join("mlp_model.json");

    let (code, _, err) = run_cli(&["compare", "--model", s(&reg), "--model", s(&mlp), "--out", s(out)]);
    assert_eq!(code, 0, "{err}");
    let table: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("comparison.json")).unwrap()).unwrap();
    assert_eq!(table["models"].as_array().unwrap().len(), 2);
    assert!(fs::read_to_string(out.join("comparison.csv"))
        .unwrap()
        .starts_with("model,rmse,mape,rmse_winner,mape_winner\n"));

    let (code, _, _) = run_cli(&["compare", "--model", s(&reg), "--model", s(&reg), "--out", s(out)]);
    assert_eq!(code, 0);
    let csv = fs::read_to_string(out.join("comparison.csv")).unwrap();
    assert!(csv.contains("regression,") && csv.contains("regression#2,"));
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",tie,tie")), "{csv}");

    let other = out.join("other");
    let trimmed = snapshot_with_row_removed(out);
    assert_eq!(run_cli(&["fit-reg", "--input", s(&trimmed), "--out", s(&other)]).0, 0);
    let (code, _, err) = run_cli(&[
        "compare",
        "--model",
        s(&reg),
        "--model",
        s(&other.join("regression.json")),
        "--out",
        s(out),
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("different input"), "{err}");

    assert_eq!(run_cli(&["compare", "--model", s(&reg), "--out", s(out)]).0, 2);
}

#[test]
fn compare_rejects_unknown_artifact_versions() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    assert_eq!(run_cli(&["fit-reg", "--out", s(out)]).0, 0);
    let text = fs::read_to_string(out.join("regression.json")).unwrap();
    let bumped = out.join("v2.json");
    fs::write(&bumped, text.replacen("\"version\": 1", "\"version\": 2", 1)).unwrap();
    let reg = out.join("regression.json");
    let (code, _, err) = run_cli(&["compare", "--model", s(&reg), "--model", s(&bumped), "--out", s(out)]);
    assert_eq!(code, 2);
    assert!(err.contains("version 2"), "{err}");
}

#[test]
fn predict_writes_series_for_new_data() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    assert_eq!(run_cli(&["fit-reg", "--out", s(out)]).0, 0);
    let trimmed = snapshot_with_row_removed(out);
    let (code, _, err) = run_cli(&[
        "predict",
        "--model",
        s(&out.join("regression.json")),
        "--input",
        s(&trimmed),
        "--out",
        s(out),
    ]);
    assert_eq!(code, 0, "{err}");
    let csv = fs::read_to_string(out.join("predictions.csv")).unwrap();
    assert_eq!(csv.lines().count(), 100);
}

#[test]
fn eval_on_holdout_restricts_series() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "eval_on = \"holdout\"\n").unwrap();
    assert_eq!(run_cli(&["fit-reg", "--config", s(&cfg), "--out", s(dir.path())]).0, 0);
    let series = fs::read_to_string(dir.path().join("series_regression.csv")).unwrap();
    assert_eq!(series.lines().count(), 1 + 12);
}

#[test]
fn constant_predictors_are_data_errors() {
    let dir = tempfile::tempdir().unwrap();
    let huge = dir.path().join("flat.csv");
    let mut csv =
        String::from("country,year,co2_mt_per_capita,gdp_const2010_usd,energy_use_kgoe_per_capita,population\n");
    for y in 1995..2015 {
        csv.push_str(&format!("A,{y},1,2,{},4\n", 100 + y));
    }
    fs::write(&huge, csv).unwrap();
    let (code, _, _) = run_cli(&["fit-mlp", "--input", s(&huge), "--out", s(dir.path())]);
    assert_eq!(code, 2);
    let (code, _, _) = run_cli(&["fit-reg", "--input", s(&huge), "--out", s(dir.path())]);
    assert_ne!(code, 0);
}

#[test]
fn saved_models_reproduce_fit_time_predictions() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path();
    assert_eq!(run_cli(&["fit-reg", "--out", s(out)]).0, 0);
    assert_eq!(run_cli(&["fit-mlp", "--max-epochs", "100", "--out", s(out)]).0, 0);
    for (model, series) in [
        ("regression.json", "series_regression.csv"),
        ("mlp_model.json", "series_mlp.csv"),
    ] {
        let pred_dir = out.join(format!("predict-{model}"));
        let (code, _, err) = run_cli(&["predict", "--model", s(&out.join(model)), "--out", s(&pred_dir)]);
        assert_eq!(code, 0, "{err}");
        assert_eq!(
            fs::read_to_string(pred_dir.join("predictions.csv")).unwrap(),
            fs::read_to_string(out.join(series)).unwrap(),
            "{model}"
        );
    }
}
