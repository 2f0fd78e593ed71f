use std::fs;
use std::process::{Command, Output};

fn hqr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hqr"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn verify_single_check_passes() {
    let out = hqr(&[
        "verify",
        "--theorem",
        "zygmund-hqr",
        "--family",
        "shifted-halfplane",
        "--k",
        "0.5",
        "--c",
        "1",
        "--r",
        "0.9",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let reports = json["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0]["verdict"], "pass");
    assert_eq!(reports[0]["theorem_id"], "zygmund-hqr");
    assert_eq!(reports[0]["params"]["k"], 0.5);
}

#[test]
fn zoo_list_lists_every_family() {
    let out = hqr(&["zoo-list"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    for family in [
        "shifted-halfplane",
        "variable-dilatation",
        "poisson",
        "tilted-halfplane",
    ] {
        assert!(text.contains(family), "{family} missing");
    }
}

#[test]
fn means_rejects_zero_exponent() {
    let out = hqr(&[
        "means",
        "--family",
        "shifted-halfplane",
        "--k",
        "0",
        "--c",
        "1",
        "--p",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("(0, inf]"));
}

#[test]
fn bad_flag_value_exits_two() {
    let out = hqr(&["verify", "--theorem", "zygmund-hqr", "--k", "half"]);
    assert_eq!(out.status.code(), Some(2));
    let out = hqr(&["verify", "--theorem", "nonsense", "--family", "poisson"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown theorem"));
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.conf");
    fs::write(
        &config,
        "# single check\ntheorem = zygmund-classical\nfamily = shifted-halfplane\nk = 0.2\nc = 1\nr = 0.5\nformat = csv\n",
    )
    .unwrap();
    let config = config.to_str().unwrap();

    let out = hqr(&["verify", "--config", config]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = stdout(&out);
    assert!(csv
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("zygmund-classical,shifted-halfplane,c=1;k=0.2,0.5,"));

    let out = hqr(&["verify", "--config", config, "--k", "0.5", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let json: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["reports"][0]["params"]["k"], 0.5);
}

#[test]
fn unknown_config_key_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.conf");
    fs::write(&config, "family = poisson\ncolour = blue\n").unwrap();
    let out = hqr(&["means", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown config key `colour`"));
}

#[test]
fn out_and_csv_files_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("r.json");
    let csv_path = dir.path().join("r.csv");
    let out = hqr(&[
        "verify",
        "--theorem",
        "kolmogorov-hqr-upper",
        "--family",
        "poisson",
        "--alpha",
        "0.5",
        "--c",
        "1",
        "--r",
        "0.5,0.9",
        "--p",
        "0.3,0.5",
        "--out",
        json_path.to_str().unwrap(),
        "--csv",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).is_empty());
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(json["summary"]["pass"], 4);
    assert_eq!(fs::read_to_string(&csv_path).unwrap().lines().count(), 5);
}

#[test]
fn means_csv_is_plot_ready() {
    let out = hqr(&[
        "means",
        "--family",
        "poisson",
        "--alpha",
        "0.5",
        "--c",
        "1",
        "--r",
        "0.5,0.9",
        "--quantity",
        "mean-of-v",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "quantity,p,r,value");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("mean-of-v,1.0,0.5,"));
}

#[test]
fn probe_on_one_space_is_reproducible() {
    let args = [
        "probe",
        "--theorem",
        "riesz-identity",
        "--family",
        "tilted-halfplane",
        "--steps",
        "20",
        "--trace",
    ];
    let first = hqr(&args);
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    assert_eq!(first.stdout, hqr(&args).stdout);
    let json: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    let result = &json[0];
    assert_eq!(result["r_cap"], 0.999);
    assert!(result["trace"].as_array().unwrap().len() <= result["evaluations"].as_u64().unwrap() as usize);
}
