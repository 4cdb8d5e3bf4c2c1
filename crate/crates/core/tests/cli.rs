use std::process::Command as Proc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use alphamod::alpha_covering::read_partition_dump;
use alphamod::cli_reports::{exit_code, parse_space, render, run, Command, Format, RunConfig};
use alphamod::grid_transforms::io::{write_grid_binary, write_grid_csv};
use alphamod::grid_transforms::{bump_function, FreqGrid};
use alphamod::index_calculus::embedding_decide;
use alphamod::Error;

fn alphamod(args: &[&str]) -> (i32, String, String) {
    let out = Proc::new(env!("CARGO_BIN_EXE_alphamod")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

#[test]
fn decide_identical_spaces() {
    let s = "p=2,q=2,s=0,alpha=1/2";
    let (code, out, _) = alphamod(&["decide", "--source", s, "--target", s]);
    assert_eq!(code, 0);
    let d = json(&out);
    assert_eq!(d["embeds"], true);
    assert_eq!(d["margin"], 0.0);
    assert_eq!(d["q_case"], "QDown");
    assert_eq!(d["schema"], "alphamod/1");
    assert_eq!(d["config"]["source"]["alpha"], "1/2");
}

#[test]
fn non_embedding_still_exits_zero() {
    let (code, out, _) = alphamod(&["decide", "--source", "p=2,q=2,alpha=0", "--target", "p=2,q=1,alpha=0"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["embeds"], false);
}

#[test]
fn index_example() {
    let (code, out, _) = alphamod(&["index", "--source", "p=1,q=inf,alpha=0", "--target", "p=inf,q=inf,alpha=1/2"]);
    assert_eq!(code, 0);
    let d = json(&out);
    assert_eq!(d["terms"], serde_json::json!([0.0, 0.5, 0.0]));
    assert_eq!(d["value"], 0.5);
    assert_eq!(d["exact"]["value"], "1/2");
    assert_eq!(d["regions"], serde_json::json!(["S2"]));
}

#[test]
fn exit_codes() {
    let (code, _, err) = alphamod(&["decide", "--source", "p=2,q=zz,alpha=0", "--target", "p=2,q=2,alpha=0"]);
    assert_eq!(code, 2, "{err}");
    let (code, _, _) = alphamod(&["decide", "--bogus"]);
    assert_eq!(code, 2);
    let (code, _, _) = alphamod(&["decide", "--source", "p=2,q=2,alpha=2", "--target", "p=2,q=2,alpha=0"]);
    assert_eq!(code, 3);
    let (code, _, _) = alphamod(&["decide", "--source", "p=2,q=2,alpha=0"]);
    assert_eq!(code, 3);
    assert_eq!(exit_code(&Error::Check("x".into())), 4);
    assert_eq!(exit_code(&Error::Geometry("x".into())), 3);
}

#[test]
fn thread_cap_from_environment() {
    let bin = env!("CARGO_BIN_EXE_alphamod");
    let args = ["decide", "--source", "p=2,q=2,alpha=0", "--target", "p=2,q=2,alpha=0"];
    let ok = Proc::new(bin).args(args).env("ALPHAMOD_THREADS", "1").output().unwrap();
    assert!(ok.status.success());
    let bad = Proc::new(bin).args(args).env("ALPHAMOD_THREADS", "many").output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn decide_matches_library_on_fuzzed_configs() {
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    let exps = ["1/2", "1", "4/3", "2", "3", "inf"];
    let alphas = ["0", "1/4", "1/3", "1/2", "3/4", "1"];
    for _ in 0..1000 {
        let mut pick = |xs: &[&'static str]| xs[rng.random_range(0..xs.len())];
        let (p1, q1, a1, p2, q2, a2) = (pick(&exps), pick(&exps), pick(&alphas), pick(&exps), pick(&exps), pick(&alphas));
        let n = rng.random_range(1..=3);
        let s1 = rng.random_range(-8..=8);
        let src = format!("p={p1},q={q1},s={s1}/4,alpha={a1},n={n}");
        let tgt = format!("p={p2},q={q2},s=0,alpha={a2},n={n}");
        let cfg = RunConfig::new(Command::Decide).with_spaces(&src, &tgt).unwrap();
        let doc = run(&cfg).unwrap().document;
        let direct = embedding_decide(&parse_space(&src).unwrap(), &parse_space(&tgt).unwrap()).unwrap();
        assert_eq!(doc["embeds"], direct.embeds, "{src} -> {tgt}");
        assert_eq!(doc["exact"]["margin"], direct.margin.to_string());
    }
}

#[test]
fn normcalc_reads_both_file_formats() {
    let dir = tempfile::tempdir().unwrap();
    let grid = FreqGrid::new(1, 2048, 32.0).unwrap();
    let f = bump_function(&grid, [3.0, 0.0], 2.0, [10.0, 0.0]).unwrap();
    let bin = dir.path().join("f.amgf");
    let csv = dir.path().join("f.csv");
    write_grid_binary(&f, std::fs::File::create(&bin).unwrap()).unwrap();
    write_grid_csv(&f, std::fs::File::create(&csv).unwrap()).unwrap();
    let mut values = Vec::new();
    for path in [&bin, &csv] {
        let (code, out, err) = alphamod(&["normcalc", "--source", "p=2,q=2,alpha=1/2", "--input", path.to_str().unwrap()]);
        assert_eq!(code, 0, "{err}");
        values.push(json(&out)["norm"]["value"].as_f64().unwrap());
    }
    assert!((values[0] - values[1]).abs() <= 1e-9 * values[0]);
    // near-Plancherel: ‖f‖_2 within the partition constants
    let l2 = alphamod::grid_transforms::lp_quasinorm(&f, 0.5).unwrap();
    assert!((0.5..=2.0).contains(&(values[0] / l2)), "{} vs {l2}", values[0]);
}

#[test]
fn normcalc_builtins() {
    for b in ["gaussian", "bump", "tone"] {
        let (code, out, err) = alphamod(&["normcalc", "--source", "p=2,q=1,alpha=0", "--builtin", b, "--grid", "1024,16"]);
        assert_eq!(code, 0, "{b}: {err}");
        assert!(json(&out)["norm"]["value"].as_f64().unwrap() > 0.0);
    }
}

#[test]
fn covering_exports() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("p.ampd");
    let out_csv = dir.path().join("p.csv");
    let (code, _, err) = alphamod(&[
        "covering",
        "--alpha",
        "1/4",
        "--grid",
        "2048,16",
        "--dump",
        dump.to_str().unwrap(),
        "--format",
        "csv",
        "--out",
        out_csv.to_str().unwrap(),
    ]);
    assert_eq!(code, 0, "{err}");
    let rows = std::fs::read_to_string(&out_csv).unwrap();
    let d = read_partition_dump(std::fs::File::open(&dump).unwrap()).unwrap();
    assert_eq!(rows.lines().count(), d.members.len() + 1);
    assert!(rows.starts_with("k,"));
    assert_eq!(d.alpha, 0.25);

    let (code, out, _) = alphamod(&["covering", "--alpha", "1", "--grid", "2048,16"]);
    assert_eq!(code, 0);
    let rep = json(&out);
    assert!(rep["report"]["max_sum_deviation"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn renderings_are_consistent() {
    let mut cfg = RunConfig::new(Command::Index).with_spaces("p=2,q=1,alpha=1/4", "p=4,q=1,alpha=3/4").unwrap();
    cfg.seed = 17;
    let out = run(&cfg).unwrap();
    let as_json = json(&render(&cfg, &out).unwrap());
    assert_eq!(as_json, out.document);
    assert_eq!(as_json["seed"], 17);
    cfg.format = Format::Text;
    let text = render(&cfg, &out).unwrap();
    assert!(text.lines().any(|l| l.starts_with("schema") && l.ends_with("alphamod/1")));
    cfg.format = Format::Csv;
    let csv = render(&cfg, &out).unwrap();
    assert!(csv.starts_with("key,value\n"));
    assert!(csv.contains("\nvalue,"));
}

#[test]
fn verify_embedding_reports_dilation_when_p_order_fails() {
    let (code, out, err) = alphamod(&["verify-embedding", "--source", "p=inf,q=2,alpha=0", "--target", "p=2,q=2,alpha=0"]);
    assert_eq!(code, 0, "{err}");
    let d = json(&out);
    assert_eq!(d["verdict"]["embeds"], false);
    assert!(d["consistency"].is_null());
    assert!((d["dilation"]["fit"]["slope"].as_f64().unwrap() + 0.5).abs() <= 0.05);
    assert_eq!(d["pass"], true);
}

#[test]
fn verify_asymptotics_csv_samples() {
    let (code, out, err) = alphamod(&[
        "verify-asymptotics",
        "--source",
        "p=2,q=2,alpha=1/2",
        "--target",
        "p=2,q=2,alpha=1/2",
        "--j-range",
        "3..7",
        "--format",
        "csv",
    ]);
    assert_eq!(code, 0, "{err}");
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("case,j,j_eff,k,witness,lower_bound"));
    assert_eq!(lines.count(), 15);
}
