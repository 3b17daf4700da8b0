use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn hftml(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hftml")).args(args).env_remove("HFTML_THREADS").output().expect("spawn hftml")
}

fn ok(args: &[&str]) -> String {
    let out = hftml(args);
    assert!(out.status.success(), "hftml {args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn lines(path: &Path) -> usize {
    std::fs::read_to_string(path).unwrap().lines().count()
}

struct Pipeline {
    _tmp: tempfile::TempDir,
    root: PathBuf,
}

impl Pipeline {
    fn new(stocks: &str, days: &str) -> Pipeline {
        let tmp = tempfile::tempdir().unwrap();
        let root = tmp.path().to_path_buf();
        let d = |n: &str| root.join(n);
        ok(&["synth", "--stocks", stocks, "--days", days, "--seed", "7", "--out", p(&d("raw"))]);
        ok(&["features", "--trades", p(&d("raw/trades.csv")), "--quotes", p(&d("raw/quotes.csv")), "--out", p(&d("feat"))]);
        ok(&["targets", "--trades", p(&d("raw/trades.csv")), "--out", p(&d("tgt"))]);
        Pipeline { _tmp: tmp, root }
    }

    fn path(&self, rel: &str) -> PathBuf {
        self.root.join(rel)
    }
}

#[test]
fn help_exits_zero_and_lists_flags() {
    let out = hftml(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for cmd in ["synth", "features", "targets", "train", "cv", "gridsearch", "compare", "predict", "importance", "pdp", "latarb", "eventstudy", "did", "ols", "iv", "winsorize", "stats"] {
        assert!(text.contains(cmd), "help lacks {cmd}");
    }
    let sub = hftml(&["synth", "--help"]);
    assert_eq!(sub.status.code(), Some(0));
    let text = String::from_utf8_lossy(&sub.stdout);
    for flag in ["--stocks", "--days", "--seed", "--out", "--config", "--threads"] {
        assert!(text.contains(flag), "synth help lacks {flag}");
    }
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(hftml(&["synth", "--bogus"]).status.code(), Some(1));
    assert_eq!(hftml(&["nosuchcommand"]).status.code(), Some(1));
    assert_eq!(hftml(&["synth", "--stocks", "abc", "--out", "x"]).status.code(), Some(1));
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.toml");
    std::fs::write(&cfg, "no_such_key = 1\n").unwrap();
    assert_eq!(hftml(&["--config", p(&cfg), "synth", "--out", p(&tmp.path().join("o"))]).status.code(), Some(1));
}

#[test]
fn data_errors_exit_two_with_row_context() {
    let tmp = tempfile::tempdir().unwrap();
    let trades = tmp.path().join("trades.csv");
    let quotes = tmp.path().join("quotes.csv");
    std::fs::write(&trades, "stock,date,ts_ns,price,size,iso,venue\nAAA,2010-01-04,34200000000000,10.00,100,0,N\nAAA,2010-01-04,34201000000000,notaprice,100,0,N\n").unwrap();
    std::fs::write(&quotes, "stock,date,ts_ns,bid,bid_sz,ask,ask_sz\nAAA,2010-01-04,34200000000000,9.99,100,10.01,100\n").unwrap();
    let out = hftml(&["features", "--trades", p(&trades), "--quotes", p(&quotes), "--out", p(&tmp.path().join("f"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"), "{}", String::from_utf8_lossy(&out.stderr));

    let lenient = hftml(&["features", "--trades", p(&trades), "--quotes", p(&quotes), "--lenient", "--out", p(&tmp.path().join("f"))]);
    assert_eq!(lenient.status.code(), Some(0));

    assert_eq!(hftml(&["ols", "--panel", p(&tmp.path().join("missing.csv"))]).status.code(), Some(2));
    let panel = tmp.path().join("panel.csv");
    std::fs::write(&panel, "entity,time,y,x\na,1,1.0,2.0\na,2,oops,1.0\n").unwrap();
    assert_eq!(hftml(&["ols", "--panel", p(&panel)]).status.code(), Some(2));
}

#[test]
fn synth_is_byte_identical_on_rerun() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    ok(&["synth", "--stocks", "5", "--days", "10", "--seed", "7", "--out", p(&a)]);
    ok(&["synth", "--stocks", "5", "--days", "10", "--seed", "7", "--threads", "1", "--out", p(&b)]);
    for f in ["trades.csv", "quotes.csv", "latent.csv", "hftml.toml"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f} differs");
    }
    assert_eq!(lines(&a.join("latent.csv")), 51);
}

#[test]
fn pipeline_trains_predicts_and_cross_validates() {
    let pl = Pipeline::new("6", "20");
    let feats = pl.path("feat/features.csv");
    let tgts = pl.path("tgt/targets.csv");
    assert_eq!(lines(&feats), 121);
    assert_eq!(lines(&tgts), 121);

    ok(&["train", "--features", p(&feats), "--targets", p(&tgts), "--trees", "30", "--min-split", "5", "--seed", "1", "--out", p(&pl.path("m1"))]);
    ok(&["train", "--features", p(&feats), "--targets", p(&tgts), "--trees", "30", "--min-split", "5", "--seed", "1", "--threads", "1", "--out", p(&pl.path("m2"))]);
    let model = pl.path("m1/model.bin");
    assert_eq!(std::fs::read(&model).unwrap(), std::fs::read(pl.path("m2/model.bin")).unwrap());

    ok(&["predict", "--model", p(&model), "--features", p(&feats), "--out", p(&pl.path("pred"))]);
    let complete = std::fs::read_to_string(&feats).unwrap().lines().skip(1).filter(|l| !l.contains(",,") && !l.ends_with(',')).count();
    assert_eq!(lines(&pl.path("pred/predictions.csv")) - 1, complete);

    let cv = ok(&["cv", "--features", p(&feats), "--targets", p(&tgts), "--trees", "40", "--min-split", "5", "--iterations", "3", "--sample-size", "100", "--out", p(&pl.path("cv"))]);
    let et_line = cv.lines().find(|l| l.starts_with("ET")).expect("ET summary line");
    let mean: f64 = et_line.split("mean_r2=").nth(1).unwrap().split_whitespace().next().unwrap().parse().unwrap();
    assert!(mean > 0.0, "cv output: {cv}");
    assert!(cv.contains("OLS mean_r2="));
    assert_eq!(lines(&pl.path("cv/cv.csv")), 4);

    ok(&["importance", "--model", p(&model), "--out", p(&pl.path("imp"))]);
    assert_eq!(lines(&pl.path("imp/importance.csv")), 25);
    ok(&["pdp", "--model", p(&model), "--features", p(&feats), "--feature", "AVG_PRICE_M,IVOL_Q", "--grid", "5", "--out", p(&pl.path("pdp"))]);
    assert_eq!(lines(&pl.path("pdp/pdp.csv")), 11);
}

#[test]
fn config_file_is_overridden_by_flags_and_echoed() {
    let pl = Pipeline::new("3", "6");
    let cfg = pl.path("run.toml");
    std::fs::write(&cfg, "[forest]\nn_trees = 3\nmin_split_samples = 4\n").unwrap();
    let args = |out: &str, extra: &[&str]| {
        let mut v = vec!["--config".to_string(), p(&cfg).to_string(), "train".into(), "--features".into(), p(&pl.path("feat/features.csv")).into(), "--targets".into(), p(&pl.path("tgt/targets.csv")).into()];
        v.extend(extra.iter().map(|s| s.to_string()));
        v.extend(["--out".to_string(), p(&pl.path(out)).to_string()]);
        v
    };
    let a = args("c1", &[]);
    ok(&a.iter().map(String::as_str).collect::<Vec<_>>());
    let b = args("c2", &["--trees", "5"]);
    ok(&b.iter().map(String::as_str).collect::<Vec<_>>());
    let info = |d: &str| -> serde_json::Value { serde_json::from_str(&std::fs::read_to_string(pl.path(d).join("model.json")).unwrap()).unwrap() };
    assert_eq!(info("c1")["params"]["n_trees"], 3);
    assert_eq!(info("c1")["params"]["min_split_samples"], 4);
    assert_eq!(info("c2")["params"]["n_trees"], 5);
    let echoed: toml::Value = toml::from_str(&std::fs::read_to_string(pl.path("c2/hftml.toml")).unwrap()).unwrap();
    assert_eq!(echoed["forest"]["n_trees"].as_integer(), Some(5));
    assert_eq!(echoed["forest"]["min_split_samples"].as_integer(), Some(4));
}

#[test]
fn latarb_counts_and_lists_events() {
    let pl = Pipeline::new("2", "3");
    ok(&["latarb", "--quotes", p(&pl.path("raw/quotes.csv")), "--events", "--out", p(&pl.path("la"))]);
    let nlao = std::fs::read_to_string(pl.path("la/nlao.csv")).unwrap();
    assert!(nlao.starts_with("stock,date,nlao,up,down"));
    assert_eq!(nlao.lines().count(), 7);
    let total: u64 = nlao.lines().skip(1).map(|l| l.split(',').nth(2).unwrap().parse::<u64>().unwrap()).sum();
    assert_eq!(lines(&pl.path("la/latarb_events.csv")) as u64 - 1, total);
}

#[test]
fn econometric_commands_emit_fit_json() {
    let tmp = tempfile::tempdir().unwrap();
    let mut panel = String::from("entity,time,y,x,z\n");
    let mut did = String::from("entity,time,y,treated,post,c\n");
    for e in 0..8 {
        for t in 0..6 {
            let x = ((e * 7 + t * 3) % 11) as f64 / 11.0;
            let z = ((e * 5 + t * 2) % 7) as f64 / 7.0;
            let y = 0.5 * x - 0.25 * z + 0.1 * e as f64 + 0.05 * t as f64 + 0.01 * (((e * 13 + t * 17) % 5) as f64 - 2.0);
            panel.push_str(&format!("e{e},t{t},{y},{x},{z}\n"));
            let (tr, po) = (e % 2 == 0, t >= 3);
            let c = z;
            let yd = 0.3 + 0.02 * e as f64 + 0.01 * t as f64 + 0.1 * c + if tr && po { -0.008 } else { 0.0 };
            did.push_str(&format!("e{e},t{t},{yd},{},{},{c}\n", u8::from(tr), u8::from(po)));
        }
    }
    let (pp, dp) = (tmp.path().join("panel.csv"), tmp.path().join("did.csv"));
    std::fs::write(&pp, &panel).unwrap();
    std::fs::write(&dp, &did).unwrap();

    let fit: serde_json::Value = serde_json::from_str(&ok(&["ols", "--panel", p(&pp), "--out", p(&tmp.path().join("ols"))])).unwrap();
    assert_eq!(fit["n_obs"], 48);
    assert_eq!(fit["names"][0], "x");
    assert!(tmp.path().join("ols/fit.json").exists() && tmp.path().join("ols/hftml.toml").exists());

    let did_fit: serde_json::Value = serde_json::from_str(&ok(&["did", "--panel", p(&dp)])).unwrap();
    assert!((did_fit["coef"][0].as_f64().unwrap() + 0.008).abs() < 1e-9, "{did_fit}");

    let iv: serde_json::Value = serde_json::from_str(&ok(&["iv", "--panel", p(&pp), "--endog", "x", "--instrument", "x"])).unwrap();
    let b_iv = iv["second_stage"]["coef"][0].as_f64().unwrap();
    assert!((b_iv - fit["coef"][0].as_f64().unwrap()).abs() < 1e-8);
    assert_eq!(hftml(&["iv", "--panel", p(&pp), "--endog", "x", "--instrument", "nope"]).status.code(), Some(1));

    let stats = ok(&["stats", "--input", p(&pp), "--columns", "x,y"]);
    assert!(stats.starts_with("column,n,mean,std"));
    assert_eq!(stats.lines().count(), 3);
    ok(&["winsorize", "--input", p(&pp), "--columns", "y", "--p", "0.1", "--out", p(&tmp.path().join("w"))]);
    let w = std::fs::read_to_string(tmp.path().join("w/winsorized.csv")).unwrap();
    assert_eq!(w.lines().count(), 49);
}

#[test]
fn eventstudy_and_jump_run_on_daily_files() {
    let tmp = tempfile::tempdir().unwrap();
    let start = chrono::NaiveDate::from_ymd_opt(2010, 1, 1).unwrap();
    let mut series = String::from("stock,date,hft_d\n");
    let mut returns = String::from("stock,date,ret\n");
    let mut events = String::from("stock,event_date,kind\n");
    for s in 0..4 {
        for d in 0..320i64 {
            let date = start + chrono::Days::new(d as u64);
            let bump = if (200..=202).contains(&d) { 0.05 } else { 0.0 };
            series.push_str(&format!("S{s},{date},{}\n", 0.3 + bump + 0.001 * ((d * 7 + s) % 5) as f64));
            let m = 0.001 * ((d * 3) % 7) as f64 - 0.003;
            if s == 0 {
                returns.push_str(&format!("market,{date},{m}\n"));
            }
            let jump = if d == 200 { 0.04 } else if d == 185 { 0.02 } else { 0.0 };
            returns.push_str(&format!("S{s},{date},{}\n", 1.1 * m + jump + 0.0005 * ((d * 11 + s) % 3) as f64));
        }
        events.push_str(&format!("S{s},{},earnings\n", start + chrono::Days::new(200)));
    }
    let (sp, rp, ep) = (tmp.path().join("s.csv"), tmp.path().join("r.csv"), tmp.path().join("e.csv"));
    std::fs::write(&sp, series).unwrap();
    std::fs::write(&rp, returns).unwrap();
    std::fs::write(&ep, events).unwrap();

    let es: serde_json::Value = serde_json::from_str(&ok(&["eventstudy", "--series", p(&sp), "--events", p(&ep), "--out", p(&tmp.path().join("es"))])).unwrap();
    assert_eq!(es["n_events"], 4);
    assert!(es["difference"].as_f64().unwrap() > 0.04);
    assert_eq!(lines(&tmp.path().join("es/event_path.csv")), 22);

    ok(&["jump", "--returns", p(&rp), "--events", p(&ep), "--winsorize", "0", "--out", p(&tmp.path().join("j"))]);
    let jump = std::fs::read_to_string(tmp.path().join("j/jump.csv")).unwrap();
    assert_eq!(jump.lines().count(), 5);
    for l in jump.lines().skip(1) {
        let j: f64 = l.split(',').nth(2).unwrap().parse().unwrap();
        assert!(j > 0.5 && j < 0.8, "{l}");
    }
}
