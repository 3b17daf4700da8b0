use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use hftml_core::featureset::{
    assemble_feature_matrix, compute_features_batch, read_features_csv, write_features_csv, AssemblyMode, FeatureRow, RowKey,
};
use hftml_core::interpret::{feature_importance, partial_dependence, write_importance_csv, write_pdp_csv};
use hftml_core::latarb::{scan_batch, write_events_csv, write_nlao_csv};
use hftml_core::modelsel::{
    compare_methods, grid_search, linear_cv, monte_carlo_cv, write_comparison_csv, write_cv_csv, write_grid_csv, write_summary_csv,
};
use hftml_core::panelmetrics::events::{NARROW_WINDOW, WIDE_WINDOW};
use hftml_core::panelmetrics::{
    abnormal_returns, did_estimate, event_position, event_study, jump_ratio, panel_ols, read_daily_csv, read_events_csv, read_panel_csv,
    summary_stats, two_sls, winsorize, winsorize_jumps, DropTally, EventObs, JumpRecord, PanelError, PanelSpec,
};
use hftml_core::tickdata::{
    compute_targets, merge_series, parse_tick_reader, synth_market, write_latent_csv, write_quotes_csv, write_trades_csv, FileKind,
    ParseOptions, ParseReport, TargetError,
};
use hftml_core::{Ensemble, FeatureMatrix, Method, Price, TickSeries};
use serde::Serialize;

use crate::args::*;
use crate::config::RunConfig;
use crate::tables::{self, Table};
use crate::Usage;

pub fn dispatch(cmd: Command, cfg: RunConfig) -> anyhow::Result<()> {
    match cmd {
        Command::Synth(a) => synth(a, cfg),
        Command::Features(a) => features(a, cfg),
        Command::Targets(a) => targets(a, cfg),
        Command::Train(a) => train(a, cfg),
        Command::Cv(a) => cv(a, cfg),
        Command::Gridsearch(a) => gridsearch(a, cfg),
        Command::Compare(a) => compare(a, cfg),
        Command::Predict(a) => predict(a, cfg),
        Command::Importance(a) => importance(a, cfg),
        Command::Pdp(a) => pdp(a, cfg),
        Command::Latarb(a) => latarb(a, cfg),
        Command::Eventstudy(a) => eventstudy(a, cfg),
        Command::Jump(a) => jump(a, cfg),
        Command::Did(a) => did(a, cfg),
        Command::Ols(a) => ols(a, cfg),
        Command::Iv(a) => iv(a, cfg),
        Command::Winsorize(a) => winsorize_cmd(a, cfg),
        Command::Stats(a) => stats(a, cfg),
    }
}

fn open(path: &Path) -> anyhow::Result<BufReader<File>> {
    File::open(path).map(BufReader::new).with_context(|| format!("cannot open {}", path.display()))
}

fn out_dir(dir: &Path, cfg: &RunConfig) -> anyhow::Result<PathBuf> {
    std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    cfg.echo(dir)?;
    Ok(dir.to_path_buf())
}

fn create(dir: &Path, name: &str) -> anyhow::Result<BufWriter<File>> {
    let path = dir.join(name);
    File::create(&path).map(BufWriter::new).with_context(|| format!("cannot create {}", path.display()))
}

fn write_json<T: Serialize>(dir: Option<&Path>, name: &str, value: &T) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    println!("{text}");
    if let Some(dir) = dir {
        std::fs::write(dir.join(name), text + "\n").with_context(|| format!("writing {name}"))?;
    }
    Ok(())
}

fn read_ticks(path: &Path, kind: Option<FileKind>, sort: bool, lenient: bool) -> anyhow::Result<ParseReport> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let kind = kind.unwrap_or_else(|| {
        let first = bytes.split(|&b| b == b'\n').next().unwrap_or_default();
        if String::from_utf8_lossy(first).split(',').any(|c| c.trim() == "profile") {
            FileKind::Labeled
        } else {
            FileKind::Trades
        }
    });
    let report = parse_tick_reader(&bytes[..], kind, ParseOptions { sort }).with_context(|| format!("parsing {}", path.display()))?;
    if !report.rejected.is_empty() {
        let first: Vec<String> = report.rejected.iter().take(5).map(|r| format!("line {}: {}", r.line, r.message)).collect();
        if !lenient {
            bail!("{}: {} invalid rows; {}", path.display(), report.rejected.len(), first.join("; "));
        }
        log::warn!("{}: skipped {} invalid rows; {}", path.display(), report.rejected.len(), first.join("; "));
    }
    if report.crossed_quotes > 0 {
        log::info!("{}: {} crossed or locked quotes kept", path.display(), report.crossed_quotes);
    }
    Ok(report)
}

fn synth(a: SynthArgs, mut cfg: RunConfig) -> anyhow::Result<()> {
    cfg.apply_seed(a.seed);
    if let Some(n) = a.stocks {
        cfg.synth.n_stocks = n;
    }
    if let Some(n) = a.days {
        cfg.synth.n_days = n;
    }
    cfg.synth.validate().map_err(|e| Usage(e.to_string()))?;
    let days = synth_market(&cfg.synth)?;
    let dir = out_dir(&a.out.out, &cfg)?;
    let series: Vec<TickSeries> = days.iter().map(|d| d.series.clone()).collect();
    write_trades_csv(create(&dir, "trades.csv")?, &series, true)?;
    write_quotes_csv(create(&dir, "quotes.csv")?, &series)?;
    let latent: Vec<_> = days.iter().map(|d| (&d.series, &d.latent)).collect();
    write_latent_csv(create(&dir, "latent.csv")?, &latent)?;
    let trades: usize = series.iter().map(|s| s.trades.len()).sum();
    let quotes: usize = series.iter().map(|s| s.quotes.len()).sum();
    println!("stock_days={} trades={trades} quotes={quotes}", series.len());
    Ok(())
}

fn features(a: FeaturesArgs, cfg: RunConfig) -> anyhow::Result<()> {
    let trades = read_ticks(&a.input.trades, None, a.input.sort, a.input.lenient)?;
    let quotes = read_ticks(&a.quotes, Some(FileKind::Quotes), a.input.sort, a.input.lenient)?;
    let series = merge_series(trades.series, quotes.series);
    let computed = compute_features_batch(&series, &cfg.features);
    let rows: Vec<FeatureRow> = series
        .iter()
        .zip(&computed)
        .map(|(s, (f, _))| FeatureRow { key: RowKey { stock: s.stock.clone(), date: s.date }, features: *f, targets: None })
        .collect();
    let excluded: usize = computed.iter().map(|(_, d)| d.excluded_before_first_quote).sum();
    if excluded > 0 {
        log::info!("{excluded} trades before the first quote excluded from quote-based features");
    }
    let dir = out_dir(&a.out.out, &cfg)?;
    write_features_csv(create(&dir, "features.csv")?, &rows, false)?;
    let complete = rows.iter().filter(|r| r.features.is_complete()).count();
    println!("stock_days={} complete={complete}", rows.len());
    Ok(())
}

fn targets(a: TargetsArgs, cfg: RunConfig) -> anyhow::Result<()> {
    let report = read_ticks(&a.input.trades, Some(FileKind::Labeled), a.input.sort, a.input.lenient)?;
    let mut rows = Vec::new();
    for s in &report.series {
        match compute_targets(&s.trades) {
            Ok(t) => rows.push((RowKey { stock: s.stock.clone(), date: s.date }, t)),
            Err(TargetError::NoTrades) => log::warn!("{} {}: no trades", s.stock, s.date),
            Err(e) => bail!("{} {}: {e}", s.stock, s.date),
        }
    }
    let dir = out_dir(&a.out.out, &cfg)?;
    tables::write_targets(create(&dir, "targets.csv")?, &rows)?;
    println!("stock_days={}", rows.len());
    Ok(())
}

fn apply_forest(f: &ForestArgs, cfg: &mut RunConfig) {
    cfg.apply_seed(f.seed);
    let p = &mut cfg.forest;
    if let Some(n) = f.trees {
        p.n_trees = n;
    }
    if let Some(n) = f.min_split {
        p.min_split_samples = n;
    }
    if let Some(m) = f.method {
        p.method = match m {
            MethodArg::Extra => Method::Extra,
            MethodArg::Forest => Method::Forest,
        };
    }
    if f.k_features.is_some() {
        p.k_features = f.k_features;
    }
    if f.multi_model {
        p.multi_target = false;
    }
}

fn apply_cv(c: &CvFlags, cfg: &mut RunConfig) {
    if let Some(n) = c.iterations {
        cfg.cv.n_iter = n;
    }
    if let Some(n) = c.sample_size {
        cfg.cv.sample_size = n;
    }
    if let Some(f) = c.test_fraction {
        cfg.cv.test_fraction = f;
    }
    if c.scale {
        cfg.cv.scale = true;
    }
}

fn load_rows(features: &Path, targets: Option<&Path>) -> anyhow::Result<Vec<FeatureRow>> {
    let mut rows = read_features_csv(open(features)?).with_context(|| format!("reading {}", features.display()))?;
    if let Some(t) = targets {
        let map = tables::read_targets(open(t)?).with_context(|| format!("reading {}", t.display()))?;
        for r in &mut rows {
            r.targets = map.get(&r.key).copied();
        }
    }
    Ok(rows)
}

fn assemble(rows: &[FeatureRow], mode: AssemblyMode) -> anyhow::Result<FeatureMatrix> {
    let (m, report) = assemble_feature_matrix(rows, mode)?;
    if report.dropped() > 0 {
        log::info!(
            "kept {} of {} rows ({} missing features, {} missing targets)",
            report.kept,
            report.input_rows,
            report.dropped_missing_features,
            report.dropped_missing_targets
        );
    }
    Ok(m)
}

fn training_data(d: &DataArgs) -> anyhow::Result<FeatureMatrix> {
    let rows = load_rows(&d.features, d.targets.as_deref())?;
    assemble(&rows, AssemblyMode::Training)
}

#[derive(Serialize)]
struct ModelInfo<'a> {
    params: &'a hftml_core::EnsembleParams,
    fingerprint: &'a str,
    features: &'a [String],
    targets: &'a [String],
    n_rows: usize,
}

fn train(a: TrainArgs, mut cfg: RunConfig) -> anyhow::Result<()> {
    apply_forest(&a.forest, &mut cfg);
    let data = training_data(&a.data)?;
    cfg.forest.validate(data.n_features()).map_err(|e| Usage(e.to_string()))?;
    let model = Ensemble::fit(&data, &cfg.forest)?;
    let dir = out_dir(&a.out.out, &cfg)?;
    model.save(&dir.join("model.bin"))?;
    let info = ModelInfo { params: &model.params, fingerprint: &model.fingerprint, features: &model.feature_names, targets: &model.target_names, n_rows: data.n_rows() };
    std::fs::write(dir.join("model.json"), serde_json::to_string_pretty(&info)? + "\n")?;
    println!("trees={} rows={}", model.n_trees(), data.n_rows());
    Ok(())
}

fn cv(a: CvArgs, mut cfg: RunConfig) -> anyhow::Result<()> {
    apply_forest(&a.forest, &mut cfg);
    apply_cv(&a.cv, &mut cfg);
    let data = training_data(&a.data)?;
    let mut trees = monte_carlo_cv(&data, &cfg.forest, &cfg.cv)?;
    trees.label = method_label(&cfg.forest).into();
    let ols = linear_cv(&data, &cfg.cv)?;
    let dir = out_dir(&a.out.out, &cfg)?;
    write_cv_csv(create(&dir, "cv.csv")?, &trees)?;
    write_summary_csv(create(&dir, "summary.csv")?, &[trees.clone(), ols.clone()])?;
    for r in [&trees, &ols] {
        println!("{} mean_r2={:.6} std_r2={:.6}", r.label, r.mean, r.std);
    }
    Ok(())
}

fn method_label(p: &hftml_core::EnsembleParams) -> &'static str {
    match (p.method, p.multi_target) {
        (Method::Forest, false) => "RF-MM",
        (Method::Forest, true) => "RF",
        (Method::Extra, false) => "ET-MM",
        (Method::Extra, true) => "ET",
    }
}

fn gridsearch(a: GridArgs, mut cfg: RunConfig) -> anyhow::Result<()> {
    apply_forest(&a.forest, &mut cfg);
    apply_cv(&a.cv, &mut cfg);
    if let Some(v) = a.splits {
        cfg.grid.min_split = v;
    }
    if let Some(v) = a.tree_grid {
        cfg.grid.n_trees = v;
    }
    let data = training_data(&a.data)?;
    let cells = grid_search(&data, &cfg.grid.min_split, &cfg.grid.n_trees, &cfg.forest, &cfg.cv)?;
    let dir = out_dir(&a.out.out, &cfg)?;
    write_grid_csv(create(&dir, "grid.csv")?, &cells)?;
    let best = &cells[0];
    println!("best min_split={} n_trees={} mean_r2={:.6} std_r2={:.6}", best.min_split, best.n_trees, best.report.mean, best.report.std);
    Ok(())
}

fn compare(a: CvArgs, mut cfg: RunConfig) -> anyhow::Result<()> {
    apply_forest(&a.forest, &mut cfg);
    apply_cv(&a.cv, &mut cfg);
    let data = training_data(&a.data)?;
    let reports = compare_methods(&data, &cfg.forest, &cfg.cv)?;
    let dir = out_dir(&a.out.out, &cfg)?;
    write_comparison_csv(create(&dir, "comparison.csv")?, &reports)?;
    for r in &reports {
        println!("{} mean_r2={:.6} std_r2={:.6}", r.label, r.mean, r.std);
    }
    Ok(())
}

fn predict(a: PredictArgs, cfg: RunConfig) -> anyhow::Result<()> {
    let model = Ensemble::load(&a.model)?;
    let data = assemble(&load_rows(&a.features, None)?, AssemblyMode::Prediction)?;
    let pred = model.predict_features(&data)?;
    let dir = out_dir(&a.out.out, &cfg)?;
    tables::write_predictions(create(&dir, "predictions.csv")?, &data.keys, &model.target_names, &pred)?;
    println!("rows={}", data.n_rows());
    Ok(())
}

fn importance(a: ImportanceArgs, cfg: RunConfig) -> anyhow::Result<()> {
    let model = Ensemble::load(&a.model)?;
    let report = feature_importance(&model);
    if report.degenerate {
        log::warn!("no tree has a split; importance is all zero");
    }
    let dir = out_dir(&a.out.out, &cfg)?;
    write_importance_csv(create(&dir, "importance.csv")?, &report)?;
    let mut order: Vec<usize> = (0..report.features.len()).collect();
    order.sort_by(|&i, &j| report.mean[j].total_cmp(&report.mean[i]));
    for &i in order.iter().take(5) {
        println!("{} {:.6}", report.features[i], report.mean[i]);
    }
    Ok(())
}

fn pdp(a: PdpArgs, mut cfg: RunConfig) -> anyhow::Result<()> {
    cfg.apply_seed(a.seed);
    if let Some(n) = a.grid {
        cfg.pdp.n_grid = n;
    }
    if let Some(n) = a.sample {
        cfg.pdp.sample = n;
    }
    let model = Ensemble::load(&a.model)?;
    let data = assemble(&load_rows(&a.features, None)?, AssemblyMode::Prediction)?;
    if data.fingerprint() != model.fingerprint {
        bail!("feature columns do not match the model schema");
    }
    let wanted: Vec<usize> = if a.feature.is_empty() {
        (0..model.n_features()).collect()
    } else {
        a.feature
            .iter()
            .map(|f| model.feature_names.iter().position(|n| n == f).ok_or_else(|| Usage(format!("unknown feature {f}"))))
            .collect::<Result<_, _>>()?
    };
    let sample = (cfg.pdp.sample > 0).then_some((cfg.pdp.sample, cfg.pdp.seed));
    let curves = wanted.iter().map(|&j| partial_dependence(&model, &data.x, j, cfg.pdp.n_grid, sample)).collect::<Result<Vec<_>, _>>()?;
    let dir = out_dir(&a.out.out, &cfg)?;
    write_pdp_csv(create(&dir, "pdp.csv")?, &curves, &model.target_names)?;
    println!("curves={} grid={}", curves.len(), cfg.pdp.n_grid);
    Ok(())
}

fn latarb(a: LatarbArgs, mut cfg: RunConfig) -> anyhow::Result<()> {
    if let Some(t) = a.tick_cents {
        cfg.latarb.tick_cents = t;
    }
    if cfg.latarb.tick_cents <= 0 {
        return Err(Usage("tick must be positive".into()).into());
    }
    let quotes = read_ticks(&a.quotes, Some(FileKind::Quotes), a.sort, a.lenient)?;
    let scans = scan_batch(&quotes.series, &cfg.features.session, Price::from_cents(cfg.latarb.tick_cents))?;
    let dir = out_dir(&a.out.out, &cfg)?;
    write_nlao_csv(create(&dir, "nlao.csv")?, &scans)?;
    if a.events {
        write_events_csv(create(&dir, "latarb_events.csv")?, &scans)?;
    }
    let total: u64 = scans.iter().map(|s| s.record.nlao).sum();
    println!("stock_days={} nlao={total}", scans.len());
    Ok(())
}

#[derive(Serialize)]
struct EventStudyOutput<'a> {
    column: &'a str,
    n_events: usize,
    n_unmatched: usize,
    #[serde(flatten)]
    study: &'a hftml_core::panelmetrics::EventStudy,
}

fn eventstudy(a: EventStudyArgs, mut cfg: RunConfig) -> anyhow::Result<()> {
    if let Some(p) = a.pre {
        cfg.events.pre = p;
    }
    if let Some(p) = a.post {
        cfg.events.post = p;
    }
    let (pre, post) = (cfg.events.pre, cfg.events.post);
    if pre < 0 || post < 0 {
        return Err(Usage("--pre and --post must be non-negative".into()).into());
    }
    let series = read_daily_csv(open(&a.series)?, &a.column)?;
    let events = read_events_csv(open(&a.events)?)?;
    let mut obs = Vec::new();
    let (mut used, mut unmatched) = (0, 0);
    for e in events.iter().filter(|e| a.kind.as_ref().is_none_or(|k| &e.kind == k)) {
        let Some(s) = series.get(&e.stock) else {
            unmatched += 1;
            continue;
        };
        let Some(pos) = event_position(s, e.event_date) else {
            unmatched += 1;
            continue;
        };
        for rel in -pre..=post {
            let i = pos as i64 + rel;
            if (0..s.len() as i64).contains(&i) {
                obs.push(EventObs { event: used, rel_day: rel, value: s[i as usize].1 });
            }
        }
        used += 1;
    }
    if unmatched > 0 {
        log::warn!("{unmatched} events had no matching series");
    }
    let study = event_study(&obs, pre, post)?;
    let dir = a.out.as_deref().map(|d| out_dir(d, &cfg)).transpose()?;
    if let Some(dir) = &dir {
        let mut w = csv::Writer::from_writer(create(dir, "event_path.csv")?);
        w.write_record(["rel_day", "mean", "n"])?;
        for p in &study.path {
            w.write_record([p.rel_day.to_string(), p.mean.map(|m| m.to_string()).unwrap_or_default(), p.n.to_string()])?;
        }
        w.flush()?;
    }
    write_json(dir.as_deref(), "eventstudy.json", &EventStudyOutput { column: &a.column, n_events: used, n_unmatched: unmatched, study: &study })
}

#[derive(Serialize)]
struct JumpSummary {
    kept: usize,
    unmatched: usize,
    dropped: DropTally,
}

fn jump(a: JumpArgs, mut cfg: RunConfig) -> anyhow::Result<()> {
    if let Some(p) = a.winsorize {
        cfg.robust.winsorize = p;
    }
    let mut returns = read_daily_csv(open(&a.returns)?, "ret")?;
    let market: BTreeMap<_, _> = returns.remove("market").context("returns file has no market rows")?.into_iter().collect();
    let events = read_events_csv(open(&a.events)?)?;
    let window = (WIDE_WINDOW.0, NARROW_WINDOW.1);
    let mut records: Vec<JumpRecord> = Vec::new();
    let mut dropped = DropTally::default();
    let mut unmatched = 0;
    for e in &events {
        let Some(s) = returns.get(&e.stock) else {
            unmatched += 1;
            continue;
        };
        let Some(pos) = event_position(s, e.event_date) else {
            unmatched += 1;
            continue;
        };
        let stock: Vec<f64> = s.iter().map(|p| p.1).collect();
        let mkt: Vec<f64> = s.iter().map(|p| market.get(&p.0).copied().unwrap_or(f64::NAN)).collect();
        let ar = match abnormal_returns(&stock, &mkt, pos, cfg.events.estimation_window, window, cfg.events.min_estimation_obs) {
            Ok(ar) => ar,
            Err(PanelError::InsufficientObservations { .. }) => {
                dropped.insufficient_estimation += 1;
                continue;
            }
            Err(err) => return Err(err).with_context(|| format!("{} {}", e.stock, e.event_date)),
        };
        match jump_ratio(&ar, &e.stock, &e.event_date.to_string()) {
            Ok(r) => records.push(r),
            Err(PanelError::MissingDay(_)) => dropped.missing_days += 1,
            Err(PanelError::ZeroVariance(_)) => dropped.zero_wide_car += 1,
            Err(err) => return Err(err.into()),
        }
    }
    if cfg.robust.winsorize > 0.0 {
        winsorize_jumps(&mut records, cfg.robust.winsorize)?;
    }
    let dir = out_dir(&a.out.out, &cfg)?;
    let mut w = csv::Writer::from_writer(create(&dir, "jump.csv")?);
    w.write_record(["stock", "quarter", "jump", "car_narrow", "car_wide"])?;
    for r in &records {
        w.write_record([r.stock.clone(), r.quarter.clone(), r.jump.to_string(), r.car_narrow.to_string(), r.car_wide.to_string()])?;
    }
    w.flush()?;
    write_json(Some(&dir), "jump_summary.json", &JumpSummary { kept: records.len(), unmatched, dropped })
}

fn did(a: DidArgs, cfg: RunConfig) -> anyhow::Result<()> {
    let (rows, controls) = tables::read_did(open(&a.panel)?).with_context(|| format!("reading {}", a.panel.display()))?;
    let fit = did_estimate(&rows, &controls)?;
    let dir = a.out.as_deref().map(|d| out_dir(d, &cfg)).transpose()?;
    write_json(dir.as_deref(), "fit.json", &fit)
}

fn spec_of(s: &SpecArgs) -> PanelSpec {
    let (ce, ct) = match s.cluster {
        ClusterArg::Both => (true, true),
        ClusterArg::Entity => (true, false),
        ClusterArg::Time => (false, true),
        ClusterArg::None => (false, false),
    };
    PanelSpec { entity_fe: !s.no_entity_fe, time_fe: !s.no_time_fe, cluster_entity: ce, cluster_time: ct }
}

fn ols(a: OlsArgs, cfg: RunConfig) -> anyhow::Result<()> {
    let (rows, names) = read_panel_csv(open(&a.panel)?).with_context(|| format!("reading {}", a.panel.display()))?;
    let fit = panel_ols(&rows, &names, &spec_of(&a.spec))?;
    let dir = a.out.as_deref().map(|d| out_dir(d, &cfg)).transpose()?;
    write_json(dir.as_deref(), "fit.json", &fit)
}

fn iv(a: IvArgs, cfg: RunConfig) -> anyhow::Result<()> {
    let (rows, names) = read_panel_csv(open(&a.panel)?).with_context(|| format!("reading {}", a.panel.display()))?;
    for c in [&a.endog, &a.instrument] {
        if !names.contains(c) {
            return Err(Usage(format!("panel has no column {c}")).into());
        }
    }
    let fit = two_sls(&rows, &names, &a.endog, &a.instrument, &spec_of(&a.spec))?;
    let dir = a.out.as_deref().map(|d| out_dir(d, &cfg)).transpose()?;
    write_json(dir.as_deref(), "iv.json", &fit)
}

fn winsorize_cmd(a: WinsorizeArgs, mut cfg: RunConfig) -> anyhow::Result<()> {
    if let Some(p) = a.p {
        cfg.robust.winsorize = p;
    }
    if !(0.0..0.5).contains(&cfg.robust.winsorize) {
        return Err(Usage("-p must lie in [0, 0.5)".into()).into());
    }
    let table = Table::read(open(&a.input)?)?;
    let mut replaced = BTreeMap::new();
    for c in &a.columns {
        let j = table.column_index(c).map_err(|e| Usage(e.to_string()))?;
        let v = table.numeric(j).with_context(|| format!("reading {}", a.input.display()))?;
        replaced.insert(j, winsorize(&v, cfg.robust.winsorize)?);
    }
    let dir = out_dir(&a.out.out, &cfg)?;
    table.write(create(&dir, "winsorized.csv")?, &replaced)?;
    println!("rows={} columns={}", table.rows.len(), a.columns.len());
    Ok(())
}

fn stats(a: StatsArgs, cfg: RunConfig) -> anyhow::Result<()> {
    let table = Table::read(open(&a.input)?)?;
    let cols: Vec<usize> = if a.columns.is_empty() {
        (0..table.header.len()).filter(|&j| table.is_numeric(j)).collect()
    } else {
        a.columns.iter().map(|c| table.column_index(c).map_err(|e| Usage(e.to_string()))).collect::<Result<_, _>>()?
    };
    if cols.is_empty() {
        bail!("no numeric columns in {}", a.input.display());
    }
    let mut out: Vec<u8> = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(["column", "n", "mean", "std", "min", "p25", "p50", "p75", "max"])?;
        for &j in &cols {
            let s = summary_stats(&table.numeric(j)?)?;
            w.write_record([
                table.header[j].clone(),
                s.n.to_string(),
                s.mean.to_string(),
                s.std.to_string(),
                s.min.to_string(),
                s.p25.to_string(),
                s.p50.to_string(),
                s.p75.to_string(),
                s.max.to_string(),
            ])?;
        }
        w.flush()?;
    }
    std::io::stdout().write_all(&out)?;
    if let Some(d) = a.out.as_deref() {
        let dir = out_dir(d, &cfg)?;
        std::fs::write(dir.join("stats.csv"), &out)?;
    }
    Ok(())
}
