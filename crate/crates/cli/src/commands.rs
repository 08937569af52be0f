use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use dtn_core::io::{format_corpus, format_links, load_dataset, read_draws, write_draws, LoadOptions};
use dtn_core::{derive_seed, seeded_rng, AdjacencyTensor, Corpus, ModelConfig};
use dtn_diagnostics as diag;
use dtn_genmodel::{simulate as simulate_data, Scenario};
use dtn_inference::{run_sampler, RunOptions, RunOutput};
use dtn_preprocess as pre;

use crate::error::{CliError, CliResult, EXIT_FAILURE};
use crate::manifest::{input_digest, Manifest};
use crate::ModelArgs;

fn read_text(path: &Path, m: &mut Manifest) -> CliResult<String> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    m.inputs.push(input_digest(path)?);
    Ok(text)
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

/// Config file, then `--set` lines, then `--seed`. Scenario keys (`I`, `T`,
/// `W`, `theta`, `psi`) are split off for the simulator so one file can
/// drive both simulation and fitting.
fn load_model(args: &ModelArgs, m: &mut Manifest) -> CliResult<(ModelConfig, Scenario)> {
    let mut text = match &args.config {
        Some(path) => read_text(path, m)?,
        None => String::new(),
    };
    for s in &args.sets {
        if !s.contains('=') {
            return Err(CliError::config(format!("--set {s:?}: expected KEY=VALUE")));
        }
        text.push('\n');
        text.push_str(s);
    }
    let mut scenario = Scenario::default();
    let rest = scenario.apply_text(&text)?;
    let mut cfg = ModelConfig::from_text(&rest)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    m.seed = Some(cfg.seed);
    m.config = Some(cfg.to_text());
    Ok((cfg, scenario))
}

fn load_inputs(corpus: &Path, links: Option<&Path>, m: &mut Manifest) -> CliResult<(Corpus, AdjacencyTensor)> {
    m.inputs.push(input_digest(corpus)?);
    if let Some(l) = links {
        m.inputs.push(input_digest(l)?);
    }
    Ok(load_dataset(corpus, links, &LoadOptions::default())?)
}

fn csv_writer(path: &Path) -> CliResult<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(|e| CliError::io(path, e))
}

fn csv_row<I, T>(w: &mut csv::Writer<fs::File>, path: &Path, row: I) -> CliResult<()>
where
    I: IntoIterator<Item = T>,
    T: AsRef<[u8]>,
{
    w.write_record(row).map_err(|e| CliError::io(path, e))
}

fn csv_done(mut w: csv::Writer<fs::File>, path: &Path) -> CliResult<()> {
    w.flush().map_err(|e| CliError::io(path, e))
}

#[derive(Args)]
pub struct PreprocessArgs {
    /// Raw posts: `day<TAB>blog<TAB>space-separated tokens<TAB>links`.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, default_value = "identity")]
    pub stemmer: String,
    #[arg(long, default_value_t = 0.0002)]
    pub min_doc_fraction: f64,
    /// Keep tokens whose TF-IDF variance exceeds this value.
    #[arg(long, conflicts_with = "variance_keep_top")]
    pub variance_threshold: Option<f64>,
    /// Keep this fraction of tokens, highest TF-IDF variance first.
    #[arg(long)]
    pub variance_keep_top: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 500)]
    pub bigram_min: u64,
    #[arg(long, default_value_t = 100)]
    pub higher_min: u64,
}

pub fn preprocess(a: &PreprocessArgs, m: &mut Manifest) -> CliResult<()> {
    let raw = pre::parse_raw(&read_text(&a.input, m)?)?;
    let variance = match (a.variance_threshold, a.variance_keep_top) {
        (_, Some(f)) => pre::VarianceFilter::KeepTop(f),
        (Some(t), None) => pre::VarianceFilter::Threshold(t),
        (None, None) => pre::VarianceFilter::default(),
    };
    let opts = pre::PreprocessOptions {
        stemmer: a.stemmer.clone(),
        variance,
        min_doc_fraction: a.min_doc_fraction,
        ngrams: pre::NgramOptions {
            alpha: a.alpha,
            bigram_min: a.bigram_min,
            higher_min: a.higher_min,
        },
    };
    let out = pre::preprocess(&raw, &opts)?;
    write_text(&a.out_dir.join("corpus.tsv"), &out.corpus_text)?;
    write_text(&a.out_dir.join("vocabulary.txt"), &(out.corpus.vocabulary().tokens().join("\n") + "\n"))?;
    write_text(&a.out_dir.join("ngrams.csv"), &pre::ngram_report_csv(&out))?;
    m.details = serde_json::json!({
        "posts": out.corpus.posts().len(),
        "unigrams": out.unigrams.len(),
        "removed_low_variance": out.removed_low_variance,
        "removed_rare": out.removed_rare,
        "tokens_before_merging": out.mined.tokens_before,
        "tokens_after_merging": out.mined.tokens_after,
        "merges": out.mined.merges,
        "vocabulary": out.corpus.vocabulary().len(),
    });
    Ok(())
}

#[derive(Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub out_dir: PathBuf,
}

pub fn simulate(a: &SimulateArgs, m: &mut Manifest) -> CliResult<()> {
    let (cfg, scenario) = load_model(&a.model, m)?;
    let mut rng = seeded_rng(cfg.seed);
    let sim = simulate_data(&cfg, &scenario, &mut rng)?;
    write_text(&a.out_dir.join("corpus.tsv"), &format_corpus(&sim.corpus))?;
    write_text(&a.out_dir.join("links.tsv"), &format_links(&sim.adjacency, sim.corpus.blogs()))?;
    let truth = serde_json::to_string_pretty(&sim.truth()).expect("truth serializes");
    write_text(&a.out_dir.join("truth.json"), &(truth + "\n"))?;
    m.details = serde_json::json!({
        "posts": sim.corpus.posts().len(),
        "tokens": sim.corpus.total_tokens(),
        "links": sim.adjacency.n_edges(),
    });
    Ok(())
}

#[derive(Args)]
pub struct FitArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Links file; without it links come from the posts' out-links.
    #[arg(long)]
    pub links: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Independent chains with derived seeds, written to `chain-<c>/`.
    #[arg(long, default_value_t = 1)]
    pub chains: usize,
    /// Recount the topic tables after every stage instead of every
    /// iteration.
    #[arg(long)]
    pub audit_each_stage: bool,
}

fn write_run(dir: &Path, out: &RunOutput) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    write_draws(dir, &out.draws)?;
    let mut trace = String::new();
    for r in &out.trace {
        let _ = writeln!(trace, "{}", serde_json::to_string(r).expect("record serializes"));
    }
    write_text(&dir.join("trace.jsonl"), &trace)
}

fn record_run(m: &mut Manifest, prefix: &str, out: &RunOutput) {
    for (stage, stats) in &out.acceptance {
        if let Some(rate) = stats.rate() {
            m.acceptance.insert(format!("{prefix}{stage}"), rate);
        }
    }
    for (stage, secs) in &out.stage_seconds {
        m.stage_seconds.insert(format!("{prefix}{stage}"), *secs);
    }
}

pub fn fit(a: &FitArgs, m: &mut Manifest) -> CliResult<()> {
    let (cfg, _) = load_model(&a.model, m)?;
    cfg.validate().map_err(|e| CliError::config(e.join("; ")))?;
    if a.chains == 0 {
        return Err(CliError::config("--chains must be at least 1"));
    }
    let (corpus, adjacency) = load_inputs(&a.corpus, a.links.as_deref(), m)?;
    let opts = RunOptions {
        audit_each_stage: a.audit_each_stage,
    };
    if a.chains == 1 {
        let out = run_sampler(&corpus, &adjacency, &cfg, &mut seeded_rng(cfg.seed), opts)?;
        write_run(&a.out_dir, &out)?;
        record_run(m, "", &out);
        m.details = serde_json::json!({ "draws": out.draws.len() });
        return Ok(());
    }
    let results: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..a.chains)
            .map(|c| {
                let (corpus, adjacency, cfg) = (&corpus, &adjacency, &cfg);
                s.spawn(move || {
                    let mut rng = seeded_rng(derive_seed(cfg.seed, c as u64));
                    run_sampler(corpus, adjacency, cfg, &mut rng, opts)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("chain thread")).collect()
    });
    let mut draws = Vec::new();
    for (c, res) in results.into_iter().enumerate() {
        let out = res?;
        write_run(&a.out_dir.join(format!("chain-{c}")), &out)?;
        record_run(m, &format!("chain-{c}/"), &out);
        draws.push(out.draws.len());
    }
    m.details = serde_json::json!({ "chains": a.chains, "draws": draws });
    Ok(())
}

#[derive(Args)]
pub struct SummarizeArgs {
    /// Directory written by `fit`.
    #[arg(long)]
    pub draws: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
}

fn load_draws(dir: &Path, m: &mut Manifest) -> CliResult<dtn_core::PosteriorDraws> {
    for name in ["z.csv", "b.csv", "theta.csv"] {
        let p = dir.join(name);
        if p.is_file() {
            m.inputs.push(input_digest(&p)?);
        }
    }
    Ok(read_draws(dir)?)
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".into(), |v| v.to_string())
}

pub fn summarize(a: &SummarizeArgs, m: &mut Manifest) -> CliResult<()> {
    let draws = load_draws(&a.draws, m)?;
    let rows = diag::summarize(&draws)?;
    let path = a.out_dir.join("summary.csv");
    let mut w = csv_writer(&path)?;
    csv_row(&mut w, &path, ["parameter", "index", "mean", "sd", "lo", "hi"])?;
    for r in &rows {
        let s = r.summary;
        csv_row(
            &mut w,
            &path,
            [r.parameter.clone(), r.index.clone(), s.mean.to_string(), s.sd.to_string(), s.lo.to_string(), s.hi.to_string()],
        )?;
    }
    csv_done(w, &path)?;

    let (z, b) = diag::map_assignments(&draws)?;
    for (name, header, labels) in [("map_z.csv", "post", &z), ("map_b.csv", "blog", &b)] {
        let path = a.out_dir.join(name);
        let mut w = csv_writer(&path)?;
        csv_row(&mut w, &path, [header, "label"])?;
        for (i, l) in labels.iter().enumerate() {
            csv_row(&mut w, &path, [i.to_string(), l.to_string()])?;
        }
        csv_done(w, &path)?;
    }

    let (az, ab) = diag::mixing_series(&draws)?;
    let path = a.out_dir.join("mixing.csv");
    let mut w = csv_writer(&path)?;
    csv_row(&mut w, &path, ["iteration", "ari_z", "ari_b"])?;
    for (i, (x, y)) in az.iter().zip(&ab).enumerate() {
        let it = draws.snapshots[i + 1].iteration;
        csv_row(&mut w, &path, [it.to_string(), x.to_string(), y.to_string()])?;
    }
    csv_done(w, &path)?;
    let mean = |v: &[f64]| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
    m.details = serde_json::json!({
        "draws": draws.len(),
        "mean_ari_z": mean(&az),
        "mean_ari_b": mean(&ab),
    });
    Ok(())
}

#[derive(Args)]
pub struct WfArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub draws: PathBuf,
    #[arg(long)]
    pub topic: usize,
    /// Comma-separated tokens; default is the topic's most frequent tokens.
    #[arg(long)]
    pub tokens: Option<String>,
    #[arg(long, default_value_t = 10)]
    pub top: usize,
    /// Day range `a-b`, inclusive; default is every day.
    #[arg(long)]
    pub days: Option<String>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub out_dir: PathBuf,
}

fn parse_days(range: Option<&str>, horizon: u32) -> CliResult<Vec<u32>> {
    let Some(range) = range else {
        return Ok((1..=horizon).collect());
    };
    let bad = || CliError::config(format!("--days {range:?}: expected a-b within 1..={horizon}"));
    let (lo, hi) = range.split_once('-').unwrap_or((range, range));
    let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
    let hi: u32 = hi.trim().parse().map_err(|_| bad())?;
    if lo < 1 || hi < lo || hi > horizon {
        return Err(bad());
    }
    Ok((lo..=hi).collect())
}

pub fn wf(a: &WfArgs, m: &mut Manifest) -> CliResult<()> {
    let (cfg, _) = load_model(&a.model, m)?;
    let (corpus, _) = load_inputs(&a.corpus, None, m)?;
    let draws = load_draws(&a.draws, m)?;
    if a.topic >= draws.n_topics {
        return Err(CliError::config(format!("--topic {} but the fit has {} topics", a.topic, draws.n_topics)));
    }
    let vocab = corpus.vocabulary();
    let tokens: Vec<u32> = match &a.tokens {
        Some(list) => list
            .split(',')
            .map(|t| vocab.id(t.trim()).ok_or_else(|| CliError::config(format!("unknown token {t:?}"))))
            .collect::<CliResult<_>>()?,
        None => {
            let (z, _) = diag::map_assignments(&draws)?;
            let mut totals = vec![0u64; vocab.len()];
            for (post, &k) in corpus.posts().iter().zip(&z) {
                if k == a.topic {
                    for &(w, c) in &post.tokens {
                        totals[w as usize] += c as u64;
                    }
                }
            }
            let mut ids: Vec<u32> = (0..vocab.len() as u32).filter(|&w| totals[w as usize] > 0).collect();
            ids.sort_by(|&x, &y| totals[y as usize].cmp(&totals[x as usize]).then(x.cmp(&y)));
            ids.truncate(a.top);
            ids
        }
    };
    let days = parse_days(a.days.as_deref(), corpus.horizon())?;
    let series = diag::weighted_frequency(&corpus, &draws, cfg.ell, a.topic, &tokens, &days)?;
    let path = a.out_dir.join("wf.csv");
    let mut w = csv_writer(&path)?;
    csv_row(&mut w, &path, ["day", "token", "mean", "lo", "hi"])?;
    for (d, &day) in days.iter().enumerate() {
        for (t, &tok) in tokens.iter().enumerate() {
            let band = series[t][d].band;
            csv_row(
                &mut w,
                &path,
                [
                    day.to_string(),
                    vocab.token(tok).to_string(),
                    fmt_opt(band.map(|b| b.mean)),
                    fmt_opt(band.map(|b| b.lo)),
                    fmt_opt(band.map(|b| b.hi)),
                ],
            )?;
        }
    }
    csv_done(w, &path)?;
    m.details = serde_json::json!({ "topic": a.topic, "tokens": tokens.len(), "days": days.len() });
    Ok(())
}

#[derive(Args)]
pub struct AriArgs {
    /// Labels, one per line.
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
}

fn read_labels(path: &Path, m: &mut Manifest) -> CliResult<Vec<String>> {
    Ok(read_text(path, m)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect())
}

pub fn ari(a: &AriArgs, m: &mut Manifest) -> CliResult<()> {
    let la = read_labels(&a.a, m)?;
    let lb = read_labels(&a.b, m)?;
    let score = diag::adjusted_rand_index(&la, &lb)?;
    println!("{score}");
    let result = serde_json::json!({ "ari": score, "n": la.len() });
    write_text(&a.out_dir.join("ari.json"), &(result.to_string() + "\n"))?;
    m.details = result;
    Ok(())
}

#[derive(Args)]
pub struct SelectKArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub links: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 2)]
    pub k_min: usize,
    #[arg(long, default_value_t = 8)]
    pub k_max: usize,
    #[arg(long)]
    pub out_dir: PathBuf,
}

pub fn select_k(a: &SelectKArgs, m: &mut Manifest) -> CliResult<()> {
    let (cfg, _) = load_model(&a.model, m)?;
    if a.k_min < 1 || a.k_max <= a.k_min {
        return Err(CliError::config("need 1 <= --k-min < --k-max"));
    }
    let (corpus, adjacency) = load_inputs(&a.corpus, a.links.as_deref(), m)?;
    let grid: Vec<usize> = (a.k_min..=a.k_max).collect();
    let sel = diag::select_k(&corpus, &adjacency, &cfg, &grid, cfg.seed)?;
    let path = a.out_dir.join("criterion.csv");
    let mut w = csv_writer(&path)?;
    csv_row(&mut w, &path, ["topics", "criterion"])?;
    for p in &sel.points {
        csv_row(&mut w, &path, [p.topics.to_string(), p.criterion.to_string()])?;
    }
    csv_done(w, &path)?;
    println!("{}", sel.best);
    let curve: BTreeMap<String, f64> = sel.points.iter().map(|p| (p.topics.to_string(), p.criterion)).collect();
    m.details = serde_json::json!({ "best": sel.best, "criterion": curve });
    if !sel.points.iter().any(|p| p.criterion.is_finite()) {
        return Err(CliError::new(EXIT_FAILURE, "criterion undefined for every K"));
    }
    Ok(())
}
