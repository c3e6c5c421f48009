use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use moviesim_client::Client;
use moviesim_core::audio::TaxonomyKind;
use moviesim_core::eval::{render_table, EvalReport};
use moviesim_core::pipeline::{load_config, names, Pipeline, PipelineConfig, SearchSummary, StageOutcome};
use moviesim_core::similarity::{parse_weight_list, FusionWeights, Modality};
use moviesim_core::text::FilterConfig;
use moviesim_server::Catalog;

#[derive(Debug, Parser)]
#[command(
    name = "moviesim",
    version,
    about = "Multimodal movie similarity: pipeline stages and browser service"
)]
struct Cli {
    #[command(flatten)]
    over: Overrides,

    #[command(subcommand)]
    command: Command,
}

/// Each flag overrides the config field of the same name.
#[derive(Debug, Default, Args)]
struct Overrides {
    /// JSON pipeline config; relative paths inside it follow the file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    /// Artifact directory.
    #[arg(long, visible_alias = "out", global = true)]
    artifacts: Option<PathBuf>,
    /// JSON file with text filter settings.
    #[arg(long, global = true)]
    filter_config: Option<PathBuf>,
    #[arg(long, global = true)]
    stopwords: Option<PathBuf>,
    /// LDA topics.
    #[arg(long, global = true)]
    t: Option<usize>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long, global = true)]
    beta: Option<f64>,
    #[arg(long, global = true)]
    iters: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// LSI dimensions.
    #[arg(long, global = true)]
    k: Option<usize>,
    /// Weight-search grid step.
    #[arg(long, global = true)]
    step: Option<f64>,
    #[arg(long, global = true)]
    port: Option<u16>,
    /// Rerun stages even when their artifacts are current.
    #[arg(long, global = true)]
    force: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse subtitles and build the filtered bag-of-words corpus.
    IngestText,
    TrainTfidf,
    TrainLsi,
    TrainLda,
    /// Top words of every topic as JSON.
    ExportTopics {
        #[arg(long, default_value_t = 20)]
        n: usize,
        /// Write here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Train a segment classifier from a directory of `<label>.csv` files.
    AudioTrain {
        #[arg(long)]
        kind: TaxonomyKind,
        #[arg(long)]
        data: PathBuf,
    },
    /// Genre and event histograms for every movie.
    AudioRepresent,
    /// Similarity matrix of one modality (all when omitted).
    Similarity {
        #[arg(long)]
        modality: Option<Modality>,
    },
    /// Fuse modality matrices, e.g. `--weights lda=0.3,metadata=0.7`.
    Fuse {
        #[arg(long)]
        weights: String,
    },
    SearchWeights,
    /// Metrics against the tag ground truth.
    Evaluate {
        /// Comma-separated modalities.
        #[arg(long, value_delimiter = ',')]
        models: Vec<Modality>,
        /// Ground-truth source; only `tags` exists.
        #[arg(long, default_value = "tags")]
        gt: String,
        /// Evaluate one fusion instead of single modalities.
        #[arg(long)]
        fused: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Print the stored evaluation report.
    Report {
        #[arg(long)]
        json: bool,
    },
    /// Every stage in order.
    RunAll,
    /// Serve the artifact directory over HTTP.
    Serve {
        #[arg(long, default_value = "127.0.0.1")]
        host: std::net::IpAddr,
    },
    /// Query a running service.
    Query {
        #[arg(long, env = "MOVIESIM_URL")]
        url: Option<String>,
        #[command(subcommand)]
        what: Query,
    },
}

#[derive(Debug, Subcommand)]
enum Query {
    Movies,
    Movie {
        id: String,
    },
    MovieTopics {
        id: String,
    },
    Similar {
        id: String,
        /// `modality:weight,...`; normalized by the service.
        #[arg(long)]
        weights: Option<String>,
        #[arg(long)]
        n: Option<usize>,
    },
    Topics {
        #[arg(long)]
        n: Option<usize>,
    },
    TopicWords {
        id: usize,
        #[arg(long)]
        n: Option<usize>,
    },
    TopicMovies {
        id: usize,
    },
    Report,
    Modalities,
}

fn build_config(o: &Overrides) -> anyhow::Result<PipelineConfig> {
    let mut cfg = match &o.config {
        Some(path) => load_config(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(v) = &o.manifest {
        cfg.manifest = Some(v.clone());
    }
    if let Some(v) = &o.artifacts {
        cfg.artifacts = v.clone();
    }
    if let Some(path) = &o.filter_config {
        let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
        cfg.filter =
            serde_json::from_slice::<FilterConfig>(&bytes).with_context(|| format!("parsing {}", path.display()))?;
    }
    if let Some(v) = &o.stopwords {
        cfg.stopwords = Some(v.clone());
    }
    macro_rules! set {
        ($($f:ident),*) => { $( if let Some(v) = o.$f { cfg.$f = v; } )* };
    }
    set!(t, beta, iters, seed, k, step, port);
    if let Some(v) = o.alpha {
        cfg.alpha = Some(v);
    }
    Ok(cfg)
}

fn print_outcomes(outcomes: &[StageOutcome]) {
    for o in outcomes {
        println!(
            "{:<16} {}",
            o.stage,
            serde_json::to_value(o.status).unwrap().as_str().unwrap()
        );
    }
}

fn print_json<T: serde::Serialize>(value: &T) -> anyhow::Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn raw_weights(s: &str) -> anyhow::Result<BTreeMap<Modality, f64>> {
    Ok(parse_weight_list(s)?)
}

fn ensure_matrices(p: &Pipeline, modalities: impl IntoIterator<Item = Modality>) -> anyhow::Result<()> {
    for m in modalities {
        p.similarity(m)?;
    }
    Ok(())
}

fn run_pipeline_command(cmd: Command, cfg: PipelineConfig, force: bool) -> anyhow::Result<()> {
    let p = Pipeline::new(cfg, force)?;
    match cmd {
        Command::IngestText => {
            print_outcomes(&[p.ingest()?]);
            for s in p.ingest_stats()? {
                if s.skipped_blocks > 0 {
                    eprintln!("{}: skipped {} malformed subtitle blocks", s.movie_id, s.skipped_blocks);
                }
            }
        }
        Command::TrainTfidf => print_outcomes(&[p.train_tfidf()?]),
        Command::TrainLsi => print_outcomes(&[p.train_lsi()?]),
        Command::TrainLda => print_outcomes(&[p.train_lda()?]),
        Command::ExportTopics { n, output } => {
            let topics = p.export_topics(n)?;
            let json = serde_json::to_string_pretty(&topics)?;
            match output {
                Some(path) => {
                    std::fs::write(&path, json + "\n").with_context(|| format!("writing {}", path.display()))?
                }
                None => println!("{json}"),
            }
        }
        Command::AudioTrain { kind, data } => print_outcomes(&[p.audio_train(kind, &data)?]),
        Command::AudioRepresent => print_outcomes(&[p.audio_represent()?]),
        Command::Similarity { modality } => {
            let ms: Vec<Modality> = modality.map_or(Modality::ALL.to_vec(), |m| vec![m]);
            let outcomes = ms.iter().map(|&m| p.similarity(m)).collect::<Result<Vec<_>, _>>()?;
            print_outcomes(&outcomes);
        }
        Command::Fuse { weights } => {
            let w = FusionWeights::normalized(raw_weights(&weights)?)?;
            ensure_matrices(&p, w.iter().map(|(m, _)| m))?;
            let fused = p.fuse(&w)?;
            let path = p.store().save_matrix(names::FUSED, &fused)?;
            println!("{} -> {}", w.label(), path.display());
        }
        Command::SearchWeights => {
            ensure_matrices(&p, p.config().fusion_modalities.clone())?;
            print_outcomes(&[p.ground_truth()?, p.search()?]);
            let summary: SearchSummary = p.store().load_json(names::SEARCH)?;
            println!(
                "best: {} ({} candidates, step {})",
                summary.best.search.weights, summary.best.search.candidates_evaluated, summary.step
            );
            let rows: Vec<EvalReport> = summary.subsets.iter().map(|s| s.search.report.clone()).collect();
            print!("{}", render_table("Fusion Models", &rows));
        }
        Command::Evaluate {
            models,
            gt,
            fused,
            json,
        } => {
            if gt != "tags" {
                bail!("unknown ground truth `{gt}` (only `tags` is supported)");
            }
            p.ground_truth()?;
            let reports = if let Some(w) = fused {
                let w = FusionWeights::normalized(raw_weights(&w)?)?;
                ensure_matrices(&p, w.iter().map(|(m, _)| m))?;
                vec![p.evaluate_fused(&w)?]
            } else {
                let models = if models.is_empty() {
                    Modality::ALL.to_vec()
                } else {
                    models
                };
                ensure_matrices(&p, models.iter().copied())?;
                p.evaluate_models(&models)?
            };
            if json {
                print_json(&reports)?;
            } else {
                print!("{}", render_table("Evaluation", &reports));
            }
        }
        Command::Report { json } => {
            let report = p
                .load_report()
                .context("no report yet; run `moviesim run-all` on a corpus with tags")?;
            if json {
                print_json(&report)?;
            } else {
                print!("{}", report.table.render());
                if let Some(w) = &report.best_weights {
                    println!("\nbest weights: {w}");
                }
            }
        }
        Command::RunAll => {
            let outcomes = p.run_all()?;
            print_outcomes(&outcomes);
            if let Ok(report) = p.load_report() {
                println!();
                print!("{}", report.table.render());
            }
        }
        Command::Serve { .. } | Command::Query { .. } => unreachable!("handled by the async runtime"),
    }
    Ok(())
}

async fn serve(cfg: PipelineConfig, host: std::net::IpAddr) -> anyhow::Result<()> {
    let store = moviesim_core::corpus::ArtifactStore::open(&cfg.artifacts)?;
    let catalog = Arc::new(Catalog::load(&store).map_err(moviesim_server::ServerError::Load)?);
    let listener = moviesim_server::bind((host, cfg.port).into()).await?;
    println!("listening on http://{}", listener.local_addr()?);
    moviesim_server::serve(listener, catalog, async {
        let _ = tokio::signal::ctrl_c().await;
    })
    .await?;
    Ok(())
}

async fn query(url: String, what: Query) -> anyhow::Result<()> {
    let c = Client::new(&url)?;
    match what {
        Query::Movies => print_json(&c.movies().await?),
        Query::Movie { id } => print_json(&c.movie(&id).await?),
        Query::MovieTopics { id } => print_json(&c.movie_topics(&id).await?),
        Query::Similar { id, weights, n } => {
            let raw = weights.as_deref().map(raw_weights).transpose()?;
            print_json(&c.similar(&id, raw.as_ref(), n).await?)
        }
        Query::Topics { n } => print_json(&c.topics(n).await?),
        Query::TopicWords { id, n } => print_json(&c.topic_words(id, n).await?),
        Query::TopicMovies { id } => print_json(&c.topic_movies(id).await?),
        Query::Report => print_json(&c.report().await?),
        Query::Modalities => print_json(&c.modalities().await?),
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = build_config(&cli.over)?;
    match cli.command {
        Command::Serve { host } => tokio::runtime::Runtime::new()?.block_on(serve(cfg, host)),
        Command::Query { url, what } => {
            let url = url.unwrap_or_else(|| format!("http://127.0.0.1:{}/", cfg.port));
            tokio::runtime::Runtime::new()?.block_on(query(url, what))
        }
        cmd => run_pipeline_command(cmd, cfg, cli.over.force),
    }
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "warn".into()))
        .with_writer(std::io::stderr)
        .init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
