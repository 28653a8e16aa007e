//! `querylift`: build indexes, search, refine queries, run experiments and
//! serve the API.
//!
//! Exit status: 0 on success, 1 for usage errors, 2 for data errors.

use std::fmt::Display;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use querylift_core::corpus::{ingest_html, ingest_records, Document};
use querylift_core::harness::{read_score_columns, run_experiment, ExperimentConfig};
use querylift_core::refine::{load_lexicon, refine_one};
use querylift_core::stats::paired_t_test;
use querylift_core::{Index, PreprocessConfig, RefinementConfig, TTestResult, WeightingMode};
use querylift_service::{router, search, AppState, DEFAULT_PORT};

#[derive(Debug, Parser)]
#[command(name = "querylift", version, about = "TF-IDF retrieval with slug-based query refinement")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build an index from a corpus and write it as JSON.
    Index {
        #[command(flatten)]
        source: Source,
        /// Where to write the index.
        #[arg(long, short)]
        output: PathBuf,
    },
    /// Rank documents for one query.
    Search {
        query: String,
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..))]
        top_k: u32,
        /// Print the API response body instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Run the refinement loop on one query and print the record as JSON.
    Refine {
        query: String,
        #[command(flatten)]
        source: Source,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        top_k: Option<u32>,
    },
    /// Run every configured query and write report.json, results.csv and figure.svg.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        output_dir: Option<PathBuf>,
        #[arg(long)]
        mode: Option<WeightingMode>,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        top_k: Option<u32>,
        #[arg(long)]
        stopwords: Option<PathBuf>,
        #[arg(long)]
        lexicon: Option<PathBuf>,
    },
    /// Paired t-test over two score columns of a CSV file.
    Ttest {
        csv: PathBuf,
        #[arg(long, default_value = "baseline_top_sim")]
        baseline_column: String,
        #[arg(long, default_value = "refined_top_sim")]
        refined_column: String,
        /// Print the full result as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Serve the JSON API (and optionally a static UI directory).
    Serve {
        #[command(flatten)]
        source: Source,
        #[arg(long, default_value_t = DEFAULT_PORT)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: IpAddr,
        #[arg(long)]
        static_dir: Option<PathBuf>,
    },
}

/// Where documents come from. `--index` wins over `--corpus`, which wins over
/// the corpus named in `--config`.
#[derive(Debug, Args)]
struct Source {
    #[arg(long)]
    config: Option<PathBuf>,
    /// JSON-lines corpus file.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Tab-separated `url<TAB>path` lines naming local HTML files.
    #[arg(long, conflicts_with = "corpus")]
    html_list: Option<PathBuf>,
    /// Prebuilt index file.
    #[arg(long, conflicts_with_all = ["corpus", "html_list"])]
    index: Option<PathBuf>,
    #[arg(long)]
    mode: Option<WeightingMode>,
    #[arg(long)]
    stopwords: Option<PathBuf>,
    #[arg(long)]
    lexicon: Option<PathBuf>,
}

enum Failure {
    Usage(String),
    Data(String),
}

fn data(e: impl Display) -> Failure {
    Failure::Data(e.to_string())
}

struct Loaded {
    index: Index,
    preprocess: PreprocessConfig,
    refinement: RefinementConfig,
}

fn read_html_list(path: &Path) -> Result<Vec<(String, PathBuf)>, Failure> {
    let raw = std::fs::read_to_string(path).map_err(|e| data(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or_else(|| Path::new(""));
    let mut files = Vec::new();
    for (i, line) in raw.lines().enumerate() {
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let (url, file) = line
            .split_once('\t')
            .ok_or_else(|| data(format!("{}: line {}: expected url<TAB>path", path.display(), i + 1)))?;
        files.push((url.trim().to_owned(), base.join(file.trim())));
    }
    Ok(files)
}

impl Source {
    fn load(&self) -> Result<Loaded, Failure> {
        let config = self
            .config
            .as_deref()
            .map(ExperimentConfig::from_file)
            .transpose()
            .map_err(data)?;
        let mut preprocess = config.as_ref().map(|c| c.preprocess.clone()).unwrap_or_default();
        let mut refinement = config.as_ref().map(|c| c.refinement.clone()).unwrap_or_default();
        if let Some(p) = &self.stopwords {
            preprocess = PreprocessConfig::from_stopword_file(p).map_err(data)?;
        }
        if let Some(p) = &self.lexicon {
            refinement.descriptor_lexicon = load_lexicon(p).map_err(data)?;
        }
        let mode = self
            .mode
            .or(config.as_ref().map(|c| c.weighting_mode))
            .unwrap_or_default();

        let index = if let Some(path) = &self.index {
            let index = Index::load(path).map_err(data)?;
            if let Some(m) = self.mode.filter(|&m| m != index.mode()) {
                return Err(Failure::Usage(format!(
                    "--mode {m} does not match the index, which was built with {}",
                    index.mode()
                )));
            }
            index
        } else {
            let docs: Vec<Document> = if let Some(list) = &self.html_list {
                ingest_html(&read_html_list(list)?, &preprocess).map_err(data)?
            } else if let Some(corpus) = self.corpus.as_ref().or(config.as_ref().map(|c| &c.corpus_path)) {
                ingest_records(corpus, &preprocess).map_err(data)?
            } else {
                return Err(Failure::Usage(
                    "no documents: pass --index, --corpus, --html-list or --config".to_owned(),
                ));
            };
            Index::build(&docs, mode).map_err(data)?
        };
        Ok(Loaded {
            index,
            preprocess,
            refinement,
        })
    }
}

fn ttest_line(t: &TTestResult) -> String {
    format!(
        "t={:.4} p={:.4} df={} n={} mean_diff={:.5} sd_diff={:.5}",
        t.t_stat, t.p_two_tailed, t.df, t.n, t.mean_diff, t.sd_diff
    )
}

fn to_json(value: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(value).expect("values always serialize")
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Index { source, output } => {
            let loaded = source.load()?;
            loaded.index.save(&output).map_err(data)?;
            println!(
                "indexed {} documents, {} terms, mode {} -> {}",
                loaded.index.n_docs(),
                loaded.index.vocabulary().len(),
                loaded.index.mode(),
                output.display()
            );
        }
        Command::Search {
            query,
            source,
            top_k,
            json,
        } => {
            let loaded = source.load()?;
            let state = AppState {
                index: loaded.index,
                preprocess: loaded.preprocess,
                refinement: loaded.refinement,
            };
            let resp = search(&state, &query, top_k as usize);
            if resp.out_of_vocabulary {
                eprintln!("warning: query is out of vocabulary; no documents match");
            }
            if json {
                println!("{}", to_json(&resp));
            } else {
                for (rank, hit) in resp.hits.iter().enumerate() {
                    println!("{}\t{}\t{}\t{}", rank + 1, hit.doc_id, hit.score, hit.url);
                }
            }
        }
        Command::Refine { query, source, top_k } => {
            let mut loaded = source.load()?;
            if let Some(k) = top_k {
                loaded.refinement.k_top_docs = k as usize;
            }
            let record = refine_one(&query, &loaded.index, &loaded.preprocess, &loaded.refinement).map_err(data)?;
            println!("{}", to_json(&record));
        }
        Command::Experiment {
            config,
            output_dir,
            mode,
            top_k,
            stopwords,
            lexicon,
        } => {
            let mut config = ExperimentConfig::from_file(&config).map_err(data)?;
            if let Some(dir) = output_dir {
                config.output_dir = dir;
            }
            if let Some(m) = mode {
                config.weighting_mode = m;
            }
            if let Some(k) = top_k {
                config.refinement.k_top_docs = k as usize;
            }
            if let Some(p) = stopwords {
                config.preprocess = PreprocessConfig::from_stopword_file(&p).map_err(data)?;
            }
            if let Some(p) = lexicon {
                config.refinement.descriptor_lexicon = load_lexicon(&p).map_err(data)?;
            }
            let (report, outputs) = run_experiment(&config).map_err(data)?;
            for row in &report.rows {
                println!(
                    "{}\t{:.5}\t{:.5}\t{}",
                    row.query_id, row.baseline_top_sim, row.refined_top_sim, row.refined_query_text
                );
            }
            match &report.ttest {
                Some(t) => println!("{}", ttest_line(t)),
                None => eprintln!("warning: t-test omitted (fewer than 2 queries)"),
            }
            for note in &report.notes {
                eprintln!("note: {note}");
            }
            for path in [&outputs.report, &outputs.csv, &outputs.svg] {
                println!("wrote {}", path.display());
            }
        }
        Command::Ttest {
            csv,
            baseline_column,
            refined_column,
            json,
        } => {
            let (baseline, refined) = read_score_columns(&csv, &baseline_column, &refined_column).map_err(data)?;
            let result = paired_t_test(&baseline, &refined).map_err(data)?;
            if json {
                println!("{}", to_json(&result));
            } else {
                println!("{}", ttest_line(&result));
            }
        }
        Command::Serve {
            source,
            port,
            host,
            static_dir,
        } => {
            let loaded = source.load()?;
            let state = Arc::new(AppState {
                index: loaded.index,
                preprocess: loaded.preprocess,
                refinement: loaded.refinement,
            });
            let addr = SocketAddr::new(host, port);
            eprintln!("serving {} documents on http://{addr}", state.index.n_docs());
            querylift_service::serve_blocking(addr, router(state, static_dir)).map_err(data)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Data(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
