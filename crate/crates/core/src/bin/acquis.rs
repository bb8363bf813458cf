use std::path::PathBuf;
use std::process::ExitCode;

use acquis_core::align::Aligner;
use acquis_core::celex::parse_celex;
use acquis_core::config::PipelineConfig;
use acquis_core::pipeline::{run, Command, PipelineError};
use clap::{Parser, Subcommand};

/// Builds, aligns and exports a multilingual legal parallel corpus.
#[derive(Debug, Parser)]
#[command(name = "acquis", version)]
struct Cli {
    /// JSON configuration file.
    #[arg(long, global = true, default_value = "acquis.json")]
    config: PathBuf,
    /// Language pairs to align, e.g. `en-fr,et-mt`.
    #[arg(long, global = true, value_delimiter = ',')]
    pairs: Vec<String>,
    /// Restricts work to these CELEX ids.
    #[arg(long, global = true, value_delimiter = ',')]
    celex: Vec<String>,
    /// Runs a single aligner instead of the configured set.
    #[arg(long, global = true)]
    aligner: Option<String>,
    /// Lexicon sampling seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Copy or download raw documents into `raw/`.
    Fetch,
    /// Write one TEI file per document and language.
    Normalize,
    /// Align every configured language pair.
    Align {
        /// Run only the final HunAlign phase with the stored lexicon.
        #[arg(long)]
        reuse_lexicon: bool,
    },
    /// Convert stand-off XML alignments to CSV.
    Export,
    /// Generate in-place bilingual files.
    Bitext,
    /// Write corpus size, descriptor and arity tables.
    Stats,
    /// Compare the two aligners' links.
    Agree,
    /// Normalize, align, export, bitext, stats and agree in one go.
    All,
}

fn apply_flags(cli: &Cli, cfg: &mut PipelineConfig) -> Result<(), PipelineError> {
    let usage = |m: String| PipelineError::Usage(m);
    if !cli.pairs.is_empty() {
        cfg.pairs = cli
            .pairs
            .iter()
            .map(|p| {
                p.split_once('-')
                    .map(|(a, b)| (a.to_owned(), b.to_owned()))
                    .ok_or_else(|| usage(format!("bad pair {p:?}, expected src-tgt")))
            })
            .collect::<Result<_, _>>()?;
    }
    if !cli.celex.is_empty() {
        cfg.celex = cli
            .celex
            .iter()
            .map(|c| parse_celex(c).map_err(|e| usage(e.to_string())))
            .collect::<Result<_, _>>()?;
    }
    if let Some(a) = &cli.aligner {
        cfg.aligners = vec![a.parse::<Aligner>().map_err(usage)?];
    }
    if let Some(seed) = cli.seed {
        cfg.seed = Some(seed);
    }
    if let Some(jobs) = cli.jobs {
        cfg.jobs = jobs;
    }
    cfg.validate()?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = PipelineConfig::load(&cli.config).map_err(PipelineError::from).and_then(|mut cfg| {
        apply_flags(&cli, &mut cfg)?;
        let command = match cli.command {
            Cmd::Fetch => Command::Fetch,
            Cmd::Normalize => Command::Normalize,
            Cmd::Align { reuse_lexicon } => Command::Align { reuse_lexicon },
            Cmd::Export => Command::Export,
            Cmd::Bitext => Command::Bitext,
            Cmd::Stats => Command::Stats,
            Cmd::Agree => Command::Agree,
            Cmd::All => Command::All,
        };
        run(command, &cfg)
    });
    match result {
        Ok(report) => {
            print!("{}", report.stdout);
            log::info!("wrote {} files", report.written.len());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("acquis: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
