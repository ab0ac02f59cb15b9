use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cmh_ecc::cmh::{
    read_jsonl, read_model, synth_dataset, train, write_jsonl, write_model, SimilarityMatrix, SynthConfig,
};
use cmh_ecc::codec::CodeSet;
use cmh_ecc::config::PipelineConfig;
use cmh_ecc::index::HashIndex;
use cmh_ecc::pipeline::{encode_samples, evaluate_model, snap_codes, Modality};
use cmh_ecc::rscode::RsParams;
use cmh_ecc::Error;

/// Error-corrected cross-modal hashing pipeline.
#[derive(Parser)]
#[command(name = "cmh-ecc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModalityArg {
    Image,
    Attr,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic two-modality dataset as JSON lines.
    Synth {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 8)]
        attrs: usize,
        #[arg(long, default_value_t = 32)]
        feature_dim: usize,
        #[arg(long, default_value_t = 0.3)]
        noise_sigma: f64,
        /// Identity prototypes; defaults to n / 8.
        #[arg(long)]
        identities: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train both branches and write a model file; logs epoch,objective.
    Train {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        data: PathBuf,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Encode every sample through one branch into a code file.
    Encode {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum)]
        modality: ModalityArg,
        #[arg(long)]
        out: PathBuf,
    },
    /// Snap codes to the nearest Reed-Solomon codeword within t symbols.
    Snap {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 8)]
        t: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rank database codes for each query code; writes query_id,rank,id,distance.
    Query {
        #[arg(long)]
        db: PathBuf,
        #[arg(long)]
        queries: PathBuf,
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// NDCG curves with and without error correction plus pair distances.
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
}

/// Process failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NonFiniteLoss { .. } => 3,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

fn with_path(path: &Path) -> impl FnOnce(std::io::Error) -> Failure + '_ {
    move |e| Failure { code: 2, message: format!("{}: {e}", path.display()) }
}

fn open(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path).map(BufReader::new).map_err(with_path(path))
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path).map(BufWriter::new).map_err(with_path(path))
}

fn distinct_paths(paths: &[&Path]) -> Result<(), Failure> {
    for (i, a) in paths.iter().enumerate() {
        if paths[i + 1..].contains(a) {
            return Err(Failure { code: 2, message: format!("path {} used twice", a.display()) });
        }
    }
    Ok(())
}

fn load_config(path: Option<&Path>, seed: Option<u64>) -> Result<PipelineConfig, Failure> {
    let mut cfg = match path {
        Some(p) => PipelineConfig::parse(&fs::read_to_string(p).map_err(with_path(p))?)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = seed {
        cfg.train.seed = seed;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Synth { n, attrs, feature_dim, noise_sigma, identities, seed, out } => {
            let mut cfg = SynthConfig::new(n, attrs, feature_dim, noise_sigma, seed);
            if let Some(k) = identities {
                cfg.identities = k;
            }
            let (samples, _) = synth_dataset(&cfg)?;
            write_jsonl(&samples, create(&out)?).map_err(Failure::from)?;
            println!("n={n} attrs={attrs}");
        }
        Command::Train { config, data, seed, out } => {
            distinct_paths(&[&data, &out])?;
            let cfg = load_config(config.as_deref(), seed)?;
            let samples = read_jsonl(open(&data)?)?;
            let sim = SimilarityMatrix::from_samples(&samples);
            let trained = train(&samples, &sim, &cfg.train)?;
            write_model(&trained.model, create(&out)?)?;
            let mut log = String::from("epoch,objective\n");
            for e in &trained.history {
                log.push_str(&format!("{},{:.6}\n", e.epoch, e.objective));
            }
            print!("{log}");
        }
        Command::Encode { model, data, modality, out } => {
            distinct_paths(&[&model, &data, &out])?;
            let model = read_model(open(&model)?)?;
            let samples = read_jsonl(open(&data)?)?;
            let modality = match modality {
                ModalityArg::Image => Modality::Image,
                ModalityArg::Attr => Modality::Attributes,
            };
            let codes = encode_samples(&model, &samples, modality)?;
            codes.write_to(create(&out)?)?;
            println!("encoded {} codes of {} bits", codes.len(), codes.code_len_bits);
        }
        Command::Snap { input, t, out } => {
            distinct_paths(&[&input, &out])?;
            let codes = CodeSet::read_from(open(&input)?)?;
            let params = RsParams::for_code_bits(codes.code_len_bits, t)?;
            let (snapped, stats) = snap_codes(&codes, &params)?;
            snapped.write_to(create(&out)?)?;
            println!(
                "snapped {} of {} codes, {} symbols corrected",
                stats.snapped, stats.total, stats.corrected_symbols
            );
        }
        Command::Query { db, queries, k, out } => {
            let index = HashIndex::from_code_set(CodeSet::read_from(open(&db)?)?)?;
            let queries = CodeSet::read_from(open(&queries)?)?;
            let mut csv = String::from("query_id,rank,id,distance\n");
            for (qid, code) in &queries.records {
                for (rank, hit) in index.top_k(code, k)?.hits.iter().enumerate() {
                    csv.push_str(&format!("{qid},{},{},{}\n", rank + 1, hit.id, hit.distance));
                }
            }
            match out {
                Some(path) => fs::write(&path, csv).map_err(with_path(&path))?,
                None => print!("{csv}"),
            }
        }
        Command::Eval { model, data, config, seed, out } => {
            distinct_paths(&[&model, &data, &out])?;
            let cfg = load_config(config.as_deref(), seed)?;
            let model = read_model(open(&model)?)?;
            let samples = read_jsonl(open(&data)?)?;
            let report = evaluate_model(&model, &samples, &cfg)?;
            fs::create_dir_all(&out).map_err(with_path(&out))?;
            for (name, body) in [
                ("ndcg_ecc.csv", report.ecc.to_csv()),
                ("ndcg_no_ecc.csv", report.no_ecc.to_csv()),
                ("pairs.csv", report.pairs_csv()),
            ] {
                let path = out.join(name);
                fs::write(&path, body).map_err(with_path(&path))?;
            }
            let k = cfg.k_levels.iter().copied().find(|&k| k == 10).unwrap_or(cfg.k_levels[0]);
            println!(
                "queries={} ndcg@{k}: ecc={:.6} no_ecc={:.6}",
                report.ecc.queries_used,
                report.ecc.at(k).unwrap_or(0.0),
                report.no_ecc.at(k).unwrap_or(0.0)
            );
            println!(
                "mean cross-modal hamming: before={:.3} after={:.3}; zero-distance pairs: before={} after={}",
                report.before.mean_hamming,
                report.after.mean_hamming,
                report.before.zero_distance,
                report.after.zero_distance
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
