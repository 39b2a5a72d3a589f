use std::fs;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use markushkit::chemgraph::valence_errors;
use markushkit::cxsmiles::{canonical_cxsmiles, parse_cxsmiles, write_cxsmiles, CxsmilesError};
use markushkit::datagen::{
    parse_corpus, record_stats, render_backbone, DatagenError, DrawStyle, GenConfig, Generator, Lexicon, RenderConfig,
    TemplateSet, DEFAULT_CORPUS,
};
use markushkit::markushrepr::{decode_text, encode_text};
use markushkit::metrics::evaluate_dataset;
use markushkit::records::{pair_by_id, read_jsonl, write_jsonl, DatasetRecord, PredictionRecord, RecordError};

const SEED_VAR: &str = "MARKUSHKIT_SEED";

#[derive(Parser)]
#[command(name = "markushkit", version, about = "Markush structure toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse CXSMILES lines and report problems.
    Parse {
        /// Input file; stdin when absent.
        input: Option<PathBuf>,
        /// Also check atom indices, labels and valences.
        #[arg(long)]
        validate: bool,
        /// Print the canonical CXSMILES of each valid line.
        #[arg(long)]
        canonical: bool,
    },
    /// Fill the optimized or the CXSMILES field of dataset records.
    Convert {
        #[arg(long, value_enum)]
        to: Target,
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic dataset.
    Generate {
        #[arg(long)]
        config: Option<PathBuf>,
        /// SMILES file, one molecule per line with an optional name.
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Directory of template files.
        #[arg(long)]
        templates: Option<PathBuf>,
        #[arg(long)]
        lexicon: Option<PathBuf>,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
        /// Also write PNG rasters with image noise applied.
        #[arg(long)]
        raster: bool,
        /// Skip writing SVG files.
        #[arg(long)]
        no_svg: bool,
    },
    /// Score predictions against ground truth.
    Evaluate {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Dataset statistics.
    Stats {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Draw CXSMILES lines as SVG files with OCR cells.
    Render {
        input: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Target {
    Optimized,
    Cxsmiles,
}

/// Failures that map to exit code 2.
fn is_environment_error(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        c.is::<io::Error>()
            || c.downcast_ref::<RecordError>().is_some_and(|r| matches!(r, RecordError::Io(_)))
            || c.downcast_ref::<DatagenError>().is_some_and(|d| matches!(d, DatagenError::Io(..)))
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_environment_error(&e) { 2 } else { 1 })
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Parse {
            input,
            validate,
            canonical,
        } => cmd_parse(input.as_deref(), validate, canonical),
        Command::Convert { to, input, out } => cmd_convert(to, input.as_deref(), out.as_deref()),
        Command::Generate {
            config,
            corpus,
            templates,
            lexicon,
            n,
            out,
            raster,
            no_svg,
        } => cmd_generate(GenerateArgs {
            config,
            corpus,
            templates,
            lexicon,
            n,
            out,
            raster,
            svg: !no_svg,
        }),
        Command::Evaluate { pred, gt, report } => cmd_evaluate(&pred, &gt, report.as_deref()),
        Command::Stats { input, json } => cmd_stats(&input, json),
        Command::Render { input, out, seed } => cmd_render(input.as_deref(), &out, seed),
    }
}

fn read_input(path: Option<&Path>) -> Result<String> {
    match path {
        Some(p) => fs::read_to_string(p).with_context(|| format!("reading {}", p.display())),
        None => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).context("reading stdin")?;
            Ok(s)
        }
    }
}

fn read_records<T: serde::de::DeserializeOwned>(path: Option<&Path>) -> Result<Vec<T>> {
    let text = read_input(path)?;
    let what = path.map_or("stdin".to_string(), |p| p.display().to_string());
    read_jsonl(BufReader::new(text.as_bytes())).with_context(|| format!("parsing {what}"))
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => io::stdout().lock().write_all(bytes).context("writing stdout"),
    }
}

fn jsonl_bytes<T: Serialize>(records: &[T]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_jsonl(&mut buf, records)?;
    Ok(buf)
}

/// Innermost error variant name, e.g. `UnbalancedRing`.
fn error_kind(e: &CxsmilesError) -> String {
    let debug = match e {
        CxsmilesError::Smiles(inner) => format!("{inner:?}"),
        other => format!("{other:?}"),
    };
    debug.chars().take_while(|c| c.is_alphanumeric()).collect()
}

fn cmd_parse(input: Option<&Path>, validate: bool, canonical: bool) -> Result<u8> {
    let text = read_input(input)?;
    let stdout = io::stdout();
    let mut out = BufWriter::new(stdout.lock());
    let mut failed = 0usize;
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let result = parse_cxsmiles(line).map_err(|e| format!("{}: {e}", error_kind(&e))).and_then(|ms| {
            if validate {
                ms.validate().map_err(|e| format!("{}: {e}", error_kind(&e)))?;
                if let Some(issue) = valence_errors(&ms.graph).first() {
                    return Err(format!("Valence: atom {} {}", issue.atom, issue.reason));
                }
            }
            Ok(ms)
        });
        match result {
            Ok(ms) if canonical => writeln!(out, "OK\t{}", canonical_cxsmiles(&ms))?,
            Ok(_) => writeln!(out, "OK")?,
            Err(msg) => {
                failed += 1;
                writeln!(out, "ERROR\tline {}: {msg}", k + 1)?;
            }
        }
    }
    out.flush()?;
    Ok(if failed > 0 { 1 } else { 0 })
}

fn cmd_convert(to: Target, input: Option<&Path>, out: Option<&Path>) -> Result<u8> {
    let mut records: Vec<DatasetRecord> = read_records(input)?;
    let mut failed = 0usize;
    for r in &mut records {
        match to {
            Target::Optimized => match parse_cxsmiles(&r.cxsmiles) {
                Ok(ms) => r.optimized = encode_text(&ms, &r.table),
                Err(e) => {
                    failed += 1;
                    eprintln!("{}: {}: {e}", r.id, error_kind(&e));
                }
            },
            Target::Cxsmiles => {
                let decoded = decode_text(&r.optimized);
                if decoded.is_clean() {
                    r.cxsmiles = write_cxsmiles(&decoded.structure);
                    r.table = decoded.table;
                } else {
                    failed += 1;
                    for d in &decoded.diagnostics {
                        eprintln!("{}: {d}", r.id);
                    }
                }
            }
        }
    }
    write_output(out, &jsonl_bytes(&records)?)?;
    Ok(if failed > 0 { 1 } else { 0 })
}

struct GenerateArgs {
    config: Option<PathBuf>,
    corpus: Option<PathBuf>,
    templates: Option<PathBuf>,
    lexicon: Option<PathBuf>,
    n: usize,
    out: PathBuf,
    raster: bool,
    svg: bool,
}

#[derive(Serialize)]
struct FailureEntry {
    index: usize,
    error: String,
}

#[derive(Serialize)]
struct Manifest {
    seed: u64,
    config_sha256: String,
    dataset_sha256: String,
    n_requested: usize,
    n_written: usize,
    n_failed: usize,
    failures: Vec<FailureEntry>,
    config: GenConfig,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn cmd_generate(args: GenerateArgs) -> Result<u8> {
    let mut config = match &args.config {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            GenConfig::from_toml(&text)?
        }
        None => GenConfig::default(),
    };
    if let Ok(seed) = std::env::var(SEED_VAR) {
        config.seed = seed
            .trim()
            .parse()
            .with_context(|| format!("{SEED_VAR} must be an unsigned integer, got '{seed}'"))?;
    }
    let corpus = match &args.corpus {
        Some(p) => parse_corpus(&fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)?,
        None => parse_corpus(DEFAULT_CORPUS)?,
    };
    let templates = match &args.templates {
        Some(dir) => TemplateSet::load_dir(dir)?,
        None => TemplateSet::builtin(),
    };
    let lexicon = match &args.lexicon {
        Some(p) => Lexicon::parse(&fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?)?,
        None => Lexicon::default(),
    };
    let generator = Generator::new(config.clone(), corpus, lexicon, templates)?;
    let run = generator.generate(args.n);

    fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;
    if args.svg {
        fs::create_dir_all(args.out.join("svg")).context("creating svg directory")?;
    }
    if args.raster {
        fs::create_dir_all(args.out.join("png")).context("creating png directory")?;
    }
    let mut records = Vec::with_capacity(run.samples.len());
    for s in &run.samples {
        let mut image_path = None;
        if args.svg {
            let rel = format!("svg/{}.svg", s.id);
            let svg = s.svg.as_deref().unwrap_or_default();
            fs::write(args.out.join(&rel), svg).with_context(|| format!("writing {rel}"))?;
            image_path = Some(rel);
        }
        let mut record = s.to_record(None);
        if args.raster {
            let rel = format!("png/{}.png", s.id);
            let raster = generator.raster(s);
            raster
                .image
                .save(args.out.join(&rel))
                .map_err(|e| io::Error::other(e.to_string()))
                .with_context(|| format!("writing {rel}"))?;
            record.ocr_cells = raster.cells;
            image_path = Some(rel);
        }
        record.image_path = image_path;
        records.push(record);
    }
    let dataset = jsonl_bytes(&records)?;
    fs::write(args.out.join("dataset.jsonl"), &dataset).context("writing dataset.jsonl")?;
    for (i, e) in &run.failures {
        eprintln!("sample {i} skipped: {e}");
    }
    let manifest = Manifest {
        seed: config.seed,
        config_sha256: sha256_hex(config.to_toml().as_bytes()),
        dataset_sha256: sha256_hex(&dataset),
        n_requested: args.n,
        n_written: records.len(),
        n_failed: run.failures.len(),
        failures: run
            .failures
            .iter()
            .map(|(index, e)| FailureEntry {
                index: *index,
                error: e.to_string(),
            })
            .collect(),
        config,
    };
    let text = serde_json::to_string_pretty(&manifest)? + "\n";
    fs::write(args.out.join("manifest.json"), text).context("writing manifest.json")?;
    println!(
        "wrote {} samples ({} failed) to {}",
        manifest.n_written,
        manifest.n_failed,
        args.out.display()
    );
    Ok(0)
}

fn cmd_evaluate(pred: &Path, gt: &Path, report: Option<&Path>) -> Result<u8> {
    let gts: Vec<DatasetRecord> = read_records(Some(gt))?;
    let preds: Vec<PredictionRecord> = read_records(Some(pred))?;
    let pairs = pair_by_id(preds, gts)?;
    let result = evaluate_dataset(&pairs)?;
    if let Some(path) = report {
        let text = serde_json::to_string_pretty(&result)? + "\n";
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    print!("{}", result.summary());
    Ok(0)
}

fn cmd_stats(input: &Path, json: bool) -> Result<u8> {
    let records: Vec<DatasetRecord> = read_records(Some(input))?;
    let stats = record_stats(&records).map_err(|(id, e)| anyhow::anyhow!("record '{id}': {e}"))?;
    if json {
        println!("{}", serde_json::to_string(&stats)?);
    } else {
        print!("{stats}");
    }
    Ok(0)
}

fn cmd_render(input: Option<&Path>, out: &Path, seed: u64) -> Result<u8> {
    let text = read_input(input)?;
    fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let cfg = RenderConfig::default();
    let mut failed = 0;
    for (k, line) in text.lines().map(str::trim).enumerate().filter(|(_, l)| !l.is_empty()) {
        let ms = match parse_cxsmiles(line) {
            Ok(ms) => ms,
            Err(e) => {
                failed += 1;
                eprintln!("line {}: {}: {e}", k + 1, error_kind(&e));
                continue;
            }
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(k as u64);
        let style = DrawStyle::sample(&cfg, &mut rng);
        let drawing = match render_backbone(&ms, &style, &mut rng) {
            Ok(d) => d,
            Err(e) => {
                failed += 1;
                eprintln!("line {}: {e}", k + 1);
                continue;
            }
        };
        let stem = format!("{:04}", k + 1);
        fs::write(out.join(format!("{stem}.svg")), drawing.to_svg()).with_context(|| format!("writing {stem}.svg"))?;
        let cells = serde_json::to_string(&drawing.cells())? + "\n";
        fs::write(out.join(format!("{stem}.cells.json")), cells).with_context(|| format!("writing {stem}.cells.json"))?;
    }
    if failed > 0 {
        bail!("{failed} line(s) could not be rendered");
    }
    Ok(0)
}
