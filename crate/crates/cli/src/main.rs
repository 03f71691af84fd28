//! `jointex`: build, sample and check jointly exclusive random vectors.
//!
//! Every subcommand reads a JSON model config (see [`config`]), given either
//! as a positional path or with `--config`. Random draws come from
//! `ChaCha8Rng::seed_from_u64(seed)`, where the seed is `--seed`, else the
//! config's `seed`, else 0.

mod config;
mod error;
mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use jointex_core::existence::{check_gje, check_je, check_me, ExistenceReport};
use jointex_core::model::{sample_independent, JeModel, SampleBatch};
use jointex_core::stats::DEFAULT_MC_COUNT;
use jointex_core::transforms::{je_to_jm, jm_to_je, reflect, translate, PointJe, PointJm};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use config::ModelConfig;
use error::CliError;
use table::Table;

#[derive(Debug, Parser)]
#[command(name = "jointex", version, about = "Jointly exclusive random vectors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Report the ME, JE and (if distorted) G-JE existence conditions.
    Check(ConfigArg),
    /// Compute a face-mass allocation.
    Allocate {
        #[command(flatten)]
        config: ConfigArg,
        /// Overrides the config's strategy.
        #[arg(long)]
        strategy: Option<String>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        t: Option<f64>,
    },
    /// Validate the model and print its region masses.
    Build(ConfigArg),
    /// Draw a sample as CSV.
    Sample {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Evaluate the CDF at the points of a CSV file.
    Cdf {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        points: PathBuf,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Monte Carlo Pearson correlation matrix.
    Corr {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, default_value_t = DEFAULT_MC_COUNT)]
        count: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Monte Carlo check that E[Π (exp(i t_k X_k) − 1)] vanishes, against an
    /// independent control with the same marginals.
    Cfcheck {
        #[command(flatten)]
        config: ConfigArg,
        /// Comma-separated frequencies, one per coordinate.
        #[arg(long)]
        t: String,
        #[arg(long, default_value_t = DEFAULT_MC_COUNT)]
        count: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Map a sample CSV through a support transform.
    Transform {
        #[arg(long, value_enum)]
        mode: Mode,
        /// Comma-separated shift for `translate`.
        #[arg(long)]
        shift: Option<String>,
        /// Input CSV; stdin when absent.
        #[arg(long)]
        input: Option<PathBuf>,
        #[command(flatten)]
        output: OutputArg,
    },
    /// Sampled support points with region tags and their zero-sum images.
    ExportSupport {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, default_value_t = 5000)]
        count: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        output: OutputArg,
    },
}

#[derive(Debug, Args)]
struct ConfigArg {
    /// Model config (JSON).
    #[arg(value_name = "CONFIG", required_unless_present = "config")]
    path: Option<PathBuf>,
    #[arg(long, conflicts_with = "path")]
    config: Option<PathBuf>,
}

impl ConfigArg {
    fn load(&self) -> Result<ModelConfig, CliError> {
        let path = self.path.as_ref().or(self.config.as_ref()).expect("clap requires one");
        ModelConfig::load(path)
    }
}

#[derive(Debug, Args)]
struct OutputArg {
    /// Output file; stdout when absent.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

impl OutputArg {
    fn open(&self) -> Result<Box<dyn Write>, CliError> {
        Ok(match &self.output {
            Some(p) => Box::new(BufWriter::new(File::create(p).map_err(|e| CliError::io(p, e))?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Je2jm,
    Jm2je,
    Reflect,
    Translate,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("jointex: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cmd: Command) -> Result<u8, CliError> {
    match cmd {
        Command::Check(c) => check(&c.load()?),
        Command::Allocate { config, strategy, lambda, t } => {
            let mut cfg = config.load()?;
            if let Some(s) = strategy {
                cfg.allocation.strategy = s;
            }
            cfg.allocation.lambda = lambda.or(cfg.allocation.lambda);
            cfg.allocation.t = t.or(cfg.allocation.t);
            allocate(&cfg)
        }
        Command::Build(c) => {
            let cfg = c.load()?;
            print_json(&summary(&cfg.build()?, &cfg)?)?;
            Ok(0)
        }
        Command::Sample { config, count, seed, output } => {
            let cfg = config.load()?;
            let model = cfg.build()?;
            let batch = model.sample(&mut rng(seed, &cfg), count);
            Table::from_batch(&batch).write(output.open()?, "x")?;
            Ok(0)
        }
        Command::Cdf { config, points, output } => {
            let model = config.load()?.build()?;
            cdf(&model, &points, &output)
        }
        Command::Corr { config, count, seed } => {
            let cfg = config.load()?;
            let batch = cfg.build()?.sample(&mut rng(seed, &cfg), count);
            print_json(&json!({ "count": count, "pearson": batch.pearson_matrix()? }))?;
            Ok(0)
        }
        Command::Cfcheck { config, t, count, seed } => {
            let cfg = config.load()?;
            let model = cfg.build()?;
            let t = parse_list(&t, "t")?;
            let mut rng = rng(seed, &cfg);
            let je = model.sample(&mut rng, count).cf_product_magnitude(&t)?;
            let control =
                sample_independent(model.marginals(), &mut rng, count).cf_product_magnitude(&t)?;
            print_json(&json!({
                "t": t,
                "count": count,
                "je_magnitude": je,
                "independent_magnitude": control,
            }))?;
            Ok(0)
        }
        Command::Transform { mode, shift, input, output } => {
            let table = match &input {
                Some(p) => Table::read(File::open(p).map_err(|e| CliError::io(p, e))?)?,
                None => Table::read(io::stdin().lock())?,
            };
            let shift = shift.map(|s| parse_list(&s, "shift")).transpose()?;
            transform(table, mode, shift.as_deref())?.write(output.open()?, "x")?;
            Ok(0)
        }
        Command::ExportSupport { config, count, seed, output } => {
            let cfg = config.load()?;
            let batch = cfg.build()?.sample(&mut rng(seed, &cfg), count);
            export_support(&batch, output.open()?)?;
            Ok(0)
        }
    }
}

fn rng(seed: Option<u64>, cfg: &ModelConfig) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.or(cfg.seed).unwrap_or(0))
}

fn print_json(v: &Value) -> Result<(), CliError> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, v).map_err(|e| CliError::Output(e.into()))?;
    writeln!(out)?;
    Ok(())
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| CliError::Config(format!("--{what}: {p:?} is not a number")))
        })
        .collect()
}

fn report_json(r: &ExistenceReport) -> Value {
    json!({
        "feasible": r.feasible,
        "lhs": r.lhs,
        "rhs": r.rhs,
        "slack": r.slack,
    })
}

fn check(cfg: &ModelConfig) -> Result<u8, CliError> {
    let marginals = cfg.marginals()?;
    let me = check_me(&marginals)?;
    let je = check_je(&marginals)?;
    let mut out = json!({ "ME": report_json(&me), "JE": report_json(&je) });
    let mut ok = je.feasible;
    if cfg.distortions(&marginals)?.is_some() {
        let gje = check_gje(&marginals, &cfg.caps()?)?;
        out["GJE"] = report_json(&gje);
        ok = gje.feasible;
    }
    print_json(&out)?;
    Ok(if ok { 0 } else { 2 })
}

fn allocation_json(alloc: &jointex_core::allocation::FaceAllocation) -> Value {
    let p: serde_json::Map<String, Value> =
        alloc.iter().map(|(f, m)| (f.to_string(), json!(m))).collect();
    json!({
        "p": p,
        "axis_loads": alloc.axis_loads(),
        "caps": alloc.caps(),
        "weighted_mass": alloc.weighted_mass(),
    })
}

fn allocate(cfg: &ModelConfig) -> Result<u8, CliError> {
    let alloc = cfg.allocation()?;
    let mut out = allocation_json(&alloc);
    out["strategy"] = json!(cfg.allocation.strategy);
    print_json(&out)?;
    Ok(0)
}

fn summary(model: &JeModel, cfg: &ModelConfig) -> Result<Value, CliError> {
    let regions: serde_json::Map<String, Value> =
        model.region_masses().into_iter().map(|(r, m)| (r.to_string(), json!(m))).collect();
    let existence = if model.is_distorted() {
        check_gje(model.marginals(), model.caps())?
    } else {
        check_je(model.marginals())?
    };
    Ok(json!({
        "n": model.n(),
        "q0": cfg.q0()?,
        "distorted": model.is_distorted(),
        "allocation": allocation_json(model.allocation()),
        "axis_mass": model.axis_mass(),
        "origin_mass": model.origin_mass(),
        "regions": regions,
        "existence": report_json(&existence),
    }))
}

fn cdf(model: &JeModel, points: &Path, output: &OutputArg) -> Result<u8, CliError> {
    let file = File::open(points).map_err(|e| CliError::io(points, e))?;
    let table = Table::read(file)?;
    if table.n != model.n() {
        return Err(jointex_core::Error::Shape { expected: model.n(), found: table.n }.into());
    }
    let mut wtr = csv::Writer::from_writer(output.open()?);
    let mut header = table::coord_header("x", table.n);
    header.push("cdf".into());
    wtr.write_record(&header)?;
    for row in &table.rows {
        let v = model.cdf(row)?;
        let rec: Vec<String> = row.iter().chain([&v]).map(|&x| table::fmt_num(x)).collect();
        wtr.write_record(&rec)?;
    }
    wtr.flush()?;
    Ok(0)
}

fn transform(mut table: Table, mode: Mode, shift: Option<&[f64]>) -> Result<Table, CliError> {
    if matches!(mode, Mode::Translate) != shift.is_some() {
        return Err(CliError::Config(
            "--shift is required by, and only used with, translate".into(),
        ));
    }
    for row in table.rows.iter_mut() {
        *row = match mode {
            Mode::Je2jm => je_to_jm(&PointJe::new(std::mem::take(row))?).into_inner(),
            Mode::Jm2je => jm_to_je(&PointJm::new(std::mem::take(row))?).into_inner(),
            Mode::Reflect => reflect(row),
            Mode::Translate => translate(row, shift.expect("checked"))?,
        };
    }
    Ok(table)
}

fn export_support<W: Write>(batch: &SampleBatch, out: W) -> Result<(), CliError> {
    let n = batch.n();
    let mut wtr = csv::Writer::from_writer(out);
    let mut header = table::coord_header("x", n);
    header.push("region".into());
    header.extend(table::coord_header("y", n));
    wtr.write_record(&header)?;
    for (row, region) in batch.rows().zip(batch.regions()) {
        let y = je_to_jm(&PointJe::new(row.to_vec())?);
        let mut rec: Vec<String> = row.iter().map(|&v| table::fmt_num(v)).collect();
        rec.push(region.to_string());
        rec.extend(y.as_slice().iter().map(|&v| table::fmt_num(v)));
        wtr.write_record(&rec)?;
    }
    wtr.flush()?;
    Ok(())
}
