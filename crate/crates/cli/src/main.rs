//! `sdw`: regression residual autocorrelation diagnostics from the command line.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid input or usage.

mod svg;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::builder::RangedU64ValueParser;
use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use sdw_core::autocorr::scatter_series;
use sdw_core::dataio::{fixture_csv, parse_dataset, parse_distance_matrix};
use sdw_core::inference::{
    analyze, enumerate_orders, permutation_test, run_report, PermutationSettings, ReportConfig,
    DEFAULT_PERMUTATIONS,
};
use sdw_core::json::{format_float, to_canonical_json};
use sdw_core::regression::{fit_model, DEFAULT_LMAX};
use sdw_core::{Dataset, DistanceMatrix, Mode, Model, WeightSpec};

#[derive(Debug, Parser)]
#[command(
    name = "sdw",
    version,
    about = "Serial and spatial autocorrelation tests for regression residuals"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit the regression and print the fit as JSON.
    Fit(ModelArgs),
    /// Fit, then test the residuals: DW, SAI, RCI, Geary C, ARCI and a permutation p-value.
    Test(TestArgs),
    /// Write the residual autocorrelation scatterplot as CSV and optionally SVG.
    Scatter(ScatterArgs),
    /// Randomization test of the SAI only, or a DW sweep over random row orders.
    Permute(PermuteArgs),
    /// Print a bundled dataset as CSV.
    Fixture {
        #[arg(value_parser = ["table2_conventional", "table2_alphabetical"])]
        name: String,
    },
}

#[derive(Debug, Args)]
struct ModelArgs {
    /// Dataset CSV: label column first, then numeric columns.
    #[arg(long)]
    data: PathBuf,
    /// Response column.
    #[arg(long)]
    y: String,
    /// Predictor column; repeat for several. Omit for an intercept-only model.
    #[arg(long)]
    x: Vec<String>,
    /// Fit ln(lmax / y - 1) instead of y.
    #[arg(long)]
    logistic: bool,
    /// Saturation level for --logistic.
    #[arg(long, default_value_t = DEFAULT_LMAX, value_parser = positive_finite)]
    lmax: f64,
}

#[derive(Debug, Args)]
struct SpatialArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Symmetric distance matrix CSV with labels in the header and first column.
    #[arg(long)]
    dist: PathBuf,
    /// Distance kernel: power[:gamma], exp, or step:d0.
    #[arg(long, default_value = "power:1")]
    weight: WeightSpec,
    /// Residual standardization: population or sample.
    #[arg(long, default_value = "sample")]
    mode: Mode,
}

#[derive(Debug, Args)]
struct PermutationArgs {
    /// Number of random relabelings.
    #[arg(long, default_value_t = DEFAULT_PERMUTATIONS, value_parser = RangedU64ValueParser::<usize>::new().range(1..))]
    m: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct TestArgs {
    #[command(flatten)]
    spatial: SpatialArgs,
    #[command(flatten)]
    permutation: PermutationArgs,
    /// Omit the randomization test from the report.
    #[arg(long)]
    skip_permutation: bool,
}

#[derive(Debug, Args)]
struct ScatterArgs {
    #[command(flatten)]
    spatial: SpatialArgs,
    /// CSV destination; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// SVG destination.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PermuteArgs {
    #[command(flatten)]
    spatial: SpatialArgs,
    #[command(flatten)]
    permutation: PermutationArgs,
    /// Instead of the randomization test, report DW under k random row orders.
    #[arg(long, value_name = "K", value_parser = RangedU64ValueParser::<usize>::new().range(2..))]
    enumerate_dw: Option<usize>,
}

fn positive_finite(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v > 0.0 => Ok(v),
        Ok(_) => Err("must be a positive finite number".into()),
        Err(e) => Err(e.to_string()),
    }
}

/// A diagnostic plus the exit code it maps to.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn io(message: String) -> Self {
        Failure { code: 1, message }
    }
}

impl From<sdw_core::Error> for Failure {
    fn from(e: sdw_core::Error) -> Self {
        Failure {
            code: if e.is_io() { 1 } else { 2 },
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("sdw: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Fit(args) => cmd_fit(&args),
        Command::Test(args) => cmd_test(&args),
        Command::Scatter(args) => cmd_scatter(&args),
        Command::Permute(args) => cmd_permute(&args),
        Command::Fixture { name } => {
            let csv = fixture_csv(&name).expect("names restricted by the parser");
            emit(csv)
        }
    }
}

fn cmd_fit(args: &ModelArgs) -> Result<(), Failure> {
    let (data, _) = read_dataset(args)?;
    let x: Vec<&str> = args.x.iter().map(String::as_str).collect();
    let fit = fit_model(&data, &args.y, &x, model(args))?;
    emit(&to_canonical_json(&fit)?)
}

fn cmd_test(args: &TestArgs) -> Result<(), Failure> {
    let inputs = Inputs::read(&args.spatial)?;
    let mut config = config(&args.spatial);
    if !args.skip_permutation {
        config.permutations = Some(PermutationSettings {
            m: args.permutation.m,
            seed: args.permutation.seed,
        });
    }
    let mut report = run_report(&inputs.data, &inputs.dist, &config)?;
    report.provenance.data_sha256 = Some(inputs.data_sha256);
    report.provenance.dist_sha256 = Some(inputs.dist_sha256);
    emit(&to_canonical_json(&report)?)
}

fn cmd_scatter(args: &ScatterArgs) -> Result<(), Failure> {
    let inputs = Inputs::read(&args.spatial)?;
    let analysis = analyze(&inputs.data, &inputs.dist, &config(&args.spatial))?;
    let series = scatter_series(&analysis.standardized, &analysis.weights)?;
    let labels = analysis.dataset.labels();

    let mut csv = csv::Writer::from_writer(Vec::new());
    let write_rows = |w: &mut csv::Writer<Vec<u8>>| -> csv::Result<()> {
        w.write_record(["label", "e", "y_obs", "y_trend"])?;
        for (i, label) in labels.iter().enumerate() {
            w.write_record([
                label.clone(),
                format_float(series.x[i]),
                format_float(series.y_observed[i]),
                format_float(series.y_trend[i]),
            ])?;
        }
        w.flush()?;
        Ok(())
    };
    write_rows(&mut csv).map_err(|e| Failure::io(format!("cannot format CSV: {e}")))?;
    let csv = csv.into_inner().map_err(|e| Failure::io(e.to_string()))?;

    // Render before writing anything so that a failure leaves no partial outputs.
    let svg = args
        .svg
        .as_ref()
        .map(|path| (path, svg::render(labels, &series)));
    match &args.out {
        Some(path) => write_file(path, &csv)?,
        None => emit_bytes(&csv)?,
    }
    if let Some((path, doc)) = svg {
        write_file(path, doc.as_bytes())?;
    }
    Ok(())
}

fn cmd_permute(args: &PermuteArgs) -> Result<(), Failure> {
    let inputs = Inputs::read(&args.spatial)?;
    let config = config(&args.spatial);
    let seed = args.permutation.seed;
    let json = match args.enumerate_dw {
        Some(k) => to_canonical_json(&enumerate_orders(
            &inputs.data,
            &inputs.dist,
            &config,
            k,
            seed,
        )?)?,
        None => {
            let analysis = analyze(&inputs.data, &inputs.dist, &config)?;
            let report = permutation_test(
                &analysis.standardized,
                &analysis.weights,
                args.permutation.m,
                seed,
            )?;
            to_canonical_json(&report)?
        }
    };
    emit(&json)
}

fn model(args: &ModelArgs) -> Model {
    if args.logistic {
        Model::LogisticLinearized { lmax: args.lmax }
    } else {
        Model::Linear
    }
}

fn config(args: &SpatialArgs) -> ReportConfig {
    let x: Vec<&str> = args.model.x.iter().map(String::as_str).collect();
    let mut config = ReportConfig::new(&args.model.y, &x);
    config.weight = args.weight;
    config.mode = args.mode;
    config.model = model(&args.model);
    config
}

struct Inputs {
    data: Dataset,
    dist: DistanceMatrix,
    data_sha256: String,
    dist_sha256: String,
}

impl Inputs {
    fn read(args: &SpatialArgs) -> Result<Self, Failure> {
        let (data, data_sha256) = read_dataset(&args.model)?;
        let bytes = read_file(&args.dist)?;
        let dist = parse_distance_matrix(bytes.as_slice()).map_err(|e| in_file(&args.dist, e))?;
        Ok(Inputs {
            data,
            dist,
            data_sha256,
            dist_sha256: sha256_hex(&bytes),
        })
    }
}

fn read_dataset(args: &ModelArgs) -> Result<(Dataset, String), Failure> {
    let bytes = read_file(&args.data)?;
    let mut schema = vec![args.y.as_str()];
    schema.extend(args.x.iter().map(String::as_str));
    let data = parse_dataset(bytes.as_slice(), &schema).map_err(|e| in_file(&args.data, e))?;
    Ok((data, sha256_hex(&bytes)))
}

fn in_file(path: &Path, e: sdw_core::Error) -> Failure {
    let mut f = Failure::from(e);
    f.message = format!("{}: {}", path.display(), f.message);
    f
}

fn read_file(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|source| {
        sdw_core::Error::Io {
            path: path.to_owned(),
            source,
        }
        .into()
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| Failure::io(format!("cannot write {}: {e}", path.display())))
}

fn emit(text: &str) -> Result<(), Failure> {
    emit_bytes(text.as_bytes())
}

fn emit_bytes(bytes: &[u8]) -> Result<(), Failure> {
    let mut out = io::stdout().lock();
    out.write_all(bytes)
        .and_then(|()| out.flush())
        .map_err(|e| Failure::io(format!("cannot write to standard output: {e}")))
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
