use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use springer_lab::combinatorics::{springer_table, SpringerRow};
use springer_lab::gf2k::Field;
use springer_lab::orbit::render::{orbit_dim_for_label, render, shipped_table};
use springer_lab::orbit::{
    conjugators, fit_minimal_degree, fit_point_polynomial, orbit_partition,
    sp_nilpotent_fingerprint, sp_nilpotents, springer_fiber_count, stratum_fiber_census,
    stratum_label, FiberVariant, FitReport, PointCountSeries,
};
use springer_lab::suite::{run_suite, SuiteName, SuiteOptions};
use springer_lab::theta::{sp_generators, FormContext};
use springer_lab::{with_field, FiniteField, Limits, Mat, Partition, Subspace};
use thiserror::Error;

const EXIT_USAGE: u8 = 64;
const EXIT_BAD_INPUT: u8 = 65;

#[derive(Parser, Debug)]
#[command(
    name = "springer-lab",
    version,
    about = "Exact checks of nilpotent orbits and Springer fibers over GF(2^k)"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalOpts {
    /// Seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for the parallel engines.
    #[arg(long, global = true, env = "SPRINGER_LAB_JOBS")]
    jobs: Option<usize>,
    /// Lift the group-order and flag-count ceilings (10^7 each).
    #[arg(long, global = true)]
    unsafe_limits: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a named verification suite and print its report as JSON.
    Suite {
        /// identities, orbit-counts, infinite-family, fibers, combinatorics or all.
        name: String,
        /// Wall-clock budget in seconds; checks not started in time are skipped.
        #[arg(long)]
        budget: Option<u64>,
        /// Drop runtime_ms so repeated runs print identical bytes.
        #[arg(long)]
        omit_timings: bool,
    },
    /// Emit a data table.
    Table {
        #[command(subcommand)]
        which: TableCmd,
    },
    /// Enumerate nilpotent orbits of Sp_2n(F_q) on sp_2n(F_q).
    Orbits {
        #[arg(long, value_enum, default_value_t = GroupArg::Sp)]
        group: GroupArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        q: u64,
        /// Second field size; dim_estimate then uses the growth of each
        /// orbit's size from q to this field.
        #[arg(long)]
        growth_q: Option<u64>,
    },
    /// Label a point (x, v) with a Lagrangian M; reads JSON from a file or stdin.
    Classify {
        /// Input file; `-` or absent reads stdin.
        input: Option<PathBuf>,
    },
    /// Count Springer-fiber points over several fields and fit a polynomial.
    Fiber(FiberArgs),
}

#[derive(Subcommand, Debug)]
enum TableCmd {
    /// Springer correspondence rows for W_{n,3}.
    Springer {
        #[arg(short = 'n', long = "n")]
        n: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// The shipped fingerprint → bipartition rendering table.
    Rendering,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GroupArg {
    Sp,
}

#[derive(Args, Debug)]
struct FiberArgs {
    /// Point input as JSON {"context": {"N": ..}, "x": .., "v": .., "m1": ..};
    /// entries must lie in GF(2) so the point exists over every field.
    #[arg(long, conflicts_with = "stratum", required_unless_present = "stratum")]
    input: Option<PathBuf>,
    /// Stratum label as JSON, e.g. '[[1,1],[],[]]'; counts are the generic
    /// values over the stratum slice of sp_4.
    #[arg(long)]
    stratum: Option<String>,
    #[arg(long, value_enum, default_value_t = VariantArg::Full)]
    variant: VariantArg,
    /// Field sizes, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = vec![2u64, 4, 8])]
    q: Vec<u64>,
    /// Fit this degree instead of the least consistent one.
    #[arg(long)]
    degree: Option<usize>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum VariantArg {
    Full,
    Restricted,
    SemisimpleB,
}

impl From<VariantArg> for FiberVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Full => FiberVariant::Full,
            VariantArg::Restricted => FiberVariant::Restricted,
            VariantArg::SemisimpleB => FiberVariant::SemisimpleB,
        }
    }
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    BadInput(String),
    #[error("{0}")]
    Io(#[from] io::Error),
}

impl CliError {
    fn code(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::BadInput(_) => "bad_input",
            CliError::Io(_) => "io",
        }
    }

    fn exit(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::BadInput(_) | CliError::Io(_) => EXIT_BAD_INPUT,
        }
    }
}

fn bad(e: impl std::fmt::Display) -> CliError {
    CliError::BadInput(e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let obj = json!({"error": {"code": e.code(), "message": e.to_string()}});
            eprintln!("{obj}");
            ExitCode::from(e.exit())
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    if let Some(jobs) = cli.global.jobs {
        if jobs == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let limits = Limits {
        unsafe_limits: cli.global.unsafe_limits,
        ..Limits::default()
    };
    match cli.command {
        Command::Suite {
            name,
            budget,
            omit_timings,
        } => {
            let name: SuiteName = name.parse().map_err(|e| CliError::Usage(format!("{e}")))?;
            let options = SuiteOptions {
                seed: cli.global.seed,
                budget: budget.map(Duration::from_secs),
                limits,
            };
            let report = run_suite(name, &options);
            let mut value = serde_json::to_value(&report).expect("report serializes");
            if omit_timings {
                for check in value["checks"].as_array_mut().into_iter().flatten() {
                    check.as_object_mut().map(|o| o.remove("runtime_ms"));
                }
            }
            print_json(&value)?;
            Ok(report.exit_code() as u8)
        }
        Command::Table { which } => {
            match which {
                TableCmd::Springer { n, format } => table_springer(n, format)?,
                TableCmd::Rendering => {
                    let mut out = io::stdout().lock();
                    writeln!(out, "{}", shipped_table().to_json())?;
                }
            }
            Ok(0)
        }
        Command::Orbits {
            group: GroupArg::Sp,
            n,
            q,
            growth_q,
        } => {
            let records = orbit_records(n, q, growth_q, &limits)?;
            print_json(&json!(records))?;
            Ok(0)
        }
        Command::Classify { input } => {
            let text = read_input(input.as_ref())?;
            let label = classify(&text)?;
            print_json(&label)?;
            Ok(0)
        }
        Command::Fiber(args) => {
            let value = fiber(&args, &limits)?;
            print_json(&value)?;
            Ok(0)
        }
    }
}

fn print_json(value: &impl Serialize) -> Result<(), CliError> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value).map_err(io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

fn read_input(path: Option<&PathBuf>) -> Result<String, CliError> {
    match path {
        Some(p) if p.as_os_str() != "-" => fs::read_to_string(p).map_err(CliError::from),
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn field_degree(q: u64) -> Result<u32, CliError> {
    Field::with_order(q)
        .map(|f| f.k())
        .map_err(|_| CliError::Usage(format!("q = {q} is not 2^k with 1 ≤ k ≤ 16")))
}

#[derive(Serialize)]
struct CsvRow {
    lambda1: String,
    lambda2: String,
    lambda3: String,
    m1: usize,
    m2: usize,
    m3: usize,
    k: usize,
    dim_rho_hat: u128,
    #[serde(rename = "dim_X")]
    dim_x: String,
    d_lambda: String,
}

fn or_null(v: Option<usize>) -> String {
    v.map_or_else(|| "null".to_string(), |d| d.to_string())
}

fn table_springer(n: usize, format: Format) -> Result<(), CliError> {
    let oracle = |a: &Partition, b: &Partition| orbit_dim_for_label(a, b);
    let rows: Vec<SpringerRow> = springer_table(n, Some(&oracle)).map_err(bad)?;
    let mut out = io::stdout().lock();
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &rows).map_err(io::Error::from)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in &rows {
                w.serialize(CsvRow {
                    lambda1: r.lambda.components[0].to_string(),
                    lambda2: r.lambda.components[1].to_string(),
                    lambda3: r.lambda.components[2].to_string(),
                    m1: r.m.m1,
                    m2: r.m.m2,
                    m3: r.m.m3,
                    k: r.k,
                    dim_rho_hat: r.dim_rho_hat,
                    dim_x: or_null(r.dim_x),
                    d_lambda: or_null(r.d_lambda),
                })
                .map_err(|e| io::Error::other(e.to_string()))?;
            }
            w.flush()?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct OrbitRecord {
    fingerprint: String,
    /// (α, β) from the rendering table, when present.
    label: Option<(String, String)>,
    size: usize,
    dim_estimate: f64,
    /// Exact dimension recorded in the rendering table.
    orbit_dim: Option<usize>,
}

/// Orbit sizes keyed by fingerprint, with the rendered label.
type OrbitSizes = BTreeMap<String, (usize, Option<(Partition, Partition)>)>;

fn orbit_sizes(n: usize, q: u64, limits: &Limits) -> Result<OrbitSizes, CliError> {
    fn go<F: FiniteField>(n: usize, limits: &Limits) -> Result<OrbitSizes, CliError> {
        let limit = if limits.unsafe_limits {
            u128::MAX
        } else {
            limits.max_group_order
        };
        let nil = sp_nilpotents::<F>(n, limit).map_err(bad)?;
        let gens = conjugators(&sp_generators::<F>(n));
        let orbits = orbit_partition(&nil, &gens, |c, x| c.conjugate(x)).map_err(bad)?;
        let ctx = FormContext::symplectic(n);
        let mut out = BTreeMap::new();
        for orbit in orbits {
            let fp = sp_nilpotent_fingerprint(&nil[orbit[0]], &ctx).map_err(bad)?;
            let key = fp.key();
            if out
                .insert(key.clone(), (orbit.len(), render(&fp)))
                .is_some()
            {
                return Err(bad(format!("fingerprint {key} labels two orbits")));
            }
        }
        Ok(out)
    }
    if n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let k = field_degree(q)?;
    with_field!(k, F => go::<F>(n, limits), _ => unreachable!("degree checked"))
}

fn orbit_records(
    n: usize,
    q: u64,
    growth_q: Option<u64>,
    limits: &Limits,
) -> Result<Vec<OrbitRecord>, CliError> {
    let base = orbit_sizes(n, q, limits)?;
    let grown = match growth_q {
        Some(q2) if q2 == q => {
            return Err(CliError::Usage("--growth-q must differ from --q".into()))
        }
        Some(q2) => Some((q2, orbit_sizes(n, q2, limits)?)),
        None => None,
    };
    let mut records = Vec::new();
    for (key, (size, label)) in base {
        let dim_estimate = match &grown {
            Some((q2, sizes)) => {
                let other = sizes
                    .get(&key)
                    .ok_or_else(|| bad(format!("orbit {key} is missing over F_{q2}")))?
                    .0;
                ((other as f64).ln() - (size as f64).ln()) / ((*q2 as f64).ln() - (q as f64).ln())
            }
            None => (size as f64).ln() / (q as f64).ln(),
        };
        records.push(OrbitRecord {
            fingerprint: key,
            orbit_dim: label.as_ref().and_then(|(a, b)| orbit_dim_for_label(a, b)),
            label: label.map(|(a, b)| (a.to_string(), b.to_string())),
            size,
            dim_estimate: (dim_estimate * 1000.0).round() / 1000.0,
        });
    }
    Ok(records)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ContextInput {
    #[serde(rename = "N")]
    dim: usize,
    #[serde(default = "default_field")]
    field: String,
}

fn default_field() -> String {
    "gf2^1".to_string()
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassifyInput {
    context: ContextInput,
    x: Vec<Vec<u32>>,
    v: Vec<u32>,
    #[serde(rename = "M")]
    m: Vec<Vec<u32>>,
}

fn to_elems<F: FiniteField>(row: &[u32]) -> Result<Vec<F>, CliError> {
    row.iter()
        .map(|&b| {
            if u64::from(b) < F::ORDER as u64 {
                Ok(F::from_bits(b))
            } else {
                Err(bad(format!(
                    "entry {b} is not an element of GF({})",
                    F::ORDER
                )))
            }
        })
        .collect()
}

fn to_matrix<F: FiniteField>(
    rows: &[Vec<u32>],
    cols: usize,
    what: &str,
) -> Result<Mat<F>, CliError> {
    if rows.iter().any(|r| r.len() != cols) {
        return Err(bad(format!("{what} rows must have length {cols}")));
    }
    let rows = rows
        .iter()
        .map(|r| to_elems::<F>(r))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Mat::from_rows(&rows, cols))
}

fn context_of(input: &ContextInput) -> Result<(FormContext, u32), CliError> {
    if input.dim == 0 || input.dim % 2 == 1 {
        return Err(bad(format!(
            "context N = {} must be even and positive",
            input.dim
        )));
    }
    let field = Field::parse(&input.field).map_err(bad)?;
    Ok((FormContext::new(input.dim), field.k()))
}

fn classify(text: &str) -> Result<Value, CliError> {
    fn go<F: FiniteField>(input: &ClassifyInput, ctx: &FormContext) -> Result<Value, CliError> {
        let dim = ctx.dim();
        if input.x.len() != dim {
            return Err(bad(format!("x must be {dim}×{dim}")));
        }
        let x = to_matrix::<F>(&input.x, dim, "x")?;
        let v = to_elems::<F>(&input.v)?;
        if v.len() != dim {
            return Err(bad(format!("v must have length {dim}")));
        }
        let basis = input
            .m
            .iter()
            .map(|r| {
                if r.len() == dim {
                    to_elems::<F>(r)
                } else {
                    Err(bad(format!("M rows must have length {dim}")))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        let m = Subspace::span(dim, &basis);
        let label = stratum_label(&x, &v, &m, ctx).map_err(bad)?;
        Ok(serde_json::to_value(label).expect("label serializes"))
    }
    let input: ClassifyInput = serde_json::from_str(text).map_err(bad)?;
    let (ctx, k) = context_of(&input.context)?;
    with_field!(k, F => go::<F>(&input, &ctx), _ => unreachable!("degree checked"))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FiberInput {
    context: ContextInput,
    x: Vec<Vec<u32>>,
    v: Vec<u32>,
    #[serde(default)]
    m1: usize,
}

fn fiber(args: &FiberArgs, limits: &Limits) -> Result<Value, CliError> {
    if args.q.is_empty() {
        return Err(CliError::Usage("--q needs at least one field size".into()));
    }
    let variant = FiberVariant::from(args.variant);
    let mut points = Vec::new();
    let mut source = json!(null);
    if let Some(label) = &args.stratum {
        let lambda: [Partition; 3] = serde_json::from_str(label).map_err(bad)?;
        let ctx = FormContext::symplectic(2);
        let mut special = BTreeMap::new();
        for &q in &args.q {
            let k = field_degree(q)?;
            let census = with_field!(k, F => stratum_fiber_census::<F>(&lambda, &ctx, variant, limits), _ => unreachable!("degree checked"))
                .map_err(bad)?;
            let generic = census
                .generic_count()
                .ok_or_else(|| bad("no point of the stratum's open part was found"))?;
            let others: Vec<u128> = census
                .histogram
                .keys()
                .copied()
                .filter(|&c| c != generic)
                .collect();
            if !others.is_empty() {
                special.insert(q, others);
            }
            points.push((q, generic));
        }
        source = json!({"stratum": lambda, "special_counts": special});
    } else {
        let path = args.input.as_ref().expect("clap enforces one source");
        let text = read_input(Some(path))?;
        let input: FiberInput = serde_json::from_str(&text).map_err(bad)?;
        let (ctx, _) = context_of(&input.context)?;
        for &q in &args.q {
            let k = field_degree(q)?;
            let count = with_field!(k, F => {
                let dim = ctx.dim();
                if input.x.len() != dim {
                    return Err(bad(format!("x must be {dim}×{dim}")));
                }
                if input.x.iter().flatten().chain(&input.v).any(|&b| b > 1) {
                    return Err(bad("fiber inputs must have entries 0 or 1"));
                }
                let x = to_matrix::<F>(&input.x, dim, "x")?;
                let v = to_elems::<F>(&input.v)?;
                springer_fiber_count(&x, &v, input.m1, &ctx, variant, limits).map_err(bad)?
            }, _ => unreachable!("degree checked"));
            points.push((q, count));
        }
    }
    let series = PointCountSeries::new(points);
    let fit = match args.degree {
        Some(d) => Some(fit_point_polynomial(&series, d).map_err(bad)?),
        None => fit_minimal_degree(&series),
    };
    Ok(json!({
        "source": source,
        "variant": variant,
        "series": series,
        "fit": fit.as_ref().map(fit_json),
    }))
}

fn fit_json(f: &FitReport) -> Value {
    json!({
        "polynomial": f.describe(),
        "coefficients": f.coefficients.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "degree": f.degree(),
        "leading": f.leading().to_string(),
        "checked_points": f.checked,
        "consistent": f.is_consistent(),
    })
}
