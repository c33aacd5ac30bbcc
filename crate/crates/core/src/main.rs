use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fracgrad::config::{OutputFormat, RunConfig};
use fracgrad::io::{read_field_csv, write_od_csv, write_scalar_csv, FieldData};
use fracgrad::norms::{
    best_constant_shift, gagliardo_seminorm, holder_seminorm, lp_norm, lp_od_norm, wspq_norm, FracParams, NormKind,
    NormResult,
};
use fracgrad::operators::{frac_divergence, frac_gradient, frac_laplacian_integral, mollify_od, mollify_scalar};
use fracgrad::operators::{KernelShape, Mollifier};
use fracgrad::report::{norm_row, timestamp, write_atomic, write_report, NORM_HEADER, OUT_DIR_ENV};
use fracgrad::spectral::frac_laplacian_spectral;
use fracgrad::testlib::{sample_od, sample_scalar, OdFnSpec, ScalarFnSpec};
use fracgrad::verify::run_suite;
use fracgrad::{make_grid, FracError, OffDiagonalField, ScalarField};

#[derive(Parser)]
#[command(name = "fracgrad", version, about = "Discrete fractional gradients and their verification suites")]
struct Cli {
    /// Directory for output files.
    #[arg(long, global = true, env = OUT_DIR_ENV)]
    out_dir: Option<PathBuf>,
    /// Log progress to stderr (repeat for more).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// d_s u of a scalar field.
    Gradient {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        s: f64,
    },
    /// div_s G of a pair field.
    Divergence {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        s: f64,
    },
    /// (-Δ)^s u.
    Laplacian {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        s: f64,
        #[arg(long, value_enum, default_value = "integral")]
        method: LapMethod,
    },
    /// φ_ε ∗ f for a scalar or pair field.
    Mollify {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, value_enum, default_value = "gaussian")]
        kernel: Kernel,
    },
    /// Norm rows `kind,s,p,q,n,N,L,value`, one per `--params`.
    Norms {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value = "gagliardo")]
        kind: Kind,
        /// `s=..,p=..[,q=..]`; repeat for a batch.
        #[arg(long = "params", required = true)]
        params: Vec<String>,
    },
    /// Runs a verification suite (or `all`) and writes JSON reports.
    Verify {
        suite: String,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Replaces the timestamp in report file names.
        #[arg(long)]
        stamp: Option<String>,
    },
}

#[derive(Args)]
struct Input {
    /// Field CSV to read.
    #[arg(long, conflicts_with = "spec")]
    input: Option<PathBuf>,
    /// Inline test function, e.g. `gaussian(width=2)`.
    #[arg(long)]
    spec: Option<String>,
    #[arg(long, default_value_t = 1)]
    dim: usize,
    #[arg(long, default_value_t = 10.0)]
    half_width: f64,
    #[arg(long, default_value_t = 256)]
    points: usize,
    /// Output file (default: `<out-dir>/<command>_<stamp>.csv`).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum LapMethod {
    Integral,
    Composition,
    Spectral,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kernel {
    Gaussian,
    Bump,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Lp,
    LpOd,
    Gagliardo,
    Wspq,
    Holder,
    ShiftedLq,
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    msg: String,
}

impl From<FracError> for Failure {
    fn from(e: FracError) -> Self {
        let code = match e {
            FracError::Io(_) | FracError::NoConvergence(_) | FracError::Divergent(_) | FracError::NonFinite(_) => 1,
            _ => 2,
        };
        Failure { code, msg: e.to_string() }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: 2, msg: msg.into() }
}

type CmdResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    let out_dir = cli.out_dir.clone();
    let res = match cli.cmd {
        Cmd::Verify { suite, config, stamp } => cmd_verify(&suite, config.as_deref(), stamp, out_dir),
        other => cmd_op(other, out_dir),
    };
    match res {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn load_input(inp: &Input, od: bool) -> Result<FieldData, Failure> {
    match (&inp.input, &inp.spec) {
        (Some(path), _) => {
            let f = std::fs::File::open(path).map_err(|e| usage(format!("cannot open {}: {e}", path.display())))?;
            read_field_csv(BufReader::new(f)).map_err(|e| usage(format!("{}: {e}", path.display())))
        }
        (None, Some(spec)) => {
            let grid = make_grid(inp.dim, inp.half_width, inp.points)?;
            if od {
                let spec: OdFnSpec = spec.parse()?;
                Ok(FieldData::OffDiagonal(sample_od(&spec, &grid)?))
            } else {
                let spec: ScalarFnSpec = spec.parse()?;
                Ok(FieldData::Scalar(sample_scalar(&spec, &grid)?))
            }
        }
        (None, None) => Err(usage("one of --input or --spec is required")),
    }
}

fn scalar(d: FieldData) -> Result<ScalarField, Failure> {
    match d {
        FieldData::Scalar(u) => Ok(u),
        FieldData::OffDiagonal(_) => Err(usage("expected a scalar field")),
    }
}

fn pair(d: FieldData) -> Result<OffDiagonalField, Failure> {
    match d {
        FieldData::OffDiagonal(f) => Ok(f),
        FieldData::Scalar(_) => Err(usage("expected an off-diagonal field")),
    }
}

fn output_path(inp: &Input, out_dir: &Option<PathBuf>, name: &str) -> PathBuf {
    inp.output.clone().unwrap_or_else(|| {
        out_dir
            .clone()
            .unwrap_or_else(|| PathBuf::from("."))
            .join(format!("{name}_{}.csv", timestamp()))
    })
}

fn emit(field: &FieldData, path: &Path) -> Result<(), Failure> {
    let mut buf = Vec::new();
    match field {
        FieldData::Scalar(u) => write_scalar_csv(u, &mut buf)?,
        FieldData::OffDiagonal(f) => write_od_csv(f, &mut buf)?,
    }
    write_atomic(path, &buf)?;
    Ok(())
}

fn summary(field: &FieldData) -> Result<String, Failure> {
    Ok(match field {
        FieldData::Scalar(u) => format!(
            "scalar nodes={} min={:.16e} max={:.16e} l2={:.16e}",
            u.values().len(),
            u.min(),
            u.max(),
            lp_norm(u, 2.0)?
        ),
        FieldData::OffDiagonal(f) => {
            let m = f.grid().node_count();
            // every stored pair is read back through both orientations
            let ok = (0..m).all(|a| (a + 1..m).all(|b| f.get(a, b) == -f.get(b, a)));
            format!(
                "pairs={} max_abs={:.16e} l2_od={:.16e} antisymmetric={}",
                m * (m - 1),
                f.max_abs(),
                lp_od_norm(f, 2.0)?,
                ok
            )
        }
    })
}

fn cmd_op(cmd: Cmd, out_dir: Option<PathBuf>) -> CmdResult {
    let (name, inp, result) = match cmd {
        Cmd::Gradient { input, s } => {
            let u = scalar(load_input(&input, false)?)?;
            ("gradient", input, FieldData::OffDiagonal(frac_gradient(&u, s)?))
        }
        Cmd::Divergence { input, s } => {
            let g = pair(load_input(&input, true)?)?;
            ("divergence", input, FieldData::Scalar(frac_divergence(&g, s)?))
        }
        Cmd::Laplacian { input, s, method } => {
            let u = scalar(load_input(&input, false)?)?;
            let out = match method {
                LapMethod::Integral => frac_laplacian_integral(&u, s)?,
                LapMethod::Composition => frac_divergence(&frac_gradient(&u, s)?, s)?,
                LapMethod::Spectral => frac_laplacian_spectral(&u, s)?,
            };
            ("laplacian", input, FieldData::Scalar(out))
        }
        Cmd::Mollify { input, epsilon, kernel } => {
            let shape = match kernel {
                Kernel::Gaussian => KernelShape::Gaussian,
                Kernel::Bump => KernelShape::Bump,
            };
            let m = Mollifier::new(shape, epsilon)?;
            let data = match (&input.input, &input.spec) {
                (None, Some(spec)) if spec.parse::<ScalarFnSpec>().is_err() => load_input(&input, true)?,
                _ => load_input(&input, false)?,
            };
            let out = match data {
                FieldData::Scalar(u) => FieldData::Scalar(mollify_scalar(&u, &m)?),
                FieldData::OffDiagonal(f) => FieldData::OffDiagonal(mollify_od(&f, &m)?),
            };
            ("mollify", input, out)
        }
        Cmd::Norms { input, kind, params } => return cmd_norms(&input, kind, &params),
        Cmd::Verify { .. } => unreachable!("dispatched separately"),
    };
    let path = output_path(&inp, &out_dir, name);
    emit(&result, &path)?;
    println!("{} -> {}", summary(&result)?, path.display());
    Ok(0)
}

fn parse_params(text: &str, n: usize) -> Result<FracParams, Failure> {
    let (mut s, mut p, mut q) = (None, None, None);
    for part in text.split(',') {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| usage(format!("bad --params entry `{part}` (expected key=value)")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| usage(format!("bad number in --params `{part}`")))?;
        match k.trim() {
            "s" => s = Some(v),
            "p" => p = Some(v),
            "q" => q = Some(v),
            other => return Err(usage(format!("unknown --params key `{other}`"))),
        }
    }
    let s = s.unwrap_or(0.5);
    let p = p.unwrap_or(2.0);
    let q = q.unwrap_or_else(|| {
        let inv = 1.0 / p - s / n as f64;
        if inv > 0.0 {
            1.0 / inv
        } else {
            p
        }
    });
    Ok(FracParams { s, p, q, n })
}

fn cmd_norms(inp: &Input, kind: Kind, params: &[String]) -> CmdResult {
    let data = load_input(inp, matches!(kind, Kind::LpOd))?;
    let grid = data.grid().clone();
    let mut out = String::from(NORM_HEADER);
    out.push('\n');
    for text in params {
        let fp = parse_params(text, grid.dim())?;
        let (value, nk) = match kind {
            Kind::LpOd => (lp_od_norm(&pair(data.clone())?, fp.p)?, NormKind::LpOd),
            k => {
                let u = scalar(data.clone())?;
                match k {
                    Kind::Lp => (lp_norm(&u, fp.p)?, NormKind::Lp),
                    Kind::Gagliardo => (gagliardo_seminorm(&u, fp.s, fp.p)?, NormKind::Gagliardo),
                    Kind::Wspq => (wspq_norm(&u, fp.s, fp.p, fp.q)?, NormKind::Wspq),
                    Kind::Holder => {
                        let hp = FracParams::holder(fp.n, fp.s, fp.p)?;
                        (holder_seminorm(&u, hp.alpha())?, NormKind::Holder)
                    }
                    Kind::ShiftedLq => (best_constant_shift(&u, fp.q)?.1, NormKind::ShiftedLq),
                    Kind::LpOd => unreachable!(),
                }
            }
        };
        let row = NormResult { value, kind: nk, params: fp };
        out.push_str(&norm_row(&row, grid.points_per_axis(), grid.half_width()));
        out.push('\n');
    }
    print!("{out}");
    if let Some(path) = &inp.output {
        write_atomic(path, out.as_bytes())?;
    }
    Ok(0)
}

fn cmd_verify(selector: &str, config: Option<&Path>, stamp: Option<String>, out_dir: Option<PathBuf>) -> CmdResult {
    let cfg = match config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let ids = cfg.select(selector)?;
    let ctx = cfg.context();
    let dir = out_dir.or_else(|| cfg.out_dir.clone()).unwrap_or_else(|| PathBuf::from("reports"));
    let stamp = stamp.unwrap_or_else(timestamp);
    let csv = cfg.formats.contains(&OutputFormat::Csv);
    let json = cfg.formats.contains(&OutputFormat::Json) || !csv;
    let mut failed = false;
    for id in ids {
        log::info!("running suite {id}");
        let rep = run_suite(id, &cfg.suites, &ctx)?;
        let files = if json {
            write_report(&rep, &dir, &stamp, csv)?
        } else {
            let path = dir.join(format!("{}_{stamp}.csv", rep.suite));
            write_atomic(&path, fracgrad::report::report_csv(&rep).as_bytes())?;
            vec![path]
        };
        let fails: Vec<&str> = rep
            .checks
            .iter()
            .filter(|c| c.verdict.is_fail())
            .map(|c| c.name.as_str())
            .chain(rep.cases.iter().filter(|c| c.verdict.is_fail()).map(|c| c.label.as_str()))
            .collect();
        println!(
            "{id}: {} ({} cases, {} checks) -> {}",
            if rep.passed() { "PASS" } else { "FAIL" },
            rep.cases.len(),
            rep.checks.len(),
            files[0].display()
        );
        for f in fails.iter().take(10) {
            println!("  failed: {f}");
        }
        failed |= !rep.passed();
    }
    Ok(if failed { 1 } else { 0 })
}
