//! Command-line driver for the assembled-form library: period lattices,
//! Eichler vectors, values of `F(τ, M)`, shadow and invariance checks, pole
//! scans, and `q`-expansions, each emitted as a versioned JSON record
//! (`"schema": 1`) on stdout or to `--out`.
//!
//! Exit codes are the control-flow contract: `0` — success, with every
//! deviation below its tolerance; `1` — a pole at the evaluation point;
//! `2` — tolerance, validation, or lattice-recovery failure.
//!
//! Precision defaults may be overridden by environment when the flags are
//! absent: `JWF_DIGITS` for the working digits, `JWF_TAIL_TOL` for the
//! series tail tolerance.  Identical configuration produces byte-identical
//! JSON.

mod fixtures;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use jwf_core::periods::{eichler_vector, period_lattice_for_form};
use jwf_core::report;
use jwf_core::{
    BigComplex, CuspForm, Error, GroupDescriptor, MockFormContext, PeriodLattice,
    PrecisionContext, SL2Z,
};
use rug::{Float, Integer};

const DEFAULT_DIGITS: u32 = 40;
const DEFAULT_GUARD: u32 = 15;

#[derive(Parser)]
#[command(
    name = "jwf",
    version,
    about = "Assembled polar harmonic forms from cusp forms: periods, values, checks",
    arg_required_else_help = true
)]
struct Cli {
    /// Run the golden fixture suite and print a pass/fail table.
    #[arg(long)]
    fixtures: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args)]
struct Common {
    /// Built-in form name (delta, eta3p8, x011) or path to a JSON
    /// coefficient file {"name", "weight", "level", "coefficients": [[n, "a_n"], …]}.
    #[arg(long)]
    form: String,
    /// Working precision in decimal digits (≥ 15).  Default 40, or
    /// `JWF_DIGITS` when set.
    #[arg(long)]
    digits: Option<u32>,
    /// Series tail tolerance, e.g. 1e-60.  Default 10^-(digits+guard), or
    /// `JWF_TAIL_TOL` when set.
    #[arg(long)]
    tail_tol: Option<String>,
    /// Number of form coefficients to make available to the series.
    #[arg(long, default_value_t = 2000)]
    nmax: usize,
    /// Recover the Fricke-extended period span instead of the group-only one.
    #[arg(long)]
    fricke: bool,
    /// Bypass lattice recovery: explicit generators as "re1,im1,re2,im2"
    /// decimal strings.
    #[arg(long)]
    lattice: Option<String>,
    /// Write the JSON record to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Convention {
    /// Composition with w = Σ (a_n/n) qⁿ and prefactor −2πi.
    Analytic,
    /// Literal substitution of Σ a_n qⁿ with prefactor π, for readable tables.
    Display,
}

#[derive(Subcommand)]
enum Command {
    /// Recover the period lattice of a form and report its generators.
    Periods {
        #[command(flatten)]
        common: Common,
    },
    /// Eichler integral vector E(τ) in a frame.
    Eichler {
        #[command(flatten)]
        common: Common,
        /// Evaluation point "re,im" in the upper half-plane.
        #[arg(long)]
        tau: String,
        /// Frame matrix "a,b,c,d" with det 1 (default identity).
        #[arg(long, default_value = "1,0,0,1")]
        matrix: String,
    },
    /// Value of the assembled form F(τ, M).
    Evaluate {
        #[command(flatten)]
        common: Common,
        /// Evaluation point "re,im" in the upper half-plane.
        #[arg(long)]
        tau: String,
        /// Frame matrix "a,b,c,d" with det 1 (default identity).
        #[arg(long, default_value = "1,0,0,1")]
        matrix: String,
    },
    /// Finite-difference shadow check against the expected holomorphic target.
    Shadow {
        #[command(flatten)]
        common: Common,
        /// Evaluation point "re,im" in the upper half-plane.
        #[arg(long)]
        tau: String,
        /// Frame matrix "a,b,c,d" (default identity).
        #[arg(long, default_value = "1,0,0,1")]
        matrix: String,
        /// Stencil step (default 10^-(digits/6)).
        #[arg(long)]
        h: Option<String>,
        /// Acceptance tolerance on the scale-relative deviation.  The default
        /// leaves headroom for points whose zeta argument sits near a lattice
        /// point, where the O(h²) truncation constant is inflated.
        #[arg(long, default_value = "1e-4")]
        tol: String,
    },
    /// Frame-change invariance deviation |F(γτ, M) − N(γ) F(τ, γ⁻¹M)|.
    Invariance {
        #[command(flatten)]
        common: Common,
        /// Evaluation point "re,im" in the upper half-plane.
        #[arg(long)]
        tau: String,
        /// Group element "a,b,c,d" with det 1.
        #[arg(long)]
        gamma: String,
        /// Frame matrix "a,b,c,d" (default identity).
        #[arg(long, default_value = "1,0,0,1")]
        matrix: String,
        /// Acceptance tolerance (default 10^-(digits − 2·guard)).
        #[arg(long)]
        tol: Option<String>,
    },
    /// Scan a rectangle for component poles across a set of frames.
    Polescan {
        #[command(flatten)]
        common: Common,
        /// Rectangle "re_min,im_min,re_max,im_max" in the upper half-plane.
        #[arg(long)]
        region: String,
        /// Grid resolution per axis.
        #[arg(long, default_value_t = 16)]
        grid: usize,
        /// Semicolon-separated frame matrices "a,b,c,d;e,f,g,h" (default identity).
        #[arg(long, default_value = "1,0,0,1")]
        frames: String,
        /// Hit threshold on the reduced-coordinate distance to the lattice.
        #[arg(long, default_value = "1e-3")]
        eps: String,
    },
    /// q-expansion of the holomorphic part of component 0.
    Qexp {
        #[command(flatten)]
        common: Common,
        /// Component index (only 0 has a proper q-expansion).
        #[arg(long, default_value_t = 0)]
        component: usize,
        /// Highest power of q to report.
        #[arg(long, default_value_t = 10)]
        terms: usize,
        /// Series convention.
        #[arg(long, value_enum, default_value_t = Convention::Analytic)]
        convention: Convention,
    },
    /// Run the golden fixture suite and print a pass/fail table.
    Fixtures,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.fixtures {
        return fixtures::run();
    }
    let Some(command) = cli.command else {
        eprintln!("error: no command given (try --help)");
        return ExitCode::from(2);
    };
    if let Command::Fixtures = command {
        return fixtures::run();
    }
    match run(command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(failure_code(&err))
        }
    }
}

/// Maps library errors to the exit-code contract: a pole at the evaluation
/// point is `1`, everything else (validation, precision, recovery) is `2`.
fn failure_code(err: &Error) -> u8 {
    match err {
        Error::PoleHit { .. } => 1,
        _ => 2,
    }
}

fn run(command: Command) -> Result<u8, Error> {
    match command {
        Command::Periods { common } => cmd_periods(&common),
        Command::Eichler { common, tau, matrix } => cmd_eichler(&common, &tau, &matrix),
        Command::Evaluate { common, tau, matrix } => cmd_evaluate(&common, &tau, &matrix),
        Command::Shadow {
            common,
            tau,
            matrix,
            h,
            tol,
        } => cmd_shadow(&common, &tau, &matrix, h.as_deref(), &tol),
        Command::Invariance {
            common,
            tau,
            gamma,
            matrix,
            tol,
        } => cmd_invariance(&common, &tau, &gamma, &matrix, tol.as_deref()),
        Command::Polescan {
            common,
            region,
            grid,
            frames,
            eps,
        } => cmd_polescan(&common, &region, grid, &frames, &eps),
        Command::Qexp {
            common,
            component,
            terms,
            convention,
        } => cmd_qexp(&common, component, terms, convention),
        Command::Fixtures => unreachable!("handled in main"),
    }
}

fn build_ctx(common: &Common) -> Result<PrecisionContext, Error> {
    let digits = match common.digits {
        Some(d) => d,
        None => match std::env::var("JWF_DIGITS") {
            Ok(s) => s
                .parse()
                .map_err(|_| Error::InvalidInput(format!("JWF_DIGITS is not an integer: {s}")))?,
            Err(_) => DEFAULT_DIGITS,
        },
    };
    let tail = common
        .tail_tol
        .clone()
        .or_else(|| std::env::var("JWF_TAIL_TOL").ok());
    match tail {
        Some(t) => PrecisionContext::with_tail_tol(digits, DEFAULT_GUARD, &t),
        None => PrecisionContext::new(digits),
    }
}

/// JSON layout of a coefficient file for non-built-in forms.
#[derive(serde::Deserialize)]
struct FormFile {
    name: String,
    weight: u32,
    #[serde(default = "default_level")]
    level: i64,
    /// Pairs [n, "a_n"], 1-based, integers as decimal strings.
    coefficients: Vec<(u64, String)>,
}

fn default_level() -> i64 {
    1
}

fn load_form(spec: &str, n_max: usize) -> Result<CuspForm, Error> {
    if matches!(spec, "delta" | "eta3p8" | "x011") {
        return CuspForm::by_name(spec, n_max);
    }
    let text = fs::read_to_string(spec)
        .map_err(|e| Error::InvalidInput(format!("cannot read form file {spec}: {e}")))?;
    let file: FormFile = serde_json::from_str(&text)
        .map_err(|e| Error::InvalidInput(format!("malformed form file {spec}: {e}")))?;
    let mut pairs = Vec::with_capacity(file.coefficients.len());
    for (n, a) in &file.coefficients {
        let a: Integer = a
            .parse()
            .map_err(|_| Error::InvalidInput(format!("coefficient a_{n} is not an integer: {a}")))?;
        pairs.push((*n, a));
    }
    let group = if file.level == 1 {
        GroupDescriptor::Full
    } else {
        GroupDescriptor::Gamma0(file.level)
    };
    CuspForm::import_pairs(&file.name, file.weight, group, &pairs)
}

fn parse_complex(ctx: &PrecisionContext, s: &str, what: &str) -> Result<BigComplex, Error> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 2 {
        return Err(Error::InvalidInput(format!(
            "{what} must be \"re,im\", got {s}"
        )));
    }
    ctx.complex(parts[0], parts[1])
}

fn parse_matrix(s: &str, what: &str) -> Result<SL2Z, Error> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(Error::InvalidInput(format!(
            "{what} must be \"a,b,c,d\", got {s}"
        )));
    }
    let mut e = [0i64; 4];
    for (slot, p) in e.iter_mut().zip(&parts) {
        *slot = p
            .parse()
            .map_err(|_| Error::InvalidInput(format!("{what} entry is not an integer: {p}")))?;
    }
    SL2Z::new(e[0], e[1], e[2], e[3])
}

fn parse_frames(s: &str) -> Result<Vec<SL2Z>, Error> {
    s.split(';')
        .map(|m| parse_matrix(m, "frame"))
        .collect::<Result<Vec<_>, _>>()
}

/// Assembled-form context: explicit `--lattice` generators when given,
/// otherwise a fresh recovery from the form's periods.
fn build_mock(common: &Common, ctx: &PrecisionContext) -> Result<MockFormContext, Error> {
    let form = load_form(&common.form, common.nmax)?;
    match &common.lattice {
        Some(s) => {
            let parts: Vec<&str> = s.split(',').map(str::trim).collect();
            if parts.len() != 4 {
                return Err(Error::InvalidInput(format!(
                    "lattice must be \"re1,im1,re2,im2\", got {s}"
                )));
            }
            let w1 = ctx.complex(parts[0], parts[1])?;
            let w2 = ctx.complex(parts[2], parts[3])?;
            let lat = PeriodLattice::from_basis(w1, w2, ctx)?;
            MockFormContext::with_lattice(form, lat, ctx)
        }
        None => MockFormContext::new(form, common.fricke, ctx),
    }
}

fn emit(out: &Option<PathBuf>, json: &str) -> Result<(), Error> {
    match out {
        Some(path) => fs::write(path, json)
            .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{json}");
            Ok(())
        }
    }
}

fn cmd_periods(common: &Common) -> Result<u8, Error> {
    let ctx = build_ctx(common)?;
    let lat = match &common.lattice {
        Some(s) => {
            let parts: Vec<&str> = s.split(',').map(str::trim).collect();
            if parts.len() != 4 {
                return Err(Error::InvalidInput(format!(
                    "lattice must be \"re1,im1,re2,im2\", got {s}"
                )));
            }
            PeriodLattice::from_basis(ctx.complex(parts[0], parts[1])?, ctx.complex(parts[2], parts[3])?, &ctx)?
        }
        None => {
            let form = load_form(&common.form, common.nmax)?;
            period_lattice_for_form(&form, common.fricke, &ctx)?
        }
    };
    let record = report::periods_record(&common.form, &lat, &ctx);
    emit(&common.out, &report::render(&record))?;
    let bound = ctx.pow10_real(-((ctx.digits() / 2) as i32));
    Ok(if *lat.residual() <= bound { 0 } else { 2 })
}

fn cmd_eichler(common: &Common, tau: &str, matrix: &str) -> Result<u8, Error> {
    let ctx = build_ctx(common)?;
    let form = load_form(&common.form, common.nmax)?;
    let tau = parse_complex(&ctx, tau, "tau")?;
    let frame = parse_matrix(matrix, "matrix")?;
    let value = eichler_vector(&form, &tau, &frame, &ctx)?;
    let record = report::eichler_record(&common.form, &value, &tau, &frame, &ctx);
    emit(&common.out, &report::render(&record))?;
    Ok(0)
}

fn cmd_evaluate(common: &Common, tau: &str, matrix: &str) -> Result<u8, Error> {
    let ctx = build_ctx(common)?;
    let mock = build_mock(common, &ctx)?;
    let tau = parse_complex(&ctx, tau, "tau")?;
    let frame = parse_matrix(matrix, "matrix")?;
    let fv = mock.f_value(&tau, &frame)?;
    let pole = fv.pole_flag;
    let record = report::value_record(&common.form, &fv, &ctx);
    emit(&common.out, &report::render(&record))?;
    Ok(if pole { 1 } else { 0 })
}

fn cmd_shadow(
    common: &Common,
    tau: &str,
    matrix: &str,
    h: Option<&str>,
    tol: &str,
) -> Result<u8, Error> {
    let ctx = build_ctx(common)?;
    let mock = build_mock(common, &ctx)?;
    let tau = parse_complex(&ctx, tau, "tau")?;
    let frame = parse_matrix(matrix, "matrix")?;
    let step: Float = match h {
        Some(s) => ctx.real(s)?,
        None => mock.default_stencil_step(),
    };
    let tol = ctx.real(tol)?;
    let check = mock.shadow_check(&tau, &frame, Some(&step))?;
    let below = check.deviation < tol;
    let record = report::shadow_record(&common.form, &check, &tau, &frame, &step, &ctx);
    emit(&common.out, &report::render(&record))?;
    Ok(if below { 0 } else { 2 })
}

fn cmd_invariance(
    common: &Common,
    tau: &str,
    gamma: &str,
    matrix: &str,
    tol: Option<&str>,
) -> Result<u8, Error> {
    let ctx = build_ctx(common)?;
    let mock = build_mock(common, &ctx)?;
    let tau = parse_complex(&ctx, tau, "tau")?;
    let gamma = parse_matrix(gamma, "gamma")?;
    let frame = parse_matrix(matrix, "matrix")?;
    let tol: Float = match tol {
        Some(s) => ctx.real(s)?,
        None => {
            // 10^-(digits − 2·guard), capped below 1 so the default is never
            // vacuous at small digit counts.
            let e = (ctx.digits() as i32 - 2 * ctx.guard() as i32).min(1);
            ctx.pow10_real(-e)
        }
    };
    let dev = mock.rho_invariance_check(&gamma, &tau, &frame)?;
    let below = dev < tol;
    let record = report::invariance_record(&common.form, &tau, &gamma, &frame, &dev, &ctx);
    emit(&common.out, &report::render(&record))?;
    Ok(if below { 0 } else { 2 })
}

fn cmd_polescan(
    common: &Common,
    region: &str,
    grid: usize,
    frames: &str,
    eps: &str,
) -> Result<u8, Error> {
    let ctx = build_ctx(common)?;
    let mock = build_mock(common, &ctx)?;
    let parts: Vec<&str> = region.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(Error::InvalidInput(format!(
            "region must be \"re_min,im_min,re_max,im_max\", got {region}"
        )));
    }
    let lower_left = ctx.complex(parts[0], parts[1])?;
    let upper_right = ctx.complex(parts[2], parts[3])?;
    let frames = parse_frames(frames)?;
    let eps = ctx.real(eps)?;
    let hits = mock.pole_scan(&lower_left, &upper_right, grid, &frames, &eps)?;
    let record = report::pole_scan_record(
        &common.form,
        &lower_left,
        &upper_right,
        grid as u32,
        &eps,
        &frames,
        &hits,
        &ctx,
    );
    emit(&common.out, &report::render(&record))?;
    Ok(0)
}

fn cmd_qexp(
    common: &Common,
    component: usize,
    terms: usize,
    convention: Convention,
) -> Result<u8, Error> {
    let ctx = build_ctx(common)?;
    let mock = build_mock(common, &ctx)?;
    let (expansion, name) = match convention {
        Convention::Analytic => (mock.holomorphic_part_q(component, terms)?, "analytic"),
        Convention::Display => (mock.holomorphic_part_display(component, terms)?, "display"),
    };
    let record = report::q_expansion_record(&common.form, component, name, &expansion, &ctx);
    emit(&common.out, &report::render(&record))?;
    Ok(0)
}
