//! Command-line front end: condition checks, norms, operators, single
//! properties and full experiments.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use olab_core::field::{ball_family, sample, Ball, BallPolicy, FieldSpec, SampledField, Window};
use olab_core::growth::{check_decay_integral, check_pairing, check_rho_admissible, classify_growth, PairingInputs, PairingKind};
use olab_core::harness::{self, ExperimentConfig, Property, EXIT_FAIL, EXIT_NONCONVERGENT, EXIT_VALIDATION};
use olab_core::integral::{commutator, cz_apply, frac_integral, CommutatorOp, KernelSpec};
use olab_core::maximal::{frac_maximal, hl_maximal, sharp_maximal};
use olab_core::norms::{ball_norm, campanato_ball_norm, campanato_norm, campanato_p, om_norm};
use olab_core::report::default_r_grid;
use olab_core::young::{check_delta2, check_nabla2, default_k_grid};
use olab_core::{Error, GrowthFunction, YoungFunction};

#[derive(Parser)]
#[command(name = "olab", version, about = "Orlicz-Morrey numerical laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Δ₂ and ∇₂ scans, indices and the complementary function of a Young function.
    CheckYoung {
        /// Young function as JSON, e.g. '{"family":"Power","params":{"p":2}}'.
        #[arg(long)]
        phi: String,
    },
    /// Class membership, doubling and integrability scans of a growth function.
    CheckGrowth {
        #[arg(long)]
        g: String,
        /// Dimension used for the 𝒢^dec/𝒢^inc scans and the ρ conditions.
        #[arg(long, default_value_t = 1)]
        n: u32,
        /// Also check the fractional-integral conditions on `g` as ρ.
        #[arg(long)]
        as_rho: bool,
    },
    /// One of the pairing conditions between Young and growth functions.
    CheckPairing {
        #[arg(long, value_enum)]
        kind: PairingArg,
        /// PairingInputs as JSON (keys phi, psi_y, theta_y, phi0, vp, psi, theta_g, rho, t_grid).
        #[arg(long)]
        inputs: String,
    },
    /// A ball norm or a family norm of a field.
    Norm(NormArgs),
    /// Apply an operator to a field and write the result.
    Apply(ApplyArgs),
    /// Run one catalog property with a configuration.
    Verify {
        property: String,
        #[arg(long)]
        config: PathBuf,
        /// Directory for report.json and summary.csv.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run every property of a configuration and write the reports.
    Experiment {
        config: PathBuf,
        #[arg(long, default_value = "olab-report")]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum PairingArg {
    Cz,
    CzNec,
    Fract,
    Maximal,
    Holder,
    Ipvp,
}

impl From<PairingArg> for PairingKind {
    fn from(k: PairingArg) -> Self {
        match k {
            PairingArg::Cz => PairingKind::Cz,
            PairingArg::CzNec => PairingKind::CzNec,
            PairingArg::Fract => PairingKind::Fract,
            PairingArg::Maximal => PairingKind::Maximal,
            PairingArg::Holder => PairingKind::Holder,
            PairingArg::Ipvp => PairingKind::Ipvp,
        }
    }
}

/// A field read from a file or sampled from a spec.
#[derive(Args)]
struct FieldInput {
    /// Field file (binary, or CSV with a .csv extension).
    #[arg(long, conflicts_with = "spec")]
    field: Option<PathBuf>,
    /// FieldSpec as JSON, sampled on the window given by --n, --l and --cells.
    #[arg(long)]
    spec: Option<String>,
    #[arg(long, default_value_t = 1)]
    n: u32,
    /// Half-width L of the window.
    #[arg(long = "l", default_value_t = 4.0)]
    half_width: f64,
    #[arg(long, default_value_t = 256)]
    cells: usize,
}

impl FieldInput {
    fn load(&self) -> olab_core::Result<SampledField> {
        match (&self.field, &self.spec) {
            (Some(p), _) => SampledField::load(p),
            (None, Some(s)) => {
                let spec: FieldSpec = serde_json::from_str(s).map_err(|e| Error::Validation(format!("spec: {e}")))?;
                sample(&spec, &Window::new(self.n, self.half_width, self.cells)?)
            }
            (None, None) => Err(Error::Validation("give --field or --spec".into())),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum NormKind {
    /// ‖f‖_{Φ,φ,B} on the ball given by --center2 and --radius.
    Ball,
    /// ‖f - f_B‖_{Φ,φ,B} on one ball.
    CampanatoBall,
    /// The Orlicz-Morrey norm over the ball family.
    Morrey,
    /// The Orlicz-Campanato norm over the ball family.
    Campanato,
    /// The p-Campanato functional with --p and the growth function as ψ.
    CampanatoP,
}

#[derive(Args)]
struct NormArgs {
    #[command(flatten)]
    input: FieldInput,
    #[arg(long, value_enum, default_value = "morrey")]
    kind: NormKind,
    #[arg(long, default_value = r#"{"family":"Power","params":{"p":2}}"#)]
    phi: String,
    #[arg(long, default_value = r#"{"family":"PowerNeg","params":{"lambda":1}}"#)]
    vp: String,
    /// Ball center in half-cell units from the lower window corner, "i,j".
    #[arg(long)]
    center2: Option<String>,
    #[arg(long)]
    radius: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    p: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum OpArg {
    #[value(name = "M")]
    M,
    #[value(name = "Mrho")]
    Mrho,
    #[value(name = "Msharp")]
    Msharp,
    #[value(name = "Irho")]
    Irho,
    #[value(name = "T")]
    T,
    #[value(name = "commT")]
    CommT,
    #[value(name = "commIrho")]
    CommIrho,
}

#[derive(Args)]
struct ApplyArgs {
    #[command(flatten)]
    input: FieldInput,
    #[arg(long, value_enum)]
    op: OpArg,
    /// ρ as JSON for Mrho, Irho and commIrho.
    #[arg(long)]
    rho: Option<String>,
    /// Kernel as JSON; Hilbert in one dimension and Riesz_1 in two by default.
    #[arg(long)]
    kernel: Option<String>,
    /// Multiplier b as a FieldSpec JSON on the same window, for the commutators.
    #[arg(long)]
    b: Option<String>,
    /// Output file (binary, or CSV with a .csv extension).
    #[arg(long)]
    out: PathBuf,
}

fn parse<T: serde::de::DeserializeOwned>(what: &str, s: &str) -> olab_core::Result<T> {
    serde_json::from_str(s).map_err(|e| Error::Validation(format!("{what}: {e}")))
}

fn print<T: Serialize>(v: &T) -> olab_core::Result<()> {
    let mut out = std::io::stdout().lock();
    writeln!(out, "{}", serde_json::to_string_pretty(v)?)?;
    Ok(())
}

fn error_code(e: &Error) -> u8 {
    match e {
        Error::Divergent(_) => EXIT_NONCONVERGENT as u8,
        _ => EXIT_VALIDATION as u8,
    }
}

fn load_config(path: &PathBuf, seed: Option<u64>) -> olab_core::Result<ExperimentConfig> {
    let cfg = ExperimentConfig::load(path)?;
    Ok(match seed {
        Some(s) => cfg.with_seed(s),
        None => cfg,
    })
}

fn run(cli: Cli) -> olab_core::Result<u8> {
    match cli.command {
        Command::CheckYoung { phi } => {
            let phi: YoungFunction = parse("phi", &phi)?;
            let t: Vec<f64> = default_r_grid();
            print(&serde_json::json!({
                "function": phi.label(),
                "complementary": phi.complementary().label(),
                "a_phi": phi.a_phi(),
                "b_phi": phi.b_phi(),
                "delta2": check_delta2(&phi, &t),
                "nabla2": check_nabla2(&phi, &t, &default_k_grid()),
            }))?;
        }
        Command::CheckGrowth { g, n, as_rho } => {
            let g: GrowthFunction = parse("g", &g)?;
            let grid = default_r_grid();
            let mut out = serde_json::json!({
                "function": g.label(),
                "class": classify_growth(&g, &grid, n),
                "decay_integral": check_decay_integral(&g, &grid, 1e3),
            });
            if as_rho {
                let eps = 0.5 * n as f64;
                out["rho_admissible"] = serde_json::to_value(check_rho_admissible(&g, n, eps, &grid, 0.5, 2.0)?)?;
            }
            print(&out)?;
        }
        Command::CheckPairing { kind, inputs } => {
            let inp: PairingInputs = parse("inputs", &inputs)?;
            let rep = check_pairing(kind.into(), &inp, &default_r_grid())?;
            print(&rep)?;
            if !rep.holds {
                return Ok(EXIT_FAIL as u8);
            }
        }
        Command::Norm(a) => {
            let f = a.input.load()?;
            let phi: YoungFunction = parse("phi", &a.phi)?;
            let vp: GrowthFunction = parse("vp", &a.vp)?;
            let w = *f.window();
            let ball = || -> olab_core::Result<Ball> {
                let c = a.center2.as_deref().ok_or_else(|| Error::Validation("--center2 is required".into()))?;
                let parts: Vec<i64> = c
                    .split(',')
                    .map(|s| s.trim().parse::<i64>().map_err(|e| Error::Validation(format!("center2: {e}"))))
                    .collect::<olab_core::Result<_>>()?;
                let radius = a.radius.ok_or_else(|| Error::Validation("--radius is required".into()))?;
                let c1 = parts.get(1).copied().unwrap_or(0);
                Ok(Ball { center2: [parts[0], c1], radius })
            };
            let res = match a.kind {
                NormKind::Ball => ball_norm(&f, &phi, &vp, &ball()?)?,
                NormKind::CampanatoBall => campanato_ball_norm(&f, &phi, &vp, &ball()?)?,
                kind => {
                    let fam = ball_family(&w, BallPolicy::full())?;
                    match kind {
                        NormKind::Morrey => om_norm(&f, &phi, &vp, &fam)?,
                        NormKind::Campanato => campanato_norm(&f, &phi, &vp, &fam)?,
                        _ => campanato_p(&f, a.p, &vp, &fam)?,
                    }
                }
            };
            print(&res)?;
        }
        Command::Apply(a) => {
            let f = a.input.load()?;
            let w = *f.window();
            let rho = || -> olab_core::Result<GrowthFunction> {
                parse("rho", a.rho.as_deref().ok_or_else(|| Error::Validation("--rho is required".into()))?)
            };
            let kernel = || -> olab_core::Result<KernelSpec> {
                match &a.kernel {
                    Some(k) => parse("kernel", k),
                    None if w.n == 1 => Ok(KernelSpec::hilbert()),
                    None => KernelSpec::riesz(1),
                }
            };
            let b = || -> olab_core::Result<SampledField> {
                let spec: FieldSpec =
                    parse("b", a.b.as_deref().ok_or_else(|| Error::Validation("--b is required".into()))?)?;
                sample(&spec, &w)
            };
            let out = match a.op {
                OpArg::M => hl_maximal(&f, &ball_family(&w, BallPolicy::full())?)?,
                OpArg::Mrho => frac_maximal(&f, &rho()?, &ball_family(&w, BallPolicy::full())?)?,
                OpArg::Msharp => sharp_maximal(&f, &ball_family(&w, BallPolicy::full())?)?,
                OpArg::Irho => frac_integral(&f, &rho()?)?.field,
                OpArg::T => cz_apply(&f, &kernel()?)?.field,
                OpArg::CommT => commutator(&CommutatorOp::Cz { kernel: kernel()? }, &b()?, &f)?.field,
                OpArg::CommIrho => commutator(&CommutatorOp::Fract { rho: rho()? }, &b()?, &f)?.field,
            };
            out.save(&a.out)?;
            eprintln!("wrote {}", a.out.display());
        }
        Command::Verify { property, config, out, seed } => {
            let prop = Property::parse(&property)?;
            let mut cfg = load_config(&config, seed)?;
            cfg.properties = vec![prop.name().to_string()];
            cfg.validate()?;
            let report = harness::run_config(&cfg)?;
            if let Some(dir) = out {
                harness::write_reports(&report, &dir)?;
            }
            print(&report.properties[0])?;
            return Ok(report.exit_code as u8);
        }
        Command::Experiment { config, out, seed } => {
            let cfg = load_config(&config, seed)?;
            let files = harness::run_experiment(&cfg, &out)?;
            for p in &files.report.properties {
                eprintln!("{:<20} {:?} worst ratio {}", p.property, p.verdict, p.worst_ratio);
            }
            eprintln!("wrote {} and {}", files.json.display(), files.csv.display());
            return Ok(files.report.exit_code as u8);
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_code(&e))
        }
    }
}
