//! `coherence`: decide, build and verify coherence transformations from JSON
//! files.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coherence_core::absorption::{absorb_channel, IncoherentTarget};
use coherence_core::catalysis::{search_catalyst, CatalysisQuery};
use coherence_core::io::{self, FormatError};
use coherence_core::majorization::compare;
use coherence_core::measures::{c_l, c_l_all, check_monotone_violation, skew_information};
use coherence_core::model::{apply_with, max_abs_diff};
use coherence_core::synthesis::synthesize_plan;
use coherence_core::{CoherenceError, DensityMatrix, ToleranceConfig};
use serde_json::{json, Value};

const MAX_DEFAULT_CATALYST_DIM: usize = 4;

#[derive(Parser)]
#[command(
    name = "coherence",
    version,
    about = "Pure-state coherence transformations under incoherent operations"
)]
struct Cli {
    /// Indented JSON output.
    #[arg(long, global = true)]
    pretty: bool,

    #[command(flatten)]
    tol: TolFlags,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct TolFlags {
    #[arg(long, global = true, value_name = "X", allow_hyphen_values = true)]
    tol_norm: Option<f64>,
    #[arg(long, global = true, value_name = "X", allow_hyphen_values = true)]
    tol_herm: Option<f64>,
    #[arg(long, global = true, value_name = "X", allow_hyphen_values = true)]
    tol_psd: Option<f64>,
    #[arg(long, global = true, value_name = "X", allow_hyphen_values = true)]
    tol_complete: Option<f64>,
    #[arg(long, global = true, value_name = "X", allow_hyphen_values = true)]
    tol_major: Option<f64>,
    #[arg(long, global = true, value_name = "X", allow_hyphen_values = true)]
    tol_purity: Option<f64>,
    #[arg(long, global = true, value_name = "X", allow_hyphen_values = true)]
    tol_nonneg: Option<f64>,
}

impl TolFlags {
    fn config(&self) -> Result<ToleranceConfig, CoherenceError> {
        let d = ToleranceConfig::default();
        let tol = ToleranceConfig {
            norm_tol: self.tol_norm.unwrap_or(d.norm_tol),
            herm_tol: self.tol_herm.unwrap_or(d.herm_tol),
            psd_tol: self.tol_psd.unwrap_or(d.psd_tol),
            complete_tol: self.tol_complete.unwrap_or(d.complete_tol),
            major_tol: self.tol_major.unwrap_or(d.major_tol),
            purity_tol: self.tol_purity.unwrap_or(d.purity_tol),
            nonneg_tol: self.tol_nonneg.unwrap_or(d.nonneg_tol),
        };
        tol.validate()?;
        Ok(tol)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Compare two profiles (or states) under majorization.
    Check { x: PathBuf, y: PathBuf },
    /// Build an incoherent channel taking `psi` to `phi`.
    Synth {
        psi: PathBuf,
        phi: PathBuf,
        /// Write the channel here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Plan sidecar path (default: next to the channel as `<name>.plan.json`).
        #[arg(long)]
        plan: Option<PathBuf>,
    },
    /// Apply a channel to a state or density matrix.
    Apply { channel: PathBuf, state: PathBuf },
    /// Check that a channel is incoherent and trace preserving.
    Verify { channel: PathBuf },
    /// Grid search for a catalyst enabling `psi -> phi`.
    Catalyze {
        psi: PathBuf,
        phi: PathBuf,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 0.01)]
        grid: f64,
        /// Permit catalyst dimensions above 4.
        #[arg(long)]
        allow_large: bool,
    },
    /// Evaluate a coherence measure.
    Measure {
        #[arg(long, value_enum)]
        measure: Measure,
        /// Tail index for `cl`; all of C_2..C_d when omitted.
        #[arg(long)]
        l: Option<usize>,
        /// Observable for `skew`: a diagonal array or a `{"dim","rows"}` matrix.
        #[arg(long)]
        observable: Option<PathBuf>,
        state: PathBuf,
    },
    /// Run the skew-information counterexample.
    Counterexample,
    /// Build the channel sending every state `rho` to the incoherent `sigma`.
    Absorb { rho: PathBuf, sigma: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum Measure {
    Cl,
    Skew,
}

enum Failure {
    /// Malformed input, exit 1.
    Input(String),
    /// Well-formed request the theory refuses, exit 2.
    Refused(String),
    /// Negative verdict printed as a report, exit 2.
    Verdict(String),
}

impl From<CoherenceError> for Failure {
    fn from(e: CoherenceError) -> Self {
        match e {
            CoherenceError::NotMajorized => Failure::Refused(e.to_string()),
            _ => Failure::Input(e.to_string()),
        }
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Domain(inner) => inner.into(),
            other => Failure::Input(other.to_string()),
        }
    }
}

struct Ctx {
    tol: ToleranceConfig,
    pretty: bool,
}

impl Ctx {
    fn render(&self, v: Value) -> String {
        let v = io::round_value(v);
        if self.pretty {
            serde_json::to_string_pretty(&v).expect("serializable")
        } else {
            serde_json::to_string(&v).expect("serializable")
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn in_file<T>(path: &Path, r: Result<T, FormatError>) -> Result<T, Failure> {
    r.map_err(|e| match Failure::from(e) {
        Failure::Input(m) => Failure::Input(format!("{}: {m}", path.display())),
        refused => refused,
    })
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, format!("{text}\n"))
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn plan_path(channel: &Path) -> PathBuf {
    let stem = channel
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    channel.with_file_name(format!("{stem}.plan.json"))
}

fn number(x: f64) -> String {
    io::round15(x).to_string()
}

fn run(cli: Cli) -> Result<String, Failure> {
    let ctx = Ctx {
        tol: cli.tol.config()?,
        pretty: cli.pretty,
    };
    let tol = &ctx.tol;
    match cli.command {
        Command::Check { x, y } => {
            let px = in_file(&x, io::profile_from_str(&read(&x)?, tol))?;
            let py = in_file(&y, io::profile_from_str(&read(&y)?, tol))?;
            Ok(compare(&px, &py, tol)?.to_string())
        }
        Command::Synth {
            psi,
            phi,
            output,
            plan,
        } => {
            let s = in_file(&psi, io::state_from_str(&read(&psi)?, tol))?;
            let t = in_file(&phi, io::state_from_str(&read(&phi)?, tol))?;
            let built = synthesize_plan(&s, &t, tol)?;
            let channel = ctx.render(io::channel_to_value(&built.channel));
            let sidecar = plan.or_else(|| output.as_deref().map(plan_path));
            if let Some(p) = &sidecar {
                write(p, &ctx.render(io::plan_to_value(&built)))?;
            }
            match output {
                Some(o) => {
                    write(&o, &channel)?;
                    Ok(format!("wrote {}", o.display()))
                }
                None => Ok(channel),
            }
        }
        Command::Apply { channel, state } => {
            let ch = in_file(&channel, io::channel_from_str(&read(&channel)?, tol))?;
            let rho = in_file(&state, io::density_or_state_from_str(&read(&state)?, tol))?;
            let out = apply_with(&ch, &rho, tol)?;
            Ok(ctx.render(io::density_to_value(&out)))
        }
        Command::Verify { channel } => {
            let text = read(&channel)?;
            // parse without the completeness gate so the verdict can be reported
            let loose = ToleranceConfig {
                complete_tol: f64::MAX,
                ..*tol
            };
            let ch = in_file(&channel, io::channel_from_str(&text, &loose))?;
            let incoherent = ch.is_incoherent(tol);
            let complete = ch.is_complete(tol);
            let report = ctx.render(json!({
                "incoherent": incoherent,
                "complete": complete,
                "completeness_residual": ch.completeness_residual(),
            }));
            if incoherent && complete {
                Ok(report)
            } else {
                Err(Failure::Verdict(report))
            }
        }
        Command::Catalyze {
            psi,
            phi,
            dim,
            grid,
            allow_large,
        } => {
            if dim > MAX_DEFAULT_CATALYST_DIM && !allow_large {
                return Err(Failure::Input(format!(
                    "--dim {dim} exceeds {MAX_DEFAULT_CATALYST_DIM}; pass --allow-large to search it"
                )));
            }
            let x = in_file(&psi, io::profile_from_str(&read(&psi)?, tol))?;
            let y = in_file(&phi, io::profile_from_str(&read(&phi)?, tol))?;
            match search_catalyst(&CatalysisQuery::new(x, y, dim, grid), tol)? {
                Some(c) => Ok(ctx.render(io::profile_to_value(&c))),
                None => Err(Failure::Refused("none found at this resolution".into())),
            }
        }
        Command::Measure {
            measure,
            l,
            observable,
            state,
        } => {
            let text = read(&state)?;
            match measure {
                Measure::Cl => {
                    let s = in_file(&state, io::state_from_str(&text, tol))?;
                    match l {
                        Some(l) => Ok(number(c_l(&s, l)?)),
                        None => Ok(ctx.render(Value::from(c_l_all(&s)))),
                    }
                }
                Measure::Skew => {
                    let path = observable
                        .ok_or_else(|| Failure::Input("skew needs --observable".into()))?;
                    let k = in_file(&path, io::observable_from_str(&read(&path)?, tol))?;
                    let rho = in_file(&state, io::density_or_state_from_str(&text, tol))?;
                    Ok(number(skew_information(&rho, &k)?))
                }
            }
        }
        Command::Counterexample => {
            let report = check_monotone_violation(tol)?;
            Ok(ctx.render(serde_json::to_value(report).expect("serializable")))
        }
        Command::Absorb { rho, sigma } => {
            let input = in_file(&rho, io::density_or_state_from_str(&read(&rho)?, tol))?;
            let text = read(&sigma)?;
            if serde_json::from_str::<Value>(&text).is_ok_and(|v| v.get("amplitudes").is_some()) {
                return Err(Failure::Input(format!(
                    "{}: sigma must be a diagonal density matrix or a profile array",
                    sigma.display()
                )));
            }
            let target = in_file(&sigma, io::profile_from_str(&text, tol))?;
            if target.len() != input.dim() {
                return Err(Failure::Input(format!(
                    "{}: dimension {} does not match rho dimension {}",
                    sigma.display(),
                    target.len(),
                    input.dim()
                )));
            }
            let ch = absorb_channel(&IncoherentTarget::new(target.clone()), input.dim())?;
            let out = apply_with(&ch, &input, tol)?;
            let err = max_abs_diff(out.matrix(), DensityMatrix::diagonal(&target).matrix());
            let verified = err <= tol.norm_tol && ch.is_incoherent(tol) && ch.is_complete(tol);
            let report = ctx.render(json!({
                "channel": io::channel_to_value(&ch),
                "output": io::density_to_value(&out),
                "verified": verified,
            }));
            if verified {
                Ok(report)
            } else {
                Err(Failure::Verdict(report))
            }
        }
    }
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
        Ok(out) => {
            println!("{out}");
            ExitCode::SUCCESS
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {}", msg.replace('\n', " "));
            ExitCode::from(1)
        }
        Err(Failure::Refused(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
        Err(Failure::Verdict(report)) => {
            println!("{report}");
            ExitCode::from(2)
        }
    }
}
