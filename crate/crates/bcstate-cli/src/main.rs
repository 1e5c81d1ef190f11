//! Command-line front end for the broadcast-channel toolkit: file-based
//! inputs (JSON), machine-readable outputs (JSON/CSV), reproducible seeds.
//!
//! Exit codes: `0` success, `1` validation failure (bad file contents,
//! inconsistent model, failed `--check-degraded`), `2` verification mismatch
//! (`fme` verdict not EQUAL, `inclusion` verdict false), `64` flag parse
//! error, `66` file I/O error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;

use bcstate::fme::{parse_system, reduce_user_system, render_row, verify_reduction, Verdict};
use bcstate::fme::BuiltinSystem;
use bcstate::{
    build_joint, causal_vs_noncausal, eval_bound, n_sweep, optimize, stochastically_degraded,
    sweep_csv, validate_channel, validate_scheme, AuxScheme, BoundFamily, ChannelSpec, Csit,
    SearchBudget, SideInfoConfig, SimConfig,
};

// ---------------------------------------------------------------------------
// Argument grammar
// ---------------------------------------------------------------------------

#[derive(Parser)]
#[command(
    name = "bcstate",
    version,
    about = "Rate regions, exact projections, and coding simulations for the \
             two-receiver broadcast channel with state",
    disable_help_subcommand = true
)]
struct Cli {
    /// Suppress prose; emit only machine-readable output and exit codes.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a channel file (and optionally a scheme against a configuration).
    Validate {
        /// Channel description (JSON).
        #[arg(long)]
        channel: PathBuf,
        /// Auxiliary scheme to validate against the channel (JSON).
        #[arg(long, requires = "config")]
        scheme: Option<PathBuf>,
        /// Side-information configuration the scheme is meant for (JSON).
        #[arg(long, requires = "scheme")]
        config: Option<PathBuf>,
        /// Also decide, by exact rational feasibility, whether receiver 2 is
        /// stochastically degraded with respect to receiver 1; exits 1 if not.
        #[arg(long)]
        check_degraded: bool,
    },
    /// Evaluate one inequality family at a given scheme.
    Region {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        scheme: PathBuf,
        /// Side-information configuration (JSON); defaults to no state
        /// knowledge anywhere.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Inequality family to evaluate.
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Write the region JSON here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optimize schemes for each weight vector in a search budget.
    Frontier {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        family: FamilyArg,
        /// Search budget (JSON): candidate counts, seed, cardinalities,
        /// weight vectors.
        #[arg(long)]
        budget: PathBuf,
        /// Override the seed recorded in the budget file.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write a weight/value CSV here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Evaluate a degraded-channel capacity formula (U2 forced degenerate).
    ///
    /// The formulas are capacities only for stochastically degraded pairs;
    /// the caller must assert that (see `validate --check-degraded`).
    Capacity {
        #[arg(long)]
        channel: PathBuf,
        /// Which degraded setting to evaluate.
        #[arg(long, value_enum)]
        variant: VariantArg,
        /// Acknowledge that the channel is (stochastically) degraded.
        /// Refused otherwise: the formulas are not capacities without it.
        #[arg(long)]
        assert_degraded: bool,
        /// Give receiver 2 the state too (variants with receiver-1 state only).
        #[arg(long)]
        state_at_rx2: bool,
        #[arg(long)]
        budget: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Verify that non-causal transmitter state access never loses to causal.
    Inclusion {
        #[arg(long)]
        channel: PathBuf,
        /// Receiver 1 knows the state.
        #[arg(long)]
        state_at_rx1: bool,
        /// Receiver 2 knows the state.
        #[arg(long)]
        state_at_rx2: bool,
        #[arg(long)]
        budget: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the exact symbolic elimination, either certifying a builtin
    /// system against its target region or reducing a user system file.
    Fme {
        /// Builtin proof system to certify.
        #[arg(long, value_parser = parse_builtin_name, conflicts_with = "system")]
        builtin: Option<BuiltinSystem>,
        /// User system file in the inequality grammar; its variables marked
        /// for elimination are projected out and the reduced rows printed.
        #[arg(long, required_unless_present = "builtin")]
        system: Option<PathBuf>,
        /// Emit the report as JSON instead of text.
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo simulation of the coding scheme over a blocklength sweep.
    Simulate {
        #[arg(long)]
        channel: PathBuf,
        #[arg(long)]
        scheme: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Simulation parameters (JSON): blocklength, rate split, typicality
        /// slacks, trial count, seed.
        #[arg(long)]
        sim: PathBuf,
        /// Enable the message-side-information code structure (rates R3, R4
        /// and the non-causal common bin rate become legal).
        #[arg(long)]
        rmsi: bool,
        /// Blocklengths to sweep (comma separated); defaults to the one in
        /// the sim file.
        #[arg(long, value_delimiter = ',')]
        ns: Option<Vec<usize>>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the sweep as CSV here.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

/// Inequality family names as accepted on the command line.
#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    CausalNoRmsi,
    UnifiedNoRmsi,
    UnifiedRmsi,
    DegradedCausalTxOnly,
    DegradedCausalStateRx1,
    #[value(name = "degraded-noncausal-state-rx1")]
    DegradedNonCausalStateRx1,
}

impl From<FamilyArg> for BoundFamily {
    fn from(f: FamilyArg) -> BoundFamily {
        match f {
            FamilyArg::CausalNoRmsi => BoundFamily::CausalNoRmsi,
            FamilyArg::UnifiedNoRmsi => BoundFamily::UnifiedNoRmsi,
            FamilyArg::UnifiedRmsi => BoundFamily::UnifiedRmsi,
            FamilyArg::DegradedCausalTxOnly => BoundFamily::DegradedCausalTxOnly,
            FamilyArg::DegradedCausalStateRx1 => BoundFamily::DegradedCausalStateRx1,
            FamilyArg::DegradedNonCausalStateRx1 => BoundFamily::DegradedNonCausalStateRx1,
        }
    }
}

/// Degraded-capacity variants, with short aliases.
#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    /// Causal state at the transmitter only.
    #[value(name = "causal-tx-only", alias = "th3")]
    CausalTxOnly,
    /// Causal state at the transmitter and receiver 1.
    #[value(name = "causal-state-rx1", alias = "th4")]
    CausalStateRx1,
    /// Non-causal state at the transmitter, state at receiver 1.
    #[value(name = "noncausal", alias = "noncausal-state-rx1", alias = "th5")]
    NonCausalStateRx1,
}

impl VariantArg {
    fn family(self) -> BoundFamily {
        match self {
            VariantArg::CausalTxOnly => BoundFamily::DegradedCausalTxOnly,
            VariantArg::CausalStateRx1 => BoundFamily::DegradedCausalStateRx1,
            VariantArg::NonCausalStateRx1 => BoundFamily::DegradedNonCausalStateRx1,
        }
    }

    fn config(self, state_at_rx2: bool) -> SideInfoConfig {
        match self {
            VariantArg::CausalTxOnly => SideInfoConfig {
                csit: Csit::Causal,
                state_at_rx1: false,
                state_at_rx2: false,
            },
            VariantArg::CausalStateRx1 => SideInfoConfig {
                csit: Csit::Causal,
                state_at_rx1: true,
                state_at_rx2,
            },
            VariantArg::NonCausalStateRx1 => SideInfoConfig {
                csit: Csit::NonCausal,
                state_at_rx1: true,
                state_at_rx2,
            },
        }
    }
}

fn parse_builtin_name(s: &str) -> Result<BuiltinSystem, String> {
    BuiltinSystem::from_name(s).ok_or_else(|| {
        format!("unknown builtin system '{s}'; known: causal-th1, rmsi-causal-th2, rmsi-noncausal-th2")
    })
}

// ---------------------------------------------------------------------------
// Failure plumbing
// ---------------------------------------------------------------------------

enum Failure {
    /// Bad file contents or an inconsistent model: exit 1.
    Invalid(String),
    /// File system trouble: exit 66.
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::Io(_) => 66,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Invalid(m) | Failure::Io(m) => m,
        }
    }
}

fn invalid(e: impl std::fmt::Display) -> Failure {
    Failure::Invalid(e.to_string())
}

fn read_to_string(path: &PathBuf) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

fn load_json<T: DeserializeOwned>(path: &PathBuf, what: &str) -> Result<T, Failure> {
    let text = read_to_string(path)?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::Invalid(format!("{what} file {}: {e}", path.display())))
}

fn load_channel(path: &PathBuf) -> Result<ChannelSpec, Failure> {
    let spec: ChannelSpec = load_json(path, "channel")?;
    validate_channel(&spec)
        .map_err(|e| Failure::Invalid(format!("channel file {}: {e}", path.display())))?;
    Ok(spec)
}

/// Default side-information configuration: nobody sees the state.
fn load_config(path: &Option<PathBuf>) -> Result<SideInfoConfig, Failure> {
    match path {
        Some(p) => load_json(p, "configuration"),
        None => Ok(SideInfoConfig {
            csit: Csit::None,
            state_at_rx1: false,
            state_at_rx2: false,
        }),
    }
}

/// Prints to stdout, tolerating a closed pipe (e.g. downstream `head`).
fn print_stdout(text: &str) {
    use std::io::Write;
    let _ = writeln!(std::io::stdout(), "{text}");
}

/// Sends machine output to `--out` when given, stdout otherwise.
fn emit(out: &Option<PathBuf>, text: &str, quiet: bool) -> Result<(), Failure> {
    match out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
            prose(quiet, &format!("wrote {}", path.display()));
        }
        None => print_stdout(text),
    }
    Ok(())
}

/// Human commentary goes to stderr so stdout stays machine-clean.
fn prose(quiet: bool, msg: &str) {
    if !quiet {
        eprintln!("{msg}");
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests arrive here too; they are successes.
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let quiet = cli.quiet;
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            // The failure text is machine-relevant (tests match on it), so it
            // is printed even under --quiet.
            let _ = quiet;
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let quiet = cli.quiet;
    match cli.command {
        Command::Validate {
            channel,
            scheme,
            config,
            check_degraded,
        } => cmd_validate(quiet, channel, scheme, config, check_degraded),
        Command::Region {
            channel,
            scheme,
            config,
            family,
            out,
        } => cmd_region(quiet, channel, scheme, config, family, out),
        Command::Frontier {
            channel,
            config,
            family,
            budget,
            seed,
            out,
            csv,
        } => cmd_frontier(quiet, channel, config, family, budget, seed, out, csv),
        Command::Capacity {
            channel,
            variant,
            assert_degraded,
            state_at_rx2,
            budget,
            seed,
            out,
            csv,
        } => {
            if !assert_degraded {
                return Err(Failure::Invalid(
                    "the degraded-channel formulas are capacities only when receiver 2 is a \
                     degraded version of receiver 1; pass --assert-degraded to confirm \
                     (validate --check-degraded can decide it exactly)"
                        .into(),
                ));
            }
            cmd_capacity(quiet, channel, variant, state_at_rx2, budget, seed, out, csv)
        }
        Command::Inclusion {
            channel,
            state_at_rx1,
            state_at_rx2,
            budget,
            seed,
            out,
        } => cmd_inclusion(quiet, channel, state_at_rx1, state_at_rx2, budget, seed, out),
        Command::Fme {
            builtin,
            system,
            json,
            out,
        } => cmd_fme(quiet, builtin, system, json, out),
        Command::Simulate {
            channel,
            scheme,
            config,
            sim,
            rmsi,
            ns,
            seed,
            out,
            csv,
        } => cmd_simulate(quiet, channel, scheme, config, sim, rmsi, ns, seed, out, csv),
    }
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

fn cmd_validate(
    quiet: bool,
    channel: PathBuf,
    scheme: Option<PathBuf>,
    config: Option<PathBuf>,
    check_degraded: bool,
) -> Result<u8, Failure> {
    let spec = load_channel(&channel)?;
    prose(
        quiet,
        &format!(
            "channel ok: |X|={} |S|={} |Y1|={} |Y2|={}",
            spec.x_size, spec.s_size, spec.y1_size, spec.y2_size
        ),
    );
    if let (Some(scheme_path), Some(config_path)) = (&scheme, &config) {
        let cfg: SideInfoConfig = load_json(config_path, "configuration")?;
        let sch: AuxScheme = load_json(scheme_path, "scheme")?;
        validate_scheme(&sch, &spec, &cfg)
            .map_err(|e| Failure::Invalid(format!("scheme file {}: {e}", scheme_path.display())))?;
        prose(
            quiet,
            &format!(
                "scheme ok: |U0|={} |U1|={} |U2|={}",
                sch.u0_size, sch.u1_size, sch.u2_size
            ),
        );
    }
    if check_degraded {
        let degraded = stochastically_degraded(&spec).map_err(invalid)?;
        print_stdout(&format!("stochastically-degraded: {degraded}"));
        if !degraded {
            return Err(Failure::Invalid(
                "receiver 2 is not a stochastically degraded version of receiver 1 \
                 (no post-processing channel q(y2|y1) reproduces p(y2|x,s))"
                    .into(),
            ));
        }
    }
    Ok(0)
}

fn cmd_region(
    quiet: bool,
    channel: PathBuf,
    scheme: PathBuf,
    config: Option<PathBuf>,
    family: FamilyArg,
    out: Option<PathBuf>,
) -> Result<u8, Failure> {
    let spec = load_channel(&channel)?;
    let cfg = load_config(&config)?;
    let sch: AuxScheme = load_json(&scheme, "scheme")?;
    let family = BoundFamily::from(family);
    let joint = build_joint(&spec, &cfg, &sch).map_err(invalid)?;
    let region = eval_bound(&joint, family).map_err(invalid)?;
    prose(
        quiet,
        &format!(
            "{}: {} inequalities{}",
            family.name(),
            region.rows.len(),
            if region.is_empty_region() {
                " (empty region: a right-hand side is negative)"
            } else {
                ""
            }
        ),
    );
    emit(&out, &region.to_json(), quiet)?;
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_frontier(
    quiet: bool,
    channel: PathBuf,
    config: Option<PathBuf>,
    family: FamilyArg,
    budget: PathBuf,
    seed: Option<u64>,
    out: Option<PathBuf>,
    csv: Option<PathBuf>,
) -> Result<u8, Failure> {
    let spec = load_channel(&channel)?;
    let cfg = load_config(&config)?;
    let mut budget: SearchBudget = load_json(&budget, "budget")?;
    if let Some(s) = seed {
        budget.seed = s;
    }
    let family = BoundFamily::from(family);
    let report = optimize(&spec, &cfg, family, &budget).map_err(invalid)?;
    for o in &report.outcomes {
        prose(
            quiet,
            &format!("w={:?}: best weighted sum {:.6} bits", o.weights, o.value),
        );
    }
    if let Some(csv_path) = &csv {
        fs::write(csv_path, report.to_csv())
            .map_err(|e| Failure::Io(format!("{}: {e}", csv_path.display())))?;
        prose(quiet, &format!("wrote {}", csv_path.display()));
    }
    emit(&out, &report.to_json(), quiet)?;
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_capacity(
    quiet: bool,
    channel: PathBuf,
    variant: VariantArg,
    state_at_rx2: bool,
    budget: PathBuf,
    seed: Option<u64>,
    out: Option<PathBuf>,
    csv: Option<PathBuf>,
) -> Result<u8, Failure> {
    let spec = load_channel(&channel)?;
    let cfg = variant.config(state_at_rx2);
    let mut budget: SearchBudget = load_json(&budget, "budget")?;
    if let Some(s) = seed {
        budget.seed = s;
    }
    // The capacity formulas have no second private layer.
    budget.cardinalities.2 = 1;
    let report = optimize(&spec, &cfg, variant.family(), &budget).map_err(invalid)?;
    for o in &report.outcomes {
        prose(
            quiet,
            &format!("w={:?}: capacity support {:.6} bits", o.weights, o.value),
        );
    }
    if let Some(csv_path) = &csv {
        fs::write(csv_path, report.to_csv())
            .map_err(|e| Failure::Io(format!("{}: {e}", csv_path.display())))?;
        prose(quiet, &format!("wrote {}", csv_path.display()));
    }
    emit(&out, &report.to_json(), quiet)?;
    Ok(0)
}

fn cmd_inclusion(
    quiet: bool,
    channel: PathBuf,
    state_at_rx1: bool,
    state_at_rx2: bool,
    budget: PathBuf,
    seed: Option<u64>,
    out: Option<PathBuf>,
) -> Result<u8, Failure> {
    let spec = load_channel(&channel)?;
    let mut budget: SearchBudget = load_json(&budget, "budget")?;
    if let Some(s) = seed {
        budget.seed = s;
    }
    let report = causal_vs_noncausal(&spec, state_at_rx1, state_at_rx2, &budget).map_err(invalid)?;
    prose(
        quiet,
        &format!(
            "non-causal ≥ causal: exactly {} / within 1e-6 {}",
            report.holds_exactly, report.holds_within_tolerance
        ),
    );
    let failed = !report.holds_exactly;
    emit(&out, &report.to_json(), quiet)?;
    Ok(if failed { 2 } else { 0 })
}

fn cmd_fme(
    quiet: bool,
    builtin: Option<BuiltinSystem>,
    system: Option<PathBuf>,
    json: bool,
    out: Option<PathBuf>,
) -> Result<u8, Failure> {
    if let Some(b) = builtin {
        let report = verify_reduction(b);
        let text = if json {
            report.to_json()
        } else {
            format!("{report}")
        };
        emit(&out, &text, quiet)?;
        return Ok(if report.verdict == Verdict::Equal { 0 } else { 2 });
    }
    let path = system.expect("clap guarantees --system when --builtin is absent");
    let text = read_to_string(&path)?;
    let sys = parse_system(&text)
        .map_err(|e| Failure::Invalid(format!("system file {}: {e}", path.display())))?;
    let (reduced, raw_rows) = reduce_user_system(&sys);
    let rendered: Vec<String> = reduced.rows.iter().map(render_row).collect();
    let output = if json {
        serde_json::to_string_pretty(&serde_json::json!({
            "raw_rows_after_elimination": raw_rows,
            "reduced_rows": rendered,
        }))
        .expect("report serialization cannot fail")
    } else {
        let mut s = format!("raw rows after elimination: {raw_rows}\n");
        s.push_str(&format!("reduced rows ({}):\n", rendered.len()));
        for r in &rendered {
            s.push_str(&format!("  {r}\n"));
        }
        s.trim_end().to_string()
    };
    emit(&out, &output, quiet)?;
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    quiet: bool,
    channel: PathBuf,
    scheme: PathBuf,
    config: Option<PathBuf>,
    sim: PathBuf,
    rmsi: bool,
    ns: Option<Vec<usize>>,
    seed: Option<u64>,
    out: Option<PathBuf>,
    csv: Option<PathBuf>,
) -> Result<u8, Failure> {
    let spec = load_channel(&channel)?;
    let cfg = load_config(&config)?;
    let sch: AuxScheme = load_json(&scheme, "scheme")?;
    let mut sim: SimConfig = load_json(&sim, "simulation")?;
    if let Some(s) = seed {
        sim.seed = s;
    }
    let ns = ns.unwrap_or_else(|| vec![sim.n]);
    if ns.is_empty() {
        return Err(Failure::Invalid("--ns must list at least one blocklength".into()));
    }
    let reports = n_sweep(&spec, &cfg, &sch, &sim, rmsi, &ns).map_err(invalid)?;
    for r in &reports {
        prose(
            quiet,
            &format!(
                "n={}: P_e={:.4} (95% CI [{:.4}, {:.4}]) over {} trials",
                r.n, r.p_e, r.ci_low, r.ci_high, r.trials
            ),
        );
    }
    if let Some(csv_path) = &csv {
        fs::write(csv_path, sweep_csv(&reports))
            .map_err(|e| Failure::Io(format!("{}: {e}", csv_path.display())))?;
        prose(quiet, &format!("wrote {}", csv_path.display()));
    }
    let text = serde_json::to_string_pretty(&reports).expect("report serialization cannot fail");
    emit(&out, &text, quiet)?;
    Ok(0)
}
