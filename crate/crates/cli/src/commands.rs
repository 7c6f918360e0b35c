use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use desmod_core::checkers::{check, Engine, Property, PropertyQuery};
use desmod_core::gadgets::{
    gen_adiag_reduction, gen_counter, gen_detectability_reduction, gen_opacity_reduction,
    CounterParams,
};
use desmod_core::{validate_des, validate_system, ModularSystem, DEFAULT_BUDGET};

use crate::error::CliError;
use crate::format::TmFile;
use crate::io::{load_system, write_system};
use crate::report::{emit_error, emit_report};

#[derive(Debug, Parser)]
#[command(
    name = "desmod",
    version,
    about = "Verify modular discrete event systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide a property of a system.
    #[command(subcommand)]
    Check(CheckCommand),
    /// Generate systems.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Parse a system, list its modules and check the standing assumptions.
    Validate {
        /// System file, directory containing `system.sys`, or module file.
        input: PathBuf,
        /// Exit with code 2 if a standing assumption fails.
        #[arg(long)]
        strict: bool,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
    },
}

#[derive(Debug, Subcommand)]
enum CheckCommand {
    /// Strong, strong periodic, weak or weak periodic detectability.
    Detect {
        #[command(flatten)]
        variant: DetectVariant,
        #[command(flatten)]
        common: CheckArgs,
    },
    /// Current-state opacity with respect to the system's secret.
    Opacity {
        #[command(flatten)]
        common: CheckArgs,
    },
    /// A-diagnosability with respect to the system's fault events.
    Adiag {
        #[command(flatten)]
        common: CheckArgs,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct DetectVariant {
    #[arg(long)]
    strong: bool,
    #[arg(long)]
    strong_periodic: bool,
    #[arg(long)]
    weak: bool,
    #[arg(long)]
    weak_periodic: bool,
}

impl DetectVariant {
    fn property(&self) -> Property {
        if self.strong {
            Property::StrongDetect
        } else if self.strong_periodic {
            Property::StrongPeriodicDetect
        } else if self.weak {
            Property::WeakDetect
        } else {
            Property::WeakPeriodicDetect
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum EngineArg {
    Explicit,
    Onthefly,
    SpecialCase,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Engine {
        match e {
            EngineArg::Explicit => Engine::Explicit,
            EngineArg::Onthefly => Engine::OnTheFly,
            EngineArg::SpecialCase => Engine::SpecialCase,
        }
    }
}

#[derive(Debug, Args)]
struct CheckArgs {
    /// System file, directory containing `system.sys`, or module file.
    input: PathBuf,
    #[arg(long, value_enum, default_value = "onthefly")]
    engine: EngineArg,
    /// Maximum number of states any engine structure may hold.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    /// Include the witness (lasso, revealing word or fault string) in the report.
    #[arg(long)]
    witness: bool,
    /// Emit a JSON record instead of text.
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Detect,
    Opacity,
    Adiag,
}

#[derive(Debug, Subcommand)]
enum GenCommand {
    /// The binary counter gadget whose Σ-projection is Σ^(2^n − k).
    Counter {
        #[arg(long)]
        n: u32,
        /// Comma-separated counted events.
        #[arg(long, value_delimiter = ',', required = true)]
        sigma: Vec<String>,
        #[arg(long)]
        k: Option<u64>,
        /// Output directory (default `counter-n<N>`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The system built from a Turing machine for one of the three hardness proofs.
    Reduction {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        tm: PathBuf,
        /// Output directory (default `reduction-<kind>`).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `argv` (including the program name), runs the command and returns the exit
/// code. Reports go to `out`, diagnostics to `err`.
pub fn run_command<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    let json = matches!(
        &cli.command,
        Command::Check(
            CheckCommand::Detect { common, .. }
                | CheckCommand::Opacity { common }
                | CheckCommand::Adiag { common }
        ) if common.json
    );
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if json {
                let _ = write!(out, "{}", emit_error(e.kind(), &e.to_string()));
            }
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Check(c) => {
            let (property, args) = match c {
                CheckCommand::Detect { variant, common } => (variant.property(), common),
                CheckCommand::Opacity { common } => (Property::Opacity, common),
                CheckCommand::Adiag { common } => (Property::ADiag, common),
            };
            run_check(property, &args, out)
        }
        Command::Gen(GenCommand::Counter {
            n,
            sigma,
            k,
            out: dir,
        }) => {
            let names: Vec<&str> = sigma.iter().map(String::as_str).collect();
            let mut p = CounterParams::new(n, &names);
            if let Some(k) = k {
                p = p.with_k(k);
            }
            let sys = gen_counter(&p)?;
            let dir = dir.unwrap_or_else(|| PathBuf::from(format!("counter-n{n}")));
            let path = write_system(&dir, &sys)?;
            writeln!(out, "wrote {} modules to {}", sys.len(), path.display()).map_err(stdout)?;
            inventory(&sys, out)?;
            Ok(0)
        }
        Command::Gen(GenCommand::Reduction { kind, tm, out: dir }) => {
            let text = fs::read_to_string(&tm).map_err(CliError::io(&tm))?;
            let file = TmFile::parse(&text).map_err(|source| CliError::Format {
                path: tm.clone(),
                source,
            })?;
            let spec = file.to_spec()?;
            let (generated, name) = match kind {
                KindArg::Detect => (gen_detectability_reduction(&spec)?, "detect"),
                KindArg::Opacity => (gen_opacity_reduction(&spec)?, "opacity"),
                KindArg::Adiag => (gen_adiag_reduction(&spec)?, "adiag"),
            };
            let dir = dir.unwrap_or_else(|| PathBuf::from(format!("reduction-{name}")));
            let path = write_system(&dir, &generated.system)?;
            let machine = dir.join("machine.tm");
            fs::write(&machine, file.serialize()).map_err(CliError::io(&machine))?;
            let sys = &generated.system;
            writeln!(
                out,
                "wrote {} modules in {} fragments to {}",
                sys.len(),
                generated.inventory.len(),
                path.display()
            )
            .map_err(stdout)?;
            writeln!(out, "machine accepts: {}", spec.accepts()?).map_err(stdout)?;
            for entry in &generated.inventory {
                let names: Vec<&str> = entry
                    .modules
                    .clone()
                    .map(|m| sys.module(m).name())
                    .collect();
                writeln!(out, "fragment {}: {}", entry.fragment, names.join(" "))
                    .map_err(stdout)?;
            }
            Ok(0)
        }
        Command::Validate {
            input,
            strict,
            budget,
        } => {
            let sys = load_system(&input)?;
            inventory(&sys, out)?;
            let report = validate_system(&sys, budget)?;
            writeln!(out, "deadlock-free: {}", yes(report.deadlock_free())).map_err(stdout)?;
            if let Some(s) = &report.deadlock {
                writeln!(out, "  deadlock state: {s}").map_err(stdout)?;
            }
            writeln!(
                out,
                "no unobservable loop: {}",
                yes(report.no_unobservable_loop())
            )
            .map_err(stdout)?;
            if let Some(cycle) = &report.unobservable_cycle {
                let steps: Vec<String> = cycle
                    .iter()
                    .map(|(s, e, t)| format!("{s} -{e}-> {t}"))
                    .collect();
                writeln!(out, "  loop: {}", steps.join(", ")).map_err(stdout)?;
            }
            Ok(if strict && !report.is_valid() { 2 } else { 0 })
        }
    }
}

fn run_check(property: Property, args: &CheckArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let sys = load_system(&args.input)?;
    let q = PropertyQuery::new(property, args.engine.into()).with_budget(args.budget);
    let result = check(&sys, &q)?;
    write!(out, "{}", emit_report(&result, args.json, args.witness)).map_err(stdout)?;
    Ok(if result.verdict.holds() { 0 } else { 1 })
}

/// One line per module: name, sizes and the module's own assumption status.
fn inventory(sys: &ModularSystem, out: &mut dyn Write) -> Result<(), CliError> {
    writeln!(out, "modules: {}", sys.len()).map_err(stdout)?;
    for m in sys.modules() {
        let local = validate_des(m);
        writeln!(
            out,
            "  {}: {} states, {} events ({} unobservable), {} transitions, {} initial, {} marked{}",
            m.name(),
            m.num_states(),
            m.alphabet().len(),
            m.alphabet().unobservable().count(),
            m.transitions().len(),
            m.initial().len(),
            m.marked().count(),
            if local.is_valid() {
                ""
            } else {
                ", fails a standing assumption on its own"
            }
        )
        .map_err(stdout)?;
    }
    Ok(())
}

fn yes(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn stdout(e: std::io::Error) -> CliError {
    CliError::Io {
        path: PathBuf::from("<stdout>"),
        source: e,
    }
}
