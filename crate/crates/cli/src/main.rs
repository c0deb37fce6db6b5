use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spinflip_core::config::{PathChoice, RunConfig, SCHEMA_HELP};
use spinflip_core::figures::{self, Figure};
use spinflip_core::table::{to_csv_string, write_csv_file};
use spinflip_core::{
    material_presets, Error, MaterialModel, MaterialVariant, Spacing, SpinOrientation, SweepAxis,
    SweepSpec, SweepTable,
};

#[derive(Parser, Debug)]
#[command(
    name = "spinflip",
    version,
    about = "Spin-flip lifetimes of atoms above superconducting thin films"
)]
struct Cli {
    /// JSON run configuration (run `spinflip materials --schema` for the format)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (sweep, screening) or directory (reproduce)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Relative quadrature tolerance
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Suppress notes on stderr
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate one lifetime and print it as key=value lines
    Rate(StackArgs),
    /// Run a sweep and write CSV
    Sweep {
        #[command(flatten)]
        stack: StackArgs,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Screening factor S(d) over a log-spaced thickness grid
    Screening {
        #[command(flatten)]
        stack: StackArgs,
        /// Smallest thickness, m
        #[arg(long, default_value_t = 1e-9)]
        min: f64,
        /// Largest thickness, m
        #[arg(long, default_value_t = 1e-5)]
        max: f64,
        #[arg(long, default_value_t = 41)]
        points: usize,
    },
    /// List material presets
    Materials {
        /// Print the configuration schema instead
        #[arg(long)]
        schema: bool,
    },
    /// Run the canonical configurations of a figure, one CSV per curve
    Reproduce {
        #[arg(value_enum)]
        figure: FigureArg,
    },
}

#[derive(Args, Debug, Default)]
struct StackArgs {
    /// Film material label
    #[arg(long)]
    film: Option<String>,
    /// Film thickness, m
    #[arg(long)]
    thickness: Option<f64>,
    /// Substrate material label
    #[arg(long)]
    substrate: Option<String>,
    /// Drop the film and use the bare substrate
    #[arg(long)]
    bare: bool,
    /// Atom height above the surface, m
    #[arg(long)]
    z: Option<f64>,
    /// Temperature, K
    #[arg(long)]
    temperature: Option<f64>,
    /// Transition frequency, Hz
    #[arg(long)]
    frequency: Option<f64>,
    #[arg(long, value_enum)]
    path: Option<PathArg>,
    #[arg(long, value_enum)]
    orientation: Option<OrientationArg>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long, value_enum)]
    axis: Option<AxisArg>,
    #[arg(long)]
    min: Option<f64>,
    #[arg(long)]
    max: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    #[arg(long, value_enum)]
    spacing: Option<SpacingArg>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FigureArg {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum PathArg {
    Auto,
    Isotropic,
    Anisotropic,
    General,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum OrientationArg {
    Random,
    Parallel,
    Perpendicular,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum AxisArg {
    Z,
    D,
    T,
    TOverTc,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SpacingArg {
    Linear,
    Log,
}

/// Exit status 1: bad invocation or configuration; 2: the computation failed.
enum Failure {
    Usage(String),
    Compute(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::UnknownMaterial(_) | Error::Io { .. } => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Compute(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            if cli.config.is_some() {
                eprintln!("\n{SCHEMA_HELP}");
            }
            ExitCode::from(1)
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Rate(args) => cmd_rate(cli, args),
        Command::Sweep { stack, sweep } => cmd_sweep(cli, stack, sweep),
        Command::Screening {
            stack,
            min,
            max,
            points,
        } => {
            let mut cfg = build_config(cli, stack)?;
            cfg.sweep = Some(SweepSpec::new(
                SweepAxis::ThicknessD,
                *min,
                *max,
                *points,
                Spacing::Log,
            ));
            cfg.validate()?;
            validity_note(cli, &cfg);
            let table = cfg.run_sweep()?;
            emit_table(&table, cli.out.as_deref().or(cfg.output.as_deref()))
        }
        Command::Materials { schema } => {
            if *schema {
                println!("{SCHEMA_HELP}");
            } else {
                print_materials();
            }
            Ok(())
        }
        Command::Reproduce { figure } => cmd_reproduce(cli, *figure),
    }
}

/// Configuration from `--config` (if any) with command-line overrides on top;
/// without a file the default is 1 um of niobium on copper, z = 10 um, 4.2 K.
fn build_config(cli: &Cli, args: &StackArgs) -> Result<RunConfig, Failure> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::film_on_substrate("niobium", 1e-6, "copper", 1e-5, 4.2),
    };
    let has_film = cfg.stack.len() > 1;
    if let Some(film) = &args.film {
        if has_film {
            cfg.stack[0].material = film.clone();
        } else {
            cfg.stack.insert(
                0,
                spinflip_core::config::LayerConfig::new(film, Some(args.thickness.unwrap_or(1e-6))),
            );
        }
    }
    if let Some(d) = args.thickness {
        if cfg.stack.len() < 2 {
            return Err(Failure::Usage(
                "--thickness needs a film (use --film)".into(),
            ));
        }
        cfg.stack[0].thickness = Some(d);
    }
    if let Some(sub) = &args.substrate {
        cfg.stack
            .last_mut()
            .expect("validated stack is non-empty")
            .material = sub.clone();
    }
    if args.bare {
        let sub = cfg.stack.pop().expect("validated stack is non-empty");
        cfg.stack = vec![sub];
    }
    if let Some(z) = args.z {
        cfg.atom_height = z;
    }
    if let Some(t) = args.temperature {
        cfg.temperature = t;
    }
    if let Some(f) = args.frequency {
        cfg.transition.frequency = f;
    }
    if let Some(p) = args.path {
        cfg.rate_path = match p {
            PathArg::Auto => PathChoice::Auto,
            PathArg::Isotropic => PathChoice::Isotropic,
            PathArg::Anisotropic => PathChoice::Anisotropic,
            PathArg::General => PathChoice::General,
        };
    }
    if let Some(o) = args.orientation {
        cfg.orientation = match o {
            OrientationArg::Random => SpinOrientation::Random,
            OrientationArg::Parallel => SpinOrientation::Parallel,
            OrientationArg::Perpendicular => SpinOrientation::Perpendicular,
        };
    }
    if let Some(tol) = cli.tol {
        cfg.quadrature.rel_tol = tol;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_rate(cli: &Cli, args: &StackArgs) -> Result<(), Failure> {
    let cfg = build_config(cli, args)?;
    validity_note(cli, &cfg);
    let setup = cfg.setup()?;
    let r = setup.rate()?;
    let path = setup.path.resolve(&setup.stack, &setup.transition);
    let mut out = String::new();
    let mut kv = |k: &str, v: String| out.push_str(&format!("{k}={v}\n"));
    kv("gamma_field_per_s", format!("{:.16e}", r.gamma_field));
    kv("n_th", format!("{:.16e}", r.n_th));
    kv("gamma_total_per_s", format!("{:.16e}", r.gamma_total));
    kv("tau_s", format!("{:.16e}", r.tau));
    kv("rate_path", format!("{path:?}"));
    kv("evaluations", r.diagnostics.evaluations.to_string());
    kv(
        "truncation_eta_per_m",
        format!("{:e}", r.diagnostics.truncation_eta),
    );
    kv("est_error", format!("{:e}", r.diagnostics.est_error));
    print!("{out}");
    if !cli.quiet {
        for w in &r.warnings {
            eprintln!("warning: {w}");
        }
    }
    Ok(())
}

fn cmd_sweep(cli: &Cli, stack: &StackArgs, sweep: &SweepArgs) -> Result<(), Failure> {
    let mut cfg = build_config(cli, stack)?;
    let mut spec = cfg.sweep.unwrap_or(SweepSpec::new(
        SweepAxis::DistanceZ,
        1e-6,
        1e-4,
        41,
        Spacing::Log,
    ));
    if let Some(a) = sweep.axis {
        spec.axis = match a {
            AxisArg::Z => SweepAxis::DistanceZ,
            AxisArg::D => SweepAxis::ThicknessD,
            AxisArg::T => SweepAxis::TemperatureT,
            AxisArg::TOverTc => SweepAxis::ReducedTOverTc,
        };
    }
    if let Some(v) = sweep.min {
        spec.range.min = v;
    }
    if let Some(v) = sweep.max {
        spec.range.max = v;
    }
    if let Some(v) = sweep.points {
        spec.range.points = v;
    }
    if let Some(s) = sweep.spacing {
        spec.range.spacing = match s {
            SpacingArg::Linear => Spacing::Linear,
            SpacingArg::Log => Spacing::Log,
        };
    }
    cfg.sweep = Some(spec);
    cfg.validate()?;
    validity_note(cli, &cfg);
    let table = cfg.run_sweep()?;
    let failed = table.rows.iter().filter(|r| !r.status.is_ok()).count();
    if failed > 0 && !cli.quiet {
        eprintln!(
            "warning: {failed} of {} rows failed; see the status column",
            table.rows.len()
        );
    }
    emit_table(&table, cli.out.as_deref().or(cfg.output.as_deref()))
}

fn emit_table(table: &SweepTable, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(path) => Ok(write_csv_file(table, path)?),
        None => {
            let text = to_csv_string(table)?;
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| Failure::Compute(e.to_string()))
        }
    }
}

fn cmd_reproduce(cli: &Cli, figure: FigureArg) -> Result<(), Failure> {
    let fig = match figure {
        FigureArg::Fig2 => Figure::Fig2,
        FigureArg::Fig3 => Figure::Fig3,
        FigureArg::Fig4 => Figure::Fig4,
        FigureArg::Fig5 => Figure::Fig5,
    };
    let dir = cli
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("figures_out"));
    let quadrature = cli
        .tol
        .map(|t| spinflip_core::QuadratureSettings::default().with_rel_tol(t));
    let paths = figures::reproduce(fig, &dir, quadrature)?;
    for p in paths {
        println!("{}", p.display());
    }
    Ok(())
}

fn validity_note(cli: &Cli, cfg: &RunConfig) {
    if cli.quiet {
        return;
    }
    for layer in &cfg.stack {
        let Ok(m) = cfg.material(&layer.material) else {
            continue;
        };
        let (Some(tc), Some(v)) = (m.tc(), m.validity.as_ref()) else {
            continue;
        };
        if cfg.temperature < tc {
            eprintln!(
                "note: {} is treated in the Meissner state: valid for fields below {} mT (quoted at {} K) \
                 and frequencies far below {:e} Hz",
                m.label,
                v.first_critical_field * 1e3,
                v.critical_field_temperature,
                v.gap_frequency
            );
        }
    }
}

fn print_materials() {
    for m in material_presets() {
        println!("{}", m.label);
        println!("  {}", describe(&m));
        if let Some(v) = &m.validity {
            println!(
                "  validity: Hc1 = {} mT at {} K, gap frequency = {:e} Hz",
                v.first_critical_field * 1e3,
                v.critical_field_temperature,
                v.gap_frequency
            );
        }
    }
}

fn describe(m: &MaterialModel) -> String {
    match &m.variant {
        MaterialVariant::Vacuum => "vacuum (eps = 1)".into(),
        MaterialVariant::DrudeMetal(p) => format!("drude_metal: sigma = {:e} S/m", p.sigma),
        MaterialVariant::IsotropicSc(p) => format!(
            "isotropic_sc: lambda0 = {:e} m, Tc = {} K, sigma_normal = {:e} S/m, alpha = {}",
            p.lambda0, p.tc, p.sigma_normal, p.alpha
        ),
        MaterialVariant::UniaxialSc(p) => format!(
            "uniaxial_sc: in-plane lambda0 = {:e} m, sigma_normal = {:e} S/m; \
             out-of-plane lambda0 = {:e} m, sigma_normal = {:e} S/m; Tc = {} K, alpha = {}",
            p.transverse.lambda0,
            p.transverse.sigma_normal,
            p.longitudinal.lambda0,
            p.longitudinal.sigma_normal,
            p.transverse.tc,
            p.transverse.alpha
        ),
    }
}
