use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use kings::csvfmt::fixed;
use kings::majorana::constellation_from_state;
use kings::metrology::{
    axis_scan, facet_normals, format_spin, kings_formula, noon_formula, omega_grid, rotational_order,
    sensitivity, sensitivity_csv, small_angle_sensitivity, vertex_axes, SensitivityRow,
};
use kings::multipole::{cumulative_csv, multipoles_with, TensorTable};
use kings::search::{find_king, SearchConfig};
use kings::spin::{coherent_state, noon_state, RotationAxis, SpinState};

/// Relative `--output` paths are resolved against this directory when set.
const OUT_DIR_VAR: &str = "KINGS_OUT_DIR";

#[derive(Parser)]
#[command(name = "kings", version, about = "Spin states with maximal rotational sensitivity")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a state and write it as JSON.
    State(StateArgs),
    /// Majorana constellation of a state file.
    Constellation(ConstellationArgs),
    /// Multipole spectrum and cumulative A_M table.
    Multipoles(MultipoleArgs),
    /// Symmetry axes through Majorana points and hull facets.
    Axes(AxesArgs),
    /// Projection probability after rotations about given axes.
    Scan(ScanArgs),
    /// Rotation sensitivity for King or NOON families.
    Sensitivity(SensitivityArgs),
    /// Numerical search for maximally anticoherent states.
    Search(SearchArgs),
}

#[derive(Args)]
struct Output {
    /// Write here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum StateKind {
    Coherent,
    Noon,
    King,
    Custom,
}

#[derive(Args)]
struct StateArgs {
    #[arg(long, value_enum)]
    kind: StateKind,
    /// Twice the spin.
    #[arg(long)]
    two_s: u32,
    /// Polar angle of a coherent state.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    theta: f64,
    /// Azimuth of a coherent state.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    phi: f64,
    /// Real parts of custom amplitudes, m = S first.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    re: Vec<f64>,
    /// Imaginary parts of custom amplitudes (zero if omitted).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    im: Vec<f64>,
    #[command(flatten)]
    out: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConstellationFormat {
    Json,
    Csv,
}

#[derive(Args)]
struct ConstellationArgs {
    /// State JSON file.
    state: PathBuf,
    #[arg(long, value_enum, default_value = "json")]
    format: ConstellationFormat,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct MultipoleArgs {
    state: PathBuf,
    /// Highest multipole order computed (default 2S).
    #[arg(long)]
    max_order: Option<u32>,
    /// Also write the spectrum JSON here.
    #[arg(long)]
    spectrum: Option<PathBuf>,
    #[command(flatten)]
    out: Output,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum AxisKind {
    Vertex,
    Facet,
    Both,
}

#[derive(Args)]
struct AxesArgs {
    state: PathBuf,
    #[arg(long, value_enum, default_value = "both")]
    kind: AxisKind,
    /// Keep at most this many axes of each kind.
    #[arg(long)]
    limit: Option<usize>,
    /// Largest rotational order tested.
    #[arg(long, default_value_t = 12)]
    max_fold: u32,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct ScanArgs {
    state: PathBuf,
    /// CSV with `theta_cap` and `phi_cap` columns.
    #[arg(long)]
    axes: Option<PathBuf>,
    /// Extra axis as `THETA,PHI`; repeatable.
    #[arg(long = "axis", value_parser = parse_axis, allow_negative_numbers = true)]
    axis: Vec<RotationAxis>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    omega_min: f64,
    #[arg(long, default_value_t = 2.0 * PI, allow_negative_numbers = true)]
    omega_max: f64,
    /// Number of grid intervals; the grid has steps + 1 points.
    #[arg(long, default_value_t = 360)]
    omega_steps: usize,
    #[command(flatten)]
    out: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Kings,
    Noon,
}

#[derive(Args)]
struct SensitivityArgs {
    #[arg(long, value_enum)]
    family: Family,
    /// Values of 2S as `LO..HI` (inclusive) or a comma list.
    #[arg(long, value_parser = parse_range)]
    two_s: TwoSRange,
    /// Polar angle of the rotation axis.
    #[arg(long, default_value_t = 0.0)]
    theta_cap: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    phi_cap: f64,
    /// Use this many random axes per spin instead of the fixed one.
    #[arg(long)]
    random_axes: Option<usize>,
    /// Rotation angle of the numeric evaluation.
    #[arg(long, default_value_t = 1e-4)]
    omega: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long)]
    two_s: u32,
    /// Target anticoherence order.
    #[arg(long)]
    order: u32,
    #[arg(long, default_value_t = 64)]
    restarts: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2000)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Impose a k-fold symmetry axis along z.
    #[arg(long)]
    symmetry: Option<u32>,
    /// Restrict to real amplitudes (a mirror plane through z).
    #[arg(long)]
    mirror: bool,
    #[command(flatten)]
    out: Output,
}

#[derive(Clone, Debug)]
struct TwoSRange(Vec<u32>);

fn parse_range(s: &str) -> Result<TwoSRange, String> {
    let bad = |_| format!("invalid 2S list '{s}'");
    let values: Vec<u32> = if let Some((lo, hi)) = s.split_once("..") {
        let (lo, hi): (u32, u32) = (lo.trim().parse().map_err(bad)?, hi.trim().parse().map_err(bad)?);
        (lo..=hi).collect()
    } else {
        s.split(',').map(|v| v.trim().parse().map_err(bad)).collect::<Result<_, _>>()?
    };
    if values.is_empty() || values.iter().any(|&v| v < 2) {
        return Err(format!("2S values must be at least 2 in '{s}'"));
    }
    Ok(TwoSRange(values))
}

fn parse_axis(s: &str) -> Result<RotationAxis, String> {
    let (t, p) = s.split_once(',').ok_or_else(|| format!("axis must be THETA,PHI, got '{s}'"))?;
    let t: f64 = t.trim().parse().map_err(|_| format!("bad polar angle in '{s}'"))?;
    let p: f64 = p.trim().parse().map_err(|_| format!("bad azimuth in '{s}'"))?;
    Ok(RotationAxis::new(t, p))
}

/// Error with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    fn numeric(message: impl Into<String>) -> Self {
        Self {
            code: 3,
            message: message.into(),
        }
    }
}

impl From<kings::Error> for Failure {
    fn from(e: kings::Error) -> Self {
        match e {
            kings::Error::ZeroVariance | kings::Error::ZeroAngle => Failure::numeric(e.to_string()),
            _ => Failure::input(e.to_string()),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::State(a) => cmd_state(a),
        Command::Constellation(a) => cmd_constellation(a),
        Command::Multipoles(a) => cmd_multipoles(a),
        Command::Axes(a) => cmd_axes(a),
        Command::Scan(a) => cmd_scan(a),
        Command::Sensitivity(a) => cmd_sensitivity(a),
        Command::Search(a) => cmd_search(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("kings: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn resolve(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_VAR) {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn write_to(path: &Path, text: &str) -> CmdResult {
    let path = resolve(path);
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)
            .map_err(|e| Failure::input(format!("cannot create {}: {e}", parent.display())))?;
    }
    std::fs::write(&path, text).map_err(|e| Failure::input(format!("cannot write {}: {e}", path.display())))
}

fn emit(out: &Output, text: &str) -> CmdResult {
    match &out.output {
        Some(path) => write_to(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn with_newline(mut s: String) -> String {
    if !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn read_text(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))
}

fn read_state(path: &Path) -> Result<SpinState, Failure> {
    SpinState::from_json(&read_text(path)?)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn cmd_state(a: StateArgs) -> CmdResult {
    let state = match a.kind {
        StateKind::Coherent => coherent_state(a.two_s, a.theta, a.phi),
        StateKind::Noon => noon_state(a.two_s),
        StateKind::King => kings::reference::king(a.two_s)?,
        StateKind::Custom => {
            if !a.im.is_empty() && a.im.len() != a.re.len() {
                return Err(Failure::input("--im must have as many entries as --re"));
            }
            let amps = (0..a.re.len())
                .map(|i| Complex64::new(a.re[i], a.im.get(i).copied().unwrap_or(0.0)))
                .collect();
            SpinState::new(a.two_s, amps)?
        }
    };
    emit(&a.out, &with_newline(state.to_json()))
}

fn cmd_constellation(a: ConstellationArgs) -> CmdResult {
    let con = constellation_from_state(&read_state(&a.state)?);
    let text = match a.format {
        ConstellationFormat::Json => with_newline(con.to_json()),
        ConstellationFormat::Csv => con.to_csv(),
    };
    emit(&a.out, &text)
}

fn cmd_multipoles(a: MultipoleArgs) -> CmdResult {
    let state = read_state(&a.state)?;
    let k_max = a.max_order.unwrap_or(state.two_s());
    if k_max == 0 || k_max > state.two_s() {
        return Err(Failure::input(format!(
            "--max-order must be in 1..={}, got {k_max}",
            state.two_s()
        )));
    }
    let spectrum = multipoles_with(&TensorTable::new(state.two_s(), k_max), &state);
    if let Some(path) = &a.spectrum {
        write_to(path, &with_newline(spectrum.to_json()))?;
    }
    emit(&a.out, &cumulative_csv(&spectrum))
}

fn cmd_axes(a: AxesArgs) -> CmdResult {
    let state = read_state(&a.state)?;
    let con = constellation_from_state(&state);
    let mut rows: Vec<(&str, RotationAxis)> = Vec::new();
    let limit = a.limit.unwrap_or(usize::MAX);
    if a.kind != AxisKind::Facet {
        rows.extend(vertex_axes(&con).into_iter().take(limit).map(|x| ("vertex", x)));
    }
    if a.kind != AxisKind::Vertex {
        rows.extend(facet_normals(&con).into_iter().take(limit).map(|x| ("facet", x)));
    }
    let mut out = String::from("axis_index,kind,theta_cap,phi_cap,fold\n");
    for (i, (kind, axis)) in rows.iter().enumerate() {
        let fold = rotational_order(&state, *axis, a.max_fold, 1e-8);
        writeln!(out, "{i},{kind},{},{},{fold}", fixed(axis.theta_cap), fixed(axis.phi_cap)).unwrap();
    }
    emit(&a.out, &out)
}

fn read_axes(path: &Path) -> Result<Vec<RotationAxis>, Failure> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?
        .clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| Failure::input(format!("{}: missing column {name}", path.display())))
    };
    let (ti, pi) = (column("theta_cap")?, column("phi_cap")?);
    let mut axes = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
        let field = |i: usize| -> Result<f64, Failure> {
            record
                .get(i)
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| Failure::input(format!("{}: bad number on row {}", path.display(), line + 1)))
        };
        axes.push(RotationAxis::new(field(ti)?, field(pi)?));
    }
    Ok(axes)
}

fn cmd_scan(a: ScanArgs) -> CmdResult {
    if !(a.omega_min.is_finite() && a.omega_max.is_finite()) || a.omega_max < a.omega_min {
        return Err(Failure::input("need finite --omega-min <= --omega-max"));
    }
    let mut axes = match &a.axes {
        Some(path) => read_axes(path)?,
        None => Vec::new(),
    };
    axes.extend(a.axis.iter().copied());
    if axes.is_empty() {
        return Err(Failure::input("no axes given; use --axes FILE or --axis THETA,PHI"));
    }
    let state = read_state(&a.state)?;
    let scan = axis_scan(&state, &axes, &omega_grid(a.omega_min, a.omega_max, a.omega_steps));
    emit(&a.out, &scan.to_csv())
}

fn random_axis(rng: &mut ChaCha8Rng) -> RotationAxis {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let phi: f64 = rng.gen_range(0.0..2.0 * PI);
    RotationAxis::new(z.acos(), phi)
}

/// Reference King if one ships; otherwise a searched state whose first two
/// multipole orders vanish, which is all the small-angle formula needs.
fn king_for(two_s: u32) -> Result<SpinState, Failure> {
    if let Ok(state) = kings::reference::king(two_s) {
        return Ok(state);
    }
    let result = find_king(&SearchConfig::new(two_s, 2))?;
    if !result.reached_target {
        return Err(Failure::numeric(format!(
            "no second-order anticoherent state found for S = {}",
            format_spin(two_s)
        )));
    }
    Ok(result.state)
}

fn cmd_sensitivity(a: SensitivityArgs) -> CmdResult {
    if !(a.omega > 0.0) {
        return Err(Failure::input("--omega must be positive; the zero-angle limit is the formula column"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut rows = Vec::new();
    for &two_s in &a.two_s.0 {
        let state = match a.family {
            Family::Kings => king_for(two_s)?,
            Family::Noon => noon_state(two_s),
        };
        let axes: Vec<RotationAxis> = match a.random_axes {
            Some(n) => (0..n).map(|_| random_axis(&mut rng)).collect(),
            None => vec![RotationAxis::new(a.theta_cap, a.phi_cap)],
        };
        for axis in axes {
            // refuse eigenstates of the generator before the finite-angle ratio
            small_angle_sensitivity(&state, axis)?;
            let report = sensitivity(&state, axis, a.omega)?;
            let formula = match a.family {
                Family::Kings => kings_formula(two_s),
                Family::Noon => noon_formula(two_s, axis.theta_cap),
            };
            rows.push(SensitivityRow {
                two_s,
                axis,
                delta_omega_numeric: report.delta_omega,
                delta_omega_formula: formula,
            });
        }
    }
    emit(&a.out, &sensitivity_csv(&rows))
}

fn cmd_search(a: SearchArgs) -> CmdResult {
    let mut config = SearchConfig::new(a.two_s, a.order);
    config.restarts = a.restarts;
    config.rng_seed = a.seed;
    config.max_iters = a.max_iters;
    config.tol = a.tol;
    config.cyclic_symmetry = a.symmetry;
    config.mirror_symmetry = a.mirror;
    let result = find_king(&config)?;
    emit(&a.out, &with_newline(result.to_json()))?;
    if result.reached_target {
        Ok(())
    } else {
        Err(Failure::numeric(format!(
            "target order {} not reached (best objective {:e})",
            a.order, result.objective
        )))
    }
}
