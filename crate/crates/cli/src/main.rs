//! `xbar`: command-line front end for the ladder filter workbench.
//!
//! Failures print one line `error[<class>]: <message>` to stderr and exit
//! with 2 (usage or input), 3 (schema), 4 (solver) or 1 (i/o).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use xbar_core::fit::{compare_table, extract_resonator, fit_mbvd, ExtractOptions, FitProblem};
use xbar_core::io::design_file::MaterialPaths;
use xbar_core::io::{
    load_design, read_response_csv, read_touchstone, save_design, write_response_csv,
    write_touchstone, DesignFile, TouchstoneOptions,
};
use xbar_core::material::MaterialPreset;
use xbar_core::synth::{scale_design, synthesize, FilterOrder, FilterTargets, OobBias, SynthKnobs};
use xbar_core::{
    BandReference, Error, ErrorClass, FilterMetrics, FrequencyGrid, FrequencyResponse,
    MetricsOptions, OobExclusion,
};

#[derive(Parser)]
#[command(name = "xbar", version, about = "XBAR acoustic ladder filter workbench")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Cascade a design over a frequency grid and write its S-parameters.
    Simulate(SimulateArgs),
    /// Filter metrics of a sampled response (.csv or Touchstone).
    Metrics(MetricsArgs),
    /// Synthesize and realize a ladder for a centre frequency and bandwidth.
    Synth(SynthArgs),
    /// Fit mBVD parameters of a design to measured S-parameters.
    Fit(FitArgs),
    /// Frequency-scale a design through film thickness.
    Scale(ScaleArgs),
    /// Resonance parameters of a single resonator measurement.
    Extract(ExtractArgs),
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    design: PathBuf,
    #[arg(long, default_value_t = 1e9)]
    fmin: f64,
    #[arg(long, default_value_t = 40e9)]
    fmax: f64,
    #[arg(long, default_value_t = 1e7)]
    step: f64,
    /// Response CSV (Hz, complex S-parameters, IL and RL in dB).
    #[arg(long)]
    out: PathBuf,
    /// Also write a Touchstone file (Hz, RI).
    #[arg(long)]
    touchstone: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FbwRef {
    Peak,
    Absolute,
}

#[derive(Clone, Copy, ValueEnum)]
enum Exclusion {
    FirstTz,
    Band20,
}

#[derive(Args)]
struct MetricsArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Reference level of the 20 dB band.
    #[arg(long, value_enum, default_value_t = FbwRef::Peak)]
    fbw_ref: FbwRef,
    /// Minimum IL (dB) of a transmission zero.
    #[arg(long, default_value_t = 30.0)]
    tz_threshold: f64,
    /// Region kept out of the out-of-band search.
    #[arg(long, value_enum, default_value_t = Exclusion::FirstTz)]
    oob_exclusion: Exclusion,
    /// Half-width of the out-of-band window, in 3 dB bandwidths.
    #[arg(long, default_value_t = 10.0)]
    oob_span: f64,
    /// Reference impedance for CSV input.
    #[arg(long, default_value_t = 50.0)]
    z0: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Order {
    #[value(name = "3")]
    Three,
    #[value(name = "8")]
    Eight,
}

#[derive(Clone, Copy, ValueEnum)]
enum Bias {
    Lower,
    Selectivity,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    fc: f64,
    #[arg(long)]
    fbw: f64,
    #[arg(long, value_enum)]
    order: Order,
    /// Extra-TZ strategy for the three-element ladder.
    #[arg(long, value_enum)]
    oob_bias: Option<Bias>,
    /// Directory with k2_anchors.csv, dispersion.csv, capacitance.csv;
    /// missing files fall back to the built-in tables for the order.
    #[arg(long)]
    material: Option<PathBuf>,
    /// Unmilled film thickness (nm).
    #[arg(long)]
    base_t: Option<u32>,
    /// Trim depths (nm) fixed by an earlier process run, e.g. 7,9.
    #[arg(long, value_delimiter = ',')]
    trim_steps: Option<Vec<u32>>,
    /// Skip the physical realization and material feasibility.
    #[arg(long, conflicts_with_all = ["material", "base_t", "trim_steps"])]
    no_realize: bool,
    #[arg(long, default_value_t = 50.0)]
    z0: f64,
    #[arg(long)]
    out: PathBuf,
    /// Refinement trace CSV.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct FitArgs {
    /// Measured two-port (.csv or Touchstone).
    #[arg(long)]
    data: PathBuf,
    /// Initial design; its labels define which stages share parameters.
    #[arg(long)]
    init: PathBuf,
    /// Fit window in Hz, `lo:hi`.
    #[arg(long, value_parser = parse_range)]
    band: Option<(f64, f64)>,
    /// Iteration limit of the local solver.
    #[arg(long, default_value_t = 200)]
    max_iter: usize,
    #[arg(long)]
    out: PathBuf,
    /// Design vs fitted parameter table (CSV).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct ScaleArgs {
    #[arg(long)]
    design: PathBuf,
    #[arg(long)]
    factor: f64,
    /// Material directory overriding the design's own material block.
    #[arg(long)]
    material: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ExtractArgs {
    /// One-port-in-series measurement (.csv or Touchstone).
    #[arg(long)]
    data: PathBuf,
    /// Off-resonance window for the c0 estimate, as fractions of fs.
    #[arg(long, value_parser = parse_range, default_value = "0.5:0.8")]
    c0_window: (f64, f64),
    #[arg(long, default_value_t = 50.0)]
    z0: f64,
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected `lo:hi`, got `{s}`"))?;
    let lo: f64 = a.trim().parse().map_err(|_| format!("bad number `{a}`"))?;
    let hi: f64 = b.trim().parse().map_err(|_| format!("bad number `{b}`"))?;
    if !(lo < hi) {
        return Err(format!("need lo < hi, got {lo}:{hi}"));
    }
    Ok((lo, hi))
}

fn read_response(path: &Path, z0: f64) -> xbar_core::Result<FrequencyResponse> {
    let is_csv = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"));
    if is_csv {
        read_response_csv(path, z0)
    } else {
        read_touchstone(path)
    }
}

fn print_report(lines: &[(String, String)]) {
    for (k, v) in lines {
        println!("{k}={v}");
    }
}

fn write_text(path: &Path, text: &str) -> xbar_core::Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn base_dir(path: &Path) -> &Path {
    path.parent().unwrap_or(Path::new("."))
}

fn simulate(a: &SimulateArgs) -> xbar_core::Result<()> {
    let file = load_design(&a.design)?;
    let grid = FrequencyGrid::uniform(a.fmin, a.fmax, a.step)?;
    let resp = file.design.cascade(&grid);
    write_response_csv(&resp, &a.out)?;
    if let Some(ts) = &a.touchstone {
        let opts = TouchstoneOptions {
            z0: file.design.z0,
            ..TouchstoneOptions::default()
        };
        write_touchstone(&resp, ts, &opts)?;
    }
    Ok(())
}

fn metrics(a: &MetricsArgs) -> xbar_core::Result<()> {
    let resp = read_response(&a.input, a.z0)?;
    let opts = MetricsOptions {
        tz_threshold_db: a.tz_threshold,
        fbw20_reference: match a.fbw_ref {
            FbwRef::Peak => BandReference::Peak,
            FbwRef::Absolute => BandReference::Absolute,
        },
        oob_exclusion: match a.oob_exclusion {
            Exclusion::FirstTz => OobExclusion::FirstTz,
            Exclusion::Band20 => OobExclusion::Band20,
        },
        oob_span_bw: a.oob_span,
    };
    let m = FilterMetrics::compute(&resp, &resp, &opts)?;
    print_report(&m.report());
    Ok(())
}

/// Absolute path of `dir/name` when that file exists.
fn table_path(dir: &Path, name: &str) -> xbar_core::Result<Option<String>> {
    let p = dir.join(name);
    if !p.exists() {
        return Ok(None);
    }
    let abs = std::fs::canonicalize(&p).map_err(|e| Error::io(&p, e))?;
    Ok(Some(abs.to_string_lossy().into_owned()))
}

fn synth(a: &SynthArgs) -> xbar_core::Result<()> {
    let (order, preset) = match a.order {
        Order::Three => (FilterOrder::ThreeElement, MaterialPreset::ThreeElement),
        Order::Eight => (FilterOrder::EightElement, MaterialPreset::EightElement),
    };
    let targets = FilterTargets {
        fc: a.fc,
        fbw: a.fbw,
        z0: a.z0,
        order,
        oob_bias: a.oob_bias.map(|b| match b {
            Bias::Lower => OobBias::LowerRejection,
            Bias::Selectivity => OobBias::Selectivity,
        }),
    };
    let mut knobs = SynthKnobs::for_order(order);
    let mut paths = MaterialPaths {
        preset: Some(preset),
        ..MaterialPaths::default()
    };
    if a.no_realize {
        knobs.material = None;
    } else {
        let mut m = preset.model();
        if let Some(dir) = &a.material {
            m = m.overlay_dir(dir)?;
            paths.k2_anchors = table_path(dir, "k2_anchors.csv")?;
            paths.dispersion = table_path(dir, "dispersion.csv")?;
            paths.capacitance = table_path(dir, "capacitance.csv")?;
        }
        if let Some(base) = a.base_t {
            m.base_t_nm = base;
        }
        if let Some(steps) = &a.trim_steps {
            m.fixed_steps = Some(steps.clone());
        }
        paths.base_t_nm = Some(m.base_t_nm);
        knobs.material = Some(m);
    }
    let result = synthesize(&targets, &knobs)?;
    let file = DesignFile {
        design: result.design.clone(),
        physical: result.realization.clone(),
        material: Some(paths),
    };
    save_design(&file, &a.out)?;
    if let Some(trace) = &a.trace {
        write_text(trace, &result.trace_csv())?;
    }
    print_report(&result.achieved.report());
    println!("passes={}", result.passes);
    println!("converged={}", result.converged);
    Ok(())
}

fn fit(a: &FitArgs) -> xbar_core::Result<()> {
    let init = load_design(&a.init)?;
    let data = read_response(&a.data, init.design.z0)?;
    let mut problem = FitProblem::new(data, init.design.clone());
    problem.fit_band = a.band;
    problem.lm.max_iter = a.max_iter;
    let result = fit_mbvd(&problem)?;
    let table = compare_table(&init.design, &result.design, None)?;
    let out = DesignFile {
        design: result.design.clone(),
        physical: Default::default(),
        material: init.material.clone(),
    };
    save_design(&out, &a.out)?;
    if let Some(report) = &a.report {
        write_text(report, &table.to_csv())?;
    }
    print!("{}", table.to_text());
    print_report(&result.report());
    Ok(())
}

fn scale(a: &ScaleArgs) -> xbar_core::Result<()> {
    let file = load_design(&a.design)?;
    let dir = base_dir(&a.design);
    let mut m = match &file.material {
        Some(paths) => paths.load(dir)?,
        None => MaterialPreset::ThreeElement.model(),
    };
    if let Some(mdir) = &a.material {
        m = m.overlay_dir(mdir)?;
    }
    let real = (!file.physical.is_empty()).then_some(&file.physical);
    let (design, physical) = scale_design(&file.design, real, a.factor, &m)?;
    let out = DesignFile {
        design,
        physical: physical.unwrap_or_default(),
        material: file.material.clone(),
    };
    save_design(&out, &a.out)
}

fn extract(a: &ExtractArgs) -> xbar_core::Result<()> {
    let resp = read_response(&a.data, a.z0)?;
    let opts = ExtractOptions {
        c0_window: a.c0_window,
    };
    print_report(&extract_resonator(&resp, &opts)?.report());
    Ok(())
}

fn exit_code(class: ErrorClass) -> u8 {
    match class {
        ErrorClass::Input => 2,
        ErrorClass::Schema => 3,
        ErrorClass::Solver => 4,
        ErrorClass::Io => 1,
    }
}

fn class_name(class: ErrorClass) -> &'static str {
    match class {
        ErrorClass::Input => "input",
        ErrorClass::Schema => "schema",
        ErrorClass::Solver => "solver",
        ErrorClass::Io => "io",
    }
}

fn one_line(msg: &str) -> String {
    msg.split_whitespace().collect::<Vec<_>>().join(" ")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("");
            let msg = first.strip_prefix("error: ").unwrap_or(first);
            eprintln!("error[usage]: {}", one_line(msg));
            return ExitCode::from(2);
        }
    };
    let run = match &cli.cmd {
        Cmd::Simulate(a) => simulate(a),
        Cmd::Metrics(a) => metrics(a),
        Cmd::Synth(a) => synth(a),
        Cmd::Fit(a) => fit(a),
        Cmd::Scale(a) => scale(a),
        Cmd::Extract(a) => extract(a),
    };
    match run {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let class = e.class();
            eprintln!("error[{}]: {}", class_name(class), one_line(&e.to_string()));
            ExitCode::from(exit_code(class))
        }
    }
}
