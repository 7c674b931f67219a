//! Command line front end.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::bifurcation::{
    cusp_curves, foldfold_curves, scenario_by_id, svg, sweep_diagram, twofold_curves, CuspFamily,
    GridSpec, TwoFoldFamily, ViFamily,
};
use crate::flow::{Section, TimeDir};
use crate::germ::{fit_map, Chart};
use crate::maps::{mirror_map, transfer_pair, transition_map, Layout, Source};
use crate::polycycle::{classify_solution, solve_all, SyntheticModel};
use crate::sigma::classify;
use crate::system::{FilippovSystem, Side};
use crate::trajectory::{filippov_trajectory, TrajectoryOpts};
use crate::{Error, Result, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "filippov", version, about = "Displacement functions for planar Filippov systems")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub cmd: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// RunConfig JSON; flags below override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Turn near-degenerate classifications into errors.
    #[arg(long, global = true)]
    pub strict: bool,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Jitter seed for the Newton guess lattice; 0 keeps it regular.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Zero threshold for Lie derivatives (default 1e-9).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Integrator tolerances (default 1e-12).
    #[arg(long, global = true)]
    pub rtol: Option<f64>,
    #[arg(long, global = true)]
    pub atol: Option<f64>,
    /// Maximal flight time (default 100).
    #[arg(long, global = true)]
    pub max_time: Option<f64>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SideArg {
    Plus,
    Minus,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Plus => Side::Plus,
            SideArg::Minus => Side::Minus,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum DirArg {
    Forward,
    Backward,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Classify a point of the switching manifold.
    Classify {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_pair)]
        point: [f64; 2],
    },
    /// Filippov trajectory as CSV.
    Flow {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_pair)]
        point: [f64; 2],
        #[arg(long, default_value_t = 10.0)]
        tmax: f64,
        /// Sample spacing of the output.
        #[arg(long)]
        dt_out: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Transition map from Sigma to a section: one value with `--x`, a
    /// fitted germ otherwise.
    Transition {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, value_enum, default_value = "plus")]
        side: SideArg,
        /// anchor_x,anchor_y,dir_x,dir_y,halfwidth
        #[arg(long, allow_hyphen_values = true, value_parser = parse_section)]
        section: Section,
        #[arg(long, value_enum, default_value = "forward")]
        dir: DirArg,
        #[arg(long, allow_hyphen_values = true)]
        x: Option<f64>,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        base: f64,
        #[arg(long, default_value_t = 0.1)]
        window: f64,
        #[arg(long, default_value_t = 2)]
        degree: usize,
        #[arg(long, default_value_t = 24)]
        samples: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mirror map of the arcs of one field.
    Mirror {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        /// Field whose arcs are followed.
        #[arg(long, value_enum, default_value = "plus")]
        field: SideArg,
        /// Half-plane holding the arcs.
        #[arg(long, value_enum, default_value = "minus")]
        side: SideArg,
    },
    /// Transfer germs at a polycycle vertex.
    Germ {
        #[arg(long)]
        system: PathBuf,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_pair)]
        point: [f64; 2],
        #[arg(long, value_enum)]
        unstable: SideArg,
        #[arg(long, value_enum)]
        stable: SideArg,
        #[arg(long, default_value_t = 0.1)]
        window: f64,
        /// Directory receiving tu.json and ts.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the crossing system of a synthetic model.
    PolycycleSolve {
        #[arg(long, conflicts_with = "scenario")]
        model: Option<PathBuf>,
        /// Build the model of a synthetic scenario at `--point`.
        #[arg(long, requires = "point")]
        scenario: Option<String>,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_pair)]
        point: Option<[f64; 2]>,
        /// Write the model JSON that was solved.
        #[arg(long)]
        write_model: Option<PathBuf>,
    },
    /// Curve values of a scenario at one parameter, or traced curves.
    ScenarioCurves {
        #[arg(long)]
        scenario: String,
        #[arg(long, allow_hyphen_values = true)]
        at: Option<f64>,
        /// p1_lo,p1_hi,p2_lo,p2_hi
        #[arg(long, allow_hyphen_values = true, value_parser = parse_ranges)]
        ranges: Option<[(f64, f64); 2]>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep a parameter grid.
    Diagram {
        #[arg(long)]
        scenario: String,
        /// n1xn2
        #[arg(long, value_parser = parse_grid, default_value = "41x41")]
        grid: [usize; 2],
        #[arg(long, allow_hyphen_values = true, value_parser = parse_ranges)]
        ranges: Option<[(f64, f64); 2]>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        svg: bool,
    },
}

fn parse_floats(s: &str, n: usize) -> std::result::Result<Vec<f64>, String> {
    let v: std::result::Result<Vec<f64>, _> = s.split(',').map(|t| t.trim().parse::<f64>()).collect();
    let v = v.map_err(|e| e.to_string())?;
    if v.len() != n {
        return Err(format!("expected {n} comma separated numbers"));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err("values must be finite".into());
    }
    Ok(v)
}

fn parse_pair(s: &str) -> std::result::Result<[f64; 2], String> {
    let v = parse_floats(s, 2)?;
    Ok([v[0], v[1]])
}

fn parse_ranges(s: &str) -> std::result::Result<[(f64, f64); 2], String> {
    let v = parse_floats(s, 4)?;
    if !(v[0] < v[1] && v[2] < v[3]) {
        return Err("ranges need lo < hi".into());
    }
    Ok([(v[0], v[1]), (v[2], v[3])])
}

fn parse_section(s: &str) -> std::result::Result<Section, String> {
    let v = parse_floats(s, 5)?;
    Section::new([v[0], v[1]], [v[2], v[3]], v[4]).map_err(|e| e.to_string())
}

fn parse_grid(s: &str) -> std::result::Result<[usize; 2], String> {
    let (a, b) = s.split_once('x').ok_or("grid must look like 41x41")?;
    let a: usize = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b: usize = b.trim().parse().map_err(|e| format!("{e}"))?;
    if a < 2 || b < 2 {
        return Err("grid resolutions must be at least 2".into());
    }
    Ok([a, b])
}

fn positive(name: &str, v: Option<f64>) -> Result<Option<f64>> {
    match v {
        Some(x) if !(x > 0.0) || !x.is_finite() => {
            Err(Error::InvalidInput(format!("--{name} must be positive, got {x}")))
        }
        v => Ok(v),
    }
}

pub fn build_config(g: &Global) -> Result<RunConfig> {
    let mut cfg = match &g.config {
        Some(p) => RunConfig::from_json(&read(p)?)?,
        None => RunConfig::default(),
    };
    if let Some(v) = positive("tol", g.tol)? {
        cfg.tol = v;
    }
    if let Some(v) = positive("rtol", g.rtol)? {
        cfg.rtol = v;
    }
    if let Some(v) = positive("atol", g.atol)? {
        cfg.atol = v;
    }
    if let Some(v) = positive("max-time", g.max_time)? {
        cfg.max_time = v;
    }
    if g.strict {
        cfg.strict = true;
    }
    if let Some(s) = g.seed {
        cfg.seed = s;
    }
    if let Some(t) = g.threads {
        if t == 0 {
            return Err(Error::InvalidInput("--threads must be at least 1".into()));
        }
        cfg.threads = Some(t);
    }
    for (name, v) in [
        ("tol", cfg.tol),
        ("near_tol", cfg.near_tol),
        ("rtol", cfg.rtol),
        ("atol", cfg.atol),
        ("h_max", cfg.h_max),
        ("max_time", cfg.max_time),
        ("event_tol", cfg.event_tol),
        ("newton_residual", cfg.newton_residual),
        ("merge_tol", cfg.merge_tol),
        ("boundary_tol", cfg.boundary_tol),
    ] {
        if !(v > 0.0) {
            return Err(Error::InvalidInput(format!("{name} must be positive")));
        }
    }
    Ok(cfg)
}

fn read(p: &Path) -> Result<String> {
    fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
}

fn write(p: &Path, s: &str) -> Result<()> {
    fs::write(p, s).map_err(|e| Error::Io(format!("{}: {e}", p.display())))
}

fn load_system(p: &Path) -> Result<FilippovSystem> {
    FilippovSystem::from_json(&read(p)?)
}

fn json_line(v: &Value) -> String {
    let mut s = serde_json::to_string(v).expect("json");
    s.push('\n');
    s
}

fn emit(out: &Option<PathBuf>, s: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(p) => write(p, s),
        None => stdout.write_all(s.as_bytes()).map_err(Error::from),
    }
}

fn with_pool<T: Send>(cfg: &RunConfig, f: impl FnOnce() -> T + Send) -> Result<T> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cfg.threads {
        b = b.num_threads(n);
    }
    let pool = b.build().map_err(|e| Error::InvalidInput(e.to_string()))?;
    Ok(pool.install(f))
}

fn synthetic_at(id: &str, p: [f64; 2]) -> Result<SyntheticModel> {
    match id {
        "cusp-synthetic" => CuspFamily::standard().model(p[0], p[1]),
        "twofold-synthetic" => TwoFoldFamily::standard().model(p[0], p[1]),
        "vi-foldfold-synthetic" => ViFamily::standard().model(p[0], p[1]),
        _ => Err(Error::InvalidInput(format!("'{id}' has no synthetic model"))),
    }
}

fn curve_values(id: &str, v: f64) -> Result<Value> {
    Ok(match id {
        "cusp-synthetic" => serde_json::to_value(cusp_curves(&CuspFamily::standard(), v)?)?,
        "twofold-synthetic" => {
            let (g1, g2) = twofold_curves(&TwoFoldFamily::standard(), v)?;
            json!({"gamma1": g1, "gamma2": g2})
        }
        "vi-foldfold-synthetic" => serde_json::to_value(foldfold_curves(&ViFamily::standard(), v)?)?,
        "vi-foldfold-ode" => {
            let s = crate::bifurcation::circle::CircleScenario::new(&RunConfig::default())?;
            let mut m = serde_json::Map::new();
            for n in crate::bifurcation::vi::VI_CURVES {
                match s.curve(n, v) {
                    Ok(b) => m.insert(n.into(), json!(b)),
                    Err(Error::WrongSign(_)) => m.insert(n.into(), Value::Null),
                    Err(e) => return Err(e),
                };
            }
            Value::Object(m)
        }
        _ => {
            scenario_by_id(id)?;
            unreachable!()
        }
    })
}

/// Runs one command; artifacts go to files or `stdout`.
pub fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    let cfg = build_config(&cli.global)?;
    match cli.cmd {
        Command::Classify { system, point } => {
            let z = load_system(&system)?;
            let sp = classify(&z, point, &cfg)?;
            let mut v = sp.class.to_json();
            if sp.near_degenerate {
                v["near_degenerate"] = json!(true);
            }
            emit(&None, &json_line(&v), stdout)
        }
        Command::Flow {
            system,
            point,
            tmax,
            dt_out,
            out,
        } => {
            positive("tmax", Some(tmax))?;
            positive("dt-out", dt_out)?;
            let z = load_system(&system)?;
            let opts = TrajectoryOpts {
                tmax,
                sample_dt: dt_out,
                ..TrajectoryOpts::default()
            };
            let tr = filippov_trajectory(&z, point, &opts, &cfg)?;
            emit(&out, &tr.to_csv(), stdout)
        }
        Command::Transition {
            system,
            side,
            section,
            dir,
            x,
            base,
            window,
            degree,
            samples,
            out,
        } => {
            let z = load_system(&system)?;
            let sf = z.side(side.into());
            let dir = match dir {
                DirArg::Forward => TimeDir::Forward,
                DirArg::Backward => TimeDir::Backward,
            };
            let t = |s: f64| transition_map(sf, &Source::Sigma, &section, dir, s, &cfg);
            let v = match x {
                Some(x) => json!({"x": x, "T": t(x)?}),
                None => {
                    positive("window", Some(window))?;
                    let g = fit_map(t, base, base - window, base + window, degree, samples, cfg.cond_max)?
                        .with_chart(Chart::Section {
                            anchor: section.anchor,
                            direction: section.direction,
                        });
                    serde_json::to_value(g)?
                }
            };
            emit(&out, &json_line(&v), stdout)
        }
        Command::Mirror { system, x, field, side } => {
            let z = load_system(&system)?;
            let r = mirror_map(z.side(field.into()), side.into(), x, &cfg)?;
            emit(&None, &json_line(&json!({"rho": r})), stdout)
        }
        Command::Germ {
            system,
            point,
            unstable,
            stable,
            window,
            out,
        } => {
            positive("window", Some(window))?;
            let z = load_system(&system)?;
            let layout = Layout {
                unstable: unstable.into(),
                stable: stable.into(),
            };
            let tp = transfer_pair(&z, point, layout, window, &cfg)?;
            let v = json!({
                "case": tp.case,
                "Tu": tp.tu,
                "Ts": tp.ts,
                "sigma": tp.sigma.pairs(),
            });
            if let Some(dir) = &out {
                fs::create_dir_all(dir)?;
                write(&dir.join("tu.json"), &json_line(&serde_json::to_value(&tp.tu)?))?;
                write(&dir.join("ts.json"), &json_line(&serde_json::to_value(&tp.ts)?))?;
            }
            emit(&None, &json_line(&v), stdout)
        }
        Command::PolycycleSolve {
            model,
            scenario,
            point,
            write_model,
        } => {
            let m = match (model, scenario, point) {
                (Some(p), _, _) => SyntheticModel::from_json(&read(&p)?)?,
                (None, Some(id), Some(pt)) => synthetic_at(&id, pt)?,
                _ => return Err(Error::InvalidInput("need --model or --scenario with --point".into())),
            };
            if let Some(p) = &write_model {
                write(p, &m.to_json())?;
            }
            let reports: Vec<Value> = solve_all(&m, &cfg)
                .iter()
                .map(|s| serde_json::to_value(classify_solution(s)).expect("json"))
                .collect();
            emit(&None, &json_line(&json!({"solutions": reports})), stdout)
        }
        Command::ScenarioCurves {
            scenario,
            at,
            ranges,
            out,
        } => {
            if let Some(v) = at {
                return emit(&out, &json_line(&curve_values(&scenario, v)?), stdout);
            }
            let s = scenario_by_id(&scenario)?;
            let r = ranges.unwrap_or_else(|| s.default_ranges());
            let curves = with_pool(&cfg, || s.curves(r, &cfg))??;
            emit(&out, &crate::bifurcation::diagram::curves_csv(&curves), stdout)
        }
        Command::Diagram {
            scenario,
            grid,
            ranges,
            out,
            svg: want_svg,
        } => {
            let s = scenario_by_id(&scenario)?;
            let r = ranges.unwrap_or_else(|| s.default_ranges());
            let d = with_pool(&cfg, || sweep_diagram(&*s, GridSpec { ranges: r, n: grid }, &cfg))??;
            fs::create_dir_all(&out).map_err(|e| Error::Io(format!("{}: {e}", out.display())))?;
            write(&out.join("diagram.csv"), &d.diagram_csv())?;
            write(&out.join("curves.csv"), &d.curves_csv())?;
            if want_svg {
                write(&out.join("diagram.svg"), &svg::render(&d, 480.0))?;
            }
            Ok(())
        }
    }
}

/// Parses `argv`, runs, and reports failures as JSON on `stderr`. Returns
/// the process exit code.
pub fn run_with<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let v = json!({"error": "config", "message": e.to_string().trim()});
            let _ = stderr.write_all(json_line(&v).as_bytes());
            return 2;
        }
    };
    match execute(cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let v = json!({"error": e.kind(), "message": e.to_string()});
            let _ = stderr.write_all(json_line(&v).as_bytes());
            e.exit_code()
        }
    }
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let mut out = std::io::stdout().lock();
    let mut err = std::io::stderr().lock();
    run_with(argv, &mut out, &mut err)
}
