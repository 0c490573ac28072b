//! `cyclic-weingarten`: curvature, residual and coefficient checks from the command line.
//!
//! Exit status: 0 pass, 1 failed check, 2 usage or configuration error,
//! 3 surface construction or integration failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cyclic_weingarten::catalog::{FrenetData, ProfileExpr, SurfaceSpec};
use cyclic_weingarten::harness::{
    coefficient_report, curvature_report, export_mesh, residual_report, run_suite, write_mesh, MeshFormat, RunConfig,
};
use cyclic_weingarten::kernel::{Domain, WeingartenCoeffs};
use cyclic_weingarten::{CausalClass, Error, MVec3};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_CONSTRUCTION: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "cyclic-weingarten",
    version,
    about = "Checks for linear Weingarten cyclic surfaces in Minkowski 3-space"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Mean and Gauss curvature on the grid, or at one point with --u and --v.
    Curvature {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_negative_numbers = true, requires = "v")]
        u: Option<f64>,
        #[arg(long, allow_negative_numbers = true, requires = "u")]
        v: Option<f64>,
    },
    /// Largest Weingarten and rationalized residuals over the grid.
    Residual {
        #[command(flatten)]
        common: Common,
    },
    /// Coefficient scan of the rationalized residual along the slice circles.
    Coeffs {
        #[command(flatten)]
        common: Common,
    },
    /// Export the node grid as OBJ or CSV.
    Mesh {
        #[command(flatten)]
        common: Common,
    },
    /// Run the verification suite.
    Verify {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Obj,
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum SurfaceArg {
    CyclicSpacelike,
    CyclicTimelike,
    CyclicLightlike,
    Pseudohyperbolic,
    RiemannMaximal,
    LightlikeMaximal,
    FlatFamily,
    FrenetSpacelike,
    FrenetLightlike,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Kind {
    Spacelike,
    Timelike,
    Lightlike,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// JSON run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    surface: Option<SurfaceArg>,

    /// Radius; polynomial coefficients in u for the cyclic and Frenet families.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    r: Option<Vec<f64>>,
    /// Center profile f, polynomial coefficients in u.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    f: Option<Vec<f64>>,
    /// Center profile g, polynomial coefficients in u.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    g: Option<Vec<f64>>,
    #[arg(long, allow_negative_numbers = true)]
    epsilon: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    mu: Option<f64>,
    /// Initial radius of the integrated maximal family.
    #[arg(long, allow_negative_numbers = true)]
    r0: Option<f64>,
    /// Initial radius derivative of the integrated maximal family.
    #[arg(long, allow_negative_numbers = true)]
    r0p: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    u0: Option<f64>,
    /// Plane type of the flat family.
    #[arg(long, value_enum)]
    kind: Option<Kind>,
    /// Curvature of the Frenet center curve (constant).
    #[arg(long, allow_negative_numbers = true)]
    kappa: Option<f64>,
    /// Parameter `a` of a pseudohyperbolic Frenet witness of radius 1/(2a).
    #[arg(long, allow_negative_numbers = true)]
    witness_a: Option<f64>,
    /// Bump the radius profile by `amplitude · sin u`.
    #[arg(long, allow_negative_numbers = true)]
    amplitude: Option<f64>,

    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    b: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    c: Option<f64>,

    #[arg(long, allow_negative_numbers = true)]
    umin: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    umax: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    vmin: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    vmax: Option<f64>,
    #[arg(long)]
    nu: Option<usize>,
    #[arg(long)]
    nv: Option<usize>,

    /// Curvature and residual tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

impl Common {
    fn has_family_params(&self) -> bool {
        self.r.is_some()
            || self.f.is_some()
            || self.g.is_some()
            || self.epsilon.is_some()
            || self.lambda.is_some()
            || self.mu.is_some()
            || self.r0.is_some()
            || self.r0p.is_some()
            || self.u0.is_some()
            || self.kind.is_some()
            || self.kappa.is_some()
            || self.witness_a.is_some()
    }
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Construction(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Io(_) => Failure::Usage(e.to_string()),
            e => Failure::Construction(e.to_string()),
        }
    }
}

fn scalar(list: &Option<Vec<f64>>, name: &str, default: f64) -> Result<f64, Failure> {
    match list.as_deref() {
        None => Ok(default),
        Some([x]) => Ok(*x),
        Some(_) => Err(Failure::Usage(format!("--{name} takes a single value for this family"))),
    }
}

fn pair(list: &Option<Vec<f64>>, name: &str, default: [f64; 2]) -> Result<[f64; 2], Failure> {
    match list.as_deref() {
        None => Ok(default),
        Some([x]) => Ok([*x, 0.0]),
        Some([x, y]) => Ok([*x, *y]),
        Some(_) => Err(Failure::Usage(format!("--{name} takes at most two values (affine profile)"))),
    }
}

fn poly(list: &Option<Vec<f64>>, default: &[f64]) -> ProfileExpr {
    ProfileExpr::poly(list.as_deref().unwrap_or(default))
}

fn spec_from_flags(family: SurfaceArg, a: &Common) -> Result<SurfaceSpec, Failure> {
    Ok(match family {
        SurfaceArg::CyclicSpacelike => SurfaceSpec::CyclicSpacelike {
            f: poly(&a.f, &[0.0]),
            g: poly(&a.g, &[0.0]),
            r: poly(&a.r, &[1.0, 1.5]),
            domain: None,
        },
        SurfaceArg::CyclicTimelike => SurfaceSpec::CyclicTimelike {
            f: poly(&a.f, &[0.0]),
            g: poly(&a.g, &[0.0]),
            r: poly(&a.r, &[1.0]),
            domain: None,
        },
        SurfaceArg::CyclicLightlike => SurfaceSpec::CyclicLightlike {
            f: poly(&a.f, &[0.0]),
            g: poly(&a.g, &[0.0]),
            r: poly(&a.r, &[1.0]),
            domain: None,
        },
        SurfaceArg::Pseudohyperbolic => {
            SurfaceSpec::Pseudohyperbolic { r: scalar(&a.r, "r", 1.0)?, x0: MVec3::ZERO, domain: None }
        }
        SurfaceArg::RiemannMaximal => {
            let epsilon = a.epsilon.unwrap_or(1.0);
            SurfaceSpec::RiemannMaximal {
                epsilon,
                lambda: a.lambda.unwrap_or(0.2),
                mu: a.mu.unwrap_or(0.3),
                r0: a.r0.unwrap_or(1.0),
                // r'(0) = 0 is not spacelike for spacelike planes
                r0p: a.r0p.unwrap_or(if epsilon > 0.0 { 2.0 } else { 0.0 }),
                u0: a.u0.unwrap_or(0.0),
                domain: None,
            }
        }
        SurfaceArg::LightlikeMaximal => SurfaceSpec::LightlikeMaximal {
            lambda: a.lambda.unwrap_or(1.0),
            mu: a.mu.unwrap_or(0.0),
            domain: None,
            spacelike_part: true,
        },
        SurfaceArg::FlatFamily => {
            let kind = match a.kind.unwrap_or(Kind::Spacelike) {
                Kind::Spacelike => CausalClass::Spacelike,
                Kind::Timelike => CausalClass::Timelike,
                Kind::Lightlike => CausalClass::Lightlike,
            };
            let lightlike = kind == CausalClass::Lightlike;
            SurfaceSpec::FlatFamily {
                kind,
                f: pair(&a.f, "f", [0.0, 0.1])?,
                g: pair(&a.g, "g", [0.0, if lightlike { 0.5 } else { 0.2 }])?,
                r: pair(
                    &a.r,
                    "r",
                    match kind {
                        CausalClass::Spacelike => [1.0, 1.5],
                        CausalClass::Timelike => [1.0, 0.05],
                        CausalClass::Lightlike => [0.0, 0.0],
                    },
                )?,
                lambda: a.lambda.unwrap_or(if lightlike { 1.0 } else { 0.0 }),
                mu: a.mu.unwrap_or(if lightlike { 2.0 } else { 0.0 }),
                domain: None,
            }
        }
        SurfaceArg::FrenetSpacelike | SurfaceArg::FrenetLightlike => {
            let data = FrenetData::PseudohyperbolicWitness {
                a: a.witness_a.unwrap_or(1.0),
                kappa: ProfileExpr::constant(a.kappa.unwrap_or(1.0)),
                // these defaults stay clear of the fold lines of each witness
                r: poly(&a.r, if family == SurfaceArg::FrenetSpacelike { &[1.0, 2.0] } else { &[1.0] }),
                sigma: None,
                beta: None,
            };
            let u0 = a.u0.unwrap_or(0.0);
            if family == SurfaceArg::FrenetSpacelike {
                SurfaceSpec::FrenetSpacelike { data, init: None, u0, domain: None, correct_drift: false }
            } else {
                SurfaceSpec::FrenetLightlike { data, init: None, u0, domain: None, correct_drift: false }
            }
        }
    })
}

fn resolve(a: &Common) -> Result<RunConfig, Failure> {
    let mut cfg = match (&a.config, a.surface) {
        (Some(path), family) => {
            let mut cfg = RunConfig::load(path)?;
            if let Some(family) = family {
                cfg.surface = spec_from_flags(family, a)?;
            } else if a.has_family_params() {
                return Err(Failure::Usage("family parameters need --surface".into()));
            }
            cfg
        }
        (None, Some(family)) => RunConfig::new(spec_from_flags(family, a)?),
        (None, None) => return Err(Failure::Usage("either --config or --surface is required".into())),
    };
    if let Some(amp) = a.amplitude {
        cfg.surface = SurfaceSpec::Perturbed { base: Box::new(cfg.surface), amplitude: amp };
    }
    if a.umin.is_some() || a.umax.is_some() || a.vmin.is_some() || a.vmax.is_some() {
        let d = cfg.surface.domain();
        let d = Domain::new(
            a.umin.unwrap_or(d.u_min),
            a.umax.unwrap_or(d.u_max),
            a.vmin.unwrap_or(d.v_min),
            a.vmax.unwrap_or(d.v_max),
        )
        .map_err(|e| Failure::Usage(e.to_string()))?;
        cfg.surface = cfg.surface.with_domain(d);
    }
    if a.a.is_some() || a.b.is_some() || a.c.is_some() {
        let base = cfg.coeffs.unwrap_or(WeingartenCoeffs { a: 0.0, b: 0.0, c: 0.0 });
        cfg.coeffs =
            Some(WeingartenCoeffs { a: a.a.unwrap_or(base.a), b: a.b.unwrap_or(base.b), c: a.c.unwrap_or(base.c) });
    }
    if let Some(n) = a.nu {
        cfg.nu = n;
    }
    if let Some(n) = a.nv {
        cfg.nv = n;
    }
    if let Some(t) = a.tol {
        cfg.tolerances.curvature = Some(t);
        cfg.tolerances.residual = Some(t);
    }
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(cfg)
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

fn require_json(format: Option<Format>) -> Result<(), Failure> {
    match format {
        None | Some(Format::Json) => Ok(()),
        Some(f) => Err(Failure::Usage(format!("--format {f:?} is not available here; use json").to_lowercase())),
    }
}

fn mesh_format(a: &Common, cfg: &RunConfig, path: &Path) -> Result<MeshFormat, Failure> {
    match a.format {
        Some(Format::Obj) => Ok(MeshFormat::Obj),
        Some(Format::Csv) => Ok(MeshFormat::Csv),
        Some(Format::Json) => Err(Failure::Usage("meshes are written as obj or csv".into())),
        None => Ok(cfg.mesh_format.unwrap_or(match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => MeshFormat::Csv,
            _ => MeshFormat::Obj,
        })),
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Curvature { common, u, v } => {
            let cfg = resolve(&common)?;
            if common.format == Some(Format::Csv) {
                let c = cfg.surface.build()?;
                let mut buf = Vec::new();
                write_mesh(&c.surface, cfg.coeffs.or(c.expected).as_ref(), cfg.nu, cfg.nv, MeshFormat::Csv, &mut buf)?;
                emit(&String::from_utf8_lossy(&buf), common.out.as_deref())?;
                return Ok(0);
            }
            require_json(common.format)?;
            let rep = curvature_report(&cfg, u.zip(v))?;
            emit(&json(&rep), common.out.as_deref())?;
            Ok(0)
        }
        Command::Residual { common } => {
            let cfg = resolve(&common)?;
            require_json(common.format)?;
            emit(&json(&residual_report(&cfg)?), common.out.as_deref())?;
            Ok(0)
        }
        Command::Coeffs { common } => {
            let cfg = resolve(&common)?;
            require_json(common.format)?;
            emit(&json(&coefficient_report(&cfg)?), common.out.as_deref())?;
            Ok(0)
        }
        Command::Mesh { common } => {
            let cfg = resolve(&common)?;
            let path = common
                .out
                .clone()
                .or_else(|| cfg.mesh.clone())
                .ok_or_else(|| Failure::Usage("mesh needs --out or a `mesh` path in the config".into()))?;
            let format = mesh_format(&common, &cfg, &path)?;
            let c = cfg.surface.build()?;
            export_mesh(&c.surface, cfg.coeffs.or(c.expected).as_ref(), cfg.nu, cfg.nv, &path, format)?;
            Ok(0)
        }
        Command::Verify { common } => {
            let cfg = resolve(&common)?;
            require_json(common.format)?;
            let rep = run_suite(&cfg);
            let out = common.out.clone().or_else(|| cfg.report.clone());
            emit(&rep.to_json(), out.as_deref())?;
            if let (Some(path), false) = (&cfg.mesh, rep.construction_failed) {
                let format = mesh_format(&common, &cfg, path)?;
                let c = cfg.surface.build()?;
                export_mesh(&c.surface, cfg.coeffs.or(c.expected).as_ref(), cfg.nu, cfg.nv, path, format)?;
            }
            for name in rep.failed_checks() {
                eprintln!("failed: {name}");
            }
            Ok(if rep.passed() {
                0
            } else if rep.construction_failed {
                EXIT_CONSTRUCTION
            } else {
                EXIT_FAIL
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Construction(m)) => {
            eprintln!("construction failed: {m}");
            ExitCode::from(EXIT_CONSTRUCTION)
        }
    }
}
