//! Run configuration, verification suite, reports and mesh export.

mod mesh;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::catalog::{Construction, SurfaceSpec, MAX_GRAM_DRIFT};
use crate::coeffs::{
    coefficient_scan, CoefficientScan, ResidualForm, ScanOptions, DEFAULT_HARMONIC_J, DEFAULT_MONOMIAL_J,
    HARMONIC_SAMPLES,
};
use crate::kernel::{
    curvatures, rationalized_terms, spacelike_check, weingarten_residual, CurvaturePair, PointJet, Surface,
    WeingartenCoeffs,
};
use crate::lorentz::minkowski_dot;
use crate::ode::{DEFAULT_ATOL, DEFAULT_RTOL};
use crate::{Error, Result};

pub use mesh::{export_mesh, write_mesh, MeshFormat, CSV_HEADER};

/// Threshold on the normalized coefficient summary.
pub const COEFFICIENT_TOL: f64 = 1e-8;
/// Threshold on the spread of `⟨X − c, X − c⟩` for pseudohyperbolic families.
pub const RECONSTRUCTION_TOL: f64 = 1e-7;

/// Per-check thresholds. Unset curvature and residual tolerances take a
/// family default.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default)]
    pub curvature: Option<f64>,
    #[serde(default)]
    pub residual: Option<f64>,
    #[serde(default)]
    pub coefficients: Option<f64>,
    #[serde(default)]
    pub gram_drift: Option<f64>,
    #[serde(default)]
    pub reconstruction: Option<f64>,
}

/// Resolved thresholds, as recorded in reports.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolvedTolerances {
    pub curvature: f64,
    pub residual: f64,
    pub coefficients: f64,
    pub gram_drift: f64,
    pub reconstruction: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub surface: SurfaceSpec,
    /// Defaults to the coefficients the family satisfies by construction.
    #[serde(default)]
    pub coeffs: Option<WeingartenCoeffs>,
    #[serde(default = "default_grid")]
    pub nu: usize,
    #[serde(default = "default_grid")]
    pub nv: usize,
    /// Number of `u` nodes in the coefficient scan.
    #[serde(default = "default_coeff_nodes")]
    pub coeff_nu: usize,
    #[serde(default)]
    pub harmonics: Option<usize>,
    #[serde(default = "default_interval")]
    pub monomial_interval: (f64, f64),
    #[serde(default)]
    pub residual_form: ResidualForm,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub report: Option<PathBuf>,
    #[serde(default)]
    pub mesh: Option<PathBuf>,
    #[serde(default)]
    pub mesh_format: Option<MeshFormat>,
}

fn default_grid() -> usize {
    20
}

fn default_coeff_nodes() -> usize {
    9
}

fn default_interval() -> (f64, f64) {
    (-1.0, 1.0)
}

impl RunConfig {
    pub fn new(surface: SurfaceSpec) -> Self {
        RunConfig {
            surface,
            coeffs: None,
            nu: default_grid(),
            nv: default_grid(),
            coeff_nu: default_coeff_nodes(),
            harmonics: None,
            monomial_interval: default_interval(),
            residual_form: ResidualForm::default(),
            tolerances: Tolerances::default(),
            report: None,
            mesh: None,
            mesh_format: None,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: RunConfig = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        RunConfig::from_json(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            e => e,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if self.nu < 2 || self.nv < 2 {
            return Err(Error::Config(format!("grid {}×{} is smaller than 2×2", self.nu, self.nv)));
        }
        if self.coeff_nu < 1 {
            return Err(Error::Config("coefficient scan needs at least one u node".into()));
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("curvature", t.curvature),
            ("residual", t.residual),
            ("coefficients", t.coefficients),
            ("gram_drift", t.gram_drift),
            ("reconstruction", t.reconstruction),
        ] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::Config(format!("tolerance `{name}` must be positive, got {v}")));
                }
            }
        }
        if let Some(wc) = &self.coeffs {
            wc.validate().map_err(|e| Error::Config(e.to_string()))?;
        }
        let (lo, hi) = self.monomial_interval;
        if !(lo < hi) {
            return Err(Error::Config(format!("monomial interval [{lo}, {hi}] is empty")));
        }
        Ok(())
    }

    pub fn scan_options(&self) -> ScanOptions {
        ScanOptions { j: self.harmonics, interval: self.monomial_interval, form: self.residual_form }
    }

    fn resolve_tolerances(&self, kind: CurvatureTarget) -> ResolvedTolerances {
        let t = &self.tolerances;
        let family = match kind {
            CurvatureTarget::Pseudohyperbolic { integrated: false, .. } => 1e-9,
            CurvatureTarget::Pseudohyperbolic { integrated: true, .. } => RECONSTRUCTION_TOL,
            CurvatureTarget::Maximal => 1e-6,
            CurvatureTarget::Flat => 1e-8,
            CurvatureTarget::None => 1e-8,
        };
        ResolvedTolerances {
            curvature: t.curvature.unwrap_or(family),
            residual: t.residual.or(t.curvature).unwrap_or(family),
            coefficients: t.coefficients.unwrap_or(COEFFICIENT_TOL),
            gram_drift: t.gram_drift.unwrap_or(MAX_GRAM_DRIFT),
            reconstruction: t.reconstruction.unwrap_or(RECONSTRUCTION_TOL),
        }
    }
}

/// What the family's curvatures are known to be.
#[derive(Clone, Copy, Debug, PartialEq)]
enum CurvatureTarget {
    /// `integrated` when the surface comes from a frame integration.
    Pseudohyperbolic {
        radius: f64,
        integrated: bool,
    },
    Maximal,
    Flat,
    None,
}

fn curvature_target(spec: &SurfaceSpec, c: Option<&Construction>) -> CurvatureTarget {
    match spec {
        SurfaceSpec::Perturbed { base, .. } => curvature_target(base, c),
        SurfaceSpec::RiemannMaximal { .. } | SurfaceSpec::LightlikeMaximal { .. } => CurvatureTarget::Maximal,
        SurfaceSpec::FlatFamily { .. } => CurvatureTarget::Flat,
        _ => match c.and_then(|c| c.radius.map(|r| (r, c.gram_drift.is_some()))) {
            Some((radius, integrated)) => CurvatureTarget::Pseudohyperbolic { radius, integrated },
            None => CurvatureTarget::None,
        },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Recorded for reference; does not affect the overall status.
    Info,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: Status,
    pub measured: Option<f64>,
    /// Value `measured` is compared with; the check is `measured ≤ threshold`
    /// when absent and `|measured − expected| ≤ threshold` otherwise.
    pub expected: Option<f64>,
    pub threshold: Option<f64>,
    pub note: String,
}

impl CheckRecord {
    fn bound(name: &str, measured: f64, threshold: f64, note: impl Into<String>) -> Self {
        let pass = measured <= threshold;
        CheckRecord {
            name: name.into(),
            status: if pass { Status::Pass } else { Status::Fail },
            measured: Some(measured),
            expected: None,
            threshold: Some(threshold),
            note: note.into(),
        }
    }

    fn near(name: &str, measured: f64, expected: f64, threshold: f64, note: impl Into<String>) -> Self {
        let pass = (measured - expected).abs() <= threshold;
        CheckRecord {
            name: name.into(),
            status: if pass { Status::Pass } else { Status::Fail },
            measured: Some(measured),
            expected: Some(expected),
            threshold: Some(threshold),
            note: note.into(),
        }
    }

    fn failed(name: &str, note: impl Into<String>) -> Self {
        CheckRecord {
            name: name.into(),
            status: Status::Fail,
            measured: None,
            expected: None,
            threshold: None,
            note: note.into(),
        }
    }

    fn info(name: &str, measured: f64, threshold: f64, note: impl Into<String>) -> Self {
        CheckRecord {
            name: name.into(),
            status: Status::Info,
            measured: Some(measured),
            expected: None,
            threshold: Some(threshold),
            note: note.into(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

/// Settings the numbers in a report depend on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub version: String,
    pub tolerances: ResolvedTolerances,
    pub coeffs: Option<WeingartenCoeffs>,
    pub grid: (usize, usize),
    pub coeff_nu: usize,
    pub integrator: String,
    pub rtol: f64,
    pub atol: f64,
    pub residual_form: ResidualForm,
    pub w_power: u32,
    pub harmonic_samples: usize,
    pub harmonics: usize,
    pub monomial_degree: usize,
    pub monomial_interval: (f64, f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub surface: SurfaceSpec,
    pub label: Option<String>,
    pub status: Status,
    /// Set when the surface could not be built or integrated.
    pub construction_failed: bool,
    pub checks: Vec<CheckRecord>,
    pub environment: Environment,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failed_checks(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.passed()).map(|c| c.name.as_str()).collect()
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

fn environment(config: &RunConfig, tol: ResolvedTolerances, coeffs: Option<WeingartenCoeffs>) -> Environment {
    Environment {
        version: env!("CARGO_PKG_VERSION").to_owned(),
        tolerances: tol,
        coeffs,
        grid: (config.nu, config.nv),
        coeff_nu: config.coeff_nu,
        integrator: "dormand-prince-5(4)".into(),
        rtol: DEFAULT_RTOL,
        atol: DEFAULT_ATOL,
        residual_form: config.residual_form,
        w_power: match config.residual_form {
            ResidualForm::SingleW => 1,
            ResidualForm::SquaredW => 2,
        },
        harmonic_samples: HARMONIC_SAMPLES,
        harmonics: config.harmonics.unwrap_or(DEFAULT_HARMONIC_J),
        monomial_degree: config.harmonics.unwrap_or(DEFAULT_MONOMIAL_J),
        monomial_interval: config.monomial_interval,
    }
}

/// Curvatures at every node of the configured grid, row-major in `u`.
pub fn curvature_grid(surface: &Surface, nu: usize, nv: usize) -> Result<Vec<((f64, f64), CurvaturePair)>> {
    surface.domain().grid(nu, nv).into_iter().map(|(u, v)| Ok(((u, v), curvatures(&surface.eval(u, v)?)?))).collect()
}

/// Largest normalized rationalized residual `|Φ| / scale` over the grid.
pub fn rationalized_grid_max(surface: &Surface, wc: &WeingartenCoeffs, nu: usize, nv: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (u, v) in surface.domain().grid(nu, nv) {
        let t = rationalized_terms(&PointJet::from(&surface.eval(u, v)?), wc);
        let x = if t.scale > 0.0 { t.phi.abs() / t.scale } else { t.phi.abs() };
        worst = worst.max(x);
    }
    Ok(worst)
}

/// Run every check applicable to the configured surface.
pub fn run_suite(config: &RunConfig) -> VerificationReport {
    let built = config.surface.build();
    let target = curvature_target(&config.surface, built.as_ref().ok());
    let tol = config.resolve_tolerances(target);
    let coeffs = config.coeffs.or_else(|| built.as_ref().ok().and_then(|c| c.expected));
    let mut report = VerificationReport {
        surface: config.surface.clone(),
        label: None,
        status: Status::Pass,
        construction_failed: false,
        checks: Vec::new(),
        environment: environment(config, tol, coeffs),
    };
    match built {
        Ok(c) => {
            report.label = Some(c.surface.label().to_owned());
            report.checks.push(CheckRecord {
                name: "construction".into(),
                status: Status::Pass,
                measured: None,
                expected: None,
                threshold: None,
                note: match c.reached_span {
                    Some((a, b)) => format!("integrated over [{a}, {b}]"),
                    None => "closed form".into(),
                },
            });
            surface_checks(config, &c, target, coeffs, &tol, &mut report.checks);
        }
        Err(e) => {
            report.construction_failed = true;
            report.checks.push(CheckRecord::failed("construction", e.to_string()));
        }
    }
    if report.checks.iter().any(|c| !c.passed()) {
        report.status = Status::Fail;
    }
    report
}

fn surface_checks(
    config: &RunConfig,
    c: &Construction,
    target: CurvatureTarget,
    coeffs: Option<WeingartenCoeffs>,
    tol: &ResolvedTolerances,
    out: &mut Vec<CheckRecord>,
) {
    let s = &c.surface;
    let (nu, nv) = (config.nu, config.nv);
    match spacelike_check(s, nu, nv) {
        Ok(scan) => out.push(CheckRecord {
            name: "spacelike".into(),
            status: if scan.spacelike { Status::Pass } else { Status::Fail },
            measured: Some(scan.min_w),
            expected: None,
            threshold: Some(0.0),
            note: format!(
                "min W at ({}, {}); {} of {} nodes not spacelike",
                scan.argmin.0,
                scan.argmin.1,
                scan.failed_nodes,
                nu * nv
            ),
        }),
        Err(e) => out.push(CheckRecord::failed("spacelike", e.to_string())),
    }

    let grid = match curvature_grid(s, nu, nv) {
        Ok(g) => g,
        Err(e) => {
            out.push(CheckRecord::failed("curvature", e.to_string()));
            return;
        }
    };
    // worst node for a per-node quantity
    let worst = |f: &dyn Fn(&CurvaturePair) -> f64, reference: f64| {
        grid.iter().map(|(_, cp)| f(cp)).fold(reference, |w, x| {
            if (x - reference).abs() > (w - reference).abs() || x.is_nan() {
                x
            } else {
                w
            }
        })
    };
    match target {
        CurvatureTarget::Pseudohyperbolic { radius, .. } => {
            let k = 1.0 / (radius * radius);
            out.push(CheckRecord::near("gauss-curvature", worst(&|cp| cp.K, k), k, tol.curvature, "K = 1/r²"));
            out.push(CheckRecord::near(
                "mean-curvature",
                worst(&|cp| cp.H.abs(), 1.0 / radius),
                1.0 / radius,
                tol.curvature,
                "|H| = 1/r",
            ));
        }
        CurvatureTarget::Maximal => {
            out.push(CheckRecord::bound("mean-curvature", worst(&|cp| cp.H.abs(), 0.0), tol.curvature, "max |H|"));
        }
        CurvatureTarget::Flat => {
            out.push(CheckRecord::bound("gauss-curvature", worst(&|cp| cp.K.abs(), 0.0), tol.curvature, "max |K|"));
        }
        CurvatureTarget::None => {
            let h = worst(&|cp| cp.H.abs(), 0.0);
            let k = worst(&|cp| cp.K.abs(), 0.0);
            out.push(CheckRecord::info("mean-curvature", h, tol.curvature, "max |H|; no family target"));
            out.push(CheckRecord::info("gauss-curvature", k, tol.curvature, "max |K|; no family target"));
        }
    }

    let Some(wc) = coeffs else {
        out.push(CheckRecord::failed(
            "weingarten-residual",
            "no coefficients given and the family satisfies none by construction",
        ));
        return;
    };
    let flipped = wc.flipped();
    let given = worst(&|cp| weingarten_residual(cp, &wc).abs(), 0.0);
    let other = worst(&|cp| weingarten_residual(cp, &flipped).abs(), 0.0);
    let (best, which) = if given <= other || given.is_nan() { (given, "(a, b, c)") } else { (other, "(-a, b, c)") };
    out.push(CheckRecord::bound(
        "weingarten-residual",
        best,
        tol.residual,
        format!("max |aH + bK - c| over the grid, matched with {which}"),
    ));
    out.push(CheckRecord::info("weingarten-residual-given", given, tol.residual, "coefficients (a, b, c)"));
    out.push(CheckRecord::info("weingarten-residual-flipped", other, tol.residual, "coefficients (-a, b, c)"));
    match rationalized_grid_max(s, &wc, nu, nv) {
        Ok(x) => {
            out.push(CheckRecord::bound("rationalized-residual", x, tol.coefficients, "max |Φ| / scale over the grid"))
        }
        Err(e) => out.push(CheckRecord::failed("rationalized-residual", e.to_string())),
    }

    if s.basis().is_some() {
        let u_grid = s.domain().u_nodes(config.coeff_nu);
        match coefficient_scan(s, &wc, &u_grid, &config.scan_options()) {
            Ok(scan) => out.push(coefficient_record(&scan, tol.coefficients)),
            Err(e) => out.push(CheckRecord::failed("coefficient-summary", e.to_string())),
        }
    }

    if let Some(drift) = c.gram_drift {
        out.push(CheckRecord::bound("gram-drift", drift, tol.gram_drift, "largest frame Gram deviation over the span"));
    }
    if let (Some(center), Some(radius)) = (c.center, c.radius) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (u, v) in s.domain().grid(nu, nv) {
            match s.point(u, v) {
                Ok(p) => {
                    let d = minkowski_dot(p - center, p - center);
                    lo = lo.min(d);
                    hi = hi.max(d);
                }
                Err(e) => {
                    out.push(CheckRecord::failed("center-distance", e.to_string()));
                    return;
                }
            }
        }
        let expected = -radius * radius;
        let far = if (lo - expected).abs() > (hi - expected).abs() { lo } else { hi };
        out.push(CheckRecord::near("center-distance", far, expected, tol.reconstruction, "<X - c, X - c> = -r²"));
        out.push(CheckRecord::bound(
            "center-distance-spread",
            hi - lo,
            tol.reconstruction,
            "max - min of <X - c, X - c>",
        ));
    }
}

fn coefficient_record(scan: &CoefficientScan, threshold: f64) -> CheckRecord {
    let p = scan.peak;
    CheckRecord::bound(
        "coefficient-summary",
        scan.summary,
        threshold,
        format!("{:?} expansion; largest normalized coefficient {}_{} at u = {}", scan.mode, p.series, p.index, p.u)
            .to_lowercase(),
    )
}

/// Grid curvature summary, or the value at one point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub label: String,
    pub nodes: Vec<CurvatureNode>,
    pub max_abs_h: f64,
    pub max_abs_k: f64,
}

#[allow(non_snake_case)]
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureNode {
    pub u: f64,
    pub v: f64,
    pub H: f64,
    pub K: f64,
}

pub fn curvature_report(config: &RunConfig, point: Option<(f64, f64)>) -> Result<CurvatureReport> {
    let c = config.surface.build()?;
    let nodes: Vec<CurvatureNode> = match point {
        Some((u, v)) => {
            let cp = curvatures(&c.surface.eval(u, v)?)?;
            vec![CurvatureNode { u, v, H: cp.H, K: cp.K }]
        }
        None => curvature_grid(&c.surface, config.nu, config.nv)?
            .into_iter()
            .map(|((u, v), cp)| CurvatureNode { u, v, H: cp.H, K: cp.K })
            .collect(),
    };
    Ok(CurvatureReport {
        label: c.surface.label().to_owned(),
        max_abs_h: nodes.iter().fold(0.0, |m, n| m.max(n.H.abs())),
        max_abs_k: nodes.iter().fold(0.0, |m, n| m.max(n.K.abs())),
        nodes,
    })
}

/// Largest residuals over the grid for the given and flipped coefficients.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub label: String,
    pub coeffs: WeingartenCoeffs,
    pub weingarten: f64,
    pub weingarten_flipped: f64,
    pub rationalized: f64,
    pub grid: (usize, usize),
}

fn coeffs_for(config: &RunConfig, c: &Construction) -> Result<WeingartenCoeffs> {
    config
        .coeffs
        .or(c.expected)
        .ok_or_else(|| Error::Config("no coefficients given and the family satisfies none by construction".into()))
}

pub fn residual_report(config: &RunConfig) -> Result<ResidualReport> {
    let c = config.surface.build()?;
    let wc = coeffs_for(config, &c)?;
    let grid = curvature_grid(&c.surface, config.nu, config.nv)?;
    let max = |wc: &WeingartenCoeffs| grid.iter().fold(0.0f64, |m, (_, cp)| m.max(weingarten_residual(cp, wc).abs()));
    Ok(ResidualReport {
        label: c.surface.label().to_owned(),
        coeffs: wc,
        weingarten: max(&wc),
        weingarten_flipped: max(&wc.flipped()),
        rationalized: rationalized_grid_max(&c.surface, &wc, config.nu, config.nv)?,
        grid: (config.nu, config.nv),
    })
}

pub fn coefficient_report(config: &RunConfig) -> Result<CoefficientScan> {
    let c = config.surface.build()?;
    let wc = coeffs_for(config, &c)?;
    let u_grid = c.surface.domain().u_nodes(config.coeff_nu);
    coefficient_scan(&c.surface, &wc, &u_grid, &config.scan_options())
}
