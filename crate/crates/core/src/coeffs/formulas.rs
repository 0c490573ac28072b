//! Printed closed forms of individual expansion coefficients, used as oracles.

use std::fmt;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::catalog::{cyclic_parallel, frenet_cyclic, FrenetKind, FrenetProfiles, FrenetState, ProfileExpr, ProfileFn};
use crate::kernel::{Domain, Surface, WeingartenCoeffs};
use crate::lorentz::CausalClass;
use crate::{Error, Result};

use super::{spectrum_at, ExpansionMode, ResidualForm, ScanOptions};

/// Relative agreement required of an oracle comparison.
pub const COMPARISON_TOL: f64 = 1e-6;
/// Instances whose reference coefficient is below this fraction of the
/// residual scale are redrawn.
const NEAR_ZERO: f64 = 1e-4;
const MAX_REJECTIONS_PER_SAMPLE: usize = 10;

/// One printed coefficient formula. Names give the plane type of the
/// foliation, whether `c` vanishes, and the coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormulaId {
    /// `(1/8) a² r⁶ g'² (r g'' − 2r' g')²` with `f' = 0`.
    SpacelikeCZeroA4,
    /// `½ λ² r⁸ (4r'² − a² r² A²)` with `f' = 0`, `g' = λr²`.
    SpacelikeCZeroA2,
    /// `2λ r⁷ r' (a² r A² − 2r'')` with `f' = 0`, `g' = λr²`.
    SpacelikeCZeroB1,
    SpacelikeCNonzeroA8,
    SpacelikeCNonzeroB8,
    TimelikeCZeroA4,
    TimelikeCZeroA2,
    TimelikeCZeroA1,
    TimelikeCNonzeroA8,
    TimelikeCNonzeroB8,
    /// `−2a²(2r² − r')(−4rr' + r'')²`.
    LightlikeCZeroA6,
    /// With `r = 1/(−2u − λ)`.
    LightlikeCZeroA3,
    /// `−64c²(−2r² + r')⁴`, the top coefficient.
    LightlikeCNonzeroB8,
    /// With `r = 1/(−2u − μ)`.
    LightlikeCNonzeroB3,
    /// Frenet frame with spacelike planes.
    FrenetCZeroB8,
    /// Same with `β = 0`.
    FrenetCZeroA8BetaZero,
    /// `−(1/32) r⁸ x₁` with `c = 1`.
    FrenetCNonzeroA8,
    /// `(1/16) βγ r⁸ x₂` with `c = 1`; the undefined symbol `m` is read as `a²`.
    FrenetCNonzeroB8,
}

impl FormulaId {
    pub const ALL: [FormulaId; 18] = [
        FormulaId::SpacelikeCZeroA4,
        FormulaId::SpacelikeCZeroA2,
        FormulaId::SpacelikeCZeroB1,
        FormulaId::SpacelikeCNonzeroA8,
        FormulaId::SpacelikeCNonzeroB8,
        FormulaId::TimelikeCZeroA4,
        FormulaId::TimelikeCZeroA2,
        FormulaId::TimelikeCZeroA1,
        FormulaId::TimelikeCNonzeroA8,
        FormulaId::TimelikeCNonzeroB8,
        FormulaId::LightlikeCZeroA6,
        FormulaId::LightlikeCZeroA3,
        FormulaId::LightlikeCNonzeroB8,
        FormulaId::LightlikeCNonzeroB3,
        FormulaId::FrenetCZeroB8,
        FormulaId::FrenetCZeroA8BetaZero,
        FormulaId::FrenetCNonzeroA8,
        FormulaId::FrenetCNonzeroB8,
    ];

    pub fn name(self) -> String {
        serde_json::to_value(self).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()
    }

    /// Coefficient index and series the formula describes.
    pub fn target(self) -> (usize, char) {
        use FormulaId::*;
        match self {
            SpacelikeCZeroA4 | TimelikeCZeroA4 => (4, 'A'),
            SpacelikeCZeroA2 | TimelikeCZeroA2 => (2, 'A'),
            SpacelikeCZeroB1 => (1, 'B'),
            TimelikeCZeroA1 => (1, 'A'),
            SpacelikeCNonzeroA8 | TimelikeCNonzeroA8 | FrenetCZeroA8BetaZero | FrenetCNonzeroA8 => (8, 'A'),
            SpacelikeCNonzeroB8 | TimelikeCNonzeroB8 | FrenetCZeroB8 | FrenetCNonzeroB8 => (8, 'B'),
            LightlikeCZeroA6 => (6, 'A'),
            LightlikeCZeroA3 | LightlikeCNonzeroB3 => (3, 'A'),
            LightlikeCNonzeroB8 => (8, 'A'),
        }
    }

    /// Whether agreement with the extracted coefficient is a hard requirement.
    pub fn is_hard(self) -> bool {
        matches!(self, FormulaId::SpacelikeCZeroA4 | FormulaId::LightlikeCNonzeroB8)
    }

    /// Known issues with the printed form.
    pub fn note(self) -> &'static str {
        use FormulaId::*;
        match self {
            SpacelikeCNonzeroA8 | SpacelikeCNonzeroB8 => {
                "suspected typo; extraction follows -(1/32)c²r⁸ Re and Im of (f' + ig')⁸"
            }
            TimelikeCNonzeroA8 => "suspected typo; extraction follows -(1/64)c²r⁸((f' + g')⁸ + (f' - g')⁸)",
            TimelikeCZeroA2 | TimelikeCZeroA1 => "extraction follows A = -1 + μ²r⁴ + r'² - rr''",
            LightlikeCNonzeroB3 => "extraction gives the v⁴ coefficient -1024c²f'⁴/(2u + μ)⁴ and no f'-only v³ term",
            FrenetCZeroB8 => "printed form is a factor; extraction is κ²r⁸/32 times it",
            FrenetCZeroA8BetaZero => "printed form is a factor; extraction is -κ²r⁸/128 times it",
            FrenetCNonzeroA8 => "bracket misplaced in the β⁴ coefficient of x₁",
            FrenetCNonzeroB8 => "undefined symbol m read as a²",
            _ => "",
        }
    }
}

impl fmt::Display for FormulaId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Values of the symbols a formula may reference at one `u`. Primes are
/// written `r1 = r'`, `r2 = r''`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FormulaInputs {
    pub u: Option<f64>,
    pub r: Option<f64>,
    pub r1: Option<f64>,
    pub r2: Option<f64>,
    pub f1: Option<f64>,
    pub f2: Option<f64>,
    pub g1: Option<f64>,
    pub g2: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub c: Option<f64>,
    pub kappa: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub lambda: Option<f64>,
    pub mu: Option<f64>,
}

fn need(x: Option<f64>, name: &'static str) -> Result<f64> {
    x.ok_or(Error::MissingSymbol(name))
}

/// Evaluate the printed closed form verbatim.
pub fn printed_formula(id: FormulaId, x: &FormulaInputs) -> Result<f64> {
    use FormulaId::*;
    let r = || need(x.r, "r");
    let r1 = || need(x.r1, "r'");
    let r2 = || need(x.r2, "r''");
    let f1 = || need(x.f1, "f'");
    let f2 = || need(x.f2, "f''");
    let g1 = || need(x.g1, "g'");
    let g2 = || need(x.g2, "g''");
    let a = || need(x.a, "a");
    let b = || need(x.b, "b");
    let c = || need(x.c, "c");
    let kappa = || need(x.kappa, "κ");
    let beta = || need(x.beta, "β");
    let gamma = || need(x.gamma, "γ");
    let lambda = || need(x.lambda, "λ");
    let mu = || need(x.mu, "μ");
    Ok(match id {
        SpacelikeCZeroA4 => {
            let (a, r, r1, g1, g2) = (a()?, r()?, r1()?, g1()?, g2()?);
            a * a * r.powi(6) * g1 * g1 * (r * g2 - 2.0 * r1 * g1).powi(2) / 8.0
        }
        SpacelikeCZeroA2 | SpacelikeCZeroB1 => {
            let (a, l, r, r1, r2) = (a()?, lambda()?, r()?, r1()?, r2()?);
            let big = -1.0 + l * l * r.powi(4) + r1 * r1 - r * r2;
            if id == SpacelikeCZeroA2 {
                0.5 * l * l * r.powi(8) * (4.0 * r1 * r1 - a * a * r * r * big * big)
            } else {
                2.0 * l * r.powi(7) * r1 * (a * a * r * big * big - 2.0 * r2)
            }
        }
        SpacelikeCNonzeroA8 => {
            let (c, r, f, g) = (c()?, r()?, f1()?, g1()?);
            -c * c * r.powi(8) * (f.powi(8) - 28.0 * f.powi(6) * g * g + 70.0 * f * f * g.powi(6) + g.powi(8)) / 32.0
        }
        SpacelikeCNonzeroB8 => {
            let (c, r, f, g) = (c()?, r()?, f1()?, g1()?);
            c * c * r.powi(8) * f * g * (-f.powi(6) - 7.0 * f.powi(4) * g * g - 7.0 * f * f * g.powi(4) + g.powi(6))
                / 4.0
        }
        TimelikeCZeroA4 => {
            let (a, r, r1, g1, g2) = (a()?, r()?, r1()?, g1()?, g2()?);
            -a * a * r.powi(6) * g1 * g1 * (-2.0 * r1 * g1 + r * g2).powi(2) / 8.0
        }
        TimelikeCZeroA2 | TimelikeCZeroA1 => {
            let (a, m, r, r1, r2) = (a()?, mu()?, r()?, r1()?, r2()?);
            let big = -1.0 + m * m * r.powi(4) - r1 * r1 + r * r2;
            if id == TimelikeCZeroA2 {
                -0.5 * m * m * r.powi(8) * (4.0 * r1 * r1 + a * a * r * r * big * big)
            } else {
                -2.0 * m * r.powi(7) * r1 * (2.0 * r2 + a * a * r * big * big)
            }
        }
        TimelikeCNonzeroA8 => {
            let (c, r, f, g) = (c()?, r()?, f1()?, g1()?);
            -c * c * r.powi(8) * (f.powi(8) + 28.0 * f.powi(6) * g * g + 70.0 * f * f * g.powi(6) + g.powi(8)) / 32.0
        }
        TimelikeCNonzeroB8 => {
            let (c, r, f, g) = (c()?, r()?, f1()?, g1()?);
            c * c * r.powi(8) * f * g * (f.powi(6) + 7.0 * f.powi(4) * g * g + 7.0 * f * f * g.powi(4) + g.powi(6))
                / 4.0
        }
        LightlikeCZeroA6 => {
            let (a, r, r1, r2) = (a()?, r()?, r1()?, r2()?);
            -2.0 * a * a * (2.0 * r * r - r1) * (-4.0 * r * r1 + r2).powi(2)
        }
        LightlikeCZeroA3 => {
            let (a, f1, f2, l, u) = (a()?, f1()?, f2()?, lambda()?, need(x.u, "u")?);
            let s = 2.0 * u + l;
            16.0 * a * a * f1 * (-4.0 * f1 + s * f2).powi(2) / s.powi(5)
        }
        LightlikeCNonzeroB8 => {
            let (c, r, r1) = (c()?, r()?, r1()?);
            -64.0 * c * c * (-2.0 * r * r + r1).powi(4)
        }
        LightlikeCNonzeroB3 => {
            let (c, f1, m, u) = (c()?, f1()?, mu()?, need(x.u, "u")?);
            1024.0 * c * c * f1.powi(4) / (2.0 * u + m).powi(5)
        }
        FrenetCZeroB8 => {
            let (a, be, ga, k, r) = (a()?, beta()?, gamma()?, kappa()?, r()?);
            let (a2, b2, g2, k2) = (a * a, be * be, ga * ga, k * k);
            be * ga
                * (2.0 * a2 * (3.0 * b2 * b2 - 10.0 * b2 * g2 + 3.0 * g2 * g2)
                    + k2 * (1.0 + 12.0 * a2 * r * r) * (g2 - b2)
                    + r * r * k2 * k2 * (1.0 + 6.0 * a2 * r * r))
        }
        FrenetCZeroA8BetaZero => {
            let (a, ga, k, r) = (a()?, gamma()?, kappa()?, r()?);
            let (a2, g2, k2) = (a * a, ga * ga, k * k);
            (g2 + r * r * k2).powi(2) * (4.0 * a2 * g2 + (1.0 + 4.0 * a2 * r * r) * k2)
        }
        FrenetCNonzeroA8 => {
            let (a, b, be, ga, k, r) = (a()?, b()?, beta()?, gamma()?, kappa()?, r()?);
            -r.powi(8) * frenet_x1(a * a, b, be, ga, k, r, false) / 32.0
        }
        FrenetCNonzeroB8 => {
            let (a, b, be, ga, k, r) = (a()?, b()?, beta()?, gamma()?, kappa()?, r()?);
            be * ga * r.powi(8) * frenet_x2(a * a, b, be, ga, k, r) / 16.0
        }
    })
}

/// A closed form the extraction does reproduce where the printed one does
/// not, with the coefficient it describes. `None` when the printed form
/// already agrees or no replacement is known.
pub fn derived_formula(id: FormulaId, x: &FormulaInputs) -> Result<Option<((usize, char), f64)>> {
    use FormulaId::*;
    let r = || need(x.r, "r");
    let c = || need(x.c, "c");
    Ok(match id {
        SpacelikeCNonzeroA8 | SpacelikeCNonzeroB8 => {
            let z = Complex64::new(need(x.f1, "f'")?, need(x.g1, "g'")?).powi(8);
            let k = c()?.powi(2) * r()?.powi(8) / 32.0;
            if id == SpacelikeCNonzeroA8 {
                Some(((8, 'A'), -k * z.re))
            } else {
                Some(((8, 'B'), -k * z.im))
            }
        }
        TimelikeCNonzeroA8 => {
            let (f, g) = (need(x.f1, "f'")?, need(x.g1, "g'")?);
            let k = c()?.powi(2) * r()?.powi(8) / 32.0;
            Some(((8, 'A'), -k * ((f + g).powi(8) + (f - g).powi(8)) / 2.0))
        }
        TimelikeCZeroA2 | TimelikeCZeroA1 => {
            // same auxiliary A as for spacelike planes
            let (a, m, r, r1, r2) = (need(x.a, "a")?, need(x.mu, "μ")?, r()?, need(x.r1, "r'")?, need(x.r2, "r''")?);
            let big = -1.0 + m * m * r.powi(4) + r1 * r1 - r * r2;
            if id == TimelikeCZeroA2 {
                Some(((2, 'A'), -0.5 * m * m * r.powi(8) * (4.0 * r1 * r1 + a * a * r * r * big * big)))
            } else {
                Some(((1, 'A'), -2.0 * m * r.powi(7) * r1 * (2.0 * r2 + a * a * r * big * big)))
            }
        }
        LightlikeCNonzeroB3 => {
            let s = 2.0 * need(x.u, "u")? + need(x.mu, "μ")?;
            Some(((4, 'A'), -1024.0 * c()?.powi(2) * need(x.f1, "f'")?.powi(4) / s.powi(4)))
        }
        FrenetCZeroB8 => {
            let k = need(x.kappa, "κ")?;
            Some(((8, 'B'), k * k * r()?.powi(8) / 32.0 * printed_formula(id, x)?))
        }
        FrenetCZeroA8BetaZero => {
            let k = need(x.kappa, "κ")?;
            Some(((8, 'A'), -k * k * r()?.powi(8) / 128.0 * printed_formula(id, x)?))
        }
        FrenetCNonzeroA8 => {
            let (a, b, be, ga, k) =
                (need(x.a, "a")?, need(x.b, "b")?, need(x.beta, "β")?, need(x.gamma, "γ")?, need(x.kappa, "κ")?);
            let r = r()?;
            Some(((8, 'A'), -r.powi(8) * frenet_x1(a * a, b, be, ga, k, r, true) / 32.0))
        }
        _ => None,
    })
}

/// `x₁` as printed, or with the `β⁴` coefficient regrouped as
/// `70γ⁴ + 15γ²κ²(a² + 2b + 4r²) + κ⁴(b² + 3(a² + 2b)r² + 6r⁴)` when `regrouped`.
fn frenet_x1(a2: f64, b: f64, be: f64, ga: f64, k: f64, r: f64, regrouped: bool) -> f64 {
    let (g2, k2, r2) = (ga * ga, k * k, r * r);
    let s = a2 + 2.0 * b;
    let p = |n: i32| be.powi(n);
    let quartic = k2 * k2 * (b * b + 3.0 * s * r2 + 6.0 * r2 * r2);
    let beta4 = if regrouped {
        70.0 * g2 * g2 + 15.0 * g2 * k2 * (s + 4.0 * r2) + quartic
    } else {
        70.0 * g2 * g2 + 15.0 * g2 * k2 * (2.0 * (s + 4.0 * r2) + quartic)
    };
    p(8) - (28.0 * g2 + k2 * (s + 4.0 * r2)) * p(6)
        + beta4 * p(4)
        + (-28.0 * g2.powi(3)
            - 15.0 * g2 * g2 * k2 * (s + 4.0 * r2)
            - k2.powi(3) * r2 * (2.0 * b * b + 3.0 * s * r2 + 4.0 * r2 * r2)
            - 6.0 * g2 * k2 * k2 * (b * b + 3.0 * s * r2 + 6.0 * r2 * r2))
            * p(2)
        + (g2 + r2 * k2).powi(2) * (g2 * g2 + g2 * k2 * (s + 2.0 * r2) + k2 * k2 * (b * b + s * r2 + r2 * r2))
}

fn frenet_x2(a2: f64, b: f64, be: f64, ga: f64, k: f64, r: f64) -> f64 {
    let (g2, k2, r2) = (ga * ga, k * k, r * r);
    let s = a2 + 2.0 * b;
    let m = a2;
    let p = |n: i32| be.powi(n);
    -4.0 * p(6) + (28.0 * g2 + 3.0 * k2 * (m + 2.0 * b + 4.0 * r2)) * p(4)
        - 2.0
            * (14.0 * g2 * g2 + 5.0 * g2 * k2 * (s + 4.0 * r2) + k2 * k2 * (b * b + 3.0 * s * r2 + 6.0 * r2 * r2))
            * p(2)
        + (g2 + r2 * k2)
            * (4.0 * g2 * g2
                + g2 * k2 * (3.0 * a2 + 6.0 * b + 8.0 * r2)
                + k2 * k2 * (2.0 * b * b + 3.0 * s * r2 + 4.0 * r2 * r2))
}

/// Extracted coefficient against its printed closed form over random instances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormulaComparison {
    pub id: FormulaId,
    pub form: ResidualForm,
    pub samples: usize,
    /// Instances skipped because the coefficient nearly vanished there.
    pub rejected: usize,
    /// Largest `|extracted − printed| / max(|extracted|, |printed|)`.
    pub max_rel_diff: f64,
    /// Range of `extracted / printed`.
    pub ratio_min: f64,
    pub ratio_max: f64,
    pub tolerance: f64,
    pub agrees: bool,
    /// Same statistic against [`derived_formula`], where one is known.
    pub derived_rel_diff: Option<f64>,
    pub hard: bool,
    pub note: String,
}

struct Instance {
    surface: Surface,
    wc: WeingartenCoeffs,
    u: f64,
    inputs: FormulaInputs,
}

fn poly(rng: &mut ChaCha8Rng, deg: usize, amp: f64) -> Vec<f64> {
    (0..=deg).map(|_| rng.gen_range(-amp..amp)).collect()
}

/// Cubic whose derivative stays at least 0.1 away from zero on `[0, 1]`, so
/// coefficients proportional to powers of it are not lost in round-off.
fn slope_dominated(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut p = poly(rng, 3, 0.1);
    let slope = rng.gen_range(0.6..1.2);
    p[1] = if rng.gen_bool(0.5) { slope } else { -slope };
    p
}

fn parallel_instance(id: FormulaId, rng: &mut ChaCha8Rng) -> Result<Instance> {
    use FormulaId::*;
    let kind = match id {
        SpacelikeCZeroA4 | SpacelikeCZeroA2 | SpacelikeCZeroB1 | SpacelikeCNonzeroA8 | SpacelikeCNonzeroB8 => {
            CausalClass::Spacelike
        }
        TimelikeCZeroA4 | TimelikeCZeroA2 | TimelikeCZeroA1 | TimelikeCNonzeroA8 | TimelikeCNonzeroB8 => {
            CausalClass::Timelike
        }
        _ => CausalClass::Lightlike,
    };
    let u = rng.gen_range(0.1..0.9);
    let a = rng.gen_range(0.5..2.0);
    let half = if rng.gen_bool(0.5) { 0.5 } else { -0.5 };
    let c_zero = matches!(
        id,
        SpacelikeCZeroA4
            | SpacelikeCZeroA2
            | SpacelikeCZeroB1
            | TimelikeCZeroA4
            | TimelikeCZeroA2
            | TimelikeCZeroA1
            | LightlikeCZeroA6
            | LightlikeCZeroA3
    );
    let (b, c) = if c_zero { (half, 0.0) } else { (rng.gen_range(-1.0..1.0), rng.gen_range(0.5..2.0)) };
    let mut f = ProfileExpr::poly(&slope_dominated(rng));
    let mut g = ProfileExpr::poly(&slope_dominated(rng));
    let mut rc = poly(rng, 2, 0.3);
    rc[0] = rng.gen_range(1.0..1.5);
    let mut r = ProfileExpr::poly(&rc);
    let mut inputs = FormulaInputs { u: Some(u), a: Some(a), b: Some(b), c: Some(c), ..FormulaInputs::default() };
    match id {
        SpacelikeCZeroA4 | TimelikeCZeroA4 => f = ProfileExpr::constant(rc[2]),
        SpacelikeCZeroA2 | SpacelikeCZeroB1 | TimelikeCZeroA2 | TimelikeCZeroA1 => {
            // f constant, g' = λ r² with r affine
            let l = rng.gen_range(0.3..1.5);
            let (p, q) = (rc[0], rc[1]);
            r = ProfileExpr::affine(p, q);
            f = ProfileExpr::constant(0.2);
            g = ProfileExpr::poly(&[0.0, l * p * p, l * p * q, l * q * q / 3.0]);
            inputs.lambda = Some(l);
            inputs.mu = Some(l);
        }
        LightlikeCZeroA3 | LightlikeCNonzeroB3 => {
            // r = 1/(−2u − λ), positive for u < −λ/2
            let l = rng.gen_range(-4.0..-3.0);
            r = ProfileExpr::Reciprocal { inner: Box::new(ProfileExpr::affine(-l, -2.0)) };
            inputs.lambda = Some(l);
            inputs.mu = Some(l);
        }
        _ => {}
    }
    let (ff, gf, rf) = (ProfileFn::from(&f), ProfileFn::from(&g), ProfileFn::from(&r));
    let (rv, r1, r2) = rf.derivs(u)?;
    let (_, f1, f2) = ff.derivs(u)?;
    let (_, g1, g2) = gf.derivs(u)?;
    inputs.r = Some(rv);
    inputs.r1 = Some(r1);
    inputs.r2 = Some(r2);
    inputs.f1 = Some(f1);
    inputs.f2 = Some(f2);
    inputs.g1 = Some(g1);
    inputs.g2 = Some(g2);
    let d = Domain::new(0.0, 1.0, -0.5, 0.5)?;
    Ok(Instance { surface: cyclic_parallel(kind, ff, gf, rf, d)?, wc: WeingartenCoeffs::new(a, b, c)?, u, inputs })
}

fn frenet_instance(id: FormulaId, rng: &mut ChaCha8Rng) -> Result<Instance> {
    let a = rng.gen_range(0.5..2.0);
    let (b, c) = match id {
        FormulaId::FrenetCNonzeroA8 | FormulaId::FrenetCNonzeroB8 => (rng.gen_range(-1.0..1.0), 1.0),
        _ => (if rng.gen_bool(0.5) { 0.5 } else { -0.5 }, 0.0),
    };
    let mut coeff = |lo: f64, hi: f64| -> Vec<f64> {
        let mut p = poly(rng, 2, 0.3);
        p[0] = rng.gen_range(lo..hi);
        p
    };
    let kappa = coeff(0.5, 1.5);
    let sigma = coeff(-1.0, 1.0);
    let alpha = coeff(-1.0, 1.0);
    let beta = if id == FormulaId::FrenetCZeroA8BetaZero { vec![0.0] } else { coeff(-1.0, 1.0) };
    let gamma = coeff(-1.0, 1.0);
    let r = coeff(0.7, 1.5);
    let pf = |p: &[f64]| ProfileFn::from(&ProfileExpr::poly(p));
    let profiles = FrenetProfiles {
        kappa: pf(&kappa),
        sigma: pf(&sigma),
        alpha: pf(&alpha),
        beta: pf(&beta),
        gamma: pf(&gamma),
        r: pf(&r),
    };
    let kind = FrenetKind::SpacelikePlanes;
    let d = Domain::new(0.0, 0.05, 0.0, std::f64::consts::TAU)?;
    let fs = frenet_cyclic(kind, profiles, FrenetState::standard(kind), 0.0, d, false)?;
    // the frame at u = 0 is the exact initial frame
    let inputs = FormulaInputs {
        u: Some(0.0),
        r: Some(r[0]),
        r1: Some(r[1]),
        r2: Some(2.0 * r[2]),
        a: Some(a),
        b: Some(b),
        c: Some(c),
        kappa: Some(kappa[0]),
        beta: Some(beta[0]),
        gamma: Some(gamma[0]),
        ..FormulaInputs::default()
    };
    Ok(Instance { surface: fs.surface, wc: WeingartenCoeffs::new(a, b, c)?, u: 0.0, inputs })
}

fn rel_diff(x: f64, y: f64) -> f64 {
    let denom = x.abs().max(y.abs());
    if denom > 0.0 {
        (x - y).abs() / denom
    } else {
        0.0
    }
}

/// Compare the extracted coefficient with the printed one over `samples`
/// random instances drawn from `seed`.
pub fn compare_formula(id: FormulaId, form: ResidualForm, samples: usize, seed: u64) -> Result<FormulaComparison> {
    if samples == 0 {
        return Err(Error::invalid("need at least one sample"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (index, series) = id.target();
    let mut out = FormulaComparison {
        id,
        form,
        samples,
        rejected: 0,
        max_rel_diff: 0.0,
        ratio_min: f64::INFINITY,
        ratio_max: f64::NEG_INFINITY,
        tolerance: COMPARISON_TOL,
        agrees: false,
        derived_rel_diff: None,
        hard: id.is_hard(),
        note: id.note().to_owned(),
    };
    let opts = ScanOptions { form, ..ScanOptions::default() };
    let mut accepted = 0;
    while accepted < samples {
        if out.rejected > MAX_REJECTIONS_PER_SAMPLE * samples {
            return Err(Error::precondition(format!("{id}: too many near-zero instances")));
        }
        let inst = match id {
            FormulaId::FrenetCZeroB8
            | FormulaId::FrenetCZeroA8BetaZero
            | FormulaId::FrenetCNonzeroA8
            | FormulaId::FrenetCNonzeroB8 => frenet_instance(id, &mut rng)?,
            _ => parallel_instance(id, &mut rng)?,
        };
        let sp = spectrum_at(&inst.surface, &inst.wc, inst.u, &opts)?;
        let pick = |index: usize, series: char| match (series, sp.mode) {
            ('B', ExpansionMode::Monomial) | ('A', _) => sp.a[index],
            _ => sp.b[index],
        };
        let printed = printed_formula(id, &inst.inputs)?;
        let derived = derived_formula(id, &inst.inputs)?;
        let reference = derived.map_or(printed, |(_, v)| v);
        // a relative comparison is meaningless next to a zero of the coefficient
        if reference.abs() < NEAR_ZERO * sp.scale {
            out.rejected += 1;
            continue;
        }
        accepted += 1;
        let extracted = pick(index, series);
        out.max_rel_diff = out.max_rel_diff.max(rel_diff(extracted, printed));
        let ratio = extracted / printed;
        out.ratio_min = out.ratio_min.min(ratio);
        out.ratio_max = out.ratio_max.max(ratio);
        if let Some(((k, ser), value)) = derived {
            let d = rel_diff(pick(k, ser), value);
            out.derived_rel_diff = Some(out.derived_rel_diff.map_or(d, |m| m.max(d)));
        }
    }
    out.agrees = out.max_rel_diff <= COMPARISON_TOL;
    Ok(out)
}
