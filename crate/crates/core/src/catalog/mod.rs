//! Constructors for the circle-foliated surface families.

mod frenet;
mod parallel;
mod profile;

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::kernel::{Domain, Surface, WeingartenCoeffs};
use crate::lorentz::{CausalClass, MVec3};
use crate::{Error, Result};

pub use frenet::{
    frenet_cyclic, witness_center, witness_profiles, FrenetKind, FrenetProfiles, FrenetState, FrenetSurface,
    WitnessData, FRAME_TOL, MAX_GRAM_DRIFT,
};
pub use parallel::{
    basis_for, circle, cyclic_parallel, flat_family, integrate_two_sided, lightlike_maximal,
    lightlike_maximal_profiles, pseudohyperbolic, riemann_maximal, spacelike_subdomain, Circle, FlatParams,
    RiemannParams, TwoSided,
};
pub use profile::{ProfileExpr, ProfileFn};

/// Resolution of the scan that locates the spacelike part of a surface.
pub const SUBDOMAIN_SCAN: usize = 200;

/// Profiles of a Frenet surface: either given directly, or the data making
/// it pseudohyperbolic of radius `1/(2a)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum FrenetData {
    Explicit {
        kappa: ProfileExpr,
        sigma: ProfileExpr,
        alpha: ProfileExpr,
        beta: ProfileExpr,
        gamma: ProfileExpr,
        r: ProfileExpr,
    },
    /// `sigma` is free for spacelike planes, `beta` for lightlike planes.
    PseudohyperbolicWitness {
        a: f64,
        kappa: ProfileExpr,
        r: ProfileExpr,
        #[serde(default)]
        sigma: Option<ProfileExpr>,
        #[serde(default)]
        beta: Option<ProfileExpr>,
    },
}

/// Serializable description of a catalog surface. Omitted domains fall back
/// to a family default on which the surface is spacelike.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum SurfaceSpec {
    CyclicSpacelike {
        f: ProfileExpr,
        g: ProfileExpr,
        r: ProfileExpr,
        #[serde(default)]
        domain: Option<Domain>,
    },
    CyclicTimelike {
        f: ProfileExpr,
        g: ProfileExpr,
        r: ProfileExpr,
        #[serde(default)]
        domain: Option<Domain>,
    },
    CyclicLightlike {
        f: ProfileExpr,
        g: ProfileExpr,
        r: ProfileExpr,
        #[serde(default)]
        domain: Option<Domain>,
    },
    Pseudohyperbolic {
        r: f64,
        #[serde(default = "origin")]
        x0: MVec3,
        #[serde(default)]
        domain: Option<Domain>,
    },
    RiemannMaximal {
        epsilon: f64,
        lambda: f64,
        mu: f64,
        r0: f64,
        r0p: f64,
        #[serde(default)]
        u0: f64,
        #[serde(default)]
        domain: Option<Domain>,
    },
    LightlikeMaximal {
        lambda: f64,
        mu: f64,
        #[serde(default)]
        domain: Option<Domain>,
        /// Restrict to the largest spacelike rectangle found by a node scan.
        #[serde(default = "yes")]
        spacelike_part: bool,
    },
    FlatFamily {
        kind: CausalClass,
        #[serde(default)]
        f: [f64; 2],
        #[serde(default)]
        g: [f64; 2],
        #[serde(default = "unit_radius")]
        r: [f64; 2],
        #[serde(default)]
        lambda: f64,
        #[serde(default)]
        mu: f64,
        #[serde(default)]
        domain: Option<Domain>,
    },
    FrenetSpacelike {
        data: FrenetData,
        #[serde(default)]
        init: Option<FrenetState>,
        #[serde(default)]
        u0: f64,
        #[serde(default)]
        domain: Option<Domain>,
        #[serde(default)]
        correct_drift: bool,
    },
    FrenetLightlike {
        data: FrenetData,
        #[serde(default)]
        init: Option<FrenetState>,
        #[serde(default)]
        u0: f64,
        #[serde(default)]
        domain: Option<Domain>,
        #[serde(default)]
        correct_drift: bool,
    },
    /// `base` with its radius profile shifted by `amplitude · sin u`.
    Perturbed { base: Box<SurfaceSpec>, amplitude: f64 },
}

fn origin() -> MVec3 {
    MVec3::ZERO
}

fn yes() -> bool {
    true
}

fn unit_radius() -> [f64; 2] {
    [1.0, 0.0]
}

/// A built surface with what its construction established.
#[derive(Clone, Debug)]
pub struct Construction {
    pub surface: Surface,
    /// Coefficients the family satisfies by construction, if any.
    pub expected: Option<WeingartenCoeffs>,
    /// Center of the pseudohyperbolic families.
    pub center: Option<MVec3>,
    /// Radius of the pseudohyperbolic families.
    pub radius: Option<f64>,
    pub gram_drift: Option<f64>,
    /// `u`-span covered by numerical integration.
    pub reached_span: Option<(f64, f64)>,
    pub perturbation: f64,
}

impl Construction {
    fn plain(surface: Surface) -> Self {
        Construction {
            surface,
            expected: None,
            center: None,
            radius: None,
            gram_drift: None,
            reached_span: None,
            perturbation: 0.0,
        }
    }
}

fn rect(u_min: f64, u_max: f64, v_min: f64, v_max: f64) -> Domain {
    Domain { u_min, u_max, v_min, v_max }
}

fn coeffs(a: f64, b: f64, c: f64) -> Option<WeingartenCoeffs> {
    Some(WeingartenCoeffs { a, b, c })
}

impl SurfaceSpec {
    /// Family name as used in configs and on the command line.
    pub fn family(&self) -> &'static str {
        match self {
            SurfaceSpec::CyclicSpacelike { .. } => "cyclic-spacelike",
            SurfaceSpec::CyclicTimelike { .. } => "cyclic-timelike",
            SurfaceSpec::CyclicLightlike { .. } => "cyclic-lightlike",
            SurfaceSpec::Pseudohyperbolic { .. } => "pseudohyperbolic",
            SurfaceSpec::RiemannMaximal { .. } => "riemann-maximal",
            SurfaceSpec::LightlikeMaximal { .. } => "lightlike-maximal",
            SurfaceSpec::FlatFamily { .. } => "flat-family",
            SurfaceSpec::FrenetSpacelike { .. } => "frenet-spacelike",
            SurfaceSpec::FrenetLightlike { .. } => "frenet-lightlike",
            SurfaceSpec::Perturbed { .. } => "perturbed",
        }
    }

    /// Domain the surface is built on, explicit or default.
    pub fn domain(&self) -> Domain {
        let hyp = rect(-0.5, 0.5, -0.5, 0.5);
        let par = rect(0.0, 1.0, -0.5, 0.5);
        match self {
            SurfaceSpec::CyclicSpacelike { domain, .. } => domain.unwrap_or(rect(0.0, 1.0, 0.0, TAU)),
            SurfaceSpec::CyclicTimelike { domain, .. } => domain.unwrap_or(hyp),
            SurfaceSpec::CyclicLightlike { domain, .. } => domain.unwrap_or(par),
            SurfaceSpec::Pseudohyperbolic { domain, .. } => domain.unwrap_or(rect(0.5, 1.5, 0.0, TAU)),
            SurfaceSpec::RiemannMaximal { epsilon, domain, .. } => {
                domain.unwrap_or(if *epsilon > 0.0 { rect(-0.3, 0.4, 0.0, TAU) } else { hyp })
            }
            SurfaceSpec::LightlikeMaximal { domain, .. } => domain.unwrap_or(rect(0.05, 0.75, -2.0, 2.0)),
            SurfaceSpec::FlatFamily { kind, domain, .. } => domain.unwrap_or(match kind {
                CausalClass::Spacelike => rect(0.0, 1.0, 0.0, TAU),
                _ => par,
            }),
            SurfaceSpec::FrenetSpacelike { domain, .. } => domain.unwrap_or(rect(0.0, 0.3, 0.0, TAU)),
            SurfaceSpec::FrenetLightlike { domain, .. } => domain.unwrap_or(rect(0.0, 1.0, 0.3, 1.0)),
            SurfaceSpec::Perturbed { base, .. } => base.domain(),
        }
    }

    /// Same spec on another domain.
    pub fn with_domain(&self, d: Domain) -> SurfaceSpec {
        let mut s = self.clone();
        match &mut s {
            SurfaceSpec::CyclicSpacelike { domain, .. }
            | SurfaceSpec::CyclicTimelike { domain, .. }
            | SurfaceSpec::CyclicLightlike { domain, .. }
            | SurfaceSpec::Pseudohyperbolic { domain, .. }
            | SurfaceSpec::RiemannMaximal { domain, .. }
            | SurfaceSpec::FlatFamily { domain, .. }
            | SurfaceSpec::FrenetSpacelike { domain, .. }
            | SurfaceSpec::FrenetLightlike { domain, .. } => *domain = Some(d),
            SurfaceSpec::LightlikeMaximal { domain, .. } => *domain = Some(d),
            SurfaceSpec::Perturbed { base, .. } => **base = base.with_domain(d),
        }
        s
    }

    pub fn build(&self) -> Result<Construction> {
        self.build_bumped(0.0)
    }

    fn build_bumped(&self, bump: f64) -> Result<Construction> {
        let domain = self.domain();
        domain.validate()?;
        let mut out = match self {
            SurfaceSpec::CyclicSpacelike { f, g, r, .. } => cyclic(CausalClass::Spacelike, f, g, r, domain, bump)?,
            SurfaceSpec::CyclicTimelike { f, g, r, .. } => cyclic(CausalClass::Timelike, f, g, r, domain, bump)?,
            SurfaceSpec::CyclicLightlike { f, g, r, .. } => cyclic(CausalClass::Lightlike, f, g, r, domain, bump)?,
            SurfaceSpec::Pseudohyperbolic { r, x0, .. } => {
                let mut c = Construction::plain(pseudohyperbolic(*r, *x0, domain, bump)?);
                c.expected = coeffs(1.0, -r, 0.0);
                c.center = Some(*x0);
                c.radius = Some(*r);
                c
            }
            SurfaceSpec::RiemannMaximal { epsilon, lambda, mu, r0, r0p, u0, .. } => {
                let p = RiemannParams { epsilon: *epsilon, lambda: *lambda, mu: *mu, u0: *u0, r0: *r0, r0p: *r0p };
                let (s, sol) = riemann_maximal(p, domain, bump)?;
                let mut c = Construction::plain(s);
                c.expected = coeffs(1.0, 0.0, 0.0);
                c.reached_span = Some(sol.span());
                c
            }
            SurfaceSpec::LightlikeMaximal { lambda, mu, spacelike_part, .. } => {
                let mut s = lightlike_maximal(*lambda, *mu, domain, bump)?;
                if *spacelike_part {
                    let sub = spacelike_subdomain(&s, SUBDOMAIN_SCAN)?;
                    s = s.with_domain(sub);
                }
                let mut c = Construction::plain(s);
                c.expected = coeffs(1.0, 0.0, 0.0);
                c
            }
            SurfaceSpec::FlatFamily { kind, f, g, r, lambda, mu, .. } => {
                let p = FlatParams { f: *f, g: *g, r: *r, lambda: *lambda, mu: *mu };
                let mut c = Construction::plain(flat_family(*kind, p, domain, bump)?);
                c.expected = coeffs(0.0, 1.0, 0.0);
                c
            }
            SurfaceSpec::FrenetSpacelike { data, init, u0, correct_drift, .. } => {
                frenet(FrenetKind::SpacelikePlanes, data, *init, *u0, domain, *correct_drift, bump)?
            }
            SurfaceSpec::FrenetLightlike { data, init, u0, correct_drift, .. } => {
                frenet(FrenetKind::LightlikePlanes, data, *init, *u0, domain, *correct_drift, bump)?
            }
            SurfaceSpec::Perturbed { base, amplitude } => return base.build_bumped(bump + amplitude),
        };
        out.perturbation = bump;
        if bump != 0.0 {
            out.surface = out.surface.clone().with_label(format!("{}-perturbed", out.surface.label()));
        }
        Ok(out)
    }
}

fn cyclic(
    kind: CausalClass,
    f: &ProfileExpr,
    g: &ProfileExpr,
    r: &ProfileExpr,
    d: Domain,
    bump: f64,
) -> Result<Construction> {
    let s = cyclic_parallel(kind, f.into(), g.into(), ProfileFn::from(r).bumped(bump), d)?;
    Ok(Construction::plain(s))
}

fn frenet(
    kind: FrenetKind,
    data: &FrenetData,
    init: Option<FrenetState>,
    u0: f64,
    domain: Domain,
    correct_drift: bool,
    bump: f64,
) -> Result<Construction> {
    let init = init.unwrap_or_else(|| FrenetState::standard(kind));
    let (profiles, witness) = match data {
        FrenetData::Explicit { kappa, sigma, alpha, beta, gamma, r } => (
            FrenetProfiles {
                kappa: kappa.into(),
                sigma: sigma.into(),
                alpha: alpha.into(),
                beta: beta.into(),
                gamma: gamma.into(),
                r: r.into(),
            },
            None,
        ),
        FrenetData::PseudohyperbolicWitness { a, kappa, r, sigma, beta } => {
            let free = match (kind, sigma, beta) {
                (FrenetKind::SpacelikePlanes, s, None) => s.clone(),
                (FrenetKind::LightlikePlanes, None, b) => b.clone(),
                (FrenetKind::SpacelikePlanes, _, Some(_)) => {
                    return Err(Error::Config("β is determined by the data for spacelike planes".into()))
                }
                (FrenetKind::LightlikePlanes, Some(_), _) => {
                    return Err(Error::Config("σ is determined by the data for lightlike planes".into()))
                }
            };
            let w = WitnessData {
                a: *a,
                kappa: kappa.into(),
                free: free.as_ref().map_or(ProfileFn::constant(0.0), ProfileFn::from),
                r: r.into(),
            };
            (witness_profiles(kind, &w)?, Some(w))
        }
    };
    let profiles = FrenetProfiles { r: profiles.r.bumped(bump), ..profiles };
    let fs = frenet_cyclic(kind, profiles, init, u0, domain, correct_drift)?;
    let mut c = Construction::plain(fs.surface);
    c.gram_drift = Some(fs.gram_drift);
    c.reached_span = Some(fs.solution.span());
    if let Some(w) = witness {
        c.center = Some(witness_center(kind, &w, &init, u0)?);
        c.radius = Some(1.0 / (2.0 * w.a.abs()));
        c.expected = coeffs(1.0, -1.0 / (2.0 * w.a.abs()), 0.0);
    }
    Ok(c)
}
