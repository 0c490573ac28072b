//! Surfaces swept by circles in the planes of a moving Frenet frame.

use serde::{Deserialize, Serialize};

use crate::jet::ScalarJet2;
use crate::kernel::{CircleBasis, CurveJet, Domain, SliceFrame, Surface};
use crate::lorentz::{det3, minkowski_dot, MVec3};
use crate::ode::IvpProblem;
use crate::{Error, Result};

use super::parallel::{integrate_two_sided, TwoSided};
use super::profile::ProfileFn;

/// Tolerance on the frame invariants of an initial state.
pub const FRAME_TOL: f64 = 1e-9;
/// Largest Gram-matrix deviation accepted along the integrated frame.
pub const MAX_GRAM_DRIFT: f64 = 1e-6;
const KAPPA_SAMPLES: usize = 1001;

/// Causal type of the planes `span(n, b)` (spacelike) or `span(t, n)` (lightlike).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FrenetKind {
    SpacelikePlanes,
    LightlikePlanes,
}

impl FrenetKind {
    /// Exact Gram matrix of `(t, n, b)`.
    pub fn gram(self) -> [[f64; 3]; 3] {
        match self {
            FrenetKind::SpacelikePlanes => [[-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
            FrenetKind::LightlikePlanes => [[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [1.0, 0.0, 0.0]],
        }
    }
}

/// Frame `(t, n, b)` and center point `c`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrenetState {
    pub t: MVec3,
    pub n: MVec3,
    pub b: MVec3,
    pub c: MVec3,
}

impl FrenetState {
    /// `t = e3, n = e1, b = e2` for spacelike planes; `t = (e2 + e3)/√2, n = e1,
    /// b = (e2 − e3)/√2` for lightlike planes. Center at the origin.
    pub fn standard(kind: FrenetKind) -> Self {
        match kind {
            FrenetKind::SpacelikePlanes => FrenetState { t: MVec3::E3, n: MVec3::E1, b: MVec3::E2, c: MVec3::ZERO },
            FrenetKind::LightlikePlanes => {
                let s = std::f64::consts::FRAC_1_SQRT_2;
                FrenetState { t: MVec3::new(0.0, s, s), n: MVec3::E1, b: MVec3::new(0.0, s, -s), c: MVec3::ZERO }
            }
        }
    }

    fn from_slice(y: &[f64]) -> Self {
        let v = |k: usize| MVec3::new(y[k], y[k + 1], y[k + 2]);
        FrenetState { t: v(0), n: v(3), b: v(6), c: v(9) }
    }

    fn to_vec(self) -> Vec<f64> {
        [self.t, self.n, self.b, self.c].iter().flat_map(|v| v.to_array()).collect()
    }

    /// Largest deviation of the Gram matrix from its exact value.
    pub fn gram_deviation(&self, kind: FrenetKind) -> f64 {
        let f = [self.t, self.n, self.b];
        let want = kind.gram();
        let mut worst: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((minkowski_dot(f[i], f[j]) - want[i][j]).abs());
            }
        }
        worst
    }

    pub fn check(&self, kind: FrenetKind) -> Result<()> {
        let dev = self.gram_deviation(kind);
        let det = det3(self.t, self.n, self.b);
        let det_ok = match kind {
            FrenetKind::SpacelikePlanes => (det.abs() - 1.0).abs() <= FRAME_TOL,
            FrenetKind::LightlikePlanes => (det - 1.0).abs() <= FRAME_TOL,
        };
        if dev > FRAME_TOL || !det_ok || !self.c.is_finite() {
            return Err(Error::precondition(format!(
                "initial frame is not admissible: Gram deviation {dev:e}, det {det}"
            )));
        }
        Ok(())
    }

    /// Minkowski Gram–Schmidt back onto an exact frame, keeping `t` direction.
    pub fn corrected(&self, kind: FrenetKind) -> Self {
        let (t, n, b) = (self.t, self.n, self.b);
        match kind {
            FrenetKind::SpacelikePlanes => {
                let t = t * (1.0 / (-minkowski_dot(t, t)).sqrt());
                let n = n + t * minkowski_dot(n, t);
                let n = n * (1.0 / minkowski_dot(n, n).sqrt());
                let b = b + t * minkowski_dot(b, t) - n * minkowski_dot(b, n);
                let b = b * (1.0 / minkowski_dot(b, b).sqrt());
                FrenetState { t, n, b, c: self.c }
            }
            FrenetKind::LightlikePlanes => {
                // n unit and orthogonal to the null pair, then repair the pair
                let n = n * (1.0 / minkowski_dot(n, n).sqrt());
                let t = t - n * minkowski_dot(t, n);
                let b = b - n * minkowski_dot(b, n);
                let (mut t, mut b) = (t, b);
                for _ in 0..4 {
                    t = t - b * (minkowski_dot(t, t) / (2.0 * minkowski_dot(t, b)));
                    b = b - t * (minkowski_dot(b, b) / (2.0 * minkowski_dot(t, b)));
                }
                let b = b * (1.0 / minkowski_dot(t, b));
                FrenetState { t, n, b, c: self.c }
            }
        }
    }
}

/// Curvature `κ`, torsion `σ`, center velocity components `α, β, γ` and radius `r`.
#[derive(Clone, Debug)]
pub struct FrenetProfiles {
    pub kappa: ProfileFn,
    pub sigma: ProfileFn,
    pub alpha: ProfileFn,
    pub beta: ProfileFn,
    pub gamma: ProfileFn,
    pub r: ProfileFn,
}

/// A built Frenet surface with its integration diagnostics.
#[derive(Clone, Debug)]
pub struct FrenetSurface {
    pub surface: Surface,
    pub solution: TwoSided,
    /// Largest Gram deviation over all accepted states.
    pub gram_drift: f64,
}

fn frame_rhs(kind: FrenetKind, k: f64, s: f64, y: &[f64], dy: &mut [f64]) {
    for i in 0..3 {
        let (t, n, b) = (y[i], y[3 + i], y[6 + i]);
        dy[i] = k * n;
        match kind {
            FrenetKind::SpacelikePlanes => dy[3 + i] = k * t + s * b,
            FrenetKind::LightlikePlanes => dy[3 + i] = s * t - k * b,
        }
        dy[6 + i] = -s * n;
    }
}

/// Frame vectors with first and second `u`-derivatives from the Frenet system.
fn frame_jets(kind: FrenetKind, st: &FrenetState, k: (f64, f64, f64), s: (f64, f64, f64)) -> [CurveJet; 3] {
    let (t, n, b) = (st.t, st.n, st.b);
    let (k0, k1, _) = k;
    let (s0, s1, _) = s;
    match kind {
        FrenetKind::SpacelikePlanes => {
            let dn = t * k0 + b * s0;
            [
                CurveJet::new(t, n * k0, n * k1 + dn * k0),
                CurveJet::new(n, dn, t * k1 + n * (k0 * k0) + b * s1 - n * (s0 * s0)),
                CurveJet::new(b, n * -s0, n * -s1 - dn * s0),
            ]
        }
        FrenetKind::LightlikePlanes => {
            let dn = t * s0 - b * k0;
            [
                CurveJet::new(t, n * k0, n * k1 + dn * k0),
                CurveJet::new(n, dn, t * s1 + n * (2.0 * k0 * s0) - b * k1),
                CurveJet::new(b, n * -s0, n * -s1 - dn * s0),
            ]
        }
    }
}

fn check_kappa(kappa: &ProfileFn, lo: f64, hi: f64) -> Result<()> {
    let mut sign = 0.0;
    for i in 0..KAPPA_SAMPLES {
        let u = lo + (hi - lo) * i as f64 / (KAPPA_SAMPLES - 1) as f64;
        let k = kappa.value(u)?;
        if k == 0.0 || (sign != 0.0 && k.signum() != sign) {
            return Err(Error::precondition(format!("curvature vanishes near u = {u}")));
        }
        sign = k.signum();
    }
    Ok(())
}

/// Integrate the frame and center from `init` at `u0`, then sweep the circles
/// `c + r(cos v n + sin v b)` or `c + v n + r v² t`.
pub fn frenet_cyclic(
    kind: FrenetKind,
    profiles: FrenetProfiles,
    init: FrenetState,
    u0: f64,
    domain: Domain,
    correct_drift: bool,
) -> Result<FrenetSurface> {
    domain.validate()?;
    init.check(kind)?;
    let lo = domain.u_min.min(u0);
    let hi = domain.u_max.max(u0);
    check_kappa(&profiles.kappa, lo, hi)?;
    let p = profiles.clone();
    let rhs = move |u: f64, y: &[f64], dy: &mut [f64]| {
        let val = |f: &ProfileFn| f.value(u).unwrap_or(f64::NAN);
        frame_rhs(kind, val(&p.kappa), val(&p.sigma), y, dy);
        let (al, be, ga) = (val(&p.alpha), val(&p.beta), val(&p.gamma));
        for i in 0..3 {
            dy[9 + i] = al * y[i] + be * y[3 + i] + ga * y[6 + i];
        }
    };
    let y0 = init.to_vec();
    let solution = integrate_two_sided(
        |t_end| IvpProblem::new(u0, y0.clone(), t_end, rhs.clone()),
        u0,
        domain.u_min,
        domain.u_max,
        |_: &[f64]| 1.0,
    )?;
    let gram_drift = solution.states().map(|y| FrenetState::from_slice(y).gram_deviation(kind)).fold(0.0, f64::max);
    if !correct_drift && !(gram_drift <= MAX_GRAM_DRIFT) {
        let (from, to) = solution.span();
        return Err(Error::Integration {
            reason: format!("frame Gram drift {gram_drift:e} exceeds {MAX_GRAM_DRIFT:e}"),
            reached_from: from,
            reached_to: to,
        });
    }
    let sol = solution.clone();
    let basis = match kind {
        FrenetKind::SpacelikePlanes => CircleBasis::Circular,
        FrenetKind::LightlikePlanes => CircleBasis::Parabolic,
    };
    let label = match kind {
        FrenetKind::SpacelikePlanes => "frenet-spacelike",
        FrenetKind::LightlikePlanes => "frenet-lightlike",
    };
    let surface = Surface::cyclic(label, domain, basis, move |u| {
        let (y, _) = sol.eval(u)?;
        let mut st = FrenetState::from_slice(&y);
        if correct_drift {
            st = st.corrected(kind);
        }
        let pr = &profiles;
        let (k, s, r) = (pr.kappa.derivs(u)?, pr.sigma.derivs(u)?, pr.r.derivs(u)?);
        if !(r.0 > 0.0) {
            return Err(Error::domain(format!("radius {} is not positive at u = {u}", r.0)));
        }
        let [tj, nj, bj] = frame_jets(kind, &st, k, s);
        let (a, be, ga) = (pr.alpha.derivs(u)?, pr.beta.derivs(u)?, pr.gamma.derivs(u)?);
        let dc = st.t * a.0 + st.n * be.0 + st.b * ga.0;
        let ddc = st.t * a.1 + tj.d1 * a.0 + st.n * be.1 + nj.d1 * be.0 + st.b * ga.1 + bj.d1 * ga.0;
        let center = CurveJet::new(st.c, dc, ddc);
        Ok(match kind {
            FrenetKind::SpacelikePlanes => SliceFrame { center, first: nj.times(r), second: bj.times(r) },
            FrenetKind::LightlikePlanes => SliceFrame { center, first: nj, second: tj.times(r) },
        })
    });
    Ok(FrenetSurface { surface, solution, gram_drift })
}

/// Free data of the pseudohyperbolic Frenet surfaces: `a` and the profiles
/// `κ`, `r`, plus `σ` (spacelike planes) or `β` (lightlike planes).
#[derive(Clone, Debug)]
pub struct WitnessData {
    pub a: f64,
    pub kappa: ProfileFn,
    pub free: ProfileFn,
    pub r: ProfileFn,
}

/// Profiles making the Frenet surface a pseudohyperbolic surface of radius
/// `1/(2a)`, together with its center `c0` relative to the frame at `u0`.
pub fn witness_profiles(kind: FrenetKind, w: &WitnessData) -> Result<FrenetProfiles> {
    if !(w.a.is_finite() && w.a != 0.0) {
        return Err(Error::invalid(format!("a must be finite and nonzero, got {}", w.a)));
    }
    let a2 = w.a * w.a;
    let (kappa, r) = (w.kappa.clone(), w.r.clone());
    Ok(match kind {
        FrenetKind::SpacelikePlanes => {
            // ρ = √(1/(4a²) + r²), β = κρ, α = r r'/ρ, γ = 0
            let rr = r.clone();
            let rho = move |u: f64| -> Result<ScalarJet2> {
                let r = rr.eval(u)?;
                (r * r + 0.25 / a2).sqrt()
            };
            let (k2, rho2, r2) = (kappa.clone(), rho.clone(), r.clone());
            FrenetProfiles {
                kappa,
                sigma: w.free.clone(),
                alpha: ProfileFn::new(move |u| {
                    let r = r2.eval(u)?;
                    (r * ScalarJet2::from_u_derivs(r.du, r.duu, 0.0)).try_div(rho2(u)?)
                }),
                beta: ProfileFn::new(move |u| Ok(k2.eval(u)? * rho(u)?)),
                gamma: ProfileFn::constant(0.0),
                r,
            }
        }
        FrenetKind::LightlikePlanes => {
            // γ = r'/(2r²), α = r'/(4a²), 2a²σ = 4a²rβ − r²κ
            let (r1, r2, r3) = (r.clone(), r.clone(), r.clone());
            let (k1, b1) = (kappa.clone(), w.free.clone());
            let d1 = |r: ScalarJet2| ScalarJet2::from_u_derivs(r.du, r.duu, 0.0);
            FrenetProfiles {
                kappa,
                sigma: ProfileFn::new(move |u| {
                    let r = r1.eval(u)?;
                    Ok((r * b1.eval(u)? * (4.0 * a2) - r * r * k1.eval(u)?) * (0.5 / a2))
                }),
                alpha: ProfileFn::new(move |u| Ok(d1(r2.eval(u)?) * (0.25 / a2))),
                beta: w.free.clone(),
                gamma: ProfileFn::new(move |u| {
                    let r = r3.eval(u)?;
                    d1(r).try_div(r * r * 2.0)
                }),
                r,
            }
        }
    })
}

/// Center of the pseudohyperbolic witness, from the data at `u0`.
pub fn witness_center(kind: FrenetKind, w: &WitnessData, init: &FrenetState, u0: f64) -> Result<MVec3> {
    let a2 = w.a * w.a;
    let r0 = w.r.value(u0)?;
    Ok(match kind {
        FrenetKind::SpacelikePlanes => init.c - init.t * (0.25 / a2 + r0 * r0).sqrt(),
        FrenetKind::LightlikePlanes => init.c - init.t * (r0 / (4.0 * a2)) + init.b * (1.0 / (2.0 * r0)),
    })
}
