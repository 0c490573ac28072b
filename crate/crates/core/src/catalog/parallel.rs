//! Circles, and surfaces foliated by circles in parallel planes.

use std::f64::consts::FRAC_PI_4;

use crate::jet::ScalarJet2;
use crate::kernel::{brackets, CircleBasis, CurveJet, Domain, PointJet, SliceFrame, Surface};
use crate::lorentz::{CausalClass, MVec3};
use crate::ode::{event_stop, DenseSolution, IvpProblem, Termination};
use crate::{Error, Result};

use super::profile::ProfileFn;

/// Samples used to verify profile positivity at construction.
const PROFILE_SAMPLES: usize = 257;
/// Minimum distance to the poles of `tan 2u` and `cot 2u`.
const POLE_MARGIN: f64 = 1e-3;

/// Unit-speed circle of radius `r` in a plane of the given causal type.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Circle {
    pub kind: CausalClass,
    pub r: f64,
}

impl Circle {
    /// Position, velocity and acceleration at arc length `s`.
    pub fn eval(&self, s: f64) -> CurveJet {
        let r = self.r;
        let t = s / r;
        match self.kind {
            CausalClass::Spacelike => {
                let (sn, cs) = t.sin_cos();
                CurveJet::new(
                    MVec3::new(r * cs, r * sn, 0.0),
                    MVec3::new(-sn, cs, 0.0),
                    MVec3::new(-cs / r, -sn / r, 0.0),
                )
            }
            CausalClass::Timelike => {
                let (sh, ch) = (t.sinh(), t.cosh());
                CurveJet::new(MVec3::new(0.0, r * sh, r * ch), MVec3::new(0.0, ch, sh), MVec3::new(0.0, sh / r, ch / r))
            }
            CausalClass::Lightlike => CurveJet::new(
                MVec3::new(s, r * s * s / 2.0, r * s * s / 2.0),
                MVec3::new(1.0, r * s, r * s),
                MVec3::new(0.0, r, r),
            ),
        }
    }
}

pub fn circle(kind: CausalClass, r: f64) -> Result<Circle> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::invalid(format!("circle radius must be positive, got {r}")));
    }
    Ok(Circle { kind, r })
}

fn check_positive(name: &str, p: &ProfileFn, u_min: f64, u_max: f64) -> Result<()> {
    for i in 0..PROFILE_SAMPLES {
        let u = u_min + (u_max - u_min) * i as f64 / (PROFILE_SAMPLES - 1) as f64;
        let x = p.value(u)?;
        if !(x > 0.0) {
            return Err(Error::domain(format!("{name}(u) = {x} is not positive at u = {u}")));
        }
    }
    Ok(())
}

/// Slice data of a circle-foliated surface over parallel planes.
fn parallel_frame(kind: CausalClass, f: (f64, f64, f64), g: (f64, f64, f64), r: (f64, f64, f64), u: f64) -> SliceFrame {
    let fixed = |e: MVec3| CurveJet::new(e, MVec3::ZERO, MVec3::ZERO);
    match kind {
        // (f, g, u) + r (cos v, sin v, 0)
        CausalClass::Spacelike => SliceFrame {
            center: CurveJet::new(MVec3::new(f.0, g.0, u), MVec3::new(f.1, g.1, 1.0), MVec3::new(f.2, g.2, 0.0)),
            first: fixed(MVec3::E1).times(r),
            second: fixed(MVec3::E2).times(r),
        },
        // (u, f, g) + r (0, sinh v, cosh v)
        CausalClass::Timelike => SliceFrame {
            center: CurveJet::new(MVec3::new(u, f.0, g.0), MVec3::new(1.0, f.1, g.1), MVec3::new(0.0, f.2, g.2)),
            first: fixed(MVec3::E2).times(r),
            second: fixed(MVec3::E3).times(r),
        },
        // (f, g + u, g − u) + (v, r v²/2, r v²/2)
        CausalClass::Lightlike => SliceFrame {
            center: CurveJet::new(
                MVec3::new(f.0, g.0 + u, g.0 - u),
                MVec3::new(f.1, g.1 + 1.0, g.1 - 1.0),
                MVec3::new(f.2, g.2, g.2),
            ),
            first: fixed(MVec3::E1),
            second: fixed(MVec3::new(0.0, 0.5, 0.5)).times(r),
        },
    }
}

pub fn basis_for(kind: CausalClass) -> CircleBasis {
    match kind {
        CausalClass::Spacelike => CircleBasis::Circular,
        CausalClass::Timelike => CircleBasis::Hyperbolic,
        CausalClass::Lightlike => CircleBasis::Parabolic,
    }
}

/// Circles in the parallel planes `x3 = u` (spacelike), `x1 = u` (timelike)
/// or `x2 − x3 = 2u` (lightlike), with center profiles `f, g` and radius `r`.
pub fn cyclic_parallel(kind: CausalClass, f: ProfileFn, g: ProfileFn, r: ProfileFn, domain: Domain) -> Result<Surface> {
    domain.validate()?;
    check_positive("r", &r, domain.u_min, domain.u_max)?;
    let label = format!("cyclic-{kind}");
    Ok(Surface::cyclic(label, domain, basis_for(kind), move |u| {
        let rr = r.derivs(u)?;
        if !(rr.0 > 0.0) {
            return Err(Error::domain(format!("radius {} is not positive at u = {u}", rr.0)));
        }
        Ok(parallel_frame(kind, f.derivs(u)?, g.derivs(u)?, rr, u))
    }))
}

/// `x0 + ρ(u) (sinh u cos v, sinh u sin v, cosh u)` with `ρ = r + bump · sin u`.
pub fn pseudohyperbolic(r: f64, x0: MVec3, domain: Domain, bump: f64) -> Result<Surface> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::invalid(format!("radius must be positive, got {r}")));
    }
    domain.validate()?;
    if domain.u_min <= 0.0 && domain.u_max >= 0.0 {
        return Err(Error::domain(format!("domain [{}, {}] contains the pole u = 0", domain.u_min, domain.u_max)));
    }
    let rho = ProfileFn::constant(r).bumped(bump);
    check_positive("radius", &rho, domain.u_min, domain.u_max)?;
    Ok(Surface::cyclic("pseudohyperbolic", domain, CircleBasis::Circular, move |u| {
        let x = ScalarJet2::var_u(u);
        let p = rho.eval(u)?;
        let s = p * x.sinh();
        let c = p * x.cosh();
        let d = |j: ScalarJet2| (j.val, j.du, j.duu);
        Ok(SliceFrame {
            center: CurveJet::new(x0, MVec3::ZERO, MVec3::ZERO)
                + CurveJet::new(MVec3::E3, MVec3::ZERO, MVec3::ZERO).times(d(c)),
            first: CurveJet::new(MVec3::E1, MVec3::ZERO, MVec3::ZERO).times(d(s)),
            second: CurveJet::new(MVec3::E2, MVec3::ZERO, MVec3::ZERO).times(d(s)),
        })
    }))
}

/// Dense solutions on both sides of an initial parameter.
#[derive(Clone, Debug)]
pub struct TwoSided {
    pub u0: f64,
    pub forward: Option<DenseSolution>,
    pub backward: Option<DenseSolution>,
}

impl TwoSided {
    pub fn eval(&self, u: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let side = if u >= self.u0 { &self.forward } else { &self.backward };
        match side {
            Some(s) => s.eval(u),
            None => {
                // only the initial point can be queried without a solution on that side
                let other = self.forward.as_ref().or(self.backward.as_ref()).unwrap();
                if u == self.u0 {
                    other.eval(u)
                } else {
                    let (from, to) = other.span();
                    Err(Error::OutOfSpan { t: u, from, to })
                }
            }
        }
    }

    pub fn span(&self) -> (f64, f64) {
        let lo = self.backward.as_ref().map_or(self.u0, |s| s.span().0);
        let hi = self.forward.as_ref().map_or(self.u0, |s| s.span().1);
        (lo, hi)
    }

    /// Every accepted state on both sides.
    pub fn states(&self) -> impl Iterator<Item = &Vec<f64>> {
        let f = self.forward.iter().flat_map(|s| s.mesh_states().iter());
        let b = self.backward.iter().flat_map(|s| s.mesh_states().iter());
        f.chain(b)
    }
}

/// Integrate `p` (set up from `u0`) to cover `[u_min, u_max]`, stopping if the
/// guard reaches zero. Early termination inside the interval is an error.
pub fn integrate_two_sided<G>(
    make: impl Fn(f64) -> IvpProblem,
    u0: f64,
    u_min: f64,
    u_max: f64,
    guard: G,
) -> Result<TwoSided>
where
    G: Fn(&[f64]) -> f64 + Copy,
{
    let run = |target: f64| -> Result<Option<DenseSolution>> {
        if target == u0 {
            return Ok(None);
        }
        let sol = event_stop(&make(target), guard)?;
        match sol.termination() {
            Termination::Completed => Ok(Some(sol)),
            Termination::Event { t } | Termination::BlowUp { t } => Err(Error::Integration {
                reason: match sol.termination() {
                    Termination::Event { .. } => format!("guard reached zero at u = {t}"),
                    _ => format!("solution blew up at u = {t}"),
                },
                reached_from: u0.min(t),
                reached_to: u0.max(t),
            }),
        }
    };
    let forward = run(u_max.max(u0))?;
    let backward = run(u_min.min(u0))?;
    Ok(TwoSided { u0, forward, backward })
}

/// Parameters of the maximal family with `f' = λr²`, `g' = μr²` and
/// `1 − (ελ² + μ²)r⁴ − r'² + r r'' = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RiemannParams {
    pub epsilon: f64,
    pub lambda: f64,
    pub mu: f64,
    pub u0: f64,
    pub r0: f64,
    pub r0p: f64,
}

/// Integrate the radius equation and assemble the surface; returns it with the
/// solution used for the profiles.
pub fn riemann_maximal(p: RiemannParams, domain: Domain, bump: f64) -> Result<(Surface, TwoSided)> {
    let kind = match p.epsilon {
        1.0 => CausalClass::Spacelike,
        -1.0 => CausalClass::Timelike,
        e => return Err(Error::invalid(format!("epsilon must be 1 or -1, got {e}"))),
    };
    if !(p.r0 > 0.0) {
        return Err(Error::invalid(format!("r(u0) must be positive, got {}", p.r0)));
    }
    domain.validate()?;
    let (lam, mu) = (p.lambda, p.mu);
    let k = p.epsilon * lam * lam + mu * mu;
    let rhs = move |_: f64, y: &[f64], dy: &mut [f64]| {
        let (r, rp) = (y[0], y[1]);
        dy[0] = rp;
        dy[1] = (k * r.powi(4) + rp * rp - 1.0) / r;
        dy[2] = lam * r * r;
        dy[3] = mu * r * r;
    };
    let y0 = vec![p.r0, p.r0p, 0.0, 0.0];
    let sol = integrate_two_sided(
        |t_end| IvpProblem::new(p.u0, y0.clone(), t_end, rhs),
        p.u0,
        domain.u_min,
        domain.u_max,
        |y: &[f64]| y[0],
    )?;
    let s1 = sol.clone();
    let r = ProfileFn::new(move |u| {
        let (y, dy) = s1.eval(u)?;
        Ok(ScalarJet2::from_u_derivs(y[0], y[1], dy[1]))
    })
    .bumped(bump);
    let s2 = sol.clone();
    let f = ProfileFn::new(move |u| {
        let (y, _) = s2.eval(u)?;
        Ok(ScalarJet2::from_u_derivs(y[2], lam * y[0] * y[0], 2.0 * lam * y[0] * y[1]))
    });
    let s3 = sol.clone();
    let g = ProfileFn::new(move |u| {
        let (y, _) = s3.eval(u)?;
        Ok(ScalarJet2::from_u_derivs(y[3], mu * y[0] * y[0], 2.0 * mu * y[0] * y[1]))
    });
    let surface = cyclic_parallel(kind, f, g, r, domain)?.with_label(format!("riemann-maximal-{kind}"));
    Ok((surface, sol))
}

/// Closed-form maximal profiles over lightlike planes: `r = tan 2u`,
/// `f = λ(u + ½ cot 2u)` and the matching `g`.
pub fn lightlike_maximal_profiles(lambda: f64, mu: f64) -> (ProfileFn, ProfileFn, ProfileFn) {
    let r = ProfileFn::new(|u| (ScalarJet2::var_u(u) * 2.0).tan());
    let f = ProfileFn::new(move |u| {
        let x = ScalarJet2::var_u(u);
        Ok((x + (x * 2.0).cot()? * 0.5) * lambda)
    });
    let g = ProfileFn::new(move |u| {
        let x = ScalarJet2::var_u(u);
        let l2 = lambda * lambda;
        let body = x * (4.0 * (mu - 3.0 * l2)) - (x * 2.0).cot()? * (4.0 * l2) - (x * 4.0).sin() * (l2 - mu);
        Ok(body * (1.0 / 32.0))
    });
    (f, g, r)
}

pub fn lightlike_maximal(lambda: f64, mu: f64, domain: Domain, bump: f64) -> Result<Surface> {
    domain.validate()?;
    if domain.u_min < POLE_MARGIN || domain.u_max > FRAC_PI_4 - POLE_MARGIN {
        return Err(Error::domain(format!(
            "u-range [{}, {}] must stay {POLE_MARGIN} inside (0, π/4)",
            domain.u_min, domain.u_max
        )));
    }
    let (f, g, r) = lightlike_maximal_profiles(lambda, mu);
    Ok(cyclic_parallel(CausalClass::Lightlike, f, g, r.bumped(bump), domain)?.with_label("lightlike-maximal"))
}

/// Parameters of the flat families. For spacelike and timelike planes the
/// profiles are affine, `p(u) = p[0] + p[1] u`; for lightlike planes the
/// radius is `λ / (u + μ)` instead.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlatParams {
    pub f: [f64; 2],
    pub g: [f64; 2],
    pub r: [f64; 2],
    pub lambda: f64,
    pub mu: f64,
}

pub fn flat_family(kind: CausalClass, p: FlatParams, domain: Domain, bump: f64) -> Result<Surface> {
    domain.validate()?;
    let f = ProfileFn::affine(p.f[0], p.f[1]);
    let g = ProfileFn::affine(p.g[0], p.g[1]);
    let r = match kind {
        CausalClass::Lightlike => {
            let (lam, mu) = (p.lambda, p.mu);
            let lo = domain.u_min + mu;
            let hi = domain.u_max + mu;
            if lo.abs().min(hi.abs()) < POLE_MARGIN || lo * hi <= 0.0 {
                return Err(Error::domain(format!(
                    "u + μ must stay away from 0 on [{}, {}]",
                    domain.u_min, domain.u_max
                )));
            }
            ProfileFn::new(move |u| {
                let d = u + mu;
                Ok(ScalarJet2::from_u_derivs(lam / d, -lam / (d * d), 2.0 * lam / (d * d * d)))
            })
        }
        _ => ProfileFn::affine(p.r[0], p.r[1]),
    };
    Ok(cyclic_parallel(kind, f, g, r.bumped(bump), domain)?.with_label(format!("flat-{kind}")))
}

/// Largest all-spacelike rectangle of an `n × n` node scan, shrunk by one node
/// on every side.
pub fn spacelike_subdomain(surface: &Surface, n: usize) -> Result<Domain> {
    if n < 5 {
        return Err(Error::invalid("scan needs at least 5×5 nodes"));
    }
    let d = surface.domain();
    let us = d.u_nodes(n);
    let vs = d.v_nodes(n);
    let mut ok = vec![vec![false; n]; n];
    for (i, &u) in us.iter().enumerate() {
        for (j, &v) in vs.iter().enumerate() {
            if let Ok(jet) = surface.eval(u, v) {
                let b = brackets(&PointJet::from(&jet));
                let tol = crate::kernel::SPACELIKE_TOL * ((b.e_big * b.g_big).abs() + b.f_big * b.f_big);
                ok[i][j] = b.w > tol;
            }
        }
    }
    let (i0, i1, j0, j1) = largest_rectangle(&ok)
        .ok_or_else(|| Error::precondition(format!("no spacelike node found on {}", surface.label())))?;
    if i1 < i0 + 3 || j1 < j0 + 3 {
        return Err(Error::precondition(format!("spacelike region of {} is too thin to shrink", surface.label())));
    }
    Domain::new(us[i0 + 1], us[i1 - 1], vs[j0 + 1], vs[j1 - 1])
}

/// Inclusive index bounds `(i0, i1, j0, j1)` of the largest all-true rectangle.
fn largest_rectangle(grid: &[Vec<bool>]) -> Option<(usize, usize, usize, usize)> {
    let cols = grid.first()?.len();
    let mut heights = vec![0usize; cols];
    let mut best: Option<(usize, (usize, usize, usize, usize))> = None;
    for (i, row) in grid.iter().enumerate() {
        for (h, &cell) in heights.iter_mut().zip(row) {
            *h = if cell { *h + 1 } else { 0 };
        }
        // largest rectangle under the histogram
        let mut stack: Vec<usize> = Vec::new();
        for j in 0..=cols {
            let h = if j < cols { heights[j] } else { 0 };
            while let Some(&top) = stack.last() {
                if heights[top] < h {
                    break;
                }
                stack.pop();
                let height = heights[top];
                let left = stack.last().map_or(0, |&s| s + 1);
                let area = height * (j - left);
                if area > 0 && best.is_none_or(|(a, _)| area > a) {
                    best = Some((area, (i + 1 - height, i, left, j - 1)));
                }
            }
            stack.push(j);
        }
    }
    best.map(|(_, r)| r)
}
