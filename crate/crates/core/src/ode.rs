//! Explicit Dormand–Prince 5(4) integration with continuous extension.
//!
//! The step controller follows the usual mixed error norm
//! `sk = atol + rtol·max(|y0|, |y1|)`; accepted steps keep the five
//! coefficient vectors of the order-4 dense interpolant so the solution can be
//! evaluated anywhere inside the reached span.

use std::fmt;
use std::sync::Arc;

use crate::{Error, Result};

pub const DEFAULT_RTOL: f64 = 1e-10;
pub const DEFAULT_ATOL: f64 = 1e-12;
/// States with a component beyond this magnitude end the integration.
pub const BLOW_UP: f64 = 1e10;
/// Resolution of guard-event location in `t`.
pub const EVENT_TOL: f64 = 1e-12;

const MAX_STEPS: usize = 1_000_000;

// Butcher tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Error weights (difference of the 5th and 4th order solutions).
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// Dense output.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Right-hand side `(t, y, dy)`; writes `dy/dt` into `dy`.
pub type Rhs = Arc<dyn Fn(f64, &[f64], &mut [f64]) + Send + Sync>;

#[derive(Clone)]
pub struct IvpProblem {
    rhs: Rhs,
    t0: f64,
    y0: Vec<f64>,
    t_end: f64,
    rtol: f64,
    atol: f64,
    fixed_step: Option<f64>,
    max_steps: usize,
}

impl fmt::Debug for IvpProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IvpProblem")
            .field("dim", &self.y0.len())
            .field("t0", &self.t0)
            .field("t_end", &self.t_end)
            .field("rtol", &self.rtol)
            .field("atol", &self.atol)
            .field("fixed_step", &self.fixed_step)
            .finish_non_exhaustive()
    }
}

impl IvpProblem {
    /// Integrate from `(t0, y0)` towards `t_end`, which may lie on either side of `t0`.
    pub fn new<F>(t0: f64, y0: Vec<f64>, t_end: f64, rhs: F) -> Self
    where
        F: Fn(f64, &[f64], &mut [f64]) + Send + Sync + 'static,
    {
        IvpProblem {
            rhs: Arc::new(rhs),
            t0,
            y0,
            t_end,
            rtol: DEFAULT_RTOL,
            atol: DEFAULT_ATOL,
            fixed_step: None,
            max_steps: MAX_STEPS,
        }
    }

    pub fn with_tolerances(mut self, rtol: f64, atol: f64) -> Self {
        self.rtol = rtol;
        self.atol = atol;
        self
    }

    /// Disable error control and take steps of magnitude `h`.
    pub fn with_fixed_step(mut self, h: f64) -> Self {
        self.fixed_step = Some(h);
        self
    }

    pub fn with_max_steps(mut self, n: usize) -> Self {
        self.max_steps = n;
        self
    }

    pub fn dim(&self) -> usize {
        self.y0.len()
    }

    pub fn rtol(&self) -> f64 {
        self.rtol
    }

    pub fn atol(&self) -> f64 {
        self.atol
    }

    fn validate(&self) -> Result<()> {
        if self.y0.is_empty() {
            return Err(Error::invalid("empty state vector"));
        }
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return Err(Error::invalid(format!(
                "tolerances must be positive (rtol = {}, atol = {})",
                self.rtol, self.atol
            )));
        }
        if !self.t0.is_finite() || !self.t_end.is_finite() || self.t0 == self.t_end {
            return Err(Error::invalid(format!("degenerate span [{}, {}]", self.t0, self.t_end)));
        }
        if let Some(h) = self.fixed_step {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::invalid(format!("fixed step must be positive, got {h}")));
            }
        }
        if self.y0.iter().any(|x| !x.is_finite()) {
            return Err(Error::precondition("initial state is not finite"));
        }
        let mut dy = vec![0.0; self.dim()];
        (self.rhs)(self.t0, &self.y0, &mut dy);
        if dy.iter().any(|x| !x.is_finite()) {
            return Err(Error::precondition("right-hand side is not finite at the initial state"));
        }
        Ok(())
    }
}

/// Why integration stopped.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Termination {
    Completed,
    /// The guard function crossed zero at `t`.
    Event {
        t: f64,
    },
    /// A state component exceeded [`BLOW_UP`] after the step ending at `t`.
    BlowUp {
        t: f64,
    },
}

#[derive(Clone, Debug)]
struct Segment {
    t: f64,
    h: f64,
    // rcont1..rcont5, each `dim` long
    cont: Vec<f64>,
}

impl Segment {
    fn eval(&self, t: f64, dim: usize, out: &mut [f64]) {
        let th = (t - self.t) / self.h;
        let th1 = 1.0 - th;
        let r = |k: usize, i: usize| self.cont[k * dim + i];
        for (i, o) in out.iter_mut().enumerate() {
            *o = r(0, i) + th * (r(1, i) + th1 * (r(2, i) + th * (r(3, i) + th1 * r(4, i))));
        }
    }

    fn eval_derivative(&self, t: f64, dim: usize, out: &mut [f64]) {
        let th = (t - self.t) / self.h;
        let th1 = 1.0 - th;
        let r = |k: usize, i: usize| self.cont[k * dim + i];
        for (i, o) in out.iter_mut().enumerate() {
            let s = r(2, i) + th * (r(3, i) + th1 * r(4, i));
            let ds = r(3, i) + (1.0 - 2.0 * th) * r(4, i);
            *o = (r(1, i) + (1.0 - 2.0 * th) * s + th * th1 * ds) / self.h;
        }
    }
}

/// Dense solution over the reached span.
#[derive(Clone)]
pub struct DenseSolution {
    dim: usize,
    rhs: Rhs,
    mesh: Vec<f64>,
    states: Vec<Vec<f64>>,
    segments: Vec<Segment>,
    termination: Termination,
    rejected: usize,
}

impl fmt::Debug for DenseSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DenseSolution")
            .field("dim", &self.dim)
            .field("span", &self.span())
            .field("steps", &self.segments.len())
            .field("termination", &self.termination)
            .finish_non_exhaustive()
    }
}

impl DenseSolution {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `(min, max)` of the reached span.
    pub fn span(&self) -> (f64, f64) {
        let a = self.mesh[0];
        let b = *self.mesh.last().unwrap();
        (a.min(b), a.max(b))
    }

    pub fn t_start(&self) -> f64 {
        self.mesh[0]
    }

    pub fn t_end(&self) -> f64 {
        *self.mesh.last().unwrap()
    }

    pub fn termination(&self) -> Termination {
        self.termination
    }

    /// Accepted step boundaries in integration order.
    pub fn mesh(&self) -> &[f64] {
        &self.mesh
    }

    pub fn mesh_states(&self) -> &[Vec<f64>] {
        &self.states
    }

    pub fn steps(&self) -> usize {
        self.segments.len()
    }

    pub fn rejected_steps(&self) -> usize {
        self.rejected
    }

    pub fn end_state(&self) -> &[f64] {
        self.states.last().unwrap()
    }

    fn forward(&self) -> bool {
        self.t_end() > self.t_start()
    }

    fn locate(&self, t: f64) -> Result<usize> {
        let (lo, hi) = self.span();
        if !(t >= lo && t <= hi) {
            return Err(Error::OutOfSpan { t, from: lo, to: hi });
        }
        let fwd = self.forward();
        // first segment whose end lies at or beyond t in integration order
        let idx = self.mesh[1..].partition_point(|&m| if fwd { m < t } else { m > t });
        Ok(idx.min(self.segments.len() - 1))
    }

    /// Interpolated state only.
    pub fn state(&self, t: f64) -> Result<Vec<f64>> {
        if let Some(k) = self.mesh.iter().position(|&m| m == t) {
            return Ok(self.states[k].clone());
        }
        let seg = &self.segments[self.locate(t)?];
        let mut y = vec![0.0; self.dim];
        seg.eval(t, self.dim, &mut y);
        Ok(y)
    }

    /// State and its derivative `f(t, y(t))` from the right-hand side.
    pub fn eval(&self, t: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let y = self.state(t)?;
        let mut dy = vec![0.0; self.dim];
        (self.rhs)(t, &y, &mut dy);
        Ok((y, dy))
    }

    /// Time derivative of the interpolating polynomial itself.
    pub fn interpolant_derivative(&self, t: f64) -> Result<Vec<f64>> {
        let seg = &self.segments[self.locate(t)?];
        let mut dy = vec![0.0; self.dim];
        seg.eval_derivative(t, self.dim, &mut dy);
        Ok(dy)
    }
}

pub fn dense_eval(s: &DenseSolution, t: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    s.eval(t)
}

pub fn integrate_ivp(p: &IvpProblem) -> Result<DenseSolution> {
    integrate(p, None::<fn(&[f64]) -> f64>)
}

/// Integrate until `guard(y)` first reaches zero; the crossing is located by
/// bisection on the dense interpolant.
pub fn event_stop<G>(p: &IvpProblem, guard: G) -> Result<DenseSolution>
where
    G: Fn(&[f64]) -> f64,
{
    let g0 = guard(&p.y0);
    if !(g0 > 0.0) {
        return Err(Error::precondition(format!("guard must be positive at the initial state, got {g0}")));
    }
    integrate(p, Some(guard))
}

fn error_norm(y0: &[f64], y1: &[f64], err: &[f64], rtol: f64, atol: f64) -> f64 {
    let n = y0.len() as f64;
    let sum: f64 = y0
        .iter()
        .zip(y1)
        .zip(err)
        .map(|((a, b), e)| {
            let sk = atol + rtol * a.abs().max(b.abs());
            (e / sk).powi(2)
        })
        .sum();
    (sum / n).sqrt()
}

// Initial step guess after Hairer, Nørsett & Wanner, for a method of order 5.
fn initial_step(p: &IvpProblem, f0: &[f64], dir: f64, hmax: f64) -> f64 {
    let dim = p.dim();
    let sk: Vec<f64> = p.y0.iter().map(|y| p.atol + p.rtol * y.abs()).collect();
    let rms = |v: &[f64]| (v.iter().zip(&sk).map(|(x, s)| (x / s).powi(2)).sum::<f64>() / dim as f64).sqrt();
    let dnf = rms(f0);
    let dny = rms(&p.y0);
    let mut h = if dnf <= 1e-10 || dny <= 1e-10 { 1e-6 } else { 0.01 * dny / dnf };
    h = h.min(hmax);
    let y1: Vec<f64> = p.y0.iter().zip(f0).map(|(y, f)| y + dir * h * f).collect();
    let mut f1 = vec![0.0; dim];
    (p.rhs)(p.t0 + dir * h, &y1, &mut f1);
    let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let der2 = rms(&diff) / h;
    let der12 = dnf.max(der2);
    let h1 = if der12.is_finite() && der12 > 1e-15 { (0.01 / der12).powf(0.2) } else { (h * 1e-3).max(1e-6) };
    (100.0 * h).min(h1).min(hmax)
}

struct Stepper<'a> {
    p: &'a IvpProblem,
    dim: usize,
    k: [Vec<f64>; 7],
    ytmp: Vec<f64>,
}

impl<'a> Stepper<'a> {
    fn new(p: &'a IvpProblem) -> Self {
        let dim = p.dim();
        Stepper { p, dim, k: std::array::from_fn(|_| vec![0.0; dim]), ytmp: vec![0.0; dim] }
    }

    fn stage(&mut self, t: f64, y: &[f64], h: f64, coeffs: &[(usize, f64)], out: usize) {
        for i in 0..self.dim {
            let mut acc = 0.0;
            for &(j, a) in coeffs {
                acc += a * self.k[j][i];
            }
            self.ytmp[i] = y[i] + h * acc;
        }
        let mut dy = std::mem::take(&mut self.k[out]);
        (self.p.rhs)(t, &self.ytmp, &mut dy);
        self.k[out] = dy;
    }

    /// One trial step from `(t, y)` with `k[0] = f(t, y)`. Writes the new state
    /// into `y1`, the error estimate into `err`, and leaves `k[6] = f(t + h, y1)`.
    fn step(&mut self, t: f64, y: &[f64], h: f64, y1: &mut [f64], err: &mut [f64]) {
        self.stage(t + C2 * h, y, h, &[(0, A21)], 1);
        self.stage(t + C3 * h, y, h, &[(0, A31), (1, A32)], 2);
        self.stage(t + C4 * h, y, h, &[(0, A41), (1, A42), (2, A43)], 3);
        self.stage(t + C5 * h, y, h, &[(0, A51), (1, A52), (2, A53), (3, A54)], 4);
        self.stage(t + h, y, h, &[(0, A61), (1, A62), (2, A63), (3, A64), (4, A65)], 5);
        for i in 0..self.dim {
            let k = &self.k;
            y1[i] = y[i] + h * (A71 * k[0][i] + A73 * k[2][i] + A74 * k[3][i] + A75 * k[4][i] + A76 * k[5][i]);
        }
        let mut k7 = std::mem::take(&mut self.k[6]);
        (self.p.rhs)(t + h, y1, &mut k7);
        self.k[6] = k7;
        for i in 0..self.dim {
            let k = &self.k;
            err[i] = h * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i] + E5 * k[4][i] + E6 * k[5][i] + E7 * k[6][i]);
        }
    }

    fn dense(&self, y: &[f64], y1: &[f64], h: f64) -> Vec<f64> {
        let d = self.dim;
        let k = &self.k;
        let mut cont = vec![0.0; 5 * d];
        for i in 0..d {
            let ydiff = y1[i] - y[i];
            let bspl = h * k[0][i] - ydiff;
            cont[i] = y[i];
            cont[d + i] = ydiff;
            cont[2 * d + i] = bspl;
            cont[3 * d + i] = ydiff - h * k[6][i] - bspl;
            cont[4 * d + i] =
                h * (D1 * k[0][i] + D3 * k[2][i] + D4 * k[3][i] + D5 * k[4][i] + D6 * k[5][i] + D7 * k[6][i]);
        }
        cont
    }
}

fn integrate<G>(p: &IvpProblem, guard: Option<G>) -> Result<DenseSolution>
where
    G: Fn(&[f64]) -> f64,
{
    p.validate()?;
    let dim = p.dim();
    let dir = (p.t_end - p.t0).signum();
    let span = (p.t_end - p.t0).abs();
    let mut st = Stepper::new(p);
    (p.rhs)(p.t0, &p.y0, &mut st.k[0]);

    let mut t = p.t0;
    let mut y = p.y0.clone();
    let mut y1 = vec![0.0; dim];
    let mut err = vec![0.0; dim];
    let mut mesh = vec![t];
    let mut states = vec![y.clone()];
    let mut segments: Vec<Segment> = Vec::new();
    let mut termination = Termination::Completed;
    let mut rejected = 0usize;
    let mut reject_streak = false;

    let mut h = match p.fixed_step {
        Some(h) => h.min(span),
        None => initial_step(p, &st.k[0].clone(), dir, span),
    };

    let fail =
        |reason: String, t: f64| Error::Integration { reason, reached_from: p.t0.min(t), reached_to: p.t0.max(t) };

    let mut n_steps = 0usize;
    loop {
        if (p.t_end - t) * dir <= 0.0 {
            break;
        }
        n_steps += 1;
        if n_steps > p.max_steps {
            return Err(fail(format!("more than {} steps", p.max_steps), t));
        }
        // do not overshoot the end, and avoid a sliver of a last step
        let remaining = (p.t_end - t).abs();
        let sliver = if p.fixed_step.is_none() { 0.01 } else { 1e-8 };
        if h >= (1.0 - sliver) * remaining {
            h = remaining;
        }
        if h <= 1e-14 * t.abs().max(1.0) {
            return Err(fail(format!("step size underflow (h = {h:e})"), t));
        }
        let hs = dir * h;
        st.step(t, &y, hs, &mut y1, &mut err);

        let accept;
        let mut h_next = h;
        let finite = y1.iter().all(|x| x.is_finite()) && st.k[6].iter().all(|x| x.is_finite());
        if p.fixed_step.is_some() {
            if !finite {
                termination = Termination::BlowUp { t: t + hs };
                break;
            }
            accept = true;
        } else {
            let e = if finite { error_norm(&y, &y1, &err, p.rtol, p.atol) } else { f64::INFINITY };
            if e <= 1.0 {
                accept = true;
                let fac = (0.9 * e.max(1e-10).powf(-0.2)).clamp(0.2, 10.0);
                h_next = if reject_streak { h * fac.min(1.0) } else { h * fac };
                reject_streak = false;
            } else {
                accept = false;
                rejected += 1;
                reject_streak = true;
                let fac = if e.is_finite() { (0.9 * e.powf(-0.2)).max(0.2) } else { 0.2 };
                h_next = h * fac;
            }
        }
        if !accept {
            h = h_next;
            continue;
        }

        let cont = st.dense(&y, &y1, hs);
        let seg = Segment { t, h: hs, cont };
        let t_new = if h == remaining { p.t_end } else { t + hs };

        if let Some(g) = guard.as_ref() {
            if !(g(&y1) > 0.0) {
                let (te, ye) = locate_event(&seg, dim, t, t_new, g);
                mesh.push(te);
                states.push(ye);
                segments.push(seg);
                termination = Termination::Event { t: te };
                break;
            }
        }

        mesh.push(t_new);
        states.push(y1.clone());
        segments.push(seg);
        t = t_new;
        std::mem::swap(&mut y, &mut y1);
        st.k.swap(0, 6);

        if y.iter().any(|x| x.abs() > BLOW_UP) {
            termination = Termination::BlowUp { t };
            break;
        }
        h = h_next;
    }

    Ok(DenseSolution { dim, rhs: p.rhs.clone(), mesh, states, segments, termination, rejected })
}

// Bisection on the interpolant between a positive guard at `ta` and a
// non-positive one at `tb`.
fn locate_event<G>(seg: &Segment, dim: usize, ta: f64, tb: f64, g: &G) -> (f64, Vec<f64>)
where
    G: Fn(&[f64]) -> f64,
{
    let mut buf = vec![0.0; dim];
    let (mut lo, mut hi) = (ta, tb);
    while (hi - lo).abs() > EVENT_TOL {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        seg.eval(mid, dim, &mut buf);
        if g(&buf) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // stop on the positive side so the reached span keeps the guard positive
    seg.eval(lo, dim, &mut buf);
    (lo, buf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{E, FRAC_PI_2};

    fn exp_problem(t_end: f64) -> IvpProblem {
        IvpProblem::new(0.0, vec![1.0], t_end, |_, y, dy| dy[0] = y[0])
    }

    fn oscillator(t_end: f64) -> IvpProblem {
        IvpProblem::new(0.0, vec![1.0, 0.0], t_end, |_, y, dy| {
            dy[0] = y[1];
            dy[1] = -y[0];
        })
    }

    // r'' = (k r⁴ + r'² − 1)/r, f' = λ r², g' = μ r² with k = ελ² + μ²
    fn riemann(eps: f64, lam: f64, mu: f64, t_end: f64) -> IvpProblem {
        let k = eps * lam * lam + mu * mu;
        IvpProblem::new(0.0, vec![1.0, 0.0, 0.0, 0.0], t_end, move |_, y, dy| {
            let (r, rp) = (y[0], y[1]);
            dy[0] = rp;
            dy[1] = (k * r.powi(4) + rp * rp - 1.0) / r;
            dy[2] = lam * r * r;
            dy[3] = mu * r * r;
        })
    }

    #[test]
    fn exponential_growth() {
        let sol = integrate_ivp(&exp_problem(1.0)).unwrap();
        assert_eq!(sol.termination(), Termination::Completed);
        assert_eq!(sol.t_end(), 1.0);
        assert!((sol.end_state()[0] - E).abs() < 1e-8);
    }

    #[test]
    fn backward_integration() {
        let sol = integrate_ivp(&exp_problem(-2.0)).unwrap();
        assert_eq!(sol.span(), (-2.0, 0.0));
        assert!((sol.end_state()[0] - (-2f64).exp()).abs() < 1e-10);
        let (y, _) = sol.eval(-1.3).unwrap();
        assert!((y[0] - (-1.3f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn oscillator_energy() {
        let sol = integrate_ivp(&oscillator(20.0)).unwrap();
        for i in 0..=200 {
            let t = 0.1 * i as f64;
            let (y, _) = sol.eval(t).unwrap();
            assert!((y[0] * y[0] + y[1] * y[1] - 1.0).abs() < 1e-8, "t = {t}");
        }
    }

    #[test]
    fn riemann_cos_profile() {
        let sol = integrate_ivp(&riemann(1.0, 0.0, 0.0, 1.0)).unwrap();
        let (y, _) = sol.eval(0.5).unwrap();
        assert!((y[0] - 0.5f64.cos()).abs() < 1e-8);
    }

    #[test]
    fn endpoint_is_exact_and_midpoints_interpolate() {
        let sol = integrate_ivp(&exp_problem(1.0)).unwrap();
        for (t, y) in sol.mesh().iter().zip(sol.mesh_states()) {
            assert_eq!(sol.state(*t).unwrap(), *y);
        }
        let m = sol.mesh();
        for w in m.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let (y, dy) = sol.eval(mid).unwrap();
            assert!((y[0] - mid.exp()).abs() < 1e-8);
            let di = sol.interpolant_derivative(mid).unwrap();
            assert!((di[0] - dy[0]).abs() <= 1e-6 * dy[0].abs());
        }
    }

    #[test]
    fn out_of_span_is_an_error() {
        let sol = integrate_ivp(&exp_problem(1.0)).unwrap();
        assert!(matches!(sol.eval(1.5), Err(Error::OutOfSpan { .. })));
        assert!(matches!(sol.eval(-0.1), Err(Error::OutOfSpan { .. })));
    }

    #[test]
    fn derivative_slot_matches_rhs() {
        let (lam, mu) = (0.2, 0.3);
        let sol = integrate_ivp(&riemann(1.0, lam, mu, 0.8)).unwrap();
        let (y, dy) = sol.eval(0.37).unwrap();
        assert!((dy[2] - lam * y[0] * y[0]).abs() < 1e-15);
        assert!((dy[3] - mu * y[0] * y[0]).abs() < 1e-15);
    }

    #[test]
    fn guard_stops_at_first_zero() {
        let sol = event_stop(&riemann(1.0, 0.0, 0.0, 3.0), |y| y[0]).unwrap();
        match sol.termination() {
            Termination::Event { t } => assert!((t - FRAC_PI_2).abs() < 1e-6, "t = {t}"),
            other => panic!("expected event, got {other:?}"),
        }
        assert!(sol.end_state()[0] > 0.0);
    }

    #[test]
    fn guard_never_crossing_gives_full_span() {
        let sol = event_stop(&exp_problem(1.0), |y| y[0]).unwrap();
        assert_eq!(sol.termination(), Termination::Completed);
        assert_eq!(sol.span(), (0.0, 1.0));
    }

    #[test]
    fn guard_zero_at_start_is_rejected() {
        let p = IvpProblem::new(0.0, vec![0.0], 1.0, |_, _, dy| dy[0] = 1.0);
        assert!(matches!(event_stop(&p, |y| y[0]), Err(Error::Precondition(_))));
    }

    #[test]
    fn blow_up_is_reported() {
        // y' = y², y(0) = 1 explodes at t = 1
        let p = IvpProblem::new(0.0, vec![1.0], 2.0, |_, y, dy| dy[0] = y[0] * y[0]);
        match integrate_ivp(&p) {
            Ok(sol) => assert!(matches!(sol.termination(), Termination::BlowUp { .. })),
            Err(Error::Integration { reached_to, .. }) => assert!(reached_to < 1.0),
            Err(e) => panic!("unexpected error {e}"),
        }
    }

    #[test]
    fn invalid_problems() {
        assert!(integrate_ivp(&exp_problem(0.0)).is_err());
        assert!(integrate_ivp(&exp_problem(1.0).with_tolerances(0.0, 1e-12)).is_err());
        let p = IvpProblem::new(0.0, vec![1.0], 1.0, |_, _, dy| dy[0] = f64::NAN);
        assert!(matches!(integrate_ivp(&p), Err(Error::Precondition(_))));
    }

    #[test]
    fn step_budget_exhaustion_fails() {
        let p = exp_problem(1.0).with_max_steps(3);
        assert!(matches!(integrate_ivp(&p), Err(Error::Integration { .. })));
    }

    #[test]
    fn fixed_step_order() {
        let mut errs = Vec::new();
        for h in [0.2, 0.1, 0.05, 0.025] {
            let sol = integrate_ivp(&exp_problem(1.0).with_fixed_step(h)).unwrap();
            errs.push((sol.end_state()[0] - E).abs());
        }
        for w in errs.windows(2) {
            assert!(w[0] / w[1] >= 4.0, "{errs:?}");
        }
    }

    #[test]
    fn tighter_tolerance_is_more_accurate() {
        let err = |tol: f64| {
            let sol = integrate_ivp(&exp_problem(1.0).with_tolerances(tol, tol * 1e-2)).unwrap();
            (sol.end_state()[0] - E).abs()
        };
        assert!(err(1e-10) < err(1e-6));
    }

    #[test]
    fn deterministic() {
        let a = integrate_ivp(&riemann(1.0, 0.2, 0.3, 1.0)).unwrap();
        let b = integrate_ivp(&riemann(1.0, 0.2, 0.3, 1.0)).unwrap();
        assert_eq!(a.mesh(), b.mesh());
        assert_eq!(a.mesh_states(), b.mesh_states());
        assert_eq!(a.state(0.4321).unwrap(), b.state(0.4321).unwrap());
    }
}
