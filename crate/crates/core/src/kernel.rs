//! Fundamental forms, curvatures and Weingarten residuals.
//!
//! Everything here works from the second-order jet of a parametrization at a
//! point. The Gauss map is `Xu ∧ Xv / |Xu ∧ Xv|` in the surface's own `(u, v)`
//! order; the sign of `H` follows from that choice.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::jet::{ScalarJet2, VecJet2};
use crate::lorentz::{lorentz_cross, lorentz_norm, minkowski_dot, LorentzTransform, MVec3};
use crate::{Error, Result};

/// Relative tolerance on `|Xu ∧ Xv|` against `|Xu|_E |Xv|_E`.
pub const DEGENERACY_TOL: f64 = 1e-12;
/// Relative tolerance on `W` against `|E G| + F²`.
pub const SPACELIKE_TOL: f64 = 1e-12;
/// Round-off level of a bracket relative to its bound `|Xu| |Xv| |Xij|`.
pub const BRACKET_FLOOR: f64 = 1e-10;

#[allow(non_snake_case)]
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FundamentalForms {
    pub E: f64,
    pub F: f64,
    pub G: f64,
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub W: f64,
}

#[allow(non_snake_case)]
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvaturePair {
    pub H: f64,
    pub K: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeingartenCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl WeingartenCoeffs {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        let wc = WeingartenCoeffs { a, b, c };
        wc.validate()?;
        Ok(wc)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.b.is_finite() && self.c.is_finite()) {
            return Err(Error::invalid("Weingarten coefficients must be finite"));
        }
        if self.a == 0.0 && self.b == 0.0 {
            return Err(Error::invalid("Weingarten coefficients need a² + b² ≠ 0"));
        }
        Ok(())
    }

    /// The same relation for the opposite orientation.
    pub fn flipped(&self) -> Self {
        WeingartenCoeffs { a: -self.a, ..*self }
    }
}

impl fmt::Display for WeingartenCoeffs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(a, b, c) = ({}, {}, {})", self.a, self.b, self.c)
    }
}

/// Closed parameter rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub u_min: f64,
    pub u_max: f64,
    pub v_min: f64,
    pub v_max: f64,
}

impl Domain {
    pub fn new(u_min: f64, u_max: f64, v_min: f64, v_max: f64) -> Result<Self> {
        let d = Domain { u_min, u_max, v_min, v_max };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = [self.u_min, self.u_max, self.v_min, self.v_max].iter().all(|x| x.is_finite());
        if !ok || self.u_min >= self.u_max || self.v_min >= self.v_max {
            return Err(Error::invalid(format!(
                "empty or non-finite domain [{}, {}] × [{}, {}]",
                self.u_min, self.u_max, self.v_min, self.v_max
            )));
        }
        Ok(())
    }

    pub fn contains(&self, u: f64, v: f64) -> bool {
        u >= self.u_min && u <= self.u_max && v >= self.v_min && v <= self.v_max
    }

    /// Evenly spaced nodes including both ends; `n ≥ 2`.
    pub fn u_nodes(&self, n: usize) -> Vec<f64> {
        linspace(self.u_min, self.u_max, n)
    }

    pub fn v_nodes(&self, n: usize) -> Vec<f64> {
        linspace(self.v_min, self.v_max, n)
    }

    /// Row-major `(u, v)` grid, `u` outermost.
    pub fn grid(&self, nu: usize, nv: usize) -> Vec<(f64, f64)> {
        let vs = self.v_nodes(nv);
        self.u_nodes(nu).into_iter().flat_map(|u| vs.iter().map(move |&v| (u, v))).collect()
    }
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n).map(|i| if i == n - 1 { b } else { a + (b - a) * (i as f64) / ((n - 1) as f64) }).collect(),
    }
}

/// Position and two derivatives of a curve `u ↦ p(u)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CurveJet {
    pub pos: MVec3,
    pub d1: MVec3,
    pub d2: MVec3,
}

impl CurveJet {
    pub fn new(pos: MVec3, d1: MVec3, d2: MVec3) -> Self {
        CurveJet { pos, d1, d2 }
    }

    pub fn scaled(self, s: f64) -> Self {
        CurveJet::new(self.pos * s, self.d1 * s, self.d2 * s)
    }

    /// Product with a scalar profile given as `(value, first, second)` derivatives.
    pub fn times(self, s: (f64, f64, f64)) -> Self {
        let (s0, s1, s2) = s;
        CurveJet::new(self.pos * s0, self.d1 * s0 + self.pos * s1, self.d2 * s0 + self.d1 * (2.0 * s1) + self.pos * s2)
    }

    fn vec_jet(&self) -> VecJet2 {
        VecJet2::from_u_derivs(self.pos, self.d1, self.d2)
    }
}

impl Add for CurveJet {
    type Output = CurveJet;
    fn add(self, o: CurveJet) -> CurveJet {
        CurveJet::new(self.pos + o.pos, self.d1 + o.d1, self.d2 + o.d2)
    }
}

/// Data of one foliation slice: `X(u, v) = center(u) + φ1(v)·first(u) + φ2(v)·second(u)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SliceFrame {
    pub center: CurveJet,
    pub first: CurveJet,
    pub second: CurveJet,
}

/// The pair `(φ1, φ2)` of functions of `v` spanning each slice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CircleBasis {
    /// `(cos v, sin v)`.
    Circular,
    /// `(sinh v, cosh v)`.
    Hyperbolic,
    /// `(v, v²)`.
    Parabolic,
}

impl CircleBasis {
    fn jets(self, v: f64) -> (ScalarJet2, ScalarJet2) {
        let jv = ScalarJet2::var_v(v);
        match self {
            CircleBasis::Circular => (jv.cos(), jv.sin()),
            CircleBasis::Hyperbolic => (jv.sinh(), jv.cosh()),
            CircleBasis::Parabolic => (jv, jv * jv),
        }
    }

    /// `(φ, φ', φ'')` for both basis functions at a complex argument.
    pub fn complex(self, v: Complex64) -> [(Complex64, Complex64, Complex64); 2] {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        match self {
            CircleBasis::Circular => {
                let (c, s) = (v.cos(), v.sin());
                [(c, -s, -c), (s, c, -s)]
            }
            CircleBasis::Hyperbolic => {
                let (s, c) = (v.sinh(), v.cosh());
                [(s, c, s), (c, s, c)]
            }
            CircleBasis::Parabolic => [(v, one, zero), (v * v, v * 2.0, one * 2.0)],
        }
    }
}

type MapFn = dyn Fn(f64, f64) -> Result<VecJet2> + Send + Sync;
type FrameFn = dyn Fn(f64) -> Result<SliceFrame> + Send + Sync;

#[derive(Clone)]
enum Kind {
    Map(Arc<MapFn>),
    Cyclic { basis: CircleBasis, frame: Arc<FrameFn> },
}

/// An evaluable parametrization over a rectangle.
#[derive(Clone)]
pub struct Surface {
    label: String,
    domain: Domain,
    kind: Kind,
    post: LorentzTransform,
    swapped: bool,
}

impl fmt::Debug for Surface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Surface")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .field("basis", &self.basis())
            .field("swapped", &self.swapped)
            .finish_non_exhaustive()
    }
}

impl Surface {
    /// Surface given directly by a jet-valued map.
    pub fn from_map<F>(label: impl Into<String>, domain: Domain, map: F) -> Self
    where
        F: Fn(f64, f64) -> Result<VecJet2> + Send + Sync + 'static,
    {
        Surface {
            label: label.into(),
            domain,
            kind: Kind::Map(Arc::new(map)),
            post: LorentzTransform::identity(),
            swapped: false,
        }
    }

    /// Surface foliated by the curves `v ↦ center + φ1·first + φ2·second`.
    pub fn cyclic<F>(label: impl Into<String>, domain: Domain, basis: CircleBasis, frame: F) -> Self
    where
        F: Fn(f64) -> Result<SliceFrame> + Send + Sync + 'static,
    {
        Surface {
            label: label.into(),
            domain,
            kind: Kind::Cyclic { basis, frame: Arc::new(frame) },
            post: LorentzTransform::identity(),
            swapped: false,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// Slice basis for foliated surfaces in their original parameter order.
    pub fn basis(&self) -> Option<CircleBasis> {
        match (&self.kind, self.swapped) {
            (Kind::Cyclic { basis, .. }, false) => Some(*basis),
            _ => None,
        }
    }

    /// Slice data at `u` for foliated surfaces, before any post-transform.
    pub fn slice_frame(&self, u: f64) -> Result<SliceFrame> {
        match &self.kind {
            Kind::Cyclic { frame, .. } => frame(u),
            Kind::Map(_) => Err(Error::precondition("surface is not foliated by slices")),
        }
    }

    /// Image under the affine map `m` (applied after any existing map).
    pub fn transformed(&self, m: &LorentzTransform) -> Self {
        let mut s = self.clone();
        s.post = m.compose(&self.post);
        s
    }

    /// Homothety `X ↦ ρ X`.
    pub fn scaled(&self, rho: f64) -> Self {
        self.transformed(&LorentzTransform::scaling(rho))
    }

    /// Same surface with the roles of `u` and `v` exchanged.
    pub fn swapped(&self) -> Self {
        let mut s = self.clone();
        s.swapped = !s.swapped;
        let d = self.domain;
        s.domain = Domain { u_min: d.v_min, u_max: d.v_max, v_min: d.u_min, v_max: d.u_max };
        s
    }

    fn eval_raw(&self, u: f64, v: f64) -> Result<VecJet2> {
        match &self.kind {
            Kind::Map(f) => f(u, v),
            Kind::Cyclic { basis, frame } => {
                let fr = frame(u)?;
                let (p1, p2) = basis.jets(v);
                Ok(fr.center.vec_jet() + fr.first.vec_jet() * p1 + fr.second.vec_jet() * p2)
            }
        }
    }

    /// Jet of the parametrization at `(u, v)`.
    pub fn eval(&self, u: f64, v: f64) -> Result<VecJet2> {
        if !(u.is_finite() && v.is_finite()) {
            return Err(Error::domain(format!("non-finite parameters ({u}, {v})")));
        }
        let j = if self.swapped { self.eval_raw(v, u)?.swap_uv() } else { self.eval_raw(u, v)? };
        let j = j.transform(&self.post);
        if !j.is_finite() {
            return Err(Error::domain(format!("non-finite jet of {} at ({u}, {v})", self.label)));
        }
        Ok(j)
    }

    pub fn point(&self, u: f64, v: f64) -> Result<MVec3> {
        Ok(self.eval(u, v)?.point())
    }

    /// Jet at a complex slice parameter, used to read off hyperbolic harmonics.
    pub fn eval_complex(&self, u: f64, v: Complex64) -> Result<PointJet<Complex64>> {
        let (basis, frame) = match (&self.kind, self.swapped) {
            (Kind::Cyclic { basis, frame }, false) => (*basis, frame),
            _ => {
                return Err(Error::precondition(
                    "complex evaluation needs a foliated surface in its own parameter order",
                ))
            }
        };
        let fr = frame(u)?;
        let [(a0, a1, a2), (b0, b1, b2)] = basis.complex(v);
        let c = |p: MVec3| -> V3<Complex64> {
            let q = self.post.apply_linear(p);
            [q.x1.into(), q.x2.into(), q.x3.into()]
        };
        let lin = |x: MVec3, s: Complex64, y: MVec3, t: Complex64| -> V3<Complex64> {
            let (x, y) = (c(x), c(y));
            [x[0] * s + y[0] * t, x[1] * s + y[1] * t, x[2] * s + y[2] * t]
        };
        let add = |p: V3<Complex64>, q: V3<Complex64>| [p[0] + q[0], p[1] + q[1], p[2] + q[2]];
        let origin = {
            let o = self.post.apply(fr.center.pos);
            [o.x1.into(), o.x2.into(), o.x3.into()]
        };
        let (f, s) = (&fr.first, &fr.second);
        Ok(PointJet {
            x: add(origin, lin(f.pos, a0, s.pos, b0)),
            xu: add(c(fr.center.d1), lin(f.d1, a0, s.d1, b0)),
            xv: lin(f.pos, a1, s.pos, b1),
            xuu: add(c(fr.center.d2), lin(f.d2, a0, s.d2, b0)),
            xuv: lin(f.d1, a1, s.d1, b1),
            xvv: lin(f.pos, a2, s.pos, b2),
        })
    }
}

/// Scalars over which the bracket identities are evaluated: reals, and
/// complex numbers for the analytically continued slice parameter.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Mul<f64, Output = Self>
    + Send
    + Sync
{
    fn from_real(x: f64) -> Self;
    fn magnitude(self) -> f64;
}

impl Scalar for f64 {
    fn from_real(x: f64) -> Self {
        x
    }
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

pub type V3<T> = [T; 3];

/// The six vectors `X, Xu, Xv, Xuu, Xuv, Xvv` over a [`Scalar`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointJet<T> {
    pub x: V3<T>,
    pub xu: V3<T>,
    pub xv: V3<T>,
    pub xuu: V3<T>,
    pub xuv: V3<T>,
    pub xvv: V3<T>,
}

impl From<&VecJet2> for PointJet<f64> {
    fn from(j: &VecJet2) -> Self {
        PointJet {
            x: j.point().to_array(),
            xu: j.xu().to_array(),
            xv: j.xv().to_array(),
            xuu: j.xuu().to_array(),
            xuv: j.xuv().to_array(),
            xvv: j.xvv().to_array(),
        }
    }
}

fn dot_g<T: Scalar>(a: V3<T>, b: V3<T>) -> T {
    a[0] * b[0] + a[1] * b[1] - a[2] * b[2]
}

fn det_g<T: Scalar>(a: V3<T>, b: V3<T>, c: V3<T>) -> T {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) + a[2] * (b[0] * c[1] - b[1] * c[0])
}

/// Bracket quantities of a jet: first form, `[Xu, Xv, X··]` determinants and
/// the combinations `P = 2HW^{3/2}`, `Q = KW²`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Brackets<T> {
    pub e_big: T,
    pub f_big: T,
    pub g_big: T,
    pub w: T,
    pub d_uu: T,
    pub d_uv: T,
    pub d_vv: T,
    pub p: T,
    pub q: T,
}

pub fn brackets<T: Scalar>(j: &PointJet<T>) -> Brackets<T> {
    let e_big = dot_g(j.xu, j.xu);
    let f_big = dot_g(j.xu, j.xv);
    let g_big = dot_g(j.xv, j.xv);
    let d_uu = det_g(j.xu, j.xv, j.xuu);
    let d_uv = det_g(j.xu, j.xv, j.xuv);
    let d_vv = det_g(j.xu, j.xv, j.xvv);
    Brackets {
        e_big,
        f_big,
        g_big,
        w: e_big * g_big - f_big * f_big,
        d_uu,
        d_uv,
        d_vv,
        p: g_big * d_uu - f_big * d_uv * 2.0 + e_big * d_vv,
        q: d_uu * d_vv - d_uv * d_uv,
    }
}

/// Value of the rationalized residual together with the magnitude of its
/// largest additive contribution (for relative thresholds).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidualTerms<T> {
    pub phi: T,
    pub scale: f64,
}

/// `Φ = a²P²W − 4(cW² − bQ)²` and its term scale.
///
/// The scale expands `P` and `Q` into their bracket products so that
/// cancellation inside them shows up as a small `|Φ| / scale`. Each bracket
/// magnitude is floored at its round-off level, a fraction of the bound
/// `|Xu| |Xv| |Xij|`, so a residual whose brackets all vanish stays 0/scale
/// rather than noise/noise.
pub fn rationalized_terms<T: Scalar>(j: &PointJet<T>, wc: &WeingartenCoeffs) -> ResidualTerms<T> {
    let b = brackets(j);
    let (a2, bb, cc) = (wc.a * wc.a, wc.b, wc.c);
    let inner = b.w * b.w * cc - b.q * bb;
    let phi = b.p * b.p * b.w * a2 - inner * inner * 4.0;
    let m = |x: T| x.magnitude();
    let len = |v: V3<T>| v.iter().map(|x| x.magnitude().powi(2)).sum::<f64>().sqrt();
    let base = len(j.xu) * len(j.xv);
    let floored = |x: T, bound: f64| m(x) + BRACKET_FLOOR * bound;
    let m_uu = floored(b.d_uu, base * len(j.xuu));
    let m_uv = floored(b.d_uv, base * len(j.xuv));
    let m_vv = floored(b.d_vv, base * len(j.xvv));
    let w_scale = floored(b.w, base * base);
    let p_scale = m(b.g_big) * m_uu + 2.0 * m(b.f_big) * m_uv + m(b.e_big) * m_vv;
    let q_scale = m_uu * m_vv + m_uv * m_uv;
    let t1 = a2 * p_scale * p_scale * w_scale;
    let t2 = 4.0 * (cc.abs() * w_scale * w_scale + bb.abs() * q_scale).powi(2);
    ResidualTerms { phi, scale: t1.max(t2) }
}

pub fn rationalized_residual(j: &VecJet2, wc: &WeingartenCoeffs) -> f64 {
    rationalized_terms(&PointJet::from(j), wc).phi
}

pub fn bracket_p(j: &VecJet2) -> f64 {
    brackets(&PointJet::from(j)).p
}

pub fn bracket_q(j: &VecJet2) -> f64 {
    brackets(&PointJet::from(j)).q
}

/// Unit normal `Xu ∧ Xv / |Xu ∧ Xv|`.
pub fn gauss_map(j: &VecJet2) -> Result<MVec3> {
    let (xu, xv) = (j.xu(), j.xv());
    let n = lorentz_cross(xu, xv);
    let norm = lorentz_norm(n);
    let tol = DEGENERACY_TOL * xu.euclidean_norm() * xv.euclidean_norm();
    if !(norm > tol) || !norm.is_finite() {
        return Err(Error::Degenerate { norm, tolerance: tol });
    }
    Ok(n / norm)
}

pub fn fundamental_forms(j: &VecJet2) -> Result<FundamentalForms> {
    let normal = gauss_map(j)?;
    let (xu, xv) = (j.xu(), j.xv());
    let e_big = minkowski_dot(xu, xu);
    let f_big = minkowski_dot(xu, xv);
    let g_big = minkowski_dot(xv, xv);
    Ok(FundamentalForms {
        E: e_big,
        F: f_big,
        G: g_big,
        e: minkowski_dot(normal, j.xuu()),
        f: minkowski_dot(normal, j.xuv()),
        g: minkowski_dot(normal, j.xvv()),
        W: e_big * g_big - f_big * f_big,
    })
}

fn w_tolerance(ff: &FundamentalForms) -> f64 {
    SPACELIKE_TOL * ((ff.E * ff.G).abs() + ff.F * ff.F)
}

/// Mean and Gauss curvature at a spacelike point.
pub fn curvatures(j: &VecJet2) -> Result<CurvaturePair> {
    let ff = fundamental_forms(j)?;
    curvatures_from_forms(&ff)
}

pub fn curvatures_from_forms(ff: &FundamentalForms) -> Result<CurvaturePair> {
    let tol = w_tolerance(ff);
    if !(ff.W > tol) {
        return Err(Error::NonSpacelike { w: ff.W, tolerance: tol });
    }
    Ok(CurvaturePair {
        H: 0.5 * (ff.e * ff.G - 2.0 * ff.f * ff.F + ff.g * ff.E) / ff.W,
        K: (ff.e * ff.g - ff.f * ff.f) / ff.W,
    })
}

pub fn weingarten_residual(cp: &CurvaturePair, wc: &WeingartenCoeffs) -> f64 {
    wc.a * cp.H + wc.b * cp.K - wc.c
}

/// Outcome of a `W`-sign scan over a grid.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpacelikeScan {
    pub spacelike: bool,
    pub min_w: f64,
    pub argmin: (f64, f64),
    pub failed_nodes: usize,
}

/// `W` at every node of an `nu × nv` grid over the surface domain.
pub fn spacelike_check(surface: &Surface, nu: usize, nv: usize) -> Result<SpacelikeScan> {
    if nu < 2 || nv < 2 {
        return Err(Error::invalid(format!("grid {nu}×{nv} is smaller than 2×2")));
    }
    let mut scan =
        SpacelikeScan { spacelike: true, min_w: f64::INFINITY, argmin: (f64::NAN, f64::NAN), failed_nodes: 0 };
    for (u, v) in surface.domain().grid(nu, nv) {
        let ff = surface.eval(u, v).and_then(|j| fundamental_forms(&j));
        match ff {
            Ok(ff) => {
                if ff.W < scan.min_w {
                    scan.min_w = ff.W;
                    scan.argmin = (u, v);
                }
                if !(ff.W > w_tolerance(&ff)) {
                    scan.failed_nodes += 1;
                }
            }
            Err(_) => scan.failed_nodes += 1,
        }
    }
    scan.spacelike = scan.failed_nodes == 0;
    Ok(scan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::ScalarJet2 as J;
    use proptest::prelude::*;

    fn dom() -> Domain {
        Domain::new(-1.0, 1.0, -1.0, 1.0).unwrap()
    }

    fn plane() -> Surface {
        Surface::from_map("plane", dom(), |u, v| Ok(VecJet2::new(J::var_u(u), J::var_v(v), J::constant(0.0))))
    }

    // x0 + r (sinh u cos v, sinh u sin v, cosh u)
    fn pseudo(r: f64) -> Surface {
        let d = Domain::new(0.5, 2.0, 0.0, std::f64::consts::TAU).unwrap();
        Surface::from_map("pseudohyperbolic", d, move |u, v| {
            let (ju, jv) = (J::var_u(u), J::var_v(v));
            Ok(VecJet2::new(ju.sinh() * jv.cos() * r, ju.sinh() * jv.sin() * r, ju.cosh() * r))
        })
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn plane_forms() {
        let j = plane().eval(0.3, -0.2).unwrap();
        let g = gauss_map(&j).unwrap();
        assert_eq!(g.x3.abs(), 1.0);
        assert_eq!(minkowski_dot(g, g), -1.0);
        let ff = fundamental_forms(&j).unwrap();
        assert_eq!((ff.E, ff.F, ff.G, ff.e, ff.f, ff.g, ff.W), (1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0));
        let cp = curvatures(&j).unwrap();
        assert_eq!((cp.H, cp.K), (0.0, 0.0));
        assert_eq!(bracket_p(&j), 0.0);
        assert_eq!(bracket_q(&j), 0.0);
        let scan = spacelike_check(&plane(), 5, 5).unwrap();
        assert!(scan.spacelike);
        assert_eq!(scan.min_w, 1.0);
    }

    #[test]
    fn plane_residual_with_unit_gauss_target() {
        let j = plane().eval(0.0, 0.0).unwrap();
        let wc = WeingartenCoeffs::new(0.0, 1.0, 1.0).unwrap();
        assert_eq!(rationalized_residual(&j, &wc), -4.0);
    }

    #[test]
    fn graph_normal_at_critical_point() {
        let s = Surface::from_map("graph", dom(), |u, v| {
            let (ju, jv) = (J::var_u(u), J::var_v(v));
            Ok(VecJet2::new(ju, jv, (ju * ju + jv * jv) * 0.1))
        });
        let g = gauss_map(&s.eval(0.0, 0.0).unwrap()).unwrap();
        assert_eq!(g.x1, 0.0);
        assert_eq!(g.x2, 0.0);
        assert_eq!(g.x3.abs(), 1.0);
    }

    #[test]
    fn pseudohyperbolic_point() {
        let j = pseudo(1.0).eval(1.0, 0.0).unwrap();
        let g = gauss_map(&j).unwrap();
        let (s, c) = (1f64.sinh(), 1f64.cosh());
        assert!(close(g.x1.abs(), s, 1e-14) && g.x2.abs() < 1e-15 && close(g.x3.abs(), c, 1e-14));
        assert!(close(minkowski_dot(g, g), -1.0, 1e-14));
        let ff = fundamental_forms(&j).unwrap();
        assert!(close(ff.E, 1.0, 1e-14));
        assert!(ff.F.abs() < 1e-15);
        assert!(close(ff.G, s * s, 1e-14));
    }

    #[test]
    fn pseudohyperbolic_curvatures_and_brackets() {
        for r in [0.5, 2.0] {
            let s = pseudo(r);
            for (u, v) in s.domain().grid(6, 7) {
                let j = s.eval(u, v).unwrap();
                let cp = curvatures(&j).unwrap();
                assert!(close(cp.K, 1.0 / (r * r), 1e-12));
                assert!(close(cp.H.abs(), 1.0 / r, 1e-12));
                let ff = fundamental_forms(&j).unwrap();
                let p = bracket_p(&j);
                let q = bracket_q(&j);
                assert!(close(p, 2.0 * cp.H * ff.W.powf(1.5), 1e-12));
                assert!(close(q, cp.K * ff.W * ff.W, 1e-12));
            }
        }
    }

    #[test]
    fn weingarten_examples() {
        let cp = CurvaturePair { H: 0.5, K: 0.25 };
        let wc = WeingartenCoeffs::new(2.0, -4.0, 0.0).unwrap();
        assert_eq!(weingarten_residual(&cp, &wc), 0.0);
        let flat = CurvaturePair { H: 0.0, K: 0.0 };
        assert_eq!(weingarten_residual(&flat, &WeingartenCoeffs::new(3.0, 7.0, 0.0).unwrap()), 0.0);
        assert!(WeingartenCoeffs::new(0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn pseudohyperbolic_half_radius_is_weingarten() {
        let s = pseudo(0.5);
        let wc = WeingartenCoeffs::new(1.0, -0.5, 0.0).unwrap();
        for (u, v) in s.domain().grid(5, 5) {
            let j = s.eval(u, v).unwrap();
            let cp = curvatures(&j).unwrap();
            // this parametrization's normal gives H = +1/r
            assert!(weingarten_residual(&cp, &wc).abs() < 1e-12);
            let t = rationalized_terms(&PointJet::from(&j), &wc);
            assert!(t.phi.abs() <= 1e-12 * t.scale);
        }
    }

    #[test]
    fn degenerate_and_timelike_points() {
        let s = Surface::from_map("pole", dom(), |u, v| {
            let (ju, jv) = (J::var_u(u), J::var_v(v));
            Ok(VecJet2::new(ju.sinh() * jv.cos(), ju.sinh() * jv.sin(), ju.cosh()))
        });
        let j = s.eval(0.0, 0.3).unwrap();
        assert!(matches!(gauss_map(&j), Err(Error::Degenerate { .. })));
        let tl = Surface::from_map("timelike plane", dom(), |u, v| {
            Ok(VecJet2::new(J::var_u(u), J::constant(0.0), J::var_v(v)))
        });
        let j = tl.eval(0.0, 0.0).unwrap();
        assert!(matches!(curvatures(&j), Err(Error::NonSpacelike { .. })));
        let scan = spacelike_check(&tl, 3, 3).unwrap();
        assert!(!scan.spacelike);
        assert_eq!(scan.failed_nodes, 9);
    }

    #[test]
    fn swapping_flips_mean_curvature() {
        let s = pseudo(2.0);
        let t = s.swapped();
        let a = curvatures(&s.eval(1.1, 0.4).unwrap()).unwrap();
        let b = curvatures(&t.eval(0.4, 1.1).unwrap()).unwrap();
        assert!(close(a.H, -b.H, 1e-13));
        assert!(close(a.K, b.K, 1e-13));
    }

    #[test]
    fn cyclic_real_and_complex_paths_agree() {
        let frame = |u: f64| {
            let r = (1.0 + 0.3 * u, 0.3, 0.0);
            Ok(SliceFrame {
                center: CurveJet::new(
                    MVec3::new(0.2 * u * u, 0.1 * u, u),
                    MVec3::new(0.4 * u, 0.1, 1.0),
                    MVec3::new(0.4, 0.0, 0.0),
                ),
                first: CurveJet::new(MVec3::E1, MVec3::ZERO, MVec3::ZERO).times(r),
                second: CurveJet::new(MVec3::E2, MVec3::ZERO, MVec3::ZERO).times(r),
            })
        };
        let m = LorentzTransform::boost_x1(0.3).compose(&LorentzTransform::translation(MVec3::new(1.0, 2.0, 3.0)));
        for basis in [CircleBasis::Circular, CircleBasis::Hyperbolic, CircleBasis::Parabolic] {
            let s = Surface::cyclic("test", dom(), basis, frame).transformed(&m);
            let real = PointJet::from(&s.eval(0.4, 0.7).unwrap());
            let cx = s.eval_complex(0.4, Complex64::new(0.7, 0.0)).unwrap();
            let fields = |p: &PointJet<f64>| [p.x, p.xu, p.xv, p.xuu, p.xuv, p.xvv];
            let cfields = |p: &PointJet<Complex64>| [p.x, p.xu, p.xv, p.xuu, p.xuv, p.xvv];
            for (a, b) in fields(&real).iter().zip(cfields(&cx).iter()) {
                for k in 0..3 {
                    assert!((a[k] - b[k].re).abs() < 1e-13 && b[k].im == 0.0, "{basis:?}");
                }
            }
        }
    }

    fn cyclic_sample() -> Surface {
        // spacelike: circles x3 = u with radius growing fast enough
        Surface::cyclic("sample", Domain::new(0.1, 0.6, 0.0, 6.0).unwrap(), CircleBasis::Circular, |u| {
            let prof = (0.5 + 2.0 * u + u * u, 2.0 + 2.0 * u, 2.0);
            Ok(SliceFrame {
                center: CurveJet::new(
                    MVec3::new(0.1 * u, 0.05 * u * u, u),
                    MVec3::new(0.1, 0.1 * u, 1.0),
                    MVec3::new(0.0, 0.1, 0.0),
                ),
                first: CurveJet::new(MVec3::E1, MVec3::ZERO, MVec3::ZERO).times(prof),
                second: CurveJet::new(MVec3::E2, MVec3::ZERO, MVec3::ZERO).times(prof),
            })
        })
    }

    fn test_surfaces() -> Vec<Surface> {
        vec![pseudo(1.3), cyclic_sample()]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn prop_isometry_invariance(
            which in 0usize..2,
            su in 0.0..1.0f64, sv in 0.0..1.0f64,
            r1 in -1.0..1.0f64, r2 in -1.0..1.0f64, ang in 0.0..std::f64::consts::TAU,
            t in proptest::array::uniform3(-5.0..5.0f64),
        ) {
            let s = &test_surfaces()[which];
            let d = s.domain();
            let (u, v) = (d.u_min + su * (d.u_max - d.u_min), d.v_min + sv * (d.v_max - d.v_min));
            let m = LorentzTransform::translation(t.into())
                .compose(&LorentzTransform::boost_x1(r1))
                .compose(&LorentzTransform::rotation_x3(ang))
                .compose(&LorentzTransform::boost_x2(r2));
            let a = curvatures(&s.eval(u, v).unwrap()).unwrap();
            let b = curvatures(&s.transformed(&m).eval(u, v).unwrap()).unwrap();
            prop_assert!(close(b.H, a.H, 1e-9), "{a:?} {b:?}");
            prop_assert!(close(b.K, a.K, 1e-9), "{a:?} {b:?}");
        }

        #[test]
        fn prop_scaling_covariance(
            which in 0usize..2,
            su in 0.0..1.0f64, sv in 0.0..1.0f64,
            rho in 0.1..10.0f64,
        ) {
            let s = &test_surfaces()[which];
            let d = s.domain();
            let (u, v) = (d.u_min + su * (d.u_max - d.u_min), d.v_min + sv * (d.v_max - d.v_min));
            let a = curvatures(&s.eval(u, v).unwrap()).unwrap();
            let b = curvatures(&s.scaled(rho).eval(u, v).unwrap()).unwrap();
            prop_assert!((b.H - a.H / rho).abs() <= 1e-9 * (a.H / rho).abs().max(1e-300) + 1e-15);
            prop_assert!((b.K - a.K / (rho * rho)).abs() <= 1e-9 * (a.K / (rho * rho)).abs() + 1e-15);
        }

        #[test]
        fn prop_bracket_identities(which in 0usize..2, su in 0.0..1.0f64, sv in 0.0..1.0f64) {
            let s = &test_surfaces()[which];
            let d = s.domain();
            let (u, v) = (d.u_min + su * (d.u_max - d.u_min), d.v_min + sv * (d.v_max - d.v_min));
            let j = s.eval(u, v).unwrap();
            let cp = curvatures(&j).unwrap();
            let ff = fundamental_forms(&j).unwrap();
            let b = brackets(&PointJet::from(&j));
            let p_scale = (b.g_big * b.d_uu).abs() + 2.0 * (b.f_big * b.d_uv).abs() + (b.e_big * b.d_vv).abs();
            let q_scale = (b.d_uu * b.d_vv).abs() + b.d_uv * b.d_uv;
            prop_assert!((b.p - 2.0 * cp.H * ff.W.powf(1.5)).abs() <= 1e-9 * p_scale);
            prop_assert!((b.q - cp.K * ff.W * ff.W).abs() <= 1e-9 * q_scale);
        }
    }
}
