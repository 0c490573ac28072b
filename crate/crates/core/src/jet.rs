//! Second-order jets in two variables.
//!
//! A [`ScalarJet2`] carries the value of a map of `(u, v)` together with all of
//! its first and second partial derivatives at one point. Arithmetic and the
//! elementary functions propagate the six slots through the Leibniz and chain
//! rules, so curvature data come out exact up to round-off.

use std::ops::{Add, Mul, Neg, Sub};

use crate::lorentz::{LorentzTransform, MVec3};
use crate::{Error, Result};

/// Distance from a pole of `tan`/`cot` below which evaluation is refused.
pub const POLE_GUARD: f64 = 1e-8;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ScalarJet2 {
    pub val: f64,
    pub du: f64,
    pub dv: f64,
    pub duu: f64,
    pub duv: f64,
    pub dvv: f64,
}

impl ScalarJet2 {
    pub const fn new(val: f64, du: f64, dv: f64, duu: f64, duv: f64, dvv: f64) -> Self {
        ScalarJet2 { val, du, dv, duu, duv, dvv }
    }

    pub const fn constant(c: f64) -> Self {
        Self::new(c, 0.0, 0.0, 0.0, 0.0, 0.0)
    }

    /// The coordinate `u` seeded at `u0`.
    pub const fn var_u(u0: f64) -> Self {
        Self::new(u0, 1.0, 0.0, 0.0, 0.0, 0.0)
    }

    /// The coordinate `v` seeded at `v0`.
    pub const fn var_v(v0: f64) -> Self {
        Self::new(v0, 0.0, 1.0, 0.0, 0.0, 0.0)
    }

    /// Jet of a function of `u` alone from its value and two derivatives.
    pub const fn from_u_derivs(val: f64, d1: f64, d2: f64) -> Self {
        Self::new(val, d1, 0.0, d2, 0.0, 0.0)
    }

    /// Jet of a function of `v` alone.
    pub const fn from_v_derivs(val: f64, d1: f64, d2: f64) -> Self {
        Self::new(val, 0.0, d1, 0.0, 0.0, d2)
    }

    pub fn to_array(self) -> [f64; 6] {
        [self.val, self.du, self.dv, self.duu, self.duv, self.dvv]
    }

    pub fn is_finite(self) -> bool {
        self.to_array().iter().all(|x| x.is_finite())
    }

    /// Apply a scalar function with value `f0`, first derivative `f1` and
    /// second derivative `f2` at `self.val`.
    pub fn chain(self, f0: f64, f1: f64, f2: f64) -> Self {
        ScalarJet2 {
            val: f0,
            du: f1 * self.du,
            dv: f1 * self.dv,
            duu: f2 * self.du * self.du + f1 * self.duu,
            duv: f2 * self.du * self.dv + f1 * self.duv,
            dvv: f2 * self.dv * self.dv + f1 * self.dvv,
        }
    }

    fn checked(self, what: &str) -> Result<Self> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(Error::domain(format!("{what} produced a non-finite jet")))
        }
    }

    pub fn scale(self, s: f64) -> Self {
        ScalarJet2::new(self.val * s, self.du * s, self.dv * s, self.duu * s, self.duv * s, self.dvv * s)
    }

    pub fn recip(self) -> Result<Self> {
        if self.val == 0.0 || !self.val.is_finite() {
            return Err(Error::domain(format!("reciprocal of a jet with value {}", self.val)));
        }
        let x = self.val;
        self.chain(1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x)).checked("reciprocal")
    }

    pub fn try_div(self, rhs: ScalarJet2) -> Result<Self> {
        Ok(self * rhs.recip()?)
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.val.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.val.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn sinh(self) -> Self {
        let (s, c) = (self.val.sinh(), self.val.cosh());
        self.chain(s, c, s)
    }

    pub fn cosh(self) -> Self {
        let (s, c) = (self.val.sinh(), self.val.cosh());
        self.chain(c, s, c)
    }

    pub fn exp(self) -> Result<Self> {
        let e = self.val.exp();
        self.chain(e, e, e).checked("exp")
    }

    pub fn tan(self) -> Result<Self> {
        let (s, c) = self.val.sin_cos();
        if c.abs() < POLE_GUARD {
            return Err(Error::domain(format!("tan evaluated at a pole (x = {})", self.val)));
        }
        let t = s / c;
        let sec2 = 1.0 + t * t;
        self.chain(t, sec2, 2.0 * t * sec2).checked("tan")
    }

    pub fn cot(self) -> Result<Self> {
        let (s, c) = self.val.sin_cos();
        if s.abs() < POLE_GUARD {
            return Err(Error::domain(format!("cot evaluated at a pole (x = {})", self.val)));
        }
        let k = c / s;
        let csc2 = 1.0 + k * k;
        self.chain(k, -csc2, 2.0 * k * csc2).checked("cot")
    }

    pub fn sqrt(self) -> Result<Self> {
        if !(self.val > 0.0) {
            return Err(Error::domain(format!("sqrt of non-positive value {}", self.val)));
        }
        let r = self.val.sqrt();
        self.chain(r, 0.5 / r, -0.25 / (r * self.val)).checked("sqrt")
    }

    /// `self^k` for integer or half-integer `k`.
    pub fn pow(self, k: f64) -> Result<Self> {
        let twice = 2.0 * k;
        if !k.is_finite() || twice.fract() != 0.0 {
            return Err(Error::domain(format!("exponent {k} is neither an integer nor a half-integer")));
        }
        let x = self.val;
        if k.fract() == 0.0 {
            let n = k as i32;
            if n < 0 && x == 0.0 {
                return Err(Error::domain("negative power of zero"));
            }
            let f = |m: i32| if m == 0 { 1.0 } else { x.powi(m) };
            let nf = n as f64;
            let f1 = if n == 0 { 0.0 } else { nf * f(n - 1) };
            let f2 = if n == 0 || n == 1 { 0.0 } else { nf * (nf - 1.0) * f(n - 2) };
            return self.chain(f(n), f1, f2).checked("pow");
        }
        if !(x > 0.0) {
            return Err(Error::domain(format!("half-integer power of non-positive value {x}")));
        }
        self.chain(x.powf(k), k * x.powf(k - 1.0), k * (k - 1.0) * x.powf(k - 2.0)).checked("pow")
    }
}

impl Add for ScalarJet2 {
    type Output = ScalarJet2;
    fn add(self, o: ScalarJet2) -> ScalarJet2 {
        ScalarJet2::new(
            self.val + o.val,
            self.du + o.du,
            self.dv + o.dv,
            self.duu + o.duu,
            self.duv + o.duv,
            self.dvv + o.dvv,
        )
    }
}

impl Sub for ScalarJet2 {
    type Output = ScalarJet2;
    fn sub(self, o: ScalarJet2) -> ScalarJet2 {
        self + (-o)
    }
}

impl Neg for ScalarJet2 {
    type Output = ScalarJet2;
    fn neg(self) -> ScalarJet2 {
        self.scale(-1.0)
    }
}

impl Mul for ScalarJet2 {
    type Output = ScalarJet2;
    fn mul(self, o: ScalarJet2) -> ScalarJet2 {
        ScalarJet2 {
            val: self.val * o.val,
            du: self.du * o.val + self.val * o.du,
            dv: self.dv * o.val + self.val * o.dv,
            duu: self.duu * o.val + 2.0 * self.du * o.du + self.val * o.duu,
            duv: self.duv * o.val + self.du * o.dv + self.dv * o.du + self.val * o.duv,
            dvv: self.dvv * o.val + 2.0 * self.dv * o.dv + self.val * o.dvv,
        }
    }
}

impl Add<f64> for ScalarJet2 {
    type Output = ScalarJet2;
    fn add(mut self, c: f64) -> ScalarJet2 {
        self.val += c;
        self
    }
}

impl Sub<f64> for ScalarJet2 {
    type Output = ScalarJet2;
    fn sub(self, c: f64) -> ScalarJet2 {
        self + (-c)
    }
}

impl Mul<f64> for ScalarJet2 {
    type Output = ScalarJet2;
    fn mul(self, s: f64) -> ScalarJet2 {
        self.scale(s)
    }
}

impl Mul<ScalarJet2> for f64 {
    type Output = ScalarJet2;
    fn mul(self, j: ScalarJet2) -> ScalarJet2 {
        j.scale(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum JetSeed {
    Constant(f64),
    VarU(f64),
    VarV(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
    /// Unary; the second operand is ignored.
    Neg,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Elementary {
    Sin,
    Cos,
    Sinh,
    Cosh,
    Tan,
    Cot,
    Exp,
    Sqrt,
    Pow(f64),
}

impl Elementary {
    /// Plain-value evaluation, used for finite-difference checks.
    pub fn eval(self, x: f64) -> f64 {
        match self {
            Elementary::Sin => x.sin(),
            Elementary::Cos => x.cos(),
            Elementary::Sinh => x.sinh(),
            Elementary::Cosh => x.cosh(),
            Elementary::Tan => x.tan(),
            Elementary::Cot => 1.0 / x.tan(),
            Elementary::Exp => x.exp(),
            Elementary::Sqrt => x.sqrt(),
            Elementary::Pow(k) => x.powf(k),
        }
    }
}

pub fn jet_seed(seed: JetSeed) -> Result<ScalarJet2> {
    let (x, jet) = match seed {
        JetSeed::Constant(c) => (c, ScalarJet2::constant(c)),
        JetSeed::VarU(u) => (u, ScalarJet2::var_u(u)),
        JetSeed::VarV(v) => (v, ScalarJet2::var_v(v)),
    };
    if x.is_finite() {
        Ok(jet)
    } else {
        Err(Error::domain(format!("non-finite seed {x}")))
    }
}

pub fn jet_arith(op: ArithOp, a: ScalarJet2, b: ScalarJet2) -> Result<ScalarJet2> {
    Ok(match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
        ArithOp::Div => a.try_div(b)?,
        ArithOp::Neg => -a,
    })
}

pub fn jet_elementary(f: Elementary, a: ScalarJet2) -> Result<ScalarJet2> {
    match f {
        Elementary::Sin => Ok(a.sin()),
        Elementary::Cos => Ok(a.cos()),
        Elementary::Sinh => Ok(a.sinh()),
        Elementary::Cosh => Ok(a.cosh()),
        Elementary::Tan => a.tan(),
        Elementary::Cot => a.cot(),
        Elementary::Exp => a.exp(),
        Elementary::Sqrt => a.sqrt(),
        Elementary::Pow(k) => a.pow(k),
    }
}

/// Jet of a map `(u, v) → E³₁`, one scalar jet per coordinate.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct VecJet2 {
    pub x1: ScalarJet2,
    pub x2: ScalarJet2,
    pub x3: ScalarJet2,
}

impl VecJet2 {
    pub const fn new(x1: ScalarJet2, x2: ScalarJet2, x3: ScalarJet2) -> Self {
        VecJet2 { x1, x2, x3 }
    }

    /// Constant map.
    pub fn constant(p: MVec3) -> Self {
        VecJet2::new(ScalarJet2::constant(p.x1), ScalarJet2::constant(p.x2), ScalarJet2::constant(p.x3))
    }

    /// Map of `u` alone from position and two derivatives.
    pub fn from_u_derivs(p: MVec3, d1: MVec3, d2: MVec3) -> Self {
        VecJet2::new(
            ScalarJet2::from_u_derivs(p.x1, d1.x1, d2.x1),
            ScalarJet2::from_u_derivs(p.x2, d1.x2, d2.x2),
            ScalarJet2::from_u_derivs(p.x3, d1.x3, d2.x3),
        )
    }

    /// Build from the six derivative vectors.
    pub fn from_parts(x: MVec3, xu: MVec3, xv: MVec3, xuu: MVec3, xuv: MVec3, xvv: MVec3) -> Self {
        let c = |f: fn(MVec3) -> f64| ScalarJet2::new(f(x), f(xu), f(xv), f(xuu), f(xuv), f(xvv));
        VecJet2::new(c(|p| p.x1), c(|p| p.x2), c(|p| p.x3))
    }

    fn slot(&self, f: impl Fn(&ScalarJet2) -> f64) -> MVec3 {
        MVec3::new(f(&self.x1), f(&self.x2), f(&self.x3))
    }

    pub fn point(&self) -> MVec3 {
        self.slot(|j| j.val)
    }

    pub fn xu(&self) -> MVec3 {
        self.slot(|j| j.du)
    }

    pub fn xv(&self) -> MVec3 {
        self.slot(|j| j.dv)
    }

    pub fn xuu(&self) -> MVec3 {
        self.slot(|j| j.duu)
    }

    pub fn xuv(&self) -> MVec3 {
        self.slot(|j| j.duv)
    }

    pub fn xvv(&self) -> MVec3 {
        self.slot(|j| j.dvv)
    }

    pub fn is_finite(&self) -> bool {
        self.x1.is_finite() && self.x2.is_finite() && self.x3.is_finite()
    }

    /// Multiply every component by the scalar jet `s`.
    pub fn scale_jet(self, s: ScalarJet2) -> Self {
        VecJet2::new(self.x1 * s, self.x2 * s, self.x3 * s)
    }

    /// Apply an affine map. The translation only touches the point.
    pub fn transform(&self, m: &LorentzTransform) -> Self {
        let lin = |v: MVec3| m.apply_linear(v);
        VecJet2::from_parts(
            m.apply(self.point()),
            lin(self.xu()),
            lin(self.xv()),
            lin(self.xuu()),
            lin(self.xuv()),
            lin(self.xvv()),
        )
    }

    /// Exchange the roles of `u` and `v`.
    pub fn swap_uv(&self) -> Self {
        let s = |j: ScalarJet2| ScalarJet2::new(j.val, j.dv, j.du, j.dvv, j.duv, j.duu);
        VecJet2::new(s(self.x1), s(self.x2), s(self.x3))
    }
}

impl Add for VecJet2 {
    type Output = VecJet2;
    fn add(self, o: VecJet2) -> VecJet2 {
        VecJet2::new(self.x1 + o.x1, self.x2 + o.x2, self.x3 + o.x3)
    }
}

impl Sub for VecJet2 {
    type Output = VecJet2;
    fn sub(self, o: VecJet2) -> VecJet2 {
        VecJet2::new(self.x1 - o.x1, self.x2 - o.x2, self.x3 - o.x3)
    }
}

impl Mul<ScalarJet2> for VecJet2 {
    type Output = VecJet2;
    fn mul(self, s: ScalarJet2) -> VecJet2 {
        self.scale_jet(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arr(j: ScalarJet2) -> [f64; 6] {
        j.to_array()
    }

    #[test]
    fn seeds() {
        assert_eq!(arr(jet_seed(JetSeed::Constant(7.0)).unwrap()), [7.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(arr(jet_seed(JetSeed::VarU(2.0)).unwrap()), [2.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(arr(jet_seed(JetSeed::VarV(-1.0)).unwrap()), [-1.0, 0.0, 1.0, 0.0, 0.0, 0.0]);
        assert!(jet_seed(JetSeed::VarU(f64::NAN)).is_err());
    }

    #[test]
    fn arithmetic_examples() {
        let u = ScalarJet2::var_u(2.0);
        assert_eq!(arr(jet_arith(ArithOp::Mul, u, u).unwrap()), [4.0, 4.0, 0.0, 2.0, 0.0, 0.0]);
        let v = ScalarJet2::var_v(5.0);
        assert_eq!(arr(jet_arith(ArithOp::Mul, u, v).unwrap()), [10.0, 5.0, 2.0, 0.0, 1.0, 0.0]);
        let u3 = ScalarJet2::var_u(3.0);
        let q = jet_arith(ArithOp::Div, u3, u3).unwrap();
        for (got, want) in arr(q).iter().zip([1.0, 0.0, 0.0, 0.0, 0.0, 0.0]) {
            assert!((got - want).abs() < 1e-15);
        }
        assert!(matches!(jet_arith(ArithOp::Div, u, ScalarJet2::constant(0.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn elementary_examples() {
        let s = jet_elementary(Elementary::Sin, ScalarJet2::var_v(0.0)).unwrap();
        assert_eq!(arr(s), [0.0, 0.0, 1.0, 0.0, 0.0, -0.0]);
        let c = jet_elementary(Elementary::Cosh, ScalarJet2::var_u(0.0)).unwrap();
        assert_eq!(arr(c), [1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let r = jet_elementary(Elementary::Sqrt, ScalarJet2::constant(4.0)).unwrap();
        assert_eq!(arr(r), [2.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn domain_errors() {
        assert!(ScalarJet2::constant(0.0).sqrt().is_err());
        assert!(ScalarJet2::constant(-1.0).sqrt().is_err());
        assert!(ScalarJet2::var_u(std::f64::consts::FRAC_PI_2).tan().is_err());
        assert!(ScalarJet2::var_u(0.0).cot().is_err());
        assert!(ScalarJet2::var_u(2.0).pow(0.3).is_err());
        assert!(ScalarJet2::var_u(-2.0).pow(1.5).is_err());
        assert!(ScalarJet2::constant(0.0).pow(-1.0).is_err());
        assert!(ScalarJet2::constant(1000.0).exp().is_err());
    }

    #[test]
    fn pow_integer_and_half() {
        let u = ScalarJet2::var_u(2.0);
        assert_eq!(arr(u.pow(2.0).unwrap()), arr(u * u));
        assert_eq!(arr(u.pow(0.0).unwrap()), [1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let z = ScalarJet2::var_u(0.0);
        assert_eq!(arr(z.pow(1.0).unwrap()), arr(z));
        let h = u.pow(1.5).unwrap();
        assert!((h.val - 2f64.powf(1.5)).abs() < 1e-15);
        assert!((h.du - 1.5 * 2f64.sqrt()).abs() < 1e-15);
        assert!((h.duu - 0.75 / 2f64.sqrt()).abs() < 1e-15);
        let neg = ScalarJet2::var_u(-2.0).pow(-3.0).unwrap();
        assert!((neg.val + 0.125).abs() < 1e-16);
        assert!((neg.du + 3.0 / 16.0).abs() < 1e-16);
    }

    #[test]
    fn vec_jet_slots_and_swap() {
        let u = ScalarJet2::var_u(1.5);
        let v = ScalarJet2::var_v(-0.5);
        let j = VecJet2::new(u * v, u, v * v);
        assert_eq!(j.point(), MVec3::new(-0.75, 1.5, 0.25));
        assert_eq!(j.xu(), MVec3::new(-0.5, 1.0, 0.0));
        assert_eq!(j.xv(), MVec3::new(1.5, 0.0, -1.0));
        assert_eq!(j.xuv(), MVec3::new(1.0, 0.0, 0.0));
        assert_eq!(j.xvv(), MVec3::new(0.0, 0.0, 2.0));
        let s = j.swap_uv();
        assert_eq!(s.xu(), j.xv());
        assert_eq!(s.xvv(), j.xuu());
        let rebuilt = VecJet2::from_parts(j.point(), j.xu(), j.xv(), j.xuu(), j.xuv(), j.xvv());
        assert_eq!(rebuilt, j);
    }

    #[test]
    fn transform_translation_only_moves_point() {
        let j = VecJet2::new(ScalarJet2::var_u(1.0), ScalarJet2::var_v(2.0), ScalarJet2::constant(3.0));
        let t = j.transform(&LorentzTransform::translation(MVec3::new(1.0, 1.0, 1.0)));
        assert_eq!(t.point(), MVec3::new(2.0, 3.0, 4.0));
        assert_eq!(t.xu(), j.xu());
        assert_eq!(t.xv(), j.xv());
    }

    // Central finite differences of a plain function of (u, v).
    fn fd(f: &dyn Fn(f64, f64) -> f64, u: f64, v: f64, h: f64) -> [f64; 6] {
        let f0 = f(u, v);
        [
            f0,
            (f(u + h, v) - f(u - h, v)) / (2.0 * h),
            (f(u, v + h) - f(u, v - h)) / (2.0 * h),
            (f(u + h, v) - 2.0 * f0 + f(u - h, v)) / (h * h),
            (f(u + h, v + h) - f(u + h, v - h) - f(u - h, v + h) + f(u - h, v - h)) / (4.0 * h * h),
            (f(u, v + h) - 2.0 * f0 + f(u, v - h)) / (h * h),
        ]
    }

    fn agree(jet: [f64; 6], fdv: [f64; 6], first: f64, second: f64) -> bool {
        jet.iter().zip(fdv.iter()).enumerate().all(|(i, (a, b))| {
            let tol = if i < 3 { first } else { second };
            (a - b).abs() <= tol * a.abs().max(1.0)
        })
    }

    // The inner map s(u, v) = 0.3 + 0.4 u + 0.2 v + 0.1 u v keeps mixed slots busy.
    fn inner_plain(u: f64, v: f64) -> f64 {
        0.3 + 0.4 * u + 0.2 * v + 0.1 * u * v
    }

    fn inner_jet(u: f64, v: f64) -> ScalarJet2 {
        let (ju, jv) = (ScalarJet2::var_u(u), ScalarJet2::var_v(v));
        ju * 0.4 + jv * 0.2 + ju * jv * 0.1 + 0.3
    }

    fn elementary_strategy() -> impl Strategy<Value = Elementary> {
        prop_oneof![
            Just(Elementary::Sin),
            Just(Elementary::Cos),
            Just(Elementary::Sinh),
            Just(Elementary::Cosh),
            Just(Elementary::Tan),
            Just(Elementary::Cot),
            Just(Elementary::Exp),
            Just(Elementary::Sqrt),
            (-3i32..=6).prop_map(|k| Elementary::Pow(k as f64 / 2.0)),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn prop_elementary_matches_finite_differences(
            f in elementary_strategy(),
            u in 0.2..1.0f64,
            v in 0.2..1.0f64,
        ) {
            // inner values stay in (0.4, 1.2): clear of every pole and domain edge
            let jet = jet_elementary(f, inner_jet(u, v)).unwrap();
            let plain = |u: f64, v: f64| f.eval(inner_plain(u, v));
            // h = 1e-5 is the step for first derivatives; second differences use 1e-4
            // so that round-off (~eps/h²) stays under the bound.
            let first = fd(&plain, u, v, 1e-5);
            let second = fd(&plain, u, v, 1e-4);
            let fdv = [first[0], first[1], first[2], second[3], second[4], second[5]];
            prop_assert!(agree(jet.to_array(), fdv, 1e-6, 1e-6), "{f:?}: {jet:?} vs {fdv:?}");
        }

        #[test]
        fn prop_arith_matches_finite_differences(
            op in prop_oneof![Just(ArithOp::Add), Just(ArithOp::Sub), Just(ArithOp::Mul), Just(ArithOp::Div)],
            u in -1.0..1.0f64,
            v in -1.0..1.0f64,
        ) {
            let a = |u: f64, v: f64| (u * v).sin() + u;
            let b = |u: f64, v: f64| 2.0 + (u - v).cos();
            let ja = (ScalarJet2::var_u(u) * ScalarJet2::var_v(v)).sin() + ScalarJet2::var_u(u);
            let jb = (ScalarJet2::var_u(u) - ScalarJet2::var_v(v)).cos() + 2.0;
            let jet = jet_arith(op, ja, jb).unwrap();
            let plain = move |u: f64, v: f64| match op {
                ArithOp::Add => a(u, v) + b(u, v),
                ArithOp::Sub => a(u, v) - b(u, v),
                ArithOp::Mul => a(u, v) * b(u, v),
                _ => a(u, v) / b(u, v),
            };
            let first = fd(&plain, u, v, 1e-5);
            let second = fd(&plain, u, v, 1e-4);
            let fdv = [first[0], first[1], first[2], second[3], second[4], second[5]];
            prop_assert!(agree(jet.to_array(), fdv, 1e-6, 1e-6));
        }

        #[test]
        fn prop_composition_is_associative(u in -1.0..1.0f64, v in -1.0..1.0f64) {
            let a = inner_jet(u, v);
            let b = ScalarJet2::var_u(u).sin() + 1.5;
            let c = ScalarJet2::var_v(v).cosh();
            let left = (a * b) * c;
            let right = a * (b * c);
            let sum_l = (a + b) + c;
            let sum_r = a + (b + c);
            for (x, y) in left.to_array().iter().zip(right.to_array()) {
                prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
            }
            for (x, y) in sum_l.to_array().iter().zip(sum_r.to_array()) {
                prop_assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
            }
            // sqrt(b)² == b
            let sq = b.sqrt().unwrap();
            let back = sq * sq;
            for (x, y) in back.to_array().iter().zip(b.to_array()) {
                prop_assert!((x - y).abs() <= 1e-12 * y.abs().max(1.0));
            }
        }
    }
}
