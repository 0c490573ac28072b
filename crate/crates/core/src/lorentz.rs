//! Vector algebra in Minkowski 3-space `E³₁`.
//!
//! The scalar product is `⟨u, v⟩ = u1 v1 + u2 v2 − u3 v3`; the third
//! coordinate is the timelike direction.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Default relative band for causal classification.
pub const DEFAULT_CAUSAL_TOL: f64 = 1e-10;

/// A vector (or point) of `E³₁`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct MVec3 {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl MVec3 {
    pub const ZERO: MVec3 = MVec3::new(0.0, 0.0, 0.0);
    pub const E1: MVec3 = MVec3::new(1.0, 0.0, 0.0);
    pub const E2: MVec3 = MVec3::new(0.0, 1.0, 0.0);
    pub const E3: MVec3 = MVec3::new(0.0, 0.0, 1.0);

    pub const fn new(x1: f64, x2: f64, x3: f64) -> Self {
        MVec3 { x1, x2, x3 }
    }

    /// Checked constructor rejecting NaN and infinities.
    pub fn try_new(x1: f64, x2: f64, x3: f64) -> Result<Self> {
        let v = MVec3::new(x1, x2, x3);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::domain(format!("non-finite vector {v}")))
        }
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x1, self.x2, self.x3]
    }

    pub fn is_finite(self) -> bool {
        self.x1.is_finite() && self.x2.is_finite() && self.x3.is_finite()
    }

    /// Minkowski scalar product.
    pub fn dot(self, other: MVec3) -> f64 {
        minkowski_dot(self, other)
    }

    /// Lorentzian cross product, see [`lorentz_cross`].
    pub fn cross(self, other: MVec3) -> MVec3 {
        lorentz_cross(self, other)
    }

    /// `sqrt(|⟨v, v⟩|)`.
    pub fn norm(self) -> f64 {
        lorentz_norm(self)
    }

    pub fn euclidean_dot(self, other: MVec3) -> f64 {
        self.x1 * other.x1 + self.x2 * other.x2 + self.x3 * other.x3
    }

    pub fn euclidean_norm_sq(self) -> f64 {
        self.euclidean_dot(self)
    }

    pub fn euclidean_norm(self) -> f64 {
        self.euclidean_norm_sq().sqrt()
    }

    pub fn max_abs(self) -> f64 {
        self.x1.abs().max(self.x2.abs()).max(self.x3.abs())
    }
}

impl From<[f64; 3]> for MVec3 {
    fn from(a: [f64; 3]) -> Self {
        MVec3::new(a[0], a[1], a[2])
    }
}

impl From<MVec3> for [f64; 3] {
    fn from(v: MVec3) -> Self {
        v.to_array()
    }
}

impl fmt::Display for MVec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x1, self.x2, self.x3)
    }
}

impl Add for MVec3 {
    type Output = MVec3;
    fn add(self, o: MVec3) -> MVec3 {
        MVec3::new(self.x1 + o.x1, self.x2 + o.x2, self.x3 + o.x3)
    }
}

impl AddAssign for MVec3 {
    fn add_assign(&mut self, o: MVec3) {
        *self = *self + o;
    }
}

impl Sub for MVec3 {
    type Output = MVec3;
    fn sub(self, o: MVec3) -> MVec3 {
        MVec3::new(self.x1 - o.x1, self.x2 - o.x2, self.x3 - o.x3)
    }
}

impl SubAssign for MVec3 {
    fn sub_assign(&mut self, o: MVec3) {
        *self = *self - o;
    }
}

impl Neg for MVec3 {
    type Output = MVec3;
    fn neg(self) -> MVec3 {
        MVec3::new(-self.x1, -self.x2, -self.x3)
    }
}

impl Mul<f64> for MVec3 {
    type Output = MVec3;
    fn mul(self, s: f64) -> MVec3 {
        MVec3::new(self.x1 * s, self.x2 * s, self.x3 * s)
    }
}

impl Mul<MVec3> for f64 {
    type Output = MVec3;
    fn mul(self, v: MVec3) -> MVec3 {
        v * self
    }
}

impl Div<f64> for MVec3 {
    type Output = MVec3;
    fn div(self, s: f64) -> MVec3 {
        MVec3::new(self.x1 / s, self.x2 / s, self.x3 / s)
    }
}

/// Causal character of a vector or a plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CausalClass {
    Spacelike,
    Timelike,
    Lightlike,
}

impl fmt::Display for CausalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CausalClass::Spacelike => "spacelike",
            CausalClass::Timelike => "timelike",
            CausalClass::Lightlike => "lightlike",
        })
    }
}

pub fn minkowski_dot(u: MVec3, v: MVec3) -> f64 {
    u.x1 * v.x1 + u.x2 * v.x2 - u.x3 * v.x3
}

/// The unique `w` with `⟨w, z⟩ = det(u, v, z)` for every `z`.
///
/// This is the Euclidean cross product with its third component negated.
pub fn lorentz_cross(u: MVec3, v: MVec3) -> MVec3 {
    MVec3::new(u.x2 * v.x3 - u.x3 * v.x2, u.x3 * v.x1 - u.x1 * v.x3, -(u.x1 * v.x2 - u.x2 * v.x1))
}

/// Determinant of the 3×3 matrix with rows `u`, `v`, `w`.
pub fn det3(u: MVec3, v: MVec3, w: MVec3) -> f64 {
    u.x1 * (v.x2 * w.x3 - v.x3 * w.x2) - u.x2 * (v.x1 * w.x3 - v.x3 * w.x1) + u.x3 * (v.x1 * w.x2 - v.x2 * w.x1)
}

pub fn lorentz_norm(v: MVec3) -> f64 {
    minkowski_dot(v, v).abs().sqrt()
}

/// Classify `v` with the relative band `tol · max(1, |v|²_E)`.
pub fn causal_character(v: MVec3, tol: f64) -> CausalClass {
    let q = minkowski_dot(v, v);
    let band = tol * v.euclidean_norm_sq().max(1.0);
    if q > band {
        CausalClass::Spacelike
    } else if q < -band {
        CausalClass::Timelike
    } else {
        CausalClass::Lightlike
    }
}

/// Causal character of the plane with the given normal.
///
/// A timelike normal spans a spacelike plane and vice versa; null normals give
/// degenerate (lightlike) planes.
pub fn plane_character(normal: MVec3, tol: f64) -> Result<CausalClass> {
    if !normal.is_finite() {
        return Err(Error::domain(format!("non-finite plane normal {normal}")));
    }
    if normal.max_abs() == 0.0 {
        return Err(Error::domain("plane normal is the zero vector"));
    }
    Ok(match causal_character(normal, tol) {
        CausalClass::Timelike => CausalClass::Spacelike,
        CausalClass::Spacelike => CausalClass::Timelike,
        CausalClass::Lightlike => CausalClass::Lightlike,
    })
}

/// Affine map `x ↦ L x + t` of `E³₁`. Built from boosts, rotations and
/// translations it is an isometry; [`LorentzTransform::scaling`] gives homotheties.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LorentzTransform {
    /// Row-major linear part.
    pub linear: [[f64; 3]; 3],
    pub translation: MVec3,
}

impl Default for LorentzTransform {
    fn default() -> Self {
        Self::identity()
    }
}

impl LorentzTransform {
    pub fn identity() -> Self {
        LorentzTransform { linear: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]], translation: MVec3::ZERO }
    }

    /// Boost mixing `x1` and the time axis `x3` with the given rapidity.
    pub fn boost_x1(rapidity: f64) -> Self {
        let (s, c) = (rapidity.sinh(), rapidity.cosh());
        LorentzTransform { linear: [[c, 0.0, s], [0.0, 1.0, 0.0], [s, 0.0, c]], translation: MVec3::ZERO }
    }

    /// Boost mixing `x2` and the time axis `x3`.
    pub fn boost_x2(rapidity: f64) -> Self {
        let (s, c) = (rapidity.sinh(), rapidity.cosh());
        LorentzTransform { linear: [[1.0, 0.0, 0.0], [0.0, c, s], [0.0, s, c]], translation: MVec3::ZERO }
    }

    /// Spatial rotation about the `x3` axis.
    pub fn rotation_x3(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        LorentzTransform { linear: [[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]], translation: MVec3::ZERO }
    }

    pub fn translation(t: MVec3) -> Self {
        LorentzTransform { translation: t, ..Self::identity() }
    }

    pub fn scaling(factor: f64) -> Self {
        let mut m = Self::identity();
        for (i, row) in m.linear.iter_mut().enumerate() {
            row[i] = factor;
        }
        m
    }

    /// `self ∘ inner`: apply `inner` first.
    pub fn compose(&self, inner: &LorentzTransform) -> Self {
        let mut linear = [[0.0; 3]; 3];
        for (i, row) in linear.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = (0..3).map(|k| self.linear[i][k] * inner.linear[k][j]).sum();
            }
        }
        LorentzTransform { linear, translation: self.apply(inner.translation) }
    }

    pub fn apply_linear(&self, v: MVec3) -> MVec3 {
        let a = v.to_array();
        let row = |r: [f64; 3]| r[0] * a[0] + r[1] * a[1] + r[2] * a[2];
        MVec3::new(row(self.linear[0]), row(self.linear[1]), row(self.linear[2]))
    }

    pub fn apply(&self, p: MVec3) -> MVec3 {
        self.apply_linear(p) + self.translation
    }

    pub fn determinant(&self) -> f64 {
        let [a, b, c] = self.linear;
        det3(a.into(), b.into(), c.into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn dot_examples() {
        assert_eq!(minkowski_dot(MVec3::E3, MVec3::E3), -1.0);
        assert_eq!(minkowski_dot(MVec3::new(1.0, 2.0, 3.0), MVec3::new(4.0, 5.0, 6.0)), -4.0);
        let null = MVec3::new(1.0, 1.0, 2f64.sqrt());
        assert!(minkowski_dot(null, null).abs() < 1e-15);
    }

    #[test]
    fn cross_examples() {
        assert_eq!(lorentz_cross(MVec3::E1, MVec3::E2), MVec3::new(0.0, 0.0, -1.0));
        assert_eq!(lorentz_cross(MVec3::E2, MVec3::E3), MVec3::new(1.0, 0.0, 0.0));
        let v = MVec3::new(0.3, -2.0, 5.0);
        assert_eq!(lorentz_cross(v, v), MVec3::ZERO);
    }

    /// Solve ⟨w, e_k⟩ = det(u, v, e_k) on the standard basis.
    fn cross_from_identity(u: MVec3, v: MVec3) -> MVec3 {
        let d1 = det3(u, v, MVec3::E1);
        let d2 = det3(u, v, MVec3::E2);
        let d3 = det3(u, v, MVec3::E3);
        // ⟨w, e1⟩ = w1, ⟨w, e2⟩ = w2, ⟨w, e3⟩ = −w3
        MVec3::new(d1, d2, -d3)
    }

    #[test]
    fn cross_matches_defining_identity_on_basis() {
        let pairs = [
            (MVec3::E1, MVec3::E2),
            (MVec3::E2, MVec3::E3),
            (MVec3::E3, MVec3::E1),
            (MVec3::new(1.0, 2.0, 3.0), MVec3::new(-0.5, 4.0, 0.25)),
        ];
        for (u, v) in pairs {
            assert_eq!(lorentz_cross(u, v), cross_from_identity(u, v));
        }
    }

    #[test]
    fn det_examples() {
        assert_eq!(det3(MVec3::E1, MVec3::E2, MVec3::E3), 1.0);
        assert_eq!(det3(MVec3::E1, MVec3::E1, MVec3::E3), 0.0);
        // cofactor expansion: 1·(0−24) − 2·(0−20) + 3·(0−5) = 1
        assert_eq!(det3(MVec3::new(1.0, 2.0, 3.0), MVec3::new(0.0, 1.0, 4.0), MVec3::new(5.0, 6.0, 0.0)), 1.0);
    }

    #[test]
    fn norm_examples() {
        assert_eq!(lorentz_norm(MVec3::new(0.0, 0.0, 2.0)), 2.0);
        assert_eq!(lorentz_norm(MVec3::new(3.0, 4.0, 0.0)), 5.0);
        assert_eq!(lorentz_norm(MVec3::new(1.0, 0.0, 1.0)), 0.0);
    }

    #[test]
    fn causal_examples() {
        let tol = DEFAULT_CAUSAL_TOL;
        assert_eq!(causal_character(MVec3::E1, tol), CausalClass::Spacelike);
        assert_eq!(causal_character(MVec3::E3, tol), CausalClass::Timelike);
        assert_eq!(causal_character(MVec3::new(1.0, 0.0, 1.0), tol), CausalClass::Lightlike);
        // the zero vector sits inside the band
        assert_eq!(causal_character(MVec3::ZERO, tol), CausalClass::Lightlike);
    }

    #[test]
    fn plane_examples() {
        let tol = DEFAULT_CAUSAL_TOL;
        assert_eq!(plane_character(MVec3::E3, tol).unwrap(), CausalClass::Spacelike);
        assert_eq!(plane_character(MVec3::E1, tol).unwrap(), CausalClass::Timelike);
        assert_eq!(plane_character(MVec3::new(0.0, 1.0, 1.0), tol).unwrap(), CausalClass::Lightlike);
        assert!(matches!(plane_character(MVec3::ZERO, tol), Err(Error::Domain(_))));
    }

    #[test]
    fn try_new_rejects_nan() {
        assert!(MVec3::try_new(f64::NAN, 0.0, 0.0).is_err());
        assert!(MVec3::try_new(1.0, f64::INFINITY, 0.0).is_err());
        assert!(MVec3::try_new(1.0, 2.0, 3.0).is_ok());
    }

    #[test]
    fn boosts_preserve_the_metric() {
        let m = LorentzTransform::boost_x1(1.3)
            .compose(&LorentzTransform::rotation_x3(0.4))
            .compose(&LorentzTransform::boost_x2(-0.7));
        let u = MVec3::new(0.2, -1.0, 3.0);
        let v = MVec3::new(1.5, 0.5, -0.25);
        let lhs = minkowski_dot(m.apply_linear(u), m.apply_linear(v));
        assert!(close(lhs, minkowski_dot(u, v), 1e-12));
        assert!(close(m.determinant(), 1.0, 1e-12));
    }

    fn coord() -> impl Strategy<Value = f64> {
        -10.0..10.0f64
    }

    fn vec3() -> impl Strategy<Value = MVec3> {
        (coord(), coord(), coord()).prop_map(|(a, b, c)| MVec3::new(a, b, c))
    }

    proptest! {
        #[test]
        fn prop_cross_determinant_identity(u in vec3(), v in vec3(), w in vec3()) {
            let scale = u.euclidean_norm() * v.euclidean_norm() * w.euclidean_norm();
            let lhs = minkowski_dot(lorentz_cross(u, v), w);
            prop_assert!((lhs - det3(u, v, w)).abs() <= 1e-12 * scale.max(1.0));
        }

        #[test]
        fn prop_lagrange_identity(u in vec3(), v in vec3()) {
            let w = lorentz_cross(u, v);
            let lhs = minkowski_dot(w, w);
            let rhs = -(minkowski_dot(u, u) * minkowski_dot(v, v) - minkowski_dot(u, v).powi(2));
            let scale = u.euclidean_norm_sq() * v.euclidean_norm_sq();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * scale.max(1.0));
        }

        #[test]
        fn prop_cross_is_orthogonal(u in vec3(), v in vec3()) {
            let w = lorentz_cross(u, v);
            let scale = u.euclidean_norm_sq() * v.euclidean_norm();
            prop_assert!(minkowski_dot(w, u).abs() <= 1e-12 * scale.max(1.0));
            let scale = v.euclidean_norm_sq() * u.euclidean_norm();
            prop_assert!(minkowski_dot(w, v).abs() <= 1e-12 * scale.max(1.0));
        }

        #[test]
        fn prop_cross_antisymmetric(u in vec3(), v in vec3()) {
            prop_assert_eq!(lorentz_cross(u, v), -lorentz_cross(v, u));
        }

        #[test]
        fn prop_causal_character_is_invariant(
            kind in 0usize..3,
            dir in 0.0..std::f64::consts::TAU,
            len in 0.1..3.0f64,
            rap1 in -2.0..2.0f64,
            rap2 in -2.0..2.0f64,
            angle in 0.0..std::f64::consts::TAU,
        ) {
            // representative vectors well away from the classification band
            let (s, c) = dir.sin_cos();
            let v = match kind {
                0 => MVec3::new(len * c, len * s, 0.3 * len),
                1 => MVec3::new(0.3 * len * c, 0.3 * len * s, len),
                _ => MVec3::new(len * c, len * s, len),
            };
            let m = LorentzTransform::boost_x1(rap1)
                .compose(&LorentzTransform::rotation_x3(angle))
                .compose(&LorentzTransform::boost_x2(rap2));
            let image = m.apply_linear(v);
            prop_assert_eq!(
                causal_character(v, DEFAULT_CAUSAL_TOL),
                causal_character(image, DEFAULT_CAUSAL_TOL)
            );
        }
    }
}
