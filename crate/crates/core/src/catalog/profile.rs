//! Functions of the foliation parameter `u`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::jet::ScalarJet2;
use crate::{Error, Result};

type ProfileClosure = dyn Fn(f64) -> Result<ScalarJet2> + Send + Sync;

/// A map `u ↦ (p, p', p'')` carried as a jet with empty `v` slots.
#[derive(Clone)]
pub struct ProfileFn(Arc<ProfileClosure>);

impl fmt::Debug for ProfileFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ProfileFn(..)")
    }
}

impl ProfileFn {
    pub fn new<F>(f: F) -> Self
    where
        F: Fn(f64) -> Result<ScalarJet2> + Send + Sync + 'static,
    {
        ProfileFn(Arc::new(f))
    }

    pub fn constant(c: f64) -> Self {
        ProfileFn::new(move |_| Ok(ScalarJet2::constant(c)))
    }

    /// `c0 + c1 u`.
    pub fn affine(c0: f64, c1: f64) -> Self {
        ProfileFn::new(move |u| Ok(ScalarJet2::from_u_derivs(c0 + c1 * u, c1, 0.0)))
    }

    pub fn eval(&self, u: f64) -> Result<ScalarJet2> {
        let j = (self.0)(u)?;
        if !j.is_finite() {
            return Err(Error::domain(format!("profile is not finite at u = {u}")));
        }
        Ok(ScalarJet2::from_u_derivs(j.val, j.du, j.duu))
    }

    /// `(p, p', p'')` at `u`.
    pub fn derivs(&self, u: f64) -> Result<(f64, f64, f64)> {
        let j = self.eval(u)?;
        Ok((j.val, j.du, j.duu))
    }

    pub fn value(&self, u: f64) -> Result<f64> {
        Ok(self.eval(u)?.val)
    }

    /// `self(u) + amplitude · sin u`.
    pub fn bumped(&self, amplitude: f64) -> Self {
        if amplitude == 0.0 {
            return self.clone();
        }
        let inner = self.clone();
        ProfileFn::new(move |u| Ok(inner.eval(u)? + ScalarJet2::var_u(u).sin() * amplitude))
    }
}

/// Serializable profile expressions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ProfileExpr {
    Const {
        value: f64,
    },
    /// `Σ coeffs[k] u^k`.
    Poly {
        coeffs: Vec<f64>,
    },
    /// `amp · sin(freq · u + phase)`.
    Sin {
        amp: f64,
        freq: f64,
        #[serde(default)]
        phase: f64,
    },
    Cos {
        amp: f64,
        freq: f64,
        #[serde(default)]
        phase: f64,
    },
    /// `amp · exp(rate · u)`.
    Exp {
        amp: f64,
        rate: f64,
    },
    /// `amp · tan(freq · u)`.
    Tan {
        amp: f64,
        freq: f64,
    },
    /// `amp · cot(freq · u)`.
    Cot {
        amp: f64,
        freq: f64,
    },
    /// `1 / inner`.
    Reciprocal {
        inner: Box<ProfileExpr>,
    },
    Sum {
        terms: Vec<ProfileExpr>,
    },
    Product {
        factors: Vec<ProfileExpr>,
    },
}

impl ProfileExpr {
    pub fn constant(value: f64) -> Self {
        ProfileExpr::Const { value }
    }

    pub fn poly(coeffs: &[f64]) -> Self {
        ProfileExpr::Poly { coeffs: coeffs.to_vec() }
    }

    pub fn affine(c0: f64, c1: f64) -> Self {
        Self::poly(&[c0, c1])
    }

    pub fn eval(&self, u: f64) -> Result<ScalarJet2> {
        let x = ScalarJet2::var_u(u);
        let arg = |freq: f64, phase: f64| x * freq + phase;
        Ok(match self {
            ProfileExpr::Const { value } => ScalarJet2::constant(*value),
            ProfileExpr::Poly { coeffs } => coeffs.iter().rev().fold(ScalarJet2::constant(0.0), |acc, &c| acc * x + c),
            ProfileExpr::Sin { amp, freq, phase } => arg(*freq, *phase).sin() * *amp,
            ProfileExpr::Cos { amp, freq, phase } => arg(*freq, *phase).cos() * *amp,
            ProfileExpr::Exp { amp, rate } => (x * *rate).exp()? * *amp,
            ProfileExpr::Tan { amp, freq } => (x * *freq).tan()? * *amp,
            ProfileExpr::Cot { amp, freq } => (x * *freq).cot()? * *amp,
            ProfileExpr::Reciprocal { inner } => inner.eval(u)?.recip()?,
            ProfileExpr::Sum { terms } => {
                let mut acc = ScalarJet2::constant(0.0);
                for t in terms {
                    acc = acc + t.eval(u)?;
                }
                acc
            }
            ProfileExpr::Product { factors } => {
                let mut acc = ScalarJet2::constant(1.0);
                for f in factors {
                    acc = acc * f.eval(u)?;
                }
                acc
            }
        })
    }

    pub fn to_fn(&self) -> ProfileFn {
        let e = self.clone();
        ProfileFn::new(move |u| e.eval(u))
    }
}

impl From<&ProfileExpr> for ProfileFn {
    fn from(e: &ProfileExpr) -> Self {
        e.to_fn()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_derivatives() {
        // 1 + 2u + 3u²
        let p = ProfileExpr::poly(&[1.0, 2.0, 3.0]).to_fn();
        assert_eq!(p.derivs(2.0).unwrap(), (17.0, 14.0, 6.0));
    }

    #[test]
    fn reciprocal_and_products() {
        // 1 / (u + 2)
        let r = ProfileExpr::Reciprocal { inner: Box::new(ProfileExpr::affine(2.0, 1.0)) }.to_fn();
        let (v, d1, d2) = r.derivs(1.0).unwrap();
        assert!((v - 1.0 / 3.0).abs() < 1e-16);
        assert!((d1 + 1.0 / 9.0).abs() < 1e-16);
        assert!((d2 - 2.0 / 27.0).abs() < 1e-16);
        let e = ProfileExpr::Product {
            factors: vec![
                ProfileExpr::Sin { amp: 1.0, freq: 1.0, phase: 0.0 },
                ProfileExpr::Exp { amp: 2.0, rate: 1.0 },
            ],
        };
        let (v, d1, _) = e.to_fn().derivs(0.0).unwrap();
        assert_eq!((v, d1), (0.0, 2.0));
    }

    #[test]
    fn tan_pole_is_an_error() {
        let t = ProfileExpr::Tan { amp: 1.0, freq: 2.0 }.to_fn();
        assert!(t.eval(std::f64::consts::FRAC_PI_4).is_err());
        assert!((t.value(std::f64::consts::PI / 8.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bump_adds_sine() {
        let p = ProfileFn::constant(1.0).bumped(0.01);
        let (v, d1, d2) = p.derivs(0.5).unwrap();
        assert!((v - (1.0 + 0.01 * 0.5f64.sin())).abs() < 1e-16);
        assert!((d1 - 0.01 * 0.5f64.cos()).abs() < 1e-16);
        assert!((d2 + 0.01 * 0.5f64.sin()).abs() < 1e-16);
    }

    #[test]
    fn serde_round_trip() {
        let e = ProfileExpr::Sum {
            terms: vec![ProfileExpr::constant(1.0), ProfileExpr::Cos { amp: 0.5, freq: 2.0, phase: 0.0 }],
        };
        let s = serde_json::to_string(&e).unwrap();
        let back: ProfileExpr = serde_json::from_str(&s).unwrap();
        assert_eq!(back, e);
        let parsed: ProfileExpr = serde_json::from_str(r#"{"kind":"poly","coeffs":[1,0.5]}"#).unwrap();
        assert_eq!(parsed, ProfileExpr::affine(1.0, 0.5));
    }
}
