//! Expansion of the rationalized residual along the slice circles.
//!
//! Over circular slices `Φ` is a trigonometric polynomial in `v`, over
//! hyperbolic slices a polynomial in `cosh jv, sinh jv`, and over parabolic
//! slices an ordinary polynomial. The coefficients are functions of `u`.

mod formulas;

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::kernel::{brackets, rationalized_terms, CircleBasis, PointJet, Scalar, Surface, WeingartenCoeffs};
use crate::{Error, Result};

pub use formulas::{compare_formula, printed_formula, FormulaComparison, FormulaId, FormulaInputs, COMPARISON_TOL};

/// Samples per period for harmonic extraction.
pub const HARMONIC_SAMPLES: usize = 64;
pub const DEFAULT_HARMONIC_J: usize = 16;
pub const DEFAULT_MONOMIAL_J: usize = 12;
pub const MAX_MONOMIAL_J: usize = 16;
/// Largest accepted condition estimate of the monomial fit.
pub const CONDITION_LIMIT: f64 = 1e12;
/// Extra nodes beyond the degree for the least-squares fit.
const EXTRA_NODES: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExpansionMode {
    /// `Σ A_j cos jv + B_j sin jv`.
    Harmonic,
    /// `Σ A_j cosh jv + B_j sinh jv`.
    HyperbolicHarmonic,
    /// `Σ A_j v^j`.
    Monomial,
}

impl ExpansionMode {
    pub fn for_basis(basis: CircleBasis) -> Self {
        match basis {
            CircleBasis::Circular => ExpansionMode::Harmonic,
            CircleBasis::Hyperbolic => ExpansionMode::HyperbolicHarmonic,
            CircleBasis::Parabolic => ExpansionMode::Monomial,
        }
    }
}

/// Which power of `W` multiplies the mean-curvature term.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResidualForm {
    /// `a²P²W − 4(cW² − bQ)²`, equivalent to `aH + bK = c` after squaring.
    #[default]
    SingleW,
    /// `a²P²W² − 4(cW² − bQ)²`.
    SquaredW,
}

/// Coefficients of one expansion at a fixed `u`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSpectrum {
    pub mode: ExpansionMode,
    pub j_max: usize,
    /// `A_0 ..= A_J`.
    pub a: Vec<f64>,
    /// `B_0 ..= B_J` with `B_0 = 0`; empty in monomial mode.
    pub b: Vec<f64>,
    pub u: f64,
    /// Largest additive term of the residual over the samples.
    pub scale: f64,
    /// Largest sample misfit of the expansion, relative to `scale`.
    pub fit_residual: f64,
}

impl CoefficientSpectrum {
    fn norm(&self) -> f64 {
        if self.scale > 0.0 {
            self.scale
        } else {
            1.0
        }
    }

    pub fn normalized_a(&self, j: usize) -> f64 {
        self.a.get(j).map_or(0.0, |x| x.abs() / self.norm())
    }

    pub fn normalized_b(&self, j: usize) -> f64 {
        self.b.get(j).map_or(0.0, |x| x.abs() / self.norm())
    }

    /// Largest normalized coefficient with index at least `from`, with its
    /// index and series letter.
    pub fn max_from(&self, from: usize) -> (f64, usize, char) {
        let mut best = (0.0, 0, 'A');
        for j in from..=self.j_max {
            for (x, tag) in [(self.normalized_a(j), 'A'), (self.normalized_b(j), 'B')] {
                if x > best.0 {
                    best = (x, j, tag);
                }
            }
        }
        best
    }

    pub fn normalized_max(&self) -> f64 {
        self.max_from(0).0
    }
}

fn check_sample(v: f64, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite { v })
    }
}

/// `(Σ x cos(kv), Σ x sin(kv))` for `k = 0..n` over uniform nodes.
fn dft(values: &[f64]) -> Vec<(f64, f64)> {
    let n = values.len();
    let mut buf: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    buf.iter().map(|z| (z.re, -z.im)).collect()
}

fn harmonic_check(j: usize, n: usize) -> Result<()> {
    if n < 4 || j + 1 > n / 2 {
        return Err(Error::invalid(format!("J = {j} needs at least {} samples, got {n}", 2 * j + 2)));
    }
    Ok(())
}

/// Trigonometric coefficients of `v ↦ f(v)` with `f` returning the sample
/// value and its term scale.
pub fn extract_harmonics_with<F>(mut f: F, j: usize, n: usize) -> Result<CoefficientSpectrum>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    harmonic_check(j, n)?;
    let mut values = Vec::with_capacity(n);
    let mut scale: f64 = 0.0;
    for m in 0..n {
        let v = TAU * m as f64 / n as f64;
        let (x, s) = f(v)?;
        check_sample(v, x)?;
        values.push(x);
        scale = scale.max(s);
    }
    let d = dft(&values);
    let nf = n as f64;
    let a: Vec<f64> = (0..=j).map(|k| if k == 0 { d[0].0 / nf } else { 2.0 * d[k].0 / nf }).collect();
    let b: Vec<f64> = (0..=j).map(|k| if k == 0 { 0.0 } else { 2.0 * d[k].1 / nf }).collect();
    let mut sp =
        CoefficientSpectrum { mode: ExpansionMode::Harmonic, j_max: j, a, b, u: 0.0, scale, fit_residual: 0.0 };
    sp.fit_residual = misfit(&sp, &values, |m| TAU * m as f64 / nf);
    Ok(sp)
}

/// Trigonometric coefficients from `N = 64` uniform samples; the scale is the
/// largest sample magnitude.
pub fn extract_harmonics<F>(mut f: F, j: usize) -> Result<CoefficientSpectrum>
where
    F: FnMut(f64) -> Result<f64>,
{
    extract_harmonics_with(|v| f(v).map(|x| (x, x.abs())), j, HARMONIC_SAMPLES)
}

/// Coefficients of `Σ A_j cosh jv + B_j sinh jv` from values on the imaginary
/// axis, where the series becomes `Σ A_j cos jθ + i B_j sin jθ`.
pub fn extract_hyperbolic_harmonics_with<F>(mut f: F, j: usize, n: usize) -> Result<CoefficientSpectrum>
where
    F: FnMut(Complex64) -> Result<(Complex64, f64)>,
{
    harmonic_check(j, n)?;
    let (mut re, mut im) = (Vec::with_capacity(n), Vec::with_capacity(n));
    let mut scale: f64 = 0.0;
    for m in 0..n {
        let th = TAU * m as f64 / n as f64;
        let (z, s) = f(Complex64::new(0.0, th))?;
        check_sample(th, z.re)?;
        check_sample(th, z.im)?;
        re.push(z.re);
        im.push(z.im);
        scale = scale.max(s);
    }
    let (dr, di) = (dft(&re), dft(&im));
    let nf = n as f64;
    let a: Vec<f64> = (0..=j).map(|k| if k == 0 { dr[0].0 / nf } else { 2.0 * dr[k].0 / nf }).collect();
    let b: Vec<f64> = (0..=j).map(|k| if k == 0 { 0.0 } else { 2.0 * di[k].1 / nf }).collect();
    let mut sp = CoefficientSpectrum {
        mode: ExpansionMode::HyperbolicHarmonic,
        j_max: j,
        a,
        b,
        u: 0.0,
        scale,
        fit_residual: 0.0,
    };
    // the real part carries the A series, the imaginary part the B series
    let ra = CoefficientSpectrum { b: vec![0.0; j + 1], ..sp.clone() };
    let rb = CoefficientSpectrum { a: vec![0.0; j + 1], ..sp.clone() };
    let grid = |m: usize| TAU * m as f64 / nf;
    sp.fit_residual = misfit(&ra, &re, grid).max(misfit(&rb, &im, grid));
    Ok(sp)
}

pub fn extract_hyperbolic_harmonics<F>(mut f: F, j: usize) -> Result<CoefficientSpectrum>
where
    F: FnMut(Complex64) -> Result<Complex64>,
{
    extract_hyperbolic_harmonics_with(|v| f(v).map(|z| (z, z.norm())), j, HARMONIC_SAMPLES)
}

fn misfit(sp: &CoefficientSpectrum, values: &[f64], node: impl Fn(usize) -> f64) -> f64 {
    let worst = values
        .iter()
        .enumerate()
        .map(|(m, &x)| {
            let v = node(m);
            let s: f64 = (0..=sp.j_max).map(|k| sp.a[k] * (k as f64 * v).cos() + sp.b[k] * (k as f64 * v).sin()).sum();
            (s - x).abs()
        })
        .fold(0.0, f64::max);
    worst / sp.norm()
}

/// Chebyshev nodes of the first kind on `[−1, 1]`.
pub fn chebyshev_nodes(m: usize) -> Vec<f64> {
    (0..m).map(|k| (PI * (2 * k + 1) as f64 / (2 * m) as f64).cos()).collect()
}

/// Monomial coefficients of `v ↦ f(v)` from a least-squares fit of degree `j`
/// on `j + 5` Chebyshev nodes of `interval`.
pub fn extract_poly_coeffs_with<F>(mut f: F, j: usize, interval: (f64, f64)) -> Result<CoefficientSpectrum>
where
    F: FnMut(f64) -> Result<(f64, f64)>,
{
    if j > MAX_MONOMIAL_J {
        return Err(Error::invalid(format!("J = {j} exceeds {MAX_MONOMIAL_J}")));
    }
    let (lo, hi) = interval;
    if !(lo < hi && lo.is_finite() && hi.is_finite()) {
        return Err(Error::invalid(format!("bad fit interval [{lo}, {hi}]")));
    }
    let (mid, half) = ((lo + hi) / 2.0, (hi - lo) / 2.0);
    let ts = chebyshev_nodes(j + EXTRA_NODES);
    let mut ys = Vec::with_capacity(ts.len());
    let mut scale: f64 = 0.0;
    for &t in &ts {
        let v = mid + half * t;
        let (x, s) = f(v)?;
        check_sample(v, x)?;
        ys.push(x);
        scale = scale.max(s);
    }
    let vand = DMatrix::from_fn(ts.len(), j + 1, |r, c| ts[r].powi(c as i32));
    let svd = vand.clone().svd(true, true);
    let (smax, smin) = (svd.singular_values.max(), svd.singular_values.min());
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if condition > CONDITION_LIMIT {
        return Err(Error::IllConditioned { condition });
    }
    let rhs = DVector::from_vec(ys.clone());
    let ct = svd.solve(&rhs, 0.0).map_err(|e| Error::invalid(e.to_string()))?;
    let fitted = &vand * &ct;
    let worst = fitted.iter().zip(&ys).map(|(p, y)| (p - y).abs()).fold(0.0, f64::max);
    // p(v) = Σ c_i ((v − mid)/half)^i, expanded in powers of v
    let mut a = vec![0.0; j + 1];
    for (i, &c) in ct.iter().enumerate() {
        let ci = c / half.powi(i as i32);
        let mut binom = 1.0;
        for k in 0..=i {
            a[k] += ci * binom * (-mid).powi((i - k) as i32);
            binom = binom * (i - k) as f64 / (k + 1) as f64;
        }
    }
    let mut sp = CoefficientSpectrum {
        mode: ExpansionMode::Monomial,
        j_max: j,
        a,
        b: Vec::new(),
        u: 0.0,
        scale,
        fit_residual: 0.0,
    };
    sp.fit_residual = worst / sp.norm();
    Ok(sp)
}

pub fn extract_poly_coeffs<F>(mut f: F, j: usize, interval: (f64, f64)) -> Result<CoefficientSpectrum>
where
    F: FnMut(f64) -> Result<f64>,
{
    extract_poly_coeffs_with(|v| f(v).map(|x| (x, x.abs())), j, interval)
}

/// Residual value and term scale at one jet.
pub fn residual_sample<T: Scalar>(j: &PointJet<T>, wc: &WeingartenCoeffs, form: ResidualForm) -> (T, f64) {
    match form {
        ResidualForm::SingleW => {
            let t = rationalized_terms(j, wc);
            (t.phi, t.scale)
        }
        ResidualForm::SquaredW => {
            let b = brackets(j);
            let a2 = wc.a * wc.a;
            let inner = b.w * b.w * wc.c - b.q * wc.b;
            let phi = b.p * b.p * b.w * b.w * a2 - inner * inner * 4.0;
            let m = |x: T| x.magnitude();
            let p_scale = m(b.g_big) * m(b.d_uu) + 2.0 * m(b.f_big) * m(b.d_uv) + m(b.e_big) * m(b.d_vv);
            let q_scale = m(b.d_uu) * m(b.d_vv) + m(b.d_uv) * m(b.d_uv);
            let t1 = a2 * (p_scale * m(b.w)).powi(2);
            let t2 = 4.0 * (wc.c.abs() * m(b.w) * m(b.w) + wc.b.abs() * q_scale).powi(2);
            (phi, t1.max(t2))
        }
    }
}

/// Settings of a coefficient scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanOptions {
    /// Highest index; defaults by mode.
    pub j: Option<usize>,
    /// Fit interval in monomial mode.
    pub interval: (f64, f64),
    pub form: ResidualForm,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { j: None, interval: (-1.0, 1.0), form: ResidualForm::SingleW }
    }
}

/// Expansion of one surface's residual at every `u` of a grid.
pub fn spectrum_at(
    surface: &Surface,
    wc: &WeingartenCoeffs,
    u: f64,
    opts: &ScanOptions,
) -> Result<CoefficientSpectrum> {
    let basis = surface
        .basis()
        .ok_or_else(|| Error::precondition(format!("{} is not foliated by slice circles", surface.label())))?;
    let mode = ExpansionMode::for_basis(basis);
    let real = |v: f64| -> Result<(f64, f64)> {
        let j = surface.eval(u, v)?;
        Ok(residual_sample(&PointJet::from(&j), wc, opts.form))
    };
    let mut sp = match mode {
        ExpansionMode::Harmonic => {
            extract_harmonics_with(real, opts.j.unwrap_or(DEFAULT_HARMONIC_J), HARMONIC_SAMPLES)?
        }
        ExpansionMode::HyperbolicHarmonic => extract_hyperbolic_harmonics_with(
            |v| {
                let j = surface.eval_complex(u, v)?;
                Ok(residual_sample(&j, wc, opts.form))
            },
            opts.j.unwrap_or(DEFAULT_HARMONIC_J),
            HARMONIC_SAMPLES,
        )?,
        ExpansionMode::Monomial => extract_poly_coeffs_with(real, opts.j.unwrap_or(DEFAULT_MONOMIAL_J), opts.interval)?,
    };
    sp.u = u;
    Ok(sp)
}

/// Location of the largest normalized coefficient of a scan.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanPeak {
    pub u: f64,
    pub index: usize,
    pub series: char,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoefficientScan {
    pub mode: ExpansionMode,
    pub form: ResidualForm,
    pub coeffs: WeingartenCoeffs,
    pub spectra: Vec<CoefficientSpectrum>,
    /// Largest normalized coefficient over all `u` and indices.
    pub summary: f64,
    pub peak: ScanPeak,
    pub max_fit_residual: f64,
}

pub fn coefficient_scan(
    surface: &Surface,
    wc: &WeingartenCoeffs,
    u_grid: &[f64],
    opts: &ScanOptions,
) -> Result<CoefficientScan> {
    wc.validate()?;
    if u_grid.is_empty() {
        return Err(Error::invalid("empty u grid"));
    }
    let spectra = u_grid.iter().map(|&u| spectrum_at(surface, wc, u, opts)).collect::<Result<Vec<_>>>()?;
    let mut summary = 0.0;
    let mut peak = ScanPeak { u: u_grid[0], index: 0, series: 'A' };
    let mut max_fit_residual: f64 = 0.0;
    for sp in &spectra {
        let (x, index, series) = sp.max_from(0);
        if x > summary {
            summary = x;
            peak = ScanPeak { u: sp.u, index, series };
        }
        max_fit_residual = max_fit_residual.max(sp.fit_residual);
    }
    Ok(CoefficientScan {
        mode: spectra[0].mode,
        form: opts.form,
        coeffs: *wc,
        spectra,
        summary,
        peak,
        max_fit_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{cyclic_parallel, flat_family, pseudohyperbolic, FlatParams, ProfileExpr, ProfileFn};
    use crate::kernel::Domain;
    use crate::lorentz::{CausalClass, MVec3};
    use proptest::prelude::*;

    #[test]
    fn constant_and_two_harmonics() {
        let sp = extract_harmonics(|_| Ok(3.0), 16).unwrap();
        assert!((sp.a[0] - 3.0).abs() < 1e-15);
        assert!(sp.max_from(1).0 < 1e-15);
        let sp = extract_harmonics(|v| Ok((2.0 * v).cos() - 0.5 * (7.0 * v).sin()), 16).unwrap();
        assert!((sp.a[2] - 1.0).abs() < 1e-14);
        assert!((sp.b[7] + 0.5).abs() < 1e-14);
        assert!(sp.a[0].abs() < 1e-15 && sp.b[2].abs() < 1e-15);
    }

    #[test]
    fn nonfinite_sample_names_v() {
        let r = extract_harmonics(|v| Ok(if v > 3.0 { f64::NAN } else { 1.0 }), 4);
        match r {
            Err(Error::NonFinite { v }) => assert!(v > 3.0 && v < 3.2),
            other => panic!("{other:?}"),
        }
        assert!(extract_harmonics(|_| Ok(1.0), 32).is_err());
    }

    #[test]
    fn hyperbolic_series() {
        // 2 + cosh 3v − 0.25 sinh 5v
        let sp = extract_hyperbolic_harmonics(|v| Ok((v * 3.0).cosh() - (v * 5.0).sinh() * 0.25 + 2.0), 16).unwrap();
        assert!((sp.a[0] - 2.0).abs() < 1e-14);
        assert!((sp.a[3] - 1.0).abs() < 1e-14);
        assert!((sp.b[5] + 0.25).abs() < 1e-14);
        assert!(sp.fit_residual < 1e-14);
    }

    #[test]
    fn small_polynomials() {
        let sp = extract_poly_coeffs(|v| Ok(1.0 + 2.0 * v.powi(3)), 12, (-1.0, 1.0)).unwrap();
        assert!((sp.a[0] - 1.0).abs() < 1e-12 && (sp.a[3] - 2.0).abs() < 1e-12);
        let sp = extract_poly_coeffs(|v| Ok((v - 1.0).powi(2)), 12, (-1.0, 1.0)).unwrap();
        for (k, want) in [(0, 1.0), (1, -2.0), (2, 1.0), (3, 0.0), (8, 0.0)] {
            assert!((sp.a[k] - want).abs() < 1e-12, "A_{k} = {}", sp.a[k]);
        }
        // shifted interval
        let sp = extract_poly_coeffs(|v| Ok((v - 1.0).powi(2)), 4, (0.5, 2.0)).unwrap();
        assert!((sp.a[1] + 2.0).abs() < 1e-12);
    }

    #[test]
    fn poly_degree_limits() {
        assert!(extract_poly_coeffs(Ok, 17, (-1.0, 1.0)).is_err());
        assert!(extract_poly_coeffs(Ok, 16, (-1.0, 1.0)).is_ok());
        assert!(extract_poly_coeffs(Ok, 4, (1.0, 1.0)).is_err());
        // far from the origin the fit is still done in scaled variables
        let sp = extract_poly_coeffs(|v| Ok(3.0 * v - 2.0), 2, (10.0, 11.0)).unwrap();
        assert!((sp.a[1] - 3.0).abs() < 1e-9 && (sp.a[0] + 2.0).abs() < 1e-8);
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 100, rng_algorithm: proptest::test_runner::RngAlgorithm::ChaCha, ..ProptestConfig::default() })]

        #[test]
        fn prop_harmonic_round_trip(a in prop::collection::vec(-1.0..1.0f64, 17), b in prop::collection::vec(-1.0..1.0f64, 17)) {
            let f = |v: f64| Ok((0..17).map(|k| a[k] * (k as f64 * v).cos() + if k > 0 { b[k] * (k as f64 * v).sin() } else { 0.0 }).sum::<f64>());
            let sp = extract_harmonics(f, 16).unwrap();
            let big = a.iter().chain(&b).fold(0.0f64, |m, x| m.max(x.abs()));
            for k in 0..17 {
                prop_assert!((sp.a[k] - a[k]).abs() <= 1e-12 * big);
                if k > 0 {
                    prop_assert!((sp.b[k] - b[k]).abs() <= 1e-12 * big);
                }
            }
        }

        #[test]
        fn prop_monomial_round_trip_low_degree(c in prop::collection::vec(-1.0..1.0f64, 9)) {
            let f = |v: f64| Ok(c.iter().rev().fold(0.0, |acc, x| acc * v + x));
            let sp = extract_poly_coeffs(f, 8, (-1.0, 1.0)).unwrap();
            let big = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
            for k in 0..9 {
                prop_assert!((sp.a[k] - c[k]).abs() <= 1e-12 * big);
            }
        }
    }

    fn wc(a: f64, b: f64, c: f64) -> WeingartenCoeffs {
        WeingartenCoeffs::new(a, b, c).unwrap()
    }

    #[test]
    fn pseudohyperbolic_coefficients_vanish() {
        let d = Domain::new(0.5, 1.5, 0.0, TAU).unwrap();
        let s = pseudohyperbolic(2.0, MVec3::ZERO, d, 0.0).unwrap();
        let scan = coefficient_scan(&s, &wc(1.0, -2.0, 0.0), &d.u_nodes(5), &ScanOptions::default()).unwrap();
        assert!(scan.summary < 1e-12, "{}", scan.summary);
        let bumped = pseudohyperbolic(2.0, MVec3::ZERO, d, 0.01).unwrap();
        let scan = coefficient_scan(&bumped, &wc(1.0, -2.0, 0.0), &d.u_nodes(5), &ScanOptions::default()).unwrap();
        assert!(scan.summary > 1e-4, "{}", scan.summary);
    }

    #[test]
    fn flat_coefficients_vanish_in_every_mode() {
        let cases = [
            (CausalClass::Spacelike, FlatParams { f: [0.0, 0.1], g: [0.0, 0.2], r: [1.0, 1.5], lambda: 0.0, mu: 0.0 }),
            (CausalClass::Timelike, FlatParams { f: [0.0, 0.1], g: [0.0, 0.2], r: [1.0, 0.05], lambda: 0.0, mu: 0.0 }),
            (CausalClass::Lightlike, FlatParams { f: [0.0, 0.1], g: [0.0, 0.5], r: [0.0, 0.0], lambda: 1.0, mu: 2.0 }),
        ];
        for (kind, p) in cases {
            let d = Domain::new(0.0, 1.0, -0.5, 0.5).unwrap();
            let s = flat_family(kind, p, d, 0.0).unwrap();
            let scan = coefficient_scan(&s, &wc(0.0, 1.0, 0.0), &d.u_nodes(4), &ScanOptions::default()).unwrap();
            assert!(scan.summary < 1e-10, "{kind}: {}", scan.summary);
            assert!(scan.max_fit_residual < 1e-10, "{kind}: fit {}", scan.max_fit_residual);
            let s = flat_family(kind, p, d, 0.01).unwrap();
            let scan = coefficient_scan(&s, &wc(0.0, 1.0, 0.0), &d.u_nodes(4), &ScanOptions::default()).unwrap();
            assert!(scan.summary > 1e-4, "{kind} control: {}", scan.summary);
        }
    }

    fn random_parallel(kind: CausalClass) -> Surface {
        let d = Domain::new(0.0, 1.0, -0.5, 0.5).unwrap();
        let f = ProfileExpr::poly(&[0.1, 0.3, -0.2]);
        let g = ProfileExpr::Sin { amp: 1.0, freq: 1.3, phase: 0.2 };
        let r = ProfileExpr::poly(&[1.0, 0.2, 0.1]);
        cyclic_parallel(kind, ProfileFn::from(&f), ProfileFn::from(&g), ProfileFn::from(&r), d).unwrap()
    }

    #[test]
    fn degree_ceilings() {
        for kind in [CausalClass::Spacelike, CausalClass::Timelike] {
            let s = random_parallel(kind);
            let opts = ScanOptions::default();
            for u in [0.2, 0.7] {
                let sp = spectrum_at(&s, &wc(0.7, 0.5, 0.0), u, &opts).unwrap();
                assert!(sp.max_from(5).0 < 1e-10, "{kind} c = 0: {:?}", sp.max_from(5));
                assert!(sp.max_from(4).0 > 1e-6);
                let sp = spectrum_at(&s, &wc(0.7, 0.3, 1.1), u, &opts).unwrap();
                assert!(sp.max_from(9).0 < 1e-10, "{kind} c ≠ 0: {:?}", sp.max_from(9));
                assert!(sp.max_from(8).0 > 1e-6);
            }
        }
        let s = random_parallel(CausalClass::Lightlike);
        let sp = spectrum_at(&s, &wc(0.7, 0.5, 0.0), 0.4, &ScanOptions::default()).unwrap();
        assert!(sp.max_from(7).0 < 1e-10 && sp.fit_residual < 1e-10, "{:?}", sp.max_from(7));
        let sp = spectrum_at(&s, &wc(0.7, 0.5, 1.0), 0.4, &ScanOptions::default()).unwrap();
        assert!(sp.max_from(9).0 < 1e-10 && sp.fit_residual < 1e-10, "{:?}", sp.max_from(9));
    }

    #[test]
    fn hyperbolic_extraction_matches_real_samples() {
        let s = random_parallel(CausalClass::Timelike);
        let w = wc(0.7, 0.3, 1.1);
        let sp = spectrum_at(&s, &w, 0.3, &ScanOptions::default()).unwrap();
        for v in [-0.4, 0.1, 0.5] {
            let phi = crate::kernel::rationalized_residual(&s.eval(0.3, v).unwrap(), &w);
            let series: f64 =
                (0..=sp.j_max).map(|k| sp.a[k] * (k as f64 * v).cosh() + sp.b[k] * (k as f64 * v).sinh()).sum();
            assert!((phi - series).abs() < 1e-10 * sp.scale, "{phi} vs {series}");
        }
    }

    #[test]
    fn squared_w_form_differs() {
        let s = random_parallel(CausalClass::Spacelike);
        let w = wc(0.7, 0.5, 0.0);
        let opts = ScanOptions { form: ResidualForm::SquaredW, ..ScanOptions::default() };
        let sp = spectrum_at(&s, &w, 0.3, &opts).unwrap();
        // the extra W factor raises the trigonometric degree
        assert!(sp.max_from(5).0 > 1e-8);
    }
}
