//! Fourier, Hilbert and Cauchy boundary-value transforms on uniform grids,
//! and the three equivalent forms of the H^{1/2} inner product.
//!
//! The Fourier convention is `f̂(κ) = ∫ e^{−2πiκx} f(x) dx`. The Hilbert
//! transform is the multiplier `−i sgn κ`, i.e. `ℋf(x) = (1/π) PV∫ f(t)/(x−t) dt`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Zero-padding factor applied before any fast convolution on decaying data.
pub const PAD_FACTOR: usize = 4;

/// Samples of a function on a uniform grid `start + i·step`.
///
/// Non-periodic data is treated as vanishing off the grid and is zero-padded
/// to a power-of-two length. Periodic data is taken as one full period and is
/// never padded.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    pub start: f64,
    pub step: f64,
    pub values: Vec<Complex64>,
    pub real: bool,
    pub periodic: bool,
}

impl SampledFunction {
    pub fn new(start: f64, step: f64, values: Vec<Complex64>, real: bool) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("empty sample vector"));
        }
        if !(step > 0.0) || !step.is_finite() || !start.is_finite() {
            return Err(Error::invalid(format!(
                "bad grid start={start}, step={step}"
            )));
        }
        if real && values.iter().any(|v| v.im != 0.0) {
            return Err(Error::invalid(
                "real-flagged data has nonzero imaginary parts",
            ));
        }
        let mut values = values;
        let n = values.len().next_power_of_two();
        values.resize(n, Complex64::new(0.0, 0.0));
        Ok(Self {
            start,
            step,
            values,
            real,
            periodic: false,
        })
    }

    pub fn from_real(start: f64, step: f64, values: Vec<f64>) -> Result<Self> {
        Self::new(
            start,
            step,
            values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
            true,
        )
    }

    /// Samples `f` at `n` grid points.
    pub fn from_fn(start: f64, step: f64, n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_real(
            start,
            step,
            (0..n).map(|i| f(start + i as f64 * step)).collect(),
        )
    }

    /// One period `[start, start + n·step)` of a periodic real function.
    /// `n` must be a power of two.
    pub fn periodic_from_fn(
        start: f64,
        step: f64,
        n: usize,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        if !n.is_power_of_two() {
            return Err(Error::invalid("periodic grids need a power-of-two length"));
        }
        let mut s = Self::from_fn(start, step, n, f)?;
        s.periodic = true;
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn x(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn end(&self) -> f64 {
        self.x(self.len() - 1)
    }

    pub fn real_values(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    /// Linear interpolation of the real part; zero off the grid.
    pub fn interpolate(&self, x: f64) -> f64 {
        let t = (x - self.start) / self.step;
        if t < 0.0 || t > (self.len() - 1) as f64 {
            return 0.0;
        }
        let i = (t.floor() as usize).min(self.len() - 2);
        let s = t - i as f64;
        (1.0 - s) * self.values[i].re + s * self.values[i + 1].re
    }

    fn padded_len(&self) -> usize {
        if self.periodic {
            self.len()
        } else {
            PAD_FACTOR * self.len()
        }
    }

    fn with_values(&self, values: Vec<Complex64>, real: bool) -> Self {
        Self {
            start: self.start,
            step: self.step,
            values,
            real,
            periodic: self.periodic,
        }
    }
}

fn fft(buf: &mut [Complex64], inverse: bool) {
    let mut planner = FftPlanner::new();
    let plan = if inverse {
        planner.plan_fft_inverse(buf.len())
    } else {
        planner.plan_fft_forward(buf.len())
    };
    plan.process(buf);
}

/// Signed frequency index of FFT bin `j` out of `n`; the Nyquist bin maps
/// to `None`.
fn signed_bin(j: usize, n: usize) -> Option<i64> {
    if n.is_multiple_of(2) && j == n / 2 {
        None
    } else if j < n.div_ceil(2) {
        Some(j as i64)
    } else {
        Some(j as i64 - n as i64)
    }
}

/// Padded raw DFT of the samples, in FFT order, without grid phase.
fn raw_spectrum(f: &SampledFunction) -> Vec<Complex64> {
    let mut buf = f.values.clone();
    buf.resize(f.padded_len(), Complex64::new(0.0, 0.0));
    fft(&mut buf, false);
    buf
}

/// Applies a Fourier multiplier `m(κ)` and returns to the spatial grid.
fn apply_multiplier(f: &SampledFunction, m: impl Fn(i64, f64) -> Complex64) -> Vec<Complex64> {
    let mut buf = raw_spectrum(f);
    let n = buf.len();
    let dk = 1.0 / (n as f64 * f.step);
    for (j, v) in buf.iter_mut().enumerate() {
        *v *= match signed_bin(j, n) {
            Some(k) => m(k, k as f64 * dk),
            None => Complex64::new(0.0, 0.0),
        };
    }
    fft(&mut buf, true);
    let scale = 1.0 / n as f64;
    buf.truncate(f.len());
    buf.iter().map(|v| v * scale).collect()
}

/// Trapezoidal Fourier transform on the dual grid `κ_j = j·Δκ`, returned in
/// ascending frequency order starting at `−(n/2)Δκ`.
pub fn fourier(f: &SampledFunction) -> Result<SampledFunction> {
    if f.is_empty() {
        return Err(Error::invalid("empty input"));
    }
    let buf = raw_spectrum(f);
    let n = buf.len();
    let dk = 1.0 / (n as f64 * f.step);
    let half = n / 2;
    let values = (0..n)
        .map(|i| {
            let j = (i + n - half) % n;
            let kappa = (i as f64 - half as f64) * dk;
            let phase = Complex64::from_polar(1.0, -2.0 * PI * kappa * f.start);
            buf[j] * phase * f.step
        })
        .collect();
    Ok(SampledFunction {
        start: -(half as f64) * dk,
        step: dk,
        values,
        real: false,
        periodic: false,
    })
}

/// Hilbert transform via the multiplier `−i sgn κ` with `sgn 0 = 0`.
pub fn hilbert(f: &SampledFunction) -> Result<SampledFunction> {
    if !f.real {
        return Err(Error::invalid("Hilbert transform expects real data"));
    }
    let out = apply_multiplier(f, |k, _| Complex64::new(0.0, -(k.signum() as f64)));
    Ok(f.with_values(
        out.into_iter().map(|v| Complex64::new(v.re, 0.0)).collect(),
        true,
    ))
}

/// Spectral derivative of real data.
pub fn derivative(f: &SampledFunction) -> Result<SampledFunction> {
    if !f.real {
        return Err(Error::invalid("derivative expects real data"));
    }
    let out = apply_multiplier(f, |_, kappa| Complex64::new(0.0, 2.0 * PI * kappa));
    Ok(f.with_values(
        out.into_iter().map(|v| Complex64::new(v.re, 0.0)).collect(),
        true,
    ))
}

/// Half-plane from which a boundary value is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Upper,
    Lower,
}

/// Boundary values `C(f)_± = ±f/2 + (i/2)ℋf` of the Cauchy transform
/// `C(f)(z) = (2πi)⁻¹ ∫ f(t)/(t − z) dt`.
pub fn cauchy_boundary(f: &SampledFunction, side: Side) -> Result<SampledFunction> {
    let h = hilbert(f)?;
    let sign = match side {
        Side::Upper => 0.5,
        Side::Lower => -0.5,
    };
    let values = f
        .values
        .iter()
        .zip(&h.values)
        .map(|(v, hv)| Complex64::new(sign * v.re, 0.5 * hv.re))
        .collect();
    Ok(f.with_values(values, false))
}

/// Which representation of the H^{1/2} inner product to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfInnerMethod {
    /// `∫ |κ| f̂(κ) ĝ(−κ) dκ`
    Spectral,
    /// `(1/4π²) ∬ (f(x)−f(y))(g(x)−g(y))/(x−y)² dx dy`
    DoubleIntegral,
    /// `(−1/2π) ∫ f′ ℋg`
    HilbertPairing,
}

/// An H^{1/2} inner product with an estimate of what the finite grid misses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfInner {
    pub value: f64,
    /// Spectral mass in the outer half of the resolved band, a proxy for the
    /// frequency-truncation error.
    pub tail: f64,
}

fn same_grid(f: &SampledFunction, g: &SampledFunction) -> Result<()> {
    if f.len() != g.len() || f.start != g.start || f.step != g.step || f.periodic != g.periodic {
        return Err(Error::invalid(
            "inner product needs both functions on one grid",
        ));
    }
    if !f.real || !g.real {
        return Err(Error::invalid("inner product expects real data"));
    }
    Ok(())
}

/// Rejects data whose first differences are not themselves resolved, a
/// cheap proxy for "not differentiable on this grid".
fn check_smooth(f: &SampledFunction) -> Result<()> {
    let v = f.real_values();
    let d1 = v
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .fold(0.0, f64::max);
    let d2 = v
        .windows(3)
        .map(|w| (w[2] - 2.0 * w[1] + w[0]).abs())
        .fold(0.0, f64::max);
    if d1 > 0.0 && d2 > 0.5 * d1 {
        return Err(Error::domain(
            "input is not resolved as a differentiable function on its grid",
        ));
    }
    Ok(())
}

/// H^{1/2} inner product of two real functions sampled on the same grid.
pub fn h_half_inner(
    f: &SampledFunction,
    g: &SampledFunction,
    method: HalfInnerMethod,
) -> Result<HalfInner> {
    same_grid(f, g)?;
    match method {
        HalfInnerMethod::Spectral => Ok(spectral_inner(f, g)),
        HalfInnerMethod::DoubleIntegral => Ok(double_integral_inner(f, g)),
        HalfInnerMethod::HilbertPairing => hilbert_pairing_inner(f, g),
    }
}

/// Euler–Maclaurin correction for the kink of `|κ|` at the origin: the
/// trapezoid sum undershoots by `Δκ² f̂(0)ĝ(0)/6` (Poisson summation of the
/// `−1/(2π²y²)` tail of the transform of `|κ|`).
fn kink_correction(f: &SampledFunction, g: &SampledFunction, dk: f64) -> f64 {
    if f.periodic {
        return 0.0;
    }
    let f0: f64 = f.values.iter().map(|v| v.re).sum::<f64>() * f.step;
    let g0: f64 = g.values.iter().map(|v| v.re).sum::<f64>() * g.step;
    dk * dk * f0 * g0 / 6.0
}

fn spectral_inner(f: &SampledFunction, g: &SampledFunction) -> HalfInner {
    let fs = raw_spectrum(f);
    let gs = raw_spectrum(g);
    let n = fs.len();
    let dk = 1.0 / (n as f64 * f.step);
    let kmax = (n / 2) as i64;
    let mut value = 0.0;
    let mut tail = 0.0;
    for j in 0..n {
        let Some(k) = signed_bin(j, n) else { continue };
        let term =
            (k.unsigned_abs() as f64 * dk) * (fs[j] * gs[j].conj()).re * f.step * f.step * dk;
        value += term;
        if 2 * k.abs() > kmax {
            tail += term.abs();
        }
    }
    HalfInner {
        value: value + kink_correction(f, g, dk),
        tail,
    }
}

fn central_differences(v: &[f64], h: f64) -> Vec<f64> {
    let n = v.len();
    (0..n)
        .map(|i| {
            let prev = if i == 0 { 0.0 } else { v[i - 1] };
            let next = if i + 1 == n { 0.0 } else { v[i + 1] };
            (next - prev) / (2.0 * h)
        })
        .collect()
}

fn double_integral_inner(f: &SampledFunction, g: &SampledFunction) -> HalfInner {
    let h = f.step;
    let fv = f.real_values();
    let gv = g.real_values();
    let n = fv.len();
    let fd = central_differences(&fv, h);
    let gd = central_differences(&gv, h);
    let mut sum = 0.0;
    for i in 0..n {
        // Diagonal cell: the difference quotients tend to f′g′.
        sum += fd[i] * gd[i];
        for j in (i + 1)..n {
            let d = (j - i) as f64 * h;
            sum += 2.0 * (fv[i] - fv[j]) * (gv[i] - gv[j]) / (d * d);
        }
    }
    sum *= h * h;
    // Off the grid both functions vanish; the exterior half-lines
    // integrate in closed form.
    let mut tail = 0.0;
    if !f.periodic {
        let a = f.start - 0.5 * h;
        let b = f.end() + 0.5 * h;
        for i in 0..n {
            let x = f.x(i);
            tail += 2.0 * fv[i] * gv[i] * (1.0 / (x - a) + 1.0 / (b - x)) * h;
        }
    }
    HalfInner {
        value: (sum + tail) / (4.0 * PI * PI),
        tail: 0.0,
    }
}

fn hilbert_pairing_inner(f: &SampledFunction, g: &SampledFunction) -> Result<HalfInner> {
    check_smooth(f)?;
    check_smooth(g)?;
    let hg = hilbert(g)?;
    let fd = central_differences(&f.real_values(), f.step);
    let s: f64 = fd
        .iter()
        .zip(&hg.values)
        .map(|(a, b)| a * b.re)
        .sum::<f64>()
        * f.step;
    let dk = 1.0 / (f.padded_len() as f64 * f.step);
    Ok(HalfInner {
        value: -s / (2.0 * PI) + kink_correction(f, g, dk),
        tail: 0.0,
    })
}
