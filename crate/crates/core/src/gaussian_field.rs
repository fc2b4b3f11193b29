//! Spectral synthesis of the log-correlated field, its mollified
//! regularizations and the subcritical multiplicative chaos built on them.
//!
//! The field has the representation `G(u) = 2 Re ∫₀^∞ sin(πℓκ)/√κ e^{−2πiκu} dB(κ)`
//! with `B` a standard complex Brownian motion; the regularized field
//! multiplies the amplitude by `φ̂(εκ)`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::FftPlanner;

use crate::covariance::{q_kernel, t_exact, KernelParams, Mollifier};
use crate::error::{Error, Result};
use crate::quad::{self, Estimate};
use crate::rng::trial_rng;
use crate::transforms::SampledFunction;

/// Largest admissible `Δκ · (spatial extent)`.
pub const PERIODIZATION_GUARD: f64 = 0.25;

/// A uniform spatial grid `start + i·step`, `i < count`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub step: f64,
    pub count: usize,
}

impl Grid {
    /// The smallest power-of-two grid with spacing at most `step` that
    /// covers `[a, b]`.
    pub fn covering(a: f64, b: f64, step: f64) -> Result<Self> {
        if !(b > a) || !(step > 0.0) {
            return Err(Error::invalid(format!("bad grid [{a}, {b}] step {step}")));
        }
        let intervals = ((b - a) / step).ceil() as usize;
        let count = (intervals + 1).next_power_of_two();
        let step = (b - a) / intervals as f64;
        Ok(Self {
            start: a,
            step,
            count,
        })
    }

    pub fn x(&self, i: usize) -> f64 {
        self.start + i as f64 * self.step
    }

    pub fn end(&self) -> f64 {
        self.x(self.count - 1)
    }

    pub fn extent(&self) -> f64 {
        self.step * (self.count - 1) as f64
    }
}

/// Frequency discretization of the spectral representation for one
/// regularization scale.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSynthesisPlan {
    pub grid: Grid,
    pub cutoff: f64,
    pub dk: f64,
    pub mollifier: Mollifier,
    /// Regularization scale; 0 marks the unregularized (cutoff-only) field.
    pub eps: f64,
    pub params: KernelParams,
    /// Spatial oversampling: the FFT grid is `grid.step / oversample`.
    oversample: usize,
    fft_len: usize,
}

impl SpectralSynthesisPlan {
    /// Chooses the cutoff `K = max(8, κ_tail)/ε` and a frequency step with
    /// `Δκ · extent ≤ 1/64`.
    pub fn new(grid: Grid, eps: f64, mollifier: Mollifier, params: KernelParams) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::invalid(
                "automatic planning needs ε > 0; use `with_frequencies` for the unregularized field",
            ));
        }
        let cutoff = mollifier.fourier_cutoff(1e-8).max(8.0) / eps;
        let dk = 1.0 / (64.0 * grid.extent().max(params.ell));
        Self::with_frequencies(grid, eps, mollifier, params, cutoff, dk)
    }

    /// A plan with explicit cutoff `K` and frequency step `Δκ`.
    pub fn with_frequencies(
        grid: Grid,
        eps: f64,
        mollifier: Mollifier,
        params: KernelParams,
        cutoff: f64,
        dk: f64,
    ) -> Result<Self> {
        if grid.count < 2 || !grid.count.is_power_of_two() || !(grid.step > 0.0) {
            return Err(Error::invalid("field grids need a power-of-two count ≥ 2"));
        }
        if !(cutoff > 0.0 && dk > 0.0) {
            return Err(Error::invalid("cutoff and frequency step must be positive"));
        }
        if dk * grid.extent() > PERIODIZATION_GUARD {
            return Err(Error::invalid(format!(
                "Δκ·extent = {} exceeds the periodization guard {PERIODIZATION_GUARD}",
                dk * grid.extent()
            )));
        }
        if eps < 0.0 || (eps > 0.0 && cutoff * eps < 8.0) {
            return Err(Error::invalid(format!(
                "K·ε = {} is below 8: mollifier tail unresolved",
                cutoff * eps
            )));
        }
        // FFT grid: step h = 1/(M Δκ) must divide grid.step and resolve K.
        let mut oversample = 1usize;
        while grid.step / oversample as f64 > 1.0 / cutoff {
            oversample *= 2;
        }
        let h = grid.step / oversample as f64;
        let m_min = (1.0 / (h * dk)).ceil() as usize;
        let fft_len = m_min.next_power_of_two();
        let dk = 1.0 / (fft_len as f64 * h);
        Ok(Self {
            grid,
            cutoff,
            dk,
            mollifier,
            eps,
            params,
            oversample,
            fft_len,
        })
    }

    pub fn fft_len(&self) -> usize {
        self.fft_len
    }

    fn n_freq(&self) -> usize {
        ((self.cutoff / self.dk).floor() as usize).min(self.fft_len - 1)
    }

    /// Amplitudes `a_k = sin(πℓκ_k)/√κ_k · φ̂(εκ_k) √Δκ` for `k = 0..`;
    /// the `κ = 0` bin is zero.
    pub fn amplitudes(&self) -> Vec<f64> {
        self.amplitudes_at(self.eps)
    }

    fn amplitudes_at(&self, eps: f64) -> Vec<f64> {
        let n = self.n_freq();
        let sq = self.dk.sqrt();
        (0..=n)
            .map(|k| {
                if k == 0 {
                    return 0.0;
                }
                let kappa = k as f64 * self.dk;
                (PI * self.params.ell * kappa).sin() / kappa.sqrt()
                    * self.mollifier.fourier(eps * kappa)
                    * sq
            })
            .collect()
    }

    /// Exact variance of the discretized field, `2 Σ a_k²`.
    pub fn discrete_variance(&self) -> f64 {
        2.0 * self.amplitudes().iter().map(|a| a * a).sum::<f64>()
    }

    /// Exact covariance of the discretized field at lag `d`.
    pub fn discrete_covariance(&self, d: f64) -> f64 {
        self.amplitudes()
            .iter()
            .enumerate()
            .map(|(k, a)| 2.0 * a * a * (2.0 * PI * k as f64 * self.dk * d).cos())
            .sum()
    }

    /// Bound on the variance discarded above the cutoff,
    /// `2∫_K^∞ φ̂(εκ)² Q̂(κ) dκ ≤ 2∫_K^∞ φ̂(εκ)²/κ dκ`.
    pub fn cutoff_error(&self) -> f64 {
        if self.eps == 0.0 {
            return f64::INFINITY;
        }
        let m = self.mollifier;
        let e = self.eps;
        let top = m.fourier_cutoff(1e-17) / e;
        if top <= self.cutoff {
            return 0.0;
        }
        quad::adaptive(
            |k| 2.0 * m.fourier(e * k).powi(2) / k,
            self.cutoff,
            top,
            1e-16,
            1e-8,
        )
        .map(|r| r.value)
        .unwrap_or(f64::INFINITY)
    }

    /// The regularized covariance this plan approximates at lag `d`.
    pub fn target_covariance(&self, d: f64) -> Result<Estimate> {
        t_exact(
            d,
            0.0,
            self.eps,
            self.eps,
            self.mollifier,
            self.mollifier,
            self.params,
        )
    }
}

/// One draw of the regularized field on the plan grid.
///
/// `values` holds the raw field `G_{φ,ε}`; the chaos exponent
/// `γG − (γ²/2)·variance` is formed in [`gmc_density`].
#[derive(Debug, Clone, PartialEq)]
pub struct FieldRealization {
    pub grid: Grid,
    pub values: Vec<f64>,
    /// Variance profile used for centering (the field is stationary, so it
    /// is one number: the exact variance of the discretized field).
    pub variance: f64,
    pub eps: f64,
    pub seed: u64,
    pub trial: u64,
}

impl FieldRealization {
    pub fn variance_profile(&self) -> Vec<f64> {
        vec![self.variance; self.grid.count]
    }
}

fn draw_noise(rng: &mut impl Rng, n: usize) -> Vec<Complex64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    (0..n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(s * re, s * im)
        })
        .collect()
}

fn synthesize(plan: &SpectralSynthesisPlan, amps: &[f64], noise: &[Complex64]) -> Vec<f64> {
    let m = plan.fft_len;
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    let start = plan.grid.start;
    for (k, (a, z)) in amps.iter().zip(noise).enumerate() {
        let phase = Complex64::from_polar(1.0, -2.0 * PI * k as f64 * plan.dk * start);
        buf[k] = *a * z * phase;
    }
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    (0..plan.grid.count)
        .map(|i| 2.0 * buf[i * plan.oversample].re)
        .collect()
}

/// Draws trial `trial` of the field for master seed `seed`.
pub fn sample_field(plan: &SpectralSynthesisPlan, seed: u64, trial: u64) -> FieldRealization {
    let amps = plan.amplitudes();
    let mut rng = trial_rng(seed, trial);
    let noise = draw_noise(&mut rng, amps.len());
    FieldRealization {
        grid: plan.grid,
        values: synthesize(plan, &amps, &noise),
        variance: 2.0 * amps.iter().map(|a| a * a).sum::<f64>(),
        eps: plan.eps,
        seed,
        trial,
    }
}

/// Draws the fields at every scale in `scales` from one white-noise sample,
/// so the regularizations are coupled as in a single field. The plan must
/// be built for the smallest scale.
pub fn sample_family(
    plan: &SpectralSynthesisPlan,
    scales: &[f64],
    seed: u64,
    trial: u64,
) -> Result<Vec<FieldRealization>> {
    if scales.iter().any(|&e| e < plan.eps || !(e > 0.0)) {
        return Err(Error::invalid(
            "family scales must be at least the plan's ε",
        ));
    }
    let n = plan.n_freq() + 1;
    let mut rng = trial_rng(seed, trial);
    let noise = draw_noise(&mut rng, n);
    Ok(scales
        .iter()
        .map(|&e| {
            let amps = plan.amplitudes_at(e);
            FieldRealization {
                grid: plan.grid,
                values: synthesize(plan, &amps, &noise),
                variance: 2.0 * amps.iter().map(|a| a * a).sum::<f64>(),
                eps: e,
                seed,
                trial,
            }
        })
        .collect())
}

/// Chaos density `exp(γG − (γ²/2)·Var G)` on the field grid.
pub fn gmc_density(field: &FieldRealization, gamma: f64) -> Result<SampledFunction> {
    if !(gamma > 0.0 && gamma < std::f64::consts::SQRT_2) {
        return Err(Error::domain(format!(
            "γ = {gamma} is outside the subcritical range (0, √2)"
        )));
    }
    let c = 0.5 * gamma * gamma * field.variance;
    SampledFunction::from_real(
        field.grid.start,
        field.grid.step,
        field.values.iter().map(|g| (gamma * g - c).exp()).collect(),
    )
}

/// A nonnegative weight supported on `[a, b]`.
#[derive(Clone)]
pub enum Weight {
    Indicator {
        a: f64,
        b: f64,
    },
    Density {
        a: f64,
        b: f64,
        f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    },
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weight::Indicator { a, b } => write!(f, "Indicator[{a}, {b}]"),
            Weight::Density { a, b, .. } => write!(f, "Density[{a}, {b}]"),
        }
    }
}

impl Weight {
    pub fn indicator(a: f64, b: f64) -> Self {
        Weight::Indicator { a, b }
    }

    pub fn support(&self) -> (f64, f64) {
        match self {
            Weight::Indicator { a, b } | Weight::Density { a, b, .. } => (*a, *b),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (a, b) = self.support();
        if x < a || x > b {
            return 0.0;
        }
        match self {
            Weight::Indicator { .. } => 1.0,
            Weight::Density { f, .. } => f(x),
        }
    }

    pub fn total(&self) -> f64 {
        match self {
            Weight::Indicator { a, b } => b - a,
            Weight::Density { a, b, f } => quad::adaptive(|x| f(x), *a, *b, 1e-13, 1e-12)
                .map(|e| e.value)
                .unwrap_or(f64::NAN),
        }
    }

    /// Autocorrelation `A(d) = ∫ w(x) w(x + d) dx`.
    pub fn autocorrelation(&self, d: f64) -> f64 {
        let (a, b) = self.support();
        let d = d.abs();
        match self {
            Weight::Indicator { .. } => (b - a - d).max(0.0),
            Weight::Density { f, .. } => {
                if d >= b - a {
                    return 0.0;
                }
                quad::adaptive(|x| f(x) * f(x + d), a, b - d, 1e-13, 1e-11)
                    .map(|e| e.value)
                    .unwrap_or(f64::NAN)
            }
        }
    }
}

/// `∫ density · w` using the piecewise-linear interpolant of the samples.
pub fn mass(density: &SampledFunction, w: &Weight) -> Result<f64> {
    let (a, b) = w.support();
    let h = density.step;
    if a < density.start - 1e-12 * h || b > density.end() + 1e-12 * h {
        return Err(Error::invalid(format!(
            "weight support [{a}, {b}] escapes the grid [{}, {}]",
            density.start,
            density.end()
        )));
    }
    let g = |x: f64| density.interpolate(x) * w.eval(x);
    let i0 = (((a - density.start) / h).floor().max(0.0)) as usize;
    let i1 = (((b - density.start) / h).ceil() as usize).min(density.len() - 1);
    let mut total = 0.0;
    for i in i0..i1 {
        let lo = density.x(i).max(a);
        let hi = density.x(i + 1).min(b);
        if hi > lo {
            match w {
                // exact for the interpolant
                Weight::Indicator { .. } => total += 0.5 * (hi - lo) * (g(lo) + g(hi)),
                Weight::Density { .. } => {
                    let mid = 0.5 * (lo + hi);
                    total += (hi - lo) * (g(lo) + 4.0 * g(mid) + g(hi)) / 6.0;
                }
            }
        }
    }
    Ok(total)
}

/// The covariance `T(d)` of the field at lag `d`, tabulated once so that
/// moment integrals can query it cheaply.
#[derive(Debug, Clone)]
pub struct CovarianceTable {
    eps: f64,
    params: KernelParams,
    step: f64,
    values: Vec<f64>,
}

impl CovarianceTable {
    /// `eps = 0` uses the exact kernel `Q` without tabulation.
    pub fn new(eps: f64, mollifier: Mollifier, params: KernelParams, d_max: f64) -> Result<Self> {
        if eps == 0.0 {
            return Ok(Self {
                eps,
                params,
                step: 0.0,
                values: Vec::new(),
            });
        }
        let step = (eps / 32.0).min(d_max / 64.0);
        let n = (d_max / step).ceil() as usize + 3;
        let values = (0..=n)
            .map(|i| {
                t_exact(i as f64 * step, 0.0, eps, eps, mollifier, mollifier, params)
                    .map(|e| e.value)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            eps,
            params,
            step,
            values,
        })
    }

    pub fn eval(&self, d: f64) -> f64 {
        let d = d.abs();
        if self.eps == 0.0 {
            return q_kernel(d, self.params).unwrap_or(f64::INFINITY);
        }
        // four-point Lagrange, reflected across 0 by evenness
        let s = d / self.step;
        let i = (s.floor() as usize).min(self.values.len() - 3);
        let r = s - i as f64;
        let at = |j: i64| self.values[j.unsigned_abs() as usize];
        let i = i as i64;
        let (p0, p1, p2, p3) = (at(i - 1), at(i), at(i + 1), at(i + 2));
        -r * (r - 1.0) * (r - 2.0) / 6.0 * p0 + (r + 1.0) * (r - 1.0) * (r - 2.0) / 2.0 * p1
            - (r + 1.0) * r * (r - 2.0) / 2.0 * p2
            + (r + 1.0) * r * (r - 1.0) / 6.0 * p3
    }
}

/// `∫ exp(γ² Σ_{j<k} T(u_j − u_k)) ∏ w(u_j) du`, with `T = Q` when `eps = 0`
/// and `T = T_{ε,ε}` otherwise.
///
/// `q ≤ 3` uses stationary reductions to one or two dimensions and adaptive
/// quadrature; larger `q` falls back to randomized quasi-Monte Carlo whose
/// standard error is reported.
pub fn exact_gaussian_moment(
    q: u32,
    gamma: f64,
    w: &Weight,
    eps: f64,
    mollifier: Mollifier,
    params: KernelParams,
) -> Result<Estimate> {
    if q == 0 {
        return Err(Error::invalid("moment order must be positive"));
    }
    let g2 = gamma * gamma;
    if eps == 0.0 && g2 * q as f64 >= 2.0 {
        return Err(Error::Divergent(format!(
            "γ²q = {} ≥ 2: the unregularized moment diverges",
            g2 * q as f64
        )));
    }
    let total = w.total();
    if q == 1 {
        return Ok(Estimate {
            value: total,
            error: 0.0,
        });
    }
    if gamma == 0.0 {
        return Ok(Estimate {
            value: total.powi(q as i32),
            error: 0.0,
        });
    }
    let (a, b) = w.support();
    let len = b - a;
    let table = CovarianceTable::new(eps, mollifier, params, len)?;
    match q {
        2 => moment_two(g2, w, &table, eps, len),
        3 => moment_three(g2, w, &table, eps, len),
        _ => qmc_moment(q, gamma, w, |d| table.eval(d), 1 << 14, 16, 0x5eed),
    }
}

fn moment_two(g2: f64, w: &Weight, t: &CovarianceTable, eps: f64, len: f64) -> Result<Estimate> {
    let e = if eps == 0.0 {
        // d = s^m removes the |d|^{−γ²} singularity
        let m = 1.0 / (1.0 - g2);
        let top = len.powf(1.0 / m);
        quad::adaptive(
            |s| {
                if s == 0.0 {
                    return 0.0;
                }
                let d = s.powf(m);
                let jac = m * s.powf(m - 1.0);
                (g2 * t.eval(d)).exp() * w.autocorrelation(d) * jac
            },
            0.0,
            top,
            1e-13,
            1e-11,
        )?
    } else {
        let mut pts = vec![0.0];
        let mut x = eps;
        while x < len {
            pts.push(x);
            x *= 2.0;
        }
        pts.push(len);
        quad::adaptive_breaks(
            |d| (g2 * t.eval(d)).exp() * w.autocorrelation(d),
            &pts,
            1e-13,
            1e-11,
        )?
    };
    Ok(Estimate {
        value: 2.0 * e.value,
        error: 2.0 * e.error,
    })
}

fn autocorrelation3(w: &Weight, x: f64, y: f64) -> f64 {
    let (a, b) = w.support();
    match w {
        Weight::Indicator { .. } => (b - a - x - y).max(0.0),
        Weight::Density { f, .. } => {
            let hi = b - x - y;
            if hi <= a {
                return 0.0;
            }
            quad::adaptive(|u| f(u) * f(u + x) * f(u + x + y), a, hi, 1e-13, 1e-10)
                .map(|e| e.value)
                .unwrap_or(f64::NAN)
        }
    }
}

fn moment_three(g2: f64, w: &Weight, t: &CovarianceTable, eps: f64, len: f64) -> Result<Estimate> {
    // Ordered points with gaps x = r c, y = r (1 − c); six orderings.
    let integrand = |r: f64, c: f64| {
        let x = r * c;
        let y = r - x;
        if x <= 0.0 || y <= 0.0 {
            return 0.0;
        }
        (g2 * (t.eval(x) + t.eval(y) + t.eval(r))).exp() * autocorrelation3(w, x, y) * r
    };
    let (mr, mc) = if eps == 0.0 {
        (1.0 / (2.0 - 3.0 * g2), 1.0 / (1.0 - g2))
    } else {
        (1.0, 1.0)
    };
    let inner_err = std::cell::Cell::new(0.0);
    let inner = |r: f64| -> f64 {
        // c on [0, ½] with c = ½(2τ)^{mc}, doubled by the x ↔ y symmetry
        let res = quad::adaptive(
            |tau| {
                if tau == 0.0 {
                    return 0.0;
                }
                let c = 0.5 * (2.0 * tau).powf(mc);
                let jac = mc * (2.0 * tau).powf(mc - 1.0);
                integrand(r, c) * jac
            },
            0.0,
            0.5,
            1e-14,
            1e-10,
        );
        match res {
            Ok(e) => {
                inner_err.set(inner_err.get() + e.error);
                2.0 * e.value
            }
            Err(Error::NoConvergence { estimate, error }) => {
                inner_err.set(inner_err.get() + error);
                2.0 * estimate
            }
            Err(_) => f64::NAN,
        }
    };
    let top = len.powf(1.0 / mr);
    let outer = quad::adaptive(
        |s| {
            if s == 0.0 {
                return 0.0;
            }
            let r = s.powf(mr);
            inner(r) * mr * s.powf(mr - 1.0)
        },
        0.0,
        top,
        1e-12,
        1e-9,
    )?;
    Ok(Estimate {
        value: 6.0 * outer.value,
        error: 6.0 * outer.error,
    })
}

const PRIMES: [u32; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as u64;
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += (i % b) as f64 * f;
        i /= b;
        f *= inv;
    }
    r
}

/// Randomly shifted Halton estimate of `∫ exp(γ² Σ_{j<k} T(u_j − u_k)) ∏ w(u_j) du`
/// over the weight's support. The error is the standard error across shifts.
pub fn qmc_moment(
    q: u32,
    gamma: f64,
    w: &Weight,
    kernel: impl Fn(f64) -> f64,
    points: usize,
    shifts: usize,
    seed: u64,
) -> Result<Estimate> {
    let q = q as usize;
    if q > PRIMES.len() {
        return Err(Error::invalid(format!("QMC supports q ≤ {}", PRIMES.len())));
    }
    let g2 = gamma * gamma;
    let (a, b) = w.support();
    let vol = (b - a).powi(q as i32);
    let mut estimates = Vec::with_capacity(shifts);
    let mut u = vec![0.0; q];
    for s in 0..shifts {
        let mut rng = trial_rng(seed, s as u64);
        let shift: Vec<f64> = (0..q).map(|_| rng.random::<f64>()).collect();
        let mut acc = 0.0;
        for i in 1..=points {
            for (j, uj) in u.iter_mut().enumerate() {
                let x = (radical_inverse(i as u64, PRIMES[j]) + shift[j]).fract();
                *uj = a + (b - a) * x;
            }
            let mut expo = 0.0;
            let mut wt = 1.0;
            for j in 0..q {
                wt *= w.eval(u[j]);
                for k in (j + 1)..q {
                    expo += kernel(u[j] - u[k]);
                }
            }
            acc += wt * (g2 * expo).exp();
        }
        estimates.push(vol * acc / points as f64);
    }
    let e = crate::stats::mean_estimate(&estimates);
    Ok(Estimate {
        value: e.mean,
        error: e.std_err,
    })
}

/// Chaos mass on `w` carried by points where the family violates
/// `Z_k ≤ αk` for some `k ≥ level`, relative to `∫w`. `family[k−1]` is the
/// field at scale `e^{−k}`; the chaos density uses the finest member.
pub fn thick_point_fraction(
    family: &[FieldRealization],
    gamma: f64,
    alpha: f64,
    level: usize,
    w: &Weight,
) -> Result<f64> {
    if family.is_empty() || level == 0 {
        return Err(Error::invalid("need a nonempty family and level ≥ 1"));
    }
    let finest = family.last().expect("nonempty");
    let density = gmc_density(finest, gamma)?;
    let n = finest.grid.count;
    let mut flagged = vec![0.0; n];
    for (i, f) in flagged.iter_mut().enumerate() {
        let thick = family
            .iter()
            .enumerate()
            .skip(level - 1)
            .any(|(k, z)| z.values[i] > alpha * (k + 1) as f64);
        if thick {
            *f = density.values[i].re;
        }
    }
    let masked = SampledFunction::from_real(density.start, density.step, flagged)?;
    Ok(mass(&masked, w)? / w.total())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::selberg_interval_moment;
    use crate::stats::{covariance_estimate, mean_estimate};

    const P: KernelParams = KernelParams { ell: 1.0 };

    fn plan(eps: f64) -> SpectralSynthesisPlan {
        let grid = Grid::covering(0.0, 1.0, eps / 4.0).unwrap();
        SpectralSynthesisPlan::new(grid, eps, Mollifier::Gaussian, P).unwrap()
    }

    #[test]
    fn plan_invariants_enforced() {
        let grid = Grid::covering(0.0, 1.0, 0.01).unwrap();
        assert!(grid.count.is_power_of_two() && grid.end() >= 1.0);
        let g = Mollifier::Gaussian;
        assert!(SpectralSynthesisPlan::with_frequencies(grid, 0.1, g, P, 40.0, 1.0).is_err());
        assert!(SpectralSynthesisPlan::with_frequencies(grid, 0.1, g, P, 10.0, 0.01).is_err());
        assert!(SpectralSynthesisPlan::with_frequencies(grid, 0.0, g, P, 100.0, 0.01).is_ok());
        assert!(SpectralSynthesisPlan::new(grid, 0.0, g, P).is_err());
        let p = plan(0.05);
        assert!(p.dk * p.grid.extent() <= PERIODIZATION_GUARD);
        assert!(p.cutoff * p.eps >= 8.0);
        assert!(p.cutoff_error() < 1e-12);
    }

    #[test]
    fn discrete_variance_matches_t_exact() {
        let p = plan(0.05);
        let t = p.target_covariance(0.0).unwrap().value;
        assert!(
            (p.discrete_variance() - t).abs() < 1e-3,
            "{} {t}",
            p.discrete_variance()
        );
        let c = p.target_covariance(0.5).unwrap().value;
        assert!((p.discrete_covariance(0.5) - c).abs() < 1e-3);
    }

    #[test]
    fn seed_determinism() {
        let p = plan(0.1);
        let a = sample_field(&p, 42, 7);
        let b = sample_field(&p, 42, 7);
        let c = sample_field(&p, 42, 8);
        assert_eq!(a, b);
        assert_ne!(a.values, c.values);
    }

    #[test]
    fn synthesis_matches_direct_sum() {
        let p = plan(0.2);
        let f = sample_field(&p, 1, 0);
        let amps = p.amplitudes();
        let mut rng = trial_rng(1, 0);
        let z = draw_noise(&mut rng, amps.len());
        for i in [0, 3, f.grid.count / 2] {
            let u = f.grid.x(i);
            let direct: f64 = amps
                .iter()
                .zip(&z)
                .enumerate()
                .map(|(k, (a, zk))| {
                    2.0 * (a * zk * Complex64::from_polar(1.0, -2.0 * PI * k as f64 * p.dk * u)).re
                })
                .sum();
            assert!((direct - f.values[i]).abs() < 1e-9);
        }
    }

    #[test]
    fn mean_and_covariance_statistics() {
        let p = plan(0.05);
        let n = 10_000;
        let i_half = ((0.5 - p.grid.start) / p.grid.step).round() as usize;
        let mut x0 = Vec::with_capacity(n);
        let mut x1 = Vec::with_capacity(n);
        for t in 0..n as u64 {
            let f = sample_field(&p, 9, t);
            x0.push(f.values[0]);
            x1.push(f.values[i_half]);
        }
        let m = mean_estimate(&x0);
        assert!(m.z_score(0.0) < 4.0);
        let c = covariance_estimate(&x0, &x1);
        let d = p.grid.x(i_half) - p.grid.x(0);
        let target = p.target_covariance(d).unwrap().value;
        assert!(c.z_score(target) < 4.0, "{c:?} vs {target}");
    }

    #[test]
    fn density_and_mass() {
        let p = plan(0.1);
        let f = sample_field(&p, 3, 0);
        let d = gmc_density(&f, 1e-9).unwrap();
        assert!(d.values.iter().all(|v| (v.re - 1.0).abs() < 1e-6));
        let d = gmc_density(&f, 0.9).unwrap();
        assert!(d.values.iter().all(|v| v.re.is_finite() && v.re > 0.0));
        assert!(gmc_density(&f, 1.5).is_err());
        assert!(gmc_density(&f, 0.0).is_err());
        let one = SampledFunction::from_fn(0.0, 0.01, 128, |_| 1.0).unwrap();
        assert!((mass(&one, &Weight::indicator(0.0, 0.37)).unwrap() - 0.37).abs() < 1e-12);
        let whole = mass(&d, &Weight::indicator(0.0, 1.0)).unwrap();
        let parts = mass(&d, &Weight::indicator(0.0, 0.3)).unwrap()
            + mass(&d, &Weight::indicator(0.3, 1.0)).unwrap();
        assert!((whole - parts).abs() < 1e-12 * whole);
        assert!(mass(&one, &Weight::indicator(0.5, 3.0)).is_err());
    }

    #[test]
    fn moment_trivial_cases() {
        let w = Weight::indicator(0.0, 0.7);
        let g = Mollifier::Gaussian;
        assert!((exact_gaussian_moment(1, 0.8, &w, 0.0, g, P).unwrap().value - 0.7).abs() < 1e-15);
        assert!(
            (exact_gaussian_moment(3, 0.0, &w, 0.0, g, P).unwrap().value - 0.343).abs() < 1e-14
        );
        assert!(matches!(
            exact_gaussian_moment(2, 1.0, &w, 0.0, g, P),
            Err(Error::Divergent(_))
        ));
    }

    #[test]
    fn moment_two_large_ell_matches_selberg() {
        // With ℓ huge, Q(d) = −log|d| + log ℓ + O(d²/ℓ²).
        let ell = 1e4;
        let g2: f64 = 0.5;
        let w = Weight::indicator(0.0, 1.0);
        let m = exact_gaussian_moment(
            2,
            g2.sqrt(),
            &w,
            0.0,
            Mollifier::Gaussian,
            KernelParams { ell },
        )
        .unwrap()
        .value;
        let pure = selberg_interval_moment(2, g2.sqrt(), 1.0).unwrap().value;
        let scaled = m * ell.powf(-g2);
        assert!((scaled - pure).abs() < 1e-3 * pure, "{scaled} {pure}");
    }

    #[test]
    fn moment_three_and_qmc_agree() {
        let g = 0.4f64;
        let w = Weight::indicator(0.0, 1.0);
        let exact = exact_gaussian_moment(
            3,
            g,
            &w,
            0.0,
            Mollifier::Gaussian,
            KernelParams { ell: 1e4 },
        )
        .unwrap();
        let scaled = exact.value * (1e4f64).powf(-3.0 * g * g);
        let s = selberg_interval_moment(3, g, 1.0).unwrap().value;
        assert!((scaled - s).abs() < 1e-4 * s, "{scaled} {s}");

        let eps = 0.05;
        let g = Mollifier::Gaussian;
        let quad3 = exact_gaussian_moment(3, 0.6, &w, eps, g, P).unwrap();
        let table = CovarianceTable::new(eps, g, P, 1.0).unwrap();
        let qmc = qmc_moment(3, 0.6, &w, |d| table.eval(d), 1 << 13, 16, 11).unwrap();
        assert!(
            (qmc.value - quad3.value).abs() < 4.0 * qmc.error + 1e-6,
            "{qmc:?} {quad3:?}"
        );
    }

    #[test]
    fn thick_points_vanish_for_large_alpha() {
        let scales: Vec<f64> = (1..=4).map(|k| (-(k as f64)).exp()).collect();
        let grid = Grid::covering(0.0, 1.0, scales[3] / 4.0).unwrap();
        let p = SpectralSynthesisPlan::new(grid, scales[3], Mollifier::Gaussian, P).unwrap();
        let fam = sample_family(&p, &scales, 5, 0).unwrap();
        let w = Weight::indicator(0.0, 1.0);
        assert_eq!(thick_point_fraction(&fam, 0.8, 10.0, 1, &w).unwrap(), 0.0);
        let a = thick_point_fraction(&fam, 0.8, 1.3, 1, &w).unwrap();
        let b = thick_point_fraction(&fam, 0.8, 1.3, 3, &w).unwrap();
        assert!(b <= a);
    }
}
