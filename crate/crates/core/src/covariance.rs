//! Mollifiers, the log-correlated kernels `Q`, `Q_ε`, `Q̂`, and the exact
//! regularized covariance `T_{ε,δ}(u, v)` of the smoothed counting field.
//!
//! The unregularized field has spectral density `Q̂(κ) = sin²(πℓκ)/|κ|`
//! (the transform of `χ_u = π·1_{|x−u|≤ℓ/2}` is `e^{−2πiuκ} sin(πℓκ)/κ`),
//! whose covariance is `Q(x) = −log|x| + ½ log|ℓ² − x²|`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::LazyLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quad::{self, Estimate, QuadratureRule};
use crate::specfun::cin;
use crate::transforms::{fourier, SampledFunction};

/// Probability densities used to regularize the indicator statistic.
///
/// All three are even, so their Fourier transforms are real and even.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mollifier {
    /// `e^{−x²/2}/√(2π)`, entire.
    Gaussian,
    /// `1/(π(1+x²))`, analytic in `|Im z| < 1`, heavy tailed.
    CauchyLike,
    /// `C·exp(−1/(1−x²))` on `(−1, 1)`, compactly supported.
    SmoothBump,
}

impl fmt::Display for Mollifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mollifier::Gaussian => "gaussian",
            Mollifier::CauchyLike => "cauchy_like",
            Mollifier::SmoothBump => "smooth_bump",
        })
    }
}

impl FromStr for Mollifier {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Mollifier::Gaussian),
            "cauchy_like" | "cauchy" => Ok(Mollifier::CauchyLike),
            "smooth_bump" | "bump" => Ok(Mollifier::SmoothBump),
            other => Err(Error::invalid(format!("unknown mollifier `{other}`"))),
        }
    }
}

struct BumpTables {
    norm: f64,
    // φ̂ on κ = i·dk, i ≥ 0
    hat: Vec<f64>,
    dk: f64,
    // CDF on x = −1 + i·dx
    cdf: Vec<f64>,
    dx: f64,
}

fn bump_raw(x: f64) -> f64 {
    if x.abs() < 1.0 {
        (-1.0 / (1.0 - x * x)).exp()
    } else {
        0.0
    }
}

static BUMP: LazyLock<BumpTables> = LazyLock::new(|| {
    let rule = QuadratureRule::gauss_legendre(-1.0, 1.0, 200).expect("valid rule");
    let norm = 1.0 / rule.integrate(bump_raw);

    // Trapezoidal transform on a fine grid; spectrally accurate for a C^∞
    // compactly supported density.
    let step = 1.0 / 512.0;
    let n = 16384;
    let samples =
        SampledFunction::from_fn(-16.0, step, n, |x| norm * bump_raw(x)).expect("valid grid");
    let ft = fourier(&samples).expect("nonempty");
    let half = ft.len() / 2;
    let hat: Vec<f64> = ft.values[half..].iter().map(|v| v.re).collect();

    let cells = 4096;
    let dx = 2.0 / cells as f64;
    let (gx, gw) = quad::legendre_nodes(10);
    let mut cdf = Vec::with_capacity(cells + 1);
    let mut acc = 0.0;
    cdf.push(0.0);
    for i in 0..cells {
        let a = -1.0 + i as f64 * dx;
        let s: f64 = gx
            .iter()
            .zip(&gw)
            .map(|(t, w)| w * bump_raw(a + 0.5 * dx * (t + 1.0)))
            .sum();
        acc += 0.5 * dx * s * norm;
        cdf.push(acc);
    }
    BumpTables {
        norm,
        hat,
        dk: ft.step,
        cdf,
        dx,
    }
});

impl Mollifier {
    pub const ALL: [Mollifier; 3] = [
        Mollifier::Gaussian,
        Mollifier::CauchyLike,
        Mollifier::SmoothBump,
    ];

    /// The declared moment order α: `∫|x|^α φ < ∞`.
    pub fn alpha(&self) -> f64 {
        match self {
            Mollifier::CauchyLike => 0.5,
            _ => 2.0,
        }
    }

    /// Half-width of the strip around ℝ where φ extends analytically;
    /// `None` when φ is not analytic.
    pub fn strip_half_width(&self) -> Option<f64> {
        match self {
            Mollifier::Gaussian => Some(f64::INFINITY),
            Mollifier::CauchyLike => Some(1.0),
            Mollifier::SmoothBump => None,
        }
    }

    pub fn density(&self, x: f64) -> f64 {
        match self {
            Mollifier::Gaussian => (-0.5 * x * x).exp() / (2.0 * PI).sqrt(),
            Mollifier::CauchyLike => 1.0 / (PI * (1.0 + x * x)),
            Mollifier::SmoothBump => BUMP.norm * bump_raw(x),
        }
    }

    /// `∫_{−∞}^x φ`.
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Mollifier::Gaussian => 0.5 * libm::erfc(-x / std::f64::consts::SQRT_2),
            Mollifier::CauchyLike => {
                if x > 0.0 {
                    1.0 - (1.0 / x).atan() / PI
                } else if x < 0.0 {
                    -(1.0 / x).atan() / PI
                } else {
                    0.5
                }
            }
            Mollifier::SmoothBump => bump_cdf(x),
        }
    }

    /// Real, even Fourier transform `φ̂(κ) = ∫ e^{−2πiκx} φ(x) dx`.
    pub fn fourier(&self, kappa: f64) -> f64 {
        match self {
            Mollifier::Gaussian => (-2.0 * PI * PI * kappa * kappa).exp(),
            Mollifier::CauchyLike => (-2.0 * PI * kappa.abs()).exp(),
            Mollifier::SmoothBump => bump_hat(kappa.abs()),
        }
    }

    /// A frequency beyond which `|φ̂| < tol`.
    pub fn fourier_cutoff(&self, tol: f64) -> f64 {
        let l = (1.0 / tol).ln().max(0.0);
        match self {
            Mollifier::Gaussian => (l / (2.0 * PI * PI)).sqrt(),
            Mollifier::CauchyLike => l / (2.0 * PI),
            Mollifier::SmoothBump => {
                let t = &*BUMP;
                let last = t.hat.iter().rposition(|v| v.abs() >= tol).unwrap_or(0);
                (last + 1) as f64 * t.dk
            }
        }
    }

    /// A radius outside which φ carries mass below `tol`.
    pub fn tail_radius(&self, tol: f64) -> f64 {
        match self {
            Mollifier::Gaussian => {
                let mut r = (2.0 * (1.0 / tol).ln()).sqrt();
                while libm::erfc(r / std::f64::consts::SQRT_2) > tol {
                    r *= 1.05;
                }
                r
            }
            Mollifier::CauchyLike => 2.0 / (PI * tol),
            Mollifier::SmoothBump => 1.0,
        }
    }

    /// Numerical check of the defining properties: unit mass, φ̂(0) = 1,
    /// and a finite moment of the declared order.
    pub fn validate(&self) -> Result<()> {
        let mass = self.integrate_weighted(|_| 1.0)?;
        if (mass - 1.0).abs() > 1e-10 {
            return Err(Error::Breakdown(format!("{self}: mass {mass}")));
        }
        if (self.fourier(0.0) - 1.0).abs() > 1e-10 {
            return Err(Error::Breakdown(format!("{self}: φ̂(0) ≠ 1")));
        }
        let a = self.alpha();
        let m = self.integrate_weighted(|x| x.abs().powf(a))?;
        if !m.is_finite() {
            return Err(Error::Divergent(format!("{self}: moment of order {a}")));
        }
        Ok(())
    }

    /// `∫ φ·w` for an even weight `w`, folded onto `[0, 1]` twice
    /// (`x` and `1/x`) so heavy tails stay integrable.
    fn integrate_weighted(&self, w: impl Fn(f64) -> f64) -> Result<f64> {
        let f = |x: f64| self.density(x) * w(x);
        let inner = quad::adaptive(f, 0.0, 1.0, 1e-15, 1e-13)?.value;
        let outer = quad::adaptive(
            |s: f64| if s == 0.0 { 0.0 } else { f(1.0 / s) / (s * s) },
            0.0,
            1.0,
            1e-15,
            1e-13,
        )?
        .value;
        Ok(2.0 * (inner + outer))
    }
}

fn bump_cdf(x: f64) -> f64 {
    if x <= -1.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    // Cubic Hermite interpolation with the density as derivative.
    let t = &*BUMP;
    let s = (x + 1.0) / t.dx;
    let i = (s.floor() as usize).min(t.cdf.len() - 2);
    let r = s - i as f64;
    let x0 = -1.0 + i as f64 * t.dx;
    let (y0, y1) = (t.cdf[i], t.cdf[i + 1]);
    let (d0, d1) = (
        t.norm * bump_raw(x0) * t.dx,
        t.norm * bump_raw(x0 + t.dx) * t.dx,
    );
    let r2 = r * r;
    let r3 = r2 * r;
    (2.0 * r3 - 3.0 * r2 + 1.0) * y0
        + (r3 - 2.0 * r2 + r) * d0
        + (-2.0 * r3 + 3.0 * r2) * y1
        + (r3 - r2) * d1
}

fn bump_hat(k: f64) -> f64 {
    // Six-point Lagrange interpolation in the tabulated transform, using
    // evenness to reach across κ = 0.
    let t = &*BUMP;
    let s = k / t.dk;
    let i = s.floor() as i64;
    if i + 3 >= t.hat.len() as i64 {
        return 0.0;
    }
    let r = s - i as f64;
    let mut sum = 0.0;
    for a in -2..=3i64 {
        let mut l = 1.0;
        for b in -2..=3i64 {
            if b != a {
                l *= (r - b as f64) / (a - b) as f64;
            }
        }
        sum += l * t.hat[(i + a).unsigned_abs() as usize];
    }
    sum
}

/// Pattern length of the indicator `χ_u = π·1_{|x−u|≤ℓ/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub ell: f64,
}

impl Default for KernelParams {
    fn default() -> Self {
        Self { ell: 1.0 }
    }
}

impl KernelParams {
    pub fn new(ell: f64) -> Result<Self> {
        if !(ell > 0.0) || !ell.is_finite() {
            return Err(Error::invalid(format!("ℓ must be positive, got {ell}")));
        }
        Ok(Self { ell })
    }
}

/// `Q(x) = −log|x| + ½ log|ℓ² − x²|`. Poles at 0 (+∞) and ±ℓ (−∞).
pub fn q_kernel(x: f64, p: KernelParams) -> Result<f64> {
    if x == 0.0 {
        return Err(Error::domain("Q has a pole (+∞) at 0"));
    }
    let d = p.ell * p.ell - x * x;
    if d == 0.0 {
        return Err(Error::domain("Q has a pole (−∞) at ±ℓ"));
    }
    Ok(-x.abs().ln() + 0.5 * d.abs().ln())
}

/// `Q_ε(x) = −log(ε/2π ∨ |x|) + log(ε/2π ∨ √|ℓ² − x²|)`.
pub fn q_eps(x: f64, eps: f64, p: KernelParams) -> f64 {
    let c = eps / (2.0 * PI);
    -(c.max(x.abs())).ln() + c.max((p.ell * p.ell - x * x).abs().sqrt()).ln()
}

/// Spectral density `Q̂(κ) = sin²(πℓκ)/|κ|`, extended by 0 at κ = 0.
pub fn q_hat(kappa: f64, p: KernelParams) -> f64 {
    if kappa == 0.0 {
        return 0.0;
    }
    (PI * p.ell * kappa).sin().powi(2) / kappa.abs()
}

/// `(χ_u ⋆ φ_ε)(x)` with `φ_ε = φ(·/ε)/ε`.
pub fn smoothed_indicator(x: f64, u: f64, eps: f64, phi: Mollifier, p: KernelParams) -> f64 {
    let a = (x - u + 0.5 * p.ell) / eps;
    let b = (x - u - 0.5 * p.ell) / eps;
    // difference of CDFs, taken on the side that avoids cancellation
    let v = if b > 0.0 {
        phi.cdf(-b) - phi.cdf(-a)
    } else {
        phi.cdf(a) - phi.cdf(b)
    };
    PI * v
}

/// Fourier transform of `χ_u ⋆ φ_ε`: `e^{−2πiuκ} sin(πℓκ)/κ · φ̂(εκ)`.
pub fn smoothed_indicator_hat(
    kappa: f64,
    u: f64,
    eps: f64,
    phi: Mollifier,
    p: KernelParams,
) -> Complex64 {
    let amp = if kappa == 0.0 {
        PI * p.ell
    } else {
        (PI * p.ell * kappa).sin() / kappa
    };
    Complex64::from_polar(amp * phi.fourier(eps * kappa), -2.0 * PI * u * kappa)
}

/// `ℰ_Φ(ω) = ∫₀^∞ (1 − cos ωx)(Φ(x) − 1_{x≤1})/x dx`.
///
/// `cutoff` is a point past which Φ is negligible; a non-negligible
/// `Φ(cutoff)` is reported as an unresolved (possibly divergent) tail.
pub fn cin_error_term(omega: f64, phi: impl Fn(f64) -> f64, cutoff: f64) -> Result<Estimate> {
    if omega == 0.0 {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
        });
    }
    let x_max = cutoff.max(1.0);
    let tail = phi(x_max).abs();
    if tail > 1e-10 {
        return Err(Error::Truncation {
            what: "frequency profile at cutoff",
            value: tail,
            tol: 1e-10,
        });
    }
    let omega = omega.abs();
    let g = |x: f64| {
        if x <= 1.0 {
            (phi(x) - 1.0) / x
        } else {
            phi(x) / x
        }
    };
    let plain0 = quad::adaptive(g, 0.0, 1.0, 1e-15, 1e-13)?;
    let plain1 = quad::adaptive(g, 1.0, x_max, 1e-15, 1e-13)?;
    let panel = (PI / omega).min(0.25);
    let osc = |h: f64| {
        quad::panels(|x| (omega * x).cos() * g(x), 0.0, 1.0, h)
            + quad::panels(|x| (omega * x).cos() * g(x), 1.0, x_max, h)
    };
    let fine = osc(panel);
    let coarse = osc(2.0 * panel);
    Ok(Estimate {
        value: plain0.value + plain1.value - fine,
        error: plain0.error + plain1.error + (fine - coarse).abs(),
    })
}

/// Exact regularized covariance
/// `T_{ε,δ}(u,v) = ∫ e^{−2πi(u−v)κ} φ̂(εκ) ψ̂(δκ) Q̂(κ) dκ`.
///
/// Evaluated through the Cin decomposition: with `I(ω) = ∫₀^∞ (1 − cos ωκ) P(κ)/κ dκ`
/// and `P = φ̂(ε·)ψ̂(δ·)`, `T = −I(2πd) + ½I(2π(d+ℓ)) + ½I(2π(d−ℓ))`, and
/// `I(ω) = Cin(ω/σ) + ℰ_Φ(ω/σ)` after rescaling by `σ = ε ∨ δ`.
#[allow(clippy::too_many_arguments)]
pub fn t_exact(
    u: f64,
    v: f64,
    eps: f64,
    delta: f64,
    phi: Mollifier,
    psi: Mollifier,
    p: KernelParams,
) -> Result<Estimate> {
    if !(eps > 0.0 && delta > 0.0) {
        return Err(Error::invalid("regularization scales must be positive"));
    }
    let sigma = eps.max(delta);
    let profile = |x: f64| phi.fourier(eps * x / sigma) * psi.fourier(delta * x / sigma);
    let cutoff =
        (phi.fourier_cutoff(1e-16) * sigma / eps).min(psi.fourier_cutoff(1e-16) * sigma / delta);
    let i = |omega: f64| -> Result<Estimate> {
        let w = omega / sigma;
        let e = cin_error_term(w, profile, cutoff)?;
        Ok(Estimate {
            value: cin(w) + e.value,
            error: e.error,
        })
    };
    let d = u - v;
    let a = i(2.0 * PI * d)?;
    let b = i(2.0 * PI * (d + p.ell))?;
    let c = i(2.0 * PI * (d - p.ell))?;
    Ok(Estimate {
        value: -a.value + 0.5 * (b.value + c.value),
        error: a.error + 0.5 * (b.error + c.error),
    })
}

/// Brute-force quadrature of the defining spectral integral; the
/// cross-check oracle for [`t_exact`].
#[allow(clippy::too_many_arguments)]
pub fn t_brute_force(
    u: f64,
    v: f64,
    eps: f64,
    delta: f64,
    phi: Mollifier,
    psi: Mollifier,
    p: KernelParams,
) -> Result<Estimate> {
    let d = u - v;
    let kmax = (phi.fourier_cutoff(1e-17) / eps).min(psi.fourier_cutoff(1e-17) / delta);
    let f = |k: f64| {
        2.0 * (2.0 * PI * d * k).cos() * phi.fourier(eps * k) * psi.fourier(delta * k) * q_hat(k, p)
    };
    // break the range at every half period of the fastest oscillation
    let freq = (d.abs() + p.ell).max(p.ell);
    let n = ((2.0 * freq * kmax).ceil() as usize).clamp(1, 1_000_000);
    let points: Vec<f64> = (0..=n).map(|i| kmax * i as f64 / n as f64).collect();
    quad::adaptive_breaks(f, &points, 1e-13, 1e-12)
}

/// A weighted sum of smoothed indicators, `h(x) = Σ_k t_k (χ_{u_k} ⋆ φ_{ε_k})(x)`:
/// the test function behind every counting statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearStatistic {
    pub centers: Vec<f64>,
    pub weights: Vec<f64>,
    pub scales: Vec<f64>,
    pub mollifier: Mollifier,
    pub params: KernelParams,
}

impl LinearStatistic {
    pub fn new(
        centers: Vec<f64>,
        weights: Vec<f64>,
        scales: Vec<f64>,
        mollifier: Mollifier,
        params: KernelParams,
    ) -> Result<Self> {
        if centers.is_empty() || centers.len() != weights.len() || centers.len() != scales.len() {
            return Err(Error::invalid(
                "centers, weights and scales must be nonempty and of equal length",
            ));
        }
        if scales.iter().any(|&e| !(e > 0.0)) {
            return Err(Error::invalid("scales must be positive"));
        }
        Ok(Self {
            centers,
            weights,
            scales,
            mollifier,
            params,
        })
    }

    /// One smoothed indicator with weight `t`.
    pub fn single(u: f64, t: f64, eps: f64, mollifier: Mollifier, params: KernelParams) -> Self {
        Self {
            centers: vec![u],
            weights: vec![t],
            scales: vec![eps],
            mollifier,
            params,
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut s = self.clone();
        s.weights.iter_mut().for_each(|t| *t *= c);
        s
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.terms()
            .map(|(u, t, e)| t * smoothed_indicator(x, u, e, self.mollifier, self.params))
            .sum()
    }

    pub fn fourier(&self, kappa: f64) -> Complex64 {
        self.terms()
            .map(|(u, t, e)| t * smoothed_indicator_hat(kappa, u, e, self.mollifier, self.params))
            .sum()
    }

    /// `∫ h = πℓ Σ t_k`.
    pub fn integral(&self) -> f64 {
        PI * self.params.ell * self.weights.iter().sum::<f64>()
    }

    pub fn min_scale(&self) -> f64 {
        self.scales.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// An interval outside which `|h|` is below `tol` (relative to `Σ|t|`).
    pub fn support(&self, tol: f64) -> (f64, f64) {
        let r = self.mollifier.tail_radius(tol);
        let lo = self
            .terms()
            .map(|(u, _, e)| u - 0.5 * self.params.ell - r * e)
            .fold(f64::INFINITY, f64::min);
        let hi = self
            .terms()
            .map(|(u, _, e)| u + 0.5 * self.params.ell + r * e)
            .fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }

    /// A frequency past which `|ĥ|` is below `tol·Σ|t|`.
    pub fn fourier_cutoff(&self, tol: f64) -> f64 {
        self.mollifier.fourier_cutoff(tol) / self.min_scale()
    }

    /// `½ Σ_{j,k} t_j t_k T_{ε_j,ε_k}(u_j,u_k)`, the Gaussian prediction for
    /// the centered log-Laplace transform.
    pub fn gaussian_prediction(&self) -> Result<Estimate> {
        let terms: Vec<_> = self.terms().collect();
        let mut out = Estimate {
            value: 0.0,
            error: 0.0,
        };
        for (j, &(uj, tj, ej)) in terms.iter().enumerate() {
            for (k, &(uk, tk, ek)) in terms.iter().enumerate().skip(j) {
                let t = t_exact(uj, uk, ej, ek, self.mollifier, self.mollifier, self.params)?;
                let mult = if j == k { 0.5 } else { 1.0 };
                out.value += mult * tj * tk * t.value;
                out.error += mult * (tj * tk).abs() * t.error;
            }
        }
        Ok(out)
    }

    fn terms(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.centers
            .iter()
            .zip(&self.weights)
            .zip(&self.scales)
            .map(|((&u, &t), &e)| (u, t, e))
    }
}

/// Outcome of the lattice checks on `T_{ε,δ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeReport {
    /// Fitted constant in `T ≤ log⁺ min(|u−v|⁻¹, ε⁻¹, δ⁻¹) + C` on the
    /// coarse scales only.
    pub domination_constant_coarse: f64,
    /// The same constant fitted on all scales.
    pub domination_constant: f64,
    /// Per ε: the largest off-diagonal `|T − Q|` at ε and at ε/2 over
    /// lattice separations `|u−v| ≥ 10ε` kept `10ε` away from `±ℓ`.
    pub off_diagonal: Vec<OffDiagonal>,
    /// `max − min` of `T_{ε,δ}(u,v) − log δ⁻¹` over `|u−v| ≤ e^{−1/δ}`, `δ ≥ ε`.
    pub near_diagonal_band: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffDiagonal {
    pub eps: f64,
    pub discrepancy: f64,
    pub discrepancy_half: f64,
}

/// Runs the covariance lattice suite for one mollifier.
pub fn lattice_suite(
    phi: Mollifier,
    p: KernelParams,
    scales: &[f64],
    lattice: &[f64],
) -> Result<LatticeReport> {
    let mut c_all = f64::NEG_INFINITY;
    let mut c_coarse = f64::NEG_INFINITY;
    if scales.is_empty() || lattice.is_empty() {
        return Err(Error::invalid(
            "lattice suite needs scales and lattice points",
        ));
    }
    let smallest = scales.iter().cloned().fold(f64::INFINITY, f64::min);
    let diffs: Vec<f64> = {
        let mut d: Vec<f64> = lattice
            .iter()
            .flat_map(|&u| lattice.iter().map(move |&v| u - v))
            .collect();
        d.sort_by(f64::total_cmp);
        d.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        d
    };
    for &e in scales {
        for &dl in scales {
            for &d in &diffs {
                let t = t_exact(d, 0.0, e, dl, phi, phi, p)?.value;
                let bound = (1.0 / d.abs()).min(1.0 / e).min(1.0 / dl).ln().max(0.0);
                let c = t - bound;
                c_all = c_all.max(c);
                if e > smallest && dl > smallest {
                    c_coarse = c_coarse.max(c);
                }
            }
        }
    }
    let mut off_diagonal = Vec::new();
    for &e in scales {
        let sep = 10.0 * e;
        let mut worst = (0.0f64, 0.0f64);
        for &d in diffs
            .iter()
            .filter(|d| d.abs() >= sep && (d.abs() - p.ell).abs() >= sep)
        {
            let q = q_kernel(d, p)?;
            let a = t_exact(d, 0.0, e, e, phi, phi, p)?.value;
            let b = t_exact(d, 0.0, 0.5 * e, 0.5 * e, phi, phi, p)?.value;
            worst.0 = worst.0.max((a - q).abs());
            worst.1 = worst.1.max((b - q).abs());
        }
        off_diagonal.push(OffDiagonal {
            eps: e,
            discrepancy: worst.0,
            discrepancy_half: worst.1,
        });
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &e in scales {
        for &dl in scales.iter().filter(|&&dl| dl >= e) {
            let r = (-1.0 / dl).exp();
            for d in [0.0, 0.5 * r, r] {
                let t = t_exact(d, 0.0, e, dl, phi, phi, p)?.value + dl.ln();
                lo = lo.min(t);
                hi = hi.max(t);
            }
        }
    }
    Ok(LatticeReport {
        domination_constant_coarse: c_coarse,
        domination_constant: c_all,
        off_diagonal,
        near_diagonal_band: hi - lo,
    })
}
