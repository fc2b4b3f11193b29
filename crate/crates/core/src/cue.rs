//! Circular unitary ensemble: Haar sampling, mesoscopic smoothed counting
//! statistics, exact Laplace transforms as Toeplitz determinants, the
//! Borodin–Okounkov identity, and the chaos measure built on the
//! centered counting field.
//!
//! A statistic is `X = Σ_j h^{(2π)}(θ_j)` where `h` lives on the mesoscopic
//! scale `x = N^α θ` and `h^{(2π)}(θ) = Σ_a h(N^α(θ + 2πa))` is its
//! periodization. Its Fourier coefficients are
//! `L̂_k = ĥ(k/(2πN^α)) / (2πN^α)`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::covariance::{KernelParams, LinearStatistic, Mollifier};
use crate::error::{Error, Result};
use crate::quad::{legendre_nodes, Estimate};
use crate::rng::trial_rng;
use crate::transforms::SampledFunction;

const MAX_SAMPLER_RETRIES: usize = 8;

/// Eigenangles of one Haar unitary, each in `[0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenangleSample {
    pub n: usize,
    pub angles: Vec<f64>,
    pub seed: u64,
    pub trial: u64,
    pub sampler: &'static str,
}

/// Haar unitary from a complex Ginibre matrix: QR, then rescale the columns
/// of Q by the phases of R's diagonal so the law is exactly Haar.
pub fn haar_unitary(n: usize, rng: &mut impl rand::Rng) -> Result<DMatrix<Complex64>> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let z = DMatrix::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(s * re, s * im)
    });
    let qr = z.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        let d = r[(j, j)];
        if d.norm() < 1e-300 {
            return Err(Error::Breakdown("singular Ginibre draw".into()));
        }
        let phase = d / d.norm();
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    Ok(q)
}

/// Draw `trial` for master seed `seed`.
pub fn sample_cue(n: usize, seed: u64, trial: u64) -> Result<EigenangleSample> {
    if n == 0 {
        return Err(Error::invalid("N must be at least 1"));
    }
    let mut rng = trial_rng(seed, trial);
    for _ in 0..MAX_SAMPLER_RETRIES {
        let Ok(u) = haar_unitary(n, &mut rng) else {
            continue;
        };
        let Some(eig) = u.schur().eigenvalues() else {
            continue;
        };
        let angles = eig
            .iter()
            .map(|z| z.arg().rem_euclid(2.0 * PI))
            .map(|a| if a >= 2.0 * PI { 0.0 } else { a })
            .collect();
        return Ok(EigenangleSample {
            n,
            angles,
            seed,
            trial,
            sampler: "ginibre_qr",
        });
    }
    Err(Error::Breakdown(format!(
        "CUE sampler failed {MAX_SAMPLER_RETRIES} times"
    )))
}

/// Fourier coefficients `L̂_k` of a log-symbol, `k = −M..=M`.
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzSymbol {
    /// `L̂_k` for `k = 0..=M`.
    pub pos: Vec<Complex64>,
    /// `L̂_{−k}` for `k = 0..=M` (entry 0 repeats `L̂_0`).
    pub neg: Vec<Complex64>,
}

impl ToeplitzSymbol {
    pub fn new(pos: Vec<Complex64>, neg: Vec<Complex64>) -> Result<Self> {
        if pos.is_empty() || pos.len() != neg.len() || pos[0] != neg[0] {
            return Err(Error::invalid(
                "symbol needs equal-length coefficient arrays sharing L̂₀",
            ));
        }
        Ok(Self { pos, neg })
    }

    /// The real symbol with `L̂_{−k} = conj(L̂_k)`.
    pub fn real(pos: Vec<Complex64>) -> Result<Self> {
        let mut pos = pos;
        if pos.is_empty() {
            return Err(Error::invalid("empty symbol"));
        }
        pos[0] = Complex64::new(pos[0].re, 0.0);
        let neg = pos.iter().map(|c| c.conj()).collect();
        Ok(Self { pos, neg })
    }

    pub fn zero() -> Self {
        Self::real(vec![Complex64::new(0.0, 0.0)]).expect("nonempty")
    }

    pub fn bandwidth(&self) -> usize {
        self.pos.len() - 1
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        let i = k.unsigned_abs() as usize;
        let v = if k >= 0 { &self.pos } else { &self.neg };
        v.get(i).copied().unwrap_or_default()
    }

    pub fn is_real(&self) -> bool {
        self.pos
            .iter()
            .zip(&self.neg)
            .all(|(p, n)| (p - n.conj()).norm() <= 1e-15 * (1.0 + p.norm()))
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self {
            pos: self.pos.iter().map(|c| c * t).collect(),
            neg: self.neg.iter().map(|c| c * t).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let m = self.pos.len().max(other.pos.len());
        let get = |v: &[Complex64], i: usize| v.get(i).copied().unwrap_or_default();
        Self {
            pos: (0..m)
                .map(|i| get(&self.pos, i) + get(&other.pos, i))
                .collect(),
            neg: (0..m)
                .map(|i| get(&self.neg, i) + get(&other.neg, i))
                .collect(),
        }
    }

    /// `log w(θ) = Σ_k L̂_k e^{ikθ}`.
    pub fn eval(&self, theta: f64) -> Complex64 {
        let mut s = self.pos[0];
        for k in 1..self.pos.len() {
            let e = Complex64::from_polar(1.0, k as f64 * theta);
            s += self.pos[k] * e + self.neg[k] * e.conj();
        }
        s
    }

    /// `Σ_{k≥1} k L̂_k L̂_{−k}`, the strong Szegő constant.
    pub fn szego_sum(&self) -> Complex64 {
        (1..self.pos.len())
            .map(|k| k as f64 * self.pos[k] * self.neg[k])
            .sum()
    }

    /// `Σ_{k>M} k |L̂_k|²` over the stored band's last quarter: a cheap
    /// witness that the band captures the `Σ k|L̂_k|² < ∞` mass.
    pub fn tail_witness(&self) -> f64 {
        let m = self.bandwidth();
        (3 * m / 4 + 1..=m)
            .map(|k| k as f64 * (self.pos[k].norm_sqr() + self.neg[k].norm_sqr()))
            .sum()
    }

    /// Exact mean `N L̂₀` of `Σ_j log w(θ_j)` under the CUE.
    pub fn mean(&self, n: usize) -> f64 {
        n as f64 * self.pos[0].re
    }

    /// Exact CUE variance `2 Σ_{k≥1} min(k, N) |L̂_k|²` (real symbols).
    pub fn variance(&self, n: usize) -> f64 {
        (1..self.pos.len())
            .map(|k| 2.0 * k.min(n) as f64 * (self.pos[k] * self.neg[k]).re)
            .sum()
    }

    /// Values of `f(log w)` on `p` equispaced angles, transformed back to
    /// Fourier coefficients (`out[k mod p]`).
    fn transformed_coeffs(&self, p: usize, f: impl Fn(Complex64) -> Complex64) -> Vec<Complex64> {
        let mut buf = vec![Complex64::new(0.0, 0.0); p];
        let m = self.bandwidth().min(p / 2 - 1);
        buf[0] = self.pos[0];
        for k in 1..=m {
            buf[k] = self.pos[k];
            buf[p - k] = self.neg[k];
        }
        let mut planner = FftPlanner::new();
        planner.plan_fft_inverse(p).process(&mut buf);
        buf.iter_mut().for_each(|v| *v = f(*v));
        planner.plan_fft_forward(p).process(&mut buf);
        let scale = 1.0 / p as f64;
        buf.iter_mut().for_each(|v| *v *= scale);
        buf
    }

    fn grid_len(&self, n: usize) -> usize {
        (4 * n.max(self.bandwidth()) + 256).next_power_of_two()
    }
}

/// A counting statistic on the mesoscopic scale `N^{−α}` around angle 0.
#[derive(Debug, Clone, PartialEq)]
pub struct MesoscopicStatistic {
    pub n: usize,
    pub alpha: f64,
    /// `h = Σ t_k χ_{u_k} ⋆ φ_{ε_k}` in mesoscopic coordinates.
    pub stat: LinearStatistic,
    pub gamma: f64,
    /// Periodization is truncated to `|a| ≤ periods`.
    pub periods: usize,
}

impl MesoscopicStatistic {
    pub fn new(n: usize, alpha: f64, stat: LinearStatistic, gamma: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("N must be at least 1"));
        }
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::invalid(format!("α = {alpha} outside (0, 1)")));
        }
        let s = Self {
            n,
            alpha,
            stat,
            gamma,
            periods: 2,
        };
        let (lo, hi) = s.stat.support(1e-16);
        if hi - lo >= 2.0 * PI * s.scale() {
            return Err(Error::invalid(
                "statistic support wider than one period: window not mesoscopic",
            ));
        }
        Ok(s)
    }

    /// `N^α`.
    pub fn scale(&self) -> f64 {
        (self.n as f64).powf(self.alpha)
    }

    /// `N^{α−1}/min ε`; small values mean the smoothing scale holds many
    /// eigenvalues.
    pub fn smoothing_ratio(&self) -> f64 {
        (self.n as f64).powf(self.alpha - 1.0) / self.stat.min_scale()
    }

    /// `ℓ N^{−α}`: the window's share of the circle.
    pub fn window_ratio(&self) -> f64 {
        self.stat.params.ell / self.scale()
    }

    /// The same statistic with centers shifted by `d`.
    pub fn shifted(&self, d: f64) -> Self {
        let mut s = self.clone();
        s.stat.centers.iter_mut().for_each(|u| *u += d);
        s
    }

    pub fn with_stat(&self, stat: LinearStatistic) -> Self {
        let mut s = self.clone();
        s.stat = stat;
        s
    }

    /// `h^{(2π)}(θ)` truncated to `|a| ≤ periods`.
    pub fn eval_periodized(&self, theta: f64) -> f64 {
        let s = self.scale();
        let a = self.periods as i64;
        let th = (theta + PI).rem_euclid(2.0 * PI) - PI;
        (-a..=a)
            .map(|k| self.stat.eval(s * (th + 2.0 * PI * k as f64)))
            .sum()
    }

    /// Bound on `sup_θ Σ_{|a|>A} |h(N^α(θ + 2πa))|` for `θ ∈ [−π, π)`.
    pub fn truncation_bound(&self) -> f64 {
        let s = self.scale();
        let m = self.stat.mollifier;
        let half = 0.5 * self.stat.params.ell;
        let mut total = 0.0;
        for ((&u, &t), &e) in self
            .stat
            .centers
            .iter()
            .zip(&self.stat.weights)
            .zip(&self.stat.scales)
        {
            for a in (self.periods + 1)..(self.periods + 10_000) {
                let dist = s * PI * (2 * a - 1) as f64 - u.abs() - half;
                if dist <= 0.0 {
                    return f64::INFINITY;
                }
                // two images (±a), each a tail of the mollifier
                let term = 2.0 * PI * t.abs() * m.cdf(-dist / e);
                total += term;
                if term < 1e-300 || term < 1e-18 * total {
                    break;
                }
            }
        }
        total
    }

    /// `L̂_k = ĥ(k/(2πN^α))/(2πN^α)` for `|k| ≤ M`, with `M` chosen so
    /// `|ĥ|` is below `1e−17·Σ|t|` past the band.
    pub fn symbol_coeffs(&self) -> Result<ToeplitzSymbol> {
        let c = 2.0 * PI * self.scale();
        let m = (c * self.stat.fourier_cutoff(1e-17)).ceil() as usize + 1;
        if m > 1 << 22 {
            return Err(Error::Truncation {
                what: "symbol bandwidth",
                value: m as f64,
                tol: (1u64 << 22) as f64,
            });
        }
        let pos = (0..=m)
            .map(|k| self.stat.fourier(k as f64 / c) / c)
            .collect();
        ToeplitzSymbol::real(pos)
    }

    /// `½ Σ t_j t_k T_{ε_j,ε_k}(u_j, u_k)`.
    pub fn gaussian_prediction(&self) -> Result<Estimate> {
        self.stat.gaussian_prediction()
    }
}

/// `X = Σ_j h^{(2π)}(θ_j)`, with the periodization truncation bound (times
/// N) as the error.
pub fn smoothed_statistic(sample: &EigenangleSample, stat: &MesoscopicStatistic) -> Estimate {
    Estimate {
        value: sample.angles.iter().map(|&t| stat.eval_periodized(t)).sum(),
        error: sample.n as f64 * stat.truncation_bound(),
    }
}

fn lu_log_det(m: DMatrix<Complex64>) -> Result<Complex64> {
    let n = m.nrows();
    let lu = m.lu();
    let u = lu.u();
    let mut acc = Complex64::new(0.0, 0.0);
    let mut min_pivot = f64::INFINITY;
    let mut max_pivot: f64 = 0.0;
    for i in 0..n {
        let d = u[(i, i)];
        min_pivot = min_pivot.min(d.norm());
        max_pivot = max_pivot.max(d.norm());
        if d.norm() == 0.0 {
            return Err(Error::Breakdown("singular matrix".into()));
        }
        acc += d.ln();
    }
    if lu.p().determinant::<f64>() < 0.0 {
        acc += Complex64::new(0.0, PI);
    }
    acc.im = PI - (PI - acc.im).rem_euclid(2.0 * PI);
    if max_pivot > 1e15 * min_pivot {
        return Err(Error::Breakdown(format!(
            "ill-conditioned determinant: pivot ratio {:e}",
            max_pivot / min_pivot
        )));
    }
    Ok(acc)
}

/// Fourier coefficients `ŵ_k` of `w = exp(log w)` for `|k| < n`.
pub fn symbol_exp_coeffs(n: usize, symbol: &ToeplitzSymbol) -> Result<Vec<Complex64>> {
    let p = symbol.grid_len(n);
    let w = symbol.transformed_coeffs(p, |z| z.exp());
    // aliasing witness: coefficients near p/2 should be negligible
    let peak = w.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if w[p / 2].norm() > 1e-14 * peak {
        return Err(Error::Truncation {
            what: "symbol Fourier grid",
            value: w[p / 2].norm() / peak,
            tol: 1e-14,
        });
    }
    let mut out = vec![Complex64::new(0.0, 0.0); 2 * n - 1];
    for k in -(n as i64 - 1)..=(n as i64 - 1) {
        out[(k + n as i64 - 1) as usize] = w[k.rem_euclid(p as i64) as usize];
    }
    Ok(out)
}

/// Complex `log det T_N(w)` with `T_N(w)_{jk} = ŵ_{j−k}`.
pub fn toeplitz_log_det(n: usize, symbol: &ToeplitzSymbol) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::invalid("N must be at least 1"));
    }
    let w = symbol_exp_coeffs(n, symbol)?;
    let off = n as i64 - 1;
    let m = DMatrix::from_fn(n, n, |j, k| w[(j as i64 - k as i64 + off) as usize]);
    lu_log_det(m)
}

/// `log det` of the Hermitian Toeplitz matrix with first column `r` by the
/// Levinson recursion: the determinant is the product of the prediction
/// error variances. `None` if a reflection coefficient reaches the unit
/// circle (matrix not positive definite to working precision).
pub fn levinson_log_det(r: &[Complex64]) -> Option<f64> {
    let n = r.len();
    let mut e = r.first()?.re;
    if !(e > 0.0) {
        return None;
    }
    let mut total = e.ln();
    let mut a = vec![Complex64::new(1.0, 0.0)];
    for m in 1..n {
        let acc: Complex64 = (0..m).map(|i| a[i] * r[m - i]).sum();
        let k = -acc / e;
        let shrink = 1.0 - k.norm_sqr();
        if !(shrink > 1e-14) {
            return None;
        }
        a.push(Complex64::new(0.0, 0.0));
        let old = a.clone();
        for i in 1..=m {
            a[i] = old[i] + k * old[m - i].conj();
        }
        e *= shrink;
        total += e.ln();
    }
    Some(total)
}

/// `log E_CUE[exp Σ_j log w(θ_j)] = log det T_N(w)` for a real symbol.
///
/// `T_N(w)` is Hermitian positive definite, so the O(N²) Levinson path is
/// tried first; dense LU is the fallback.
pub fn toeplitz_laplace(n: usize, symbol: &ToeplitzSymbol) -> Result<f64> {
    if !symbol.is_real() {
        return Err(Error::invalid("Laplace transform needs a real symbol"));
    }
    if n == 0 {
        return Err(Error::invalid("N must be at least 1"));
    }
    let w = symbol_exp_coeffs(n, symbol)?;
    if let Some(v) = levinson_log_det(&w[n - 1..]) {
        return Ok(v);
    }
    let v = toeplitz_log_det(n, symbol)?;
    if v.im.abs() > 1e-8 {
        return Err(Error::Breakdown(format!(
            "non-positive Toeplitz determinant (phase {})",
            v.im
        )));
    }
    Ok(v.re)
}

/// Coefficients of `b = a₋/a₊` and `c = a₊/a₋` where `a_± = exp(Σ_{±k>0} L̂_k z^k)`,
/// on a grid of length `p`.
fn wiener_hopf_factors(symbol: &ToeplitzSymbol, p: usize) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut anti = symbol.clone();
    anti.pos[0] = Complex64::new(0.0, 0.0);
    anti.neg[0] = Complex64::new(0.0, 0.0);
    // log c = L₊ − L₋
    anti.neg.iter_mut().for_each(|v| *v = -*v);
    let c = anti.transformed_coeffs(p, |z| z.exp());
    let b = anti.transformed_coeffs(p, |z| (-z).exp());
    (b, c)
}

/// Right-hand side of the Borodin–Okounkov identity, split into its parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoRhs {
    /// `N L̂₀ + Σ k L̂_k L̂_{−k} + log det(I − K)`.
    pub log_value: Complex64,
    /// `log det(I − Q_N H(b) H(c̃) Q_N)`.
    pub hankel_log_det: Complex64,
    /// Size of the truncated Hankel block.
    pub m_hank: usize,
}

/// `log[exp(N L̂₀ + Σ k L̂_k L̂_{−k}) · det(I − Q_N H(b) H(c̃) Q_N)]`.
pub fn bo_rhs(n: usize, symbol: &ToeplitzSymbol) -> Result<BoRhs> {
    let p = symbol.grid_len(n + symbol.bandwidth());
    let (b, c) = wiener_hopf_factors(symbol, p);
    let peak = b.iter().chain(&c).map(|z| z.norm()).fold(0.0, f64::max);
    let half = p / 2;
    let bk = |k: usize| if k < half { b[k] } else { Complex64::default() };
    let cmk = |k: usize| {
        if k < half {
            c[(p - k) % p]
        } else {
            Complex64::default()
        }
    };
    if b[half].norm().max(c[half].norm()) > 1e-14 * peak {
        return Err(Error::Truncation {
            what: "Wiener–Hopf grid",
            value: b[half].norm().max(c[half].norm()) / peak,
            tol: 1e-14,
        });
    }
    // last index where either factor rises above FFT roundoff
    let last = (1..half)
        .rev()
        .find(|&k| bk(k).norm().max(cmk(k).norm()) > 1e-14 * peak)
        .unwrap_or(0);
    let m = last.saturating_sub(n);
    let hankel_log_det = if m == 0 {
        Complex64::new(0.0, 0.0)
    } else {
        // K_{jk} = Σ_i b_{N+j+i+1} c_{−(N+k+i+1)}
        let hb = DMatrix::from_fn(m, m, |j, i| bk(n + j + i + 1));
        let hc = DMatrix::from_fn(m, m, |i, k| cmk(n + k + i + 1));
        let id = DMatrix::<Complex64>::identity(m, m);
        lu_log_det(id - hb * hc)?
    };
    let log_value = n as f64 * symbol.pos[0] + symbol.szego_sum() + hankel_log_det;
    Ok(BoRhs {
        log_value,
        hankel_log_det,
        m_hank: m,
    })
}

/// `‖H(c̃) Q_N‖²_HS = Σ_{k≥1} k |c_{−(k+N)}|²`.
pub fn hs_tail(symbol: &ToeplitzSymbol, n: usize) -> f64 {
    let p = symbol.grid_len(n + symbol.bandwidth());
    let (_, c) = wiener_hopf_factors(symbol, p);
    (1..p / 2 - n)
        .map(|k| k as f64 * c[p - (k + n)].norm_sqr())
        .sum()
}

/// Per-sample chaos densities `exp(γ(X(u) − EX) − (γ²/2) Var X)` on the
/// grid `u_grid.start + i·step`. `stat` is a single-point statistic
/// centered at 0 with weight 1; the mean and variance are the exact
/// finite-N values, which do not depend on `u`.
pub fn cue_chaos_measure(
    samples: &[EigenangleSample],
    stat: &MesoscopicStatistic,
    start: f64,
    step: f64,
    count: usize,
) -> Result<Vec<SampledFunction>> {
    let gamma = stat.gamma;
    let sym = stat.symbol_coeffs()?;
    let mean = sym.mean(stat.n);
    let var = sym.variance(stat.n);
    let shifted: Vec<_> = (0..count)
        .map(|i| stat.shifted(start + i as f64 * step))
        .collect();
    samples
        .par_iter()
        .map(|s| {
            if s.n != stat.n {
                return Err(Error::invalid("sample size does not match statistic"));
            }
            let vals = shifted
                .iter()
                .map(|st| {
                    let x = smoothed_statistic(s, st).value;
                    (gamma * (x - mean) - 0.5 * gamma * gamma * var).exp()
                })
                .collect();
            SampledFunction::from_real(start, step, vals)
        })
        .collect()
}

/// Single-point statistic `χ_u ⋆ φ_ε` at `u = 0` with unit weight.
pub fn point_statistic(
    n: usize,
    alpha: f64,
    eps: f64,
    gamma: f64,
    mollifier: Mollifier,
    params: KernelParams,
) -> Result<MesoscopicStatistic> {
    let stat = LinearStatistic::new(vec![0.0], vec![1.0], vec![eps], mollifier, params)?;
    MesoscopicStatistic::new(n, alpha, stat, gamma)
}

/// `E[e^{γX̃(0) + γX̃(d)}]` from one Toeplitz determinant, with `X̃` the
/// exactly centered and variance-normalized field.
pub fn two_point_exponential_moment(
    base: &ToeplitzSymbol,
    stat: &MesoscopicStatistic,
    d: f64,
) -> Result<f64> {
    let g = stat.gamma;
    let other = stat.shifted(d).symbol_coeffs()?;
    let joint = base.add(&other).scaled(g);
    let log_lap = toeplitz_laplace(stat.n, &joint)?;
    let centering = g * (base.mean(stat.n) + other.mean(stat.n))
        + 0.5 * g * g * (base.variance(stat.n) + other.variance(stat.n));
    Ok((log_lap - centering).exp())
}

/// `E[μ(1_{[0,L]})²] = 2∫₀^L E[e^{γX̃(0)+γX̃(d)}] (L − d) dd` by composite
/// Gauss–Legendre panels of width `min ε`; the error compares 8- and
/// 16-point panels. The CUE is rotation invariant, so only the lag matters.
pub fn exact_moment_two(stat: &MesoscopicStatistic, len: f64) -> Result<Estimate> {
    if !(len > 0.0) {
        return Err(Error::invalid("window length must be positive"));
    }
    let base = stat.symbol_coeffs()?;
    let panels = (len / stat.stat.min_scale()).ceil() as usize;
    let h = len / panels as f64;
    let rule = |m: usize| -> Result<f64> {
        let (x, w) = legendre_nodes(m);
        let nodes: Vec<(f64, f64)> = (0..panels)
            .flat_map(|p| {
                let mid = (p as f64 + 0.5) * h;
                x.iter()
                    .zip(&w)
                    .map(move |(xi, wi)| (mid + 0.5 * h * xi, 0.5 * h * wi))
            })
            .collect();
        let vals = nodes
            .par_iter()
            .map(|&(d, wt)| Ok(wt * two_point_exponential_moment(&base, stat, d)? * (len - d)))
            .collect::<Result<Vec<f64>>>()?;
        Ok(2.0 * vals.iter().sum::<f64>())
    };
    let fine = rule(16)?;
    let coarse = rule(8)?;
    Ok(Estimate {
        value: fine,
        error: (fine - coarse).abs(),
    })
}
