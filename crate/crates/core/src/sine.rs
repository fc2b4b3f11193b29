//! The sine process with density `N`: Fredholm determinants of its kernel
//! by Nyström discretization, exact Laplace transforms of linear
//! statistics, gap probabilities, a window sampler and the chaos measure.
//!
//! For a test function `h`, `log E[exp Σ_λ h(λ)] = log det(I + K_φ)` with
//! `φ = e^h − 1`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rayon::prelude::*;

use crate::covariance::{KernelParams, LinearStatistic, Mollifier};
use crate::error::{Error, Result};
use crate::quad::{self, legendre_nodes, Estimate, QuadratureRule};
use crate::rng::trial_rng;
use crate::transforms::{h_half_inner, HalfInnerMethod, SampledFunction};

/// Promotion rule: doubling the order must move the log-determinant by
/// less than this.
pub const DOUBLING_TOL: f64 = 1e-10;
const MAX_ORDER: usize = 8192;

/// `sin(πN(x−y)) / (π(x−y))`, equal to `N` on the diagonal.
pub fn sine_kernel(x: f64, y: f64, n: f64) -> f64 {
    let d = x - y;
    if d == 0.0 {
        return n;
    }
    let z = PI * n * d;
    if z.abs() < 1e-4 {
        // sinc series avoids cancellation near the diagonal
        return n * (1.0 - z * z / 6.0 + z.powi(4) / 120.0);
    }
    z.sin() / (PI * d)
}

/// The sine kernel on Gauss–Legendre nodes of `[a, b]`, symmetrized with
/// square-root weights: `M_ij = √w_i K(x_i, x_j) √w_j`.
#[derive(Debug, Clone)]
pub struct DiscretizedKernel {
    pub n: f64,
    pub rule: QuadratureRule,
    pub matrix: DMatrix<f64>,
}

impl DiscretizedKernel {
    pub fn new(n: f64, a: f64, b: f64, order: usize) -> Result<Self> {
        if !(n > 0.0) {
            return Err(Error::invalid("density N must be positive"));
        }
        let rule = QuadratureRule::gauss_legendre(a, b, order)?;
        let sw: Vec<f64> = rule.weights.iter().map(|w| w.sqrt()).collect();
        let x = &rule.nodes;
        let matrix = DMatrix::from_fn(order, order, |i, j| {
            sw[i] * sine_kernel(x[i], x[j], n) * sw[j]
        });
        Ok(Self { n, rule, matrix })
    }

    /// Default order: resolve the kernel's `N·L/2` oscillations and
    /// features of size `feature` in the test function.
    pub fn default_order(n: f64, len: f64, feature: f64) -> usize {
        let m = 64.0 + 2.5 * n * len + 4.0 * len / feature;
        (m.ceil() as usize).min(MAX_ORDER)
    }

    pub fn order(&self) -> usize {
        self.rule.order()
    }

    /// `log det(I + t·K_φ)` for `φ` sampled at the nodes. Uses the
    /// symmetric form `√φ K √φ` with a Cholesky factorization when
    /// `tφ ≥ 0`, and LU on `diag(tφ) K` otherwise.
    pub fn log_det(&self, phi: &[f64], t: f64) -> Result<f64> {
        let m = self.order();
        if phi.len() != m {
            return Err(Error::invalid("φ must be sampled at every node"));
        }
        if phi.iter().all(|&p| t * p >= 0.0) {
            let s: Vec<f64> = phi.iter().map(|&p| (t * p).sqrt()).collect();
            let a = DMatrix::from_fn(m, m, |i, j| {
                let v = s[i] * self.matrix[(i, j)] * s[j];
                if i == j {
                    1.0 + v
                } else {
                    v
                }
            });
            if let Some(ch) = a.cholesky() {
                let l = ch.l();
                return Ok(2.0 * (0..m).map(|i| l[(i, i)].ln()).sum::<f64>());
            }
        }
        let a = DMatrix::from_fn(m, m, |i, j| {
            let v = t * phi[i] * self.matrix[(i, j)];
            if i == j {
                1.0 + v
            } else {
                v
            }
        });
        let lu = a.lu();
        let u = lu.u();
        let mut sign = lu.p().determinant::<f64>();
        let mut acc = 0.0;
        for i in 0..m {
            let d = u[(i, i)];
            sign *= d.signum();
            acc += d.abs().ln();
        }
        if !(sign > 0.0) {
            return Err(Error::Breakdown(format!(
                "Fredholm determinant is not positive (log|det| = {acc})"
            )));
        }
        Ok(acc)
    }
}

/// `log det(I + t K_φ)` on `[a, b]` with order doubling from `order` (or the
/// default for feature size `feature`) until the promotion rule holds. The
/// error is the last doubling change.
pub fn fredholm_det(
    n: f64,
    a: f64,
    b: f64,
    phi: impl Fn(f64) -> f64,
    t: f64,
    feature: f64,
) -> Result<(Estimate, usize)> {
    let mut order = DiscretizedKernel::default_order(n, b - a, feature);
    let eval = |m: usize| -> Result<f64> {
        let k = DiscretizedKernel::new(n, a, b, m)?;
        let p: Vec<f64> = k.rule.nodes.iter().map(|&x| phi(x)).collect();
        k.log_det(&p, t)
    };
    let mut prev = eval(order)?;
    loop {
        let next_order = 2 * order;
        if next_order > MAX_ORDER {
            return Err(Error::NoConvergence {
                estimate: prev,
                error: f64::NAN,
            });
        }
        let next = eval(next_order)?;
        let change = (next - prev).abs();
        if change < DOUBLING_TOL * (1.0 + next.abs()) {
            return Ok((
                Estimate {
                    value: next,
                    error: change,
                },
                next_order,
            ));
        }
        prev = next;
        order = next_order;
    }
}

/// `P(no point in [a, b]) = det(I − K)` on `[a, b]`, as a log.
pub fn gap_log_probability(n: f64, a: f64, b: f64) -> Result<Estimate> {
    fredholm_det(n, a, b, |_| 1.0, -1.0, b - a).map(|r| r.0)
}

/// A test function with the interval outside which it is negligible.
pub struct TestFunction<'a> {
    pub h: &'a (dyn Fn(f64) -> f64 + Sync),
    pub domain: (f64, f64),
    /// Smallest length scale of `h`, used to size the quadrature.
    pub feature: f64,
}

/// `log E[exp Σ_λ h(λ)]` for the density-`N` sine process.
pub fn laplace_transform(f: &TestFunction, n: f64) -> Result<Estimate> {
    let (a, b) = f.domain;
    fredholm_det(n, a, b, |x| (f.h)(x).exp_m1(), 1.0, f.feature).map(|r| r.0)
}

/// `N ∫h + ½‖h‖²_{H^{1/2}}` with the norm computed spectrally on a grid of
/// spacing at most `feature/16`. The domain is zero-extended eightfold so
/// the frequency grid is fine enough for `|κ|` near the origin.
pub fn asymp_prediction(f: &TestFunction, n: f64) -> Result<f64> {
    let (a, b) = f.domain;
    let step = f.feature / 16.0;
    let ext = 3.5 * (b - a);
    let count = ((b - a + 2.0 * ext) / step).ceil() as usize + 1;
    let s = SampledFunction::from_fn(a - ext, step, count, |x| {
        if (a..=b).contains(&x) {
            (f.h)(x)
        } else {
            0.0
        }
    })?;
    let hh = h_half_inner(&s, &s, HalfInnerMethod::Spectral)?;
    let integral = quad::adaptive(f.h, a, b, 1e-14, 1e-13)?.value;
    Ok(n * integral + 0.5 * hh.value)
}

/// Integration domain for a linear statistic: its numerical support plus
/// `8ε` on each side.
pub fn statistic_domain(stat: &LinearStatistic, n: f64) -> (f64, f64) {
    let total: f64 = stat
        .weights
        .iter()
        .map(|t| t.abs())
        .sum::<f64>()
        .max(1e-300);
    let (lo, hi) = stat.support(1e-15 / (n * total).max(1.0));
    let pad = 8.0 * stat.min_scale();
    (lo - pad, hi + pad)
}

/// `log E exp Σ_k t_k X_{N,ε_k}(u_k)` exactly at finite `N`.
pub fn multi_point_laplace(stat: &LinearStatistic, n: f64) -> Result<Estimate> {
    let h = |x: f64| stat.eval(x);
    let f = TestFunction {
        h: &h,
        domain: statistic_domain(stat, n),
        feature: stat.min_scale(),
    };
    laplace_transform(&f, n)
}

/// Exact mean `N ∫h` of a linear statistic.
pub fn statistic_mean(stat: &LinearStatistic, n: f64) -> f64 {
    n * stat.integral()
}

/// Exact finite-N variance `∫ min(|κ|, N) |ĥ(κ)|² dκ`.
pub fn statistic_variance(stat: &LinearStatistic, n: f64) -> Result<f64> {
    let top = stat.fourier_cutoff(1e-17);
    let f = |k: f64| k.min(n) * stat.fourier(k).norm_sqr();
    let mut pts = vec![0.0];
    if n < top {
        pts.push(n);
    }
    pts.push(top.max(n.min(top)));
    let e = quad::adaptive_breaks(f, &pts, 1e-14, 1e-11)?;
    Ok(2.0 * e.value)
}

/// Points of `Λ_N ∩ [a, b]` snapped to the Nyström nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct SineConfiguration {
    pub n: f64,
    pub window: (f64, f64),
    pub points: Vec<f64>,
    pub seed: u64,
    pub trial: u64,
}

/// The discretized kernel's spectrum, reusable across sampler draws.
#[derive(Debug, Clone)]
pub struct SineSampler {
    pub kernel: DiscretizedKernel,
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
}

impl SineSampler {
    pub fn new(n: f64, a: f64, b: f64) -> Result<Self> {
        let order = DiscretizedKernel::default_order(n, b - a, b - a);
        let kernel = DiscretizedKernel::new(n, a, b, order)?;
        let eig = SymmetricEigen::new(kernel.matrix.clone());
        let tol = 1e-8;
        if let Some(bad) = eig.eigenvalues.iter().find(|&&l| l < -tol || l > 1.0 + tol) {
            return Err(Error::Breakdown(format!(
                "kernel eigenvalue {bad} outside [0, 1]"
            )));
        }
        Ok(Self {
            eigenvalues: eig.eigenvalues.iter().map(|l| l.clamp(0.0, 1.0)).collect(),
            eigenvectors: eig.eigenvectors,
            kernel,
        })
    }

    /// One draw: select eigenvectors by independent coins, then the
    /// sequential projection scheme on the node set.
    pub fn sample(&self, seed: u64, trial: u64) -> SineConfiguration {
        let mut rng = trial_rng(seed, trial);
        let m = self.kernel.order();
        let mut v: Vec<Vec<f64>> = self
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|&(_, &l)| rng.random::<f64>() < l)
            .map(|(k, _)| self.eigenvectors.column(k).iter().copied().collect())
            .collect();
        let mut points = Vec::with_capacity(v.len());
        while !v.is_empty() {
            let k = v.len() as f64;
            let probs: Vec<f64> = (0..m)
                .map(|i| v.iter().map(|c| c[i] * c[i]).sum::<f64>() / k)
                .collect();
            let mut r = rng.random::<f64>();
            let mut pick = m - 1;
            for (i, p) in probs.iter().enumerate() {
                if r < *p {
                    pick = i;
                    break;
                }
                r -= p;
            }
            points.push(self.kernel.rule.nodes[pick]);
            // eliminate the component at `pick`, then re-orthonormalize
            let j = (0..v.len())
                .max_by(|&x, &y| v[x][pick].abs().total_cmp(&v[y][pick].abs()))
                .expect("nonempty");
            let pivot = v.swap_remove(j);
            for c in v.iter_mut() {
                let f = c[pick] / pivot[pick];
                c.iter_mut().zip(&pivot).for_each(|(ci, pi)| *ci -= f * pi);
            }
            for i in 0..v.len() {
                for j in 0..i {
                    let d: f64 = v[i].iter().zip(&v[j]).map(|(a, b)| a * b).sum();
                    let (lo, hi) = v.split_at_mut(i);
                    hi[0].iter_mut().zip(&lo[j]).for_each(|(a, b)| *a -= d * b);
                }
                let norm = v[i].iter().map(|a| a * a).sum::<f64>().sqrt();
                v[i].iter_mut().for_each(|a| *a /= norm);
            }
        }
        points.sort_by(f64::total_cmp);
        SineConfiguration {
            n: self.kernel.n,
            window: (self.kernel.rule.a, self.kernel.rule.b),
            points,
            seed,
            trial,
        }
    }
}

/// Draw `trial` of `Λ_N ∩ window` for master seed `seed`.
pub fn sample_sine_window(
    n: f64,
    window: (f64, f64),
    seed: u64,
    trial: u64,
) -> Result<SineConfiguration> {
    Ok(SineSampler::new(n, window.0, window.1)?.sample(seed, trial))
}

/// Single-point statistic `χ_0 ⋆ φ_ε` with unit weight.
pub fn point_statistic(eps: f64, mollifier: Mollifier, params: KernelParams) -> LinearStatistic {
    LinearStatistic::single(0.0, 1.0, eps, mollifier, params)
}

/// Per-configuration chaos densities `exp(γ(X(u) − EX) − (γ²/2) Var X)` for
/// `u = start + i·step`, with `X(u) = Σ_λ (χ_u ⋆ φ_ε)(λ)` and the exact
/// finite-N mean and variance. The window of each configuration must
/// contain the support of every `χ_u ⋆ φ_ε`.
pub fn sine_chaos_measure(
    configs: &[SineConfiguration],
    stat: &LinearStatistic,
    gamma: f64,
    start: f64,
    step: f64,
    count: usize,
) -> Result<Vec<SampledFunction>> {
    let Some(first) = configs.first() else {
        return Ok(Vec::new());
    };
    let n = first.n;
    let mean = statistic_mean(stat, n);
    let var = statistic_variance(stat, n)?;
    let (lo, _) = stat.support(1e-12);
    let (_, hi) = stat.support(1e-12);
    for c in configs {
        if c.window.0 > start + lo || c.window.1 < start + (count - 1) as f64 * step + hi {
            return Err(Error::invalid(
                "configuration window does not cover the statistic",
            ));
        }
    }
    configs
        .par_iter()
        .map(|c| {
            let vals = (0..count)
                .map(|i| {
                    let u = start + i as f64 * step;
                    let x: f64 = c.points.iter().map(|&p| stat.eval(p - u)).sum();
                    (gamma * (x - mean) - 0.5 * gamma * gamma * var).exp()
                })
                .collect();
            SampledFunction::from_real(start, step, vals)
        })
        .collect()
}

/// `E[μ(1_{[0,L]})²] = 2∫₀^L E[e^{γX̃(0)+γX̃(d)}](L − d) dd` from Fredholm
/// determinants. The Nyström order is fixed once by doubling at the widest
/// lag; the lag integral uses Gauss–Legendre panels of width `2ε`, with the
/// error from comparing 4- and 8-point panels.
pub fn exact_moment_two(stat: &LinearStatistic, n: f64, gamma: f64, len: f64) -> Result<Estimate> {
    if stat.centers.len() != 1 {
        return Err(Error::invalid("moment needs a single-point statistic"));
    }
    let mean = statistic_mean(stat, n);
    let var = statistic_variance(stat, n)?;
    let pair = |d: f64| {
        LinearStatistic::new(
            vec![stat.centers[0], stat.centers[0] + d],
            vec![gamma; 2],
            vec![stat.scales[0]; 2],
            stat.mollifier,
            stat.params,
        )
    };
    let widest = pair(len)?;
    let (a0, b0) = statistic_domain(&widest, n);
    let h = |x: f64| widest.eval(x);
    // the order before the final doubling already met the promotion rule
    let (_, order) = fredholm_det(n, a0, b0, |x| h(x).exp_m1(), 1.0, stat.min_scale())?;
    let density = (order / 2) as f64 / (b0 - a0);
    let centering = 2.0 * gamma * mean + gamma * gamma * var;
    let f = |d: f64| -> Result<f64> {
        let p = pair(d)?;
        let (a, b) = statistic_domain(&p, n);
        let m = ((density * (b - a)).ceil() as usize).max(16);
        let k = DiscretizedKernel::new(n, a, b, m)?;
        let phi: Vec<f64> = k.rule.nodes.iter().map(|&x| p.eval(x).exp_m1()).collect();
        Ok((k.log_det(&phi, 1.0)? - centering).exp())
    };
    let panels = (len / (2.0 * stat.min_scale())).ceil() as usize;
    let w = len / panels as f64;
    let rule = |m: usize| -> Result<f64> {
        let (x, wt) = legendre_nodes(m);
        let nodes: Vec<(f64, f64)> = (0..panels)
            .flat_map(|p| {
                let mid = (p as f64 + 0.5) * w;
                x.iter()
                    .zip(&wt)
                    .map(move |(xi, wi)| (mid + 0.5 * w * xi, 0.5 * w * wi))
                    .collect::<Vec<_>>()
            })
            .collect();
        let vals = nodes
            .par_iter()
            .map(|&(d, wi)| Ok(wi * f(d)? * (len - d)))
            .collect::<Result<Vec<f64>>>()?;
        Ok(2.0 * vals.iter().sum::<f64>())
    };
    let fine = rule(8)?;
    let coarse = rule(4)?;
    Ok(Estimate {
        value: fine,
        error: (fine - coarse).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::mean_estimate;

    const P: KernelParams = KernelParams { ell: 1.0 };

    #[test]
    fn kernel_values() {
        assert_eq!(sine_kernel(0.3, 0.3, 7.0), 7.0);
        let near = sine_kernel(1e-9, 0.0, 7.0);
        assert!((near - 7.0).abs() < 1e-10);
        assert!((sine_kernel(0.5, 0.0, 1.0) - 2.0 / PI).abs() < 1e-15);
        let k = DiscretizedKernel::new(4.0, 0.0, 2.0, 64).unwrap();
        assert!((k.matrix.clone() - k.matrix.transpose()).norm() < 1e-14);
        // trace = N · length
        assert!((k.matrix.trace() - 8.0).abs() < 1e-12);
        let w: f64 = k.rule.weights.iter().sum();
        assert!((w - 2.0).abs() < 1e-13 && k.rule.weights.iter().all(|&w| w > 0.0));
    }

    #[test]
    fn trivial_determinants() {
        let (e, _) = fredholm_det(5.0, 0.0, 1.0, |x| x.sin(), 0.0, 0.5).unwrap();
        assert!(e.value.abs() < 1e-15);
        let (e, _) = fredholm_det(5.0, 0.0, 1.0, |_| 0.0, 1.0, 0.5).unwrap();
        assert!(e.value.abs() < 1e-15);
        let zero = |_: f64| 0.0;
        let f = TestFunction {
            h: &zero,
            domain: (0.0, 1.0),
            feature: 0.1,
        };
        assert!(laplace_transform(&f, 8.0).unwrap().value.abs() < 1e-15);
        assert!(asymp_prediction(&f, 8.0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn small_gap_matches_trace() {
        // log det(I − K) = −Tr K − Tr K²/2 − …, Tr K = N s
        let n = 10.0;
        let s = 0.01 / n;
        let e = gap_log_probability(n, 0.0, s).unwrap();
        let one_minus = -e.value.exp_m1();
        assert!((one_minus - n * s).abs() < 1e-4 * n * s, "{one_minus}");
    }

    #[test]
    fn gap_probability_decreasing() {
        let mut prev = 0.0;
        for s in [0.05, 0.1, 0.2, 0.4] {
            let g = gap_log_probability(4.0, 0.0, s).unwrap().value;
            assert!(g < prev);
            prev = g;
        }
    }

    #[test]
    fn prediction_linear_in_n() {
        let h = |x: f64| 0.4 * (-x * x / 0.02).exp();
        let f = TestFunction {
            h: &h,
            domain: (-1.5, 1.5),
            feature: 0.1,
        };
        let integral = 0.4 * (0.02 * PI).sqrt();
        let d = asymp_prediction(&f, 20.0).unwrap() - asymp_prediction(&f, 10.0).unwrap();
        assert!((d - 10.0 * integral).abs() < 1e-10);
    }

    #[test]
    fn laplace_asymptotics_gaussian_bump() {
        let sig = 0.05;
        let h = move |x: f64| 0.5 * (-x * x / (2.0 * sig * sig)).exp();
        let f = TestFunction {
            h: &h,
            domain: (-12.0 * sig, 12.0 * sig),
            feature: sig,
        };
        let mut prev = f64::INFINITY;
        for n in [4.0, 8.0, 16.0] {
            let err =
                (laplace_transform(&f, n).unwrap().value - asymp_prediction(&f, n).unwrap()).abs();
            assert!(err < 1e-2 * prev);
            prev = err;
        }
    }

    #[test]
    fn variance_matches_second_difference() {
        let stat = LinearStatistic::new(
            vec![0.0, 0.7],
            vec![1.0, -0.5],
            vec![0.1, 0.2],
            Mollifier::Gaussian,
            P,
        )
        .unwrap();
        let n = 6.0;
        let f = |t: f64| multi_point_laplace(&stat.scaled(t), n).unwrap().value;
        let d = 1e-2;
        let f0 = f(0.0);
        let f2 = (f(d) - 2.0 * f0 + f(-d)) / (d * d);
        let f4 = (f(2.0 * d) - 2.0 * f0 + f(-2.0 * d)) / (4.0 * d * d);
        let rich = (4.0 * f2 - f4) / 3.0;
        let v = statistic_variance(&stat, n).unwrap();
        assert!((rich - v).abs() < 1e-6 * v, "{rich} {v}");
        let m = (f(d) - f(-d)) / (2.0 * d);
        let mean = statistic_mean(&stat, n);
        assert!((m - mean).abs() < 1e-3 * (1.0 + mean.abs()), "{m} {mean}");
    }

    #[test]
    fn distant_windows_nearly_independent() {
        let n = 8.0;
        let t = 0.2;
        let one = |u: f64| {
            LinearStatistic::single(u, t, 0.1, Mollifier::Gaussian, KernelParams { ell: 0.25 })
        };
        let a = multi_point_laplace(&one(0.0), n).unwrap().value;
        let b = multi_point_laplace(&one(0.25 + 10.0 / n), n).unwrap().value;
        let both = LinearStatistic::new(
            vec![0.0, 0.25 + 10.0 / n],
            vec![t, t],
            vec![0.1, 0.1],
            Mollifier::Gaussian,
            KernelParams { ell: 0.25 },
        )
        .unwrap();
        let ab = multi_point_laplace(&both, n).unwrap().value;
        assert!((ab - a - b).abs() < 1e-3, "{}", ab - a - b);
        // what remains is the cross covariance t² T(u, v)
        let cross = t
            * t
            * crate::covariance::t_exact(
                0.0,
                0.25 + 10.0 / n,
                0.1,
                0.1,
                Mollifier::Gaussian,
                Mollifier::Gaussian,
                KernelParams { ell: 0.25 },
            )
            .unwrap()
            .value;
        assert!((ab - a - b - cross).abs() < 0.1 * cross.abs());
    }

    #[test]
    fn sampler_counts_and_repulsion() {
        let s = SineSampler::new(6.0, 0.0, 1.0).unwrap();
        let counts: Vec<f64> = (0..3000)
            .map(|t| s.sample(2, t).points.len() as f64)
            .collect();
        let m = mean_estimate(&counts);
        assert!(m.z_score(6.0) < 4.0, "{m:?}");
        let var =
            counts.iter().map(|c| (c - m.mean).powi(2)).sum::<f64>() / (counts.len() - 1) as f64;
        assert!(var < m.mean);
        assert_eq!(s.sample(2, 5), s.sample(2, 5));
        let gap = gap_log_probability(6.0, 0.0, 1.0 / 3.0)
            .unwrap()
            .value
            .exp();
        let sub = SineSampler::new(6.0, 0.0, 1.0 / 3.0).unwrap();
        let empty: Vec<f64> = (0..3000)
            .map(|t| {
                if sub.sample(3, t).points.is_empty() {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        assert!(mean_estimate(&empty).z_score(gap) < 4.0);
    }

    #[test]
    fn chaos_density_trivial_at_small_gamma() {
        let stat = point_statistic(0.1, Mollifier::Gaussian, P);
        let s = SineSampler::new(8.0, -1.5, 2.5).unwrap();
        let configs: Vec<_> = (0..3).map(|t| s.sample(1, t)).collect();
        let d = sine_chaos_measure(&configs, &stat, 1e-9, 0.0, 0.25, 5).unwrap();
        assert!(d
            .iter()
            .all(|f| f.values[..5].iter().all(|v| (v.re - 1.0).abs() < 1e-6)));
        assert!(sine_chaos_measure(&configs, &stat, 0.5, -1.0, 0.25, 5).is_err());
    }
}
