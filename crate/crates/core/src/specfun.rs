//! Closed-form special functions and the exactly solvable Selberg and Dyson
//! integrals that serve as ground truth for the moment computations.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
#[allow(clippy::excessive_precision)]
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_61;

/// ζ'(−1) = 1/12 − ln A, with A the Glaisher–Kinkelin constant.
#[allow(clippy::excessive_precision)]
const ZETA_PRIME_MINUS_ONE: f64 = -0.165_421_143_700_450_929_21;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

/// An integral evaluation carried both as a value and as its logarithm, so
/// that large moment products stay representable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralValue {
    pub value: f64,
    pub ln_value: f64,
}

impl IntegralValue {
    fn from_ln(ln_value: f64) -> Self {
        Self {
            value: ln_value.exp(),
            ln_value,
        }
    }
}

// Lanczos approximation, g = 7, nine terms; about 15 significant digits.
const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Factorials that are exactly representable in binary64, `FACTORIALS[n] = n!`.
const FACTORIALS: [f64; 23] = {
    let mut t = [1.0f64; 23];
    let mut i = 1;
    while i < 23 {
        t[i] = t[i - 1] * i as f64;
        i += 1;
    }
    t
};

/// log Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x == x.floor() && (1.0..=23.0).contains(&x) {
        return FACTORIALS[x as usize - 1].ln();
    }
    if x < 0.5 {
        // reflection keeps the Lanczos sum away from its poles
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let mut a = LANCZOS[0];
    let t = z + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    LN_SQRT_2PI + (z + 0.5) * t.ln() - t + a.ln()
}

/// Γ(x) for x > 0, exact on small integers.
pub fn gamma(x: f64) -> f64 {
    if x == x.floor() && (1.0..=23.0).contains(&x) {
        return FACTORIALS[x as usize - 1];
    }
    ln_gamma(x).exp()
}

/// log of the Barnes G-function for z > 0.
///
/// Shifts the argument upward with `G(z+1) = Γ(z) G(z)` until the
/// asymptotic expansion of `log G(1+w)` is accurate, then shifts back.
pub fn ln_barnes_g(z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::domain(format!("Barnes G needs z > 0, got {z}")));
    }
    let mut shift = 0.0;
    let mut w = z;
    while w < 16.0 {
        shift += ln_gamma(w);
        w += 1.0;
    }
    Ok(ln_barnes_g_asymptotic(w - 1.0) - shift)
}

/// Barnes G(z) for z > 0.
pub fn barnes_g(z: f64) -> Result<f64> {
    ln_barnes_g(z).map(f64::exp)
}

fn ln_barnes_g_asymptotic(w: f64) -> f64 {
    // log G(1+w) ~ w²/2 log w − 3w²/4 + (w/2) log 2π − (1/12) log w + ζ'(−1)
    //              + Σ_k B_{2k+2} / (4k(k+1) w^{2k})
    const B: [f64; 6] = [
        -1.0 / 30.0,
        1.0 / 42.0,
        -1.0 / 30.0,
        5.0 / 66.0,
        -691.0 / 2730.0,
        7.0 / 6.0,
    ];
    let lw = w.ln();
    let mut s =
        0.5 * w * w * lw - 0.75 * w * w + w * LN_SQRT_2PI - lw / 12.0 + ZETA_PRIME_MINUS_ONE;
    let w2 = w * w;
    let mut p = w2;
    for (k, b) in B.iter().enumerate() {
        let k = (k + 1) as f64;
        s += b / (4.0 * k * (k + 1.0) * p);
        p *= w2;
    }
    s
}

/// log of `G(1+γ/√2)^{2q} / G(1+γ√2)^q`, the Barnes-function prefactor of
/// the conjectured CUE total-mass moments.
pub fn ln_barnes_moment_constant(gamma: f64, q: u32) -> Result<f64> {
    let s2 = std::f64::consts::SQRT_2;
    let q = q as f64;
    Ok(2.0 * q * ln_barnes_g(1.0 + gamma / s2)? - q * ln_barnes_g(1.0 + gamma * s2)?)
}

/// Cin(ω) = ∫₀^ω (1 − cos z)/z dz. Entire and even.
pub fn cin(omega: f64) -> f64 {
    let x = omega.abs();
    if x <= 4.0 {
        cin_series(x)
    } else {
        EULER_GAMMA + x.ln() - ci_continued_fraction(x)
    }
}

/// Ci(x) = −∫ₓ^∞ cos t / t dt, even in x, with a logarithmic pole at 0.
pub fn ci(x: f64) -> Result<f64> {
    if x == 0.0 {
        return Err(Error::domain("Ci has a logarithmic singularity at 0"));
    }
    let x = x.abs();
    Ok(if x <= 4.0 {
        EULER_GAMMA + x.ln() - cin_series(x)
    } else {
        ci_continued_fraction(x)
    })
}

fn cin_series(x: f64) -> f64 {
    // Σ_{k≥1} (−1)^{k+1} x^{2k} / (2k (2k)!)
    let x2 = x * x;
    let mut term = 1.0; // x^{2k}/(2k)! for k = 0
    let mut sum = 0.0;
    for k in 1..60 {
        let kf = k as f64;
        term *= -x2 / ((2.0 * kf - 1.0) * (2.0 * kf));
        let add = -term / (2.0 * kf);
        sum += add;
        if add.abs() < 1e-18 * sum.abs() {
            break;
        }
    }
    sum
}

/// Ci(x) for x > 2 through the Lentz continued fraction of E₁(ix).
fn ci_continued_fraction(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = Complex64::new(1.0, x);
    let mut c = Complex64::new(1.0 / TINY, 0.0);
    let mut d = b.inv();
    let mut h = d;
    for i in 2..1000 {
        let a = -((i - 1) as f64).powi(2);
        b += 2.0;
        d = (d * a + b).inv();
        c = b + a / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).norm() < 1e-16 {
            break;
        }
    }
    h *= Complex64::new(x.cos(), -x.sin());
    -h.re
}

/// Selberg integral `S(n; γ̃) = ∫_{[0,1]^n} ∏_{i≠j} |u_i − u_j|^{−γ̃} du`.
///
/// Finite iff `n γ̃ < 1`.
pub fn selberg_unit(n: u32, gt: f64) -> Result<IntegralValue> {
    if n == 0 {
        return Err(Error::invalid("Selberg dimension must be positive"));
    }
    if !(gt >= 0.0) {
        return Err(Error::domain(format!(
            "exponent must be nonnegative, got {gt}"
        )));
    }
    let nf = n as f64;
    if nf * gt >= 1.0 {
        return Err(Error::Divergent(format!(
            "Selberg integral needs n·γ̃ < 1, got {}",
            nf * gt
        )));
    }
    let lg1 = ln_gamma(1.0 - gt);
    let mut ln = 0.0;
    for j in 0..n {
        let j = j as f64;
        ln += 2.0 * ln_gamma(1.0 - j * gt) + ln_gamma(1.0 - (j + 1.0) * gt)
            - ln_gamma(2.0 - (nf + j - 1.0) * gt)
            - lg1;
    }
    Ok(IntegralValue::from_ln(ln))
}

/// `∫_{[0,r]^q} ∏_{j<k} |u_j − u_k|^{−γ²} du`, the limiting interval moment
/// of the chaos measure: `r^{q − γ² C(q,2)} S(q; γ²/2)`.
pub fn selberg_interval_moment(q: u32, gamma: f64, r: f64) -> Result<IntegralValue> {
    if !(r > 0.0) {
        return Err(Error::domain(format!(
            "interval length must be positive, got {r}"
        )));
    }
    let g2 = gamma * gamma;
    if g2 * q as f64 >= 2.0 {
        return Err(Error::Divergent(format!(
            "moment needs γ²q < 2, got {}",
            g2 * q as f64
        )));
    }
    let s = selberg_unit(q, 0.5 * g2)?;
    let qf = q as f64;
    let exponent = qf - g2 * qf * (qf - 1.0) / 2.0;
    Ok(IntegralValue::from_ln(s.ln_value + exponent * r.ln()))
}

/// Circular Dyson integral
/// `∫_{[0,2π]^q} ∏_{j<k} |e^{iθ_j} − e^{iθ_k}|^{−γ²} dθ = (2π)^q Γ(1−γ²q/2)/Γ(1−γ²/2)^q`.
pub fn dyson_circle(q: u32, gamma: f64) -> Result<IntegralValue> {
    if q == 0 {
        return Err(Error::invalid("dimension must be positive"));
    }
    let g2 = gamma * gamma;
    let qf = q as f64;
    if g2 * qf >= 2.0 {
        return Err(Error::Divergent(format!(
            "Dyson integral needs γ²q < 2, got {}",
            g2 * qf
        )));
    }
    let ln = qf * (2.0 * PI).ln() + ln_gamma(1.0 - 0.5 * g2 * qf) - qf * ln_gamma(1.0 - 0.5 * g2);
    Ok(IntegralValue::from_ln(ln))
}

/// Structure exponent `ξ(q) = q − γ² q(q−1)/2` of the chaos measure.
pub fn structure_exponent(q: f64, gamma: f64) -> f64 {
    q - gamma * gamma * q * (q - 1.0) / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad;

    fn ulps(a: f64, b: f64) -> u64 {
        (a.to_bits() as i64 - b.to_bits() as i64).unsigned_abs()
    }

    #[test]
    fn factorials_from_log_gamma() {
        for n in 1..=20u32 {
            let exact: f64 = (1..n).map(|k| k as f64).product();
            assert!(ulps(gamma(n as f64), exact) <= 8, "n={n}");
            // ln Γ(n) is the correctly rounded log, so exp() of it is off
            // from (n−1)! by at most half an ulp of the log, relatively.
            let lg = ln_gamma(n as f64);
            assert!(ulps(lg, exact.ln()) <= 1);
            let bound = 0.5 * f64::EPSILON * lg.abs().max(1.0) * exact + 2.0 * f64::EPSILON * exact;
            assert!((lg.exp() - exact).abs() <= bound, "n={n}");
        }
    }

    #[test]
    fn log_gamma_recurrence_and_known_values() {
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-14);
        assert!((ln_gamma(1.5) - (0.5 * PI.sqrt()).ln()).abs() < 1e-14);
        for i in 1..=100 {
            let x = i as f64 * 0.1;
            let lhs = ln_gamma(x + 1.0);
            let rhs = ln_gamma(x) + x.ln();
            assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0), "x={x}");
        }
    }

    #[test]
    fn barnes_g_values() {
        assert!((barnes_g(1.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((barnes_g(2.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((barnes_g(3.0).unwrap() - 1.0).abs() < 1e-12);
        assert!((barnes_g(4.0).unwrap() - 2.0).abs() < 1e-12);
        assert!((barnes_g(5.0).unwrap() - 12.0).abs() < 1e-11);
        let ratio = barnes_g(3.5).unwrap() / barnes_g(2.5).unwrap();
        assert!((ratio - gamma(2.5)).abs() < 1e-10);
        // G(1/2) = 2^{1/24} e^{1/8} π^{−1/4} A^{−3/2}
        let glaisher: f64 = 1.282_427_129_100_622_6;
        let g_half =
            2f64.powf(1.0 / 24.0) * (0.125f64).exp() * PI.powf(-0.25) * glaisher.powf(-1.5);
        assert!((barnes_g(0.5).unwrap() - g_half).abs() < 1e-12);
        assert!(barnes_g(0.0).is_err());
        assert!(barnes_g(-1.0).is_err());
    }

    #[test]
    fn barnes_recurrence_grid() {
        for i in 1..=100 {
            let z = i as f64 * 0.1;
            let lhs = ln_barnes_g(z + 1.0).unwrap();
            let rhs = ln_gamma(z) + ln_barnes_g(z).unwrap();
            assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0), "z={z}");
        }
    }

    #[test]
    fn cin_small_and_identity() {
        assert_eq!(cin(0.0), 0.0);
        let oracle = quad::adaptive(|z| (1.0 - z.cos()) / z, 0.0, 1e-3, 1e-16, 1e-12).unwrap();
        assert!((cin(1e-3) - oracle.value).abs() < 1e-13);
        assert!((cin(1e-3) - 2.5e-7).abs() < 1e-12);
        assert!((cin(2.0) - 2f64.ln() - EULER_GAMMA + ci(2.0).unwrap()).abs() < 1e-12);
        for w in [0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0] {
            let id = -ci(w).unwrap() + w.ln() + EULER_GAMMA;
            assert!((cin(w) - id).abs() < 1e-11, "ω={w}");
            assert_eq!(cin(-w), cin(w));
        }
        assert!(ci(0.0).is_err());
        // reference values of Ci
        assert!((ci(10.0).unwrap() + 0.045_456_433_004_455_37).abs() < 1e-14);
        assert!((ci(1.0).unwrap() - 0.337_403_922_900_968_1).abs() < 1e-14);
        assert_eq!(ci(-3.0), ci(3.0));
    }

    #[test]
    fn cin_matches_quadrature_across_branch() {
        for w in [3.9, 4.0, 4.1, 7.5, 30.0] {
            let q = quad::adaptive(|z| (1.0 - z.cos()) / z, 0.0, w, 1e-15, 1e-15).unwrap();
            assert!((cin(w) - q.value).abs() < 1e-12, "ω={w}");
        }
    }

    #[test]
    fn selberg_trivial_cases() {
        for n in 1..6 {
            assert!((selberg_unit(n, 0.0).unwrap().value - 1.0).abs() < 1e-14);
        }
        assert!((selberg_unit(1, 0.7).unwrap().value - 1.0).abs() < 1e-14);
        assert!((selberg_unit(2, 0.25).unwrap().value - 8.0 / 3.0).abs() < 1e-8);
        assert!(matches!(selberg_unit(3, 0.34), Err(Error::Divergent(_))));
    }

    #[test]
    fn selberg_two_point_closed_form() {
        for i in 1..=9 {
            let g = 0.05 * i as f64;
            let exact = 2.0 / ((1.0 - 2.0 * g) * (2.0 - 2.0 * g));
            let v = selberg_unit(2, g).unwrap().value;
            assert!((v - exact).abs() <= 1e-10 * exact, "γ̃={g}");
        }
    }

    #[test]
    fn interval_and_circle_trivial_cases() {
        assert!((selberg_interval_moment(1, 0.9, 2.5).unwrap().value - 2.5).abs() < 1e-13);
        assert!((selberg_interval_moment(3, 0.0, 2.0).unwrap().value - 8.0).abs() < 1e-12);
        assert!((dyson_circle(1, 0.8).unwrap().value - 2.0 * PI).abs() < 1e-13);
        assert!((dyson_circle(3, 0.0).unwrap().value - (2.0 * PI).powi(3)).abs() < 1e-10);
        assert!(selberg_interval_moment(2, 1.0, 1.0).is_err());
        assert!(dyson_circle(4, 0.75).is_err());
    }

    #[test]
    fn interval_moment_scales_with_length() {
        // q = 2 in closed form: 2 r^{2−γ²} / ((1−γ²)(2−γ²))
        for (g2, r) in [(0.1f64, 0.7f64), (0.5, 3.0), (0.9, 0.2)] {
            let v = selberg_interval_moment(2, g2.sqrt(), r).unwrap().value;
            let direct = 2.0 * r.powf(2.0 - g2) / ((1.0 - g2) * (2.0 - g2));
            assert!(
                (v - direct).abs() < 1e-12 * direct,
                "{g2} {r}: {v} vs {direct}"
            );
        }
    }

    #[test]
    fn log_values_agree() {
        let v = selberg_interval_moment(3, 0.6, 7.0).unwrap();
        assert!((v.value.ln() - v.ln_value).abs() < 1e-14);
        assert!((structure_exponent(2.0, 0.5) - 1.75).abs() < 1e-15);
    }
}
