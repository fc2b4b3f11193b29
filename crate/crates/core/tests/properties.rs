use mesochaos::cue::{levinson_log_det, symbol_exp_coeffs, toeplitz_log_det, ToeplitzSymbol};
use mesochaos::transforms::{fourier, hilbert, SampledFunction};
use num_complex::Complex64;
use proptest::prelude::*;

fn trig(coef: &[(f64, f64)]) -> impl Fn(f64) -> f64 + '_ {
    move |x| {
        coef.iter()
            .enumerate()
            .map(|(k, (a, b))| {
                let w = (k + 1) as f64;
                a * (w * x).cos() + b * (w * x).sin()
            })
            .sum()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hilbert_is_an_involution_up_to_sign(coef in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..24)) {
        let n = 128;
        let f = SampledFunction::periodic_from_fn(0.0, 2.0 * std::f64::consts::PI / n as f64, n, trig(&coef)).unwrap();
        let hh = hilbert(&hilbert(&f).unwrap()).unwrap();
        for (a, b) in f.values.iter().zip(&hh.values) {
            prop_assert!((a + b).norm() < 1e-10);
        }
    }

    #[test]
    fn hilbert_rotates_cosines_into_sines(k in 1usize..30, phase in 0.0f64..6.3) {
        let n = 128;
        let h = 2.0 * std::f64::consts::PI / n as f64;
        let w = k as f64;
        let f = SampledFunction::periodic_from_fn(0.0, h, n, |x| (w * x + phase).cos()).unwrap();
        let g = hilbert(&f).unwrap();
        // ℋ cos = sin for positive frequency
        for i in 0..n {
            prop_assert!((g.values[i].re - (w * f.x(i) + phase).sin()).abs() < 1e-10);
        }
    }

    #[test]
    fn plancherel(vals in prop::collection::vec(-1.0f64..1.0, 8..64)) {
        let step = 0.125;
        let f = SampledFunction::from_real(0.0, step, vals.clone()).unwrap();
        let fh = fourier(&f).unwrap();
        let lhs: f64 = vals.iter().map(|v| v * v).sum::<f64>() * step;
        let rhs: f64 = fh.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * fh.step;
        prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.max(1e-300));
    }

    #[test]
    fn levinson_agrees_with_lu(c in prop::collection::vec((-0.3f64..0.3, -0.3f64..0.3), 1..5), n in 1usize..20) {
        let sym = ToeplitzSymbol::real(
            std::iter::once(Complex64::new(0.0, 0.0)).chain(c.iter().map(|&(a, b)| Complex64::new(a, b))).collect(),
        ).unwrap();
        let w = symbol_exp_coeffs(n, &sym).unwrap();
        let lev = levinson_log_det(&w[n - 1..]).unwrap();
        let lu = toeplitz_log_det(n, &sym).unwrap();
        prop_assert!((lev - lu.re).abs() < 1e-9 * (1.0 + lev.abs()));
        prop_assert!(lu.im.abs() < 1e-9);
    }
}
