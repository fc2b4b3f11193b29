//! Monte Carlo over Haar unitaries against exact Toeplitz determinants.

use mesochaos::cue::{sample_cue, toeplitz_laplace, ToeplitzSymbol};
use mesochaos::stats::mean_estimate;
use num_complex::Complex64;

#[test]
fn heine_identity_by_sampling() {
    let symbols = [
        vec![Complex64::new(0.1, 0.0), Complex64::new(0.25, 0.0)],
        vec![
            Complex64::new(0.0, 0.0),
            Complex64::new(0.2, 0.15),
            Complex64::new(-0.1, 0.05),
        ],
    ];
    for (i, coeffs) in symbols.into_iter().enumerate() {
        let sym = ToeplitzSymbol::real(coeffs).unwrap();
        for n in [3, 6] {
            let exact = toeplitz_laplace(n, &sym).unwrap().exp();
            let vals: Vec<f64> = (0..20_000u64)
                .map(|t| {
                    let s = sample_cue(n, 500 + i as u64, t).unwrap();
                    s.angles.iter().map(|&a| sym.eval(a).re).sum::<f64>().exp()
                })
                .collect();
            let z = mean_estimate(&vals).z_score(exact);
            assert!(z < 4.0, "symbol {i}, N = {n}: z = {z}");
        }
    }
}
