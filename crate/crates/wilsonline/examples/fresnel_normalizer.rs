//! The oscillatory Gaussian normalizer at finite regulator, its quadrature
//! oracle, and convergence of the rescaling coefficients to the limit
//! model.
//!
//! Run with: cargo run --example fresnel_normalizer

use wilsonline::spectral::{
    rk_coefficients, z_normalizer, z_normalizer_quadrature, Regulator, SpectralModel,
};

fn main() {
    let eigenvalues = vec![0.6, -1.1, 2.3];
    let model = SpectralModel::new(eigenvalues.clone(), 1, 1.7, Regulator::Finite(3.0)).unwrap();
    let closed = z_normalizer(&model).unwrap();
    let oracle = z_normalizer_quadrature(&model).unwrap();
    println!("normalizer, closed form : {:+.12} {:+.12}i", closed.re, closed.im);
    println!("normalizer, quadrature  : {:+.12} {:+.12}i", oracle.re, oracle.im);
    println!("difference              : {:.3e}", (closed - oracle).norm());

    // Per-mode rescaling coefficients approach the limit-model values as
    // the regulator grows; the error decays like 1/n.
    let limit = rk_coefficients(
        &SpectralModel::new(eigenvalues.clone(), 1, 1.7, Regulator::Infinite).unwrap(),
    );
    println!("\nrescaling coefficients r_j vs regulator:");
    println!("  n        | max_j |r_j(n) - r_j(inf)| / |r_j(inf)|");
    for n in [10.0, 100.0, 1000.0, 10000.0] {
        let r = rk_coefficients(
            &SpectralModel::new(eigenvalues.clone(), 1, 1.7, Regulator::Finite(n)).unwrap(),
        );
        let worst = r
            .iter()
            .zip(&limit)
            .map(|(a, b)| (a - b).norm() / b.norm())
            .fold(0.0f64, f64::max);
        println!("  {n:<8} | {worst:.3e}");
    }

    // In the limit model the phases sit at +/- pi/4 and the modulus
    // saturates 1/(2k|lambda|) after the weight is stripped.
    let model_inf = SpectralModel::new(eigenvalues, 1, 1.7, Regulator::Infinite).unwrap();
    println!("\nlimit-model coefficients:");
    for (j, r) in rk_coefficients(&model_inf).iter().enumerate() {
        println!(
            "  mode {j}: lambda {:+.2}, arg r = {:+.6} (pi/4 = {:.6}), |r|^2 (1+l^2)^-p = {:.6}, 1/(2k|l|) = {:.6}",
            model_inf.eigenvalues()[j],
            r.arg(),
            std::f64::consts::FRAC_PI_4,
            r.norm_sqr() / model_inf.p_factor(j),
            1.0 / (2.0 * model_inf.level() * model_inf.eigenvalues()[j].abs()),
        );
    }
}
