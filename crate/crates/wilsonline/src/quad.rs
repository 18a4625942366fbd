//! Quadrature kernels: Gauss-Legendre nodes, composite Simpson, periodic
//! trapezoid, and a slow oscillatory-integral oracle used to cross-check the
//! closed-form Fresnel normalizer.

use crate::cmat::C64;

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre polynomial from the Chebyshev initial guess.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    let mut out = Vec::with_capacity(n);
    for i in 1..=n {
        let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_and_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_and_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((x, w));
    }
    out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    out
}

fn legendre_and_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Gauss-Legendre nodes and weights mapped to [a, b].
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    gauss_legendre(n).into_iter().map(|(x, w)| (mid + half * x, half * w)).collect()
}

/// Composite Simpson rule over [a, b] with `panels` subintervals (rounded up
/// to the next even count).
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let n = panels.max(2).next_multiple_of(2);
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

/// Trapezoid rule for a 1-periodic integrand over one period, which is
/// spectrally accurate for smooth periodic functions: `(1/n) sum f(i/n)`.
pub fn trapezoid_periodic(f: impl Fn(f64) -> f64, n: usize) -> f64 {
    let h = 1.0 / n as f64;
    (0..n).map(|i| f(i as f64 * h)).sum::<f64>() * h
}

/// Oracle for the normalized Gaussian-chirp integral
///
/// ```text
/// (1/sqrt(2 pi)) \int_R exp(-(1 - i b) y^2 / 2) dy
/// ```
///
/// by uniform trapezoid sums on [-9, 9]. The integrand is an analytic
/// Gaussian chirp, so the trapezoid rule converges spectrally once the step
/// resolves the local frequency ~ b y; the step is chosen adaptively from
/// the chirp rate as pi / (8 sqrt(1 + b^2)), putting aliasing error near
/// exp(-128) and domain truncation near exp(-40).
pub fn gaussian_chirp_integral(b: f64) -> C64 {
    let half_width = 9.0;
    let h_max = std::f64::consts::PI / (8.0 * (1.0 + b * b).sqrt());
    let n = (2.0 * half_width / h_max).ceil() as usize;
    let h = 2.0 * half_width / n as f64;
    let mut sum = C64::new(0.0, 0.0);
    for i in 0..=n {
        let y = -half_width + i as f64 * h;
        let weight = if i == 0 || i == n { 0.5 } else { 1.0 };
        let arg = C64::new(-0.5 * y * y, 0.5 * b * y * y);
        sum += weight * arg.exp();
    }
    sum * h / (2.0 * std::f64::consts::PI).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        // Degree 2n-1 exactness: order 8 handles x^14 in particular.
        let rule = gauss_legendre(8);
        let val: f64 = rule.iter().map(|(x, w)| w * x.powi(14)).sum();
        assert!((val - 2.0 / 15.0).abs() < 1e-14);
        let odd: f64 = rule.iter().map(|(x, w)| w * x.powi(7)).sum();
        assert!(odd.abs() < 1e-15);
    }

    #[test]
    fn gauss_legendre_weights_sum_to_interval_length() {
        for n in [1, 2, 5, 16, 40] {
            let total: f64 = gauss_legendre(n).iter().map(|(_, w)| w).sum();
            assert!((total - 2.0).abs() < 1e-13, "order {n}");
        }
    }

    #[test]
    fn simpson_on_smooth_integrand() {
        let val = simpson(|x| x.exp(), 0.0, 1.0, 64);
        assert!((val - (std::f64::consts::E - 1.0)).abs() < 1e-9);
    }

    #[test]
    fn trapezoid_periodic_is_spectral() {
        let val = trapezoid_periodic(|t| (2.0 * std::f64::consts::PI * t).cos().exp(), 64);
        // I_0(1), modified Bessel.
        assert!((val - 1.2660658777520084).abs() < 1e-13);
    }

    #[test]
    fn chirp_oracle_at_zero_rate() {
        let v = gaussian_chirp_integral(0.0);
        assert!((v - C64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn chirp_oracle_matches_principal_branch_closed_form() {
        for b in [0.5, -0.5, 3.0, -17.0, 80.0] {
            let closed = C64::new(1.0, -b).powf(-0.5);
            let v = gaussian_chirp_integral(b);
            assert!((v - closed).norm() < 1e-10, "b = {b}");
        }
    }
}
