//! Acceptance gate: one test per release criterion, each printing a
//! `ACCEPTANCE <n>: PASS` line on success (visible with `--nocapture`).
//! Tolerances are pinned here, next to a short justification, and are not
//! shared with library code.

use std::time::Instant;

use num_complex::Complex64;

use wilsonline::cmat::{C64, CMat};
use wilsonline::counter_rng;
use wilsonline::expansion;
use wilsonline::gaussian::{self, GaussianSystem, McEstimate};
use wilsonline::lie_rep::{casimir_tensor, su2_trace_power_closed_form, tensor_trace_power, RepBasis};
use wilsonline::signature::{holonomy_full, holonomy_graded, DrivingPath};
use wilsonline::spectral::{
    covariance_rk, rk_coefficients, z_normalizer, z_normalizer_quadrature, CurrentPath,
    CurrentVector, Regulator, SpectralModel,
};
use wilsonline::topology::{self, linking_crossing, linking_gauss};

/// Batch-means standard error over 32 consecutive batches, matching the
/// estimator's convention; local copy so the gate does not depend on
/// library internals.
fn batch_se(values: &[C64]) -> (C64, f64, f64) {
    let n = values.len();
    let mean = values.iter().sum::<C64>() / n as f64;
    let batches = 32.min(n);
    let base = n / batches;
    let rem = n % batches;
    let mut means = Vec::with_capacity(batches);
    let mut start = 0;
    for b in 0..batches {
        let len = base + usize::from(b < rem);
        means.push(values[start..start + len].iter().sum::<C64>() / len as f64);
        start += len;
    }
    let bm = means.iter().sum::<C64>() / batches as f64;
    let var_re =
        means.iter().map(|m| (m.re - bm.re).powi(2)).sum::<f64>() / (batches - 1) as f64;
    let var_im =
        means.iter().map(|m| (m.im - bm.im).powi(2)).sum::<f64>() / (batches - 1) as f64;
    (mean, (var_re / batches as f64).sqrt(), (var_im / batches as f64).sqrt())
}

#[test]
fn criterion_1_su2_tensor_spectrum() {
    let start = Instant::now();
    let basis = RepBasis::su2();
    let two_m = casimir_tensor(&basis).matrix.scale_re(2.0);
    let eigs = two_m.hermitian_eigenvalues();
    // Exact spectrum {-1, -1, -1, 3}; 1e-12 leaves ~4 digits of slack over
    // the Jacobi solver's double-precision convergence threshold.
    let expected = [-1.0, -1.0, -1.0, 3.0];
    assert_eq!(eigs.len(), 4);
    for (got, want) in eigs.iter().zip(expected) {
        assert!((got - want).abs() < 1e-12, "eigenvalue {got} vs {want}");
    }
    // Trace powers against the closed form; 1e-10 absorbs the repeated
    // 4x4 multiplications at m = 12.
    for m in 0..=12 {
        let got = tensor_trace_power(&basis, m);
        let want = su2_trace_power_closed_form(m);
        assert!((got.re - want).abs() < 1e-10, "m {m}: {got} vs {want}");
        assert!(got.im.abs() < 1e-10, "m {m}: imaginary part {}", got.im);
    }
    assert!(start.elapsed().as_secs_f64() < 1.0, "runtime budget 1 s exceeded");
    println!("ACCEPTANCE 1: PASS");
}

#[test]
fn criterion_2_linking_numbers() {
    let start = Instant::now();
    // Hopf pair: double integral at grid 512 against the signed-crossing
    // integer on 400-segment polylines. 1e-4 reflects the trapezoid rule's
    // spectral convergence on these smooth curves; the oracle is exact.
    let (a, b) = topology::hopf_pair();
    let gauss = linking_gauss(&a, &b, 512).unwrap();
    let crossings = linking_crossing(
        &a.to_polyline(400).unwrap(),
        &b.to_polyline(400).unwrap(),
        topology::DEFAULT_PROJECTION,
    )
    .unwrap();
    assert_eq!(crossings, 1);
    assert!((gauss - crossings as f64).abs() < 1e-4, "hopf {gauss} vs {crossings}");

    // (2,4)-style torus pair links twice; 1e-3 again from smooth-curve
    // quadrature at grid 512.
    let (ta, tb) = topology::torus_24_pair();
    let torus = linking_gauss(&ta, &tb, 512).unwrap();
    assert!((torus - 2.0).abs() < 1e-3, "torus {torus}");

    // Antisymmetry under orientation reversal and symmetry under exchange;
    // 1e-8 covers accumulated rounding across the two 512^2 sums.
    let reversed = linking_gauss(&a, &b.reversed(), 512).unwrap();
    assert!((reversed + gauss).abs() < 1e-8, "antisymmetry {reversed} vs {gauss}");
    let swapped = linking_gauss(&b, &a, 512).unwrap();
    assert!((swapped - gauss).abs() < 1e-8, "symmetry {swapped} vs {gauss}");

    assert!(start.elapsed().as_secs_f64() < 5.0, "runtime budget 5 s exceeded");
    println!("ACCEPTANCE 2: PASS");
}

#[test]
fn criterion_3_fresnel_normalizer() {
    let start = Instant::now();
    // 20 random single-mode draws; 1e-6 is the contract between the
    // closed-form product and the oscillatory quadrature oracle, which is
    // itself accurate to ~1e-10 at these chirp rates.
    for trial in 0..20u64 {
        let mag = 0.3 + 2.7 * counter_rng::uniform_at(0xAC3, trial, 0);
        let lambda = if counter_rng::uniform_at(0xAC3, trial, 1) < 0.5 { -mag } else { mag };
        let p = (3.0 * counter_rng::uniform_at(0xAC3, trial, 2)) as u32;
        let k = 0.3 + 2.7 * counter_rng::uniform_at(0xAC3, trial, 3);
        let n = 0.5 + 49.5 * counter_rng::uniform_at(0xAC3, trial, 4);
        let model = SpectralModel::new(vec![lambda], p, k, Regulator::Finite(n)).unwrap();
        let closed = z_normalizer(&model).unwrap();
        let oracle = z_normalizer_quadrature(&model).unwrap();
        assert!(
            (closed - oracle).norm() < 1e-6,
            "trial {trial}: lambda {lambda} p {p} k {k} n {n}: {closed} vs {oracle}"
        );
    }
    assert!(start.elapsed().as_secs_f64() < 10.0, "runtime budget 10 s exceeded");
    println!("ACCEPTANCE 3: PASS");
}

/// Deterministic random model for criterion 4, indexed by trial.
fn random_limit_model(trial: u64) -> (SpectralModel, CurrentVector, CurrentVector) {
    let modes = 1 + (trial % 6) as usize;
    let ev: Vec<f64> = (0..modes)
        .map(|j| {
            let mag = 0.3 + 2.2 * counter_rng::uniform_at(0xAC4, trial, 10 + j as u64);
            if counter_rng::uniform_at(0xAC4, trial, 30 + j as u64) < 0.5 { -mag } else { mag }
        })
        .collect();
    let p = (3.0 * counter_rng::uniform_at(0xAC4, trial, 0)) as u32;
    let k = 0.5 + 2.5 * counter_rng::uniform_at(0xAC4, trial, 1);
    let model = SpectralModel::new(ev, p, k, Regulator::Infinite).unwrap();
    let u = CurrentVector::unlifted(
        (0..modes).map(|j| counter_rng::normal_at(0xAC4, trial, 50 + j as u64)).collect(),
    );
    let v = CurrentVector::unlifted(
        (0..modes).map(|j| counter_rng::normal_at(0xAC4, trial, 70 + j as u64)).collect(),
    );
    (model, u, v)
}

/// The Monte Carlo half of criterion 4, shared with the reproducibility
/// gate: estimate the endpoint covariance through realized process
/// increments.
fn criterion_4_mc_estimate(samples: u64, seed: u64) -> (C64, f64, f64) {
    let model = SpectralModel::new(vec![0.8, -1.7, 2.4], 1, 1.3, Regulator::Infinite).unwrap();
    let times = vec![0.0, 0.5, 1.0];
    let u_amp = [1.0, 0.4, -0.3];
    let v_amp = [-0.2, 1.1, 0.6];
    let pu = CurrentPath::from_profile(0, times.clone(), &u_amp, |t| t).unwrap();
    let pv = CurrentPath::from_profile(0, times, &v_amp, |t| t).unwrap();
    let values: Vec<C64> = (0..samples)
        .map(|s| {
            let g: Vec<f64> = (0..3).map(|j| counter_rng::normal_at(seed, s, j)).collect();
            let du = gaussian::realize_process(&model, &pu, &g, true).unwrap();
            let dv = gaussian::realize_process(&model, &pv, &g, true).unwrap();
            du.iter().sum::<C64>() * dv.iter().sum::<C64>()
        })
        .collect();
    batch_se(&values)
}

#[test]
fn criterion_4_covariance_identity() {
    let start = Instant::now();
    // Route agreement on 1000 random models at 1e-12 absolute: both sums
    // have O(10) magnitude at most, so this allows ~1e3 ulps of drift.
    for trial in 0..1000u64 {
        let (model, u, v) = random_limit_model(trial);
        let r = rk_coefficients(&model);
        let mut scaled = Complex64::new(0.0, 0.0);
        let mut inverse = Complex64::new(0.0, 0.0);
        for j in 0..model.modes() {
            let uv = u.coeffs()[j] * v.coeffs()[j];
            scaled += r[j] * r[j] * uv / model.p_factor(j);
            inverse += Complex64::new(0.0, 1.0 / (2.0 * model.level())) * uv
                / model.eigenvalues()[j];
        }
        assert!(
            (scaled - inverse).norm() < 1e-12,
            "trial {trial}: {scaled} vs {inverse}"
        );
        // The library's own dual-route check must agree as well.
        let lib = covariance_rk(&model, &u, &v).unwrap();
        assert!((lib - inverse).norm() < 1e-12);
    }

    // MC through realized increments at 1e5 samples within 4 SE.
    let exact = {
        let model = SpectralModel::new(vec![0.8, -1.7, 2.4], 1, 1.3, Regulator::Infinite).unwrap();
        covariance_rk(
            &model,
            &CurrentVector::unlifted(vec![1.0, 0.4, -0.3]),
            &CurrentVector::unlifted(vec![-0.2, 1.1, 0.6]),
        )
        .unwrap()
    };
    let (mean, se_re, se_im) = criterion_4_mc_estimate(100_000, 0xAC4_5EED);
    assert!(se_re > 0.0 && se_im > 0.0);
    assert!(
        (mean.re - exact.re).abs() < 4.0 * se_re,
        "re {} vs {} (se {se_re})",
        mean.re,
        exact.re
    );
    assert!(
        (mean.im - exact.im).abs() < 4.0 * se_im,
        "im {} vs {} (se {se_im})",
        mean.im,
        exact.im
    );
    assert!(start.elapsed().as_secs_f64() < 60.0, "runtime budget 60 s exceeded");
    println!("ACCEPTANCE 4: PASS");
}

/// One criterion-5 system and its two tested moments, shared with the
/// reproducibility gate.
fn criterion_5_system(which: u64) -> (GaussianSystem, [Vec<usize>; 2]) {
    // Random PSD covariance B B^T + I/2 (the ridge keeps variances O(1)).
    let dim = 4;
    let mut b = vec![vec![0.0; dim]; dim];
    for (i, row) in b.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = 0.6 * counter_rng::normal_at(0xAC5, which, (i * dim + j) as u64);
        }
    }
    let cov: Vec<Vec<f64>> = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| {
                    let dot: f64 = (0..dim).map(|m| b[i][m] * b[j][m]).sum();
                    dot + if i == j { 0.5 } else { 0.0 }
                })
                .collect()
        })
        .collect();
    let sys = GaussianSystem::new(&cov).unwrap();
    (sys, [vec![0, 1, 2, 3], vec![0, 0, 1, 1, 2, 3]])
}

fn criterion_5_estimates(samples: usize) -> Vec<McEstimate> {
    let mut out = Vec::new();
    for which in 0..3u64 {
        let (sys, moments) = criterion_5_system(which);
        for idx in &moments {
            out.push(gaussian::mc_moment(&sys, idx, samples, 0xAC5_0000 + which).unwrap());
        }
    }
    out
}

#[test]
fn criterion_5_wick_pairings() {
    let start = Instant::now();
    let estimates = criterion_5_estimates(1_000_000);
    let mut slot = 0;
    for which in 0..3u64 {
        let (sys, moments) = criterion_5_system(which);
        // E[X^4] = 3 sigma^4 holds bit-for-bit: (c^2 + c^2) + c^2 and
        // 3 * (c^2) round the same real number once, so the grouping on the
        // right must match.
        for i in 0..sys.dim() {
            let s2 = sys.covariance(i, i);
            assert_eq!(
                wilsonline::gaussian::wick_moment(&sys, &[i, i, i, i]).unwrap(),
                3.0 * (s2 * s2)
            );
        }
        // 4th and 6th moments vs MC at 1e6 samples within 4 SE.
        for idx in &moments {
            let exact = wilsonline::gaussian::wick_moment(&sys, idx).unwrap();
            let est = &estimates[slot];
            slot += 1;
            assert!(est.se_re > 0.0);
            assert!(
                (est.mean_re - exact).abs() < 4.0 * est.se_re,
                "system {which} {idx:?}: {} +/- {} vs {exact}",
                est.mean_re,
                est.se_re
            );
        }
    }
    assert!(start.elapsed().as_secs_f64() < 60.0, "runtime budget 60 s exceeded");
    println!("ACCEPTANCE 5: PASS");
}

fn random_anti_hermitian(dim: usize, scale: f64, tag: u64, trial: u64) -> CMat {
    let x = CMat::from_fn(dim, dim, |i, j| {
        Complex64::new(
            counter_rng::normal_at(tag, trial, (2 * (i * dim + j)) as u64),
            counter_rng::normal_at(tag, trial, (2 * (i * dim + j) + 1) as u64),
        )
    });
    x.sub(&x.dagger()).scale_re(0.5 * scale)
}

#[test]
fn criterion_6_holonomy_engine() {
    let start = Instant::now();
    // Constant connection: the product of interval exponentials of A/n
    // telescopes to exp(A); 1e-10 covers accumulated rounding over 64
    // multiplications.
    let a = random_anti_hermitian(3, 0.8, 0xAC6, 0);
    let n = 64;
    let times: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
    let increments: Vec<CMat> = (0..n).map(|_| a.scale_re(1.0 / n as f64)).collect();
    let path = DrivingPath::new(times, Some(increments), None).unwrap();
    let product = holonomy_full(&path);
    let direct = a.expm();
    assert!(product.sub(&direct).max_abs() < 1e-10);

    // Unitarity over 100 random paths with both increment streams
    // anti-Hermitian: the exact holonomy is unitary; 1e-10 is ~1e4 ulps
    // across up to 20 interval factors.
    for trial in 0..100u64 {
        let dim = 2 + (trial % 3) as usize;
        let intervals = 8 + (trial % 13) as usize;
        let times: Vec<f64> = (0..=intervals).map(|i| i as f64 / intervals as f64).collect();
        let det: Vec<CMat> = (0..intervals)
            .map(|i| random_anti_hermitian(dim, 0.3 / intervals as f64, 0xAC6_0D, trial * 97 + i as u64))
            .collect();
        let sto: Vec<CMat> = (0..intervals)
            .map(|i| random_anti_hermitian(dim, 0.5 / intervals as f64, 0xAC6_05, trial * 101 + i as u64))
            .collect();
        let path = DrivingPath::new(times, Some(det), Some(sto)).unwrap();
        let w = holonomy_full(&path);
        assert!(w.unitarity_defect() <= 1e-10, "trial {trial}: defect {}", w.unitarity_defect());
    }

    // Grading invariant: slices of the u-scaled path equal u^m times the
    // original slices (exact at u = 2^-j, tolerance 1e-12), and the graded
    // sum reproduces the full holonomy trace within the scaled path's own
    // tail bound.
    let dim = 3;
    let intervals = 12;
    let times: Vec<f64> = (0..=intervals).map(|i| i as f64 / intervals as f64).collect();
    let det: Vec<CMat> =
        (0..intervals).map(|i| random_anti_hermitian(dim, 0.06, 0xAC6_77, 7 + i as u64)).collect();
    let sto: Vec<CMat> =
        (0..intervals).map(|i| random_anti_hermitian(dim, 0.08, 0xAC6_78, 11 + i as u64)).collect();
    let path = DrivingPath::new(times.clone(), Some(det), Some(sto)).unwrap();
    let order = 6;
    let graded = holonomy_graded(&path, order).unwrap();
    for u in [0.5, 0.25] {
        let scaled_path = path.scaled_stochastic(u);
        let graded_scaled = holonomy_graded(&scaled_path, order).unwrap();
        let mut u_pow = 1.0;
        for m in 0..=order {
            let expect = graded.slice(m).scale_re(u_pow);
            assert!(
                graded_scaled.slice(m).sub(&expect).max_abs() < 1e-12,
                "u {u} grade {m}"
            );
            u_pow *= u;
        }
        let full = holonomy_full(&scaled_path);
        let gap = (full.trace() - graded_scaled.sum().trace()).norm();
        let tail = graded_scaled.truncation_tail_bound();
        assert!(gap <= tail, "u {u}: trace gap {gap} vs tail bound {tail}");
    }

    assert!(start.elapsed().as_secs_f64() < 10.0, "runtime budget 10 s exceeded");
    println!("ACCEPTANCE 6: PASS");
}

#[test]
fn criterion_7_decay_of_scaled_remainders() {
    let start = Instant::now();
    // k^{N/2} |closed - partial| across three decades of level must not
    // grow: staying within a factor 2 of the first level certifies the
    // O(k^{-N/2}) decay. (At N = 2 the first omitted term has vanishing
    // su(2) weight, so the scaled remainder decays outright instead of
    // plateauing; non-growth covers both behaviors honestly.)
    let levels = [10.0, 100.0, 1000.0];
    for linking in [1.0, 2.0] {
        for grade in [2usize, 4, 6] {
            let scaled = expansion::decay_check(linking, &levels, grade).unwrap();
            for (i, s) in scaled.iter().enumerate() {
                assert!(
                    *s <= 2.0 * scaled[0] + 1e-12,
                    "L {linking} grade {grade} level {}: {s} vs first {}",
                    levels[i],
                    scaled[0]
                );
            }
        }
    }
    assert!(start.elapsed().as_secs_f64() < 1.0, "runtime budget 1 s exceeded");
    println!("ACCEPTANCE 7: PASS");
}

fn criterion_8_estimate(samples: usize) -> McEstimate {
    let cfg = gaussian::two_loop_unit_linking(5.0, 16).unwrap();
    let basis = RepBasis::su2();
    gaussian::mc_wilson(&cfg.model, &basis, &cfg.loops, 4, samples, 0xAC8_5EED).unwrap()
}

#[test]
fn criterion_8_end_to_end_two_loop_mc() {
    let start = Instant::now();
    // Order-4 estimator at k = 5, unit cross-pairing: the truncation's
    // expectation is the grouped partial sum through n = 2, i.e.
    // 4 - 3 L^2 / (8 k^2) = 3.985, with no grid bias (profile increments
    // telescope); 4 batch-means SE is the agreed statistical gate.
    let est = criterion_8_estimate(100_000);
    let series = expansion::series_su2(1.0, 5.0, 3).unwrap();
    let target: C64 = series.iter().sum();
    assert!((target.re - 3.985).abs() < 1e-12 && target.im == 0.0);
    assert!(est.se_re > 0.0 && est.se_im > 0.0);
    assert!(
        (est.mean_re - target.re).abs() < 4.0 * est.se_re,
        "re {} +/- {} vs {}",
        est.mean_re,
        est.se_re,
        target.re
    );
    assert!(
        (est.mean_im - target.im).abs() < 4.0 * est.se_im,
        "im {} +/- {} vs {}",
        est.mean_im,
        est.se_im,
        target.im
    );
    assert!(start.elapsed().as_secs_f64() < 600.0, "runtime budget 600 s exceeded");
    println!("ACCEPTANCE 8: PASS");
}

#[test]
fn criterion_9_reproducibility() {
    // Fixed seeds must make the reported estimates byte-identical across
    // reruns of the stochastic criteria (4, 5, and 8). Sample counts are
    // reduced against the accuracy runs: bitwise equality is about the
    // evaluation pipeline, not statistics.
    let (m1, r1, i1) = criterion_4_mc_estimate(20_000, 0xAC4_5EED);
    let (m2, r2, i2) = criterion_4_mc_estimate(20_000, 0xAC4_5EED);
    assert_eq!(m1.re.to_bits(), m2.re.to_bits());
    assert_eq!(m1.im.to_bits(), m2.im.to_bits());
    assert_eq!(r1.to_bits(), r2.to_bits());
    assert_eq!(i1.to_bits(), i2.to_bits());

    let a = criterion_5_estimates(100_000);
    let b = criterion_5_estimates(100_000);
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.mean_re.to_bits(), y.mean_re.to_bits());
        assert_eq!(x.se_re.to_bits(), y.se_re.to_bits());
    }

    let x = criterion_8_estimate(20_000);
    let y = criterion_8_estimate(20_000);
    assert_eq!(x.mean_re.to_bits(), y.mean_re.to_bits());
    assert_eq!(x.mean_im.to_bits(), y.mean_im.to_bits());
    assert_eq!(x.se_re.to_bits(), y.se_re.to_bits());
    assert_eq!(x.se_im.to_bits(), y.se_im.to_bits());
    assert_eq!(x.tail_bound.to_bits(), y.tail_bound.to_bits());
    println!("ACCEPTANCE 9: PASS");
}
