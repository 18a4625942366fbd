//! Product-integral holonomy of a two-stream driving path and its graded
//! truncation: slices, polynomial scaling, and the tail bound.
//!
//! Run with: cargo run --example holonomy_grading

use num_complex::Complex64;
use wilsonline::cmat::CMat;
use wilsonline::counter_rng;
use wilsonline::signature::{holonomy_full, holonomy_graded, wilson_slices, DrivingPath};

fn random_anti_hermitian(dim: usize, scale: f64, tag: u64, i: u64) -> CMat {
    let x = CMat::from_fn(dim, dim, |r, c| {
        Complex64::new(
            counter_rng::normal_at(tag, i, (2 * (r * dim + c)) as u64),
            counter_rng::normal_at(tag, i, (2 * (r * dim + c) + 1) as u64),
        )
    });
    x.sub(&x.dagger()).scale_re(0.5 * scale)
}

fn main() {
    let intervals = 10;
    let times: Vec<f64> = (0..=intervals).map(|i| i as f64 / intervals as f64).collect();
    let deterministic: Vec<CMat> =
        (0..intervals).map(|i| random_anti_hermitian(2, 0.10, 21, i as u64)).collect();
    let stochastic: Vec<CMat> =
        (0..intervals).map(|i| random_anti_hermitian(2, 0.15, 22, i as u64)).collect();
    let path = DrivingPath::new(times, Some(deterministic), Some(stochastic)).unwrap();
    let (tv_d, tv_s) = path.total_variations();
    println!("driving path: {} intervals, variations det {tv_d:.4} / sto {tv_s:.4}", path.intervals());

    let full = holonomy_full(&path);
    println!("full holonomy: unitarity defect {:.2e}, trace {:.6}", full.unitarity_defect(), full.trace());

    let order = 6;
    let graded = holonomy_graded(&path, order).unwrap();
    println!("\ngraded slices (trace per stochastic grade):");
    for (m, tr) in graded.trace_slices().iter().enumerate() {
        println!("  grade {m}: {:+.8} {:+.8}i", tr.re, tr.im);
    }
    let gap = (full.trace() - graded.sum().trace()).norm();
    println!("|Tr full - Tr graded sum| = {:.3e} <= tail bound {:.3e}", gap, graded.truncation_tail_bound());

    // Scaling the stochastic stream by u scales grade m by u^m.
    let u = 0.5;
    let scaled = holonomy_graded(&path.scaled_stochastic(u), order).unwrap();
    println!("\nslice scaling under u = {u}:");
    let mut u_pow = 1.0;
    for m in 0..=order {
        let drift = scaled.slice(m).sub(&graded.slice(m).scale_re(u_pow)).max_abs();
        println!("  grade {m}: |slice(u) - u^{m} slice| = {drift:.2e}");
        u_pow *= u;
    }

    // Product observable across two independent paths: grade slices of the
    // product of traces.
    let second = DrivingPath::new(
        (0..=8).map(|i| i as f64 / 8.0).collect(),
        None,
        Some((0..8).map(|i| random_anti_hermitian(2, 0.2, 23, i as u64)).collect()),
    )
    .unwrap();
    let pair = [graded, holonomy_graded(&second, order).unwrap()];
    println!("\ntrace-product slices for two loops:");
    for m in 0..=4 {
        let f = wilson_slices(&pair, m).unwrap();
        println!("  total grade {m}: {:+.8} {:+.8}i", f.re, f.im);
    }
}
