//! Finite-dimensional Gaussian calculus and the Monte Carlo estimator for
//! traced holonomy products.
//!
//! Sampling is counter-based throughout: coordinate `i` of sample `s` is a
//! pure function of `(seed, s, i)`, so estimates are bitwise reproducible
//! for a fixed seed regardless of thread count or evaluation order.
//! Sample aggregation uses pairwise tree reduction in sample order, which
//! fixes the floating-point summation tree independently of threading.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cmat::{C64, CMat};
use crate::counter_rng;
use crate::error::{EngineError, Result};
use crate::lie_rep::RepBasis;
use crate::signature::{holonomy_graded, wilson_slices, DrivingPath};
use crate::spectral::{rk_coefficients, CurrentPath, SpectralModel};

/// Centered Gaussian vector with a given real covariance matrix.
///
/// Construction validates symmetry and positive semidefiniteness, then
/// stores a factor `A` with `A A^T = cov`; samples are `A z` for iid
/// standard normal `z`.
#[derive(Clone, Debug)]
pub struct GaussianSystem {
    dim: usize,
    cov: Vec<f64>,
    factor: Vec<f64>,
}

impl GaussianSystem {
    pub fn new(cov: &[Vec<f64>]) -> Result<Self> {
        let dim = cov.len();
        if dim == 0 {
            return Err(EngineError::Validation("covariance matrix must be nonempty".into()));
        }
        let mut flat = vec![0.0; dim * dim];
        let mut scale = 0.0f64;
        for (i, row) in cov.iter().enumerate() {
            if row.len() != dim {
                return Err(EngineError::Validation(format!(
                    "covariance row {i} has {} entries, expected {dim}",
                    row.len()
                )));
            }
            for (j, &x) in row.iter().enumerate() {
                if !x.is_finite() {
                    return Err(EngineError::Validation(format!(
                        "covariance entry ({i}, {j}) is {x}"
                    )));
                }
                flat[i * dim + j] = x;
                scale = scale.max(x.abs());
            }
        }
        let sym_tol = 1e-12 * scale.max(1.0);
        for i in 0..dim {
            for j in (i + 1)..dim {
                if (flat[i * dim + j] - flat[j * dim + i]).abs() > sym_tol {
                    return Err(EngineError::Validation(format!(
                        "covariance is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        let cmat = CMat::from_fn(dim, dim, |i, j| {
            // Symmetrize so the eigensolver sees an exactly Hermitian input.
            Complex64::new(0.5 * (flat[i * dim + j] + flat[j * dim + i]), 0.0)
        });
        let (eigs, vecs) = cmat.hermitian_eigen();
        let eig_tol = 1e-10 * scale.max(1.0);
        if let Some(min) = eigs.first() {
            if *min < -eig_tol {
                return Err(EngineError::Validation(format!(
                    "covariance has negative eigenvalue {min:.6e}; not positive semidefinite"
                )));
            }
        }
        // A = V sqrt(max(Lambda, 0)); the input is real symmetric, so the
        // rotations are real and the factor's imaginary part vanishes.
        let mut factor = vec![0.0; dim * dim];
        for i in 0..dim {
            for (j, eig) in eigs.iter().enumerate() {
                let root = eig.max(0.0).sqrt();
                let entry = vecs.at(i, j) * root;
                if entry.im.abs() > 1e-9 * scale.max(1.0) {
                    return Err(EngineError::InvariantViolation(format!(
                        "factor of a real covariance came out complex at ({i}, {j})"
                    )));
                }
                factor[i * dim + j] = entry.re;
            }
        }
        // Defense in depth: the factor must reproduce the covariance.
        for i in 0..dim {
            for j in 0..dim {
                let got: f64 = (0..dim).map(|m| factor[i * dim + m] * factor[j * dim + m]).sum();
                if (got - 0.5 * (flat[i * dim + j] + flat[j * dim + i])).abs() > 1e-8 * scale.max(1.0) {
                    return Err(EngineError::InvariantViolation(format!(
                        "covariance factor check failed at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(GaussianSystem { dim, cov: flat, factor })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn covariance(&self, i: usize, j: usize) -> f64 {
        self.cov[i * self.dim + j]
    }

    /// Sample `index` under `seed`: `A z` with counter-based `z`.
    pub fn sample(&self, seed: u64, index: u64) -> Vec<f64> {
        let z: Vec<f64> =
            (0..self.dim).map(|i| counter_rng::normal_at(seed, index, i as u64)).collect();
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.factor[i * self.dim + j] * z[j]).sum())
            .collect()
    }
}

/// Moment `E[x_{i_1} ... x_{i_m}]` of a centered Gaussian vector by the
/// pairing formula: the sum over perfect matchings of products of
/// covariances. Odd-length index lists have moment exactly `0.0`.
pub fn wick_moment(system: &GaussianSystem, indices: &[usize]) -> Result<f64> {
    for &i in indices {
        if i >= system.dim() {
            return Err(EngineError::Validation(format!(
                "moment index {i} out of range for dimension {}",
                system.dim()
            )));
        }
    }
    if indices.len() % 2 == 1 {
        return Ok(0.0);
    }
    fn pair_sum(system: &GaussianSystem, rest: &[usize]) -> f64 {
        if rest.is_empty() {
            return 1.0;
        }
        let first = rest[0];
        let mut total = 0.0;
        for m in 1..rest.len() {
            let mut remaining = Vec::with_capacity(rest.len() - 2);
            remaining.extend_from_slice(&rest[1..m]);
            remaining.extend_from_slice(&rest[m + 1..]);
            total += system.covariance(first, rest[m]) * pair_sum(system, &remaining);
        }
        total
    }
    Ok(pair_sum(system, indices))
}

/// Monte Carlo estimate with batch-means standard errors.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean_re: f64,
    pub mean_im: f64,
    pub se_re: f64,
    pub se_im: f64,
    pub samples: usize,
    pub batches: usize,
    /// Mean over samples of the per-loop truncation tail bounds, summed
    /// over loops (zero for plain moment estimates).
    pub tail_bound: f64,
}

impl McEstimate {
    pub fn mean(&self) -> C64 {
        Complex64::new(self.mean_re, self.mean_im)
    }
}

/// Deterministic pairwise sum of complex values in slice order.
fn tree_sum_c(v: &[C64]) -> C64 {
    match v.len() {
        0 => Complex64::new(0.0, 0.0),
        1 => v[0],
        n => {
            let (a, b) = v.split_at(n / 2);
            tree_sum_c(a) + tree_sum_c(b)
        }
    }
}

const BATCHES: usize = 32;

/// Batch-means statistics: split the ordered sample values into up to 32
/// consecutive batches and report the spread of batch means.
fn batch_stats(values: &[C64]) -> McEstimate {
    let n = values.len();
    let mean = tree_sum_c(values) / n as f64;
    let batches = BATCHES.min(n);
    let (se_re, se_im) = if batches < 2 {
        (0.0, 0.0)
    } else {
        let base = n / batches;
        let rem = n % batches;
        let mut means = Vec::with_capacity(batches);
        let mut start = 0;
        for b in 0..batches {
            let len = base + usize::from(b < rem);
            means.push(tree_sum_c(&values[start..start + len]) / len as f64);
            start += len;
        }
        let bmean = tree_sum_c(&means) / batches as f64;
        let var_re: f64 =
            means.iter().map(|m| (m.re - bmean.re).powi(2)).sum::<f64>() / (batches - 1) as f64;
        let var_im: f64 =
            means.iter().map(|m| (m.im - bmean.im).powi(2)).sum::<f64>() / (batches - 1) as f64;
        ((var_re / batches as f64).sqrt(), (var_im / batches as f64).sqrt())
    };
    McEstimate {
        mean_re: mean.re,
        mean_im: mean.im,
        se_re,
        se_im,
        samples: n,
        batches,
        tail_bound: 0.0,
    }
}

/// Monte Carlo check of a Gaussian moment, for comparison with
/// [`wick_moment`].
pub fn mc_moment(system: &GaussianSystem, indices: &[usize], samples: usize, seed: u64) -> Result<McEstimate> {
    if samples == 0 {
        return Err(EngineError::Validation("need at least one sample".into()));
    }
    for &i in indices {
        if i >= system.dim() {
            return Err(EngineError::Validation(format!(
                "moment index {i} out of range for dimension {}",
                system.dim()
            )));
        }
    }
    let values: Vec<C64> = (0..samples)
        .map(|s| {
            let x = system.sample(seed, s as u64);
            let prod: f64 = indices.iter().map(|&i| x[i]).product();
            Complex64::new(prod, 0.0)
        })
        .collect();
    Ok(batch_stats(&values))
}

/// Per-interval complex increments of the spectral process driven by one
/// current path, evaluated on explicit mode coordinates `g_j = <x, h_j>`:
///
/// ```text
/// P(t) = sum_j (1 + lambda_j^2)^(-p/2) [r_j] C_j(t) g_j,
/// ```
///
/// with the rescaling coefficient `r_j` included when `rescaled` is set.
pub fn realize_process(
    model: &SpectralModel,
    path: &CurrentPath,
    mode_coords: &[f64],
    rescaled: bool,
) -> Result<Vec<C64>> {
    if path.dim() != model.modes() {
        return Err(EngineError::Validation(format!(
            "current path has {} modes, model has {}",
            path.dim(),
            model.modes()
        )));
    }
    if mode_coords.len() != model.modes() {
        return Err(EngineError::Validation(format!(
            "got {} mode coordinates for a {}-mode model",
            mode_coords.len(),
            model.modes()
        )));
    }
    let r = if rescaled { rk_coefficients(model) } else { Vec::new() };
    let weights: Vec<C64> = (0..model.modes())
        .map(|j| {
            let w = mode_coords[j] / model.p_factor(j).sqrt();
            if rescaled { r[j] * w } else { Complex64::new(w, 0.0) }
        })
        .collect();
    let point = |i: usize| -> C64 {
        let c = path.value(i).coeffs();
        (0..model.modes()).map(|j| weights[j] * c[j]).sum()
    };
    Ok((0..path.intervals()).map(|i| point(i + 1) - point(i)).collect())
}

fn check_loop_paths(
    model: &SpectralModel,
    basis: &RepBasis,
    loops: &[Vec<CurrentPath>],
) -> Result<()> {
    if loops.is_empty() {
        return Err(EngineError::Validation("need at least one loop".into()));
    }
    for (l, paths) in loops.iter().enumerate() {
        if paths.is_empty() {
            return Err(EngineError::Validation(format!("loop {l} has no current paths")));
        }
        let times = paths[0].times();
        let mut seen = vec![false; basis.dim_algebra()];
        for path in paths {
            if path.lie_index() >= basis.dim_algebra() {
                return Err(EngineError::Validation(format!(
                    "loop {l} uses Lie index {} but the basis has {} generators",
                    path.lie_index(),
                    basis.dim_algebra()
                )));
            }
            if seen[path.lie_index()] {
                return Err(EngineError::Validation(format!(
                    "loop {l} has two current paths for Lie index {}",
                    path.lie_index()
                )));
            }
            seen[path.lie_index()] = true;
            if path.dim() != model.modes() {
                return Err(EngineError::Validation(format!(
                    "loop {l} current has {} modes, model has {}",
                    path.dim(),
                    model.modes()
                )));
            }
            if path.times() != times {
                return Err(EngineError::Validation(format!(
                    "all current paths of loop {l} must share one time grid"
                )));
            }
        }
    }
    Ok(())
}

/// Monte Carlo estimate of the expected product of loop traces
/// `E[prod_l Tr W_l]`, truncated at total grade `order`.
///
/// One Gaussian field drives every loop: the mode coordinates `g_j^(alpha)`
/// are shared across loops within a sample, so cross-loop covariances are
/// realized exactly. Per sample, each loop's stochastic driver is
/// `dS_i = sum_alpha dP_i^(alpha) E_alpha` on the loop's grid; the graded
/// holonomies are combined by total-grade truncation
/// `sum_{m <= order} F(m)` with `F(m)` the grade-`m` slice of the trace
/// product.
pub fn mc_wilson(
    model: &SpectralModel,
    basis: &RepBasis,
    loops: &[Vec<CurrentPath>],
    order: usize,
    samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    check_loop_paths(model, basis, loops)?;
    if samples == 0 {
        return Err(EngineError::Validation("need at least one sample".into()));
    }
    let modes = model.modes();
    let draw_seed = counter_rng::derive_seed(seed, 0x0057_494C_534F_4E31);
    let n_rep = basis.dim_rep();
    let per_sample = |s: u64| -> Result<(C64, f64)> {
        // Shared field: coordinates indexed alpha-major.
        let coords: Vec<f64> = (0..basis.dim_algebra() * modes)
            .map(|i| counter_rng::normal_at(draw_seed, s, i as u64))
            .collect();
        let mut holos = Vec::with_capacity(loops.len());
        let mut tail = 0.0;
        for paths in loops {
            let times = paths[0].times().to_vec();
            let intervals = times.len() - 1;
            let mut stochastic = vec![CMat::zeros(n_rep, n_rep); intervals];
            for path in paths {
                let alpha = path.lie_index();
                let inc = realize_process(
                    model,
                    path,
                    &coords[alpha * modes..(alpha + 1) * modes],
                    true,
                )?;
                for (i, dp) in inc.iter().enumerate() {
                    stochastic[i].add_assign(&basis.generators()[alpha].scale(*dp));
                }
            }
            let driving = DrivingPath::new(times, None, Some(stochastic))?;
            let holo = holonomy_graded(&driving, order)?;
            tail += holo.truncation_tail_bound();
            holos.push(holo);
        }
        let mut value = Complex64::new(0.0, 0.0);
        for m in 0..=order {
            value += wilson_slices(&holos, m)?;
        }
        Ok((value, tail))
    };
    let results: Vec<Result<(C64, f64)>> =
        (0..samples as u64).into_par_iter().map(per_sample).collect();
    let mut values = Vec::with_capacity(samples);
    let mut tails = Vec::with_capacity(samples);
    for r in results {
        let (v, t) = r?;
        values.push(v);
        tails.push(t);
    }
    let mut est = batch_stats(&values);
    est.tail_bound = crate::topology::tree_sum(&tails) / samples as f64;
    Ok(est)
}

/// A ready-made two-loop configuration with unit cross-linking and zero
/// self-linking.
#[derive(Clone, Debug)]
pub struct TwoLoopConfig {
    pub model: SpectralModel,
    pub loops: Vec<Vec<CurrentPath>>,
    /// Exact pairing value `sum_j u_j v_j / lambda_j` between the loops.
    pub linking: f64,
}

/// Two-mode model with spectrum `{+1, -1}`, weight 1, level `k`, no
/// regulator, and two loops whose currents have coefficients `(1, 1)` and
/// `(1/2, -1/2)` ramped by the smoothstep profile `t^2 (3 - 2t)` on a
/// uniform grid. The sign-balanced coefficients make both self-pairings
/// vanish identically while the cross pairing is exactly 1, so the
/// expected trace product depends only on the unit cross-linking.
pub fn two_loop_unit_linking(level: f64, intervals: usize) -> Result<TwoLoopConfig> {
    if intervals < 2 {
        return Err(EngineError::Validation("need at least two grid intervals".into()));
    }
    let model = SpectralModel::new(vec![1.0, -1.0], 1, level, crate::spectral::Regulator::Infinite)?;
    let times: Vec<f64> = (0..=intervals).map(|i| i as f64 / intervals as f64).collect();
    let smoothstep = |t: f64| t * t * (3.0 - 2.0 * t);
    let amplitudes = [[1.0, 1.0], [0.5, -0.5]];
    let mut loops = Vec::with_capacity(2);
    for amp in &amplitudes {
        let mut paths = Vec::with_capacity(3);
        for alpha in 0..3 {
            paths.push(CurrentPath::from_profile(alpha, times.clone(), amp, smoothstep)?);
        }
        loops.push(paths);
    }
    // sum_j u_j v_j / lambda_j = (1)(1/2)/1 + (1)(-1/2)/(-1) = 1 exactly.
    Ok(TwoLoopConfig { model, loops, linking: 1.0 })
}
