//! Truncated spectral model of the quadratic form and its complex
//! rescaling. This module is the single place where the analytic
//! conventions are frozen; everything downstream (process realization,
//! Monte Carlo, the two-loop series) refers back to them.
//!
//! **Spectrum.** The model operator `Q` is diagonal on an orthonormal L2
//! family `e_1, ..., e_J` with nonzero real eigenvalues `lambda_j`. A vector
//! `u` is stored by its L2 coefficients `u_j = (u, e_j)`; the spectral gap
//! is `rho = min_j |lambda_j| > 0`.
//!
//! **Weighted inner product.** For a weight exponent `p >= 0`,
//!
//! ```text
//! (u, v)_p = sum_j (1 + lambda_j^2)^p u_j v_j,
//! ```
//!
//! so `h_j = (1 + lambda_j^2)^(-p/2) e_j` is an orthonormal family for
//! `(.,.)_p`. The Gaussian field of the model has iid standard normal
//! coordinates `<x, h_j>`; pairing with any current is expanded over this
//! family, so `E[<x, a> <x, b>] = (a, b)_p`.
//!
//! **Dual lift.** Pairing data enters as unlifted L2 coefficients; the lift
//! `u~_j = (1 + lambda_j^2)^(-p) u_j` satisfies `(u~, v)_p = sum_j u_j v_j`
//! and is what the field is actually paired with: the process built from a
//! current with coefficients `C_j(t)` has weights
//! `w_j(t) = (C~(t), h_j)_p = (1 + lambda_j^2)^(-p/2) C_j(t)` before any
//! rescaling.
//!
//! **Complex rescaling.** The oscillatory reference measure at level
//! `k > 0` and regulator `n` rescales mode `j` by
//!
//! ```text
//! r_j = sqrt(n) (1 - 2 i n k mu_j)^(-1/2),        mu_j = (1 + lambda_j^2)^(-p) lambda_j,
//! r_j = (-2 i k mu_j)^(-1/2)                       at n = infinity,
//! ```
//!
//! with the square root on the branch `-pi/2 < arg sqrt(z) < pi/2`, which is
//! the principal branch for every argument that occurs here (all have
//! nonnegative real part). At `n = infinity`, `arg r_j = +/- pi/4` for
//! `lambda_j` positive/negative and `|r_j|^2 (1+lambda_j^2)^(-p) =
//! 1/(2 k |lambda_j|)`; at finite `n` the left side is strictly smaller.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cmat::C64;
use crate::error::{EngineError, Result};
use crate::quad;

/// The mode-count regulator `n`: a positive real or the limit point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Regulator {
    Finite(f64),
    Infinite,
}

impl Serialize for Regulator {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Regulator::Finite(x) => s.serialize_f64(*x),
            Regulator::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Regulator {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(Regulator::Finite(x)),
            Raw::Text(t) if t == "inf" => Ok(Regulator::Infinite),
            Raw::Text(t) => Err(D::Error::custom(format!(
                "regulator must be a number or \"inf\", got {t:?}"
            ))),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "SpectralModelFile", into = "SpectralModelFile")]
pub struct SpectralModel {
    eigenvalues: Vec<f64>,
    weight: u32,
    level: f64,
    regulator: Regulator,
}

#[derive(Serialize, Deserialize)]
struct SpectralModelFile {
    eigenvalues: Vec<f64>,
    p: u32,
    k: f64,
    n: Regulator,
}

impl TryFrom<SpectralModelFile> for SpectralModel {
    type Error = EngineError;
    fn try_from(f: SpectralModelFile) -> Result<Self> {
        SpectralModel::new(f.eigenvalues, f.p, f.k, f.n)
    }
}

impl From<SpectralModel> for SpectralModelFile {
    fn from(m: SpectralModel) -> Self {
        SpectralModelFile { eigenvalues: m.eigenvalues, p: m.weight, k: m.level, n: m.regulator }
    }
}

impl SpectralModel {
    pub fn new(eigenvalues: Vec<f64>, weight: u32, level: f64, regulator: Regulator) -> Result<Self> {
        if eigenvalues.is_empty() {
            return Err(EngineError::Validation("spectrum must be nonempty".into()));
        }
        for (j, l) in eigenvalues.iter().enumerate() {
            if !l.is_finite() || *l == 0.0 {
                return Err(EngineError::Validation(format!(
                    "eigenvalue {j} is {l}; eigenvalues must be finite and nonzero"
                )));
            }
        }
        if !(level > 0.0) || !level.is_finite() {
            return Err(EngineError::Validation(format!("level k must be positive, got {level}")));
        }
        if let Regulator::Finite(n) = regulator {
            if !(n > 0.0) || !n.is_finite() {
                return Err(EngineError::Validation(format!(
                    "regulator n must be positive or \"inf\", got {n}"
                )));
            }
        }
        Ok(SpectralModel { eigenvalues, weight, level, regulator })
    }

    /// Spectrum `{+1, -1, ..., +j_half, -j_half}`, sign-symmetric.
    pub fn symmetric_preset(j_half: usize, weight: u32, level: f64, regulator: Regulator) -> Result<Self> {
        if j_half == 0 {
            return Err(EngineError::Validation("symmetric preset needs at least one pair".into()));
        }
        let mut ev = Vec::with_capacity(2 * j_half);
        for m in 1..=j_half {
            ev.push(m as f64);
            ev.push(-(m as f64));
        }
        SpectralModel::new(ev, weight, level, regulator)
    }

    /// Spectrum `{1, ..., j}`, all positive.
    pub fn single_sign_preset(j: usize, weight: u32, level: f64, regulator: Regulator) -> Result<Self> {
        SpectralModel::new((1..=j).map(|m| m as f64).collect(), weight, level, regulator)
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn modes(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn regulator(&self) -> Regulator {
        self.regulator
    }

    /// Spectral gap `min_j |lambda_j|`.
    pub fn rho(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l.abs()).fold(f64::INFINITY, f64::min)
    }

    /// `(1 + lambda_j^2)^p`.
    #[inline]
    pub fn p_factor(&self, j: usize) -> f64 {
        let l = self.eigenvalues[j];
        (1.0 + l * l).powi(self.weight as i32)
    }

    /// Weighted eigenvalue `mu_j = (1 + lambda_j^2)^(-p) lambda_j`.
    #[inline]
    pub fn mu(&self, j: usize) -> f64 {
        self.eigenvalues[j] / self.p_factor(j)
    }

    /// Summability diagnostic `sum_j (1 + lambda_j^2)^(-p) |lambda_j|`: the
    /// truncated stand-in for the trace-norm condition on the weighted
    /// operator.
    pub fn summability(&self) -> f64 {
        (0..self.modes()).map(|j| self.mu(j).abs()).sum()
    }
}

/// Coefficient vector of a current in the model's eigenbasis, tagged by
/// whether the dual lift has been applied.
#[derive(Clone, Debug, PartialEq)]
pub struct CurrentVector {
    coeffs: Vec<f64>,
    lifted: bool,
}

impl CurrentVector {
    /// Plain L2 coefficients, not yet lifted.
    pub fn unlifted(coeffs: Vec<f64>) -> Self {
        CurrentVector { coeffs, lifted: false }
    }

    pub fn basis_vector(dim: usize, j: usize) -> Self {
        let mut c = vec![0.0; dim];
        c[j] = 1.0;
        CurrentVector::unlifted(c)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_lifted(&self) -> bool {
        self.lifted
    }
}

fn check_unlifted(model: &SpectralModel, u: &CurrentVector, role: &str) -> Result<()> {
    if u.lifted {
        return Err(EngineError::Domain(format!(
            "{role} is already lifted; this operation expects plain L2 coefficients"
        )));
    }
    if u.dim() != model.modes() {
        return Err(EngineError::Validation(format!(
            "{role} has {} coefficients for a {}-mode model",
            u.dim(),
            model.modes()
        )));
    }
    Ok(())
}

/// Weighted inner product `(u, v)_p = sum_j (1 + lambda_j^2)^p u_j v_j` of
/// two unlifted coefficient vectors.
pub fn inner_p(model: &SpectralModel, u: &CurrentVector, v: &CurrentVector) -> Result<f64> {
    check_unlifted(model, u, "first argument")?;
    check_unlifted(model, v, "second argument")?;
    Ok((0..model.modes())
        .map(|j| model.p_factor(j) * u.coeffs[j] * v.coeffs[j])
        .sum())
}

/// Dual lift `u~_j = (1 + lambda_j^2)^(-p) u_j`, marked as lifted.
pub fn dual_lift(model: &SpectralModel, u: &CurrentVector) -> Result<CurrentVector> {
    check_unlifted(model, u, "argument")?;
    let coeffs = (0..model.modes()).map(|j| u.coeffs[j] / model.p_factor(j)).collect();
    Ok(CurrentVector { coeffs, lifted: true })
}

/// Per-mode rescaling coefficients `r_j` (see the module docs for the
/// formula and branch). All occurring square-root arguments have
/// nonnegative real part, so the principal branch is the stated one.
pub fn rk_coefficients(model: &SpectralModel) -> Vec<C64> {
    (0..model.modes())
        .map(|j| {
            let mu = model.mu(j);
            match model.regulator {
                Regulator::Finite(n) => {
                    let z = Complex64::new(1.0, -2.0 * n * model.level * mu);
                    n.sqrt() / z.sqrt()
                }
                Regulator::Infinite => {
                    let z = Complex64::new(0.0, -2.0 * model.level * mu);
                    1.0 / z.sqrt()
                }
            }
        })
        .collect()
}

/// Closed-form Fresnel normalizer at finite regulator,
///
/// ```text
/// Z = prod_j (1 - 2 i n k mu_j)^(-1/2),
/// ```
///
/// each factor on the principal branch. At `n = infinity` the product
/// diverges pointwise (the limit exists only after pairing with
/// observables), so that case is refused.
pub fn z_normalizer(model: &SpectralModel) -> Result<C64> {
    let n = match model.regulator {
        Regulator::Infinite => {
            return Err(EngineError::Domain(
                "the normalizer has no finite value at n = inf; evaluate at a finite regulator"
                    .into(),
            ));
        }
        Regulator::Finite(n) => n,
    };
    let mut z = Complex64::new(1.0, 0.0);
    for j in 0..model.modes() {
        let factor = Complex64::new(1.0, -2.0 * n * model.level * model.mu(j));
        z /= factor.sqrt();
    }
    Ok(z)
}

/// Slow quadrature route to the normalizer: one oscillatory Gaussian
/// integral per mode. Used as an oracle against `z_normalizer`.
pub fn z_normalizer_quadrature(model: &SpectralModel) -> Result<C64> {
    let n = match model.regulator {
        Regulator::Infinite => {
            return Err(EngineError::Domain(
                "the normalizer has no finite value at n = inf; evaluate at a finite regulator"
                    .into(),
            ));
        }
        Regulator::Finite(n) => n,
    };
    let mut z = Complex64::new(1.0, 0.0);
    for j in 0..model.modes() {
        z *= quad::gaussian_chirp_integral(2.0 * n * model.level * model.mu(j));
    }
    Ok(z)
}

/// The quadratic action evaluated on explicit field coordinates
/// `x_j = <x, h_j>`:
///
/// ```text
/// S(x) = sum_j (1 + lambda_j^2)^(-p) lambda_j x_j^2.
/// ```
pub fn cs_form(model: &SpectralModel, coords: &[f64]) -> Result<f64> {
    if coords.len() != model.modes() {
        return Err(EngineError::Validation(format!(
            "coordinate vector has {} entries for a {}-mode model",
            coords.len(),
            model.modes()
        )));
    }
    Ok((0..model.modes()).map(|j| model.mu(j) * coords[j] * coords[j]).sum())
}

/// Covariance of the rescaled field paired with two unlifted currents, at
/// `n = infinity`, computed by two independent routes:
///
/// ```text
/// (i)   sum_j r_j^2 (1 + lambda_j^2)^(-p) u_j v_j
/// (ii)  -(1 / 2 i k) sum_j u_j v_j / lambda_j
/// ```
///
/// The routes are asserted to agree within 1e-10; route (ii), the inverse
/// quadratic form, is returned.
pub fn covariance_rk(model: &SpectralModel, u: &CurrentVector, v: &CurrentVector) -> Result<C64> {
    if model.regulator != Regulator::Infinite {
        return Err(EngineError::Validation(
            "covariance_rk is defined at n = inf; build the model with regulator \"inf\"".into(),
        ));
    }
    check_unlifted(model, u, "first argument")?;
    check_unlifted(model, v, "second argument")?;
    let r = rk_coefficients(model);
    let mut route_scaled = Complex64::new(0.0, 0.0);
    let mut route_inverse = Complex64::new(0.0, 0.0);
    for j in 0..model.modes() {
        let uv = u.coeffs[j] * v.coeffs[j];
        route_scaled += r[j] * r[j] * uv / model.p_factor(j);
        // -1/(2ik) = i/(2k)
        route_inverse += Complex64::new(0.0, 1.0 / (2.0 * model.level)) * uv / model.eigenvalues[j];
    }
    let gap = (route_scaled - route_inverse).norm();
    if gap > 1e-10 {
        return Err(EngineError::InvariantViolation(format!(
            "covariance routes disagree by {gap:.3e}: rescaled {route_scaled} vs inverse form {route_inverse}"
        )));
    }
    Ok(route_inverse)
}

/// Time-indexed unlifted coefficient vectors along one Lie direction.
#[derive(Clone, Debug)]
pub struct CurrentPath {
    lie_index: usize,
    times: Vec<f64>,
    values: Vec<CurrentVector>,
}

impl CurrentPath {
    pub fn new(lie_index: usize, times: Vec<f64>, values: Vec<CurrentVector>) -> Result<Self> {
        if times.len() < 2 {
            return Err(EngineError::Validation("current path needs at least two grid times".into()));
        }
        if times[0].abs() > 1e-12 || (times[times.len() - 1] - 1.0).abs() > 1e-12 {
            return Err(EngineError::Validation(format!(
                "current path grid must run from 0 to 1, got [{}, {}]",
                times[0],
                times[times.len() - 1]
            )));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(EngineError::Validation("current path times must be strictly increasing".into()));
        }
        if values.len() != times.len() {
            return Err(EngineError::Validation(format!(
                "current path has {} values for {} times",
                values.len(),
                times.len()
            )));
        }
        let dim = values[0].dim();
        for (i, v) in values.iter().enumerate() {
            if v.is_lifted() {
                return Err(EngineError::Validation(format!(
                    "current path value {i} is lifted; store plain L2 coefficients"
                )));
            }
            if v.dim() != dim {
                return Err(EngineError::Validation(format!(
                    "current path value {i} has {} coefficients, expected {dim}",
                    v.dim()
                )));
            }
        }
        Ok(CurrentPath { lie_index, times, values })
    }

    /// Separable path `C_j(t) = amplitudes_j * profile(t)`.
    pub fn from_profile(
        lie_index: usize,
        times: Vec<f64>,
        amplitudes: &[f64],
        profile: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let values = times
            .iter()
            .map(|&t| {
                let s = profile(t);
                CurrentVector::unlifted(amplitudes.iter().map(|a| a * s).collect())
            })
            .collect();
        CurrentPath::new(lie_index, times, values)
    }

    /// Identically zero path on a uniform grid.
    pub fn zero(lie_index: usize, dim: usize, intervals: usize) -> Self {
        let times = (0..=intervals).map(|i| i as f64 / intervals as f64).collect();
        let values = (0..=intervals).map(|_| CurrentVector::unlifted(vec![0.0; dim])).collect();
        CurrentPath::new(lie_index, times, values).expect("zero path is valid")
    }

    pub fn lie_index(&self) -> usize {
        self.lie_index
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn intervals(&self) -> usize {
        self.times.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.values[0].dim()
    }

    pub fn value(&self, i: usize) -> &CurrentVector {
        &self.values[i]
    }

    /// Largest per-coefficient difference quotient over the grid, a proxy
    /// for the Lipschitz constant of the underlying current.
    pub fn max_difference_quotient(&self) -> f64 {
        let mut best = 0.0f64;
        for i in 0..self.intervals() {
            let dt = self.times[i + 1] - self.times[i];
            for j in 0..self.dim() {
                best = best.max((self.values[i + 1].coeffs[j] - self.values[i].coeffs[j]).abs() / dt);
            }
        }
        best
    }
}
