//! Holonomy of matrix-valued driving paths, full and graded.
//!
//! A driving path is a grid `0 = t_0 < ... < t_N = 1` with two streams of
//! square-matrix increments per interval, a deterministic one and a
//! stochastic one. Its holonomy is the product integral: the ordered product
//! of interval exponentials with later times on the left,
//!
//! ```text
//! W = exp(D_N + S_N) ... exp(D_2 + S_2) exp(D_1 + S_1).
//! ```
//!
//! The graded variant tracks how much of `W` comes from each power of the
//! stochastic stream: formally replace `S_i` by `eps S_i` with `eps`
//! nilpotent of order `R + 1`, so the product becomes a polynomial
//! `sum_i eps^i Z(i)` truncated at degree `R`. The discarded degrees are
//! controlled by the Taylor tail `sum_{r > R} (V_d + V_s)^r / r!` in the
//! entrywise-L1 total variations of the two streams.

use num_complex::Complex64;
use serde::Deserialize;

use crate::cmat::{C64, CMat};
use crate::error::{EngineError, Result};

#[derive(Clone, Debug)]
pub struct DrivingPath {
    times: Vec<f64>,
    deterministic: Vec<CMat>,
    stochastic: Vec<CMat>,
    dim: usize,
}

impl DrivingPath {
    /// Validates a grid and its increment streams. Either stream may be
    /// omitted and defaults to zero increments.
    pub fn new(
        times: Vec<f64>,
        deterministic: Option<Vec<CMat>>,
        stochastic: Option<Vec<CMat>>,
    ) -> Result<Self> {
        if times.len() < 2 {
            return Err(EngineError::Validation("driving path needs at least two grid times".into()));
        }
        if times[0].abs() > 1e-12 || (times[times.len() - 1] - 1.0).abs() > 1e-12 {
            return Err(EngineError::Validation(format!(
                "grid must run from 0 to 1, got [{}, {}]",
                times[0],
                times[times.len() - 1]
            )));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(EngineError::Validation("grid times must be strictly increasing".into()));
        }
        let n = times.len() - 1;
        let dim = deterministic
            .as_ref()
            .or(stochastic.as_ref())
            .and_then(|v| v.first())
            .map(|m| m.rows())
            .ok_or_else(|| {
                EngineError::Validation("driving path needs at least one increment stream".into())
            })?;
        let check = |name: &str, v: &Vec<CMat>| -> Result<()> {
            if v.len() != n {
                return Err(EngineError::Validation(format!(
                    "{name} stream has {} increments for {n} intervals",
                    v.len()
                )));
            }
            for (i, m) in v.iter().enumerate() {
                if !m.is_square() || m.rows() != dim {
                    return Err(EngineError::Validation(format!(
                        "{name} increment {i} is {}x{}, expected {dim}x{dim}",
                        m.rows(),
                        m.cols()
                    )));
                }
            }
            Ok(())
        };
        let zero_stream = || vec![CMat::zeros(dim, dim); n];
        let deterministic = match deterministic {
            Some(v) => {
                check("deterministic", &v)?;
                v
            }
            None => zero_stream(),
        };
        let stochastic = match stochastic {
            Some(v) => {
                check("stochastic", &v)?;
                v
            }
            None => zero_stream(),
        };
        Ok(DrivingPath { times, deterministic, stochastic, dim })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn intervals(&self) -> usize {
        self.times.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn deterministic(&self) -> &[CMat] {
        &self.deterministic
    }

    pub fn stochastic(&self) -> &[CMat] {
        &self.stochastic
    }

    /// Entrywise-L1 total variations of the two streams.
    pub fn total_variations(&self) -> (f64, f64) {
        let vd = self.deterministic.iter().map(|m| m.entry_l1_norm()).sum();
        let vs = self.stochastic.iter().map(|m| m.entry_l1_norm()).sum();
        (vd, vs)
    }

    /// The same path with the stochastic stream scaled by `u`.
    pub fn scaled_stochastic(&self, u: f64) -> Self {
        DrivingPath {
            times: self.times.clone(),
            deterministic: self.deterministic.clone(),
            stochastic: self.stochastic.iter().map(|m| m.scale_re(u)).collect(),
            dim: self.dim,
        }
    }
}

/// Full (ungraded) holonomy: ordered product of interval exponentials,
/// later intervals multiplying on the left.
pub fn holonomy_full(path: &DrivingPath) -> CMat {
    let mut w = CMat::identity(path.dim);
    for (d, s) in path.deterministic.iter().zip(&path.stochastic) {
        w = d.add(s).expm().matmul(&w);
    }
    w
}

/// Truncated polynomial in the grading parameter with matrix coefficients.
#[derive(Clone)]
struct MatPoly {
    coeffs: Vec<CMat>,
}

impl MatPoly {
    fn one(dim: usize, order: usize) -> Self {
        let mut coeffs = vec![CMat::zeros(dim, dim); order + 1];
        coeffs[0] = CMat::identity(dim);
        MatPoly { coeffs }
    }

    fn zero(dim: usize, order: usize) -> Self {
        MatPoly { coeffs: vec![CMat::zeros(dim, dim); order + 1] }
    }

    /// Truncated convolution product.
    fn mul(&self, rhs: &MatPoly) -> MatPoly {
        let order = self.coeffs.len() - 1;
        let dim = self.coeffs[0].rows();
        let mut out = MatPoly::zero(dim, order);
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().take(order + 1 - i).enumerate() {
                if b.is_zero() {
                    continue;
                }
                out.coeffs[i + j].add_assign(&a.matmul(b));
            }
        }
        out
    }

    fn scale_re(&self, s: f64) -> MatPoly {
        MatPoly { coeffs: self.coeffs.iter().map(|c| c.scale_re(s)).collect() }
    }

    fn add_assign(&mut self, rhs: &MatPoly) {
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            a.add_assign(b);
        }
    }

    fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.entry_l1_norm()).sum()
    }
}

/// Exponential of `D + eps S` in the truncated polynomial algebra. With no
/// deterministic part the series terminates at the truncation order and the
/// result `sum_m eps^m S^m / m!` is exact; otherwise scaling and squaring is
/// applied inside the algebra, whose coefficient-sum norm is
/// submultiplicative just like the plain matrix norm.
fn graded_interval_exp(d: &CMat, s: &CMat, order: usize) -> MatPoly {
    let dim = d.rows();
    if d.is_zero() {
        let mut out = MatPoly::zero(dim, order);
        let mut term = CMat::identity(dim);
        out.coeffs[0] = term.clone();
        for m in 1..=order {
            term = term.matmul(s).scale_re(1.0 / m as f64);
            out.coeffs[m] = term.clone();
        }
        return out;
    }
    let mut x = MatPoly::zero(dim, order);
    x.coeffs[0] = d.clone();
    if order >= 1 {
        x.coeffs[1] = s.clone();
    }
    let norm = x.norm();
    let sigma = if norm > 0.5 { (norm / 0.5).log2().ceil().max(0.0) as u32 } else { 0 };
    let y = x.scale_re(0.5f64.powi(sigma as i32));
    let terms = 13.max(order + 1);
    let mut result = MatPoly::one(dim, order);
    let mut term = MatPoly::one(dim, order);
    for m in 1..=terms {
        term = term.mul(&y).scale_re(1.0 / m as f64);
        result.add_assign(&term);
    }
    for _ in 0..sigma {
        result = result.mul(&result);
    }
    result
}

/// Holonomy slices by stochastic grade.
#[derive(Clone, Debug)]
pub struct GradedHolonomy {
    order: usize,
    slices: Vec<CMat>,
    tail: f64,
}

impl GradedHolonomy {
    pub fn order(&self) -> usize {
        self.order
    }

    /// `Z(i)` for `i = 0..=order`; `Z(0)` is the deterministic holonomy.
    pub fn slices(&self) -> &[CMat] {
        &self.slices
    }

    pub fn slice(&self, i: usize) -> &CMat {
        &self.slices[i]
    }

    /// Bound on the total norm of all discarded grades.
    pub fn truncation_tail_bound(&self) -> f64 {
        self.tail
    }

    pub fn trace_slices(&self) -> Vec<C64> {
        self.slices.iter().map(|z| z.trace()).collect()
    }

    /// Sum of the retained slices (the grading evaluated at eps = 1).
    pub fn sum(&self) -> CMat {
        let mut acc = CMat::zeros(self.slices[0].rows(), self.slices[0].cols());
        for z in &self.slices {
            acc.add_assign(z);
        }
        acc
    }
}

/// Graded holonomy truncated at stochastic order `R`.
pub fn holonomy_graded(path: &DrivingPath, order: usize) -> Result<GradedHolonomy> {
    if order > 64 {
        return Err(EngineError::Validation(format!(
            "truncation order {order} unreasonably large; the slice count is order + 1"
        )));
    }
    let mut p = MatPoly::one(path.dim, order);
    for (d, s) in path.deterministic.iter().zip(&path.stochastic) {
        p = graded_interval_exp(d, s, order).mul(&p);
    }
    Ok(GradedHolonomy { order, slices: p.coeffs, tail: tail_bound(path, order) })
}

/// Taylor tail `sum_{r > R} V^r / r!` with `V = V_d + V_s` the combined
/// total variation; overflows saturate to infinity.
pub fn tail_bound(path: &DrivingPath, order: usize) -> f64 {
    let (vd, vs) = path.total_variations();
    let v = vd + vs;
    if v == 0.0 {
        return 0.0;
    }
    // term = V^(R+1) / (R+1)!
    let mut term = 1.0f64;
    for r in 1..=(order + 1) {
        term *= v / r as f64;
        if !term.is_finite() || term > 1e300 {
            return f64::INFINITY;
        }
    }
    let mut sum = 0.0;
    let mut r = order + 1;
    loop {
        sum += term;
        r += 1;
        term *= v / r as f64;
        if !term.is_finite() {
            return f64::INFINITY;
        }
        if term < sum * 1e-18 + 1e-300 {
            return sum;
        }
    }
}

/// Mixed trace observable of several graded holonomies:
///
/// ```text
/// F(m) = sum_{i_1 + ... + i_s = m} prod_j Tr Z_j(i_j),
/// ```
///
/// the grade-m piece of the product of Wilson traces. Requires `m` at most
/// the smallest recorded truncation order, otherwise some compositions are
/// missing from the recorded slices.
pub fn wilson_slices(holonomies: &[GradedHolonomy], m: usize) -> Result<C64> {
    if holonomies.is_empty() {
        return Err(EngineError::Validation("need at least one holonomy".into()));
    }
    let max_order = holonomies.iter().map(|h| h.order).min().unwrap();
    if m > max_order {
        return Err(EngineError::Validation(format!(
            "slice order {m} exceeds the recorded truncation order {max_order}"
        )));
    }
    let traces: Vec<Vec<C64>> = holonomies.iter().map(|h| h.trace_slices()).collect();
    let mut total = C64::new(0.0, 0.0);
    let mut composition = vec![0usize; traces.len()];
    compose_sum(&traces, m, 0, Complex64::new(1.0, 0.0), &mut composition, &mut total);
    Ok(total)
}

fn compose_sum(
    traces: &[Vec<C64>],
    remaining: usize,
    loop_idx: usize,
    partial: C64,
    composition: &mut [usize],
    total: &mut C64,
) {
    if loop_idx == traces.len() - 1 {
        *total += partial * traces[loop_idx][remaining];
        return;
    }
    for i in 0..=remaining {
        composition[loop_idx] = i;
        compose_sum(traces, remaining - i, loop_idx + 1, partial * traces[loop_idx][i], composition, total);
    }
}

/// Triangle inequality in l^2q used by the growth estimates, returned as
/// `(lhs, rhs)` with `lhs <= rhs` guaranteed mathematically:
///
/// ```text
/// sum_i |sum_j x_ij|^2q  <=  ( sum_j ( sum_i |x_ij|^2q )^(1/2q) )^2q.
/// ```
pub fn minkowski_check(x: &[Vec<f64>], q: u32) -> Result<(f64, f64)> {
    if q == 0 {
        return Err(EngineError::Validation("q must be at least 1".into()));
    }
    if x.is_empty() || x.iter().any(|row| row.len() != x[0].len()) {
        return Err(EngineError::Validation("need a nonempty rectangular array".into()));
    }
    let p = 2.0 * q as f64;
    let cols = x[0].len();
    let lhs = x.iter().map(|row| row.iter().sum::<f64>().abs().powf(p)).sum::<f64>();
    let rhs = (0..cols)
        .map(|j| x.iter().map(|row| row[j].abs().powf(p)).sum::<f64>().powf(1.0 / p))
        .sum::<f64>()
        .powf(p);
    Ok((lhs, rhs))
}

#[derive(Deserialize)]
struct PathFile {
    times: Vec<f64>,
    deterministic: Option<Vec<Vec<Vec<[f64; 2]>>>>,
    stochastic: Option<Vec<Vec<Vec<[f64; 2]>>>>,
}

/// Parses `{"times": [...], "deterministic": [matrix, ...], "stochastic":
/// [matrix, ...]}` where a matrix is an array of rows, each row an array
/// of `[re, im]` pairs;
/// either stream may be omitted.
pub fn path_from_json_str(text: &str) -> Result<DrivingPath> {
    let file: PathFile = serde_json::from_str(text)?;
    let conv = |stream: Option<Vec<Vec<Vec<[f64; 2]>>>>| -> Result<Option<Vec<CMat>>> {
        match stream {
            None => Ok(None),
            Some(mats) => Ok(Some(
                mats.iter().map(|m| CMat::from_entry_pairs(m)).collect::<Result<Vec<_>>>()?,
            )),
        }
    };
    DrivingPath::new(file.times, conv(file.deterministic)?, conv(file.stochastic)?)
}
