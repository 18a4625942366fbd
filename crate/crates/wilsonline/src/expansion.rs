//! Large-level asymptotics of the expected two-loop trace product.
//!
//! For two loops whose currents have vanishing self-pairing and cross
//! pairing `L` (see [`crate::gaussian::two_loop_unit_linking`] for a
//! realization), the grade-`2n` coefficient of the expected trace product
//! is driven by the trace powers of the quadratic Casimir-style tensor
//! `M = sum_alpha E_alpha (x) E_alpha`:
//!
//! ```text
//! E[Tr W_1 Tr W_2] ~ sum_n Tr(M^n) kappa^n / n!,     kappa = i L / (2k),
//! ```
//!
//! and odd grades vanish by parity. In the fundamental representation of
//! su(2), `Tr(M^n) = (3 (-1)^n + 3^n) / 2^n`, which resums to the closed
//! form `3 exp(-iL/4k) + exp(3iL/4k)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cmat::C64;
use crate::error::{EngineError, Result};
use crate::lie_rep::{tensor_trace_power, RepBasis};

fn check_level(level: f64) -> Result<()> {
    if !(level > 0.0) || !level.is_finite() {
        return Err(EngineError::Domain(format!(
            "the expansion is defined for positive level k, got {level}"
        )));
    }
    Ok(())
}

/// Closed-form limit of the expected su(2) fundamental two-loop trace
/// product at cross pairing `linking` and level `level`:
/// `3 exp(-iL/4k) + exp(3iL/4k)`.
pub fn closed_form_su2(linking: f64, level: f64) -> Result<C64> {
    check_level(level)?;
    let x = linking / (4.0 * level);
    Ok(3.0 * Complex64::new(0.0, -x).exp() + Complex64::new(0.0, 3.0 * x).exp())
}

/// Grade-`grade` coefficient of the expected trace product for an
/// arbitrary orthonormal basis, at pairing value `kappa` per contraction:
/// `Tr(M^(grade/2)) kappa^(grade/2) / (grade/2)!` for even grades, zero for
/// odd grades (odd Gaussian moments vanish).
pub fn pairing_coefficient(basis: &RepBasis, kappa: C64, grade: usize) -> C64 {
    if grade % 2 == 1 {
        return Complex64::new(0.0, 0.0);
    }
    let n = grade / 2;
    let mut fact = 1.0;
    for m in 1..=n {
        fact *= m as f64;
    }
    tensor_trace_power(basis, n) * kappa.powu(n as u32) / fact
}

/// First `terms` grouped series terms for su(2), indexed by the pairing
/// count `n` (grade `2n`):
/// `term_n = i^n (3 (-1)^n + 3^n) L^n / ((4k)^n n!)`.
pub fn series_su2(linking: f64, level: f64, terms: usize) -> Result<Vec<C64>> {
    check_level(level)?;
    let base = Complex64::new(0.0, linking / (4.0 * level));
    let mut out = Vec::with_capacity(terms);
    let mut power = Complex64::new(1.0, 0.0);
    let mut fact = 1.0;
    for n in 0..terms {
        if n > 0 {
            power *= base;
            fact *= n as f64;
        }
        let weight = 3.0 * if n % 2 == 0 { 1.0 } else { -1.0 } + 3.0f64.powi(n as i32);
        out.push(power * weight / fact);
    }
    Ok(out)
}

/// Report of the truncated expansion against its closed form.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub linking: f64,
    pub level: f64,
    /// Number of grouped terms (pairing counts `n = 0 .. terms`).
    pub terms: usize,
    /// Grouped terms indexed by pairing count `n`.
    pub terms_by_pairing: Vec<[f64; 2]>,
    /// The same coefficients indexed by grade `m = 0 .. 2*terms`; odd
    /// grades are exactly zero.
    pub terms_by_grade: Vec<[f64; 2]>,
    /// Partial sums through `n` terms.
    pub partial_sums: Vec<[f64; 2]>,
    pub closed_form: [f64; 2],
    /// `|closed_form - partial_sums[n]|` for each truncation.
    pub remainders: Vec<f64>,
}

fn c_pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

/// Evaluate the su(2) expansion and compare each truncation with the
/// closed form.
pub fn expansion_report(linking: f64, level: f64, terms: usize) -> Result<ExpansionReport> {
    if terms == 0 {
        return Err(EngineError::Validation("need at least one series term".into()));
    }
    let series = series_su2(linking, level, terms)?;
    let closed = closed_form_su2(linking, level)?;
    let mut partial = Vec::with_capacity(terms);
    let mut acc = Complex64::new(0.0, 0.0);
    for t in &series {
        acc += t;
        partial.push(acc);
    }
    let mut by_grade = Vec::with_capacity(2 * terms);
    for t in &series {
        by_grade.push(c_pair(*t));
        by_grade.push([0.0, 0.0]);
    }
    Ok(ExpansionReport {
        linking,
        level,
        terms,
        terms_by_pairing: series.iter().map(|t| c_pair(*t)).collect(),
        terms_by_grade: by_grade,
        partial_sums: partial.iter().map(|p| c_pair(*p)).collect(),
        closed_form: c_pair(closed),
        remainders: partial.iter().map(|p| (closed - p).norm()).collect(),
    })
}

/// Scaled remainders `k^(grade/2) |closed - partial|` across levels for the
/// truncation at total grade `grade` (series terms `n < grade/2`). For an
/// expansion that really is `O(k^(-grade/2))`, the scaled values stay
/// bounded as the level grows; they may decay further when the first
/// omitted term vanishes identically (as at grade 2).
pub fn decay_check(linking: f64, levels: &[f64], grade: usize) -> Result<Vec<f64>> {
    if grade == 0 || grade % 2 == 1 {
        return Err(EngineError::Validation(format!(
            "decay is measured at even positive grades, got {grade}"
        )));
    }
    let n_terms = grade / 2;
    let mut out = Vec::with_capacity(levels.len());
    for &k in levels {
        let series = series_su2(linking, k, n_terms)?;
        let partial: C64 = series.iter().sum();
        let closed = closed_form_su2(linking, k)?;
        out.push(k.powi(n_terms as i32) * (closed - partial).norm());
    }
    Ok(out)
}
