//! Matrix data for a unitary representation of a compact Lie algebra.
//!
//! A `RepBasis` holds generators `E_1, ..., E_d` acting on C^n. The frozen
//! conventions are:
//!
//! * generators are anti-Hermitian, `E^dagger = -E`;
//! * they are orthonormal in the negative trace form, `-Tr(E_a E_b) = delta_ab`.
//!
//! On top of the basis sit the tensor-square operators that drive the
//! two-loop expansion: the Casimir-style element `M = sum_a E_a (x) E_a`
//! acting on C^n (x) C^n, and the traces `Tr M^m` of its powers. For the
//! defining representation of su(2) those traces have the closed form
//! `(3 (-1)^m + 3^m) / 2^m`, which the expansion module consumes.

use num_complex::Complex64;
use serde::Deserialize;

use crate::cmat::{C64, CMat};
use crate::error::{EngineError, Result};

/// Entrywise tolerance for the structural checks (anti-Hermiticity and trace
/// orthonormality). Hand-entered bases are exact to rounding, so this mostly
/// guards against malformed files.
const STRUCTURE_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct RepBasis {
    name: String,
    generators: Vec<CMat>,
    dim_rep: usize,
}

impl RepBasis {
    /// Validates and wraps a generator set: all matrices square of equal
    /// side, anti-Hermitian, and orthonormal under `-Tr(E_a E_b)`.
    pub fn new(name: impl Into<String>, generators: Vec<CMat>) -> Result<Self> {
        if generators.is_empty() {
            return Err(EngineError::Validation("generator list is empty".into()));
        }
        let n = generators[0].rows();
        if n == 0 || n > 8 {
            return Err(EngineError::Validation(format!(
                "representation dimension {n} outside supported range 1..=8"
            )));
        }
        for (a, g) in generators.iter().enumerate() {
            if !g.is_square() || g.rows() != n {
                return Err(EngineError::Validation(format!(
                    "generator {a} is {}x{}, expected {n}x{n}",
                    g.rows(),
                    g.cols()
                )));
            }
            let defect = g.anti_hermitian_defect();
            if defect > STRUCTURE_TOL {
                return Err(EngineError::Validation(format!(
                    "generator {a} is not anti-Hermitian (defect {defect:.3e})"
                )));
            }
        }
        for a in 0..generators.len() {
            for b in a..generators.len() {
                let tr = generators[a].matmul(&generators[b]).trace();
                let want = if a == b { 1.0 } else { 0.0 };
                let err = (-tr - C64::new(want, 0.0)).norm();
                if err > STRUCTURE_TOL {
                    return Err(EngineError::Validation(format!(
                        "generators {a},{b} violate -Tr(E_a E_b) = delta (error {err:.3e})"
                    )));
                }
            }
        }
        Ok(RepBasis { name: name.into(), generators, dim_rep: n })
    }

    /// The defining representation of su(2) on C^2, orthonormalized so that
    /// `-Tr(E_a E_b) = delta_ab`:
    ///
    /// ```text
    /// E_1 = (1/sqrt 2) [[i, 0], [0, -i]]
    /// E_2 = (1/sqrt 2) [[0, -1], [1, 0]]
    /// E_3 = (1/sqrt 2) [[0, i], [i, 0]]
    /// ```
    pub fn su2() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let z = c(0.0, 0.0);
        let e1 = CMat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 0) => c(0.0, s),
            (1, 1) => c(0.0, -s),
            _ => z,
        });
        let e2 = CMat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => c(-s, 0.0),
            (1, 0) => c(s, 0.0),
            _ => z,
        });
        let e3 = CMat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) | (1, 0) => c(0.0, s),
            _ => z,
        });
        RepBasis::new("su2", vec![e1, e2, e3]).expect("built-in su(2) basis is valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn generators(&self) -> &[CMat] {
        &self.generators
    }

    pub fn dim_algebra(&self) -> usize {
        self.generators.len()
    }

    pub fn dim_rep(&self) -> usize {
        self.dim_rep
    }

    /// Largest entrywise-L1 generator norm; the growth and tail bounds for
    /// holonomies of algebra-valued paths scale with this constant.
    pub fn max_generator_norm(&self) -> f64 {
        self.generators.iter().map(|g| g.entry_l1_norm()).fold(0.0, f64::max)
    }

    /// Gram matrix `-Tr(E_a E_b)`; the identity for a valid basis.
    pub fn gram(&self) -> CMat {
        let d = self.dim_algebra();
        CMat::from_fn(d, d, |a, b| -self.generators[a].matmul(&self.generators[b]).trace())
    }

    /// Parses `{"name": ..., "dim_rep": n, "generators": [[[re, im], ...], ...]}`,
    /// where each generator is a row-major n x n matrix of (re, im) pairs,
    /// then runs the structural validation.
    pub fn from_json_str(text: &str) -> Result<Self> {
        #[derive(Deserialize)]
        struct BasisFile {
            name: Option<String>,
            dim_rep: usize,
            generators: Vec<Vec<Vec<[f64; 2]>>>,
        }
        let file: BasisFile = serde_json::from_str(text)?;
        let mut generators = Vec::with_capacity(file.generators.len());
        for rows in &file.generators {
            let m = CMat::from_entry_pairs(rows)?;
            if m.rows() != file.dim_rep || m.cols() != file.dim_rep {
                return Err(EngineError::Validation(format!(
                    "generator is {}x{}, declared dim_rep {}",
                    m.rows(),
                    m.cols(),
                    file.dim_rep
                )));
            }
            generators.push(m);
        }
        RepBasis::new(file.name.unwrap_or_else(|| "custom".into()), generators)
    }
}

/// A tensor-square operator on C^n (x) C^n together with its order tag.
#[derive(Clone, Debug)]
pub struct TensorOperator {
    pub order: usize,
    pub matrix: CMat,
}

/// The Casimir-style tensor element `M = sum_a E_a (x) E_a`.
pub fn casimir_tensor(basis: &RepBasis) -> TensorOperator {
    let n2 = basis.dim_rep() * basis.dim_rep();
    let mut m = CMat::zeros(n2, n2);
    for e in basis.generators() {
        m.add_assign(&e.kron(e));
    }
    TensorOperator { order: 1, matrix: m }
}

/// `Tr M^m` for the Casimir tensor element; `m = 0` gives `n^2`.
pub fn tensor_trace_power(basis: &RepBasis, m: usize) -> C64 {
    let t = casimir_tensor(basis);
    let n2 = t.matrix.rows();
    let mut power = CMat::identity(n2);
    for _ in 0..m {
        power = power.matmul(&t.matrix);
    }
    power.trace()
}

/// Closed form of `Tr M^m` for the defining representation of su(2):
/// eigenvalues of `2M` are {-1, -1, -1, 3}, so the trace is
/// `(3 (-1)^m + 3^m) / 2^m`.
pub fn su2_trace_power_closed_form(m: usize) -> f64 {
    let sign = if m % 2 == 0 { 3.0 } else { -3.0 };
    (sign + 3.0f64.powi(m as i32)) / 2.0f64.powi(m as i32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn su2_satisfies_structure_checks() {
        let b = RepBasis::su2();
        assert_eq!(b.dim_algebra(), 3);
        assert_eq!(b.dim_rep(), 2);
        let gram = b.gram();
        assert!(gram.sub(&CMat::identity(3)).max_abs() < 1e-15);
    }

    #[test]
    fn su2_casimir_tensor_matches_hand_matrix() {
        let t = casimir_tensor(&RepBasis::su2());
        let half = 0.5;
        let expect = [
            [-half, 0.0, 0.0, 0.0],
            [0.0, half, -1.0, 0.0],
            [0.0, -1.0, half, 0.0],
            [0.0, 0.0, 0.0, -half],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert!(
                    (t.matrix.at(i, j) - C64::new(expect[i][j], 0.0)).norm() < 1e-15,
                    "entry ({i},{j})"
                );
            }
        }
    }

    #[test]
    fn su2_casimir_spectrum() {
        let t = casimir_tensor(&RepBasis::su2());
        assert!(t.matrix.hermitian_defect() < 1e-15);
        let doubled = t.matrix.scale_re(2.0);
        let w = doubled.hermitian_eigenvalues();
        let expect = [-1.0, -1.0, -1.0, 3.0];
        for (got, want) in w.iter().zip(expect) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn casimir_commutes_with_swap() {
        // M acts symmetrically on the two tensor factors.
        let t = casimir_tensor(&RepBasis::su2());
        let n = 2;
        let swap = CMat::from_fn(n * n, n * n, |i, j| {
            let (i1, i2) = (i / n, i % n);
            let (j1, j2) = (j / n, j % n);
            if i1 == j2 && i2 == j1 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }
        });
        let comm = swap.matmul(&t.matrix).sub(&t.matrix.matmul(&swap));
        assert!(comm.max_abs() < 1e-12);
    }

    #[test]
    fn trace_powers_match_closed_form() {
        let b = RepBasis::su2();
        assert!((tensor_trace_power(&b, 0) - C64::new(4.0, 0.0)).norm() < 1e-12);
        assert!(tensor_trace_power(&b, 1).norm() < 1e-12);
        assert!((tensor_trace_power(&b, 2) - C64::new(3.0, 0.0)).norm() < 1e-12);
        for m in 0..=12 {
            let got = tensor_trace_power(&b, m);
            let want = su2_trace_power_closed_form(m);
            assert!((got - C64::new(want, 0.0)).norm() < 1e-10, "m = {m}");
        }
    }

    #[test]
    fn validation_rejects_bad_bases() {
        // Hermitian rather than anti-Hermitian.
        let h = CMat::from_fn(2, 2, |i, j| {
            if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) }
        });
        assert!(RepBasis::new("bad", vec![h]).is_err());
        // Anti-Hermitian but not normalized.
        let e = RepBasis::su2().generators()[0].scale_re(2.0);
        assert!(RepBasis::new("bad", vec![e]).is_err());
    }

    #[test]
    fn json_round_trip_and_rejection() {
        let b = RepBasis::su2();
        let gens: Vec<Vec<Vec<[f64; 2]>>> =
            b.generators().iter().map(|g| g.entry_pairs()).collect();
        let ok = serde_json::json!({"name": "su2", "dim_rep": 2, "generators": gens});
        let parsed = RepBasis::from_json_str(&ok.to_string()).unwrap();
        assert_eq!(parsed.dim_algebra(), 3);

        let scaled: Vec<Vec<Vec<[f64; 2]>>> =
            b.generators().iter().map(|g| g.scale_re(1.5).entry_pairs()).collect();
        let bad = serde_json::json!({"dim_rep": 2, "generators": scaled});
        assert!(RepBasis::from_json_str(&bad.to_string()).is_err());
    }
}
