//! Loops in R^3, mollifiers, and line integrals of one-forms.
//!
//! Loops are closed curves parametrized over [0, 1], given either as finite
//! Fourier series per coordinate or as closed polylines traversed at
//! constant speed. The regularization replaces a loop's singular current by
//! its convolution with a compactly supported bump
//!
//! ```text
//! phi(x) = (315 / 64 pi) (1 - |x|^2)^3   on |x| <= 1,      phi_eps(x) = eps^-3 phi(x / eps),
//! ```
//!
//! so pairing a one-form with the mollified current becomes a line integral
//! whose integrand is averaged over the eps-ball around each curve point.

use serde::{Deserialize, Serialize};

use crate::error::{EngineError, Result};
use crate::quad;

pub type Point = [f64; 3];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LoopForm {
    Fourier,
    Polyline,
}

#[derive(Clone, Debug)]
enum Shape {
    Fourier {
        /// Per coordinate: (cos, sin) amplitude pairs, index m = harmonic.
        /// Entry 0's sin part is ignored (constant term).
        coeffs: [Vec<(f64, f64)>; 3],
    },
    Polyline {
        vertices: Vec<Point>,
        /// Cumulative normalized arc length at each vertex, cum[0] = 0,
        /// cum[len] = 1 (closing edge included).
        cum: Vec<f64>,
        total_len: f64,
    },
}

/// A closed loop in R^3 parametrized over [0, 1].
#[derive(Clone, Debug)]
pub struct LoopCurve {
    shape: Shape,
    samples_hint: usize,
}

pub const DEFAULT_SAMPLES_HINT: usize = 512;

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn norm(a: Point) -> f64 {
    (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt()
}

pub fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

impl LoopCurve {
    /// Builds a Fourier loop from per-coordinate (cos, sin) amplitude lists.
    /// The curve is `x_c(t) = sum_m a_cm cos(2 pi m t) + b_cm sin(2 pi m t)`.
    /// Degenerate parametrizations (vanishing velocity somewhere on the
    /// sampling grid) are rejected.
    pub fn fourier(coeffs: [Vec<(f64, f64)>; 3], samples_hint: Option<usize>) -> Result<Self> {
        if coeffs.iter().all(|c| c.len() <= 1) {
            return Err(EngineError::Validation(
                "fourier loop needs at least one nonconstant harmonic".into(),
            ));
        }
        let curve = LoopCurve {
            shape: Shape::Fourier { coeffs },
            samples_hint: samples_hint.unwrap_or(DEFAULT_SAMPLES_HINT).max(16),
        };
        let n = curve.samples_hint.max(256);
        let mut min_speed = f64::INFINITY;
        for i in 0..n {
            let d = curve.deriv_unchecked(i as f64 / n as f64);
            min_speed = min_speed.min(norm(d));
        }
        if min_speed <= 1e-12 {
            return Err(EngineError::Validation(format!(
                "fourier loop is degenerate: minimal grid speed {min_speed:.3e}"
            )));
        }
        Ok(curve)
    }

    /// Builds a closed polyline through `vertices` (closure edge implicit),
    /// traversed at constant speed with respect to normalized arc length.
    pub fn polyline(vertices: Vec<Point>, samples_hint: Option<usize>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(EngineError::Validation(format!(
                "polyline needs at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        let n = vertices.len();
        let mut cum = Vec::with_capacity(n + 1);
        cum.push(0.0);
        let mut total = 0.0;
        for i in 0..n {
            let e = norm(sub(vertices[(i + 1) % n], vertices[i]));
            if e <= 1e-12 {
                return Err(EngineError::Validation(format!(
                    "polyline edge {i} has length {e:.3e}; consecutive vertices must be distinct"
                )));
            }
            total += e;
            cum.push(total);
        }
        for c in cum.iter_mut() {
            *c /= total;
        }
        *cum.last_mut().unwrap() = 1.0;
        Ok(LoopCurve {
            shape: Shape::Polyline { vertices, cum, total_len: total },
            samples_hint: samples_hint.unwrap_or(DEFAULT_SAMPLES_HINT).max(16),
        })
    }

    /// Circle `center + u cos(2 pi t) + v sin(2 pi t)`.
    pub fn circle(center: Point, u: Point, v: Point) -> Self {
        let coeff = |c: usize| vec![(center[c], 0.0), (u[c], v[c])];
        LoopCurve::fourier([coeff(0), coeff(1), coeff(2)], None)
            .expect("circle with independent axes is nondegenerate")
    }

    /// Unit circle in the xy-plane through (1, 0, 0) at t = 0, traversed
    /// counterclockwise seen from +z.
    pub fn unit_circle_xy() -> Self {
        LoopCurve::circle([0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
    }

    /// A (p, q) torus knot/link component on the torus of radii (big_r,
    /// small_r): with theta = 2 pi t,
    ///
    /// ```text
    /// x = (R + r cos(q theta + phase)) cos(p theta)
    /// y = (R + r cos(q theta + phase)) sin(p theta)
    /// z = r sin(q theta + phase)
    /// ```
    ///
    /// expanded into an exact finite Fourier series via product-to-sum.
    pub fn torus_curve(big_r: f64, small_r: f64, p: i64, q: i64, phase: f64) -> Result<Self> {
        let max_m = (p.abs() + q.abs()) as usize;
        let mut coeffs: [Vec<(f64, f64)>; 3] = [
            vec![(0.0, 0.0); max_m + 1],
            vec![(0.0, 0.0); max_m + 1],
            vec![(0.0, 0.0); max_m + 1],
        ];
        // amp * cos(m theta + ph) folded into (cos, sin) amplitudes at |m|.
        let add_cos = |coord: usize, m: i64, amp: f64, ph: f64, coeffs: &mut [Vec<(f64, f64)>; 3]| {
            let (m, ph) = if m < 0 { (-m, -ph) } else { (m, ph) };
            coeffs[coord][m as usize].0 += amp * ph.cos();
            coeffs[coord][m as usize].1 -= amp * ph.sin();
        };
        // amp * sin(m theta + ph): sin(-x) = -sin(x).
        let add_sin = |coord: usize, m: i64, amp: f64, ph: f64, coeffs: &mut [Vec<(f64, f64)>; 3]| {
            let (m, ph, amp) = if m < 0 { (-m, -ph, -amp) } else { (m, ph, amp) };
            coeffs[coord][m as usize].1 += amp * ph.cos();
            coeffs[coord][m as usize].0 += amp * ph.sin();
        };
        add_cos(0, p, big_r, 0.0, &mut coeffs);
        add_cos(0, q + p, small_r / 2.0, phase, &mut coeffs);
        add_cos(0, q - p, small_r / 2.0, phase, &mut coeffs);
        add_sin(1, p, big_r, 0.0, &mut coeffs);
        add_sin(1, q + p, small_r / 2.0, phase, &mut coeffs);
        add_sin(1, -(q - p), small_r / 2.0, -phase, &mut coeffs);
        add_sin(2, q, small_r, phase, &mut coeffs);
        LoopCurve::fourier(coeffs, None)
    }

    pub fn form(&self) -> LoopForm {
        match self.shape {
            Shape::Fourier { .. } => LoopForm::Fourier,
            Shape::Polyline { .. } => LoopForm::Polyline,
        }
    }

    pub fn samples_hint(&self) -> usize {
        self.samples_hint
    }

    pub fn vertices(&self) -> Option<&[Point]> {
        match &self.shape {
            Shape::Polyline { vertices, .. } => Some(vertices),
            Shape::Fourier { .. } => None,
        }
    }

    fn check_param(t: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&t) {
            return Err(EngineError::Domain(format!(
                "curve parameter {t} outside [0, 1]"
            )));
        }
        Ok(())
    }

    /// Curve point at parameter `t` in [0, 1].
    pub fn eval(&self, t: f64) -> Result<Point> {
        Self::check_param(t)?;
        Ok(self.eval_unchecked(t))
    }

    /// One-sided derivative at `t` in [0, 1]; at a polyline vertex the
    /// outgoing edge direction is used (incoming at t = 1).
    pub fn deriv(&self, t: f64) -> Result<Point> {
        Self::check_param(t)?;
        Ok(self.deriv_unchecked(t))
    }

    pub(crate) fn eval_unchecked(&self, t: f64) -> Point {
        match &self.shape {
            Shape::Fourier { coeffs } => {
                let theta = std::f64::consts::TAU * t;
                let mut p = [0.0; 3];
                for c in 0..3 {
                    for (m, &(a, b)) in coeffs[c].iter().enumerate() {
                        let ang = theta * m as f64;
                        p[c] += a * ang.cos() + b * ang.sin();
                    }
                }
                p
            }
            Shape::Polyline { vertices, cum, .. } => {
                let (i, local) = self.polyline_segment(t, cum);
                let n = vertices.len();
                let a = vertices[i % n];
                let b = vertices[(i + 1) % n];
                [
                    a[0] + local * (b[0] - a[0]),
                    a[1] + local * (b[1] - a[1]),
                    a[2] + local * (b[2] - a[2]),
                ]
            }
        }
    }

    pub(crate) fn deriv_unchecked(&self, t: f64) -> Point {
        match &self.shape {
            Shape::Fourier { coeffs } => {
                let theta = std::f64::consts::TAU * t;
                let mut d = [0.0; 3];
                for c in 0..3 {
                    for (m, &(a, b)) in coeffs[c].iter().enumerate() {
                        let w = std::f64::consts::TAU * m as f64;
                        let ang = theta * m as f64;
                        d[c] += w * (-a * ang.sin() + b * ang.cos());
                    }
                }
                d
            }
            Shape::Polyline { vertices, cum, total_len } => {
                let (i, _) = self.polyline_segment(t, cum);
                let n = vertices.len();
                let e = sub(vertices[(i + 1) % n], vertices[i % n]);
                // Constant-speed parametrization: |gamma'| = total length.
                let s = total_len / norm(e);
                [e[0] * s, e[1] * s, e[2] * s]
            }
        }
    }

    fn polyline_segment(&self, t: f64, cum: &[f64]) -> (usize, f64) {
        let nseg = cum.len() - 1;
        if t >= 1.0 {
            // t = 1 sits at the end of the closing edge.
            return (nseg - 1, 1.0);
        }
        let i = match cum.binary_search_by(|c| c.partial_cmp(&t).unwrap()) {
            Ok(k) => k.min(nseg - 1),
            Err(k) => k - 1,
        };
        let span = cum[i + 1] - cum[i];
        (i, (t - cum[i]) / span)
    }

    /// Fourier phase shift: the same curve reparametrized as t -> t + c
    /// (mod 1). Polyline loops are not supported.
    pub fn param_shifted(&self, c: f64) -> Result<Self> {
        match &self.shape {
            Shape::Fourier { coeffs } => {
                let shifted = [0, 1, 2].map(|axis| {
                    coeffs[axis]
                        .iter()
                        .enumerate()
                        .map(|(m, &(a, b))| {
                            let ang = std::f64::consts::TAU * m as f64 * c;
                            // cos(w(t+c)) and sin(w(t+c)) expanded.
                            (a * ang.cos() + b * ang.sin(), b * ang.cos() - a * ang.sin())
                        })
                        .collect()
                });
                Ok(LoopCurve { shape: Shape::Fourier { coeffs: shifted }, samples_hint: self.samples_hint })
            }
            Shape::Polyline { .. } => Err(EngineError::Unsupported(
                "parameter shift is only defined for fourier loops".into(),
            )),
        }
    }

    /// The same loop traversed backwards.
    pub fn reversed(&self) -> Self {
        match &self.shape {
            Shape::Fourier { coeffs } => {
                let flipped = [0, 1, 2].map(|axis| {
                    coeffs[axis].iter().map(|&(a, b)| (a, -b)).collect()
                });
                LoopCurve { shape: Shape::Fourier { coeffs: flipped }, samples_hint: self.samples_hint }
            }
            Shape::Polyline { vertices, .. } => {
                let mut rev = vertices.clone();
                rev.reverse();
                LoopCurve::polyline(rev, Some(self.samples_hint))
                    .expect("reversal preserves polyline validity")
            }
        }
    }

    pub fn translated(&self, d: Point) -> Self {
        match &self.shape {
            Shape::Fourier { coeffs } => {
                let mut shifted = coeffs.clone();
                for c in 0..3 {
                    if shifted[c].is_empty() {
                        shifted[c].push((0.0, 0.0));
                    }
                    shifted[c][0].0 += d[c];
                }
                LoopCurve { shape: Shape::Fourier { coeffs: shifted }, samples_hint: self.samples_hint }
            }
            Shape::Polyline { vertices, .. } => {
                let moved = vertices.iter().map(|v| [v[0] + d[0], v[1] + d[1], v[2] + d[2]]).collect();
                LoopCurve::polyline(moved, Some(self.samples_hint))
                    .expect("translation preserves polyline validity")
            }
        }
    }

    /// Samples the loop into a closed polyline with `segments` edges.
    pub fn to_polyline(&self, segments: usize) -> Result<Self> {
        if segments < 3 {
            return Err(EngineError::Validation("polyline needs at least 3 segments".into()));
        }
        let vertices: Vec<Point> =
            (0..segments).map(|i| self.eval_unchecked(i as f64 / segments as f64)).collect();
        LoopCurve::polyline(vertices, Some(self.samples_hint))
    }
}

/// A smooth one-form on R^3, evaluated componentwise: `A(x) = (A_1, A_2, A_3)`.
pub struct SmoothOneForm {
    label: String,
    eval: Box<dyn Fn(Point) -> [f64; 3] + Send + Sync>,
}

impl SmoothOneForm {
    pub fn new(label: impl Into<String>, eval: impl Fn(Point) -> [f64; 3] + Send + Sync + 'static) -> Self {
        SmoothOneForm { label: label.into(), eval: Box::new(eval) }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, x: Point) -> [f64; 3] {
        (self.eval)(x)
    }
}

/// Compactly supported radial bump used to regularize loop currents.
#[derive(Clone, Copy, Debug)]
pub struct Mollifier {
    pub epsilon: f64,
    /// Gauss-Legendre order per axis of the ball quadrature.
    pub quadrature_order: usize,
}

/// Normalizer of `(1 - |x|^2)^3` over the unit ball:
/// the radial moment is `int_0^1 (1 - r^2)^3 r^2 dr = 16/315`, so the
/// constant is `315 / (64 pi)`.
const PROFILE_NORMALIZER: f64 = 315.0 / (64.0 * std::f64::consts::PI);

impl Mollifier {
    pub fn new(epsilon: f64) -> Result<Self> {
        Self::with_order(epsilon, 8)
    }

    pub fn with_order(epsilon: f64, quadrature_order: usize) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(EngineError::Validation(format!("mollifier width must be positive, got {epsilon}")));
        }
        if quadrature_order < 2 {
            return Err(EngineError::Validation("mollifier quadrature order must be at least 2".into()));
        }
        Ok(Mollifier { epsilon, quadrature_order })
    }

    /// Unit-width profile `phi(x) = (315/64 pi)(1 - |x|^2)^3` on `|x| <= 1`.
    pub fn profile(x: Point) -> f64 {
        let r2 = dot(x, x);
        if r2 >= 1.0 { 0.0 } else { PROFILE_NORMALIZER * (1.0 - r2).powi(3) }
    }

    /// Scaled profile `phi_eps(x) = eps^-3 phi(x / eps)`.
    pub fn phi_eps(&self, x: Point) -> f64 {
        let e = self.epsilon;
        Mollifier::profile([x[0] / e, x[1] / e, x[2] / e]) / (e * e * e)
    }

    /// Weighted ball average `int f(y) phi_eps(y - center) dy` by a
    /// spherical product rule: Gauss-Legendre in radius and polar cosine,
    /// uniform in azimuth. The radial weight is a polynomial of degree 8,
    /// so the quadrature integrates the profile itself to rounding.
    pub fn ball_average(&self, center: Point, mut f: impl FnMut(Point) -> f64) -> f64 {
        let e = self.epsilon;
        let radial = quad::gauss_legendre_on(self.quadrature_order, 0.0, e);
        let polar = quad::gauss_legendre(self.quadrature_order);
        let n_az = 2 * self.quadrature_order;
        let daz = std::f64::consts::TAU / n_az as f64;
        let mut total = 0.0;
        for &(r, wr) in &radial {
            let phi_r = self.phi_eps([r, 0.0, 0.0]);
            for &(u, wu) in &polar {
                let s = (1.0 - u * u).sqrt();
                for ia in 0..n_az {
                    let az = ia as f64 * daz;
                    let y = [
                        center[0] + r * s * az.cos(),
                        center[1] + r * s * az.sin(),
                        center[2] + r * u,
                    ];
                    total += wr * wu * daz * r * r * phi_r * f(y);
                }
            }
        }
        total
    }

    /// Quadrature self-check: the profile must integrate to 1.
    pub fn self_check_integral(&self) -> f64 {
        self.ball_average([0.0; 3], |_| 1.0)
    }
}

/// Line integral `int_s^t A(gamma(tau)) . gamma'(tau) d tau` by composite
/// Simpson with `panels` subintervals.
pub fn line_integral(
    curve: &LoopCurve,
    form: &SmoothOneForm,
    s: f64,
    t: f64,
    panels: usize,
) -> Result<f64> {
    check_range(s, t)?;
    Ok(quad::simpson(
        |tau| dot(form.eval(curve.eval_unchecked(tau)), curve.deriv_unchecked(tau)),
        s,
        t,
        panels,
    ))
}

/// Pairing of the one-form with the mollified current: the line integrand is
/// replaced by the phi_eps-weighted average of `A` over the ball around each
/// curve point,
///
/// ```text
/// int_s^t [ int A_i(y) phi_eps(y - gamma(tau)) dy ] gamma'_i(tau) d tau.
/// ```
pub fn mollified_line_integral(
    curve: &LoopCurve,
    form: &SmoothOneForm,
    moll: &Mollifier,
    s: f64,
    t: f64,
    panels: usize,
) -> Result<f64> {
    check_range(s, t)?;
    Ok(quad::simpson(
        |tau| {
            let center = curve.eval_unchecked(tau);
            let d = curve.deriv_unchecked(tau);
            let smoothed = [0, 1, 2].map(|i| moll.ball_average(center, |y| form.eval(y)[i]));
            dot(smoothed, d)
        },
        s,
        t,
        panels,
    ))
}

fn check_range(s: f64, t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&s) || !(0.0..=1.0).contains(&t) {
        return Err(EngineError::Domain(format!("integration range [{s}, {t}] outside [0, 1]")));
    }
    if s > t {
        return Err(EngineError::Domain(format!("integration range has s = {s} > t = {t}")));
    }
    Ok(())
}

/// Empirical Lipschitz constant of the partial pairing `t -> int_0^t A . dgamma`
/// (mollified when `moll` is given): the maximum over a uniform grid of the
/// per-interval difference quotients, each interval integrated by a short
/// Simpson rule. This is a lower estimate that converges to the true
/// constant, sup |A(gamma) . gamma'|, as the grid refines.
pub fn lipschitz_constant(
    curve: &LoopCurve,
    form: &SmoothOneForm,
    moll: Option<&Mollifier>,
    grid: usize,
) -> Result<f64> {
    let n = grid.max(4);
    let mut best = 0.0f64;
    for i in 0..n {
        let (a, b) = (i as f64 / n as f64, (i + 1) as f64 / n as f64);
        let inc = match moll {
            None => line_integral(curve, form, a, b, 4)?,
            Some(m) => mollified_line_integral(curve, form, m, a, b, 4)?,
        };
        best = best.max(inc.abs() * n as f64);
    }
    Ok(best)
}

/// Minimal distance between two loops on their sampling grids.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Separation {
    pub value: f64,
    /// Set when the grid minimum falls below 1e-9; the loops are treated as
    /// touching and the reported value is clamped to zero.
    pub touching: bool,
}

pub fn tube_separation(a: &LoopCurve, b: &LoopCurve) -> Separation {
    let na = a.samples_hint.max(64);
    let nb = b.samples_hint.max(64);
    let pa: Vec<Point> = (0..na).map(|i| a.eval_unchecked(i as f64 / na as f64)).collect();
    let pb: Vec<Point> = (0..nb).map(|j| b.eval_unchecked(j as f64 / nb as f64)).collect();
    let mut min = f64::INFINITY;
    for p in &pa {
        for q in &pb {
            min = min.min(norm(sub(*p, *q)));
        }
    }
    if min < 1e-9 {
        Separation { value: 0.0, touching: true }
    } else {
        Separation { value: min, touching: false }
    }
}

#[derive(Deserialize)]
struct LoopFileCoeffs {
    x: Vec<[f64; 2]>,
    y: Vec<[f64; 2]>,
    z: Vec<[f64; 2]>,
}

#[derive(Deserialize)]
struct LoopFile {
    form: String,
    coeffs: Option<LoopFileCoeffs>,
    vertices: Option<Vec<Point>>,
    samples_hint: Option<usize>,
}

/// Parses a loop description:
///
/// ```json
/// {"form": "fourier", "coeffs": {"x": [[a0, 0], [a1, b1]], "y": ..., "z": ...}}
/// {"form": "polyline", "vertices": [[x, y, z], ...]}
/// ```
///
/// with an optional `"samples_hint"` in both variants.
pub fn loop_from_json_str(text: &str) -> Result<LoopCurve> {
    let file: LoopFile = serde_json::from_str(text)?;
    match file.form.as_str() {
        "fourier" => {
            let c = file.coeffs.ok_or_else(|| {
                EngineError::Validation("fourier loop requires a \"coeffs\" object".into())
            })?;
            let conv = |v: Vec<[f64; 2]>| v.into_iter().map(|p| (p[0], p[1])).collect();
            LoopCurve::fourier([conv(c.x), conv(c.y), conv(c.z)], file.samples_hint)
        }
        "polyline" => {
            let v = file.vertices.ok_or_else(|| {
                EngineError::Validation("polyline loop requires a \"vertices\" array".into())
            })?;
            LoopCurve::polyline(v, file.samples_hint)
        }
        other => Err(EngineError::Validation(format!(
            "unknown loop form {other:?}; expected \"fourier\" or \"polyline\""
        ))),
    }
}

/// Serializes a loop back into the JSON file format.
pub fn loop_to_json(curve: &LoopCurve) -> serde_json::Value {
    match &curve.shape {
        Shape::Fourier { coeffs } => {
            let conv = |v: &Vec<(f64, f64)>| -> Vec<[f64; 2]> {
                v.iter().map(|&(a, b)| [a, b]).collect()
            };
            serde_json::json!({
                "form": "fourier",
                "coeffs": {"x": conv(&coeffs[0]), "y": conv(&coeffs[1]), "z": conv(&coeffs[2])},
                "samples_hint": curve.samples_hint,
            })
        }
        Shape::Polyline { vertices, .. } => serde_json::json!({
            "form": "polyline",
            "vertices": vertices,
            "samples_hint": curve.samples_hint,
        }),
    }
}
