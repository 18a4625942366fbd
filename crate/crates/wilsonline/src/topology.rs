//! Linking numbers by two independent routes.
//!
//! The analytic route evaluates the double line integral
//!
//! ```text
//! lk(a, b) = (1/4 pi) oint oint det[a'(s), b'(t), a(s) - b(t)] / |a(s) - b(t)|^3 ds dt
//! ```
//!
//! with the periodic trapezoid rule in both parameters, which converges
//! spectrally for smooth disjoint loops. The combinatorial route projects
//! polyline loops along a direction, counts signed crossings between the two
//! projected diagrams, and returns half the signed total, an exact integer.
//! The two routes share no code, so their agreement (`round(gauss) ==
//! crossing`) is a real consistency check on both.
//!
//! Crossing sign convention: in the projection plane oriented so the viewer
//! looks along the projection direction from +infinity, a crossing counts +1
//! when the tangent of the over strand followed by the tangent of the under
//! strand forms a positively oriented frame.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::counter_rng;
use crate::error::{EngineError, Result};
use crate::geometry::{dot, LoopCurve, LoopForm, Point, tube_separation};

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn cross(a: Point, b: Point) -> Point {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn norm(a: Point) -> f64 {
    dot(a, a).sqrt()
}

/// Deterministic pairwise tree reduction; the summation order is fixed by
/// the slice layout alone, so parallel callers get byte-stable totals.
pub(crate) fn tree_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        2 => v[0] + v[1],
        n => tree_sum(&v[..n / 2]) + tree_sum(&v[n / 2..]),
    }
}

/// Gauss linking integral on an `grid x grid` product of periodic trapezoid
/// rules. Rows are evaluated in parallel and combined by a deterministic
/// tree reduction. Touching loops (tube separation below 1e-9) are refused:
/// the integrand is singular there.
pub fn linking_gauss(a: &LoopCurve, b: &LoopCurve, grid: usize) -> Result<f64> {
    if grid < 8 {
        return Err(EngineError::Validation(format!("linking grid {grid} too coarse; need >= 8")));
    }
    let sep = tube_separation(a, b);
    if sep.touching {
        return Err(EngineError::Validation(
            "loops touch or intersect (tube separation below 1e-9); the Gauss integrand is singular"
                .into(),
        ));
    }
    let n = grid;
    let sample = |c: &LoopCurve| -> Vec<(Point, Point)> {
        (0..n)
            .map(|i| {
                let t = i as f64 / n as f64;
                (c.eval_unchecked(t), c.deriv_unchecked(t))
            })
            .collect()
    };
    let pa = sample(a);
    let pb = sample(b);
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let (p1, d1) = pa[i];
            let mut row = 0.0;
            for &(p2, d2) in &pb {
                let r = sub(p1, p2);
                let dist = norm(r);
                row += dot(cross(d1, d2), r) / (dist * dist * dist);
            }
            row
        })
        .collect();
    let h2 = 1.0 / (n as f64 * n as f64);
    Ok(tree_sum(&rows) * h2 / (4.0 * std::f64::consts::PI))
}

/// Outcome of one projected-diagram scan.
enum Scan {
    Signed(i64),
    /// The projection was non-generic (parallel overlap, crossing at a
    /// vertex, or equal heights at a crossing).
    Degenerate(&'static str),
}

/// Linking number by counting signed crossings of the projected diagrams.
/// Both loops must be polylines. If the requested projection direction is
/// degenerate, up to 16 fresh directions are tried deterministically before
/// giving up; a pair of genuinely intersecting loops exhausts them all.
pub fn linking_crossing(a: &LoopCurve, b: &LoopCurve, direction: Point) -> Result<i64> {
    let va = a.vertices().ok_or_else(|| {
        EngineError::Validation("crossing count requires polyline loops (first loop is not)".into())
    })?;
    let vb = b.vertices().ok_or_else(|| {
        EngineError::Validation("crossing count requires polyline loops (second loop is not)".into())
    })?;
    let mut dir = direction;
    if norm(dir) < 1e-12 {
        return Err(EngineError::Validation("projection direction must be nonzero".into()));
    }
    let mut last_reason = "";
    for attempt in 0..16u64 {
        if attempt > 0 {
            // Deterministic fresh directions from the counter RNG.
            dir = [
                counter_rng::normal_at(0x4C49_4E4B, attempt, 0),
                counter_rng::normal_at(0x4C49_4E4B, attempt, 1),
                counter_rng::normal_at(0x4C49_4E4B, attempt, 2),
            ];
            if norm(dir) < 1e-6 {
                continue;
            }
        }
        match scan_crossings(va, vb, dir) {
            Scan::Signed(total) if total % 2 == 0 => return Ok(total / 2),
            Scan::Signed(_) => last_reason = "odd signed crossing total",
            Scan::Degenerate(reason) => last_reason = reason,
        }
    }
    Err(EngineError::Validation(format!(
        "no generic projection found in 16 attempts (last: {last_reason}); \
         the loops may intersect"
    )))
}

fn scan_crossings(va: &[Point], vb: &[Point], dir: Point) -> Scan {
    let d = {
        let n = norm(dir);
        [dir[0] / n, dir[1] / n, dir[2] / n]
    };
    // Orthonormal frame (u, v, d), right-handed.
    let seed = if d[0].abs() <= d[1].abs() && d[0].abs() <= d[2].abs() {
        [1.0, 0.0, 0.0]
    } else if d[1].abs() <= d[2].abs() {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let u = {
        let c = cross(seed, d);
        let n = norm(c);
        [c[0] / n, c[1] / n, c[2] / n]
    };
    let v = cross(d, u);

    let project = |pts: &[Point]| -> (Vec<[f64; 2]>, Vec<f64>) {
        let q = pts.iter().map(|p| [dot(*p, u), dot(*p, v)]).collect();
        let h = pts.iter().map(|p| dot(*p, d)).collect();
        (q, h)
    };
    let (qa, ha) = project(va);
    let (qb, hb) = project(vb);

    let scale: f64 = qa
        .iter()
        .chain(&qb)
        .map(|p| p[0].abs().max(p[1].abs()))
        .fold(1.0, f64::max);
    let geo_tol = 1e-9 * scale;
    let par_margin = 1e-9;

    let na = va.len();
    let nb = vb.len();
    let mut total = 0i64;
    for i in 0..na {
        let a0 = qa[i];
        let a1 = qa[(i + 1) % na];
        let r = [a1[0] - a0[0], a1[1] - a0[1]];
        for j in 0..nb {
            let b0 = qb[j];
            let b1 = qb[(j + 1) % nb];
            let s = [b1[0] - b0[0], b1[1] - b0[1]];
            let denom = r[0] * s[1] - r[1] * s[0];
            let q = [b0[0] - a0[0], b0[1] - a0[1]];
            let len_r = (r[0] * r[0] + r[1] * r[1]).sqrt();
            let len_s = (s[0] * s[0] + s[1] * s[1]).sqrt();
            if denom.abs() <= 1e-12 * len_r * len_s {
                // Parallel in projection. Harmless unless the segments lie
                // on the same line and overlap as ranges.
                if len_r < geo_tol || len_s < geo_tol {
                    return Scan::Degenerate("segment collapses in projection");
                }
                let perp = (q[0] * r[1] - q[1] * r[0]) / len_r;
                if perp.abs() > geo_tol {
                    continue;
                }
                let t0 = (q[0] * r[0] + q[1] * r[1]) / (len_r * len_r);
                let t1 = t0 + (s[0] * r[0] + s[1] * r[1]) / (len_r * len_r);
                let (lo, hi) = (t0.min(t1), t0.max(t1));
                if hi < -par_margin || lo > 1.0 + par_margin {
                    continue;
                }
                return Scan::Degenerate("collinear overlap in projection");
            }
            let t = (q[0] * s[1] - q[1] * s[0]) / denom;
            let w = (q[0] * r[1] - q[1] * r[0]) / denom;
            let interior =
                |x: f64| x > par_margin && x < 1.0 - par_margin;
            let near_edge = |x: f64| (-par_margin..=par_margin).contains(&x)
                || (1.0 - par_margin..=1.0 + par_margin).contains(&x);
            if interior(t) && interior(w) {
                let h1 = ha[i] + t * (ha[(i + 1) % na] - ha[i]);
                let h2 = hb[j] + w * (hb[(j + 1) % nb] - hb[j]);
                if (h1 - h2).abs() <= geo_tol {
                    return Scan::Degenerate("strands touch at a crossing");
                }
                // Positive when (over tangent, under tangent) is positively
                // oriented in the projection plane.
                let orient = if denom > 0.0 { 1 } else { -1 };
                total += if h1 > h2 { orient } else { -orient };
            } else if (near_edge(t) && (-par_margin..=1.0 + par_margin).contains(&w))
                || (near_edge(w) && (-par_margin..=1.0 + par_margin).contains(&t))
            {
                return Scan::Degenerate("crossing at a segment endpoint");
            }
        }
    }
    Scan::Signed(total)
}

/// Default projection direction for the crossing count: fixed and slightly
/// irrational so axis-aligned inputs still project generically.
pub const DEFAULT_PROJECTION: Point = [0.267261241912424, 0.534522483824849, 0.801783725737273];

/// Both linking routes on one pair of loops.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LinkResult {
    pub value_gauss: f64,
    /// Present when both loops are polylines.
    pub value_crossing: Option<i64>,
    pub separation: f64,
    pub grid: usize,
}

/// Runs the Gauss integral, adds the crossing count when both loops are
/// polylines, and enforces that the two routes agree to within rounding
/// (|gauss - crossing| < 0.5).
pub fn link_pair(a: &LoopCurve, b: &LoopCurve, grid: usize) -> Result<LinkResult> {
    let sep = tube_separation(a, b);
    let value_gauss = linking_gauss(a, b, grid)?;
    let value_crossing = if a.form() == LoopForm::Polyline && b.form() == LoopForm::Polyline {
        Some(linking_crossing(a, b, DEFAULT_PROJECTION)?)
    } else {
        None
    };
    if let Some(c) = value_crossing {
        if (value_gauss - c as f64).abs() >= 0.5 {
            return Err(EngineError::InvariantViolation(format!(
                "Gauss integral {value_gauss} and crossing count {c} disagree by >= 0.5"
            )));
        }
    }
    Ok(LinkResult { value_gauss, value_crossing, separation: sep.value, grid })
}

/// The standard Hopf configuration used across tests and examples: the unit
/// circle in the xy-plane and a unit circle in the xz-plane threaded through
/// it, oriented so the pair links positively.
pub fn hopf_pair() -> (LoopCurve, LoopCurve) {
    let a = LoopCurve::unit_circle_xy();
    let b = LoopCurve::circle([1.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, -1.0]);
    (a, b)
}

/// A (2, 4) torus link: two parallel (1, 2) curves on the same torus, with
/// the handedness chosen so the pair links positively with linking number 2.
pub fn torus_24_pair() -> (LoopCurve, LoopCurve) {
    let a = LoopCurve::torus_curve(2.0, 0.5, -1, 2, 0.0).unwrap();
    let b = LoopCurve::torus_curve(2.0, 0.5, -1, 2, std::f64::consts::PI).unwrap();
    (a, b)
}
