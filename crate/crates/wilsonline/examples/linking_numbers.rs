//! Linking numbers two ways: the double pairing integral and, for
//! polylines, exact signed crossings under a generic projection.
//!
//! Run with: cargo run --example linking_numbers

use wilsonline::geometry::LoopCurve;
use wilsonline::topology::{self, link_pair, linking_gauss};

fn main() {
    // Hopf pair: two unit circles through each other's centers.
    let (a, b) = topology::hopf_pair();
    for grid in [64usize, 128, 256, 512] {
        let value = linking_gauss(&a, &b, grid).unwrap();
        println!("hopf pair, grid {grid:>4}: integral {value:+.10} (err {:.2e})", (value - 1.0).abs());
    }

    // Torus-knot style pair linking twice.
    let (ta, tb) = topology::torus_24_pair();
    let torus = linking_gauss(&ta, &tb, 512).unwrap();
    println!("torus pair, grid 512: integral {torus:+.10} (expected +2)");

    // Polyline pair: both routes plus the built-in cross-check.
    let square = LoopCurve::polyline(
        vec![[1.0, 1.0, 0.0], [-1.0, 1.0, 0.0], [-1.0, -1.0, 0.0], [1.0, -1.0, 0.0]],
        None,
    )
    .unwrap();
    let thread = LoopCurve::polyline(
        vec![[0.5, 0.0, -1.0], [3.0, 0.0, -1.0], [3.0, 0.0, 1.0], [0.5, 0.0, 1.0]],
        None,
    )
    .unwrap();
    let result = link_pair(&square, &thread, 512).unwrap();
    println!(
        "\nlinked squares: integral {:+.6}, crossings {:?}, separation {:.3}",
        result.value_gauss, result.value_crossing, result.separation
    );

    // Unlinked case and orientation reversal.
    let far = thread.translated([5.0, 0.0, 0.0]);
    let unlinked = link_pair(&square, &far, 256).unwrap();
    println!("separated squares: integral {:+.6}, crossings {:?}", unlinked.value_gauss, unlinked.value_crossing);
    let reversed = linking_gauss(&square, &thread.reversed(), 512).unwrap();
    println!("reversed thread: integral {reversed:+.6} (sign flipped)");
}
