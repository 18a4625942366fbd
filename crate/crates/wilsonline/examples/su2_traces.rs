//! Orthonormal su(2) basis, the tensor-square operator, and its trace
//! powers against the closed form.
//!
//! Run with: cargo run --example su2_traces

use wilsonline::lie_rep::{casimir_tensor, su2_trace_power_closed_form, tensor_trace_power, RepBasis};

fn main() {
    let basis = RepBasis::su2();
    println!("basis {:?}: {} generators on C^{}", basis.name(), basis.dim_algebra(), basis.dim_rep());
    for (a, e) in basis.generators().iter().enumerate() {
        println!(
            "  E_{a}: anti-Hermitian defect {:.2e}, largest entry-column sum {:.3}",
            e.anti_hermitian_defect(),
            e.entry_l1_norm()
        );
    }
    let gram = basis.gram();
    println!("Gram matrix of -Tr(E_a E_b) (should be the identity):");
    for i in 0..basis.dim_algebra() {
        let row: Vec<String> =
            (0..basis.dim_algebra()).map(|j| format!("{:+.3}", gram.at(i, j).re)).collect();
        println!("  [{}]", row.join(", "));
    }

    let m = casimir_tensor(&basis);
    let doubled = m.matrix.scale_re(2.0);
    println!("\neigenvalues of 2 sum_a E_a (x) E_a: {:?}", doubled.hermitian_eigenvalues());

    println!("\ntrace powers Tr(M^m) vs closed form (3(-1)^m + 3^m)/2^m:");
    println!("  m | numeric        | closed      | difference");
    for m in 0..=8 {
        let numeric = tensor_trace_power(&basis, m);
        let closed = su2_trace_power_closed_form(m);
        println!(
            "  {m} | {:>13.8} | {:>11.8} | {:.2e}",
            numeric.re,
            closed,
            (numeric.re - closed).abs().max(numeric.im.abs())
        );
    }
}
