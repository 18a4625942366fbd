//! The large-level series for the expected two-loop trace product: grouped
//! terms, partial sums against the closed form, and the decay of scaled
//! remainders.
//!
//! Run with: cargo run --example two_loop_expansion

use wilsonline::expansion::{closed_form_su2, decay_check, expansion_report};

fn main() {
    let (linking, level) = (1.0, 5.0);
    let report = expansion_report(linking, level, 8).unwrap();
    let closed = closed_form_su2(linking, level).unwrap();
    println!("two-loop su(2) fundamental, L = {linking}, k = {level}");
    println!("closed form: {:+.10} {:+.10}i", closed.re, closed.im);

    println!("\n n | grade | term                          | partial sum remainder");
    for (n, term) in report.terms_by_pairing.iter().enumerate() {
        println!(
            "  {n} |  {:>2}   | {:+.3e} {:+.3e}i | {:.3e}",
            2 * n,
            term[0],
            term[1],
            report.remainders[n]
        );
    }

    println!("\nscaled remainders k^(grade/2) |closed - partial| across levels:");
    let levels = [10.0, 100.0, 1000.0];
    println!("  grade | k = 10      | k = 100     | k = 1000");
    for grade in [2usize, 4, 6] {
        let scaled = decay_check(linking, &levels, grade).unwrap();
        println!("    {grade}   | {:.4e} | {:.4e} | {:.4e}", scaled[0], scaled[1], scaled[2]);
    }
    println!("(bounded rows certify the O(k^(-grade/2)) truncation error;");
    println!(" the grade-2 row decays outright because its first omitted term");
    println!(" carries the vanishing su(2) weight 3(-1)^1 + 3^1 = 0)");
}
