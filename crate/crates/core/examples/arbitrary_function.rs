//! Any boolean function: parse an expression, build its DNF, minimize it,
//! compile both covers and check them against the truth table.
//!
//! Run with `cargo run --example arbitrary_function -- "(X1 & !X3) | (X2 & X4)"`.

use mpskit::boolean::{
    boolean_feature_maps, compile, complexity_report, minimize, parse_expr, to_dnf, verify, TruthTable,
};

fn main() -> mpskit::Result<()> {
    let text = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "(X1 & !X3) | (X2 & X4) | (X1 & X2 & X3)".into());
    let expr = parse_expr(&text)?;
    let n = expr.max_var().max(1);
    let table = TruthTable::from_expr(&expr, n)?;
    println!(
        "{expr}\narity {n}, {} true rows, hex {}",
        table.popcount(),
        table.to_hex()
    );

    let dnf = to_dnf(&table);
    let prime = minimize(&dnf);
    let fms = boolean_feature_maps(n);
    for (label, cover) in [("minterm cover", &dnf), ("minimized cover", &prime)] {
        let mps = compile(cover, n)?;
        let report = verify(&mps, &fms, &table)?;
        println!(
            "{label}: {} terms, bond dims {:?}, verify {}/{} {}",
            cover.len(),
            mps.bond_dims(),
            report.rows_checked,
            report.rows_total,
            if report.passed() { "PASS" } else { "FAIL" }
        );
    }
    let r = complexity_report(&dnf);
    println!(
        "parameters {} -> {} after minimization",
        r.parameter_count, r.parameter_count_minimized
    );
    Ok(())
}
