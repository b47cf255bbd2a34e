//! CPLEX-style LP text emitter, for human-readable debugging.

use super::{Comparator, IlpModel};
use std::fmt::Write;

pub fn export_lp(model: &IlpModel) -> String {
    let mut out = String::from("Maximize\n obj:");
    let mut any = false;
    for (j, &c) in model.objective.iter().enumerate() {
        if c != 0 {
            write!(out, " {} {} x{j}", if c < 0 { "-" } else { "+" }, c.abs()).unwrap();
            any = true;
        }
    }
    if !any {
        out.push_str(" 0 x0");
    }
    out.push_str("\nSubject To\n");
    for (idx, c) in model.constraints.iter().enumerate() {
        write!(out, " r{idx}:").unwrap();
        for &(j, coef) in &c.terms {
            write!(
                out,
                " {} {} x{j}",
                if coef < 0 { "-" } else { "+" },
                coef.abs()
            )
            .unwrap();
        }
        let cmp = match c.comparator {
            Comparator::Le => "<=",
            Comparator::Eq => "=",
        };
        writeln!(out, " {cmp} {}", c.rhs).unwrap();
    }
    out.push_str("Binary\n");
    for j in 0..model.num_variables() {
        writeln!(out, " x{j}").unwrap();
    }
    out.push_str("End\n");
    out
}
