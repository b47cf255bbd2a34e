//! Fixed-format MPS serialization.
//!
//! Rows are emitted in constraint order (families are already ordered by
//! the model builders), columns in variable order, so output is
//! byte-identical across runs for the same model. All variables are marked
//! binary via `BV` bounds and an `INTORG`/`INTEND` marker block; the
//! objective sense is declared with an `OBJSENSE` section.

use super::{Comparator, IlpModel};
use std::fmt::Write;

fn row_name(index: usize) -> String {
    format!("R{index:07}")
}

fn col_name(index: usize) -> String {
    format!("X{index:07}")
}

pub fn export_mps(model: &IlpModel) -> String {
    let mut out = String::new();
    out.push_str("NAME          MAPFDL\n");
    out.push_str("OBJSENSE\n    MAX\n");

    out.push_str("ROWS\n");
    out.push_str(" N  COST\n");
    for (idx, c) in model.constraints.iter().enumerate() {
        let kind = match c.comparator {
            Comparator::Le => 'L',
            Comparator::Eq => 'E',
        };
        writeln!(out, " {}  {}", kind, row_name(idx)).unwrap();
    }

    // Column-major entries: objective first, then constraint rows in order.
    let mut column_entries: Vec<Vec<(String, i64)>> = vec![Vec::new(); model.num_variables()];
    for (j, &c) in model.objective.iter().enumerate() {
        if c != 0 {
            column_entries[j].push(("COST".to_string(), c));
        }
    }
    for (idx, c) in model.constraints.iter().enumerate() {
        for &(j, coef) in &c.terms {
            column_entries[j].push((row_name(idx), coef));
        }
    }

    out.push_str("COLUMNS\n");
    if model.num_variables() > 0 {
        out.push_str("    MARKER                 'MARKER'                 'INTORG'\n");
    }
    for (j, entries) in column_entries.iter().enumerate() {
        let name = col_name(j);
        for pair in entries.chunks(2) {
            match pair {
                [(r1, v1), (r2, v2)] => {
                    writeln!(out, "    {name:<8}  {r1:<8}  {v1:<12}   {r2:<8}  {v2:<12}").unwrap()
                }
                [(r1, v1)] => writeln!(out, "    {name:<8}  {r1:<8}  {v1:<12}").unwrap(),
                _ => unreachable!(),
            }
        }
    }
    if model.num_variables() > 0 {
        out.push_str("    MARKER                 'MARKER'                 'INTEND'\n");
    }

    out.push_str("RHS\n");
    for (idx, c) in model.constraints.iter().enumerate() {
        if c.rhs != 0 {
            writeln!(out, "    RHS       {:<8}  {:<12}", row_name(idx), c.rhs).unwrap();
        }
    }

    out.push_str("BOUNDS\n");
    for j in 0..model.num_variables() {
        writeln!(out, " BV BND       {:<8}", col_name(j)).unwrap();
    }
    out.push_str("ENDATA\n");
    out
}
