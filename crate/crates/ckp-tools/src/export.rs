//! LP-format model writer. The output is deterministic and byte-stable
//! (fixed term order, fixed spacing, newline-terminated) so exported models
//! can be golden-file tested; any LP-format reader can consume it.

use std::fmt::Write as _;

use ckp_core::model::Instance;

fn push_terms(out: &mut String, terms: impl Iterator<Item = (i64, String)>) {
    let mut first = true;
    for (coefficient, body) in terms {
        if first {
            if coefficient < 0 {
                out.push_str("- ");
            }
            first = false;
        } else if coefficient < 0 {
            out.push_str(" - ");
        } else {
            out.push_str(" + ");
        }
        out.push_str(&body);
    }
}

/// Renders the 0/1 model: maximize total profit subject to the capacity row
/// and, per color, "items of the color minus all others at most one" (the
/// selected set admits an interleaving exactly when every such row holds).
pub fn export_ilp(instance: &Instance) -> String {
    let mut out = String::new();
    out.push_str("Maximize\n obj:");
    if instance.n > 0 {
        out.push(' ');
        push_terms(
            &mut out,
            instance
                .items
                .iter()
                .enumerate()
                .map(|(i, it)| (it.profit, format!("{} x{}", it.profit.abs(), i + 1))),
        );
    }
    out.push_str("\nSubject To\n");
    if instance.n > 0 {
        out.push_str(" cap: ");
        push_terms(
            &mut out,
            instance
                .items
                .iter()
                .enumerate()
                .map(|(i, it)| (it.weight, format!("{} x{}", it.weight, i + 1))),
        );
        let _ = writeln!(out, " <= {}", instance.b);
        for c in 1..=instance.m {
            let _ = write!(out, " col_{c}: ");
            push_terms(
                &mut out,
                instance.items.iter().enumerate().map(|(i, it)| {
                    let sign = if it.color == c { 1 } else { -1 };
                    (sign, format!("x{}", i + 1))
                }),
            );
            out.push_str(" <= 1\n");
        }
        out.push_str("Binaries\n");
        let vars: Vec<String> = (1..=instance.n).map(|i| format!("x{i}")).collect();
        let _ = writeln!(out, " {}", vars.join(" "));
    }
    out.push_str("End\n");
    out
}
