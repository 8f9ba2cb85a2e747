//! Canonical layout: one definition, piece, application or table entry per
//! line, two-space indentation per level, trailing newline.

use std::fmt::Write;

use super::ast::{FiniteInstance, Language, RelationSet, Summand, Threshold, VcspInstance};

pub fn print_language(lang: &Language) -> String {
    let mut out = String::from("(lang");
    for f in &lang.functions {
        write!(out, "\n  (def {} {}", f.name, f.arity).unwrap();
        for p in &f.pieces {
            write!(out, "\n    (piece {} (and", p.value).unwrap();
            if p.guard.is_empty() {
                out.push_str(" true");
            }
            for a in &p.guard {
                write!(out, " {a}").unwrap();
            }
            out.push_str("))");
        }
        out.push(')');
    }
    out.push_str(")\n");
    out
}

pub fn print_relations(rels: &RelationSet) -> String {
    let mut out = String::from("(rels");
    for r in &rels.relations {
        write!(out, "\n  (rel {} {}\n    {})", r.name, r.arity, r.formula).unwrap();
    }
    out.push_str(")\n");
    out
}

fn print_sum(out: &mut String, summands: &[Summand]) {
    out.push_str("\n  (sum");
    for s in summands {
        write!(out, "\n    (app {}", s.function).unwrap();
        for v in &s.args {
            write!(out, " {v}").unwrap();
        }
        out.push(')');
    }
    out.push(')');
}

pub fn print_instance(inst: &VcspInstance) -> String {
    let mut out = format!("(inst\n  (vars {})", inst.num_vars);
    print_sum(&mut out, &inst.summands);
    let threshold = match &inst.threshold {
        Threshold::Absent => "none".to_string(),
        Threshold::Infinite => "inf".to_string(),
        Threshold::Value(q) => q.to_string(),
    };
    write!(out, "\n  (threshold {threshold}))\n").unwrap();
    out
}

pub fn print_finite_instance(inst: &FiniteInstance) -> String {
    let mut out = format!("(base\n  (vars {})", inst.num_vars);
    for t in &inst.tables {
        write!(out, "\n  (table {} {}", t.name, t.arity).unwrap();
        for (point, cost) in &t.entries {
            let coords: Vec<String> = point.iter().map(|q| q.to_string()).collect();
            write!(out, "\n    (entry ({}) {cost})", coords.join(" ")).unwrap();
        }
        out.push(')');
    }
    print_sum(&mut out, &inst.summands);
    out.push_str(")\n");
    out
}
