use std::fmt::Write;

use super::{AtomKind, Problem};
use crate::theories::TheoryKind;

/// Canonical text form of a problem; `parse_problem` reads it back to an
/// equal value.
pub fn render_problem(problem: &Problem) -> String {
    let mut out = String::new();
    for (tid, decl) in &problem.theories {
        write!(out, "theory {tid} {}", decl.kind.keyword()).unwrap();
        if let TheoryKind::Henson(h) = &decl.kind {
            write!(out, " forbid {}", h.forbidden).unwrap();
            if h.loop_vertex {
                out.push_str(" loop");
            }
        }
        if decl.convex != decl.kind.default_convexity() {
            out.push_str(if decl.convex { " convex" } else { " nonconvex" });
        }
        out.push('\n');
    }
    for (tid, decl) in &problem.theories {
        if let TheoryKind::Temporal(t) = &decl.kind {
            for (name, rel) in t.declared() {
                let types: Vec<String> = rel.allowed().iter().map(|w| w.to_string()).collect();
                writeln!(
                    out,
                    "relation {tid} {name}/{} ordertypes {}",
                    rel.arity(),
                    types.join(",")
                )
                .unwrap();
            }
        }
    }
    for atom in problem.instance.atoms() {
        match &atom.kind {
            AtomKind::Rel(sym) => write!(out, "atom {} {}", sym.theory, sym.name).unwrap(),
            AtomKind::Eq => out.push_str("eq"),
            AtomKind::Neq => out.push_str("neq"),
        }
        for v in &atom.args {
            write!(out, " {v}").unwrap();
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::parse_problem;
    use super::*;

    #[test]
    fn round_trip_fixture() {
        let text = "theory h henson forbid c>a,a>b,b>c\n\
                    theory t temporal\n\
                    relation t mi/3 builtin mi\n\
                    relation t r/2 ordertypes 1/0\n\
                    atom t mi x y z\natom h E x y\neq x w\nneq y z\n";
        let p = parse_problem(text).unwrap();
        let rendered = render_problem(&p);
        assert_eq!(parse_problem(&rendered).unwrap(), p);
        assert_eq!(render_problem(&parse_problem(&rendered).unwrap()), rendered);
    }
}
