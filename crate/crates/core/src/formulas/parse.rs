use std::collections::BTreeMap;

use thiserror::Error;

use super::{Atom, Instance, Problem, RelationSymbol, TheoryDecl, TheoryId, Variable};
use crate::theories::{HensonSolver, TemporalRelation, TemporalSolver, TheoryKind, TournamentSet, WeakOrder};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("malformed line: {0}")]
    Malformed(String),
    #[error("invalid identifier `{0}`")]
    InvalidName(String),
    #[error("undeclared theory `{0}`")]
    UndeclaredTheory(String),
    #[error("undeclared relation `{0}`")]
    UndeclaredRelation(String),
    #[error("relation `{name}` has arity {expected}, got {found} arguments")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("duplicate declaration of `{0}`")]
    Duplicate(String),
}

fn err<T>(line: usize, kind: ParseErrorKind) -> Result<T, ParseError> {
    Err(ParseError { line, kind })
}

fn malformed<T>(line: usize, msg: impl Into<String>) -> Result<T, ParseError> {
    err(line, ParseErrorKind::Malformed(msg.into()))
}

fn ident(line: usize, s: &str) -> Result<String, ParseError> {
    if Variable::is_valid_name(s) {
        Ok(s.to_string())
    } else {
        err(line, ParseErrorKind::InvalidName(s.to_string()))
    }
}

enum PendingKind {
    Equality,
    PointAlgebra,
    Temporal(BTreeMap<String, TemporalRelation>),
    Henson(TournamentSet, bool),
}

struct PendingTheory {
    kind: PendingKind,
    convex: Option<bool>,
}

struct PendingAtom<'a> {
    line: usize,
    words: Vec<&'a str>,
}

fn parse_order_types(line: usize, arity: usize, list: &str) -> Result<Vec<WeakOrder>, ParseError> {
    list.split(',')
        .map(|ot| {
            let ranks = ot
                .split('/')
                .map(|r| r.parse::<u8>())
                .collect::<Result<Vec<_>, _>>()
                .or_else(|_| malformed(line, format!("bad order type `{ot}`")))?;
            if ranks.len() != arity {
                return malformed(line, format!("order type `{ot}` does not have length {arity}"));
            }
            WeakOrder::new(ranks).or_else(|e| malformed(line, e.to_string()))
        })
        .collect()
}

fn parse_convexity(line: usize, word: Option<&&str>) -> Result<Option<bool>, ParseError> {
    match word {
        None => Ok(None),
        Some(&"convex") => Ok(Some(true)),
        Some(&"nonconvex") => Ok(Some(false)),
        Some(other) => malformed(line, format!("unexpected `{other}`")),
    }
}

/// Parses the line-oriented instance format.
pub fn parse_problem(text: &str) -> Result<Problem, ParseError> {
    let mut theories: BTreeMap<String, PendingTheory> = BTreeMap::new();
    let mut atoms = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        let words: Vec<&str> = content.split_whitespace().collect();
        let Some(&head) = words.first() else { continue };
        match head {
            "theory" => {
                if words.len() < 3 {
                    return malformed(line, "expected `theory <tid> <kind>`");
                }
                let tid = ident(line, words[1])?;
                if theories.contains_key(&tid) {
                    return err(line, ParseErrorKind::Duplicate(tid));
                }
                let (kind, rest) = match words[2] {
                    "equality" => (PendingKind::Equality, &words[3..]),
                    "point_algebra" => (PendingKind::PointAlgebra, &words[3..]),
                    "temporal" => (PendingKind::Temporal(BTreeMap::new()), &words[3..]),
                    "henson" => {
                        if words.get(3) != Some(&"forbid") || words.len() < 5 {
                            return malformed(line, "expected `henson forbid <tournaments>`");
                        }
                        let set = TournamentSet::parse(words[4]).or_else(|e| malformed(line, e.to_string()))?;
                        let loop_vertex = words.get(5) == Some(&"loop");
                        (
                            PendingKind::Henson(set, loop_vertex),
                            &words[5 + usize::from(loop_vertex)..],
                        )
                    }
                    other => return malformed(line, format!("unknown theory kind `{other}`")),
                };
                if rest.len() > 1 {
                    return malformed(line, format!("unexpected `{}`", rest[1]));
                }
                let convex = parse_convexity(line, rest.first())?;
                theories.insert(tid, PendingTheory { kind, convex });
            }
            "relation" => {
                if words.len() < 4 {
                    return malformed(line, "expected `relation <tid> <name>/<k> ...`");
                }
                let tid = words[1];
                let (name, arity) = words[2]
                    .split_once('/')
                    .and_then(|(n, k)| Some((n, k.parse::<usize>().ok()?)))
                    .filter(|&(_, k)| k >= 1)
                    .map_or_else(|| malformed(line, format!("bad relation signature `{}`", words[2])), Ok)?;
                let name = ident(line, name)?;
                let relation = match (words[3], words.len()) {
                    ("ordertypes", 5) => TemporalRelation::new(arity, parse_order_types(line, arity, words[4])?)
                        .or_else(|e| malformed(line, e.to_string()))?,
                    ("builtin", 5) if words[4] == "mi" => {
                        if arity != 3 {
                            return err(
                                line,
                                ParseErrorKind::ArityMismatch {
                                    name,
                                    expected: 3,
                                    found: arity,
                                },
                            );
                        }
                        TemporalRelation::mi()
                    }
                    _ => return malformed(line, "expected `ordertypes <list>` or `builtin mi`"),
                };
                let theory = theories
                    .get_mut(tid)
                    .map_or_else(|| err(line, ParseErrorKind::UndeclaredTheory(tid.to_string())), Ok)?;
                let PendingKind::Temporal(rels) = &mut theory.kind else {
                    return malformed(line, format!("theory `{tid}` is not temporal"));
                };
                if name == "lt" || name == "leq" || rels.contains_key(&name) {
                    return err(line, ParseErrorKind::Duplicate(name));
                }
                rels.insert(name, relation);
            }
            "atom" | "eq" | "neq" => atoms.push(PendingAtom { line, words }),
            other => return malformed(line, format!("unknown directive `{other}`")),
        }
    }

    let theories: BTreeMap<TheoryId, TheoryDecl> = theories
        .into_iter()
        .map(|(tid, pending)| {
            let kind = match pending.kind {
                PendingKind::Equality => TheoryKind::Equality,
                PendingKind::PointAlgebra => TheoryKind::PointAlgebra,
                PendingKind::Temporal(rels) => TheoryKind::Temporal(TemporalSolver::new(rels)),
                PendingKind::Henson(set, false) => TheoryKind::Henson(HensonSolver::new(set)),
                PendingKind::Henson(set, true) => TheoryKind::Henson(HensonSolver::with_loop_vertex(set)),
            };
            let decl = TheoryDecl::new(kind);
            let decl = match pending.convex {
                Some(c) => decl.with_convex(c),
                None => decl,
            };
            (TheoryId::new(&tid), decl)
        })
        .collect();
    let mut problem = Problem {
        theories,
        instance: Instance::new(),
    };

    let mut instance = Instance::new();
    for PendingAtom { line, words } in atoms {
        let var = |s: &str| ident(line, s).map(|n| Variable::new(&n));
        let atom = match words[0] {
            "eq" | "neq" => {
                if words.len() != 3 {
                    return malformed(line, format!("`{}` takes two variables", words[0]));
                }
                let (x, y) = (var(words[1])?, var(words[2])?);
                if words[0] == "eq" {
                    Atom::eq(x, y)
                } else {
                    Atom::neq(x, y)
                }
            }
            _ => {
                if words.len() < 3 {
                    return malformed(line, "expected `atom <tid> <name> <vars>`");
                }
                let (tid, name) = (words[1], words[2]);
                let Some(decl) = problem.theories.get(&TheoryId::new(tid)) else {
                    return err(line, ParseErrorKind::UndeclaredTheory(tid.to_string()));
                };
                let Some(arity) = decl.kind.arity_of(name) else {
                    return err(line, ParseErrorKind::UndeclaredRelation(format!("{tid} {name}")));
                };
                let args = words[3..].iter().map(|w| var(w)).collect::<Result<Vec<_>, _>>()?;
                if args.len() != arity {
                    return err(
                        line,
                        ParseErrorKind::ArityMismatch {
                            name: name.to_string(),
                            expected: arity,
                            found: args.len(),
                        },
                    );
                }
                Atom::rel(RelationSymbol::new(tid, name, arity), args)
            }
        };
        instance.insert(atom);
    }
    problem.instance = instance;
    Ok(problem)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kind(text: &str) -> ParseErrorKind {
        parse_problem(text).unwrap_err().kind
    }

    #[test]
    fn minimal() {
        let p = parse_problem("theory t1 equality\nneq x y").unwrap();
        assert_eq!(p.theories.len(), 1);
        assert_eq!(p.instance, Instance::from_atoms([Atom::neq("x", "y")]));
    }

    #[test]
    fn arity_mismatch() {
        assert!(matches!(
            kind("theory t1 point_algebra\natom t1 lt x"),
            ParseErrorKind::ArityMismatch {
                expected: 2,
                found: 1,
                ..
            }
        ));
    }

    #[test]
    fn builtin_mi() {
        let p = parse_problem(
            "# mi fixture\ntheory t temporal nonconvex\nrelation t mi/3 builtin mi\natom t mi x y z\natom t leq x y\n",
        )
        .unwrap();
        let TheoryKind::Temporal(t) = &p.theories[&TheoryId::new("t")].kind else {
            panic!()
        };
        let mi = t.relation("mi").unwrap();
        assert_eq!(mi.arity(), 3);
        assert_eq!(mi.allowed().len(), 9);
        assert_eq!(p.instance.len(), 2);
    }

    #[test]
    fn order_types() {
        let p = parse_problem("theory t temporal\nrelation t r/3 ordertypes 0/1/0,0/0/0\natom t r a b c").unwrap();
        let TheoryKind::Temporal(t) = &p.theories[&TheoryId::new("t")].kind else {
            panic!()
        };
        assert_eq!(t.relation("r").unwrap().allowed().len(), 2);
        assert!(matches!(
            kind("theory t temporal\nrelation t r/2 ordertypes 0/2"),
            ParseErrorKind::Malformed(_)
        ));
        assert!(matches!(
            kind("theory t temporal\nrelation t r/2 ordertypes 0/1/0"),
            ParseErrorKind::Malformed(_)
        ));
    }

    #[test]
    fn line_numbers() {
        let e = parse_problem("theory t equality\n\n# comment\nbogus line").unwrap_err();
        assert_eq!(e.line, 4);
    }

    #[test]
    fn undeclared() {
        assert!(matches!(kind("atom t lt x y"), ParseErrorKind::UndeclaredTheory(_)));
        assert!(matches!(
            kind("theory t point_algebra\natom t prec x y"),
            ParseErrorKind::UndeclaredRelation(_)
        ));
        assert!(matches!(
            kind("relation t r/1 ordertypes 0"),
            ParseErrorKind::UndeclaredTheory(_)
        ));
    }

    #[test]
    fn duplicates() {
        assert!(matches!(
            kind("theory t equality\ntheory t temporal"),
            ParseErrorKind::Duplicate(_)
        ));
        assert!(matches!(
            kind("theory t temporal\nrelation t r/1 ordertypes 0\nrelation t r/1 ordertypes 0"),
            ParseErrorKind::Duplicate(_)
        ));
        assert!(matches!(
            kind("theory t temporal\nrelation t lt/2 ordertypes 0/1"),
            ParseErrorKind::Duplicate(_)
        ));
    }

    #[test]
    fn henson_theory() {
        let p = parse_problem("theory h henson forbid a>b,b>c,c>a\natom h E x y\nneq x x").unwrap();
        assert!(!p.theories[&TheoryId::new("h")].convex);
        assert!(parse_problem("theory h henson forbid a>b").is_ok());
        let p = parse_problem("theory h henson forbid a>b,b>c,c>a loop").unwrap();
        assert!(matches!(&p.theories[&TheoryId::new("h")].kind, TheoryKind::Henson(s) if s.loop_vertex));
        assert!(matches!(
            kind("theory h henson forbid a>b loop loop"),
            ParseErrorKind::Malformed(_)
        ));
        assert!(matches!(
            kind("theory h henson forbid a>b,b>a"),
            ParseErrorKind::Malformed(_)
        ));
        assert!(matches!(kind("theory h henson a>b,b>a"), ParseErrorKind::Malformed(_)));
    }

    #[test]
    fn convexity_flags() {
        let p = parse_problem("theory t temporal convex\ntheory p point_algebra nonconvex").unwrap();
        assert!(p.theories[&TheoryId::new("t")].convex);
        assert!(!p.theories[&TheoryId::new("p")].convex);
        assert!(matches!(
            kind("theory t temporal sometimes"),
            ParseErrorKind::Malformed(_)
        ));
    }

    #[test]
    fn bad_names() {
        assert!(matches!(kind("neq 1x y"), ParseErrorKind::InvalidName(_)));
        assert!(matches!(kind("theory t-1 equality"), ParseErrorKind::InvalidName(_)));
    }
}
