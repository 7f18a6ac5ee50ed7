//! S-expression front-end and printer.
//!
//! ```text
//! (relation (reals x) (ints y) (body (and (> x x') (>= y' y))))
//! ```
//!
//! Comparisons between two terms are normalized to the `=`, `>`, `mod=` core
//! at parse time. Primed variables carry a trailing apostrophe.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, ParseError, ParseErrorKind};
use crate::formula::{compare, normalize_atom, rat, Atom, Formula, LinTerm, RatTerm, Rel, Role, Sort, Var};
use crate::harness::System;
use crate::relation::Relation;

type PResult<T> = std::result::Result<T, ParseError>;

#[derive(Debug, Clone)]
enum Sexp {
    Sym(String, usize, usize),
    List(Vec<Sexp>, usize, usize),
}

impl Sexp {
    fn pos(&self) -> (usize, usize) {
        match self {
            Sexp::Sym(_, l, c) | Sexp::List(_, l, c) => (*l, *c),
        }
    }

    fn err<T>(&self, kind: fn(String) -> ParseErrorKind, msg: impl Into<String>) -> PResult<T> {
        let (line, col) = self.pos();
        Err(ParseError {
            line,
            col,
            kind: kind(msg.into()),
        })
    }

    fn sym(&self) -> Option<&str> {
        match self {
            Sexp::Sym(s, ..) => Some(s),
            Sexp::List(..) => None,
        }
    }

    fn list(&self) -> PResult<&[Sexp]> {
        match self {
            Sexp::List(items, ..) => Ok(items),
            Sexp::Sym(s, ..) => self.err(ParseErrorKind::Syntax, format!("expected a list, found `{s}`")),
        }
    }

    /// Head keyword and arguments of a list form.
    fn form(&self) -> Option<(&str, &[Sexp])> {
        match self {
            Sexp::List(items, ..) => match items.first() {
                Some(Sexp::Sym(h, ..)) => Some((h.as_str(), &items[1..])),
                _ => None,
            },
            Sexp::Sym(..) => None,
        }
    }
}

fn read_all(text: &str) -> PResult<Vec<Sexp>> {
    let mut stack: Vec<(Vec<Sexp>, usize, usize)> = Vec::new();
    let mut top = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);
    while let Some(&ch) = chars.peek() {
        match ch {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            ';' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            '(' => {
                chars.next();
                stack.push((Vec::new(), line, col));
                col += 1;
            }
            ')' => {
                chars.next();
                let Some((items, l, c)) = stack.pop() else {
                    return Err(ParseError {
                        line,
                        col,
                        kind: ParseErrorKind::Syntax("unbalanced `)`".into()),
                    });
                };
                col += 1;
                let e = Sexp::List(items, l, c);
                match stack.last_mut() {
                    Some(parent) => parent.0.push(e),
                    None => top.push(e),
                }
            }
            _ => {
                let (l, c) = (line, col);
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    s.push(c);
                    chars.next();
                    col += 1;
                }
                let e = Sexp::Sym(s, l, c);
                match stack.last_mut() {
                    Some(parent) => parent.0.push(e),
                    None => top.push(e),
                }
            }
        }
    }
    if let Some((_, l, c)) = stack.pop() {
        return Err(ParseError {
            line: l,
            col: c,
            kind: ParseErrorKind::Syntax("unclosed `(`".into()),
        });
    }
    Ok(top)
}

fn read_one(text: &str) -> PResult<Sexp> {
    let mut all = read_all(text)?;
    match all.len() {
        1 => Ok(all.pop().unwrap()),
        0 => Err(ParseError {
            line: 1,
            col: 1,
            kind: ParseErrorKind::Syntax("empty input".into()),
        }),
        _ => all[1].err(ParseErrorKind::Syntax, "trailing input after the document"),
    }
}

fn parse_int(s: &str) -> Option<BigInt> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    s.parse().ok()
}

const KEYWORDS: &[&str] = &[
    "and", "or", "not", "exists", "forall", "true", "false", "real", "int", "mod=", "=>",
];

/// Variable scope used while reading formulas.
#[derive(Clone, Debug, Default)]
pub struct Scope {
    declared: BTreeMap<String, Sort>,
    allow_primed: bool,
    binders: Vec<(String, Var)>,
}

impl Scope {
    /// Scope over `vars` (unprimed names); primed copies are accepted when
    /// `allow_primed` is set.
    pub fn new(vars: &[Var], allow_primed: bool) -> Self {
        Scope {
            declared: vars
                .iter()
                .map(|v| (v.name().to_string(), v.sort()))
                .collect(),
            allow_primed,
            binders: Vec::new(),
        }
    }

    fn resolve(&self, e: &Sexp, name: &str) -> PResult<Var> {
        if let Some((_, v)) = self.binders.iter().rev().find(|(n, _)| n == name) {
            return Ok(v.clone());
        }
        if let Some(base) = name.strip_suffix('\'') {
            if let Some(&sort) = self.declared.get(base) {
                if !self.allow_primed {
                    return e.err(
                        ParseErrorKind::Undeclared,
                        format!("primed variable `{name}` is not allowed here"),
                    );
                }
                return Ok(Var::new(base, sort, Role::Primed));
            }
        }
        match self.declared.get(name) {
            Some(&sort) => Ok(Var::new(name, sort, Role::Unprimed)),
            None => e.err(ParseErrorKind::Undeclared, format!("`{name}`")),
        }
    }
}

fn term(scope: &Scope, e: &Sexp) -> PResult<RatTerm> {
    if let Some(s) = e.sym() {
        if let Some(n) = parse_int(s) {
            return Ok(RatTerm::constant_term(rat(n)));
        }
        if KEYWORDS.contains(&s) {
            return e.err(ParseErrorKind::Syntax, format!("`{s}` is not a term"));
        }
        return Ok(RatTerm::var(scope.resolve(e, s)?));
    }
    let Some((head, args)) = e.form() else {
        return e.err(ParseErrorKind::Syntax, "malformed term");
    };
    match head {
        "+" => {
            let mut acc = RatTerm::zero();
            for a in args {
                acc = acc.add(&term(scope, a)?);
            }
            Ok(acc)
        }
        "-" => match args {
            [a] => Ok(term(scope, a)?.scale(&-rat(1))),
            [a, rest @ ..] if !rest.is_empty() => {
                let mut acc = term(scope, a)?;
                for b in rest {
                    acc = acc.sub(&term(scope, b)?);
                }
                Ok(acc)
            }
            _ => e.err(ParseErrorKind::Syntax, "`-` takes one or more terms"),
        },
        "*" => {
            let mut acc = RatTerm::constant_term(rat(1));
            let mut linear = false;
            for a in args {
                let t = term(scope, a)?;
                let ground = t.coeffs().is_empty();
                if ground {
                    acc = acc.scale(t.constant());
                } else if linear || !acc.coeffs().is_empty() {
                    return e.err(ParseErrorKind::Nonlinear, "product of two variable terms");
                } else {
                    acc = t.scale(acc.constant());
                    linear = true;
                }
            }
            Ok(acc)
        }
        _ => e.err(ParseErrorKind::Syntax, format!("unknown term operator `{head}`")),
    }
}

fn map_err(e: &Sexp, err: Error) -> ParseError {
    let (line, col) = e.pos();
    let kind = match err {
        Error::Sort(m) => ParseErrorKind::Sort(m),
        Error::BadModulus(d) => ParseErrorKind::Syntax(format!("modulus must be positive, got {d}")),
        other => ParseErrorKind::Syntax(other.to_string()),
    };
    ParseError { line, col, kind }
}

fn formula(scope: &mut Scope, e: &Sexp) -> PResult<Formula> {
    if let Some(s) = e.sym() {
        return match s {
            "true" => Ok(Formula::True),
            "false" => Ok(Formula::False),
            _ if parse_int(s).is_some() => {
                e.err(ParseErrorKind::Sort, format!("integer `{s}` used as a formula"))
            }
            _ => {
                scope.resolve(e, s)?;
                e.err(ParseErrorKind::Sort, format!("variable `{s}` used as a formula"))
            }
        };
    }
    let Some((head, args)) = e.form() else {
        return e.err(ParseErrorKind::Syntax, "malformed formula");
    };
    match head {
        "and" | "or" => {
            let parts = args
                .iter()
                .map(|a| formula(scope, a))
                .collect::<PResult<Vec<_>>>()?;
            Ok(if head == "and" {
                Formula::And(parts)
            } else {
                Formula::Or(parts)
            })
        }
        "not" => match args {
            [a] => Ok(Formula::Not(Box::new(formula(scope, a)?))),
            _ => e.err(ParseErrorKind::Syntax, "`not` takes one formula"),
        },
        "=>" => match args {
            [a, b] => Ok(Formula::Or(vec![
                Formula::Not(Box::new(formula(scope, a)?)),
                formula(scope, b)?,
            ])),
            _ => e.err(ParseErrorKind::Syntax, "`=>` takes two formulas"),
        },
        "exists" | "forall" => {
            let [binds, body] = args else {
                return e.err(ParseErrorKind::Syntax, format!("`{head}` takes a binder list and a body"));
            };
            let mut vars = Vec::new();
            for b in binds.list()? {
                let Some((sort, [name])) = b.form() else {
                    return b.err(ParseErrorKind::Syntax, "binding must be `(real x)` or `(int x)`");
                };
                let sort = match sort {
                    "real" => Sort::Real,
                    "int" => Sort::Int,
                    other => return b.err(ParseErrorKind::Syntax, format!("unknown sort `{other}`")),
                };
                let Some(name) = name.sym().filter(|n| valid_ident(n)) else {
                    return name.err(ParseErrorKind::Syntax, "invalid bound variable name");
                };
                vars.push(Var::new(name, sort, Role::Bound));
            }
            if vars.is_empty() {
                return binds.err(ParseErrorKind::Syntax, "empty binder list");
            }
            let depth = scope.binders.len();
            for v in &vars {
                scope.binders.push((v.name().to_string(), v.clone()));
            }
            let body = formula(scope, body);
            scope.binders.truncate(depth);
            let body = body?;
            Ok(vars.into_iter().rev().fold(body, |acc, v| {
                if head == "exists" {
                    Formula::Exists(v, Box::new(acc))
                } else {
                    Formula::Forall(v, Box::new(acc))
                }
            }))
        }
        "=" | ">" | ">=" | "<" | "<=" => {
            let [a, b] = args else {
                return e.err(ParseErrorKind::Syntax, format!("`{head}` takes two terms"));
            };
            let rel = match head {
                "=" => Rel::Eq,
                ">" => Rel::Gt,
                ">=" => Rel::Ge,
                "<" => Rel::Lt,
                _ => Rel::Le,
            };
            compare(&term(scope, a)?, rel, &term(scope, b)?).map_err(|err| map_err(e, err))
        }
        "mod=" => {
            let [t, d, r] = args else {
                return e.err(ParseErrorKind::Syntax, "`mod=` takes a term, a modulus and a residue");
            };
            let Some(dv) = d.sym().and_then(parse_int) else {
                return d.err(ParseErrorKind::Syntax, "modulus must be an integer literal");
            };
            let Some(rv) = r.sym().and_then(parse_int) else {
                return r.err(ParseErrorKind::Syntax, "residue must be an integer literal");
            };
            let t = term(scope, t)?;
            normalize_atom(&t, Rel::Mod(dv), &RatTerm::constant_term(rat(rv)))
                .map(Formula::Atom)
                .map_err(|err| map_err(e, err))
        }
        _ => e.err(ParseErrorKind::Syntax, format!("unknown formula operator `{head}`")),
    }
}

fn valid_ident(s: &str) -> bool {
    !s.is_empty()
        && parse_int(s).is_none()
        && !KEYWORDS.contains(&s)
        && !s.ends_with('\'')
        && !s.starts_with(|c: char| c.is_ascii_digit() || c == '-' || c == '+' || c == '*')
}

/// Declared names may not use `.`, `!` (reserved for derived variables).
fn valid_decl(s: &str) -> bool {
    valid_ident(s) && !s.contains(['.', '!', '\''])
}

fn decls(items: &[Sexp]) -> PResult<(Vec<Var>, Vec<Var>, Option<&Sexp>)> {
    let mut reals = None;
    let mut ints = None;
    let mut body = None;
    let mut seen = BTreeMap::new();
    for it in items {
        let Some((head, args)) = it.form() else {
            return it.err(ParseErrorKind::Syntax, "expected `(reals ...)`, `(ints ...)` or `(body ...)`");
        };
        let (slot, sort) = match head {
            "reals" => (&mut reals, Sort::Real),
            "ints" => (&mut ints, Sort::Int),
            "body" => {
                let [f] = args else {
                    return it.err(ParseErrorKind::Syntax, "`body` takes one formula");
                };
                if body.replace(f).is_some() {
                    return it.err(ParseErrorKind::Syntax, "duplicate `body`");
                }
                continue;
            }
            other => return it.err(ParseErrorKind::Syntax, format!("unexpected `{other}`")),
        };
        if slot.is_some() {
            return it.err(ParseErrorKind::Syntax, format!("duplicate `{head}`"));
        }
        let mut vs = Vec::new();
        for a in args {
            let Some(name) = a.sym().filter(|n| valid_decl(n)) else {
                return a.err(ParseErrorKind::Syntax, "invalid variable name");
            };
            if seen.insert(name.to_string(), ()).is_some() {
                return a.err(ParseErrorKind::Syntax, format!("`{name}` declared twice"));
            }
            vs.push(Var::new(name, sort, Role::Unprimed));
        }
        *slot = Some(vs);
    }
    Ok((reals.unwrap_or_default(), ints.unwrap_or_default(), body))
}

fn relation_from(e: &Sexp) -> PResult<Relation> {
    let Some((head, args)) = e.form() else {
        return e.err(ParseErrorKind::Syntax, "expected `(relation ...)`");
    };
    if head != "relation" && head != "formula" {
        return e.err(ParseErrorKind::Syntax, format!("expected `relation`, found `{head}`"));
    }
    let (reals, ints, body) = decls(args)?;
    let Some(body) = body else {
        return e.err(ParseErrorKind::Syntax, "missing `(body ...)`");
    };
    let vars: Vec<Var> = reals.iter().chain(&ints).cloned().collect();
    let mut scope = Scope::new(&vars, true);
    let body = formula(&mut scope, body)?;
    Ok(Relation { reals, ints, body })
}

/// Reads `(relation (reals ..) (ints ..) (body f))`. The keyword `formula`
/// is accepted as a synonym for plain formula documents.
pub fn parse_relation(text: &str) -> Result<Relation, ParseError> {
    relation_from(&read_one(text)?)
}

/// Reads a formula in `scope`.
pub fn parse_formula(text: &str, scope: &Scope) -> Result<Formula, ParseError> {
    let mut scope = scope.clone();
    formula(&mut scope, &read_one(text)?)
}

/// Reads a linear term in `scope`.
pub fn parse_term(text: &str, scope: &Scope) -> Result<LinTerm, ParseError> {
    let e = read_one(text)?;
    let t = term(scope, &e)?;
    integral(&e, t)
}

fn integral(e: &Sexp, t: RatTerm) -> PResult<LinTerm> {
    let (lin, l) = t.clear_denominators();
    if !l.is_one() {
        return e.err(ParseErrorKind::Syntax, "non-integral term");
    }
    Ok(lin)
}

/// Reads a verification query:
/// `(system (relation ..) [(step (relation ..))] [(init f)] [(live f+)] [(safe f+)] [(bound t+)])`.
pub fn parse_system(text: &str) -> Result<System, ParseError> {
    let e = read_one(text)?;
    let Some(("system", args)) = e.form() else {
        return e.err(ParseErrorKind::Syntax, "expected `(system ...)`");
    };
    let Some((first, rest)) = args.split_first() else {
        return e.err(ParseErrorKind::Syntax, "missing reachability relation");
    };
    let reach = relation_from(first)?;
    let scope = Scope::new(&reach.vars(), false);
    let mut sys = System::new(reach);
    for it in rest {
        let Some((head, items)) = it.form() else {
            return it.err(ParseErrorKind::Syntax, "expected a system clause");
        };
        match head {
            "step" => {
                let [r] = items else {
                    return it.err(ParseErrorKind::Syntax, "`step` takes one relation");
                };
                let step = relation_from(r)?;
                if step.reals != sys.reach.reals || step.ints != sys.reach.ints {
                    return it.err(ParseErrorKind::Sort, "step relation must declare the same variables");
                }
                sys.step = Some(step);
            }
            "init" => {
                let [f] = items else {
                    return it.err(ParseErrorKind::Syntax, "`init` takes one formula");
                };
                sys.init = formula(&mut scope.clone(), f)?;
            }
            "live" | "safe" => {
                if items.is_empty() {
                    return it.err(ParseErrorKind::Syntax, format!("`{head}` needs at least one formula"));
                }
                let fs = items
                    .iter()
                    .map(|f| formula(&mut scope.clone(), f))
                    .collect::<PResult<Vec<_>>>()?;
                if head == "live" {
                    sys.live = fs;
                } else {
                    sys.safe = fs;
                }
            }
            "bound" => {
                if items.is_empty() {
                    return it.err(ParseErrorKind::Syntax, "`bound` needs at least one term");
                }
                sys.bounds = items
                    .iter()
                    .map(|t| integral(t, term(&scope, t)?))
                    .collect::<PResult<Vec<_>>>()?;
            }
            other => return it.err(ParseErrorKind::Syntax, format!("unknown clause `{other}`")),
        }
    }
    Ok(sys)
}

/// Prints a linear term: `y`, `(* -1 y)`, `(+ (* 2 y) -3)`, `0`.
pub fn print_term(t: &LinTerm) -> String {
    let mut parts: Vec<String> = t
        .coeffs()
        .iter()
        .map(|(v, c)| {
            if c.is_one() {
                v.to_string()
            } else {
                format!("(* {c} {v})")
            }
        })
        .collect();
    if !t.constant().is_zero() || parts.is_empty() {
        parts.push(t.constant().to_string());
    }
    if parts.len() == 1 {
        parts.pop().unwrap()
    } else {
        format!("(+ {})", parts.join(" "))
    }
}

pub fn print_atom(a: &Atom) -> String {
    match a {
        Atom::Eq(t) => format!("(= {} 0)", print_term(t)),
        Atom::Gt(t) => format!("(> {} 0)", print_term(t)),
        Atom::Mod {
            term,
            modulus,
            residue,
        } => format!("(mod= {} {modulus} {residue})", print_term(term)),
    }
}

pub fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(f, &mut out);
    out
}

fn write_formula(f: &Formula, out: &mut String) {
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Atom(a) => out.push_str(&print_atom(a)),
        Formula::Not(g) => {
            out.push_str("(not ");
            write_formula(g, out);
            out.push(')');
        }
        Formula::And(cs) | Formula::Or(cs) => {
            out.push_str(if matches!(f, Formula::And(_)) { "(and" } else { "(or" });
            for c in cs {
                out.push(' ');
                write_formula(c, out);
            }
            out.push(')');
        }
        Formula::Exists(..) | Formula::Forall(..) => {
            let is_exists = matches!(f, Formula::Exists(..));
            let mut binders = Vec::new();
            let mut cur = f;
            loop {
                match (cur, is_exists) {
                    (Formula::Exists(v, g), true) | (Formula::Forall(v, g), false) => {
                        binders.push(v);
                        cur = g;
                    }
                    _ => break,
                }
            }
            out.push_str(if is_exists { "(exists (" } else { "(forall (" });
            for (i, v) in binders.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                let s = if v.is_int() { "int" } else { "real" };
                out.push_str(&format!("({s} {})", v.name()));
            }
            out.push_str(") ");
            write_formula(cur, out);
            out.push(')');
        }
    }
}

pub fn print_relation(r: &Relation) -> String {
    let mut out = String::from("(relation");
    for (kw, vs) in [("reals", &r.reals), ("ints", &r.ints)] {
        if !vs.is_empty() {
            let names: Vec<&str> = vs.iter().map(Var::name).collect();
            out.push_str(&format!(" ({kw} {})", names.join(" ")));
        }
    }
    out.push_str(&format!(" (body {}))", print_formula(&r.body)));
    out
}

#[cfg(test)]
mod tests;
