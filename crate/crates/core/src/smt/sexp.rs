//! S-expressions for SMT-LIB 2 text: construction, printing, parsing and
//! the well-formedness and linearity scans.

use std::collections::HashMap;
use std::fmt;

use crate::error::{KrkError, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Sexp {
    Atom(String),
    List(Vec<Sexp>),
}

impl Sexp {
    pub fn atom(s: impl Into<String>) -> Sexp {
        Sexp::Atom(s.into())
    }

    pub fn int(v: i64) -> Sexp {
        if v < 0 {
            Sexp::List(vec![
                Sexp::atom("-"),
                Sexp::atom(v.unsigned_abs().to_string()),
            ])
        } else {
            Sexp::atom(v.to_string())
        }
    }

    pub fn app(op: &str, args: impl IntoIterator<Item = Sexp>) -> Sexp {
        let mut v = vec![Sexp::atom(op)];
        v.extend(args);
        Sexp::List(v)
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(a) => Some(a),
            Sexp::List(_) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(v) => Some(v),
            Sexp::Atom(_) => None,
        }
    }

    /// The head symbol of an application.
    pub fn head(&self) -> Option<&str> {
        self.as_list()?.first()?.as_atom()
    }

    /// Number of nodes, used to report formula sizes.
    pub fn size(&self) -> usize {
        match self {
            Sexp::Atom(_) => 1,
            Sexp::List(v) => 1 + v.iter().map(Sexp::size).sum::<usize>(),
        }
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sexp::Atom(a) => f.write_str(a),
            Sexp::List(v) => {
                f.write_str("(")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
        }
    }
}

fn parse_error(msg: impl Into<String>) -> KrkError {
    KrkError::Smt(msg.into())
}

/// Parses a sequence of top-level s-expressions, skipping `;` comments.
pub fn parse(text: &str) -> Result<Vec<Sexp>> {
    let mut stack: Vec<Vec<Sexp>> = vec![Vec::new()];
    let mut chars = text.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        match c {
            ';' => while chars.next_if(|&(_, c)| c != '\n').is_some() {},
            '(' => {
                chars.next();
                stack.push(Vec::new());
            }
            ')' => {
                chars.next();
                let done = stack
                    .pop()
                    .filter(|_| !stack.is_empty())
                    .ok_or_else(|| parse_error(format!("unbalanced ')' at byte {i}")))?;
                stack.last_mut().unwrap().push(Sexp::List(done));
            }
            '|' => {
                chars.next();
                let mut s = String::from("|");
                loop {
                    match chars.next() {
                        Some((_, '|')) => break,
                        Some((_, c)) => s.push(c),
                        None => return Err(parse_error("unterminated quoted symbol")),
                    }
                }
                s.push('|');
                stack.last_mut().unwrap().push(Sexp::Atom(s));
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            _ => {
                let mut s = String::new();
                while let Some((_, c)) =
                    chars.next_if(|&(_, c)| !c.is_whitespace() && !"();|".contains(c))
                {
                    s.push(c);
                }
                stack.last_mut().unwrap().push(Sexp::Atom(s));
            }
        }
    }
    if stack.len() != 1 {
        return Err(parse_error("unbalanced '(' at end of input"));
    }
    Ok(stack.pop().unwrap())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sort {
    Int,
    Bool,
}

impl Sort {
    fn parse(s: &Sexp) -> Result<Sort> {
        match s.as_atom() {
            Some("Int") => Ok(Sort::Int),
            Some("Bool") => Ok(Sort::Bool),
            _ => Err(parse_error(format!("unsupported sort {s}"))),
        }
    }
}

pub(crate) fn is_numeral(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()) && (s == "0" || !s.starts_with('0'))
}

/// A constant integer literal, including `(- k)`.
fn is_constant(e: &Sexp) -> bool {
    match e {
        Sexp::Atom(a) => is_numeral(a),
        Sexp::List(v) => v.len() == 2 && v[0].as_atom() == Some("-") && is_constant(&v[1]),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ScriptStats {
    pub commands: usize,
    pub declarations: usize,
    pub definitions: usize,
    pub assertions: usize,
    pub nodes: usize,
}

/// Checks that the script is well-sorted QF_LIA: declared before use,
/// correct arities, only the core and integer operators, and every
/// multiplication has a constant factor.
pub fn check_script(script: &[Sexp]) -> Result<ScriptStats> {
    let mut funs: HashMap<String, (Vec<Sort>, Sort)> = HashMap::new();
    let mut stats = ScriptStats::default();
    let mut logic_set = false;
    for cmd in script {
        stats.commands += 1;
        stats.nodes += cmd.size();
        let items = cmd
            .as_list()
            .ok_or_else(|| parse_error(format!("top-level atom {cmd}")))?;
        let head = items
            .first()
            .and_then(Sexp::as_atom)
            .ok_or_else(|| parse_error("empty command"))?;
        match head {
            "set-logic" => {
                if items.get(1).and_then(Sexp::as_atom) != Some("QF_LIA") {
                    return Err(parse_error("logic must be QF_LIA"));
                }
                logic_set = true;
            }
            "set-info" | "set-option" | "check-sat" | "get-model" | "exit" => {}
            "declare-const" | "declare-fun" => {
                let name = items
                    .get(1)
                    .and_then(Sexp::as_atom)
                    .ok_or_else(|| parse_error("bad declaration"))?;
                let sort = if head == "declare-const" {
                    items.get(2)
                } else {
                    if items
                        .get(2)
                        .and_then(Sexp::as_list)
                        .is_none_or(|a| !a.is_empty())
                    {
                        return Err(parse_error("only constants may be declared"));
                    }
                    items.get(3)
                };
                let sort = Sort::parse(sort.ok_or_else(|| parse_error("missing sort"))?)?;
                if funs.insert(name.to_string(), (Vec::new(), sort)).is_some() {
                    return Err(parse_error(format!("{name} declared twice")));
                }
                stats.declarations += 1;
            }
            "define-fun" => {
                if items.len() != 5 {
                    return Err(parse_error(
                        "define-fun takes a name, parameters, a sort and a body",
                    ));
                }
                let name = items[1]
                    .as_atom()
                    .ok_or_else(|| parse_error("bad function name"))?;
                let mut scope = HashMap::new();
                let mut params = Vec::new();
                for p in items[2]
                    .as_list()
                    .ok_or_else(|| parse_error("bad parameter list"))?
                {
                    let pair = p
                        .as_list()
                        .filter(|v| v.len() == 2)
                        .ok_or_else(|| parse_error("bad parameter"))?;
                    let sort = Sort::parse(&pair[1])?;
                    scope.insert(
                        pair[0]
                            .as_atom()
                            .ok_or_else(|| parse_error("bad parameter"))?
                            .to_string(),
                        sort,
                    );
                    params.push(sort);
                }
                let ret = Sort::parse(&items[3])?;
                let got = sort_of(&items[4], &funs, &scope)?;
                if got != ret {
                    return Err(parse_error(format!(
                        "{name} returns {got:?}, declared {ret:?}"
                    )));
                }
                if funs.insert(name.to_string(), (params, ret)).is_some() {
                    return Err(parse_error(format!("{name} defined twice")));
                }
                stats.definitions += 1;
            }
            "assert" => {
                let body = items.get(1).ok_or_else(|| parse_error("empty assert"))?;
                if sort_of(body, &funs, &HashMap::new())? != Sort::Bool {
                    return Err(parse_error("assertion is not Boolean"));
                }
                stats.assertions += 1;
            }
            other => return Err(parse_error(format!("unsupported command {other}"))),
        }
    }
    if !logic_set {
        return Err(parse_error("missing set-logic"));
    }
    Ok(stats)
}

fn sort_of(
    e: &Sexp,
    funs: &HashMap<String, (Vec<Sort>, Sort)>,
    scope: &HashMap<String, Sort>,
) -> Result<Sort> {
    let items = match e {
        Sexp::Atom(a) if is_numeral(a) => return Ok(Sort::Int),
        Sexp::Atom(a) if a == "true" || a == "false" => return Ok(Sort::Bool),
        Sexp::Atom(a) => {
            if let Some(&s) = scope.get(a) {
                return Ok(s);
            }
            return match funs.get(a) {
                Some((params, s)) if params.is_empty() => Ok(*s),
                _ => Err(parse_error(format!("unknown symbol {a}"))),
            };
        }
        Sexp::List(items) => items,
    };
    let op = items
        .first()
        .and_then(Sexp::as_atom)
        .ok_or_else(|| parse_error(format!("bad application {e}")))?;
    let args = &items[1..];
    let sorts = args
        .iter()
        .map(|a| sort_of(a, funs, scope))
        .collect::<Result<Vec<_>>>()?;
    let all = |s: Sort| sorts.iter().all(|&x| x == s);
    let bad = || parse_error(format!("ill-sorted {op} application: {e}"));
    match op {
        "and" | "or" if !args.is_empty() && all(Sort::Bool) => Ok(Sort::Bool),
        "not" if args.len() == 1 && all(Sort::Bool) => Ok(Sort::Bool),
        "=>" if args.len() == 2 && all(Sort::Bool) => Ok(Sort::Bool),
        "=" | "distinct" if args.len() >= 2 && sorts.iter().all(|&s| s == sorts[0]) => {
            Ok(Sort::Bool)
        }
        "<" | "<=" | ">" | ">=" if args.len() == 2 && all(Sort::Int) => Ok(Sort::Bool),
        "+" if args.len() >= 2 && all(Sort::Int) => Ok(Sort::Int),
        "-" if !args.is_empty() && all(Sort::Int) => Ok(Sort::Int),
        "*" if args.len() == 2 && all(Sort::Int) => {
            if args.iter().any(is_constant) {
                Ok(Sort::Int)
            } else {
                Err(parse_error(format!("nonlinear multiplication {e}")))
            }
        }
        "ite" if args.len() == 3 && sorts[0] == Sort::Bool && sorts[1] == sorts[2] => Ok(sorts[1]),
        "div" | "mod" | "abs" => Err(parse_error(format!(
            "{op} is outside the linear fragment used here"
        ))),
        name => match funs.get(name) {
            Some((params, ret)) if *params == sorts => Ok(*ret),
            Some(_) => Err(bad()),
            None => Err(parse_error(format!("unknown function {name}"))),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_and_skips_comments() {
        let text = "; header\n(set-logic QF_LIA)\n(declare-const x Int)\n(assert (and (<= 0 x) (< x (- 3))))\n(check-sat)\n";
        let script = parse(text).unwrap();
        assert_eq!(script.len(), 4);
        assert_eq!(script[2].to_string(), "(assert (and (<= 0 x) (< x (- 3))))");
        let printed: String = script.iter().map(|c| format!("{c}\n")).collect();
        assert_eq!(parse(&printed).unwrap(), script);
        assert_eq!(check_script(&script).unwrap().assertions, 1);
    }

    #[test]
    fn rejects_malformed_scripts() {
        assert!(parse("(assert (and true)").is_err());
        assert!(parse("(assert true))").is_err());
        let check = |t: &str| check_script(&parse(t).unwrap());
        assert!(check("(declare-const x Int)").is_err());
        assert!(check("(set-logic QF_LIA)(assert (< x 1))").is_err());
        assert!(check("(set-logic QF_LIA)(declare-const x Int)(assert (< (* x x) 1))").is_err());
        assert!(check("(set-logic QF_LIA)(declare-const x Int)(assert (< (* 2 x) 1))").is_ok());
        assert!(check("(set-logic QF_LIA)(declare-const x Int)(assert (+ x 1))").is_err());
        assert!(
            check("(set-logic QF_LIA)(define-fun f ((a Int)) Bool (< a 1))(assert (f true))")
                .is_err()
        );
        assert!(check("(set-logic QF_LIA)(declare-const x Int)(assert (= (div x 2) 1))").is_err());
    }

    #[test]
    fn negative_literals() {
        assert_eq!(Sexp::int(-4).to_string(), "(- 4)");
        assert_eq!(Sexp::int(7).to_string(), "7");
    }
}
