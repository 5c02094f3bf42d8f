//! Ground evaluation of an emitted script under a concrete assignment, used
//! to check the encoding against the explicit-state engine without an
//! external solver.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::board::{
    enumerate_legal, for_each_black_move, for_each_white_move, BoardSpec, Position, Square,
};
use crate::error::{KrkError, Result};
use crate::formula::Trace;
use crate::lemma::{check_lemma, LemmaSpec};
use crate::strategy::{MoveKind, Strategy};

use super::encode::{encode_lemma_lia, trace_assignment, LiaProblem};
use super::sexp::{is_numeral, Sexp};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Value {
    Int(i64),
    Bool(bool),
}

impl Value {
    fn int(self) -> Result<i64> {
        match self {
            Value::Int(v) => Ok(v),
            Value::Bool(_) => Err(KrkError::Smt("expected Int, found Bool".into())),
        }
    }

    fn bool(self) -> Result<bool> {
        match self {
            Value::Bool(b) => Ok(b),
            Value::Int(_) => Err(KrkError::Smt("expected Bool, found Int".into())),
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Op {
    And,
    Or,
    Not,
    Implies,
    Ite,
    Eq,
    Distinct,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
    Mul,
}

#[derive(Clone, Debug)]
enum Expr {
    Const(Value),
    Param(usize),
    Global(usize),
    Call(usize, Vec<Expr>),
    Op(Op, Vec<Expr>),
}

/// A script compiled for repeated evaluation.
pub struct Program {
    globals: HashMap<String, usize>,
    /// Sort of each declared constant: true for Bool.
    boolean: Vec<bool>,
    funs: Vec<Expr>,
    asserts: Vec<Expr>,
}

fn op_of(name: &str) -> Option<Op> {
    Some(match name {
        "and" => Op::And,
        "or" => Op::Or,
        "not" => Op::Not,
        "=>" => Op::Implies,
        "ite" => Op::Ite,
        "=" => Op::Eq,
        "distinct" => Op::Distinct,
        "<" => Op::Lt,
        "<=" => Op::Le,
        ">" => Op::Gt,
        ">=" => Op::Ge,
        "+" => Op::Add,
        "-" => Op::Sub,
        "*" => Op::Mul,
        _ => return None,
    })
}

impl Program {
    pub fn compile(script: &[Sexp]) -> Result<Program> {
        let mut prog = Program {
            globals: HashMap::new(),
            boolean: Vec::new(),
            funs: Vec::new(),
            asserts: Vec::new(),
        };
        let mut fun_ids: HashMap<String, usize> = HashMap::new();
        for cmd in script {
            let items = cmd.as_list().unwrap_or(&[]);
            match cmd.head() {
                Some("declare-const") | Some("declare-fun") => {
                    let name = items[1]
                        .as_atom()
                        .ok_or_else(|| KrkError::Smt("bad declaration".into()))?;
                    let id = prog.globals.len();
                    prog.globals.insert(name.to_string(), id);
                    prog.boolean
                        .push(items.last().and_then(Sexp::as_atom) == Some("Bool"));
                }
                Some("define-fun") => {
                    let name = items[1]
                        .as_atom()
                        .ok_or_else(|| KrkError::Smt("bad define-fun".into()))?;
                    let params: Vec<&str> = items[2]
                        .as_list()
                        .unwrap_or(&[])
                        .iter()
                        .filter_map(|p| p.as_list()?.first()?.as_atom())
                        .collect();
                    let body = prog.expr(&items[4], &params, &fun_ids)?;
                    fun_ids.insert(name.to_string(), prog.funs.len());
                    prog.funs.push(body);
                }
                Some("assert") => {
                    let e = prog.expr(&items[1], &[], &fun_ids)?;
                    prog.asserts.push(e);
                }
                _ => {}
            }
        }
        Ok(prog)
    }

    fn expr(&self, s: &Sexp, params: &[&str], funs: &HashMap<String, usize>) -> Result<Expr> {
        match s {
            Sexp::Atom(a) => {
                if is_numeral(a) {
                    return a
                        .parse()
                        .map(|v| Expr::Const(Value::Int(v)))
                        .map_err(|_| KrkError::Smt(format!("numeral {a}")));
                }
                match a.as_str() {
                    "true" => return Ok(Expr::Const(Value::Bool(true))),
                    "false" => return Ok(Expr::Const(Value::Bool(false))),
                    _ => {}
                }
                if let Some(i) = params.iter().position(|p| p == a) {
                    return Ok(Expr::Param(i));
                }
                if let Some(&g) = self.globals.get(a) {
                    return Ok(Expr::Global(g));
                }
                if let Some(&f) = funs.get(a) {
                    return Ok(Expr::Call(f, Vec::new()));
                }
                Err(KrkError::Smt(format!("unknown symbol `{a}`")))
            }
            Sexp::List(items) => {
                let head = s
                    .head()
                    .ok_or_else(|| KrkError::Smt(format!("cannot evaluate `{s}`")))?;
                let args = items[1..]
                    .iter()
                    .map(|a| self.expr(a, params, funs))
                    .collect::<Result<Vec<_>>>()?;
                if let Some(op) = op_of(head) {
                    return Ok(Expr::Op(op, args));
                }
                funs.get(head)
                    .map(|&f| Expr::Call(f, args))
                    .ok_or_else(|| KrkError::Smt(format!("unknown function `{head}`")))
            }
        }
    }

    fn eval(&self, e: &Expr, frame: &[Value], globals: &[Option<Value>]) -> Result<Value> {
        let ev = |e: &Expr| self.eval(e, frame, globals);
        Ok(match e {
            Expr::Const(v) => *v,
            Expr::Param(i) => frame[*i],
            Expr::Global(g) => {
                globals[*g].ok_or_else(|| KrkError::Smt("unassigned constant".into()))?
            }
            Expr::Call(f, args) => {
                let vals = args.iter().map(ev).collect::<Result<Vec<_>>>()?;
                self.eval(&self.funs[*f], &vals, globals)?
            }
            Expr::Op(op, args) => match op {
                Op::And => {
                    for a in args {
                        if !ev(a)?.bool()? {
                            return Ok(Value::Bool(false));
                        }
                    }
                    Value::Bool(true)
                }
                Op::Or => {
                    for a in args {
                        if ev(a)?.bool()? {
                            return Ok(Value::Bool(true));
                        }
                    }
                    Value::Bool(false)
                }
                Op::Not => Value::Bool(!ev(&args[0])?.bool()?),
                Op::Implies => Value::Bool(!ev(&args[0])?.bool()? || ev(&args[1])?.bool()?),
                Op::Ite => {
                    if ev(&args[0])?.bool()? {
                        ev(&args[1])?
                    } else {
                        ev(&args[2])?
                    }
                }
                Op::Eq | Op::Distinct => {
                    let vals = args.iter().map(ev).collect::<Result<Vec<_>>>()?;
                    let all_eq = vals.windows(2).all(|w| w[0] == w[1]);
                    match op {
                        Op::Eq => Value::Bool(all_eq),
                        _ => Value::Bool(
                            (0..vals.len())
                                .all(|i| (i + 1..vals.len()).all(|j| vals[i] != vals[j])),
                        ),
                    }
                }
                Op::Lt | Op::Le | Op::Gt | Op::Ge => {
                    let vals = args
                        .iter()
                        .map(|a| ev(a)?.int())
                        .collect::<Result<Vec<_>>>()?;
                    Value::Bool(vals.windows(2).all(|w| match op {
                        Op::Lt => w[0] < w[1],
                        Op::Le => w[0] <= w[1],
                        Op::Gt => w[0] > w[1],
                        _ => w[0] >= w[1],
                    }))
                }
                Op::Add | Op::Sub | Op::Mul => {
                    let vals = args
                        .iter()
                        .map(|a| ev(a)?.int())
                        .collect::<Result<Vec<_>>>()?;
                    Value::Int(match op {
                        Op::Add => vals.iter().sum(),
                        Op::Mul => vals.iter().product(),
                        _ if vals.len() == 1 => -vals[0],
                        _ => vals[1..].iter().fold(vals[0], |acc, v| acc - v),
                    })
                }
            },
        })
    }

    /// Do all assertions hold under `assignment`? Booleans are given as 0/1.
    pub fn satisfied(&self, assignment: &[(String, i64)]) -> Result<bool> {
        self.satisfied_first(assignment, self.asserts.len())
    }

    /// Like [`Program::satisfied`], looking only at the first `count`
    /// assertions.
    pub fn satisfied_first(&self, assignment: &[(String, i64)], count: usize) -> Result<bool> {
        let mut globals = vec![None; self.globals.len()];
        for (name, v) in assignment {
            if let Some(&g) = self.globals.get(name) {
                globals[g] = Some(if self.boolean[g] {
                    Value::Bool(*v != 0)
                } else {
                    Value::Int(*v)
                });
            }
        }
        for a in self.asserts.iter().take(count) {
            if !self.eval(a, &[], &globals)?.bool()? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn assertion_count(&self) -> usize {
        self.asserts.len()
    }
}

/// Does the engine accept `trace` as a lemma trace? It has to start in a
/// legal white-to-move position with the rook, follow the strategy relation
/// within the step constraints, answer with legal black moves and satisfy
/// the precondition.
pub fn engine_admits(lemma: &LemmaSpec, trace: &Trace, strategy: &Strategy) -> bool {
    let spec = strategy.spec();
    let pos = &trace.positions;
    if pos.len() != lemma.trace_len() || trace.kinds.len() != lemma.k {
        return false;
    }
    let p0 = pos[0];
    if !p0.white_to_move || p0.wr.is_none() || !p0.is_legal(spec) {
        return false;
    }
    for i in 0..lemma.k {
        let (p, q, kind) = (pos[2 * i], pos[2 * i + 1], trace.kinds[i]);
        if lemma.steps[i].is_some_and(|s| !s.contains(kind))
            || !strategy.strategy_relation(&p, &q, kind)
        {
            return false;
        }
        if let Some(r) = pos.get(2 * i + 2) {
            let mut ok = false;
            for_each_black_move(&q, spec, |x| ok |= x == *r);
            if !ok {
                return false;
            }
        }
    }
    lemma.pre.eval(trace, spec)
}

/// An admitted trace that breaks the postcondition.
pub fn engine_violates(lemma: &LemmaSpec, trace: &Trace, strategy: &Strategy) -> bool {
    engine_admits(lemma, trace, strategy) && !lemma.post.eval(trace, strategy.spec())
}

/// Outcome of comparing the script with the engine on sampled traces.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct CrossValidation {
    pub lemma: String,
    pub n: i32,
    pub samples: usize,
    /// Samples both sides accept as lemma traces.
    pub admitted: usize,
    /// Samples both sides call a counterexample.
    pub violating: usize,
    pub disagreements: Vec<Trace>,
}

impl CrossValidation {
    pub fn agrees(&self) -> bool {
        self.disagreements.is_empty()
    }
}

fn random_trace(
    lemma: &LemmaSpec,
    strategy: &Strategy,
    starts: &[Position],
    rng: &mut ChaCha8Rng,
) -> Trace {
    let spec = strategy.spec();
    let mut p = *starts.choose(rng).unwrap();
    let mut trace = Trace {
        positions: vec![p],
        kinds: Vec::new(),
    };
    for i in 0..lemma.k {
        let succ = strategy.strategy_successors(&p).unwrap_or_default();
        let (q, kind) = match succ.choose(rng) {
            Some(m) if rng.gen_bool(0.85) => (m.to, m.kind),
            _ => {
                let mut all = Vec::new();
                for_each_white_move(&p, spec, |mv| all.push(mv.to));
                let kind = *MoveKind::ALL.choose(rng).unwrap();
                (all.choose(rng).copied().unwrap_or(p.with_side(false)), kind)
            }
        };
        trace.positions.push(q);
        trace.kinds.push(kind);
        if 2 * i + 2 < lemma.trace_len() {
            let mut replies = Vec::new();
            for_each_black_move(&q, spec, |r| replies.push(r));
            p = match replies.choose(rng) {
                Some(r) => *r,
                None => q.with_side(true),
            };
            trace.positions.push(p);
        }
    }
    if rng.gen_bool(0.2) {
        let j = rng.gen_range(0..trace.positions.len());
        let d = if rng.gen_bool(0.5) { 1 } else { -1 };
        let p = &mut trace.positions[j];
        match rng.gen_range(0..3) {
            0 => p.wk = p.wk.offset(d, 0),
            1 => p.bk = p.bk.offset(0, d),
            _ => p.wr = p.wr.map(|s: Square| s.offset(d, 0)),
        }
    } else if rng.gen_bool(0.1) {
        let i = rng.gen_range(0..trace.kinds.len());
        trace.kinds[i] = *MoveKind::ALL.choose(rng).unwrap();
    }
    trace
}

/// Evaluates the script on one concrete trace: (admitted, violating). The
/// last assertion is the negated postcondition.
pub fn script_verdict(
    prog: &Program,
    lemma: &LemmaSpec,
    trace: &Trace,
    spec: &BoardSpec,
) -> Result<(bool, bool)> {
    let assignment = trace_assignment(lemma, trace, spec);
    let admitted = prog.satisfied_first(&assignment, prog.assertion_count() - 1)?;
    Ok((admitted, admitted && prog.satisfied(&assignment)?))
}

/// Compares the encoding with the engine on `samples` random traces plus
/// every counterexample the engine reports.
pub fn cross_validate(
    lemma: &LemmaSpec,
    strategy: &Strategy,
    samples: usize,
    seed: u64,
) -> Result<CrossValidation> {
    let spec = *strategy.spec();
    let problem: LiaProblem = encode_lemma_lia(lemma, strategy)?;
    let prog = Program::compile(&problem.commands)?;
    let lemma = lemma
        .clone()
        .with_semantics(crate::strategy::Mode::Relation);
    let legal: Vec<Position> = enumerate_legal(spec, Some(true), true).collect();
    let mut starts: Vec<Position> = legal
        .iter()
        .copied()
        .filter(|p| {
            lemma.pre.eval(
                &Trace {
                    positions: vec![*p],
                    kinds: Vec::new(),
                },
                &spec,
            )
        })
        .collect();
    if starts.is_empty() {
        starts = legal;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut traces: Vec<Trace> = (0..samples)
        .map(|_| random_trace(&lemma, strategy, &starts, &mut rng))
        .collect();
    let invariant = lemma.pre.is_invariant() && lemma.post.is_invariant();
    traces.extend(
        check_lemma(&lemma, strategy, invariant)?
            .counterexamples
            .into_iter()
            .map(|c| c.trace),
    );
    let mut out = CrossValidation {
        lemma: lemma.name.clone(),
        n: spec.n(),
        samples: traces.len(),
        admitted: 0,
        violating: 0,
        disagreements: Vec::new(),
    };
    for t in traces {
        let engine = (
            engine_admits(&lemma, &t, strategy),
            engine_violates(&lemma, &t, strategy),
        );
        let script = script_verdict(&prog, &lemma, &t, &spec)?;
        if engine != script {
            out.disagreements.push(t);
            continue;
        }
        out.admitted += engine.0 as usize;
        out.violating += engine.1 as usize;
    }
    Ok(out)
}
