use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use krk_cli::{play, server};
use krk_core::lemma::{check_lemma_with, standard_equivalences, MoveTable};
use krk_core::retrograde::retrograde_table;
use krk_core::smt::{self, SolverOutcome};
use krk_core::{
    builtin_lemma, builtin_lemmas, check_equivalence, check_refinement, classify_all, count_legal,
    BoardSpec, Mode, Position, Square, Strategy, Variant,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Exit codes for a verification that ran and came out negative.
mod exit {
    pub const RETROGRADE: u8 = 3;
    pub const LEMMA: u8 = 4;
    pub const EQUIVALENCE: u8 = 5;
    pub const REFINEMENT: u8 = 6;
    pub const SOLVER: u8 = 7;
}

#[derive(Parser)]
#[command(
    name = "krk",
    version,
    about = "Verify the king-and-rook vs. king mating strategy on n x n boards"
)]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(Clone, Copy, ValueEnum)]
enum Side {
    W,
    B,
}

#[derive(clap::Args)]
struct Board {
    /// Board size.
    #[arg(long)]
    n: i32,
    /// classic8 (n = 8 only) or generalized.
    #[arg(long, default_value = "generalized")]
    variant: Variant,
}

impl Board {
    fn spec(&self) -> Result<BoardSpec> {
        Ok(BoardSpec::new(self.n, self.variant)?)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Prove that every legal position is won (retrograde analysis).
    Retrograde {
        #[command(flatten)]
        board: Board,
        #[arg(long, default_value = "function")]
        mode: Mode,
        /// Write the depth table to this file.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Check the built-in lemmas, or one of them, by exhaustive enumeration.
    Lemma {
        #[command(flatten)]
        board: Board,
        #[arg(long)]
        name: Option<String>,
        #[arg(long, value_enum, default_value = "on")]
        symmetry: OnOff,
        #[arg(long, default_value = "function")]
        mode: Mode,
        /// Also hand the symbolic encoding to this SMT solver command.
        #[arg(long, env = smt::SOLVER_ENV)]
        solver: Option<String>,
    },
    /// Check the optimized predicates against their definitions.
    Equiv {
        #[command(flatten)]
        board: Board,
    },
    /// Check that the strategy function refines the relation.
    Refine {
        #[command(flatten)]
        board: Board,
    },
    /// Count legal positions.
    Count {
        #[arg(long)]
        n: i32,
        /// Only positions with this side to move.
        #[arg(long, value_enum)]
        side: Option<Side>,
    },
    /// Histogram of the move kinds over all legal white-to-move positions.
    Classify {
        #[command(flatten)]
        board: Board,
    },
    /// Write one SMT-LIB file per built-in lemma, optionally solving them.
    ExportSmt {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "generalized")]
        variant: Variant,
        #[arg(long)]
        name: Option<String>,
        #[arg(long, env = smt::SOLVER_ENV)]
        solver: Option<String>,
    },
    /// Play the black king against the strategy in the terminal.
    Play {
        #[arg(long, default_value_t = 8)]
        n: i32,
        #[arg(long, default_value = "generalized")]
        variant: Variant,
        /// Start position such as `wk=e1,bk=e8,wr=a1`; random otherwise.
        #[arg(long)]
        start: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Run the HTTP JSON service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        /// Allowed CORS origin; any origin when omitted.
        #[arg(long)]
        cors_origin: Option<String>,
    },
}

fn emit<T: Serialize>(json: bool, value: &T, text: impl FnOnce() -> String) -> Result<()> {
    let mut out = io::stdout().lock();
    if json {
        serde_json::to_writer_pretty(&mut out, value)?;
        writeln!(out)?;
    } else {
        write!(out, "{}", text())?;
    }
    Ok(())
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "holds"
    } else {
        "FAILS"
    }
}

fn outcome_text(o: &SolverOutcome) -> String {
    match o {
        SolverOutcome::Unsat => "unsat (lemma proved for every n)".into(),
        SolverOutcome::Sat(Some(m)) => format!(
            "sat, counterexample at n = {}: {}",
            m.n, m.trace.positions[0]
        ),
        SolverOutcome::Sat(None) => "sat".into(),
        SolverOutcome::Unknown => "unknown".into(),
        SolverOutcome::Unavailable(why) => format!("solver unavailable: {why}"),
        SolverOutcome::Error(why) => format!("solver error: {why}"),
    }
}

fn random_start(spec: &BoardSpec, seed: u64) -> Position {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = spec.n();
    loop {
        let mut sq = || Square::new(rng.gen_range(0..n), rng.gen_range(0..n));
        let p = Position::new(sq(), sq(), Some(sq()), true);
        if p.is_legal(spec) && !p.is_checkmate(spec) {
            return p;
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let json = cli.json;
    match cli.command {
        Command::Retrograde { board, mode, dump } => {
            let st = Strategy::new(board.spec()?);
            let (r, table) = retrograde_table(&st, mode, 16);
            if let Some(path) = dump {
                let file =
                    File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                table.write_dump(BufWriter::new(file))?;
            }
            emit(json, &r, || {
                let mut s = format!(
                    "n = {} ({}, {} mode): {} of {} positions win, longest game {} plies, {} ms\n",
                    r.n,
                    r.variant,
                    r.mode,
                    r.winning_positions(),
                    r.total_positions,
                    r.max_plies,
                    r.elapsed_ms
                );
                for stuck in &r.stuck {
                    s += &format!("  not winning: {} ({:?})\n", stuck.position, stuck.reason);
                }
                s
            })?;
            Ok(if r.all_winning { 0 } else { exit::RETROGRADE })
        }
        Command::Lemma {
            board,
            name,
            symmetry,
            mode,
            solver,
        } => {
            let st = Strategy::new(board.spec()?);
            let lemmas = match &name {
                Some(name) => vec![builtin_lemma(name)
                    .with_context(|| format!("no built-in lemma named `{name}`"))?],
                None => builtin_lemmas(),
            };
            let table = MoveTable::build(&st, mode);
            let mut reports = Vec::new();
            for lemma in &lemmas {
                reports.push(check_lemma_with(
                    &lemma.clone().with_semantics(mode),
                    &table,
                    matches!(symmetry, OnOff::On),
                )?);
            }
            let mut solved = Vec::new();
            if let Some(cmd) = &solver {
                for lemma in &lemmas {
                    let script = smt::emit_smtlib(&smt::encode_lemma_lia(lemma, &st)?);
                    solved.push((
                        lemma.name.clone(),
                        smt::run_solver(cmd, &script, Some(lemma)),
                    ));
                }
            }
            let ok = reports.iter().all(|r| r.holds)
                && solved
                    .iter()
                    .all(|(_, o)| matches!(o, SolverOutcome::Unsat));
            #[derive(Serialize)]
            struct Out<'a> {
                reports: &'a [krk_core::LemmaReport],
                solver: &'a [(String, SolverOutcome)],
            }
            emit(
                json,
                &Out {
                    reports: &reports,
                    solver: &solved,
                },
                || {
                    let mut s = String::new();
                    for r in &reports {
                        s += &format!(
                            "{:<26} {}  ({} traces, {} violations, {} ms)\n",
                            r.name,
                            verdict(r.holds),
                            r.traces,
                            r.violations,
                            r.elapsed_ms
                        );
                        for c in r.counterexamples.iter().take(3) {
                            let trace: Vec<String> =
                                c.trace.positions.iter().map(ToString::to_string).collect();
                            s += &format!("    {} violated: {}\n", trace.join(" -> "), c.violated);
                        }
                    }
                    for (name, o) in &solved {
                        s += &format!("{name:<26} smt: {}\n", outcome_text(o));
                    }
                    s
                },
            )?;
            Ok(if ok { 0 } else { exit::LEMMA })
        }
        Command::Equiv { board } => {
            let st = Strategy::new(board.spec()?);
            let reports: Vec<_> = standard_equivalences(board.variant)
                .into_iter()
                .map(|(a, b, domain)| check_equivalence(a, b, &st, domain))
                .collect();
            emit(json, &reports, || {
                reports
                    .iter()
                    .map(|r| {
                        format!(
                            "{} == {}: {} ({} positions)\n",
                            r.left,
                            r.right,
                            verdict(r.holds),
                            r.scanned
                        )
                    })
                    .collect()
            })?;
            Ok(if reports.iter().all(|r| r.holds) {
                0
            } else {
                exit::EQUIVALENCE
            })
        }
        Command::Refine { board } => {
            let r = check_refinement(&Strategy::new(board.spec()?));
            emit(json, &r, || {
                let mut s = format!(
                    "function refines relation: {} ({} positions)\n",
                    verdict(r.holds),
                    r.scanned
                );
                for p in &r.failures {
                    s += &format!("  {p}\n");
                }
                s
            })?;
            Ok(if r.holds { 0 } else { exit::REFINEMENT })
        }
        Command::Count { n, side } => {
            let spec = BoardSpec::generalized(n)?;
            let side = side.map(|s| matches!(s, Side::W));
            #[derive(Serialize)]
            #[serde(rename_all = "camelCase")]
            struct Counts {
                n: i32,
                white_to_move: Option<bool>,
                with_rook: u64,
                rook_captured: u64,
            }
            let c = Counts {
                n,
                white_to_move: side,
                with_rook: count_legal(spec, side, true),
                rook_captured: count_legal(spec, side, false),
            };
            emit(json, &c, || {
                format!(
                    "{} legal positions with the rook, {} after its capture\n",
                    c.with_rook, c.rook_captured
                )
            })?;
            Ok(0)
        }
        Command::Classify { board } => {
            let h = classify_all(&Strategy::new(board.spec()?));
            emit(json, &h, || {
                let mut s = format!("n = {} ({}): {} positions\n", h.n, h.variant, h.total);
                for (k, c) in &h.counts {
                    s += &format!("  {:<20} {c}\n", k.name());
                }
                if h.unclassified > 0 {
                    s += &format!("  {:<20} {}\n", "(no move)", h.unclassified);
                }
                s
            })?;
            Ok(0)
        }
        Command::ExportSmt {
            out,
            variant,
            name,
            solver,
        } => {
            let spec = match variant {
                Variant::Classic8 => BoardSpec::classic8(),
                Variant::Generalized => BoardSpec::generalized(8)?,
            };
            if let Some(name) = &name {
                if builtin_lemma(name).is_none() {
                    bail!("no built-in lemma named `{name}`");
                }
            }
            let exported = smt::export_lemmas(
                &Strategy::new(spec),
                &out,
                name.as_deref(),
                solver.as_deref(),
            )?;
            emit(json, &exported, || {
                exported
                    .iter()
                    .map(|e| {
                        let solved = e
                            .outcome
                            .as_ref()
                            .map_or(String::new(), |o| format!("  {}", outcome_text(o)));
                        format!("{}  {} commands{solved}\n", e.path.display(), e.commands)
                    })
                    .collect()
            })?;
            let refuted = exported.iter().any(|e| {
                e.outcome
                    .as_ref()
                    .is_some_and(|o| !matches!(o, SolverOutcome::Unsat))
            });
            Ok(if refuted { exit::SOLVER } else { 0 })
        }
        Command::Play {
            n,
            variant,
            start,
            seed,
        } => {
            let spec = BoardSpec::new(n, variant)?;
            let p = match start {
                Some(s) => play::parse_start(&s, &spec)?,
                None => random_start(&spec, seed.unwrap_or_else(rand::random)),
            };
            play::run(spec, p, &mut io::stdin().lock(), &mut io::stdout().lock())?;
            Ok(0)
        }
        Command::Serve {
            port,
            host,
            cors_origin,
        } => {
            let addr: SocketAddr = format!("{host}:{port}")
                .parse()
                .with_context(|| format!("bad address {host}:{port}"))?;
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(server::serve(addr, cors_origin.as_deref()))?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
