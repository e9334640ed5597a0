//! `qchrom`: command-line front end.
//!
//! Exit codes: 0 computed and the property holds, 1 computed and it fails,
//! 2 input error, 3 budget exhausted. The JSON report goes to stdout and a
//! one-line summary to stderr.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use qchrom::chromatic::{self, Colorability};
use qchrom::game::{self, QuestionDistribution, Strategy};
use qchrom::io::{self, Certificate, KsWitness, Metadata};
use qchrom::ks::{self, Mode};
use qchrom::reps::{self, PsdCheck, SearchParams};
use qchrom::{Error, Graph};

#[derive(Parser)]
#[command(name = "qchrom", version, about = "Chromatic numbers, orthogonal representations and Kochen-Specker sets")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Global {
    /// Absolute tolerance for orthogonality and consistency checks.
    #[arg(long, global = true, default_value_t = qchrom::DEFAULT_TOL)]
    tol: f64,
    /// Relative cutoff for rank decisions.
    #[arg(long, global = true, default_value_t = qchrom::DEFAULT_RANK_TOL)]
    rank_tol: f64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Node budget for exact searches.
    #[arg(long, global = true, default_value_t = 10_000_000)]
    budget: u64,
    /// Also write the emitted certificate to this file.
    #[arg(long, global = true)]
    cert_out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct SearchArgs {
    #[arg(long, default_value_t = 20)]
    restarts: usize,
    #[arg(long, default_value_t = 400)]
    iterations: usize,
    /// Search over real vectors only.
    #[arg(long)]
    real_only: bool,
}

/// GRAPH is a DIMACS file or one of: complete:N, cycle:N, petersen, hadamard:N,
/// empty:N, random:N:P:SEED, ortho:SET (orthogonality graph of a vector set).
#[derive(Subcommand)]
enum Command {
    /// Chromatic number with a coloring certificate.
    Chi { graph: String },
    /// Clique number with a maximum clique.
    Clique { graph: String },
    /// Decide c-colorability.
    Colorable {
        graph: String,
        #[arg(long)]
        colors: usize,
    },
    /// Clique lower bound and verified upper bound for the orthogonal rank.
    XiBounds {
        graph: String,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Upper bound on the rank-1 quantum chromatic number via G □ K_c.
    Chiq1 {
        graph: String,
        #[arg(long)]
        cmax: usize,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Verify a coloring, orthrep, matrixrep or qcoloring certificate against a graph.
    VerifyRep { graph: String, cert: PathBuf },
    /// Verify a quantum coloring certificate and list violations.
    VerifyQcoloring { graph: String, cert: PathBuf },
    /// Check a PSD matrix witness for the complement pattern of a graph.
    PsdWitness { graph: String, cert: PathBuf },
    /// Re-check a ks-witness certificate.
    VerifyKsWitness { cert: PathBuf },
    /// Rank-1 quantum N-coloring of the Hadamard graph G_N.
    HadamardColoring {
        #[arg(short = 'N', long = "bits")]
        n: usize,
    },
    /// Decide the KS (or weak KS) property of a vector set file or bundled set name.
    KsCheck {
        set: String,
        #[arg(long)]
        weak: bool,
        /// Cross-check against 2^n enumeration (at most 25 rays).
        #[arg(long)]
        oracle: bool,
    },
    /// Write a graph in DIMACS format.
    Gen { graph: String },
    /// Coloring-game strategies.
    #[command(subcommand)]
    Game(GameCommand),
}

#[derive(Subcommand)]
enum GameCommand {
    /// Exact winning probability under the uniform question distribution.
    Exact { graph: String, strategy: PathBuf },
    /// Monte-Carlo estimate of the winning probability.
    Simulate {
        graph: String,
        strategy: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        rounds: u64,
    },
    /// Bring a winning quantum strategy to normal form.
    Normalize { graph: String, strategy: PathBuf },
    /// List consistency violations.
    Check { graph: String, strategy: PathBuf },
    /// Build a strategy file from a coloring or qcoloring certificate.
    Strategy {
        cert: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Outcome {
    code: u8,
    summary: String,
    report: Value,
    cert: Option<Certificate>,
}

fn outcome(holds: bool, summary: impl Into<String>, report: Value) -> Outcome {
    Outcome {
        code: if holds { 0 } else { 1 },
        summary: summary.into(),
        report,
        cert: None,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let g = cli.global.clone();
    let meta = Metadata::new(g.tol, g.rank_tol, Some(g.seed), Some(g.budget));
    let name = command_name(&cli.command);
    match run(cli.command, &g) {
        Ok(mut out) => {
            if let Some(cert) = &out.cert {
                let file = io::certificate_file(cert, meta.clone());
                if let Some(path) = &g.cert_out {
                    let text = serde_json::to_string_pretty(&file).expect("serializable");
                    if let Err(e) = std::fs::write(path, text) {
                        eprintln!("qchrom: cannot write {}: {e}", path.display());
                        return ExitCode::from(2);
                    }
                }
                out.report["certificate"] = serde_json::to_value(file).expect("serializable");
            }
            out.report["command"] = json!(name);
            out.report["metadata"] = serde_json::to_value(&meta).expect("serializable");
            emit(&out.report);
            eprintln!("{name}: {}", out.summary);
            ExitCode::from(out.code)
        }
        Err(e) => {
            let code = match e {
                Error::BudgetExceeded { .. } => 3,
                _ => 2,
            };
            let mut report = json!({"command": name, "error": e.to_string(), "exit_code": code});
            if let Error::BudgetExceeded { nodes, lower, upper } = e {
                report["nodes"] = json!(nodes);
                report["lower"] = json!(lower);
                report["upper"] = json!(upper);
            }
            report["metadata"] = serde_json::to_value(&meta).expect("serializable");
            emit(&report);
            eprintln!("{name}: error: {e}");
            ExitCode::from(code)
        }
    }
}

// A closed stdout (e.g. piped into `head`) is not an error worth a panic.
fn emit(report: &Value) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{}", serde_json::to_string_pretty(report).expect("serializable"));
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Chi { .. } => "chi",
        Command::Clique { .. } => "clique",
        Command::Colorable { .. } => "colorable",
        Command::XiBounds { .. } => "xi-bounds",
        Command::Chiq1 { .. } => "chiq1",
        Command::VerifyRep { .. } => "verify-rep",
        Command::VerifyQcoloring { .. } => "verify-qcoloring",
        Command::PsdWitness { .. } => "psd-witness",
        Command::VerifyKsWitness { .. } => "verify-ks-witness",
        Command::HadamardColoring { .. } => "hadamard-coloring",
        Command::KsCheck { .. } => "ks-check",
        Command::Gen { .. } => "gen",
        Command::Game(GameCommand::Exact { .. }) => "game exact",
        Command::Game(GameCommand::Simulate { .. }) => "game simulate",
        Command::Game(GameCommand::Normalize { .. }) => "game normalize",
        Command::Game(GameCommand::Check { .. }) => "game check",
        Command::Game(GameCommand::Strategy { .. }) => "game strategy",
    }
}

fn read(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

fn load_graph(arg: &str) -> Result<Graph, Error> {
    let path = Path::new(arg);
    if path.is_file() {
        let (g, warnings) = io::parse_dimacs(&read(path)?)?;
        for w in warnings {
            eprintln!("warning: {}: {w}", path.display());
        }
        return Ok(g);
    }
    let parts: Vec<&str> = arg.split(':').collect();
    let num = |i: usize| -> Result<usize, Error> {
        parts
            .get(i)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::InvalidArgument(format!("cannot read graph {arg:?}")))
    };
    match parts[0] {
        "complete" => Graph::complete(num(1)?),
        "cycle" => Graph::cycle(num(1)?),
        "empty" => Ok(Graph::empty(num(1)?)),
        "petersen" => Ok(Graph::petersen()),
        "ortho" if parts.len() == 2 => load_vector_set(parts[1], qchrom::DEFAULT_TOL)?.0.orthogonality_graph(),
        "hadamard" => Graph::hadamard(num(1)?),
        "random" => {
            let p: f64 = parts
                .get(2)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::InvalidArgument(format!("cannot read graph {arg:?}")))?;
            Ok(Graph::random(num(1)?, p, num(3)? as u64))
        }
        _ => Err(Error::InvalidArgument(format!(
            "{arg:?} is neither a file nor a known graph"
        ))),
    }
}

fn load_vector_set(set: &str, tol: f64) -> Result<(ks::VectorSet, Vec<Vec<String>>), Error> {
    if ks::BUNDLED.contains(&set) && !Path::new(set).is_file() {
        Ok((ks::bundled(set)?, Vec::new()))
    } else {
        io::parse_vector_set_with(&read(Path::new(set))?, tol)
    }
}

fn load_cert(path: &Path) -> Result<(Certificate, Metadata), Error> {
    io::parse_certificate(&read(path)?)
}

fn search_params(g: &Global, s: &SearchArgs) -> SearchParams {
    SearchParams {
        seed: g.seed,
        iterations: s.iterations,
        restarts: s.restarts,
        real_only: s.real_only,
        tol: g.tol,
        clique_budget: g.budget,
    }
}

fn run(cmd: Command, g: &Global) -> Result<Outcome, Error> {
    match cmd {
        Command::Chi { graph } => {
            let gr = load_graph(&graph)?;
            let r = chromatic::chromatic_number(&gr, g.budget)?;
            let mut o = outcome(
                true,
                format!("chi = {}", r.chi),
                json!({"vertices": gr.vertex_count(), "edges": gr.edge_count(), "chi": r.chi,
                       "clique": r.clique, "nodes": r.nodes}),
            );
            o.cert = Some(Certificate::Coloring(r.certificate));
            Ok(o)
        }
        Command::Clique { graph } => {
            let gr = load_graph(&graph)?;
            let r = chromatic::clique_number(&gr, g.budget)?;
            Ok(outcome(
                true,
                format!("omega = {}", r.size),
                json!({"omega": r.size, "clique": r.clique, "nodes": r.nodes}),
            ))
        }
        Command::Colorable { graph, colors } => {
            let gr = load_graph(&graph)?;
            match chromatic::is_c_colorable(&gr, colors, g.budget)? {
                Colorability::Yes(cert) => {
                    let mut o = outcome(true, format!("{colors}-colorable"), json!({"colors": colors, "colorable": true}));
                    o.cert = Some(Certificate::Coloring(cert));
                    Ok(o)
                }
                Colorability::No { nodes } => Ok(outcome(
                    false,
                    format!("not {colors}-colorable"),
                    json!({"colors": colors, "colorable": false, "nodes": nodes}),
                )),
                Colorability::BudgetExceeded { nodes } => Err(Error::BudgetExceeded {
                    nodes,
                    lower: 0,
                    upper: 0,
                }),
            }
        }
        Command::XiBounds { graph, search } => {
            let gr = load_graph(&graph)?;
            let b = reps::xi_bounds(&gr, &search_params(g, &search))?;
            let mut o = outcome(
                true,
                format!("{} <= xi <= {}", b.lower, b.upper),
                json!({"lower": b.lower, "lower_clique": b.lower_clique, "upper": b.upper}),
            );
            o.cert = Some(Certificate::OrthRep(b.upper_witness));
            Ok(o)
        }
        Command::Chiq1 { graph, cmax, search } => {
            let gr = load_graph(&graph)?;
            match reps::chi_q1_upper_via_product(&gr, cmax, &search_params(g, &search), g.budget)? {
                Some(b) => {
                    let mut o = outcome(
                        true,
                        format!("chi_q1 <= {}", b.colors),
                        json!({"found": true, "upper": b.colors, "source": b.source}),
                    );
                    o.cert = Some(Certificate::MatrixRep(b.witness));
                    Ok(o)
                }
                None => Ok(outcome(
                    false,
                    format!("no witness with at most {cmax} colors"),
                    json!({"found": false, "cmax": cmax}),
                )),
            }
        }
        Command::VerifyRep { graph, cert } => {
            let gr = load_graph(&graph)?;
            let (c, _) = load_cert(&cert)?;
            let ok = match &c {
                Certificate::Coloring(cc) => chromatic::verify_coloring(&gr, cc)?,
                Certificate::OrthRep(r) => reps::verify_orthogonal_representation(&gr, r, g.tol)?,
                Certificate::MatrixRep(r) => reps::verify_matrix_representation(&gr, r, g.tol)?,
                Certificate::QColoring(q) => reps::verify_quantum_coloring(&gr, q, g.tol)?,
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "verify-rep does not handle {} certificates",
                        other.kind()
                    )))
                }
            };
            Ok(outcome(
                ok,
                format!("{} {}", c.kind(), if ok { "verifies" } else { "does not verify" }),
                json!({"kind": c.kind(), "valid": ok}),
            ))
        }
        Command::VerifyQcoloring { graph, cert } => {
            let gr = load_graph(&graph)?;
            let (c, _) = load_cert(&cert)?;
            let Certificate::QColoring(q) = c else {
                return Err(Error::InvalidArgument(format!("expected a qcoloring, got {}", c.kind())));
            };
            let v = reps::quantum_coloring_violations(&gr, &q, g.tol)?;
            Ok(outcome(
                v.is_empty(),
                format!("{} violations", v.len()),
                json!({"valid": v.is_empty(), "colors": q.colors, "rank": q.rank, "violations": v}),
            ))
        }
        Command::PsdWitness { graph, cert } => {
            let gr = load_graph(&graph)?;
            let (c, _) = load_cert(&cert)?;
            let Certificate::PsdWitness(w) = c else {
                return Err(Error::InvalidArgument(format!("expected a psd-witness, got {}", c.kind())));
            };
            match reps::psd_witness_check(&gr, &w, g.tol, g.rank_tol)? {
                PsdCheck::Accepted(rep) => {
                    let mut o = outcome(
                        true,
                        format!("accepted, xi <= {}", rep.dimension),
                        json!({"accepted": true, "rank": w.rank}),
                    );
                    o.cert = Some(Certificate::OrthRep(rep));
                    Ok(o)
                }
                PsdCheck::Rejected(r) => Ok(outcome(
                    false,
                    format!("rejected: {r:?}"),
                    json!({"accepted": false, "rejection": r}),
                )),
            }
        }
        Command::VerifyKsWitness { cert } => {
            let (c, _) = load_cert(&cert)?;
            let Certificate::KsWitness(w) = c else {
                return Err(Error::InvalidArgument(format!("expected a ks-witness, got {}", c.kind())));
            };
            let bases = ks::enumerate_bases(&w.set)?;
            let ok = ks::validate_witness(&w.set, &bases, &w.labels, w.weak)?;
            Ok(outcome(
                ok,
                format!("witness {}", if ok { "verifies" } else { "does not verify" }),
                json!({"valid": ok, "weak": w.weak, "rays": w.set.len(), "bases": bases.bases.len()}),
            ))
        }
        Command::HadamardColoring { n } => {
            let qc = reps::hadamard_quantum_coloring(n)?;
            let gr = Graph::hadamard(n)?;
            let ok = reps::verify_quantum_coloring(&gr, &qc, g.tol)?;
            let mut o = outcome(
                ok,
                format!("G_{n}: quantum {n}-coloring {}", if ok { "verifies" } else { "fails" }),
                json!({"bits": n, "vertices": gr.vertex_count(), "edges": gr.edge_count(),
                       "colors": n, "valid": ok}),
            );
            o.cert = Some(Certificate::QColoring(qc));
            Ok(o)
        }
        Command::KsCheck { set, weak, oracle } => ks_check(&set, weak, oracle, g),
        Command::Gen { graph } => {
            let gr = load_graph(&graph)?;
            Ok(outcome(
                true,
                format!("{} vertices, {} edges", gr.vertex_count(), gr.edge_count()),
                json!({"vertices": gr.vertex_count(), "edges": gr.edge_count(), "dimacs": io::write_dimacs(&gr)}),
            ))
        }
        Command::Game(gc) => run_game(gc, g),
    }
}

fn ks_check(set: &str, weak: bool, oracle: bool, g: &Global) -> Result<Outcome, Error> {
    let (vs, merged) = load_vector_set(set, g.tol)?;
    let mode = if weak { Mode::Weak } else { Mode::Ks };
    let d = if weak { ks::weak_ks_check(&vs)? } else { ks::ks_check(&vs)? };
    let bases = ks::enumerate_bases(&vs)?;
    let mut report = json!({
        "set": Path::new(set).file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
        "dimension": vs.dimension(),
        "rays": vs.len(),
        "bases": bases.bases.len(),
        "merged": merged,
        "mode": mode,
        "is_ks": d.is_ks,
        "is_weak_ks": d.is_weak_ks,
        "holds": d.holds(),
        "method": d.method,
        "witness": d.witness.as_ref().map(|w| {
            vs.rays().iter().zip(w).filter(|(_, &l)| l == 1).map(|(r, _)| r.id()).collect::<Vec<_>>()
        }),
    });
    if oracle {
        let bf = ks::brute_force_ks(&vs, mode)?;
        let agrees = bf.is_ks == d.is_ks && bf.is_weak_ks == d.is_weak_ks;
        report["oracle"] = json!({"method": bf.method, "is_ks": bf.is_ks, "is_weak_ks": bf.is_weak_ks, "agrees": agrees});
        if !agrees {
            return Err(Error::Internal("backtracking and enumeration disagree".into()));
        }
    }
    let label = if weak { "weak KS" } else { "KS" };
    let mut summary = format!("{} rays, {} bases: {}{label}", vs.len(), bases.bases.len(), if d.holds() { "" } else { "not " });
    if oracle {
        summary.push_str(", enumeration agrees");
    }
    let mut o = outcome(d.holds(), summary, report);
    o.cert = d.witness.map(|labels| {
        Certificate::KsWitness(KsWitness {
            set: vs,
            labels,
            weak: !d.is_weak_ks,
        })
    });
    Ok(o)
}

fn load_strategy(path: &Path, tol: f64) -> Result<Strategy, Error> {
    io::parse_strategy(&read(path)?, tol)
}

fn quantum(s: Strategy) -> game::PovmStrategy {
    match s {
        Strategy::Quantum(q) => q,
        Strategy::Classical(c) => game::PovmStrategy::from_classical(&c),
    }
}

fn run_game(gc: GameCommand, g: &Global) -> Result<Outcome, Error> {
    match gc {
        GameCommand::Strategy { cert, out } => {
            let (c, _) = load_cert(&cert)?;
            let s = match c {
                Certificate::Coloring(cc) => Strategy::Classical(game::ClassicalStrategy::from_coloring(&cc)),
                Certificate::QColoring(qc) => Strategy::Quantum(game::PovmStrategy::from_quantum_coloring(&qc)),
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "cannot build a strategy from a {} certificate",
                        other.kind()
                    )))
                }
            };
            let file = io::StrategyFile::from_strategy(&s);
            if let Some(path) = out {
                let text = serde_json::to_string_pretty(&file).expect("serializable");
                std::fs::write(&path, text)
                    .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
            }
            Ok(outcome(true, "strategy written", json!({"strategy": file})))
        }
        GameCommand::Exact { graph, strategy } => {
            let gr = load_graph(&graph)?;
            let s = load_strategy(&strategy, g.tol)?;
            let q = QuestionDistribution::uniform(&gr);
            let (p, extra) = match &s {
                Strategy::Classical(c) => {
                    let (won, total) = game::classical_win_count(&gr, c)?;
                    (won as f64 / total.max(1) as f64, json!({"won": won, "total": total}))
                }
                Strategy::Quantum(qs) => (game::quantum_win_probability(&gr, qs, &q)?, Value::Null),
            };
            let wins = (p - 1.0).abs() <= g.tol;
            let mut report = json!({"win_probability": p, "wins_with_certainty": wins, "questions": q.len()});
            if !extra.is_null() {
                report["exact"] = extra;
            }
            Ok(outcome(wins, format!("win probability {p:.12}"), report))
        }
        GameCommand::Simulate { graph, strategy, rounds } => {
            let gr = load_graph(&graph)?;
            let s = load_strategy(&strategy, g.tol)?;
            let q = QuestionDistribution::uniform(&gr);
            let r = game::simulate_game(&gr, &s, &q, rounds, g.seed)?;
            Ok(outcome(
                r.wins == r.rounds,
                format!("{} / {} rounds won", r.wins, r.rounds),
                serde_json::to_value(&r).expect("serializable"),
            ))
        }
        GameCommand::Check { graph, strategy } => {
            let gr = load_graph(&graph)?;
            let s = quantum(load_strategy(&strategy, g.tol)?);
            let v = game::check_consistency(&s, &gr, g.tol)?;
            Ok(outcome(
                v.is_empty(),
                format!("{} violations", v.len()),
                json!({"consistent": v.is_empty(), "violations": v}),
            ))
        }
        GameCommand::Normalize { graph, strategy } => {
            let gr = load_graph(&graph)?;
            let s = quantum(load_strategy(&strategy, g.tol)?);
            match game::normalize_strategy(&s, &gr, g.tol, g.rank_tol) {
                Ok((normal, trace)) => {
                    let flags = game::normal_form_flags(&normal, &gr, g.tol, g.rank_tol)?;
                    let steps: Vec<Value> = trace
                        .steps
                        .iter()
                        .map(|st| json!({"stage": st.stage, "dim_a": st.strategy.dim_a,
                                         "dim_b": st.strategy.dim_b, "win_probability": st.win_probability}))
                        .collect();
                    Ok(outcome(
                        flags.all(),
                        format!("normal form of rank {} in dimension {}", trace.rank, normal.dim_a),
                        json!({
                            "schmidt_coefficients": trace.schmidt_coefficients,
                            "schmidt_rank": trace.schmidt_rank,
                            "rank": trace.rank,
                            "steps": steps,
                            "flags": flags,
                            "strategy": io::StrategyFile::from_strategy(&Strategy::Quantum(normal)),
                        }),
                    ))
                }
                Err(Error::NotWinning(_)) => {
                    let v = game::check_consistency(&s, &gr, g.tol)?;
                    Ok(outcome(
                        false,
                        format!("not a winning strategy: {} violations", v.len()),
                        json!({"normalized": false, "violations": v}),
                    ))
                }
                Err(e @ (Error::AmbiguousRank { .. } | Error::StageFailed { .. })) => Ok(outcome(
                    false,
                    e.to_string(),
                    json!({"normalized": false, "reason": e.to_string()}),
                )),
                Err(e) => Err(e),
            }
        }
    }
}
