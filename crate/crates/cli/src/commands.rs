use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use qtm_core::axioms::{conway_cases, replay, run_suite, CheckConfig, LawSet, SuiteReport, CONWAY};
use qtm_core::dqta::{cascade, feedback_dqta, turing_tensor, Dqta};
use qtm_core::intcat::{bidirectionalize, Qta};
use qtm_core::linalg::{isometry_defect, unitarity_defect};

use crate::cell::{build_cell, chain_cells, undirected_qta, Cell, ChainOptions, Rule};
use crate::error::{CliError, CliResult};
use crate::file::{parse_automaton, write_automaton, Automaton, Labels};
use crate::simulate::{basis_state, simulate};

#[derive(Debug, Parser)]
#[command(name = "qtm", version, about = "Quantum Turing automata: feedback, composition and law checks")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse an automaton file and check its transition.
    Validate { file: PathBuf },
    /// Cascade two automata, the first one applied first.
    Compose {
        f1: PathBuf,
        f2: PathBuf,
        #[arg(short)]
        o: PathBuf,
    },
    /// Turing tensor of two automata.
    Tensor {
        f1: PathBuf,
        f2: PathBuf,
        #[arg(short)]
        o: PathBuf,
    },
    /// Feed back the leading `u` dimensions of both interfaces.
    Feedback {
        f: PathBuf,
        #[arg(long)]
        u: usize,
        #[arg(short)]
        o: PathBuf,
    },
    /// Bidirectionalize a unitary automaton into a QTA.
    Bidir {
        f: PathBuf,
        /// Read a labeled cell as a two-sided morphism instead of `t ⊞ t†`.
        #[arg(long)]
        undirected: bool,
        #[arg(short)]
        o: PathBuf,
    },
    /// Build a one-cell automaton.
    Cell {
        #[arg(long)]
        states: usize,
        #[arg(long)]
        bits: u32,
        /// JSON rule table or transition matrix; identity when omitted.
        #[arg(long)]
        rule: Option<PathBuf>,
        #[arg(short)]
        o: PathBuf,
    },
    /// Chain copies of a labeled cell into a tape segment.
    Chain {
        cell: PathBuf,
        #[arg(long)]
        n: usize,
        /// Feed the two outer ends back into each other.
        #[arg(long)]
        ring: bool,
        /// Send (L,·) outputs right and (R,·) outputs left.
        #[arg(long)]
        mirror: bool,
        #[arg(short)]
        o: PathBuf,
    },
    /// Apply a QTA transition repeatedly to a control particle.
    Simulate {
        qta: PathBuf,
        #[arg(long)]
        steps: usize,
        /// Interface basis vector holding the particle at step 0.
        #[arg(long, default_value_t = 0)]
        start: usize,
    },
    /// Run the seeded law checks.
    Axioms {
        #[arg(long, default_value_t = CheckConfig::default().seed)]
        seed: u64,
        #[arg(long, default_value_t = CheckConfig::default().instances)]
        instances: usize,
        #[arg(long, default_value_t = CheckConfig::default().max_dim)]
        max_dim: usize,
        #[arg(long, default_value_t = CheckConfig::default().tolerance)]
        tol: f64,
        /// Comma-separated law sets; all when omitted.
        #[arg(long, value_delimiter = ',')]
        laws: Vec<LawSet>,
        /// Also write the report here.
        #[arg(short)]
        o: Option<PathBuf>,
        /// Replay every worst seed of a saved report instead of running.
        #[arg(long)]
        replay: Option<PathBuf>,
    },
}

/// Parses `args` (program name first), runs the command and returns the exit
/// status: 0 on success, 1 on validation or law failure, 2 on usage errors.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn execute(cmd: Command) -> CliResult<bool> {
    match cmd {
        Command::Validate { file } => validate(&file),
        Command::Compose { f1, f2, o } => binary(&f1, &f2, &o, Binary::Compose),
        Command::Tensor { f1, f2, o } => binary(&f1, &f2, &o, Binary::Tensor),
        Command::Feedback { f, u, o } => feedback(&f, u, &o),
        Command::Bidir { f, undirected, o } => bidir(&f, undirected, &o),
        Command::Cell {
            states,
            bits,
            rule,
            o,
        } => cell(states, bits, rule.as_deref(), &o),
        Command::Chain {
            cell,
            n,
            ring,
            mirror,
            o,
        } => chain(&cell, n, ChainOptions { ring, mirror }, &o),
        Command::Simulate { qta, steps, start } => run_simulation(&qta, steps, start),
        Command::Axioms {
            seed,
            instances,
            max_dim,
            tol,
            laws,
            o,
            replay,
        } => {
            let cfg = CheckConfig {
                seed,
                instances,
                max_dim,
                tolerance: tol,
                laws: if laws.is_empty() {
                    LawSet::ALL.to_vec()
                } else {
                    laws
                },
            };
            match replay {
                Some(path) => replay_report(cfg, &path),
                None => axioms(&cfg, o.as_deref()),
            }
        }
    }
}

fn describe(a: &Automaton) -> String {
    match a {
        Automaton::Dqta { t, .. } => format!(
            "kind=dqta h={} k={} l={} isometry_defect={:e}",
            t.h(),
            t.k(),
            t.l(),
            isometry_defect(t.tau())
        ),
        Automaton::Qta { q, .. } => format!(
            "kind=qta h={} k={} unitarity_defect={:e}",
            q.h(),
            q.n(),
            unitarity_defect(q.tau())
        ),
    }
}

fn save(a: &Automaton, o: &Path) -> CliResult<bool> {
    write_automaton(a, o)?;
    println!("{}: {}", o.display(), describe(a));
    Ok(true)
}

fn validate(file: &Path) -> CliResult<bool> {
    let a = parse_automaton(file)?;
    println!("{}: {}", file.display(), describe(&a));
    Ok(true)
}

/// A QTA result when every operand was a QTA, otherwise a DQTA.
fn result(t: Dqta, labels: Option<Labels>, as_qta: bool) -> CliResult<Automaton> {
    if as_qta && t.k() == t.l() {
        let labels = labels.map(|l| l.input);
        Ok(Automaton::Qta {
            q: Qta::new(t.h(), t.k(), t.into_tau())?,
            labels,
        })
    } else {
        Ok(Automaton::Dqta { t, labels })
    }
}

enum Binary {
    Compose,
    Tensor,
}

fn binary(f1: &Path, f2: &Path, o: &Path, op: Binary) -> CliResult<bool> {
    let a1 = parse_automaton(f1)?;
    let a2 = parse_automaton(f2)?;
    let both_qta = a1.kind() == crate::file::Kind::Qta && a2.kind() == crate::file::Kind::Qta;
    let (t1, l1) = a1.as_dqta()?;
    let (t2, l2) = a2.as_dqta()?;
    let (t, labels) = match op {
        Binary::Compose => {
            let labels = match (l1, l2) {
                (Some(x), Some(y)) => Some(Labels {
                    input: x.input,
                    output: y.output,
                }),
                _ => None,
            };
            (cascade(&t1, &t2)?, labels)
        }
        Binary::Tensor => {
            let labels = match (l1, l2) {
                (Some(x), Some(y)) => Some(Labels {
                    input: [x.input, y.input].concat(),
                    output: [x.output, y.output].concat(),
                }),
                _ => None,
            };
            (turing_tensor(&t1, &t2)?, labels)
        }
    };
    save(&result(t, labels, both_qta)?, o)
}

fn feedback(f: &Path, u: usize, o: &Path) -> CliResult<bool> {
    let a = parse_automaton(f)?;
    let (t, labels) = a.as_dqta()?;
    let traced = feedback_dqta(&t, u)?;
    let labels = labels.map(|l| Labels {
        input: l.input[u..].to_vec(),
        output: l.output[u..].to_vec(),
    });
    save(&result(traced, labels, a.kind() == crate::file::Kind::Qta)?, o)
}

fn bidir(f: &Path, undirected: bool, o: &Path) -> CliResult<bool> {
    let a = parse_automaton(f)?;
    let (t, labels) = a.unitary()?;
    let out = if undirected {
        let labels = labels.ok_or_else(|| {
            CliError::invalid("--undirected needs (L,i)/(R,i) interface labels")
        })?;
        let (q, names) = undirected_qta(&t, &labels)?;
        Automaton::Qta {
            q,
            labels: Some(names),
        }
    } else {
        let names = labels.map(|l| {
            l.input
                .iter()
                .map(|x| format!("src:{x}"))
                .chain(l.output.iter().map(|y| format!("dst:{y}")))
                .collect()
        });
        Automaton::Qta {
            q: bidirectionalize(&t)?,
            labels: names,
        }
    };
    save(&out, o)
}

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn cell_file(c: Cell) -> Automaton {
    Automaton::Dqta {
        t: c.t.into_dqta(),
        labels: Some(c.labels),
    }
}

fn cell(states: usize, bits: u32, rule: Option<&Path>, o: &Path) -> CliResult<bool> {
    let rule = match rule {
        Some(path) => Rule::from_json(&read_text(path)?)?,
        None => Rule::identity(),
    };
    save(&cell_file(build_cell(states, bits, &rule)?), o)
}

fn chain(path: &Path, n: usize, opts: ChainOptions, o: &Path) -> CliResult<bool> {
    let a = parse_automaton(path)?;
    let (t, labels) = a.unitary()?;
    let labels =
        labels.ok_or_else(|| CliError::invalid("chain needs (L,i)/(R,i) interface labels"))?;
    let segment = chain_cells(&Cell { t, labels }, n, opts)?;
    save(&cell_file(segment), o)
}

fn run_simulation(path: &Path, steps: usize, start: usize) -> CliResult<bool> {
    let a = parse_automaton(path)?;
    let Automaton::Qta { q, labels } = a else {
        return Err(CliError::invalid("simulate needs a qta file"));
    };
    let trace = simulate(&q, basis_state(&q, start)?, steps, labels.as_deref())?;
    print!("{trace}");
    let dev = trace.max_norm_deviation();
    println!("# max_norm_deviation={dev:e}");
    Ok(dev <= crate::simulate::NORM_TOL)
}

fn header(cfg: &CheckConfig) -> String {
    format!(
        "# seed={} instances={} max_dim={} tol={:e}\n",
        cfg.seed, cfg.instances, cfg.max_dim, cfg.tolerance
    )
}

/// Real numbers without an imaginary part; `-0` printed as `0`.
fn scalar(z: num_complex::Complex64) -> String {
    let z = z + num_complex::Complex64::new(0.0, 0.0);
    if z.im == 0.0 {
        format!("{}", z.re)
    } else {
        format!("{z}")
    }
}

fn conway_lines() -> String {
    let mut s = String::new();
    for c in conway_cases() {
        s.push_str(&format!(
            "# conway a={} b={} (ab)*={} a(ba)*b+1={} (a+b)*={} (a*b)*a*={}\n",
            scalar(c.a),
            scalar(c.b),
            scalar(c.product_lhs),
            scalar(c.product_rhs),
            scalar(c.sum_lhs),
            scalar(c.sum_rhs)
        ));
    }
    s
}

fn axioms(cfg: &CheckConfig, o: Option<&Path>) -> CliResult<bool> {
    let report = run_suite(cfg)?;
    let mut text = header(cfg);
    text.push_str(&report.to_string());
    if report.get(CONWAY).is_some() {
        text.push_str(&conway_lines());
    }
    print!("{text}");
    if let Some(o) = o {
        fs::write(o, &text).map_err(|source| CliError::Io {
            path: o.to_path_buf(),
            source,
        })?;
    }
    Ok(report.all_pass())
}

/// Reads `seed` and `max_dim` from the header comment, if any.
fn recorded_config(text: &str, mut cfg: CheckConfig) -> CliResult<CheckConfig> {
    let Some(line) = text.lines().find(|l| l.starts_with("# seed=")) else {
        return Ok(cfg);
    };
    for field in line.trim_start_matches('#').split_whitespace() {
        let bad = || CliError::invalid(format!("report header field '{field}'"));
        match field.split_once('=').ok_or_else(bad)? {
            ("seed", v) => cfg.seed = v.parse().map_err(|_| bad())?,
            ("max_dim", v) => cfg.max_dim = v.parse().map_err(|_| bad())?,
            _ => {}
        }
    }
    Ok(cfg)
}

fn replay_report(cfg: CheckConfig, path: &Path) -> CliResult<bool> {
    let text = read_text(path)?;
    let cfg = recorded_config(&text, cfg)?;
    let report = SuiteReport::parse(&text)?;
    let mut all = true;
    for r in &report.reports {
        if r.instances_run == 0 {
            continue;
        }
        let v = replay(&cfg, &r.law, r.worst_seed)?;
        let same = v.to_bits() == r.max_violation.to_bits();
        all &= same;
        println!(
            "law={} recorded={:.16e} replayed={:.16e} match={}",
            r.law, r.max_violation, v, same
        );
    }
    Ok(all)
}
