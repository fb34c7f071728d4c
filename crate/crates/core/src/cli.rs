//! Command-line front end.
//!
//! Exit codes: 0 success or pass, 1 "consensus impossible" or no
//! convergence, 2 usage, input or parse errors.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::analysis::{run_all_with, CheckOptions};
use crate::depgraph::{
    build_dependency_graph, format_edge_list, generate_protocol, parse_edge_list,
    path_equivalence_classes, to_dot, ProtocolKind,
};
use crate::groebner::{buchberger, elimination_ideal_with, Ideal};
use crate::polyring::{BaseOrder, MonomialOrder};
use crate::protocol::{DiagonalIdeal, Protocol};
use crate::protocol_io::{format_protocol, parse_polynomial, parse_protocol, write_trajectory_csv};
use crate::simulate::{
    consensus_metrics, default_initial_state, integrate, seeded_initial_state, Outcome,
    SimulationConfig,
};

#[derive(Debug, Parser)]
#[command(name = "polycon", version, about = "Algebraic checks for polynomial consensus protocols")]
pub struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    /// Suppress notes on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OrderArg {
    Lex,
    Grlex,
    Grevlex,
}

impl From<OrderArg> for BaseOrder {
    fn from(o: OrderArg) -> Self {
        match o {
            OrderArg::Lex => BaseOrder::Lex,
            OrderArg::Grlex => BaseOrder::GrLex,
            OrderArg::Grevlex => BaseOrder::GrevLex,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GraphFormat {
    Edges,
    Dot,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum KindArg {
    Linear,
    Squared,
    Product,
}

impl From<KindArg> for ProtocolKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Linear => ProtocolKind::Linear,
            KindArg::Squared => ProtocolKind::Squared,
            KindArg::Product => ProtocolKind::Product,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Reduced Gröbner basis of the protocol's right-hand sides.
    Groebner {
        /// Protocol file, `-` for stdin.
        file: PathBuf,
        #[arg(long, value_enum, default_value = "lex")]
        order: OrderArg,
        /// Extra generator, e.g. "x1 - x2". Repeatable.
        #[arg(long = "with", value_name = "POLY")]
        with: Vec<String>,
        /// Add the diagonal generators x1 - x2, ..., x(N-1) - xN.
        #[arg(long)]
        diagonal: bool,
        /// Comma-separated variables to eliminate.
        #[arg(long, value_delimiter = ',', value_name = "VARS")]
        eliminate: Vec<String>,
    },
    /// Run the necessary-condition battery.
    Check {
        file: PathBuf,
        /// Largest N for the subset sweep of the component estimate.
        #[arg(long, default_value_t = 8)]
        max_sweep_n: usize,
        /// Report wall-clock time per check.
        #[arg(long)]
        timing: bool,
    },
    /// Print the dependency graph.
    Graph {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "edges")]
        format: GraphFormat,
    },
    /// Generate a protocol from an edge list.
    Gen {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, value_enum)]
        kind: KindArg,
    },
    /// Integrate the protocol with fixed-step RK4.
    Simulate {
        file: PathBuf,
        /// Initial state as comma-separated numbers.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "seed")]
        x0: Option<Vec<f64>>,
        /// Seed for a uniform initial state in (0, 2].
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 0.01)]
        dt: f64,
        #[arg(long, default_value_t = 50.0)]
        t_end: f64,
        #[arg(long, default_value_t = 1e-6)]
        spread_tol: f64,
        /// CSV destination; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure carrying its exit code.
struct Failure {
    code: i32,
    message: String,
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    quiet: bool,
}

impl Io<'_> {
    fn read(&mut self, path: &PathBuf) -> Result<String, Failure> {
        if path.as_os_str() == "-" {
            let mut s = String::new();
            self.stdin
                .read_to_string(&mut s)
                .map_err(|e| usage(format!("stdin: {e}")))?;
            Ok(s)
        } else {
            fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
        }
    }

    fn protocol(&mut self, path: &PathBuf) -> Result<Protocol, Failure> {
        let text = self.read(path)?;
        parse_protocol(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
    }

    fn note(&mut self, msg: &str) {
        if !self.quiet {
            let _ = writeln!(self.err, "{msg}");
        }
    }

    fn emit(&mut self, text: &str) -> Result<(), Failure> {
        self.out
            .write_all(text.as_bytes())
            .map_err(|e| usage(format!("write failed: {e}")))
    }

    fn emit_json(&mut self, v: &serde_json::Value) -> Result<(), Failure> {
        let text = serde_json::to_string_pretty(v).expect("json values serialize");
        self.emit(&format!("{text}\n"))
    }
}

/// Entry point for `main`, returning the process exit code.
pub fn run_main() -> i32 {
    let stdin = io::stdin();
    let stdout = io::stdout();
    let stderr = io::stderr();
    run(
        std::env::args_os(),
        &mut stdin.lock(),
        &mut stdout.lock(),
        &mut stderr.lock(),
    )
}

/// Runs one invocation against the given streams.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                err.write_all(rendered.as_bytes())
            } else {
                out.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    let mut io = Io {
        stdin,
        out,
        err,
        quiet: cli.quiet,
    };
    let result = match cli.command {
        Command::Groebner {
            file,
            order,
            with,
            diagonal,
            eliminate,
        } => cmd_groebner(&mut io, cli.json, &file, order.into(), &with, diagonal, &eliminate),
        Command::Check {
            file,
            max_sweep_n,
            timing,
        } => cmd_check(&mut io, cli.json, &file, max_sweep_n, timing),
        Command::Graph { file, format } => cmd_graph(&mut io, cli.json, &file, format),
        Command::Gen { graph, kind } => cmd_gen(&mut io, cli.json, &graph, kind.into()),
        Command::Simulate {
            file,
            x0,
            seed,
            dt,
            t_end,
            spread_tol,
            out,
        } => cmd_simulate(&mut io, cli.json, &file, x0, seed, dt, t_end, spread_tol, out),
    };
    let code = match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(io.err, "error: {}", f.message);
            f.code
        }
    };
    let _ = io.out.flush();
    code
}

fn cmd_groebner(
    io: &mut Io,
    json: bool,
    file: &PathBuf,
    order: BaseOrder,
    with: &[String],
    diagonal: bool,
    eliminate: &[String],
) -> Result<i32, Failure> {
    let p = io.protocol(file)?;
    let ring = p.ring().clone();
    let mut gens: Vec<_> = p.polys().to_vec();
    for (k, text) in with.iter().enumerate() {
        let f = parse_polynomial(text, &ring).map_err(|e| usage(format!("--with #{}: {e}", k + 1)))?;
        gens.push(f);
    }
    if diagonal {
        gens.extend(DiagonalIdeal::new(&ring).generators().iter().cloned());
    }
    let ideal = Ideal::new(&ring, gens).expect("generators share the protocol ring");
    let ord = MonomialOrder::from(order);
    let basis = if eliminate.is_empty() {
        buchberger(&ideal, &ord).into_elements()
    } else {
        let mut gone = BTreeSet::new();
        for name in eliminate {
            let v = ring
                .index_of(name.trim())
                .ok_or_else(|| usage(format!("--eliminate: unknown variable `{}`", name.trim())))?;
            gone.insert(v);
        }
        if gone.len() == ring.nvars() {
            return Err(usage("--eliminate: at least one variable must be kept"));
        }
        let keep: BTreeSet<usize> = (0..ring.nvars()).filter(|v| !gone.contains(v)).collect();
        elimination_ideal_with(&ideal, &keep, BaseOrder::GrevLex, order)
            .map_err(|e| usage(e.to_string()))?
    };
    let rendered: Vec<String> = basis.iter().map(|g| g.display_with(&ord).to_string()).collect();
    if json {
        let eliminated: Vec<&str> = eliminate.iter().map(|s| s.trim()).collect();
        io.emit_json(&json!({
            "order": ord.to_string(),
            "eliminated": eliminated,
            "basis": rendered,
            "zero_ideal": rendered.is_empty(),
        }))?;
    } else {
        let mut text = String::new();
        for line in &rendered {
            text.push_str(line);
            text.push('\n');
        }
        io.emit(&text)?;
    }
    if rendered.is_empty() {
        io.note("zero ideal");
    }
    Ok(0)
}

fn cmd_check(io: &mut Io, json: bool, file: &PathBuf, max_sweep_n: usize, timing: bool) -> Result<i32, Failure> {
    let p = io.protocol(file)?;
    let opts = CheckOptions {
        max_sweep_n,
        record_timing: timing,
    };
    let report = run_all_with(&p, &opts);
    if json {
        io.emit_json(&report.to_json())?;
    } else {
        io.emit(&report.to_string())?;
    }
    Ok(if report.is_impossible() { 1 } else { 0 })
}

fn cmd_graph(io: &mut Io, json: bool, file: &PathBuf, format: GraphFormat) -> Result<i32, Failure> {
    let p = io.protocol(file)?;
    let g = build_dependency_graph(&p);
    if json {
        let part = path_equivalence_classes(&g);
        let one_based = |c: &Vec<usize>| c.iter().map(|v| v + 1).collect::<Vec<_>>();
        let self_dep: Vec<usize> = (0..g.n()).filter(|&v| g.self_dependent()[v]).map(|v| v + 1).collect();
        io.emit_json(&json!({
            "nodes": g.n(),
            "edges": g.edges().iter().map(|&(i, j)| [i + 1, j + 1]).collect::<Vec<_>>(),
            "self_dependent": self_dep,
            "classes": part.classes().iter().map(one_based).collect::<Vec<_>>(),
            "maximal_classes": part.maximal_classes().map(one_based).collect::<Vec<_>>(),
        }))?;
    } else {
        let text = match format {
            GraphFormat::Edges => format_edge_list(&g, true),
            GraphFormat::Dot => to_dot(&g),
        };
        io.emit(&text)?;
    }
    Ok(0)
}

fn cmd_gen(io: &mut Io, json: bool, graph: &PathBuf, kind: ProtocolKind) -> Result<i32, Failure> {
    let text = io.read(graph)?;
    let g = parse_edge_list(&text).map_err(|e| usage(format!("{}: {e}", graph.display())))?;
    let protocol = format_protocol(&generate_protocol(&g, kind));
    if json {
        io.emit_json(&json!({ "kind": kind.name(), "protocol": protocol }))?;
    } else {
        io.emit(&protocol)?;
    }
    Ok(0)
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    io: &mut Io,
    json: bool,
    file: &PathBuf,
    x0: Option<Vec<f64>>,
    seed: Option<u64>,
    dt: f64,
    t_end: f64,
    spread_tol: f64,
    out: Option<PathBuf>,
) -> Result<i32, Failure> {
    let p = io.protocol(file)?;
    let x0 = match (x0, seed) {
        (Some(x), _) => x,
        (None, Some(s)) => seeded_initial_state(p.n(), s),
        (None, None) => default_initial_state(p.n()),
    };
    if x0.len() != p.n() {
        return Err(usage(format!("--x0 has {} entries, protocol has {} agents", x0.len(), p.n())));
    }
    let cfg = SimulationConfig {
        spread_tol,
        ..SimulationConfig::new(x0, dt, t_end)
    };
    let tr = integrate(&p, &cfg).map_err(|e| usage(e.to_string()))?;
    let mut csv = Vec::new();
    write_trajectory_csv(&tr, &mut csv).expect("writing to memory");
    let summary = format!("outcome: {}", tr.outcome);
    let metrics = consensus_metrics(&tr);
    let summary_json = || {
        let (t, value) = match tr.outcome {
            Outcome::Converged { t, value } => (t, Some(value)),
            Outcome::HorizonReached { t } | Outcome::Diverged { t } => (t, None),
        };
        json!({
            "outcome": tr.outcome.label(),
            "t": t,
            "value": value,
            "steps": tr.times.len() - 1,
            "final_spread": metrics.final_spread,
        })
    };
    match out {
        Some(path) => {
            fs::write(&path, &csv).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            if json {
                io.emit_json(&summary_json())?;
            } else {
                io.emit(&format!("{summary}\n"))?;
            }
        }
        None => {
            io.out
                .write_all(&csv)
                .map_err(|e| usage(format!("write failed: {e}")))?;
            if json {
                let text = serde_json::to_string(&summary_json()).expect("json values serialize");
                io.note(&text);
            } else {
                io.note(&summary);
            }
        }
    }
    Ok(if tr.outcome.is_converged() { 0 } else { 1 })
}
