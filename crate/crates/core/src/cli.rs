//! Command-line interface: `count`, `verify`, `selftest` and `bench`.
//!
//! Exit codes: 0 success, 1 mismatch or failed property, 2 bad input,
//! 3 capacity guard.

use std::collections::{BTreeSet, HashMap};
use std::ffi::OsString;
use std::fmt::Display;
use std::hash::Hash;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::checks;
use crate::dp::{CountError, MAX_BAG};
use crate::gen::random_partial_ktree;
use crate::hamiltonian::{count_hamiltonian_traced, HamTable, HamiltonianDp, Layout};
use crate::instance::graph::named;
use crate::instance::{make_nice, parse_graph, parse_td, parse_terminals, Graph, NiceDecomposition, TreeDecomposition};
use crate::nsc::{Mode, NscError};
use crate::oracle::{
    brute_count_hamiltonian, brute_count_steiner, hamiltonian_state_definition, kirchhoff_count_steiner,
    steiner_state_definition, MapReading,
};
use crate::ring::{Integers, ModP, Ring};
use crate::steiner::{count_steiner_traced, SteinerDp, SteinerTable};

#[derive(Debug, Parser)]
#[command(name = "twcount", version, about = "Count Steiner trees and Hamiltonian cycles over tree decompositions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Count Steiner trees by size or Hamiltonian cycles.
    Count {
        #[command(subcommand)]
        problem: CountProblem,
    },
    /// Compare fast joins, naive joins and brute force.
    Verify(VerifyArgs),
    /// Run the algebra property suites.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Time naive against fast joins on random tables.
    Bench(BenchArgs),
}

#[derive(Debug, Subcommand)]
enum CountProblem {
    Steiner {
        #[command(flatten)]
        common: CountArgs,
        #[arg(long)]
        terminals: PathBuf,
    },
    Hamiltonian {
        #[command(flatten)]
        common: CountArgs,
    },
}

#[derive(Debug, Args)]
struct CountArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    td: PathBuf,
    #[arg(long, value_enum, default_value_t = Join::Fast)]
    join: Join,
    /// Count modulo this prime (must exceed 2^60).
    #[arg(long = "mod")]
    modulus: Option<u64>,
    #[arg(long)]
    json: bool,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Join {
    Fast,
    Naive,
}

impl From<Join> for Mode {
    fn from(j: Join) -> Mode {
        match j {
            Join::Fast => Mode::Fast,
            Join::Naive => Mode::Naive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Problem {
    Steiner,
    Hamiltonian,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    problem: Problem,
    #[arg(long, conflicts_with = "random")]
    graph: Option<PathBuf>,
    #[arg(long, requires = "graph")]
    td: Option<PathBuf>,
    #[arg(long, requires = "graph")]
    terminals: Option<PathBuf>,
    /// Random instances: vertices, width and first seed.
    #[arg(long, value_parser = parse_random)]
    random: Option<(usize, usize, u64)>,
    /// Also check every node table against the state definition.
    #[arg(long)]
    per_node: bool,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, hide = true)]
    corrupt_node: Option<usize>,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long)]
    bag: usize,
    #[arg(long, value_enum, default_value_t = Problem::Steiner)]
    problem: Problem,
    #[arg(long, default_value_t = 3)]
    reps: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

fn parse_random(s: &str) -> Result<(usize, usize, u64), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [n, tw, seed] = parts[..] else {
        return Err("expected `n,tw,seed`".into());
    };
    let num = |x: &str| x.parse::<u64>().map_err(|_| format!("`{x}` is not a number"));
    Ok((num(n)? as usize, num(tw)? as usize, num(seed)?))
}

/// Why a command stopped.
#[derive(Debug)]
enum Stop {
    Input(String),
    Mismatch(String),
    Capacity(String),
    Internal(String),
}

impl Stop {
    fn code(&self) -> i32 {
        match self {
            Stop::Mismatch(_) | Stop::Internal(_) => 1,
            Stop::Input(_) => 2,
            Stop::Capacity(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Stop::Input(m) | Stop::Mismatch(m) | Stop::Capacity(m) | Stop::Internal(m) => m,
        }
    }
}

impl From<CountError> for Stop {
    fn from(e: CountError) -> Stop {
        let msg = e.to_string();
        match e {
            CountError::Capacity { .. } | CountError::Nsc(NscError::TooLarge { .. }) => Stop::Capacity(msg),
            CountError::NoTerminals | CountError::TerminalOutOfRange(_) | CountError::TooFewVertices(_) => {
                Stop::Input(msg)
            }
            _ => Stop::Internal(msg),
        }
    }
}

fn input_err(what: &Path, e: impl Display) -> Stop {
    Stop::Input(format!("{}: {e}", what.display()))
}

fn read(path: &Path) -> Result<String, Stop> {
    std::fs::read_to_string(path).map_err(|e| input_err(path, e))
}

struct Instance {
    graph: Graph,
    td: TreeDecomposition,
    terminals: Vec<usize>,
}

fn load(graph: &Path, td: &Path, terminals: Option<&Path>) -> Result<Instance, Stop> {
    let g = parse_graph(&read(graph)?).map_err(|e| input_err(graph, e))?;
    let t = parse_td(&read(td)?, &g).map_err(|e| input_err(td, e))?;
    let k = match terminals {
        Some(p) => parse_terminals(&read(p)?, &g).map_err(|e| input_err(p, e))?,
        None => Vec::new(),
    };
    Ok(Instance { graph: g, td: t, terminals: k })
}

fn nice(inst: &Instance) -> Result<NiceDecomposition, Stop> {
    make_nice(&inst.td, &inst.graph).map_err(|e| Stop::Input(e.to_string()))
}

fn pool(threads: usize) -> Result<rayon::ThreadPool, Stop> {
    if threads == 0 {
        return Err(Stop::Input("--threads must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Stop::Internal(e.to_string()))
}

/// Runs the command line `args` (program name first).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match cli.command {
        Command::Count { problem } => count(problem, out),
        Command::Verify(a) => verify(a, out),
        Command::Selftest { seed } => selftest(seed, out),
        Command::Bench(a) => bench(a, out),
    };
    match result {
        Ok(()) => 0,
        Err(stop) => {
            let _ = writeln!(err, "error: {}", stop.message());
            stop.code()
        }
    }
}

fn count(problem: CountProblem, out: &mut dyn Write) -> Result<(), Stop> {
    let (common, terminals, is_steiner) = match &problem {
        CountProblem::Steiner { common, terminals } => (common, Some(terminals.as_path()), true),
        CountProblem::Hamiltonian { common } => (common, None, false),
    };
    let inst = load(&common.graph, &common.td, terminals)?;
    let nd = nice(&inst)?;
    let mode = Mode::from(common.join);
    let text = pool(common.threads)?.install(|| match common.modulus {
        None => count_in(&Integers, &inst, &nd, mode, is_steiner, common.json),
        Some(p) => {
            let ring = ModP::new(p).map_err(|e| Stop::Input(format!("--mod {p}: {e}")))?;
            count_in(&ring, &inst, &nd, mode, is_steiner, common.json)
        }
    })?;
    write!(out, "{text}").map_err(|e| Stop::Internal(e.to_string()))
}

fn count_in<R: Ring>(
    ring: &R,
    inst: &Instance,
    nd: &NiceDecomposition,
    mode: Mode,
    steiner: bool,
    json: bool,
) -> Result<String, Stop> {
    if steiner {
        let counts = count_steiner_traced(ring, &inst.graph, &inst.terminals, nd, mode, &mut |_, _| {})?;
        let nonzero: Vec<(usize, BigInt)> = counts
            .iter()
            .enumerate()
            .filter(|(_, c)| !ring.is_zero(c))
            .map(|(i, c)| (i, ring.to_bigint(c)))
            .collect();
        Ok(if json {
            let sizes: serde_json::Map<String, serde_json::Value> =
                nonzero.into_iter().map(|(i, c)| (i.to_string(), c.to_string().into())).collect();
            format!("{}\n", serde_json::json!({ "sizes": sizes }))
        } else {
            nonzero.into_iter().map(|(i, c)| format!("{i} {c}\n")).collect()
        })
    } else {
        let c = ring.to_bigint(&count_hamiltonian_traced(ring, &inst.graph, nd, mode, &mut |_, _| {})?);
        Ok(if json { format!("{}\n", serde_json::json!({ "cycles": c.to_string() })) } else { format!("{c}\n") })
    }
}

/// First state (in key order) where the DP table and the definition differ.
fn first_difference<K: Ord + Hash + Clone + std::fmt::Debug>(
    got: &HashMap<K, BigInt>,
    want: &HashMap<K, BigInt>,
) -> Option<String> {
    let keys: BTreeSet<&K> = got.keys().chain(want.keys()).collect();
    let zero = BigInt::from(0);
    keys.into_iter().find_map(|k| {
        let (a, b) = (got.get(k).unwrap_or(&zero), want.get(k).unwrap_or(&zero));
        (a != b).then(|| format!("state {k:?}: table has {a}, definition gives {b}"))
    })
}

struct NodeCheck<'a> {
    enabled: bool,
    corrupt: Option<usize>,
    nd: &'a NiceDecomposition,
    failure: Option<String>,
    checked: usize,
}

impl NodeCheck<'_> {
    fn visit<K, D, E>(&mut self, id: usize, label: &str, entries: HashMap<K, BigInt>, definition: D)
    where
        K: Ord + Hash + Clone + std::fmt::Debug,
        D: FnOnce() -> Result<HashMap<K, i128>, E>,
    {
        if !self.enabled || self.failure.is_some() {
            return;
        }
        // scopes beyond the definition evaluator's limits are skipped
        let Ok(want) = definition() else { return };
        let want = want.into_iter().map(|(k, v)| (k, BigInt::from(v))).collect();
        self.checked += 1;
        if let Some(diff) = first_difference(&entries, &want) {
            self.failure = Some(format!("{label} join, node {id} ({:?}): {diff}", self.nd.node(id).kind));
        }
    }
}

fn bigints<R: Ring>(ring: &R, v: &[R::Elem]) -> Vec<BigInt> {
    v.iter().map(|x| ring.to_bigint(x)).collect()
}

/// Outcome of one verification trial: a summary line or a mismatch.
fn check_instance(problem: Problem, inst: &Instance, per_node: bool, corrupt: Option<usize>) -> Result<String, Stop> {
    let ring = Integers;
    let nd = nice(inst)?;
    if let Some(id) = corrupt {
        if id >= nd.len() {
            return Err(Stop::Input(format!("node {id} does not exist (decomposition has {} nodes)", nd.len())));
        }
    }
    let g = &inst.graph;
    let mut results = Vec::new();
    let mut checked = 0;
    for (mode, label) in [(Mode::Fast, "fast"), (Mode::Naive, "naive")] {
        let corrupt = if mode == Mode::Fast { corrupt } else { None };
        let mut nc = NodeCheck { enabled: per_node || corrupt.is_some(), corrupt, nd: &nd, failure: None, checked: 0 };
        let counts = match problem {
            Problem::Steiner => {
                let c = count_steiner_traced(&ring, g, &inst.terminals, &nd, mode, &mut |id, t: &mut SteinerTable<_>| {
                    if nc.corrupt == Some(id) {
                        t.corrupt(&ring);
                    }
                    nc.visit(id, label, t.entries(&ring), || {
                        steiner_state_definition(g, &inst.terminals, &nd, id, MapReading::Bijection)
                    });
                })?;
                bigints(&ring, &c)
            }
            Problem::Hamiltonian => {
                let c = count_hamiltonian_traced(&ring, g, &nd, mode, &mut |id, t: &mut HamTable<_>| {
                    if nc.corrupt == Some(id) {
                        t.corrupt(&ring);
                    }
                    nc.visit(id, label, t.entries(&ring), || {
                        hamiltonian_state_definition(g, &nd, id, MapReading::Bijection)
                    });
                })?;
                vec![ring.to_bigint(&c)]
            }
        };
        if let Some(f) = nc.failure {
            return Err(Stop::Mismatch(f));
        }
        checked += nc.checked;
        results.push(counts);
    }
    if results[0] != results[1] {
        return Err(Stop::Mismatch(format!("fast join gives {:?}, naive join gives {:?}", results[0], results[1])));
    }
    let brute = match problem {
        Problem::Steiner => brute_count_steiner(g, &inst.terminals)
            .map(|v| v.into_iter().map(BigInt::from).collect())
            .or_else(|_| kirchhoff_count_steiner(g, &inst.terminals)),
        Problem::Hamiltonian => brute_count_hamiltonian(g).map(|c| vec![BigInt::from(c)]),
    };
    let brute_note = match brute {
        Ok(b) if b != results[0] => {
            return Err(Stop::Mismatch(format!("joins give {:?}, brute force gives {b:?}", results[0])));
        }
        Ok(_) => "brute force agrees",
        Err(_) => "too large for brute force",
    };
    let mut line = format!("{} vertices, width {}: joins agree, {brute_note}", g.n(), nd.width());
    if per_node {
        line += &format!(", {checked} node tables match");
    }
    Ok(line)
}

fn verify(a: VerifyArgs, out: &mut dyn Write) -> Result<(), Stop> {
    let instances: Vec<(String, Instance)> = match (&a.graph, a.random) {
        (Some(graph), None) => {
            let td = a.td.as_ref().ok_or_else(|| Stop::Input("--graph needs --td".into()))?;
            if a.problem == Problem::Steiner && a.terminals.is_none() {
                return Err(Stop::Input("steiner verification needs --terminals".into()));
            }
            vec![("instance".into(), load(graph, td, a.terminals.as_deref())?)]
        }
        (None, Some((n, tw, seed))) => {
            if a.problem == Problem::Hamiltonian && n < 3 {
                return Err(Stop::Input("hamiltonian instances need at least 3 vertices".into()));
            }
            if n == 0 {
                return Err(Stop::Input("random instances need at least 1 vertex".into()));
            }
            (0..a.trials as u64)
                .map(|t| {
                    let r = random_partial_ktree(n, tw, seed + t);
                    (format!("trial {t}"), Instance { graph: r.graph, td: r.td, terminals: r.terminals })
                })
                .collect()
        }
        _ => return Err(Stop::Input("give either --graph/--td or --random n,tw,seed".into())),
    };
    let reports: Vec<Result<String, Stop>> = pool(a.threads)?.install(|| {
        instances
            .par_iter()
            .map(|(_, inst)| check_instance(a.problem, inst, a.per_node, a.corrupt_node))
            .collect()
    });
    let w = |out: &mut dyn Write, s: String| writeln!(out, "{s}").map_err(|e| Stop::Internal(e.to_string()));
    for ((name, _), r) in instances.iter().zip(reports) {
        match r {
            Ok(line) => w(out, format!("{name}: {line}"))?,
            Err(Stop::Mismatch(m)) => return Err(Stop::Mismatch(format!("{name}: {m}"))),
            Err(e) => return Err(e),
        }
    }
    w(out, format!("ok: {} instance(s) verified", instances.len()))
}

fn selftest(seed: u64, out: &mut dyn Write) -> Result<(), Stop> {
    let mut failed = None;
    for (name, suite) in checks::SUITES {
        let line = match suite(seed) {
            Ok(r) => format!("{name}: ok ({} cases)", r.cases),
            Err(f) => {
                failed.get_or_insert(f.to_string());
                format!("{name}: FAILED")
            }
        };
        writeln!(out, "{line}").map_err(|e| Stop::Internal(e.to_string()))?;
    }
    match failed {
        Some(f) => Err(Stop::Mismatch(f)),
        None => Ok(()),
    }
}

/// Best-of-`reps` wall time in nanoseconds of one naive and one fast join
/// of random tables on a bag of `bag` vertices (the distinguished vertex
/// at position 0).
pub fn time_join(problem: Problem, bag: usize, reps: usize, seed: u64) -> Result<(u128, u128), CountError> {
    if bag > MAX_BAG {
        return Err(CountError::Capacity { bag, cap: MAX_BAG });
    }
    let ring = Integers;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let best = |f: &mut dyn FnMut() -> Result<(), CountError>| -> Result<u128, CountError> {
        let mut best = u128::MAX;
        for _ in 0..reps.max(1) {
            let t = Instant::now();
            f()?;
            best = best.min(t.elapsed().as_nanos());
        }
        Ok(best)
    };
    let v1 = (bag > 0).then_some(0);
    match problem {
        Problem::Steiner => {
            let g = named::complete(bag.max(1));
            let dp = SteinerDp::new(&ring, &g, &[1], Mode::Fast)?;
            let y = SteinerTable::random(&ring, bag, v1, bag..=2 * bag, &mut rng);
            let z = SteinerTable::random(&ring, bag, v1, bag..=2 * bag, &mut rng);
            let naive = best(&mut || {
                dp.join_naive(v1, &y, &z);
                Ok(())
            })?;
            let fast = best(&mut || dp.join_fast(v1, &y, &z).map(drop))?;
            Ok((naive, fast))
        }
        Problem::Hamiltonian => {
            let g = named::path(3);
            let dp = HamiltonianDp::new(&ring, &g, Mode::Fast);
            let lay = Layout::new(bag, v1);
            let y = HamTable::random(&ring, lay.clone(), &mut rng);
            let z = HamTable::random(&ring, lay, &mut rng);
            let naive = best(&mut || {
                dp.join_naive(&y, &z);
                Ok(())
            })?;
            let fast = best(&mut || dp.join_fast(&y, &z).map(drop))?;
            Ok((naive, fast))
        }
    }
}

fn bench(a: BenchArgs, out: &mut dyn Write) -> Result<(), Stop> {
    let (naive, fast) = time_join(a.problem, a.bag, a.reps, a.seed)?;
    write!(out, "bag,naive_ns,fast_ns\n{},{naive},{fast}\n", a.bag).map_err(|e| Stop::Internal(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_str(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("twcount").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn random_spec_parses() {
        assert_eq!(parse_random("8,3,42"), Ok((8, 3, 42)));
        assert!(parse_random("8,3").is_err());
        assert!(parse_random("a,3,1").is_err());
    }

    #[test]
    fn random_verification_passes() {
        let (code, out, err) = run_str(&["verify", "--problem", "hamiltonian", "--random", "7,3,5", "--trials", "3"]);
        assert_eq!(code, 0, "{err}");
        assert!(out.ends_with("ok: 3 instance(s) verified\n"), "{out}");
    }

    #[test]
    fn corrupted_node_is_reported() {
        let (code, _, err) = run_str(&[
            "verify", "--problem", "steiner", "--random", "6,2,3", "--corrupt-node", "2",
        ]);
        assert_eq!(code, 1);
        assert!(err.contains("node 2"), "{err}");
    }

    #[test]
    fn bench_guards_capacity() {
        let (code, _, err) = run_str(&["bench", "--bag", "99"]);
        assert_eq!(code, 3);
        assert!(err.contains("capacity"), "{err}");
        let (code, out, _) = run_str(&["bench", "--bag", "3", "--problem", "hamiltonian", "--reps", "1"]);
        assert_eq!(code, 0);
        assert!(out.starts_with("bag,naive_ns,fast_ns\n3,"), "{out}");
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run_str(&["count", "steiner", "--graph", "a", "--td", "b"]).0, 2);
        assert_eq!(run_str(&["verify", "--problem", "steiner"]).0, 2);
        assert_eq!(run_str(&["nope"]).0, 2);
    }
}
