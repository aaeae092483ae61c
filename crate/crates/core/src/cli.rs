//! The `rbss` command line: argument parsing and dispatch to the library.
//!
//! Exit codes: 0 on success, 1 when the computation itself fails (no
//! output, refuted check, unknown Σ truth), 2 on usage or input errors.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::hf::{self, Assignment, Formula, HfSet, SearchBudget, SigmaOutcome};
use crate::machine::{self, Machine, RInfinity, RunResult};
use crate::real_param::{self, ArithOp, CheckVerdict, Enclosure};
use crate::scalar::parse_list;
use crate::translate::{graph_formula, input_var, scalar_code};
use crate::Scalar;

#[derive(Parser, Debug)]
#[command(name = "rbss", version, about = "Exact BSS machines, HF sets over the reals, certified ln/exp")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a machine and print its output.
    Run(MachineArgs),
    /// Print every configuration of a run.
    Trace(MachineArgs),
    /// Enumerate the computation paths up to a depth.
    Paths(PathsArgs),
    /// Print the Σ-definition of a machine's graph (and cograph with --total).
    CompileSigma(CompileArgs),
    /// Evaluate a formula file; Δ₀ exactly, Σ by budgeted witness search.
    Eval(EvalArgs),
    /// Print the tree code of a vector given by --input (coordinates 0, 1, ...).
    Encode(EncodeArgs),
    /// Read a tree code (argument or file) back as a vector.
    Decode(DecodeArgs),
    /// Riemann-sum enclosure of ln x (with --n) or a certified one (with --eps).
    Ln(LnArgs),
    /// Certified enclosure of e^x.
    Exp(ExpArgs),
    /// Stage-wise check of x = y, x + y = z or x * y = z on decimal expansions.
    Check(CheckArgs),
}

#[derive(Args, Debug)]
pub struct MachineArgs {
    pub file: PathBuf,
    /// Comma separated rationals.
    #[arg(long, allow_hyphen_values = true, default_value = "")]
    pub input: String,
    #[arg(long, default_value_t = 10_000)]
    pub fuel: usize,
    #[arg(long)]
    pub json: bool,
    /// Show values as decimals truncated to this many places.
    #[arg(long)]
    pub decimal: Option<u32>,
}

#[derive(Args, Debug)]
pub struct PathsArgs {
    pub file: PathBuf,
    #[arg(long, default_value_t = 16)]
    pub depth: usize,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct CompileArgs {
    pub file: PathBuf,
    /// The machine halts on every input; also emit the cograph.
    #[arg(long)]
    pub total: bool,
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    pub file: PathBuf,
    /// Binds x1, x2, ... to the scalar codes of these rationals.
    #[arg(long, allow_hyphen_values = true)]
    pub input: Option<String>,
    /// Candidate witnesses tried per unbounded existential.
    #[arg(long)]
    pub budget: Option<usize>,
    /// Atoms used to build candidate witnesses.
    #[arg(long, allow_hyphen_values = true)]
    pub pool: Option<String>,
    /// Largest coordinate (and set rank) of generated candidates.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Shuffle the atom pool with this seed before the search.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct EncodeArgs {
    #[arg(long, allow_hyphen_values = true, default_value = "")]
    pub input: String,
    #[arg(long)]
    pub json: bool,
}

#[derive(Args, Debug)]
pub struct DecodeArgs {
    /// An HF set in text form, or a file holding one.
    pub code: String,
    #[arg(long)]
    pub decimal: Option<u32>,
}

#[derive(Args, Debug)]
pub struct LnArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    #[arg(long, conflicts_with = "eps")]
    pub n: Option<u64>,
    #[arg(long)]
    pub eps: Option<String>,
    #[arg(long)]
    pub decimal: Option<u32>,
}

#[derive(Args, Debug)]
pub struct ExpArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub x: String,
    #[arg(long, default_value = "1/1000000")]
    pub eps: String,
    #[arg(long)]
    pub decimal: Option<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Relation {
    Eq,
    Add,
    Mul,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    pub relation: Relation,
    /// `x, y` (and `z`) as rationals. Without it, --budget random true
    /// instances drawn with --seed are checked instead.
    #[arg(long, allow_hyphen_values = true)]
    pub input: Option<String>,
    #[arg(long, default_value_t = 20)]
    pub n: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub budget: usize,
}

/// What a command printed and how it ended.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { code: 0, stdout, stderr: String::new() }
    }

    fn fail(stdout: String, stderr: impl Into<String>) -> Self {
        Outcome { code: 1, stdout, stderr: stderr.into() }
    }

    fn usage(stderr: impl Into<String>) -> Self {
        Outcome { code: 2, stdout: String::new(), stderr: stderr.into() }
    }
}

/// Parses `argv` (program name first) and runs the command.
pub fn dispatch<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(argv) {
        Ok(cli) => execute(cli.command),
        Err(e) => {
            let text = e.render().to_string();
            match e.exit_code() {
                0 => Outcome::ok(text),
                _ => Outcome::usage(text),
            }
        }
    }
}

pub fn execute(cmd: Command) -> Outcome {
    let result = match cmd {
        Command::Run(a) => run_cmd(&a),
        Command::Trace(a) => trace_cmd(&a),
        Command::Paths(a) => paths_cmd(&a),
        Command::CompileSigma(a) => compile_cmd(&a),
        Command::Eval(a) => eval_cmd(&a),
        Command::Encode(a) => encode_cmd(&a),
        Command::Decode(a) => decode_cmd(&a),
        Command::Ln(a) => ln_cmd(&a),
        Command::Exp(a) => exp_cmd(&a),
        Command::Check(a) => check_cmd(&a),
    };
    result.unwrap_or_else(Outcome::usage)
}

type CmdResult = Result<Outcome, String>;

fn read_file(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn load_machine(path: &Path) -> Result<Machine, String> {
    machine::parse_machine(&read_file(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn scalars(s: &str) -> Result<Vec<Scalar>, String> {
    parse_list(s).map_err(|e| e.to_string())
}

fn scalar(s: &str) -> Result<Scalar, String> {
    s.parse::<Scalar>().map_err(|e| e.to_string())
}

fn show(x: &Scalar, decimal: Option<u32>) -> String {
    match decimal {
        Some(k) => x.to_decimal(k),
        None => x.to_string(),
    }
}

fn show_list(v: &[Scalar], decimal: Option<u32>) -> String {
    v.iter().map(|x| show(x, decimal)).collect::<Vec<_>>().join(", ")
}

fn describe_failure(r: &RunResult) -> String {
    match r {
        RunResult::Undefined(reason) => format!("undefined: {}", reason.tag()),
        RunResult::Diverged(fuel) => format!("diverged: no output within {fuel} steps"),
        RunResult::Output(_) => unreachable!("not a failure"),
    }
}

fn run_cmd(a: &MachineArgs) -> CmdResult {
    let m = load_machine(&a.file)?;
    let input = scalars(&a.input)?;
    let r = machine::run(&m, &input, a.fuel);
    let text = if a.json { format!("{}\n", r.to_json()) } else { String::new() };
    Ok(match r.output() {
        Some(_) if a.json => Outcome::ok(text),
        Some(v) => Outcome::ok(format!("{}\n", show_list(v, a.decimal))),
        None => Outcome::fail(text, describe_failure(&r)),
    })
}

fn trace_cmd(a: &MachineArgs) -> CmdResult {
    let m = load_machine(&a.file)?;
    let input = scalars(&a.input)?;
    let t = machine::trace(&m, &input, a.fuel);
    let out = if a.json {
        format!("{}\n", serde_json::to_string_pretty(&t.to_json()).expect("json"))
    } else {
        let mut s = String::new();
        for (i, c) in t.steps.iter().enumerate() {
            let state: Vec<String> =
                c.state.entries().iter().map(|(k, x)| format!("{k}: {}", show(x, a.decimal))).collect();
            s.push_str(&format!("{i:>4}  {:<12} {{{}}}\n", c.node, state.join(", ")));
        }
        match t.result.output() {
            Some(v) => s.push_str(&format!("output {}\n", show_list(v, a.decimal))),
            None => s.push_str(&format!("{}\n", describe_failure(&t.result))),
        }
        s
    };
    Ok(match t.result {
        RunResult::Output(_) => Outcome::ok(out),
        ref r => Outcome::fail(out, describe_failure(r)),
    })
}

fn paths_cmd(a: &PathsArgs) -> CmdResult {
    let m = load_machine(&a.file)?;
    let paths = machine::enumerate_paths(&m, m.arity(), a.depth);
    if a.json {
        let doc = json!({
            "machine": m.name(),
            "arity": m.arity(),
            "depth": a.depth,
            "paths": paths.iter().map(|p| p.to_json()).collect::<Vec<_>>(),
        });
        return Ok(Outcome::ok(format!("{}\n", serde_json::to_string_pretty(&doc).expect("json"))));
    }
    let mut s = String::new();
    for (i, p) in paths.iter().enumerate() {
        s.push_str(&format!("path {i}: {}\n", p.nodes.join(" -> ")));
        for c in &p.conditions {
            let rel = match c.sign {
                machine::Sign::NonNeg => ">= 0",
                machine::Sign::Neg => "< 0",
                machine::Sign::NonZero => "!= 0",
            };
            s.push_str(&format!("  if {} {rel}  [{}]\n", c.function, c.node));
        }
        let outs: Vec<String> = p.outputs.iter().map(|o| o.to_string()).collect();
        s.push_str(&format!("  output [{}]\n", outs.join(", ")));
    }
    s.push_str(&format!("{} paths\n", paths.len()));
    Ok(Outcome::ok(s))
}

fn compile_cmd(a: &CompileArgs) -> CmdResult {
    let m = load_machine(&a.file)?;
    Ok(Outcome::ok(graph_formula(&m, a.total).to_text()))
}

/// A formula file: `;` comments, `let NAME = SET` bindings, and the
/// formula itself, which may span several lines.
pub fn parse_formula_file(text: &str) -> Result<(Assignment, Formula), String> {
    let mut env = Assignment::new();
    let mut body = String::new();
    for line in text.lines() {
        let l = line.trim();
        if l.is_empty() || l.starts_with(';') {
            continue;
        }
        if let Some(rest) = l.strip_prefix("let ") {
            let (name, value) = rest.split_once('=').ok_or_else(|| format!("bad binding `{l}`"))?;
            let set: HfSet = value.trim().parse().map_err(|e: hf::HfError| e.to_string())?;
            env.insert(name.trim().to_string(), set);
        } else {
            body.push_str(l);
            body.push(' ');
        }
    }
    let f = body.trim().parse::<Formula>().map_err(|e| e.to_string())?;
    Ok((env, f))
}

fn eval_cmd(a: &EvalArgs) -> CmdResult {
    let (mut env, f) = parse_formula_file(&read_file(&a.file)?)?;
    if let Some(input) = &a.input {
        for (i, x) in scalars(input)?.iter().enumerate() {
            env.insert(input_var(i + 1), scalar_code(x));
        }
    }
    let mut budget = SearchBudget::default();
    if let Some(pool) = &a.pool {
        budget.atom_pool = scalars(pool)?;
    }
    if let Some(seed) = a.seed {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in (1..budget.atom_pool.len()).rev() {
            budget.atom_pool.swap(i, rng.gen_range(0..=i));
        }
    }
    if let Some(n) = a.budget {
        budget.max_witnesses = n;
    }
    if let Some(d) = a.depth {
        budget.max_rank = d;
    }
    if let Some(v) = f.free_vars().into_iter().find(|v| !env.contains_key(v)) {
        return Err(format!("free variable `{v}` has no binding"));
    }
    let outcome = if f.is_delta0() {
        if !hf::eval_delta0(&f, &env).map_err(|e| e.to_string())? {
            let s = if a.json { format!("{}\n", json!({"result": "false"})) } else { "false\n".into() };
            return Ok(Outcome::fail(s, ""));
        }
        SigmaOutcome::True(hf::Certificate { bindings: Vec::new(), matrix: f.clone() })
    } else if f.is_sigma() {
        hf::eval_sigma(&f, &env, &budget).map_err(|e| e.to_string())?
    } else {
        return Err("formula is neither Δ₀ nor Σ".into());
    };
    Ok(match outcome {
        SigmaOutcome::True(cert) => {
            if a.json {
                let w: serde_json::Map<String, serde_json::Value> =
                    cert.bindings.iter().map(|(k, v)| (k.clone(), json!(v.to_string()))).collect();
                Outcome::ok(format!("{}\n", json!({"result": "true", "witnesses": w})))
            } else {
                let mut s = String::from("true\n");
                for (k, v) in &cert.bindings {
                    s.push_str(&format!("  {k} = {v}\n"));
                }
                Outcome::ok(s)
            }
        }
        SigmaOutcome::Unknown => {
            let s = if a.json { format!("{}\n", json!({"result": "unknown"})) } else { "unknown\n".into() };
            Outcome::fail(s, "no witness within the budget")
        }
    })
}

fn encode_cmd(a: &EncodeArgs) -> CmdResult {
    let v = scalars(&a.input)?;
    let r = RInfinity::from_pairs(v.iter().enumerate().map(|(i, x)| (i as i64, x.clone())));
    let code = hf::encode(&r).map_err(|e| e.to_string())?;
    Ok(Outcome::ok(if a.json {
        format!("{}\n", json!({"tree": code.to_string(), "flat": hf::encode_seq(&r).to_string()}))
    } else {
        format!("{code}\n")
    }))
}

fn decode_cmd(a: &DecodeArgs) -> CmdResult {
    let text = if Path::new(&a.code).is_file() { read_file(Path::new(&a.code))? } else { a.code.clone() };
    let set: HfSet = text.trim().parse().map_err(|e: hf::HfError| e.to_string())?;
    Ok(match hf::decode(&set) {
        Some(v) => {
            let entries: Vec<String> =
                v.entries().iter().map(|(i, x)| format!("{i}: {}", show(x, a.decimal))).collect();
            Outcome::ok(format!("{{{}}}\n", entries.join(", ")))
        }
        None => Outcome::fail(String::new(), "not the tree code of a vector"),
    })
}

fn show_enclosure(e: &Enclosure, decimal: Option<u32>) -> String {
    match decimal {
        Some(k) => e.to_decimal(k),
        None => e.to_string(),
    }
}

fn ln_cmd(a: &LnArgs) -> CmdResult {
    let x = scalar(&a.x)?;
    let e = match (&a.n, &a.eps) {
        (Some(n), _) => real_param::ln_bounds(&x, *n),
        (None, Some(eps)) => real_param::ln_cert(&x, &scalar(eps)?),
        (None, None) => return Err("give --n for Riemann bounds or --eps for a certified enclosure".into()),
    }
    .map_err(|e| e.to_string())?;
    Ok(Outcome::ok(format!("{}\n", show_enclosure(&e, a.decimal))))
}

fn exp_cmd(a: &ExpArgs) -> CmdResult {
    let e = real_param::exp_cert(&scalar(&a.x)?, &scalar(&a.eps)?).map_err(|e| e.to_string())?;
    Ok(Outcome::ok(format!("{}\n", show_enclosure(&e, a.decimal))))
}

fn verdict(rel: Relation, v: &[Scalar], n: u32) -> CheckVerdict {
    let s: Vec<_> = v.iter().map(real_param::xi).collect();
    match rel {
        Relation::Eq => real_param::eq_check(&s[0], &s[1], n),
        Relation::Add => real_param::arith_check(ArithOp::Add, &s[0], &s[1], &s[2], n),
        Relation::Mul => real_param::arith_check(ArithOp::Mul, &s[0], &s[1], &s[2], n),
    }
}

fn check_cmd(a: &CheckArgs) -> CmdResult {
    let want = if a.relation == Relation::Eq { 2 } else { 3 };
    if let Some(input) = &a.input {
        let v = scalars(input)?;
        if v.len() != want {
            return Err(format!("expected {want} values, got {}", v.len()));
        }
        let r = verdict(a.relation, &v, a.n);
        let line = format!("{r}\n");
        return Ok(if r.is_refuted() { Outcome::fail(line, "") } else { Outcome::ok(line) });
    }
    // Self-test on random true instances.
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut s = String::new();
    let mut bad = 0;
    for _ in 0..a.budget {
        let mut draw = || Scalar::new(rng.gen_range(-10_000..=10_000), rng.gen_range(1..=1000));
        let (x, y) = (draw(), draw());
        let v = match a.relation {
            Relation::Eq => vec![x.clone(), x],
            Relation::Add => vec![x.clone(), y.clone(), &x + &y],
            Relation::Mul => vec![x.clone(), y.clone(), &x * &y],
        };
        let r = verdict(a.relation, &v, a.n);
        if r.is_refuted() {
            bad += 1;
            s.push_str(&format!("{r} on {}\n", show_list(&v, None)));
        }
    }
    s.push_str(&format!("{} true instances, {bad} refuted through stage {}\n", a.budget, a.n));
    Ok(if bad > 0 { Outcome::fail(s, "") } else { Outcome::ok(s) })
}
