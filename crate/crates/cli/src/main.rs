//! `subset-kex`: parameters, protocol simulation, grammar tooling, attacks.
//!
//! Exit codes: 0 success, 2 invalid input, 3 key mismatch or a broken
//! internal invariant. Every random choice is derived from `--seed`.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use subset_kex::attack::{derivation_descent, rst_greedy, AttackInstance, ResidualDistance};
use subset_kex::cnf::cfg_membership;
use subset_kex::experiment::{default_grid, random_element, run_experiments, ExperimentConfig};
use subset_kex::par::Execution;
use subset_kex::protocol::{orbit_dh, p1_keys, p1_round, p2_exchange, p2_party_setup, SpotCheck, ORBIT_DH_BOUND};
use subset_kex::seed::derive_seed;
use subset_kex::subset::orbit_grammar;
use subset_kex::wire::{self, AttackResultJson, GrammarJson, MatrixJson, ParamsJson};
use subset_kex::{BitLength, CFGrammar, Error, GroupParams, GroupWord, IntVector, OrbitRange, SamplePolicy};

#[derive(Parser, Debug)]
#[command(name = "subset-kex", version, about = "Subset key exchange over ascending HNN-extensions of Z^m")]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Opts {
    /// Master seed; every component derives its own stream from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Matrix or instance JSON.
    #[arg(long, global = true)]
    params: Option<PathBuf>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Maximum sampled word length.
    #[arg(long, global = true)]
    max_len: Option<usize>,
    /// Beam width for derivation descent.
    #[arg(long, global = true)]
    beam: Option<usize>,
    /// Conjugation window for generators / lattice membership.
    #[arg(long, global = true)]
    window: Option<u64>,
    /// Word as a JSON array of tokens.
    #[arg(long, global = true)]
    word: Option<String>,
    /// Grammar JSON (file path or inline document).
    #[arg(long, global = true)]
    grammar: Option<String>,
    #[arg(long, global = true, value_enum)]
    range: Option<RangeArg>,
    /// Per-trial JSON on stderr for sweeps.
    #[arg(long, short, global = true)]
    verbose: bool,
    /// Include wall-clock timings (makes output irreproducible).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum RangeArg {
    Naturals,
    Integers,
}

impl From<RangeArg> for OrbitRange {
    fn from(r: RangeArg) -> Self {
        match r {
            RangeArg::Naturals => OrbitRange::Naturals,
            RangeArg::Integers => OrbitRange::Integers,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Group parameters.
    Params {
        #[command(subcommand)]
        action: ParamsCmd,
    },
    /// Protocol instances (public parameters).
    Instance {
        protocol: Proto,
        #[command(subcommand)]
        action: GenCmd,
    },
    /// Key-exchange simulation.
    Kex {
        protocol: KexProto,
        #[command(subcommand)]
        action: SimulateCmd,
    },
    Grammar {
        #[command(subcommand)]
        action: GrammarCmd,
    },
    Attack {
        #[command(subcommand)]
        action: AttackCmd,
    },
    Selftest {
        #[command(subcommand)]
        action: SelftestCmd,
    },
}

#[derive(Subcommand, Debug)]
enum ParamsCmd {
    /// Random nonsingular matrix.
    Gen {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Entries are drawn from -bound..=bound.
        #[arg(long, default_value_t = 3)]
        bound: i64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Proto {
    P1,
    P2,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KexProto {
    P1,
    P2,
    OrbitDh,
}

#[derive(Subcommand, Debug)]
enum GenCmd {
    Gen,
}

#[derive(Subcommand, Debug)]
enum SimulateCmd {
    Simulate {
        /// Upper end of the random orbit-DH exponents.
        #[arg(long, default_value_t = 64)]
        max_exp: u64,
    },
}

#[derive(Subcommand, Debug)]
enum GrammarCmd {
    /// Sample words (one JSON array per line).
    Sample,
    /// Print `true` or `false`.
    Member,
    /// Grammar of the subgroup generated by the language.
    Closure,
    /// Orbit grammar of `--word`.
    Orbit,
}

#[derive(Subcommand, Debug)]
enum AttackCmd {
    Rst,
    Descent,
    /// CSV over the default grid.
    Sweep,
}

#[derive(Subcommand, Debug)]
enum SelftestCmd {
    /// Normal-form products against the rational model.
    Oracle,
}

enum Failure {
    Invalid(String),
    Invariant(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_invariant_failure() {
            Failure::Invariant(e.to_string())
        } else {
            Failure::Invalid(e.to_string())
        }
    }
}

type Res<T> = std::result::Result<T, Failure>;

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Invalid(msg.into())
}

fn read_doc(arg: &str) -> Res<String> {
    if arg.trim_start().starts_with('{') || arg.trim_start().starts_with('[') {
        Ok(arg.to_string())
    } else {
        fs::read_to_string(arg).map_err(|e| invalid(format!("{arg}: {e}")))
    }
}

/// Instance JSON, or a bare matrix document lifted to one.
fn load_params(opts: &Opts) -> Res<Option<ParamsJson>> {
    let Some(path) = &opts.params else { return Ok(None) };
    let text = fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    let doc = match wire::from_json::<ParamsJson>(&text) {
        Ok(p) => p,
        Err(_) => ParamsJson::bare(&wire::from_json::<MatrixJson>(&text)?.to_params()?)?,
    };
    doc.group()?;
    Ok(Some(doc))
}

fn default_params() -> GroupParams {
    GroupParams::from_i64s(&[vec![2, 1], vec![0, 3]]).expect("det 6")
}

fn load_grammar(opts: &Opts) -> Res<CFGrammar> {
    let arg = opts.grammar.as_deref().ok_or_else(|| invalid("--grammar is required"))?;
    Ok(wire::from_json::<GrammarJson>(&read_doc(arg)?)?.to_grammar()?)
}

fn load_word(opts: &Opts) -> Res<GroupWord> {
    let arg = opts.word.as_deref().ok_or_else(|| invalid("--word is required"))?;
    let toks: Vec<String> = wire::from_json(&read_doc(arg)?)?;
    Ok(wire::word_from_json(&toks)?)
}

fn emit(opts: &Opts, text: &str) -> Res<()> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match &opts.out {
        Some(p) => fs::write(p, text).map_err(|e| invalid(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn policy(opts: &Opts) -> SamplePolicy {
    SamplePolicy { max_length: opts.max_len.unwrap_or(32), depth_cap: 4, terminal_bias: 0.8, seed: 0 }
}

fn random_nonzero(params: &GroupParams, seed: u64, label: &str) -> IntVector {
    let mut rng = SamplePolicy::default().with_seed(derive_seed(seed, label)).rng();
    loop {
        let v = IntVector::from_i64s(&(0..params.dim()).map(|_| rng.gen_range(-2..=2)).collect::<Vec<_>>());
        if !v.is_zero() {
            return v;
        }
    }
}

/// Fills whatever the instance document leaves open from the seed.
fn complete_instance(opts: &Opts, doc: Option<ParamsJson>) -> Res<ParamsJson> {
    let mut doc = match doc {
        Some(d) => d,
        None => ParamsJson::bare(&default_params())?,
    };
    let params = doc.group()?;
    if doc.u.is_none() {
        doc.u = Some(wire::vector_to_json(&random_nonzero(&params, opts.seed, "u")));
    }
    if doc.v.is_none() {
        doc.v = Some(wire::vector_to_json(&random_nonzero(&params, opts.seed, "v")));
    }
    if doc.w.is_none() {
        let mut rng = SamplePolicy::default().with_seed(derive_seed(opts.seed, "w")).rng();
        doc.w = Some(wire::ElementJson::from_element(&random_element(&params, 6, &mut rng)));
    }
    if let Some(r) = opts.range {
        doc.range = Some(OrbitRange::from(r).to_string());
    } else if doc.range.is_none() {
        doc.range = Some(OrbitRange::default().to_string());
    }
    Ok(doc)
}

fn seeds(opts: &Opts, labels: &[&str]) -> BTreeMap<String, u64> {
    let mut m: BTreeMap<String, u64> = labels.iter().map(|l| (l.to_string(), derive_seed(opts.seed, l))).collect();
    m.insert("master".into(), opts.seed);
    m
}

fn run(cli: Cli) -> Res<()> {
    let opts = &cli.opts;
    match cli.command {
        Command::Params { action: ParamsCmd::Gen { dim, bound } } => {
            if dim == 0 || bound <= 0 {
                return Err(invalid("--dim and --bound must be positive"));
            }
            let mut rng = SamplePolicy::default().with_seed(derive_seed(opts.seed, "params")).rng();
            let params = loop {
                let rows: Vec<Vec<i64>> =
                    (0..dim).map(|_| (0..dim).map(|_| rng.gen_range(-bound..=bound)).collect()).collect();
                if let Ok(p) = GroupParams::from_i64s(&rows) {
                    break p;
                }
            };
            emit(opts, &wire::to_json(&MatrixJson::from_params(&params)?))
        }
        Command::Instance { protocol, action: GenCmd::Gen } => {
            let doc = complete_instance(opts, load_params(opts)?)?;
            let doc = match protocol {
                Proto::P1 => ParamsJson::from_p1(&doc.to_p1(&SpotCheck::default())?)?,
                Proto::P2 => ParamsJson { grammars: None, ..doc },
            };
            emit(opts, &wire::to_json(&doc))
        }
        Command::Kex { protocol, action: SimulateCmd::Simulate { max_exp } } => {
            let doc = complete_instance(opts, load_params(opts)?)?;
            let pol = policy(opts);
            let transcript = match protocol {
                KexProto::P1 => {
                    let public = doc.to_p1(&SpotCheck::default())?;
                    let s = seeds(opts, &["alice", "bob"]);
                    let round = p1_round(&public, &pol.with_seed(s["alice"]), &pol.with_seed(s["bob"]))?;
                    let keys = p1_keys(&public, &round.alice, &round.msg_b, &round.bob, &round.msg_a)?;
                    wire::p1_transcript(&public, &round, &keys, s)?
                }
                KexProto::P2 => {
                    let pub2 = doc.to_p2()?;
                    let range = doc.range()?;
                    let s = seeds(opts, &["alice", "bob", "exchange"]);
                    let alice = p2_party_setup(&pub2, &doc.vector('u')?, range, &pol.with_seed(s["alice"]), 32)?;
                    let bob = p2_party_setup(&pub2, &doc.vector('v')?, range, &pol.with_seed(s["bob"]), 32)?;
                    let ex = p2_exchange(&pub2, &alice, &bob, &pol.with_seed(s["exchange"]))?;
                    wire::p2_transcript(&pub2, &ex, s)?
                }
                KexProto::OrbitDh => {
                    let params = doc.group()?;
                    let x = match &doc.x {
                        Some(_) => doc.vector('x')?,
                        None => random_nonzero(&params, opts.seed, "x"),
                    };
                    let s = seeds(opts, &["alice", "bob"]);
                    let pick = |seed: u64| SamplePolicy::default().with_seed(seed).rng().gen_range(0..=max_exp);
                    let run = orbit_dh(&params, &x, pick(s["alice"]), pick(s["bob"]), ORBIT_DH_BOUND)?;
                    wire::orbit_dh_transcript(&params, &x, &run, s)?
                }
            };
            emit(opts, &wire::to_json(&transcript))
        }
        Command::Grammar { action } => grammar(opts, action),
        Command::Attack { action } => attack(opts, action),
        Command::Selftest { action: SelftestCmd::Oracle } => selftest(opts),
    }
}

fn grammar(opts: &Opts, action: GrammarCmd) -> Res<()> {
    match action {
        GrammarCmd::Sample => {
            let g = load_grammar(opts)?;
            if let Some(doc) = load_params(opts)? {
                subset_kex::SubsetSpec::new(g.clone(), doc.group()?)?;
            }
            let pol = policy(opts).with_seed(derive_seed(opts.seed, "grammar-sample"));
            let sampler = subset_kex::sample::Sampler::new(&g);
            let mut rng = pol.rng();
            let mut out = String::new();
            for _ in 0..opts.trials.unwrap_or(1) {
                let w = sampler.sample_with(&pol, &mut rng)?;
                out.push_str(&wire::to_json(&wire::word_to_json(&w)));
                out.push('\n');
            }
            emit(opts, &out)
        }
        GrammarCmd::Member => {
            let g = load_grammar(opts)?;
            let w = load_word(opts)?;
            emit(opts, if cfg_membership(&w, &g) { "true" } else { "false" })
        }
        GrammarCmd::Closure => {
            let g = load_grammar(opts)?;
            emit(opts, &wire::to_json(&GrammarJson::from_grammar(&g.union(&g.invert()).star())))
        }
        GrammarCmd::Orbit => {
            let w = load_word(opts)?;
            let params = match load_params(opts)? {
                Some(doc) => doc.group()?,
                None => {
                    // the grammar does not depend on M; any matrix of the right size validates the alphabet
                    let dim = w
                        .tokens()
                        .iter()
                        .filter_map(|t| match t {
                            subset_kex::Token::Gen { index, .. } => Some(index + 1),
                            _ => None,
                        })
                        .max()
                        .unwrap_or(1);
                    GroupParams::new(subset_kex::IntMatrix::identity(dim))?
                }
            };
            let range = opts.range.map(OrbitRange::from).unwrap_or_default();
            emit(opts, &wire::to_json(&GrammarJson::from_grammar(&orbit_grammar(&params, &w, range)?)))
        }
    }
}

fn attack(opts: &Opts, action: AttackCmd) -> Res<()> {
    if let AttackCmd::Sweep = action {
        let out = run_experiments(
            &default_grid(),
            opts.trials.unwrap_or(10),
            opts.seed,
            ExperimentConfig { exec: Execution::Parallel, timing: opts.timing },
        )?;
        if opts.verbose {
            for t in &out.trials {
                eprintln!("{}", wire::to_json(t));
            }
        }
        return emit(opts, &out.to_csv());
    }
    let doc = complete_instance(opts, load_params(opts)?)?;
    let public = doc.to_p1(&SpotCheck::default())?;
    let pol = policy(opts);
    let mut out = String::new();
    for t in 0..opts.trials.unwrap_or(1) {
        let s = derive_seed(opts.seed, &format!("attack/{t}"));
        let round = p1_round(&public, &pol.with_seed(derive_seed(s, "alice")), &pol.with_seed(derive_seed(s, "bob")))?;
        let result = match action {
            AttackCmd::Rst => {
                let inst = AttackInstance::with_orbit_generators(public.clone(), round.msg_a, opts.window.unwrap_or(3));
                rst_greedy(&inst, &BitLength, &ResidualDistance, 64)
            }
            _ => {
                let mut inst = AttackInstance::with_grammar(public.clone(), round.msg_a);
                inst.max_word_len = pol.max_length;
                derivation_descent(&inst, &BitLength, opts.beam.unwrap_or(4), 1_000)
            }
        };
        out.push_str(&wire::to_json(&AttackResultJson::from_result(&result, opts.timing)));
        out.push('\n');
    }
    emit(opts, &out)
}

fn selftest(opts: &Opts) -> Res<()> {
    let trials = opts.trials.unwrap_or(1000);
    let mut rng = SamplePolicy::default().with_seed(derive_seed(opts.seed, "selftest")).rng();
    let mut params = default_params();
    for i in 0..trials {
        if i % 50 == 0 {
            let m = rng.gen_range(1..=4);
            params = loop {
                let rows: Vec<Vec<i64>> = (0..m).map(|_| (0..m).map(|_| rng.gen_range(-3..=3)).collect()).collect();
                if let Ok(p) = GroupParams::from_i64s(&rows) {
                    break p;
                }
            };
        }
        let g = &params;
        let (x, y) =
            (random_element(g, rng.gen_range(0..=40), &mut rng), random_element(g, rng.gen_range(0..=40), &mut rng));
        let lhs = g.oracle_embed(&g.multiply(&x, &y));
        let rhs = g.oracle_multiply(&g.oracle_embed(&x), &g.oracle_embed(&y));
        if lhs != rhs {
            return Err(Failure::Invariant(format!("trial {i}: product of {x} and {y} disagrees with the model")));
        }
    }
    emit(opts, &format!("oracle selftest: {trials}/{trials} ok"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Invariant(msg)) => {
            eprintln!("invariant failure: {msg}");
            ExitCode::from(3)
        }
    }
}
