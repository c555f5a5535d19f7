//! Seeded attack sweeps.
//!
//! Every trial draws its instance from `derive_seed(master, "sweep/<grid>/<trial>")`,
//! so results do not depend on execution order and parallel runs reproduce
//! sequential ones exactly.

use std::fmt::Write as _;

use rand::Rng;
use serde::Serialize;

use crate::attack::{derivation_descent, rst_greedy, AttackInstance, AttackResult, ResidualDistance};
use crate::error::Result;
use crate::group::{BitLength, GroupElement, GroupParams, GroupWord, Token};
use crate::linalg::IntVector;
use crate::par::{map_indices, Execution};
use crate::protocol::{p1_round, p1_setup, PublicParams1, SpotCheck};
use crate::sample::SamplePolicy;
use crate::seed::derive_seed;
use crate::subset::OrbitRange;

pub const CSV_HEADER: &str = "grid_id,mode,trials,successes,mean_iters,mean_ms";

#[derive(Clone, Debug, PartialEq)]
pub struct GridPoint {
    pub id: String,
    pub params: GroupParams,
    pub u: IntVector,
    pub v: IntVector,
    pub range: OrbitRange,
    /// Sampling policy for the protocol round; its seed is replaced per trial.
    pub policy: SamplePolicy,
    /// Letters in the random public element `w`.
    pub w_len: usize,
    pub gens_window: u64,
    pub max_iter: u64,
    pub beam: usize,
    pub max_nodes: u64,
}

impl GridPoint {
    pub fn new(id: &str, params: GroupParams, u: IntVector, v: IntVector) -> Self {
        GridPoint {
            id: id.to_string(),
            params,
            u,
            v,
            range: OrbitRange::Integers,
            policy: SamplePolicy { max_length: 32, depth_cap: 3, terminal_bias: 0.9, seed: 0 },
            w_len: 6,
            gens_window: 3,
            max_iter: 40,
            beam: 4,
            max_nodes: 400,
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ExperimentConfig {
    pub exec: Execution,
    /// Wall-clock columns make output irreproducible, so they are opt-in.
    pub timing: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialRecord {
    pub grid_id: String,
    pub trial: usize,
    pub seed: u64,
    pub mode: &'static str,
    pub success: bool,
    pub iterations: u64,
    pub best_score: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MetricsRow {
    pub grid_id: String,
    pub mode: &'static str,
    pub trials: usize,
    pub successes: usize,
    pub mean_iters: f64,
    pub mean_ms: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExperimentOutput {
    pub rows: Vec<MetricsRow>,
    pub trials: Vec<TrialRecord>,
}

impl ExperimentOutput {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let ms = r.mean_ms.map_or_else(|| "NA".to_string(), |m| format!("{m:.3}"));
            writeln!(out, "{},{},{},{},{:.3},{}", r.grid_id, r.mode, r.trials, r.successes, r.mean_iters, ms)
                .expect("writing to a String");
        }
        out
    }
}

/// Random element spelled by `len` uniformly chosen letters.
pub fn random_element<R: Rng>(params: &GroupParams, len: usize, rng: &mut R) -> GroupElement {
    let letters = 2 * params.dim() + 2;
    let toks: Vec<Token> = (0..len)
        .map(|_| match rng.gen_range(0..letters) {
            i if i < params.dim() => Token::gen(i),
            i if i < 2 * params.dim() => Token::gen_inv(i - params.dim()),
            i if i == 2 * params.dim() => Token::T,
            _ => Token::TInv,
        })
        .collect();
    params.evaluate_word(&GroupWord::new(toks)).expect("letters fit the group")
}

/// A seeded protocol-1 transcript turned into an attack target; also
/// returns Alice's secret `a1`.
pub fn trial_instance(
    point: &GridPoint,
    base: &PublicParams1,
    seed: u64,
) -> Result<(PublicParams1, GroupElement, GroupElement)> {
    let mut rng = SamplePolicy::default().with_seed(derive_seed(seed, "w")).rng();
    let w = random_element(&point.params, point.w_len, &mut rng);
    let public = PublicParams1 { w, ..base.clone() };
    let pa = point.policy.with_seed(derive_seed(seed, "alice"));
    let pb = point.policy.with_seed(derive_seed(seed, "bob"));
    let round = p1_round(&public, &pa, &pb)?;
    Ok((public, round.msg_a, round.alice.a))
}

fn record(
    point: &GridPoint,
    trial: usize,
    seed: u64,
    mode: &'static str,
    r: &AttackResult,
    timing: bool,
) -> TrialRecord {
    TrialRecord {
        grid_id: point.id.clone(),
        trial,
        seed,
        mode,
        success: r.success,
        iterations: r.iterations,
        best_score: r.best_score,
        elapsed_ms: timing.then_some(r.elapsed.as_secs_f64() * 1e3),
    }
}

pub fn run_experiments(
    grid: &[GridPoint],
    trials: usize,
    seed: u64,
    cfg: ExperimentConfig,
) -> Result<ExperimentOutput> {
    let mut out = ExperimentOutput::default();
    if trials == 0 {
        return Ok(out);
    }
    for point in grid {
        let check =
            SpotCheck { pairs: 8, policy: point.policy.with_seed(derive_seed(seed, &format!("setup/{}", point.id))) };
        let identity = point.params.identity();
        let base = p1_setup(&point.params, &point.u, &point.v, &identity, point.range, &check)?;
        let results: Vec<Result<[TrialRecord; 2]>> = map_indices(trials, cfg.exec, |t| {
            let tseed = derive_seed(seed, &format!("sweep/{}/{}", point.id, t));
            let (public, target, _) = trial_instance(point, &base, tseed)?;
            let gen_inst = AttackInstance::with_orbit_generators(public.clone(), target.clone(), point.gens_window);
            let rst = rst_greedy(&gen_inst, &BitLength, &ResidualDistance, point.max_iter);
            let mut gram_inst = AttackInstance::with_grammar(public, target);
            gram_inst.max_word_len = point.policy.max_length;
            let descent = derivation_descent(&gram_inst, &BitLength, point.beam, point.max_nodes);
            Ok([
                record(point, t, tseed, "rst", &rst, cfg.timing),
                record(point, t, tseed, "descent", &descent, cfg.timing),
            ])
        });
        let mut per_mode: [Vec<TrialRecord>; 2] = [Vec::new(), Vec::new()];
        for r in results {
            let [a, b] = r?;
            per_mode[0].push(a);
            per_mode[1].push(b);
        }
        for recs in per_mode {
            let n = recs.len();
            let mean_iters = recs.iter().map(|r| r.iterations as f64).sum::<f64>() / n as f64;
            let mean_ms = cfg.timing.then(|| recs.iter().filter_map(|r| r.elapsed_ms).sum::<f64>() / n as f64);
            out.rows.push(MetricsRow {
                grid_id: point.id.clone(),
                mode: recs[0].mode,
                trials: n,
                successes: recs.iter().filter(|r| r.success).count(),
                mean_iters,
                mean_ms,
            });
            out.trials.extend(recs);
        }
    }
    Ok(out)
}

/// A small default grid: an abelian control, `BS(1,2)`, and a rank-2 case.
pub fn default_grid() -> Vec<GridPoint> {
    let e = |m: usize, i: usize| IntVector::unit(m, i);
    vec![
        GridPoint {
            max_iter: 64,
            ..GridPoint::new(
                "abelian-2",
                GroupParams::from_i64s(&[vec![1, 0], vec![0, 1]]).expect("identity"),
                e(2, 0),
                e(2, 1),
            )
        },
        GridPoint::new("bs12", GroupParams::baumslag_solitar(2).expect("nonzero"), e(1, 0), e(1, 0)),
        GridPoint::new("upper-2", GroupParams::from_i64s(&[vec![2, 1], vec![0, 3]]).expect("det 6"), e(2, 0), e(2, 1)),
    ]
}
