//! Length-based cryptanalysis of protocol 1.
//!
//! Given `target = a1·w·b1`, the attacks search for `a ∈ A` such that
//! `b = w^-1·a^-1·target` lies in `B`. Membership in `B` (the closure of the
//! orbit of `v`) is decided exactly by [`WindowLattice`].

use std::collections::HashMap;
use std::time::{Duration, Instant};

use crate::grammar::{CFGrammar, Symbol};
use crate::group::{GroupElement, GroupParams, GroupWord, Length, Token};
use crate::lattice::{soft_bits, MembershipVerdict, WindowLattice};
use crate::linalg::IntVector;
use crate::protocol::PublicParams1;
use crate::sample::SamplePolicy;
use crate::subset::{OrbitRange, SubsetSpec};

/// Distance assigned to candidates whose membership is undecided.
pub const MAX_DISTANCE: f64 = 1e12;
/// Distance added per unit of `t`-exponent.
pub const T_PENALTY: f64 = 1e6;
/// Extra window on top of a candidate's `p + q`.
pub const WINDOW_SLACK: u64 = 8;
/// Samples used by the commutation part of [`verify_break`].
pub const VERIFY_SAMPLES: usize = 16;

#[derive(Clone, Debug, PartialEq)]
pub enum AttackMode {
    /// Finitely generated baseline: the attacker knows generators of `A`.
    Generators(Vec<GroupElement>),
    /// Only a grammar for `A` is known.
    Grammar(SubsetSpec),
}

#[derive(Clone, Debug, PartialEq)]
pub struct AttackInstance {
    pub public: PublicParams1,
    pub target: GroupElement,
    pub mode: AttackMode,
    /// Cap on the words explored by the derivation descent.
    pub max_word_len: usize,
}

impl AttackInstance {
    /// Generator mode with `A` generated by `t^-k u t^k` for `|k| ≤ window`
    /// (`0 ≤ k` for natural-number orbits).
    pub fn with_orbit_generators(public: PublicParams1, target: GroupElement, window: u64) -> Self {
        let g = &public.params;
        let base = g.from_base(public.u.clone());
        let lo = match public.range {
            OrbitRange::Naturals => 0,
            OrbitRange::Integers => -(window as i64),
        };
        let mut gens: Vec<GroupElement> = Vec::new();
        for k in lo..=window as i64 {
            let c = g.conj_by_stable(&base, k);
            if !gens.contains(&c) {
                gens.push(c);
            }
        }
        AttackInstance { public, target, mode: AttackMode::Generators(gens), max_word_len: 64 }
    }

    pub fn with_grammar(public: PublicParams1, target: GroupElement) -> Self {
        let spec = public.spec_a.clone();
        AttackInstance { public, target, mode: AttackMode::Grammar(spec), max_word_len: 64 }
    }

    pub fn params(&self) -> &GroupParams {
        &self.public.params
    }
}

/// Exact membership oracle for `B` with per-window lattice caching.
#[derive(Debug)]
pub struct TargetSubgroup {
    params: GroupParams,
    gen: IntVector,
    range: OrbitRange,
    cache: HashMap<u64, WindowLattice>,
}

impl TargetSubgroup {
    pub fn new(params: GroupParams, gen: IntVector, range: OrbitRange) -> Self {
        TargetSubgroup { params, gen, range, cache: HashMap::new() }
    }

    pub fn for_instance(inst: &AttackInstance) -> Self {
        Self::new(inst.public.params.clone(), inst.public.v.clone(), inst.public.range)
    }

    fn lattice(&mut self, window: u64) -> &WindowLattice {
        let (params, gen, range) = (&self.params, &self.gen, self.range);
        self.cache.entry(window).or_insert_with(|| {
            let k = window as i64;
            let lo = if range == OrbitRange::Naturals { 0 } else { -k };
            WindowLattice::new(params, gen, window, lo..=k)
        })
    }

    pub fn default_window(b: &GroupElement) -> u64 {
        b.p() + b.q() + WINDOW_SLACK
    }

    pub fn verdict(&mut self, b: &GroupElement) -> MembershipVerdict {
        let x = self.params.oracle_embed(b);
        self.lattice(Self::default_window(b)).verdict(&x)
    }

    pub fn is_member(&mut self, b: &GroupElement) -> bool {
        self.verdict(b).is_member()
    }

    /// Default distance to `B`: soft bit-length of the rounding residual of
    /// the oracle base vector, plus a penalty for a nonzero `t`-exponent.
    pub fn residual_distance(&mut self, b: &GroupElement) -> f64 {
        let x = self.params.oracle_embed(b);
        let penalty = T_PENALTY * x.t_component().unsigned_abs() as f64;
        match self.lattice(Self::default_window(b)).residual(x.base()) {
            Some(r) => penalty + r.iter().map(soft_bits).sum::<f64>(),
            None => MAX_DISTANCE,
        }
    }
}

/// Distance from a `b`-candidate to the subset `B`.
pub trait SubsetDistance: Sync {
    fn distance(&self, oracle: &mut TargetSubgroup, b: &GroupElement) -> f64;
}

/// [`TargetSubgroup::residual_distance`].
#[derive(Clone, Copy, Debug, Default)]
pub struct ResidualDistance;

impl SubsetDistance for ResidualDistance {
    fn distance(&self, oracle: &mut TargetSubgroup, b: &GroupElement) -> f64 {
        oracle.residual_distance(b)
    }
}

/// Plain length of the candidate, ignoring `B`.
#[derive(Clone, Copy, Debug)]
pub struct LengthDistance<L>(pub L);

impl<L: Length> SubsetDistance for LengthDistance<L> {
    fn distance(&self, _: &mut TargetSubgroup, b: &GroupElement) -> f64 {
        self.0.length(b) as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AttackResult {
    pub success: bool,
    pub recovered: Option<(GroupElement, GroupElement)>,
    pub iterations: u64,
    pub best_score: f64,
    pub elapsed: Duration,
    /// Generator indices chosen by the greedy walk (rst) or rule indices of
    /// the winning derivation (descent).
    pub trace: Vec<usize>,
}

impl AttackResult {
    /// Equality of every field except `elapsed`.
    pub fn same_outcome(&self, other: &AttackResult) -> bool {
        self.success == other.success
            && self.recovered == other.recovered
            && self.iterations == other.iterations
            && self.best_score.to_bits() == other.best_score.to_bits()
            && self.trace == other.trace
    }
}

/// `a·w·b = target`, `a` commutes with samples of `B`, `b` with samples of `A`.
pub fn verify_half(
    public: &PublicParams1,
    target: &GroupElement,
    a: &GroupElement,
    b: &GroupElement,
    samples: usize,
) -> bool {
    let g = &public.params;
    if g.product([a, &public.w, b]) != *target {
        return false;
    }
    let commutes_with = |x: &GroupElement, spec: &SubsetSpec, label: u64| {
        let policy = SamplePolicy::default().with_seed(label);
        let sampler = spec.sampler();
        let mut rng = policy.rng();
        (0..samples).all(|_| match spec.sample_element_with(&sampler, &policy, &mut rng) {
            Ok((_, y)) => g.multiply(x, &y) == g.multiply(&y, x),
            Err(_) => false,
        })
    };
    commutes_with(a, &public.spec_b, 0xb) && commutes_with(b, &public.spec_a, 0xa)
}

/// Sufficient condition for computing the shared key `a·c·w·d·b` from a
/// decomposition of both transcripts: `a` must centralize `B` and `b` must
/// centralize `A`; `c`, `d` only have to reproduce the second transcript.
pub fn verify_break(
    public: &PublicParams1,
    target1: &GroupElement,
    target2: &GroupElement,
    a: &GroupElement,
    b: &GroupElement,
    c: &GroupElement,
    d: &GroupElement,
) -> bool {
    let g = &public.params;
    g.product([c, &public.w, d]) == *target2 && verify_half(public, target1, a, b, VERIFY_SAMPLES)
}

fn b_candidate(g: &GroupParams, w_inv: &GroupElement, a: &GroupElement, target: &GroupElement) -> GroupElement {
    g.product([w_inv, &g.invert(a), target])
}

/// Greedy walk: extend `ã` by the generator (or inverse) whose induced
/// `b`-candidate is closest to `B`; stop once a candidate lies in `B`.
///
/// `ell` breaks distance ties before the generator index does.
pub fn rst_greedy(inst: &AttackInstance, ell: &dyn Length, dist: &dyn SubsetDistance, max_iter: u64) -> AttackResult {
    let start = Instant::now();
    let g = inst.params();
    let AttackMode::Generators(gens) = &inst.mode else {
        panic!("rst_greedy requires generator mode");
    };
    let steps: Vec<GroupElement> = gens.iter().flat_map(|x| [x.clone(), g.invert(x)]).collect();
    let mut oracle = TargetSubgroup::for_instance(inst);
    let w_inv = g.invert(&inst.public.w);
    let mut current = g.identity();
    let mut trace = Vec::new();

    let finish = |success: bool, rec: Option<(GroupElement, GroupElement)>, it: u64, best: f64, trace: Vec<usize>| {
        AttackResult { success, recovered: rec, iterations: it, best_score: best, elapsed: start.elapsed(), trace }
    };

    let b0 = b_candidate(g, &w_inv, &current, &inst.target);
    if oracle.is_member(&b0) && verify_half(&inst.public, &inst.target, &current, &b0, VERIFY_SAMPLES) {
        return finish(true, Some((current, b0)), 0, 0.0, trace);
    }
    let mut best = dist.distance(&mut oracle, &b0);
    for it in 0..max_iter {
        let mut chosen: Option<(f64, u64, usize, GroupElement)> = None;
        for (idx, step) in steps.iter().enumerate() {
            let a = g.multiply(&current, step);
            let b = b_candidate(g, &w_inv, &a, &inst.target);
            if oracle.is_member(&b) && verify_half(&inst.public, &inst.target, &a, &b, VERIFY_SAMPLES) {
                trace.push(idx);
                return finish(true, Some((a, b)), it + 1, 0.0, trace);
            }
            let s = dist.distance(&mut oracle, &b);
            let l = ell.length(&b);
            let better = match &chosen {
                None => true,
                Some((cs, cl, _, _)) => s < *cs || (s == *cs && l < *cl),
            };
            if better {
                chosen = Some((s, l, idx, a));
            }
        }
        let Some((s, _, idx, a)) = chosen else { break };
        best = best.min(s);
        current = a;
        trace.push(idx);
    }
    finish(false, None, max_iter, best, trace)
}

#[derive(Clone, Debug)]
struct Partial {
    prefix: Vec<Token>,
    // pending symbols, leftmost last
    stack: Vec<Symbol>,
    rules: Vec<usize>,
}

impl Partial {
    /// Moves leading terminals into the prefix.
    fn normalize(&mut self) {
        while let Some(Symbol::Terminal(t)) = self.stack.last() {
            self.prefix.push(*t);
            self.stack.pop();
        }
    }
}

/// Beam search over leftmost derivations of `A`'s grammar. Partial
/// derivations are completed with the shortest yield of every pending
/// nonterminal; the completion is a genuine word of the language, so it is
/// also tested for success.
pub fn derivation_descent(inst: &AttackInstance, ell: &dyn Length, beam: usize, max_nodes: u64) -> AttackResult {
    let start = Instant::now();
    let g = inst.params();
    let spec = match &inst.mode {
        AttackMode::Grammar(s) => s.clone(),
        AttackMode::Generators(_) => inst.public.spec_a.clone(),
    };
    let grammar: &CFGrammar = spec.grammar();
    let shortest = grammar.shortest_yields();
    let by_lhs = grammar.rules_by_lhs();
    let min_len = |s: &Symbol| match s {
        Symbol::Terminal(_) => 1,
        Symbol::Nonterminal(i) => shortest[*i].map_or(usize::MAX / 4, |x| x.0),
    };
    let mut oracle = TargetSubgroup::for_instance(inst);
    let w_inv = g.invert(&inst.public.w);
    let mut nodes = 0u64;
    let mut best = f64::INFINITY;

    // returns (score, ell, success pair)
    let evaluate = |p: &Partial, oracle: &mut TargetSubgroup| {
        let mut word = p.prefix.clone();
        for s in p.stack.iter().rev() {
            word.extend(grammar.shortest_word(*s, &shortest));
        }
        let a = g.evaluate_word(&GroupWord::new(word)).expect("grammar tokens fit the group");
        let b = b_candidate(g, &w_inv, &a, &inst.target);
        let hit = oracle.is_member(&b) && verify_half(&inst.public, &inst.target, &a, &b, VERIFY_SAMPLES);
        let l = ell.length(&b);
        (l as f64, l, hit.then_some((a, b)))
    };

    let mut root = Partial { prefix: vec![], stack: vec![Symbol::Nonterminal(grammar.start())], rules: vec![] };
    root.normalize();
    let (s, _, hit) = evaluate(&root, &mut oracle);
    best = best.min(s);
    if let Some(pair) = hit {
        return AttackResult {
            success: true,
            recovered: Some(pair),
            iterations: 0,
            best_score: s,
            elapsed: start.elapsed(),
            trace: root.rules,
        };
    }
    let mut frontier = vec![root];
    while !frontier.is_empty() {
        let mut children: Vec<(f64, u64, usize, Partial)> = Vec::new();
        for node in &frontier {
            let Some(Symbol::Nonterminal(nt)) = node.stack.last().copied() else { continue };
            for &ri in &by_lhs[nt] {
                if nodes >= max_nodes {
                    return AttackResult {
                        success: false,
                        recovered: None,
                        iterations: nodes,
                        best_score: best,
                        elapsed: start.elapsed(),
                        trace: vec![],
                    };
                }
                let rhs = &grammar.rules()[ri].rhs;
                if rhs.iter().any(|s| matches!(s, Symbol::Nonterminal(i) if shortest[*i].is_none())) {
                    continue;
                }
                let mut child = node.clone();
                child.stack.pop();
                child.stack.extend(rhs.iter().rev());
                child.rules.push(ri);
                child.normalize();
                let pending: usize = child.stack.iter().map(min_len).sum();
                if child.prefix.len() + pending > inst.max_word_len {
                    continue;
                }
                nodes += 1;
                let (s, l, hit) = evaluate(&child, &mut oracle);
                best = best.min(s);
                if let Some(pair) = hit {
                    return AttackResult {
                        success: true,
                        recovered: Some(pair),
                        iterations: nodes,
                        best_score: s,
                        elapsed: start.elapsed(),
                        trace: child.rules,
                    };
                }
                if !child.stack.is_empty() {
                    let order = children.len();
                    children.push((s, l, order, child));
                }
            }
        }
        children.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
        children.truncate(beam.max(1));
        frontier = children.into_iter().map(|c| c.3).collect();
    }
    AttackResult {
        success: false,
        recovered: None,
        iterations: nodes,
        best_score: best,
        elapsed: start.elapsed(),
        trace: vec![],
    }
}
