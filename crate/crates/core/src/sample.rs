//! Seeded random derivations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grammar::{CFGrammar, Symbol};
use crate::group::{GroupWord, Token};

/// Attempts made before a sampler gives up.
pub const MAX_ATTEMPTS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SamplePolicy {
    pub max_length: usize,
    pub depth_cap: usize,
    /// Probability of taking a shortest-height rule once the derivation is
    /// deeper than `depth_cap`.
    pub terminal_bias: f64,
    pub seed: u64,
}

impl Default for SamplePolicy {
    fn default() -> Self {
        SamplePolicy { max_length: 64, depth_cap: 6, terminal_bias: 0.75, seed: 0 }
    }
}

impl SamplePolicy {
    pub fn with_seed(self, seed: u64) -> Self {
        SamplePolicy { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_length < 1 {
            return Err(Error::InvalidPolicy("max_length must be at least 1".into()));
        }
        if self.depth_cap < 1 {
            return Err(Error::InvalidPolicy("depth_cap must be at least 1".into()));
        }
        if !(self.terminal_bias > 0.0 && self.terminal_bias <= 1.0) {
            return Err(Error::InvalidPolicy("terminal_bias must lie in (0, 1]".into()));
        }
        Ok(())
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// Precomputed tables for repeated sampling from one grammar.
#[derive(Clone, Debug)]
pub struct Sampler<'g> {
    grammar: &'g CFGrammar,
    // productive rules per nonterminal
    choices: Vec<Vec<usize>>,
    // subset of `choices` with minimal derivation height
    shallow: Vec<Vec<usize>>,
    min_len: Vec<usize>,
}

impl<'g> Sampler<'g> {
    pub fn new(grammar: &'g CFGrammar) -> Self {
        let heights = grammar.min_heights();
        let lens = grammar.shortest_yields();
        let rule_height = |ri: usize| -> Option<usize> {
            let mut h = 0;
            for s in &grammar.rules()[ri].rhs {
                if let Symbol::Nonterminal(i) = s {
                    h = h.max(heights[*i]?.0);
                }
            }
            Some(h + 1)
        };
        let mut choices = Vec::new();
        let mut shallow = Vec::new();
        for (nt, rules) in grammar.rules_by_lhs().into_iter().enumerate() {
            let usable: Vec<(usize, usize)> =
                rules.into_iter().filter_map(|ri| rule_height(ri).map(|h| (ri, h))).collect();
            let best = heights[nt].map(|x| x.0);
            shallow.push(usable.iter().filter(|(_, h)| Some(*h) == best).map(|x| x.0).collect());
            choices.push(usable.into_iter().map(|x| x.0).collect());
        }
        let min_len = lens.iter().map(|x| x.map_or(usize::MAX, |y| y.0)).collect();
        Sampler { grammar, choices, shallow, min_len }
    }

    fn sym_min(&self, s: &Symbol) -> usize {
        match s {
            Symbol::Terminal(_) => 1,
            Symbol::Nonterminal(i) => self.min_len[*i],
        }
    }

    fn attempt<R: Rng>(&self, policy: &SamplePolicy, rng: &mut R) -> Option<Vec<Token>> {
        let step_cap = 64 * (policy.max_length + 1) + 1024;
        let start = Symbol::Nonterminal(self.grammar.start());
        let mut pending = self.sym_min(&start);
        let mut stack: Vec<(Symbol, usize)> = vec![(start, 0)];
        let mut out = Vec::new();
        let mut steps = 0;
        while let Some((sym, depth)) = stack.pop() {
            steps += 1;
            if steps > step_cap {
                return None;
            }
            pending -= self.sym_min(&sym);
            match sym {
                Symbol::Terminal(t) => out.push(t),
                Symbol::Nonterminal(nt) => {
                    let pool = if depth > policy.depth_cap && rng.gen_bool(policy.terminal_bias) {
                        &self.shallow[nt]
                    } else {
                        &self.choices[nt]
                    };
                    let ri = pool[rng.gen_range(0..pool.len())];
                    for s in self.grammar.rules()[ri].rhs.iter().rev() {
                        pending += self.sym_min(s);
                        stack.push((*s, depth + 1));
                    }
                }
            }
            if out.len() + pending > policy.max_length {
                return None;
            }
        }
        Some(out)
    }

    /// Draws a word using the caller's generator; retries up to
    /// [`MAX_ATTEMPTS`] times when a derivation overruns `max_length`.
    pub fn sample_with<R: Rng>(&self, policy: &SamplePolicy, rng: &mut R) -> Result<GroupWord> {
        policy.validate()?;
        for _ in 0..MAX_ATTEMPTS {
            if let Some(w) = self.attempt(policy, rng) {
                return Ok(GroupWord::new(w));
            }
        }
        Err(Error::SampleBudgetExhausted { attempts: MAX_ATTEMPTS, max_length: policy.max_length })
    }

    pub fn sample(&self, policy: &SamplePolicy) -> Result<GroupWord> {
        self.sample_with(policy, &mut policy.rng())
    }
}

/// One word of `L(g)` drawn by a seeded leftmost derivation.
pub fn sample_word(g: &CFGrammar, policy: &SamplePolicy) -> Result<GroupWord> {
    Sampler::new(g).sample(policy)
}
