//! Finite automata: the rational baseline for finitely generated subgroups.

use std::collections::BTreeSet;

use rand::Rng;

use crate::error::{Error, Result};
use crate::group::{GroupWord, Token};
use crate::sample::{SamplePolicy, MAX_ATTEMPTS};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FSAutomaton {
    num_states: usize,
    initial: usize,
    finals: BTreeSet<usize>,
    // (from, label, to)
    transitions: Vec<(usize, Token, usize)>,
}

impl FSAutomaton {
    pub fn new(
        num_states: usize,
        initial: usize,
        finals: BTreeSet<usize>,
        transitions: Vec<(usize, Token, usize)>,
    ) -> Result<Self> {
        let ok = |s: usize| s < num_states;
        if !ok(initial) || finals.iter().any(|&s| !ok(s)) || transitions.iter().any(|&(a, _, b)| !ok(a) || !ok(b)) {
            return Err(Error::Grammar("automaton references an unknown state".into()));
        }
        let fsa = FSAutomaton { num_states, initial, finals, transitions };
        if !fsa.has_accepting_path() {
            return Err(Error::EmptyLanguage);
        }
        Ok(fsa)
    }

    fn has_accepting_path(&self) -> bool {
        let mut seen = vec![false; self.num_states];
        let mut stack = vec![self.initial];
        seen[self.initial] = true;
        while let Some(s) = stack.pop() {
            if self.finals.contains(&s) {
                return true;
            }
            for &(a, _, b) in &self.transitions {
                if a == s && !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        false
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn transitions(&self) -> &[(usize, Token, usize)] {
        &self.transitions
    }

    pub fn accepts(&self, w: &GroupWord) -> bool {
        let mut current = BTreeSet::from([self.initial]);
        for tok in w.tokens() {
            current = self
                .transitions
                .iter()
                .filter(|(a, l, _)| l == tok && current.contains(a))
                .map(|&(_, _, b)| b)
                .collect();
            if current.is_empty() {
                return false;
            }
        }
        current.iter().any(|s| self.finals.contains(s))
    }
}

/// One-state automaton (plus path states) reading any product of the
/// generator words and their inverses.
pub fn fsa_subgroup(gens: &[GroupWord]) -> Result<FSAutomaton> {
    if gens.is_empty() {
        return Err(Error::Grammar("at least one generator is required".into()));
    }
    let mut n = 1;
    let mut transitions = Vec::new();
    for g in gens.iter().flat_map(|g| [g.clone(), g.inverse()]) {
        let toks = g.tokens();
        if toks.is_empty() {
            continue;
        }
        let mut from = 0;
        for (i, &t) in toks.iter().enumerate() {
            let to = if i + 1 == toks.len() {
                0
            } else {
                n += 1;
                n - 1
            };
            transitions.push((from, t, to));
            from = to;
        }
    }
    FSAutomaton::new(n, 0, BTreeSet::from([0]), transitions)
}

/// Random walk through the automaton. At accepting states "stop" competes
/// with the outgoing transitions; past `depth_cap` transitions it wins with
/// probability `terminal_bias`.
pub fn fsa_sample_with<R: Rng>(fsa: &FSAutomaton, policy: &SamplePolicy, rng: &mut R) -> Result<GroupWord> {
    policy.validate()?;
    let outgoing: Vec<Vec<(Token, usize)>> = (0..fsa.num_states)
        .map(|s| fsa.transitions.iter().filter(|t| t.0 == s).map(|t| (t.1, t.2)).collect())
        .collect();
    'attempt: for _ in 0..MAX_ATTEMPTS {
        let mut state = fsa.initial;
        let mut out = Vec::new();
        loop {
            let accepting = fsa.finals.contains(&state);
            let edges = &outgoing[state];
            if accepting {
                if edges.is_empty()
                    || (out.len() > policy.depth_cap && rng.gen_bool(policy.terminal_bias))
                    || rng.gen_range(0..=edges.len()) == edges.len()
                {
                    return Ok(GroupWord::new(out));
                }
            } else if edges.is_empty() {
                continue 'attempt;
            }
            if out.len() >= policy.max_length {
                continue 'attempt;
            }
            let (tok, next) = edges[rng.gen_range(0..edges.len())];
            out.push(tok);
            state = next;
        }
    }
    Err(Error::SampleBudgetExhausted { attempts: MAX_ATTEMPTS, max_length: policy.max_length })
}

pub fn fsa_sample(fsa: &FSAutomaton, policy: &SamplePolicy) -> Result<GroupWord> {
    fsa_sample_with(fsa, policy, &mut policy.rng())
}
