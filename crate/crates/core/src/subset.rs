//! Algebraic subsets: grammars paired with the group they are evaluated in.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::grammar::{CFGrammar, Rule, Symbol};
use crate::group::{GroupElement, GroupParams, GroupWord, Token};
use crate::sample::{SamplePolicy, Sampler};

/// Range of the conjugation exponent in `{ t^-k w t^k }`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum OrbitRange {
    Naturals,
    #[default]
    Integers,
}

impl fmt::Display for OrbitRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrbitRange::Naturals => "naturals",
            OrbitRange::Integers => "integers",
        })
    }
}

impl FromStr for OrbitRange {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "naturals" => Ok(OrbitRange::Naturals),
            "integers" => Ok(OrbitRange::Integers),
            other => Err(Error::Grammar(format!("unknown orbit range `{other}`"))),
        }
    }
}

/// `K = L(grammar)π ⊆ G`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetSpec {
    grammar: CFGrammar,
    params: GroupParams,
}

impl SubsetSpec {
    pub fn new(grammar: CFGrammar, params: GroupParams) -> Result<Self> {
        if let Some(t) = grammar.terminals().into_iter().find(|t| !t.fits(params.dim())) {
            return Err(Error::TokenOutOfAlphabet { token: t.to_string(), dim: params.dim() });
        }
        Ok(SubsetSpec { grammar, params })
    }

    pub fn grammar(&self) -> &CFGrammar {
        &self.grammar
    }

    pub fn params(&self) -> &GroupParams {
        &self.params
    }

    pub fn sampler(&self) -> Sampler<'_> {
        Sampler::new(&self.grammar)
    }

    /// Draws a word with the caller's generator and evaluates it.
    pub fn sample_element_with<R: Rng>(
        &self,
        sampler: &Sampler<'_>,
        policy: &SamplePolicy,
        rng: &mut R,
    ) -> Result<(GroupWord, GroupElement)> {
        let w = sampler.sample_with(policy, rng)?;
        let g = self.params.evaluate_word(&w)?;
        Ok((w, g))
    }

    pub fn sample_element(&self, policy: &SamplePolicy) -> Result<GroupElement> {
        let w = cfg_sample(self, policy)?;
        self.params.evaluate_word(&w)
    }
}

pub fn cfg_sample(spec: &SubsetSpec, policy: &SamplePolicy) -> Result<GroupWord> {
    spec.sampler().sample(policy)
}

pub fn cfg_invert(g: &CFGrammar) -> CFGrammar {
    g.invert()
}

pub fn cfg_union(g1: &CFGrammar, g2: &CFGrammar) -> CFGrammar {
    g1.union(g2)
}

pub fn cfg_star(g: &CFGrammar) -> CFGrammar {
    g.star()
}

/// Grammar for `(L ∪ L^-1)*`, whose image is the subgroup generated by `Lπ`.
pub fn subgroup_closure(spec: &SubsetSpec) -> SubsetSpec {
    let g = spec.grammar();
    SubsetSpec { grammar: g.union(&g.invert()).star(), params: spec.params.clone() }
}

/// Grammar for `{ t^-k w t^k }` with `k ∈ N` or `k ∈ Z`.
pub fn orbit_grammar(params: &GroupParams, w: &GroupWord, range: OrbitRange) -> Result<CFGrammar> {
    if w.is_empty() {
        return Err(Error::Grammar("orbit word must be nonempty".into()));
    }
    if let Some(t) = w.tokens().iter().find(|t| !t.fits(params.dim())) {
        return Err(Error::TokenOutOfAlphabet { token: t.to_string(), dim: params.dim() });
    }
    let term = |t: &Token| Symbol::Terminal(*t);
    let word: Vec<Symbol> = w.tokens().iter().map(term).collect();
    let wrap = |left: Token, inner: Symbol, right: Token| vec![Symbol::Terminal(left), inner, Symbol::Terminal(right)];
    match range {
        OrbitRange::Naturals => CFGrammar::new(
            vec!["S".into()],
            0,
            vec![Rule { lhs: 0, rhs: wrap(Token::TInv, Symbol::Nonterminal(0), Token::T) }, Rule { lhs: 0, rhs: word }],
        ),
        OrbitRange::Integers => {
            let (s, a, b) = (0, 1, 2);
            let mut tw = vec![Symbol::Terminal(Token::T)];
            tw.extend(word.iter().copied());
            tw.push(Symbol::Terminal(Token::TInv));
            CFGrammar::new(
                vec!["S".into(), "A".into(), "B".into()],
                s,
                vec![
                    Rule { lhs: s, rhs: vec![Symbol::Nonterminal(a)] },
                    Rule { lhs: s, rhs: vec![Symbol::Nonterminal(b)] },
                    Rule { lhs: a, rhs: wrap(Token::TInv, Symbol::Nonterminal(a), Token::T) },
                    Rule { lhs: a, rhs: word },
                    Rule { lhs: b, rhs: wrap(Token::T, Symbol::Nonterminal(b), Token::TInv) },
                    Rule { lhs: b, rhs: tw },
                ],
            )
        }
    }
}

/// Subset spec for the orbit of the word `w`.
pub fn orbit_spec(params: &GroupParams, w: &GroupWord, range: OrbitRange) -> Result<SubsetSpec> {
    SubsetSpec::new(orbit_grammar(params, w, range)?, params.clone())
}
