//! Context-free grammars over the group alphabet and their closure operations.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::group::Token;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Symbol {
    Nonterminal(usize),
    Terminal(Token),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Rule {
    pub lhs: usize,
    pub rhs: Vec<Symbol>,
}

/// A grammar whose start symbol derives at least one word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CFGrammar {
    names: Vec<String>,
    start: usize,
    rules: Vec<Rule>,
}

/// Nonterminals (by index) that derive some terminal word.
pub fn productive_check(num_nonterminals: usize, rules: &[Rule]) -> BTreeSet<usize> {
    let mut productive = vec![false; num_nonterminals];
    let mut changed = true;
    while changed {
        changed = false;
        for r in rules {
            if productive[r.lhs] {
                continue;
            }
            let ok = r.rhs.iter().all(|s| match s {
                Symbol::Nonterminal(n) => productive[*n],
                Symbol::Terminal(_) => true,
            });
            if ok {
                productive[r.lhs] = true;
                changed = true;
            }
        }
    }
    (0..num_nonterminals).filter(|&i| productive[i]).collect()
}

fn is_token_like(name: &str) -> bool {
    name.parse::<Token>().is_ok()
}

impl CFGrammar {
    pub fn new(names: Vec<String>, start: usize, rules: Vec<Rule>) -> Result<Self> {
        let mut seen = HashSet::new();
        for n in &names {
            if n.is_empty() {
                return Err(Error::Grammar("empty nonterminal name".into()));
            }
            if is_token_like(n) {
                return Err(Error::Grammar(format!("nonterminal `{n}` collides with a token")));
            }
            if !seen.insert(n.as_str()) {
                return Err(Error::Grammar(format!("duplicate nonterminal `{n}`")));
            }
        }
        if start >= names.len() {
            return Err(Error::Grammar("start symbol is not a declared nonterminal".into()));
        }
        for r in &rules {
            let in_range = |i: usize| i < names.len();
            if !in_range(r.lhs) || r.rhs.iter().any(|s| matches!(s, Symbol::Nonterminal(i) if !in_range(*i))) {
                return Err(Error::Grammar("rule references an undeclared nonterminal".into()));
            }
        }
        if !productive_check(names.len(), &rules).contains(&start) {
            return Err(Error::EmptyLanguage);
        }
        Ok(CFGrammar { names, start, rules })
    }

    /// Builds a grammar from textual symbols. Right-hand-side entries that
    /// name a declared nonterminal are nonterminals; everything else must be
    /// a token.
    pub fn from_named<S: AsRef<str>>(nonterminals: &[S], start: &str, rules: &[(S, Vec<S>)]) -> Result<Self> {
        let names: Vec<String> = nonterminals.iter().map(|s| s.as_ref().to_string()).collect();
        let index = |n: &str| names.iter().position(|x| x == n);
        let start_idx = index(start).ok_or_else(|| Error::Grammar(format!("start `{start}` is not declared")))?;
        let mut out = Vec::with_capacity(rules.len());
        for (lhs, rhs) in rules {
            let lhs = index(lhs.as_ref())
                .ok_or_else(|| Error::Grammar(format!("rule lhs `{}` is not declared", lhs.as_ref())))?;
            let rhs = rhs
                .iter()
                .map(|s| match index(s.as_ref()) {
                    Some(i) => Ok(Symbol::Nonterminal(i)),
                    None => s.as_ref().parse().map(Symbol::Terminal),
                })
                .collect::<Result<Vec<_>>>()?;
            out.push(Rule { lhs, rhs });
        }
        Self::new(names, start_idx, out)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn num_nonterminals(&self) -> usize {
        self.names.len()
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn productive(&self) -> BTreeSet<usize> {
        productive_check(self.names.len(), &self.rules)
    }

    pub fn terminals(&self) -> BTreeSet<Token> {
        self.rules
            .iter()
            .flat_map(|r| r.rhs.iter())
            .filter_map(|s| match s {
                Symbol::Terminal(t) => Some(*t),
                _ => None,
            })
            .collect()
    }

    /// Rule indices grouped by left-hand side.
    pub fn rules_by_lhs(&self) -> Vec<Vec<usize>> {
        let mut by = vec![Vec::new(); self.names.len()];
        for (i, r) in self.rules.iter().enumerate() {
            by[r.lhs].push(i);
        }
        by
    }

    /// Grammar for `{ w^-1 : w ∈ L }`.
    pub fn invert(&self) -> CFGrammar {
        let rules = self
            .rules
            .iter()
            .map(|r| Rule {
                lhs: r.lhs,
                rhs: r
                    .rhs
                    .iter()
                    .rev()
                    .map(|s| match s {
                        Symbol::Terminal(t) => Symbol::Terminal(t.inverse()),
                        nt => *nt,
                    })
                    .collect(),
            })
            .collect();
        CFGrammar { names: self.names.clone(), start: self.start, rules }
    }

    /// Disjoint copy of `other`'s nonterminals appended to `names`; returns
    /// the index offset and the renamed rules.
    fn absorb(names: &mut Vec<String>, other: &CFGrammar) -> (usize, Vec<Rule>) {
        let offset = names.len();
        for n in &other.names {
            let fresh = fresh_name(n, names);
            names.push(fresh);
        }
        let shift = |s: &Symbol| match s {
            Symbol::Nonterminal(i) => Symbol::Nonterminal(i + offset),
            t => *t,
        };
        let rules =
            other.rules.iter().map(|r| Rule { lhs: r.lhs + offset, rhs: r.rhs.iter().map(shift).collect() }).collect();
        (offset, rules)
    }

    /// Grammar for `L1 ∪ L2`, with a fresh start symbol.
    pub fn union(&self, other: &CFGrammar) -> CFGrammar {
        let mut names = self.names.clone();
        let mut rules = self.rules.clone();
        let (offset, more) = Self::absorb(&mut names, other);
        rules.extend(more);
        let start = names.len();
        names.push(fresh_name("U", &names));
        rules.push(Rule { lhs: start, rhs: vec![Symbol::Nonterminal(self.start)] });
        rules.push(Rule { lhs: start, rhs: vec![Symbol::Nonterminal(other.start + offset)] });
        CFGrammar { names, start, rules }
    }

    /// Grammar for `L1 L2`.
    pub fn concat(&self, other: &CFGrammar) -> CFGrammar {
        let mut names = self.names.clone();
        let mut rules = self.rules.clone();
        let (offset, more) = Self::absorb(&mut names, other);
        rules.extend(more);
        let start = names.len();
        names.push(fresh_name("C", &names));
        rules.push(Rule {
            lhs: start,
            rhs: vec![Symbol::Nonterminal(self.start), Symbol::Nonterminal(other.start + offset)],
        });
        CFGrammar { names, start, rules }
    }

    /// Grammar for `L*` (includes the empty word).
    pub fn star(&self) -> CFGrammar {
        let mut names = self.names.clone();
        let mut rules = self.rules.clone();
        let start = names.len();
        names.push(fresh_name("K", &names));
        rules.push(Rule { lhs: start, rhs: vec![] });
        rules.push(Rule { lhs: start, rhs: vec![Symbol::Nonterminal(self.start), Symbol::Nonterminal(start)] });
        CFGrammar { names, start, rules }
    }

    /// Minimum terminal yield length of every nonterminal together with a
    /// rule that realises it (`None` for unproductive nonterminals).
    pub fn shortest_yields(&self) -> Vec<Option<(usize, usize)>> {
        self.knuth_min(|lens| lens.iter().sum::<usize>(), |_| 1)
    }

    /// Minimum derivation height of every nonterminal with a witnessing rule.
    pub fn min_heights(&self) -> Vec<Option<(usize, usize)>> {
        self.knuth_min(|hs| 1 + hs.iter().copied().max().unwrap_or(0), |_| 0)
    }

    // Knuth's generalisation of Dijkstra for superior functions over rules.
    // Witness rules only reference nonterminals finalised before their lhs,
    // so following them always terminates.
    fn knuth_min(
        &self,
        combine: impl Fn(&[usize]) -> usize,
        terminal_cost: impl Fn(Token) -> usize,
    ) -> Vec<Option<(usize, usize)>> {
        let n = self.names.len();
        let mut done: Vec<Option<(usize, usize)>> = vec![None; n];
        loop {
            let mut best: Option<(usize, usize, usize)> = None; // (value, nt, rule)
            for (ri, r) in self.rules.iter().enumerate() {
                if done[r.lhs].is_some() {
                    continue;
                }
                let mut parts = Vec::with_capacity(r.rhs.len());
                let mut ok = true;
                for s in &r.rhs {
                    match s {
                        Symbol::Terminal(t) => parts.push(terminal_cost(*t)),
                        Symbol::Nonterminal(i) => match done[*i] {
                            Some((v, _)) => parts.push(v),
                            None => {
                                ok = false;
                                break;
                            }
                        },
                    }
                }
                if !ok {
                    continue;
                }
                let v = combine(&parts);
                if best.is_none_or(|(bv, _, _)| v < bv) {
                    best = Some((v, r.lhs, ri));
                }
            }
            match best {
                Some((v, nt, ri)) => done[nt] = Some((v, ri)),
                None => return done,
            }
        }
    }

    /// The shortest word derivable from `sym`, following witness rules.
    pub fn shortest_word(&self, sym: Symbol, witness: &[Option<(usize, usize)>]) -> Vec<Token> {
        let mut out = Vec::new();
        let mut stack = vec![sym];
        while let Some(s) = stack.pop() {
            match s {
                Symbol::Terminal(t) => out.push(t),
                Symbol::Nonterminal(i) => {
                    let (_, ri) = witness[i].expect("productive nonterminal");
                    stack.extend(self.rules[ri].rhs.iter().rev());
                }
            }
        }
        out
    }

    pub fn symbol_name(&self, s: &Symbol) -> String {
        match s {
            Symbol::Nonterminal(i) => self.names[*i].clone(),
            Symbol::Terminal(t) => t.to_string(),
        }
    }
}

fn fresh_name(base: &str, taken: &[String]) -> String {
    if !taken.iter().any(|t| t == base) {
        return base.to_string();
    }
    (1..).map(|i| format!("{base}_{i}")).find(|c| !taken.iter().any(|t| t == c)).expect("unbounded suffix search")
}

impl fmt::Display for CFGrammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            let rhs: Vec<String> = r.rhs.iter().map(|s| self.symbol_name(s)).collect();
            let rhs = if rhs.is_empty() { "ε".to_string() } else { rhs.join(" ") };
            writeln!(f, "{} -> {}", self.names[r.lhs], rhs)?;
        }
        Ok(())
    }
}
