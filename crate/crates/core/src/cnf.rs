//! Chomsky normal form conversion and CYK recognition.

use std::collections::{BTreeSet, HashMap};

use crate::grammar::{CFGrammar, Symbol};
use crate::group::{GroupWord, Token};

/// A grammar with rules `A → a` and `A → B C` only; the empty word is
/// tracked separately.
#[derive(Clone, Debug)]
pub struct CnfGrammar {
    num_nonterminals: usize,
    start: usize,
    accepts_empty: bool,
    terminal_rules: HashMap<Token, Vec<usize>>,
    // indexed by left child: (lhs, right child)
    binary_by_left: Vec<Vec<(usize, usize)>>,
    binary_count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Rhs {
    Empty,
    Term(Token),
    Unit(usize),
    Pair(usize, usize),
}

impl CnfGrammar {
    pub fn from_grammar(g: &CFGrammar) -> Self {
        let mut n = g.num_nonterminals();
        let mut rules: BTreeSet<(usize, Rhs)> = BTreeSet::new();
        let mut term_nt: HashMap<Token, usize> = HashMap::new();

        // TERM + BIN
        for r in g.rules() {
            match r.rhs.as_slice() {
                [] => {
                    rules.insert((r.lhs, Rhs::Empty));
                }
                [Symbol::Terminal(t)] => {
                    rules.insert((r.lhs, Rhs::Term(*t)));
                }
                [Symbol::Nonterminal(b)] => {
                    rules.insert((r.lhs, Rhs::Unit(*b)));
                }
                syms => {
                    let mut nts = Vec::with_capacity(syms.len());
                    for s in syms {
                        nts.push(match s {
                            Symbol::Nonterminal(i) => *i,
                            Symbol::Terminal(t) => *term_nt.entry(*t).or_insert_with(|| {
                                n += 1;
                                rules.insert((n - 1, Rhs::Term(*t)));
                                n - 1
                            }),
                        });
                    }
                    let mut lhs = r.lhs;
                    for w in 0..nts.len() - 2 {
                        let fresh = n;
                        n += 1;
                        rules.insert((lhs, Rhs::Pair(nts[w], fresh)));
                        lhs = fresh;
                    }
                    rules.insert((lhs, Rhs::Pair(nts[nts.len() - 2], nts[nts.len() - 1])));
                }
            }
        }

        // DEL
        let mut nullable = vec![false; n];
        let mut changed = true;
        while changed {
            changed = false;
            for (lhs, rhs) in &rules {
                if nullable[*lhs] {
                    continue;
                }
                let now = match rhs {
                    Rhs::Empty => true,
                    Rhs::Unit(b) => nullable[*b],
                    Rhs::Pair(b, c) => nullable[*b] && nullable[*c],
                    Rhs::Term(_) => false,
                };
                if now {
                    nullable[*lhs] = true;
                    changed = true;
                }
            }
        }
        let mut no_eps: BTreeSet<(usize, Rhs)> = BTreeSet::new();
        for (lhs, rhs) in &rules {
            match rhs {
                Rhs::Empty => {}
                Rhs::Pair(b, c) => {
                    no_eps.insert((*lhs, rhs.clone()));
                    if nullable[*b] {
                        no_eps.insert((*lhs, Rhs::Unit(*c)));
                    }
                    if nullable[*c] {
                        no_eps.insert((*lhs, Rhs::Unit(*b)));
                    }
                }
                _ => {
                    no_eps.insert((*lhs, rhs.clone()));
                }
            }
        }

        // UNIT: reflexive-transitive closure of unit derivations
        let mut reach = vec![vec![false; n]; n];
        for (a, row) in reach.iter_mut().enumerate() {
            row[a] = true;
        }
        changed = true;
        while changed {
            changed = false;
            for (a, rhs) in &no_eps {
                if let Rhs::Unit(b) = rhs {
                    for x in 0..n {
                        if reach[x][*a] && !reach[x][*b] {
                            reach[x][*b] = true;
                            changed = true;
                        }
                    }
                }
            }
        }
        let mut terminal_rules: HashMap<Token, Vec<usize>> = HashMap::new();
        let mut binary: BTreeSet<(usize, usize, usize)> = BTreeSet::new();
        let mut terms: BTreeSet<(Token, usize)> = BTreeSet::new();
        for (b, rhs) in &no_eps {
            for a in 0..n {
                if !reach[a][*b] {
                    continue;
                }
                match rhs {
                    Rhs::Term(t) => {
                        terms.insert((*t, a));
                    }
                    Rhs::Pair(x, y) => {
                        binary.insert((a, *x, *y));
                    }
                    _ => {}
                }
            }
        }
        for (t, a) in terms {
            terminal_rules.entry(t).or_default().push(a);
        }
        let mut binary_by_left = vec![Vec::new(); n];
        for &(a, x, y) in &binary {
            binary_by_left[x].push((a, y));
        }
        CnfGrammar {
            num_nonterminals: n,
            start: g.start(),
            accepts_empty: nullable[g.start()],
            terminal_rules,
            binary_by_left,
            binary_count: binary.len(),
        }
    }

    pub fn num_nonterminals(&self) -> usize {
        self.num_nonterminals
    }

    pub fn num_binary_rules(&self) -> usize {
        self.binary_count
    }

    pub fn accepts_empty(&self) -> bool {
        self.accepts_empty
    }

    pub fn accepts(&self, w: &[Token]) -> bool {
        let len = w.len();
        if len == 0 {
            return self.accepts_empty;
        }
        let words = self.num_nonterminals.div_ceil(64);
        // table[(i, l)] = nonterminals deriving w[i..i+l]
        let idx = |i: usize, l: usize| ((l - 1) * len + i) * words;
        let mut table = vec![0u64; len * len * words];
        let set = |table: &mut [u64], base: usize, a: usize| table[base + a / 64] |= 1 << (a % 64);
        let get = |table: &[u64], base: usize, a: usize| table[base + a / 64] >> (a % 64) & 1 == 1;
        for (i, tok) in w.iter().enumerate() {
            match self.terminal_rules.get(tok) {
                Some(nts) => {
                    for &a in nts {
                        set(&mut table, idx(i, 1), a);
                    }
                }
                None => return false,
            }
        }
        for l in 2..=len {
            for i in 0..=len - l {
                let target = idx(i, l);
                for split in 1..l {
                    let left = idx(i, split);
                    let right = idx(i + split, l - split);
                    for b in 0..self.num_nonterminals {
                        if !get(&table, left, b) {
                            continue;
                        }
                        for &(a, c) in &self.binary_by_left[b] {
                            if get(&table, right, c) {
                                set(&mut table, target, a);
                            }
                        }
                    }
                }
            }
        }
        get(&table, idx(0, len), self.start)
    }
}

/// Language membership `w ∈ L(g)`.
pub fn cfg_membership(w: &GroupWord, g: &CFGrammar) -> bool {
    CnfGrammar::from_grammar(g).accepts(w.tokens())
}
