//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Each criterion also has a wall-clock budget.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::Rng;
use subset_kex::attack::{rst_greedy, AttackInstance, ResidualDistance};
use subset_kex::cnf::CnfGrammar;
use subset_kex::experiment::{default_grid, run_experiments, ExperimentConfig};
use subset_kex::lattice::lattice_member;
use subset_kex::par::{map_indices, Execution};
use subset_kex::protocol::{
    orbit_closure_spec, orbit_dh, p1_keys, p1_round, p1_setup, p2_exchange, p2_party_setup, PublicParams1,
    PublicParams2, SessionKey, SpotCheck, ORBIT_DH_BOUND,
};
use subset_kex::seed::derive_seed;
use subset_kex::subset::{orbit_spec, subgroup_closure};
use subset_kex::wire::{self, ElementJson, GrammarJson, Transcript};
use subset_kex::{
    GroupElement, GroupParams, GroupWord, IntVector, Length, OrbitRange, SamplePolicy, SubsetSpec, Token, UnaryLength,
};

use common::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Outcome);

fn tally(name: &str, results: &[bool]) -> Outcome {
    let ok = results.iter().filter(|&&b| b).count();
    let msg = format!("{ok}/{} {name}", results.len());
    if ok == results.len() {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn both(a: Outcome, b: Outcome) -> Outcome {
    match (a, b) {
        (Ok(x), Ok(y)) => Ok(format!("{x}; {y}")),
        (Ok(x) | Err(x), Ok(y) | Err(y)) => Err(format!("{x}; {y}")),
    }
}

/// Normal-form products agree with the rational model on 10^4 word pairs.
fn oracle_equivalence() -> Outcome {
    let res: Vec<Vec<bool>> = map_indices(100, Execution::Parallel, |blk| {
        let mut r = rng(derive_seed(1, &format!("oracle/{blk}")));
        let m = r.gen_range(1..=4);
        let g = random_params(&mut r, m, 3);
        (0..100)
            .map(|_| {
                let w1 = random_word(&mut r, m, 40);
                let w2 = random_word(&mut r, m, 40);
                let prod = g.multiply(&g.evaluate_word(&w1).unwrap(), &g.evaluate_word(&w2).unwrap());
                let expect = g.oracle_multiply(&g.oracle_word(&w1).unwrap(), &g.oracle_word(&w2).unwrap());
                g.oracle_embed(&prod) == expect
            })
            .collect()
    });
    tally("word pairs", &res.concat())
}

fn group_axioms() -> Outcome {
    let res: Vec<Vec<bool>> = map_indices(100, Execution::Parallel, |blk| {
        let mut r = rng(derive_seed(2, &format!("axioms/{blk}")));
        let m = r.gen_range(1..=4);
        let g = random_params(&mut r, m, 3);
        let e = g.identity();
        (0..100)
            .map(|_| {
                let x = random_element(&mut r, &g, 20);
                let y = random_element(&mut r, &g, 20);
                let z = random_element(&mut r, &g, 20);
                let assoc = g.multiply(&g.multiply(&x, &y), &z) == g.multiply(&x, &g.multiply(&y, &z));
                let ident = g.multiply(&x, &e) == x && g.multiply(&e, &x) == x;
                let inv = g.multiply(&x, &g.invert(&x)).is_identity() && g.multiply(&g.invert(&x), &x).is_identity();
                assoc && ident && inv
            })
            .collect()
    });
    tally("triples", &res.concat())
}

fn commutation() -> Outcome {
    let conj: Vec<Vec<bool>> = map_indices(100, Execution::Parallel, |blk| {
        let mut r = rng(derive_seed(3, &format!("conj/{blk}")));
        let m = r.gen_range(1..=4);
        let g = random_params(&mut r, m, 3);
        (0..10)
            .map(|_| {
                let u = g.from_base(random_vector(&mut r, m, 5));
                let v = g.from_base(random_vector(&mut r, m, 5));
                let c1 = g.conj_by_stable(&u, r.gen_range(-8..=8));
                let c2 = g.conj_by_stable(&v, r.gen_range(-8..=8));
                g.multiply(&c1, &c2) == g.multiply(&c2, &c1)
            })
            .collect()
    });
    let cross: Vec<Vec<bool>> = map_indices(10, Execution::Parallel, |blk| {
        let mut r = rng(derive_seed(3, &format!("cross/{blk}")));
        let m = r.gen_range(1..=4);
        let g = random_params(&mut r, m, 3);
        let range = if blk % 2 == 0 { OrbitRange::Integers } else { OrbitRange::Naturals };
        let (u, v) = (nonzero_vector(&mut r, m, 3), nonzero_vector(&mut r, m, 3));
        let a = orbit_closure_spec(&g, &u, range).unwrap();
        let b = orbit_closure_spec(&g, &v, range).unwrap();
        let policy = SamplePolicy { max_length: 40, ..SamplePolicy::default() }.with_seed(blk as u64);
        let (sa, sb) = (a.sampler(), b.sampler());
        let mut rr = policy.rng();
        (0..100)
            .map(|_| {
                let (_, x) = a.sample_element_with(&sa, &policy, &mut rr).unwrap();
                let (_, y) = b.sample_element_with(&sb, &policy, &mut rr).unwrap();
                g.multiply(&x, &y) == g.multiply(&y, &x)
            })
            .collect()
    });
    both(tally("conjugate pairs", &conj.concat()), tally("closure cross pairs", &cross.concat()))
}

fn protocol_setups() -> Vec<(GroupParams, IntVector, IntVector, OrbitRange)> {
    let v = IntVector::from_i64s;
    vec![
        (GroupParams::baumslag_solitar(2).unwrap(), v(&[1]), v(&[1]), OrbitRange::Integers),
        (upper(), v(&[1, 0]), v(&[0, 1]), OrbitRange::Integers),
        (GroupParams::from_i64s(&[vec![1, 1], vec![-1, 2]]).unwrap(), v(&[2, -1]), v(&[1, 1]), OrbitRange::Naturals),
        (
            GroupParams::from_i64s(&[vec![0, 1, 0], vec![0, 0, 1], vec![2, -1, 1]]).unwrap(),
            v(&[1, 0, 0]),
            v(&[0, 1, -1]),
            OrbitRange::Integers,
        ),
    ]
}

fn protocol_correctness() -> Outcome {
    let policy = SamplePolicy { max_length: 32, depth_cap: 4, terminal_bias: 0.8, seed: 0 };
    let setups = protocol_setups();
    let p1: Vec<Vec<bool>> = map_indices(setups.len(), Execution::Parallel, |i| {
        let (g, u, v, range) = &setups[i];
        let mut r = rng(derive_seed(4, &format!("p1/{i}")));
        let w = random_element(&mut r, g, 8);
        let public = p1_setup(g, u, v, &w, *range, &SpotCheck::default()).unwrap();
        (0..50)
            .map(|t| {
                let s = derive_seed(4, &format!("p1/{i}/{t}"));
                let round =
                    p1_round(&public, &policy.with_seed(derive_seed(s, "a")), &policy.with_seed(derive_seed(s, "b")))
                        .unwrap();
                let Ok((SessionKey::Element(ka), SessionKey::Element(kb))) =
                    p1_keys(&public, &round.alice, &round.msg_b, &round.bob, &round.msg_a)
                else {
                    return false;
                };
                let formula = g.product([&round.alice.a, &round.bob.b, &public.w, &round.bob.a, &round.alice.b]);
                ka == kb && ka == formula
            })
            .collect()
    });
    let p2: Vec<Vec<bool>> = map_indices(setups.len(), Execution::Parallel, |i| {
        let (g, u, v, range) = &setups[i];
        let mut r = rng(derive_seed(4, &format!("p2/{i}")));
        let pub2 = PublicParams2 { params: g.clone(), w: random_element(&mut r, g, 8) };
        (0..50)
            .map(|t| {
                let s = derive_seed(4, &format!("p2/{i}/{t}"));
                let alice = p2_party_setup(&pub2, u, *range, &policy.with_seed(derive_seed(s, "alice")), 8).unwrap();
                let bob = p2_party_setup(&pub2, v, *range, &policy.with_seed(derive_seed(s, "bob")), 8).unwrap();
                let Ok(ex) = p2_exchange(&pub2, &alice, &bob, &policy.with_seed(s)) else { return false };
                let (a2, b1) = (ex.alice.peer_pick.clone().unwrap(), ex.bob.peer_pick.clone().unwrap());
                let formula = g.product([&alice.secret_anchor, &b1, &pub2.w, &a2, &bob.secret_anchor]);
                ex.key_a == ex.key_b && ex.key_a == SessionKey::Element(formula)
            })
            .collect()
    });
    both(tally("p1 runs", &p1.concat()), tally("p2 runs", &p2.concat()))
}

fn orbit_dh_check() -> Outcome {
    let small: Vec<bool> = map_indices(100, Execution::Parallel, |i| {
        let mut r = rng(derive_seed(5, &format!("pow/{i}")));
        let m = r.gen_range(1..=4);
        let g = random_params(&mut r, m, 3);
        let x = random_vector(&mut r, m, 9);
        let k = r.gen_range(0..=1024u64);
        g.phi_power(&x, k) == g.phi_power_naive(&x, k)
    });
    let mats = [
        vec![vec![1, 1, 0, 0], vec![0, 1, 1, 0], vec![0, 0, 1, 1], vec![0, 0, 0, 1]],
        vec![vec![1, 2, -1, 3], vec![0, 1, 3, -2], vec![0, 0, 1, 1], vec![0, 0, 0, 1]],
        vec![vec![0, 1, 0, 0], vec![0, 0, 1, 0], vec![0, 0, 0, 1], vec![1, 0, 0, 0]],
        vec![vec![0, -1, 0, 0], vec![1, 0, 0, 0], vec![0, 0, 0, 1], vec![0, 0, -1, 0]],
    ];
    let big: Vec<bool> = map_indices(40, Execution::Parallel, |i| {
        let mut r = rng(derive_seed(5, &format!("dh/{i}")));
        let g = GroupParams::from_i64s(&mats[i % mats.len()]).unwrap();
        let x = nonzero_vector(&mut r, 4, 9);
        let (ma, nb) = if i < 4 {
            (ORBIT_DH_BOUND, ORBIT_DH_BOUND)
        } else {
            (r.gen_range(0..=ORBIT_DH_BOUND), r.gen_range(0..=ORBIT_DH_BOUND))
        };
        match orbit_dh(&g, &x, ma, nb, ORBIT_DH_BOUND) {
            Ok(run) => {
                run.key == g.phi_power(&run.msg_b, ma)
                    && run.key == g.phi_power(&run.msg_a, nb)
                    && run.key == g.phi_power(&x, ma + nb)
            }
            Err(_) => false,
        }
    });
    both(tally("square-and-multiply vs naive (k ≤ 2^10)", &small), tally("m=4 runs up to 2^20", &big))
}

fn orbit_word(w: &GroupWord, k: i64) -> GroupWord {
    let (l, rr) = if k >= 0 { (Token::TInv, Token::T) } else { (Token::T, Token::TInv) };
    let n = k.unsigned_abs() as usize;
    let mut t = vec![l; n];
    t.extend(w.tokens());
    t.extend(vec![rr; n]);
    GroupWord::new(t)
}

fn grammar_soundness() -> Outcome {
    let res: Vec<(Vec<bool>, Vec<bool>)> = map_indices(20, Execution::Parallel, |i| {
        let mut r = rng(derive_seed(6, &format!("cyk/{i}")));
        let m = r.gen_range(1..=4);
        let g = random_params(&mut r, m, 3);
        let range = if i % 2 == 0 { OrbitRange::Integers } else { OrbitRange::Naturals };
        let u = nonzero_vector(&mut r, m, 3);
        let w = g.vector_word(&u, 64).unwrap();
        let orbit = orbit_spec(&g, &w, range).unwrap();
        let inverted = SubsetSpec::new(orbit.grammar().invert(), g.clone()).unwrap();
        let closure = subgroup_closure(&orbit);
        let policy = SamplePolicy { max_length: 48, ..SamplePolicy::default() }.with_seed(i as u64);
        let mut sampled = Vec::new();
        let mut mutants = Vec::new();
        for (j, spec) in [&orbit, &inverted, &closure].into_iter().enumerate() {
            let cnf = CnfGrammar::from_grammar(spec.grammar());
            let sampler = spec.sampler();
            let mut rr = policy.with_seed(derive_seed(i as u64, &j.to_string())).rng();
            for _ in 0..(if j == 2 { 18 } else { 16 }) {
                let word = sampler.sample_with(&policy, &mut rr).unwrap();
                sampled.push(cnf.accepts(word.tokens()));
                // a sampled orbit word t^-k w t^k with k ≥ 1
                if j == 0 && matches!(word.tokens().first(), Some(Token::T | Token::TInv)) {
                    mutants.push(!cnf.accepts(&word.tokens()[1..]));
                }
            }
            if j == 0 {
                let lo = if range == OrbitRange::Integers { -12 } else { 1 };
                for k in (lo..=12).filter(|&k| k != 0) {
                    let word = orbit_word(&w, k);
                    sampled.push(cnf.accepts(word.tokens()));
                    mutants.push(!cnf.accepts(&word.tokens()[1..]));
                }
            }
        }
        (sampled, mutants)
    });
    let (s, m): (Vec<_>, Vec<_>) = res.into_iter().unzip();
    let s = s.concat();
    if s.len() < 1000 {
        return Err(format!("only {} words drawn", s.len()));
    }
    both(tally("words accepted", &s), tally("deletion mutants rejected", &m.concat()))
}

fn closure_containment() -> Outcome {
    let res: Vec<Vec<bool>> = map_indices(20, Execution::Parallel, |i| {
        let mut r = rng(derive_seed(7, &format!("closure/{i}")));
        let m = r.gen_range(1..=4);
        let g = random_params(&mut r, m, 3);
        let range = if i % 2 == 0 { OrbitRange::Integers } else { OrbitRange::Naturals };
        let u = nonzero_vector(&mut r, m, 2);
        let w = g.vector_word(&u, 64).unwrap();
        let spec = orbit_closure_spec(&g, &u, range).unwrap();
        // every conjugate in a sample then has depth at most 10
        let policy = SamplePolicy { max_length: 20 + w.len(), ..SamplePolicy::default() }.with_seed(i as u64);
        let sampler = spec.sampler();
        let mut rr = policy.rng();
        (0..50)
            .map(|_| {
                let (_, x) = spec.sample_element_with(&sampler, &policy, &mut rr).unwrap();
                let o = g.oracle_embed(&x);
                o.t_component() == 0 && lattice_member(&g, &o, &u, 10).is_member()
            })
            .collect()
    });
    tally("closure samples certified at K=10", &res.concat())
}

/// Is `b` in `span_Z(v)` with trivial `t`-part? Direct check for `M = I`.
fn in_span(b: &GroupElement, v: &IntVector) -> bool {
    if b.t_exponent() != 0 || b.p() != 0 {
        return false;
    }
    let (x, y) = (b.v().entries(), v.entries());
    let i = y.iter().position(|e| !e.is_zero()).unwrap();
    let (c, rem) = (&x[i] / &y[i], &x[i] % &y[i]);
    rem.is_zero() && x.iter().zip(y).all(|(a, e)| *a == &c * e)
}

/// Fewest `±u` steps after which `b = w^-1 a^-1 target` lies in `B`.
fn brute_force_min(public: &PublicParams1, target: &GroupElement, cap: usize) -> Option<usize> {
    let g = &public.params;
    let step = g.from_base(public.u.clone());
    let steps = [step.clone(), g.invert(&step)];
    let w_inv = g.invert(&public.w);
    let mut seen = BTreeSet::new();
    let mut frontier = vec![g.identity()];
    seen.insert(g.identity().v().clone());
    for d in 0..=cap {
        for a in &frontier {
            if in_span(&g.product([&w_inv, &g.invert(a), target]), &public.v) {
                return Some(d);
            }
        }
        let mut next = Vec::new();
        for a in &frontier {
            for s in &steps {
                let n = g.multiply(a, s);
                if seen.insert(n.v().clone()) {
                    next.push(n);
                }
            }
        }
        frontier = next;
    }
    None
}

fn attack_sanity() -> Outcome {
    let policy = SamplePolicy { max_length: 32, depth_cap: 3, terminal_bias: 0.8, seed: 0 };
    let res: Vec<Result<(), String>> = map_indices(100, Execution::Parallel, |i| {
        let seed = derive_seed(8, &format!("abelian/{i}"));
        let mut r = rng(seed);
        let m = r.gen_range(2..=3);
        let g =
            GroupParams::from_i64s(&(0..m).map(|a| (0..m).map(|b| i64::from(a == b)).collect()).collect::<Vec<_>>())
                .unwrap();
        let (u, v) = loop {
            let u = nonzero_vector(&mut r, m, 2);
            let v = nonzero_vector(&mut r, m, 2);
            let (a, b) = (u.entries(), v.entries());
            let dependent = (0..m).all(|x| (0..m).all(|y| &a[x] * &b[y] == &a[y] * &b[x]));
            if !dependent {
                break (u, v);
            }
        };
        let w = random_element(&mut r, &g, 6);
        let public =
            p1_setup(&g, &u, &v, &w, OrbitRange::Integers, &SpotCheck::default()).map_err(|e| e.to_string())?;
        let round =
            p1_round(&public, &policy.with_seed(derive_seed(seed, "a")), &policy.with_seed(derive_seed(seed, "b")))
                .map_err(|e| e.to_string())?;
        let bound = UnaryLength.length(&round.alice.a);
        let inst = AttackInstance::with_orbit_generators(public.clone(), round.msg_a.clone(), 2);
        let res = rst_greedy(&inst, &UnaryLength, &ResidualDistance, 4 * bound + 16);
        let brute = brute_force_min(&public, &round.msg_a, bound as usize + 1)
            .ok_or_else(|| format!("trial {i}: brute force found nothing within {}", bound + 1))?;
        if !res.success {
            return Err(format!("trial {i}: rst failed (bound {bound})"));
        }
        if res.iterations > bound + 1 || res.iterations > brute as u64 + 1 {
            return Err(format!("trial {i}: {} iterations, length(a1) = {bound}, brute force {brute}", res.iterations));
        }
        Ok(())
    });
    let fails: Vec<&String> = res.iter().filter_map(|r| r.as_ref().err()).collect();
    let walk = if fails.is_empty() {
        Ok("100/100 abelian targets within length(a1)+1".to_string())
    } else {
        Err(format!("{}/100 abelian targets; first failure: {}", 100 - fails.len(), fails[0]))
    };
    let grid = default_grid();
    let runs: Vec<String> = [Execution::Parallel, Execution::Parallel, Execution::Sequential]
        .into_iter()
        .map(|exec| run_experiments(&grid, 4, 2024, ExperimentConfig { exec, timing: false }).unwrap().to_csv())
        .collect();
    let sweep = if runs.iter().all(|c| *c == runs[0]) {
        Ok(format!("sweep byte-identical ({} bytes, 3 runs)", runs[0].len()))
    } else {
        Err("sweep output differs between runs".into())
    };
    both(walk, sweep)
}

fn roundtrip<T: serde::Serialize + serde::de::DeserializeOwned>(v: &T) -> bool {
    let s = wire::to_json(v);
    match wire::from_json::<T>(&s) {
        Ok(back) => wire::to_json(&back) == s,
        Err(_) => false,
    }
}

fn serialization() -> Outcome {
    let elems: Vec<Vec<bool>> = map_indices(20, Execution::Parallel, |i| {
        let mut r = rng(derive_seed(9, &format!("elem/{i}")));
        let m = r.gen_range(1..=4);
        let g = random_params(&mut r, m, 3);
        (0..50)
            .map(|_| {
                let x = random_element(&mut r, &g, 30);
                let s = wire::to_json(&ElementJson::from_element(&x));
                let back: ElementJson = wire::from_json(&s).unwrap();
                back.to_element(&g).ok() == Some(x) && wire::to_json(&back) == s
            })
            .collect()
    });
    let mut grammars = Vec::new();
    for (i, (g, u, v, range)) in protocol_setups().into_iter().enumerate() {
        for x in [&u, &v] {
            let w = g.vector_word(x, 64).unwrap();
            let orbit = orbit_spec(&g, &w, range).unwrap();
            let inv = orbit.grammar().invert();
            let closure = subgroup_closure(&orbit);
            for gr in [orbit.grammar(), &inv, closure.grammar(), &orbit.grammar().union(&inv)] {
                let j = GrammarJson::from_grammar(gr);
                let s = wire::to_json(&j);
                let back: GrammarJson = wire::from_json(&s).unwrap();
                grammars.push(back.to_grammar().ok().as_ref() == Some(gr) && wire::to_json(&back) == s);
            }
        }
        let _ = i;
    }
    let policy = SamplePolicy { max_length: 24, ..SamplePolicy::default() };
    let transcripts: Vec<bool> = map_indices(12, Execution::Parallel, |i| {
        let setups = protocol_setups();
        let (g, u, v, range) = &setups[i % setups.len()];
        let mut seeds = BTreeMap::new();
        seeds.insert("master".to_string(), i as u64);
        let t: Transcript = match i / setups.len() {
            0 => {
                let public = p1_setup(g, u, v, &g.stable_power(1), *range, &SpotCheck::default()).unwrap();
                let round =
                    p1_round(&public, &policy.with_seed(2 * i as u64), &policy.with_seed(2 * i as u64 + 1)).unwrap();
                let keys = p1_keys(&public, &round.alice, &round.msg_b, &round.bob, &round.msg_a).unwrap();
                wire::p1_transcript(&public, &round, &keys, seeds).unwrap()
            }
            1 => {
                let pub2 = PublicParams2 { params: g.clone(), w: g.stable_power(-1) };
                let a = p2_party_setup(&pub2, u, *range, &policy.with_seed(i as u64), 4).unwrap();
                let b = p2_party_setup(&pub2, v, *range, &policy.with_seed(i as u64 + 100), 4).unwrap();
                let ex = p2_exchange(&pub2, &a, &b, &policy.with_seed(i as u64)).unwrap();
                wire::p2_transcript(&pub2, &ex, seeds).unwrap()
            }
            _ => {
                let x = u.clone();
                let run = orbit_dh(g, &x, 5, 7, ORBIT_DH_BOUND).unwrap();
                wire::orbit_dh_transcript(g, &x, &run, seeds).unwrap()
            }
        };
        roundtrip(&t) && t.validate().is_ok() && t.keys_agree().unwrap_or(false)
    });
    // fixed documents
    let fixed = [
        r#"{"p":1,"v":["3","-7"],"q":0}"#,
        r#"{"nonterminals":["S","A"],"start":"S","rules":[{"lhs":"S","rhs":["t^-1","S","t"]},{"lhs":"S","rhs":["x1"]},{"lhs":"A","rhs":[]}]}"#,
    ];
    let fixed_ok = vec![
        wire::from_json::<ElementJson>(fixed[0]).map(|e| wire::to_json(&e) == fixed[0]).unwrap_or(false),
        wire::from_json::<GrammarJson>(fixed[1]).map(|e| wire::to_json(&e) == fixed[1]).unwrap_or(false),
    ];
    let all_big = BigInt::from(1u8) << 200u32;
    let huge = ElementJson { p: 0, v: vec![all_big.to_string(), (-all_big.abs()).to_string()], q: 0 };
    let mut rest = fixed_ok;
    rest.push(roundtrip(&huge));
    both(
        both(tally("elements", &elems.concat()), tally("grammars", &grammars)),
        both(tally("transcripts", &transcripts), tally("fixed documents", &rest)),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("oracle equivalence", 10, oracle_equivalence),
        ("group axioms", 10, group_axioms),
        ("orbit commutation", 20, commutation),
        ("protocol correctness", 30, protocol_correctness),
        ("orbit Diffie-Hellman", 5, orbit_dh_check),
        ("grammar soundness", 10, grammar_soundness),
        ("closure containment", 10, closure_containment),
        ("attack sanity", 60, attack_sanity),
        ("serialization round-trip", 60, serialization),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let in_time = elapsed <= Duration::from_secs(limit);
        let (ok, detail) = match outcome {
            Ok(d) => (in_time, d),
            Err(d) => (false, d),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {}: {} {name} — {detail} [{:.2}s, limit {limit}s{}]",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            if in_time { "" } else { ", exceeded" }
        );
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
