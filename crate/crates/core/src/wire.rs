//! JSON encodings for matrices, elements, words, grammars and transcripts.
//!
//! Every type here has a fixed field order and a canonical rendering of its
//! integers (decimal strings, no sign on zero, no leading zeros), so parsing
//! an emitted document and emitting it again reproduces the same bytes.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::attack::AttackResult;
use crate::error::{Error, Result};
use crate::grammar::{CFGrammar, Rule, Symbol};
use crate::group::{GroupElement, GroupParams, GroupWord, Token};
use crate::linalg::{IntMatrix, IntVector};
use crate::protocol::{p1_setup, OrbitDh, P1Round, P2Exchange, PublicParams1, PublicParams2, SessionKey, SpotCheck};
use crate::subset::OrbitRange;

pub fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("wire types always serialize")
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("wire types always serialize")
}

pub fn from_json<T: DeserializeOwned>(s: &str) -> Result<T> {
    Ok(serde_json::from_str(s)?)
}

/// Parses a canonical decimal integer.
pub fn parse_int(s: &str) -> Result<BigInt> {
    let bad = || Error::InvalidInteger(s.to_string());
    let digits = s.strip_prefix('-').unwrap_or(s);
    let canonical = !digits.is_empty()
        && digits.bytes().all(|b| b.is_ascii_digit())
        && (digits == "0" || !digits.starts_with('0'))
        && s != "-0";
    if !canonical {
        return Err(bad());
    }
    s.parse().map_err(|_| bad())
}

pub fn vector_to_json(v: &IntVector) -> Vec<String> {
    v.entries().iter().map(ToString::to_string).collect()
}

pub fn vector_from_json(v: &[String], dim: usize) -> Result<IntVector> {
    if v.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
    }
    Ok(IntVector::new(v.iter().map(|s| parse_int(s)).collect::<Result<_>>()?))
}

pub fn word_to_json(w: &GroupWord) -> Vec<String> {
    w.to_strings()
}

pub fn word_from_json(w: &[String]) -> Result<GroupWord> {
    GroupWord::parse(w)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub m: usize,
    pub rows: Vec<Vec<i64>>,
}

impl MatrixJson {
    /// Fails if some entry does not fit in an `i64`.
    pub fn from_params(params: &GroupParams) -> Result<Self> {
        let rows = params
            .matrix()
            .rows()
            .iter()
            .map(|r| {
                r.iter()
                    .map(|x| x.to_i64().ok_or_else(|| Error::InvalidInteger(x.to_string())))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(MatrixJson { m: params.dim(), rows })
    }

    pub fn to_params(&self) -> Result<GroupParams> {
        if self.rows.len() != self.m {
            return Err(Error::DimensionMismatch { expected: self.m, found: self.rows.len() });
        }
        GroupParams::new(IntMatrix::from_i64s(&self.rows)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementJson {
    pub p: u64,
    pub v: Vec<String>,
    pub q: u64,
}

impl ElementJson {
    pub fn from_element(g: &GroupElement) -> Self {
        ElementJson { p: g.p(), v: vector_to_json(g.v()), q: g.q() }
    }

    /// Rejects wrong dimensions and non-reduced triples.
    pub fn to_element(&self, params: &GroupParams) -> Result<GroupElement> {
        let v = vector_from_json(&self.v, params.dim())?;
        params.element(self.p, v, self.q)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleJson {
    pub lhs: String,
    pub rhs: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrammarJson {
    pub nonterminals: Vec<String>,
    pub start: String,
    pub rules: Vec<RuleJson>,
}

impl GrammarJson {
    pub fn from_grammar(g: &CFGrammar) -> Self {
        GrammarJson {
            nonterminals: g.names().to_vec(),
            start: g.names()[g.start()].clone(),
            rules: g
                .rules()
                .iter()
                .map(|r| RuleJson {
                    lhs: g.names()[r.lhs].clone(),
                    rhs: r.rhs.iter().map(|s| g.symbol_name(s)).collect(),
                })
                .collect(),
        }
    }

    pub fn to_grammar(&self) -> Result<CFGrammar> {
        let index: BTreeMap<&str, usize> = self.nonterminals.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let lookup = |name: &str| {
            index.get(name).copied().ok_or_else(|| Error::Grammar(format!("undeclared nonterminal `{name}`")))
        };
        let start = lookup(&self.start)?;
        let mut rules = Vec::with_capacity(self.rules.len());
        for r in &self.rules {
            let rhs = r
                .rhs
                .iter()
                .map(|s| match index.get(s.as_str()) {
                    Some(&i) => Ok(Symbol::Nonterminal(i)),
                    None => s.parse::<Token>().map(Symbol::Terminal),
                })
                .collect::<Result<Vec<_>>>()?;
            rules.push(Rule { lhs: lookup(&r.lhs)?, rhs });
        }
        CFGrammar::new(self.nonterminals.clone(), start, rules)
    }
}

/// A protocol message or key: a group element or a vector of `Z^m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MessageJson {
    Element(ElementJson),
    Vector(Vec<String>),
}

impl MessageJson {
    pub fn from_key(k: &SessionKey) -> Self {
        match k {
            SessionKey::Element(g) => MessageJson::Element(ElementJson::from_element(g)),
            SessionKey::Vector(v) => MessageJson::Vector(vector_to_json(v)),
        }
    }

    pub fn to_key(&self, params: &GroupParams) -> Result<SessionKey> {
        Ok(match self {
            MessageJson::Element(e) => SessionKey::Element(e.to_element(params)?),
            MessageJson::Vector(v) => SessionKey::Vector(vector_from_json(v, params.dim())?),
        })
    }
}

/// Public parameters of a run. Which optional fields appear depends on the
/// protocol: `u`, `v`, `w`, `range`, `grammars` for protocol 1; `w` for
/// protocol 2 (grammars are the two published subsets); `x` for orbit
/// Diffie–Hellman.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsJson {
    pub matrix: MatrixJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w: Option<ElementJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub range: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grammars: Option<Vec<GrammarJson>>,
}

impl ParamsJson {
    pub fn bare(params: &GroupParams) -> Result<Self> {
        Ok(ParamsJson {
            matrix: MatrixJson::from_params(params)?,
            u: None,
            v: None,
            w: None,
            x: None,
            range: None,
            grammars: None,
        })
    }

    pub fn from_p1(pub1: &PublicParams1) -> Result<Self> {
        Ok(ParamsJson {
            u: Some(vector_to_json(&pub1.u)),
            v: Some(vector_to_json(&pub1.v)),
            w: Some(ElementJson::from_element(&pub1.w)),
            range: Some(pub1.range.to_string()),
            grammars: Some(vec![
                GrammarJson::from_grammar(pub1.spec_a.grammar()),
                GrammarJson::from_grammar(pub1.spec_b.grammar()),
            ]),
            ..Self::bare(&pub1.params)?
        })
    }

    pub fn group(&self) -> Result<GroupParams> {
        self.matrix.to_params()
    }

    fn field<'a, T>(f: &'a Option<T>, name: &str) -> Result<&'a T> {
        f.as_ref().ok_or_else(|| Error::Grammar(format!("missing parameter `{name}`")))
    }

    pub fn vector(&self, which: char) -> Result<IntVector> {
        let (f, name) = match which {
            'u' => (&self.u, "u"),
            'v' => (&self.v, "v"),
            _ => (&self.x, "x"),
        };
        vector_from_json(Self::field(f, name)?, self.matrix.m)
    }

    pub fn range(&self) -> Result<OrbitRange> {
        match &self.range {
            Some(r) => r.parse(),
            None => Ok(OrbitRange::default()),
        }
    }

    pub fn w(&self, params: &GroupParams) -> Result<GroupElement> {
        match &self.w {
            Some(w) => w.to_element(params),
            None => Ok(params.identity()),
        }
    }

    /// Rebuilds protocol-1 parameters; published grammars, when present,
    /// must equal the ones the construction produces.
    pub fn to_p1(&self, check: &SpotCheck) -> Result<PublicParams1> {
        let params = self.group()?;
        let pub1 = p1_setup(&params, &self.vector('u')?, &self.vector('v')?, &self.w(&params)?, self.range()?, check)?;
        if let Some(gs) = &self.grammars {
            let expect = [pub1.spec_a.grammar(), pub1.spec_b.grammar()];
            if gs.len() != 2 || gs.iter().zip(expect).any(|(j, g)| j.to_grammar().ok().as_ref() != Some(g)) {
                return Err(Error::Grammar("published grammars do not match u, v and range".into()));
            }
        }
        Ok(pub1)
    }

    pub fn to_p2(&self) -> Result<PublicParams2> {
        let params = self.group()?;
        let w = self.w(&params)?;
        Ok(PublicParams2 { params, w })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KeysJson {
    pub alice: MessageJson,
    pub bob: MessageJson,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Transcript {
    pub protocol: String,
    pub params: ParamsJson,
    pub messages: Vec<MessageJson>,
    pub keys: KeysJson,
    pub seeds: BTreeMap<String, u64>,
}

impl Transcript {
    /// Decodes both keys and reports whether they agree.
    pub fn keys_agree(&self) -> Result<bool> {
        let params = self.params.group()?;
        Ok(self.keys.alice.to_key(&params)? == self.keys.bob.to_key(&params)?)
    }

    /// Checks that every message and key decodes against the parameters.
    pub fn validate(&self) -> Result<()> {
        if !matches!(self.protocol.as_str(), "p1" | "p2" | "orbit-dh") {
            return Err(Error::Grammar(format!("unknown protocol `{}`", self.protocol)));
        }
        let params = self.params.group()?;
        for m in self.messages.iter().chain([&self.keys.alice, &self.keys.bob]) {
            m.to_key(&params)?;
        }
        if let Some(gs) = &self.params.grammars {
            for g in gs {
                g.to_grammar()?;
            }
        }
        Ok(())
    }
}

fn elem(g: &GroupElement) -> MessageJson {
    MessageJson::Element(ElementJson::from_element(g))
}

pub fn p1_transcript(
    pub1: &PublicParams1,
    round: &P1Round,
    keys: &(SessionKey, SessionKey),
    seeds: BTreeMap<String, u64>,
) -> Result<Transcript> {
    Ok(Transcript {
        protocol: "p1".into(),
        params: ParamsJson::from_p1(pub1)?,
        messages: vec![elem(&round.msg_a), elem(&round.msg_b)],
        keys: KeysJson { alice: MessageJson::from_key(&keys.0), bob: MessageJson::from_key(&keys.1) },
        seeds,
    })
}

pub fn p2_transcript(pub2: &PublicParams2, ex: &P2Exchange, seeds: BTreeMap<String, u64>) -> Result<Transcript> {
    Ok(Transcript {
        protocol: "p2".into(),
        params: ParamsJson {
            w: Some(ElementJson::from_element(&pub2.w)),
            grammars: Some(vec![
                GrammarJson::from_grammar(ex.alice.published_spec.grammar()),
                GrammarJson::from_grammar(ex.bob.published_spec.grammar()),
            ]),
            ..ParamsJson::bare(&pub2.params)?
        },
        messages: vec![elem(&ex.msg_a), elem(&ex.msg_b)],
        keys: KeysJson { alice: MessageJson::from_key(&ex.key_a), bob: MessageJson::from_key(&ex.key_b) },
        seeds,
    })
}

pub fn orbit_dh_transcript(
    params: &GroupParams,
    x: &IntVector,
    run: &OrbitDh,
    seeds: BTreeMap<String, u64>,
) -> Result<Transcript> {
    let key = MessageJson::Vector(vector_to_json(&run.key));
    Ok(Transcript {
        protocol: "orbit-dh".into(),
        params: ParamsJson { x: Some(vector_to_json(x)), ..ParamsJson::bare(params)? },
        messages: vec![
            MessageJson::Vector(vector_to_json(&run.msg_a)),
            MessageJson::Vector(vector_to_json(&run.msg_b)),
        ],
        keys: KeysJson { alice: key.clone(), bob: key },
        seeds,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttackResultJson {
    pub success: bool,
    pub recovered: Option<[ElementJson; 2]>,
    pub iterations: u64,
    pub best_score: f64,
    pub trace: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<f64>,
}

impl AttackResultJson {
    pub fn from_result(r: &AttackResult, timing: bool) -> Self {
        AttackResultJson {
            success: r.success,
            recovered: r.recovered.as_ref().map(|(a, b)| [ElementJson::from_element(a), ElementJson::from_element(b)]),
            iterations: r.iterations,
            best_score: r.best_score,
            trace: r.trace.clone(),
            elapsed_ms: timing.then_some(r.elapsed.as_secs_f64() * 1e3),
        }
    }
}
