//! The two subset key-exchange protocols and orbit Diffie–Hellman.
//!
//! Protocol 1 publishes grammars for two pairwise commuting subsets `S`, `T`
//! (closures of stable-letter orbits of `u` and `v`); each party picks one
//! element of each. Protocol 2 lets every party publish a grammar for a
//! subset of the centralizer of a private anchor. Orbit Diffie–Hellman works
//! in `Z^m` with the endomorphism `v ↦ v·M`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupParams, DEFAULT_EXPANSION_CAP};
use crate::linalg::IntVector;
use crate::sample::SamplePolicy;
use crate::seed::derive_seed;
use crate::subset::{orbit_spec, subgroup_closure, OrbitRange, SubsetSpec};

/// Default exponent bound for orbit Diffie–Hellman.
pub const ORBIT_DH_BOUND: u64 = 1 << 20;

/// How setup-time commutation checks sample their elements.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpotCheck {
    pub pairs: usize,
    pub policy: SamplePolicy,
}

impl Default for SpotCheck {
    fn default() -> Self {
        SpotCheck { pairs: 32, policy: SamplePolicy::default().with_seed(0x5eed) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SessionKey {
    Element(GroupElement),
    Vector(IntVector),
}

/// Closure of the orbit of the base vector `u`.
pub fn orbit_closure_spec(params: &GroupParams, u: &IntVector, range: OrbitRange) -> Result<SubsetSpec> {
    if u.dim() != params.dim() {
        return Err(Error::DimensionMismatch { expected: params.dim(), found: u.dim() });
    }
    if u.is_zero() {
        return Err(Error::DegenerateOrbit);
    }
    let w = params.vector_word(u, DEFAULT_EXPANSION_CAP)?;
    Ok(subgroup_closure(&orbit_spec(params, &w, range)?))
}

/// Checks `a·b = b·a` on `pairs` sampled pairs `(a, b) ∈ A × B`.
pub fn spot_check_commuting(a: &SubsetSpec, b: &SubsetSpec, check: &SpotCheck) -> Result<()> {
    let params = a.params();
    let (sa, sb) = (a.sampler(), b.sampler());
    let mut rng = check.policy.rng();
    for i in 0..check.pairs {
        let (_, x) = a.sample_element_with(&sa, &check.policy, &mut rng)?;
        let (_, y) = b.sample_element_with(&sb, &check.policy, &mut rng)?;
        if params.multiply(&x, &y) != params.multiply(&y, &x) {
            return Err(Error::CommutationFailure(format!("pair {i}: {x} and {y}")));
        }
    }
    Ok(())
}

/// Checks that `anchor` commutes with `samples` elements of `spec`.
pub fn spot_check_centralizes<R: Rng>(
    anchor: &GroupElement,
    spec: &SubsetSpec,
    samples: usize,
    policy: &SamplePolicy,
    rng: &mut R,
) -> Result<()> {
    let params = spec.params();
    let sampler = spec.sampler();
    for i in 0..samples {
        let (_, y) = spec.sample_element_with(&sampler, policy, rng)?;
        if params.multiply(anchor, &y) != params.multiply(&y, anchor) {
            return Err(Error::CommutationFailure(format!("sample {i}: {y} vs anchor {anchor}")));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct PublicParams1 {
    pub params: GroupParams,
    pub u: IntVector,
    pub v: IntVector,
    pub range: OrbitRange,
    pub w: GroupElement,
    pub spec_a: SubsetSpec,
    pub spec_b: SubsetSpec,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartySecret1 {
    pub a: GroupElement,
    pub b: GroupElement,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct P1Round {
    pub alice: PartySecret1,
    pub msg_a: GroupElement,
    pub bob: PartySecret1,
    pub msg_b: GroupElement,
}

pub fn p1_setup(
    params: &GroupParams,
    u: &IntVector,
    v: &IntVector,
    w: &GroupElement,
    range: OrbitRange,
    check: &SpotCheck,
) -> Result<PublicParams1> {
    if w.v().dim() != params.dim() || !params.is_reduced(w.p(), w.v(), w.q()) {
        return Err(Error::NotReduced);
    }
    let spec_a = orbit_closure_spec(params, u, range)?;
    let spec_b = orbit_closure_spec(params, v, range)?;
    spot_check_commuting(&spec_a, &spec_b, check)?;
    Ok(PublicParams1 { params: params.clone(), u: u.clone(), v: v.clone(), range, w: w.clone(), spec_a, spec_b })
}

fn pick_pair(pub1: &PublicParams1, policy: &SamplePolicy) -> Result<PartySecret1> {
    let a = pub1.spec_a.sample_element(&policy.with_seed(derive_seed(policy.seed, "subset-a")))?;
    let b = pub1.spec_b.sample_element(&policy.with_seed(derive_seed(policy.seed, "subset-b")))?;
    Ok(PartySecret1 { a, b })
}

/// Alice sends `a1·w·b1`, Bob sends `b2·w·a2`.
pub fn p1_round(pub1: &PublicParams1, policy_a: &SamplePolicy, policy_b: &SamplePolicy) -> Result<P1Round> {
    let g = &pub1.params;
    let alice = pick_pair(pub1, policy_a)?;
    let bob = pick_pair(pub1, policy_b)?;
    let msg_a = g.product([&alice.a, &pub1.w, &alice.b]);
    let msg_b = g.product([&bob.b, &pub1.w, &bob.a]);
    Ok(P1Round { alice, msg_a, bob, msg_b })
}

/// `K_A = a1·(b2 w a2)·b1` and `K_B = b2·(a1 w b1)·a2`.
pub fn p1_keys(
    pub1: &PublicParams1,
    alice: &PartySecret1,
    msg_b: &GroupElement,
    bob: &PartySecret1,
    msg_a: &GroupElement,
) -> Result<(SessionKey, SessionKey)> {
    let g = &pub1.params;
    let ka = g.product([&alice.a, msg_b, &alice.b]);
    let kb = g.product([&bob.b, msg_a, &bob.a]);
    if ka != kb {
        return Err(Error::KeyMismatch);
    }
    Ok((SessionKey::Element(ka), SessionKey::Element(kb)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct PublicParams2 {
    pub params: GroupParams,
    pub w: GroupElement,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Party2State {
    pub secret_anchor: GroupElement,
    pub published_spec: SubsetSpec,
    pub peer_pick: Option<GroupElement>,
}

/// Draws an anchor from the closure of the orbit of `u` and publishes that
/// same closure, which lies in the anchor's centralizer.
pub fn p2_party_setup(
    pub2: &PublicParams2,
    u: &IntVector,
    range: OrbitRange,
    policy: &SamplePolicy,
    check_samples: usize,
) -> Result<Party2State> {
    let spec = orbit_closure_spec(&pub2.params, u, range)?;
    let mut rng = policy.rng();
    let sampler = spec.sampler();
    let (_, anchor) = spec.sample_element_with(&sampler, policy, &mut rng)?;
    spot_check_centralizes(&anchor, &spec, check_samples, policy, &mut rng)?;
    Ok(Party2State { secret_anchor: anchor, published_spec: spec, peer_pick: None })
}

#[derive(Clone, Debug, PartialEq)]
pub struct P2Exchange {
    pub alice: Party2State,
    pub bob: Party2State,
    pub msg_a: GroupElement,
    pub msg_b: GroupElement,
    pub key_a: SessionKey,
    pub key_b: SessionKey,
}

/// Alice picks `a2` from Bob's subset and sends `a1·w·a2`; Bob picks `b1`
/// from Alice's subset and sends `b1·w·b2`.
pub fn p2_exchange(
    pub2: &PublicParams2,
    alice: &Party2State,
    bob: &Party2State,
    policy: &SamplePolicy,
) -> Result<P2Exchange> {
    let g = &pub2.params;
    let a2 = bob.published_spec.sample_element(&policy.with_seed(derive_seed(policy.seed, "alice")))?;
    let b1 = alice.published_spec.sample_element(&policy.with_seed(derive_seed(policy.seed, "bob")))?;
    let a1 = &alice.secret_anchor;
    let b2 = &bob.secret_anchor;
    let msg_a = g.product([a1, &pub2.w, &a2]);
    let msg_b = g.product([&b1, &pub2.w, b2]);
    let key_a = g.product([a1, &msg_b, &a2]);
    let key_b = g.product([&b1, &msg_a, b2]);
    if key_a != key_b {
        return Err(Error::KeyMismatch);
    }
    let mut alice = alice.clone();
    alice.peer_pick = Some(a2);
    let mut bob = bob.clone();
    bob.peer_pick = Some(b1);
    Ok(P2Exchange { alice, bob, msg_a, msg_b, key_a: SessionKey::Element(key_a), key_b: SessionKey::Element(key_b) })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitDh {
    pub msg_a: IntVector,
    pub msg_b: IntVector,
    pub key: IntVector,
}

/// Alice sends `x·M^m`, Bob sends `x·M^n`; both derive `x·M^(m+n)`.
pub fn orbit_dh(params: &GroupParams, x: &IntVector, m_a: u64, n_b: u64, bound: u64) -> Result<OrbitDh> {
    if x.dim() != params.dim() {
        return Err(Error::DimensionMismatch { expected: params.dim(), found: x.dim() });
    }
    for e in [m_a, n_b] {
        if e > bound {
            return Err(Error::ExponentBound { exponent: e, bound });
        }
    }
    let msg_a = params.phi_power(x, m_a);
    let msg_b = params.phi_power(x, n_b);
    let key_a = params.phi_power(&msg_b, m_a);
    let key_b = params.phi_power(&msg_a, n_b);
    if key_a != key_b {
        return Err(Error::KeyMismatch);
    }
    Ok(OrbitDh { msg_a, msg_b, key: key_a })
}
