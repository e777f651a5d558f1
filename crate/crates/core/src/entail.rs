//! Deciding `Σ ⊨_K τ`.
//!
//! Weakly cancellative monoids are handled by the ⊕-chase over ℕ under the
//! closure of `Σ` with weak symmetry; weakly absorptive monoids by the
//! classical chase. A positive answer carries a checked derivation, a negative
//! one a countermodel over the requested monoid that has been re-verified.

use crate::chase::{
    canonical_start_classical, canonical_start_plus, classical_chase, plus_chase,
    reflexivity_instances, ChaseConfig, ChaseTrace,
};
use crate::error::{Error, Result};
use crate::ind::{satisfies, Ind};
use crate::infer::{derives, saturate, DerivationProof, RuleSystem, Rules};
use crate::kdb::{KDatabase, Schema};
use crate::monoid::{Element, MonoidSpec, PropertyReport, DEFAULT_K_BOUND};
use num_bigint::BigUint;
use serde_json::{json, Value};
use std::collections::BTreeSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    ClassicalChase,
    PlusChase,
    /// `Σ` was extended by every balance IND before chasing.
    BalancedAugmentation,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::ClassicalChase => "classical_chase",
            Method::PlusChase => "plus_chase",
            Method::BalancedAugmentation => "balanced_augmentation",
        }
    }
}

/// How a countermodel was obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Construction {
    /// The ⊕-chase result mapped through `n ↦ n·b`.
    PlusChaseEmbed {
        generator: Element,
    },
    /// The classical chase result with every tuple weighted by an idempotent.
    SAEmbedding {
        idempotent: Element,
    },
    /// The classical chase result with tuple `t` weighted `a_{n − deg(t)}`.
    CAStratified {
        chain: Vec<Element>,
    },
    WACase1 {
        a: Element,
        b: Element,
    },
    WACase2 {
        b: Element,
        top: Element,
    },
}

impl Construction {
    pub fn name(&self) -> &'static str {
        match self {
            Construction::PlusChaseEmbed { .. } => "plus_chase_embed",
            Construction::SAEmbedding { .. } => "sa_embedding",
            Construction::CAStratified { .. } => "ca_stratified",
            Construction::WACase1 { .. } => "wa_case1",
            Construction::WACase2 { .. } => "wa_case2",
        }
    }

    fn to_json(&self, m: &MonoidSpec) -> Value {
        let r = |e: &Element| Value::String(m.render(e));
        let mut v = json!({"kind": self.name()});
        match self {
            Construction::PlusChaseEmbed { generator } => v["generator"] = r(generator),
            Construction::SAEmbedding { idempotent } => v["idempotent"] = r(idempotent),
            Construction::CAStratified { chain } => {
                v["chain"] = Value::Array(chain.iter().map(r).collect())
            }
            Construction::WACase1 { a, b } => {
                v["a"] = r(a);
                v["b"] = r(b);
            }
            Construction::WACase2 { b, top } => {
                v["b"] = r(b);
                v["top"] = r(top);
            }
        }
        v
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Countermodel {
    pub database: KDatabase,
    pub construction: Construction,
}

impl Countermodel {
    pub fn to_json(&self) -> Value {
        json!({
            "construction": self.construction.to_json(self.database.monoid()),
            "database": self.database.to_json(),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Evidence {
    Proof(DerivationProof),
    Countermodel(Countermodel),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntailmentVerdict {
    pub entailed: bool,
    pub method: Method,
    pub evidence: Evidence,
}

impl EntailmentVerdict {
    pub fn proof(&self) -> Option<&DerivationProof> {
        match &self.evidence {
            Evidence::Proof(p) => Some(p),
            Evidence::Countermodel(_) => None,
        }
    }

    pub fn countermodel(&self) -> Option<&Countermodel> {
        match &self.evidence {
            Evidence::Countermodel(c) => Some(c),
            Evidence::Proof(_) => None,
        }
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({"entailed": self.entailed, "method": self.method.name()});
        match &self.evidence {
            Evidence::Proof(p) => v["proof"] = p.to_json(),
            Evidence::Countermodel(c) => v["countermodel"] = c.to_json(),
        }
        v
    }
}

/// Knobs for [`decide_entailment`].
#[derive(Clone, Debug, Default)]
pub struct EntailOptions {
    /// Restrict attention to balanced databases.
    pub balanced: bool,
    pub chase: ChaseConfig,
    /// Overrides the monoid's own classification.
    pub report: Option<PropertyReport>,
    /// Generator `b` for weakly cancellative countermodels (default: a fixed
    /// nonzero element).
    pub generator: Option<Element>,
    /// Absorptive chain for countably absorptive monoids without a nonzero
    /// idempotent.
    pub chain: Option<Vec<Element>>,
}

/// `Σ` extended by `S[] ⊆ R[]` for all distinct relations named in `Σ` or `τ`.
pub fn balance_augmentation(sigma: &[Ind], tau: &Ind) -> Vec<Ind> {
    let names = mentioned_relations(sigma, tau);
    let mut out: Vec<Ind> = sigma.to_vec();
    for s in &names {
        for r in &names {
            if s != r {
                let b = Ind::empty(s.clone(), r.clone());
                if !out.contains(&b) {
                    out.push(b);
                }
            }
        }
    }
    out
}

fn mentioned_relations(sigma: &[Ind], tau: &Ind) -> BTreeSet<String> {
    sigma
        .iter()
        .chain(std::iter::once(tau))
        .flat_map(|i| [i.lhs_rel.clone(), i.rhs_rel.clone()])
        .collect()
}

/// Checks `db ⊨ Σ`, `db ⊭ τ`, and balance when requested.
pub fn verify_countermodel(
    db: &KDatabase,
    sigma: &[Ind],
    tau: &Ind,
    balanced: bool,
) -> std::result::Result<(), String> {
    for s in sigma {
        match satisfies(db, s) {
            Ok(true) => {}
            Ok(false) => return Err(format!("violates `{s}`")),
            Err(e) => return Err(e.to_string()),
        }
    }
    match satisfies(db, tau) {
        Ok(false) => {}
        Ok(true) => return Err(format!("satisfies `{tau}`")),
        Err(e) => return Err(e.to_string()),
    }
    if balanced && !db.is_balanced() {
        return Err("is not balanced".into());
    }
    Ok(())
}

fn verified(
    db: KDatabase,
    construction: Construction,
    sigma: &[Ind],
    tau: &Ind,
    balanced: bool,
) -> Result<Countermodel> {
    match verify_countermodel(&db, sigma, tau, balanced) {
        Ok(()) => Ok(Countermodel {
            database: db,
            construction,
        }),
        Err(reason) => Err(Error::CountermodelRejected {
            construction: construction.name().into(),
            reason,
        }),
    }
}

fn classify_for_entailment(m: &MonoidSpec) -> Result<PropertyReport> {
    m.classify(DEFAULT_K_BOUND)
        .map_err(|e| Error::UnclassifiedMonoid(format!("{}: {e}", m.name())))
}

/// Decides `Σ ⊨_K τ` (over balanced databases when requested).
///
/// The problem is posed over the relations mentioned in `Σ` and `τ`, with
/// their attributes taken from `schema`.
pub fn decide_entailment(
    sigma: &[Ind],
    tau: &Ind,
    m: &MonoidSpec,
    schema: &Schema,
    opts: &EntailOptions,
) -> Result<EntailmentVerdict> {
    let names = mentioned_relations(sigma, tau);
    let schema = schema.restrict(names.iter().map(String::as_str))?;
    for s in sigma.iter().chain(std::iter::once(tau)) {
        s.validate(&schema)?;
    }
    let report = match &opts.report {
        Some(r) => r.clone(),
        None => classify_for_entailment(m)?,
    };
    if !report.positive {
        return Err(Error::UnclassifiedMonoid(format!(
            "{} is not positive",
            m.name()
        )));
    }
    let augmented = if opts.balanced {
        balance_augmentation(sigma, tau)
    } else {
        sigma.to_vec()
    };
    let wc = report.weakly_cancellative;
    let method = match (opts.balanced, wc) {
        (true, _) => Method::BalancedAugmentation,
        (false, true) => Method::PlusChase,
        (false, false) => Method::ClassicalChase,
    };
    let rules = match (wc, opts.balanced) {
        (true, b) => Rules {
            weak_symmetry: true,
            balance: b,
            ..Rules::default()
        },
        (false, b) => Rules {
            balance: b,
            ..Rules::default()
        },
    };

    let entailed_with = |proof: Option<DerivationProof>| -> Result<EntailmentVerdict> {
        let proof = proof.ok_or_else(|| {
            Error::Inconsistent(format!(
                "`{tau}` holds in the canonical model but has no derivation"
            ))
        })?;
        Ok(EntailmentVerdict {
            entailed: true,
            method,
            evidence: Evidence::Proof(proof),
        })
    };
    let refuted_with = |cm: Countermodel| EntailmentVerdict {
        entailed: false,
        method,
        evidence: Evidence::Countermodel(cm),
    };

    if wc {
        let trace = wc_canonical_chase(&augmented, tau, &schema, &opts.chase)?;
        if satisfies(&trace.result, tau)? {
            return entailed_with(derives(sigma, tau, rules, &schema)?);
        }
        let b = match &opts.generator {
            Some(b) => b.clone(),
            None => m
                .some_nonzero()
                .ok_or_else(|| Error::UnsupportedMonoid(format!("{} is trivial", m.name())))?,
        };
        let db = embed(&trace.result, m, &b)?;
        let cm = verified(
            db,
            Construction::PlusChaseEmbed { generator: b },
            &augmented,
            tau,
            opts.balanced,
        )?;
        return Ok(refuted_with(cm));
    }

    let closure = saturate(&augmented, RuleSystem::Standard, &schema)?;
    let start = canonical_start_classical(tau, &schema)?;
    let chased = classical_chase(&start, closure.as_slice())?;
    if satisfies(&chased.result, tau)? {
        return entailed_with(derives(sigma, tau, rules, &schema)?);
    }

    let cm = if report.self_absorptive {
        let b = m.find_idempotent()?.ok_or_else(|| {
            Error::Inconsistent(format!(
                "{} is declared self absorptive but has no idempotent",
                m.name()
            ))
        })?;
        build_countermodel_sa(&augmented, tau, m, &b, &schema)?
    } else if report.countably_absorptive {
        let chain = opts.chain.clone().ok_or_else(|| {
            Error::UnsupportedMonoid(format!(
                "{} is countably absorptive without a known idempotent; supply an absorptive chain",
                m.name()
            ))
        })?;
        build_countermodel_ca(&augmented, tau, m, &chain, &schema)?
    } else {
        let (a, b) = m.find_wa_pair()?.ok_or_else(|| {
            Error::UnsupportedMonoid(format!("no absorptive pair found in {}", m.name()))
        })?;
        match m.find_eventual_period(&b) {
            Err(_) => {
                build_countermodel_wa_case1(&augmented, tau, m, &a, &b, &opts.chase, &schema)?
            }
            Ok(_) => build_countermodel_wa_case2(&augmented, tau, m, &b, &schema)?,
        }
    };
    if let Err(reason) = verify_countermodel(&cm.database, &augmented, tau, opts.balanced) {
        return Err(Error::CountermodelRejected {
            construction: cm.construction.name().into(),
            reason,
        });
    }
    Ok(refuted_with(cm))
}

/// The ⊕-chase of the canonical ℕ-database for `tau` under the
/// weak-symmetry closure of `sigma`.
pub fn wc_canonical_chase(
    sigma: &[Ind],
    tau: &Ind,
    schema: &Schema,
    cfg: &ChaseConfig,
) -> Result<ChaseTrace> {
    let closure = saturate(sigma, RuleSystem::StandardWS, schema)?;
    let start = canonical_start_plus(tau, schema)?;
    let trace = plus_chase(&start, closure.as_slice(), cfg)?;
    if !trace.terminated() {
        return Err(Error::ChaseBudgetExceeded(cfg.step_limit));
    }
    Ok(trace)
}

/// Maps an ℕ-database through `n ↦ n·b`.
fn embed(db: &KDatabase, m: &MonoidSpec, b: &Element) -> Result<KDatabase> {
    m.validate(b)?;
    let mut failure = None;
    let out = db.map_weights(m.clone(), |w| match w {
        Element::Nat(n) => m.multiple(b, n),
        other => {
            failure = Some(format!("{other:?}"));
            m.zero()
        }
    });
    match failure {
        Some(w) => Err(Error::Inconsistent(format!(
            "expected natural weights, found {w}"
        ))),
        None => Ok(out),
    }
}

fn require_not_derivable(
    sigma: &[Ind],
    tau: &Ind,
    system: RuleSystem,
    schema: &Schema,
) -> Result<()> {
    tau.validate(schema)?;
    if tau.is_reflexive() || saturate(sigma, system, schema)?.derives(tau) {
        return Err(Error::NotRefutable(tau.to_string()));
    }
    Ok(())
}

/// Countermodel for a weakly cancellative monoid: the ⊕-chase result over ℕ,
/// embedded by `n ↦ n·b`.
pub fn build_countermodel_wc(
    sigma: &[Ind],
    tau: &Ind,
    m: &MonoidSpec,
    b: &Element,
    cfg: &ChaseConfig,
    schema: &Schema,
) -> Result<Countermodel> {
    let report = m.classify(DEFAULT_K_BOUND)?;
    if !report.weakly_cancellative {
        return Err(Error::UnsupportedMonoid(format!(
            "{} is not weakly cancellative",
            m.name()
        )));
    }
    m.validate(b)?;
    if m.is_zero(b) {
        return Err(Error::InvalidElement {
            monoid: m.name(),
            value: "0 (the generator must be nonzero)".into(),
        });
    }
    require_not_derivable(sigma, tau, RuleSystem::StandardWS, schema)?;
    let trace = wc_canonical_chase(sigma, tau, schema, cfg)?;
    let db = embed(&trace.result, m, b)?;
    verified(
        db,
        Construction::PlusChaseEmbed {
            generator: b.clone(),
        },
        sigma,
        tau,
        false,
    )
}

fn check_chain(m: &MonoidSpec, chain: &[Element], needed: usize) -> Result<()> {
    if chain.len() < needed {
        return Err(Error::InvalidChain(format!(
            "{needed} elements needed, {} given",
            chain.len()
        )));
    }
    for (i, a) in chain.iter().enumerate() {
        m.validate(a)
            .map_err(|e| Error::InvalidChain(e.to_string()))?;
        if m.is_zero(a) {
            return Err(Error::InvalidChain(format!("a_{i} is zero")));
        }
    }
    for (i, pair) in chain.windows(2).enumerate() {
        if m.op(&pair[0], &pair[1]) != pair[1] {
            return Err(Error::InvalidChain(format!(
                "a_{i} ⊕ a_{} = {} ≠ {}",
                i + 1,
                m.render(&m.op(&pair[0], &pair[1])),
                m.render(&pair[1])
            )));
        }
    }
    Ok(())
}

fn stratified(
    sigma: &[Ind],
    tau: &Ind,
    m: &MonoidSpec,
    chain: &[Element],
    schema: &Schema,
) -> Result<KDatabase> {
    let n = tau.arity();
    let start = canonical_start_classical(tau, schema)?;
    let chased = classical_chase(&start, sigma)?;
    let mut out = KDatabase::new(schema.clone(), m.clone());
    for (name, rel) in chased.result.relations() {
        for (t, _) in rel.iter() {
            let i = n.checked_sub(t.degree()).ok_or_else(|| {
                Error::Inconsistent(format!("chased tuple {t} has degree above {n}"))
            })?;
            out.add(name, t.clone(), &chain[i])?;
        }
    }
    Ok(out)
}

/// Countermodel over a countably absorptive monoid: the classical chase of
/// the canonical database, tuple `t` weighted `a_{n − deg(t)}` with `n = ar(τ)`.
pub fn build_countermodel_ca(
    sigma: &[Ind],
    tau: &Ind,
    m: &MonoidSpec,
    chain: &[Element],
    schema: &Schema,
) -> Result<Countermodel> {
    check_chain(m, chain, tau.arity() + 1)?;
    require_not_derivable(sigma, tau, RuleSystem::Standard, schema)?;
    let chain = chain[..=tau.arity()].to_vec();
    let db = stratified(sigma, tau, m, &chain, schema)?;
    verified(db, Construction::CAStratified { chain }, sigma, tau, false)
}

/// Countermodel over a self-absorptive monoid: the classical chase of the
/// canonical database with every tuple weighted by the idempotent `b`.
pub fn build_countermodel_sa(
    sigma: &[Ind],
    tau: &Ind,
    m: &MonoidSpec,
    b: &Element,
    schema: &Schema,
) -> Result<Countermodel> {
    m.validate(b)?;
    if m.is_zero(b) || m.op(b, b) != *b {
        return Err(Error::InvalidChain(format!(
            "{} is not a nonzero idempotent",
            m.render(b)
        )));
    }
    require_not_derivable(sigma, tau, RuleSystem::Standard, schema)?;
    let chain = vec![b.clone(); tau.arity() + 1];
    let db = stratified(sigma, tau, m, &chain, schema)?;
    verified(
        db,
        Construction::SAEmbedding {
            idempotent: b.clone(),
        },
        sigma,
        tau,
        false,
    )
}

/// The classical chase of the canonical database under the standard closure
/// of `sigma` together with every reflexivity instance, split into the tuples
/// of full degree `ar(τ)` and the rest.
fn degree_split(sigma: &[Ind], tau: &Ind, schema: &Schema) -> Result<(KDatabase, KDatabase)> {
    let mut inds = saturate(sigma, RuleSystem::Standard, schema)?
        .as_slice()
        .to_vec();
    inds.extend(reflexivity_instances(schema));
    let start = canonical_start_classical(tau, schema)?;
    let chased = classical_chase(&start, &inds)?.result;
    let n = tau.arity();
    let mut full = KDatabase::new(schema.clone(), MonoidSpec::Boolean);
    let mut lower = KDatabase::new(schema.clone(), MonoidSpec::Boolean);
    for (name, rel) in chased.relations() {
        for (t, w) in rel.iter() {
            let part = if t.degree() == n {
                &mut full
            } else {
                &mut lower
            };
            part.add(name, t.clone(), w)?;
        }
    }
    Ok((full, lower))
}

/// Countermodel for a weakly absorptive, not countably absorptive monoid whose
/// submonoid generated by `b` is infinite: full-degree tuples weighted `a`,
/// plus the ⊕-chase (over multiples of `b`) of the lower-degree part.
pub fn build_countermodel_wa_case1(
    sigma: &[Ind],
    tau: &Ind,
    m: &MonoidSpec,
    a: &Element,
    b: &Element,
    cfg: &ChaseConfig,
    schema: &Schema,
) -> Result<Countermodel> {
    m.check_wa_pair(a, b)?;
    if m.find_eventual_period(b).is_ok() {
        return Err(Error::InvalidPair(format!(
            "the multiples of {} repeat, so they are not ordered like ℕ",
            m.render(b)
        )));
    }
    require_not_derivable(sigma, tau, RuleSystem::Standard, schema)?;
    let (full, lower) = degree_split(sigma, tau, schema)?;

    let ws = saturate(sigma, RuleSystem::StandardWS, schema)?;
    let mut ws_inds = ws.as_slice().to_vec();
    ws_inds.extend(reflexivity_instances(schema));
    let lower_closed = classical_chase(&lower, &ws_inds)?.result;
    let lower_nat = lower_closed.map_weights(MonoidSpec::Naturals, |_| Element::nat(1));
    let trace = plus_chase(&lower_nat, ws.as_slice(), cfg)?;
    if !trace.terminated() {
        return Err(Error::ChaseBudgetExceeded(cfg.step_limit));
    }
    let top = embed(&trace.result, m, b)?;
    let bottom = full.map_weights(m.clone(), |_| a.clone());
    let db = bottom.db_add(&top)?;
    verified(
        db,
        Construction::WACase1 {
            a: a.clone(),
            b: b.clone(),
        },
        sigma,
        tau,
        false,
    )
}

/// Countermodel for a weakly absorptive monoid whose submonoid generated by
/// `b` is eventually periodic: full-degree tuples weighted `b`, lower-degree
/// tuples weighted `d = m₀·b`, which dominates every multiple of `b`.
pub fn build_countermodel_wa_case2(
    sigma: &[Ind],
    tau: &Ind,
    m: &MonoidSpec,
    b: &Element,
    schema: &Schema,
) -> Result<Countermodel> {
    let (index, period) = m.find_eventual_period(b).map_err(|e| match e {
        Error::UnsupportedMonoid(msg) => Error::NotEventuallyPeriodic(msg),
        other => other,
    })?;
    let d = m.multiple(b, &BigUint::from(index));
    for k in 0..index + period {
        let c = m.multiple(b, &BigUint::from(k));
        if !m.leq(&c, &d) {
            return Err(Error::DominanceFailure(format!(
                "{k}·{} = {} is not below {}",
                m.render(b),
                m.render(&c),
                m.render(&d)
            )));
        }
    }
    require_not_derivable(sigma, tau, RuleSystem::Standard, schema)?;
    let (full, lower) = degree_split(sigma, tau, schema)?;
    let db = full
        .map_weights(m.clone(), |_| b.clone())
        .db_add(&lower.map_weights(m.clone(), |_| d.clone()))?;
    verified(
        db,
        Construction::WACase2 {
            b: b.clone(),
            top: d,
        },
        sigma,
        tau,
        false,
    )
}
