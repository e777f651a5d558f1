//! The classical IND chase and the ⊕-chase.
//!
//! Both chases act on `R[Ā] ⊆ S[B̄]` at a point `ā` through a single `S`-tuple
//! that maps `B̄` to `ā` and every other attribute to `*`. The classical chase
//! inserts that tuple whenever it is missing; the ⊕-chase, when the marginals
//! at `ā` are out of order, adds exactly the missing weight
//! `R[Ā](ā) − S[B̄](ā)` to it.

use crate::error::{Error, Result};
use crate::ind::Ind;
use crate::kdb::{Constant, KDatabase, Schema, Tuple, STAR};
use crate::monoid::{Element, MonoidSpec, DEFAULT_K_BOUND};
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write;

pub const DEFAULT_STEP_LIMIT: usize = 10_000;

/// Order in which `(σ, ā)` pairs are visited.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Scheduler {
    /// Cycle through the INDs in order and, within each, through the points of
    /// its left marginal in tuple order, resuming after the last repair.
    #[default]
    RoundRobin,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ChaseConfig {
    pub step_limit: usize,
    pub scheduler: Scheduler,
}

impl Default for ChaseConfig {
    fn default() -> Self {
        ChaseConfig {
            step_limit: DEFAULT_STEP_LIMIT,
            scheduler: Scheduler::RoundRobin,
        }
    }
}

impl ChaseConfig {
    pub fn with_step_limit(step_limit: usize) -> Self {
        ChaseConfig {
            step_limit: step_limit.max(1),
            ..Self::default()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    ClassicalRuleStar,
    PlusRule,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChaseStep {
    pub kind: StepKind,
    pub sigma: Ind,
    /// The point `ā` of the violated marginal.
    pub witness: Tuple,
    /// The right-hand tuple that was inserted or increased.
    pub incremented_tuple: Tuple,
    /// Weight added, for ⊕-rule steps.
    pub delta: Option<Element>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Terminated,
    StepLimitExceeded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChaseTrace {
    pub start: KDatabase,
    pub steps: Vec<ChaseStep>,
    pub outcome: Outcome,
    /// The final database (partial when the step limit was hit).
    pub result: KDatabase,
}

/// The single start tuple: the i-th left attribute of `tau` gets constant
/// `i` (from 1), every other attribute of its relation gets `*`.
fn canonical_tuple(tau: &Ind, schema: &Schema) -> Result<Tuple> {
    tau.validate(schema)?;
    let attrs = schema.attributes(&tau.lhs_rel)?;
    Ok(Tuple(
        attrs
            .iter()
            .map(|a| match tau.lhs_attrs.iter().position(|x| x == a) {
                Some(i) => Constant::from((i + 1).to_string()),
                None => Constant::from(STAR),
            })
            .collect(),
    ))
}

/// Boolean database with the canonical start tuple for `tau`.
pub fn canonical_start_classical(tau: &Ind, schema: &Schema) -> Result<KDatabase> {
    let mut db = KDatabase::new(schema.clone(), MonoidSpec::Boolean);
    db.add(
        &tau.lhs_rel,
        canonical_tuple(tau, schema)?,
        &Element::Bool(true),
    )?;
    Ok(db)
}

/// Naturals database with weight 1 on the canonical start tuple for `tau`.
pub fn canonical_start_plus(tau: &Ind, schema: &Schema) -> Result<KDatabase> {
    let mut db = KDatabase::new(schema.clone(), MonoidSpec::Naturals);
    db.add(
        &tau.lhs_rel,
        canonical_tuple(tau, schema)?,
        &Element::nat(1),
    )?;
    Ok(db)
}

struct Resolved {
    ind: Ind,
    lhs_pos: Vec<usize>,
    rhs_pos: Vec<usize>,
    rhs_arity: usize,
}

fn resolve(sigma: &[Ind], schema: &Schema) -> Result<Vec<Resolved>> {
    let mut sorted: Vec<&Ind> = sigma.iter().collect();
    sorted.sort();
    sorted.dedup();
    sorted
        .into_iter()
        .map(|ind| {
            ind.validate(schema)?;
            Ok(Resolved {
                ind: ind.clone(),
                lhs_pos: schema.positions(&ind.lhs_rel, &ind.lhs_attrs)?,
                rhs_pos: schema.positions(&ind.rhs_rel, &ind.rhs_attrs)?,
                rhs_arity: schema.attributes(&ind.rhs_rel)?.len(),
            })
        })
        .collect()
}

/// The right-hand tuple placing `witness` at `rhs_pos` and `*` elsewhere.
fn padded(witness: &Tuple, rhs_pos: &[usize], arity: usize) -> Tuple {
    let mut t = Tuple::stars(arity);
    for (v, &p) in witness.values().iter().zip(rhs_pos) {
        t.0[p] = v.clone();
    }
    t
}

/// Runs Rule (*) to its fixpoint on the support of `d0`.
///
/// For every tuple `t` of `R` and every `R[Ā] ⊆ S[B̄]`, the `S`-tuple mapping
/// `B̄` to `t[Ā]` and every other attribute to `*` is inserted unless that very
/// tuple is present (even when another tuple already covers `t[Ā]`). New
/// tuples are processed first-in first-out, starting from the existing tuples
/// in relation and tuple order, so the trace is deterministic.
pub fn classical_chase(d0: &KDatabase, sigma: &[Ind]) -> Result<ChaseTrace> {
    let start = d0.support();
    let resolved = resolve(sigma, start.schema())?;
    let mut db = start.clone();
    let mut steps = Vec::new();
    let mut queue: VecDeque<(String, Tuple)> = db
        .relations()
        .flat_map(|(name, rel)| rel.iter().map(move |(t, _)| (name.to_string(), t.clone())))
        .collect();

    while let Some((rel, t)) = queue.pop_front() {
        for r in resolved.iter().filter(|r| r.ind.lhs_rel == rel) {
            let witness = t.project(&r.lhs_pos);
            let new = padded(&witness, &r.rhs_pos, r.rhs_arity);
            if db.relation(&r.ind.rhs_rel)?.get(&new).is_some() {
                continue;
            }
            db.add_unchecked(&r.ind.rhs_rel, new.clone(), &Element::Bool(true));
            steps.push(ChaseStep {
                kind: StepKind::ClassicalRuleStar,
                sigma: r.ind.clone(),
                witness,
                incremented_tuple: new.clone(),
                delta: None,
            });
            queue.push_back((r.ind.rhs_rel.clone(), new));
        }
    }
    Ok(ChaseTrace {
        start,
        steps,
        outcome: Outcome::Terminated,
        result: db,
    })
}

/// `R[Ā] ⊆ R[Ā]` for every relation and every attribute subset (in schema
/// order), the arity-0 ones included.
pub fn reflexivity_instances(schema: &Schema) -> Vec<Ind> {
    let mut out = Vec::new();
    for (name, attrs) in schema.iter() {
        for mask in 0u64..(1u64 << attrs.len()) {
            let chosen: Vec<String> = attrs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, a)| a.clone())
                .collect();
            out.push(Ind {
                lhs_rel: name.to_string(),
                lhs_attrs: chosen.clone(),
                rhs_rel: name.to_string(),
                rhs_attrs: chosen,
            });
        }
    }
    out.sort();
    out
}

fn require_monus(m: &MonoidSpec) -> Result<()> {
    let report = m.classify(DEFAULT_K_BOUND)?;
    if report.weakly_cancellative && report.natural_order_total {
        Ok(())
    } else {
        Err(Error::UnsupportedMonoid(format!(
            "the ⊕-chase needs a weakly cancellative monoid with a total natural order, not {}",
            m.name()
        )))
    }
}

fn difference(m: &MonoidSpec, a: &Element, b: &Element) -> Result<Element> {
    match (a, b) {
        (Element::Nat(x), Element::Nat(y)) if y <= x => Ok(Element::Nat(x - y)),
        (Element::Rat(x), Element::Rat(y)) if y <= x => Ok(Element::Rat(x - y)),
        _ => m.monus(a, b),
    }
}

/// Whether the ⊕-rule applies to `σ` at `ā`: `R[Ā](ā) ≰ S[B̄](ā)`.
pub fn applicable(db: &KDatabase, sigma: &Ind, witness: &Tuple) -> Result<bool> {
    let m = db.monoid();
    require_monus(m)?;
    let schema = db.schema();
    sigma.validate(schema)?;
    if witness.arity() != sigma.arity() {
        return Err(Error::ArityMismatch(format!(
            "point {witness} for `{sigma}`"
        )));
    }
    let lp = schema.positions(&sigma.lhs_rel, &sigma.lhs_attrs)?;
    let rp = schema.positions(&sigma.rhs_rel, &sigma.rhs_attrs)?;
    let lhs = db.relation(&sigma.lhs_rel)?.marginal_at(&lp, witness, m);
    let rhs = db.relation(&sigma.rhs_rel)?.marginal_at(&rp, witness, m);
    Ok(!m.leq(&lhs, &rhs))
}

type MarginalKey = (String, Vec<usize>);

struct Marginals {
    maps: HashMap<MarginalKey, BTreeMap<Tuple, Element>>,
}

impl Marginals {
    fn new(db: &KDatabase, resolved: &[Resolved]) -> Self {
        let m = db.monoid();
        let mut maps = HashMap::new();
        for r in resolved {
            for (rel, pos) in [(&r.ind.lhs_rel, &r.lhs_pos), (&r.ind.rhs_rel, &r.rhs_pos)] {
                maps.entry((rel.clone(), pos.clone())).or_insert_with(|| {
                    db.relation(rel)
                        .expect("validated relation")
                        .marginal(pos, m)
                });
            }
        }
        Marginals { maps }
    }

    fn get(&self, rel: &str, pos: &[usize]) -> &BTreeMap<Tuple, Element> {
        &self.maps[&(rel.to_string(), pos.to_vec())]
    }

    fn bump(&mut self, rel: &str, t: &Tuple, delta: &Element, m: &MonoidSpec) {
        for ((r, pos), map) in self.maps.iter_mut() {
            if r == rel {
                let key = t.project(pos);
                match map.get_mut(&key) {
                    Some(w) => *w = m.op(w, delta),
                    None => {
                        map.insert(key, delta.clone());
                    }
                }
            }
        }
    }
}

/// Runs the ⊕-chase with the round-robin scheduler.
///
/// Points `ā` are drawn from the support of each left marginal, since every
/// other point has left weight 0. After each repair the scan resumes right
/// after the repaired pair and wraps around; a full cycle without an
/// applicable pair ends the chase.
pub fn plus_chase(d0: &KDatabase, sigma: &[Ind], cfg: &ChaseConfig) -> Result<ChaseTrace> {
    let m = d0.monoid().clone();
    require_monus(&m)?;
    let resolved = resolve(sigma, d0.schema())?;
    let mut db = d0.clone();
    let mut marginals = Marginals::new(&db, &resolved);
    let mut steps = Vec::new();
    let zero = m.zero();
    let mut cursor: Option<(usize, Tuple)> = None;

    let find = |marginals: &Marginals,
                cursor: &Option<(usize, Tuple)>|
     -> Option<(usize, Tuple, Element, Element)> {
        let n = resolved.len();
        let start = cursor.as_ref().map_or(0, |(i, _)| *i);
        // visit σ_start (after the cursor key), σ_start+1, …, wrap, σ_start (up to the cursor key)
        for round in 0..=n {
            let i = (start + round) % n.max(1);
            if i >= n {
                break;
            }
            let r = &resolved[i];
            let lhs = marginals.get(&r.ind.lhs_rel, &r.lhs_pos);
            let rhs = marginals.get(&r.ind.rhs_rel, &r.rhs_pos);
            let keys: Box<dyn Iterator<Item = (&Tuple, &Element)>> =
                match (cursor, round) {
                    (Some((_, k)), 0) => Box::new(lhs.range::<Tuple, _>((
                        std::ops::Bound::Excluded(k),
                        std::ops::Bound::Unbounded,
                    ))),
                    (Some((_, k)), r) if r == n => Box::new(lhs.range::<Tuple, _>(..=k)),
                    (None, r) if r == n => Box::new(std::iter::empty()),
                    _ => Box::new(lhs.iter()),
                };
            for (key, lw) in keys {
                let rw = rhs.get(key).unwrap_or(&zero);
                if !m.leq(lw, rw) {
                    return Some((i, key.clone(), lw.clone(), rw.clone()));
                }
            }
        }
        None
    };

    loop {
        let Some((i, witness, lw, rw)) = find(&marginals, &cursor) else {
            return Ok(ChaseTrace {
                start: d0.clone(),
                steps,
                outcome: Outcome::Terminated,
                result: db,
            });
        };
        if steps.len() >= cfg.step_limit {
            return Ok(ChaseTrace {
                start: d0.clone(),
                steps,
                outcome: Outcome::StepLimitExceeded,
                result: db,
            });
        }
        let r = &resolved[i];
        let delta = difference(&m, &lw, &rw)?;
        let target = padded(&witness, &r.rhs_pos, r.rhs_arity);
        db.add_unchecked(&r.ind.rhs_rel, target.clone(), &delta);
        marginals.bump(&r.ind.rhs_rel, &target, &delta, &m);
        steps.push(ChaseStep {
            kind: StepKind::PlusRule,
            sigma: r.ind.clone(),
            witness: witness.clone(),
            incremented_tuple: target,
            delta: Some(delta),
        });
        cursor = Some((i, witness));
    }
}

impl ChaseTrace {
    pub fn terminated(&self) -> bool {
        self.outcome == Outcome::Terminated
    }

    /// Re-applies every step to the start database.
    pub fn replay(&self) -> Result<KDatabase> {
        let mut db = self.start.clone();
        for step in &self.steps {
            let w = match (&step.kind, &step.delta) {
                (StepKind::PlusRule, Some(d)) => d.clone(),
                (StepKind::ClassicalRuleStar, None) => Element::Bool(true),
                _ => {
                    return Err(Error::Inconsistent(format!(
                        "malformed step for `{}`",
                        step.sigma
                    )))
                }
            };
            db.add(&step.sigma.rhs_rel, step.incremented_tuple.clone(), &w)?;
        }
        Ok(db)
    }

    pub fn to_json(&self) -> Value {
        let m = self.start.monoid();
        let steps: Vec<Value> = self
            .steps
            .iter()
            .map(|s| {
                let mut v = json!({
                    "kind": s.kind,
                    "sigma": s.sigma.to_string(),
                    "witness": s.witness.values().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                    "tuple": s.incremented_tuple.values().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                });
                if let Some(d) = &s.delta {
                    v["delta"] = Value::String(m.render(d));
                }
                v
            })
            .collect();
        json!({
            "start": self.start.to_json(),
            "steps": steps,
            "outcome": self.outcome,
            "result": self.result.to_json(),
        })
    }

    /// Step table followed by the final database.
    pub fn render_table(&self) -> String {
        let m = self.start.monoid();
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:>5}  {:<28} {:<12} {:<16} delta",
            "step", "ind", "point", "tuple"
        );
        for (i, s) in self.steps.iter().enumerate() {
            let delta = s
                .delta
                .as_ref()
                .map_or("-".to_string(), |d| format!("+{}", m.render(d)));
            let _ = writeln!(
                out,
                "{:>5}  {:<28} {:<12} {:<16} {delta}",
                i + 1,
                s.sigma.to_string(),
                s.witness.to_string(),
                format!("{}{}", s.sigma.rhs_rel, s.incremented_tuple)
            );
        }
        let outcome = match self.outcome {
            Outcome::Terminated => "terminated",
            Outcome::StepLimitExceeded => "step limit exceeded",
        };
        let _ = writeln!(out, "{} after {} steps\n", outcome, self.steps.len());
        out.push_str(&self.result.render_table());
        out
    }
}
