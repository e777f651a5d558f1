//! Derivability of INDs under the standard rules, optionally extended by weak
//! symmetry, symmetry, and balance.
//!
//! Derivability is decided by saturation. The universe consists of the
//! projections/permutations of the hypotheses, the balance instances, and the
//! arity-0 reflexivity instances, closed under transitivity and the enabled
//! symmetry rules. It is finite, so the fixpoint is reached.

mod proof;

pub use proof::{DerivationProof, Step};

use crate::error::{Error, Result};
use crate::ind::Ind;
use crate::kdb::Schema;
use std::collections::{BTreeSet, HashMap, VecDeque};

/// The three named rule systems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RuleSystem {
    /// Reflexivity, transitivity, projection and permutation.
    Standard,
    /// Standard rules plus weak symmetry.
    StandardWS,
    /// Standard rules plus symmetry and balance.
    StandardBalance,
}

impl std::str::FromStr for RuleSystem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(RuleSystem::Standard),
            "ws" => Ok(RuleSystem::StandardWS),
            "balance" => Ok(RuleSystem::StandardBalance),
            _ => Err(Error::Syntax(format!(
                "unknown rule system `{s}` (expected standard, ws, or balance)"
            ))),
        }
    }
}

/// Which rules beyond the standard ones are enabled.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Rules {
    pub weak_symmetry: bool,
    pub symmetry: bool,
    pub balance: bool,
}

impl From<RuleSystem> for Rules {
    fn from(system: RuleSystem) -> Self {
        match system {
            RuleSystem::Standard => Rules::default(),
            RuleSystem::StandardWS => Rules {
                weak_symmetry: true,
                ..Rules::default()
            },
            RuleSystem::StandardBalance => Rules {
                symmetry: true,
                balance: true,
                ..Rules::default()
            },
        }
    }
}

impl Rules {
    pub fn with_balance(self) -> Self {
        Rules {
            balance: true,
            ..self
        }
    }
}

/// Selects and reorders both sides of `sigma` by `indices` (0-based).
pub fn project_permute(sigma: &Ind, indices: &[usize]) -> Result<Ind> {
    let n = sigma.arity();
    let mut seen = vec![false; n];
    for &i in indices {
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, arity: n });
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(Error::DuplicateIndex(i));
        }
    }
    Ok(Ind {
        lhs_rel: sigma.lhs_rel.clone(),
        lhs_attrs: indices
            .iter()
            .map(|&i| sigma.lhs_attrs[i].clone())
            .collect(),
        rhs_rel: sigma.rhs_rel.clone(),
        rhs_attrs: indices
            .iter()
            .map(|&i| sigma.rhs_attrs[i].clone())
            .collect(),
    })
}

/// From `R[Ā] ⊆ S[B̄]` and `S[B̄] ⊆ T[C̄]`, `R[Ā] ⊆ T[C̄]`.
pub fn transitivity(s1: &Ind, s2: &Ind) -> Result<Ind> {
    if s1.rhs_rel != s2.lhs_rel || s1.rhs_attrs != s2.lhs_attrs {
        return Err(Error::MiddleMismatch {
            left: s1.to_string(),
            right: s2.to_string(),
        });
    }
    Ok(Ind {
        lhs_rel: s1.lhs_rel.clone(),
        lhs_attrs: s1.lhs_attrs.clone(),
        rhs_rel: s2.rhs_rel.clone(),
        rhs_attrs: s2.rhs_attrs.clone(),
    })
}

/// From `R[Ā] ⊆ S[B̄]` and `S[] ⊆ R[]`, `S[B̄] ⊆ R[Ā]`.
pub fn weak_symmetry(sigma: &Ind, empty_ind: &Ind) -> Result<Ind> {
    if empty_ind.arity() != 0
        || empty_ind.lhs_rel != sigma.rhs_rel
        || empty_ind.rhs_rel != sigma.lhs_rel
    {
        return Err(Error::PremiseMismatch(format!(
            "weak symmetry on `{sigma}` needs `{}[] <= {}[]`, got `{empty_ind}`",
            sigma.rhs_rel, sigma.lhs_rel
        )));
    }
    Ok(sigma.inverse())
}

/// All index sequences of distinct positions below `n`, excluding the identity.
fn selections(n: usize) -> Vec<Vec<usize>> {
    fn extend(n: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(current.clone());
        for i in 0..n {
            if !current.contains(&i) {
                current.push(i);
                extend(n, current, out);
                current.pop();
            }
        }
    }
    let mut out = Vec::new();
    extend(n, &mut Vec::new(), &mut out);
    let identity: Vec<usize> = (0..n).collect();
    out.retain(|s| *s != identity);
    out
}

#[derive(Clone, Debug)]
enum Justification {
    Hypothesis,
    Reflexivity,
    Balance,
    ProjectPermute(usize, Vec<usize>),
    Transitivity(usize, usize),
    WeakSymmetry(usize, usize),
    Symmetry(usize),
}

type Side = (String, Vec<String>);

/// The saturated set of INDs together with one justification for each.
#[derive(Clone, Debug)]
pub struct Closure {
    rules: Rules,
    hypotheses: BTreeSet<Ind>,
    facts: Vec<Ind>,
    justification: Vec<Justification>,
    index: HashMap<Ind, usize>,
}

struct Saturator {
    closure: Closure,
    by_lhs: HashMap<Side, Vec<usize>>,
    by_rhs: HashMap<Side, Vec<usize>>,
    by_relations: HashMap<(String, String), Vec<usize>>,
    empties: HashMap<(String, String), usize>,
    queue: VecDeque<usize>,
}

impl Saturator {
    fn add(&mut self, ind: Ind, why: Justification) {
        if self.closure.index.contains_key(&ind) {
            return;
        }
        if ind.is_reflexive() && !(ind.arity() == 0 && matches!(why, Justification::Reflexivity)) {
            return;
        }
        let id = self.closure.facts.len();
        self.by_lhs
            .entry((ind.lhs_rel.clone(), ind.lhs_attrs.clone()))
            .or_default()
            .push(id);
        self.by_rhs
            .entry((ind.rhs_rel.clone(), ind.rhs_attrs.clone()))
            .or_default()
            .push(id);
        if ind.arity() == 0 {
            self.empties
                .insert((ind.lhs_rel.clone(), ind.rhs_rel.clone()), id);
        } else {
            self.by_relations
                .entry((ind.lhs_rel.clone(), ind.rhs_rel.clone()))
                .or_default()
                .push(id);
        }
        self.closure.index.insert(ind.clone(), id);
        self.closure.facts.push(ind);
        self.closure.justification.push(why);
        self.queue.push_back(id);
    }

    fn run(&mut self) {
        let rules = self.closure.rules;
        while let Some(id) = self.queue.pop_front() {
            let fact = self.closure.facts[id].clone();

            for sel in selections(fact.arity()) {
                let projected = project_permute(&fact, &sel).expect("valid selection");
                self.add(projected, Justification::ProjectPermute(id, sel));
            }

            let rhs_side = (fact.rhs_rel.clone(), fact.rhs_attrs.clone());
            let next: Vec<usize> = self.by_lhs.get(&rhs_side).cloned().unwrap_or_default();
            for other in next {
                let derived =
                    transitivity(&fact, &self.closure.facts[other]).expect("matching middle");
                self.add(derived, Justification::Transitivity(id, other));
            }
            let lhs_side = (fact.lhs_rel.clone(), fact.lhs_attrs.clone());
            let prev: Vec<usize> = self.by_rhs.get(&lhs_side).cloned().unwrap_or_default();
            for other in prev {
                let derived =
                    transitivity(&self.closure.facts[other], &fact).expect("matching middle");
                self.add(derived, Justification::Transitivity(other, id));
            }

            if rules.weak_symmetry {
                if fact.arity() > 0 {
                    let key = (fact.rhs_rel.clone(), fact.lhs_rel.clone());
                    if let Some(&empty) = self.empties.get(&key) {
                        self.add(fact.inverse(), Justification::WeakSymmetry(id, empty));
                    }
                } else {
                    // fact is S[] ⊆ R[]: it unlocks every R[Ā] ⊆ S[B̄]
                    let key = (fact.rhs_rel.clone(), fact.lhs_rel.clone());
                    let mains: Vec<usize> =
                        self.by_relations.get(&key).cloned().unwrap_or_default();
                    for main in mains {
                        let inv = self.closure.facts[main].inverse();
                        self.add(inv, Justification::WeakSymmetry(main, id));
                    }
                }
            }
            if rules.symmetry {
                self.add(fact.inverse(), Justification::Symmetry(id));
            }
        }
    }
}

/// Saturates `sigma` under the given rules.
///
/// Balance instances and arity-0 reflexivity instances are seeded for every
/// relation of `schema` and every relation mentioned in `sigma`.
pub fn saturate(sigma: &[Ind], rules: impl Into<Rules>, schema: &Schema) -> Result<Closure> {
    saturate_with(sigma, rules.into(), schema, std::iter::empty())
}

fn saturate_with<'a>(
    sigma: &[Ind],
    rules: Rules,
    schema: &Schema,
    extra_relations: impl Iterator<Item = &'a str>,
) -> Result<Closure> {
    for s in sigma {
        s.validate(schema)?;
    }
    let hypotheses: BTreeSet<Ind> = sigma.iter().cloned().collect();
    let mut relations: BTreeSet<String> = schema.relation_names().map(str::to_string).collect();
    for s in sigma {
        relations.insert(s.lhs_rel.clone());
        relations.insert(s.rhs_rel.clone());
    }
    relations.extend(extra_relations.map(str::to_string));

    let mut sat = Saturator {
        closure: Closure {
            rules,
            hypotheses: hypotheses.clone(),
            facts: Vec::new(),
            justification: Vec::new(),
            index: HashMap::new(),
        },
        by_lhs: HashMap::new(),
        by_rhs: HashMap::new(),
        by_relations: HashMap::new(),
        empties: HashMap::new(),
        queue: VecDeque::new(),
    };
    for r in &relations {
        sat.add(Ind::empty(r.clone(), r.clone()), Justification::Reflexivity);
    }
    for h in &hypotheses {
        sat.add(h.clone(), Justification::Hypothesis);
    }
    if rules.balance {
        for s in &relations {
            for r in &relations {
                if s != r {
                    sat.add(Ind::empty(s.clone(), r.clone()), Justification::Balance);
                }
            }
        }
    }
    sat.run();
    Ok(sat.closure)
}

impl Closure {
    pub fn rules(&self) -> Rules {
        self.rules
    }

    pub fn contains(&self, ind: &Ind) -> bool {
        self.index.contains_key(ind)
    }

    /// Whether `ind` is derivable: in the closure or reflexive.
    pub fn derives(&self, ind: &Ind) -> bool {
        ind.is_reflexive() || self.contains(ind)
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    /// The closure in canonical order.
    pub fn inds(&self) -> BTreeSet<Ind> {
        self.facts.iter().cloned().collect()
    }

    /// The closure in derivation order.
    pub fn as_slice(&self) -> &[Ind] {
        &self.facts
    }

    /// A proof of `ind`, if derivable.
    pub fn proof(&self, ind: &Ind) -> Option<DerivationProof> {
        if let Some(&id) = self.index.get(ind) {
            let mut memo = HashMap::new();
            return Some(self.build(id, &mut memo));
        }
        ind.is_reflexive()
            .then(|| DerivationProof::leaf(ind.clone(), Step::Reflexivity))
    }

    fn build(&self, id: usize, memo: &mut HashMap<usize, DerivationProof>) -> DerivationProof {
        if let Some(p) = memo.get(&id) {
            return p.clone();
        }
        let conclusion = self.facts[id].clone();
        let step = match &self.justification[id] {
            Justification::Hypothesis => Step::Hypothesis,
            Justification::Reflexivity => Step::Reflexivity,
            Justification::Balance => Step::Balance,
            Justification::ProjectPermute(p, sel) => Step::ProjectPermute {
                indices: sel.clone(),
                premise: Box::new(self.build(*p, memo)),
            },
            Justification::Transitivity(l, r) => Step::Transitivity {
                left: Box::new(self.build(*l, memo)),
                right: Box::new(self.build(*r, memo)),
            },
            Justification::WeakSymmetry(p, e) => Step::WeakSymmetry {
                premise: Box::new(self.build(*p, memo)),
                empty: Box::new(self.build(*e, memo)),
            },
            Justification::Symmetry(p) => Step::Symmetry {
                premise: Box::new(self.build(*p, memo)),
            },
        };
        let proof = DerivationProof { conclusion, step };
        memo.insert(id, proof.clone());
        proof
    }

    /// The hypotheses the closure was built from.
    pub fn hypotheses(&self) -> &BTreeSet<Ind> {
        &self.hypotheses
    }
}

/// Decides `sigma ⊢ tau` and returns a checked proof when derivable.
pub fn derives(
    sigma: &[Ind],
    tau: &Ind,
    rules: impl Into<Rules>,
    schema: &Schema,
) -> Result<Option<DerivationProof>> {
    let rules = rules.into();
    tau.validate(schema)?;
    if tau.is_reflexive() {
        return Ok(Some(DerivationProof::leaf(tau.clone(), Step::Reflexivity)));
    }
    let closure = saturate_with(
        sigma,
        rules,
        schema,
        [tau.lhs_rel.as_str(), tau.rhs_rel.as_str()].into_iter(),
    )?;
    match closure.proof(tau) {
        Some(p) => {
            p.check(closure.hypotheses(), rules)?;
            Ok(Some(p))
        }
        None => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ind(s: &str) -> Ind {
        Ind::parse(s).unwrap()
    }

    fn running_schema() -> Schema {
        Schema::from_relations([
            ("Expense", vec!["proj", "year", "cat"]),
            ("Budget", vec!["proj", "year"]),
            ("Grant", vec!["proj", "agency"]),
        ])
        .unwrap()
    }

    fn c(n: u8) -> Ind {
        ind(match n {
            1 => "Expense[proj,year] <= Budget[proj,year]",
            2 => "Budget[proj] <= Grant[proj]",
            3 => "Grant[proj] <= Budget[proj]",
            _ => "Grant[] <= Budget[]",
        })
    }

    #[test]
    fn project_permute_examples() {
        assert_eq!(
            project_permute(&c(1), &[0]).unwrap(),
            ind("Expense[proj] <= Budget[proj]")
        );
        assert_eq!(project_permute(&c(1), &[0, 1]).unwrap(), c(1));
        assert_eq!(
            project_permute(&c(1), &[]).unwrap(),
            ind("Expense[] <= Budget[]")
        );
        assert_eq!(
            project_permute(&c(1), &[1, 0]).unwrap(),
            ind("Expense[year,proj] <= Budget[year,proj]")
        );
        assert!(matches!(
            project_permute(&c(1), &[2]),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            project_permute(&c(1), &[0, 0]),
            Err(Error::DuplicateIndex(0))
        ));
    }

    #[test]
    fn transitivity_examples() {
        let p = project_permute(&c(1), &[0]).unwrap();
        assert_eq!(
            transitivity(&p, &c(2)).unwrap(),
            ind("Expense[proj] <= Grant[proj]")
        );
        assert_eq!(
            transitivity(&c(2), &ind("Grant[proj] <= Grant[proj]")).unwrap(),
            c(2)
        );
        assert!(matches!(
            transitivity(&c(1), &c(2)),
            Err(Error::MiddleMismatch { .. })
        ));
    }

    #[test]
    fn weak_symmetry_examples() {
        assert_eq!(weak_symmetry(&c(2), &c(4)).unwrap(), c(3));
        assert_eq!(
            weak_symmetry(&ind("R[A] <= R[B]"), &ind("R[] <= R[]")).unwrap(),
            ind("R[B] <= R[A]")
        );
        assert!(matches!(
            weak_symmetry(&c(2), &ind("Budget[] <= Grant[]")),
            Err(Error::PremiseMismatch(_))
        ));
    }

    #[test]
    fn saturation_examples() {
        let s = running_schema();
        let cl = saturate(&[c(1), c(2)], RuleSystem::Standard, &s).unwrap();
        assert!(cl.contains(&ind("Expense[proj] <= Grant[proj]")));
        let empty = saturate(&[], RuleSystem::Standard, &s).unwrap();
        assert_eq!(empty.len(), 3);
        assert!(empty
            .inds()
            .iter()
            .all(|i| i.arity() == 0 && i.is_reflexive()));
        let sym = saturate(
            &[ind("Budget[proj] <= Grant[proj]")],
            RuleSystem::StandardBalance,
            &s,
        )
        .unwrap();
        assert!(sym.contains(&ind("Grant[proj] <= Budget[proj]")));
    }

    #[test]
    fn derivation_examples() {
        let s = running_schema();
        let proof = derives(&[c(2), c(4)], &c(3), RuleSystem::StandardWS, &s)
            .unwrap()
            .unwrap();
        assert_eq!(proof.rule_name(), "weak-symmetry");
        assert!(derives(&[c(1), c(2)], &c(3), RuleSystem::Standard, &s)
            .unwrap()
            .is_none());
        assert!(derives(&[c(1)], &c(1), RuleSystem::Standard, &s)
            .unwrap()
            .is_some());
        let refl = derives(
            &[],
            &ind("Budget[year] <= Budget[year]"),
            RuleSystem::Standard,
            &s,
        )
        .unwrap()
        .unwrap();
        assert_eq!(refl.step, Step::Reflexivity);
    }

    #[test]
    fn proofs_check_and_render() {
        let s = running_schema();
        let tau = ind("Expense[proj] <= Grant[proj]");
        let proof = derives(&[c(1), c(2)], &tau, RuleSystem::Standard, &s)
            .unwrap()
            .unwrap();
        let sigma: BTreeSet<Ind> = [c(1), c(2)].into_iter().collect();
        proof.check(&sigma, Rules::default()).unwrap();
        assert!(proof.check(&BTreeSet::new(), Rules::default()).is_err());
        let text = proof.render_text();
        assert!(
            text.starts_with("Expense[proj] <= Grant[proj]  (transitivity)"),
            "{text}"
        );
        assert_eq!(proof.to_json()["rule"], "transitivity");
    }

    #[test]
    fn checker_rejects_disallowed_rules() {
        let p = DerivationProof {
            conclusion: c(3),
            step: Step::WeakSymmetry {
                premise: Box::new(DerivationProof::leaf(c(2), Step::Hypothesis)),
                empty: Box::new(DerivationProof::leaf(c(4), Step::Hypothesis)),
            },
        };
        let sigma: BTreeSet<Ind> = [c(2), c(4)].into_iter().collect();
        assert!(p.check(&sigma, RuleSystem::StandardWS.into()).is_ok());
        assert!(p.check(&sigma, RuleSystem::Standard.into()).is_err());
        let wrong = DerivationProof {
            conclusion: c(2),
            step: p.step.clone(),
        };
        assert!(wrong.check(&sigma, RuleSystem::StandardWS.into()).is_err());
    }

    #[test]
    fn selections_count() {
        assert_eq!(selections(0).len(), 0);
        assert_eq!(selections(2).len(), 4); // [], [0], [1], [1,0]
        assert_eq!(selections(3).len(), 15);
    }
}
