//! Derivation trees and their checker.

use super::{project_permute, transitivity, weak_symmetry, Rules};
use crate::error::{Error, Result};
use crate::ind::Ind;
use serde_json::{json, Value};
use std::collections::BTreeSet;
use std::fmt::Write;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationProof {
    pub conclusion: Ind,
    pub step: Step,
}

/// The rule applied at a node, with its premises.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    Hypothesis,
    Reflexivity,
    Balance,
    ProjectPermute {
        indices: Vec<usize>,
        premise: Box<DerivationProof>,
    },
    Transitivity {
        left: Box<DerivationProof>,
        right: Box<DerivationProof>,
    },
    WeakSymmetry {
        premise: Box<DerivationProof>,
        empty: Box<DerivationProof>,
    },
    Symmetry {
        premise: Box<DerivationProof>,
    },
}

impl DerivationProof {
    pub fn leaf(conclusion: Ind, step: Step) -> Self {
        DerivationProof { conclusion, step }
    }

    pub fn rule_name(&self) -> &'static str {
        match self.step {
            Step::Hypothesis => "hypothesis",
            Step::Reflexivity => "reflexivity",
            Step::Balance => "balance",
            Step::ProjectPermute { .. } => "projection-permutation",
            Step::Transitivity { .. } => "transitivity",
            Step::WeakSymmetry { .. } => "weak-symmetry",
            Step::Symmetry { .. } => "symmetry",
        }
    }

    pub fn premises(&self) -> Vec<&DerivationProof> {
        match &self.step {
            Step::Hypothesis | Step::Reflexivity | Step::Balance => vec![],
            Step::ProjectPermute { premise, .. } | Step::Symmetry { premise } => vec![premise],
            Step::Transitivity { left, right } => vec![left, right],
            Step::WeakSymmetry { premise, empty } => vec![premise, empty],
        }
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        1 + self.premises().iter().map(|p| p.size()).sum::<usize>()
    }

    /// Re-validates every node: leaves must be hypotheses from `sigma`,
    /// reflexivity instances, or (when allowed) balance instances, and each
    /// inner node must follow from its children by a permitted rule.
    pub fn check(&self, sigma: &BTreeSet<Ind>, rules: Rules) -> Result<()> {
        let fail = |why: String| Err(Error::InvalidProof(format!("{}: {why}", self.conclusion)));
        for p in self.premises() {
            p.check(sigma, rules)?;
        }
        let expected = match &self.step {
            Step::Hypothesis => {
                if !sigma.contains(&self.conclusion) {
                    return fail("not among the hypotheses".into());
                }
                return Ok(());
            }
            Step::Reflexivity => {
                if !self.conclusion.is_reflexive() {
                    return fail("not a reflexivity instance".into());
                }
                return Ok(());
            }
            Step::Balance => {
                if !rules.balance {
                    return fail("balance is not part of this rule system".into());
                }
                if self.conclusion.arity() != 0 {
                    return fail("balance instances have arity 0".into());
                }
                return Ok(());
            }
            Step::ProjectPermute { indices, premise } => {
                project_permute(&premise.conclusion, indices)
            }
            Step::Transitivity { left, right } => transitivity(&left.conclusion, &right.conclusion),
            Step::WeakSymmetry { premise, empty } => {
                if !rules.weak_symmetry {
                    return fail("weak symmetry is not part of this rule system".into());
                }
                weak_symmetry(&premise.conclusion, &empty.conclusion)
            }
            Step::Symmetry { premise } => {
                if !rules.symmetry {
                    return fail("symmetry is not part of this rule system".into());
                }
                Ok(premise.conclusion.inverse())
            }
        };
        match expected {
            Ok(ind) if ind == self.conclusion => Ok(()),
            Ok(ind) => fail(format!("the {} rule yields `{ind}`", self.rule_name())),
            Err(e) => fail(e.to_string()),
        }
    }

    /// Indented text tree, conclusion first, premises below.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        self.render_into(&mut out, 0);
        out
    }

    fn render_into(&self, out: &mut String, depth: usize) {
        let extra = match &self.step {
            Step::ProjectPermute { indices, .. } => {
                let shown: Vec<String> = indices.iter().map(|i| (i + 1).to_string()).collect();
                format!(" [{}]", shown.join(","))
            }
            _ => String::new(),
        };
        let _ = writeln!(
            out,
            "{}{}  ({}{extra})",
            "  ".repeat(depth),
            self.conclusion,
            self.rule_name()
        );
        for p in self.premises() {
            p.render_into(out, depth + 1);
        }
    }

    pub fn to_json(&self) -> Value {
        let premises: Vec<Value> = self.premises().iter().map(|p| p.to_json()).collect();
        let mut node = json!({
            "rule": self.rule_name(),
            "conclusion": self.conclusion.to_string(),
            "premises": premises,
        });
        if let Step::ProjectPermute { indices, .. } = &self.step {
            node["indices"] = json!(indices);
        }
        node
    }
}
