//! Absorption properties and structural witnesses.

use super::{Absorbed, Element, MonoidSpec};
use crate::error::{Error, Result};
use num_bigint::BigUint;
use num_traits::One;
use serde::{Serialize, Serializer};
use std::collections::HashMap;

pub const DEFAULT_K_BOUND: u32 = 8;

/// Longest absorptive chain `a₀, …, a_k` with `aᵢ ⊕ aᵢ₊₁ = aᵢ₊₁`, all nonzero.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KAbsorptive {
    Bounded(u32),
    Unbounded,
}

impl KAbsorptive {
    /// Whether the monoid is `k`-absorptive.
    pub fn admits(self, k: u32) -> bool {
        match self {
            KAbsorptive::Bounded(max) => k <= max,
            KAbsorptive::Unbounded => true,
        }
    }
}

impl Serialize for KAbsorptive {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            KAbsorptive::Bounded(k) => s.serialize_u32(*k),
            KAbsorptive::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Declared,
    Computed,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropertyReport {
    pub positive: bool,
    pub weakly_cancellative: bool,
    pub weakly_absorptive: bool,
    pub self_absorptive: bool,
    pub k_absorptive_max: KAbsorptive,
    pub countably_absorptive: bool,
    pub natural_order_total: bool,
    pub natural_order_antisymmetric: bool,
    pub provenance: Provenance,
}

impl PropertyReport {
    /// Checks `SA ⟹ CA ⟹ kA ⟹ WA ⟺ ¬WC`; returns the first broken link.
    pub fn check_chain(&self) -> std::result::Result<(), String> {
        if self.weakly_absorptive == self.weakly_cancellative {
            return Err("weakly absorptive must be the negation of weakly cancellative".into());
        }
        if self.self_absorptive && !self.countably_absorptive {
            return Err("self absorptive but not countably absorptive".into());
        }
        if self.countably_absorptive && self.k_absorptive_max != KAbsorptive::Unbounded {
            return Err("countably absorptive but k-absorption is bounded".into());
        }
        if self.k_absorptive_max.admits(1) != self.weakly_absorptive {
            return Err("1-absorption must coincide with weak absorption".into());
        }
        Ok(())
    }
}

fn declared(wc: bool, sa: bool, k: KAbsorptive, ca: bool) -> PropertyReport {
    PropertyReport {
        positive: true,
        weakly_cancellative: wc,
        weakly_absorptive: !wc,
        self_absorptive: sa,
        k_absorptive_max: k,
        countably_absorptive: ca,
        natural_order_total: true,
        natural_order_antisymmetric: true,
        provenance: Provenance::Declared,
    }
}

/// Carrier and operation of a finite monoid, by element index.
struct FiniteView {
    elements: Vec<Element>,
    zero: usize,
    op: Vec<usize>,
}

impl FiniteView {
    fn new(m: &MonoidSpec) -> Option<Self> {
        let elements = m.elements()?;
        let n = elements.len();
        let index: HashMap<&Element, usize> =
            elements.iter().enumerate().map(|(i, e)| (e, i)).collect();
        let mut op = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                op[a * n + b] = index[&m.op(&elements[a], &elements[b])];
            }
        }
        let zero = index[&m.zero()];
        Some(FiniteView { elements, zero, op })
    }

    fn n(&self) -> usize {
        self.elements.len()
    }

    fn at(&self, a: usize, b: usize) -> usize {
        self.op[a * self.n() + b]
    }

    fn nonzero(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n()).filter(move |&i| i != self.zero)
    }

    fn leq(&self, a: usize, b: usize) -> bool {
        (0..self.n()).any(|c| self.at(a, c) == b)
    }

    fn report(&self, k_bound: u32) -> PropertyReport {
        let n = self.n();
        let positive = (0..n).all(|a| {
            (0..n).all(|b| self.at(a, b) != self.zero || (a == self.zero && b == self.zero))
        });
        // x → y iff x ⊕ y = y, on nonzero elements
        let absorbs = |x: usize, y: usize| self.at(x, y) == y;
        let wa = self
            .nonzero()
            .any(|x| self.nonzero().any(|y| absorbs(x, y)));
        let sa = self.nonzero().any(|x| absorbs(x, x));
        let ca = sa;
        let k_absorptive_max = if ca {
            KAbsorptive::Unbounded
        } else {
            // layer[y]: some chain of the current length ends in y
            let mut layer: Vec<bool> = (0..n).map(|i| i != self.zero).collect();
            let mut k = 0;
            while k < k_bound {
                let next: Vec<bool> = (0..n)
                    .map(|y| y != self.zero && self.nonzero().any(|x| layer[x] && absorbs(x, y)))
                    .collect();
                if !next.iter().any(|&b| b) {
                    break;
                }
                layer = next;
                k += 1;
            }
            KAbsorptive::Bounded(k)
        };
        let leq: Vec<Vec<bool>> = (0..n)
            .map(|a| (0..n).map(|b| self.leq(a, b)).collect())
            .collect();
        let total = (0..n).all(|a| (0..n).all(|b| leq[a][b] || leq[b][a]));
        let antisymmetric = (0..n).all(|a| (0..n).all(|b| a == b || !(leq[a][b] && leq[b][a])));
        PropertyReport {
            positive,
            weakly_cancellative: !wa,
            weakly_absorptive: wa,
            self_absorptive: sa,
            k_absorptive_max,
            countably_absorptive: ca,
            natural_order_total: total,
            natural_order_antisymmetric: antisymmetric,
            provenance: Provenance::Computed,
        }
    }
}

impl MonoidSpec {
    /// The report builtin monoids ship with; `None` for computed ones.
    pub fn declared_properties(&self) -> Option<PropertyReport> {
        use KAbsorptive::*;
        Some(match self {
            MonoidSpec::Boolean | MonoidSpec::MaxNaturals => declared(false, true, Unbounded, true),
            MonoidSpec::Naturals | MonoidSpec::NonnegRationals => {
                declared(true, false, Bounded(0), false)
            }
            MonoidSpec::AbsorbedNaturals => declared(false, false, Bounded(1), false),
            MonoidSpec::Monogenic { .. } | MonoidSpec::FiniteTable(_) => return None,
        })
    }

    /// Decides the absorption properties.
    ///
    /// Builtins other than `monogenic` return their declared report. Finite
    /// carriers are searched exhaustively; chains longer than `k_bound` are
    /// reported as `Bounded(k_bound)` unless a nonzero idempotent certifies
    /// unbounded absorption.
    pub fn classify(&self, k_bound: u32) -> Result<PropertyReport> {
        if let Some(report) = self.declared_properties() {
            return Ok(report);
        }
        let view = FiniteView::new(self)
            .ok_or_else(|| Error::UnsupportedMonoid(format!("cannot classify {}", self.name())))?;
        Ok(view.report(k_bound))
    }

    /// A nonzero idempotent element, if one exists.
    pub fn find_idempotent(&self) -> Result<Option<Element>> {
        match self {
            MonoidSpec::Boolean | MonoidSpec::MaxNaturals => Ok(self.some_nonzero()),
            MonoidSpec::Naturals | MonoidSpec::NonnegRationals | MonoidSpec::AbsorbedNaturals => {
                Ok(None)
            }
            _ => Ok(self
                .elements()
                .into_iter()
                .flatten()
                .find(|e| !self.is_zero(e) && self.op(e, e) == *e)),
        }
    }

    /// Nonzero `(a, b)` with `a ⊕ b = b` and `b ⊕ c ≠ c` for every `c`.
    ///
    /// Finite carriers are searched in element order (first by `a`, then by
    /// `b`). Among infinite builtins only `absorbed_naturals` has such a pair,
    /// `(a, b)`; the others have none.
    pub fn find_wa_pair(&self) -> Result<Option<(Element, Element)>> {
        match self {
            MonoidSpec::Naturals | MonoidSpec::NonnegRationals | MonoidSpec::MaxNaturals => {
                Ok(None)
            }
            MonoidSpec::AbsorbedNaturals => Ok(Some((
                Element::Absorbed(Absorbed::Low(BigUint::one())),
                Element::Absorbed(Absorbed::High(BigUint::one())),
            ))),
            _ => {
                let view = FiniteView::new(self).ok_or_else(|| {
                    Error::UnsupportedMonoid(format!("no pair search for {}", self.name()))
                })?;
                let never_absorbs = |b: usize| (0..view.n()).all(|c| view.at(b, c) != c);
                for a in view.nonzero() {
                    for b in view.nonzero() {
                        if view.at(a, b) == b && never_absorbs(b) {
                            return Ok(Some((view.elements[a].clone(), view.elements[b].clone())));
                        }
                    }
                }
                Ok(None)
            }
        }
    }

    /// Whether `(a, b)` is a weak-absorption pair as in [`find_wa_pair`].
    ///
    /// The second condition is only checkable on finite carriers and known
    /// builtins; elsewhere an error is returned.
    ///
    /// [`find_wa_pair`]: MonoidSpec::find_wa_pair
    pub fn check_wa_pair(&self, a: &Element, b: &Element) -> Result<()> {
        self.validate(a)?;
        self.validate(b)?;
        let bad = |why: &str| {
            Error::InvalidPair(format!("({}, {}): {why}", self.render(a), self.render(b)))
        };
        if self.is_zero(a) || self.is_zero(b) {
            return Err(bad("both elements must be nonzero"));
        }
        if self.op(a, b) != *b {
            return Err(bad("a ⊕ b ≠ b"));
        }
        let absorbing = match self {
            MonoidSpec::Naturals | MonoidSpec::NonnegRationals => false,
            MonoidSpec::MaxNaturals => true,
            MonoidSpec::AbsorbedNaturals => false,
            _ => self
                .elements()
                .into_iter()
                .flatten()
                .any(|c| self.op(b, &c) == c),
        };
        if absorbing {
            return Err(bad("b ⊕ c = c for some c"));
        }
        Ok(())
    }

    /// Least `(m₀, ℓ)` with `m₀·b = (m₀+ℓ)·b`.
    pub fn find_eventual_period(&self, b: &Element) -> Result<(u64, u64)> {
        self.validate(b)?;
        if self.is_zero(b) {
            return Err(Error::NotEventuallyPeriodic(
                "the zero element generates the trivial submonoid".into(),
            ));
        }
        let never = || {
            Error::UnsupportedMonoid(format!(
                "the multiples of {} in {} never repeat",
                self.render(b),
                self.name()
            ))
        };
        match (self, b) {
            (MonoidSpec::Naturals | MonoidSpec::NonnegRationals, _) => return Err(never()),
            (MonoidSpec::AbsorbedNaturals, _) => return Err(never()),
            _ => {}
        }
        let mut seen: HashMap<Element, u64> = HashMap::new();
        let mut current = b.clone();
        let mut k = 1u64;
        loop {
            if let Some(&first) = seen.get(&current) {
                return Ok((first, k - first));
            }
            seen.insert(current.clone(), k);
            current = self.op(&current, b);
            k += 1;
        }
    }
}
