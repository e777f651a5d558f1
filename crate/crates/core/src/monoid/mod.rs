//! Positive commutative monoids, their natural order, and the elements they
//! annotate tuples with.
//!
//! A [`MonoidSpec`] is either one of a handful of builtin monoids or a finite
//! operation table loaded from JSON. Elements are plain values; the monoid they
//! belong to is always passed alongside them.
//!
//! | builtin             | carrier                        | `⊕`                  |
//! |---------------------|--------------------------------|----------------------|
//! | `boolean`           | `{0, 1}`                       | disjunction          |
//! | `naturals`          | ℕ (arbitrary precision)        | addition             |
//! | `nonneg_rationals`  | ℚ≥0 (exact fractions)          | addition             |
//! | `max_naturals`      | ℕ                              | maximum              |
//! | `monogenic:m,l`     | `{0, …, m+l−1}`                | addition with `m = m+l` |
//! | `absorbed_naturals` | `{0, a, 2a, …, b, 2b, …}`      | `na⊕ka = (n+k)a`, `na⊕mb = mb`, `mb⊕kb = (m+k)b` |

mod classify;
mod table;

pub use classify::{KAbsorptive, PropertyReport, Provenance, DEFAULT_K_BOUND};
pub use table::FiniteTable;

use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

/// An element of some monoid's carrier.
///
/// The variant must match the monoid it is used with; [`MonoidSpec::contains`]
/// checks that (and range constraints such as the size of a monogenic carrier).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Element {
    Bool(bool),
    /// Naturals and max-naturals.
    Nat(BigUint),
    /// Non-negative rationals, always in lowest terms.
    Rat(BigRational),
    /// A residue of a monogenic monoid.
    Cyclic(u64),
    Absorbed(Absorbed),
    /// Index into a finite table's element list.
    Table(u32),
}

/// Carrier of the `absorbed_naturals` builtin: two copies of the positive
/// naturals, where every multiple of `b` absorbs every multiple of `a`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Absorbed {
    Zero,
    /// `n·a` for `n ≥ 1`.
    Low(BigUint),
    /// `n·b` for `n ≥ 1`.
    High(BigUint),
}

impl Element {
    pub fn nat(n: u64) -> Self {
        Element::Nat(BigUint::from(n))
    }

    pub fn rat(numer: i64, denom: i64) -> Self {
        Element::Rat(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }
}

/// A positive commutative monoid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MonoidSpec {
    Boolean,
    Naturals,
    NonnegRationals,
    MaxNaturals,
    /// The monoid generated by `1` under addition with the congruence
    /// `index = index + period`.
    Monogenic {
        index: u64,
        period: u64,
    },
    /// Weakly absorptive, not countably absorptive, with a total order:
    /// `0 < a < 2a < … < b < 2b < …`.
    AbsorbedNaturals,
    FiniteTable(Arc<FiniteTable>),
}

impl MonoidSpec {
    pub fn monogenic(index: u64, period: u64) -> Result<Self> {
        if index == 0 || period == 0 {
            return Err(Error::UnknownMonoid(format!(
                "monogenic:{index},{period} (index and period must be at least 1)"
            )));
        }
        if index.checked_add(period).is_none() {
            return Err(Error::UnknownMonoid(format!("monogenic:{index},{period}")));
        }
        Ok(MonoidSpec::Monogenic { index, period })
    }

    pub fn table(table: FiniteTable) -> Self {
        MonoidSpec::FiniteTable(Arc::new(table))
    }

    /// Name as accepted by [`MonoidSpec::from_str`]; tables render as `table(n)`.
    pub fn name(&self) -> String {
        match self {
            MonoidSpec::Boolean => "boolean".into(),
            MonoidSpec::Naturals => "naturals".into(),
            MonoidSpec::NonnegRationals => "nonneg_rationals".into(),
            MonoidSpec::MaxNaturals => "max_naturals".into(),
            MonoidSpec::Monogenic { index, period } => format!("monogenic:{index},{period}"),
            MonoidSpec::AbsorbedNaturals => "absorbed_naturals".into(),
            MonoidSpec::FiniteTable(t) => format!("table({})", t.len()),
        }
    }

    pub fn zero(&self) -> Element {
        match self {
            MonoidSpec::Boolean => Element::Bool(false),
            MonoidSpec::Naturals | MonoidSpec::MaxNaturals => Element::Nat(BigUint::zero()),
            MonoidSpec::NonnegRationals => Element::Rat(BigRational::zero()),
            MonoidSpec::Monogenic { .. } => Element::Cyclic(0),
            MonoidSpec::AbsorbedNaturals => Element::Absorbed(Absorbed::Zero),
            MonoidSpec::FiniteTable(t) => Element::Table(t.zero() as u32),
        }
    }

    /// A fixed nonzero element (`1`, or `b` for `absorbed_naturals`), if any.
    pub fn some_nonzero(&self) -> Option<Element> {
        Some(match self {
            MonoidSpec::Boolean => Element::Bool(true),
            MonoidSpec::Naturals | MonoidSpec::MaxNaturals => Element::nat(1),
            MonoidSpec::NonnegRationals => Element::Rat(BigRational::one()),
            MonoidSpec::Monogenic { .. } => Element::Cyclic(1),
            MonoidSpec::AbsorbedNaturals => Element::Absorbed(Absorbed::High(BigUint::one())),
            MonoidSpec::FiniteTable(t) => {
                let i = (0..t.len()).find(|&i| i != t.zero())?;
                Element::Table(i as u32)
            }
        })
    }

    pub fn is_zero(&self, e: &Element) -> bool {
        *e == self.zero()
    }

    pub fn contains(&self, e: &Element) -> bool {
        match (self, e) {
            (MonoidSpec::Boolean, Element::Bool(_)) => true,
            (MonoidSpec::Naturals | MonoidSpec::MaxNaturals, Element::Nat(_)) => true,
            (MonoidSpec::NonnegRationals, Element::Rat(r)) => {
                !r.is_negative() && r.denom().is_positive()
            }
            (MonoidSpec::Monogenic { index, period }, Element::Cyclic(c)) => *c < index + period,
            (MonoidSpec::AbsorbedNaturals, Element::Absorbed(a)) => match a {
                Absorbed::Low(n) | Absorbed::High(n) => !n.is_zero(),
                Absorbed::Zero => true,
            },
            (MonoidSpec::FiniteTable(t), Element::Table(i)) => (*i as usize) < t.len(),
            _ => false,
        }
    }

    pub fn validate(&self, e: &Element) -> Result<()> {
        if self.contains(e) {
            Ok(())
        } else {
            Err(Error::InvalidElement {
                monoid: self.name(),
                value: format!("{e:?}"),
            })
        }
    }

    /// `a ⊕ b` for elements already known to belong to the carrier.
    ///
    /// Panics when given an element of a different monoid.
    pub fn op(&self, a: &Element, b: &Element) -> Element {
        match (self, a, b) {
            (MonoidSpec::Boolean, Element::Bool(x), Element::Bool(y)) => Element::Bool(*x || *y),
            (MonoidSpec::Naturals, Element::Nat(x), Element::Nat(y)) => Element::Nat(x + y),
            (MonoidSpec::MaxNaturals, Element::Nat(x), Element::Nat(y)) => {
                Element::Nat(x.max(y).clone())
            }
            (MonoidSpec::NonnegRationals, Element::Rat(x), Element::Rat(y)) => Element::Rat(x + y),
            (MonoidSpec::Monogenic { index, period }, Element::Cyclic(x), Element::Cyclic(y)) => {
                let s = x + y;
                Element::Cyclic(if s >= *index {
                    (s - index) % period + index
                } else {
                    s
                })
            }
            (MonoidSpec::AbsorbedNaturals, Element::Absorbed(x), Element::Absorbed(y)) => {
                use Absorbed::*;
                Element::Absorbed(match (x, y) {
                    (Zero, other) | (other, Zero) => other.clone(),
                    (Low(n), Low(k)) => Low(n + k),
                    (Low(_), High(n)) | (High(n), Low(_)) => High(n.clone()),
                    (High(n), High(k)) => High(n + k),
                })
            }
            (MonoidSpec::FiniteTable(t), Element::Table(x), Element::Table(y)) => {
                Element::Table(t.op(*x as usize, *y as usize) as u32)
            }
            _ => panic!("elements {a:?} and {b:?} do not belong to {}", self.name()),
        }
    }

    /// Checked `a ⊕ b`.
    pub fn add(&self, a: &Element, b: &Element) -> Result<Element> {
        self.validate(a)?;
        self.validate(b)?;
        Ok(self.op(a, b))
    }

    /// `⊕`-sum of an iterator of carrier elements.
    pub fn sum<'a, I>(&self, items: I) -> Element
    where
        I: IntoIterator<Item = &'a Element>,
    {
        items
            .into_iter()
            .fold(self.zero(), |acc, x| self.op(&acc, x))
    }

    /// The natural preorder `a ≤ b ⟺ ∃c: a ⊕ c = b`, for carrier elements.
    pub fn leq(&self, a: &Element, b: &Element) -> bool {
        match (self, a, b) {
            (MonoidSpec::Boolean, Element::Bool(x), Element::Bool(y)) => !x || *y,
            (MonoidSpec::Naturals | MonoidSpec::MaxNaturals, Element::Nat(x), Element::Nat(y)) => {
                x <= y
            }
            (MonoidSpec::NonnegRationals, Element::Rat(x), Element::Rat(y)) => x <= y,
            (MonoidSpec::AbsorbedNaturals, Element::Absorbed(x), Element::Absorbed(y)) => {
                use Absorbed::*;
                match (x, y) {
                    (Zero, _) => true,
                    (_, Zero) => false,
                    (Low(n), Low(k)) | (High(n), High(k)) => n <= k,
                    (Low(_), High(_)) => true,
                    (High(_), Low(_)) => false,
                }
            }
            (MonoidSpec::FiniteTable(t), Element::Table(x), Element::Table(y)) => {
                t.leq(*x as usize, *y as usize)
            }
            (MonoidSpec::Monogenic { index, period }, Element::Cyclic(_), Element::Cyclic(_)) => {
                let size = index + period;
                (0..size).any(|c| self.op(a, &Element::Cyclic(c)) == *b)
            }
            _ => panic!("elements {a:?} and {b:?} do not belong to {}", self.name()),
        }
    }

    /// Checked natural order.
    pub fn natural_leq(&self, a: &Element, b: &Element) -> Result<bool> {
        self.validate(a)?;
        self.validate(b)?;
        Ok(self.leq(a, b))
    }

    /// The unique `c` with `b ⊕ c = a`.
    ///
    /// Only defined for weakly cancellative monoids with a total natural order,
    /// where such a `c` is unique whenever `b ≤ a`.
    pub fn monus(&self, a: &Element, b: &Element) -> Result<Element> {
        self.validate(a)?;
        self.validate(b)?;
        let report = self.classify(DEFAULT_K_BOUND)?;
        if !(report.weakly_cancellative && report.natural_order_total) {
            return Err(Error::UnsupportedMonoid(format!(
                "{} has no monus: subtraction needs a weakly cancellative monoid with a total natural order",
                self.name()
            )));
        }
        if !self.leq(b, a) {
            return Err(Error::NotSubtractable {
                minuend: self.render(a),
                subtrahend: self.render(b),
            });
        }
        match (a, b) {
            (Element::Nat(x), Element::Nat(y)) => Ok(Element::Nat(x - y)),
            (Element::Rat(x), Element::Rat(y)) => Ok(Element::Rat(x - y)),
            _ => self
                .elements()
                .and_then(|els| els.into_iter().find(|c| self.op(b, c) == *a))
                .ok_or_else(|| {
                    Error::Inconsistent(format!("no difference found in {}", self.name()))
                }),
        }
    }

    /// `n·b`, the `n`-fold sum of `b` (with `0·b = 0`).
    pub fn multiple(&self, b: &Element, n: &BigUint) -> Element {
        match (self, b) {
            (MonoidSpec::Naturals, Element::Nat(x)) => Element::Nat(x * n),
            (MonoidSpec::NonnegRationals, Element::Rat(x)) => {
                Element::Rat(x * BigRational::from_integer(BigInt::from(n.clone())))
            }
            _ => {
                let mut acc = self.zero();
                let mut power = b.clone();
                for i in 0..n.bits() {
                    if n.bit(i) {
                        acc = self.op(&acc, &power);
                    }
                    power = self.op(&power, &power);
                }
                acc
            }
        }
    }

    /// The map `n ↦ n·b`; an order embedding of ℕ whenever the monoid is
    /// weakly cancellative and `b ≠ 0`.
    pub fn embed_naturals(&self, b: &Element, n: u64) -> Result<Element> {
        self.validate(b)?;
        Ok(self.multiple(b, &BigUint::from(n)))
    }

    /// The whole carrier, for finite monoids.
    pub fn elements(&self) -> Option<Vec<Element>> {
        match self {
            MonoidSpec::Boolean => Some(vec![Element::Bool(false), Element::Bool(true)]),
            MonoidSpec::Monogenic { index, period } => {
                Some((0..index + period).map(Element::Cyclic).collect())
            }
            MonoidSpec::FiniteTable(t) => Some((0..t.len() as u32).map(Element::Table).collect()),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(
            self,
            MonoidSpec::Boolean | MonoidSpec::Monogenic { .. } | MonoidSpec::FiniteTable(_)
        )
    }

    /// Parses an element written the way [`MonoidSpec::render`] prints it.
    pub fn parse_element(&self, text: &str) -> Result<Element> {
        let text = text.trim();
        let bad = || Error::InvalidElement {
            monoid: self.name(),
            value: text.to_string(),
        };
        let e = match self {
            MonoidSpec::Boolean => match text {
                "0" | "false" => Element::Bool(false),
                "1" | "true" => Element::Bool(true),
                _ => return Err(bad()),
            },
            MonoidSpec::Naturals | MonoidSpec::MaxNaturals => {
                Element::Nat(BigUint::from_str(text).map_err(|_| bad())?)
            }
            MonoidSpec::NonnegRationals => {
                let (numer, denom) = match text.split_once('/') {
                    Some((p, q)) => (p.trim(), q.trim()),
                    None => (text, "1"),
                };
                let numer = BigUint::from_str(numer).map_err(|_| bad())?;
                let denom = BigUint::from_str(denom).map_err(|_| bad())?;
                if denom.is_zero() {
                    return Err(bad());
                }
                Element::Rat(BigRational::new(numer.into(), denom.into()))
            }
            MonoidSpec::Monogenic { .. } => Element::Cyclic(text.parse().map_err(|_| bad())?),
            MonoidSpec::AbsorbedNaturals => Element::Absorbed(if text == "0" {
                Absorbed::Zero
            } else {
                let (coeff, high) = if let Some(n) = text.strip_suffix('a') {
                    (n, false)
                } else {
                    (text.strip_suffix('b').ok_or_else(bad)?, true)
                };
                let n = if coeff.is_empty() {
                    BigUint::one()
                } else {
                    BigUint::from_str(coeff).map_err(|_| bad())?
                };
                if high {
                    Absorbed::High(n)
                } else {
                    Absorbed::Low(n)
                }
            }),
            MonoidSpec::FiniteTable(t) => Element::Table(t.index_of(text).ok_or_else(bad)? as u32),
        };
        self.validate(&e).map_err(|_| bad())?;
        Ok(e)
    }

    /// Canonical text form of an element.
    pub fn render(&self, e: &Element) -> String {
        match (self, e) {
            (MonoidSpec::FiniteTable(t), Element::Table(i)) => t
                .names()
                .get(*i as usize)
                .cloned()
                .unwrap_or_else(|| format!("#{i}")),
            _ => e.to_string(),
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Bool(b) => write!(f, "{}", u8::from(*b)),
            Element::Nat(n) => write!(f, "{n}"),
            Element::Rat(r) => {
                if r.denom().is_one() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Element::Cyclic(c) => write!(f, "{c}"),
            Element::Absorbed(Absorbed::Zero) => f.write_str("0"),
            Element::Absorbed(Absorbed::Low(n)) if n.is_one() => f.write_str("a"),
            Element::Absorbed(Absorbed::Low(n)) => write!(f, "{n}a"),
            Element::Absorbed(Absorbed::High(n)) if n.is_one() => f.write_str("b"),
            Element::Absorbed(Absorbed::High(n)) => write!(f, "{n}b"),
            Element::Table(i) => write!(f, "#{i}"),
        }
    }
}

impl fmt::Display for MonoidSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for MonoidSpec {
    type Err = Error;

    /// Parses a builtin name: `boolean | naturals | nonneg_rationals |
    /// max_naturals | monogenic:m,l | absorbed_naturals`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "boolean" => Ok(MonoidSpec::Boolean),
            "naturals" => Ok(MonoidSpec::Naturals),
            "nonneg_rationals" => Ok(MonoidSpec::NonnegRationals),
            "max_naturals" => Ok(MonoidSpec::MaxNaturals),
            "absorbed_naturals" => Ok(MonoidSpec::AbsorbedNaturals),
            _ => {
                let params = s
                    .strip_prefix("monogenic:")
                    .ok_or_else(|| Error::UnknownMonoid(s.to_string()))?;
                let (m, l) = params
                    .split_once(',')
                    .ok_or_else(|| Error::UnknownMonoid(s.to_string()))?;
                let parse = |x: &str| {
                    x.trim()
                        .parse::<u64>()
                        .map_err(|_| Error::UnknownMonoid(s.to_string()))
                };
                MonoidSpec::monogenic(parse(m)?, parse(l)?)
            }
        }
    }
}
