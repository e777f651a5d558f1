//! Finite monoids given by an explicit operation table.

use crate::error::{Error, Result};
use serde::Deserialize;
use std::collections::{BTreeMap, HashMap};

/// A finite positive commutative monoid over named elements.
///
/// Construction validates every axiom exhaustively, so a `FiniteTable` value
/// is always a positive commutative monoid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteTable {
    names: Vec<String>,
    zero: usize,
    op: Vec<usize>,
    leq: Vec<bool>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TableJson {
    elements: Vec<String>,
    zero: String,
    op: BTreeMap<String, String>,
}

impl FiniteTable {
    pub const DEFAULT_MAX_ELEMENTS: usize = 64;

    /// Builds a table from a full `n × n` matrix of element indices.
    pub fn new(names: Vec<String>, zero: usize, op: Vec<Vec<usize>>) -> Result<Self> {
        Self::with_limit(names, zero, op, Self::DEFAULT_MAX_ELEMENTS)
    }

    pub fn with_limit(
        names: Vec<String>,
        zero: usize,
        op: Vec<Vec<usize>>,
        max_elements: usize,
    ) -> Result<Self> {
        let n = names.len();
        if n == 0 {
            return Err(Error::InvalidTable("the carrier is empty".into()));
        }
        if n > max_elements {
            return Err(Error::InvalidTable(format!(
                "{n} elements exceed the limit of {max_elements}"
            )));
        }
        let mut seen = HashMap::new();
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() || name.contains(',') || name.trim() != name {
                return Err(Error::InvalidTable(format!("bad element name `{name}`")));
            }
            if seen.insert(name.as_str(), i).is_some() {
                return Err(Error::InvalidTable(format!(
                    "element `{name}` listed twice"
                )));
            }
        }
        if zero >= n {
            return Err(Error::InvalidTable(format!(
                "zero index {zero} out of range"
            )));
        }
        if op.len() != n || op.iter().any(|row| row.len() != n) {
            return Err(Error::InvalidTable(format!(
                "the operation must be a {n}×{n} table"
            )));
        }
        if let Some(v) = op.iter().flatten().find(|&&v| v >= n) {
            return Err(Error::InvalidTable(format!("table entry {v} out of range")));
        }
        let flat: Vec<usize> = op.into_iter().flatten().collect();
        let at = |a: usize, b: usize| flat[a * n + b];
        let nm = |i: usize| names[i].as_str();

        for a in 0..n {
            if at(zero, a) != a || at(a, zero) != a {
                return Err(Error::InvalidTable(format!(
                    "identity fails: {} ⊕ {} = {}",
                    nm(a),
                    nm(zero),
                    nm(at(a, zero))
                )));
            }
        }
        for a in 0..n {
            for b in 0..n {
                if at(a, b) != at(b, a) {
                    return Err(Error::InvalidTable(format!(
                        "commutativity fails: {a_} ⊕ {b_} = {} but {b_} ⊕ {a_} = {}",
                        nm(at(a, b)),
                        nm(at(b, a)),
                        a_ = nm(a),
                        b_ = nm(b)
                    )));
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                let ab = at(a, b);
                for c in 0..n {
                    let left = at(ab, c);
                    let right = at(a, at(b, c));
                    if left != right {
                        return Err(Error::InvalidTable(format!(
                            "associativity fails for ({}, {}, {}): ({0} ⊕ {1}) ⊕ {2} = {} but {0} ⊕ ({1} ⊕ {2}) = {}",
                            nm(a),
                            nm(b),
                            nm(c),
                            nm(left),
                            nm(right)
                        )));
                    }
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                if at(a, b) == zero && (a != zero || b != zero) {
                    return Err(Error::InvalidTable(format!(
                        "positivity fails: {} ⊕ {} = {}",
                        nm(a),
                        nm(b),
                        nm(zero)
                    )));
                }
            }
        }

        let mut leq = vec![false; n * n];
        for a in 0..n {
            for c in 0..n {
                leq[a * n + at(a, c)] = true;
            }
        }
        Ok(FiniteTable {
            names,
            zero,
            op: flat,
            leq,
        })
    }

    /// Parses the JSON form
    /// `{"elements": [...], "zero": "0", "op": {"a,b": "b", ...}}`.
    ///
    /// Every unordered pair of nonzero elements needs an entry (either order);
    /// pairs involving the zero may be omitted and default to the identity law.
    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_json_with_limit(text, Self::DEFAULT_MAX_ELEMENTS)
    }

    pub fn from_json_with_limit(text: &str, max_elements: usize) -> Result<Self> {
        let raw: TableJson = serde_json::from_str(text)?;
        Self::from_parts(raw, max_elements)
    }

    pub fn from_value(value: serde_json::Value) -> Result<Self> {
        let raw: TableJson = serde_json::from_value(value)?;
        Self::from_parts(raw, Self::DEFAULT_MAX_ELEMENTS)
    }

    fn from_parts(raw: TableJson, max_elements: usize) -> Result<Self> {
        let n = raw.elements.len();
        if n > max_elements {
            return Err(Error::InvalidTable(format!(
                "{n} elements exceed the limit of {max_elements}"
            )));
        }
        let index: HashMap<&str, usize> = raw
            .elements
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), i))
            .collect();
        let lookup = |s: &str| {
            index
                .get(s.trim())
                .copied()
                .ok_or_else(|| Error::InvalidTable(format!("unknown element `{}`", s.trim())))
        };
        let zero = lookup(&raw.zero)?;
        let mut op: Vec<Vec<Option<usize>>> = vec![vec![None; n]; n];
        for (key, value) in &raw.op {
            let (x, y) = key.split_once(',').ok_or_else(|| {
                Error::InvalidTable(format!("op key `{key}` is not of the form `x,y`"))
            })?;
            let (x, y, v) = (lookup(x)?, lookup(y)?, lookup(value)?);
            for (p, q) in [(x, y), (y, x)] {
                match op[p][q] {
                    Some(old) if old != v => {
                        return Err(Error::InvalidTable(format!(
                            "commutativity fails: {} ⊕ {} is given as both {} and {}",
                            raw.elements[p], raw.elements[q], raw.elements[old], raw.elements[v]
                        )))
                    }
                    _ => op[p][q] = Some(v),
                }
            }
        }
        let mut full = vec![vec![0; n]; n];
        for a in 0..n {
            for b in 0..n {
                full[a][b] = match op[a][b] {
                    Some(v) => v,
                    None if a == zero => b,
                    None if b == zero => a,
                    None => {
                        return Err(Error::InvalidTable(format!(
                            "missing entry for `{},{}`",
                            raw.elements[a], raw.elements[b]
                        )))
                    }
                };
            }
        }
        Self::with_limit(raw.elements, zero, full, max_elements)
    }

    /// JSON form listing every unordered pair of nonzero elements.
    pub fn to_json(&self) -> serde_json::Value {
        let mut op = serde_json::Map::new();
        for a in 0..self.len() {
            for b in a..self.len() {
                if a != self.zero && b != self.zero {
                    op.insert(
                        format!("{},{}", self.names[a], self.names[b]),
                        self.names[self.op(a, b)].clone().into(),
                    );
                }
            }
        }
        serde_json::json!({
            "elements": self.names,
            "zero": self.names[self.zero],
            "op": op,
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn op(&self, a: usize, b: usize) -> usize {
        self.op[a * self.len() + b]
    }

    /// Precomputed natural order.
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a * self.len() + b]
    }
}
