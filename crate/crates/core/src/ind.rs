//! Inclusion dependencies: syntax, parsing, and satisfaction.

use crate::error::{Error, Result};
use crate::kdb::{is_identifier, KDatabase, Schema, Tuple};
use crate::monoid::Element;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

/// `lhs_rel[lhs_attrs] ⊆ rhs_rel[rhs_attrs]`.
///
/// Ordering is structural (relation names, then attribute lists), which is
/// what every deterministic iteration in the crate relies on.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ind {
    pub lhs_rel: String,
    pub lhs_attrs: Vec<String>,
    pub rhs_rel: String,
    pub rhs_attrs: Vec<String>,
}

impl Ind {
    /// Builds an IND, checking equal arity and distinct attributes per side.
    pub fn new<S: Into<String>>(
        lhs_rel: impl Into<String>,
        lhs_attrs: impl IntoIterator<Item = S>,
        rhs_rel: impl Into<String>,
        rhs_attrs: impl IntoIterator<Item = S>,
    ) -> Result<Ind> {
        let ind = Ind {
            lhs_rel: lhs_rel.into(),
            lhs_attrs: lhs_attrs.into_iter().map(Into::into).collect(),
            rhs_rel: rhs_rel.into(),
            rhs_attrs: rhs_attrs.into_iter().map(Into::into).collect(),
        };
        ind.check_shape()?;
        Ok(ind)
    }

    fn check_shape(&self) -> Result<()> {
        if self.lhs_attrs.len() != self.rhs_attrs.len() {
            return Err(Error::ArityMismatch(format!(
                "`{self}` has {} attributes on the left and {} on the right",
                self.lhs_attrs.len(),
                self.rhs_attrs.len()
            )));
        }
        for (rel, attrs) in [
            (&self.lhs_rel, &self.lhs_attrs),
            (&self.rhs_rel, &self.rhs_attrs),
        ] {
            let mut seen = BTreeSet::new();
            for a in attrs {
                if !seen.insert(a) {
                    return Err(Error::DuplicateAttribute {
                        context: format!("{rel}[{}]", attrs.join(",")),
                        attribute: a.clone(),
                    });
                }
            }
        }
        Ok(())
    }

    /// Checks relation and attribute names against a schema.
    pub fn validate(&self, schema: &Schema) -> Result<()> {
        self.check_shape()?;
        schema.positions(&self.lhs_rel, &self.lhs_attrs)?;
        schema.positions(&self.rhs_rel, &self.rhs_attrs)?;
        Ok(())
    }

    pub fn arity(&self) -> usize {
        self.lhs_attrs.len()
    }

    /// `R[Ā] ⊆ R[Ā]`.
    pub fn is_reflexive(&self) -> bool {
        self.lhs_rel == self.rhs_rel && self.lhs_attrs == self.rhs_attrs
    }

    /// The IND with its sides swapped.
    pub fn inverse(&self) -> Ind {
        Ind {
            lhs_rel: self.rhs_rel.clone(),
            lhs_attrs: self.rhs_attrs.clone(),
            rhs_rel: self.lhs_rel.clone(),
            rhs_attrs: self.lhs_attrs.clone(),
        }
    }

    /// `R[] ⊆ S[]`.
    pub fn empty(lhs_rel: impl Into<String>, rhs_rel: impl Into<String>) -> Ind {
        Ind {
            lhs_rel: lhs_rel.into(),
            lhs_attrs: vec![],
            rhs_rel: rhs_rel.into(),
            rhs_attrs: vec![],
        }
    }

    /// Parses `R[A1,...,An] <= S[B1,...,Bn]` without a schema; `⊆` and `≤`
    /// are accepted in place of `<=`.
    pub fn parse(text: &str) -> Result<Ind> {
        let text = text.trim();
        let (lhs, rhs) = ["<=", "⊆", "≤"]
            .iter()
            .find_map(|sep| text.split_once(sep))
            .ok_or_else(|| Error::Syntax(format!("expected `<=` in `{text}`")))?;
        let (lr, la) = parse_side(lhs)?;
        let (rr, ra) = parse_side(rhs)?;
        Ind::new(lr, la, rr, ra)
    }
}

fn parse_side(text: &str) -> Result<(String, Vec<String>)> {
    let text = text.trim();
    let bad = || Error::Syntax(format!("expected `Name[attributes]`, found `{text}`"));
    let (name, rest) = text.split_once('[').ok_or_else(bad)?;
    let inner = rest.strip_suffix(']').ok_or_else(bad)?;
    let name = name.trim();
    if !is_identifier(name) || inner.contains('[') || inner.contains(']') {
        return Err(bad());
    }
    let attrs: Vec<String> = if inner.trim().is_empty() {
        vec![]
    } else {
        inner.split(',').map(|a| a.trim().to_string()).collect()
    };
    if attrs.iter().any(|a| !is_identifier(a)) {
        return Err(bad());
    }
    Ok((name.to_string(), attrs))
}

impl FromStr for Ind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Ind> {
        Ind::parse(s)
    }
}

impl fmt::Display for Ind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}[{}] <= {}[{}]",
            self.lhs_rel,
            self.lhs_attrs.join(","),
            self.rhs_rel,
            self.rhs_attrs.join(",")
        )
    }
}

/// Parses an IND and validates it against the schema.
pub fn parse_ind(text: &str, schema: &Schema) -> Result<Ind> {
    let ind = Ind::parse(text)?;
    ind.validate(schema)?;
    Ok(ind)
}

/// Parses a newline-separated IND list; blank lines and `#` comments are
/// skipped. With a schema, each IND is validated.
pub fn parse_ind_list(text: &str, schema: Option<&Schema>) -> Result<Vec<Ind>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let ind = match schema {
            Some(s) => parse_ind(line, s),
            None => Ind::parse(line),
        }
        .map_err(|e| match e {
            Error::Syntax(msg) => Error::Syntax(format!("line {}: {msg}", lineno + 1)),
            other => other,
        })?;
        out.push(ind);
    }
    Ok(out)
}

/// A point where the left marginal exceeds the right one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub key: Tuple,
    pub lhs: Element,
    pub rhs: Element,
}

/// All points `ā` with `R[Ā](ā) ≰ S[B̄](ā)`, in key order.
pub fn violations(db: &KDatabase, ind: &Ind) -> Result<Vec<Violation>> {
    let schema = db.schema();
    let m = db.monoid();
    let lp = schema.positions(&ind.lhs_rel, &ind.lhs_attrs)?;
    let rp = schema.positions(&ind.rhs_rel, &ind.rhs_attrs)?;
    ind.check_shape()?;
    let lhs = db.relation(&ind.lhs_rel)?.marginal(&lp, m);
    let rhs = db.relation(&ind.rhs_rel)?.marginal(&rp, m);
    let zero = m.zero();
    // points only in the right marginal compare 0 ≤ x, which always holds
    Ok(lhs
        .into_iter()
        .filter_map(|(key, lw)| {
            let rw = rhs.get(&key).unwrap_or(&zero);
            (!m.leq(&lw, rw)).then(|| Violation {
                rhs: rw.clone(),
                key,
                lhs: lw,
            })
        })
        .collect())
}

/// Whether the database satisfies the IND.
pub fn satisfies(db: &KDatabase, ind: &Ind) -> Result<bool> {
    Ok(violations(db, ind)?.is_empty())
}

/// Whether the database satisfies every IND.
pub fn satisfies_all<'a, I>(db: &KDatabase, inds: I) -> Result<bool>
where
    I: IntoIterator<Item = &'a Ind>,
{
    for ind in inds {
        if !satisfies(db, ind)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::monoid::MonoidSpec;

    fn schema() -> Schema {
        Schema::from_relations([
            ("Expense", vec!["proj", "year", "cat"]),
            ("Budget", vec!["proj", "year"]),
        ])
        .unwrap()
    }

    #[test]
    fn parses_and_prints() {
        let ind = parse_ind("Expense[proj,year] <= Budget[proj,year]", &schema()).unwrap();
        assert_eq!(ind.lhs_rel, "Expense");
        assert_eq!(ind.rhs_attrs, vec!["proj", "year"]);
        assert_eq!(ind.to_string(), "Expense[proj,year] <= Budget[proj,year]");
        let spaced = Ind::parse("  R [ A , B ]<=S[C,D]").unwrap();
        assert_eq!(spaced.to_string(), "R[A,B] <= S[C,D]");
        assert_eq!(
            Ind::parse("R[A] ⊆ S[B]").unwrap(),
            Ind::parse("R[A] <= S[B]").unwrap()
        );
        let empty = Ind::parse("Budget[] <= Expense[]").unwrap();
        assert_eq!(empty.arity(), 0);
        assert_eq!(empty.to_string(), "Budget[] <= Expense[]");
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            Ind::parse("R[A,A] <= S[B,C]"),
            Err(Error::DuplicateAttribute { .. })
        ));
        assert!(matches!(
            Ind::parse("R[A] <= S[B,C]"),
            Err(Error::ArityMismatch(_))
        ));
        assert!(matches!(Ind::parse("R[A] S[B]"), Err(Error::Syntax(_))));
        assert!(matches!(Ind::parse("R[A <= S[B]"), Err(Error::Syntax(_))));
        assert!(matches!(
            parse_ind("T[A] <= Budget[proj]", &schema()),
            Err(Error::UnknownRelation(_))
        ));
        assert!(matches!(
            parse_ind("Expense[x] <= Budget[proj]", &schema()),
            Err(Error::UnknownAttribute { .. })
        ));
    }

    #[test]
    fn list_parsing_skips_comments() {
        let list =
            parse_ind_list("# header\nR[A] <= S[B]\n\n  S[] <= R[]  # balance\n", None).unwrap();
        assert_eq!(list.len(), 2);
        let err = parse_ind_list("R[A] <= S[B]\nbroken", None).unwrap_err();
        assert!(err.to_string().contains("line 2"));
    }

    #[test]
    fn inverse_involution() {
        let ind = Ind::parse("R[A] <= S[B]").unwrap();
        assert_eq!(ind.inverse().to_string(), "S[B] <= R[A]");
        assert_eq!(ind.inverse().inverse(), ind);
        assert_eq!(Ind::empty("R", "S").inverse(), Ind::empty("S", "R"));
    }

    #[test]
    fn satisfaction_uses_natural_order() {
        let s = Schema::from_relations([("R", vec!["A"]), ("S", vec!["B"])]).unwrap();
        let mut db = KDatabase::new(s, MonoidSpec::Naturals);
        db.add("R", Tuple::new(["x"]), &Element::nat(2)).unwrap();
        db.add("S", Tuple::new(["x"]), &Element::nat(3)).unwrap();
        db.add("S", Tuple::new(["y"]), &Element::nat(1)).unwrap();
        let fwd = Ind::parse("R[A] <= S[B]").unwrap();
        let back = fwd.inverse();
        assert!(satisfies(&db, &fwd).unwrap());
        let v = violations(&db, &back).unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v[0].key, Tuple::new(["x"]));
        assert!(satisfies(&db, &Ind::parse("R[] <= S[]").unwrap()).unwrap());
        assert!(!satisfies(&db, &Ind::parse("S[] <= R[]").unwrap()).unwrap());
        assert!(satisfies(&db, &Ind::parse("R[A] <= R[A]").unwrap()).unwrap());
    }
}
