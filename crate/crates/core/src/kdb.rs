//! Annotated relations and databases.
//!
//! Tuples are positional: a [`Tuple`] stores one constant per attribute of its
//! relation, in the relation's attribute order. Every stored weight is
//! nonzero, so the key set of a relation is its support.

use crate::error::{Error, Result};
use crate::monoid::{Element, FiniteTable, MonoidSpec};
use serde_json::{json, Map, Value};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

pub type Constant = Arc<str>;

/// The reserved constant used for chase padding.
pub const STAR: &str = "*";

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tuple(pub Vec<Constant>);

impl Tuple {
    pub fn new<I, S>(values: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Tuple(
            values
                .into_iter()
                .map(|s| Constant::from(s.as_ref()))
                .collect(),
        )
    }

    pub fn empty() -> Self {
        Tuple(Vec::new())
    }

    /// The all-star tuple of the given arity.
    pub fn stars(arity: usize) -> Self {
        let star = Constant::from(STAR);
        Tuple(vec![star; arity])
    }

    pub fn values(&self) -> &[Constant] {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    /// Number of positions holding a constant other than `*`.
    pub fn degree(&self) -> usize {
        self.0.iter().filter(|c| &***c != STAR).count()
    }

    /// The sub-tuple at the given positions, in that order.
    pub fn project(&self, positions: &[usize]) -> Tuple {
        Tuple(positions.iter().map(|&p| self.0[p].clone()).collect())
    }
}

impl fmt::Display for Tuple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(v)?;
        }
        f.write_str(")")
    }
}

/// Relation names mapped to their ordered attribute lists.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Schema {
    relations: BTreeMap<String, Vec<String>>,
}

impl Schema {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a schema from `(relation, attributes)` pairs.
    pub fn from_relations<I, R, A, S>(relations: I) -> Result<Self>
    where
        I: IntoIterator<Item = (R, A)>,
        R: Into<String>,
        A: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut schema = Schema::new();
        for (name, attrs) in relations {
            schema.add_relation(name, attrs.into_iter().map(Into::into).collect())?;
        }
        Ok(schema)
    }

    pub fn add_relation(&mut self, name: impl Into<String>, attributes: Vec<String>) -> Result<()> {
        let name = name.into();
        if !is_identifier(&name) {
            return Err(Error::Syntax(format!("bad relation name `{name}`")));
        }
        let mut seen = BTreeSet::new();
        for a in &attributes {
            if !is_identifier(a) {
                return Err(Error::Syntax(format!(
                    "bad attribute name `{a}` in `{name}`"
                )));
            }
            if !seen.insert(a) {
                return Err(Error::DuplicateAttribute {
                    context: name.clone(),
                    attribute: a.clone(),
                });
            }
        }
        if let Some(existing) = self.relations.get(&name) {
            if *existing != attributes {
                return Err(Error::SchemaMismatch(format!(
                    "relation `{name}` declared twice"
                )));
            }
        }
        self.relations.insert(name, attributes);
        Ok(())
    }

    pub fn contains(&self, name: &str) -> bool {
        self.relations.contains_key(name)
    }

    pub fn attributes(&self, name: &str) -> Result<&[String]> {
        self.relations
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownRelation(name.to_string()))
    }

    /// Positions of `attrs` within relation `name`.
    pub fn positions<S: AsRef<str>>(&self, name: &str, attrs: &[S]) -> Result<Vec<usize>> {
        let all = self.attributes(name)?;
        attrs
            .iter()
            .map(|a| {
                all.iter()
                    .position(|x| x == a.as_ref())
                    .ok_or_else(|| Error::UnknownAttribute {
                        relation: name.to_string(),
                        attribute: a.as_ref().to_string(),
                    })
            })
            .collect()
    }

    pub fn relation_names(&self) -> impl Iterator<Item = &str> {
        self.relations.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[String])> {
        self.relations
            .iter()
            .map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    /// The sub-schema on the given relation names.
    pub fn restrict<'a, I>(&self, names: I) -> Result<Schema>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut out = Schema::new();
        for n in names {
            out.relations
                .insert(n.to_string(), self.attributes(n)?.to_vec());
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        json!(self.relations)
    }

    pub fn from_json_value(value: &Value) -> Result<Schema> {
        let map = value
            .as_object()
            .ok_or_else(|| Error::Syntax("schema must be an object of attribute lists".into()))?;
        let mut schema = Schema::new();
        for (name, attrs) in map {
            let attrs = attrs
                .as_array()
                .ok_or_else(|| Error::Syntax(format!("attributes of `{name}` must be a list")))?
                .iter()
                .map(|a| {
                    a.as_str().map(str::to_string).ok_or_else(|| {
                        Error::Syntax(format!("attribute names of `{name}` must be strings"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            schema.add_relation(name.clone(), attrs)?;
        }
        Ok(schema)
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_alphanumeric() || c == '_' || c == '-' || c == '.' || c == '\'')
}

/// A finite-support map from tuples to nonzero weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KRelation {
    attributes: Vec<String>,
    weights: BTreeMap<Tuple, Element>,
}

impl KRelation {
    pub fn new(attributes: Vec<String>) -> Self {
        KRelation {
            attributes,
            weights: BTreeMap::new(),
        }
    }

    pub fn attributes(&self) -> &[String] {
        &self.attributes
    }

    pub fn arity(&self) -> usize {
        self.attributes.len()
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Nonzero entries in tuple order.
    pub fn iter(&self) -> impl Iterator<Item = (&Tuple, &Element)> {
        self.weights.iter()
    }

    pub fn get(&self, t: &Tuple) -> Option<&Element> {
        self.weights.get(t)
    }

    pub fn weight(&self, t: &Tuple, m: &MonoidSpec) -> Element {
        self.weights.get(t).cloned().unwrap_or_else(|| m.zero())
    }

    fn check_tuple(&self, t: &Tuple) -> Result<()> {
        if t.arity() != self.arity() {
            return Err(Error::ArityMismatch(format!(
                "tuple {t} has {} values but the relation has attributes {:?}",
                t.arity(),
                self.attributes
            )));
        }
        Ok(())
    }

    /// Overwrites the weight of `t`; a zero weight removes the tuple.
    pub fn set(&mut self, t: Tuple, w: Element, m: &MonoidSpec) -> Result<()> {
        self.check_tuple(&t)?;
        m.validate(&w)?;
        if m.is_zero(&w) {
            self.weights.remove(&t);
        } else {
            self.weights.insert(t, w);
        }
        Ok(())
    }

    /// Adds `w` to the weight of `t`.
    pub fn add(&mut self, t: Tuple, w: &Element, m: &MonoidSpec) -> Result<()> {
        self.check_tuple(&t)?;
        m.validate(w)?;
        self.add_unchecked(t, w, m);
        Ok(())
    }

    pub(crate) fn add_unchecked(&mut self, t: Tuple, w: &Element, m: &MonoidSpec) {
        if m.is_zero(w) {
            return;
        }
        match self.weights.get_mut(&t) {
            Some(old) => *old = m.op(old, w),
            None => {
                self.weights.insert(t, w.clone());
            }
        }
    }

    /// The marginal on the given positions, keyed in that order, zero-free.
    pub fn marginal(&self, positions: &[usize], m: &MonoidSpec) -> BTreeMap<Tuple, Element> {
        let mut out: BTreeMap<Tuple, Element> = BTreeMap::new();
        for (t, w) in &self.weights {
            let key = t.project(positions);
            match out.get_mut(&key) {
                Some(acc) => *acc = m.op(acc, w),
                None => {
                    out.insert(key, w.clone());
                }
            }
        }
        out
    }

    /// Marginal weight at a single point.
    pub fn marginal_at(&self, positions: &[usize], key: &Tuple, m: &MonoidSpec) -> Element {
        let matching = self
            .weights
            .iter()
            .filter(|(t, _)| positions.iter().zip(&key.0).all(|(&p, v)| t.0[p] == *v))
            .map(|(_, w)| w);
        m.sum(matching)
    }

    /// The marginalisation `R[Y]` as a relation over `attrs`.
    pub fn marginalize<S: AsRef<str>>(&self, attrs: &[S], m: &MonoidSpec) -> Result<KRelation> {
        let mut positions = Vec::with_capacity(attrs.len());
        let mut seen = BTreeSet::new();
        for a in attrs {
            let a = a.as_ref();
            if !seen.insert(a) {
                return Err(Error::DuplicateAttribute {
                    context: "marginal".into(),
                    attribute: a.into(),
                });
            }
            let p = self.attributes.iter().position(|x| x == a).ok_or_else(|| {
                Error::UnknownAttribute {
                    relation: format!("{:?}", self.attributes),
                    attribute: a.to_string(),
                }
            })?;
            positions.push(p);
        }
        // zero sums cannot arise in a positive monoid, but keep the invariant explicit
        let weights = self
            .marginal(&positions, m)
            .into_iter()
            .filter(|(_, w)| !m.is_zero(w))
            .collect();
        Ok(KRelation {
            attributes: attrs.iter().map(|a| a.as_ref().to_string()).collect(),
            weights,
        })
    }

    /// The weight of the empty marginal.
    pub fn total(&self, m: &MonoidSpec) -> Element {
        m.sum(self.weights.values())
    }

    pub fn support(&self) -> BTreeSet<Tuple> {
        self.weights.keys().cloned().collect()
    }
}

/// A database over a schema whose weights come from one monoid.
///
/// Every relation of the schema is present (possibly empty). Boolean databases
/// play the role of ordinary set databases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KDatabase {
    schema: Schema,
    monoid: MonoidSpec,
    relations: BTreeMap<String, KRelation>,
}

impl KDatabase {
    pub fn new(schema: Schema, monoid: MonoidSpec) -> Self {
        let relations = schema
            .iter()
            .map(|(n, attrs)| (n.to_string(), KRelation::new(attrs.to_vec())))
            .collect();
        KDatabase {
            schema,
            monoid,
            relations,
        }
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn monoid(&self) -> &MonoidSpec {
        &self.monoid
    }

    pub fn relation(&self, name: &str) -> Result<&KRelation> {
        self.relations
            .get(name)
            .ok_or_else(|| Error::UnknownRelation(name.to_string()))
    }

    pub fn relations(&self) -> impl Iterator<Item = (&str, &KRelation)> {
        self.relations.iter().map(|(k, v)| (k.as_str(), v))
    }

    fn relation_mut(&mut self, name: &str) -> Result<&mut KRelation> {
        self.relations
            .get_mut(name)
            .ok_or_else(|| Error::UnknownRelation(name.to_string()))
    }

    /// Adds `w` to the weight of `t` in relation `rel`.
    pub fn add(&mut self, rel: &str, t: Tuple, w: &Element) -> Result<()> {
        let m = self.monoid.clone();
        self.relation_mut(rel)?.add(t, w, &m)
    }

    /// Overwrites the weight of `t` in relation `rel`.
    pub fn set(&mut self, rel: &str, t: Tuple, w: Element) -> Result<()> {
        let m = self.monoid.clone();
        self.relation_mut(rel)?.set(t, w, &m)
    }

    pub(crate) fn add_unchecked(&mut self, rel: &str, t: Tuple, w: &Element) {
        let m = &self.monoid;
        self.relations
            .get_mut(rel)
            .expect("relation in schema")
            .add_unchecked(t, w, m);
    }

    pub fn weight(&self, rel: &str, t: &Tuple) -> Result<Element> {
        Ok(self.relation(rel)?.weight(t, &self.monoid))
    }

    /// Number of stored (nonzero) entries over all relations.
    pub fn tuple_count(&self) -> usize {
        self.relations.values().map(KRelation::len).sum()
    }

    /// The support as a Boolean database.
    pub fn support(&self) -> KDatabase {
        self.map_weights(MonoidSpec::Boolean, |_| Element::Bool(true))
    }

    /// Applies `f` to every stored weight, producing a database over `target`.
    ///
    /// Entries mapped to zero are dropped.
    pub fn map_weights<F>(&self, target: MonoidSpec, mut f: F) -> KDatabase
    where
        F: FnMut(&Element) -> Element,
    {
        let mut out = KDatabase::new(self.schema.clone(), target);
        for (name, rel) in &self.relations {
            for (t, w) in rel.iter() {
                let w = f(w);
                out.add_unchecked(name, t.clone(), &w);
            }
        }
        out
    }

    /// Pointwise `⊕` of two databases over the same schema and monoid.
    pub fn db_add(&self, other: &KDatabase) -> Result<KDatabase> {
        if self.schema != other.schema {
            return Err(Error::SchemaMismatch(
                "databases have different schemas".into(),
            ));
        }
        if self.monoid != other.monoid {
            return Err(Error::MonoidMismatch {
                left: self.monoid.name(),
                right: other.monoid.name(),
            });
        }
        let mut out = self.clone();
        for (name, rel) in &other.relations {
            for (t, w) in rel.iter() {
                out.add_unchecked(name, t.clone(), w);
            }
        }
        Ok(out)
    }

    /// Whether all relations have the same total weight.
    pub fn is_balanced(&self) -> bool {
        let mut totals = self.relations.values().map(|r| r.total(&self.monoid));
        match totals.next() {
            Some(first) => totals.all(|t| t == first),
            None => true,
        }
    }

    /// Constants occurring anywhere in the database, including `*`.
    pub fn active_domain(&self) -> BTreeSet<Constant> {
        self.relations
            .values()
            .flat_map(|r| r.iter().flat_map(|(t, _)| t.0.iter().cloned()))
            .collect()
    }

    /// The database restricted to the given relations.
    pub fn restrict<'a, I>(&self, names: I) -> Result<KDatabase>
    where
        I: IntoIterator<Item = &'a str>,
    {
        let schema = self.schema.restrict(names)?;
        let relations = schema
            .relation_names()
            .map(|n| (n.to_string(), self.relations[n].clone()))
            .collect();
        Ok(KDatabase {
            schema,
            monoid: self.monoid.clone(),
            relations,
        })
    }

    /// Parses the database JSON format; the constant `*` is rejected.
    pub fn from_json(text: &str) -> Result<KDatabase> {
        let value: Value = serde_json::from_str(text)?;
        Self::from_json_value(&value, false)
    }

    /// Parses the database JSON format, optionally admitting `*` (for chase
    /// output read back in).
    pub fn from_json_value(value: &Value, allow_star: bool) -> Result<KDatabase> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Syntax("database must be a JSON object".into()))?;
        for key in obj.keys() {
            if !matches!(key.as_str(), "monoid" | "schema" | "relations") {
                return Err(Error::Syntax(format!("unexpected key `{key}` in database")));
            }
        }
        let monoid = monoid_from_json(
            obj.get("monoid")
                .ok_or_else(|| Error::Syntax("missing `monoid`".into()))?,
        )?;
        let schema = Schema::from_json_value(
            obj.get("schema")
                .ok_or_else(|| Error::Syntax("missing `schema`".into()))?,
        )?;
        let mut db = KDatabase::new(schema, monoid);
        let empty = Map::new();
        let relations = match obj.get("relations") {
            None => &empty,
            Some(v) => v
                .as_object()
                .ok_or_else(|| Error::Syntax("`relations` must be an object".into()))?,
        };
        for (name, rows) in relations {
            let attrs = db.schema.attributes(name)?.to_vec();
            let rows = rows
                .as_array()
                .ok_or_else(|| Error::Syntax(format!("rows of `{name}` must be a list")))?;
            for row in rows {
                let row = row
                    .as_object()
                    .ok_or_else(|| Error::Syntax(format!("row of `{name}` must be an object")))?;
                let tuple = row.get("tuple").and_then(Value::as_object).ok_or_else(|| {
                    Error::Syntax(format!("row of `{name}` needs a `tuple` object"))
                })?;
                for key in tuple.keys() {
                    if !attrs.contains(key) {
                        return Err(Error::UnknownAttribute {
                            relation: name.clone(),
                            attribute: key.clone(),
                        });
                    }
                }
                let mut values = Vec::with_capacity(attrs.len());
                for a in &attrs {
                    let v = tuple.get(a).ok_or_else(|| {
                        Error::ArityMismatch(format!(
                            "row of `{name}` has no value for attribute `{a}`"
                        ))
                    })?;
                    let v = match v {
                        Value::String(s) => s.clone(),
                        Value::Number(n) => n.to_string(),
                        _ => {
                            return Err(Error::Syntax(format!(
                                "values of `{name}` must be strings or numbers"
                            )))
                        }
                    };
                    if v == STAR && !allow_star {
                        return Err(Error::ReservedConstant(name.clone()));
                    }
                    values.push(v);
                }
                let weight = match row.get("weight") {
                    None => db
                        .monoid
                        .some_nonzero()
                        .ok_or_else(|| Error::Syntax(format!("row of `{name}` needs a weight")))?,
                    Some(Value::String(s)) => db.monoid.parse_element(s)?,
                    Some(Value::Number(n)) => db.monoid.parse_element(&n.to_string())?,
                    Some(Value::Bool(b)) => db.monoid.parse_element(if *b { "1" } else { "0" })?,
                    Some(_) => return Err(Error::Syntax(format!("bad weight in `{name}`"))),
                };
                db.add(name, Tuple::new(values), &weight)?;
            }
        }
        Ok(db)
    }

    /// The database JSON format, with relations and rows in canonical order.
    pub fn to_json(&self) -> Value {
        let mut relations = Map::new();
        for (name, rel) in &self.relations {
            let rows: Vec<Value> = rel
                .iter()
                .map(|(t, w)| {
                    let tuple: Map<String, Value> = rel
                        .attributes
                        .iter()
                        .zip(t.values())
                        .map(|(a, v)| (a.clone(), Value::String(v.to_string())))
                        .collect();
                    json!({"tuple": tuple, "weight": self.monoid.render(w)})
                })
                .collect();
            relations.insert(name.clone(), Value::Array(rows));
        }
        json!({
            "monoid": monoid_to_json(&self.monoid),
            "schema": self.schema.to_json(),
            "relations": relations,
        })
    }

    /// Plain-text rendering, one block per relation.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        for (name, rel) in &self.relations {
            out.push_str(&format!("{name}({})\n", rel.attributes.join(", ")));
            for (t, w) in rel.iter() {
                let cells: Vec<&str> = t.values().iter().map(|v| &**v).collect();
                out.push_str(&format!(
                    "  {}  : {}\n",
                    cells.join("  "),
                    self.monoid.render(w)
                ));
            }
        }
        out
    }
}

/// A monoid given either by builtin name or by an inline table object.
pub fn monoid_from_json(value: &Value) -> Result<MonoidSpec> {
    match value {
        Value::String(s) => s.parse(),
        Value::Object(_) => Ok(MonoidSpec::table(FiniteTable::from_value(value.clone())?)),
        _ => Err(Error::Syntax(
            "`monoid` must be a name or a table object".into(),
        )),
    }
}

pub fn monoid_to_json(m: &MonoidSpec) -> Value {
    match m {
        MonoidSpec::FiniteTable(t) => t.to_json(),
        _ => Value::String(m.name()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn budget_db() -> KDatabase {
        let schema = Schema::from_relations([
            ("Expense", vec!["proj", "year", "cat"]),
            ("Budget", vec!["proj", "year"]),
        ])
        .unwrap();
        let mut db = KDatabase::new(schema, MonoidSpec::Naturals);
        for (p, y, c, w) in [
            ("P1", "2024", "x", 1200),
            ("P1", "2024", "y", 800),
            ("P2", "2024", "x", 600),
        ] {
            db.add("Expense", Tuple::new([p, y, c]), &Element::nat(w))
                .unwrap();
        }
        db.add("Budget", Tuple::new(["P1", "2024"]), &Element::nat(2500))
            .unwrap();
        db
    }

    #[test]
    fn marginal_sums_matching_rows() {
        let db = budget_db();
        let m = db.monoid().clone();
        let r = db.relation("Expense").unwrap();
        let marg = r.marginalize(&["proj", "year"], &m).unwrap();
        assert_eq!(
            marg.weight(&Tuple::new(["P1", "2024"]), &m),
            Element::nat(2000)
        );
        // key order follows the requested attribute order
        let swapped = r.marginalize(&["year", "proj"], &m).unwrap();
        assert_eq!(
            swapped.weight(&Tuple::new(["2024", "P2"]), &m),
            Element::nat(600)
        );
        let empty = r.marginalize::<&str>(&[], &m).unwrap();
        assert_eq!(empty.weight(&Tuple::empty(), &m), Element::nat(2600));
        assert_eq!(r.marginalize(&["proj", "year", "cat"], &m).unwrap(), *r);
        assert!(matches!(
            r.marginalize(&["nope"], &m),
            Err(Error::UnknownAttribute { .. })
        ));
    }

    #[test]
    fn zero_weight_deletes() {
        let mut db = budget_db();
        db.set("Budget", Tuple::new(["P1", "2024"]), Element::nat(0))
            .unwrap();
        assert!(db.relation("Budget").unwrap().is_empty());
        db.add("Budget", Tuple::new(["P1", "2024"]), &Element::nat(0))
            .unwrap();
        assert!(db.relation("Budget").unwrap().is_empty());
    }

    #[test]
    fn degrees() {
        assert_eq!(Tuple::new(["a", "b", "c"]).degree(), 3);
        assert_eq!(Tuple::stars(3).degree(), 0);
        assert_eq!(Tuple::new(["b", "c", "*"]).degree(), 2);
    }

    #[test]
    fn db_add_pointwise() {
        let schema = Schema::from_relations([("R", vec!["A"])]).unwrap();
        let t = Tuple::new(["t"]);
        let mut d1 = KDatabase::new(schema.clone(), MonoidSpec::Naturals);
        d1.add("R", t.clone(), &Element::nat(2)).unwrap();
        let mut d2 = KDatabase::new(schema.clone(), MonoidSpec::Naturals);
        d2.add("R", t.clone(), &Element::nat(3)).unwrap();
        assert_eq!(
            d1.db_add(&d2).unwrap().weight("R", &t).unwrap(),
            Element::nat(5)
        );
        let empty = KDatabase::new(schema.clone(), MonoidSpec::Naturals);
        assert_eq!(d1.db_add(&empty).unwrap(), d1);

        let mut b = KDatabase::new(schema.clone(), MonoidSpec::Boolean);
        b.add("R", t.clone(), &Element::Bool(true)).unwrap();
        assert_eq!(b.db_add(&b).unwrap(), b);
        assert!(matches!(d1.db_add(&b), Err(Error::MonoidMismatch { .. })));
        let other = KDatabase::new(
            Schema::from_relations([("S", vec!["A"])]).unwrap(),
            MonoidSpec::Naturals,
        );
        assert!(matches!(d1.db_add(&other), Err(Error::SchemaMismatch(_))));
    }

    #[test]
    fn balance() {
        let db = budget_db();
        assert!(!db.is_balanced());
        assert!(db.restrict(["Budget"]).unwrap().is_balanced());
        assert!(KDatabase::new(Schema::new(), MonoidSpec::Boolean).is_balanced());
    }

    #[test]
    fn json_round_trip_and_star_rejection() {
        let db = budget_db();
        let again = KDatabase::from_json(&db.to_json().to_string()).unwrap();
        assert_eq!(db, again);
        let bad = r#"{"monoid": "naturals", "schema": {"R": ["A"]}, "relations": {"R": [{"tuple": {"A": "*"}, "weight": "1"}]}}"#;
        assert!(matches!(
            KDatabase::from_json(bad),
            Err(Error::ReservedConstant(_))
        ));
        let dup = r#"{"monoid": "naturals", "schema": {"R": ["A"]}, "relations": {"R": [
            {"tuple": {"A": "x"}, "weight": "1"}, {"tuple": {"A": "x"}, "weight": "2"}, {"tuple": {"A": "y"}, "weight": "0"}]}}"#;
        let db = KDatabase::from_json(dup).unwrap();
        assert_eq!(db.weight("R", &Tuple::new(["x"])).unwrap(), Element::nat(3));
        assert_eq!(db.tuple_count(), 1);
    }

    #[test]
    fn json_errors() {
        assert!(KDatabase::from_json("{").is_err());
        let unknown = r#"{"monoid": "naturals", "schema": {"R": ["A"]}, "relations": {"S": []}}"#;
        assert!(matches!(
            KDatabase::from_json(unknown),
            Err(Error::UnknownRelation(_))
        ));
        let missing = r#"{"monoid": "naturals", "schema": {"R": ["A","B"]}, "relations": {"R": [{"tuple": {"A": "x"}}]}}"#;
        assert!(matches!(
            KDatabase::from_json(missing),
            Err(Error::ArityMismatch(_))
        ));
        let dup_attr = r#"{"monoid": "naturals", "schema": {"R": ["A","A"]}}"#;
        assert!(matches!(
            KDatabase::from_json(dup_attr),
            Err(Error::DuplicateAttribute { .. })
        ));
    }

    #[test]
    fn support_of_empty_database() {
        let db = KDatabase::new(budget_db().schema().clone(), MonoidSpec::Naturals);
        assert_eq!(db.support().tuple_count(), 0);
    }
}
