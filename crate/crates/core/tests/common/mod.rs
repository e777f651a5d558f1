//! Shared fixtures: the exhaustive small-schema grid and a few database
//! generators.
#![allow(dead_code)]

use kdep::chase::{
    canonical_start_classical, canonical_start_plus, classical_chase, plus_chase, ChaseConfig,
};
use kdep::ind::{satisfies, satisfies_all};
use kdep::infer::{saturate, RuleSystem};
use kdep::oracle::{IndSet, SatisfactionTable, SearchSpace};
use kdep::{Element, Ind, MonoidSpec, Schema};
use std::collections::HashMap;

pub fn ind(s: &str) -> Ind {
    Ind::parse(s).unwrap()
}

pub fn schema_22() -> Schema {
    Schema::from_relations([("R", vec!["A", "B"]), ("S", vec!["C", "D"])]).unwrap()
}

pub fn schema_32() -> Schema {
    Schema::from_relations([("R", vec!["A", "B", "C"]), ("S", vec!["D", "E"])]).unwrap()
}

/// Injective attribute sequences of length at most 2.
fn sequences(attrs: &[String]) -> Vec<Vec<String>> {
    let mut out = vec![vec![]];
    for a in attrs {
        out.push(vec![a.clone()]);
    }
    for a in attrs {
        for b in attrs {
            if a != b {
                out.push(vec![a.clone(), b.clone()]);
            }
        }
    }
    out
}

/// Every non-reflexive IND of arity at most 2 over the schema.
pub fn ind_pool(schema: &Schema) -> Vec<Ind> {
    let mut out = Vec::new();
    for (l, la) in schema.iter() {
        for (r, ra) in schema.iter() {
            for x in sequences(la) {
                for y in sequences(ra) {
                    if x.len() == y.len() {
                        let i = Ind::new(l, x.clone(), r, y).unwrap();
                        if !i.is_reflexive() {
                            out.push(i);
                        }
                    }
                }
            }
        }
    }
    out
}

/// All index sets of size at most `max` over `0..n`, smallest first.
pub fn subsets(n: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let mut frontier = vec![vec![]];
    for _ in 0..max {
        let mut next = Vec::new();
        for s in &frontier {
            let start = s.last().map_or(0, |&l: &usize| l + 1);
            for i in start..n {
                let mut t: Vec<usize> = s.clone();
                t.push(i);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Count of failing pairs with a few examples.
#[derive(Debug, Default, Clone)]
pub struct Tally {
    pub count: usize,
    pub examples: Vec<String>,
}

impl Tally {
    fn push(&mut self, what: impl FnOnce() -> String) {
        self.count += 1;
        if self.examples.len() < 3 {
            self.examples.push(what());
        }
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }
}

#[derive(Debug, Default)]
pub struct GridReport {
    pub sigmas: usize,
    pub pairs: usize,
    pub entailed: usize,
    /// Derivability and the chase test disagree.
    pub chase: Tally,
    /// A chase result that fails to satisfy `Σ`.
    pub not_model: Tally,
    pub budget_exceeded: Tally,
    /// Per oracle: pairs where it contradicts derivability.
    pub oracle: Vec<Tally>,
}

impl GridReport {
    fn new(oracles: usize) -> Self {
        GridReport {
            oracle: vec![Tally::default(); oracles],
            ..GridReport::default()
        }
    }

    pub fn chase_ok(&self) -> bool {
        self.chase.is_empty() && self.not_model.is_empty() && self.budget_exceeded.is_empty()
    }

    pub fn summary(&self) -> String {
        let oracle: Vec<String> = self.oracle.iter().map(|t| t.count.to_string()).collect();
        format!(
            "{} sets, {} pairs, {} entailed; chase disagreements {}, non-models {}, over budget {}, oracle disagreements [{}]",
            self.sigmas,
            self.pairs,
            self.entailed,
            self.chase.count,
            self.not_model.count,
            self.budget_exceeded.count,
            oracle.join(", ")
        )
    }
}

fn describe(pool: &[Ind], sigma: &[usize], tau: &Ind) -> String {
    let s: Vec<String> = sigma.iter().map(|&i| pool[i].to_string()).collect();
    format!("{{{}}} / {tau}", s.join("; "))
}

type Side = (String, Vec<String>);

/// Weakly cancellative side: derivability under weak symmetry against the
/// ⊕-chase test and, for entailed pairs, against bounded ℕ oracles.
///
/// The closure of a grid `Σ` consists of pool INDs plus `R[] ⊆ R[]`, so the
/// chase outcome is cached by the set of derivable pool INDs.
pub fn wc_grid(schema: &Schema, max_sigma: usize, oracles: &[&SatisfactionTable]) -> GridReport {
    let pool = ind_pool(schema);
    let cfg = ChaseConfig::default();
    let mut rep = GridReport::new(oracles.len());
    // derivable set -> (τ satisfied by the chase, τ whose chase ran out of budget, Σ-model failures)
    let mut memo: HashMap<IndSet, (IndSet, IndSet, bool)> = HashMap::new();
    for sigma in subsets(pool.len(), max_sigma) {
        rep.sigmas += 1;
        let inds: Vec<Ind> = sigma.iter().map(|&i| pool[i].clone()).collect();
        let closure = saturate(&inds, RuleSystem::StandardWS, schema).unwrap();
        let mut derivable = IndSet::empty(pool.len());
        for (i, p) in pool.iter().enumerate() {
            if closure.derives(p) {
                derivable.insert(i);
            }
        }
        let (holds, over, model) = memo
            .entry(derivable.clone())
            .or_insert_with(|| {
                let mut holds = IndSet::empty(pool.len());
                let mut over = IndSet::empty(pool.len());
                let mut model = true;
                let mut by_side: HashMap<Side, Option<kdep::KDatabase>> = HashMap::new();
                for (i, tau) in pool.iter().enumerate() {
                    let side = (tau.lhs_rel.clone(), tau.lhs_attrs.clone());
                    let result = by_side.entry(side).or_insert_with(|| {
                        let start = canonical_start_plus(tau, schema).unwrap();
                        let trace = plus_chase(&start, closure.as_slice(), &cfg).unwrap();
                        if trace.terminated() {
                            model &= satisfies_all(&trace.result, closure.as_slice()).unwrap();
                        }
                        trace.terminated().then_some(trace.result)
                    });
                    match result {
                        Some(db) if satisfies(db, tau).unwrap() => holds.insert(i),
                        Some(_) => {}
                        None => over.insert(i),
                    }
                }
                (holds, over, model)
            })
            .clone();
        if !model {
            rep.not_model.push(|| describe(&pool, &sigma, &pool[0]));
        }
        let refuted: Vec<IndSet> = oracles.iter().map(|t| t.refuted(&sigma)).collect();
        for (ti, tau) in pool.iter().enumerate() {
            rep.pairs += 1;
            let d = derivable.contains(ti);
            if over.contains(ti) {
                rep.budget_exceeded.push(|| describe(&pool, &sigma, tau));
                continue;
            }
            if d {
                rep.entailed += 1;
            }
            if d != holds.contains(ti) {
                rep.chase.push(|| describe(&pool, &sigma, tau));
            }
            for (k, r) in refuted.iter().enumerate() {
                if d && r.contains(ti) {
                    rep.oracle[k].push(|| describe(&pool, &sigma, tau));
                }
            }
        }
    }
    rep
}

/// Boolean side: standard derivability against the classical chase and, in
/// both directions, against Boolean oracles.
pub fn wa_grid(schema: &Schema, max_sigma: usize, oracles: &[&SatisfactionTable]) -> GridReport {
    let pool = ind_pool(schema);
    let mut rep = GridReport::new(oracles.len());
    for sigma in subsets(pool.len(), max_sigma) {
        rep.sigmas += 1;
        let inds: Vec<Ind> = sigma.iter().map(|&i| pool[i].clone()).collect();
        let closure = saturate(&inds, RuleSystem::Standard, schema).unwrap();
        let refuted: Vec<IndSet> = oracles.iter().map(|t| t.refuted(&sigma)).collect();
        let mut memo: HashMap<Side, kdep::KDatabase> = HashMap::new();
        for (ti, tau) in pool.iter().enumerate() {
            rep.pairs += 1;
            let derivable = closure.derives(tau);
            let side = (tau.lhs_rel.clone(), tau.lhs_attrs.clone());
            let mut fresh = false;
            let result = memo.entry(side).or_insert_with(|| {
                fresh = true;
                let start = canonical_start_classical(tau, schema).unwrap();
                classical_chase(&start, &inds).unwrap().result
            });
            if fresh && !satisfies_all(result, &inds).unwrap() {
                rep.not_model.push(|| describe(&pool, &sigma, tau));
            }
            let holds = satisfies(result, tau).unwrap();
            if derivable {
                rep.entailed += 1;
            }
            if derivable != holds {
                rep.chase.push(|| describe(&pool, &sigma, tau));
            }
            for (k, r) in refuted.iter().enumerate() {
                if derivable == r.contains(ti) {
                    rep.oracle[k].push(|| describe(&pool, &sigma, tau));
                }
            }
        }
    }
    rep
}

pub fn nat_pool(ns: &[u64]) -> Vec<Element> {
    ns.iter().map(|&n| Element::nat(n)).collect()
}

/// ℕ databases over `{x, y}` with weights `{0,1,2,3}` and at most four tuples.
pub fn naturals_table(schema: &Schema) -> SatisfactionTable {
    let space = SearchSpace::new(["x", "y"], nat_pool(&[0, 1, 2, 3]), 4);
    SatisfactionTable::build(
        &ind_pool(schema),
        &MonoidSpec::Naturals,
        schema,
        &space,
        false,
    )
    .unwrap()
}

/// Boolean databases over `{x, y}` with at most `max_tuples` tuples, in total
/// or per relation.
pub fn boolean_table(schema: &Schema, max_tuples: usize, per_relation: bool) -> SatisfactionTable {
    let mut space = SearchSpace::new(
        ["x", "y"],
        vec![Element::Bool(false), Element::Bool(true)],
        max_tuples,
    );
    space.per_relation = per_relation;
    SatisfactionTable::build(
        &ind_pool(schema),
        &MonoidSpec::Boolean,
        schema,
        &space,
        false,
    )
    .unwrap()
}

pub fn builtin_monoids() -> Vec<MonoidSpec> {
    [
        "boolean",
        "naturals",
        "nonneg_rationals",
        "max_naturals",
        "monogenic:2,3",
        "absorbed_naturals",
    ]
    .iter()
    .map(|s| s.parse().unwrap())
    .collect()
}

/// Nonzero weights to draw from for a monoid.
pub fn weight_pool(m: &MonoidSpec) -> Vec<Element> {
    use kdep::monoid::Absorbed;
    use num_bigint::BigUint;
    match m {
        MonoidSpec::Boolean => vec![Element::Bool(true)],
        MonoidSpec::Naturals | MonoidSpec::MaxNaturals => nat_pool(&[1, 2, 3]),
        MonoidSpec::NonnegRationals => {
            vec![Element::rat(1, 2), Element::rat(1, 1), Element::rat(3, 2)]
        }
        MonoidSpec::AbsorbedNaturals => vec![
            Element::Absorbed(Absorbed::Low(BigUint::from(1u8))),
            Element::Absorbed(Absorbed::Low(BigUint::from(2u8))),
            Element::Absorbed(Absorbed::High(BigUint::from(1u8))),
            Element::Absorbed(Absorbed::High(BigUint::from(2u8))),
        ],
        _ => m
            .elements()
            .unwrap()
            .into_iter()
            .filter(|e| !m.is_zero(e))
            .collect(),
    }
}

fn random_tuple(
    schema: &Schema,
    rel: &str,
    adom: &[&str],
    rng: &mut impl rand::Rng,
) -> kdep::Tuple {
    let arity = schema.attributes(rel).unwrap().len();
    kdep::Tuple::new((0..arity).map(|_| adom[rng.gen_range(0..adom.len())]))
}

/// A database with up to `max_tuples` tuples per relation over `{x, y}`.
pub fn random_db(
    schema: &Schema,
    m: &MonoidSpec,
    max_tuples: usize,
    rng: &mut impl rand::Rng,
) -> kdep::KDatabase {
    let pool = weight_pool(m);
    let adom = ["x", "y"];
    let mut db = kdep::KDatabase::new(schema.clone(), m.clone());
    let names: Vec<String> = schema.relation_names().map(str::to_string).collect();
    for rel in &names {
        for _ in 0..rng.gen_range(0..=max_tuples) {
            let t = random_tuple(schema, rel, &adom, rng);
            db.add(rel, t, &pool[rng.gen_range(0..pool.len())]).unwrap();
        }
    }
    db
}

/// A balanced database: every relation receives the same multiset of weights.
pub fn random_balanced_db(
    schema: &Schema,
    m: &MonoidSpec,
    max_tuples: usize,
    rng: &mut impl rand::Rng,
) -> kdep::KDatabase {
    let pool = weight_pool(m);
    let adom = ["x", "y"];
    let k = rng.gen_range(1..=max_tuples);
    let weights: Vec<Element> = (0..k)
        .map(|_| pool[rng.gen_range(0..pool.len())].clone())
        .collect();
    let mut db = kdep::KDatabase::new(schema.clone(), m.clone());
    let names: Vec<String> = schema.relation_names().map(str::to_string).collect();
    for rel in &names {
        for w in &weights {
            let t = random_tuple(schema, rel, &adom, rng);
            db.add(rel, t, w).unwrap();
        }
    }
    db
}

/// Every positive commutative monoid table on `{0, …, n-1}` with identity 0,
/// for `2 ≤ n ≤ max_n`. Isomorphic copies are not removed.
pub fn generated_tables(max_n: usize) -> Vec<kdep::monoid::FiniteTable> {
    let mut out = Vec::new();
    for n in 2..=max_n {
        let pairs: Vec<(usize, usize)> = (1..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
        // positivity: nonzero ⊕ nonzero is nonzero, so entries range over 1..n
        let mut digits = vec![0usize; pairs.len()];
        loop {
            let mut op = vec![vec![0usize; n]; n];
            op[0] = (0..n).collect();
            for (i, row) in op.iter_mut().enumerate() {
                row[0] = i;
            }
            for (&(i, j), &d) in pairs.iter().zip(&digits) {
                op[i][j] = d + 1;
                op[j][i] = d + 1;
            }
            let names = (0..n)
                .map(|i| {
                    if i == 0 {
                        "0".to_string()
                    } else {
                        format!("e{i}")
                    }
                })
                .collect();
            if let Ok(t) = kdep::monoid::FiniteTable::new(names, 0, op) {
                out.push(t);
            }
            let mut k = digits.len();
            let mut carried = true;
            while carried && k > 0 {
                k -= 1;
                digits[k] += 1;
                carried = digits[k] == n - 1;
                if carried {
                    digits[k] = 0;
                }
            }
            if carried {
                break;
            }
        }
    }
    out
}
