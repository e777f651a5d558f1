//! Brute-force semantic checks.
//!
//! Enumerates every K-database whose support has at most `max_tuples` tuples
//! over a fixed active domain and whose weights come from a finite pool. This
//! is a falsifier: finding nothing only means the searched space has no
//! counterexample.
//!
//! Candidates are ordered by support size, then by the lexicographic position
//! of the chosen tuples, then lexicographically by weight assignment, so the
//! first counterexample reported is stable.

use crate::error::{Error, Result};
use crate::ind::{satisfies, Ind};
use crate::kdb::{KDatabase, Schema, Tuple};
use crate::monoid::{Element, MonoidSpec};
use std::collections::{BTreeSet, HashSet};

/// Hard cap on the number of enumerated databases.
pub const DEFAULT_SEARCH_CAP: u128 = 5_000_000;

#[derive(Clone, Debug)]
pub struct SearchSpace {
    pub adom: Vec<String>,
    /// Zero entries are ignored; absent tuples already carry weight zero.
    pub weight_pool: Vec<Element>,
    pub max_tuples: usize,
    /// Bound each relation's support by `max_tuples` instead of the whole
    /// database's.
    pub per_relation: bool,
    pub cap: u128,
}

impl SearchSpace {
    pub fn new<S: Into<String>>(
        adom: impl IntoIterator<Item = S>,
        weight_pool: Vec<Element>,
        max_tuples: usize,
    ) -> Self {
        SearchSpace {
            adom: adom.into_iter().map(Into::into).collect(),
            weight_pool,
            max_tuples,
            per_relation: false,
            cap: DEFAULT_SEARCH_CAP,
        }
    }

    pub fn per_relation(mut self) -> Self {
        self.per_relation = true;
        self
    }

    pub fn with_cap(mut self, cap: u128) -> Self {
        self.cap = cap;
        self
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// The candidate databases of a search space, in enumeration order.
struct Enumerator {
    schema: Schema,
    monoid: MonoidSpec,
    slots: Vec<(String, Tuple)>,
    /// Index into the relation list for each slot.
    owner: Vec<usize>,
    /// Slot count per relation, when each relation's support is bounded.
    per_relation: Option<Vec<usize>>,
    per_relation_bound: usize,
    pool: Vec<Element>,
    /// Bound on the whole support.
    max_tuples: usize,
}

impl Enumerator {
    fn new(schema: &Schema, m: &MonoidSpec, space: &SearchSpace) -> Result<Enumerator> {
        let mut pool: Vec<Element> = Vec::new();
        for w in &space.weight_pool {
            m.validate(w)?;
            if !m.is_zero(w) && !pool.contains(w) {
                pool.push(w.clone());
            }
        }
        let adom: BTreeSet<&str> = space.adom.iter().map(String::as_str).collect();
        if adom.contains(crate::kdb::STAR) {
            return Err(Error::ReservedConstant(crate::kdb::STAR.into()));
        }
        let adom: Vec<&str> = adom.into_iter().collect();
        let mut slots = Vec::new();
        let mut owner = Vec::new();
        for (ri, (name, attrs)) in schema.iter().enumerate() {
            let mut current = vec![0usize; attrs.len()];
            loop {
                slots.push((
                    name.to_string(),
                    Tuple::new(current.iter().map(|&i| adom[i])),
                ));
                owner.push(ri);
                // odometer over adom^arity, last position fastest
                let mut pos = attrs.len();
                loop {
                    if pos == 0 {
                        break;
                    }
                    pos -= 1;
                    current[pos] += 1;
                    if current[pos] < adom.len() {
                        break;
                    }
                    current[pos] = 0;
                }
                if current.iter().all(|&i| i == 0) || adom.is_empty() {
                    break;
                }
            }
        }
        if adom.is_empty() {
            let keep: Vec<bool> = slots.iter().map(|(_, t)| t.arity() == 0).collect();
            let mut k = keep.iter();
            slots.retain(|_| *k.next().unwrap());
            let mut k = keep.iter();
            owner.retain(|_| *k.next().unwrap());
        }
        let per_relation = space.per_relation.then(|| {
            let mut counts = vec![0usize; schema.len()];
            for &o in &owner {
                counts[o] += 1;
            }
            counts
        });
        let max_tuples = match &per_relation {
            Some(counts) => counts.iter().map(|&c| c.min(space.max_tuples)).sum(),
            None => space.max_tuples,
        };
        let e = Enumerator {
            schema: schema.clone(),
            monoid: m.clone(),
            slots,
            owner,
            per_relation,
            per_relation_bound: space.max_tuples,
            pool,
            max_tuples,
        };
        let size = e.size();
        if size > space.cap {
            return Err(Error::SearchSpaceTooLarge {
                size,
                cap: space.cap,
            });
        }
        Ok(e)
    }

    fn size(&self) -> u128 {
        let p = self.pool.len() as u128;
        let bounded = |n: usize, bound: usize| {
            (0..=bound.min(n))
                .map(|k| binomial(n, k).saturating_mul(p.saturating_pow(k as u32)))
                .fold(0u128, u128::saturating_add)
        };
        match &self.per_relation {
            Some(counts) => counts
                .iter()
                .map(|&n| bounded(n, self.per_relation_bound))
                .fold(1u128, u128::saturating_mul),
            None => bounded(self.slots.len(), self.max_tuples),
        }
    }

    fn within_bounds(&self, chosen: &[usize]) -> bool {
        match &self.per_relation {
            None => true,
            Some(counts) => {
                let mut used = vec![0usize; counts.len()];
                for &c in chosen {
                    used[self.owner[c]] += 1;
                }
                used.iter().all(|&u| u <= self.per_relation_bound)
            }
        }
    }

    /// Calls `visit` on each candidate until it returns `true`.
    fn for_each(&self, mut visit: impl FnMut(KDatabase) -> Result<bool>) -> Result<()> {
        let n = self.slots.len();
        let p = self.pool.len();
        for k in 0..=self.max_tuples.min(n) {
            if k > 0 && p == 0 {
                break;
            }
            let mut chosen: Vec<usize> = (0..k).collect();
            loop {
                if !self.within_bounds(&chosen) {
                    if !advance_combination(&mut chosen, n) {
                        break;
                    }
                    continue;
                }
                let mut weights = vec![0usize; k];
                loop {
                    let mut db = KDatabase::new(self.schema.clone(), self.monoid.clone());
                    for (slot, w) in chosen.iter().zip(&weights) {
                        let (rel, t) = &self.slots[*slot];
                        db.set(rel, t.clone(), self.pool[*w].clone())?;
                    }
                    if visit(db)? {
                        return Ok(());
                    }
                    if !advance_odometer(&mut weights, p) {
                        break;
                    }
                }
                if !advance_combination(&mut chosen, n) {
                    break;
                }
            }
        }
        Ok(())
    }
}

fn advance_odometer(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

fn advance_combination(chosen: &mut [usize], n: usize) -> bool {
    let k = chosen.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if chosen[i] < n - k + i {
            chosen[i] += 1;
            for j in i + 1..k {
                chosen[j] = chosen[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn search(
    sigma: &[Ind],
    tau: &Ind,
    m: &MonoidSpec,
    schema: &Schema,
    space: &SearchSpace,
    balanced: bool,
) -> Result<Option<KDatabase>> {
    let names: BTreeSet<&str> = sigma
        .iter()
        .chain(std::iter::once(tau))
        .flat_map(|i| [i.lhs_rel.as_str(), i.rhs_rel.as_str()])
        .collect();
    let schema = schema.restrict(names)?;
    for s in sigma.iter().chain(std::iter::once(tau)) {
        s.validate(&schema)?;
    }
    let e = Enumerator::new(&schema, m, space)?;
    let mut found = None;
    e.for_each(|db| {
        if balanced && !db.is_balanced() {
            return Ok(false);
        }
        for s in sigma {
            if !satisfies(&db, s)? {
                return Ok(false);
            }
        }
        if satisfies(&db, tau)? {
            return Ok(false);
        }
        found = Some(db);
        Ok(true)
    })?;
    Ok(found)
}

/// The first database in the search space that satisfies `sigma` and
/// violates `tau`, over the relations the INDs mention.
pub fn brute_force_entails(
    sigma: &[Ind],
    tau: &Ind,
    m: &MonoidSpec,
    schema: &Schema,
    space: &SearchSpace,
) -> Result<Option<KDatabase>> {
    search(sigma, tau, m, schema, space, false)
}

/// As [`brute_force_entails`], restricted to balanced databases.
pub fn brute_force_balanced_entails(
    sigma: &[Ind],
    tau: &Ind,
    m: &MonoidSpec,
    schema: &Schema,
    space: &SearchSpace,
) -> Result<Option<KDatabase>> {
    search(sigma, tau, m, schema, space, true)
}

/// A fixed-width set of IND indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndSet(Vec<u64>);

impl IndSet {
    pub fn empty(len: usize) -> Self {
        IndSet(vec![0; len.div_ceil(64)])
    }

    pub fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn is_superset(&self, other: &IndSet) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & b == *b)
    }

    fn union_complement(&mut self, other: &IndSet) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a |= !b;
        }
    }
}

/// Which INDs of a fixed pool each database of a search space satisfies.
///
/// Answers many entailment queries over the same schema and pool without
/// re-enumerating.
#[derive(Clone, Debug)]
pub struct SatisfactionTable {
    pool: Vec<Ind>,
    rows: Vec<(IndSet, KDatabase)>,
}

impl SatisfactionTable {
    pub fn build(
        pool: &[Ind],
        m: &MonoidSpec,
        schema: &Schema,
        space: &SearchSpace,
        balanced: bool,
    ) -> Result<Self> {
        for s in pool {
            s.validate(schema)?;
        }
        let e = Enumerator::new(schema, m, space)?;
        let mut rows: Vec<(IndSet, KDatabase)> = Vec::new();
        let mut seen: HashSet<IndSet> = HashSet::new();
        e.for_each(|db| {
            if balanced && !db.is_balanced() {
                return Ok(false);
            }
            let mut set = IndSet::empty(pool.len());
            for (i, s) in pool.iter().enumerate() {
                if satisfies(&db, s)? {
                    set.insert(i);
                }
            }
            // a database is redundant if an earlier one satisfies exactly the same INDs
            if seen.insert(set.clone()) {
                rows.push((set, db));
            }
            Ok(false)
        })?;
        Ok(SatisfactionTable {
            pool: pool.to_vec(),
            rows,
        })
    }

    pub fn pool(&self) -> &[Ind] {
        &self.pool
    }

    /// Number of distinct satisfaction patterns.
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn set_of(&self, sigma: &[usize]) -> IndSet {
        let mut s = IndSet::empty(self.pool.len());
        for &i in sigma {
            s.insert(i);
        }
        s
    }

    /// The first database satisfying every pool IND in `sigma` and violating
    /// pool IND `tau`.
    pub fn counterexample(&self, sigma: &[usize], tau: usize) -> Option<&KDatabase> {
        let want = self.set_of(sigma);
        self.rows
            .iter()
            .find(|(s, _)| s.is_superset(&want) && !s.contains(tau))
            .map(|(_, db)| db)
    }

    /// The pool INDs refuted by some database satisfying `sigma`.
    pub fn refuted(&self, sigma: &[usize]) -> IndSet {
        let want = self.set_of(sigma);
        let mut out = IndSet::empty(self.pool.len());
        for (s, _) in &self.rows {
            if s.is_superset(&want) {
                out.union_complement(s);
            }
        }
        out
    }
}
