//! Vocabularies and the observed fact set.
//!
//! A [`FactStore`] interns relation, entity and tuple names into dense ids
//! (first-appearance order) and indexes the observed facts in both
//! orientations: tuple to relations and relation to tuples. Both index lists
//! are sorted and duplicate-free. A store is built once through
//! [`FactStoreBuilder`] or [`ingest`] and is immutable afterwards.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

macro_rules! dense_id {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
        pub struct $name(pub u32);

        impl $name {
            #[inline]
            pub fn index(self) -> usize {
                self.0 as usize
            }

            #[inline]
            pub fn from_index(index: usize) -> Self {
                $name(u32::try_from(index).expect("id space exhausted"))
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                self.0.fmt(f)
            }
        }
    };
}

dense_id!(
    /// Index of a relation (surface pattern or structured relation).
    RelationId
);
dense_id!(
    /// Index of an entity.
    EntityId
);
dense_id!(
    /// Index of an ordered entity pair.
    TupleId
);

/// An observed `(relation, tuple)` pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fact {
    pub relation: RelationId,
    pub tuple: TupleId,
}

impl Fact {
    pub fn new(relation: RelationId, tuple: TupleId) -> Self {
        Fact { relation, tuple }
    }
}

/// Where a relation comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationSource {
    /// A relation of a structured knowledge base.
    Structured,
    /// A textual surface pattern.
    Pattern,
}

impl RelationSource {
    pub fn as_str(self) -> &'static str {
        match self {
            RelationSource::Structured => "structured",
            RelationSource::Pattern => "pattern",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "structured" => Some(RelationSource::Structured),
            "pattern" => Some(RelationSource::Pattern),
            _ => None,
        }
    }
}

/// Classifies relation names as structured when they start with one of the
/// configured prefixes, and as patterns otherwise.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SourceRule {
    structured_prefixes: Vec<String>,
}

impl SourceRule {
    pub fn new<I, S>(prefixes: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        SourceRule {
            structured_prefixes: prefixes.into_iter().map(Into::into).collect(),
        }
    }

    /// Every relation is a pattern.
    pub fn all_patterns() -> Self {
        SourceRule::default()
    }

    pub fn prefixes(&self) -> &[String] {
        &self.structured_prefixes
    }

    pub fn classify(&self, name: &str) -> RelationSource {
        if self
            .structured_prefixes
            .iter()
            .any(|p| name.starts_with(p.as_str()))
        {
            RelationSource::Structured
        } else {
            RelationSource::Pattern
        }
    }
}

/// String interner with dense ids in first-appearance order.
#[derive(Clone, Debug, Default)]
pub struct Vocab {
    names: Vec<String>,
    ids: HashMap<String, u32>,
}

impl Vocab {
    pub fn new() -> Self {
        Vocab::default()
    }

    /// Returns the id of `name`, interning it if unseen, and whether it was new.
    pub fn intern(&mut self, name: &str) -> (u32, bool) {
        if let Some(&id) = self.ids.get(name) {
            return (id, false);
        }
        let id = u32::try_from(self.names.len()).expect("vocabulary overflow");
        self.names.push(name.to_owned());
        self.ids.insert(name.to_owned(), id);
        (id, true)
    }

    pub fn get(&self, name: &str) -> Option<u32> {
        self.ids.get(name).copied()
    }

    pub fn name(&self, id: u32) -> Option<&str> {
        self.names.get(id as usize).map(String::as_str)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// Sizes of a store, as reported after ingestion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StoreCounts {
    pub relations: usize,
    pub entities: usize,
    pub tuples: usize,
    pub facts: usize,
}

impl fmt::Display for StoreCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "relations={} entities={} tuples={} facts={}",
            self.relations, self.entities, self.tuples, self.facts
        )
    }
}

/// Incrementally builds a [`FactStore`].
#[derive(Clone, Debug)]
pub struct FactStoreBuilder {
    rule: SourceRule,
    relations: Vocab,
    sources: Vec<RelationSource>,
    entities: Vocab,
    tuples: Vec<(EntityId, EntityId)>,
    tuple_ids: HashMap<(EntityId, EntityId), TupleId>,
    facts: HashSet<Fact>,
}

impl FactStoreBuilder {
    pub fn new(rule: SourceRule) -> Self {
        FactStoreBuilder {
            rule,
            relations: Vocab::new(),
            sources: Vec::new(),
            entities: Vocab::new(),
            tuples: Vec::new(),
            tuple_ids: HashMap::new(),
            facts: HashSet::new(),
        }
    }

    /// Interns a relation, tagging its source with the builder's rule.
    pub fn relation(&mut self, name: &str) -> RelationId {
        let source = self.rule.classify(name);
        self.relation_with_source(name, source)
    }

    /// Interns a relation with an explicit source tag. The tag of an already
    /// interned relation is left unchanged.
    pub fn relation_with_source(&mut self, name: &str, source: RelationSource) -> RelationId {
        let (id, fresh) = self.relations.intern(name);
        if fresh {
            self.sources.push(source);
        }
        RelationId(id)
    }

    pub fn entity(&mut self, name: &str) -> EntityId {
        EntityId(self.entities.intern(name).0)
    }

    /// Interns the ordered pair `(first, second)`.
    pub fn tuple(&mut self, first: EntityId, second: EntityId) -> TupleId {
        assert!(
            first.index() < self.entities.len() && second.index() < self.entities.len(),
            "tuple refers to an unknown entity"
        );
        let next = TupleId::from_index(self.tuples.len());
        let tuples = &mut self.tuples;
        *self.tuple_ids.entry((first, second)).or_insert_with(|| {
            tuples.push((first, second));
            next
        })
    }

    /// Records a fact by ids. Returns `false` if it was already present.
    pub fn add(&mut self, relation: RelationId, tuple: TupleId) -> bool {
        assert!(relation.index() < self.relations.len(), "unknown relation");
        assert!(tuple.index() < self.tuples.len(), "unknown tuple");
        self.facts.insert(Fact::new(relation, tuple))
    }

    /// Records a fact by names, interning everything it mentions.
    pub fn add_named(&mut self, relation: &str, first: &str, second: &str) -> Fact {
        let r = self.relation(relation);
        let e1 = self.entity(first);
        let e2 = self.entity(second);
        let t = self.tuple(e1, e2);
        self.add(r, t);
        Fact::new(r, t)
    }

    pub fn num_facts(&self) -> usize {
        self.facts.len()
    }

    pub fn build(self) -> FactStore {
        let mut by_tuple = vec![Vec::new(); self.tuples.len()];
        let mut by_relation = vec![Vec::new(); self.relations.len()];
        for fact in &self.facts {
            by_tuple[fact.tuple.index()].push(fact.relation);
            by_relation[fact.relation.index()].push(fact.tuple);
        }
        by_tuple.iter_mut().for_each(|l| l.sort_unstable());
        by_relation.iter_mut().for_each(|l| l.sort_unstable());
        FactStore {
            relations: self.relations,
            sources: self.sources,
            entities: self.entities,
            tuples: self.tuples,
            tuple_ids: self.tuple_ids,
            by_tuple,
            by_relation,
            num_facts: self.facts.len(),
        }
    }
}

/// Immutable fact store with both orientations indexed.
#[derive(Clone, Debug)]
pub struct FactStore {
    relations: Vocab,
    sources: Vec<RelationSource>,
    entities: Vocab,
    tuples: Vec<(EntityId, EntityId)>,
    tuple_ids: HashMap<(EntityId, EntityId), TupleId>,
    by_tuple: Vec<Vec<RelationId>>,
    by_relation: Vec<Vec<TupleId>>,
    num_facts: usize,
}

impl FactStore {
    pub fn counts(&self) -> StoreCounts {
        StoreCounts {
            relations: self.num_relations(),
            entities: self.num_entities(),
            tuples: self.num_tuples(),
            facts: self.num_facts,
        }
    }

    pub fn num_relations(&self) -> usize {
        self.relations.len()
    }

    pub fn num_entities(&self) -> usize {
        self.entities.len()
    }

    pub fn num_tuples(&self) -> usize {
        self.tuples.len()
    }

    pub fn num_facts(&self) -> usize {
        self.num_facts
    }

    pub fn relations(&self) -> &Vocab {
        &self.relations
    }

    pub fn entities(&self) -> &Vocab {
        &self.entities
    }

    pub fn relation_id(&self, name: &str) -> Option<RelationId> {
        self.relations.get(name).map(RelationId)
    }

    pub fn entity_id(&self, name: &str) -> Option<EntityId> {
        self.entities.get(name).map(EntityId)
    }

    pub fn tuple_id(&self, first: EntityId, second: EntityId) -> Option<TupleId> {
        self.tuple_ids.get(&(first, second)).copied()
    }

    /// Looks up a tuple by its entity names.
    pub fn tuple_by_names(&self, first: &str, second: &str) -> Option<TupleId> {
        self.tuple_id(self.entity_id(first)?, self.entity_id(second)?)
    }

    pub fn relation_name(&self, r: RelationId) -> &str {
        self.relations.name(r.0).expect("relation id out of range")
    }

    pub fn entity_name(&self, e: EntityId) -> &str {
        self.entities.name(e.0).expect("entity id out of range")
    }

    pub fn relation_source(&self, r: RelationId) -> RelationSource {
        self.sources[r.index()]
    }

    /// The ordered entity pair of a tuple.
    pub fn tuple_slots(&self, t: TupleId) -> (EntityId, EntityId) {
        self.tuples[t.index()]
    }

    pub fn tuple_table(&self) -> &[(EntityId, EntityId)] {
        &self.tuples
    }

    pub fn relation_ids(&self) -> impl Iterator<Item = RelationId> + '_ {
        (0..self.num_relations()).map(RelationId::from_index)
    }

    pub fn tuple_ids(&self) -> impl Iterator<Item = TupleId> + '_ {
        (0..self.num_tuples()).map(TupleId::from_index)
    }

    /// The relations observed for `t`, sorted by id.
    pub fn observed_relations(&self, t: TupleId) -> Result<&[RelationId]> {
        self.by_tuple
            .get(t.index())
            .map(Vec::as_slice)
            .ok_or(Error::UnknownId {
                kind: "tuple",
                id: t.index(),
            })
    }

    /// Unchecked variant of [`FactStore::observed_relations`] for hot loops.
    #[inline]
    pub(crate) fn obs(&self, t: TupleId) -> &[RelationId] {
        &self.by_tuple[t.index()]
    }

    /// The tuples observed with `r`, sorted by id.
    pub fn observed_tuples(&self, r: RelationId) -> Result<&[TupleId]> {
        self.by_relation
            .get(r.index())
            .map(Vec::as_slice)
            .ok_or(Error::UnknownId {
                kind: "relation",
                id: r.index(),
            })
    }

    #[inline]
    pub fn contains(&self, r: RelationId, t: TupleId) -> bool {
        self.by_tuple
            .get(t.index())
            .is_some_and(|rs| rs.binary_search(&r).is_ok())
    }

    /// All facts, ordered by relation id then tuple id.
    pub fn facts(&self) -> impl Iterator<Item = Fact> + '_ {
        self.by_relation.iter().enumerate().flat_map(|(r, ts)| {
            let r = RelationId::from_index(r);
            ts.iter().map(move |&t| Fact::new(r, t))
        })
    }

    /// For every relation, the sorted list of other relations it shares at
    /// least one tuple with.
    pub fn cooccurrence_neighbors(&self) -> Vec<Vec<RelationId>> {
        let mut neighbors: Vec<BTreeSet<RelationId>> = vec![BTreeSet::new(); self.num_relations()];
        for rs in &self.by_tuple {
            for &r in rs {
                for &other in rs {
                    if other != r {
                        neighbors[r.index()].insert(other);
                    }
                }
            }
        }
        neighbors
            .into_iter()
            .map(|s| s.into_iter().collect())
            .collect()
    }

    /// Ordered pairs `(r, r')`, `r != r'`, that share at least one tuple.
    /// Both orientations are present; the result is sorted.
    pub fn cooccurring_relation_pairs(&self) -> Vec<(RelationId, RelationId)> {
        self.cooccurrence_neighbors()
            .into_iter()
            .enumerate()
            .flat_map(|(r, ns)| {
                let r = RelationId::from_index(r);
                ns.into_iter().map(move |n| (r, n))
            })
            .collect()
    }

    /// A builder pre-populated with this store's vocabularies and facts.
    pub fn to_builder(&self) -> FactStoreBuilder {
        let mut b = FactStoreBuilder::new(SourceRule::default());
        for (name, &source) in self.relations.names().iter().zip(&self.sources) {
            b.relation_with_source(name, source);
        }
        for name in self.entities.names() {
            b.entity(name);
        }
        for &(e1, e2) in &self.tuples {
            b.tuple(e1, e2);
        }
        for fact in self.facts() {
            b.add(fact.relation, fact.tuple);
        }
        b
    }

    /// Writes the facts in the TAB-separated fact-file format.
    pub fn write_facts<W: Write>(&self, mut out: W) -> Result<()> {
        for fact in self.facts() {
            let (e1, e2) = self.tuple_slots(fact.tuple);
            writeln!(
                out,
                "{}\t{}\t{}",
                self.relation_name(fact.relation),
                self.entity_name(e1),
                self.entity_name(e2)
            )?;
        }
        Ok(())
    }
}

/// Parses one fact-file line into its three fields. Returns `None` for
/// comments and blank lines.
pub fn parse_fact_line(line: &str, line_no: usize) -> Result<Option<[&str; 3]>> {
    let line = line.strip_suffix('\r').unwrap_or(line);
    if line.is_empty() || line.starts_with('#') {
        return Ok(None);
    }
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != 3 {
        return Err(Error::Parse {
            line: line_no,
            message: format!("expected 3 TAB-separated fields, found {}", fields.len()),
        });
    }
    if let Some(i) = fields.iter().position(|f| f.is_empty()) {
        return Err(Error::Parse {
            line: line_no,
            message: format!("field {} is empty", i + 1),
        });
    }
    Ok(Some([fields[0], fields[1], fields[2]]))
}

/// Builds a store from a fact file: `relation<TAB>entity1<TAB>entity2` per
/// line, `#` comments and blank lines ignored. Duplicate facts collapse.
pub fn ingest<R: BufRead>(reader: R, rule: SourceRule) -> Result<FactStore> {
    let mut builder = FactStoreBuilder::new(rule);
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if let Some([r, e1, e2]) = parse_fact_line(&line, i + 1)? {
            builder.add_named(r, e1, e2);
        }
    }
    if builder.num_facts() == 0 {
        return Err(Error::EmptyInput);
    }
    Ok(builder.build())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn store(lines: &[(&str, &str, &str)]) -> FactStore {
        let mut b = FactStoreBuilder::new(SourceRule::all_patterns());
        for (r, a, c) in lines {
            b.add_named(r, a, c);
        }
        b.build()
    }

    #[test]
    fn duplicate_facts_collapse() {
        let s = store(&[("born-in", "A", "B"), ("born-in", "A", "B")]);
        assert_eq!(
            s.counts(),
            StoreCounts {
                relations: 1,
                entities: 2,
                tuples: 1,
                facts: 1
            }
        );
    }

    #[test]
    fn tuple_order_is_significant() {
        let s = store(&[("r1", "A", "B"), ("r1", "B", "A")]);
        assert_eq!(s.num_tuples(), 2);
        assert_ne!(s.tuple_by_names("A", "B"), s.tuple_by_names("B", "A"));
    }

    #[test]
    fn observed_relations_per_tuple() {
        let s = store(&[("r1", "A", "B"), ("r2", "A", "B")]);
        let t = s.tuple_by_names("A", "B").unwrap();
        let names: Vec<_> = s
            .observed_relations(t)
            .unwrap()
            .iter()
            .map(|&r| s.relation_name(r))
            .collect();
        assert_eq!(names, ["r1", "r2"]);
    }

    #[test]
    fn tuple_without_facts_has_empty_observations() {
        let mut b = FactStoreBuilder::new(SourceRule::all_patterns());
        b.add_named("r1", "A", "B");
        let c = b.entity("C");
        let a = b.entity("A");
        let lonely = b.tuple(c, a);
        let s = b.build();
        assert!(s.observed_relations(lonely).unwrap().is_empty());
        assert!(matches!(
            s.observed_relations(TupleId(99)),
            Err(Error::UnknownId { kind: "tuple", .. })
        ));
    }

    #[test]
    fn cooccurrence_pairs() {
        let s = store(&[("r1", "A", "B"), ("r2", "A", "B")]);
        assert_eq!(
            s.cooccurring_relation_pairs(),
            vec![(RelationId(0), RelationId(1)), (RelationId(1), RelationId(0))]
        );

        let s = store(&[("r1", "A", "B"), ("r2", "C", "D")]);
        assert!(s.cooccurring_relation_pairs().is_empty());

        let s = store(&[("r1", "A", "B"), ("r2", "A", "B"), ("r3", "A", "B")]);
        assert_eq!(s.cooccurring_relation_pairs().len(), 6);
    }

    #[test]
    fn ingest_reports_line_numbers() {
        let input = "# header\nr1\tA\tB\nr2\tA\n";
        match ingest(input.as_bytes(), SourceRule::all_patterns()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        let input = "r1\t\tB\n";
        assert!(matches!(
            ingest(input.as_bytes(), SourceRule::all_patterns()),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn ingest_rejects_empty_input() {
        assert!(matches!(
            ingest("# only a comment\n".as_bytes(), SourceRule::all_patterns()),
            Err(Error::EmptyInput)
        ));
    }

    #[test]
    fn source_tagging_by_prefix() {
        let rule = SourceRule::new(["/people/", "/location/"]);
        let s = ingest(
            "/people/person/place_of_birth\tA\tB\nborn-in\tA\tB\n".as_bytes(),
            rule,
        )
        .unwrap();
        assert_eq!(s.relation_source(RelationId(0)), RelationSource::Structured);
        assert_eq!(s.relation_source(RelationId(1)), RelationSource::Pattern);
    }

    #[test]
    fn interning_follows_first_appearance() {
        let s = store(&[("b", "Y", "X"), ("a", "X", "Z"), ("b", "X", "Z")]);
        assert_eq!(s.relations().names(), ["b", "a"]);
        assert_eq!(s.entities().names(), ["Y", "X", "Z"]);
        assert_eq!(s.tuple_slots(TupleId(1)), (EntityId(1), EntityId(2)));
    }
}
