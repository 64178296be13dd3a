//! Per-relation ranking, average precision, MAP and pooled evaluation.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::Write;

use crate::error::{Error, Result};
use crate::scoring::{ModelParams, RankedPrediction};
use crate::store::{Fact, FactStore, RelationId, TupleId};

/// Training store, held-out facts and the candidate tuples to rank for each
/// evaluated relation.
#[derive(Clone, Debug)]
pub struct EvalSplit {
    train: FactStore,
    test: BTreeSet<Fact>,
    candidates: BTreeMap<RelationId, Vec<TupleId>>,
}

impl EvalSplit {
    /// Checks that test facts are disjoint from training facts and that each
    /// test tuple is a candidate for its relation.
    pub fn new(
        train: FactStore,
        test: impl IntoIterator<Item = Fact>,
        candidates: BTreeMap<RelationId, Vec<TupleId>>,
    ) -> Result<Self> {
        let test: BTreeSet<Fact> = test.into_iter().collect();
        for fact in &test {
            check_ids(&train, fact.relation, fact.tuple)?;
            if train.contains(fact.relation, fact.tuple) {
                return Err(Error::Evaluation(format!(
                    "test fact ({}, {}) is also a training fact",
                    fact.relation, fact.tuple
                )));
            }
            let listed = candidates
                .get(&fact.relation)
                .is_some_and(|c| c.contains(&fact.tuple));
            if !listed {
                return Err(Error::Evaluation(format!(
                    "test tuple {} is not a candidate for relation {}",
                    fact.tuple, fact.relation
                )));
            }
        }
        for (&r, tuples) in &candidates {
            for &t in tuples {
                check_ids(&train, r, t)?;
            }
        }
        Ok(EvalSplit {
            train,
            test,
            candidates,
        })
    }

    /// Uses, for every relation with test facts, all tuples not observed
    /// with it in training as candidates.
    pub fn with_unobserved_candidates(train: FactStore, test: impl IntoIterator<Item = Fact>) -> Result<Self> {
        let test: BTreeSet<Fact> = test.into_iter().collect();
        let mut candidates = BTreeMap::new();
        for fact in &test {
            check_ids(&train, fact.relation, fact.tuple)?;
            candidates.entry(fact.relation).or_insert_with(|| {
                train
                    .tuple_ids()
                    .filter(|&t| !train.contains(fact.relation, t))
                    .collect::<Vec<_>>()
            });
        }
        EvalSplit::new(train, test, candidates)
    }

    pub fn train(&self) -> &FactStore {
        &self.train
    }

    pub fn test(&self) -> &BTreeSet<Fact> {
        &self.test
    }

    pub fn candidates(&self) -> &BTreeMap<RelationId, Vec<TupleId>> {
        &self.candidates
    }

    /// Held-out tuples of `r`.
    pub fn positives(&self, r: RelationId) -> BTreeSet<TupleId> {
        self.test
            .range(Fact::new(r, TupleId(0))..=Fact::new(r, TupleId(u32::MAX)))
            .map(|f| f.tuple)
            .collect()
    }
}

fn check_ids(store: &FactStore, r: RelationId, t: TupleId) -> Result<()> {
    if r.index() >= store.num_relations() {
        return Err(Error::UnknownId {
            kind: "relation",
            id: r.index(),
        });
    }
    if t.index() >= store.num_tuples() {
        return Err(Error::UnknownId {
            kind: "tuple",
            id: t.index(),
        });
    }
    Ok(())
}

/// Ranked candidates and average precision for one relation.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationReport {
    pub relation: RelationId,
    pub predictions: Vec<RankedPrediction>,
    pub average_precision: f64,
    pub positives: usize,
    /// Rounding error of `average_precision`, carried into MAP.
    pub(crate) ap_residual: f64,
}

impl RelationReport {
    /// Scores `predictions`, already in rank order, against `positives`.
    pub fn score(relation: RelationId, predictions: Vec<RankedPrediction>, positives: &BTreeSet<TupleId>) -> Result<Self> {
        let ranking: Vec<TupleId> = predictions.iter().map(|p| p.tuple).collect();
        let (average_precision, ap_residual) = wide_average_precision(&ranking, positives)?;
        Ok(RelationReport {
            relation,
            predictions,
            average_precision,
            positives: positives.len(),
            ap_residual,
        })
    }

    /// A report with a given AP and no predictions.
    pub fn with_ap(relation: RelationId, average_precision: f64, positives: usize) -> Self {
        RelationReport {
            relation,
            predictions: Vec::new(),
            average_precision,
            positives,
            ap_residual: 0.0,
        }
    }
}

/// Sorts by theta descending, ties by ascending tuple id.
pub fn sort_predictions(predictions: &mut [RankedPrediction]) {
    predictions.sort_by(|a, b| b.theta.total_cmp(&a.theta).then(a.tuple.cmp(&b.tuple)));
}

/// Scores every candidate for `r` and sorts them (theta descending, ties by
/// ascending tuple id). The neighborhood term uses each tuple's training
/// observations without `r`.
pub fn rank_candidates(
    r: RelationId,
    candidates: &[TupleId],
    params: &ModelParams,
    store: &FactStore,
) -> Result<Vec<RankedPrediction>> {
    if candidates.is_empty() {
        return Err(Error::Evaluation("no candidates to rank".into()));
    }
    params.check_store(store)?;
    let mut predictions = candidates
        .iter()
        .map(|&t| params.predict(store, r, t))
        .collect::<Result<Vec<_>>>()?;
    sort_predictions(&mut predictions);
    Ok(predictions)
}

/// Average precision of `ranking` against `positives`: the mean over
/// positive ranks `k` of (positives at ranks `<= k`) / `k`.
pub fn average_precision(ranking: &[TupleId], positives: &BTreeSet<TupleId>) -> Result<f64> {
    wide_average_precision(ranking, positives).map(|(ap, _)| ap)
}

/// Correctly rounded AP and its rounding error.
fn wide_average_precision(ranking: &[TupleId], positives: &BTreeSet<TupleId>) -> Result<(f64, f64)> {
    if positives.is_empty() {
        return Err(Error::Evaluation("average precision needs at least one positive".into()));
    }
    let mut hits = 0usize;
    let mut sum = WideSum::default();
    for (i, t) in ranking.iter().enumerate() {
        if positives.contains(t) {
            hits += 1;
            sum.add_quotient(hits as f64, (i + 1) as f64);
        }
    }
    if hits != positives.len() {
        return Err(Error::Evaluation(format!(
            "{} of {} positives are missing from the ranking",
            positives.len() - hits,
            positives.len()
        )));
    }
    Ok(sum.divide_wide(hits as f64))
}

/// Double-double accumulator, so sums of quotients round once at the end.
#[derive(Clone, Copy, Debug, Default)]
struct WideSum {
    hi: f64,
    lo: f64,
}

impl WideSum {
    fn add(&mut self, x: f64) {
        let s = self.hi + x;
        let b = s - self.hi;
        self.lo += (self.hi - (s - b)) + (x - b);
        self.hi = s;
    }

    fn add_quotient(&mut self, a: f64, b: f64) {
        let q = a / b;
        let r = (-q).mul_add(b, a);
        self.add(q);
        self.lo += r / b;
    }

    fn add_product(&mut self, a: f64, b: f64) {
        let p = a * b;
        self.add(p);
        self.lo += a.mul_add(b, -p);
    }

    /// The quotient rounded to f64, and what the rounding dropped.
    fn divide_wide(self, d: f64) -> (f64, f64) {
        let q = self.hi / d;
        let c = ((-q).mul_add(d, self.hi) + self.lo) / d;
        let s = q + c;
        (s, c - (s - q))
    }
}

/// How per-relation APs are averaged.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MapWeighting {
    #[default]
    Unweighted,
    /// Weight each relation by its number of positives.
    ByPositives,
}

/// Mean of the reports' average precisions.
pub fn mean_average_precision(reports: &[RelationReport], weighting: MapWeighting) -> Result<f64> {
    if reports.is_empty() {
        return Err(Error::Evaluation("mean average precision of an empty collection".into()));
    }
    Ok(match weighting {
        MapWeighting::Unweighted => {
            let mut sum = WideSum::default();
            for r in reports {
                sum.add(r.average_precision);
                sum.lo += r.ap_residual;
            }
            sum.divide_wide(reports.len() as f64).0
        }
        MapWeighting::ByPositives => {
            let total: usize = reports.iter().map(|r| r.positives).sum();
            let mut sum = WideSum::default();
            for r in reports {
                sum.add_product(r.average_precision, r.positives as f64);
                sum.lo += r.ap_residual * r.positives as f64;
            }
            sum.divide_wide(total as f64).0
        }
    })
}

/// One system's ranked tuples per relation, best first.
pub type SystemRanking = BTreeMap<RelationId, Vec<TupleId>>;

/// Pooled candidates of a relation with their labels, by ascending tuple id.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Pool {
    pub members: Vec<(TupleId, bool)>,
}

impl Pool {
    pub fn tuples(&self) -> impl Iterator<Item = TupleId> + '_ {
        self.members.iter().map(|&(t, _)| t)
    }

    pub fn positives(&self) -> BTreeSet<TupleId> {
        self.members
            .iter()
            .filter(|&&(_, label)| label)
            .map(|&(t, _)| t)
            .collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Union of every system's top-`depth` tuples per relation, each labeled
/// positive iff it is in `truth`.
pub fn pool_candidates(
    systems: &[SystemRanking],
    depth: usize,
    truth: &BTreeSet<Fact>,
) -> BTreeMap<RelationId, Pool> {
    let mut pooled: BTreeMap<RelationId, BTreeSet<TupleId>> = BTreeMap::new();
    for system in systems {
        for (&r, ranking) in system {
            pooled
                .entry(r)
                .or_default()
                .extend(ranking.iter().take(depth).copied());
        }
    }
    pooled
        .into_iter()
        .map(|(r, tuples)| {
            let members = tuples
                .into_iter()
                .map(|t| (t, truth.contains(&Fact::new(r, t))))
                .collect();
            (r, Pool { members })
        })
        .collect()
}

/// Reports for evaluated relations, plus the relations left out because
/// they had no positives among their candidates.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Evaluation {
    pub reports: Vec<RelationReport>,
    pub excluded: Vec<RelationId>,
}

impl Evaluation {
    pub fn map(&self, weighting: MapWeighting) -> Result<f64> {
        mean_average_precision(&self.reports, weighting)
    }
}

/// Ranks every candidate list of `split` that passes `include` and scores it
/// against the held-out facts.
pub fn evaluate<F>(split: &EvalSplit, params: &ModelParams, include: F) -> Result<Evaluation>
where
    F: Fn(RelationId) -> bool,
{
    let mut out = Evaluation::default();
    for (&r, candidates) in split.candidates() {
        if !include(r) {
            continue;
        }
        let positives = split.positives(r);
        if positives.is_empty() || candidates.is_empty() {
            out.excluded.push(r);
            continue;
        }
        let predictions = rank_candidates(r, candidates, params, split.train())?;
        out.reports.push(RelationReport::score(r, predictions, &positives)?);
    }
    Ok(out)
}

/// Evaluates several systems on a shared pool: each system's top-`depth`
/// candidates per relation are pooled, then every system is scored on the
/// pool using only its own ordering.
pub fn evaluate_pooled(split: &EvalSplit, systems: &[&ModelParams], depth: usize) -> Result<Vec<Evaluation>> {
    if depth == 0 {
        return Err(Error::Evaluation("pool depth must be at least 1".into()));
    }
    let mut ranked: Vec<BTreeMap<RelationId, Vec<RankedPrediction>>> = Vec::with_capacity(systems.len());
    for params in systems {
        let mut per_relation = BTreeMap::new();
        for (&r, candidates) in split.candidates() {
            if candidates.is_empty() {
                continue;
            }
            per_relation.insert(r, rank_candidates(r, candidates, params, split.train())?);
        }
        ranked.push(per_relation);
    }
    let rankings: Vec<SystemRanking> = ranked
        .iter()
        .map(|m| {
            m.iter()
                .map(|(&r, preds)| (r, preds.iter().map(|p| p.tuple).collect()))
                .collect()
        })
        .collect();
    let pools = pool_candidates(&rankings, depth, split.test());

    let mut out = Vec::with_capacity(systems.len());
    for system in &ranked {
        let mut eval = Evaluation::default();
        for (&r, pool) in &pools {
            let positives = pool.positives();
            if positives.is_empty() {
                eval.excluded.push(r);
                continue;
            }
            let members: HashSet<TupleId> = pool.tuples().collect();
            let predictions: Vec<RankedPrediction> = system[&r]
                .iter()
                .filter(|p| members.contains(&p.tuple))
                .copied()
                .collect();
            eval.reports.push(RelationReport::score(r, predictions, &positives)?);
        }
        out.push(eval);
    }
    Ok(out)
}

/// Writes `relation<TAB>num_positives<TAB>AP` per report and a final
/// `MAP<TAB>value` line. `notes` are written first as `#` comments.
pub fn write_report<W: Write>(
    mut out: W,
    store: &FactStore,
    reports: &[RelationReport],
    weighting: MapWeighting,
    notes: &[String],
) -> Result<f64> {
    let map = mean_average_precision(reports, weighting)?;
    for note in notes {
        writeln!(out, "# {note}")?;
    }
    for report in reports {
        writeln!(
            out,
            "{}\t{}\t{}",
            store.relation_name(report.relation),
            report.positives,
            report.average_precision
        )?;
    }
    writeln!(out, "MAP\t{map}")?;
    Ok(map)
}

/// Writes one `relation<TAB>entity1<TAB>entity2<TAB>theta<TAB>confidence<TAB>label`
/// line per prediction. `label` is 1 when `is_positive` holds.
pub fn write_predictions<'a, W, I, F>(mut out: W, store: &FactStore, predictions: I, is_positive: F) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a RankedPrediction>,
    F: Fn(&RankedPrediction) -> bool,
{
    for p in predictions {
        let (e1, e2) = store.tuple_slots(p.tuple);
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            store.relation_name(p.relation),
            store.entity_name(e1),
            store.entity_name(e2),
            p.theta,
            p.confidence,
            u8::from(is_positive(p))
        )?;
    }
    Ok(())
}
