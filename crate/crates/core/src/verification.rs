//! Independent oracles and synthetic corpora.
//!
//! The oracles here deliberately avoid the code paths they check: numeric
//! gradients come from central differences of the scoring functions, and
//! [`brute_force_ap`] recounts hits from scratch at every rank.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::{index, IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::{EvalSplit, Evaluation, RelationReport};
use crate::scoring::{ModelKind, ModelParams, RankedPrediction};
use crate::store::{Fact, FactStore, FactStoreBuilder, RelationId, RelationSource, SourceRule, TupleId};
use crate::training::{loss_gradient, triple_loss, BprTriple};

/// Central-difference gradient of `loss` at `x`.
pub fn finite_diff_gradient<F>(loss: F, x: &[f64], eps: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> f64,
{
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Config(format!("finite-difference step must be positive, got {eps}")));
    }
    let mut probe = x.to_vec();
    let mut grad = Vec::with_capacity(x.len());
    for i in 0..x.len() {
        probe[i] = x[i] + eps;
        let up = loss(&probe);
        probe[i] = x[i] - eps;
        let down = loss(&probe);
        probe[i] = x[i];
        for v in [up, down] {
            if !v.is_finite() {
                return Err(Error::NonFinite(v));
            }
        }
        grad.push((up - down) / (2.0 * eps));
    }
    Ok(grad)
}

/// Average precision by direct enumeration: at every rank holding a
/// positive, count the positives in the prefix again.
pub fn brute_force_ap(ranking: &[TupleId], positives: &BTreeSet<TupleId>) -> Result<f64> {
    if ranking.len() > 20 {
        return Err(Error::Evaluation("brute-force AP is limited to 20 items".into()));
    }
    if positives.is_empty() {
        return Err(Error::Evaluation("no positives".into()));
    }
    let mut total = 0.0;
    for k in 0..ranking.len() {
        if !positives.contains(&ranking[k]) {
            continue;
        }
        let mut in_prefix = 0;
        for t in &ranking[..=k] {
            if positives.contains(t) {
                in_prefix += 1;
            }
        }
        total += in_prefix as f64 / (k + 1) as f64;
    }
    Ok(total / positives.len() as f64)
}

/// Settings for the randomized gradient check.
#[derive(Clone, Debug, PartialEq)]
pub struct GradCheckConfig {
    pub kind: ModelKind,
    pub latent_dim: usize,
    pub entity_dim: usize,
    pub instances: usize,
    pub max_relations: usize,
    pub max_tuples: usize,
    pub eps: f64,
    pub rel_tol: f64,
    /// Coordinates whose gradients are both below this are compared
    /// absolutely against it.
    pub abs_tol: f64,
    pub seed: u64,
}

impl Default for GradCheckConfig {
    fn default() -> Self {
        GradCheckConfig {
            kind: ModelKind::NFE,
            latent_dim: 3,
            entity_dim: 3,
            instances: 100,
            max_relations: 6,
            max_tuples: 8,
            eps: 1e-5,
            rel_tol: 1e-4,
            abs_tol: 1e-8,
            seed: 7,
        }
    }
}

/// A coordinate where analytic and numeric gradients disagree.
#[derive(Clone, Debug, PartialEq)]
pub struct GradMismatch {
    pub instance: usize,
    pub block: &'static str,
    pub index: usize,
    pub analytic: f64,
    pub numeric: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct GradCheckReport {
    pub instances: usize,
    pub coordinates: usize,
    pub max_rel_error: f64,
    pub mismatches: Vec<GradMismatch>,
}

impl GradCheckReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty()
    }
}

pub const BLOCK_NAMES: [&str; 5] = ["a", "v", "w", "t_e", "d"];

/// A random small store, parameters and valid triple for gradient checks.
pub fn random_instance<R: Rng>(cfg: &GradCheckConfig, rng: &mut R) -> (FactStore, ModelParams, BprTriple) {
    loop {
        let num_relations = rng.random_range(2..=cfg.max_relations.max(2));
        let num_tuples = rng.random_range(3..=cfg.max_tuples.max(3));
        let num_entities = rng.random_range(2..=5);
        let mut b = FactStoreBuilder::new(SourceRule::all_patterns());
        for r in 0..num_relations {
            b.relation(&format!("r{r}"));
        }
        let entities: Vec<_> = (0..num_entities).map(|e| b.entity(&format!("e{e}"))).collect();
        // Repeated entity pairs collapse; repeated entities within a pair are
        // kept to exercise gradient accumulation.
        let tuples: Vec<_> = (0..num_tuples)
            .map(|_| {
                b.tuple(
                    entities[rng.random_range(0..num_entities)],
                    entities[rng.random_range(0..num_entities)],
                )
            })
            .collect();
        for r in 0..num_relations {
            for &t in &tuples {
                if rng.random_bool(0.45) {
                    b.add(RelationId::from_index(r), t);
                }
            }
        }
        let store = b.build();
        let eligible: Vec<RelationId> = store
            .relation_ids()
            .filter(|&r| {
                let n = store.observed_tuples(r).map_or(0, |t| t.len());
                n > 0 && n < store.num_tuples()
            })
            .collect();
        let Some(&r) = eligible.choose(rng) else {
            continue;
        };
        let pos = store.observed_tuples(r).unwrap();
        let positive = pos[rng.random_range(0..pos.len())];
        let negatives: Vec<TupleId> = store.tuple_ids().filter(|&t| !store.contains(r, t)).collect();
        let negative = negatives[rng.random_range(0..negatives.len())];

        let mut params = ModelParams::zeros_for(&store, cfg.kind, cfg.latent_dim, cfg.entity_dim)
            .expect("valid gradient-check shape");
        let uniform = Uniform::new(-1.0, 1.0).unwrap();
        for block in params.blocks_mut() {
            block.iter_mut().for_each(|p| *p = uniform.sample(rng));
        }
        let triple = BprTriple {
            relation: r,
            positive,
            negative,
        };
        return (store, params, triple);
    }
}

/// Compares the training step's gradients against central differences of
/// the pair loss on random instances.
pub fn check_gradients(cfg: &GradCheckConfig) -> Result<GradCheckReport> {
    check_gradients_with(cfg, loss_gradient)
}

/// [`check_gradients`] with a caller-supplied analytic gradient.
pub fn check_gradients_with<G>(cfg: &GradCheckConfig, analytic: G) -> Result<GradCheckReport>
where
    G: Fn(&ModelParams, &FactStore, BprTriple) -> [Vec<f64>; 5],
{
    if cfg.kind.is_empty() {
        return Err(Error::NoComponents);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut report = GradCheckReport::default();
    for instance in 0..cfg.instances {
        let (store, params, triple) = random_instance(cfg, &mut rng);
        let grad = analytic(&params, &store, triple);
        for (b, block) in params.blocks().iter().enumerate() {
            let numeric = finite_diff_gradient(
                |x| {
                    let mut probe = params.clone();
                    probe.blocks_mut()[b].copy_from_slice(x);
                    triple_loss(&probe, &store, triple)
                },
                block,
                cfg.eps,
            )?;
            for (i, (&a, &n)) in grad[b].iter().zip(&numeric).enumerate() {
                report.coordinates += 1;
                let scale = a.abs().max(n.abs());
                let ok = if scale < cfg.abs_tol {
                    (a - n).abs() <= cfg.abs_tol
                } else {
                    let rel = (a - n).abs() / scale;
                    report.max_rel_error = report.max_rel_error.max(rel);
                    rel <= cfg.rel_tol
                };
                if !ok {
                    report.mismatches.push(GradMismatch {
                        instance,
                        block: BLOCK_NAMES[b],
                        index: i,
                        analytic: a,
                        numeric: n,
                    });
                }
            }
        }
        report.instances += 1;
    }
    Ok(report)
}

/// Average precision of a uniformly shuffled candidate list, per relation.
pub fn random_ranking_evaluation<R: Rng>(split: &EvalSplit, rng: &mut R) -> Result<Evaluation> {
    let mut out = Evaluation::default();
    for (&r, candidates) in split.candidates() {
        let positives = split.positives(r);
        if positives.is_empty() {
            out.excluded.push(r);
            continue;
        }
        let mut ranking = candidates.clone();
        ranking.shuffle(rng);
        let predictions = ranking.iter().map(|&t| RankedPrediction::new(r, t, 0.0)).collect();
        out.reports.push(RelationReport::score(r, predictions, &positives)?);
    }
    Ok(out)
}

/// `antecedent => consequent`: every tuple with the antecedent also has the
/// consequent, and the antecedent covers `coverage` of the consequent's
/// tuples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImplicatureRule {
    pub antecedent: usize,
    pub consequent: usize,
    pub coverage: f64,
}

/// Parameters of a synthetic corpus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthSpec {
    pub num_relations: usize,
    pub num_tuples: usize,
    pub num_entities: usize,
    /// Rank of the ground-truth score matrix.
    pub rank: usize,
    /// A fact holds iff its ground-truth score exceeds this.
    pub threshold: f64,
    /// Low-rank corpora: fraction of true facts held out. Implicature
    /// corpora: fraction of antecedent tuples whose consequent is held out.
    pub holdout: f64,
    /// Relations `0..structured_relations` get structured names.
    pub structured_relations: usize,
    pub rules: Vec<ImplicatureRule>,
    pub seed: u64,
}

impl Default for SynthSpec {
    fn default() -> Self {
        SynthSpec {
            num_relations: 50,
            num_tuples: 500,
            num_entities: 200,
            rank: 5,
            // P(N(0,1) > 1.645) ~ 5%
            threshold: 1.645,
            holdout: 0.2,
            structured_relations: 0,
            rules: Vec::new(),
            seed: 0,
        }
    }
}

/// Name prefix of structured relations in synthetic corpora.
pub const SYNTH_STRUCTURED_PREFIX: &str = "/kb/";

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Synth(m));
        if self.num_relations == 0 || self.num_tuples == 0 {
            return fail("need at least one relation and one tuple".into());
        }
        if self.rank == 0 || self.rank > self.num_relations.min(self.num_tuples) {
            return fail(format!(
                "rank {} must be in 1..={}",
                self.rank,
                self.num_relations.min(self.num_tuples)
            ));
        }
        if self.num_entities.saturating_mul(self.num_entities.saturating_sub(1)) < self.num_tuples {
            return fail(format!(
                "{} entities cannot form {} distinct ordered pairs",
                self.num_entities, self.num_tuples
            ));
        }
        if !(self.holdout > 0.0 && self.holdout < 1.0) {
            return fail(format!("holdout fraction {} must be in (0, 1)", self.holdout));
        }
        if self.threshold.is_nan() {
            return fail("threshold is NaN".into());
        }
        if self.structured_relations > self.num_relations {
            return fail("more structured relations than relations".into());
        }
        for rule in &self.rules {
            if !(rule.coverage > 0.0 && rule.coverage <= 1.0) {
                return fail(format!("coverage {} must be in (0, 1]", rule.coverage));
            }
            if rule.antecedent >= self.num_relations || rule.consequent >= self.num_relations {
                return fail(format!(
                    "rule {} => {} refers to an unknown relation",
                    rule.antecedent, rule.consequent
                ));
            }
            if rule.antecedent == rule.consequent {
                return fail(format!("rule {0} => {0} is trivial", rule.antecedent));
            }
        }
        Ok(())
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    pub fn source_rule(&self) -> SourceRule {
        SourceRule::new([SYNTH_STRUCTURED_PREFIX])
    }

    pub fn relation_name(&self, r: usize) -> String {
        if r < self.structured_relations {
            format!("{SYNTH_STRUCTURED_PREFIX}rel{r:03}")
        } else {
            format!("pat:rel{r:03}")
        }
    }
}

/// A generated corpus with its held-out split.
#[derive(Clone, Debug)]
pub struct SynthCorpus {
    pub spec: SynthSpec,
    pub split: EvalSplit,
    /// Ground-truth scores, row-major `num_relations x num_tuples` in store
    /// id order.
    pub truth: Vec<f64>,
}

impl SynthCorpus {
    pub fn store(&self) -> &FactStore {
        self.split.train()
    }

    pub fn true_score(&self, r: RelationId, t: TupleId) -> f64 {
        self.truth[r.index() * self.spec.num_tuples + t.index()]
    }

    /// Writes `train.tsv`, `test.tsv` and `manifest.toml` into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<SynthManifest> {
        fs::create_dir_all(dir)?;
        let store = self.store();
        let train_path = dir.join("train.tsv");
        store.write_facts(std::io::BufWriter::new(fs::File::create(&train_path)?))?;

        let test_path = dir.join("test.tsv");
        let mut test = String::new();
        for fact in self.split.test() {
            let (e1, e2) = store.tuple_slots(fact.tuple);
            test.push_str(&format!(
                "{}\t{}\t{}\n",
                store.relation_name(fact.relation),
                store.entity_name(e1),
                store.entity_name(e2)
            ));
        }
        fs::write(&test_path, test)?;

        let manifest = SynthManifest {
            train: "train.tsv".into(),
            test: "test.tsv".into(),
            structured_prefix: SYNTH_STRUCTURED_PREFIX.into(),
            train_facts: store.num_facts(),
            test_facts: self.split.test().len(),
            spec: self.spec.clone(),
        };
        let text = toml::to_string(&manifest).map_err(|e| Error::Synth(e.to_string()))?;
        fs::write(dir.join("manifest.toml"), text)?;
        Ok(manifest)
    }
}

/// Sidecar describing how a synthetic corpus was generated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthManifest {
    pub train: PathBuf,
    pub test: PathBuf,
    pub structured_prefix: String,
    pub train_facts: usize,
    pub test_facts: usize,
    pub spec: SynthSpec,
}

impl SynthManifest {
    pub fn read(path: &Path) -> Result<Self> {
        toml::from_str(&fs::read_to_string(path)?).map_err(|e| Error::Synth(e.to_string()))
    }
}

/// Ground-truth scores and the true facts they imply.
struct TrueMatrix {
    scores: Vec<f64>,
    /// Per relation, the tuple indices where the fact holds.
    facts: Vec<BTreeSet<usize>>,
}

/// Samples a rank-`rank` score matrix with unit-variance entries. Tuples are
/// redrawn until at least one relation in `anchors` holds for them.
fn sample_true_matrix<R: Rng>(spec: &SynthSpec, anchors: &[bool], rng: &mut R) -> Result<TrueMatrix> {
    if spec.threshold == f64::INFINITY {
        return Err(Error::Synth("threshold +inf yields zero facts".into()));
    }
    let k = spec.rank;
    let scale = 1.0 / (k as f64).sqrt();
    let mut gauss = |n: usize| -> Vec<f64> { (0..n).map(|_| StandardNormal.sample(rng)).collect() };
    let relations = gauss(spec.num_relations * k);
    let mut scores = vec![0.0; spec.num_relations * spec.num_tuples];
    let mut facts = vec![BTreeSet::new(); spec.num_relations];
    const MAX_DRAWS_PER_TUPLE: usize = 1000;
    for t in 0..spec.num_tuples {
        let mut draws = 0;
        loop {
            draws += 1;
            if draws > MAX_DRAWS_PER_TUPLE {
                return Err(Error::Synth(format!(
                    "threshold {} yields (almost) zero facts",
                    spec.threshold
                )));
            }
            let v = gauss(k);
            let column: Vec<f64> = (0..spec.num_relations)
                .map(|r| scale * relations[r * k..(r + 1) * k].iter().zip(&v).map(|(a, b)| a * b).sum::<f64>())
                .collect();
            let anchored = column
                .iter()
                .zip(anchors)
                .any(|(&s, &anchor)| anchor && s > spec.threshold);
            if anchored {
                for (r, &s) in column.iter().enumerate() {
                    scores[r * spec.num_tuples + t] = s;
                    if s > spec.threshold {
                        facts[r].insert(t);
                    }
                }
                break;
            }
        }
    }
    Ok(TrueMatrix { scores, facts })
}

/// Distinct ordered entity pairs with different entities, one per tuple.
fn sample_entity_pairs<R: Rng>(spec: &SynthSpec, rng: &mut R) -> Vec<(usize, usize)> {
    let mut seen = HashSet::new();
    let mut pairs = Vec::with_capacity(spec.num_tuples);
    while pairs.len() < spec.num_tuples {
        let e1 = rng.random_range(0..spec.num_entities);
        let e2 = rng.random_range(0..spec.num_entities);
        if e1 != e2 && seen.insert((e1, e2)) {
            pairs.push((e1, e2));
        }
    }
    pairs
}

fn build_corpus(
    spec: &SynthSpec,
    pairs: &[(usize, usize)],
    facts: &[BTreeSet<usize>],
    test: &BTreeSet<(usize, usize)>,
    scores: Vec<f64>,
) -> Result<SynthCorpus> {
    let mut b = FactStoreBuilder::new(spec.source_rule());
    for r in 0..spec.num_relations {
        b.relation(&spec.relation_name(r));
    }
    for e in 0..spec.num_entities {
        b.entity(&format!("e{e:04}"));
    }
    let tuples: Vec<TupleId> = pairs
        .iter()
        .map(|&(e1, e2)| b.tuple(crate::store::EntityId::from_index(e1), crate::store::EntityId::from_index(e2)))
        .collect();
    for (r, ts) in facts.iter().enumerate() {
        for &t in ts {
            if !test.contains(&(r, t)) {
                b.add(RelationId::from_index(r), tuples[t]);
            }
        }
    }
    let held_out = test
        .iter()
        .map(|&(r, t)| Fact::new(RelationId::from_index(r), tuples[t]));
    let split = EvalSplit::with_unobserved_candidates(b.build(), held_out)?;
    Ok(SynthCorpus {
        spec: spec.clone(),
        split,
        truth: scores,
    })
}

/// Rank-`K*` corpus: a fact holds iff its ground-truth score exceeds the
/// threshold. `round(holdout * facts)` true facts are held out, never a
/// tuple's last one.
pub fn generate_lowrank_corpus<R: Rng>(spec: &SynthSpec, rng: &mut R) -> Result<SynthCorpus> {
    spec.validate()?;
    if !spec.rules.is_empty() {
        return Err(Error::Synth("low-rank corpora take no implicature rules".into()));
    }
    let truth = sample_true_matrix(spec, &vec![true; spec.num_relations], rng)?;
    let pairs = sample_entity_pairs(spec, rng);

    let mut all: Vec<(usize, usize)> = truth
        .facts
        .iter()
        .enumerate()
        .flat_map(|(r, ts)| ts.iter().map(move |&t| (r, t)))
        .collect();
    let target = (spec.holdout * all.len() as f64).round() as usize;
    let mut per_tuple = vec![0usize; spec.num_tuples];
    for &(_, t) in &all {
        per_tuple[t] += 1;
    }
    all.shuffle(rng);
    let mut test = BTreeSet::new();
    for &(r, t) in &all {
        if test.len() == target {
            break;
        }
        if per_tuple[t] > 1 {
            per_tuple[t] -= 1;
            test.insert((r, t));
        }
    }
    build_corpus(spec, &pairs, &truth.facts, &test, truth.scores)
}

/// Orders rules so that each antecedent is derived after its consequent is
/// final. Errors on antecedents with several rules and on cycles.
fn rule_order(spec: &SynthSpec) -> Result<Vec<usize>> {
    let mut by_antecedent: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, rule) in spec.rules.iter().enumerate() {
        if by_antecedent.insert(rule.antecedent, i).is_some() {
            return Err(Error::Synth(format!(
                "inconsistent rules: relation {} is the antecedent of several rules",
                rule.antecedent
            )));
        }
    }
    let mut order = Vec::with_capacity(spec.rules.len());
    let mut done = vec![false; spec.rules.len()];
    for start in 0..spec.rules.len() {
        // Walk down the consequent chain, then emit in reverse.
        let mut chain = Vec::new();
        let mut cur = Some(start);
        while let Some(i) = cur {
            if done[i] {
                break;
            }
            if chain.contains(&i) {
                return Err(Error::Synth(format!(
                    "inconsistent rules: cycle through relation {}",
                    spec.rules[i].antecedent
                )));
            }
            chain.push(i);
            cur = by_antecedent.get(&spec.rules[i].consequent).copied();
        }
        for &i in chain.iter().rev() {
            done[i] = true;
            order.push(i);
        }
    }
    Ok(order)
}

/// Low-rank corpus overlaid with implicature rules. For each rule
/// `A => B (c)`, A's tuples are replaced by a random `round(c * |B|)`-subset
/// of B's tuples; then B's fact is held out on `round(holdout * |A|)` of A's
/// tuples. Only those consequent facts form the test set.
pub fn generate_implicature_corpus<R: Rng>(spec: &SynthSpec, rng: &mut R) -> Result<SynthCorpus> {
    if spec.rules.is_empty() {
        let plain = SynthSpec {
            rules: Vec::new(),
            ..spec.clone()
        };
        return generate_lowrank_corpus(&plain, rng);
    }
    spec.validate()?;
    let order = rule_order(spec)?;
    let mut anchors = vec![true; spec.num_relations];
    for rule in &spec.rules {
        anchors[rule.antecedent] = false;
    }
    if !anchors.iter().any(|&a| a) {
        return Err(Error::Synth("every relation is a rule antecedent".into()));
    }
    let mut truth = sample_true_matrix(spec, &anchors, rng)?;
    let pairs = sample_entity_pairs(spec, rng);

    for &i in &order {
        let rule = &spec.rules[i];
        let support: Vec<usize> = truth.facts[rule.consequent].iter().copied().collect();
        let size = (rule.coverage * support.len() as f64).round() as usize;
        if size == 0 {
            return Err(Error::Synth(format!(
                "rule {} => {}: coverage {} of {} tuples selects none",
                rule.antecedent,
                rule.consequent,
                rule.coverage,
                support.len()
            )));
        }
        // The antecedent marks the consequent tuples that score highest on its own row.
        let row = &truth.scores[rule.antecedent * spec.num_tuples..(rule.antecedent + 1) * spec.num_tuples];
        let mut ranked = support;
        ranked.sort_by(|&x, &y| row[y].total_cmp(&row[x]).then(x.cmp(&y)));
        truth.facts[rule.antecedent] = ranked[..size].iter().copied().collect();
    }
    for rule in &spec.rules {
        if !truth.facts[rule.antecedent].is_subset(&truth.facts[rule.consequent]) {
            return Err(Error::Synth(format!(
                "inconsistent rules: {} => {} does not hold after construction",
                rule.antecedent, rule.consequent
            )));
        }
    }

    let mut test = BTreeSet::new();
    for &i in &order {
        let rule = &spec.rules[i];
        let bearers: Vec<usize> = truth.facts[rule.antecedent].iter().copied().collect();
        let n = (spec.holdout * bearers.len() as f64).round() as usize;
        for j in index::sample(rng, bearers.len(), n) {
            test.insert((rule.consequent, bearers[j]));
        }
    }
    if test.is_empty() {
        return Err(Error::Synth("holdout selects no consequent facts".into()));
    }
    build_corpus(spec, &pairs, &truth.facts, &test, truth.scores)
}

/// Relation ids of a corpus whose names mark them as structured.
pub fn structured_relations(store: &FactStore) -> Vec<RelationId> {
    store
        .relation_ids()
        .filter(|&r| store.relation_source(r) == RelationSource::Structured)
        .collect()
}
