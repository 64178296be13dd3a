//! Pairwise ranking (BPR-style) training with stochastic gradient descent.
//!
//! Each step takes a relation `r`, an observed tuple `t+` and an unobserved
//! tuple `t-`, and descends on
//!
//! ```text
//! loss = -ln sigmoid(theta(r, t+) - theta(r, t-))
//! ```
//!
//! plus per-block L2 penalties on the parameters the step touches. With
//! `workers > 1` steps run concurrently on shared parameters without locks
//! (Hogwild); individual updates may be lost to races, and results are not
//! reproducible in that mode.

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::scoring::{dot, logistic, ModelKind, ModelParams, ParamShape};
use crate::store::{EntityId, Fact, FactStore, RelationId, TupleId};

/// L2 penalty per parameter block.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct L2 {
    pub relation: f64,
    pub tuple: f64,
    pub weight: f64,
    pub slot: f64,
    pub entity: f64,
}

impl L2 {
    pub const fn uniform(lambda: f64) -> Self {
        L2 {
            relation: lambda,
            tuple: lambda,
            weight: lambda,
            slot: lambda,
            entity: lambda,
        }
    }

    fn values(&self) -> [f64; 5] {
        [self.relation, self.tuple, self.weight, self.slot, self.entity]
    }
}

/// Training hyperparameters.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub kind: ModelKind,
    pub latent_dim: usize,
    pub entity_dim: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub l2: L2,
    pub negatives_per_positive: usize,
    pub seed: u64,
    pub workers: usize,
    /// Standard deviation of the Gaussian used to initialise embeddings.
    pub init_scale: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            kind: ModelKind::NFE,
            latent_dim: 100,
            entity_dim: 100,
            epochs: 200,
            learning_rate: 0.05,
            l2: L2::uniform(0.01),
            negatives_per_positive: 1,
            seed: 0,
            workers: 1,
            init_scale: 0.1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::Config(msg.to_owned()));
        if self.kind.is_empty() {
            return Err(Error::NoComponents);
        }
        if self.latent_dim == 0 || self.entity_dim == 0 {
            return fail("latent and entity dimensions must be positive");
        }
        if !(self.learning_rate.is_finite() && self.learning_rate >= 0.0) {
            return fail("learning rate must be a non-negative finite number");
        }
        if self.l2.values().iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
            return fail("L2 penalties must be non-negative");
        }
        if self.negatives_per_positive == 0 {
            return fail("negatives per positive must be at least 1");
        }
        if self.workers == 0 {
            return fail("workers must be at least 1");
        }
        if !(self.init_scale.is_finite() && self.init_scale >= 0.0) {
            return fail("init scale must be non-negative");
        }
        Ok(())
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }
}

/// Draws initial parameters: embeddings i.i.d. `N(0, init_scale^2)` in the
/// order relations, tuples, entities, slots; neighborhood weights zero over
/// the co-occurrence support.
pub fn init_params<R: Rng>(store: &FactStore, cfg: &TrainConfig, rng: &mut R) -> Result<ModelParams> {
    if store.num_relations() == 0 || store.num_tuples() == 0 {
        return Err(Error::EmptyInput);
    }
    let mut params = ModelParams::zeros_for(store, cfg.kind, cfg.latent_dim, cfg.entity_dim)?;
    if cfg.init_scale > 0.0 {
        let normal = Normal::new(0.0, cfg.init_scale)
            .map_err(|e| Error::Config(format!("init scale: {e}")))?;
        let [a, v, _, x, d] = params.blocks_mut();
        for block in [a, v, x, d] {
            block.iter_mut().for_each(|p| *p = normal.sample(rng));
        }
    }
    Ok(params)
}

/// One pairwise training example.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BprTriple {
    pub relation: RelationId,
    pub positive: TupleId,
    pub negative: TupleId,
}

/// Samples [`BprTriple`]s from a store.
#[derive(Clone, Debug)]
pub struct TripleSampler<'a> {
    store: &'a FactStore,
    facts: Vec<Fact>,
    degenerate: Vec<bool>,
}

impl<'a> TripleSampler<'a> {
    pub fn new(store: &'a FactStore) -> Self {
        let n = store.num_tuples();
        let degenerate = store
            .relation_ids()
            .map(|r| store.observed_tuples(r).is_ok_and(|ts| ts.len() == n))
            .collect();
        TripleSampler {
            store,
            facts: store.facts().collect(),
            degenerate,
        }
    }

    /// Whether `r` holds for every tuple, leaving no negatives.
    pub fn is_degenerate(&self, r: RelationId) -> bool {
        self.degenerate[r.index()]
    }

    pub fn num_degenerate(&self) -> usize {
        self.degenerate.iter().filter(|&&d| d).count()
    }

    /// A uniform tuple not observed with `r`, by rejection.
    pub fn negative<R: Rng>(&self, r: RelationId, rng: &mut R) -> Result<TupleId> {
        if self.degenerate[r.index()] {
            return Err(Error::DegenerateRelation(r.index()));
        }
        let n = self.store.num_tuples();
        loop {
            let t = TupleId::from_index(rng.random_range(0..n));
            if !self.store.contains(r, t) {
                return Ok(t);
            }
        }
    }

    /// Samples a triple for `relation`, or for the relation of a uniformly
    /// drawn observed fact when `None`.
    pub fn sample<R: Rng>(&self, relation: Option<RelationId>, rng: &mut R) -> Result<BprTriple> {
        let (r, positive) = match relation {
            Some(r) => {
                let tuples = self.store.observed_tuples(r)?;
                if tuples.is_empty() {
                    return Err(Error::NoPositives(r.index()));
                }
                (r, tuples[rng.random_range(0..tuples.len())])
            }
            None => {
                if self.facts.is_empty() {
                    return Err(Error::EmptyInput);
                }
                let f = self.facts[rng.random_range(0..self.facts.len())];
                (f.relation, f.tuple)
            }
        };
        let negative = self.negative(r, rng)?;
        Ok(BprTriple {
            relation: r,
            positive,
            negative,
        })
    }
}

/// Convenience wrapper around [`TripleSampler::sample`].
pub fn sample_triple<R: Rng>(
    store: &FactStore,
    relation: Option<RelationId>,
    rng: &mut R,
) -> Result<BprTriple> {
    TripleSampler::new(store).sample(relation, rng)
}

/// `ln(1 + e^x)` without overflow.
#[inline]
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// `-ln sigmoid(theta_pos - theta_neg)`.
#[inline]
pub fn pair_loss(theta_pos: f64, theta_neg: f64) -> f64 {
    softplus(theta_neg - theta_pos)
}

/// Parameter blocks, in the order of [`ModelParams::blocks`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Block {
    Relation = 0,
    Tuple = 1,
    Weight = 2,
    Entity = 3,
    Slot = 4,
}

/// Read/accumulate access to parameter storage, shared by sequential,
/// concurrent and gradient-recording steps.
pub(crate) trait ParamAccess {
    fn shape(&self) -> ParamShape;
    fn weight_position(&self, r: RelationId, other: RelationId) -> Option<usize>;
    fn read(&self, block: Block, start: usize, out: &mut [f64]);
    fn read_one(&self, block: Block, index: usize) -> f64;
    fn add(&mut self, block: Block, start: usize, delta: &[f64]);
    fn add_one(&mut self, block: Block, index: usize, delta: f64);
}

impl ParamAccess for ModelParams {
    fn shape(&self) -> ParamShape {
        ModelParams::shape(self)
    }

    fn weight_position(&self, r: RelationId, other: RelationId) -> Option<usize> {
        self.weights.position(r, other)
    }

    fn read(&self, block: Block, start: usize, out: &mut [f64]) {
        out.copy_from_slice(&self.blocks()[block as usize][start..start + out.len()]);
    }

    fn read_one(&self, block: Block, index: usize) -> f64 {
        self.blocks()[block as usize][index]
    }

    fn add(&mut self, block: Block, start: usize, delta: &[f64]) {
        let dst = &mut self.blocks_mut()[block as usize][start..start + delta.len()];
        dst.iter_mut().zip(delta).for_each(|(p, d)| *p += d);
    }

    fn add_one(&mut self, block: Block, index: usize, delta: f64) {
        self.blocks_mut()[block as usize][index] += delta;
    }
}

/// Reads from a parameter set and collects the applied deltas into a
/// separate buffer instead of mutating it.
pub(crate) struct DeltaRecorder<'a> {
    pub params: &'a ModelParams,
    pub deltas: [Vec<f64>; 5],
}

impl<'a> DeltaRecorder<'a> {
    pub fn new(params: &'a ModelParams) -> Self {
        let deltas = params.blocks().map(|b| vec![0.0; b.len()]);
        DeltaRecorder { params, deltas }
    }
}

impl ParamAccess for DeltaRecorder<'_> {
    fn shape(&self) -> ParamShape {
        self.params.shape()
    }

    fn weight_position(&self, r: RelationId, other: RelationId) -> Option<usize> {
        self.params.weights.position(r, other)
    }

    fn read(&self, block: Block, start: usize, out: &mut [f64]) {
        self.params.read(block, start, out)
    }

    fn read_one(&self, block: Block, index: usize) -> f64 {
        self.params.read_one(block, index)
    }

    fn add(&mut self, block: Block, start: usize, delta: &[f64]) {
        let dst = &mut self.deltas[block as usize][start..start + delta.len()];
        dst.iter_mut().zip(delta).for_each(|(p, d)| *p += d);
    }

    fn add_one(&mut self, block: Block, index: usize, delta: f64) {
        self.deltas[block as usize][index] += delta;
    }
}

/// Parameter values shared between Hogwild workers as relaxed atomics.
struct SharedValues {
    blocks: [Vec<AtomicU64>; 5],
}

impl SharedValues {
    fn from_params(params: &ModelParams) -> Self {
        SharedValues {
            blocks: params
                .blocks()
                .map(|b| b.iter().map(|x| AtomicU64::new(x.to_bits())).collect()),
        }
    }

    fn write_back(&self, params: &mut ModelParams) {
        for (dst, src) in params.blocks_mut().into_iter().zip(&self.blocks) {
            for (d, s) in dst.iter_mut().zip(src) {
                *d = f64::from_bits(s.load(Ordering::Relaxed));
            }
        }
    }
}

/// One worker's view: layout from the (frozen) template, values from the
/// shared atomics. Read-modify-write is not atomic; concurrent updates to the
/// same coordinate may be lost.
#[derive(Clone, Copy)]
struct HogwildView<'a> {
    layout: &'a ModelParams,
    values: &'a SharedValues,
}

impl ParamAccess for HogwildView<'_> {
    fn shape(&self) -> ParamShape {
        self.layout.shape()
    }

    fn weight_position(&self, r: RelationId, other: RelationId) -> Option<usize> {
        self.layout.weights.position(r, other)
    }

    fn read(&self, block: Block, start: usize, out: &mut [f64]) {
        let src = &self.values.blocks[block as usize][start..start + out.len()];
        for (o, s) in out.iter_mut().zip(src) {
            *o = f64::from_bits(s.load(Ordering::Relaxed));
        }
    }

    fn read_one(&self, block: Block, index: usize) -> f64 {
        f64::from_bits(self.values.blocks[block as usize][index].load(Ordering::Relaxed))
    }

    fn add(&mut self, block: Block, start: usize, delta: &[f64]) {
        let dst = &self.values.blocks[block as usize][start..start + delta.len()];
        for (cell, d) in dst.iter().zip(delta) {
            let v = f64::from_bits(cell.load(Ordering::Relaxed)) + d;
            cell.store(v.to_bits(), Ordering::Relaxed);
        }
    }

    fn add_one(&mut self, block: Block, index: usize, delta: f64) {
        let cell = &self.values.blocks[block as usize][index];
        let v = f64::from_bits(cell.load(Ordering::Relaxed)) + delta;
        cell.store(v.to_bits(), Ordering::Relaxed);
    }
}

/// Reusable buffers for [`step`].
#[derive(Default)]
pub(crate) struct Scratch {
    a: Vec<f64>,
    v_pos: Vec<f64>,
    v_neg: Vec<f64>,
    d: [Vec<f64>; 2],
    // entity vectors of (t+ slot 1, t+ slot 2, t- slot 1, t- slot 2)
    x: [Vec<f64>; 4],
    delta: Vec<f64>,
    // (flat weight position, indicator difference, current value)
    weights: Vec<(usize, f64, f64)>,
}

impl Scratch {
    fn new(shape: &ParamShape) -> Self {
        let kf = shape.latent_dim;
        let ke = shape.entity_dim;
        Scratch {
            a: vec![0.0; kf],
            v_pos: vec![0.0; kf],
            v_neg: vec![0.0; kf],
            d: [vec![0.0; ke], vec![0.0; ke]],
            x: std::array::from_fn(|_| vec![0.0; ke]),
            delta: vec![0.0; kf.max(ke)],
            weights: Vec::new(),
        }
    }
}

/// Step sizes for one update.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Rates {
    pub lr: f64,
    pub l2: L2,
}

/// Applies one SGD step for `triple` and returns the pre-update pair loss.
/// All gradients are taken at the pre-update values.
pub(crate) fn step<P: ParamAccess>(
    p: &mut P,
    store: &FactStore,
    triple: BprTriple,
    rates: Rates,
    s: &mut Scratch,
) -> f64 {
    let shape = p.shape();
    let kind = shape.kind;
    let kf = shape.latent_dim;
    let ke = shape.entity_dim;
    let BprTriple {
        relation: r,
        positive: tp,
        negative: tn,
    } = triple;

    let mut theta_pos = 0.0;
    let mut theta_neg = 0.0;

    if kind.latent {
        p.read(Block::Relation, r.index() * kf, &mut s.a);
        p.read(Block::Tuple, tp.index() * kf, &mut s.v_pos);
        p.read(Block::Tuple, tn.index() * kf, &mut s.v_neg);
        theta_pos += dot(&s.a, &s.v_pos);
        theta_neg += dot(&s.a, &s.v_neg);
    }

    if kind.neighborhood {
        s.weights.clear();
        let (obs_pos, obs_neg) = (store.obs(tp), store.obs(tn));
        let (mut i, mut j) = (0, 0);
        while i < obs_pos.len() || j < obs_neg.len() {
            let (other, in_pos, in_neg) = match (obs_pos.get(i), obs_neg.get(j)) {
                (Some(&a), Some(&b)) if a == b => {
                    i += 1;
                    j += 1;
                    (a, 1.0, 1.0)
                }
                (Some(&a), Some(&b)) if a < b => {
                    i += 1;
                    (a, 1.0, 0.0)
                }
                (Some(&a), None) => {
                    i += 1;
                    (a, 1.0, 0.0)
                }
                (_, Some(&b)) => {
                    j += 1;
                    (b, 0.0, 1.0)
                }
                (None, None) => unreachable!(),
            };
            if other == r {
                continue;
            }
            if let Some(pos) = p.weight_position(r, other) {
                let w = p.read_one(Block::Weight, pos);
                theta_pos += in_pos * w;
                theta_neg += in_neg * w;
                s.weights.push((pos, in_pos - in_neg, w));
            }
        }
    }

    let (slots_pos, slots_neg) = (store.tuple_slots(tp), store.tuple_slots(tn));
    let entities = [slots_pos.0, slots_pos.1, slots_neg.0, slots_neg.1];
    if kind.entity {
        p.read(Block::Slot, r.index() * 2 * ke, &mut s.d[0]);
        p.read(Block::Slot, (r.index() * 2 + 1) * ke, &mut s.d[1]);
        for (buf, e) in s.x.iter_mut().zip(entities) {
            p.read(Block::Entity, e.index() * ke, buf);
        }
        theta_pos += dot(&s.d[0], &s.x[0]) + dot(&s.d[1], &s.x[1]);
        theta_neg += dot(&s.d[0], &s.x[2]) + dot(&s.d[1], &s.x[3]);
    }

    let loss = pair_loss(theta_pos, theta_neg);
    // -d loss / d (theta_pos - theta_neg)
    let g = logistic(theta_neg - theta_pos);
    let Rates { lr, l2 } = rates;

    if kind.latent {
        let delta = &mut s.delta[..kf];
        for k in 0..kf {
            delta[k] = lr * (g * (s.v_pos[k] - s.v_neg[k]) - l2.relation * s.a[k]);
        }
        p.add(Block::Relation, r.index() * kf, delta);
        for k in 0..kf {
            delta[k] = lr * (g * s.a[k] - l2.tuple * s.v_pos[k]);
        }
        p.add(Block::Tuple, tp.index() * kf, delta);
        for k in 0..kf {
            delta[k] = lr * (-g * s.a[k] - l2.tuple * s.v_neg[k]);
        }
        p.add(Block::Tuple, tn.index() * kf, delta);
    }

    if kind.neighborhood {
        for &(pos, indicator, w) in &s.weights {
            p.add_one(Block::Weight, pos, lr * (g * indicator - l2.weight * w));
        }
    }

    if kind.entity {
        let delta = &mut s.delta[..ke];
        for slot in 0..2 {
            for k in 0..ke {
                delta[k] =
                    lr * (g * (s.x[slot][k] - s.x[slot + 2][k]) - l2.slot * s.d[slot][k]);
            }
            p.add(Block::Slot, (r.index() * 2 + slot) * ke, delta);
        }
        // An entity can fill several of the four positions; its loss
        // gradients add up and its penalty applies once.
        let sign = [g, g, -g, -g];
        for i in 0..4 {
            let e: EntityId = entities[i];
            if entities[..i].contains(&e) {
                continue;
            }
            for k in 0..ke {
                let mut grad = 0.0;
                for j in i..4 {
                    if entities[j] == e {
                        grad += sign[j] * s.d[j % 2][k];
                    }
                }
                delta[k] = lr * (grad - l2.entity * s.x[i][k]);
            }
            p.add(Block::Entity, e.index() * ke, delta);
        }
    }

    loss
}

/// One SGD step on `params` for `triple`, using `cfg`'s learning rate and
/// penalties. Returns the pair loss before the update.
pub fn sgd_step(params: &mut ModelParams, triple: BprTriple, store: &FactStore, cfg: &TrainConfig) -> f64 {
    let mut scratch = Scratch::new(&params.shape());
    step(
        params,
        store,
        triple,
        Rates {
            lr: cfg.learning_rate,
            l2: cfg.l2,
        },
        &mut scratch,
    )
}

/// The pair loss of `triple` under `params`.
pub fn triple_loss(params: &ModelParams, store: &FactStore, triple: BprTriple) -> f64 {
    let theta = |t: TupleId| params.theta_unchecked(triple.relation, t, store.tuple_slots(t), store.obs(t));
    pair_loss(theta(triple.positive), theta(triple.negative))
}

/// Analytic gradient of the pair loss of `triple` (no penalty) with respect
/// to every parameter, laid out like [`ModelParams::blocks`].
pub fn loss_gradient(params: &ModelParams, store: &FactStore, triple: BprTriple) -> [Vec<f64>; 5] {
    let mut recorder = DeltaRecorder::new(params);
    let mut scratch = Scratch::new(&params.shape());
    step(
        &mut recorder,
        store,
        triple,
        Rates {
            lr: 1.0,
            l2: L2::uniform(0.0),
        },
        &mut scratch,
    );
    // A unit-rate step moves each parameter by minus its gradient.
    recorder.deltas.map(|b| b.into_iter().map(|d| -d).collect())
}

/// How a training run used threads.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrainMode {
    Sequential,
    Hogwild { workers: usize },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpochStats {
    pub epoch: usize,
    pub mean_loss: f64,
    /// Milliseconds since the start of training.
    pub elapsed_ms: u128,
}

/// What a training run did.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainReport {
    pub epochs: Vec<EpochStats>,
    pub skipped_relations: usize,
    pub steps: u64,
    pub mode: TrainMode,
}

impl TrainReport {
    /// `epoch<TAB>mean_loss<TAB>elapsed_ms` per epoch, then a summary line.
    pub fn write_tsv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        for e in &self.epochs {
            writeln!(out, "{}\t{}\t{}", e.epoch, e.mean_loss, e.elapsed_ms)?;
        }
        let mode = match self.mode {
            TrainMode::Sequential => "sequential".to_owned(),
            TrainMode::Hogwild { workers } => format!("hogwild:{workers}"),
        };
        writeln!(
            out,
            "summary\tskipped_relations={}\tsteps={}\tmode={}",
            self.skipped_relations, self.steps, mode
        )
    }
}

/// Trains a model on `store`. See [`train_with`].
pub fn train(store: &FactStore, cfg: &TrainConfig) -> Result<(ModelParams, TrainReport)> {
    train_with(store, cfg, |_| {})
}

/// Trains a model on `store`, calling `on_epoch` after each epoch.
///
/// Every epoch visits the observed facts in a fresh random order and takes
/// `negatives_per_positive` steps per fact. Facts of relations that hold for
/// every tuple are skipped and counted in the report.
pub fn train_with<F>(store: &FactStore, cfg: &TrainConfig, mut on_epoch: F) -> Result<(ModelParams, TrainReport)>
where
    F: FnMut(&EpochStats),
{
    cfg.validate()?;
    if store.num_facts() == 0 {
        return Err(Error::EmptyInput);
    }
    let mut rng = cfg.rng();
    let mut params = init_params(store, cfg, &mut rng)?;
    let sampler = TripleSampler::new(store);
    let mut positives: Vec<Fact> = store
        .facts()
        .filter(|f| !sampler.is_degenerate(f.relation))
        .collect();
    let rates = Rates {
        lr: cfg.learning_rate,
        l2: cfg.l2,
    };
    let mode = if cfg.workers > 1 {
        TrainMode::Hogwild {
            workers: cfg.workers,
        }
    } else {
        TrainMode::Sequential
    };

    let start = Instant::now();
    let mut epochs = Vec::with_capacity(cfg.epochs);
    let mut steps = 0u64;
    let shared = (cfg.workers > 1).then(|| SharedValues::from_params(&params));

    for epoch in 0..cfg.epochs {
        positives.shuffle(&mut rng);
        let (loss_sum, n) = match &shared {
            None => {
                let mut scratch = Scratch::new(&params.shape());
                run_chunk(&mut params, store, &sampler, &positives, cfg, rates, &mut rng, &mut scratch)?
            }
            Some(values) => {
                let chunk = positives.len().div_ceil(cfg.workers).max(1);
                let seeds: Vec<u64> = (0..cfg.workers).map(|_| rng.random()).collect();
                let layout = &params;
                let results: Vec<Result<(f64, u64)>> = std::thread::scope(|scope| {
                    let handles: Vec<_> = positives
                        .chunks(chunk)
                        .zip(&seeds)
                        .map(|(facts, &seed)| {
                            let sampler = &sampler;
                            scope.spawn(move || {
                                let mut view = HogwildView { layout, values };
                                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                                let mut scratch = Scratch::new(&layout.shape());
                                run_chunk(&mut view, store, sampler, facts, cfg, rates, &mut rng, &mut scratch)
                            })
                        })
                        .collect();
                    handles
                        .into_iter()
                        .map(|h| h.join().expect("training worker panicked"))
                        .collect()
                });
                let mut total = (0.0, 0);
                for r in results {
                    let (l, n) = r?;
                    total.0 += l;
                    total.1 += n;
                }
                total
            }
        };
        steps += n;
        let stats = EpochStats {
            epoch,
            mean_loss: if n > 0 { loss_sum / n as f64 } else { 0.0 },
            elapsed_ms: start.elapsed().as_millis(),
        };
        on_epoch(&stats);
        epochs.push(stats);
    }

    if let Some(values) = shared {
        values.write_back(&mut params);
    }
    Ok((
        params,
        TrainReport {
            epochs,
            skipped_relations: sampler.num_degenerate(),
            steps,
            mode,
        },
    ))
}

#[allow(clippy::too_many_arguments)]
fn run_chunk<P: ParamAccess, R: Rng>(
    p: &mut P,
    store: &FactStore,
    sampler: &TripleSampler<'_>,
    facts: &[Fact],
    cfg: &TrainConfig,
    rates: Rates,
    rng: &mut R,
    scratch: &mut Scratch,
) -> Result<(f64, u64)> {
    let mut loss = 0.0;
    let mut n = 0u64;
    for fact in facts {
        for _ in 0..cfg.negatives_per_positive {
            let negative = sampler.negative(fact.relation, rng)?;
            let triple = BprTriple {
                relation: fact.relation,
                positive: fact.tuple,
                negative,
            };
            loss += step(p, store, triple, rates, scratch);
            n += 1;
        }
    }
    Ok((loss, n))
}
