//! Natural parameters and confidences for the latent feature (F),
//! neighborhood (N) and entity (E) models and their sums.
//!
//! For a relation `r` and tuple `t = (e1, e2)`:
//!
//! ```text
//! theta_F(r, t) = <a_r, v_t>
//! theta_N(r, t) = sum of w[r][r'] over observed r' != r of t
//! theta_E(r, t) = <d_{r,1}, x_e1> + <d_{r,2}, x_e2>
//! theta(r, t)   = sum of the enabled components
//! confidence    = 1 / (1 + exp(-theta))
//! ```
//!
//! Neighborhood weights are directed: `w[r][r']` and `w[r'][r]` are separate
//! parameters, so the model can learn that one relation implies another
//! without the converse.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::store::{EntityId, FactStore, RelationId, TupleId};

/// Below this the logistic is evaluated as `e^x / (1 + e^x)`.
const LOGISTIC_LOW_CUTOFF: f64 = -500.0;

/// The logistic function, without input validation.
#[inline]
pub fn logistic(theta: f64) -> f64 {
    if theta < LOGISTIC_LOW_CUTOFF {
        let e = theta.exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + (-theta).exp())
    }
}

/// Maps a natural parameter to a confidence in `[0, 1]` (strictly inside
/// for any theta whose logistic is representable).
pub fn confidence(theta: f64) -> Result<f64> {
    if !theta.is_finite() {
        return Err(Error::NonFinite(theta));
    }
    Ok(logistic(theta))
}

/// Which score components a model sums.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct ModelKind {
    pub latent: bool,
    pub neighborhood: bool,
    pub entity: bool,
}

impl ModelKind {
    pub const F: ModelKind = ModelKind::new(true, false, false);
    pub const N: ModelKind = ModelKind::new(false, true, false);
    pub const E: ModelKind = ModelKind::new(false, false, true);
    pub const NF: ModelKind = ModelKind::new(true, true, false);
    pub const NFE: ModelKind = ModelKind::new(true, true, true);

    pub const fn new(latent: bool, neighborhood: bool, entity: bool) -> Self {
        ModelKind {
            latent,
            neighborhood,
            entity,
        }
    }

    pub fn is_empty(self) -> bool {
        !(self.latent || self.neighborhood || self.entity)
    }

    /// Every non-empty combination.
    pub fn all() -> [ModelKind; 7] {
        [
            ModelKind::F,
            ModelKind::N,
            ModelKind::E,
            ModelKind::NF,
            ModelKind::new(true, false, true),
            ModelKind::new(false, true, true),
            ModelKind::NFE,
        ]
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut name = String::with_capacity(3);
        for (on, c) in [(self.neighborhood, 'n'), (self.latent, 'f'), (self.entity, 'e')] {
            if on {
                name.push(c);
            }
        }
        f.pad(&name)
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    /// Parses letters from `{n, f, e}` in any order and case, e.g. `"nfe"`.
    fn from_str(s: &str) -> Result<Self> {
        let mut kind = ModelKind::default();
        for c in s.chars() {
            let flag = match c.to_ascii_lowercase() {
                'f' => &mut kind.latent,
                'n' => &mut kind.neighborhood,
                'e' => &mut kind.entity,
                _ => return Err(Error::Config(format!("unknown model component {c:?} in {s:?}"))),
            };
            if *flag {
                return Err(Error::Config(format!("repeated model component {c:?} in {s:?}")));
            }
            *flag = true;
        }
        if kind.is_empty() {
            return Err(Error::NoComponents);
        }
        Ok(kind)
    }
}

/// Sparse directed weights `w[r][r']` over a fixed support, stored row-wise
/// with sorted neighbor lists.
#[derive(Clone, Debug, PartialEq)]
pub struct NeighborWeights {
    offsets: Vec<usize>,
    neighbors: Vec<RelationId>,
    values: Vec<f64>,
}

impl NeighborWeights {
    /// No support at all: every weight is an implicit zero.
    pub fn empty(num_relations: usize) -> Self {
        NeighborWeights {
            offsets: vec![0; num_relations + 1],
            neighbors: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Zero weights over the given per-relation neighbor lists. Lists are
    /// sorted and deduplicated; self-loops are dropped.
    pub fn zeros(support: Vec<Vec<RelationId>>) -> Self {
        let mut offsets = Vec::with_capacity(support.len() + 1);
        let mut neighbors = Vec::new();
        offsets.push(0);
        for (r, mut row) in support.into_iter().enumerate() {
            row.sort_unstable();
            row.dedup();
            neighbors.extend(row.into_iter().filter(|n| n.index() != r));
            offsets.push(neighbors.len());
        }
        let values = vec![0.0; neighbors.len()];
        NeighborWeights {
            offsets,
            neighbors,
            values,
        }
    }

    pub fn num_relations(&self) -> usize {
        self.offsets.len() - 1
    }

    /// Number of keys in the support.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Flat position of the key `(r, other)`, if it is in the support.
    #[inline]
    pub fn position(&self, r: RelationId, other: RelationId) -> Option<usize> {
        let (lo, hi) = (*self.offsets.get(r.index())?, self.offsets[r.index() + 1]);
        self.neighbors[lo..hi]
            .binary_search(&other)
            .ok()
            .map(|i| lo + i)
    }

    /// `w[r][other]`, zero when the key is outside the support.
    #[inline]
    pub fn get(&self, r: RelationId, other: RelationId) -> f64 {
        self.position(r, other).map_or(0.0, |p| self.values[p])
    }

    pub fn set(&mut self, r: RelationId, other: RelationId, value: f64) -> Result<()> {
        let p = self.position(r, other).ok_or_else(|| {
            Error::Config(format!("weight ({r}, {other}) is outside the co-occurrence support"))
        })?;
        self.values[p] = value;
        Ok(())
    }

    /// The neighbors and weights of `r`.
    pub fn row(&self, r: RelationId) -> (&[RelationId], &[f64]) {
        let (lo, hi) = (self.offsets[r.index()], self.offsets[r.index() + 1]);
        (&self.neighbors[lo..hi], &self.values[lo..hi])
    }

    /// `(r, r', w)` triples in key order.
    pub fn iter(&self) -> impl Iterator<Item = (RelationId, RelationId, f64)> + '_ {
        self.offsets.windows(2).enumerate().flat_map(move |(r, span)| {
            let r = RelationId::from_index(r);
            (span[0]..span[1]).map(move |p| (r, self.neighbors[p], self.values[p]))
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    /// Sum of `w[r][r']` over `r'` in `observed`, skipping `r` itself.
    #[inline]
    pub fn sum_over(&self, r: RelationId, observed: &[RelationId]) -> f64 {
        observed
            .iter()
            .filter(|&&o| o != r)
            .map(|&o| self.get(r, o))
            .sum()
    }
}

/// All learned parameters of a model.
///
/// Components that are disabled in `kind` have dimension 0 and no storage.
/// Slot vectors are indexed per relation and argument slot.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    kind: ModelKind,
    latent_dim: usize,
    entity_dim: usize,
    num_relations: usize,
    num_tuples: usize,
    num_entities: usize,
    pub(crate) relation_vecs: Vec<f64>,
    pub(crate) tuple_vecs: Vec<f64>,
    pub(crate) weights: NeighborWeights,
    pub(crate) entity_vecs: Vec<f64>,
    pub(crate) slot_vecs: Vec<f64>,
}

/// Sizes needed to lay out a [`ModelParams`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParamShape {
    pub kind: ModelKind,
    pub latent_dim: usize,
    pub entity_dim: usize,
    pub num_relations: usize,
    pub num_tuples: usize,
    pub num_entities: usize,
}

impl ModelParams {
    /// All-zero parameters. `support` gives the neighborhood keys per
    /// relation and is ignored when the neighborhood model is disabled.
    pub fn zeros(shape: ParamShape, support: Vec<Vec<RelationId>>) -> Result<Self> {
        let kind = shape.kind;
        if kind.is_empty() {
            return Err(Error::NoComponents);
        }
        let latent_dim = if kind.latent { shape.latent_dim } else { 0 };
        let entity_dim = if kind.entity { shape.entity_dim } else { 0 };
        if kind.latent && latent_dim == 0 {
            return Err(Error::Config("latent dimension must be positive".into()));
        }
        if kind.entity && entity_dim == 0 {
            return Err(Error::Config("entity dimension must be positive".into()));
        }
        let weights = if kind.neighborhood {
            if support.len() != shape.num_relations {
                return Err(Error::DimensionMismatch {
                    expected: shape.num_relations,
                    found: support.len(),
                });
            }
            NeighborWeights::zeros(support)
        } else {
            NeighborWeights::empty(shape.num_relations)
        };
        Ok(ModelParams {
            kind,
            latent_dim,
            entity_dim,
            num_relations: shape.num_relations,
            num_tuples: shape.num_tuples,
            num_entities: shape.num_entities,
            relation_vecs: vec![0.0; shape.num_relations * latent_dim],
            tuple_vecs: vec![0.0; shape.num_tuples * latent_dim],
            weights,
            entity_vecs: vec![0.0; shape.num_entities * entity_dim],
            slot_vecs: vec![0.0; shape.num_relations * 2 * entity_dim],
        })
    }

    /// Zero parameters sized for `store`, with neighborhood support equal to
    /// the store's co-occurring relation pairs.
    pub fn zeros_for(
        store: &FactStore,
        kind: ModelKind,
        latent_dim: usize,
        entity_dim: usize,
    ) -> Result<Self> {
        let support = if kind.neighborhood {
            store.cooccurrence_neighbors()
        } else {
            Vec::new()
        };
        ModelParams::zeros(
            ParamShape {
                kind,
                latent_dim,
                entity_dim,
                num_relations: store.num_relations(),
                num_tuples: store.num_tuples(),
                num_entities: store.num_entities(),
            },
            support,
        )
    }

    pub fn shape(&self) -> ParamShape {
        ParamShape {
            kind: self.kind,
            latent_dim: self.latent_dim,
            entity_dim: self.entity_dim,
            num_relations: self.num_relations,
            num_tuples: self.num_tuples,
            num_entities: self.num_entities,
        }
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn latent_dim(&self) -> usize {
        self.latent_dim
    }

    pub fn entity_dim(&self) -> usize {
        self.entity_dim
    }

    pub fn weights(&self) -> &NeighborWeights {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut NeighborWeights {
        &mut self.weights
    }

    pub fn relation_vec(&self, r: RelationId) -> &[f64] {
        let k = self.latent_dim;
        &self.relation_vecs[r.index() * k..(r.index() + 1) * k]
    }

    pub fn relation_vec_mut(&mut self, r: RelationId) -> &mut [f64] {
        let k = self.latent_dim;
        &mut self.relation_vecs[r.index() * k..(r.index() + 1) * k]
    }

    pub fn tuple_vec(&self, t: TupleId) -> &[f64] {
        let k = self.latent_dim;
        &self.tuple_vecs[t.index() * k..(t.index() + 1) * k]
    }

    pub fn tuple_vec_mut(&mut self, t: TupleId) -> &mut [f64] {
        let k = self.latent_dim;
        &mut self.tuple_vecs[t.index() * k..(t.index() + 1) * k]
    }

    pub fn entity_vec(&self, e: EntityId) -> &[f64] {
        let k = self.entity_dim;
        &self.entity_vecs[e.index() * k..(e.index() + 1) * k]
    }

    pub fn entity_vec_mut(&mut self, e: EntityId) -> &mut [f64] {
        let k = self.entity_dim;
        &mut self.entity_vecs[e.index() * k..(e.index() + 1) * k]
    }

    /// Argument-slot vector of `r`; `slot` is 0 for the first entity, 1 for
    /// the second.
    pub fn slot_vec(&self, r: RelationId, slot: usize) -> &[f64] {
        let k = self.entity_dim;
        let start = (r.index() * 2 + slot) * k;
        &self.slot_vecs[start..start + k]
    }

    pub fn slot_vec_mut(&mut self, r: RelationId, slot: usize) -> &mut [f64] {
        let k = self.entity_dim;
        let start = (r.index() * 2 + slot) * k;
        &mut self.slot_vecs[start..start + k]
    }

    /// Raw storage blocks in the order a, v, w, x (entities), d (slots).
    pub fn blocks(&self) -> [&[f64]; 5] {
        [
            &self.relation_vecs,
            &self.tuple_vecs,
            self.weights.values(),
            &self.entity_vecs,
            &self.slot_vecs,
        ]
    }

    pub fn blocks_mut(&mut self) -> [&mut [f64]; 5] {
        [
            &mut self.relation_vecs,
            &mut self.tuple_vecs,
            self.weights.values_mut(),
            &mut self.entity_vecs,
            &mut self.slot_vecs,
        ]
    }

    pub fn num_parameters(&self) -> usize {
        self.blocks().iter().map(|b| b.len()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.blocks().iter().all(|b| b.iter().all(|x| x.is_finite()))
    }

    fn check_relation(&self, r: RelationId) -> Result<()> {
        if r.index() < self.num_relations {
            Ok(())
        } else {
            Err(Error::UnknownId {
                kind: "relation",
                id: r.index(),
            })
        }
    }

    /// Latent feature score `<a_r, v_t>`.
    pub fn theta_f(&self, r: RelationId, t: TupleId) -> Result<f64> {
        if !self.kind.latent {
            return Err(Error::Config("latent feature component is disabled".into()));
        }
        self.check_relation(r)?;
        if t.index() >= self.num_tuples {
            return Err(Error::UnknownId {
                kind: "tuple",
                id: t.index(),
            });
        }
        Ok(dot(self.relation_vec(r), self.tuple_vec(t)))
    }

    /// Neighborhood score: `w[r][r']` summed over `observed`, excluding `r`.
    /// Keys outside the support count as zero.
    pub fn theta_n(&self, r: RelationId, observed: &[RelationId]) -> f64 {
        self.weights.sum_over(r, observed)
    }

    /// Entity score: slot-wise dot products of `r`'s argument vectors with
    /// the entity vectors of `slots`.
    pub fn theta_e(&self, r: RelationId, slots: (EntityId, EntityId)) -> Result<f64> {
        if !self.kind.entity {
            return Err(Error::Config("entity component is disabled".into()));
        }
        self.check_relation(r)?;
        for e in [slots.0, slots.1] {
            if e.index() >= self.num_entities {
                return Err(Error::UnknownId {
                    kind: "entity",
                    id: e.index(),
                });
            }
        }
        Ok(self.theta_e_unchecked(r, slots))
    }

    #[inline]
    pub(crate) fn theta_e_unchecked(&self, r: RelationId, slots: (EntityId, EntityId)) -> f64 {
        dot(self.slot_vec(r, 0), self.entity_vec(slots.0))
            + dot(self.slot_vec(r, 1), self.entity_vec(slots.1))
    }

    /// Sum of the enabled components. Disabled components contribute 0.
    pub fn theta(
        &self,
        r: RelationId,
        t: TupleId,
        slots: (EntityId, EntityId),
        observed: &[RelationId],
    ) -> Result<f64> {
        if self.kind.is_empty() {
            return Err(Error::NoComponents);
        }
        let mut theta = 0.0;
        if self.kind.neighborhood {
            self.check_relation(r)?;
            theta += self.theta_n(r, observed);
        }
        if self.kind.latent {
            theta += self.theta_f(r, t)?;
        }
        if self.kind.entity {
            theta += self.theta_e(r, slots)?;
        }
        Ok(theta)
    }

    /// Unchecked [`ModelParams::theta`] for ids known to be in range.
    #[inline]
    pub(crate) fn theta_unchecked(
        &self,
        r: RelationId,
        t: TupleId,
        slots: (EntityId, EntityId),
        observed: &[RelationId],
    ) -> f64 {
        let mut theta = 0.0;
        if self.kind.neighborhood {
            theta += self.theta_n(r, observed);
        }
        if self.kind.latent {
            theta += dot(self.relation_vec(r), self.tuple_vec(t));
        }
        if self.kind.entity {
            theta += self.theta_e_unchecked(r, slots);
        }
        theta
    }

    /// Checks that these parameters were laid out for `store`.
    pub fn check_store(&self, store: &FactStore) -> Result<()> {
        for (expected, found) in [
            (self.num_relations, store.num_relations()),
            (self.num_tuples, store.num_tuples()),
            (self.num_entities, store.num_entities()),
        ] {
            if expected != found {
                return Err(Error::DimensionMismatch { expected, found });
            }
        }
        Ok(())
    }

    /// Scores `(r, t)` using the observations of `store`.
    pub fn score(&self, store: &FactStore, r: RelationId, t: TupleId) -> Result<f64> {
        self.check_store(store)?;
        let observed = store.observed_relations(t)?;
        self.theta(r, t, store.tuple_slots(t), observed)
    }

    pub fn predict(&self, store: &FactStore, r: RelationId, t: TupleId) -> Result<RankedPrediction> {
        let theta = self.score(store, r, t)?;
        Ok(RankedPrediction::new(r, t, theta))
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A scored `(relation, tuple)` pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RankedPrediction {
    pub relation: RelationId,
    pub tuple: TupleId,
    pub theta: f64,
    pub confidence: f64,
}

impl RankedPrediction {
    pub fn new(relation: RelationId, tuple: TupleId, theta: f64) -> Self {
        RankedPrediction {
            relation,
            tuple,
            theta,
            confidence: logistic(theta),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(kind: ModelKind) -> ParamShape {
        ParamShape {
            kind,
            latent_dim: 2,
            entity_dim: 2,
            num_relations: 3,
            num_tuples: 2,
            num_entities: 2,
        }
    }

    fn full_support() -> Vec<Vec<RelationId>> {
        (0..3)
            .map(|r| {
                (0..3)
                    .filter(|&o| o != r)
                    .map(RelationId::from_index)
                    .collect()
            })
            .collect()
    }

    const R1: RelationId = RelationId(0);
    const R2: RelationId = RelationId(1);
    const R3: RelationId = RelationId(2);
    const T: TupleId = TupleId(0);
    const SLOTS: (EntityId, EntityId) = (EntityId(0), EntityId(1));

    #[test]
    fn confidence_closed_forms() {
        assert_eq!(confidence(0.0).unwrap(), 0.5);
        assert!((confidence(50.0).unwrap() - 1.0).abs() <= 1e-15);
        let expected = 1.0 / (1.0 + (-2.0f64).exp());
        assert!((confidence(2.0).unwrap() - expected).abs() < 1e-16);
        assert!((expected - 0.880797).abs() < 1e-6);
        assert!(matches!(confidence(f64::NAN), Err(Error::NonFinite(_))));
        assert!(confidence(f64::INFINITY).is_err());
    }

    #[test]
    fn logistic_low_branch_does_not_overflow() {
        for theta in [-501.0, -700.0, -1e4] {
            let c = logistic(theta);
            assert!(c.is_finite() && c >= 0.0);
        }
        assert!(logistic(-501.0) > 0.0);
    }

    #[test]
    fn theta_f_examples() {
        let mut p = ModelParams::zeros(shape(ModelKind::F), Vec::new()).unwrap();
        p.tuple_vec_mut(T).copy_from_slice(&[3.0, -1.0]);
        assert_eq!(p.theta_f(R1, T).unwrap(), 0.0);
        p.relation_vec_mut(R1).copy_from_slice(&[1.0, 2.0]);
        assert_eq!(p.theta_f(R1, T).unwrap(), 1.0);
        p.relation_vec_mut(R1).copy_from_slice(&[0.5, 0.5]);
        p.tuple_vec_mut(T).copy_from_slice(&[0.5, 0.5]);
        assert_eq!(p.theta_f(R1, T).unwrap(), 0.5);
        assert!(matches!(
            p.theta_f(R1, TupleId(7)),
            Err(Error::UnknownId { kind: "tuple", .. })
        ));
    }

    #[test]
    fn theta_n_examples() {
        let mut p = ModelParams::zeros(shape(ModelKind::N), full_support()).unwrap();
        p.weights_mut().set(R1, R2, 0.7).unwrap();
        assert_eq!(p.theta_n(R1, &[R1, R2]), 0.7);
        assert_eq!(p.theta_n(R1, &[]), 0.0);
        p.weights_mut().set(R1, R2, 0.2).unwrap();
        p.weights_mut().set(R1, R3, -0.5).unwrap();
        assert!((p.theta_n(R1, &[R2, R3]) - -0.3).abs() < 1e-15);
    }

    #[test]
    fn missing_weights_are_zero_and_self_keys_rejected() {
        let mut support = full_support();
        support[0] = vec![R2];
        let mut p = ModelParams::zeros(shape(ModelKind::N), support).unwrap();
        assert_eq!(p.weights().get(R1, R3), 0.0);
        assert!(p.weights_mut().set(R1, R3, 1.0).is_err());
        assert!(p.weights_mut().set(R1, R1, 1.0).is_err());
    }

    #[test]
    fn theta_e_examples() {
        let mut p = ModelParams::zeros(shape(ModelKind::E), Vec::new()).unwrap();
        p.entity_vec_mut(EntityId(0)).copy_from_slice(&[2.0, 9.0]);
        p.entity_vec_mut(EntityId(1)).copy_from_slice(&[9.0, 3.0]);
        assert_eq!(p.theta_e(R1, SLOTS).unwrap(), 0.0);
        p.slot_vec_mut(R1, 0).copy_from_slice(&[1.0, 0.0]);
        p.slot_vec_mut(R1, 1).copy_from_slice(&[0.0, 1.0]);
        assert_eq!(p.theta_e(R1, SLOTS).unwrap(), 5.0);
        // Swapping the arguments changes the score.
        assert_eq!(p.theta_e(R1, (EntityId(1), EntityId(0))).unwrap(), 18.0);
    }

    #[test]
    fn combined_examples() {
        let mut p = ModelParams::zeros(shape(ModelKind::NFE), full_support()).unwrap();
        p.relation_vec_mut(R1).copy_from_slice(&[1.0, 2.0]);
        p.tuple_vec_mut(T).copy_from_slice(&[3.0, -1.0]);
        p.weights_mut().set(R1, R2, 0.2).unwrap();
        p.weights_mut().set(R1, R3, -0.5).unwrap();
        p.entity_vec_mut(EntityId(0)).copy_from_slice(&[2.0, 9.0]);
        p.entity_vec_mut(EntityId(1)).copy_from_slice(&[9.0, 3.0]);
        p.slot_vec_mut(R1, 0).copy_from_slice(&[1.0, 0.0]);
        p.slot_vec_mut(R1, 1).copy_from_slice(&[0.0, 1.0]);
        let theta = p.theta(R1, T, SLOTS, &[R2, R3]).unwrap();
        assert!((theta - 5.7).abs() < 1e-12);

        let mut nf = ModelParams::zeros(shape(ModelKind::NF), full_support()).unwrap();
        nf.relation_vec_mut(R1).copy_from_slice(&[1.0, 2.0]);
        nf.tuple_vec_mut(T).copy_from_slice(&[3.0, -1.0]);
        nf.weights_mut().set(R1, R2, 0.7).unwrap();
        assert!((nf.theta(R1, T, SLOTS, &[R1, R2]).unwrap() - 1.7).abs() < 1e-15);

        let mut f = ModelParams::zeros(shape(ModelKind::F), Vec::new()).unwrap();
        f.relation_vec_mut(R1).copy_from_slice(&[1.0, 2.0]);
        f.tuple_vec_mut(T).copy_from_slice(&[3.0, -1.0]);
        assert_eq!(
            f.theta(R1, T, SLOTS, &[R2]).unwrap(),
            f.theta_f(R1, T).unwrap()
        );
    }

    #[test]
    fn empty_kind_is_rejected() {
        assert!(matches!(
            ModelParams::zeros(shape(ModelKind::default()), Vec::new()),
            Err(Error::NoComponents)
        ));
        assert!(matches!("".parse::<ModelKind>(), Err(Error::NoComponents)));
    }

    #[test]
    fn model_kind_round_trips_through_text() {
        for kind in ModelKind::all() {
            assert_eq!(kind.to_string().parse::<ModelKind>().unwrap(), kind);
        }
        assert_eq!("FEN".parse::<ModelKind>().unwrap(), ModelKind::NFE);
        assert!("nn".parse::<ModelKind>().is_err());
        assert!("x".parse::<ModelKind>().is_err());
    }
}
