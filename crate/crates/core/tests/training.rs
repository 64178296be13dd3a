use std::collections::BTreeMap;

use unischema::prelude::*;
use unischema::training::{TripleSampler, TrainMode};

fn lowrank() -> unischema::verification::SynthCorpus {
    let spec = SynthSpec {
        num_relations: 50,
        num_tuples: 500,
        num_entities: 200,
        rank: 5,
        holdout: 0.2,
        seed: 0,
        ..SynthSpec::default()
    };
    generate_lowrank_corpus(&spec, &mut spec.rng()).unwrap()
}

#[test]
fn default_config_loss_does_not_increase_early() {
    let corpus = lowrank();
    let cfg = TrainConfig {
        epochs: 5,
        ..TrainConfig::default()
    };
    let (_, report) = train(corpus.store(), &cfg).unwrap();
    let losses: Vec<f64> = report.epochs.iter().map(|e| e.mean_loss).collect();
    assert_eq!(losses.len(), 5);
    for w in losses.windows(2) {
        assert!(w[1] <= w[0], "{losses:?}");
    }
}

#[test]
fn sampled_negatives_are_valid() {
    let corpus = lowrank();
    let store = corpus.store();
    let sampler = TripleSampler::new(store);
    let mut rng = unischema::training::TrainConfig::default().rng();
    for r in store.relation_ids() {
        // Relations whose facts were all held out have no positives.
        if store.observed_tuples(r).unwrap().is_empty() {
            continue;
        }
        for _ in 0..50 {
            let triple = sampler.sample(Some(r), &mut rng).unwrap();
            assert_eq!(triple.relation, r);
            assert!(store.contains(r, triple.positive));
            assert!(!store.contains(r, triple.negative));
        }
    }
    for _ in 0..2000 {
        let triple = sampler.sample(None, &mut rng).unwrap();
        assert!(store.contains(triple.relation, triple.positive));
        assert!(!store.contains(triple.relation, triple.negative));
    }
}

#[test]
fn negatives_are_uniform_over_unobserved_tuples() {
    let mut b = FactStoreBuilder::new(SourceRule::all_patterns());
    let (r, other) = (b.relation("r"), b.relation("s"));
    let tuples: Vec<TupleId> = (0..3)
        .map(|i| {
            let (x, y) = (b.entity(&format!("x{i}")), b.entity(&format!("y{i}")));
            b.tuple(x, y)
        })
        .collect();
    b.add(r, tuples[0]);
    for &t in &tuples {
        b.add(other, t);
    }
    let store = b.build();
    let sampler = TripleSampler::new(&store);
    let mut rng = TrainConfig::default().rng();
    let mut counts: BTreeMap<TupleId, usize> = BTreeMap::new();
    let n = 10_000;
    for _ in 0..n {
        let triple = sampler.sample(Some(r), &mut rng).unwrap();
        assert_eq!(triple.positive, tuples[0]);
        *counts.entry(triple.negative).or_default() += 1;
    }
    // Binomial(10^4, 0.5) has sd 50; the [0.45, 0.55] band is 10 sd wide on each side.
    assert_eq!(counts.len(), 2);
    for &c in counts.values() {
        let f = c as f64 / n as f64;
        assert!((0.45..=0.55).contains(&f), "{f}");
    }
}

#[test]
fn hogwild_mode_is_recorded() {
    let corpus = lowrank();
    let cfg = TrainConfig {
        kind: ModelKind::NF,
        latent_dim: 5,
        epochs: 3,
        workers: 4,
        ..TrainConfig::default()
    };
    let (params, report) = train(corpus.store(), &cfg).unwrap();
    assert!(params.is_finite());
    assert_eq!(report.mode, TrainMode::Hogwild { workers: 4 });
    let mut out = Vec::new();
    report.write_tsv(&mut out).unwrap();
    assert!(String::from_utf8(out).unwrap().contains("mode=hogwild:4"));
}

#[test]
fn trained_models_beat_random_ranking() {
    let corpus = lowrank();
    let random = unischema::verification::random_ranking_evaluation(&corpus.split, &mut TrainConfig::default().rng())
        .unwrap()
        .map(MapWeighting::Unweighted)
        .unwrap();
    let cfg = TrainConfig {
        kind: ModelKind::F,
        latent_dim: 5,
        epochs: 50,
        ..TrainConfig::default()
    };
    let (params, _) = train(corpus.store(), &cfg).unwrap();
    let map = evaluate(&corpus.split, &params, |_| true)
        .unwrap()
        .map(MapWeighting::Unweighted)
        .unwrap();
    assert!(map > 3.0 * random, "{map} vs {random}");
}
