//! Train a combined model on a synthetic corpus and print the top
//! predictions for one relation.

use unischema::prelude::*;

fn main() -> unischema::Result<()> {
    let spec = SynthSpec {
        num_relations: 30,
        num_tuples: 400,
        num_entities: 150,
        seed: 5,
        ..SynthSpec::default()
    };
    let corpus = generate_lowrank_corpus(&spec, &mut spec.rng())?;
    let store = corpus.store();
    println!("{}", store.counts());

    let cfg = TrainConfig {
        kind: ModelKind::NFE,
        latent_dim: 10,
        entity_dim: 5,
        epochs: 100,
        l2: L2::uniform(0.05),
        ..TrainConfig::default()
    };
    let (params, report) = train_with(store, &cfg, |e| {
        if (e.epoch + 1) % 25 == 0 {
            println!("epoch {:>3}  loss {:.4}", e.epoch + 1, e.mean_loss);
        }
    })?;
    println!("{} SGD steps, {} skipped relations", report.steps, report.skipped_relations);

    let r = store
        .relation_ids()
        .max_by_key(|&r| store.observed_tuples(r).map_or(0, <[_]>::len))
        .expect("non-empty store");
    let mut predictions: Vec<RankedPrediction> = store
        .tuple_ids()
        .filter(|&t| !store.contains(r, t))
        .map(|t| params.predict(store, r, t))
        .collect::<unischema::Result<_>>()?;
    unischema::evaluation::sort_predictions(&mut predictions);

    let held_out = corpus.split.positives(r);
    println!("top unobserved tuples for {}:", store.relation_name(r));
    for p in predictions.iter().take(10) {
        let (a, b) = store.tuple_slots(p.tuple);
        let mark = if held_out.contains(&p.tuple) { "held-out fact" } else { "" };
        println!(
            "  {} {}  theta {:+.3}  confidence {:.3}  {mark}",
            store.entity_name(a),
            store.entity_name(b),
            p.theta,
            p.confidence
        );
    }
    Ok(())
}
