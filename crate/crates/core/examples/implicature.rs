//! Directed implicature: relation A always implies B, but only 30% of
//! B-tuples carry A. The neighborhood weights learn the direction.

use unischema::prelude::*;

fn main() -> unischema::Result<()> {
    let spec = SynthSpec {
        num_relations: 60,
        num_tuples: 2000,
        num_entities: 400,
        threshold: 1.0,
        rules: vec![ImplicatureRule {
            antecedent: 0,
            consequent: 1,
            coverage: 0.3,
        }],
        ..SynthSpec::default()
    };
    let corpus = generate_implicature_corpus(&spec, &mut spec.rng())?;
    let store = corpus.store();
    let a = store.relation_id("pat:rel000").expect("antecedent");
    let b = store.relation_id("pat:rel001").expect("consequent");
    println!(
        "A on {} tuples, B on {} training tuples, {} B facts held out on A-tuples",
        store.observed_tuples(a)?.len(),
        store.observed_tuples(b)?.len(),
        corpus.split.test().len()
    );

    for kind in [ModelKind::N, ModelKind::NF] {
        let cfg = TrainConfig {
            kind,
            latent_dim: 10,
            entity_dim: 5,
            l2: L2::uniform(0.1),
            seed: 1,
            ..TrainConfig::default()
        };
        let (params, _) = train(store, &cfg)?;
        let eval = evaluate(&corpus.split, &params, |r| r == b)?;
        println!(
            "{kind:>3}: w(B <- A) {:.3}  w(A <- B) {:.3}  AP on held-out B facts {:.4}",
            params.weights().get(b, a),
            params.weights().get(a, b),
            eval.reports[0].average_precision
        );
    }
    Ok(())
}
