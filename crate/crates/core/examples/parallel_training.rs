//! Sequential versus lock-free parallel training on the same corpus.

use std::time::Instant;

use unischema::prelude::*;

fn main() -> unischema::Result<()> {
    let spec = SynthSpec {
        num_relations: 50,
        num_tuples: 2000,
        num_entities: 600,
        seed: 3,
        ..SynthSpec::default()
    };
    let corpus = generate_lowrank_corpus(&spec, &mut spec.rng())?;
    for workers in [1, 4] {
        let cfg = TrainConfig {
            kind: ModelKind::NFE,
            latent_dim: 20,
            entity_dim: 20,
            epochs: 50,
            workers,
            ..TrainConfig::default()
        };
        let start = Instant::now();
        let (params, report) = train(corpus.store(), &cfg)?;
        let map = evaluate(&corpus.split, &params, |_| true)?.map(MapWeighting::Unweighted)?;
        println!(
            "{:?}: {:.2}s, final loss {:.4}, MAP {map:.4}",
            report.mode,
            start.elapsed().as_secs_f64(),
            report.epochs.last().map_or(f64::NAN, |e| e.mean_loss)
        );
    }
    Ok(())
}
