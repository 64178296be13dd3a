//! Compare model kinds by held-out MAP, then re-score them on a shared
//! pool of their top candidates.

use unischema::prelude::*;
use unischema::verification::random_ranking_evaluation;

fn main() -> unischema::Result<()> {
    let spec = SynthSpec {
        num_relations: 50,
        num_tuples: 500,
        num_entities: 200,
        rank: 5,
        ..SynthSpec::default()
    };
    let corpus = generate_lowrank_corpus(&spec, &mut spec.rng())?;
    let random = random_ranking_evaluation(&corpus.split, &mut spec.rng())?;
    println!("random  MAP {:.4}", random.map(MapWeighting::Unweighted)?);

    let mut systems = Vec::new();
    for kind in [ModelKind::N, ModelKind::F, ModelKind::NF, ModelKind::NFE] {
        let cfg = TrainConfig {
            kind,
            latent_dim: 5,
            entity_dim: 5,
            epochs: 400,
            l2: L2::uniform(0.1),
            seed: 1,
            ..TrainConfig::default()
        };
        let (params, _) = train(corpus.store(), &cfg)?;
        let eval = evaluate(&corpus.split, &params, |_| true)?;
        println!(
            "{kind:<6}  MAP {:.4}  weighted MAP {:.4}  ({} relations, {} without held-out facts)",
            eval.map(MapWeighting::Unweighted)?,
            eval.map(MapWeighting::ByPositives)?,
            eval.reports.len(),
            eval.excluded.len()
        );
        systems.push((kind, params));
    }

    let refs: Vec<&ModelParams> = systems.iter().map(|(_, p)| p).collect();
    let pooled = evaluate_pooled(&corpus.split, &refs, 20)?;
    for ((kind, _), eval) in systems.iter().zip(&pooled) {
        println!("{kind:<6}  pooled MAP@20 {:.4}", eval.map(MapWeighting::Unweighted)?);
    }
    Ok(())
}
