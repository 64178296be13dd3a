//! Save a trained model as text and load it back bit-exactly.

use unischema::prelude::*;

fn main() -> unischema::Result<()> {
    let spec = SynthSpec {
        num_relations: 12,
        num_tuples: 80,
        num_entities: 40,
        rank: 3,
        seed: 9,
        ..SynthSpec::default()
    };
    let corpus = generate_lowrank_corpus(&spec, &mut spec.rng())?;
    let cfg = TrainConfig {
        kind: ModelKind::NFE,
        latent_dim: 4,
        entity_dim: 3,
        epochs: 20,
        ..TrainConfig::default()
    };
    let (params, _) = train(corpus.store(), &cfg)?;
    let model = ModelFile::new(corpus.store().clone(), params, cfg.seed)?;

    let text = model.to_text()?;
    println!("{} bytes; header:", text.len());
    for line in text.lines().take_while(|l| !l.starts_with('[')) {
        println!("  {line}");
    }

    let loaded = ModelFile::read(text.as_bytes())?;
    let same_bits = loaded
        .params
        .blocks()
        .iter()
        .zip(model.params.blocks())
        .all(|(a, b)| a.iter().map(|x| x.to_bits()).eq(b.iter().map(|x| x.to_bits())));
    println!("parameters bit-identical after reload: {same_bits}");
    println!("re-serialized text identical: {}", loaded.to_text()? == text);
    Ok(())
}
