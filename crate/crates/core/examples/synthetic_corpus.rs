//! Generate a synthetic corpus with structured and pattern relations and
//! write it as fact files plus a manifest.

use unischema::prelude::*;
use unischema::verification::SynthManifest;

fn main() -> unischema::Result<()> {
    let spec = SynthSpec {
        num_relations: 40,
        num_tuples: 600,
        num_entities: 250,
        structured_relations: 10,
        rules: vec![ImplicatureRule {
            antecedent: 12,
            consequent: 3,
            coverage: 0.5,
        }],
        threshold: 1.0,
        holdout: 0.3,
        seed: 42,
        ..SynthSpec::default()
    };
    let corpus = generate_implicature_corpus(&spec, &mut spec.rng())?;
    let dir = std::env::temp_dir().join("unischema-synthetic-example");
    corpus.write_to(&dir)?;

    let manifest = SynthManifest::read(&dir.join("manifest.toml"))?;
    println!("wrote {}", dir.display());
    println!("  {} training facts, {} held-out facts", manifest.train_facts, manifest.test_facts);
    println!("  structured relations start with {:?}", manifest.structured_prefix);

    let store = corpus.store();
    let structured = unischema::verification::structured_relations(store);
    println!("  {} structured, {} pattern relations", structured.len(), store.num_relations() - structured.len());

    let (t, f) = corpus.split.test().iter().next().map(|f| (f.tuple, f.relation)).expect("held-out fact");
    println!(
        "  e.g. held-out {} on tuple {} has true score {:.3} > threshold {}",
        store.relation_name(f),
        t,
        corpus.true_score(f, t),
        spec.threshold
    );
    Ok(())
}
