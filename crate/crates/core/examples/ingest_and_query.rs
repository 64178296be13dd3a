//! Build a fact store from TSV lines and query its indexes.

use unischema::prelude::*;

const FACTS: &str = "\
# relation\tentity1\tentity2
historian-at\tFerguson\tHarvard
professor-at\tFerguson\tHarvard
professor-at\tKeynes\tCambridge
/people/person/employer\tKeynes\tCambridge
/people/person/employer\tFerguson\tHarvard
lives-in\tFerguson\tBoston
";

fn main() -> unischema::Result<()> {
    let store = ingest(FACTS.as_bytes(), SourceRule::new(["/"]))?;
    println!("{}", store.counts());

    for r in store.relation_ids() {
        println!(
            "{:<26} {:<10} {} tuples",
            store.relation_name(r),
            store.relation_source(r).as_str(),
            store.observed_tuples(r)?.len()
        );
    }

    let t = store.tuple_by_names("Ferguson", "Harvard").expect("tuple exists");
    let observed: Vec<&str> = store
        .observed_relations(t)?
        .iter()
        .map(|&r| store.relation_name(r))
        .collect();
    println!("<Ferguson, Harvard>: {}", observed.join(", "));

    println!("co-occurring pairs (support of the neighborhood weights):");
    for (a, b) in store.cooccurring_relation_pairs() {
        println!("  {} -> {}", store.relation_name(a), store.relation_name(b));
    }
    Ok(())
}
