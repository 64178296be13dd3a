//! Text serialization of trained models.
//!
//! A model file holds a header, the vocabularies, the training facts (the
//! neighborhood score and `predict` need each tuple's observations), and one
//! section per enabled parameter block. Floats are written in Rust's
//! shortest round-trip exponent form (`{:e}`), so every value parses back to
//! the identical bits and re-saving a loaded file reproduces it byte for
//! byte.
//!
//! ```text
//! unischema-model  1
//! kind             nfe
//! latent_dim       20
//! entity_dim       20
//! seed             42
//! relations        2
//! entities         3
//! tuples           2
//! facts            3
//! weights          2
//! [relations]      source<TAB>name per line
//! [entities]       name per line
//! [tuples]         entity1 id<TAB>entity2 id per line
//! [facts]          relation id<TAB>tuple id per line
//! [a]              one relation vector per line, TAB-separated
//! [v]              one tuple vector per line
//! [w]              relation id<TAB>relation id<TAB>weight per line
//! [t_e]            one entity vector per line
//! [d]              relation id<TAB>slot<TAB>vector per line
//! ```
//!
//! Header keys and values are TAB-separated.

use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::scoring::{ModelKind, ModelParams, NeighborWeights, ParamShape};
use crate::store::{EntityId, FactStore, FactStoreBuilder, RelationId, RelationSource, SourceRule, TupleId};

pub const MAGIC: &str = "unischema-model";
pub const FORMAT_VERSION: u32 = 1;

/// A trained model together with the data it was trained on.
#[derive(Clone, Debug)]
pub struct ModelFile {
    pub store: FactStore,
    pub params: ModelParams,
    pub seed: u64,
}

fn check_name(kind: &str, name: &str) -> Result<()> {
    if name.contains(['\t', '\n', '\r']) {
        return Err(Error::ModelFormat(format!(
            "{kind} name {name:?} contains a TAB or line break"
        )));
    }
    Ok(())
}

fn write_row(out: &mut String, values: &[f64]) {
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push('\t');
        }
        write!(out, "{v:e}").unwrap();
    }
    out.push('\n');
}

impl ModelFile {
    pub fn new(store: FactStore, params: ModelParams, seed: u64) -> Result<Self> {
        params.check_store(&store)?;
        Ok(ModelFile {
            store,
            params,
            seed,
        })
    }

    /// The serialized text.
    pub fn to_text(&self) -> Result<String> {
        let store = &self.store;
        let params = &self.params;
        let shape = params.shape();
        let mut s = String::new();
        let header: [(&str, String); 10] = [
            (MAGIC, FORMAT_VERSION.to_string()),
            ("kind", shape.kind.to_string()),
            ("latent_dim", shape.latent_dim.to_string()),
            ("entity_dim", shape.entity_dim.to_string()),
            ("seed", self.seed.to_string()),
            ("relations", store.num_relations().to_string()),
            ("entities", store.num_entities().to_string()),
            ("tuples", store.num_tuples().to_string()),
            ("facts", store.num_facts().to_string()),
            ("weights", params.weights().len().to_string()),
        ];
        for (k, v) in header {
            writeln!(s, "{k}\t{v}").unwrap();
        }

        s.push_str("[relations]\n");
        for r in store.relation_ids() {
            let name = store.relation_name(r);
            check_name("relation", name)?;
            writeln!(s, "{}\t{}", store.relation_source(r).as_str(), name).unwrap();
        }
        s.push_str("[entities]\n");
        for name in store.entities().names() {
            check_name("entity", name)?;
            writeln!(s, "{name}").unwrap();
        }
        s.push_str("[tuples]\n");
        for &(e1, e2) in store.tuple_table() {
            writeln!(s, "{e1}\t{e2}").unwrap();
        }
        s.push_str("[facts]\n");
        for f in store.facts() {
            writeln!(s, "{}\t{}", f.relation, f.tuple).unwrap();
        }

        if shape.kind.latent {
            s.push_str("[a]\n");
            for r in store.relation_ids() {
                write_row(&mut s, params.relation_vec(r));
            }
            s.push_str("[v]\n");
            for t in store.tuple_ids() {
                write_row(&mut s, params.tuple_vec(t));
            }
        }
        if shape.kind.neighborhood {
            s.push_str("[w]\n");
            for (r, other, w) in params.weights().iter() {
                writeln!(s, "{r}\t{other}\t{w:e}").unwrap();
            }
        }
        if shape.kind.entity {
            s.push_str("[t_e]\n");
            for e in 0..store.num_entities() {
                write_row(&mut s, params.entity_vec(EntityId::from_index(e)));
            }
            s.push_str("[d]\n");
            for r in store.relation_ids() {
                for slot in 0..2 {
                    write!(s, "{r}\t{slot}\t").unwrap();
                    write_row(&mut s, params.slot_vec(r, slot));
                }
            }
        }
        Ok(s)
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(self.to_text()?.as_bytes())?;
        Ok(())
    }

    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_text()?)?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        ModelFile::read(std::io::BufReader::new(file))
    }

    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = Lines {
            inner: reader.lines(),
            line_no: 0,
        };

        let version: u32 = lines.header(MAGIC)?;
        if version != FORMAT_VERSION {
            return Err(Error::ModelFormat(format!("unsupported format version {version}")));
        }
        let kind: ModelKind = lines.header::<String>("kind")?.parse()?;
        let latent_dim: usize = lines.header("latent_dim")?;
        let entity_dim: usize = lines.header("entity_dim")?;
        let seed: u64 = lines.header("seed")?;
        let num_relations: usize = lines.header("relations")?;
        let num_entities: usize = lines.header("entities")?;
        let num_tuples: usize = lines.header("tuples")?;
        let num_facts: usize = lines.header("facts")?;
        let num_weights: usize = lines.header("weights")?;

        let mut b = FactStoreBuilder::new(SourceRule::all_patterns());
        lines.section("relations")?;
        for _ in 0..num_relations {
            let line = lines.next_line()?;
            let (source, name) = line
                .split_once('\t')
                .ok_or_else(|| lines.error("expected source<TAB>name"))?;
            let source = RelationSource::parse(source)
                .ok_or_else(|| lines.error(&format!("unknown relation source {source:?}")))?;
            b.relation_with_source(name, source);
        }
        lines.section("entities")?;
        for _ in 0..num_entities {
            let line = lines.next_line()?;
            b.entity(&line);
        }
        lines.section("tuples")?;
        for _ in 0..num_tuples {
            let [e1, e2] = lines.ids::<2>(&[num_entities, num_entities])?;
            b.tuple(EntityId::from_index(e1), EntityId::from_index(e2));
        }
        lines.section("facts")?;
        for _ in 0..num_facts {
            let [r, t] = lines.ids::<2>(&[num_relations, num_tuples])?;
            b.add(RelationId::from_index(r), TupleId::from_index(t));
        }
        let store = b.build();
        let counts = store.counts();
        if (counts.relations, counts.entities, counts.tuples, counts.facts)
            != (num_relations, num_entities, num_tuples, num_facts)
        {
            return Err(Error::ModelFormat("duplicate vocabulary entries or facts".into()));
        }

        let shape = ParamShape {
            kind,
            latent_dim,
            entity_dim,
            num_relations,
            num_tuples,
            num_entities,
        };
        let mut relation_vecs = Vec::new();
        let mut tuple_vecs = Vec::new();
        if kind.latent {
            lines.section("a")?;
            for _ in 0..num_relations {
                lines.floats_into(latent_dim, &mut relation_vecs)?;
            }
            lines.section("v")?;
            for _ in 0..num_tuples {
                lines.floats_into(latent_dim, &mut tuple_vecs)?;
            }
        }
        let mut weights = Vec::with_capacity(num_weights);
        if kind.neighborhood {
            lines.section("w")?;
            for _ in 0..num_weights {
                let line = lines.next_line()?;
                let mut parts = line.split('\t');
                let mut id = |what: &str| -> Result<RelationId> {
                    let v: usize = parse_field(parts.next(), what).map_err(|m| lines.error(&m))?;
                    if v >= num_relations {
                        return Err(lines.error(&format!("{what} {v} out of range")));
                    }
                    Ok(RelationId::from_index(v))
                };
                let r = id("relation")?;
                let other = id("relation")?;
                let w: f64 = parse_field(parts.next(), "weight").map_err(|m| lines.error(&m))?;
                if parts.next().is_some() {
                    return Err(lines.error("trailing fields"));
                }
                weights.push((r, other, w));
            }
        } else if num_weights != 0 {
            return Err(Error::ModelFormat("weights listed for a model without the neighborhood component".into()));
        }
        let mut entity_vecs = Vec::new();
        let mut slot_vecs = Vec::new();
        if kind.entity {
            lines.section("t_e")?;
            for _ in 0..num_entities {
                lines.floats_into(entity_dim, &mut entity_vecs)?;
            }
            lines.section("d")?;
            for r in 0..num_relations {
                for slot in 0..2 {
                    let line = lines.next_line()?;
                    let mut parts = line.splitn(3, '\t');
                    let got_r: usize = parse_field(parts.next(), "relation").map_err(|m| lines.error(&m))?;
                    let got_slot: usize = parse_field(parts.next(), "slot").map_err(|m| lines.error(&m))?;
                    if (got_r, got_slot) != (r, slot) {
                        return Err(lines.error(&format!("expected slot row {r}\t{slot}")));
                    }
                    parse_floats(parts.next().unwrap_or(""), entity_dim, &mut slot_vecs)
                        .map_err(|m| lines.error(&m))?;
                }
            }
        }
        if let Some(extra) = lines.inner.next() {
            let extra = extra?;
            return Err(Error::ModelFormat(format!("unexpected trailing content: {extra:?}")));
        }

        let mut support = vec![Vec::new(); num_relations];
        for &(r, other, _) in &weights {
            if r == other {
                return Err(Error::ModelFormat(format!("self weight for relation {r}")));
            }
            support[r.index()].push(other);
        }
        let mut params = ModelParams::zeros(shape, support)?;
        {
            let w: &mut NeighborWeights = params.weights_mut();
            if w.len() != weights.len() {
                return Err(Error::ModelFormat("duplicate weight keys".into()));
            }
            for (r, other, value) in weights {
                w.set(r, other, value)?;
            }
        }
        params.relation_vecs = relation_vecs;
        params.tuple_vecs = tuple_vecs;
        params.entity_vecs = entity_vecs;
        params.slot_vecs = slot_vecs;
        ModelFile::new(store, params, seed)
    }
}

fn parse_field<T: FromStr>(field: Option<&str>, what: &str) -> std::result::Result<T, String> {
    let field = field.ok_or_else(|| format!("missing {what}"))?;
    field
        .parse()
        .map_err(|_| format!("invalid {what} {field:?}"))
}

fn parse_floats(line: &str, dim: usize, out: &mut Vec<f64>) -> std::result::Result<(), String> {
    let before = out.len();
    for field in line.split('\t') {
        out.push(parse_field(Some(field), "number")?);
    }
    if out.len() - before != dim {
        return Err(format!("expected {dim} values, found {}", out.len() - before));
    }
    Ok(())
}

struct Lines<I> {
    inner: I,
    line_no: usize,
}

impl<I: Iterator<Item = std::io::Result<String>>> Lines<I> {
    fn error(&self, message: &str) -> Error {
        Error::Parse {
            line: self.line_no,
            message: message.to_owned(),
        }
    }

    fn next_line(&mut self) -> Result<String> {
        self.line_no += 1;
        match self.inner.next() {
            Some(line) => Ok(line?),
            None => Err(self.error("unexpected end of model file")),
        }
    }

    fn header<T: FromStr>(&mut self, key: &str) -> Result<T> {
        let line = self.next_line()?;
        let value = line
            .strip_prefix(key)
            .and_then(|rest| rest.strip_prefix('\t'))
            .ok_or_else(|| self.error(&format!("expected header {key:?}")))?;
        value
            .parse()
            .map_err(|_| self.error(&format!("invalid value for {key:?}: {value:?}")))
    }

    fn section(&mut self, name: &str) -> Result<()> {
        let line = self.next_line()?;
        if line != format!("[{name}]") {
            return Err(self.error(&format!("expected section [{name}], found {line:?}")));
        }
        Ok(())
    }

    fn ids<const N: usize>(&mut self, bounds: &[usize; N]) -> Result<[usize; N]> {
        let line = self.next_line()?;
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != N {
            return Err(self.error(&format!("expected {N} ids")));
        }
        let mut out = [0; N];
        for i in 0..N {
            let v: usize = fields[i]
                .parse()
                .map_err(|_| self.error(&format!("invalid id {:?}", fields[i])))?;
            if v >= bounds[i] {
                return Err(self.error(&format!("id {v} out of range")));
            }
            out[i] = v;
        }
        Ok(out)
    }

    fn floats_into(&mut self, dim: usize, out: &mut Vec<f64>) -> Result<()> {
        let line = self.next_line()?;
        parse_floats(&line, dim, out).map_err(|m| self.error(&m))
    }
}
