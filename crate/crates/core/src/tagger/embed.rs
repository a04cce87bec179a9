use std::collections::BTreeSet;

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::TaggerError;
use crate::io::{EmbeddingTable, TokenVectorFile};

/// Table entry for the dummy beginning-of-sentence position.
pub const BOS: &str = "<BOS>";
/// Table entry for the dummy end-of-sentence position.
pub const EOS: &str = "<EOS>";

/// Half-width of the uniform range used for random vectors: `sqrt(3) / d`.
pub fn random_bound(dim: usize) -> f64 {
    3f64.sqrt() / dim as f64
}

/// Random vectors drawn i.i.d. from `U[-sqrt(3)/d, sqrt(3)/d]` for the UNK
/// row, the boundary rows and every distinct word. Deterministic in `seed`
/// and independent of the order of `words`.
pub fn init_random_embeddings<'a>(words: impl IntoIterator<Item = &'a str>, dim: usize, seed: u64) -> EmbeddingTable {
    let words: BTreeSet<&str> = words.into_iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = Uniform::new_inclusive(-random_bound(dim), random_bound(dim));
    let mut draw = || -> Vec<f64> { (0..dim).map(|_| dist.sample(&mut rng)).collect() };

    let mut table = EmbeddingTable::new(dim);
    table.set_unk(&draw());
    table.insert(BOS, &draw());
    table.insert(EOS, &draw());
    for w in words {
        table.insert(w, &draw());
    }
    table
}

/// Adds random [`BOS`]/[`EOS`] rows to a table that lacks them.
pub fn add_boundary_rows(table: &mut EmbeddingTable, seed: u64) {
    let dim = table.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dist = Uniform::new_inclusive(-random_bound(dim), random_bound(dim));
    for marker in [BOS, EOS] {
        let v: Vec<f64> = (0..dim).map(|_| dist.sample(&mut rng)).collect();
        if !table.contains(marker) {
            table.insert(marker, &v);
        }
    }
}

/// Where word vectors come from.
#[derive(Clone, Copy, Debug)]
pub enum EmbeddingSource<'a> {
    /// Static lookup table (random or precomputed).
    Table(&'a EmbeddingTable),
    /// Precomputed per-token vectors aligned with the corpus.
    Vectors(&'a TokenVectorFile),
}

impl EmbeddingSource<'_> {
    pub fn dim(&self) -> usize {
        match self {
            EmbeddingSource::Table(t) => t.dim(),
            EmbeddingSource::Vectors(v) => v.dim(),
        }
    }
}

/// Where one token's input vector lives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Input {
    Row(usize),
    Vector { sentence: usize, token: usize },
}

/// Inputs for the tokens of sentence `index` (no boundary positions).
pub(crate) fn token_inputs<S: AsRef<str>>(
    source: EmbeddingSource<'_>,
    index: usize,
    forms: &[S],
) -> Result<Vec<Input>, TaggerError> {
    match source {
        EmbeddingSource::Table(table) => Ok(forms.iter().map(|f| Input::Row(table.row_of(f.as_ref()))).collect()),
        EmbeddingSource::Vectors(file) => {
            let vectors = file.sentence(index).ok_or(TaggerError::Alignment {
                sentence: index,
                message: format!("vector file has only {} sentences", file.len()),
            })?;
            if vectors.len() != forms.len() {
                return Err(TaggerError::Alignment {
                    sentence: index,
                    message: format!("{} vectors for {} tokens", vectors.len(), forms.len()),
                });
            }
            Ok((0..forms.len())
                .map(|token| Input::Vector { sentence: index, token })
                .collect())
        }
    }
}

pub(crate) fn resolve<'a>(source: EmbeddingSource<'a>, input: Input) -> &'a [f64] {
    match (source, input) {
        (EmbeddingSource::Table(t), Input::Row(r)) => t.row(r),
        (EmbeddingSource::Vectors(v), Input::Vector { sentence, token }) => &v.sentence(sentence).unwrap()[token],
        _ => unreachable!("input does not belong to this source"),
    }
}

/// Vectors for sentence `index`: the beginning marker, one vector per token
/// (UNK for unknown words) and the end marker. Only word forms are used.
///
/// Token-vector files carry no boundary entries; zero vectors stand in.
pub fn embed_sentence<S: AsRef<str>>(
    source: EmbeddingSource<'_>,
    index: usize,
    forms: &[S],
) -> Result<Vec<Vec<f64>>, TaggerError> {
    let dim = source.dim();
    let boundary = |marker: &str| match source {
        EmbeddingSource::Table(t) if t.contains(marker) => t.lookup(marker).to_vec(),
        _ => vec![0.0; dim],
    };
    let mut out = Vec::with_capacity(forms.len() + 2);
    out.push(boundary(BOS));
    for input in token_inputs(source, index, forms)? {
        out.push(resolve(source, input).to_vec());
    }
    out.push(boundary(EOS));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::read_token_vectors;

    #[test]
    fn bound_for_300_dims() {
        assert!((random_bound(300) - 0.005_773_502_691_896_258).abs() < 1e-15);
    }

    #[test]
    fn random_table_is_deterministic_and_bounded() {
        let a = init_random_embeddings(["b", "a", "c"], 300, 7);
        let b = init_random_embeddings(["c", "a", "b", "a"], 300, 7);
        assert_eq!(a, b);
        assert_eq!(a.len(), 5);
        let bound = random_bound(300);
        assert!(a.as_slice().iter().all(|v| v.abs() <= bound));
        assert_ne!(a, init_random_embeddings(["a", "b", "c"], 300, 8));
    }

    #[test]
    fn sentence_gets_boundaries() {
        let t = init_random_embeddings(["a", "b"], 4, 1);
        let v = embed_sentence(EmbeddingSource::Table(&t), 0, &["a", "zzz", "b"]).unwrap();
        assert_eq!(v.len(), 5);
        assert_eq!(v[0], t.lookup(BOS));
        assert_eq!(v[2], t.row(EmbeddingTable::UNK_ROW));
        assert_eq!(v[4], t.lookup(EOS));
    }

    #[test]
    fn vectors_pass_through() {
        let f = read_token_vectors("0.25 -1.5\n3 4\n\n5 6\n").unwrap();
        let v = embed_sentence(EmbeddingSource::Vectors(&f), 0, &["x", "y"]).unwrap();
        assert_eq!(&v[1..3], f.sentence(0).unwrap());
        assert!(matches!(
            embed_sentence(EmbeddingSource::Vectors(&f), 1, &["x", "y"]),
            Err(TaggerError::Alignment { sentence: 1, .. })
        ));
        assert!(embed_sentence(EmbeddingSource::Vectors(&f), 2, &["x"]).is_err());
    }

    #[test]
    fn boundary_rows_added_once() {
        let mut t = EmbeddingTable::new(2);
        add_boundary_rows(&mut t, 3);
        let before = t.clone();
        add_boundary_rows(&mut t, 4);
        assert_eq!(t, before);
        assert!(t.contains(BOS) && t.contains(EOS));
    }
}
