use std::collections::{HashMap, HashSet};
use std::io::BufRead;

use super::FormatError;

/// Word vectors of a fixed dimension with a designated UNK row.
///
/// Row 0 is always the UNK vector and is not reachable by any word form.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    words: Vec<String>,
    index: HashMap<String, usize>,
    data: Vec<f64>,
}

impl EmbeddingTable {
    /// An empty table whose UNK vector is all zeros.
    pub fn new(dim: usize) -> Self {
        assert!(dim >= 1, "embedding dimension must be at least 1");
        EmbeddingTable {
            dim,
            words: vec![String::new()],
            index: HashMap::new(),
            data: vec![0.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of rows, including UNK.
    pub fn rows(&self) -> usize {
        self.words.len()
    }

    /// Number of word entries, excluding UNK.
    pub fn len(&self) -> usize {
        self.words.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub const UNK_ROW: usize = 0;

    /// Adds `word` unless it is already present. Returns whether it was added.
    pub fn insert(&mut self, word: &str, vector: &[f64]) -> bool {
        assert_eq!(vector.len(), self.dim, "vector dimension mismatch");
        if self.index.contains_key(word) {
            return false;
        }
        self.index.insert(word.to_owned(), self.words.len());
        self.words.push(word.to_owned());
        self.data.extend_from_slice(vector);
        true
    }

    pub fn set_unk(&mut self, vector: &[f64]) {
        self.row_mut(Self::UNK_ROW).copy_from_slice(vector);
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    /// Row for `word`: exact match, then lowercased match, then UNK.
    pub fn row_of(&self, word: &str) -> usize {
        if let Some(&i) = self.index.get(word) {
            return i;
        }
        if word.chars().any(char::is_uppercase) {
            if let Some(&i) = self.index.get(&word.to_lowercase()) {
                return i;
            }
        }
        Self::UNK_ROW
    }

    /// Total lookup: every form maps to a `dim`-length vector.
    pub fn lookup(&self, word: &str) -> &[f64] {
        self.row(self.row_of(word))
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.dim..(row + 1) * self.dim]
    }

    pub fn row_mut(&mut self, row: usize) -> &mut [f64] {
        &mut self.data[row * self.dim..(row + 1) * self.dim]
    }

    /// Word stored at `row`; empty for UNK.
    pub fn word(&self, row: usize) -> &str {
        &self.words[row]
    }

    /// Raw row-major storage, UNK first.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Replaces rows of `self` by the rows of `other` for every word `other`
    /// knows, and adds the words only `other` has. UNK is taken from `other`.
    pub fn overlay(&mut self, other: &EmbeddingTable) {
        assert_eq!(self.dim, other.dim, "cannot overlay tables of different dimension");
        self.set_unk(other.row(Self::UNK_ROW));
        for row in 1..other.rows() {
            let word = other.word(row);
            match self.index.get(word) {
                Some(&i) => self.row_mut(i).copy_from_slice(other.row(row)),
                None => {
                    self.insert(word, other.row(row));
                }
            }
        }
    }
}

/// Reads a whitespace-separated text embedding file.
pub fn read_embeddings<R: BufRead>(reader: R) -> Result<EmbeddingTable, FormatError> {
    read_embeddings_filtered(reader, None)
}

/// Reads a whitespace-separated text embedding file, keeping only the words
/// in `vocab` when given.
///
/// An optional `<count> <dim>` header line fixes the dimension; otherwise it
/// is inferred from the first row. Rows carrying more fields than `dim + 1`
/// have their leading fields joined into a multi-token word form. The first
/// occurrence of a duplicated word wins.
pub fn read_embeddings_filtered<R: BufRead>(
    reader: R,
    vocab: Option<&HashSet<String>>,
) -> Result<EmbeddingTable, FormatError> {
    let mut table: Option<EmbeddingTable> = None;
    let mut values = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if table.is_none() && lineno == 1 && fields.len() == 2 {
            if let (Ok(_), Ok(dim)) = (fields[0].parse::<usize>(), fields[1].parse::<usize>()) {
                if dim == 0 {
                    return Err(FormatError::syntax(lineno, "header declares dimension 0"));
                }
                table = Some(EmbeddingTable::new(dim));
                continue;
            }
        }
        if fields.len() < 2 {
            return Err(FormatError::syntax(lineno, "row without vector values"));
        }
        let dim = match &table {
            Some(t) => t.dim(),
            None => fields.len() - 1,
        };
        if fields.len() < dim + 1 {
            return Err(FormatError::syntax(
                lineno,
                format!("expected {} values, found {}", dim, fields.len() - 1),
            ));
        }
        let split = fields.len() - dim;
        let word = if split == 1 {
            fields[0].to_owned()
        } else {
            fields[..split].join(" ")
        };
        let table = table.get_or_insert_with(|| EmbeddingTable::new(dim));
        if vocab.is_some_and(|v| !v.contains(&word)) || table.contains(&word) {
            continue;
        }
        values.clear();
        for field in &fields[split..] {
            let v: f64 = field
                .parse()
                .map_err(|_| FormatError::syntax(lineno, format!("unparsable value {:?}", field)))?;
            values.push(v);
        }
        table.insert(&word, &values);
    }
    table.ok_or_else(|| FormatError::syntax(0, "embedding file contains no vectors"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_headerless_rows() {
        let t = read_embeddings("a 1 2 3\nb 4 5 6\n".as_bytes()).unwrap();
        assert_eq!(t.dim(), 3);
        assert_eq!(t.len(), 2);
        assert_eq!(t.lookup("b"), &[4.0, 5.0, 6.0]);
    }

    #[test]
    fn header_enforces_dimension() {
        assert!(read_embeddings("2 3\na 1 2 3\nb 4 5\n".as_bytes()).is_err());
        let t = read_embeddings("2 3\na 1 2 3\n".as_bytes()).unwrap();
        assert_eq!(t.dim(), 3);
    }

    #[test]
    fn inconsistent_dimension_is_an_error() {
        assert!(matches!(
            read_embeddings("a 1 2 3\nb 4 5\n".as_bytes()),
            Err(FormatError::Syntax { line: 2, .. })
        ));
    }

    #[test]
    fn bad_float_is_an_error() {
        assert!(matches!(
            read_embeddings("a 1 2\nb 4 x\n".as_bytes()),
            Err(FormatError::Syntax { line: 2, .. })
        ));
    }

    #[test]
    fn first_duplicate_wins() {
        let t = read_embeddings("a 1 2\na 3 4\n".as_bytes()).unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.lookup("a"), &[1.0, 2.0]);
    }

    #[test]
    fn multi_token_word_forms() {
        let t = read_embeddings("x 0 0\n. . . 1 2\n".as_bytes()).unwrap();
        assert_eq!(t.lookup(". . ."), &[1.0, 2.0]);
    }

    #[test]
    fn unk_and_lowercase_fallback() {
        let mut t = read_embeddings("the 1 1\n".as_bytes()).unwrap();
        assert_eq!(t.lookup("The"), &[1.0, 1.0]);
        assert_eq!(t.lookup("zebra"), &[0.0, 0.0]);
        t.set_unk(&[9.0, 9.0]);
        assert_eq!(t.lookup("zebra"), &[9.0, 9.0]);
    }

    #[test]
    fn vocabulary_filter() {
        let vocab: HashSet<String> = ["b".to_owned()].into_iter().collect();
        let t = read_embeddings_filtered("a 1\nb 2\nc 3\n".as_bytes(), Some(&vocab)).unwrap();
        assert_eq!(t.len(), 1);
        assert!(t.contains("b"));
    }

    #[test]
    fn overlay_replaces_and_extends() {
        let mut base = read_embeddings("a 1\nb 2\n".as_bytes()).unwrap();
        let top = read_embeddings("b 5\nc 6\n".as_bytes()).unwrap();
        base.overlay(&top);
        assert_eq!(base.lookup("a"), &[1.0]);
        assert_eq!(base.lookup("b"), &[5.0]);
        assert_eq!(base.lookup("c"), &[6.0]);
    }
}
