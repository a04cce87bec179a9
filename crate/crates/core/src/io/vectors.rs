use super::{blocks, FormatError};

/// Precomputed per-token vectors, one block per sentence.
#[derive(Clone, Debug, PartialEq)]
pub struct TokenVectorFile {
    dim: usize,
    sentences: Vec<Vec<Vec<f64>>>,
}

impl TokenVectorFile {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    pub fn sentence(&self, i: usize) -> Option<&[Vec<f64>]> {
        self.sentences.get(i).map(Vec::as_slice)
    }

    /// Checks that sentence `i` has `token_counts[i]` vectors for every `i`.
    pub fn check_alignment(&self, token_counts: &[usize]) -> Result<(), FormatError> {
        if token_counts.len() != self.sentences.len() {
            return Err(FormatError::alignment(
                self.sentences.len().min(token_counts.len()),
                format!(
                    "vector file has {} sentences, corpus has {}",
                    self.sentences.len(),
                    token_counts.len()
                ),
            ));
        }
        for (i, (vectors, &count)) in self.sentences.iter().zip(token_counts).enumerate() {
            if vectors.len() != count {
                return Err(FormatError::alignment(
                    i,
                    format!("{} vectors for {} tokens", vectors.len(), count),
                ));
            }
        }
        Ok(())
    }
}

/// Reads blank-line separated blocks of whitespace-separated vector rows.
pub fn read_token_vectors(text: &str) -> Result<TokenVectorFile, FormatError> {
    let mut dim = None;
    let mut sentences = Vec::new();
    for (_, lines) in blocks(text) {
        let mut block = Vec::with_capacity(lines.len());
        for (lineno, line) in lines {
            let row = line
                .split_whitespace()
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|_| FormatError::syntax(lineno, format!("unparsable value {:?}", f)))
                })
                .collect::<Result<Vec<_>, _>>()?;
            match dim {
                None => dim = Some(row.len()),
                Some(d) if d != row.len() => {
                    return Err(FormatError::syntax(
                        lineno,
                        format!("dimension mismatch: expected {}, found {}", d, row.len()),
                    ))
                }
                Some(_) => {}
            }
            block.push(row);
        }
        sentences.push(block);
    }
    Ok(TokenVectorFile {
        dim: dim.unwrap_or(0),
        sentences,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_block() {
        let f = read_token_vectors("1 2\n3 4\n").unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f.dim(), 2);
        assert_eq!(f.sentence(0).unwrap(), &[vec![1.0, 2.0], vec![3.0, 4.0]]);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            read_token_vectors("1 2\n\n3 4 5\n"),
            Err(FormatError::Syntax { line: 3, .. })
        ));
    }

    #[test]
    fn alignment_errors() {
        let f = read_token_vectors("1\n2\n\n3\n").unwrap();
        assert!(f.check_alignment(&[2, 1]).is_ok());
        assert!(matches!(f.check_alignment(&[2]), Err(FormatError::Alignment { .. })));
        assert!(matches!(
            f.check_alignment(&[2, 2]),
            Err(FormatError::Alignment { sentence: 1, .. })
        ));
    }

    #[test]
    fn wide_rows() {
        let row: Vec<String> = (0..1024).map(|i| format!("{}", i as f64 * 0.5)).collect();
        let text = format!("{}\n{}\n", row.join(" "), row.join(" "));
        let f = read_token_vectors(&text).unwrap();
        assert_eq!(f.dim(), 1024);
    }
}
