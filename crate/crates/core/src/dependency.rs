//! Dependency-annotated sentences.

/// A syntactic word.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Token {
    /// 1-based position in the sentence.
    pub index: usize,
    pub form: String,
    pub pos: String,
}

impl Token {
    pub fn new(index: usize, form: impl Into<String>, pos: impl Into<String>) -> Self {
        Token {
            index,
            form: form.into(),
            pos: pos.into(),
        }
    }
}

/// Tokens with one head and relation each. Head `0` is the dummy root.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DependencySentence {
    pub tokens: Vec<Token>,
    pub heads: Vec<usize>,
    pub deprels: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DepDefect {
    #[error("{tokens} tokens but {heads} heads and {deprels} relations")]
    LengthMismatch {
        tokens: usize,
        heads: usize,
        deprels: usize,
    },
    #[error("no token is attached to the root")]
    NoRoot,
    #[error("{0} tokens are attached to the root")]
    MultipleRoots(usize),
    #[error("token {token} has head {head} outside the sentence")]
    HeadOutOfRange { token: usize, head: usize },
    #[error("token {0} lies on a cycle")]
    Cycle(usize),
}

impl DependencySentence {
    /// Builds a sentence from `(form, pos, head, deprel)` rows.
    pub fn from_rows<'a>(rows: impl IntoIterator<Item = (&'a str, &'a str, usize, &'a str)>) -> Self {
        let mut sentence = DependencySentence {
            tokens: Vec::new(),
            heads: Vec::new(),
            deprels: Vec::new(),
        };
        for (i, (form, pos, head, rel)) in rows.into_iter().enumerate() {
            sentence.tokens.push(Token::new(i + 1, form, pos));
            sentence.heads.push(head);
            sentence.deprels.push(rel.to_owned());
        }
        sentence
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn forms(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.form.as_str()).collect()
    }

    pub fn tags(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.pos.as_str()).collect()
    }

    /// Checks that the head assignment forms a single-rooted, acyclic tree.
    pub fn validate(&self) -> Result<(), DepDefect> {
        let n = self.tokens.len();
        if self.heads.len() != n || self.deprels.len() != n {
            return Err(DepDefect::LengthMismatch {
                tokens: n,
                heads: self.heads.len(),
                deprels: self.deprels.len(),
            });
        }
        validate_heads(&self.heads)
    }
}

/// Tree check over a bare head array (`heads[i]` is the head of token `i + 1`).
pub fn validate_heads(heads: &[usize]) -> Result<(), DepDefect> {
    let n = heads.len();
    for (i, &h) in heads.iter().enumerate() {
        if h > n {
            return Err(DepDefect::HeadOutOfRange { token: i + 1, head: h });
        }
    }
    match heads.iter().filter(|&&h| h == 0).count() {
        0 => return Err(DepDefect::NoRoot),
        1 => {}
        k => return Err(DepDefect::MultipleRoots(k)),
    }
    // Every token must reach the root within n steps.
    for start in 1..=n {
        let mut cur = start;
        let mut steps = 0;
        while cur != 0 {
            cur = heads[cur - 1];
            steps += 1;
            if steps > n {
                return Err(DepDefect::Cycle(start));
            }
        }
    }
    Ok(())
}
