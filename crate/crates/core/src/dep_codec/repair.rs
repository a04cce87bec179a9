use super::detect_cycles;

/// How often each repair rule fired for one sentence.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DepRepairs {
    /// A root had to be chosen because no token selected the dummy root.
    pub missing_root: usize,
    /// Extra root attachments turned into children of the first root.
    pub extra_roots: usize,
    /// Tokens with an unresolvable head attached to the root.
    pub invalid_heads: usize,
    /// Cycles broken by attaching a token to the root.
    pub cycles_broken: usize,
}

impl DepRepairs {
    pub fn total(&self) -> usize {
        self.missing_root + self.extra_roots + self.invalid_heads + self.cycles_broken
    }
}

impl std::ops::AddAssign for DepRepairs {
    fn add_assign(&mut self, rhs: Self) {
        self.missing_root += rhs.missing_root;
        self.extra_roots += rhs.extra_roots;
        self.invalid_heads += rhs.invalid_heads;
        self.cycles_broken += rhs.cycles_broken;
    }
}

/// Turns any candidate head assignment into a single-rooted, acyclic,
/// single-headed tree.
///
/// `candidates[i]` is the predicted head of token `i + 1` (`Some(0)` for the
/// dummy root, `None` when unresolvable). The rules run in order:
///
/// 1. With no root, the first token whose relation is `root` becomes root,
///    or the first token if there is none. With several roots the first one
///    stays and the others attach to it.
/// 2. Tokens with an invalid head attach to that root.
/// 3. While a cycle remains, its smallest token attaches to the root.
pub fn repair_tree<S: AsRef<str>>(candidates: &[Option<usize>], deprels: &[S]) -> (Vec<usize>, DepRepairs) {
    let n = candidates.len();
    let mut repairs = DepRepairs::default();
    if n == 0 {
        return (Vec::new(), repairs);
    }

    // Anything outside 1..=n other than the dummy root is invalid.
    let mut heads: Vec<Option<usize>> = candidates.iter().map(|h| h.filter(|&h| h <= n)).collect();

    let roots: Vec<usize> = (1..=n).filter(|&t| heads[t - 1] == Some(0)).collect();
    let root = match roots.split_first() {
        None => {
            repairs.missing_root += 1;
            let root = (1..=n)
                .find(|&t| deprels.get(t - 1).is_some_and(|d| d.as_ref() == "root"))
                .unwrap_or(1);
            heads[root - 1] = Some(0);
            root
        }
        Some((&first, rest)) => {
            for &t in rest {
                heads[t - 1] = Some(first);
                repairs.extra_roots += 1;
            }
            first
        }
    };

    let mut heads: Vec<usize> = heads
        .into_iter()
        .map(|h| {
            h.unwrap_or_else(|| {
                repairs.invalid_heads += 1;
                root
            })
        })
        .collect();

    loop {
        let cycles = detect_cycles(&heads);
        let Some(first) = cycles.iter().map(|c| c[0]).min() else {
            break;
        };
        heads[first - 1] = root;
        repairs.cycles_broken += 1;
    }
    (heads, repairs)
}
