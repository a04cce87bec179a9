/// Finds every directed cycle in a head function.
///
/// `heads[i]` is the head of token `i + 1`; `0` is the root and values past
/// the sentence end are treated as dead ends. Each cycle is returned as its
/// sorted token indices; cycles are ordered by their smallest token.
pub fn detect_cycles(heads: &[usize]) -> Vec<Vec<usize>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Fresh,
        OnStack,
        Done,
    }

    let n = heads.len();
    let mut mark = vec![Mark::Fresh; n + 1];
    let mut cycles = Vec::new();
    let mut stack = Vec::new();

    for start in 1..=n {
        if mark[start] != Mark::Fresh {
            continue;
        }
        let mut cur = start;
        loop {
            if cur == 0 || cur > n || mark[cur] == Mark::Done {
                break;
            }
            if mark[cur] == Mark::OnStack {
                let from = stack.iter().position(|&t| t == cur).unwrap();
                let mut cycle = stack[from..].to_vec();
                cycle.sort_unstable();
                cycles.push(cycle);
                break;
            }
            mark[cur] = Mark::OnStack;
            stack.push(cur);
            cur = heads[cur - 1];
        }
        for t in stack.drain(..) {
            mark[t] = Mark::Done;
        }
    }
    cycles.sort_unstable_by_key(|c| c[0]);
    cycles
}
