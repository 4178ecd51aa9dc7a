//! Plain digraph helpers over adjacency lists.

/// Strongly connected components (Tarjan, iterative). Components are
/// returned with sorted members, ordered by their smallest member.
pub(crate) fn tarjan(adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = adj.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut next = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut work = vec![(root, 0usize)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut pos)) = work.last_mut() {
            if *pos < adj[v].len() {
                let w = adj[v][*pos];
                *pos += 1;
                if index[w] == usize::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    work.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                work.pop();
                if let Some(&(u, _)) = work.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().unwrap();
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    comps.push(comp);
                }
            }
        }
    }
    comps.sort_by_key(|c| c[0]);
    comps
}

/// Component index of every vertex.
pub(crate) fn component_map(n: usize, comps: &[Vec<usize>]) -> Vec<usize> {
    let mut of = vec![0; n];
    for (i, c) in comps.iter().enumerate() {
        for &v in c {
            of[v] = i;
        }
    }
    of
}

/// Does the component contain a cycle (more than one vertex, or a loop)?
pub(crate) fn is_cyclic(adj: &[Vec<usize>], comp: &[usize]) -> bool {
    comp.len() > 1 || adj[comp[0]].contains(&comp[0])
}

/// Vertices reachable from `sources` by paths of length ≥ 0.
pub(crate) fn reachable(adj: &[Vec<usize>], sources: impl IntoIterator<Item = usize>) -> Vec<bool> {
    let mut seen = vec![false; adj.len()];
    let mut stack: Vec<usize> = sources.into_iter().collect();
    for &s in &stack {
        seen[s] = true;
    }
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_cycles_and_a_bridge() {
        let adj = vec![vec![1], vec![0, 2], vec![3], vec![2], vec![]];
        let c = tarjan(&adj);
        assert_eq!(c, vec![vec![0, 1], vec![2, 3], vec![4]]);
        assert!(is_cyclic(&adj, &c[0]));
        assert!(!is_cyclic(&adj, &c[2]));
        let r = reachable(&adj, [2]);
        assert_eq!(r, vec![false, false, true, true, false]);
    }
}
