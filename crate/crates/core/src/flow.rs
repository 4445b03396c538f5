//! Integer max-flow on a bipartite supply/demand network (Dinic).

use std::collections::VecDeque;

struct Arc {
    to: usize,
    cap: u128,
}

struct Network {
    arcs: Vec<Arc>,
    adj: Vec<Vec<usize>>,
}

impl Network {
    fn new(nodes: usize) -> Self {
        Network { arcs: Vec::new(), adj: vec![Vec::new(); nodes] }
    }

    fn add(&mut self, from: usize, to: usize, cap: u128) {
        self.adj[from].push(self.arcs.len());
        self.arcs.push(Arc { to, cap });
        self.adj[to].push(self.arcs.len());
        self.arcs.push(Arc { to: from, cap: 0 });
    }

    fn levels(&self, s: usize) -> Vec<Option<usize>> {
        let mut level = vec![None; self.adj.len()];
        level[s] = Some(0);
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &a in &self.adj[u] {
                let arc = &self.arcs[a];
                if arc.cap > 0 && level[arc.to].is_none() {
                    level[arc.to] = Some(level[u].unwrap() + 1);
                    queue.push_back(arc.to);
                }
            }
        }
        level
    }

    fn augment(&mut self, u: usize, t: usize, pushed: u128, level: &[Option<usize>], next: &mut [usize]) -> u128 {
        if u == t {
            return pushed;
        }
        while next[u] < self.adj[u].len() {
            let a = self.adj[u][next[u]];
            let (to, cap) = (self.arcs[a].to, self.arcs[a].cap);
            if cap > 0 && level[to] == level[u].map(|l| l + 1) {
                let got = self.augment(to, t, pushed.min(cap), level, next);
                if got > 0 {
                    self.arcs[a].cap -= got;
                    self.arcs[a ^ 1].cap += got;
                    return got;
                }
            }
            next[u] += 1;
        }
        0
    }

    fn max_flow(&mut self, s: usize, t: usize) -> u128 {
        let mut total = 0;
        loop {
            let level = self.levels(s);
            if level[t].is_none() {
                return total;
            }
            let mut next = vec![0; self.adj.len()];
            loop {
                let f = self.augment(s, t, u128::MAX, &level, &mut next);
                if f == 0 {
                    break;
                }
                total += f;
            }
        }
    }
}

/// Whether there is a flow that ships every `supply[i]` out of row `i` and
/// every `demand[j]` into column `j` using only the given `(i, j)` arcs.
/// Returns false when the totals differ.
pub fn bipartite_saturates(supply: &[u128], demand: &[u128], edges: impl IntoIterator<Item = (usize, usize)>) -> bool {
    let total: u128 = supply.iter().sum();
    if total != demand.iter().sum::<u128>() {
        return false;
    }
    let (m, n) = (supply.len(), demand.len());
    let source = m + n;
    let sink = source + 1;
    let mut net = Network::new(m + n + 2);
    for (i, &s) in supply.iter().enumerate() {
        net.add(source, i, s);
    }
    for (j, &d) in demand.iter().enumerate() {
        net.add(m + j, sink, d);
    }
    for (i, j) in edges {
        net.add(i, m + j, total);
    }
    net.max_flow(source, sink) == total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_graph_always_saturates() {
        let edges: Vec<_> = (0..3).flat_map(|i| (0..2).map(move |j| (i, j))).collect();
        assert!(bipartite_saturates(&[2, 2, 2], &[3, 3], edges));
    }

    #[test]
    fn hall_violation_is_detected() {
        // Column 1 is reachable only from row 0, which supplies 1 < 2.
        assert!(!bipartite_saturates(&[1, 3], &[2, 2], [(0, 0), (0, 1), (1, 0)]));
        assert!(bipartite_saturates(&[2, 2], &[2, 2], [(0, 1), (1, 0)]));
    }

    #[test]
    fn mismatched_totals() {
        assert!(!bipartite_saturates(&[1], &[2], [(0, 0)]));
    }
}
