use super::AlignmentConfig;

/// One edge of the chunking lattice: from state `(i, j)` consume
/// `source_len` source phones and `target_len` target phones.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LatticeEdge {
    pub i: usize,
    pub j: usize,
    pub source_len: usize,
    pub target_len: usize,
}

impl LatticeEdge {
    pub fn from_state(&self, cols: usize) -> usize {
        self.i * cols + self.j
    }

    pub fn to_state(&self, cols: usize) -> usize {
        (self.i + self.source_len) * cols + self.j + self.target_len
    }
}

/// Edges of the lattice for lengths `n` x `m` that lie on at least one
/// complete path, in increasing order of their origin state. The lattice
/// depends only on the lengths, never on the phones.
///
/// Returns an empty vector when `(n, m)` is unreachable.
pub fn lattice_edges(n: usize, m: usize, config: &AlignmentConfig) -> Vec<LatticeEdge> {
    let cols = m + 1;
    let states = (n + 1) * cols;
    let mut all = Vec::new();
    for i in 0..=n {
        for j in 0..=m {
            for a in 0..=config.max_source_chunk.min(n - i) {
                for b in 0..=config.max_target_chunk.min(m - j) {
                    let allowed = match (a, b) {
                        (0, 0) => false,
                        (_, 0) => config.allow_source_deletion,
                        (0, _) => config.allow_target_deletion,
                        (a, b) if a > 1 && b > 1 => config.allow_many_to_many,
                        _ => true,
                    };
                    if allowed {
                        all.push(LatticeEdge {
                            i,
                            j,
                            source_len: a,
                            target_len: b,
                        });
                    }
                }
            }
        }
    }

    let mut forward = vec![false; states];
    forward[0] = true;
    for e in &all {
        if forward[e.from_state(cols)] {
            forward[e.to_state(cols)] = true;
        }
    }
    let mut backward = vec![false; states];
    backward[states - 1] = true;
    for e in all.iter().rev() {
        if backward[e.to_state(cols)] {
            backward[e.from_state(cols)] = true;
        }
    }
    if !forward[states - 1] {
        return Vec::new();
    }
    all.retain(|e| forward[e.from_state(cols)] && backward[e.to_state(cols)]);
    all
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(s: usize, t: usize, sdel: bool, tdel: bool) -> AlignmentConfig {
        AlignmentConfig {
            max_source_chunk: s,
            max_target_chunk: t,
            allow_source_deletion: sdel,
            allow_target_deletion: tdel,
            ..Default::default()
        }
    }

    #[test]
    fn one_to_one_lattice_is_diagonal() {
        let edges = lattice_edges(3, 3, &cfg(1, 1, false, false));
        assert_eq!(edges.len(), 3);
        assert!(edges.iter().all(|e| e.i == e.j));
    }

    #[test]
    fn dead_deletions_are_trimmed() {
        let edges = lattice_edges(1, 1, &cfg(1, 1, true, false));
        assert_eq!(edges.len(), 1);
        assert_eq!((edges[0].source_len, edges[0].target_len), (1, 1));
    }

    #[test]
    fn unreachable_is_empty() {
        assert!(lattice_edges(1, 3, &cfg(2, 2, true, false)).is_empty());
        assert!(!lattice_edges(1, 2, &cfg(2, 2, true, false)).is_empty());
        assert!(!lattice_edges(1, 3, &cfg(2, 2, true, true)).is_empty());
    }

    #[test]
    fn edges_are_topologically_ordered() {
        let edges = lattice_edges(4, 3, &cfg(2, 2, true, true));
        for w in edges.windows(2) {
            assert!(w[0].from_state(4) <= w[1].from_state(4));
        }
        for e in &edges {
            assert!(e.to_state(4) > e.from_state(4));
        }
    }
}
