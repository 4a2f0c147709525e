//! Precedence-graph machinery: topological order, transitive closure and
//! longest paths.

use super::InstanceError;

/// Row-major bit matrix; row i holds the transitive successor set of i.
#[derive(Debug, Clone)]
pub(crate) struct BitMatrix {
    stride: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub(crate) fn new(n: usize) -> Self {
        let stride = n.div_ceil(64);
        BitMatrix {
            stride,
            bits: vec![0; stride * n],
        }
    }

    pub(crate) fn set(&mut self, i: usize, j: usize) {
        self.bits[i * self.stride + j / 64] |= 1 << (j % 64);
    }

    pub(crate) fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.stride + j / 64] & (1 << (j % 64)) != 0
    }

    /// row[dst] |= row[src]
    fn or_row(&mut self, dst: usize, src: usize) {
        let (d, s) = (dst * self.stride, src * self.stride);
        for k in 0..self.stride {
            let v = self.bits[s + k];
            self.bits[d + k] |= v;
        }
    }

    pub(crate) fn row_words(&self, i: usize) -> &[u64] {
        &self.bits[i * self.stride..(i + 1) * self.stride]
    }

    /// Bits of `words` missing from row i.
    pub(crate) fn count_new(&self, i: usize, words: &[u64]) -> u64 {
        self.row_words(i)
            .iter()
            .zip(words)
            .map(|(have, want)| (want & !have).count_ones() as u64)
            .sum()
    }

    /// row[i] |= words
    pub(crate) fn or_words(&mut self, i: usize, words: &[u64]) {
        let base = i * self.stride;
        for (k, w) in words.iter().enumerate() {
            self.bits[base + k] |= w;
        }
    }

    fn count_ones(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }

    fn row_ones(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        let row = &self.bits[i * self.stride..(i + 1) * self.stride];
        row.iter().enumerate().flat_map(|(w, &word)| {
            let mut word = word;
            std::iter::from_fn(move || {
                if word == 0 {
                    None
                } else {
                    let b = word.trailing_zeros() as usize;
                    word &= word - 1;
                    Some(w * 64 + b)
                }
            })
        })
    }
}

/// Immutable precedence structure of an instance.
#[derive(Debug, Clone)]
pub struct Topology {
    predecessors: Vec<Vec<usize>>,
    successors: Vec<Vec<usize>>,
    topo_order: Vec<usize>,
    closure: BitMatrix,
}

impl Topology {
    /// Builds successor lists, a topological order (Kahn) and the transitive
    /// closure. Fails on cycles.
    pub fn new(predecessors: &[Vec<usize>]) -> Result<Self, InstanceError> {
        let n = predecessors.len();
        let mut successors = vec![Vec::new(); n];
        let mut indegree = vec![0usize; n];
        for (i, preds) in predecessors.iter().enumerate() {
            for &p in preds {
                successors[p].push(i);
                indegree[i] += 1;
            }
        }
        for succ in &mut successors {
            succ.sort_unstable();
            succ.dedup();
        }
        let mut queue: Vec<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut topo_order = Vec::with_capacity(n);
        let mut head = 0;
        while head < queue.len() {
            let i = queue[head];
            head += 1;
            topo_order.push(i);
            for &j in &successors[i] {
                indegree[j] -= 1;
                if indegree[j] == 0 {
                    queue.push(j);
                }
            }
        }
        if topo_order.len() != n {
            let culprit = (0..n).find(|&i| indegree[i] > 0).unwrap_or(0);
            return Err(InstanceError::Cycle(culprit));
        }
        let mut closure = BitMatrix::new(n);
        for &i in topo_order.iter().rev() {
            // Successor rows are complete once we reach i.
            let succs = successors[i].clone();
            for j in succs {
                closure.set(i, j);
                closure.or_row(i, j);
            }
        }
        Ok(Self {
            predecessors: predecessors.to_vec(),
            successors,
            topo_order,
            closure,
        })
    }

    pub fn len(&self) -> usize {
        self.predecessors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.predecessors.is_empty()
    }

    pub fn predecessors(&self, i: usize) -> &[usize] {
        &self.predecessors[i]
    }

    pub fn successors(&self, i: usize) -> &[usize] {
        &self.successors[i]
    }

    pub fn topo_order(&self) -> &[usize] {
        &self.topo_order
    }

    /// True when j is a transitive successor of i.
    pub fn reaches(&self, i: usize, j: usize) -> bool {
        self.closure.get(i, j)
    }

    pub fn transitive_successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.closure.row_ones(i)
    }

    pub fn transitive_arc_count(&self) -> u64 {
        self.closure.count_ones()
    }

    /// Longest node-weighted path over the DAG.
    pub fn longest_path(&self, durations: &[u64]) -> u64 {
        let mut finish = vec![0u64; self.len()];
        for &i in &self.topo_order {
            let start = self.predecessors[i]
                .iter()
                .map(|&p| finish[p])
                .max()
                .unwrap_or(0);
            finish[i] = start + durations[i];
        }
        finish.into_iter().max().unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closure_of_diamond() {
        let preds = vec![vec![], vec![0], vec![0], vec![1, 2]];
        let topo = Topology::new(&preds).unwrap();
        assert_eq!(topo.transitive_arc_count(), 5);
        assert!(topo.reaches(0, 3));
        assert!(!topo.reaches(1, 2));
        let succ0: Vec<usize> = topo.transitive_successors(0).collect();
        assert_eq!(succ0, vec![1, 2, 3]);
    }

    #[test]
    fn cycle_detected() {
        let preds = vec![vec![2], vec![0], vec![1]];
        assert!(matches!(
            Topology::new(&preds),
            Err(InstanceError::Cycle(_))
        ));
    }

    /// Closure agrees with a naive reachability oracle on a random-ish DAG.
    #[test]
    #[allow(clippy::needless_range_loop)] // index form mirrors the matrix oracle
    fn closure_matches_floyd_warshall_oracle() {
        let n = 12;
        // Arcs i -> j for j = i + step patterns; acyclic by construction.
        let mut preds = vec![Vec::new(); n];
        for i in 0..n {
            for j in (i + 1)..n {
                if (i * 7 + j * 13) % 5 == 0 {
                    preds[j].push(i);
                }
            }
        }
        let topo = Topology::new(&preds).unwrap();
        let mut reach = vec![vec![false; n]; n];
        for (j, ps) in preds.iter().enumerate() {
            for &i in ps {
                reach[i][j] = true;
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if reach[i][k] && reach[k][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
        let oracle_count: u64 = reach
            .iter()
            .map(|row| row.iter().filter(|&&b| b).count() as u64)
            .sum();
        assert_eq!(topo.transitive_arc_count(), oracle_count);
        for i in 0..n {
            for j in 0..n {
                assert_eq!(topo.reaches(i, j), reach[i][j], "pair {i}->{j}");
            }
        }
    }
}
