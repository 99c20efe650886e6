//! Node indices, 4-node combinations and their orderings.
//!
//! A [`Combination`] is an unordered set of four distinct nodes, stored
//! sorted. A [`Tetrad`] is one ordering of such a set. Every estimator sum in
//! this crate runs over `combinations4(n)` and, inside each combination, over
//! the 24 tetrads returned by [`permutations`], always in the same order.

use std::fmt;

use crate::error::{Error, Result};

/// A 0-based node index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub usize);

impl NodeId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An unordered set of four distinct nodes, kept in ascending order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Combination([usize; 4]);

impl Combination {
    /// Builds a combination from four distinct indices in any order.
    pub fn new(mut nodes: [usize; 4]) -> Result<Self> {
        nodes.sort_unstable();
        if nodes.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput(format!(
                "combination {nodes:?} has repeated nodes"
            )));
        }
        Ok(Self(nodes))
    }

    pub fn nodes(&self) -> [usize; 4] {
        self.0
    }

    pub fn contains(&self, node: usize) -> bool {
        self.0.binary_search(&node).is_ok()
    }
}

/// An ordered 4-tuple of distinct nodes `(π1, π2, π3, π4)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tetrad(pub [usize; 4]);

impl Tetrad {
    pub fn new(nodes: [usize; 4]) -> Result<Self> {
        let mut sorted = nodes;
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput(format!(
                "tetrad {nodes:?} has repeated nodes"
            )));
        }
        Ok(Self(nodes))
    }

    /// The four directed dyads entering the differenced value, with their
    /// signs: `+(π1,π2) −(π1,π3) −(π4,π2) +(π4,π3)`.
    pub fn signed_dyads(&self) -> [((usize, usize), f64); 4] {
        let [a, b, c, d] = self.0;
        [((a, b), 1.0), ((a, c), -1.0), ((d, b), -1.0), ((d, c), 1.0)]
    }
}

/// Position patterns of the 24 orderings of four slots, lexicographic.
pub const PERMUTATIONS_4: [[usize; 4]; 24] = [
    [0, 1, 2, 3],
    [0, 1, 3, 2],
    [0, 2, 1, 3],
    [0, 2, 3, 1],
    [0, 3, 1, 2],
    [0, 3, 2, 1],
    [1, 0, 2, 3],
    [1, 0, 3, 2],
    [1, 2, 0, 3],
    [1, 2, 3, 0],
    [1, 3, 0, 2],
    [1, 3, 2, 0],
    [2, 0, 1, 3],
    [2, 0, 3, 1],
    [2, 1, 0, 3],
    [2, 1, 3, 0],
    [2, 3, 0, 1],
    [2, 3, 1, 0],
    [3, 0, 1, 2],
    [3, 0, 2, 1],
    [3, 1, 0, 2],
    [3, 1, 2, 0],
    [3, 2, 0, 1],
    [3, 2, 1, 0],
];

/// Lexicographic stream of all sorted 4-subsets of `0..n`.
///
/// The iterator is `Clone`, so a pass can be replayed from any point.
#[derive(Debug, Clone)]
pub struct Combinations4 {
    n: usize,
    next: Option<[usize; 4]>,
}

impl Iterator for Combinations4 {
    type Item = Combination;

    fn next(&mut self) -> Option<Combination> {
        let current = self.next?;
        let n = self.n;
        let mut following = current;
        // advance the rightmost slot that still has room
        let mut slot = 4;
        while slot > 0 {
            slot -= 1;
            if following[slot] < n - 4 + slot {
                following[slot] += 1;
                for s in slot + 1..4 {
                    following[s] = following[s - 1] + 1;
                }
                self.next = Some(following);
                return Some(Combination(current));
            }
        }
        self.next = None;
        Some(Combination(current))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        // exact only at the start; good enough for collect()
        match self.next {
            None => (0, Some(0)),
            Some(_) => (1, None),
        }
    }
}

/// All `C(n, 4)` four-node combinations in lexicographic order.
pub fn combinations4(n_nodes: usize) -> Result<Combinations4> {
    if n_nodes < 4 {
        return Err(Error::DegenerateSize { n: n_nodes });
    }
    Ok(Combinations4 {
        n: n_nodes,
        next: Some([0, 1, 2, 3]),
    })
}

/// The 24 orderings of a combination, lexicographic in the sorted members.
pub fn permutations(c: Combination) -> impl Iterator<Item = Tetrad> + Clone {
    let nodes = c.0;
    PERMUTATIONS_4
        .iter()
        .map(move |p| Tetrad([nodes[p[0]], nodes[p[1]], nodes[p[2]], nodes[p[3]]]))
}

/// Number of nodes shared by two combinations.
pub fn common_count(a: Combination, b: Combination) -> usize {
    a.0.iter().filter(|&&v| b.contains(v)).count()
}

/// Binomial coefficient; zero when `k > n`.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for t in 0..k {
        acc = acc * (n - t) as u128 / (t + 1) as u128;
    }
    acc as u64
}

/// How many combinations share exactly `q` nodes with a fixed combination:
/// `C(4, q) · C(n − 4, 4 − q)`.
pub fn pairs_with_q_common(n_nodes: usize, q: usize) -> u64 {
    if n_nodes < 4 || q > 4 {
        return 0;
    }
    binomial(4, q) * binomial(n_nodes - 4, 4 - q)
}

/// Falling factorial `n (n−1) (n−2) (n−3)`: the number of ordered tetrads.
pub fn ordered_tetrads(n_nodes: usize) -> u64 {
    if n_nodes < 4 {
        return 0;
    }
    let n = n_nodes as u64;
    n * (n - 1) * (n - 2) * (n - 3)
}
