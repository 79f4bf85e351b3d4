//! Accumulating remainder trees and forests over integer row vectors,
//! square integer matrices, and positive integer moduli.
//!
//! Given V, matrices A_0..A_{b-1} and moduli m_0..m_{b-1}, the tree computes
//! every partial product C_n = V * A_0 ... A_{n-1} mod m_n via product trees
//! of the matrices and moduli followed by a top-down pass. The forest splits
//! the work into 2^kappa subtrees, carrying between subtrees the running
//! vector reduced modulo the product of all remaining moduli, so peak memory
//! is governed by a single subtree.

use rayon::prelude::*;
use rug::ops::RemRounding;
use rug::Integer;

use crate::modarith::ResidueVector;

/// Dense square matrix of arbitrary-precision integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    pub dim: usize,
    entries: Vec<Integer>,
}

impl IntMatrix {
    pub fn zero(dim: usize) -> Self {
        IntMatrix {
            dim,
            entries: vec![Integer::new(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zero(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = Integer::from(1);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Integer>>) -> Self {
        let dim = rows.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            assert_eq!(row.len(), dim);
            entries.extend(row);
        }
        IntMatrix { dim, entries }
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> &Integer {
        &self.entries[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Integer) {
        self.entries[i * self.dim + j] = v;
    }

    /// Schoolbook product self * rhs.
    pub fn mul(&self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.dim, rhs.dim);
        let d = self.dim;
        let entries: Vec<Integer> = (0..d * d)
            .into_par_iter()
            .map(|idx| {
                let (i, j) = (idx / d, idx % d);
                let mut acc = Integer::new();
                for k in 0..d {
                    acc += Integer::from(self.get(i, k) * rhs.get(k, j));
                }
                acc
            })
            .collect();
        IntMatrix { dim: d, entries }
    }

    /// Row vector times matrix: v * self.
    pub fn row_mul(&self, v: &[Integer]) -> Vec<Integer> {
        assert_eq!(v.len(), self.dim);
        let d = self.dim;
        (0..d)
            .map(|j| {
                let mut acc = Integer::new();
                for (i, vi) in v.iter().enumerate() {
                    if *vi != 0 {
                        acc += Integer::from(vi * self.get(i, j));
                    }
                }
                acc
            })
            .collect()
    }

    fn byte_size(&self) -> usize {
        self.entries
            .iter()
            .map(|e| e.significant_bits() as usize / 8 + 1)
            .sum()
    }
}

/// The paper's default subtree parameter, ceil(2 * log2(ell)).
pub fn default_kappa(ell: u32) -> u32 {
    if ell <= 1 {
        return 0;
    }
    let k = (2.0 * (ell as f64).log2()).ceil() as u32;
    k.min(ell)
}

/// Node-size instrumentation gathered while a forest runs.
#[derive(Debug, Clone, Default)]
pub struct ForestStats {
    /// Peak bytes held in the matrix and modulus product trees of any one
    /// subtree, plus the carried vector and modulus at that time.
    pub peak_node_bytes: usize,
    /// Bytes per tree level (root first) for the largest subtree seen.
    pub per_level_bytes: Vec<usize>,
}

/// A remainder forest that can be stepped one subtree at a time, so several
/// forests over the same moduli can be interleaved.
pub struct ForestRun<'a, F: Fn(usize) -> IntMatrix + Sync> {
    leaf: F,
    moduli: &'a [Integer],
    len: usize,
    t: usize,
    subtrees: usize,
    next: usize,
    vector: Vec<Integer>,
    remaining: Integer,
    chunk_mods: Vec<Integer>,
    stats: ForestStats,
}

impl<'a, F: Fn(usize) -> IntMatrix + Sync> ForestRun<'a, F> {
    /// `moduli[k]` is the modulus for index k; the leaf closure supplies A_k.
    /// Lengths are padded internally to the next power of two with identity
    /// matrices and modulus 1, which leaves the output unchanged.
    pub fn new(vector: Vec<Integer>, leaf: F, moduli: &'a [Integer], kappa: u32) -> Self {
        let len = moduli.len().max(1);
        let b = len.next_power_of_two();
        let ell = b.trailing_zeros();
        let kappa = kappa.min(ell);
        let t = b >> kappa;
        let subtrees = 1usize << kappa;
        let chunk_mods: Vec<Integer> = (0..subtrees)
            .into_par_iter()
            .map(|s| {
                let lo = s * t;
                let hi = ((s + 1) * t).min(len);
                product_range(&moduli[lo.min(len)..hi])
            })
            .collect();
        let remaining = product_range(&chunk_mods);
        ForestRun {
            leaf,
            moduli,
            len,
            t,
            subtrees,
            next: 0,
            vector,
            remaining,
            chunk_mods,
            stats: ForestStats::default(),
        }
    }

    pub fn num_subtrees(&self) -> usize {
        self.subtrees
    }

    pub fn leaves_per_subtree(&self) -> usize {
        self.t
    }

    pub fn stats(&self) -> &ForestStats {
        &self.stats
    }

    /// Run the next subtree, returning the starting index and the residue
    /// vectors C_n for n in [start, start + t). Entries past the original
    /// moduli length are padding (modulus 1) and may be discarded.
    pub fn next_subtree(&mut self) -> Option<(usize, Vec<ResidueVector>)> {
        if self.next >= self.subtrees {
            return None;
        }
        let s = self.next;
        let start = s * self.t;
        let leaves: Vec<IntMatrix> = (start..start + self.t)
            .into_par_iter()
            .map(|k| {
                if k < self.len {
                    (self.leaf)(k)
                } else {
                    IntMatrix::identity(self.vector.len())
                }
            })
            .collect();
        let mods: Vec<Integer> = (start..start + self.t)
            .map(|k| {
                if k < self.len {
                    self.moduli[k].clone()
                } else {
                    Integer::from(1)
                }
            })
            .collect();
        let pass = tree_pass(&self.vector, leaves, mods);

        self.remaining.div_exact_mut(&self.chunk_mods[s]);
        let carry_bytes = self.remaining.significant_bits() as usize / 8 + 1
            + self
                .vector
                .iter()
                .map(|x| x.significant_bits() as usize / 8 + 1)
                .sum::<usize>();
        if pass.tree_bytes + carry_bytes > self.stats.peak_node_bytes {
            self.stats.peak_node_bytes = pass.tree_bytes + carry_bytes;
            self.stats.per_level_bytes = pass.per_level_bytes;
        }

        if s + 1 < self.subtrees {
            let prod = pass.root.row_mul(&self.vector);
            self.vector = reduce_vec(&prod, &self.remaining);
        }
        self.next += 1;
        Some((start, pass.outputs))
    }
}

struct TreePass {
    outputs: Vec<ResidueVector>,
    root: IntMatrix,
    tree_bytes: usize,
    per_level_bytes: Vec<usize>,
}

/// One accumulating remainder tree: product trees for the moduli and the
/// matrices ("each node is the product of its children"), then the top-down
/// pass with the even/odd rule.
fn tree_pass(vector: &[Integer], leaves: Vec<IntMatrix>, mods: Vec<Integer>) -> TreePass {
    let t = leaves.len();
    debug_assert!(t.is_power_of_two());
    let ell = t.trailing_zeros() as usize;

    let mut a_levels: Vec<Vec<IntMatrix>> = vec![leaves];
    let mut m_levels: Vec<Vec<Integer>> = vec![mods];
    for _ in 0..ell {
        let prev_a = a_levels.last().unwrap();
        let next_a: Vec<IntMatrix> = prev_a
            .par_chunks(2)
            .map(|pair| pair[0].mul(&pair[1]))
            .collect();
        a_levels.push(next_a);
        let prev_m = m_levels.last().unwrap();
        let next_m: Vec<Integer> = prev_m
            .par_chunks(2)
            .map(|pair| Integer::from(&pair[0] * &pair[1]))
            .collect();
        m_levels.push(next_m);
    }
    // root first
    a_levels.reverse();
    m_levels.reverse();

    let per_level_bytes: Vec<usize> = a_levels
        .iter()
        .zip(&m_levels)
        .map(|(al, ml)| {
            al.iter().map(|m| m.byte_size()).sum::<usize>()
                + ml
                    .iter()
                    .map(|m| m.significant_bits() as usize / 8 + 1)
                    .sum::<usize>()
        })
        .collect();
    let tree_bytes = per_level_bytes.iter().sum();

    let mut c: Vec<Vec<Integer>> = vec![reduce_vec(vector, &m_levels[0][0])];
    for i in 1..=ell {
        let next: Vec<Vec<Integer>> = (0..1usize << i)
            .into_par_iter()
            .map(|j| {
                let parent = &c[j / 2];
                let m = &m_levels[i][j];
                if j % 2 == 0 {
                    reduce_vec(parent, m)
                } else {
                    let prod = a_levels[i][j - 1].row_mul(parent);
                    reduce_vec(&prod, m)
                }
            })
            .collect();
        c = next;
    }

    let outputs = c
        .into_iter()
        .zip(m_levels[ell].iter())
        .map(|(entries, m)| ResidueVector {
            modulus: m.clone(),
            entries,
        })
        .collect();
    TreePass {
        outputs,
        root: a_levels.swap_remove(0).swap_remove(0),
        tree_bytes,
        per_level_bytes,
    }
}

fn reduce_vec(v: &[Integer], m: &Integer) -> Vec<Integer> {
    v.iter().map(|x| Integer::from(x.rem_euc(m))).collect()
}

fn product_range(xs: &[Integer]) -> Integer {
    match xs.len() {
        0 => Integer::from(1),
        1 => xs[0].clone(),
        n => {
            let (lo, hi) = xs.split_at(n / 2);
            product_range(lo) * product_range(hi)
        }
    }
}

/// All C_n = V * A_0 ... A_{n-1} mod m_n via a single tree.
pub fn remainder_tree(
    vector: &[Integer],
    leaves: &[IntMatrix],
    moduli: &[Integer],
) -> Vec<ResidueVector> {
    remainder_forest(vector, leaves, moduli, 0)
}

/// Same output as [`remainder_tree`] for every kappa.
pub fn remainder_forest(
    vector: &[Integer],
    leaves: &[IntMatrix],
    moduli: &[Integer],
    kappa: u32,
) -> Vec<ResidueVector> {
    let leaf = |k: usize| leaves[k].clone();
    let mut run = ForestRun::new(vector.to_vec(), leaf, moduli, kappa);
    let mut out = Vec::with_capacity(moduli.len());
    while let Some((start, chunk)) = run.next_subtree() {
        for (off, rv) in chunk.into_iter().enumerate() {
            if start + off < moduli.len() {
                out.push(rv);
            }
        }
    }
    out
}

/// Residues of running products: result[n] = values[0] * ... * values[n-1]
/// mod moduli[n] (the empty product for n = 0). The 1x1-matrix case of the
/// forest.
pub fn scalar_remainder_forest(values: &[Integer], moduli: &[Integer], kappa: u32) -> Vec<Integer> {
    assert_eq!(values.len(), moduli.len());
    let leaf = |k: usize| IntMatrix::from_rows(vec![vec![values[k].clone()]]);
    let mut run = ForestRun::new(vec![Integer::from(1)], leaf, moduli, kappa);
    let mut out = Vec::with_capacity(moduli.len());
    while let Some((start, chunk)) = run.next_subtree() {
        for (off, mut rv) in chunk.into_iter().enumerate() {
            if start + off < moduli.len() {
                out.push(rv.entries.swap_remove(0));
            }
        }
    }
    out
}
