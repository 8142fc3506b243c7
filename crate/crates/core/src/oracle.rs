//! Reference implementations used to cross-check the main code paths. They
//! share no code with the enumerator, the canonical labeling or the sparse
//! elimination, and favor brute force over speed.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::Zero;

use crate::graph::MarkedWeightedGraph;
use crate::sparse::SparseMatrix;

/// Rank by dense fraction-free (Bareiss) elimination over big integers.
pub fn dense_bareiss_rank(dense: &[Vec<i64>]) -> usize {
    let rows = dense.len();
    if rows == 0 {
        return 0;
    }
    let cols = dense[0].len();
    let mut a: Vec<Vec<BigInt>> = dense
        .iter()
        .map(|r| r.iter().map(|&v| BigInt::from(v)).collect())
        .collect();
    let mut prev = BigInt::from(1);
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for i in rank + 1..rows {
            for j in col + 1..cols {
                let v = &a[rank][col] * &a[i][j] - &a[i][col] * &a[rank][j];
                a[i][j] = v / &prev;
            }
            a[i][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
    }
    rank
}

pub fn dense_rank_of(m: &SparseMatrix) -> usize {
    dense_bareiss_rank(&m.to_dense())
}

/// Unmarked weighted multigraph on labeled vertices: weights plus the upper
/// triangle of the multiplicity matrix.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Shape {
    weights: Vec<u32>,
    upper: Vec<u32>,
}

fn tri(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = (i.min(j), i.max(j));
    i * n - i * (i + 1) / 2 + j
}

impl Shape {
    fn vertices(&self) -> usize {
        self.weights.len()
    }

    fn permuted(&self, p: &[usize]) -> Shape {
        let n = self.vertices();
        let mut weights = vec![0; n];
        let mut upper = vec![0; self.upper.len()];
        for i in 0..n {
            weights[p[i]] = self.weights[i];
            for j in i..n {
                upper[tri(n, p[i], p[j])] = self.upper[tri(n, i, j)];
            }
        }
        Shape { weights, upper }
    }

    fn degree(&self, v: usize) -> u32 {
        let n = self.vertices();
        (0..n)
            .map(|u| {
                let m = self.upper[tri(n, u, v)];
                if u == v {
                    2 * m
                } else {
                    m
                }
            })
            .sum()
    }

    fn connected(&self) -> bool {
        let n = self.vertices();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for (u, s) in seen.iter_mut().enumerate() {
                if !*s && self.upper[tri(n, u, v)] > 0 {
                    *s = true;
                    stack.push(u);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Markings still needed at `v` for stability.
    fn need(&self, v: usize) -> u32 {
        (3i64 - 2 * self.weights[v] as i64 - self.degree(v) as i64).max(0) as u32
    }
}

fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn compositions(total: u32, parts: usize, f: &mut dyn FnMut(&[u32])) {
    fn go(remaining: u32, parts: usize, acc: &mut Vec<u32>, f: &mut dyn FnMut(&[u32])) {
        if acc.len() + 1 == parts {
            acc.push(remaining);
            f(acc);
            acc.pop();
            return;
        }
        for x in 0..=remaining {
            acc.push(x);
            go(remaining - x, parts, acc, f);
            acc.pop();
        }
    }
    if parts == 0 {
        if total == 0 {
            f(&[]);
        }
        return;
    }
    go(total, parts, &mut Vec::new(), f);
}

/// All stable graphs of genus `g` with `n` markings and at least one edge,
/// one per isomorphism class, generated directly by vertex and edge count.
///
/// Unmarked weighted multigraphs are deduplicated by minimizing over all
/// vertex permutations; markings are then placed on each unmarked class in
/// every stable way and deduplicated under that class's automorphisms.
pub fn bottom_up_classes(g: u32, n: u32) -> Vec<MarkedWeightedGraph> {
    let n = n as usize;
    let max_vertices = (2 * g as i64 - 2 + n as i64).max(0) as usize;
    let max_edges = (3 * g as i64 - 3 + n as i64).max(0) as usize;
    let mut out = Vec::new();
    for v in 1..=max_vertices {
        let perms = all_permutations(v);
        let slots = v * (v + 1) / 2;
        for e in 1..=max_edges {
            if e + 1 < v || e + 1 - v > g as usize {
                continue;
            }
            let total_weight = g - (e + 1 - v) as u32;
            let mut shapes: BTreeSet<Shape> = BTreeSet::new();
            compositions(e as u32, slots, &mut |upper| {
                let base = Shape {
                    weights: vec![0; v],
                    upper: upper.to_vec(),
                };
                if !base.connected() {
                    return;
                }
                compositions(total_weight, v, &mut |weights| {
                    let shape = Shape {
                        weights: weights.to_vec(),
                        upper: upper.to_vec(),
                    };
                    let need: u32 = (0..v).map(|x| shape.need(x)).sum();
                    if need as usize > n {
                        return;
                    }
                    let canonical = perms.iter().map(|p| shape.permuted(p)).min().unwrap();
                    shapes.insert(canonical);
                });
            });
            for shape in shapes {
                let automorphisms: Vec<&Vec<usize>> = perms.iter().filter(|p| shape.permuted(p) == shape).collect();
                let needs: Vec<u32> = (0..v).map(|x| shape.need(x)).collect();
                let mut markings: BTreeSet<Vec<usize>> = BTreeSet::new();
                place_markings(n, &needs, &mut Vec::new(), &mut vec![0; v], &mut |m| {
                    let canonical = automorphisms
                        .iter()
                        .map(|p| m.iter().map(|&x| p[x]).collect::<Vec<_>>())
                        .min()
                        .unwrap();
                    markings.insert(canonical);
                });
                let mut edges = Vec::with_capacity(e);
                for i in 0..v {
                    for j in i..v {
                        for _ in 0..shape.upper[tri(v, i, j)] {
                            edges.push((i, j));
                        }
                    }
                }
                for m in markings {
                    out.push(
                        MarkedWeightedGraph::new(shape.weights.clone(), &edges, m)
                            .expect("oracle graph indices are in range"),
                    );
                }
            }
        }
    }
    out
}

fn place_markings(n: usize, needs: &[u32], acc: &mut Vec<usize>, counts: &mut Vec<u32>, f: &mut dyn FnMut(&[usize])) {
    let missing: u32 = needs
        .iter()
        .zip(counts.iter())
        .map(|(&a, &c)| a.saturating_sub(c))
        .sum();
    if missing as usize > n - acc.len() {
        return;
    }
    if acc.len() == n {
        f(acc);
        return;
    }
    for v in 0..needs.len() {
        acc.push(v);
        counts[v] += 1;
        place_markings(n, needs, acc, counts, f);
        counts[v] -= 1;
        acc.pop();
    }
}

/// Class counts per edge count (index `p` = `p + 1` edges) of the oracle.
pub fn bottom_up_counts(g: u32, n: u32) -> Vec<usize> {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for graph in bottom_up_classes(g, n) {
        *counts.entry(graph.num_edges() - 1).or_default() += 1;
    }
    let top = counts.keys().next_back().map_or(0, |&k| k + 1);
    (0..top).map(|p| counts.get(&p).copied().unwrap_or(0)).collect()
}
