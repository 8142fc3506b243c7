//! Canonical labeling of vertex-colored multigraphs with loops.
//!
//! Equitable color refinement followed by an individualization search. Every
//! leaf of the search tree is a vertex ordering; the canonical ordering is the
//! one whose multiplicity matrix is lexicographically smallest. All leaves
//! attaining that minimum differ by automorphisms, and every automorphism maps
//! the tree onto itself, so collecting them yields the full vertex
//! automorphism group. Graphs handled here have at most a dozen vertices, so
//! the tree is explored without orbit pruning.

/// Outcome of the canonical search on one colored multigraph.
#[derive(Clone, Debug)]
pub struct SearchResult {
    /// `order[pos]` is the vertex placed at canonical position `pos`.
    pub order: Vec<usize>,
    /// Upper triangle (diagonal included) of the multiplicity matrix in
    /// canonical order.
    pub matrix: Vec<u8>,
    /// Every vertex automorphism as an image vector, identity included.
    pub automorphisms: Vec<Vec<usize>>,
}

/// Runs the search. `mult` is the symmetric `n × n` multiplicity matrix in
/// row-major order with loops on the diagonal; `colors` are vertex invariants
/// that any isomorphism must preserve.
pub fn search<C: Ord>(colors: &[C], mult: &[u32]) -> SearchResult {
    let n = colors.len();
    assert_eq!(mult.len(), n * n);
    let searcher = Searcher { n, mult };

    let mut by_color: Vec<usize> = (0..n).collect();
    by_color.sort_by(|&a, &b| colors[a].cmp(&colors[b]));
    let mut ranks = vec![0u32; n];
    let mut r = 0;
    for i in 0..n {
        if i > 0 && colors[by_color[i]] != colors[by_color[i - 1]] {
            r += 1;
        }
        ranks[by_color[i]] = r;
    }
    searcher.refine(&mut ranks);

    let mut state = LeafState {
        best: None,
        best_orders: Vec::new(),
    };
    searcher.descend(ranks, &mut state);

    let (matrix, first) = state.best.expect("search tree has at least one leaf");
    let pos_of_first = crate::perm::inverse(&first);
    let automorphisms = state
        .best_orders
        .iter()
        .map(|o| (0..n).map(|v| o[pos_of_first[v]]).collect())
        .collect();
    SearchResult {
        order: first,
        matrix,
        automorphisms,
    }
}

struct Searcher<'a> {
    n: usize,
    mult: &'a [u32],
}

struct LeafState {
    best: Option<(Vec<u8>, Vec<usize>)>,
    best_orders: Vec<Vec<usize>>,
}

impl Searcher<'_> {
    fn refine(&self, ranks: &mut [u32]) {
        let n = self.n;
        let mut cells = distinct(ranks);
        while cells < n {
            let sigs: Vec<(u32, Vec<(u32, u32)>)> = (0..n)
                .map(|v| {
                    let mut nb: Vec<(u32, u32)> = (0..n)
                        .filter(|&u| u != v && self.mult[v * n + u] > 0)
                        .map(|u| (ranks[u], self.mult[v * n + u]))
                        .collect();
                    nb.sort_unstable();
                    (ranks[v], nb)
                })
                .collect();
            let fresh = dense_ranks(&sigs);
            let fresh_cells = distinct(&fresh);
            ranks.copy_from_slice(&fresh);
            if fresh_cells == cells {
                break;
            }
            cells = fresh_cells;
        }
    }

    fn descend(&self, ranks: Vec<u32>, state: &mut LeafState) {
        let n = self.n;
        let mut counts = vec![0usize; n];
        for &r in &ranks {
            counts[r as usize] += 1;
        }
        let Some(target) = counts.iter().position(|&c| c >= 2) else {
            self.leaf(&ranks, state);
            return;
        };
        for v in (0..n).filter(|&v| ranks[v] as usize == target) {
            let mut child: Vec<u32> = ranks.iter().map(|&r| 2 * r + 1).collect();
            child[v] = 2 * ranks[v];
            let mut child = dense_ranks(&child);
            self.refine(&mut child);
            self.descend(child, state);
        }
    }

    fn leaf(&self, ranks: &[u32], state: &mut LeafState) {
        let n = self.n;
        let mut order = vec![0; n];
        for (v, &r) in ranks.iter().enumerate() {
            order[r as usize] = v;
        }
        let mut matrix = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                matrix.push(self.mult[order[i] * n + order[j]] as u8);
            }
        }
        match &state.best {
            Some((best, _)) if matrix > *best => {}
            Some((best, _)) if matrix == *best => state.best_orders.push(order),
            _ => {
                state.best = Some((matrix, order.clone()));
                state.best_orders = vec![order];
            }
        }
    }
}

fn distinct(ranks: &[u32]) -> usize {
    let mut v = ranks.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

/// Replaces each key by its rank among the distinct keys.
fn dense_ranks<K: Ord>(keys: &[K]) -> Vec<u32> {
    let mut idx: Vec<usize> = (0..keys.len()).collect();
    idx.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    let mut out = vec![0u32; keys.len()];
    let mut r = 0;
    for i in 0..idx.len() {
        if i > 0 && keys[idx[i]] != keys[idx[i - 1]] {
            r += 1;
        }
        out[idx[i]] = r;
    }
    out
}
