//! Enumeration of the isomorphism classes of stable marked graphs of genus
//! `g` with `n` markings.
//!
//! The maximal classes (all weights zero, every vertex trivalent) are grown
//! one edge at a time from a distribution of the markings over the vertices,
//! rejecting isomorphic partial graphs at every level. The remaining classes
//! are the closure of the maximal ones under single edge contractions.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::canon;
use crate::error::{Error, Result};
use crate::graph::MarkedWeightedGraph;
use crate::iso::{self, CanonicalForm, CanonicalKey};

/// Position of a class in a catalog: `dim + 1` edges, `index` within that level.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClassRef {
    pub dim: usize,
    pub index: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub key: CanonicalKey,
    pub graph: MarkedWeightedGraph,
    pub aut_order: u128,
    pub odd_automorphism: bool,
    pub repeated_marking: bool,
}

impl CatalogEntry {
    /// Annotates the canonical representative of `input`'s class.
    pub fn from_form(input: &MarkedWeightedGraph, form: CanonicalForm) -> Self {
        let aut = iso::automorphisms_from_form(input, &form);
        CatalogEntry {
            odd_automorphism: iso::odd_from_form(input, &form),
            repeated_marking: input.has_repeated_marking(),
            aut_order: aut.order,
            key: form.key,
            graph: form.representative,
        }
    }

    pub fn new(graph: &MarkedWeightedGraph) -> Self {
        let form = iso::canonical_form(graph);
        CatalogEntry::from_form(graph, form)
    }
}

/// All classes of `J_{g,n}` with at least one edge, grouped by edge count.
/// Each level is sorted by canonical key.
#[derive(Clone, Debug)]
pub struct GraphCatalog {
    g: u32,
    n: u32,
    levels: Vec<Vec<CatalogEntry>>,
    index: HashMap<CanonicalKey, ClassRef>,
}

impl GraphCatalog {
    /// `levels[p]` holds the classes with `p + 1` edges.
    pub fn from_levels(g: u32, n: u32, mut levels: Vec<Vec<CatalogEntry>>) -> Self {
        while levels.last().is_some_and(|l| l.is_empty()) {
            levels.pop();
        }
        let mut index = HashMap::new();
        for (dim, level) in levels.iter_mut().enumerate() {
            level.sort_by(|a, b| a.key.cmp(&b.key));
            for (i, entry) in level.iter().enumerate() {
                index.insert(entry.key.clone(), ClassRef { dim, index: i });
            }
        }
        GraphCatalog { g, n, levels, index }
    }

    pub fn g(&self) -> u32 {
        self.g
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// Largest populated dimension, `None` for an empty catalog.
    pub fn dimension(&self) -> Option<usize> {
        self.levels.len().checked_sub(1)
    }

    pub fn levels(&self) -> &[Vec<CatalogEntry>] {
        &self.levels
    }

    /// Classes with `dim + 1` edges; empty beyond the top dimension.
    pub fn level(&self, dim: usize) -> &[CatalogEntry] {
        self.levels.get(dim).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn entry(&self, r: ClassRef) -> &CatalogEntry {
        &self.levels[r.dim][r.index]
    }

    pub fn lookup(&self, key: &CanonicalKey) -> Option<ClassRef> {
        self.index.get(key).copied()
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ClassRef, &CatalogEntry)> {
        self.levels
            .iter()
            .enumerate()
            .flat_map(|(dim, l)| l.iter().enumerate().map(move |(index, e)| (ClassRef { dim, index }, e)))
    }
}

pub fn check_parameters(g: u32, n: u32) -> Result<()> {
    if 2 * g as i64 - 2 + n as i64 <= 0 {
        return Err(Error::UnstableParameters { g, n });
    }
    let edges = 3 * g as usize + n as usize - 3;
    if edges > crate::graph::MAX_SIZE || n as usize > crate::graph::MAX_SIZE {
        return Err(Error::TooLarge);
    }
    Ok(())
}

/// Partially built trivalent graph: each vertex keeps its marked points and
/// the number of half-edges still to be attached.
#[derive(Clone, Debug)]
struct Partial {
    markings: Vec<Vec<usize>>,
    free: Vec<u8>,
    edges: Vec<(usize, usize)>,
}

impl Partial {
    fn multiplicities(&self) -> Vec<u32> {
        let n = self.free.len();
        let mut m = vec![0u32; n * n];
        for &(u, v) in &self.edges {
            m[u * n + v] += 1;
            if u != v {
                m[v * n + u] += 1;
            }
        }
        m
    }

    /// Canonical relabeling plus its key.
    fn canonical(&self) -> (Vec<u8>, Partial) {
        let colors: Vec<(u8, &Vec<usize>)> = self.free.iter().copied().zip(self.markings.iter()).collect();
        let result = canon::search(&colors, &self.multiplicities());
        let pos_of = crate::perm::inverse(&result.order);
        let mut key = Vec::new();
        for &v in &result.order {
            key.push(self.free[v]);
            key.push(self.markings[v].len() as u8);
            key.extend(self.markings[v].iter().map(|&m| m as u8));
        }
        key.extend_from_slice(&result.matrix);
        let mut edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(u, v)| {
                let (a, b) = (pos_of[u], pos_of[v]);
                (a.min(b), a.max(b))
            })
            .collect();
        edges.sort_unstable();
        let relabeled = Partial {
            markings: result.order.iter().map(|&v| self.markings[v].clone()).collect(),
            free: result.order.iter().map(|&v| self.free[v]).collect(),
            edges,
        };
        (key, relabeled)
    }

    /// Attaches one half-edge of a fixed vertex to every possible partner.
    /// The fixed vertex is the lowest-indexed vertex already touching an
    /// edge that still has room, so the edges always form one component.
    fn children(&self) -> Vec<Partial> {
        let mut touched = vec![false; self.free.len()];
        for &(u, v) in &self.edges {
            touched[u] = true;
            touched[v] = true;
        }
        let anchor = if self.edges.is_empty() {
            self.free.iter().position(|&f| f > 0)
        } else {
            (0..self.free.len()).find(|&v| touched[v] && self.free[v] > 0)
        };
        let Some(v) = anchor else {
            return Vec::new();
        };
        let mut out = Vec::new();
        for w in 0..self.free.len() {
            let needed = if w == v { 2 } else { 1 };
            if self.free[w] < needed {
                continue;
            }
            let mut child = self.clone();
            child.free[v] -= 1;
            child.free[w] -= 1;
            child.edges.push((v.min(w), v.max(w)));
            out.push(child);
        }
        out
    }

    fn into_graph(self) -> MarkedWeightedGraph {
        let vertices = self.free.len();
        let n: usize = self.markings.iter().map(Vec::len).sum();
        let mut markings = vec![0; n];
        for (v, ms) in self.markings.iter().enumerate() {
            for &m in ms {
                markings[m] = v;
            }
        }
        MarkedWeightedGraph::new(vec![0; vertices], &self.edges, markings).expect("partial graph indices are in range")
    }
}

/// Set partitions of `0..n` into at most `max_blocks` blocks of size at most
/// `max_size`, as restricted growth strings.
fn marking_distributions(n: usize, max_blocks: usize, max_size: usize) -> Vec<Vec<Vec<usize>>> {
    fn go(
        i: usize,
        n: usize,
        max_blocks: usize,
        max_size: usize,
        blocks: &mut Vec<Vec<usize>>,
        out: &mut Vec<Vec<Vec<usize>>>,
    ) {
        if i == n {
            out.push(blocks.clone());
            return;
        }
        for b in 0..blocks.len() {
            if blocks[b].len() < max_size {
                blocks[b].push(i);
                go(i + 1, n, max_blocks, max_size, blocks, out);
                blocks[b].pop();
            }
        }
        if blocks.len() < max_blocks {
            blocks.push(vec![i]);
            go(i + 1, n, max_blocks, max_size, blocks, out);
            blocks.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, max_blocks, max_size, &mut Vec::new(), &mut out);
    out
}

/// All classes of connected genus-`g` graphs with `n` markings whose vertices
/// all have weight zero and valence exactly three, sorted by canonical key.
pub fn enumerate_maximal(g: u32, n: u32) -> Result<Vec<MarkedWeightedGraph>> {
    check_parameters(g, n)?;
    let vertices = (2 * g + n - 2) as usize;
    let edges = (3 * g + n - 3) as usize;
    let max_size = if vertices == 1 { 3 } else { 2 };

    let mut current: BTreeMap<Vec<u8>, Partial> = BTreeMap::new();
    for mut blocks in marking_distributions(n as usize, vertices, max_size) {
        blocks.resize(vertices, Vec::new());
        let partial = Partial {
            free: blocks.iter().map(|b| 3 - b.len() as u8).collect(),
            markings: blocks,
            edges: Vec::new(),
        };
        let (key, canonical) = partial.canonical();
        current.insert(key, canonical);
    }
    for _ in 0..edges {
        let children: Vec<(Vec<u8>, Partial)> = current
            .par_iter()
            .flat_map_iter(|(_, p)| p.children().into_iter().map(|c| c.canonical()))
            .collect();
        current = children.into_iter().collect();
    }

    let mut classes: BTreeMap<CanonicalKey, MarkedWeightedGraph> = BTreeMap::new();
    for partial in current.into_values() {
        debug_assert!(partial.free.iter().all(|&f| f == 0));
        let graph = partial.into_graph();
        if graph.is_connected() {
            let form = iso::canonical_form(&graph);
            classes.entry(form.key).or_insert(form.representative);
        }
    }
    Ok(classes.into_values().collect())
}

/// Top levels of a catalog under construction. `levels[p]` is filled for all
/// `p >= lowest`.
#[derive(Clone, Debug)]
pub struct PartialCatalog {
    pub g: u32,
    pub n: u32,
    pub lowest: usize,
    pub levels: Vec<Vec<CatalogEntry>>,
}

impl PartialCatalog {
    pub fn classes(&self) -> usize {
        self.levels.iter().map(Vec::len).sum()
    }
}

#[derive(Clone, Debug)]
pub enum Enumeration {
    Complete(GraphCatalog),
    /// Stopped at the class limit; resume by passing the checkpoint back.
    Interrupted(PartialCatalog),
}

#[derive(Default)]
pub struct EnumerationOptions<'a> {
    /// Stop once this many classes have been collected (checked between
    /// levels).
    pub max_classes: Option<usize>,
    pub progress: Option<&'a (dyn Fn(&str) + Sync)>,
}

/// Every class of `J_{g,n}` with at least one edge.
pub fn enumerate_all(g: u32, n: u32) -> Result<GraphCatalog> {
    match enumerate_with(g, n, &EnumerationOptions::default(), None)? {
        Enumeration::Complete(c) => Ok(c),
        Enumeration::Interrupted(_) => unreachable!("no class limit was set"),
    }
}

/// Contraction closure of the maximal classes, one edge count at a time,
/// optionally resuming from a checkpoint.
pub fn enumerate_with(
    g: u32,
    n: u32,
    options: &EnumerationOptions<'_>,
    resume: Option<PartialCatalog>,
) -> Result<Enumeration> {
    check_parameters(g, n)?;
    let top = (3 * g + n - 3) as usize;
    if top == 0 {
        return Ok(Enumeration::Complete(GraphCatalog::from_levels(g, n, Vec::new())));
    }
    let report = |msg: String| {
        if let Some(p) = options.progress {
            p(&msg);
        }
    };

    let mut partial = match resume {
        Some(p) => {
            if p.g != g || p.n != n || p.levels.len() != top || p.lowest >= top {
                return Err(Error::Format("checkpoint does not match the requested (g, n)".into()));
            }
            report(format!("resuming at {} edges", p.lowest + 1));
            p
        }
        None => {
            let maximal = enumerate_maximal(g, n)?;
            report(format!("{} maximal classes with {top} edges", maximal.len()));
            let mut levels = vec![Vec::new(); top];
            levels[top - 1] = maximal.par_iter().map(CatalogEntry::new).collect();
            PartialCatalog {
                g,
                n,
                lowest: top - 1,
                levels,
            }
        }
    };

    while partial.lowest > 0 {
        if let Some(limit) = options.max_classes {
            if partial.classes() > limit {
                return Ok(Enumeration::Interrupted(partial));
            }
        }
        let dim = partial.lowest;
        let faces: Vec<(CanonicalKey, MarkedWeightedGraph, CanonicalForm)> = partial.levels[dim]
            .par_iter()
            .flat_map_iter(|entry| {
                (0..entry.graph.num_edges()).map(move |e| {
                    let face = entry.graph.contract_edge(e).expect("edge index in range");
                    let form = iso::canonical_form(&face);
                    (form.key.clone(), face, form)
                })
            })
            .collect();
        let mut unique: BTreeMap<CanonicalKey, (MarkedWeightedGraph, CanonicalForm)> = BTreeMap::new();
        for (key, face, form) in faces {
            unique.entry(key).or_insert((face, form));
        }
        let level: Vec<CatalogEntry> = unique
            .into_par_iter()
            .map(|(_, (face, form))| CatalogEntry::from_form(&face, form))
            .collect();
        report(format!("{} classes with {dim} edges", level.len()));
        partial.levels[dim - 1] = level;
        partial.lowest = dim - 1;
    }
    Ok(Enumeration::Complete(GraphCatalog::from_levels(g, n, partial.levels)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unstable_parameters_are_rejected() {
        assert!(matches!(enumerate_maximal(0, 2), Err(Error::UnstableParameters { .. })));
        assert!(matches!(enumerate_all(1, 0), Err(Error::UnstableParameters { .. })));
    }

    #[test]
    fn maximal_one_one_is_the_marked_loop() {
        let max = enumerate_maximal(1, 1).unwrap();
        assert_eq!(max.len(), 1);
        let loop_graph = MarkedWeightedGraph::new(vec![0], &[(0, 0)], vec![0]).unwrap();
        assert_eq!(iso::canonicalize(&max[0]).0, iso::canonicalize(&loop_graph).0);
    }

    #[test]
    fn maximal_zero_four_is_three_trees() {
        // one class per way of pairing four labeled leaves
        let max = enumerate_maximal(0, 4).unwrap();
        assert_eq!(max.len(), 3);
        for g in &max {
            assert_eq!(g.num_vertices(), 2);
            assert_eq!(g.num_edges(), 1);
        }
    }

    #[test]
    fn maximal_one_three_contains_marked_triangle() {
        let max = enumerate_maximal(1, 3).unwrap();
        let triangle = MarkedWeightedGraph::new(vec![0; 3], &[(0, 1), (1, 2), (2, 0)], vec![0, 1, 2]).unwrap();
        let key = iso::canonicalize(&triangle).0;
        assert_eq!(max.iter().filter(|g| iso::canonicalize(g).0 == key).count(), 1);
        for g in &max {
            assert!(g.is_stable());
            assert_eq!(g.genus().unwrap(), 1);
            assert!((0..g.num_vertices()).all(|v| g.valence(v) == 3 && g.weight(v) == 0));
        }
    }

    #[test]
    fn maximal_zero_three_is_the_bare_vertex() {
        let max = enumerate_maximal(0, 3).unwrap();
        assert_eq!(max.len(), 1);
        assert_eq!(max[0].num_edges(), 0);
    }

    #[test]
    fn one_one_catalog_is_a_point() {
        let c = enumerate_all(1, 1).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.class_counts(), vec![1]);
        assert!(!c.level(0)[0].odd_automorphism);
    }

    #[test]
    fn zero_three_catalog_is_empty() {
        let c = enumerate_all(0, 3).unwrap();
        assert!(c.is_empty());
        assert_eq!(c.dimension(), None);
    }

    #[test]
    fn two_zero_maximal_graphs() {
        // theta graph and the dumbbell
        assert_eq!(enumerate_maximal(2, 0).unwrap().len(), 2);
    }

    #[test]
    fn catalog_is_contraction_closed() {
        let c = enumerate_all(1, 3).unwrap();
        for (_, entry) in c.iter() {
            assert!(entry.graph.is_stable());
            assert_eq!(entry.graph.genus().unwrap(), 1);
            for e in 0..entry.graph.num_edges() {
                let face = entry.graph.contract_edge(e).unwrap();
                if face.num_edges() > 0 {
                    assert!(c.lookup(&iso::canonicalize(&face).0).is_some());
                }
            }
        }
    }

    #[test]
    fn class_limit_interrupts_and_resumes() {
        let opts = EnumerationOptions {
            max_classes: Some(1),
            progress: None,
        };
        let partial = match enumerate_with(1, 3, &opts, None).unwrap() {
            Enumeration::Interrupted(p) => p,
            Enumeration::Complete(_) => panic!("expected an interruption"),
        };
        let resumed = match enumerate_with(1, 3, &EnumerationOptions::default(), Some(partial)).unwrap() {
            Enumeration::Complete(c) => c,
            Enumeration::Interrupted(_) => panic!("no limit on resume"),
        };
        assert_eq!(resumed.class_counts(), enumerate_all(1, 3).unwrap().class_counts());
    }

    #[test]
    fn marking_distributions_count() {
        // set partitions of 4 into blocks of size <= 2: 1 + 6 + 3 = 10
        assert_eq!(marking_distributions(4, 4, 2).len(), 10);
    }
}
