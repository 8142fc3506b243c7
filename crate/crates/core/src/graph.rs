//! Stable marked weighted graphs in half-edge form.
//!
//! Edge `e` consists of the half-edges `2e` and `2e + 1`, so the involution
//! swapping the two ends of an edge is `h ^ 1` and never has a fixed point.
//! Vertices live in their own table rather than as fixed points of the
//! involution.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest vertex count, edge count, marking count and weight accepted. Keeps
/// every quantity of the canonical encoding in one byte.
pub const MAX_SIZE: usize = 255;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GraphJson", into = "GraphJson")]
pub struct MarkedWeightedGraph {
    weights: Vec<u32>,
    /// Vertex incident to each half-edge.
    half_edge_vertex: Vec<usize>,
    /// Vertex carrying marked point `i + 1`.
    markings: Vec<usize>,
}

/// The smallest connected subgraph containing every cycle and every vertex of
/// positive weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Core {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

impl Core {
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

impl MarkedWeightedGraph {
    /// Builds a graph from a vertex weight table, an edge list (loops as
    /// `(u, u)`, parallel edges repeated) and the vertex of each marking.
    pub fn new(weights: Vec<u32>, edges: &[(usize, usize)], markings: Vec<usize>) -> Result<Self> {
        let vertices = weights.len();
        if vertices > MAX_SIZE
            || edges.len() > MAX_SIZE
            || markings.len() > MAX_SIZE
            || weights.iter().any(|&w| w as usize > MAX_SIZE)
        {
            return Err(Error::TooLarge);
        }
        let mut half_edge_vertex = Vec::with_capacity(2 * edges.len());
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= vertices {
                    return Err(Error::VertexOutOfRange { index: x, vertices });
                }
            }
            half_edge_vertex.push(u);
            half_edge_vertex.push(v);
        }
        if let Some(&bad) = markings.iter().find(|&&m| m >= vertices) {
            return Err(Error::VertexOutOfRange { index: bad, vertices });
        }
        Ok(MarkedWeightedGraph {
            weights,
            half_edge_vertex,
            markings,
        })
    }

    pub(crate) fn from_parts_unchecked(weights: Vec<u32>, half_edge_vertex: Vec<usize>, markings: Vec<usize>) -> Self {
        debug_assert!(half_edge_vertex.len().is_multiple_of(2));
        MarkedWeightedGraph {
            weights,
            half_edge_vertex,
            markings,
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.weights.len()
    }

    pub fn num_edges(&self) -> usize {
        self.half_edge_vertex.len() / 2
    }

    pub fn num_half_edges(&self) -> usize {
        self.half_edge_vertex.len()
    }

    pub fn num_markings(&self) -> usize {
        self.markings.len()
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn weight(&self, v: usize) -> u32 {
        self.weights[v]
    }

    /// Vertex of each marked point, indexed from zero.
    pub fn markings(&self) -> &[usize] {
        &self.markings
    }

    pub fn half_edge_vertex(&self) -> &[usize] {
        &self.half_edge_vertex
    }

    /// The other half of half-edge `h`.
    pub fn opposite(h: usize) -> usize {
        h ^ 1
    }

    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        (self.half_edge_vertex[2 * e], self.half_edge_vertex[2 * e + 1])
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.half_edge_vertex.chunks_exact(2).map(|c| (c[0], c[1]))
    }

    pub fn is_loop(&self, e: usize) -> bool {
        let (u, v) = self.endpoints(e);
        u == v
    }

    /// Half-edges at `v` plus marked points at `v`; a loop counts twice.
    pub fn valence(&self, v: usize) -> usize {
        self.half_edge_vertex.iter().filter(|&&x| x == v).count() + self.markings.iter().filter(|&&x| x == v).count()
    }

    pub fn has_repeated_marking(&self) -> bool {
        let mut seen = vec![false; self.num_vertices()];
        self.markings.iter().any(|&v| std::mem::replace(&mut seen[v], true))
    }

    pub fn is_connected(&self) -> bool {
        let n = self.num_vertices();
        if n == 0 {
            return false;
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut components = n;
        for (u, v) in self.edges() {
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            if a != b {
                parent[a] = b;
                components -= 1;
            }
        }
        components == 1
    }

    /// First Betti number `|E| - |V| + 1` of a connected graph.
    pub fn first_betti(&self) -> Result<u32> {
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok((self.num_edges() + 1 - self.num_vertices()) as u32)
    }

    pub fn genus(&self) -> Result<u32> {
        Ok(self.first_betti()? + self.weights.iter().sum::<u32>())
    }

    pub fn is_stable(&self) -> bool {
        (0..self.num_vertices()).all(|v| 2 * self.weights[v] as i64 - 2 + self.valence(v) as i64 > 0)
    }

    /// Repeatedly strips weight-zero vertices meeting at most one edge end.
    pub fn core(&self) -> Result<Core> {
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        let n = self.num_vertices();
        let mut alive_v = vec![true; n];
        let mut alive_e = vec![true; self.num_edges()];
        let mut degree = vec![0usize; n];
        for &v in &self.half_edge_vertex {
            degree[v] += 1;
        }
        let mut stack: Vec<usize> = (0..n).filter(|&v| self.weights[v] == 0 && degree[v] <= 1).collect();
        while let Some(v) = stack.pop() {
            if !alive_v[v] {
                continue;
            }
            alive_v[v] = false;
            for (e, alive) in alive_e.iter_mut().enumerate() {
                if !*alive {
                    continue;
                }
                let (a, b) = self.endpoints(e);
                if a == v || b == v {
                    *alive = false;
                    let other = if a == v { b } else { a };
                    degree[v] -= 1;
                    degree[other] -= 1;
                    if alive_v[other] && self.weights[other] == 0 && degree[other] <= 1 {
                        stack.push(other);
                    }
                }
            }
        }
        Ok(Core {
            vertices: (0..n).filter(|&v| alive_v[v]).collect(),
            edges: (0..self.num_edges()).filter(|&e| alive_e[e]).collect(),
        })
    }

    /// Collapses edge `e` with its endpoints. The remaining edges keep their
    /// relative order, so edge `f > e` becomes `f - 1`. For a non-loop edge
    /// the merged vertex takes the smaller index of the two endpoints.
    pub fn contract_edge(&self, e: usize) -> Result<Self> {
        if e >= self.num_edges() {
            return Err(Error::EdgeOutOfRange {
                index: e,
                edges: self.num_edges(),
            });
        }
        let (a, b) = self.endpoints(e);
        let mut weights = self.weights.clone();
        let mut half_edge_vertex = Vec::with_capacity(self.half_edge_vertex.len() - 2);
        let mut markings = self.markings.clone();
        if a == b {
            weights[a] += 1;
            for (f, chunk) in self.half_edge_vertex.chunks_exact(2).enumerate() {
                if f != e {
                    half_edge_vertex.extend_from_slice(chunk);
                }
            }
        } else {
            let (keep, drop) = (a.min(b), a.max(b));
            weights[keep] += weights[drop];
            weights.remove(drop);
            let relabel = |v: usize| -> usize {
                if v == drop {
                    keep
                } else if v > drop {
                    v - 1
                } else {
                    v
                }
            };
            for (f, chunk) in self.half_edge_vertex.chunks_exact(2).enumerate() {
                if f != e {
                    half_edge_vertex.push(relabel(chunk[0]));
                    half_edge_vertex.push(relabel(chunk[1]));
                }
            }
            for m in &mut markings {
                *m = relabel(*m);
            }
        }
        Ok(MarkedWeightedGraph {
            weights,
            half_edge_vertex,
            markings,
        })
    }

    /// Moves marked point `i` to label `sigma[i]`, i.e. the new marking
    /// function is `m ∘ sigma⁻¹`.
    pub fn permute_markings(&self, sigma: &[usize]) -> Result<Self> {
        if sigma.len() != self.markings.len() || !crate::perm::is_permutation(sigma) {
            return Err(Error::InvalidArgument(format!(
                "{sigma:?} is not a permutation of {} markings",
                self.markings.len()
            )));
        }
        let mut markings = vec![0; self.markings.len()];
        for (i, &v) in self.markings.iter().enumerate() {
            markings[sigma[i]] = v;
        }
        Ok(MarkedWeightedGraph {
            markings,
            ..self.clone()
        })
    }

    /// Re-indexes the internal tables: vertex `v` becomes `vertex_perm[v]`,
    /// edge `e` becomes `edge_perm[e]`, and the two ends of `e` are swapped
    /// when `flip[e]` is set. The result is isomorphic to `self`.
    pub fn reindexed(&self, vertex_perm: &[usize], edge_perm: &[usize], flip: &[bool]) -> Result<Self> {
        if vertex_perm.len() != self.num_vertices()
            || edge_perm.len() != self.num_edges()
            || flip.len() != self.num_edges()
            || !crate::perm::is_permutation(vertex_perm)
            || !crate::perm::is_permutation(edge_perm)
        {
            return Err(Error::InvalidArgument(
                "re-indexing tables do not match the graph".into(),
            ));
        }
        let mut weights = vec![0; self.num_vertices()];
        for (v, &w) in self.weights.iter().enumerate() {
            weights[vertex_perm[v]] = w;
        }
        let mut half_edge_vertex = vec![0; self.num_half_edges()];
        for e in 0..self.num_edges() {
            let (mut a, mut b) = self.endpoints(e);
            if flip[e] {
                std::mem::swap(&mut a, &mut b);
            }
            half_edge_vertex[2 * edge_perm[e]] = vertex_perm[a];
            half_edge_vertex[2 * edge_perm[e] + 1] = vertex_perm[b];
        }
        let markings = self.markings.iter().map(|&v| vertex_perm[v]).collect();
        Ok(MarkedWeightedGraph {
            weights,
            half_edge_vertex,
            markings,
        })
    }

    /// Symmetric edge multiplicity matrix, row-major; the diagonal counts loops.
    pub(crate) fn multiplicities(&self) -> Vec<u32> {
        let n = self.num_vertices();
        let mut m = vec![0u32; n * n];
        for (u, v) in self.edges() {
            m[u * n + v] += 1;
            if u != v {
                m[v * n + u] += 1;
            }
        }
        m
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("graph serialization cannot fail")
    }
}

#[derive(Serialize, Deserialize)]
struct VertexJson {
    weight: u32,
}

/// Wire form: `{"vertices":[{"weight":w}...], "edges":[[u,v]...], "markings":[v_1,...]}`.
#[derive(Serialize, Deserialize)]
struct GraphJson {
    vertices: Vec<VertexJson>,
    edges: Vec<[usize; 2]>,
    markings: Vec<usize>,
}

impl TryFrom<GraphJson> for MarkedWeightedGraph {
    type Error = Error;

    fn try_from(j: GraphJson) -> Result<Self> {
        let edges: Vec<(usize, usize)> = j.edges.iter().map(|e| (e[0], e[1])).collect();
        MarkedWeightedGraph::new(j.vertices.iter().map(|v| v.weight).collect(), &edges, j.markings)
    }
}

impl From<MarkedWeightedGraph> for GraphJson {
    fn from(g: MarkedWeightedGraph) -> Self {
        GraphJson {
            vertices: g.weights.iter().map(|&weight| VertexJson { weight }).collect(),
            edges: g.edges().map(|(u, v)| [u, v]).collect(),
            markings: g.markings,
        }
    }
}
