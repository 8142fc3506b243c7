//! Canonical forms, signed isomorphisms and automorphism groups of marked
//! weighted graphs.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::canon;
use crate::graph::MarkedWeightedGraph;
use crate::perm;

/// Byte string identifying an isomorphism class of marked weighted graphs.
/// Serialized as lowercase hex.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }

    pub fn from_hex(s: &str) -> Option<Self> {
        hex::decode(s).ok().map(CanonicalKey)
    }
}

impl fmt::Debug for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalKey({})", self.to_hex())
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl Serialize for CanonicalKey {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for CanonicalKey {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        CanonicalKey::from_hex(&s).ok_or_else(|| serde::de::Error::custom("canonical key is not hex"))
    }
}

/// An isomorphism of marked weighted graphs together with the sign of the
/// permutation it induces on edge indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedIso {
    pub vertex_map: Vec<usize>,
    pub half_edge_map: Vec<usize>,
    pub edge_perm: Vec<usize>,
    pub sign: i8,
}

impl SignedIso {
    /// Builds the record from a half-edge bijection; edges and sign follow.
    fn from_maps(vertex_map: Vec<usize>, half_edge_map: Vec<usize>) -> Self {
        let edge_perm: Vec<usize> = half_edge_map.chunks_exact(2).map(|c| c[0] / 2).collect();
        let sign = perm::sign(&edge_perm);
        SignedIso {
            vertex_map,
            half_edge_map,
            edge_perm,
            sign,
        }
    }

    /// Checks that `self` is an isomorphism `from → to`: it commutes with the
    /// involution and incidence, and preserves weights and markings. Also
    /// rechecks the recorded edge permutation and sign.
    pub fn is_isomorphism(&self, from: &MarkedWeightedGraph, to: &MarkedWeightedGraph) -> bool {
        if from.num_vertices() != to.num_vertices()
            || from.num_half_edges() != to.num_half_edges()
            || from.num_markings() != to.num_markings()
            || self.vertex_map.len() != from.num_vertices()
            || self.half_edge_map.len() != from.num_half_edges()
            || !perm::is_permutation(&self.vertex_map)
            || !perm::is_permutation(&self.half_edge_map)
        {
            return false;
        }
        let r = from.half_edge_vertex();
        let r2 = to.half_edge_vertex();
        let half_edges_ok = (0..from.num_half_edges()).all(|h| {
            let fh = self.half_edge_map[h];
            self.half_edge_map[MarkedWeightedGraph::opposite(h)] == MarkedWeightedGraph::opposite(fh)
                && r2[fh] == self.vertex_map[r[h]]
        });
        let weights_ok = (0..from.num_vertices()).all(|v| to.weight(self.vertex_map[v]) == from.weight(v));
        let markings_ok = from
            .markings()
            .iter()
            .zip(to.markings())
            .all(|(&a, &b)| self.vertex_map[a] == b);
        let edges_ok = self.edge_perm.len() == from.num_edges()
            && (0..from.num_edges()).all(|e| self.edge_perm[e] == self.half_edge_map[2 * e] / 2)
            && self.sign == perm::sign(&self.edge_perm);
        half_edges_ok && weights_ok && markings_ok && edges_ok
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &SignedIso) -> SignedIso {
        SignedIso::from_maps(
            perm::then(&self.vertex_map, &next.vertex_map),
            perm::then(&self.half_edge_map, &next.half_edge_map),
        )
    }

    pub fn inverse(&self) -> SignedIso {
        SignedIso::from_maps(perm::inverse(&self.vertex_map), perm::inverse(&self.half_edge_map))
    }

    pub fn is_identity(&self) -> bool {
        self.vertex_map.iter().enumerate().all(|(i, &j)| i == j)
            && self.half_edge_map.iter().enumerate().all(|(i, &j)| i == j)
    }
}

/// Canonical key, the canonical representative of the class, and an
/// isomorphism from the input onto that representative.
#[derive(Clone, Debug)]
pub struct CanonicalForm {
    pub key: CanonicalKey,
    pub representative: MarkedWeightedGraph,
    pub iso: SignedIso,
    /// Vertex automorphisms of the input graph, identity included.
    pub vertex_automorphisms: Vec<Vec<usize>>,
}

#[derive(PartialEq, Eq, PartialOrd, Ord)]
struct VertexColor {
    weight: u32,
    markings: Vec<usize>,
}

fn vertex_colors(g: &MarkedWeightedGraph) -> Vec<VertexColor> {
    let mut colors: Vec<VertexColor> = g
        .weights()
        .iter()
        .map(|&weight| VertexColor {
            weight,
            markings: Vec::new(),
        })
        .collect();
    for (i, &v) in g.markings().iter().enumerate() {
        colors[v].markings.push(i);
    }
    colors
}

/// Computes the canonical form. The representative orders vertices
/// canonically and lists edges sorted by endpoint positions, with the
/// lower-position end as the first half-edge; it depends only on the key.
pub fn canonical_form(g: &MarkedWeightedGraph) -> CanonicalForm {
    let colors = vertex_colors(g);
    let result = canon::search(&colors, &g.multiplicities());
    let n = g.num_vertices();
    let pos_of = perm::inverse(&result.order);

    let mut key = Vec::with_capacity(3 + 2 * n + g.num_markings() + result.matrix.len());
    key.push(n as u8);
    key.push(g.num_markings() as u8);
    key.push(g.num_edges() as u8);
    for &v in &result.order {
        key.push(colors[v].weight as u8);
        key.push(colors[v].markings.len() as u8);
        key.extend(colors[v].markings.iter().map(|&m| m as u8));
    }
    key.extend_from_slice(&result.matrix);

    // Canonical edge slots: sort edges by endpoint positions, ties by index.
    let mut slots: Vec<(usize, usize, usize)> = g
        .edges()
        .enumerate()
        .map(|(e, (u, v))| {
            let (a, b) = (pos_of[u], pos_of[v]);
            (a.min(b), a.max(b), e)
        })
        .collect();
    slots.sort_unstable();
    let mut half_edge_map = vec![0; g.num_half_edges()];
    let mut rep_half_edges = vec![0; g.num_half_edges()];
    for (slot, &(a, b, e)) in slots.iter().enumerate() {
        rep_half_edges[2 * slot] = a;
        rep_half_edges[2 * slot + 1] = b;
        let first_end = pos_of[g.half_edge_vertex()[2 * e]];
        if first_end == a {
            half_edge_map[2 * e] = 2 * slot;
            half_edge_map[2 * e + 1] = 2 * slot + 1;
        } else {
            half_edge_map[2 * e] = 2 * slot + 1;
            half_edge_map[2 * e + 1] = 2 * slot;
        }
    }
    let rep_weights = result.order.iter().map(|&v| g.weight(v)).collect();
    let rep_markings = g.markings().iter().map(|&v| pos_of[v]).collect();
    let representative = MarkedWeightedGraph::from_parts_unchecked(rep_weights, rep_half_edges, rep_markings);

    CanonicalForm {
        key: CanonicalKey(key),
        representative,
        iso: SignedIso::from_maps(pos_of, half_edge_map),
        vertex_automorphisms: result.automorphisms,
    }
}

/// Class key plus an isomorphism onto the canonical representative. The sign
/// is only defined up to signs of automorphisms; see
/// [`has_odd_automorphism`].
pub fn canonicalize(g: &MarkedWeightedGraph) -> (CanonicalKey, SignedIso) {
    let form = canonical_form(g);
    (form.key, form.iso)
}

/// Edges grouped by unordered endpoint pair, each bundle in index order.
fn bundles(g: &MarkedWeightedGraph) -> BTreeMap<(usize, usize), Vec<usize>> {
    let mut map: BTreeMap<(usize, usize), Vec<usize>> = BTreeMap::new();
    for (e, (u, v)) in g.edges().enumerate() {
        map.entry((u.min(v), u.max(v))).or_default().push(e);
    }
    map
}

/// Extends a vertex automorphism to half-edges, mapping the k-th edge of each
/// bundle to the k-th edge of the image bundle.
fn lift(g: &MarkedWeightedGraph, bundles: &BTreeMap<(usize, usize), Vec<usize>>, gamma: &[usize]) -> SignedIso {
    let r = g.half_edge_vertex();
    let mut half_edge_map = vec![0; g.num_half_edges()];
    for (&(u, v), edges) in bundles {
        let (a, b) = (gamma[u], gamma[v]);
        let image = &bundles[&(a.min(b), a.max(b))];
        for (&e, &f) in edges.iter().zip(image) {
            if u == v {
                half_edge_map[2 * e] = 2 * f;
                half_edge_map[2 * e + 1] = 2 * f + 1;
            } else {
                let to_first = r[2 * f] == gamma[r[2 * e]];
                half_edge_map[2 * e] = if to_first { 2 * f } else { 2 * f + 1 };
                half_edge_map[2 * e + 1] = if to_first { 2 * f + 1 } else { 2 * f };
            }
        }
    }
    SignedIso::from_maps(gamma.to_vec(), half_edge_map)
}

/// Generators and order of the automorphism group of a marked weighted graph,
/// acting on vertices and half-edges.
#[derive(Clone, Debug)]
pub struct AutomorphismGroup {
    pub generators: Vec<SignedIso>,
    pub order: u128,
}

impl AutomorphismGroup {
    /// All distinct permutations of edge indices induced by the group.
    pub fn edge_permutation_image(&self, edges: usize) -> Vec<Vec<usize>> {
        let gens: Vec<Vec<usize>> = self.generators.iter().map(|g| g.edge_perm.clone()).collect();
        perm::closure(edges, &gens)
    }
}

/// The full group is an extension of the vertex automorphisms by the
/// permutations within parallel bundles and the loop flips.
pub fn automorphism_group(g: &MarkedWeightedGraph) -> AutomorphismGroup {
    let form = canonical_form(g);
    automorphisms_from_form(g, &form)
}

pub(crate) fn automorphisms_from_form(g: &MarkedWeightedGraph, form: &CanonicalForm) -> AutomorphismGroup {
    let bundles = bundles(g);
    let mut generators = Vec::new();
    let mut vertex_gens: Vec<Vec<usize>> = Vec::new();
    let mut generated = perm::closure(g.num_vertices(), &vertex_gens).len();
    for gamma in &form.vertex_automorphisms {
        if generated == form.vertex_automorphisms.len() {
            break;
        }
        if gamma.iter().enumerate().all(|(i, &j)| i == j) {
            continue;
        }
        let mut trial = vertex_gens.clone();
        trial.push(gamma.clone());
        let size = perm::closure(g.num_vertices(), &trial).len();
        if size > generated {
            vertex_gens = trial;
            generated = size;
            generators.push(lift(g, &bundles, gamma));
        }
    }

    let vertex_id = perm::identity(g.num_vertices());
    let mut order = form.vertex_automorphisms.len() as u128;
    for (&(u, v), edges) in &bundles {
        let k = edges.len();
        order *= (1..=k as u128).product::<u128>();
        if u == v {
            order *= 1u128 << k;
            for &e in edges {
                let mut h = perm::identity(g.num_half_edges());
                h.swap(2 * e, 2 * e + 1);
                generators.push(SignedIso::from_maps(vertex_id.clone(), h));
            }
        }
        if k >= 2 {
            // a transposition and a k-cycle generate the bundle's symmetric group
            let mut cycles = vec![vec![edges[0], edges[1]]];
            if k >= 3 {
                cycles.push(edges.clone());
            }
            for cycle in cycles {
                let mut h = perm::identity(g.num_half_edges());
                for (i, &e) in cycle.iter().enumerate() {
                    let f = cycle[(i + 1) % cycle.len()];
                    h[2 * e] = 2 * f;
                    h[2 * e + 1] = 2 * f + 1;
                }
                generators.push(SignedIso::from_maps(vertex_id.clone(), h));
            }
        }
    }
    AutomorphismGroup { generators, order }
}

/// True iff some automorphism permutes the edges oddly. Any bundle of two or
/// more parallel edges (or loops at one vertex) gives a transposition;
/// otherwise the edge permutation is determined by the vertex map.
pub fn has_odd_automorphism(g: &MarkedWeightedGraph) -> bool {
    let form = canonical_form(g);
    odd_from_form(g, &form)
}

pub(crate) fn odd_from_form(g: &MarkedWeightedGraph, form: &CanonicalForm) -> bool {
    let bundles = bundles(g);
    if bundles.values().any(|b| b.len() >= 2) {
        return true;
    }
    form.vertex_automorphisms
        .iter()
        .any(|gamma| lift(g, &bundles, gamma).sign < 0)
}
