//! The generalized Δ-complex of a graph catalog and its sign-twisted cellular
//! chain complex over the rationals.
//!
//! A p-cell is a class with `p + 1` edges, labeled by the edge order of its
//! canonical representative. Face `i` contracts the edge labeled `i`; the
//! surviving edges keep their order, which is exactly the relabeling by the
//! order-preserving injection that skips `i`. Comparing the contracted graph
//! with the representative of its class yields the sign of the induced label
//! permutation. Classes whose automorphisms include an odd edge permutation
//! vanish rationally, so only the remaining ("alternating") classes get basis
//! vectors.

use rayon::prelude::*;
use serde::Serialize;

use crate::enumerate::{CatalogEntry, ClassRef, GraphCatalog};
use crate::error::{Error, Result};
use crate::iso::{self, automorphism_group};
use crate::sparse::SparseMatrix;

/// A cell of the complex with its labeling-orbit data.
#[derive(Clone, Debug)]
pub struct Cell {
    pub dim: usize,
    pub class: ClassRef,
    /// Label of each edge of the representative; always the identity.
    pub labeling: Vec<usize>,
    /// Image of the automorphism group in the permutations of the labels.
    pub stabilizer: Vec<Vec<usize>>,
    pub alternating: bool,
}

impl Cell {
    pub fn new(catalog: &GraphCatalog, class: ClassRef) -> Self {
        let entry = catalog.entry(class);
        let edges = entry.graph.num_edges();
        let stabilizer = automorphism_group(&entry.graph).edge_permutation_image(edges);
        Cell {
            dim: class.dim,
            class,
            labeling: (0..edges).collect(),
            alternating: stabilizer.iter().all(|p| crate::perm::sign(p) > 0),
            stabilizer,
        }
    }
}

/// Where face `i` of a cell lands.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaceTarget {
    /// The edgeless graph; only reached from 0-cells.
    Point,
    Class(ClassRef),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Face {
    pub target: FaceTarget,
    /// Sign of the label permutation relative to the target's reference
    /// labeling. Meaningful only when the target is alternating.
    pub sign: i8,
}

/// Face `i` of the cell `class`.
pub fn face(catalog: &GraphCatalog, class: ClassRef, i: usize) -> Result<Face> {
    let entry = catalog.entry(class);
    let contracted = entry.graph.contract_edge(i)?;
    if contracted.num_edges() == 0 {
        return Ok(Face {
            target: FaceTarget::Point,
            sign: 1,
        });
    }
    let (key, iso) = iso::canonicalize(&contracted);
    let target = catalog.lookup(&key).ok_or_else(|| {
        Error::Integrity(format!(
            "face {i} of {} is missing from the catalog",
            entry.graph.to_json()
        ))
    })?;
    Ok(Face {
        target: FaceTarget::Class(target),
        sign: iso.sign,
    })
}

/// Cellular chain complex with rational basis and integer boundary matrices.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    reduced: bool,
    /// `bases[p]`: alternating classes of dimension `p`, in catalog order.
    bases: Vec<Vec<ClassRef>>,
    /// `boundaries[p]`: `C_p → C_{p-1}`. `boundaries[0]` is the augmentation
    /// in reduced mode and has zero rows otherwise.
    boundaries: Vec<SparseMatrix>,
}

impl ChainComplex {
    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    pub fn is_empty(&self) -> bool {
        self.bases.iter().all(Vec::is_empty)
    }

    /// Top cell dimension, `None` when there are no cells.
    pub fn top_degree(&self) -> Option<usize> {
        self.bases.len().checked_sub(1)
    }

    /// `-1` in reduced mode, `0` otherwise.
    pub fn bottom_degree(&self) -> i64 {
        if self.reduced {
            -1
        } else {
            0
        }
    }

    /// Rank of `C_p` over the rationals.
    pub fn dim(&self, p: i64) -> usize {
        if p == -1 {
            return usize::from(self.reduced);
        }
        if p < 0 {
            return 0;
        }
        self.bases.get(p as usize).map_or(0, Vec::len)
    }

    pub fn basis(&self, p: usize) -> &[ClassRef] {
        self.bases.get(p).map(Vec::as_slice).unwrap_or(&[])
    }

    /// `∂_p: C_p → C_{p-1}` for `0 <= p <= top`.
    pub fn boundary(&self, p: usize) -> Option<&SparseMatrix> {
        self.boundaries.get(p)
    }

    pub fn boundaries(&self) -> &[SparseMatrix] {
        &self.boundaries
    }

    /// Degrees `p` (with `p - 1 >= bottom`) where `∂_{p-1} ∘ ∂_p` is nonzero.
    pub fn boundary_squared_failures(&self) -> Result<Vec<usize>> {
        let mut bad = Vec::new();
        for p in 1..self.boundaries.len() {
            if !self.boundaries[p - 1].mul(&self.boundaries[p])?.is_zero() {
                bad.push(p);
            }
        }
        Ok(bad)
    }

    /// Negates the first stored entry of `∂_p`. For fault-injection tests.
    pub fn flip_first_sign(&mut self, p: usize) -> bool {
        let Some(m) = self.boundaries.get(p) else {
            return false;
        };
        let Some((i, j, v)) = m.triplets().next() else {
            return false;
        };
        let mut triplets: Vec<_> = m.triplets().collect();
        triplets.retain(|&(a, b, _)| (a, b) != (i, j));
        triplets.push((i, j, -v));
        self.boundaries[p] = SparseMatrix::from_triplets(m.rows(), m.cols(), &triplets).expect("same shape");
        true
    }

    /// Reduced Euler characteristic `Σ (-1)^p dim C_p` over all stored degrees.
    pub fn euler_characteristic(&self) -> i64 {
        (self.bottom_degree()..=self.top_degree().map_or(-1, |t| t as i64))
            .map(|p| if p.rem_euclid(2) == 0 { 1 } else { -1 } * self.dim(p) as i64)
            .sum()
    }
}

/// Assembles the chain complex. In reduced mode every 0-cell maps to the
/// augmentation generator with coefficient `+1`.
pub fn build_complex(catalog: &GraphCatalog, reduced: bool) -> Result<ChainComplex> {
    let top = catalog.dimension();
    let mut bases = Vec::new();
    let mut positions: Vec<Vec<Option<usize>>> = Vec::new();
    for level in catalog.levels() {
        let mut basis = Vec::new();
        let mut pos = vec![None; level.len()];
        for (index, entry) in level.iter().enumerate() {
            if !entry.odd_automorphism {
                pos[index] = Some(basis.len());
                basis.push(ClassRef {
                    dim: bases.len(),
                    index,
                });
            }
        }
        bases.push(basis);
        positions.push(pos);
    }

    let mut boundaries = Vec::new();
    for p in 0..=top.map_or(-1, |t| t as i64) {
        let p = p as usize;
        let rows = if p == 0 {
            usize::from(reduced)
        } else {
            bases[p - 1].len()
        };
        let columns: Vec<Vec<(usize, i64)>> = bases[p]
            .par_iter()
            .map(|&cell| -> Result<Vec<(usize, i64)>> {
                let mut column = Vec::new();
                for i in 0..=p {
                    let f = face(catalog, cell, i)?;
                    let sign = if i % 2 == 0 { 1 } else { -1 } * f.sign as i64;
                    match f.target {
                        FaceTarget::Point => {
                            if reduced {
                                column.push((0, 1));
                            }
                        }
                        FaceTarget::Class(t) => {
                            if let Some(row) = positions[t.dim][t.index] {
                                column.push((row, sign));
                            }
                        }
                    }
                }
                Ok(column)
            })
            .collect::<Result<_>>()?;
        boundaries.push(SparseMatrix::from_columns(rows, columns));
    }
    Ok(ChainComplex {
        reduced,
        bases,
        boundaries,
    })
}

/// Per-degree counts of alternating (`alpha`) and non-alternating (`beta`)
/// classes; integrally `C_p ≅ Z^alpha ⊕ (Z/2)^beta`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorsionCensus {
    pub alpha: Vec<usize>,
    pub beta: Vec<usize>,
}

impl TorsionCensus {
    /// `Σ (-1)^p alpha_p - 1`, the reduced Euler characteristic.
    pub fn reduced_euler_characteristic(&self) -> i64 {
        self.alpha
            .iter()
            .enumerate()
            .map(|(p, &a)| if p % 2 == 0 { a as i64 } else { -(a as i64) })
            .sum::<i64>()
            - 1
    }
}

pub fn torsion_census(catalog: &GraphCatalog) -> TorsionCensus {
    let mut alpha = Vec::new();
    let mut beta = Vec::new();
    for level in catalog.levels() {
        let odd = level.iter().filter(|e| e.odd_automorphism).count();
        alpha.push(level.len() - odd);
        beta.push(odd);
    }
    TorsionCensus { alpha, beta }
}

/// Restricts a catalog to the classes satisfying `predicate`, after checking
/// that contracting any edge of a kept class lands on a kept class (or on the
/// edgeless graph).
pub fn subcomplex<F>(catalog: &GraphCatalog, predicate: F) -> Result<GraphCatalog>
where
    F: Fn(&CatalogEntry) -> bool + Sync,
{
    let kept: Vec<ClassRef> = catalog.iter().filter(|(_, e)| predicate(e)).map(|(r, _)| r).collect();
    let violation = kept.par_iter().find_map_any(|&r| {
        let entry = catalog.entry(r);
        (0..entry.graph.num_edges()).find_map(|e| match face(catalog, r, e) {
            Ok(Face {
                target: FaceTarget::Class(t),
                ..
            }) if !predicate(catalog.entry(t)) => Some(Ok((entry.graph.to_json(), e))),
            Err(err) => Some(Err(err)),
            _ => None,
        })
    });
    match violation {
        Some(Ok((graph, edge))) => return Err(Error::ClosureViolation { graph, edge }),
        Some(Err(e)) => return Err(e),
        None => {}
    }
    let mut levels = vec![Vec::new(); catalog.levels().len()];
    for r in kept {
        levels[r.dim].push(catalog.entry(r).clone());
    }
    Ok(GraphCatalog::from_levels(catalog.g(), catalog.n(), levels))
}

/// Curves with two markings on one vertex.
pub fn repeated_marking_subcomplex(catalog: &GraphCatalog) -> Result<GraphCatalog> {
    subcomplex(catalog, |e| e.repeated_marking)
}

/// Checks `d_i d_j = d_{j-1} d_i` for `i < j` on the given cells: both
/// routes must reach the same class, with the same sign when that class is
/// alternating. Returns a description of the first mismatch.
pub fn face_coherence_mismatch(catalog: &GraphCatalog, cells: &[ClassRef]) -> Option<String> {
    cells.par_iter().find_map_any(|&r| {
        let g = &catalog.entry(r).graph;
        let p = r.dim;
        for j in 1..=p {
            for i in 0..j {
                let a = g.contract_edge(j).and_then(|x| x.contract_edge(i));
                let b = g.contract_edge(i).and_then(|x| x.contract_edge(j - 1));
                let (Ok(a), Ok(b)) = (a, b) else {
                    return Some(format!("contraction failed on {}", g.to_json()));
                };
                if a.num_edges() == 0 {
                    continue;
                }
                let (ka, sa) = iso::canonicalize(&a);
                let (kb, sb) = iso::canonicalize(&b);
                if ka != kb {
                    return Some(format!("d_{i} d_{j} and d_{} d_{i} differ on {}", j - 1, g.to_json()));
                }
                let alternating = catalog.lookup(&ka).is_some_and(|t| !catalog.entry(t).odd_automorphism);
                if alternating && sa.sign != sb.sign {
                    return Some(format!("face signs disagree for ({i}, {j}) on {}", g.to_json()));
                }
            }
        }
        None
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::enumerate_all;

    #[test]
    fn one_one_is_a_point() {
        let c = build_complex(&enumerate_all(1, 1).unwrap(), true).unwrap();
        assert_eq!(c.dim(0), 1);
        assert_eq!(c.boundary(0).unwrap().to_dense(), vec![vec![1]]);
        assert_eq!(c.euler_characteristic(), 0);
    }

    #[test]
    fn empty_complex_keeps_augmentation() {
        let c = build_complex(&enumerate_all(0, 3).unwrap(), true).unwrap();
        assert!(c.is_empty());
        assert_eq!(c.dim(-1), 1);
        assert_eq!(c.top_degree(), None);
        assert_eq!(c.euler_characteristic(), -1);
    }

    #[test]
    fn boundary_squares_to_zero_on_one_four() {
        let catalog = enumerate_all(1, 4).unwrap();
        for reduced in [true, false] {
            let c = build_complex(&catalog, reduced).unwrap();
            assert!(c.boundary_squared_failures().unwrap().is_empty());
        }
    }

    #[test]
    fn flipped_sign_breaks_boundary_squared() {
        let mut c = build_complex(&enumerate_all(1, 4).unwrap(), true).unwrap();
        assert!(c.flip_first_sign(2));
        assert!(!c.boundary_squared_failures().unwrap().is_empty());
    }

    #[test]
    fn census_examples() {
        let one_one = torsion_census(&enumerate_all(1, 1).unwrap());
        assert_eq!((one_one.alpha[0], one_one.beta[0]), (1, 0));

        let one_two = enumerate_all(1, 2).unwrap();
        let census = torsion_census(&one_two);
        // the two-vertex, two-edge banana with one marking on each side
        let banana = crate::MarkedWeightedGraph::new(vec![0, 0], &[(0, 1), (0, 1)], vec![0, 1]).unwrap();
        let r = one_two.lookup(&iso::canonicalize(&banana).0).unwrap();
        assert_eq!(r.dim, 1);
        assert!(one_two.entry(r).odd_automorphism);
        assert!(census.beta[1] >= 1);

        let one_three = enumerate_all(1, 3).unwrap();
        let complex = build_complex(&one_three, true).unwrap();
        let census = torsion_census(&one_three);
        for (p, &a) in census.alpha.iter().enumerate() {
            assert_eq!(a, complex.dim(p as i64));
            assert_eq!(a + census.beta[p], one_three.level(p).len());
        }
    }

    #[test]
    fn cells_report_stabilizers() {
        let catalog = enumerate_all(1, 2).unwrap();
        for (r, e) in catalog.iter() {
            let cell = Cell::new(&catalog, r);
            assert_eq!(cell.alternating, !e.odd_automorphism);
            assert_eq!(cell.labeling.len(), r.dim + 1);
            assert!(cell.stabilizer.contains(&cell.labeling));
        }
    }

    #[test]
    fn repeated_marking_subcomplex_of_one_three() {
        let catalog = enumerate_all(1, 3).unwrap();
        let rep = repeated_marking_subcomplex(&catalog).unwrap();
        let missing: Vec<_> = catalog
            .iter()
            .filter(|(_, e)| rep.lookup(&e.key).is_none())
            .map(|(_, e)| e.graph.clone())
            .collect();
        // outside: graphs with injective marking; the triangle and the
        // contractions of it that still separate the markings
        assert!(missing.iter().all(|g| !g.has_repeated_marking()));
        let triangle = crate::MarkedWeightedGraph::new(vec![0; 3], &[(0, 1), (1, 2), (2, 0)], vec![0, 1, 2]).unwrap();
        assert!(missing
            .iter()
            .any(|g| iso::canonicalize(g).0 == iso::canonicalize(&triangle).0));
    }

    #[test]
    fn trivial_predicate_is_identity() {
        let catalog = enumerate_all(1, 3).unwrap();
        let all = subcomplex(&catalog, |_| true).unwrap();
        assert_eq!(all.class_counts(), catalog.class_counts());
    }

    #[test]
    fn single_marking_has_empty_repeated_subcomplex() {
        let rep = repeated_marking_subcomplex(&enumerate_all(1, 1).unwrap()).unwrap();
        assert!(rep.is_empty());
        let rep = repeated_marking_subcomplex(&enumerate_all(2, 1).unwrap()).unwrap();
        assert!(rep.is_empty());
    }

    #[test]
    fn non_closed_predicate_is_rejected() {
        let catalog = enumerate_all(1, 3).unwrap();
        // keep only top cells: their faces are excluded
        let err = subcomplex(&catalog, |e| e.graph.num_edges() == 3).unwrap_err();
        assert!(matches!(err, Error::ClosureViolation { .. }));
    }

    #[test]
    fn faces_commute() {
        let catalog = enumerate_all(1, 4).unwrap();
        let cells: Vec<_> = catalog.iter().map(|(r, _)| r).collect();
        assert_eq!(face_coherence_mismatch(&catalog, &cells), None);
    }
}
