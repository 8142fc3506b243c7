//! Sparse integer matrices and their exact rank over the rationals.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::io::{BufRead, Write};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Column-major sparse matrix with `i64` entries. Each column is sorted by
/// row and holds no explicit zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    columns: Vec<Vec<(usize, i64)>>,
}

impl SparseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix {
            rows,
            cols,
            columns: vec![Vec::new(); cols],
        }
    }

    /// Sums duplicate positions and drops zeros.
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, i64)]) -> Result<Self> {
        let mut m = SparseMatrix::zeros(rows, cols);
        for &(i, j, v) in triplets {
            if i >= rows || j >= cols {
                return Err(Error::InvalidArgument(format!(
                    "entry ({i}, {j}) outside a {rows}x{cols} matrix"
                )));
            }
            m.columns[j].push((i, v));
        }
        for col in &mut m.columns {
            *col = normalize(std::mem::take(col));
        }
        Ok(m)
    }

    /// Builds a matrix from per-column entry lists (any order, duplicates summed).
    pub fn from_columns(rows: usize, columns: Vec<Vec<(usize, i64)>>) -> Self {
        let cols = columns.len();
        let columns = columns
            .into_iter()
            .map(|c| {
                debug_assert!(c.iter().all(|&(i, _)| i < rows));
                normalize(c)
            })
            .collect();
        SparseMatrix { rows, cols, columns }
    }

    pub fn from_dense(dense: &[Vec<i64>]) -> Self {
        let rows = dense.len();
        let cols = dense.first().map_or(0, Vec::len);
        let columns = (0..cols)
            .map(|j| {
                (0..rows)
                    .filter(|&i| dense[i][j] != 0)
                    .map(|i| (i, dense[i][j]))
                    .collect()
            })
            .collect();
        SparseMatrix { rows, cols, columns }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn column(&self, j: usize) -> &[(usize, i64)] {
        &self.columns[j]
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.columns[j]
            .binary_search_by_key(&i, |&(r, _)| r)
            .map_or(0, |k| self.columns[j][k].1)
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(Vec::is_empty)
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut d = vec![vec![0; self.cols]; self.rows];
        for (j, col) in self.columns.iter().enumerate() {
            for &(i, v) in col {
                d[i][j] = v;
            }
        }
        d
    }

    /// Triplets `(row, col, value)` in column-major order, 0-based.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        self.columns
            .iter()
            .enumerate()
            .flat_map(|(j, c)| c.iter().map(move |&(i, v)| (i, j, v)))
    }

    /// `self * rhs`. Fails on `i64` overflow.
    pub fn mul(&self, rhs: &SparseMatrix) -> Result<SparseMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::InvalidArgument("matrix shapes do not compose".into()));
        }
        let overflow = || Error::Integrity("overflow in matrix product".into());
        let mut columns = Vec::with_capacity(rhs.cols);
        for col in &rhs.columns {
            let mut acc: Vec<(usize, i64)> = Vec::new();
            for &(k, b) in col {
                for &(i, a) in &self.columns[k] {
                    acc.push((i, a.checked_mul(b).ok_or_else(overflow)?));
                }
            }
            acc.sort_unstable_by_key(|&(i, _)| i);
            let mut merged: Vec<(usize, i64)> = Vec::new();
            for (i, v) in acc {
                match merged.last_mut() {
                    Some((j, w)) if *j == i => *w = w.checked_add(v).ok_or_else(overflow)?,
                    _ => merged.push((i, v)),
                }
            }
            merged.retain(|&(_, v)| v != 0);
            columns.push(merged);
        }
        Ok(SparseMatrix {
            rows: self.rows,
            cols: rhs.cols,
            columns,
        })
    }

    /// Writes the triplet format: `rows cols`, then 1-based `i j value`
    /// lines, then `0 0 0`.
    pub fn write_triplets<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{} {}", self.rows, self.cols)?;
        for (i, j, v) in self.triplets() {
            writeln!(w, "{} {} {}", i + 1, j + 1, v)?;
        }
        writeln!(w, "0 0 0")
    }

    pub fn read_triplets<R: BufRead>(r: R) -> Result<Self> {
        let bad = |msg: &str| Error::Format(format!("triplet file: {msg}"));
        let mut lines = r.lines();
        let header = lines.next().ok_or_else(|| bad("missing header"))??;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad("header is not two integers")))
            .collect::<Result<_>>()?;
        let [rows, cols] = dims[..] else {
            return Err(bad("header is not two integers"));
        };
        let mut triplets = Vec::new();
        for line in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let [i, j, v] = parts[..] else {
                return Err(bad("entry line is not three integers"));
            };
            let i: usize = i.parse().map_err(|_| bad("bad row index"))?;
            let j: usize = j.parse().map_err(|_| bad("bad column index"))?;
            let v: i64 = v.parse().map_err(|_| bad("bad value"))?;
            if i == 0 && j == 0 && v == 0 {
                return SparseMatrix::from_triplets(rows, cols, &triplets);
            }
            if i == 0 || j == 0 {
                return Err(bad("indices are 1-based"));
            }
            triplets.push((i - 1, j - 1, v));
        }
        Err(bad("missing terminator"))
    }
}

fn normalize(mut col: Vec<(usize, i64)>) -> Vec<(usize, i64)> {
    col.sort_unstable_by_key(|&(i, _)| i);
    let mut out: Vec<(usize, i64)> = Vec::with_capacity(col.len());
    for (i, v) in col {
        match out.last_mut() {
            Some((j, w)) if *j == i => *w += v,
            _ => out.push((i, v)),
        }
    }
    out.retain(|&(_, v)| v != 0);
    out
}

/// Coefficient arithmetic for the elimination. `combine` returns `None` on
/// overflow so the caller can retry with big integers.
trait Scalar: Clone {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn is_unit(&self) -> bool;
    /// `a * x - b * y`
    fn combine(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self>;
    /// Divides the vector by the gcd of its entries, if that is meaningful.
    fn make_primitive(values: &mut [(usize, Self)]);
}

impl Scalar for i64 {
    fn zero() -> Self {
        0
    }

    fn is_zero(&self) -> bool {
        *self == 0
    }

    fn is_unit(&self) -> bool {
        *self == 1 || *self == -1
    }

    fn combine(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self> {
        a.checked_mul(*x)?.checked_sub(b.checked_mul(*y)?)
    }

    fn make_primitive(values: &mut [(usize, Self)]) {
        let g = values.iter().fold(0i64, |g, &(_, v)| g.gcd(&v));
        if g > 1 {
            for (_, v) in values.iter_mut() {
                *v /= g;
            }
        }
    }
}

impl Scalar for BigInt {
    fn zero() -> Self {
        <BigInt as Zero>::zero()
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }

    fn is_unit(&self) -> bool {
        self.abs().is_one()
    }

    fn combine(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self> {
        Some(a * x - b * y)
    }

    fn make_primitive(values: &mut [(usize, Self)]) {
        let g = values.iter().fold(<BigInt as Zero>::zero(), |g, (_, v)| g.gcd(v));
        if g > BigInt::one() {
            for (_, v) in values.iter_mut() {
                *v = &*v / &g;
            }
        }
    }
}

/// 62-bit prime used by [`rank_mod_p`].
pub const MODULUS: u64 = 4_611_686_018_427_387_847;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct ModP(u64);

impl Scalar for ModP {
    fn zero() -> Self {
        ModP(0)
    }

    fn is_zero(&self) -> bool {
        self.0 == 0
    }

    fn is_unit(&self) -> bool {
        self.0 != 0
    }

    fn combine(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self> {
        let p = MODULUS as u128;
        let ax = a.0 as u128 * x.0 as u128 % p;
        let by = b.0 as u128 * y.0 as u128 % p;
        Some(ModP(((ax + p - by) % p) as u64))
    }

    fn make_primitive(_: &mut [(usize, Self)]) {}
}

/// Exact rank over the rationals.
///
/// Structured elimination on the columns: the sparsest remaining column is
/// taken as pivot, with the pivot row chosen to minimize fill (unit entries
/// preferred), and each updated column is `a·col − b·pivot` divided by its
/// content, so no fractions appear. Runs in `i64` and restarts with big
/// integers if an intermediate overflows.
pub fn rank(m: &SparseMatrix) -> usize {
    let small: Vec<Vec<(usize, i64)>> = m.columns.clone();
    if let Some(r) = eliminate(m.rows, small) {
        return r;
    }
    let big = m
        .columns
        .iter()
        .map(|c| c.iter().map(|&(i, v)| (i, BigInt::from(v))).collect())
        .collect();
    eliminate(m.rows, big).expect("big-integer elimination cannot overflow")
}

/// Rank modulo [`MODULUS`]; a lower bound for the rational rank.
pub fn rank_mod_p(m: &SparseMatrix) -> usize {
    let p = MODULUS as i128;
    let cols = m
        .columns
        .iter()
        .map(|c| {
            c.iter()
                .map(|&(i, v)| (i, ModP((v as i128).rem_euclid(p) as u64)))
                .filter(|(_, x)| x.0 != 0)
                .collect()
        })
        .collect();
    eliminate(m.rows, cols).expect("modular elimination cannot overflow")
}

fn eliminate<T: Scalar>(rows: usize, mut cols: Vec<Vec<(usize, T)>>) -> Option<usize> {
    let mut alive = vec![true; cols.len()];
    let mut row_occ: Vec<Vec<usize>> = vec![Vec::new(); rows];
    let mut heap = BinaryHeap::new();
    for (j, c) in cols.iter().enumerate() {
        for &(i, _) in c {
            row_occ[i].push(j);
        }
        heap.push(Reverse((c.len(), j)));
    }

    let mut rank = 0;
    while let Some(Reverse((len, j))) = heap.pop() {
        if !alive[j] || cols[j].len() != len {
            continue;
        }
        alive[j] = false;
        if cols[j].is_empty() {
            continue;
        }
        let pivot = std::mem::take(&mut cols[j]);
        // cheapest row: fewest other columns touching it, units first
        let (k, _) = pivot
            .iter()
            .enumerate()
            .min_by_key(|(_, (i, v))| (!v.is_unit(), row_occ[*i].len()))
            .unwrap();
        let (prow, a) = pivot[k].clone();
        rank += 1;

        for other in std::mem::take(&mut row_occ[prow]) {
            if !alive[other] {
                continue;
            }
            let Ok(pos) = cols[other].binary_search_by_key(&prow, |(i, _)| *i) else {
                continue;
            };
            let b = cols[other][pos].1.clone();
            let target = std::mem::take(&mut cols[other]);
            let mut merged = Vec::with_capacity(target.len() + pivot.len());
            let (mut x, mut y) = (0, 0);
            while x < target.len() || y < pivot.len() {
                let tx = target.get(x).map(|(i, _)| *i).unwrap_or(usize::MAX);
                let py = pivot.get(y).map(|(i, _)| *i).unwrap_or(usize::MAX);
                if tx < py {
                    let (i, v) = &target[x];
                    let scaled = T::combine(&a, v, &b, &T::zero())?;
                    merged.push((*i, scaled));
                    x += 1;
                } else if py < tx {
                    let (i, v) = &pivot[y];
                    let scaled = T::combine(&a, &T::zero(), &b, v)?;
                    if !scaled.is_zero() {
                        row_occ[*i].push(other);
                    }
                    merged.push((*i, scaled));
                    y += 1;
                } else {
                    let value = T::combine(&a, &target[x].1, &b, &pivot[y].1)?;
                    merged.push((tx, value));
                    x += 1;
                    y += 1;
                }
            }
            merged.retain(|(_, v)| !v.is_zero());
            T::make_primitive(&mut merged);
            let new_len = merged.len();
            cols[other] = merged;
            heap.push(Reverse((new_len, other)));
        }
    }
    Some(rank)
}
