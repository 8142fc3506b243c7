//! Symmetric-group actions on the cells: traces of marking permutations,
//! the equivariant Euler characteristic, and the characters compared against
//! it.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::enumerate::{enumerate_all, GraphCatalog};
use crate::error::{Error, Result};
use crate::iso;
use crate::perm;

/// A partition as non-increasing parts.
pub type Partition = Vec<u32>;

/// Partitions of `n` in ascending lexicographic order, `1^n` first.
pub fn partitions(n: u32) -> Vec<Partition> {
    fn go(remaining: u32, max: u32, acc: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(acc.clone());
            return;
        }
        for part in (1..=remaining.min(max)).rev() {
            acc.push(part);
            go(remaining - part, part, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out.sort();
    out
}

pub fn partition_label(p: &[u32]) -> String {
    if p.is_empty() {
        return "0".into();
    }
    p.iter().map(u32::to_string).collect::<Vec<_>>().join("+")
}

fn factorial(n: u32) -> i64 {
    (1..=n as i64).product()
}

/// Size of the conjugacy class of cycle type `p`: `n! / z_p`.
pub fn class_size(p: &[u32]) -> i64 {
    let n: u32 = p.iter().sum();
    let mut multiplicities: BTreeMap<u32, u32> = BTreeMap::new();
    for &part in p {
        *multiplicities.entry(part).or_default() += 1;
    }
    let z: i64 = multiplicities
        .iter()
        .map(|(&part, &m)| (part as i64).pow(m) * factorial(m))
        .product();
    factorial(n) / z
}

/// A permutation of `0..n` with cycle type `p`, built from consecutive cycles.
pub fn class_representative(p: &[u32]) -> Vec<usize> {
    let n: u32 = p.iter().sum();
    let mut sigma = vec![0; n as usize];
    let mut start = 0;
    for &part in p {
        let part = part as usize;
        for i in 0..part {
            sigma[start + i] = start + (i + 1) % part;
        }
        start += part;
    }
    sigma
}

/// An integer-valued function on the conjugacy classes of `S_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassFunction {
    n: u32,
    values: BTreeMap<Partition, i64>,
}

impl ClassFunction {
    /// Evaluates `f` on every class.
    pub fn from_fn(n: u32, mut f: impl FnMut(&[u32]) -> i64) -> Self {
        let values = partitions(n).into_iter().map(|p| (p.clone(), f(&p))).collect();
        ClassFunction { n, values }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn get(&self, p: &[u32]) -> Option<i64> {
        self.values.get(p).copied()
    }

    /// Value at the identity.
    pub fn degree(&self) -> i64 {
        self.values[&vec![1; self.n as usize]]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Partition, i64)> {
        self.values.iter().map(|(p, &v)| (p, v))
    }

    pub fn scaled(&self, c: i64) -> Self {
        ClassFunction {
            n: self.n,
            values: self.values.iter().map(|(p, &v)| (p.clone(), c * v)).collect(),
        }
    }

    /// `(1/n!) Σ_σ a(σ) b(σ)`; characters are real so no conjugation.
    pub fn inner_product(&self, other: &ClassFunction) -> Ratio<i64> {
        assert_eq!(self.n, other.n, "class functions on different groups");
        let sum: i64 = self
            .values
            .iter()
            .map(|(p, &a)| class_size(p) * a * other.values[p])
            .sum();
        Ratio::new(sum, factorial(self.n))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("class functions serialize")
    }
}

struct Values<'a>(&'a BTreeMap<Partition, i64>);

impl Serialize for Values<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (p, v) in self.0 {
            map.serialize_entry(&partition_label(p), v)?;
        }
        map.end()
    }
}

impl Serialize for ClassFunction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ClassFunction", 2)?;
        st.serialize_field("n", &self.n)?;
        st.serialize_field("values", &Values(&self.values))?;
        st.end()
    }
}

impl fmt::Display for ClassFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self
            .values
            .keys()
            .map(|p| partition_label(p).len())
            .max()
            .unwrap_or(1)
            .max(5);
        for (i, (p, v)) in self.values.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{:>width$}  {v:>8}", partition_label(p))?;
        }
        Ok(())
    }
}

/// Text table with one row per named class function and one column per
/// conjugacy class.
pub fn character_table(rows: &[(&str, &ClassFunction)]) -> String {
    let Some((_, first)) = rows.first() else {
        return String::new();
    };
    let labels: Vec<String> = first.values.keys().map(|p| partition_label(p)).collect();
    let name_width = rows.iter().map(|(name, _)| name.len()).max().unwrap_or(0);
    let mut widths: Vec<usize> = labels.iter().map(String::len).collect();
    for (_, f) in rows {
        for (w, v) in widths.iter_mut().zip(f.values.values()) {
            *w = (*w).max(v.to_string().len());
        }
    }
    let mut out = format!("{:name_width$}", "");
    for (l, w) in labels.iter().zip(&widths) {
        out += &format!("  {l:>w$}");
    }
    for (name, f) in rows {
        out += &format!("\n{name:name_width$}");
        for (v, w) in f.values.values().zip(&widths) {
            out += &format!("  {v:>w$}");
        }
    }
    out
}

/// Trace of the marking permutation `sigma` on the rational chains of
/// degree `p`. `sigma[i]` is the new label of marking `i`.
pub fn action_trace(catalog: &GraphCatalog, p: usize, sigma: &[usize]) -> Result<i64> {
    if sigma.len() != catalog.n() as usize || !perm::is_permutation(sigma) {
        return Err(Error::InvalidArgument(format!(
            "expected a permutation of {} markings",
            catalog.n()
        )));
    }
    catalog
        .level(p)
        .par_iter()
        .filter(|e| !e.odd_automorphism)
        .map(|entry| -> Result<i64> {
            let moved = entry.graph.permute_markings(sigma)?;
            let (key, iso) = iso::canonicalize(&moved);
            Ok(if key == entry.key { iso.sign as i64 } else { 0 })
        })
        .sum()
}

/// `ẽ(σ) = Σ_p (-1)^p tr(σ | C_p) - 1`, evaluated on every conjugacy class.
pub fn equivariant_euler_of(catalog: &GraphCatalog) -> Result<ClassFunction> {
    let n = catalog.n();
    let classes = partitions(n);
    let degrees = catalog.levels().len();
    let traces: Vec<((usize, usize), i64)> = (0..classes.len())
        .flat_map(|c| (0..degrees).map(move |p| (c, p)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(c, p)| Ok(((c, p), action_trace(catalog, p, &class_representative(&classes[c]))?)))
        .collect::<Result<_>>()?;
    let mut values = vec![-1i64; classes.len()];
    for ((c, p), t) in traces {
        values[c] += if p % 2 == 0 { t } else { -t };
    }
    Ok(ClassFunction {
        n,
        values: classes.into_iter().zip(values).collect(),
    })
}

pub fn equivariant_euler(g: u32, n: u32) -> Result<ClassFunction> {
    equivariant_euler_of(&enumerate_all(g, n)?)
}

/// Character of the top reduced homology of the genus-one complex, read off
/// the equivariant Euler characteristic.
pub fn top_homology_character_of(catalog: &GraphCatalog) -> Result<ClassFunction> {
    let n = catalog.n();
    if catalog.g() != 1 || n < 3 {
        return Err(Error::InvalidArgument(format!(
            "top homology character needs genus 1 and n >= 3, got ({}, {n})",
            catalog.g()
        )));
    }
    let euler = equivariant_euler_of(catalog)?;
    Ok(euler.scaled(if n % 2 == 1 { 1 } else { -1 }))
}

pub fn top_homology_character(n: u32) -> Result<ClassFunction> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "top homology character needs n >= 3, got {n}"
        )));
    }
    top_homology_character_of(&enumerate_all(1, n)?)
}

/// Elements of the dihedral group acting on the vertices `0..n` of an
/// n-gon, each with the sign of its action on the edges `{j, j+1}`.
fn dihedral_elements(n: usize) -> HashMap<Vec<usize>, i64> {
    let edge_index = |a: usize, b: usize| -> usize {
        if (a + 1) % n == b {
            a
        } else {
            b
        }
    };
    let mut out = HashMap::new();
    for k in 0..n {
        for reflect in [false, true] {
            let vertex: Vec<usize> = (0..n)
                .map(|i| if reflect { (n - 1 - i + k) % n } else { (i + k) % n })
                .collect();
            let edge: Vec<usize> = (0..n).map(|j| edge_index(vertex[j], vertex[(j + 1) % n])).collect();
            out.insert(vertex, perm::sign(&edge) as i64);
        }
    }
    out
}

/// Character of the representation induced from the dihedral group (acting
/// on polygon vertices) of the sign of its action on polygon edges.
pub fn dihedral_character(n: u32) -> Result<ClassFunction> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!(
            "dihedral character needs n >= 3, got {n}"
        )));
    }
    let d = dihedral_elements(n as usize);
    let order = d.len() as i64;
    let classes = partitions(n);
    let values: Vec<i64> = classes
        .par_iter()
        .map(|c| {
            let sigma = class_representative(c);
            let mut sum = 0;
            perm::for_each_permutation(n as usize, |x| {
                // x⁻¹ σ x
                let conj = perm::then(&perm::then(x, &sigma), &perm::inverse(x));
                if let Some(s) = d.get(&conj) {
                    sum += s;
                }
            });
            assert_eq!(sum % order, 0, "induced character is integral");
            sum / order
        })
        .collect();
    Ok(ClassFunction {
        n,
        values: classes.into_iter().zip(values).collect(),
    })
}

/// `χ^λ(μ)` by the Murnaghan–Nakayama rule on beta-sets.
pub fn irreducible_value(lambda: &[u32], mu: &[u32]) -> i64 {
    let l = lambda.len();
    let beta: Vec<i64> = lambda
        .iter()
        .enumerate()
        .map(|(i, &x)| x as i64 + (l - 1 - i) as i64)
        .collect();
    mn(beta, mu)
}

fn mn(beta: Vec<i64>, mu: &[u32]) -> i64 {
    let Some((&k, rest)) = mu.split_first() else {
        return 1;
    };
    let k = k as i64;
    let mut total = 0;
    for (i, &b) in beta.iter().enumerate() {
        let target = b - k;
        if target < 0 || beta.contains(&target) {
            continue;
        }
        let crossed = beta.iter().filter(|&&x| x > target && x < b).count();
        let mut next = beta.clone();
        next[i] = target;
        let term = mn(next, rest);
        total += if crossed % 2 == 0 { term } else { -term };
    }
    total
}

pub fn irreducible_character(lambda: &[u32]) -> ClassFunction {
    let n = lambda.iter().sum();
    ClassFunction::from_fn(n, |mu| irreducible_value(lambda, mu))
}

/// Multiplicity of every irreducible in `chi`, keyed by partition.
pub fn decompose(chi: &ClassFunction) -> Vec<(Partition, Ratio<i64>)> {
    partitions(chi.n())
        .into_iter()
        .map(|lambda| {
            let m = irreducible_character(&lambda).inner_product(chi);
            (lambda, m)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_counts_and_order() {
        let counts: Vec<usize> = (1..=8).map(|n| partitions(n).len()).collect();
        assert_eq!(counts, vec![1, 2, 3, 5, 7, 11, 15, 22]);
        assert_eq!(partitions(3), vec![vec![1, 1, 1], vec![2, 1], vec![3]]);
        assert_eq!(partition_label(&[3, 1, 1]), "3+1+1");
    }

    #[test]
    fn class_sizes_sum_to_factorial() {
        for n in 1..=8 {
            let total: i64 = partitions(n).iter().map(|p| class_size(p)).sum();
            assert_eq!(total, factorial(n));
        }
    }

    #[test]
    fn representatives_have_their_cycle_type() {
        for p in partitions(6) {
            assert_eq!(perm::cycle_type(&class_representative(&p)), p);
        }
    }

    #[test]
    fn irreducibles_are_orthonormal() {
        for n in 1..=6 {
            let chars: Vec<_> = partitions(n).iter().map(|l| irreducible_character(l)).collect();
            for (i, a) in chars.iter().enumerate() {
                for (j, b) in chars.iter().enumerate() {
                    let expected = if i == j { 1 } else { 0 };
                    assert_eq!(a.inner_product(b), Ratio::from_integer(expected));
                }
            }
        }
    }

    #[test]
    fn small_irreducibles() {
        // sign character of S_3
        let sign = irreducible_character(&[1, 1, 1]);
        assert_eq!(sign.get(&[2, 1]), Some(-1));
        assert_eq!(sign.get(&[3]), Some(1));
        // standard representation of S_4
        let std = irreducible_character(&[3, 1]);
        assert_eq!(std.degree(), 3);
        assert_eq!(std.get(&[2, 2]), Some(-1));
        assert_eq!(irreducible_character(&[4, 2]).degree(), 9);
    }

    #[test]
    fn dihedral_three() {
        let chi = dihedral_character(3).unwrap();
        let values: Vec<i64> = chi.iter().map(|(_, v)| v).collect();
        assert_eq!(values, vec![1, -1, 1]);
    }

    #[test]
    fn dihedral_degrees() {
        for n in 3..=7 {
            let expected = factorial(n - 1) / 2;
            assert_eq!(dihedral_character(n).unwrap().degree(), expected);
        }
    }

    #[test]
    fn square_diagonal_reflection_is_even_on_edges() {
        // swap vertices 1 and 3 of the square 0-1-2-3
        let d = dihedral_elements(4);
        assert_eq!(d[&vec![0, 3, 2, 1]], 1);
        // reflection through edge midpoints is odd on edges
        assert_eq!(d[&vec![1, 0, 3, 2]], -1);
    }

    #[test]
    fn trace_at_identity_is_alpha() {
        let catalog = enumerate_all(1, 4).unwrap();
        let census = crate::complex::torsion_census(&catalog);
        for p in 0..catalog.levels().len() {
            assert_eq!(
                action_trace(&catalog, p, &[0, 1, 2, 3]).unwrap(),
                census.alpha[p] as i64
            );
        }
    }

    #[test]
    fn rotating_the_triangle() {
        let catalog = enumerate_all(1, 3).unwrap();
        assert_eq!(action_trace(&catalog, 2, &[1, 2, 0]).unwrap(), 1);
        assert!(action_trace(&catalog, 2, &[1, 0]).is_err());
    }

    #[test]
    fn euler_examples() {
        assert_eq!(equivariant_euler(1, 3).unwrap().degree(), 1);
        assert!(equivariant_euler(1, 2).unwrap().iter().all(|(_, v)| v == 0));
        assert_eq!(equivariant_euler(0, 4).unwrap().degree(), 2);
    }

    #[test]
    fn top_character_examples() {
        let three = top_homology_character(3).unwrap();
        assert_eq!(three.degree(), 1);
        assert_eq!(three.get(&[2, 1]), Some(-1));
        assert_eq!(top_homology_character(4).unwrap().degree(), 3);
        assert!(top_homology_character(2).is_err());
    }

    #[test]
    fn json_keys_are_partition_strings() {
        let json = dihedral_character(3).unwrap().to_json();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["values"]["2+1"], -1);
        assert_eq!(v["n"], 3);
        let first = json.find("1+1+1").unwrap();
        assert!(first < json.find("\"3\"").unwrap());
    }

    #[test]
    fn table_has_a_row_per_function() {
        let a = dihedral_character(3).unwrap();
        let text = character_table(&[("homology", &a), ("dihedral", &a)]);
        assert_eq!(text.lines().count(), 3);
        assert!(text.lines().next().unwrap().contains("1+1+1"));
    }
}
