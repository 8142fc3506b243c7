//! Small permutation helpers. A permutation of `0..k` is stored as the image
//! vector `p`, with `p[i]` the image of `i`.

use std::collections::{HashSet, VecDeque};

/// `+1` for even permutations, `-1` for odd ones.
pub fn sign(p: &[usize]) -> i8 {
    let mut seen = vec![false; p.len()];
    let mut transpositions = 0usize;
    for start in 0..p.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = p[i];
            len += 1;
        }
        transpositions += len - 1;
    }
    if transpositions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `first` then `second`: `i ↦ second[first[i]]`.
pub fn then(first: &[usize], second: &[usize]) -> Vec<usize> {
    first.iter().map(|&i| second[i]).collect()
}

pub fn inverse(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &j) in p.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

pub fn identity(k: usize) -> Vec<usize> {
    (0..k).collect()
}

pub fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    for &i in p {
        if i >= p.len() || seen[i] {
            return false;
        }
        seen[i] = true;
    }
    true
}

/// Cycle type as a partition, parts in non-increasing order.
pub fn cycle_type(p: &[usize]) -> Vec<u32> {
    let mut seen = vec![false; p.len()];
    let mut parts = Vec::new();
    for start in 0..p.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = p[i];
            len += 1;
        }
        parts.push(len);
    }
    parts.sort_unstable_by(|a, b| b.cmp(a));
    parts
}

/// All elements of the group generated by `generators`, sorted.
pub fn closure(degree: usize, generators: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let id = identity(degree);
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(id.clone());
    queue.push_back(id);
    while let Some(x) = queue.pop_front() {
        for g in generators {
            let y = then(&x, g);
            if seen.insert(y.clone()) {
                queue.push_back(y);
            }
        }
    }
    let mut all: Vec<_> = seen.into_iter().collect();
    all.sort();
    all
}

/// Visits every permutation of `0..k` in lexicographic order.
pub fn for_each_permutation(k: usize, mut f: impl FnMut(&[usize])) {
    let mut p = identity(k);
    loop {
        f(&p);
        // next lexicographic permutation
        let Some(i) = (1..k).rev().find(|&i| p[i - 1] < p[i]) else {
            return;
        };
        let j = (i..k).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}
