//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any blocking criterion fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use tropicell::complex::{
    build_complex, face_coherence_mismatch, repeated_marking_subcomplex, torsion_census, ChainComplex,
};
use tropicell::enumerate::{enumerate_all, ClassRef, GraphCatalog};
use tropicell::equivariant::{action_trace, decompose, dihedral_character, partition_label, top_homology_character_of};
use tropicell::homology::{betti, BettiTable};
use tropicell::oracle::{bottom_up_classes, dense_rank_of};
use tropicell::sparse::rank;
use tropicell::{canonicalize, Result};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
enum Which {
    Full,
    Rep,
}

#[derive(Default)]
struct Ctx {
    catalogs: BTreeMap<(u32, u32), GraphCatalog>,
    complexes: BTreeMap<(u32, u32, Which), ChainComplex>,
    tables: BTreeMap<(u32, u32, Which), BettiTable>,
}

impl Ctx {
    fn catalog(&mut self, g: u32, n: u32) -> Result<&GraphCatalog> {
        if let std::collections::btree_map::Entry::Vacant(slot) = self.catalogs.entry((g, n)) {
            slot.insert(enumerate_all(g, n)?);
        }
        Ok(&self.catalogs[&(g, n)])
    }

    fn table(&mut self, g: u32, n: u32, which: Which) -> Result<&BettiTable> {
        let key = (g, n, which);
        if !self.tables.contains_key(&key) {
            let catalog = self.catalog(g, n)?;
            let complex = match which {
                Which::Full => build_complex(catalog, true)?,
                Which::Rep => build_complex(&repeated_marking_subcomplex(catalog)?, true)?,
            };
            let table = betti(&complex)?;
            self.complexes.insert(key, complex);
            self.tables.insert(key, table);
        }
        Ok(&self.tables[&key])
    }

    /// Full complexes computed so far with genus at least one.
    fn computed_positive_genus(&self) -> Vec<(u32, u32)> {
        self.tables
            .keys()
            .filter(|(g, _, w)| *g >= 1 && *w == Which::Full)
            .map(|&(g, n, _)| (g, n))
            .collect()
    }
}

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

fn nonzero(t: &BettiTable) -> Vec<(i64, usize)> {
    t.rows
        .iter()
        .filter(|r| r.betti > 0)
        .map(|r| (r.degree, r.betti))
        .collect()
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(failures: Vec<String>, ok_detail: String) -> Outcome {
    if failures.is_empty() {
        Outcome {
            passed: true,
            detail: ok_detail,
        }
    } else {
        Outcome {
            passed: false,
            detail: failures.join("; "),
        }
    }
}

fn genus_one_wedges(ctx: &mut Ctx, ns: &[u32]) -> Result<Outcome> {
    let mut failures = Vec::new();
    let mut seen = Vec::new();
    for &n in ns {
        let expected = vec![(n as i64 - 1, (factorial(n as u64 - 1) / 2) as usize)];
        let got = nonzero(ctx.table(1, n, Which::Full)?);
        if got != expected {
            failures.push(format!("n={n}: expected {expected:?}, got {got:?}"));
        }
        seen.push(format!("n={n}: {got:?}"));
    }
    Ok(outcome(failures, seen.join(", ")))
}

fn criterion_1(ctx: &mut Ctx) -> Result<Outcome> {
    genus_one_wedges(ctx, &[3, 4, 5, 6])
}

fn stretch(ctx: &mut Ctx) -> Result<Outcome> {
    genus_one_wedges(ctx, &[7])
}

fn criterion_2(ctx: &mut Ctx) -> Result<Outcome> {
    let mut failures = Vec::new();
    let cells = ctx.catalog(1, 1)?.len();
    if cells != 1 {
        failures.push(format!("Δ_{{1,1}} has {cells} cells"));
    }
    for n in [1, 2] {
        let got = nonzero(ctx.table(1, n, Which::Full)?);
        if !got.is_empty() {
            failures.push(format!("Δ_{{1,{n}}}: {got:?}"));
        }
    }
    Ok(outcome(failures, format!("Δ_{{1,1}} has {cells} cell; both acyclic")))
}

fn criterion_3(ctx: &mut Ctx) -> Result<Outcome> {
    let mut failures = Vec::new();
    let mut seen = Vec::new();
    for n in [5u32, 6, 7] {
        let got = nonzero(ctx.table(0, n, Which::Full)?);
        let rank = factorial(n as u64 - 2) as usize;
        if got.len() != 1 || got[0].1 != rank {
            failures.push(format!("n={n}: expected a single rank {rank}, got {got:?}"));
        }
        seen.push(format!("n={n}: {got:?}"));
    }
    Ok(outcome(failures, seen.join(", ")))
}

fn criterion_4(ctx: &mut Ctx) -> Result<Outcome> {
    let mut failures = Vec::new();
    let cases = [(1, 2), (1, 3), (1, 4), (1, 5), (2, 2), (2, 3)];
    for (g, n) in cases {
        let got = nonzero(ctx.table(g, n, Which::Rep)?);
        if !got.is_empty() {
            failures.push(format!("({g},{n}): {got:?}"));
        }
    }
    Ok(outcome(failures, format!("{} subcomplexes acyclic", cases.len())))
}

fn criterion_5(ctx: &mut Ctx) -> Result<Outcome> {
    for n in 1..=6 {
        ctx.table(1, n, Which::Full)?;
    }
    for n in 0..=3 {
        ctx.table(2, n, Which::Full)?;
    }
    let mut bounds: Vec<(u32, u32, i64)> = Vec::new();
    bounds.extend((4..=6).map(|n| (1, n, n as i64 - 2)));
    bounds.extend((2..=3).map(|n| (2, n, n as i64)));
    bounds.extend(
        ctx.computed_positive_genus()
            .into_iter()
            .map(|(g, n)| (g, n, n as i64 - 3)),
    );
    let mut failures = Vec::new();
    for &(g, n, top) in &bounds {
        let bad: Vec<_> = nonzero(ctx.table(g, n, Which::Full)?)
            .into_iter()
            .filter(|&(d, _)| d <= top)
            .collect();
        if !bad.is_empty() {
            failures.push(format!("({g},{n}) through degree {top}: {bad:?}"));
        }
    }
    Ok(outcome(failures, format!("{} vanishing bounds hold", bounds.len())))
}

fn criterion_6(ctx: &mut Ctx) -> Result<Outcome> {
    let params = ctx.computed_positive_genus();
    let mut failures = Vec::new();
    for &(g, n) in &params {
        let (lo, hi) = (2 * g as i64 - 3 + n as i64, 3 * g as i64 - 4 + n as i64);
        let outside: Vec<_> = nonzero(ctx.table(g, n, Which::Full)?)
            .into_iter()
            .filter(|&(k, _)| k < lo || k > hi)
            .collect();
        if !outside.is_empty() {
            failures.push(format!("({g},{n}) outside [{lo},{hi}]: {outside:?}"));
        }
    }
    Ok(outcome(
        failures,
        format!("{} complexes supported in their windows", params.len()),
    ))
}

fn criterion_7(ctx: &mut Ctx) -> Result<Outcome> {
    let mut failures = Vec::new();
    for n in 3..=6 {
        let h = top_homology_character_of(ctx.catalog(1, n)?)?;
        let d = dihedral_character(n)?;
        if h != d {
            let differ: Vec<String> = h
                .iter()
                .zip(d.iter())
                .filter(|((_, a), (_, b))| a != b)
                .map(|((p, a), (_, b))| format!("{}: {a} vs {b}", partition_label(p)))
                .collect();
            failures.push(format!("n={n}: {}", differ.join(", ")));
        }
    }
    Ok(outcome(failures, "equal on every class for n = 3..6".into()))
}

fn criterion_8(ctx: &mut Ctx) -> Result<Outcome> {
    let mut failures = Vec::new();
    let mut notes = Vec::new();
    let mut rng = StdRng::seed_from_u64(20);

    // boundary squared, over every complex built by the suite
    let mut bad = Vec::new();
    for (key, complex) in &ctx.complexes {
        if !complex.boundary_squared_failures()?.is_empty() {
            bad.push(format!("{key:?}"));
        }
    }
    if !bad.is_empty() {
        failures.push(format!("∂² ≠ 0 in {}", bad.join(", ")));
    }
    notes.push(format!("∂²=0 on {} complexes", ctx.complexes.len()));

    // closure, face coherence and key invariance on every catalog
    let mut coherent = 0;
    let mut reindexings = 0;
    for ((g, n), catalog) in &ctx.catalogs {
        for (r, e) in catalog.iter() {
            for edge in 0..e.graph.num_edges() {
                let face = e.graph.contract_edge(edge)?;
                if face.num_edges() > 0 && catalog.lookup(&canonicalize(&face).0).is_none() {
                    failures.push(format!("({g},{n}): face {edge} of {r:?} missing"));
                }
            }
        }
        let mut cells: Vec<ClassRef> = catalog.iter().map(|(r, _)| r).collect();
        cells.shuffle(&mut rng);
        cells.truncate(300);
        coherent += cells.len();
        if let Some(m) = face_coherence_mismatch(catalog, &cells) {
            failures.push(format!("({g},{n}): {m}"));
        }
        for &r in cells.iter().take(25) {
            let e = catalog.entry(r);
            let (nv, ne) = (e.graph.num_vertices(), e.graph.num_edges());
            for _ in 0..100 {
                let mut vp: Vec<usize> = (0..nv).collect();
                let mut ep: Vec<usize> = (0..ne).collect();
                vp.shuffle(&mut rng);
                ep.shuffle(&mut rng);
                let flips: Vec<bool> = (0..ne).map(|_| rng.gen()).collect();
                if canonicalize(&e.graph.reindexed(&vp, &ep, &flips)?).0 != e.key {
                    failures.push(format!("({g},{n}): key not invariant for {}", e.graph.to_json()));
                }
                reindexings += 1;
            }
        }
    }
    notes.push(format!("closure on {} catalogs", ctx.catalogs.len()));
    notes.push(format!("coherence on {coherent} cells"));
    notes.push(format!("{reindexings} re-indexings"));

    // sparse rank against the dense oracle
    let mut compared = 0;
    for (key, complex) in &ctx.complexes {
        for (p, m) in complex.boundaries().iter().enumerate() {
            if m.rows() + m.cols() <= 200 {
                compared += 1;
                let (s, d) = (rank(m), dense_rank_of(m));
                if s != d {
                    failures.push(format!("{key:?} ∂_{p}: sparse {s}, dense {d}"));
                }
            }
        }
    }
    notes.push(format!("{compared} matrices ranked densely"));

    // top-down against bottom-up
    let mut pairs = 0;
    for g in 0..=2u32 {
        for n in 0..=8u32 {
            if 2 * g + n < 3 || 3 * g + n > 8 {
                continue;
            }
            let mut top: Vec<_> = ctx.catalog(g, n)?.iter().map(|(_, e)| e.key.clone()).collect();
            let mut bottom: Vec<_> = bottom_up_classes(g, n).iter().map(|x| canonicalize(x).0).collect();
            top.sort();
            bottom.sort();
            if top != bottom {
                failures.push(format!("({g},{n}): catalogs differ from the oracle"));
            }
            pairs += 1;
        }
    }
    notes.push(format!("{pairs} catalogs match the oracle"));

    // Euler characteristics: cell counts, Hopf trace at the identity, Betti numbers
    let full: Vec<(u32, u32)> = ctx
        .tables
        .keys()
        .filter(|k| k.2 == Which::Full)
        .map(|&(g, n, _)| (g, n))
        .collect();
    for &(g, n) in &full {
        let alternating = ctx.tables[&(g, n, Which::Full)].alternating_sum();
        let catalog = &ctx.catalogs[&(g, n)];
        let census = torsion_census(catalog);
        if census.reduced_euler_characteristic() != alternating {
            failures.push(format!("({g},{n}): α-count Euler characteristic differs"));
        }
        let identity: Vec<usize> = (0..n as usize).collect();
        let mut hopf = -1;
        for p in 0..catalog.levels().len() {
            let t = action_trace(catalog, p, &identity)?;
            hopf += if p % 2 == 0 { t } else { -t };
        }
        if hopf != alternating {
            failures.push(format!(
                "({g},{n}): equivariant Euler at the identity is {hopf}, expected {alternating}"
            ));
        }
    }
    notes.push(format!("Euler checks on {} complexes", full.len()));

    // genuine characters
    for n in 3..=6 {
        let h = top_homology_character_of(ctx.catalog(1, n)?)?;
        for (lambda, m) in decompose(&h) {
            if !m.is_integer() || *m.numer() < 0 {
                failures.push(format!("n={n}: multiplicity {m} of {}", partition_label(&lambda)));
            }
        }
    }
    notes.push("character multiplicities natural for n = 3..6".into());

    Ok(outcome(failures, notes.join(", ")))
}

type Criterion = fn(&mut Ctx) -> Result<Outcome>;

fn main() -> ExitCode {
    let criteria: [(&str, &str, bool, Criterion); 9] = [
        ("1", "Δ_{1,n} Betti numbers, n = 3..6", true, criterion_1),
        ("1*", "Δ_{1,7} Betti numbers (stretch, non-blocking)", false, stretch),
        ("2", "Δ_{1,1} and Δ_{1,2} contractible", true, criterion_2),
        ("3", "genus 0, n = 5, 6, 7", true, criterion_3),
        ("4", "repeated-marking subcomplexes acyclic", true, criterion_4),
        ("5", "connectivity bounds", true, criterion_5),
        ("6", "top-degree support", true, criterion_6),
        ("7", "character identity, n = 3..6", true, criterion_7),
        ("8", "property suites", true, criterion_8),
    ];
    let mut ctx = Ctx::default();
    let mut ok = true;
    for (id, title, blocking, run) in criteria {
        let start = Instant::now();
        let result = run(&mut ctx).unwrap_or_else(|e| Outcome {
            passed: false,
            detail: format!("error: {e}"),
        });
        println!(
            "{} criterion {id:<2} {title} [{:.1}s]: {}",
            if result.passed { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            result.detail
        );
        ok &= result.passed || !blocking;
    }
    if ok {
        println!("acceptance: all blocking criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: FAILED");
        ExitCode::FAILURE
    }
}
