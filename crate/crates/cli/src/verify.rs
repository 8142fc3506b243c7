//! The `verify` suites: each check recomputes a known result or structural
//! invariant and records expected and computed values side by side.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use tropicell::complex::{
    build_complex, face_coherence_mismatch, repeated_marking_subcomplex, torsion_census, ChainComplex,
};
use tropicell::enumerate::{enumerate_all, ClassRef, GraphCatalog};
use tropicell::equivariant::{
    decompose, dihedral_character, equivariant_euler_of, partition_label, top_homology_character_of,
};
use tropicell::homology::{betti, BettiTable};
use tropicell::iso::canonicalize;
use tropicell::oracle;
use tropicell::sparse;
use tropicell::store::CatalogStore;
use tropicell::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Quick,
    Full,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub criterion: u8,
    pub name: String,
    /// The statement being tested.
    pub reference: String,
    pub expected: String,
    /// Where the expected value comes from: a published result, a derivation
    /// from one, or a structural invariant of the construction.
    pub provenance: String,
    pub computed: String,
    pub passed: bool,
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub suite: Suite,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} [{}] {:<44} expected {:<28} computed {:<28} ({:.2}s)",
                if c.passed { "PASS" } else { "FAIL" },
                c.criterion,
                c.name,
                c.expected,
                c.computed,
                c.seconds
            )?;
        }
        let failed = self.checks.iter().filter(|c| !c.passed).count();
        write!(
            f,
            "{}: {} checks, {} failed",
            if self.passed { "PASSED" } else { "FAILED" },
            self.checks.len(),
            failed
        )
    }
}

pub struct Options<'a> {
    pub suite: Suite,
    /// Also run the non-blocking Δ_{1,7} case.
    pub stretch: bool,
    /// Flip one boundary sign in every complex before checking it.
    pub inject_sign_flip: bool,
    pub store: Option<CatalogStore>,
    pub progress: Option<&'a (dyn Fn(&str) + Sync)>,
}

const PUBLISHED: &str = "published result";
const DERIVED: &str = "derived";
const INVARIANT: &str = "structural invariant";

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

fn describe(table: &BettiTable) -> String {
    let nonzero: Vec<String> = table
        .rows
        .iter()
        .filter(|r| r.betti > 0)
        .map(|r| format!("b{}={}", r.degree, r.betti))
        .collect();
    if nonzero.is_empty() {
        "all zero".into()
    } else {
        nonzero.join(", ")
    }
}

struct Verifier<'a> {
    options: Options<'a>,
    catalogs: Mutex<HashMap<(u32, u32), Arc<GraphCatalog>>>,
    tables: Mutex<HashMap<(u32, u32, bool), Arc<BettiTable>>>,
    complexes_checked: Mutex<BTreeMap<String, Vec<usize>>>,
    checks: Vec<Check>,
}

impl<'a> Verifier<'a> {
    fn note(&self, msg: &str) {
        if let Some(p) = self.options.progress {
            p(msg);
        }
    }

    fn catalog(&self, g: u32, n: u32) -> Result<Arc<GraphCatalog>> {
        if let Some(c) = self.catalogs.lock().unwrap().get(&(g, n)) {
            return Ok(c.clone());
        }
        self.note(&format!("enumerating J_{{{g},{n}}}"));
        let c = match &self.options.store {
            Some(store) => store.load_or_build(g, n, &Default::default())?.0,
            None => enumerate_all(g, n)?,
        };
        let c = Arc::new(c);
        self.catalogs.lock().unwrap().insert((g, n), c.clone());
        Ok(c)
    }

    fn complex(&self, label: String, catalog: &GraphCatalog) -> Result<ChainComplex> {
        let mut complex = build_complex(catalog, true)?;
        if self.options.inject_sign_flip {
            complex.flip_first_sign(1);
        }
        let failures = complex.boundary_squared_failures()?;
        self.complexes_checked.lock().unwrap().insert(label, failures);
        Ok(complex)
    }

    /// Reduced Betti table of the full complex, or of the repeated-marking
    /// subcomplex when `rep` is set.
    fn table(&self, g: u32, n: u32, rep: bool) -> Result<Arc<BettiTable>> {
        if let Some(t) = self.tables.lock().unwrap().get(&(g, n, rep)) {
            return Ok(t.clone());
        }
        let catalog = self.catalog(g, n)?;
        let (label, complex) = if rep {
            let sub = repeated_marking_subcomplex(&catalog)?;
            let label = format!("Δ^rep_{{{g},{n}}}");
            (label.clone(), self.complex(label, &sub)?)
        } else {
            let label = format!("Δ_{{{g},{n}}}");
            (label.clone(), self.complex(label, &catalog)?)
        };
        self.note(&format!("homology of {label}"));
        let t = Arc::new(betti(&complex)?.with_label(label));
        self.tables.lock().unwrap().insert((g, n, rep), t.clone());
        Ok(t)
    }

    fn record(
        &mut self,
        criterion: u8,
        name: impl Into<String>,
        reference: &str,
        expected: impl Into<String>,
        provenance: &str,
        run: impl FnOnce(&Self) -> Result<(bool, String)>,
    ) {
        let name = name.into();
        self.note(&format!("check: {name}"));
        let start = Instant::now();
        let (passed, computed) = match run(self) {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        self.checks.push(Check {
            criterion,
            name,
            reference: reference.into(),
            expected: expected.into(),
            provenance: provenance.into(),
            computed,
            passed,
            seconds: start.elapsed().as_secs_f64(),
        });
    }

    fn full(&self) -> bool {
        self.options.suite == Suite::Full
    }

    /// Every (g, n) whose full complex the suite computes.
    fn computed_parameters(&self) -> Vec<(u32, u32)> {
        let mut out = vec![
            (1, 1),
            (1, 2),
            (1, 3),
            (1, 4),
            (1, 5),
            (0, 4),
            (0, 5),
            (0, 6),
            (0, 7),
            (2, 0),
            (2, 1),
            (2, 2),
        ];
        if self.full() {
            out.extend([(1, 6), (2, 3), (2, 4), (3, 0), (3, 1)]);
        }
        out
    }

    fn genus_one_wedge(&mut self, n: u32, criterion: u8) {
        let rank = factorial(n as u64 - 1) / 2;
        self.record(
            criterion,
            format!("Δ_{{1,{n}}} Betti numbers"),
            "Δ_{1,n} is a wedge of (n-1)!/2 spheres of dimension n-1",
            format!("b{}={rank}, others 0", n - 1),
            PUBLISHED,
            |v| {
                let t = v.table(1, n, false)?;
                let ok = t.support() == vec![n as i64 - 1] && t.betti(n as i64 - 1) as u64 == rank;
                Ok((ok, describe(&t)))
            },
        );
    }

    fn run(&mut self) {
        let full = self.full();

        // 1
        let genus_one: Vec<u32> = if full { vec![3, 4, 5, 6] } else { vec![3, 4, 5] };
        for n in genus_one {
            self.genus_one_wedge(n, 1);
        }
        if self.options.stretch {
            self.genus_one_wedge(7, 1);
        }

        // 2
        self.record(
            2,
            "Δ_{1,1} is a point",
            "Δ_{1,1} is a single point",
            "1 cell, all zero",
            PUBLISHED,
            |v| {
                let c = v.catalog(1, 1)?;
                let t = v.table(1, 1, false)?;
                Ok((
                    c.len() == 1 && t.total() == 0,
                    format!("{} cell, {}", c.len(), describe(&t)),
                ))
            },
        );
        self.record(
            2,
            "Δ_{1,2} is acyclic",
            "Δ_{1,2} is contractible",
            "all zero",
            PUBLISHED,
            |v| {
                let t = v.table(1, 2, false)?;
                Ok((t.total() == 0, describe(&t)))
            },
        );

        // 3
        for n in [5u32, 6, 7] {
            let rank = factorial(n as u64 - 2);
            self.record(
                3,
                format!("Δ_{{0,{n}}} single nonzero Betti number"),
                "Δ_{0,n} is a wedge of (n-2)! spheres",
                format!("one nonzero rank {rank}"),
                PUBLISHED,
                |v| {
                    let t = v.table(0, n, false)?;
                    let support = t.support();
                    let ok = support.len() == 1 && t.betti(support[0]) as u64 == rank;
                    Ok((ok, describe(&t)))
                },
            );
        }

        // 4
        let mut rep = vec![(1, 2), (1, 3), (1, 4), (1, 5), (2, 2)];
        if full {
            rep.push((2, 3));
        }
        for (g, n) in rep {
            self.record(
                4,
                format!("Δ^rep_{{{g},{n}}} acyclic"),
                "the repeated-marking subcomplex is contractible for g >= 1, n >= 2",
                "all zero",
                PUBLISHED,
                |v| {
                    let t = v.table(g, n, true)?;
                    Ok((t.total() == 0, describe(&t)))
                },
            );
        }

        // 5
        let mut bounds: Vec<(u32, u32, i64, &str, &str)> = Vec::new();
        for n in if full { 4..=6 } else { 4..=5 } {
            bounds.push((1, n, n as i64 - 2, "Δ_{1,n} is (n-3)-connected", PUBLISHED));
        }
        for n in if full { 2..=3 } else { 2..=2 } {
            bounds.push((2, n, n as i64, "Δ_{2,n} is n-connected", PUBLISHED));
        }
        for (g, n) in self.computed_parameters() {
            if g >= 1 {
                bounds.push((g, n, n as i64 - 3, "Δ_{g,n} is (n-3)-connected for g >= 1", DERIVED));
            }
        }
        for (g, n, top, reference, provenance) in bounds {
            self.record(
                5,
                format!("Δ_{{{g},{n}}} vanishes through degree {top}"),
                reference,
                format!("b_i=0 for i<={top}"),
                provenance,
                |v| {
                    let t = v.table(g, n, false)?;
                    let bad: Vec<i64> = t.support().into_iter().filter(|&d| d <= top).collect();
                    Ok((bad.is_empty(), describe(&t)))
                },
            );
        }

        // 6
        for (g, n) in self.computed_parameters() {
            if g == 0 {
                continue;
            }
            let (lo, hi) = (2 * g as i64 - 3 + n as i64, 3 * g as i64 - 4 + n as i64);
            self.record(
                6,
                format!("Δ_{{{g},{n}}} supported in the top degrees"),
                "reduced homology of Δ_{g,n} lives in the top g - δ_{0,n} degrees",
                format!("support within [{lo}, {hi}]"),
                PUBLISHED,
                |v| {
                    let t = v.table(g, n, false)?;
                    let ok = t.support().iter().all(|&k| lo <= k && k <= hi);
                    Ok((ok, describe(&t)))
                },
            );
        }

        // 7
        for n in if full { 3..=6 } else { 3..=5 } {
            self.record(
                7,
                format!("character of H_{}(Δ_{{1,{n}}}) is dihedral", n - 1),
                "top homology of Δ_{1,n} is Ind_{D_n} Res sgn",
                "equal on every class",
                PUBLISHED,
                |v| {
                    let c = v.catalog(1, n)?;
                    let h = top_homology_character_of(&c)?;
                    let d = dihedral_character(n)?;
                    let differing: Vec<String> = h
                        .iter()
                        .zip(d.iter())
                        .filter(|((_, a), (_, b))| a != b)
                        .map(|((p, _), _)| partition_label(p))
                        .collect();
                    let computed = if differing.is_empty() {
                        format!("equal, degree {}", h.degree())
                    } else {
                        format!("differ on {}", differing.join(", "))
                    };
                    Ok((differing.is_empty(), computed))
                },
            );
        }

        // 8
        self.properties();
    }

    fn properties(&mut self) {
        let params = self.computed_parameters();

        self.record(
            8,
            "contraction closure of catalogs",
            "every face of a class is in the catalog",
            "closed",
            INVARIANT,
            |v| {
                for &(g, n) in &params {
                    let c = v.catalog(g, n)?;
                    for (r, e) in c.iter() {
                        for edge in 0..e.graph.num_edges() {
                            let face = e.graph.contract_edge(edge)?;
                            if face.num_edges() > 0 && c.lookup(&canonicalize(&face).0).is_none() {
                                return Ok((false, format!("face {edge} of {:?} in ({g},{n}) missing", r)));
                            }
                        }
                    }
                }
                Ok((true, format!("{} catalogs closed", params.len())))
            },
        );

        self.record(
            8,
            "face maps commute",
            "d_i d_j = d_{j-1} d_i for i < j",
            "no mismatch",
            INVARIANT,
            |v| {
                let mut rng = StdRng::seed_from_u64(0x5eed);
                let mut sampled = 0;
                for &(g, n) in &params {
                    let c = v.catalog(g, n)?;
                    let mut cells: Vec<ClassRef> = c.iter().map(|(r, _)| r).filter(|r| r.dim >= 1).collect();
                    cells.shuffle(&mut rng);
                    cells.truncate(200);
                    sampled += cells.len();
                    if let Some(m) = face_coherence_mismatch(&c, &cells) {
                        return Ok((false, m));
                    }
                }
                Ok((true, format!("{sampled} cells")))
            },
        );

        self.record(
            8,
            "canonical keys survive re-indexing",
            "isomorphic graphs share a canonical key",
            "100 re-indexings per sampled class",
            INVARIANT,
            |v| {
                let mut rng = StdRng::seed_from_u64(0xca11);
                let mut tried = 0;
                for &(g, n) in &params {
                    let c = v.catalog(g, n)?;
                    let mut entries: Vec<ClassRef> = c.iter().map(|(r, _)| r).collect();
                    entries.shuffle(&mut rng);
                    for &r in entries.iter().take(20) {
                        let e = c.entry(r);
                        let (nv, ne) = (e.graph.num_vertices(), e.graph.num_edges());
                        for _ in 0..100 {
                            let mut vp: Vec<usize> = (0..nv).collect();
                            let mut ep: Vec<usize> = (0..ne).collect();
                            vp.shuffle(&mut rng);
                            ep.shuffle(&mut rng);
                            let flips: Vec<bool> = (0..ne).map(|_| rng.gen()).collect();
                            let h = e.graph.reindexed(&vp, &ep, &flips)?;
                            if canonicalize(&h).0 != e.key {
                                return Ok((false, format!("key changed for {}", e.graph.to_json())));
                            }
                            tried += 1;
                        }
                    }
                }
                Ok((true, format!("{tried} re-indexings")))
            },
        );

        self.record(
            8,
            "top-down catalogs match bottom-up oracle",
            "both enumerations produce the same classes",
            "equal for 3g-3+n <= 5",
            INVARIANT,
            |v| {
                let mut pairs = 0;
                for g in 0..=2u32 {
                    for n in 0..=8u32 {
                        if 2 * g + n < 3 || 3 * g + n > 8 {
                            continue;
                        }
                        let c = v.catalog(g, n)?;
                        let mut top: Vec<_> = c.iter().map(|(_, e)| e.key.clone()).collect();
                        let mut bottom: Vec<_> = oracle::bottom_up_classes(g, n)
                            .iter()
                            .map(|x| canonicalize(x).0)
                            .collect();
                        top.sort();
                        bottom.sort();
                        if top != bottom {
                            return Ok((false, format!("mismatch at ({g},{n})")));
                        }
                        pairs += 1;
                    }
                }
                Ok((true, format!("{pairs} parameter pairs")))
            },
        );

        // Complexes for every computed parameter (and their repeated-marking
        // subcomplexes) feed the remaining checks.
        let mut tables: Vec<Arc<BettiTable>> = Vec::new();
        let mut errors = Vec::new();
        for &(g, n) in &params {
            for rep in [false, true] {
                match self.table(g, n, rep) {
                    Ok(t) => tables.push(t),
                    Err(e) => errors.push(format!("({g},{n}): {e}")),
                }
            }
        }

        self.record(
            8,
            "boundary squares to zero",
            "∂_{p-1} ∂_p = 0",
            "zero in every complex",
            INVARIANT,
            |v| {
                let checked = v.complexes_checked.lock().unwrap();
                let bad: Vec<String> = checked
                    .iter()
                    .filter(|(_, f)| !f.is_empty())
                    .map(|(label, f)| format!("{label} at {f:?}"))
                    .collect();
                if !bad.is_empty() {
                    let shown: Vec<&str> = bad.iter().take(4).map(String::as_str).collect();
                    return Ok((
                        false,
                        format!("nonzero in {} complexes: {}", bad.len(), shown.join(", ")),
                    ));
                }
                if let Some(first) = errors.first() {
                    return Ok((false, format!("{} complexes failed to build: {first}", errors.len())));
                }
                Ok((true, format!("{} complexes", checked.len())))
            },
        );

        self.record(
            8,
            "sparse rank equals dense oracle",
            "exact rank agrees with dense fraction-free elimination",
            "equal on matrices with rows+cols <= 200",
            INVARIANT,
            |v| {
                let mut compared = 0;
                for &(g, n) in &params {
                    let c = v.catalog(g, n)?;
                    let complex = build_complex(&c, true)?;
                    for (p, m) in complex.boundaries().iter().enumerate() {
                        if m.rows() + m.cols() > 200 {
                            continue;
                        }
                        let (s, d) = (sparse::rank(m), oracle::dense_rank_of(m));
                        if s != d {
                            return Ok((false, format!("∂_{p} of ({g},{n}): sparse {s}, dense {d}")));
                        }
                        compared += 1;
                    }
                }
                Ok((true, format!("{compared} matrices")))
            },
        );

        self.record(
            8,
            "Euler characteristic from cell counts",
            "Σ(-1)^p α_p - 1 equals the alternating Betti sum",
            "equal",
            INVARIANT,
            |v| {
                for &(g, n) in &params {
                    let census = torsion_census(&*v.catalog(g, n)?);
                    let t = v.table(g, n, false)?;
                    if census.reduced_euler_characteristic() != t.alternating_sum() {
                        return Ok((false, format!("differs at ({g},{n})")));
                    }
                }
                Ok((true, format!("{} complexes", params.len())))
            },
        );

        self.record(
            8,
            "equivariant Euler at the identity",
            "Hopf trace at the identity equals the alternating Betti sum",
            "equal",
            INVARIANT,
            |v| {
                for &(g, n) in &params {
                    let c = v.catalog(g, n)?;
                    let e = equivariant_euler_of(&c)?;
                    let t = v.table(g, n, false)?;
                    if e.degree() != t.alternating_sum() {
                        return Ok((false, format!("({g},{n}): {} vs {}", e.degree(), t.alternating_sum())));
                    }
                }
                Ok((true, format!("{} complexes", params.len())))
            },
        );

        let full = self.full();
        self.record(
            8,
            "character multiplicities are natural numbers",
            "top homology characters are genuine representations",
            "nonnegative integers",
            INVARIANT,
            |v| {
                let mut shown = Vec::new();
                for n in if full { 3..=6 } else { 3..=5 } {
                    let h = top_homology_character_of(&*v.catalog(1, n)?)?;
                    for (lambda, m) in decompose(&h) {
                        if !m.is_integer() || *m.numer() < 0 {
                            return Ok((false, format!("n={n}, {}: {m}", partition_label(&lambda))));
                        }
                    }
                    shown.push(n.to_string());
                }
                Ok((true, format!("n = {}", shown.join(", "))))
            },
        );
    }
}

pub fn run(options: Options<'_>) -> VerificationReport {
    let suite = options.suite;
    let mut v = Verifier {
        options,
        catalogs: Mutex::new(HashMap::new()),
        tables: Mutex::new(HashMap::new()),
        complexes_checked: Mutex::new(BTreeMap::new()),
        checks: Vec::new(),
    };
    v.run();
    VerificationReport {
        suite,
        passed: v.checks.iter().all(|c| c.passed),
        checks: v.checks,
    }
}
