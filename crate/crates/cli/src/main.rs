use std::fs::{self, File};
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use tropicell::complex::{build_complex, repeated_marking_subcomplex, torsion_census, ChainComplex};
use tropicell::enumerate::{enumerate_with, Enumeration, EnumerationOptions, GraphCatalog};
use tropicell::equivariant::{
    character_table, dihedral_character, equivariant_euler_of, partition_label, top_homology_character_of,
    ClassFunction,
};
use tropicell::homology::{betti, BettiTable};
use tropicell::sparse::{self, SparseMatrix};
use tropicell::store::{self, CacheStatus, CatalogStore};
use tropicell::Error;
use tropicell_cli::progress::Progress;
use tropicell_cli::verify::{self, Suite};

#[derive(Parser)]
#[command(
    name = "tropicell",
    version,
    about = "Stable graph complexes and their rational homology"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Emit JSON on standard output.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, value_name = "K")]
    jobs: Option<usize>,
    /// Ignore and do not write the catalog cache.
    #[arg(long, global = true)]
    no_cache: bool,
    /// Cache directory (overrides TROPICELL_CACHE).
    #[arg(long, global = true, value_name = "DIR")]
    cache_dir: Option<PathBuf>,
    /// Stop enumerating after this many classes and save a checkpoint.
    #[arg(long, global = true, value_name = "N")]
    max_classes: Option<usize>,
    /// Suppress progress messages on standard error.
    #[arg(long, short, global = true)]
    quiet: bool,
}

#[derive(Args, Clone, Copy)]
struct Params {
    /// Genus.
    #[arg(short)]
    g: u32,
    /// Number of markings.
    #[arg(short)]
    n: u32,
}

#[derive(Clone, Copy, ValueEnum)]
enum SubcomplexKind {
    /// Graphs with two markings on one vertex.
    Rep,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportFormat {
    /// The graph catalog as newline-delimited JSON.
    Catalog,
    /// Boundary matrices in triplet format, one file per degree.
    Matrices,
    /// Betti table as JSON.
    Betti,
    /// Equivariant Euler characteristic as JSON.
    Euler,
    /// Top homology and dihedral characters as JSON (genus 1 only).
    Character,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate the classes of stable graphs and report counts per dimension.
    Enumerate {
        #[command(flatten)]
        params: Params,
    },
    /// Rational homology of Δ_{g,n} or one of its subcomplexes.
    Homology {
        #[arg(short)]
        g: Option<u32>,
        #[arg(short)]
        n: Option<u32>,
        /// Use unreduced homology.
        #[arg(long)]
        unreduced: bool,
        #[arg(long, value_enum)]
        subcomplex: Option<SubcomplexKind>,
        /// Write boundary matrices to this directory.
        #[arg(long, value_name = "DIR")]
        export_matrices: Option<PathBuf>,
        /// Print the rank of a matrix stored in triplet format instead.
        #[arg(long, value_name = "FILE", conflicts_with_all = ["g", "n", "subcomplex", "export_matrices"])]
        rank_of: Option<PathBuf>,
    },
    /// Compare the top homology character of Δ_{1,n} with the dihedral character.
    Character {
        #[arg(short)]
        n: u32,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long, value_enum, default_value = "quick")]
        suite: Suite,
        /// Include the slow Δ_{1,7} case.
        #[arg(long)]
        stretch: bool,
        /// Corrupt one boundary sign per complex (tests the checks themselves).
        #[arg(long, hide = true)]
        inject_sign_flip: bool,
    },
    /// Write computed data to files.
    Export {
        #[command(flatten)]
        params: Params,
        #[arg(long, value_enum)]
        format: ExportFormat,
        /// Output file, or directory for matrices. Standard output if omitted.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
}

enum Failure {
    Usage(String),
    Verification,
    Resource(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::UnstableParameters { .. } | Error::InvalidArgument(_) => Failure::Usage(e.to_string()),
            _ => Failure::Resource(e.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Resource(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

struct Context {
    common: Common,
    progress: Progress,
}

impl Context {
    fn store(&self) -> Option<CatalogStore> {
        if self.common.no_cache {
            return None;
        }
        self.common
            .cache_dir
            .clone()
            .or_else(store::default_cache_dir)
            .map(CatalogStore::new)
    }

    fn catalog(&self, g: u32, n: u32) -> Result<GraphCatalog, Failure> {
        let report = |m: &str| self.progress.message(m);
        let options = EnumerationOptions {
            max_classes: self.common.max_classes,
            progress: Some(&report),
        };
        match self.store() {
            Some(store) => {
                let (catalog, status) = store.load_or_build(g, n, &options)?;
                match status {
                    CacheStatus::Hit => report(&format!("loaded from {}", store.catalog_path(g, n).display())),
                    CacheStatus::Rebuilt(why) => report(&format!("cache rebuilt ({why})")),
                    CacheStatus::Resumed => report("resumed from checkpoint"),
                    _ => {}
                }
                Ok(catalog)
            }
            None => match enumerate_with(g, n, &options, None)? {
                Enumeration::Complete(c) => Ok(c),
                Enumeration::Interrupted(p) => Err(Error::ResourceLimit {
                    classes: p.classes(),
                    completed_edges: p.lowest + 1,
                    checkpoint: "not saved (cache disabled)".into(),
                }
                .into()),
            },
        }
    }

    fn emit(&self, text: impl std::fmt::Display, json: &serde_json::Value) -> Outcome {
        let mut out = io::stdout().lock();
        if self.common.json {
            writeln!(out, "{}", serde_json::to_string_pretty(json).expect("values serialize"))?;
        } else {
            writeln!(out, "{text}")?;
        }
        Ok(())
    }
}

fn complex_label(g: u32, n: u32, rep: bool) -> String {
    if rep {
        format!("Δ^rep_{{{g},{n}}}")
    } else {
        format!("Δ_{{{g},{n}}}")
    }
}

fn enumerate(cx: &Context, p: Params) -> Outcome {
    let catalog = cx.catalog(p.g, p.n)?;
    let census = torsion_census(&catalog);
    let levels: Vec<serde_json::Value> = (0..catalog.levels().len())
        .map(|d| {
            json!({
                "dimension": d,
                "edges": d + 1,
                "classes": catalog.level(d).len(),
                "alpha": census.alpha[d],
                "beta": census.beta[d],
            })
        })
        .collect();
    let mut text = format!("J_{{{},{}}}: {} classes", p.g, p.n, catalog.len());
    if catalog.is_empty() {
        text += &format!("\nempty catalog: Δ_{{{},{}}} has no cells", p.g, p.n);
    } else {
        text += &format!(
            "\n{:>5}  {:>5}  {:>9}  {:>9}  {:>9}",
            "dim", "edges", "classes", "alpha", "beta"
        );
        for d in 0..catalog.levels().len() {
            text += &format!(
                "\n{:>5}  {:>5}  {:>9}  {:>9}  {:>9}",
                d,
                d + 1,
                catalog.level(d).len(),
                census.alpha[d],
                census.beta[d]
            );
        }
    }
    let json = json!({
        "g": p.g,
        "n": p.n,
        "classes": catalog.len(),
        "empty": catalog.is_empty(),
        "levels": levels,
    });
    cx.emit(text, &json)
}

fn write_matrices(complex: &ChainComplex, dir: &Path) -> Outcome {
    fs::create_dir_all(dir)?;
    for (p, m) in complex.boundaries().iter().enumerate() {
        m.write_triplets(File::create(dir.join(format!("boundary_{p}.txt")))?)?;
    }
    Ok(())
}

fn homology_table(
    cx: &Context,
    g: u32,
    n: u32,
    reduced: bool,
    rep: bool,
) -> Result<(BettiTable, ChainComplex), Failure> {
    let catalog = cx.catalog(g, n)?;
    let catalog = if rep {
        repeated_marking_subcomplex(&catalog)?
    } else {
        catalog
    };
    let label = complex_label(g, n, rep);
    cx.progress.message(&format!("building the chain complex of {label}"));
    let complex = build_complex(&catalog, reduced)?;
    let failures = complex.boundary_squared_failures()?;
    if !failures.is_empty() {
        return Err(Error::Integrity(format!("boundary does not square to zero in degrees {failures:?}")).into());
    }
    cx.progress.message("computing ranks");
    Ok((betti(&complex)?.with_label(label), complex))
}

fn homology(
    cx: &Context,
    g: Option<u32>,
    n: Option<u32>,
    unreduced: bool,
    subcomplex: Option<SubcomplexKind>,
    export: Option<PathBuf>,
    rank_of: Option<PathBuf>,
) -> Outcome {
    if let Some(path) = rank_of {
        let m = SparseMatrix::read_triplets(BufReader::new(File::open(&path)?))?;
        let r = sparse::rank(&m);
        let json = json!({"rows": m.rows(), "cols": m.cols(), "rank": r});
        return cx.emit(format!("{} x {} matrix of rank {r}", m.rows(), m.cols()), &json);
    }
    let (Some(g), Some(n)) = (g, n) else {
        return Err(Failure::Usage("homology needs -g and -n (or --rank-of FILE)".into()));
    };
    let rep = matches!(subcomplex, Some(SubcomplexKind::Rep));
    let (table, complex) = homology_table(cx, g, n, !unreduced, rep)?;
    if let Some(dir) = export {
        write_matrices(&complex, &dir)?;
        cx.progress.message(&format!("matrices written to {}", dir.display()));
    }
    cx.emit(&table, &serde_json::to_value(&table).expect("tables serialize"))
}

fn character_report(cx: &Context, n: u32) -> Result<(ClassFunction, ClassFunction), Failure> {
    if n < 3 {
        return Err(Failure::Usage(format!("character needs n >= 3, got {n}")));
    }
    let catalog = cx.catalog(1, n)?;
    cx.progress.message("computing traces");
    let h = top_homology_character_of(&catalog)?;
    let d = dihedral_character(n)?;
    Ok((h, d))
}

fn character_json(n: u32, h: &ClassFunction, d: &ClassFunction) -> serde_json::Value {
    let per_class: serde_json::Map<String, serde_json::Value> = h
        .iter()
        .zip(d.iter())
        .map(|((p, a), (_, b))| (partition_label(p), json!(a == b)))
        .collect();
    json!({
        "n": n,
        "homology": h,
        "dihedral": d,
        "equal_per_class": per_class,
        "equal": h == d,
    })
}

fn character(cx: &Context, n: u32) -> Outcome {
    let (h, d) = character_report(cx, n)?;
    let homology_name = format!("H_{}(Δ_{{1,{n}}})", n - 1);
    let mut text = character_table(&[(&homology_name, &h), ("dihedral", &d)]);
    let verdicts: Vec<String> = h
        .iter()
        .zip(d.iter())
        .map(|((_, a), (_, b))| if a == b { "=".to_string() } else { "≠".to_string() })
        .collect();
    text += &format!("\nper class: {}", verdicts.join(" "));
    text += &format!("\nverdict: {}", if h == d { "EQUAL" } else { "DIFFERENT" });
    cx.emit(text, &character_json(n, &h, &d))?;
    if h == d {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn run_verify(cx: &Context, suite: Suite, stretch: bool, inject_sign_flip: bool) -> Outcome {
    let report_progress = |m: &str| cx.progress.message(m);
    let report = verify::run(verify::Options {
        suite,
        stretch,
        inject_sign_flip,
        store: cx.store(),
        progress: Some(&report_progress),
    });
    cx.emit(&report, &serde_json::to_value(&report).expect("reports serialize"))?;
    if report.passed {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn export(cx: &Context, p: Params, format: ExportFormat, output: Option<PathBuf>) -> Outcome {
    let write_text = |text: String| -> Outcome {
        match &output {
            Some(path) => fs::write(path, text)?,
            None => io::stdout().lock().write_all(text.as_bytes())?,
        }
        Ok(())
    };
    match format {
        ExportFormat::Catalog => {
            let catalog = cx.catalog(p.g, p.n)?;
            let mut buf = Vec::new();
            store::write_catalog(&catalog, &mut buf)?;
            write_text(String::from_utf8(buf).expect("catalog files are UTF-8"))
        }
        ExportFormat::Matrices => {
            let Some(dir) = &output else {
                return Err(Failure::Usage("matrix export needs --output DIR".into()));
            };
            let (_, complex) = homology_table(cx, p.g, p.n, true, false)?;
            write_matrices(&complex, dir)
        }
        ExportFormat::Betti => {
            let (table, _) = homology_table(cx, p.g, p.n, true, false)?;
            write_text(table.to_json() + "\n")
        }
        ExportFormat::Euler => {
            let euler = equivariant_euler_of(&cx.catalog(p.g, p.n)?)?;
            write_text(euler.to_json() + "\n")
        }
        ExportFormat::Character => {
            if p.g != 1 {
                return Err(Failure::Usage("character export is defined for genus 1".into()));
            }
            let (h, d) = character_report(cx, p.n)?;
            let json = character_json(p.n, &h, &d);
            write_text(serde_json::to_string_pretty(&json).expect("values serialize") + "\n")
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.common.jobs {
        if jobs == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(2);
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .expect("the global pool is configured once");
    }
    let cx = Context {
        progress: Progress::new(cli.common.quiet, Duration::from_secs(10)),
        common: cli.common,
    };
    let outcome = match cli.command {
        Command::Enumerate { params } => enumerate(&cx, params),
        Command::Homology {
            g,
            n,
            unreduced,
            subcomplex,
            export_matrices,
            rank_of,
        } => homology(&cx, g, n, unreduced, subcomplex, export_matrices, rank_of),
        Command::Character { n } => character(&cx, n),
        Command::Verify {
            suite,
            stretch,
            inject_sign_flip,
        } => run_verify(&cx, suite, stretch, inject_sign_flip),
        Command::Export { params, format, output } => export(&cx, params, format, output),
    };
    drop(cx);
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Resource(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
