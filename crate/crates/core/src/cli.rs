//! The `cupi` command line.
//!
//! [`run`] parses arguments, executes one subcommand and returns the exit
//! status together with everything that would go to stdout, so the binary
//! is a thin wrapper and tests can drive it in-process.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::assembly::{assemble, default_max_i, validate_comodule, AssemblyComplex};
use crate::complex::{Simplex, SimplicialComplex};
use crate::cupi::{validate_symmetric_coalgebra, CupStructure};
use crate::io;
use crate::reconstruct::{faithfulness_check, fullness_roundtrip, reconstruct, ReconstructionResult};
use crate::squares::squares_table;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Machine,
}

#[derive(Debug, Parser)]
#[command(name = "cupi", version, about = "Cup-i coproducts, Steenrod squares and assembly of presheaves")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print Δ_i(x) (or TΔ_i(x)) for one simplex.
    Cup {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long)]
        i: usize,
        #[arg(long)]
        simplex: String,
        #[arg(long)]
        twisted: bool,
    },
    /// Table of Sq^k on a basis of mod 2 cohomology.
    Squares {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long)]
        max_k: Option<usize>,
    },
    /// Check the symmetric coalgebra identities on every simplex.
    ValidateCoalgebra {
        #[arg(long)]
        complex: PathBuf,
        /// Defaults to dim X + 1.
        #[arg(long)]
        max_i: Option<usize>,
    },
    /// Assemble a presheaf into a chain complex.
    Assemble {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long)]
        presheaf: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the comodule identities of an assembled presheaf.
    VerifyComodule {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long)]
        presheaf: PathBuf,
        #[arg(long)]
        max_i: Option<usize>,
    },
    /// Recover a presheaf morphism from a map of assemblies.
    Reconstruct {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long)]
        presheaf_src: PathBuf,
        #[arg(long)]
        presheaf_dst: PathBuf,
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Randomized faithfulness and reconstruction round trips.
    Roundtrip {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long)]
        presheaf_src: PathBuf,
        /// Defaults to the source presheaf.
        #[arg(long)]
        presheaf_dst: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Exit status and captured stdout of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub status: i32,
    pub stdout: String,
}

impl Outcome {
    fn new(passed: bool, stdout: String) -> Self {
        Self { status: if passed { 0 } else { 1 }, stdout }
    }
}

fn load_complex(path: &Path) -> Result<Arc<SimplicialComplex>> {
    let text = io::read_file(path)?;
    Ok(Arc::new(io::parse_complex(&text, &path.display().to_string())?))
}

fn load_presheaf(path: &Path, complex: Arc<SimplicialComplex>) -> Result<crate::presheaf::Presheaf> {
    let text = io::read_file(path)?;
    Ok(io::parse_presheaf(&text, &path.display().to_string(), complex)?)
}

fn machine<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn write_out(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Parses `argv` (including the program name) and runs the subcommand.
///
/// Usage errors are returned as `Err` from clap; everything else is an
/// `anyhow` error carrying the located message.
pub fn run<I, T>(argv: I) -> Result<Outcome>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    execute(&cli)
}

pub fn execute(cli: &Cli) -> Result<Outcome> {
    let fmt = cli.format;
    match &cli.command {
        Command::Cup { complex, i, simplex, twisted } => {
            let x = load_complex(complex)?;
            let s: Simplex = simplex.parse().with_context(|| format!("--simplex {simplex:?}"))?;
            if !x.contains(&s) {
                bail!("--simplex {simplex:?} is not a simplex of {}", complex.display());
            }
            let cup = CupStructure::new(x);
            let value = if *twisted { cup.cup_i_t(*i, &s)? } else { (*cup.cup_i(*i, &s)?).clone() };
            let terms: Vec<(String, String, i64)> =
                value.iter().map(|((l, r), c)| (l.to_string(), r.to_string(), c)).collect();
            let out = match fmt {
                Format::Machine => machine(&serde_json::json!({ "i": i, "twisted": twisted, "simplex": simplex, "terms": terms }))?,
                Format::Text if terms.is_empty() => "0\n".to_string(),
                Format::Text => terms.iter().fold(String::new(), |mut acc, (l, r, c)| {
                    let _ = writeln!(acc, "{c:+} [{l}]⊗[{r}]");
                    acc
                }),
            };
            Ok(Outcome::new(true, out))
        }
        Command::Squares { complex, max_k } => {
            let x = load_complex(complex)?;
            let table = squares_table(&x, *max_k)?;
            let out = match fmt {
                Format::Machine => machine(&table)?,
                Format::Text => table.to_string(),
            };
            Ok(Outcome::new(true, out))
        }
        Command::ValidateCoalgebra { complex, max_i } => {
            let x = load_complex(complex)?;
            let max_i = max_i.unwrap_or_else(|| default_max_i(&x));
            let report = validate_symmetric_coalgebra(&x, max_i);
            let out = match fmt {
                Format::Machine => machine(&report)?,
                Format::Text => {
                    let mut s = String::new();
                    for f in &report.failures {
                        writeln!(s, "FAIL {:?} i={} at [{}]: {}", f.check, f.i, f.simplex, f.discrepancy)?;
                    }
                    writeln!(
                        s,
                        "{} simplices, i ≤ {}, {} checks, {} failures",
                        report.simplices,
                        report.max_i,
                        report.checks,
                        report.failures.len()
                    )?;
                    s
                }
            };
            Ok(Outcome::new(report.passed(), out))
        }
        Command::Assemble { complex, presheaf, out } => {
            let x = load_complex(complex)?;
            let n = load_presheaf(presheaf, x)?;
            let a = assemble(&n)?;
            let doc = io::assembly_to_doc(&a);
            let text = match fmt {
                Format::Machine => machine(&doc)?,
                Format::Text => {
                    let mut s = String::new();
                    writeln!(s, "{:>5} {:>6}  generator", "index", "degree")?;
                    for b in &doc.basis {
                        writeln!(s, "{:>5} {:>6}  [{}⊗{}]", b.index, b.degree, b.simplex, b.generator)?;
                    }
                    writeln!(s, "differential:")?;
                    for (r, c, v) in &doc.differential {
                        writeln!(s, "  d[{c}] ∋ {v:+}·[{r}]")?;
                    }
                    s
                }
            };
            if let Some(path) = out {
                write_out(path, &machine(&doc)?)?;
            }
            Ok(Outcome::new(true, text))
        }
        Command::VerifyComodule { complex, presheaf, max_i } => {
            let x = load_complex(complex)?;
            let max_i = max_i.unwrap_or_else(|| default_max_i(&x));
            let n = load_presheaf(presheaf, x)?;
            let a = assemble(&n)?;
            let report = validate_comodule(&a, max_i)?;
            let out = match fmt {
                Format::Machine => machine(&report)?,
                Format::Text => {
                    let mut s = String::new();
                    for f in &report.failures {
                        let i = f.i.map_or("-".to_string(), |i| i.to_string());
                        writeln!(s, "FAIL {:?} i={} twisted={} at {}: {}", f.check, i, f.twisted, f.pair, f.discrepancy)?;
                    }
                    writeln!(s, "rank {}, i ≤ {}, {} checks, {} failures", a.rank(), max_i, report.checks, report.failures.len())?;
                    s
                }
            };
            Ok(Outcome::new(report.passed(), out))
        }
        Command::Reconstruct { complex, presheaf_src, presheaf_dst, map, out } => {
            let x = load_complex(complex)?;
            let cup = Arc::new(CupStructure::new(x.clone()));
            let n = Arc::new(load_presheaf(presheaf_src, x.clone())?);
            let n2 = Arc::new(load_presheaf(presheaf_dst, x)?);
            let a = Arc::new(AssemblyComplex::with_cup(n.clone(), cup.clone())?);
            let b = Arc::new(AssemblyComplex::with_cup(n2, cup)?);
            let text = io::read_file(map)?;
            let f = io::parse_map(&text, &map.display().to_string(), a, b)?;
            let result = reconstruct(&f)?;
            let (passed, doc) = match &result {
                ReconstructionResult::Accepted { morphism, .. } => {
                    (true, machine(&io::morphism_to_doc(morphism, &n))?)
                }
                ReconstructionResult::Rejected(w) => {
                    (false, machine(&serde_json::json!({ "rejected": w }))?)
                }
            };
            let text = match (fmt, &result) {
                (Format::Machine, _) => doc.clone(),
                (Format::Text, ReconstructionResult::Accepted { certificate, .. }) => format!(
                    "accepted: {} support, {} chain-map and {} naturality checks\n",
                    certificate.support_checks, certificate.chain_map_checks, certificate.naturality_checks
                ),
                (Format::Text, ReconstructionResult::Rejected(w)) => {
                    let mut s = format!("rejected: {:?} at {}", w.reason, w.pair);
                    if let Some(loc) = &w.location {
                        write!(s, " ({loc})")?;
                    }
                    s.push('\n');
                    if let Some(f) = &w.failure {
                        let i = f.i.map_or("-".to_string(), |i| i.to_string());
                        writeln!(s, "witness: {:?} i={} twisted={} at {}: {}", f.check, i, f.twisted, f.pair, f.discrepancy)?;
                    }
                    s
                }
            };
            if let Some(path) = out {
                write_out(path, &doc)?;
            }
            Ok(Outcome::new(passed, text))
        }
        Command::Roundtrip { complex, presheaf_src, presheaf_dst, trials, seed } => {
            let x = load_complex(complex)?;
            let n = load_presheaf(presheaf_src, x.clone())?;
            let n2 = match presheaf_dst {
                Some(p) => load_presheaf(p, x)?,
                None => n.clone(),
            };
            let faith = faithfulness_check(&n, &n2, *trials, *seed)?;
            let full = fullness_roundtrip(&n, &n2, *trials, *seed)?;
            eprintln!("roundtrip took {:.3} s", full.elapsed.as_secs_f64());
            let passed = faith.passed() && full.all_passed();
            let out = match fmt {
                Format::Machine => machine(&serde_json::json!({ "faithfulness": faith, "fullness": full }))?,
                Format::Text => {
                    let mut s = String::new();
                    writeln!(
                        s,
                        "faithfulness: {} nonzero morphisms stayed nonzero, {} collapsed, zero ↦ zero: {}",
                        faith.nonzero_preserved,
                        faith.failures.len(),
                        faith.zero_maps_to_zero
                    )?;
                    writeln!(s, "fullness: {}/{} reconstructed exactly", full.passed, full.trials)?;
                    for f in &full.failures {
                        writeln!(s, "FAIL trial {}: {}", f.trial, f.detail)?;
                    }
                    s
                }
            };
            Ok(Outcome::new(passed, out))
        }
    }
}
