//! JSON documents read and written by the `cupi` binary.
//!
//! Simplices are written as `"v0,v1,..."`. Sparse matrices are lists of
//! `[row, col, value]` triplets. Stalk generators are numbered stalk-wide in
//! order of ascending degree; morphism components are given per degree with
//! indices local to that degree.
//!
//! ```json
//! { "maximal_simplices": [[0, 1], [0, 2]] }
//!
//! { "stalks": { "0,1": { "generators": { "0": 1 },
//!                        "differential": [],
//!                        "restrictions": { "0": [[0, 0, 1]] } } } }
//!
//! { "components": { "0,1": { "0": [[0, 0, 2]] } } }
//!
//! { "entries": [[0, 0, 1]] }
//! ```

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::assembly::{AssemblyComplex, ComoduleMorphism};
use crate::complex::{Simplex, SimplicialComplex};
use crate::gradedalg::{ChainComplexData, GradedBasis, GradedMatrix};
use crate::presheaf::{Presheaf, PresheafMorphism};
use crate::Coeff;

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{file}: {source}")]
    Read { file: String, source: std::io::Error },
    #[error("{file}: line {line}, column {column}: {message}")]
    Syntax { file: String, line: usize, column: usize, message: String },
    #[error("{file}: field {field}: {message}")]
    Field { file: String, field: String, message: String },
}

pub type Triplet = (usize, usize, Coeff);

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct ComplexDoc {
    pub maximal_simplices: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct StalkDoc {
    #[serde(default)]
    pub generators: BTreeMap<i32, usize>,
    #[serde(default)]
    pub differential: Vec<Triplet>,
    #[serde(default)]
    pub restrictions: BTreeMap<String, Vec<Triplet>>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct PresheafDoc {
    pub stalks: BTreeMap<String, StalkDoc>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct MorphismDoc {
    pub components: BTreeMap<String, BTreeMap<i32, Vec<Triplet>>>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct MapDoc {
    pub entries: Vec<Triplet>,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct BasisRecord {
    pub index: usize,
    pub simplex: String,
    pub generator: usize,
    pub degree: i32,
}

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct AssemblyDoc {
    pub basis: Vec<BasisRecord>,
    pub differential: Vec<Triplet>,
}

pub fn read_file(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::Read { file: path.display().to_string(), source })
}

fn parse_json<T: for<'de> Deserialize<'de>>(text: &str, file: &str) -> Result<T, IoError> {
    serde_json::from_str(text).map_err(|e| IoError::Syntax {
        file: file.to_string(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

fn field_error(file: &str, field: impl Into<String>, message: impl ToString) -> IoError {
    IoError::Field { file: file.to_string(), field: field.into(), message: message.to_string() }
}

pub fn parse_complex(text: &str, file: &str) -> Result<SimplicialComplex, IoError> {
    let doc: ComplexDoc = parse_json(text, file)?;
    complex_from_doc(&doc).map_err(|e| field_error(file, "maximal_simplices", e))
}

pub fn complex_from_doc(doc: &ComplexDoc) -> Result<SimplicialComplex, crate::complex::ComplexError> {
    SimplicialComplex::from_maximal(doc.maximal_simplices.iter().cloned())
}

pub fn complex_to_doc(x: &SimplicialComplex) -> ComplexDoc {
    ComplexDoc { maximal_simplices: x.maximal_simplices().iter().map(|s| s.vertices().to_vec()).collect() }
}

fn stalk_basis(generators: &BTreeMap<i32, usize>) -> GradedBasis {
    let ranks: Vec<(i32, usize)> = generators.iter().map(|(&d, &n)| (d, n)).filter(|&(_, n)| n > 0).collect();
    GradedBasis::from_ranks(&ranks)
}

fn lookup(x: &SimplicialComplex, key: &str, file: &str, field: &str) -> Result<usize, IoError> {
    let s: Simplex = key.parse().map_err(|e| field_error(file, field, e))?;
    x.index_of(&s).ok_or_else(|| field_error(file, field, format!("{key:?} is not a simplex of the complex")))
}

pub fn parse_presheaf(text: &str, file: &str, complex: Arc<SimplicialComplex>) -> Result<Presheaf, IoError> {
    let doc: PresheafDoc = parse_json(text, file)?;
    presheaf_from_doc(&doc, file, complex)
}

pub fn presheaf_from_doc(doc: &PresheafDoc, file: &str, complex: Arc<SimplicialComplex>) -> Result<Presheaf, IoError> {
    let mut stalk_docs: Vec<Option<(&str, &StalkDoc)>> = vec![None; complex.len()];
    for (key, s) in &doc.stalks {
        let field = format!("stalks.{key:?}");
        let i = lookup(&complex, key, file, &field)?;
        stalk_docs[i] = Some((key, s));
    }
    let bases: Vec<GradedBasis> = stalk_docs
        .iter()
        .map(|s| s.map_or_else(GradedBasis::empty, |(_, d)| stalk_basis(&d.generators)))
        .collect();
    let mut stalks = Vec::with_capacity(complex.len());
    for (i, s) in stalk_docs.iter().enumerate() {
        let b = &bases[i];
        let stalk = match s {
            None => ChainComplexData::zero(),
            Some((key, d)) => {
                let field = format!("stalks.{key:?}.differential");
                let m = GradedMatrix::from_triplets(b.clone(), b.clone(), -1, &d.differential)
                    .map_err(|e| field_error(file, &field, e))?;
                ChainComplexData::new(b.clone(), m).map_err(|e| field_error(file, &field, e))?
            }
        };
        stalks.push(stalk);
    }
    let mut restrictions = BTreeMap::new();
    for (y, s) in stalk_docs.iter().enumerate() {
        let Some((key, d)) = s else { continue };
        for (facet, trip) in &d.restrictions {
            let field = format!("stalks.{key:?}.restrictions.{facet:?}");
            let x = lookup(&complex, facet, file, &field)?;
            if !complex.codim1_relations().contains(&(x, y)) {
                return Err(field_error(file, &field, format!("{facet:?} is not a facet of {key:?}")));
            }
            let m = GradedMatrix::from_triplets(bases[y].clone(), bases[x].clone(), 0, trip)
                .map_err(|e| field_error(file, &field, e))?;
            restrictions.insert((x, y), m);
        }
    }
    Presheaf::new(complex, stalks, restrictions).map_err(|e| field_error(file, "stalks", e))
}

pub fn presheaf_to_doc(n: &Presheaf) -> PresheafDoc {
    let complex = n.complex();
    let mut doc = PresheafDoc::default();
    for (i, s) in complex.simplices().iter().enumerate() {
        let stalk = n.stalk(i);
        let mut restrictions = BTreeMap::new();
        for f in s.facets() {
            let x = complex.index_of(&f).expect("closed under faces");
            let r = &n.codim1_restrictions()[&(x, i)];
            if !r.is_zero() {
                restrictions.insert(f.to_string(), r.triplets());
            }
        }
        if stalk.rank() == 0 && restrictions.is_empty() {
            continue;
        }
        doc.stalks.insert(
            s.to_string(),
            StalkDoc {
                generators: stalk.basis().ranks().into_iter().collect(),
                differential: stalk.differential().triplets(),
                restrictions,
            },
        );
    }
    doc
}

/// `(degree, local index)` of every stalk-wide generator index.
fn local_positions(b: &GradedBasis) -> Vec<(i32, usize)> {
    let mut seen: BTreeMap<i32, usize> = BTreeMap::new();
    (0..b.len())
        .map(|g| {
            let d = b.degree(g);
            let k = seen.entry(d).or_default();
            *k += 1;
            (d, *k - 1)
        })
        .collect()
}

pub fn parse_morphism(text: &str, file: &str, source: &Presheaf, target: &Presheaf) -> Result<PresheafMorphism, IoError> {
    let doc: MorphismDoc = parse_json(text, file)?;
    morphism_from_doc(&doc, file, source, target)
}

pub fn morphism_from_doc(
    doc: &MorphismDoc,
    file: &str,
    source: &Presheaf,
    target: &Presheaf,
) -> Result<PresheafMorphism, IoError> {
    let complex = source.complex();
    let mut trip: Vec<Vec<Triplet>> = vec![Vec::new(); complex.len()];
    for (key, per_degree) in &doc.components {
        let field = format!("components.{key:?}");
        let x = lookup(complex, key, file, &field)?;
        let (sb, tb) = (source.stalk(x).basis(), target.stalk(x).basis());
        for (&d, entries) in per_degree {
            let field = format!("components.{key:?}.{d:?}");
            let (cols, rows) = (sb.in_degree(d), tb.in_degree(d));
            for &(r, c, v) in entries {
                let (Some(&row), Some(&col)) = (rows.get(r), cols.get(c)) else {
                    return Err(field_error(file, &field, format!("entry ({r}, {c}) outside the degree-{d} block")));
                };
                trip[x].push((row, col, v));
            }
        }
    }
    let components = (0..complex.len())
        .map(|x| {
            GradedMatrix::from_triplets(source.stalk(x).basis().clone(), target.stalk(x).basis().clone(), 0, &trip[x])
                .map_err(|e| field_error(file, "components", e))
        })
        .collect::<Result<Vec<_>, _>>()?;
    PresheafMorphism::new(source, target, components).map_err(|e| field_error(file, "components", e))
}

pub fn morphism_to_doc(f: &PresheafMorphism, source: &Presheaf) -> MorphismDoc {
    let complex = source.complex();
    let mut doc = MorphismDoc::default();
    for (x, s) in complex.simplices().iter().enumerate() {
        let m = f.component(x);
        if m.is_zero() {
            continue;
        }
        let (src_pos, dst_pos) = (local_positions(m.source()), local_positions(m.target()));
        let mut per_degree: BTreeMap<i32, Vec<Triplet>> = BTreeMap::new();
        for (r, c, v) in m.triplets() {
            let (d, lc) = src_pos[c];
            per_degree.entry(d).or_default().push((dst_pos[r].1, lc, v));
        }
        for entries in per_degree.values_mut() {
            entries.sort_unstable();
        }
        doc.components.insert(s.to_string(), per_degree);
    }
    doc
}

pub fn parse_map(
    text: &str,
    file: &str,
    source: Arc<AssemblyComplex>,
    target: Arc<AssemblyComplex>,
) -> Result<ComoduleMorphism, IoError> {
    let doc: MapDoc = parse_json(text, file)?;
    ComoduleMorphism::from_triplets(source, target, &doc.entries).map_err(|e| field_error(file, "entries", e))
}

pub fn map_to_doc(f: &ComoduleMorphism) -> MapDoc {
    let mut entries = f.map().triplets();
    entries.sort_unstable();
    MapDoc { entries }
}

pub fn assembly_to_doc(a: &AssemblyComplex) -> AssemblyDoc {
    let basis = a
        .pairs()
        .iter()
        .enumerate()
        .map(|(index, p)| BasisRecord {
            index,
            simplex: a.complex().simplex(p.simplex).to_string(),
            generator: p.generator,
            degree: a.degree(index),
        })
        .collect();
    let mut differential = a.differential().triplets();
    differential.sort_unstable();
    AssemblyDoc { basis, differential }
}
