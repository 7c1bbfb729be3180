//! Graded free modules, sparse integer matrices between them, chain
//! complexes, tensor products and mod 2 cohomology.
//!
//! Sign conventions live here and nowhere else:
//!
//! - tensor differential `∂(a⊗b) = ∂a⊗b + (-1)^{|a|} a⊗∂b`;
//! - transposition `T(a⊗b) = (-1)^{|a||b|} b⊗a`;
//! - hom differential `∂(f) = ∂∘f - (-1)^{|f|} f∘∂`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::lincomb::LinComb;
use crate::{ArithmeticError, Coeff};

/// A formal chain in generator coordinates of some [`GradedBasis`].
pub type FormalChain = LinComb<usize>;

/// `(-1)^n`.
pub fn sign(n: i64) -> Coeff {
    if n.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Sign of the Koszul transposition `a⊗b ↦ b⊗a`.
pub fn koszul_sign(deg_a: i64, deg_b: i64) -> Coeff {
    sign(deg_a * deg_b)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GradedError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Arithmetic(#[from] ArithmeticError),
}

/// A generator of a graded free module.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Generator {
    pub degree: i32,
    pub label: String,
}

#[derive(PartialEq, Eq)]
struct BasisInner {
    generators: Vec<Generator>,
    lookup: HashMap<(i32, String), usize>,
}

/// An ordered list of labelled generators, each with a degree.
///
/// Cloning is cheap; bases are shared between a complex and its matrices.
#[derive(Clone)]
pub struct GradedBasis(Arc<BasisInner>);

impl PartialEq for GradedBasis {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.generators == other.0.generators
    }
}

impl Eq for GradedBasis {}

impl fmt::Debug for GradedBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.0.generators.iter().map(|g| format!("{}@{}", g.label, g.degree)))
            .finish()
    }
}

impl GradedBasis {
    /// Labels must be unique within each degree.
    pub fn new(generators: Vec<(i32, String)>) -> Result<Self, GradedError> {
        let mut lookup = HashMap::with_capacity(generators.len());
        let mut gens = Vec::with_capacity(generators.len());
        for (i, (degree, label)) in generators.into_iter().enumerate() {
            if lookup.insert((degree, label.clone()), i).is_some() {
                return Err(GradedError::Shape(format!(
                    "duplicate generator {label:?} in degree {degree}"
                )));
            }
            gens.push(Generator { degree, label });
        }
        Ok(Self(Arc::new(BasisInner { generators: gens, lookup })))
    }

    /// Generators labelled `0, 1, …` within each degree, degrees ascending.
    pub fn from_ranks(ranks: &[(i32, usize)]) -> Self {
        let mut sorted = ranks.to_vec();
        sorted.sort_by_key(|&(d, _)| d);
        let gens = sorted
            .iter()
            .flat_map(|&(d, n)| (0..n).map(move |k| (d, k.to_string())))
            .collect();
        Self::new(gens).expect("labels unique per degree")
    }

    pub fn empty() -> Self {
        Self::new(Vec::new()).expect("empty")
    }

    pub fn len(&self) -> usize {
        self.0.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.generators.is_empty()
    }

    pub fn degree(&self, i: usize) -> i32 {
        self.0.generators[i].degree
    }

    pub fn label(&self, i: usize) -> &str {
        &self.0.generators[i].label
    }

    pub fn generators(&self) -> &[Generator] {
        &self.0.generators
    }

    pub fn find(&self, degree: i32, label: &str) -> Option<usize> {
        self.0.lookup.get(&(degree, label.to_string())).copied()
    }

    /// Indices of the generators in degree `d`, in basis order.
    pub fn in_degree(&self, d: i32) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.degree(i) == d).collect()
    }

    /// Sorted distinct degrees.
    pub fn degrees(&self) -> Vec<i32> {
        let mut ds: Vec<i32> = self.0.generators.iter().map(|g| g.degree).collect();
        ds.sort_unstable();
        ds.dedup();
        ds
    }

    /// `(degree, count)` pairs, degrees ascending.
    pub fn ranks(&self) -> Vec<(i32, usize)> {
        self.degrees().into_iter().map(|d| (d, self.in_degree(d).len())).collect()
    }

    /// Degree of a homogeneous chain; `None` for zero or inhomogeneous chains.
    pub fn homogeneous_degree(&self, c: &FormalChain) -> Option<i32> {
        let mut it = c.keys().map(|&k| self.degree(k));
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }
}

/// A sparse integer matrix of fixed degree between graded bases, stored by columns.
#[derive(Clone, PartialEq, Eq)]
pub struct GradedMatrix {
    source: GradedBasis,
    target: GradedBasis,
    shift: i32,
    columns: Vec<FormalChain>,
}

impl fmt::Debug for GradedMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GradedMatrix(shift {}, {:?})", self.shift, self.triplets())
    }
}

impl GradedMatrix {
    /// Column `j` is the image of source generator `j`; it must land in degree `deg(j) + shift`.
    pub fn new(
        source: GradedBasis,
        target: GradedBasis,
        shift: i32,
        columns: Vec<FormalChain>,
    ) -> Result<Self, GradedError> {
        if columns.len() != source.len() {
            return Err(GradedError::Shape(format!(
                "{} columns for a source of rank {}",
                columns.len(),
                source.len()
            )));
        }
        for (j, col) in columns.iter().enumerate() {
            for &i in col.keys() {
                if i >= target.len() {
                    return Err(GradedError::Shape(format!(
                        "row {i} out of range for a target of rank {}",
                        target.len()
                    )));
                }
                if target.degree(i) != source.degree(j) + shift {
                    return Err(GradedError::Shape(format!(
                        "entry ({i},{j}) maps degree {} to degree {}, expected shift {shift}",
                        source.degree(j),
                        target.degree(i)
                    )));
                }
            }
        }
        Ok(Self { source, target, shift, columns })
    }

    /// Builds from `(row, col, value)` triplets; repeated positions are summed.
    pub fn from_triplets(
        source: GradedBasis,
        target: GradedBasis,
        shift: i32,
        triplets: &[(usize, usize, Coeff)],
    ) -> Result<Self, GradedError> {
        let mut columns = vec![FormalChain::zero(); source.len()];
        for &(i, j, v) in triplets {
            if j >= source.len() {
                return Err(GradedError::Shape(format!(
                    "column {j} out of range for a source of rank {}",
                    source.len()
                )));
            }
            columns[j].add_term(i, v)?;
        }
        Self::new(source, target, shift, columns)
    }

    pub fn identity(basis: &GradedBasis) -> Self {
        let columns = (0..basis.len()).map(|j| FormalChain::from_term(j, 1)).collect();
        Self { source: basis.clone(), target: basis.clone(), shift: 0, columns }
    }

    pub fn zero(source: &GradedBasis, target: &GradedBasis, shift: i32) -> Self {
        Self {
            source: source.clone(),
            target: target.clone(),
            shift,
            columns: vec![FormalChain::zero(); source.len()],
        }
    }

    pub fn source(&self) -> &GradedBasis {
        &self.source
    }

    pub fn target(&self) -> &GradedBasis {
        &self.target
    }

    pub fn shift(&self) -> i32 {
        self.shift
    }

    pub fn column(&self, j: usize) -> &FormalChain {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[FormalChain] {
        &self.columns
    }

    pub fn entry(&self, i: usize, j: usize) -> Coeff {
        self.columns[j].coeff(&i)
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(LinComb::is_zero)
    }

    /// Nonzero entries as `(row, col, value)`, column-major.
    pub fn triplets(&self) -> Vec<(usize, usize, Coeff)> {
        self.columns
            .iter()
            .enumerate()
            .flat_map(|(j, col)| col.iter().map(move |(&i, v)| (i, j, v)))
            .collect()
    }

    pub fn apply(&self, c: &FormalChain) -> Result<FormalChain, ArithmeticError> {
        let mut out = FormalChain::zero();
        for (&j, v) in c.iter() {
            out.add_scaled(&self.columns[j], v)?;
        }
        Ok(out)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &GradedMatrix) -> Result<GradedMatrix, GradedError> {
        if other.target != self.source {
            return Err(GradedError::Shape("composition of incompatible matrices".into()));
        }
        let columns = other.columns.iter().map(|c| self.apply(c)).collect::<Result<_, _>>()?;
        Ok(GradedMatrix {
            source: other.source.clone(),
            target: self.target.clone(),
            shift: self.shift + other.shift,
            columns,
        })
    }

    /// `self + scale * other`.
    pub fn add_scaled(&self, other: &GradedMatrix, scale: Coeff) -> Result<GradedMatrix, GradedError> {
        if self.source != other.source || self.target != other.target || self.shift != other.shift {
            return Err(GradedError::Shape("sum of matrices with different shapes".into()));
        }
        let mut out = self.clone();
        for (a, b) in out.columns.iter_mut().zip(&other.columns) {
            a.add_scaled(b, scale)?;
        }
        Ok(out)
    }

    pub fn scaled(&self, scale: Coeff) -> Result<GradedMatrix, GradedError> {
        let mut out = self.clone();
        for c in &mut out.columns {
            *c = c.scaled(scale)?;
        }
        Ok(out)
    }

    /// Restricts to the given source and target generators (by index), relabelling.
    pub fn submatrix(
        &self,
        source: &GradedBasis,
        source_idx: &[usize],
        target: &GradedBasis,
        target_idx: &[usize],
    ) -> Result<GradedMatrix, GradedError> {
        let inv: HashMap<usize, usize> =
            target_idx.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        let columns = source_idx
            .iter()
            .map(|&j| self.columns[j].map_keys(|i| inv.get(i).copied()))
            .collect::<Result<Vec<_>, _>>()?;
        GradedMatrix::new(source.clone(), target.clone(), self.shift, columns)
    }
}

/// A free chain complex: a graded basis with a degree `-1` differential squaring to zero.
#[derive(Clone, PartialEq, Eq)]
pub struct ChainComplexData {
    basis: GradedBasis,
    differential: GradedMatrix,
}

impl fmt::Debug for ChainComplexData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChainComplexData")
            .field("basis", &self.basis)
            .field("differential", &self.differential.triplets())
            .finish()
    }
}

impl ChainComplexData {
    /// Checks the shape and `∂∘∂ = 0` exactly.
    pub fn new(basis: GradedBasis, differential: GradedMatrix) -> Result<Self, GradedError> {
        if differential.source != basis || differential.target != basis {
            return Err(GradedError::Shape("differential must be an endomorphism of the basis".into()));
        }
        if differential.shift != -1 {
            return Err(GradedError::Shape(format!(
                "differential has degree {}, expected -1",
                differential.shift
            )));
        }
        let square = differential.compose(&differential)?;
        if !square.is_zero() {
            return Err(GradedError::Shape("differential does not square to zero".into()));
        }
        Ok(Self { basis, differential })
    }

    pub(crate) fn new_unchecked(basis: GradedBasis, differential: GradedMatrix) -> Self {
        Self { basis, differential }
    }

    pub fn zero() -> Self {
        let basis = GradedBasis::empty();
        let differential = GradedMatrix::zero(&basis, &basis, -1);
        Self { basis, differential }
    }

    /// `Z` concentrated in degree `d`.
    pub fn integers(d: i32) -> Self {
        let basis = GradedBasis::from_ranks(&[(d, 1)]);
        let differential = GradedMatrix::zero(&basis, &basis, -1);
        Self { basis, differential }
    }

    pub fn basis(&self) -> &GradedBasis {
        &self.basis
    }

    pub fn differential(&self) -> &GradedMatrix {
        &self.differential
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn boundary(&self, c: &FormalChain) -> Result<FormalChain, ArithmeticError> {
        self.differential.apply(c)
    }

    pub fn differential_squares_to_zero(&self) -> Result<bool, GradedError> {
        Ok(self.differential.compose(&self.differential)?.is_zero())
    }
}

/// `A ⊗ B` with generators `(a, b)` ordered by `a` then `b` and the Koszul differential.
pub fn tensor_complex(a: &ChainComplexData, b: &ChainComplexData) -> Result<ChainComplexData, GradedError> {
    let (na, nb) = (a.rank(), b.rank());
    let gens = (0..na)
        .flat_map(|i| {
            (0..nb).map(move |j| {
                (
                    a.basis.degree(i) + b.basis.degree(j),
                    format!("({})⊗({})", a.basis.label(i), b.basis.label(j)),
                )
            })
        })
        .collect();
    let basis = GradedBasis::new(gens)?;
    let mut columns = Vec::with_capacity(na * nb);
    for i in 0..na {
        let sign_a = sign(a.basis.degree(i) as i64);
        for j in 0..nb {
            let mut col = FormalChain::zero();
            for (&k, v) in a.differential.column(i).iter() {
                col.add_term(k * nb + j, v)?;
            }
            for (&k, v) in b.differential.column(j).iter() {
                col.add_term(i * nb + k, v * sign_a)?;
            }
            columns.push(col);
        }
    }
    let differential = GradedMatrix::new(basis.clone(), basis.clone(), -1, columns)?;
    ChainComplexData::new(basis, differential)
}

/// The hom differential `∂_B ∘ f - (-1)^{|f|} f ∘ ∂_A`.
pub fn hom_differential(
    f: &GradedMatrix,
    a: &ChainComplexData,
    b: &ChainComplexData,
) -> Result<GradedMatrix, GradedError> {
    if f.source != a.basis || f.target != b.basis {
        return Err(GradedError::Shape("map does not go between the given complexes".into()));
    }
    let left = b.differential.compose(f)?;
    let right = f.compose(&a.differential)?;
    left.add_scaled(&right, -sign(f.shift as i64))
}

/// Whether `f` is closed under the hom differential (a chain map up to the sign convention).
pub fn verify_chain_map(
    f: &GradedMatrix,
    a: &ChainComplexData,
    b: &ChainComplexData,
) -> Result<bool, GradedError> {
    Ok(hom_differential(f, a, b)?.is_zero())
}

// ---------------------------------------------------------------------------
// F_2 linear algebra

/// A bit-packed vector over the two-element field.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct F2Vec {
    words: Vec<u64>,
    len: usize,
}

impl fmt::Debug for F2Vec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (0..self.len).map(|i| if self.get(i) { '1' } else { '0' }).collect();
        write!(f, "F2Vec({s})")
    }
}

impl F2Vec {
    pub fn zeros(len: usize) -> Self {
        Self { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            v.set(i, b);
        }
        v
    }

    pub fn from_ones(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in ones {
            v.flip(i);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, b: bool) {
        if b {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &F2Vec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Inner product over F_2.
    pub fn dot(&self, other: &F2Vec) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum::<u32>()
            % 2
            == 1
    }

    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i) as u8).collect()
    }
}

/// Echelon rows of a subspace, each tagged with coordinates in a chosen basis.
#[derive(Clone, Debug)]
struct TaggedEchelon {
    rows: Vec<(usize, F2Vec, F2Vec)>,
}

impl TaggedEchelon {
    /// Reduces `v` in place; returns the accumulated tag.
    fn reduce(&self, v: &mut F2Vec, tag: &mut F2Vec) {
        for (pivot, row, t) in &self.rows {
            if v.get(*pivot) {
                v.xor_assign(row);
                tag.xor_assign(t);
            }
        }
    }

    /// Inserts a nonzero reduced vector.
    fn insert(&mut self, v: F2Vec, tag: F2Vec) {
        let pivot = v.first_one().expect("reduced vector is nonzero");
        // keep rows fully reduced at their pivots so a single pass suffices
        for (_, row, t) in &mut self.rows {
            if row.get(pivot) {
                row.xor_assign(&v);
                t.xor_assign(&tag);
            }
        }
        self.rows.push((pivot, v, tag));
    }
}

/// Basis of the nullspace of the F_2 matrix whose rows are `rows` (each of length `ncols`).
pub fn f2_nullspace(rows: &[F2Vec], ncols: usize) -> Vec<F2Vec> {
    let mut ech = TaggedEchelon { rows: Vec::new() };
    for r in rows {
        let mut v = r.clone();
        let mut t = F2Vec::zeros(0);
        ech.reduce(&mut v, &mut t);
        if !v.is_zero() {
            ech.insert(v, F2Vec::zeros(0));
        }
    }
    let pivots: HashMap<usize, usize> =
        ech.rows.iter().enumerate().map(|(r, (p, _, _))| (*p, r)).collect();
    let mut out = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains_key(c)) {
        let mut v = F2Vec::unit(ncols, free);
        for (p, row, _) in &ech.rows {
            if row.get(free) {
                v.set(*p, true);
            }
        }
        out.push(v);
    }
    out
}

/// Rank of a set of F_2 vectors.
pub fn f2_rank(vectors: &[F2Vec]) -> usize {
    let mut ech = TaggedEchelon { rows: Vec::new() };
    for r in vectors {
        let mut v = r.clone();
        let mut t = F2Vec::zeros(0);
        ech.reduce(&mut v, &mut t);
        if !v.is_zero() {
            ech.insert(v, F2Vec::zeros(0));
        }
    }
    ech.rows.len()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CohomologyError {
    #[error("cochain of length {got} does not match the {expected} generators in degree {degree}")]
    Length { degree: i32, expected: usize, got: usize },
    #[error("cochain in degree {0} is not a cocycle")]
    NotCocycle(i32),
}

/// Mod 2 cohomology of one degree: chosen cocycle representatives and a reducer.
#[derive(Clone, Debug)]
struct CohomologyDegree {
    degree: i32,
    generators: Vec<usize>,
    representatives: Vec<F2Vec>,
    coboundary_spanning: Vec<F2Vec>,
    reducer: TaggedEchelon,
}

/// `H^•(C; F_2)` with a fixed basis of cocycle representatives per degree.
///
/// Cochains of degree `k` are indexed by the degree-`k` generators of `C`
/// in basis order.
#[derive(Clone, Debug)]
pub struct Field2Space {
    complex: ChainComplexData,
    degrees: Vec<CohomologyDegree>,
}

impl Field2Space {
    fn find(&self, k: i32) -> Option<&CohomologyDegree> {
        self.degrees.iter().find(|d| d.degree == k)
    }

    /// Degrees in which `C` has generators.
    pub fn degrees(&self) -> Vec<i32> {
        self.degrees.iter().map(|d| d.degree).collect()
    }

    pub fn dim(&self, k: i32) -> usize {
        self.find(k).map_or(0, |d| d.representatives.len())
    }

    /// Betti numbers mod 2 as `(degree, dim)`.
    pub fn betti(&self) -> Vec<(i32, usize)> {
        self.degrees.iter().map(|d| (d.degree, d.representatives.len())).collect()
    }

    /// Generators of `C` in degree `k`, which index the degree-`k` cochains.
    pub fn cochain_generators(&self, k: i32) -> &[usize] {
        self.find(k).map_or(&[], |d| &d.generators)
    }

    pub fn representative(&self, k: i32, j: usize) -> &F2Vec {
        &self.find(k).expect("degree present").representatives[j]
    }

    pub fn representatives(&self, k: i32) -> &[F2Vec] {
        self.find(k).map_or(&[], |d| &d.representatives)
    }

    /// A spanning set of the coboundaries in degree `k`.
    pub fn coboundary_spanning_set(&self, k: i32) -> &[F2Vec] {
        self.find(k).map_or(&[], |d| &d.coboundary_spanning)
    }

    /// `δα`, a cochain of degree `k + 1`.
    pub fn coboundary(&self, k: i32, alpha: &F2Vec) -> Result<F2Vec, CohomologyError> {
        let gens = self.cochain_generators(k);
        if alpha.len() != gens.len() {
            return Err(CohomologyError::Length { degree: k, expected: gens.len(), got: alpha.len() });
        }
        let up = self.cochain_generators(k + 1);
        Ok(coboundary_vector(&self.complex, gens, up, alpha))
    }

    pub fn is_cocycle(&self, k: i32, alpha: &F2Vec) -> Result<bool, CohomologyError> {
        Ok(self.coboundary(k, alpha)?.is_zero())
    }

    /// Coordinates of the class of a cocycle in the representative basis.
    pub fn reduce(&self, k: i32, alpha: &F2Vec) -> Result<F2Vec, CohomologyError> {
        if !self.is_cocycle(k, alpha)? {
            return Err(CohomologyError::NotCocycle(k));
        }
        let Some(deg) = self.find(k) else {
            return Ok(F2Vec::zeros(0));
        };
        let mut v = alpha.clone();
        let mut tag = F2Vec::zeros(deg.representatives.len());
        deg.reducer.reduce(&mut v, &mut tag);
        debug_assert!(v.is_zero(), "cocycles lie in the span of the reducer");
        Ok(tag)
    }

    pub fn complex(&self) -> &ChainComplexData {
        &self.complex
    }
}

fn coboundary_vector(c: &ChainComplexData, gens: &[usize], up: &[usize], alpha: &F2Vec) -> F2Vec {
    let pos: HashMap<usize, usize> = gens.iter().enumerate().map(|(p, &g)| (g, p)).collect();
    let mut out = F2Vec::zeros(up.len());
    for (q, &y) in up.iter().enumerate() {
        let mut bit = false;
        for (x, v) in c.differential.column(y).iter() {
            if v % 2 != 0 {
                if let Some(&p) = pos.get(x) {
                    bit ^= alpha.get(p);
                }
            }
        }
        out.set(q, bit);
    }
    out
}

/// Mod 2 cohomology of the dual of `C`, with cocycle representatives per degree.
pub fn f2_cohomology(c: &ChainComplexData) -> Field2Space {
    let basis = c.basis();
    let degrees = basis.degrees();
    let mut out = Vec::new();
    for &k in &degrees {
        let gens = basis.in_degree(k);
        let n = gens.len();
        let pos: HashMap<usize, usize> = gens.iter().enumerate().map(|(p, &g)| (g, p)).collect();
        // rows of δ_k: one per generator y of degree k + 1, entries ∂y mod 2
        let up = basis.in_degree(k + 1);
        let delta_rows: Vec<F2Vec> = up
            .iter()
            .map(|&y| {
                F2Vec::from_ones(
                    n,
                    c.differential
                        .column(y)
                        .iter()
                        .filter(|(_, v)| v % 2 != 0)
                        .filter_map(|(x, _)| pos.get(x).copied()),
                )
            })
            .collect();
        let cocycles = f2_nullspace(&delta_rows, n);
        // coboundaries: δ of unit cochains in degree k - 1
        let coboundaries: Vec<F2Vec> = basis
            .in_degree(k - 1)
            .iter()
            .map(|&x| {
                let mut v = F2Vec::zeros(n);
                for (q, &y) in gens.iter().enumerate() {
                    if c.differential.column(y).coeff(&x) % 2 != 0 {
                        v.flip(q);
                    }
                }
                v
            })
            .collect();
        let mut reducer = TaggedEchelon { rows: Vec::new() };
        for b in &coboundaries {
            let mut v = b.clone();
            let mut t = F2Vec::zeros(0);
            reducer.reduce(&mut v, &mut t);
            if !v.is_zero() {
                reducer.insert(v, F2Vec::zeros(0));
            }
        }
        let mut representatives = Vec::new();
        for z in &cocycles {
            let mut v = z.clone();
            let mut t = F2Vec::zeros(0);
            reducer.reduce(&mut v, &mut t);
            if !v.is_zero() {
                representatives.push(z.clone());
                reducer.insert(v, F2Vec::zeros(0));
            }
        }
        // Rebuild with properly sized tags now that the number of classes is known.
        let r = representatives.len();
        let mut tagged = TaggedEchelon { rows: Vec::new() };
        for b in &coboundaries {
            let mut v = b.clone();
            let mut t = F2Vec::zeros(r);
            tagged.reduce(&mut v, &mut t);
            if !v.is_zero() {
                tagged.insert(v, t);
            }
        }
        for (j, z) in representatives.iter().enumerate() {
            let mut v = z.clone();
            let mut t = F2Vec::unit(r, j);
            tagged.reduce(&mut v, &mut t);
            debug_assert!(!v.is_zero());
            tagged.insert(v, t);
        }
        out.push(CohomologyDegree {
            degree: k,
            generators: gens,
            representatives,
            coboundary_spanning: coboundaries,
            reducer: tagged,
        });
    }
    Field2Space { complex: c.clone(), degrees: out }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::SimplicialComplex;

    fn interval() -> ChainComplexData {
        SimplicialComplex::from_maximal([vec![0, 1]]).unwrap().chain_complex()
    }

    #[test]
    fn unit_of_tensor_product() {
        let b = interval();
        let z = ChainComplexData::integers(0);
        let t = tensor_complex(&z, &b).unwrap();
        assert_eq!(t.differential().triplets(), b.differential().triplets());
        assert_eq!(
            t.basis().generators().iter().map(|g| g.degree).collect::<Vec<_>>(),
            b.basis().generators().iter().map(|g| g.degree).collect::<Vec<_>>()
        );
    }

    #[test]
    fn koszul_boundary_of_edge_tensor_edge() {
        // generators of C([0,1]): 0 = [0], 1 = [1], 2 = [0,1]
        let c = interval();
        let t = tensor_complex(&c, &c).unwrap();
        assert_eq!(t.rank(), 9);
        let top = 2 * 3 + 2;
        let d = t.differential().column(top);
        // ∂([01]⊗[01]) = [1]⊗[01] - [0]⊗[01] - [01]⊗[1] + [01]⊗[0]
        let expected = FormalChain::from_terms([(3 + 2, 1), (2, -1), (6 + 1, -1), (6, 1)]).unwrap();
        assert_eq!(d, &expected);
        let mut signs: Vec<Coeff> = d.iter().map(|(_, v)| v).collect();
        signs.sort();
        assert_eq!(signs, vec![-1, -1, 1, 1]);
    }

    #[test]
    fn tensor_of_tetrahedra_squares_to_zero() {
        let c = SimplicialComplex::from_maximal([vec![0, 1, 2, 3]]).unwrap().chain_complex();
        let t = tensor_complex(&c, &c).unwrap();
        assert_eq!(t.rank(), 225);
        assert!(t.differential_squares_to_zero().unwrap());
    }

    #[test]
    fn chain_map_checks() {
        let c = interval();
        assert!(verify_chain_map(&GradedMatrix::identity(c.basis()), &c, &c).unwrap());
        assert!(verify_chain_map(c.differential(), &c, &c).unwrap());

        // A = (a ↦ b) with |a| = 1; B has zero differential.
        // f(a) = a', f(b) = b' breaks ∂f(a) = f(∂a).
        let ab = GradedBasis::from_ranks(&[(0, 1), (1, 1)]);
        let da = GradedMatrix::from_triplets(ab.clone(), ab.clone(), -1, &[(0, 1, 1)]).unwrap();
        let a = ChainComplexData::new(ab.clone(), da).unwrap();
        let bb = GradedBasis::from_ranks(&[(0, 1), (1, 1)]);
        let b = ChainComplexData::new(bb.clone(), GradedMatrix::zero(&bb, &bb, -1)).unwrap();
        let f = GradedMatrix::from_triplets(ab.clone(), bb.clone(), 0, &[(0, 0, 1), (1, 1, 1)]).unwrap();
        assert!(!verify_chain_map(&f, &a, &b).unwrap());
        let g = GradedMatrix::from_triplets(ab, bb, 0, &[(1, 1, 1)]).unwrap();
        assert!(verify_chain_map(&g, &a, &b).unwrap());
    }

    #[test]
    fn shape_errors() {
        let b = GradedBasis::from_ranks(&[(0, 2)]);
        assert!(GradedMatrix::from_triplets(b.clone(), b.clone(), -1, &[(0, 1, 1)]).is_err());
        assert!(GradedMatrix::from_triplets(b.clone(), b.clone(), 0, &[(2, 1, 1)]).is_err());
        let other = GradedBasis::from_ranks(&[(0, 3)]);
        let f = GradedMatrix::identity(&other);
        let c = ChainComplexData::new(b.clone(), GradedMatrix::zero(&b, &b, -1)).unwrap();
        assert!(verify_chain_map(&f, &c, &c).is_err());
        assert!(GradedBasis::new(vec![(0, "a".into()), (0, "a".into())]).is_err());
    }

    #[test]
    fn nonsquare_zero_differential_rejected() {
        let b = GradedBasis::from_ranks(&[(0, 1), (1, 1), (2, 1)]);
        let d = GradedMatrix::from_triplets(b.clone(), b.clone(), -1, &[(0, 1, 1), (1, 2, 1)]).unwrap();
        assert!(ChainComplexData::new(b, d).is_err());
    }

    #[test]
    fn f2_vectors() {
        let mut v = F2Vec::zeros(130);
        v.set(129, true);
        v.flip(3);
        assert_eq!(v.first_one(), Some(3));
        assert_eq!(v.count_ones(), 2);
        assert_eq!(v.ones().collect::<Vec<_>>(), vec![3, 129]);
        let w = F2Vec::from_ones(130, [3, 4]);
        assert!(v.dot(&w));
        v.xor_assign(&w);
        assert_eq!(v.ones().collect::<Vec<_>>(), vec![4, 129]);
    }

    #[test]
    fn nullspace_is_annihilated() {
        let rows = vec![F2Vec::from_bits(&[true, true, false, true]), F2Vec::from_bits(&[false, true, true, false])];
        let ns = f2_nullspace(&rows, 4);
        assert_eq!(ns.len(), 2);
        for v in &ns {
            for r in &rows {
                assert!(!r.dot(v));
            }
        }
        assert_eq!(f2_rank(&ns), 2);
    }

    #[test]
    fn contractible_cohomology() {
        let c = SimplicialComplex::from_maximal([vec![0, 1, 2]]).unwrap().chain_complex();
        let h = f2_cohomology(&c);
        assert_eq!(h.betti(), vec![(0, 1), (1, 0), (2, 0)]);
    }

    #[test]
    fn circle_cohomology() {
        let c = SimplicialComplex::from_maximal([vec![0, 1], vec![1, 2], vec![0, 2]])
            .unwrap()
            .chain_complex();
        let h = f2_cohomology(&c);
        assert_eq!(h.betti(), vec![(0, 1), (1, 1)]);
    }
}
