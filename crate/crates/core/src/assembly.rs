//! The assembly `A(N)` of a presheaf of chain complexes and its lifted
//! coaction `∇_i: A(N) → C(X) ⊗ A(N)`.
//!
//! Classes are stored on the canonical basis `[x ⊗ b]`, one element for each
//! simplex `x` and generator `b` of `N_x`, ordered by simplex then generator.
//! A representative `[(x → y) ⊗ c]` with `c ∈ N_y` is rewritten to
//! `[x ⊗ N_{x→y}(c)]`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use serde::Serialize;

use crate::complex::{Simplex, SimplicialComplex};
use crate::cupi::{aw_coproduct, transpose, CupError, CupStructure, TensorChain};
use crate::gradedalg::{sign, ChainComplexData, FormalChain, GradedBasis, GradedError, GradedMatrix};
use crate::lincomb::LinComb;
use crate::presheaf::{validate_morphism, validate_presheaf, Presheaf, PresheafError, PresheafMorphism};
use crate::{par, ArithmeticError, Coeff};

/// An element of `C(X) ⊗ A(N)`: simplex factor and canonical basis index.
pub type CoactionValue = LinComb<(Simplex, usize)>;

/// An element of `C(X) ⊗ C(X) ⊗ A(N)`.
pub type DoubleCoactionValue = LinComb<(Simplex, Simplex, usize)>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AssemblyError {
    #[error("presheaf is invalid: {0}")]
    InvalidPresheaf(String),
    #[error("morphism is invalid: {0}")]
    InvalidMorphism(String),
    #[error("map does not go between the given assemblies: {0}")]
    Shape(String),
    #[error("assemblies live on different complexes")]
    DifferentComplexes,
    #[error("no canonical basis element {0}")]
    UnknownPair(usize),
    #[error(transparent)]
    Presheaf(#[from] PresheafError),
    #[error(transparent)]
    Cup(#[from] CupError),
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    Arithmetic(#[from] ArithmeticError),
}

/// A canonical basis element `[x ⊗ b]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct BasisPair {
    /// Index of `x` in the complex.
    pub simplex: usize,
    /// Index of `b` in the basis of `N_x`.
    pub generator: usize,
}

/// `A(N)` on its canonical basis, with a memoized coaction.
pub struct AssemblyComplex {
    presheaf: Arc<Presheaf>,
    cup: Arc<CupStructure>,
    pairs: Vec<BasisPair>,
    offsets: Vec<usize>,
    chains: ChainComplexData,
    memo: RwLock<HashMap<(usize, bool, usize), Arc<CoactionValue>>>,
}

impl fmt::Debug for AssemblyComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AssemblyComplex")
            .field("basis", self.chains.basis())
            .field("differential", &self.chains.differential().triplets())
            .finish()
    }
}

impl PartialEq for AssemblyComplex {
    fn eq(&self, other: &Self) -> bool {
        self.presheaf == other.presheaf && self.chains == other.chains
    }
}

/// Assembles a validated presheaf.
pub fn assemble(n: &Presheaf) -> Result<AssemblyComplex, AssemblyError> {
    let cup = Arc::new(CupStructure::new(n.complex_arc().clone()));
    AssemblyComplex::with_cup(Arc::new(n.clone()), cup)
}

impl AssemblyComplex {
    /// Assembles `n`, sharing an existing cup-i cache on the same complex.
    pub fn with_cup(n: Arc<Presheaf>, cup: Arc<CupStructure>) -> Result<Self, AssemblyError> {
        if cup.complex() != n.complex() {
            return Err(AssemblyError::DifferentComplexes);
        }
        let report = validate_presheaf(&n);
        if let Some(f) = report.failures.first() {
            return Err(AssemblyError::InvalidPresheaf(format!(
                "{} failure(s), first {:?} at {}: {}",
                report.failures.len(),
                f.check,
                f.location,
                f.detail
            )));
        }
        let complex = n.complex();
        let mut pairs = Vec::new();
        let mut offsets = Vec::with_capacity(complex.len() + 1);
        let mut gens = Vec::new();
        for (x, s) in complex.simplices().iter().enumerate() {
            offsets.push(pairs.len());
            let stalk = n.stalk(x).basis();
            for b in 0..stalk.len() {
                pairs.push(BasisPair { simplex: x, generator: b });
                gens.push((s.dim() as i32 + stalk.degree(b), format!("{s}|{b}")));
            }
        }
        offsets.push(pairs.len());
        let basis = GradedBasis::new(gens)?;
        let mut columns = Vec::with_capacity(pairs.len());
        for p in &pairs {
            let x = complex.simplex(p.simplex);
            let mut col = FormalChain::zero();
            if x.dim() > 0 {
                for (u, f) in x.facets().into_iter().enumerate() {
                    let fi = complex.index_of(&f).expect("closed under faces");
                    let image = canonical(&n, &offsets, fi, p.simplex, &FormalChain::from_term(p.generator, 1))?;
                    col.add_scaled(&image, sign(u as i64))?;
                }
            }
            let db = n.stalk(p.simplex).differential().column(p.generator);
            let shift = offsets[p.simplex];
            col.add_scaled(&db.map_keys(|k| Some(shift + k))?, sign(x.dim() as i64))?;
            columns.push(col);
        }
        let d = GradedMatrix::new(basis.clone(), basis.clone(), -1, columns)?;
        let chains = ChainComplexData::new(basis, d)?;
        Ok(Self { presheaf: n, cup, pairs, offsets, chains, memo: RwLock::new(HashMap::new()) })
    }

    pub fn presheaf(&self) -> &Presheaf {
        &self.presheaf
    }

    pub fn complex(&self) -> &SimplicialComplex {
        self.presheaf.complex()
    }

    pub fn cup(&self) -> &Arc<CupStructure> {
        &self.cup
    }

    pub fn chains(&self) -> &ChainComplexData {
        &self.chains
    }

    pub fn basis(&self) -> &GradedBasis {
        self.chains.basis()
    }

    pub fn differential(&self) -> &GradedMatrix {
        self.chains.differential()
    }

    pub fn rank(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[BasisPair] {
        &self.pairs
    }

    pub fn pair(&self, index: usize) -> BasisPair {
        self.pairs[index]
    }

    /// Canonical index of `[x ⊗ b]`.
    pub fn index_of(&self, pair: BasisPair) -> Option<usize> {
        let start = *self.offsets.get(pair.simplex)?;
        (start + pair.generator < self.offsets[pair.simplex + 1]).then_some(start + pair.generator)
    }

    /// Indices of the pairs living over simplex `x`.
    pub fn pairs_over(&self, x: usize) -> std::ops::Range<usize> {
        self.offsets[x]..self.offsets[x + 1]
    }

    /// Human-readable name `[x⊗b]` of a basis element.
    pub fn pair_name(&self, index: usize) -> String {
        let p = self.pairs[index];
        format!("[{}⊗{}]", self.complex().simplex(p.simplex), p.generator)
    }

    /// Degree `dim x + deg b` of a basis element.
    pub fn degree(&self, index: usize) -> i32 {
        self.basis().degree(index)
    }

    /// Rewrites `[(x → y) ⊗ c]` on the canonical basis.
    pub fn canonicalize(&self, x: &Simplex, y: &Simplex, c: &FormalChain) -> Result<FormalChain, AssemblyError> {
        let complex = self.complex();
        let xi = complex.index_of(x).ok_or_else(|| PresheafError::NotAFace {
            sub: x.to_string(),
            sup: y.to_string(),
        })?;
        let yi = complex.index_of(y).ok_or_else(|| PresheafError::NotAFace {
            sub: x.to_string(),
            sup: y.to_string(),
        })?;
        canonical(&self.presheaf, &self.offsets, xi, yi, c)
    }

    /// `∇_i` (or `∇ᵀ_i` when `twisted`) of a canonical basis element.
    pub fn nabla(&self, i: usize, twisted: bool, index: usize) -> Result<Arc<CoactionValue>, AssemblyError> {
        if index >= self.pairs.len() {
            return Err(AssemblyError::UnknownPair(index));
        }
        if let Some(v) = self.memo.read().expect("memo lock").get(&(i, twisted, index)) {
            return Ok(v.clone());
        }
        let p = self.pairs[index];
        let complex = self.complex();
        let x = complex.simplex(p.simplex);
        let mut out = CoactionValue::zero();
        if i <= x.dim() {
            let raw = self.cup.cup_i(i, x)?;
            let terms = if twisted { transpose(&raw) } else { (*raw).clone() };
            let c = FormalChain::from_term(p.generator, 1);
            for ((l, r), a) in terms.iter() {
                let ri = complex.index_of(r).expect("face of a member");
                for (&m, v) in canonical(&self.presheaf, &self.offsets, ri, p.simplex, &c)?.iter() {
                    out.add_term((l.clone(), m), a * v)?;
                }
            }
        }
        let out = Arc::new(out);
        self.memo.write().expect("memo lock").insert((i, twisted, index), out.clone());
        Ok(out)
    }

    /// `∇_i` extended linearly; negative `i` gives zero.
    pub fn nabla_chain(&self, i: i64, twisted: bool, m: &FormalChain) -> Result<CoactionValue, AssemblyError> {
        let mut out = CoactionValue::zero();
        if i < 0 {
            return Ok(out);
        }
        for (&p, v) in m.iter() {
            out.add_scaled(&*self.nabla(i as usize, twisted, p)?, v)?;
        }
        Ok(out)
    }

    /// The defining formula of `∇_i` evaluated on a non-canonical
    /// representative `[(x → y) ⊗ c]`, with `c` a generator of `N_y`.
    pub fn nabla_on_representative(
        &self,
        i: usize,
        twisted: bool,
        x: usize,
        y: usize,
        c: usize,
    ) -> Result<CoactionValue, AssemblyError> {
        let complex = self.complex();
        let sx = complex.simplex(x);
        let mut out = CoactionValue::zero();
        if i > sx.dim() {
            return Ok(out);
        }
        let raw = self.cup.cup_i(i, sx)?;
        let terms = if twisted { transpose(&raw) } else { (*raw).clone() };
        let c = FormalChain::from_term(c, 1);
        for ((l, r), a) in terms.iter() {
            let ri = complex.index_of(r).expect("face of a member");
            for (&m, v) in canonical(&self.presheaf, &self.offsets, ri, y, &c)?.iter() {
                out.add_term((l.clone(), m), a * v)?;
            }
        }
        Ok(out)
    }

    /// `∂(s ⊗ m) = ∂s ⊗ m + (-1)^{|s|} s ⊗ ∂m` on `C(X) ⊗ A(N)`.
    pub fn tensor_boundary(&self, v: &CoactionValue) -> Result<CoactionValue, AssemblyError> {
        let mut out = CoactionValue::zero();
        for ((s, m), a) in v.iter() {
            if s.dim() > 0 {
                for (f, e) in s.boundary().iter() {
                    out.add_term((f.clone(), *m), a * e)?;
                }
            }
            let sg = sign(s.dim() as i64);
            for (&k, e) in self.differential().column(*m).iter() {
                out.add_term((s.clone(), k), a * e * sg)?;
            }
        }
        Ok(out)
    }
}

fn canonical(
    n: &Presheaf,
    offsets: &[usize],
    x: usize,
    y: usize,
    c: &FormalChain,
) -> Result<FormalChain, AssemblyError> {
    let r = n.restriction(x, y)?;
    let image = r.apply(c)?;
    Ok(image.map_keys(|k| Some(offsets[x] + k))?)
}

/// `(id ⊗ f)` on `C(X) ⊗ A(N)` for a degree-0 map `f`.
pub fn apply_right(f: &GradedMatrix, v: &CoactionValue) -> Result<CoactionValue, ArithmeticError> {
    let mut out = CoactionValue::zero();
    for ((s, m), a) in v.iter() {
        for (&k, e) in f.column(*m).iter() {
            out.add_term((s.clone(), k), a.checked_mul(e).ok_or(ArithmeticError::Overflow)?)?;
        }
    }
    Ok(out)
}

/// A degree-0 map between two assemblies on their canonical bases.
#[derive(Clone)]
pub struct ComoduleMorphism {
    source: Arc<AssemblyComplex>,
    target: Arc<AssemblyComplex>,
    map: GradedMatrix,
}

impl fmt::Debug for ComoduleMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("ComoduleMorphism").field(&self.map.triplets()).finish()
    }
}

impl PartialEq for ComoduleMorphism {
    fn eq(&self, other: &Self) -> bool {
        self.map == other.map
    }
}

impl ComoduleMorphism {
    /// Checks shapes only; use [`validate_comodule_morphism`] for the identities.
    pub fn new(
        source: Arc<AssemblyComplex>,
        target: Arc<AssemblyComplex>,
        map: GradedMatrix,
    ) -> Result<Self, AssemblyError> {
        if source.complex() != target.complex() {
            return Err(AssemblyError::DifferentComplexes);
        }
        if map.source() != source.basis() || map.target() != target.basis() || map.shift() != 0 {
            return Err(AssemblyError::Shape("expected a degree-0 map A(N) → A(N')".into()));
        }
        Ok(Self { source, target, map })
    }

    /// Builds from `(row, col, value)` triplets on the canonical bases.
    pub fn from_triplets(
        source: Arc<AssemblyComplex>,
        target: Arc<AssemblyComplex>,
        triplets: &[(usize, usize, Coeff)],
    ) -> Result<Self, AssemblyError> {
        let map = GradedMatrix::from_triplets(source.basis().clone(), target.basis().clone(), 0, triplets)
            .map_err(|e| AssemblyError::Shape(e.to_string()))?;
        Self::new(source, target, map)
    }

    pub fn identity(a: Arc<AssemblyComplex>) -> Self {
        let map = GradedMatrix::identity(a.basis());
        Self { source: a.clone(), target: a, map }
    }

    pub fn zero(source: Arc<AssemblyComplex>, target: Arc<AssemblyComplex>) -> Self {
        let map = GradedMatrix::zero(source.basis(), target.basis(), 0);
        Self { source, target, map }
    }

    pub fn source(&self) -> &Arc<AssemblyComplex> {
        &self.source
    }

    pub fn target(&self) -> &Arc<AssemblyComplex> {
        &self.target
    }

    pub fn map(&self) -> &GradedMatrix {
        &self.map
    }

    pub fn is_zero(&self) -> bool {
        self.map.is_zero()
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &ComoduleMorphism) -> Result<Self, AssemblyError> {
        let map = self.map.compose(&first.map)?;
        Ok(Self { source: first.source.clone(), target: self.target.clone(), map })
    }

    /// `∇'_i(f m) - (id ⊗ f)∇_i(m)` on one basis element.
    pub fn equivariance_defect(&self, i: usize, twisted: bool, index: usize) -> Result<CoactionValue, AssemblyError> {
        let lhs = self.target.nabla_chain(i as i64, twisted, self.map.column(index))?;
        let rhs = apply_right(&self.map, &*self.source.nabla(i, twisted, index)?)?;
        Ok(lhs.sub(&rhs)?)
    }

    /// `∂' f - f ∂` on one basis element.
    pub fn chain_map_defect(&self, index: usize) -> Result<FormalChain, AssemblyError> {
        let lhs = self.target.differential().apply(self.map.column(index))?;
        let rhs = self.map.apply(self.source.differential().column(index))?;
        Ok(lhs.sub(&rhs)?)
    }
}

/// `[x ⊗ b] ↦ [x ⊗ F_x(b)]`.
pub fn assemble_morphism(
    f: &PresheafMorphism,
    source: Arc<AssemblyComplex>,
    target: Arc<AssemblyComplex>,
) -> Result<ComoduleMorphism, AssemblyError> {
    let report = validate_morphism(f, source.presheaf(), target.presheaf());
    if let Some(e) = report.failures.first() {
        return Err(AssemblyError::InvalidMorphism(format!("{:?} at {}: {}", e.check, e.location, e.detail)));
    }
    let mut columns = Vec::with_capacity(source.rank());
    for p in source.pairs() {
        let col = f.component(p.simplex).column(p.generator);
        let shift = target.offsets[p.simplex];
        columns.push(col.map_keys(|k| Some(shift + k))?);
    }
    let map = GradedMatrix::new(source.basis().clone(), target.basis().clone(), 0, columns)?;
    ComoduleMorphism::new(source, target, map)
}

/// Which identity a comodule check exercised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComoduleCheck {
    /// `∂∇_i - (-1)^i ∇_i ∂ = ∇_{i-1} + (-1)^i ∇ᵀ_{i-1}` and its mirror.
    ChainRelation,
    Counit,
    Coassociativity,
    /// Agreement on non-canonical representatives.
    WellDefined,
    /// `∇_i = 0` for `i > dim x`, `∇_{dim x}` a single diagonal term.
    SupportBound,
    ChainMap,
    Equivariance,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComoduleFailure {
    pub check: ComoduleCheck,
    /// Canonical index of the basis element the identity was evaluated on.
    pub index: usize,
    pub pair: String,
    pub i: Option<usize>,
    pub twisted: bool,
    /// For well-definedness: the representative's face relation.
    pub representative: Option<String>,
    pub discrepancy: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ComoduleReport {
    pub max_i: usize,
    pub checks: usize,
    pub failures: Vec<ComoduleFailure>,
}

impl ComoduleReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn merge(max_i: usize, parts: Vec<Result<ComoduleReport, AssemblyError>>) -> Result<Self, AssemblyError> {
        let mut out = ComoduleReport { max_i, ..Default::default() };
        for p in parts {
            let p = p?;
            out.checks += p.checks;
            out.failures.extend(p.failures);
        }
        Ok(out)
    }
}

/// Default validation range `0..=dim X + 1`.
pub fn default_max_i(complex: &SimplicialComplex) -> usize {
    complex.dim().map_or(0, |d| d + 1)
}

fn chain_relation_defect(a: &AssemblyComplex, i: usize, twisted: bool, index: usize) -> Result<CoactionValue, AssemblyError> {
    let s = sign(i as i64);
    let mut lhs = a.tensor_boundary(&*a.nabla(i, twisted, index)?)?;
    lhs.add_scaled(&a.nabla_chain(i as i64, twisted, a.differential().column(index))?, -s)?;
    lhs.add_scaled(&a.nabla_chain(i as i64 - 1, twisted, &FormalChain::from_term(index, 1))?, -1)?;
    lhs.add_scaled(&a.nabla_chain(i as i64 - 1, !twisted, &FormalChain::from_term(index, 1))?, -s)?;
    Ok(lhs)
}

fn coassociativity_defect(a: &AssemblyComplex, index: usize) -> Result<DoubleCoactionValue, AssemblyError> {
    let first = a.nabla(0, false, index)?;
    let mut out = DoubleCoactionValue::zero();
    for ((s, m), v) in first.iter() {
        for ((l, r), w) in aw_coproduct(s).iter() {
            out.add_term((l.clone(), r.clone(), *m), v * w)?;
        }
        for ((l, k), w) in a.nabla(0, false, *m)?.iter() {
            out.add_term((s.clone(), l.clone(), *k), -v * w)?;
        }
    }
    Ok(out)
}

fn counit_defect(a: &AssemblyComplex, index: usize) -> Result<FormalChain, AssemblyError> {
    let mut out = FormalChain::from_term(index, -1);
    for ((s, m), v) in a.nabla(0, false, index)?.iter() {
        if s.dim() == 0 {
            out.add_term(*m, v)?;
        }
    }
    Ok(out)
}

fn support_bound_defect(a: &AssemblyComplex, index: usize) -> Result<Option<String>, AssemblyError> {
    let p = a.pair(index);
    let x = a.complex().simplex(p.simplex).clone();
    let n = x.dim();
    for twisted in [false, true] {
        let above = a.nabla(n + 1, twisted, index)?;
        if !above.is_zero() {
            return Ok(Some(format!("∇_{} = {:?}", n + 1, above)));
        }
        let top = a.nabla(n, twisted, index)?;
        let single = top.len() == 1 && top.iter().all(|((s, m), v)| *s == x && *m == index && v.abs() == 1);
        if !single {
            return Ok(Some(format!("∇_{n} = {top:?}")));
        }
    }
    Ok(None)
}

/// Checks the chain relation for `∇` and `∇ᵀ` up to `max_i`, the `∇_0`
/// counit and coassociativity over `(C(X), Δ_0, ε)`, well-definedness on every
/// representative `[(x → y) ⊗ c]`, and the support bound.
pub fn validate_comodule(a: &AssemblyComplex, max_i: usize) -> Result<ComoduleReport, AssemblyError> {
    let complex = a.complex();
    let indices: Vec<usize> = (0..a.rank()).collect();
    let mut parts = par::map(&indices, |&index| -> Result<ComoduleReport, AssemblyError> {
        let mut r = ComoduleReport::default();
        let name = a.pair_name(index);
        let fail = |check, i, twisted, representative, discrepancy: String| ComoduleFailure {
            check,
            index,
            pair: name.clone(),
            i,
            twisted,
            representative,
            discrepancy,
        };
        for i in 0..=max_i {
            for twisted in [false, true] {
                r.checks += 1;
                let d = chain_relation_defect(a, i, twisted, index)?;
                if !d.is_zero() {
                    r.failures.push(fail(ComoduleCheck::ChainRelation, Some(i), twisted, None, format!("{d:?}")));
                }
            }
        }
        r.checks += 1;
        let d = counit_defect(a, index)?;
        if !d.is_zero() {
            r.failures.push(fail(ComoduleCheck::Counit, Some(0), false, None, format!("{d:?}")));
        }
        r.checks += 1;
        let d = coassociativity_defect(a, index)?;
        if !d.is_zero() {
            r.failures.push(fail(ComoduleCheck::Coassociativity, Some(0), false, None, format!("{d:?}")));
        }
        r.checks += 1;
        if let Some(d) = support_bound_defect(a, index)? {
            r.failures.push(fail(ComoduleCheck::SupportBound, None, false, None, d));
        }
        Ok(r)
    });
    // well-definedness: [(x → y) ⊗ c] for every relation and generator c of N_y
    let relations = complex.face_relations();
    parts.extend(par::map(&relations, |&(x, y)| -> Result<ComoduleReport, AssemblyError> {
        let mut r = ComoduleReport::default();
        let rep = format!("{:?}→{:?}", complex.simplex(x), complex.simplex(y));
        for c in 0..a.presheaf().stalk(y).rank() {
            let canon = a.canonicalize(complex.simplex(x), complex.simplex(y), &FormalChain::from_term(c, 1))?;
            for i in 0..=max_i {
                for twisted in [false, true] {
                    r.checks += 1;
                    let lhs = a.nabla_on_representative(i, twisted, x, y, c)?;
                    let rhs = a.nabla_chain(i as i64, twisted, &canon)?;
                    let d = lhs.sub(&rhs)?;
                    if !d.is_zero() {
                        r.failures.push(ComoduleFailure {
                            check: ComoduleCheck::WellDefined,
                            index: a.offsets[y] + c,
                            pair: a.pair_name(a.offsets[y] + c),
                            i: Some(i),
                            twisted,
                            representative: Some(rep.clone()),
                            discrepancy: format!("{d:?}"),
                        });
                    }
                }
            }
        }
        Ok(r)
    }));
    ComoduleReport::merge(max_i, parts)
}

/// Checks `f` is a chain map and `(id ⊗ f)∇_i = ∇'_i f`, `(id ⊗ f)∇ᵀ_i = ∇'ᵀ_i f` for `i ≤ max_i`.
pub fn validate_comodule_morphism(f: &ComoduleMorphism, max_i: usize) -> Result<ComoduleReport, AssemblyError> {
    let src = &f.source;
    let indices: Vec<usize> = (0..src.rank()).collect();
    let parts = par::map(&indices, |&index| -> Result<ComoduleReport, AssemblyError> {
        let mut r = ComoduleReport::default();
        r.checks += 1;
        let d = f.chain_map_defect(index)?;
        if !d.is_zero() {
            r.failures.push(ComoduleFailure {
                check: ComoduleCheck::ChainMap,
                index,
                pair: src.pair_name(index),
                i: None,
                twisted: false,
                representative: None,
                discrepancy: format!("{d:?}"),
            });
        }
        for i in 0..=max_i {
            for twisted in [false, true] {
                r.checks += 1;
                let d = f.equivariance_defect(i, twisted, index)?;
                if !d.is_zero() {
                    r.failures.push(ComoduleFailure {
                        check: ComoduleCheck::Equivariance,
                        index,
                        pair: src.pair_name(index),
                        i: Some(i),
                        twisted,
                        representative: None,
                        discrepancy: format!("{d:?}"),
                    });
                }
            }
        }
        Ok(r)
    });
    ComoduleReport::merge(max_i, parts)
}

/// Recomputes the identity a failure names; true when it still fails.
pub fn replay_failure(f: &ComoduleMorphism, failure: &ComoduleFailure) -> Result<bool, AssemblyError> {
    Ok(match (failure.check, failure.i) {
        (ComoduleCheck::ChainMap, _) => !f.chain_map_defect(failure.index)?.is_zero(),
        (ComoduleCheck::Equivariance, Some(i)) => !f.equivariance_defect(i, failure.twisted, failure.index)?.is_zero(),
        _ => false,
    })
}

/// Transports a coaction value into `C(X) ⊗ C(X)` by sending `[x⊗b]` to `x`.
///
/// For the constant presheaf `Z` this is the identification `A(Z) ≅ C(X)`.
pub fn coaction_as_tensor(a: &AssemblyComplex, v: &CoactionValue) -> TensorChain {
    let mut out = TensorChain::zero();
    for ((s, m), c) in v.iter() {
        let x = a.complex().simplex(a.pair(*m).simplex).clone();
        out.add_term((s.clone(), x), c).expect("small coefficients");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;
    use crate::presheaf::{constant_presheaf, random_presheaf, skyscraper_presheaf, zero_presheaf, RandomPresheafParams};

    fn constant(x: SimplicialComplex) -> Presheaf {
        constant_presheaf(Arc::new(x), &ChainComplexData::integers(0))
    }

    #[test]
    fn constant_presheaf_assembles_to_simplicial_chains() {
        let x = examples::simplex_boundary(3);
        let a = assemble(&constant(x.clone())).unwrap();
        assert_eq!(a.rank(), x.len());
        let c = x.chain_complex();
        assert_eq!(a.differential().triplets(), c.differential().triplets());
        for (i, s) in x.simplices().iter().enumerate() {
            assert_eq!(a.degree(i), s.dim() as i32);
        }
    }

    #[test]
    fn skyscraper_at_a_top_simplex() {
        let x = Arc::new(examples::simplex(2));
        let top: Simplex = "0,1,2".parse().unwrap();
        let n = skyscraper_presheaf(x, &top, &ChainComplexData::integers(0)).unwrap();
        let a = assemble(&n).unwrap();
        assert_eq!(a.rank(), 1);
        assert_eq!(a.degree(0), 2);
        assert!(a.differential().is_zero());
    }

    #[test]
    fn zero_presheaf_gives_zero_complex() {
        let a = assemble(&zero_presheaf(Arc::new(examples::simplex(2)))).unwrap();
        assert_eq!(a.rank(), 0);
        let report = validate_comodule(&a, 3).unwrap();
        assert!(report.passed());
        assert_eq!(report.failures.len(), 0);
    }

    #[test]
    fn canonicalize_cases() {
        let x = Arc::new(examples::simplex(2));
        let a = assemble(&constant((*x).clone())).unwrap();
        let e: Simplex = "0,1".parse().unwrap();
        let t: Simplex = "0,1,2".parse().unwrap();
        let one = FormalChain::from_term(0, 1);
        let ei = x.index_of(&e).unwrap();
        assert_eq!(a.canonicalize(&e, &t, &one).unwrap(), FormalChain::from_term(ei, 1));
        assert_eq!(a.canonicalize(&e, &e, &one).unwrap(), FormalChain::from_term(ei, 1));
        let sky = assemble(&skyscraper_presheaf(x.clone(), &t, &ChainComplexData::integers(0)).unwrap()).unwrap();
        assert!(sky.canonicalize(&e, &t, &one).unwrap().is_zero());
        assert!(a.canonicalize(&t, &e, &one).is_err());
    }

    #[test]
    fn nabla_on_constant_presheaf_is_cup_i() {
        let x = examples::simplex(3);
        let a = assemble(&constant(x.clone())).unwrap();
        let cup = CupStructure::new(Arc::new(x.clone()));
        for (idx, s) in x.simplices().iter().enumerate() {
            for i in 0..=4 {
                let v = a.nabla(i, false, idx).unwrap();
                assert_eq!(coaction_as_tensor(&a, &v), *cup.cup_i(i, s).unwrap());
                let t = a.nabla(i, true, idx).unwrap();
                assert_eq!(coaction_as_tensor(&a, &t), cup.cup_i_t(i, s).unwrap());
            }
        }
    }

    #[test]
    fn random_presheaves_are_comodules() {
        let x = Arc::new(examples::simplex(2));
        for seed in 0..10 {
            let n = random_presheaf(x.clone(), &RandomPresheafParams::default(), seed);
            let a = assemble(&n).unwrap();
            let report = validate_comodule(&a, 3).unwrap();
            assert!(report.passed(), "seed {seed}: {:?}", report.failures);
        }
    }

    #[test]
    fn assembled_morphisms_are_strict() {
        let x = Arc::new(examples::simplex(2));
        let n = random_presheaf(x.clone(), &RandomPresheafParams::default(), 5);
        let hom = crate::presheaf::hom_space(&n, &n).unwrap();
        let f = crate::presheaf::random_morphism(&n, &n, &hom, 9).unwrap();
        let a = Arc::new(assemble(&n).unwrap());
        let af = assemble_morphism(&f, a.clone(), a.clone()).unwrap();
        assert!(validate_comodule_morphism(&af, 3).unwrap().passed());
        let id = assemble_morphism(&PresheafMorphism::identity(&n), a.clone(), a.clone()).unwrap();
        assert_eq!(id, ComoduleMorphism::identity(a.clone()));
        let g = crate::presheaf::random_morphism(&n, &n, &hom, 10).unwrap();
        let ag = assemble_morphism(&g, a.clone(), a.clone()).unwrap();
        let agf = assemble_morphism(&g.after(&f).unwrap(), a.clone(), a.clone()).unwrap();
        assert_eq!(ag.after(&af).unwrap(), agf);
    }

    #[test]
    fn swapping_skyscrapers_on_disjoint_edges_is_not_equivariant() {
        let x = Arc::new(examples::disjoint_edges());
        let z = ChainComplexData::integers(0);
        let e1: Simplex = "0,1".parse().unwrap();
        let e2: Simplex = "2,3".parse().unwrap();
        let n = crate::presheaf::direct_sum(
            &skyscraper_presheaf(x.clone(), &e1, &z).unwrap(),
            &skyscraper_presheaf(x.clone(), &e2, &z).unwrap(),
        )
        .unwrap();
        let a = Arc::new(assemble(&n).unwrap());
        assert_eq!(a.rank(), 2);
        let swap = ComoduleMorphism::from_triplets(a.clone(), a.clone(), &[(0, 1, 1), (1, 0, 1)]).unwrap();
        let report = validate_comodule_morphism(&swap, 2).unwrap();
        assert!(!report.passed());
        assert!(report.failures.iter().all(|f| f.check == ComoduleCheck::Equivariance));
        for failure in &report.failures {
            assert!(replay_failure(&swap, failure).unwrap());
        }
    }
}
