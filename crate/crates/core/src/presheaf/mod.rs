//! Presheaves of chain complexes on the face poset of a simplicial complex,
//! and their strict morphisms.
//!
//! A presheaf is given by a stalk `N_x` for every simplex and a restriction
//! `N_{x→y}: N_y → N_x` for every codimension-one face `x` of `y`.
//! Restrictions along longer face relations are composites, which are
//! well defined when every codimension-two diamond commutes.

mod random;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, RwLock};

use serde::Serialize;

use crate::complex::{Simplex, SimplicialComplex};
use crate::gradedalg::{verify_chain_map, ChainComplexData, FormalChain, GradedBasis, GradedError, GradedMatrix};
use crate::linsolve::integer_nullspace;
use crate::{par, ArithmeticError, Coeff};

pub use random::{random_presheaf, RandomPresheafParams};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PresheafError {
    #[error("expected {expected} stalks, got {got}")]
    StalkCount { expected: usize, got: usize },
    #[error("{0} is not a codimension-one face relation")]
    NotCodimOne(String),
    #[error("{sub} is not a face of {sup}")]
    NotAFace { sub: String, sup: String },
    #[error("restriction {0} does not match the stalk bases")]
    RestrictionShape(String),
    #[error("component at {0} does not match the stalk bases")]
    ComponentShape(String),
    #[error("morphism has {got} components for {expected} simplices")]
    ComponentCount { expected: usize, got: usize },
    #[error("presheaves live on different complexes")]
    DifferentComplexes,
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    Arithmetic(#[from] ArithmeticError),
}

/// A chain-complex-valued presheaf on the face poset of a complex.
pub struct Presheaf {
    complex: Arc<SimplicialComplex>,
    stalks: Vec<ChainComplexData>,
    /// `(facet, simplex) ↦ N_{facet→simplex}`, by simplex index.
    restrictions: BTreeMap<(usize, usize), GradedMatrix>,
    composites: RwLock<HashMap<(usize, usize), Arc<GradedMatrix>>>,
}

impl Clone for Presheaf {
    fn clone(&self) -> Self {
        Self {
            complex: self.complex.clone(),
            stalks: self.stalks.clone(),
            restrictions: self.restrictions.clone(),
            composites: RwLock::new(HashMap::new()),
        }
    }
}

impl PartialEq for Presheaf {
    fn eq(&self, other: &Self) -> bool {
        self.complex == other.complex && self.stalks == other.stalks && self.restrictions == other.restrictions
    }
}

impl fmt::Debug for Presheaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (i, s) in self.complex.simplices().iter().enumerate() {
            m.entry(s, &self.stalks[i].basis().ranks());
        }
        m.finish()
    }
}

impl Presheaf {
    /// Checks shapes only; use [`validate_presheaf`] for the functor laws.
    ///
    /// Missing codimension-one restrictions are taken to be zero.
    pub fn new(
        complex: Arc<SimplicialComplex>,
        stalks: Vec<ChainComplexData>,
        restrictions: BTreeMap<(usize, usize), GradedMatrix>,
    ) -> Result<Self, PresheafError> {
        if stalks.len() != complex.len() {
            return Err(PresheafError::StalkCount { expected: complex.len(), got: stalks.len() });
        }
        let mut all = BTreeMap::new();
        for (x, y) in complex.codim1_relations() {
            let r = match restrictions.get(&(x, y)) {
                Some(r) => r.clone(),
                None => GradedMatrix::zero(stalks[y].basis(), stalks[x].basis(), 0),
            };
            if r.source() != stalks[y].basis() || r.target() != stalks[x].basis() || r.shift() != 0 {
                return Err(PresheafError::RestrictionShape(relation_name(&complex, x, y)));
            }
            all.insert((x, y), r);
        }
        if let Some(&(x, y)) = restrictions.keys().find(|k| !all.contains_key(k)) {
            let name = if x < complex.len() && y < complex.len() {
                relation_name(&complex, x, y)
            } else {
                format!("({x}, {y})")
            };
            return Err(PresheafError::NotCodimOne(name));
        }
        Ok(Self { complex, stalks, restrictions: all, composites: RwLock::new(HashMap::new()) })
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn complex_arc(&self) -> &Arc<SimplicialComplex> {
        &self.complex
    }

    pub fn stalk(&self, x: usize) -> &ChainComplexData {
        &self.stalks[x]
    }

    pub fn stalks(&self) -> &[ChainComplexData] {
        &self.stalks
    }

    pub fn codim1_restrictions(&self) -> &BTreeMap<(usize, usize), GradedMatrix> {
        &self.restrictions
    }

    /// Total rank of all stalks.
    pub fn total_rank(&self) -> usize {
        self.stalks.iter().map(ChainComplexData::rank).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.total_rank() == 0
    }

    /// `N_{x→y}` for any face relation, by simplex index.
    pub fn restriction(&self, x: usize, y: usize) -> Result<Arc<GradedMatrix>, PresheafError> {
        if let Some(r) = self.composites.read().expect("lock").get(&(x, y)) {
            return Ok(r.clone());
        }
        let (sx, sy) = (self.complex.simplex(x), self.complex.simplex(y));
        if !sx.is_face_of(sy) {
            return Err(PresheafError::NotAFace { sub: sx.to_string(), sup: sy.to_string() });
        }
        let value = if x == y {
            GradedMatrix::identity(self.stalks[x].basis())
        } else if sx.dim() + 1 == sy.dim() {
            self.restrictions[&(x, y)].clone()
        } else {
            // drop the first vertex of y missing from x, then recurse
            let pos = sx.positions_in(sy).expect("face");
            let u = (0..=sy.dim()).find(|u| !pos.contains(u)).expect("proper face");
            let mid = self.complex.index_of(&sy.face(u).expect("in range")).expect("closed under faces");
            self.restriction(x, mid)?.compose(&self.restrictions[&(mid, y)])?
        };
        let value = Arc::new(value);
        self.composites.write().expect("lock").insert((x, y), value.clone());
        Ok(value)
    }

    /// `N_{x→y}` by simplex.
    pub fn restriction_between(&self, x: &Simplex, y: &Simplex) -> Result<Arc<GradedMatrix>, PresheafError> {
        let xi = self.complex.index_of(x).ok_or_else(|| PresheafError::NotAFace {
            sub: x.to_string(),
            sup: y.to_string(),
        })?;
        let yi = self.complex.index_of(y).ok_or_else(|| PresheafError::NotAFace {
            sub: x.to_string(),
            sup: y.to_string(),
        })?;
        self.restriction(xi, yi)
    }
}

fn relation_name(complex: &SimplicialComplex, x: usize, y: usize) -> String {
    format!("{:?}→{:?}", complex.simplex(x), complex.simplex(y))
}

/// Kinds of presheaf and morphism validation failures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PresheafCheck {
    DifferentialSquare,
    RestrictionChainMap,
    Diamond,
    ComponentChainMap,
    Naturality,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PresheafFailure {
    pub check: PresheafCheck,
    /// The simplex or face relation where the identity fails.
    pub location: String,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct PresheafReport {
    pub checks: usize,
    pub failures: Vec<PresheafFailure>,
}

impl PresheafReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn merge(parts: Vec<PresheafReport>) -> Self {
        let mut out = PresheafReport::default();
        for p in parts {
            out.checks += p.checks;
            out.failures.extend(p.failures);
        }
        out
    }
}

/// Checks `∂² = 0` on every stalk, that every codimension-one restriction
/// is a chain map, and that every codimension-two diamond commutes.
pub fn validate_presheaf(n: &Presheaf) -> PresheafReport {
    let complex = n.complex();
    let indices: Vec<usize> = (0..complex.len()).collect();
    let parts = par::map(&indices, |&z| {
        let mut report = PresheafReport::default();
        let sz = complex.simplex(z);
        report.checks += 1;
        match n.stalks[z].differential_squares_to_zero() {
            Ok(true) => {}
            Ok(false) => report.failures.push(PresheafFailure {
                check: PresheafCheck::DifferentialSquare,
                location: sz.to_string(),
                detail: "∂∘∂ ≠ 0".into(),
            }),
            Err(e) => report.failures.push(PresheafFailure {
                check: PresheafCheck::DifferentialSquare,
                location: sz.to_string(),
                detail: e.to_string(),
            }),
        }
        for f in sz.facets() {
            let x = complex.index_of(&f).expect("closed under faces");
            report.checks += 1;
            let r = &n.restrictions[&(x, z)];
            let ok = verify_chain_map(r, &n.stalks[z], &n.stalks[x]);
            if !matches!(ok, Ok(true)) {
                report.failures.push(PresheafFailure {
                    check: PresheafCheck::RestrictionChainMap,
                    location: relation_name(complex, x, z),
                    detail: match ok {
                        Err(e) => e.to_string(),
                        _ => "restriction does not commute with the differentials".into(),
                    },
                });
            }
        }
        // codim-2 diamonds below z: remove positions u < v
        let d = sz.dim();
        if d >= 2 {
            for u in 0..=d {
                for v in u + 1..=d {
                    report.checks += 1;
                    let yu = sz.face(u).expect("in range");
                    let yv = sz.face(v).expect("in range");
                    let x = yu.face(v - 1).expect("in range");
                    debug_assert_eq!(x, yv.face(u).expect("in range"));
                    let (iu, iv, ix) = (
                        complex.index_of(&yu).expect("face"),
                        complex.index_of(&yv).expect("face"),
                        complex.index_of(&x).expect("face"),
                    );
                    let a = n.restrictions[&(ix, iu)].compose(&n.restrictions[&(iu, z)]);
                    let b = n.restrictions[&(ix, iv)].compose(&n.restrictions[&(iv, z)]);
                    match (a, b) {
                        (Ok(a), Ok(b)) if a == b => {}
                        (a, b) => report.failures.push(PresheafFailure {
                            check: PresheafCheck::Diamond,
                            location: format!("{x:?}→{sz:?}"),
                            detail: format!("via {yu:?}: {a:?}; via {yv:?}: {b:?}"),
                        }),
                    }
                }
            }
        }
        report
    });
    PresheafReport::merge(parts)
}

/// The presheaf with stalk `m` everywhere and identity restrictions.
pub fn constant_presheaf(complex: Arc<SimplicialComplex>, m: &ChainComplexData) -> Presheaf {
    let stalks = vec![m.clone(); complex.len()];
    let restrictions = complex
        .codim1_relations()
        .into_iter()
        .map(|r| (r, GradedMatrix::identity(m.basis())))
        .collect();
    Presheaf::new(complex, stalks, restrictions).expect("shapes agree")
}

/// The presheaf with stalk `m` at `y`, zero elsewhere.
pub fn skyscraper_presheaf(
    complex: Arc<SimplicialComplex>,
    y: &Simplex,
    m: &ChainComplexData,
) -> Result<Presheaf, PresheafError> {
    let yi = complex.require(y).map_err(|_| PresheafError::NotAFace {
        sub: y.to_string(),
        sup: "the complex".into(),
    })?;
    let stalks = (0..complex.len())
        .map(|i| if i == yi { m.clone() } else { ChainComplexData::zero() })
        .collect();
    Presheaf::new(complex, stalks, BTreeMap::new())
}

/// The zero presheaf.
pub fn zero_presheaf(complex: Arc<SimplicialComplex>) -> Presheaf {
    let stalks = vec![ChainComplexData::zero(); complex.len()];
    Presheaf::new(complex, stalks, BTreeMap::new()).expect("shapes agree")
}

/// Block direct sum of two complexes: generators of `a` first, then of `b`,
/// regrouped by degree.
fn direct_sum_complex(a: &ChainComplexData, b: &ChainComplexData) -> (ChainComplexData, Vec<usize>, Vec<usize>) {
    let mut gens: Vec<(i32, usize, usize)> = Vec::new(); // (degree, which, index)
    for i in 0..a.rank() {
        gens.push((a.basis().degree(i), 0, i));
    }
    for i in 0..b.rank() {
        gens.push((b.basis().degree(i), 1, i));
    }
    gens.sort();
    let basis = GradedBasis::new(
        gens.iter().map(|&(d, w, i)| (d, format!("{}.{}", w, i))).collect(),
    )
    .expect("unique labels");
    let mut a_pos = vec![0; a.rank()];
    let mut b_pos = vec![0; b.rank()];
    for (new, &(_, w, i)) in gens.iter().enumerate() {
        if w == 0 {
            a_pos[i] = new;
        } else {
            b_pos[i] = new;
        }
    }
    let mut columns = vec![FormalChain::zero(); gens.len()];
    for j in 0..a.rank() {
        columns[a_pos[j]] = a.differential().column(j).map_keys(|i| Some(a_pos[*i])).expect("relabel");
    }
    for j in 0..b.rank() {
        columns[b_pos[j]] = b.differential().column(j).map_keys(|i| Some(b_pos[*i])).expect("relabel");
    }
    let d = GradedMatrix::new(basis.clone(), basis.clone(), -1, columns).expect("degrees preserved");
    (ChainComplexData::new_unchecked(basis, d), a_pos, b_pos)
}

fn direct_sum_matrix(
    f: &GradedMatrix,
    g: &GradedMatrix,
    source: &GradedBasis,
    target: &GradedBasis,
    (fs, ft): (&[usize], &[usize]),
    (gs, gt): (&[usize], &[usize]),
) -> GradedMatrix {
    let mut columns = vec![FormalChain::zero(); source.len()];
    for j in 0..f.source().len() {
        columns[fs[j]] = f.column(j).map_keys(|i| Some(ft[*i])).expect("relabel");
    }
    for j in 0..g.source().len() {
        columns[gs[j]] = g.column(j).map_keys(|i| Some(gt[*i])).expect("relabel");
    }
    GradedMatrix::new(source.clone(), target.clone(), f.shift(), columns).expect("block matrix")
}

/// `N ⊕ N'` stalkwise.
pub fn direct_sum(a: &Presheaf, b: &Presheaf) -> Result<Presheaf, PresheafError> {
    if a.complex != b.complex {
        return Err(PresheafError::DifferentComplexes);
    }
    let sums: Vec<_> = a.stalks.iter().zip(&b.stalks).map(|(x, y)| direct_sum_complex(x, y)).collect();
    let mut restrictions = BTreeMap::new();
    for (&(x, y), ra) in &a.restrictions {
        let rb = &b.restrictions[&(x, y)];
        let (sy, ay, by) = &sums[y];
        let (sx, ax, bx) = &sums[x];
        restrictions.insert(
            (x, y),
            direct_sum_matrix(ra, rb, sy.basis(), sx.basis(), (ay, ax), (by, bx)),
        );
    }
    Presheaf::new(a.complex.clone(), sums.into_iter().map(|s| s.0).collect(), restrictions)
}

/// A degree-0 map `F_x: N_x → N'_x` for every simplex.
#[derive(Clone, PartialEq, Eq)]
pub struct PresheafMorphism {
    components: Vec<GradedMatrix>,
}

impl fmt::Debug for PresheafMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.components.iter().map(GradedMatrix::triplets)).finish()
    }
}

impl PresheafMorphism {
    /// Checks that component `x` maps `N_x` to `N'_x` in degree 0.
    pub fn new(source: &Presheaf, target: &Presheaf, components: Vec<GradedMatrix>) -> Result<Self, PresheafError> {
        if source.complex != target.complex {
            return Err(PresheafError::DifferentComplexes);
        }
        if components.len() != source.stalks.len() {
            return Err(PresheafError::ComponentCount { expected: source.stalks.len(), got: components.len() });
        }
        for (x, f) in components.iter().enumerate() {
            if f.source() != source.stalks[x].basis() || f.target() != target.stalks[x].basis() || f.shift() != 0 {
                return Err(PresheafError::ComponentShape(source.complex.simplex(x).to_string()));
            }
        }
        Ok(Self { components })
    }

    pub fn identity(n: &Presheaf) -> Self {
        Self { components: n.stalks.iter().map(|s| GradedMatrix::identity(s.basis())).collect() }
    }

    pub fn zero(source: &Presheaf, target: &Presheaf) -> Self {
        Self {
            components: source
                .stalks
                .iter()
                .zip(&target.stalks)
                .map(|(a, b)| GradedMatrix::zero(a.basis(), b.basis(), 0))
                .collect(),
        }
    }

    pub fn component(&self, x: usize) -> &GradedMatrix {
        &self.components[x]
    }

    pub fn components(&self) -> &[GradedMatrix] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(GradedMatrix::is_zero)
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &PresheafMorphism) -> Result<Self, PresheafError> {
        let components = self
            .components
            .iter()
            .zip(&first.components)
            .map(|(g, f)| g.compose(f))
            .collect::<Result<_, _>>()?;
        Ok(Self { components })
    }

    /// `self + scale * other`.
    pub fn add_scaled(&self, other: &PresheafMorphism, scale: Coeff) -> Result<Self, PresheafError> {
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.add_scaled(b, scale))
            .collect::<Result<_, _>>()?;
        Ok(Self { components })
    }
}

/// Checks that every component is a chain map and every codimension-one naturality square commutes.
pub fn validate_morphism(f: &PresheafMorphism, source: &Presheaf, target: &Presheaf) -> PresheafReport {
    let complex = source.complex();
    let indices: Vec<usize> = (0..complex.len()).collect();
    let parts = par::map(&indices, |&y| {
        let mut report = PresheafReport::default();
        report.checks += 1;
        let fy = &f.components[y];
        if !matches!(verify_chain_map(fy, &source.stalks[y], &target.stalks[y]), Ok(true)) {
            report.failures.push(PresheafFailure {
                check: PresheafCheck::ComponentChainMap,
                location: complex.simplex(y).to_string(),
                detail: "component does not commute with the differentials".into(),
            });
        }
        for facet in complex.simplex(y).facets() {
            let x = complex.index_of(&facet).expect("closed under faces");
            report.checks += 1;
            let lhs = f.components[x].compose(&source.restrictions[&(x, y)]);
            let rhs = target.restrictions[&(x, y)].compose(fy);
            match (lhs, rhs) {
                (Ok(a), Ok(b)) if a == b => {}
                (a, b) => report.failures.push(PresheafFailure {
                    check: PresheafCheck::Naturality,
                    location: relation_name(complex, x, y),
                    detail: format!("F_x∘N = {a:?}, N'∘F_y = {b:?}"),
                }),
            }
        }
        report
    });
    PresheafReport::merge(parts)
}

/// Positions of the unknowns `F_x[i][j]` (same-degree pairs) in a flat vector.
struct HomUnknowns {
    offsets: Vec<HashMap<(usize, usize), usize>>,
    count: usize,
}

impl HomUnknowns {
    fn new(source: &Presheaf, target: &Presheaf) -> Self {
        let mut offsets = Vec::with_capacity(source.stalks.len());
        let mut count = 0;
        for (a, b) in source.stalks.iter().zip(&target.stalks) {
            let mut m = HashMap::new();
            for j in 0..a.rank() {
                for i in 0..b.rank() {
                    if a.basis().degree(j) == b.basis().degree(i) {
                        m.insert((i, j), count);
                        count += 1;
                    }
                }
            }
            offsets.push(m);
        }
        Self { offsets, count }
    }
}

/// A `Z`-basis of the strict presheaf morphisms `N → N'`.
#[derive(Clone, Debug)]
pub struct HomSpace {
    pub basis: Vec<PresheafMorphism>,
}

impl HomSpace {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// `Σ c_t basis_t`.
    pub fn combination(&self, source: &Presheaf, target: &Presheaf, coeffs: &[Coeff]) -> Result<PresheafMorphism, PresheafError> {
        let mut out = PresheafMorphism::zero(source, target);
        for (b, &c) in self.basis.iter().zip(coeffs) {
            out = out.add_scaled(b, c)?;
        }
        Ok(out)
    }
}

/// Solves for all degree-0 natural chain maps `N → N'` exactly.
pub fn hom_space(source: &Presheaf, target: &Presheaf) -> Result<HomSpace, PresheafError> {
    if source.complex != target.complex {
        return Err(PresheafError::DifferentComplexes);
    }
    let unknowns = HomUnknowns::new(source, target);
    let mut rows: Vec<Vec<(usize, Coeff)>> = Vec::new();
    for x in 0..source.stalks.len() {
        let (a, b) = (&source.stalks[x], &target.stalks[x]);
        let u = &unknowns.offsets[x];
        // ∂' F - F ∂ = 0, entry (i', j)
        for j in 0..a.rank() {
            for i2 in 0..b.rank() {
                if b.basis().degree(i2) != a.basis().degree(j) - 1 {
                    continue;
                }
                let mut row = Vec::new();
                for i in 0..b.rank() {
                    let d = b.differential().entry(i2, i);
                    if d != 0 {
                        if let Some(&k) = u.get(&(i, j)) {
                            row.push((k, d));
                        }
                    }
                }
                for (&j2, d) in a.differential().column(j).iter() {
                    if let Some(&k) = u.get(&(i2, j2)) {
                        row.push((k, -d));
                    }
                }
                if !row.is_empty() {
                    rows.push(row);
                }
            }
        }
    }
    for (&(x, y), r) in &source.restrictions {
        let r2 = &target.restrictions[&(x, y)];
        let (ny, nx2) = (&source.stalks[y], &target.stalks[x]);
        let (ux, uy) = (&unknowns.offsets[x], &unknowns.offsets[y]);
        // F_x r - r' F_y = 0, entry (i, j): i in N'_x, j in N_y
        for j in 0..ny.rank() {
            for i in 0..nx2.rank() {
                if nx2.basis().degree(i) != ny.basis().degree(j) {
                    continue;
                }
                let mut row = Vec::new();
                for (&k, v) in r.column(j).iter() {
                    if let Some(&t) = ux.get(&(i, k)) {
                        row.push((t, v));
                    }
                }
                for l in 0..target.stalks[y].rank() {
                    let v = r2.entry(i, l);
                    if v != 0 {
                        if let Some(&t) = uy.get(&(l, j)) {
                            row.push((t, -v));
                        }
                    }
                }
                if !row.is_empty() {
                    rows.push(row);
                }
            }
        }
    }
    let null = integer_nullspace(&rows, unknowns.count)?;
    let basis = null
        .into_iter()
        .map(|v| {
            let components = (0..source.stalks.len())
                .map(|x| {
                    let trip: Vec<(usize, usize, Coeff)> = unknowns.offsets[x]
                        .iter()
                        .filter(|(_, &k)| v[k] != 0)
                        .map(|(&(i, j), &k)| (i, j, v[k]))
                        .collect();
                    GradedMatrix::from_triplets(
                        source.stalks[x].basis().clone(),
                        target.stalks[x].basis().clone(),
                        0,
                        &trip,
                    )
                })
                .collect::<Result<Vec<_>, _>>()?;
            Ok(PresheafMorphism { components })
        })
        .collect::<Result<Vec<_>, PresheafError>>()?;
    Ok(HomSpace { basis })
}

/// A reproducible random element of `Hom(N, N')`, nonzero whenever the hom space is.
pub fn random_morphism(
    source: &Presheaf,
    target: &Presheaf,
    hom: &HomSpace,
    seed: u64,
) -> Result<PresheafMorphism, PresheafError> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    if hom.rank() == 0 {
        return Ok(PresheafMorphism::zero(source, target));
    }
    loop {
        let coeffs: Vec<Coeff> = (0..hom.rank()).map(|_| rng.gen_range(-2..=2)).collect();
        if coeffs.iter().any(|&c| c != 0) {
            let f = hom.combination(source, target, &coeffs)?;
            if !f.is_zero() {
                return Ok(f);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;

    fn triangle() -> Arc<SimplicialComplex> {
        Arc::new(examples::simplex(2))
    }

    #[test]
    fn constant_presheaf_is_valid() {
        let n = constant_presheaf(triangle(), &ChainComplexData::integers(0));
        let report = validate_presheaf(&n);
        assert!(report.passed());
        assert!(report.checks > 0);
    }

    #[test]
    fn broken_restriction_is_located() {
        // stalks Z in degree 0 and (Z → Z) in degrees 1, 0 ... use a 1×1
        // restriction that is not a chain map: N_y = (a ↦ b), N_x = Z{b'} in degree 1
        let x = Arc::new(SimplicialComplex::from_maximal([vec![0, 1]]).unwrap());
        let by = GradedBasis::from_ranks(&[(0, 1), (1, 1)]);
        let dy = GradedMatrix::from_triplets(by.clone(), by.clone(), -1, &[(0, 1, 1)]).unwrap();
        let ny = ChainComplexData::new(by.clone(), dy).unwrap();
        let v0 = x.index_of(&Simplex::vertex(0)).unwrap();
        let e = x.index_of(&"0,1".parse().unwrap()).unwrap();
        let mut stalks = vec![ChainComplexData::zero(); x.len()];
        stalks[e] = ny;
        // r sends the degree 1 generator across, but ∂ differs on the two sides
        let bx = GradedBasis::from_ranks(&[(0, 1), (1, 1)]);
        let dx = GradedMatrix::from_triplets(bx.clone(), bx.clone(), -1, &[(0, 1, 1)]).unwrap();
        stalks[v0] = ChainComplexData::new(bx.clone(), dx).unwrap();
        let r = GradedMatrix::from_triplets(by, bx, 0, &[(1, 1, 1)]).unwrap();
        let n = Presheaf::new(x, stalks, BTreeMap::from([((v0, e), r)])).unwrap();
        let report = validate_presheaf(&n);
        assert_eq!(report.failures.len(), 1);
        assert_eq!(report.failures[0].check, PresheafCheck::RestrictionChainMap);
        assert_eq!(report.failures[0].location, "[0]→[0,1]");
    }

    #[test]
    fn empty_complex_is_vacuous() {
        let n = zero_presheaf(Arc::new(SimplicialComplex::empty()));
        let report = validate_presheaf(&n);
        assert!(report.passed());
        assert_eq!(report.checks, 0);
    }

    #[test]
    fn restriction_functor_laws() {
        let x = Arc::new(examples::simplex(3));
        for seed in 0..5 {
            let n = random_presheaf(x.clone(), &RandomPresheafParams::default(), seed);
            assert!(validate_presheaf(&n).passed());
            for (a, b) in x.face_relations() {
                if a == b {
                    assert_eq!(*n.restriction(a, a).unwrap(), GradedMatrix::identity(n.stalk(a).basis()));
                }
                for c in 0..x.len() {
                    if x.simplex(b).is_face_of(x.simplex(c)) {
                        let lhs = n.restriction(a, b).unwrap().compose(&n.restriction(b, c).unwrap()).unwrap();
                        assert_eq!(lhs, *n.restriction(a, c).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn restriction_requires_a_face() {
        let x = Arc::new(examples::two_edges());
        let n = constant_presheaf(x.clone(), &ChainComplexData::integers(0));
        let a = x.index_of(&"0,1".parse().unwrap()).unwrap();
        let b = x.index_of(&"0,2".parse().unwrap()).unwrap();
        assert!(matches!(n.restriction(a, b), Err(PresheafError::NotAFace { .. })));
    }

    #[test]
    fn skyscraper_morphisms_are_determined_at_the_point() {
        let x = triangle();
        let top: Simplex = "0,1,2".parse().unwrap();
        let n = skyscraper_presheaf(x.clone(), &top, &ChainComplexData::integers(0)).unwrap();
        assert!(validate_presheaf(&n).passed());
        let hom = hom_space(&n, &n).unwrap();
        assert_eq!(hom.rank(), 1);
    }

    #[test]
    fn hom_space_of_constant_presheaf_on_connected_complex() {
        let x = Arc::new(examples::circle());
        let n = constant_presheaf(x, &ChainComplexData::integers(0));
        let hom = hom_space(&n, &n).unwrap();
        assert_eq!(hom.rank(), 1);
        for b in &hom.basis {
            assert!(validate_morphism(b, &n, &n).passed());
        }
        let id = PresheafMorphism::identity(&n);
        assert!(validate_morphism(&id, &n, &n).passed());
    }

    #[test]
    fn morphism_algebra() {
        let x = Arc::new(examples::simplex(2));
        let n = random_presheaf(x.clone(), &RandomPresheafParams::default(), 3);
        let hom = hom_space(&n, &n).unwrap();
        let f = random_morphism(&n, &n, &hom, 1).unwrap();
        let g = random_morphism(&n, &n, &hom, 2).unwrap();
        let h = random_morphism(&n, &n, &hom, 4).unwrap();
        let id = PresheafMorphism::identity(&n);
        assert_eq!(f.after(&id).unwrap(), f);
        assert_eq!(id.after(&f).unwrap(), f);
        assert_eq!(h.after(&g).unwrap().after(&f).unwrap(), h.after(&g.after(&f).unwrap()).unwrap());
        let sum = f.add_scaled(&g, 3).unwrap();
        assert!(validate_morphism(&sum, &n, &n).passed());
        assert!(validate_morphism(&g.after(&f).unwrap(), &n, &n).passed());
    }

    #[test]
    fn direct_sum_is_valid() {
        let x = Arc::new(examples::simplex_boundary(3));
        let a = random_presheaf(x.clone(), &RandomPresheafParams::default(), 11);
        let b = constant_presheaf(x.clone(), &ChainComplexData::integers(1));
        let s = direct_sum(&a, &b).unwrap();
        assert!(validate_presheaf(&s).passed());
        assert_eq!(s.total_rank(), a.total_rank() + b.total_rank());
    }

    #[test]
    fn shape_errors() {
        let x = triangle();
        assert!(matches!(
            Presheaf::new(x.clone(), vec![], BTreeMap::new()),
            Err(PresheafError::StalkCount { .. })
        ));
        let stalks = vec![ChainComplexData::integers(0); x.len()];
        let bad = BTreeMap::from([((0, 6), GradedMatrix::identity(stalks[0].basis()))]);
        assert!(matches!(Presheaf::new(x, stalks, bad), Err(PresheafError::NotCodimOne(_))));
    }
}
