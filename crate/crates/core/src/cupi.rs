//! The symmetric coalgebra structure on simplicial chains: the
//! Alexander–Whitney coproduct, the join product and Steenrod's cup-i
//! coproducts, together with a validator for the symmetric coalgebra axioms.
//!
//! For `i ≥ 1` the coproducts are given by the recursion
//!
//! ```text
//! Δ_i = (-1)^i (∗ ⊗ id) ∘ (id ⊗ TΔ_{i-1}) ∘ Δ_0
//! ```
//!
//! with Koszul signs throughout. The factor `(-1)^i` normalises the
//! recursion so that `∂(Δ_i) = (1 + (-1)^i T) Δ_{i-1}` holds on the nose
//! under the hom differential of [`crate::gradedalg`]; without it the
//! relation only holds up to `(-1)^i`. It changes no supports and nothing
//! mod 2.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use serde::Serialize;

use crate::complex::{ComplexError, Simplex, SimplicialComplex};
use crate::gradedalg::{koszul_sign, sign};
use crate::lincomb::LinComb;
use crate::{par, ArithmeticError, Coeff};

/// A chain in `C(X)`.
pub type SimplicialChain = LinComb<Simplex>;

/// A chain in `C(X) ⊗ C(X)`.
pub type TensorChain = LinComb<(Simplex, Simplex)>;

/// A chain in `C(X)^{⊗3}`.
pub type TripleChain = LinComb<(Simplex, Simplex, Simplex)>;

/// Extra sign applied at step `i` of the recursion.
pub fn recursion_sign(i: usize) -> Coeff {
    sign(i as i64)
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CupError {
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error("augmentation expects a chain of degree 0, found a {0}-simplex")]
    Degree(usize),
    #[error(transparent)]
    Arithmetic(#[from] ArithmeticError),
}

/// A generator `e_i` or `T e_i` of the free resolution `W`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WGenerator {
    pub degree: usize,
    pub twisted: bool,
}

impl WGenerator {
    pub fn new(degree: usize, twisted: bool) -> Self {
        Self { degree, twisted }
    }

    /// `∂e_i = e_{i-1} + (-1)^i T e_{i-1}`; `∂(T e_i)` swaps the twist flags.
    pub fn boundary(&self) -> Vec<(WGenerator, Coeff)> {
        if self.degree == 0 {
            return Vec::new();
        }
        let i = self.degree;
        vec![
            (WGenerator::new(i - 1, self.twisted), 1),
            (WGenerator::new(i - 1, !self.twisted), sign(i as i64)),
        ]
    }
}

/// `Δ_0[v_0..v_n] = Σ_k [v_0..v_k] ⊗ [v_k..v_n]`.
pub fn aw_coproduct(x: &Simplex) -> TensorChain {
    let v = x.vertices();
    let mut out = TensorChain::zero();
    for k in 0..v.len() {
        let front = Simplex::from_sorted_unchecked(v[..=k].to_vec());
        let back = Simplex::from_sorted_unchecked(v[k..].to_vec());
        out.add_term((front, back), 1).expect("distinct terms");
    }
    out
}

/// Sum of coefficients of a degree-0 chain.
pub fn augmentation(c: &SimplicialChain) -> Result<Coeff, CupError> {
    let mut total: Coeff = 0;
    for (s, v) in c.iter() {
        if s.dim() != 0 {
            return Err(CupError::Degree(s.dim()));
        }
        total = total.checked_add(v).ok_or(ArithmeticError::Overflow)?;
    }
    Ok(total)
}

/// Join of two simplices as `(union, sign)`, ignoring membership in any complex.
///
/// `None` when the vertex sets overlap. The sign is `(-1)^{dim a}` times
/// the sign of the permutation sorting the concatenated vertices.
pub fn join_raw(a: &Simplex, b: &Simplex) -> Option<(Simplex, Coeff)> {
    if a.intersects(b) {
        return None;
    }
    let (va, vb) = (a.vertices(), b.vertices());
    // inversions of the concatenation: pairs (p in a, q in b) with p > q
    let mut inversions = 0usize;
    let mut j = 0;
    for &p in va {
        while j < vb.len() && vb[j] < p {
            j += 1;
        }
        inversions += j;
    }
    let mut merged = Vec::with_capacity(va.len() + vb.len());
    merged.extend_from_slice(va);
    merged.extend_from_slice(vb);
    merged.sort_unstable();
    let s = sign(a.dim() as i64) * sign(inversions as i64);
    Some((Simplex::from_sorted_unchecked(merged), s))
}

/// Join inside `complex`: zero when the union is not a simplex of it.
pub fn join(complex: &SimplicialComplex, a: &Simplex, b: &Simplex) -> Result<SimplicialChain, CupError> {
    complex.require(a)?;
    complex.require(b)?;
    Ok(match join_raw(a, b) {
        Some((u, s)) if complex.contains(&u) => SimplicialChain::from_term(u, s),
        _ => SimplicialChain::zero(),
    })
}

/// Koszul transposition `a⊗b ↦ (-1)^{|a||b|} b⊗a`.
pub fn transpose(c: &TensorChain) -> TensorChain {
    let mut out = TensorChain::zero();
    for ((a, b), v) in c.iter() {
        let s = koszul_sign(a.dim() as i64, b.dim() as i64);
        out.add_term((b.clone(), a.clone()), v * s).expect("transposition is a bijection");
    }
    out
}

/// Boundary of a chain of simplices.
pub fn chain_boundary(c: &SimplicialChain) -> Result<SimplicialChain, ArithmeticError> {
    let mut out = SimplicialChain::zero();
    for (s, v) in c.iter() {
        out.add_scaled(&s.boundary(), v)?;
    }
    Ok(out)
}

/// Koszul boundary on `C(X) ⊗ C(X)`.
pub fn tensor_boundary(c: &TensorChain) -> Result<TensorChain, ArithmeticError> {
    let mut out = TensorChain::zero();
    for ((a, b), v) in c.iter() {
        for (f, w) in a.boundary().iter() {
            out.add_term((f.clone(), b.clone()), v * w)?;
        }
        let s = sign(a.dim() as i64);
        for (f, w) in b.boundary().iter() {
            out.add_term((a.clone(), f.clone()), v * w * s)?;
        }
    }
    Ok(out)
}

/// One step of the recursion, given `Δ_{i-1}` on back faces.
fn recursion_step<F>(i: usize, x: &Simplex, mut previous: F) -> Result<TensorChain, ArithmeticError>
where
    F: FnMut(&Simplex) -> Result<Arc<TensorChain>, ArithmeticError>,
{
    let mut out = TensorChain::zero();
    let step = recursion_sign(i);
    for ((front, back), _) in aw_coproduct(x).iter() {
        let prev = previous(back)?;
        if prev.is_zero() {
            continue;
        }
        // (id ⊗ g)(a ⊗ b) = (-1)^{|g||a|} a ⊗ g(b), |g| = i - 1
        let koszul = sign((front.dim() * (i - 1)) as i64);
        for ((l, r), v) in transpose(&prev).iter() {
            if let Some((u, s)) = join_raw(front, l) {
                out.add_term((u, r.clone()), v * s * koszul * step)?;
            }
        }
    }
    Ok(out)
}

/// `Δ_i(x)` computed from scratch without any cache.
pub fn cup_i_uncached(i: usize, x: &Simplex) -> Result<TensorChain, ArithmeticError> {
    if i == 0 {
        return Ok(aw_coproduct(x));
    }
    if i > x.dim() {
        return Ok(TensorChain::zero());
    }
    recursion_step(i, x, |b| cup_i_uncached(i - 1, b).map(Arc::new))
}

/// Evaluator for `Δ_i`, `TΔ_i` and the join on a fixed complex, with a shared cache.
///
/// `Δ_i(x)` only depends on the closure of `x`, so cache entries are keyed
/// by `(i, x)` alone. The cache is safe to share across threads; racing
/// writers store equal values.
pub struct CupStructure {
    complex: Arc<SimplicialComplex>,
    memo: RwLock<HashMap<(usize, Simplex), Arc<TensorChain>>>,
}

impl CupStructure {
    pub fn new(complex: Arc<SimplicialComplex>) -> Self {
        Self { complex, memo: RwLock::new(HashMap::new()) }
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn complex_arc(&self) -> &Arc<SimplicialComplex> {
        &self.complex
    }

    pub fn cached_entries(&self) -> usize {
        self.memo.read().expect("memo lock").len()
    }

    pub fn aw_coproduct(&self, x: &Simplex) -> Result<TensorChain, CupError> {
        self.complex.require(x)?;
        Ok(aw_coproduct(x))
    }

    pub fn join(&self, a: &Simplex, b: &Simplex) -> Result<SimplicialChain, CupError> {
        join(&self.complex, a, b)
    }

    /// `Δ_i(x)`; zero for `i > dim x`.
    pub fn cup_i(&self, i: usize, x: &Simplex) -> Result<Arc<TensorChain>, CupError> {
        self.complex.require(x)?;
        Ok(self.cached(i, x)?)
    }

    /// `TΔ_i(x)`.
    pub fn cup_i_t(&self, i: usize, x: &Simplex) -> Result<TensorChain, CupError> {
        Ok(transpose(&*self.cup_i(i, x)?))
    }

    /// `Δ_i(x)` for `e_i`, `TΔ_i(x)` for `T e_i`.
    pub fn evaluate(&self, w: WGenerator, x: &Simplex) -> Result<TensorChain, CupError> {
        if w.twisted {
            self.cup_i_t(w.degree, x)
        } else {
            Ok((*self.cup_i(w.degree, x)?).clone())
        }
    }

    /// `Δ_i` extended linearly; negative indices give zero.
    pub fn cup_i_chain(&self, i: i64, c: &SimplicialChain) -> Result<TensorChain, CupError> {
        let mut out = TensorChain::zero();
        if i < 0 {
            return Ok(out);
        }
        for (x, v) in c.iter() {
            out.add_scaled(&*self.cup_i(i as usize, x)?, v)?;
        }
        Ok(out)
    }

    fn cached(&self, i: usize, x: &Simplex) -> Result<Arc<TensorChain>, ArithmeticError> {
        if let Some(v) = self.memo.read().expect("memo lock").get(&(i, x.clone())) {
            return Ok(v.clone());
        }
        let value = if i == 0 {
            aw_coproduct(x)
        } else if i > x.dim() {
            TensorChain::zero()
        } else {
            recursion_step(i, x, |b| self.cached(i - 1, b))?
        };
        let value = Arc::new(value);
        self.memo.write().expect("memo lock").insert((i, x.clone()), value.clone());
        Ok(value)
    }
}

/// Which identity a coalgebra check exercised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CoalgebraCheck {
    BoundaryRelation,
    Coassociativity,
    Counit,
    Naturality,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoalgebraFailure {
    pub simplex: String,
    pub i: usize,
    pub check: CoalgebraCheck,
    pub discrepancy: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CoalgebraReport {
    pub simplices: usize,
    pub max_i: usize,
    pub checks: usize,
    pub failures: Vec<CoalgebraFailure>,
}

impl CoalgebraReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// `∂(Δ_i x) - (-1)^i Δ_i(∂x) - (Δ_{i-1} + (-1)^i TΔ_{i-1})(x)`, zero when the relation holds.
pub fn boundary_relation_defect(cup: &CupStructure, i: usize, x: &Simplex) -> Result<TensorChain, CupError> {
    let mut lhs = tensor_boundary(&*cup.cup_i(i, x)?)?;
    let bx = x.boundary();
    lhs.add_scaled(&cup.cup_i_chain(i as i64, &bx)?, -sign(i as i64))?;
    if i > 0 {
        let prev = cup.cup_i(i - 1, x)?;
        lhs.add_scaled(&prev, -1)?;
        lhs.add_scaled(&transpose(&prev), -sign(i as i64))?;
    }
    Ok(lhs)
}

/// `(Δ_0 ⊗ id)Δ_0(x) - (id ⊗ Δ_0)Δ_0(x)`.
pub fn coassociativity_defect(x: &Simplex) -> Result<TripleChain, ArithmeticError> {
    let mut out = TripleChain::zero();
    for ((a, b), v) in aw_coproduct(x).iter() {
        for ((a1, a2), w) in aw_coproduct(a).iter() {
            out.add_term((a1.clone(), a2.clone(), b.clone()), v * w)?;
        }
        for ((b1, b2), w) in aw_coproduct(b).iter() {
            out.add_term((a.clone(), b1.clone(), b2.clone()), -v * w)?;
        }
    }
    Ok(out)
}

/// `((ε ⊗ id)Δ_0(x) - x, (id ⊗ ε)Δ_0(x) - x)`.
pub fn counit_defects(x: &Simplex) -> Result<(SimplicialChain, SimplicialChain), ArithmeticError> {
    let mut left = SimplicialChain::from_term(x.clone(), -1);
    let mut right = SimplicialChain::from_term(x.clone(), -1);
    for ((a, b), v) in aw_coproduct(x).iter() {
        if a.dim() == 0 {
            left.add_term(b.clone(), v)?;
        }
        if b.dim() == 0 {
            right.add_term(a.clone(), v)?;
        }
    }
    Ok((left, right))
}

/// Checks the symmetric coalgebra identities on every simplex for `0 ≤ i ≤ max_i`:
/// the boundary relation, coassociativity and counitality of `Δ_0`, and
/// naturality of `Δ_i` along every closure inclusion `x̄ ⊆ ȳ`.
pub fn validate_symmetric_coalgebra(complex: &SimplicialComplex, max_i: usize) -> CoalgebraReport {
    let complex = Arc::new(complex.clone());
    let ambient = CupStructure::new(complex.clone());
    let results = par::map(complex.simplices(), |y| {
        let mut checks = 0usize;
        let mut failures = Vec::new();
        let mut fail = |i, check, discrepancy: String| {
            failures.push(CoalgebraFailure { simplex: y.to_string(), i, check, discrepancy });
        };
        for i in 0..=max_i {
            checks += 1;
            match boundary_relation_defect(&ambient, i, y) {
                Ok(d) if d.is_zero() => {}
                Ok(d) => fail(i, CoalgebraCheck::BoundaryRelation, format!("{d:?}")),
                Err(e) => fail(i, CoalgebraCheck::BoundaryRelation, e.to_string()),
            }
        }
        checks += 3;
        match coassociativity_defect(y) {
            Ok(d) if d.is_zero() => {}
            Ok(d) => fail(0, CoalgebraCheck::Coassociativity, format!("{d:?}")),
            Err(e) => fail(0, CoalgebraCheck::Coassociativity, e.to_string()),
        }
        match counit_defects(y) {
            Ok((l, r)) if l.is_zero() && r.is_zero() => {}
            Ok((l, r)) => fail(0, CoalgebraCheck::Counit, format!("left {l:?}, right {r:?}")),
            Err(e) => fail(0, CoalgebraCheck::Counit, e.to_string()),
        }
        // naturality: every face x of y, Δ_i(x) in x̄, in ȳ and in X agree
        let in_y = CupStructure::new(Arc::new(y.closure()));
        for x in y.subsimplices() {
            let in_x = CupStructure::new(Arc::new(x.closure()));
            for i in 0..=max_i {
                checks += 1;
                let values = (in_x.cup_i(i, &x), in_y.cup_i(i, &x), ambient.cup_i(i, &x));
                match values {
                    (Ok(a), Ok(b), Ok(c)) if a == b && b == c => {}
                    (a, b, c) => fail(
                        i,
                        CoalgebraCheck::Naturality,
                        format!("face {x}: in closure {a:?}, in {y} {b:?}, ambient {c:?}"),
                    ),
                }
            }
        }
        (checks, failures)
    });
    let mut report =
        CoalgebraReport { simplices: complex.len(), max_i, checks: 0, failures: Vec::new() };
    for (c, f) in results {
        report.checks += c;
        report.failures.extend(f);
    }
    report
}

/// Outcome of the special-value identities for one simplex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpecialValueViolation {
    NonVanishing { i: usize },
    TopNotDiagonal(String),
    SubTopSupport(String),
}

/// Checks `Δ_i(x) = 0` for `dim x < i ≤ max_i`, `Δ_n(x) = ±x⊗x`, and that
/// `Δ_{n-1}(x)` is supported exactly on `x⊗∂_u x` (`u` even) and `∂_u x⊗x` (`u` odd).
pub fn check_special_values(
    cup: &CupStructure,
    x: &Simplex,
    max_i: usize,
) -> Result<Vec<SpecialValueViolation>, CupError> {
    let n = x.dim();
    let mut out = Vec::new();
    for i in n + 1..=max_i.max(n + 1) {
        if !cup.cup_i(i, x)?.is_zero() {
            out.push(SpecialValueViolation::NonVanishing { i });
        }
    }
    let top = cup.cup_i(n, x)?;
    let diag = (x.clone(), x.clone());
    if top.len() != 1 || top.coeff(&diag).abs() != 1 {
        out.push(SpecialValueViolation::TopNotDiagonal(format!("{top:?}")));
    }
    if n >= 1 {
        let sub = cup.cup_i(n - 1, x)?;
        let mut expected: Vec<(Simplex, Simplex)> = (0..=n)
            .map(|u| {
                let f = x.face(u).expect("in range");
                if u % 2 == 0 {
                    (x.clone(), f)
                } else {
                    (f, x.clone())
                }
            })
            .collect();
        expected.sort();
        let support: Vec<(Simplex, Simplex)> = sub.keys().cloned().collect();
        if support != expected || sub.iter().any(|(_, v)| v.abs() != 1) {
            out.push(SpecialValueViolation::SubTopSupport(format!("{sub:?}")));
        }
    }
    Ok(out)
}
