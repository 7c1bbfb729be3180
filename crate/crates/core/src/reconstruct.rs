//! Recovering a presheaf morphism `F` from a strict comodule morphism
//! `f: A(N) → A(N')`, and the randomized faithfulness and round-trip suites.
//!
//! Reconstruction reads `f([x⊗b])` on the canonical basis. Equivariance with
//! `∇_m` for `m` the largest simplex dimension in the support forces
//! `m ≤ dim x`, and equivariance with `∇_{dim x}` then forces every term to
//! sit over `x` itself, so `f([x⊗b]) = [x⊗F_x(b)]`. Naturality of `F` on a
//! face `∂_u y` comes from `∇_{dim y - 1}` for even `u` and `∇ᵀ_{dim y - 1}`
//! for odd `u`. Every rejection names the identity that fails.

use std::collections::HashMap;
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::assembly::{
    assemble_morphism, default_max_i, replay_failure, validate_comodule_morphism, AssemblyComplex, AssemblyError,
    ComoduleCheck, ComoduleFailure, ComoduleMorphism,
};
use crate::cupi::CupStructure;
use crate::gradedalg::GradedMatrix;
use crate::linsolve::integer_nullspace;
use crate::presheaf::{hom_space, random_morphism, Presheaf, PresheafMorphism};
use crate::Coeff;

/// Why a map was rejected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RejectionReason {
    /// `f([x⊗b])` has a term over a simplex of higher dimension than `x`.
    SupportDimension,
    /// `f([x⊗b])` has a term over a simplex other than `x`.
    SupportSimplex,
    /// The recovered components are not natural.
    Naturality,
    /// `f` or a recovered component is not a chain map.
    ChainMap,
    /// The recovered `F` does not assemble back to `f`.
    NotReproduced,
}

/// A replayable certificate that `f` is not the assembly of a presheaf morphism.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RejectionWitness {
    pub reason: RejectionReason,
    /// Canonical basis element of `A(N)` where the problem was found.
    pub index: usize,
    pub pair: String,
    /// Where the recovered components disagree, for naturality and chain-map rejections.
    pub location: Option<String>,
    /// The failed comodule-morphism identity, if one was found.
    pub failure: Option<ComoduleFailure>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub support_checks: usize,
    pub naturality_checks: usize,
    pub chain_map_checks: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ReconstructionResult {
    Accepted { morphism: PresheafMorphism, certificate: Certificate },
    Rejected(RejectionWitness),
}

impl ReconstructionResult {
    pub fn accepted(&self) -> Option<&PresheafMorphism> {
        match self {
            ReconstructionResult::Accepted { morphism, .. } => Some(morphism),
            ReconstructionResult::Rejected(_) => None,
        }
    }

    pub fn witness(&self) -> Option<&RejectionWitness> {
        match self {
            ReconstructionResult::Accepted { .. } => None,
            ReconstructionResult::Rejected(w) => Some(w),
        }
    }
}

fn equivariance_failure(
    f: &ComoduleMorphism,
    i: usize,
    twisted: bool,
    candidates: impl IntoIterator<Item = usize>,
) -> Result<Option<ComoduleFailure>, AssemblyError> {
    for index in candidates {
        let d = f.equivariance_defect(i, twisted, index)?;
        if !d.is_zero() {
            return Ok(Some(ComoduleFailure {
                check: ComoduleCheck::Equivariance,
                index,
                pair: f.source().pair_name(index),
                i: Some(i),
                twisted,
                representative: None,
                discrepancy: format!("{d:?}"),
            }));
        }
    }
    Ok(None)
}

/// Any failed identity of `f`, used when the targeted search finds nothing.
fn any_failure(f: &ComoduleMorphism) -> Result<Option<ComoduleFailure>, AssemblyError> {
    let report = validate_comodule_morphism(f, default_max_i(f.source().complex()))?;
    Ok(report.failures.into_iter().next())
}

fn witness(
    f: &ComoduleMorphism,
    reason: RejectionReason,
    index: usize,
    location: Option<String>,
    failure: Option<ComoduleFailure>,
) -> Result<ReconstructionResult, AssemblyError> {
    let failure = match failure {
        Some(x) => Some(x),
        None => any_failure(f)?,
    };
    Ok(ReconstructionResult::Rejected(RejectionWitness {
        reason,
        index,
        pair: f.source().pair_name(index),
        location,
        failure,
    }))
}

/// Recovers `F` with `A F = f`, or rejects `f` with a witness.
pub fn reconstruct(f: &ComoduleMorphism) -> Result<ReconstructionResult, AssemblyError> {
    let (src, dst) = (f.source(), f.target());
    let complex = src.complex();
    let mut cert = Certificate::default();

    // support: f([x⊗b]) must live over x
    let mut triplets: Vec<Vec<(usize, usize, Coeff)>> = vec![Vec::new(); complex.len()];
    for index in 0..src.rank() {
        let p = src.pair(index);
        let x = complex.simplex(p.simplex);
        let column = f.map().column(index);
        cert.support_checks += 1;
        let top = column.keys().map(|&q| complex.simplex(dst.pair(q).simplex).dim()).max();
        if let Some(m) = top {
            if m > x.dim() {
                let failure = equivariance_failure(f, m, false, [index])?;
                return witness(f, RejectionReason::SupportDimension, index, None, failure);
            }
        }
        if column.keys().any(|&q| dst.pair(q).simplex != p.simplex) {
            let failure = equivariance_failure(f, x.dim(), false, [index])?;
            return witness(f, RejectionReason::SupportSimplex, index, None, failure);
        }
        for (&q, v) in column.iter() {
            triplets[p.simplex].push((dst.pair(q).generator, p.generator, v));
        }
    }
    let n = src.presheaf();
    let n2 = dst.presheaf();
    let components = (0..complex.len())
        .map(|x| {
            GradedMatrix::from_triplets(n.stalk(x).basis().clone(), n2.stalk(x).basis().clone(), 0, &triplets[x])
        })
        .collect::<Result<Vec<_>, _>>()?;
    let big_f = PresheafMorphism::new(n, n2, components)?;

    // chain maps per simplex
    for x in 0..complex.len() {
        cert.chain_map_checks += 1;
        let fx = big_f.component(x);
        let lhs = n2.stalk(x).differential().compose(fx)?;
        let rhs = fx.compose(n.stalk(x).differential())?;
        if lhs != rhs {
            let range = src.pairs_over(x);
            let mut failure = None;
            for index in range.clone() {
                let d = f.chain_map_defect(index)?;
                if !d.is_zero() {
                    failure = Some(ComoduleFailure {
                        check: ComoduleCheck::ChainMap,
                        index,
                        pair: src.pair_name(index),
                        i: None,
                        twisted: false,
                        representative: None,
                        discrepancy: format!("{d:?}"),
                    });
                    break;
                }
            }
            let location = Some(format!("{:?}", complex.simplex(x)));
            return witness(f, RejectionReason::ChainMap, range.start, location, failure);
        }
    }

    // naturality on codimension-one faces, even faces through ∇, odd through ∇ᵀ
    for y in 0..complex.len() {
        let sy = complex.simplex(y);
        for (u, facet) in sy.facets().into_iter().enumerate() {
            cert.naturality_checks += 1;
            let x = complex.index_of(&facet).expect("closed under faces");
            let lhs = big_f.component(x).compose(&*n.restriction(x, y)?)?;
            let rhs = n2.restriction(x, y)?.compose(big_f.component(y))?;
            if lhs != rhs {
                let failure = equivariance_failure(f, sy.dim() - 1, u % 2 == 1, src.pairs_over(y))?;
                let location = Some(format!("{facet:?}→{sy:?}"));
                return witness(f, RejectionReason::Naturality, src.pairs_over(y).start, location, failure);
            }
        }
    }

    let back = assemble_morphism(&big_f, src.clone(), dst.clone())?;
    if back.map() != f.map() {
        return witness(f, RejectionReason::NotReproduced, 0, None, None);
    }
    Ok(ReconstructionResult::Accepted { morphism: big_f, certificate: cert })
}

/// Re-evaluates the identity a witness names; true when it still fails.
pub fn replay_witness(f: &ComoduleMorphism, w: &RejectionWitness) -> Result<bool, AssemblyError> {
    match &w.failure {
        Some(failure) => replay_failure(f, failure),
        None => Ok(false),
    }
}

/// Solution space of the linear conditions on degree-0 maps `A(N) → A(N')`.
#[derive(Debug, Clone)]
pub struct ComoduleHomSystem {
    /// `(row, col)` positions of the unknowns.
    unknowns: Vec<(usize, usize)>,
    rows: Vec<Vec<(usize, Coeff)>>,
}

impl ComoduleHomSystem {
    /// Chain-map equations plus equivariance with the listed `(i, twisted)` levels.
    pub fn new(src: &AssemblyComplex, dst: &AssemblyComplex, levels: &[(usize, bool)]) -> Result<Self, AssemblyError> {
        let mut unknowns = Vec::new();
        let mut position: HashMap<(usize, usize), usize> = HashMap::new();
        for p in 0..src.rank() {
            for q in 0..dst.rank() {
                if src.degree(p) == dst.degree(q) {
                    position.insert((q, p), unknowns.len());
                    unknowns.push((q, p));
                }
            }
        }
        let mut rows: Vec<Vec<(usize, Coeff)>> = Vec::new();
        // chain map: (∂' g - g ∂)[q', p] = 0
        let mut eqs: HashMap<(usize, usize), Vec<(usize, Coeff)>> = HashMap::new();
        for (k, &(q, p)) in unknowns.iter().enumerate() {
            for (&q2, v) in dst.differential().column(q).iter() {
                eqs.entry((q2, p)).or_default().push((k, v));
            }
        }
        for p in 0..src.rank() {
            for (&p2, v) in src.differential().column(p).iter() {
                // g ∂ p = Σ v g[q, p2]
                for q in 0..dst.rank() {
                    if let Some(&k) = position.get(&(q, p2)) {
                        eqs.entry((q, p)).or_default().push((k, -v));
                    }
                }
            }
        }
        let mut keys: Vec<_> = eqs.keys().copied().collect();
        keys.sort_unstable();
        rows.extend(keys.into_iter().map(|key| eqs.remove(&key).expect("present")));
        for &(i, twisted) in levels {
            // (id⊗g)∇_i(p) - ∇'_i(g p), coefficient of (s, q)
            let mut eqs: HashMap<(usize, crate::Simplex, usize), Vec<(usize, Coeff)>> = HashMap::new();
            for p in 0..src.rank() {
                for ((s, m), a) in src.nabla(i, twisted, p)?.iter() {
                    for q in 0..dst.rank() {
                        if let Some(&k) = position.get(&(q, *m)) {
                            eqs.entry((p, s.clone(), q)).or_default().push((k, a));
                        }
                    }
                }
            }
            for (k, &(q2, p)) in unknowns.iter().enumerate() {
                for ((s, q), b) in dst.nabla(i, twisted, q2)?.iter() {
                    eqs.entry((p, s.clone(), *q)).or_default().push((k, -b));
                }
            }
            let mut keys: Vec<_> = eqs.keys().cloned().collect();
            keys.sort_unstable();
            rows.extend(keys.into_iter().map(|key| eqs.remove(&key).expect("present")));
        }
        Ok(Self { unknowns, rows })
    }

    pub fn unknowns(&self) -> usize {
        self.unknowns.len()
    }

    /// A basis of the solutions, as maps.
    pub fn solutions(&self, src: &Arc<AssemblyComplex>, dst: &Arc<AssemblyComplex>) -> Result<Vec<ComoduleMorphism>, AssemblyError> {
        let null = integer_nullspace(&self.rows, self.unknowns.len())?;
        null.into_iter()
            .map(|v| {
                let trip: Vec<(usize, usize, Coeff)> = self
                    .unknowns
                    .iter()
                    .zip(&v)
                    .filter(|(_, &c)| c != 0)
                    .map(|(&(q, p), &c)| (q, p, c))
                    .collect();
                ComoduleMorphism::from_triplets(src.clone(), dst.clone(), &trip)
            })
            .collect()
    }
}

/// Every `(i, twisted)` level up to `max_i`.
pub fn all_levels(max_i: usize) -> Vec<(usize, bool)> {
    (0..=max_i).flat_map(|i| [(i, false), (i, true)]).collect()
}

/// Outcome of searching for a chain map that commutes with `∇_0` but not with every `∇_i`.
#[derive(Debug, Clone)]
pub struct WeakSearch {
    /// Rank of the chain maps commuting with `∇_0`.
    pub weak_rank: usize,
    /// Rank of the strict comodule morphisms.
    pub strict_rank: usize,
    /// A weakly but not strictly equivariant map, if one exists.
    pub candidate: Option<ComoduleMorphism>,
}

/// Solves the `∇_0` system and returns a solution that fails the strict one.
pub fn search_weakly_equivariant(src: &Arc<AssemblyComplex>, dst: &Arc<AssemblyComplex>) -> Result<WeakSearch, AssemblyError> {
    let max_i = default_max_i(src.complex());
    let weak = ComoduleHomSystem::new(src, dst, &[(0, false)])?.solutions(src, dst)?;
    let strict = ComoduleHomSystem::new(src, dst, &all_levels(max_i))?.solutions(src, dst)?;
    let mut candidate = None;
    for g in &weak {
        if !validate_comodule_morphism(g, max_i)?.passed() {
            candidate = Some(g.clone());
            break;
        }
    }
    Ok(WeakSearch { weak_rank: weak.len(), strict_rank: strict.len(), candidate })
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FaithfulnessReport {
    pub trials: usize,
    pub hom_rank: usize,
    /// Sampled nonzero `F` with nonzero `A F`.
    pub nonzero_preserved: usize,
    pub zero_maps_to_zero: bool,
    /// Trials where a nonzero `F` assembled to zero.
    pub failures: Vec<usize>,
}

impl FaithfulnessReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.zero_maps_to_zero
    }
}

fn trial_seeds(seed: u64, trials: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials).map(|_| rng.next_u64()).collect()
}

fn shared_assemblies(n: &Presheaf, n2: &Presheaf) -> Result<(Arc<AssemblyComplex>, Arc<AssemblyComplex>), AssemblyError> {
    let cup = Arc::new(CupStructure::new(n.complex_arc().clone()));
    let a = Arc::new(AssemblyComplex::with_cup(Arc::new(n.clone()), cup.clone())?);
    let b = Arc::new(AssemblyComplex::with_cup(Arc::new(n2.clone()), cup)?);
    Ok((a, b))
}

/// Samples morphisms `N → N'` and checks that nonzero ones assemble to nonzero maps.
pub fn faithfulness_check(n: &Presheaf, n2: &Presheaf, trials: usize, seed: u64) -> Result<FaithfulnessReport, AssemblyError> {
    let (a, b) = shared_assemblies(n, n2)?;
    let hom = hom_space(n, n2)?;
    let zero = assemble_morphism(&PresheafMorphism::zero(n, n2), a.clone(), b.clone())?;
    let mut report = FaithfulnessReport {
        trials,
        hom_rank: hom.rank(),
        zero_maps_to_zero: zero.is_zero(),
        ..Default::default()
    };
    for (t, s) in trial_seeds(seed, trials).into_iter().enumerate() {
        let f = random_morphism(n, n2, &hom, s)?;
        if f.is_zero() {
            continue;
        }
        if assemble_morphism(&f, a.clone(), b.clone())?.is_zero() {
            report.failures.push(t);
        } else {
            report.nonzero_preserved += 1;
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoundtripFailure {
    pub trial: usize,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RoundtripReport {
    pub trials: usize,
    pub passed: usize,
    pub failures: Vec<RoundtripFailure>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl RoundtripReport {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty() && self.passed == self.trials
    }
}

/// Samples `F`, assembles it and checks that reconstruction returns `F` exactly.
pub fn fullness_roundtrip(n: &Presheaf, n2: &Presheaf, trials: usize, seed: u64) -> Result<RoundtripReport, AssemblyError> {
    let start = Instant::now();
    let (a, b) = shared_assemblies(n, n2)?;
    let hom = hom_space(n, n2)?;
    let mut report = RoundtripReport { trials, ..Default::default() };
    for (t, s) in trial_seeds(seed, trials).into_iter().enumerate() {
        let f = random_morphism(n, n2, &hom, s)?;
        let af = assemble_morphism(&f, a.clone(), b.clone())?;
        match reconstruct(&af)? {
            ReconstructionResult::Accepted { morphism, .. } if morphism == f => report.passed += 1,
            ReconstructionResult::Accepted { .. } => report.failures.push(RoundtripFailure {
                trial: t,
                detail: "reconstructed morphism differs".into(),
            }),
            ReconstructionResult::Rejected(w) => report.failures.push(RoundtripFailure {
                trial: t,
                detail: format!("rejected: {:?} at {}", w.reason, w.pair),
            }),
        }
    }
    report.elapsed = start.elapsed();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::assemble;
    use crate::complex::Simplex;
    use crate::examples;
    use crate::gradedalg::ChainComplexData;
    use crate::presheaf::{constant_presheaf, direct_sum, random_presheaf, skyscraper_presheaf, RandomPresheafParams};

    fn two_skyscrapers() -> Presheaf {
        let x = Arc::new(examples::two_edges());
        let z = ChainComplexData::integers(0);
        let a: Simplex = "0,1".parse().unwrap();
        let b: Simplex = "0,2".parse().unwrap();
        direct_sum(&skyscraper_presheaf(x.clone(), &a, &z).unwrap(), &skyscraper_presheaf(x, &b, &z).unwrap()).unwrap()
    }

    #[test]
    fn identity_and_zero_reconstruct() {
        let x = Arc::new(examples::simplex(2));
        let n = random_presheaf(x, &RandomPresheafParams::default(), 2);
        let a = Arc::new(assemble(&n).unwrap());
        let id = reconstruct(&ComoduleMorphism::identity(a.clone())).unwrap();
        assert_eq!(id.accepted(), Some(&PresheafMorphism::identity(&n)));
        let zero = reconstruct(&ComoduleMorphism::zero(a.clone(), a.clone())).unwrap();
        assert!(zero.accepted().unwrap().is_zero());
    }

    #[test]
    fn weakly_equivariant_map_on_two_edges_is_rejected() {
        let n = two_skyscrapers();
        let a = Arc::new(assemble(&n).unwrap());
        let search = search_weakly_equivariant(&a, &a).unwrap();
        assert_eq!(search.weak_rank, 4);
        assert_eq!(search.strict_rank, 2);
        let g = search.candidate.expect("a ∇_0-only map exists");
        let result = reconstruct(&g).unwrap();
        let w = result.witness().expect("rejected");
        assert!(w.failure.is_some());
        assert!(replay_witness(&g, w).unwrap());
    }

    #[test]
    fn strict_hom_matches_presheaf_hom() {
        let x = Arc::new(examples::simplex(2));
        for seed in 0..4 {
            let n = random_presheaf(x.clone(), &RandomPresheafParams::default(), seed);
            let n2 = random_presheaf(x.clone(), &RandomPresheafParams::default(), seed + 100);
            let (a, b) = shared_assemblies(&n, &n2).unwrap();
            let strict = ComoduleHomSystem::new(&a, &b, &all_levels(3)).unwrap().solutions(&a, &b).unwrap();
            assert_eq!(strict.len(), hom_space(&n, &n2).unwrap().rank(), "seed {seed}");
            for g in &strict {
                assert!(reconstruct(g).unwrap().accepted().is_some());
            }
        }
    }

    #[test]
    fn faithfulness_on_constant_presheaves() {
        let x = Arc::new(examples::simplex(3));
        let n = constant_presheaf(x, &ChainComplexData::integers(0));
        let report = faithfulness_check(&n, &n, 10, 0).unwrap();
        assert!(report.passed());
        assert_eq!(report.nonzero_preserved, 10);
    }

    #[test]
    fn roundtrip_zero_trials() {
        let x = Arc::new(examples::simplex(1));
        let n = constant_presheaf(x, &ChainComplexData::integers(0));
        let report = fullness_roundtrip(&n, &n, 0, 0).unwrap();
        assert!(report.all_passed());
        assert_eq!(report.trials, 0);
    }

    #[test]
    fn roundtrip_random_presheaves() {
        let x = Arc::new(examples::simplex_boundary(3));
        let n = random_presheaf(x.clone(), &RandomPresheafParams::default(), 1);
        let report = fullness_roundtrip(&n, &n, 10, 3).unwrap();
        assert!(report.all_passed(), "{:?}", report.failures);
    }

    #[test]
    fn off_simplex_map_is_rejected_for_support() {
        // [0⊗1] ↦ [1⊗1] on the constant presheaf over an edge
        let x = Arc::new(examples::simplex(1));
        let n = constant_presheaf(x.clone(), &ChainComplexData::integers(0));
        let a = Arc::new(assemble(&n).unwrap());
        let g = ComoduleMorphism::from_triplets(a.clone(), a.clone(), &[(1, 0, 1)]).unwrap();
        let result = reconstruct(&g).unwrap();
        let w = result.witness().unwrap();
        assert_eq!(w.reason, RejectionReason::SupportSimplex);
        assert!(replay_witness(&g, w).unwrap());
    }
}
