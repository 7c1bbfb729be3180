use std::sync::Arc;

use cupi_assembly::assembly::{assemble_morphism, AssemblyComplex, ComoduleMorphism};
use cupi_assembly::complex::SimplicialComplex;
use cupi_assembly::cupi::CupStructure;
use cupi_assembly::examples;
use cupi_assembly::io;
use cupi_assembly::presheaf::{
    hom_space, random_morphism, random_presheaf, validate_morphism, validate_presheaf, Presheaf, PresheafMorphism,
    RandomPresheafParams,
};
use cupi_assembly::reconstruct::{reconstruct, ReconstructionResult};
use proptest::prelude::*;

fn complex(k: usize) -> Arc<SimplicialComplex> {
    Arc::new(match k {
        0 => examples::simplex(2),
        1 => examples::circle(),
        2 => examples::two_edges(),
        _ => examples::simplex_boundary(3),
    })
}

fn small() -> RandomPresheafParams {
    RandomPresheafParams { max_rank: 4, max_degree: 2, mixing: 3 }
}

fn pair(k: usize, s1: u64, s2: u64) -> (Presheaf, Presheaf) {
    let x = complex(k);
    (random_presheaf(x.clone(), &small(), s1), random_presheaf(x, &small(), s2))
}

fn assemblies(n: &Presheaf, n2: &Presheaf) -> (Arc<AssemblyComplex>, Arc<AssemblyComplex>) {
    let cup = Arc::new(CupStructure::new(Arc::new(n.complex().clone())));
    (
        Arc::new(AssemblyComplex::with_cup(Arc::new(n.clone()), cup.clone()).unwrap()),
        Arc::new(AssemblyComplex::with_cup(Arc::new(n2.clone()), cup).unwrap()),
    )
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn random_presheaves_are_valid(k in 0usize..4, seed in any::<u64>()) {
        let n = random_presheaf(complex(k), &RandomPresheafParams::default(), seed);
        let report = validate_presheaf(&n);
        prop_assert!(report.passed(), "{:?}", report.failures);
    }

    #[test]
    fn presheaf_files_round_trip(k in 0usize..4, seed in any::<u64>()) {
        let x = complex(k);
        let n = random_presheaf(x.clone(), &small(), seed);
        let text = serde_json::to_string(&io::presheaf_to_doc(&n)).unwrap();
        let back = io::parse_presheaf(&text, "n.json", x).unwrap();
        prop_assert_eq!(back, n);
    }

    #[test]
    fn morphism_files_round_trip(k in 0usize..4, s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
        let (n, n2) = pair(k, s1, s2);
        let hom = hom_space(&n, &n2).unwrap();
        let f = random_morphism(&n, &n2, &hom, s3).unwrap();
        let text = serde_json::to_string(&io::morphism_to_doc(&f, &n)).unwrap();
        let back = io::parse_morphism(&text, "f.json", &n, &n2).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn hom_basis_consists_of_morphisms(k in 0usize..4, s1 in any::<u64>(), s2 in any::<u64>()) {
        let (n, n2) = pair(k, s1, s2);
        let hom = hom_space(&n, &n2).unwrap();
        for f in &hom.basis {
            let report = validate_morphism(f, &n, &n2);
            prop_assert!(report.passed(), "{:?}", report.failures);
        }
    }

    #[test]
    fn assembly_is_a_functor(k in 0usize..4, s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>(), s4 in any::<u64>()) {
        let x = complex(k);
        let n1 = random_presheaf(x.clone(), &small(), s1);
        let n2 = random_presheaf(x.clone(), &small(), s2);
        let n3 = random_presheaf(x, &small(), s3);
        let f = random_morphism(&n1, &n2, &hom_space(&n1, &n2).unwrap(), s4).unwrap();
        let g = random_morphism(&n2, &n3, &hom_space(&n2, &n3).unwrap(), s4 ^ 1).unwrap();

        let cup = Arc::new(CupStructure::new(Arc::new(n1.complex().clone())));
        let a: Vec<Arc<AssemblyComplex>> = [&n1, &n2, &n3]
            .iter()
            .map(|n| Arc::new(AssemblyComplex::with_cup(Arc::new((*n).clone()), cup.clone()).unwrap()))
            .collect();

        let af = assemble_morphism(&f, a[0].clone(), a[1].clone()).unwrap();
        let ag = assemble_morphism(&g, a[1].clone(), a[2].clone()).unwrap();
        let agf = assemble_morphism(&g.after(&f).unwrap(), a[0].clone(), a[2].clone()).unwrap();
        prop_assert_eq!(ag.after(&af).unwrap(), agf);

        let id = assemble_morphism(&PresheafMorphism::identity(&n1), a[0].clone(), a[0].clone()).unwrap();
        prop_assert_eq!(id, ComoduleMorphism::identity(a[0].clone()));
    }

    #[test]
    fn reconstruction_inverts_assembly(k in 0usize..4, s1 in any::<u64>(), s2 in any::<u64>(), s3 in any::<u64>()) {
        let (n, n2) = pair(k, s1, s2);
        let f = random_morphism(&n, &n2, &hom_space(&n, &n2).unwrap(), s3).unwrap();
        let (a, b) = assemblies(&n, &n2);
        let af = assemble_morphism(&f, a, b).unwrap();
        match reconstruct(&af).unwrap() {
            ReconstructionResult::Accepted { morphism, .. } => prop_assert_eq!(morphism, f),
            ReconstructionResult::Rejected(w) => prop_assert!(false, "rejected: {:?}", w),
        }
    }
}
