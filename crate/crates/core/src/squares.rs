//! Steenrod squares on mod 2 cohomology, computed from the cup-i coproducts:
//! `Sq^k[α]` is represented by `x ↦ (α⊗α)(Δ_{n-k} x)` on `(n+k)`-simplices.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::complex::SimplicialComplex;
use crate::cupi::{CupError, CupStructure};
use crate::gradedalg::{f2_cohomology, CohomologyError, F2Vec, Field2Space};
use crate::par;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SquareError {
    #[error("Sq^k is only defined for k >= 0, got {0}")]
    NegativeK(i64),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error(transparent)]
    Cup(#[from] CupError),
}

/// A mod 2 cohomology class with a chosen cocycle representative.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyClass {
    pub degree: usize,
    /// Values on the `degree`-simplices, in enumeration order.
    pub representative: F2Vec,
    /// Coordinates in the fixed basis of `H^degree`.
    pub coordinates: F2Vec,
}

impl CohomologyClass {
    pub fn is_zero(&self) -> bool {
        self.coordinates.is_zero()
    }
}

/// Cup-i coproducts and mod 2 cohomology of one complex.
pub struct SquareContext {
    cup: CupStructure,
    cohomology: Field2Space,
}

impl SquareContext {
    pub fn new(complex: &SimplicialComplex) -> Self {
        let complex = Arc::new(complex.clone());
        let cohomology = f2_cohomology(&complex.chain_complex());
        Self { cup: CupStructure::new(complex), cohomology }
    }

    pub fn complex(&self) -> &SimplicialComplex {
        self.cup.complex()
    }

    pub fn cup(&self) -> &CupStructure {
        &self.cup
    }

    pub fn cohomology(&self) -> &Field2Space {
        &self.cohomology
    }

    pub fn dim(&self, degree: usize) -> usize {
        self.cohomology.dim(degree as i32)
    }

    /// The class of a cocycle given by its values on `degree`-simplices.
    pub fn class_of(&self, degree: usize, representative: F2Vec) -> Result<CohomologyClass, SquareError> {
        let expected = self.complex().count_of_dim(degree);
        if representative.len() != expected {
            return Err(CohomologyError::Length {
                degree: degree as i32,
                expected,
                got: representative.len(),
            }
            .into());
        }
        let coordinates = if expected == 0 {
            F2Vec::zeros(0)
        } else {
            self.cohomology.reduce(degree as i32, &representative)?
        };
        Ok(CohomologyClass { degree, representative, coordinates })
    }

    /// The `j`-th basis class of `H^degree`.
    pub fn basis_class(&self, degree: usize, j: usize) -> CohomologyClass {
        let rep = self.cohomology.representative(degree as i32, j).clone();
        let coordinates = F2Vec::unit(self.dim(degree), j);
        CohomologyClass { degree, representative: rep, coordinates }
    }

    /// `(α⊗β)(Δ_j x)` mod 2 for every simplex `x` of dimension `deg α + deg β - j`.
    ///
    /// Negative `j` gives the zero cochain.
    pub fn evaluate_pairing(&self, j: i64, alpha: &F2Vec, p: usize, beta: &F2Vec, q: usize) -> Result<F2Vec, SquareError> {
        let complex = self.complex();
        let out_dim = p as i64 + q as i64 - j;
        if out_dim < 0 {
            return Ok(F2Vec::zeros(0));
        }
        let targets = complex.of_dim(out_dim as usize);
        let mut out = F2Vec::zeros(targets.len());
        if j < 0 {
            return Ok(out);
        }
        for (pos, x) in targets.iter().enumerate() {
            let mut bit = false;
            for ((a, b), c) in self.cup.cup_i(j as usize, x)?.iter() {
                if c % 2 == 0 || a.dim() != p || b.dim() != q {
                    continue;
                }
                let pa = complex.position_in_dim(a).expect("face of a member");
                let pb = complex.position_in_dim(b).expect("face of a member");
                bit ^= alpha.get(pa) & beta.get(pb);
            }
            out.set(pos, bit);
        }
        Ok(out)
    }

    /// `Sq^k[α]`.
    pub fn steenrod_square(&self, k: i64, alpha: &CohomologyClass) -> Result<CohomologyClass, SquareError> {
        if k < 0 {
            return Err(SquareError::NegativeK(k));
        }
        let n = alpha.degree;
        let out_degree = n + k as usize;
        let rep = self.evaluate_pairing(n as i64 - k, &alpha.representative, n, &alpha.representative, n)?;
        debug_assert_eq!(rep.len(), self.complex().count_of_dim(out_degree));
        self.class_of(out_degree, rep)
    }

    /// `[α ∪ β]` through `Δ_0`.
    pub fn cup_product(&self, alpha: &CohomologyClass, beta: &CohomologyClass) -> Result<CohomologyClass, SquareError> {
        let rep = self.evaluate_pairing(0, &alpha.representative, alpha.degree, &beta.representative, beta.degree)?;
        self.class_of(alpha.degree + beta.degree, rep)
    }
}

/// One row of a squares table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SquareRecord {
    pub degree: usize,
    pub class_index: usize,
    pub k: usize,
    pub output_coordinates: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SquaresTable {
    pub betti: Vec<usize>,
    pub records: Vec<SquareRecord>,
}

impl SquaresTable {
    pub fn get(&self, degree: usize, class_index: usize, k: usize) -> Option<&SquareRecord> {
        self.records
            .iter()
            .find(|r| r.degree == degree && r.class_index == class_index && r.k == k)
    }
}

impl fmt::Display for SquaresTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let betti: Vec<String> = self.betti.iter().map(ToString::to_string).collect();
        writeln!(f, "mod 2 betti numbers: {}", betti.join(" "))?;
        writeln!(f, "{:>6} {:>6} {:>3} {:>6}  coordinates", "degree", "class", "k", "target")?;
        for r in &self.records {
            let coords: String = r.output_coordinates.iter().map(|b| char::from(b'0' + b)).collect();
            writeln!(
                f,
                "{:>6} {:>6} {:>3} {:>6}  [{}]",
                r.degree,
                r.class_index,
                r.k,
                r.degree + r.k,
                coords
            )?;
        }
        Ok(())
    }
}

/// `Sq^k` of every basis class, for `0 ≤ k ≤ min(n, max_k)` with `n + k ≤ dim X`.
pub fn squares_table(complex: &SimplicialComplex, max_k: Option<usize>) -> Result<SquaresTable, SquareError> {
    let ctx = SquareContext::new(complex);
    let top = complex.dim().map_or(0, |d| d + 1);
    let betti: Vec<usize> = (0..top).map(|n| ctx.dim(n)).collect();
    let mut jobs = Vec::new();
    for (n, &b) in betti.iter().enumerate() {
        for j in 0..b {
            for k in 0..=n.min(max_k.unwrap_or(usize::MAX)) {
                if n + k < top {
                    jobs.push((n, j, k));
                }
            }
        }
    }
    let records = par::map(&jobs, |&(n, j, k)| {
        let class = ctx.basis_class(n, j);
        ctx.steenrod_square(k as i64, &class).map(|sq| SquareRecord {
            degree: n,
            class_index: j,
            k,
            output_coordinates: sq.coordinates.to_bits(),
        })
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    Ok(SquaresTable { betti, records })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;

    #[test]
    fn contractible_complex_has_only_sq0_on_h0() {
        let t = squares_table(&examples::simplex(2), None).unwrap();
        assert_eq!(t.betti, vec![1, 0, 0]);
        assert_eq!(t.records, vec![SquareRecord { degree: 0, class_index: 0, k: 0, output_coordinates: vec![1] }]);
    }

    #[test]
    fn negative_k_is_rejected() {
        let ctx = SquareContext::new(&examples::circle());
        let a = ctx.basis_class(1, 0);
        assert_eq!(ctx.steenrod_square(-1, &a), Err(SquareError::NegativeK(-1)));
    }

    #[test]
    fn squares_above_the_degree_vanish() {
        let ctx = SquareContext::new(&examples::rp2());
        let a = ctx.basis_class(0, 0);
        let sq = ctx.steenrod_square(1, &a).unwrap();
        assert!(sq.is_zero());
        assert!(sq.representative.is_zero());
    }

    #[test]
    fn rp2_has_nontrivial_sq1() {
        let t = squares_table(&examples::rp2(), None).unwrap();
        assert_eq!(t.betti, vec![1, 1, 1]);
        assert_eq!(t.get(1, 0, 1).unwrap().output_coordinates, vec![1]);
        assert_eq!(t.get(1, 0, 0).unwrap().output_coordinates, vec![1]);
    }

    #[test]
    fn two_circles_have_no_higher_squares() {
        let t = squares_table(&examples::two_circles(), None).unwrap();
        assert_eq!(t.betti, vec![2, 2]);
        for r in &t.records {
            if r.k >= 1 {
                assert!(r.output_coordinates.iter().all(|&b| b == 0));
            }
        }
    }

    #[test]
    fn table_text_is_aligned() {
        let t = squares_table(&examples::rp2(), Some(1)).unwrap();
        let text = t.to_string();
        assert!(text.contains("     1      0   1      2  [1]"), "{text}");
    }
}
