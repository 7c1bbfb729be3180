//! Simplicial complexes with ordered vertices.
//!
//! Vertices are integers and their numeric order is the vertex order used by
//! every formula downstream. A complex enumerates its simplices once, by
//! dimension and then lexicographically; that enumeration fixes the row and
//! column order of every matrix built from it.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use crate::gradedalg::{ChainComplexData, GradedBasis, GradedMatrix};
use crate::lincomb::LinComb;
use crate::Coeff;

pub type VertexId = u32;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ComplexError {
    #[error("malformed simplex {0:?}: {1}")]
    Malformed(Vec<VertexId>, &'static str),
    #[error("simplex {0} is not in the complex")]
    UnknownSimplex(Simplex),
    #[error("face index {index} out of range for a simplex of dimension {dim}")]
    FaceIndex { index: usize, dim: usize },
    #[error("cannot parse simplex {0:?}")]
    Parse(String),
}

/// A nonempty, strictly increasing sequence of vertices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Simplex(Vec<VertexId>);

impl Simplex {
    /// Requires strictly increasing vertices.
    pub fn new(vertices: Vec<VertexId>) -> Result<Self, ComplexError> {
        if vertices.is_empty() {
            return Err(ComplexError::Malformed(vertices, "empty simplex"));
        }
        if vertices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ComplexError::Malformed(vertices, "vertices must be strictly increasing"));
        }
        Ok(Self(vertices))
    }

    /// Sorts the vertices first; repeated vertices are still an error.
    pub fn from_unsorted(mut vertices: Vec<VertexId>) -> Result<Self, ComplexError> {
        let original = vertices.clone();
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(ComplexError::Malformed(original, "repeated vertex"));
        }
        Self::new(vertices)
    }

    pub(crate) fn from_sorted_unchecked(vertices: Vec<VertexId>) -> Self {
        debug_assert!(!vertices.is_empty() && vertices.windows(2).all(|w| w[0] < w[1]));
        Self(vertices)
    }

    pub fn vertex(v: VertexId) -> Self {
        Self(vec![v])
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    /// Removes the vertex in position `u`.
    pub fn face(&self, u: usize) -> Result<Simplex, ComplexError> {
        let dim = self.dim();
        if dim == 0 || u > dim {
            return Err(ComplexError::FaceIndex { index: u, dim });
        }
        let mut v = self.0.clone();
        v.remove(u);
        Ok(Self(v))
    }

    /// Codimension-one faces, in position order `u = 0..=dim`.
    pub fn facets(&self) -> Vec<Simplex> {
        if self.dim() == 0 {
            return Vec::new();
        }
        (0..=self.dim()).map(|u| self.face(u).expect("in range")).collect()
    }

    /// The simplicial boundary `Σ_u (-1)^u ∂_u x`.
    pub fn boundary(&self) -> LinComb<Simplex> {
        let mut out = LinComb::zero();
        for (u, f) in self.facets().into_iter().enumerate() {
            out.add_term(f, if u % 2 == 0 { 1 } else { -1 }).expect("unit coefficients");
        }
        out
    }

    /// Whether `self` is a (not necessarily proper) face of `other`.
    pub fn is_face_of(&self, other: &Simplex) -> bool {
        let mut it = other.0.iter();
        self.0.iter().all(|v| it.any(|w| w == v))
    }

    /// Positions of the vertices of `self` inside `other`, if `self` is a face.
    pub fn positions_in(&self, other: &Simplex) -> Option<Vec<usize>> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut start = 0;
        for v in &self.0 {
            let pos = other.0[start..].iter().position(|w| w == v)? + start;
            out.push(pos);
            start = pos + 1;
        }
        Some(out)
    }

    /// All nonempty faces, in the global enumeration order.
    pub fn subsimplices(&self) -> Vec<Simplex> {
        let n = self.0.len();
        let mut out: Vec<Simplex> = (1u64..(1u64 << n))
            .map(|mask| {
                Simplex(
                    (0..n).filter(|i| mask & (1 << i) != 0).map(|i| self.0[i]).collect(),
                )
            })
            .collect();
        out.sort();
        out
    }

    /// The closure `x̄` as a complex in its own right.
    pub fn closure(&self) -> SimplicialComplex {
        SimplicialComplex::from_sorted_set(self.subsimplices().into_iter().collect())
    }

    pub fn intersects(&self, other: &Simplex) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => return true,
            }
        }
        false
    }
}

impl Ord for Simplex {
    /// Dimension first, then lexicographic.
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Simplex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

impl FromStr for Simplex {
    type Err = ComplexError;

    /// Parses `"0,1,2"` (whitespace and surrounding brackets tolerated).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let trimmed = s.trim().trim_start_matches('[').trim_end_matches(']');
        let vertices = trimmed
            .split(',')
            .map(|t| t.trim().parse::<VertexId>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| ComplexError::Parse(s.to_string()))?;
        Simplex::new(vertices)
    }
}

/// A finite simplicial complex, closed under faces.
#[derive(Clone)]
pub struct SimplicialComplex {
    simplices: Vec<Simplex>,
    index: HashMap<Simplex, usize>,
    /// `dim_start[d]..dim_start[d + 1]` are the `d`-simplices.
    dim_start: Vec<usize>,
    cofacets: Vec<Vec<usize>>,
}

impl PartialEq for SimplicialComplex {
    fn eq(&self, other: &Self) -> bool {
        self.simplices == other.simplices
    }
}

impl Eq for SimplicialComplex {}

impl fmt::Debug for SimplicialComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.simplices.iter()).finish()
    }
}

impl SimplicialComplex {
    /// The face closure of the given simplices.
    pub fn from_maximal<I, V>(maximal: I) -> Result<Self, ComplexError>
    where
        I: IntoIterator<Item = V>,
        V: Into<Vec<VertexId>>,
    {
        let mut set = BTreeSet::new();
        for m in maximal {
            let s = Simplex::from_unsorted(m.into())?;
            if set.contains(&s) {
                continue;
            }
            set.extend(s.subsimplices());
        }
        Ok(Self::from_sorted_set(set))
    }

    pub fn empty() -> Self {
        Self::from_sorted_set(BTreeSet::new())
    }

    fn from_sorted_set(set: BTreeSet<Simplex>) -> Self {
        let simplices: Vec<Simplex> = set.into_iter().collect();
        let index: HashMap<Simplex, usize> =
            simplices.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        let top = simplices.last().map(|s| s.dim() + 1).unwrap_or(0);
        let mut dim_start = vec![0; top + 1];
        for d in 0..=top {
            dim_start[d] = simplices.partition_point(|s| s.dim() < d);
        }
        let mut cofacets = vec![Vec::new(); simplices.len()];
        for (j, s) in simplices.iter().enumerate() {
            for f in s.facets() {
                cofacets[index[&f]].push(j);
            }
        }
        Self { simplices, index, dim_start, cofacets }
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    /// `None` for the empty complex.
    pub fn dim(&self) -> Option<usize> {
        self.simplices.last().map(Simplex::dim)
    }

    pub fn simplices(&self) -> &[Simplex] {
        &self.simplices
    }

    pub fn simplex(&self, index: usize) -> &Simplex {
        &self.simplices[index]
    }

    pub fn of_dim(&self, d: usize) -> &[Simplex] {
        if d + 1 >= self.dim_start.len() {
            return &[];
        }
        &self.simplices[self.dim_start[d]..self.dim_start[d + 1]]
    }

    pub fn count_of_dim(&self, d: usize) -> usize {
        self.of_dim(d).len()
    }

    pub fn index_of(&self, s: &Simplex) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn require(&self, s: &Simplex) -> Result<usize, ComplexError> {
        self.index_of(s).ok_or_else(|| ComplexError::UnknownSimplex(s.clone()))
    }

    /// Position of `s` among the simplices of its own dimension.
    pub fn position_in_dim(&self, s: &Simplex) -> Option<usize> {
        self.index_of(s).map(|i| i - self.dim_start[s.dim()])
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.index.contains_key(s)
    }

    /// Indices of the simplices having `index` as a codimension-one face.
    pub fn cofacets(&self, index: usize) -> &[usize] {
        &self.cofacets[index]
    }

    pub fn maximal_simplices(&self) -> Vec<Simplex> {
        self.simplices
            .iter()
            .enumerate()
            .filter(|(i, _)| self.cofacets[*i].is_empty())
            .map(|(_, s)| s.clone())
            .collect()
    }

    pub fn vertices(&self) -> Vec<VertexId> {
        self.of_dim(0).iter().map(|s| s.vertices()[0]).collect()
    }

    /// The closure `x̄` of a member simplex.
    pub fn closure(&self, x: &Simplex) -> Result<SimplicialComplex, ComplexError> {
        self.require(x)?;
        Ok(x.closure())
    }

    /// All pairs `(x, y)` of member indices with `x` a face of `y` (including `x = y`).
    pub fn face_relations(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (j, y) in self.simplices.iter().enumerate() {
            for x in y.subsimplices() {
                out.push((self.index[&x], j));
            }
        }
        out.sort_unstable();
        out
    }

    /// Codimension-one relations `(facet, simplex)` as member indices.
    pub fn codim1_relations(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (j, y) in self.simplices.iter().enumerate() {
            for f in y.facets() {
                out.push((self.index[&f], j));
            }
        }
        out.sort_unstable();
        out
    }

    /// Euler characteristic `Σ (-1)^d #d-simplices`.
    pub fn euler_characteristic(&self) -> i64 {
        self.simplices.iter().map(|s| if s.dim() % 2 == 0 { 1 } else { -1 }).sum()
    }

    /// The simplicial chain complex `C(X)`; generator `i` is simplex `i`.
    pub fn chain_complex(&self) -> ChainComplexData {
        let basis = GradedBasis::new(
            self.simplices.iter().map(|s| (s.dim() as i32, s.to_string())).collect(),
        )
        .expect("simplex labels are unique");
        let columns = self
            .simplices
            .iter()
            .map(|s| {
                s.boundary()
                    .map_keys(|f| Some(self.index[f]))
                    .expect("unit coefficients")
            })
            .collect();
        let differential = GradedMatrix::new(basis.clone(), basis.clone(), -1, columns)
            .expect("boundary lowers degree by one");
        ChainComplexData::new(basis, differential).expect("∂∂ = 0 on simplicial chains")
    }

    /// Expresses a chain of simplices in generator coordinates of [`Self::chain_complex`].
    pub fn to_generators(&self, chain: &LinComb<Simplex>) -> Result<LinComb<usize>, ComplexError> {
        let mut out = LinComb::zero();
        for (s, c) in chain.iter() {
            out.add_term(self.require(s)?, c).expect("no overflow on relabelling");
        }
        Ok(out)
    }
}

/// The signed incidence `[facet : simplex]`, zero unless `facet` is a codimension-one face.
pub fn incidence(facet: &Simplex, simplex: &Simplex) -> Coeff {
    if facet.dim() + 1 != simplex.dim() {
        return 0;
    }
    match facet.positions_in(simplex) {
        Some(pos) => {
            let missing = (0..=simplex.dim()).find(|u| !pos.contains(u)).expect("one vertex missing");
            if missing % 2 == 0 {
                1
            } else {
                -1
            }
        }
        None => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(v: &[VertexId]) -> Simplex {
        Simplex::new(v.to_vec()).unwrap()
    }

    #[test]
    fn triangle_closure() {
        let x = SimplicialComplex::from_maximal([vec![0, 1, 2]]).unwrap();
        let expected: Vec<Simplex> = [
            &[0][..],
            &[1],
            &[2],
            &[0, 1],
            &[0, 2],
            &[1, 2],
            &[0, 1, 2],
        ]
        .iter()
        .map(|v| s(v))
        .collect();
        assert_eq!(x.simplices(), expected.as_slice());
        assert_eq!(x.dim(), Some(2));
    }

    #[test]
    fn empty_complex() {
        let x = SimplicialComplex::from_maximal(Vec::<Vec<VertexId>>::new()).unwrap();
        assert!(x.is_empty());
        assert_eq!(x.dim(), None);
        assert_eq!(x.of_dim(0).len(), 0);
    }

    #[test]
    fn duplicate_vertices_are_rejected() {
        let err = SimplicialComplex::from_maximal([vec![0, 1, 1]]).unwrap_err();
        assert!(matches!(err, ComplexError::Malformed(..)));
        assert!(Simplex::new(vec![2, 1]).is_err());
        assert!(Simplex::new(vec![]).is_err());
    }

    #[test]
    fn faces_by_position() {
        assert_eq!(s(&[0, 1, 2]).face(0).unwrap(), s(&[1, 2]));
        assert_eq!(s(&[0, 1, 2]).face(2).unwrap(), s(&[0, 1]));
        assert_eq!(s(&[3, 5, 8, 9]).face(1).unwrap(), s(&[3, 8, 9]));
        assert_eq!(
            s(&[0, 1]).face(2).unwrap_err(),
            ComplexError::FaceIndex { index: 2, dim: 1 }
        );
        assert!(s(&[4]).face(0).is_err());
    }

    #[test]
    fn closures() {
        let x = SimplicialComplex::from_maximal([vec![0, 1, 2, 3], vec![3, 4]]).unwrap();
        assert_eq!(x.closure(&s(&[0, 1])).unwrap().simplices(), &[s(&[0]), s(&[1]), s(&[0, 1])]);
        assert_eq!(x.closure(&s(&[0])).unwrap().len(), 1);
        assert_eq!(x.closure(&s(&[0, 1, 3])).unwrap().len(), 7);
        assert!(matches!(x.closure(&s(&[0, 4])), Err(ComplexError::UnknownSimplex(_))));
    }

    #[test]
    fn noncontiguous_vertices() {
        let x = SimplicialComplex::from_maximal([vec![10, 3], vec![7]]).unwrap();
        assert_eq!(x.vertices(), vec![3, 7, 10]);
        assert_eq!(x.maximal_simplices(), vec![s(&[7]), s(&[3, 10])]);
    }

    #[test]
    fn parse_and_display() {
        let x: Simplex = "0, 1,2".parse().unwrap();
        assert_eq!(x, s(&[0, 1, 2]));
        assert_eq!(x.to_string(), "0,1,2");
        assert_eq!("[3,5]".parse::<Simplex>().unwrap(), s(&[3, 5]));
        assert!("a,b".parse::<Simplex>().is_err());
    }

    #[test]
    fn incidence_matches_boundary() {
        let y = s(&[0, 2, 5]);
        for (u, f) in y.facets().iter().enumerate() {
            assert_eq!(incidence(f, &y), if u % 2 == 0 { 1 } else { -1 });
        }
        assert_eq!(incidence(&s(&[0]), &y), 0);
    }

    #[test]
    fn chain_complex_is_a_complex() {
        let x = SimplicialComplex::from_maximal([vec![0, 1, 2, 3]]).unwrap();
        let c = x.chain_complex();
        assert_eq!(c.basis().len(), 15);
    }
}
