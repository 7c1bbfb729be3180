//! Standard small complexes used by tests, benches and the CLI.

use crate::complex::{SimplicialComplex, VertexId};

/// The full `n`-simplex on vertices `0..=n`.
pub fn simplex(n: usize) -> SimplicialComplex {
    SimplicialComplex::from_maximal([(0..=n as VertexId).collect::<Vec<_>>()]).expect("valid simplex")
}

/// The boundary of the `n`-simplex.
pub fn simplex_boundary(n: usize) -> SimplicialComplex {
    let all: Vec<VertexId> = (0..=n as VertexId).collect();
    let facets = (0..=n).map(|u| {
        let mut f = all.clone();
        f.remove(u);
        f
    });
    SimplicialComplex::from_maximal(facets).expect("valid facets")
}

/// A single vertex.
pub fn point() -> SimplicialComplex {
    SimplicialComplex::from_maximal([vec![0]]).expect("valid")
}

/// The hollow triangle on `0, 1, 2`.
pub fn circle() -> SimplicialComplex {
    SimplicialComplex::from_maximal([vec![0, 1], vec![1, 2], vec![0, 2]]).expect("valid")
}

/// Two disjoint hollow triangles.
pub fn two_circles() -> SimplicialComplex {
    SimplicialComplex::from_maximal([
        vec![0, 1],
        vec![1, 2],
        vec![0, 2],
        vec![3, 4],
        vec![4, 5],
        vec![3, 5],
    ])
    .expect("valid")
}

/// Triangles of the six-vertex real projective plane (the hemi-icosahedron).
pub const RP2_TRIANGLES: [[VertexId; 3]; 10] = [
    [0, 1, 2],
    [0, 2, 3],
    [0, 3, 4],
    [0, 4, 5],
    [0, 1, 5],
    [1, 2, 4],
    [2, 3, 5],
    [1, 3, 4],
    [1, 3, 5],
    [2, 4, 5],
];

/// The six-vertex triangulation of the real projective plane.
pub fn rp2() -> SimplicialComplex {
    SimplicialComplex::from_maximal(RP2_TRIANGLES.iter().map(|t| t.to_vec())).expect("valid")
}

/// The seven-vertex (Möbius–Császár) torus: triangles `{i, i+1, i+3}` and `{i, i+2, i+3}` mod 7.
pub fn torus() -> SimplicialComplex {
    let tris = (0..7u32).flat_map(|i| [[i, (i + 1) % 7, (i + 3) % 7], [i, (i + 2) % 7, (i + 3) % 7]]);
    SimplicialComplex::from_maximal(tris.map(|t| t.to_vec())).expect("valid")
}

/// Two edges `[0,1]` and `[0,2]` sharing their first vertex.
pub fn two_edges() -> SimplicialComplex {
    SimplicialComplex::from_maximal([vec![0, 1], vec![0, 2]]).expect("valid")
}

/// Two disjoint edges `[0,1]` and `[2,3]`.
pub fn disjoint_edges() -> SimplicialComplex {
    SimplicialComplex::from_maximal([vec![0, 1], vec![2, 3]]).expect("valid")
}

/// Looks up a named complex: `point`, `circle`, `two-circles`, `rp2`, `torus`,
/// `two-edges`, `disjoint-edges`, `simplex-N` or `sphere-N` (boundary of the `(N+1)`-simplex).
pub fn by_name(name: &str) -> Option<SimplicialComplex> {
    match name {
        "point" => Some(point()),
        "circle" => Some(circle()),
        "two-circles" => Some(two_circles()),
        "rp2" => Some(rp2()),
        "torus" => Some(torus()),
        "two-edges" => Some(two_edges()),
        "disjoint-edges" => Some(disjoint_edges()),
        _ => {
            if let Some(n) = name.strip_prefix("simplex-") {
                n.parse().ok().map(simplex)
            } else if let Some(n) = name.strip_prefix("sphere-") {
                n.parse::<usize>().ok().map(|n| simplex_boundary(n + 1))
            } else {
                None
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn rp2_is_a_closed_surface_with_euler_characteristic_one() {
        let x = rp2();
        assert_eq!((x.count_of_dim(0), x.count_of_dim(1), x.count_of_dim(2)), (6, 15, 10));
        assert_eq!(x.euler_characteristic(), 1);
        let mut edge_use: HashMap<_, usize> = HashMap::new();
        for t in x.of_dim(2) {
            for f in t.facets() {
                *edge_use.entry(f).or_default() += 1;
            }
        }
        assert!(edge_use.values().all(|&n| n == 2));
    }

    #[test]
    fn torus_counts() {
        let x = torus();
        assert_eq!((x.count_of_dim(0), x.count_of_dim(1), x.count_of_dim(2)), (7, 21, 14));
        assert_eq!(x.euler_characteristic(), 0);
    }

    #[test]
    fn boundary_of_tetrahedron() {
        let x = simplex_boundary(3);
        assert_eq!(x.len(), 14);
        assert_eq!(x.dim(), Some(2));
    }

    #[test]
    fn names() {
        assert_eq!(by_name("simplex-3").unwrap(), simplex(3));
        assert_eq!(by_name("sphere-2").unwrap(), simplex_boundary(3));
        assert!(by_name("klein").is_none());
    }
}
