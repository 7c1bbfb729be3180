//! Seeded random presheaves.
//!
//! Every generator `g` carries an interval tag `(a_g, s_g)` with `a_g ⊆ s_g`
//! (`a_g` may be empty) and lives in the stalks `N_x` with `a_g ⊆ x ⊆ s_g`.
//! Restrictions are coordinate projections. A global differential whose
//! entries only run from `g` to `g'` with `a_g ⊆ a_g'` and `s_g ⊆ s_g'` then
//! induces a presheaf of chain complexes, which need not split as a sum of
//! interval pieces. A random change of basis at every simplex hides the
//! coordinate structure.

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::Presheaf;
use crate::complex::{Simplex, SimplicialComplex};
use crate::gradedalg::{ChainComplexData, GradedBasis, GradedMatrix};
use crate::Coeff;

/// Size knobs for [`random_presheaf`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RandomPresheafParams {
    /// Upper bound on the number of global generators (at least one is drawn).
    pub max_rank: usize,
    /// Generator degrees are drawn from `0..=max_degree`.
    pub max_degree: i32,
    /// Number of random transvections in each change of basis.
    pub mixing: usize,
}

impl Default for RandomPresheafParams {
    fn default() -> Self {
        Self { max_rank: 6, max_degree: 2, mixing: 4 }
    }
}

#[derive(Clone, Debug)]
struct Tag {
    bottom: Option<Simplex>,
    top: Simplex,
}

impl Tag {
    fn le(&self, other: &Tag) -> bool {
        let bottom = match (&self.bottom, &other.bottom) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(a), Some(b)) => a.is_face_of(b),
        };
        bottom && self.top.is_face_of(&other.top)
    }

    fn contains(&self, x: &Simplex) -> bool {
        x.is_face_of(&self.top) && self.bottom.as_ref().is_none_or(|a| a.is_face_of(x))
    }
}

type Dense = Vec<Vec<Coeff>>;

/// `m ← (I + c e_ij) m (I - c e_ij)` on a square dense matrix.
fn conjugate(m: &mut Dense, i: usize, j: usize, c: Coeff) {
    let n = m.len();
    // left: row i += c * row j
    for k in 0..n {
        m[i][k] += c * m[j][k];
    }
    // right: column j -= c * column i
    for row in m.iter_mut() {
        row[j] -= c * row[i];
    }
}

fn random_unit(rng: &mut ChaCha8Rng) -> Coeff {
    if rng.gen_bool(0.5) {
        1
    } else {
        -1
    }
}

/// A random presheaf on `complex`; the same seed always gives the same presheaf.
pub fn random_presheaf(complex: Arc<SimplicialComplex>, params: &RandomPresheafParams, seed: u64) -> Presheaf {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if complex.is_empty() {
        return super::zero_presheaf(complex);
    }
    let simplices = complex.simplices().to_vec();

    // elementary pairs b ↦ c·e with tag(b) ≤ tag(e), plus lone cycles
    let mut tags: Vec<Tag> = Vec::new();
    let mut degrees: Vec<i32> = Vec::new();
    let mut pairs: Vec<(usize, usize, Coeff)> = Vec::new();
    let target = rng.gen_range(1..=params.max_rank.max(1));
    while tags.len() < target {
        let top = simplices.choose(&mut rng).expect("nonempty").clone();
        let bottom = if rng.gen_bool(0.4) {
            None
        } else {
            let faces = top.subsimplices();
            Some(faces.choose(&mut rng).expect("nonempty").clone())
        };
        let tag = Tag { bottom, top };
        let degree = rng.gen_range(0..=params.max_degree);
        if degree > 0 && tags.len() + 2 <= target && rng.gen_bool(0.5) {
            // partner one degree lower, with a tag above this one
            let up_top = {
                let above: Vec<&Simplex> = simplices.iter().filter(|s| tag.top.is_face_of(s)).collect();
                (*above.choose(&mut rng).expect("top itself")).clone()
            };
            let up_bottom = match &tag.bottom {
                None if rng.gen_bool(0.5) => None,
                None => Some(up_top.subsimplices().choose(&mut rng).expect("nonempty").clone()),
                Some(a) => {
                    let between: Vec<Simplex> =
                        up_top.subsimplices().into_iter().filter(|f| a.is_face_of(f)).collect();
                    Some(between.choose(&mut rng).expect("a itself").clone())
                }
            };
            let partner = Tag { bottom: up_bottom, top: up_top };
            debug_assert!(tag.le(&partner));
            let c = *[1, -1, 2].choose(&mut rng).expect("nonempty");
            tags.push(tag);
            degrees.push(degree);
            tags.push(partner);
            degrees.push(degree - 1);
            pairs.push((tags.len() - 2, tags.len() - 1, c));
        } else {
            tags.push(tag);
            degrees.push(degree);
        }
    }
    let n = tags.len();
    let mut d: Dense = vec![vec![0; n]; n];
    for &(b, e, c) in &pairs {
        d[e][b] = c;
    }
    // order-respecting unitriangular change of basis
    for _ in 0..params.mixing {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        // row i gets row j added: the new basis vector at j involves i, so tag(j) ≤ tag(i)
        if i != j && degrees[i] == degrees[j] && tags[j].le(&tags[i]) {
            conjugate(&mut d, i, j, random_unit(&mut rng));
        }
    }
    debug_assert!(entries_respect_order(&d, &tags));

    // stalks: generators containing x, ordered by degree then global index
    let mut members: Vec<Vec<usize>> = Vec::with_capacity(simplices.len());
    let mut stalk_d: Vec<Dense> = Vec::with_capacity(simplices.len());
    for x in &simplices {
        let mut m: Vec<usize> = (0..n).filter(|&g| tags[g].contains(x)).collect();
        m.sort_by_key(|&g| (degrees[g], g));
        let local: Dense = m.iter().map(|&r| m.iter().map(|&c| d[r][c]).collect()).collect();
        members.push(m);
        stalk_d.push(local);
    }
    let mut restr: BTreeMap<(usize, usize), Dense> = BTreeMap::new();
    for (x, y) in complex.codim1_relations() {
        let mut r = vec![vec![0; members[y].len()]; members[x].len()];
        for (row, g) in members[x].iter().enumerate() {
            if let Some(col) = members[y].iter().position(|h| h == g) {
                r[row][col] = 1;
            }
        }
        restr.insert((x, y), r);
    }

    // per-simplex change of basis within each degree
    for x in 0..simplices.len() {
        let k = members[x].len();
        if k < 2 {
            continue;
        }
        for _ in 0..params.mixing {
            let i = rng.gen_range(0..k);
            let j = rng.gen_range(0..k);
            if i == j || degrees[members[x][i]] != degrees[members[x][j]] {
                continue;
            }
            let c = random_unit(&mut rng);
            conjugate(&mut stalk_d[x], i, j, c);
            for (&(a, b), r) in restr.iter_mut() {
                if a == x {
                    // r ← E r
                    let cols = r[0].len();
                    for t in 0..cols {
                        let v = r[j][t];
                        r[i][t] += c * v;
                    }
                }
                if b == x {
                    // r ← r E⁻¹
                    for row in r.iter_mut() {
                        row[j] -= c * row[i];
                    }
                }
            }
        }
    }

    let bases: Vec<GradedBasis> = members
        .iter()
        .map(|m| {
            let mut ranks: BTreeMap<i32, usize> = BTreeMap::new();
            for &g in m {
                *ranks.entry(degrees[g]).or_default() += 1;
            }
            GradedBasis::from_ranks(&ranks.into_iter().collect::<Vec<_>>())
        })
        .collect();
    let stalks = stalk_d
        .iter()
        .zip(&bases)
        .map(|(m, b)| {
            let diff = GradedMatrix::from_triplets(b.clone(), b.clone(), -1, &triplets(m)).expect("degree -1");
            ChainComplexData::new(b.clone(), diff).expect("∂∂ = 0 by construction")
        })
        .collect();
    let restrictions = restr
        .iter()
        .map(|(&(x, y), r)| {
            let m = GradedMatrix::from_triplets(bases[y].clone(), bases[x].clone(), 0, &triplets(r))
                .expect("degree preserving");
            ((x, y), m)
        })
        .collect();
    Presheaf::new(complex, stalks, restrictions).expect("shapes agree")
}

fn triplets(m: &Dense) -> Vec<(usize, usize, Coeff)> {
    let mut out = Vec::new();
    for (i, row) in m.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v != 0 {
                out.push((i, j, v));
            }
        }
    }
    out
}

fn entries_respect_order(d: &Dense, tags: &[Tag]) -> bool {
    d.iter()
        .enumerate()
        .all(|(i, row)| row.iter().enumerate().all(|(j, &v)| v == 0 || tags[j].le(&tags[i])))
}
