//! Exact integer nullspaces of sparse homogeneous systems.
//!
//! Fraction-free row reduction over `Z` with checked 128-bit arithmetic.
//! Every row is divided by its content after each update, which keeps the
//! entries small for the `{-1, 0, 1}`-heavy systems built by this crate.

use std::collections::HashMap;

use crate::{ArithmeticError, Coeff};

/// A sparse row: `(column, value)` pairs, strictly increasing columns, no zeros.
pub type SparseRow = Vec<(usize, i128)>;

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn mul(a: i128, b: i128) -> Result<i128, ArithmeticError> {
    a.checked_mul(b).ok_or(ArithmeticError::Overflow)
}

/// `sa * a + sb * b`.
fn combine(sa: i128, a: &SparseRow, sb: i128, b: &SparseRow) -> Result<SparseRow, ArithmeticError> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let (col, v) = match (a.get(i), b.get(j)) {
            (Some(&(ca, va)), Some(&(cb, _))) if ca < cb => {
                i += 1;
                (ca, mul(sa, va)?)
            }
            (Some(&(ca, _)), Some(&(cb, vb))) if cb < ca => {
                j += 1;
                (cb, mul(sb, vb)?)
            }
            (Some(&(ca, va)), Some(&(_, vb))) => {
                i += 1;
                j += 1;
                (ca, mul(sa, va)?.checked_add(mul(sb, vb)?).ok_or(ArithmeticError::Overflow)?)
            }
            (Some(&(ca, va)), None) => {
                i += 1;
                (ca, mul(sa, va)?)
            }
            (None, Some(&(cb, vb))) => {
                j += 1;
                (cb, mul(sb, vb)?)
            }
            (None, None) => unreachable!(),
        };
        if v != 0 {
            out.push((col, v));
        }
    }
    Ok(out)
}

/// Divides by the content and makes the leading entry positive.
fn normalize(row: &mut SparseRow) {
    let g = row.iter().fold(0, |g, &(_, v)| gcd(g, v));
    let s = match row.first() {
        Some(&(_, v)) if v < 0 => -1,
        _ => 1,
    };
    if g > 1 || s < 0 {
        for (_, v) in row.iter_mut() {
            *v = *v / g * s;
        }
    }
}

fn entry(row: &SparseRow, col: usize) -> i128 {
    row.binary_search_by_key(&col, |&(c, _)| c).map(|k| row[k].1).unwrap_or(0)
}

/// A reduced echelon form built incrementally from sparse rows.
#[derive(Debug, Default, Clone)]
pub struct Echelon {
    rows: Vec<SparseRow>,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `row` against the current pivots.
    pub fn reduce(&self, mut row: SparseRow) -> Result<SparseRow, ArithmeticError> {
        for e in &self.rows {
            let (p, d) = e[0];
            let v = entry(&row, p);
            if v != 0 {
                let g = gcd(d, v);
                row = combine(d / g, &row, -(v / g), e)?;
                normalize(&mut row);
            }
        }
        Ok(row)
    }

    /// Adds a row; returns whether it increased the rank.
    pub fn insert(&mut self, row: SparseRow) -> Result<bool, ArithmeticError> {
        let mut row = self.reduce(row)?;
        if row.is_empty() {
            return Ok(false);
        }
        normalize(&mut row);
        let (p, d) = row[0];
        for e in &mut self.rows {
            let v = entry(e, p);
            if v != 0 {
                let g = gcd(d, v);
                *e = combine(d / g, e, -(v / g), &row)?;
                normalize(e);
            }
        }
        self.rows.push(row);
        Ok(true)
    }

    /// Integer basis of `{v : row · v = 0 for every inserted row}` in `Z^ncols`.
    ///
    /// Each basis vector is primitive (content one).
    pub fn nullspace(&self, ncols: usize) -> Result<Vec<Vec<Coeff>>, ArithmeticError> {
        let pivots: HashMap<usize, usize> = self.rows.iter().enumerate().map(|(r, e)| (e[0].0, r)).collect();
        // column -> rows with a nonzero entry there
        let mut by_col: HashMap<usize, Vec<(usize, i128)>> = HashMap::new();
        for (r, e) in self.rows.iter().enumerate() {
            for &(c, v) in &e[1..] {
                by_col.entry(c).or_default().push((r, v));
            }
        }
        let mut out = Vec::new();
        for free in (0..ncols).filter(|c| !pivots.contains_key(c)) {
            let involved = by_col.get(&free).map(Vec::as_slice).unwrap_or(&[]);
            let mut lcm: i128 = 1;
            for &(r, _) in involved {
                let d = self.rows[r][0].1;
                lcm = mul(lcm / gcd(lcm, d), d)?;
            }
            let mut v: Vec<(usize, i128)> = vec![(free, lcm)];
            for &(r, val) in involved {
                let (p, d) = self.rows[r][0];
                v.push((p, -mul(val, lcm / d)?));
            }
            v.sort_unstable();
            normalize(&mut v);
            let mut dense = vec![0 as Coeff; ncols];
            for (c, x) in v {
                dense[c] = Coeff::try_from(x).map_err(|_| ArithmeticError::Overflow)?;
            }
            out.push(dense);
        }
        Ok(out)
    }
}

/// Integer nullspace basis of the system given by `rows` over `ncols` unknowns.
pub fn integer_nullspace(rows: &[Vec<(usize, Coeff)>], ncols: usize) -> Result<Vec<Vec<Coeff>>, ArithmeticError> {
    let mut ech = Echelon::new();
    for r in rows {
        let mut row: SparseRow = r.iter().filter(|(_, v)| *v != 0).map(|&(c, v)| (c, v as i128)).collect();
        row.sort_unstable_by_key(|&(c, _)| c);
        // merge duplicates
        row.dedup_by(|b, a| {
            if a.0 == b.0 {
                a.1 += b.1;
                true
            } else {
                false
            }
        });
        row.retain(|&(_, v)| v != 0);
        ech.insert(row)?;
    }
    ech.nullspace(ncols)
}
