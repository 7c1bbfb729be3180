//! Sparse integer linear combinations with checked arithmetic.

use std::collections::BTreeMap;
use std::fmt;

use crate::{ArithmeticError, Coeff};

/// A finite formal sum `Σ c_k k` with nonzero integer coefficients.
///
/// Keys are kept in their `Ord` order, which fixes the iteration order of
/// every chain the crate prints or compares.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LinComb<K: Ord> {
    terms: BTreeMap<K, Coeff>,
}

impl<K: Ord> Default for LinComb<K> {
    fn default() -> Self {
        Self { terms: BTreeMap::new() }
    }
}

impl<K: Ord + Clone> LinComb<K> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_term(key: K, coeff: Coeff) -> Self {
        let mut out = Self::zero();
        if coeff != 0 {
            out.terms.insert(key, coeff);
        }
        out
    }

    /// Builds a combination from terms, summing repeated keys.
    pub fn from_terms<I>(terms: I) -> Result<Self, ArithmeticError>
    where
        I: IntoIterator<Item = (K, Coeff)>,
    {
        let mut out = Self::zero();
        for (k, c) in terms {
            out.add_term(k, c)?;
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, key: &K) -> Coeff {
        self.terms.get(key).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&K, Coeff)> + '_ {
        self.terms.iter().map(|(k, &c)| (k, c))
    }

    pub fn keys(&self) -> impl Iterator<Item = &K> + '_ {
        self.terms.keys()
    }

    pub fn add_term(&mut self, key: K, coeff: Coeff) -> Result<(), ArithmeticError> {
        if coeff == 0 {
            return Ok(());
        }
        match self.terms.get_mut(&key) {
            Some(c) => {
                *c = c.checked_add(coeff).ok_or(ArithmeticError::Overflow)?;
                if *c == 0 {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, coeff);
            }
        }
        Ok(())
    }

    /// `self += scale * other`.
    pub fn add_scaled(&mut self, other: &Self, scale: Coeff) -> Result<(), ArithmeticError> {
        if scale == 0 {
            return Ok(());
        }
        for (k, &c) in &other.terms {
            let c = c.checked_mul(scale).ok_or(ArithmeticError::Overflow)?;
            self.add_term(k.clone(), c)?;
        }
        Ok(())
    }

    pub fn scaled(&self, scale: Coeff) -> Result<Self, ArithmeticError> {
        let mut out = Self::zero();
        out.add_scaled(self, scale)?;
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, ArithmeticError> {
        let mut out = self.clone();
        out.add_scaled(other, -1)?;
        Ok(out)
    }

    /// Reindexes every key, summing collisions. Keys mapped to `None` are dropped.
    pub fn map_keys<L, F>(&self, mut f: F) -> Result<LinComb<L>, ArithmeticError>
    where
        L: Ord + Clone,
        F: FnMut(&K) -> Option<L>,
    {
        let mut out = LinComb::zero();
        for (k, &c) in &self.terms {
            if let Some(l) = f(k) {
                out.add_term(l, c)?;
            }
        }
        Ok(out)
    }

    /// Keys whose coefficient is odd.
    pub fn mod2_support(&self) -> impl Iterator<Item = &K> + '_ {
        self.terms.iter().filter(|(_, &c)| c % 2 != 0).map(|(k, _)| k)
    }

    pub fn into_terms(self) -> impl Iterator<Item = (K, Coeff)> {
        self.terms.into_iter()
    }
}

impl<K: Ord + fmt::Debug> fmt::Debug for LinComb<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, (k, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " ")?;
            }
            write!(f, "{c:+}·{k:?}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cancellation_removes_terms() {
        let mut a = LinComb::from_term(1u32, 3);
        a.add_term(1, -3).unwrap();
        assert!(a.is_zero());
        a.add_term(2, 0).unwrap();
        assert!(a.is_zero());
    }

    #[test]
    fn overflow_is_an_error() {
        let mut a = LinComb::from_term(0u8, Coeff::MAX);
        assert_eq!(a.add_term(0, 1), Err(ArithmeticError::Overflow));
        assert_eq!(a.scaled(2), Err(ArithmeticError::Overflow));
    }

    #[test]
    fn map_keys_merges_collisions() {
        let a = LinComb::from_terms([(1u32, 2), (2, 5), (3, 7)]).unwrap();
        let b = a.map_keys(|k| if *k == 3 { None } else { Some(0u32) }).unwrap();
        assert_eq!(b, LinComb::from_term(0, 7));
    }
}
