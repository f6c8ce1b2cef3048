//! b-functions kept in factored form: a finite multiset of rational roots
//! with positive multiplicities, representing b(s) = prod (s + gamma)^m.
//!
//! Roots are never expanded into coefficients. The operations are the
//! slope rescaling gamma -> a * gamma, the integer grading shift, and the
//! Thom-Sebastiani combination whose multiplicity at gamma is the largest
//! m_alpha + m_beta - 1 over decompositions gamma = alpha + beta with both
//! factors present.

use crate::rat::{format_rat, rat_uint, Rat};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BFunctionError {
    EmptyInput,
    ZeroMultiplicity,
    ZeroRescale,
}

impl fmt::Display for BFunctionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BFunctionError::EmptyInput => write!(f, "root multiset is empty"),
            BFunctionError::ZeroMultiplicity => write!(f, "multiplicities must be positive"),
            BFunctionError::ZeroRescale => write!(f, "rescaling factor must be positive"),
        }
    }
}

impl std::error::Error for BFunctionError {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RootMultiset {
    roots: BTreeMap<Rat, u64>,
}

impl RootMultiset {
    pub fn new(roots: BTreeMap<Rat, u64>) -> Result<RootMultiset, BFunctionError> {
        if roots.values().any(|&m| m == 0) {
            return Err(BFunctionError::ZeroMultiplicity);
        }
        Ok(RootMultiset { roots })
    }

    pub fn from_pairs(
        pairs: impl IntoIterator<Item = (Rat, u64)>,
    ) -> Result<RootMultiset, BFunctionError> {
        let mut roots = BTreeMap::new();
        for (root, mult) in pairs {
            if mult == 0 {
                return Err(BFunctionError::ZeroMultiplicity);
            }
            *roots.entry(root).or_insert(0) += mult;
        }
        Ok(RootMultiset { roots })
    }

    pub fn from_roots(roots: impl IntoIterator<Item = Rat>) -> RootMultiset {
        let mut map = BTreeMap::new();
        for root in roots {
            *map.entry(root).or_insert(0) += 1;
        }
        RootMultiset { roots: map }
    }

    pub fn roots(&self) -> &BTreeMap<Rat, u64> {
        &self.roots
    }

    pub fn multiplicity(&self, root: &Rat) -> u64 {
        self.roots.get(root).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Degree of the expanded polynomial: the multiplicity total.
    pub fn degree(&self) -> u64 {
        self.roots.values().sum()
    }

    pub fn min_root(&self) -> Result<&Rat, BFunctionError> {
        self.roots.keys().next().ok_or(BFunctionError::EmptyInput)
    }

    /// Root rescaling gamma -> a * gamma for a single-slope change of
    /// weight; multiplicities and degree are preserved.
    pub fn rescale(&self, a: u64) -> Result<RootMultiset, BFunctionError> {
        if a == 0 {
            return Err(BFunctionError::ZeroRescale);
        }
        let factor = rat_uint(a);
        Ok(RootMultiset {
            roots: self.roots.iter().map(|(g, &m)| (g * &factor, m)).collect(),
        })
    }

    /// Grading shift: the level-j piece is killed by b(w + j), so roots
    /// move by gamma -> gamma - j.
    pub fn shift(&self, j: i64) -> RootMultiset {
        let offset = Rat::from_integer(j.into());
        RootMultiset {
            roots: self.roots.iter().map(|(g, &m)| (g - &offset, m)).collect(),
        }
    }

    pub fn thom_sebastiani(
        &self,
        other: &RootMultiset,
    ) -> Result<RootMultiset, BFunctionError> {
        if self.is_empty() || other.is_empty() {
            return Err(BFunctionError::EmptyInput);
        }
        let mut roots: BTreeMap<Rat, u64> = BTreeMap::new();
        for (alpha, &ma) in &self.roots {
            for (beta, &mb) in &other.roots {
                let gamma = alpha + beta;
                let mult = ma + mb - 1;
                let entry = roots.entry(gamma).or_insert(0);
                *entry = (*entry).max(mult);
            }
        }
        Ok(RootMultiset { roots })
    }
}

impl fmt::Display for RootMultiset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.roots.is_empty() {
            return write!(f, "1");
        }
        for (root, &mult) in &self.roots {
            write!(f, "(s + {})", format_rat(root))?;
            if mult > 1 {
                write!(f, "^{mult}")?;
            }
        }
        Ok(())
    }
}
