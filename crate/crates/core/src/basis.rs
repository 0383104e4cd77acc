//! Bounded monomial bases used by the exhaustive checkers.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::omega::{enumerate_basis, FormWord};

/// Bounds on the enumerated bases: every exponent at most `max_exponent`,
/// and total form degree of an assembled tuple at most `max_degree`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Caps {
    pub max_exponent: u32,
    pub max_degree: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_exponent: 4,
            max_degree: 3,
        }
    }
}

impl Caps {
    pub fn new(max_exponent: u32, max_degree: usize) -> Self {
        Caps {
            max_exponent,
            max_degree,
        }
    }

    /// The same caps with the degree bound lowered by `k` (saturating).
    pub fn lower_degree(&self, k: usize) -> Caps {
        Caps::new(self.max_exponent, self.max_degree.saturating_sub(k))
    }

    pub fn words(&self) -> Vec<FormWord> {
        enumerate_basis(self.max_degree, self.max_exponent)
    }

    /// Words of degree exactly `p`.
    pub fn words_of_degree(&self, p: usize) -> Vec<FormWord> {
        enumerate_basis(p, self.max_exponent)
            .into_iter()
            .filter(|w| w.degree() == p)
            .collect()
    }

    /// Pairs of words whose degrees sum to at most `max_degree`.
    pub fn pairs(&self) -> Vec<(FormWord, FormWord)> {
        let words = self.words();
        let mut out = Vec::new();
        for u in &words {
            for v in &words {
                if u.degree() + v.degree() <= self.max_degree {
                    out.push((u.clone(), v.clone()));
                }
            }
        }
        out
    }

    pub fn exponents(&self) -> std::ops::RangeInclusive<u32> {
        0..=self.max_exponent
    }
}

impl fmt::Display for Caps {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.max_exponent, self.max_degree)
    }
}
