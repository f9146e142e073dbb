//! Counting quasimorphisms.
//!
//! `C_g(h)` counts occurrences of the letters of `g` inside the letters of `h`.
//! `phi_g = C_g - C_{g^-1}` and its homogenization is computed exactly by
//! counting occurrences in the periodic word `h_c h_c h_c ...` where `h_c` is
//! the cyclic core of `h`.

use num_traits::{Signed, Zero};

use crate::chain::Chain;
use crate::error::Error;
use crate::group::{GroupSpec, Letter, Word};
use crate::rational::{int, Q};

/// Number of start positions where `pattern` occurs in `text`.
pub fn count_occurrences(pattern: &Word, text: &Word) -> usize {
    let (p, t) = (pattern.letters(), text.letters());
    if p.is_empty() || p.len() > t.len() {
        return 0;
    }
    t.windows(p.len()).filter(|w| *w == p).count()
}

/// Occurrences of `pattern` starting at positions `0..period.len()` of the
/// infinite word `period period period ...`.
pub fn cyclic_count(pattern: &[Letter], period: &[Letter]) -> usize {
    let n = period.len();
    if n == 0 || pattern.is_empty() {
        return 0;
    }
    (0..n)
        .filter(|&i| pattern.iter().enumerate().all(|(j, l)| period[(i + j) % n] == *l))
        .count()
}

pub fn phi(group: &GroupSpec, g: &Word, h: &Word) -> i64 {
    count_occurrences(g, h) as i64 - count_occurrences(&group.invert(g), h) as i64
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountingQm {
    group: GroupSpec,
    base: Word,
    inverse: Word,
}

impl CountingQm {
    /// The base must be cyclically reduced, of length at least two and not self-overlapping.
    pub fn new(group: &GroupSpec, base: Word) -> Result<Self, Error> {
        group.check(&base).map_err(|e| Error::InvalidBase(e.to_string()))?;
        if base.len() < 2 {
            return Err(Error::InvalidBase("length must be at least 2".into()));
        }
        if !group.is_cyclically_reduced(&base) {
            return Err(Error::InvalidBase("not cyclically reduced".into()));
        }
        if base.is_self_overlapping() {
            return Err(Error::InvalidBase("self-overlapping".into()));
        }
        let inverse = group.invert(&base);
        Ok(CountingQm { group: group.clone(), base, inverse })
    }

    pub fn base(&self) -> &Word {
        &self.base
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    /// Inhomogeneous value `phi_g(h)`.
    pub fn phi(&self, h: &Word) -> i64 {
        count_occurrences(&self.base, h) as i64 - count_occurrences(&self.inverse, h) as i64
    }

    /// Homogenized value.
    pub fn phi_bar(&self, h: &Word) -> i64 {
        let core = self.group.cyclic_reduce(h).core;
        let c = core.base().letters();
        if c.len() <= 1 && !matches!(c.first(), Some(Letter::Free { .. })) {
            return 0;
        }
        self.phi_bar_cyclic(c)
    }

    /// `phi_bar` on a word already known to be cyclically reduced.
    pub fn phi_bar_cyclic(&self, core: &[Letter]) -> i64 {
        cyclic_count(self.base.letters(), core) as i64 - cyclic_count(self.inverse.letters(), core) as i64
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QmCombination {
    terms: Vec<(Q, CountingQm)>,
}

impl QmCombination {
    pub fn new(terms: Vec<(Q, CountingQm)>) -> Result<Self, Error> {
        if terms.is_empty() {
            return Err(Error::EmptyCombination);
        }
        Ok(QmCombination { terms })
    }

    pub fn single(qm: CountingQm) -> Self {
        QmCombination { terms: vec![(int(1), qm)] }
    }

    pub fn terms(&self) -> &[(Q, CountingQm)] {
        &self.terms
    }

    /// `6 * sum |c_i|`, an upper bound for the defect.
    pub fn defect_bound(&self) -> Q {
        self.terms.iter().fold(Q::zero(), |acc, (c, _)| acc + c.abs()) * int(6)
    }

    pub fn evaluate(&self, h: &Word) -> Q {
        self.terms.iter().fold(Q::zero(), |acc, (c, qm)| acc + c * int(qm.phi_bar(h)))
    }

    pub fn evaluate_on_chain(&self, chain: &Chain) -> Q {
        chain.terms().iter().fold(Q::zero(), |acc, (c, w)| acc + c * self.evaluate(w))
    }
}
