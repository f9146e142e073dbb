//! Chains, rational homology and gap certificates.
//!
//! A chain is a formal rational combination of group elements. Chains are
//! compared modulo `g^n ~ n g` and `h g h^-1 ~ g`; [`normalize_chain`] picks a
//! canonical representative for that relation.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::group::{GroupSpec, Word};
use crate::qm::{CountingQm, QmCombination};
use crate::rational::{fmt_q, int, Q};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Chain {
    terms: Vec<(Q, Word)>,
}

impl Chain {
    /// Zero coefficients are dropped; everything else is kept as given.
    pub fn new(terms: Vec<(Q, Word)>) -> Self {
        Chain { terms: terms.into_iter().filter(|(c, _)| !c.is_zero()).collect() }
    }

    pub fn single(w: Word) -> Self {
        Chain::new(vec![(int(1), w)])
    }

    pub fn terms(&self) -> &[(Q, Word)] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_integral(&self) -> bool {
        self.terms.iter().all(|(c, _)| c.is_integer())
    }

    /// Formal sum, terms concatenated.
    pub fn plus(&self, other: &Chain) -> Chain {
        let mut t = self.terms.clone();
        t.extend(other.terms.iter().cloned());
        Chain::new(t)
    }

    pub fn scaled(&self, s: &Q) -> Chain {
        Chain::new(self.terms.iter().map(|(c, w)| (c * s, w.clone())).collect())
    }
}

/// Canonical representative modulo conjugation, powers and finite-order elements.
///
/// Every surviving element is the least rotation of a primitive cyclically
/// reduced word, chosen as the smaller of the class and its inverse class.
/// Elements conjugate to their own inverse are rationally zero and dropped.
pub fn normalize_chain(group: &GroupSpec, c: &Chain) -> Chain {
    let mut acc: BTreeMap<Word, Q> = BTreeMap::new();
    for (coef, g) in c.terms() {
        let Ok((root, k)) = group.primitive_root(g) else {
            continue;
        };
        let key = group.cyclic_word(root.clone()).canonical_rotation().clone();
        let inv_key = group.cyclic_word(group.invert(&root)).canonical_rotation().clone();
        if key == inv_key {
            continue;
        }
        let (rep, sign) = if key < inv_key { (key, 1) } else { (inv_key, -1) };
        *acc.entry(rep).or_insert_with(Q::zero) += coef * int(k as i64 * sign);
    }
    let mut terms: Vec<(Q, Word)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).map(|(w, c)| (c, w)).collect();
    terms.sort_by(|a, b| a.1.shortlex_cmp(&b.1));
    Chain { terms }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyClass {
    pub free_part: Vec<Q>,
}

impl HomologyClass {
    pub fn is_zero(&self) -> bool {
        self.free_part.iter().all(|q| q.is_zero())
    }
}

pub fn homology_class(group: &GroupSpec, c: &Chain) -> HomologyClass {
    let mut v = vec![Q::zero(); group.free_rank()];
    for (coef, w) in c.terms() {
        for (i, s) in group.exponent_sums(w).into_iter().enumerate() {
            v[i] += coef * int(s);
        }
    }
    HomologyClass { free_part: v }
}

pub fn is_null_homologous(group: &GroupSpec, c: &Chain) -> bool {
    homology_class(group, c).is_zero()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    LowerBound,
    Zero,
    Infinite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VanishingReason {
    EquivalentToZeroChain,
    FiniteOrder,
    ConjugateToInverse,
    Peripheral,
}

/// Where a lower bound comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Basis {
    /// `|value| / (2 * defect_bound(witness))`.
    Bavard,
    /// Gap `1/(12N)` of a `K`-acylindrical tree action, `N = ceil((K+3)/2)`.
    Acylindrical { k: u32, n: u32 },
    /// `factor * min(bound of parts)`.
    Scaled { factor: Q, parts: Vec<GapCertificate> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GapCertificate {
    /// Group the witness lives in.
    pub group: GroupSpec,
    /// Chain the witness is evaluated on.
    pub chain: Chain,
    pub status: Status,
    pub bound: Option<Q>,
    pub basis: Option<Basis>,
    pub witness: Option<QmCombination>,
    pub value: Option<Q>,
    pub reason: Option<VanishingReason>,
    pub notes: Vec<String>,
}

/// `N = ceil((K+3)/2)`.
pub fn cfl_n(k: u32) -> u32 {
    (k + 3).div_ceil(2)
}

/// `1/(12N)`.
pub fn cfl_gap(k: u32) -> Q {
    Q::new(1.into(), (12 * cfl_n(k)).into())
}

impl GapCertificate {
    fn bare(group: &GroupSpec, chain: Chain, status: Status) -> Self {
        GapCertificate {
            group: group.clone(),
            chain,
            status,
            bound: None,
            basis: None,
            witness: None,
            value: None,
            reason: None,
            notes: Vec::new(),
        }
    }

    pub fn zero(group: &GroupSpec, chain: Chain, reason: VanishingReason) -> Self {
        let mut c = Self::bare(group, chain, Status::Zero);
        c.reason = Some(reason);
        c
    }

    pub fn infinite(group: &GroupSpec, chain: Chain) -> Self {
        Self::bare(group, chain, Status::Infinite)
    }

    /// Lower bound from a witness by Bavard's inequality.
    pub fn bavard(group: &GroupSpec, chain: Chain, witness: QmCombination) -> Result<Self, Error> {
        let value = witness.evaluate_on_chain(&chain);
        if value.is_zero() {
            return Err(Error::Assertion("witness vanishes on the chain".into()));
        }
        let bound = value.abs() / (int(2) * witness.defect_bound());
        let mut c = Self::bare(group, chain, Status::LowerBound);
        c.bound = Some(bound);
        c.basis = Some(Basis::Bavard);
        c.witness = Some(witness);
        c.value = Some(value);
        Ok(c)
    }

    pub fn acylindrical(group: &GroupSpec, chain: Chain, k: u32) -> Self {
        let mut c = Self::bare(group, chain, Status::LowerBound);
        c.bound = Some(cfl_gap(k));
        c.basis = Some(Basis::Acylindrical { k, n: cfl_n(k) });
        c
    }

    /// `factor * min(parts)`; zero if any part is zero.
    pub fn scaled(group: &GroupSpec, chain: Chain, factor: Q, parts: Vec<GapCertificate>) -> Result<Self, Error> {
        if parts.is_empty() || !factor.is_positive() {
            return Err(Error::Assertion("scaled certificate needs parts and a positive factor".into()));
        }
        if parts.iter().any(|p| p.status == Status::Zero) {
            let mut c = Self::zero(group, chain, VanishingReason::ConjugateToInverse);
            if let Some(p) = parts.iter().find(|p| p.status == Status::Zero) {
                c.reason = p.reason;
            }
            c.basis = Some(Basis::Scaled { factor, parts });
            return Ok(c);
        }
        if parts.iter().any(|p| p.status != Status::LowerBound) {
            return Err(Error::Assertion("scaled certificate with an infinite part".into()));
        }
        let min = parts.iter().filter_map(|p| p.bound.clone()).min().expect("non-empty");
        let mut c = Self::bare(group, chain, Status::LowerBound);
        c.bound = Some(&factor * min);
        c.basis = Some(Basis::Scaled { factor, parts });
        Ok(c)
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    /// Rechecks every stored number from the stored data.
    pub fn verify(&self) -> Result<(), Error> {
        let fail = |m: &str| Err(Error::Assertion(m.to_string()));
        match self.status {
            Status::LowerBound => {
                let Some(bound) = &self.bound else { return fail("missing bound") };
                if !bound.is_positive() {
                    return fail("bound is not positive");
                }
                match &self.basis {
                    Some(Basis::Bavard) => {
                        let (Some(w), Some(v)) = (&self.witness, &self.value) else {
                            return fail("missing witness");
                        };
                        let value = w.evaluate_on_chain(&self.chain);
                        if &value != v {
                            return fail("stored value does not match the witness");
                        }
                        if *bound != value.abs() / (int(2) * w.defect_bound()) {
                            return fail("bound does not match |value| / 2D");
                        }
                    }
                    Some(Basis::Acylindrical { k, n }) => {
                        if *n != cfl_n(*k) || *bound != cfl_gap(*k) {
                            return fail("acylindrical gap arithmetic");
                        }
                    }
                    Some(Basis::Scaled { factor, parts }) => {
                        for p in parts {
                            p.verify()?;
                        }
                        let min = parts.iter().filter_map(|p| p.bound.clone()).min();
                        if parts.iter().any(|p| p.status != Status::LowerBound) || min.map(|m| factor * m).as_ref() != Some(bound) {
                            return fail("scaled bound arithmetic");
                        }
                    }
                    None => return fail("missing basis"),
                }
                Ok(())
            }
            Status::Zero => {
                if self.reason.is_none() || self.bound.is_some() {
                    return fail("zero certificate needs a reason and no bound");
                }
                if let Some(Basis::Scaled { parts, .. }) = &self.basis {
                    for p in parts {
                        p.verify()?;
                    }
                }
                Ok(())
            }
            Status::Infinite => Ok(()),
        }
    }

    pub fn summary(&self) -> String {
        match self.status {
            Status::LowerBound => format!("scl >= {}", fmt_q(self.bound.as_ref().expect("bound"))),
            Status::Zero => format!("scl = 0 ({:?})", self.reason.expect("reason")),
            Status::Infinite => "scl = infinity".into(),
        }
    }
}

/// Lower bound `|c_1|/12` for a chain, or a reason it vanishes or is infinite.
pub fn chain_gap_certificate(group: &GroupSpec, c: &Chain) -> Result<GapCertificate, Error> {
    let n = normalize_chain(group, c);
    if n.is_empty() {
        return Ok(GapCertificate::zero(group, n, VanishingReason::EquivalentToZeroChain));
    }
    if !is_null_homologous(group, &n) {
        return Ok(GapCertificate::infinite(group, n).with_note("chain is not null-homologous"));
    }
    let (i1, (_, g1)) = n
        .terms()
        .iter()
        .enumerate()
        .max_by(|(_, a), (_, b)| a.1.len().cmp(&b.1.len()).then_with(|| b.1.cmp(&a.1)))
        .expect("non-empty");
    let g_prime = group.minimal_cyclic_conjugate(g1)?;
    let qm = CountingQm::new(group, g_prime).map_err(|e| Error::Assertion(e.to_string()))?;
    for (i, (_, g)) in n.terms().iter().enumerate() {
        let v = qm.phi_bar(g);
        let expected = i64::from(i == i1);
        if v != expected {
            return Err(Error::Assertion(format!("witness takes value {v} on term {i}, expected {expected}")));
        }
    }
    let integral = c.is_integral();
    let cert = GapCertificate::bavard(group, n, QmCombination::single(qm))?;
    if integral && cert.bound.as_ref().is_some_and(|b| *b < Q::new(One::one(), 12.into())) {
        return Err(Error::Assertion("integral chain received a bound below 1/12".into()));
    }
    Ok(cert)
}

/// Gap certificate for a single element.
pub fn element_gap(group: &GroupSpec, g: &Word) -> Result<GapCertificate, Error> {
    let chain = Chain::single(g.clone());
    if group.has_finite_order(g) {
        return Ok(GapCertificate::zero(group, chain, VanishingReason::FiniteOrder));
    }
    if group.is_in_free_factor(g) {
        return Ok(GapCertificate::infinite(group, chain).with_note("power of a free generator"));
    }
    if group.is_conjugate_to_inverse(g) {
        return Ok(GapCertificate::zero(group, chain, VanishingReason::ConjugateToInverse));
    }
    chain_gap_certificate(group, &chain)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;
    use crate::text::{format_chain, parse_chain, parse_group, parse_word};

    fn norm(g: &str, c: &str) -> String {
        let g = parse_group(g).unwrap();
        format_chain(&g, &normalize_chain(&g, &parse_chain(c, &g).unwrap()))
    }

    #[test]
    fn normalization_examples() {
        assert_eq!(norm("F2", "[x y x^-1] - [y]"), "0");
        assert_eq!(norm("F2", "[x y x y]"), "2[x1 x2]");
        assert_eq!(norm("F2", "[x y] + [y^-1 x^-1]"), "0");
        assert_eq!(norm("C2 * C3", "[b^2]"), "0");
        assert_eq!(norm("F2", "[x^-3]"), "-3[x1]");
        assert_eq!(norm("C2 * C3", "[a b a b^2]"), "0");
        assert_eq!(norm("C2 * C3", "[b a] - 2[b^2 a]"), "3[y1 y2]");
    }

    #[test]
    fn homology() {
        let g = parse_group("F2").unwrap();
        let h = homology_class(&g, &parse_chain("[x y]", &g).unwrap());
        assert_eq!(h.free_part, vec![int(1), int(1)]);
        assert!(is_null_homologous(&g, &parse_chain("[x y x^-1 y^-1]", &g).unwrap()));
        let t = parse_group("C2 * C3").unwrap();
        let h = homology_class(&t, &parse_chain("[a b]", &t).unwrap());
        assert!(h.free_part.is_empty() && h.is_zero());
    }

    fn gap(g: &str, c: &str) -> GapCertificate {
        let g = parse_group(g).unwrap();
        let cert = chain_gap_certificate(&g, &parse_chain(c, &g).unwrap()).unwrap();
        cert.verify().unwrap();
        cert
    }

    #[test]
    fn chain_gaps() {
        let c = gap("C2 * C3", "[a b]");
        assert_eq!(c.status, Status::LowerBound);
        assert_eq!(c.bound, Some(frac(1, 12)));
        assert_eq!(gap("F2", "[x y x^-1 y^-1]").bound, Some(frac(1, 12)));
        let z = gap("F2", "[x y] + [y^-1 x^-1]");
        assert_eq!((z.status, z.reason), (Status::Zero, Some(VanishingReason::EquivalentToZeroChain)));
        assert_eq!(gap("F2", "[x]").status, Status::Infinite);
        assert_eq!(gap("C2 * C3", "1/2[a b]").bound, Some(frac(1, 24)));
        assert_eq!(gap("C2 * C3", "3[a b] - [a b^2]").bound, Some(frac(1, 3)));
    }

    fn egap(g: &str, w: &str) -> GapCertificate {
        let g = parse_group(g).unwrap();
        let cert = element_gap(&g, &parse_word(w, &g).unwrap()).unwrap();
        cert.verify().unwrap();
        cert
    }

    #[test]
    fn element_gaps() {
        assert_eq!(egap("C2 * C3", "a b").bound, Some(frac(1, 12)));
        assert_eq!(egap("C2 * C3", "b").reason, Some(VanishingReason::FiniteOrder));
        assert_eq!(egap("F2", "x y x y^-1").status, Status::Infinite);
        assert_eq!(egap("F2", "x y x^-1 y^-1").bound, Some(frac(1, 12)));
        assert_eq!(egap("F2", "x x x").status, Status::Infinite);
        assert_eq!(egap("C2 * C3", "a b a b^2").reason, Some(VanishingReason::ConjugateToInverse));
        assert_eq!(egap("C2 * C3", "(a b)^4").bound, Some(frac(4, 12)));
    }

    #[test]
    fn tampered_certificate_fails() {
        let mut c = gap("C2 * C3", "[a b]");
        c.bound = Some(frac(1, 6));
        assert!(c.verify().is_err());
    }

    #[test]
    fn cfl_arithmetic() {
        assert_eq!((cfl_n(1), cfl_n(2), cfl_n(3), cfl_n(4)), (2, 3, 3, 4));
        assert_eq!(cfl_gap(1), frac(1, 24));
        assert_eq!(cfl_gap(2), frac(1, 36));
        assert_eq!(cfl_gap(3), frac(1, 36));
        assert_eq!(cfl_gap(4), frac(1, 48));
    }
}
