//! Orbifolds with boundary and relative gap certificates.
//!
//! For an orbifold `B` with boundary, `pi_1(B)` is a free product of cyclic
//! groups. Orientable, genus `k`, boundary `m + 1`, cones `o_1..o_n`:
//!
//! ```text
//! F(x1..x2k, b1..bm) * C_{o_1}(y1) * ... * C_{o_n}(yn)
//! long word  [x1,x2]...[x2k-1,x2k] b1...bm y1...yn
//! ```
//!
//! Nonorientable: free on `x1..xk, b1..bm`, long word `x1^2...xk^2 b1...bm y1...yn`.
//! The boundary chain is `[long] - sum [b_i]` in both cases.

use num_traits::{Signed, Zero};

use crate::chain::{Chain, GapCertificate, Status, VanishingReason};
use crate::error::Error;
use crate::group::{GroupSpec, Letter, Word};
use crate::qm::{CountingQm, QmCombination};
use crate::rational::{fmt_q, frac, int, Q};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OrbifoldSpec {
    orientable: bool,
    genus: usize,
    boundary: usize,
    cones: Vec<u32>,
}

impl OrbifoldSpec {
    pub fn new(orientable: bool, genus: usize, boundary: usize, cones: Vec<u32>) -> Result<Self, Error> {
        if !orientable && genus == 0 {
            return Err(Error::InvalidOrbifold("a nonorientable surface has genus at least 1".into()));
        }
        if let Some(o) = cones.iter().find(|&&o| o < 2) {
            return Err(Error::InvalidOrbifold(format!("cone order {o} is below 2")));
        }
        Ok(OrbifoldSpec { orientable, genus, boundary, cones })
    }

    pub fn orientable(&self) -> bool {
        self.orientable
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn boundary_components(&self) -> usize {
        self.boundary
    }

    pub fn cone_orders(&self) -> &[u32] {
        &self.cones
    }

    pub fn is_closed(&self) -> bool {
        self.boundary == 0
    }
}

pub fn euler_char_orbifold(spec: &OrbifoldSpec) -> Q {
    let k = spec.genus as i64;
    let b = spec.boundary as i64;
    let surface = if spec.orientable { 2 - 2 * k - b } else { 2 - k - b };
    spec.cones.iter().fold(int(surface), |acc, &o| acc - (int(1) - frac(1, o as i64)))
}

pub(crate) fn require_hyperbolic(spec: &OrbifoldSpec) -> Result<(), Error> {
    let chi = euler_char_orbifold(spec);
    if !chi.is_negative() {
        return Err(Error::NotHyperbolic(fmt_q(&chi)));
    }
    Ok(())
}

/// A free product of cyclic groups together with its boundary words.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryData {
    pub group: GroupSpec,
    pub orientable: bool,
    /// Free generators that are not boundary generators.
    pub surface_gens: Vec<usize>,
    /// Short boundary words, each a single free letter.
    pub peripheral: Vec<Word>,
    pub long_word: Word,
    pub boundary_chain: Chain,
}

impl BoundaryData {
    pub fn new(
        group: GroupSpec,
        orientable: bool,
        surface_gens: Vec<usize>,
        peripheral: Vec<Word>,
        long_word: Word,
    ) -> Self {
        let mut terms = vec![(int(1), long_word.clone())];
        terms.extend(peripheral.iter().map(|w| (int(-1), w.clone())));
        BoundaryData { group, orientable, surface_gens, peripheral, long_word, boundary_chain: Chain::new(terms) }
    }

    /// Short boundary words followed by the long word.
    pub fn boundary_words(&self) -> Vec<Word> {
        let mut v = self.peripheral.clone();
        v.push(self.long_word.clone());
        v
    }
}

fn commutator(a: Letter, b: Letter, g: &GroupSpec) -> [Letter; 4] {
    [a, b, g.inverse_letter(&a), g.inverse_letter(&b)]
}

pub fn fundamental_group(spec: &OrbifoldSpec) -> Result<BoundaryData, Error> {
    if spec.boundary == 0 {
        return Err(Error::InvalidOrbifold("orbifold has no boundary".into()));
    }
    require_hyperbolic(spec)?;
    let k = spec.genus;
    let m = spec.boundary - 1;
    let xs = if spec.orientable { 2 * k } else { k };
    let mut names: Vec<String> = (1..=xs).map(|i| format!("x{i}")).collect();
    names.extend((1..=m).map(|i| format!("b{i}")));
    names.extend((1..=spec.cones.len()).map(|i| format!("y{i}")));
    let group = GroupSpec::new(xs + m, spec.cones.clone())?.with_names(names)?;
    let mut long = Vec::new();
    if spec.orientable {
        for i in 0..k {
            long.extend(commutator(Letter::x(2 * i), Letter::x(2 * i + 1), &group));
        }
    } else {
        for i in 0..k {
            long.extend([Letter::x(i), Letter::x(i)]);
        }
    }
    long.extend((0..m).map(|i| Letter::x(xs + i)));
    long.extend((0..spec.cones.len()).map(|j| Letter::y(j, 1)));
    let long_word = group.reduce(&long)?;
    let peripheral = (0..m).map(|i| group.reduce(&[Letter::x(xs + i)])).collect::<Result<Vec<_>, _>>()?;
    Ok(BoundaryData::new(group, spec.orientable, (0..xs).collect(), peripheral, long_word))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaseTag {
    PhiOfBZero,
    Composite,
    NonorientableExceptional,
    HalfIntegerMismatch,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelGapCertificate {
    pub certificate: GapCertificate,
    pub case_tag: Option<CaseTag>,
    /// The peripheral chain `c` eliminated from `g`.
    pub peripheral_chain: Chain,
}

impl RelGapCertificate {
    fn plain(certificate: GapCertificate) -> Self {
        RelGapCertificate { certificate, case_tag: None, peripheral_chain: Chain::default() }
    }
}

pub fn relative_gap_certificate(spec: &OrbifoldSpec, g: &Word) -> Result<RelGapCertificate, Error> {
    relative_gap_on(&fundamental_group(spec)?, g)
}

fn free_letter(w: &Word) -> Option<(usize, bool)> {
    match w.letters() {
        [Letter::Free { gen, inverse }] => Some((*gen, *inverse)),
        _ => None,
    }
}

/// Coefficients `c0, c_1..c_m` with `[g] = c0 [long] + sum c_i [b_i]`, if they exist.
fn peripheral_coefficients(data: &BoundaryData, g: &Word) -> Option<(Q, Vec<Q>)> {
    let gs = data.group.exponent_sums(g);
    let ls = data.group.exponent_sums(&data.long_word);
    let mut c0: Option<Q> = None;
    for &i in &data.surface_gens {
        if ls[i] != 0 {
            let r = frac(gs[i], ls[i]);
            match &c0 {
                Some(c) if *c != r => return None,
                _ => c0 = Some(r),
            }
        }
    }
    let c0 = c0.unwrap_or_else(Q::zero);
    for &i in &data.surface_gens {
        if int(gs[i]) != &c0 * int(ls[i]) {
            return None;
        }
    }
    let mut cs = Vec::new();
    for p in &data.peripheral {
        let (gen, inverse) = free_letter(p).expect("peripheral words are single free letters");
        let eps = if inverse { -1 } else { 1 };
        cs.push((int(gs[gen]) - &c0 * int(ls[gen])) * int(eps));
    }
    Some((c0, cs))
}

fn assert_that(ok: bool, what: &str) -> Result<(), Error> {
    if ok {
        Ok(())
    } else {
        Err(Error::Assertion(what.to_string()))
    }
}

/// Relative gap for `g` in the orbifold described by `data`.
pub fn relative_gap_on(data: &BoundaryData, g: &Word) -> Result<RelGapCertificate, Error> {
    let group = &data.group;
    group.check(g)?;
    let single = Chain::single(g.clone());
    if group.has_finite_order(g) {
        return Ok(RelGapCertificate::plain(GapCertificate::zero(group, single, VanishingReason::FiniteOrder)));
    }
    if group.is_conjugate_to_inverse(g) {
        return Ok(RelGapCertificate::plain(GapCertificate::zero(group, single, VanishingReason::ConjugateToInverse)));
    }
    for b in data.boundary_words() {
        if let Some(j) = group.power_conjugate(g, &b)? {
            if j != 0 {
                let note = format!("conjugate to ({})^{j}", group.format_word(&b));
                return Ok(RelGapCertificate::plain(
                    GapCertificate::zero(group, single, VanishingReason::Peripheral).with_note(note),
                ));
            }
        }
    }

    let Some((c0, cs)) = peripheral_coefficients(data, g) else {
        return Ok(RelGapCertificate::plain(
            GapCertificate::infinite(group, single).with_note("homology class is not carried by the boundary"),
        ));
    };
    let mut pterms = vec![(c0.clone(), data.long_word.clone())];
    pterms.extend(cs.iter().cloned().zip(data.peripheral.iter().cloned()));
    let peripheral_chain = Chain::new(pterms);
    let chain = single.plus(&peripheral_chain.scaled(&int(-1)));
    let long_qm = || CountingQm::new(group, data.long_word.clone()).map_err(|e| Error::Assertion(e.to_string()));

    if group.is_in_free_factor(g) {
        let (gen, _) = match group.cyclic_reduce(g).core.base().letters().first() {
            Some(Letter::Free { gen, inverse }) => (*gen, *inverse),
            _ => return Err(Error::Assertion("free factor element of unexpected shape".into())),
        };
        assert_that(
            !data.orientable && data.surface_gens == [gen],
            "only the one-crosscap case has a surface generator power with boundary homology",
        )?;
        let ell = group.exponent_sums(g)[gen];
        let witness = QmCombination::single(long_qm()?);
        let cert = GapCertificate::bavard(group, chain, witness)?.with_note(format!("conjugate to x^{ell}"));
        assert_that(cert.bound == Some(frac(ell.abs(), 24)), "exceptional bound is |l|/24")?;
        return Ok(RelGapCertificate { certificate: cert, case_tag: Some(CaseTag::NonorientableExceptional), peripheral_chain });
    }

    let (h, q) = group.primitive_root(g)?;
    let q = q as i64;
    let h_prime = group.minimal_cyclic_conjugate(&h)?;
    let qm_h = CountingQm::new(group, h_prime).map_err(|e| Error::Assertion(e.to_string()))?;
    assert_that(qm_h.phi_bar(g) == q, "phi_bar of the root on g equals the power")?;
    for p in &data.peripheral {
        assert_that(qm_h.phi_bar(p) == 0, "root does not see short boundary words")?;
    }
    let s1 = qm_h.phi_bar(&data.long_word);
    assert_that(s1.abs() <= 1, "root occurs at most once in the long boundary word")?;

    let (witness, tag) = if s1 == 0 {
        (QmCombination::single(qm_h), CaseTag::PhiOfBZero)
    } else {
        let qm_b = long_qm()?;
        assert_that(qm_b.phi_bar(g) == 0, "long word does not occur in g")?;
        let composite = QmCombination::new(vec![(int(1), qm_h.clone()), (int(-s1), qm_b)])?;
        if data.orientable || c0 == int(s1 * q) {
            (composite, CaseTag::Composite)
        } else {
            (QmCombination::single(qm_h), CaseTag::HalfIntegerMismatch)
        }
    };
    if data.orientable {
        assert_that(witness.evaluate_on_chain(&data.boundary_chain).is_zero(), "witness vanishes on the boundary")?;
    }
    let cert = GapCertificate::bavard(group, chain, witness)?;
    assert_that(cert.bound.as_ref().is_some_and(|b| *b >= frac(1, 24)), "relative bound is at least 1/24")?;
    Ok(RelGapCertificate { certificate: cert, case_tag: Some(tag), peripheral_chain })
}

impl RelGapCertificate {
    pub fn status(&self) -> Status {
        self.certificate.status
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{format_chain, parse_orbifold, parse_word};

    fn orb(s: &str) -> OrbifoldSpec {
        parse_orbifold(s).unwrap()
    }

    #[test]
    fn euler_characteristics() {
        assert_eq!(euler_char_orbifold(&orb("orb(orientable=true, genus=0, cones=[2,3,7])")), frac(-1, 42));
        assert_eq!(euler_char_orbifold(&orb("orb(genus=0, boundary=1, cones=[2,3])")), frac(-1, 6));
        assert_eq!(euler_char_orbifold(&orb("orb(genus=1)")), int(0));
        assert_eq!(euler_char_orbifold(&orb("orb(orientable=false, genus=1, boundary=1, cones=[3])")), frac(-2, 3));
    }

    #[test]
    fn presentations() {
        let d = fundamental_group(&orb("orb(genus=0, boundary=1, cones=[2,3])")).unwrap();
        assert_eq!(d.group.to_string(), "C2(y1) * C3(y2)");
        assert_eq!(format_chain(&d.group, &d.boundary_chain), "[y1 y2]");

        let d = fundamental_group(&orb("orb(genus=1, boundary=2)")).unwrap();
        assert_eq!(d.group.to_string(), "F3(x1,x2,b1)");
        assert_eq!(format_chain(&d.group, &d.boundary_chain), "[x1 x2 x1^-1 x2^-1 b1] - [b1]");

        let d = fundamental_group(&orb("orb(orientable=false, genus=1, boundary=1, cones=[3])")).unwrap();
        assert_eq!(d.group.to_string(), "F1(x1) * C3(y1)");
        assert_eq!(format_chain(&d.group, &d.boundary_chain), "[x1 x1 y1]");

        assert!(fundamental_group(&orb("orb(genus=0, boundary=1, cones=[2,2])")).is_err());
        assert!(fundamental_group(&orb("orb(genus=2)")).is_err());
    }

    fn rel(spec: &str, w: &str) -> RelGapCertificate {
        let d = fundamental_group(&orb(spec)).unwrap();
        let g = parse_word(w, &d.group).unwrap();
        let r = relative_gap_on(&d, &g).unwrap();
        r.certificate.verify().unwrap();
        r
    }

    #[test]
    fn worked_examples() {
        let r = rel("orb(genus=0, boundary=1, cones=[2,3])", "y1 y2 y1 y2 y1 y2^2");
        assert_eq!((r.certificate.bound.clone(), r.case_tag), (Some(frac(1, 12)), Some(CaseTag::PhiOfBZero)));

        let r = rel("orb(genus=0, boundary=1, cones=[2,3,7])", "y1 y2");
        assert_eq!((r.certificate.bound.clone(), r.case_tag), (Some(frac(1, 24)), Some(CaseTag::Composite)));

        let r = rel("orb(orientable=false, genus=1, boundary=1, cones=[3])", "x1");
        assert_eq!(r.certificate.bound, Some(frac(1, 24)));
        assert_eq!(r.case_tag, Some(CaseTag::NonorientableExceptional));
        assert_eq!(r.certificate.value, Some(frac(-1, 2)));

        let r = rel("orb(genus=0, boundary=1, cones=[2,3])", "y1");
        assert_eq!(r.certificate.reason, Some(VanishingReason::FiniteOrder));

        let r = rel("orb(genus=0, boundary=1, cones=[2,3,7])", "y1 y2 y3");
        assert_eq!(r.certificate.reason, Some(VanishingReason::Peripheral));
    }

    #[test]
    fn homology_outside_boundary_is_infinite() {
        let r = rel("orb(genus=1, boundary=1)", "x1");
        assert_eq!(r.status(), Status::Infinite);
        let r = rel("orb(orientable=false, genus=2, boundary=1)", "x1 x2^-1");
        assert_eq!(r.status(), Status::Infinite);
    }

    #[test]
    fn peripheral_part_is_subtracted() {
        let r = rel("orb(genus=1, boundary=2)", "x1 x2 x1^-1 x2^-1 b1 b1");
        assert_eq!(format_chain(&r.certificate.group, &r.peripheral_chain), "2[b1]");
        assert!(r.certificate.bound.unwrap() >= frac(1, 24));
    }

    #[test]
    fn nonorientable_half_integer_case() {
        let r = rel("orb(orientable=false, genus=1, boundary=1, cones=[3,3])", "x1 y1 x1 y2");
        assert_eq!(r.status(), Status::LowerBound);
        assert!(r.certificate.bound.clone().unwrap() >= frac(1, 24));
    }
}
