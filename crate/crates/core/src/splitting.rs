//! Splittings of closed orbifold groups over `Z`.
//!
//! Words are written over the closed presentation generators `x1.. y1..`
//! (the ambient free product, before the surface relation is imposed).
//!
//! * Orientable, genus `k >= 1`: HNN extension of `H = <x2..x2k, y1..yn>` with
//!   stable letter `x1`, `x1 w1 x1^-1 = w2`, `w1 = x2^-1`,
//!   `w2 = x2^-1 [x3,x4]...[x2k-1,x2k] y1...yn`.
//! * Sphere with `n >= 4` cones: `<y1,y2> *_Z <y3..yn>`, `z = (y1 y2)^-1 = y3...yn`.
//! * Nonorientable: `<x1> *_Z <x2..xk, y1..yn>`, `z = x1^-2 = x2^2...xk^2 y1...yn`.
//!
//! Normal forms use right coset representatives of the cyclic edge subgroup:
//! the representative of `<w> a` is the shortest element `w^j a`, ties broken
//! by letter order. Lengths of `w^j a` grow linearly in `|j|`, so scanning
//! `|j| <= 2|a|/|w| + 1` finds every shortest element.

use std::collections::VecDeque;


use crate::chain::{cfl_gap, cfl_n, element_gap, Chain, GapCertificate, Status, VanishingReason};
use crate::error::Error;
use crate::group::{GroupSpec, Letter, Word};
use crate::orbifold::{relative_gap_on, require_hyperbolic, BoundaryData, OrbifoldSpec};
use crate::rational::{frac, int, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    fn idx(self) -> usize {
        self as usize
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SplittingCase {
    OrientableHnn,
    SphereAmalgam,
    NonorientableAmalgam,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SplittingKind {
    Hnn { vertex: GroupSpec, edge_images: (Word, Word), stable_letter: String },
    Amalgam { left: GroupSpec, right: GroupSpec, edge_images: (Word, Word) },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Slot {
    Stable,
    Vertex(Side, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplittingSpec {
    pub orbifold: OrbifoldSpec,
    /// Free product on the presentation generators.
    pub ambient: GroupSpec,
    pub kind: SplittingKind,
    pub case: SplittingCase,
    free_slots: Vec<Slot>,
    torsion_slots: Vec<Slot>,
    /// Per side: vertex free index -> ambient free index, vertex torsion index -> ambient torsion index.
    back: [(Vec<usize>, Vec<usize>); 2],
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NormalForm {
    /// `z^edge_power r_1 ... r_s` with alternating sides.
    Amalgam { edge_power: i64, syllables: Vec<(Side, Word)> },
    /// `head t^{e_1} r_1 ... t^{e_s} r_s`.
    Hnn { head: Word, tail: Vec<(i8, Word)> },
}

impl NormalForm {
    pub fn syllable_length(&self) -> usize {
        match self {
            NormalForm::Amalgam { syllables, .. } => syllables.len(),
            NormalForm::Hnn { tail, .. } => tail.len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Classification {
    /// `g = conjugator * element * conjugator^-1`, `element` a word of the vertex group.
    Elliptic { vertex: Side, element: Word, conjugator: Word },
    /// `g = conjugator * cyclic_form * conjugator^-1`, with `length` syllables
    /// (amalgam) or stable letters (HNN) in the cyclically reduced form.
    Hyperbolic { length: usize, cyclic_form: Word, conjugator: Word },
}

impl Classification {
    pub fn is_elliptic(&self) -> bool {
        matches!(self, Classification::Elliptic { .. })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InverseSearch {
    /// `y g y^-1 = g^-1`.
    Found(Word),
    NotFound { edge_power_bound: i64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AcylindricityReport {
    pub k: u32,
    pub n: u32,
    pub gap: Q,
    pub checks: Vec<String>,
}

/// Largest edge power tried by the conjugate-to-inverse search.
pub const DEFAULT_INVERSE_SEARCH_BOUND: i64 = 8;

/// `(j, rep)` with `a = w^j rep` and `rep` the canonical representative of `<w> a`.
pub fn coset_representative(group: &GroupSpec, w: &Word, a: &Word) -> (i64, Word) {
    let k = (2 * a.len() / w.len().max(1) + 1) as i64;
    let w_inv = group.invert(w);
    let mut best = (0i64, a.clone());
    let consider = |j: i64, cand: &Word, best: &mut (i64, Word)| {
        if cand.shortlex_cmp(&best.1) == std::cmp::Ordering::Less {
            *best = (j, cand.clone());
        }
    };
    let mut cur = a.clone();
    for j in 1..=k {
        cur = group.mul(&w_inv, &cur);
        consider(j, &cur, &mut best);
    }
    let mut cur = a.clone();
    for j in 1..=k {
        cur = group.mul(w, &cur);
        consider(-j, &cur, &mut best);
    }
    best
}

fn ambient_names(free: usize, torsion: usize) -> Vec<String> {
    let mut v: Vec<String> = (1..=free).map(|i| format!("x{i}")).collect();
    v.extend((1..=torsion).map(|i| format!("y{i}")));
    v
}

/// Free product on the generators of the closed presentation.
pub fn closed_presentation_group(spec: &OrbifoldSpec) -> Result<GroupSpec, Error> {
    let free = if spec.orientable() { 2 * spec.genus() } else { spec.genus() };
    GroupSpec::new(free, spec.cone_orders().to_vec())?.with_names(ambient_names(free, spec.cone_orders().len()))
}

pub fn closed_splitting(spec: &OrbifoldSpec) -> Result<SplittingSpec, Error> {
    if !spec.is_closed() {
        return Err(Error::InvalidOrbifold("orbifold has boundary; use the relative gap".into()));
    }
    require_hyperbolic(spec)?;
    let ambient = closed_presentation_group(spec)?;
    let cones = spec.cone_orders();
    let n = cones.len();
    let k = spec.genus();
    let sub = |free: &[usize], torsion: &[usize]| -> Result<GroupSpec, Error> {
        let mut names: Vec<String> = free.iter().map(|i| format!("x{}", i + 1)).collect();
        names.extend(torsion.iter().map(|j| format!("y{}", j + 1)));
        GroupSpec::new(free.len(), torsion.iter().map(|&j| cones[j]).collect())?.with_names(names)
    };
    let all_y: Vec<usize> = (0..n).collect();
    let ys = |g: &GroupSpec, from: usize, count: usize| -> Vec<Letter> {
        let _ = g;
        (from..from + count).map(|j| Letter::y(j, 1)).collect()
    };

    let mut free_slots = vec![Slot::Stable; ambient.free_rank()];
    let mut torsion_slots = vec![Slot::Vertex(Side::Left, 0); n];
    let mut back: [(Vec<usize>, Vec<usize>); 2] = Default::default();

    let (kind, case) = if spec.orientable() && k >= 1 {
        let xs: Vec<usize> = (1..2 * k).collect();
        let h = sub(&xs, &all_y)?;
        for (vi, &ai) in xs.iter().enumerate() {
            free_slots[ai] = Slot::Vertex(Side::Left, vi);
        }
        for j in 0..n {
            torsion_slots[j] = Slot::Vertex(Side::Left, j);
        }
        back[0] = (xs.clone(), all_y.clone());
        let w1 = h.reduce(&[Letter::x_inv(0)])?;
        let mut l = vec![Letter::x_inv(0)];
        for i in 1..k {
            let (a, b) = (Letter::x(2 * i - 1), Letter::x(2 * i));
            l.extend([a, b, h.inverse_letter(&a), h.inverse_letter(&b)]);
        }
        l.extend(ys(&h, 0, n));
        let w2 = h.reduce(&l)?;
        (
            SplittingKind::Hnn { vertex: h, edge_images: (w1, w2), stable_letter: "x1".into() },
            SplittingCase::OrientableHnn,
        )
    } else if spec.orientable() {
        if n == 3 {
            return Err(Error::Unsupported(
                "sphere with three cone points has no splitting; use the von Dyck numerics".into(),
            ));
        }
        let a = sub(&[], &[0, 1])?;
        let b = sub(&[], &(2..n).collect::<Vec<_>>())?;
        for j in 0..n {
            torsion_slots[j] = if j < 2 { Slot::Vertex(Side::Left, j) } else { Slot::Vertex(Side::Right, j - 2) };
        }
        back[0] = (vec![], vec![0, 1]);
        back[1] = (vec![], (2..n).collect());
        let wa = a.invert(&a.reduce(&[Letter::y(0, 1), Letter::y(1, 1)])?);
        let wb = b.reduce(&ys(&b, 0, n - 2))?;
        (SplittingKind::Amalgam { left: a, right: b, edge_images: (wa, wb) }, SplittingCase::SphereAmalgam)
    } else {
        let a = sub(&[0], &[])?;
        let xs: Vec<usize> = (1..k).collect();
        let b = sub(&xs, &all_y)?;
        free_slots[0] = Slot::Vertex(Side::Left, 0);
        for (vi, &ai) in xs.iter().enumerate() {
            free_slots[ai] = Slot::Vertex(Side::Right, vi);
        }
        for j in 0..n {
            torsion_slots[j] = Slot::Vertex(Side::Right, j);
        }
        back[0] = (vec![0], vec![]);
        back[1] = (xs.clone(), all_y.clone());
        let wa = a.reduce(&[Letter::x_inv(0), Letter::x_inv(0)])?;
        let mut l = Vec::new();
        for vi in 0..xs.len() {
            l.extend([Letter::x(vi), Letter::x(vi)]);
        }
        l.extend(ys(&b, 0, n));
        let wb = b.reduce(&l)?;
        (SplittingKind::Amalgam { left: a, right: b, edge_images: (wa, wb) }, SplittingCase::NonorientableAmalgam)
    };
    Ok(SplittingSpec { orbifold: spec.clone(), ambient, kind, case, free_slots, torsion_slots, back })
}

impl SplittingSpec {
    pub fn vertex_group(&self, side: Side) -> &GroupSpec {
        match (&self.kind, side) {
            (SplittingKind::Hnn { vertex, .. }, _) => vertex,
            (SplittingKind::Amalgam { left, .. }, Side::Left) => left,
            (SplittingKind::Amalgam { right, .. }, Side::Right) => right,
        }
    }

    /// Amalgam: image of `z` in the given side. HNN: `w1` for `Left`, `w2` for `Right`.
    pub fn edge_image(&self, side: Side) -> &Word {
        let (a, b) = match &self.kind {
            SplittingKind::Hnn { edge_images, .. } => (&edge_images.0, &edge_images.1),
            SplittingKind::Amalgam { edge_images, .. } => (&edge_images.0, &edge_images.1),
        };
        match side {
            Side::Left => a,
            Side::Right => b,
        }
    }

    pub fn is_hnn(&self) -> bool {
        matches!(self.kind, SplittingKind::Hnn { .. })
    }

    fn slot(&self, l: &Letter) -> Slot {
        match *l {
            Letter::Free { gen, .. } => self.free_slots[gen],
            Letter::Torsion { gen, .. } => self.torsion_slots[gen],
        }
    }

    fn to_vertex_letter(&self, l: &Letter, vi: usize) -> Letter {
        match *l {
            Letter::Free { inverse, .. } => Letter::Free { gen: vi, inverse },
            Letter::Torsion { exp, .. } => Letter::Torsion { gen: vi, exp },
        }
    }

    /// Vertex word written over the ambient generators.
    pub fn to_ambient(&self, side: Side, w: &Word) -> Word {
        let side = if self.is_hnn() { Side::Left } else { side };
        let (fb, tb) = &self.back[side.idx()];
        let letters: Vec<Letter> = w
            .letters()
            .iter()
            .map(|l| match *l {
                Letter::Free { gen, inverse } => Letter::Free { gen: fb[gen], inverse },
                Letter::Torsion { gen, exp } => Letter::Torsion { gen: tb[gen], exp },
            })
            .collect();
        self.ambient.reduce_unchecked(&letters)
    }

    fn stable(&self, e: i8) -> Word {
        self.ambient.reduce_unchecked(&[if e > 0 { Letter::x(0) } else { Letter::x_inv(0) }])
    }

    /// Runs of ambient letters, right to left: `(Some(side), vertex word)` or `(None, t^{+-1})`.
    fn pieces_right_to_left(&self, g: &Word) -> Vec<(Option<Side>, Word, i8)> {
        let ls = g.letters();
        let mut out = Vec::new();
        let mut i = ls.len();
        while i > 0 {
            match self.slot(&ls[i - 1]) {
                Slot::Stable => {
                    let e = if matches!(ls[i - 1], Letter::Free { inverse: true, .. }) { -1 } else { 1 };
                    out.push((None, Word::empty(), e));
                    i -= 1;
                }
                Slot::Vertex(side, _) => {
                    let mut j = i - 1;
                    while j > 0 && matches!(self.slot(&ls[j - 1]), Slot::Vertex(s, _) if s == side) {
                        j -= 1;
                    }
                    let letters: Vec<Letter> = ls[j..i]
                        .iter()
                        .map(|l| match self.slot(l) {
                            Slot::Vertex(_, vi) => self.to_vertex_letter(l, vi),
                            Slot::Stable => unreachable!(),
                        })
                        .collect();
                    out.push((Some(side), self.vertex_group(side).reduce_unchecked(&letters), 0));
                    i = j;
                }
            }
        }
        out
    }

    pub fn normal_form(&self, g: &Word) -> NormalForm {
        match &self.kind {
            SplittingKind::Amalgam { .. } => {
                let mut c = 0i64;
                let mut syl: VecDeque<(Side, Word)> = VecDeque::new();
                for (side, s, _) in self.pieces_right_to_left(g) {
                    let side = side.expect("amalgams have no stable letter");
                    let vg = self.vertex_group(side);
                    let wx = self.edge_image(side);
                    let mut combined = vg.mul(&s, &vg.power(wx, c));
                    let merge = matches!(syl.front(), Some((f, _)) if *f == side);
                    if merge {
                        let (_, r1) = syl.pop_front().expect("front");
                        combined = vg.mul(&combined, &r1);
                    }
                    let (j, rep) = coset_representative(vg, wx, &combined);
                    if !rep.is_empty() {
                        syl.push_front((side, rep));
                    }
                    c = j;
                }
                NormalForm::Amalgam { edge_power: c, syllables: syl.into_iter().collect() }
            }
            SplittingKind::Hnn { vertex: h, edge_images: (w1, w2), .. } => {
                let mut head = Word::empty();
                let mut tail: VecDeque<(i8, Word)> = VecDeque::new();
                for (side, s, e) in self.pieces_right_to_left(g) {
                    if side.is_some() {
                        head = h.mul(&s, &head);
                        continue;
                    }
                    let (from, to) = if e > 0 { (w1, w2) } else { (w2, w1) };
                    let (j, rep) = coset_representative(h, from, &head);
                    let pinch = rep.is_empty() && matches!(tail.front(), Some((f, _)) if *f == -e);
                    if pinch {
                        let (_, r1) = tail.pop_front().expect("front");
                        head = h.mul(&h.power(to, j), &r1);
                    } else {
                        tail.push_front((e, rep));
                        head = h.power(to, j);
                    }
                }
                NormalForm::Hnn { head, tail: tail.into_iter().collect() }
            }
        }
    }

    pub fn normal_form_word(&self, nf: &NormalForm) -> Word {
        match nf {
            NormalForm::Amalgam { edge_power, syllables } => {
                let z = self.vertex_group(Side::Left).power(self.edge_image(Side::Left), *edge_power);
                let mut w = self.to_ambient(Side::Left, &z);
                for (side, r) in syllables {
                    w = self.ambient.mul(&w, &self.to_ambient(*side, r));
                }
                w
            }
            NormalForm::Hnn { head, tail } => {
                let mut w = self.to_ambient(Side::Left, head);
                for (e, r) in tail {
                    w = self.ambient.mul(&w, &self.stable(*e));
                    w = self.ambient.mul(&w, &self.to_ambient(Side::Left, r));
                }
                w
            }
        }
    }

    /// Equality in the closed group.
    pub fn equal_in_group(&self, a: &Word, b: &Word) -> bool {
        self.normal_form(a) == self.normal_form(b)
    }

    pub fn classify_element(&self, g: &Word) -> Result<Classification, Error> {
        self.ambient.check(g)?;
        let mut u = Word::empty();
        let mut cur = g.clone();
        loop {
            let nf = self.normal_form(&cur);
            let step = match &nf {
                NormalForm::Amalgam { edge_power, syllables } => match syllables.len() {
                    0 => {
                        let vg = self.vertex_group(Side::Left);
                        let element = vg.power(self.edge_image(Side::Left), *edge_power);
                        return Ok(Classification::Elliptic { vertex: Side::Left, element, conjugator: u });
                    }
                    1 => {
                        let (side, r) = &syllables[0];
                        let vg = self.vertex_group(*side);
                        let element = vg.mul(&vg.power(self.edge_image(*side), *edge_power), r);
                        return Ok(Classification::Elliptic { vertex: *side, element, conjugator: u });
                    }
                    s if s % 2 == 0 => None,
                    s => {
                        let (side, r) = &syllables[s - 1];
                        Some(self.to_ambient(*side, r))
                    }
                },
                NormalForm::Hnn { head, tail } => {
                    if tail.is_empty() {
                        return Ok(Classification::Elliptic { vertex: Side::Left, element: head.clone(), conjugator: u });
                    }
                    let SplittingKind::Hnn { vertex: h, edge_images: (w1, w2), .. } = &self.kind else {
                        unreachable!()
                    };
                    let (e1, _) = &tail[0];
                    let (es, rs) = &tail[tail.len() - 1];
                    let x = h.mul(rs, head);
                    let pinch = (*es == 1 && *e1 == -1 && coset_representative(h, w1, &x).1.is_empty())
                        || (*es == -1 && *e1 == 1 && coset_representative(h, w2, &x).1.is_empty());
                    if pinch {
                        Some(self.ambient.mul(&self.stable(*es), &self.to_ambient(Side::Left, rs)))
                    } else {
                        None
                    }
                }
            };
            match step {
                None => {
                    let length = nf.syllable_length();
                    let cyclic_form = self.normal_form_word(&nf);
                    return Ok(Classification::Hyperbolic { length, cyclic_form, conjugator: u });
                }
                Some(v) => {
                    let nfw = self.normal_form_word(&nf);
                    cur = self.ambient.conjugate(&v, &nfw);
                    u = self.ambient.mul(&u, &self.ambient.invert(&v));
                }
            }
        }
    }

    /// Prefixes at which the cyclic form may be rotated.
    fn rotation_prefixes(&self, nf: &NormalForm) -> Vec<Word> {
        let mut out = Vec::new();
        match nf {
            NormalForm::Amalgam { edge_power, syllables } => {
                let z = self.vertex_group(Side::Left).power(self.edge_image(Side::Left), *edge_power);
                let mut p = self.to_ambient(Side::Left, &z);
                out.push(Word::empty());
                for (side, r) in syllables.iter().take(syllables.len().saturating_sub(1)) {
                    p = self.ambient.mul(&p, &self.to_ambient(*side, r));
                    out.push(p.clone());
                }
            }
            NormalForm::Hnn { head, tail } => {
                let mut p = self.to_ambient(Side::Left, head);
                out.push(p.clone());
                for (e, r) in tail.iter().take(tail.len().saturating_sub(1)) {
                    p = self.ambient.mul(&p, &self.stable(*e));
                    p = self.ambient.mul(&p, &self.to_ambient(Side::Left, r));
                    out.push(p.clone());
                }
            }
        }
        out
    }

    fn edge_elements(&self, bound: i64) -> Vec<Word> {
        let mut out = Vec::new();
        let sides: &[Side] = if self.is_hnn() { &[Side::Left, Side::Right] } else { &[Side::Left] };
        for &side in sides {
            let vg = self.vertex_group(side);
            for j in -bound..=bound {
                let w = self.to_ambient(side, &vg.power(self.edge_image(side), j));
                if !out.contains(&w) {
                    out.push(w);
                }
            }
        }
        out
    }

    /// Searches for `y` with `y g y^-1 = g^-1` among rotations of the cyclic
    /// form followed by edge group elements `z^j`, `|j| <= bound`.
    pub fn search_conjugate_to_inverse(&self, g: &Word, bound: i64) -> Result<InverseSearch, Error> {
        let Classification::Hyperbolic { cyclic_form, conjugator: u, .. } = self.classify_element(g)? else {
            return Err(Error::Assertion("inverse search expects a hyperbolic element".into()));
        };
        let amb = &self.ambient;
        let target = self.normal_form(&amb.invert(&cyclic_form));
        let nf = self.normal_form(&cyclic_form);
        let edges = self.edge_elements(bound);
        for p in self.rotation_prefixes(&nf) {
            let rot = amb.conjugate(&amb.invert(&p), &cyclic_form);
            for e in &edges {
                if self.normal_form(&amb.conjugate(e, &rot)) == target {
                    let x = amb.mul(e, &amb.invert(&p));
                    let y = amb.conjugate(&u, &x);
                    if !self.equal_in_group(&amb.conjugate(&y, g), &amb.invert(g)) {
                        return Err(Error::Assertion("inverse conjugator does not verify".into()));
                    }
                    return Ok(InverseSearch::Found(y));
                }
            }
        }
        Ok(InverseSearch::NotFound { edge_power_bound: bound })
    }

    /// `Some(j)` when the vertex element is conjugate in its vertex group to the `j`-th power of an edge image.
    fn edge_power(&self, side: Side, element: &Word) -> Result<Option<i64>, Error> {
        let vg = self.vertex_group(side);
        let sides: Vec<Side> = if self.is_hnn() { vec![Side::Left, Side::Right] } else { vec![side] };
        for s in sides {
            if let Some(j) = vg.power_conjugate(element, self.edge_image(s))? {
                if j != 0 {
                    return Ok(Some(j));
                }
            }
        }
        Ok(None)
    }

    pub fn acylindricity_report(&self) -> Result<AcylindricityReport, Error> {
        let mut checks = Vec::new();
        let sides = [Side::Left, Side::Right];
        for side in sides {
            let vg = self.vertex_group(side);
            let w = self.edge_image(side);
            if vg.has_finite_order(w) {
                return Err(Error::Assertion(format!("edge image {} has finite order", vg.format_word(w))));
            }
        }
        checks.push("edge images have infinite order".to_string());
        let primitive = |s: Side| -> Result<bool, Error> {
            Ok(self.vertex_group(s).primitive_root(self.edge_image(s))?.1 == 1)
        };
        let k = match self.case {
            SplittingCase::OrientableHnn => {
                let h = self.vertex_group(Side::Left);
                let (w1, w2) = (self.edge_image(Side::Left), self.edge_image(Side::Right));
                if !primitive(Side::Left)? || !primitive(Side::Right)? {
                    return Err(Error::Assertion("edge image is a proper power".into()));
                }
                for p in 1..=4 {
                    if h.power_conjugate(&h.power(w1, p), w2)?.is_some() {
                        return Err(Error::Assertion("edge images have conjugate powers".into()));
                    }
                }
                checks.push(format!(
                    "no power w1^p (1 <= p <= 4) of {} is conjugate to a power of {}",
                    h.format_word(w1),
                    h.format_word(w2)
                ));
                1
            }
            SplittingCase::SphereAmalgam | SplittingCase::NonorientableAmalgam => {
                let mut rigid = Vec::new();
                for s in sides {
                    if primitive(s)? && !self.vertex_group(s).is_conjugate_to_inverse(self.edge_image(s)) {
                        rigid.push(s);
                    }
                }
                if rigid.is_empty() {
                    return Err(Error::Assertion("no rigid edge image".into()));
                }
                for s in rigid {
                    checks.push(format!(
                        "edge image {} is primitive and not conjugate to its inverse",
                        self.vertex_group(s).format_word(self.edge_image(s))
                    ));
                }
                2
            }
        };
        Ok(AcylindricityReport { k, n: cfl_n(k), gap: cfl_gap(k), checks })
    }

    /// Null-homologous over `Q` in the closed group.
    pub fn is_null_homologous(&self, g: &Word) -> bool {
        let s = self.ambient.exponent_sums(g);
        if self.orbifold.orientable() {
            s.iter().all(|&v| v == 0)
        } else {
            s.windows(2).all(|p| p[0] == p[1])
        }
    }

    /// Orbifold with boundary carried by a vertex group.
    pub fn vertex_boundary_data(&self, side: Side) -> Option<BoundaryData> {
        let vg = self.vertex_group(side).clone();
        match self.case {
            SplittingCase::OrientableHnn => {
                let free = vg.free_rank();
                let per = vg.reduce_unchecked(&[Letter::x_inv(0)]);
                let long = self.edge_image(Side::Right).clone();
                Some(BoundaryData::new(vg, true, (1..free).collect(), vec![per], long))
            }
            SplittingCase::SphereAmalgam => {
                let long = vg.invert(self.edge_image(Side::Left));
                let long = if side == Side::Left { long } else { self.edge_image(Side::Right).clone() };
                Some(BoundaryData::new(vg, true, vec![], vec![], long))
            }
            SplittingCase::NonorientableAmalgam => {
                if side == Side::Left {
                    return None;
                }
                let free = vg.free_rank();
                let long = self.edge_image(Side::Right).clone();
                Some(BoundaryData::new(vg, free == 0, (0..free).collect(), vec![], long))
            }
        }
    }
}

/// Gap certificate for an element of a closed orbifold group.
pub fn closed_gap_certificate(spec: &OrbifoldSpec, g: &Word) -> Result<GapCertificate, Error> {
    closed_splitting(spec)?.closed_gap(g)
}

impl SplittingSpec {
    pub fn closed_gap(&self, g: &Word) -> Result<GapCertificate, Error> {
        let amb = &self.ambient;
        let chain = Chain::single(g.clone());
        let class = self.classify_element(g)?;
        if let Classification::Elliptic { vertex, element, .. } = &class {
            if self.vertex_group(*vertex).has_finite_order(element) {
                return Ok(GapCertificate::zero(amb, chain, VanishingReason::FiniteOrder));
            }
        }
        if !self.is_null_homologous(g) {
            return Ok(GapCertificate::infinite(amb, chain).with_note("nontrivial in rational homology"));
        }
        match class {
            Classification::Hyperbolic { length, .. } => {
                match self.search_conjugate_to_inverse(g, DEFAULT_INVERSE_SEARCH_BOUND)? {
                    InverseSearch::Found(y) => Ok(GapCertificate::zero(amb, chain, VanishingReason::ConjugateToInverse)
                        .with_note(format!("conjugated to its inverse by {}", amb.format_word(&y)))),
                    InverseSearch::NotFound { edge_power_bound } => {
                        let k = self.acylindricity_report()?.k;
                        Ok(GapCertificate::acylindrical(amb, chain, k)
                            .with_note(format!("hyperbolic, cyclic normal form of length {length}"))
                            .with_note(format!(
                                "scl >= gap unless g is conjugate to g^-1; no conjugator found among rotations and edge powers up to {edge_power_bound}"
                            )))
                    }
                }
            }
            Classification::Elliptic { vertex, element, .. } => self.elliptic_gap(g, vertex, &element),
        }
    }

    fn elliptic_gap(&self, g: &Word, side: Side, element: &Word) -> Result<GapCertificate, Error> {
        let amb = &self.ambient;
        let chain = Chain::single(g.clone());
        let vg = self.vertex_group(side);
        if vg.is_conjugate_to_inverse(element) {
            return Ok(GapCertificate::zero(amb, chain, VanishingReason::ConjugateToInverse)
                .with_note("conjugate to its inverse inside a vertex group"));
        }
        let k = self.orbifold.genus();
        let scaled_vertex_word = |factor: Q, s: Side, w: &Word, note: &str| -> Result<GapCertificate, Error> {
            let part = element_gap(self.vertex_group(s), w)?;
            Ok(GapCertificate::scaled(amb, chain.clone(), factor, vec![part])?.with_note(note))
        };
        if let Some(j) = self.edge_power(side, element)? {
            return match self.case {
                SplittingCase::OrientableHnn => Ok(GapCertificate::infinite(amb, chain)
                    .with_note("edge group element, nontrivial in homology")),
                SplittingCase::SphereAmalgam => {
                    let wa = self.vertex_group(Side::Left).invert(self.edge_image(Side::Left));
                    let parts = vec![
                        element_gap(self.vertex_group(Side::Left), &wa)?,
                        element_gap(self.vertex_group(Side::Right), self.edge_image(Side::Right))?,
                    ];
                    Ok(GapCertificate::scaled(amb, chain, int(j.abs()), parts)?
                        .with_note(format!("edge group element z^{j}; minimum over both vertex groups")))
                }
                SplittingCase::NonorientableAmalgam if k == 1 => scaled_vertex_word(
                    int(j.abs()),
                    Side::Right,
                    self.edge_image(Side::Right),
                    &format!("edge group element z^{j}; bounded in the cone point subgroup"),
                ),
                SplittingCase::NonorientableAmalgam => Ok(GapCertificate::infinite(amb, chain)
                    .with_note("edge group element, nontrivial in homology")),
            };
        }
        if self.case == SplittingCase::NonorientableAmalgam && side == Side::Left {
            let ell = self.vertex_group(Side::Left).exponent_sums(element)[0];
            if k != 1 {
                return Ok(GapCertificate::infinite(amb, chain).with_note("nontrivial in homology"));
            }
            return scaled_vertex_word(
                frac(ell.abs(), 2),
                Side::Right,
                self.edge_image(Side::Right),
                &format!("x1^{ell} with x1^2 in the edge group"),
            );
        }
        let data = self.vertex_boundary_data(side).ok_or_else(|| Error::Assertion("vertex has no boundary data".into()))?;
        let rel = relative_gap_on(&data, element)?;
        let mut cert = rel.certificate;
        cert.notes.push(format!(
            "elliptic; bounded below by the relative gap of {} in its vertex group",
            vg.format_word(element)
        ));
        if let Some(tag) = rel.case_tag {
            cert.notes.push(format!("relative case {tag:?}"));
        }
        if cert.status == Status::Zero && cert.reason == Some(VanishingReason::Peripheral) {
            return Err(Error::Assertion("peripheral vertex element was not detected as an edge element".into()));
        }
        Ok(cert)
    }
}
