//! Reduced words in free products of cyclic groups.
//!
//! A group is `F_m * C_{o_1} * ... * C_{o_n}`. Free generators are written one
//! letter per unit exponent, so `x^5` has length five. A torsion generator
//! carries its whole exponent in a single letter `y^e` with `0 < e < o`.
//!
//! Letters are totally ordered by the derived `Ord`:
//! `x1 < x1^-1 < x2 < ... < y1 < y1^2 < ... < y2 < ...`.
//! Canonical rotations and every tie-break in the crate use this order.

use std::fmt;

use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    Free { gen: usize, inverse: bool },
    Torsion { gen: usize, exp: u32 },
}

impl Letter {
    pub fn x(gen: usize) -> Self {
        Letter::Free { gen, inverse: false }
    }

    pub fn x_inv(gen: usize) -> Self {
        Letter::Free { gen, inverse: true }
    }

    pub fn y(gen: usize, exp: u32) -> Self {
        Letter::Torsion { gen, exp }
    }

    /// Same cyclic factor.
    pub fn same_factor(&self, other: &Letter) -> bool {
        match (self, other) {
            (Letter::Free { gen: a, .. }, Letter::Free { gen: b, .. }) => a == b,
            (Letter::Torsion { gen: a, .. }, Letter::Torsion { gen: b, .. }) => a == b,
            _ => false,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `w = v u v` with `v` non-empty, read off the letters as written.
    pub fn is_self_overlapping(&self) -> bool {
        let n = self.0.len();
        (1..=n / 2).any(|k| self.0[..k] == self.0[n - k..])
    }

    /// Rotation starting at position `k`. Only meaningful for cyclically reduced words.
    pub fn rotation(&self, k: usize) -> Word {
        if self.0.is_empty() {
            return Word::empty();
        }
        let k = k % self.0.len();
        let mut v = Vec::with_capacity(self.0.len());
        v.extend_from_slice(&self.0[k..]);
        v.extend_from_slice(&self.0[..k]);
        Word(v)
    }

    /// Length first, then lexicographic.
    pub fn shortlex_cmp(&self, other: &Word) -> std::cmp::Ordering {
        self.len().cmp(&other.len()).then_with(|| self.0.cmp(&other.0))
    }
}

/// Index of the lexicographically least rotation.
pub fn least_rotation<T: Ord>(s: &[T]) -> usize {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    let (mut i, mut j, mut k) = (0usize, 1usize, 0usize);
    while i < n && j < n && k < n {
        let a = &s[(i + k) % n];
        let b = &s[(j + k) % n];
        if a == b {
            k += 1;
            continue;
        }
        if a > b {
            i += k + 1;
        } else {
            j += k + 1;
        }
        if i == j {
            j += 1;
        }
        k = 0;
    }
    i.min(j)
}

/// A cyclically reduced word together with its least rotation.
///
/// The empty word is allowed and represents the trivial class.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CyclicWord {
    base: Word,
    canonical: Word,
}

impl CyclicWord {
    pub fn base(&self) -> &Word {
        &self.base
    }

    pub fn canonical_rotation(&self) -> &Word {
        &self.canonical
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }
}

/// Result of [`GroupSpec::cyclic_reduce`]: `w = conjugator * core * conjugator^-1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclicReduction {
    pub core: CyclicWord,
    pub conjugator: Word,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    free_rank: usize,
    torsion_orders: Vec<u32>,
    names: Option<Vec<String>>,
}

impl GroupSpec {
    pub fn new(free_rank: usize, torsion_orders: Vec<u32>) -> Result<Self, Error> {
        if let Some(&o) = torsion_orders.iter().find(|&&o| o < 2) {
            return Err(Error::BadTorsionOrder(o));
        }
        Ok(GroupSpec { free_rank, torsion_orders, names: None })
    }

    /// Attach generator names, free generators first.
    pub fn with_names(mut self, names: Vec<String>) -> Result<Self, Error> {
        let total = self.free_rank + self.torsion_orders.len();
        if names.len() != total {
            return Err(Error::BadNames(format!("{} names for {} generators", names.len(), total)));
        }
        for (i, a) in names.iter().enumerate() {
            let ok = a.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && a.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !ok {
                return Err(Error::BadNames(format!("invalid name {a:?}")));
            }
            if names[..i].contains(a) {
                return Err(Error::BadNames(format!("duplicate name {a:?}")));
            }
        }
        self.names = Some(names);
        Ok(self)
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion_orders(&self) -> &[u32] {
        &self.torsion_orders
    }

    pub fn declared_names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    /// Display name of a generator: declared name, else `x<i>` / `y<j>` (1-based).
    pub fn generator_name(&self, letter: &Letter) -> String {
        let (idx, canon) = match *letter {
            Letter::Free { gen, .. } => (gen, format!("x{}", gen + 1)),
            Letter::Torsion { gen, .. } => (self.free_rank + gen, format!("y{}", gen + 1)),
        };
        match &self.names {
            Some(n) if idx < n.len() => n[idx].clone(),
            _ => canon,
        }
    }

    pub fn letter_to_string(&self, letter: &Letter) -> String {
        let name = self.generator_name(letter);
        match *letter {
            Letter::Free { inverse: true, .. } => format!("{name}^-1"),
            Letter::Torsion { exp, .. } if exp != 1 => format!("{name}^{exp}"),
            _ => name,
        }
    }

    /// Space separated letters; the empty word prints as the empty string.
    pub fn format_word(&self, w: &Word) -> String {
        w.letters().iter().map(|l| self.letter_to_string(l)).collect::<Vec<_>>().join(" ")
    }

    pub fn order_of(&self, torsion_gen: usize) -> u32 {
        self.torsion_orders[torsion_gen]
    }

    pub fn letter_is_valid(&self, l: &Letter) -> bool {
        match *l {
            Letter::Free { gen, .. } => gen < self.free_rank,
            Letter::Torsion { gen, exp } => {
                gen < self.torsion_orders.len() && exp > 0 && exp < self.torsion_orders[gen]
            }
        }
    }

    /// Checks that `w` is a reduced word over this group.
    pub fn check(&self, w: &Word) -> Result<(), Error> {
        for l in w.letters() {
            if !self.letter_is_valid(l) {
                return Err(Error::GeneratorOutOfRange(format!("{l:?}")));
            }
        }
        let reduced = w.letters().windows(2).all(|p| !self.cancels_or_merges(&p[0], &p[1]));
        if reduced {
            Ok(())
        } else {
            Err(Error::GeneratorOutOfRange("word is not reduced".into()))
        }
    }

    fn cancels_or_merges(&self, a: &Letter, b: &Letter) -> bool {
        match (a, b) {
            (Letter::Free { gen: g, inverse: i }, Letter::Free { gen: h, inverse: j }) => g == h && i != j,
            (Letter::Torsion { gen: g, .. }, Letter::Torsion { gen: h, .. }) => g == h,
            _ => false,
        }
    }

    pub fn inverse_letter(&self, l: &Letter) -> Letter {
        match *l {
            Letter::Free { gen, inverse } => Letter::Free { gen, inverse: !inverse },
            Letter::Torsion { gen, exp } => Letter::Torsion { gen, exp: self.torsion_orders[gen] - exp },
        }
    }

    fn push(&self, out: &mut Vec<Letter>, l: Letter) {
        let l = match l {
            Letter::Torsion { gen, exp } => {
                let e = exp % self.torsion_orders[gen];
                if e == 0 {
                    return;
                }
                Letter::Torsion { gen, exp: e }
            }
            f => f,
        };
        match (out.last().copied(), l) {
            (Some(Letter::Free { gen: g, inverse: i }), Letter::Free { gen: h, inverse: j }) if g == h && i != j => {
                out.pop();
            }
            (Some(Letter::Torsion { gen: g, exp: e }), Letter::Torsion { gen: h, exp: f }) if g == h => {
                out.pop();
                let s = (e + f) % self.torsion_orders[g];
                if s != 0 {
                    out.push(Letter::Torsion { gen: g, exp: s });
                }
            }
            _ => out.push(l),
        }
    }

    /// Reduces a raw letter sequence. Torsion exponents may be any non-negative
    /// value and are taken modulo the order.
    pub fn reduce(&self, letters: &[Letter]) -> Result<Word, Error> {
        for l in letters {
            let ok = match *l {
                Letter::Free { gen, .. } => gen < self.free_rank,
                Letter::Torsion { gen, .. } => gen < self.torsion_orders.len(),
            };
            if !ok {
                return Err(Error::GeneratorOutOfRange(format!("{l:?}")));
            }
        }
        Ok(self.reduce_unchecked(letters))
    }

    pub(crate) fn reduce_unchecked(&self, letters: &[Letter]) -> Word {
        let mut out = Vec::with_capacity(letters.len());
        for &l in letters {
            self.push(&mut out, l);
        }
        Word(out)
    }

    pub fn multiply(&self, a: &Word, b: &Word) -> Result<Word, Error> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul(a, b))
    }

    /// Product of words already known to belong to this group.
    pub fn mul(&self, a: &Word, b: &Word) -> Word {
        let mut out = a.0.clone();
        for &l in &b.0 {
            self.push(&mut out, l);
        }
        Word(out)
    }

    pub fn mul3(&self, a: &Word, b: &Word, c: &Word) -> Word {
        self.mul(&self.mul(a, b), c)
    }

    pub fn invert(&self, w: &Word) -> Word {
        Word(w.0.iter().rev().map(|l| self.inverse_letter(l)).collect())
    }

    /// `u w u^-1`.
    pub fn conjugate(&self, u: &Word, w: &Word) -> Word {
        self.mul3(u, w, &self.invert(u))
    }

    pub fn power(&self, w: &Word, k: i64) -> Word {
        let base = if k < 0 { self.invert(w) } else { w.clone() };
        let mut out = Vec::new();
        for _ in 0..k.unsigned_abs() {
            for &l in &base.0 {
                self.push(&mut out, l);
            }
        }
        Word(out)
    }

    pub fn cyclic_word(&self, cyclically_reduced: Word) -> CyclicWord {
        let r = least_rotation(cyclically_reduced.letters());
        let canonical = cyclically_reduced.rotation(r);
        CyclicWord { base: cyclically_reduced, canonical }
    }

    /// Conjugates `w` to a cyclically reduced core.
    ///
    /// Free letters cancel across the seam; torsion letters of the same
    /// factor at both ends merge, and disappear when the exponents sum to `0`.
    pub fn cyclic_reduce(&self, w: &Word) -> CyclicReduction {
        let s = w.letters();
        let (mut lo, mut hi) = (0usize, s.len());
        let mut conj = Vec::new();
        let mut tail: Option<Letter> = None;
        while hi - lo >= 2 {
            let (f, l) = (s[lo], s[hi - 1]);
            match (f, l) {
                (Letter::Free { gen: g, inverse: i }, Letter::Free { gen: h, inverse: j }) if g == h && i != j => {
                    conj.push(f);
                    lo += 1;
                    hi -= 1;
                }
                (Letter::Torsion { gen: g, exp: e }, Letter::Torsion { gen: h, exp: d }) if g == h => {
                    conj.push(f);
                    lo += 1;
                    hi -= 1;
                    let m = (e + d) % self.torsion_orders[g];
                    if m != 0 {
                        tail = Some(Letter::Torsion { gen: g, exp: m });
                        break;
                    }
                }
                _ => break,
            }
        }
        let mut core: Vec<Letter> = s[lo..hi].to_vec();
        if let Some(t) = tail {
            core.push(t);
        }
        CyclicReduction { core: self.cyclic_word(Word(core)), conjugator: Word(conj) }
    }

    pub fn is_cyclically_reduced(&self, w: &Word) -> bool {
        match (w.0.first(), w.0.last()) {
            (Some(a), Some(b)) if w.len() >= 2 => !self.cancels_or_merges(b, a),
            _ => true,
        }
    }

    /// Canonical representative of the conjugacy class: least rotation of the core.
    pub fn conjugacy_key(&self, w: &Word) -> Word {
        self.cyclic_reduce(w).core.canonical
    }

    pub fn is_conjugate(&self, a: &Word, b: &Word) -> bool {
        self.conjugacy_key(a) == self.conjugacy_key(b)
    }

    pub fn has_finite_order(&self, w: &Word) -> bool {
        let core = self.cyclic_reduce(w).core;
        match core.base.0.as_slice() {
            [] => true,
            [Letter::Torsion { .. }] => true,
            _ => false,
        }
    }

    pub fn is_conjugate_to_inverse(&self, w: &Word) -> bool {
        self.is_conjugate(w, &self.invert(w))
    }

    /// Conjugate into a single free factor (this includes `x^k` and the identity).
    pub fn is_in_free_factor(&self, w: &Word) -> bool {
        let core = self.cyclic_reduce(w).core;
        match core.base.0.split_first() {
            None => true,
            Some((a, rest)) => rest.iter().all(|l| l.same_factor(a)),
        }
    }

    /// `(root, k)` with `w` conjugate to `root^k` and `root` not a proper power.
    pub fn primitive_root(&self, w: &Word) -> Result<(Word, usize), Error> {
        if self.has_finite_order(w) {
            return Err(Error::FiniteOrder);
        }
        let core = self.cyclic_reduce(w).core.base;
        let n = core.len();
        let p = (1..=n)
            .find(|&p| n % p == 0 && (0..n).all(|i| core.0[i] == core.0[(i + p) % n]))
            .unwrap_or(n);
        Ok((Word(core.0[..p].to_vec()), n / p))
    }

    /// Least rotation of the core; never self-overlapping.
    pub fn minimal_cyclic_conjugate(&self, w: &Word) -> Result<Word, Error> {
        let (root, k) = self.primitive_root(w)?;
        if k != 1 {
            return Err(Error::ProperPower);
        }
        Ok(self.cyclic_word(root).canonical)
    }

    /// `Some(k)` when `w` is conjugate to `base^k`.
    pub fn power_conjugate(&self, w: &Word, base: &Word) -> Result<Option<i64>, Error> {
        if self.has_finite_order(base) {
            return Err(Error::FiniteOrder);
        }
        let cw = self.cyclic_reduce(w).core;
        if cw.is_empty() {
            return Ok(Some(0));
        }
        let cb = self.cyclic_reduce(base).core.base;
        if cw.len() % cb.len() != 0 {
            return Ok(None);
        }
        let k = cw.len() / cb.len();
        let repeat = |b: &Word| {
            let mut v = Vec::with_capacity(cw.len());
            for _ in 0..k {
                v.extend_from_slice(&b.0);
            }
            self.cyclic_word(Word(v)).canonical
        };
        if repeat(&cb) == cw.canonical {
            return Ok(Some(k as i64));
        }
        if repeat(&self.invert(&cb)) == cw.canonical {
            return Ok(Some(-(k as i64)));
        }
        Ok(None)
    }

    /// Exponent sum of each free generator.
    pub fn exponent_sums(&self, w: &Word) -> Vec<i64> {
        let mut v = vec![0i64; self.free_rank];
        for l in w.letters() {
            if let Letter::Free { gen, inverse } = *l {
                v[gen] += if inverse { -1 } else { 1 };
            }
        }
        v
    }

    /// Every letter of the group, in letter order.
    pub fn alphabet(&self) -> Vec<Letter> {
        let mut v = Vec::new();
        for g in 0..self.free_rank {
            v.push(Letter::x(g));
            v.push(Letter::x_inv(g));
        }
        for (g, &o) in self.torsion_orders.iter().enumerate() {
            for e in 1..o {
                v.push(Letter::y(g, e));
            }
        }
        v
    }

    /// Whether `b` may follow `a` in a reduced word.
    pub fn can_follow(&self, a: &Letter, b: &Letter) -> bool {
        !self.cancels_or_merges(a, b)
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        let names = self.names.as_deref();
        if self.free_rank > 0 || self.torsion_orders.is_empty() {
            match names {
                Some(n) if self.free_rank > 0 => {
                    parts.push(format!("F{}({})", self.free_rank, n[..self.free_rank].join(",")))
                }
                _ => parts.push(format!("F{}", self.free_rank)),
            }
        }
        for (j, o) in self.torsion_orders.iter().enumerate() {
            match names {
                Some(n) => parts.push(format!("C{}({})", o, n[self.free_rank + j])),
                None => parts.push(format!("C{o}")),
            }
        }
        write!(f, "{}", parts.join(" * "))
    }
}
