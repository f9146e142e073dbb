//! Brute-force checks used to validate the exact algorithms.

use std::collections::{HashMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::Mutex;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Error;
use crate::group::{GroupSpec, Letter, Word};
use crate::hyperbolic::Isometry;
use crate::qm::{phi, CountingQm};
use crate::rational::{frac, int, Q};
use crate::splitting::{Side, SplittingSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WordFilter {
    All,
    CyclicallyReduced,
    /// Cyclically reduced, length at least 2, not self-overlapping.
    EligibleBase,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerationPlan {
    pub group: GroupSpec,
    pub max_length: usize,
    pub filter: WordFilter,
}

/// Reduced words of length at most `max_length`, ordered by length and then letter order.
pub fn enumerate_words(plan: &EnumerationPlan) -> Vec<Word> {
    let g = &plan.group;
    let alphabet = g.alphabet();
    let mut out = Vec::new();
    let mut level: Vec<Vec<Letter>> = vec![Vec::new()];
    for len in 0..=plan.max_length {
        if len > 0 {
            let mut next = Vec::new();
            for w in &level {
                for l in &alphabet {
                    if w.last().is_none_or(|p| g.can_follow(p, l)) {
                        let mut v = w.clone();
                        v.push(*l);
                        next.push(v);
                    }
                }
            }
            level = next;
        }
        for w in &level {
            let w = g.reduce_unchecked(w);
            let keep = match plan.filter {
                WordFilter::All => true,
                WordFilter::CyclicallyReduced => g.is_cyclically_reduced(&w),
                WordFilter::EligibleBase => {
                    w.len() >= 2 && g.is_cyclically_reduced(&w) && !w.is_self_overlapping()
                }
            };
            if keep {
                out.push(w);
            }
        }
    }
    out
}

pub fn all_words(group: &GroupSpec, max_length: usize) -> Vec<Word> {
    enumerate_words(&EnumerationPlan { group: group.clone(), max_length, filter: WordFilter::All })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DefectReport {
    pub base: Word,
    pub max_length: usize,
    pub value: Q,
    /// A pair attaining the value.
    pub witness: (Word, Word),
    pub pairs: u64,
}

#[derive(Clone, Debug, Default)]
pub struct DefectOptions {
    pub jobs: Option<usize>,
    pub checkpoint: Option<std::path::PathBuf>,
}

const CHUNK: usize = 64;

fn checkpoint_header(group: &GroupSpec, bases: &[Word], max_length: usize) -> String {
    let b: Vec<String> = bases.iter().map(|w| group.format_word(w)).collect();
    format!("# defect {group} L={max_length} bases={}", b.join(";"))
}

type ChunkResult = Vec<(i64, usize, usize)>;

fn read_checkpoint(path: &Path, header: &str, nbases: usize) -> HashMap<usize, ChunkResult> {
    let mut done = HashMap::new();
    let Ok(f) = File::open(path) else { return done };
    let mut lines = BufReader::new(f).lines().map_while(Result::ok);
    if lines.next().as_deref() != Some(header) {
        return done;
    }
    for line in lines {
        let mut parts = line.split_whitespace();
        let (Some("chunk"), Some(idx)) = (parts.next(), parts.next()) else { continue };
        let Ok(idx) = idx.parse::<usize>() else { continue };
        let vals: Option<ChunkResult> = parts
            .map(|t| {
                let mut it = t.split(',').map(|x| x.parse::<i64>().ok());
                Some((it.next()??, it.next()?? as usize, it.next()?? as usize))
            })
            .collect();
        if let Some(v) = vals.filter(|v| v.len() == nbases) {
            done.insert(idx, v);
        }
    }
    done
}

/// Exhaustive `max |phi(h1) + phi(h2) - phi(h1 h2)|` over reduced `h1, h2` of length at most `max_length`,
/// for several bases at once.
pub fn brute_defect_many(
    group: &GroupSpec,
    bases: &[Word],
    max_length: usize,
    opts: &DefectOptions,
) -> Result<Vec<DefectReport>, Error> {
    for b in bases {
        CountingQm::new(group, b.clone())?;
    }
    let words = all_words(group, max_length);
    let inverses: Vec<Word> = bases.iter().map(|b| group.invert(b)).collect();
    let values: Vec<Vec<i64>> = bases.iter().map(|b| words.iter().map(|h| phi(group, b, h)).collect()).collect();
    let nchunks = words.len().div_ceil(CHUNK);
    let header = checkpoint_header(group, bases, max_length);
    let mut done = match &opts.checkpoint {
        Some(p) => read_checkpoint(p, &header, bases.len()),
        None => HashMap::new(),
    };
    let writer = match &opts.checkpoint {
        Some(p) => {
            let fresh = done.is_empty();
            let mut f = OpenOptions::new()
                .create(true)
                .append(!fresh)
                .write(true)
                .truncate(fresh)
                .open(p)
                .map_err(|e| Error::Unsupported(format!("checkpoint: {e}")))?;
            if fresh {
                writeln!(f, "{header}").map_err(|e| Error::Unsupported(format!("checkpoint: {e}")))?;
            }
            Some(Mutex::new(f))
        }
        None => None,
    };
    let todo: Vec<usize> = (0..nchunks).filter(|i| !done.contains_key(i)).collect();
    let work = |ci: usize| -> ChunkResult {
        let mut best: ChunkResult = vec![(-1, 0, 0); bases.len()];
        for i in ci * CHUNK..((ci + 1) * CHUNK).min(words.len()) {
            for (j, h2) in words.iter().enumerate() {
                let prod = group.mul(&words[i], h2);
                for (k, base) in bases.iter().enumerate() {
                    let p = crate::qm::count_occurrences(base, &prod) as i64
                        - crate::qm::count_occurrences(&inverses[k], &prod) as i64;
                    let d = (values[k][i] + values[k][j] - p).abs();
                    if d > best[k].0 {
                        best[k] = (d, i, j);
                    }
                }
            }
        }
        if let Some(w) = &writer {
            let cells: Vec<String> = best.iter().map(|(d, i, j)| format!("{d},{i},{j}")).collect();
            let mut f = w.lock().expect("checkpoint lock");
            let _ = writeln!(f, "chunk {ci} {}", cells.join(" "));
        }
        best
    };
    let threads = opts.jobs.unwrap_or_else(rayon::current_num_threads).max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Unsupported(e.to_string()))?;
    let fresh: Vec<(usize, ChunkResult)> = pool.install(|| todo.par_iter().map(|&ci| (ci, work(ci))).collect());
    done.extend(fresh);
    let n = words.len() as u64;
    let mut reports = Vec::new();
    for (k, base) in bases.iter().enumerate() {
        // ties resolved by the earliest pair so reruns agree
        let mut best = (-1i64, 0usize, 0usize);
        for ci in 0..nchunks {
            let c = done[&ci][k];
            if c.0 > best.0 || (c.0 == best.0 && (c.1, c.2) < (best.1, best.2)) {
                best = c;
            }
        }
        reports.push(DefectReport {
            base: base.clone(),
            max_length,
            value: int(best.0.max(0)),
            witness: (words[best.1].clone(), words[best.2].clone()),
            pairs: n * n,
        });
    }
    Ok(reports)
}

pub fn brute_defect(group: &GroupSpec, base: &Word, max_length: usize, opts: &DefectOptions) -> Result<DefectReport, Error> {
    Ok(brute_defect_many(group, std::slice::from_ref(base), max_length, opts)?.remove(0))
}

/// `phi(h^n) / n` for `n = 1..=n_max`.
pub fn homogenize_by_limit(qm: &CountingQm, h: &Word, n_max: usize) -> Vec<Q> {
    let g = qm.group();
    (1..=n_max as i64).map(|n| frac(qm.phi(&g.power(h, n)), n)).collect()
}

/// Shortest (then least) `u` with `|u| <= ball` and `u w1 u^-1 = w2`.
pub fn conjugator_search(group: &GroupSpec, w1: &Word, w2: &Word, ball: usize) -> Option<Word> {
    all_words(group, ball).into_iter().find(|u| &group.conjugate(u, w1) == w2)
}

/// Every `u w u^-1` with `|u| <= ball`.
pub fn conjugates_in_ball(group: &GroupSpec, w: &Word, ball: usize) -> HashSet<Word> {
    all_words(group, ball).iter().map(|u| group.conjugate(u, w)).collect()
}

/// Faithful representation of the sphere with cone orders `(2, 2, 2, o)` into `PSL(2, R)`,
/// sending `y1 .. y4` to rotations with `y1 y2 y3 y4 = 1`.
///
/// Built from reflections in the sides of a Lambert quadrilateral with acute angle `pi/o`.
pub fn sphere_2222_representation(o: u32) -> Result<[Isometry; 4], Error> {
    if o < 3 {
        return Err(Error::NotHyperbolic("cone orders (2,2,2,2)".into()));
    }
    let phi = std::f64::consts::PI / o as f64;
    let a = phi.cos().sqrt().asinh();
    let theta = (1.0 / a.cosh()).asin();
    let (c, rho) = (1.0 / theta.cos(), theta.tan());
    // reflections z -> M(conj z), det M = -1
    let s1 = [-1.0, 0.0, 0.0, 1.0];
    let s2 = [0.0, a.exp(), (-a).exp(), 0.0];
    let s3 = [c / rho, -1.0 / rho, 1.0 / rho, -c / rho];
    let s4 = [0.0, 1.0, 1.0, 0.0];
    let rot = |m: [f64; 4], n: [f64; 4]| {
        Isometry::new(
            m[0] * n[0] + m[1] * n[2],
            m[0] * n[1] + m[1] * n[3],
            m[2] * n[0] + m[3] * n[2],
            m[2] * n[1] + m[3] * n[3],
        )
    };
    let r1 = rot(s4, s1)?;
    let r2 = rot(s1, s2)?;
    let r3 = rot(s2, s3)?;
    let r4 = rot(s3, s4)?;
    Ok([r4, r1, r2, r3])
}

pub fn represent(images: &[Isometry], w: &Word) -> Isometry {
    w.letters().iter().fold(Isometry::identity(), |acc, l| match *l {
        Letter::Torsion { gen, exp } => acc.mul(&images[gen].pow(exp)),
        Letter::Free { .. } => panic!("representation covers torsion generators only"),
    })
}

fn matrix_key(m: &Isometry, scale: f64) -> [i64; 4] {
    [m.a, m.b, m.c, m.d].map(|x| (x * scale).round() as i64)
}

/// Searches `u` with `|u| <= ball` such that `rho(u g u^-1)` equals the image of a vertex group word
/// of length at most `vertex_ball`. Uses only the representation, not normal forms.
pub struct VertexConjugacyOracle<'a> {
    split: &'a SplittingSpec,
    images: [Isometry; 4],
    table: HashSet<[i64; 4]>,
    conjugators: Vec<(Word, Isometry, Isometry)>,
}

const KEY_SCALE: f64 = 1e5;

impl<'a> VertexConjugacyOracle<'a> {
    pub fn new(split: &'a SplittingSpec, o: u32, ball: usize, vertex_ball: usize) -> Result<Self, Error> {
        if split.orbifold.cone_orders() != [2, 2, 2, o] {
            return Err(Error::Unsupported("oracle covers the sphere with cone orders (2,2,2,o)".into()));
        }
        let images = sphere_2222_representation(o)?;
        let mut table = HashSet::new();
        for side in [Side::Left, Side::Right] {
            for v in all_words(split.vertex_group(side), vertex_ball) {
                let m = represent(&images, &split.to_ambient(side, &v));
                for s in [1.0, -1.0] {
                    let sm = Isometry { a: s * m.a, b: s * m.b, c: s * m.c, d: s * m.d };
                    // both roundings of each entry, so nearby queries land on a stored key
                    for mask in 0..16u32 {
                        let mut k = [0i64; 4];
                        for (idx, x) in [sm.a, sm.b, sm.c, sm.d].into_iter().enumerate() {
                            let y = x * KEY_SCALE;
                            k[idx] = if mask >> idx & 1 == 1 { y.ceil() as i64 } else { y.floor() as i64 };
                        }
                        table.insert(k);
                    }
                }
            }
        }
        let conjugators = all_words(&split.ambient, ball)
            .into_iter()
            .map(|u| {
                let m = represent(&images, &u);
                (u, m, m.inverse())
            })
            .collect();
        Ok(VertexConjugacyOracle { split, images, table, conjugators })
    }

    pub fn image(&self, w: &Word) -> Isometry {
        represent(&self.images, w)
    }

    pub fn find(&self, g: &Word) -> Option<Word> {
        let mg = self.image(g);
        self.conjugators
            .iter()
            .find(|(_, m, mi)| self.table.contains(&matrix_key(&m.mul(&mg).mul(mi), KEY_SCALE)))
            .map(|(u, _, _)| u.clone())
    }

    pub fn equal(&self, a: &Word, b: &Word) -> bool {
        self.image(a).mul(&self.image(b).inverse()).is_identity(1e-7)
    }

    pub fn splitting(&self) -> &SplittingSpec {
        self.split
    }
}

/// Complex point fixed by an elliptic isometry.
pub fn fixed_point(m: &Isometry) -> Option<Complex64> {
    if m.c.abs() < 1e-14 {
        return None;
    }
    let t = m.a + m.d;
    let disc = Complex64::new(t * t - 4.0, 0.0).sqrt();
    let z = (Complex64::new(m.a - m.d, 0.0) + disc) / (2.0 * m.c);
    let z = if z.im > 0.0 { z } else { (Complex64::new(m.a - m.d, 0.0) - disc) / (2.0 * m.c) };
    Some(z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::{parse_group, parse_word};

    #[test]
    fn enumeration_order_and_counts() {
        let f1 = parse_group("F1").unwrap();
        let ws: Vec<String> = all_words(&f1, 2).iter().map(|w| f1.format_word(w)).collect();
        assert_eq!(ws, ["", "x1", "x1^-1", "x1 x1", "x1^-1 x1^-1"]);
        let g = parse_group("C2 * C3").unwrap();
        let ws: Vec<String> = all_words(&g, 1).iter().map(|w| g.format_word(w)).collect();
        assert_eq!(ws, ["", "y1", "y2", "y2^2"]);
        // transfer matrix: states "ended in a", "ended in b^e"
        let (mut ea, mut eb) = (1u64, 2u64);
        let mut total = 1 + ea + eb;
        for _ in 2..=4 {
            let (na, nb) = (eb, 2 * ea);
            ea = na;
            eb = nb;
            total += ea + eb;
        }
        assert_eq!(all_words(&g, 4).len() as u64, total);
    }

    #[test]
    fn filters() {
        let g = parse_group("F2").unwrap();
        let plan = |filter| EnumerationPlan { group: g.clone(), max_length: 3, filter };
        let cr = enumerate_words(&plan(WordFilter::CyclicallyReduced));
        assert!(cr.iter().all(|w| g.is_cyclically_reduced(w)));
        let el = enumerate_words(&plan(WordFilter::EligibleBase));
        assert!(el.iter().all(|w| CountingQm::new(&g, w.clone()).is_ok()));
        assert!(el.iter().all(|w| w.len() >= 2));
    }

    #[test]
    fn defect_small() {
        let g = parse_group("C2 * C3").unwrap();
        let r = brute_defect(&g, &parse_word("a b", &g).unwrap(), 4, &DefectOptions::default()).unwrap();
        assert!(r.value <= int(3) && r.value > int(0));
        let (h1, h2) = &r.witness;
        let d = phi(&g, &r.base, h1) + phi(&g, &r.base, h2) - phi(&g, &r.base, &g.mul(h1, h2));
        assert_eq!(int(d.abs()), r.value);
    }

    #[test]
    fn homogenization() {
        let g = parse_group("C2 * C3").unwrap();
        let q = CountingQm::new(&g, parse_word("a b", &g).unwrap()).unwrap();
        assert!(homogenize_by_limit(&q, &parse_word("a b", &g).unwrap(), 6).iter().all(|v| *v == int(1)));
        assert!(homogenize_by_limit(&q, &parse_word("b", &g).unwrap(), 6).iter().all(|v| *v == int(0)));
        let f = parse_group("F2").unwrap();
        let q = CountingQm::new(&f, parse_word("x x y", &f).unwrap()).unwrap();
        let h = parse_word("x y x", &f).unwrap();
        let bar = q.phi_bar(&h);
        for (n, v) in homogenize_by_limit(&q, &h, 12).iter().enumerate() {
            let num = v * int(n as i64 + 1) - int((n as i64 + 1) * bar);
            assert!(num.clone() * num <= int(4));
        }
    }

    #[test]
    fn conjugators() {
        let f = parse_group("F2").unwrap();
        let u = conjugator_search(&f, &parse_word("y", &f).unwrap(), &parse_word("x y x^-1", &f).unwrap(), 1);
        assert_eq!(u.map(|u| f.format_word(&u)), Some("x1".into()));
        let g = parse_group("C2 * C3").unwrap();
        let u = conjugator_search(&g, &parse_word("a b", &g).unwrap(), &parse_word("b a", &g).unwrap(), 1).unwrap();
        assert!(["y2^2", "y1"].contains(&g.format_word(&u).as_str()));
        assert_eq!(conjugator_search(&g, &parse_word("a b", &g).unwrap(), &parse_word("a b^2", &g).unwrap(), 4), None);
    }

    #[test]
    fn sphere_representation() {
        for o in [3, 4, 7] {
            let r = sphere_2222_representation(o).unwrap();
            for (m, ord) in r.iter().zip([2, 2, 2, o]) {
                assert!(m.pow(ord).is_identity(1e-9));
                assert!(!m.pow(ord - 1).is_identity(1e-3));
                assert!(fixed_point(m).is_some_and(|z| z.im > 0.0));
            }
            assert!(r[0].mul(&r[1]).mul(&r[2]).mul(&r[3]).is_identity(1e-9));
        }
    }
}
