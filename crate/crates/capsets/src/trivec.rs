//! Points of F_3^n and sets of them.
//!
//! A [`Point`] packs its n trits into two bit planes so that componentwise
//! mod-3 arithmetic is a few boolean word ops; that keeps the O(N^2)
//! verification loops cheap. The canonical encoding of a point is the base-3
//! value of its trits, trit 0 least significant, and file formats and all
//! "smallest point" rules follow that encoding.
//!
//! Choosing a basis of F_{3^m} over F_3 identifies F_q^d with F_3^(dm);
//! [`flatten`] fixes the convention: coordinate 0's trits come first and the
//! constant term comes first within a coordinate.

use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldParams};
use crate::ternary::{self, POW3};
use std::collections::HashSet;
use std::fmt;
use std::io::{BufRead, Write};

/// Largest ambient dimension: encodings must fit u64.
pub const MAX_N: u32 = 40;

/// Default memory budget for 3^n-sized bitmaps, in bits (2^31).
pub const DEFAULT_BUDGET_BITS: u64 = 1 << 31;

/// A point of F_3^n, packed as two bit planes.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Point {
    n: u16,
    pub(crate) lo: u64,
    pub(crate) hi: u64,
}

impl Point {
    pub fn zero(n: u32) -> Point {
        assert!(n <= MAX_N);
        Point { n: n as u16, lo: 0, hi: 0 }
    }

    pub fn from_trits(trits: &[u8]) -> Point {
        assert!(trits.len() as u32 <= MAX_N);
        let (mut lo, mut hi) = (0u64, 0u64);
        for (i, &t) in trits.iter().enumerate() {
            assert!(t <= 2, "trit out of range");
            ternary::set_trit(&mut lo, &mut hi, i, t);
        }
        Point { n: trits.len() as u16, lo, hi }
    }

    pub fn from_encoding(n: u32, enc: u64) -> Point {
        assert!(n <= MAX_N && enc < POW3[n as usize]);
        let (lo, hi) = ternary::index_to_planes(enc, n as usize);
        Point { n: n as u16, lo, hi }
    }

    #[inline]
    pub fn dim(&self) -> u32 {
        self.n as u32
    }

    #[inline]
    pub fn trit(&self, i: usize) -> u8 {
        debug_assert!(i < self.n as usize);
        ternary::trit_at(self.lo, self.hi, i)
    }

    pub fn trits(&self) -> Vec<u8> {
        (0..self.n as usize).map(|i| self.trit(i)).collect()
    }

    /// Base-3 value of the trits, trit 0 least significant.
    #[inline]
    pub fn encoding(&self) -> u64 {
        ternary::planes_to_index(self.lo, self.hi, self.n as usize)
    }

    /// Digit string, trit 0 first; the line format of capset files.
    pub fn digits(&self) -> String {
        self.trits().iter().map(|t| (b'0' + t) as char).collect()
    }

    pub fn parse_digits(s: &str) -> Result<Point> {
        if s.len() > MAX_N as usize {
            return Err(Error::DimensionTooLarge { n: s.len() as u32, max: MAX_N });
        }
        let (mut lo, mut hi) = (0u64, 0u64);
        for (i, c) in s.bytes().enumerate() {
            match c {
                b'0' => {}
                b'1' => lo |= 1 << i,
                b'2' => hi |= 1 << i,
                _ => return Err(Error::Parse(format!("bad trit {:?} in point line", c as char))),
            }
        }
        Ok(Point { n: s.len() as u16, lo, hi })
    }

    /// Appends one trit, raising the dimension by one.
    pub fn extend(&self, t: u8) -> Point {
        assert!(t <= 2 && (self.n as u32) < MAX_N);
        let mut p = Point { n: self.n + 1, lo: self.lo, hi: self.hi };
        ternary::set_trit(&mut p.lo, &mut p.hi, self.n as usize, t);
        p
    }

    #[inline]
    pub(crate) fn add_unchecked(&self, other: &Point) -> Point {
        debug_assert_eq!(self.n, other.n);
        let (lo, hi) = ternary::tri_add(self.lo, self.hi, other.lo, other.hi);
        Point { n: self.n, lo, hi }
    }

    #[inline]
    pub(crate) fn third_unchecked(&self, other: &Point) -> Point {
        debug_assert_eq!(self.n, other.n);
        let (lo, hi) = ternary::tri_third(self.lo, self.hi, other.lo, other.hi);
        Point { n: self.n, lo, hi }
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Point({})", self.digits())
    }
}

/// Componentwise sum mod 3; no carries.
pub fn pt_add(p: &Point, q: &Point) -> Result<Point> {
    if p.n != q.n {
        return Err(Error::DimensionMismatch { left: p.n as u32, right: q.n as u32 });
    }
    Ok(p.add_unchecked(q))
}

/// Componentwise negation mod 3.
pub fn pt_neg(p: &Point) -> Point {
    Point { n: p.n, lo: p.hi, hi: p.lo }
}

/// The unique R with {P, Q, R} an F_3-line: R = -(P+Q). Requires P != Q.
pub fn third_point(p: &Point, q: &Point) -> Result<Point> {
    if p.n != q.n {
        return Err(Error::DimensionMismatch { left: p.n as u32, right: q.n as u32 });
    }
    if p == q {
        return Err(Error::EqualPoints);
    }
    Ok(p.third_unchecked(q))
}

/// Concatenates the coefficient vectors of d field-element coordinates into a
/// point of F_3^(dm): coordinate 0 first, constant term first.
pub fn flatten(field: &FieldParams, coords: &[FieldElement]) -> Point {
    let m = field.m() as usize;
    let n = coords.len() * m;
    assert!(n as u32 <= MAX_N, "flattened dimension too large");
    let (mut lo, mut hi) = (0u64, 0u64);
    for (c, x) in coords.iter().enumerate() {
        let (xl, xh) = ternary::index_to_planes(x.0 as u64, m);
        lo |= xl << (c * m);
        hi |= xh << (c * m);
    }
    Point { n: n as u16, lo, hi }
}

/// Recovers the d field-element coordinates of a flattened point.
pub fn unflatten(field: &FieldParams, p: &Point) -> Vec<FieldElement> {
    let m = field.m() as usize;
    assert_eq!(p.dim() as usize % m, 0);
    let d = p.dim() as usize / m;
    let mask = (1u64 << m) - 1;
    (0..d)
        .map(|c| {
            let lo = (p.lo >> (c * m)) & mask;
            let hi = (p.hi >> (c * m)) & mask;
            FieldElement(ternary::planes_to_index(lo, hi, m) as u32)
        })
        .collect()
}

enum Membership {
    Bitmap(Vec<u64>),
    Set(HashSet<u64>),
}

impl Membership {
    #[inline]
    fn contains(&self, enc: u64) -> bool {
        match self {
            Membership::Bitmap(bits) => {
                (bits[(enc >> 6) as usize] >> (enc & 63)) & 1 == 1
            }
            Membership::Set(set) => set.contains(&enc),
        }
    }
}

/// A duplicate-free set of points of common dimension, ordered by encoding,
/// with a fast membership index.
///
/// The name records intent; whether the set actually is a capset is decided
/// by [`crate::verify::is_capset`].
pub struct CapSet {
    n: u32,
    points: Vec<Point>,
    index: Membership,
}

impl CapSet {
    /// Builds a set from arbitrary points: checks dimensions, sorts by
    /// encoding and drops duplicates. A 3^n-bit membership bitmap is used
    /// when it fits `budget_bits`, a hash set otherwise.
    pub fn from_points(n: u32, points: Vec<Point>, budget_bits: u64) -> Result<CapSet> {
        if n > MAX_N {
            return Err(Error::DimensionTooLarge { n, max: MAX_N });
        }
        for p in &points {
            if p.dim() != n {
                return Err(Error::DimensionMismatch { left: n, right: p.dim() });
            }
        }
        let mut keyed: Vec<(u64, Point)> = points.into_iter().map(|p| (p.encoding(), p)).collect();
        keyed.sort_unstable_by_key(|(e, _)| *e);
        keyed.dedup_by_key(|(e, _)| *e);

        let ambient = POW3[n as usize];
        let index = if ambient <= budget_bits {
            let mut bits = vec![0u64; (ambient as usize).div_ceil(64)];
            for (e, _) in &keyed {
                bits[(e >> 6) as usize] |= 1 << (e & 63);
            }
            Membership::Bitmap(bits)
        } else {
            Membership::Set(keyed.iter().map(|(e, _)| *e).collect())
        };
        Ok(CapSet {
            n,
            points: keyed.into_iter().map(|(_, p)| p).collect(),
            index,
        })
    }

    pub fn with_default_budget(n: u32, points: Vec<Point>) -> Result<CapSet> {
        Self::from_points(n, points, DEFAULT_BUDGET_BITS)
    }

    #[inline]
    pub fn dim(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    #[inline]
    pub fn points(&self) -> &[Point] {
        &self.points
    }

    #[inline]
    pub fn contains(&self, p: &Point) -> bool {
        p.dim() == self.n && self.index.contains(p.encoding())
    }

    #[inline]
    pub(crate) fn contains_encoding(&self, enc: u64) -> bool {
        self.index.contains(enc)
    }

    // ---------------- text format ----------------
    //
    // line 1: `n=<int>`; then one point per line as n digits in {0,1,2},
    // trit 0 first, lines sorted by encoding. Bit-exact across platforms.

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "n={}", self.n)?;
        for p in &self.points {
            writeln!(w, "{}", p.digits())?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("digits are ascii")
    }

    pub fn read_from<R: BufRead>(r: R, budget_bits: u64) -> Result<CapSet> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty capset file".into()))??;
        let n: u32 = header
            .strip_prefix("n=")
            .ok_or_else(|| Error::Parse(format!("bad header line {header:?}")))?
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("bad dimension: {e}")))?;
        if n > MAX_N {
            return Err(Error::DimensionTooLarge { n, max: MAX_N });
        }
        let mut points = Vec::new();
        let mut seen = HashSet::new();
        for line in lines {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            if line.len() != n as usize {
                return Err(Error::Parse(format!(
                    "point line has {} digits, expected {n}",
                    line.len()
                )));
            }
            let p = Point::parse_digits(&line)?;
            if !seen.insert(p.encoding()) {
                return Err(Error::Parse(format!("duplicate point {line}")));
            }
            points.push(p);
        }
        CapSet::from_points(n, points, budget_bits)
    }

    pub fn parse_text(text: &str, budget_bits: u64) -> Result<CapSet> {
        CapSet::read_from(text.as_bytes(), budget_bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(trits: &[u8]) -> Point {
        Point::from_trits(trits)
    }

    #[test]
    fn componentwise_arithmetic() {
        assert_eq!(pt_add(&pt(&[1, 2]), &pt(&[2, 1])).unwrap(), pt(&[0, 0]));
        assert_eq!(pt_neg(&pt(&[1, 0, 2])), pt(&[2, 0, 1]));
        let p = pt(&[1, 2, 0, 1]);
        let triple = pt_add(&pt_add(&p, &p).unwrap(), &p).unwrap();
        assert_eq!(triple, Point::zero(4));
    }

    #[test]
    fn third_point_examples() {
        assert_eq!(
            third_point(&pt(&[0, 0]), &pt(&[1, 1])).unwrap(),
            pt(&[2, 2])
        );
        assert_eq!(
            third_point(&pt(&[1, 0]), &pt(&[1, 1])).unwrap(),
            pt(&[1, 2])
        );
        // symmetry and involution
        let p = pt(&[0, 2, 1]);
        let q = pt(&[1, 1, 1]);
        assert_eq!(
            third_point(&p, &q).unwrap(),
            third_point(&q, &p).unwrap()
        );
        let r = third_point(&p, &q).unwrap();
        assert_eq!(third_point(&p, &r).unwrap(), q);
        assert!(third_point(&p, &p).is_err());
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        assert!(pt_add(&pt(&[1]), &pt(&[1, 0])).is_err());
    }

    #[test]
    fn flatten_convention() {
        let f = FieldParams::new(2).unwrap();
        // (1+t, 2) -> trits (1,1,2,0): coordinate 0 first, constant first
        let p = flatten(&f, &[FieldElement(4), FieldElement(2)]);
        assert_eq!(p.trits(), vec![1, 1, 2, 0]);
        assert_eq!(unflatten(&f, &p), vec![FieldElement(4), FieldElement(2)]);
        assert_eq!(
            flatten(&f, &[FieldElement::ZERO, FieldElement::ZERO]),
            Point::zero(4)
        );
        let f1 = FieldParams::new(1).unwrap();
        assert_eq!(flatten(&f1, &[FieldElement(2)]).trits(), vec![2]);
    }

    #[test]
    fn flatten_is_additive_and_injective() {
        for (d, m) in [(1u32, 2u32), (2, 2), (2, 3), (1, 4)] {
            let f = FieldParams::new(m).unwrap();
            let mut image = HashSet::new();
            let qd = f.q().pow(d);
            for k in 0..qd {
                let coords: Vec<FieldElement> = (0..d)
                    .map(|i| FieldElement(((k / f.q().pow(i)) % f.q()) as u32))
                    .collect();
                image.insert(flatten(&f, &coords).encoding());
            }
            assert_eq!(image.len() as u64, qd, "flatten bijective d={d} m={m}");
        }
        // additivity
        let f = FieldParams::new(3).unwrap();
        for a in 0..27u64 {
            for b in 0..27u64 {
                let (x, y) = (FieldElement(a as u32), FieldElement(b as u32));
                let lhs = flatten(&f, &[f.add(x, y)]);
                let rhs = pt_add(&flatten(&f, &[x]), &flatten(&f, &[y])).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn capset_text_round_trip() {
        let points = vec![pt(&[1, 1]), pt(&[2, 1]), pt(&[1, 2]), pt(&[2, 2])];
        let s = CapSet::with_default_budget(2, points).unwrap();
        let text = s.to_text();
        assert_eq!(text, "n=2\n11\n21\n12\n22\n");
        let back = CapSet::parse_text(&text, DEFAULT_BUDGET_BITS).unwrap();
        assert_eq!(back.to_text(), text);
        assert_eq!(back.len(), 4);
        assert!(back.contains(&pt(&[1, 1])));
        assert!(!back.contains(&pt(&[0, 0])));
    }

    #[test]
    fn sort_order_is_by_encoding_not_digit_string() {
        // encoding of (2,0) is 2, of (0,1) is 3: "20" sorts before "01"
        let s = CapSet::with_default_budget(2, vec![pt(&[0, 1]), pt(&[2, 0])]).unwrap();
        assert_eq!(s.to_text(), "n=2\n20\n01\n");
    }

    #[test]
    fn parse_rejects_malformed_input() {
        assert!(CapSet::parse_text("", DEFAULT_BUDGET_BITS).is_err());
        assert!(CapSet::parse_text("m=2\n11\n", DEFAULT_BUDGET_BITS).is_err());
        assert!(CapSet::parse_text("n=2\n111\n", DEFAULT_BUDGET_BITS).is_err());
        assert!(CapSet::parse_text("n=2\n13\n", DEFAULT_BUDGET_BITS).is_err());
        assert!(CapSet::parse_text("n=2\n11\n11\n", DEFAULT_BUDGET_BITS).is_err());
    }

    #[test]
    fn hash_membership_under_tiny_budget() {
        let points = vec![pt(&[1, 1]), pt(&[2, 2])];
        let s = CapSet::from_points(2, points, 1).unwrap();
        assert!(s.contains(&pt(&[1, 1])));
        assert!(!s.contains(&pt(&[0, 1])));
    }
}
