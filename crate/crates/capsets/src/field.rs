//! Exact arithmetic in F_{3^m}.
//!
//! Elements are identified with their canonical integer encoding: the base-3
//! value of the coefficient vector in the polynomial basis, constant term as
//! the least significant digit. The modulus is the lexicographically smallest
//! monic irreducible of its degree (ordering coefficient vectors as base-3
//! integers), so every context is reproducible from `m` alone.
//!
//! Multiplication goes through discrete log/exp tables when `3^m` is small
//! enough to afford them, and through polynomial arithmetic otherwise. The
//! two paths are cross-checked in the test suite.

use crate::error::{Error, Result};
use crate::ternary::{self, POW3};
use serde::{Deserialize, Serialize};

/// Largest supported extension degree. Encodings must fit `u32` and products
/// of two polynomials must fit the 64-trit planes.
pub const MAX_M: u32 = 20;

/// Build log/exp tables when q is at or below this (3^16).
pub const TABLE_LIMIT: u64 = POW3[16];

/// An element of F_{3^m}, stored as its canonical encoding in `[0, 3^m)`.
///
/// Ordering and equality follow the encoding, so "smallest element" always
/// means smallest canonical encoding.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElement(pub u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    #[inline]
    pub fn encoding(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Serializable description of a field context, recorded in output files so
/// results can be reproduced against the same basis.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FieldContext {
    pub m: u32,
    /// Modulus digits, constant term first, length m+1, leading digit 1.
    pub modulus: Vec<u8>,
    pub generator: u32,
}

/// Arithmetic context for F_{3^m}: modulus, generator and optional
/// discrete-log tables. Immutable after construction and freely shareable
/// across threads.
pub struct FieldParams {
    m: u32,
    q: u64,
    modulus: Vec<u8>,
    /// t^{m+i} mod modulus for i in 0..m-1, as trit planes of degree < m.
    red: Vec<(u64, u64)>,
    generator: FieldElement,
    /// exp[i] = generator^i for i in 0..q-1.
    exp: Option<Vec<u32>>,
    /// log[e] = i with generator^i = e; log[0] is a sentinel.
    log: Option<Vec<u32>>,
}

// ---------------------------------------------------------------------------
// polynomial arithmetic over F_3 on trit planes (context-free helpers)
// ---------------------------------------------------------------------------

#[inline]
fn pdeg(lo: u64, hi: u64) -> Option<u32> {
    let occ = lo | hi;
    if occ == 0 {
        None
    } else {
        Some(63 - occ.leading_zeros())
    }
}

/// Product of two polynomials given as trit planes; degrees must sum below 64.
fn pmul(al: u64, ah: u64, bl: u64, bh: u64) -> (u64, u64) {
    let (mut rl, mut rh) = (0u64, 0u64);
    let mut occ = bl | bh;
    while occ != 0 {
        let i = occ.trailing_zeros();
        occ &= occ - 1;
        let (sl, sh) = if (bl >> i) & 1 == 1 {
            (al << i, ah << i)
        } else {
            // trit 2: add -a shifted
            (ah << i, al << i)
        };
        let (nl, nh) = ternary::tri_add(rl, rh, sl, sh);
        rl = nl;
        rh = nh;
    }
    (rl, rh)
}

/// Remainder of a modulo b (b nonzero), on trit planes.
fn prem(mut al: u64, mut ah: u64, bl: u64, bh: u64) -> (u64, u64) {
    let db = pdeg(bl, bh).expect("division by zero polynomial");
    let lead_b = ternary::trit_at(bl, bh, db as usize);
    while let Some(da) = pdeg(al, ah) {
        if da < db {
            break;
        }
        let lead_a = ternary::trit_at(al, ah, da as usize);
        // factor = lead_a / lead_b; in F_3, inv(1)=1 and inv(2)=2
        let factor = (lead_a * lead_b) % 3;
        let shift = da - db;
        // subtract factor * b * t^shift:  -1*b = neg(b), -2*b = b
        let (sl, sh) = if factor == 1 {
            (bh << shift, bl << shift)
        } else {
            (bl << shift, bh << shift)
        };
        let (nl, nh) = ternary::tri_add(al, ah, sl, sh);
        al = nl;
        ah = nh;
    }
    (al, ah)
}

fn poly_is_irreducible(pl: u64, ph: u64) -> bool {
    let Some(d) = pdeg(pl, ph) else { return false };
    if d == 0 {
        return false;
    }
    for dd in 1..=d / 2 {
        for k in 0..POW3[dd as usize] {
            let (kl, kh) = ternary::index_to_planes(k, dd as usize);
            let (divl, divh) = (kl | (1 << dd), kh);
            let (rl, rh) = prem(pl, ph, divl, divh);
            if rl == 0 && rh == 0 {
                return false;
            }
        }
    }
    true
}

/// The lexicographically smallest monic irreducible polynomial of degree m
/// over F_3, as a digit vector of length m+1 with the constant term first.
///
/// Low-degree coefficient vectors (constant term last) are ordered as base-3
/// integers, so the scan tries t^m, t^m+1, t^m+2, t^m+t, ... in turn.
pub fn find_irreducible(m: u32) -> Vec<u8> {
    assert!(m >= 1 && m <= MAX_M, "degree out of range");
    for k in 0..POW3[m as usize] {
        let (kl, kh) = ternary::index_to_planes(k, m as usize);
        let (pl, ph) = (kl | (1 << m), kh);
        if m == 1 || poly_is_irreducible(pl, ph) {
            let mut digits = Vec::with_capacity(m as usize + 1);
            for i in 0..=m as usize {
                digits.push(ternary::trit_at(pl, ph, i));
            }
            return digits;
        }
    }
    unreachable!("irreducible polynomials exist in every degree");
}

fn factorize(mut v: u64) -> Vec<u64> {
    let mut primes = Vec::new();
    let mut p = 2u64;
    while p * p <= v {
        if v % p == 0 {
            primes.push(p);
            while v % p == 0 {
                v /= p;
            }
        }
        p += 1;
    }
    if v > 1 {
        primes.push(v);
    }
    primes
}

impl FieldParams {
    /// Field context for F_{3^m} with the deterministic modulus and
    /// generator; log/exp tables are built when q ≤ 3^16.
    pub fn new(m: u32) -> Result<FieldParams> {
        Self::with_table_limit(m, TABLE_LIMIT)
    }

    /// Like [`FieldParams::new`] but never builds tables. Useful for
    /// exercising the polynomial fallback path.
    pub fn new_tableless(m: u32) -> Result<FieldParams> {
        Self::with_table_limit(m, 0)
    }

    pub fn with_table_limit(m: u32, table_limit: u64) -> Result<FieldParams> {
        if m < 1 || m > MAX_M {
            return Err(Error::DegreeOutOfRange { m, max: MAX_M });
        }
        let q = POW3[m as usize];
        let modulus = find_irreducible(m);

        // reduction rows: t^{m+i} mod modulus
        let (mut modl, mut modh) = (0u64, 0u64);
        for (i, &d) in modulus.iter().enumerate() {
            ternary::set_trit(&mut modl, &mut modh, i, d);
        }
        let low_mask = (1u64 << m) - 1;
        // t^m = -(low part of modulus)
        let mut red = Vec::with_capacity((m as usize).saturating_sub(1).max(1));
        let r0 = ternary::tri_neg(modl & low_mask, modh & low_mask);
        red.push(r0);
        for _ in 1..m {
            let (pl, ph) = *red.last().unwrap();
            let (sl, sh) = (pl << 1, ph << 1);
            let top = ternary::trit_at(sl, sh, m as usize);
            let (mut rl, mut rh) = (sl & low_mask, sh & low_mask);
            if top != 0 {
                let (al, ah) = if top == 1 { red[0] } else { ternary::tri_neg(red[0].0, red[0].1) };
                let (nl, nh) = ternary::tri_add(rl, rh, al, ah);
                rl = nl;
                rh = nh;
            }
            red.push((rl, rh));
        }

        let mut field = FieldParams {
            m,
            q,
            modulus,
            red,
            generator: FieldElement(0),
            exp: None,
            log: None,
        };

        field.generator = field.find_generator();

        if q <= table_limit && q > 1 {
            field.build_tables();
        }
        Ok(field)
    }

    fn find_generator(&self) -> FieldElement {
        let order = self.q - 1;
        let primes = factorize(order);
        for enc in 1..self.q {
            let cand = FieldElement(enc as u32);
            let full = primes
                .iter()
                .all(|&p| self.pow_poly(cand, order / p) != FieldElement::ONE);
            if full {
                return cand;
            }
        }
        unreachable!("F_q^* is cyclic");
    }

    fn build_tables(&mut self) {
        let q = self.q as usize;
        let mut exp = vec![0u32; q - 1];
        let mut log = vec![u32::MAX; q];
        let (gl, gh) = self.planes_of(self.generator);
        let (mut xl, mut xh) = (1u64, 0u64);
        for i in 0..q - 1 {
            let e = ternary::planes_to_index(xl, xh, self.m as usize) as u32;
            exp[i] = e;
            log[e as usize] = i as u32;
            let (nl, nh) = self.mulmod_planes(xl, xh, gl, gh);
            xl = nl;
            xh = nh;
        }
        debug_assert_eq!(ternary::planes_to_index(xl, xh, self.m as usize), 1);
        self.exp = Some(exp);
        self.log = Some(log);
    }

    #[inline]
    pub fn m(&self) -> u32 {
        self.m
    }

    #[inline]
    pub fn q(&self) -> u64 {
        self.q
    }

    #[inline]
    pub fn generator(&self) -> FieldElement {
        self.generator
    }

    pub fn has_tables(&self) -> bool {
        self.exp.is_some()
    }

    /// Modulus digits, constant term first, length m+1.
    pub fn modulus(&self) -> &[u8] {
        &self.modulus
    }

    pub fn context(&self) -> FieldContext {
        FieldContext {
            m: self.m,
            modulus: self.modulus.clone(),
            generator: self.generator.0,
        }
    }

    /// Element with the given canonical encoding.
    pub fn element(&self, enc: u64) -> Result<FieldElement> {
        if enc < self.q {
            Ok(FieldElement(enc as u32))
        } else {
            Err(Error::Parse(format!(
                "encoding {enc} out of range for F_3^{}",
                self.m
            )))
        }
    }

    pub fn iter_elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(|e| FieldElement(e as u32))
    }

    pub fn iter_units(&self) -> impl Iterator<Item = FieldElement> {
        (1..self.q).map(|e| FieldElement(e as u32))
    }

    /// Coefficient vector of x, constant term first, length m.
    pub fn coeffs(&self, x: FieldElement) -> Vec<u8> {
        let mut v = Vec::with_capacity(self.m as usize);
        let mut e = x.0;
        for _ in 0..self.m {
            v.push((e % 3) as u8);
            e /= 3;
        }
        v
    }

    #[inline]
    fn planes_of(&self, x: FieldElement) -> (u64, u64) {
        ternary::index_to_planes(x.0 as u64, self.m as usize)
    }

    #[inline]
    fn from_planes(&self, lo: u64, hi: u64) -> FieldElement {
        FieldElement(ternary::planes_to_index(lo, hi, self.m as usize) as u32)
    }

    fn mulmod_planes(&self, al: u64, ah: u64, bl: u64, bh: u64) -> (u64, u64) {
        let (mut rl, mut rh) = pmul(al, ah, bl, bh);
        let m = self.m as usize;
        if let Some(d) = pdeg(rl, rh) {
            let mut i = d as usize;
            while i >= m {
                let t = ternary::trit_at(rl, rh, i);
                if t != 0 {
                    ternary::set_trit(&mut rl, &mut rh, i, 0);
                    let (el, eh) = self.red[i - m];
                    let (sl, sh) = if t == 1 { (el, eh) } else { (eh, el) };
                    let (nl, nh) = ternary::tri_add(rl, rh, sl, sh);
                    rl = nl;
                    rh = nh;
                }
                if i == 0 {
                    break;
                }
                i -= 1;
            }
        }
        (rl, rh)
    }

    // ---------------- arithmetic ----------------

    #[inline]
    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let (al, ah) = self.planes_of(a);
        let (bl, bh) = self.planes_of(b);
        let (sl, sh) = ternary::tri_add(al, ah, bl, bh);
        self.from_planes(sl, sh)
    }

    #[inline]
    pub fn neg(&self, a: FieldElement) -> FieldElement {
        let (al, ah) = self.planes_of(a);
        self.from_planes(ah, al)
    }

    #[inline]
    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.is_zero() || b.is_zero() {
            return FieldElement::ZERO;
        }
        match (&self.exp, &self.log) {
            (Some(exp), Some(log)) => {
                let s = log[a.0 as usize] as u64 + log[b.0 as usize] as u64;
                FieldElement(exp[(s % (self.q - 1)) as usize])
            }
            _ => {
                let (al, ah) = self.planes_of(a);
                let (bl, bh) = self.planes_of(b);
                let (rl, rh) = self.mulmod_planes(al, ah, bl, bh);
                self.from_planes(rl, rh)
            }
        }
    }

    /// Multiplicative inverse; inversion of zero is an error, never a value.
    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.is_zero() {
            return Err(Error::InvertZero { m: self.m });
        }
        match (&self.exp, &self.log) {
            (Some(exp), Some(log)) => {
                let l = log[a.0 as usize] as u64;
                Ok(FieldElement(exp[((self.q - 1 - l) % (self.q - 1)) as usize]))
            }
            _ => Ok(self.pow_poly(a, self.q - 2)),
        }
    }

    fn pow_poly(&self, a: FieldElement, mut e: u64) -> FieldElement {
        if a.is_zero() {
            return if e == 0 { FieldElement::ONE } else { FieldElement::ZERO };
        }
        let (mut bl, mut bh) = self.planes_of(a);
        let (mut rl, mut rh) = (1u64, 0u64);
        while e > 0 {
            if e & 1 == 1 {
                let (nl, nh) = self.mulmod_planes(rl, rh, bl, bh);
                rl = nl;
                rh = nh;
            }
            e >>= 1;
            if e > 0 {
                let (nl, nh) = self.mulmod_planes(bl, bh, bl, bh);
                bl = nl;
                bh = nh;
            }
        }
        self.from_planes(rl, rh)
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        if a.is_zero() {
            return if e == 0 { FieldElement::ONE } else { FieldElement::ZERO };
        }
        match (&self.exp, &self.log) {
            (Some(exp), Some(log)) => {
                let l = log[a.0 as usize] as u64;
                let r = (l * (e % (self.q - 1))) % (self.q - 1);
                FieldElement(exp[r as usize])
            }
            _ => self.pow_poly(a, e),
        }
    }

    /// x ↦ x^(3^(j mod m)); frobenius(x, m) = x.
    pub fn frobenius(&self, a: FieldElement, j: i64) -> FieldElement {
        let jm = j.rem_euclid(self.m as i64) as u32;
        if jm == 0 || a.is_zero() || a == FieldElement::ONE {
            return a;
        }
        match (&self.exp, &self.log) {
            (Some(exp), Some(log)) => {
                // 3^jm mod (q-1), then one table exponentiation
                let mut e = 1u64;
                for _ in 0..jm {
                    e = (e * 3) % (self.q - 1);
                }
                let l = log[a.0 as usize] as u64;
                FieldElement(exp[((l * e) % (self.q - 1)) as usize])
            }
            _ => {
                let mut x = a;
                for _ in 0..jm {
                    x = self.pow_poly(x, 3);
                }
                x
            }
        }
    }

    /// Quadratic character: 0 on zero, +1 on nonzero squares, -1 otherwise.
    pub fn chi(&self, a: FieldElement) -> i8 {
        if a.is_zero() {
            return 0;
        }
        match &self.log {
            Some(log) => {
                if log[a.0 as usize] & 1 == 0 {
                    1
                } else {
                    -1
                }
            }
            None => {
                if self.pow_poly(a, (self.q - 1) / 2) == FieldElement::ONE {
                    1
                } else {
                    -1
                }
            }
        }
    }

    /// Square root when one exists, choosing the root with the smaller
    /// canonical encoding; `None` exactly when chi(a) = -1.
    pub fn sqrt(&self, a: FieldElement) -> Option<FieldElement> {
        if a.is_zero() {
            return Some(FieldElement::ZERO);
        }
        let r = match (&self.exp, &self.log) {
            (Some(exp), Some(log)) => {
                let l = log[a.0 as usize] as u64;
                if l & 1 == 1 {
                    return None;
                }
                FieldElement(exp[(l / 2) as usize])
            }
            _ => {
                if self.chi(a) == -1 {
                    return None;
                }
                self.tonelli_shanks(a)
            }
        };
        let r2 = self.neg(r);
        Some(if r2 < r { r2 } else { r })
    }

    fn tonelli_shanks(&self, a: FieldElement) -> FieldElement {
        let mut s = 0u32;
        let mut t = self.q - 1;
        while t % 2 == 0 {
            t /= 2;
            s += 1;
        }
        let z = self.find_nonsquare();
        let mut c = self.pow_poly(z, t);
        let mut x = self.pow_poly(a, t);
        let mut r = self.pow_poly(a, (t + 1) / 2);
        let mut mexp = s;
        while x != FieldElement::ONE {
            let mut i = 0;
            let mut probe = x;
            while probe != FieldElement::ONE {
                probe = self.mul(probe, probe);
                i += 1;
            }
            let mut b = c;
            for _ in 0..mexp - i - 1 {
                b = self.mul(b, b);
            }
            mexp = i;
            c = self.mul(b, b);
            x = self.mul(x, c);
            r = self.mul(r, b);
        }
        debug_assert_eq!(self.mul(r, r), a);
        r
    }

    /// The nonzero non-square with the smallest canonical encoding.
    pub fn find_nonsquare(&self) -> FieldElement {
        for enc in 1..self.q {
            let x = FieldElement(enc as u32);
            if match &self.log {
                Some(log) => log[enc as usize] & 1 == 1,
                None => self.pow_poly(x, (self.q - 1) / 2) != FieldElement::ONE,
            } {
                return x;
            }
        }
        unreachable!("half of the units are non-squares");
    }

    /// Discrete log base the generator; `None` for zero.
    pub fn log_of(&self, a: FieldElement) -> Option<u64> {
        if a.is_zero() {
            return None;
        }
        if let Some(log) = &self.log {
            return Some(log[a.0 as usize] as u64);
        }
        let mut x = FieldElement::ONE;
        for i in 0..self.q - 1 {
            if x == a {
                return Some(i);
            }
            x = self.mul(x, self.generator);
        }
        None
    }
}

/// A field homomorphism F_{3^(m/2)} → F_{3^m} between contexts built with
/// the deterministic moduli of this module.
///
/// Among the m/2 embeddings, the one mapping the subfield generator to the
/// image with the smallest canonical encoding is selected, so the map is
/// reproducible.
pub struct SubfieldEmbedding<'a> {
    big: &'a FieldParams,
    sub: &'a FieldParams,
    /// Powers of the image of the subfield's basis element t.
    tau_powers: Vec<FieldElement>,
}

impl<'a> SubfieldEmbedding<'a> {
    pub fn new(big: &'a FieldParams, sub: &'a FieldParams) -> Result<Self> {
        if big.m() % 2 != 0 {
            return Err(Error::OddDegree { m: big.m() });
        }
        if sub.m() * 2 != big.m() {
            return Err(Error::DegreeOutOfRange {
                m: sub.m(),
                max: big.m() / 2,
            });
        }
        let h = sub.m();

        // minimal polynomial of the subfield generator over F_3, computed
        // from its Frobenius conjugates inside the subfield
        let g = sub.generator();
        let mut minpoly = vec![FieldElement::ONE]; // coefficients, constant last
        for j in 0..h {
            let conj = sub.frobenius(g, j as i64);
            // multiply running product by (X - conj)
            let mut next = vec![FieldElement::ZERO; minpoly.len() + 1];
            for (i, &c) in minpoly.iter().enumerate() {
                next[i] = sub.add(next[i], sub.mul(c, sub.neg(conj)));
                next[i + 1] = sub.add(next[i + 1], c);
            }
            minpoly = next;
        }
        let coeffs: Vec<FieldElement> = minpoly
            .iter()
            .map(|c| {
                debug_assert!(c.0 < 3, "minimal polynomial has prime-field coefficients");
                FieldElement(c.0)
            })
            .collect();

        // roots live among the elements of multiplicative order dividing
        // q_sub - 1, i.e. powers of eta = g_big^((q_big-1)/(q_sub-1))
        let cof = (big.q() - 1) / (sub.q() - 1);
        let eta = big.pow(big.generator(), cof);
        let eval = |x: FieldElement| -> FieldElement {
            let mut acc = FieldElement::ZERO;
            for &c in coeffs.iter().rev() {
                acc = big.add(big.mul(acc, x), c);
            }
            acc
        };
        let mut root = None;
        let mut x = FieldElement::ONE;
        for _ in 0..sub.q() - 1 {
            if eval(x).is_zero() {
                root = Some(x);
                break;
            }
            x = big.mul(x, eta);
        }
        let r0 = root.expect("minimal polynomial splits in the quadratic extension");
        // all h roots are Frobenius conjugates; take the smallest image
        let gamma = (0..h)
            .map(|j| big.frobenius(r0, j as i64))
            .min()
            .unwrap();

        let tau = if h == 1 {
            FieldElement::ONE
        } else {
            let k0 = sub.log_of(FieldElement(3)).expect("t is a unit");
            big.pow(gamma, k0)
        };
        let mut tau_powers = Vec::with_capacity(h as usize);
        let mut p = FieldElement::ONE;
        for _ in 0..h {
            tau_powers.push(p);
            p = big.mul(p, tau);
        }
        Ok(SubfieldEmbedding {
            big,
            sub,
            tau_powers,
        })
    }

    pub fn embed(&self, y: FieldElement) -> FieldElement {
        debug_assert!((y.0 as u64) < self.sub.q());
        let mut acc = FieldElement::ZERO;
        let mut e = y.0;
        for i in 0..self.sub.m() as usize {
            let d = e % 3;
            e /= 3;
            if d != 0 {
                let mut term = self.tau_powers[i];
                if d == 2 {
                    term = self.big.neg(term);
                }
                acc = self.big.add(acc, term);
            }
        }
        acc
    }
}
