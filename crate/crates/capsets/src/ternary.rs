//! Bit-sliced trit vectors.
//!
//! A vector over {0,1,2} of length at most 64 is stored as two bit planes:
//! bit i of `lo` is set when trit i is 1, bit i of `hi` when it is 2.
//! The planes (1,1) state never occurs in a valid vector. Componentwise
//! mod-3 addition then costs a handful of word ops and no carries can
//! cross trit boundaries.

/// Number of trits handled per chunk when converting planes to a base-3 index.
const CHUNK: usize = 8;

/// 3^k for k = 0..=40 (3^40 still fits u64).
pub(crate) const POW3: [u64; 41] = {
    let mut t = [0u64; 41];
    let mut i = 0;
    let mut p = 1u64;
    while i < 41 {
        t[i] = p;
        if i < 40 {
            p *= 3;
        }
        i += 1;
    }
    t
};

/// Maps an 8-trit plane pair (lo byte | hi byte << 8) to its base-3 value.
/// Invalid (1,1) trits map to 0; they never occur in canonical planes.
static TRI8: [u16; 1 << 16] = {
    let mut t = [0u16; 1 << 16];
    let mut key = 0usize;
    while key < (1 << 16) {
        let lo = key & 0xff;
        let hi = key >> 8;
        let mut v = 0u16;
        let mut i = CHUNK;
        while i > 0 {
            i -= 1;
            let trit = ((lo >> i) & 1) as u16 + 2 * ((hi >> i) & 1) as u16;
            v = v * 3 + if trit <= 2 { trit } else { 0 };
        }
        t[key] = v;
        key += 1;
    }
    t
};

/// Componentwise sum mod 3 of two plane pairs.
#[inline(always)]
pub(crate) fn tri_add(al: u64, ah: u64, bl: u64, bh: u64) -> (u64, u64) {
    let sl = ((al ^ bl) & !(ah | bh)) | (ah & bh);
    let sh = ((ah ^ bh) & !(al | bl)) | (al & bl);
    (sl, sh)
}

/// Componentwise negation mod 3: swaps the 1-plane and the 2-plane.
#[inline(always)]
pub(crate) fn tri_neg(lo: u64, hi: u64) -> (u64, u64) {
    (hi, lo)
}

/// The unique completion of {a, b} to a zero-sum triple: -(a + b).
#[inline(always)]
pub(crate) fn tri_third(al: u64, ah: u64, bl: u64, bh: u64) -> (u64, u64) {
    let (sl, sh) = tri_add(al, ah, bl, bh);
    tri_neg(sl, sh)
}

/// Base-3 value of the first `n` trits, trit 0 least significant.
#[inline]
pub(crate) fn planes_to_index(lo: u64, hi: u64, n: usize) -> u64 {
    debug_assert!(n <= 64);
    let mut v = 0u64;
    let chunks = n.div_ceil(CHUNK);
    for j in (0..chunks).rev() {
        let key = (((lo >> (CHUNK * j)) & 0xff) | (((hi >> (CHUNK * j)) & 0xff) << 8)) as usize;
        v = v * POW3[CHUNK] + TRI8[key] as u64;
    }
    v
}

/// Inverse of [`planes_to_index`] over n trits.
#[inline]
pub(crate) fn index_to_planes(mut idx: u64, n: usize) -> (u64, u64) {
    let mut lo = 0u64;
    let mut hi = 0u64;
    for i in 0..n {
        match idx % 3 {
            1 => lo |= 1 << i,
            2 => hi |= 1 << i,
            _ => {}
        }
        idx /= 3;
    }
    debug_assert_eq!(idx, 0, "index out of range for {n} trits");
    (lo, hi)
}

#[inline]
pub(crate) fn trit_at(lo: u64, hi: u64, i: usize) -> u8 {
    (((lo >> i) & 1) + 2 * ((hi >> i) & 1)) as u8
}

#[inline]
pub(crate) fn set_trit(lo: &mut u64, hi: &mut u64, i: usize, t: u8) {
    *lo &= !(1 << i);
    *hi &= !(1 << i);
    match t {
        1 => *lo |= 1 << i,
        2 => *hi |= 1 << i,
        _ => debug_assert_eq!(t, 0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_matches_scalar_mod3() {
        // all 9 trit pairs, replicated across word positions
        for a in 0u8..3 {
            for b in 0u8..3 {
                let (mut al, mut ah, mut bl, mut bh) = (0u64, 0u64, 0u64, 0u64);
                for i in [0usize, 7, 31, 63] {
                    set_trit(&mut al, &mut ah, i, a);
                    set_trit(&mut bl, &mut bh, i, b);
                }
                let (sl, sh) = tri_add(al, ah, bl, bh);
                for i in [0usize, 7, 31, 63] {
                    assert_eq!(trit_at(sl, sh, i), (a + b) % 3);
                }
                // untouched positions stay zero
                assert_eq!(trit_at(sl, sh, 5), 0);
            }
        }
    }

    #[test]
    fn index_round_trip() {
        for n in [1usize, 3, 8, 9, 13, 17] {
            let span = POW3[n].min(3000);
            for idx in 0..span {
                let (lo, hi) = index_to_planes(idx, n);
                assert_eq!(planes_to_index(lo, hi, n), idx);
            }
            // top of the range too
            for idx in POW3[n].saturating_sub(50)..POW3[n] {
                let (lo, hi) = index_to_planes(idx, n);
                assert_eq!(planes_to_index(lo, hi, n), idx);
            }
        }
    }

    #[test]
    fn neg_is_additive_inverse() {
        for idx in 0..POW3[5] {
            let (lo, hi) = index_to_planes(idx, 5);
            let (nl, nh) = tri_neg(lo, hi);
            let (zl, zh) = tri_add(lo, hi, nl, nh);
            assert_eq!((zl, zh), (0, 0));
        }
    }
}
