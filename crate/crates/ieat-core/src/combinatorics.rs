//! Binomial counts and the revolving-door combination sequence.
//!
//! The sequence `R(m, t)` of `t`-subsets of `{0, .., m-1}` is defined by
//!
//! ```text
//! R(m, t) = R(m-1, t)  followed by  reverse(R(m-1, t-1)) with m-1 added
//! ```
//!
//! Consecutive subsets differ by one element leaving and one entering, and the
//! first subset is `{0, .., t-1}`. The successor step follows Knuth's
//! Algorithm R (TAOCP 7.2.1.3); [`unrank`] gives random access into the same
//! order so enumeration can be split into independent rank ranges.

use alloc::vec::Vec;

/// `C(n, k)` in checked 64-bit arithmetic; `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u64> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = acc * u128::from(n - i) / u128::from(i + 1);
        if acc > u128::from(u64::MAX) {
            return None;
        }
    }
    Some(acc as u64)
}

/// The subset at `rank` in `R(m, t)`, as ascending element indices.
///
/// Panics if `rank >= C(m, t)` or the count does not fit in 64 bits.
pub fn unrank(mut rank: u64, m: usize, t: usize) -> Vec<usize> {
    let total = binomial(m as u64, t as u64).expect("subset count overflows u64");
    assert!(rank < total, "rank {rank} out of range for C({m}, {t}) = {total}");
    let mut out = Vec::with_capacity(t);
    let (mut m, mut t) = (m, t);
    while t > 0 {
        if m == t {
            out.extend(0..m);
            break;
        }
        let without = binomial((m - 1) as u64, t as u64).unwrap();
        if rank >= without {
            let with = binomial((m - 1) as u64, (t - 1) as u64).unwrap();
            rank = with - 1 - (rank - without);
            out.push(m - 1);
            t -= 1;
        }
        m -= 1;
    }
    out.sort_unstable();
    out
}

/// Inverse of [`unrank`]; `subset` must be ascending with elements below `m`.
pub fn rank(subset: &[usize], m: usize) -> u64 {
    // rank = offset + sign * (rank of the remaining prefix)
    let mut offset: i128 = 0;
    let mut sign: i128 = 1;
    let (mut m, mut t) = (m, subset.len());
    while t > 0 && m > t {
        if subset[t - 1] == m - 1 {
            let without = binomial((m - 1) as u64, t as u64).unwrap() as i128;
            let with = binomial((m - 1) as u64, (t - 1) as u64).unwrap() as i128;
            offset += sign * (without + with - 1);
            sign = -sign;
            t -= 1;
        }
        m -= 1;
    }
    offset as u64
}

/// A single minimal-change step: `out` leaves the subset, `inc` enters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Swap {
    pub out: usize,
    pub inc: usize,
}

/// Walks `R(m, t)` from an arbitrary starting rank.
#[derive(Debug, Clone)]
pub struct RevolvingDoor {
    // c[0..t] ascending subset, c[t] = m sentinel
    c: Vec<usize>,
    t: usize,
}

impl RevolvingDoor {
    /// Starts at the first subset `{0, .., t-1}`. Requires `1 <= t <= m`.
    pub fn new(m: usize, t: usize) -> Self {
        Self::at_rank(m, t, 0)
    }

    pub fn at_rank(m: usize, t: usize, rank: u64) -> Self {
        assert!(t >= 1 && t <= m, "need 1 <= t <= m");
        let mut c = unrank(rank, m, t);
        c.push(m);
        Self { c, t }
    }

    /// Current subset, ascending.
    pub fn current(&self) -> &[usize] {
        &self.c[..self.t]
    }

    /// Advances to the next subset and reports the exchanged elements.
    ///
    /// Returns `None` on the last subset of the sequence.
    pub fn advance(&mut self) -> Option<Swap> {
        let t = self.t;
        let c = &mut self.c;
        // Knuth's indices are 1-based: c_j is c[j - 1], c_{t+1} the sentinel.
        if t % 2 == 1 {
            if c[0] + 1 < c[1] {
                let out = c[0];
                c[0] += 1;
                return Some(Swap { out, inc: c[0] });
            }
            return self.try_decrease(2);
        }
        if c[0] > 0 {
            let out = c[0];
            c[0] -= 1;
            return Some(Swap { out, inc: c[0] });
        }
        self.try_increase(2)
    }

    // Knuth R4: here c_j = c_{j-1} + 1.
    fn try_decrease(&mut self, j: usize) -> Option<Swap> {
        if j > self.t {
            return None;
        }
        let c = &mut self.c;
        if c[j - 1] >= j {
            let out = c[j - 1];
            c[j - 1] = c[j - 2];
            c[j - 2] = j - 2;
            return Some(Swap { out, inc: j - 2 });
        }
        self.try_increase(j + 1)
    }

    // Knuth R5: here c_{j-1} = j - 2.
    fn try_increase(&mut self, j: usize) -> Option<Swap> {
        if j > self.t {
            return None;
        }
        let c = &mut self.c;
        if c[j - 1] + 1 < c[j] {
            let out = c[j - 2];
            c[j - 2] = c[j - 1];
            c[j - 1] += 1;
            return Some(Swap { out, inc: c[j - 1] });
        }
        self.try_decrease(j + 1)
    }
}
