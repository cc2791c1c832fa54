//! Ackermann-style hierarchies `A(k, s)`, `B(k, s)` and their inverses.
//!
//! ```text
//! A(0, s) = 2s        A(k, 0) = 1    A(k, s) = A(k-1, A(k, s-1))
//! B(0, s) = s^2       B(k, 0) = 2    B(k, s) = B(k-1, B(k, s-1))
//! ```
//!
//! Values leave every fixed-width integer after a handful of steps, so nothing
//! here materializes them. A [`Hierarchy`] stores, for every level `k >= 1`, the
//! strictly increasing "staircase" `A(k, 0), A(k, 1), ...` up to the first entry
//! that reaches the saturation cap. Level 0 is closed form. Every query is then a
//! threshold comparison against that table.

use std::sync::OnceLock;

/// Default saturation cap for the shared tables.
pub const DEFAULT_CAP: u64 = 1 << 62;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    A,
    B,
}

impl Family {
    fn base(self) -> u64 {
        match self {
            Family::A => 1,
            Family::B => 2,
        }
    }

    fn level_zero(self, s: u64) -> u128 {
        let s = s as u128;
        match self {
            Family::A => 2 * s,
            Family::B => s * s,
        }
    }

    /// `alpha_k` reads family A for even `k`, family B for odd `k`, at level `k / 2`.
    pub fn for_alpha(k: u32) -> (Family, u32) {
        if k.is_multiple_of(2) {
            (Family::A, k / 2)
        } else {
            (Family::B, k / 2)
        }
    }
}

/// A hierarchy value relative to a cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Capped {
    Exact(u64),
    /// The true value is at least the cap.
    Saturated,
}

/// Saturating staircase tables for both families under one cap.
#[derive(Debug)]
pub struct Hierarchy {
    cap: u64,
    a: OnceLock<Vec<Vec<u64>>>,
    b: OnceLock<Vec<Vec<u64>>>,
}

impl Hierarchy {
    pub fn new(cap: u64) -> Self {
        Hierarchy { cap, a: OnceLock::new(), b: OnceLock::new() }
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    /// The process-wide table at [`DEFAULT_CAP`].
    pub fn shared() -> &'static Hierarchy {
        static SHARED: OnceLock<Hierarchy> = OnceLock::new();
        SHARED.get_or_init(|| Hierarchy::new(DEFAULT_CAP))
    }

    fn clamp(&self, v: u128) -> Capped {
        if v < self.cap as u128 {
            Capped::Exact(v as u64)
        } else {
            Capped::Saturated
        }
    }

    /// Staircases for levels 1, 2, ... of `fam`, up to the first level that
    /// repeats its predecessor; every higher level equals the last entry.
    fn stairs(&self, fam: Family) -> &[Vec<u64>] {
        let cell = match fam {
            Family::A => &self.a,
            Family::B => &self.b,
        };
        cell.get_or_init(|| {
            let mut levels: Vec<Vec<u64>> = Vec::new();
            loop {
                let prev = levels.last();
                let step = |x: u64| -> Capped {
                    match prev {
                        None => self.clamp(fam.level_zero(x)),
                        Some(stair) => match stair.get(x as usize) {
                            Some(&v) => Capped::Exact(v),
                            None => Capped::Saturated,
                        },
                    }
                };
                let mut stair = Vec::new();
                let mut x = self.clamp(fam.base() as u128);
                while let Capped::Exact(v) = x {
                    stair.push(v);
                    x = step(v);
                }
                if levels.last() == Some(&stair) {
                    break;
                }
                levels.push(stair);
            }
            levels
        })
    }

    /// `fam(k, s)` relative to the cap.
    pub fn value(&self, fam: Family, k: u32, s: u64) -> Capped {
        if k == 0 {
            return self.clamp(fam.level_zero(s));
        }
        let stairs = self.stairs(fam);
        let stair = &stairs[(k as usize - 1).min(stairs.len() - 1)];
        match usize::try_from(s).ok().and_then(|i| stair.get(i)) {
            Some(&v) => Capped::Exact(v),
            None => Capped::Saturated,
        }
    }

    /// `fam(k, s) >= target`. Requires `target <= cap`.
    pub fn reaches(&self, fam: Family, k: u32, s: u64, target: u64) -> bool {
        debug_assert!(target <= self.cap);
        match self.value(fam, k, s) {
            Capped::Exact(v) => v >= target,
            Capped::Saturated => true,
        }
    }

    /// Least `s` with `fam(k, s) >= target`. Requires `target <= cap`.
    pub fn inverse(&self, fam: Family, k: u32, target: u64) -> u64 {
        if k >= 1 {
            // Staircases are short; a linear scan ends at the saturation point.
            let mut s = 0;
            while !self.reaches(fam, k, s, target) {
                s += 1;
            }
            return s;
        }
        // Level 0 is monotone with fam(0, target) >= target.
        let (mut lo, mut hi) = (0u64, target);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if self.reaches(fam, k, mid, target) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        lo
    }
}

fn with_cap_for<R>(target: u64, f: impl FnOnce(&Hierarchy) -> R) -> R {
    if target <= DEFAULT_CAP {
        f(Hierarchy::shared())
    } else {
        f(&Hierarchy::new(target))
    }
}

/// `fam(k, s) >= target`, never computing past `target`.
pub fn threshold_reached(fam: Family, k: u32, s: u64, target: u64) -> bool {
    with_cap_for(target, |h| h.reaches(fam, k, s, target))
}

/// `alpha_k(n)`: least `s` with `A(k/2, s) >= n` for even `k`, `B(k/2, s) >= n` for odd `k`.
pub fn alpha_k(k: u32, n: u64) -> u64 {
    let (fam, level) = Family::for_alpha(k);
    with_cap_for(n, |h| h.inverse(fam, level, n))
}

/// One-parameter inverse: least `s` with `A(s, s) >= n`.
pub fn alpha_one(n: u64) -> u64 {
    with_cap_for(n, |h| {
        let mut s = 0u64;
        while !h.reaches(Family::A, u32::try_from(s).unwrap_or(u32::MAX), s, n) {
            s += 1;
        }
        s
    })
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AckermannError {
    #[error("alpha(m, n) needs m >= 1 and n >= 1 (got m = {m}, n = {n})")]
    ZeroArgument { m: u64, n: u64 },
}

/// Two-parameter inverse: least `i >= 1` with `A(i, 4 * ceil(m / n)) > log2(n)`.
///
/// For `n >= 1` and an integer `v`, `v > log2(n)` holds exactly when `v` is at
/// least the bit length of `n`, so no logarithm is ever taken.
pub fn alpha_two_param(m: u64, n: u64) -> Result<u64, AckermannError> {
    if m == 0 || n == 0 {
        return Err(AckermannError::ZeroArgument { m, n });
    }
    let arg = m.div_ceil(n).saturating_mul(4);
    let target = u64::from(u64::BITS - n.leading_zeros());
    let mut i = 1u32;
    while !threshold_reached(Family::A, i, arg, target) {
        i += 1;
    }
    Ok(u64::from(i))
}

/// `j`-fold composition of `alpha_k(k, .)` applied to `n`.
pub fn alpha_iter(k: u32, j: u32, n: u64) -> u64 {
    (0..j).fold(n, |x, _| alpha_k(k, x))
}
