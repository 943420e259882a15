//! Heavy-hitter parameters, exact threshold fractions and reports.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::stream::Item;

const MAX_DENOMINATOR: u64 = 1_000_000_000;

/// A non-negative rational `num / den` in lowest terms.
///
/// Thresholds such as `phi * m` are compared by cross-multiplication so that
/// a count sitting exactly on a boundary is classified the same way no matter
/// how the parameter was written (`0.2` and `1/5` are the same fraction).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fraction {
    num: u64,
    den: u64,
}

impl Fraction {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 {
            return Err(Error::param("fraction", "zero denominator"));
        }
        let g = num.gcd(&den).max(1);
        Ok(Self {
            num: num / g,
            den: den / g,
        })
    }

    /// Closest fraction with denominator at most 10^9, found by walking the
    /// continued-fraction convergents of `x`. Decimal literals with up to nine
    /// fractional digits are recovered exactly.
    pub fn from_f64(x: f64) -> Result<Self> {
        if !x.is_finite() || x < 0.0 {
            return Err(Error::param(
                "fraction",
                format!("{x} is not a finite non-negative number"),
            ));
        }
        if x > u32::MAX as f64 {
            return Err(Error::param("fraction", format!("{x} too large")));
        }
        let (mut p0, mut q0, mut p1, mut q1) = (0u64, 1u64, 1u64, 0u64);
        let mut rest = x;
        loop {
            let a = rest.floor();
            let a_int = a as u64;
            let p2 = a_int.saturating_mul(p1).saturating_add(p0);
            let q2 = a_int.saturating_mul(q1).saturating_add(q0);
            if q2 > MAX_DENOMINATOR {
                break;
            }
            (p0, q0, p1, q1) = (p1, q1, p2, q2);
            let approx = p1 as f64 / q1 as f64;
            if (approx - x).abs() <= f64::EPSILON * x.max(f64::MIN_POSITIVE) {
                break;
            }
            let frac = rest - a;
            if frac <= 0.0 {
                break;
            }
            rest = 1.0 / frac;
        }
        if q1 == 0 {
            return Err(Error::param("fraction", format!("cannot approximate {x}")));
        }
        Self::new(p1, q1)
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn as_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `self - other`, or `None` when the result would be negative.
    pub fn checked_sub(&self, other: &Fraction) -> Option<Fraction> {
        let l = self.den.lcm(&other.den);
        let a = self.num as u128 * (l / self.den) as u128;
        let b = other.num as u128 * (l / other.den) as u128;
        let diff = a.checked_sub(b)?;
        let g = diff.gcd(&(l as u128)).max(1);
        Some(Fraction {
            num: u64::try_from(diff / g).ok()?,
            den: u64::try_from(l as u128 / g).ok()?,
        })
    }

    /// `self / k` for a positive integer `k`.
    pub fn div_int(&self, k: u64) -> Fraction {
        Fraction::new(self.num, self.den * k).expect("non-zero denominator")
    }

    /// Three-way comparison of `value` against `self * total`.
    pub fn cmp_scaled(&self, value: u128, total: u128) -> Ordering {
        cmp_products(value, self.den as u128, self.num as u128, total)
    }

    /// `value >= self * total`, exactly.
    pub fn reached_by(&self, value: u128, total: u128) -> bool {
        self.cmp_scaled(value, total) != Ordering::Less
    }

    /// `value > self * total`, exactly.
    pub fn exceeded_by(&self, value: u128, total: u128) -> bool {
        self.cmp_scaled(value, total) == Ordering::Greater
    }

    /// `value <= self * total`, exactly.
    pub fn bounds(&self, value: u128, total: u128) -> bool {
        self.cmp_scaled(value, total) != Ordering::Greater
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Compares `a * b` with `c * d` without overflow.
fn cmp_products(a: u128, b: u128, c: u128, d: u128) -> Ordering {
    mul_wide(a, b).cmp(&mul_wide(c, d))
}

/// Full 256-bit product as `(high, low)`.
fn mul_wide(a: u128, b: u128) -> (u128, u128) {
    const MASK: u128 = u64::MAX as u128;
    let (a_hi, a_lo) = (a >> 64, a & MASK);
    let (b_hi, b_lo) = (b >> 64, b & MASK);
    let ll = a_lo * b_lo;
    let lh = a_lo * b_hi;
    let hl = a_hi * b_lo;
    let hh = a_hi * b_hi;
    let mid = (ll >> 64) + (lh & MASK) + (hl & MASK);
    let lo = (ll & MASK) | (mid << 64);
    let hi = hh + (lh >> 64) + (hl >> 64) + (mid >> 64);
    (hi, lo)
}

/// Accuracy `epsilon` and threshold `phi` with `0 < epsilon < phi < 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HHParams {
    epsilon: f64,
    phi: f64,
    epsilon_frac: Fraction,
    phi_frac: Fraction,
}

impl HHParams {
    pub fn new(epsilon: f64, phi: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::param("epsilon", format!("{epsilon} not in (0, 1)")));
        }
        if !(phi > epsilon && phi < 1.0) {
            return Err(Error::param(
                "phi",
                format!("{phi} not in (epsilon={epsilon}, 1)"),
            ));
        }
        Ok(Self {
            epsilon,
            phi,
            epsilon_frac: Fraction::from_f64(epsilon)?,
            phi_frac: Fraction::from_f64(phi)?,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn epsilon_fraction(&self) -> Fraction {
        self.epsilon_frac
    }

    pub fn phi_fraction(&self) -> Fraction {
        self.phi_frac
    }

    /// `phi - epsilon` as an exact fraction.
    pub fn slack_fraction(&self) -> Fraction {
        self.phi_frac
            .checked_sub(&self.epsilon_frac)
            .expect("phi > epsilon is validated at construction")
    }
}

/// Reported heavy hitters with their frequency estimates.
///
/// Entries are kept sorted by estimate (descending), then by id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct HHReport {
    entries: Vec<(Item, f64)>,
}

impl HHReport {
    pub fn new(entries: impl IntoIterator<Item = (Item, f64)>) -> Self {
        let mut seen = HashSet::new();
        let mut entries: Vec<_> = entries
            .into_iter()
            .filter(|(item, _)| seen.insert(*item))
            .collect();
        entries.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        Self { entries }
    }

    pub fn entries(&self) -> &[(Item, f64)] {
        &self.entries
    }

    pub fn items(&self) -> impl Iterator<Item = Item> + '_ {
        self.entries.iter().map(|(i, _)| *i)
    }

    pub fn contains(&self, item: Item) -> bool {
        self.entries.iter().any(|(i, _)| *i == item)
    }

    pub fn estimate(&self, item: Item) -> Option<f64> {
        self.entries
            .iter()
            .find(|(i, _)| *i == item)
            .map(|(_, f)| *f)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}
