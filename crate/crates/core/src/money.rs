//! Fixed-point currency on an integer tick grid.

use core::fmt;
use core::iter::Sum;
use core::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

#[allow(unused_imports)]
use num_traits::Float;
#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// An amount of money counted in integer ticks.
///
/// All surplus arithmetic is done on ticks, so sums never drift.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(transparent))]
pub struct Money(i64);

impl Money {
    pub const ZERO: Money = Money(0);

    pub const fn from_ticks(ticks: i64) -> Self {
        Money(ticks)
    }

    pub const fn ticks(self) -> i64 {
        self.0
    }

    pub fn abs_diff(self, other: Money) -> Money {
        Money((self.0 - other.0).abs())
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }
}

impl fmt::Display for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Add for Money {
    type Output = Money;
    fn add(self, rhs: Money) -> Money {
        Money(self.0 + rhs.0)
    }
}

impl Sub for Money {
    type Output = Money;
    fn sub(self, rhs: Money) -> Money {
        Money(self.0 - rhs.0)
    }
}

impl Neg for Money {
    type Output = Money;
    fn neg(self) -> Money {
        Money(-self.0)
    }
}

impl Mul<i64> for Money {
    type Output = Money;
    fn mul(self, rhs: i64) -> Money {
        Money(self.0 * rhs)
    }
}

impl AddAssign for Money {
    fn add_assign(&mut self, rhs: Money) {
        self.0 += rhs.0;
    }
}

impl SubAssign for Money {
    fn sub_assign(&mut self, rhs: Money) {
        self.0 -= rhs.0;
    }
}

impl Sum for Money {
    fn sum<I: Iterator<Item = Money>>(iter: I) -> Money {
        Money(iter.map(|m| m.0).sum())
    }
}

impl<'a> Sum<&'a Money> for Money {
    fn sum<I: Iterator<Item = &'a Money>>(iter: I) -> Money {
        Money(iter.map(|m| m.0).sum())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TickError {
    #[error("tick size must be at least one tick per unit")]
    ZeroTicks,
    #[error("amount {0} is not a finite number")]
    NotFinite(f64),
    #[error("amount {amount} is not a multiple of the tick 1/{ticks_per_unit}")]
    OffGrid { amount: f64, ticks_per_unit: u32 },
}

/// Conversion between display units (e.g. dollars) and ticks.
///
/// A tick is `1 / ticks_per_unit` of a unit; the default is one cent.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct TickSize {
    ticks_per_unit: u32,
}

impl Default for TickSize {
    fn default() -> Self {
        TickSize {
            ticks_per_unit: 100,
        }
    }
}

impl TickSize {
    pub fn new(ticks_per_unit: u32) -> Result<Self, TickError> {
        if ticks_per_unit == 0 {
            return Err(TickError::ZeroTicks);
        }
        Ok(TickSize { ticks_per_unit })
    }

    pub fn ticks_per_unit(self) -> u32 {
        self.ticks_per_unit
    }

    pub fn to_units(self, m: Money) -> f64 {
        m.ticks() as f64 / self.ticks_per_unit as f64
    }

    /// Converts an amount in units to ticks; the amount must sit on the grid
    /// up to floating-point representation error.
    pub fn from_units(self, amount: f64) -> Result<Money, TickError> {
        if !amount.is_finite() {
            return Err(TickError::NotFinite(amount));
        }
        let scaled = amount * self.ticks_per_unit as f64;
        let rounded = scaled.round();
        if (scaled - rounded).abs() > 1e-6 * rounded.abs().max(1.0) {
            return Err(TickError::OffGrid {
                amount,
                ticks_per_unit: self.ticks_per_unit,
            });
        }
        Ok(Money::from_ticks(rounded as i64))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("price grid lower bound {min} exceeds upper bound {max}")]
pub struct GridError {
    pub min: Money,
    pub max: Money,
}

/// Closed range of admissible prices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct PriceGrid {
    min: Money,
    max: Money,
}

impl PriceGrid {
    pub fn new(min: Money, max: Money) -> Result<Self, GridError> {
        if min > max {
            return Err(GridError { min, max });
        }
        Ok(PriceGrid { min, max })
    }

    pub fn min(&self) -> Money {
        self.min
    }

    pub fn max(&self) -> Money {
        self.max
    }

    pub fn contains(&self, p: Money) -> bool {
        self.min <= p && p <= self.max
    }

    pub fn clamp(&self, p: Money) -> Money {
        p.clamp(self.min, self.max)
    }

    pub fn iter(&self) -> impl Iterator<Item = Money> {
        (self.min.ticks()..=self.max.ticks()).map(Money::from_ticks)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tick_round_trip() {
        let cents = TickSize::default();
        assert_eq!(cents.from_units(10.0).unwrap(), Money::from_ticks(1000));
        assert_eq!(cents.from_units(0.07).unwrap(), Money::from_ticks(7));
        assert_eq!(cents.to_units(Money::from_ticks(1234)), 12.34);
        assert!(matches!(
            cents.from_units(0.001),
            Err(TickError::OffGrid { .. })
        ));
        assert!(TickSize::new(0).is_err());
    }

    #[test]
    fn grid_rejects_inverted_bounds() {
        assert!(PriceGrid::new(Money::from_ticks(5), Money::from_ticks(4)).is_err());
        let g = PriceGrid::new(Money::ZERO, Money::from_ticks(3)).unwrap();
        assert_eq!(g.iter().count(), 4);
        assert_eq!(g.clamp(Money::from_ticks(9)), Money::from_ticks(3));
    }
}
