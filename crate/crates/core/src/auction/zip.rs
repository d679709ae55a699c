//! Adaptive profit margins for quoting agents.
//!
//! A quote is `limit · (1 − margin)` for a bid and `limit · (1 + margin)` for
//! an ask. After each market event the margin moves a fraction `rate` of the
//! way toward a perturbed target price, smoothed by `momentum`.

use rand::Rng;

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Margin {
    pub margin: f64,
    pub rate: f64,
    pub momentum: f64,
    step: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Direction {
    Raise,
    Lower,
}

impl Margin {
    pub fn new(margin: f64, rate: f64, momentum: f64) -> Self {
        Margin {
            margin,
            rate,
            momentum,
            step: 0.0,
        }
    }

    pub fn price(&self, limit: f64, bid: bool) -> f64 {
        if bid {
            limit * (1.0 - self.margin)
        } else {
            limit * (1.0 + self.margin)
        }
    }

    /// Moves the quote toward `target` without letting the margin go negative.
    pub fn adapt(&mut self, limit: f64, bid: bool, target: f64) {
        if !(limit > 0.0) {
            return;
        }
        let p = self.price(limit, bid);
        let delta = self.rate * (target - p);
        self.step = self.momentum * self.step + (1.0 - self.momentum) * delta;
        let np = p + self.step;
        let m = if bid {
            1.0 - np / limit
        } else {
            np / limit - 1.0
        };
        self.margin = m.max(0.0);
    }

    /// Target slightly above or below the reference price `q`.
    pub fn target<R: Rng + ?Sized>(rng: &mut R, q: f64, dir: Direction) -> f64 {
        match dir {
            Direction::Raise => q * rng.random_range(1.0..1.05) + rng.random_range(0.0..0.05),
            Direction::Lower => q * rng.random_range(0.95..1.0) - rng.random_range(0.0..0.05),
        }
    }

    /// Reaction of a bidding margin to an event at price `q`.
    pub fn bid_reaction(
        quote: f64,
        q: f64,
        traded: bool,
        was_bid: bool,
        active: bool,
    ) -> Option<Direction> {
        if traded {
            if quote >= q {
                Some(Direction::Lower)
            } else if !was_bid && active {
                Some(Direction::Raise)
            } else {
                None
            }
        } else if was_bid && quote <= q && active {
            Some(Direction::Raise)
        } else {
            None
        }
    }

    /// Reaction of an asking margin to an event at price `q`.
    pub fn ask_reaction(
        quote: f64,
        q: f64,
        traded: bool,
        was_bid: bool,
        active: bool,
    ) -> Option<Direction> {
        if traded {
            if quote <= q {
                Some(Direction::Raise)
            } else if was_bid && active {
                Some(Direction::Lower)
            } else {
                None
            }
        } else if !was_bid && quote >= q && active {
            Some(Direction::Lower)
        } else {
            None
        }
    }
}
