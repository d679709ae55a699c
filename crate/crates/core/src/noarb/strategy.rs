use alloc::vec;
use alloc::vec::Vec;

/// What a strategy may see when choosing `ΔH_t`: prices `p_0..p_{t−1}` and
/// dividends `d_0..d_{t−1}`. Nothing from period `t` on is reachable.
#[derive(Clone, Copy, Debug)]
pub struct History<'a> {
    prices: &'a [Vec<f64>],
    dividends: &'a [Vec<f64>],
    holdings: &'a [f64],
}

impl<'a> History<'a> {
    pub(crate) fn new(
        prices: &'a [Vec<f64>],
        dividends: &'a [Vec<f64>],
        holdings: &'a [f64],
    ) -> Self {
        debug_assert_eq!(prices.len(), dividends.len());
        History {
            prices,
            dividends,
            holdings,
        }
    }

    /// The period being decided, `t ≥ 1`.
    pub fn t(&self) -> usize {
        self.prices.len()
    }

    pub fn prices(&self) -> &'a [Vec<f64>] {
        self.prices
    }

    pub fn dividends(&self) -> &'a [Vec<f64>] {
        self.dividends
    }

    /// Holdings `H_{t−1}` carried into the period.
    pub fn holdings(&self) -> &'a [f64] {
        self.holdings
    }
}

/// A predictable trading rule.
pub trait Strategy {
    fn initial_holdings(&self, n_assets: usize) -> Vec<f64>;

    /// Writes `ΔH_t` into `trade` (zeroed on entry).
    fn trade(&mut self, history: &History<'_>, trade: &mut [f64]);
}

/// Keeps the initial position: `ΔH ≡ 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hold {
    pub initial: f64,
}

impl Strategy for Hold {
    fn initial_holdings(&self, n_assets: usize) -> Vec<f64> {
        vec![self.initial; n_assets]
    }

    fn trade(&mut self, _: &History<'_>, _: &mut [f64]) {}
}

/// Buys `size` units of an asset after its price rose over the previous
/// period, and does nothing otherwise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Momentum {
    pub initial: f64,
    pub size: f64,
}

impl Strategy for Momentum {
    fn initial_holdings(&self, n_assets: usize) -> Vec<f64> {
        vec![self.initial; n_assets]
    }

    fn trade(&mut self, history: &History<'_>, trade: &mut [f64]) {
        let p = history.prices();
        if p.len() < 2 {
            return;
        }
        let (last, before) = (&p[p.len() - 1], &p[p.len() - 2]);
        for (a, dh) in trade.iter_mut().enumerate() {
            if last[a] > before[a] {
                *dh = self.size;
            }
        }
    }
}

/// A strategy given by a closure over the history.
#[derive(Clone)]
pub struct FnStrategy<F> {
    pub initial: Vec<f64>,
    pub rule: F,
}

impl<F: FnMut(&History<'_>, &mut [f64])> Strategy for FnStrategy<F> {
    fn initial_holdings(&self, _: usize) -> Vec<f64> {
        self.initial.clone()
    }

    fn trade(&mut self, history: &History<'_>, trade: &mut [f64]) {
        (self.rule)(history, trade)
    }
}
