//! Potential-surplus price formation.
//!
//! For a standing price `p`, the potential surplus
//!
//! ```text
//! V(p) = Σ_{v ≥ p} (v − p) + Σ_{c ≤ p} (p − c)
//! ```
//!
//! counts the gains from trade still available to buyers with values `v` and
//! sellers with costs `c`. `V` is convex and piecewise linear in `p`; its
//! slope is the number of costs at or below `p` minus the number of values
//! above it. The set where it is minimised is the competitive-equilibrium
//! interval, a generalised median of values and costs.
//!
//! Every value or cost is one unit. Multi-unit traders are represented by
//! repeating their reservation price.

use alloc::vec::Vec;
use core::cmp::Ordering;

#[cfg(feature = "serde")]
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::money::{Money, PriceGrid};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MarketError {
    #[error("population has neither buyers nor sellers")]
    EmptyPopulation,
    #[error("expectation set is empty")]
    EmptyExpectations,
    #[error("transaction log is empty")]
    EmptyLog,
}

/// Buyer reservation values and seller costs, one entry per unit.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct TraderPopulation {
    pub values: Vec<Money>,
    pub costs: Vec<Money>,
}

impl TraderPopulation {
    pub fn new(values: Vec<Money>, costs: Vec<Money>) -> Self {
        TraderPopulation { values, costs }
    }

    pub fn from_ticks(values: &[i64], costs: &[i64]) -> Self {
        TraderPopulation {
            values: values.iter().copied().map(Money::from_ticks).collect(),
            costs: costs.iter().copied().map(Money::from_ticks).collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty() && self.costs.is_empty()
    }

    /// Smallest grid covering every value and cost, or `None` when empty.
    pub fn span(&self) -> Option<PriceGrid> {
        let all = self.values.iter().chain(self.costs.iter());
        let lo = all.clone().min()?;
        let hi = all.max()?;
        PriceGrid::new(*lo, *hi).ok()
    }

    /// Every reservation shifted by `k` ticks.
    pub fn shifted(&self, k: Money) -> Self {
        TraderPopulation {
            values: self.values.iter().map(|&v| v + k).collect(),
            costs: self.costs.iter().map(|&c| c + k).collect(),
        }
    }

    /// Every reservation multiplied by `factor`.
    pub fn scaled(&self, factor: i64) -> Self {
        TraderPopulation {
            values: self.values.iter().map(|&v| v * factor).collect(),
            costs: self.costs.iter().map(|&c| c * factor).collect(),
        }
    }

    fn sorted(&self) -> SortedPopulation {
        let mut values = self.values.clone();
        let mut costs = self.costs.clone();
        values.sort_unstable();
        costs.sort_unstable();
        SortedPopulation { values, costs }
    }
}

struct SortedPopulation {
    values: Vec<Money>,
    costs: Vec<Money>,
}

impl SortedPopulation {
    /// `V(p + 1) − V(p)`, in ticks.
    fn slope(&self, p: Money) -> i64 {
        let supply = self.costs.partition_point(|&c| c <= p);
        let demand = self.values.len() - self.values.partition_point(|&v| v <= p);
        supply as i64 - demand as i64
    }
}

/// Total potential surplus `V(p)` at a standing price.
pub fn potential_surplus(p: Money, pop: &TraderPopulation) -> Money {
    let buyers: Money = pop.values.iter().filter(|&&v| v >= p).map(|&v| v - p).sum();
    let sellers: Money = pop.costs.iter().filter(|&&c| c <= p).map(|&c| p - c).sum();
    buyers + sellers
}

/// `V(p + 1) − V(p)`: supply count at `p` minus demand count above `p`.
pub fn surplus_slope(p: Money, pop: &TraderPopulation) -> i64 {
    let supply = pop.costs.iter().filter(|&&c| c <= p).count() as i64;
    let demand = pop.values.iter().filter(|&&v| v > p).count() as i64;
    supply - demand
}

/// Closed price interval `[low, high]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct PriceInterval {
    pub low: Money,
    pub high: Money,
}

impl PriceInterval {
    pub fn new(low: Money, high: Money) -> Self {
        debug_assert!(low <= high);
        PriceInterval { low, high }
    }

    /// Canonical point estimate: the midpoint rounded down.
    pub fn midpoint(&self) -> Money {
        self.low + Money::from_ticks((self.high - self.low).ticks() / 2)
    }

    pub fn contains(&self, p: Money) -> bool {
        self.low <= p && p <= self.high
    }

    pub fn width(&self) -> Money {
        self.high - self.low
    }

    /// Distance from `p` to the nearest point of the interval.
    pub fn distance(&self, p: Money) -> Money {
        if p < self.low {
            self.low - p
        } else if p > self.high {
            p - self.high
        } else {
            Money::ZERO
        }
    }
}

/// The full set of grid prices minimising [`potential_surplus`].
///
/// Found by bisection on the slope, which is non-decreasing in `p`. When one
/// side of the market is empty the minimiser is a half-line, reported clipped
/// to `grid`.
pub fn equilibrium_interval(
    pop: &TraderPopulation,
    grid: &PriceGrid,
) -> Result<PriceInterval, MarketError> {
    if pop.is_empty() {
        return Err(MarketError::EmptyPopulation);
    }
    let sorted = pop.sorted();
    let low = first_grid_price(grid, |p| sorted.slope(p) >= 0);
    let high = first_grid_price(grid, |p| sorted.slope(p) > 0);
    Ok(PriceInterval::new(low, high))
}

/// Smallest `p` in `[min, max − 1]` satisfying a monotone predicate, or `max`.
fn first_grid_price(grid: &PriceGrid, pred: impl Fn(Money) -> bool) -> Money {
    let (mut lo, mut hi) = (grid.min().ticks(), grid.max().ticks());
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(Money::from_ticks(mid)) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Money::from_ticks(lo)
}

/// Largest total surplus any allocation can realise: values sorted
/// descending are paired with costs sorted ascending while profitable.
pub fn max_extractable_surplus(pop: &TraderPopulation) -> Money {
    let sorted = pop.sorted();
    sorted
        .values
        .iter()
        .rev()
        .zip(sorted.costs.iter())
        .take_while(|(v, c)| v >= c)
        .map(|(&v, &c)| v - c)
        .sum()
}

/// Realised surplus as a fraction of [`max_extractable_surplus`].
pub fn efficiency(realized: Money, pop: &TraderPopulation) -> Option<f64> {
    let max = max_extractable_surplus(pop);
    if max == Money::ZERO {
        return None;
    }
    Some(realized.ticks() as f64 / max.ticks() as f64)
}

/// One anticipated resale price, optionally capped by what the trader can
/// pay.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Expectation {
    pub resale: Money,
    pub cash_cap: Option<Money>,
}

impl Expectation {
    pub fn new(resale: Money) -> Self {
        Expectation {
            resale,
            cash_cap: None,
        }
    }

    pub fn capped(resale: Money, cap: Money) -> Self {
        Expectation {
            resale,
            cash_cap: Some(cap),
        }
    }

    /// `min(resale, cap)`.
    pub fn effective(&self) -> Money {
        match self.cash_cap {
            Some(cap) => self.resale.min(cap),
            None => self.resale,
        }
    }
}

/// Anticipated resale prices of a purely speculative market.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct ExpectationSet {
    pub entries: Vec<Expectation>,
}

impl ExpectationSet {
    pub fn uncapped(resale: &[Money]) -> Self {
        ExpectationSet {
            entries: resale.iter().copied().map(Expectation::new).collect(),
        }
    }

    pub fn effective_prices(&self) -> Vec<Money> {
        self.entries.iter().map(Expectation::effective).collect()
    }
}

/// Speculative potential surplus: the L1 distance from `p` to the effective
/// anticipated resale prices.
pub fn speculative_surplus(p: Money, exp: &ExpectationSet) -> Money {
    exp.entries.iter().map(|e| e.effective().abs_diff(p)).sum()
}

/// Minimiser of [`speculative_surplus`]: the interval between the lower and
/// upper medians of the effective prices.
pub fn speculative_interval(exp: &ExpectationSet) -> Result<PriceInterval, MarketError> {
    let mut prices = exp.effective_prices();
    if prices.is_empty() {
        return Err(MarketError::EmptyExpectations);
    }
    let (lo, hi) = median_bounds(&mut prices, Ord::cmp);
    Ok(PriceInterval::new(lo, hi))
}

/// Lower and upper medians of `xs` (equal for odd lengths). Reorders `xs`.
///
/// # Panics
///
/// Panics if `xs` is empty.
pub fn median_bounds<T: Copy>(xs: &mut [T], mut cmp: impl FnMut(&T, &T) -> Ordering) -> (T, T) {
    let n = xs.len();
    assert!(n > 0, "median of an empty slice");
    let (_, &mut upper, _) = xs.select_nth_unstable_by(n / 2, &mut cmp);
    if n % 2 == 1 {
        return (upper, upper);
    }
    let lower = *xs[..n / 2]
        .iter()
        .max_by(|a, b| cmp(a, b))
        .expect("non-empty lower half");
    (lower, upper)
}

/// Identifier of a trader in a session.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize), serde(transparent))]
pub struct AgentId(pub u32);

/// One executed contract.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct Contract {
    pub time: u64,
    pub price: Money,
    pub buyer: AgentId,
    pub seller: AgentId,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogError {
    #[error("contract time {time} does not follow previous time {previous}")]
    NonIncreasingTime { previous: u64, time: u64 },
    #[error("contract price {0} is not positive")]
    NonPositivePrice(Money),
}

/// Time-ordered contract prices.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(Serialize, Deserialize))]
pub struct TransactionLog {
    entries: Vec<Contract>,
}

impl TransactionLog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_contracts(contracts: impl IntoIterator<Item = Contract>) -> Result<Self, LogError> {
        let mut log = TransactionLog::new();
        for c in contracts {
            log.push(c)?;
        }
        Ok(log)
    }

    /// Log of anonymous contracts at `prices`, timed 1, 2, ….
    pub fn from_prices(prices: &[Money]) -> Result<Self, LogError> {
        Self::from_contracts(prices.iter().enumerate().map(|(i, &price)| Contract {
            time: i as u64 + 1,
            price,
            buyer: AgentId(0),
            seller: AgentId(0),
        }))
    }

    pub fn push(&mut self, c: Contract) -> Result<(), LogError> {
        if let Some(last) = self.entries.last() {
            if c.time <= last.time {
                return Err(LogError::NonIncreasingTime {
                    previous: last.time,
                    time: c.time,
                });
            }
        }
        if !c.price.is_positive() {
            return Err(LogError::NonPositivePrice(c.price));
        }
        self.entries.push(c);
        Ok(())
    }

    pub fn entries(&self) -> &[Contract] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn prices(&self) -> impl Iterator<Item = Money> + '_ {
        self.entries.iter().map(|c| c.price)
    }
}

/// `V(p_t)` along a contract sequence, with every strict increase flagged.
#[derive(Clone, Debug, PartialEq)]
pub struct SurplusTrajectory {
    pub surplus: Vec<Money>,
    /// `increases[t]` is set when `V(p_{t+1}) > V(p_t)`.
    pub increases: Vec<bool>,
    /// Fraction of adjacent pairs flagged in `increases`; zero for a single
    /// contract.
    pub violation_fraction: f64,
}

impl SurplusTrajectory {
    pub fn violations(&self) -> usize {
        self.increases.iter().filter(|&&b| b).count()
    }

    pub fn last(&self) -> Money {
        *self.surplus.last().expect("trajectory is never empty")
    }
}

pub fn surplus_trajectory(
    log: &TransactionLog,
    pop: &TraderPopulation,
) -> Result<SurplusTrajectory, MarketError> {
    if log.is_empty() {
        return Err(MarketError::EmptyLog);
    }
    let surplus: Vec<Money> = log.prices().map(|p| potential_surplus(p, pop)).collect();
    let increases: Vec<bool> = surplus.windows(2).map(|w| w[1] > w[0]).collect();
    let violation_fraction = if increases.is_empty() {
        0.0
    } else {
        increases.iter().filter(|&&b| b).count() as f64 / increases.len() as f64
    };
    Ok(SurplusTrajectory {
        surplus,
        increases,
        violation_fraction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    fn m(t: i64) -> Money {
        Money::from_ticks(t)
    }

    fn grid(lo: i64, hi: i64) -> PriceGrid {
        PriceGrid::new(m(lo), m(hi)).unwrap()
    }

    // Direct enumeration of qualifying units, independent of the filtered sums.
    fn brute_surplus(p: i64, values: &[i64], costs: &[i64]) -> i64 {
        let mut total = 0;
        for &v in values {
            if v >= p {
                total += v - p;
            }
        }
        for &c in costs {
            if c <= p {
                total += p - c;
            }
        }
        total
    }

    fn brute_argmin(pop: &TraderPopulation, g: &PriceGrid) -> PriceInterval {
        let vs: Vec<i64> = g
            .iter()
            .map(|p| potential_surplus(p, pop).ticks())
            .collect();
        let best = *vs.iter().min().unwrap();
        let first = vs.iter().position(|&v| v == best).unwrap() as i64;
        let last = vs.iter().rposition(|&v| v == best).unwrap() as i64;
        PriceInterval::new(g.min() + m(first), g.min() + m(last))
    }

    #[test]
    fn potential_surplus_examples() {
        let pop = TraderPopulation::from_ticks(&[10], &[5]);
        assert_eq!(potential_surplus(m(7), &pop), m(5));
        assert_eq!(potential_surplus(m(4), &pop), m(6));
        let pop = TraderPopulation::from_ticks(&[10, 8], &[5, 7]);
        let expected = brute_surplus(7, &[10, 8], &[5, 7]);
        assert_eq!(expected, 6);
        assert_eq!(potential_surplus(m(7), &pop), m(expected));
    }

    #[test]
    fn speculative_surplus_examples() {
        let exp = ExpectationSet::uncapped(&[m(10), m(10), m(10)]);
        assert_eq!(speculative_surplus(m(10), &exp), m(0));
        let exp = ExpectationSet::uncapped(&[m(6), m(10)]);
        assert_eq!(speculative_surplus(m(8), &exp), m(4));
        let exp = ExpectationSet {
            entries: vec![Expectation::new(m(6)), Expectation::capped(m(12), m(9))],
        };
        // enumerate: clip 12 at 9, then |6 - 8| + |9 - 8|
        let oracle: i64 = [6i64, 12.min(9)].iter().map(|&e| (e - 8).abs()).sum();
        assert_eq!(oracle, 3);
        assert_eq!(speculative_surplus(m(8), &exp), m(oracle));
    }

    #[test]
    fn equilibrium_examples() {
        let g = grid(0, 20);
        let pop = TraderPopulation::from_ticks(&[10], &[5]);
        assert_eq!(
            equilibrium_interval(&pop, &g).unwrap(),
            PriceInterval::new(m(5), m(10))
        );

        let pop = TraderPopulation::from_ticks(&[10, 8], &[5, 7]);
        let brute = brute_argmin(&pop, &g);
        assert_eq!(brute, PriceInterval::new(m(7), m(8)));
        assert_eq!(equilibrium_interval(&pop, &g).unwrap(), brute);

        // no buyers: V(p) = max(0, p - 3), minimised on the half-line below 3
        let pop = TraderPopulation::from_ticks(&[], &[3]);
        let brute = brute_argmin(&pop, &g);
        assert_eq!(brute, PriceInterval::new(m(0), m(3)));
        assert_eq!(equilibrium_interval(&pop, &g).unwrap(), brute);

        // no sellers: minimised above the single value
        let pop = TraderPopulation::from_ticks(&[4], &[]);
        assert_eq!(
            equilibrium_interval(&pop, &g).unwrap(),
            PriceInterval::new(m(4), m(20))
        );

        assert_eq!(
            equilibrium_interval(&TraderPopulation::default(), &g),
            Err(MarketError::EmptyPopulation)
        );
    }

    #[test]
    fn midpoint_rounds_down() {
        assert_eq!(PriceInterval::new(m(5), m(10)).midpoint(), m(7));
        assert_eq!(PriceInterval::new(m(7), m(7)).midpoint(), m(7));
    }

    #[test]
    fn max_surplus_examples() {
        assert_eq!(
            max_extractable_surplus(&TraderPopulation::from_ticks(&[10], &[5])),
            m(5)
        );
        assert_eq!(
            max_extractable_surplus(&TraderPopulation::from_ticks(&[4], &[9])),
            m(0)
        );
        // all matchings of {10, 8} with {5, 7}, including partial ones
        let brute = [
            (10 - 5) + (8 - 7),
            (10 - 7) + (8 - 5),
            10 - 5,
            10 - 7,
            8 - 5,
            8 - 7,
        ]
        .into_iter()
        .max()
        .unwrap();
        let pop = TraderPopulation::from_ticks(&[10, 8], &[5, 7]);
        assert_eq!(max_extractable_surplus(&pop), m(brute));
        assert_eq!(brute, 6);
    }

    #[test]
    fn trajectory_examples() {
        let pop = TraderPopulation::from_ticks(&[10], &[5]);
        let t = surplus_trajectory(&TransactionLog::from_prices(&[m(9)]).unwrap(), &pop).unwrap();
        assert_eq!(t.surplus, vec![m(5)]);
        assert_eq!(t.violation_fraction, 0.0);

        let log = TransactionLog::from_prices(&[m(9), m(8), m(7)]).unwrap();
        let t = surplus_trajectory(&log, &pop).unwrap();
        assert_eq!(t.surplus, vec![m(5), m(5), m(5)]);
        assert_eq!(t.violations(), 0);

        let log = TransactionLog::from_prices(&[m(4), m(7)]).unwrap();
        let t = surplus_trajectory(&log, &pop).unwrap();
        assert_eq!(
            t.surplus,
            vec![
                m(brute_surplus(4, &[10], &[5])),
                m(brute_surplus(7, &[10], &[5]))
            ]
        );
        assert_eq!(t.surplus, vec![m(6), m(5)]);
        assert_eq!(t.violations(), 0);

        let log = TransactionLog::from_prices(&[m(7), m(12)]).unwrap();
        let t = surplus_trajectory(&log, &pop).unwrap();
        assert_eq!(t.increases, vec![true]);
        assert_eq!(t.violation_fraction, 1.0);

        assert_eq!(
            surplus_trajectory(&TransactionLog::new(), &pop),
            Err(MarketError::EmptyLog)
        );
    }

    #[test]
    fn log_enforces_order_and_positivity() {
        let c = |time, price| Contract {
            time,
            price: m(price),
            buyer: AgentId(1),
            seller: AgentId(2),
        };
        let mut log = TransactionLog::new();
        log.push(c(3, 10)).unwrap();
        assert_eq!(
            log.push(c(3, 11)),
            Err(LogError::NonIncreasingTime {
                previous: 3,
                time: 3
            })
        );
        assert_eq!(log.push(c(4, 0)), Err(LogError::NonPositivePrice(m(0))));
        assert_eq!(log.len(), 1);
    }

    #[test]
    fn median_bounds_even_and_odd() {
        let mut xs = [5, 1, 4, 2];
        assert_eq!(median_bounds(&mut xs, Ord::cmp), (2, 4));
        let mut xs = [9, 1, 4];
        assert_eq!(median_bounds(&mut xs, Ord::cmp), (4, 4));
        let mut xs = [3.0, -1.0];
        assert_eq!(median_bounds(&mut xs, f64::total_cmp), (-1.0, 3.0));
    }

    fn population() -> impl Strategy<Value = TraderPopulation> {
        (
            proptest::collection::vec(0i64..200, 0..12),
            proptest::collection::vec(0i64..200, 0..12),
        )
            .prop_map(|(v, c)| TraderPopulation::from_ticks(&v, &c))
    }

    proptest! {
        #[test]
        fn surplus_is_discretely_convex(pop in population(), p in 1i64..250) {
            let v = |q| potential_surplus(m(q), &pop).ticks();
            prop_assert!(v(p - 1) + v(p + 1) >= 2 * v(p));
        }

        #[test]
        fn slope_matches_finite_difference(pop in population(), p in 0i64..250) {
            let diff = potential_surplus(m(p + 1), &pop) - potential_surplus(m(p), &pop);
            prop_assert_eq!(diff.ticks(), surplus_slope(m(p), &pop));
        }

        #[test]
        fn surplus_scale_equivariant(pop in population(), p in 0i64..250, k in 1i64..20) {
            prop_assert_eq!(
                potential_surplus(m(p * k), &pop.scaled(k)),
                potential_surplus(m(p), &pop) * k
            );
        }

        #[test]
        fn surplus_translation_equivariant(pop in population(), p in 0i64..250, k in -100i64..100) {
            prop_assert_eq!(
                potential_surplus(m(p + k), &pop.shifted(m(k))),
                potential_surplus(m(p), &pop)
            );
        }

        #[test]
        fn interval_matches_brute_force(pop in population()) {
            prop_assume!(!pop.is_empty());
            let g = grid(0, 220);
            prop_assert_eq!(equilibrium_interval(&pop, &g).unwrap(), brute_argmin(&pop, &g));
        }

        #[test]
        fn speculative_interval_brackets_medians(raw in proptest::collection::vec(0i64..100, 1..15)) {
            let exp = ExpectationSet::uncapped(&raw.iter().copied().map(m).collect::<Vec<_>>());
            let iv = speculative_interval(&exp).unwrap();
            let mut sorted = raw.clone();
            sorted.sort_unstable();
            let n = sorted.len();
            prop_assert!(iv.contains(m(sorted[(n - 1) / 2])));
            prop_assert!(iv.contains(m(sorted[n / 2])));
            // every point of the interval attains the brute-force minimum
            let best = (0..100).map(|p| speculative_surplus(m(p), &exp)).min().unwrap();
            prop_assert_eq!(speculative_surplus(iv.low, &exp), best);
            prop_assert_eq!(speculative_surplus(iv.high, &exp), best);
        }
    }
}
