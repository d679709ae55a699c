use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;

use super::zip::Margin;
use super::{Account, DaConfig, SessionOutcome, TradeKind, UnitLedger, UnitSource, UnitUse};
use crate::market::{AgentId, Contract, TraderPopulation, TransactionLog};
use crate::money::Money;
use crate::rng::{self, SimRng, MAIN_STREAM, SPECULATION_STREAM};
use crate::speculative::TrendRule;

struct Agent {
    buyer: bool,
    reservation: Money,
    remaining: u32,
    base: Margin,
    spec_bid: Margin,
    spec_ask: Margin,
    weights: Vec<f64>,
    bid_limit: Option<Money>,
    ask_limit: Option<Money>,
    inventory: u32,
    account: Account,
}

#[derive(Clone, Copy)]
struct Quote {
    price: Money,
    agent: usize,
}

#[derive(Clone, Copy)]
struct Event {
    price: f64,
    was_bid: bool,
    traded: bool,
}

struct Speculation<'a> {
    rule: &'a TrendRule,
    rng: SimRng,
}

struct Session<'a> {
    config: &'a DaConfig,
    agents: Vec<Agent>,
    spec: Option<Speculation<'a>>,
    bid: Option<Quote>,
    ask: Option<Quote>,
    log: TransactionLog,
    periods: Vec<u32>,
    kinds: Vec<TradeKind>,
    returns: Vec<f64>,
    ledger: UnitLedger,
}

fn draw<R: Rng + ?Sized>(rng: &mut R, (low, high): (f64, f64)) -> f64 {
    if low < high {
        rng.random_range(low..high)
    } else {
        low
    }
}

/// The tick a margin price is quoted at: bids round down, asks up.
fn rounded(price: f64, bid: bool) -> f64 {
    if bid {
        price.floor()
    } else {
        price.ceil()
    }
}

pub(super) fn run(
    config: &DaConfig,
    pop: &TraderPopulation,
    spec: Option<(Money, &TrendRule)>,
) -> SessionOutcome {
    let mut rng: SimRng = rng::stream(config.seed, MAIN_STREAM);
    let mut spec = spec.map(|(cash, rule)| {
        (
            cash,
            Speculation {
                rule,
                rng: rng::stream(config.seed, SPECULATION_STREAM),
            },
        )
    });

    let roles = pop
        .values
        .iter()
        .map(|&v| (true, v))
        .chain(pop.costs.iter().map(|&c| (false, c)));
    let mut agents = Vec::with_capacity(pop.values.len() + pop.costs.len());
    for (buyer, reservation) in roles {
        let base = Margin::new(
            config.initial_margin,
            draw(&mut rng, config.concession_rate),
            draw(&mut rng, config.momentum),
        );
        let mut agent = Agent {
            buyer,
            reservation,
            remaining: 0,
            base,
            spec_bid: base,
            spec_ask: base,
            weights: Vec::new(),
            bid_limit: None,
            ask_limit: None,
            inventory: 0,
            account: Account::default(),
        };
        if let Some((cash, s)) = spec.as_mut() {
            let r = &mut s.rng;
            agent.spec_bid = Margin::new(
                config.initial_margin,
                draw(r, config.concession_rate),
                draw(r, config.momentum),
            );
            agent.spec_ask = Margin::new(
                config.initial_margin,
                draw(r, config.concession_rate),
                draw(r, config.momentum),
            );
            agent.weights = s.rule.draw_weights(r);
            agent.account.cash = *cash;
        }
        agents.push(agent);
    }

    let mut session = Session {
        config,
        agents,
        spec: spec.map(|(_, s)| s),
        bid: None,
        ask: None,
        log: TransactionLog::new(),
        periods: Vec::new(),
        kinds: Vec::new(),
        returns: Vec::new(),
        ledger: UnitLedger::default(),
    };
    session.play(&mut rng);

    let buyers = pop.values.len();
    SessionOutcome {
        log: session.log,
        periods: session.periods,
        kinds: session.kinds,
        ledger: session.ledger,
        accounts: session.agents.iter().map(|a| a.account).collect(),
        buyers,
    }
}

impl Session<'_> {
    fn play(&mut self, rng: &mut SimRng) {
        let steps = self.config.steps_per_period;
        let units = self.config.units;
        let mut active = Vec::with_capacity(self.agents.len());
        for period in 0..self.config.periods {
            for a in self.agents.iter_mut() {
                a.remaining = units;
                if !a.buyer {
                    self.ledger.endowed += u64::from(units);
                    self.ledger.with_sellers += u64::from(units);
                }
            }
            self.bid = None;
            self.ask = None;
            for step in 0..steps {
                let time = (period * steps + step + 1) as u64;
                active.clear();
                active.extend((0..self.agents.len()).filter(|&i| self.can_act(i)));
                if active.is_empty() {
                    break;
                }
                let i = active[rng.random_range(0..active.len())];
                if let Some(ev) = self.act(i, time, period as u32) {
                    self.adapt(rng, ev);
                }
                debug_assert!(self.ledger.balanced());
            }
            for a in self.agents.iter_mut() {
                if !a.buyer {
                    self.ledger.expired += u64::from(a.remaining);
                    self.ledger.with_sellers -= u64::from(a.remaining);
                }
                a.remaining = 0;
            }
            debug_assert!(self.ledger.balanced());
        }
        for a in self.agents.iter_mut() {
            self.ledger.expired += u64::from(a.inventory);
            self.ledger.inventory -= u64::from(a.inventory);
            a.inventory = 0;
        }
        debug_assert!(self.ledger.balanced());
    }

    fn can_speculate_buy(&self, a: &Agent) -> bool {
        self.spec.is_some() && !self.log.is_empty() && a.account.cash >= self.config.grid.min()
    }

    fn can_act(&self, i: usize) -> bool {
        let a = &self.agents[i];
        a.remaining > 0 || a.inventory > 0 || self.can_speculate_buy(a)
    }

    /// Anticipated resale price, clamped to the grid.
    fn expectation(&mut self, i: usize) -> Option<f64> {
        let spec = self.spec.as_mut()?;
        let last = self.log.entries().last()?.price.ticks() as f64;
        let a = &mut self.agents[i];
        if spec.rule.redraw {
            a.weights = spec.rule.draw_weights(&mut spec.rng);
        }
        let rho = spec.rule.extrapolate(&a.weights, &self.returns) + spec.rule.noise(&mut spec.rng);
        let pe = last * (1.0 + rho);
        let (lo, hi) = (
            self.config.grid.min().ticks() as f64,
            self.config.grid.max().ticks() as f64,
        );
        Some(if pe.is_nan() { lo } else { pe.clamp(lo, hi) })
    }

    fn act(&mut self, i: usize, time: u64, period: u32) -> Option<Event> {
        let grid = self.config.grid;
        let speculate_buy = self.can_speculate_buy(&self.agents[i]);
        let pe = if speculate_buy || self.agents[i].inventory > 0 {
            self.expectation(i)
        } else {
            None
        };
        let a = &mut self.agents[i];

        let mut bid_q: Option<Money> = None;
        let mut ask_q: Option<Money> = None;
        if a.buyer && a.remaining > 0 {
            let v = a.reservation;
            let q = Money::from_ticks(a.base.price(v.ticks() as f64, true).floor() as i64);
            bid_q = Some(q.clamp(grid.min(), v));
        }
        if !a.buyer && a.remaining > 0 {
            let c = a.reservation;
            let q = Money::from_ticks(a.base.price(c.ticks() as f64, false).ceil() as i64);
            ask_q = Some(q.clamp(c, grid.max()));
        }
        if let Some(pe) = pe {
            a.bid_limit = None;
            a.ask_limit = None;
            if speculate_buy {
                let limit = Money::from_ticks(pe.floor() as i64).min(a.account.cash);
                if limit >= grid.min() {
                    a.bid_limit = Some(limit);
                    let q = Money::from_ticks(
                        a.spec_bid.price(limit.ticks() as f64, true).floor() as i64
                    );
                    let q = q.clamp(grid.min(), limit);
                    bid_q = Some(bid_q.map_or(q, |b| b.max(q)));
                }
            }
            if a.inventory > 0 {
                let limit = grid.clamp(Money::from_ticks(pe.ceil() as i64));
                a.ask_limit = Some(limit);
                let q =
                    Money::from_ticks(a.spec_ask.price(limit.ticks() as f64, false).ceil() as i64);
                let q = q.clamp(limit, grid.max());
                ask_q = Some(ask_q.map_or(q, |x| x.min(q)));
            }
        }

        let bid_side = match (bid_q, ask_q) {
            (Some(_), Some(_)) => self.spec.as_mut().is_none_or(|s| s.rng.random_bool(0.5)),
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (None, None) => return None,
        };
        if bid_side {
            let q = bid_q.expect("bid side chosen");
            if let Some(ask) = self.ask {
                if q >= ask.price {
                    if ask.agent == i
                        || !self.can_buy(i, ask.price)
                        || !self.can_sell(ask.agent, ask.price)
                    {
                        return None;
                    }
                    self.execute(i, ask.agent, ask.price, time, period);
                    return Some(Event {
                        price: ask.price.ticks() as f64,
                        was_bid: false,
                        traded: true,
                    });
                }
            }
            match self.bid {
                Some(b) if self.config.improvement_rule && q <= b.price => Some(Event {
                    price: b.price.ticks() as f64,
                    was_bid: true,
                    traded: false,
                }),
                _ => {
                    self.bid = Some(Quote { price: q, agent: i });
                    Some(Event {
                        price: q.ticks() as f64,
                        was_bid: true,
                        traded: false,
                    })
                }
            }
        } else {
            let q = ask_q.expect("ask side chosen");
            if let Some(bid) = self.bid {
                if q <= bid.price {
                    if bid.agent == i
                        || !self.can_sell(i, bid.price)
                        || !self.can_buy(bid.agent, bid.price)
                    {
                        return None;
                    }
                    self.execute(bid.agent, i, bid.price, time, period);
                    return Some(Event {
                        price: bid.price.ticks() as f64,
                        was_bid: true,
                        traded: true,
                    });
                }
            }
            match self.ask {
                Some(x) if self.config.improvement_rule && q >= x.price => Some(Event {
                    price: x.price.ticks() as f64,
                    was_bid: false,
                    traded: false,
                }),
                _ => {
                    self.ask = Some(Quote { price: q, agent: i });
                    Some(Event {
                        price: q.ticks() as f64,
                        was_bid: false,
                        traded: false,
                    })
                }
            }
        }
    }

    fn consumes(a: &Agent, p: Money) -> bool {
        a.buyer && a.remaining > 0 && p <= a.reservation
    }

    fn produces(a: &Agent, p: Money) -> bool {
        !a.buyer && a.remaining > 0 && p >= a.reservation
    }

    fn can_buy(&self, j: usize, p: Money) -> bool {
        let a = &self.agents[j];
        Self::consumes(a, p)
            || (self.spec.is_some() && a.account.cash >= p && a.bid_limit.is_some_and(|l| p <= l))
    }

    fn can_sell(&self, j: usize, p: Money) -> bool {
        let a = &self.agents[j];
        Self::produces(a, p) || (a.inventory > 0 && a.ask_limit.is_some_and(|l| p >= l))
    }

    fn execute(&mut self, buyer: usize, seller: usize, price: Money, time: u64, period: u32) {
        let purchase = if Self::consumes(&self.agents[buyer], price) {
            self.agents[buyer].remaining -= 1;
            self.ledger.consumed += 1;
            UnitUse::Consumption
        } else {
            let b = &mut self.agents[buyer];
            b.inventory += 1;
            b.account.cash -= price;
            b.account.spent += price;
            self.ledger.inventory += 1;
            UnitUse::Inventory
        };
        let sale = if Self::produces(&self.agents[seller], price) {
            self.agents[seller].remaining -= 1;
            self.ledger.with_sellers -= 1;
            UnitSource::Production
        } else {
            let s = &mut self.agents[seller];
            s.inventory -= 1;
            s.account.cash += price;
            s.account.proceeds += price;
            self.ledger.inventory -= 1;
            UnitSource::Inventory
        };
        if let Some(last) = self.log.entries().last() {
            self.returns
                .push(price.ticks() as f64 / last.price.ticks() as f64 - 1.0);
        }
        self.log
            .push(Contract {
                time,
                price,
                buyer: AgentId(buyer as u32),
                seller: AgentId(seller as u32),
            })
            .expect("steps are strictly increasing and grid prices positive");
        self.periods.push(period);
        self.kinds.push(TradeKind { purchase, sale });
        self.bid = None;
        self.ask = None;
    }

    fn adapt(&mut self, rng: &mut SimRng, ev: Event) {
        let q = ev.price;
        let cash_floor = self.config.grid.min();
        for a in self.agents.iter_mut() {
            let limit = a.reservation.ticks() as f64;
            let quote = rounded(a.base.price(limit, a.buyer), a.buyer);
            let active = a.remaining > 0;
            let dir = if a.buyer {
                Margin::bid_reaction(quote, q, ev.traded, ev.was_bid, active)
            } else {
                Margin::ask_reaction(quote, q, ev.traded, ev.was_bid, active)
            };
            if let Some(d) = dir {
                let target = Margin::target(rng, q, d);
                a.base.adapt(limit, a.buyer, target);
            }
            let Some(spec) = self.spec.as_mut() else {
                continue;
            };
            if let Some(l) = a.bid_limit {
                let l = l.ticks() as f64;
                let active = a.account.cash >= cash_floor;
                if let Some(d) = Margin::bid_reaction(
                    rounded(a.spec_bid.price(l, true), true),
                    q,
                    ev.traded,
                    ev.was_bid,
                    active,
                ) {
                    let target = Margin::target(&mut spec.rng, q, d);
                    a.spec_bid.adapt(l, true, target);
                }
            }
            if let Some(l) = a.ask_limit {
                let l = l.ticks() as f64;
                let active = a.inventory > 0;
                if let Some(d) = Margin::ask_reaction(
                    rounded(a.spec_ask.price(l, false), false),
                    q,
                    ev.traded,
                    ev.was_bid,
                    active,
                ) {
                    let target = Margin::target(&mut spec.rng, q, d);
                    a.spec_ask.adapt(l, false, target);
                }
            }
        }
    }
}
