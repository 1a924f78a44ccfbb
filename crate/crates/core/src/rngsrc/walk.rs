use chrono::{Datelike, NaiveDate, Weekday};
use serde::{Deserialize, Serialize};

use super::SplitMix64;
use crate::bitcore::BitString;
use crate::error::{Error, Result};
use crate::ingest::{TradeDay, SESSION_CLOSE_NS, SESSION_OPEN_NS};

/// Parameters of the persistent price walk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkParams {
    /// Probability that a move repeats the sign of the previous move.
    pub rho: f64,
    /// Step size in price units.
    pub tick: u64,
    /// Starting price.
    pub s0: u64,
    /// Probability that a step leaves the price unchanged.
    pub zero_prob: f64,
    /// Probability that a move is forced upward before the persistence rule.
    pub drift: f64,
}

impl Default for WalkParams {
    fn default() -> Self {
        Self {
            rho: 0.5,
            tick: 100,
            s0: 1_000_000,
            zero_prob: 0.0,
            drift: 0.0,
        }
    }
}

impl WalkParams {
    pub fn with_rho(rho: f64) -> Self {
        Self { rho, ..Self::default() }
    }

    fn validate(&self) -> Result<()> {
        let prob = |p: f64| (0.0..=1.0).contains(&p);
        if !prob(self.rho) || !prob(self.zero_prob) || !prob(self.drift) {
            return Err(Error::Config("walk probabilities must lie in [0, 1]".into()));
        }
        if self.tick == 0 || self.s0 == 0 {
            return Err(Error::Config("walk tick and start price must be positive".into()));
        }
        if self.zero_prob >= 1.0 {
            return Err(Error::Config("zero-move probability must be below 1".into()));
        }
        Ok(())
    }
}

/// `n` prices of a walk whose moves repeat the previous move's sign with
/// probability `rho`. Zero-moves do not reset the remembered sign.
///
/// A move that would take the price to zero or below is clamped at 1 and logged.
pub fn persistent_walk(seed: u64, n: usize, params: &WalkParams) -> Result<Vec<u64>> {
    params.validate()?;
    let mut rng = SplitMix64::new(seed);
    let mut prices = Vec::with_capacity(n);
    if n == 0 {
        return Ok(prices);
    }
    let mut price = params.s0;
    prices.push(price);
    let mut up = rng.next_bool(0.5);
    let mut clamped = 0usize;
    for _ in 1..n {
        if params.zero_prob > 0.0 && rng.next_bool(params.zero_prob) {
            prices.push(price);
            continue;
        }
        up = if params.drift > 0.0 && rng.next_bool(params.drift) {
            true
        } else if rng.next_bool(params.rho) {
            up
        } else {
            !up
        };
        price = if up {
            price.saturating_add(params.tick)
        } else if price > params.tick {
            price - params.tick
        } else {
            clamped += 1;
            1
        };
        prices.push(price);
    }
    if clamped > 0 {
        log::warn!("persistent walk (seed {seed}) clamped {clamped} moves at price 1");
    }
    Ok(prices)
}

/// Start level for [`bits_to_walk`]; far enough from zero for any practical length.
pub const WALK_ORIGIN: u64 = 1 << 32;

/// Turns bits into a ±1 walk starting at [`WALK_ORIGIN`], so that symbolizing
/// the walk at level 1 gives back exactly the input bits.
pub fn bits_to_walk(bits: &BitString) -> Vec<u64> {
    let mut out = Vec::with_capacity(bits.len() + 1);
    let mut s = WALK_ORIGIN;
    out.push(s);
    for b in bits.iter() {
        s = if b { s + 1 } else { s - 1 };
        out.push(s);
    }
    out
}

/// Synthetic trading days of the given calendar month, weekdays only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticMonth {
    pub ticker: String,
    pub year: i32,
    pub month: u32,
    pub days: usize,
    /// Price moves per day; a day holds one more price than this.
    pub ticks_per_day: usize,
    pub walk: WalkParams,
    pub seed: u64,
}

impl SyntheticMonth {
    pub fn dates(&self) -> Result<Vec<NaiveDate>> {
        let mut d = NaiveDate::from_ymd_opt(self.year, self.month, 1)
            .ok_or_else(|| Error::Config(format!("invalid month {}-{}", self.year, self.month)))?;
        let mut out = Vec::with_capacity(self.days);
        while out.len() < self.days {
            if d.month() != self.month {
                return Err(Error::Config(format!(
                    "{}-{:02} has fewer than {} weekdays",
                    self.year, self.month, self.days
                )));
            }
            if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
                out.push(d);
            }
            d = d.succ_opt().expect("date in range");
        }
        Ok(out)
    }

    /// Each day is an independent walk seeded from `seed` and the day index,
    /// with trade times spread evenly over the session.
    pub fn generate(&self) -> Result<Vec<TradeDay>> {
        let mut seeds = SplitMix64::new(self.seed);
        let span = SESSION_CLOSE_NS - SESSION_OPEN_NS;
        self.dates()?
            .into_iter()
            .map(|date| {
                let prices = persistent_walk(seeds.next_u64(), self.ticks_per_day + 1, &self.walk)?;
                let n = prices.len().max(1) as u64;
                let times_ns = (0..prices.len() as u64).map(|i| SESSION_OPEN_NS + i * span / n).collect();
                Ok(TradeDay {
                    ticker: self.ticker.clone(),
                    date,
                    prices,
                    times_ns,
                })
            })
            .collect()
    }
}

/// Renders a day as LOBSTER message rows, interleaving one non-execution
/// event (a limit-order submission) before every execution.
pub fn lobster_messages(day: &TradeDay) -> String {
    let mut out = String::with_capacity(day.len() * 64);
    for (i, (&t, &p)) in day.times_ns.iter().zip(&day.prices).enumerate() {
        let secs = t / 1_000_000_000;
        let nanos = t % 1_000_000_000;
        let id = 1_000 + i as u64;
        out.push_str(&format!("{secs}.{nanos:09},1,{id},100,{},1\n", p + 100));
        let code = if i % 7 == 3 { 5 } else { 4 };
        out.push_str(&format!("{secs}.{nanos:09},{code},{id},100,{p},-1\n"));
    }
    out
}
