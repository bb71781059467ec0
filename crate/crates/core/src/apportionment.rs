//! Seat apportionment driven by two-argument means.
//!
//! Every state first receives `max(1, ⌊H·Nᵢ/ΣN⌋)` seats. The remaining seats
//! go to the states with the lowest priority value `M₂(r/N, (r+1)/N)`,
//! either all at once from a single ranking (one-shot) or one at a time with
//! the winner's priority recomputed after each award (iterative).

use std::cmp::Ordering;
use std::collections::HashSet;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{ApportionError, MeanError};
use crate::fmt::to_json_pretty;
use crate::generator::Direction;
use crate::means::{mean2, MeanKind};

pub const DEFAULT_HOUSE_SIZE: u64 = 435;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateRecord {
    pub name: String,
    pub population: u64,
}

/// States with unique names and positive populations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Census {
    states: Vec<StateRecord>,
}

impl Census {
    pub fn new(states: Vec<StateRecord>) -> Result<Self, ApportionError> {
        if states.is_empty() {
            return Err(ApportionError::EmptyCensus);
        }
        let mut seen = HashSet::new();
        for s in &states {
            if s.population == 0 {
                return Err(ApportionError::BadPopulation { name: s.name.clone(), raw: "0".into() });
            }
            if !seen.insert(s.name.as_str()) {
                return Err(ApportionError::DuplicateName(s.name.clone()));
            }
        }
        Ok(Census { states })
    }

    /// Reads CSV with header `name,population`; populations must be
    /// positive integers.
    pub fn from_csv<R: Read>(r: R) -> Result<Self, ApportionError> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(r);
        let header = reader.headers()?.clone();
        if header.iter().collect::<Vec<_>>() != ["name", "population"] {
            return Err(ApportionError::BadHeader(header.iter().collect::<Vec<_>>().join(",")));
        }
        let mut states = Vec::new();
        for rec in reader.records() {
            let rec = rec?;
            let name = rec.get(0).unwrap_or_default().to_string();
            let raw = rec.get(1).unwrap_or_default().to_string();
            let population = raw
                .parse::<u64>()
                .ok()
                .filter(|&p| p > 0)
                .ok_or_else(|| ApportionError::BadPopulation { name: name.clone(), raw: raw.clone() })?;
            states.push(StateRecord { name, population });
        }
        Census::new(states)
    }

    pub fn states(&self) -> &[StateRecord] {
        &self.states
    }

    pub fn total_population(&self) -> u128 {
        self.states.iter().map(|s| u128::from(s.population)).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApportionMode {
    /// Single ranking; at most one extra seat per state.
    OneShot,
    /// Re-rank after every award.
    Iterative,
}

#[derive(Debug, Clone)]
pub struct ApportionmentConfig {
    pub house_size: u64,
    pub method: MeanKind,
    pub mode: ApportionMode,
}

impl ApportionmentConfig {
    pub fn new(house_size: u64, method: MeanKind, mode: ApportionMode) -> Result<Self, ApportionError> {
        match method {
            MeanKind::QuasiArithmetic(_) | MeanKind::Bajraktarevic(..) | MeanKind::ExpCauchy => {
                Ok(ApportionmentConfig { house_size, method, mode })
            }
            other => Err(ApportionError::UnsupportedMethod(other.label())),
        }
    }
}

/// `(seats, k)`: the floor allocation and the number of seats left over.
pub fn initial_allocation(census: &Census, house_size: u64) -> Result<(Vec<u64>, u64), ApportionError> {
    let states = census.states();
    if house_size < states.len() as u64 {
        return Err(ApportionError::HouseTooSmall { house: house_size, states: states.len() });
    }
    let total = census.total_population();
    let seats: Vec<u64> =
        states.iter().map(|s| ((u128::from(house_size) * u128::from(s.population) / total) as u64).max(1)).collect();
    let allocated: u64 = seats.iter().sum();
    if allocated > house_size {
        return Err(ApportionError::Oversubscribed { allocated, house: house_size });
    }
    Ok((seats, house_size - allocated))
}

/// `M₂(r/N, (r+1)/N)`; a lower value is a stronger claim to the next seat.
pub fn priority_value(method: &MeanKind, seats: u64, population: u64) -> Result<f64, MeanError> {
    let n = population as f64;
    mean2(method, seats as f64 / n, (seats + 1) as f64 / n)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Award {
    /// 1-based position in the award sequence.
    pub order: u64,
    pub state: String,
    pub priority: f64,
    pub seats_after: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AllocationRow {
    pub name: String,
    pub population: u64,
    pub seats: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeatAllocation {
    pub mode: ApportionMode,
    pub method: String,
    pub house_size: u64,
    pub initial_seats: Vec<u64>,
    pub remaining: u64,
    pub states: Vec<AllocationRow>,
    pub awards: Vec<Award>,
}

impl SeatAllocation {
    pub fn seats(&self) -> Vec<u64> {
        self.states.iter().map(|s| s.seats).collect()
    }
}

/// Ranking order: priority ascending, then population descending, then name.
fn claim_order(census: &Census, pri: &[f64], a: usize, b: usize) -> Ordering {
    let (sa, sb) = (&census.states()[a], &census.states()[b]);
    pri[a].total_cmp(&pri[b]).then(sb.population.cmp(&sa.population)).then_with(|| sa.name.cmp(&sb.name))
}

/// Hands out the `k` remaining seats on top of `seats`.
pub fn assign_remaining(
    census: &Census,
    seats: &[u64],
    k: u64,
    config: &ApportionmentConfig,
) -> Result<SeatAllocation, ApportionError> {
    let states = census.states();
    let mut seats = seats.to_vec();
    let mut pri = states
        .iter()
        .zip(&seats)
        .map(|(s, &r)| priority_value(&config.method, r, s.population))
        .collect::<Result<Vec<_>, _>>()?;
    let mut awards = Vec::with_capacity(k as usize);
    match config.mode {
        ApportionMode::OneShot => {
            if k > states.len() as u64 {
                return Err(ApportionError::OneShotOverflow { k, states: states.len() });
            }
            let mut idx: Vec<usize> = (0..states.len()).collect();
            idx.sort_by(|&a, &b| claim_order(census, &pri, a, b));
            for (order, &i) in idx.iter().take(k as usize).enumerate() {
                seats[i] += 1;
                awards.push(Award {
                    order: order as u64 + 1,
                    state: states[i].name.clone(),
                    priority: pri[i],
                    seats_after: seats[i],
                });
            }
        }
        ApportionMode::Iterative => {
            for order in 1..=k {
                let i = (0..states.len()).min_by(|&a, &b| claim_order(census, &pri, a, b)).expect("non-empty census");
                seats[i] += 1;
                awards.push(Award { order, state: states[i].name.clone(), priority: pri[i], seats_after: seats[i] });
                pri[i] = priority_value(&config.method, seats[i], states[i].population)?;
            }
        }
    }
    Ok(SeatAllocation {
        mode: config.mode,
        method: config.method.label(),
        house_size: config.house_size,
        initial_seats: Vec::new(),
        remaining: k,
        states: states
            .iter()
            .zip(&seats)
            .map(|(s, &r)| AllocationRow { name: s.name.clone(), population: s.population, seats: r })
            .collect(),
        awards,
    })
}

/// Initial allocation followed by [`assign_remaining`].
pub fn apportion(census: &Census, config: &ApportionmentConfig) -> Result<SeatAllocation, ApportionError> {
    let (initial, k) = initial_allocation(census, config.house_size)?;
    let mut alloc = assign_remaining(census, &initial, k, config)?;
    alloc.initial_seats = initial;
    Ok(alloc)
}

/// Whether giving the next seat to `a = (r, N)` rather than `b` is fair under
/// `method`, i.e. `a` has the strictly lower priority value.
///
/// For a Bajraktarević method the comparison is made on the expanded
/// inequality `Σ pᵢ qⱼ (f(uᵢ) − f(vⱼ)) < 0` (sign flipped for decreasing
/// `f`), which avoids inverting `f`.
pub fn fairness_check(a: (u64, u64), b: (u64, u64), method: &MeanKind) -> Result<bool, MeanError> {
    match method {
        MeanKind::Bajraktarevic(f, p) => {
            let args = |(r, n): (u64, u64)| [r as f64 / n as f64, (r + 1) as f64 / n as f64];
            let (u, v) = (args(a), args(b));
            for x in u.iter().chain(&v) {
                if !f.domain().contains(*x) || !p.domain().contains(*x) {
                    return Err(MeanError::Domain { index: 0, value: *x, domain: f.domain() });
                }
            }
            let mut total = 0.0;
            for &ui in &u {
                for &vj in &v {
                    total += p.eval(ui) * p.eval(vj) * (f.eval(ui) - f.eval(vj));
                }
            }
            let sign = match f.direction() {
                Direction::Increasing => 1.0,
                Direction::Decreasing => -1.0,
            };
            Ok(sign * total < 0.0)
        }
        _ => Ok(priority_value(method, a.0, a.1)? < priority_value(method, b.0, b.1)?),
    }
}

/// Allocation CSV: `name,population,seats`.
pub fn write_allocation_csv<W: Write>(alloc: &SeatAllocation, w: W) -> Result<(), ApportionError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["name", "population", "seats"])?;
    for s in &alloc.states {
        out.write_record([s.name.clone(), s.population.to_string(), s.seats.to_string()])?;
    }
    out.flush()?;
    Ok(())
}

/// Audit log as JSON, priorities at 17 significant digits.
pub fn audit_json(alloc: &SeatAllocation) -> String {
    to_json_pretty(alloc).expect("allocation serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::{Generator, WeightFunction};

    fn census(pops: &[u64]) -> Census {
        Census::new(
            pops.iter().enumerate().map(|(i, &p)| StateRecord { name: format!("S{i:02}"), population: p }).collect(),
        )
        .unwrap()
    }

    #[test]
    fn initial_examples() {
        assert_eq!(initial_allocation(&census(&[100, 100, 100]), 6).unwrap(), (vec![2, 2, 2], 0));
        assert_eq!(initial_allocation(&census(&[600, 300, 100]), 10).unwrap(), (vec![6, 3, 1], 0));
        assert!(matches!(
            initial_allocation(&census(&[980, 10, 10]), 10),
            Err(ApportionError::Oversubscribed { allocated: 11, house: 10 })
        ));
        assert!(matches!(initial_allocation(&census(&[1, 1, 1]), 2), Err(ApportionError::HouseTooSmall { .. })));
    }

    #[test]
    fn priority_examples() {
        let geo = MeanKind::QuasiArithmetic(Generator::ln());
        assert!((priority_value(&geo, 3, 200).unwrap() - 12f64.sqrt() / 200.0).abs() < 1e-16);
        let arith = MeanKind::QuasiArithmetic(Generator::identity());
        assert!((priority_value(&arith, 1, 100).unwrap() - 0.015).abs() < 1e-17);
        let b2 = priority_value(&MeanKind::ExpCauchy, 1, 100).unwrap();
        assert!((b2 - 2.0 / 150.0).abs() < 1e-17);
        let harm = priority_value(&MeanKind::QuasiArithmetic(Generator::reciprocal()), 1, 100).unwrap();
        assert!((b2 - harm).abs() <= 1e-14 * harm);
    }

    #[test]
    fn two_state_award() {
        let c = census(&[100, 200]);
        let cfg =
            ApportionmentConfig::new(5, MeanKind::QuasiArithmetic(Generator::ln()), ApportionMode::OneShot).unwrap();
        let a = assign_remaining(&c, &[1, 3], 1, &cfg).unwrap();
        assert_eq!(a.seats(), vec![2, 3]);
        assert_eq!(a.awards[0].state, "S00");
        assert!(fairness_check((1, 100), (3, 200), &cfg.method).unwrap());
        assert!(!fairness_check((3, 200), (1, 100), &cfg.method).unwrap());
        let same = assign_remaining(&c, &[1, 3], 0, &cfg).unwrap();
        assert_eq!(same.seats(), vec![1, 3]);
    }

    #[test]
    fn symmetric_inputs_are_not_preferred() {
        let m = MeanKind::Bajraktarevic(Generator::ln(), WeightFunction::power(1.0));
        assert!(!fairness_check((2, 50), (2, 50), &m).unwrap());
        let q = MeanKind::QuasiArithmetic(Generator::identity());
        assert!(!fairness_check((2, 50), (2, 50), &q).unwrap());
    }

    #[test]
    fn one_shot_overflow() {
        let c = census(&[10, 10]);
        let cfg = ApportionmentConfig::new(10, MeanKind::ExpCauchy, ApportionMode::OneShot).unwrap();
        assert!(matches!(assign_remaining(&c, &[1, 1], 3, &cfg), Err(ApportionError::OneShotOverflow { .. })));
        let it = ApportionmentConfig { mode: ApportionMode::Iterative, ..cfg };
        assert_eq!(assign_remaining(&c, &[1, 1], 3, &it).unwrap().seats().iter().sum::<u64>(), 5);
    }

    #[test]
    fn ties_go_to_larger_population_then_name() {
        let c = Census::new(vec![
            StateRecord { name: "b".into(), population: 100 },
            StateRecord { name: "a".into(), population: 100 },
        ])
        .unwrap();
        let cfg =
            ApportionmentConfig::new(3, MeanKind::QuasiArithmetic(Generator::ln()), ApportionMode::OneShot).unwrap();
        let a = assign_remaining(&c, &[1, 1], 1, &cfg).unwrap();
        assert_eq!(a.awards[0].state, "a");
    }

    #[test]
    fn csv_round_trip() {
        let c = Census::from_csv("name,population\nA,600\nB,300\nC,100\n".as_bytes()).unwrap();
        assert_eq!(c.states().len(), 3);
        assert!(matches!(
            Census::from_csv("name,population\nA,1.5\n".as_bytes()),
            Err(ApportionError::BadPopulation { .. })
        ));
        assert!(matches!(
            Census::from_csv("name,population\nA,1\nA,2\n".as_bytes()),
            Err(ApportionError::DuplicateName(_))
        ));
        assert!(matches!(Census::from_csv("state,pop\nA,1\n".as_bytes()), Err(ApportionError::BadHeader(_))));
        let cfg =
            ApportionmentConfig::new(10, MeanKind::QuasiArithmetic(Generator::ln()), ApportionMode::Iterative).unwrap();
        let alloc = apportion(&c, &cfg).unwrap();
        let mut buf = Vec::new();
        write_allocation_csv(&alloc, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "name,population,seats\nA,600,6\nB,300,3\nC,100,1\n");
        assert!(audit_json(&alloc).contains("\"awards\": []"));
    }

    #[test]
    fn rejects_multi_argument_methods() {
        assert!(ApportionmentConfig::new(10, MeanKind::MultCauchy, ApportionMode::OneShot).is_err());
    }
}
