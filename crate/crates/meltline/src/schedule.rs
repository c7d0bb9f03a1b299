//! Discrete-event day schedule: melts, pours, and casts on a shared
//! timeline.
//!
//! [`build_schedule`] turns a cycle plan into concrete events with a
//! greedy earliest-available dispatch; [`simulate`] re-derives occupancy
//! and throughput from the events alone, so the pair acts as an
//! independent check on the optimizer; [`cross_check`] compares the two
//! sides and renders a verdict.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::balance::{
    check_plan_matches, evaluate_plan, math_violations, BalanceError, CyclePlan,
};
use crate::scenario::{Scenario, ViolationCode};

/// Slop allowed when comparing event times, minutes.
const TIME_EPS: f64 = 1e-9;
/// Achieved cycles may drift from planned cycles by at most this much.
const CYCLE_TOL: f64 = 0.01;
/// Relative tolerance when reconciling revenue.
const REVENUE_RTOL: f64 = 0.005;
/// Fractional cycles below this are treated as zero work.
const BATCH_EPS: f64 = 1e-9;

/// What a resource is doing during an event.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EventKind {
    /// A furnace melts one (possibly partial) charge.
    Melt,
    /// A furnace transfers its finished melt to its tank; instantaneous.
    Pour,
    /// A tank stabilizes and casts one (possibly partial) batch.
    Cast,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EventKind::Melt => f.write_str("MELT"),
            EventKind::Pour => f.write_str("POUR"),
            EventKind::Cast => f.write_str("CAST"),
        }
    }
}

/// One occupancy interval on one resource.
///
/// `MELT` and `CAST` have positive duration; `POUR` is instantaneous
/// (`start_min == end_min`) and belongs to the pouring furnace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub resource_id: String,
    pub kind: EventKind,
    pub start_min: f64,
    pub end_min: f64,
    /// Ordinal of this event among its kind on its resource.
    pub cycle_index: u32,
}

impl Event {
    fn duration(&self) -> f64 {
        self.end_min - self.start_min
    }
}

/// A full day of events, sorted by start time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timeline {
    pub events: Vec<Event>,
    /// Day length: the largest daily capacity of any resource, minutes.
    pub horizon_min: f64,
}

/// Why a timeline is physically impossible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ConflictCode {
    /// Two melts overlap on one furnace.
    FurnaceOverlap,
    /// Two casts overlap on one tank.
    TankOverlap,
    /// A pour happens before the melt it transfers has finished.
    PourBeforeMelt,
    /// A cast starts with no poured material available.
    CastWithoutPour,
    /// More than two furnaces pour into one tank.
    RatioExceeded,
    /// An event breaks basic shape rules (negative duration, outside the
    /// horizon, wrong kind for its resource, non-instantaneous pour).
    MalformedEvent,
}

impl fmt::Display for ConflictCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ConflictCode::FurnaceOverlap => "FURNACE_OVERLAP",
            ConflictCode::TankOverlap => "TANK_OVERLAP",
            ConflictCode::PourBeforeMelt => "POUR_BEFORE_MELT",
            ConflictCode::CastWithoutPour => "CAST_WITHOUT_POUR",
            ConflictCode::RatioExceeded => "RATIO_EXCEEDED",
            ConflictCode::MalformedEvent => "MALFORMED_EVENT",
        };
        f.write_str(s)
    }
}

/// One feasibility violation found in a timeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conflict {
    pub code: ConflictCode,
    pub message: String,
}

/// Throughput and occupancy measured from a timeline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleReport {
    /// Casting cycles of material delivered to each tank over the day,
    /// scaled by furnace and casting efficiency; a truncated final melt
    /// counts pro-rata.
    pub achieved_cycles_per_tank: BTreeMap<String, f64>,
    /// Busy minutes divided by daily capacity, per resource.
    pub utilization_per_resource: BTreeMap<String, f64>,
    /// Capacity minus melting minutes, per furnace.
    pub idle_minutes_per_furnace: BTreeMap<String, f64>,
    /// Feasibility violations; empty for a valid timeline.
    pub conflicts: Vec<Conflict>,
}

/// One named comparison inside a [`CrossCheckVerdict`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossCheckItem {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// Outcome of reconciling the optimizer's view with the simulation's.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossCheckVerdict {
    pub pass: bool,
    pub checks: Vec<CrossCheckItem>,
}

/// Failure in the scheduling layer.
#[derive(Debug, Error)]
pub enum ScheduleError {
    #[error(transparent)]
    Balance(#[from] BalanceError),
    #[error("timeline references unknown resource `{id}`")]
    UnknownResource { id: String },
}

/// A melt batch waiting to be poured.
struct PendingPour {
    ready_min: f64,
    batch: f64,
    cycle_index: u32,
}

/// Lays out a plan as concrete events with greedy earliest-available
/// dispatch.
///
/// Furnaces melt back-to-back from the start of the day up to their
/// planned cycle count (a fractional count ends with a pro-rata partial
/// melt). Each finished melt pours as soon as its tank is free — ties go
/// to the earliest-ready batch, then the lexicographically smaller
/// furnace id — and the cast starts immediately after the pour. Work that
/// would start at or after the horizon is dropped; a cast in progress at
/// day end is truncated.
///
/// The result is deterministic; events are sorted by start time, end
/// time, then resource id.
pub fn build_schedule(scenario: &Scenario, plan: &CyclePlan) -> Result<Timeline, ScheduleError> {
    let violations = math_violations(scenario);
    if !violations.is_empty() {
        return Err(BalanceError::InvalidScenario(violations).into());
    }
    check_plan_matches(scenario, plan).map_err(ScheduleError::Balance)?;

    let horizon_min = horizon(scenario);
    let mut events = Vec::new();
    let mut pending: Vec<Vec<PendingPour>> = scenario.furnaces.iter().map(|_| Vec::new()).collect();

    for (fi, f) in scenario.furnaces.iter().enumerate() {
        let planned = plan.cycles[&f.id];
        let full = planned.floor();
        let frac = planned - full;
        let mut start = 0.0;
        let mut cycle_index = 0u32;
        let mut emit = |batch: f64, start: &mut f64, cycle_index: &mut u32| -> bool {
            if *start >= horizon_min - TIME_EPS {
                return false;
            }
            let mut end = *start + batch * f.cycle_time_min;
            let mut poured = batch;
            if end > horizon_min {
                end = horizon_min;
                poured = (end - *start) / f.cycle_time_min;
            }
            events.push(Event {
                resource_id: f.id.clone(),
                kind: EventKind::Melt,
                start_min: *start,
                end_min: end,
                cycle_index: *cycle_index,
            });
            pending[fi].push(PendingPour { ready_min: end, batch: poured, cycle_index: *cycle_index });
            *start = end;
            *cycle_index += 1;
            true
        };
        let mut k = 0.0;
        while k < full {
            if !emit(1.0, &mut start, &mut cycle_index) {
                break;
            }
            k += 1.0;
        }
        if frac > BATCH_EPS {
            emit(frac, &mut start, &mut cycle_index);
        }
    }

    // Pours are consumed per furnace in melt order; across furnaces the
    // next pour is the one that can start soonest, breaking ties by
    // earlier readiness and then by furnace id.
    let mut heads = vec![0usize; scenario.furnaces.len()];
    let mut tank_free: BTreeMap<&str, f64> = scenario.tanks.iter().map(|t| (t.id.as_str(), 0.0)).collect();
    let mut cast_counts: BTreeMap<&str, u32> = scenario.tanks.iter().map(|t| (t.id.as_str(), 0)).collect();
    loop {
        let mut best: Option<(f64, f64, &str, usize)> = None;
        for (fi, f) in scenario.furnaces.iter().enumerate() {
            let Some(p) = pending[fi].get(heads[fi]) else { continue };
            let start = p.ready_min.max(tank_free[f.tank_id.as_str()]);
            let better = match &best {
                None => true,
                Some((bs, br, bid, _)) => start
                    .total_cmp(bs)
                    .then(p.ready_min.total_cmp(br))
                    .then(f.id.as_str().cmp(bid))
                    .is_lt(),
            };
            if better {
                best = Some((start, p.ready_min, f.id.as_str(), fi));
            }
        }
        let Some((start, _, _, fi)) = best else { break };
        let p = &pending[fi][heads[fi]];
        heads[fi] += 1;
        if start >= horizon_min - TIME_EPS {
            continue;
        }
        let f = &scenario.furnaces[fi];
        let tank = scenario.tank(&f.tank_id).expect("validated topology");
        events.push(Event {
            resource_id: f.id.clone(),
            kind: EventKind::Pour,
            start_min: start,
            end_min: start,
            cycle_index: p.cycle_index,
        });
        let full_end = start + p.batch * f.output_efficiency * tank.casting_efficiency * tank.cycle_time_min;
        let cast_index = cast_counts.get_mut(tank.id.as_str()).expect("validated topology");
        events.push(Event {
            resource_id: tank.id.clone(),
            kind: EventKind::Cast,
            start_min: start,
            end_min: full_end.min(horizon_min),
            cycle_index: *cast_index,
        });
        *cast_index += 1;
        // The tank stays occupied for the batch's full casting time even
        // when the recorded event is truncated by the horizon.
        *tank_free.get_mut(tank.id.as_str()).expect("validated topology") = full_end;
    }

    events.sort_by(|a, b| {
        a.start_min
            .total_cmp(&b.start_min)
            .then(a.end_min.total_cmp(&b.end_min))
            .then(a.resource_id.cmp(&b.resource_id))
            .then(a.kind.cmp(&b.kind))
            .then(a.cycle_index.cmp(&b.cycle_index))
    });
    Ok(Timeline { events, horizon_min })
}

fn horizon(scenario: &Scenario) -> f64 {
    scenario
        .furnaces
        .iter()
        .map(|f| f.daily_capacity_min)
        .chain(scenario.tanks.iter().map(|t| t.daily_capacity_min))
        .fold(0.0, f64::max)
}

enum ResourceKind {
    Furnace,
    Tank,
}

/// Measures a timeline against the scenario from the events alone.
///
/// Occupancy, throughput, and idle time are recomputed from the recorded
/// intervals — nothing is taken from the plan — so the report is an
/// independent witness. Physical impossibilities are returned as
/// conflicts, not errors; only a reference to a resource the scenario
/// does not contain is an error.
pub fn simulate(scenario: &Scenario, timeline: &Timeline) -> Result<ScheduleReport, ScheduleError> {
    let violations: Vec<_> = math_violations(scenario)
        .into_iter()
        // The 2:1 switch limit is re-detected from the events themselves
        // so that over-subscribed timelines surface as conflicts.
        .filter(|v| v.code != ViolationCode::RatioExceeded)
        .collect();
    if !violations.is_empty() {
        return Err(BalanceError::InvalidScenario(violations).into());
    }

    let mut conflicts = Vec::new();

    // Shape checks and resource resolution.
    for e in &timeline.events {
        let kind = match scenario.furnace(&e.resource_id) {
            Some(_) => ResourceKind::Furnace,
            None => match scenario.tank(&e.resource_id) {
                Some(_) => ResourceKind::Tank,
                None => return Err(ScheduleError::UnknownResource { id: e.resource_id.clone() }),
            },
        };
        let shape_error = match (&kind, e.kind) {
            (ResourceKind::Furnace, EventKind::Cast) => Some("a furnace cannot CAST"),
            (ResourceKind::Tank, EventKind::Melt) => Some("a tank cannot MELT"),
            (ResourceKind::Tank, EventKind::Pour) => Some("a tank cannot POUR"),
            _ => None,
        };
        if let Some(msg) = shape_error {
            conflicts.push(Conflict {
                code: ConflictCode::MalformedEvent,
                message: format!("{msg}: {} event on `{}`", e.kind, e.resource_id),
            });
            continue;
        }
        if e.kind == EventKind::Pour {
            if (e.end_min - e.start_min).abs() > TIME_EPS {
                conflicts.push(Conflict {
                    code: ConflictCode::MalformedEvent,
                    message: format!(
                        "POUR on `{}` must be instantaneous, got [{}, {}]",
                        e.resource_id, e.start_min, e.end_min
                    ),
                });
            }
        } else if e.end_min <= e.start_min + TIME_EPS {
            conflicts.push(Conflict {
                code: ConflictCode::MalformedEvent,
                message: format!(
                    "{} on `{}` must have positive duration, got [{}, {}]",
                    e.kind, e.resource_id, e.start_min, e.end_min
                ),
            });
        }
        if e.start_min < -TIME_EPS || e.end_min > timeline.horizon_min + TIME_EPS {
            conflicts.push(Conflict {
                code: ConflictCode::MalformedEvent,
                message: format!(
                    "{} on `{}` lies outside the day [0, {}]: [{}, {}]",
                    e.kind, e.resource_id, timeline.horizon_min, e.start_min, e.end_min
                ),
            });
        }
    }

    // Overlap detection per resource, on the occupancy-bearing kinds.
    let mut check_overlaps = |resource_id: &str, kind: EventKind, code: ConflictCode| {
        let mut intervals: Vec<&Event> = timeline
            .events
            .iter()
            .filter(|e| e.resource_id == resource_id && e.kind == kind)
            .collect();
        intervals.sort_by(|a, b| a.start_min.total_cmp(&b.start_min).then(a.end_min.total_cmp(&b.end_min)));
        for pair in intervals.windows(2) {
            if pair[1].start_min < pair[0].end_min - TIME_EPS {
                conflicts.push(Conflict {
                    code,
                    message: format!(
                        "`{resource_id}` runs {kind} [{}, {}] before [{}, {}] has finished",
                        pair[1].start_min, pair[1].end_min, pair[0].start_min, pair[0].end_min
                    ),
                });
            }
        }
    };
    for f in &scenario.furnaces {
        check_overlaps(&f.id, EventKind::Melt, ConflictCode::FurnaceOverlap);
    }
    for t in &scenario.tanks {
        check_overlaps(&t.id, EventKind::Cast, ConflictCode::TankOverlap);
    }

    // Every pour must transfer a melt that has finished.
    for f in &scenario.furnaces {
        for pour in timeline.events.iter().filter(|e| e.resource_id == f.id && e.kind == EventKind::Pour) {
            let melt_done = timeline.events.iter().any(|m| {
                m.resource_id == f.id
                    && m.kind == EventKind::Melt
                    && m.cycle_index == pour.cycle_index
                    && m.end_min <= pour.start_min + TIME_EPS
            });
            if !melt_done {
                conflicts.push(Conflict {
                    code: ConflictCode::PourBeforeMelt,
                    message: format!(
                        "POUR at {} on `{}` has no finished melt for cycle {}",
                        pour.start_min, f.id, pour.cycle_index
                    ),
                });
            }
        }
    }

    // Every cast must consume a pour that happened by its start; each
    // pour feeds exactly one cast. More than two distinct pouring
    // furnaces on one tank breaks the pouring-switch limit.
    for t in &scenario.tanks {
        let feeders: Vec<&str> = scenario.furnaces_for_tank(&t.id).iter().map(|f| f.id.as_str()).collect();
        let mut pours: Vec<(&Event, &str)> = timeline
            .events
            .iter()
            .filter(|e| e.kind == EventKind::Pour && feeders.contains(&e.resource_id.as_str()))
            .map(|e| (e, e.resource_id.as_str()))
            .collect();
        pours.sort_by(|a, b| a.0.start_min.total_cmp(&b.0.start_min));
        let mut distinct: Vec<&str> = pours.iter().map(|(_, f)| *f).collect();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() > 2 {
            conflicts.push(Conflict {
                code: ConflictCode::RatioExceeded,
                message: format!(
                    "{} furnaces pour into `{}`; the switch connects at most 2",
                    distinct.len(),
                    t.id
                ),
            });
        }
        let mut casts: Vec<&Event> = timeline
            .events
            .iter()
            .filter(|e| e.resource_id == t.id && e.kind == EventKind::Cast)
            .collect();
        casts.sort_by(|a, b| a.start_min.total_cmp(&b.start_min));
        let mut consumed = vec![false; pours.len()];
        for cast in casts {
            let found = pours
                .iter()
                .enumerate()
                .find(|(i, (p, _))| !consumed[*i] && p.start_min <= cast.start_min + TIME_EPS);
            match found {
                Some((i, _)) => consumed[i] = true,
                None => conflicts.push(Conflict {
                    code: ConflictCode::CastWithoutPour,
                    message: format!(
                        "CAST at {} on `{}` has no unconsumed pour by its start",
                        cast.start_min, t.id
                    ),
                }),
            }
        }
    }

    // Throughput and occupancy.
    let mut achieved_cycles_per_tank: BTreeMap<String, f64> =
        scenario.tanks.iter().map(|t| (t.id.clone(), 0.0)).collect();
    let mut utilization_per_resource = BTreeMap::new();
    let mut idle_minutes_per_furnace = BTreeMap::new();
    for f in &scenario.furnaces {
        let busy: f64 = timeline
            .events
            .iter()
            .filter(|e| e.resource_id == f.id && e.kind == EventKind::Melt)
            .map(Event::duration)
            .sum();
        utilization_per_resource.insert(f.id.clone(), busy / f.daily_capacity_min);
        idle_minutes_per_furnace.insert(f.id.clone(), f.daily_capacity_min - busy);
        if let Some(t) = scenario.tank(&f.tank_id) {
            let delivered = busy / f.cycle_time_min * f.output_efficiency * t.casting_efficiency;
            *achieved_cycles_per_tank.get_mut(&t.id).expect("map covers all tanks") += delivered;
        }
    }
    for t in &scenario.tanks {
        let busy: f64 = timeline
            .events
            .iter()
            .filter(|e| e.resource_id == t.id && e.kind == EventKind::Cast)
            .map(Event::duration)
            .sum();
        utilization_per_resource.insert(t.id.clone(), busy / t.daily_capacity_min);
    }

    Ok(ScheduleReport {
        achieved_cycles_per_tank,
        utilization_per_resource,
        idle_minutes_per_furnace,
        conflicts,
    })
}

/// Reconciles the optimizer's accounting with the simulator's.
///
/// Four named checks: `CAPACITY` (the plan violates no capacity row),
/// `ACHIEVED_VS_PLANNED` (per-tank cycles agree within 0.01),
/// `REVENUE_RECONCILIATION` (revenue recomputed from achieved cycles
/// matches the plan's gross revenue within 0.5%), and `CONFLICTS` (the
/// simulation found none). The verdict passes only if all four do.
pub fn cross_check(
    scenario: &Scenario,
    plan: &CyclePlan,
    report: &ScheduleReport,
) -> Result<CrossCheckVerdict, ScheduleError> {
    let breakdown = evaluate_plan(scenario, plan)?;
    let mut checks = Vec::new();

    let capacity_pass = breakdown.capacity_violations.is_empty();
    checks.push(CrossCheckItem {
        name: "CAPACITY".to_string(),
        pass: capacity_pass,
        detail: if capacity_pass {
            "no capacity row violated".to_string()
        } else {
            format!("violated: {}", breakdown.capacity_violations.join(", "))
        },
    });

    let mut worst: Option<(String, f64, f64)> = None;
    for (tank_id, &planned) in &breakdown.effective_cycles_per_tank {
        let achieved = report.achieved_cycles_per_tank.get(tank_id).copied().unwrap_or(0.0);
        let gap = (achieved - planned).abs();
        if worst.as_ref().is_none_or(|(_, _, g)| gap > *g) {
            worst = Some((tank_id.clone(), achieved, gap));
        }
    }
    let (achieved_pass, detail) = match &worst {
        None => (true, "no tanks".to_string()),
        Some((id, achieved, gap)) => (
            *gap <= CYCLE_TOL,
            format!(
                "largest gap {gap:.6} on `{id}` (achieved {achieved:.6} vs planned {:.6})",
                breakdown.effective_cycles_per_tank[id]
            ),
        ),
    };
    checks.push(CrossCheckItem {
        name: "ACHIEVED_VS_PLANNED".to_string(),
        pass: achieved_pass,
        detail,
    });

    let achieved_revenue: f64 = scenario
        .tanks
        .iter()
        .map(|t| {
            report.achieved_cycles_per_tank.get(&t.id).copied().unwrap_or(0.0)
                * f64::from(t.rods_per_cycle)
                * t.margin_per_rod_usd
        })
        .sum();
    let tolerance = REVENUE_RTOL * breakdown.gross_revenue_usd.abs() + 1e-9;
    let revenue_pass = (achieved_revenue - breakdown.gross_revenue_usd).abs() <= tolerance;
    checks.push(CrossCheckItem {
        name: "REVENUE_RECONCILIATION".to_string(),
        pass: revenue_pass,
        detail: format!(
            "achieved {achieved_revenue:.2} vs planned {:.2} USD/day",
            breakdown.gross_revenue_usd
        ),
    });

    let conflicts_pass = report.conflicts.is_empty();
    checks.push(CrossCheckItem {
        name: "CONFLICTS".to_string(),
        pass: conflicts_pass,
        detail: if conflicts_pass {
            "none".to_string()
        } else {
            format!("{} conflict(s), first: {}", report.conflicts.len(), report.conflicts[0].message)
        },
    });

    Ok(CrossCheckVerdict { pass: checks.iter().all(|c| c.pass), checks })
}
