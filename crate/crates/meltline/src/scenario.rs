//! Plant description: furnaces, tank casting lines and the labor plan.
//!
//! Scenarios are exchanged as strict JSON documents. Unknown fields are
//! rejected on load so that a typo in a config file surfaces as an error
//! instead of silently falling back to a default.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A melting furnace, feeding exactly one tank casting line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Furnace {
    pub id: String,
    /// Minutes to melt one full charge.
    pub cycle_time_min: f64,
    /// Minutes per day the furnace is allowed to run.
    pub daily_capacity_min: f64,
    /// Fraction of a charge that survives melting, in (0, 1].
    pub output_efficiency: f64,
    /// Cost of keeping the furnace hot while it is not melting, USD/min.
    pub idle_cost_rate_usd_per_min: f64,
    /// Id of the tank this furnace pours into.
    pub tank_id: String,
}

/// A stabilisation tank with its downstream casting line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TankCastingLine {
    pub id: String,
    /// Minutes to cast one poured charge into rods.
    pub cycle_time_min: f64,
    /// Minutes per day the tank and casting line are allowed to run.
    pub daily_capacity_min: f64,
    /// Fraction of poured metal that ends up in sellable rods, in (0, 1].
    pub casting_efficiency: f64,
    /// Rods produced by one casting cycle.
    pub rods_per_cycle: u32,
    /// Sale margin of one rod, USD.
    pub margin_per_rod_usd: f64,
}

/// Headcount and wages for the line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LaborPlan {
    pub workers_total: u32,
    pub shifts_per_day: u32,
    pub wage_usd_per_worker_per_day: f64,
}

impl LaborPlan {
    /// Total wage bill per day, USD.
    pub fn daily_cost_usd(&self) -> f64 {
        f64::from(self.workers_total) * self.wage_usd_per_worker_per_day
    }
}

/// A complete plant configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub furnaces: Vec<Furnace>,
    pub tanks: Vec<TankCastingLine>,
    pub labor: LaborPlan,
}

impl Scenario {
    /// Looks up a tank by id.
    pub fn tank(&self, id: &str) -> Option<&TankCastingLine> {
        self.tanks.iter().find(|t| t.id == id)
    }

    /// Looks up a furnace by id.
    pub fn furnace(&self, id: &str) -> Option<&Furnace> {
        self.furnaces.iter().find(|f| f.id == id)
    }

    /// Furnaces assigned to the given tank, in declaration order.
    pub fn furnaces_for_tank(&self, tank_id: &str) -> Vec<&Furnace> {
        self.furnaces.iter().filter(|f| f.tank_id == tank_id).collect()
    }
}

/// Machine-readable reason a scenario failed validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ViolationCode {
    NonFinite,
    NonpositiveCycleTime,
    NonpositiveCapacity,
    CycleExceedsCapacity,
    EfficiencyOutOfRange,
    NegativeIdleCostRate,
    ZeroRodsPerCycle,
    NegativeMargin,
    ZeroShifts,
    NegativeWage,
    NoFurnaces,
    NoTanks,
    DuplicateId,
    OrphanFurnace,
    UnfedTank,
    RatioExceeded,
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ViolationCode::NonFinite => "NON_FINITE",
            ViolationCode::NonpositiveCycleTime => "NONPOSITIVE_CYCLE_TIME",
            ViolationCode::NonpositiveCapacity => "NONPOSITIVE_CAPACITY",
            ViolationCode::CycleExceedsCapacity => "CYCLE_EXCEEDS_CAPACITY",
            ViolationCode::EfficiencyOutOfRange => "EFFICIENCY_OUT_OF_RANGE",
            ViolationCode::NegativeIdleCostRate => "NEGATIVE_IDLE_COST_RATE",
            ViolationCode::ZeroRodsPerCycle => "ZERO_RODS_PER_CYCLE",
            ViolationCode::NegativeMargin => "NEGATIVE_MARGIN",
            ViolationCode::ZeroShifts => "ZERO_SHIFTS",
            ViolationCode::NegativeWage => "NEGATIVE_WAGE",
            ViolationCode::NoFurnaces => "NO_FURNACES",
            ViolationCode::NoTanks => "NO_TANKS",
            ViolationCode::DuplicateId => "DUPLICATE_ID",
            ViolationCode::OrphanFurnace => "ORPHAN_FURNACE",
            ViolationCode::UnfedTank => "UNFED_TANK",
            ViolationCode::RatioExceeded => "RATIO_EXCEEDED",
        };
        f.write_str(s)
    }
}

/// One validation failure with a human-readable explanation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub message: String,
}

impl Violation {
    fn new(code: ViolationCode, message: impl Into<String>) -> Self {
        Violation { code, message: message.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

/// Checks every structural invariant and returns all violations found.
///
/// An empty result means the scenario is usable by the optimizer and the
/// schedule builder. Violations are reported in a deterministic order:
/// scenario-level checks first, then furnaces, tanks and labor in
/// declaration order.
pub fn validate(scenario: &Scenario) -> Vec<Violation> {
    let mut out = Vec::new();

    if scenario.furnaces.is_empty() {
        out.push(Violation::new(ViolationCode::NoFurnaces, "scenario has no furnaces"));
    }
    if scenario.tanks.is_empty() {
        out.push(Violation::new(ViolationCode::NoTanks, "scenario has no tanks"));
    }

    let mut seen: BTreeSet<&str> = BTreeSet::new();
    for id in scenario
        .furnaces
        .iter()
        .map(|f| f.id.as_str())
        .chain(scenario.tanks.iter().map(|t| t.id.as_str()))
    {
        if !seen.insert(id) {
            out.push(Violation::new(
                ViolationCode::DuplicateId,
                format!("id `{id}` is used more than once"),
            ));
        }
    }

    for f in &scenario.furnaces {
        let at = |field: &str| format!("furnace `{}` {field}", f.id);
        let mut finite = true;
        for (field, value) in [
            ("cycle_time_min", f.cycle_time_min),
            ("daily_capacity_min", f.daily_capacity_min),
            ("output_efficiency", f.output_efficiency),
            ("idle_cost_rate_usd_per_min", f.idle_cost_rate_usd_per_min),
        ] {
            if !value.is_finite() {
                finite = false;
                out.push(Violation::new(
                    ViolationCode::NonFinite,
                    format!("{} is not a finite number", at(field)),
                ));
            }
        }
        if !finite {
            continue;
        }
        if f.cycle_time_min <= 0.0 {
            out.push(Violation::new(
                ViolationCode::NonpositiveCycleTime,
                format!("{} must be > 0 (got {})", at("cycle_time_min"), f.cycle_time_min),
            ));
        }
        if f.daily_capacity_min <= 0.0 {
            out.push(Violation::new(
                ViolationCode::NonpositiveCapacity,
                format!("{} must be > 0 (got {})", at("daily_capacity_min"), f.daily_capacity_min),
            ));
        }
        if f.cycle_time_min > 0.0
            && f.daily_capacity_min > 0.0
            && f.cycle_time_min > f.daily_capacity_min
        {
            out.push(Violation::new(
                ViolationCode::CycleExceedsCapacity,
                format!(
                    "furnace `{}` cycle_time_min ({}) exceeds daily_capacity_min ({})",
                    f.id, f.cycle_time_min, f.daily_capacity_min
                ),
            ));
        }
        if !(f.output_efficiency > 0.0 && f.output_efficiency <= 1.0) {
            out.push(Violation::new(
                ViolationCode::EfficiencyOutOfRange,
                format!(
                    "{} must be in (0, 1] (got {})",
                    at("output_efficiency"),
                    f.output_efficiency
                ),
            ));
        }
        if f.idle_cost_rate_usd_per_min < 0.0 {
            out.push(Violation::new(
                ViolationCode::NegativeIdleCostRate,
                format!(
                    "{} must be >= 0 (got {})",
                    at("idle_cost_rate_usd_per_min"),
                    f.idle_cost_rate_usd_per_min
                ),
            ));
        }
        if scenario.tank(&f.tank_id).is_none() {
            out.push(Violation::new(
                ViolationCode::OrphanFurnace,
                format!("furnace `{}` points at unknown tank `{}`", f.id, f.tank_id),
            ));
        }
    }

    for t in &scenario.tanks {
        let at = |field: &str| format!("tank `{}` {field}", t.id);
        let mut finite = true;
        for (field, value) in [
            ("cycle_time_min", t.cycle_time_min),
            ("daily_capacity_min", t.daily_capacity_min),
            ("casting_efficiency", t.casting_efficiency),
            ("margin_per_rod_usd", t.margin_per_rod_usd),
        ] {
            if !value.is_finite() {
                finite = false;
                out.push(Violation::new(
                    ViolationCode::NonFinite,
                    format!("{} is not a finite number", at(field)),
                ));
            }
        }
        if !finite {
            continue;
        }
        if t.cycle_time_min <= 0.0 {
            out.push(Violation::new(
                ViolationCode::NonpositiveCycleTime,
                format!("{} must be > 0 (got {})", at("cycle_time_min"), t.cycle_time_min),
            ));
        }
        if t.daily_capacity_min <= 0.0 {
            out.push(Violation::new(
                ViolationCode::NonpositiveCapacity,
                format!("{} must be > 0 (got {})", at("daily_capacity_min"), t.daily_capacity_min),
            ));
        }
        if !(t.casting_efficiency > 0.0 && t.casting_efficiency <= 1.0) {
            out.push(Violation::new(
                ViolationCode::EfficiencyOutOfRange,
                format!(
                    "{} must be in (0, 1] (got {})",
                    at("casting_efficiency"),
                    t.casting_efficiency
                ),
            ));
        }
        if t.rods_per_cycle == 0 {
            out.push(Violation::new(
                ViolationCode::ZeroRodsPerCycle,
                format!("tank `{}` rods_per_cycle must be > 0", t.id),
            ));
        }
        if t.margin_per_rod_usd < 0.0 {
            out.push(Violation::new(
                ViolationCode::NegativeMargin,
                format!("{} must be >= 0 (got {})", at("margin_per_rod_usd"), t.margin_per_rod_usd),
            ));
        }

        let feeders = scenario.furnaces_for_tank(&t.id).len();
        if feeders == 0 && !scenario.furnaces.is_empty() {
            out.push(Violation::new(
                ViolationCode::UnfedTank,
                format!("tank `{}` has no furnace assigned", t.id),
            ));
        }
        if feeders > 2 {
            out.push(Violation::new(
                ViolationCode::RatioExceeded,
                format!(
                    "tank `{}` is fed by {feeders} furnaces; at most 2 furnaces may share a tank",
                    t.id
                ),
            ));
        }
    }

    if !scenario.labor.wage_usd_per_worker_per_day.is_finite() {
        out.push(Violation::new(
            ViolationCode::NonFinite,
            "labor wage_usd_per_worker_per_day is not a finite number",
        ));
    } else if scenario.labor.wage_usd_per_worker_per_day < 0.0 {
        out.push(Violation::new(
            ViolationCode::NegativeWage,
            format!(
                "labor wage_usd_per_worker_per_day must be >= 0 (got {})",
                scenario.labor.wage_usd_per_worker_per_day
            ),
        ));
    }
    if scenario.labor.shifts_per_day == 0 {
        out.push(Violation::new(ViolationCode::ZeroShifts, "labor shifts_per_day must be >= 1"));
    }

    out
}

/// Failure to turn a JSON document into a [`Scenario`].
#[derive(Debug, Error)]
pub enum ScenarioError {
    /// The document is not well-formed JSON.
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { message: String, line: usize, column: usize },
    /// The document is valid JSON but does not match the scenario schema.
    #[error("schema error: {message}")]
    Schema { message: String },
}

/// Parses a scenario from JSON text.
///
/// The schema is strict: missing fields, mistyped values and unknown
/// fields are all schema errors. Malformed JSON is a parse error carrying
/// line and column diagnostics. Loading does not validate plant
/// invariants; call [`validate`] for that.
pub fn load_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    serde_json::from_str(text).map_err(|e| match e.classify() {
        serde_json::error::Category::Data => ScenarioError::Schema { message: e.to_string() },
        _ => ScenarioError::Parse { message: e.to_string(), line: e.line(), column: e.column() },
    })
}

/// Serializes a scenario as pretty-printed JSON.
///
/// Output is deterministic: structurally equal scenarios produce
/// byte-identical documents, and `load_scenario(save_scenario(s))`
/// reconstructs `s` exactly.
pub fn save_scenario(scenario: &Scenario) -> String {
    let mut text = serde_json::to_string_pretty(scenario)
        .expect("scenario serialization cannot fail: no maps with non-string keys");
    text.push('\n');
    text
}
