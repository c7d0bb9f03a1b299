//! Line balancing for aluminium melting and casting lines.
//!
//! A plant is described as a set of melting furnaces feeding tank casting
//! lines ([`scenario`]). The daily cycle counts that maximise profit are
//! found by expressing the line as a linear program ([`balance`]) and
//! solving it with the bundled simplex / branch-and-bound engine ([`lp`]).
//! The resulting plan can be expanded into a minute-resolution day schedule
//! and checked for physical consistency ([`schedule`]).

pub mod balance;
pub mod lp;
pub mod scenario;
pub mod schedule;
