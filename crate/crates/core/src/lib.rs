//! Optimal offline packet scheduling for size-bounded switch buffers.
//!
//! Packets carry a release step, an exclusive deadline, a value and a
//! designated buffer; one packet leaves the switch per step. The crate
//! provides:
//!
//! - [`single_buffer`]: one buffer of capacity `B`. DOS maximises the number
//!   of delivered packets; [`single_buffer::greedy_edf`] maximises total
//!   value by greedy selection over EDF-feasible sets.
//! - [`multi_buffer`]: several buffers with a common deadline. The Tight
//!   Schedule maximises the count; [`multi_buffer::greedy_ts`] maximises
//!   value.
//! - [`oracle`]: exhaustive search for the general model on small inputs.
//! - [`trace`] and [`verify`]: the text formats and the schedule checker.
//!
//! Types are generic over the value scalar ([`Weight`]); the aliases at the
//! crate root fix it to `u64`.

pub mod error;
pub mod model;
pub mod multi_buffer;
pub mod oracle;
pub mod single_buffer;
pub mod trace;
pub mod verify;
pub mod weight;

pub use error::{Error, Result};
pub use model::{BufferId, PacketId, Schedule, Step, ValidationMode, Violation};
pub use multi_buffer::{compute_z_table, greedy_ts, ts_feasible, ts_run, ts_schedule, TsRule, ZBase, ZTable};
pub use oracle::{oracle_feasible, oracle_max_count, oracle_optimal};
pub use single_buffer::{dos_schedule, edf_feasible, fifo_schedule, greedy_edf, DeadlineQueue};
pub use trace::{parse_instance, parse_schedule, serialize_instance, serialize_schedule, TraceError};
pub use verify::{verify_schedule, ScheduleViolation};
pub use weight::Weight;

/// Default value scalar.
pub type Value = u64;
pub type Packet = model::Packet<Value>;
pub type Instance = model::Instance<Value>;
pub type ThroughputReport = verify::ThroughputReport<Value>;
pub type GreedyResult = single_buffer::GreedyResult<Value>;
pub type OracleResult = oracle::OracleResult<Value>;
