//! Generators, oracle comparison and benchmarks for `bufsched`.

pub mod bench;
pub mod compare;
pub mod families;
pub mod gen;

pub use compare::{compare, largest_queue_schedule, Algo, CompareReport, Objective, Outcome, Scheduler};
pub use gen::{gen_family, gen_random, Family, GenError, GenParams};
