//! Policy simulation on sampled label streams.

mod coupled;
mod export;
mod policy;
mod run;
mod state;

pub use coupled::{run_coupled, stopping_time, CoupledRecord, CoupledRunner, CoupledTrace, StoppingTime};
pub use export::{write_coupled_csv, write_policy_csv};
pub use policy::{Chooser, PolicySpec, TieBreak};
pub use run::{run_policy, EpochRecord, LabelStream, LabelTape, Runner, Trace};
pub use state::ReadState;
