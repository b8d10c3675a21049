//! Machine checks of strategyproofness, approximation ratios, the
//! deterministic impossibility, and the lower-bound constructions.

mod impossibility;
mod monte_carlo;
mod ratio;
mod strategyproof;
mod witness;

use serde::{Deserialize, Serialize};

pub use impossibility::{
    impossibility_search, impossibility_search_with, parity_audit, FunctionTable,
    ImpossibilityReport, ParityReport, SearchConfig,
};
pub use monte_carlo::{approx_ratio_mc, binomial_interval, sample_frequencies, Z_99, Z_999};
pub use ratio::{approx_ratio_exact, opt_value, RatioEstimate, RatioMode, RatioValue};
pub use strategyproof::{check_gsp, check_sp, AuditReport, Counterexample, Property, Scope};
pub use witness::{cycle_lower_bound_witness, gsp_lower_bound_witness, CycleWitness, GspWitness};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Violated,
    Inconclusive,
}
