//! Quantified monitors for the maximum-principle, extremum, identity and
//! a priori claims. Every claim becomes a record with a signed margin and a
//! PASS/FLAG verdict; violations are data, never errors.

pub mod apriori;
pub mod coincidence;
mod constants;
pub mod identities;
pub mod max_principle;
pub mod maxima;
mod report;
pub mod stability;

pub use apriori::{apriori_report, AprioriReport};
pub use coincidence::{extremum_coincidence, CoincidenceReport, ExtremumSite};
pub use constants::{gradient_sq, AprioriConstants, DataNorms};
pub use identities::{identity_report, pressure_identity_residual, IdentityResiduals};
pub use max_principle::{max_principle_report, MaxPrincipleReport};
pub use maxima::{find_interior_maxima, interior_maxima, MaximumSite};
pub use report::{ClaimRecord, Counts, Observation, Report, Verdict};
pub use stability::{stability_report, StabilityReport};
