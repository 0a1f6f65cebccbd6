//! Star-product private information retrieval over Berman-family code pairs.

pub mod privacy;
pub mod protocol;
pub mod rng;
pub mod schedule;
pub mod scheme;

pub use privacy::{verify_privacy_empirical, verify_privacy_rank, PrivacyMode, PrivacyReport};
pub use protocol::{
    run_retrieval, run_retrieval_with, PirScheme, QueryMatrix, Recovered, Transcript,
};
pub use rng::{SimRng, SIM_RNG_NAME};
pub use schedule::{build_schedule, build_schedule_with, Assignment, IterationPlan, Schedule};
pub use scheme::{
    classify_pair, closed_form, derive_scheme, PairKind, Rate, RateTriple, SchemeConfig,
    SchemeDerived,
};
