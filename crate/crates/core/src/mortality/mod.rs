//! Mortality: data ingestion, Lee-Carter fitting and forecasting, and the
//! first/second-order demographic bases.

mod basis;
mod dataset;
mod lee_carter;

pub use basis::{build_basis, DemographicBasis, Distortion, Q_CLIP};
pub use dataset::{
    load_mortality_dataset, DataFormat, IngestStats, MortalityDataset, RATE_FLOOR,
};
pub use lee_carter::{
    enrich_and_refit, fit_lee_carter, forecast_q2, forecast_q2_from, forecast_q2_stochastic,
    q_from_rate, rate_from_q, DeathDraw, Enrichment, FitOutcome, LeeCarterParams,
};

pub(crate) use lee_carter::{enrichment_column, fit_logm, LogMatrix};
