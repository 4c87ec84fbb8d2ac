//! Solvency II demographic-risk engine for a cohort of equity-linked
//! endowment policies.
//!
//! The library covers the full chain from mortality data to capital:
//!
//! * [`mortality`] — data ingestion, Lee-Carter fitting and forecasting,
//!   first/second-order bases, and the one-extra-year enrichment refit.
//! * [`market`] — GBM equity model, Black-Scholes puts, zero-coupon
//!   discounting and the replicating portfolio of the guaranteed payoff.
//! * [`cohort`] — sums-insured generation and surviving-sums evolution.
//! * [`valuation`] — valuation-portfolio units, premium solving on the
//!   stressed basis, best estimates and the per-unit rates beta and eta.
//! * [`riskengine`] — Monte Carlo and closed-form Claims Development
//!   Results, SCR at 99.5% VaR, USP factor and the QIS2 baseline.
//! * [`oracle`] — independent brute-force verification routes.
//! * [`cli`] — configuration and the `fit`/`price`/`scr`/`oracle` commands.
//!
//! Every stochastic quantity is a pure function of the master seed through
//! keyed streams ([`rng::Streams`]), so runs reproduce bit for bit at any
//! worker count.

pub mod cli;
pub mod cohort;
pub mod error;
pub mod market;
pub mod mortality;
pub mod oracle;
pub mod riskengine;
pub mod rng;
pub mod stats;
pub mod valuation;

pub use error::{Error, Result};
