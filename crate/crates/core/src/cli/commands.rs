//! The `fit`, `price`, `scr` and `oracle` commands. Every payload written
//! here is a pure function of (config, seed); wall-clock timings go to a
//! sidecar log only.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cli::{RunConfig, SampleFormat};
use crate::cohort::{generate_sums, Cohort, CohortState, PremiumMode};
use crate::error::{Error, Result};
use crate::market::{
    build_hedging_portfolio, calibrate_gbm, put_price, call_price, HedgingPortfolio, MarketModel,
};
use crate::mortality::{
    build_basis, fit_lee_carter, load_mortality_dataset, DemographicBasis, Enrichment,
    IngestStats, LeeCarterParams, MortalityDataset,
};
use crate::oracle;
use crate::riskengine::{
    baseline_state, brute_force_idios, idios_cdr_compact, idios_cdr_five_term,
    idios_variance_closed_form, qis2_scr, scr_from_samples, simulate_idios, simulate_trend,
    CdrDistribution, RiskSetup, ScenarioConfig, ScrReport, TrendInputs, TAIL_P,
};
use crate::rng::{domain, Streams};
use crate::valuation::{
    best_estimate, beta_rate, eta_rate, solve_premium, Premium, ValuationBasis,
};

/// Which risk component `scr` runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum RiskKind {
    Idios,
    Trend,
    Both,
}

impl RiskKind {
    fn runs_idios(self) -> bool {
        matches!(self, RiskKind::Idios | RiskKind::Both)
    }
    fn runs_trend(self) -> bool {
        matches!(self, RiskKind::Trend | RiskKind::Both)
    }
}

/// Fitted-model file schema written by `fit` and read back via
/// `mortality.model_path`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FittedModelFile {
    #[serde(flatten)]
    pub params: LeeCarterParams,
    pub age_end: u32,
    pub year_end: i32,
    /// Share of the centered log-rate variance captured by the first
    /// singular value.
    pub explained_variance: f64,
}

/// Everything the commands derive from a validated config.
struct Resolved {
    config: RunConfig,
    data: MortalityDataset,
    ingest: IngestStats,
    params: LeeCarterParams,
    basis: DemographicBasis,
    cohort: Cohort,
    market: MarketModel,
    premium: Premium,
    streams: Streams,
}

fn resolve(config: &RunConfig) -> Result<Resolved> {
    config.validate()?;
    let (data, ingest) =
        load_mortality_dataset(&config.mortality.data_path, config.mortality.format)?;

    let params = match &config.mortality.model_path {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            let model: FittedModelFile = serde_json::from_str(&text)
                .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
            model.params
        }
        None => fit_lee_carter(&data)?.params,
    };

    let basis = build_basis(
        &params,
        config.cohort.age,
        config.cohort.term,
        config.mortality.stress_factor,
    )?;

    let streams = Streams::new(config.simulation.seed);
    let sums = match &config.cohort.sums_file {
        Some(path) => load_sums_csv(path)?,
        None => generate_sums(
            &config.cohort.sums,
            config.cohort.size,
            &mut streams.stream(&[domain::SUMS]),
        ),
    };
    let cohort = Cohort::new(
        config.cohort.age,
        config.cohort.term,
        sums,
        config.cohort.premium_mode,
    );

    let market = MarketModel {
        gbm: calibrate_gbm(
            config.market.mean_growth,
            config.market.cov_target,
            config.cov_horizon(),
            config.market.u0,
        ),
        r: config.market.r,
        i_gar: config.market.i_gar,
    };
    let premium = solve_premium(&cohort, &basis, &market)?;

    Ok(Resolved {
        config: config.clone(),
        data,
        ingest,
        params,
        basis,
        cohort,
        market,
        premium,
        streams,
    })
}

fn load_sums_csv(path: &Path) -> Result<Vec<f64>> {
    let file = fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file);
    let malformed = |line: u64, msg: String| Error::MalformedRow {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| malformed(1, e.to_string()))?
        .iter()
        .map(|h| h.to_ascii_lowercase())
        .collect();
    if headers != ["policyid", "sum"] {
        return Err(malformed(1, "expected header PolicyId,Sum".into()));
    }
    let mut sums = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let line = idx as u64 + 2;
        let record = record.map_err(|e| malformed(line, e.to_string()))?;
        let sum: f64 = record[1]
            .parse()
            .map_err(|e| malformed(line, format!("sum: {e}")))?;
        if !(sum > 0.0 && sum.is_finite()) {
            return Err(malformed(line, format!("sum must be > 0, got {sum}")));
        }
        sums.push(sum);
    }
    if sums.is_empty() {
        return Err(Error::InvalidConfig(format!(
            "{}: empty sums file",
            path.display()
        )));
    }
    Ok(sums)
}

fn ensure_out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    write_text(path, &text)
}

/// Appends a timing line to the sidecar log; payload files stay free of
/// timestamps so reruns are byte-identical.
fn log_sidecar(dir: &Path, line: &str) {
    let ts = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0);
    if let Ok(mut f) = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(dir.join("run.log"))
    {
        let _ = writeln!(f, "unix_ms={ts} {line}");
    }
}

/// Fixed-width float formatting used in CSV payloads: 17 significant digits,
/// enough to round-trip any f64.
fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt17_opt(x: Option<f64>) -> String {
    x.map(fmt17).unwrap_or_default()
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

/// `fit` results surfaced to the terminal.
#[derive(Debug, Clone, Serialize)]
pub struct FitArtifacts {
    pub model_path: PathBuf,
    pub explained_variance: f64,
    pub floored_cells: usize,
    pub n_ages: usize,
    pub n_years: usize,
    pub sum_b: f64,
    pub sum_k: f64,
}

pub fn cmd_fit(config: &RunConfig) -> Result<FitArtifacts> {
    config.validate()?;
    let started = Instant::now();
    let (data, ingest) =
        load_mortality_dataset(&config.mortality.data_path, config.mortality.format)?;
    let fit = fit_lee_carter(&data)?;
    ensure_out_dir(&config.output.dir)?;
    let model_path = config.output.dir.join("lee_carter.json");
    let file = FittedModelFile {
        age_end: fit.params.last_age(),
        year_end: fit.params.last_year(),
        explained_variance: fit.explained_variance,
        params: fit.params.clone(),
    };
    write_json(&model_path, &file)?;
    log_sidecar(
        &config.output.dir,
        &format!("cmd=fit elapsed_ms={}", started.elapsed().as_millis()),
    );
    Ok(FitArtifacts {
        model_path,
        explained_variance: fit.explained_variance,
        floored_cells: ingest.floored_cells,
        n_ages: fit.params.n_ages(),
        n_years: fit.params.n_years(),
        sum_b: fit.params.b.iter().sum(),
        sum_k: fit.params.k.iter().sum(),
    })
}

// ---------------------------------------------------------------------------
// price
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize)]
pub struct PriceArtifacts {
    pub path: PathBuf,
    pub premium_rate: f64,
    pub total_premium_income: f64,
    pub oracle_abs_diff: Option<f64>,
}

#[derive(Serialize)]
struct PriceFile<'a> {
    config: &'a RunConfig,
    premium: &'a Premium,
    /// Rate times total sums insured (single mode: collected at issue;
    /// annual mode: per payment while alive).
    total_premium_income: f64,
    hedging_portfolio: &'a HedgingPortfolio,
    put_unit_fraction_total: f64,
    verify: Option<PriceVerify>,
}

#[derive(Serialize)]
struct PriceVerify {
    oracle_rate: f64,
    abs_diff: f64,
}

pub fn cmd_price(config: &RunConfig, verify: bool) -> Result<PriceArtifacts> {
    let started = Instant::now();
    let r = resolve(config)?;
    let hedge = build_hedging_portfolio(r.cohort.total_sums(), &r.basis, r.cohort.n);
    let fraction_total: f64 = hedge.unit_fractions().iter().sum();
    let verify_block = verify.then(|| {
        let oracle_rate = oracle::premium_rate(
            &r.market,
            &r.basis.q1[..r.cohort.n],
            r.cohort.premium_mode,
        );
        PriceVerify {
            oracle_rate,
            abs_diff: (oracle_rate - r.premium.rate).abs(),
        }
    });
    let oracle_abs_diff = verify_block.as_ref().map(|v| v.abs_diff);

    ensure_out_dir(&config.output.dir)?;
    let path = config.output.dir.join("price.json");
    write_json(
        &path,
        &PriceFile {
            config,
            premium: &r.premium,
            total_premium_income: r.premium.rate * r.cohort.total_sums(),
            hedging_portfolio: &hedge,
            put_unit_fraction_total: fraction_total,
            verify: verify_block,
        },
    )?;
    log_sidecar(
        &config.output.dir,
        &format!("cmd=price elapsed_ms={}", started.elapsed().as_millis()),
    );
    Ok(PriceArtifacts {
        path,
        premium_rate: r.premium.rate,
        total_premium_income: r.premium.rate * r.cohort.total_sums(),
        oracle_abs_diff,
    })
}

// ---------------------------------------------------------------------------
// scr
// ---------------------------------------------------------------------------

/// One summary-table row per (t, risk).
#[derive(Debug, Clone, Serialize)]
pub struct SummaryRow {
    pub t: usize,
    pub risk: String,
    pub mean: f64,
    pub sd: f64,
    pub skewness: f64,
    pub scr: f64,
    pub factor: Option<f64>,
    pub closed_form_sd: Option<f64>,
    pub qis2_scr: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ScrArtifacts {
    pub rows: Vec<SummaryRow>,
    pub report_paths: Vec<PathBuf>,
    pub summary_path: PathBuf,
    pub warnings: Vec<String>,
}

#[derive(Serialize)]
struct ScrReportFile<'a> {
    config: &'a RunConfig,
    t: usize,
    risk: &'static str,
    alive_count: usize,
    total_alive_sums: f64,
    /// One-year second-order death probability at t.
    q: f64,
    /// Baseline (central-path) equity price at t.
    u_t: f64,
    best_estimate: f64,
    eta_central: Option<f64>,
    mean: f64,
    sd: f64,
    skewness: f64,
    scr: f64,
    factor: Option<f64>,
    closed_form_sd: Option<f64>,
    qis2_scr: Option<f64>,
    refit_failures: Option<usize>,
    warnings: Vec<String>,
}

pub fn cmd_scr(config: &RunConfig, risk: RiskKind) -> Result<ScrArtifacts> {
    let started = Instant::now();
    let r = resolve(config)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(r.config.simulation.workers)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("worker pool: {e}")))?;
    let result = pool.install(|| run_scr(&r, risk));
    log_sidecar(
        &config.output.dir,
        &format!(
            "cmd=scr risk={risk:?} elapsed_ms={}",
            started.elapsed().as_millis()
        ),
    );
    result
}

fn run_scr(r: &Resolved, risk: RiskKind) -> Result<ScrArtifacts> {
    let config = &r.config;
    ensure_out_dir(&config.output.dir)?;
    let n = r.cohort.n;
    let enrichment = Enrichment {
        synthetic_exposure: config.mortality.synthetic_exposure,
        ..Enrichment::default()
    };

    let mut rows = Vec::new();
    let mut report_paths = Vec::new();
    let mut warnings_all = Vec::new();

    let tail_count = (TAIL_P * config.simulation.scenarios as f64).ceil() as usize;
    let tail_warning = (config.simulation.scenarios as f64 * TAIL_P < 20.0).then(|| {
        format!(
            "only {tail_count} tail samples at p={TAIL_P}: the SCR quantile is noisy (H*p < 20)"
        )
    });
    let ingest_warning = (r.ingest.floored_cells > 0).then(|| {
        format!(
            "{} zero-rate cells floored at ingestion",
            r.ingest.floored_cells
        )
    });

    for &t in &config.simulation.t {
        let state = baseline_state(&r.cohort, &r.basis, t, &r.streams);
        let u_t = r.market.gbm.u0 * (r.market.gbm.mu * t as f64).exp();
        let setup = RiskSetup {
            market: &r.market,
            premium: &r.premium,
            q2: &r.basis.q2,
            n,
            u_t,
            state: &state,
        };
        let scenario = ScenarioConfig {
            t,
            n_scenarios: config.simulation.scenarios,
            seed: config.simulation.seed,
            eta_mode: config.simulation.eta_mode,
            trend: risk.runs_trend(),
        };
        let vb = ValuationBasis {
            demographic: &r.basis,
            market: &r.market,
            t,
            u_t,
        };
        let be = best_estimate(&state, &vb, n, &r.premium);
        let q = r.basis.q2[t];

        if risk.runs_idios() {
            let sim = simulate_idios(&scenario, &setup)?;
            let mut report = scr_from_samples(&sim.dist, TAIL_P)?;
            let s2 = state.raw_moment(2).unwrap_or(0.0);
            report.closed_form_sd = Some(
                idios_variance_closed_form(state.alive_count, q, s2, sim.eta_sq_mean).sqrt(),
            );
            report.qis2_scr = Some(qis2_scr(
                q,
                state.alive_count.max(1),
                state.total_alive_sums() * sim.eta_central.abs(),
            ));
            let mut warnings = Vec::new();
            warnings.extend(tail_warning.clone());
            warnings.extend(ingest_warning.clone());
            let (row, path) = emit_report(
                config,
                t,
                "idios",
                &state,
                q,
                u_t,
                be,
                Some(sim.eta_central),
                &sim.dist,
                &report,
                None,
                warnings,
            )?;
            warnings_all.extend(row.1.clone());
            rows.push(row.0);
            report_paths.push(path);
        }

        if risk.runs_trend() {
            let inputs = TrendInputs {
                params: &r.params,
                data: &r.data,
                enrichment: &enrichment,
                cohort_age: r.cohort.age,
            };
            let sim = simulate_trend(&scenario, &setup, &inputs)?;
            let report = scr_from_samples(&sim.dist, TAIL_P)?;
            let mut warnings = Vec::new();
            warnings.extend(tail_warning.clone());
            warnings.extend(ingest_warning.clone());
            if sim.refit_failures > 0 {
                warnings.push(format!("{} refit failures resampled", sim.refit_failures));
            }
            let (row, path) = emit_report(
                config,
                t,
                "trend",
                &state,
                q,
                u_t,
                be,
                None,
                &sim.dist,
                &report,
                Some(sim.refit_failures),
                warnings,
            )?;
            warnings_all.extend(row.1.clone());
            rows.push(row.0);
            report_paths.push(path);
        }
    }

    let summary_path = config.output.dir.join("scr_summary.csv");
    let mut csv_text =
        String::from("t,risk,mean,sd,skewness,scr,factor,closed_form_sd,qis2_scr\n");
    for row in &rows {
        csv_text.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            row.t,
            row.risk,
            fmt17(row.mean),
            fmt17(row.sd),
            fmt17(row.skewness),
            fmt17(row.scr),
            fmt17_opt(row.factor),
            fmt17_opt(row.closed_form_sd),
            fmt17_opt(row.qis2_scr),
        ));
    }
    write_text(&summary_path, &csv_text)?;

    Ok(ScrArtifacts {
        rows,
        report_paths,
        summary_path,
        warnings: warnings_all,
    })
}

#[allow(clippy::too_many_arguments)]
fn emit_report(
    config: &RunConfig,
    t: usize,
    risk: &'static str,
    state: &CohortState,
    q: f64,
    u_t: f64,
    best_estimate: f64,
    eta_central: Option<f64>,
    dist: &CdrDistribution,
    report: &ScrReport,
    refit_failures: Option<usize>,
    warnings: Vec<String>,
) -> Result<((SummaryRow, Vec<String>), PathBuf)> {
    let path = config
        .output
        .dir
        .join(format!("scr_t{t}_{risk}.json"));
    write_json(
        &path,
        &ScrReportFile {
            config,
            t,
            risk,
            alive_count: state.alive_count,
            total_alive_sums: state.total_alive_sums(),
            q,
            u_t,
            best_estimate,
            eta_central,
            mean: dist.mean,
            sd: dist.sd,
            skewness: dist.skewness,
            scr: report.scr,
            factor: report.factor,
            closed_form_sd: report.closed_form_sd,
            qis2_scr: report.qis2_scr,
            refit_failures,
            warnings: warnings.clone(),
        },
    )?;

    match config.output.samples {
        SampleFormat::None => {}
        SampleFormat::Csv => {
            let sample_path = config.output.dir.join(format!("samples_t{t}_{risk}.csv"));
            let mut text = String::with_capacity(dist.samples.len() * 24 + 16);
            text.push_str("cdr\n");
            for &x in &dist.samples {
                text.push_str(&fmt17(x));
                text.push('\n');
            }
            write_text(&sample_path, &text)?;
        }
        SampleFormat::Bin => {
            let sample_path = config.output.dir.join(format!("samples_t{t}_{risk}.bin"));
            let mut bytes = Vec::with_capacity(dist.samples.len() * 8);
            for &x in &dist.samples {
                bytes.extend_from_slice(&x.to_le_bytes());
            }
            fs::write(&sample_path, bytes).map_err(|source| Error::Io {
                path: sample_path.clone(),
                source,
            })?;
        }
    }

    if config.output.histogram_bins > 0 {
        let hist_path = config.output.dir.join(format!("hist_t{t}_{risk}.csv"));
        write_histogram(&hist_path, &dist.samples, config.output.histogram_bins)?;
    }

    let row = SummaryRow {
        t,
        risk: risk.to_string(),
        mean: dist.mean,
        sd: dist.sd,
        skewness: dist.skewness,
        scr: report.scr,
        factor: report.factor,
        closed_form_sd: report.closed_form_sd,
        qis2_scr: report.qis2_scr,
    };
    Ok(((row, warnings), path))
}

/// Plot-ready histogram: equal-width bins over the sample range.
fn write_histogram(path: &Path, samples: &[f64], bins: usize) -> Result<()> {
    let min = samples.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut text = String::from("bin_left,bin_right,count,density\n");
    if min == max {
        text.push_str(&format!("{},{},{},{}\n", fmt17(min), fmt17(max), samples.len(), 0.0));
        return write_text(path, &text);
    }
    let width = (max - min) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &x in samples {
        let idx = (((x - min) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let n = samples.len() as f64;
    for (i, &count) in counts.iter().enumerate() {
        let left = min + i as f64 * width;
        let right = left + width;
        text.push_str(&format!(
            "{},{},{},{}\n",
            fmt17(left),
            fmt17(right),
            count,
            fmt17(count as f64 / (n * width)),
        ));
    }
    write_text(path, &text)
}

// ---------------------------------------------------------------------------
// oracle
// ---------------------------------------------------------------------------

/// One verification check of the `oracle` subcommand.
#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

fn check(name: &str, pass: bool, detail: String) -> CheckOutcome {
    CheckOutcome {
        name: name.to_string(),
        pass,
        detail,
    }
}

/// Runs the brute-force verification suite on self-contained inputs plus the
/// configured market parameters.
pub fn cmd_oracle(config: &RunConfig) -> Result<Vec<CheckOutcome>> {
    let market = MarketModel {
        gbm: calibrate_gbm(
            config.market.mean_growth,
            config.market.cov_target,
            config.cov_horizon(),
            config.market.u0,
        ),
        r: config.market.r,
        i_gar: config.market.i_gar,
    };
    let mut outcomes = Vec::new();

    // Black-Scholes puts against lognormal quadrature, and put-call parity.
    let mut max_gap = 0.0f64;
    let mut max_parity = 0.0f64;
    let r_cont = market.r_continuous();
    for &moneyness in &[0.7, 1.0, 1.4] {
        for &sigma in &[0.1, 0.2633, 0.5] {
            for &tau in &[1.0, 5.0] {
                let (s, k) = (1.0, moneyness);
                let bs = put_price(s, k, r_cont, sigma, tau);
                let quad = oracle::put_price_quadrature(s, k, r_cont, sigma, tau);
                max_gap = max_gap.max((bs - quad).abs());
                let parity = call_price(s, k, r_cont, sigma, tau) - bs
                    - (s - k * (-r_cont * tau).exp());
                max_parity = max_parity.max(parity.abs());
            }
        }
    }
    outcomes.push(check(
        "put_vs_quadrature",
        max_gap < 1e-8,
        format!("max |bs - quadrature| = {max_gap:.3e}"),
    ));
    outcomes.push(check(
        "put_call_parity",
        max_parity < 1e-12,
        format!("max parity residual = {max_parity:.3e}"),
    ));

    // Premium against the cashflow-by-cashflow oracle.
    let q2: Vec<f64> = (0..10).map(|t| 0.003 * 1.08f64.powi(t)).collect();
    let basis = DemographicBasis {
        q1: q2.iter().map(|q| (q * 1.2).min(1.0 - 1e-9)).collect(),
        q2,
        cohort_age: 50,
        base_year: 2019,
    };
    let mut premium_gap = 0.0f64;
    for mode in [PremiumMode::Single, PremiumMode::Annual] {
        let cohort = Cohort::new(50, 10, vec![1.0; 10], mode);
        let premium = solve_premium(&cohort, &basis, &market)?;
        let want = oracle::premium_rate(&market, &basis.q1[..10], mode);
        premium_gap = premium_gap.max((premium.rate - want).abs() / want);
    }
    outcomes.push(check(
        "premium_vs_oracle",
        premium_gap < 1e-10,
        format!("max relative gap = {premium_gap:.3e}"),
    ));

    // Beta against the oracle at a fixed equity price.
    let premium = Premium {
        rate: 1.3,
        mode: PremiumMode::Single,
    };
    let beta = beta_rate(&market, &basis.q2[2..10], 2, 10, 1.1, &premium);
    let beta_oracle = oracle::beta_rate(&market, &basis.q2[2..10], 2, 10, 1.1, &premium);
    outcomes.push(check(
        "beta_vs_oracle",
        (beta - beta_oracle).abs() < 1e-10 * beta_oracle.abs().max(1.0),
        format!("engine {beta:.12} oracle {beta_oracle:.12}"),
    ));

    // Exact enumeration: closed-form variance and completeness.
    let sums = [1.0, 2.0, 3.0, 5.0, 8.0, 1.5, 2.5, 4.0, 6.0, 9.0];
    let (q, eta) = (0.1, 0.42);
    let exact = brute_force_idios(&sums, q, eta)?;
    let s2 = sums.iter().map(|s| s * s).sum::<f64>() / sums.len() as f64;
    let closed = idios_variance_closed_form(sums.len(), q, s2, eta * eta);
    outcomes.push(check(
        "enumeration_vs_closed_form",
        (exact.variance() - closed).abs() < 1e-10 * closed,
        format!("exact {} closed {closed}", exact.variance()),
    ));
    outcomes.push(check(
        "enumeration_completeness",
        (exact.total_probability() - 1.0).abs() < 1e-12 && exact.mean().abs() < 1e-9,
        format!(
            "total probability {}, mean {:.3e}",
            exact.total_probability(),
            exact.mean()
        ),
    ));

    // Equal-sums third cumulant from the cgf.
    let (l, qq, s, et) = (12usize, 0.08, 2.0, 0.6);
    let d = brute_force_idios(&vec![s; l], qq, et)?;
    let kappa3 = l as f64 * qq * (1.0 - qq) * (1.0 - 2.0 * qq) * s * s * s;
    let expect = -kappa3 * et * et * et;
    outcomes.push(check(
        "cgf_third_cumulant",
        (d.central_moment(3) - expect).abs() < 1e-9 * expect.abs(),
        format!("enumerated {:.6e} cgf {expect:.6e}", d.central_moment(3)),
    ));

    // Compact-form vs five-term CDR on random scenarios.
    use rand::Rng as _;
    let mut rng = Streams::new(config.simulation.seed).stream(&[domain::DEATHS, 0xC0FFEE]);
    let mut max_rel = 0.0f64;
    for _ in 0..200 {
        let n = rng.gen_range(2..=10);
        let t = rng.gen_range(0..n);
        let l = rng.gen_range(1..=12);
        let q2: Vec<f64> = (0..n).map(|_| rng.gen_range(0.001..0.4)).collect();
        let sums: Vec<f64> = (0..l).map(|_| rng.gen_range(0.5..5.0) * 1e5).collect();
        let mode = if rng.gen_bool(0.5) {
            PremiumMode::Single
        } else {
            PremiumMode::Annual
        };
        let cohort = Cohort::new(50, n, sums.clone(), mode);
        let b = DemographicBasis {
            q1: q2.iter().map(|q| (q * 1.2).min(0.999)).collect(),
            q2: q2.clone(),
            cohort_age: 50,
            base_year: 2019,
        };
        let premium = solve_premium(&cohort, &b, &market)?;
        let alive = sums.iter().filter(|&&s| s > 0.0).count();
        let state = CohortState {
            t,
            surviving_sums: sums,
            alive_count: alive,
        };
        let u_t1: f64 = rng.gen_range(0.5..3.0);
        let q_year = q2[t];
        let seed: u64 = rng.gen();
        let mut death_rng = Streams::new(seed).stream(&[domain::DEATHS, 0]);
        let (z, a1) =
            crate::riskengine::scenario_deaths(&state.surviving_sums, q_year, &mut death_rng);
        let t1 = t + 1;
        let beta = beta_rate(&market, &q2[t1..n], t1, n, u_t1, &premium);
        let payoff = crate::market::unit_benefit_price(&market, t1, t1, u_t1);
        let eta = eta_rate(payoff, beta);
        let compact = idios_cdr_compact(q_year * state.total_alive_sums(), z, eta);
        let five = idios_cdr_five_term(&market, &premium, &q2, n, t, u_t1, &state, z, a1);
        let scale = state.total_alive_sums().max(compact.abs()).max(five.abs());
        if scale > 0.0 {
            max_rel = max_rel.max((compact - five).abs() / scale);
        }
    }
    outcomes.push(check(
        "compact_vs_five_term",
        max_rel < 1e-9,
        format!("max relative gap = {max_rel:.3e} over 200 scenarios"),
    ));

    Ok(outcomes)
}
