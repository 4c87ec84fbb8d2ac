//! Mortality data ingestion: central death rates on a contiguous age x year
//! grid, from rates CSVs or deaths/exposures CSVs.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Floor applied to zero rates so logs stay finite.
pub const RATE_FLOOR: f64 = 1e-10;

/// Input file layout accepted by [`load_mortality_dataset`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DataFormat {
    /// Header `Year,Age,mx`, one row per (year, age).
    #[serde(rename = "rates-csv")]
    RatesCsv,
    /// Header `Year,Age,Deaths,Exposure`; the rate is deaths / exposure.
    #[serde(rename = "deaths-exposures-csv")]
    DeathsExposuresCsv,
}

/// Central death rates m_{x,t} on a full grid of contiguous ages and years.
#[derive(Debug, Clone, PartialEq)]
pub struct MortalityDataset {
    /// Calendar years, strictly increasing with unit step.
    pub years: Vec<i32>,
    /// Integer ages, strictly increasing with unit step.
    pub ages: Vec<u32>,
    /// Row-major |ages| x |years| matrix of rates, all finite and positive.
    rates: Vec<f64>,
    /// Optional death counts, same layout as `rates`.
    deaths: Option<Vec<f64>>,
    /// Optional exposures, same layout as `rates`.
    exposures: Option<Vec<f64>>,
}

/// Ingestion metadata returned alongside the dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct IngestStats {
    /// Cells whose rate was zero (or had zero exposure) and was floored.
    pub floored_cells: usize,
}

impl MortalityDataset {
    pub fn new(years: Vec<i32>, ages: Vec<u32>, rates: Vec<f64>) -> Result<Self> {
        let ds = MortalityDataset {
            years,
            ages,
            rates,
            deaths: None,
            exposures: None,
        };
        ds.validate()?;
        Ok(ds)
    }

    pub fn with_counts(
        years: Vec<i32>,
        ages: Vec<u32>,
        rates: Vec<f64>,
        deaths: Vec<f64>,
        exposures: Vec<f64>,
    ) -> Result<Self> {
        let mut ds = Self::new(years, ages, rates)?;
        assert_eq!(deaths.len(), ds.rates.len());
        assert_eq!(exposures.len(), ds.rates.len());
        ds.deaths = Some(deaths);
        ds.exposures = Some(exposures);
        Ok(ds)
    }

    fn validate(&self) -> Result<()> {
        if self.years.is_empty() || self.ages.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if self.rates.len() != self.years.len() * self.ages.len() {
            return Err(Error::EmptyDataset);
        }
        for w in self.years.windows(2) {
            if w[1] != w[0] + 1 {
                return Err(Error::NonContiguousYears(w[0]));
            }
        }
        for w in self.ages.windows(2) {
            if w[1] != w[0] + 1 {
                return Err(Error::NonContiguousAges(w[0]));
            }
        }
        for (i, &m) in self.rates.iter().enumerate() {
            if !(m.is_finite() && m > 0.0) {
                return Err(Error::NonFiniteLog {
                    age: self.ages[i / self.years.len()],
                    year: self.years[i % self.years.len()],
                });
            }
        }
        Ok(())
    }

    pub fn n_ages(&self) -> usize {
        self.ages.len()
    }

    pub fn n_years(&self) -> usize {
        self.years.len()
    }

    pub fn rate(&self, age_idx: usize, year_idx: usize) -> f64 {
        self.rates[age_idx * self.years.len() + year_idx]
    }

    pub fn rates(&self) -> &[f64] {
        &self.rates
    }

    pub fn exposures(&self) -> Option<&[f64]> {
        self.exposures.as_deref()
    }

    /// Exposure of the most recent year for the given age row, if present
    /// and positive.
    pub fn latest_exposure(&self, age_idx: usize) -> Option<f64> {
        let e = self.exposures.as_ref()?;
        let v = e[age_idx * self.years.len() + self.years.len() - 1];
        (v > 0.0).then_some(v)
    }
}

/// Loads a mortality dataset from CSV. Zero rates are floored at
/// [`RATE_FLOOR`]; the number of floored cells is reported in the stats.
pub fn load_mortality_dataset(
    path: impl AsRef<Path>,
    format: DataFormat,
) -> Result<(MortalityDataset, IngestStats)> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(file);

    let expected: &[&str] = match format {
        DataFormat::RatesCsv => &["year", "age", "mx"],
        DataFormat::DeathsExposuresCsv => &["year", "age", "deaths", "exposure"],
    };
    let malformed = |line: u64, msg: String| Error::MalformedRow {
        path: path.to_path_buf(),
        line,
        msg,
    };
    let headers = reader
        .headers()
        .map_err(|e| malformed(1, e.to_string()))?
        .clone();
    let got: Vec<String> = headers.iter().map(|h| h.to_ascii_lowercase()).collect();
    if got != expected {
        return Err(malformed(
            1,
            format!("expected header {:?}, got {:?}", expected.join(","), headers),
        ));
    }

    struct Cell {
        year: i32,
        age: u32,
        values: [f64; 2],
    }
    let mut cells: Vec<Cell> = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let line = idx as u64 + 2;
        let record = record.map_err(|e| malformed(line, e.to_string()))?;
        if record.len() != expected.len() {
            return Err(malformed(
                line,
                format!("expected {} fields, got {}", expected.len(), record.len()),
            ));
        }
        let field = |i: usize| -> Result<f64> {
            record[i]
                .parse::<f64>()
                .map_err(|e| malformed(line, format!("field {}: {e}", i + 1)))
        };
        let year = record[0]
            .parse::<i32>()
            .map_err(|e| malformed(line, format!("year: {e}")))?;
        let age = record[1]
            .parse::<u32>()
            .map_err(|e| malformed(line, format!("age: {e}")))?;
        let values = match format {
            DataFormat::RatesCsv => {
                let mx = field(2)?;
                if !mx.is_finite() || mx < 0.0 {
                    return Err(malformed(line, format!("rate must be >= 0, got {mx}")));
                }
                [mx, 0.0]
            }
            DataFormat::DeathsExposuresCsv => {
                let (d, e) = (field(2)?, field(3)?);
                if !d.is_finite() || d < 0.0 || !e.is_finite() || e < 0.0 {
                    return Err(malformed(line, "deaths and exposure must be >= 0".into()));
                }
                [d, e]
            }
        };
        cells.push(Cell { year, age, values });
    }
    if cells.is_empty() {
        return Err(Error::EmptyDataset);
    }

    let mut years: Vec<i32> = cells.iter().map(|c| c.year).collect();
    years.sort_unstable();
    years.dedup();
    let mut ages: Vec<u32> = cells.iter().map(|c| c.age).collect();
    ages.sort_unstable();
    ages.dedup();
    for w in years.windows(2) {
        if w[1] != w[0] + 1 {
            return Err(Error::NonContiguousYears(w[0]));
        }
    }
    for w in ages.windows(2) {
        if w[1] != w[0] + 1 {
            return Err(Error::NonContiguousAges(w[0]));
        }
    }

    let (na, ny) = (ages.len(), years.len());
    let mut grid: Vec<Option<[f64; 2]>> = vec![None; na * ny];
    for c in &cells {
        let ai = (c.age - ages[0]) as usize;
        let yi = (c.year - years[0]) as usize;
        let slot = &mut grid[ai * ny + yi];
        if slot.is_some() {
            return Err(malformed(
                0,
                format!("duplicate cell for year {}, age {}", c.year, c.age),
            ));
        }
        *slot = Some(c.values);
    }
    if let Some(missing) = grid.iter().position(|c| c.is_none()) {
        return Err(malformed(
            0,
            format!(
                "missing cell for year {}, age {}",
                years[missing % ny],
                ages[missing / ny]
            ),
        ));
    }

    let mut stats = IngestStats::default();
    let mut rates = vec![0.0; na * ny];
    let mut deaths = vec![0.0; na * ny];
    let mut exposures = vec![0.0; na * ny];
    for (i, cell) in grid.iter().enumerate() {
        let v = cell.unwrap();
        let raw = match format {
            DataFormat::RatesCsv => v[0],
            DataFormat::DeathsExposuresCsv => {
                deaths[i] = v[0];
                exposures[i] = v[1];
                if v[1] > 0.0 {
                    v[0] / v[1]
                } else {
                    0.0
                }
            }
        };
        rates[i] = if raw > 0.0 {
            raw
        } else {
            stats.floored_cells += 1;
            RATE_FLOOR
        };
    }

    let dataset = match format {
        DataFormat::RatesCsv => MortalityDataset::new(years, ages, rates)?,
        DataFormat::DeathsExposuresCsv => {
            MortalityDataset::with_counts(years, ages, rates, deaths, exposures)?
        }
    };
    Ok((dataset, stats))
}
