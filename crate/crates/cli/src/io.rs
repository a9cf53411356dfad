//! Population CSV and summary JSON files.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use attrest::population::summarize_population;
use attrest::{Population, PopulationSummary, PopulationUnit};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

fn parse_err(path: &Path, line: u64, message: impl Into<String>) -> CliError {
    CliError::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Reads a `phi,x` CSV. The population must be nondegenerate.
pub fn load_population_csv(path: &Path) -> Result<Population<f64>> {
    let file = File::open(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_population_csv(file, path)
}

pub fn read_population_csv<R: std::io::Read>(reader: R, path: &Path) -> Result<Population<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| parse_err(path, 1, e.to_string()))?
        .clone();
    if headers.len() != 2 || &headers[0] != "phi" || &headers[1] != "x" {
        return Err(parse_err(
            path,
            1,
            format!(
                "expected header `phi,x`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }

    let mut units = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(path, line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let phi = match &record[0] {
            "0" => 0u8,
            "1" => 1u8,
            other => {
                return Err(parse_err(
                    path,
                    line,
                    format!("phi must be 0 or 1, got `{other}`"),
                ))
            }
        };
        let x: f64 = record[1]
            .parse()
            .map_err(|_| parse_err(path, line, format!("x is not a number: `{}`", &record[1])))?;
        let unit = PopulationUnit::new(phi, x).map_err(|e| parse_err(path, line, e.to_string()))?;
        units.push(unit);
    }

    let context = path.display().to_string();
    let pop = Population::new(units).map_err(|e| CliError::core(&context, e))?;
    summarize_population(&pop).map_err(|e| CliError::core(&context, e))?;
    Ok(pop)
}

pub fn write_population_csv(pop: &Population<f64>, path: &Path) -> Result<()> {
    let io_err = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut file = File::create(path).map_err(io_err)?;
    let mut out = String::with_capacity(pop.size() * 24 + 6);
    out.push_str("phi,x\n");
    for u in pop.units() {
        // `{}` on f64 is the shortest representation that round-trips
        out.push_str(&format!("{},{}\n", u.phi(), u.x));
    }
    file.write_all(out.as_bytes()).map_err(io_err)
}

/// The seven published statistics of a design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SummaryInput {
    pub n: usize,
    #[serde(rename = "N")]
    pub population: usize,
    #[serde(rename = "P")]
    pub p: f64,
    #[serde(alias = "x_bar")]
    pub x_bar_pop: f64,
    #[serde(alias = "rho")]
    pub rho_pb: f64,
    pub c_p: f64,
    pub c_x: f64,
}

impl SummaryInput {
    /// Home-ownership vs. income statistics (n = 11 of N = 40).
    pub const TABLE1: SummaryInput = SummaryInput {
        n: 11,
        population: 40,
        p: 0.525,
        x_bar_pop: 14.4,
        rho_pb: 0.897,
        c_p: 0.963,
        c_x: 0.3085,
    };

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(CliError::Validation(msg));
        if self.n < 1 || self.n > self.population {
            return fail(format!(
                "require 1 <= n <= N, got n={} N={}",
                self.n, self.population
            ));
        }
        if self.population < 2 {
            return fail(format!("require N >= 2, got {}", self.population));
        }
        if !(self.p > 0.0 && self.p < 1.0) {
            return fail(format!("require 0 < P < 1, got {}", self.p));
        }
        if !(self.c_p > 0.0 && self.c_p.is_finite()) {
            return fail(format!("require c_p > 0, got {}", self.c_p));
        }
        if !(self.c_x > 0.0 && self.c_x.is_finite()) {
            return fail(format!("require c_x > 0, got {}", self.c_x));
        }
        if self.rho_pb.is_nan() || self.rho_pb.abs() > 1.0 {
            return fail(format!("require |rho_pb| <= 1, got {}", self.rho_pb));
        }
        if !(self.x_bar_pop.is_finite() && self.x_bar_pop != 0.0) {
            return fail(format!(
                "require finite nonzero x_bar_pop, got {}",
                self.x_bar_pop
            ));
        }
        Ok(())
    }

    pub fn population_summary(&self) -> PopulationSummary<f64> {
        PopulationSummary::from_moments(
            self.population,
            self.p,
            self.x_bar_pop,
            self.rho_pb,
            self.c_p,
            self.c_x,
        )
    }
}

pub fn load_summary_json(path: &Path) -> Result<SummaryInput> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_summary_json(&text, path)
}

pub fn parse_summary_json(text: &str, path: &Path) -> Result<SummaryInput> {
    let input: SummaryInput =
        serde_json::from_str(text).map_err(|e| parse_err(path, e.line() as u64, e.to_string()))?;
    input.validate()?;
    Ok(input)
}
