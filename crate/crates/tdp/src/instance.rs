//! Problem instances: demands, tolerances and the classic benchmark trio.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A template design problem instance.
///
/// `v` variations must be produced in `demands[i]` units (raw units, not
/// thousands), using `t` templates with `s` slots each. Production of each
/// variation may deviate from its demand within the closed band
/// `[(1 - lower_tol[i]) * demands[i], (1 + upper_tol[i]) * demands[i]]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub name: String,
    /// Number of product variations.
    #[serde(rename = "variations")]
    pub v: usize,
    /// Number of templates.
    #[serde(rename = "templates")]
    pub t: usize,
    /// Slots per template.
    #[serde(rename = "slots")]
    pub s: usize,
    /// Demand per variation, in units.
    pub demands: Vec<u64>,
    /// Underproduction tolerance fraction per variation, in `[0, 1]`.
    pub lower_tol: Vec<f64>,
    /// Overproduction tolerance fraction per variation, in `[0, 1]`.
    pub upper_tol: Vec<f64>,
}

impl ProblemInstance {
    /// Builds an instance with uniform tolerance on every variation.
    pub fn with_uniform_tolerance(
        name: impl Into<String>,
        t: usize,
        s: usize,
        demands: Vec<u64>,
        tol: f64,
    ) -> Result<Self> {
        let v = demands.len();
        let inst = ProblemInstance {
            name: name.into(),
            v,
            t,
            s,
            demands,
            lower_tol: vec![tol; v],
            upper_tol: vec![tol; v],
        };
        inst.validate()?;
        Ok(inst)
    }

    /// Checks every structural invariant, naming the offending field.
    pub fn validate(&self) -> Result<()> {
        if self.v < 1 {
            return Err(Error::validation("variations", "must be at least 1"));
        }
        if self.t < 1 {
            return Err(Error::validation("templates", "must be at least 1"));
        }
        if self.s < 1 {
            return Err(Error::validation("slots", "must be at least 1"));
        }
        if self.demands.len() != self.v {
            return Err(Error::validation(
                "demands",
                format!("expected {} entries, got {}", self.v, self.demands.len()),
            ));
        }
        if self.demands.iter().any(|&q| q == 0) {
            return Err(Error::validation("demands", "must be strictly positive"));
        }
        // Keeps all pressing-solver arithmetic inside i64.
        if self.demands.iter().any(|&q| q > 1_000_000_000) {
            return Err(Error::validation("demands", "must not exceed 10^9 units"));
        }
        for (field, tols) in [("lower_tol", &self.lower_tol), ("upper_tol", &self.upper_tol)] {
            if tols.len() != self.v {
                return Err(Error::validation(
                    field,
                    format!("expected {} entries, got {}", self.v, tols.len()),
                ));
            }
            if tols.iter().any(|&f| !(0.0..=1.0).contains(&f)) {
                return Err(Error::validation(field, "fractions must lie in [0.0, 1.0]"));
            }
        }
        Ok(())
    }

    /// Admissible production band for variation `i` (0-based), in units.
    ///
    /// Returns `((1 - l_i) * Q_i, (1 + u_i) * Q_i)`, both rounded half-up so
    /// that all downstream accounting stays integer-exact.
    pub fn tolerance_band(&self, i: usize) -> Result<(u64, u64)> {
        if i >= self.v {
            return Err(Error::Index { index: i, len: self.v });
        }
        let q = self.demands[i] as f64;
        let low = round_half_up(q * (1.0 - self.lower_tol[i]));
        let high = round_half_up(q * (1.0 + self.upper_tol[i]));
        Ok((low, high))
    }

    /// Bands for all variations, in variation order.
    pub fn tolerance_bands(&self) -> Vec<(u64, u64)> {
        (0..self.v).map(|i| self.tolerance_band(i).expect("index in range")).collect()
    }

    /// Total demand across variations.
    pub fn total_demand(&self) -> u64 {
        self.demands.iter().sum()
    }

    /// Serializes the instance to the JSON document format.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }
}

fn round_half_up(x: f64) -> u64 {
    (x + 0.5).floor().max(0.0) as u64
}

/// Loads and validates an instance from its JSON document form.
///
/// The document carries `name`, `variations`, `templates`, `slots`,
/// `demands[]`, `lower_tol[]` and `upper_tol[]`, with demands in raw units.
pub fn load_instance(reader: impl std::io::Read) -> Result<ProblemInstance> {
    let inst: ProblemInstance = serde_json::from_reader(reader).map_err(|e| {
        Error::parse(format!("{}:{}", e.line(), e.column()), e.to_string())
    })?;
    inst.validate()?;
    Ok(inst)
}

/// Returns one of the three classic benchmark instances by name.
///
/// All three use a 10% tolerance on every variation. Template counts are the
/// ones used by the published best solutions (2, 2 and 3 respectively).
pub fn builtin_instance(name: &str) -> Result<ProblemInstance> {
    let (t, s, demands_k): (usize, usize, &[u64]) = match name {
        "catfood" => (2, 9, &[250, 255, 260, 500, 500, 800, 1100]),
        "herbs" => (
            2,
            42,
            &[
                60, 60, 70, 70, 70, 70, 70, 70, 70, 80, 80, 80, 80, 90, 90, 90, 90, 90, 90, 100,
                100, 100, 100, 150, 230, 230, 230, 230, 280, 280,
            ],
        ),
        "magazine" => (
            3,
            40,
            &[
                50, 53, 55, 60, 85, 90, 100, 100, 105, 110, 137, 140, 140, 140, 150, 150, 150,
                150, 150, 150, 150, 150, 168, 170, 170, 195, 195, 200, 200, 200, 210, 210, 225,
                230, 230, 230, 250, 250, 250, 250, 250, 250, 250, 250, 265, 270, 270, 375, 375,
                405,
            ],
        ),
        other => return Err(Error::NotFound(other.to_string())),
    };
    let demands = demands_k.iter().map(|&q| q * 1000).collect();
    ProblemInstance::with_uniform_tolerance(name, t, s, demands, 0.10)
}

/// Names of the built-in instances, in canonical order.
pub const BUILTIN_NAMES: [&str; 3] = ["catfood", "herbs", "magazine"];

/// Resolves a CLI-style instance reference: either `builtin:<name>` or a
/// filesystem path to a JSON instance document.
pub fn resolve_instance(reference: &str) -> Result<ProblemInstance> {
    if let Some(name) = reference.strip_prefix("builtin:") {
        return builtin_instance(name);
    }
    let file = std::fs::File::open(reference)?;
    load_instance(std::io::BufReader::new(file))
}
