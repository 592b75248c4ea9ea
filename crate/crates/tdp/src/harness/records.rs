//! Run records and their on-disk forms: a CSV table of scalar outcomes plus
//! a JSON sidecar holding the best solutions.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::encoding::{AlternativeGenotype, ClassicalGenotype, Genotype};
use crate::error::{Error, Result};
use crate::instance::ProblemInstance;
use crate::pressing::{optimize_pressings, Fitness, PressingPlan};

/// A solution document: model kind, dimensions, the template columns and
/// optional pressing counts. This is also the schema of standalone solution
/// files consumed by `tdp eval`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    /// `"classical"` or `"alternative"`.
    pub model: String,
    /// Row count of the matrix: variations (classical) or slots
    /// (alternative).
    pub rows: usize,
    /// Template count.
    pub cols: usize,
    /// One entry per template: per-variation counts (classical) or 1-based
    /// slot assignments (alternative).
    pub templates: Vec<Vec<u32>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub pressings: Option<Vec<u64>>,
}

impl SolutionRecord {
    pub fn from_genotype(g: &Genotype, pressings: Option<Vec<u64>>) -> Self {
        let (model, rows, templates): (&str, usize, Vec<Vec<u32>>) = match g {
            Genotype::Classical(c) => (
                "classical",
                c.variations(),
                c.columns().map(|col| col.to_vec()).collect(),
            ),
            Genotype::Alternative(a) => (
                "alternative",
                a.slots_per_template(),
                a.columns().map(|col| col.to_vec()).collect(),
            ),
        };
        SolutionRecord {
            model: model.to_string(),
            rows,
            cols: templates.len(),
            templates,
            pressings,
        }
    }

    /// Reconstructs the genotype. `slots` is needed to validate classical
    /// column sums.
    pub fn to_genotype(&self, inst: &ProblemInstance) -> Result<Genotype> {
        if self.templates.len() != self.cols {
            return Err(Error::InvalidInput(format!(
                "solution declares {} templates but lists {}",
                self.cols,
                self.templates.len()
            )));
        }
        match self.model.as_str() {
            "classical" => Ok(Genotype::Classical(ClassicalGenotype::from_columns(
                self.rows,
                inst.s,
                &self.templates,
            )?)),
            "alternative" => Ok(Genotype::Alternative(AlternativeGenotype::from_columns(
                inst.v,
                self.rows,
                &self.templates,
            )?)),
            other => Err(Error::InvalidInput(format!("unknown model `{other}`"))),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("solution serializes")
    }
}

/// Loads a solution document from JSON.
pub fn load_solution(reader: impl Read) -> Result<SolutionRecord> {
    serde_json::from_reader(reader)
        .map_err(|e| Error::parse(format!("{}:{}", e.line(), e.column()), e.to_string()))
}

/// Outcome of one seeded run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    /// Canonical algorithm notation.
    pub algorithm: String,
    pub instance: String,
    pub seed: u64,
    pub evals_used: u64,
    pub feasible: bool,
    /// Waste of the best solution; present only for feasible runs.
    pub best_waste: Option<u64>,
    /// Wall-clock seconds (informational; varies across reruns).
    pub wall_time: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub best_solution: Option<SolutionRecord>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub plan: Option<PressingPlan>,
}

impl RunRecord {
    /// Builds a record from a run's best point. The pressing plan is
    /// recomputed exactly (uncharged) for reporting.
    pub fn from_best(
        algorithm: String,
        inst: &ProblemInstance,
        seed: u64,
        evals_used: u64,
        best: Option<(Genotype, Fitness)>,
        wall_time: f64,
    ) -> Self {
        let mut record = RunRecord {
            algorithm,
            instance: inst.name.clone(),
            seed,
            evals_used,
            feasible: false,
            best_waste: None,
            wall_time,
            best_solution: None,
            plan: None,
        };
        if let Some((g, fit)) = best {
            let classical = match &g {
                Genotype::Classical(c) => c.clone(),
                Genotype::Alternative(a) => {
                    crate::encoding::alternative_to_classical(a, inst.v)
                        .expect("valid genotype")
                }
            };
            let plan = optimize_pressings(inst, &classical).expect("valid genotype");
            debug_assert_eq!(plan.fitness(), fit);
            record.feasible = fit.violation == 0;
            record.best_waste = record.feasible.then_some(fit.waste);
            record.best_solution =
                Some(SolutionRecord::from_genotype(&g, Some(plan.pressings.clone())));
            record.plan = Some(plan);
        }
        record
    }
}

/// Flat CSV row (stable column order for table diffing).
#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    algorithm: String,
    instance: String,
    seed: u64,
    evals_used: u64,
    feasible: bool,
    best_waste: Option<u64>,
    wall_time: f64,
}

/// Writes records as CSV plus a JSON sidecar (`<path>` and
/// `<path stem>.solutions.json`) carrying the best solutions and plans.
pub fn write_records(path: impl AsRef<Path>, records: &[RunRecord]) -> Result<()> {
    let path = path.as_ref();
    let mut writer = csv::Writer::from_path(path)?;
    for r in records {
        writer.serialize(CsvRow {
            algorithm: r.algorithm.clone(),
            instance: r.instance.clone(),
            seed: r.seed,
            evals_used: r.evals_used,
            feasible: r.feasible,
            best_waste: r.best_waste,
            wall_time: r.wall_time,
        })?;
    }
    writer.flush()?;

    #[derive(Serialize)]
    struct SidecarEntry<'a> {
        algorithm: &'a str,
        instance: &'a str,
        seed: u64,
        #[serde(skip_serializing_if = "Option::is_none")]
        best_solution: &'a Option<SolutionRecord>,
        #[serde(skip_serializing_if = "Option::is_none")]
        plan: &'a Option<PressingPlan>,
    }
    let sidecar: Vec<SidecarEntry> = records
        .iter()
        .map(|r| SidecarEntry {
            algorithm: &r.algorithm,
            instance: &r.instance,
            seed: r.seed,
            best_solution: &r.best_solution,
            plan: &r.plan,
        })
        .collect();
    let mut f = std::fs::File::create(sidecar_path(path))?;
    f.write_all(serde_json::to_string_pretty(&sidecar).expect("serializes").as_bytes())?;
    Ok(())
}

fn sidecar_path(path: &Path) -> std::path::PathBuf {
    path.with_extension("solutions.json")
}

/// Reads records back; the sidecar is optional (records then carry no
/// solutions).
pub fn read_records(path: impl AsRef<Path>) -> Result<Vec<RunRecord>> {
    let path = path.as_ref();
    let mut reader = csv::Reader::from_path(path)?;
    let mut records = Vec::new();
    for row in reader.deserialize() {
        let row: CsvRow = row?;
        records.push(RunRecord {
            algorithm: row.algorithm,
            instance: row.instance,
            seed: row.seed,
            evals_used: row.evals_used,
            feasible: row.feasible,
            best_waste: row.best_waste,
            wall_time: row.wall_time,
            best_solution: None,
            plan: None,
        });
    }

    let sidecar = sidecar_path(path);
    if sidecar.exists() {
        #[derive(Deserialize)]
        struct SidecarEntry {
            algorithm: String,
            instance: String,
            seed: u64,
            #[serde(default)]
            best_solution: Option<SolutionRecord>,
            #[serde(default)]
            plan: Option<PressingPlan>,
        }
        let text = std::fs::read_to_string(sidecar)?;
        let entries: Vec<SidecarEntry> = serde_json::from_str(&text)
            .map_err(|e| Error::parse(format!("{}:{}", e.line(), e.column()), e.to_string()))?;
        for entry in entries {
            if let Some(r) = records.iter_mut().find(|r| {
                r.algorithm == entry.algorithm
                    && r.instance == entry.instance
                    && r.seed == entry.seed
            }) {
                r.best_solution = entry.best_solution;
                r.plan = entry.plan;
            }
        }
    }
    Ok(records)
}
