use std::path::Path;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::generator::{generate_instance, trial_seed, GeneratorConfig};
use crate::assignment::Assignment;
use crate::enumeration::{
    brute_force_max_welfare, count_for_mode, EnumerationMode, DEFAULT_ENUMERATION_CAP,
};
use crate::error::{Error, Result};
use crate::evaluate::{envy_report, raw_valuation_sum};
use crate::greedy::{greedy_assign, greedy_matching_assign, rematch_rooms};
use crate::instance::Instance;
use crate::mwis::{mwis_assign, mwis_assign_with_deadline};
use crate::pricing::{min_epsilon_prices, pef_feasible, PricingMode};

/// Per-call limit for the runtime experiment.
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(300);

/// One CSV record. Optional fields are written as empty cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRow {
    pub experiment: String,
    pub m: usize,
    pub n: usize,
    pub alpha: f64,
    pub trial: usize,
    pub algorithm: String,
    pub pricing_mode: Option<String>,
    pub raw_welfare: Option<f64>,
    pub ratio_to_opt: Option<f64>,
    pub epsilon: Option<f64>,
    pub zero_envy_frac: Option<f64>,
    pub runtime_ms: f64,
    pub status: String,
}

impl ExperimentRow {
    fn new(
        experiment: &str,
        inst_shape: (usize, usize),
        alpha: f64,
        trial: usize,
        algorithm: &str,
    ) -> Self {
        Self {
            experiment: experiment.to_string(),
            m: inst_shape.0,
            n: inst_shape.1,
            alpha,
            trial,
            algorithm: algorithm.to_string(),
            pricing_mode: None,
            raw_welfare: None,
            ratio_to_opt: None,
            epsilon: None,
            zero_envy_frac: None,
            runtime_ms: 0.0,
            status: "ok".to_string(),
        }
    }
}

pub const CSV_HEADER: &str =
    "experiment,m,n,alpha,trial,algorithm,pricing_mode,raw_welfare,ratio_to_opt,epsilon,zero_envy_frac,runtime_ms,status";

pub fn write_csv<W: std::io::Write>(rows: &[ExperimentRow], out: W) -> std::io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()
}

pub fn read_csv<R: std::io::Read>(input: R) -> std::io::Result<Vec<ExperimentRow>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(std::io::Error::other)
}

/// Where dumped instances go; file names identify the experiment, shape,
/// alpha and trial.
#[derive(Debug, Clone, Copy)]
pub struct Dump<'a>(pub Option<&'a Path>);

impl Dump<'_> {
    fn write(
        &self,
        experiment: &str,
        alpha: f64,
        trial: usize,
        inst: &Instance,
    ) -> std::io::Result<()> {
        let Some(dir) = self.0 else { return Ok(()) };
        let name = instance_file_name(experiment, inst.tenants(), inst.rooms(), alpha, trial);
        let json = serde_json::to_vec(inst).map_err(std::io::Error::other)?;
        std::fs::write(dir.join(name), json)
    }
}

pub fn instance_file_name(
    experiment: &str,
    m: usize,
    n: usize,
    alpha: f64,
    trial: usize,
) -> String {
    format!("{experiment}_m{m}_n{n}_a{alpha}_t{trial}.json")
}

/// Shared run settings.
#[derive(Debug, Clone, Copy)]
pub struct RunConfig<'a> {
    pub trials: usize,
    pub seed: u64,
    pub dump: Dump<'a>,
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64() * 1e3)
}

fn instance_for(
    cfg: &RunConfig,
    stream_m: usize,
    stream_n: usize,
    alpha: f64,
    rent: f64,
    trial: usize,
) -> Result<Instance> {
    let seed = trial_seed(cfg.seed, &format!("uniform/{stream_m}x{stream_n}"), trial);
    generate_instance(&GeneratorConfig {
        m: stream_m,
        n: stream_n,
        alpha,
        rent,
        seed,
    })
}

/// Every `(m, n)` with `2 <= n <= 4` and `n <= m <= 2n`.
pub fn default_welfare_grid() -> Vec<(usize, usize)> {
    (2..=4)
        .flat_map(|n| (n..=2 * n).map(move |m| (m, n)))
        .collect()
}

pub const ALPHA_GRID: [f64; 7] = [0.0, 0.25, 0.5, 0.75, 1.0, 1.25, 1.5];

/// `brute` optimizes over all assignments, empty rooms included, and is the
/// reference for `ratio_to_opt`. `brute-no-empty` only enumerates assignments
/// that fill every room, the same space greedy searches.
pub const WELFARE_ALGORITHMS: [&str; 5] = [
    "greedy",
    "greedy-matching",
    "mwis",
    "brute",
    "brute-no-empty",
];

/// Runs one of the named algorithms.
pub fn solve_with(inst: &Instance, algorithm: &str) -> Result<Assignment> {
    match algorithm {
        "greedy" => greedy_assign(inst),
        "greedy-matching" => greedy_matching_assign(inst),
        "mwis" => mwis_assign(inst),
        "brute" => Ok(brute_force_max_welfare(
            inst,
            EnumerationMode::ALLOW_EMPTY,
            DEFAULT_ENUMERATION_CAP,
        )?
        .0),
        "brute-no-empty" => {
            Ok(
                brute_force_max_welfare(inst, EnumerationMode::NO_EMPTY, DEFAULT_ENUMERATION_CAP)?
                    .0,
            )
        }
        other => Err(Error::InvalidAssignment(format!(
            "unknown algorithm {other:?}"
        ))),
    }
}

fn welfare_trial(
    experiment: &str,
    cfg: &RunConfig,
    (m, n): (usize, usize),
    alpha: f64,
    trial: usize,
) -> Vec<ExperimentRow> {
    let row = |algorithm: &str| ExperimentRow::new(experiment, (m, n), alpha, trial, algorithm);
    let inst = match instance_for(cfg, m, n, alpha, 0.0, trial) {
        Ok(inst) => inst,
        Err(e) => {
            let mut r = row("generate");
            r.status = format!("error: {e}");
            return vec![r];
        }
    };
    if let Err(e) = cfg.dump.write(experiment, alpha, trial, &inst) {
        let mut r = row("dump");
        r.status = format!("error: {e}");
        return vec![r];
    }
    let (brute, brute_ms) = timed(|| {
        brute_force_max_welfare(&inst, EnumerationMode::ALLOW_EMPTY, DEFAULT_ENUMERATION_CAP)
    });
    let opt = brute.as_ref().ok().map(|(_, w)| *w + inst.rent());
    WELFARE_ALGORITHMS
        .iter()
        .map(|&alg| {
            let mut r = row(alg);
            let (result, ms) = if alg == "brute" {
                (brute.clone().map(|(a, _)| a), brute_ms)
            } else {
                timed(|| solve_with(&inst, alg))
            };
            r.runtime_ms = ms;
            match result.and_then(|a| raw_valuation_sum(&inst, &a)) {
                Ok(w) => {
                    r.raw_welfare = Some(w);
                    r.ratio_to_opt = opt.filter(|&o| o > 0.0).map(|o| w / o);
                }
                Err(e) => r.status = format!("error: {e}"),
            }
            r
        })
        .collect()
}

fn cell_skip_row(experiment: &str, (m, n): (usize, usize), alpha: f64) -> Option<ExperimentRow> {
    let count = count_for_mode(m, n, EnumerationMode::ALLOW_EMPTY).ok()?;
    if count <= DEFAULT_ENUMERATION_CAP.into() {
        return None;
    }
    let mut r = ExperimentRow::new(experiment, (m, n), alpha, 0, "brute");
    r.status = format!("skipped: {count} assignments exceed the enumeration cap");
    Some(r)
}

fn run_cells(
    experiment: &str,
    cells: &[((usize, usize), f64)],
    cfg: &RunConfig,
) -> Vec<ExperimentRow> {
    let mut rows = Vec::new();
    for &(shape, alpha) in cells {
        if let Some(skip) = cell_skip_row(experiment, shape, alpha) {
            rows.push(skip);
            continue;
        }
        let per_trial: Vec<Vec<ExperimentRow>> = (0..cfg.trials)
            .into_par_iter()
            .map(|t| welfare_trial(experiment, cfg, shape, alpha, t))
            .collect();
        rows.extend(per_trial.into_iter().flatten());
    }
    rows
}

/// Greedy, greedy with matching, MWIS and brute force on uniform instances
/// with zero rent. Ratios are raw welfare over the brute-force optimum.
pub fn run_welfare_experiment(grid: &[(usize, usize)], cfg: &RunConfig) -> Vec<ExperimentRow> {
    let cells: Vec<_> = grid.iter().map(|&s| (s, 0.0)).collect();
    run_cells("welfare", &cells, cfg)
}

/// The welfare experiment on one shape across single-preference offsets.
/// Instances share their uniform draws with the welfare experiment, so the
/// `alpha = 0` rows match that experiment's cell.
pub fn run_alpha_sweep(
    shape: (usize, usize),
    alphas: &[f64],
    cfg: &RunConfig,
) -> Vec<ExperimentRow> {
    let cells: Vec<_> = alphas.iter().map(|&a| (shape, a)).collect();
    run_cells("alpha", &cells, cfg)
}

pub const EPSILON_ALGORITHMS: [&str; 2] = ["mwis", "greedy-matching"];

fn epsilon_trial(
    cfg: &RunConfig,
    (m, n): (usize, usize),
    rent: f64,
    trial: usize,
) -> Vec<ExperimentRow> {
    const EXPERIMENT: &str = "epsilon";
    let row = |alg: &str| ExperimentRow::new(EXPERIMENT, (m, n), 0.0, trial, alg);
    let inst = match instance_for(cfg, m, n, 0.0, rent, trial) {
        Ok(inst) => inst,
        Err(e) => {
            let mut r = row("generate");
            r.status = format!("error: {e}");
            return vec![r];
        }
    };
    if let Err(e) = cfg.dump.write(EXPERIMENT, 0.0, trial, &inst) {
        let mut r = row("dump");
        r.status = format!("error: {e}");
        return vec![r];
    }
    let mut rows = Vec::new();
    for alg in EPSILON_ALGORITHMS {
        let (solved, solve_ms) =
            timed(|| solve_with(&inst, alg).and_then(|a| rematch_rooms(&inst, &a)));
        let a = match solved {
            Ok(a) => a,
            Err(e) => {
                let mut r = row(alg);
                r.status = format!("error: {e}");
                rows.push(r);
                continue;
            }
        };
        let raw = raw_valuation_sum(&inst, &a).ok();
        for mode in [PricingMode::TenantShares, PricingMode::EqualRoomSplit] {
            let mut r = row(alg);
            r.pricing_mode = Some(mode.name().to_string());
            r.raw_welfare = raw;
            let (priced, ms) = timed(|| {
                let sol = min_epsilon_prices(&inst, &a, mode)?;
                let report = envy_report(&inst, &a, &sol.tenant_prices)?;
                Ok::<_, Error>((sol, report))
            });
            r.runtime_ms = solve_ms + ms;
            match priced {
                Ok((sol, report)) => {
                    r.epsilon = Some(sol.epsilon);
                    r.zero_envy_frac = Some(report.zero_envy_fraction());
                    if sol.flips > 0 {
                        r.status = format!("ok: {} non-monotone flips", sol.flips);
                    }
                }
                Err(e) => r.status = format!("error: {e}"),
            }
            rows.push(r);
        }
        let mut r = row(alg);
        r.pricing_mode = Some("pef".to_string());
        r.raw_welfare = raw;
        let (pef, ms) = timed(|| pef_feasible(&inst, &a));
        r.runtime_ms = ms;
        r.status = match pef {
            Ok(true) => "feasible".to_string(),
            Ok(false) => "infeasible".to_string(),
            Err(e) => format!("error: {e}"),
        };
        rows.push(r);
    }
    rows
}

/// Minimum-ε prices in both modes for MWIS and greedy-with-matching
/// assignments, plus a person envy-freeness feasibility row per algorithm.
pub fn run_epsilon_experiment(
    shape: (usize, usize),
    rent: f64,
    cfg: &RunConfig,
) -> Vec<ExperimentRow> {
    let per_trial: Vec<Vec<ExperimentRow>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| epsilon_trial(cfg, shape, rent, t))
        .collect();
    per_trial.into_iter().flatten().collect()
}

/// Wall time of MWIS on `m = 2n` instances. Trials run one at a time so the
/// timings do not compete for cores.
pub fn run_runtime_experiment(
    ns: &[usize],
    timeout: Duration,
    cfg: &RunConfig,
) -> Vec<ExperimentRow> {
    let mut rows = Vec::new();
    for &n in ns {
        let m = 2 * n;
        for trial in 0..cfg.trials {
            let mut r = ExperimentRow::new("runtime", (m, n), 0.0, trial, "mwis");
            let inst = match instance_for(cfg, m, n, 0.0, 0.0, trial) {
                Ok(inst) => inst,
                Err(e) => {
                    r.status = format!("error: {e}");
                    rows.push(r);
                    continue;
                }
            };
            if let Err(e) = cfg.dump.write("runtime", 0.0, trial, &inst) {
                r.status = format!("error: {e}");
                rows.push(r);
                continue;
            }
            let start = Instant::now();
            let out = mwis_assign_with_deadline(&inst, Some(start + timeout));
            r.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
            match out {
                Ok(run) => r.raw_welfare = Some(run.weight),
                Err(Error::Timeout(_)) => r.status = "timeout".to_string(),
                Err(e) => r.status = format!("error: {e}"),
            }
            rows.push(r);
        }
    }
    rows
}
