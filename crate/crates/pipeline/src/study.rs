//! Monte Carlo comparison of the estimators on simulated scenarios.
//!
//! Replication `r` of scenario `s` is drawn from stream `(s << 32) | r` of
//! the configured seed, so results do not depend on the number of worker
//! threads or on which replications were computed in an earlier run.
//!
//! A replication enters the summary of its scenario only if every
//! estimator converged on it; the excluded replication indices are listed
//! in the report.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::{PI, TAU};
use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::Path;

use buoyspec::classical::{fit_competitors, Competitor, CompetitorSettings};
use buoyspec::discrete_sampling::ChannelSet;
use buoyspec::inference::{fit, FitConfig, Objective, ParameterBounds};
use buoyspec::simulation::Simulator;
use buoyspec::{Param, Parameters, PhysicalContext, SamplingScheme, WaterDepth, N_PARAMS};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{PipelineConfig, ScenarioSpec};
use crate::error::{PipelineError, Result};
use crate::format::{float, parse_float, Json};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    /// Debiased Whittle on all three channels.
    Dw,
    /// Debiased Whittle on heave only (marginal parameters).
    DwUnivariate,
    Whittle,
    LsMlm,
    LsMem,
    MomentsMatching,
}

impl Estimator {
    pub const ALL: [Estimator; 6] = [
        Estimator::Dw,
        Estimator::DwUnivariate,
        Estimator::Whittle,
        Estimator::LsMlm,
        Estimator::LsMem,
        Estimator::MomentsMatching,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Estimator::Dw => "dw",
            Estimator::DwUnivariate => "dw_univariate",
            Estimator::Whittle => "whittle",
            Estimator::LsMlm => "ls_mlm",
            Estimator::LsMem => "ls_mem",
            Estimator::MomentsMatching => "moments_matching",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.name() == s)
    }

    pub fn estimates(self, p: Param) -> bool {
        self != Estimator::DwUnivariate || p.is_marginal()
    }

    fn competitor(self) -> Option<Competitor> {
        match self {
            Estimator::LsMlm => Some(Competitor::LsMlm),
            Estimator::LsMem => Some(Competitor::LsMem),
            Estimator::MomentsMatching => Some(Competitor::MomentsMatching),
            _ => None,
        }
    }
}

/// One estimator's output on one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateRow {
    pub scenario: usize,
    pub replication: usize,
    pub estimator: Estimator,
    pub converged: bool,
    pub iterations: usize,
    /// NaN for parameters the estimator does not estimate.
    pub theta: [f64; N_PARAMS],
    /// Expected-information standard errors; NaN for the competitors.
    pub std_errors: [f64; N_PARAMS],
}

impl EstimateRow {
    fn key(&self) -> (usize, usize, Estimator) {
        (self.scenario, self.replication, self.estimator)
    }
}

struct ScenarioPlan {
    simulator: Simulator,
    low_cut: f64,
    high_cut: f64,
}

fn stream(scenario: usize, replication: usize) -> u64 {
    ((scenario as u64) << 32) | replication as u64
}

fn run_replication(
    plan: &ScenarioPlan,
    s: usize,
    r: usize,
    config: &PipelineConfig,
    ctx: PhysicalContext,
) -> Result<Vec<EstimateRow>> {
    let study = &config.study;
    let sample = plan.simulator.sample(config.seed, stream(s, r))?;
    let mut rows = Vec::with_capacity(study.estimators.len());
    let nan = [f64::NAN; N_PARAMS];
    let base = FitConfig {
        ctx,
        alias_folds: config.alias_folds,
        optimizer: config.optimizer,
        ..FitConfig::default().with_band(plan.low_cut, plan.high_cut)
    };
    let competitors: Vec<Competitor> = study
        .estimators
        .iter()
        .filter_map(|e| e.competitor())
        .collect();
    let competitor_fits = if competitors.is_empty() {
        Vec::new()
    } else {
        let settings = CompetitorSettings {
            low_cut: plan.low_cut,
            high_cut: plan.high_cut,
            ..study.competitors
        };
        fit_competitors(&sample, &ctx, &competitors, &settings).unwrap_or_else(|e| {
            log::warn!("scenario {s} replication {r}: competitor fits failed: {e}");
            Vec::new()
        })
    };
    let failed = |e: Estimator| EstimateRow {
        scenario: s,
        replication: r,
        estimator: e,
        converged: false,
        iterations: 0,
        theta: nan,
        std_errors: nan,
    };
    for &e in &study.estimators {
        let row = match e {
            Estimator::Dw | Estimator::DwUnivariate | Estimator::Whittle => {
                let cfg = match e {
                    Estimator::Dw => base.clone(),
                    Estimator::DwUnivariate => FitConfig {
                        channels: ChannelSet::VerticalOnly,
                        ..base.clone()
                    },
                    _ => base.clone().with_objective(Objective::Whittle),
                };
                let f = match fit(&sample, &cfg) {
                    Ok(f) => f,
                    Err(err) => {
                        log::warn!("scenario {s} replication {r}: {} failed: {err}", e.name());
                        rows.push(failed(e));
                        continue;
                    }
                };
                let mut theta = f.theta_hat.to_array();
                for p in Param::ALL {
                    if !e.estimates(p) {
                        theta[p as usize] = f64::NAN;
                    }
                }
                EstimateRow {
                    scenario: s,
                    replication: r,
                    estimator: e,
                    converged: f.converged,
                    iterations: f.iterations,
                    theta,
                    std_errors: f.std_errors,
                }
            }
            _ => {
                let c = e.competitor().expect("competitor estimator");
                let Some(f) = competitor_fits.iter().find(|f| f.competitor == c) else {
                    rows.push(failed(e));
                    continue;
                };
                EstimateRow {
                    scenario: s,
                    replication: r,
                    estimator: e,
                    converged: f.converged,
                    iterations: f.marginal.iterations + f.spreading.iterations,
                    theta: f.theta_hat.to_array(),
                    std_errors: nan,
                }
            }
        };
        rows.push(row);
    }
    Ok(rows)
}

fn estimates_header() -> Vec<String> {
    let mut cols: Vec<String> = [
        "scenario",
        "replication",
        "estimator",
        "converged",
        "iterations",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    cols.extend(Param::ALL.iter().map(|p| p.name().to_string()));
    cols.extend(Param::ALL.iter().map(|p| format!("{}_se", p.name())));
    cols
}

fn estimate_record(row: &EstimateRow, names: &[ScenarioSpec]) -> Vec<String> {
    let mut rec = vec![
        names[row.scenario].name.clone(),
        row.replication.to_string(),
        row.estimator.name().to_string(),
        row.converged.to_string(),
        row.iterations.to_string(),
    ];
    rec.extend(row.theta.iter().map(|&v| float(v)));
    rec.extend(row.std_errors.iter().map(|&v| float(v)));
    rec
}

fn read_estimates(path: &Path, scenarios: &[ScenarioSpec]) -> Result<Vec<EstimateRow>> {
    let mut rdr = csv::Reader::from_path(path)
        .map_err(|e| PipelineError::Data(format!("{}: {e}", path.display())))?;
    let header: Vec<String> = rdr
        .headers()
        .map_err(|e| PipelineError::Data(format!("{}: {e}", path.display())))?
        .iter()
        .map(String::from)
        .collect();
    if header != estimates_header() {
        return Err(PipelineError::Data(format!(
            "{}: unexpected columns",
            path.display()
        )));
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let bad = |m: &str| PipelineError::Parse {
            path: path.display().to_string(),
            row: i + 1,
            line: i + 2,
            message: m.to_string(),
        };
        // A truncated last line from an interrupted run is dropped.
        let Ok(rec) = rec else { break };
        if rec.len() != 5 + 2 * N_PARAMS {
            break;
        }
        let scenario = scenarios
            .iter()
            .position(|s| s.name == rec[0])
            .ok_or_else(|| bad("unknown scenario"))?;
        let num = |k: usize| parse_float(&rec[k]).ok_or_else(|| bad("bad number"));
        out.push(EstimateRow {
            scenario,
            replication: rec[1].parse().map_err(|_| bad("bad replication"))?,
            estimator: Estimator::from_name(&rec[2]).ok_or_else(|| bad("unknown estimator"))?,
            converged: rec[3].parse().map_err(|_| bad("bad flag"))?,
            iterations: rec[4].parse().map_err(|_| bad("bad iteration count"))?,
            theta: std::array::from_fn(|k| num(5 + k).unwrap_or(f64::NAN)),
            std_errors: std::array::from_fn(|k| num(5 + N_PARAMS + k).unwrap_or(f64::NAN)),
        });
    }
    Ok(out)
}

fn manifest(config: &PipelineConfig) -> String {
    let m = serde_json::json!({
        "seed": config.seed,
        "study": config.study,
        "optimizer": config.optimizer,
        "alias_folds": config.alias_folds,
        "gravity": config.gravity,
        "depth": config.depth,
    });
    serde_json::to_string_pretty(&m).expect("config serialises") + "\n"
}

/// Distance within which an estimate counts as sitting on a bound.
pub const BOUNDARY_COUNT_TOL: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq)]
pub struct ParameterSummary {
    pub parameter: Param,
    pub truth: f64,
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    pub bias: f64,
    pub std: f64,
    pub rmse: f64,
    /// Mean of the reported standard errors (NaN when none are reported).
    pub mean_std_error: f64,
    pub at_lower: usize,
    pub at_upper: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorSummary {
    pub estimator: Estimator,
    /// Converged replications before exclusion.
    pub converged: usize,
    pub parameters: Vec<ParameterSummary>,
}

impl EstimatorSummary {
    pub fn get(&self, p: Param) -> Option<&ParameterSummary> {
        self.parameters.iter().find(|s| s.parameter == p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSummary {
    pub name: String,
    pub truth: Parameters,
    pub replications: usize,
    pub excluded: Vec<usize>,
    pub estimators: Vec<EstimatorSummary>,
}

impl ScenarioSummary {
    pub fn estimator(&self, e: Estimator) -> Option<&EstimatorSummary> {
        self.estimators.iter().find(|s| s.estimator == e)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyReport {
    pub scenarios: Vec<ScenarioSummary>,
    pub rows: Vec<EstimateRow>,
}

fn wrap(d: f64) -> f64 {
    (d + PI).rem_euclid(TAU) - PI
}

fn summarise_parameter(
    p: Param,
    truth: f64,
    values: &[f64],
    ses: &[f64],
    bounds: &ParameterBounds,
) -> ParameterSummary {
    let count = values.len();
    let m = count as f64;
    let dev: Vec<f64> = values
        .iter()
        .map(|&v| {
            if p == Param::PhiM {
                wrap(v - truth)
            } else {
                v - truth
            }
        })
        .collect();
    let bias = dev.iter().sum::<f64>() / m;
    let mean = truth + bias;
    let std = if count > 1 {
        (dev.iter().map(|d| (d - bias).powi(2)).sum::<f64>() / (m - 1.0)).sqrt()
    } else {
        f64::NAN
    };
    let rmse = (dev.iter().map(|d| d * d).sum::<f64>() / m).sqrt();
    let mut sorted_dev = dev.clone();
    sorted_dev.sort_by(f64::total_cmp);
    let median = if count == 0 {
        f64::NAN
    } else if count % 2 == 1 {
        truth + sorted_dev[count / 2]
    } else {
        truth + 0.5 * (sorted_dev[count / 2 - 1] + sorted_dev[count / 2])
    };
    let finite_se: Vec<f64> = ses.iter().copied().filter(|v| v.is_finite()).collect();
    let mean_std_error = if finite_se.is_empty() {
        f64::NAN
    } else {
        finite_se.iter().sum::<f64>() / finite_se.len() as f64
    };
    let (lo, hi) = (bounds.lower(p), bounds.upper(p));
    ParameterSummary {
        parameter: p,
        truth,
        count,
        mean,
        median,
        bias,
        std,
        rmse,
        mean_std_error,
        at_lower: values
            .iter()
            .filter(|&&v| lo.is_finite() && (v - lo).abs() <= BOUNDARY_COUNT_TOL)
            .count(),
        at_upper: values
            .iter()
            .filter(|&&v| hi.is_finite() && (v - hi).abs() <= BOUNDARY_COUNT_TOL)
            .count(),
    }
}

/// Builds the per-scenario summaries from sorted estimate rows.
pub fn summarise(
    rows: &[EstimateRow],
    scenarios: &[ScenarioSpec],
    estimators: &[Estimator],
    replications: usize,
) -> Vec<ScenarioSummary> {
    let bounds = ParameterBounds::default();
    let mut by_rep: BTreeMap<(usize, usize), Vec<&EstimateRow>> = BTreeMap::new();
    for r in rows {
        by_rep
            .entry((r.scenario, r.replication))
            .or_default()
            .push(r);
    }
    scenarios
        .iter()
        .enumerate()
        .map(|(s, spec)| {
            let usable = |r: &EstimateRow| {
                r.converged
                    && Param::ALL
                        .iter()
                        .all(|&p| !r.estimator.estimates(p) || r.theta[p as usize].is_finite())
            };
            let mut included = BTreeSet::new();
            let mut excluded = Vec::new();
            for rep in 0..replications {
                let ok = by_rep.get(&(s, rep)).is_some_and(|rs| {
                    estimators
                        .iter()
                        .all(|e| rs.iter().any(|r| r.estimator == *e && usable(r)))
                });
                if ok {
                    included.insert(rep);
                } else {
                    excluded.push(rep);
                }
            }
            let truth = spec.theta.to_array();
            let estimators = estimators
                .iter()
                .map(|&e| {
                    let mine: Vec<&EstimateRow> = rows
                        .iter()
                        .filter(|r| r.scenario == s && r.estimator == e)
                        .collect();
                    let converged = mine
                        .iter()
                        .filter(|r| r.replication < replications && r.converged)
                        .count();
                    let kept: Vec<&&EstimateRow> = mine
                        .iter()
                        .filter(|r| included.contains(&r.replication))
                        .collect();
                    let parameters = Param::ALL
                        .iter()
                        .filter(|&&p| e.estimates(p))
                        .map(|&p| {
                            let i = p as usize;
                            let values: Vec<f64> = kept.iter().map(|r| r.theta[i]).collect();
                            let ses: Vec<f64> = kept.iter().map(|r| r.std_errors[i]).collect();
                            summarise_parameter(p, truth[i], &values, &ses, &bounds)
                        })
                        .collect();
                    EstimatorSummary {
                        estimator: e,
                        converged,
                        parameters,
                    }
                })
                .collect();
            ScenarioSummary {
                name: spec.name.clone(),
                truth: spec.theta,
                replications,
                excluded,
                estimators,
            }
        })
        .collect()
}

pub fn summary_json(report: &[ScenarioSummary], config: &PipelineConfig) -> Json {
    let study = &config.study;
    let scenarios = report
        .iter()
        .map(|sc| {
            Json::obj([
                ("name", Json::str(&sc.name)),
                (
                    "truth",
                    Json::Obj(
                        Param::ALL
                            .iter()
                            .map(|&p| (p.name().to_string(), Json::Num(sc.truth.get(p))))
                            .collect(),
                    ),
                ),
                ("replications", Json::Int(sc.replications as i64)),
                (
                    "included",
                    Json::Int((sc.replications - sc.excluded.len()) as i64),
                ),
                (
                    "excluded",
                    Json::Arr(sc.excluded.iter().map(|&r| Json::Int(r as i64)).collect()),
                ),
                (
                    "estimators",
                    Json::Arr(
                        sc.estimators
                            .iter()
                            .map(|es| {
                                Json::obj([
                                    ("estimator", Json::str(es.estimator.name())),
                                    ("converged", Json::Int(es.converged as i64)),
                                    (
                                        "parameters",
                                        Json::Arr(
                                            es.parameters
                                                .iter()
                                                .map(|ps| {
                                                    Json::obj([
                                                        (
                                                            "parameter",
                                                            Json::str(ps.parameter.name()),
                                                        ),
                                                        ("truth", Json::Num(ps.truth)),
                                                        ("count", Json::Int(ps.count as i64)),
                                                        ("mean", Json::Num(ps.mean)),
                                                        ("median", Json::Num(ps.median)),
                                                        ("bias", Json::Num(ps.bias)),
                                                        ("std", Json::Num(ps.std)),
                                                        ("rmse", Json::Num(ps.rmse)),
                                                        (
                                                            "mean_std_error",
                                                            Json::Num(ps.mean_std_error),
                                                        ),
                                                        (
                                                            "at_lower_bound",
                                                            Json::Int(ps.at_lower as i64),
                                                        ),
                                                        (
                                                            "at_upper_bound",
                                                            Json::Int(ps.at_upper as i64),
                                                        ),
                                                    ])
                                                })
                                                .collect(),
                                        ),
                                    ),
                                ])
                            })
                            .collect(),
                    ),
                ),
            ])
        })
        .collect();
    Json::obj([
        ("seed", Json::Int(config.seed as i64)),
        ("n", Json::Int(study.n as i64)),
        ("delta", Json::Num(study.delta)),
        ("replications", Json::Int(study.replications as i64)),
        ("boundary_tolerance", Json::Num(BOUNDARY_COUNT_TOL)),
        ("scenarios", Json::Arr(scenarios)),
    ])
}

fn write_summary_csv(report: &[ScenarioSummary], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .map_err(|e| PipelineError::Data(format!("{}: {e}", path.display())))?;
    let err = |e: csv::Error| PipelineError::Data(format!("{}: {e}", path.display()));
    w.write_record([
        "scenario",
        "estimator",
        "parameter",
        "truth",
        "count",
        "mean",
        "median",
        "bias",
        "std",
        "rmse",
        "mean_std_error",
        "at_lower_bound",
        "at_upper_bound",
    ])
    .map_err(err)?;
    for sc in report {
        for es in &sc.estimators {
            for ps in &es.parameters {
                w.write_record([
                    sc.name.clone(),
                    es.estimator.name().into(),
                    ps.parameter.name().into(),
                    float(ps.truth),
                    ps.count.to_string(),
                    float(ps.mean),
                    float(ps.median),
                    float(ps.bias),
                    float(ps.std),
                    float(ps.rmse),
                    float(ps.mean_std_error),
                    ps.at_lower.to_string(),
                    ps.at_upper.to_string(),
                ])
                .map_err(err)?;
            }
        }
    }
    w.flush().map_err(|e| PipelineError::io(path, e))
}

fn write_all(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| PipelineError::io(path, e))
}

/// Runs (or resumes) the study and writes `estimates.csv`, `summary.json`,
/// `summary.csv` and `study_manifest.json` to the output directory.
pub fn run_sim_study(config: &PipelineConfig) -> Result<StudyReport> {
    let study = &config.study;
    if study.scenarios.is_empty() || study.estimators.is_empty() {
        return Err(PipelineError::Usage(
            "the study needs at least one scenario and one estimator".into(),
        ));
    }
    if study.n < 256 {
        return Err(PipelineError::Usage(format!(
            "study n = {} is below 256",
            study.n
        )));
    }
    let mut names = BTreeSet::new();
    for s in &study.scenarios {
        if !names.insert(&s.name) {
            return Err(PipelineError::Usage(format!(
                "duplicate scenario name {}",
                s.name
            )));
        }
    }
    let ctx = config.context(WaterDepth::Infinite)?;
    let scheme = SamplingScheme::new(study.delta, study.n);
    let nyquist = PI / study.delta;
    let plans: Vec<ScenarioPlan> = study
        .scenarios
        .iter()
        .map(|spec| {
            let simulator = Simulator::new(
                &spec.theta,
                &ctx,
                &scheme,
                study.simulation_method,
                study.padding,
            )?;
            Ok(ScenarioPlan {
                simulator,
                low_cut: spec
                    .low_cut
                    .unwrap_or(study.low_cut_factor * spec.theta.omega_p),
                high_cut: spec.high_cut.unwrap_or(nyquist),
            })
        })
        .collect::<Result<_>>()?;

    let dir = &config.out_dir;
    std::fs::create_dir_all(dir).map_err(|e| PipelineError::io(dir, e))?;
    let est_path = dir.join("estimates.csv");
    let manifest_path = dir.join("study_manifest.json");
    let manifest_text = manifest(config);

    let mut rows: Vec<EstimateRow> = Vec::new();
    let resumable = study.resume
        && est_path.exists()
        && std::fs::read_to_string(&manifest_path).is_ok_and(|m| m == manifest_text);
    if resumable {
        rows = read_estimates(&est_path, &study.scenarios)?;
        rows.retain(|r| {
            r.replication < study.replications && study.estimators.contains(&r.estimator)
        });
        rows.sort_by_key(EstimateRow::key);
        rows.dedup_by_key(|r| r.key());
    }
    let mut done: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for r in &rows {
        *done.entry((r.scenario, r.replication)).or_default() += 1;
    }
    // Incomplete replications are recomputed from scratch.
    rows.retain(|r| done[&(r.scenario, r.replication)] == study.estimators.len());
    let jobs: Vec<(usize, usize)> = (0..plans.len())
        .flat_map(|s| (0..study.replications).map(move |r| (s, r)))
        .filter(|k| done.get(k) != Some(&study.estimators.len()))
        .collect();
    if resumable {
        log::info!(
            "resuming: {} replications on file, {} to compute",
            plans.len() * study.replications - jobs.len(),
            jobs.len()
        );
    }

    // Rewrite the file with the rows being kept, then append as we go.
    write_all(&manifest_path, &manifest_text)?;
    {
        let mut w = csv::Writer::from_path(&est_path)
            .map_err(|e| PipelineError::Data(format!("{}: {e}", est_path.display())))?;
        w.write_record(estimates_header())
            .map_err(|e| PipelineError::Data(e.to_string()))?;
        for r in &rows {
            w.write_record(estimate_record(r, &study.scenarios))
                .map_err(|e| PipelineError::Data(e.to_string()))?;
        }
        w.flush().map_err(|e| PipelineError::io(&est_path, e))?;
    }
    let file = OpenOptions::new()
        .append(true)
        .open(&est_path)
        .map_err(|e| PipelineError::io(&est_path, e))?;
    let mut writer = csv::Writer::from_writer(BufWriter::new(file));

    let chunk = study.chunk.max(1);
    let total = jobs.len();
    for (c, batch) in jobs.chunks(chunk).enumerate() {
        let results: Vec<Result<Vec<EstimateRow>>> = config.with_pool(|| {
            batch
                .par_iter()
                .map(|&(s, r)| run_replication(&plans[s], s, r, config, ctx))
                .collect()
        })?;
        for res in results {
            let new = res?;
            for r in &new {
                writer
                    .write_record(estimate_record(r, &study.scenarios))
                    .map_err(|e| PipelineError::Data(e.to_string()))?;
            }
            rows.extend(new);
        }
        writer
            .flush()
            .map_err(|e| PipelineError::io(&est_path, e))?;
        log::info!(
            "study: {}/{} replications",
            (c * chunk + batch.len()).min(total),
            total
        );
    }
    drop(writer);

    rows.sort_by_key(EstimateRow::key);
    // Final file in canonical order, identical whether or not the run resumed.
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(estimates_header())
            .map_err(|e| PipelineError::Data(e.to_string()))?;
        for r in &rows {
            w.write_record(estimate_record(r, &study.scenarios))
                .map_err(|e| PipelineError::Data(e.to_string()))?;
        }
        w.flush().map_err(|e| PipelineError::io(&est_path, e))?;
    }
    let mut f = File::create(&est_path).map_err(|e| PipelineError::io(&est_path, e))?;
    f.write_all(&buf)
        .map_err(|e| PipelineError::io(&est_path, e))?;

    let scenarios = summarise(
        &rows,
        &study.scenarios,
        &study.estimators,
        study.replications,
    );
    write_all(
        &dir.join("summary.json"),
        &summary_json(&scenarios, config).render(),
    )?;
    write_summary_csv(&scenarios, &dir.join("summary.csv"))?;
    for sc in &scenarios {
        if !sc.excluded.is_empty() {
            log::info!(
                "{}: {} replication(s) excluded because an estimator did not converge",
                sc.name,
                sc.excluded.len()
            );
        }
    }
    Ok(StudyReport { scenarios, rows })
}
