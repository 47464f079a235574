//! Experiment runner: tuned and untuned runs per triple, learner and goal.
//!
//! Untuned runs train the default configuration on train+tune and test on
//! the third release. Tuned runs let DE pick a configuration using train
//! and tune, then test that configuration's model on the third release.

mod report;

use std::collections::BTreeSet;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{merge_releases, Attribute, ExperimentTriple, Release};
use crate::error::{Error, Result};
use crate::learners::{self, Config, LearnerKind, Model};
use crate::metrics::{confusion, Goal, Scores};
use crate::seed;
use crate::tuner::{candidate_seed, de_tune, DeConfig};

pub use report::{
    build_score_table, emit_reports, parse_score_table, score_table_csv, ScoreRow, ScoreTable,
    REPORT_FILES,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Tuned,
    Untuned,
}

/// Which cells to run.
#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    pub triples: Vec<ExperimentTriple>,
    pub learners: Vec<LearnerKind>,
    pub goals: Vec<Goal>,
    pub repeats: usize,
    pub seed: u64,
    pub de: DeConfig,
    /// Population sizes to tune with; the first is the primary one.
    pub nps: Vec<usize>,
}

impl ExperimentPlan {
    pub fn new(triples: Vec<ExperimentTriple>, learners: Vec<LearnerKind>, goals: Vec<Goal>) -> Self {
        let de = DeConfig::default();
        ExperimentPlan {
            triples,
            learners,
            goals,
            repeats: 1,
            seed: 0,
            de,
            nps: vec![de.np],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.triples.is_empty() {
            return Err(Error::Empty("plan selects no triples".into()));
        }
        if self.learners.is_empty() {
            return Err(Error::Empty("plan selects no learners".into()));
        }
        if self.repeats < 1 {
            return Err(Error::InvalidConfig("repeats must be at least 1".into()));
        }
        if self.nps.is_empty() {
            return Err(Error::InvalidConfig("at least one np value is required".into()));
        }
        let tunable = self.learners.iter().any(|l| l.is_tunable());
        if tunable && self.goals.is_empty() {
            return Err(Error::InvalidConfig("tuned learners need at least one goal".into()));
        }
        for &np in &self.nps {
            DeConfig { np, ..self.de }.validate()?;
        }
        Ok(())
    }

    /// Every cell of the plan in a fixed order.
    pub fn cells(&self) -> Vec<Cell> {
        let mut out = Vec::new();
        for (t, triple) in self.triples.iter().enumerate() {
            for &learner in &self.learners {
                for repeat in 0..self.repeats {
                    out.push(Cell {
                        triple: t,
                        learner,
                        goal: None,
                        np: 0,
                        repeat,
                        seed: cell_seed(self.seed, &triple.name, learner, None, 0, repeat),
                    });
                    if !learner.is_tunable() {
                        continue;
                    }
                    for &goal in &self.goals {
                        for &np in &self.nps {
                            out.push(Cell {
                                triple: t,
                                learner,
                                goal: Some(goal),
                                np,
                                repeat,
                                seed: cell_seed(self.seed, &triple.name, learner, Some(goal), np, repeat),
                            });
                        }
                    }
                }
            }
        }
        out
    }
}

/// One unit of work; `goal` is `None` for untuned runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    pub triple: usize,
    pub learner: LearnerKind,
    pub goal: Option<Goal>,
    pub np: usize,
    pub repeat: usize,
    pub seed: u64,
}

fn cell_seed(master: u64, triple: &str, learner: LearnerKind, goal: Option<Goal>, np: usize, repeat: usize) -> u64 {
    let goal = goal.map_or("default", Goal::as_str);
    seed::derive_str(master, &format!("{triple}/{learner}/{goal}/np{np}/r{repeat}"))
}

/// Outcome of one run, scored on the test release.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub triple: String,
    pub learner: LearnerKind,
    pub goal: Option<Goal>,
    pub mode: Mode,
    pub repeat: usize,
    pub seed: u64,
    pub np: usize,
    pub scores: Scores,
    pub config: Config,
    pub evaluations: usize,
    pub generations: usize,
    /// Tuned runs: the winning candidate's goal score on the tune release.
    pub tune_score: Option<f64>,
    /// Tuned runs: the default configuration's goal score on the tune release.
    pub default_tune_score: Option<f64>,
    pub features: BTreeSet<Attribute>,
    pub wall_seconds: f64,
}

impl RunRecord {
    /// Copy with the wall-clock field zeroed, for reproducibility checks.
    pub fn without_timing(&self) -> Self {
        RunRecord {
            wall_seconds: 0.0,
            ..self.clone()
        }
    }
}

fn test_scores(model: &Model, test: &Release) -> Result<Scores> {
    let predicted = model.predict_all(test.instances());
    Ok(confusion(&test.labels(), &predicted)?.scores())
}

/// DE on (train, tune), then the selected model is scored on test.
///
/// The reported model is the one DE scored: the best configuration trained
/// on train with the same learner seed it was evaluated with.
pub fn run_tuned(
    triple: &ExperimentTriple,
    learner: LearnerKind,
    goal: Goal,
    de: &DeConfig,
    seed: u64,
) -> Result<RunRecord> {
    let start = Instant::now();
    let de_seed = seed::derive_str(seed, "de");
    let result = de_tune(learner, &triple.train, &triple.tune, goal, de, de_seed)?;
    let config = Config {
        learner,
        values: result.best.params.clone(),
    };
    let model = learners::train(&config, &triple.train, candidate_seed(de_seed, result.best.evaluated_at))?;
    let scores = test_scores(&model, &triple.test)?;
    Ok(RunRecord {
        triple: triple.name.clone(),
        learner,
        goal: Some(goal),
        mode: Mode::Tuned,
        repeat: 0,
        seed,
        np: de.np,
        scores,
        features: model.features_used(),
        config,
        evaluations: result.evaluations,
        generations: result.generations,
        tune_score: Some(result.best.score),
        default_tune_score: Some(result.default.score),
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Default configuration trained on train+tune and scored on test.
pub fn run_untuned(triple: &ExperimentTriple, learner: LearnerKind, seed: u64) -> Result<RunRecord> {
    let start = Instant::now();
    let config = Config::default_for(learner);
    let merged = merge_releases(&triple.train, &triple.tune)?;
    let model = learners::train(&config, &merged, seed::derive_str(seed, "default"))?;
    let scores = test_scores(&model, &triple.test)?;
    Ok(RunRecord {
        triple: triple.name.clone(),
        learner,
        goal: None,
        mode: Mode::Untuned,
        repeat: 0,
        seed,
        np: 0,
        scores,
        features: model.features_used(),
        config,
        evaluations: 0,
        generations: 0,
        tune_score: None,
        default_tune_score: None,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

pub fn run_cell(plan: &ExperimentPlan, cell: &Cell) -> Result<RunRecord> {
    let triple = &plan.triples[cell.triple];
    let mut record = match cell.goal {
        None => run_untuned(triple, cell.learner, cell.seed)?,
        Some(goal) => {
            let de = DeConfig { np: cell.np, ..plan.de };
            run_tuned(triple, cell.learner, goal, &de, cell.seed)?
        }
    };
    record.repeat = cell.repeat;
    Ok(record)
}

/// Runs every cell in parallel; records come back in plan order.
pub fn run_plan(plan: &ExperimentPlan) -> Result<Vec<RunRecord>> {
    plan.validate()?;
    plan.cells().par_iter().map(|c| run_cell(plan, c)).collect()
}

/// Like [`run_plan`], reporting each finished record through `progress`.
pub fn run_plan_with<F>(plan: &ExperimentPlan, progress: F) -> Result<Vec<RunRecord>>
where
    F: Fn(&RunRecord) + Sync,
{
    plan.validate()?;
    plan.cells()
        .par_iter()
        .map(|c| {
            let r = run_cell(plan, c)?;
            progress(&r);
            Ok(r)
        })
        .collect()
}

/// One JSON object per line.
pub fn records_to_jsonl(records: &[RunRecord]) -> Result<String> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    Ok(out)
}

pub fn parse_records(text: &str) -> Result<Vec<RunRecord>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| Error::Parse {
                row: i + 1,
                column: "record".into(),
                message: e.to_string(),
            })
        })
        .collect()
}

pub fn read_records(path: impl AsRef<Path>) -> Result<Vec<RunRecord>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_records(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{build_triples, Instance, NUM_ATTRIBUTES};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn releases(n: usize) -> Vec<Release> {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        (0..n)
            .map(|v| {
                let rows = (0..60)
                    .map(|_| {
                        let mut m = [0.0; NUM_ATTRIBUTES];
                        for x in m.iter_mut() {
                            *x = rng.gen_range(0.0..10.0);
                        }
                        let bug = (m[12] + rng.gen_range(0.0..4.0) > 9.0) as u32;
                        Instance::new(m, bug).unwrap()
                    })
                    .collect();
                Release::new("proj", v, rows).unwrap()
            })
            .collect()
    }

    fn plan() -> ExperimentPlan {
        let mut p = ExperimentPlan::new(
            build_triples(&releases(4)).unwrap(),
            vec![LearnerKind::Cart, LearnerKind::LogisticRegression],
            vec![Goal::Prec],
        );
        p.de.life = 2;
        p
    }

    #[test]
    fn cell_count_and_order() {
        let p = plan();
        let cells = p.cells();
        assert_eq!(cells.len(), 2 * (2 + 1));
        assert_eq!(cells[0].goal, None);
        assert_eq!(cells[1].goal, Some(Goal::Prec));
        let seeds: BTreeSet<u64> = cells.iter().map(|c| c.seed).collect();
        assert_eq!(seeds.len(), cells.len());
    }

    #[test]
    fn tuned_record_plumbing() {
        let p = plan();
        let de = DeConfig { life: 1, ..p.de };
        let r = run_tuned(&p.triples[0], LearnerKind::Cart, Goal::Prec, &de, 4).unwrap();
        assert_eq!(r.evaluations, 10 * (r.generations + 1));
        assert!(r.generations >= 1);
        assert!(r.tune_score.unwrap() >= r.default_tune_score.unwrap());
        r.config.validate().unwrap();
    }

    #[test]
    fn untuned_records_have_no_goal() {
        let p = plan();
        let r = run_untuned(&p.triples[1], LearnerKind::LogisticRegression, 1).unwrap();
        assert_eq!((r.goal, r.mode, r.evaluations), (None, Mode::Untuned, 0));
    }

    #[test]
    fn plan_runs_are_reproducible_and_round_trip() {
        let p = plan();
        let a = run_plan(&p).unwrap();
        let b = run_plan(&p).unwrap();
        let strip = |v: &[RunRecord]| v.iter().map(RunRecord::without_timing).collect::<Vec<_>>();
        assert_eq!(strip(&a), strip(&b));
        let back = parse_records(&records_to_jsonl(&a).unwrap()).unwrap();
        assert_eq!(back, a);
    }

    #[test]
    fn bad_plans_are_rejected() {
        let mut p = plan();
        p.repeats = 0;
        assert!(run_plan(&p).is_err());
        let mut p = plan();
        p.nps = vec![3];
        assert!(run_plan(&p).is_err());
        let mut p = plan();
        p.goals.clear();
        assert!(run_plan(&p).is_err());
    }
}
