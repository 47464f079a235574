//! Single-objective differential evolution with early termination.
//!
//! The initial population is the learner's default configuration plus
//! `np - 1` random ones. Each generation builds one mutant per member by
//! extrapolating from three other members; a mutant replaces its parent only
//! if it scores strictly better. Each generation that fails to improve the
//! best-ever score costs one unit of `life`, and the search stops at zero.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Release;
use crate::error::{Error, Result};
use crate::learners::{self, param_space, trim, Config, LearnerKind, ParamKind, ParamSpec, ParamValue, Params};
use crate::metrics::{confusion, Goal};
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeConfig {
    pub np: usize,
    pub f: f64,
    pub cr: f64,
    pub life: usize,
}

impl Default for DeConfig {
    fn default() -> Self {
        DeConfig {
            np: 10,
            f: 0.75,
            cr: 0.3,
            life: 5,
        }
    }
}

impl DeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.np < 4 {
            return Err(Error::InvalidConfig(format!("np = {} but must be at least 4", self.np)));
        }
        if !(0.0..=1.0).contains(&self.cr) {
            return Err(Error::InvalidConfig(format!("cr = {} outside [0, 1]", self.cr)));
        }
        if !(self.f > 0.0 && self.f.is_finite()) {
            return Err(Error::InvalidConfig(format!("f = {} must be positive", self.f)));
        }
        if self.life < 1 {
            return Err(Error::InvalidConfig("life must be at least 1".into()));
        }
        Ok(())
    }
}

/// What DE optimises: a parameter space, its default point and a scorer.
pub trait Objective: Sync {
    fn space(&self) -> &[ParamSpec];
    fn defaults(&self) -> Params;
    fn goal(&self) -> Goal;
    /// Scores one candidate; `seed` drives any randomness inside the scorer.
    fn score(&self, params: &Params, seed: u64) -> Result<f64>;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub params: Params,
    pub score: f64,
    /// Position of this candidate's Score call in evaluation order.
    pub evaluated_at: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneResult {
    pub best: Candidate,
    /// The default configuration as scored in the initial population.
    pub default: Candidate,
    pub evaluations: usize,
    pub generations: usize,
    /// Best-ever score after the initial population and after each generation.
    pub history: Vec<f64>,
}

/// Learner seed for the `index`-th Score call of a run seeded with `master`.
pub fn candidate_seed(master: u64, index: usize) -> u64 {
    seed::derive(seed::derive_str(master, "candidate"), index as u64)
}

fn random_params<R: Rng>(space: &[ParamSpec], rng: &mut R) -> Params {
    space
        .iter()
        .map(|s| {
            let v = match s.kind {
                ParamKind::Boolean => ParamValue::Bool(rng.gen_bool(0.5)),
                _ => trim(s, rng.gen_range(s.low..=s.high)),
            };
            (s.name.to_string(), v)
        })
        .collect()
}

/// Builds a mutant of `old` from three other members `a`, `b`, `c`.
///
/// Each parameter independently crosses over when a uniform draw in [0, 1)
/// falls below `cr`: booleans flip `old`'s value, numbers become
/// `trim(a + f·(b - c))`. Otherwise `old`'s value is kept.
pub fn extrapolate<R: Rng>(
    space: &[ParamSpec],
    old: &Params,
    [a, b, c]: [&Params; 3],
    f: f64,
    cr: f64,
    rng: &mut R,
) -> Params {
    space
        .iter()
        .map(|s| {
            let name = s.name;
            let kept = old.get(name).copied().unwrap_or(s.default);
            let u: f64 = rng.gen();
            let v = if u >= cr {
                kept
            } else if s.kind == ParamKind::Boolean {
                ParamValue::Bool(!kept.as_bool().unwrap_or(false))
            } else {
                let x = |p: &Params| s.numeric(p.get(name).copied().unwrap_or(s.default));
                trim(s, x(a) + f * (x(b) - x(c)))
            };
            (name.to_string(), v)
        })
        .collect()
}

/// Three distinct population indices other than `target`.
fn three_others<R: Rng>(np: usize, target: usize, rng: &mut R) -> [usize; 3] {
    let picks = index::sample(rng, np - 1, 3);
    let shift = |i: usize| if i >= target { i + 1 } else { i };
    [shift(picks.index(0)), shift(picks.index(1)), shift(picks.index(2))]
}

fn score_batch<O: Objective>(
    objective: &O,
    batch: Vec<Params>,
    first_index: usize,
    master: u64,
) -> Result<Vec<Candidate>> {
    batch
        .into_par_iter()
        .enumerate()
        .map(|(i, params)| {
            let at = first_index + i;
            let score = objective.score(&params, candidate_seed(master, at))?;
            Ok(Candidate {
                params,
                score,
                evaluated_at: at,
            })
        })
        .collect()
}

/// Runs DE to termination and returns the best-ever candidate.
pub fn differential_evolution<O: Objective>(objective: &O, de: &DeConfig, seed: u64) -> Result<TuneResult> {
    de.validate()?;
    let space = objective.space();
    if space.is_empty() {
        return Err(Error::InvalidConfig("empty parameter space".into()));
    }
    let goal = objective.goal();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut initial = vec![objective.defaults()];
    initial.extend((1..de.np).map(|_| random_params(space, &mut rng)));
    let mut population = score_batch(objective, initial, 0, seed)?;
    let mut evaluations = de.np;
    let default = population[0].clone();
    let mut best = default.clone();
    for c in &population[1..] {
        if goal.better(c.score, best.score) {
            best = c.clone();
        }
    }

    let mut history = vec![best.score];
    let mut life = de.life;
    let mut generations = 0;
    while life > 0 {
        generations += 1;
        let mutants: Vec<Params> = (0..de.np)
            .map(|i| {
                let [a, b, c] = three_others(de.np, i, &mut rng);
                let parents = [&population[a].params, &population[b].params, &population[c].params];
                extrapolate(space, &population[i].params, parents, de.f, de.cr, &mut rng)
            })
            .collect();
        let scored = score_batch(objective, mutants, evaluations, seed)?;
        evaluations += de.np;

        let mut improved = false;
        for (i, cand) in scored.into_iter().enumerate() {
            if goal.better(cand.score, best.score) {
                best = cand.clone();
                improved = true;
            }
            if goal.better(cand.score, population[i].score) {
                population[i] = cand;
            }
        }
        if !improved {
            life -= 1;
        }
        history.push(best.score);
    }

    Ok(TuneResult {
        best,
        default,
        evaluations,
        generations,
        history,
    })
}

/// Tunes a learner: candidates are trained on `train` and scored on `tune`.
pub struct LearnerObjective<'a> {
    pub learner: LearnerKind,
    pub train: &'a Release,
    pub tune: &'a Release,
    pub goal: Goal,
}

impl Objective for LearnerObjective<'_> {
    fn space(&self) -> &[ParamSpec] {
        param_space(self.learner)
    }

    fn defaults(&self) -> Params {
        Config::default_for(self.learner).values
    }

    fn goal(&self) -> Goal {
        self.goal
    }

    fn score(&self, params: &Params, seed: u64) -> Result<f64> {
        let config = Config {
            learner: self.learner,
            values: params.clone(),
        };
        score(&config, self.train, self.tune, self.goal, seed)
    }
}

/// Trains `config` on `train` and returns its goal score on `tune`.
pub fn score(config: &Config, train: &Release, tune: &Release, goal: Goal, seed: u64) -> Result<f64> {
    let model = learners::train(config, train, seed)?;
    let predicted = model.predict_all(tune.instances());
    Ok(goal.score(&confusion(&tune.labels(), &predicted)?))
}

pub fn de_tune(
    learner: LearnerKind,
    train: &Release,
    tune: &Release,
    goal: Goal,
    de: &DeConfig,
    seed: u64,
) -> Result<TuneResult> {
    if !learner.is_tunable() {
        return Err(Error::UnsupportedLearner(learner.display_name().to_string()));
    }
    let objective = LearnerObjective {
        learner,
        train,
        tune,
        goal,
    };
    differential_evolution(&objective, de, seed)
}
