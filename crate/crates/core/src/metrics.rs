//! Confusion-matrix accounting and the four goal functions.
//!
//! Any ratio with a zero denominator scores 0, so every goal is total.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Counts of a binary detector's outcomes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    /// A: true negatives.
    pub true_neg: u64,
    /// B: false negatives.
    pub false_neg: u64,
    /// C: false positives.
    pub false_pos: u64,
    /// D: true positives.
    pub true_pos: u64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.true_neg + self.false_neg + self.false_pos + self.true_pos
    }

    pub fn add(&mut self, actual: bool, predicted: bool) {
        match (actual, predicted) {
            (false, false) => self.true_neg += 1,
            (true, false) => self.false_neg += 1,
            (false, true) => self.false_pos += 1,
            (true, true) => self.true_pos += 1,
        }
    }

    pub fn pd(&self) -> f64 {
        ratio(self.true_pos, self.false_neg + self.true_pos)
    }

    pub fn pf(&self) -> f64 {
        ratio(self.false_pos, self.true_neg + self.false_pos)
    }

    pub fn precision(&self) -> f64 {
        ratio(self.true_pos, self.true_pos + self.false_pos)
    }

    pub fn f_measure(&self) -> f64 {
        let (pd, prec) = (self.pd(), self.precision());
        if pd + prec == 0.0 {
            0.0
        } else {
            2.0 * pd * prec / (pd + prec)
        }
    }

    pub fn scores(&self) -> Scores {
        Scores {
            pd: self.pd(),
            pf: self.pf(),
            prec: self.precision(),
            f: self.f_measure(),
        }
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Tallies actual against predicted labels.
pub fn confusion(actual: &[bool], predicted: &[bool]) -> Result<ConfusionMatrix> {
    if actual.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            left: actual.len(),
            right: predicted.len(),
        });
    }
    if actual.is_empty() {
        return Err(Error::Empty("no predictions to score".into()));
    }
    let mut cm = ConfusionMatrix::default();
    for (&a, &p) in actual.iter().zip(predicted) {
        cm.add(a, p);
    }
    Ok(cm)
}

/// All four measures at once.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub pd: f64,
    pub pf: f64,
    pub prec: f64,
    pub f: f64,
}

impl Scores {
    pub fn get(&self, goal: Goal) -> f64 {
        match goal {
            Goal::Pd => self.pd,
            Goal::Pf => self.pf,
            Goal::Prec => self.prec,
            Goal::F => self.f,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Goal {
    Pd,
    Pf,
    Prec,
    F,
}

impl Goal {
    pub const ALL: [Goal; 4] = [Goal::Pd, Goal::Pf, Goal::Prec, Goal::F];

    /// False only for `pf`, where smaller is better.
    pub fn maximize(self) -> bool {
        !matches!(self, Goal::Pf)
    }

    pub fn score(self, cm: &ConfusionMatrix) -> f64 {
        match self {
            Goal::Pd => cm.pd(),
            Goal::Pf => cm.pf(),
            Goal::Prec => cm.precision(),
            Goal::F => cm.f_measure(),
        }
    }

    /// True iff `x` strictly improves on `y`.
    pub fn better(self, x: f64, y: f64) -> bool {
        if self.maximize() {
            x > y
        } else {
            x < y
        }
    }

    /// The worst possible score, a starting point for running bests.
    pub fn worst(self) -> f64 {
        if self.maximize() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Goal::Pd => "pd",
            Goal::Pf => "pf",
            Goal::Prec => "prec",
            Goal::F => "f",
        }
    }
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Goal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pd" | "recall" => Ok(Goal::Pd),
            "pf" => Ok(Goal::Pf),
            "prec" | "precision" => Ok(Goal::Prec),
            "f" | "f1" | "f-measure" => Ok(Goal::F),
            other => Err(Error::Unknown {
                kind: "goal",
                value: other.to_string(),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn four_pairs_one_each() {
        let cm = confusion(&[true, true, false, false], &[true, false, true, false]).unwrap();
        assert_eq!(
            cm,
            ConfusionMatrix {
                true_neg: 1,
                false_neg: 1,
                false_pos: 1,
                true_pos: 1
            }
        );
        let s = cm.scores();
        assert_eq!((s.pd, s.pf, s.prec, s.f), (0.5, 0.5, 0.5, 0.5));
    }

    #[test]
    fn perfect_and_silent_detectors() {
        let actual = [true, false, true, true, false];
        let cm = confusion(&actual, &actual).unwrap();
        assert_eq!((cm.false_neg, cm.false_pos), (0, 0));
        assert_eq!((cm.pd(), cm.precision(), cm.f_measure()), (1.0, 1.0, 1.0));

        let silent = confusion(&actual, &[false; 5]).unwrap();
        assert_eq!((silent.false_pos, silent.true_pos), (0, 0));
        assert_eq!(silent.precision(), 0.0);
        assert_eq!(silent.f_measure(), 0.0);
    }

    #[test]
    fn bad_inputs() {
        assert!(matches!(confusion(&[true], &[]), Err(Error::LengthMismatch { .. })));
        assert!(matches!(confusion(&[], &[]), Err(Error::Empty(_))));
    }

    #[test]
    fn polarity() {
        assert!(Goal::Prec.better(0.6, 0.5));
        assert!(Goal::Pf.better(0.2, 0.5));
        assert!(!Goal::Pf.better(0.5, 0.2));
        assert!(!Goal::F.better(0.5, 0.5));
        assert_eq!("precision".parse::<Goal>().unwrap(), Goal::Prec);
        assert!("auc".parse::<Goal>().is_err());
    }

    proptest! {
        #[test]
        fn scores_stay_in_unit_interval(a in 0u64..50, b in 0u64..50, c in 0u64..50, d in 0u64..50) {
            let cm = ConfusionMatrix { true_neg: a, false_neg: b, false_pos: c, true_pos: d };
            for g in Goal::ALL {
                let v = g.score(&cm);
                prop_assert!((0.0..=1.0).contains(&v));
            }
            if cm.pd() == 0.0 || cm.precision() == 0.0 {
                prop_assert_eq!(cm.f_measure(), 0.0);
            }
        }

        #[test]
        fn joint_permutation_invariance(pairs in prop::collection::vec((any::<bool>(), any::<bool>()), 1..60), rot in 0usize..60) {
            let (a, p): (Vec<bool>, Vec<bool>) = pairs.iter().copied().unzip();
            let k = rot % pairs.len();
            let (mut a2, mut p2) = (a.clone(), p.clone());
            a2.rotate_left(k);
            p2.rotate_left(k);
            a2.reverse();
            p2.reverse();
            prop_assert_eq!(confusion(&a, &p).unwrap(), confusion(&a2, &p2).unwrap());
        }
    }
}
