use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::dataset::{Attribute, Instance, NUM_ATTRIBUTES};

pub const MAX_ITERATIONS: usize = 500;
pub const GRADIENT_TOLERANCE: f64 = 1e-6;

/// Logistic input is clamped to this magnitude so the output stays strictly
/// inside (0, 1).
const LOGIT_LIMIT: f64 = 35.0;

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z.clamp(-LOGIT_LIMIT, LOGIT_LIMIT)).exp())
}

/// Logistic regression over standardised metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub mean: [f64; NUM_ATTRIBUTES],
    pub scale: [f64; NUM_ATTRIBUTES],
    pub intercept: f64,
    pub coef: [f64; NUM_ATTRIBUTES],
}

impl LogisticModel {
    fn standardise(&self, instance: &Instance) -> [f64; NUM_ATTRIBUTES] {
        let mut z = [0.0; NUM_ATTRIBUTES];
        for (j, zj) in z.iter_mut().enumerate() {
            if self.scale[j] > 0.0 {
                *zj = (instance.metrics()[j] - self.mean[j]) / self.scale[j];
            }
        }
        z
    }

    fn logit(&self, z: &[f64; NUM_ATTRIBUTES]) -> f64 {
        self.intercept + self.coef.iter().zip(z).map(|(b, x)| b * x).sum::<f64>()
    }

    /// Probability of "defective".
    pub fn predict(&self, instance: &Instance) -> f64 {
        sigmoid(self.logit(&self.standardise(instance)))
    }

    pub fn features_used(&self, epsilon: f64) -> BTreeSet<Attribute> {
        Attribute::all()
            .filter(|a| self.coef[a.index()].abs() > epsilon)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticFit {
    pub model: LogisticModel,
    /// Mean log-loss before each step, plus the final loss.
    pub losses: Vec<f64>,
    pub iterations: usize,
}

fn log_loss(p: f64, y: f64) -> f64 {
    -(y * p.ln() + (1.0 - y) * (1.0 - p).ln())
}

/// Fits by batch gradient descent on mean log-loss.
///
/// The step size is `4 / (1 + d)` for `d` non-constant attributes. With
/// standardised features the loss gradient is Lipschitz with constant at
/// most `(1 + d) / 4`, so every step decreases the loss.
pub fn fit_logistic(rows: &[Instance], max_iterations: usize, tolerance: f64) -> LogisticFit {
    let n = rows.len().max(1) as f64;
    let mut mean = [0.0; NUM_ATTRIBUTES];
    let mut scale = [0.0; NUM_ATTRIBUTES];
    for j in 0..NUM_ATTRIBUTES {
        let m = rows.iter().map(|r| r.metrics()[j]).sum::<f64>() / n;
        let var = rows.iter().map(|r| (r.metrics()[j] - m).powi(2)).sum::<f64>() / n;
        mean[j] = m;
        scale[j] = if var > 0.0 { var.sqrt() } else { 0.0 };
    }
    let mut model = LogisticModel {
        mean,
        scale,
        intercept: 0.0,
        coef: [0.0; NUM_ATTRIBUTES],
    };
    let xs: Vec<[f64; NUM_ATTRIBUTES]> = rows.iter().map(|r| model.standardise(r)).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.is_defective() as u8 as f64).collect();
    let active = scale.iter().filter(|&&s| s > 0.0).count();
    let step = 4.0 / (1.0 + active as f64);

    let mut losses = Vec::new();
    let mut iterations = 0;
    loop {
        let mut g0 = 0.0;
        let mut g = [0.0; NUM_ATTRIBUTES];
        let mut loss = 0.0;
        for (x, &y) in xs.iter().zip(&ys) {
            let p = sigmoid(model.logit(x));
            loss += log_loss(p, y);
            let e = p - y;
            g0 += e;
            for j in 0..NUM_ATTRIBUTES {
                g[j] += e * x[j];
            }
        }
        losses.push(loss / n);
        g0 /= n;
        g.iter_mut().for_each(|v| *v /= n);
        let norm = (g0 * g0 + g.iter().map(|v| v * v).sum::<f64>()).sqrt();
        if iterations >= max_iterations || norm < tolerance {
            break;
        }
        model.intercept -= step * g0;
        for (c, gj) in model.coef.iter_mut().zip(g) {
            *c -= step * gj;
        }
        iterations += 1;
    }
    LogisticFit {
        model,
        losses,
        iterations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows() -> Vec<Instance> {
        (0..80)
            .map(|i| {
                let mut m = [0.0; NUM_ATTRIBUTES];
                m[12] = (i % 20) as f64 * 10.0;
                m[3] = ((i * 7) % 11) as f64;
                m[5] = 1.0;
                let bug = (m[12] > 120.0 || (i % 9 == 0)) as u32;
                Instance::new(m, bug).unwrap()
            })
            .collect()
    }

    #[test]
    fn loss_never_increases() {
        let fit = fit_logistic(&rows(), MAX_ITERATIONS, GRADIENT_TOLERANCE);
        assert!(fit.losses.len() > 2);
        for w in fit.losses.windows(2) {
            assert!(w[1] <= w[0] + 1e-12, "{} -> {}", w[0], w[1]);
        }
        assert!(fit.losses.last().unwrap() < &fit.losses[0]);
    }

    #[test]
    fn zero_weights_give_one_half() {
        let fit = fit_logistic(&rows(), 0, GRADIENT_TOLERANCE);
        assert_eq!(fit.iterations, 0);
        for r in rows() {
            assert_eq!(fit.model.predict(&r), 0.5);
        }
        assert!((fit.losses[0] - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn outputs_strictly_inside_unit_interval() {
        let fit = fit_logistic(&rows(), MAX_ITERATIONS, GRADIENT_TOLERANCE);
        let mut far = [0.0; NUM_ATTRIBUTES];
        far[12] = 1e12;
        let extreme = Instance::new(far, 0).unwrap();
        far[12] = -1e12;
        let other = Instance::new(far, 0).unwrap();
        for r in rows().iter().chain([&extreme, &other]) {
            let p = fit.model.predict(r);
            assert!(p > 0.0 && p < 1.0);
        }
    }

    #[test]
    fn constant_attributes_get_no_weight() {
        let fit = fit_logistic(&rows(), MAX_ITERATIONS, GRADIENT_TOLERANCE);
        let used = fit.model.features_used(1e-6);
        assert!(used.contains(&Attribute::new(12).unwrap()));
        assert!(!used.contains(&Attribute::new(5).unwrap()));
        assert_eq!(fit.model.coef[0], 0.0);
    }
}
