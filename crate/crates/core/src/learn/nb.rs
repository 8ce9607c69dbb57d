use serde::{Deserialize, Serialize};

/// Gaussian naive Bayes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianNb {
    pub var_smoothing: f64,
    pub log_prior: [f64; 2],
    pub mean: [Vec<f64>; 2],
    pub var: [Vec<f64>; 2],
}

fn mean_var(rows: &[&Vec<f64>], j: usize) -> (f64, f64) {
    let n = rows.len() as f64;
    let m = rows.iter().map(|r| r[j]).sum::<f64>() / n;
    let v = rows.iter().map(|r| (r[j] - m).powi(2)).sum::<f64>() / n;
    (m, v)
}

impl GaussianNb {
    /// Both classes must be present.
    pub fn fit(x: &[Vec<f64>], y: &[bool], var_smoothing: f64) -> Self {
        let p = x.first().map_or(0, Vec::len);
        let all: Vec<&Vec<f64>> = x.iter().collect();
        let max_var = (0..p).map(|j| mean_var(&all, j).1).fold(0.0, f64::max);
        let epsilon = var_smoothing * if max_var > 0.0 { max_var } else { 1.0 };
        let mut log_prior = [0.0; 2];
        let mut mean = [Vec::new(), Vec::new()];
        let mut var = [Vec::new(), Vec::new()];
        for c in 0..2 {
            let rows: Vec<&Vec<f64>> = x.iter().zip(y).filter(|(_, &l)| l as usize == c).map(|(r, _)| r).collect();
            log_prior[c] = (rows.len() as f64 / x.len() as f64).ln();
            for j in 0..p {
                let (m, v) = mean_var(&rows, j);
                mean[c].push(m);
                var[c].push(v + epsilon);
            }
        }
        Self {
            var_smoothing,
            log_prior,
            mean,
            var,
        }
    }

    fn joint_log_likelihood(&self, x: &[f64], c: usize) -> f64 {
        let mut l = self.log_prior[c];
        for (j, xv) in x.iter().enumerate() {
            let v = self.var[c][j];
            l -= 0.5 * (2.0 * std::f64::consts::PI * v).ln() + (xv - self.mean[c][j]).powi(2) / (2.0 * v);
        }
        l
    }

    pub fn predict_proba(&self, x: &[f64]) -> f64 {
        let (l0, l1) = (self.joint_log_likelihood(x, 0), self.joint_log_likelihood(x, 1));
        let d = l0 - l1;
        if d > 0.0 {
            let e = (-d).exp();
            e / (1.0 + e)
        } else {
            1.0 / (1.0 + d.exp())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_variance_features_stay_finite() {
        let x = vec![vec![1.0, 0.0], vec![1.0, 0.0], vec![1.0, 5.0], vec![1.0, 6.0]];
        let y = [false, false, true, true];
        let m = GaussianNb::fit(&x, &y, 1e-9);
        for q in [[1.0, 0.0], [1.0, 5.5], [2.0, 3.0]] {
            let p = m.predict_proba(&q);
            assert!(p.is_finite() && (0.0..=1.0).contains(&p));
        }
        assert!(m.predict_proba(&[1.0, 5.5]) > 0.99);
        let constant = GaussianNb::fit(&[vec![0.0], vec![0.0]], &[false, true], 1e-9);
        assert_eq!(constant.predict_proba(&[0.0]), 0.5);
    }
}
