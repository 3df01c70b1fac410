use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Outcome of the Benjamini–Hochberg step-up procedure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BhResult {
    /// Input p-values in ascending order.
    pub sorted: Vec<f64>,
    /// Largest `i` with `P_(i) < iα/K`, or 0.
    pub r: usize,
    /// `P_(R)` when `R ≥ 1`.
    pub threshold: Option<f64>,
    /// Input indices with `P_i ≤ T`, ascending.
    pub rejected: Vec<usize>,
}

pub fn bh_procedure(p_values: &[f64], alpha: f64) -> Result<BhResult> {
    if let Some(bad) = p_values.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::Contract(format!("p-value {bad} is outside [0, 1]")));
    }
    let mut sorted = p_values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let k = sorted.len() as f64;
    let r = (1..=sorted.len())
        .rev()
        .find(|&i| sorted[i - 1] < i as f64 * alpha / k)
        .unwrap_or(0);
    let threshold = (r > 0).then(|| sorted[r - 1]);
    let rejected = match threshold {
        Some(t) => (0..p_values.len()).filter(|&i| p_values[i] <= t).collect(),
        None => Vec::new(),
    };
    Ok(BhResult {
        sorted,
        r,
        threshold,
        rejected,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worked_example() {
        let bh = bh_procedure(&[0.2, 0.001, 0.9], 0.05).unwrap();
        assert_eq!(bh.r, 1);
        assert_eq!(bh.threshold, Some(0.001));
        assert_eq!(bh.rejected, vec![1]);
    }

    #[test]
    fn step_up_not_step_down() {
        // P_(1) fails its own threshold but P_(2) passes, so both are rejected.
        let bh = bh_procedure(&[0.04, 0.045, 0.9], 0.1).unwrap();
        assert_eq!(bh.r, 2);
        assert_eq!(bh.rejected, vec![0, 1]);
    }

    #[test]
    fn no_rejection_and_single_test() {
        let bh = bh_procedure(&[1.0; 5], 0.05).unwrap();
        assert_eq!((bh.r, bh.threshold, bh.rejected.len()), (0, None, 0));
        assert_eq!(bh_procedure(&[0.049], 0.05).unwrap().rejected, vec![0]);
        assert!(bh_procedure(&[0.05], 0.05).unwrap().rejected.is_empty());
        assert!(bh_procedure(&[1.2], 0.05).is_err());
    }
}
