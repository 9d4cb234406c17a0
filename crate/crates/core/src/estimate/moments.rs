use std::collections::{BTreeMap, BTreeSet};

use crate::error::{invalid, Result};
use crate::model::LevyMeasure;

/// Lévy measure implied by jump frequencies `alpha`, jump rate `beta0` and
/// permanence level `b`:
/// `nu(y) = (alpha_y - (1 - b) alpha_{-y}) beta0 / ((2 - b) b)`.
///
/// A negative value is set to zero and its mirror takes the whole pair mass
/// `(alpha_y + alpha_{-y}) beta0 / (2 - b)`.
pub fn levy_from_moments(alpha: &BTreeMap<i64, f64>, beta0: f64, b: f64) -> Result<LevyMeasure> {
    if !(b > 0.0 && b <= 1.0) {
        return Err(invalid(format!("b must lie in (0, 1], got {b}")));
    }
    if !(beta0 > 0.0) || !beta0.is_finite() {
        return Err(invalid(format!("beta_0 must be finite and > 0, got {beta0}")));
    }
    if alpha.contains_key(&0) || alpha.values().any(|a| !(*a >= 0.0) || !a.is_finite()) {
        return Err(invalid("jump frequencies must be non-negative on non-zero sizes"));
    }
    let total: f64 = alpha.values().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(invalid(format!("jump frequencies must sum to 1, got {total}")));
    }
    let freq = |y: i64| alpha.get(&y).copied().unwrap_or(0.0);
    let sizes: BTreeSet<i64> = alpha.keys().map(|y| y.abs()).collect();
    let mut entries = Vec::with_capacity(2 * sizes.len());
    for y in sizes {
        let (up, down) = (freq(y), freq(-y));
        let pair = (up + down) * beta0 / (2.0 - b);
        let scale = beta0 / ((2.0 - b) * b);
        let raw_up = (up - (1.0 - b) * down) * scale;
        let raw_down = (down - (1.0 - b) * up) * scale;
        let (nu_up, nu_down) = if raw_up < 0.0 {
            (0.0, pair)
        } else if raw_down < 0.0 {
            (pair, 0.0)
        } else {
            (raw_up, raw_down)
        };
        entries.push((y, nu_up));
        entries.push((-y, nu_down));
    }
    LevyMeasure::new(entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha(pairs: &[(i64, f64)]) -> BTreeMap<i64, f64> {
        pairs.iter().copied().collect()
    }

    #[test]
    fn asymmetric_example() {
        let nu = levy_from_moments(&alpha(&[(1, 0.6), (-1, 0.4)]), 0.05, 0.5).unwrap();
        assert!((nu.intensity(1) - 0.05 * 0.4 / 0.75).abs() < 1e-15);
        assert!((nu.intensity(-1) - 0.05 * 0.1 / 0.75).abs() < 1e-15);
        assert!((nu.intensity(1) - 0.026667).abs() < 1e-6);
        assert!((nu.intensity(-1) - 0.006667).abs() < 1e-6);
    }

    #[test]
    fn symmetric_frequencies() {
        let nu = levy_from_moments(&alpha(&[(1, 0.3), (-1, 0.3), (2, 0.2), (-2, 0.2)]), 0.1, 0.3).unwrap();
        assert!((nu.intensity(2) - 0.2 * 0.1 / 1.7).abs() < 1e-15);
        assert!((nu.intensity(-1) - 0.3 * 0.1 / 1.7).abs() < 1e-15);
    }

    #[test]
    fn truncation_keeps_the_pair_mass() {
        let nu = levy_from_moments(&alpha(&[(1, 0.2), (-1, 0.8)]), 0.1, 0.5).unwrap();
        assert_eq!(nu.intensity(1), 0.0);
        assert!((nu.intensity(-1) - 0.066667).abs() < 1e-6);
        assert!((nu.intensity(-1) - 0.1 / 1.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_inputs() {
        let a = alpha(&[(1, 0.5), (-1, 0.5)]);
        assert!(levy_from_moments(&a, 0.1, 0.0).is_err());
        assert!(levy_from_moments(&a, 0.1, 1.5).is_err());
        assert!(levy_from_moments(&a, 0.0, 0.5).is_err());
        assert!(levy_from_moments(&alpha(&[(1, 0.5)]), 0.1, 0.5).is_err());
    }
}
