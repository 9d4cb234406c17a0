use std::collections::BTreeMap;

use num_complex::Complex64;

use crate::error::{invalid, Result};

/// Finite-support Lévy measure on the non-zero integers.
///
/// `intensity(y)` is the arrival rate (events per second) of jumps of size
/// `y` ticks. Zero intensities are not stored.
#[derive(Debug, Clone, PartialEq)]
pub struct LevyMeasure {
    entries: BTreeMap<i64, f64>,
    total: f64,
}

impl LevyMeasure {
    pub fn new<I>(entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, f64)>,
    {
        let mut map = BTreeMap::new();
        for (y, rate) in entries {
            if y == 0 {
                return Err(invalid("Lévy measure cannot put mass on jump size 0"));
            }
            if !rate.is_finite() || rate < 0.0 {
                return Err(invalid(format!("intensity for y={y} must be finite and >= 0, got {rate}")));
            }
            if map.contains_key(&y) {
                return Err(invalid(format!("duplicate jump size {y}")));
            }
            if rate > 0.0 {
                map.insert(y, rate);
            }
        }
        let total: f64 = map.values().sum();
        if !(total > 0.0) {
            return Err(invalid("Lévy measure must have positive total mass"));
        }
        Ok(Self { entries: map, total })
    }

    /// Skellam basis: unit up-moves at rate `plus`, unit down-moves at rate `minus`.
    pub fn skellam(plus: f64, minus: f64) -> Result<Self> {
        Self::new([(1, plus), (-1, minus)])
    }

    pub fn entries(&self) -> &BTreeMap<i64, f64> {
        &self.entries
    }

    pub fn intensity(&self, y: i64) -> f64 {
        self.entries.get(&y).copied().unwrap_or(0.0)
    }

    /// `||nu||`, the total arrival rate.
    pub fn total_mass(&self) -> f64 {
        self.total
    }

    /// Sum of intensities over positive jump sizes.
    pub fn positive_mass(&self) -> f64 {
        self.entries.range(1..).map(|(_, v)| v).sum()
    }

    /// Sum of intensities over negative jump sizes.
    pub fn negative_mass(&self) -> f64 {
        self.entries.range(..0).map(|(_, v)| v).sum()
    }

    pub fn max_abs_jump(&self) -> u64 {
        self.entries.keys().map(|y| y.unsigned_abs()).max().unwrap_or(0)
    }

    /// `kappa_j(L_1) = sum_y y^j nu(y)`.
    pub fn cumulant(&self, j: u32) -> f64 {
        self.entries
            .iter()
            .map(|(&y, &v)| (y as f64).powi(j as i32) * v)
            .sum()
    }

    /// `sum_y |y|^r nu(y)`; `r = 0` gives the total mass.
    pub fn abs_moment(&self, r: f64) -> f64 {
        if r == 0.0 {
            return self.total;
        }
        self.entries
            .iter()
            .map(|(&y, &v)| (y.unsigned_abs() as f64).powf(r) * v)
            .sum()
    }

    /// Log characteristic function of `L_1`: `sum_y nu(y) (e^{i theta y} - 1)`.
    pub fn log_cf(&self, theta: f64) -> Complex64 {
        self.entries
            .iter()
            .map(|(&y, &v)| {
                let arg = theta * y as f64;
                // e^{ia} - 1 = (cos a - 1) + i sin a, with cos a - 1 = -2 sin^2(a/2)
                let half = (0.5 * arg).sin();
                Complex64::new(-2.0 * half * half * v, arg.sin() * v)
            })
            .sum()
    }
}

/// `kappa_j(L_1)` for `j >= 1`.
pub fn levy_cumulant(levy: &LevyMeasure, j: u32) -> Result<f64> {
    if j == 0 {
        return Err(invalid("cumulant order must be >= 1"));
    }
    Ok(levy.cumulant(j))
}

/// `sum_y |y|^r nu(y)` for `r >= 0`.
pub fn levy_abs_moment(levy: &LevyMeasure, r: f64) -> Result<f64> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(invalid(format!("power must be finite and >= 0, got {r}")));
    }
    Ok(levy.abs_moment(r))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_skellam() -> LevyMeasure {
        LevyMeasure::skellam(0.0138, 0.0131).unwrap()
    }

    #[test]
    fn cumulants_of_the_skellam_basis() {
        let nu = reference_skellam();
        assert!((levy_cumulant(&nu, 1).unwrap() - 0.0007).abs() < 1e-15);
        assert!((levy_cumulant(&nu, 2).unwrap() - 0.0269).abs() < 1e-15);
        let sym = LevyMeasure::skellam(0.3, 0.3).unwrap();
        for j in [1, 3, 5, 7] {
            assert_eq!(sym.cumulant(j), 0.0);
        }
        assert!(levy_cumulant(&nu, 0).is_err());
    }

    #[test]
    fn absolute_moments() {
        let nu = reference_skellam();
        assert!((levy_abs_moment(&nu, 0.0).unwrap() - 0.0269).abs() < 1e-15);
        assert!((levy_abs_moment(&nu, 2.0).unwrap() - 0.0269).abs() < 1e-15);
        let single = LevyMeasure::new([(2, 0.5)]).unwrap();
        assert!((single.abs_moment(2.0) - 2.0).abs() < 1e-15);
        assert!(levy_abs_moment(&nu, -1.0).is_err());
    }

    #[test]
    fn rejects_invalid_measures() {
        assert!(LevyMeasure::new([(0, 1.0)]).is_err());
        assert!(LevyMeasure::new([(1, -0.1)]).is_err());
        assert!(LevyMeasure::new([(1, 0.0)]).is_err());
        assert!(LevyMeasure::new([(1, 0.1), (1, 0.2)]).is_err());
        assert!(LevyMeasure::new(Vec::<(i64, f64)>::new()).is_err());
    }

    #[test]
    fn masses_split_by_sign() {
        let nu = LevyMeasure::new([(1, 0.1), (2, 0.05), (-1, 0.2), (-3, 0.01)]).unwrap();
        assert!((nu.positive_mass() - 0.15).abs() < 1e-15);
        assert!((nu.negative_mass() - 0.21).abs() < 1e-15);
        assert_eq!(nu.max_abs_jump(), 3);
    }

    #[test]
    fn log_cf_matches_direct_exponential() {
        let nu = LevyMeasure::new([(1, 0.1), (2, 0.05), (-1, 0.2)]).unwrap();
        let theta = 0.7;
        let direct: Complex64 = nu
            .entries()
            .iter()
            .map(|(&y, &v)| v * (Complex64::new(0.0, theta * y as f64).exp() - 1.0))
            .sum();
        assert!((nu.log_cf(theta) - direct).norm() < 1e-15);
    }
}
