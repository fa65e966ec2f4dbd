use serde::{Deserialize, Serialize};

use super::{PanelDataset, PanelError, Variable};

/// Z-score standardization fitted on a subset of records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub variables: Vec<Variable>,
    pub mean: Vec<f64>,
    /// Sample standard deviations (n - 1 denominator), all strictly positive.
    pub sd: Vec<f64>,
}

impl Scaler {
    pub fn fit(ds: &PanelDataset, idx: &[usize], variables: &[Variable]) -> Result<Scaler, PanelError> {
        ds.check_indices(idx)?;
        let mut mean = Vec::with_capacity(variables.len());
        let mut sd = Vec::with_capacity(variables.len());
        for &var in variables {
            let xs = ds.column_at(var, idx);
            let m = xs.iter().sum::<f64>() / xs.len() as f64;
            let s = if xs.len() > 1 {
                (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
            } else {
                0.0
            };
            // relative guard so rounding noise on a constant column does not pass
            if s.is_nan() || s <= 1e-12 * m.abs().max(1.0) {
                return Err(PanelError::ConstantColumn(var));
            }
            mean.push(m);
            sd.push(s);
        }
        Ok(Scaler {
            variables: variables.to_vec(),
            mean,
            sd,
        })
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn apply(&self, values: &[f64]) -> Result<Vec<f64>, PanelError> {
        self.check_len(values)?;
        Ok(values.iter().enumerate().map(|(k, v)| self.apply_one(k, *v)).collect())
    }

    pub fn invert(&self, values: &[f64]) -> Result<Vec<f64>, PanelError> {
        self.check_len(values)?;
        Ok(values.iter().enumerate().map(|(k, v)| self.invert_one(k, *v)).collect())
    }

    pub fn apply_one(&self, k: usize, v: f64) -> f64 {
        (v - self.mean[k]) / self.sd[k]
    }

    pub fn invert_one(&self, k: usize, z: f64) -> f64 {
        z * self.sd[k] + self.mean[k]
    }

    fn check_len(&self, values: &[f64]) -> Result<(), PanelError> {
        if values.len() != self.len() {
            return Err(PanelError::LengthMismatch {
                expected: self.len(),
                found: values.len(),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::panel::PanelRecord;
    use proptest::prelude::*;

    fn ds_from(co2: &[f64]) -> PanelDataset {
        let records = co2
            .iter()
            .enumerate()
            .map(|(i, &c)| PanelRecord {
                country: "A".into(),
                year: 2000 + i as i32,
                co2: c,
                gdp: 1.0 + i as f64,
                energy_use: 5.0,
                population: 1.0,
            })
            .collect();
        PanelDataset::new(records, false).unwrap()
    }

    #[test]
    fn two_point_column() {
        let s = Scaler::fit(&ds_from(&[1.0, 3.0]), &[0, 1], &[Variable::Co2]).unwrap();
        assert_eq!(s.mean, [2.0]);
        assert!((s.sd[0] - 2f64.sqrt()).abs() < 1e-15);
        assert!((s.apply(&[3.0]).unwrap()[0] - 1.0 / 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(s.apply(&[2.0]).unwrap(), [0.0]);
    }

    #[test]
    fn uses_only_the_given_subset() {
        let s = Scaler::fit(&ds_from(&[1.0, 3.0, 100.0]), &[0, 1], &[Variable::Co2]).unwrap();
        assert_eq!(s.mean, [2.0]);
    }

    #[test]
    fn constant_column_fails() {
        let ds = ds_from(&[1.0, 3.0]);
        assert_eq!(
            Scaler::fit(&ds, &[0, 1], &[Variable::Co2, Variable::EnergyUse]).unwrap_err(),
            PanelError::ConstantColumn(Variable::EnergyUse)
        );
        assert_eq!(
            Scaler::fit(&ds, &[], &[Variable::Co2]).unwrap_err(),
            PanelError::EmptyIndex
        );
        assert!(matches!(
            Scaler::fit(&ds, &[5], &[Variable::Co2]),
            Err(PanelError::IndexOutOfRange { index: 5, len: 2 })
        ));
    }

    proptest! {
        #[test]
        fn invert_undoes_apply(xs in proptest::collection::vec(-1e6f64..1e6, 2), v in -1e7f64..1e7) {
            prop_assume!((xs[0] - xs[1]).abs() > 1e-3);
            let s = Scaler::fit(&ds_from(&[1.0, 2.0]), &[0, 1], &[Variable::Co2, Variable::Gdp]).unwrap();
            let s = Scaler { mean: xs.clone(), sd: vec![(xs[0] - xs[1]).abs(), 0.37], ..s };
            let back = s.invert(&s.apply(&[v, -v]).unwrap()).unwrap();
            prop_assert!((back[0] - v).abs() <= 1e-12 * v.abs().max(xs[0].abs()).max(1.0));
            prop_assert!((back[1] + v).abs() <= 1e-12 * v.abs().max(xs[1].abs()).max(1.0));
        }
    }
}
