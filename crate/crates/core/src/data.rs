use crate::error::{Error, Result};

/// Dense row-major `n × m` feature matrix. Rows are points, columns are features.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    values: Vec<f64>,
    n: usize,
    m: usize,
}

impl DataMatrix {
    /// Builds a matrix from row-major values, rejecting non-finite entries and degenerate shapes.
    pub fn new(values: Vec<f64>, n: usize, m: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Validation(format!(
                "data matrix needs at least 2 rows, got {n}"
            )));
        }
        if m < 1 {
            return Err(Error::Validation(
                "data matrix needs at least 1 column".into(),
            ));
        }
        Self::with_shape(values, n, m)
    }

    /// Like [`DataMatrix::new`] but allows any row count, including a single streamed point.
    pub fn with_shape(values: Vec<f64>, n: usize, m: usize) -> Result<Self> {
        if values.len() != n * m {
            return Err(Error::Validation(format!(
                "expected {} values for a {n}x{m} matrix, got {}",
                n * m,
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Validation(format!(
                "non-finite value {} at row {}, column {}",
                values[pos],
                pos / m,
                pos % m
            )));
        }
        Ok(DataMatrix { values, n, m })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != m) {
            return Err(Error::Validation(format!(
                "row {bad} has {} columns, expected {m}",
                rows[bad].len()
            )));
        }
        Self::new(rows.concat(), rows.len(), m)
    }

    pub fn nrows(&self) -> usize {
        self.n
    }

    pub fn ncols(&self) -> usize {
        self.m
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.m..(i + 1) * self.m]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> {
        self.values.chunks_exact(self.m)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &DataMatrix) -> Result<DataMatrix> {
        if other.m != self.m {
            return Err(Error::Validation(format!(
                "feature count mismatch: {} vs {}",
                self.m, other.m
            )));
        }
        let mut values = Vec::with_capacity(self.values.len() + other.values.len());
        values.extend_from_slice(&self.values);
        values.extend_from_slice(&other.values);
        Ok(DataMatrix {
            values,
            n: self.n + other.n,
            m: self.m,
        })
    }

    /// Column-wise z-scores (population standard deviation). Constant columns become zero.
    pub fn standardized(&self) -> DataMatrix {
        let n = self.n as f64;
        let mut out = self.values.clone();
        for j in 0..self.m {
            let mean = self.rows().map(|r| r[j]).sum::<f64>() / n;
            let var = self.rows().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / n;
            let sd = var.sqrt();
            for i in 0..self.n {
                let v = &mut out[i * self.m + j];
                *v = if sd > 0.0 { (*v - mean) / sd } else { 0.0 };
            }
        }
        DataMatrix {
            values: out,
            n: self.n,
            m: self.m,
        }
    }
}

/// Euclidean distance between two equal-length slices.
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_and_names_position() {
        let err = DataMatrix::new(vec![1.0, 2.0, f64::NAN, 4.0], 2, 2).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("row 1") && msg.contains("column 0"), "{msg}");
    }

    #[test]
    fn rejects_single_row() {
        assert!(DataMatrix::new(vec![1.0, 2.0], 1, 2).is_err());
        assert!(DataMatrix::with_shape(vec![1.0, 2.0], 1, 2).is_ok());
    }

    #[test]
    fn standardized_columns_have_zero_mean_unit_variance() {
        let w = DataMatrix::from_rows(&[vec![1.0, 5.0], vec![3.0, 5.0], vec![5.0, 5.0]]).unwrap();
        let z = w.standardized();
        let col: Vec<f64> = z.rows().map(|r| r[0]).collect();
        assert!((col.iter().sum::<f64>()).abs() < 1e-12);
        assert!((col.iter().map(|v| v * v).sum::<f64>() / 3.0 - 1.0).abs() < 1e-12);
        assert!(z.rows().all(|r| r[1] == 0.0));
    }
}
