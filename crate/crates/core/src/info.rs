//! Exact information measures over finite alphabets.
//!
//! Conventions: logarithms are base 2, `0 log 0 = 0`, and a relative entropy
//! with `p_i > 0, q_i = 0` evaluates to `f64::INFINITY`. Sums always run in
//! index order so results are reproducible bit for bit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on the total mass of a probability vector.
pub const PROB_TOL: f64 = 1e-9;

/// A probability vector over a finite alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    probs: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl Distribution {
    /// Validates `probs` and renormalizes it if the total is within
    /// [`PROB_TOL`] of one.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        let probs = validate_probs(probs)?;
        Ok(Self {
            probs,
            labels: None,
        })
    }

    /// Normalizes nonnegative weights into a distribution.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidDistribution("empty weight vector".into()));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
            return Err(Error::InvalidDistribution(format!("bad weight {w}")));
        }
        let total: f64 = weights.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidDistribution("weights sum to zero".into()));
        }
        Self::new(weights.iter().map(|w| w / total).collect())
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDistribution("empty alphabet".into()));
        }
        Ok(Self {
            probs: vec![1.0 / n as f64; n],
            labels: None,
        })
    }

    /// Point mass on `index` within an alphabet of size `n`.
    pub fn degenerate(n: usize, index: usize) -> Result<Self> {
        if index >= n {
            return Err(Error::InvalidParameter(format!(
                "index {index} outside alphabet of size {n}"
            )));
        }
        let mut probs = vec![0.0; n];
        probs[index] = 1.0;
        Ok(Self {
            probs,
            labels: None,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.probs.len() {
            return Err(Error::DimensionMismatch {
                expected: self.probs.len(),
                actual: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.probs[i]
    }

    /// Indices with strictly positive probability.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > 0.0)
            .map(|(i, _)| i)
    }
}

fn validate_probs(mut probs: Vec<f64>) -> Result<Vec<f64>> {
    if probs.is_empty() {
        return Err(Error::InvalidDistribution("empty probability vector".into()));
    }
    for (i, &p) in probs.iter().enumerate() {
        if !p.is_finite() || !(0.0..=1.0 + PROB_TOL).contains(&p) {
            return Err(Error::InvalidDistribution(format!(
                "entry {i} = {p} is not a probability"
            )));
        }
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > PROB_TOL {
        return Err(Error::InvalidDistribution(format!(
            "entries sum to {total}, not 1"
        )));
    }
    if total != 1.0 {
        probs.iter_mut().for_each(|p| *p /= total);
    }
    Ok(probs)
}

/// Joint probability table over (actions, messages), stored row-major with
/// actions on rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    rows: usize,
    cols: usize,
    table: Vec<f64>,
}

impl JointDistribution {
    pub fn new(rows: usize, cols: usize, table: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidDistribution("empty joint table".into()));
        }
        if table.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                actual: table.len(),
            });
        }
        let table = validate_probs(table)?;
        Ok(Self { rows, cols, table })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != n_cols) {
            return Err(Error::DimensionMismatch {
                expected: n_cols,
                actual: bad.len(),
            });
        }
        Self::new(n_rows, n_cols, rows.concat())
    }

    /// `Pr(a, m) = prior(m) * conditionals[m](a)`.
    pub fn from_conditionals(prior: &Distribution, conditionals: &[Distribution]) -> Result<Self> {
        if conditionals.len() != prior.len() {
            return Err(Error::DimensionMismatch {
                expected: prior.len(),
                actual: conditionals.len(),
            });
        }
        let rows = conditionals[0].len();
        if let Some(bad) = conditionals.iter().find(|c| c.len() != rows) {
            return Err(Error::DimensionMismatch {
                expected: rows,
                actual: bad.len(),
            });
        }
        let cols = prior.len();
        let mut table = vec![0.0; rows * cols];
        for (m, cond) in conditionals.iter().enumerate() {
            for a in 0..rows {
                table[a * cols + m] = prior.get(m) * cond.get(a);
            }
        }
        Self::new(rows, cols, table)
    }

    pub fn product(actions: &Distribution, messages: &Distribution) -> Self {
        let (rows, cols) = (actions.len(), messages.len());
        let mut table = Vec::with_capacity(rows * cols);
        for a in 0..rows {
            for m in 0..cols {
                table.push(actions.get(a) * messages.get(m));
            }
        }
        Self { rows, cols, table }
    }

    /// Coupling of independent pairs: `((a1, a2), (m1, m2))` with
    /// rows indexed `a1 * |A2| + a2` and columns `m1 * |M2| + m2`.
    pub fn independent_product(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut table = vec![0.0; rows * cols];
        for a1 in 0..self.rows {
            for a2 in 0..other.rows {
                for m1 in 0..self.cols {
                    for m2 in 0..other.cols {
                        table[(a1 * other.rows + a2) * cols + m1 * other.cols + m2] =
                            self.get(a1, m1) * other.get(a2, m2);
                    }
                }
            }
        }
        Self { rows, cols, table }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn table(&self) -> &[f64] {
        &self.table
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.table[row * self.cols + col]
    }

    pub fn row_marginal(&self) -> Distribution {
        let probs = (0..self.rows)
            .map(|a| (0..self.cols).map(|m| self.get(a, m)).sum())
            .collect();
        Distribution {
            probs,
            labels: None,
        }
    }

    pub fn col_marginal(&self) -> Distribution {
        let probs = (0..self.cols)
            .map(|m| (0..self.rows).map(|a| self.get(a, m)).sum())
            .collect();
        Distribution {
            probs,
            labels: None,
        }
    }

    /// `Pr(row | col)`, or `None` when the column has zero mass.
    pub fn row_conditional(&self, col: usize) -> Option<Distribution> {
        let mass: f64 = (0..self.rows).map(|a| self.get(a, col)).sum();
        if mass <= 0.0 {
            return None;
        }
        let probs = (0..self.rows).map(|a| self.get(a, col) / mass).collect();
        Some(Distribution {
            probs,
            labels: None,
        })
    }

    pub fn transpose(&self) -> Self {
        let mut table = Vec::with_capacity(self.table.len());
        for m in 0..self.cols {
            for a in 0..self.rows {
                table.push(self.get(a, m));
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            table,
        }
    }

    /// Folds column `j` into column `i` and drops `j`.
    pub fn merge_cols(&self, i: usize, j: usize) -> Result<Self> {
        if i >= self.cols || j >= self.cols || i == j || self.cols < 2 {
            return Err(Error::InvalidParameter(format!(
                "cannot merge columns {i} and {j} of {}",
                self.cols
            )));
        }
        let cols = self.cols - 1;
        let mut table = Vec::with_capacity(self.rows * cols);
        for a in 0..self.rows {
            for m in 0..self.cols {
                if m == j {
                    continue;
                }
                let mut v = self.get(a, m);
                if m == i {
                    v += self.get(a, j);
                }
                table.push(v);
            }
        }
        Ok(Self {
            rows: self.rows,
            cols,
            table,
        })
    }
}

/// Joint table over `(x, y, z)` stored with `x` outermost.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeWayTable {
    dims: [usize; 3],
    table: Vec<f64>,
}

impl ThreeWayTable {
    pub fn new(dims: [usize; 3], table: Vec<f64>) -> Result<Self> {
        let size = dims.iter().product::<usize>();
        if size == 0 {
            return Err(Error::InvalidDistribution("empty three-way table".into()));
        }
        if table.len() != size {
            return Err(Error::DimensionMismatch {
                expected: size,
                actual: table.len(),
            });
        }
        let table = validate_probs(table)?;
        Ok(Self { dims, table })
    }

    pub(crate) fn from_raw(dims: [usize; 3], table: Vec<f64>) -> Self {
        debug_assert_eq!(table.len(), dims.iter().product::<usize>());
        Self { dims, table }
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn get(&self, x: usize, y: usize, z: usize) -> f64 {
        let [_, ny, nz] = self.dims;
        self.table[(x * ny + y) * nz + z]
    }
}

fn plogp_sum(probs: impl IntoIterator<Item = f64>) -> f64 {
    let mut h = 0.0;
    for p in probs {
        if p > 0.0 {
            h -= p * p.log2();
        }
    }
    h
}

/// Shannon entropy `H(p)` in bits.
pub fn entropy(p: &Distribution) -> f64 {
    plogp_sum(p.probs.iter().copied())
}

/// Relative entropy `D(p‖q)` in bits; `f64::INFINITY` when `q` misses part
/// of the support of `p`.
pub fn relative_entropy(p: &Distribution, q: &Distribution) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: p.len(),
            actual: q.len(),
        });
    }
    let mut d = 0.0;
    for (&pi, &qi) in p.probs.iter().zip(&q.probs) {
        if pi > 0.0 {
            if qi <= 0.0 {
                return Ok(f64::INFINITY);
            }
            d += pi * (pi / qi).log2();
        }
    }
    Ok(d)
}

pub fn joint_entropy(j: &JointDistribution) -> f64 {
    plogp_sum(j.table.iter().copied())
}

/// `I(A;M) = Σ Pr(a,m) log[Pr(a,m) / (Pr(a) Pr(m))]`.
pub fn mutual_information(j: &JointDistribution) -> f64 {
    let pa = j.row_marginal();
    let pm = j.col_marginal();
    let mut i = 0.0;
    for a in 0..j.rows {
        for m in 0..j.cols {
            let p = j.get(a, m);
            if p > 0.0 {
                i += p * (p / (pa.get(a) * pm.get(m))).log2();
            }
        }
    }
    i
}

/// `H(A|M) = Σ_m Pr(m) H(Pr(·|m))`.
pub fn conditional_entropy(j: &JointDistribution) -> f64 {
    let pm = j.col_marginal();
    let mut h = 0.0;
    for m in 0..j.cols {
        let mass = pm.get(m);
        if mass > 0.0 {
            h += mass * plogp_sum((0..j.rows).map(|a| j.get(a, m) / mass));
        }
    }
    h
}

/// `I(X;Y|Z) = Σ p(x,y,z) log[p(x,y,z) p(z) / (p(x,z) p(y,z))]`.
pub fn conditional_mutual_information(t: &ThreeWayTable) -> f64 {
    let [nx, ny, nz] = t.dims;
    let mut pxz = vec![0.0; nx * nz];
    let mut pyz = vec![0.0; ny * nz];
    let mut pz = vec![0.0; nz];
    for x in 0..nx {
        for y in 0..ny {
            for z in 0..nz {
                let p = t.get(x, y, z);
                pxz[x * nz + z] += p;
                pyz[y * nz + z] += p;
                pz[z] += p;
            }
        }
    }
    let mut i = 0.0;
    for x in 0..nx {
        for y in 0..ny {
            for z in 0..nz {
                let p = t.get(x, y, z);
                if p > 0.0 {
                    i += p * (p * pz[z] / (pxz[x * nz + z] * pyz[y * nz + z])).log2();
                }
            }
        }
    }
    i
}

/// Differential entropy of a normal distribution with standard deviation
/// `sigma`: `½ log₂(2πe σ²)`.
pub fn gaussian_entropy(sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "volatility must be positive and finite, got {sigma}"
        )));
    }
    Ok(0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E * sigma * sigma).log2())
}
