//! Binary linear SVM: hinge loss with L2 regularization.
//!
//! Training minimizes `½‖w‖² + C·Σ max(0, 1 − yᵢ(w·xᵢ − b))` over the weight
//! vector `w` and a true intercept `b`. The solver works on the dual: it
//! repeatedly picks the maximal-violating pair of multipliers, solves the
//! two-variable subproblem analytically, and maintains `w` and the dual
//! gradient incrementally through a column-major view of the data. Pair
//! selection is deterministic (ties go to the lowest index), so training is a
//! pure function of its inputs.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::corpus::Polarity;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::vectorize::DocTermMatrix;

/// Training hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    /// Soft-margin trade-off; larger values penalize margin violations harder.
    pub c: f64,
    /// Stopping threshold on the maximal KKT violation.
    pub tolerance: f64,
    /// Iteration budget, counted in passes of `rows` pair updates.
    pub max_epochs: usize,
    /// Example-ordering seed. The pair-selection solver is deterministic and
    /// does not consume it; it is kept so alternative solvers share the
    /// parameter surface.
    pub seed: u64,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams {
            c: 1.0,
            tolerance: 1e-3,
            max_epochs: 1000,
            seed: 0,
        }
    }
}

impl SvmParams {
    pub fn validate(&self) -> Result<()> {
        if self.c.is_nan() || self.c <= 0.0 {
            return Err(Error::InvalidParam(format!(
                "svm c must be positive, got {}",
                self.c
            )));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::InvalidParam(format!(
                "svm tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        if self.max_epochs < 1 {
            return Err(Error::InvalidParam(
                "svm max_epochs must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Trained linear separator. The decision function is `sign(w·x − b)`.
#[derive(Debug, Clone)]
pub struct SvmModel<F: Scalar> {
    weights: Vec<F>,
    bias: F,
    alphas: Option<Vec<F>>,
    objective: Option<F>,
    converged: bool,
    iterations: usize,
    c: f64,
    tolerance: f64,
}

impl<F: Scalar> SvmModel<F> {
    /// Assembles a model from a weight vector and bias, e.g. for fixtures.
    pub fn from_parts(weights: Vec<F>, bias: F) -> Self {
        SvmModel {
            weights,
            bias,
            alphas: None,
            objective: None,
            converged: true,
            iterations: 0,
            c: 0.0,
            tolerance: 0.0,
        }
    }

    pub fn dims(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[F] {
        &self.weights
    }

    pub fn bias(&self) -> F {
        self.bias
    }

    /// Per-example dual multipliers when the model came out of the dual solver.
    pub fn alphas(&self) -> Option<&[F]> {
        self.alphas.as_deref()
    }

    /// Final primal objective value when the model was trained.
    pub fn objective(&self) -> Option<F> {
        self.objective
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    /// `w·x − b` for a sparse feature row.
    pub fn decision_value(&self, row: &[(usize, F)]) -> Result<F> {
        let mut dot = F::zero();
        for &(col, v) in row {
            if col >= self.weights.len() {
                return Err(Error::IndexOutOfRange {
                    index: col,
                    size: self.weights.len(),
                });
            }
            dot += self.weights[col] * v;
        }
        Ok(dot - self.bias)
    }

    /// Positive iff the decision value is strictly positive; an exact zero
    /// classifies negative.
    pub fn predict(&self, row: &[(usize, F)]) -> Result<Polarity> {
        Ok(if self.decision_value(row)? > F::zero() {
            Polarity::Positive
        } else {
            Polarity::Negative
        })
    }

    /// Predictions for every row of a matrix with matching width.
    pub fn predict_matrix(&self, matrix: &DocTermMatrix<F>) -> Result<Vec<Polarity>> {
        if matrix.cols() != self.weights.len() {
            return Err(Error::LengthMismatch {
                what: "matrix cols vs model dims",
                left: matrix.cols(),
                right: self.weights.len(),
            });
        }
        (0..matrix.rows())
            .map(|i| self.predict(&matrix.row_entries(i)))
            .collect()
    }

    /// Geometric margin `2/‖w‖`.
    pub fn margin(&self) -> Result<F> {
        let norm = self.weights.iter().map(|&w| w * w).sum::<F>().sqrt();
        if norm == F::zero() {
            return Err(Error::InvalidParam(
                "zero weight vector has no margin".into(),
            ));
        }
        Ok((F::one() + F::one()) / norm)
    }

    /// Text dump: `linsvm dims c tolerance objective` header, nonzero
    /// `index weight` lines, then a `bias` line. Round-trips through
    /// [`SvmModel::read_text`].
    pub fn write_text<W: Write>(&self, mut writer: W) -> std::io::Result<()> {
        let objective = self.objective.map(|o| o.as_f64()).unwrap_or(f64::NAN);
        writeln!(
            writer,
            "linsvm {} {} {} {}",
            self.weights.len(),
            self.c,
            self.tolerance,
            objective
        )?;
        for (i, &w) in self.weights.iter().enumerate() {
            if w != F::zero() {
                writeln!(writer, "{i} {w}")?;
            }
        }
        writeln!(writer, "bias {}", self.bias)
    }

    pub fn read_text<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines().enumerate();
        let bad = |line: usize, message: String| Error::ParseFormat {
            what: "svm model",
            line,
            message,
        };
        let (_, header) = lines
            .next()
            .ok_or_else(|| bad(1, "missing header".into()))?;
        let header = header.map_err(|e| bad(1, e.to_string()))?;
        let mut parts = header.split_whitespace();
        if parts.next() != Some("linsvm") {
            return Err(bad(1, "expected `linsvm` header".into()));
        }
        let dims: usize = parts
            .next()
            .and_then(|p| p.parse().ok())
            .ok_or_else(|| bad(1, "bad dims".into()))?;
        let c: f64 = parts
            .next()
            .and_then(|p| p.parse().ok())
            .ok_or_else(|| bad(1, "bad c".into()))?;
        let tolerance: f64 = parts
            .next()
            .and_then(|p| p.parse().ok())
            .ok_or_else(|| bad(1, "bad tolerance".into()))?;
        let objective: f64 = parts
            .next()
            .and_then(|p| p.parse().ok())
            .ok_or_else(|| bad(1, "bad objective".into()))?;

        let mut weights = vec![F::zero(); dims];
        let mut bias = None;
        for (index, line) in lines {
            let line_no = index + 1;
            let line = line.map_err(|e| bad(line_no, e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let first = parts.next().unwrap_or("");
            let value: f64 = parts
                .next()
                .and_then(|p| p.parse().ok())
                .ok_or_else(|| bad(line_no, "missing value".into()))?;
            if first == "bias" {
                bias = Some(value);
                continue;
            }
            let col: usize = first
                .parse()
                .map_err(|_| bad(line_no, format!("bad index {first:?}")))?;
            if col >= dims {
                return Err(bad(line_no, format!("index {col} out of range")));
            }
            weights[col] =
                F::from_f64(value).ok_or_else(|| bad(line_no, "weight out of range".into()))?;
        }
        let bias = bias.ok_or_else(|| bad(1, "missing bias line".into()))?;
        Ok(SvmModel {
            weights,
            bias: F::from_f64(bias).ok_or_else(|| bad(1, "bias out of range".into()))?,
            alphas: None,
            objective: if objective.is_nan() {
                None
            } else {
                F::from_f64(objective)
            },
            converged: true,
            iterations: 0,
            c,
            tolerance,
        })
    }
}

/// Column-major copy of the training matrix, used to push weight-vector
/// deltas into the dual gradient without touching unrelated examples.
struct ColumnView<F> {
    col_ptr: Vec<usize>,
    row_idx: Vec<u32>,
    values: Vec<F>,
}

impl<F: Scalar> ColumnView<F> {
    fn build(matrix: &DocTermMatrix<F>) -> Self {
        let mut counts = vec![0usize; matrix.cols()];
        for i in 0..matrix.rows() {
            for (col, _) in matrix.row(i) {
                counts[col] += 1;
            }
        }
        let mut col_ptr = Vec::with_capacity(matrix.cols() + 1);
        col_ptr.push(0);
        for &c in &counts {
            col_ptr.push(col_ptr.last().unwrap() + c);
        }
        let mut cursor = col_ptr.clone();
        let mut row_idx = vec![0u32; matrix.nnz()];
        let mut values = vec![F::zero(); matrix.nnz()];
        for i in 0..matrix.rows() {
            for (col, v) in matrix.row(i) {
                let slot = cursor[col];
                row_idx[slot] = i as u32;
                values[slot] = v;
                cursor[col] += 1;
            }
        }
        ColumnView {
            col_ptr,
            row_idx,
            values,
        }
    }

    fn column(&self, col: usize) -> impl Iterator<Item = (usize, F)> + '_ {
        let lo = self.col_ptr[col];
        let hi = self.col_ptr[col + 1];
        self.row_idx[lo..hi]
            .iter()
            .zip(&self.values[lo..hi])
            .map(|(&r, &v)| (r as usize, v))
    }
}

fn sparse_dot<F: Scalar>(a: &[(usize, F)], b: &[(usize, F)]) -> F {
    let mut dot = F::zero();
    let (mut ia, mut ib) = (0, 0);
    while ia < a.len() && ib < b.len() {
        match a[ia].0.cmp(&b[ib].0) {
            std::cmp::Ordering::Less => ia += 1,
            std::cmp::Ordering::Greater => ib += 1,
            std::cmp::Ordering::Equal => {
                dot += a[ia].1 * b[ib].1;
                ia += 1;
                ib += 1;
            }
        }
    }
    dot
}

/// Trains the soft-margin SVM on a labeled matrix.
///
/// Errors on single-class input. Exhausting the iteration budget is not an
/// error: the model comes back with `converged() == false` and the iteration
/// count, so callers can report it.
pub fn train<F: Scalar>(matrix: &DocTermMatrix<F>, params: &SvmParams) -> Result<SvmModel<F>> {
    params.validate()?;
    let n = matrix.rows();
    if n < 2 {
        return Err(Error::EmptyInput("svm training needs at least 2 documents"));
    }
    let labels = matrix.labels();
    let n_pos = labels.iter().filter(|&&l| l == Polarity::Positive).count();
    if n_pos == 0 || n_pos == n {
        return Err(Error::SingleClass);
    }

    let y: Vec<F> = labels
        .iter()
        .map(|l| {
            if l.encoding() > 0 {
                F::one()
            } else {
                -F::one()
            }
        })
        .collect();
    let c = F::from_f64(params.c)
        .ok_or_else(|| Error::InvalidParam("c out of range for scalar type".into()))?;
    let tol = F::from_f64(params.tolerance)
        .ok_or_else(|| Error::InvalidParam("tolerance out of range for scalar type".into()))?;
    let tiny = F::from_f64(1e-12).unwrap_or_else(F::epsilon);

    let rows: Vec<Vec<(usize, F)>> = (0..n).map(|i| matrix.row_entries(i)).collect();
    let sq_norm: Vec<F> = rows
        .iter()
        .map(|r| r.iter().map(|&(_, v)| v * v).sum())
        .collect();
    let columns = ColumnView::build(matrix);

    let mut alpha = vec![F::zero(); n];
    let mut w = vec![F::zero(); matrix.cols()];
    // grad[t] = y_t·(w·x_t) − 1, the dual gradient
    let mut grad = vec![-F::one(); n];

    let max_iterations = params.max_epochs.saturating_mul(n);
    let refresh_every = 4 * n;
    let mut iterations = 0usize;
    let mut converged = false;

    while iterations < max_iterations {
        // Maximal violating pair: i maximizes −y·grad over multipliers that
        // can grow along +y, j minimizes it over those that can shrink.
        let mut up: Option<(usize, F)> = None;
        let mut low: Option<(usize, F)> = None;
        for t in 0..n {
            let v = -y[t] * grad[t];
            let positive = y[t] > F::zero();
            let can_up = (positive && alpha[t] < c) || (!positive && alpha[t] > F::zero());
            let can_low = (!positive && alpha[t] < c) || (positive && alpha[t] > F::zero());
            if can_up && up.is_none_or(|(_, best)| v > best) {
                up = Some((t, v));
            }
            if can_low && low.is_none_or(|(_, best)| v < best) {
                low = Some((t, v));
            }
        }
        let (Some((i, m_up)), Some((j, m_low))) = (up, low) else {
            converged = true;
            break;
        };
        if m_up - m_low <= tol {
            converged = true;
            break;
        }

        let curvature = {
            let cross = sparse_dot(&rows[i], &rows[j]);
            let eta = sq_norm[i] + sq_norm[j] - (cross + cross);
            if eta > tiny {
                eta
            } else {
                tiny
            }
        };
        // Unconstrained minimizer along α_i += y_i·δ, α_j −= y_j·δ, then
        // clipped to keep both multipliers in [0, C].
        let mut delta = (m_up - m_low) / curvature;
        let (lo_i, hi_i) = if y[i] > F::zero() {
            (-alpha[i], c - alpha[i])
        } else {
            (alpha[i] - c, alpha[i])
        };
        let (lo_j, hi_j) = if y[j] > F::zero() {
            (alpha[j] - c, alpha[j])
        } else {
            (-alpha[j], c - alpha[j])
        };
        let lo = lo_i.max(lo_j);
        let hi = hi_i.min(hi_j);
        delta = delta.min(hi).max(lo);
        if delta == F::zero() {
            break;
        }

        alpha[i] = (alpha[i] + y[i] * delta).max(F::zero()).min(c);
        alpha[j] = (alpha[j] - y[j] * delta).max(F::zero()).min(c);

        // w moves by δ·(x_i − x_j); the gradient follows column by column.
        for &(col, v) in &rows[i] {
            let dv = delta * v;
            w[col] += dv;
            for (t, x) in columns.column(col) {
                grad[t] += y[t] * dv * x;
            }
        }
        for &(col, v) in &rows[j] {
            let dv = -(delta * v);
            w[col] += dv;
            for (t, x) in columns.column(col) {
                grad[t] += y[t] * dv * x;
            }
        }

        iterations += 1;
        if iterations.is_multiple_of(refresh_every) {
            // Rebuild the gradient from w to shed accumulated rounding.
            for t in 0..n {
                let wx = rows[t].iter().map(|&(col, v)| w[col] * v).sum::<F>();
                grad[t] = y[t] * wx - F::one();
            }
        }
    }

    // Intercept from the KKT conditions: free multipliers pin w·x_t − y_t to
    // b exactly; bound ones bracket it.
    let mut free_sum = F::zero();
    let mut free_count = 0usize;
    let mut lower = F::neg_infinity();
    let mut upper = F::infinity();
    for t in 0..n {
        let wx = rows[t].iter().map(|&(col, v)| w[col] * v).sum::<F>();
        let v = wx - y[t];
        let at_zero = alpha[t] == F::zero();
        let at_c = alpha[t] == c;
        if !at_zero && !at_c {
            free_sum += v;
            free_count += 1;
        } else {
            let positive = y[t] > F::zero();
            if (at_zero && positive) || (at_c && !positive) {
                upper = upper.min(v);
            } else {
                lower = lower.max(v);
            }
        }
    }
    let two = F::one() + F::one();
    let bias = if free_count > 0 {
        free_sum / F::from_count(free_count)
    } else if lower.is_finite() && upper.is_finite() {
        (lower + upper) / two
    } else if lower.is_finite() {
        lower
    } else if upper.is_finite() {
        upper
    } else {
        F::zero()
    };

    let mut hinge = F::zero();
    for t in 0..n {
        let wx = rows[t].iter().map(|&(col, v)| w[col] * v).sum::<F>();
        let slack = F::one() - y[t] * (wx - bias);
        if slack > F::zero() {
            hinge += slack;
        }
    }
    let objective = w.iter().map(|&v| v * v).sum::<F>() / two + c * hinge;

    Ok(SvmModel {
        weights: w,
        bias,
        alphas: Some(alpha),
        objective: Some(objective),
        converged,
        iterations,
        c: params.c,
        tolerance: params.tolerance,
    })
}
