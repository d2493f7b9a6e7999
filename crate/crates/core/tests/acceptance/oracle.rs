//! Independent reference implementations the acceptance suite checks the
//! library against. Everything here works on dense `f64` data with direct
//! textbook formulas and shares no code with the library's scoring or
//! training paths.

/// Presence counts for one feature column, by looping over documents.
/// Returns (a, b, c, d): in-class with term, out-of-class with term,
/// in-class without, out-of-class without.
pub fn dense_contingency(column: &[f64], labels: &[i8]) -> (u32, u32, u32, u32) {
    let (mut a, mut b, mut c, mut d) = (0u32, 0u32, 0u32, 0u32);
    for (&x, &y) in column.iter().zip(labels) {
        let present = x > 0.0;
        let in_class = y > 0;
        match (present, in_class) {
            (true, true) => a += 1,
            (true, false) => b += 1,
            (false, true) => c += 1,
            (false, false) => d += 1,
        }
    }
    (a, b, c, d)
}

fn entropy_of(counts: &[u32]) -> f64 {
    let total: u32 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let mut h = 0.0;
    for &count in counts {
        if count > 0 {
            let p = count as f64 / total as f64;
            h -= p * p.log2();
        }
    }
    h
}

/// Information gain via direct probability tables.
pub fn ig(column: &[f64], labels: &[i8]) -> f64 {
    let (a, b, c, d) = dense_contingency(column, labels);
    let n = (a + b + c + d) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let class_entropy = entropy_of(&[a + c, b + d]);
    let p_present = (a + b) as f64 / n;
    let p_absent = (c + d) as f64 / n;
    let gain = class_entropy - p_present * entropy_of(&[a, b]) - p_absent * entropy_of(&[c, d]);
    gain.max(0.0)
}

/// Chi-square via the expected-vs-observed cell sum over the 2x2 table,
/// a different algebraic route than the closed form.
pub fn chi2(column: &[f64], labels: &[i8]) -> f64 {
    let (a, b, c, d) = dense_contingency(column, labels);
    let n = (a + b + c + d) as f64;
    let observed = [[a as f64, b as f64], [c as f64, d as f64]];
    let row_sums = [
        observed[0][0] + observed[0][1],
        observed[1][0] + observed[1][1],
    ];
    let col_sums = [
        observed[0][0] + observed[1][0],
        observed[0][1] + observed[1][1],
    ];
    if row_sums.iter().chain(&col_sums).any(|&m| m == 0.0) {
        return 0.0;
    }
    let mut stat = 0.0;
    for (i, row) in observed.iter().enumerate() {
        for (j, &o) in row.iter().enumerate() {
            let expected = row_sums[i] * col_sums[j] / n;
            stat += (o - expected) * (o - expected) / expected;
        }
    }
    stat
}

/// Gini purity via direct conditional probabilities.
pub fn gini(column: &[f64], labels: &[i8]) -> f64 {
    let (a, b, c, d) = dense_contingency(column, labels);
    if a + b == 0 {
        return 0.0;
    }
    let ratio = |num: u32, den: u32| {
        if den == 0 {
            0.0
        } else {
            num as f64 / den as f64
        }
    };
    let p_t_c1 = ratio(a, a + c);
    let p_t_c2 = ratio(b, b + d);
    let p_c1_t = ratio(a, a + b);
    let p_c2_t = ratio(b, a + b);
    p_t_c1 * p_t_c1 * p_c1_t * p_c1_t + p_t_c2 * p_t_c2 * p_c2_t * p_c2_t
}

/// Pearson correlation magnitude via the centered-products formula,
/// `Σ(x−x̄)(y−ȳ) / sqrt(Σ(x−x̄)²·Σ(y−ȳ)²)`.
pub fn correlation(column: &[f64], labels: &[i8]) -> f64 {
    let n = column.len();
    if n < 2 {
        return 0.0;
    }
    let y: Vec<f64> = labels.iter().map(|&l| l as f64).collect();
    let x_mean = column.iter().sum::<f64>() / n as f64;
    let y_mean = y.iter().sum::<f64>() / n as f64;
    let mut cov = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for (&x, &yv) in column.iter().zip(&y) {
        cov += (x - x_mean) * (yv - y_mean);
        var_x += (x - x_mean) * (x - x_mean);
        var_y += (yv - y_mean) * (yv - y_mean);
    }
    if var_x == 0.0 || var_y == 0.0 {
        return 0.0;
    }
    (cov / (var_x * var_y).sqrt()).abs().min(1.0)
}

/// Soft-margin primal objective `½‖w‖² + C·Σ max(0, 1 − yᵢ(w·xᵢ − b))`.
pub fn primal_objective(w: &[f64], b: f64, docs: &[Vec<f64>], labels: &[i8], c: f64) -> f64 {
    let reg = 0.5 * w.iter().map(|v| v * v).sum::<f64>();
    let hinge: f64 = docs
        .iter()
        .zip(labels)
        .map(|(x, &y)| {
            let decision = w.iter().zip(x).map(|(wi, xi)| wi * xi).sum::<f64>() - b;
            (1.0 - y as f64 * decision).max(0.0)
        })
        .sum();
    reg + c * hinge
}

/// Grid-search SVM trainer: repeatedly lays a 13-point grid per dimension
/// over the current search box, moves to the best point, and shrinks the box
/// around it. The search space is `(w, b)`; initial bounds come from the data
/// (`|w_j| ≤ C·Σᵢ|x_ij|` at any dual-feasible point).
pub fn grid_train(docs: &[Vec<f64>], labels: &[i8], c: f64, levels: usize) -> (Vec<f64>, f64, f64) {
    let dims = docs[0].len();
    let mut radius: Vec<f64> = (0..dims)
        .map(|j| c * docs.iter().map(|x| x[j].abs()).sum::<f64>() + 1.0)
        .collect();
    let b_radius = (0..dims)
        .map(|j| radius[j] * docs.iter().map(|x| x[j].abs()).fold(0.0, f64::max))
        .sum::<f64>()
        + 1.0;
    radius.push(b_radius);

    let total_dims = dims + 1;
    let mut center = vec![0.0; total_dims];
    let mut best_point = center.clone();
    let mut best_value = objective_at(&center, docs, labels, c);

    const POINTS: usize = 13;
    let mut point = vec![0.0; total_dims];
    for _ in 0..levels {
        let mut level_best = best_value;
        let mut level_point = best_point.clone();
        let mut index = vec![0usize; total_dims];
        loop {
            for d in 0..total_dims {
                let offset = index[d] as f64 / (POINTS - 1) as f64 * 2.0 - 1.0;
                point[d] = center[d] + offset * radius[d];
            }
            let value = objective_at(&point, docs, labels, c);
            if value < level_best {
                level_best = value;
                level_point.copy_from_slice(&point);
            }
            // odometer increment
            let mut d = 0;
            loop {
                index[d] += 1;
                if index[d] < POINTS {
                    break;
                }
                index[d] = 0;
                d += 1;
                if d == total_dims {
                    break;
                }
            }
            if d == total_dims {
                break;
            }
        }
        if level_best < best_value {
            best_value = level_best;
            best_point = level_point;
        }
        center.copy_from_slice(&best_point);
        // keep a two-cell window around the best point
        for r in radius.iter_mut() {
            *r /= 3.0;
        }
    }

    let (w, b) = best_point.split_at(dims);
    (w.to_vec(), b[0], best_value)
}

fn objective_at(point: &[f64], docs: &[Vec<f64>], labels: &[i8], c: f64) -> f64 {
    let (w, b) = point.split_at(point.len() - 1);
    primal_objective(w, b[0], docs, labels, c)
}

/// True when the two score vectors agree in ranking order up to `tol`:
/// no feature pair is ordered strictly one way by `a` and strictly the other
/// way by `b` with both gaps exceeding the tolerance.
pub fn rankings_agree(a: &[f64], b: &[f64], tol: f64) -> bool {
    let n = a.len();
    for i in 0..n {
        for j in (i + 1)..n {
            let gap_a = a[i] - a[j];
            let gap_b = b[i] - b[j];
            if gap_a > tol && gap_b < -tol {
                return false;
            }
            if gap_a < -tol && gap_b > tol {
                return false;
            }
        }
    }
    true
}
