//! Small statistics helpers shared by the ensemble experiments.

use num_complex::Complex64;

/// Pairwise (cascade) summation; the rounding error grows like `log n`
/// and the result depends only on the order of `values`.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 8;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Mean and standard error of the mean (`s / sqrt(n)`, with the unbiased
/// sample deviation `s`). The error is zero for fewer than two values.
pub fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = pairwise_sum(values) / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let squares: Vec<f64> = values.iter().map(|x| (x - mean).powi(2)).collect();
    let var = pairwise_sum(&squares) / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Two-sample Kolmogorov-Smirnov statistic `sup |F_a - F_b|`.
pub fn ks_distance(a: &[f64], b: &[f64]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return if a.len() == b.len() { 0.0 } else { 1.0 };
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Normalized histogram (unit area) of `values` on `[lo, hi]` with `bins`
/// equal bins. Values outside the range are clamped into the edge bins.
pub fn histogram(values: &[f64], lo: f64, hi: f64, bins: usize) -> Vec<f64> {
    let mut counts = vec![0.0; bins];
    if bins == 0 || values.is_empty() || hi <= lo {
        return counts;
    }
    let width = (hi - lo) / bins as f64;
    for &v in values {
        let k = ((v - lo) / width).floor();
        let k = if k.is_nan() { 0 } else { (k.max(0.0) as usize).min(bins - 1) };
        counts[k] += 1.0;
    }
    let norm = values.len() as f64 * width;
    counts.iter_mut().for_each(|c| *c /= norm);
    counts
}

/// Matches each `a[i]` to a distinct `b[j]`, closest pairs first. Returns the
/// assignment (`usize::MAX` where `b` ran out) and the largest matched distance.
pub fn greedy_matching(a: &[Complex64], b: &[Complex64]) -> (Vec<usize>, f64) {
    let mut candidates: Vec<(f64, usize, usize)> = Vec::with_capacity(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            candidates.push(((x - y).norm(), i, j));
        }
    }
    candidates.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)).then(p.2.cmp(&q.2)));
    let mut assigned = vec![usize::MAX; a.len()];
    let mut taken = vec![false; b.len()];
    let mut worst = 0.0f64;
    let mut left = a.len().min(b.len());
    for (d, i, j) in candidates {
        if left == 0 {
            break;
        }
        if assigned[i] == usize::MAX && !taken[j] {
            assigned[i] = j;
            taken[j] = true;
            worst = worst.max(d);
            left -= 1;
        }
    }
    (assigned, worst)
}

/// Largest matched distance between two equally long multisets.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    greedy_matching(a, b).1
}

/// First `x` at which the piecewise-linear curve through `(xs, ys)` reaches
/// `level` from below.
pub fn first_crossing(xs: &[f64], ys: &[f64], level: f64) -> Option<f64> {
    for k in 1..xs.len().min(ys.len()) {
        let (y0, y1) = (ys[k - 1], ys[k]);
        if y0 < level && y1 >= level {
            let s = (level - y0) / (y1 - y0);
            return Some(xs[k - 1] + s * (xs[k] - xs[k - 1]));
        }
    }
    None
}

/// Linear-interpolated quantile of sorted data, `q` in `[0, 1]`.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 0 {
        return f64::NAN;
    }
    let pos = q.clamp(0.0, 1.0) * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}
