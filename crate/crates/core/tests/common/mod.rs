//! Independent reference implementations and data builders shared by the
//! integration suites. Everything here is deliberately written from the
//! definitions (double loops, face enumeration, DPLL) rather than through
//! the library's own algorithms, so the two routes stay independent.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use poisonlab::dataset::{Label, LabeledDataset, Point};
use poisonlab::dbscan::{DbscanParams, PointRole};

// ---------------------------------------------------------------------------
// DBSCAN reference: direct definition, O(n^2).
// ---------------------------------------------------------------------------

pub struct DbscanReference {
    pub roles: Vec<PointRole>,
    pub cluster_sizes_sorted: Vec<usize>,
}

pub fn dbscan_reference(points: &[Point], params: &DbscanParams) -> DbscanReference {
    let n = points.len();
    let rr = params.r * params.r;
    let within = |a: usize, b: usize| points[a].dist_sq(&points[b]) <= rr;

    let core: Vec<bool> = (0..n)
        .map(|i| (0..n).filter(|&j| within(i, j)).count() > params.min_pts)
        .collect();

    // Connected components over core points.
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    for start in 0..n {
        if !core[start] || comp[start] != usize::MAX {
            continue;
        }
        let mut stack = vec![start];
        comp[start] = next;
        while let Some(p) = stack.pop() {
            for j in 0..n {
                if core[j] && comp[j] == usize::MAX && within(p, j) {
                    comp[j] = next;
                    stack.push(j);
                }
            }
        }
        next += 1;
    }

    let mut roles = vec![PointRole::Outlier; n];
    let mut sizes = vec![0usize; next];
    for i in 0..n {
        if core[i] {
            roles[i] = PointRole::Core;
            sizes[comp[i]] += 1;
        }
    }
    for i in 0..n {
        if core[i] {
            continue;
        }
        // Border: any core point within r; count the point toward the
        // cluster of the nearest one (ties by lower component id).
        let mut best: Option<(f64, usize)> = None;
        for j in 0..n {
            if core[j] && within(i, j) {
                let d = points[i].dist(&points[j]);
                let cand = (d, comp[j]);
                best = Some(match best {
                    None => cand,
                    Some(cur) if cand.0 < cur.0 || (cand.0 == cur.0 && cand.1 < cur.1) => cand,
                    Some(cur) => cur,
                });
            }
        }
        if let Some((_, c)) = best {
            roles[i] = PointRole::Border;
            sizes[c] += 1;
        }
    }
    let mut cluster_sizes_sorted = sizes;
    cluster_sizes_sorted.sort_unstable_by(|a, b| b.cmp(a));
    DbscanReference {
        roles,
        cluster_sizes_sorted,
    }
}

// ---------------------------------------------------------------------------
// Min-norm point by exhaustive face enumeration.
// ---------------------------------------------------------------------------

/// Distance from the origin to conv(points), by checking every subset of at
/// most d+1 points: solve the equality-constrained least-squares problem on
/// the subset's affine hull and keep solutions with convex coefficients.
/// Caratheodory guarantees the optimal face shows up among these subsets.
pub fn min_norm_exhaustive(points: &[Vec<f64>]) -> f64 {
    let n = points.len();
    let d = points[0].len();
    let max_k = (d + 1).min(n);
    let mut best = f64::INFINITY;

    let mut subset: Vec<usize> = Vec::new();
    enumerate_subsets(n, max_k, &mut subset, &mut |subset: &[usize]| {
        if let Some(norm) = face_min_norm(points, subset) {
            if norm < best {
                best = norm;
            }
        }
    });
    best
}

fn enumerate_subsets(
    n: usize,
    max_k: usize,
    subset: &mut Vec<usize>,
    f: &mut impl FnMut(&[usize]),
) {
    fn rec(
        start: usize,
        n: usize,
        max_k: usize,
        subset: &mut Vec<usize>,
        f: &mut impl FnMut(&[usize]),
    ) {
        if !subset.is_empty() {
            f(subset);
        }
        if subset.len() == max_k {
            return;
        }
        for i in start..n {
            subset.push(i);
            rec(i + 1, n, max_k, subset, f);
            subset.pop();
        }
    }
    rec(0, n, max_k, subset, f);
}

fn face_min_norm(points: &[Vec<f64>], subset: &[usize]) -> Option<f64> {
    let m = subset.len();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    if m == 1 {
        let p = &points[subset[0]];
        return Some(dot(p, p).sqrt());
    }
    // KKT for min ||sum l_a p_a||^2 with sum l_a = 1.
    let dim = m + 1;
    let mut mat = vec![0.0f64; dim * dim];
    let mut rhs = vec![0.0f64; dim];
    for a in 0..m {
        for b in 0..m {
            mat[a * dim + b] = dot(&points[subset[a]], &points[subset[b]]);
        }
        mat[a * dim + m] = -1.0;
        mat[m * dim + a] = 1.0;
    }
    rhs[m] = 1.0;
    let sol = gauss_solve(&mut mat, &mut rhs, dim)?;
    let lambda = &sol[..m];
    if lambda.iter().any(|&l| l < -1e-9) {
        return None;
    }
    let d = points[0].len();
    let mut x = vec![0.0f64; d];
    for (a, &idx) in subset.iter().enumerate() {
        for k in 0..d {
            x[k] += lambda[a] * points[idx][k];
        }
    }
    Some(dot(&x, &x).sqrt())
}

fn gauss_solve(mat: &mut [f64], rhs: &mut [f64], n: usize) -> Option<Vec<f64>> {
    for col in 0..n {
        let mut piv = col;
        let mut bestv = mat[col * n + col].abs();
        for r in (col + 1)..n {
            let v = mat[r * n + col].abs();
            if v > bestv {
                bestv = v;
                piv = r;
            }
        }
        if bestv < 1e-10 {
            return None;
        }
        if piv != col {
            for k in 0..n {
                mat.swap(col * n + k, piv * n + k);
            }
            rhs.swap(col, piv);
        }
        let dv = mat[col * n + col];
        for r in (col + 1)..n {
            let f = mat[r * n + col] / dv;
            if f != 0.0 {
                for k in col..n {
                    mat[r * n + k] -= f * mat[col * n + k];
                }
                rhs[r] -= f * rhs[col];
            }
        }
    }
    let mut x = vec![0.0f64; n];
    for row in (0..n).rev() {
        let mut acc = rhs[row];
        for k in (row + 1)..n {
            acc -= mat[row * n + k] * x[k];
        }
        x[row] = acc / mat[row * n + row];
    }
    Some(x)
}

/// Hard-margin two-class width oracle: the distance between the two class
/// hulls, i.e. the min-norm point of the pairwise difference set.
pub fn two_class_width_oracle(data: &LabeledDataset) -> f64 {
    let plus = data.class_indices(Label::Plus);
    let minus = data.class_indices(Label::Minus);
    let mut differences = Vec::with_capacity(plus.len() * minus.len());
    for &i in &plus {
        for &j in &minus {
            let diff: Vec<f64> = data
                .point(i)
                .coords()
                .iter()
                .zip(data.point(j).coords())
                .map(|(a, b)| a - b)
                .collect();
            differences.push(diff);
        }
    }
    min_norm_exhaustive(&differences)
}

// ---------------------------------------------------------------------------
// DPLL SAT solver (cross-check for the exhaustive oracle).
// ---------------------------------------------------------------------------

pub fn dpll_satisfiable(num_vars: usize, clauses: &[[i32; 3]]) -> bool {
    let mut assignment: Vec<Option<bool>> = vec![None; num_vars + 1];
    dpll(clauses, &mut assignment)
}

fn dpll(clauses: &[[i32; 3]], assignment: &mut Vec<Option<bool>>) -> bool {
    // Unit propagation.
    loop {
        let mut unit: Option<i32> = None;
        for clause in clauses {
            let mut satisfied = false;
            let mut unassigned: Vec<i32> = Vec::new();
            for &lit in clause {
                match assignment[lit.unsigned_abs() as usize] {
                    Some(v) if v == (lit > 0) => {
                        satisfied = true;
                        break;
                    }
                    Some(_) => {}
                    None => {
                        if !unassigned.contains(&lit) {
                            unassigned.push(lit);
                        }
                    }
                }
            }
            if satisfied {
                continue;
            }
            match unassigned.len() {
                0 => return false,
                1 => {
                    unit = Some(unassigned[0]);
                    break;
                }
                _ => {}
            }
        }
        match unit {
            Some(lit) => assignment[lit.unsigned_abs() as usize] = Some(lit > 0),
            None => break,
        }
    }

    // All clauses satisfied?
    let all_satisfied = clauses.iter().all(|clause| {
        clause
            .iter()
            .any(|&lit| assignment[lit.unsigned_abs() as usize] == Some(lit > 0))
    });
    if all_satisfied {
        return true;
    }

    // Branch on the first unassigned variable of an unsatisfied clause.
    let branch = clauses
        .iter()
        .flat_map(|c| c.iter())
        .find(|&&lit| assignment[lit.unsigned_abs() as usize].is_none());
    let Some(&lit) = branch else {
        return false;
    };
    let var = lit.unsigned_abs() as usize;
    for value in [true, false] {
        let saved = assignment.clone();
        assignment[var] = Some(value);
        if dpll(clauses, assignment) {
            return true;
        }
        *assignment = saved;
    }
    false
}

// ---------------------------------------------------------------------------
// Data builders.
// ---------------------------------------------------------------------------

/// Two uniform unit disks (class centers far apart) with `z_per_class`
/// poison points per class placed on a ring at distance >= `poison_gap`
/// outside the own-class disk. Poison carries the local class label and the
/// mask marks it.
pub fn disk_instance(
    seed: u64,
    n_per_class: usize,
    z_per_class: usize,
    poison_gap: f64,
) -> LabeledDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::new();
    let mut labels = Vec::new();
    let mut mask = Vec::new();

    for (label, cx) in [(Label::Plus, 0.0f64), (Label::Minus, 8.0f64)] {
        for _ in 0..n_per_class {
            let r = rng.random_range(0.0..1.0f64).sqrt();
            let theta = rng.random_range(0.0..std::f64::consts::TAU);
            points.push(Point::new(vec![cx + r * theta.cos(), r * theta.sin()]).unwrap());
            labels.push(label);
            mask.push(false);
        }
        for k in 0..z_per_class {
            let base = k as f64 / z_per_class.max(1) as f64 * std::f64::consts::TAU;
            let theta = base + rng.random_range(-0.05..0.05);
            let r = 1.0 + poison_gap + rng.random_range(0.0..0.5);
            points.push(Point::new(vec![cx + r * theta.cos(), r * theta.sin()]).unwrap());
            labels.push(label);
            mask.push(true);
        }
    }
    LabeledDataset::new(points, labels, Some(mask), format!("disk-{seed}")).unwrap()
}

/// Two uniform disks with unequal class sizes and a controlled hull gap
/// along the x axis; the plus class is the minority on the right.
pub fn disk_instance_imbalanced(
    seed: u64,
    n_plus: usize,
    n_minus: usize,
    gap: f64,
) -> LabeledDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::new();
    let mut labels = Vec::new();
    let c_plus = 2.0 + gap;
    for (label, cx, n) in [(Label::Minus, 0.0, n_minus), (Label::Plus, c_plus, n_plus)] {
        for _ in 0..n {
            let r = rng.random_range(0.0..1.0f64).sqrt();
            let t = rng.random_range(0.0..std::f64::consts::TAU);
            points.push(Point::new(vec![cx + r * t.cos(), r * t.sin()]).unwrap());
            labels.push(label);
        }
    }
    let n = points.len();
    LabeledDataset::new(
        points,
        labels,
        Some(vec![false; n]),
        format!("disks-imb-{seed}"),
    )
    .unwrap()
}

/// Random linearly separable instance with margin at least `2 * gap` along a
/// random direction; both classes hold at least two points.
pub fn separable_instance(seed: u64, n: usize, d: usize, gap: f64) -> LabeledDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let w: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0f64)).collect();
        let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-6 {
            continue;
        }
        let w: Vec<f64> = w.iter().map(|v| v / norm).collect();
        let b = rng.random_range(-0.3..0.3);

        let mut points = Vec::new();
        let mut labels = Vec::new();
        let mut tries = 0;
        while points.len() < n && tries < 10_000 {
            tries += 1;
            let x: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
            let score: f64 = w.iter().zip(&x).map(|(a, c)| a * c).sum::<f64>() + b;
            if score.abs() >= gap {
                labels.push(Label::from_sign(score));
                points.push(Point::new(x).unwrap());
            }
        }
        if points.len() < n {
            continue;
        }
        let plus = labels.iter().filter(|&&l| l == Label::Plus).count();
        if plus < 2 || labels.len() - plus < 2 {
            continue;
        }
        return LabeledDataset::new(points, labels, None, format!("sep-{seed}")).unwrap();
    }
}

/// The eight-sign-pattern formula over three distinct variables; with l
/// total variables it is unsatisfiable and every clause touches three
/// distinct variables.
pub fn all_patterns_formula(l: usize) -> poisonlab::hardness::SatInstance {
    assert!(l >= 3);
    let mut clauses = Vec::new();
    for s1 in [1i32, -1] {
        for s2 in [1i32, -1] {
            for s3 in [1i32, -1] {
                clauses.push([s1, 2 * s2, 3 * s3]);
            }
        }
    }
    poisonlab::hardness::SatInstance::new(l, clauses).unwrap()
}
