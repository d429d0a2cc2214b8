//! Minimum-cost one-to-one assignment.

use crate::Scalar;

/// Result of [`hungarian_assign`]: `rows[i]` is the column given to row `i`,
/// `None` when the row went to a dummy or to a gated-out cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment<S> {
    pub rows: Vec<Option<usize>>,
    pub total: S,
}

impl<S: Scalar> Assignment<S> {
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.rows.iter().enumerate().filter_map(|(i, c)| c.map(|c| (i, c)))
    }
}

/// Cost used for dummy cells and for non-finite entries: larger than any
/// full assignment of real finite costs.
pub fn sentinel<S: Scalar>(cost: &[Vec<S>]) -> S {
    let k = cost.len().max(cost.first().map_or(0, Vec::len));
    let max = cost
        .iter()
        .flatten()
        .filter(|c| c.is_finite())
        .fold(S::zero(), |a, &c| a.max(c.abs()));
    (max + S::one()) * S::lit((k + 1) as f64)
}

/// Solves the rectangular assignment problem on the square-extended matrix.
///
/// Rows are predictions, columns ground truth. Non-finite entries act as
/// forbidden pairs. Among assignments with the most real pairs the one with
/// the smallest total is returned; `total` sums only the real pairs.
pub fn hungarian_assign<S: Scalar>(cost: &[Vec<S>]) -> Assignment<S> {
    let n = cost.len();
    let m = cost.first().map_or(0, Vec::len);
    assert!(cost.iter().all(|r| r.len() == m), "ragged cost matrix");
    if n == 0 || m == 0 {
        return Assignment {
            rows: vec![None; n],
            total: S::zero(),
        };
    }
    let big = sentinel(cost);
    let k = n.max(m);
    let at = |i: usize, j: usize| -> S {
        if i < n && j < m && cost[i][j].is_finite() {
            cost[i][j]
        } else {
            big
        }
    };

    // shortest augmenting path with potentials, 1-based with a virtual column 0
    let inf = S::infinity();
    let mut u = vec![S::zero(); k + 1];
    let mut v = vec![S::zero(); k + 1];
    let mut p = vec![0usize; k + 1];
    let mut way = vec![0usize; k + 1];
    for i in 1..=k {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; k + 1];
        let mut used = vec![false; k + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=k {
                if used[j] {
                    continue;
                }
                let cur = at(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=k {
                if used[j] {
                    u[p[j]] = u[p[j]] + delta;
                    v[j] = v[j] - delta;
                } else {
                    minv[j] = minv[j] - delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut rows = vec![None; n];
    let mut total = S::zero();
    for j in 1..=k {
        let i = p[j];
        if i == 0 || i > n || j > m {
            continue;
        }
        let c = cost[i - 1][j - 1];
        if c.is_finite() {
            rows[i - 1] = Some(j - 1);
            total = total + c;
        }
    }
    Assignment { rows, total }
}
