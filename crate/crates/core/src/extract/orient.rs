//! Orientation clustering: a wrapped Gaussian mixture on doubled angles.

use serde::{Deserialize, Serialize};

use crate::Scalar;

pub const K_MAX: usize = 8;
/// A member further than this from its cluster mean seeds a new cluster.
pub const DEPART_DEG: f64 = 5.0;
/// Standard deviation floor on the doubled angle.
const SIGMA_FLOOR_DEG: f64 = 1.0;
const EM_ITERS: usize = 300;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrientationModel<S> {
    /// Mixture size chosen by BIC.
    pub k: usize,
    /// Direction means in `[0, π)`: the `k` mixture means followed by any
    /// clusters seeded by departing members.
    pub means: Vec<S>,
    pub weights: Vec<S>,
    pub bic: S,
    pub aic: S,
    /// BIC and AIC for every K tried, index 0 is K = 1.
    pub bic_by_k: Vec<S>,
    pub aic_by_k: Vec<S>,
    /// Cluster index of each input angle.
    pub labels: Vec<usize>,
}

/// Signed difference `a − b` wrapped into `[−π, π)`.
fn wrap<S: Scalar>(d: S) -> S {
    let tau = S::two_pi();
    let r = (d + S::PI()) % tau;
    let r = if r < S::zero() { r + tau } else { r };
    r - S::PI()
}

fn circ_mean<S: Scalar>(xs: impl Iterator<Item = (S, S)>) -> S {
    let (mut c, mut s) = (S::zero(), S::zero());
    for (x, w) in xs {
        c = c + w * x.cos();
        s = s + w * x.sin();
    }
    s.atan2(c)
}

struct Fit<S> {
    mu: Vec<S>,
    var: Vec<S>,
    pi: Vec<S>,
    ll: S,
}

fn log_normal<S: Scalar>(d: S, var: S) -> S {
    -S::lit(0.5) * ((S::two_pi() * var).ln() + d * d / var)
}

fn log_sum_exp<S: Scalar>(v: &[S]) -> S {
    let m = v.iter().copied().fold(S::neg_infinity(), S::max);
    if m == S::neg_infinity() {
        return m;
    }
    m + v.iter().map(|&x| (x - m).exp()).fold(S::zero(), |a, b| a + b).ln()
}

fn em<S: Scalar>(x: &[S], init: Vec<S>) -> Fit<S> {
    let k = init.len();
    let n = x.len();
    let floor = S::lit(SIGMA_FLOOR_DEG.to_radians().powi(2));
    let mut mu = init;
    let mut var = vec![S::lit(10f64.to_radians().powi(2)); k];
    let mut pi = vec![S::one() / S::lit(k as f64); k];
    let mut ll = S::neg_infinity();
    let mut resp = vec![vec![S::zero(); k]; n];
    for _ in 0..EM_ITERS {
        // E step
        let mut new_ll = S::zero();
        for (i, &xi) in x.iter().enumerate() {
            let lp: Vec<S> = (0..k).map(|j| pi[j].ln() + log_normal(wrap(xi - mu[j]), var[j])).collect();
            let z = log_sum_exp(&lp);
            new_ll = new_ll + z;
            for j in 0..k {
                resp[i][j] = (lp[j] - z).exp();
            }
        }
        // M step
        for j in 0..k {
            let nj = resp.iter().map(|r| r[j]).fold(S::zero(), |a, b| a + b);
            if nj <= S::lit(1e-12) {
                pi[j] = S::lit(1e-12);
                continue;
            }
            mu[j] = circ_mean(x.iter().zip(resp.iter()).map(|(&xi, r)| (xi, r[j])));
            let ss = x
                .iter()
                .zip(resp.iter())
                .map(|(&xi, r)| {
                    let d = wrap(xi - mu[j]);
                    r[j] * d * d
                })
                .fold(S::zero(), |a, b| a + b);
            var[j] = (ss / nj).max(floor);
            pi[j] = nj / S::lit(n as f64);
        }
        let done = (new_ll - ll).abs() <= S::lit(1e-9) * (S::one() + new_ll.abs());
        ll = new_ll;
        if done {
            break;
        }
    }
    Fit { mu, var, pi, ll }
}

/// Deterministic initial means: the densest sample, then farthest points.
fn farthest_init<S: Scalar>(x: &[S], k: usize) -> Vec<S> {
    let radius = S::lit(10f64.to_radians());
    let dense = (0..x.len())
        .max_by_key(|&i| (x.iter().filter(|&&y| wrap(y - x[i]).abs() <= radius).count(), std::cmp::Reverse(i)))
        .expect("non-empty input");
    let mut means = vec![x[dense]];
    while means.len() < k {
        let next = (0..x.len())
            .map(|i| {
                let d = means.iter().map(|&m| wrap(x[i] - m).abs()).fold(S::infinity(), S::min);
                (i, d)
            })
            .fold((0, S::neg_infinity()), |b, c| if c.1 > b.1 { c } else { b });
        means.push(x[next.0]);
    }
    means
}

/// Means at evenly spaced order statistics of the sorted samples.
fn quantile_init<S: Scalar>(x: &[S], k: usize) -> Vec<S> {
    let mut s = x.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    (0..k)
        .map(|j| s[((2 * j + 1) * s.len() / (2 * k)).min(s.len() - 1)])
        .collect()
}

/// Fits K = 1..=8 mixtures to the doubled angles and keeps the BIC minimum;
/// AIC is recorded alongside. Members departing more than 5° from their
/// cluster mean then seed extra clusters, greedily in input order.
pub fn cluster_orientations<S: Scalar>(angles: &[S]) -> Option<OrientationModel<S>> {
    if angles.is_empty() {
        return None;
    }
    let n = angles.len();
    let two = S::lit(2.0);
    let x: Vec<S> = angles.iter().map(|&a| wrap(two * a)).collect();
    let nf = S::lit(n as f64);
    let mut best: Option<(S, S, Fit<S>)> = None;
    let (mut bics, mut aics) = (Vec::new(), Vec::new());
    for k in 1..=K_MAX.min(n) {
        let fit = [farthest_init(&x, k), quantile_init(&x, k)]
            .into_iter()
            .map(|init| em(&x, init))
            .fold(None::<Fit<S>>, |b, f| match b {
                Some(b) if b.ll >= f.ll => Some(b),
                _ => Some(f),
            })
            .expect("two restarts");
        let p = S::lit((3 * k - 1) as f64);
        let bic = p * nf.ln() - two * fit.ll;
        let aic = two * p - two * fit.ll;
        bics.push(bic);
        aics.push(aic);
        if best.as_ref().is_none_or(|b| bic < b.0) {
            best = Some((bic, aic, fit));
        }
    }
    let (bic, aic, fit) = best.expect("at least one K");
    let k = fit.mu.len();
    let half = |m: S| {
        let t = m / two;
        if t < S::zero() {
            t + S::PI()
        } else {
            t
        }
    };
    let mut means: Vec<S> = fit.mu.iter().map(|&m| half(m)).collect();
    let mut weights = fit.pi.clone();
    let depart = S::lit(DEPART_DEG.to_radians());
    let angle_diff = |a: S, b: S| wrap(two * (a - b)).abs() / two;
    let mut labels = Vec::with_capacity(n);
    for &xi in &x {
        let j = (0..k)
            .map(|j| (j, fit.pi[j].ln() + log_normal(wrap(xi - fit.mu[j]), fit.var[j])))
            .fold((0, S::neg_infinity()), |b, c| if c.1 > b.1 { c } else { b })
            .0;
        let a = half(xi);
        if angle_diff(a, means[j]) <= depart {
            labels.push(j);
            continue;
        }
        match (k..means.len()).find(|&e| angle_diff(a, means[e]) <= depart) {
            Some(e) => labels.push(e),
            None => {
                means.push(a);
                weights.push(S::zero());
                labels.push(means.len() - 1);
            }
        }
    }
    for (e, w) in weights.iter_mut().enumerate().skip(k) {
        *w = S::lit(labels.iter().filter(|&&l| l == e).count() as f64) / nf;
    }
    Some(OrientationModel {
        k,
        means,
        weights,
        bic,
        aic,
        bic_by_k: bics,
        aic_by_k: aics,
        labels,
    })
}
