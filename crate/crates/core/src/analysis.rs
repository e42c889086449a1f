//! Pole-set geometry and density statistics.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::Point;
use crate::solver::CauchyKernelSum;

/// A strictly increasing finite set of real points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleSet {
    points: Vec<Point>,
}

impl PoleSet {
    /// Sorts `points` and rejects duplicates.
    pub fn new(mut points: Vec<Point>) -> Result<Self> {
        points.sort_by(|a, b| a.cmp_pos(b));
        if points.windows(2).any(|w| w[1].diff(&w[0]) <= 0.0) {
            return Err(Error::Structural("pole set contains coincident points".into()));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Number of points `q < t`.
    pub fn count_below(&self, t: f64) -> usize {
        self.points.partition_point(|q| q.rel_real(t) > 0.0)
    }

    /// Number of points `q ≤ t`.
    pub fn count_at_most(&self, t: f64) -> usize {
        self.points.partition_point(|q| q.rel_real(t) >= 0.0)
    }

    /// Number of points in the half-open integer window `[a, b)`.
    pub fn count_in(&self, a: i64, b: i64) -> usize {
        let lo = self.points.partition_point(|q| q.rel_int(a) > 0.0);
        let hi = self.points.partition_point(|q| q.rel_int(b) > 0.0);
        hi - lo
    }

    /// Counting function: `#(Q ∩ [0, t))` for `t ≥ 0` and `−#(Q ∩ (t, 0))` for `t < 0`.
    pub fn counting(&self, t: f64) -> i64 {
        let zero = self.count_below(0.0) as i64;
        if t >= 0.0 {
            self.count_below(t) as i64 - zero
        } else {
            -(zero - self.count_at_most(t) as i64)
        }
    }

    /// Smallest gap between consecutive points (`∞` for fewer than two points).
    pub fn separation(&self) -> f64 {
        self.points.windows(2).map(|w| w[1].diff(&w[0])).fold(f64::INFINITY, f64::min)
    }

    /// Index of the point nearest to `x`.
    pub fn nearest(&self, x: f64) -> Option<usize> {
        if self.points.is_empty() {
            return None;
        }
        let i = self.count_below(x);
        let cands = [i.checked_sub(1), (i < self.points.len()).then_some(i)];
        cands
            .into_iter()
            .flatten()
            .min_by(|&a, &b| self.points[a].rel_real(x).abs().total_cmp(&self.points[b].rel_real(x).abs()))
    }

    /// Distance from `z` to the set.
    pub fn distance(&self, z: Complex64) -> f64 {
        if self.points.is_empty() {
            return f64::INFINITY;
        }
        let i = self.count_below(z.re);
        let lo = i.saturating_sub(1);
        let hi = (i + 1).min(self.points.len());
        (lo..hi).map(|j| self.points[j].rel(z).norm()).fold(f64::INFINITY, f64::min)
    }
}

/// Maximum of the normalized deviation over one shell `r_lo < |t| ≤ r_hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShellDeviation {
    pub r_lo: f64,
    pub r_hi: f64,
    pub max: f64,
}

/// `max_t |n_Q(t) − (1−ε)t| / (1 + |t|^{2/3})` with its per-shell profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeviationReport {
    pub eps: f64,
    pub range: f64,
    pub statistic: f64,
    /// Dyadic shells from the innermost outward.
    pub shells: Vec<ShellDeviation>,
    /// Whether the per-shell maxima do not increase going outward.
    pub non_increasing: bool,
}

/// Evaluates the deviation statistic on the quarter-integer grid of `[−range, range]`.
pub fn density_deviation(q: &PoleSet, eps: f64, range: f64) -> DeviationReport {
    let steps = (4.0 * range).floor() as i64;
    let values: Vec<(f64, f64)> = (-steps..=steps)
        .into_par_iter()
        .map(|j| {
            let t = j as f64 / 4.0;
            let dev = (q.counting(t) as f64 - (1.0 - eps) * t).abs() / (1.0 + t.abs().powf(2.0 / 3.0));
            (t, dev)
        })
        .collect();
    let mut edges = vec![range];
    while *edges.last().expect("nonempty") / 2.0 >= 16.0 {
        let next = edges.last().expect("nonempty") / 2.0;
        edges.push(next);
    }
    edges.push(0.0);
    edges.reverse();
    let shells: Vec<ShellDeviation> = edges
        .windows(2)
        .map(|e| {
            let max = values
                .iter()
                .filter(|(t, _)| {
                    let a = t.abs();
                    (a > e[0] || e[0] == 0.0) && a <= e[1]
                })
                .map(|&(_, d)| d)
                .fold(0.0, f64::max);
            ShellDeviation { r_lo: e[0], r_hi: e[1], max }
        })
        .collect();
    let statistic = values.iter().map(|&(_, d)| d).fold(0.0, f64::max);
    let non_increasing = shells.windows(2).all(|w| w[1].max <= w[0].max);
    DeviationReport { eps, range, statistic, shells, non_increasing }
}

/// `(t, n_Q(t))` at the integers of `[−range, range]`.
pub fn counting_profile(q: &PoleSet, range: i64) -> Vec<(i64, i64)> {
    (-range..=range).map(|t| (t, q.counting(t as f64))).collect()
}

/// Outcome of the growth check `|F(z)|·min(1, dist(z, Q))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub constant: f64,
    pub argmax: [f64; 2],
    pub points: usize,
}

/// Imaginary parts of the default growth grid.
pub const GROWTH_HEIGHTS: [f64; 9] = [-5.0, -2.5, -1.0, -0.25, 0.0, 0.25, 1.0, 2.5, 5.0];

/// Maximum of `|F(z)|·min(1, dist(z, Q))` over `x ∈ {k, k+1/4, k+3/4}`,
/// `|x| ≤ half_width`, and the given heights. Exact poles are skipped.
pub fn growth_check(f: &CauchyKernelSum, q: &PoleSet, half_width: i64, heights: &[f64]) -> GrowthReport {
    let grid: Vec<Complex64> = (-half_width..half_width)
        .flat_map(|k| [0.0, 0.25, 0.75].map(|d| k as f64 + d))
        .chain(std::iter::once(half_width as f64))
        .flat_map(|x| heights.iter().map(move |&y| Complex64::new(x, y)))
        .collect();
    let (constant, argmax) = grid
        .par_iter()
        .filter_map(|&z| {
            let value = if z.im == 0.0 && z.re.fract() == 0.0 {
                Ok(f.eval_integer(z.re as i64))
            } else {
                f.eval(z)
            };
            value.ok().map(|v| (v.norm() * q.distance(z).min(1.0), z))
        })
        .reduce(|| (0.0, Complex64::new(0.0, 0.0)), |a, b| if b.0 > a.0 { b } else { a });
    GrowthReport { constant, argmax: [argmax.re, argmax.im], points: grid.len() }
}

/// `card(Λ ∩ [−R, R]) / (2R)` for each radius.
pub fn linear_density(q: &PoleSet, radii: &[f64]) -> Vec<(f64, f64)> {
    radii
        .iter()
        .map(|&r| {
            let count = q.count_at_most(r) - q.count_below(-r);
            (r, count as f64 / (2.0 * r))
        })
        .collect()
}

/// Sliding-window upper proxy for the Beurling–Malliavin density at one length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BmProxy {
    pub length: i64,
    /// `max_k card(Λ ∩ [k, k+L)) / L` over integer `k` with the window inside `[lo, hi]`.
    pub max_ratio: f64,
    pub argmax_start: i64,
}

/// Evaluates the proxy over integer-anchored windows `[k, k+L) ⊂ [lo, hi]`.
pub fn bm_density_proxy(q: &PoleSet, lengths: &[i64], lo: i64, hi: i64) -> Vec<BmProxy> {
    lengths
        .iter()
        .map(|&l| {
            let mut best = BmProxy { length: l, max_ratio: 0.0, argmax_start: lo };
            for k in lo..=(hi - l) {
                let ratio = q.count_in(k, k + l) as f64 / l as f64;
                if ratio > best.max_ratio {
                    best = BmProxy { length: l, max_ratio: ratio, argmax_start: k };
                }
            }
            best
        })
        .collect()
}

/// Empirical deficit `ε̂ = p̂ / T`.
pub fn eps_hat(p_hat: f64, t: i64) -> f64 {
    p_hat / t as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(values: &[f64]) -> PoleSet {
        PoleSet::new(values.iter().map(|&v| Point::new(0, v)).collect()).unwrap()
    }

    fn shifted_integers(range: i64, shift: f64) -> PoleSet {
        PoleSet::new((-range..=range).map(|k| Point::new(k, shift)).collect()).unwrap()
    }

    #[test]
    fn counting_definition() {
        let q = set(&[0.5, 1.5]);
        assert_eq!(q.counting(1.0), 1);
        assert_eq!(q.counting(2.0), 2);
        assert_eq!(q.counting(-1.0), 0);
        assert_eq!(q.counting(0.0), 0);
        let empty = PoleSet::new(vec![]).unwrap();
        assert_eq!(empty.counting(5.0), 0);
        assert_eq!(empty.counting(-5.0), 0);
        let neg = set(&[-2.5, -0.5]);
        assert_eq!(neg.counting(-1.0), -1);
        assert_eq!(neg.counting(-3.0), -2);
    }

    proptest! {
        #[test]
        fn counting_matches_brute_force(mut xs in proptest::collection::vec(-500.0f64..500.0, 0..1000), t in -600.0f64..600.0) {
            xs.sort_by(f64::total_cmp);
            xs.dedup();
            let q = PoleSet::new(xs.iter().map(|&x| Point::new(0, x)).collect()).unwrap();
            let brute = if t >= 0.0 {
                xs.iter().filter(|&&x| x >= 0.0 && x < t).count() as i64
            } else {
                -(xs.iter().filter(|&&x| x > t && x < 0.0).count() as i64)
            };
            prop_assert_eq!(q.counting(t), brute);
        }

        #[test]
        fn counting_is_nondecreasing(xs in proptest::collection::vec(-50.0f64..50.0, 1..200), a in -60.0f64..60.0, b in -60.0f64..60.0) {
            let mut xs = xs;
            xs.sort_by(f64::total_cmp);
            xs.dedup();
            let q = PoleSet::new(xs.iter().map(|&x| Point::new(0, x)).collect()).unwrap();
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(q.counting(lo) <= q.counting(hi));
        }
    }

    #[test]
    fn unit_spaced_deviation_is_at_most_one() {
        let q = shifted_integers(1000, 0.1);
        let r = density_deviation(&q, 0.0, 900.0);
        assert!(r.statistic <= 1.0 + 1e-12, "{}", r.statistic);
        assert!(r.shells.len() >= 3);
    }

    #[test]
    fn densities_of_lattices() {
        let z = shifted_integers(2000, 0.0);
        let d = linear_density(&z, &[100.0, 500.5, 1000.5]);
        assert!((d.last().unwrap().1 - 1.0).abs() < 1e-3);
        let evens = PoleSet::new((-1000..=1000).map(|k| Point::integer(2 * k)).collect()).unwrap();
        assert!((linear_density(&evens, &[1000.5])[0].1 - 0.5).abs() < 1e-3);
    }

    #[test]
    fn bm_proxy_on_lattices() {
        let z = shifted_integers(2000, 0.2);
        for p in bm_density_proxy(&z, &[64, 128, 256], -1000, 1000) {
            assert_eq!(p.max_ratio, 1.0);
        }
        let thinned = PoleSet::new((-2000..=2000).filter(|k| k % 10 != 0).map(Point::integer).collect()).unwrap();
        for p in bm_density_proxy(&thinned, &[64, 128, 256], -1000, 1000) {
            assert!((p.max_ratio - 0.9).abs() <= 1.0 / p.length as f64 + 1e-12, "{p:?}");
        }
    }

    #[test]
    fn growth_of_single_kernel() {
        use crate::solver::{KernelTerm, PoleSource};
        let c = 0.7;
        let f = CauchyKernelSum::new(vec![KernelTerm {
            pole: Point::new(0, 0.5),
            residue: Complex64::new(c, 0.0),
            source: PoleSource::Singleton { s: 0 },
        }])
        .unwrap();
        let q = PoleSet::new(vec![Point::new(0, 0.5)]).unwrap();
        let g = growth_check(&f, &q, 20, &GROWTH_HEIGHTS);
        // |c/(z−a)|·min(1, |z−a|) ≤ |c|.
        assert!(g.constant <= c + 1e-12);
        let far = f.eval(Complex64::new(0.0, 1e6)).unwrap().norm();
        assert!(far < 1e-6);
    }

    #[test]
    fn separation_and_nearest() {
        let q = set(&[-1.0, 0.25, 2.0]);
        assert_eq!(q.separation(), 1.25);
        assert_eq!(q.nearest(1.0), Some(1));
        assert_eq!(q.nearest(5.0), Some(2));
        assert!((q.distance(Complex64::new(0.25, 2.0)) - 2.0).abs() < 1e-15);
    }
}
