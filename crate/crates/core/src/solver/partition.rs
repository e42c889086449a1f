//! Splitting the integer window into selected blocks and singletons.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::local_map::LocalChart;
use crate::stochastic::{GaussianDraw, Mode, Weight};

/// Role of a window index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Membership {
    Singleton,
    /// Member of `Δ_n = {Tn−1, Tn, Tn+1}` at position `slot ∈ {0, 1, 2}`.
    Block { n: i64, slot: usize },
}

/// Selected blocks `S` and singletons `U` on the window `[−M, M]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockPartition {
    half_width: i64,
    t: i64,
    selected: Vec<i64>,
    candidates: usize,
    members: Vec<Membership>,
}

/// Block indices `n` whose block lies entirely inside `[−M, M]`.
pub fn candidate_blocks(half_width: i64, t: i64) -> Vec<i64> {
    let max = (half_width - 1).div_euclid(t);
    (-max..=max).collect()
}

/// `(ζ_{Tn−1}ω(Tn−1), ζ_{Tn}ω(Tn), ζ_{Tn+1}ω(Tn+1)) / ω(Tn)`.
pub fn normalized_triple(draw: &GaussianDraw, w: &Weight, t: i64, n: i64) -> [Complex64; 3] {
    let c = t * n;
    let wc = w.at(c);
    [-1, 0, 1].map(|d| draw.get(c + d) * (w.at(c + d) / wc))
}

impl BlockPartition {
    /// Partition with explicitly selected blocks.
    pub fn from_selected(half_width: i64, t: i64, mut selected: Vec<i64>) -> Result<Self> {
        if t < 3 {
            return Err(Error::Config(format!("block spacing T = {t} must be at least 3")));
        }
        selected.sort_unstable();
        selected.dedup();
        let candidates = candidate_blocks(half_width, t);
        let mut members = vec![Membership::Singleton; (2 * half_width + 1) as usize];
        for &n in &selected {
            if !candidates.contains(&n) {
                return Err(Error::Structural(format!("block {n} does not fit in the window")));
            }
            for slot in 0..3 {
                let m = t * n + slot as i64 - 1;
                members[(m + half_width) as usize] = Membership::Block { n, slot };
            }
        }
        Ok(Self { half_width, t, selected, candidates: candidates.len(), members })
    }

    /// Partition without selected blocks.
    pub fn singletons_only(half_width: i64, t: i64) -> Self {
        Self::from_selected(half_width, t, Vec::new()).expect("empty selection is valid")
    }

    pub fn half_width(&self) -> i64 {
        self.half_width
    }

    /// Block spacing `T`.
    pub fn t(&self) -> i64 {
        self.t
    }

    /// Number of window indices.
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Selected block indices `S`, sorted.
    pub fn selected(&self) -> &[i64] {
        &self.selected
    }

    /// Number of blocks that fit in the window.
    pub fn candidate_count(&self) -> usize {
        self.candidates
    }

    /// Empirical selection frequency `|S| / #candidates`.
    pub fn p_hat(&self) -> f64 {
        if self.candidates == 0 {
            0.0
        } else {
            self.selected.len() as f64 / self.candidates as f64
        }
    }

    /// Position of index `m` in window-ordered vectors.
    pub fn pos(&self, m: i64) -> usize {
        (m + self.half_width) as usize
    }

    /// Index at position `i`.
    pub fn index(&self, i: usize) -> i64 {
        i as i64 - self.half_width
    }

    pub fn membership(&self, m: i64) -> Membership {
        self.members[self.pos(m)]
    }

    /// Singleton indices `U` in increasing order.
    pub fn singletons(&self) -> impl Iterator<Item = i64> + '_ {
        (-self.half_width..=self.half_width).filter(|&m| self.membership(m) == Membership::Singleton)
    }

    pub fn singleton_count(&self) -> usize {
        self.len() - 3 * self.selected.len()
    }
}

fn check_mode(draw: &GaussianDraw, chart: &LocalChart) -> Result<()> {
    if draw.mode != chart.map().mode() {
        return Err(Error::Config(format!(
            "local map '{}' serves {} draws, got a {} draw",
            chart.map().name(),
            chart.map().mode(),
            draw.mode
        )));
    }
    Ok(())
}

/// Selects `n ∈ S` when the normalized block triple lies strictly inside `D(LA*, γ₂/4)`.
pub fn partition(draw: &GaussianDraw, w: &Weight, chart: &LocalChart, t: i64) -> Result<BlockPartition> {
    check_mode(draw, chart)?;
    let half = draw.half_width();
    if t < 3 {
        return Err(Error::Config(format!("block spacing T = {t} must be at least 3")));
    }
    let radius = chart.gamma2 / 4.0;
    let selected = candidate_blocks(half, t)
        .into_iter()
        .filter(|&n| {
            let y = chart.map().slots_to_image(&normalized_triple(draw, w, t, n));
            chart.image_distance(&y) < radius
        })
        .collect();
    BlockPartition::from_selected(half, t, selected)
}

/// Overwrites the draw on every candidate block with `n ≡ 0 (mod every)` so
/// that its normalized triple equals the chart centre `LA*` exactly.
/// Returns the planted block indices.
pub fn plant_blocks(draw: &mut GaussianDraw, w: &Weight, chart: &LocalChart, t: i64, every: i64) -> Result<Vec<i64>> {
    check_mode(draw, chart)?;
    if every < 1 {
        return Err(Error::Config("plant stride must be positive".into()));
    }
    let target = chart.map().image_to_slots(chart.image_center());
    let mut planted = Vec::new();
    let mut updates = Vec::new();
    for n in candidate_blocks(draw.half_width(), t) {
        if n.rem_euclid(every) != 0 {
            continue;
        }
        let c = t * n;
        for (k, d) in [-1i64, 0, 1].into_iter().enumerate() {
            updates.push((c + d, target[k] * (w.at(c) / w.at(c + d))));
        }
        planted.push(n);
    }
    draw.set_values(&updates);
    Ok(planted)
}

/// Monte-Carlo estimate of the probability that a Gaussian block triple with
/// the given weight ratios falls in `D(LA*, γ₂/4)`. Returns `(p, standard error)`.
pub fn selection_probability_mc(chart: &LocalChart, ratios: [f64; 3], samples: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = chart.gamma2 / 4.0;
    let complex = chart.map().mode() == Mode::Complex;
    let scale = if complex { std::f64::consts::FRAC_1_SQRT_2 } else { 1.0 };
    let mut hits = 0usize;
    for _ in 0..samples {
        let triple = ratios.map(|r| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = if complex { StandardNormal.sample(&mut rng) } else { 0.0 };
            Complex64::new(re * scale, im * scale) * r
        });
        let y = chart.map().slots_to_image(&triple);
        if chart.image_distance(&y) < radius {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    (p, (p * (1.0 - p) / samples as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local_map::RealDipole;
    use crate::stochastic::sample;
    use std::sync::Arc;

    fn setup() -> (Weight, LocalChart) {
        (Weight::power_law(0.75).unwrap(), LocalChart::with_default_radii(Arc::new(RealDipole)))
    }

    #[test]
    fn zero_draw_selects_nothing() {
        let (w, chart) = setup();
        let d = GaussianDraw::zero(Mode::Real, 500, 3);
        let p = partition(&d, &w, &chart, 100).unwrap();
        assert!(p.selected().is_empty());
        assert_eq!(p.singleton_count(), p.len());
    }

    #[test]
    fn planted_centre_is_selected() {
        let (w, chart) = setup();
        let mut d = sample(4, Mode::Real, 500, 3);
        let planted = plant_blocks(&mut d, &w, &chart, 100, 5).unwrap();
        assert_eq!(planted, vec![-5, 0, 5]);
        let p = partition(&d, &w, &chart, 100).unwrap();
        for n in planted {
            assert!(p.selected().contains(&n));
            assert_eq!(p.membership(100 * n + 1), Membership::Block { n, slot: 2 });
        }
        assert_eq!(p.singleton_count() + 3 * p.selected().len(), p.len());
    }

    #[test]
    fn blocks_fit_in_window() {
        assert_eq!(candidate_blocks(203, 100), vec![-2, -1, 0, 1, 2]);
        assert_eq!(candidate_blocks(200, 100), vec![-1, 0, 1]);
        assert!(BlockPartition::from_selected(203, 100, vec![3]).is_err());
        assert!(BlockPartition::from_selected(203, 2, vec![]).is_err());
    }

    #[test]
    fn mode_mismatch_rejected() {
        let (w, chart) = setup();
        let d = GaussianDraw::zero(Mode::Complex, 50, 3);
        assert!(matches!(partition(&d, &w, &chart, 10), Err(Error::Config(_))));
    }

    #[test]
    fn selection_frequency_matches_monte_carlo() {
        // An uncertified wide chart makes the selection event frequent enough to measure.
        let w = Weight::power_law(0.75).unwrap();
        let chart = LocalChart::new(Arc::new(RealDipole), 0.24, 0.24).unwrap();
        let t = 3;
        let d = sample(9, Mode::Real, 150_000, 3);
        let p = partition(&d, &w, &chart, t).unwrap();
        assert!(p.candidate_count() >= 100_000);
        // Weight ratios ω(Tn±1)/ω(Tn) are within 1% of one beyond |Tn| = 100,
        // so the oracle uses unit ratios.
        let (p_star, _) = selection_probability_mc(&chart, [1.0; 3], 2_000_000, 1);
        let sigma = (p_star * (1.0 - p_star) / p.candidate_count() as f64).sqrt();
        assert!(p_star > 0.0);
        assert!((p.p_hat() - p_star).abs() < 3.0 * sigma + 0.01 * p_star, "{} vs {}", p.p_hat(), p_star);
    }
}
