//! The frequency set `Λ = Q ∪ {Ty + 3/2 : y ∈ S}` with its integer labelling.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::Point;
use crate::solver::{BlockPartition, CauchyKernelSum};

/// Whether a frequency is a pole of `F` or an auxiliary point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FrequencyKind {
    Pole,
    /// `Ty + 3/2` for the selected block `y = n`.
    Auxiliary { n: i64 },
}

/// One frequency `λ_n = n + δ_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Frequency {
    pub point: Point,
    pub label: i64,
    pub delta: f64,
    pub kind: FrequencyKind,
}

/// Sorted frequencies labelled by the window integers `−M, …, M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencySet {
    half_width: i64,
    items: Vec<Frequency>,
}

/// Largest admissible `|δ_n|`.
pub const MAX_OFFSET: f64 = 0.75;

impl FrequencySet {
    /// Labels `points` by sorted rank starting at `−half_width`.
    pub fn from_points(half_width: i64, mut points: Vec<(Point, FrequencyKind)>) -> Result<Self> {
        points.sort_by(|a, b| a.0.cmp_pos(&b.0));
        if points.len() as i64 != 2 * half_width + 1 {
            return Err(Error::Structural(format!(
                "{} frequencies cannot label the {} window integers",
                points.len(),
                2 * half_width + 1
            )));
        }
        if let Some((p, _)) = points.iter().find(|(p, _)| p.is_integer()) {
            return Err(Error::Structural(format!("frequency {} is an integer", p.anchor)));
        }
        if points.windows(2).any(|w| w[1].0.diff(&w[0].0) <= 0.0) {
            return Err(Error::Structural("frequencies are not separated".into()));
        }
        let items: Vec<Frequency> = points
            .into_iter()
            .enumerate()
            .map(|(i, (point, kind))| {
                let label = -half_width + i as i64;
                Frequency { point, label, delta: -point.rel_int(label), kind }
            })
            .collect();
        if let Some(f) = items.iter().find(|f| f.delta.abs() >= MAX_OFFSET) {
            return Err(Error::Structural(format!("offset {} at label {} exceeds {MAX_OFFSET}", f.delta, f.label)));
        }
        Ok(Self { half_width, items })
    }

    pub fn half_width(&self) -> i64 {
        self.half_width
    }

    pub fn items(&self) -> &[Frequency] {
        &self.items
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn points(&self) -> Vec<Point> {
        self.items.iter().map(|f| f.point).collect()
    }

    /// Poles of `F` only, which is the zero set `Z(V)`.
    pub fn poles(&self) -> Vec<Point> {
        self.items.iter().filter(|f| f.kind == FrequencyKind::Pole).map(|f| f.point).collect()
    }

    pub fn auxiliary_count(&self) -> usize {
        self.items.iter().filter(|f| f.kind != FrequencyKind::Pole).count()
    }

    pub fn max_offset(&self) -> f64 {
        self.items.iter().map(|f| f.delta.abs()).fold(0.0, f64::max)
    }

    pub fn separation(&self) -> f64 {
        self.items.windows(2).map(|w| w[1].point.diff(&w[0].point)).fold(f64::INFINITY, f64::min)
    }
}

/// Builds `Λ` from every structural pole of `F` and the auxiliary points of the selected blocks.
pub fn build_lambda(sum: &CauchyKernelSum, partition: &BlockPartition) -> Result<FrequencySet> {
    let t = partition.t();
    let mut points: Vec<(Point, FrequencyKind)> = sum.all_poles().into_iter().map(|p| (p, FrequencyKind::Pole)).collect();
    points.extend(partition.selected().iter().map(|&n| (Point::new(t * n + 1, 0.5), FrequencyKind::Auxiliary { n })));
    FrequencySet::from_points(partition.half_width(), points)
}
