use crate::error::{PqcError, Result};
use serde::{Deserialize, Serialize};

/// Part of `[0, 1]^d` on which an error is measured.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Region {
    FullCube,
    /// Points whose every coordinate lies in a band `[k/K, (k+1)/K - delta]`
    /// (the last band reaching 1).
    UnionQEta {
        k: u32,
        delta: f64,
    },
    /// The complement of [`Region::UnionQEta`]: some coordinate sits in a gap.
    Trifling {
        k: u32,
        delta: f64,
    },
}

/// Whether `v` lies in one of the `K` bands of width `1/K - delta`.
pub fn in_band(v: f64, k: u32, delta: f64) -> bool {
    if !(0.0..=1.0).contains(&v) || k == 0 {
        return false;
    }
    let kf = k as f64;
    let c = ((v * kf).floor() as u32).min(k - 1);
    [c, c.saturating_sub(1)].into_iter().any(|c| {
        let lo = c as f64 / kf;
        let hi = if c + 1 < k { (c + 1) as f64 / kf - delta } else { 1.0 };
        v >= lo && v <= hi
    })
}

impl Region {
    pub fn contains(&self, x: &[f64]) -> bool {
        match *self {
            Region::FullCube => x.iter().all(|v| (0.0..=1.0).contains(v)),
            Region::UnionQEta { k, delta } => x.iter().all(|&v| in_band(v, k, delta)),
            Region::Trifling { k, delta } => {
                x.iter().all(|v| (0.0..=1.0).contains(v)) && !x.iter().all(|&v| in_band(v, k, delta))
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            Region::FullCube => "full_cube".into(),
            Region::UnionQEta { k, delta } => format!("union_q_eta(K={k}, delta={delta})"),
            Region::Trifling { k, delta } => format!("trifling(K={k}, delta={delta})"),
        }
    }
}

/// Tensor grid of evaluation points, filtered to a region.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dims: usize,
    pub points_per_axis: usize,
    pub region: Region,
}

impl GridSpec {
    pub fn new(dims: usize, points_per_axis: usize, region: Region) -> Result<Self> {
        if dims == 0 {
            return Err(PqcError::InvalidInput("grid needs at least one dimension".into()));
        }
        if points_per_axis < 2 {
            return Err(PqcError::InvalidInput("grid needs at least two points per axis".into()));
        }
        Ok(Self {
            dims,
            points_per_axis,
            region,
        })
    }

    /// 101 points per axis in one dimension, 41 in two, 15 from three on.
    pub fn default_points(dims: usize) -> usize {
        match dims {
            0 | 1 => 101,
            2 => 41,
            _ => 15,
        }
    }

    pub fn with_defaults(dims: usize, region: Region) -> Result<Self> {
        Self::new(dims, Self::default_points(dims), region)
    }

    /// Points `i / (m - 1)` per axis, last coordinate fastest, kept if inside the region.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let m = self.points_per_axis;
        let total = m.pow(self.dims as u32);
        (0..total)
            .map(|mut i| {
                let mut x = vec![0.0; self.dims];
                for j in (0..self.dims).rev() {
                    x[j] = (i % m) as f64 / (m - 1) as f64;
                    i /= m;
                }
                x
            })
            .filter(|x| self.region.contains(x))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bands() {
        assert!(in_band(0.0, 4, 0.05));
        assert!(in_band(0.2, 4, 0.05));
        assert!(!in_band(0.22, 4, 0.05));
        assert!(in_band(0.25, 4, 0.05));
        assert!(in_band(1.0, 4, 0.05));
        assert!(in_band(0.97, 4, 0.05));
    }

    #[test]
    fn region_split_is_a_partition() {
        let g = GridSpec::new(2, 41, Region::FullCube).unwrap();
        let inside = GridSpec {
            region: Region::UnionQEta { k: 4, delta: 0.05 },
            ..g
        }
        .points()
        .len();
        let outside = GridSpec {
            region: Region::Trifling { k: 4, delta: 0.05 },
            ..g
        }
        .points()
        .len();
        assert_eq!(g.points().len(), 1681);
        assert_eq!(inside + outside, 1681);
        assert!(outside > 0);
    }
}
