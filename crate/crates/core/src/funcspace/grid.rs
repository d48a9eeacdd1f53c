use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sorted breakpoints `t_0 < t_1 < … < t_N` with `t_0 ≥ 0`.
///
/// Cell `k` (0-based) is the half-open interval `(t_k, t_{k+1}]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridRepr", into = "GridRepr")]
pub struct Grid {
    points: Vec<f64>,
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum GridRepr {
    Breakpoints {
        breakpoints: Vec<f64>,
    },
    Geometric {
        t_min: f64,
        t_max: f64,
        points_per_decade: u32,
    },
}

impl TryFrom<GridRepr> for Grid {
    type Error = Error;

    fn try_from(r: GridRepr) -> Result<Self> {
        match r {
            GridRepr::Breakpoints { breakpoints } => Grid::from_breakpoints(breakpoints),
            GridRepr::Geometric {
                t_min,
                t_max,
                points_per_decade,
            } => Grid::geometric(t_min, t_max, points_per_decade),
        }
    }
}

impl From<Grid> for GridRepr {
    fn from(g: Grid) -> Self {
        GridRepr::Breakpoints { breakpoints: g.points }
    }
}

impl Grid {
    pub fn from_breakpoints(points: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidGrid("need at least two breakpoints".into()));
        }
        if points.iter().any(|t| !t.is_finite()) {
            return Err(Error::InvalidGrid("breakpoints must be finite".into()));
        }
        if points[0] < 0.0 {
            return Err(Error::InvalidGrid("breakpoints must be nonnegative".into()));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidGrid("breakpoints must be strictly increasing".into()));
        }
        Ok(Grid { points })
    }

    /// Geometric grid with `N = ceil(ppd · log10(t_max / t_min))` cells.
    ///
    /// Points are `10^(log10 t_min + k·Δ)`, so decade boundaries land exactly
    /// on powers of ten whenever `log10 t_min` and `Δ` are dyadic.
    pub fn geometric(t_min: f64, t_max: f64, points_per_decade: u32) -> Result<Self> {
        if !(t_min > 0.0 && t_min.is_finite() && t_max.is_finite()) {
            return Err(Error::InvalidGrid("t_min must be positive and finite".into()));
        }
        if t_min >= t_max {
            return Err(Error::InvalidGrid("t_min must be below t_max".into()));
        }
        if points_per_decade == 0 {
            return Err(Error::InvalidGrid("points_per_decade must be positive".into()));
        }
        let lo = t_min.log10();
        let hi = t_max.log10();
        let n = ((points_per_decade as f64) * (hi - lo) - 1e-9).ceil().max(1.0) as usize;
        let step = (hi - lo) / n as f64;
        let mut points: Vec<f64> = (0..=n).map(|k| 10f64.powf(lo + k as f64 * step)).collect();
        points[0] = t_min;
        points[n] = t_max;
        Grid::from_breakpoints(points)
    }

    /// `n` equal cells on `[a, b]`.
    pub fn uniform(a: f64, b: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGrid("need at least one cell".into()));
        }
        let h = (b - a) / n as f64;
        let mut points: Vec<f64> = (0..=n).map(|k| a + k as f64 * h).collect();
        points[n] = b;
        Grid::from_breakpoints(points)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn n_cells(&self) -> usize {
        self.points.len() - 1
    }

    pub fn first(&self) -> f64 {
        self.points[0]
    }

    pub fn last(&self) -> f64 {
        self.points[self.points.len() - 1]
    }

    pub fn cell_bounds(&self, k: usize) -> (f64, f64) {
        (self.points[k], self.points[k + 1])
    }

    /// Index of the cell `(t_k, t_{k+1}]` containing `t`, if any.
    pub fn cell_of(&self, t: f64) -> Option<usize> {
        if t <= self.first() || t > self.last() {
            return None;
        }
        // first index with point >= t, minus one
        let idx = self.points.partition_point(|&p| p < t);
        Some(idx - 1)
    }
}

/// The truncated working domain `[t_min, t_max]` together with the
/// tolerances used by endpoint proxies.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DomainRepr", into = "DomainRepr")]
pub struct Domain {
    pub t_min: f64,
    pub t_max: f64,
    pub points_per_decade: u32,
    pub eps_admissible: f64,
    grid: Option<Grid>,
}

#[derive(Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DomainRepr {
    t_min: f64,
    t_max: f64,
    points_per_decade: u32,
    #[serde(default = "default_eps")]
    eps_admissible: f64,
}

fn default_eps() -> f64 {
    1e-2
}

impl TryFrom<DomainRepr> for Domain {
    type Error = Error;

    fn try_from(r: DomainRepr) -> Result<Self> {
        if !(r.eps_admissible > 0.0 && r.eps_admissible < 1.0) {
            return Err(Error::InvalidParameter("eps_admissible must lie in (0, 1)".into()));
        }
        Ok(Domain::new(r.t_min, r.t_max, r.points_per_decade)?.with_eps(r.eps_admissible))
    }
}

impl From<Domain> for DomainRepr {
    fn from(d: Domain) -> Self {
        DomainRepr {
            t_min: d.t_min,
            t_max: d.t_max,
            points_per_decade: d.points_per_decade,
            eps_admissible: d.eps_admissible,
        }
    }
}

impl Default for Domain {
    fn default() -> Self {
        Domain::new(1e-4, 1e4, 32).expect("default domain is valid")
    }
}

impl Domain {
    pub fn new(t_min: f64, t_max: f64, points_per_decade: u32) -> Result<Self> {
        let grid = Grid::geometric(t_min, t_max, points_per_decade)?;
        Ok(Domain {
            t_min,
            t_max,
            points_per_decade,
            eps_admissible: 1e-2,
            grid: Some(grid),
        })
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps_admissible = eps;
        self
    }

    pub fn grid(&self) -> &Grid {
        self.grid.as_ref().expect("domain grid is built on construction")
    }

    pub fn points(&self) -> &[f64] {
        self.grid().points()
    }

    /// Same range, twice the resolution.
    pub fn refined(&self) -> Self {
        let mut d = Domain::new(self.t_min, self.t_max, self.points_per_decade * 2)
            .expect("refinement of a valid domain is valid");
        d.eps_admissible = self.eps_admissible;
        d
    }

    /// True when `t` lies at least one decade inside both ends.
    pub fn is_interior(&self, t: f64) -> bool {
        t >= self.t_min * 10.0 * (1.0 - 1e-12) && t <= self.t_max / 10.0 * (1.0 + 1e-12)
    }

    /// Domain points merged with extra breakpoints, sorted and deduplicated.
    /// Only strictly positive finite points are kept.
    pub fn knots(&self, extra: &[&[f64]]) -> Vec<f64> {
        merge_points(self.points(), extra)
    }
}

pub(crate) fn merge_points(base: &[f64], extra: &[&[f64]]) -> Vec<f64> {
    let mut pts: Vec<f64> = base.to_vec();
    for e in extra {
        pts.extend_from_slice(e);
    }
    pts.retain(|t| *t > 0.0 && t.is_finite());
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup();
    pts
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_grid_hits_decades() {
        let g = Grid::geometric(1e-4, 1e4, 32).unwrap();
        assert_eq!(g.n_cells(), 256);
        assert_eq!(g.first(), 1e-4);
        assert_eq!(g.last(), 1e4);
        assert_eq!(g.points()[128], 1.0);
        assert!(g.points().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn cell_lookup_uses_right_closed_cells() {
        let g = Grid::from_breakpoints(vec![0.0, 1.0, 2.0, 3.0]).unwrap();
        assert_eq!(g.cell_of(1.0), Some(0));
        assert_eq!(g.cell_of(1.5), Some(1));
        assert_eq!(g.cell_of(3.0), Some(2));
        assert_eq!(g.cell_of(0.0), None);
        assert_eq!(g.cell_of(3.1), None);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::from_breakpoints(vec![1.0]).is_err());
        assert!(Grid::from_breakpoints(vec![1.0, 1.0]).is_err());
        assert!(Grid::from_breakpoints(vec![-1.0, 1.0]).is_err());
        assert!(Grid::geometric(1.0, 1.0, 4).is_err());
        assert!(Grid::geometric(0.0, 1.0, 4).is_err());
    }

    #[test]
    fn grid_json_accepts_geometric_form() {
        let g: Grid = serde_json::from_str(r#"{"t_min":0.01,"t_max":100,"points_per_decade":4}"#).unwrap();
        assert_eq!(g.n_cells(), 16);
        let s = serde_json::to_string(&g).unwrap();
        let back: Grid = serde_json::from_str(&s).unwrap();
        assert_eq!(g, back);
    }
}
