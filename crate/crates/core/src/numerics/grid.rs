//! One-dimensional grids for the wall-normal (y), shear-layer (z) and
//! streamwise (x) directions.

use std::ops::Deref;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Strictly increasing set of nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    nodes: Vec<f64>,
}

impl Grid {
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::invalid("a grid needs at least two nodes"));
        }
        if nodes.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("grid nodes must be finite"));
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("grid nodes must be strictly increasing"));
        }
        Ok(Self { nodes })
    }

    pub fn uniform(start: f64, end: f64, count: usize) -> Result<Self> {
        if count < 2 || end <= start {
            return Err(Error::invalid(format!(
                "uniform grid needs count >= 2 and end > start (got {count}, [{start}, {end}])"
            )));
        }
        let h = (end - start) / (count - 1) as f64;
        let mut nodes: Vec<f64> = (0..count).map(|j| start + h * j as f64).collect();
        nodes[count - 1] = end;
        Self::from_nodes(nodes)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn first(&self) -> f64 {
        self.nodes[0]
    }

    pub fn last(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    /// Spacing `nodes[j+1] - nodes[j]`.
    pub fn spacing(&self, j: usize) -> f64 {
        self.nodes[j + 1] - self.nodes[j]
    }

    pub fn min_spacing(&self) -> f64 {
        self.nodes
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    pub fn max_spacing(&self) -> f64 {
        self.nodes.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    /// Index `j` of the interval `[nodes[j], nodes[j+1]]` containing `x`,
    /// clamped to the first/last interval outside the grid.
    pub fn locate(&self, x: f64) -> usize {
        let n = self.nodes.len();
        match self.nodes.partition_point(|&v| v <= x) {
            0 => 0,
            p if p >= n => n - 2,
            p => p - 1,
        }
    }

    /// Index of the node closest to `x`.
    pub fn nearest(&self, x: f64) -> usize {
        let j = self.locate(x);
        if (x - self.nodes[j]).abs() <= (self.nodes[j + 1] - x).abs() {
            j
        } else {
            j + 1
        }
    }
}

macro_rules! grid_newtype {
    ($name:ident) => {
        #[derive(Debug, Clone, PartialEq)]
        pub struct $name(Arc<Grid>);

        impl $name {
            /// Shared handle to the underlying grid, for building [`GridFn`](super::GridFn)s.
            pub fn shared(&self) -> Arc<Grid> {
                Arc::clone(&self.0)
            }
        }

        impl Deref for $name {
            type Target = Grid;
            fn deref(&self) -> &Grid {
                &self.0
            }
        }
    };
}

grid_newtype!(YGrid);
grid_newtype!(ZGrid);
grid_newtype!(XGrid);

/// Smallest node count accepted by [`build_stretched_grid`]; the five-point
/// stencils used for second and third derivatives need at least this many.
pub const MIN_Y_NODES: usize = 5;

/// Wall-clustered grid `y(ζ) = y_max·sinh(stretch·ζ)/sinh(stretch)` on a
/// uniform `ζ ∈ [0, 1]`; `stretch = 0` is the affine map.
pub fn build_stretched_grid(y_max: f64, count: usize, stretch: f64) -> Result<YGrid> {
    if !(y_max > 0.0) || !y_max.is_finite() {
        return Err(Error::invalid(format!("y_max must be positive, got {y_max}")));
    }
    if count < MIN_Y_NODES {
        return Err(Error::invalid(format!(
            "count must be at least {MIN_Y_NODES}, got {count}"
        )));
    }
    if !(stretch >= 0.0) || !stretch.is_finite() {
        return Err(Error::invalid(format!("stretch must be >= 0, got {stretch}")));
    }
    let map = |zeta: f64| {
        if stretch == 0.0 {
            y_max * zeta
        } else {
            y_max * (stretch * zeta).sinh() / stretch.sinh()
        }
    };
    let mut nodes: Vec<f64> = (0..count)
        .map(|j| map(j as f64 / (count - 1) as f64))
        .collect();
    nodes[0] = 0.0;
    nodes[count - 1] = y_max;
    Ok(YGrid(Arc::new(Grid::from_nodes(nodes)?)))
}

impl YGrid {
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        let grid = Grid::from_nodes(nodes)?;
        if grid.first() != 0.0 {
            return Err(Error::invalid("a y-grid starts at the wall y = 0"));
        }
        Ok(Self(Arc::new(grid)))
    }

    pub fn y_max(&self) -> f64 {
        self.last()
    }

    /// Grid with an exact node at `anchor`: uniform spacing `≈ h_fine` on
    /// `[0, fine_end]` (adjusted so `anchor` is a node), then spacing growing
    /// geometrically by `growth` up to `y_max`.
    pub fn anchored(
        anchor: f64,
        h_fine: f64,
        fine_end: f64,
        y_max: f64,
        growth: f64,
    ) -> Result<Self> {
        if !(anchor > 0.0 && h_fine > 0.0 && fine_end > anchor && y_max > fine_end) {
            return Err(Error::invalid(format!(
                "anchored grid needs 0 < anchor < fine_end < y_max and h_fine > 0 \
                 (anchor {anchor}, fine_end {fine_end}, y_max {y_max}, h {h_fine})"
            )));
        }
        if !(growth >= 1.0) {
            return Err(Error::invalid("growth factor must be >= 1"));
        }
        let m = (anchor / h_fine).ceil().max(1.0) as usize;
        let h = anchor / m as f64;
        let mut nodes = Vec::new();
        let mut j = 0usize;
        loop {
            let y = if j == m { anchor } else { h * j as f64 };
            if y > fine_end {
                break;
            }
            nodes.push(y);
            j += 1;
        }
        let mut step = h;
        let mut y = *nodes.last().unwrap();
        while y < y_max {
            step *= growth;
            y += step;
            if y > y_max - 0.5 * step {
                break;
            }
            nodes.push(y);
        }
        nodes.push(y_max);
        Self::from_nodes(nodes)
    }
}

impl ZGrid {
    /// Uniform grid with `2m + 1` nodes on `[-z_max, z_max]`; node `m` is `z = 0`.
    pub fn symmetric(z_max: f64, m: usize) -> Result<Self> {
        if !(z_max > 0.0) || m < 2 {
            return Err(Error::invalid(format!(
                "z-grid needs z_max > 0 and m >= 2 (got {z_max}, {m})"
            )));
        }
        let h = z_max / m as f64;
        let nodes: Vec<f64> = (0..=2 * m)
            .map(|j| (j as f64 - m as f64) * h)
            .collect();
        Ok(Self(Arc::new(Grid::from_nodes(nodes)?)))
    }

    pub fn z_max(&self) -> f64 {
        self.last()
    }

    /// Index of the `z = 0` node.
    pub fn center(&self) -> usize {
        self.len() / 2
    }

    pub fn step(&self) -> f64 {
        self.spacing(0)
    }
}

impl XGrid {
    pub fn uniform(x_end: f64, count: usize) -> Result<Self> {
        Ok(Self(Arc::new(Grid::uniform(0.0, x_end, count)?)))
    }

    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        let grid = Grid::from_nodes(nodes)?;
        if grid.first() != 0.0 {
            return Err(Error::invalid("an x-grid starts at x = 0"));
        }
        Ok(Self(Arc::new(grid)))
    }

    pub fn horizon(&self) -> f64 {
        self.last()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_stretch_is_affine() {
        let g = build_stretched_grid(10.0, 11, 0.0).unwrap();
        for (j, &y) in g.nodes().iter().enumerate() {
            assert!((y - j as f64).abs() < 1e-14);
        }
    }

    #[test]
    fn stretch_clusters_at_wall() {
        let g = build_stretched_grid(10.0, 101, 3.0).unwrap();
        assert!(g.spacing(0) < g.spacing(99));
        assert_eq!(g.first(), 0.0);
        assert_eq!(g.y_max(), 10.0);
    }

    #[test]
    fn stretched_nodes_match_direct_map() {
        let g = build_stretched_grid(10.0, 101, 3.0).unwrap();
        for j in 0..101 {
            let zeta = j as f64 / 100.0;
            let expect = 10.0 * (3.0 * zeta).sinh() / 3.0f64.sinh();
            assert!((g.nodes()[j] - expect).abs() < 1e-12, "node {j}");
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(build_stretched_grid(0.0, 50, 1.0).is_err());
        assert!(build_stretched_grid(-1.0, 50, 1.0).is_err());
        assert!(build_stretched_grid(10.0, 3, 1.0).is_err());
        assert!(build_stretched_grid(10.0, 50, -1.0).is_err());
    }

    #[test]
    fn anchored_grid_has_exact_node() {
        let a = 0.5917;
        let g = YGrid::anchored(a, 0.01, 2.0, 30.0, 1.05).unwrap();
        assert!(g.nodes().contains(&a));
        assert_eq!(g.y_max(), 30.0);
    }

    #[test]
    fn symmetric_z_grid() {
        let g = ZGrid::symmetric(8.0, 40).unwrap();
        assert_eq!(g.len(), 81);
        assert_eq!(g.nodes()[g.center()], 0.0);
        assert!((g.first() + 8.0).abs() < 1e-14);
    }

    #[test]
    fn locate_clamps() {
        let g = Grid::uniform(0.0, 1.0, 11).unwrap();
        assert_eq!(g.locate(-1.0), 0);
        assert_eq!(g.locate(2.0), 9);
        assert_eq!(g.locate(0.55), 5);
        assert_eq!(g.nearest(0.56), 6);
    }
}
