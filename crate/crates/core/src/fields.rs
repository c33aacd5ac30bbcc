//! Grids, sampled scalar fields, off-diagonal (antisymmetric pair) fields,
//! and the two basic pairings.
//!
//! A [`GridSpec`] is the uniform tensor grid on `[-L, L]^n` with trapezoidal
//! weights. Nodes are numbered row-major: in two dimensions node
//! `k = i0 * N + i1` sits at `(x_{i0}, x_{i1})`.
//!
//! An [`OffDiagonalField`] stores one value per unordered node pair `a < b`;
//! the value seen from `(b, a)` is the negation and the diagonal is zero, so
//! antisymmetry holds exactly by construction.

use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{check_param, FracError, Result};

/// Uniform tensor grid on `[-L, L]^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    dim: usize,
    half_width: f64,
    points_per_axis: usize,
    spacing: f64,
    axis_weights: Vec<f64>,
    weights: Vec<f64>,
}

/// Builds a grid. `dim` must be 1 or 2, `half_width > 0`, at least two
/// points per axis.
pub fn make_grid(dim: usize, half_width: f64, points_per_axis: usize) -> Result<Arc<GridSpec>> {
    GridSpec::new(dim, half_width, points_per_axis).map(Arc::new)
}

impl GridSpec {
    pub fn new(dim: usize, half_width: f64, points_per_axis: usize) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(FracError::InvalidGrid(format!("dimension {dim} not in {{1, 2}}")));
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(FracError::InvalidGrid(format!("half width {half_width} must be positive")));
        }
        if points_per_axis < 2 {
            return Err(FracError::InvalidGrid(format!(
                "{points_per_axis} points per axis, need at least 2"
            )));
        }
        let spacing = 2.0 * half_width / (points_per_axis - 1) as f64;
        let mut axis_weights = vec![spacing; points_per_axis];
        axis_weights[0] = 0.5 * spacing;
        axis_weights[points_per_axis - 1] = 0.5 * spacing;
        let weights = if dim == 1 {
            axis_weights.clone()
        } else {
            let mut w = Vec::with_capacity(points_per_axis * points_per_axis);
            for a in &axis_weights {
                for b in &axis_weights {
                    w.push(a * b);
                }
            }
            w
        };
        Ok(Self {
            dim,
            half_width,
            points_per_axis,
            spacing,
            axis_weights,
            weights,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Trapezoidal weight per node.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn axis_weights(&self) -> &[f64] {
        &self.axis_weights
    }

    pub fn node_count(&self) -> usize {
        self.weights.len()
    }

    /// Coordinate of index `i` along any axis.
    pub fn axis_coord(&self, i: usize) -> f64 {
        // the last node is pinned to +L so the grid is exactly symmetric
        if i + 1 == self.points_per_axis {
            self.half_width
        } else {
            -self.half_width + i as f64 * self.spacing
        }
    }

    pub fn axis_nodes(&self) -> Vec<f64> {
        (0..self.points_per_axis).map(|i| self.axis_coord(i)).collect()
    }

    /// Per-axis integer indices of a node (second entry is 0 in 1D).
    pub fn axis_index(&self, node: usize) -> [usize; 2] {
        if self.dim == 1 {
            [node, 0]
        } else {
            [node / self.points_per_axis, node % self.points_per_axis]
        }
    }

    pub fn node_of(&self, idx: [usize; 2]) -> usize {
        if self.dim == 1 {
            idx[0]
        } else {
            idx[0] * self.points_per_axis + idx[1]
        }
    }

    /// Coordinates of a node (second entry is 0 in 1D).
    pub fn coords(&self, node: usize) -> [f64; 2] {
        let [i, j] = self.axis_index(node);
        if self.dim == 1 {
            [self.axis_coord(i), 0.0]
        } else {
            [self.axis_coord(i), self.axis_coord(j)]
        }
    }

    /// Absolute per-axis index offsets between two nodes.
    #[inline]
    pub fn offset(&self, a: usize, b: usize) -> [usize; 2] {
        let [ai, aj] = self.axis_index(a);
        let [bi, bj] = self.axis_index(b);
        [ai.abs_diff(bi), aj.abs_diff(bj)]
    }

    /// Distance `|x_a - x_b|`, computed from integer offsets so that it is
    /// exactly invariant under grid translations.
    pub fn distance(&self, a: usize, b: usize) -> f64 {
        let [di, dj] = self.offset(a, b);
        offset_length([di, dj], self.spacing)
    }

    /// Whether a node lies on the boundary of the box.
    pub fn is_boundary(&self, node: usize) -> bool {
        let last = self.points_per_axis - 1;
        let [i, j] = self.axis_index(node);
        if self.dim == 1 {
            i == 0 || i == last
        } else {
            i == 0 || i == last || j == 0 || j == last
        }
    }

    /// Same grid parameters (dimension, half width, resolution).
    pub fn same_as(&self, other: &GridSpec) -> bool {
        self.dim == other.dim
            && self.half_width == other.half_width
            && self.points_per_axis == other.points_per_axis
    }

    /// The grid on `[-L/λ, L/λ]^n` with the same number of points; node `i`
    /// of the rescaled grid is node `i` of this one divided by λ.
    pub fn dilated(&self, lambda: f64) -> Result<Arc<GridSpec>> {
        check_param("lambda", lambda, lambda > 0.0, "dilation factor must be positive")?;
        make_grid(self.dim, self.half_width / lambda, self.points_per_axis)
    }

    /// Table of `f(|offset|)` for every per-axis offset; index with
    /// [`OffsetTable::get`]. Entry for the zero offset is 0.
    pub fn offset_table<F: Fn(f64) -> f64 + Sync>(&self, f: F) -> OffsetTable {
        let n = self.points_per_axis;
        let rows = if self.dim == 1 { 1 } else { n };
        let h = self.spacing;
        let mut values = vec![0.0; rows * n];
        values.par_chunks_mut(n).enumerate().for_each(|(di, row)| {
            for (dj, v) in row.iter_mut().enumerate() {
                let off = if self.dim == 1 { [dj, 0] } else { [di, dj] };
                if off != [0, 0] {
                    *v = f(offset_length(off, h));
                }
            }
        });
        OffsetTable {
            dim: self.dim,
            n,
            values,
        }
    }
}

#[inline]
fn offset_length(off: [usize; 2], h: f64) -> f64 {
    if off[1] == 0 {
        off[0] as f64 * h
    } else if off[0] == 0 {
        off[1] as f64 * h
    } else {
        let (a, b) = (off[0] as f64, off[1] as f64);
        (a * a + b * b).sqrt() * h
    }
}

/// Values of a radial function tabulated on grid offsets.
#[derive(Debug, Clone)]
pub struct OffsetTable {
    dim: usize,
    n: usize,
    values: Vec<f64>,
}

impl OffsetTable {
    #[inline]
    pub fn get(&self, off: [usize; 2]) -> f64 {
        if self.dim == 1 {
            self.values[off[0]]
        } else {
            self.values[off[0] * self.n + off[1]]
        }
    }

    #[inline]
    pub fn between(&self, grid: &GridSpec, a: usize, b: usize) -> f64 {
        self.get(grid.offset(a, b))
    }
}

/// Real values sampled on every node of a grid.
#[derive(Debug, Clone)]
pub struct ScalarField {
    grid: Arc<GridSpec>,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: Arc<GridSpec>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.node_count() {
            return Err(FracError::InvalidGrid(format!(
                "{} values for {} nodes",
                values.len(),
                grid.node_count()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(FracError::NonFinite(i));
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_parts(grid: Arc<GridSpec>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.node_count());
        Self { grid, values }
    }

    pub fn from_fn<F: Fn([f64; 2]) -> f64>(grid: Arc<GridSpec>, f: F) -> Result<Self> {
        let values = (0..grid.node_count()).map(|k| f(grid.coords(k))).collect();
        Self::new(grid, values)
    }

    pub fn constant(grid: Arc<GridSpec>, c: f64) -> Result<Self> {
        let m = grid.node_count();
        Self::new(grid, vec![c; m])
    }

    pub fn grid(&self) -> &Arc<GridSpec> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> ScalarField {
        ScalarField::from_parts(self.grid.clone(), self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn scaled(&self, a: f64) -> ScalarField {
        self.map(|v| a * v)
    }

    pub fn shifted(&self, c: f64) -> ScalarField {
        self.map(|v| v - c)
    }

    pub fn sub(&self, other: &ScalarField) -> Result<ScalarField> {
        ensure_same(&self.grid, &other.grid)?;
        Ok(ScalarField::from_parts(
            self.grid.clone(),
            self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        ))
    }

    pub fn add(&self, other: &ScalarField) -> Result<ScalarField> {
        ensure_same(&self.grid, &other.grid)?;
        Ok(ScalarField::from_parts(
            self.grid.clone(),
            self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        ))
    }

    /// The reflected field `u#(x) = u(-x)`.
    pub fn reflect(&self) -> ScalarField {
        let last = self.grid.points_per_axis() - 1;
        let values = (0..self.values.len())
            .map(|k| {
                let [i, j] = self.grid.axis_index(k);
                let idx = if self.grid.dim() == 1 { [last - i, 0] } else { [last - i, last - j] };
                self.values[self.grid.node_of(idx)]
            })
            .collect();
        ScalarField::from_parts(self.grid.clone(), values)
    }

    /// The same nodal values viewed on the λ-rescaled grid, i.e. samples of
    /// `u_λ(x) = u(λ x)`.
    pub fn dilated(&self, lambda: f64) -> Result<ScalarField> {
        let grid = self.grid.dilated(lambda)?;
        Ok(ScalarField::from_parts(grid, self.values.clone()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Mean of the boundary-node values; the value the field is assumed to
    /// take outside the box.
    pub fn far_field(&self) -> f64 {
        let mut sum = 0.0;
        let mut count = 0usize;
        for (k, v) in self.values.iter().enumerate() {
            if self.grid.is_boundary(k) {
                sum += v;
                count += 1;
            }
        }
        sum / count as f64
    }
}

/// Where an off-diagonal field came from. Gradient fields remember their
/// generator so that singular sums over them can be corrected near the
/// diagonal and extended beyond the box.
#[derive(Debug, Clone)]
pub enum Provenance {
    /// Sampled or assembled directly; treated as diagonal-flat.
    Sampled,
    /// Output of `frac_gradient(generator, order)`.
    Gradient { order: f64, generator: ScalarField },
}

/// Antisymmetric field on node pairs.
#[derive(Debug, Clone)]
pub struct OffDiagonalField {
    grid: Arc<GridSpec>,
    upper: Vec<f64>,
    provenance: Provenance,
}

#[inline]
pub(crate) fn packed_index(m: usize, a: usize, b: usize) -> usize {
    debug_assert!(a < b && b < m);
    a * (2 * m - a - 1) / 2 + (b - a - 1)
}

/// Start offset of row `a` in the packed upper triangle.
#[inline]
pub(crate) fn row_start(m: usize, a: usize) -> usize {
    a * (2 * m - a - 1) / 2
}

impl OffDiagonalField {
    pub fn zeros(grid: Arc<GridSpec>) -> Self {
        let m = grid.node_count();
        Self {
            grid,
            upper: vec![0.0; m * (m - 1) / 2],
            provenance: Provenance::Sampled,
        }
    }

    /// Builds a field from values on pairs `a < b` (`f(a, b)` is called
    /// only with `a < b`).
    pub fn from_upper_fn<F: Fn(usize, usize) -> f64 + Sync>(grid: Arc<GridSpec>, f: F) -> Result<Self> {
        let m = grid.node_count();
        let mut upper = vec![0.0; m * (m - 1) / 2];
        fill_rows(m, &mut upper, |a, b| f(a, b));
        if let Some(i) = upper.iter().position(|v| !v.is_finite()) {
            return Err(FracError::NonFinite(i));
        }
        Ok(Self {
            grid,
            upper,
            provenance: Provenance::Sampled,
        })
    }

    /// Odd projection `(F(a,b) - F(b,a)) / 2` of arbitrary pair values.
    pub fn antisymmetrize_fn<F: Fn(usize, usize) -> f64 + Sync>(grid: Arc<GridSpec>, raw: F) -> Result<Self> {
        Self::from_upper_fn(grid, |a, b| 0.5 * (raw(a, b) - raw(b, a)))
    }

    /// Odd projection of a dense row-major `M x M` array of pair values.
    pub fn antisymmetrize(grid: Arc<GridSpec>, raw: &[f64]) -> Result<Self> {
        let m = grid.node_count();
        if raw.len() != m * m {
            return Err(FracError::InvalidGrid(format!("{} pair values for {} nodes", raw.len(), m)));
        }
        if let Some(i) = raw.iter().position(|v| !v.is_finite()) {
            return Err(FracError::NonFinite(i));
        }
        Self::antisymmetrize_fn(grid, |a, b| raw[a * m + b])
    }

    pub(crate) fn from_parts(grid: Arc<GridSpec>, upper: Vec<f64>, provenance: Provenance) -> Self {
        Self {
            grid,
            upper,
            provenance,
        }
    }

    pub fn grid(&self) -> &Arc<GridSpec> {
        &self.grid
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// The same values with the provenance forgotten.
    pub fn detached(&self) -> OffDiagonalField {
        Self::from_parts(self.grid.clone(), self.upper.clone(), Provenance::Sampled)
    }

    /// Values on pairs `a < b`, row by row.
    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> f64 {
        let m = self.grid.node_count();
        match a.cmp(&b) {
            std::cmp::Ordering::Less => self.upper[packed_index(m, a, b)],
            std::cmp::Ordering::Greater => -self.upper[packed_index(m, b, a)],
            std::cmp::Ordering::Equal => 0.0,
        }
    }

    pub fn scaled(&self, c: f64) -> OffDiagonalField {
        let provenance = match &self.provenance {
            Provenance::Gradient { order, generator } => Provenance::Gradient {
                order: *order,
                generator: generator.scaled(c),
            },
            p => p.clone(),
        };
        Self::from_parts(self.grid.clone(), self.upper.iter().map(|v| c * v).collect(), provenance)
    }

    pub fn sub(&self, other: &OffDiagonalField) -> Result<OffDiagonalField> {
        ensure_same(&self.grid, &other.grid)?;
        Ok(Self::from_parts(
            self.grid.clone(),
            self.upper.iter().zip(&other.upper).map(|(a, b)| a - b).collect(),
            Provenance::Sampled,
        ))
    }

    pub fn add(&self, other: &OffDiagonalField) -> Result<OffDiagonalField> {
        ensure_same(&self.grid, &other.grid)?;
        Ok(Self::from_parts(
            self.grid.clone(),
            self.upper.iter().zip(&other.upper).map(|(a, b)| a + b).collect(),
            Provenance::Sampled,
        ))
    }

    /// Pointwise product with `|x - y|^power`.
    pub fn times_distance_power(&self, power: f64) -> OffDiagonalField {
        let g = &self.grid;
        let table = g.offset_table(|r| r.powf(power));
        let m = g.node_count();
        let mut upper = self.upper.clone();
        fill_rows_mut(m, &mut upper, |a, b, v| *v *= table.between(g, a, b));
        Self::from_parts(g.clone(), upper, Provenance::Sampled)
    }

    pub fn max_abs(&self) -> f64 {
        self.upper.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }
}

/// Fills a packed upper triangle row by row in parallel.
pub(crate) fn fill_rows<F: Fn(usize, usize) -> f64 + Sync>(m: usize, upper: &mut [f64], f: F) {
    fill_rows_mut(m, upper, |a, b, v| *v = f(a, b));
}

pub(crate) fn fill_rows_mut<F: Fn(usize, usize, &mut f64) + Sync>(m: usize, upper: &mut [f64], f: F) {
    let mut rows: Vec<(usize, &mut [f64])> = Vec::with_capacity(m);
    let mut rest = upper;
    for a in 0..m.saturating_sub(1) {
        let (row, tail) = rest.split_at_mut(m - a - 1);
        rows.push((a, row));
        rest = tail;
    }
    rows.into_par_iter().for_each(|(a, row)| {
        for (k, v) in row.iter_mut().enumerate() {
            f(a, a + 1 + k, v);
        }
    });
}

/// Deterministic parallel sum of `f(a, b, F(a,b))` over pairs `a < b`:
/// row partials are computed in parallel and added in row order.
pub(crate) fn sum_rows<F: Fn(usize, usize, f64) -> f64 + Sync>(m: usize, upper: &[f64], f: F) -> f64 {
    let partials: Vec<f64> = (0..m.saturating_sub(1))
        .into_par_iter()
        .map(|a| {
            let start = row_start(m, a);
            let row = &upper[start..start + m - a - 1];
            let mut acc = 0.0;
            for (k, &v) in row.iter().enumerate() {
                acc += f(a, a + 1 + k, v);
            }
            acc
        })
        .collect();
    partials.iter().sum()
}

pub(crate) fn ensure_same(a: &GridSpec, b: &GridSpec) -> Result<()> {
    if a.same_as(b) {
        Ok(())
    } else {
        Err(FracError::GridMismatch)
    }
}

/// `∫ u v dx` by the grid's trapezoidal rule.
pub fn pair_scalar(u: &ScalarField, v: &ScalarField) -> Result<f64> {
    ensure_same(&u.grid, &v.grid)?;
    Ok(u.values
        .iter()
        .zip(&v.values)
        .zip(u.grid.weights())
        .map(|((a, b), w)| a * b * w)
        .sum())
}

/// `⟨F, G⟩ = ∬ F G dx dy / |x-y|^n` over ordered pairs `i ≠ j`.
pub fn pair_od(f: &OffDiagonalField, g: &OffDiagonalField) -> Result<f64> {
    ensure_same(&f.grid, &g.grid)?;
    let grid = &f.grid;
    let n = grid.dim() as i32;
    let kernel = grid.offset_table(|r| r.powi(-n));
    let w = grid.weights();
    let gu = &g.upper;
    let m = grid.node_count();
    // F G is symmetric, so the ordered-pair sum is twice the upper sum.
    let half = sum_rows(m, &f.upper, |a, b, fv| {
        fv * gu[packed_index(m, a, b)] * w[a] * w[b] * kernel.between(grid, a, b)
    });
    Ok(2.0 * half)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn trapezoid_three_nodes() {
        let g = make_grid(1, 10.0, 3).unwrap();
        assert_eq!(g.axis_nodes(), vec![-10.0, 0.0, 10.0]);
        assert_eq!(g.weights(), &[5.0, 10.0, 5.0]);
    }

    #[test]
    fn endpoint_grid() {
        let g = make_grid(1, 1.0, 2).unwrap();
        assert_eq!(g.axis_nodes(), vec![-1.0, 1.0]);
        assert_eq!(g.spacing(), 2.0);
    }

    #[test]
    fn weight_sum_2d() {
        let g = make_grid(2, 4.0, 64).unwrap();
        assert_relative_eq!(g.weights().iter().sum::<f64>(), 64.0, max_relative = 1e-12);
    }

    #[test]
    fn nodes_are_uniform() {
        let g = make_grid(1, 3.7, 101).unwrap();
        for i in 0..101 {
            let x = -3.7 + i as f64 * g.spacing();
            assert!((g.axis_coord(i) - x).abs() < 1e-14);
        }
        assert_relative_eq!(g.weights().iter().sum::<f64>(), 7.4, max_relative = 1e-12);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(make_grid(3, 1.0, 10).is_err());
        assert!(make_grid(0, 1.0, 10).is_err());
        assert!(make_grid(1, 0.0, 10).is_err());
        assert!(make_grid(1, -2.0, 10).is_err());
        assert!(make_grid(1, 1.0, 1).is_err());
    }

    #[test]
    fn antisymmetrize_examples() {
        let g = make_grid(1, 2.0, 9).unwrap();
        let x = g.axis_nodes();
        let sym = OffDiagonalField::antisymmetrize_fn(g.clone(), |a, b| x[a] * x[b]).unwrap();
        assert_eq!(sym.max_abs(), 0.0);
        let odd = OffDiagonalField::antisymmetrize_fn(g.clone(), |a, b| x[a] - x[b]).unwrap();
        let half = OffDiagonalField::antisymmetrize_fn(g.clone(), |a, _| x[a]).unwrap();
        for a in 0..9 {
            for b in 0..9 {
                assert_eq!(odd.get(a, b), x[a] - x[b]);
                assert_eq!(half.get(a, b), 0.5 * (x[a] - x[b]));
                assert_eq!(odd.get(a, b), -odd.get(b, a));
            }
        }
    }

    #[test]
    fn antisymmetrize_rejects_non_finite() {
        let g = make_grid(1, 1.0, 3).unwrap();
        let mut raw = vec![0.0; 9];
        raw[1] = f64::NAN;
        assert!(OffDiagonalField::antisymmetrize(g, &raw).is_err());
    }

    #[test]
    fn scalar_pairing_examples() {
        let g = make_grid(1, 1.0, 33).unwrap();
        let one = ScalarField::constant(g.clone(), 1.0).unwrap();
        assert_relative_eq!(pair_scalar(&one, &one).unwrap(), 2.0, max_relative = 1e-12);
        let x = ScalarField::from_fn(g.clone(), |p| p[0]).unwrap();
        assert!(pair_scalar(&x, &one).unwrap().abs() < 1e-12);

        let g = make_grid(1, 10.0, 512).unwrap();
        let u = ScalarField::from_fn(g, |p| (-p[0] * p[0]).exp()).unwrap();
        let v = pair_scalar(&u, &u).unwrap();
        assert!((v - std::f64::consts::FRAC_PI_2.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn grid_mismatch_is_an_error() {
        let a = ScalarField::constant(make_grid(1, 1.0, 8).unwrap(), 1.0).unwrap();
        let b = ScalarField::constant(make_grid(1, 1.0, 9).unwrap(), 1.0).unwrap();
        assert!(matches!(pair_scalar(&a, &b), Err(FracError::GridMismatch)));
    }

    #[test]
    fn od_pairing_sign_and_symmetry() {
        let g = make_grid(1, 2.0, 17).unwrap();
        let x = g.axis_nodes();
        let zero = OffDiagonalField::zeros(g.clone());
        let f = OffDiagonalField::antisymmetrize_fn(g.clone(), |a, b| (x[a] - x[b]) * (1.0 + x[a] * x[a])).unwrap();
        assert_eq!(pair_od(&zero, &f).unwrap(), 0.0);
        assert!(pair_od(&f, &f).unwrap() > 0.0);
        // swapping the arguments of G negates the pairing
        let swapped = OffDiagonalField::from_upper_fn(g.clone(), |a, b| f.get(b, a)).unwrap();
        assert_relative_eq!(pair_od(&f, &swapped).unwrap(), -pair_od(&f, &f).unwrap(), max_relative = 1e-14);
    }

    #[test]
    fn reflection_flips_nodes() {
        let g = make_grid(2, 1.0, 5).unwrap();
        let u = ScalarField::from_fn(g.clone(), |p| p[0] + 10.0 * p[1]).unwrap();
        let r = u.reflect();
        for k in 0..g.node_count() {
            assert!((r.values()[k] + u.values()[k]).abs() < 1e-14);
        }
    }

    #[test]
    fn packed_rows_cover_triangle() {
        let m = 7;
        let mut seen = vec![false; m * (m - 1) / 2];
        for a in 0..m {
            for b in a + 1..m {
                let i = packed_index(m, a, b);
                assert!(!seen[i]);
                seen[i] = true;
                assert_eq!(i, row_start(m, a) + b - a - 1);
            }
        }
        assert!(seen.iter().all(|&s| s));
    }
}
