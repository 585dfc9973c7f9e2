//! The one-shot profile propagation kernel.
//!
//! The coupled Raman equations in integral form express every channel's
//! power as its z = 0 anchor times an exponential of (i) the accumulated
//! attenuation and (ii) the coupling-weighted cumulative integrals of all
//! other channels' profiles. On the spatial grid the cumulative integrals of
//! all channels are one matrix product `P * T` with a fixed upper-triangular
//! trapezoid operator `T`, so the whole profile is updated in one shot:
//!
//! ```text
//! P' = P(:,0) .* exp(-Direction .* alpha .* z + Direction .* (G P T) dz)
//! ```
//!
//! `propagate` is pure: callers keep the pre-propagation guess, which the
//! hybrid solver needs for boundary corrections and tracing.

use crate::error::{RamanError, Result};
use crate::link::{CouplingMatrix, Direction, Grid};
use crate::scalar::{cast, RamanScalar};

/// Power of every channel at every grid point, in watts.
///
/// Rows are channels (scenario order), columns are grid points. Column 0
/// holds the z = 0 anchors: imposed boundaries for forward channels,
/// iteratively refined estimates for backward ones.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerProfileMatrix<T> {
    n_channels: usize,
    n_points: usize,
    values: Vec<T>,
}

impl<T: RamanScalar> PowerProfileMatrix<T> {
    pub fn filled(n_channels: usize, n_points: usize, value: T) -> Self {
        Self { n_channels, n_points, values: vec![value; n_channels * n_points] }
    }

    pub fn n_channels(&self) -> usize {
        self.n_channels
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    #[inline]
    pub fn get(&self, channel: usize, point: usize) -> T {
        self.values[channel * self.n_points + point]
    }

    #[inline]
    pub fn set(&mut self, channel: usize, point: usize, value: T) {
        self.values[channel * self.n_points + point] = value;
    }

    pub fn row(&self, channel: usize) -> &[T] {
        &self.values[channel * self.n_points..(channel + 1) * self.n_points]
    }

    pub fn row_mut(&mut self, channel: usize) -> &mut [T] {
        &mut self.values[channel * self.n_points..(channel + 1) * self.n_points]
    }

    /// The z = 0 anchor of a channel.
    pub fn anchor(&self, channel: usize) -> T {
        self.get(channel, 0)
    }

    /// The z = L value of a channel.
    pub fn end_value(&self, channel: usize) -> T {
        self.get(channel, self.n_points - 1)
    }

    pub fn scale_row(&mut self, channel: usize, factor: T) {
        for v in self.row_mut(channel) {
            *v = *v * factor;
        }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// True when every entry is finite (divergence shows up as Inf/NaN).
    pub fn is_all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// Cumulative trapezoid operator for a grid.
///
/// Right-multiplying a profile row by the operator's weight matrix and the
/// nominal step gives the running integral at every grid point. Column 0 is
/// all zeros; an interior column k reads `[1/2, 1, ..., 1, 1/2, 0, ...]` with
/// the halves at rows 0 and k. A clamped final grid interval only rescales
/// the last column's trailing weight pair, so the propagation kernel keeps a
/// single scalar step factor.
///
/// The operator is stored as the per-interval relative widths; the dense
/// matrix is available through [`TrapezoidOperator::dense_weights`] and the
/// product `row * T` is evaluated in O(N) by [`TrapezoidOperator::cumulative_into`].
#[derive(Debug, Clone, PartialEq)]
pub struct TrapezoidOperator<T> {
    relative_widths: Vec<T>,
}

impl<T: RamanScalar> TrapezoidOperator<T> {
    pub fn for_grid(grid: &Grid<T>) -> Self {
        let relative_widths =
            (1..=grid.n_steps()).map(|m| grid.relative_interval_width(m)).collect();
        Self { relative_widths }
    }

    /// Number of rows/columns (grid points).
    pub fn dim(&self) -> usize {
        self.relative_widths.len() + 1
    }

    /// Single weight of the dense operator matrix.
    pub fn weight(&self, row: usize, col: usize) -> T {
        debug_assert!(row < self.dim() && col < self.dim());
        if col == 0 || row > col {
            return T::zero();
        }
        let half = cast::<T>(0.5);
        let w = |m: usize| self.relative_widths[m - 1];
        if row == col {
            half * w(col)
        } else if row == 0 {
            half * w(1)
        } else {
            half * (w(row) + w(row + 1))
        }
    }

    /// Materialize the dense weight matrix (row-major).
    pub fn dense_weights(&self) -> Vec<Vec<T>> {
        let n = self.dim();
        (0..n).map(|r| (0..n).map(|c| self.weight(r, c)).collect()).collect()
    }

    /// Running trapezoid sum of `row`, in units of the nominal step:
    /// `out[k] * dz` is the integral from 0 to the k-th grid point.
    pub fn cumulative_into(&self, row: &[T], out: &mut [T]) {
        debug_assert_eq!(row.len(), self.dim());
        debug_assert_eq!(out.len(), self.dim());
        let half = cast::<T>(0.5);
        out[0] = T::zero();
        for m in 1..row.len() {
            out[m] = out[m - 1] + self.relative_widths[m - 1] * half * (row[m - 1] + row[m]);
        }
    }
}

/// Build the cumulative trapezoid operator for `grid`.
pub fn trapezoid_operator<T: RamanScalar>(grid: &Grid<T>) -> TrapezoidOperator<T> {
    TrapezoidOperator::for_grid(grid)
}

/// Propagate a profile guess through the one-shot vector equation.
///
/// Every row of the result is its own z = 0 anchor times
/// `exp(direction * (-alpha * z + (G P T)[i][k] * dz))`; column 0 is returned
/// unchanged. Overflow to Inf/NaN is *not* an error here — divergence
/// detection belongs to the caller.
pub fn propagate<T: RamanScalar>(
    profile: &PowerProfileMatrix<T>,
    coupling: &CouplingMatrix<T>,
    attenuation_per_km: &[T],
    directions: &[Direction],
    grid: &Grid<T>,
    operator: &TrapezoidOperator<T>,
) -> Result<PowerProfileMatrix<T>> {
    let n_ch = profile.n_channels();
    let n_pts = profile.n_points();
    if coupling.n() != n_ch || attenuation_per_km.len() != n_ch || directions.len() != n_ch {
        return Err(RamanError::DimensionMismatch(format!(
            "profile has {n_ch} channels; coupling {}, attenuation {}, directions {}",
            coupling.n(),
            attenuation_per_km.len(),
            directions.len()
        )));
    }
    if grid.points().len() != n_pts || operator.dim() != n_pts {
        return Err(RamanError::DimensionMismatch(format!(
            "profile has {n_pts} grid points; grid {}, operator {}",
            grid.points().len(),
            operator.dim()
        )));
    }

    // Cumulative trapezoid of every row (the `P T` product), in step units.
    let mut cumulative = vec![T::zero(); n_ch * n_pts];
    for (i, chunk) in cumulative.chunks_mut(n_pts).enumerate() {
        operator.cumulative_into(profile.row(i), chunk);
    }

    // Coupling-weighted integrals (the `G P T` product).
    let mut integral = vec![T::zero(); n_ch * n_pts];
    for (i, out_row) in integral.chunks_mut(n_pts).enumerate() {
        for j in 0..n_ch {
            let g = coupling.get(i, j);
            if g != T::zero() {
                let c_row = &cumulative[j * n_pts..(j + 1) * n_pts];
                for (o, c) in out_row.iter_mut().zip(c_row) {
                    *o = *o + g * *c;
                }
            }
        }
    }

    let dz = grid.step();
    let z = grid.points();
    let mut out = PowerProfileMatrix::filled(n_ch, n_pts, T::zero());
    for i in 0..n_ch {
        let sign = directions[i].sign::<T>();
        let alpha = attenuation_per_km[i];
        let anchor = profile.anchor(i);
        let int_row = &integral[i * n_pts..(i + 1) * n_pts];
        let out_row = out.row_mut(i);
        for k in 0..n_pts {
            // one fused exponent per entry; no clamping, so divergence
            // surfaces as Inf/NaN for the caller's detector
            let exponent = sign * (int_row[k] * dz - alpha * z[k]);
            out_row[k] = anchor * exponent.exp();
        }
    }
    Ok(out)
}
