//! Nonuniform tensor-product meshes with material-edge snapping.

use crate::error::{Error, Result};
use crate::geometry::SlotWaveguideSpec;
use serde::{Deserialize, Serialize};

/// Minimum number of mesh cells across the slot. Below this the slot-field
/// discontinuity is not resolved and solves are rejected outright.
pub const MIN_SLOT_CELLS: usize = 4;

/// Mesh generation controls. Lengths in metres.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshOptions {
    pub domain_width: f64,
    pub domain_height: f64,
    /// Target cell size far from the slot.
    pub cladding_cell: f64,
    /// Cap on the near-slot cell size; the actual fine size is
    /// min(slot_width/4, cap) so the slot always spans >= 4 cells.
    pub fine_cell_cap: f64,
    /// Fine cells extend this far beyond the slot walls and the rod surfaces.
    pub slot_margin: f64,
    /// Maximum ratio between neighbouring cell sizes in graded regions.
    pub max_growth: f64,
}

impl Default for MeshOptions {
    fn default() -> Self {
        Self {
            domain_width: 2.36e-6,
            domain_height: 2.0e-6,
            cladding_cell: 10e-9,
            fine_cell_cap: 2.5e-9,
            slot_margin: 40e-9,
            max_growth: 1.3,
        }
    }
}

impl MeshOptions {
    /// Lighter profile for large parameter sweeps: reduced domain and coarser
    /// cladding cells. The near-slot resolution still tracks the slot width.
    pub fn sweep() -> Self {
        Self {
            domain_width: 1.8e-6,
            domain_height: 1.5e-6,
            cladding_cell: 20e-9,
            fine_cell_cap: 5e-9,
            slot_margin: 40e-9,
            max_growth: 1.45,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = self.domain_width > 0.0
            && self.domain_height > 0.0
            && self.cladding_cell > 0.0
            && self.fine_cell_cap > 0.0
            && self.slot_margin >= 0.0
            && self.max_growth > 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSpec("mesh options out of range".into()))
        }
    }
}

/// A tensor-product mesh: strictly increasing x and y grid lines. Cell (i, j)
/// spans [x[i], x[i+1]] x [y[j], y[j+1]].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeshSpec {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl MeshSpec {
    pub fn from_lines(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        for lines in [&x, &y] {
            if lines.len() < 2 || lines.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::InvalidSpec(
                    "mesh lines must be strictly increasing with >= 2 entries".into(),
                ));
            }
        }
        Ok(Self { x, y })
    }

    /// Uniform mesh of nx x ny cells over [x0, x1] x [y0, y1].
    pub fn uniform(x0: f64, x1: f64, nx: usize, y0: f64, y1: f64, ny: usize) -> Result<Self> {
        let lin = |a: f64, b: f64, n: usize| -> Vec<f64> {
            (0..=n).map(|k| a + (b - a) * k as f64 / n as f64).collect()
        };
        Self::from_lines(lin(x0, x1, nx), lin(y0, y1, ny))
    }

    /// Graded mesh for a slot-waveguide cross-section. Lines snap to every
    /// material edge (slot walls, rod faces, bridge faces) and are exactly
    /// mirror-symmetric about the structure centre.
    pub fn for_waveguide(spec: &SlotWaveguideSpec, opts: &MeshOptions) -> Result<Self> {
        spec.validate()?;
        opts.validate()?;
        let fine = (spec.slot_width / MIN_SLOT_CELLS as f64).min(opts.fine_cell_cap);
        let half_w = 0.5 * opts.domain_width;
        let half_h = 0.5 * opts.domain_height;
        if spec.half_width() >= half_w || 0.5 * spec.rod_height >= half_h {
            return Err(Error::GeometryTooLarge(opts.domain_width, opts.domain_height));
        }

        // x half-axis: slot half, rods (fine up to the margin, then graded),
        // cladding graded out to the wall.
        let half_slot = 0.5 * spec.slot_width;
        let rod_out = half_slot + spec.rod_width;
        let mut xh = vec![0.0];
        fill_uniform(&mut xh, half_slot, fine);
        let fine_end = (half_slot + opts.slot_margin).min(rod_out);
        fill_uniform(&mut xh, fine_end, fine);
        if fine_end < rod_out {
            fill_graded(&mut xh, rod_out, fine, opts.cladding_cell, opts.max_growth);
        }
        fill_graded(&mut xh, half_w, fine, opts.cladding_cell, opts.max_growth);

        // y half-axis: bridge face, rod face, margin, cladding.
        let half_rod = 0.5 * spec.rod_height;
        let mut yh = vec![0.0];
        if let Some(b) = spec.bridge_height {
            fill_uniform(&mut yh, 0.5 * b, fine);
        }
        fill_uniform(&mut yh, half_rod, fine);
        fill_uniform(&mut yh, half_rod + opts.slot_margin, fine);
        fill_graded(&mut yh, half_h, fine, opts.cladding_cell, opts.max_growth);

        let (cx, cy) = spec.center;
        Ok(Self { x: mirror(&xh, cx), y: mirror(&yh, cy) })
    }

    pub fn x_lines(&self) -> &[f64] {
        &self.x
    }

    pub fn y_lines(&self) -> &[f64] {
        &self.y
    }

    pub fn nx_cells(&self) -> usize {
        self.x.len() - 1
    }

    pub fn ny_cells(&self) -> usize {
        self.y.len() - 1
    }

    pub fn domain_width(&self) -> f64 {
        self.x[self.x.len() - 1] - self.x[0]
    }

    pub fn domain_height(&self) -> f64 {
        self.y[self.y.len() - 1] - self.y[0]
    }

    pub fn dx(&self, i: usize) -> f64 {
        self.x[i + 1] - self.x[i]
    }

    pub fn dy(&self, j: usize) -> f64 {
        self.y[j + 1] - self.y[j]
    }

    pub fn xc(&self, i: usize) -> f64 {
        0.5 * (self.x[i] + self.x[i + 1])
    }

    pub fn yc(&self, j: usize) -> f64 {
        0.5 * (self.y[j] + self.y[j + 1])
    }

    pub fn cell_area(&self, i: usize, j: usize) -> f64 {
        self.dx(i) * self.dy(j)
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.x[0] && x <= self.x[self.x.len() - 1] && y >= self.y[0] && y <= self.y[self.y.len() - 1]
    }

    /// Number of cells overlapping the open interval (a, b) on the x axis.
    pub fn x_cells_in(&self, a: f64, b: f64) -> usize {
        (0..self.nx_cells())
            .filter(|&i| self.x[i + 1] > a + 1e-18 && self.x[i] < b - 1e-18)
            .count()
    }

    /// Split every cell in two along both axes.
    pub fn refine(&self) -> Self {
        let split = |lines: &[f64]| {
            let mut out = Vec::with_capacity(lines.len() * 2 - 1);
            for w in lines.windows(2) {
                out.push(w[0]);
                out.push(0.5 * (w[0] + w[1]));
            }
            out.push(lines[lines.len() - 1]);
            out
        };
        Self { x: split(&self.x), y: split(&self.y) }
    }

    /// Reject meshes that under-resolve the slot.
    pub fn check_slot_resolution(&self, spec: &SlotWaveguideSpec) -> Result<()> {
        let half = 0.5 * spec.slot_width;
        let cells = self.x_cells_in(spec.center.0 - half, spec.center.0 + half);
        if cells < MIN_SLOT_CELLS {
            return Err(Error::SlotUnderResolved { cells, required: MIN_SLOT_CELLS });
        }
        Ok(())
    }
}

/// Extend `lines` (last entry = current position) to `end` with uniform cells
/// of size at most `h`. Both endpoints land exactly on grid lines.
pub(crate) fn fill_uniform(lines: &mut Vec<f64>, end: f64, h: f64) {
    let start = *lines.last().unwrap();
    let len = end - start;
    if len <= 1e-18 {
        return;
    }
    let n = (len / h).ceil().max(1.0) as usize;
    for k in 1..=n {
        lines.push(start + len * k as f64 / n as f64);
    }
    *lines.last_mut().unwrap() = end;
}

/// Extend `lines` to `end` with cells growing geometrically from `h_start`
/// towards `h_max`, rescaled so the segment closes exactly on `end`.
pub(crate) fn fill_graded(lines: &mut Vec<f64>, end: f64, h_start: f64, h_max: f64, growth: f64) {
    let start = *lines.last().unwrap();
    let len = end - start;
    if len <= 1e-18 {
        return;
    }
    let mut sizes = Vec::new();
    let mut h = h_start.min(h_max);
    let mut total = 0.0;
    while total < len {
        sizes.push(h);
        total += h;
        h = (h * growth).min(h_max);
    }
    let scale = len / total;
    let mut pos = start;
    for (k, s) in sizes.iter().enumerate() {
        pos += s * scale;
        if k + 1 == sizes.len() {
            pos = end;
        }
        lines.push(pos);
    }
}

/// Mirror a half-axis [0, L] about `center`: offsets are exact negations, so
/// the resulting line set is bitwise mirror-symmetric when center == 0.
fn mirror(half: &[f64], center: f64) -> Vec<f64> {
    let mut out: Vec<f64> = half.iter().skip(1).rev().map(|t| center - t).collect();
    out.push(center);
    out.extend(half.iter().skip(1).map(|t| center + t));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{materials, SlotWaveguideSpec};

    fn spec() -> SlotWaveguideSpec {
        SlotWaveguideSpec::new(
            materials::diamond(),
            materials::air(),
            20e-9,
            140e-9,
            110e-9,
            637e-9,
        )
        .unwrap()
    }

    #[test]
    fn default_mesh_snaps_material_edges() {
        let m = MeshSpec::for_waveguide(&spec(), &MeshOptions::default()).unwrap();
        for edge in [10e-9, 150e-9, -10e-9, -150e-9] {
            assert!(
                m.x_lines().iter().any(|&x| (x - edge).abs() < 1e-15),
                "missing x line at {edge}"
            );
        }
        for edge in [55e-9, -55e-9] {
            assert!(m.y_lines().iter().any(|&y| (y - edge).abs() < 1e-15));
        }
    }

    #[test]
    fn default_mesh_is_exactly_mirror_symmetric() {
        let m = MeshSpec::for_waveguide(&spec(), &MeshOptions::default()).unwrap();
        let x = m.x_lines();
        let n = x.len();
        for i in 0..n {
            assert_eq!(x[i], -x[n - 1 - i], "x lines not mirrored at {i}");
        }
    }

    #[test]
    fn slot_spans_at_least_four_cells() {
        let m = MeshSpec::for_waveguide(&spec(), &MeshOptions::default()).unwrap();
        assert!(m.x_cells_in(-10e-9, 10e-9) >= MIN_SLOT_CELLS);
        // 5 nm slot: fine cell shrinks to w_s/4.
        let narrow = SlotWaveguideSpec::new(
            materials::gap(),
            materials::air(),
            5e-9,
            110e-9,
            70e-9,
            637e-9,
        )
        .unwrap();
        let m = MeshSpec::for_waveguide(&narrow, &MeshOptions::sweep()).unwrap();
        assert!(m.x_cells_in(-2.5e-9, 2.5e-9) >= MIN_SLOT_CELLS);
    }

    #[test]
    fn oversized_geometry_is_rejected() {
        let big = SlotWaveguideSpec::new(
            materials::diamond(),
            materials::air(),
            20e-9,
            2e-6,
            110e-9,
            637e-9,
        )
        .unwrap();
        let err = MeshSpec::for_waveguide(&big, &MeshOptions::default()).unwrap_err();
        assert!(matches!(err, Error::GeometryTooLarge(..)));
    }

    #[test]
    fn refine_halves_every_cell() {
        let m = MeshSpec::for_waveguide(&spec(), &MeshOptions::default()).unwrap();
        let r = m.refine();
        assert_eq!(r.nx_cells(), 2 * m.nx_cells());
        assert_eq!(r.ny_cells(), 2 * m.ny_cells());
        assert_eq!(r.domain_width(), m.domain_width());
    }

    #[test]
    fn under_resolved_slot_is_rejected() {
        let coarse = MeshSpec::uniform(-1e-6, 1e-6, 40, -1e-6, 1e-6, 40).unwrap();
        let err = coarse.check_slot_resolution(&spec()).unwrap_err();
        assert!(matches!(err, Error::SlotUnderResolved { .. }));
    }
}
