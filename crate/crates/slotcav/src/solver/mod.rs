//! Full-vector finite-difference frequency-domain eigenmode solver.
//!
//! Given a rasterized cross-section and a free-space wavelength, finds guided
//! modes as eigenpairs of the transverse-E vector wave operator on a
//! staggered grid with PEC walls, using a sparse shift-invert factorization
//! plus Arnoldi iteration.

mod arnoldi;
mod fields;
mod grids;
mod operator;

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constants::{angular_frequency, wavenumber};
use crate::error::{Error, Result};
use crate::geometry::PermittivityMap;

use fields::RawFields;
use grids::Grids;

/// Amplitude state of a mode's field arrays.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Normalization {
    /// As returned by the eigensolver (unit eigenvector).
    Raw,
    /// Axial Poynting flux equals this power in watts.
    Power { watts: f64 },
    /// Amplitude of a single-photon excitation of the cavity mode.
    PerPhoton,
}

/// Eigensolver controls.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveSettings {
    /// Number of modes requested (>= 1).
    pub n_modes: usize,
    /// Shift for the shift-invert iteration as beta^2 in (rad/m)^2.
    /// Defaults to (k0 n_max)^2, nudged up by 1 ppm to stay factorizable.
    pub eigen_shift: Option<f64>,
    /// Relative tolerance on eigenvalues.
    pub convergence_tol: f64,
    /// Krylov budget: one sparse solve per iteration.
    pub max_iterations: usize,
    /// A guided mode whose boundary-ring energy fraction exceeds this is
    /// considered unreliable by the mode-volume integral.
    pub boundary_energy_tol: f64,
}

impl Default for SolveSettings {
    fn default() -> Self {
        Self {
            n_modes: 4,
            eigen_shift: None,
            convergence_tol: 1e-9,
            max_iterations: 250,
            boundary_energy_tol: 1e-6,
        }
    }
}

impl SolveSettings {
    pub fn with_modes(n_modes: usize) -> Self {
        Self { n_modes, ..Self::default() }
    }
}

/// A solved eigenmode: effective index plus vector fields on the mesh.
///
/// Fields follow the forward-propagation phase convention exp(i beta z):
/// Ex, Ey, Hx, Hy real; Ez, Hz imaginary. Accessors return complex values.
#[derive(Clone)]
pub struct Mode {
    n_eff: f64,
    wavelength: f64,
    normalization: Normalization,
    guided: bool,
    residual: f64,
    boundary_fraction: f64,
    boundary_tol: f64,
    grids: Arc<Grids>,
    fields: RawFields,
    ex_energy: f64,
    ey_energy: f64,
}

impl std::fmt::Debug for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Mode")
            .field("n_eff", &self.n_eff)
            .field("wavelength", &self.wavelength)
            .field("normalization", &self.normalization)
            .field("guided", &self.guided)
            .field("residual", &self.residual)
            .finish()
    }
}

impl Mode {
    pub fn n_eff(&self) -> f64 {
        self.n_eff
    }

    /// Propagation constant beta = n_eff k0 (rad/m).
    pub fn beta(&self) -> f64 {
        self.n_eff * wavenumber(self.wavelength)
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    pub fn omega(&self) -> f64 {
        angular_frequency(self.wavelength)
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    /// Above the cladding light line.
    pub fn is_guided(&self) -> bool {
        self.guided
    }

    pub fn n_clad(&self) -> f64 {
        self.grids.n_clad
    }

    /// Relative eigenpair residual |A v - n^2 v| / (|v| n^2).
    pub fn eigen_residual(&self) -> f64 {
        self.residual
    }

    /// Fraction of the electric energy in the outermost cell ring.
    pub fn boundary_energy_fraction(&self) -> f64 {
        self.boundary_fraction
    }

    pub fn boundary_energy_tol(&self) -> f64 {
        self.boundary_tol
    }

    /// integral |Ex|^2 dA (V^2 m^0 scale; used for polarization dominance).
    pub fn ex_energy(&self) -> f64 {
        self.ex_energy
    }

    pub fn ey_energy(&self) -> f64 {
        self.ey_energy
    }

    pub fn is_ex_dominant(&self) -> bool {
        self.ex_energy > self.ey_energy
    }

    /// Time-averaged axial Poynting flux (W).
    pub fn poynting_flux(&self) -> f64 {
        fields::poynting_flux(&self.grids, &self.fields)
    }

    /// Scalar n(r)^2 |E|^2 at cell centres, row-major (j * nx + i).
    pub fn cell_energy(&self) -> Vec<f64> {
        fields::cell_energy(&self.grids, &self.fields)
    }

    pub fn cells(&self) -> (usize, usize) {
        (self.grids.nx, self.grids.ny)
    }

    pub fn cell_center(&self, i: usize, j: usize) -> (f64, f64) {
        (self.grids.xc[i], self.grids.yc[j])
    }

    pub fn cell_area(&self, i: usize, j: usize) -> f64 {
        self.grids.dx[i] * self.grids.dy[j]
    }

    /// Scalar relative permittivity of cell (i, j).
    pub fn cell_eps(&self, i: usize, j: usize) -> f64 {
        self.grids.eps_cell[self.grids.cell(i, j)]
    }

    fn check_point(&self, x: f64, y: f64) -> Result<()> {
        let g = &self.grids;
        if x < g.x[0] || x > g.x[g.nx] || y < g.y[0] || y > g.y[g.ny] {
            return Err(Error::PointOutsideDomain(x, y));
        }
        Ok(())
    }

    /// Interpolated electric field at a point, (Ex, Ey, Ez).
    pub fn e_at(&self, x: f64, y: f64) -> Result<[Complex64; 3]> {
        self.check_point(x, y)?;
        let g = &self.grids;
        let ex = fields::bilinear(
            &g.xc,
            &g.y[1..g.ny],
            |i, j| self.fields.ex[g.id_ex(i, j + 1)],
            x,
            y,
        );
        let ey = fields::bilinear(
            &g.x[1..g.nx],
            &g.yc,
            |i, j| self.fields.ey[g.id_ey(i + 1, j)],
            x,
            y,
        );
        let ez = fields::bilinear(&g.x, &g.y, |i, j| self.fields.ez_im[g.id_node(i, j)], x, y);
        Ok([Complex64::new(ex, 0.0), Complex64::new(ey, 0.0), Complex64::new(0.0, ez)])
    }

    /// Interpolated magnetic field at a point, (Hx, Hy, Hz).
    pub fn h_at(&self, x: f64, y: f64) -> Result<[Complex64; 3]> {
        self.check_point(x, y)?;
        let g = &self.grids;
        let hx = fields::bilinear(
            &g.x[1..g.nx],
            &g.yc,
            |i, j| self.fields.hx[g.id_ey(i + 1, j)],
            x,
            y,
        );
        let hy = fields::bilinear(
            &g.xc,
            &g.y[1..g.ny],
            |i, j| self.fields.hy[g.id_ex(i, j + 1)],
            x,
            y,
        );
        let hz = fields::bilinear(&g.xc, &g.yc, |i, j| self.fields.hz_im[g.cell(i, j)], x, y);
        Ok([Complex64::new(hx, 0.0), Complex64::new(hy, 0.0), Complex64::new(0.0, hz)])
    }

    /// Real Ex amplitude at a point (the dominant quasi-TE component).
    pub fn ex_at(&self, x: f64, y: f64) -> Result<f64> {
        Ok(self.e_at(x, y)?[0].re)
    }

    /// Energy fraction in the mirror-odd part of the transverse field
    /// (minimized over the two x-reflection parity classes).
    pub fn off_parity_energy_fraction(&self) -> f64 {
        fields::off_parity_fraction(&self.grids, &self.fields)
    }

    /// Raw Ex samples on a horizontal line y = const: (x, Ex, eps_xx at the
    /// sample). Used for interface-continuity diagnostics.
    pub fn ex_line_scan(&self, y: f64) -> Vec<(f64, f64, f64)> {
        let g = &self.grids;
        let j = nearest_line(&g.y[1..g.ny], y) + 1;
        (0..g.nx)
            .map(|i| (g.xc[i], self.fields.ex[g.id_ex(i, j)], g.exx_f[g.id_ex(i, j)]))
            .collect()
    }

    /// Multiply all field values by a positive constant; flux scales by c^2.
    pub fn scaled(&self, c: f64, normalization: Normalization) -> Mode {
        let mut m = self.clone();
        m.fields.scale(c);
        m.ex_energy *= c * c;
        m.ey_energy *= c * c;
        m.normalization = normalization;
        m
    }
}

fn nearest_line(lines: &[f64], v: f64) -> usize {
    let mut best = 0;
    let mut dist = f64::INFINITY;
    for (k, &l) in lines.iter().enumerate() {
        let d = (l - v).abs();
        if d < dist {
            dist = d;
            best = k;
        }
    }
    best
}

/// Solve for up to `settings.n_modes` modes, sorted by descending n_eff.
///
/// Errors with `NoGuidedMode` when no eigenvalue lies above the cladding
/// light line, and `NotConverged` when the Krylov budget is exhausted.
pub fn solve_modes(
    map: &PermittivityMap,
    wavelength: f64,
    settings: &SolveSettings,
) -> Result<Vec<Mode>> {
    if !(wavelength > 0.0) {
        return Err(Error::InvalidSpec("wavelength must be positive".into()));
    }
    if settings.n_modes < 1 {
        return Err(Error::InvalidSpec("n_modes must be >= 1".into()));
    }
    let k0 = wavenumber(wavelength);
    let omega = angular_frequency(wavelength);
    let g = Arc::new(Grids::new(map));
    let op = operator::assemble(&g, k0);

    // Shift in n_eff^2 units; slightly above the top of the spectrum so the
    // factorization stays nonsingular even for a uniform map.
    let sigma = settings
        .eigen_shift
        .map(|s| s / (k0 * k0))
        .unwrap_or_else(|| g.n_max * g.n_max * (1.0 + 1e-6));

    let pairs = arnoldi::largest_below_shift(
        &op,
        sigma,
        settings.n_modes,
        settings.convergence_tol,
        settings.max_iterations,
        g.n_clad * g.n_clad,
    )?;

    let mut modes = Vec::new();
    for pair in pairs {
        let lam = pair.lambda;
        if !(lam > 0.0 && lam < sigma) {
            continue;
        }
        let n_eff = lam.sqrt();
        let guided = n_eff > g.n_clad;
        // Hard gate on the measured eigenpair residual: guided modes must
        // meet the tolerance; under-converged continuum candidates are
        // dropped rather than returned.
        let residual = op.relative_residual(&pair.vector, lam);
        if residual > settings.convergence_tol {
            if guided {
                return Err(Error::NotConverged {
                    iterations: settings.max_iterations,
                    residual,
                });
            }
            continue;
        }
        let beta = n_eff * k0;
        let mut raw = fields::reconstruct(&g, &pair.vector, beta, omega);

        // Deterministic sign: largest-|Ex| sample positive.
        let mut pivot = 0.0f64;
        for &v in &raw.ex {
            if v.abs() > pivot.abs() {
                pivot = v;
            }
        }
        if pivot == 0.0 {
            for &v in &raw.ey {
                if v.abs() > pivot.abs() {
                    pivot = v;
                }
            }
        }
        if pivot < 0.0 {
            raw.scale(-1.0);
        }

        let u = fields::cell_energy(&g, &raw);
        let boundary_fraction = fields::boundary_energy_fraction(&g, &u);
        let (ex_energy, ey_energy) = fields::transverse_energies(&g, &raw);
        modes.push(Mode {
            n_eff,
            wavelength,
            normalization: Normalization::Raw,
            guided,
            residual,
            boundary_fraction,
            boundary_tol: settings.boundary_energy_tol,
            grids: Arc::clone(&g),
            fields: raw,
            ex_energy,
            ey_energy,
        });
    }

    // Descending n_eff; ties broken by Ex content.
    modes.sort_by(|a, b| {
        let close = (a.n_eff - b.n_eff).abs() <= settings.convergence_tol * a.n_eff.abs();
        if close {
            b.ex_energy
                .partial_cmp(&a.ex_energy)
                .unwrap_or(std::cmp::Ordering::Equal)
        } else {
            b.n_eff.partial_cmp(&a.n_eff).unwrap_or(std::cmp::Ordering::Equal)
        }
    });

    if !modes.iter().any(|m| m.guided) {
        return Err(Error::NoGuidedMode { n_clad: g.n_clad });
    }
    Ok(modes)
}

/// The guided, Ex-dominant mode of largest effective index.
pub fn fundamental_quasi_te(modes: &[Mode]) -> Result<&Mode> {
    modes
        .iter()
        .filter(|m| m.is_guided() && m.is_ex_dominant())
        .max_by(|a, b| a.n_eff.partial_cmp(&b.n_eff).unwrap_or(std::cmp::Ordering::Equal))
        .ok_or(Error::NoQuasiTeMode)
}

/// Rescale so the axial Poynting flux equals `power` watts.
pub fn normalize_power(mode: &Mode, power: f64) -> Result<Mode> {
    if !(power > 0.0) {
        return Err(Error::InvalidSpec("power must be positive".into()));
    }
    let flux = mode.poynting_flux();
    if !(flux > 0.0) || !flux.is_finite() {
        return Err(Error::ZeroField);
    }
    Ok(mode.scaled((power / flux).sqrt(), Normalization::Power { watts: power }))
}

/// Number of guided modes (n_eff above the cladding index), of either
/// polarization, among those returned.
pub fn count_guided(modes: &[Mode], n_clad: f64) -> usize {
    modes.iter().filter(|m| m.n_eff() > n_clad).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{materials, rasterize, MeshOptions, MeshSpec, SlotWaveguideSpec};
    use crate::slab::{slab_mode_count, slab_neff, Polarization, SlabSpec};

    /// Mesh for an x-invariant slab in a narrow PEC box: lateral harmonics
    /// and TM modes are pushed below the light line, so the guided spectrum
    /// is exactly the slab's TE branch set.
    fn slab_map(d: f64, half_height: f64, width: f64, fine: f64) -> PermittivityMap {
        let mut y = vec![0.0];
        crate::geometry::fill_uniform(&mut y, 0.5 * d, fine);
        crate::geometry::fill_uniform(&mut y, 0.5 * d + 60e-9, fine);
        crate::geometry::fill_graded(&mut y, half_height, fine, 10e-9, 1.3);
        let yl = mirror_lines(&y);
        let nxc = (width / 10e-9).round() as usize;
        let xl: Vec<f64> = (0..=nxc).map(|k| -0.5 * width + width * k as f64 / nxc as f64).collect();
        let mesh = MeshSpec::from_lines(xl, yl).unwrap();
        PermittivityMap::from_profile(mesh, 4, |_, yy| if yy.abs() < 0.5 * d { 5.76 } else { 1.0 })
    }

    fn mirror_lines(half: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = half.iter().skip(1).rev().map(|t| -t).collect();
        out.push(0.0);
        out.extend(half.iter().skip(1).cloned());
        out
    }

    #[test]
    fn uniform_map_has_no_guided_mode() {
        let mesh = MeshSpec::uniform(-0.3e-6, 0.3e-6, 24, -0.3e-6, 0.3e-6, 24).unwrap();
        let map = PermittivityMap::uniform(mesh, 1.0);
        let err = solve_modes(&map, 637e-9, &SolveSettings::with_modes(2)).unwrap_err();
        assert!(matches!(err, Error::NoGuidedMode { .. }));
    }

    #[test]
    fn slab_te0_matches_analytic_oracle() {
        let map = slab_map(110e-9, 0.8e-6, 200e-9, 2.5e-9);
        let modes = solve_modes(&map, 637e-9, &SolveSettings::with_modes(1)).unwrap();
        let oracle = slab_neff(
            &SlabSpec::new(2.4, 1.0, 110e-9, 637e-9, Polarization::Te).unwrap(),
            0,
        )
        .unwrap();
        let got = modes[0].n_eff();
        assert!((got - oracle).abs() < 1e-3, "FD {got} vs oracle {oracle}");
        assert!(modes[0].is_ex_dominant());
    }

    #[test]
    fn thick_slab_guided_count_and_branches_match_oracle() {
        // d chosen so every guided branch sits well away from its cutoff;
        // branches hugging the light line would otherwise hybridize with
        // PEC-box states of the finite domain.
        let spec = SlabSpec::new(2.4, 1.0, 400e-9, 637e-9, Polarization::Te).unwrap();
        let expect = slab_mode_count(&spec); // 3
        assert_eq!(expect, 3);
        let map = slab_map(400e-9, 1.2e-6, 150e-9, 5e-9);
        let modes = solve_modes(&map, 637e-9, &SolveSettings::with_modes(expect + 3)).unwrap();
        assert_eq!(count_guided(&modes, 1.0), expect);
        for m in 0..expect {
            let oracle = slab_neff(&spec, m).unwrap();
            let got = modes[m].n_eff();
            assert!((got - oracle).abs() < 2e-3, "branch {m}: FD {got} vs oracle {oracle}");
        }
    }

    fn diamond_air_coarse() -> (SlotWaveguideSpec, PermittivityMap) {
        let spec = SlotWaveguideSpec::new(
            materials::diamond(),
            materials::air(),
            20e-9,
            140e-9,
            110e-9,
            637e-9,
        )
        .unwrap();
        let opts = MeshOptions {
            domain_width: 1.4e-6,
            domain_height: 1.2e-6,
            cladding_cell: 25e-9,
            fine_cell_cap: 5e-9,
            slot_margin: 30e-9,
            max_growth: 1.5,
        };
        let mesh = MeshSpec::for_waveguide(&spec, &opts).unwrap();
        let map = rasterize(&spec, &mesh).unwrap();
        (spec, map)
    }

    #[test]
    fn diamond_air_fundamental_confines_energy_in_the_slot() {
        let (_, map) = diamond_air_coarse();
        let modes = solve_modes(&map, 637e-9, &SolveSettings::with_modes(2)).unwrap();
        let m = fundamental_quasi_te(&modes).unwrap();
        assert!(m.n_eff() > 1.0 && m.n_eff() < 2.4, "n_eff = {}", m.n_eff());

        // Peak of n^2 |E|^2 inside the slot.
        let u = m.cell_energy();
        let (nx, _) = m.cells();
        let peak = u
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(k, _)| k)
            .unwrap();
        let (x, y) = m.cell_center(peak % nx, peak / nx);
        assert!(x.abs() < 10e-9, "peak at x = {x}");
        assert!(y.abs() < 55e-9, "peak at y = {y}");

        // Residual and parity invariants. The boundary bound is loose here:
        // this deliberately small test domain puts the walls ~5 decay
        // lengths out; production meshes use the full-size domain.
        assert!(m.eigen_residual() < 1e-8);
        assert!(m.off_parity_energy_fraction() < 1e-6);
        assert!(m.boundary_energy_fraction() < 1e-4);
    }

    #[test]
    fn quasi_te_selection_ignores_list_order_and_rejects_tm_only_lists() {
        let (_, map) = diamond_air_coarse();
        let mut modes = solve_modes(&map, 637e-9, &SolveSettings::with_modes(3)).unwrap();
        let picked = fundamental_quasi_te(&modes).unwrap().n_eff();
        modes.reverse();
        assert_eq!(fundamental_quasi_te(&modes).unwrap().n_eff(), picked);

        let only_tm: Vec<Mode> = modes.iter().filter(|m| !m.is_ex_dominant()).cloned().collect();
        assert!(matches!(fundamental_quasi_te(&only_tm), Err(Error::NoQuasiTeMode)));
    }

    #[test]
    fn power_normalization_is_idempotent_and_quadratic() {
        let (_, map) = diamond_air_coarse();
        let modes = solve_modes(&map, 637e-9, &SolveSettings::with_modes(1)).unwrap();
        let m = normalize_power(&modes[0], 1e-15).unwrap();
        assert!((m.poynting_flux() - 1e-15).abs() / 1e-15 < 1e-9);
        assert_eq!(m.normalization(), Normalization::Power { watts: 1e-15 });

        // Renormalizing is a unit rescale.
        let again = normalize_power(&m, 1e-15).unwrap();
        let r = again.ex_at(3e-9, 0.0).unwrap() / m.ex_at(3e-9, 0.0).unwrap();
        assert!((r - 1.0).abs() < 1e-9);

        // 4x power doubles every field value.
        let four = normalize_power(&m, 4e-15).unwrap();
        let ratio = four.ex_at(3e-9, 0.0).unwrap() / m.ex_at(3e-9, 0.0).unwrap();
        assert!((ratio - 2.0).abs() < 1e-9, "ratio {ratio}");
    }

    #[test]
    fn field_scaling_leaves_neff_and_scales_flux_quadratically() {
        let (_, map) = diamond_air_coarse();
        let modes = solve_modes(&map, 637e-9, &SolveSettings::with_modes(1)).unwrap();
        let m = &modes[0];
        let scaled = m.scaled(3.0, Normalization::Raw);
        assert_eq!(scaled.n_eff(), m.n_eff());
        let r = scaled.poynting_flux() / m.poynting_flux();
        assert!((r - 9.0).abs() < 1e-12);
    }

    #[test]
    fn eps_weighted_ex_is_continuous_across_the_slot_wall() {
        let (_, map) = diamond_air_coarse();
        let modes = solve_modes(&map, 637e-9, &SolveSettings::with_modes(1)).unwrap();
        let m = normalize_power(&modes[0], 1e-15).unwrap();
        let scan = m.ex_line_scan(0.0);
        // Samples bracketing the right slot wall at x = 10 nm.
        let inside = scan
            .iter()
            .filter(|(x, _, _)| *x < 10e-9 && *x > 0.0)
            .last()
            .unwrap();
        let outside = scan.iter().find(|(x, _, _)| *x > 10e-9).unwrap();
        let d_in = inside.1 * inside.2;
        let d_out = outside.1 * outside.2;
        assert!(
            (d_in - d_out).abs() / d_in.abs().max(d_out.abs()) < 0.05,
            "eps*Ex jump: {d_in} vs {d_out}"
        );
        // Ex itself jumps by roughly the permittivity ratio.
        let jump = inside.1 / outside.1;
        assert!((jump - 5.76).abs() / 5.76 < 0.15, "Ex jump ratio {jump}");
    }
}

