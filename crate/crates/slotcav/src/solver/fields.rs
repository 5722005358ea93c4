//! Reconstruction of the remaining field components from a transverse-E
//! eigenvector, plus quadrature and interpolation over the staggered grids.
//!
//! Phase convention for a forward mode exp(i beta z): Ex, Ey, Hx, Hy are real
//! while Ez and Hz are purely imaginary. Internally the imaginary parts are
//! stored as real arrays (`ez_im`, `hz_im`).

use crate::constants::MU0;

use super::grids::Grids;

#[derive(Clone)]
pub(crate) struct RawFields {
    pub ex: Vec<f64>,
    pub ey: Vec<f64>,
    /// Im(Ez) on the full node grid (zero on the walls).
    pub ez_im: Vec<f64>,
    /// Hx at Ey points.
    pub hx: Vec<f64>,
    /// Hy at Ex points.
    pub hy: Vec<f64>,
    /// Im(Hz) at cell centres.
    pub hz_im: Vec<f64>,
}

impl RawFields {
    pub fn scale(&mut self, c: f64) {
        for arr in [
            &mut self.ex,
            &mut self.ey,
            &mut self.ez_im,
            &mut self.hx,
            &mut self.hy,
            &mut self.hz_im,
        ] {
            arr.iter_mut().for_each(|v| *v *= c);
        }
    }
}

/// Split an eigenvector into its Ex/Ey blocks and reconstruct Ez and H.
pub(crate) fn reconstruct(g: &Grids, v: &[f64], beta: f64, omega: f64) -> RawFields {
    let (nx, ny) = (g.nx, g.ny);
    let n_ex = g.n_ex();
    let ex = v[..n_ex].to_vec();
    let ey = v[n_ex..].to_vec();

    let ex_at = |i: usize, j: usize| -> f64 {
        if j == 0 || j == ny {
            0.0
        } else {
            ex[g.id_ex(i, j)]
        }
    };
    let ey_at = |i: usize, j: usize| -> f64 {
        if i == 0 || i == nx {
            0.0
        } else {
            ey[g.id_ey(i, j)]
        }
    };

    // Ez from the divergence relation: Im(Ez) = div(eps Et) / (beta eps_zz).
    let mut ez_im = vec![0.0; (nx + 1) * (ny + 1)];
    for j in 1..ny {
        for i in 1..nx {
            let div = (g.exx_at(i, j) * ex_at(i, j) - g.exx_at(i - 1, j) * ex_at(i - 1, j))
                / g.dtx[i]
                + (g.eyy_at(i, j) * ey_at(i, j) - g.eyy_at(i, j - 1) * ey_at(i, j - 1))
                    / g.dty[j];
            ez_im[g.id_node(i, j)] = div * g.inv_ezz_n[g.id_node(i, j)] / beta;
        }
    }

    let wmu = omega * MU0;
    // Hy at Ex points: (beta Ex - dx Ez_im) / (omega mu0)
    let mut hy = vec![0.0; n_ex];
    for j in 1..ny {
        for i in 0..nx {
            let dez = (ez_im[g.id_node(i + 1, j)] - ez_im[g.id_node(i, j)]) / g.dx[i];
            hy[g.id_ex(i, j)] = (beta * ex[g.id_ex(i, j)] - dez) / wmu;
        }
    }
    // Hx at Ey points: (dy Ez_im - beta Ey) / (omega mu0)
    let mut hx = vec![0.0; g.n_ey()];
    for j in 0..ny {
        for i in 1..nx {
            let dez = (ez_im[g.id_node(i, j + 1)] - ez_im[g.id_node(i, j)]) / g.dy[j];
            hx[g.id_ey(i, j)] = (dez - beta * ey[g.id_ey(i, j)]) / wmu;
        }
    }
    // Im(Hz) at cell centres: -curl_z(Et) / (omega mu0)
    let mut hz_im = vec![0.0; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            let curl = (ey_at(i + 1, j) - ey_at(i, j)) / g.dx[i]
                - (ex_at(i, j + 1) - ex_at(i, j)) / g.dy[j];
            hz_im[g.cell(i, j)] = -curl / wmu;
        }
    }

    RawFields { ex, ey, ez_im, hx, hy, hz_im }
}

/// Time-averaged axial Poynting flux integral(1/2 Re(E x H*) . z) dA.
pub(crate) fn poynting_flux(g: &Grids, f: &RawFields) -> f64 {
    let mut p = 0.0;
    for j in 1..g.ny {
        for i in 0..g.nx {
            let id = g.id_ex(i, j);
            p += 0.5 * f.ex[id] * f.hy[id] * g.dx[i] * g.dty[j];
        }
    }
    for j in 0..g.ny {
        for i in 1..g.nx {
            let id = g.id_ey(i, j);
            p -= 0.5 * f.ey[id] * f.hx[id] * g.dtx[i] * g.dy[j];
        }
    }
    p
}

/// Electric energy density n^2 |E|^2 interpolated to cell centres.
pub(crate) fn cell_energy(g: &Grids, f: &RawFields) -> Vec<f64> {
    let (nx, ny) = (g.nx, g.ny);
    let mut u = vec![0.0; nx * ny];
    for j in 0..ny {
        for i in 0..nx {
            let ex0 = if j == 0 { 0.0 } else { f.ex[g.id_ex(i, j)] };
            let ex1 = if j + 1 == ny { 0.0 } else { f.ex[g.id_ex(i, j + 1)] };
            let ey0 = if i == 0 { 0.0 } else { f.ey[g.id_ey(i, j)] };
            let ey1 = if i + 1 == nx { 0.0 } else { f.ey[g.id_ey(i + 1, j)] };
            let exc = 0.5 * (ex0 + ex1);
            let eyc = 0.5 * (ey0 + ey1);
            let ezc = 0.25
                * (f.ez_im[g.id_node(i, j)]
                    + f.ez_im[g.id_node(i + 1, j)]
                    + f.ez_im[g.id_node(i, j + 1)]
                    + f.ez_im[g.id_node(i + 1, j + 1)]);
            u[g.cell(i, j)] =
                g.eps_cell[g.cell(i, j)] * (exc * exc + eyc * eyc + ezc * ezc);
        }
    }
    u
}

/// Fraction of integral(n^2 |E|^2) carried by the outermost cell ring.
pub(crate) fn boundary_energy_fraction(g: &Grids, u: &[f64]) -> f64 {
    let mut total = 0.0;
    let mut ring = 0.0;
    for j in 0..g.ny {
        for i in 0..g.nx {
            let e = u[g.cell(i, j)] * g.dx[i] * g.dy[j];
            total += e;
            if i == 0 || j == 0 || i + 1 == g.nx || j + 1 == g.ny {
                ring += e;
            }
        }
    }
    if total > 0.0 {
        ring / total
    } else {
        0.0
    }
}

/// integral(|Ex|^2) dA and integral(|Ey|^2) dA over their dual cells.
pub(crate) fn transverse_energies(g: &Grids, f: &RawFields) -> (f64, f64) {
    let mut ex2 = 0.0;
    for j in 1..g.ny {
        for i in 0..g.nx {
            let v = f.ex[g.id_ex(i, j)];
            ex2 += v * v * g.dx[i] * g.dty[j];
        }
    }
    let mut ey2 = 0.0;
    for j in 0..g.ny {
        for i in 1..g.nx {
            let v = f.ey[g.id_ey(i, j)];
            ey2 += v * v * g.dtx[i] * g.dy[j];
        }
    }
    (ex2, ey2)
}

/// Energy fraction in the mirror-odd part of (Ex, Ey), minimized over the two
/// reflection parity classes. Meaningful for structures mirror-symmetric in x.
pub(crate) fn off_parity_fraction(g: &Grids, f: &RawFields) -> f64 {
    let (nx, ny) = (g.nx, g.ny);
    // Class "+": Ex even, Ey odd (the quasi-TE fundamental's class).
    let mut plus = 0.0;
    let mut minus = 0.0;
    for j in 1..ny {
        for i in 0..nx {
            let a = f.ex[g.id_ex(i, j)];
            let b = f.ex[g.id_ex(nx - 1 - i, j)];
            let w = g.dx[i] * g.dty[j];
            plus += 0.25 * (a + b) * (a + b) * w;
            minus += 0.25 * (a - b) * (a - b) * w;
        }
    }
    for j in 0..ny {
        for i in 1..nx {
            let a = f.ey[g.id_ey(i, j)];
            let b = f.ey[g.id_ey(nx - i, j)];
            let w = g.dtx[i] * g.dy[j];
            plus += 0.25 * (a - b) * (a - b) * w;
            minus += 0.25 * (a + b) * (a + b) * w;
        }
    }
    let total = plus + minus;
    if total > 0.0 {
        plus.min(minus) / total
    } else {
        0.0
    }
}

/// Clamped bilinear interpolation over a rectilinear point set.
pub(crate) fn bilinear(
    xs: &[f64],
    ys: &[f64],
    value: impl Fn(usize, usize) -> f64,
    x: f64,
    y: f64,
) -> f64 {
    let (i0, i1, tx) = bracket(xs, x);
    let (j0, j1, ty) = bracket(ys, y);
    let v00 = value(i0, j0);
    let v10 = value(i1, j0);
    let v01 = value(i0, j1);
    let v11 = value(i1, j1);
    v00 * (1.0 - tx) * (1.0 - ty) + v10 * tx * (1.0 - ty) + v01 * (1.0 - tx) * ty + v11 * tx * ty
}

fn bracket(xs: &[f64], x: f64) -> (usize, usize, f64) {
    let n = xs.len();
    if x <= xs[0] {
        return (0, 0, 0.0);
    }
    if x >= xs[n - 1] {
        return (n - 1, n - 1, 0.0);
    }
    let k = match xs.binary_search_by(|p| p.partial_cmp(&x).unwrap()) {
        Ok(k) => return (k, k, 0.0),
        Err(k) => k,
    };
    let (a, b) = (xs[k - 1], xs[k]);
    (k - 1, k, (x - a) / (b - a))
}
