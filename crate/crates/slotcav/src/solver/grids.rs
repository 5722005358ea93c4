//! Staggered-grid bookkeeping shared by the operator assembly and the field
//! reconstruction.
//!
//! Unknown placement on the tensor-product mesh (PEC walls at the domain
//! edge, tangential E forced to zero there):
//!
//! * `Ex(i, j)` at (xc_i, y_j): cell centres in x, interior grid lines in y
//!   (i in 0..nx, j in 1..=ny-1)
//! * `Ey(i, j)` at (x_i, yc_j): interior grid lines in x, cell centres in y
//!   (i in 1..=nx-1, j in 0..ny)
//! * `Ez` at grid nodes, eliminated through the divergence relation
//! * `Hz` at cell centres, `Hx`/`Hy` collocated with `Ey`/`Ex`

use crate::geometry::PermittivityMap;

pub(crate) struct Grids {
    pub nx: usize,
    pub ny: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub dx: Vec<f64>,
    pub dy: Vec<f64>,
    pub xc: Vec<f64>,
    pub yc: Vec<f64>,
    /// Dual spacings at interior lines: dtx[i] = (dx[i-1]+dx[i])/2, i in 1..nx.
    pub dtx: Vec<f64>,
    pub dty: Vec<f64>,
    /// Permittivity at Ex points (tangential-in-y arithmetic average).
    pub exx_f: Vec<f64>,
    /// Permittivity at Ey points (tangential-in-x arithmetic average).
    pub eyy_f: Vec<f64>,
    /// Inverse permittivity at interior nodes (quarter-area average).
    pub inv_ezz_n: Vec<f64>,
    /// Scalar n(r)^2 per cell, for energy integrals.
    pub eps_cell: Vec<f64>,
    pub n_clad: f64,
    pub n_max: f64,
}

impl Grids {
    pub fn n_ex(&self) -> usize {
        self.nx * (self.ny - 1)
    }

    pub fn n_ey(&self) -> usize {
        (self.nx - 1) * self.ny
    }

    pub fn n_total(&self) -> usize {
        self.n_ex() + self.n_ey()
    }

    /// Ex unknown index; i in 0..nx, j in 1..=ny-1.
    pub fn id_ex(&self, i: usize, j: usize) -> usize {
        (j - 1) * self.nx + i
    }

    /// Ey unknown index (within the Ey block); i in 1..=nx-1, j in 0..ny.
    pub fn id_ey(&self, i: usize, j: usize) -> usize {
        j * (self.nx - 1) + (i - 1)
    }

    /// Node index on the full (nx+1) x (ny+1) node grid.
    pub fn id_node(&self, i: usize, j: usize) -> usize {
        j * (self.nx + 1) + i
    }

    pub fn cell(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn exx_at(&self, i: usize, j: usize) -> f64 {
        self.exx_f[self.id_ex(i, j)]
    }

    pub fn eyy_at(&self, i: usize, j: usize) -> f64 {
        self.eyy_f[self.id_ey(i, j)]
    }

    pub fn new(map: &PermittivityMap) -> Self {
        let mesh = &map.mesh;
        let (nx, ny) = (mesh.nx_cells(), mesh.ny_cells());
        let x = mesh.x_lines().to_vec();
        let y = mesh.y_lines().to_vec();
        let dx: Vec<f64> = (0..nx).map(|i| mesh.dx(i)).collect();
        let dy: Vec<f64> = (0..ny).map(|j| mesh.dy(j)).collect();
        let xc: Vec<f64> = (0..nx).map(|i| mesh.xc(i)).collect();
        let yc: Vec<f64> = (0..ny).map(|j| mesh.yc(j)).collect();
        let mut dtx = vec![0.0; nx + 1];
        for i in 1..nx {
            dtx[i] = 0.5 * (dx[i - 1] + dx[i]);
        }
        let mut dty = vec![0.0; ny + 1];
        for j in 1..ny {
            dty[j] = 0.5 * (dy[j - 1] + dy[j]);
        }

        let mut exx_f = vec![0.0; nx * (ny - 1)];
        for j in 1..ny {
            for i in 0..nx {
                exx_f[(j - 1) * nx + i] = (map.eps_xx(i, j - 1) * dy[j - 1]
                    + map.eps_xx(i, j) * dy[j])
                    / (dy[j - 1] + dy[j]);
            }
        }
        let mut eyy_f = vec![0.0; (nx - 1) * ny];
        for j in 0..ny {
            for i in 1..nx {
                eyy_f[j * (nx - 1) + (i - 1)] = (map.eps_yy(i - 1, j) * dx[i - 1]
                    + map.eps_yy(i, j) * dx[i])
                    / (dx[i - 1] + dx[i]);
            }
        }
        let mut inv_ezz_n = vec![0.0; (nx + 1) * (ny + 1)];
        for j in 1..ny {
            for i in 1..nx {
                let w00 = dx[i - 1] * dy[j - 1];
                let w10 = dx[i] * dy[j - 1];
                let w01 = dx[i - 1] * dy[j];
                let w11 = dx[i] * dy[j];
                let eps = (map.eps_zz(i - 1, j - 1) * w00
                    + map.eps_zz(i, j - 1) * w10
                    + map.eps_zz(i - 1, j) * w01
                    + map.eps_zz(i, j) * w11)
                    / (w00 + w10 + w01 + w11);
                inv_ezz_n[j * (nx + 1) + i] = 1.0 / eps;
            }
        }
        let eps_cell: Vec<f64> = (0..nx * ny)
            .map(|id| map.eps_zz(id % nx, id / nx))
            .collect();

        Self {
            nx,
            ny,
            x,
            y,
            dx,
            dy,
            xc,
            yc,
            dtx,
            dty,
            exx_f,
            eyy_f,
            inv_ezz_n,
            eps_cell,
            n_clad: map.n_clad(),
            n_max: map.n_max(),
        }
    }
}
