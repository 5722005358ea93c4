//! Assembly of the transverse-E vector wave operator.
//!
//! The discrete eigenproblem is A [Ex; Ey] = n_eff^2 [Ex; Ey], obtained from
//! the curl equations on the staggered grid with Ez eliminated through the
//! divergence relation div(eps E) = 0. The operator is scaled by 1/k0^2 so
//! eigenvalues are squared effective indices. In continuum form,
//!
//!   Pxx Ex = dx[(1/e) dx(e Ex)] + dyy Ex + k0^2 e Ex
//!   Pxy Ey = dx[(1/e) dy(e Ey)] - dxdy Ey
//!   Pyy Ey = dy[(1/e) dy(e Ey)] + dxx Ey + k0^2 e Ey
//!   Pyx Ex = dy[(1/e) dx(e Ex)] - dydx Ex
//!
//! with tensor-averaged permittivities at faces and nodes.

use super::grids::Grids;

/// Sparse matrix in CSR form with a fixed layout: the Ex block first, then Ey.
pub(crate) struct Operator {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<u32>,
    pub vals: Vec<f64>,
}

impl Operator {
    pub fn matvec(&self, x: &[f64], out: &mut [f64]) {
        for r in 0..self.n {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[k] * x[self.cols[k] as usize];
            }
            out[r] = acc;
        }
    }

    /// Relative eigenpair residual |A v - lambda v| / (|v| lambda).
    pub fn relative_residual(&self, v: &[f64], lambda: f64) -> f64 {
        let mut av = vec![0.0; self.n];
        self.matvec(v, &mut av);
        let mut num = 0.0;
        let mut den = 0.0;
        for i in 0..self.n {
            let r = av[i] - lambda * v[i];
            num += r * r;
            den += v[i] * v[i];
        }
        (num / den).sqrt() / lambda.abs()
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }
}

struct Triplets {
    entries: Vec<(u32, u32, f64)>,
}

impl Triplets {
    fn push(&mut self, row: usize, col: usize, val: f64) {
        if val != 0.0 {
            self.entries.push((row as u32, col as u32, val));
        }
    }

    fn into_csr(mut self, n: usize) -> Operator {
        self.entries.sort_unstable_by_key(|&(r, c, _)| ((r as u64) << 32) | c as u64);
        let mut rows: Vec<u32> = Vec::with_capacity(self.entries.len());
        let mut cols: Vec<u32> = Vec::with_capacity(self.entries.len());
        let mut vals: Vec<f64> = Vec::with_capacity(self.entries.len());
        for &(r, c, v) in &self.entries {
            if rows.last() == Some(&r) && cols.last() == Some(&c) {
                *vals.last_mut().unwrap() += v;
            } else {
                rows.push(r);
                cols.push(c);
                vals.push(v);
            }
        }
        let mut row_ptr = vec![0usize; n + 1];
        for &r in &rows {
            row_ptr[r as usize + 1] += 1;
        }
        for r in 0..n {
            row_ptr[r + 1] += row_ptr[r];
        }
        Operator { n, row_ptr, cols, vals }
    }
}

/// Assemble the operator for wavenumber k0 (rad/m).
pub(crate) fn assemble(g: &Grids, k0: f64) -> Operator {
    let (nx, ny) = (g.nx, g.ny);
    let n_ex = g.n_ex();
    let n = g.n_total();
    let s = 1.0 / (k0 * k0);
    let mut t = Triplets { entries: Vec::with_capacity(9 * n) };

    // Divergence coefficients feeding node (i, j): ghat(i,j) as a linear form
    // over Ex(i-1,j), Ex(i,j), Ey(i,j-1), Ey(i,j). Zero at boundary nodes.
    // ghat = inv_ezz * [ (exxF(i,j) Ex(i,j) - exxF(i-1,j) Ex(i-1,j)) / dtx_i
    //                  + (eyyF(i,j) Ey(i,j) - eyyF(i,j-1) Ey(i,j-1)) / dty_j ]
    let ghat_terms = |i: usize, j: usize| -> Option<[(usize, f64); 4]> {
        if i == 0 || i == nx || j == 0 || j == ny {
            return None;
        }
        let inv = g.inv_ezz_n[g.id_node(i, j)];
        Some([
            (g.id_ex(i, j), inv * g.exx_at(i, j) / g.dtx[i]),
            (g.id_ex(i - 1, j), -inv * g.exx_at(i - 1, j) / g.dtx[i]),
            (n_ex + g.id_ey(i, j), inv * g.eyy_at(i, j) / g.dty[j]),
            (n_ex + g.id_ey(i, j - 1), -inv * g.eyy_at(i, j - 1) / g.dty[j]),
        ])
    };

    // Ex rows.
    for j in 1..ny {
        for i in 0..nx {
            let row = g.id_ex(i, j);
            let dty = g.dty[j];
            let dxi = g.dx[i];

            t.push(row, row, g.exx_at(i, j));

            // dyy Ex
            let c_up = s / (dty * g.dy[j]);
            let c_dn = s / (dty * g.dy[j - 1]);
            t.push(row, row, -c_up - c_dn);
            if j + 1 <= ny - 1 {
                t.push(row, g.id_ex(i, j + 1), c_up);
            }
            if j - 1 >= 1 {
                t.push(row, g.id_ex(i, j - 1), c_dn);
            }

            // -dydx Ey: -(s / (dty dx_i)) [Ey(i+1,j) - Ey(i,j) - Ey(i+1,j-1) + Ey(i,j-1)]
            let cc = s / (dty * dxi);
            if i + 1 <= nx - 1 {
                t.push(row, n_ex + g.id_ey(i + 1, j), -cc);
                t.push(row, n_ex + g.id_ey(i + 1, j - 1), cc);
            }
            if i >= 1 {
                t.push(row, n_ex + g.id_ey(i, j), cc);
                t.push(row, n_ex + g.id_ey(i, j - 1), -cc);
            }

            // dx[(1/e)(div)]: s (ghat(i+1,j) - ghat(i,j)) / dx_i
            if let Some(terms) = ghat_terms(i + 1, j) {
                for (col, w) in terms {
                    t.push(row, col, s * w / dxi);
                }
            }
            if let Some(terms) = ghat_terms(i, j) {
                for (col, w) in terms {
                    t.push(row, col, -s * w / dxi);
                }
            }
        }
    }

    // Ey rows.
    for j in 0..ny {
        for i in 1..nx {
            let row = n_ex + g.id_ey(i, j);
            let dtx = g.dtx[i];
            let dyj = g.dy[j];

            t.push(row, row, g.eyy_at(i, j));

            // dxx Ey
            let c_r = s / (dtx * g.dx[i]);
            let c_l = s / (dtx * g.dx[i - 1]);
            t.push(row, row, -c_r - c_l);
            if i + 1 <= nx - 1 {
                t.push(row, n_ex + g.id_ey(i + 1, j), c_r);
            }
            if i - 1 >= 1 {
                t.push(row, n_ex + g.id_ey(i - 1, j), c_l);
            }

            // -dxdy Ex: -(s / (dtx dy_j)) [Ex(i,j+1) - Ex(i,j) - Ex(i-1,j+1) + Ex(i-1,j)]
            let cc = s / (dtx * dyj);
            if j + 1 <= ny - 1 {
                t.push(row, g.id_ex(i, j + 1), -cc);
                t.push(row, g.id_ex(i - 1, j + 1), cc);
            }
            if j >= 1 {
                t.push(row, g.id_ex(i, j), cc);
                t.push(row, g.id_ex(i - 1, j), -cc);
            }

            // dy[(1/e)(div)]: s (ghat(i,j+1) - ghat(i,j)) / dy_j
            if let Some(terms) = ghat_terms(i, j + 1) {
                for (col, w) in terms {
                    t.push(row, col, s * w / dyj);
                }
            }
            if let Some(terms) = ghat_terms(i, j) {
                for (col, w) in terms {
                    t.push(row, col, -s * w / dyj);
                }
            }
        }
    }

    t.into_csr(n)
}
