use crate::error::{domain, Result};

/// Frequency lattice: 2M+1 cells in τ and 2K+1 cells per ξ coordinate, centred at m·d_tau and
/// j·d_xi. Cells are flattened lexicographically (τ index slowest), so the mirror of flat index
/// i is N − 1 − i and the centre cell is the only self-mirrored one.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    pub tau_max: f64,
    pub d_tau: f64,
    pub xi_max: f64,
    pub d_xi: f64,
    pub dim: usize,
    half_tau: usize,
    half_xi: usize,
}

/// Nested sub-cells of the ξ origin cell, each carrying its own Gaussian value: shell s spans
/// relative half-widths [ρ^{s+1}, ρ^s] with ρ = 1/4, and the last shell is the cube [0, ρ^{S−1}].
pub const ORIGIN_SHELLS: usize = 24;
const SHELL_RATIO: f64 = 0.25;

/// Share of a homogeneous mass |ξ|^{q−d} carried by each origin shell: r_s^q − r_{s+1}^q. Sums to 1.
pub fn shell_fractions(q: f64) -> Vec<f64> {
    debug_assert!(q > 0.0);
    (0..ORIGIN_SHELLS)
        .map(|s| {
            let outer = SHELL_RATIO.powf(q * s as f64);
            if s + 1 == ORIGIN_SHELLS {
                outer
            } else {
                outer - SHELL_RATIO.powf(q * (s + 1) as f64)
            }
        })
        .collect()
}

/// Cells per axis of the default lattice, by spatial dimension.
pub const DEFAULT_HALF_CELLS: [(usize, usize); 3] = [(128, 128), (32, 32), (12, 12)];

impl Lattice {
    /// `half_tau` = M and `half_xi` = K; centres reach ±tau_max and ±xi_max.
    pub fn new(tau_max: f64, half_tau: usize, xi_max: f64, half_xi: usize, dim: usize) -> Result<Self> {
        if !(tau_max > 0.0 && xi_max > 0.0 && tau_max.is_finite() && xi_max.is_finite()) {
            return domain("lattice extents must be positive and finite");
        }
        if half_tau == 0 || half_xi == 0 || dim == 0 {
            return domain("lattice needs at least one cell on each side and d >= 1");
        }
        let lat = Lattice {
            tau_max,
            d_tau: tau_max / half_tau as f64,
            xi_max,
            d_xi: xi_max / half_xi as f64,
            dim,
            half_tau,
            half_xi,
        };
        if lat.n_cells().is_none() {
            return domain("lattice has too many cells");
        }
        Ok(lat)
    }

    /// τ_max = 64/t_horizon, ξ_max = 64, cells per axis from [`DEFAULT_HALF_CELLS`].
    pub fn default_for(t_horizon: f64, dim: usize) -> Result<Self> {
        if !(t_horizon > 0.0) {
            return domain("horizon must be positive");
        }
        let (m, k) = DEFAULT_HALF_CELLS.get(dim.wrapping_sub(1)).copied().unwrap_or((6, 6));
        Lattice::new(64.0 / t_horizon, m, 64.0, k, dim)
    }

    pub fn half_tau(&self) -> usize {
        self.half_tau
    }

    pub fn half_xi(&self) -> usize {
        self.half_xi
    }

    pub fn n_tau(&self) -> usize {
        2 * self.half_tau + 1
    }

    pub fn n_xi(&self) -> usize {
        2 * self.half_xi + 1
    }

    /// Number of ξ cells, n_xi^dim.
    pub fn n_xi_cells(&self) -> usize {
        self.n_xi().pow(self.dim as u32)
    }

    fn n_cells(&self) -> Option<usize> {
        let mut n = self.n_tau();
        for _ in 0..self.dim {
            n = n.checked_mul(self.n_xi())?;
        }
        Some(n)
    }

    pub fn len(&self) -> usize {
        self.n_tau() * self.n_xi_cells()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_volume(&self) -> f64 {
        self.d_tau * self.d_xi.powi(self.dim as i32)
    }

    pub fn mirror(&self, cell: usize) -> usize {
        self.len() - 1 - cell
    }

    pub fn centre_cell(&self) -> usize {
        (self.len() - 1) / 2
    }

    /// Flat ξ index of the origin cell.
    pub fn origin_xi(&self) -> usize {
        (self.n_xi_cells() - 1) / 2
    }

    /// (τ index in 0..n_tau, flat ξ index in 0..n_xi_cells).
    pub fn split(&self, cell: usize) -> (usize, usize) {
        let nx = self.n_xi_cells();
        (cell / nx, cell % nx)
    }

    pub fn tau_centre(&self, m: usize) -> f64 {
        (m as f64 - self.half_tau as f64) * self.d_tau
    }

    /// Signed integer coordinates of a flat ξ index.
    pub fn xi_coords(&self, xi_index: usize) -> Vec<i64> {
        let n = self.n_xi();
        let mut out = vec![0i64; self.dim];
        let mut rest = xi_index;
        for slot in out.iter_mut().rev() {
            *slot = (rest % n) as i64 - self.half_xi as i64;
            rest /= n;
        }
        out
    }

    pub fn xi_centre(&self, xi_index: usize) -> Vec<f64> {
        self.xi_coords(xi_index).iter().map(|&j| j as f64 * self.d_xi).collect()
    }

    /// Centre (τ, ξ) of a flat cell index.
    pub fn centre(&self, cell: usize) -> (f64, Vec<f64>) {
        let (m, x) = self.split(cell);
        (self.tau_centre(m), self.xi_centre(x))
    }

    pub fn cell_box(&self, cell: usize) -> CellBox {
        let (tau, xi) = self.centre(cell);
        let ht = 0.5 * self.d_tau;
        let hx = 0.5 * self.d_xi;
        CellBox { tau: (tau - ht, tau + ht), xi: xi.iter().map(|&c| (c - hx, c + hx)).collect() }
    }
}

/// Axis-aligned cell [τ₀, τ₁] × ∏ [ξ₀, ξ₁].
#[derive(Debug, Clone, PartialEq)]
pub struct CellBox {
    pub tau: (f64, f64),
    pub xi: Vec<(f64, f64)>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mirror_is_involution_and_negates_centres() {
        for dim in 1..=2 {
            let lat = Lattice::new(4.0, 3, 2.0, 2, dim).unwrap();
            for c in 0..lat.len() {
                let m = lat.mirror(c);
                assert_eq!(lat.mirror(m), c);
                let (t1, x1) = lat.centre(c);
                let (t2, x2) = lat.centre(m);
                assert!((t1 + t2).abs() < 1e-12);
                assert!(x1.iter().zip(&x2).all(|(a, b)| (a + b).abs() < 1e-12));
                assert_eq!(c == m, c == lat.centre_cell());
            }
            let (t0, x0) = lat.centre(lat.centre_cell());
            assert_eq!(t0, 0.0);
            assert!(x0.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn volume_and_defaults() {
        let lat = Lattice::default_for(1.0, 1).unwrap();
        assert_eq!(lat.n_tau(), 257);
        assert_eq!(lat.d_tau, 0.5);
        assert!((lat.cell_volume() - 0.25).abs() < 1e-15);
        assert!(Lattice::new(1.0, 0, 1.0, 1, 1).is_err());
    }

    #[test]
    fn origin_shells_partition_the_cell() {
        for q in [0.25, 1.0, 1.5, 3.0] {
            let f = shell_fractions(q);
            assert_eq!(f.len(), ORIGIN_SHELLS);
            assert!((f.iter().sum::<f64>() - 1.0).abs() < 1e-15);
            assert!(f.iter().all(|&v| v > 0.0));
        }
        let lat = Lattice::new(4.0, 4, 3.0, 3, 2).unwrap();
        assert_eq!(lat.xi_coords(lat.origin_xi()), vec![0, 0]);
    }
}
