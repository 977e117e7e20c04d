//! Gaussian noise on a finite frequency lattice. Each cell carries a complex normal value with
//! E|Ŵ(c)|² = cell volume and Ŵ(ι c) = conj Ŵ(c), so linear functionals of real test functions
//! are real and their covariance is the lattice Riemann sum of the continuum isometry. Cells
//! of the ξ origin column are sums of independent shell values, so that weights singular at
//! ξ = 0 keep their cross covariances between parameters.

mod lattice;
mod weights;

use std::io::{Read, Write};

use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{ChaosError, Result};
use crate::model_params::NoiseParam;

pub use lattice::{shell_fractions, CellBox, Lattice, DEFAULT_HALF_CELLS, ORIGIN_SHELLS};
pub use weights::{spectral_weight, SpectralWeight};
pub(crate) use weights::{shell_factors, spatial_factors, temporal_factors};

const MAGIC: &[u8; 4] = b"ANDC";
const FORMAT_VERSION: u32 = 2;
const CHUNK: usize = 4096;

/// One realisation of the lattice noise. Values depend only on (seed, cell index), shell values
/// only on (seed, τ index, shell).
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseDraw {
    seed: u64,
    lattice: Lattice,
    values: Vec<Complex64>,
    /// [m · ORIGIN_SHELLS + s]
    shells: Vec<Complex64>,
}

impl NoiseDraw {
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn value(&self, cell: usize) -> Complex64 {
        self.values[cell]
    }

    /// Shell values of the origin-column cell in τ row m.
    pub fn shells(&self, m: usize) -> &[Complex64] {
        &self.shells[m * ORIGIN_SHELLS..(m + 1) * ORIGIN_SHELLS]
    }

    /// Σ_s a_s Z_s(m): the weighted ξ part of origin-column cell m for shell factors a.
    pub fn origin_value(&self, m: usize, factors: &[f64]) -> Complex64 {
        self.shells(m).iter().zip(factors).map(|(z, a)| z * a).sum()
    }

    /// Binary dump: magic, format version, seed, lattice extents and counts, then (re, im) pairs
    /// of the cells followed by those of the origin shells, all little-endian.
    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        let lat = &self.lattice;
        let mut buf = Vec::with_capacity(64 + 16 * (self.values.len() + self.shells.len()));
        buf.extend_from_slice(MAGIC);
        buf.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        buf.extend_from_slice(&self.seed.to_le_bytes());
        buf.extend_from_slice(&lat.tau_max.to_le_bytes());
        buf.extend_from_slice(&lat.xi_max.to_le_bytes());
        for n in [lat.half_tau(), lat.half_xi(), lat.dim] {
            buf.extend_from_slice(&(n as u64).to_le_bytes());
        }
        for v in self.values.iter().chain(&self.shells) {
            buf.extend_from_slice(&v.re.to_le_bytes());
            buf.extend_from_slice(&v.im.to_le_bytes());
        }
        w.write_all(&buf).map_err(io_err)
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut bytes = Vec::new();
        r.read_to_end(&mut bytes).map_err(io_err)?;
        let mut cur = Cursor { bytes: &bytes, pos: 0 };
        if cur.take(4)? != MAGIC {
            return Err(ChaosError::Io("not a noise dump".into()));
        }
        let version = u32::from_le_bytes(cur.take(4)?.try_into().unwrap());
        if version != FORMAT_VERSION {
            return Err(ChaosError::Io(format!("unsupported dump version {version}")));
        }
        let seed = cur.u64()?;
        let tau_max = cur.f64()?;
        let xi_max = cur.f64()?;
        let (half_tau, half_xi, dim) = (cur.u64()? as usize, cur.u64()? as usize, cur.u64()? as usize);
        let lattice = Lattice::new(tau_max, half_tau, xi_max, half_xi, dim)?;
        let n = lattice.len();
        let ns = lattice.n_tau() * ORIGIN_SHELLS;
        if bytes.len() - cur.pos != 16 * (n + ns) {
            return Err(ChaosError::Io("dump length does not match its lattice".into()));
        }
        let mut pairs = (0..n + ns).map(|_| Ok(Complex64::new(cur.f64()?, cur.f64()?))).collect::<Result<Vec<_>>>()?;
        let shells = pairs.split_off(n);
        let draw = NoiseDraw { seed, lattice, values: pairs, shells };
        draw.check_hermitian()?;
        Ok(draw)
    }

    fn check_hermitian(&self) -> Result<()> {
        for (c, v) in self.values.iter().enumerate() {
            if *v != self.values[self.lattice.mirror(c)].conj() {
                return Err(ChaosError::Symmetry(format!("cell {c} is not the conjugate of its mirror")));
            }
        }
        let nt = self.lattice.n_tau();
        let flat = flat_shell_factors(&self.lattice);
        let nx = self.lattice.n_xi_cells();
        for m in 0..nt {
            let (a, b) = (self.shells(m), self.shells(nt - 1 - m));
            if a.iter().zip(b).any(|(u, v)| *u != v.conj()) {
                return Err(ChaosError::Symmetry(format!("origin shells of row {m} are not the conjugate of their mirror")));
            }
            if self.values[m * nx + self.lattice.origin_xi()] != self.origin_value(m, &flat) {
                return Err(ChaosError::Symmetry(format!("origin cell of row {m} is not the sum of its shells")));
            }
        }
        Ok(())
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos + n;
        if end > self.bytes.len() {
            return Err(ChaosError::Io("truncated dump".into()));
        }
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

fn io_err(e: std::io::Error) -> ChaosError {
    ChaosError::Io(e.to_string())
}

/// Standard complex normal pair for a canonical cell; the stream position is 4 words per cell.
fn box_muller(rng: &mut ChaCha8Rng) -> (f64, f64) {
    let u1 = ((rng.next_u64() >> 11) + 1) as f64 * f64::EPSILON / 2.0;
    let u2 = (rng.next_u64() >> 11) as f64 * f64::EPSILON / 2.0;
    let r = (-2.0 * u1.ln()).sqrt();
    let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
    (r * c, r * s)
}

/// Unit-density shell factors: the cell value is Σ_s sqrt(|shell s| / |cell|) Z_s.
fn flat_shell_factors(lattice: &Lattice) -> Vec<f64> {
    shell_fractions(lattice.dim as f64).into_iter().map(f64::sqrt).collect()
}

/// Draws the lattice noise for `seed`. Cell c below the centre gets stream words 4c..4c+4;
/// shell s of origin row m below the centre gets words 4(m·S + s).. of the second stream.
pub fn draw_noise(lattice: &Lattice, seed: u64) -> NoiseDraw {
    let n = lattice.len();
    let centre = lattice.centre_cell();
    let vol = lattice.cell_volume();
    let scale = (0.5 * vol).sqrt();
    let mut values = vec![Complex64::new(0.0, 0.0); n];
    values[..=centre].par_chunks_mut(CHUNK).enumerate().for_each(|(ci, chunk)| {
        let start = ci * CHUNK;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_word_pos(start as u128 * 4);
        for (off, slot) in chunk.iter_mut().enumerate() {
            let (a, b) = box_muller(&mut rng);
            *slot = if start + off == centre { Complex64::new(a * vol.sqrt(), 0.0) } else { Complex64::new(a, b) * scale };
        }
    });
    for c in centre + 1..n {
        values[c] = values[n - 1 - c].conj();
    }

    let nt = lattice.n_tau();
    let mid = lattice.half_tau();
    let mut shells = vec![Complex64::new(0.0, 0.0); nt * ORIGIN_SHELLS];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    for (i, slot) in shells[..(mid + 1) * ORIGIN_SHELLS].iter_mut().enumerate() {
        let (a, b) = box_muller(&mut rng);
        *slot = if i / ORIGIN_SHELLS == mid { Complex64::new(a * vol.sqrt(), 0.0) } else { Complex64::new(a, b) * scale };
    }
    for m in mid + 1..nt {
        for s in 0..ORIGIN_SHELLS {
            shells[m * ORIGIN_SHELLS + s] = shells[(nt - 1 - m) * ORIGIN_SHELLS + s].conj();
        }
    }
    let mut draw = NoiseDraw { seed, lattice: lattice.clone(), values, shells };
    let flat = flat_shell_factors(lattice);
    let (nx, ox) = (lattice.n_xi_cells(), lattice.origin_xi());
    for m in 0..nt {
        draw.values[m * nx + ox] = draw.origin_value(m, &flat);
    }
    draw
}

/// Lattice functional Σ_c Fφ(c)·w(c)·Ŵ(c). Fails with a symmetry error when Fφ is not the
/// transform of a real function, detected as an imaginary residual above 1e−8 of the absolute sum.
pub fn linear_functional(draw: &NoiseDraw, p: &NoiseParam, fhat: &dyn Fn(f64, &[f64]) -> Complex64) -> Result<f64> {
    let lat = draw.lattice();
    let weights = SpectralWeight::on_lattice(p, lat)?;
    let mut total = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    let origin = lat.origin_xi();
    for x in 0..lat.n_xi_cells() {
        let xi = lat.xi_centre(x);
        let wx = weights.xi_factors()[x];
        for m in 0..lat.n_tau() {
            let c = m * lat.n_xi_cells() + x;
            let noise = if x == origin { draw.origin_value(m, weights.origin_shell_factors()) } else { draw.values[c] * wx };
            let term = fhat(lat.tau_centre(m), &xi) * weights.tau_factors()[m] * noise;
            total += term;
            scale += term.norm();
        }
    }
    if total.im.abs() > 1e-8 * scale + f64::MIN_POSITIVE {
        return Err(ChaosError::Symmetry(format!("imaginary residual {:e} against scale {:e}", total.im, scale)));
    }
    Ok(total.re)
}

/// Exact lattice covariance E[W₁(φ)W₂(ψ)] = Σ_c Fφ(c)·conj Fψ(c)·w₁(c)w₂(c)·vol for noises
/// sharing one draw, with Σ_s a₁ₛa₂ₛ in place of w₁w₂ on the origin column.
pub fn lattice_covariance(
    lattice: &Lattice,
    p1: &NoiseParam,
    p2: &NoiseParam,
    fhat: &dyn Fn(f64, &[f64]) -> Complex64,
    ghat: &dyn Fn(f64, &[f64]) -> Complex64,
) -> Result<f64> {
    let w1 = SpectralWeight::on_lattice(p1, lattice)?;
    let w2 = SpectralWeight::on_lattice(p2, lattice)?;
    let mut total = 0.0;
    let origin = lattice.origin_xi();
    for x in 0..lattice.n_xi_cells() {
        let xi = lattice.xi_centre(x);
        let wx = if x == origin {
            w1.origin_shell_factors().iter().zip(w2.origin_shell_factors()).map(|(a, b)| a * b).sum()
        } else {
            w1.xi_factors()[x] * w2.xi_factors()[x]
        };
        for m in 0..lattice.n_tau() {
            let tau = lattice.tau_centre(m);
            let wt = w1.tau_factors()[m] * w2.tau_factors()[m];
            total += (fhat(tau, &xi) * ghat(tau, &xi).conj()).re * wt * wx;
        }
    }
    Ok(total * lattice.cell_volume())
}
