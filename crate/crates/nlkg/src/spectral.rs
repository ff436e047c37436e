//! Radial grids, the radial Fourier transform, spectral multipliers and norms.
//!
//! A radial function on R^3 is sampled at the interior nodes `r_j = j*dr` of
//! `[0, R]`, `j = 1..n`, `dr = R/(n+1)`. Writing `w(r) = r*u(r)`, the Dirichlet
//! ends `w(0) = w(R) = 0` make the type-I discrete sine transform of `w` the
//! natural spectral basis: the radial Laplacian acts as `-rho_k^2` on the mode
//! `sin(rho_k r)/r`, `rho_k = k*pi/R`.
//!
//! The spectral coefficients follow the continuum convention
//! `uhat(rho) = (4*pi/rho) * int_0^inf sin(rho r) r u(r) dr`, so a function and
//! its coefficients are related exactly like a 3D Fourier pair restricted to
//! radial arguments. With this scaling the discrete Plancherel identity
//! `4*pi*dr*sum w_j^2 = drho/(2 pi^2) * sum (rho_k uhat_k)^2` holds to
//! round-off, not just to quadrature accuracy.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Interior-node radial grid on `[0, R]` with DST-diagonal spectral side.
pub struct RadialGrid {
    r_max: f64,
    n: usize,
    dr: f64,
    drho: f64,
    // Complex FFT of length 2(n+1); the odd/even extensions of length-n data
    // reduce both the sine and cosine sums to this single plan.
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for RadialGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RadialGrid")
            .field("r_max", &self.r_max)
            .field("n", &self.n)
            .finish()
    }
}

impl RadialGrid {
    /// Grid with `n` interior nodes on `[0, R]`. `n` must be a power of two,
    /// at least 8, and `R` positive.
    pub fn new(r_max: f64, n: usize) -> Result<Arc<Self>> {
        if !(r_max > 0.0) || !r_max.is_finite() {
            return Err(Error::OutOfRange {
                what: "grid radius R",
                value: r_max.to_string(),
            });
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::OutOfRange {
                what: "grid size n (power of two, >= 8)",
                value: n.to_string(),
            });
        }
        let fft = FftPlanner::new().plan_fft_forward(2 * (n + 1));
        Ok(Arc::new(RadialGrid {
            r_max,
            n,
            dr: r_max / (n + 1) as f64,
            drho: PI / r_max,
            fft,
        }))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn dr(&self) -> f64 {
        self.dr
    }

    pub fn drho(&self) -> f64 {
        self.drho
    }

    /// Physical node `r_{j+1} = (j+1)*dr` for the 0-based storage index `j`.
    pub fn radius(&self, j: usize) -> f64 {
        (j + 1) as f64 * self.dr
    }

    /// Spectral node `rho_{k+1} = (k+1)*pi/R` for the 0-based storage index `k`.
    pub fn frequency(&self, k: usize) -> f64 {
        (k + 1) as f64 * self.drho
    }

    /// Largest resolved frequency `rho_n = n*pi/R`.
    pub fn max_frequency(&self) -> f64 {
        self.n as f64 * self.drho
    }

    pub fn same_grid(&self, other: &RadialGrid) -> bool {
        self.n == other.n && self.r_max == other.r_max
    }

    /// Plain DST-I sum `S_k = sum_{j=1}^n data_j sin(pi j k/(n+1))`,
    /// via an odd extension and one complex FFT.
    fn dst(&self, data: &[f64]) -> Vec<f64> {
        debug_assert_eq!(data.len(), self.n);
        let m = 2 * (self.n + 1);
        let mut buf = vec![Complex64::default(); m];
        for (j, &v) in data.iter().enumerate() {
            buf[j + 1] = Complex64::new(v, 0.0);
            buf[m - (j + 1)] = Complex64::new(-v, 0.0);
        }
        self.fft.process(&mut buf);
        (1..=self.n).map(|k| -0.5 * buf[k].im).collect()
    }

    /// Cosine-series evaluation `C_j = sum_{k=1}^n a_k cos(pi j k/(n+1))` at
    /// every j = 0..n+1 (endpoints included), via an even extension.
    fn cosine_values(&self, coeffs: &[f64]) -> Vec<f64> {
        debug_assert_eq!(coeffs.len(), self.n);
        let m = 2 * (self.n + 1);
        let mut buf = vec![Complex64::default(); m];
        for (k, &a) in coeffs.iter().enumerate() {
            buf[k + 1] = Complex64::new(a, 0.0);
            buf[m - (k + 1)] = Complex64::new(a, 0.0);
        }
        self.fft.process(&mut buf);
        (0..=self.n + 1).map(|j| 0.5 * buf[j].re).collect()
    }
}

/// Real radial samples `u(r_j)` on a shared grid.
#[derive(Clone, Debug)]
pub struct RadialField {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
}

/// Radial Fourier coefficients `uhat(rho_k)` on a shared grid.
#[derive(Clone, Debug)]
pub struct SpectralField {
    grid: Arc<RadialGrid>,
    coeffs: Vec<f64>,
}

impl RadialField {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(Error::GridMismatch("value count != grid size"));
        }
        Ok(RadialField { grid, values })
    }

    pub fn zero(grid: Arc<RadialGrid>) -> Self {
        let n = grid.n();
        RadialField {
            grid,
            values: vec![0.0; n],
        }
    }

    /// Sample a profile `r -> u(r)` at the grid nodes.
    pub fn from_profile(grid: Arc<RadialGrid>, f: impl Fn(f64) -> f64) -> Self {
        let values = (0..grid.n()).map(|j| f(grid.radius(j))).collect();
        RadialField { grid, values }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn scaled(&self, c: f64) -> Self {
        RadialField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    /// Pointwise difference; both fields must share the grid.
    pub fn sub(&self, other: &RadialField) -> Result<Self> {
        if !self.grid.same_grid(&other.grid) {
            return Err(Error::GridMismatch("subtracting fields on different grids"));
        }
        Ok(RadialField {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    pub fn add(&self, other: &RadialField) -> Result<Self> {
        if !self.grid.same_grid(&other.grid) {
            return Err(Error::GridMismatch("adding fields on different grids"));
        }
        Ok(RadialField {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }
}

impl SpectralField {
    pub fn new(grid: Arc<RadialGrid>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != grid.n() {
            return Err(Error::GridMismatch("coefficient count != grid size"));
        }
        Ok(SpectralField { grid, coeffs })
    }

    pub fn zero(grid: Arc<RadialGrid>) -> Self {
        let n = grid.n();
        SpectralField {
            grid,
            coeffs: vec![0.0; n],
        }
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [f64] {
        &mut self.coeffs
    }
}

/// Forward transform: `uhat(rho_k) = (4 pi dr / rho_k) * DST(r_j u_j)_k`.
pub fn to_spectral(f: &RadialField) -> SpectralField {
    let grid = f.grid.clone();
    let w: Vec<f64> = f
        .values
        .iter()
        .enumerate()
        .map(|(j, &v)| grid.radius(j) * v)
        .collect();
    let s = grid.dst(&w);
    let scale = 4.0 * PI * grid.dr();
    let coeffs = s
        .iter()
        .enumerate()
        .map(|(k, &sk)| scale * sk / grid.frequency(k))
        .collect();
    SpectralField { grid, coeffs }
}

/// Inverse transform: `u(r_j) = drho/(2 pi^2 r_j) * DST(rho_k uhat_k)_j`.
pub fn to_physical(hat: &SpectralField) -> RadialField {
    let grid = hat.grid.clone();
    let a: Vec<f64> = hat
        .coeffs
        .iter()
        .enumerate()
        .map(|(k, &c)| grid.frequency(k) * c)
        .collect();
    let t = grid.dst(&a);
    let scale = grid.drho() / (2.0 * PI * PI);
    let values = t
        .iter()
        .enumerate()
        .map(|(j, &tj)| scale * tj / grid.radius(j))
        .collect();
    RadialField { grid, values }
}

/// Scalar symbol of the radial frequency, applied diagonally in spectral space.
#[derive(Clone, Debug)]
pub enum MultiplierSymbol {
    /// `(1 + rho)^sigma`, the norm weight of the inhomogeneous Sobolev scale.
    BracketPower(f64),
    /// `sqrt(1 + rho^2)`, the Klein-Gordon dispersion relation.
    Dispersion,
    /// `1/sqrt(1 + rho^2)`.
    InverseDispersion,
    /// Smoothing symbol `m(rho) = eta(rho/N)`: identity below `N`, decay
    /// `(N/rho)^(1-s)` above `2N`, monotone log-space cubic in between.
    ISymbol { n_freq: f64, s: f64 },
    /// Low-pass bump `phi(rho/M)`: 1 on `[0, M]`, 0 on `[2M, inf)`.
    LpPhi(f64),
    /// Band bump `psi(rho/M) = phi(rho/M) - phi(2 rho/M)`.
    LpPsi(f64),
    /// `1 - phi(rho/M)`.
    LpGt(f64),
    /// Pointwise product of two symbols.
    Product(Box<MultiplierSymbol>, Box<MultiplierSymbol>),
}

/// Quintic smoothstep: 0 below 0, 1 above 1, C^2 monotone in between.
fn smoothstep5(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        x * x * x * (10.0 + x * (-15.0 + 6.0 * x))
    }
}

/// Cubic smoothstep (zero end slopes), used for the log-space transition of
/// the smoothing symbol.
fn smoothstep3(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        x * x * (3.0 - 2.0 * x)
    }
}

/// The low-pass profile at scale 1: 1 on `[0,1]`, 0 on `[2,inf)`.
fn phi_profile(x: f64) -> f64 {
    1.0 - smoothstep5(x - 1.0)
}

/// `eta(x)`: 1 on `[0,1]`, `x^(s-1)` on `[2,inf)`, monotone C^1 join on the
/// transition band interpolated in (log x, log eta) with zero end slopes.
fn eta_profile(x: f64, s: f64) -> f64 {
    if x <= 1.0 {
        1.0
    } else if x >= 2.0 {
        x.powf(s - 1.0)
    } else {
        let u = x.ln() / std::f64::consts::LN_2;
        (-(1.0 - s) * std::f64::consts::LN_2 * smoothstep3(u)).exp()
    }
}

impl MultiplierSymbol {
    pub fn bracket_power(sigma: f64) -> Self {
        MultiplierSymbol::BracketPower(sigma)
    }

    pub fn dispersion() -> Self {
        MultiplierSymbol::Dispersion
    }

    /// The smoothing multiplier with parameters `N` (dyadic, > 1) and `s`.
    pub fn i_symbol(n_freq: f64, s: f64) -> Self {
        MultiplierSymbol::ISymbol { n_freq, s }
    }

    pub fn lp_phi(m: f64) -> Self {
        MultiplierSymbol::LpPhi(m)
    }

    /// Alias for the low-pass projection symbol.
    pub fn lp_leq(m: f64) -> Self {
        MultiplierSymbol::LpPhi(m)
    }

    pub fn lp_psi(m: f64) -> Self {
        MultiplierSymbol::LpPsi(m)
    }

    pub fn lp_gt(m: f64) -> Self {
        MultiplierSymbol::LpGt(m)
    }

    pub fn lp_ll(m: f64) -> Self {
        MultiplierSymbol::LpPhi(m / 128.0)
    }

    pub fn lp_gtrsim(m: f64) -> Self {
        MultiplierSymbol::LpGt(m / 128.0)
    }

    /// Pointwise product `self * other`.
    pub fn then(self, other: MultiplierSymbol) -> Self {
        MultiplierSymbol::Product(Box::new(self), Box::new(other))
    }

    pub fn eval(&self, rho: f64) -> f64 {
        match self {
            MultiplierSymbol::BracketPower(sigma) => (1.0 + rho).powf(*sigma),
            MultiplierSymbol::Dispersion => (1.0 + rho * rho).sqrt(),
            MultiplierSymbol::InverseDispersion => 1.0 / (1.0 + rho * rho).sqrt(),
            MultiplierSymbol::ISymbol { n_freq, s } => eta_profile(rho / n_freq, *s),
            MultiplierSymbol::LpPhi(m) => phi_profile(rho / m),
            MultiplierSymbol::LpPsi(m) => phi_profile(rho / m) - phi_profile(2.0 * rho / m),
            MultiplierSymbol::LpGt(m) => 1.0 - phi_profile(rho / m),
            MultiplierSymbol::Product(a, b) => a.eval(rho) * b.eval(rho),
        }
    }
}

/// Littlewood-Paley band selector. The scale must be dyadic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Band {
    /// `P_{<= M}`
    Leq(f64),
    /// `P_M`
    At(f64),
    /// `P_{> M}`
    Gt(f64),
    /// `P_{<< M} = P_{<= M/128}`
    Ll(f64),
    /// `P_{>~ M} = P_{> M/128}`
    Gtrsim(f64),
}

pub fn is_dyadic(m: f64) -> bool {
    m > 0.0 && m.is_finite() && m == 2.0f64.powi(m.log2().round() as i32)
}

impl Band {
    fn scale(self) -> f64 {
        match self {
            Band::Leq(m) | Band::At(m) | Band::Gt(m) | Band::Ll(m) | Band::Gtrsim(m) => m,
        }
    }

    fn symbol(self) -> MultiplierSymbol {
        match self {
            Band::Leq(m) => MultiplierSymbol::lp_leq(m),
            Band::At(m) => MultiplierSymbol::lp_psi(m),
            Band::Gt(m) => MultiplierSymbol::lp_gt(m),
            Band::Ll(m) => MultiplierSymbol::lp_ll(m),
            Band::Gtrsim(m) => MultiplierSymbol::lp_gtrsim(m),
        }
    }
}

/// Diagonal application of a symbol: `to_physical(sigma(rho_k) uhat_k)`.
/// Rejects symbols that are not finite on the resolved band.
pub fn apply_multiplier(f: &RadialField, symbol: &MultiplierSymbol) -> Result<RadialField> {
    let hat = to_spectral(f);
    let hat = apply_multiplier_spectral(&hat, symbol)?;
    Ok(to_physical(&hat))
}

/// Same as [`apply_multiplier`] but staying in spectral space.
pub fn apply_multiplier_spectral(
    hat: &SpectralField,
    symbol: &MultiplierSymbol,
) -> Result<SpectralField> {
    let grid = hat.grid().clone();
    let mut coeffs = Vec::with_capacity(grid.n());
    for (k, &c) in hat.coeffs.iter().enumerate() {
        let sigma = symbol.eval(grid.frequency(k));
        if !sigma.is_finite() {
            return Err(Error::SymbolNotFinite {
                rho: grid.frequency(k),
            });
        }
        coeffs.push(sigma * c);
    }
    Ok(SpectralField { grid, coeffs })
}

/// Frequency projection onto the given band.
pub fn lp_project(f: &RadialField, band: Band) -> Result<RadialField> {
    if !is_dyadic(band.scale()) {
        return Err(Error::OutOfRange {
            what: "Littlewood-Paley scale M (dyadic)",
            value: band.scale().to_string(),
        });
    }
    apply_multiplier(f, &band.symbol())
}

/// Dyadic scales whose band bumps are not identically zero on the resolved
/// frequency range of `grid`. Together with the complementary tails they
/// resolve the identity on the band.
pub fn resolved_dyadic_scales(grid: &RadialGrid) -> Vec<f64> {
    let lo = (grid.frequency(0) / 2.0).log2().floor() as i32 - 1;
    let hi = (grid.max_frequency() * 2.0).log2().ceil() as i32 + 1;
    (lo..=hi).map(|e| 2.0f64.powi(e)).collect()
}

/// `d/dr` of a radial field, computed as `(w' r - w)/r^2` with `w = r u` and
/// `w'` from term-by-term differentiation of the sine series.
pub fn radial_derivative(f: &RadialField) -> RadialField {
    let (values, _, _) = radial_derivative_with_ends(f);
    RadialField {
        grid: f.grid.clone(),
        values,
    }
}

/// Derivative values at the interior nodes plus `w'(0)` and `w'(R)`, which the
/// energy quadrature needs for its boundary half-weights.
pub(crate) fn radial_derivative_with_ends(f: &RadialField) -> (Vec<f64>, f64, f64) {
    let grid = &f.grid;
    let n = grid.n();
    let w: Vec<f64> = f
        .values
        .iter()
        .enumerate()
        .map(|(j, &v)| grid.radius(j) * v)
        .collect();
    let s = grid.dst(&w);
    // Synthesis coefficients of w, differentiated: w'(r) = sum c_k rho_k cos(rho_k r).
    let syn = 2.0 / (n + 1) as f64;
    let a: Vec<f64> = s
        .iter()
        .enumerate()
        .map(|(k, &sk)| syn * sk * grid.frequency(k))
        .collect();
    let c = grid.cosine_values(&a);
    let values = (0..n)
        .map(|j| {
            let r = grid.radius(j);
            (c[j + 1] * r - w[j]) / (r * r)
        })
        .collect();
    (values, c[0], c[n + 1])
}

/// `(4 pi int_0^R |f|^p r^2 dr)^(1/p)` by composite trapezoid; `p = inf`
/// gives `max |f|`. Both endpoint contributions vanish (an `r^2` factor at the
/// origin, the Dirichlet convention at `R`).
pub fn lebesgue_norm(f: &RadialField, r_exp: f64) -> f64 {
    if r_exp.is_infinite() {
        return f.values.iter().fold(0.0, |m, v| m.max(v.abs()));
    }
    let grid = &f.grid;
    let sum: f64 = f
        .values
        .iter()
        .enumerate()
        .map(|(j, &v)| {
            let r = grid.radius(j);
            v.abs().powf(r_exp) * r * r
        })
        .sum();
    (4.0 * PI * grid.dr() * sum).powf(1.0 / r_exp)
}

/// L^2 norm of `sigma(rho) uhat` under the discrete Plancherel weight, i.e.
/// `sqrt(drho/(2 pi^2) * sum (sigma_k rho_k uhat_k)^2)`.
pub fn weighted_l2_spectral(hat: &SpectralField, symbol: &MultiplierSymbol) -> Result<f64> {
    let grid = hat.grid();
    let mut sum = 0.0;
    for (k, &c) in hat.coeffs.iter().enumerate() {
        let rho = grid.frequency(k);
        let sigma = symbol.eval(rho);
        if !sigma.is_finite() {
            return Err(Error::SymbolNotFinite { rho });
        }
        let term = sigma * rho * c;
        sum += term * term;
    }
    Ok((grid.drho() / (2.0 * PI * PI) * sum).sqrt())
}

/// Sobolev norm `|| (1+rho)^sigma uhat ||` with the Plancherel weight matching
/// [`lebesgue_norm`] at `sigma = 0`.
pub fn sobolev_norm(f: &RadialField, sigma: f64) -> f64 {
    let hat = to_spectral(f);
    weighted_l2_spectral(&hat, &MultiplierSymbol::bracket_power(sigma))
        .expect("bracket power is finite on the band")
}

/// `u(0)`, by quadratic extrapolation from the three smallest nodes.
pub fn value_at_origin(f: &RadialField) -> f64 {
    let v = &f.values;
    3.0 * v[0] - 3.0 * v[1] + v[2]
}

/// Shared-radius fine grid used to evaluate nonlinearities without aliasing:
/// the coarse spectral band embeds exactly into the fine one.
pub(crate) struct PaddedGrid {
    coarse: Arc<RadialGrid>,
    fine: Arc<RadialGrid>,
}

impl PaddedGrid {
    pub fn new(coarse: Arc<RadialGrid>, pad: usize) -> Result<Self> {
        let pad = pad.max(1);
        let fine_n = pad * (coarse.n() + 1) - 1;
        let fine = if pad == 1 {
            coarse.clone()
        } else {
            // The fine grid size pad*(n+1)-1 is not a power of two; build it
            // directly since it shares every resolved frequency with the
            // coarse grid.
            let fft = FftPlanner::new().plan_fft_forward(2 * (fine_n + 1));
            Arc::new(RadialGrid {
                r_max: coarse.r_max(),
                n: fine_n,
                dr: coarse.r_max() / (fine_n + 1) as f64,
                drho: coarse.drho(),
                fft,
            })
        };
        Ok(PaddedGrid { coarse, fine })
    }

    pub fn coarse(&self) -> &Arc<RadialGrid> {
        &self.coarse
    }

    /// Physical values on the fine grid of the band-limited interpolant of the
    /// given coarse spectrum.
    pub fn upsample(&self, hat: &SpectralField) -> RadialField {
        let mut coeffs = vec![0.0; self.fine.n()];
        coeffs[..self.coarse.n()].copy_from_slice(hat.coeffs());
        to_physical(&SpectralField {
            grid: self.fine.clone(),
            coeffs,
        })
    }

    /// Forward transform on the fine grid, truncated to the coarse band.
    pub fn downsample(&self, fine_values: &RadialField) -> SpectralField {
        let hat = to_spectral(fine_values);
        SpectralField {
            grid: self.coarse.clone(),
            coeffs: hat.coeffs[..self.coarse.n()].to_vec(),
        }
    }

    /// Coarse-band projection of a pointwise map applied on the fine grid.
    pub fn project_pointwise(
        &self,
        hat: &SpectralField,
        map: impl Fn(f64) -> f64,
    ) -> SpectralField {
        let mut fine = self.upsample(hat);
        for v in fine.values_mut() {
            *v = map(*v);
        }
        self.downsample(&fine)
    }
}
