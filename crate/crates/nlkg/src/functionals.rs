//! Energies, mollified energies, mixed space-time norms, Z-norms, and the
//! N-scaling sweeps built on them.
//!
//! The conserved energy of the flow is
//!
//! ```text
//! E(u(t)) = 1/2 |u_t|_2^2 + 1/2 |grad u|_2^2 + 1/2 |u|_2^2 + 1/(p+1) |u|_{p+1}^{p+1}
//! ```
//!
//! For data below `H^1` the energy is infinite, so the diagnostics of interest
//! run through the smoothing multiplier: `E(Iu)` is finite, agrees with `E(u)`
//! once `N` clears the resolved band, and is only *almost* conserved — its
//! drift under the nonlinear flow shrinks as a power of `N`, which the sweep
//! helpers below measure directly.

use rayon::prelude::*;

use crate::data;
use crate::error::{Error, Result};
use crate::exponents;
use crate::propagator::{evolve, EvolutionConfig, State, Trajectory};
use crate::spectral::{
    is_dyadic, lebesgue_norm, radial_derivative_with_ends, sobolev_norm, to_spectral,
    weighted_l2_spectral, MultiplierSymbol, RadialField,
};

/// Smoothing-multiplier parameters: dyadic `N > 1` and `s_c(p) < s < 1`.
#[derive(Clone, Copy, Debug)]
pub struct IMethodParams {
    pub n_freq: f64,
    pub s: f64,
    pub p: f64,
}

impl IMethodParams {
    pub fn new(n_freq: f64, s: f64, p: f64) -> Result<Self> {
        if !(p > 3.0 && p < 5.0) {
            return Err(Error::OutOfRange {
                what: "p (3 < p < 5)",
                value: p.to_string(),
            });
        }
        if !is_dyadic(n_freq) || n_freq <= 1.0 {
            return Err(Error::OutOfRange {
                what: "N (dyadic, > 1)",
                value: n_freq.to_string(),
            });
        }
        let s_c = exponents::critical_regularity(p);
        if !(s > s_c && s < 1.0) {
            return Err(Error::OutOfRange {
                what: "s (s_c(p) < s < 1)",
                value: s.to_string(),
            });
        }
        Ok(IMethodParams { n_freq, s, p })
    }

    pub fn symbol(&self) -> MultiplierSymbol {
        MultiplierSymbol::i_symbol(self.n_freq, self.s)
    }

    /// `I u` for a single field.
    pub fn smooth(&self, f: &RadialField) -> RadialField {
        crate::spectral::apply_multiplier(f, &self.symbol())
            .expect("smoothing symbol is finite")
    }

    /// `I` applied componentwise to a state.
    pub fn smooth_state(&self, st: &State) -> State {
        State {
            u: self.smooth(&st.u),
            ut: self.smooth(&st.ut),
            t: st.t,
        }
    }
}

/// A wave-admissible mixed-norm pair in dimension 3, carrying its scaling
/// level `m`.
#[derive(Clone, Copy, Debug)]
pub struct AdmissiblePair {
    pub q: f64,
    pub r: f64,
    pub m: f64,
}

impl AdmissiblePair {
    pub fn new(q: f64, r: f64) -> Result<Self> {
        let (ok, m) = exponents::is_wave_admissible(q, r, 3);
        if !ok {
            return Err(Error::NotAdmissible { q, r, m });
        }
        Ok(AdmissiblePair { q, r, m })
    }

    /// The pairs the estimates actually lean on: `(inf, 2)`,
    /// `(2/s, 2/(1-s))`, and the interior point `(4, 4)`.
    pub fn default_set(s: f64) -> Vec<AdmissiblePair> {
        let mut pairs = vec![AdmissiblePair::new(f64::INFINITY, 2.0).unwrap()];
        if let Ok(p) = AdmissiblePair::new(2.0 / s, 2.0 / (1.0 - s)) {
            pairs.push(p);
        }
        pairs.push(AdmissiblePair::new(4.0, 4.0).unwrap());
        pairs
    }
}

/// One row of measured functionals at a sample time. Cumulative columns hold
/// running space-time integrals up to `t`.
#[derive(Clone, Copy, Debug)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub e_u: f64,
    pub e_iu: f64,
    pub hs_pair: f64,
    pub origin_value_iu: f64,
    pub morawetz_potential_cum: f64,
    pub origin_term_cum: f64,
    pub r1_cum: f64,
    pub r2_cum: f64,
    pub radial_sobolev_ratio: f64,
}

/// The conserved energy, by radial quadrature; for radial fields
/// `|grad u|^2 = (du/dr)^2`.
pub fn energy(st: &State, p: f64) -> f64 {
    let grid = st.u.grid();
    let dr = grid.dr();
    let (du, _, wp_end) = radial_derivative_with_ends(&st.u);
    let mut kinetic = 0.0;
    let mut gradient = 0.0;
    let mut mass = 0.0;
    let mut potential = 0.0;
    for j in 0..grid.n() {
        let r = grid.radius(j);
        let r2 = r * r;
        let ut = st.ut.values()[j];
        let u = st.u.values()[j];
        kinetic += ut * ut * r2;
        let g = du[j] * r;
        gradient += g * g;
        mass += u * u * r2;
        potential += u.abs().powf(p + 1.0) * r2;
    }
    // (du/dr * r)^2 = (w' - w/r)^2 tends to w'(R)^2 at the Dirichlet end;
    // the half-weight there completes the composite trapezoid.
    gradient += 0.5 * wp_end * wp_end;
    let four_pi_dr = 4.0 * std::f64::consts::PI * dr;
    four_pi_dr * (0.5 * kinetic + 0.5 * gradient + 0.5 * mass + potential / (p + 1.0))
}

/// Quadratic part of the energy, evaluated spectrally (exactly invariant under
/// the free flow).
pub fn quadratic_energy(st: &State) -> f64 {
    let uh = to_spectral(&st.u);
    let uth = to_spectral(&st.ut);
    let h1 = weighted_l2_spectral(&uh, &MultiplierSymbol::Dispersion).unwrap();
    let l2 = weighted_l2_spectral(&uth, &MultiplierSymbol::bracket_power(0.0)).unwrap();
    0.5 * (h1 * h1 + l2 * l2)
}

/// `E(Iu)`: the energy of the componentwise-smoothed state.
pub fn mollified_energy(st: &State, prm: &IMethodParams) -> f64 {
    energy(&prm.smooth_state(st), prm.p)
}

/// `|u|_{H^s} + |u_t|_{H^(s-1)}`.
pub fn hs_pair_norm(st: &State, s: f64) -> f64 {
    sobolev_norm(&st.u, s) + sobolev_norm(&st.ut, s - 1.0)
}

/// Mixed norm `|| g(state) ||_{L_t^q L_x^r}` over the sampled trajectory;
/// the optional transform maps each state to the field being measured
/// (default: `u` itself). Time integration is trapezoid on the sample
/// instants; `q = inf` takes the max.
pub fn spacetime_norm(
    traj: &Trajectory,
    q: f64,
    r: f64,
    transform: Option<&dyn Fn(&State) -> RadialField>,
) -> Result<f64> {
    if traj.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let norms: Vec<f64> = traj
        .states()
        .iter()
        .map(|st| {
            let field = match transform {
                Some(f) => f(st),
                None => st.u.clone(),
            };
            lebesgue_norm(&field, r)
        })
        .collect();
    if q.is_infinite() {
        return Ok(norms.into_iter().fold(0.0, f64::max));
    }
    Ok(time_trapezoid(traj.times(), &norms.iter().map(|a| a.powf(q)).collect::<Vec<_>>())
        .powf(1.0 / q))
}

/// Trapezoid rule on (possibly uneven) sample instants.
pub(crate) fn time_trapezoid(times: &[f64], values: &[f64]) -> f64 {
    times
        .windows(2)
        .zip(values.windows(2))
        .map(|(t, v)| 0.5 * (t[1] - t[0]) * (v[0] + v[1]))
        .sum()
}

/// `Z_{m,s}` over a finite family of m-admissible pairs: the max over pairs of
/// `|| <D>^(-m) I u_t ||_{q,r} + || <D>^(1-m) I u ||_{q,r}`.
pub fn z_norm(
    traj: &Trajectory,
    m: f64,
    prm: &IMethodParams,
    pairs: &[AdmissiblePair],
) -> Result<f64> {
    for pair in pairs {
        if (pair.m - m).abs() > 1e-9 {
            return Err(Error::NotAdmissible {
                q: pair.q,
                r: pair.r,
                m,
            });
        }
    }
    let mut best = 0.0f64;
    for pair in pairs {
        best = best.max(z_pair_norm(traj, pair, prm)?);
    }
    Ok(best)
}

/// The two-term sum of one pair, evaluated at the pair's own scaling level.
pub fn z_pair_norm(traj: &Trajectory, pair: &AdmissiblePair, prm: &IMethodParams) -> Result<f64> {
    let sym_t = MultiplierSymbol::bracket_power(-pair.m).then(prm.symbol());
    let sym_u = MultiplierSymbol::bracket_power(1.0 - pair.m).then(prm.symbol());
    let dt_term = spacetime_norm(
        traj,
        pair.q,
        pair.r,
        Some(&|st: &State| {
            crate::spectral::apply_multiplier(&st.ut, &sym_t).expect("finite symbol")
        }),
    )?;
    let u_term = spacetime_norm(
        traj,
        pair.q,
        pair.r,
        Some(&|st: &State| {
            crate::spectral::apply_multiplier(&st.u, &sym_u).expect("finite symbol")
        }),
    )?;
    Ok(dt_term + u_term)
}

/// Lower bound for the full `sup_m Z_{m,s}`: every pair contributes at its own
/// scaling level.
pub fn z_supremum(traj: &Trajectory, prm: &IMethodParams, pairs: &[AdmissiblePair]) -> Result<f64> {
    let mut best = 0.0f64;
    for pair in pairs {
        best = best.max(z_pair_norm(traj, pair, prm)?);
    }
    Ok(best)
}

/// Fitted scaling of a measured quantity against dyadic `N`.
#[derive(Clone, Debug)]
pub struct SlopeReport {
    pub n_values: Vec<f64>,
    pub values: Vec<f64>,
    /// Least-squares slope in (log2 N, log2 value); `None` when the fit is
    /// degenerate (fewer than two usable points).
    pub slope: Option<f64>,
    /// The exponent the measurement is compared against.
    pub reference: f64,
}

impl SlopeReport {
    /// `slope <= reference` (degenerate zero-slope fits count as within).
    pub fn within_reference(&self) -> bool {
        match self.slope {
            Some(sl) => sl <= self.reference,
            None => true,
        }
    }
}

fn fit_log2_slope(n_values: &[f64], values: &[f64]) -> Option<f64> {
    if n_values.len() < 2 {
        return None;
    }
    // All-equal (including all-zero) measurements: flat by convention.
    let first = values[0];
    if values.iter().all(|&v| v == first) {
        return Some(0.0);
    }
    if values.iter().any(|&v| v <= 0.0) {
        return None;
    }
    let xs: Vec<f64> = n_values.iter().map(|n| n.log2()).collect();
    let ys: Vec<f64> = values.iter().map(|v| v.log2()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Some(sxy / sxx)
}

fn validate_n_list(n_list: &[f64]) -> Result<()> {
    if n_list.is_empty() {
        return Err(Error::OutOfRange {
            what: "N list",
            value: "empty".into(),
        });
    }
    for &n in n_list {
        if !is_dyadic(n) || n <= 1.0 {
            return Err(Error::OutOfRange {
                what: "N (dyadic, > 1)",
                value: n.to_string(),
            });
        }
    }
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::OutOfRange {
            what: "N list (strictly increasing)",
            value: format!("{n_list:?}"),
        });
    }
    Ok(())
}

/// `E(I u_0)` across a dyadic `N` list, with the fitted growth slope compared
/// against the ceiling `2(1-s) + 0.1`.
pub fn initial_mollified_growth(
    data: &State,
    p: f64,
    s: f64,
    n_list: &[f64],
) -> Result<SlopeReport> {
    validate_n_list(n_list)?;
    let values: Vec<f64> = n_list
        .iter()
        .map(|&n| {
            let prm = IMethodParams::new(n, s, p)?;
            Ok(mollified_energy(data, &prm))
        })
        .collect::<Result<_>>()?;
    let slope = fit_log2_slope(n_list, &values);
    Ok(SlopeReport {
        n_values: n_list.to_vec(),
        values,
        slope,
        reference: 2.0 * (1.0 - s) + 0.1,
    })
}

/// Largest excursion of `E(Iu(t))` from its initial value over the sampled
/// trajectory, plus the initial value itself.
pub fn mollified_drift(traj: &Trajectory, prm: &IMethodParams) -> Result<(f64, f64)> {
    let first = traj.first()?;
    let e0 = mollified_energy(first, prm);
    let mut delta = 0.0f64;
    for st in traj.states() {
        delta = delta.max((mollified_energy(st, prm) - e0).abs());
    }
    Ok((delta, e0))
}

/// One point of an almost-conservation sweep.
#[derive(Clone, Copy, Debug)]
pub struct AclPoint {
    pub n_freq: f64,
    /// `sup_t |E(Iu(t)) - E(Iu_0)|`.
    pub delta: f64,
    pub e_iu0: f64,
}

/// Almost-conservation sweep: evolve the same data once per `N` (in parallel)
/// and fit the decay of the mollified-energy drift. The reference exponent is
/// the predicted ceiling `-(5-p)/2`.
pub fn almost_conservation_sweep(
    data: &State,
    p: f64,
    s: f64,
    n_list: &[f64],
    t_final: f64,
    dt: f64,
) -> Result<(Vec<AclPoint>, SlopeReport)> {
    validate_n_list(n_list)?;
    let stride = ((t_final / dt / 400.0).floor() as usize).max(1);
    let cfg = EvolutionConfig {
        p,
        dt,
        t_final,
        sample_stride: stride,
        ..EvolutionConfig::new(p, dt, t_final, 1)?
    };
    let points: Vec<AclPoint> = n_list
        .par_iter()
        .map(|&n| {
            let prm = IMethodParams::new(n, s, p)?;
            let traj = evolve(data, &cfg, |_| {})?;
            let (delta, e_iu0) = mollified_drift(&traj, &prm)?;
            Ok(AclPoint {
                n_freq: n,
                delta,
                e_iu0,
            })
        })
        .collect::<Result<_>>()?;
    let deltas: Vec<f64> = points.iter().map(|pt| pt.delta).collect();
    let slope = fit_log2_slope(n_list, &deltas);
    Ok((
        points,
        SlopeReport {
            n_values: n_list.to_vec(),
            values: deltas,
            slope,
            reference: -(5.0 - p) / 2.0,
        },
    ))
}

/// Convenience: rough seeded data sized for sweep experiments.
pub fn rough_sweep_data(
    grid: std::sync::Arc<crate::spectral::RadialGrid>,
    s: f64,
    amplitude: f64,
    seed: u64,
) -> State {
    data::rough_state(grid, amplitude, s + 1.5, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{band_limited_state, gaussian_state, rough_state};
    use crate::propagator::free_flow;
    use crate::spectral::RadialGrid;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn grid(r: f64, n: usize) -> Arc<RadialGrid> {
        RadialGrid::new(r, n).unwrap()
    }

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
        let h = (b - a) / (2 * panels) as f64;
        let mut sum = f(a) + f(b);
        for i in 1..2 * panels {
            sum += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
        }
        sum * h / 3.0
    }

    #[test]
    fn energy_of_zero_state() {
        let g = grid(20.0, 256);
        assert_eq!(energy(&State::zero(g), 4.0), 0.0);
    }

    #[test]
    fn energy_of_single_mode_matches_closed_form() {
        // On [0, R] the mode sin(rho_k r)/r is a Dirichlet Laplacian
        // eigenfunction, so E_quadratic = 1/2 A^2 (1 + rho_k^2) * 2 pi R.
        let g = grid(20.0, 8192);
        let k = 11usize;
        let rho = g.frequency(k);
        let amp = 1e-3f64;
        let st = State {
            u: RadialField::from_profile(g.clone(), move |r| amp * (rho * r).sin() / r),
            ut: RadialField::zero(g.clone()),
            t: 0.0,
        };
        let closed = 0.5 * amp * amp * (1.0 + rho * rho) * 2.0 * PI * g.r_max();
        let e = energy(&st, 4.0);
        // The |u|^(p+1) part is O(amp^5) and far below the comparison scale.
        assert_relative_eq!(e, closed, max_relative = 1e-8);
    }

    #[test]
    fn energy_of_gaussian_matches_quadrature_oracle() {
        let g = grid(30.0, 4096);
        let st = gaussian_state(g, 1.0, 1.0);
        let p = 4.0;
        let u = |r: f64| (-0.5 * r * r).exp();
        let du = |r: f64| -r * (-0.5 * r * r).exp();
        let oracle = 4.0
            * PI
            * (0.5 * simpson(|r| du(r).powi(2) * r * r, 0.0, 30.0, 20000)
                + 0.5 * simpson(|r| u(r).powi(2) * r * r, 0.0, 30.0, 20000)
                + simpson(|r| u(r).powi(5) * r * r, 0.0, 30.0, 20000) / (p + 1.0));
        assert_relative_eq!(energy(&st, p), oracle, max_relative = 1e-6);
    }

    #[test]
    fn quadratic_energy_is_free_flow_invariant() {
        let g = grid(20.0, 512);
        let st = State {
            u: RadialField::from_profile(g.clone(), |r| (-0.5 * r * r).exp()),
            ut: RadialField::from_profile(g.clone(), |r| 0.4 * (-r * r).exp()),
            t: 0.0,
        };
        let e0 = quadratic_energy(&st);
        for tau in [0.3, 1.7, 6.1] {
            let e = quadratic_energy(&free_flow(&st, tau));
            assert_relative_eq!(e, e0, max_relative = 1e-12);
        }
        // The physical-quadrature energy agrees for smooth contained data.
        let ep0 = energy(&st, 4.0);
        let ep = energy(&free_flow(&st, 1.1), 4.0);
        let quartic_scale = 1e-2; // |u|^5 part, not conserved by the free flow
        assert!((ep - ep0).abs() <= quartic_scale * ep0);
    }

    #[test]
    fn mollified_energy_identity_region_and_zero() {
        let g = grid(20.0, 256);
        let st = State {
            u: RadialField::from_profile(g.clone(), |r| (-0.4 * r * r).exp()),
            ut: RadialField::from_profile(g.clone(), |r| 0.2 * (-r * r).exp()),
            t: 0.0,
        };
        let n_big = 2.0f64.powi(g.max_frequency().log2().ceil() as i32 + 1);
        let prm = IMethodParams::new(n_big, 0.95, 4.0).unwrap();
        assert_relative_eq!(
            mollified_energy(&st, &prm),
            energy(&st, 4.0),
            max_relative = 1e-12
        );
        assert_eq!(mollified_energy(&State::zero(g), &prm), 0.0);
    }

    #[test]
    fn mollified_energy_scales_high_mode_quadratically() {
        let g = grid(16.0, 1024);
        let s = 0.5;
        let k = 511usize;
        let rho = g.frequency(k);
        let n_freq = rho / 4.0; // mode sits at 4N
        let amp = 1e-4f64;
        let st = State {
            u: RadialField::from_profile(g.clone(), move |r| amp * (rho * r).sin() / r),
            ut: RadialField::zero(g),
            t: 0.0,
        };
        let prm = IMethodParams {
            n_freq,
            s,
            p: 4.0,
        };
        let scale = 0.25f64.powf(2.0 * (1.0 - s));
        assert_relative_eq!(
            mollified_energy(&st, &prm),
            scale * energy(&st, 4.0),
            max_relative = 1e-6
        );
    }

    #[test]
    fn hs_pair_norm_examples() {
        let g = grid(16.0, 256);
        assert_eq!(hs_pair_norm(&State::zero(g.clone()), 0.9), 0.0);
        let k = 40usize;
        let rho = g.frequency(k);
        let st = State {
            u: RadialField::from_profile(g.clone(), move |r| (rho * r).sin() / r),
            ut: RadialField::from_profile(g.clone(), move |r| 0.5 * (rho * r).sin() / r),
            t: 0.0,
        };
        let s = 0.8;
        let l2u = sobolev_norm(&st.u, 0.0);
        let l2ut = sobolev_norm(&st.ut, 0.0);
        let expect = (1.0 + rho).powf(s) * l2u + (1.0 + rho).powf(s - 1.0) * l2ut;
        assert_relative_eq!(hs_pair_norm(&st, s), expect, max_relative = 1e-10);
    }

    #[test]
    fn hs_pair_tracks_quadratic_energy_at_low_frequency() {
        // With s = 1 and data far belowrho = 1 the bracket weight and the
        // dispersion weight agree to a few percent, so the pair norm matches
        // sqrt(2 E_quadratic) within 5%.
        let g = grid(400.0, 512);
        let st = band_limited_state(g, 1.0, 0.03125);
        let pair = hs_pair_norm(&st, 1.0);
        let via_energy = {
            let e = quadratic_energy(&st);
            let u_part = sobolev_norm(&st.u, 0.0);
            let _ = u_part;
            (2.0 * e).sqrt()
        };
        // Sum-of-norms vs root-of-sum-of-squares: compare per component.
        let h1 = {
            let hat = to_spectral(&st.u);
            weighted_l2_spectral(&hat, &MultiplierSymbol::Dispersion).unwrap()
        };
        let l2t = sobolev_norm(&st.ut, 0.0);
        assert!((via_energy.powi(2) - (h1 * h1 + l2t * l2t)).abs() <= 1e-10 * via_energy.powi(2));
        let sum_true = h1 + l2t;
        assert!(
            (pair - sum_true).abs() <= 0.05 * sum_true,
            "pair = {pair}, true-weight sum = {sum_true}"
        );
    }

    #[test]
    fn spacetime_norm_reductions() {
        let g = grid(15.0, 128);
        let cfg = EvolutionConfig::new(4.0, 0.01, 1.0, 10).unwrap();
        let zero = evolve(&State::zero(g.clone()), &cfg, |_| {}).unwrap();
        assert_eq!(spacetime_norm(&zero, 4.0, 4.0, None).unwrap(), 0.0);

        // Free single mode at (inf, 2): the constant L^2 norm.
        let k = 9usize;
        let rho = g.frequency(k);
        let mut lincfg = cfg.clone();
        lincfg.linear_only = true;
        let st = State {
            u: RadialField::from_profile(g.clone(), move |r| (rho * r).sin() / r),
            ut: RadialField::zero(g.clone()),
            t: 0.0,
        };
        let traj = evolve(&st, &lincfg, |_| {}).unwrap();
        let sup = spacetime_norm(
            &traj,
            f64::INFINITY,
            2.0,
            Some(&|s: &State| {
                // modulus of the complex half-wave orbit of the pair
                let u2 = s.u.values().iter().map(|v| v * v);
                let g = s.u.grid().clone();
                let omega = (1.0 + rho * rho).sqrt();
                let ut2 = s.ut.values().iter().map(move |v| (v / omega) * (v / omega));
                RadialField::new(g, u2.zip(ut2).map(|(a, b)| (a + b).sqrt()).collect()).unwrap()
            }),
        )
        .unwrap();
        let l2 = sobolev_norm(&st.u, 0.0);
        assert_relative_eq!(sup, l2, max_relative = 1e-10);
    }

    #[test]
    fn spacetime_norm_free_gaussian_tail_increments_decay() {
        let g = grid(60.0, 1024);
        let mut cfg = EvolutionConfig::new(4.0, 0.02, 20.0, 10).unwrap();
        cfg.linear_only = true;
        let st = gaussian_state(g, 1.0, 1.0);
        let traj = evolve(&st, &cfg, |_| {}).unwrap();
        let q = 6.0;
        // L^6_{t,x} accumulated over successive windows: increments shrink.
        let windows = [(0.0, 5.0), (5.0, 10.0), (10.0, 15.0), (15.0, 20.0)];
        let mut increments = Vec::new();
        for (a, b) in windows {
            let ia = traj.index_of(a).unwrap();
            let ib = traj.index_of(b).unwrap();
            let vals: Vec<f64> = traj.states()[ia..=ib]
                .iter()
                .map(|s| lebesgue_norm(&s.u, q).powf(q))
                .collect();
            increments.push(time_trapezoid(&traj.times()[ia..=ib], &vals));
        }
        assert!(increments[0] > increments[1]);
        assert!(increments[1] > increments[2]);
        assert!(increments[2] > increments[3]);
    }

    #[test]
    fn z_norm_single_pair_reduction_and_monotonicity() {
        let g = grid(15.0, 128);
        let cfg = EvolutionConfig::new(4.0, 0.01, 0.5, 5).unwrap();
        let st = State {
            u: RadialField::from_profile(g.clone(), |r| (-0.5 * r * r).exp()),
            ut: RadialField::from_profile(g.clone(), |r| 0.3 * (-r * r).exp()),
            t: 0.0,
        };
        let traj = evolve(&st, &cfg, |_| {}).unwrap();
        let prm = IMethodParams::new(4.0, 0.95, 4.0).unwrap();

        let zero = evolve(&State::zero(g), &cfg, |_| {}).unwrap();
        let pair_inf = AdmissiblePair::new(f64::INFINITY, 2.0).unwrap();
        assert_eq!(z_norm(&zero, 0.0, &prm, &[pair_inf]).unwrap(), 0.0);

        // Single-pair reduction at m = 0: each term is its own sup in time.
        let z = z_norm(&traj, 0.0, &prm, &[pair_inf]).unwrap();
        let sym_u = MultiplierSymbol::bracket_power(1.0).then(prm.symbol());
        let mut sup_t1 = 0.0f64;
        let mut sup_t2 = 0.0f64;
        for s in traj.states() {
            sup_t1 = sup_t1.max(sobolev_norm(&prm.smooth(&s.ut), 0.0));
            let iu = crate::spectral::apply_multiplier(&s.u, &sym_u).unwrap();
            sup_t2 = sup_t2.max(sobolev_norm(&iu, 0.0));
        }
        assert_relative_eq!(z, sup_t1 + sup_t2, max_relative = 1e-8);

        // Enlarging the family never decreases the sup.
        let more = z_supremum(&traj, &prm, &AdmissiblePair::default_set(0.95)).unwrap();
        let fewer = z_supremum(&traj, &prm, &[pair_inf]).unwrap();
        assert!(more >= fewer);

        // Mismatched scaling level is rejected.
        assert!(z_norm(&traj, 0.5, &prm, &[pair_inf]).is_err());
    }

    #[test]
    fn initial_growth_band_limited_is_flat() {
        let g = grid(20.0, 512);
        let st = band_limited_state(g, 1.0, 2.0);
        let report = initial_mollified_growth(&st, 4.0, 0.95, &[4.0, 8.0, 16.0, 32.0]).unwrap();
        let sl = report.slope.unwrap();
        assert!(sl.abs() < 1e-9, "slope = {sl}");
        assert!(report.within_reference());
    }

    #[test]
    fn initial_growth_zero_data_reports_zeros() {
        let g = grid(20.0, 256);
        let report =
            initial_mollified_growth(&State::zero(g), 4.0, 0.95, &[4.0, 8.0, 16.0]).unwrap();
        assert!(report.values.iter().all(|&v| v == 0.0));
        assert_eq!(report.slope, Some(0.0));
    }

    #[test]
    fn initial_growth_rough_data_within_bound() {
        let g = grid(25.0, 2048);
        let s = 0.95;
        let st = rough_state(g, 2.0, s + 1.5, 11);
        let report =
            initial_mollified_growth(&st, 4.0, s, &[4.0, 8.0, 16.0, 32.0, 64.0]).unwrap();
        let sl = report.slope.unwrap();
        assert!(sl > 0.0, "slope = {sl}");
        assert!(sl <= 2.0 * (1.0 - s) + 0.1, "slope = {sl}");
    }

    #[test]
    fn n_list_validation() {
        let g = grid(20.0, 256);
        let st = State::zero(g);
        assert!(initial_mollified_growth(&st, 4.0, 0.95, &[3.0, 8.0]).is_err());
        assert!(initial_mollified_growth(&st, 4.0, 0.95, &[8.0, 4.0]).is_err());
        assert!(initial_mollified_growth(&st, 4.0, 0.95, &[]).is_err());
    }

    #[test]
    fn acl_sweep_zero_and_band_limited_floor() {
        let g = grid(20.0, 256);
        let (points, report) =
            almost_conservation_sweep(&State::zero(g.clone()), 4.0, 0.95, &[4.0, 8.0], 0.5, 0.01)
                .unwrap();
        assert!(points.iter().all(|pt| pt.delta == 0.0));
        assert_eq!(report.slope, Some(0.0));
    }

    use crate::spectral::{to_spectral, weighted_l2_spectral};
}
