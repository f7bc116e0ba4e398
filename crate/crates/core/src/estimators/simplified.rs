//! Holevo quantity of the simplified channel as a function of the control.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use super::holevo::{holevo_chi, Ensemble};
use super::montecarlo::{run_batched, Estimate};
use crate::channels::SimplifiedChannelSpec;
use crate::entropy::h2;
use crate::error::{Error, Result};
use crate::states::StateVector;

/// Minimum number of grid points for a scan.
pub const MIN_RESOLUTION: usize = 64;

/// `χ = ½ Σ_b [1 − h₂((1 − q_b)/2)]`, `q_b` the pass probability in basis `b`.
///
/// Each basis branch is a partially depolarizing channel with known
/// strength; an orthogonal data pair is Holevo-optimal for it.
pub fn simplified_chi(spec: &SimplifiedChannelSpec, control: &StateVector) -> Result<f64> {
    if control.dim() != 2 {
        return Err(Error::shape("control must be a qubit"));
    }
    let mut chi = 0.0;
    for b in 0..2 {
        let q = spec.pass_probability(b, control).clamp(0.0, 1.0);
        chi += 0.5 * (1.0 - h2((1.0 - q) / 2.0));
    }
    Ok(chi)
}

/// χ for one basis choice, from the Kraus form and density matrices.
fn branch_chi(spec: &SimplifiedChannelSpec, b: usize, control: &StateVector) -> Result<f64> {
    let channel = spec.fixed_basis_channel(b)?;
    let control = control.projector();
    let items = (0..2)
        .map(|x| Ok((0.5, control.tensor(&StateVector::basis(2, x).projector())?)))
        .collect::<Result<Vec<_>>>()?;
    holevo_chi(&channel, &Ensemble::new(items)?)
}

/// Flag-aware Monte Carlo: each sample draws the announced basis and
/// scores the exact density-matrix χ of that branch.
pub fn simplified_chi_mc(
    spec: &SimplifiedChannelSpec,
    control: &StateVector,
    samples: usize,
    seed: u64,
    workers: Option<usize>,
) -> Result<Estimate> {
    let per_basis = [branch_chi(spec, 0, control)?, branch_chi(spec, 1, control)?];
    let run = run_batched("C_H", samples, seed, workers, |rng| {
        Ok(per_basis[rng.index(2)])
    })?;
    Ok(run.estimate)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    /// Bloch angle in the plane of both bases' eigenstates; t = 0 is the
    /// first eigenstate of the first basis.
    pub t: f64,
    pub chi: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub t: f64,
    pub closed_form: f64,
    pub monte_carlo: Estimate,
    pub agrees: bool,
}

/// Reported when the eigenstate control is not the maximiser.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub message: String,
    pub eigenstate_chi: f64,
    pub max_chi: f64,
    pub argmax_t: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiScan {
    pub curve: Vec<CurvePoint>,
    pub argmax_t: f64,
    pub max_chi: f64,
    pub argmax_state: StateVector,
    pub eigenstate_chi: f64,
    pub cross_checks: Vec<CrossCheck>,
    pub finding: Option<Finding>,
}

/// Control states in the great circle through the eigenstates of both
/// bases. For non-default bases the circle is spanned by the first
/// eigenvector of basis 0 and the component of basis 1's first eigenvector
/// orthogonal to it.
fn circle_state(spec: &SimplifiedChannelSpec, t: f64) -> StateVector {
    let a = spec.basis(0).vector(0);
    let e = spec.basis(1).vector(0);
    let ov = a.inner(e);
    // Gram–Schmidt, then fix the phase so that t = π/2 hits e
    let mut perp: Vec<_> = e
        .amplitudes()
        .iter()
        .zip(a.amplitudes())
        .map(|(x, y)| x - y * ov)
        .collect();
    let norm = perp.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let phase = if ov.norm() > 0.0 {
        ov / ov.norm()
    } else {
        1.0.into()
    };
    for z in &mut perp {
        *z /= norm * phase;
    }
    let (c, s) = ((t / 2.0).cos(), (t / 2.0).sin());
    let amps = a
        .amplitudes()
        .iter()
        .zip(&perp)
        .map(|(x, y)| x * c + y * s)
        .collect();
    StateVector::normalized(amps).expect("unit combination of orthonormal vectors")
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

/// Scans χ over the great circle with `resolution` points, refines the
/// maximum, and cross-checks three points against [`simplified_chi_mc`].
pub fn simplified_chi_scan(
    spec: &SimplifiedChannelSpec,
    resolution: usize,
    mc_samples: usize,
    seed: u64,
    workers: Option<usize>,
) -> Result<ChiScan> {
    if resolution < MIN_RESOLUTION {
        return Err(Error::domain(format!(
            "resolution must be at least {MIN_RESOLUTION}"
        )));
    }
    let chi_at = |t: f64| simplified_chi(spec, &circle_state(spec, t));
    let curve = (0..resolution)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / resolution as f64;
            Ok(CurvePoint { t, chi: chi_at(t)? })
        })
        .collect::<Result<Vec<_>>>()?;
    let best = curve
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.chi.total_cmp(&b.1.chi))
        .map(|(i, _)| i)
        .expect("non-empty curve");
    let step = 2.0 * PI / resolution as f64;
    let centre = curve[best].t;
    let argmax_t = golden_max(
        |t| chi_at(t).unwrap_or(f64::NEG_INFINITY),
        centre - step,
        centre + step,
        1e-10,
    )
    .rem_euclid(2.0 * PI);
    let max_chi = chi_at(argmax_t)?.max(curve[best].chi);

    // the eigenstate control that leaves basis 0 untouched
    let safe0 = spec.safe_outcome(0);
    let eigenstate = spec.basis(0).vector(safe0).clone();
    let eigenstate_chi = simplified_chi(spec, &eigenstate)?;

    let points = [
        (0.0, circle_state(spec, 0.0)),
        (argmax_t, circle_state(spec, argmax_t)),
        (PI, circle_state(spec, PI)),
    ];
    let cross_checks = points
        .iter()
        .enumerate()
        .map(|(k, (t, state))| {
            let closed_form = simplified_chi(spec, state)?;
            let mc = simplified_chi_mc(
                spec,
                state,
                mc_samples,
                seed.wrapping_add(k as u64),
                workers,
            )?;
            // 1e-12 floor: at points where both branches give the same χ
            // the sample variance is exactly zero
            let agrees = (mc.mean - closed_form).abs() <= 3.0 * mc.stderr + 1e-12;
            Ok(CrossCheck {
                t: *t,
                closed_form,
                monte_carlo: mc,
                agrees,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let finding = (max_chi > eigenstate_chi + 1e-9).then(|| Finding {
        message: format!(
            "maximum χ = {max_chi:.6} at t = {argmax_t:.6} exceeds the basis-eigenstate value {eigenstate_chi:.6}; \
             the eigenstate is not the maximiser under this channel model"
        ),
        eigenstate_chi,
        max_chi,
        argmax_t,
    });
    Ok(ChiScan {
        curve,
        argmax_t,
        max_chi,
        argmax_state: circle_state(spec, argmax_t),
        eigenstate_chi,
        cross_checks,
        finding,
    })
}

/// Reflection exchanging the roles of the two bases on the default circle.
pub fn basis_swap_reflection(t: f64) -> f64 {
    FRAC_PI_2 - t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::binary_entropy;
    use std::f64::consts::FRAC_PI_4;

    fn eigenstate_value() -> f64 {
        0.5 + 0.5 * (1.0 - binary_entropy(0.25).unwrap())
    }

    #[test]
    fn eigenstate_and_plus_controls() {
        let spec = SimplifiedChannelSpec::default();
        let target = eigenstate_value();
        assert!((target - 0.594361).abs() < 1e-6);
        let zero = simplified_chi(&spec, &StateVector::basis(2, 0)).unwrap();
        let plus = simplified_chi(&spec, &StateVector::qubit_xz(FRAC_PI_2)).unwrap();
        assert!((zero - target).abs() < 1e-15);
        assert!((plus - target).abs() < 1e-12);
    }

    #[test]
    fn one_control_depends_on_trigger_convention() {
        // |1⟩ is the Z trigger by default: Z branch fully depolarizes
        let spec = SimplifiedChannelSpec::default();
        let one = StateVector::basis(2, 1);
        let v = simplified_chi(&spec, &one).unwrap();
        assert!((v - 0.5 * (1.0 - binary_entropy(0.25).unwrap())).abs() < 1e-12);
        // with the Z trigger moved to |0⟩, |1⟩ becomes the safe eigenstate
        let swapped = spec.with_triggers([0, 1]).unwrap();
        let v = simplified_chi(&swapped, &one).unwrap();
        assert!((v - eigenstate_value()).abs() < 1e-12);
    }

    #[test]
    fn closed_form_matches_density_matrix_branches() {
        let spec = SimplifiedChannelSpec::default();
        for i in 0..32 {
            let psi = StateVector::qubit_xz(i as f64 * PI / 16.0);
            let closed = simplified_chi(&spec, &psi).unwrap();
            let exact =
                0.5 * (branch_chi(&spec, 0, &psi).unwrap() + branch_chi(&spec, 1, &psi).unwrap());
            assert!((closed - exact).abs() < 1e-9);
        }
    }

    #[test]
    fn default_circle_is_the_xz_circle() {
        let spec = SimplifiedChannelSpec::default();
        for i in 0..16 {
            let t = i as f64 * 0.4;
            let a = circle_state(&spec, t);
            assert!((a.overlap(&StateVector::qubit_xz(t)) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn scan_reports_off_eigenstate_maximum() {
        let spec = SimplifiedChannelSpec::default();
        let scan = simplified_chi_scan(&spec, 256, 20_000, 4, None).unwrap();
        assert_eq!(scan.curve.len(), 256);
        assert!((scan.curve[0].chi - eigenstate_value()).abs() < 1e-12);
        assert!((scan.eigenstate_chi - eigenstate_value()).abs() < 1e-12);
        // oracle: dense grid of the pass-probability formula on the x–z circle
        let chi = |t: f64| {
            let qz = (t / 2.0).cos().powi(2);
            let qx = ((t - FRAC_PI_2) / 2.0).cos().powi(2);
            0.5 * (2.0
                - binary_entropy((1.0 - qz) / 2.0).unwrap()
                - binary_entropy((1.0 - qx) / 2.0).unwrap())
        };
        let (mut best_t, mut best) = (0.0, f64::MIN);
        for i in 0..400_000 {
            let t = 2.0 * PI * i as f64 / 400_000.0;
            if chi(t) > best {
                best = chi(t);
                best_t = t;
            }
        }
        assert!((scan.max_chi - best).abs() < 1e-9);
        assert!((scan.max_chi - 0.622414).abs() < 1e-6);
        // two maxima mirrored about the midway point, which is a saddle
        let mirrored = basis_swap_reflection(best_t).rem_euclid(2.0 * PI);
        let near = |a: f64, b: f64| (a - b).abs() < 1e-4;
        assert!(near(scan.argmax_t, best_t) || near(scan.argmax_t, mirrored));
        assert!(chi(FRAC_PI_4) < scan.max_chi - 1e-4);
        let finding = scan.finding.expect("discrepancy is flagged");
        assert!(finding.max_chi > finding.eigenstate_chi);
        assert!(scan.cross_checks.iter().all(|c| c.agrees));
    }

    #[test]
    fn curve_symmetric_under_basis_swap() {
        let spec = SimplifiedChannelSpec::default();
        for i in 0..100 {
            let t = i as f64 * 0.0628;
            let a = simplified_chi(&spec, &StateVector::qubit_xz(t)).unwrap();
            let b =
                simplified_chi(&spec, &StateVector::qubit_xz(basis_swap_reflection(t))).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn low_resolution_rejected() {
        let spec = SimplifiedChannelSpec::default();
        assert!(simplified_chi_scan(&spec, 63, 1000, 0, None).is_err());
    }
}
