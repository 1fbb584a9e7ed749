use num_complex::Complex64 as C64;

use super::params::DeviceParams;
use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::operators::{apply_function_to_hermitian, destroy, eigvals_hermitian, OperatorMatrix};

/// Smallest fluxonium truncation accepted; below this the low levels are not converged.
pub const MIN_FLUXONIUM_DIM: usize = 20;
pub const DEFAULT_FLUXONIUM_DIM: usize = 40;

/// Phase and charge operators of an (E_C, E_L) oscillator in its own number basis.
#[derive(Debug, Clone)]
pub struct OscillatorBasis {
    pub phi: OperatorMatrix,
    pub n: OperatorMatrix,
    pub phi_zpf: f64,
    pub n_zpf: f64,
}

impl OscillatorBasis {
    pub fn new(ec_ghz: f64, el_ghz: f64, dim: usize) -> Result<Self> {
        require_positive("ec_ghz", ec_ghz)?;
        require_positive("el_ghz", el_ghz)?;
        let a = destroy(dim)?;
        let ad = a.adjoint();
        let phi_zpf = (2.0 * ec_ghz / el_ghz).powf(0.25);
        let n_zpf = (el_ghz / (32.0 * ec_ghz)).powf(0.25);
        let phi = (&a + &ad).scale_real(phi_zpf);
        let n = (&ad - &a).scale(C64::new(0.0, n_zpf));
        Ok(Self {
            phi,
            n,
            phi_zpf,
            n_zpf,
        })
    }

    /// 4 E_C n² + ½ E_L φ² = ω (a†a + ½), written diagonally; squaring the
    /// truncated φ and n would misplace the top level.
    pub fn quadratic_hamiltonian(&self, ec_ghz: f64, el_ghz: f64) -> OperatorMatrix {
        let w = (8.0 * ec_ghz * el_ghz).sqrt();
        let diag: Vec<f64> = (0..self.phi.dim()).map(|k| w * (k as f64 + 0.5)).collect();
        OperatorMatrix::from_real_diagonal(&diag, "harmonic")
    }
}

/// Fluxonium Hamiltonian without the ground-energy shift, plus its phase operator.
/// No truncation floor here; the product-space builder allows small test instances.
pub(crate) fn fluxonium_parts(params: &DeviceParams, dim: usize) -> Result<(OperatorMatrix, OscillatorBasis)> {
    let f = &params.fluxonium;
    require_positive("fluxonium.ec_ghz", f.ec_ghz)?;
    require_positive("fluxonium.el_ghz", f.el_ghz)?;
    require_non_negative("fluxonium.ej_ghz", f.ej_ghz)?;
    let osc = OscillatorBasis::new(f.ec_ghz, f.el_ghz, dim)?;
    let mut h = osc.quadratic_hamiltonian(f.ec_ghz, f.el_ghz);
    if f.ej_ghz != 0.0 {
        let phi_ext = params.flux.phi_ext_f;
        let cos_term = apply_function_to_hermitian(&osc.phi, |x| (x - phi_ext).cos())?;
        h.add_scaled(&cos_term, C64::new(-f.ej_ghz, 0.0));
    }
    Ok((h.with_label("fluxonium-harmonic"), osc))
}

/// 4E_C n² + ½E_L φ² − E_J cos(φ − φ_ext) in the harmonic basis of the
/// (E_C, E_L) oscillator, shifted so the ground energy is zero. GHz.
pub fn fluxonium_hamiltonian(params: &DeviceParams, dim: usize) -> Result<OperatorMatrix> {
    if dim < MIN_FLUXONIUM_DIM {
        return Err(Error::InvalidDimension {
            dim,
            reason: "fluxonium truncation must be at least 20 levels",
        });
    }
    let (mut h, _) = fluxonium_parts(params, dim)?;
    let e0 = eigvals_hermitian(&h)?[0];
    for i in 0..dim {
        h[(i, i)] -= e0;
    }
    Ok(h)
}

/// Fluxonium energy levels relative to the ground state, GHz.
pub fn fluxonium_levels(params: &DeviceParams, dim: usize) -> Result<Vec<f64>> {
    let h = fluxonium_hamiltonian(params, dim)?;
    let mut levels = eigvals_hermitian(&h)?;
    let e0 = levels[0];
    for l in &mut levels {
        *l -= e0;
    }
    Ok(levels)
}

/// Frequency of the fluxonium transition `from -> to`, GHz.
pub fn fluxonium_transition(params: &DeviceParams, dim: usize, from: usize, to: usize) -> Result<f64> {
    let levels = fluxonium_levels(params, dim)?;
    let get = |k: usize| {
        levels.get(k).copied().ok_or(Error::InvalidDimension {
            dim,
            reason: "transition level above truncation",
        })
    };
    Ok(get(to)? - get(from)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn at_half_flux(mut p: DeviceParams) -> DeviceParams {
        p.flux.phi_ext_f = PI;
        p
    }

    #[test]
    fn hamiltonian_is_hermitian_with_zero_ground() {
        let p = DeviceParams::table1();
        let h = fluxonium_hamiltonian(&p, 40).unwrap();
        assert!(h.hermiticity_error() < 1e-10 * h.frobenius_norm());
        let ev = eigvals_hermitian(&h).unwrap();
        assert!(ev[0].abs() < 1e-10);
    }

    #[test]
    fn qubit_frequency_at_half_flux() {
        let p = at_half_flux(DeviceParams::table1());
        let wq = fluxonium_transition(&p, 40, 0, 1).unwrap();
        // rounded table inputs give 66.37 MHz; the quoted 81 MHz is the dressed value
        assert!((wq * 1e3 - 81.0).abs() <= 0.2 * 81.0, "omega_q = {} MHz", wq * 1e3);
        assert!((wq * 1e3 - 66.365).abs() < 0.01);
    }

    #[test]
    fn operating_flux_equals_half_flux() {
        let p = DeviceParams::table1();
        let a = fluxonium_transition(&p, 40, 0, 1).unwrap();
        let b = fluxonium_transition(&at_half_flux(p), 40, 0, 1).unwrap();
        assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn harmonic_limit() {
        let mut p = DeviceParams::table1();
        p.fluxonium.ej_ghz = 0.0;
        let levels = fluxonium_levels(&p, 30).unwrap();
        let w = (8.0 * p.fluxonium.ec_ghz * p.fluxonium.el_ghz).sqrt();
        assert!((levels[1] - w).abs() < 1e-10);
        assert!((levels[2] - 2.0 * w).abs() < 1e-10);
    }

    #[test]
    fn truncation_floor() {
        let p = DeviceParams::table1();
        assert!(matches!(fluxonium_hamiltonian(&p, 19), Err(Error::InvalidDimension { dim: 19, .. })));
    }

    #[test]
    fn rejects_non_positive_energies() {
        let mut p = DeviceParams::table1();
        p.fluxonium.el_ghz = 0.0;
        assert!(matches!(fluxonium_hamiltonian(&p, 40), Err(Error::InvalidParameter { .. })));
    }

    #[test]
    fn oscillator_zero_point_product() {
        let osc = OscillatorBasis::new(0.89, 0.47, 10).unwrap();
        assert!((osc.phi_zpf * osc.n_zpf - 0.5).abs() < 1e-14);
        // [φ, n] = i on the untruncated block
        let comm = osc.phi.commutator(&osc.n);
        for k in 0..9 {
            assert!((comm[(k, k)] - C64::new(0.0, 1.0)).norm() < 1e-12);
        }
    }
}
