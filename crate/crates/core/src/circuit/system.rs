//! Fluxonium ⊗ SNAIL ⊗ resonator Hamiltonian, its dressed spectrum and the
//! quantities read off it.

use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::fluxonium::{fluxonium_parts, OscillatorBasis, DEFAULT_FLUXONIUM_DIM};
use super::params::DeviceParams;
use super::snail::{resolve_c3, C3Source};
use crate::error::{Error, LabelingError, Result};
use crate::operators::{eig_hermitian, eigvals_hermitian, inner, HermitianEigen, OperatorMatrix};
use crate::units::mhz_to_ghz;

pub const DEFAULT_DIMENSION_CAP: usize = 20_000;
/// Minimum overlap |⟨bare|dressed⟩|² for a label to count.
pub const LABEL_THRESHOLD: f64 = 0.4;
pub const DEFAULT_LABELED_STATES: usize = 8;

/// Per-mode truncations (d_f, d_s, d_r).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Truncation {
    pub fluxonium: usize,
    pub snail: usize,
    pub resonator: usize,
}

impl Truncation {
    pub const fn new(fluxonium: usize, snail: usize, resonator: usize) -> Self {
        Self {
            fluxonium,
            snail,
            resonator,
        }
    }

    pub fn product(&self) -> usize {
        self.fluxonium.saturating_mul(self.snail).saturating_mul(self.resonator)
    }

    pub fn as_array(&self) -> [usize; 3] {
        [self.fluxonium, self.snail, self.resonator]
    }

    pub fn validate(&self, cap: usize) -> Result<()> {
        for d in self.as_array() {
            if d < 3 {
                return Err(Error::InvalidDimension {
                    dim: d,
                    reason: "each mode truncation must be at least 3",
                });
            }
        }
        let dim = self.product();
        if dim > cap {
            return Err(Error::DimensionOverflow { dim, cap });
        }
        Ok(())
    }
}

impl Default for Truncation {
    fn default() -> Self {
        Self::new(DEFAULT_FLUXONIUM_DIM, 10, 5)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SystemOptions {
    pub dims: Truncation,
    pub dimension_cap: usize,
    pub c3_source: C3Source,
}

impl Default for SystemOptions {
    fn default() -> Self {
        Self {
            dims: Truncation::default(),
            dimension_cap: DEFAULT_DIMENSION_CAP,
            c3_source: C3Source::Table,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Fluxonium,
    Snail,
    Resonator,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Fluxonium, Mode::Snail, Mode::Resonator];

    fn index(self) -> usize {
        self as usize
    }
}

/// Operators of one mode in its own truncated harmonic basis, plus its bare eigenbasis.
#[derive(Debug, Clone)]
pub struct ModeOperators {
    pub phi: OperatorMatrix,
    pub n: OperatorMatrix,
    pub hamiltonian: OperatorMatrix,
    pub bare: HermitianEigen,
}

impl ModeOperators {
    fn new(hamiltonian: OperatorMatrix, osc: OscillatorBasis) -> Result<Self> {
        let bare = eig_hermitian(&hamiltonian)?;
        Ok(Self {
            phi: osc.phi,
            n: osc.n,
            hamiltonian,
            bare,
        })
    }

    /// Bare excitation energies relative to the mode ground state, GHz.
    pub fn levels(&self) -> Vec<f64> {
        let e0 = self.bare.values[0];
        self.bare.values.iter().map(|e| e - e0).collect()
    }
}

/// Product-space Hamiltonian together with the pieces it was assembled from.
#[derive(Debug, Clone)]
pub struct SystemHamiltonian {
    pub matrix: OperatorMatrix,
    pub dims: Truncation,
    /// Mode-level cubic coefficient actually used, MHz.
    pub c3_mhz: f64,
    modes: [ModeOperators; 3],
}

impl SystemHamiltonian {
    pub fn mode(&self, mode: Mode) -> &ModeOperators {
        &self.modes[mode.index()]
    }
}

/// h += coeff · (a ⊗ b ⊗ c), skipping zero factors.
fn add_kron3(h: &mut OperatorMatrix, coeff: f64, a: &OperatorMatrix, b: &OperatorMatrix, c: &OperatorMatrix) {
    let (db, dc) = (b.dim(), c.dim());
    let nz = |m: &OperatorMatrix| -> Vec<(usize, usize, C64)> {
        let d = m.dim();
        (0..d * d)
            .filter_map(|k| {
                let v = m.entries()[k];
                (v != C64::new(0.0, 0.0)).then_some((k / d, k % d, v))
            })
            .collect()
    };
    let (na, nb, nc) = (nz(a), nz(b), nz(c));
    for &(i, j, va) in &na {
        let va = va * coeff;
        for &(k, l, vb) in &nb {
            let vab = va * vb;
            for &(m, n, vc) in &nc {
                let row = (i * db + k) * dc + m;
                let col = (j * db + l) * dc + n;
                h[(row, col)] += vab * vc;
            }
        }
    }
}

fn mode_operators(params: &DeviceParams, dims: Truncation, c3_mhz: f64) -> Result<[ModeOperators; 3]> {
    let (hf, osc_f) = fluxonium_parts(params, dims.fluxonium)?;

    let s = &params.snail;
    let osc_s = OscillatorBasis::new(s.ec_ghz, s.el_ghz, dims.snail)?;
    let mut hs = osc_s.quadratic_hamiltonian(s.ec_ghz, s.el_ghz);
    if c3_mhz != 0.0 {
        let phi3 = osc_s.phi.powi(3);
        hs.add_scaled(&phi3, C64::new(mhz_to_ghz(c3_mhz), 0.0));
    }

    let (ec_r, el_r) = (params.resonator_ec_ghz(), params.resonator_el_ghz());
    let osc_r = OscillatorBasis::new(ec_r, el_r, dims.resonator)?;
    let hr = osc_r.quadratic_hamiltonian(ec_r, el_r);

    Ok([
        ModeOperators::new(hf.with_label("f"), osc_f)?,
        ModeOperators::new(hs.with_label("s"), osc_s)?,
        ModeOperators::new(hr.with_label("r"), osc_r)?,
    ])
}

/// Assembles the full system Hamiltonian (GHz) with the options' c3 source.
pub fn build_system(params: &DeviceParams, options: &SystemOptions) -> Result<SystemHamiltonian> {
    params.validate()?;
    let dims = options.dims;
    dims.validate(options.dimension_cap)?;
    let c3_mhz = resolve_c3(params, options.c3_source)?;
    let modes = mode_operators(params, dims, c3_mhz)?;

    let [f, s, r] = &modes;
    let (i_f, i_s, i_r) = (
        OperatorMatrix::identity(dims.fluxonium, "f"),
        OperatorMatrix::identity(dims.snail, "s"),
        OperatorMatrix::identity(dims.resonator, "r"),
    );
    let mut h = OperatorMatrix::zeros(dims.product(), "f⊗s⊗r");
    add_kron3(&mut h, 1.0, &f.hamiltonian, &i_s, &i_r);
    add_kron3(&mut h, 1.0, &i_f, &s.hamiltonian, &i_r);
    add_kron3(&mut h, 1.0, &i_f, &i_s, &r.hamiltonian);
    let g_fs = mhz_to_ghz(params.coupling.g_fs_mhz);
    if g_fs != 0.0 {
        add_kron3(&mut h, g_fs, &f.phi, &s.phi, &i_r);
    }
    let g_sr = mhz_to_ghz(params.coupling.g_sr_mhz);
    if g_sr != 0.0 {
        add_kron3(&mut h, g_sr, &i_f, &s.n, &r.n);
    }
    h.ensure_hermitian()?;
    Ok(SystemHamiltonian {
        matrix: h,
        dims,
        c3_mhz,
        modes,
    })
}

/// System Hamiltonian matrix for the given truncations, c3 taken from the parameters.
pub fn build_system_hamiltonian(params: &DeviceParams, dims: Truncation) -> Result<OperatorMatrix> {
    let options = SystemOptions {
        dims,
        ..SystemOptions::default()
    };
    Ok(build_system(params, &options)?.matrix)
}

/// Applies a single-mode operator to a product-space vector.
fn apply_local(op: &OperatorMatrix, mode: Mode, dims: Truncation, v: &[C64]) -> Vec<C64> {
    let [df, ds, dr] = dims.as_array();
    let (outer, d, inner_len) = match mode {
        Mode::Fluxonium => (1, df, ds * dr),
        Mode::Snail => (df, ds, dr),
        Mode::Resonator => (df * ds, dr, 1),
    };
    let mut out = vec![C64::new(0.0, 0.0); v.len()];
    for o in 0..outer {
        let base = o * d * inner_len;
        for i in 0..d {
            for j in 0..d {
                let a = op[(i, j)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let (dst, src) = (base + i * inner_len, base + j * inner_len);
                for k in 0..inner_len {
                    out[dst + k] += a * v[src + k];
                }
            }
        }
    }
    out
}

/// Bare product label: fluxonium level, SNAIL level, resonator photons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BareLabel {
    pub fluxonium: usize,
    pub snail: usize,
    pub resonator: usize,
}

impl BareLabel {
    pub const fn new(fluxonium: usize, snail: usize, resonator: usize) -> Self {
        Self {
            fluxonium,
            snail,
            resonator,
        }
    }

    pub const G0: BareLabel = BareLabel::new(0, 0, 0);
    pub const E0: BareLabel = BareLabel::new(1, 0, 0);
    pub const G1: BareLabel = BareLabel::new(0, 0, 1);
    pub const E1: BareLabel = BareLabel::new(1, 0, 1);
    pub const S1: BareLabel = BareLabel::new(0, 1, 0);
}

impl fmt::Display for BareLabel {
    /// `g0`, `e1` for the conversion manifold, `(f,s,r)` otherwise.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.fluxonium, self.snail) {
            (0, 0) => write!(f, "g{}", self.resonator),
            (1, 0) => write!(f, "e{}", self.resonator),
            _ => write!(f, "({},{},{})", self.fluxonium, self.snail, self.resonator),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DressedState {
    pub index: usize,
    /// Energy above the dressed ground state, GHz.
    pub energy_ghz: f64,
    pub label: BareLabel,
    /// |⟨label|dressed⟩|².
    pub overlap: f64,
    pub vector: Vec<C64>,
}

/// Labeled low-lying part of the dressed spectrum.
#[derive(Debug, Clone)]
pub struct SystemSpectrum {
    /// All eigenvalues relative to the ground state, ascending, GHz.
    pub eigenvalues: Vec<f64>,
    pub states: Vec<DressedState>,
    pub dims: Truncation,
    phi: [OperatorMatrix; 3],
}

impl SystemSpectrum {
    pub fn state(&self, label: BareLabel) -> Result<&DressedState> {
        self.states
            .iter()
            .find(|s| s.label == label)
            .ok_or_else(|| LabelingError::Missing(label.to_string()).into())
    }

    pub fn energy(&self, label: BareLabel) -> Result<f64> {
        Ok(self.state(label)?.energy_ghz)
    }

    /// E(to) − E(from), GHz.
    pub fn transition_frequency(&self, from: BareLabel, to: BareLabel) -> Result<f64> {
        Ok(self.energy(to)? - self.energy(from)?)
    }

    /// ⟨a| O_mode |b⟩ for a single-mode operator lifted to the product space.
    pub fn matrix_element(&self, a: BareLabel, op: &OperatorMatrix, mode: Mode, b: BareLabel) -> Result<C64> {
        let (va, vb) = (&self.state(a)?.vector, &self.state(b)?.vector);
        Ok(inner(va, &apply_local(op, mode, self.dims, vb)))
    }

    pub fn phase_operator(&self, mode: Mode) -> &OperatorMatrix {
        &self.phi[mode.index()]
    }
}

/// Diagonalizes `system` and labels its lowest `n_labeled` states by maximal
/// overlap with bare product states.
pub fn dress_spectrum(system: &SystemHamiltonian, n_labeled: usize) -> Result<SystemSpectrum> {
    let eig = eig_hermitian(&system.matrix)?;
    let dims = system.dims;
    let n = n_labeled.min(eig.values.len());
    let e_ground = eig.values[0];

    let to_bare: Vec<OperatorMatrix> = system
        .modes
        .iter()
        .map(|m| {
            let d = m.bare.dim();
            OperatorMatrix::from_fn(d, "bare", |k, i| m.bare.vector(k)[i].conj())
        })
        .collect();

    let mut states: Vec<DressedState> = Vec::with_capacity(n);
    for k in 0..n {
        let v = eig.vector(k).to_vec();
        let mut c = v.clone();
        for (mode, u) in Mode::ALL.iter().zip(&to_bare) {
            c = apply_local(u, *mode, dims, &c);
        }
        let (best, overlap) = c
            .iter()
            .enumerate()
            .map(|(i, z)| (i, z.norm_sqr()))
            .fold((0, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        let label = BareLabel::new(
            best / (dims.snail * dims.resonator),
            (best / dims.resonator) % dims.snail,
            best % dims.resonator,
        );
        if overlap < LABEL_THRESHOLD {
            return Err(LabelingError::WeakOverlap {
                index: k,
                label: label.to_string(),
                overlap,
                threshold: LABEL_THRESHOLD,
            }
            .into());
        }
        if let Some(prev) = states.iter().find(|s| s.label == label) {
            return Err(LabelingError::Ambiguous {
                label: label.to_string(),
                first: prev.index,
                first_overlap: prev.overlap,
                second: k,
                second_overlap: overlap,
            }
            .into());
        }
        states.push(DressedState {
            index: k,
            energy_ghz: eig.values[k] - e_ground,
            label,
            overlap,
            vector: v,
        });
    }

    Ok(SystemSpectrum {
        eigenvalues: eig.values.iter().map(|e| e - e_ground).collect(),
        states,
        dims,
        phi: [
            system.modes[0].phi.clone(),
            system.modes[1].phi.clone(),
            system.modes[2].phi.clone(),
        ],
    })
}

/// Eigenvalues only, relative to the ground state. For convergence checks.
pub fn system_levels(params: &DeviceParams, options: &SystemOptions) -> Result<Vec<f64>> {
    let sys = build_system(params, options)?;
    let ev = eigvals_hermitian(&sys.matrix)?;
    let e0 = ev[0];
    Ok(ev.into_iter().map(|e| e - e0).collect())
}

/// Phase zero-point fluctuations of the three modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeZpf {
    pub phi_zpf_f: f64,
    pub phi_zpf_s: f64,
    pub phi_zpf_r: f64,
}

/// Which phase operator the fluctuations are read from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZpfProjection {
    /// |⟨1_j|φ_s|g0⟩|: the share of each mode in the SNAIL phase, as entering
    /// the three-wave mixing rate.
    #[default]
    SnailPhase,
    /// |⟨1_j|φ_j|g0⟩|: each mode's own phase.
    OwnPhase,
}

pub fn zero_point_fluctuations(spectrum: &SystemSpectrum, projection: ZpfProjection) -> Result<ModeZpf> {
    let excited = [BareLabel::E0, BareLabel::S1, BareLabel::G1];
    let mut out = [0.0; 3];
    for (k, mode) in Mode::ALL.iter().enumerate() {
        let op_mode = match projection {
            ZpfProjection::SnailPhase => Mode::Snail,
            ZpfProjection::OwnPhase => *mode,
        };
        let op = spectrum.phase_operator(op_mode);
        out[k] = spectrum
            .matrix_element(excited[k], op, op_mode, BareLabel::G0)?
            .norm();
    }
    Ok(ModeZpf {
        phi_zpf_f: out[0],
        phi_zpf_s: out[1],
        phi_zpf_r: out[2],
    })
}

/// |⟨g1|φ_s²|e0⟩|, the second-order conversion element.
pub fn phi2_matrix_element(spectrum: &SystemSpectrum) -> Result<f64> {
    let phi = spectrum.phase_operator(Mode::Snail);
    let phi2 = phi.matmul(phi);
    Ok(spectrum
        .matrix_element(BareLabel::G1, &phi2, Mode::Snail, BareLabel::E0)?
        .norm())
}

/// |⟨g1|φ_s|e0⟩|, the first-order conversion element.
pub fn phi_matrix_element(spectrum: &SystemSpectrum) -> Result<f64> {
    let phi = spectrum.phase_operator(Mode::Snail);
    Ok(spectrum
        .matrix_element(BareLabel::G1, phi, Mode::Snail, BareLabel::E0)?
        .norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::kron;

    fn small() -> Truncation {
        Truncation::new(20, 6, 4)
    }

    #[test]
    fn term_by_term_reconstruction() {
        let p = DeviceParams::table1();
        let dims = Truncation::new(3, 3, 3);
        let sys = build_system(&p, &SystemOptions { dims, ..Default::default() }).unwrap();
        let (f, s, r) = (sys.mode(Mode::Fluxonium), sys.mode(Mode::Snail), sys.mode(Mode::Resonator));
        let i3 = OperatorMatrix::identity(3, "i");
        let k3 = |a: &OperatorMatrix, b: &OperatorMatrix, c: &OperatorMatrix| kron(&kron(a, b), c);
        let mut expect = k3(&f.hamiltonian, &i3, &i3);
        expect = &expect + &k3(&i3, &s.hamiltonian, &i3);
        expect = &expect + &k3(&i3, &i3, &r.hamiltonian);
        expect = &expect + &k3(&f.phi, &s.phi, &i3).scale_real(0.5);
        expect = &expect + &k3(&i3, &s.n, &r.n).scale_real(0.13);
        assert!(sys.matrix.max_abs_diff(&expect) < 1e-12);

        // the SNAIL block itself carries the cubic term
        let osc = OscillatorBasis::new(0.39, 15.4, 3).unwrap();
        let mut hs = osc.quadratic_hamiltonian(0.39, 15.4);
        hs.add_scaled(&osc.phi.powi(3), C64::new(0.35, 0.0));
        assert!(s.hamiltonian.max_abs_diff(&hs) < 1e-12);
    }

    #[test]
    fn hermitian_and_real() {
        let h = build_system_hamiltonian(&DeviceParams::table1(), small()).unwrap();
        assert!(h.hermiticity_error() < 1e-10 * h.frobenius_norm());
        assert!(h.is_real());
    }

    #[test]
    fn dimension_guards() {
        let p = DeviceParams::table1();
        assert!(matches!(
            build_system_hamiltonian(&p, Truncation::new(40, 2, 5)),
            Err(Error::InvalidDimension { dim: 2, .. })
        ));
        assert!(matches!(
            build_system_hamiltonian(&p, Truncation::new(100, 50, 5)),
            Err(Error::DimensionOverflow { dim: 25_000, cap: DEFAULT_DIMENSION_CAP })
        ));
    }

    #[test]
    fn decoupled_limit_sums_bare_energies() {
        let p = DeviceParams::table1().decoupled();
        let sys = build_system(&p, &SystemOptions { dims: small(), ..Default::default() }).unwrap();
        let spec = dress_spectrum(&sys, 6).unwrap();
        let lf = sys.mode(Mode::Fluxonium).levels();
        let ls = sys.mode(Mode::Snail).levels();
        let lr = sys.mode(Mode::Resonator).levels();
        let mut sums: Vec<f64> = Vec::new();
        for a in &lf {
            for b in &ls {
                for c in &lr {
                    sums.push(a + b + c);
                }
            }
        }
        sums.sort_by(f64::total_cmp);
        for (x, y) in spec.eigenvalues.iter().zip(&sums) {
            assert!((x - y).abs() < 1e-9);
        }
        for st in &spec.states {
            assert!((st.overlap - 1.0).abs() < 1e-9, "{} overlap {}", st.label, st.overlap);
        }
        assert!(phi2_matrix_element(&spec).unwrap() < 1e-12);
    }

    #[test]
    fn decoupled_zpf_is_oscillator_value() {
        let mut p = DeviceParams::table1().decoupled();
        p.fluxonium.ej_ghz = 0.0;
        let opts = SystemOptions { dims: Truncation::new(20, 6, 4), ..Default::default() };
        let zpf = |p: &DeviceParams| {
            let spec = dress_spectrum(&build_system(p, &opts).unwrap(), 24).unwrap();
            zero_point_fluctuations(&spec, ZpfProjection::OwnPhase).unwrap()
        };
        let z = zpf(&p);
        assert!((z.phi_zpf_f - (2.0 * 0.89 / 0.47f64).powf(0.25)).abs() < 1e-9);
        assert!((z.phi_zpf_s - (2.0 * 0.39 / 15.4f64).powf(0.25)).abs() < 1e-9);
        assert!((z.phi_zpf_r - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);

        p.snail.ec_ghz *= 2.0;
        let z2 = zpf(&p);
        assert!((z2.phi_zpf_s / z.phi_zpf_s - 2f64.powf(0.25)).abs() < 1e-9);
    }

    #[test]
    fn parity_forbids_linear_conversion_without_cubic_term() {
        let mut p = DeviceParams::table1();
        p.snail.c3_mhz = Some(0.0);
        let opts = SystemOptions { dims: small(), ..Default::default() };
        let spec = dress_spectrum(&build_system(&p, &opts).unwrap(), 8).unwrap();
        assert!(phi_matrix_element(&spec).unwrap() < 1e-10);

        let spec = dress_spectrum(&build_system(&DeviceParams::table1(), &opts).unwrap(), 8).unwrap();
        assert!(phi_matrix_element(&spec).unwrap() > 1e-6);
    }

    #[test]
    fn ambiguous_and_missing_labels_are_reported() {
        let spec = dress_spectrum(
            &build_system(&DeviceParams::table1(), &SystemOptions { dims: small(), ..Default::default() }).unwrap(),
            2,
        )
        .unwrap();
        assert!(matches!(
            spec.state(BareLabel::G1),
            Err(Error::Labeling(LabelingError::Missing(_)))
        ));
        assert_eq!(BareLabel::G1.to_string(), "g1");
        assert_eq!(BareLabel::new(2, 1, 0).to_string(), "(2,1,0)");
    }

    #[test]
    fn energy_offset_leaves_matrix_element_unchanged() {
        let p = DeviceParams::table1();
        let opts = SystemOptions { dims: small(), ..Default::default() };
        let mut sys = build_system(&p, &opts).unwrap();
        let a = phi2_matrix_element(&dress_spectrum(&sys, 8).unwrap()).unwrap();
        let d = sys.matrix.dim();
        for i in 0..d {
            sys.matrix[(i, i)] += C64::new(3.7, 0.0);
        }
        let b = phi2_matrix_element(&dress_spectrum(&sys, 8).unwrap()).unwrap();
        assert!((a - b).abs() < 1e-9 * a.max(1e-12));
        assert!(a > 0.0);
    }
}
