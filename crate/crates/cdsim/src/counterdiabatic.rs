//! Counterdiabatic driving: corrections that cancel non-adiabatic
//! transitions of a swept Hamiltonian.
//!
//! The core functional [`cd_from_eigen`] maps an instantaneous eigensystem
//! and the sweep generator `dH/dt` to the correction
//!
//! ```text
//! H_cd = i * sum_{n != k} |n><n| dH/dt |k><k| / (E_k - E_n),
//! ```
//!
//! which is Hermitian, gauge invariant (eigenvector phases drop out), and
//! purely off-diagonal in the instantaneous eigenbasis. Evolving under
//! `H + H_cd` keeps every instantaneous-eigenstate population exactly
//! constant, no matter how fast the sweep runs.
//!
//! [`CdScheme`] packages the deployment choices: the frame the correction is
//! built in (the bare model itself, or the control-dressed reference in
//! which the driven pair is replaced by its dressed levels), an optional
//! coupling mask for truncated experimental implementations, and an optional
//! switch-on point for protocols that cross an early unwanted resonance
//! diabatically before the correction engages.

use num_complex::Complex;

use crate::linalg::CMatrix;
use crate::model::{
    build_h4, dressed_basis, BasisSet, DressedPair, DriveParams, HermitianMatrix, ManifoldParams,
    ModelKind,
};
use crate::protocols::SweepProtocol;
use crate::spectral::eigensystem;
use crate::{as_f64, r, Error, Result, Scalar};

/// Spectral gaps below this floor make the correction singular.
const DEGENERACY_FLOOR: f64 = 1e-9;

/// Frame in which the counterdiabatic correction is constructed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CdFrame {
    /// Correction built from the model Hamiltonian itself, applied in the
    /// model's own basis.
    Bare,
    /// Correction built from the four-level reference whose control-coupled
    /// block is replaced by its dressed diagonal, then expressed in the
    /// dressed basis. The evolution it corrects runs in dressed coordinates.
    Dressed,
}

/// Selection of counterdiabatic couplings to keep, for truncated
/// implementations. Pairs are unordered index pairs in the construction
/// frame of the correction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CdMask {
    /// Keep every coupling.
    Full,
    /// Keep only the listed off-diagonal pairs.
    Pairs(Vec<(usize, usize)>),
}

impl CdMask {
    fn keeps(&self, i: usize, j: usize) -> bool {
        match self {
            CdMask::Full => true,
            CdMask::Pairs(pairs) => pairs
                .iter()
                .any(|&(a, b)| (a.min(b), a.max(b)) == (i.min(j), i.max(j))),
        }
    }
}

/// Complete counterdiabatic driving specification.
#[derive(Clone, Debug, PartialEq)]
pub struct CdScheme<R> {
    /// Construction frame.
    pub frame: CdFrame,
    /// Couplings kept in the applied correction.
    pub mask: CdMask,
    /// Sweep position at which the correction switches on; `0` applies it
    /// throughout.
    pub tau_switch: R,
}

impl<R: Scalar> CdScheme<R> {
    /// Full correction in the model's own basis, applied throughout.
    pub fn bare() -> Self {
        CdScheme {
            frame: CdFrame::Bare,
            mask: CdMask::Full,
            tau_switch: R::zero(),
        }
    }

    /// Full correction in the dressed frame, applied throughout.
    pub fn dressed() -> Self {
        CdScheme {
            frame: CdFrame::Dressed,
            mask: CdMask::Full,
            tau_switch: R::zero(),
        }
    }

    /// Restricts the correction to the given couplings.
    pub fn with_mask(mut self, mask: CdMask) -> Self {
        self.mask = mask;
        self
    }

    /// Delays the correction until the given sweep position.
    pub fn with_switch(mut self, tau_switch: R) -> Result<Self> {
        if !(tau_switch >= R::zero() && tau_switch <= R::one()) {
            return Err(Error::Domain(format!(
                "tau_switch = {tau_switch} outside [0, 1]"
            )));
        }
        self.tau_switch = tau_switch;
        Ok(self)
    }
}

/// Generator of the sweep: only the pump detuning moves, so `dH/dt` is the
/// initial-state projector scaled by the detuning rate.
fn detuning_generator<R: Scalar>(dim: usize, rate: R) -> CMatrix<R> {
    let mut g = CMatrix::zeros(dim);
    g[(0, 0)] = Complex::new(rate, R::zero());
    g
}

/// Core counterdiabatic functional on a precomputed eigensystem.
///
/// `energies` and the columns of `vectors` describe the instantaneous
/// eigensystem of the swept Hamiltonian; `dhdt` is its time derivative in
/// the same basis. `tau` is used only to report where a degeneracy was hit.
/// Fails when any spectral gap lies below [`DEGENERACY_FLOOR`].
pub fn cd_from_eigen<R: Scalar>(
    energies: &[R],
    vectors: &CMatrix<R>,
    dhdt: &CMatrix<R>,
    tau: R,
) -> Result<CMatrix<R>> {
    let n = energies.len();
    if vectors.dim() != n || dhdt.dim() != n {
        return Err(Error::Domain(format!(
            "eigensystem of dimension {n} does not match vectors ({}) or generator ({})",
            vectors.dim(),
            dhdt.dim()
        )));
    }
    let in_eigenbasis = dhdt.conjugated_by(vectors);
    let floor = r::<R>(DEGENERACY_FLOOR);
    let mut kernel = CMatrix::zeros(n);
    for row in 0..n {
        for col in 0..n {
            if row == col {
                continue;
            }
            let gap = energies[col] - energies[row];
            if gap.abs() < floor {
                return Err(Error::DegenerateSpectrum {
                    tau: as_f64(tau),
                    lo: row.min(col),
                    hi: row.max(col),
                    gap: as_f64(gap.abs()),
                });
            }
            kernel[(row, col)] = in_eigenbasis[(row, col)] * Complex::new(R::zero(), gap.recip());
        }
    }
    Ok(vectors.matmul(&kernel.matmul(&vectors.adjoint())))
}

/// Zeroes every off-diagonal element the mask does not keep.
pub fn mask_terms<R: Scalar>(h: &CMatrix<R>, mask: &CdMask) -> CMatrix<R> {
    let mut out = h.clone();
    let zero = Complex::new(R::zero(), R::zero());
    for i in 0..out.dim() {
        for j in 0..out.dim() {
            if i != j && !mask.keeps(i, j) {
                out[(i, j)] = zero;
            }
        }
    }
    out
}

/// Four-level reference for the dressed construction: the bare Hamiltonian
/// with the control-coupled block replaced by its dressed diagonal. Slots
/// keep their bare meaning except that the block carries the dressed levels.
fn dressed_reference<R: Scalar>(
    m: &ManifoldParams<R>,
    d: &DriveParams<R>,
    pair: &DressedPair<R>,
    delta_p: R,
) -> CMatrix<R> {
    let mut g = build_h4(m, d, delta_p).into_matrix();
    let zero = Complex::new(R::zero(), R::zero());
    g[(2, 2)] = Complex::new(pair.lambda_plus, R::zero());
    g[(3, 3)] = Complex::new(pair.lambda_minus, R::zero());
    g[(2, 3)] = zero;
    g[(3, 2)] = zero;
    g
}

/// Counterdiabatic correction for a swept model at one sweep position.
///
/// Returns zero before the scheme's switch-on point. For the bare frame the
/// correction lives in the model's own basis; for the dressed frame it is
/// constructed from the dressed reference and returned in the dressed basis,
/// ready to be added to the dressed-frame Hamiltonian. The mask acts in the
/// construction frame, before any change of basis.
pub fn h_cd<R: Scalar>(
    kind: ModelKind,
    m: &ManifoldParams<R>,
    d: &DriveParams<R>,
    p: &SweepProtocol<R>,
    tau: R,
    t_f: R,
    scheme: &CdScheme<R>,
) -> Result<HermitianMatrix<R>> {
    if !(t_f > R::zero()) {
        return Err(Error::Domain(format!("t_f = {t_f} must be positive")));
    }
    let basis = match scheme.frame {
        CdFrame::Bare => kind.basis(),
        CdFrame::Dressed => {
            if kind != ModelKind::FourLevel {
                return Err(Error::Domain(
                    "the dressed correction needs the four-level model".into(),
                ));
            }
            BasisSet::Dressed4
        }
    };
    let delta_p = p.value(tau)?;
    if tau < scheme.tau_switch {
        return HermitianMatrix::new(CMatrix::zeros(kind.dim()), basis);
    }
    let rate = p.rate(tau, t_f);
    let generator = detuning_generator(kind.dim(), rate);
    match scheme.frame {
        CdFrame::Bare => {
            let eig = eigensystem(&kind.build(m, d, delta_p)?);
            let cd = cd_from_eigen(&eig.energies, &eig.vectors, &generator, tau)?;
            HermitianMatrix::new(mask_terms(&cd, &scheme.mask), basis)
        }
        CdFrame::Dressed => {
            let pair = dressed_basis(m, d)?;
            let reference = dressed_reference(m, d, &pair, delta_p);
            let (energies, vectors) = reference.eigh();
            let cd = cd_from_eigen(&energies, &vectors, &generator, tau)?;
            let masked = mask_terms(&cd, &scheme.mask);
            HermitianMatrix::new(masked.conjugated_by(&pair.rotation()), basis)
        }
    }
}

/// Hamiltonian actually driving the evolution at one sweep position: the
/// model Hamiltonian plus the scheme's correction, expressed in the frame
/// the scheme evolves in (the model basis for the bare scheme, the dressed
/// basis for the dressed one).
pub fn total_hamiltonian<R: Scalar>(
    kind: ModelKind,
    m: &ManifoldParams<R>,
    d: &DriveParams<R>,
    p: &SweepProtocol<R>,
    tau: R,
    t_f: R,
    scheme: Option<&CdScheme<R>>,
) -> Result<HermitianMatrix<R>> {
    let h0 = kind.build(m, d, p.value(tau)?)?;
    let Some(scheme) = scheme else {
        return Ok(h0);
    };
    let cd = h_cd(kind, m, d, p, tau, t_f, scheme)?;
    match scheme.frame {
        CdFrame::Bare => HermitianMatrix::new(h0.matrix().add(cd.matrix()), h0.basis()),
        CdFrame::Dressed => {
            let pair = dressed_basis(m, d)?;
            let dressed = crate::model::to_dressed_frame(&h0, &pair)?;
            HermitianMatrix::new(dressed.matrix().add(cd.matrix()), BasisSet::Dressed4)
        }
    }
}
