//! Few-level Hamiltonians for the spin-orbit-mixed transfer problem.
//!
//! Basis ordering is (|1>, |S>, |T>, |2>): a pump-coupled pair (|1>, |S>) and
//! a control-coupled pair (|T>, |2>). The spin-orbit interaction mixes the
//! bare pair (|S0>, |T0>) into (|S>, |T>) with amplitudes alpha and beta, so
//! the pump addresses both |S> (strength alpha Omega_p / 2) and |T> (strength
//! -beta Omega_p / 2), and likewise the control addresses |T> (alpha Omega_c
//! / 2) and |2> <-> |S> (beta Omega_c / 2). Energies are angular frequencies
//! in ns^-1 in the rotating frame; |T> is the zero of energy.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::linalg::CMatrix;
use crate::{as_f64, r, Error, Result, Scalar};

/// Spin-orbit-mixed manifold: mixing amplitudes and level splitting.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ManifoldParams<R> {
    alpha: R,
    beta: R,
    delta_so: R,
}

/// Builds the manifold from the |S> mixing weight `alpha_sq` in (0, 1) and
/// the mixed-state splitting `delta_so` > 0 in ns^-1.
pub fn manifold_from_mixing<R: Scalar>(alpha_sq: R, delta_so: R) -> Result<ManifoldParams<R>> {
    if !(alpha_sq > R::zero() && alpha_sq < R::one()) {
        return Err(Error::Domain(format!(
            "alpha_sq = {alpha_sq} outside (0, 1)"
        )));
    }
    if !(delta_so > R::zero()) {
        return Err(Error::Domain(format!(
            "delta_so = {delta_so} must be positive"
        )));
    }
    Ok(ManifoldParams {
        alpha: alpha_sq.sqrt(),
        beta: (R::one() - alpha_sq).sqrt(),
        delta_so,
    })
}

impl<R: Scalar> ManifoldParams<R> {
    /// Mixing amplitude of the dominant component, alpha > 0.
    pub fn alpha(&self) -> R {
        self.alpha
    }

    /// Mixing amplitude of the admixed component, beta > 0.
    pub fn beta(&self) -> R {
        self.beta
    }

    /// Mixed-state splitting in ns^-1.
    pub fn delta_so(&self) -> R {
        self.delta_so
    }

    /// Mixing weight alpha^2.
    pub fn alpha_sq(&self) -> R {
        self.alpha * self.alpha
    }

    /// Admixture weight beta^2 = 1 - alpha^2.
    pub fn beta_sq(&self) -> R {
        self.beta * self.beta
    }

    /// Unmixed level splitting (alpha^2 - beta^2) * delta_so.
    pub fn bare_splitting(&self) -> R {
        (self.alpha_sq() - self.beta_sq()) * self.delta_so
    }

    /// Unmixed coupling alpha * beta * delta_so driving the mixing.
    pub fn bare_coupling(&self) -> R {
        self.alpha * self.beta * self.delta_so
    }
}

/// Drive strengths and the control detuning, in ns^-1.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriveParams<R> {
    /// Pump Rabi frequency, >= 0.
    pub omega_p: R,
    /// Control Rabi frequency, >= 0.
    pub omega_c: R,
    /// Control detuning; sign selects which dressed level lies near zero.
    pub delta_c: R,
}

impl<R: Scalar> DriveParams<R> {
    /// Validates the Rabi frequencies.
    pub fn new(omega_p: R, omega_c: R, delta_c: R) -> Result<Self> {
        if !(omega_p >= R::zero()) {
            return Err(Error::Domain(format!("omega_p = {omega_p} must be >= 0")));
        }
        if !(omega_c >= R::zero()) {
            return Err(Error::Domain(format!("omega_c = {omega_c} must be >= 0")));
        }
        Ok(Self {
            omega_p,
            omega_c,
            delta_c,
        })
    }

    /// True when the three-level reduction is trustworthy (|delta_c| at
    /// least five control Rabi frequencies).
    pub fn elimination_ok(&self) -> bool {
        self.delta_c.abs() >= r::<R>(5.0) * self.omega_c
    }
}

/// The bases a labeled operator or state can live in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisSet {
    /// Reduced basis (|1>, |S>, |T~>) after eliminating |2>.
    Bare3,
    /// Full basis (|1>, |S>, |T>, |2>).
    Bare4,
    /// Control-dressed basis (|1>, |S>, |+>, |->).
    Dressed4,
}

impl BasisSet {
    /// Number of levels.
    pub fn dim(self) -> usize {
        match self {
            BasisSet::Bare3 => 3,
            BasisSet::Bare4 | BasisSet::Dressed4 => 4,
        }
    }

    /// Human-readable level labels in basis order.
    pub fn labels(self) -> &'static [&'static str] {
        match self {
            BasisSet::Bare3 => &["1", "S", "T"],
            BasisSet::Bare4 => &["1", "S", "T", "2"],
            BasisSet::Dressed4 => &["1", "S", "+", "-"],
        }
    }

    /// Index of a level label in this basis.
    pub fn index_of(self, label: &str) -> Result<usize> {
        self.labels()
            .iter()
            .position(|&l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }
}

/// Hermitian operator tagged with the basis its entries refer to.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianMatrix<R> {
    matrix: CMatrix<R>,
    basis: BasisSet,
}

impl<R: Scalar> HermitianMatrix<R> {
    /// Wraps a matrix, checking dimension and hermiticity.
    pub fn new(matrix: CMatrix<R>, basis: BasisSet) -> Result<Self> {
        if matrix.dim() != basis.dim() {
            return Err(Error::BasisMismatch(format!(
                "matrix dimension {} does not match basis dimension {}",
                matrix.dim(),
                basis.dim()
            )));
        }
        let tol = r::<R>(1e-10) * (R::one() + matrix.max_abs());
        let defect = matrix.hermiticity_defect();
        if defect > tol {
            return Err(Error::Domain(format!(
                "matrix is not Hermitian: defect {} exceeds {}",
                defect, tol
            )));
        }
        Ok(Self {
            matrix: matrix.hermitized(),
            basis,
        })
    }

    /// The matrix entries.
    pub fn matrix(&self) -> &CMatrix<R> {
        &self.matrix
    }

    /// Consumes the wrapper, returning the entries.
    pub fn into_matrix(self) -> CMatrix<R> {
        self.matrix
    }

    /// Basis the entries refer to.
    pub fn basis(&self) -> BasisSet {
        self.basis
    }
}

/// Full four-level Hamiltonian at pump detuning `delta_p`, basis
/// (|1>, |S>, |T>, |2>).
pub fn build_h4<R: Scalar>(
    m: &ManifoldParams<R>,
    d: &DriveParams<R>,
    delta_p: R,
) -> HermitianMatrix<R> {
    let half = r::<R>(0.5);
    let mut h = CMatrix::zeros(4);
    let c = |x: R| Complex::new(x, R::zero());
    h[(0, 0)] = c(delta_p + m.delta_so());
    h[(1, 1)] = c(m.delta_so());
    // (2,2) = 0: |T> sets the zero of energy.
    h[(3, 3)] = c(-d.delta_c);
    h[(0, 1)] = c(m.alpha() * d.omega_p * half);
    h[(0, 2)] = c(-m.beta() * d.omega_p * half);
    h[(1, 3)] = c(m.beta() * d.omega_c * half);
    h[(2, 3)] = c(m.alpha() * d.omega_c * half);
    for i in 0..4 {
        for j in 0..i {
            h[(i, j)] = h[(j, i)].conj();
        }
    }
    HermitianMatrix::new(h, BasisSet::Bare4).expect("construction is Hermitian")
}

/// Second-order light shift alpha^2 Omega_c^2 / (4 delta_c) of the dressed
/// |T> level, in ns^-1.
pub fn light_shift<R: Scalar>(alpha_sq: R, omega_c: R, delta_c: R) -> Result<R> {
    if delta_c == R::zero() {
        return Err(Error::SingularReduction);
    }
    Ok(alpha_sq * omega_c * omega_c / (r::<R>(4.0) * delta_c))
}

/// Three-level reduction (|1>, |S>, |T~>) after adiabatic elimination of
/// |2>, valid for |delta_c| well above Omega_c.
///
/// Fails with a singular-reduction error at `delta_c` = 0. Accuracy degrades
/// as |delta_c| approaches Omega_c; see [`DriveParams::elimination_ok`].
pub fn build_h3<R: Scalar>(
    m: &ManifoldParams<R>,
    d: &DriveParams<R>,
    delta_p: R,
) -> Result<HermitianMatrix<R>> {
    if d.delta_c == R::zero() {
        return Err(Error::SingularReduction);
    }
    let half = r::<R>(0.5);
    let quarter_ratio = d.omega_c * d.omega_c / (r::<R>(4.0) * d.delta_c);
    let mut h = CMatrix::zeros(3);
    let c = |x: R| Complex::new(x, R::zero());
    h[(0, 0)] = c(delta_p + m.delta_so());
    h[(1, 1)] = c(m.delta_so() + m.beta_sq() * quarter_ratio);
    h[(2, 2)] = c(m.alpha_sq() * quarter_ratio);
    h[(0, 1)] = c(m.alpha() * d.omega_p * half);
    h[(0, 2)] = c(-m.beta() * d.omega_p * half);
    h[(1, 2)] = c(m.alpha() * m.beta() * quarter_ratio);
    for i in 0..3 {
        for j in 0..i {
            h[(i, j)] = h[(j, i)].conj();
        }
    }
    HermitianMatrix::new(h, BasisSet::Bare3)
}

/// Level-structure selector: the full four-level model or its reduced
/// three-level form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelKind {
    /// Reduced model in the (|1>, |S>, |T~>) basis.
    ThreeLevel,
    /// Full model in the (|1>, |S>, |T>, |2>) basis.
    FourLevel,
}

impl ModelKind {
    /// Number of levels.
    pub fn dim(&self) -> usize {
        match self {
            ModelKind::ThreeLevel => 3,
            ModelKind::FourLevel => 4,
        }
    }

    /// Basis the model Hamiltonian is expressed in.
    pub fn basis(&self) -> BasisSet {
        match self {
            ModelKind::ThreeLevel => BasisSet::Bare3,
            ModelKind::FourLevel => BasisSet::Bare4,
        }
    }

    /// Builds the model Hamiltonian at pump detuning `delta_p`.
    pub fn build<R: Scalar>(
        &self,
        m: &ManifoldParams<R>,
        d: &DriveParams<R>,
        delta_p: R,
    ) -> Result<HermitianMatrix<R>> {
        match self {
            ModelKind::ThreeLevel => build_h3(m, d, delta_p),
            ModelKind::FourLevel => Ok(build_h4(m, d, delta_p)),
        }
    }
}

/// Eigen-pair of the control-coupled (|T>, |2>) block.
///
/// The block is [[0, g], [g, -delta_c]] with g = alpha Omega_c / 2; its
/// eigenvalues are lambda_pm = (-delta_c +- s) / 2, s = sqrt(delta_c^2 +
/// alpha^2 Omega_c^2). The dressed states are |+> = a_plus |T> + b_plus |2>
/// and |-> = a_minus |T> + b_minus |2>, orthonormal, with the sign convention
/// that the |T> component is positive (falling back to a positive |2>
/// component when the |T> component vanishes).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DressedPair<R> {
    /// Upper dressed energy.
    pub lambda_plus: R,
    /// Lower dressed energy.
    pub lambda_minus: R,
    /// |T> component of |+>.
    pub a_plus: R,
    /// |2> component of |+>.
    pub b_plus: R,
    /// |T> component of |->.
    pub a_minus: R,
    /// |2> component of |->.
    pub b_minus: R,
}

/// Diagonalizes the control-coupled block exactly.
///
/// Fails when the control coupling vanishes: without a drive the pair is not
/// dressed at all (and at `delta_c = 0` the block would be fully degenerate).
/// The `Omega_c -> 0` limit itself is well defined — `|+> = |T>`, `|-> = |2>`
/// for positive detuning — and can be written down directly when needed.
pub fn dressed_basis<R: Scalar>(
    m: &ManifoldParams<R>,
    d: &DriveParams<R>,
) -> Result<DressedPair<R>> {
    let g = m.alpha() * d.omega_c * r::<R>(0.5);
    let dc = d.delta_c;
    let s = (dc * dc + r::<R>(4.0) * g * g).sqrt();
    // The resonant splitting 2g bounds the block gap from below (s >= 2g).
    if g + g < r::<R>(1e-9) {
        return Err(Error::DegenerateDressing {
            splitting: as_f64(g + g),
        });
    }
    let half = r::<R>(0.5);
    let lambda_plus = (-dc + s) * half;
    let lambda_minus = (-dc - s) * half;

    // Each eigenvector has two algebraic forms; pick the better-conditioned
    // one so the g -> 0 and delta_c -> 0 limits are both exact.
    let vector_for = |lambda: R| -> (R, R) {
        let (x1, y1) = (g, lambda); // from the first row
        let (x2, y2) = (lambda + dc, g); // from the second row
        let n1 = x1 * x1 + y1 * y1;
        let n2 = x2 * x2 + y2 * y2;
        let (x, y, n) = if n1 >= n2 { (x1, y1, n1) } else { (x2, y2, n2) };
        let inv = n.sqrt().recip();
        let (a, b) = (x * inv, y * inv);
        // Sign convention: positive |T> component, else positive |2>.
        let flip = a < R::zero() || (a == R::zero() && b < R::zero());
        if flip {
            (-a, -b)
        } else {
            (a, b)
        }
    };
    let (a_plus, b_plus) = vector_for(lambda_plus);
    let (a_minus, b_minus) = vector_for(lambda_minus);
    Ok(DressedPair {
        lambda_plus,
        lambda_minus,
        a_plus,
        b_plus,
        a_minus,
        b_minus,
    })
}

impl<R: Scalar> DressedPair<R> {
    /// Four-level rotation matrix whose columns are (|1>, |S>, |+>, |->)
    /// expressed in the bare basis.
    pub fn rotation(&self) -> CMatrix<R> {
        let mut w = CMatrix::identity(4);
        let c = |x: R| Complex::new(x, R::zero());
        w[(2, 2)] = c(self.a_plus);
        w[(3, 2)] = c(self.b_plus);
        w[(2, 3)] = c(self.a_minus);
        w[(3, 3)] = c(self.b_minus);
        w
    }
}

/// Rotates a four-level bare-basis operator into the control-dressed basis.
pub fn to_dressed_frame<R: Scalar>(
    h: &HermitianMatrix<R>,
    pair: &DressedPair<R>,
) -> Result<HermitianMatrix<R>> {
    if h.basis() != BasisSet::Bare4 {
        return Err(Error::BasisMismatch(format!(
            "expected a Bare4 operator, got {:?}",
            h.basis()
        )));
    }
    let rotated = h.matrix().conjugated_by(&pair.rotation());
    HermitianMatrix::new(rotated, BasisSet::Dressed4)
}

/// Rotates a dressed-basis operator back to the bare four-level basis.
pub fn from_dressed_frame<R: Scalar>(
    h: &HermitianMatrix<R>,
    pair: &DressedPair<R>,
) -> Result<HermitianMatrix<R>> {
    if h.basis() != BasisSet::Dressed4 {
        return Err(Error::BasisMismatch(format!(
            "expected a Dressed4 operator, got {:?}",
            h.basis()
        )));
    }
    let w = pair.rotation();
    let back = w.matmul(&h.matrix().matmul(&w.adjoint()));
    HermitianMatrix::new(back, BasisSet::Bare4)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn manifold() -> ManifoldParams<f64> {
        manifold_from_mixing(0.87, 4.71).unwrap()
    }

    fn drive(delta_c: f64) -> DriveParams<f64> {
        DriveParams::new(0.24, 3.8, delta_c).unwrap()
    }

    #[test]
    fn manifold_round_trips_through_unmixed_parameters() {
        let m = manifold();
        assert_abs_diff_eq!(m.alpha_sq() + m.beta_sq(), 1.0, epsilon = 1e-14);
        let d0 = m.bare_splitting();
        let v = m.bare_coupling();
        // The splitting and coupling reassemble the mixed-state parameters.
        let delta_so = (d0 * d0 + 4.0 * v * v).sqrt();
        assert_abs_diff_eq!(delta_so, m.delta_so(), epsilon = 1e-10);
        let alpha_sq = 0.5 * (1.0 + d0 / delta_so);
        assert_abs_diff_eq!(alpha_sq, m.alpha_sq(), epsilon = 1e-10);
    }

    #[test]
    fn manifold_rejects_bad_parameters() {
        assert!(manifold_from_mixing(0.0, 4.71).is_err());
        assert!(manifold_from_mixing(1.0, 4.71).is_err());
        assert!(manifold_from_mixing(0.87, 0.0).is_err());
        assert!(manifold_from_mixing(0.87, -1.0).is_err());
        assert!(DriveParams::new(-0.1, 3.8, 1.0).is_err());
        assert!(DriveParams::new(0.24, -3.8, 1.0).is_err());
    }

    #[test]
    fn four_level_layout_matches_closed_form() {
        let m = manifold();
        let d = drive(1.0);
        let h = build_h4(&m, &d, -5.0);
        let hm = h.matrix();
        assert_eq!(h.basis(), BasisSet::Bare4);
        assert_abs_diff_eq!(hm[(0, 0)].re, -5.0 + 4.71, epsilon = 1e-14);
        assert_abs_diff_eq!(hm[(1, 1)].re, 4.71, epsilon = 1e-14);
        assert_abs_diff_eq!(hm[(2, 2)].re, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(hm[(3, 3)].re, -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(hm[(0, 1)].re, m.alpha() * 0.24 / 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(hm[(0, 2)].re, -m.beta() * 0.24 / 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(hm[(1, 3)].re, m.beta() * 3.8 / 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(hm[(2, 3)].re, m.alpha() * 3.8 / 2.0, epsilon = 1e-14);
        assert_eq!(hm[(0, 3)].re, 0.0);
        assert_eq!(hm[(1, 2)].re, 0.0);
        assert_eq!(hm.hermiticity_defect(), 0.0);
    }

    #[test]
    fn light_shift_reference_values() {
        assert_abs_diff_eq!(
            light_shift(0.87, 3.8, 100.0).unwrap(),
            0.0314070,
            epsilon = 1e-7
        );
        assert_abs_diff_eq!(
            light_shift(0.87, 3.8, 30.0).unwrap(),
            0.1046900,
            epsilon = 1e-7
        );
        assert!(matches!(
            light_shift(0.87, 3.8, 0.0),
            Err(Error::SingularReduction)
        ));
    }

    #[test]
    fn three_level_layout_matches_closed_form() {
        let m = manifold();
        let d = drive(100.0);
        let h = build_h3(&m, &d, -7.0).unwrap();
        let hm = h.matrix();
        let q = 3.8 * 3.8 / 400.0;
        assert_eq!(h.basis(), BasisSet::Bare3);
        assert_abs_diff_eq!(hm[(0, 0)].re, -7.0 + 4.71, epsilon = 1e-14);
        assert_abs_diff_eq!(hm[(1, 1)].re, 4.71 + 0.13 * q, epsilon = 1e-12);
        assert_abs_diff_eq!(hm[(2, 2)].re, 0.87 * q, epsilon = 1e-12);
        assert_abs_diff_eq!(
            hm[(2, 2)].re,
            light_shift(0.87, 3.8, 100.0).unwrap(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(hm[(1, 2)].re, m.alpha() * m.beta() * q, epsilon = 1e-12);
        assert_abs_diff_eq!(hm[(0, 2)].re, -m.beta() * 0.24 / 2.0, epsilon = 1e-14);
        assert!(matches!(
            build_h3(&m, &drive(0.0), -7.0),
            Err(Error::SingularReduction)
        ));
    }

    #[test]
    fn reduction_tracks_full_model_at_large_detuning() {
        // With |delta_c| >> Omega_c the three lowest-lying levels of the full
        // model match the reduced model to fourth order in Omega_c/delta_c.
        let m = manifold();
        let d = drive(100.0);
        for &delta_p in &[-8.0, -5.0, -1.0, 2.0] {
            let (e4, _) = build_h4(&m, &d, delta_p).matrix().eigh();
            let (e3, _) = build_h3(&m, &d, delta_p).unwrap().matrix().eigh();
            // Lowest full-model level is the far-detuned |2>-like state.
            assert!(e4[0] < -90.0);
            let bound = 2.0 * 3.8f64.powi(4) / 100.0f64.powi(3);
            for k in 0..3 {
                assert!(
                    (e4[k + 1] - e3[k]).abs() <= bound,
                    "level {k} at delta_p={delta_p}: {} vs {}",
                    e4[k + 1],
                    e3[k]
                );
            }
        }
    }

    #[test]
    fn elimination_quality_flag() {
        assert!(drive(100.0).elimination_ok());
        assert!(drive(19.0).elimination_ok());
        assert!(!drive(1.0).elimination_ok());
    }

    #[test]
    fn dressed_pair_solves_the_block_exactly() {
        let m = manifold();
        let d = drive(1.0);
        let p = dressed_basis(&m, &d).unwrap();
        let g = m.alpha() * 3.8 / 2.0;
        // Reference numbers for delta_c = 1, alpha^2 Omega_c^2 = 12.5628.
        assert_abs_diff_eq!(p.lambda_plus, 1.3413853, epsilon = 1e-6);
        assert_abs_diff_eq!(p.lambda_minus, -2.3413853, epsilon = 1e-6);
        assert_abs_diff_eq!(p.a_plus, 0.7973502, epsilon = 1e-6);
        assert_abs_diff_eq!(p.b_plus, 0.6035169, epsilon = 1e-6);
        assert_abs_diff_eq!(p.a_minus, 0.6035169, epsilon = 1e-6);
        assert_abs_diff_eq!(p.b_minus, -0.7973502, epsilon = 1e-6);
        // Eigen-residuals of the block.
        for (lam, a, b) in [
            (p.lambda_plus, p.a_plus, p.b_plus),
            (p.lambda_minus, p.a_minus, p.b_minus),
        ] {
            assert_abs_diff_eq!(g * b, lam * a, epsilon = 1e-12);
            assert_abs_diff_eq!(g * a - d.delta_c * b, lam * b, epsilon = 1e-12);
        }
        // Orthonormality.
        assert_abs_diff_eq!(
            p.a_plus * p.a_plus + p.b_plus * p.b_plus,
            1.0,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            p.a_minus * p.a_minus + p.b_minus * p.b_minus,
            1.0,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            p.a_plus * p.a_minus + p.b_plus * p.b_minus,
            0.0,
            epsilon = 1e-14
        );
        // Trace and determinant of the block are reproduced.
        assert_abs_diff_eq!(p.lambda_plus + p.lambda_minus, -d.delta_c, epsilon = 1e-12);
        assert_abs_diff_eq!(p.lambda_plus * p.lambda_minus, -g * g, epsilon = 1e-12);
    }

    #[test]
    fn dressed_upper_level_approaches_light_shift_when_far_detuned() {
        let m = manifold();
        let d = drive(30.0);
        let p = dressed_basis(&m, &d).unwrap();
        let ls = light_shift(0.87, 3.8, 30.0).unwrap();
        // Exact level sits below the second-order shift by ~(alpha Omega_c)^4 / (16 dc^3).
        let correction = (0.87 * 3.8 * 3.8f64).powi(2) / (16.0 * 30.0f64.powi(3));
        assert!(p.lambda_plus < ls);
        assert_abs_diff_eq!(ls - p.lambda_plus, correction, epsilon = 0.1 * correction);
    }

    #[test]
    fn dressed_pair_requires_a_control_drive() {
        let m = manifold();
        for dc in [1.0, 0.0, -2.5] {
            let d = DriveParams::new(0.24, 0.0, dc).unwrap();
            assert!(matches!(
                dressed_basis(&m, &d),
                Err(Error::DegenerateDressing { .. })
            ));
        }
        // The drive-free limit pair (|+> = |T>, |-> = |2>) leaves operators
        // unchanged when used as a frame.
        let p = DressedPair {
            lambda_plus: 0.0,
            lambda_minus: -1.0,
            a_plus: 1.0,
            b_plus: 0.0,
            a_minus: 0.0,
            b_minus: 1.0,
        };
        let d = DriveParams::new(0.24, 0.0, 1.0).unwrap();
        let h = build_h4(&m, &d, -3.0);
        let rotated = to_dressed_frame(&h, &p).unwrap();
        assert_eq!(rotated.matrix(), h.matrix());
    }

    #[test]
    fn dressed_frame_diagonalizes_the_control_block() {
        let m = manifold();
        let d = drive(1.0);
        let p = dressed_basis(&m, &d).unwrap();
        let h = build_h4(&m, &d, -5.0);
        let hd = to_dressed_frame(&h, &p).unwrap();
        let hm = hd.matrix();
        assert_eq!(hd.basis(), BasisSet::Dressed4);
        assert_abs_diff_eq!(hm[(2, 2)].re, p.lambda_plus, epsilon = 1e-12);
        assert_abs_diff_eq!(hm[(3, 3)].re, p.lambda_minus, epsilon = 1e-12);
        assert_abs_diff_eq!(hm[(2, 3)].norm(), 0.0, epsilon = 1e-12);
        // Pump and control couplings pick up the dressed amplitudes.
        let bp = -m.beta() * 0.24 / 2.0;
        let bc = m.beta() * 3.8 / 2.0;
        assert_abs_diff_eq!(hm[(0, 2)].re, bp * p.a_plus, epsilon = 1e-12);
        assert_abs_diff_eq!(hm[(0, 3)].re, bp * p.a_minus, epsilon = 1e-12);
        assert_abs_diff_eq!(hm[(1, 2)].re, bc * p.b_plus, epsilon = 1e-12);
        assert_abs_diff_eq!(hm[(1, 3)].re, bc * p.b_minus, epsilon = 1e-12);
        // The (|1>, |S>) sector is untouched.
        assert_abs_diff_eq!(hm[(0, 0)].re, -5.0 + 4.71, epsilon = 1e-12);
        assert_abs_diff_eq!(hm[(0, 1)].re, m.alpha() * 0.24 / 2.0, epsilon = 1e-12);
    }

    #[test]
    fn dressed_frame_round_trip_and_spectrum() {
        let m = manifold();
        let d = drive(1.0);
        let p = dressed_basis(&m, &d).unwrap();
        let h = build_h4(&m, &d, -2.0);
        let hd = to_dressed_frame(&h, &p).unwrap();
        let back = from_dressed_frame(&hd, &p).unwrap();
        assert!(back.matrix().sub(h.matrix()).max_abs() <= 1e-12);
        let (e0, _) = h.matrix().eigh();
        let (e1, _) = hd.matrix().eigh();
        for (a, b) in e0.iter().zip(&e1) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-11);
        }
        // Frame mix-ups are rejected.
        assert!(to_dressed_frame(&hd, &p).is_err());
        assert!(from_dressed_frame(&h, &p).is_err());
    }

    #[test]
    fn basis_labels_resolve_indices() {
        assert_eq!(BasisSet::Bare4.index_of("T").unwrap(), 2);
        assert_eq!(BasisSet::Dressed4.index_of("-").unwrap(), 3);
        assert_eq!(BasisSet::Bare3.index_of("1").unwrap(), 0);
        assert!(BasisSet::Bare3.index_of("2").is_err());
        assert_eq!(BasisSet::Bare4.dim(), 4);
    }

    #[test]
    fn hermitian_wrapper_rejects_bad_input() {
        let mut m = CMatrix::<f64>::zeros(4);
        m[(0, 1)] = Complex::new(1.0, 0.0);
        assert!(HermitianMatrix::new(m.clone(), BasisSet::Bare4).is_err());
        m[(1, 0)] = Complex::new(1.0, 0.0);
        assert!(HermitianMatrix::new(m.clone(), BasisSet::Bare4).is_ok());
        assert!(HermitianMatrix::new(m, BasisSet::Bare3).is_err());
    }
}
