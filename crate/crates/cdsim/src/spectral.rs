//! Instantaneous spectra along a sweep.
//!
//! [`spectral_flow`] tracks the eigenvalues and eigenvectors of a swept model
//! Hamiltonian as continuous *branches*: eigenvectors are matched between
//! neighbouring samples by overlap, phases are aligned along each branch, and
//! extra samples are inserted wherever the sweep moves too fast for the grid
//! to follow (sharp avoided crossings). On top of the flow, [`min_gap`]
//! locates the minimum splitting between two branches and [`crossing_census`]
//! counts the avoided crossings through which a given bare component's
//! character passes.

use num_complex::Complex;

use crate::linalg::{CMatrix, CVector};
use crate::model::{BasisSet, DriveParams, HermitianMatrix, ManifoldParams, ModelKind};
use crate::protocols::SweepProtocol;
use crate::{as_f64, r, Error, Result, Scalar};

/// Minimum admissible overlap between matched eigenvectors of neighbouring
/// samples; anything weaker triggers grid refinement.
const OVERLAP_FLOOR: f64 = 0.9;

/// Maximum bisection depth when refining between two grid samples.
const MAX_REFINE: u32 = 12;

/// Character weight above which a branch is considered a confident carrier
/// of a bare component (see [`crossing_census`]).
const CONFIDENT_CHARACTER: f64 = 0.75;

/// Instantaneous eigendecomposition of a Hermitian operator.
#[derive(Clone, Debug)]
pub struct EigenSystem<R: Scalar> {
    /// Eigenvalues, ascending.
    pub energies: Vec<R>,
    /// Matrix whose column `k` holds the eigenvector of `energies[k]`.
    pub vectors: CMatrix<R>,
    /// Basis the operator was expressed in.
    pub basis: BasisSet,
}

/// Diagonalizes a model Hamiltonian into an ascending eigensystem.
pub fn eigensystem<R: Scalar>(h: &HermitianMatrix<R>) -> EigenSystem<R> {
    let (energies, vectors) = h.matrix().eigh();
    EigenSystem {
        energies,
        vectors,
        basis: h.basis(),
    }
}

/// Eigenbranches of a swept model Hamiltonian, continuous in energy and in
/// eigenvector phase.
///
/// Branches are indexed by their energy order at `tau = 0`. Sampling starts
/// from a uniform grid; where consecutive eigenframes overlap too weakly the
/// interval is bisected (up to [`MAX_REFINE`] levels) and the intermediate
/// samples are kept, flagged as non-nominal. Along each branch the
/// eigenvector phase is chosen so that consecutive overlaps are real and
/// positive.
#[derive(Clone, Debug)]
pub struct SpectralFlow<R: Scalar> {
    basis: BasisSet,
    taus: Vec<R>,
    nominal: Vec<bool>,
    /// `energies[b][i]`: energy of branch `b` at `taus[i]`.
    energies: Vec<Vec<R>>,
    /// `frames[i]`: matrix whose column `b` is branch `b`'s eigenvector.
    frames: Vec<CMatrix<R>>,
    /// `positions[i][b]`: ascending-energy rank of branch `b` at `taus[i]`.
    positions: Vec<Vec<usize>>,
}

struct FlowAccum<R: Scalar> {
    taus: Vec<R>,
    nominal: Vec<bool>,
    sample_energies: Vec<Vec<R>>,
    frames: Vec<CMatrix<R>>,
    positions: Vec<Vec<usize>>,
}

impl<R: Scalar> FlowAccum<R> {
    fn push(
        &mut self,
        tau: R,
        nominal: bool,
        energies: Vec<R>,
        frame: CMatrix<R>,
        position: Vec<usize>,
    ) {
        self.taus.push(tau);
        self.nominal.push(nominal);
        self.sample_energies.push(energies);
        self.frames.push(frame);
        self.positions.push(position);
    }
}

/// Matches the ascending eigencolumns of a new sample against the previous
/// branch frame. Returns the branch-ordered, phase-aligned frame together
/// with per-branch energies and ascending-energy ranks, or `None` when any
/// matched overlap falls below [`OVERLAP_FLOOR`].
fn match_branches<R: Scalar>(
    prev: &CMatrix<R>,
    energies: &[R],
    vectors: &CMatrix<R>,
) -> Option<(Vec<R>, CMatrix<R>, Vec<usize>)> {
    let n = prev.dim();
    let mut dots = vec![Complex::new(R::zero(), R::zero()); n * n];
    for b in 0..n {
        let u = prev.column(b);
        for c in 0..n {
            dots[b * n + c] = u.dot(&vectors.column(c));
        }
    }
    let floor = r::<R>(OVERLAP_FLOOR);
    let mut assignment = vec![usize::MAX; n];
    let mut row_used = vec![false; n];
    let mut col_used = vec![false; n];
    for _ in 0..n {
        let mut best = (R::zero(), usize::MAX, usize::MAX);
        for b in 0..n {
            if row_used[b] {
                continue;
            }
            for c in 0..n {
                if col_used[c] {
                    continue;
                }
                let w = dots[b * n + c].norm();
                if best.1 == usize::MAX || w > best.0 {
                    best = (w, b, c);
                }
            }
        }
        let (w, b, c) = best;
        if w < floor {
            return None;
        }
        assignment[b] = c;
        row_used[b] = true;
        col_used[c] = true;
    }
    let mut frame = CMatrix::zeros(n);
    let mut branch_energies = vec![R::zero(); n];
    for b in 0..n {
        let c = assignment[b];
        let dot = dots[b * n + c];
        let phase = dot.conj() / Complex::new(dot.norm(), R::zero());
        for row in 0..n {
            frame[(row, b)] = vectors[(row, c)] * phase;
        }
        branch_energies[b] = energies[c];
    }
    Some((branch_energies, frame, assignment))
}

fn advance<R, F>(
    eig_at: &F,
    acc: &mut FlowAccum<R>,
    left_tau: R,
    left_frame: &CMatrix<R>,
    right_tau: R,
    nominal: bool,
    depth: u32,
) -> Result<CMatrix<R>>
where
    R: Scalar,
    F: Fn(R) -> Result<(Vec<R>, CMatrix<R>)>,
{
    let (energies, vectors) = eig_at(right_tau)?;
    match match_branches(left_frame, &energies, &vectors) {
        Some((branch_energies, frame, position)) => {
            acc.push(right_tau, nominal, branch_energies, frame.clone(), position);
            Ok(frame)
        }
        None => {
            if depth >= MAX_REFINE {
                return Err(Error::Unresolved {
                    left: as_f64(left_tau),
                    right: as_f64(right_tau),
                    levels: depth,
                });
            }
            let mid = (left_tau + right_tau) * r::<R>(0.5);
            let mid_frame = advance(eig_at, acc, left_tau, left_frame, mid, false, depth + 1)?;
            advance(eig_at, acc, mid, &mid_frame, right_tau, nominal, depth + 1)
        }
    }
}

/// Tracks the eigenbranches of the swept model Hamiltonian over
/// `tau` in `[0, 1]` on a uniform grid of `n_samples` points, refining
/// between grid points where needed.
pub fn spectral_flow<R: Scalar>(
    kind: ModelKind,
    m: &ManifoldParams<R>,
    d: &DriveParams<R>,
    p: &SweepProtocol<R>,
    n_samples: usize,
) -> Result<SpectralFlow<R>> {
    if n_samples < 2 {
        return Err(Error::Domain(format!(
            "a spectral flow needs at least 2 samples, got {n_samples}"
        )));
    }
    let eig_at = |tau: R| -> Result<(Vec<R>, CMatrix<R>)> {
        let h = kind.build(m, d, p.value(tau)?)?;
        Ok(h.matrix().eigh())
    };
    let dim = kind.dim();
    let mut acc = FlowAccum {
        taus: Vec::with_capacity(n_samples),
        nominal: Vec::with_capacity(n_samples),
        sample_energies: Vec::with_capacity(n_samples),
        frames: Vec::with_capacity(n_samples),
        positions: Vec::with_capacity(n_samples),
    };
    let (e0, v0) = eig_at(R::zero())?;
    acc.push(R::zero(), true, e0, v0.clone(), (0..dim).collect());
    let mut prev_tau = R::zero();
    let mut prev_frame = v0;
    for i in 1..n_samples {
        let tau = r::<R>(i as f64 / (n_samples - 1) as f64);
        prev_frame = advance(&eig_at, &mut acc, prev_tau, &prev_frame, tau, true, 0)?;
        prev_tau = tau;
    }
    let n_kept = acc.taus.len();
    let mut energies = vec![vec![R::zero(); n_kept]; dim];
    for (i, sample) in acc.sample_energies.iter().enumerate() {
        for b in 0..dim {
            energies[b][i] = sample[b];
        }
    }
    Ok(SpectralFlow {
        basis: kind.basis(),
        taus: acc.taus,
        nominal: acc.nominal,
        energies,
        frames: acc.frames,
        positions: acc.positions,
    })
}

impl<R: Scalar> SpectralFlow<R> {
    /// Basis the underlying Hamiltonian is expressed in.
    pub fn basis(&self) -> BasisSet {
        self.basis
    }

    /// Number of branches (model dimension).
    pub fn n_branches(&self) -> usize {
        self.energies.len()
    }

    /// Number of retained samples, refinement included.
    pub fn n_samples(&self) -> usize {
        self.taus.len()
    }

    /// Sample positions, ascending in `[0, 1]`.
    pub fn taus(&self) -> &[R] {
        &self.taus
    }

    /// Per-sample flag: `true` for the uniform grid, `false` for samples
    /// inserted by refinement.
    pub fn nominal_mask(&self) -> &[bool] {
        &self.nominal
    }

    /// Energy curve of one branch across all samples.
    pub fn branch_energies(&self, branch: usize) -> &[R] {
        &self.energies[branch]
    }

    /// Branch-ordered, phase-aligned eigenframe at one sample.
    pub fn frame(&self, sample: usize) -> &CMatrix<R> {
        &self.frames[sample]
    }

    /// Eigenvector of one branch at one sample.
    pub fn branch_vector(&self, sample: usize, branch: usize) -> CVector<R> {
        self.frames[sample].column(branch)
    }

    /// Ascending-energy ranks of the branches at one sample.
    pub fn branch_positions(&self, sample: usize) -> &[usize] {
        &self.positions[sample]
    }
}

/// Locates the global minimum of the energy splitting between two branches.
///
/// The discrete minimum over the flow's samples is refined by fitting a
/// parabola through the bracketing triple. Fails with a no-gap-minimum error
/// when the splitting is smallest at a sweep endpoint, i.e. when the flow
/// contains no interior avoided crossing between the two branches.
pub fn min_gap<R: Scalar>(flow: &SpectralFlow<R>, lo: usize, hi: usize) -> Result<(R, R)> {
    let n_branches = flow.n_branches();
    if lo == hi || lo >= n_branches || hi >= n_branches {
        return Err(Error::Domain(format!(
            "invalid branch pair ({lo}, {hi}) for a {n_branches}-branch flow"
        )));
    }
    let gaps: Vec<R> = (0..flow.n_samples())
        .map(|i| (flow.energies[hi][i] - flow.energies[lo][i]).abs())
        .collect();
    let mut imin = 0;
    for (i, g) in gaps.iter().enumerate() {
        if *g < gaps[imin] {
            imin = i;
        }
    }
    if imin == 0 || imin + 1 == gaps.len() {
        return Err(Error::NoGapMinimum { lo, hi });
    }
    let (t0, t1, t2) = (flow.taus[imin - 1], flow.taus[imin], flow.taus[imin + 1]);
    let (g0, g1, g2) = (gaps[imin - 1], gaps[imin], gaps[imin + 1]);
    let d1 = (g1 - g0) / (t1 - t0);
    let d2 = (g2 - g1) / (t2 - t1);
    let curvature = (d2 - d1) / (t2 - t0);
    if curvature <= R::zero() {
        return Ok((t1, g1));
    }
    let half = r::<R>(0.5);
    let mut tau_star = (t0 + t1) * half - d1 / (curvature + curvature);
    tau_star = tau_star.max(t0).min(t2);
    let value = g0 + d1 * (tau_star - t0) + curvature * (tau_star - t0) * (tau_star - t1);
    Ok((tau_star, value.max(R::zero())))
}

/// Counts the avoided crossings through which a bare component's character
/// passes during the sweep, returning the sweep position of each.
///
/// At every nominal sample the branch carrying most of the component's
/// weight is identified. A crossing is recorded when the carrier moves from
/// one branch to another through at least one sample of genuine mixing
/// (maximum weight below [`CONFIDENT_CHARACTER`]); its position is the
/// sample of deepest mixing. Carrier changes with no mixing sample in
/// between — sweeps that jump an avoided crossing within one grid step —
/// are deliberately not counted, since the passage is then effectively
/// instantaneous on the protocol's time scale.
pub fn crossing_census<R: Scalar>(flow: &SpectralFlow<R>, component: &str) -> Result<Vec<R>> {
    let slot = flow.basis.index_of(component)?;
    let confident = r::<R>(CONFIDENT_CHARACTER);
    let mut events = Vec::new();
    let mut carrier: Option<usize> = None;
    let mut transit: Vec<(R, R)> = Vec::new();
    for i in 0..flow.n_samples() {
        if !flow.nominal[i] {
            continue;
        }
        let frame = &flow.frames[i];
        let mut best_branch = 0;
        let mut best_weight = R::zero();
        for b in 0..flow.n_branches() {
            let w = frame[(slot, b)].norm_sqr();
            if w > best_weight {
                best_weight = w;
                best_branch = b;
            }
        }
        if best_weight > confident {
            if let Some(prev) = carrier {
                if prev != best_branch && !transit.is_empty() {
                    let mut deepest = transit[0];
                    for &(tau, w) in &transit[1..] {
                        if w < deepest.1 {
                            deepest = (tau, w);
                        }
                    }
                    events.push(deepest.0);
                }
            }
            carrier = Some(best_branch);
            transit.clear();
        } else {
            transit.push((flow.taus[i], best_weight));
        }
    }
    Ok(events)
}
