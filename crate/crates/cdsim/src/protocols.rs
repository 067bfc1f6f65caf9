//! Pump-detuning sweep protocols.
//!
//! A protocol maps the dimensionless sweep coordinate `tau = t / t_f` in
//! [0, 1] to the pump detuning `delta_p(tau)` in ns^-1, together with the
//! analytic time derivative `d(delta_p)/dt = f'(tau) / t_f` that the
//! counterdiabatic construction needs. For positive parameters the linear
//! and saturating shapes sweep upward in detuning while the gap-adapted
//! shape sweeps downward; each passes once through the target anticrossing.

use serde::{Deserialize, Serialize};

use crate::{r, Error, Result, Scalar};

/// Detuning sweep shape with its parameters.
///
/// Every variant is multiplied by the overall `scale` factor (1 for the
/// published shapes); `scale` exists so a shape can be stretched without
/// re-deriving its parameters, which matters for the square-root shape where
/// the amplitude also appears inside the denominator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum SweepProtocol<R> {
    /// Constant-rate sweep `delta_p = a (2 tau - 1)` covering [-a, a].
    Linear { a: R, scale: R },
    /// Saturating sweep `delta_p = a arctan(b tau) - c`: fast through the
    /// early anticrossing, slow near the end.
    Arctan { a: R, b: R, c: R, scale: R },
    /// Gap-adapted sweep `delta_p = g u / (2 sqrt(tau (1 - tau) + (g / 2a)^2
    /// u^2)) - d` with `u = 1 - 2 tau` and `g` the minimal-gap coupling. This
    /// is the constant-adiabaticity schedule for a two-level crossing of gap
    /// `g`: the local adiabaticity ratio `|d(delta_p)/dtau| g / (delta^2 +
    /// g^2)^(3/2)` stays fixed across the sweep, so it crawls through the
    /// anticrossing (slope `2g` at the centre) and races through the wings
    /// (slope `8a^3/g^2` at the ends). Offset by `-d` to centre the crossing;
    /// spans `[a - d, -a - d]` downward.
    SqrtAdapted { a: R, gap: R, d: R, scale: R },
    /// Inner protocol frozen at `tau_stop`: `delta_p(min(tau, tau_stop))`
    /// with zero rate beyond the stop.
    Clamped {
        inner: Box<SweepProtocol<R>>,
        tau_stop: R,
    },
    /// Inner protocol with a counterdiabatic switch point recorded at
    /// `tau_switch`; values and rates pass through unchanged. The marker lets
    /// schedules place an integration breakpoint at the switch.
    CdSplit {
        inner: Box<SweepProtocol<R>>,
        tau_switch: R,
    },
}

impl<R: Scalar> SweepProtocol<R> {
    /// Constant-rate sweep over `[-a, a]`.
    pub fn linear(a: R) -> Self {
        Self::Linear { a, scale: R::one() }
    }

    /// Saturating arctangent sweep.
    pub fn arctan(a: R, b: R, c: R) -> Self {
        Self::Arctan {
            a,
            b,
            c,
            scale: R::one(),
        }
    }

    /// Gap-adapted square-root sweep for a crossing of coupling `gap`.
    pub fn sqrt_adapted(a: R, gap: R, d: R) -> Self {
        Self::SqrtAdapted {
            a,
            gap,
            d,
            scale: R::one(),
        }
    }

    /// Freezes the sweep after `tau_stop`, holding its value constant.
    pub fn clamp_after(self, tau_stop: R) -> Result<Self> {
        if tau_stop < R::zero() || tau_stop > R::one() {
            return Err(Error::Domain(format!(
                "tau_stop = {tau_stop} outside [0, 1]"
            )));
        }
        Ok(Self::Clamped {
            inner: Box::new(self),
            tau_stop,
        })
    }

    /// Marks `tau_switch` as the point where a counterdiabatic term turns on.
    ///
    /// The sweep itself is unchanged; the marker is surfaced through
    /// [`SweepProtocol::breakpoints`] so integrators do not step across the
    /// discontinuity of the added term.
    pub fn split_diabatic_cd(self, tau_switch: R) -> Result<Self> {
        if tau_switch < R::zero() || tau_switch > R::one() {
            return Err(Error::Domain(format!(
                "tau_switch = {tau_switch} outside [0, 1]"
            )));
        }
        Ok(Self::CdSplit {
            inner: Box::new(self),
            tau_switch,
        })
    }

    /// Overall scale applied on top of the shape (1 by default).
    pub fn with_scale(mut self, s: R) -> Self {
        match &mut self {
            Self::Linear { scale, .. }
            | Self::Arctan { scale, .. }
            | Self::SqrtAdapted { scale, .. } => *scale = s,
            Self::Clamped { inner, .. } | Self::CdSplit { inner, .. } => {
                let swapped = std::mem::replace(
                    inner.as_mut(),
                    SweepProtocol::Linear {
                        a: R::zero(),
                        scale: R::zero(),
                    },
                );
                **inner = swapped.with_scale(s);
            }
        }
        self
    }

    /// Pump detuning at sweep coordinate `tau` in [0, 1], in ns^-1.
    pub fn value(&self, tau: R) -> Result<R> {
        if !(tau >= R::zero() && tau <= R::one()) {
            return Err(Error::Domain(format!("tau = {tau} outside [0, 1]")));
        }
        Ok(self.value_unchecked(tau))
    }

    fn value_unchecked(&self, tau: R) -> R {
        let two = r::<R>(2.0);
        match self {
            Self::Linear { a, scale } => *scale * *a * (two * tau - R::one()),
            Self::Arctan { a, b, c, scale } => *scale * (*a * (*b * tau).atan() - *c),
            Self::SqrtAdapted { a, gap, d, scale } => {
                let eps = *gap / (two * *a);
                let u = R::one() - two * tau;
                let q = tau * (R::one() - tau) + eps * eps * u * u;
                *scale * (*gap * u / (two * q.sqrt()) - *d)
            }
            Self::Clamped { inner, tau_stop } => inner.value_unchecked(tau.min(*tau_stop)),
            Self::CdSplit { inner, .. } => inner.value_unchecked(tau),
        }
    }

    /// Time derivative `d(delta_p)/dt` at `tau`, for total duration `t_f` ns.
    ///
    /// Clamped sweeps report zero beyond their stop point.
    pub fn rate(&self, tau: R, t_f: R) -> R {
        self.shape_slope(tau) / t_f
    }

    /// Derivative of the shape with respect to `tau`.
    fn shape_slope(&self, tau: R) -> R {
        let two = r::<R>(2.0);
        match self {
            Self::Linear { a, scale } => *scale * two * *a,
            Self::Arctan { a, b, c: _, scale } => {
                *scale * *a * *b / (R::one() + (*b * tau) * (*b * tau))
            }
            Self::SqrtAdapted {
                a,
                gap,
                d: _,
                scale,
            } => {
                // d/dtau of g u / (2 sqrt(q)) collapses to -g / (4 q^(3/2)):
                // the q' = u (1 - 4 eps^2) cross term cancels the 4 tau (1 -
                // tau) part of q, leaving u^2 + 4 tau (1 - tau) = 1.
                let eps = *gap / (two * *a);
                let u = R::one() - two * tau;
                let q = tau * (R::one() - tau) + eps * eps * u * u;
                -*scale * *gap / (r::<R>(4.0) * q * q.sqrt())
            }
            Self::Clamped { inner, tau_stop } => {
                if tau >= *tau_stop {
                    R::zero()
                } else {
                    inner.shape_slope(tau)
                }
            }
            Self::CdSplit { inner, .. } => inner.shape_slope(tau),
        }
    }

    /// Interior sweep coordinates where the schedule changes definition
    /// (clamp stops, counterdiabatic switch points), ascending.
    pub fn breakpoints(&self) -> Vec<R> {
        let mut out = Vec::new();
        self.collect_breakpoints(&mut out);
        out.sort_by(|x, y| x.partial_cmp(y).expect("breakpoints are finite"));
        out.dedup();
        out
    }

    fn collect_breakpoints(&self, out: &mut Vec<R>) {
        match self {
            Self::Linear { .. } | Self::Arctan { .. } | Self::SqrtAdapted { .. } => {}
            Self::Clamped { inner, tau_stop } => {
                if *tau_stop > R::zero() && *tau_stop < R::one() {
                    out.push(*tau_stop);
                }
                inner.collect_breakpoints(out);
            }
            Self::CdSplit { inner, tau_switch } => {
                if *tau_switch > R::zero() && *tau_switch < R::one() {
                    out.push(*tau_switch);
                }
                inner.collect_breakpoints(out);
            }
        }
    }

    /// Counterdiabatic switch point, if one was marked.
    pub fn tau_switch(&self) -> Option<R> {
        match self {
            Self::CdSplit { tau_switch, .. } => Some(*tau_switch),
            Self::Clamped { inner, .. } => inner.tau_switch(),
            _ => None,
        }
    }
}
