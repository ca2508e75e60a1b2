//! Stored-energy densities for strings.
//!
//! Every law is written in terms of the squared stretch `C = ∂ₛr·∂ₛr`:
//!
//! ```text
//! hyperelastic          W(C) = EA/4 (C - ln C - 1)
//! linear elastic        W(C) = EA/2 (√C - 1)²
//! St. Venant-Kirchhoff  W(C) = EA/8 (C - 1)²
//! ```
//!
//! The conjugate stress is `S = 2 dW/dC` and the tension along the tangent
//! is `N(ν) = S(ν²) ν` with `ν = √C`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, Error, Result};

/// Default relative threshold below which the secant slope is replaced by
/// the midpoint derivative.
pub const DEFAULT_SWITCH_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MaterialKind {
    Hyperelastic,
    LinearElastic,
    StVenantKirchhoff,
}

impl MaterialKind {
    pub const ALL: [MaterialKind; 3] = [
        MaterialKind::Hyperelastic,
        MaterialKind::LinearElastic,
        MaterialKind::StVenantKirchhoff,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MaterialKind::Hyperelastic => "hyperelastic",
            MaterialKind::LinearElastic => "linear-elastic",
            MaterialKind::StVenantKirchhoff => "st-venant-kirchhoff",
        }
    }
}

impl fmt::Display for MaterialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MaterialKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MaterialKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                Error::Config(format!(
                    "unknown material `{s}` (expected hyperelastic, linear-elastic or st-venant-kirchhoff)"
                ))
            })
    }
}

/// A constitutive law together with its axial stiffness `EA` [N].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialLaw {
    kind: MaterialKind,
    axial_stiffness: f64,
}

impl MaterialLaw {
    pub fn new(kind: MaterialKind, axial_stiffness: f64) -> Result<Self> {
        if !(axial_stiffness > 0.0 && axial_stiffness.is_finite()) {
            return Err(Error::Config(format!(
                "axial stiffness EA must be positive, got {axial_stiffness}"
            )));
        }
        Ok(Self {
            kind,
            axial_stiffness,
        })
    }

    pub fn hyperelastic(axial_stiffness: f64) -> Result<Self> {
        Self::new(MaterialKind::Hyperelastic, axial_stiffness)
    }

    pub fn kind(&self) -> MaterialKind {
        self.kind
    }

    pub fn axial_stiffness(&self) -> f64 {
        self.axial_stiffness
    }

    /// Stored energy per unit length `W(C)` [N].
    pub fn stored_energy_density(&self, c: f64) -> Result<f64> {
        let c = ensure_positive("strain C", c)?;
        let ea = self.axial_stiffness;
        Ok(match self.kind {
            MaterialKind::Hyperelastic => 0.25 * ea * (c - c.ln() - 1.0),
            MaterialKind::LinearElastic => {
                let eps = c.sqrt() - 1.0;
                0.5 * ea * eps * eps
            }
            MaterialKind::StVenantKirchhoff => {
                let e = c - 1.0;
                0.125 * ea * e * e
            }
        })
    }

    /// `dW/dC`, i.e. half the stress.
    pub fn energy_slope(&self, c: f64) -> Result<f64> {
        let c = ensure_positive("strain C", c)?;
        let ea = self.axial_stiffness;
        Ok(match self.kind {
            MaterialKind::Hyperelastic => 0.25 * ea * (1.0 - 1.0 / c),
            MaterialKind::LinearElastic => 0.5 * ea * (1.0 - 1.0 / c.sqrt()),
            MaterialKind::StVenantKirchhoff => 0.25 * ea * (c - 1.0),
        })
    }

    /// `d²W/dC²`.
    pub fn energy_curvature(&self, c: f64) -> Result<f64> {
        let c = ensure_positive("strain C", c)?;
        let ea = self.axial_stiffness;
        Ok(match self.kind {
            MaterialKind::Hyperelastic => 0.25 * ea / (c * c),
            MaterialKind::LinearElastic => 0.25 * ea / (c * c.sqrt()),
            MaterialKind::StVenantKirchhoff => 0.25 * ea,
        })
    }

    /// Second-Piola-type stress `S = 2 dW/dC` [N].
    pub fn stress(&self, c: f64) -> Result<f64> {
        let c = ensure_positive("strain C", c)?;
        let ea = self.axial_stiffness;
        Ok(match self.kind {
            MaterialKind::Hyperelastic => 0.5 * ea * (1.0 - 1.0 / c),
            MaterialKind::LinearElastic => ea * (1.0 - 1.0 / c.sqrt()),
            MaterialKind::StVenantKirchhoff => 0.5 * ea * (c - 1.0),
        })
    }

    /// Tension `N(ν) = S(ν²)·ν` for the stretch `ν = |∂ₛr|` [N].
    pub fn tension(&self, stretch: f64) -> Result<f64> {
        let nu = ensure_positive("stretch", stretch)?;
        Ok(self.stress(nu * nu)? * nu)
    }

    /// Greenspan discrete derivative of `W` between two strain values.
    ///
    /// Returns the secant slope `(W(c_next) - W(c_n)) / (c_next - c_n)` unless
    /// the gap is at most `switch_tol·max(c_n, c_next)`, in which case the
    /// derivative at the midpoint is used instead. For gaps below a relative
    /// `1e-3` the secant is evaluated in a rearranged form that avoids
    /// cancellation in the energy difference.
    pub fn greenspan_derivative(&self, c_n: f64, c_next: f64, switch_tol: f64) -> Result<f64> {
        ensure_positive("strain C_n", c_n)?;
        ensure_positive("strain C_n+1", c_next)?;
        if secant_branch(c_n, c_next, switch_tol) {
            let gap = c_next - c_n;
            if gap.abs() >= CLOSED_FORM_GAP * c_n.max(c_next) {
                let dw = self.stored_energy_density(c_next)? - self.stored_energy_density(c_n)?;
                Ok(dw / gap)
            } else {
                Ok(self.secant_slope(c_n, c_next))
            }
        } else {
            self.energy_slope(0.5 * (c_n + c_next))
        }
    }

    /// `(W(c1) - W(c0)) / (c1 - c0)` rearranged so that the energy difference
    /// does not cancel for nearby strains.
    fn secant_slope(&self, c0: f64, c1: f64) -> f64 {
        let ea = self.axial_stiffness;
        match self.kind {
            MaterialKind::Hyperelastic => {
                let delta = (c1 - c0) / c0;
                0.25 * ea * (1.0 - delta.ln_1p() / (c1 - c0))
            }
            MaterialKind::LinearElastic => {
                let sum = c0.sqrt() + c1.sqrt();
                0.5 * ea * (sum - 2.0) / sum
            }
            MaterialKind::StVenantKirchhoff => 0.125 * ea * (c0 + c1 - 2.0),
        }
    }

    /// Derivative of [`greenspan_derivative`](Self::greenspan_derivative) with
    /// respect to `c_next`.
    pub fn greenspan_derivative_wrt_next(
        &self,
        c_n: f64,
        c_next: f64,
        switch_tol: f64,
    ) -> Result<f64> {
        ensure_positive("strain C_n", c_n)?;
        ensure_positive("strain C_n+1", c_next)?;
        if secant_branch(c_n, c_next, switch_tol) {
            let gap = c_next - c_n;
            let secant = self.greenspan_derivative(c_n, c_next, switch_tol)?;
            Ok((self.energy_slope(c_next)? - secant) / gap)
        } else {
            Ok(0.5 * self.energy_curvature(0.5 * (c_n + c_next))?)
        }
    }

    /// Central finite-difference counterpart of
    /// [`greenspan_derivative_wrt_next`](Self::greenspan_derivative_wrt_next).
    pub fn greenspan_derivative_wrt_next_fd(
        &self,
        c_n: f64,
        c_next: f64,
        switch_tol: f64,
    ) -> Result<f64> {
        let step = 1e-4 * (1.0 + c_next.abs());
        let plus = self.greenspan_derivative(c_n, c_next + step, switch_tol)?;
        let minus = self.greenspan_derivative(c_n, c_next - step, switch_tol)?;
        Ok((plus - minus) / (2.0 * step))
    }
}

/// Relative gap below which the secant is evaluated in closed form.
const CLOSED_FORM_GAP: f64 = 1e-3;

fn secant_branch(c_n: f64, c_next: f64, switch_tol: f64) -> bool {
    (c_next - c_n).abs() > switch_tol * c_n.max(c_next)
}
