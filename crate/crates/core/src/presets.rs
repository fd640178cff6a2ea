//! Six reference channels spanning weak to strong turbulence for plane and
//! spherical waves, each with its shaping parameters and the published
//! rounded channel parameters.

use crate::atmos::{AtmosphericConditions, ShapeSeed, WaveType};
use crate::dist::{DoubleGGParams, GGParams};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    /// plane wave, σ²_R = 0.1, l₀/R₀ = 0.5
    PlaneWeak,
    /// plane wave, σ²_R = 2, l₀/R₀ = 0.5
    PlaneModerate,
    /// plane wave, σ²_R = 25, l₀/R₀ = 1
    PlaneStrong,
    /// spherical wave, σ²_R = 0.06, l₀/R₀ = 0
    SphericalWeak,
    /// spherical wave, σ²_R = 2, l₀/R₀ = 0
    SphericalModerate,
    /// spherical wave, σ²_R = 5, l₀/R₀ = 1
    SphericalStrong,
}

/// Rounded channel parameters as published for a preset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuotedParams {
    pub gamma1: f64,
    pub gamma2: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub p: u32,
    pub q: u32,
}

impl Preset {
    pub const ALL: [Preset; 6] = [
        Preset::PlaneWeak,
        Preset::PlaneModerate,
        Preset::PlaneStrong,
        Preset::SphericalWeak,
        Preset::SphericalModerate,
        Preset::SphericalStrong,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::PlaneWeak => "plane-weak",
            Preset::PlaneModerate => "plane-moderate",
            Preset::PlaneStrong => "plane-strong",
            Preset::SphericalWeak => "spherical-weak",
            Preset::SphericalModerate => "spherical-moderate",
            Preset::SphericalStrong => "spherical-strong",
        }
    }

    pub fn from_name(name: &str) -> Option<Preset> {
        Self::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn conditions(self) -> AtmosphericConditions {
        let (wave, r, l) = match self {
            Preset::PlaneWeak => (WaveType::Plane, 0.1, 0.5),
            Preset::PlaneModerate => (WaveType::Plane, 2.0, 0.5),
            Preset::PlaneStrong => (WaveType::Plane, 25.0, 1.0),
            Preset::SphericalWeak => (WaveType::Spherical, 0.06, 0.0),
            Preset::SphericalModerate => (WaveType::Spherical, 2.0, 0.0),
            Preset::SphericalStrong => (WaveType::Spherical, 5.0, 1.0),
        };
        AtmosphericConditions {
            wave,
            rytov_var: r,
            inner_scale_ratio: l,
        }
    }

    pub fn seed(self) -> ShapeSeed {
        let (m1, m2) = match self {
            Preset::PlaneWeak => (4.0, 4.5),
            Preset::PlaneModerate => (0.55, 2.35),
            Preset::PlaneStrong => (0.5, 1.8),
            Preset::SphericalWeak => (34.24, 32.79),
            Preset::SphericalModerate => (2.65, 0.85),
            Preset::SphericalStrong => (3.2, 2.8),
        };
        ShapeSeed { m1, m2 }
    }

    pub fn quoted(self) -> QuotedParams {
        let (gamma1, gamma2, omega1, omega2, p, q) = match self {
            Preset::PlaneWeak => (2.1, 2.1, 1.0676, 1.06, 1, 1),
            Preset::PlaneModerate => (2.1690, 0.8530, 1.5793, 0.9671, 28, 11),
            Preset::PlaneStrong => (1.8621, 0.7638, 1.5074, 0.9280, 17, 7),
            Preset::SphericalWeak => (1.0, 1.0, 1.0, 1.0, 1, 1),
            Preset::SphericalModerate => (0.9135, 1.4385, 0.9836, 1.1745, 7, 11),
            Preset::SphericalStrong => (0.4205, 0.6643, 0.8336, 0.9224, 7, 11),
        };
        QuotedParams {
            gamma1,
            gamma2,
            omega1,
            omega2,
            p,
            q,
        }
    }

    /// Channel with the published γ, m and (p, q); Ω is recomputed from the
    /// unit-mean condition so that E[I] = 1 holds to rounding.
    pub fn params(self) -> Result<DoubleGGParams> {
        let q = self.quoted();
        let s = self.seed();
        DoubleGGParams::new(
            GGParams::unit_mean(q.gamma1, s.m1)?,
            GGParams::unit_mean(q.gamma2, s.m2)?,
            q.p,
            q.q,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for p in Preset::ALL {
            assert_eq!(Preset::from_name(p.name()), Some(p));
        }
        assert_eq!(Preset::from_name("nope"), None);
    }

    #[test]
    fn recomputed_omegas_match_published_rounding() {
        for p in Preset::ALL {
            let d = p.params().unwrap();
            let q = p.quoted();
            assert!((d.large().omega - q.omega1).abs() < 2e-3, "{p:?}");
            assert!((d.small().omega - q.omega2).abs() < 2e-3, "{p:?}");
        }
    }
}
