use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Index of a model parameter inside the packed 9-vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Param {
    Alpha = 0,
    OmegaP = 1,
    Gamma = 2,
    R = 3,
    PhiM = 4,
    Beta = 5,
    Nu = 6,
    SigmaL = 7,
    SigmaR = 8,
}

pub const N_PARAMS: usize = 9;

impl Param {
    pub const ALL: [Param; N_PARAMS] = [
        Param::Alpha,
        Param::OmegaP,
        Param::Gamma,
        Param::R,
        Param::PhiM,
        Param::Beta,
        Param::Nu,
        Param::SigmaL,
        Param::SigmaR,
    ];

    /// Parameters of the marginal (vertical) spectrum.
    pub const MARGINAL: [Param; 4] = [Param::Alpha, Param::OmegaP, Param::Gamma, Param::R];

    /// Parameters of the spreading function.
    pub const SPREADING: [Param; 5] = [
        Param::PhiM,
        Param::Beta,
        Param::Nu,
        Param::SigmaL,
        Param::SigmaR,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Param::Alpha => "alpha",
            Param::OmegaP => "omega_p",
            Param::Gamma => "gamma",
            Param::R => "r",
            Param::PhiM => "phi_m",
            Param::Beta => "beta",
            Param::Nu => "nu",
            Param::SigmaL => "sigma_l",
            Param::SigmaR => "sigma_r",
        }
    }

    pub fn from_name(name: &str) -> Option<Param> {
        Param::ALL.into_iter().find(|p| p.name() == name)
    }

    pub fn is_marginal(self) -> bool {
        (self as usize) < 4
    }
}

/// Parameters of the JONSWAP marginal spectrum and the bimodal wrapped
/// Gaussian spreading function.
///
/// Directions are measured clockwise from North and give the direction the
/// waves come *from*.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Parameters<T> {
    /// Scale of the marginal spectrum.
    pub alpha: T,
    /// Peak angular frequency (rad/s).
    pub omega_p: T,
    /// Peak enhancement factor.
    pub gamma: T,
    /// Tail decay index.
    pub r: T,
    /// Mean direction (rad).
    pub phi_m: T,
    /// Limiting separation of the two spreading arms (rad).
    pub beta: T,
    /// Shape of the arm separation over frequency.
    pub nu: T,
    /// Limiting angular width (rad).
    pub sigma_l: T,
    /// Shape of the angular width over frequency (rad).
    pub sigma_r: T,
}

impl<T: Real> Parameters<T> {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        alpha: T,
        omega_p: T,
        gamma: T,
        r: T,
        phi_m: T,
        beta: T,
        nu: T,
        sigma_l: T,
        sigma_r: T,
    ) -> Self {
        Self {
            alpha,
            omega_p,
            gamma,
            r,
            phi_m,
            beta,
            nu,
            sigma_l,
            sigma_r,
        }
    }

    pub fn to_array(&self) -> [T; N_PARAMS] {
        [
            self.alpha,
            self.omega_p,
            self.gamma,
            self.r,
            self.phi_m,
            self.beta,
            self.nu,
            self.sigma_l,
            self.sigma_r,
        ]
    }

    pub fn from_array(v: [T; N_PARAMS]) -> Self {
        Self::new(v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8])
    }

    pub fn get(&self, p: Param) -> T {
        self.to_array()[p as usize]
    }

    pub fn with(&self, p: Param, value: T) -> Self {
        let mut v = self.to_array();
        v[p as usize] = value;
        Self::from_array(v)
    }

    pub fn cast<U: Real>(&self) -> Parameters<U> {
        let v = self.to_array();
        Parameters::from_array(v.map(|x| U::of(x.to_f64_lossy())))
    }

    /// Checks the parameter space: α, ω_p > 0, γ ≥ 1, r > 1, φ_m and β in
    /// [0, 2π), ν, σ_l, σ_r ≥ 0.
    pub fn validate(&self) -> Result<()> {
        let two_pi = T::PI() + T::PI();
        let fail = |name: &'static str, reason: &str| {
            Err(Error::InvalidParameter {
                name,
                reason: reason.to_string(),
            })
        };
        for p in Param::ALL {
            if !self.get(p).is_finite() {
                return fail(p.name(), "not finite");
            }
        }
        if self.alpha <= T::zero() {
            return fail("alpha", "must be > 0");
        }
        if self.omega_p <= T::zero() {
            return fail("omega_p", "must be > 0");
        }
        if self.gamma < T::one() {
            return fail("gamma", "must be >= 1");
        }
        if self.r <= T::one() {
            return fail("r", "must be > 1");
        }
        if self.phi_m < T::zero() || self.phi_m >= two_pi {
            return fail("phi_m", "must lie in [0, 2pi)");
        }
        if self.beta < T::zero() || self.beta >= two_pi {
            return fail("beta", "must lie in [0, 2pi)");
        }
        if self.nu < T::zero() {
            return fail("nu", "must be >= 0");
        }
        if self.sigma_l < T::zero() {
            return fail("sigma_l", "must be >= 0");
        }
        if self.sigma_r < T::zero() {
            return fail("sigma_r", "must be >= 0");
        }
        Ok(())
    }

    /// Same parameters with φ_m wrapped into [0, 2π).
    pub fn wrapped(&self) -> Self {
        let two_pi = T::PI() + T::PI();
        let mut phi = self.phi_m % two_pi;
        if phi < T::zero() {
            phi = phi + two_pi;
        }
        if phi >= two_pi {
            phi = T::zero();
        }
        Self {
            phi_m: phi,
            ..*self
        }
    }
}

impl Parameters<f64> {
    /// Scenario 1 of the simulation study: fetch-limited wind sea.
    pub fn scenario1() -> Self {
        Self::new(
            0.7,
            0.8,
            3.3,
            5.0,
            std::f64::consts::FRAC_PI_2,
            4.0,
            2.7,
            0.55,
            0.26,
        )
    }

    /// Scenario 2: as scenario 1 with a higher peak and constant angular width.
    pub fn scenario2() -> Self {
        Self::new(
            0.7,
            1.1,
            3.3,
            5.0,
            std::f64::consts::FRAC_PI_2,
            4.0,
            2.7,
            0.55,
            0.0,
        )
    }

    /// Scenario 3: Pierson-Moskowitz marginal (γ = 1).
    pub fn scenario3() -> Self {
        Self::new(
            0.7,
            1.0,
            1.0,
            5.0,
            std::f64::consts::FRAC_PI_2,
            4.0,
            2.7,
            0.55,
            0.26,
        )
    }
}

/// Water depth under the buoy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum WaterDepth<T> {
    Infinite,
    Finite(T),
}

/// Gravity and water depth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalContext<T> {
    pub gravity: T,
    pub water_depth: WaterDepth<T>,
}

impl<T: Real> Default for PhysicalContext<T> {
    fn default() -> Self {
        Self::deep_water()
    }
}

impl<T: Real> PhysicalContext<T> {
    /// g = 9.81 m/s², infinite depth.
    pub fn deep_water() -> Self {
        Self {
            gravity: T::of(9.81),
            water_depth: WaterDepth::Infinite,
        }
    }

    pub fn finite_depth(depth: T) -> Self {
        Self {
            gravity: T::of(9.81),
            water_depth: WaterDepth::Finite(depth),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gravity > T::zero()) || !self.gravity.is_finite() {
            return Err(Error::InvalidParameter {
                name: "gravity",
                reason: "must be finite and > 0".into(),
            });
        }
        if let WaterDepth::Finite(h) = self.water_depth {
            if !(h > T::zero()) || !h.is_finite() {
                return Err(Error::InvalidParameter {
                    name: "water_depth",
                    reason: "must be finite and > 0".into(),
                });
            }
        }
        Ok(())
    }

    pub fn is_deep(&self) -> bool {
        matches!(self.water_depth, WaterDepth::Infinite)
    }
}
