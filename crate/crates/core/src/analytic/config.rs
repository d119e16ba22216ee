use crate::error::{Error, Result};

/// Network configuration: link density, SIR threshold, link distance and
/// path-loss exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetworkConfig {
    /// Links per unit area.
    pub lambda: f64,
    /// SIR threshold.
    pub theta: f64,
    /// Transmitter–receiver distance, shared by every link.
    pub r_link: f64,
    /// Path-loss exponent, strictly above 2.
    pub alpha: f64,
}

impl NetworkConfig {
    pub fn new(lambda: f64, theta: f64, r_link: f64, alpha: f64) -> Result<Self> {
        let config = Self {
            lambda,
            theta,
            r_link,
            alpha,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        // A zero density is accepted: it is the empty network.
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::domain(format!(
                "lambda must be >= 0, got {}",
                self.lambda
            )));
        }
        if !(self.theta > 0.0 && self.theta.is_finite()) {
            return Err(Error::domain(format!(
                "theta must be > 0, got {}",
                self.theta
            )));
        }
        if !(self.r_link > 0.0 && self.r_link.is_finite()) {
            return Err(Error::domain(format!(
                "link distance must be > 0, got {}",
                self.r_link
            )));
        }
        if !(self.alpha > 2.0 && self.alpha.is_finite()) {
            return Err(Error::domain(format!(
                "alpha must be > 2, got {}",
                self.alpha
            )));
        }
        Ok(())
    }

    /// `2 / alpha`, in (0, 1).
    pub fn delta(&self) -> f64 {
        2.0 / self.alpha
    }

    /// `theta * R^alpha`, the argument of both interference functionals.
    pub fn s(&self) -> f64 {
        self.theta * self.r_link.powf(self.alpha)
    }

    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(lambda, self.theta, self.r_link, self.alpha)
    }
}

/// Tolerance on `p0 + p1 + p2 = 1`.
pub const MAC_SUM_TOL: f64 = 1e-12;

/// ALOHA state probabilities: silent, half-duplex, full-duplex.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MacProfile {
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
}

impl MacProfile {
    pub fn new(p0: f64, p1: f64, p2: f64) -> Result<Self> {
        for (name, p) in [("p0", p0), ("p1", p1), ("p2", p2)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::domain(format!("{name} must lie in [0, 1], got {p}")));
            }
        }
        let sum = p0 + p1 + p2;
        if (sum - 1.0).abs() > MAC_SUM_TOL {
            return Err(Error::domain(format!(
                "p0 + p1 + p2 must equal 1, got {sum}"
            )));
        }
        Ok(Self { p0, p1, p2 })
    }

    /// Builds the profile from the two access probabilities; `p0` takes the
    /// remainder.
    pub fn from_access(p1: f64, p2: f64) -> Result<Self> {
        let p0 = 1.0 - p1 - p2;
        if p0 < -MAC_SUM_TOL {
            return Err(Error::domain(format!(
                "p1 + p2 must not exceed 1, got {}",
                p1 + p2
            )));
        }
        Self::new(p0.max(0.0), p1, p2)
    }

    pub fn silent() -> Self {
        Self {
            p0: 1.0,
            p1: 0.0,
            p2: 0.0,
        }
    }

    /// Mean number of radiating endpoints per link, `p1 + 2 p2`.
    pub fn transmitters_per_link(&self) -> f64 {
        self.p1 + 2.0 * self.p2
    }
}
