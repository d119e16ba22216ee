use std::f64::consts::TAU;

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::analytic::{MacProfile, NetworkConfig};

/// ALOHA state of a link in one slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkState {
    Silent,
    HalfDuplex,
    FullDuplex,
}

/// One interfering link: its transmitter position, partner angle, state and
/// the fading powers from both endpoints toward the receiver at the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkSample {
    pub x: [f64; 2],
    /// The partner sits at `x + R (cos φ, sin φ)`.
    pub phi: f64,
    pub state: LinkState,
    pub h_x: f64,
    pub h_mx: f64,
}

#[inline]
pub(crate) fn path_gain(d2: f64, alpha: f64) -> f64 {
    d2.powf(-0.5 * alpha)
}

impl LinkSample {
    pub fn partner(&self, r_link: f64) -> [f64; 2] {
        let (sin, cos) = self.phi.sin_cos();
        [self.x[0] + r_link * cos, self.x[1] + r_link * sin]
    }

    /// Received interference power at the origin from this link.
    pub fn interference(&self, r_link: f64, alpha: f64) -> f64 {
        let near = || {
            let d2 = self.x[0] * self.x[0] + self.x[1] * self.x[1];
            self.h_x * path_gain(d2, alpha)
        };
        match self.state {
            LinkState::Silent => 0.0,
            LinkState::HalfDuplex => near(),
            LinkState::FullDuplex => {
                let m = self.partner(r_link);
                near() + self.h_mx * path_gain(m[0] * m[0] + m[1] * m[1], alpha)
            }
        }
    }
}

/// Streams the links of a marked PPP inside a disk around the origin,
/// nearest first.
///
/// Squared distances are generated as the arrival times of a Poisson process
/// of rate `λπ`, which gives a Poisson(`λπW²`) count with positions uniform
/// in the disk. Every link consumes the same fixed sequence of draws, so the
/// links inside a radius `W` do not depend on the window as long as it is at
/// least `W`.
pub struct LinkSampler<'a, R: Rng + ?Sized> {
    rng: &'a mut R,
    rate: f64,
    r2_max: f64,
    r2: f64,
    p0: f64,
    p01: f64,
}

impl<'a, R: Rng + ?Sized> LinkSampler<'a, R> {
    pub fn new(lambda: f64, mac: &MacProfile, window_radius: f64, rng: &'a mut R) -> Self {
        Self {
            rng,
            rate: lambda * std::f64::consts::PI,
            r2_max: window_radius * window_radius,
            r2: if lambda > 0.0 { 0.0 } else { f64::INFINITY },
            p0: mac.p0,
            p01: mac.p0 + mac.p1,
        }
    }
}

impl<R: Rng + ?Sized> Iterator for LinkSampler<'_, R> {
    type Item = LinkSample;

    fn next(&mut self) -> Option<LinkSample> {
        let gap: f64 = Exp1.sample(self.rng);
        self.r2 += gap / self.rate;
        if self.r2 > self.r2_max {
            self.r2 = f64::INFINITY;
            return None;
        }
        let rho = self.r2.sqrt();
        let (sin, cos) = (TAU * self.rng.random::<f64>()).sin_cos();
        let u: f64 = self.rng.random();
        let state = if u < self.p0 {
            LinkState::Silent
        } else if u < self.p01 {
            LinkState::HalfDuplex
        } else {
            LinkState::FullDuplex
        };
        let phi = TAU * self.rng.random::<f64>();
        let h_x: f64 = Exp1.sample(self.rng);
        let h_mx: f64 = Exp1.sample(self.rng);
        Some(LinkSample {
            x: [rho * cos, rho * sin],
            phi,
            state,
            h_x,
            h_mx,
        })
    }
}

impl<R: Rng + ?Sized> std::iter::FusedIterator for LinkSampler<'_, R> {}

/// One sampled network: every link whose transmitter falls in the window.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkRealization {
    pub links: Vec<LinkSample>,
    pub window_radius: f64,
    pub config: NetworkConfig,
    pub mac: MacProfile,
}

impl NetworkRealization {
    pub fn count(&self, state: LinkState) -> usize {
        self.links.iter().filter(|l| l.state == state).count()
    }

    pub fn interference(&self) -> f64 {
        self.links
            .iter()
            .map(|l| l.interference(self.config.r_link, self.config.alpha))
            .sum()
    }
}
