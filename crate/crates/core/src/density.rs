//! One-dimensional densities used both as proposals and as targets.
//!
//! Every family evaluates in log-space first; the linear-space evaluators are
//! thin `exp` wrappers. Weights are later formed as differences of log
//! densities, so far-tail ratios do not underflow before they are combined.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};

use crate::error::{Error, Result};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

fn check_finite(x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::NonFiniteInput(x))
    }
}

/// Gaussian `N(mean, variance)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianParams {
    mean: f64,
    variance: f64,
    ln_norm: f64,
}

impl GaussianParams {
    pub fn new(mean: f64, variance: f64) -> Result<Self> {
        if !mean.is_finite() {
            return Err(Error::InvalidParameter("gaussian mean must be finite"));
        }
        if !(variance.is_finite() && variance > 0.0) {
            return Err(Error::InvalidParameter("gaussian variance must be positive and finite"));
        }
        Ok(Self {
            mean,
            variance,
            ln_norm: -0.5 * (LN_2PI + libm::log(variance)),
        })
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn ln_pdf(&self, x: f64) -> Result<f64> {
        let d = check_finite(x)? - self.mean;
        Ok(self.ln_norm - d * d / (2.0 * self.variance))
    }
}

/// Non-standardized Student-t with location, squared scale and degrees of freedom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StudentTParams {
    location: f64,
    scale_sq: f64,
    dof: f64,
    ln_norm: f64,
}

impl StudentTParams {
    pub fn new(location: f64, scale_sq: f64, dof: f64) -> Result<Self> {
        if !location.is_finite() {
            return Err(Error::InvalidParameter("student-t location must be finite"));
        }
        if !(scale_sq.is_finite() && scale_sq > 0.0) {
            return Err(Error::InvalidParameter("student-t scale_sq must be positive and finite"));
        }
        if !(dof.is_finite() && dof > 0.0) {
            return Err(Error::InvalidParameter("student-t dof must be positive and finite"));
        }
        let ln_norm = libm::lgamma(0.5 * (dof + 1.0))
            - libm::lgamma(0.5 * dof)
            - 0.5 * libm::log(dof * PI * scale_sq);
        Ok(Self {
            location,
            scale_sq,
            dof,
            ln_norm,
        })
    }

    pub fn location(&self) -> f64 {
        self.location
    }

    pub fn scale_sq(&self) -> f64 {
        self.scale_sq
    }

    pub fn dof(&self) -> f64 {
        self.dof
    }

    pub fn ln_pdf(&self, x: f64) -> Result<f64> {
        let d = check_finite(x)? - self.location;
        let z = d * d / (self.dof * self.scale_sq);
        Ok(self.ln_norm - 0.5 * (self.dof + 1.0) * libm::log1p(z))
    }
}

/// A parametric proposal or mixture component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Gaussian(GaussianParams),
    StudentT(StudentTParams),
}

impl From<GaussianParams> for Family {
    fn from(p: GaussianParams) -> Self {
        Family::Gaussian(p)
    }
}

impl From<StudentTParams> for Family {
    fn from(p: StudentTParams) -> Self {
        Family::StudentT(p)
    }
}

impl Family {
    pub fn ln_pdf(&self, x: f64) -> Result<f64> {
        match self {
            Family::Gaussian(p) => p.ln_pdf(x),
            Family::StudentT(p) => p.ln_pdf(x),
        }
    }

    pub fn pdf(&self, x: f64) -> Result<f64> {
        self.ln_pdf(x).map(libm::exp)
    }

    /// Location parameter (the mean for Gaussians, the centre for Student-t).
    pub fn location(&self) -> f64 {
        match self {
            Family::Gaussian(p) => p.mean,
            Family::StudentT(p) => p.location,
        }
    }

    /// Mean of the distribution; undefined for Student-t with `dof <= 1`.
    pub fn mean(&self) -> Result<f64> {
        match self {
            Family::Gaussian(p) => Ok(p.mean),
            Family::StudentT(p) if p.dof > 1.0 => Ok(p.location),
            Family::StudentT(p) => Err(Error::MeanUndefined(p.dof)),
        }
    }

    /// True when `other` is the same density up to a shift of location.
    pub fn same_shape(&self, other: &Family) -> bool {
        match (self, other) {
            (Family::Gaussian(a), Family::Gaussian(b)) => a.variance == b.variance,
            (Family::StudentT(a), Family::StudentT(b)) => {
                a.scale_sq == b.scale_sq && a.dof == b.dof
            }
            _ => false,
        }
    }

    /// Draws one value.
    ///
    /// Gaussians consume one standard-normal draw. Student-t consumes a
    /// standard normal followed by a chi-square(dof) draw and returns
    /// `location + scale * z / sqrt(chi2 / dof)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Family::Gaussian(p) => {
                let z: f64 = StandardNormal.sample(rng);
                p.mean + libm::sqrt(p.variance) * z
            }
            Family::StudentT(p) => {
                let z: f64 = StandardNormal.sample(rng);
                // dof > 0 is a constructor invariant
                let chi2 = ChiSquared::new(p.dof)
                    .expect("validated dof")
                    .sample(rng);
                p.location + libm::sqrt(p.scale_sq) * z / libm::sqrt(chi2 / p.dof)
            }
        }
    }
}

/// Gaussian density at `x`.
pub fn eval_gaussian(x: f64, p: &GaussianParams) -> Result<f64> {
    p.ln_pdf(x).map(libm::exp)
}

/// Student-t density at `x`.
pub fn eval_student_t(x: f64, p: &StudentTParams) -> Result<f64> {
    p.ln_pdf(x).map(libm::exp)
}

/// Draws one value from `p`; see [`Family::sample`].
pub fn sample<R: Rng + ?Sized>(p: &Family, rng: &mut R) -> f64 {
    p.sample(rng)
}

/// `ln(sum(exp(terms)))` without overflow. A single term is returned unchanged.
pub(crate) fn log_sum_exp(terms: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = terms.clone().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    let sum: f64 = terms.map(|t| libm::exp(t - max)).sum();
    max + libm::log(sum)
}

/// A finite mixture `sum_i weight_i * density_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureSpec {
    components: Vec<(f64, Family)>,
    ln_weights: Vec<f64>,
}

impl MixtureSpec {
    pub fn new(components: Vec<(f64, Family)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidMixture("at least one component is required"));
        }
        if components
            .iter()
            .any(|(w, _)| !(w.is_finite() && *w > 0.0 && *w <= 1.0))
        {
            return Err(Error::InvalidMixture("component weights must lie in (0, 1]"));
        }
        let total: f64 = components.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidMixture("component weights must sum to 1"));
        }
        let ln_weights = components.iter().map(|(w, _)| libm::log(*w)).collect();
        Ok(Self {
            components,
            ln_weights,
        })
    }

    /// Equal-weight mixture of the given components.
    pub fn uniform(components: impl IntoIterator<Item = Family>) -> Result<Self> {
        let comps: Vec<Family> = components.into_iter().collect();
        let w = 1.0 / comps.len().max(1) as f64;
        Self::new(comps.into_iter().map(|c| (w, c)).collect())
    }

    pub fn components(&self) -> &[(f64, Family)] {
        &self.components
    }

    pub fn ln_pdf(&self, x: f64) -> Result<f64> {
        check_finite(x)?;
        let mut terms = Vec::with_capacity(self.components.len());
        for ((_, c), lw) in self.components.iter().zip(&self.ln_weights) {
            terms.push(lw + c.ln_pdf(x)?);
        }
        Ok(log_sum_exp(terms.iter().copied()))
    }
}

/// Mixture density at `x`: `sum_i weight_i * density_i(x)`.
pub fn eval_mixture(x: f64, m: &MixtureSpec) -> Result<f64> {
    check_finite(x)?;
    let mut acc = 0.0;
    for (w, c) in &m.components {
        acc += w * c.pdf(x)?;
    }
    Ok(acc)
}

/// Mean of a mixture, `sum_i weight_i * mean_i`.
pub fn reference_mean(m: &MixtureSpec) -> Result<f64> {
    let mut acc = 0.0;
    for (w, c) in &m.components {
        acc += w * c.mean()?;
    }
    Ok(acc)
}

/// Unnormalized target `pi(x) = Z * mixture(x)` with a known ground-truth mean.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSpec {
    density: MixtureSpec,
    normalizing_constant: f64,
    ln_z: f64,
    reference_mean: f64,
}

impl TargetSpec {
    /// Builds a target whose reference mean is the mixture mean.
    pub fn new(density: MixtureSpec, normalizing_constant: f64) -> Result<Self> {
        let mean = reference_mean(&density)?;
        Self::with_reference_mean(density, normalizing_constant, mean)
    }

    pub fn with_reference_mean(
        density: MixtureSpec,
        normalizing_constant: f64,
        reference_mean: f64,
    ) -> Result<Self> {
        if !(normalizing_constant.is_finite() && normalizing_constant > 0.0) {
            return Err(Error::NonPositiveNormalizer(normalizing_constant));
        }
        if !reference_mean.is_finite() {
            return Err(Error::InvalidParameter("reference mean must be finite"));
        }
        Ok(Self {
            density,
            normalizing_constant,
            ln_z: libm::log(normalizing_constant),
            reference_mean,
        })
    }

    pub fn density(&self) -> &MixtureSpec {
        &self.density
    }

    pub fn normalizing_constant(&self) -> f64 {
        self.normalizing_constant
    }

    pub fn reference_mean(&self) -> f64 {
        self.reference_mean
    }

    /// `ln pi(x)`.
    pub fn ln_unnormalized(&self, x: f64) -> Result<f64> {
        Ok(self.ln_z + self.density.ln_pdf(x)?)
    }

    /// `pi(x)`.
    pub fn unnormalized(&self, x: f64) -> Result<f64> {
        self.ln_unnormalized(x).map(libm::exp)
    }
}
