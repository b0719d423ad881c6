//! Per-hop channel model for cascaded Rayleigh fading with MRC reception.
//!
//! A hop's fading amplitude is the product of `cascade_order` independent
//! Rayleigh stages. The approximating law treats the combined SNR of L such
//! branches as a gamma-power variate: u ~ Gamma(Lm, rate β) raised to the
//! cascade order. Severity parameters (m, Ω) come from a polynomial fit in
//! the cascade order.

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};

use crate::error::{Error, Result};
use crate::real::{cast, Real};
use crate::special::{gamma_p, ln_gamma};

/// One relay hop: cascade order, average channel power gain, average SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopModel<R> {
    /// Number of cascaded Rayleigh stages n (1 = plain Rayleigh).
    pub cascade_order: u32,
    /// λ = E[|h|²], the end-to-end channel power gain.
    pub channel_gain: R,
    /// γ̄, the average received SNR on this hop (linear scale).
    pub avg_snr: R,
}

impl<R: Real> HopModel<R> {
    pub fn new(cascade_order: u32, channel_gain: R, avg_snr: R) -> Result<Self> {
        if cascade_order < 1 {
            return Err(Error::domain("cascade_order must be >= 1"));
        }
        if !(channel_gain > R::zero() && channel_gain.is_finite()) {
            return Err(Error::domain(format!(
                "channel_gain must be positive and finite, got {channel_gain}"
            )));
        }
        if !(avg_snr > R::zero() && avg_snr.is_finite()) {
            return Err(Error::domain(format!(
                "avg_snr must be positive and finite, got {avg_snr}"
            )));
        }
        Ok(Self {
            cascade_order,
            channel_gain,
            avg_snr,
        })
    }

    /// Product of the per-stage component variances: σ² with 2ⁿσ² = λ.
    pub fn stage_product_variance(&self) -> R {
        self.channel_gain / cast::<R>(2.0f64.powi(self.cascade_order as i32))
    }

    /// Same hop with a different average SNR.
    pub fn with_avg_snr(&self, avg_snr: R) -> Result<Self> {
        Self::new(self.cascade_order, self.channel_gain, avg_snr)
    }
}

/// Fitted fading-severity parameters for a given cascade order.
///
/// Returns (m, Ω) with m = 0.6102 n + 0.4263 and Ω = 0.8808 n^(−0.9661) + 1.12.
pub fn severity_params<R: Real>(n: u32) -> Result<(R, R)> {
    if n < 1 {
        return Err(Error::domain("cascade order must be >= 1"));
    }
    let nf: R = cast(n as f64);
    let m = cast::<R>(0.6102) * nf + cast(0.4263);
    let omega = cast::<R>(0.8808) * nf.powf(cast(-0.9661)) + cast(1.12);
    Ok((m, omega))
}

/// Derived parameters of the gamma-power approximating law for an L-branch
/// MRC combiner over one hop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeverityParams<R> {
    /// Fitted severity m for this cascade order.
    pub m: R,
    /// Fitted spread Ω for this cascade order.
    pub omega: R,
    /// Power-law exponent α = Lm/n.
    pub alpha: R,
    /// Exponential rate β = 2Lm / (Ω (Lγ̄)^{1/n}).
    pub beta: R,
    /// Number of MRC branches L.
    pub diversity: u32,
    /// Cascade order n, carried along for the γ^{1/n} stretch.
    pub cascade_order: u32,
}

impl<R: Real> SeverityParams<R> {
    pub fn for_hop(hop: &HopModel<R>, diversity: u32) -> Result<Self> {
        if diversity < 1 {
            return Err(Error::domain("diversity must be >= 1"));
        }
        let n = hop.cascade_order;
        let (m, omega) = severity_params::<R>(n)?;
        let l: R = cast(diversity as f64);
        let nf: R = cast(n as f64);
        let lm = l * m;
        let alpha = lm / nf;
        let beta = cast::<R>(2.0) * lm / (omega * (l * hop.avg_snr).powf(nf.recip()));
        Ok(Self {
            m,
            omega,
            alpha,
            beta,
            diversity,
            cascade_order: n,
        })
    }

    /// Combined shape parameter Lm of the underlying gamma variate.
    pub fn combined_shape(&self) -> R {
        cast::<R>(self.diversity as f64) * self.m
    }
}

/// Density of the gamma-power law: β^{Lm} γ^{α−1} exp(−β γ^{1/n}) / (n Γ(Lm)).
///
/// At γ = 0 this returns 0 for α > 1, the finite limit for α = 1, and +∞
/// for α < 1 (the density genuinely diverges there, e.g. single-branch
/// reception with cascade order ≥ 2).
fn gamma_power_pdf<R: Real>(params: &SeverityParams<R>, gamma: R) -> Result<R> {
    if !(gamma >= R::zero()) {
        return Err(Error::domain(format!("pdf requires gamma >= 0, got {gamma}")));
    }
    let n: R = cast(params.cascade_order as f64);
    let lm = params.combined_shape();
    if gamma == R::zero() {
        return Ok(if params.alpha > R::one() {
            R::zero()
        } else if params.alpha == R::one() {
            (lm * params.beta.ln() - n.ln() - ln_gamma(lm)?).exp()
        } else {
            R::infinity()
        });
    }
    let ln_pdf = lm * params.beta.ln() + (params.alpha - R::one()) * gamma.ln()
        - params.beta * gamma.powf(n.recip())
        - n.ln()
        - ln_gamma(lm)?;
    Ok(ln_pdf.exp())
}

/// CDF of the gamma-power law: P(Lm, β γ^{1/n}).
pub fn mrc_snr_cdf<R: Real>(hop: &HopModel<R>, diversity: u32, gamma_t: R) -> Result<R> {
    if !(gamma_t >= R::zero()) {
        return Err(Error::domain(format!("cdf requires gamma >= 0, got {gamma_t}")));
    }
    let params = SeverityParams::for_hop(hop, diversity)?;
    let n: R = cast(params.cascade_order as f64);
    gamma_p(params.combined_shape(), params.beta * gamma_t.powf(n.recip()))
}

/// Approximate density of the single-branch hop SNR.
pub fn hop_snr_pdf<R: Real>(hop: &HopModel<R>, gamma: R) -> Result<R> {
    mrc_snr_pdf(hop, 1, gamma)
}

/// Approximate density of the L-branch MRC combined SNR.
pub fn mrc_snr_pdf<R: Real>(hop: &HopModel<R>, diversity: u32, gamma_t: R) -> Result<R> {
    let params = SeverityParams::for_hop(hop, diversity)?;
    gamma_power_pdf(&params, gamma_t)
}

/// Approximate density of the combined fading amplitude h_t:
/// 2 q^{Lm} h^{2α−1} exp(−q h^{2/n}) / (n Γ(Lm)) with
/// q = (Lm/Ω) (L²σ²)^{−1/n}, σ² the per-stage product variance.
pub fn mrc_amplitude_pdf<R: Real>(hop: &HopModel<R>, diversity: u32, h_t: R) -> Result<R> {
    if !(h_t >= R::zero()) {
        return Err(Error::domain(format!("pdf requires h >= 0, got {h_t}")));
    }
    let params = SeverityParams::for_hop(hop, diversity)?;
    let n: R = cast(hop.cascade_order as f64);
    let l: R = cast(diversity as f64);
    let lm = params.combined_shape();
    let sigma2 = hop.stage_product_variance();
    let q = (lm / params.omega) * (l * l * sigma2).powf(-n.recip());
    let two_alpha = cast::<R>(2.0) * params.alpha;
    if h_t == R::zero() {
        return Ok(if two_alpha > R::one() {
            R::zero()
        } else if two_alpha == R::one() {
            (lm * q.ln() + cast::<R>(2.0).ln() - n.ln() - ln_gamma(lm)?).exp()
        } else {
            R::infinity()
        });
    }
    let ln_pdf = lm * q.ln() + cast::<R>(2.0).ln() + (two_alpha - R::one()) * h_t.ln()
        - q * h_t.powf(cast::<R>(2.0) / n)
        - n.ln()
        - ln_gamma(lm)?;
    Ok(ln_pdf.exp())
}

/// Draws one true cascaded-fading amplitude |∏ h_j| with per-stage
/// circularly-symmetric complex Gaussian stages scaled so E[|h|²] = λ.
pub fn sample_cascade_amplitude(hop: &HopModel<f64>, rng: &mut impl Rng) -> f64 {
    // per-stage component variance s²: (2s²)ⁿ = λ
    let s2 = (hop.channel_gain.ln() / hop.cascade_order as f64).exp() / 2.0;
    let mut amp = 1.0;
    for _ in 0..hop.cascade_order {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        amp *= (s2 * (re * re + im * im)).sqrt();
    }
    amp
}

/// Draws one branch SNR under the true cascaded law: γ = γ̄ · ∏ E_j with
/// unit-mean exponential stage powers.
pub fn sample_cascade_snr(hop: &HopModel<f64>, rng: &mut impl Rng) -> f64 {
    let mut g = hop.avg_snr;
    for _ in 0..hop.cascade_order {
        let e: f64 = rng.sample(Exp1);
        g *= e;
    }
    g
}

/// Draws one combined SNR from the gamma-power approximating law:
/// u ~ Gamma(Lm, rate β), returns uⁿ. Exact sampler for the law whose
/// density is [`mrc_snr_pdf`].
pub fn sample_mrc_snr_approx(params: &SeverityParams<f64>, rng: &mut impl Rng) -> f64 {
    let lm = params.combined_shape();
    let gamma = Gamma::new(lm, 1.0 / params.beta).expect("validated shape/scale");
    let u = gamma.sample(rng);
    u.powi(params.cascade_order as i32)
}
