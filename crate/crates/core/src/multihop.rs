//! End-to-end SNR combiners and closed-form performance metrics for N-hop
//! relay chains.
//!
//! Non-regenerative (amplify-and-forward) chains are characterized through
//! the geometric-mean upper bound on the harmonic equivalent SNR, whose
//! distribution has Meijer-G form; regenerative (decode-and-forward) chains
//! use the exact minimum-SNR law of the per-hop approximations.

use crate::channel::{HopModel, SeverityParams};
use crate::error::{Error, Result};
use crate::real::{cast, Real};
use crate::special::{
    gamma_q, ln_gamma, meijer_g_normalized, ContourSpec, MeijerGKind, MeijerGParams,
};

/// Relaying scheme of a chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Decode-and-forward: each relay regenerates, end-to-end SNR is the
    /// per-hop minimum.
    Regenerative,
    /// Amplify-and-forward: end-to-end SNR is harmonically combined.
    NonRegenerative,
}

/// An N-hop relay chain with L-branch MRC reception on every hop.
#[derive(Debug, Clone, PartialEq)]
pub struct RelayChain<R> {
    hops: Vec<HopModel<R>>,
    diversity: u32,
    scheme: Scheme,
}

impl<R: Real> RelayChain<R> {
    pub fn new(hops: Vec<HopModel<R>>, diversity: u32, scheme: Scheme) -> Result<Self> {
        if hops.is_empty() {
            return Err(Error::Empty);
        }
        if diversity < 1 {
            return Err(Error::domain("diversity must be >= 1"));
        }
        Ok(Self {
            hops,
            diversity,
            scheme,
        })
    }

    pub fn hops(&self) -> &[HopModel<R>] {
        &self.hops
    }

    pub fn num_hops(&self) -> usize {
        self.hops.len()
    }

    pub fn diversity(&self) -> u32 {
        self.diversity
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// Per-hop approximating-law parameters at this chain's diversity.
    pub fn severity(&self) -> Result<Vec<SeverityParams<R>>> {
        self.hops
            .iter()
            .map(|h| SeverityParams::for_hop(h, self.diversity))
            .collect()
    }

    /// The cascade order shared by every hop, or an error when mixed.
    pub fn common_cascade_order(&self) -> Result<u32> {
        let n = self.hops[0].cascade_order;
        if self.hops.iter().any(|h| h.cascade_order != n) {
            return Err(Error::MixedCascadeOrder);
        }
        Ok(n)
    }

    /// Errors unless every hop has the same cascade order and average SNR.
    fn require_identical_hops(&self) -> Result<&HopModel<R>> {
        let first = &self.hops[0];
        if self
            .hops
            .iter()
            .any(|h| h.cascade_order != first.cascade_order || h.avg_snr != first.avg_snr)
        {
            return Err(Error::NonIdenticalHops);
        }
        Ok(first)
    }

    /// Same chain with every hop's average SNR multiplied by `factor`.
    pub fn scaled_avg_snr(&self, factor: R) -> Result<Self> {
        let hops = self
            .hops
            .iter()
            .map(|h| h.with_avg_snr(h.avg_snr * factor))
            .collect::<Result<Vec<_>>>()?;
        Self::new(hops, self.diversity, self.scheme)
    }
}

/// One point of an outage sweep, as emitted by the batch harness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutagePoint {
    /// Average SNR of the sweep variable, in dB.
    pub snr_db: f64,
    /// Outage threshold γ_th (linear).
    pub threshold: f64,
    /// Closed-form outage probability.
    pub analytic: f64,
    /// High-SNR asymptote, when one exists for the configuration.
    pub asymptotic: Option<f64>,
    /// Monte-Carlo estimate, when simulation was requested.
    pub mc_estimate: Option<f64>,
    /// Binomial standard error of the Monte-Carlo estimate.
    pub mc_stderr: Option<f64>,
}

fn check_positive_snrs<R: Real>(branch_snrs: &[R]) -> Result<()> {
    if branch_snrs.is_empty() {
        return Err(Error::Empty);
    }
    if let Some(bad) = branch_snrs.iter().find(|g| !(**g > R::zero())) {
        return Err(Error::domain(format!("branch SNRs must be positive, got {bad}")));
    }
    Ok(())
}

/// Harmonic end-to-end SNR of an amplify-and-forward chain: (Σ 1/γ_i)⁻¹.
pub fn af_equivalent_snr<R: Real>(branch_snrs: &[R]) -> Result<R> {
    check_positive_snrs(branch_snrs)?;
    let inv_sum = branch_snrs
        .iter()
        .fold(R::zero(), |acc, g| acc + g.recip());
    Ok(inv_sum.recip())
}

/// Geometric-mean upper bound on [`af_equivalent_snr`]: (1/N) ∏ γ_i^{1/N}.
pub fn af_geometric_bound<R: Real>(branch_snrs: &[R]) -> Result<R> {
    check_positive_snrs(branch_snrs)?;
    let n: R = cast(branch_snrs.len() as f64);
    let ln_mean = branch_snrs
        .iter()
        .fold(R::zero(), |acc, g| acc + g.ln())
        / n;
    Ok(ln_mean.exp() / n)
}

/// End-to-end SNR of a decode-and-forward chain: the per-hop minimum.
pub fn df_equivalent_snr<R: Real>(branch_snrs: &[R]) -> Result<R> {
    check_positive_snrs(branch_snrs)?;
    Ok(branch_snrs
        .iter()
        .fold(R::infinity(), |acc, g| acc.min(*g)))
}

/// k-th moment of the geometric SNR bound:
/// N^{−k} ∏ β_i^{−nk/N} [Γ(nk/N + Lm) / Γ(Lm)]^N.
pub fn af_snr_moment<R: Real>(chain: &RelayChain<R>, k: R) -> Result<R> {
    if !(k > R::zero()) {
        return Err(Error::domain(format!("moment order must be positive, got {k}")));
    }
    let n_hops: R = cast(chain.num_hops() as f64);
    let n = chain.common_cascade_order()?;
    let nf: R = cast(n as f64);
    let params = chain.severity()?;
    let lm = params[0].combined_shape();
    let shift = nf * k / n_hops;
    let ln_gamma_ratio = ln_gamma(shift + lm)? - ln_gamma(lm)?;
    let mut ln_val = -k * n_hops.ln() + n_hops * ln_gamma_ratio;
    for p in &params {
        ln_val = ln_val - shift * p.beta.ln();
    }
    Ok(ln_val.exp())
}

/// ln of the Meijer-G argument (Nγ)^{N/n} ∏ β_i for a chain.
fn ln_bound_argument<R: Real>(chain: &RelayChain<R>, gamma_t: R) -> Result<(R, R, usize)> {
    let n = chain.common_cascade_order()?;
    let nf: R = cast(n as f64);
    let n_hops = chain.num_hops();
    let nh: R = cast(n_hops as f64);
    let params = chain.severity()?;
    let lm = params[0].combined_shape();
    let mut ln_z = (nh / nf) * (nh.ln() + gamma_t.ln());
    for p in &params {
        ln_z += p.beta.ln();
    }
    Ok((ln_z, lm, n_hops))
}

/// Density of the geometric SNR bound of a non-regenerative chain.
pub fn af_pdf_bound<R: Real>(chain: &RelayChain<R>, gamma_t: R) -> Result<R> {
    if !(gamma_t > R::zero()) {
        return Err(Error::domain(format!("pdf bound requires gamma > 0, got {gamma_t}")));
    }
    let n = chain.common_cascade_order()?;
    let (ln_z, lm, n_hops) = ln_bound_argument(chain, gamma_t)?;
    let params = MeijerGParams::new(n_hops as u32, lm, MeijerGKind::PdfKernel)?;
    let kernel = meijer_g_normalized(&params, ln_z.exp(), &ContourSpec::recommended())?;
    let scale = cast::<R>(n_hops as f64) / cast::<R>(n as f64);
    Ok(scale * kernel / gamma_t)
}

/// Distribution of the geometric SNR bound of a non-regenerative chain.
pub fn af_cdf_bound<R: Real>(chain: &RelayChain<R>, gamma_t: R) -> Result<R> {
    if !(gamma_t >= R::zero()) {
        return Err(Error::domain(format!("cdf bound requires gamma >= 0, got {gamma_t}")));
    }
    if gamma_t == R::zero() {
        chain.common_cascade_order()?;
        return Ok(R::zero());
    }
    let (ln_z, lm, n_hops) = ln_bound_argument(chain, gamma_t)?;
    let params = MeijerGParams::new(n_hops as u32, lm, MeijerGKind::CdfKernel)?;
    let v = meijer_g_normalized(&params, ln_z.exp(), &ContourSpec::recommended())?;
    Ok(v.min(R::one()).max(R::zero()))
}

/// Closed-form special case of [`af_pdf_bound`] for two hops, in terms of
/// the modified Bessel function K₀.
pub fn af_pdf_dualhop<R: Real>(chain: &RelayChain<R>, gamma_t: R) -> Result<R> {
    if chain.num_hops() != 2 {
        return Err(Error::HopCount {
            expected: 2,
            got: chain.num_hops(),
        });
    }
    if !(gamma_t > R::zero()) {
        return Err(Error::domain(format!("pdf requires gamma > 0, got {gamma_t}")));
    }
    let n = chain.common_cascade_order()?;
    let nf: R = cast(n as f64);
    let params = chain.severity()?;
    let lm = params[0].combined_shape();
    let ln_z = (cast::<R>(2.0) / nf) * (cast::<R>(2.0) * gamma_t).ln()
        + params[0].beta.ln()
        + params[1].beta.ln();
    // (4/n) γ^{−1} z^{Lm} K₀(2√z) / Γ²(Lm)
    let sqrt_z = (ln_z * cast(0.5)).exp();
    let k0 = crate::special::bessel_k0(cast::<R>(2.0) * sqrt_z)?;
    if k0 == R::zero() {
        return Ok(R::zero());
    }
    let ln_pdf = (cast::<R>(4.0) / nf).ln() - gamma_t.ln() + lm * ln_z + k0.ln()
        - cast::<R>(2.0) * ln_gamma(lm)?;
    Ok(ln_pdf.exp())
}

/// Distribution of the minimum per-hop SNR of a regenerative chain:
/// 1 − ∏ Q(Lm_i, β_i γ^{1/n_i}). Hops may differ in cascade order.
pub fn df_cdf<R: Real>(chain: &RelayChain<R>, gamma_t: R) -> Result<R> {
    if !(gamma_t >= R::zero()) {
        return Err(Error::domain(format!("cdf requires gamma >= 0, got {gamma_t}")));
    }
    if gamma_t == R::zero() {
        return Ok(R::zero());
    }
    let mut survive = R::one();
    for p in &chain.severity()? {
        let nf: R = cast(p.cascade_order as f64);
        let x = p.beta * gamma_t.powf(nf.recip());
        survive = survive * gamma_q(p.combined_shape(), x)?;
    }
    Ok((R::one() - survive).min(R::one()).max(R::zero()))
}

/// Outage probability Pr(γ_eq ≤ γ_th), dispatching on the chain's scheme.
pub fn outage_probability<R: Real>(chain: &RelayChain<R>, gamma_th: R) -> Result<R> {
    if !(gamma_th > R::zero()) {
        return Err(Error::domain(format!("threshold must be positive, got {gamma_th}")));
    }
    match chain.scheme() {
        Scheme::Regenerative => df_cdf(chain, gamma_th),
        Scheme::NonRegenerative => af_cdf_bound(chain, gamma_th),
    }
}

/// High-SNR outage asymptote for i.i.d. regenerative chains:
/// N (β γ_th^{1/n})^{Lm} / (Lm Γ(Lm)).
pub fn df_outage_asymptotic<R: Real>(chain: &RelayChain<R>, gamma_th: R) -> Result<R> {
    if !(gamma_th > R::zero()) {
        return Err(Error::domain(format!("threshold must be positive, got {gamma_th}")));
    }
    if chain.scheme() != Scheme::Regenerative {
        return Err(Error::NotRegenerative);
    }
    let hop = chain.require_identical_hops()?;
    let p = SeverityParams::for_hop(hop, chain.diversity())?;
    let nf: R = cast(p.cascade_order as f64);
    let lm = p.combined_shape();
    let ln_term = lm * (p.beta.ln() + gamma_th.ln() / nf);
    let ln_val = cast::<R>(chain.num_hops() as f64).ln() + ln_term - lm.ln() - ln_gamma(lm)?;
    Ok(ln_val.exp())
}

/// Amount of fading (variance over squared mean) of the geometric SNR
/// bound: [Γ(Lm) Γ(2n/N + Lm) / Γ²(n/N + Lm)]^N − 1.
pub fn amount_of_fading<R: Real>(chain: &RelayChain<R>) -> Result<R> {
    let n = chain.common_cascade_order()?;
    let nf: R = cast(n as f64);
    let nh: R = cast(chain.num_hops() as f64);
    let lm = chain.severity()?[0].combined_shape();
    let r = nf / nh;
    let ln_bracket = ln_gamma(lm)? + ln_gamma(cast::<R>(2.0) * r + lm)?
        - cast::<R>(2.0) * ln_gamma(r + lm)?;
    Ok((nh * ln_bracket).exp() - R::one())
}
