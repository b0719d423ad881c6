//! Monte-Carlo simulation engine (f64 only).
//!
//! Two source laws are supported: the true cascaded-Rayleigh fading chain
//! and the gamma-power law that the closed forms are built on. Keeping both
//! separates "does the code implement the formulas" (validated against the
//! exact law) from "how accurate is the approximation" (measured against
//! the true law).
//!
//! Reproducibility: trials are split into batches; batch k draws from
//! ChaCha12 stream k+1 of the plan's seed (stream 0 is reserved for pilot
//! runs). Batches may run in parallel but are always reduced in batch-index
//! order, so results are bit-identical for a fixed (seed, trials,
//! batch_size) regardless of scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::channel::{sample_cascade_snr, sample_mrc_snr_approx, SeverityParams};
use crate::error::{Error, Result};
use crate::multihop::{af_geometric_bound, RelayChain, Scheme};

/// Which law the simulated branch SNRs follow.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceLaw {
    /// Product of Rayleigh stages per branch, MRC sum across branches.
    TrueCascade,
    /// Gamma-power approximating law, sampled exactly.
    ApproxGammaPower,
}

/// How per-hop SNRs are combined into the end-to-end SNR.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CombineRule {
    /// Harmonic sum for non-regenerative chains, minimum for regenerative
    /// ones, per the plan's chain scheme.
    PerScheme,
    /// Geometric-mean upper bound, the variate the closed forms describe.
    GeometricBound,
}

/// Which variate a PDF simulation histograms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PdfVariate {
    /// MRC fading envelope of the first hop (linear-spaced bins).
    Amplitude,
    /// End-to-end SNR under the combine rule (log-spaced bins).
    Snr,
}

/// A full simulation request.
#[derive(Debug, Clone)]
pub struct SimPlan {
    pub chain: RelayChain<f64>,
    pub source_law: SourceLaw,
    pub trials: u64,
    pub seed: u64,
    pub batch_size: u64,
}

impl SimPlan {
    pub fn new(
        chain: RelayChain<f64>,
        source_law: SourceLaw,
        trials: u64,
        seed: u64,
        batch_size: u64,
    ) -> Result<Self> {
        if trials == 0 {
            return Err(Error::domain("trials must be positive"));
        }
        if batch_size == 0 {
            return Err(Error::domain("batch_size must be positive"));
        }
        Ok(Self {
            chain,
            source_law,
            trials,
            seed,
            batch_size,
        })
    }

    fn batches(&self) -> Vec<(u64, u64)> {
        let full = self.trials / self.batch_size;
        let rem = self.trials % self.batch_size;
        let mut out: Vec<(u64, u64)> = (0..full).map(|k| (k, self.batch_size)).collect();
        if rem > 0 {
            out.push((full, rem));
        }
        out
    }

    fn rng_for_stream(&self, stream: u64) -> ChaCha12Rng {
        let mut rng = ChaCha12Rng::seed_from_u64(self.seed);
        rng.set_stream(stream);
        rng
    }
}

/// Draws one end-to-end SNR according to the plan's source law and the
/// given combine rule.
fn draw_equivalent_snr(
    plan: &SimPlan,
    params: &[SeverityParams<f64>],
    rule: CombineRule,
    rng: &mut ChaCha12Rng,
    scratch: &mut Vec<f64>,
) -> f64 {
    scratch.clear();
    let l = plan.chain.diversity();
    match plan.source_law {
        SourceLaw::TrueCascade => {
            for hop in plan.chain.hops() {
                let mut snr = 0.0;
                for _ in 0..l {
                    snr += sample_cascade_snr(hop, rng);
                }
                scratch.push(snr);
            }
        }
        SourceLaw::ApproxGammaPower => {
            for p in params {
                scratch.push(sample_mrc_snr_approx(p, rng));
            }
        }
    }
    match rule {
        CombineRule::GeometricBound => af_geometric_bound(scratch).expect("positive draws"),
        CombineRule::PerScheme => match plan.chain.scheme() {
            Scheme::Regenerative => scratch.iter().copied().fold(f64::INFINITY, f64::min),
            Scheme::NonRegenerative => {
                let inv: f64 = scratch.iter().map(|g| 1.0 / g).sum();
                1.0 / inv
            }
        },
    }
}

/// Runs batches in parallel and folds per-batch results in index order.
fn run_batches<T, F>(plan: &SimPlan, per_batch: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut ChaCha12Rng, u64) -> T + Sync,
{
    let params = plan.chain.severity()?; // validate once up front
    drop(params);
    let batches = plan.batches();
    Ok(batches
        .par_iter()
        .map(|&(k, count)| {
            let mut rng = plan.rng_for_stream(k + 1);
            per_batch(&mut rng, count)
        })
        .collect())
}

/// Outage estimate with its confidence bookkeeping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OutageEstimate {
    /// Fraction of trials with end-to-end SNR at or below the threshold.
    pub estimate: f64,
    /// Binomial standard error √(p̂(1−p̂)/trials).
    pub stderr: f64,
    /// Raw failure count.
    pub failures: u64,
    /// True when fewer than 100 failures were observed; the estimate's
    /// relative error is then poorly controlled and callers should either
    /// raise `trials` or flag the point.
    pub low_confidence: bool,
}

/// Empirical outage probability at `gamma_th` under the plan's scheme.
pub fn run_outage_sim(plan: &SimPlan, gamma_th: f64) -> Result<OutageEstimate> {
    run_outage_sim_with(plan, gamma_th, CombineRule::PerScheme)
}

/// Empirical outage probability with an explicit combine rule.
pub fn run_outage_sim_with(
    plan: &SimPlan,
    gamma_th: f64,
    rule: CombineRule,
) -> Result<OutageEstimate> {
    if !(gamma_th > 0.0) {
        return Err(Error::domain(format!("threshold must be positive, got {gamma_th}")));
    }
    let params = plan.chain.severity()?;
    let counts = run_batches(plan, |rng, count| {
        let mut scratch = Vec::with_capacity(plan.chain.num_hops());
        let mut hits = 0u64;
        for _ in 0..count {
            if draw_equivalent_snr(plan, &params, rule, rng, &mut scratch) <= gamma_th {
                hits += 1;
            }
        }
        hits
    })?;
    let failures: u64 = counts.iter().sum();
    let p = failures as f64 / plan.trials as f64;
    let stderr = (p * (1.0 - p) / plan.trials as f64).sqrt();
    Ok(OutageEstimate {
        estimate: p,
        stderr,
        failures,
        low_confidence: failures < 100,
    })
}

/// Equal-width or log-spaced binned sample counts.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    /// Strictly increasing bin edges (`counts.len() + 1` of them).
    pub bin_edges: Vec<f64>,
    /// Per-bin counts; out-of-range samples are clamped into the edge bins.
    pub counts: Vec<u64>,
    /// Total number of samples (Σ counts).
    pub total: u64,
}

impl Histogram {
    /// Empirical density of bin `i`: count / (total · width).
    pub fn density(&self, i: usize) -> f64 {
        let width = self.bin_edges[i + 1] - self.bin_edges[i];
        self.counts[i] as f64 / (self.total as f64 * width)
    }

    /// Midpoint of bin `i`.
    pub fn midpoint(&self, i: usize) -> f64 {
        0.5 * (self.bin_edges[i] + self.bin_edges[i + 1])
    }

    fn bin_of(&self, x: f64) -> usize {
        let n = self.counts.len();
        match self
            .bin_edges
            .binary_search_by(|e| e.partial_cmp(&x).unwrap_or(core::cmp::Ordering::Less))
        {
            Ok(i) => i.min(n - 1),
            Err(0) => 0,
            Err(i) => (i - 1).min(n - 1),
        }
    }
}

fn draw_variate(
    plan: &SimPlan,
    params: &[SeverityParams<f64>],
    variate: PdfVariate,
    rule: CombineRule,
    rng: &mut ChaCha12Rng,
    scratch: &mut Vec<f64>,
) -> f64 {
    match variate {
        PdfVariate::Snr => draw_equivalent_snr(plan, params, rule, rng, scratch),
        PdfVariate::Amplitude => {
            let hop = &plan.chain.hops()[0];
            let l = plan.chain.diversity();
            match plan.source_law {
                SourceLaw::TrueCascade => {
                    let mut s = 0.0;
                    for _ in 0..l {
                        let a = crate::channel::sample_cascade_amplitude(hop, rng);
                        s += a * a;
                    }
                    s.sqrt()
                }
                SourceLaw::ApproxGammaPower => {
                    // invert γ_t = γ̄ h² / (L λ) on an exact-law SNR draw
                    let g = sample_mrc_snr_approx(&params[0], rng);
                    (l as f64 * hop.channel_gain * g / hop.avg_snr).sqrt()
                }
            }
        }
    }
}

/// Histograms the requested variate over `bins` bins.
///
/// Edges cover the [0.001, 0.999] quantile range of a 10⁴-draw pilot run on
/// stream 0: log-spaced for SNR, linear (anchored at 0) for amplitude.
pub fn run_pdf_sim(plan: &SimPlan, bins: usize, variate: PdfVariate) -> Result<Histogram> {
    run_pdf_sim_with(plan, bins, variate, CombineRule::PerScheme)
}

/// [`run_pdf_sim`] with an explicit combine rule for the SNR variate.
pub fn run_pdf_sim_with(
    plan: &SimPlan,
    bins: usize,
    variate: PdfVariate,
    rule: CombineRule,
) -> Result<Histogram> {
    if bins < 10 {
        return Err(Error::domain("pdf histogram needs at least 10 bins"));
    }
    let params = plan.chain.severity()?;

    // pilot on the reserved stream
    let mut pilot_rng = plan.rng_for_stream(0);
    let mut scratch = Vec::with_capacity(plan.chain.num_hops());
    let pilot_n = 10_000usize;
    let mut pilot: Vec<f64> = (0..pilot_n)
        .map(|_| draw_variate(plan, &params, variate, rule, &mut pilot_rng, &mut scratch))
        .collect();
    pilot.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let lo = pilot[pilot_n / 1000];
    let hi = pilot[pilot_n - 1 - pilot_n / 1000];

    let bin_edges: Vec<f64> = match variate {
        PdfVariate::Snr => {
            let (lln, hln) = (lo.ln(), hi.ln());
            (0..=bins)
                .map(|i| (lln + (hln - lln) * i as f64 / bins as f64).exp())
                .collect()
        }
        PdfVariate::Amplitude => (0..=bins).map(|i| hi * i as f64 / bins as f64).collect(),
    };

    run_pdf_sim_on_edges(plan, bin_edges, variate, rule)
}

/// Histograms the requested variate over caller-supplied bin edges.
pub fn run_pdf_sim_on_edges(
    plan: &SimPlan,
    bin_edges: Vec<f64>,
    variate: PdfVariate,
    rule: CombineRule,
) -> Result<Histogram> {
    if bin_edges.len() < 2 || bin_edges.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::domain("bin edges must be strictly increasing"));
    }
    let bins = bin_edges.len() - 1;
    let params = plan.chain.severity()?;
    let mut hist = Histogram {
        bin_edges,
        counts: vec![0; bins],
        total: plan.trials,
    };
    let per_batch_counts = run_batches(plan, |rng, count| {
        let mut scratch = Vec::with_capacity(plan.chain.num_hops());
        let mut counts = vec![0u64; bins];
        for _ in 0..count {
            let x = draw_variate(plan, &params, variate, rule, rng, &mut scratch);
            counts[hist.bin_of(x)] += 1;
        }
        counts
    })?;
    for batch in per_batch_counts {
        for (dst, src) in hist.counts.iter_mut().zip(batch) {
            *dst += src;
        }
    }
    debug_assert_eq!(hist.counts.iter().sum::<u64>(), hist.total);
    Ok(hist)
}

/// Sample amount of fading: variance over squared mean.
pub fn af_of_samples(samples: &[f64]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Empty);
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if mean == 0.0 {
        return Err(Error::domain("amount of fading undefined for zero-mean samples"));
    }
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    Ok(var / (mean * mean))
}

/// Empirical amount of fading of the end-to-end SNR under the plan's scheme.
pub fn empirical_af(plan: &SimPlan) -> Result<f64> {
    empirical_af_with(plan, CombineRule::PerScheme)
}

/// [`empirical_af`] with an explicit combine rule.
pub fn empirical_af_with(plan: &SimPlan, rule: CombineRule) -> Result<f64> {
    let params = plan.chain.severity()?;
    let sums = run_batches(plan, |rng, count| {
        let mut scratch = Vec::with_capacity(plan.chain.num_hops());
        let (mut s1, mut s2) = (0.0f64, 0.0f64);
        for _ in 0..count {
            let g = draw_equivalent_snr(plan, &params, rule, rng, &mut scratch);
            s1 += g;
            s2 += g * g;
        }
        (s1, s2)
    })?;
    let (s1, s2) = sums
        .into_iter()
        .fold((0.0, 0.0), |(a1, a2), (b1, b2)| (a1 + b1, a2 + b2));
    let n = plan.trials as f64;
    let mean = s1 / n;
    let var = s2 / n - mean * mean;
    Ok(var / (mean * mean))
}

/// Kolmogorov–Smirnov distance between the samples' empirical CDF and an
/// analytic CDF. At the 5% level the null is rejected above 1.63/√n.
pub fn ks_distance<F>(samples: &[f64], analytic_cdf: F) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if samples.is_empty() {
        return Err(Error::Empty);
    }
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    let mut ks: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = analytic_cdf(x)?;
        ks = ks
            .max((f - i as f64 / n).abs())
            .max((f - (i + 1) as f64 / n).abs());
    }
    Ok(ks)
}

/// Draws `plan.trials` end-to-end SNR samples (for KS tests and similar
/// whole-sample diagnostics).
pub fn draw_equivalent_snrs(plan: &SimPlan, rule: CombineRule) -> Result<Vec<f64>> {
    let params = plan.chain.severity()?;
    let per_batch = run_batches(plan, |rng, count| {
        let mut scratch = Vec::with_capacity(plan.chain.num_hops());
        (0..count)
            .map(|_| draw_equivalent_snr(plan, &params, rule, rng, &mut scratch))
            .collect::<Vec<f64>>()
    })?;
    Ok(per_batch.into_iter().flatten().collect())
}
