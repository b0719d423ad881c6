//! Outage-minimizing power allocation for regenerative chains under a total
//! power constraint, plus the equal-power baseline and the high-power
//! asymptotic split.
//!
//! The stationarity system is transcendental: each hop's share satisfies
//! P_i ∝ X_i^{Lm_i} e^{−X_i} / (n_i Γ(Lm_i, X_i)) with X_i = β_i γ_th^{1/n_i},
//! where β_i itself depends on γ̄_i = P_i λ_i. It is solved by damped
//! fixed-point iteration from the equal split, with a bisection fallback on
//! two-hop instances.

use crate::channel::{HopModel, SeverityParams};
use crate::error::{Error, Result};
use crate::multihop::{df_cdf, RelayChain, Scheme};
use crate::real::{cast, to_f64, Real};
use crate::special::ln_upper_incomplete_gamma;

/// A total power budget split across hops.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerBudget<R> {
    /// Total transmit power P_T.
    pub total: R,
    /// Per-hop allocations P_i, summing to `total`.
    pub allocations: Vec<R>,
}

impl<R: Real> PowerBudget<R> {
    pub fn new(total: R, allocations: Vec<R>) -> Result<Self> {
        if !(total > R::zero()) {
            return Err(Error::domain(format!("total power must be positive, got {total}")));
        }
        if allocations.is_empty() {
            return Err(Error::Empty);
        }
        if let Some(bad) = allocations.iter().find(|p| !(**p > R::zero())) {
            return Err(Error::domain(format!("allocations must be positive, got {bad}")));
        }
        let sum = allocations.iter().fold(R::zero(), |a, b| a + *b);
        if ((sum - total) / total).abs() > cast(1e-9) {
            return Err(Error::domain(format!(
                "allocations sum to {sum}, expected {total}"
            )));
        }
        Ok(Self { total, allocations })
    }

    /// Equal split across `hops` hops.
    pub fn equal(total: R, hops: usize) -> Result<Self> {
        if hops == 0 {
            return Err(Error::Empty);
        }
        Self::new(total, vec![total / cast(hops as f64); hops])
    }

    /// Fractions ρ_i = P_i / P_T.
    pub fn ratios(&self) -> Vec<R> {
        self.allocations.iter().map(|p| *p / self.total).collect()
    }

    /// Per-branch power P_i / L.
    pub fn per_branch(&self, diversity: u32) -> Vec<R> {
        let l: R = cast(diversity as f64);
        self.allocations.iter().map(|p| *p / l).collect()
    }
}

/// Result of a power-allocation solve.
#[derive(Debug, Clone, PartialEq)]
pub struct PaSolveReport<R> {
    pub budget: PowerBudget<R>,
    /// Fixed-point iterations performed.
    pub iterations: usize,
    /// Max relative allocation change on the final iteration.
    pub residual: R,
    pub converged: bool,
}

fn check_pa_inputs<R: Real>(
    chain: &RelayChain<R>,
    gains: &[R],
    p_total: R,
    gamma_th: R,
) -> Result<()> {
    if chain.scheme() != Scheme::Regenerative {
        return Err(Error::NotRegenerative);
    }
    if gains.len() != chain.num_hops() {
        return Err(Error::HopCount {
            expected: chain.num_hops(),
            got: gains.len(),
        });
    }
    if let Some(bad) = gains.iter().find(|g| !(**g > R::zero())) {
        return Err(Error::domain(format!("channel gains must be positive, got {bad}")));
    }
    if !(p_total > R::zero()) {
        return Err(Error::domain(format!("total power must be positive, got {p_total}")));
    }
    if !(gamma_th > R::zero()) {
        return Err(Error::domain(format!("threshold must be positive, got {gamma_th}")));
    }
    Ok(())
}

/// ln of the un-normalized stationarity weight for hop `i` at power `p`:
/// Lm ln X − X − ln n − ln Γ(Lm, X), with X = β γ_th^{1/n} and β evaluated
/// at γ̄ = p λ.
fn ln_weight<R: Real>(
    hop: &HopModel<R>,
    gain: R,
    diversity: u32,
    p: R,
    gamma_th: R,
) -> Result<R> {
    let powered = HopModel::new(hop.cascade_order, gain, p * gain)?;
    let sp = SeverityParams::for_hop(&powered, diversity)?;
    let nf: R = cast(hop.cascade_order as f64);
    let a = sp.combined_shape();
    let x = sp.beta * gamma_th.powf(nf.recip());
    Ok(a * x.ln() - x - nf.ln() - ln_upper_incomplete_gamma(a, x)?)
}

/// Solves the stationarity system for the outage-minimizing split of
/// `p_total` across the chain's hops, where hop i's average SNR is P_i λ_i.
pub fn solve_pa<R: Real>(
    chain: &RelayChain<R>,
    gains: &[R],
    p_total: R,
    gamma_th: R,
) -> Result<PaSolveReport<R>> {
    check_pa_inputs(chain, gains, p_total, gamma_th)?;
    let n = chain.num_hops();
    let l = chain.diversity();
    let floor = cast::<R>(1e-6) * p_total;
    let tol: R = cast::<R>(1e-10).max(R::epsilon() * cast(100.0));
    let damp: R = cast(0.5);

    let mut p: Vec<R> = vec![p_total / cast(n as f64); n];
    let mut residual = R::infinity();
    for iter in 1..=10_000usize {
        let mut ln_w = Vec::with_capacity(n);
        for (hop, (&g, &pi)) in chain.hops().iter().zip(gains.iter().zip(p.iter())) {
            ln_w.push(ln_weight(hop, g, l, pi, gamma_th)?);
        }
        let mx = ln_w.iter().fold(R::neg_infinity(), |a, b| a.max(*b));
        let w: Vec<R> = ln_w.iter().map(|v| (*v - mx).exp()).collect();
        let wsum = w.iter().fold(R::zero(), |a, b| a + *b);

        let mut next: Vec<R> = p
            .iter()
            .zip(w.iter())
            .map(|(&pi, &wi)| {
                let target = p_total * wi / wsum;
                (pi * damp + target * (R::one() - damp)).max(floor).min(p_total)
            })
            .collect();
        let s = next.iter().fold(R::zero(), |a, b| a + *b);
        for v in next.iter_mut() {
            *v = *v * p_total / s;
        }

        residual = p
            .iter()
            .zip(next.iter())
            .map(|(a, b)| (*a - *b).abs() / p_total)
            .fold(R::zero(), |a, b| a.max(b));
        p = next;
        if residual <= tol {
            return Ok(PaSolveReport {
                budget: PowerBudget::new(p_total, p)?,
                iterations: iter,
                residual,
                converged: true,
            });
        }
    }

    if n == 2 {
        // damped iteration can limit-cycle on lopsided two-hop instances;
        // the scalar stationarity equation is solved directly instead
        let budget = pa_dualhop(chain, gains, p_total, gamma_th)?;
        return Ok(PaSolveReport {
            budget,
            iterations: 10_000,
            residual: R::zero(),
            converged: true,
        });
    }
    Err(Error::PaNonConverged {
        iterations: 10_000,
        residual: to_f64(residual),
    })
}

/// Two-hop specialization: the stationarity condition reduces to a scalar
/// root-finding problem in ρ = P₁/P_T, solved by bisection.
pub fn pa_dualhop<R: Real>(
    chain: &RelayChain<R>,
    gains: &[R],
    p_total: R,
    gamma_th: R,
) -> Result<PowerBudget<R>> {
    check_pa_inputs(chain, gains, p_total, gamma_th)?;
    if chain.num_hops() != 2 {
        return Err(Error::HopCount {
            expected: 2,
            got: chain.num_hops(),
        });
    }
    let l = chain.diversity();
    // equal ln-weight-per-ln-power balance: g(ρ) → +∞ at 0⁺, −∞ at 1⁻
    let imbalance = |rho: R| -> Result<R> {
        let p1 = rho * p_total;
        let p2 = (R::one() - rho) * p_total;
        let a = ln_weight(&chain.hops()[0], gains[0], l, p1, gamma_th)? - p1.ln();
        let b = ln_weight(&chain.hops()[1], gains[1], l, p2, gamma_th)? - p2.ln();
        Ok(a - b)
    };
    let mut lo: R = cast(1e-9);
    let mut hi: R = R::one() - cast::<R>(1e-9);
    if !(imbalance(lo)? > R::zero() && imbalance(hi)? < R::zero()) {
        return Err(Error::PaNonConverged {
            iterations: 0,
            residual: f64::NAN,
        });
    }
    for _ in 0..200 {
        let mid = (lo + hi) * cast(0.5);
        if imbalance(mid)? > R::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= cast::<R>(4.0) * R::epsilon() {
            break;
        }
    }
    let rho = (lo + hi) * cast(0.5);
    PowerBudget::new(p_total, vec![rho * p_total, (R::one() - rho) * p_total])
}

/// High-power limit of the allocation: P_i ∝ m_i / n_i, independent of the
/// channel gains and of P_T.
pub fn pa_asymptotic<R: Real>(chain: &RelayChain<R>, p_total: R) -> Result<PowerBudget<R>> {
    if !(p_total > R::zero()) {
        return Err(Error::domain(format!("total power must be positive, got {p_total}")));
    }
    let weights: Vec<R> = chain
        .hops()
        .iter()
        .map(|h| {
            let (m, _) = crate::channel::severity_params::<R>(h.cascade_order)?;
            Ok(m / cast(h.cascade_order as f64))
        })
        .collect::<Result<Vec<R>>>()?;
    let sum = weights.iter().fold(R::zero(), |a, b| a + *b);
    PowerBudget::new(p_total, weights.iter().map(|w| *w / sum * p_total).collect())
}

/// Outage probability of a regenerative chain operated with per-hop average
/// SNRs γ̄_i = P_i λ_i.
pub fn outage_under_allocation<R: Real>(
    chain: &RelayChain<R>,
    gains: &[R],
    budget: &PowerBudget<R>,
    gamma_th: R,
) -> Result<R> {
    if gains.len() != chain.num_hops() || budget.allocations.len() != chain.num_hops() {
        return Err(Error::HopCount {
            expected: chain.num_hops(),
            got: gains.len().min(budget.allocations.len()),
        });
    }
    let hops = chain
        .hops()
        .iter()
        .zip(gains.iter().zip(budget.allocations.iter()))
        .map(|(h, (&g, &p))| HopModel::new(h.cascade_order, g, p * g))
        .collect::<Result<Vec<_>>>()?;
    let powered = RelayChain::new(hops, chain.diversity(), Scheme::Regenerative)?;
    df_cdf(&powered, gamma_th)
}
