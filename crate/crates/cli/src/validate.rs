//! Self-check battery: fast invariant checks over the numerical core,
//! exposed through the `validate` subcommand.

use nrelay_core::channel::{mrc_snr_cdf, mrc_snr_pdf, severity_params, HopModel};
use nrelay_core::montecarlo::{
    run_outage_sim, run_pdf_sim, PdfVariate, SimPlan, SourceLaw,
};
use nrelay_core::multihop::{
    af_cdf_bound, af_equivalent_snr, af_geometric_bound, af_pdf_bound, af_snr_moment,
    amount_of_fading, df_cdf, df_equivalent_snr, RelayChain,
};
use nrelay_core::power::{pa_asymptotic, solve_pa, outage_under_allocation, PowerBudget};
use nrelay_core::quad::integrate_positive_axis;
use nrelay_core::Scheme;

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Check = (&'static str, fn() -> Result<(), String>);

fn hop(n: u32, snr: f64) -> HopModel<f64> {
    HopModel::new(n, 1.0, snr).unwrap()
}

fn chain(n: u32, snrs: &[f64], l: u32, scheme: Scheme) -> RelayChain<f64> {
    RelayChain::new(snrs.iter().map(|&s| hop(n, s)).collect(), l, scheme).unwrap()
}

fn severity_fit_anchors() -> Result<(), String> {
    let (m1, o1) = severity_params::<f64>(1).map_err(|e| e.to_string())?;
    if (m1 - 1.0365).abs() > 1e-12 || (o1 - 2.0008).abs() > 1e-12 {
        return Err(format!("n=1 fit off: m={m1}, omega={o1}"));
    }
    let mut prev_m = 0.0;
    for n in 1..=8 {
        let (m, omega) = severity_params::<f64>(n).map_err(|e| e.to_string())?;
        if !(m > prev_m) || !(omega > 1.12) {
            return Err(format!("fit not monotone at n={n}: m={m}, omega={omega}"));
        }
        prev_m = m;
    }
    Ok(())
}

fn combiner_ordering() -> Result<(), String> {
    let cases: &[&[f64]] = &[
        &[1.0, 1.0],
        &[0.3, 7.0],
        &[2.0, 5.0, 11.0],
        &[0.01, 0.02, 30.0, 4.0],
    ];
    for snrs in cases {
        let af = af_equivalent_snr(snrs).map_err(|e| e.to_string())?;
        let geo = af_geometric_bound(snrs).map_err(|e| e.to_string())?;
        let df = df_equivalent_snr(snrs).map_err(|e| e.to_string())?;
        if !(af <= geo + 1e-15 && af <= df + 1e-15) {
            return Err(format!("ordering broken for {snrs:?}: af={af} geo={geo} df={df}"));
        }
    }
    Ok(())
}

fn snr_pdf_normalizes() -> Result<(), String> {
    let h = hop(3, 10.0);
    let total =
        integrate_positive_axis(|g| mrc_snr_pdf(&h, 2, g).unwrap_or(0.0), 1e-10, 1e-10)
            .map_err(|e| e.to_string())?;
    if (total - 1.0).abs() > 1e-7 {
        return Err(format!("pdf mass {total}"));
    }
    Ok(())
}

fn cdf_matches_pdf_derivative() -> Result<(), String> {
    let h = hop(2, 5.0);
    for &g in &[0.5, 2.0, 8.0] {
        let eps = 1e-5 * g;
        let num = (mrc_snr_cdf(&h, 2, g + eps).map_err(|e| e.to_string())?
            - mrc_snr_cdf(&h, 2, g - eps).map_err(|e| e.to_string())?)
            / (2.0 * eps);
        let pdf = mrc_snr_pdf(&h, 2, g).map_err(|e| e.to_string())?;
        if (num - pdf).abs() > 1e-6 * pdf.max(1e-3) {
            return Err(format!("derivative mismatch at {g}: {num} vs {pdf}"));
        }
    }
    Ok(())
}

fn bound_pdf_matches_moment() -> Result<(), String> {
    let c = chain(2, &[5.0, 10.0], 2, Scheme::NonRegenerative);
    let m1 = af_snr_moment(&c, 1.0).map_err(|e| e.to_string())?;
    let quad = integrate_positive_axis(
        |g| g * af_pdf_bound(&c, g).unwrap_or(0.0),
        1e-10,
        1e-9,
    )
    .map_err(|e| e.to_string())?;
    if ((quad - m1) / m1).abs() > 1e-6 {
        return Err(format!("first moment {quad} vs {m1}"));
    }
    Ok(())
}

fn bound_cdf_monotone() -> Result<(), String> {
    let c = chain(3, &[8.0, 8.0, 8.0], 2, Scheme::NonRegenerative);
    let mut prev = 0.0;
    for i in 1..=20 {
        let g = 0.25 * i as f64;
        let f = af_cdf_bound(&c, g).map_err(|e| e.to_string())?;
        if !(0.0..=1.0).contains(&f) || f + 1e-12 < prev {
            return Err(format!("cdf not monotone in [0,1] at {g}: {f} after {prev}"));
        }
        prev = f;
    }
    Ok(())
}

fn simulation_is_deterministic() -> Result<(), String> {
    let c = chain(3, &[10.0, 10.0], 2, Scheme::Regenerative);
    let p = SimPlan::new(c, SourceLaw::TrueCascade, 50_000, 7, 1 << 14)
        .map_err(|e| e.to_string())?;
    let a = run_outage_sim(&p, 1.0).map_err(|e| e.to_string())?;
    let b = run_outage_sim(&p, 1.0).map_err(|e| e.to_string())?;
    if a != b {
        return Err(format!("reruns differ: {a:?} vs {b:?}"));
    }
    Ok(())
}

fn simulation_matches_analytic_law() -> Result<(), String> {
    let c = chain(3, &[10.0, 10.0, 10.0], 2, Scheme::Regenerative);
    let want = df_cdf(&c, 2.0).map_err(|e| e.to_string())?;
    let p = SimPlan::new(c, SourceLaw::ApproxGammaPower, 200_000, 11, 1 << 16)
        .map_err(|e| e.to_string())?;
    let est = run_outage_sim(&p, 2.0).map_err(|e| e.to_string())?;
    if (est.estimate - want).abs() > 4.0 * est.stderr.max(1e-9) {
        return Err(format!("{} vs {want} (se {})", est.estimate, est.stderr));
    }
    Ok(())
}

fn histogram_conserves_mass() -> Result<(), String> {
    let c = chain(2, &[5.0], 2, Scheme::Regenerative);
    let p = SimPlan::new(c, SourceLaw::ApproxGammaPower, 50_000, 13, 1 << 14)
        .map_err(|e| e.to_string())?;
    let h = run_pdf_sim(&p, 40, PdfVariate::Snr).map_err(|e| e.to_string())?;
    let total: u64 = h.counts.iter().sum();
    if total != 50_000 {
        return Err(format!("lost samples: {total}"));
    }
    Ok(())
}

fn pa_symmetric_chain_splits_equally() -> Result<(), String> {
    let c = chain(3, &[1.0, 1.0, 1.0], 2, Scheme::Regenerative);
    let report = solve_pa(&c, &[1.0, 1.0, 1.0], 3.0, 1.0).map_err(|e| e.to_string())?;
    for &p in &report.budget.allocations {
        if (p - 1.0).abs() > 1e-6 {
            return Err(format!("asymmetric split: {:?}", report.budget.allocations));
        }
    }
    let asym = pa_asymptotic(&c, 3.0).map_err(|e| e.to_string())?;
    let sum: f64 = asym.allocations.iter().sum();
    if (sum - 3.0).abs() > 1e-12 {
        return Err(format!("asymptotic split sums to {sum}"));
    }
    Ok(())
}

fn pa_beats_equal_split() -> Result<(), String> {
    let hops = vec![
        HopModel::new(3, 1.0, 1.0).unwrap(),
        HopModel::new(3, 1.0, 1.0).unwrap(),
        HopModel::new(2, 10.0, 10.0).unwrap(),
    ];
    let c = RelayChain::new(hops, 2, Scheme::Regenerative).unwrap();
    let gains = [1.0, 1.0, 10.0];
    for &p_total in &[1.0, 4.0, 16.0] {
        let opt = solve_pa(&c, &gains, p_total, 1.0).map_err(|e| e.to_string())?;
        let o_opt = outage_under_allocation(&c, &gains, &opt.budget, 1.0)
            .map_err(|e| e.to_string())?;
        let eq = PowerBudget::equal(p_total, 3).map_err(|e| e.to_string())?;
        let o_eq =
            outage_under_allocation(&c, &gains, &eq, 1.0).map_err(|e| e.to_string())?;
        if o_opt > o_eq * (1.0 + 1e-9) {
            return Err(format!("optimum {o_opt} worse than equal {o_eq} at P={p_total}"));
        }
    }
    Ok(())
}

fn fading_amount_single_rayleigh() -> Result<(), String> {
    let c = chain(1, &[10.0], 1, Scheme::Regenerative);
    let (m, _) = severity_params::<f64>(1).map_err(|e| e.to_string())?;
    let got = amount_of_fading(&c).map_err(|e| e.to_string())?;
    let want = 1.0 / m;
    if ((got - want) / want).abs() > 1e-12 {
        return Err(format!("{got} vs {want}"));
    }
    Ok(())
}

const CHECKS: &[Check] = &[
    ("severity fit anchors", severity_fit_anchors),
    ("combiner ordering", combiner_ordering),
    ("snr pdf normalizes", snr_pdf_normalizes),
    ("cdf matches pdf derivative", cdf_matches_pdf_derivative),
    ("bound pdf matches moment", bound_pdf_matches_moment),
    ("bound cdf monotone", bound_cdf_monotone),
    ("simulation is deterministic", simulation_is_deterministic),
    ("simulation matches analytic law", simulation_matches_analytic_law),
    ("histogram conserves mass", histogram_conserves_mass),
    ("symmetric chain splits equally", pa_symmetric_chain_splits_equally),
    ("optimized split beats equal split", pa_beats_equal_split),
    ("single-hop fading amount", fading_amount_single_rayleigh),
];

/// Runs every check and returns the results in declaration order.
pub fn run_all() -> Vec<CheckResult> {
    CHECKS
        .iter()
        .map(|&(name, f)| match f() {
            Ok(()) => CheckResult {
                name,
                passed: true,
                detail: String::new(),
            },
            Err(detail) => CheckResult {
                name,
                passed: false,
                detail,
            },
        })
        .collect()
}
