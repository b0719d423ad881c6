//! End-to-end acceptance battery. Each test checks one release criterion
//! and prints a single PASS line on success; a failing criterion panics
//! with the measured numbers.
//!
//! `c05b_bound_converges_to_true_channel_at_high_snr` is expected to fail:
//! the fitted closed forms have a different tail exponent than the true
//! cascaded channel, so the convergence claim it encodes does not hold.
//! It is kept faithful rather than weakened.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use nrelay_cli::preset::preset;
use nrelay_cli::run::run_experiment;
use nrelay_core::channel::{
    mrc_amplitude_pdf, mrc_snr_cdf, mrc_snr_pdf, severity_params, HopModel,
};
use nrelay_core::montecarlo::{
    draw_equivalent_snrs, run_outage_sim_with, run_pdf_sim, CombineRule, PdfVariate, SimPlan,
    SourceLaw,
};
use nrelay_core::multihop::{
    af_cdf_bound, af_pdf_bound, af_pdf_dualhop, af_snr_moment, amount_of_fading, df_cdf,
    RelayChain,
};
use nrelay_core::power::{
    outage_under_allocation, pa_asymptotic, solve_pa, PowerBudget,
};
use nrelay_core::Scheme;

const BATCH: u64 = 1 << 16;

fn hop(n: u32, gain: f64, snr: f64) -> HopModel<f64> {
    HopModel::new(n, gain, snr).unwrap()
}

fn uniform_chain(n: u32, snr: f64, hops: usize, l: u32, scheme: Scheme) -> RelayChain<f64> {
    RelayChain::new((0..hops).map(|_| hop(n, 1.0, snr)).collect(), l, scheme).unwrap()
}

fn db(x: f64) -> f64 {
    10f64.powf(x / 10.0)
}

/// Trials needed for ~150 expected failures at probability `p`, within
/// [base, cap].
fn trials_for(p: f64, base: u64, cap: u64) -> u64 {
    ((150.0 / p).ceil() as u64).clamp(base, cap)
}

#[test]
fn c01_severity_fit_reference_values() {
    // (m, omega) fit at n = 3, 4, 5, checked to one unit in the last
    // quoted decimal
    let cases = [
        (3u32, 2.256, 1e-3, 1.424, 1e-3),
        (4, 2.87, 1e-2, 1.351, 1e-3),
        (5, 3.477, 1e-3, 1.306, 1e-3),
    ];
    for (n, m_ref, m_tol, o_ref, o_tol) in cases {
        let (m, omega) = severity_params::<f64>(n).unwrap();
        assert!(
            (m - m_ref).abs() < m_tol,
            "m({n}) = {m}, expected {m_ref} ± {m_tol}"
        );
        assert!(
            (omega - o_ref).abs() < o_tol,
            "omega({n}) = {omega}, expected {o_ref} ± {o_tol}"
        );
    }
    println!("PASS c01: severity fit reproduces the reference decimals");
}

#[test]
fn c02_amplitude_density_validation() {
    // (a) the L1 gap between the fitted amplitude density and the true
    // cascaded channel shrinks as the cascade deepens (unit per-stage
    // variance, 2-branch MRC, 1e6 trials)
    let mut gaps = Vec::new();
    for &n in &[3u32, 4, 5] {
        let h = hop(n, 2f64.powi(n as i32), 1.0);
        let c = RelayChain::new(vec![h], 2, Scheme::Regenerative).unwrap();
        let plan = SimPlan::new(c, SourceLaw::TrueCascade, 1_000_000, 42, BATCH).unwrap();
        let hist = run_pdf_sim(&plan, 50, PdfVariate::Amplitude).unwrap();
        let mut l1 = 0.0;
        for i in 0..50 {
            let w = hist.bin_edges[i + 1] - hist.bin_edges[i];
            let fit = mrc_amplitude_pdf(&h, 2, hist.midpoint(i)).unwrap();
            l1 += (hist.density(i) - fit).abs() * w;
        }
        gaps.push(l1);
    }
    assert!(
        gaps[0] > gaps[1] && gaps[1] > gaps[2],
        "L1 gaps not decreasing in cascade order: {gaps:?}"
    );

    // (b) sampling the fitted law itself lands inside 99% binomial bands
    // of its analytic CDF (at most 2 of 50 bins outside)
    let h = hop(3, 1.0, 10.0);
    let c = RelayChain::new(vec![h], 2, Scheme::Regenerative).unwrap();
    let trials = 1_000_000u64;
    let plan = SimPlan::new(c, SourceLaw::ApproxGammaPower, trials, 42, BATCH).unwrap();
    let hist = run_pdf_sim(&plan, 50, PdfVariate::Snr).unwrap();
    let mut violations = 0;
    for i in 1..49 {
        let prob = mrc_snr_cdf(&h, 2, hist.bin_edges[i + 1]).unwrap()
            - mrc_snr_cdf(&h, 2, hist.bin_edges[i]).unwrap();
        let se = (prob * (1.0 - prob) * trials as f64).sqrt();
        if (hist.counts[i] as f64 - prob * trials as f64).abs() > 2.576 * se {
            violations += 1;
        }
    }
    assert!(violations <= 2, "{violations} bins outside 99% bands");
    println!("PASS c02: amplitude density validated against simulation (L1 {gaps:?}, {violations} band violations)");
}

#[test]
fn c03_reduction_identities() {
    let points = |snr: f64| -> Vec<f64> {
        (0..20)
            .map(|i| snr * 10f64.powf(-2.0 + 3.0 * i as f64 / 19.0))
            .collect()
    };

    // single hop: the bound density degenerates to the per-hop MRC density
    let h = hop(3, 1.0, 8.0);
    let c1 = RelayChain::new(vec![h], 2, Scheme::NonRegenerative).unwrap();
    for g in points(8.0) {
        let a = af_pdf_bound(&c1, g).unwrap();
        let b = mrc_snr_pdf(&h, 2, g).unwrap();
        assert!(((a - b) / b).abs() < 1e-6, "single-hop mismatch at {g}: {a} vs {b}");
    }

    // two hops: contour evaluation equals the Bessel closed form
    let c2 = uniform_chain(3, 8.0, 2, 2, Scheme::NonRegenerative);
    for g in points(8.0) {
        let a = af_pdf_bound(&c2, g).unwrap();
        let b = af_pdf_dualhop(&c2, g).unwrap();
        assert!(((a - b) / b).abs() < 1e-6, "dual-hop mismatch at {g}: {a} vs {b}");
    }

    // the bound CDF differentiates to the bound density (checked where the
    // CDF is resolvable in f64, away from its saturated tails)
    let c3 = uniform_chain(2, 5.0, 3, 2, Scheme::NonRegenerative);
    for g in points(5.0) {
        let f = af_cdf_bound(&c3, g).unwrap();
        if !(1e-9..=1.0 - 1e-9).contains(&f) {
            continue;
        }
        let eps = 1e-4 * g;
        let num = (af_cdf_bound(&c3, g + eps).unwrap() - af_cdf_bound(&c3, g - eps).unwrap())
            / (2.0 * eps);
        let pdf = af_pdf_bound(&c3, g).unwrap();
        assert!(
            ((num - pdf) / pdf).abs() < 1e-4,
            "derivative mismatch at {g}: {num} vs {pdf}"
        );
    }
    println!("PASS c03: reduction identities hold to pinned tolerances");
}

#[test]
fn c04_bound_moments_match_sampling() {
    let mut rng = ChaCha12Rng::seed_from_u64(1234);
    for case in 0..5 {
        let n = rng.gen_range(1u32..=4);
        let hops = rng.gen_range(2usize..=4);
        let l = rng.gen_range(1u32..=3);
        let snrs: Vec<f64> = (0..hops).map(|_| rng.gen_range(1.0..20.0)).collect();
        let chain = RelayChain::new(
            snrs.iter().map(|&s| hop(n, 1.0, s)).collect(),
            l,
            Scheme::NonRegenerative,
        )
        .unwrap();
        let plan = SimPlan::new(chain.clone(), SourceLaw::ApproxGammaPower, 1_000_000, 100 + case, BATCH)
            .unwrap();
        let xs = draw_equivalent_snrs(&plan, CombineRule::GeometricBound).unwrap();
        let t = xs.len() as f64;
        for k in [1.0f64, 2.0] {
            let want = af_snr_moment(&chain, k).unwrap();
            let got = xs.iter().map(|x| x.powf(k)).sum::<f64>() / t;
            let second = af_snr_moment(&chain, 2.0 * k).unwrap();
            let se = ((second - want * want) / t).sqrt();
            assert!(
                (got - want).abs() < 4.0 * se,
                "case {case} (n={n}, hops={hops}, L={l}) k={k}: {got} vs {want} (se {se})"
            );
        }
    }
    println!("PASS c04: closed-form moments match sampled moments on 5 randomized chains");
}

fn fig2_chains(snr: f64) -> (RelayChain<f64>, RelayChain<f64>) {
    (
        uniform_chain(4, snr, 4, 2, Scheme::NonRegenerative),
        uniform_chain(3, snr, 6, 3, Scheme::Regenerative),
    )
}

#[test]
fn c05a_outage_formulas_match_exact_law_sampling() {
    // samples drawn from the law the formulas describe, combined the way
    // the formulas combine; tail points sized for >= 150 expected failures
    let mut gaps_af = Vec::new();
    let mut gaps_df = Vec::new();
    for &snr_db in &[10.0, 25.0, 30.0] {
        let (af, df) = fig2_chains(db(snr_db));
        for (chain, rule, analytic, gaps) in [
            (
                &af,
                CombineRule::GeometricBound,
                af_cdf_bound(&af, 1.0).unwrap(),
                &mut gaps_af,
            ),
            (
                &df,
                CombineRule::PerScheme,
                df_cdf(&df, 1.0).unwrap(),
                &mut gaps_df,
            ),
        ] {
            let trials = trials_for(analytic, 1_000_000, 20_000_000);
            let plan =
                SimPlan::new(chain.clone(), SourceLaw::ApproxGammaPower, trials, 55, BATCH).unwrap();
            let est = run_outage_sim_with(&plan, 1.0, rule).unwrap();
            assert!(!est.low_confidence, "only {} failures at {snr_db} dB", est.failures);
            if snr_db >= 25.0 {
                assert!(
                    (est.estimate - analytic).abs() < 3.0 * est.stderr,
                    "{snr_db} dB: {} vs {analytic} (se {})",
                    est.estimate,
                    est.stderr
                );
            }
            gaps.push(((est.estimate - analytic) / analytic).abs());
        }
    }
    println!(
        "PASS c05a: outage formulas match exact-law sampling (rel gaps amplify {gaps_af:?}, decode {gaps_df:?})"
    );
}

#[test]
fn c05b_bound_converges_to_true_channel_at_high_snr() {
    // EXPECTED FAILURE, kept faithful: against the true cascaded channel
    // the fitted forms keep a constant-order relative error in the tail
    // (their diversity order differs from the true channel's), so the
    // 3-sigma agreement asserted here does not materialize.
    let mut report = Vec::new();
    let mut ok = true;
    for &snr_db in &[10.0, 25.0, 30.0] {
        let (af, df) = fig2_chains(db(snr_db));
        for (name, chain, analytic) in [
            ("amplify", &af, af_cdf_bound(&af, 1.0).unwrap()),
            ("decode", &df, df_cdf(&df, 1.0).unwrap()),
        ] {
            let trials = trials_for(analytic, 1_000_000, 20_000_000);
            let plan =
                SimPlan::new(chain.clone(), SourceLaw::TrueCascade, trials, 55, BATCH).unwrap();
            let est = run_outage_sim_with(&plan, 1.0, CombineRule::PerScheme).unwrap();
            let z = (est.estimate - analytic).abs() / est.stderr.max(1e-300);
            report.push(format!(
                "{name} @ {snr_db} dB: sim {:.3e} vs analytic {:.3e} (z = {z:.1})",
                est.estimate, analytic
            ));
            if snr_db >= 25.0 && z >= 3.0 {
                ok = false;
            }
        }
    }
    assert!(
        ok,
        "analytic curves do not converge to the true channel at high SNR:\n{}",
        report.join("\n")
    );
    println!("PASS c05b: bound converges to the true channel at high SNR");
}

#[test]
fn c06_decode_outage_dominates_amplify_outage() {
    // (a) pathwise: with identical branch draws, min-combining fails no
    // more often than harmonic combining, at every SNR and cascade order
    for n in [2u32, 3, 4] {
        for &snr_db in &[0.0, 5.0, 10.0, 20.0, 30.0] {
            let af = uniform_chain(n, db(snr_db), 3, 2, Scheme::NonRegenerative);
            let df = uniform_chain(n, db(snr_db), 3, 2, Scheme::Regenerative);
            let paf = SimPlan::new(af, SourceLaw::TrueCascade, 200_000, 66, BATCH).unwrap();
            let pdf = SimPlan::new(df, SourceLaw::TrueCascade, 200_000, 66, BATCH).unwrap();
            let ea = run_outage_sim_with(&paf, 1.0, CombineRule::PerScheme).unwrap();
            let ed = run_outage_sim_with(&pdf, 1.0, CombineRule::PerScheme).unwrap();
            assert!(
                ed.failures <= ea.failures,
                "n={n}, {snr_db} dB: decode {} > amplify {}",
                ed.failures,
                ea.failures
            );
        }
    }

    // (b) analytic mid-SNR gap between the schemes shrinks as the cascade
    // deepens (3 hops, L=2, threshold 1, 5 dB)
    let mut ratios = Vec::new();
    for n in [2u32, 3, 4] {
        let a = af_cdf_bound(&uniform_chain(n, db(5.0), 3, 2, Scheme::NonRegenerative), 1.0)
            .unwrap();
        let d = df_cdf(&uniform_chain(n, db(5.0), 3, 2, Scheme::Regenerative), 1.0).unwrap();
        assert!(a > d, "n={n}: amplify outage {a} not above decode outage {d}");
        ratios.push(a / d);
    }
    assert!(
        ratios[0] > ratios[1] && ratios[1] > ratios[2],
        "scheme gap not shrinking: {ratios:?}"
    );
    println!("PASS c06: decode outage dominates amplify outage (gap ratios {ratios:?})");
}

#[test]
fn c07_amount_of_fading_behavior() {
    // single Rayleigh hop, single branch
    let single = uniform_chain(1, 10.0, 1, 1, Scheme::Regenerative);
    let got = amount_of_fading(&single).unwrap();
    assert!((got - 0.9648).abs() < 1e-4, "single-hop fading amount {got}");

    // closed form matches 1e7 draws of the bound variate within 5%
    let c = uniform_chain(2, 10.0, 2, 2, Scheme::NonRegenerative);
    let want = amount_of_fading(&c).unwrap();
    let plan = SimPlan::new(c, SourceLaw::ApproxGammaPower, 10_000_000, 77, BATCH).unwrap();
    let sampled =
        nrelay_core::montecarlo::empirical_af_with(&plan, CombineRule::GeometricBound).unwrap();
    assert!(
        ((sampled - want) / want).abs() < 0.05,
        "sampled {sampled} vs closed form {want}"
    );

    // severity grows with cascade order, shrinks with diversity
    for hops in [1usize, 3] {
        for l in [1u32, 2, 3] {
            let mut prev = 0.0;
            for n in 1..=5 {
                let v = amount_of_fading(&uniform_chain(n, 10.0, hops, l, Scheme::NonRegenerative))
                    .unwrap();
                assert!(v > prev, "not increasing in n at hops={hops}, L={l}, n={n}");
                prev = v;
            }
        }
        for n in [1u32, 3] {
            let mut prev = f64::INFINITY;
            for l in 1..=4 {
                let v = amount_of_fading(&uniform_chain(n, 10.0, hops, l, Scheme::NonRegenerative))
                    .unwrap();
                assert!(v < prev, "not decreasing in L at hops={hops}, n={n}, L={l}");
                prev = v;
            }
        }
    }
    println!("PASS c07: amount of fading matches references and is monotone in (n, L)");
}

fn unbalanced_chain(l: u32) -> (RelayChain<f64>, Vec<f64>) {
    let gains = vec![1.0, 1.0, 10.0];
    let hops = vec![hop(3, 1.0, 1.0), hop(3, 1.0, 1.0), hop(2, 10.0, 10.0)];
    (RelayChain::new(hops, l, Scheme::Regenerative).unwrap(), gains)
}

#[test]
fn c08_power_allocation_operating_points() {
    // (a) somewhere on the 0-30 dB grid the solver hits the reference
    // splits, elementwise within 0.03
    for (l, target) in [(3u32, [0.44, 0.44, 0.14]), (1, [0.41, 0.41, 0.184])] {
        let (chain, gains) = unbalanced_chain(l);
        let mut best = f64::INFINITY;
        let mut hit = false;
        for i in 0..=60 {
            let p_total = db(0.5 * i as f64);
            let report = solve_pa(&chain, &gains, p_total, 1.0).unwrap();
            let ratios = report.budget.ratios();
            let dev = ratios
                .iter()
                .zip(target.iter())
                .map(|(r, t)| (r - t).abs())
                .fold(0.0f64, f64::max);
            best = best.min(dev);
            if dev <= 0.03 {
                hit = true;
                break;
            }
        }
        assert!(hit, "L={l}: no grid point within 0.03 of {target:?} (best {best:.4})");
    }

    // (b) the optimized split never loses to the equal split
    let (chain, gains) = unbalanced_chain(3);
    for i in 0..16 {
        let p_total = db(2.0 * i as f64);
        let opt = solve_pa(&chain, &gains, p_total, 1.0).unwrap();
        let o_opt = outage_under_allocation(&chain, &gains, &opt.budget, 1.0).unwrap();
        let eq = PowerBudget::equal(p_total, 3).unwrap();
        let o_eq = outage_under_allocation(&chain, &gains, &eq, 1.0).unwrap();
        assert!(
            o_opt <= o_eq * (1.0 + 1e-9),
            "optimized {o_opt} worse than equal {o_eq} at {p_total}"
        );
    }

    // (c) two-hop solver agrees with a brute-force split search in outage
    let gains2 = vec![1.0, 5.0];
    let chain2 = RelayChain::new(vec![hop(3, 1.0, 1.0), hop(2, 5.0, 5.0)], 2, Scheme::Regenerative)
        .unwrap();
    let p_total = 2.0;
    let report = solve_pa(&chain2, &gains2, p_total, 1.0).unwrap();
    let o_solver = outage_under_allocation(&chain2, &gains2, &report.budget, 1.0).unwrap();
    let mut o_grid = f64::INFINITY;
    for i in 1..10_000 {
        let rho = i as f64 / 10_000.0;
        let b = PowerBudget::new(p_total, vec![rho * p_total, (1.0 - rho) * p_total]).unwrap();
        o_grid = o_grid.min(outage_under_allocation(&chain2, &gains2, &b, 1.0).unwrap());
    }
    assert!(
        (o_solver - o_grid).abs() < 1e-6,
        "solver outage {o_solver} vs grid optimum {o_grid}"
    );
    println!("PASS c08: power allocation hits reference splits and beats the equal split");
}

#[test]
fn c09_asymptotic_allocation_limit() {
    let (chain, gains) = unbalanced_chain(3);
    let asym = pa_asymptotic(&chain, 1.0).unwrap();
    let ratios = asym.ratios();
    let want = [0.3232, 0.3232, 0.3537];
    for (r, w) in ratios.iter().zip(want.iter()) {
        assert!((r - w).abs() < 1e-4, "asymptotic ratios {ratios:?} vs {want:?}");
    }

    // on a balanced-gain chain the solved split walks monotonically toward
    // the limit as the budget grows
    let eq_gains = vec![1.0, 1.0, 1.0];
    let eq_chain = RelayChain::new(
        vec![hop(3, 1.0, 1.0), hop(3, 1.0, 1.0), hop(2, 1.0, 1.0)],
        3,
        Scheme::Regenerative,
    )
    .unwrap();
    let mut prev = f64::INFINITY;
    for &p_db in &[-20.0, -15.0, -10.0, -5.0, -3.0] {
        let report = solve_pa(&eq_chain, &eq_gains, db(p_db), 1.0).unwrap();
        let dev = report
            .budget
            .ratios()
            .iter()
            .zip(want.iter())
            .map(|(r, w)| (r - w).abs())
            .fold(0.0f64, f64::max);
        assert!(dev < prev, "distance to the limit grew at {p_db} dB: {dev} >= {prev}");
        prev = dev;
    }
    let _ = gains;
    println!("PASS c09: asymptotic split matches the recomputed limit and is approached monotonically");
}

#[test]
fn c10_preset_reruns_are_byte_identical() {
    // fast presets as configured, heavier ones with a reduced trial budget
    let mut configs = preset("fig5").unwrap();
    let mut fig1 = preset("fig1").unwrap().swap_remove(0);
    fig1.trials = 100_000;
    configs.push(fig1);
    let mut fig2 = preset("fig2").unwrap().swap_remove(0);
    fig2.trials = 50_000;
    configs.push(fig2);
    for cfg in &configs {
        let a = run_experiment(cfg).unwrap();
        let b = run_experiment(cfg).unwrap();
        for (ca, cb) in a.iter().zip(b.iter()) {
            let body_a = nrelay_cli::output::curve_csv(ca);
            let body_b = nrelay_cli::output::curve_csv(cb);
            assert_eq!(body_a, body_b, "{} rerun differs", cfg.stem());
        }
    }
    println!("PASS c10: preset reruns produce byte-identical CSV bodies");
}
