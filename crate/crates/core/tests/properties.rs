use liberata::citation_weighting::{
    base_weighted_matrix, estimate_field_rates, Base, Modifier, RateSource, WeightingPipeline,
};
use liberata::corpus::Corpus;
use liberata::market::{transaction_feasible, Feasibility};
use liberata::portfolio::{build_portfolio, concentration, diversification_ratio, diversification_ratio_of, PortfolioSelector};
use liberata::sparse;
use liberata::synth::{generate, SynthParams};
use liberata::Analysis;
use proptest::prelude::*;

fn corpus(seed: u64, manuscripts: usize) -> Corpus {
    generate(&SynthParams {
        manuscripts,
        contributors: (manuscripts / 3).max(3),
        seed,
        ..Default::default()
    })
    .unwrap()
    .corpus
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn printed_capital_is_conserved(seed in 0u64..10_000, n in 1usize..300) {
        let c = corpus(seed, n);
        let citing = (0..c.n_manuscripts()).filter(|&m| !c.references_of(m).is_empty()).count() as f64;
        let a = Analysis::base(c).unwrap();
        let total: f64 = a.raw_capital().iter().sum();
        prop_assert!((total - citing).abs() <= 1e-9 * citing.max(1.0));
    }

    #[test]
    fn base_columns_are_stochastic(seed in 0u64..10_000, n in 1usize..300) {
        let c = corpus(seed, n);
        let w = base_weighted_matrix(&c);
        for (y, s) in sparse::col_sums(&w).iter().enumerate() {
            if c.references_of(y).is_empty() {
                prop_assert_eq!(*s, 0.0);
            } else {
                prop_assert!((s - 1.0).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn self_citation_and_rate_scalings_commute(seed in 0u64..10_000, n in 2usize..150) {
        let c = corpus(seed, n);
        let rates = estimate_field_rates(&c);
        let rate = Modifier::PublicationRate(RateSource::Estimated);
        let ab = WeightingPipeline::new(Base::InverseReferenceCount, vec![Modifier::Acsm, rate]).unwrap();
        let ba = WeightingPipeline::new(Base::InverseReferenceCount, vec![rate, Modifier::Acsm]).unwrap();
        let x = ab.run_with_rates(&c, &rates).unwrap().matrix;
        let y = ba.run_with_rates(&c, &rates).unwrap().matrix;
        for (r, col, v) in sparse::entries(&x) {
            prop_assert!((v - sparse::get(&y, r, col)).abs() <= 1e-12);
        }
        prop_assert_eq!(x.nnz(), y.nnz());
    }

    #[test]
    fn concentration_stays_in_bounds(raw in prop::collection::vec(1e-6f64..1.0, 1..60)) {
        let t: f64 = raw.iter().sum();
        let w: Vec<f64> = raw.iter().map(|x| x / t).collect();
        let c = concentration(&w);
        prop_assert!(c.hhi > 0.0 && c.hhi <= 1.0 + 1e-12);
        prop_assert!(c.gini >= 0.0 && c.gini < 1.0);
        prop_assert!(c.entropy >= -1e-12 && c.entropy <= 1.0 + 1e-12);
    }

    #[test]
    fn uniform_weights_are_least_concentrated(n in 2usize..200) {
        let c = concentration(&vec![1.0 / n as f64; n]);
        prop_assert!((c.hhi - 1.0 / n as f64).abs() <= 1e-12);
        prop_assert_eq!(c.gini, 0.0);
        prop_assert!((c.entropy - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn diversification_never_below_one(
        assets in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 6), 1..8),
        raw in prop::collection::vec(0.01f64..1.0, 8),
    ) {
        let w = &raw[..assets.len()];
        if let Some(dr) = diversification_ratio_of(w, &assets).unwrap().value() {
            prop_assert!(dr >= 1.0 - 1e-9, "{dr}");
        }
    }

    #[test]
    fn correlated_assets_do_not_diversify(r in prop::collection::vec(-5.0f64..5.0, 4..10), k in 0.1f64..4.0, b in -2.0f64..2.0, w in 0.05f64..0.95) {
        let shifted: Vec<f64> = r.iter().map(|x| k * x + b).collect();
        if let Some(dr) = diversification_ratio_of(&[w, 1.0 - w], &[r.clone(), shifted]).unwrap().value() {
            prop_assert!((dr - 1.0).abs() <= 1e-9);
        }
        if let Some(dr) = diversification_ratio_of(&[1.0], &[r]).unwrap().value() {
            prop_assert!((dr - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn raising_expected_capital_keeps_authors_willing(
        ew in 0.0f64..10.0, e in 0.0f64..10.0, s in 0.01f64..1.0, paid in 0.0f64..1.0, lift in 0.0f64..10.0,
    ) {
        let sw = s * (1.0 - paid);
        let before = Feasibility::Author { expected_with: ew, expected_without: e, share_with: sw, share_without: s };
        let after = Feasibility::Author { expected_with: ew + lift, expected_without: e, share_with: sw, share_without: s };
        prop_assert!(!transaction_feasible(&before) || transaction_feasible(&after));
    }

    #[test]
    fn provider_boundary_is_infeasible(ta in 0.01f64..10.0, s in 0.01f64..1.0) {
        let p = Feasibility::Provider { t_provider: ta * s, t_author: ta, share: s };
        prop_assert!(!transaction_feasible(&p));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn contributor_portfolios_diversify(seed in 0u64..1000) {
        let c = corpus(seed, 60);
        let a = Analysis::base(c).unwrap();
        for p in a.corpus().contributors().iter().take(8) {
            let pf = build_portfolio(a.corpus(), &PortfolioSelector::contributor(p.id.clone()));
            if let Some(dr) = diversification_ratio(&a, &pf, 12).unwrap().value() {
                prop_assert!(dr >= 1.0 - 1e-9, "{} {dr}", p.id);
            }
        }
    }

    #[test]
    fn generated_corpora_reload(seed in 0u64..1000) {
        let out = generate(&SynthParams { manuscripts: 80, contributors: 25, seed, ..Default::default() }).unwrap();
        let dir = tempfile::tempdir().unwrap();
        liberata::synth::write_dataset(&out, dir.path()).unwrap();
        let back = liberata::corpus::load_dataset(dir.path()).unwrap();
        prop_assert_eq!(back.corpus.parts().manuscripts, out.corpus.parts().manuscripts);
        prop_assert_eq!(back.corpus.parts().shares, out.corpus.parts().shares);
        prop_assert_eq!(back.regions, out.regions);
    }
}

#[test]
fn preferential_attachment_has_heavy_tail() {
    let c = corpus(21, 1000);
    let mut counts = vec![0usize; c.n_manuscripts()];
    for m in 0..c.n_manuscripts() {
        for &x in c.references_of(m) {
            counts[x] += 1;
        }
    }
    counts.sort_unstable();
    let median = counts[counts.len() / 2].max(1);
    assert!(*counts.last().unwrap() >= 5 * median, "max {} median {median}", counts.last().unwrap());
}

#[test]
fn generated_transactions_are_feasible_prices() {
    let out = generate(&SynthParams { qc_rate: 0.9, seed: 5, ..Default::default() }).unwrap();
    let c = &out.corpus;
    assert!(!c.transactions().is_empty());
    for t in c.transactions() {
        let m = c.require_manuscript(&t.manuscript).unwrap();
        let p = c.require_contributor(&t.provider).unwrap();
        let held = c.shares_of(m).find(|s| s.0 == p && s.1 == t.role).unwrap().2;
        assert!((held - t.shares_paid).abs() < 1e-9);
        assert!(t.executed_at <= c.manuscript(m).published_at);
    }
}
