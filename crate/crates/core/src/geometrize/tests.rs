use super::*;
use crate::curvature::{ricci_lower_bound, LowerBoundOptions};
use crate::state_space::{is_invariant, stationary_distribution};
use crate::transport::{coupling_cost, validate_coupling, wasserstein};
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn space(model: Model) -> GeometrizedSpace {
    build(&model, DEFAULT_CAP).unwrap()
}

fn gnp(n: usize, p: Rational) -> Model {
    Model::Gnp { n, p }
}

fn exact_min_kappa(s: &GeometrizedSpace) -> Rational {
    ricci_lower_bound(s.graph(), s.kernel(), LowerBoundOptions { sample_pairs: 0, ..Default::default() })
        .unwrap()
        .global_lb
}

fn small_instances() -> Vec<Model> {
    vec![
        gnp(3, ratio(1, 2)),
        gnp(3, ratio(3, 10)),
        Model::GnM { n: 4, m: 2 },
        Model::GnM { n: 4, m: 3 },
        Model::Hypergraph { n: 4, k: 3, m: 2 },
        Model::DOutRegular { n: 3, d: 1 },
        Model::DOutRegular { n: 4, d: 1 },
        Model::PermInsertion { n: 3 },
        Model::PermInsertion { n: 4 },
    ]
}

#[test]
fn state_counts_match_closed_forms() {
    let cases = [
        (gnp(3, ratio(1, 2)), 8u128),
        (gnp(4, ratio(1, 3)), 64),
        (Model::GnM { n: 4, m: 2 }, 15),
        (Model::Hypergraph { n: 4, k: 3, m: 2 }, 6),
        (Model::Hypergraph { n: 5, k: 3, m: 2 }, 45),
        (Model::DOutRegular { n: 3, d: 1 }, 8),
        (Model::DOutRegular { n: 4, d: 1 }, 81),
        (Model::DOutRegular { n: 4, d: 2 }, 81),
        (Model::PermInsertion { n: 4 }, 24),
        (Model::PermTransposition { n: 5 }, 120),
    ];
    for (model, count) in cases {
        assert_eq!(model.state_count(), count, "{model}");
        assert_eq!(space(model).state_count() as u128, count);
    }
}

#[test]
fn cap_and_parameter_errors() {
    assert!(matches!(build(&gnp(6, ratio(1, 2)), 1000), Err(Error::TooLarge { .. })));
    assert!(matches!(Model::from_params("gnm", "n=4,M=6"), Err(Error::BadParams(_))));
    assert!(matches!(Model::from_params("doutreg", "n=4,d=3"), Err(Error::BadParams(_))));
    assert!(matches!(Model::from_params("gnp", "n=3,p=1"), Err(Error::BadParams(_))));
    assert!(matches!(Model::from_params("hyper", "n=4,k=5,M=1"), Err(Error::BadParams(_))));
    assert!(matches!(Model::from_params("nope", "n=4"), Err(Error::BadParams(_))));
    assert_eq!(Model::from_params("gnp", "n=3, p=0.3").unwrap(), gnp(3, ratio(3, 10)));
    assert_eq!(Model::from_params("hyper", "n=4,k=3,M=2").unwrap(), Model::Hypergraph { n: 4, k: 3, m: 2 });
}

#[test]
fn gnp_small_kernels() {
    let p = ratio(1, 3);
    let s = space(gnp(2, p.clone()));
    assert_eq!(s.state_count(), 2);
    for x in 0..2 {
        assert_eq!(s.kernel().row(x).get(1), p);
        assert_eq!(s.kernel().row(x).get(0), ratio(2, 3));
    }
    let nu = stationary_distribution(s.kernel()).unwrap();
    assert_eq!(nu.get(0), ratio(2, 3));
    assert_eq!(nu.get(1), ratio(1, 3));

    let half = space(gnp(3, ratio(1, 2)));
    assert!(half.claimed_nu_vector().iter().all(|v| *v == ratio(1, 8)));
    let skewed = space(gnp(3, ratio(3, 10)));
    let total = skewed.claimed_nu_vector().into_iter().fold(Rational::zero(), |a, b| a + b);
    assert_eq!(total, Rational::one());
    assert_eq!(skewed.claimed_kappa_lb(), Some(ratio(1, 3)));
}

#[test]
fn gnp_kernel_matches_closed_form() {
    // m_G(G') = (1/n) Σ_v p^{deg_{G'}(v)} (1-p)^{n-1-deg_{G'}(v)} over v with G - v = G' - v
    let n = 4;
    let p = ratio(2, 5);
    let s = space(gnp(n, p.clone()));
    let q = Rational::one() - p.clone();
    for x in [0, 5, 37, 63] {
        let gx = s.configuration(x).graph_adjacency().unwrap();
        for y in 0..s.state_count() {
            let gy = s.configuration(y).graph_adjacency().unwrap();
            let mut expected = Rational::zero();
            for v in 0..n {
                let rest_equal = (0..n).filter(|&u| u != v).all(|u| (gx[u] ^ gy[u]) & !(1u64 << v) == 0);
                if rest_equal {
                    let deg = gy[v].count_ones() as usize;
                    expected += ratio(1, n as i64) * rational_pow(&p, deg) * rational_pow(&q, n - 1 - deg);
                }
            }
            assert_eq!(s.kernel().row(x).get(y), expected, "x={x} y={y}");
        }
    }
}

#[test]
fn swap_model_examples() {
    let s = space(Model::GnM { n: 4, m: 2 });
    for x in 0..s.state_count() {
        assert_eq!(s.graph().degree(x), 8);
        assert!(s.kernel().row(x).entries().iter().all(|(_, w)| *w == ratio(1, 9)));
    }
    assert_eq!(s.claimed_kappa_lb(), Some(ratio(2, 3)));
    assert_eq!(Model::GnM { n: 4, m: 3 }.claimed_kappa_lb(), Some(ratio(6, 10)));

    let h = space(Model::Hypergraph { n: 4, k: 3, m: 2 });
    assert!((0..6).all(|x| h.graph().degree(x) == 4));
    assert_eq!(h.claimed_kappa_lb(), Some(ratio(4, 5)));

    let h1 = space(Model::Hypergraph { n: 5, k: 3, m: 1 });
    assert!((0..h1.state_count()).all(|x| h1.graph().degree(x) == 9));
    assert_eq!(h1.claimed_kappa_lb(), Some(ratio(1, 1)));
    assert!(exact_min_kappa(&h1) >= ratio(1, 1));
}

#[test]
fn hypergraph_with_pairs_is_gnm() {
    for (n, m) in [(4, 2), (4, 3), (5, 2)] {
        let g = space(Model::GnM { n, m });
        let h = space(Model::Hypergraph { n, k: 2, m });
        assert_eq!(g.state_count(), h.state_count());
        let to_hyper = |c: &Configuration| match c {
            Configuration::Graph { edges, .. } => Configuration::Hypergraph {
                n: n as u8,
                k: 2,
                edges: (0..64).filter(|b| edges >> b & 1 == 1).collect(),
            },
            _ => unreachable!(),
        };
        for x in 0..g.state_count() {
            let hx = h.state_of(&to_hyper(g.configuration(x))).unwrap();
            let mapped: BTreeSet<State> =
                g.graph().neighbors(x).iter().map(|&y| h.state_of(&to_hyper(g.configuration(y))).unwrap()).collect();
            let direct: BTreeSet<State> = h.graph().neighbors(hx).iter().copied().collect();
            assert_eq!(mapped, direct);
        }
        assert_eq!(g.claimed_kappa_lb(), h.claimed_kappa_lb());
    }
}

use std::collections::BTreeSet;

#[test]
fn dout_examples() {
    let s = space(Model::DOutRegular { n: 3, d: 1 });
    assert_eq!(s.state_count(), 8);
    for x in 0..8 {
        assert_eq!(s.graph().degree(x), 3);
        assert!(s.kernel().row(x).entries().iter().all(|(_, w)| *w == ratio(1, 4)));
    }
    assert_eq!(s.claimed_kappa_lb(), Some(ratio(1, 2)));
    for (n, d) in [(3, 1), (4, 1), (4, 2), (5, 1), (5, 3)] {
        let lb = Model::DOutRegular { n, d }.claimed_kappa_lb().unwrap();
        assert!(lb >= ratio(1, n as i64));
    }
    for (n, d) in [(3, 1), (4, 1), (4, 2)] {
        let s = space(Model::DOutRegular { n, d });
        assert!(s.graph().diameter().unwrap() as usize <= n);
    }
}

#[test]
fn permutation_examples() {
    // 1-based [12345] → [13425] moves 2 after 4; → [41235] moves 4 to the front
    let id: Vec<u8> = (0..5).collect();
    assert_eq!(move_after(&id, 1, Some(3)), vec![0, 2, 3, 1, 4]);
    assert_eq!(move_after(&id, 3, None), vec![3, 0, 1, 2, 4]);

    for n in 3..=5 {
        let s = space(Model::PermInsertion { n });
        for x in 0..s.state_count() {
            assert_eq!(s.graph().degree(x), (n - 1) * (n - 1));
        }
    }
    let s = space(Model::PermInsertion { n: 3 });
    assert!(s.kernel().row(0).entries().iter().all(|(_, w)| *w == ratio(1, 5)));
    assert_eq!(s.claimed_kappa_lb(), Some(ratio(3, 5)));

    let t = space(Model::PermTransposition { n: 3 });
    for x in 0..6 {
        assert_eq!(t.graph().degree(x), 3);
        assert!(!t.graph().has_loop(x));
        let total = t.kernel().row(x).entries().iter().fold(Rational::zero(), |a, (_, w)| a + w.clone());
        assert_eq!(total, Rational::one());
    }
    assert_eq!(t.claimed_kappa_lb(), None);
}

#[test]
fn transposition_walk_is_periodic_with_flat_curvature() {
    // the Cayley graph of transpositions is bipartite (parity), so the
    // unlazy walk has period 2 and no edge can have positive curvature
    for n in [3, 4] {
        let t = space(Model::PermTransposition { n });
        assert!(t.graph().is_bipartite());
        assert!(matches!(stationary_distribution(t.kernel()), Err(Error::NotErgodic(_))));
        assert!(is_invariant(t.kernel(), &t.claimed_nu_vector()));
        let k = exact_min_kappa(&t);
        assert_eq!(k, Rational::zero(), "n = {n}");
    }
}

#[test]
fn invariant_measures_match_claims() {
    let mut models = small_instances();
    models.push(gnp(4, ratio(1, 5)));
    for model in models {
        let s = space(model.clone());
        let claimed = s.claimed_nu_vector();
        assert!(is_invariant(s.kernel(), &claimed), "{model}");
        let nu = stationary_distribution(s.kernel_f64()).unwrap();
        let worst = (0..s.state_count()).map(|x| (nu.get(x) - claimed[x].to_f64()).abs()).fold(0.0, f64::max);
        assert!(worst <= 1e-10, "{model}: {worst}");
    }
}

#[test]
fn kernels_are_symmetric_where_uniform() {
    for model in [
        Model::GnM { n: 4, m: 2 },
        Model::Hypergraph { n: 4, k: 3, m: 2 },
        Model::DOutRegular { n: 3, d: 1 },
        Model::PermInsertion { n: 4 },
        Model::PermTransposition { n: 4 },
    ] {
        let s = space(model);
        for (x, y) in s.graph().edges() {
            assert_eq!(s.kernel().row(x).get(y), s.kernel().row(y).get(x));
        }
    }
}

#[test]
fn codecs_round_trip() {
    let mut models = small_instances();
    models.push(Model::PermTransposition { n: 4 });
    models.push(Model::DOutRegular { n: 4, d: 2 });
    for model in models {
        let s = space(model.clone());
        let mut previous: Option<Vec<u64>> = None;
        for c in s.configurations() {
            let code = model.encode(c).unwrap();
            assert_eq!(&model.decode(&code).unwrap(), c);
            if let Some(prev) = &previous {
                assert!(*prev < code || matches!(model, Model::GnM { .. } | Model::Gnp { .. }));
            }
            previous = Some(code);
        }
    }
    assert!(Model::PermInsertion { n: 3 }.decode(&[3, 0, 0]).is_err());
    assert_eq!(from_lehmer_code(&lehmer_code(&[2, 0, 3, 1])).unwrap(), vec![2, 0, 3, 1]);
}

#[test]
fn exact_curvature_meets_claims_on_small_spaces() {
    for model in small_instances() {
        let s = space(model.clone());
        let kappa = exact_min_kappa(&s);
        let lb = s.claimed_kappa_lb().unwrap();
        assert!(kappa >= lb, "{model}: {} < {}", kappa.display(), lb.display());
    }
    // insertion walk: the bound is attained at n = 4
    assert_eq!(exact_min_kappa(&space(Model::PermInsertion { n: 4 })), ratio(2, 5));
}

#[test]
fn insertion_bound_fails_at_five() {
    // regression: at n = 5 the exact minimum is 2/17, below n/((n-1)^2+1) = 5/17
    let s = space(Model::PermInsertion { n: 5 });
    let kappa = exact_min_kappa(&s);
    assert_eq!(kappa, ratio(2, 17));
    assert!(kappa < s.claimed_kappa_lb().unwrap());
}

#[test]
fn proof_couplings_are_valid_and_cheap() {
    let mut models = small_instances();
    models.push(Model::Hypergraph { n: 5, k: 3, m: 1 });
    for model in models {
        let s = space(model.clone());
        let budget = Rational::one() - s.claimed_kappa_lb().unwrap();
        for (x, y) in s.graph().edges() {
            let c = paper_coupling(&s, x, y).unwrap();
            let (mx, my) = (s.kernel().row(x), s.kernel().row(y));
            assert_eq!(validate_coupling(&c, mx, my), Ok(()), "{model} edge ({x},{y})");
            let cost = coupling_cost(&c, s.graph()).unwrap();
            assert!(cost <= budget, "{model} edge ({x},{y}): cost {}", cost.display());
            assert!(cost >= wasserstein(mx, my, s.graph()).unwrap().distance);
        }
    }
    let t = space(Model::PermTransposition { n: 3 });
    let (x, y) = t.graph().edges()[0];
    assert!(matches!(paper_coupling(&t, x, y), Err(Error::UnsupportedModel(_))));
    let g = space(Model::GnM { n: 4, m: 2 });
    let far = (1..g.state_count()).find(|&y| !g.graph().has_edge(0, y)).unwrap();
    assert!(matches!(paper_coupling(&g, 0, far), Err(Error::NotAnEdge { .. })));
}

fn frequencies(s: &GeometrizedSpace, samples: usize, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; s.state_count()];
    for _ in 0..samples {
        let c = s.model.sample(&mut rng);
        counts[s.state_of(&c).unwrap()] += 1;
    }
    counts
}

#[test]
fn gnp_sampler_passes_chi_squared() {
    for p in [ratio(1, 2), ratio(3, 10)] {
        let s = space(gnp(3, p));
        let samples = 100_000;
        let counts = frequencies(&s, samples, 11);
        let stat: f64 = counts
            .iter()
            .enumerate()
            .map(|(x, &o)| {
                let e = s.claimed_nu(x).to_f64() * samples as f64;
                (o as f64 - e).powi(2) / e
            })
            .sum();
        let critical = ChiSquared::new(7.0).unwrap().inverse_cdf(1.0 - 1e-6);
        assert!(stat < critical, "chi2 {stat} >= {critical}");
    }
}

#[test]
fn uniform_samplers_within_four_sigma() {
    for model in [
        Model::GnM { n: 4, m: 2 },
        Model::PermInsertion { n: 4 },
        Model::Hypergraph { n: 4, k: 3, m: 2 },
        Model::DOutRegular { n: 3, d: 1 },
    ] {
        let s = space(model.clone());
        let samples = 100_000usize;
        let counts = frequencies(&s, samples, 3);
        let p = 1.0 / s.state_count() as f64;
        let sigma = (samples as f64 * p * (1.0 - p)).sqrt();
        for &c in &counts {
            assert!((c as f64 - samples as f64 * p).abs() <= 4.0 * sigma, "{model}");
        }
    }
}

#[test]
fn direct_sample_is_seeded() {
    let s = space(Model::PermInsertion { n: 4 });
    assert_eq!(s.direct_sample(9), s.direct_sample(9));
}
