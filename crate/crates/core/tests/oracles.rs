//! Estimators against brute-force or analytic references.

use std::collections::BTreeMap;

use rand::Rng;

use entropy_core::group::{FiniteGroup, Group};
use entropy_core::maxent::{
    gibbs_distribution, solve_discrete_maxent, MomentSpec, DEFAULT_MAX_ITER, DEFAULT_TOLERANCE,
};
use entropy_core::ordinal::{
    conditional_entropy_ordinal, missing_patterns, topological_perm_entropy_order, OrdinalPattern,
};
use entropy_core::rng::rng_from_seed;
use entropy_core::stats::{chi2_cdf, chi2_quantile};
use entropy_core::symbolic::{
    bernoulli_entropy, lap_number_entropy, lyapunov_entropy_estimate_1d, markov_entropy_rate,
    plugin_entropy_rate, simulate_markov, IntervalMap, MarkovModel, SymbolSeq,
};
use entropy_core::transfer::{
    algebraic_transfer_entropy_joint, coupling_complexity_joint, transfer_entropy,
    transfer_entropy_cmi, PairedSymbolSeq, TEParams,
};
use entropy_core::ProbVec;

fn entropy_of<K: Ord>(masses: &BTreeMap<K, f64>) -> f64 {
    let total: f64 = masses.values().sum();
    -masses
        .values()
        .filter(|&&m| m > 0.0)
        .map(|&m| (m / total) * (m / total).ln())
        .sum::<f64>()
}

fn marginal<K: Ord>(rows: &[(Vec<usize>, f64)], f: impl Fn(&[usize]) -> K) -> BTreeMap<K, f64> {
    let mut m = BTreeMap::new();
    for (r, w) in rows {
        *m.entry(f(r)).or_insert(0.0) += w;
    }
    m
}

#[test]
fn bernoulli_frequencies_and_rate() {
    let p = ProbVec::new(vec![0.2, 0.5, 0.3]).unwrap();
    let s = simulate_markov(&MarkovModel::bernoulli(&p), 1_000_000, 11).unwrap();
    for (f, q) in s.frequencies().iter().zip(p.probs()) {
        assert!((f - q).abs() < 0.003, "{f} vs {q}");
    }
    let rate = plugin_entropy_rate(&s, 1).unwrap().block_rate;
    assert!((rate - bernoulli_entropy(&p)).abs() < 0.002);
}

#[test]
fn markov_information_content_converges() {
    let m = MarkovModel::from_transition(vec![
        vec![0.7, 0.2, 0.1],
        vec![0.3, 0.3, 0.4],
        vec![0.5, 0.0, 0.5],
    ])
    .unwrap();
    let h = markov_entropy_rate(&m);
    let s = simulate_markov(&m, 1_000_000, 12).unwrap();
    // Shannon–McMillan–Breiman: −(1/n) ln m(x_0 … x_{n−1}) → h
    let smb = -m.log_probability(s.symbols()) / s.len() as f64;
    assert!((smb - h).abs() < 0.01, "{smb} vs {h}");
    let mut prev = f64::INFINITY;
    for n in 1..=6 {
        let r = plugin_entropy_rate(&s, n).unwrap();
        assert!(
            r.conditional_rate <= prev + 1e-9,
            "conditional rate increased at n = {n}"
        );
        if n >= 2 {
            assert!((r.conditional_rate - h).abs() < 0.01);
        }
        prev = r.conditional_rate;
    }
}

#[test]
fn transfer_entropy_matches_counting() {
    let mut rng = rng_from_seed(13);
    for _ in 0..20 {
        let len = rng.random_range(200..2000);
        let x: Vec<usize> = (0..len).map(|_| rng.random_range(0..3)).collect();
        let y: Vec<usize> = (0..len)
            .map(|i| {
                if rng.random_bool(0.7) {
                    x[i]
                } else {
                    rng.random_range(0..3)
                }
            })
            .collect();
        let params = TEParams::new(
            rng.random_range(1..=2),
            rng.random_range(1..=2),
            rng.random_range(1..=2),
        )
        .unwrap();
        let p = PairedSymbolSeq::new(
            SymbolSeq::new(x.clone(), 3).unwrap(),
            SymbolSeq::new(y.clone(), 3).unwrap(),
        )
        .unwrap();

        let hist = params.n.max(params.k);
        let rows: Vec<(Vec<usize>, f64)> = (hist - 1..len - params.lambda)
            .map(|t| {
                let mut r = vec![x[t + params.lambda]];
                r.extend((0..params.n).map(|i| x[t - i]));
                r.extend((0..params.k).map(|j| y[t - j]));
                (r, 1.0)
            })
            .collect();
        let n = params.n;
        let h = |f: &dyn Fn(&[usize]) -> Vec<usize>| entropy_of(&marginal(&rows, f));
        let reference = (h(&|r| r[..=n].to_vec()) - h(&|r| r[1..=n].to_vec()))
            - (h(&|r| r.to_vec()) - h(&|r| r[1..].to_vec()));

        let te = transfer_entropy(&p, &params).unwrap();
        assert!(
            (te.value - reference).abs() < 1e-12,
            "{} vs {reference}",
            te.value
        );
        assert_eq!(
            te.value.to_bits(),
            transfer_entropy_cmi(&p, &params).unwrap().value.to_bits()
        );
        assert_eq!(te.samples, rows.len());
    }
}

fn stable_argsort(w: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..w.len()).collect();
    idx.sort_by(|&a, &b| w[a].total_cmp(&w[b]));
    idx
}

#[test]
fn conditional_ordinal_entropy_by_brute_force() {
    let mut rng = rng_from_seed(14);
    for order in 2..=5 {
        let x: Vec<f64> = (0..3000)
            .map(|_| f64::from(rng.random_range(0..20u8)))
            .collect();
        let rows: Vec<(Vec<usize>, f64)> = x
            .windows(order + 1)
            .map(|w| {
                (
                    [stable_argsort(&w[..order]), stable_argsort(&w[1..])].concat(),
                    1.0,
                )
            })
            .collect();
        let joint = entropy_of(&marginal(&rows, |r| r.to_vec()));
        let first = entropy_of(&marginal(&rows, |r| r[..order].to_vec()));
        let got = conditional_entropy_ordinal(&x, order).unwrap();
        assert!(
            (got - (joint - first)).abs() < 1e-12,
            "L = {order}: {got} vs {}",
            joint - first
        );
    }
}

#[test]
fn coupling_complexity_by_brute_force() {
    let mut rng = rng_from_seed(15);
    for m in [2usize, 3, 4] {
        let g = Group::cyclic(m).unwrap();
        for _ in 0..20 {
            let rows: Vec<(Vec<usize>, f64)> = (0..m * m * m)
                .filter_map(|c| {
                    let w = rng.random::<f64>();
                    (w < 0.6).then(|| (vec![c / (m * m), (c / m) % m, c % m], w + 0.01))
                })
                .collect();
            if rows.is_empty() {
                continue;
            }
            let tau = |r: &[usize]| vec![(r[1] + m - r[0]) % m, (r[2] + m - r[1]) % m];
            let h_tau = entropy_of(&marginal(&rows, tau));
            let reference = (0..3)
                .map(|v| {
                    let h_v = entropy_of(&marginal(&rows, |r| r[v]));
                    let h_joint = entropy_of(&marginal(&rows, |r| [vec![r[v]], tau(r)].concat()));
                    h_v + h_tau - h_joint
                })
                .fold(f64::INFINITY, f64::min)
                .max(0.0);
            let got = coupling_complexity_joint(&g, &rows).unwrap();
            assert!((got - reference).abs() < 1e-12, "{got} vs {reference}");
            assert_eq!(g.transcript(rows[0].0[0], rows[0].0[1]), tau(&rows[0].0)[0]);
        }
    }
}

#[test]
fn nonstationary_tables_break_the_reduction() {
    // ξ_{t+Λ} and ξ_t with different laws: C = 0 and H(ξ) ≤ H(η), yet lhs ≠ rhs
    let z2 = Group::cyclic(2).unwrap();
    let mut found = None;
    'search: for a in 0..=6u32 {
        for b in 0..=6 - a {
            for c in 0..=6 - a - b {
                for d in 0..=6 - a - b - c {
                    let masses = [a, b, c, d, 6 - a - b - c - d];
                    // cells (ξ', η, ξ) in a fixed order, the rest empty
                    let cells = [[0, 0, 0], [0, 1, 1], [1, 0, 1], [1, 1, 0], [1, 1, 1]];
                    let rows: Vec<(Vec<usize>, f64)> = cells
                        .iter()
                        .zip(masses)
                        .filter(|&(_, m)| m > 0)
                        .map(|(c, m)| (c.to_vec(), f64::from(m)))
                        .collect();
                    let r = algebraic_transfer_entropy_joint(&z2, &rows).unwrap();
                    let h = r.hypotheses;
                    if h.coupling_complexity < 1e-12
                        && h.h_xi <= h.h_eta + 1e-12
                        && (r.lhs - r.rhs).abs() > 1e-3
                    {
                        found = Some(r);
                        break 'search;
                    }
                }
            }
        }
    }
    let r = found.expect("a counterexample exists on this support");
    assert!(r.hypotheses.stationarity_gap > 1e-3);
    assert!(!r.hypotheses.applicable);
}

#[test]
fn chi2_cdf_matches_numerical_integration() {
    for dof in 1..=9u32 {
        let k = f64::from(dof);
        let norm = half_integer_gamma(k / 2.0) * 2f64.powf(k / 2.0);
        // x = u² turns the density into the smooth 2 u^{k−1} e^{−u²/2} / norm
        let integrand = |u: f64| 2.0 * u.powi(dof as i32 - 1) * (-u * u / 2.0).exp() / norm;
        for &upper in &[0.5, 1.0, 3.0, 7.5, 15.0] {
            let b = f64::sqrt(upper);
            let n = 20_000;
            let h = b / n as f64;
            let mut s = integrand(0.0) + integrand(b);
            for i in 1..n {
                s += integrand(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            let integral = s * h / 3.0;
            let cdf = chi2_cdf(upper, k).unwrap();
            assert!(
                (cdf - integral).abs() < 1e-10,
                "dof {dof}, x {upper}: {cdf} vs {integral}"
            );
        }
        let q = chi2_quantile(0.95, k).unwrap();
        assert!((chi2_cdf(q, k).unwrap() - 0.95).abs() < 1e-9);
    }
}

/// `Γ(a)` for `a` a positive multiple of ½, by the recurrence.
fn half_integer_gamma(a: f64) -> f64 {
    let mut x = a;
    let mut g = 1.0;
    while x > 1.0 {
        x -= 1.0;
        g *= x;
    }
    if x == 0.5 {
        g * std::f64::consts::PI.sqrt()
    } else {
        g
    }
}

#[test]
fn lap_growth_agrees_with_lyapunov_exponent() {
    for (map, x0) in [
        (IntervalMap::logistic(4.0).unwrap(), 0.2718),
        (IntervalMap::Tent, 0.1234),
        (IntervalMap::Doubling, 0.3141),
    ] {
        let laps = lap_number_entropy(&map, 16).unwrap();
        let lap = laps.last().unwrap().estimate;
        let lyap = lyapunov_entropy_estimate_1d(&map, x0, 1_000_000, 1000)
            .unwrap()
            .estimate;
        assert!(
            (lap - lyap).abs() < 0.02,
            "{map:?}: laps {lap}, Lyapunov {lyap}"
        );
    }
}

#[test]
fn gibbs_round_trip() {
    let energies = vec![0.0, 0.5, 1.3, 2.0, 3.1];
    for beta in [0.2, 1.0, 2.5] {
        let gibbs = gibbs_distribution(&energies, beta).unwrap();
        let mean: f64 = gibbs
            .probs()
            .iter()
            .zip(&energies)
            .map(|(p, e)| p * e)
            .sum();
        let spec = MomentSpec::mean(energies.clone(), mean).unwrap();
        let sol = solve_discrete_maxent(&spec, DEFAULT_TOLERANCE, DEFAULT_MAX_ITER).unwrap();
        assert!(
            (sol.multipliers[0] + beta).abs() < 1e-7,
            "λ = {} for β = {beta}",
            sol.multipliers[0]
        );
        for (a, b) in sol.distribution.probs().iter().zip(gibbs.probs()) {
            assert!((a - b).abs() < 1e-9);
        }
    }
}

#[test]
fn logistic_pattern_census() {
    let x = IntervalMap::logistic(4.0)
        .unwrap()
        .orbit(0.2718, 1_000_000)
        .unwrap();
    // Admissible ordinal patterns of the full logistic map.
    let observed: Vec<usize> = (3..=7)
        .map(|l| missing_patterns(&x, l).unwrap().observed)
        .collect();
    assert_eq!(observed, [5, 12, 31, 75, 178]);
    let growth = |l: usize| (observed[l - 2] as f64 / observed[l - 3] as f64).ln();
    // ln(31/12) ≈ 0.949 at L = 4 is above the 0.9 ceiling; the rate settles from L = 5 on.
    for l in [5, 6] {
        assert!((0.5..=0.9).contains(&growth(l)), "L = {l}: {}", growth(l));
    }
    let h6 = topological_perm_entropy_order(&x, 6).unwrap();
    assert!(h6 < (720f64).ln() / 6.0 && h6 > 2f64.ln());

    // Every extension of a pattern forbidden at order 3 is forbidden at order 4.
    let forbidden3 = missing_patterns(&x, 3).unwrap().missing_list;
    let forbidden4 = missing_patterns(&x, 4).unwrap().missing_list;
    let extensions = forbidden4
        .iter()
        .filter(|p| {
            let head = p.ranks().iter().copied().filter(|&i| i < 3).collect();
            forbidden3.contains(&OrdinalPattern::new(head).unwrap())
        })
        .count();
    assert_eq!(extensions, 4);
}
