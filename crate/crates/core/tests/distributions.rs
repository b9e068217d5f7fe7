use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ordstat::distributions::{Atom, CdfSpec, DistributionError, DomainSpec, Marginal, ParameterDomain, PiecewiseCdf, Segment};

fn atom_then_ramp() -> PiecewiseCdf {
    PiecewiseCdf::new(CdfSpec {
        segments: vec![Segment { x_lo: 0.0, x_hi: 0.5, f_lo: 0.5, f_hi: 1.0 }],
        atoms: vec![Atom { x: 0.0, mass: 0.5 }],
    })
    .unwrap()
}

fn mixed() -> PiecewiseCdf {
    serde_json::from_str(
        r#"{"segments": [{"x_lo": -2, "x_hi": -1, "f_lo": 0, "f_hi": 0.25},
                         {"x_lo": 1, "x_hi": 3, "f_lo": 0.6, "f_hi": 0.9}],
            "atoms": [{"x": 0, "mass": 0.35}, {"x": 3, "mass": 0.1}]}"#,
    )
    .unwrap()
}

/// Kolmogorov-Smirnov distance of `u` from the uniform distribution.
fn ks_uniform(mut u: Vec<f64>) -> f64 {
    u.sort_by(f64::total_cmp);
    let n = u.len() as f64;
    u.iter()
        .enumerate()
        .map(|(i, &v)| (v - i as f64 / n).abs().max(((i + 1) as f64 / n - v).abs()))
        .fold(0.0, f64::max)
}

#[test]
fn eval_and_left_limits() {
    let u = PiecewiseCdf::uniform(0.0, 1.0).unwrap();
    assert!((u.eval(0.3) - 0.3).abs() < 1e-15);
    assert_eq!(u.eval(-1.0), 0.0);
    let a = atom_then_ramp();
    assert_eq!(a.eval(0.0), 0.5);
    assert_eq!(a.eval_left_limit(0.0), 0.0);
    assert_eq!(a.eval_left_limit(9.0), 1.0);
    assert!(a.eval(-1e-12) == 0.0);

    let m = mixed();
    let atoms = [(0.0, 0.35), (3.0, 0.1)];
    let mut prev = 0.0;
    for i in 0..=2000 {
        let x = -3.0 + 7.0 * i as f64 / 2000.0;
        let (f, l) = (m.eval(x), m.eval_left_limit(x));
        assert!(f >= prev && l <= f);
        let jump = atoms.iter().find(|(ax, _)| *ax == x).map_or(0.0, |(_, p)| *p);
        assert!((f - l - jump).abs() < 1e-12, "x={x}");
        prev = f;
    }
    for i in 0..=100 {
        let x = -0.5 + i as f64 / 100.0;
        assert_eq!(u.eval(x), u.eval_left_limit(x));
    }
}

#[test]
fn sup_below_cases() {
    let a = atom_then_ramp();
    assert_eq!(a.sup_below(0.3), 0.0);
    assert!((a.sup_below(0.7) - 0.7).abs() < 1e-15);
    assert_eq!(a.sup_below(0.0), 0.0);
    let m = mixed();
    // jump at 0 spans (0.25, 0.6]; flat at 0.6 until x = 1; jump at 3 spans (0.9, 1]
    assert!((m.sup_below(0.4) - 0.25).abs() < 1e-15);
    assert!((m.sup_below(0.6) - 0.25).abs() < 1e-15);
    assert!((m.sup_below(0.75) - 0.75).abs() < 1e-12);
    assert!((m.sup_below(0.95) - 0.9).abs() < 1e-12);
    let u = PiecewiseCdf::uniform(2.0, 5.0).unwrap();
    for i in 0..=50 {
        let t = i as f64 / 50.0;
        assert_eq!(u.sup_below(t), t);
        assert!(m.sup_below(t) <= t);
    }
}

#[test]
fn validation_rejects_bad_cdfs() {
    let bad = [
        r#"{"atoms": [{"x": 0, "mass": 0.5}]}"#,
        r#"{"atoms": [{"x": 0, "mass": -0.5}, {"x": 1, "mass": 1.5}]}"#,
        r#"{"segments": [{"x_lo": 1, "x_hi": 0, "f_lo": 0, "f_hi": 1}]}"#,
        r#"{"segments": [{"x_lo": 0, "x_hi": 1, "f_lo": 0, "f_hi": 0.6},
                         {"x_lo": 0.5, "x_hi": 2, "f_lo": 0.6, "f_hi": 1}]}"#,
        r#"{"segments": [{"x_lo": 0, "x_hi": 1, "f_lo": 0, "f_hi": 1}], "extra": []}"#,
        r#"{}"#,
    ];
    for text in bad {
        assert!(serde_json::from_str::<PiecewiseCdf>(text).is_err(), "{text}");
    }
}

#[test]
fn json_round_trip() {
    let m = mixed();
    let back: PiecewiseCdf = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
    assert_eq!(back, m);
    let d: ParameterDomain = serde_json::from_str(
        r#"{"box": [[0, 1], [2, 2]], "marginals": [{"kind": "truncated_gaussian", "mean": 0.2, "sigma": 0.3}, {"kind": "uniform"}]}"#,
    )
    .unwrap();
    let back: ParameterDomain = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
    assert_eq!(back, d);
}

#[test]
fn uniform_sampling_mean() {
    let u = PiecewiseCdf::uniform(0.0, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let n = 1_000_000;
    let mean = (0..n).map(|_| u.sample(&mut rng)).sum::<f64>() / n as f64;
    assert!((mean - 0.5).abs() < 0.002, "{mean}");
}

#[test]
fn atom_sampling_frequency() {
    let a = atom_then_ramp();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let n = 100_000;
    let hits = (0..n).filter(|_| a.sample(&mut rng) == 0.0).count();
    assert!((hits as f64 / n as f64 - 0.5).abs() < 0.005);
    let point = PiecewiseCdf::new(CdfSpec { segments: vec![], atoms: vec![Atom { x: 3.0, mass: 1.0 }] }).unwrap();
    assert!((0..1000).all(|_| point.sample(&mut rng) == 3.0));
}

#[test]
fn probability_integral_transform_is_uniform() {
    // 1% critical value of the KS statistic is about 1.628 / sqrt(n)
    let critical = 1.628 / 100.0;
    let cdfs = [
        PiecewiseCdf::uniform(-3.0, 7.0).unwrap(),
        serde_json::from_str(
            r#"{"segments": [{"x_lo": 0, "x_hi": 1, "f_lo": 0, "f_hi": 0.3}, {"x_lo": 2, "x_hi": 4, "f_lo": 0.3, "f_hi": 1}]}"#,
        )
        .unwrap(),
    ];
    for (seed, cdf) in cdfs.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed as u64 + 10);
        let u: Vec<f64> = (0..10_000).map(|_| cdf.eval(cdf.sample(&mut rng))).collect();
        let d = ks_uniform(u);
        assert!(d < critical, "KS distance {d}");
    }
}

#[test]
fn box_sampling_means() {
    let d = ParameterDomain::unit_box(2);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let n = 10_000;
    let mut sums = [0.0; 2];
    for _ in 0..n {
        let q = d.sample(&mut rng).unwrap();
        sums[0] += q[0];
        sums[1] += q[1];
    }
    for s in sums {
        assert!((s / n as f64 - 0.5).abs() < 0.01);
    }
}

#[test]
fn truncated_gaussian_mean() {
    let (mean, sigma, lo, hi) = (0.3, 0.5, 0.0, 2.0);
    let d = ParameterDomain::new(DomainSpec {
        bounds: vec![[lo, hi]],
        marginals: vec![Marginal::TruncatedGaussian { mean, sigma }],
    })
    .unwrap();
    let phi = |z: f64| (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let (alpha, beta) = ((lo - mean) / sigma, (hi - mean) / sigma);
    let z = d.acceptance_rate(0);
    let expected = mean + sigma * (phi(alpha) - phi(beta)) / z;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let n = 200_000;
    let got = (0..n).map(|_| d.sample(&mut rng).unwrap()[0]).sum::<f64>() / n as f64;
    // standard deviation of the truncated law is below sigma
    assert!((got - expected).abs() < 4.0 * sigma / (n as f64).sqrt(), "{got} vs {expected}");
}

#[test]
fn far_truncation_errors() {
    let d = ParameterDomain::new(DomainSpec {
        bounds: vec![[0.0, 1.0]],
        marginals: vec![Marginal::TruncatedGaussian { mean: -40.0, sigma: 2.0 }],
    })
    .unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    assert!(matches!(d.sample(&mut rng), Err(DistributionError::Truncation { coordinate: 0, .. })));
}
