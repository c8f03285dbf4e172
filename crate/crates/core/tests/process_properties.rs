use hitting_core::process::{simulate, Marginal, ProcessModel};

/// One-sample Kolmogorov distance between the ECDF of `values` and `cdf`.
fn kolmogorov(values: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Two-sample Kolmogorov distance.
fn kolmogorov_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        if a[i] <= b[j] {
            i += 1;
        } else {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

#[test]
fn armax_marginal_is_unit_frechet() {
    let model = ProcessModel::armax(0.5).unwrap();
    let path = simulate(model, 1_000_000, 2024, 0).unwrap();
    let d = kolmogorov(&path.values, |x| if x > 0.0 { (-1.0 / x).exp() } else { 0.0 });
    assert!(d < 0.005, "Kolmogorov distance {d}");
}

#[test]
fn moving_max_and_uniform_armax_marginals() {
    let mm = ProcessModel::moving_max(3, Marginal::UnitFrechet).unwrap();
    let path = simulate(mm, 300_000, 5, 1).unwrap();
    assert!(kolmogorov(&path.values, |x| mm.marginal_cdf(x)) < 0.01);

    let ua = ProcessModel::armax_with_marginal(0.7, Marginal::Uniform).unwrap();
    let path = simulate(ua, 300_000, 5, 2).unwrap();
    assert!(kolmogorov(&path.values, |x| ua.marginal_cdf(x)) < 0.01);
}

#[test]
fn no_transient_between_halves() {
    let n = 200_000;
    let bound = 3.0 * ((2.0f64 / 0.05).ln() / n as f64).sqrt();
    for model in [
        ProcessModel::armax(0.5).unwrap(),
        ProcessModel::armax(0.9).unwrap(),
        ProcessModel::moving_max(4, Marginal::UnitFrechet).unwrap(),
    ] {
        let path = simulate(model, n, 77, 0).unwrap();
        let (first, second) = path.values.split_at(n / 2);
        let d = kolmogorov_two_sample(first, second);
        assert!(d < bound, "{model:?}: {d} >= {bound}");
    }
}

#[test]
fn armax_with_zero_alpha_matches_iid_in_law() {
    let a = simulate(ProcessModel::armax(0.0).unwrap(), 200_000, 3, 0).unwrap();
    let b = simulate(ProcessModel::iid(Marginal::UnitFrechet), 200_000, 3, 0).unwrap();
    let bound = 3.0 * ((2.0f64 / 0.05).ln() / 200_000.0).sqrt();
    assert!(kolmogorov_two_sample(&a.values, &b.values) < bound);
}

#[test]
fn replications_are_uncorrelated() {
    let n = 100_000;
    for model in [
        ProcessModel::iid(Marginal::Uniform),
        ProcessModel::armax_with_marginal(0.5, Marginal::Uniform).unwrap(),
        ProcessModel::moving_max(2, Marginal::Uniform).unwrap(),
    ] {
        let a = simulate(model, n, 1234, 0).unwrap();
        let b = simulate(model, n, 1234, 1).unwrap();
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let (ma, mb) = (mean(&a.values), mean(&b.values));
        let cov: f64 = a.values.iter().zip(&b.values).map(|(x, y)| (x - ma) * (y - mb)).sum();
        let va: f64 = a.values.iter().map(|x| (x - ma).powi(2)).sum();
        let vb: f64 = b.values.iter().map(|y| (y - mb).powi(2)).sum();
        let corr = cov / (va * vb).sqrt();
        assert!(corr.abs() < 5.0 / (n as f64).sqrt(), "{model:?}: corr {corr}");
    }
}
