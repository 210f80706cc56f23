use isoflow::fredholm::TracyWidom;
use isoflow::lis::lis_monte_carlo;
use isoflow::stats::{ks_against_cdf, mean};

#[test]
fn scaled_lis_approaches_tracy_widom() {
    let tw = TracyWidom::new().unwrap();
    let mut last = f64::INFINITY;
    let mut means = Vec::new();
    for n in [100, 1000, 10_000] {
        let s = lis_monte_carlo(n, 2000, 9).unwrap();
        let ks = ks_against_cdf(s.sorted_scaled(), |t| tw.cdf(t));
        assert!(ks < last, "KS {ks} did not shrink at N = {n}");
        last = ks;
        means.push(mean(s.sorted_scaled()));
    }
    // finite-N means approach the limit -1.7711 from above
    assert!(means.windows(2).all(|w| w[1] < w[0]), "{means:?}");
    assert!(means[2] > -1.7711);
}
