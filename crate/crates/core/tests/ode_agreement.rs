use filippov::bifurcation::circle::CircleScenario;
use filippov::bifurcation::*;
use filippov::RunConfig;

/// Crossing-cycle counts of the circle field agree with the synthetic
/// family built from its own fitted germs.
#[test]
fn circle_matches_fitted_synthetic() {
    let cfg = RunConfig::default();
    let s = CircleScenario::new(&cfg).unwrap();
    let (k, d) = (s.kappa(), s.dtilde());
    let fam = ViFamily::new(k, d, 2.0).unwrap();
    let coefs = [4.0 * k * d / (k - d), -4.0 * k, 4.0 * d, -k, d];
    let [(a0, a1), (b0, b1)] = s.default_ranges();
    let (mut compared, mut agree) = (0, 0);
    let mut mismatches = vec![];
    for i in 0..9 {
        let a = a0 + (a1 - a0) * i as f64 / 8.0;
        if a.abs() < 1e-9 {
            continue;
        }
        for j in 0..9 {
            let bp = b0 + (b1 - b0) * j as f64 / 8.0;
            let be = s.beta_eff(bp).unwrap();
            let near = coefs.iter().any(|c| (be - c * a * a).abs() < 0.25 * c.abs() * a * a);
            if near {
                continue;
            }
            let ode = s.data(a, bp).unwrap();
            let syn = fam.classify([a, be], &cfg).unwrap();
            compared += 1;
            if ode.crossing.len() == syn.crossing.len() {
                agree += 1;
            } else {
                mismatches.push((a, bp, ode.crossing.len(), syn.crossing.len()));
            }
        }
    }
    assert!(compared >= 30, "only {compared} cells compared");
    assert_eq!(agree, compared, "{mismatches:?}");
}
