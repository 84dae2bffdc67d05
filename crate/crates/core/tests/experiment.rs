use orbit_equidist::enumerate::Group;
use orbit_equidist::experiment::{orbit_dump, run_sl_experiment, run_sp_experiment, ExperimentConfig};
use orbit_equidist::measures::Region;

fn ledrappier(t_grid: Vec<f64>) -> ExperimentConfig {
    ExperimentConfig::new(Group::Sl, 2, 1, &[2f64.sqrt(), 3f64.sqrt()], t_grid)
        .unwrap()
        .with_regions((1..=4).map(|k| Region::annulus(k as f64, k as f64 + 1.0).unwrap()).collect())
}

/// `N_T(Ω)` by looping over `(a, b, c)` and solving `ad − bc = 1` for `d`.
fn brute_count(v: [f64; 2], omega: &Region, t: f64) -> u64 {
    let r = t.ceil() as i64;
    let mut count = 0;
    for a in -r..=r {
        for b in -r..=r {
            for c in -r..=r {
                let ds: Vec<i64> = if a != 0 {
                    if (1 + b * c) % a == 0 { vec![(1 + b * c) / a] } else { vec![] }
                } else if b * c == -1 {
                    (-r..=r).collect()
                } else {
                    vec![]
                };
                for d in ds {
                    if ((a * a + b * b + c * c + d * d) as f64) < t * t {
                        let p = [a as f64 * v[0] + b as f64 * v[1], c as f64 * v[0] + d as f64 * v[1]];
                        if omega.contains(&p) {
                            count += 1;
                        }
                    }
                }
            }
        }
    }
    count
}

#[test]
fn tiny_run_matches_brute_force() {
    let cfg = ledrappier(vec![2.5, 5.0]);
    let rep = run_sl_experiment(&cfg).unwrap();
    for row in &rep.rows {
        let want = brute_count([2f64.sqrt(), 3f64.sqrt()], &cfg.regions[row.region_id], row.t);
        assert_eq!(row.empirical, want, "region {} T {}", row.region_id, row.t);
    }
}

#[test]
fn reports_are_reproducible() {
    let cfg = ledrappier(vec![40.0, 80.0]);
    assert_eq!(run_sl_experiment(&cfg).unwrap().csv(), run_sl_experiment(&cfg).unwrap().csv());
    let sp = ExperimentConfig { group: Group::Sp, n: 1, ..cfg.clone() };
    assert_eq!(run_sp_experiment(&sp).unwrap().csv(), run_sp_experiment(&sp).unwrap().csv());
    assert_eq!(orbit_dump(&cfg, 30.0).unwrap(), orbit_dump(&cfg, 30.0).unwrap());
}

#[test]
fn standard_isotropic_frame_is_not_dense() {
    let cfg = ExperimentConfig::new(Group::Sp, 2, 2, &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0], vec![3.0])
        .unwrap()
        .with_regions(vec![Region::single_box(vec![-1.0; 8], vec![1.0; 8]).unwrap()]);
    let rep = run_sp_experiment(&cfg).unwrap();
    assert!(!rep.dense());
    assert_eq!(rep.certificate.witness, Some(vec![0, 1, 0, 0]));
}

#[test]
fn orbit_dump_is_angle_uniform() {
    // Points weighted by 1/‖v‖ against uniform angle, eight sectors.
    let cfg = ledrappier(vec![200.0]);
    let dump = orbit_dump(&cfg, 200.0).unwrap();
    assert!(!dump.truncated);
    let mut sectors = [0.0f64; 8];
    let mut total = 0.0;
    for p in &dump.points {
        let r = p[0].hypot(p[1]);
        if !(1.0..=20.0).contains(&r) {
            continue;
        }
        let theta = p[1].atan2(p[0]) + std::f64::consts::PI;
        let k = ((theta / (2.0 * std::f64::consts::PI) * 8.0) as usize).min(7);
        sectors[k] += 1.0;
        total += 1.0;
    }
    let expect = total / 8.0;
    let chi2: f64 = sectors.iter().map(|s| (s - expect).powi(2) / expect).sum();
    // 7 degrees of freedom; 24.3 is the 0.1% quantile.
    assert!(chi2 < 24.3, "chi2 = {chi2}, sectors = {sectors:?}");
}
