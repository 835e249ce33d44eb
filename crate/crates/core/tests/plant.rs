use errcomp::plant::{
    arrhenius_resistance, coulomb_count, simulate_am, simulate_plant, EquivCircuitParams, Hysteresis, OcvTable,
    ParamMap, PlantConfig, RcPair,
};

fn flat(r0: f64, r1: f64, c1: f64, r2: f64, c2: f64, ocv: f64) -> EquivCircuitParams {
    EquivCircuitParams {
        r0: ParamMap::constant(r0),
        r1: ParamMap::constant(r1),
        c1: ParamMap::constant(c1),
        r2: ParamMap::constant(r2),
        c2: ParamMap::constant(c2),
        ocv: OcvTable {
            soc: vec![0.0, 1.0],
            voltage: vec![ocv, ocv],
        },
        capacity_ah: 4.0,
    }
}

#[test]
fn two_rc_step_matches_closed_form() {
    let (r0, r1, c1, r2, c2) = (0.02, 0.01, 1000.0, 0.015, 20_000.0);
    let p = flat(r0, r1, c1, r2, c2, 3.7);
    let (i, dt, n) = (-3.0, 0.05, 20_000);
    let out = simulate_am(&p, &vec![i; n], &vec![25.0; n], 0.6, dt).unwrap();
    for (k, v) in out.voltage.iter().enumerate() {
        let t = k as f64 * dt;
        let i_dis = -i;
        let exact = 3.7
            - i_dis * r0
            - i_dis * r1 * (1.0 - (-t / (r1 * c1)).exp())
            - i_dis * r2 * (1.0 - (-t / (r2 * c2)).exp());
        assert!((v - exact).abs() < 1e-9, "step {k}: {v} vs {exact}");
    }
}

#[test]
fn rc_relaxes_after_pulse() {
    let (r1, c1) = (0.01, 500.0);
    let p = flat(0.02, r1, c1, 0.0, 1.0, 3.7);
    let dt = 0.1;
    let mut current = vec![-2.0; 100];
    current.extend(vec![0.0; 400]);
    let out = simulate_am(&p, &current, &vec![25.0; 500], 0.5, dt).unwrap();
    let tau = r1 * c1;
    let v_end = 2.0 * r1 * (1.0 - (-100.0 * dt / tau).exp());
    for k in 100..500 {
        let exact = 3.7 - v_end * (-((k - 100) as f64) * dt / tau).exp();
        assert!((out.voltage[k] - exact).abs() < 1e-9);
    }
}

#[test]
fn soc_is_the_coulomb_count() {
    let current: Vec<f64> = (0..1000).map(|k| ((k as f64) * 0.02).cos() * 5.0).collect();
    let p = EquivCircuitParams::desk_default();
    let dt = 0.05;
    let out = simulate_am(&p, &current, &vec![25.0; 1000], 0.4, dt).unwrap();
    let mut q = 0.0;
    for (k, s) in out.soc.iter().enumerate() {
        q += current[k] * dt / 3600.0;
        assert!((s - (0.4 + q / p.capacity_ah)).abs() < 1e-12);
    }
    assert_eq!(coulomb_count(&current, dt, p.capacity_ah, 0.4).unwrap(), out.soc);
}

#[test]
fn arrhenius_law_by_hand() {
    let r = arrhenius_resistance(0.02, 298.15, 2500.0, 273.15).unwrap();
    let by_hand = 0.02 * (2500.0f64 * (1.0 / 273.15 - 1.0 / 298.15)).exp();
    assert!((r - by_hand).abs() < 1e-15);
    assert!(r > 0.02);
    assert_eq!(arrhenius_resistance(0.02, 298.15, 2500.0, 0.0).unwrap_err().kind(), "precondition");
}

#[test]
fn desk_resistance_rises_in_the_cold() {
    let p = EquivCircuitParams::desk_default();
    let (cold, _) = p.r0.eval(0.5, 0.0, 0.0);
    let (warm, _) = p.r0.eval(0.5, 25.0, 0.0);
    let (hot, _) = p.r0.eval(0.5, 45.0, 0.0);
    assert!(cold > warm && warm > hot);
    assert!((warm - 0.02).abs() < 1e-12);
}

#[test]
fn plant_extra_rc_and_hysteresis_by_hand() {
    let base = flat(0.02, 0.01, 1000.0, 0.015, 20_000.0, 3.7);
    let rc = RcPair { r: 0.005, c: 100_000.0 };
    let cfg = PlantConfig {
        base: base.clone(),
        extra_rc: Some(rc),
        hysteresis: Hysteresis { magnitude: 0.01, rate: 0.05 },
        sensor_noise_snr_db: f64::INFINITY,
        seed: 0,
    };
    let (n, dt, i) = (2000, 0.1, 2.0);
    let ts = simulate_plant(&cfg, &vec![i; n], &vec![25.0; n], 0.5, dt).unwrap();
    let am = simulate_am(&base, &vec![i; n], &vec![25.0; n], 0.5, dt).unwrap();
    let v = ts.require("v").unwrap();
    let tau = rc.r * rc.c;
    for k in 0..n {
        let t = k as f64 * dt;
        let extra = -i * rc.r * (1.0 - (-t / tau).exp());
        let hyst = 0.01 * (1.0 - (-0.05 * i * t).exp());
        assert!((v[k] - (am.voltage[k] - extra + hyst)).abs() < 1e-9, "step {k}");
    }
}

#[test]
fn plant_noise_is_seeded() {
    let cfg = PlantConfig::desk_default();
    let i: Vec<f64> = (0..500).map(|k| (k as f64 * 0.1).sin()).collect();
    let t = vec![25.0; 500];
    let a = simulate_plant(&cfg, &i, &t, 0.5, 0.01).unwrap();
    let b = simulate_plant(&cfg, &i, &t, 0.5, 0.01).unwrap();
    assert_eq!(a, b);
    let other = PlantConfig { seed: cfg.seed + 1, ..cfg };
    assert_ne!(a, simulate_plant(&other, &i, &t, 0.5, 0.01).unwrap());
}

#[test]
fn invalid_inputs_are_rejected() {
    let p = EquivCircuitParams::desk_default();
    assert_eq!(simulate_am(&p, &[1.0, 2.0], &[25.0], 0.5, 0.1).unwrap_err().kind(), "precondition");
    assert_eq!(simulate_am(&p, &[1.0], &[25.0], 1.5, 0.1).unwrap_err().kind(), "precondition");
    assert_eq!(simulate_am(&p, &[1.0], &[25.0], 0.5, 0.0).unwrap_err().kind(), "precondition");
}
