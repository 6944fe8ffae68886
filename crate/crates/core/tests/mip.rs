use std::collections::HashMap;
use std::time::Duration;

use ncs_core::io::read_learning_set;
use ncs_core::learn::learn_mip;
use ncs_core::mip::{
    check_point, decode_mrsort, encode_mip, encode_mip_d, encode_mip_o, parse_lp, parse_solution, substitute, write_lp,
    LpModel, MipCommand, MipParams, MipSolution, Scaling, Variant,
};
use ncs_core::synth::{generate, GenConfig};
use ncs_core::{Alternative, CriteriaSpec, Error, LearningSet, Profile};

fn micro() -> LearningSet {
    LearningSet::new(
        CriteriaSpec::ascending(1).unwrap(),
        2,
        vec![Alternative { id: "a".into(), profile: Profile::new(vec!["0.8".parse().unwrap()]), class: 2 }],
    )
    .unwrap()
}

fn point(pairs: &[(&str, f64)]) -> HashMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

#[test]
fn hand_feasible_point_on_micro_instance() {
    let m = encode_mip(&micro(), Variant::Optimize, Scaling::identity(1), MipParams::default()).unwrap();
    assert_eq!(m.num_binaries(), 1);
    let good = point(&[
        ("alpha", 0.5),
        ("lambda", 0.5),
        ("w_1", 1.0),
        ("b_1_1", 0.3),
        ("d_a1_1_1", 1.0),
        ("c_a1_1_1", 1.0),
        ("x_a1", 0.5),
    ]);
    check_point(&m, &good).unwrap();
    let model = decode_mrsort(&m, &good).unwrap();
    assert!(model.to_uncs().extends(&micro()).unwrap().is_empty());

    // frontier above the alternative contradicts delta = 1
    let mut bad = good.clone();
    bad.insert("b_1_1".into(), 0.9);
    assert!(matches!(check_point(&m, &bad), Err(Error::Decode(_))));

    let mut missing = good;
    missing.remove("lambda");
    assert!(matches!(decode_mrsort(&m, &missing), Err(Error::Decode(_))));
}

#[test]
fn lp_text_round_trips() {
    let d = read_learning_set(include_str!("fixtures/cars.csv"), &["cost", "acceleration"], Some(3)).unwrap();
    for m in [encode_mip_o(&d).unwrap(), encode_mip_d(&d).unwrap()] {
        let text = write_lp(&m);
        assert_eq!(parse_lp(&text).unwrap(), LpModel::from_model(&m));
        let declared: std::collections::HashSet<&str> = m.vars.iter().map(|v| v.name.as_str()).collect();
        let parsed = parse_lp(&text).unwrap();
        assert!(parsed.rows.iter().flat_map(|r| &r.terms).all(|(n, _)| declared.contains(n.as_str())));
    }
}

#[test]
fn ground_truth_substitution_is_feasible() {
    for seed in 0..20 {
        let cfg = GenConfig::new(4, 3, 30, seed).unwrap();
        let (truth, data) = generate(&cfg).unwrap();
        for variant in [Variant::Optimize, Variant::Decide] {
            let m = encode_mip(&data, variant, Scaling::identity(4), MipParams::default()).unwrap();
            let sub = substitute(&m, &truth).unwrap();
            check_point(&m, &sub).unwrap_or_else(|e| panic!("seed {seed} {variant:?}: {e}"));
            let decoded = decode_mrsort(&m, &sub).unwrap();
            assert!(decoded.to_uncs().extends(&data).unwrap().is_empty());
        }
    }
}

#[test]
fn decision_point_normalizes_into_optimization_point() {
    for seed in 0..10 {
        let (truth, data) = generate(&GenConfig::new(3, 2, 20, 100 + seed).unwrap()).unwrap();
        let md = encode_mip(&data, Variant::Decide, Scaling::identity(3), MipParams::default()).unwrap();
        let mo = encode_mip(&data, Variant::Optimize, Scaling::identity(3), MipParams::default()).unwrap();
        let d_point = substitute(&md, &truth).unwrap();
        check_point(&md, &d_point).unwrap();
        let total: f64 = (1..=3).map(|i| d_point[&format!("w_{i}")]).sum();
        let mut o_point: HashMap<String, f64> = d_point
            .iter()
            .map(|(k, v)| {
                let scaled = k.starts_with('w') || k.starts_with('c') || k.starts_with('x') || k.starts_with('y') || k == "lambda";
                (k.clone(), if scaled { v / total } else { *v })
            })
            .collect();
        let alpha = o_point
            .iter()
            .filter(|(k, _)| k.starts_with("x_") || k.starts_with("y_"))
            .map(|(_, v)| *v)
            .fold(1.0, f64::min);
        o_point.insert("alpha".into(), alpha);
        check_point(&mo, &o_point).unwrap();
    }
}

#[test]
fn solution_files() {
    assert_eq!(parse_solution("# status: infeasible\n").unwrap(), MipSolution::Infeasible);
    let MipSolution::Feasible(v) = parse_solution("# c\nw_1 0.25\n\nlambda 1e-3\n").unwrap() else { panic!() };
    assert_eq!(v["lambda"], 0.001);
    assert!(parse_solution("w_1\n").is_err());
    assert!(parse_solution("w_1 abc\n").is_err());
}

#[test]
fn command_template_needs_placeholders() {
    assert!(MipCommand::parse("highs {lp}").is_err());
    let c = MipCommand::parse("solve {lp} --out={sol}").unwrap();
    assert_eq!(c.render("/a.lp", "/a.sol"), vec!["solve", "/a.lp", "--out=/a.sol"]);
}

/// Runs only when `NCS_MIP_CMD` names a solver command.
#[test]
fn external_solver_models_extend_their_learning_sets() {
    let Ok(template) = std::env::var("NCS_MIP_CMD") else {
        eprintln!("NCS_MIP_CMD not set; skipping");
        return;
    };
    let cmd = MipCommand::parse(&template).unwrap();
    for seed in 0..4 {
        let (_, data) = generate(&GenConfig::new(4, 2, 16, seed).unwrap()).unwrap();
        for variant in [Variant::Optimize, Variant::Decide] {
            let out = learn_mip(&data, variant, &cmd, Duration::from_secs(60)).unwrap();
            let model = out.model.expect("generated data is representable");
            assert!(model.to_uncs().extends(&data).unwrap().is_empty());
        }
    }
}
