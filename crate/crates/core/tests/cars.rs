use ncs_core::io::{read_learning_set, read_model, ModelFile};
use ncs_core::learn::{learn_sat, SatBackend};
use ncs_core::mip::{encode_mip_d, encode_mip_o, write_lp, Sense};
use ncs_core::sat::{decode, encode, model_assignment, write_dimacs};
use ncs_core::solver::solve;
use ncs_core::{dominates, favorable_coalition, Coalition, Frontier, LearningSet, UncsModel, Value};

const CSV: &str = include_str!("fixtures/cars.csv");
const MODEL: &str = include_str!("fixtures/cars_model.json");

fn data() -> LearningSet {
    read_learning_set(CSV, &["cost", "acceleration"], Some(3)).unwrap()
}

fn model() -> UncsModel {
    match read_model(MODEL).unwrap() {
        ModelFile::Uncs(m) => m,
        other => panic!("unexpected {other:?}"),
    }
}

fn profile(id: &str) -> ncs_core::Profile {
    data().alternatives().iter().find(|a| a.id == id).unwrap().profile.clone()
}

#[test]
fn favorable_coalitions_match_the_star_table() {
    let m = model();
    let b = m.frontiers();
    assert_eq!(favorable_coalition(&profile("m1"), &b[0]).unwrap(), Coalition::full(4));
    assert_eq!(favorable_coalition(&profile("m6"), &b[1]).unwrap(), Coalition::from_indices([0]));
    assert_eq!(favorable_coalition(&profile("m3"), &b[0]).unwrap(), Coalition::from_indices([0, 3]));
    assert_eq!(favorable_coalition(&profile("m3"), &b[1]).unwrap(), Coalition::from_indices([0]));
}

#[test]
fn frontier_dominance_by_direct_comparison() {
    let m = model();
    let as_profile = |f: &Frontier| {
        ncs_core::Profile::new(f.thresholds().iter().map(|t| t.value().unwrap()).collect())
    };
    let (b1, b2) = (as_profile(&m.frontiers()[0]), as_profile(&m.frontiers()[1]));
    assert!(dominates(&b2, &b1).unwrap());
    assert!(!dominates(&b1, &b2).unwrap());
}

#[test]
fn model_reproduces_the_assignment_table() {
    let m = model();
    let d = data();
    for a in d.alternatives() {
        assert_eq!(m.assign(&a.profile).unwrap(), a.class, "{}", a.id);
    }
    assert!(m.extends(&d).unwrap().is_empty());

    let mut changed: Vec<_> = d.alternatives().to_vec();
    changed.iter_mut().find(|a| a.id == "m5").unwrap().class = 1;
    let changed = LearningSet::new(d.criteria().clone(), 3, changed).unwrap();
    let v = m.extends(&changed).unwrap();
    assert_eq!(v.len(), 1);
    assert_eq!((v[0].id.as_str(), v[0].expected, v[0].computed), ("m5", 1, 3));
}

#[test]
fn encoding_sizes() {
    let inst = encode(&data()).unwrap();
    let voc = &inst.vocabulary;
    let sizes: Vec<usize> = (0..4).map(|i| voc.values(i).len()).collect();
    assert_eq!(sizes, vec![6, 6, 4, 5]);
    assert_eq!((voc.num_x(), voc.num_y(), voc.num_vars()), (42, 16, 58));
    assert_eq!(inst.counts.as_array(), [34, 21, 32, 80, 64]);
    assert_eq!(inst.cnf.num_clauses(), 231);
    assert!(write_dimacs(&inst.cnf).starts_with("p cnf 58 231\n"));
    assert!(inst.to_dimacs().starts_with("p cnf 58 231\n"));
}

#[test]
fn ground_truth_image_satisfies_and_decodes_back() {
    let inst = encode(&data()).unwrap();
    let m = model();
    let image = model_assignment(&inst.vocabulary, &m).unwrap();
    assert!(inst.cnf.is_satisfied_by(&image));
    let back = decode(&inst.vocabulary, &image).unwrap();
    assert!(back.extends(&data()).unwrap().is_empty());
    assert_eq!(back.sufficient(), m.sufficient());
}

#[test]
fn learned_model_reproduces_the_assignment() {
    let d = data();
    assert!(solve(&encode(&d).unwrap().cnf).unwrap().is_sat());
    let out = learn_sat(&d, &SatBackend::default()).unwrap();
    let learned = out.model.unwrap();
    for a in d.alternatives() {
        assert_eq!(learned.assign(&a.profile).unwrap(), a.class, "{}", a.id);
    }
}

#[test]
fn mip_shapes() {
    let d = data();
    let o = encode_mip_o(&d).unwrap();
    let dd = encode_mip_d(&d).unwrap();
    assert_eq!(o.num_binaries(), 36);
    assert_eq!(dd.num_binaries(), 36);
    let unit_rows = |m: &ncs_core::mip::MipModel| {
        m.constraints
            .iter()
            .filter(|c| c.sense == Sense::Eq && c.rhs == 1.0 && c.terms.iter().all(|t| t.1 == 1.0))
            .count()
    };
    assert_eq!(unit_rows(&o), 1);
    assert_eq!(unit_rows(&dd), 0);
    assert_eq!(write_lp(&o).lines().filter(|l| l.trim_end().ends_with("= 1") && !l.contains("<=") && !l.contains(">=")).count(), 1);
    assert_eq!(dd.num_continuous() + 1, o.num_continuous());
    // one margin row per alternative per applicable frontier: 3 middle * 2 + 3 extreme
    assert_eq!(dd.rows_named("margin_").count(), 9);
    assert!(dd.rows_named("margin_").all(|c| c.sense == Sense::Ge && c.rhs == 1.0));
    // frontier values after min-max rescaling stay within [0, 1]
    assert!(o.scaling().normalize(0, Value::from(-15131)) == 1.0);
}
