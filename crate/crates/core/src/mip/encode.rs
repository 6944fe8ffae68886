use std::collections::HashMap;

use rust_decimal::prelude::ToPrimitive;

use super::{Constraint, MipModel, MipParams, MipVar, Sense, VarKind, Variant};
use crate::error::{Error, Result};
use crate::model::{LearningSet, Value};

/// Per-criterion affine map from oriented values onto `[0, 1]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scaling {
    /// `(low, span)`; a zero span maps every value to 0.5.
    ranges: Vec<(Value, Value)>,
}

impl Scaling {
    pub fn identity(n: usize) -> Self {
        Scaling { ranges: vec![(Value::ZERO, Value::ONE); n] }
    }

    /// Min-max over the learning set.
    pub fn fit(data: &LearningSet) -> Self {
        let ranges = (0..data.criteria().len())
            .map(|i| {
                let v = data.distinct_values(i);
                match (v.first(), v.last()) {
                    (Some(&lo), Some(&hi)) => (lo, hi - lo),
                    _ => (Value::ZERO, Value::ONE),
                }
            })
            .collect();
        Scaling { ranges }
    }

    /// Identity when every value already lies in `[0, 1]`, min-max otherwise.
    pub fn for_data(data: &LearningSet) -> Self {
        let inside = data
            .alternatives()
            .iter()
            .all(|a| a.profile.values().iter().all(|v| *v >= Value::ZERO && *v <= Value::ONE));
        if inside {
            Scaling::identity(data.criteria().len())
        } else {
            Scaling::fit(data)
        }
    }

    pub fn len(&self) -> usize {
        self.ranges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    pub fn normalize(&self, i: usize, v: Value) -> f64 {
        let (lo, span) = self.ranges[i];
        if span.is_zero() {
            0.5
        } else {
            ((v - lo) / span).to_f64().expect("finite decimal")
        }
    }

    /// Inverse map, `None` on a degenerate criterion.
    pub fn denormalize(&self, i: usize, t: f64) -> Option<Value> {
        let (lo, span) = self.ranges[i];
        if span.is_zero() {
            return None;
        }
        let t = Value::from_f64_retain(t)?.round_dp(15);
        Some(lo + t * span)
    }
}

struct Builder {
    vars: Vec<MipVar>,
    index: HashMap<String, usize>,
    constraints: Vec<Constraint>,
}

impl Builder {
    fn var(&mut self, name: String, kind: VarKind, lower: f64, upper: Option<f64>) -> usize {
        let id = self.vars.len();
        self.index.insert(name.clone(), id);
        self.vars.push(MipVar { name, kind, lower, upper });
        id
    }

    fn row(&mut self, name: String, terms: Vec<(usize, f64)>, sense: Sense, rhs: f64) {
        self.constraints.push(Constraint { name, terms, sense, rhs });
    }
}

pub fn encode_mip_o(data: &LearningSet) -> Result<MipModel> {
    encode_mip(data, Variant::Optimize, Scaling::for_data(data), MipParams::default())
}

pub fn encode_mip_d(data: &LearningSet) -> Result<MipModel> {
    encode_mip(data, Variant::Decide, Scaling::for_data(data), MipParams::default())
}

/// Builds either variant. Alternative `j` (1-based, in data order) of class
/// `A` gets threshold binaries only for frontiers `A-1` and `A` that exist.
pub fn encode_mip(data: &LearningSet, variant: Variant, scaling: Scaling, params: MipParams) -> Result<MipModel> {
    let n = data.criteria().len();
    let p = data.classes();
    if scaling.len() != n {
        return Err(Error::Input(format!("scaling covers {} criteria, data has {n}", scaling.len())));
    }
    let norm: Vec<Vec<f64>> = data
        .alternatives()
        .iter()
        .map(|a| a.profile.values().iter().enumerate().map(|(i, v)| scaling.normalize(i, *v)).collect())
        .collect();
    if let Some((j, _)) = norm.iter().enumerate().find(|(_, r)| r.iter().any(|t| !(0.0..=1.0).contains(t))) {
        return Err(Error::Input(format!(
            "alternative `{}` has values outside [0, 1] after scaling",
            data.alternatives()[j].id
        )));
    }

    let optimize = variant == Variant::Optimize;
    let cap = if optimize { 1.0 } else { params.weight_cap };
    let (m, eps) = (params.big_m, params.epsilon);
    let mut b = Builder { vars: Vec::new(), index: HashMap::new(), constraints: Vec::new() };

    let alpha = optimize.then(|| b.var("alpha".into(), VarKind::Continuous, 0.0, Some(1.0)));
    let lambda = b.var("lambda".into(), VarKind::Continuous, 0.0, None);
    let w: Vec<usize> = (1..=n)
        .map(|i| b.var(format!("w_{i}"), VarKind::Continuous, 0.0, Some(cap)))
        .collect();
    let bv: Vec<Vec<usize>> = (1..p)
        .map(|h| {
            (1..=n)
                .map(|i| b.var(format!("b_{h}_{i}"), VarKind::Continuous, 0.0, Some(m)))
                .collect()
        })
        .collect();

    for (h, row) in bv.iter().enumerate().skip(1) {
        for i in 0..n {
            b.row(
                format!("nest_{}_{}", h + 1, i + 1),
                vec![(row[i], 1.0), (bv[h - 1][i], -1.0)],
                Sense::Ge,
                0.0,
            );
        }
    }
    if optimize {
        b.row("normalize".into(), w.iter().map(|&v| (v, 1.0)).collect(), Sense::Eq, 1.0);
    }

    for (jx, alt) in data.alternatives().iter().enumerate() {
        let j = jx + 1;
        let class = alt.class;
        let mut sums: Vec<(usize, Vec<usize>)> = Vec::new();
        for k in [class - 1, class] {
            if k < 1 || k > p - 1 {
                continue;
            }
            let mut cs = Vec::with_capacity(n);
            for i in 1..=n {
                let a = norm[jx][i - 1];
                let d = b.var(format!("d_a{j}_{i}_{k}"), VarKind::Binary, 0.0, Some(1.0));
                let c = b.var(format!("c_a{j}_{i}_{k}"), VarKind::Continuous, 0.0, None);
                let bk = bv[k - 1][i - 1];
                b.row(format!("pass_a{j}_{i}_{k}"), vec![(bk, 1.0), (d, m)], Sense::Le, a + m);
                b.row(format!("fail_a{j}_{i}_{k}"), vec![(bk, 1.0), (d, m)], Sense::Ge, a + eps);
                b.row(format!("cw_a{j}_{i}_{k}"), vec![(c, 1.0), (w[i - 1], -1.0)], Sense::Le, 0.0);
                b.row(format!("cd_a{j}_{i}_{k}"), vec![(c, 1.0), (d, -cap)], Sense::Le, 0.0);
                b.row(
                    format!("cwd_a{j}_{i}_{k}"),
                    vec![(c, 1.0), (d, -cap), (w[i - 1], -1.0)],
                    Sense::Ge,
                    -cap,
                );
                cs.push(c);
            }
            sums.push((k, cs));
        }
        for (k, cs) in sums {
            let mut terms: Vec<(usize, f64)> = cs.iter().map(|&c| (c, 1.0)).collect();
            terms.push((lambda, -1.0));
            let (slack, sign) = if k == class - 1 {
                (b.var(format!("x_a{j}"), VarKind::Continuous, 0.0, None), -1.0)
            } else {
                (b.var(format!("y_a{j}"), VarKind::Continuous, 0.0, None), 1.0)
            };
            let tag = if k == class - 1 { "x" } else { "y" };
            terms.push((slack, sign));
            b.row(format!("votes_{tag}_a{j}"), terms, Sense::Eq, 0.0);
            match alpha {
                Some(al) => b.row(format!("margin_{tag}_a{j}"), vec![(al, 1.0), (slack, -1.0)], Sense::Le, 0.0),
                None => b.row(format!("margin_{tag}_a{j}"), vec![(slack, 1.0)], Sense::Ge, 1.0),
            }
        }
    }

    let objective = alpha.map(|a| vec![(a, -1.0)]).unwrap_or_default();
    Ok(MipModel {
        variant,
        params,
        vars: b.vars,
        constraints: b.constraints,
        objective,
        data: data.clone(),
        scaling,
        index: b.index,
    })
}
