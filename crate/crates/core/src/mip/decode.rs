use std::collections::HashMap;

use rust_decimal::prelude::{FromPrimitive, ToPrimitive};

use super::{MipModel, Sense, VarKind, Variant};
use crate::error::{Error, Result};
use crate::model::{Frontier, MrSortModel, Threshold, Value};

/// Solver output in `name value` form.
#[derive(Clone, Debug, PartialEq)]
pub enum MipSolution {
    Feasible(HashMap<String, f64>),
    Infeasible,
}

/// One `name value` pair per line. Lines starting with `#` are comments,
/// except `# status: infeasible`, which marks a proven infeasible program.
pub fn parse_solution(text: &str) -> Result<MipSolution> {
    let mut values = HashMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(status) = comment.trim().strip_prefix("status:") {
                if status.trim().eq_ignore_ascii_case("infeasible") {
                    return Ok(MipSolution::Infeasible);
                }
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (Some(name), Some(v), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::Parse(format!("solution line {}: expected `name value`", k + 1)));
        };
        let v: f64 = v
            .parse()
            .map_err(|_| Error::Parse(format!("solution line {}: bad value `{v}`", k + 1)))?;
        if !v.is_finite() {
            return Err(Error::Parse(format!("solution line {}: non-finite value", k + 1)));
        }
        values.insert(name.to_string(), v);
    }
    Ok(MipSolution::Feasible(values))
}

fn lookup(m: &MipModel, values: &HashMap<String, f64>) -> Result<Vec<f64>> {
    m.vars
        .iter()
        .map(|v| {
            values
                .get(&v.name)
                .copied()
                .ok_or_else(|| Error::Decode(format!("solution has no value for `{}`", v.name)))
        })
        .collect()
}

/// Checks bounds, integrality and every constraint within the model's
/// tolerance, scaled by the magnitude of each row.
pub fn check_point(m: &MipModel, values: &HashMap<String, f64>) -> Result<()> {
    let x = lookup(m, values)?;
    let tol = m.params.tolerance;
    for (v, &val) in m.vars.iter().zip(&x) {
        if val < v.lower - tol || v.upper.is_some_and(|u| val > u + tol) {
            return Err(Error::Decode(format!("`{}` = {val} violates its bounds", v.name)));
        }
        if v.kind == VarKind::Binary && (val - val.round()).abs() > tol {
            return Err(Error::Decode(format!("binary `{}` = {val} is fractional", v.name)));
        }
    }
    for c in &m.constraints {
        let mut lhs = 0.0;
        let mut scale = c.rhs.abs().max(1.0);
        for &(v, coef) in &c.terms {
            lhs += coef * x[v];
            scale = scale.max((coef * x[v]).abs());
        }
        let slack = tol * scale;
        let ok = match c.sense {
            Sense::Le => lhs <= c.rhs + slack,
            Sense::Ge => lhs >= c.rhs - slack,
            Sense::Eq => (lhs - c.rhs).abs() <= slack,
        };
        if !ok {
            return Err(Error::Decode(format!(
                "constraint `{}` violated: {lhs} {} {}",
                c.name,
                c.sense.symbol(),
                c.rhs
            )));
        }
    }
    Ok(())
}

fn to_decimal(v: f64) -> Value {
    Value::from_f64(v.max(0.0)).unwrap_or(Value::ZERO).round_dp(9)
}

/// Reads frontiers, weights and threshold off a feasible point.
///
/// A frontier value within `epsilon / 2` of a reference value (in scaled
/// units) snaps to that value, so the reference alternatives pass or fail
/// it exactly as the program's binaries say. Weights and threshold are
/// rounded to 9 decimals. The resulting model must reproduce the learning
/// set, otherwise a faithfulness error is returned.
pub fn decode_mrsort(m: &MipModel, values: &HashMap<String, f64>) -> Result<MrSortModel> {
    check_point(m, values)?;
    let data = m.data();
    let n = data.criteria().len();
    let p = data.classes();
    let get = |name: &str| values[name];
    let snap = m.params.epsilon / 2.0;

    let refs: Vec<Vec<(f64, Value)>> = (0..n)
        .map(|i| {
            data.distinct_values(i)
                .into_iter()
                .map(|v| (m.scaling().normalize(i, v), v))
                .collect()
        })
        .collect();
    let mut frontiers: Vec<Vec<Threshold>> = Vec::with_capacity(p - 1);
    for h in 1..p {
        let row = (0..n)
            .map(|i| {
                let t = get(&format!("b_{h}_{}", i + 1));
                if let Some(&(_, v)) = refs[i].iter().find(|(r, _)| (r - t).abs() <= snap) {
                    return Threshold::At(v);
                }
                match m.scaling().denormalize(i, t) {
                    Some(v) => Threshold::At(v),
                    // Degenerate scale: every alternative sits at 0.5.
                    None if t <= 0.5 + snap => Threshold::At(refs[i].first().map_or(Value::ZERO, |r| r.1)),
                    None => Threshold::AboveAll,
                }
            })
            .collect();
        frontiers.push(row);
    }
    // Nesting holds up to solver tolerance; restore it exactly.
    for h in 1..frontiers.len() {
        let (done, rest) = frontiers.split_at_mut(h);
        for (t, below) in rest[0].iter_mut().zip(&done[h - 1]) {
            if *t < *below {
                *t = *below;
            }
        }
    }

    let weights: Vec<Value> = (1..=n).map(|i| to_decimal(get(&format!("w_{i}")))).collect();
    let lambda = to_decimal(get("lambda"));
    let model = MrSortModel::new(
        data.criteria().clone(),
        p,
        frontiers.into_iter().map(Frontier::new).collect(),
        weights,
        lambda,
    )?;
    let violations = model.to_uncs().extends(data)?;
    if !violations.is_empty() {
        let shown: Vec<String> = violations.iter().take(3).map(|v| v.to_string()).collect();
        return Err(Error::Faithfulness(format!(
            "decoded model misclassifies {} reference alternative(s): {}",
            violations.len(),
            shown.join("; ")
        )));
    }
    Ok(model)
}

/// The point a known MR-Sort model induces on the program: its frontiers,
/// the binaries they imply, and weights scaled to satisfy the variant's
/// normalization (sum one) or margin (at least one vote) rows.
pub fn substitute(m: &MipModel, truth: &MrSortModel) -> Result<HashMap<String, f64>> {
    let data = m.data();
    let n = data.criteria().len();
    if truth.criteria() != data.criteria() || truth.classes() != data.classes() {
        return Err(Error::Input("model and program disagree on criteria or classes".into()));
    }
    let b: Vec<Vec<f64>> = truth
        .frontiers()
        .iter()
        .map(|f| {
            f.thresholds()
                .iter()
                .enumerate()
                .map(|(i, t)| match t {
                    Threshold::At(v) => m.scaling().normalize(i, *v).clamp(0.0, m.params.big_m),
                    Threshold::AboveAll => 1.0 + m.params.epsilon,
                })
                .collect()
        })
        .collect();
    let raw_w: Vec<f64> = truth.weights().iter().map(|w| w.to_f64().unwrap_or(0.0)).collect();
    let raw_l = truth.lambda().to_f64().unwrap_or(0.0);

    // Vote sums at every relevant frontier, in unscaled weights.
    let mut margins = Vec::new();
    let mut plan = Vec::new();
    for (jx, alt) in data.alternatives().iter().enumerate() {
        for k in [alt.class - 1, alt.class] {
            if k < 1 || k > data.classes() - 1 {
                continue;
            }
            let frontier = &truth.frontiers()[k - 1];
            let pass: Vec<bool> = (0..n).map(|i| frontier.thresholds()[i].passed_by(alt.profile.values()[i])).collect();
            let sum: f64 = (0..n).filter(|&i| pass[i]).map(|i| raw_w[i]).sum();
            let slack = if k == alt.class - 1 { sum - raw_l } else { raw_l - sum };
            margins.push(slack);
            plan.push((jx + 1, k, pass, k == alt.class - 1));
        }
    }
    let scale = match m.variant {
        Variant::Optimize => {
            let total: f64 = raw_w.iter().sum();
            if total <= 0.0 {
                return Err(Error::Model("weights sum to zero".into()));
            }
            1.0 / total
        }
        Variant::Decide => {
            let least = margins.iter().copied().fold(f64::INFINITY, f64::min);
            if least <= 0.0 {
                return Err(Error::Model("a reference alternative sits exactly on the majority threshold".into()));
            }
            if least.is_infinite() {
                1.0
            } else {
                1.0 / least
            }
        }
    };

    let mut out = HashMap::new();
    for (h, row) in b.iter().enumerate() {
        for (i, v) in row.iter().enumerate() {
            out.insert(format!("b_{}_{}", h + 1, i + 1), *v);
        }
    }
    for (i, w) in raw_w.iter().enumerate() {
        out.insert(format!("w_{}", i + 1), w * scale);
    }
    out.insert("lambda".into(), raw_l * scale);
    let mut alpha = f64::INFINITY;
    for ((j, k, pass, lower), margin) in plan.into_iter().zip(&margins) {
        for i in 1..=n {
            let d = pass[i - 1];
            out.insert(format!("d_a{j}_{i}_{k}"), if d { 1.0 } else { 0.0 });
            out.insert(format!("c_a{j}_{i}_{k}"), if d { raw_w[i - 1] * scale } else { 0.0 });
        }
        let slack = margin * scale;
        out.insert(format!("{}_a{j}", if lower { "x" } else { "y" }), slack);
        alpha = alpha.min(slack);
    }
    if m.variant == Variant::Optimize {
        out.insert("alpha".into(), if alpha.is_finite() { alpha.clamp(0.0, 1.0) } else { 0.0 });
    }
    Ok(out)
}
