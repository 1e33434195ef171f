//! Problem files: JSON descriptions of dynamics, sets, objectives, and
//! options, parsed into a validated `ProblemSpec`.

use crate::poly::{parse_polynomial, Polynomial};
use crate::program::{ObjectiveSpec, ProblemSpec, ReportTransform, ShapeSpec};
use crate::sets::SemialgebraicSet;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
}

fn field_err<T: std::fmt::Display>(field: &str) -> impl Fn(T) -> ProblemError + '_ {
    move |e| ProblemError::Field {
        field: field.to_string(),
        message: e.to_string(),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SetSchema {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ineq: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub eq: Vec<String>,
    /// Box shorthand: generates per-coordinate constraints and records bounds.
    #[serde(default, rename = "box", skip_serializing_if = "Option::is_none")]
    pub box_bounds: Option<Vec<[f64; 2]>>,
    /// Interval bounds for scaling and sampling only (no constraints added).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Vec<[f64; 2]>>,
    /// Redundant ball radius appended as `R^2 - sum x_i^2 >= 0`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ball: Option<f64>,
}

impl SetSchema {
    fn build(&self, field: &str, vars: &[String]) -> Result<SemialgebraicSet, ProblemError> {
        let parse_list = |list: &[String], sub: &str| -> Result<Vec<Polynomial>, ProblemError> {
            list.iter()
                .map(|s| {
                    parse_polynomial(s, vars).map_err(field_err(&format!("{}.{}", field, sub)))
                })
                .collect()
        };
        let ineq = parse_list(&self.ineq, "ineq")?;
        let eq = parse_list(&self.eq, "eq")?;
        let mut set = SemialgebraicSet::new(vars.to_vec(), ineq, eq)
            .map_err(field_err(field))?;
        if let Some(b) = &self.box_bounds {
            if b.len() != vars.len() {
                return Err(ProblemError::Field {
                    field: format!("{}.box", field),
                    message: format!("expected {} intervals, got {}", vars.len(), b.len()),
                });
            }
            set = set.with_box(&b.iter().map(|p| (p[0], p[1])).collect::<Vec<_>>());
        }
        if let Some(b) = &self.bounds {
            if b.len() != vars.len() {
                return Err(ProblemError::Field {
                    field: format!("{}.bounds", field),
                    message: format!("expected {} intervals, got {}", vars.len(), b.len()),
                });
            }
            set.set_bounds(b.iter().map(|p| (p[0], p[1])).collect());
        }
        if let Some(r) = self.ball {
            set = set.add_ball(r).map_err(field_err(&format!("{}.ball", field)))?;
        }
        Ok(set)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SetsSection {
    pub initial: SetSchema,
    pub state: SetSchema,
    #[serde(rename = "unsafe")]
    pub unsafe_set: SetSchema,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ObjectiveSchema {
    /// one of: l2sq, l4, l1, linf, l3, poly
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, default)]
pub struct OptionsSchema {
    pub degree: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degrees: Option<[u32; 2]>,
    pub sparse: String,
    pub samples: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver_tol: Option<f64>,
}

impl Default for OptionsSchema {
    fn default() -> Self {
        OptionsSchema {
            degree: 4,
            degrees: None,
            sparse: "auto".into(),
            samples: 500,
            seed: 1,
            solver_tol: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct UncertaintySchema {
    pub vars: Vec<String>,
    #[serde(rename = "box")]
    pub box_bounds: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ShapeSchema {
    pub body_vars: Vec<String>,
    pub body: SetSchema,
    pub orientation_vars: Vec<String>,
    pub orientation: SetSchema,
    pub orientation_init: SetSchema,
    pub dynamics: Vec<String>,
    pub transform: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub name: String,
    pub vars: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub dynamics: Vec<String>,
    pub horizon: f64,
    pub sets: SetsSection,
    pub objective: ObjectiveSchema,
    #[serde(default)]
    pub options: OptionsSchema,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uncertainty: Option<UncertaintySchema>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shape: Option<ShapeSchema>,
}

impl ProblemFile {
    pub fn from_json(text: &str) -> Result<ProblemFile, ProblemError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_problem_spec(&self) -> Result<ProblemSpec, ProblemError> {
        let vars = self.vars.clone();
        let x0 = self.sets.initial.build("sets.initial", &vars)?;
        let x = self.sets.state.build("sets.state", &vars)?;
        let xu = self.sets.unsafe_set.build("sets.unsafe", &vars)?;

        let shape = match &self.shape {
            None => None,
            Some(sch) => {
                let body = sch.body.build("shape.body", &sch.body_vars)?;
                let orientation = sch
                    .orientation
                    .build("shape.orientation", &sch.orientation_vars)?;
                let orientation_init = sch
                    .orientation_init
                    .build("shape.orientation_init", &sch.orientation_vars)?;
                let tw: Vec<String> = std::iter::once("t".to_string())
                    .chain(sch.orientation_vars.iter().cloned())
                    .collect();
                let dynamics = sch
                    .dynamics
                    .iter()
                    .map(|s| parse_polynomial(s, &tw).map_err(field_err("shape.dynamics")))
                    .collect::<Result<Vec<_>, _>>()?;
                let sw: Vec<String> = sch
                    .body_vars
                    .iter()
                    .chain(sch.orientation_vars.iter())
                    .cloned()
                    .collect();
                let transform = sch
                    .transform
                    .iter()
                    .map(|s| parse_polynomial(s, &sw).map_err(field_err("shape.transform")))
                    .collect::<Result<Vec<_>, _>>()?;
                Some(ShapeSpec {
                    body_vars: sch.body_vars.clone(),
                    body,
                    orient_vars: sch.orientation_vars.clone(),
                    orientation,
                    orientation_init,
                    transform,
                    dynamics,
                })
            }
        };

        let uncertainty = match &self.uncertainty {
            None => None,
            Some(u) => {
                let set = SemialgebraicSet::free(u.vars.clone())
                    .with_box(&u.box_bounds.iter().map(|p| (p[0], p[1])).collect::<Vec<_>>());
                Some(set)
            }
        };

        let dyn_block: Vec<String> = std::iter::once("t".to_string())
            .chain(vars.iter().cloned())
            .chain(
                self.uncertainty
                    .iter()
                    .flat_map(|u| u.vars.iter().cloned()),
            )
            .collect();
        let dynamics = self
            .dynamics
            .iter()
            .map(|s| parse_polynomial(s, &dyn_block).map_err(field_err("dynamics")))
            .collect::<Result<Vec<_>, _>>()?;

        // objective over the joint block [x.., y1..yn]
        let n = vars.len();
        let y_vars: Vec<String> = (0..n)
            .map(|i| {
                let cand = format!("y{}", i + 1);
                if vars.contains(&cand) {
                    format!("{}_u", vars[i])
                } else {
                    cand
                }
            })
            .collect();
        let xy: Vec<String> = vars.iter().cloned().chain(y_vars).collect();
        let objective = match self.objective.kind.as_str() {
            "l2sq" => ObjectiveSpec::l2_squared(&xy),
            "l4" => ObjectiveSpec::l4(&xy),
            "l1" => ObjectiveSpec::L1,
            "linf" => ObjectiveSpec::Linf,
            "l3" => ObjectiveSpec::L3,
            "poly" => {
                let cost_str = self.objective.cost.as_ref().ok_or(ProblemError::Field {
                    field: "objective.cost".into(),
                    message: "polynomial objective needs a cost string".into(),
                })?;
                let cost =
                    parse_polynomial(cost_str, &xy).map_err(field_err("objective.cost"))?;
                ObjectiveSpec::Polynomial {
                    cost,
                    transform: ReportTransform::Identity,
                }
            }
            other => {
                return Err(ProblemError::Field {
                    field: "objective.kind".into(),
                    message: format!(
                        "unknown kind `{}` (expected l2sq, l4, l1, linf, l3, poly)",
                        other
                    ),
                })
            }
        };

        let spec = ProblemSpec {
            name: self.name.clone(),
            state_vars: vars,
            dynamics,
            horizon: self.horizon,
            x0,
            x,
            xu,
            objective,
            uncertainty,
            shape,
        };
        spec.validate().map_err(|e| ProblemError::Field {
            field: "problem".into(),
            message: e.to_string(),
        })?;
        Ok(spec)
    }

    /// Canonical re-emission: sets are written as explicit constraint strings
    /// with bounds metadata, so a round trip reproduces the same spec.
    pub fn canonicalize(&self) -> Result<ProblemFile, ProblemError> {
        let spec = self.to_problem_spec()?;
        let set_schema = |s: &SemialgebraicSet| SetSchema {
            ineq: s.inequalities().iter().map(|p| p.to_string()).collect(),
            eq: s.equalities().iter().map(|p| p.to_string()).collect(),
            box_bounds: None,
            bounds: s.bounds().map(|b| b.iter().map(|&(lo, hi)| [lo, hi]).collect()),
            ball: None,
        };
        Ok(ProblemFile {
            name: spec.name.clone(),
            vars: spec.state_vars.clone(),
            dynamics: spec.dynamics.iter().map(|p| p.to_string()).collect(),
            horizon: spec.horizon,
            sets: SetsSection {
                initial: set_schema(&spec.x0),
                state: set_schema(&spec.x),
                unsafe_set: set_schema(&spec.xu),
            },
            objective: self.objective.clone(),
            options: self.options.clone(),
            uncertainty: self.uncertainty.clone(),
            shape: self.shape.as_ref().map(|sch| {
                let shape = spec.shape.as_ref().unwrap();
                ShapeSchema {
                    body_vars: shape.body_vars.clone(),
                    body: set_schema(&shape.body),
                    orientation_vars: shape.orient_vars.clone(),
                    orientation: set_schema(&shape.orientation),
                    orientation_init: set_schema(&shape.orientation_init),
                    dynamics: shape.dynamics.iter().map(|p| p.to_string()).collect(),
                    transform: sch.transform.clone(),
                }
            }),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FLOW: &str = r#"{
        "name": "flow",
        "vars": ["x1", "x2"],
        "dynamics": ["x2", "-x1 - x2 + x1^3/3"],
        "horizon": 5.0,
        "sets": {
            "initial": {"ineq": ["0.4^2 - (x1-1.5)^2 - x2^2"], "bounds": [[1.1, 1.9], [-0.4, 0.4]]},
            "state": {"box": [[-3, 3], [-3, 3]]},
            "unsafe": {
                "ineq": ["0.5^2 - x1^2 - (x2+0.7)^2", "-0.7071067811865476*(x1 + x2 + 0.7)"],
                "bounds": [[-0.5, 0.5], [-1.2, -0.2]]
            }
        },
        "objective": {"kind": "l2sq"},
        "options": {"degree": 4}
    }"#;

    #[test]
    fn parse_and_validate() {
        let pf = ProblemFile::from_json(FLOW).unwrap();
        let spec = pf.to_problem_spec().unwrap();
        assert_eq!(spec.dim(), 2);
        assert_eq!(spec.horizon, 5.0);
        assert_eq!(spec.x.inequalities().len(), 2);
        assert!(spec.x.bounds().is_some());
    }

    #[test]
    fn unknown_keys_rejected() {
        let bad = FLOW.replace("\"horizon\": 5.0,", "\"horizon\": 5.0, \"mystery\": 1,");
        assert!(ProblemFile::from_json(&bad).is_err());
    }

    #[test]
    fn malformed_dynamics_diagnosed() {
        let bad = FLOW.replace("-x1 - x2 + x1^3/3", "-x1 - zz");
        let pf = ProblemFile::from_json(&bad).unwrap();
        let err = pf.to_problem_spec().unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("dynamics"), "{}", msg);
        assert!(msg.contains("zz"), "{}", msg);
    }

    #[test]
    fn canonical_roundtrip_is_fixed_point() {
        let pf = ProblemFile::from_json(FLOW).unwrap();
        let canon = pf.canonicalize().unwrap();
        let text = serde_json::to_string_pretty(&canon).unwrap();
        let reparsed = ProblemFile::from_json(&text).unwrap();
        let again = reparsed.canonicalize().unwrap();
        assert_eq!(canon, again);
        // specs agree exactly
        let s1 = pf.to_problem_spec().unwrap();
        let s2 = reparsed.to_problem_spec().unwrap();
        assert_eq!(s1.x0, s2.x0);
        assert_eq!(s1.x, s2.x);
        assert_eq!(s1.xu, s2.xu);
        assert_eq!(s1.dynamics, s2.dynamics);
    }
}
