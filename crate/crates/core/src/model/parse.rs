//! Line-oriented model file parser.
//!
//! Grammar (one directive per line, `#` starts a comment):
//!
//! ```text
//! base nonholonomic R=<m> W=<m>        # or: base omnidirectional
//! fixed <tx> <ty> <tz> <rx> <ry> <rz>  # metres / radians, T = Trans * Rz(rz)Ry(ry)Rx(rx)
//! joint revolute|prismatic axis=<x|y|z> qmin=<v> qmax=<v> qdmax=<v>
//! tool  <tx> <ty> <tz> <rx> <ry> <rz>
//! ready <q1> <q2> ... <qn>             # optional default arm configuration
//! ```

use nalgebra::{DVector, Vector3};

use super::{BaseKind, Element, JointDesc, JointKind, KinematicModel, ModelError};
use crate::spatial::Pose3;

fn parse_err(line: usize, msg: impl Into<String>) -> ModelError {
    ModelError::Parse {
        line,
        msg: msg.into(),
    }
}

fn parse_f64(line: usize, tok: &str, what: &str) -> Result<f64, ModelError> {
    tok.parse::<f64>()
        .map_err(|_| parse_err(line, format!("invalid {what}: `{tok}`")))
}

fn parse_kv(line: usize, tok: &str, key: &str) -> Result<f64, ModelError> {
    let Some(rest) = tok.strip_prefix(key).and_then(|r| r.strip_prefix('=')) else {
        return Err(parse_err(line, format!("expected `{key}=<value>`, got `{tok}`")));
    };
    parse_f64(line, rest, key)
}

fn parse_transform(line: usize, toks: &[&str]) -> Result<Pose3, ModelError> {
    if toks.len() != 6 {
        return Err(parse_err(
            line,
            format!("expected 6 values (tx ty tz rx ry rz), got {}", toks.len()),
        ));
    }
    let mut v = [0.0; 6];
    for (i, t) in toks.iter().enumerate() {
        v[i] = parse_f64(line, t, "transform value")?;
    }
    let rot = Pose3::rot_z(v[5]) * Pose3::rot_y(v[4]) * Pose3::rot_x(v[3]);
    Ok(Pose3::from_parts(
        rot.rotation,
        Vector3::new(v[0], v[1], v[2]),
    ))
}

/// Parse a model description into a validated [`KinematicModel`].
pub fn parse_model(text: &str) -> Result<KinematicModel, ModelError> {
    let mut base_kind: Option<BaseKind> = None;
    let mut elements: Vec<Element> = Vec::new();
    let mut tool = Pose3::identity();
    let mut saw_tool = false;
    let mut ready: Option<DVector<f64>> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "base" => {
                if base_kind.is_some() {
                    return Err(parse_err(line_no, "duplicate base directive"));
                }
                match toks.get(1) {
                    Some(&"nonholonomic") => {
                        if toks.len() != 4 {
                            return Err(parse_err(
                                line_no,
                                "expected `base nonholonomic R=<m> W=<m>`",
                            ));
                        }
                        let r = parse_kv(line_no, toks[2], "R")?;
                        let w = parse_kv(line_no, toks[3], "W")?;
                        base_kind = Some(BaseKind::Nonholonomic {
                            wheel_radius: r,
                            wheel_separation: w,
                        });
                    }
                    Some(&"omnidirectional") => {
                        if toks.len() != 2 {
                            return Err(parse_err(line_no, "expected `base omnidirectional`"));
                        }
                        base_kind = Some(BaseKind::Omnidirectional);
                    }
                    _ => {
                        return Err(parse_err(
                            line_no,
                            "base kind must be `nonholonomic` or `omnidirectional`",
                        ))
                    }
                }
            }
            "fixed" => {
                elements.push(Element::Fixed(parse_transform(line_no, &toks[1..])?));
            }
            "joint" => {
                if toks.len() != 6 {
                    return Err(parse_err(
                        line_no,
                        "expected `joint revolute|prismatic axis=<x|y|z> qmin=<v> qmax=<v> qdmax=<v>`",
                    ));
                }
                let kind = match toks[1] {
                    "revolute" => JointKind::Revolute,
                    "prismatic" => JointKind::Prismatic,
                    other => {
                        return Err(parse_err(
                            line_no,
                            format!("joint kind must be revolute or prismatic, got `{other}`"),
                        ))
                    }
                };
                let axis = match toks[2] {
                    "axis=x" => Vector3::x(),
                    "axis=y" => Vector3::y(),
                    "axis=z" => Vector3::z(),
                    other => {
                        return Err(parse_err(
                            line_no,
                            format!("axis must be one of axis=x|y|z, got `{other}`"),
                        ))
                    }
                };
                let q_min = parse_kv(line_no, toks[3], "qmin")?;
                let q_max = parse_kv(line_no, toks[4], "qmax")?;
                let qd_max = parse_kv(line_no, toks[5], "qdmax")?;
                elements.push(Element::Joint(JointDesc {
                    kind,
                    axis,
                    q_min,
                    q_max,
                    qd_max,
                }));
            }
            "tool" => {
                if saw_tool {
                    return Err(parse_err(line_no, "duplicate tool directive"));
                }
                tool = parse_transform(line_no, &toks[1..])?;
                saw_tool = true;
            }
            "ready" => {
                if ready.is_some() {
                    return Err(parse_err(line_no, "duplicate ready directive"));
                }
                let mut vals = Vec::with_capacity(toks.len() - 1);
                for t in &toks[1..] {
                    vals.push(parse_f64(line_no, t, "ready value")?);
                }
                ready = Some(DVector::from_vec(vals));
            }
            other => {
                return Err(parse_err(line_no, format!("unknown directive `{other}`")));
            }
        }
    }

    let base_kind =
        base_kind.ok_or_else(|| ModelError::Validation("missing base directive".into()))?;
    KinematicModel::from_parts(base_kind, elements, tool, ready)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_revolute_joint() {
        let m = parse_model("base omnidirectional\njoint revolute axis=z qmin=-1 qmax=1 qdmax=2\n")
            .unwrap();
        assert_eq!(m.arm_joint_count(), 1);
        assert_eq!(m.joint_count(), 4);
    }

    #[test]
    fn rejects_inverted_limits() {
        let err = parse_model("base omnidirectional\njoint revolute axis=z qmin=1 qmax=-1 qdmax=2")
            .unwrap_err();
        assert!(matches!(err, ModelError::Validation(_)), "{err}");
    }

    #[test]
    fn parse_error_carries_line_number() {
        let err = parse_model("base omnidirectional\n\nflute revolute").unwrap_err();
        match err {
            ModelError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other}"),
        }
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let m = parse_model(
            "# model\nbase nonholonomic R=0.1 W=0.4\n\njoint revolute axis=z qmin=-1 qmax=1 qdmax=2 # spin\n",
        )
        .unwrap();
        assert_eq!(m.joint_count(), 3);
    }
}
