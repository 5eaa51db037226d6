//! JSON wire formats for instances and solutions.
//!
//! Every document carries `"format": 1`. Parsers accept documents without
//! the field and reject any other version.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::instance::{Assignment, Element, ElementId, Instance, Multiplicity, Solution};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct WireElement {
    id: i64,
    cap: i64,
    #[serde(default)]
    mult: Option<i64>,
    weight: i64,
}

#[derive(Serialize, Deserialize)]
struct WireInstance {
    #[serde(default)]
    format: Option<u32>,
    d: i64,
    elements: Vec<WireElement>,
    family: Vec<Vec<i64>>,
}

#[derive(Serialize, Deserialize)]
struct WireSolution {
    #[serde(default)]
    format: Option<u32>,
    copies: BTreeMap<String, i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    assignment: Option<BTreeMap<String, i64>>,
}

pub(crate) fn check_format(format: Option<u32>) -> Result<()> {
    match format {
        None | Some(FORMAT_VERSION) => Ok(()),
        Some(v) => Err(Error::MalformedInput(format!(
            "unsupported format version {v}"
        ))),
    }
}

pub(crate) fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::MalformedInput(e.to_string()))
}

fn to_id(raw: i64, what: &str) -> Result<ElementId> {
    u32::try_from(raw)
        .map(ElementId)
        .map_err(|_| Error::Validation(format!("{what} {raw} is not a valid element id")))
}

fn nonneg(raw: i64, what: &str, id: i64) -> Result<u64> {
    u64::try_from(raw)
        .map_err(|_| Error::Validation(format!("element {id} has negative {what} {raw}")))
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let wire: WireInstance = from_json(text)?;
    check_format(wire.format)?;
    let d = usize::try_from(wire.d)
        .ok()
        .filter(|&d| d > 0)
        .ok_or_else(|| Error::Validation(format!("d must be positive, got {}", wire.d)))?;
    let mut elements = Vec::with_capacity(wire.elements.len());
    for e in &wire.elements {
        let mult = match e.mult {
            None => Multiplicity::Unbounded,
            Some(m) if m >= 1 && m <= i64::from(u32::MAX) => Multiplicity::Bounded(m as u32),
            Some(m) => {
                return Err(Error::Validation(format!(
                    "element {} has invalid multiplicity {m}",
                    e.id
                )))
            }
        };
        elements.push(Element {
            id: to_id(e.id, "element id")?,
            cap: nonneg(e.cap, "capacity", e.id)?,
            mult,
            weight: nonneg(e.weight, "weight", e.id)?,
        });
    }
    let family = wire
        .family
        .iter()
        .map(|set| set.iter().map(|&x| to_id(x, "set member")).collect())
        .collect::<Result<Vec<Vec<ElementId>>>>()?;
    Instance::new(d, elements, family)
}

pub fn serialize_instance(inst: &Instance) -> String {
    let wire = WireInstance {
        format: Some(FORMAT_VERSION),
        d: inst.d() as i64,
        elements: inst
            .elements()
            .iter()
            .map(|e| WireElement {
                id: i64::from(e.id.0),
                cap: e.cap as i64,
                mult: match e.mult {
                    Multiplicity::Bounded(m) => Some(i64::from(m)),
                    Multiplicity::Unbounded => None,
                },
                weight: e.weight as i64,
            })
            .collect(),
        family: inst
            .family()
            .iter()
            .map(|s| s.iter().map(|x| i64::from(x.0)).collect())
            .collect(),
    };
    let mut out = serde_json::to_string(&wire).expect("instance serializes");
    out.push('\n');
    out
}

/// Parses a solution and its optional assignment. Assignments are checked
/// for shape only; membership and load are the caller's concern.
pub fn parse_solution(text: &str) -> Result<(Solution, Option<Assignment>)> {
    let wire: WireSolution = from_json(text)?;
    check_format(wire.format)?;
    let mut sol = Solution::new();
    for (key, &c) in &wire.copies {
        let x = parse_key(key)?;
        let c = u32::try_from(c)
            .map_err(|_| Error::Validation(format!("element {key} has invalid copy count {c}")))?;
        sol.add(ElementId(x), c);
    }
    let asg = match wire.assignment {
        None => None,
        Some(map) => {
            let mut target = vec![None; map.len()];
            for (key, &x) in &map {
                let idx = parse_key(key)? as usize;
                let slot = target.get_mut(idx).ok_or_else(|| {
                    Error::Validation(format!("assignment indices must be 0..{}", map.len()))
                })?;
                *slot = Some(to_id(x, "assignment target")?);
            }
            let target = target.into_iter().map(Option::unwrap).collect();
            Some(Assignment::new(target))
        }
    };
    Ok((sol, asg))
}

fn parse_key(key: &str) -> Result<u32> {
    key.parse()
        .map_err(|_| Error::MalformedInput(format!("bad numeric key {key:?}")))
}

pub fn solution_json(sol: &Solution, asg: Option<&Assignment>) -> Value {
    let wire = WireSolution {
        format: Some(FORMAT_VERSION),
        copies: sol
            .iter()
            .map(|(x, c)| (x.to_string(), i64::from(c)))
            .collect(),
        assignment: asg.map(|a| {
            a.targets()
                .iter()
                .enumerate()
                .map(|(i, x)| (i.to_string(), i64::from(x.0)))
                .collect()
        }),
    };
    serde_json::to_value(wire).expect("solution serializes")
}

pub fn serialize_solution(sol: &Solution, asg: Option<&Assignment>) -> String {
    let mut out = solution_json(sol, asg).to_string();
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str =
        r#"{"d":1,"elements":[{"id":0,"cap":1,"mult":1,"weight":1}],"family":[[0]]}"#;

    #[test]
    fn minimal_instance() {
        let inst = parse_instance(MINIMAL).unwrap();
        assert_eq!((inst.n(), inst.m()), (1, 1));
    }

    #[test]
    fn duplicate_in_set_rejected() {
        let text = MINIMAL.replace("[[0]]", "[[0,0]]");
        assert_eq!(parse_instance(&text).unwrap_err().kind(), "ValidationError");
    }

    #[test]
    fn negative_capacity_rejected() {
        let text = MINIMAL.replace("\"cap\":1", "\"cap\":-1");
        assert_eq!(parse_instance(&text).unwrap_err().kind(), "ValidationError");
    }

    #[test]
    fn syntax_error_is_malformed() {
        assert!(matches!(
            parse_instance("{\"d\":1,"),
            Err(Error::MalformedInput(_))
        ));
        assert!(matches!(
            parse_instance(r#"{"d":1,"elements":[]}"#),
            Err(Error::MalformedInput(_))
        ));
    }

    #[test]
    fn format_version_checked() {
        let ok = MINIMAL.replacen('{', "{\"format\":1,", 1);
        assert!(parse_instance(&ok).is_ok());
        let bad = MINIMAL.replacen('{', "{\"format\":2,", 1);
        assert!(matches!(
            parse_instance(&bad),
            Err(Error::MalformedInput(_))
        ));
    }

    #[test]
    fn unbounded_is_null_or_absent() {
        let null = MINIMAL.replace("\"mult\":1", "\"mult\":null");
        let absent = MINIMAL.replace("\"mult\":1,", "");
        for text in [null, absent] {
            let inst = parse_instance(&text).unwrap();
            assert_eq!(inst.elements()[0].mult, Multiplicity::Unbounded);
        }
    }

    #[test]
    fn serializer_key_order() {
        let inst = parse_instance(MINIMAL).unwrap();
        assert_eq!(
            serialize_instance(&inst),
            "{\"format\":1,\"d\":1,\"elements\":[{\"id\":0,\"cap\":1,\"mult\":1,\"weight\":1}],\"family\":[[0]]}\n"
        );
    }

    #[test]
    fn solution_round_trip() {
        let sol = Solution::from_copies([(ElementId(3), 2), (ElementId(1), 1)]);
        let asg = Assignment::new(vec![ElementId(3), ElementId(1), ElementId(3)]);
        let text = serialize_solution(&sol, Some(&asg));
        let (back, back_asg) = parse_solution(&text).unwrap();
        assert_eq!(back, sol);
        assert_eq!(back_asg, Some(asg));
        let (_, none) = parse_solution(r#"{"copies":{"0":1}}"#).unwrap();
        assert!(none.is_none());
    }
}
