use std::collections::BTreeMap;

use serde_json::{json, Map, Value};

use crate::model::{Assignment, Frame, Model, Structure, Template};
use crate::proof::{Node, Rule};
use crate::syntax::{Context, Label};

use super::formula::{parse_formula, parse_label, render_formula};
use super::ParseError;

/// A model file: the model, an optional reference neighbourhood and an assignment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelDoc {
    pub model: Model,
    pub reference_neighbourhood: Option<Vec<String>>,
    pub assignment: Assignment,
}

impl ModelDoc {
    pub fn structure(&self) -> Structure {
        match &self.reference_neighbourhood {
            Some(n) => Structure::Template(Template { model: self.model.clone(), neighbourhood: n.clone() }),
            None => Structure::Model(self.model.clone()),
        }
    }
}

fn schema(path: &str, message: impl Into<String>) -> ParseError {
    ParseError::Schema { path: path.to_string(), message: message.into() }
}

fn kind(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "a boolean",
        Value::Number(_) => "a number",
        Value::String(_) => "a string",
        Value::Array(_) => "an array",
        Value::Object(_) => "an object",
    }
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>, ParseError> {
    v.as_object().ok_or_else(|| schema(path, format!("expected an object, found {}", kind(v))))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>, ParseError> {
    v.as_array().ok_or_else(|| schema(path, format!("expected an array, found {}", kind(v))))
}

fn as_str<'a>(v: &'a Value, path: &str) -> Result<&'a str, ParseError> {
    v.as_str().ok_or_else(|| schema(path, format!("expected a string, found {}", kind(v))))
}

fn strings(v: &Value, path: &str) -> Result<Vec<String>, ParseError> {
    as_array(v, path)?
        .iter()
        .enumerate()
        .map(|(i, x)| as_str(x, &format!("{path}[{i}]")).map(str::to_string))
        .collect()
}

fn check_keys(obj: &Map<String, Value>, path: &str, allowed: &[&str]) -> Result<(), ParseError> {
    for k in obj.keys() {
        if !allowed.contains(&k.as_str()) {
            return Err(schema(&format!("{path}.{k}"), "unknown field"));
        }
    }
    Ok(())
}

fn required<'a>(obj: &'a Map<String, Value>, path: &str, key: &str) -> Result<&'a Value, ParseError> {
    obj.get(key).ok_or_else(|| schema(path, format!("missing field `{key}`")))
}

fn load(text: &str) -> Result<Value, ParseError> {
    serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))
}

pub fn parse_model(text: &str) -> Result<ModelDoc, ParseError> {
    model_from_value(&load(text)?)
}

pub fn model_from_value(v: &Value) -> Result<ModelDoc, ParseError> {
    let root = as_object(v, "$")?;
    check_keys(root, "$", &["worlds", "valuation", "nesting", "reference", "reference_neighbourhood", "assignment"])?;
    let worlds = strings(required(root, "$", "worlds")?, "$.worlds")?;
    let mut nesting = BTreeMap::new();
    if let Some(n) = root.get("nesting") {
        for (w, chain) in as_object(n, "$.nesting")? {
            let p = format!("$.nesting.{w}");
            let chain = as_array(chain, &p)?
                .iter()
                .enumerate()
                .map(|(i, x)| strings(x, &format!("{p}[{i}]")))
                .collect::<Result<Vec<_>, _>>()?;
            nesting.insert(w.clone(), chain);
        }
    }
    let mut valuation = BTreeMap::new();
    if let Some(val) = root.get("valuation") {
        for (a, ws) in as_object(val, "$.valuation")? {
            valuation.insert(a.clone(), strings(ws, &format!("$.valuation.{a}"))?);
        }
    }
    let reference = as_str(required(root, "$", "reference")?, "$.reference")?.to_string();
    let reference_neighbourhood = match root.get("reference_neighbourhood") {
        Some(n) => Some(strings(n, "$.reference_neighbourhood")?),
        None => None,
    };
    let mut assignment = Assignment::default();
    if let Some(a) = root.get("assignment") {
        for (var, val) in as_object(a, "$.assignment")? {
            let p = format!("$.assignment.{var}");
            match parse_label(var) {
                Ok(Label::NeighVar(_)) => {
                    assignment.neigh.insert(var.clone(), strings(val, &p)?);
                }
                Ok(Label::WorldVar(_)) => {
                    assignment.world.insert(var.clone(), as_str(val, &p)?.to_string());
                }
                _ => return Err(schema(&p, "not a variable name")),
            }
        }
    }
    Ok(ModelDoc {
        model: Model { frame: Frame { worlds, nesting, valuation }, reference },
        reference_neighbourhood,
        assignment,
    })
}

pub fn model_to_json(doc: &ModelDoc) -> Value {
    let mut out = json!({
        "worlds": doc.model.frame.worlds,
        "nesting": doc.model.frame.nesting,
        "valuation": doc.model.frame.valuation,
        "reference": doc.model.reference,
    });
    if let Some(n) = &doc.reference_neighbourhood {
        out["reference_neighbourhood"] = json!(n);
    }
    if !doc.assignment.is_empty() {
        let mut a = Map::new();
        for (k, v) in &doc.assignment.neigh {
            a.insert(k.clone(), json!(v));
        }
        for (k, v) in &doc.assignment.world {
            a.insert(k.clone(), json!(v));
        }
        out["assignment"] = Value::Object(a);
    }
    out
}

pub fn parse_proof(text: &str) -> Result<Node, ParseError> {
    proof_from_value(&load(text)?)
}

pub fn proof_from_value(v: &Value) -> Result<Node, ParseError> {
    node_from_value(v, "$")
}

fn in_field(path: String, e: ParseError) -> ParseError {
    ParseError::Field { path, source: Box::new(e) }
}

fn node_from_value(v: &Value, path: &str) -> Result<Node, ParseError> {
    let obj = as_object(v, path)?;
    let rule_v = required(obj, path, "rule")?;
    let ctx_path = format!("{path}.context");
    let context = match obj.get("context") {
        Some(c) => {
            let toks = strings(c, &ctx_path)?;
            Context(
                toks.iter()
                    .enumerate()
                    .map(|(i, t)| parse_label(t).map_err(|e| in_field(format!("{ctx_path}[{i}]"), e)))
                    .collect::<Result<Vec<_>, _>>()?,
            )
        }
        None => return Err(schema(path, "missing field `context`")),
    };
    let f_path = format!("{path}.formula");
    let text = as_str(required(obj, path, "formula")?, &f_path)?;
    let formula = parse_formula(text).map_err(|e| in_field(f_path, e))?;

    if rule_v.as_str() == Some("hyp") {
        check_keys(obj, path, &["rule", "id", "context", "formula"])?;
        let id_path = format!("{path}.id");
        let id = required(obj, path, "id")?
            .as_u64()
            .filter(|&n| n <= u32::MAX as u64)
            .ok_or_else(|| schema(&id_path, "expected a non-negative integer"))?;
        return Ok(Node::Hyp { id: id as u32, context, formula });
    }

    check_keys(obj, path, &["rule", "context", "formula", "premises", "discharge"])?;
    let r_path = format!("{path}.rule");
    let rule = match rule_v {
        Value::Number(n) => n.as_u64().and_then(Rule::from_number),
        Value::String(s) => Rule::from_name(s),
        _ => None,
    }
    .ok_or_else(|| schema(&r_path, format!("unknown rule {rule_v}")))?;
    let premises = match obj.get("premises") {
        Some(p) => as_array(p, &format!("{path}.premises"))?
            .iter()
            .enumerate()
            .map(|(i, x)| node_from_value(x, &format!("{path}.premises[{i}]")))
            .collect::<Result<Vec<_>, _>>()?,
        None => Vec::new(),
    };
    let discharge = match obj.get("discharge") {
        Some(d) => {
            let d_path = format!("{path}.discharge");
            as_array(d, &d_path)?
                .iter()
                .enumerate()
                .map(|(i, x)| {
                    x.as_u64()
                        .filter(|&n| n <= u32::MAX as u64)
                        .map(|n| n as u32)
                        .ok_or_else(|| schema(&format!("{d_path}[{i}]"), "expected a non-negative integer"))
                })
                .collect::<Result<Vec<_>, _>>()?
        }
        None => Vec::new(),
    };
    Ok(Node::Step { rule, context, formula, premises, discharge })
}

fn context_tokens(c: &Context) -> Vec<String> {
    c.labels().iter().map(|l| l.token().to_string()).collect()
}

pub fn proof_to_json(n: &Node) -> Value {
    match n {
        Node::Hyp { id, context, formula } => json!({
            "rule": "hyp",
            "id": id,
            "context": context_tokens(context),
            "formula": render_formula(formula),
        }),
        Node::Step { rule, context, formula, premises, discharge } => {
            let mut m = Map::new();
            m.insert(
                "rule".into(),
                match rule.number() {
                    Some(k) => json!(k),
                    None => json!(rule.alias()),
                },
            );
            m.insert("context".into(), json!(context_tokens(context)));
            m.insert("formula".into(), json!(render_formula(formula)));
            if !discharge.is_empty() {
                m.insert("discharge".into(), json!(discharge));
            }
            m.insert("premises".into(), Value::Array(premises.iter().map(proof_to_json).collect()));
            Value::Object(m)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate;
    use crate::syntax::Formula;

    #[test]
    fn minimal_model() {
        let doc = parse_model(r#"{"worlds":["w0"], "nesting":{"w0":[]}, "valuation":{}, "reference":"w0"}"#).unwrap();
        assert_eq!(doc.model.frame.worlds, vec!["w0".to_string()]);
        assert!(doc.model.frame.nesting["w0"].is_empty());
        assert!(doc.reference_neighbourhood.is_none());
    }

    #[test]
    fn decreasing_chain_parses_but_fails_validation() {
        let doc = parse_model(
            r#"{"worlds":["w0","w1"], "nesting":{"w0":[["w0","w1"],["w0"]]}, "valuation":{}, "reference":"w0"}"#,
        )
        .unwrap();
        assert!(!validate(&doc.model.frame, &doc.model.reference, None).is_valid());
    }

    #[test]
    fn assignment_sorts() {
        let doc = parse_model(
            r#"{"worlds":["a","b"], "reference":"a", "assignment":{"N":["a"], "u":"b"}}"#,
        )
        .unwrap();
        assert_eq!(doc.assignment.neigh["N"], vec!["a".to_string()]);
        assert_eq!(doc.assignment.world["u"], "b");
        let bad = parse_model(r#"{"worlds":["a"], "reference":"a", "assignment":{"N":"a"}}"#).unwrap_err();
        assert_eq!(bad.to_string(), "$.assignment.N: expected an array, found a string");
    }

    #[test]
    fn hyp_leaf() {
        let n = parse_proof(r#"{"rule":"hyp","id":1,"context":["N"],"formula":"p^{+}"}"#).unwrap();
        assert_eq!(
            n,
            Node::Hyp {
                id: 1,
                context: Context(vec![Label::var("N")]),
                formula: Formula::atom("p").label(Label::WorldSome)
            }
        );
    }

    #[test]
    fn json_paths_in_errors() {
        let e = parse_proof(r#"{"rule":3,"context":[],"formula":"p","premises":[{"rule":"hyp","id":1,"context":[],"formula":"p &"}]}"#)
            .unwrap_err();
        assert!(e.to_string().starts_with("$.premises[0].formula: "), "{e}");
        assert!(e.span().is_some());
        let e = parse_proof(r#"{"rule":"nope","context":[],"formula":"p"}"#).unwrap_err();
        assert!(e.to_string().starts_with("$.rule: "), "{e}");
        let e = parse_proof(r#"{"rule":1,"context":[],"formula":"p","extra":0}"#).unwrap_err();
        assert_eq!(e.to_string(), "$.extra: unknown field");
    }

    #[test]
    fn proof_round_trip() {
        let text = r#"{"rule":"imp-intro","context":[],"formula":"p -> p","discharge":[1],
            "premises":[{"rule":10,"context":[],"formula":"p","premises":[{"rule":"hyp","id":1,"context":[],"formula":"p"}]}]}"#;
        let n = parse_proof(text).unwrap();
        assert_eq!(n.rule(), Some(Rule::Num(11)));
        let back = proof_from_value(&proof_to_json(&n)).unwrap();
        assert_eq!(back, n);
    }
}
