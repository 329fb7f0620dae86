//! Validates real `check --format json` output against the published schema.
//!
//! The validator below implements exactly the draft-07 subset the schema
//! uses (type, enum, properties/required/additionalProperties, items,
//! minItems/maxItems, oneOf, $ref into #/definitions), so the schema file
//! stays honest: a report field the schema forgot, or a schema the reports
//! outgrew, fails this suite.

use std::process::Command;

use serde_json::Value;

fn schema() -> Value {
    let path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../schema/report.schema.json"
    );
    serde_json::from_str(&std::fs::read_to_string(path).expect("schema file exists"))
        .expect("schema file is valid JSON")
}

fn check_json(builtin: &str) -> Value {
    let output = Command::new(env!("CARGO_BIN_EXE_bellks"))
        .args(["check", builtin, "--format", "json"])
        .output()
        .expect("binary runs");
    assert!(output.status.success(), "check {builtin} failed");
    serde_json::from_slice(&output.stdout).expect("stdout is valid JSON")
}

/// Resolves `#/definitions/...` references against the root schema.
fn resolve<'a>(root: &'a Value, node: &'a Value) -> &'a Value {
    match node.get("$ref").and_then(Value::as_str) {
        Some(reference) => {
            let path = reference
                .strip_prefix("#/")
                .expect("only local references are used");
            let mut cursor = root;
            for key in path.split('/') {
                cursor = cursor.get(key).expect("reference target exists");
            }
            cursor
        }
        None => node,
    }
}

fn type_matches(name: &str, value: &Value) -> bool {
    match name {
        "object" => value.is_object(),
        "array" => value.is_array(),
        "string" => value.is_string(),
        "boolean" => value.is_boolean(),
        "null" => value.is_null(),
        "integer" => value.is_i64() || value.is_u64(),
        "number" => value.is_number(),
        other => panic!("unsupported type keyword `{other}`"),
    }
}

/// Returns the first violation found, as a path + message.
fn validate(root: &Value, node: &Value, value: &Value, path: &str) -> Result<(), String> {
    let node = resolve(root, node);

    if let Some(one_of) = node.get("oneOf").and_then(Value::as_array) {
        let hits = one_of
            .iter()
            .filter(|candidate| validate(root, candidate, value, path).is_ok())
            .count();
        if hits != 1 {
            return Err(format!("{path}: matched {hits} of oneOf, want exactly 1"));
        }
        return Ok(());
    }

    if let Some(allowed) = node.get("enum").and_then(Value::as_array) {
        if !allowed.contains(value) {
            return Err(format!("{path}: {value} not in enum {allowed:?}"));
        }
        return Ok(());
    }

    match node.get("type") {
        Some(Value::String(name)) => {
            if !type_matches(name, value) {
                return Err(format!("{path}: expected {name}, got {value}"));
            }
        }
        Some(Value::Array(names)) => {
            if !names
                .iter()
                .any(|n| type_matches(n.as_str().unwrap(), value))
            {
                return Err(format!("{path}: expected one of {names:?}, got {value}"));
            }
        }
        _ => {}
    }

    if let Some(object) = value.as_object() {
        let properties = node.get("properties").and_then(Value::as_object);
        if let Some(required) = node.get("required").and_then(Value::as_array) {
            for key in required {
                let key = key.as_str().unwrap();
                if !object.contains_key(key) {
                    return Err(format!("{path}: missing required key `{key}`"));
                }
            }
        }
        for (key, item) in object {
            let child_path = format!("{path}/{key}");
            match properties.and_then(|p| p.get(key)) {
                Some(child_schema) => validate(root, child_schema, item, &child_path)?,
                None => match node.get("additionalProperties") {
                    Some(Value::Bool(false)) => {
                        return Err(format!("{path}: unexpected key `{key}`"))
                    }
                    Some(extra_schema) if extra_schema.is_object() => {
                        validate(root, extra_schema, item, &child_path)?
                    }
                    _ => {}
                },
            }
        }
    }

    if let Some(array) = value.as_array() {
        if let Some(min) = node.get("minItems").and_then(Value::as_u64) {
            if (array.len() as u64) < min {
                return Err(format!("{path}: {} items, need at least {min}", array.len()));
            }
        }
        if let Some(max) = node.get("maxItems").and_then(Value::as_u64) {
            if (array.len() as u64) > max {
                return Err(format!("{path}: {} items, allow at most {max}", array.len()));
            }
        }
        if let Some(items) = node.get("items") {
            for (i, item) in array.iter().enumerate() {
                validate(root, items, item, &format!("{path}/{i}"))?;
            }
        }
    }

    Ok(())
}

fn assert_valid(doc: &Value) {
    let root = schema();
    if let Err(violation) = validate(&root, &root, doc, "") {
        panic!("schema violation: {violation}");
    }
}

#[test]
fn builtin_reports_validate_against_the_published_schema() {
    for builtin in ["hardy", "mermin", "chsh"] {
        assert_valid(&check_json(builtin));
    }
}

#[test]
fn file_input_reports_validate_too() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios/hardy.ksl");
    let output = Command::new(env!("CARGO_BIN_EXE_bellks"))
        .args(["check", path, "--format", "json"])
        .output()
        .expect("binary runs");
    assert!(output.status.success());
    let doc: Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(doc["input"]["kind"], "file");
    assert!(doc["input"]["sha256"].is_string());
    assert_valid(&doc);
}

#[test]
fn the_validator_itself_rejects_broken_documents() {
    let root = schema();
    let mut doc = check_json("hardy");

    let mut missing = doc.clone();
    missing.as_object_mut().unwrap().remove("report");
    assert!(validate(&root, &root, &missing, "").is_err());

    let mut bad_kind = doc.clone();
    bad_kind["input"]["kind"] = Value::String("network".to_string());
    assert!(validate(&root, &root, &bad_kind, "").is_err());

    let mut extra = doc.clone();
    extra["report"]["surprise"] = Value::Bool(true);
    assert!(validate(&root, &root, &extra, "").is_err());

    doc["report"]["witnesses"]["count"] = Value::String("many".to_string());
    assert!(validate(&root, &root, &doc, "").is_err());
}
