use serde_json::{Map, Value};

/// A finished command: the JSON object, an optional tabular CSV form, and whether a
/// verdict reported a violation.
pub struct Report {
    pub json: Map<String, Value>,
    pub table: Option<String>,
    pub violation: bool,
}

impl Report {
    pub fn new(result: Value) -> Self {
        let json = match result {
            Value::Object(m) => m,
            other => Map::from_iter([("result".to_string(), other)]),
        };
        Self { json, table: None, violation: false }
    }

    pub fn with_table(mut self, csv: String) -> Self {
        self.table = Some(csv);
        self
    }

    pub fn insert(&mut self, key: &str, v: Value) {
        self.json.insert(key.to_string(), v);
    }

    /// Flags a violation when the report carries a non-consistent `verdict`.
    pub fn check_verdict(mut self) -> Self {
        self.violation = self.json.get("verdict").is_some_and(|v| v != "consistent");
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.json).expect("report serialises");
        s.push('\n');
        s
    }

    /// The tabular form if the command has one, otherwise every scalar leaf as a
    /// `key,value` row with dotted paths.
    pub fn to_csv(&self) -> String {
        if let Some(t) = &self.table {
            return t.clone();
        }
        let mut rows = Vec::new();
        for (k, v) in &self.json {
            flatten(k, v, &mut rows);
        }
        let mut out = String::from("key,value\n");
        for (k, v) in rows {
            out.push_str(&format!("{},{}\n", quote(&k), quote(&v)));
        }
        out
    }
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => m.iter().for_each(|(k, v)| flatten(&format!("{prefix}.{k}"), v, rows)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, v)| flatten(&format!("{prefix}.{i}"), v, rows)),
        Value::String(s) => rows.push((prefix.to_string(), s.clone())),
        Value::Null => rows.push((prefix.to_string(), String::new())),
        other => rows.push((prefix.to_string(), other.to_string())),
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn csv_flattens_nested_values() {
        let r = Report::new(json!({"a": {"b": [1, 2]}, "c": "x,y", "d": null}));
        assert_eq!(r.to_csv(), "key,value\na.b.0,1\na.b.1,2\nc,\"x,y\"\nd,\n");
    }

    #[test]
    fn verdicts() {
        assert!(!Report::new(json!({"verdict": "consistent"})).check_verdict().violation);
        assert!(Report::new(json!({"verdict": {"violation": "x"}})).check_verdict().violation);
        assert!(!Report::new(json!({"bits": 1.0})).check_verdict().violation);
    }
}
