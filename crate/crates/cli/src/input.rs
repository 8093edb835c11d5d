//! Structured JSON inputs with schema validation reported as JSON pointers.

use std::path::Path;

use chabauty::count::BranchFileEntry;
use chabauty::{Error, Result};
use serde_json::{Map, Value};

pub const SCHEMA_VERSION: u64 = 1;

pub fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::usage(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        Error::parse(format!(
            "{}: line {} column {}: {e}",
            path.display(),
            e.line(),
            e.column()
        ))
    })
}

fn escape(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

/// Collects every schema violation before reporting.
#[derive(Default)]
struct Violations(Vec<String>);

impl Violations {
    fn push(&mut self, ptr: &str, msg: impl AsRef<str>) {
        self.0.push(format!("{}: {}", if ptr.is_empty() { "/" } else { ptr }, msg.as_ref()));
    }

    fn finish<T>(self, value: T) -> Result<T> {
        if self.0.is_empty() {
            Ok(value)
        } else {
            Err(Error::parse(format!("schema violations: {}", self.0.join("; "))))
        }
    }

    fn field<'a>(&mut self, obj: &'a Map<String, Value>, ptr: &str, key: &str, required: bool) -> Option<&'a Value> {
        let v = obj.get(key);
        if v.is_none() && required {
            self.push(&format!("{ptr}/{}", escape(key)), "missing required field");
        }
        v
    }

    fn string(&mut self, v: &Value, ptr: &str) -> Option<String> {
        match v {
            Value::String(s) => Some(s.clone()),
            Value::Number(n) if n.is_i64() => Some(n.to_string()),
            _ => {
                self.push(ptr, "expected a string");
                None
            }
        }
    }

    fn uint(&mut self, v: &Value, ptr: &str) -> Option<u64> {
        let out = v.as_u64();
        if out.is_none() {
            self.push(ptr, "expected a non-negative integer");
        }
        out
    }

    fn array<'a>(&mut self, v: &'a Value, ptr: &str) -> Option<&'a Vec<Value>> {
        let out = v.as_array();
        if out.is_none() {
            self.push(ptr, "expected an array");
        }
        out
    }

    fn strings(&mut self, v: &Value, ptr: &str) -> Option<Vec<String>> {
        let arr = self.array(v, ptr)?;
        let out: Vec<Option<String>> = arr
            .iter()
            .enumerate()
            .map(|(i, x)| self.string(x, &format!("{ptr}/{i}")))
            .collect();
        out.into_iter().collect()
    }

    fn version(&mut self, obj: &Map<String, Value>) {
        if let Some(v) = obj.get("version") {
            match v.as_u64() {
                Some(SCHEMA_VERSION) => {}
                _ => self.push("/version", format!("unsupported schema version {v}, expected {SCHEMA_VERSION}")),
            }
        }
    }
}

/// A branch file: either a bare array of entries or an object with the
/// curve alongside its `branches`.
#[derive(Debug, Clone, Default)]
pub struct BranchFile {
    pub poly: Option<String>,
    pub q: Option<u64>,
    pub genera: Option<Vec<u32>>,
    pub branches: Vec<BranchFileEntry>,
}

fn branch_entries(v: &Value, ptr: &str, bad: &mut Violations) -> Vec<BranchFileEntry> {
    let Some(arr) = bad.array(v, ptr) else {
        return vec![];
    };
    let mut out = Vec::new();
    for (i, e) in arr.iter().enumerate() {
        let ep = format!("{ptr}/{i}");
        let Some(obj) = e.as_object() else {
            bad.push(&ep, "expected an object");
            continue;
        };
        let point = bad.field(obj, &ep, "point", true).and_then(|v| bad.strings(v, &format!("{ep}/point")));
        let params = bad.field(obj, &ep, "params", true).and_then(|v| {
            let pp = format!("{ep}/params");
            let arr = bad.array(v, &pp)?;
            let rows: Vec<Option<Vec<String>>> =
                arr.iter().enumerate().map(|(j, b)| bad.strings(b, &format!("{pp}/{j}"))).collect();
            rows.into_iter().collect::<Option<Vec<_>>>()
        });
        let field_ext = match bad.field(obj, &ep, "field_ext", false) {
            None => Some(1),
            Some(v) => match bad.uint(v, &format!("{ep}/field_ext")) {
                Some(0) => {
                    bad.push(&format!("{ep}/field_ext"), "must be at least 1");
                    None
                }
                x => x,
            },
        };
        if let (Some(point), Some(params), Some(field_ext)) = (point, params, field_ext) {
            out.push(BranchFileEntry {
                point,
                params,
                field_ext: field_ext as u32,
            });
        }
    }
    out
}

pub fn branch_file(v: &Value) -> Result<BranchFile> {
    let mut bad = Violations::default();
    let out = match v {
        Value::Array(_) => BranchFile {
            branches: branch_entries(v, "", &mut bad),
            ..Default::default()
        },
        Value::Object(obj) => {
            bad.version(obj);
            let poly = bad.field(obj, "", "poly", false).and_then(|v| bad.string(v, "/poly"));
            let q = bad.field(obj, "", "q", false).and_then(|v| bad.uint(v, "/q"));
            let genera = bad.field(obj, "", "genera", false).and_then(|v| {
                let arr = bad.array(v, "/genera")?;
                let g: Vec<Option<u64>> =
                    arr.iter().enumerate().map(|(i, x)| bad.uint(x, &format!("/genera/{i}"))).collect();
                g.into_iter().map(|x| x.map(|x| x as u32)).collect()
            });
            let branches = match bad.field(obj, "", "branches", true) {
                Some(b) => branch_entries(b, "/branches", &mut bad),
                None => vec![],
            };
            BranchFile { poly, q, genera, branches }
        }
        _ => {
            bad.push("", "expected an array of branch entries or an object with `branches`");
            BranchFile::default()
        }
    };
    bad.finish(out)
}

/// Input for the jet search: the two forms, the point and optional divisor
/// branches through it.
#[derive(Debug, Clone, Default)]
pub struct JetFile {
    pub p: Option<u64>,
    pub omega1: Option<String>,
    pub omega2: Option<String>,
    pub point: Option<Vec<String>>,
    pub branches: Vec<JetBranch>,
}

#[derive(Debug, Clone)]
pub struct JetBranch {
    pub params: [String; 2],
    pub a: u32,
    pub gg: u32,
}

pub fn jet_file(v: &Value) -> Result<JetFile> {
    let mut bad = Violations::default();
    let Some(obj) = v.as_object() else {
        bad.push("", "expected an object");
        return bad.finish(JetFile::default());
    };
    bad.version(obj);
    let s = |bad: &mut Violations, key: &str| {
        bad.field(obj, "", key, false).and_then(|v| bad.string(v, &format!("/{key}")))
    };
    let omega1 = s(&mut bad, "omega1");
    let omega2 = s(&mut bad, "omega2");
    let p = bad.field(obj, "", "p", false).and_then(|v| bad.uint(v, "/p"));
    let point = bad.field(obj, "", "point", false).and_then(|v| bad.strings(v, "/point"));
    let mut branches = Vec::new();
    if let Some(arr) = bad.field(obj, "", "branches", false).and_then(|v| bad.array(v, "/branches")) {
        for (i, b) in arr.iter().enumerate() {
            let bp = format!("/branches/{i}");
            let Some(o) = b.as_object() else {
                bad.push(&bp, "expected an object");
                continue;
            };
            let params = bad.field(o, &bp, "params", true).and_then(|v| bad.strings(v, &format!("{bp}/params")));
            let params = match params {
                Some(v) if v.len() == 2 => Some([v[0].clone(), v[1].clone()]),
                Some(_) => {
                    bad.push(&format!("{bp}/params"), "expected two coordinate series");
                    None
                }
                None => None,
            };
            let a = match bad.field(o, &bp, "a", false) {
                Some(v) => bad.uint(v, &format!("{bp}/a")),
                None => Some(1),
            };
            let gg = match bad.field(o, &bp, "gg", false) {
                Some(v) => bad.uint(v, &format!("{bp}/gg")),
                None => Some(0),
            };
            if let (Some(params), Some(a), Some(gg)) = (params, a, gg) {
                branches.push(JetBranch {
                    params,
                    a: a as u32,
                    gg: gg as u32,
                });
            }
        }
    }
    bad.finish(JetFile {
        p,
        omega1,
        omega2,
        point,
        branches,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn valid_branch_file() {
        let v = json!({"version": 1, "poly": "y^2*z - x^3", "q": 5,
            "branches": [{"point": ["0", "0", "1"], "params": [["t^2", "t^3"]]}]});
        let f = branch_file(&v).unwrap();
        assert_eq!(f.branches.len(), 1);
        assert_eq!(f.branches[0].field_ext, 1);
        assert_eq!(f.q, Some(5));
    }

    #[test]
    fn violations_name_pointers() {
        let v = json!({"branches": [{"point": ["0", "0", "1"]}, {"point": [[]], "params": []}]});
        let msg = branch_file(&v).unwrap_err().to_string();
        assert!(msg.contains("/branches/0/params"), "{msg}");
        assert!(msg.contains("/branches/1/point/0"), "{msg}");
        let msg = branch_file(&json!([{"params": []}])).unwrap_err().to_string();
        assert!(msg.contains("/0/point"), "{msg}");
        let msg = branch_file(&json!({"version": 2, "branches": []})).unwrap_err().to_string();
        assert!(msg.contains("/version"), "{msg}");
    }

    #[test]
    fn jet_file_defaults() {
        let v = json!({"omega1": "ds1", "branches": [{"params": ["t", "t"]}, {"params": ["t"]}]});
        let msg = jet_file(&v).unwrap_err().to_string();
        assert!(msg.contains("/branches/1/params"), "{msg}");
        let v = json!({"omega1": "ds1", "branches": [{"params": ["t", "-t"], "a": 2}]});
        let f = jet_file(&v).unwrap();
        assert_eq!((f.branches[0].a, f.branches[0].gg), (2, 0));
    }
}
