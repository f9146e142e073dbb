//! JSON documents.
//!
//! Objects are `serde_json::Map`, which keeps keys sorted, so printing is deterministic.
//! Rationals are `{"num": "...", "den": "..."}`; reals are `{"value": x, "tol": t}`.

use num_bigint::BigInt;
use num_traits::Signed;
use serde_json::{json, Map, Value};

use sclgap_core::chain::{cfl_gap, Basis};
use sclgap_core::orbifold::RelGapCertificate;
use sclgap_core::rational::Q;
use sclgap_core::text::{format_chain, parse_chain, parse_group, parse_word};
use sclgap_core::{CountingQm, GapCertificate, GroupSpec, QmCombination, Status, VanishingReason, Word};

pub const SCHEMA_VERSION: &str = "1";

pub fn rational(q: &Q) -> Value {
    json!({ "num": q.numer().to_string(), "den": q.denom().to_string() })
}

pub fn real(x: f64, tol: f64) -> Value {
    json!({ "value": x, "tol": tol })
}

pub fn word(g: &GroupSpec, w: &Word) -> Value {
    Value::String(word_text(g, w))
}

pub fn word_text(g: &GroupSpec, w: &Word) -> String {
    if w.is_empty() {
        "1".into()
    } else {
        g.format_word(w)
    }
}

pub fn parse_rational(v: &Value) -> Option<Q> {
    let num: BigInt = v.get("num")?.as_str()?.parse().ok()?;
    let den: BigInt = v.get("den")?.as_str()?.parse().ok()?;
    if den.is_positive() {
        Some(Q::new(num, den))
    } else {
        None
    }
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::LowerBound => "lower_bound",
        Status::Zero => "zero",
        Status::Infinite => "infinite",
    }
}

fn reason_name(r: VanishingReason) -> &'static str {
    match r {
        VanishingReason::EquivalentToZeroChain => "equivalent_to_zero_chain",
        VanishingReason::FiniteOrder => "finite_order",
        VanishingReason::ConjugateToInverse => "conjugate_to_inverse",
        VanishingReason::Peripheral => "peripheral",
    }
}

fn opt<T>(x: Option<T>, f: impl FnOnce(T) -> Value) -> Value {
    x.map_or(Value::Null, f)
}

pub fn witness(w: &QmCombination) -> Value {
    Value::Array(
        w.terms()
            .iter()
            .map(|(c, qm)| json!({ "coefficient": rational(c), "base": word(qm.group(), qm.base()) }))
            .collect(),
    )
}

pub fn certificate(c: &GapCertificate) -> Value {
    let basis = opt(c.basis.as_ref(), |b| match b {
        Basis::Bavard => json!({ "kind": "bavard" }),
        Basis::Acylindrical { k, n } => json!({ "kind": "acylindrical", "k": k, "n": n }),
        Basis::Scaled { factor, parts } => json!({
            "kind": "scaled",
            "factor": rational(factor),
            "parts": parts.iter().map(certificate).collect::<Vec<_>>(),
        }),
    });
    json!({
        "group": c.group.to_string(),
        "chain": format_chain(&c.group, &c.chain),
        "status": status_name(c.status),
        "bound": opt(c.bound.as_ref(), rational),
        "basis": basis,
        "witness": opt(c.witness.as_ref(), witness),
        "defect_bound": opt(c.witness.as_ref(), |w| rational(&w.defect_bound())),
        "value": opt(c.value.as_ref(), rational),
        "reason": opt(c.reason, |r| Value::String(reason_name(r).into())),
        "notes": c.notes,
    })
}

pub fn rel_certificate(r: &RelGapCertificate) -> Value {
    let mut v = certificate(&r.certificate);
    let obj = v.as_object_mut().expect("object");
    obj.insert("case_tag".into(), opt(r.case_tag, |t| Value::String(format!("{t:?}"))));
    obj.insert("peripheral_chain".into(), Value::String(format_chain(&r.certificate.group, &r.peripheral_chain)));
    v
}

#[derive(Clone, Debug)]
pub struct Document {
    pub command: String,
    pub inputs: Map<String, Value>,
    pub result: Value,
    pub timing: Option<Value>,
}

impl Document {
    pub fn to_value(&self) -> Value {
        let mut m = Map::new();
        m.insert("schema_version".into(), Value::String(SCHEMA_VERSION.into()));
        m.insert("command".into(), Value::String(self.command.clone()));
        m.insert("inputs".into(), Value::Object(self.inputs.clone()));
        m.insert("result".into(), self.result.clone());
        if let Some(t) = &self.timing {
            m.insert("timing".into(), t.clone());
        }
        Value::Object(m)
    }

    pub fn render(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("serializable")
    }

    pub fn parse(text: &str) -> Result<Document, String> {
        let v: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let m = v.as_object().ok_or("document is not an object")?;
        if m.get("schema_version").and_then(Value::as_str) != Some(SCHEMA_VERSION) {
            return Err("unsupported schema_version".into());
        }
        Ok(Document {
            command: m.get("command").and_then(Value::as_str).ok_or("missing command")?.to_string(),
            inputs: m.get("inputs").and_then(Value::as_object).ok_or("missing inputs")?.clone(),
            result: m.get("result").cloned().ok_or("missing result")?,
            timing: m.get("timing").cloned(),
        })
    }
}

/// Recomputes the bound of a serialized certificate from its witness, chain and basis.
pub fn revalidate(cert: &Value) -> Result<Option<Q>, String> {
    let field = |k: &str| cert.get(k).ok_or_else(|| format!("missing {k}"));
    let group = parse_group(field("group")?.as_str().ok_or("group")?).map_err(|e| e.to_string())?;
    let chain = parse_chain(field("chain")?.as_str().ok_or("chain")?, &group).map_err(|e| e.to_string())?;
    let claimed = match field("bound")? {
        Value::Null => None,
        b => Some(parse_rational(b).ok_or("bad bound")?),
    };
    if field("status")?.as_str() != Some("lower_bound") {
        return match claimed {
            None => Ok(None),
            Some(_) => Err("bound on a certificate without a lower bound".into()),
        };
    }
    let basis = field("basis")?;
    let recomputed = match basis.get("kind").and_then(Value::as_str) {
        None => None,
        Some("bavard") => {
            let terms = field("witness")?.as_array().ok_or("witness")?;
            let mut qms = Vec::new();
            for t in terms {
                let c = parse_rational(t.get("coefficient").ok_or("coefficient")?).ok_or("coefficient")?;
                let b = parse_word(t.get("base").and_then(Value::as_str).ok_or("base")?, &group).map_err(|e| e.to_string())?;
                qms.push((c, CountingQm::new(&group, b).map_err(|e| e.to_string())?));
            }
            let w = QmCombination::new(qms).map_err(|e| e.to_string())?;
            let value = w.evaluate_on_chain(&chain);
            if parse_rational(field("value")?).as_ref() != Some(&value) {
                return Err("value does not match the witness".into());
            }
            if parse_rational(field("defect_bound")?).as_ref() != Some(&w.defect_bound()) {
                return Err("defect bound does not match the witness".into());
            }
            Some(value.abs() / (w.defect_bound() * Q::from_integer(2.into())))
        }
        Some("acylindrical") => {
            let k = basis.get("k").and_then(Value::as_u64).ok_or("k")? as u32;
            Some(cfl_gap(k))
        }
        Some("scaled") => {
            let factor = parse_rational(basis.get("factor").ok_or("factor")?).ok_or("factor")?;
            let mut least: Option<Q> = None;
            for p in basis.get("parts").and_then(Value::as_array).ok_or("parts")? {
                let b = revalidate(p)?.ok_or("scaled part without a bound")?;
                least = Some(least.map_or(b.clone(), |l| if b < l { b } else { l }));
            }
            Some(factor * least.ok_or("no parts")?)
        }
        Some(other) => return Err(format!("unknown basis {other}")),
    };
    if recomputed != claimed {
        return Err(format!("bound mismatch: claimed {claimed:?}, recomputed {recomputed:?}"));
    }
    Ok(recomputed)
}
