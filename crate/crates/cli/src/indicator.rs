use std::fmt::Write as _;
use std::fs;

use anyhow::{Context, Result};
use serde_json::{json, Value};
use valdist::indicator::{builtin_model, certify, parse_indicator_file, AsymptoticCertificate, IndicatorModel, PiCoefficient};

use crate::IndicatorArgs;

fn coeff(c: &PiCoefficient) -> Value {
    json!({ "exact": c.to_string(), "value": c.to_f64() })
}

fn load(family: &str) -> Result<IndicatorModel> {
    if let Some(m) = builtin_model(family) {
        return Ok(m);
    }
    let text = fs::read_to_string(family).with_context(|| format!("no builtin family {family:?} and no such file"))?;
    parse_indicator_file(&text).with_context(|| format!("parsing {family}"))
}

fn to_json(model: &IndicatorModel, c: &AsymptoticCertificate, full: bool) -> Value {
    let mut v = json!({
        "family": c.model,
        "rho": model.family.rho().to_string(),
        "members": model.family.names(),
        "T": coeff(&c.t),
        "m": c.m.iter().map(|(n, x)| json!({ "hyperplane": n, "coefficient": coeff(x) })).collect::<Vec<_>>(),
        "m_k": c.mk.iter().map(coeff).collect::<Vec<_>>(),
        "N1": coeff(&c.n1),
    });
    if full {
        v["lemma2"] = json!(if c.lemma2_passed() { "pass" } else { "fail" });
        v["theorem2"] = json!({ "residual": coeff(&c.theorem2_residual), "status": if c.theorem2_passed() { "pass" } else { "fail" } });
        if let Some((s, sel)) = &c.admissible_max {
            v["admissible_max"] = json!({ "exact": s.to_string(), "value": s.to_f64(), "selection": sel });
        }
        if let Some(r) = c.cartan_ratio() {
            v["cartan_ratio"] = json!({ "exact": r.to_string(), "value": r.to_f64() });
        }
        if let Some(d) = c.defects() {
            v["defects"] = json!(d.iter().map(|x| json!({ "exact": x.to_string(), "value": x.to_f64() })).collect::<Vec<_>>());
        }
    }
    v
}

fn table(model: &IndicatorModel, c: &AsymptoticCertificate, full: bool) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "family {} (rho = {}, {} indicators, dim {})", c.model, model.family.rho(), model.family.len(), model.dim);
    let mut line = |k: &str, v: &PiCoefficient| {
        let _ = writeln!(s, "{k:<14} {:<16} {:.12}", v.to_string(), v.to_f64());
    };
    line("T", &c.t);
    for (k, m) in c.mk.iter().enumerate() {
        line(&format!("m_{}", k + 1), m);
    }
    line("N1", &c.n1);
    for (n, m) in &c.m {
        line(&format!("m({n})"), m);
    }
    if full {
        let pass = |b: bool| if b { "pass" } else { "FAIL" };
        let _ = writeln!(s, "{:<14} {}", "lemma2", pass(c.lemma2_passed()));
        let _ = writeln!(s, "{:<14} {} (residual {})", "theorem2", pass(c.theorem2_passed()), c.theorem2_residual);
        if let Some((v, sel)) = &c.admissible_max {
            let _ = writeln!(s, "{:<14} {:<16} {:.12}  [{}]", "admissible", v.to_string(), v.to_f64(), sel.join(", "));
        }
        if let Some(r) = c.cartan_ratio() {
            let _ = writeln!(s, "{:<14} {:<16} {:.12}", "cartan ratio", r.to_string(), r.to_f64());
        }
        if let Some(d) = c.defects() {
            let txt: Vec<String> = d.iter().map(ToString::to_string).collect();
            let _ = writeln!(s, "{:<14} {}", "defects", txt.join(", "));
        }
    }
    s
}

pub fn run(a: IndicatorArgs) -> Result<u8> {
    let model = load(&a.family)?;
    let c = certify(&model)?;
    let v = to_json(&model, &c, a.certify);
    if let Some(p) = &a.out {
        fs::write(p, serde_json::to_string_pretty(&v)? + "\n").with_context(|| format!("writing {}", p.display()))?;
    }
    if a.json {
        println!("{}", serde_json::to_string_pretty(&v)?);
    } else {
        print!("{}", table(&model, &c, a.certify));
    }
    let ok = !a.certify || (c.lemma2_passed() && c.theorem2_passed());
    Ok(if ok { 0 } else { 1 })
}
