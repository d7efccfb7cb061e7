use std::fs;

use anyhow::{Context, Result};
use valdist::checks::{admissibility_check, run_all, CheckConfig};
use valdist::projgeo::parse_hyperplane_file;

use crate::CheckArgs;

pub fn run(a: CheckArgs) -> Result<u8> {
    let cfg = CheckConfig { seed: a.seed, points: a.points, instances: a.instances, digits: a.digits, tol: a.tol };
    let mut outcomes = Vec::new();
    if let Some(p) = &a.planes {
        let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        outcomes.push(admissibility_check(&parse_hyperplane_file(&text)?));
    }
    outcomes.extend(run_all(&cfg)?);
    let doc = serde_json::json!({ "config": cfg, "suites": outcomes });
    if let Some(p) = &a.out {
        fs::write(p, serde_json::to_string_pretty(&doc)? + "\n").with_context(|| format!("writing {}", p.display()))?;
    }
    if a.json {
        println!("{}", serde_json::to_string_pretty(&doc)?);
    } else {
        println!("{:<28} {:<6} statistics", "suite", "status");
        for o in &outcomes {
            let stats: Vec<String> = o.stats.iter().map(|(k, v)| format!("{k} = {v:.6e}")).collect();
            println!("{:<28} {:<6} {}", o.name, if o.passed { "pass" } else { "FAIL" }, stats.join("; "));
            if !o.detail.is_empty() {
                println!("{:<28} {:<6} {}", "", "", o.detail);
            }
        }
    }
    for o in outcomes.iter().filter(|o| !o.passed) {
        if let Some(f) = &o.failure {
            eprintln!("failing case for {}: {f}", o.name);
        }
    }
    Ok(if outcomes.iter().all(|o| o.passed) { 0 } else { 1 })
}
