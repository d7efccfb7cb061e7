use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use valdist::entire::ComponentRegistry;
use valdist::nevanlinna::{analyze, AnalysisConfig, RadialGrid, ValueDistReport};
use valdist::projgeo::parse_hyperplane_file;
use valdist::quadrature::QuadratureSpec;
use valdist::scenario::builtin_scenario;

use crate::AnalyzeArgs;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn grid(a: &AnalyzeArgs, default: Option<RadialGrid>) -> Result<RadialGrid> {
    let g = if !a.r.is_empty() {
        RadialGrid::from_radii(a.r.clone())?
    } else {
        match (a.rmin, a.rmax, a.radii, default) {
            (None, None, None, Some(g)) => g,
            (rmin, rmax, m, _) => {
                let (Some(rmin), Some(rmax)) = (rmin, rmax) else {
                    bail!("give --rmin and --rmax (or --r) for this curve");
                };
                RadialGrid::log_spaced(rmin, rmax, m.unwrap_or(8))?
            }
        }
    };
    Ok(match a.prec {
        Some(d) => g.with_min_digits(d),
        None => g,
    })
}

pub fn summary(rep: &ValueDistReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "n = {}, {} hyperplanes, admissible = {}, complete = {}, order = {}, reducedness = {:?}",
        rep.n,
        rep.planes.len(),
        rep.admissible,
        rep.complete,
        rep.order,
        rep.reducedness
    );
    let _ = writeln!(s, "{:>12} {:>14} {:>14} {:>14} {:>14} {:>10}", "r", "T", "N1", "S_thm1", "S_cartan", "status");
    let opt = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.6}"));
    for r in &rep.rows {
        let status = if r.certified { "certified" } else { "flagged" };
        let _ = writeln!(s, "{:>12.4} {:>14.6} {:>14.6} {:>14} {:>14} {:>10}", r.r, r.t, r.n1, opt(r.s_thm1), opt(r.s_cartan), status);
        for f in &r.flags {
            let _ = writeln!(s, "{:>12}   flag: {f}", "");
        }
    }
    for i in &rep.invariants {
        let mark = if i.passed { "pass" } else { "FAIL" };
        let _ = writeln!(s, "[{mark}] {}{}", i.name, if i.detail.is_empty() { String::new() } else { format!(": {}", i.detail) });
    }
    s
}

pub fn run(a: AnalyzeArgs) -> Result<u8> {
    let (curve, planes, default_grid) = match (&a.scenario, &a.curve) {
        (Some(name), None) => {
            let s = builtin_scenario(name, a.seed)?;
            let planes = match &a.planes {
                Some(p) => parse_hyperplane_file(&read(p)?)?,
                None => s.planes,
            };
            (s.curve, planes, Some(s.grid))
        }
        (None, Some(c)) => {
            let curve = ComponentRegistry::default().parse_curve(&read(c)?).with_context(|| format!("parsing {}", c.display()))?;
            let p = a.planes.as_ref().expect("clap enforces --planes with --curve");
            let planes = parse_hyperplane_file(&read(p)?).with_context(|| format!("parsing {}", p.display()))?;
            (curve, planes, None)
        }
        _ => bail!("give either --scenario or --curve with --planes"),
    };
    let grid = grid(&a, default_grid)?;
    let mut cfg = AnalysisConfig::default();
    if let Some(t) = a.tol {
        cfg.quad = QuadratureSpec::default().with_tol(t);
    }
    let rep = analyze(&curve, &planes, &grid, &cfg)?;
    let json = rep.to_json()?;
    let csv = rep.to_csv();
    let mut outputs = Vec::new();
    for path in &a.out {
        let body = match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => &csv,
            Some("json") => &json,
            _ => bail!("output {} must end in .csv or .json", path.display()),
        };
        outputs.push((path, body));
    }
    for (path, body) in outputs {
        fs::write(path, body).with_context(|| format!("writing {}", path.display()))?;
    }
    if a.json {
        println!("{json}");
    } else {
        print!("{}", summary(&rep));
    }
    Ok(rep.exit_code() as u8)
}
