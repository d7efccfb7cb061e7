use std::fs;

use anyhow::{bail, Context, Result};
use valdist::entire::ComponentRegistry;
use valdist::projgeo::{parse_hyperplane_file, FlatLattice};

use crate::ValidateArgs;

pub fn run(a: ValidateArgs) -> Result<u8> {
    if a.curve.is_none() && a.planes.is_none() {
        bail!("give --curve and/or --planes");
    }
    let mut n = None;
    if let Some(p) = &a.curve {
        let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        let c = ComponentRegistry::default().parse_curve(&text).with_context(|| format!("parsing {}", p.display()))?;
        let kinds: Vec<&str> = c.components().iter().map(|f| f.kind()).collect();
        println!("curve: P^{}, components [{}], order {}", c.n(), kinds.join(", "), c.order());
        println!("  reducedness {:?}, wronskian strategy {}", c.reducedness(), c.wronskian_strategy());
        n = Some(c.n());
    }
    if let Some(p) = &a.planes {
        let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        let sys = parse_hyperplane_file(&text).with_context(|| format!("parsing {}", p.display()))?;
        let census = FlatLattice::enumerate(&sys)?.census();
        println!(
            "hyperplanes: {} in P^{}, rank {}, admissible {}, complete {}, flats per codimension {:?}",
            sys.len(),
            sys.n(),
            sys.rank(),
            sys.is_admissible(),
            sys.is_complete(),
            census
        );
        if n.is_some_and(|n| n != sys.n()) {
            bail!("curve and hyperplanes live in different projective spaces");
        }
    }
    Ok(0)
}
