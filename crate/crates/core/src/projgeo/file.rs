//! Hyperplane-system files (TOML):
//!
//! ```toml
//! normalize = true          # optional, default true
//! [[hyperplane]]
//! name = "x0"               # optional
//! coeffs = ["1", "0", "0"]  # exact Gaussian rationals such as "1/2-3i"
//! ```

use serde::Deserialize;

use super::{Hyperplane, HyperplaneSystem};
use crate::error::{Error, Result};
use crate::exact::GaussRational;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FileRepr {
    #[serde(default = "yes")]
    normalize: bool,
    #[serde(default)]
    hyperplane: Vec<PlaneRepr>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PlaneRepr {
    name: Option<String>,
    coeffs: Vec<String>,
}

fn yes() -> bool {
    true
}

pub fn parse_hyperplane_file(text: &str) -> Result<HyperplaneSystem> {
    let f: FileRepr = toml::from_str(text)?;
    let Some(first) = f.hyperplane.first() else {
        return Err(Error::Parse("no [[hyperplane]] entries".into()));
    };
    if first.coeffs.len() < 2 {
        return Err(Error::Parse("hyperplanes need at least 2 coefficients".into()));
    }
    let n = first.coeffs.len() - 1;
    let planes = f
        .hyperplane
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let alpha = p.coeffs.iter().map(|s| s.parse::<GaussRational>()).collect::<Result<Vec<_>>>()?;
            Hyperplane::from_exact(p.name.clone().unwrap_or_else(|| format!("a{i}")), alpha, f.normalize)
        })
        .collect::<Result<Vec<_>>>()?;
    HyperplaneSystem::new(n, planes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_system() {
        let s = parse_hyperplane_file(
            r#"
            [[hyperplane]]
            coeffs = ["1", "0", "0"]
            [[hyperplane]]
            name = "diag"
            coeffs = ["1", "1", "1"]
            "#,
        )
        .unwrap();
        assert_eq!(s.n(), 2);
        assert_eq!(s.get(0).name(), "a0");
        assert_eq!(s.get(1).name(), "diag");
        assert!((s.get(1).coeffs_c64()[2].re - 1.0 / 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse_hyperplane_file("").is_err());
        assert!(parse_hyperplane_file("normalize = false\n[[hyperplane]]\ncoeffs = [\"2\", \"0\"]").is_err());
        assert!(parse_hyperplane_file("[[hyperplane]]\ncoeffs = [\"1\", \"0\"]\n[[hyperplane]]\ncoeffs = [\"1\"]").is_err());
        assert!(parse_hyperplane_file("[[hyperplane]]\ncoeffs = [\"x\", \"0\"]").is_err());
    }
}
