//! Textual operator specs used by the CLI and sweep configs.
//!
//! Grammar: `SxT | SyT | SzT | random:<seed> | sites:<term>(+<term>)*` with
//! `term = [<weight>*]<site><axis>`, e.g. `sites:3z+4z` or
//! `sites:1.0*3z+1.0*4x`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin_model::{
    build_site_combination, build_total_spin, project, random_gaussian_traceless, Axis,
    ParitySectorBasis, SectorOperator, SiteTerm, SpinChainParams,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum OperatorSpec {
    TotalSpin(Axis),
    Random { seed: u64 },
    Sites(Vec<SiteTerm>),
}

impl OperatorSpec {
    /// Build the operator in the given parity sector. Total-spin and site
    /// operators are built in the full space and projected; the random
    /// operator is generated directly at the sector dimension.
    pub fn build(&self, params: &SpinChainParams, basis: &ParitySectorBasis) -> Result<SectorOperator> {
        match self {
            OperatorSpec::TotalSpin(axis) => project(&build_total_spin(*axis, params.l)?, basis),
            OperatorSpec::Sites(terms) => project(&build_site_combination(terms, params.l)?, basis),
            OperatorSpec::Random { seed } => random_gaussian_traceless(basis.dim(), *seed),
        }
    }
}

impl fmt::Display for OperatorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperatorSpec::TotalSpin(axis) => write!(f, "S{axis}T"),
            OperatorSpec::Random { seed } => write!(f, "random:{seed}"),
            OperatorSpec::Sites(terms) => {
                write!(f, "sites:")?;
                for (i, t) in terms.iter().enumerate() {
                    if i > 0 {
                        write!(f, "+")?;
                    }
                    if (t.weight - 1.0).abs() > 1e-15 {
                        write!(f, "{}*", t.weight)?;
                    }
                    write!(f, "{}{}", t.site, t.axis)?;
                }
                Ok(())
            }
        }
    }
}

fn bad(spec: &str, reason: impl Into<String>) -> Error {
    Error::InvalidOperatorSpec { spec: spec.into(), reason: reason.into() }
}

fn parse_axis(spec: &str, c: char) -> Result<Axis> {
    match c {
        'x' => Ok(Axis::X),
        'y' => Ok(Axis::Y),
        'z' => Ok(Axis::Z),
        other => Err(bad(spec, format!("unknown axis '{other}'"))),
    }
}

fn parse_site_term(spec: &str, term: &str) -> Result<SiteTerm> {
    let (weight, rest) = match term.split_once('*') {
        Some((w, rest)) => {
            let weight: f64 = w
                .parse()
                .map_err(|_| bad(spec, format!("bad weight '{w}'")))?;
            (weight, rest)
        }
        None => (1.0, term),
    };
    if rest.len() < 2 {
        return Err(bad(spec, format!("term '{term}' too short, expected <site><axis>")));
    }
    let (digits, axis_str) = rest.split_at(rest.len() - 1);
    let site: usize = digits
        .parse()
        .map_err(|_| bad(spec, format!("bad site index '{digits}'")))?;
    let axis = parse_axis(spec, axis_str.chars().next().unwrap())?;
    Ok(SiteTerm { site, axis, weight })
}

impl FromStr for OperatorSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "SxT" => return Ok(OperatorSpec::TotalSpin(Axis::X)),
            "SyT" => return Ok(OperatorSpec::TotalSpin(Axis::Y)),
            "SzT" => return Ok(OperatorSpec::TotalSpin(Axis::Z)),
            _ => {}
        }
        if let Some(seed) = s.strip_prefix("random:") {
            let seed: u64 = seed
                .parse()
                .map_err(|_| bad(s, format!("bad seed '{seed}'")))?;
            return Ok(OperatorSpec::Random { seed });
        }
        if let Some(body) = s.strip_prefix("sites:") {
            if body.is_empty() {
                return Err(bad(s, "no site terms"));
            }
            let terms = body
                .split('+')
                .map(|t| parse_site_term(s, t))
                .collect::<Result<Vec<_>>>()?;
            return Ok(OperatorSpec::Sites(terms));
        }
        Err(bad(s, "expected SxT, SyT, SzT, random:<seed> or sites:<terms>"))
    }
}

impl TryFrom<String> for OperatorSpec {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<OperatorSpec> for String {
    fn from(spec: OperatorSpec) -> String {
        spec.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_total_spin_forms() {
        assert_eq!("SzT".parse::<OperatorSpec>().unwrap(), OperatorSpec::TotalSpin(Axis::Z));
        assert_eq!("SxT".parse::<OperatorSpec>().unwrap(), OperatorSpec::TotalSpin(Axis::X));
        assert_eq!("SyT".parse::<OperatorSpec>().unwrap(), OperatorSpec::TotalSpin(Axis::Y));
    }

    #[test]
    fn parses_random_with_seed() {
        assert_eq!(
            "random:17".parse::<OperatorSpec>().unwrap(),
            OperatorSpec::Random { seed: 17 }
        );
        assert!("random:x".parse::<OperatorSpec>().is_err());
    }

    #[test]
    fn parses_site_terms_with_and_without_weights() {
        let spec: OperatorSpec = "sites:3z+4z".parse().unwrap();
        assert_eq!(
            spec,
            OperatorSpec::Sites(vec![
                SiteTerm { site: 3, axis: Axis::Z, weight: 1.0 },
                SiteTerm { site: 4, axis: Axis::Z, weight: 1.0 },
            ])
        );
        let weighted: OperatorSpec = "sites:1.0*3z+2.5*4x".parse().unwrap();
        assert_eq!(
            weighted,
            OperatorSpec::Sites(vec![
                SiteTerm { site: 3, axis: Axis::Z, weight: 1.0 },
                SiteTerm { site: 4, axis: Axis::X, weight: 2.5 },
            ])
        );
    }

    #[test]
    fn rejects_malformed_specs() {
        for bad in ["", "SwT", "sites:", "sites:z3", "sites:3q", "frobnicate"] {
            assert!(bad.parse::<OperatorSpec>().is_err(), "{bad:?} should fail");
        }
    }

    #[test]
    fn display_round_trips() {
        for s in ["SzT", "SyT", "random:7", "sites:3z+4z", "sites:2.5*1x+3y"] {
            let spec: OperatorSpec = s.parse().unwrap();
            let shown = spec.to_string();
            let reparsed: OperatorSpec = shown.parse().unwrap();
            assert_eq!(spec, reparsed, "{s} -> {shown}");
        }
    }
}
