use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::ratcore::primes::is_prime;

/// A named family with its parameters, e.g. `family:af-not-f{l=1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FamilySpec {
    PowDenom { p: u64 },
    AfNotF { l: u32 },
    NfNotAf { p: u64 },
    AfNotNf { l: u32 },
    FNotAa,
    NaNotF,
    Grams,
    LexCone,
}

impl FamilySpec {
    pub fn tag(&self) -> &'static str {
        match self {
            FamilySpec::PowDenom { .. } => "pow-denom",
            FamilySpec::AfNotF { .. } => "af-not-f",
            FamilySpec::NfNotAf { .. } => "nf-not-af",
            FamilySpec::AfNotNf { .. } => "af-not-nf",
            FamilySpec::FNotAa => "f-not-aa",
            FamilySpec::NaNotF => "na-not-f",
            FamilySpec::Grams => "grams",
            FamilySpec::LexCone => "lexcone",
        }
    }

    /// The families exercised by the default checks, one instance each.
    pub fn standard() -> Vec<FamilySpec> {
        vec![
            FamilySpec::PowDenom { p: 3 },
            FamilySpec::AfNotF { l: 1 },
            FamilySpec::NfNotAf { p: 7 },
            FamilySpec::AfNotNf { l: 1 },
            FamilySpec::FNotAa,
            FamilySpec::NaNotF,
            FamilySpec::Grams,
            FamilySpec::LexCone,
        ]
    }

    pub fn is_puiseux(&self) -> bool {
        !matches!(self, FamilySpec::LexCone)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            FamilySpec::PowDenom { p } => {
                if p == 2 || !is_prime(p) {
                    return Err(Error::arg(format!("pow-denom needs an odd prime p, got {p}")));
                }
            }
            FamilySpec::NfNotAf { p } => {
                if !is_prime(p) || p < 7 {
                    return Err(Error::arg(format!("nf-not-af needs a prime p >= 7, got {p}")));
                }
            }
            FamilySpec::AfNotF { l } | FamilySpec::AfNotNf { l } => {
                if l == 0 || l > 32 {
                    return Err(Error::arg(format!("pool index l must be in 1..=32, got {l}")));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Parses `family:<tag>` or `family:<tag>{key=value,...}`. Positions in
    /// errors are byte offsets into `text` shifted by `offset`.
    pub fn parse_at(text: &str, offset: usize) -> Result<Self> {
        let body = text
            .strip_prefix("family:")
            .ok_or_else(|| Error::parse(offset, "expected prefix \"family:\""))?;
        let base = offset + "family:".len();
        let (tag, params, params_at) = match body.find('{') {
            None => (body, Vec::new(), base + body.len()),
            Some(open) => {
                let close_rel = body.len() - 1;
                if !body.ends_with('}') {
                    return Err(Error::parse(base + body.len(), "expected closing '}'"));
                }
                let inner = &body[open + 1..close_rel];
                let mut at = base + open + 1;
                let mut params = Vec::new();
                if !inner.trim().is_empty() {
                    for piece in inner.split(',') {
                        let (k, v) = piece
                            .split_once('=')
                            .ok_or_else(|| Error::parse(at, "expected key=value"))?;
                        let value_at = at + k.len() + 1;
                        let value: u64 = v.trim().parse().map_err(|_| {
                            Error::parse(value_at, format!("expected a positive integer, got {:?}", v.trim()))
                        })?;
                        params.push((k.trim().to_string(), value, at));
                        at += piece.len() + 1;
                    }
                }
                (&body[..open], params, base + open)
            }
        };
        let take = |names: &[&str]| -> Result<u64> {
            let mut found = None;
            for (k, v, at) in &params {
                if names.contains(&k.as_str()) {
                    if found.is_some() {
                        return Err(Error::parse(*at, format!("duplicate parameter {k}")));
                    }
                    found = Some(*v);
                } else {
                    return Err(Error::parse(*at, format!("unknown parameter {k:?} for {tag}")));
                }
            }
            found.ok_or_else(|| Error::parse(params_at, format!("{tag} needs parameter {}", names[0])))
        };
        let none = || -> Result<()> {
            match params.first() {
                Some((k, _, at)) => Err(Error::parse(*at, format!("{tag} takes no parameters, got {k}"))),
                None => Ok(()),
            }
        };
        let pool = |v: u64| -> Result<u32> {
            u32::try_from(v).map_err(|_| Error::parse(params_at, "pool index too large"))
        };
        let spec = match tag {
            "pow-denom" => FamilySpec::PowDenom { p: take(&["p"])? },
            "af-not-f" => FamilySpec::AfNotF {
                l: pool(take(&["l", "ℓ"])?)?,
            },
            "nf-not-af" => FamilySpec::NfNotAf { p: take(&["p"])? },
            "af-not-nf" => FamilySpec::AfNotNf {
                l: pool(take(&["l", "ℓ"])?)?,
            },
            "f-not-aa" => {
                none()?;
                FamilySpec::FNotAa
            }
            "na-not-f" => {
                none()?;
                FamilySpec::NaNotF
            }
            "grams" => {
                none()?;
                FamilySpec::Grams
            }
            "lexcone" => {
                none()?;
                FamilySpec::LexCone
            }
            other => return Err(Error::parse(base, format!("unknown family tag {other:?}"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilySpec::PowDenom { p } | FamilySpec::NfNotAf { p } => {
                write!(f, "family:{}{{p={p}}}", self.tag())
            }
            FamilySpec::AfNotF { l } | FamilySpec::AfNotNf { l } => {
                write!(f, "family:{}{{l={l}}}", self.tag())
            }
            _ => write!(f, "family:{}", self.tag()),
        }
    }
}

impl FromStr for FamilySpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FamilySpec::parse_at(s, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        for spec in FamilySpec::standard() {
            let text = spec.to_string();
            assert_eq!(text.parse::<FamilySpec>().unwrap(), spec, "{text}");
        }
        let alias: FamilySpec = "family:af-not-f{ℓ=2}".parse().unwrap();
        assert_eq!(alias.to_string(), "family:af-not-f{l=2}");
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(
            "family:nf-not-af{p=5}".parse::<FamilySpec>(),
            Err(Error::InvalidArgument(_))
        ));
        assert!("family:pow-denom{p=2}".parse::<FamilySpec>().is_err());
        assert!("family:pow-denom{p=9}".parse::<FamilySpec>().is_err());
        assert!("family:af-not-f{l=0}".parse::<FamilySpec>().is_err());
    }

    #[test]
    fn parse_positions() {
        let pos = |s: &str| match s.parse::<FamilySpec>() {
            Err(Error::Parse { position, .. }) => position,
            other => panic!("{s}: {other:?}"),
        };
        assert_eq!(pos("fam:grams"), 0);
        assert_eq!(pos("family:nope"), 7);
        assert_eq!(pos("family:pow-denom{q=3}"), 17);
        assert_eq!(pos("family:pow-denom{p=x}"), 19);
        assert_eq!(pos("family:grams{p=3}"), 13);
        assert_eq!(pos("family:pow-denom{p=3"), 20);
    }
}
