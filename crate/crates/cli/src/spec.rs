use std::fmt;
use std::str::FromStr;

use puiseux::families::{build_family, FamilySpec, Monoid, Point};
use puiseux::fgmonoid::FgPresentation;
use puiseux::{Error, Rat, Result};

/// A monoid named on the command line: `fg:<rat>,<rat>,...` or
/// `family:<tag>{k=v,...}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MonoidSpec {
    Fg(FgPresentation),
    Family(FamilySpec),
}

impl FromStr for MonoidSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.starts_with("fg:") {
            FgPresentation::parse_at(s, 0).map(MonoidSpec::Fg)
        } else if s.starts_with("family:") {
            FamilySpec::parse_at(s, 0).map(MonoidSpec::Family)
        } else {
            Err(Error::Parse {
                position: 0,
                message: "expected \"fg:\" or \"family:\"".into(),
            })
        }
    }
}

impl fmt::Display for MonoidSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MonoidSpec::Fg(p) => p.fmt(f),
            MonoidSpec::Family(s) => s.fmt(f),
        }
    }
}

/// What a spec resolves to once built.
pub enum Target {
    Fg(FgPresentation),
    Monoid(Monoid),
}

impl MonoidSpec {
    pub fn build(&self) -> Result<Target> {
        match self {
            MonoidSpec::Fg(p) => Ok(Target::Fg(p.clone())),
            MonoidSpec::Family(s) => build_family(*s).map(Target::Monoid),
        }
    }
}

/// Attaches the input and a caret under the failing position to a parse
/// error.
pub fn with_caret(text: &str, e: Error) -> anyhow::Error {
    let caret = match &e {
        Error::Parse { position, .. } => {
            let col = text.get(..*position).map_or(*position, |s| s.chars().count());
            format!("\n  {text}\n  {}^", " ".repeat(col))
        }
        _ => String::new(),
    };
    anyhow::anyhow!("{e}{caret}")
}

pub fn parse_spec(text: &str) -> anyhow::Result<MonoidSpec> {
    text.parse().map_err(|e| with_caret(text, e))
}

pub fn parse_rat(s: &str) -> anyhow::Result<Rat> {
    Rat::parse_at(s, 0).map_err(|e| with_caret(s, e))
}

/// `x,y` or `(x,y)`.
pub fn parse_point(s: &str) -> anyhow::Result<Point> {
    point(s).map_err(|e| with_caret(s, e))
}

fn point(s: &str) -> Result<Point> {
    let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
    let bad = |position: usize, what: &str| Error::Parse {
        position,
        message: format!("expected a lattice point x,y: {what}"),
    };
    let (x, y) = inner.split_once(',').ok_or_else(|| bad(0, "missing comma"))?;
    let x = x.trim().parse().map_err(|_| bad(0, "bad x"))?;
    let y = y.trim().parse().map_err(|_| bad(inner.find(',').unwrap_or(0) + 1, "bad y"))?;
    Ok(Point::new(x, y))
}
