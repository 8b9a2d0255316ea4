//! Run configuration: defaults, then an optional key=value file, then flags.

use std::path::{Path, PathBuf};

use bvalid::kernel::MutationId;
use bvalid::value::Scope;
use bvalid::Parallelism;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    pub carriers: Vec<(String, usize)>,
    pub ints: Option<(i64, i64)>,
    pub fuel: Option<u64>,
    pub max_card: Option<usize>,
    pub json: bool,
    pub jobs: Option<usize>,
    pub mutation: Option<MutationId>,
    pub out: Option<PathBuf>,
    pub external_typecheck: Option<String>,
}

pub fn parse_carrier(s: &str) -> Result<(String, usize), String> {
    let (name, n) = s.split_once('=').ok_or_else(|| format!("expected CARRIER=N, found {s:?}"))?;
    let n = n.trim().parse().map_err(|_| format!("bad carrier size in {s:?}"))?;
    Ok((name.trim().to_string(), n))
}

pub fn parse_ints(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected LO:HI, found {s:?}"))?;
    let lo: i64 = lo.trim().parse().map_err(|_| format!("bad lower bound in {s:?}"))?;
    let hi: i64 = hi.trim().parse().map_err(|_| format!("bad upper bound in {s:?}"))?;
    if lo > hi {
        return Err(format!("empty integer range {s:?}"));
    }
    Ok((lo, hi))
}

fn number<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, String> {
    v.parse().map_err(|_| format!("bad value for {key}: {v:?}"))
}

impl Config {
    /// Reads `key = value` lines; `#` starts a comment.
    pub fn from_file(path: &Path) -> Result<Config, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        Config::parse(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Config, String> {
        let mut c = Config::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| format!("line {}: expected key = value", i + 1))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "scope" => {
                    for part in value.split(',').filter(|p| !p.trim().is_empty()) {
                        c.carriers.push(parse_carrier(part)?);
                    }
                }
                "int" => c.ints = Some(parse_ints(value)?),
                "fuel" => c.fuel = Some(number(key, value)?),
                "max_card" => c.max_card = Some(number(key, value)?),
                "json" => c.json = number(key, value)?,
                "jobs" => c.jobs = Some(number(key, value)?),
                "mutation" => c.mutation = Some(value.parse().map_err(|e| format!("{e}"))?),
                "out" => c.out = Some(PathBuf::from(value)),
                "external_typecheck" => c.external_typecheck = Some(value.to_string()),
                other => return Err(format!("line {}: unknown key {other:?}", i + 1)),
            }
        }
        Ok(c)
    }

    /// Values set in `over` replace those in `self`.
    pub fn merge(mut self, over: Config) -> Config {
        self.carriers.extend(over.carriers);
        self.ints = over.ints.or(self.ints);
        self.fuel = over.fuel.or(self.fuel);
        self.max_card = over.max_card.or(self.max_card);
        self.json |= over.json;
        self.jobs = over.jobs.or(self.jobs);
        self.mutation = over.mutation.or(self.mutation);
        self.out = over.out.or(self.out);
        self.external_typecheck = over.external_typecheck.or(self.external_typecheck);
        self
    }

    pub fn scope(&self) -> Scope {
        let mut s = Scope::default();
        for (name, n) in &self.carriers {
            s = s.with_carrier(name, *n);
        }
        if let Some((lo, hi)) = self.ints {
            s = s.with_ints(lo, hi);
        }
        if let Some(f) = self.fuel {
            s.fuel = f;
        }
        if let Some(m) = self.max_card {
            s.max_set_card = m;
        }
        s
    }

    pub fn parallelism(&self) -> Parallelism {
        match self.jobs {
            Some(n) => Parallelism::from_jobs(n),
            None => Parallelism::Threads(0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_flags() {
        let file = Config::parse("# defaults\nscope = EL=3, ID=2\nint = -1:4\nfuel = 500\njobs = 1\n").unwrap();
        let flags = Config { fuel: Some(9), mutation: Some(MutationId::M2), ..Config::default() };
        let c = file.merge(flags);
        assert_eq!(c.fuel, Some(9));
        assert_eq!(c.ints, Some((-1, 4)));
        assert_eq!(c.mutation, Some(MutationId::M2));
        let s = c.scope();
        assert_eq!(s.carrier_size("EL"), 3);
        assert_eq!((s.int_lo, s.int_hi, s.fuel), (-1, 4, 9));
        assert_eq!(c.parallelism(), Parallelism::Sequential);
    }

    #[test]
    fn bad_lines_are_rejected() {
        assert!(Config::parse("colour = red\n").is_err());
        assert!(Config::parse("int = 3:1\n").is_err());
        assert!(Config::parse("just text\n").is_err());
        assert!(parse_carrier("EL").is_err());
    }
}
