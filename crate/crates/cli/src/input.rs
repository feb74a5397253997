//! Turning command-line strings into library values.

use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use uq_un1::principal::PrincipalParams;
use uq_un1::scalar::QParam;
use uq_un1::tableau::{HighestWeight, Window};

use crate::{CliError, Common, ImUnits};

/// Parse `"2,1,0"`; the empty string is the empty weight.
pub fn parse_weight(s: &str) -> Result<HighestWeight, CliError> {
    let s = s.trim();
    let entries = if s.is_empty() {
        Vec::new()
    } else {
        s.split(',')
            .map(|x| {
                x.trim()
                    .parse::<i64>()
                    .map_err(|_| CliError::Input(format!("weight entry {x:?} is not an integer")))
            })
            .collect::<Result<Vec<_>, _>>()?
    };
    HighestWeight::new(entries).map_err(|e| CliError::Input(e.to_string()))
}

/// Parse `a+bi`, `a`, `bi`, `-i` and the like; whitespace is ignored.
pub fn parse_complex(s: &str) -> Result<Complex64, CliError> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    Complex64::from_str(&compact).map_err(|_| CliError::Input(format!("cannot read {s:?} as a complex number")))
}

pub fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// What a command acts on.
pub enum Target {
    Compact(HighestWeight),
    Principal(PrincipalParams),
}

/// Echo of the parsed inputs, stored in every report.
#[derive(Serialize)]
pub struct RunConfig {
    pub n: Option<usize>,
    pub q: f64,
    pub weight: Option<Vec<i64>>,
    pub c1: Option<String>,
    pub c2: Option<String>,
    pub m0: Option<i64>,
    pub window: u32,
    pub margin: u32,
    pub tol: f64,
    pub seed: u64,
}

impl Common {
    pub fn q(&self) -> Result<QParam, CliError> {
        QParam::new(self.q).map_err(|e| CliError::Input(e.to_string()))
    }

    pub fn window(&self) -> Window {
        Window::symmetric(self.window).with_margin(self.margin)
    }

    fn scaled(&self, z: Complex64, q: &QParam) -> Complex64 {
        match self.im_units {
            ImUnits::Plain => z,
            ImUnits::Pi2h => Complex64::new(z.re, z.im * q.half_period() / 2.0),
        }
    }

    /// Principal series parameters when `--c1` is present, otherwise the
    /// compact weight.
    pub fn target(&self) -> Result<Target, CliError> {
        let q = self.q()?;
        let weight = match &self.weight {
            Some(w) => Some(parse_weight(w)?),
            None => None,
        };
        let Some(c1) = &self.c1 else {
            let w = weight.ok_or_else(|| CliError::Input("need --weight, or --c1 for a principal series".into()))?;
            if let Some(n) = self.n {
                if n != w.len() {
                    return Err(CliError::Input(format!("--n {n} but the weight has {} entries", w.len())));
                }
            }
            return Ok(Target::Compact(w));
        };
        let m = match (weight, self.n) {
            (Some(m), Some(n)) if m.len() + 1 != n => {
                return Err(CliError::Input(format!(
                    "--n {n} needs a weight with {} entries, got {}",
                    n - 1,
                    m.len()
                )))
            }
            (Some(m), _) => m,
            (None, None | Some(1)) => HighestWeight::new(Vec::new()).expect("empty weight"),
            (None, Some(n)) => return Err(CliError::Input(format!("--n {n} needs --weight with {} entries", n - 1))),
        };
        let c1 = self.scaled(parse_complex(c1)?, &q);
        let params = match (&self.c2, self.m0) {
            (Some(c2), m0) => {
                let c2 = self.scaled(parse_complex(c2)?, &q);
                let p = PrincipalParams::new(m, c1, c2).map_err(|e| CliError::Input(e.to_string()))?;
                if let Some(m0) = m0 {
                    if p.m0() != m0 {
                        return Err(CliError::Input(format!("c1 + c2 = {} but --m0 {m0}", p.m0())));
                    }
                }
                p
            }
            (None, Some(m0)) => PrincipalParams::with_sum(m, c1, m0).map_err(|e| CliError::Input(e.to_string()))?,
            (None, None) => return Err(CliError::Input("need --c2 or --m0".into())),
        };
        Ok(Target::Principal(params))
    }

    pub fn config(&self) -> RunConfig {
        RunConfig {
            n: self.n,
            q: self.q,
            weight: self.weight.as_deref().and_then(|w| parse_weight(w).ok()).map(Vec::from),
            c1: self.c1.clone(),
            c2: self.c2.clone(),
            m0: self.m0,
            window: self.window,
            margin: self.margin,
            tol: self.tol,
            seed: self.seed,
        }
    }
}
