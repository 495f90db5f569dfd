//! Sweep axes `var:min:max:count:scale` and their cartesian grid.

use crate::error::CliError;
use nhqa_core::ChainParams;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    J,
    G,
    Delta,
    Tau,
    N,
    Theta,
}

impl Var {
    pub fn name(&self) -> &'static str {
        match self {
            Var::J => "J",
            Var::G => "g",
            Var::Delta => "delta",
            Var::Tau => "tau",
            Var::N => "N",
            Var::Theta => "theta",
        }
    }
}

impl FromStr for Var {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        Ok(match s {
            "J" => Var::J,
            "g" => Var::G,
            "delta" => Var::Delta,
            "tau" => Var::Tau,
            "N" => Var::N,
            "theta" => Var::Theta,
            _ => return Err(CliError::Usage(format!("unknown sweep variable '{s}' (J, g, delta, tau, N, theta)"))),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Lin,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub var: Var,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub scale: Scale,
}

/// A number, `pi`, or a multiple such as `0.5pi`.
pub fn parse_number(s: &str) -> Result<f64, CliError> {
    let s = s.trim();
    let bad = || CliError::Usage(format!("not a number: '{s}'"));
    if let Some(head) = s.strip_suffix("pi") {
        let f = if head.is_empty() { 1.0 } else { head.parse::<f64>().map_err(|_| bad())? };
        return Ok(f * PI);
    }
    s.parse::<f64>().map_err(|_| bad())
}

impl FromStr for Axis {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        let parts: Vec<&str> = s.split(':').collect();
        if !(parts.len() == 4 || parts.len() == 5) {
            return Err(CliError::Usage(format!("sweep '{s}' must look like var:min:max:count[:lin|log]")));
        }
        let var = parts[0].parse()?;
        let min = parse_number(parts[1])?;
        let max = parse_number(parts[2])?;
        let count: usize = parts[3]
            .parse()
            .map_err(|_| CliError::Usage(format!("sweep count '{}' is not a positive integer", parts[3])))?;
        let scale = match parts.get(4).copied().unwrap_or("lin") {
            "lin" | "linear" => Scale::Lin,
            "log" => Scale::Log,
            other => return Err(CliError::Usage(format!("sweep scale '{other}' must be lin or log"))),
        };
        let axis = Axis { var, min, max, count, scale };
        axis.validate()?;
        Ok(axis)
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let scale = match self.scale {
            Scale::Lin => "lin",
            Scale::Log => "log",
        };
        write!(f, "{}:{}:{}:{}:{}", self.var.name(), self.min, self.max, self.count, scale)
    }
}

impl Axis {
    pub fn new(var: Var, min: f64, max: f64, count: usize, scale: Scale) -> Self {
        Axis { var, min, max, count, scale }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(CliError::Usage(format!("sweep {}: bounds must be finite", self.var.name())));
        }
        if self.count < 2 {
            return Err(CliError::Usage(format!("sweep {}: count must be >= 2", self.var.name())));
        }
        if self.scale == Scale::Log && !(self.min > 0.0 && self.max > 0.0) {
            return Err(CliError::Usage(format!("sweep {}: log scale needs positive bounds", self.var.name())));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let s = i as f64 / last;
                let x = match self.scale {
                    Scale::Lin => self.min + (self.max - self.min) * s,
                    Scale::Log => (self.min.ln() + (self.max.ln() - self.min.ln()) * s).exp(),
                };
                if i + 1 == self.count {
                    self.max
                } else if i == 0 {
                    self.min
                } else if self.var == Var::N {
                    // chains need an even number of spins
                    (2.0 * (x / 2.0).round()).max(2.0)
                } else {
                    x
                }
            })
            .collect()
    }
}

/// One grid point: the resolved chain parameters plus the swept coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub params: ChainParams,
    pub theta: Option<f64>,
    pub coords: Vec<f64>,
}

/// Cartesian product of the axes, first axis outermost.
pub fn grid(base: &ChainParams, axes: &[Axis]) -> Result<Vec<Point>, CliError> {
    let mut points = vec![Point { params: *base, theta: None, coords: Vec::new() }];
    for axis in axes {
        let vals = axis.values();
        let mut next = Vec::with_capacity(points.len() * vals.len());
        for p in &points {
            for &x in &vals {
                let mut q = p.clone();
                apply(&mut q, axis.var, x)?;
                q.coords.push(x);
                next.push(q);
            }
        }
        points = next;
    }
    Ok(points)
}

fn apply(p: &mut Point, var: Var, x: f64) -> Result<(), CliError> {
    match var {
        Var::J => p.params.j = x,
        Var::G => p.params.g = x,
        Var::Delta => p.params.delta = x,
        Var::Tau => p.params.tau = x,
        Var::N => {
            if x.fract() != 0.0 || x < 2.0 || x % 2.0 != 0.0 {
                return Err(CliError::Usage(format!("sweep N: {x} is not an even integer >= 2")));
            }
            p.params.n = x as usize;
        }
        Var::Theta => p.theta = Some(x),
    }
    Ok(())
}
