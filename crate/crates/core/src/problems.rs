//! Bi-objective benchmark problems exposed on the unit cube.
//!
//! Every problem takes a point in `[0,1]^d`, maps it affinely onto the
//! published variable bounds and applies the published formula. Included:
//! ZDT1-4 and ZDT6, DTLZ1-7 with two objectives, and MMF1, 2, 4, 5, 7, 8 from
//! the CEC 2019 multimodal multi-objective suite.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::Objectives;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Suite {
    Zdt,
    Dtlz,
    Mmf,
}

impl Suite {
    pub const ALL: [Suite; 3] = [Suite::Zdt, Suite::Dtlz, Suite::Mmf];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Zdt => "zdt",
            Suite::Dtlz => "dtlz",
            Suite::Mmf => "mmf",
        }
    }

    pub fn indices(self) -> &'static [u32] {
        match self {
            Suite::Zdt => &[1, 2, 3, 4, 6],
            Suite::Dtlz => &[1, 2, 3, 4, 5, 6, 7],
            Suite::Mmf => &[1, 2, 4, 5, 7, 8],
        }
    }

    pub fn dims(self) -> &'static [usize] {
        match self {
            Suite::Zdt | Suite::Dtlz => &[2, 10],
            Suite::Mmf => &[2],
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::UnknownProblem(s.to_string()))
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A problem and the search-space dimension it is instantiated at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProblemId {
    suite: Suite,
    index: u32,
    dim: usize,
}

impl ProblemId {
    pub fn new(suite: Suite, index: u32, dim: usize) -> Result<Self> {
        let id = Self { suite, index, dim };
        if !suite.indices().contains(&index) || !suite.dims().contains(&dim) {
            return Err(Error::UnknownProblem(id.to_string()));
        }
        Ok(id)
    }

    pub fn suite(&self) -> Suite {
        self.suite
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}-d{}", self.suite, self.index, self.dim)
    }
}

impl FromStr for ProblemId {
    type Err = Error;

    /// Parses `zdt1-d2`, `dtlz3-d10`, `mmf4-d2`.
    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownProblem(s.to_string());
        let (name, dim) = s.split_once("-d").ok_or_else(unknown)?;
        let split = name
            .find(|c: char| c.is_ascii_digit())
            .ok_or_else(unknown)?;
        let suite: Suite = name[..split].parse().map_err(|_| unknown())?;
        let index = name[split..].parse().map_err(|_| unknown())?;
        let dim = dim.parse().map_err(|_| unknown())?;
        ProblemId::new(suite, index, dim)
    }
}

impl Serialize for ProblemId {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ProblemId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Published box constraints of a problem.
#[derive(Debug, Clone, PartialEq)]
pub struct NativeBounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl NativeBounds {
    fn uniform(dim: usize, lower: f64, upper: f64) -> Self {
        Self {
            lower: vec![lower; dim],
            upper: vec![upper; dim],
        }
    }

    fn to_native(&self, x_unit: &[f64]) -> Vec<f64> {
        x_unit
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(u, (lo, hi))| lo + u * (hi - lo))
            .collect()
    }
}

/// Every valid `(suite, index, dim)` combination, in a stable order.
pub fn list_problems() -> Vec<ProblemId> {
    Suite::ALL
        .into_iter()
        .flat_map(|suite| {
            suite.indices().iter().flat_map(move |&index| {
                suite
                    .dims()
                    .iter()
                    .map(move |&dim| ProblemId { suite, index, dim })
            })
        })
        .collect()
}

pub fn native_bounds(id: ProblemId) -> NativeBounds {
    let d = id.dim;
    match (id.suite, id.index) {
        (Suite::Zdt, 4) => {
            let mut b = NativeBounds::uniform(d, -5.0, 5.0);
            b.lower[0] = 0.0;
            b.upper[0] = 1.0;
            b
        }
        (Suite::Zdt, _) | (Suite::Dtlz, _) => NativeBounds::uniform(d, 0.0, 1.0),
        (Suite::Mmf, i) => {
            let (lower, upper) = match i {
                1 | 7 => ([1.0, -1.0], [3.0, 1.0]),
                2 => ([0.0, 0.0], [1.0, 2.0]),
                4 => ([-1.0, 0.0], [1.0, 2.0]),
                5 => ([1.0, -1.0], [3.0, 3.0]),
                8 => ([-PI, 0.0], [PI, 9.0]),
                _ => unreachable!("validated MMF index"),
            };
            NativeBounds {
                lower: lower.to_vec(),
                upper: upper.to_vec(),
            }
        }
    }
}

/// Evaluates problem `id` at a unit-cube point.
pub fn evaluate(id: ProblemId, x_unit: &[f64]) -> Result<Objectives> {
    if x_unit.len() != id.dim {
        return Err(Error::Shape {
            expected: id.dim,
            actual: x_unit.len(),
        });
    }
    let x = native_bounds(id).to_native(x_unit);
    let f = match id.suite {
        Suite::Zdt => zdt(id.index, &x),
        Suite::Dtlz => dtlz(id.index, &x),
        Suite::Mmf => mmf(id.index, &x),
    };
    if !(f[0].is_finite() && f[1].is_finite()) {
        return Err(Error::Numeric(format!("{id} produced {f:?}")));
    }
    Ok(f)
}

fn zdt(index: u32, x: &[f64]) -> Objectives {
    let n = x.len() as f64;
    let tail = &x[1..];
    let x1 = x[0];
    match index {
        1..=3 => {
            let g = 1.0 + 9.0 * tail.iter().sum::<f64>() / (n - 1.0);
            let r = x1 / g;
            let h = match index {
                1 => 1.0 - r.sqrt(),
                2 => 1.0 - r * r,
                _ => 1.0 - r.sqrt() - r * (10.0 * PI * x1).sin(),
            };
            [x1, g * h]
        }
        4 => {
            let g = 1.0
                + 10.0 * (n - 1.0)
                + tail
                    .iter()
                    .map(|v| v * v - 10.0 * (4.0 * PI * v).cos())
                    .sum::<f64>();
            [x1, g * (1.0 - (x1 / g).sqrt())]
        }
        6 => {
            let f1 = 1.0 - (-4.0 * x1).exp() * (6.0 * PI * x1).sin().powi(6);
            let g = 1.0 + 9.0 * (tail.iter().sum::<f64>() / (n - 1.0)).powf(0.25);
            [f1, g * (1.0 - (f1 / g).powi(2))]
        }
        _ => unreachable!("validated ZDT index"),
    }
}

/// Two-objective DTLZ: `x[0]` is the position variable, the remaining
/// `k = d - 1` variables feed `g`.
fn dtlz(index: u32, x: &[f64]) -> Objectives {
    let tail = &x[1..];
    let k = tail.len() as f64;
    let x1 = x[0];
    let rastrigin_g = || {
        100.0
            * (k + tail
                .iter()
                .map(|v| (v - 0.5).powi(2) - (20.0 * PI * (v - 0.5)).cos())
                .sum::<f64>())
    };
    let sphere_g = || tail.iter().map(|v| (v - 0.5).powi(2)).sum::<f64>();
    let circle = |theta: f64, g: f64| [(1.0 + g) * theta.cos(), (1.0 + g) * theta.sin()];
    match index {
        1 => {
            let g = rastrigin_g();
            [0.5 * x1 * (1.0 + g), 0.5 * (1.0 - x1) * (1.0 + g)]
        }
        // with two objectives DTLZ5's theta remapping only touches absent angles
        2 | 5 => circle(x1 * FRAC_PI_2, sphere_g()),
        3 => circle(x1 * FRAC_PI_2, rastrigin_g()),
        4 => circle(x1.powi(100) * FRAC_PI_2, sphere_g()),
        6 => circle(x1 * FRAC_PI_2, tail.iter().map(|v| v.powf(0.1)).sum()),
        7 => {
            let g = 1.0 + 9.0 / k * tail.iter().sum::<f64>();
            let h = 2.0 - x1 / (1.0 + g) * (1.0 + (3.0 * PI * x1).sin());
            [x1, (1.0 + g) * h]
        }
        _ => unreachable!("validated DTLZ index"),
    }
}

fn mmf(index: u32, x: &[f64]) -> Objectives {
    let (x1, x2) = (x[0], x[1]);
    match index {
        1 | 5 | 7 => {
            let t = (x1 - 2.0).abs();
            let base = 1.0 - t.sqrt();
            let wave = (6.0 * PI * t + PI).sin();
            let f2 = match index {
                1 => base + 2.0 * (x2 - wave).powi(2),
                5 => {
                    let shift = if x2 <= 1.0 { 0.0 } else { 2.0 };
                    base + 2.0 * (x2 - shift - wave).powi(2)
                }
                _ => {
                    let amp = 0.3 * t * t * (24.0 * PI * t + 4.0 * PI / SQRT_2).cos() + 0.6 * t;
                    base + (x2 - amp * wave).powi(2)
                }
            };
            [t, f2]
        }
        2 => {
            let x2 = if x2 > 1.0 { x2 - 1.0 } else { x2 };
            let d = x2 - x1.sqrt();
            let f2 = 1.0 - x1.sqrt() + 2.0 * (4.0 * d * d - 2.0 * (20.0 * d * PI / SQRT_2).cos() + 2.0);
            [x1, f2]
        }
        4 => {
            let shift = if x2 < 1.0 { 0.0 } else { 1.0 };
            let f2 = 1.0 - x1 * x1 + 2.0 * (x2 - shift - (PI * x1.abs()).sin()).powi(2);
            [x1.abs(), f2]
        }
        8 => {
            let s = x1.abs().sin();
            let shift = if x2 <= 4.0 { 0.0 } else { 4.0 };
            let f2 = (1.0 - s * s).sqrt() + 2.0 * (x2 - shift - s - x1.abs()).powi(2);
            [s, f2]
        }
        _ => unreachable!("validated MMF index"),
    }
}
