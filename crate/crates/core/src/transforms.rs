//! Bijective transformations of the unit cube `[0,1]^d` onto itself.
//!
//! Two families are provided besides the identity:
//!
//! * **Beta-CDF warping** applies `I_x(alpha, beta)` to every coordinate with
//!   one shared shape pair. It keeps axis-aligned structure but moves volume.
//! * **Sphered rotation** centers the cube, maps each `inf`-norm shell radially
//!   onto the Euclidean sphere of the same radius, rotates, and maps back. The
//!   result is a bijection that preserves every shell `||2x - 1||_inf = r` and
//!   reduces to a plain signed permutation for right-angle rotations.

use std::fmt;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::specfun::{inv_reg_inc_beta, reg_inc_beta, ShapeParams};

/// Largest rounding excursion outside the cube that is silently clamped.
pub const CLAMP_TOLERANCE: f64 = 1e-12;

const ORTHOGONALITY_TOL: f64 = 1e-12;
const DETERMINANT_TOL: f64 = 1e-10;

/// A proper rotation: a `dim x dim` orthogonal matrix with determinant +1.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationMatrix {
    dim: usize,
    /// Row-major.
    entries: Vec<f64>,
}

impl RotationMatrix {
    /// Validates orthogonality and `det = +1`.
    pub fn new(dim: usize, entries: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Parameter("rotation dimension must be positive".into()));
        }
        if entries.len() != dim * dim {
            return Err(Error::Shape {
                expected: dim * dim,
                actual: entries.len(),
            });
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parameter("rotation entries must be finite".into()));
        }
        let m = Self { dim, entries };
        let orth = m.orthogonality_error();
        if orth > ORTHOGONALITY_TOL {
            return Err(Error::Parameter(format!(
                "matrix is not orthogonal (max |R^T R - I| = {orth:e})"
            )));
        }
        let det = m.determinant();
        if (det - 1.0).abs() > DETERMINANT_TOL {
            return Err(Error::Parameter(format!(
                "matrix is not a proper rotation (det = {det})"
            )));
        }
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::Shape {
                expected: dim,
                actual: bad.len(),
            });
        }
        Self::new(dim, rows.concat())
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![0.0; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = 1.0;
        }
        Self { dim, entries }
    }

    /// Counter-clockwise planar rotation by `angle` radians.
    pub fn planar(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self {
            dim: 2,
            entries: vec![c, -s, s, c],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.dim + col]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.dim).map(<[f64]>::to_vec).collect()
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.dim)
    }

    /// `max_ij |(R^T R - I)_ij|`.
    pub fn orthogonality_error(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = (0..n).map(|k| self.get(k, i) * self.get(k, j)).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    pub fn determinant(&self) -> f64 {
        DMatrix::from_row_slice(self.dim, self.dim, &self.entries).determinant()
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        let mut entries = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                entries[j * n + i] = self.get(i, j);
            }
        }
        Self { dim: n, entries }
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.entries
            .chunks(self.dim)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    fn apply_transposed(&self, v: &[f64]) -> Vec<f64> {
        let n = self.dim;
        (0..n)
            .map(|j| (0..n).map(|i| self.get(i, j) * v[i]).sum())
            .collect()
    }
}

/// Haar-distributed element of `SO(dim)`, deterministic in `seed`.
///
/// QR of a standard Gaussian matrix with the signs of `diag(R)` folded into
/// `Q` (Haar on `O(dim)`), then one column negated if the determinant is -1.
pub fn random_rotation(dim: usize, seed: u64) -> Result<RotationMatrix> {
    if dim < 2 {
        return Err(Error::Parameter(format!(
            "random rotations need dim >= 2, got {dim}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gaussian = DMatrix::<f64>::from_fn(dim, dim, |_, _| StandardNormal.sample(&mut rng));
    let qr = gaussian.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    let entries = (0..dim)
        .flat_map(|i| (0..dim).map(move |j| (i, j)))
        .map(|(i, j)| q[(i, j)])
        .collect();
    RotationMatrix::new(dim, entries)
}

/// Where a sphered rotation's matrix came from; kept so specs round-trip
/// through configuration files and descriptor labels.
#[derive(Debug, Clone, PartialEq)]
pub enum RotationSource {
    Seed(u64),
    Angle(f64),
    Matrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpheredRotation {
    matrix: RotationMatrix,
    source: RotationSource,
}

impl SpheredRotation {
    pub fn from_seed(dim: usize, seed: u64) -> Result<Self> {
        Ok(Self {
            matrix: random_rotation(dim, seed)?,
            source: RotationSource::Seed(seed),
        })
    }

    pub fn from_angle(angle: f64) -> Result<Self> {
        if !angle.is_finite() {
            return Err(Error::Parameter(format!("rotation angle must be finite, got {angle}")));
        }
        Ok(Self {
            matrix: RotationMatrix::planar(angle),
            source: RotationSource::Angle(angle),
        })
    }

    pub fn from_matrix(matrix: RotationMatrix) -> Self {
        Self {
            matrix,
            source: RotationSource::Matrix,
        }
    }

    pub fn matrix(&self) -> &RotationMatrix {
        &self.matrix
    }

    pub fn source(&self) -> &RotationSource {
        &self.source
    }
}

/// A single transformation of one space of a problem instance.
#[derive(Debug, Clone, PartialEq)]
pub enum TransformSpec {
    Identity,
    BetaCdf(ShapeParams),
    SpheredRotation(SpheredRotation),
}

/// Coarse classification used by reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TransformKind {
    Identity,
    BetaCdf,
    SpheredRotation,
}

impl TransformSpec {
    pub fn beta_cdf(alpha: f64, beta: f64) -> Result<Self> {
        Ok(TransformSpec::BetaCdf(ShapeParams::new(alpha, beta)?))
    }

    pub fn rotation_seed(dim: usize, seed: u64) -> Result<Self> {
        Ok(TransformSpec::SpheredRotation(SpheredRotation::from_seed(dim, seed)?))
    }

    pub fn rotation_angle(angle: f64) -> Result<Self> {
        Ok(TransformSpec::SpheredRotation(SpheredRotation::from_angle(angle)?))
    }

    pub fn rotation_matrix(matrix: RotationMatrix) -> Self {
        TransformSpec::SpheredRotation(SpheredRotation::from_matrix(matrix))
    }

    pub fn kind(&self) -> TransformKind {
        match self {
            TransformSpec::Identity => TransformKind::Identity,
            TransformSpec::BetaCdf(_) => TransformKind::BetaCdf,
            TransformSpec::SpheredRotation(_) => TransformKind::SpheredRotation,
        }
    }

    pub fn shape(&self) -> Option<ShapeParams> {
        match self {
            TransformSpec::BetaCdf(p) => Some(*p),
            _ => None,
        }
    }

    /// Dimension the transform is bound to, if any.
    pub fn dim(&self) -> Option<usize> {
        match self {
            TransformSpec::SpheredRotation(r) => Some(r.matrix.dim()),
            _ => None,
        }
    }

    /// Whether the transform is the identity map by construction
    /// (`Identity`, `BetaCdf(1, 1)`, or rotation by `I`).
    pub fn is_neutral(&self) -> bool {
        match self {
            TransformSpec::Identity => true,
            TransformSpec::BetaCdf(p) => p.is_uniform(),
            TransformSpec::SpheredRotation(r) => r.matrix.is_identity(),
        }
    }

    /// Short token used inside instance descriptors, e.g. `beta-a0.5-b2`.
    pub fn label(&self) -> String {
        match self {
            TransformSpec::Identity => "id".into(),
            TransformSpec::BetaCdf(p) => format!("beta-a{}-b{}", p.alpha(), p.beta()),
            TransformSpec::SpheredRotation(r) => match r.source {
                RotationSource::Seed(s) => format!("rot-seed{s}"),
                RotationSource::Angle(a) => format!("rot-angle{a}"),
                RotationSource::Matrix => "rot-matrix".into(),
            },
        }
    }

    /// Parses either a descriptor label (`id`, `beta-a0.5-b2`, `rot-seed3`,
    /// `rot-angle0.785`) or the JSON form. Rotation seeds need `dim`.
    pub fn parse(text: &str, dim: usize) -> Result<Self> {
        let text = text.trim();
        if text.starts_with('{') {
            let spec: TransformSpec = serde_json::from_str(text)
                .map_err(|e| Error::Config(format!("bad transform JSON {text:?}: {e}")))?;
            if let Some(d) = spec.dim() {
                if d != dim {
                    return Err(Error::Shape {
                        expected: dim,
                        actual: d,
                    });
                }
            }
            return Ok(spec);
        }
        let bad = || Error::Config(format!("unrecognized transform label {text:?}"));
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
        if text == "id" || text == "identity" {
            Ok(TransformSpec::Identity)
        } else if let Some(rest) = text.strip_prefix("beta-a") {
            let (a, b) = rest.split_once("-b").ok_or_else(bad)?;
            Self::beta_cdf(num(a)?, num(b)?)
        } else if let Some(seed) = text.strip_prefix("rot-seed") {
            Self::rotation_seed(dim, seed.parse().map_err(|_| bad())?)
        } else if let Some(angle) = text.strip_prefix("rot-angle") {
            if dim != 2 {
                return Err(Error::Shape {
                    expected: 2,
                    actual: dim,
                });
            }
            Self::rotation_angle(num(angle)?)
        } else {
            Err(bad())
        }
    }

    /// Maps an algorithm-space point into the base problem's unit cube.
    pub fn apply_forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_point(x)?;
        let y = match self {
            TransformSpec::Identity => x.to_vec(),
            TransformSpec::BetaCdf(p) => x
                .iter()
                .map(|&v| reg_inc_beta(v, *p))
                .collect::<Result<_>>()?,
            TransformSpec::SpheredRotation(r) => sphered(x, &r.matrix, false)?,
        };
        clamp_to_cube(y)
    }

    /// Exact inverse of [`apply_forward`](Self::apply_forward).
    pub fn apply_inverse(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_point(y)?;
        let x = match self {
            TransformSpec::Identity => y.to_vec(),
            TransformSpec::BetaCdf(p) => y
                .iter()
                .map(|&v| inv_reg_inc_beta(v, *p))
                .collect::<Result<_>>()?,
            TransformSpec::SpheredRotation(r) => sphered(y, &r.matrix, true)?,
        };
        clamp_to_cube(x)
    }
}

impl fmt::Display for TransformSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

fn check_point(x: &[f64]) -> Result<()> {
    if let Some(v) = x.iter().find(|v| !v.is_finite() || !(0.0..=1.0).contains(*v)) {
        return Err(Error::Domain(format!("coordinate {v} outside [0, 1]")));
    }
    Ok(())
}

fn clamp_to_cube(mut x: Vec<f64>) -> Result<Vec<f64>> {
    for v in &mut x {
        if !v.is_finite() {
            return Err(Error::Numeric(format!("transform produced {v}")));
        }
        let clamped = v.clamp(0.0, 1.0);
        if (clamped - *v).abs() > CLAMP_TOLERANCE {
            return Err(Error::Numeric(format!(
                "transform left the unit cube by {:e}",
                (clamped - *v).abs()
            )));
        }
        *v = clamped;
    }
    Ok(x)
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

fn two_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Cube -> ball -> rotate -> ball -> cube. With `transpose` the rotation is
/// replaced by its inverse, which inverts the whole map.
fn sphered(x: &[f64], rot: &RotationMatrix, transpose: bool) -> Result<Vec<f64>> {
    if x.len() != rot.dim() {
        return Err(Error::Shape {
            expected: rot.dim(),
            actual: x.len(),
        });
    }
    let z: Vec<f64> = x.iter().map(|v| 2.0 * v - 1.0).collect();
    let radius = inf_norm(&z);
    if radius == 0.0 {
        return Ok(x.to_vec());
    }
    let to_ball = radius / two_norm(&z);
    let u: Vec<f64> = z.iter().map(|v| v * to_ball).collect();
    let v = if transpose {
        rot.apply_transposed(&u)
    } else {
        rot.apply(&u)
    };
    let to_cube = two_norm(&v) / inf_norm(&v);
    Ok(v.iter().map(|c| (c * to_cube + 1.0) / 2.0).collect())
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum TransformRepr {
    Identity,
    BetaCdf {
        alpha: f64,
        beta: f64,
    },
    SpheredRotation {
        dim: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        angle: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        matrix: Option<Vec<Vec<f64>>>,
    },
}

impl TransformRepr {
    fn into_spec(self) -> Result<TransformSpec> {
        match self {
            TransformRepr::Identity => Ok(TransformSpec::Identity),
            TransformRepr::BetaCdf { alpha, beta } => TransformSpec::beta_cdf(alpha, beta),
            TransformRepr::SpheredRotation {
                dim,
                seed,
                angle,
                matrix,
            } => match (seed, angle, matrix) {
                (Some(seed), None, None) => TransformSpec::rotation_seed(dim, seed),
                (None, Some(angle), None) if dim == 2 => TransformSpec::rotation_angle(angle),
                (None, Some(_), None) => Err(Error::Config(
                    "rotation by angle is only defined for dim = 2".into(),
                )),
                (None, None, Some(rows)) => {
                    let m = RotationMatrix::from_rows(&rows)?;
                    if m.dim() != dim {
                        return Err(Error::Shape {
                            expected: dim,
                            actual: m.dim(),
                        });
                    }
                    Ok(TransformSpec::rotation_matrix(m))
                }
                _ => Err(Error::Config(
                    "sphered_rotation needs exactly one of seed, angle, matrix".into(),
                )),
            },
        }
    }
}

impl From<&TransformSpec> for TransformRepr {
    fn from(spec: &TransformSpec) -> Self {
        match spec {
            TransformSpec::Identity => TransformRepr::Identity,
            TransformSpec::BetaCdf(p) => TransformRepr::BetaCdf {
                alpha: p.alpha(),
                beta: p.beta(),
            },
            TransformSpec::SpheredRotation(r) => {
                let dim = r.matrix.dim();
                let (seed, angle, matrix) = match r.source {
                    RotationSource::Seed(s) => (Some(s), None, None),
                    RotationSource::Angle(a) => (None, Some(a), None),
                    RotationSource::Matrix => (None, None, Some(r.matrix.rows())),
                };
                TransformRepr::SpheredRotation {
                    dim,
                    seed,
                    angle,
                    matrix,
                }
            }
        }
    }
}

impl Serialize for TransformSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        TransformRepr::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TransformSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        TransformRepr::deserialize(deserializer)?
            .into_spec()
            .map_err(serde::de::Error::custom)
    }
}
