//! Dense complex operators on small Hilbert spaces.
//!
//! Just enough linear algebra for Born-rule evaluation of projector
//! products, spin-1/2 projectors, the two-spin singlet and commutation
//! checks. Projector and density tags are validated on construction.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Complex = Complex64;

/// Frobenius tolerance for projector/density validation and commutation.
pub const OP_TOLERANCE: f64 = 1e-9;
/// Tolerance on Born probabilities.
pub const PROB_TOLERANCE: f64 = 1e-9;

const ZERO: Complex = Complex::new(0.0, 0.0);
const ONE: Complex = Complex::new(1.0, 0.0);

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    entries: Vec<Complex>,
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Operator({}x{})", self.dim, self.dim)?;
        for r in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|c| {
                    let z = self.get(r, c);
                    format!("{:+.4}{:+.4}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl Operator {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "operator dimension must be positive");
        Self {
            dim,
            entries: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = ONE;
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m.entries[i * values.len() + i] = Complex::new(*v, 0.0);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Complex>>) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::InvalidOperator {
                kind: "matrix",
                reason: "empty matrix".into(),
            });
        }
        let mut entries = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            entries.extend(row);
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidOperator {
                kind: "matrix",
                reason: "non-finite entry".into(),
            });
        }
        Ok(Self { dim, entries })
    }

    /// `|v><v|` for an (unnormalized) vector.
    pub fn outer(v: &[Complex]) -> Self {
        let dim = v.len();
        let mut m = Self::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                m.entries[r * dim + c] = v[r] * v[c].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex {
        self.entries[row * self.dim + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[Complex]> {
        self.entries.chunks(self.dim)
    }

    pub fn dagger(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for r in 0..self.dim {
            for c in 0..self.dim {
                m.entries[c * self.dim + r] = self.get(r, c).conj();
            }
        }
        m
    }

    pub fn scale(&self, s: Complex) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> Complex {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let n = self.dim;
        let mut m = Self::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.entries[r * n + k];
                if a == ZERO {
                    continue;
                }
                for c in 0..n {
                    m.entries[r * n + c] += a * other.entries[k * n + c];
                }
            }
        }
        Ok(m)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex, Complex) -> Complex) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        })
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (self - &self.dagger()).frobenius_norm() <= tol
    }

    /// Distance `‖X − Y‖_F`.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.zip_with(other, |a, b| a - b)?.frobenius_norm())
    }

    /// Positive semidefinite up to `tol`: Cholesky of `self + tol·I` succeeds.
    pub fn is_positive_semidefinite(&self, tol: f64) -> bool {
        let n = self.dim;
        let shifted = self + &Operator::identity(n).scale(Complex::new(tol, 0.0));
        let mut l = vec![ZERO; n * n];
        for j in 0..n {
            let mut d = shifted.get(j, j);
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k].conj();
            }
            if d.re <= 0.0 {
                return false;
            }
            let djj = d.re.sqrt();
            l[j * n + j] = Complex::new(djj, 0.0);
            for i in j + 1..n {
                let mut s = shifted.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k].conj();
                }
                l[i * n + j] = s / djj;
            }
        }
        true
    }
}

impl Add for &Operator {
    type Output = Operator;
    fn add(self, rhs: &Operator) -> Operator {
        self.zip_with(rhs, |a, b| a + b).expect("dimension mismatch in add")
    }
}

impl Sub for &Operator {
    type Output = Operator;
    fn sub(self, rhs: &Operator) -> Operator {
        self.zip_with(rhs, |a, b| a - b).expect("dimension mismatch in sub")
    }
}

impl Mul for &Operator {
    type Output = Operator;
    fn mul(self, rhs: &Operator) -> Operator {
        self.try_mul(rhs).expect("dimension mismatch in mul")
    }
}

/// Hermitian idempotent operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector(Operator);

impl Projector {
    pub fn new(op: Operator) -> Result<Self> {
        if !op.is_hermitian(OP_TOLERANCE) {
            return Err(Error::InvalidOperator {
                kind: "projector",
                reason: "not Hermitian".into(),
            });
        }
        let defect = (&(&op * &op) - &op).frobenius_norm();
        if defect > OP_TOLERANCE {
            return Err(Error::InvalidOperator {
                kind: "projector",
                reason: format!("not idempotent (‖P²−P‖ = {defect:.3e})"),
            });
        }
        Ok(Self(op))
    }

    pub fn identity(dim: usize) -> Self {
        Self(Operator::identity(dim))
    }

    /// `I − P`.
    pub fn complement(&self) -> Self {
        Self(&Operator::identity(self.dim()) - &self.0)
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn as_operator(&self) -> &Operator {
        &self.0
    }
}

/// Hermitian, unit-trace, positive semidefinite operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator(Operator);

impl DensityOperator {
    pub fn new(op: Operator) -> Result<Self> {
        let invalid = |reason: String| Error::InvalidOperator {
            kind: "density operator",
            reason,
        };
        if !op.is_hermitian(OP_TOLERANCE) {
            return Err(invalid("not Hermitian".into()));
        }
        let tr = op.trace();
        if (tr - ONE).norm() > OP_TOLERANCE {
            return Err(invalid(format!("trace {} != 1", tr.re)));
        }
        if !op.is_positive_semidefinite(OP_TOLERANCE) {
            return Err(invalid("negative eigenvalue".into()));
        }
        Ok(Self(op))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn as_operator(&self) -> &Operator {
        &self.0
    }
}

/// Unit vector in R³.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinDirection([f64; 3]);

impl SpinDirection {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDirection { norm });
        }
        Ok(Self([x, y, z]))
    }

    /// Polar angle from +z, azimuth from +x.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        Self([theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()])
    }

    /// Direction in the xz-plane at `angle` radians from +z towards +x.
    pub fn in_xz_plane(angle: f64) -> Self {
        Self([angle.sin(), 0.0, angle.cos()])
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    pub fn neg(&self) -> Self {
        Self(self.0.map(|c| -c))
    }

    pub fn angle_to(&self, other: &Self) -> f64 {
        let dot: f64 = self.0.iter().zip(other.0.iter()).map(|(a, b)| a * b).sum();
        dot.clamp(-1.0, 1.0).acos()
    }

    /// Spin-up spinor along this direction (up to phase).
    pub fn spinor_up(&self) -> [Complex; 2] {
        let [x, y, z] = self.0;
        let theta = z.clamp(-1.0, 1.0).acos();
        let phi = y.atan2(x);
        [
            Complex::new((theta / 2.0).cos(), 0.0),
            Complex::from_polar((theta / 2.0).sin(), phi),
        ]
    }

    /// Spin-down spinor along this direction, orthogonal to [`Self::spinor_up`].
    pub fn spinor_down(&self) -> [Complex; 2] {
        let [x, y, z] = self.0;
        let theta = z.clamp(-1.0, 1.0).acos();
        let phi = y.atan2(x);
        [
            -Complex::from_polar((theta / 2.0).sin(), -phi),
            Complex::new((theta / 2.0).cos(), 0.0),
        ]
    }
}

/// Projector `½(I + d·σ)` onto spin-up along `d`.
pub fn spin_projector_up(d: &SpinDirection) -> Projector {
    let [x, y, z] = d.components();
    let half = 0.5;
    let op = Operator {
        dim: 2,
        entries: vec![
            Complex::new(half * (1.0 + z), 0.0),
            Complex::new(half * x, -half * y),
            Complex::new(half * x, half * y),
            Complex::new(half * (1.0 - z), 0.0),
        ],
    };
    Projector(op)
}

/// Kronecker product.
pub fn tensor(x: &Operator, y: &Operator) -> Operator {
    let (n, m) = (x.dim, y.dim);
    let dim = n * m;
    let mut out = Operator::zeros(dim);
    for i in 0..n {
        for j in 0..n {
            let a = x.get(i, j);
            if a == ZERO {
                continue;
            }
            for k in 0..m {
                for l in 0..m {
                    out.entries[(i * m + k) * dim + (j * m + l)] = a * y.get(k, l);
                }
            }
        }
    }
    out
}

pub fn tensor_projectors(x: &Projector, y: &Projector) -> Projector {
    Projector(tensor(&x.0, &y.0))
}

fn kron_vec(a: &[Complex], b: &[Complex]) -> Vec<Complex> {
    a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
}

/// Singlet `(ψ₊⊗ψ₋ − ψ₋⊗ψ₊)/√2` built along `axis`.
pub fn singlet_density_along(axis: &SpinDirection) -> DensityOperator {
    let up = axis.spinor_up();
    let down = axis.spinor_down();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let psi: Vec<Complex> = kron_vec(&up, &down)
        .into_iter()
        .zip(kron_vec(&down, &up))
        .map(|(a, b)| (a - b) * s)
        .collect();
    DensityOperator(Operator::outer(&psi))
}

/// Two-spin singlet state in the z basis ordering (++, +−, −+, −−).
pub fn singlet_density() -> DensityOperator {
    singlet_density_along(&SpinDirection::in_xz_plane(0.0))
}

/// Orthogonal projector onto the span of `vectors` (Gram–Schmidt).
pub fn span_projector(vectors: &[Vec<Complex>]) -> Result<Projector> {
    let dim = vectors
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::InvalidOperator {
            kind: "projector",
            reason: "empty spanning set".into(),
        })?;
    let mut basis: Vec<Vec<Complex>> = Vec::new();
    for v in vectors {
        if v.len() != dim {
            return Err(Error::DimMismatch {
                expected: dim,
                found: v.len(),
            });
        }
        let mut w = v.clone();
        for b in &basis {
            let overlap: Complex = b.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
            for (wi, bi) in w.iter_mut().zip(b) {
                *wi -= overlap * bi;
            }
        }
        let norm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-12 {
            basis.push(w.into_iter().map(|z| z / norm).collect());
        }
    }
    let mut op = Operator::zeros(dim);
    for b in &basis {
        op = &op + &Operator::outer(b);
    }
    Ok(Projector(op))
}

/// Real part of `tr(W · P₁ ⋯ P_k)`.
pub fn born(w: &DensityOperator, projectors: &[&Projector]) -> Result<f64> {
    let mut acc = w.0.clone();
    for p in projectors {
        acc = acc.try_mul(&p.0)?;
    }
    Ok(acc.trace().re)
}

/// `‖XY − YX‖_F ≤ τ_op`.
pub fn commutes(x: &Operator, y: &Operator) -> Result<bool> {
    let xy = x.try_mul(y)?;
    let yx = y.try_mul(x)?;
    Ok((&xy - &yx).frobenius_norm() <= OP_TOLERANCE)
}
