use super::STRUCTURAL_TOL;
use crate::{Error, Result};

/// Transverse polarization index α ∈ {1, 2}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarization {
    First,
    Second,
}

impl Polarization {
    pub fn from_index(index: u8) -> Result<Self> {
        match index {
            1 => Ok(Polarization::First),
            2 => Ok(Polarization::Second),
            other => Err(Error::InvalidArgument(format!(
                "polarization index must be 1 or 2, got {other}"
            ))),
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Polarization::First => 1,
            Polarization::Second => 2,
        }
    }
}

/// A plane-wave mode of the massless field: wave vector, ω = |k|, and a
/// transverse polarization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldMode {
    k_vec: [f64; 3],
    omega: f64,
    polarization: Polarization,
    epsilon: [f64; 3],
}

impl FieldMode {
    pub fn new(k_vec: [f64; 3], polarization: Polarization) -> Result<Self> {
        if k_vec.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("wave vector must be finite".into()));
        }
        let omega = norm(k_vec);
        if omega == 0.0 {
            return Err(Error::InvalidArgument(
                "wave vector must be nonzero (omega = |k| > 0)".into(),
            ));
        }
        let k_hat = scale(k_vec, 1.0 / omega);
        // Reference axis: the Cartesian axis least aligned with k.
        let axis = (0..3)
            .min_by(|&a, &b| k_hat[a].abs().total_cmp(&k_hat[b].abs()))
            .unwrap_or(0);
        let mut reference = [0.0; 3];
        reference[axis] = 1.0;
        let e1 = normalized(cross(k_hat, reference));
        let epsilon = match polarization {
            Polarization::First => e1,
            Polarization::Second => normalized(cross(k_hat, e1)),
        };
        debug_assert!(dot(epsilon, k_vec).abs() <= STRUCTURAL_TOL * omega.max(1.0));
        Ok(Self {
            k_vec,
            omega,
            polarization,
            epsilon,
        })
    }

    pub fn k_vec(&self) -> [f64; 3] {
        self.k_vec
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn polarization(&self) -> Polarization {
        self.polarization
    }

    /// Real unit polarization vector ε⃗^(α), orthogonal to k.
    pub fn polarization_vector(&self) -> [f64; 3] {
        self.epsilon
    }

    /// Plane-wave phase k·x − ωt.
    pub fn phase(&self, point: &SpacetimePoint) -> f64 {
        dot(self.k_vec, point.x) - self.omega * point.t
    }
}

/// A point (t, x⃗) in Minkowski space.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SpacetimePoint {
    pub t: f64,
    pub x: [f64; 3],
}

impl SpacetimePoint {
    pub fn new(t: f64, x: [f64; 3]) -> Self {
        Self { t, x }
    }

    pub fn origin() -> Self {
        Self::default()
    }
}

/// Ordered, nonempty list of distinct field modes.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeBasis {
    modes: Vec<FieldMode>,
}

impl ModeBasis {
    pub fn new(modes: Vec<FieldMode>) -> Result<Self> {
        if modes.is_empty() {
            return Err(Error::InvalidArgument("mode basis must not be empty".into()));
        }
        for (i, a) in modes.iter().enumerate() {
            if modes[..i]
                .iter()
                .any(|b| b.k_vec == a.k_vec && b.polarization == a.polarization)
            {
                return Err(Error::InvalidArgument(format!(
                    "mode {i} duplicates an earlier mode"
                )));
            }
        }
        Ok(Self { modes })
    }

    /// `count` distinct modes with |k| = `k_abs` spread over the sphere on a
    /// Fibonacci lattice, alternating polarization.
    pub fn on_sphere(count: usize, k_abs: f64) -> Result<Self> {
        if !(k_abs > 0.0 && k_abs.is_finite()) {
            return Err(Error::InvalidArgument("k_abs must be positive".into()));
        }
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        let modes = (0..count)
            .map(|i| {
                let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
                let r = (1.0 - z * z).sqrt();
                let phi = golden * i as f64;
                let k = [k_abs * r * phi.cos(), k_abs * r * phi.sin(), k_abs * z];
                let pol = if i % 2 == 0 {
                    Polarization::First
                } else {
                    Polarization::Second
                };
                FieldMode::new(k, pol)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(modes)
    }

    pub fn modes(&self) -> &[FieldMode] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }
}

pub(crate) fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

fn scale(a: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn normalized(a: [f64; 3]) -> [f64; 3] {
    scale(a, 1.0 / norm(a))
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}
