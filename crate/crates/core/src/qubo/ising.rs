use serde::{Deserialize, Serialize};

use super::QuboInstance;
use crate::error::{QfsError, Result};

/// Spin-glass form `Σ_{i<j} aᵢⱼ sᵢ sⱼ + Σᵢ bᵢ sᵢ + c` over spins `sᵢ ∈ {−1, +1}`.
///
/// `a` is stored as a full symmetric matrix with zero diagonal; each unordered
/// pair is counted once in the energy.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingInstance {
    pub n: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: f64,
}

impl IsingInstance {
    pub fn coupling(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    pub fn energy(&self, spins: &[i8]) -> Result<f64> {
        if spins.len() != self.n {
            return Err(QfsError::DimensionMismatch {
                expected: self.n,
                actual: spins.len(),
            });
        }
        if spins.iter().any(|&s| s != 1 && s != -1) {
            return Err(QfsError::InvalidArgument("spins must be ±1".into()));
        }
        let mut e = self.c;
        for i in 0..self.n {
            let si = f64::from(spins[i]);
            e += self.b[i] * si;
            for j in i + 1..self.n {
                e += self.a[i * self.n + j] * si * f64::from(spins[j]);
            }
        }
        Ok(e)
    }
}

/// Spin image of a bit vector: `sᵢ = 1 − 2xᵢ`.
pub fn spins_of(x: &[u8]) -> Vec<i8> {
    x.iter().map(|&b| 1 - 2 * b as i8).collect()
}

impl QuboInstance {
    /// Substitutes `xᵢ = (1 − sᵢ)/2` so that the Ising energy of the spin image
    /// of any `x` equals the QUBO energy of `x`.
    pub fn to_ising(&self) -> IsingInstance {
        let n = self.n();
        let mut a = vec![0.0; n * n];
        let mut b = vec![0.0; n];
        let mut c = self.offset();
        for i in 0..n {
            let row = self.row(i);
            b[i] -= row[i] / 2.0;
            c += row[i] / 2.0;
            for j in 0..n {
                if j == i {
                    continue;
                }
                // the ordered pair (i, j) contributes Qᵢⱼ(1 − sᵢ − sⱼ + sᵢsⱼ)/4
                a[i * n + j] += row[j] / 2.0;
                b[i] -= row[j] / 2.0;
                c += row[j] / 4.0;
            }
        }
        IsingInstance { n, a, b, c }
    }
}

#[derive(Serialize, Deserialize)]
struct IsingFile {
    n: usize,
    a: Vec<(usize, usize, f64)>,
    b: Vec<f64>,
    c: f64,
}

impl Serialize for IsingInstance {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut a = Vec::new();
        for i in 0..self.n {
            for j in i + 1..self.n {
                let v = self.a[i * self.n + j];
                if v != 0.0 {
                    a.push((i, j, v));
                }
            }
        }
        IsingFile {
            n: self.n,
            a,
            b: self.b.clone(),
            c: self.c,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IsingInstance {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let file = IsingFile::deserialize(deserializer)?;
        if file.b.len() != file.n {
            return Err(serde::de::Error::custom(
                "field vector length differs from n",
            ));
        }
        let mut a = vec![0.0; file.n * file.n];
        for (i, j, v) in file.a {
            if i >= file.n || j >= file.n || i == j {
                return Err(serde::de::Error::custom(format!(
                    "bad coupling index ({i}, {j})"
                )));
            }
            a[i * file.n + j] = v;
            a[j * file.n + i] = v;
        }
        Ok(IsingInstance {
            n: file.n,
            a,
            b: file.b,
            c: file.c,
        })
    }
}
