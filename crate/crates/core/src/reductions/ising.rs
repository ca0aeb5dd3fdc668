use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::rational::{self, int, Rational};

/// How a spin configuration is read back as a set of chosen variables.
///
/// `Plus` reads `x_i = (1 + s_i)/2`: variables with `s_i = +1` (qubit bit 0)
/// are selected. `Minus` reads `x_i = (1 − s_i)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BitConvention {
    Plus,
    Minus,
}

/// Diagonal problem Hamiltonian `Σ h_i σ^z_i + Σ J_ij σ^z_i σ^z_j` with exact
/// rational coefficients.
///
/// `energy_unit` is the factor between this energy and the cost function the
/// model was reduced from (4 for the MIS form, whose energy is `−4Y + const`;
/// 2 for the clause-violation form). It only affects quantities reported in
/// cost units.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsingModel {
    fields: Vec<Rational>,
    couplings: Vec<(usize, usize, Rational)>,
    convention: BitConvention,
    energy_unit: Rational,
}

/// Qubit values of a basis index, bit `i` first.
pub fn bits_of(index: u64, n: usize) -> Vec<u8> {
    (0..n).map(|i| ((index >> i) & 1) as u8).collect()
}

pub fn index_of(bits: &[u8]) -> u64 {
    bits.iter()
        .enumerate()
        .fold(0u64, |acc, (i, &b)| acc | (u64::from(b != 0) << i))
}

impl IsingModel {
    pub fn new(
        n: usize,
        fields: Vec<Rational>,
        couplings: impl IntoIterator<Item = (usize, usize, Rational)>,
        convention: BitConvention,
    ) -> Result<Self> {
        if n == 0 || n > 63 {
            return Err(Error::InvalidInput(format!("spin count {n} must be in 1..=63")));
        }
        if fields.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: fields.len(),
            });
        }
        let mut list: Vec<(usize, usize, Rational)> = Vec::new();
        for (i, j, v) in couplings {
            for k in [i, j] {
                if k >= n {
                    return Err(Error::VertexOutOfRange { vertex: k, n });
                }
            }
            if i == j {
                return Err(Error::InvalidInput(format!("coupling of spin {i} with itself")));
            }
            list.push((i.min(j), i.max(j), v));
        }
        list.sort_by_key(|&(i, j, _)| (i, j));
        if list.windows(2).any(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::InvalidInput("duplicate coupling".into()));
        }
        Ok(Self {
            fields,
            couplings: list,
            convention,
            energy_unit: int(1),
        })
    }

    pub fn with_energy_unit(mut self, unit: Rational) -> Result<Self> {
        if unit <= int(0) {
            return Err(Error::InvalidInput("energy unit must be positive".into()));
        }
        self.energy_unit = unit;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.fields.len()
    }

    pub fn fields(&self) -> &[Rational] {
        &self.fields
    }

    pub fn couplings(&self) -> &[(usize, usize, Rational)] {
        &self.couplings
    }

    pub fn coupling(&self, i: usize, j: usize) -> Option<Rational> {
        let key = (i.min(j), i.max(j));
        self.couplings
            .binary_search_by_key(&key, |&(a, b, _)| (a, b))
            .ok()
            .map(|pos| self.couplings[pos].2)
    }

    pub fn convention(&self) -> BitConvention {
        self.convention
    }

    pub fn energy_unit(&self) -> Rational {
        self.energy_unit
    }

    /// The same physics written in the other bit convention: `s → −s`
    /// negates the fields and leaves the couplings alone.
    pub fn to_opposite_convention(&self) -> Self {
        Self {
            fields: self.fields.iter().map(|h| -*h).collect(),
            couplings: self.couplings.clone(),
            convention: match self.convention {
                BitConvention::Plus => BitConvention::Minus,
                BitConvention::Minus => BitConvention::Plus,
            },
            energy_unit: self.energy_unit,
        }
    }

    /// `σ^z` eigenvalue of spin `i` in a basis index: bit 0 is `+1`.
    pub fn spin(index: u64, i: usize) -> i64 {
        if (index >> i) & 1 == 0 {
            1
        } else {
            -1
        }
    }

    /// `E(s) = Σ h_i s_i + Σ J_ij s_i s_j`, evaluated exactly.
    pub fn energy_exact(&self, index: u64) -> Rational {
        let mut e = int(0);
        for (i, h) in self.fields.iter().enumerate() {
            e += *h * Self::spin(index, i);
        }
        for &(i, j, v) in &self.couplings {
            e += v * (Self::spin(index, i) * Self::spin(index, j));
        }
        e
    }

    /// Fields and couplings over a common denominator, for exact integer
    /// evaluation of energies. Returns `(denominator, fields, couplings)`.
    pub fn integer_form(&self) -> Result<(i64, Vec<i64>, Vec<(usize, usize, i64)>)> {
        let den = rational::common_denominator(
            self.fields.iter().chain(self.couplings.iter().map(|(_, _, v)| v)),
        );
        let scale = |r: &Rational| -> Result<i64> {
            r.numer()
                .checked_mul(den / r.denom())
                .ok_or_else(|| Error::InvalidInput("coefficients too large for exact evaluation".into()))
        };
        let fields = self.fields.iter().map(scale).collect::<Result<Vec<_>>>()?;
        let couplings = self
            .couplings
            .iter()
            .map(|(i, j, v)| scale(v).map(|v| (*i, *j, v)))
            .collect::<Result<Vec<_>>>()?;
        let bound: i128 = fields.iter().map(|v| (*v as i128).abs()).sum::<i128>()
            + couplings.iter().map(|(_, _, v)| (*v as i128).abs()).sum::<i128>();
        if bound > i64::MAX as i128 / 4 {
            return Err(Error::InvalidInput("coefficients too large for exact evaluation".into()));
        }
        Ok((den, fields, couplings))
    }

    pub fn to_json(&self) -> Result<String> {
        let mut doc = json!({
            "n": self.n(),
            "h": self.fields.iter().map(rational::format_exact).collect::<Vec<_>>(),
            "J": self
                .couplings
                .iter()
                .map(|(i, j, v)| json!([i, j, rational::format_exact(v)]))
                .collect::<Vec<_>>(),
            "bit_convention": self.convention,
        });
        if self.energy_unit != int(1) {
            doc["energy_unit"] = json!(rational::format_exact(&self.energy_unit));
        }
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Value = serde_json::from_str(text)?;
        let bad = |m: &str| Error::InvalidInput(format!("Ising file: {m}"));
        let n = doc["n"].as_u64().ok_or_else(|| bad("missing integer \"n\""))? as usize;
        let parse_value = |v: &Value| -> Result<Rational> {
            match v {
                Value::String(s) => rational::parse_rational(s),
                Value::Number(num) => rational::parse_rational(&num.to_string()),
                _ => Err(bad("coefficients must be numbers or strings")),
            }
        };
        let fields = doc["h"]
            .as_array()
            .ok_or_else(|| bad("missing array \"h\""))?
            .iter()
            .map(parse_value)
            .collect::<Result<Vec<_>>>()?;
        let mut couplings = Vec::new();
        for entry in doc["J"].as_array().ok_or_else(|| bad("missing array \"J\""))? {
            let triple = entry.as_array().filter(|t| t.len() == 3).ok_or_else(|| bad("J entries are [i, j, value]"))?;
            let i = triple[0].as_u64().ok_or_else(|| bad("J index"))? as usize;
            let j = triple[1].as_u64().ok_or_else(|| bad("J index"))? as usize;
            couplings.push((i, j, parse_value(&triple[2])?));
        }
        let convention = match doc.get("bit_convention") {
            None | Some(Value::Null) => BitConvention::Plus,
            Some(v) => serde_json::from_value(v.clone())?,
        };
        let model = Self::new(n, fields, couplings, convention)?;
        match doc.get("energy_unit") {
            None | Some(Value::Null) => Ok(model),
            Some(v) => model.with_energy_unit(parse_value(v)?),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn store(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }
}
