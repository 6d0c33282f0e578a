use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One-year mortality rates `q_{x}, q_{x+1}, …` for an entry age `x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawTable", into = "RawTable")]
pub struct MortalityTable {
    x: u32,
    q: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawTable {
    x: u32,
    q: Vec<f64>,
}

impl TryFrom<RawTable> for MortalityTable {
    type Error = Error;

    fn try_from(raw: RawTable) -> Result<Self> {
        MortalityTable::new(raw.x, raw.q)
    }
}

impl From<MortalityTable> for RawTable {
    fn from(t: MortalityTable) -> Self {
        RawTable { x: t.x, q: t.q }
    }
}

impl MortalityTable {
    pub fn new(x: u32, q: Vec<f64>) -> Result<Self> {
        if let Some((j, r)) = q.iter().enumerate().find(|(_, r)| !(0.0..=1.0).contains(*r)) {
            return Err(Error::InvalidArgument(format!("mortality rate q_{{x+{j}}} = {r} outside [0, 1]")));
        }
        Ok(MortalityTable { x, q })
    }

    pub fn entry_age(&self) -> u32 {
        self.x
    }

    pub fn rates(&self) -> &[f64] {
        &self.q
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    /// Probability of surviving the first `n` years.
    pub fn survival(&self, n: usize) -> f64 {
        self.q[..n].iter().map(|q| 1.0 - q).product()
    }
}

/// Deferred death probabilities `w_i = Π_{j<i}(1 − q_{x+j−1})·q_{x+i−1}`,
/// `i = 1 … n`: the chance of dying in year `i`.
pub fn mortality_weights(table: &MortalityTable, n: usize) -> Result<Vec<f64>> {
    if n > table.len() {
        return Err(Error::InvalidArgument(format!("horizon {n} exceeds table length {}", table.len())));
    }
    let mut alive = 1.0;
    Ok(table.rates()[..n]
        .iter()
        .map(|q| {
            let w = alive * q;
            alive *= 1.0 - q;
            w
        })
        .collect())
}
