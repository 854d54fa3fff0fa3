use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ratpoly::{parse_rational, RationalPoly};

/// Default largest moment index a cache will generate.
pub const DEFAULT_MAX_INDEX: usize = 256;

/// The moment polynomials `T_{n,0}, …, T_{n,K}` for one operator index `n`.
///
/// Stored as the integer polynomials `U_k = n^k·T_{n,k}`; the rational forms are
/// built on first access.
#[derive(Debug, Clone)]
pub struct MomentTable {
    n: u64,
    scaled: Vec<Vec<BigInt>>,
    polys: Vec<OnceLock<RationalPoly>>,
}

impl PartialEq for MomentTable {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.scaled == other.scaled
    }
}

impl Eq for MomentTable {}

/// One step of the moment recurrence:
/// `T_{n,k+1} = z(1+z)/n · T'_{n,k} + (nz+k)/n · T_{n,k}`.
pub fn recurrence_step(n: u64, k: usize, t: &RationalPoly) -> RationalPoly {
    let z_one_plus_z = RationalPoly::from_integers(&[0, 1, 1]);
    let linear = RationalPoly::from_integers(&[k as i64, n as i64]);
    let inv_n = BigRational::new(BigInt::from(1), BigInt::from(n));
    (&(&z_one_plus_z * &t.derivative()) + &(&linear * t)).scale(&inv_n)
}

/// The same step on `U_k = n^k·T_{n,k}`: `U_{k+1} = z(1+z)U'_k + (nz+k)U_k`.
fn scaled_step(n: u64, k: usize, u: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); u.len() + 1];
    for (j, c) in u.iter().enumerate() {
        out[j] += c * BigInt::from(j + k);
        out[j + 1] += c * (BigInt::from(j) + BigInt::from(n));
    }
    out
}

/// Generates `T_{n,0..=max_index}` from `T_{n,0} = 1` by the moment recurrence.
pub fn generate_t(n: u64, max_index: usize) -> Result<MomentTable> {
    let mut table = MomentTable::seed(n)?;
    table.extend_to(max_index);
    Ok(table)
}

impl MomentTable {
    fn seed(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("operator index n must be >= 1".into()));
        }
        Ok(MomentTable {
            n,
            scaled: vec![vec![BigInt::one()]],
            polys: vec![OnceLock::new()],
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Largest generated index `K`.
    pub fn max_index(&self) -> usize {
        self.scaled.len() - 1
    }

    /// All of `T_{n,0..=K}`.
    pub fn polys(&self) -> Vec<&RationalPoly> {
        (0..=self.max_index()).map(|k| self.get(k)).collect()
    }

    /// `T_{n,k}`; panics if `k` exceeds [`MomentTable::max_index`].
    pub fn get(&self, k: usize) -> &RationalPoly {
        self.polys[k].get_or_init(|| {
            let den = BigInt::from(self.n).pow(k as u32);
            RationalPoly::from_coeffs(
                self.scaled[k]
                    .iter()
                    .map(|c| BigRational::new(c.clone(), den.clone()))
                    .collect(),
            )
        })
    }

    /// Integer coefficients of `n^k·T_{n,k}`, lowest power first.
    pub fn scaled(&self, k: usize) -> &[BigInt] {
        &self.scaled[k]
    }

    pub fn extend_to(&mut self, max_index: usize) {
        while self.scaled.len() <= max_index {
            let k = self.scaled.len() - 1;
            let next = scaled_step(self.n, k, &self.scaled[k]);
            self.scaled.push(next);
            self.polys.push(OnceLock::new());
        }
    }

    /// Whether `T_{n,k+1}` is exactly the rational recurrence image of `T_{n,k}`.
    pub fn satisfies_recurrence(&self, k: usize) -> bool {
        k < self.max_index() && &recurrence_step(self.n, k, self.get(k)) == self.get(k + 1)
    }

    pub fn to_json(&self) -> String {
        let doc = MomentTableJson {
            n: self.n,
            max_index: self.max_index(),
            polys: self
                .polys()
                .iter()
                .map(|p| {
                    p.coeffs()
                        .iter()
                        .enumerate()
                        .filter(|(_, c)| !c.is_zero())
                        .map(|(power, c)| (power, format!("{}/{}", c.numer(), c.denom())))
                        .collect()
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("moment table serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: MomentTableJson =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("moment table JSON: {e}")))?;
        if doc.n == 0 || doc.polys.len() != doc.max_index + 1 {
            return Err(Error::Parse("inconsistent n/K in moment table JSON".into()));
        }
        let mut scaled = Vec::with_capacity(doc.polys.len());
        for (k, terms) in doc.polys.iter().enumerate() {
            let scale = BigRational::from_integer(BigInt::from(doc.n).pow(k as u32));
            let mut coeffs = Vec::new();
            for (power, value) in terms {
                if coeffs.len() <= *power {
                    coeffs.resize(power + 1, BigInt::zero());
                }
                let u = parse_rational(value)? * &scale;
                if !u.is_integer() {
                    return Err(Error::Parse(format!(
                        "entry k={k} power={power} is not a moment coefficient"
                    )));
                }
                coeffs[*power] = u.to_integer();
            }
            scaled.push(coeffs);
        }
        let polys = scaled.iter().map(|_| OnceLock::new()).collect();
        Ok(MomentTable {
            n: doc.n,
            scaled,
            polys,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct MomentTableJson {
    n: u64,
    #[serde(rename = "K")]
    max_index: usize,
    polys: Vec<Vec<(usize, String)>>,
}

/// Memoized moment tables keyed by `n`, grown on demand and shared as immutable snapshots.
#[derive(Debug)]
pub struct MomentCache {
    tables: Mutex<HashMap<u64, Arc<MomentTable>>>,
    max_index: usize,
}

impl Default for MomentCache {
    fn default() -> Self {
        Self::new(DEFAULT_MAX_INDEX)
    }
}

impl MomentCache {
    pub fn new(max_index: usize) -> Self {
        MomentCache {
            tables: Mutex::new(HashMap::new()),
            max_index,
        }
    }

    pub fn max_index(&self) -> usize {
        self.max_index
    }

    /// A table for `n` covering at least `T_{n,0..=k}`.
    pub fn table(&self, n: u64, k: usize) -> Result<Arc<MomentTable>> {
        if k > self.max_index {
            return Err(Error::Truncation(format!(
                "moment index {k} exceeds the configured cap {}",
                self.max_index
            )));
        }
        let existing = self.tables.lock().expect("moment cache lock").get(&n).cloned();
        if let Some(t) = &existing {
            if t.max_index() >= k {
                return Ok(t.clone());
            }
        }
        // Grow outside the lock so distinct n can be generated concurrently.
        let mut grown = match existing {
            Some(t) => (*t).clone(),
            None => MomentTable::seed(n)?,
        };
        grown.extend_to(k);
        let grown = Arc::new(grown);
        let mut tables = self.tables.lock().expect("moment cache lock");
        let entry = tables.entry(n).or_insert_with(|| grown.clone());
        if entry.max_index() < grown.max_index() {
            *entry = grown.clone();
        }
        Ok(entry.clone())
    }
}
