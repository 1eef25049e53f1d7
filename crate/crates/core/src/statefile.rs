//! JSON interchange format for densities and factor matrices.
//!
//! ```json
//! {
//!   "version": 1,
//!   "n_sites": 3,
//!   "regions": {"A": [0], "B": [1], "C": [2]},
//!   "matrix": {"dim": 8, "data": [[0.125, 0.0], ...]},
//!   "metadata": {"seed": 7, "generator": "product_markov"}
//! }
//! ```
//!
//! `data` is row-major with one `[re, im]` pair per entry. Factor files use
//! the same layout plus a `"factor"` field naming `x` or `y`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::car::{CarAlgebra, RegionPartition};
use crate::error::{Error, Result};
use crate::quantum_info::StateDensity;
use crate::{CMatrix, Complex, Real, Tolerances};

pub const FORMAT_VERSION: u32 = 1;

/// Largest `n_sites` accepted for file interchange.
pub const MAX_FILE_SITES: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionLists {
    #[serde(rename = "A")]
    pub a: Vec<usize>,
    #[serde(rename = "B")]
    pub b: Vec<usize>,
    #[serde(rename = "C")]
    pub c: Vec<usize>,
}

impl From<&RegionPartition> for RegionLists {
    fn from(r: &RegionPartition) -> Self {
        Self { a: r.a.clone(), b: r.b.clone(), c: r.c.clone() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixBlock {
    pub dim: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixBlock {
    pub fn from_matrix<T: Real>(m: &CMatrix<T>) -> Self {
        let dim = m.nrows();
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for s in 0..dim {
                let z = m[(r, s)];
                data.push([z.re.as_f64(), z.im.as_f64()]);
            }
        }
        Self { dim, data }
    }

    pub fn to_matrix<T: Real>(&self) -> Result<CMatrix<T>> {
        if self.data.len() != self.dim * self.dim {
            return Err(Error::Parse(format!(
                "matrix data has {} entries, expected dim^2 = {}",
                self.data.len(),
                self.dim * self.dim
            )));
        }
        if let Some(k) = self.data.iter().position(|[re, im]| !re.is_finite() || !im.is_finite()) {
            return Err(Error::Parse(format!("non-finite matrix entry at row {}, column {}", k / self.dim, k % self.dim)));
        }
        Ok(CMatrix::from_fn(self.dim, self.dim, |r, s| {
            let [re, im] = self.data[r * self.dim + s];
            Complex::new(T::of(re), T::of(im))
        }))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub version: u32,
    pub n_sites: usize,
    pub regions: RegionLists,
    pub matrix: MatrixBlock,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metadata: Option<Metadata>,
}

impl StateFile {
    pub fn from_state<T: Real>(state: &StateDensity<T>, regions: &RegionPartition, metadata: Option<Metadata>) -> Self {
        Self {
            version: FORMAT_VERSION,
            n_sites: state.n_sites(),
            regions: regions.into(),
            matrix: MatrixBlock::from_matrix(&state.rho),
            metadata,
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("state file serializes")
    }

    /// Checks the header fields and the region partition.
    pub fn regions(&self) -> Result<RegionPartition> {
        check_header(self.version, self.n_sites, &self.matrix)?;
        let r = &self.regions;
        RegionPartition::new(self.n_sites, r.a.clone(), r.b.clone(), r.c.clone())
    }

    /// Validates every file invariant and builds the density.
    pub fn to_state<T: Real>(&self, tol: &Tolerances) -> Result<(StateDensity<T>, RegionPartition)> {
        let regions = self.regions()?;
        let rho = self.matrix.to_matrix::<T>()?;
        let alg = Arc::new(CarAlgebra::new(self.n_sites)?);
        Ok((StateDensity::new(alg, rho, tol)?, regions))
    }
}

fn check_header(version: u32, n_sites: usize, matrix: &MatrixBlock) -> Result<()> {
    if version != FORMAT_VERSION {
        return Err(Error::Parse(format!("unsupported version {version}, expected {FORMAT_VERSION}")));
    }
    if n_sites == 0 || n_sites > MAX_FILE_SITES {
        return Err(Error::Parse(format!("n_sites = {n_sites} outside 1..={MAX_FILE_SITES}")));
    }
    if matrix.dim != 1 << n_sites {
        return Err(Error::Parse(format!("matrix dim {} is not 2^{n_sites}", matrix.dim)));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FactorName {
    X,
    Y,
}

/// One factor of `rho = x y`, stored like a state file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FactorFile {
    pub version: u32,
    pub n_sites: usize,
    pub regions: RegionLists,
    pub factor: FactorName,
    pub matrix: MatrixBlock,
}

impl FactorFile {
    pub fn new<T: Real>(factor: FactorName, m: &CMatrix<T>, regions: &RegionPartition) -> Self {
        Self {
            version: FORMAT_VERSION,
            n_sites: regions.n_sites(),
            regions: regions.into(),
            factor,
            matrix: MatrixBlock::from_matrix(m),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let f: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        check_header(f.version, f.n_sites, &f.matrix)?;
        Ok(f)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("factor file serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::identity;

    fn tracial_file(n: usize) -> StateFile {
        let d = 1 << n;
        let alg = Arc::new(CarAlgebra::<f64>::new(n).unwrap());
        let st = StateDensity::new(alg, identity::<f64>(d) / Complex::new(d as f64, 0.0), &Tolerances::default()).unwrap();
        StateFile::from_state(&st, &RegionPartition::contiguous(1, 1, n - 2).unwrap(), None)
    }

    #[test]
    fn round_trip_is_exact() {
        let f = tracial_file(3);
        let back = StateFile::parse(&f.to_json()).unwrap();
        assert_eq!(back, f);
        let (st, _) = back.to_state::<f64>(&Tolerances::default()).unwrap();
        assert_eq!(st.rho[(0, 0)].re, 0.125);
    }

    #[test]
    fn optional_metadata_is_omitted() {
        let json = tracial_file(3).to_json();
        assert!(!json.contains("metadata"));
    }

    #[test]
    fn wrong_dimension_rejected() {
        let mut f = tracial_file(3);
        f.matrix.dim = 4;
        assert!(matches!(f.regions(), Err(Error::Parse(_))));
    }

    #[test]
    fn short_data_rejected() {
        let mut f = tracial_file(3);
        f.matrix.data.pop();
        assert!(matches!(f.to_state::<f64>(&Tolerances::default()), Err(Error::Parse(_))));
    }

    #[test]
    fn overlapping_regions_rejected() {
        let mut f = tracial_file(3);
        f.regions.b = vec![0];
        assert!(matches!(f.regions(), Err(Error::InvalidRegions(_))));
    }

    #[test]
    fn non_state_rejected() {
        let mut f = tracial_file(3);
        f.matrix.data[0] = [2.0, 0.0];
        assert!(f.to_state::<f64>(&Tolerances::default()).is_err());
    }

    #[test]
    fn syntax_error_carries_position() {
        let err = StateFile::parse("{\n  \"version\": 1,\n  oops\n}").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
    }
}
