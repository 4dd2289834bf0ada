//! On-disk summary format.
//!
//! ```json
//! {"format_version":1,"n":6,"k":2,"membership":[0,0,0,1,1,1],
//!  "densities":[5.0000000000000000e-1,0.0000000000000000e0,5.0000000000000000e-1],
//!  "meta":{...}}
//! ```
//!
//! `densities` holds the upper triangle of the `k × k` density matrix row by
//! row, each value written with 17 significant digits.

use std::path::Path;

use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;
use specsumm::summary::{Membership, Summary};

use crate::CliError;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryFile {
    pub format_version: u32,
    pub n: usize,
    pub k: usize,
    pub membership: Vec<usize>,
    #[serde(serialize_with = "write_densities")]
    pub densities: Vec<f64>,
    #[serde(default)]
    pub meta: Meta,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    /// SHA-256 of the graph file the summary was built from.
    #[serde(default)]
    pub source_hash: String,
    #[serde(default)]
    pub d: usize,
    #[serde(default)]
    pub relax_method: String,
    #[serde(default)]
    pub seeds: Seeds,
    #[serde(default)]
    pub params: Params,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Seeds {
    pub master: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Params {
    /// The summary covers the largest connected component only.
    #[serde(default)]
    pub lcc: bool,
    #[serde(default)]
    pub reassign_rounds: usize,
    #[serde(default)]
    pub reassign_samples: usize,
    #[serde(default)]
    pub kmeans_batch_size: usize,
    #[serde(default)]
    pub kmeans_max_iterations: usize,
    #[serde(default)]
    pub ocsa_max_iterations: usize,
}

fn write_densities<S: Serializer>(values: &[f64], s: S) -> Result<S::Ok, S::Error> {
    let raw: Vec<Box<RawValue>> = values
        .iter()
        .map(|x| RawValue::from_string(format_density(*x)))
        .collect::<Result<_, _>>()
        .map_err(serde::ser::Error::custom)?;
    raw.serialize(s)
}

/// Decimal with 17 significant digits.
pub fn format_density(x: f64) -> String {
    format!("{x:.16e}")
}

impl SummaryFile {
    pub fn from_summary(summary: &Summary, meta: Meta) -> SummaryFile {
        let k = summary.k();
        let mut densities = Vec::with_capacity(k * (k + 1) / 2);
        for i in 0..k {
            for j in i..k {
                densities.push(summary.density(i, j));
            }
        }
        SummaryFile {
            format_version: FORMAT_VERSION,
            n: summary.node_count(),
            k,
            membership: summary.membership().assignment().to_vec(),
            densities,
            meta,
        }
    }

    /// Rebuilds the summary, checking the version and every size.
    pub fn to_summary(&self) -> Result<Summary, CliError> {
        if self.format_version != FORMAT_VERSION {
            return Err(CliError::Format(format!(
                "unsupported format_version {} (expected {FORMAT_VERSION})",
                self.format_version
            )));
        }
        if self.membership.len() != self.n {
            return Err(CliError::Format(format!(
                "membership has {} entries for n = {}",
                self.membership.len(),
                self.n
            )));
        }
        let k = self.k;
        if self.densities.len() != k * (k + 1) / 2 {
            return Err(CliError::Format(format!(
                "densities has {} entries, expected {} for k = {k}",
                self.densities.len(),
                k * (k + 1) / 2
            )));
        }
        let membership = Membership::new(self.membership.clone(), k)?;
        let mut full = vec![0.0; k * k];
        let mut it = self.densities.iter();
        for i in 0..k {
            for j in i..k {
                let d = *it.next().expect("length checked");
                full[i * k + j] = d;
                full[j * k + i] = d;
            }
        }
        Ok(Summary::from_parts(membership, full)?)
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let mut s = serde_json::to_string(self).map_err(|e| CliError::Format(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<SummaryFile, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Format(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<SummaryFile, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        SummaryFile::from_json(&text)
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, self.to_json()?).map_err(|e| CliError::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use specsumm::summary::build_summary;
    use specsumm::Graph;

    #[test]
    fn density_text_round_trips() {
        for x in [0.0, 1.0, 0.5, 1.0 / 3.0, 2.0 / 7.0, 1e-300, 0.1 + 0.2] {
            let s = format_density(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
        assert_eq!(format_density(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn file_round_trip_is_byte_identical() {
        let g = Graph::from_edges(7, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (5, 6), (3, 6)]).unwrap();
        let m = Membership::new(vec![0, 0, 0, 1, 2, 1, 2], 3).unwrap();
        let s = build_summary(&g, &m).unwrap();
        let file = SummaryFile::from_summary(&s, Meta::default());
        let text = file.to_json().unwrap();
        let back = SummaryFile::from_json(&text).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.to_json().unwrap(), text);
        assert_eq!(back.to_summary().unwrap(), s);
    }

    #[test]
    fn rejects_bad_files() {
        let ok = r#"{"format_version":1,"n":3,"k":1,"membership":[0,0,0],"densities":[1.0e-1]}"#;
        assert!(SummaryFile::from_json(ok).unwrap().to_summary().is_ok());
        for bad in [
            r#"{"format_version":2,"n":3,"k":1,"membership":[0,0,0],"densities":[0.1]}"#,
            r#"{"format_version":1,"n":3,"k":1,"membership":[0,0],"densities":[0.1]}"#,
            r#"{"format_version":1,"n":3,"k":2,"membership":[0,0,1],"densities":[0.1]}"#,
            r#"{"format_version":1,"n":3,"k":1,"membership":[0,1,0],"densities":[0.1]}"#,
        ] {
            assert!(SummaryFile::from_json(bad).unwrap().to_summary().is_err(), "{bad}");
        }
        assert!(SummaryFile::from_json("{").is_err());
    }
}
