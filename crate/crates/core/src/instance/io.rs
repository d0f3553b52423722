use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Flight, FlightGateInstance, Gate};
use crate::error::{read_file, write_file};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferEntry {
    pub i: usize,
    pub j: usize,
    pub n: u32,
}

/// On-disk JSON layout of an instance.
///
/// Transfers are stored sparsely, one entry per unordered pair with `i < j`.
/// Entries given in both orders must agree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceDocument {
    pub flights: Vec<Flight>,
    pub gates: Vec<Gate>,
    pub t_gate: Vec<Vec<f64>>,
    pub n_trans: Vec<TransferEntry>,
    pub t_buf: i64,
    /// Free-form record of how the instance was derived.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<serde_json::Value>,
}

impl From<&FlightGateInstance> for InstanceDocument {
    fn from(inst: &FlightGateInstance) -> Self {
        Self {
            flights: inst.flights.clone(),
            gates: inst.gates.clone(),
            t_gate: inst.t_gate.clone(),
            n_trans: inst
                .transfer_edges()
                .into_iter()
                .map(|(i, j, n)| TransferEntry { i, j, n })
                .collect(),
            t_buf: inst.t_buf,
            provenance: None,
        }
    }
}

impl TryFrom<InstanceDocument> for FlightGateInstance {
    type Error = Error;

    fn try_from(doc: InstanceDocument) -> Result<Self> {
        let nf = doc.flights.len();
        let mut n_trans = vec![vec![0u32; nf]; nf];
        let mut issues = Vec::new();
        for e in &doc.n_trans {
            if e.i >= nf || e.j >= nf {
                issues.push(format!("transfer entry ({}, {}) out of range", e.i, e.j));
            } else if e.i == e.j {
                if e.n != 0 {
                    issues.push(format!("transfer entry on diagonal for flight {}", e.i));
                }
            } else {
                let prev = n_trans[e.j][e.i];
                if prev != 0 && prev != e.n {
                    issues.push(format!("conflicting transfer entries for ({}, {})", e.i, e.j));
                }
                n_trans[e.i][e.j] = e.n;
                n_trans[e.j][e.i] = e.n;
            }
        }
        if !issues.is_empty() {
            return Err(Error::InvalidInstance(issues));
        }
        let inst = FlightGateInstance {
            flights: doc.flights,
            gates: doc.gates,
            n_trans,
            t_gate: doc.t_gate,
            t_buf: doc.t_buf,
        };
        inst.ensure_valid()?;
        Ok(inst)
    }
}

impl InstanceDocument {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&read_file(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_file(path, self.to_json()?)
    }
}

impl FlightGateInstance {
    pub fn from_json(text: &str) -> Result<Self> {
        InstanceDocument::from_json(text)?.try_into()
    }

    pub fn to_json(&self) -> Result<String> {
        InstanceDocument::from(self).to_json()
    }

    pub fn load(path: &Path) -> Result<Self> {
        InstanceDocument::load(path)?.try_into()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        InstanceDocument::from(self).save(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::tests::two_by_two;

    #[test]
    fn sparse_transfers_on_disk() {
        let json = two_by_two().to_json().unwrap();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["n_trans"], serde_json::json!([{"i": 0, "j": 1, "n": 7}]));
        assert_eq!(v["flights"][0]["t_in"], 600);
        assert_eq!(v["gates"][1]["t_dep"], 2.0);
    }

    #[test]
    fn accepts_both_orders_and_rejects_conflicts() {
        let mut doc = InstanceDocument::from(&two_by_two());
        doc.n_trans.push(TransferEntry { i: 1, j: 0, n: 7 });
        assert_eq!(FlightGateInstance::try_from(doc.clone()).unwrap(), two_by_two());
        doc.n_trans.push(TransferEntry { i: 1, j: 0, n: 8 });
        assert!(FlightGateInstance::try_from(doc).is_err());
    }

    #[test]
    fn rejects_invalid_instance() {
        let mut doc = InstanceDocument::from(&two_by_two());
        doc.flights[0].t_out = 0;
        assert!(matches!(
            FlightGateInstance::try_from(doc),
            Err(Error::InvalidInstance(_))
        ));
    }
}
