//! JSON circuit document, field-for-field with the text format.

use serde::{Deserialize, Serialize};

use super::text::{format_bits, parse_bits};
use super::{Circuit, CircuitCell};
use crate::error::{Error, Result};
use crate::gates::{GateKind, GateSpec};
use crate::noise::NoiseConfig;

pub const FORMAT_VERSION: u32 = 1;

/// Grid cell: `{"op": "RX", "params": [1.57]}`; `op` is a text token.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellJson {
    pub op: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitJson {
    pub format_version: u32,
    pub qubits: usize,
    pub stages: usize,
    /// Bitstring, qubit 0 rightmost.
    pub init: String,
    /// `grid[qubit][stage]`.
    pub grid: Vec<Vec<CellJson>>,
    #[serde(default)]
    pub measure: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseConfig>,
}

impl From<&CircuitCell> for CellJson {
    fn from(cell: &CircuitCell) -> Self {
        match cell {
            CircuitCell::Identity => CellJson {
                op: "I".into(),
                params: vec![],
            },
            CircuitCell::Control => CellJson {
                op: "C".into(),
                params: vec![],
            },
            CircuitCell::SwapEndpoint => CellJson {
                op: "SW".into(),
                params: vec![],
            },
            CircuitCell::Gate(spec) => CellJson {
                op: spec.kind.token().unwrap_or(spec.kind.name()).into(),
                params: spec.params.clone(),
            },
        }
    }
}

impl CellJson {
    fn to_cell(&self, row: usize, column: usize) -> Result<CircuitCell> {
        let at = |m: String| Error::circuit(Some(row), Some(column), m);
        match self.op.to_ascii_uppercase().as_str() {
            "C" | "SW" | "I" if !self.params.is_empty() => {
                Err(at(format!("`{}` takes no parameters", self.op)))
            }
            "C" => Ok(CircuitCell::Control),
            "SW" => Ok(CircuitCell::SwapEndpoint),
            "I" => Ok(CircuitCell::Identity),
            _ => {
                let kind: GateKind = self.op.parse().map_err(|e: Error| at(e.to_string()))?;
                let spec = GateSpec {
                    kind,
                    params: self.params.clone(),
                };
                spec.validate().map_err(|e| at(e.to_string()))?;
                Ok(CircuitCell::Gate(spec))
            }
        }
    }
}

impl From<&Circuit> for CircuitJson {
    fn from(c: &Circuit) -> Self {
        CircuitJson {
            format_version: FORMAT_VERSION,
            qubits: c.num_qubits,
            stages: c.num_stages,
            init: format_bits(&c.initial_bits),
            grid: c
                .grid
                .iter()
                .map(|r| r.iter().map(CellJson::from).collect())
                .collect(),
            measure: c.measured.clone(),
            noise: c.noise.clone(),
        }
    }
}

impl CircuitJson {
    /// Dimension checks that do not touch the grid contents; cheap enough to
    /// run before any allocation-heavy work.
    pub fn check_shape(&self) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::circuit(
                None,
                None,
                format!("unsupported format_version {}", self.format_version),
            ));
        }
        if self.grid.len() != self.qubits {
            return Err(Error::circuit(
                None,
                None,
                format!(
                    "grid has {} rows for {} qubits",
                    self.grid.len(),
                    self.qubits
                ),
            ));
        }
        for (q, row) in self.grid.iter().enumerate() {
            if row.len() != self.stages {
                return Err(Error::circuit(
                    Some(q),
                    None,
                    format!("row has {} cells, expected {}", row.len(), self.stages),
                ));
            }
        }
        Ok(())
    }

    pub fn to_circuit(&self) -> Result<Circuit> {
        self.check_shape()?;
        let grid = self
            .grid
            .iter()
            .enumerate()
            .map(|(q, row)| {
                row.iter()
                    .enumerate()
                    .map(|(s, cell)| cell.to_cell(q, s))
                    .collect()
            })
            .collect::<Result<Vec<Vec<_>>>>()?;
        let bits =
            parse_bits(&self.init, self.qubits).map_err(|m| Error::circuit(None, None, m))?;
        Ok(Circuit::new(grid, bits, self.measure.clone())?.with_noise(self.noise.clone()))
    }
}

impl Circuit {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&CircuitJson::from(self))
            .expect("circuit JSON is serializable")
    }

    pub fn parse_json(source: &str) -> Result<Self> {
        let doc: CircuitJson = serde_json::from_str(source).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })?;
        doc.to_circuit()
    }
}
