use super::circuit::Circuit;
use super::decompose::decompose_mcu;
use super::gate::Gate;
use crate::error::Result;
use serde::{Deserialize, Serialize};

/// Width, greedy-layered depth, trainable parameter count and gate count.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResourceCount {
    pub width: usize,
    pub depth: usize,
    #[serde(rename = "params")]
    pub trainable_params: usize,
    #[serde(rename = "gates")]
    pub gate_total: usize,
}

/// Streaming accumulator: each gate starts one layer after the latest layer of
/// any qubit it touches (ASAP layering).
#[derive(Clone, Debug)]
pub struct ResourceTally {
    level: Vec<usize>,
    depth: usize,
    trainable: usize,
    gates: usize,
}

impl ResourceTally {
    pub fn new(width: usize) -> Self {
        Self {
            level: vec![0; width],
            depth: 0,
            trainable: 0,
            gates: 0,
        }
    }

    pub fn add(&mut self, g: &Gate) {
        let start = g.qubits().map(|q| self.level[q]).max().unwrap_or(0) + 1;
        for q in g.qubits() {
            self.level[q] = start;
        }
        self.depth = self.depth.max(start);
        self.gates += 1;
    }

    pub fn add_trainable(&mut self, n: usize) {
        self.trainable += n;
    }

    pub fn finish(&self) -> ResourceCount {
        ResourceCount {
            width: self.level.len(),
            depth: self.depth,
            trainable_params: self.trainable,
            gate_total: self.gates,
        }
    }
}

/// Tallies `c`; with `lowered`, controlled gates are first expanded by
/// [`decompose_mcu`]. Trainable parameters are counted on the original gates,
/// since lowering only splits existing angles.
pub fn resource_count(c: &Circuit, lowered: bool) -> Result<ResourceCount> {
    let mut t = ResourceTally::new(c.width);
    for g in &c.gates {
        if g.is_trainable() {
            t.add_trainable(1);
        }
        if lowered {
            for h in decompose_mcu(g)? {
                t.add(&h);
            }
        } else {
            t.add(g);
        }
    }
    Ok(t.finish())
}
