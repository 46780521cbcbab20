//! Fixed-width binary genomes and their decoding into feature-map circuits.
//!
//! A genome holds `M x N` genes of five bits each. Gene `i` acts on qubit
//! `i mod M` in layer `i div M` and, when it decodes to a rotation, reads
//! feature `i mod d`. The first three bits of a gene select the gate through a
//! [`GateTable`]; the last two bits select the rotation weight.

use std::f64::consts::FRAC_PI_4;
use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const BITS_PER_GENE: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Gate family selected by the three leading bits of a gene.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    Identity,
    Hadamard,
    Cnot,
    Rotation(Axis),
}

/// Lookup from the pattern `s0 s1 s2` (s0 most significant) to a gate kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GateTable(pub [GateKind; 8]);

/// `000` identity, `001` Hadamard, `010` CNOT, `100`/`101`/`110` rotations
/// about X/Y/Z; `011` and `111` are identity.
pub const DEFAULT_GATE_TABLE: GateTable = GateTable([
    GateKind::Identity,
    GateKind::Hadamard,
    GateKind::Cnot,
    GateKind::Identity,
    GateKind::Rotation(Axis::X),
    GateKind::Rotation(Axis::Y),
    GateKind::Rotation(Axis::Z),
    GateKind::Identity,
]);

impl Default for GateTable {
    fn default() -> Self {
        DEFAULT_GATE_TABLE
    }
}

impl GateTable {
    pub fn lookup(&self, s0: bool, s1: bool, s2: bool) -> GateKind {
        let idx = (usize::from(s0) << 2) | (usize::from(s1) << 1) | usize::from(s2);
        self.0[idx]
    }
}

/// The four rotation weights reachable from `s3 s4`:
/// `pi/4 * 2^(-2^s3 - 4^s4)`.
pub fn rotation_weight(s3: bool, s4: bool) -> f64 {
    let exponent = (1i32 << u32::from(s3)) + (1i32 << (2 * u32::from(s4)));
    FRAC_PI_4 * 2f64.powi(-exponent)
}

/// One decoded gate. A CNOT on qubit `j` targets `(j + 1) mod M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Identity,
    Hadamard,
    Cnot,
    /// `exp(-i * theta * x[feature] * sigma_axis)`.
    Rotation {
        axis: Axis,
        theta: f64,
        feature: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateSpec {
    pub gate: Gate,
    pub qubit: usize,
    pub layer: usize,
}

impl GateSpec {
    pub fn is_local(&self) -> bool {
        matches!(self.gate, Gate::Hadamard | Gate::Rotation { .. })
    }

    pub fn is_cnot(&self) -> bool {
        matches!(self.gate, Gate::Cnot)
    }
}

/// Decodes gene `gene_index` of a genome with `num_qubits` qubits,
/// `max_layers` layers and `num_features` input features.
pub fn decode_gene(
    bits5: &[bool; BITS_PER_GENE],
    gene_index: usize,
    num_qubits: usize,
    max_layers: usize,
    num_features: usize,
) -> GateSpec {
    decode_gene_with(
        &DEFAULT_GATE_TABLE,
        bits5,
        gene_index,
        num_qubits,
        max_layers,
        num_features,
    )
}

pub fn decode_gene_with(
    table: &GateTable,
    bits5: &[bool; BITS_PER_GENE],
    gene_index: usize,
    num_qubits: usize,
    max_layers: usize,
    num_features: usize,
) -> GateSpec {
    debug_assert!(gene_index < num_qubits * max_layers);
    let qubit = gene_index % num_qubits;
    let layer = gene_index / num_qubits;
    let [s0, s1, s2, s3, s4] = *bits5;
    let gate = match table.lookup(s0, s1, s2) {
        GateKind::Identity => Gate::Identity,
        GateKind::Hadamard => Gate::Hadamard,
        // a one-qubit register has no neighbour to entangle with
        GateKind::Cnot if num_qubits == 1 => Gate::Identity,
        GateKind::Cnot => Gate::Cnot,
        GateKind::Rotation(axis) => Gate::Rotation {
            axis,
            theta: rotation_weight(s3, s4),
            feature: gene_index % num_features,
        },
    };
    GateSpec { gate, qubit, layer }
}

/// Bitstring genome of exactly `num_qubits * max_layers * 5` bits.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Genome {
    bits: Vec<bool>,
    num_qubits: usize,
    max_layers: usize,
    num_features: usize,
}

impl Genome {
    pub fn new(
        bits: Vec<bool>,
        num_qubits: usize,
        max_layers: usize,
        num_features: usize,
    ) -> Result<Self> {
        if num_qubits == 0 || max_layers == 0 || num_features == 0 {
            return Err(Error::input(
                "genome dimensions (qubits, layers, features) must all be positive",
            ));
        }
        let expected = genome_len(num_qubits, max_layers);
        if bits.len() != expected {
            return Err(Error::input(format!(
                "genome has {} bits, expected {expected} for {num_qubits} qubits x {max_layers} layers",
                bits.len()
            )));
        }
        Ok(Self {
            bits,
            num_qubits,
            max_layers,
            num_features,
        })
    }

    pub fn zeros(num_qubits: usize, max_layers: usize, num_features: usize) -> Result<Self> {
        Self::new(
            vec![false; genome_len(num_qubits, max_layers)],
            num_qubits,
            max_layers,
            num_features,
        )
    }

    /// Parses a string of `'0'`/`'1'` characters.
    pub fn from_bit_string(
        s: &str,
        num_qubits: usize,
        max_layers: usize,
        num_features: usize,
    ) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(Error::input(format!("invalid genome character {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(bits, num_qubits, max_layers, num_features)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn max_layers(&self) -> usize {
        self.max_layers
    }

    pub fn num_features(&self) -> usize {
        self.num_features
    }

    pub fn num_genes(&self) -> usize {
        self.num_qubits * self.max_layers
    }

    pub fn gene(&self, index: usize) -> [bool; BITS_PER_GENE] {
        let start = index * BITS_PER_GENE;
        let mut out = [false; BITS_PER_GENE];
        out.copy_from_slice(&self.bits[start..start + BITS_PER_GENE]);
        out
    }

    /// Same dimensions, new bits. Length is checked.
    pub fn with_bits(&self, bits: Vec<bool>) -> Result<Self> {
        Self::new(bits, self.num_qubits, self.max_layers, self.num_features)
    }

    pub fn to_bit_string(&self) -> String {
        self.bits
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }
}

impl fmt::Display for Genome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bit_string())
    }
}

pub fn genome_len(num_qubits: usize, max_layers: usize) -> usize {
    num_qubits * max_layers * BITS_PER_GENE
}

#[derive(Serialize, Deserialize)]
struct GenomeRecord {
    bits: String,
    num_qubits: usize,
    max_layers: usize,
    num_features: usize,
}

impl Serialize for Genome {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        GenomeRecord {
            bits: self.to_bit_string(),
            num_qubits: self.num_qubits,
            max_layers: self.max_layers,
            num_features: self.num_features,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Genome {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let r = GenomeRecord::deserialize(deserializer)?;
        Genome::from_bit_string(&r.bits, r.num_qubits, r.max_layers, r.num_features)
            .map_err(serde::de::Error::custom)
    }
}

pub fn random_genome<R: Rng + ?Sized>(
    num_qubits: usize,
    max_layers: usize,
    num_features: usize,
    rng: &mut R,
) -> Result<Genome> {
    let bits = (0..genome_len(num_qubits, max_layers))
        .map(|_| rng.random::<bool>())
        .collect();
    Genome::new(bits, num_qubits, max_layers, num_features)
}

/// Ordered gate list acting on `num_qubits` qubits; the feature map `U(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitSpec {
    num_qubits: usize,
    num_features: usize,
    gates: Vec<GateSpec>,
}

impl CircuitSpec {
    /// Validates qubit/feature bounds, gate order, and drops identities.
    pub fn new(num_qubits: usize, num_features: usize, gates: Vec<GateSpec>) -> Result<Self> {
        if num_qubits == 0 || num_features == 0 {
            return Err(Error::input(
                "circuit needs at least one qubit and one feature",
            ));
        }
        let gates: Vec<GateSpec> = gates
            .into_iter()
            .filter(|g| g.gate != Gate::Identity)
            .collect();
        for g in &gates {
            if g.qubit >= num_qubits {
                return Err(Error::input(format!(
                    "gate on qubit {} but circuit has {num_qubits} qubits",
                    g.qubit
                )));
            }
            match g.gate {
                Gate::Rotation { feature, .. } if feature >= num_features => {
                    return Err(Error::input(format!(
                        "rotation reads feature {feature} but circuit has {num_features} features"
                    )));
                }
                Gate::Cnot if num_qubits < 2 => {
                    return Err(Error::input("CNOT requires at least two qubits"));
                }
                _ => {}
            }
        }
        if gates
            .windows(2)
            .any(|w| (w[0].layer, w[0].qubit) > (w[1].layer, w[1].qubit))
        {
            return Err(Error::input(
                "gates must be in nondecreasing (layer, qubit) order",
            ));
        }
        Ok(Self {
            num_qubits,
            num_features,
            gates,
        })
    }

    pub fn empty(num_qubits: usize, num_features: usize) -> Result<Self> {
        Self::new(num_qubits, num_features, Vec::new())
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_features(&self) -> usize {
        self.num_features
    }

    pub fn gates(&self) -> &[GateSpec] {
        &self.gates
    }

    pub fn cnot_target(&self, control: usize) -> usize {
        (control + 1) % self.num_qubits
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

pub fn decode_genome(genome: &Genome) -> CircuitSpec {
    decode_genome_with(&DEFAULT_GATE_TABLE, genome)
}

pub fn decode_genome_with(table: &GateTable, genome: &Genome) -> CircuitSpec {
    let m = genome.num_qubits();
    let n = genome.max_layers();
    let d = genome.num_features();
    let gates = (0..genome.num_genes())
        .map(|i| decode_gene_with(table, &genome.gene(i), i, m, n, d))
        .filter(|g| g.gate != Gate::Identity)
        .collect();
    CircuitSpec {
        num_qubits: m,
        num_features: d,
        gates,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GateCounts {
    pub local: usize,
    pub cnot: usize,
}

/// Local gates are Hadamards and rotations; identities are never counted.
pub fn count_gates(circuit: &CircuitSpec) -> GateCounts {
    circuit
        .gates()
        .iter()
        .fold(GateCounts::default(), |mut acc, g| {
            if g.is_local() {
                acc.local += 1;
            } else if g.is_cnot() {
                acc.cnot += 1;
            }
            acc
        })
}

// JSON wire format for gates: {"kind": "rx" | "ry" | "rz" | "h" | "cnot", ...}.
#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum GateRecord {
    Rx {
        qubit: usize,
        layer: usize,
        theta: f64,
        feature: usize,
    },
    Ry {
        qubit: usize,
        layer: usize,
        theta: f64,
        feature: usize,
    },
    Rz {
        qubit: usize,
        layer: usize,
        theta: f64,
        feature: usize,
    },
    H {
        qubit: usize,
        layer: usize,
    },
    Cnot {
        control: usize,
        target: usize,
        layer: usize,
    },
}

#[derive(Serialize, Deserialize)]
struct CircuitRecord {
    num_qubits: usize,
    num_features: usize,
    gates: Vec<GateRecord>,
}

impl Serialize for CircuitSpec {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let gates = self
            .gates
            .iter()
            .map(|g| {
                let (qubit, layer) = (g.qubit, g.layer);
                match g.gate {
                    Gate::Hadamard => GateRecord::H { qubit, layer },
                    Gate::Cnot => GateRecord::Cnot {
                        control: qubit,
                        target: self.cnot_target(qubit),
                        layer,
                    },
                    Gate::Rotation {
                        axis,
                        theta,
                        feature,
                    } => match axis {
                        Axis::X => GateRecord::Rx {
                            qubit,
                            layer,
                            theta,
                            feature,
                        },
                        Axis::Y => GateRecord::Ry {
                            qubit,
                            layer,
                            theta,
                            feature,
                        },
                        Axis::Z => GateRecord::Rz {
                            qubit,
                            layer,
                            theta,
                            feature,
                        },
                    },
                    Gate::Identity => unreachable!("identities are dropped at construction"),
                }
            })
            .collect();
        CircuitRecord {
            num_qubits: self.num_qubits,
            num_features: self.num_features,
            gates,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CircuitSpec {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = CircuitRecord::deserialize(deserializer)?;
        let m = r.num_qubits;
        let mut gates = Vec::with_capacity(r.gates.len());
        for g in r.gates {
            let spec = match g {
                GateRecord::H { qubit, layer } => GateSpec {
                    gate: Gate::Hadamard,
                    qubit,
                    layer,
                },
                GateRecord::Cnot {
                    control,
                    target,
                    layer,
                } => {
                    if m == 0 || target != (control + 1) % m {
                        return Err(D::Error::custom(format!(
                            "CNOT {control}->{target} is not between neighbouring qubits"
                        )));
                    }
                    GateSpec {
                        gate: Gate::Cnot,
                        qubit: control,
                        layer,
                    }
                }
                GateRecord::Rx {
                    qubit,
                    layer,
                    theta,
                    feature,
                } => rotation(Axis::X, qubit, layer, theta, feature),
                GateRecord::Ry {
                    qubit,
                    layer,
                    theta,
                    feature,
                } => rotation(Axis::Y, qubit, layer, theta, feature),
                GateRecord::Rz {
                    qubit,
                    layer,
                    theta,
                    feature,
                } => rotation(Axis::Z, qubit, layer, theta, feature),
            };
            gates.push(spec);
        }
        CircuitSpec::new(m, r.num_features, gates).map_err(D::Error::custom)
    }
}

fn rotation(axis: Axis, qubit: usize, layer: usize, theta: f64, feature: usize) -> GateSpec {
    GateSpec {
        gate: Gate::Rotation {
            axis,
            theta,
            feature,
        },
        qubit,
        layer,
    }
}
