use serde::{Deserialize, Serialize};

/// One failed check. Vertex and edge references use the ids from the input
/// files so a report can be read without the in-memory skeleton.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// Vertex `vertex` receives no edge of color `color`.
    NoSources { vertex: String, color: usize },
    /// `|v E_i E_j w| != |v E_j E_i w|`.
    PathCountMismatch {
        v: String,
        w: String,
        i: usize,
        j: usize,
        ij_paths: usize,
        ji_paths: usize,
    },
    /// The two ways round a 3-cube end in different edge triples. Both
    /// fields hold the reversed-color factorisation reached by flipping the
    /// first (resp. last) adjacent pair first.
    NonAssociative {
        colors: [usize; 3],
        path: [String; 3],
        first_pair_first: [String; 3],
        last_pair_first: [String; 3],
    },
    /// A square value is off the unit circle.
    NotUnitModulus {
        i: usize,
        j: usize,
        v: String,
        w: String,
        index: usize,
        modulus: f64,
    },
    /// The six-face product identity fails on a 3-cube.
    CubeIdentity {
        colors: [usize; 3],
        path: [String; 3],
        front: [f64; 2],
        back: [f64; 2],
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub layer: String,
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn new(layer: impl Into<String>) -> Self {
        ValidationReport {
            layer: layer.into(),
            ok: true,
            notes: Vec::new(),
            violations: Vec::new(),
        }
    }

    pub fn push(&mut self, violation: Violation) {
        self.ok = false;
        self.violations.push(violation);
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }
}
