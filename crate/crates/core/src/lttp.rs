//! Local ternary tree pattern (LTTP).
//!
//! Each pixel becomes the root `A` of a nine-node ternary tree over its 3x3
//! neighbourhood:
//!
//! ```text
//!            A
//!         /  |  \
//!        B   C   D
//!        |  /|\  |
//!        E F G H I
//! ```
//!
//! Neighbours fill nodes `B..I` in row-major window order, so relative to
//! the centre (row, col offsets):
//!
//! ```text
//!   B(-1,-1)  C(-1,0)  D(-1,+1)
//!   E( 0,-1)  A       F( 0,+1)
//!   G(+1,-1)  H(+1,0)  I(+1,+1)
//! ```
//!
//! Every edge parent -> child is labelled 1 when `parent - child >= 0`,
//! else 0. The eight labels are read in one of four traversal orders and
//! packed first-edge-most-significant into an 8-bit code.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::transform::{apply_kernel, FeatureVector, Mode, TransformedImage};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
    I,
}

impl Node {
    pub const ALL: [Node; 9] = [
        Node::A,
        Node::B,
        Node::C,
        Node::D,
        Node::E,
        Node::F,
        Node::G,
        Node::H,
        Node::I,
    ];

    /// (row, col) offset of this node's pixel from the root.
    pub const fn offset(self) -> (isize, isize) {
        match self {
            Node::A => (0, 0),
            Node::B => (-1, -1),
            Node::C => (-1, 0),
            Node::D => (-1, 1),
            Node::E => (0, -1),
            Node::F => (0, 1),
            Node::G => (1, -1),
            Node::H => (1, 0),
            Node::I => (1, 1),
        }
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// A directed tree edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub parent: Node,
    pub child: Node,
}

const fn edge(parent: Node, child: Node) -> Edge {
    Edge { parent, child }
}

/// The eight tree edges in canonical (left depth-first) order.
pub const EDGES: [Edge; 8] = [
    edge(Node::A, Node::B),
    edge(Node::B, Node::E),
    edge(Node::A, Node::C),
    edge(Node::C, Node::F),
    edge(Node::C, Node::G),
    edge(Node::C, Node::H),
    edge(Node::A, Node::D),
    edge(Node::D, Node::I),
];

// Positions of the canonical edges, used to spell traversal orders.
const AB: usize = 0;
const BE: usize = 1;
const AC: usize = 2;
const CF: usize = 3;
const CG: usize = 4;
const CH: usize = 5;
const AD: usize = 6;
const DI: usize = 7;

/// Nine pixel intensities arranged as a ternary tree rooted at the centre.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TernaryTree {
    nodes: [u8; 9],
}

impl TernaryTree {
    /// Node values in `A..=I` order.
    pub fn from_nodes(nodes: [u8; 9]) -> Self {
        TernaryTree { nodes }
    }

    pub fn value(&self, node: Node) -> u8 {
        self.nodes[node as usize]
    }

    pub fn root(&self) -> u8 {
        self.nodes[Node::A as usize]
    }

    pub fn nodes(&self) -> [u8; 9] {
        self.nodes
    }

    pub fn edges(&self) -> &'static [Edge; 8] {
        &EDGES
    }

    /// Builds a tree from a row-major window given as a flat slice.
    pub fn try_from_window(window: &[u8]) -> Result<Self> {
        let window: [u8; 9] = window.try_into().map_err(|_| {
            Error::Invalid(format!(
                "window must be 3x3 (9 values), got {}",
                window.len()
            ))
        })?;
        Ok(build_ternary_tree(&[
            [window[0], window[1], window[2]],
            [window[3], window[4], window[5]],
            [window[6], window[7], window[8]],
        ]))
    }
}

pub fn build_ternary_tree(window: &[[u8; 3]; 3]) -> TernaryTree {
    let mut nodes = [0u8; 9];
    for node in Node::ALL {
        let (dr, dc) = node.offset();
        nodes[node as usize] = window[(1 + dr) as usize][(1 + dc) as usize];
    }
    TernaryTree { nodes }
}

/// Binary edge labels in canonical [`EDGES`] order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EdgeLabels([bool; 8]);

impl EdgeLabels {
    pub fn new(labels: [bool; 8]) -> Self {
        EdgeLabels(labels)
    }

    pub fn get(&self, edge: Edge) -> bool {
        let i = EDGES
            .iter()
            .position(|&e| e == edge)
            .expect("edge belongs to the ternary tree");
        self.0[i]
    }

    pub fn as_array(&self) -> [bool; 8] {
        self.0
    }

    pub fn as_bits(&self) -> [u8; 8] {
        self.0.map(u8::from)
    }
}

pub fn label_edges(tree: &TernaryTree) -> EdgeLabels {
    EdgeLabels(EDGES.map(|e| tree.value(e.parent) >= tree.value(e.child)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TraversalVariant {
    /// Left-oriented depth-first.
    #[serde(rename = "ld")]
    Ld,
    /// Left-oriented breadth-first.
    #[serde(rename = "lb")]
    Lb,
    /// Right-oriented depth-first.
    #[serde(rename = "rd")]
    Rd,
    /// Right-oriented breadth-first.
    #[serde(rename = "rb")]
    Rb,
}

impl TraversalVariant {
    pub const ALL: [TraversalVariant; 4] = [
        TraversalVariant::Ld,
        TraversalVariant::Lb,
        TraversalVariant::Rd,
        TraversalVariant::Rb,
    ];

    const fn order_indices(self) -> [usize; 8] {
        match self {
            TraversalVariant::Ld => [AB, BE, AC, CF, CG, CH, AD, DI],
            TraversalVariant::Lb => [AB, AC, AD, BE, CF, CG, CH, DI],
            TraversalVariant::Rd => [AD, DI, AC, CH, CG, CF, AB, BE],
            TraversalVariant::Rb => [AD, AC, AB, DI, CH, CG, CF, BE],
        }
    }

    /// Edges in the order this traversal visits them.
    pub fn edge_order(self) -> [Edge; 8] {
        self.order_indices().map(|i| EDGES[i])
    }

    pub fn name(self) -> &'static str {
        match self {
            TraversalVariant::Ld => "ld",
            TraversalVariant::Lb => "lb",
            TraversalVariant::Rd => "rd",
            TraversalVariant::Rb => "rb",
        }
    }

    fn table(self) -> &'static [u8; 256] {
        &PERMUTE[self as usize]
    }
}

impl FromStr for TraversalVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TraversalVariant::ALL
            .into_iter()
            .find(|v| v.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Invalid(format!("unknown traversal {s:?}")))
    }
}

impl fmt::Display for TraversalVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One 8-bit descriptor code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CodeWord(pub u8);

impl CodeWord {
    pub fn value(self) -> u8 {
        self.0
    }
}

pub fn encode_lttp(labels: &EdgeLabels, variant: TraversalVariant) -> CodeWord {
    let bits = labels.as_array();
    let code = variant
        .order_indices()
        .iter()
        .fold(0u8, |acc, &i| (acc << 1) | bits[i] as u8);
    CodeWord(code)
}

// Maps a canonical-order label byte (edge 0 in bit 7) to each variant's code.
const fn permutation_table(order: [usize; 8]) -> [u8; 256] {
    let mut table = [0u8; 256];
    let mut mask = 0;
    while mask < 256 {
        let mut code = 0u8;
        let mut q = 0;
        while q < 8 {
            let bit = (mask >> (7 - order[q])) & 1;
            code = (code << 1) | bit as u8;
            q += 1;
        }
        table[mask] = code;
        mask += 1;
    }
    table
}

static PERMUTE: [[u8; 256]; 4] = [
    permutation_table(TraversalVariant::Ld.order_indices()),
    permutation_table(TraversalVariant::Lb.order_indices()),
    permutation_table(TraversalVariant::Rd.order_indices()),
    permutation_table(TraversalVariant::Rb.order_indices()),
];

/// Canonical label byte for the window centred at column `x`.
#[inline(always)]
fn canonical_labels(up: &[u8], mid: &[u8], down: &[u8], x: usize) -> u8 {
    let a = mid[x];
    let (b, c, d) = (up[x - 1], up[x], up[x + 1]);
    let (e, f) = (mid[x - 1], mid[x + 1]);
    let (g, h, i) = (down[x - 1], down[x], down[x + 1]);
    ((a >= b) as u8) << 7
        | ((b >= e) as u8) << 6
        | ((a >= c) as u8) << 5
        | ((c >= f) as u8) << 4
        | ((c >= g) as u8) << 3
        | ((c >= h) as u8) << 2
        | ((a >= d) as u8) << 1
        | (d >= i) as u8
}

pub fn lttp_transform(
    img: &GrayImage,
    variant: TraversalVariant,
    mode: Mode,
) -> Result<TransformedImage> {
    let table = variant.table();
    apply_kernel(img, mode, |up, mid, down, x| {
        table[canonical_labels(up, mid, down, x) as usize]
    })
}

pub fn lttp_feature(
    img: &GrayImage,
    variant: TraversalVariant,
    mode: Mode,
) -> Result<FeatureVector> {
    Ok(lttp_transform(img, variant, mode)?.flatten())
}
