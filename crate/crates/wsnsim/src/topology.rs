//! Static node deployment and base-station geometry.
//!
//! A topology is generated once per run seed and never mutated afterwards:
//! node positions, per-node distance to the base station and the network-wide
//! average distance are all fixed at deployment time, so a topology can be
//! shared read-only across concurrent simulation runs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Planar coordinates in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Position {
    pub x: f64,
    pub y: f64,
}

impl Position {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Euclidean distance between two positions.
pub fn distance(a: Position, b: Position) -> f64 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    (dx * dx + dy * dy).sqrt()
}

/// One deployed sensor node. Ids are contiguous from 0 in deployment order.
#[derive(Debug, Clone)]
pub struct Node {
    pub id: usize,
    pub position: Position,
    /// Distance to the base station, fixed at deployment.
    pub distance_to_bs: f64,
}

/// A fixed deployment: node sites, base-station position and the precomputed
/// average node-to-BS distance used by the distance-aware election scheme.
#[derive(Debug, Clone)]
pub struct Topology {
    nodes: Vec<Node>,
    bs_position: Position,
    region_side: f64,
    d_avg: f64,
}

#[derive(Debug, Error)]
pub enum TopologyError {
    #[error("node count must be at least 1")]
    NoNodes,
    #[error("region side must be positive, got {0}")]
    InvalidRegionSide(f64),
    #[error("base station offset must be non-negative, got {0}")]
    InvalidBsOffset(f64),
    #[error("malformed topology csv: {0}")]
    MalformedCsv(String),
}

/// Deploy `n` nodes uniformly at random in the `[0, region_side]²` square,
/// with the base station centered `bs_offset` meters above the top edge at
/// `(region_side / 2, region_side + bs_offset)`.
///
/// The same seed always yields a bit-identical topology.
pub fn generate_topology(
    n: usize,
    region_side: f64,
    bs_offset: f64,
    seed: u64,
) -> Result<Topology, TopologyError> {
    if n == 0 {
        return Err(TopologyError::NoNodes);
    }
    if !region_side.is_finite() || region_side <= 0.0 {
        return Err(TopologyError::InvalidRegionSide(region_side));
    }
    if !bs_offset.is_finite() || bs_offset < 0.0 {
        return Err(TopologyError::InvalidBsOffset(bs_offset));
    }

    let bs_position = Position::new(region_side / 2.0, region_side + bs_offset);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes = (0..n)
        .map(|id| {
            let x = rng.random_range(0.0..=region_side);
            let y = rng.random_range(0.0..=region_side);
            let position = Position::new(x, y);
            Node {
                id,
                position,
                distance_to_bs: distance(position, bs_position),
            }
        })
        .collect();

    Ok(Topology::from_parts(nodes, bs_position, region_side))
}

impl Topology {
    fn from_parts(nodes: Vec<Node>, bs_position: Position, region_side: f64) -> Self {
        let d_avg = mean_distance(&nodes);
        Self {
            nodes,
            bs_position,
            region_side,
            d_avg,
        }
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn bs_position(&self) -> Position {
        self.bs_position
    }

    pub fn region_side(&self) -> f64 {
        self.region_side
    }

    /// Average node-to-BS distance, precomputed at deployment over all nodes.
    pub fn d_avg(&self) -> f64 {
        self.d_avg
    }

    /// Serialize as CSV: a `# bs_x,bs_y,region_side` comment line, the
    /// `id,x,y` header, then one row per node. Byte-deterministic.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "# {},{},{}\n",
            self.bs_position.x, self.bs_position.y, self.region_side
        ));
        out.push_str("id,x,y\n");
        for node in &self.nodes {
            out.push_str(&format!("{},{},{}\n", node.id, node.position.x, node.position.y));
        }
        out
    }

    /// Parse the format produced by [`Topology::to_csv`], recomputing all
    /// derived distances.
    pub fn from_csv(text: &str) -> Result<Self, TopologyError> {
        let bad = |msg: &str| TopologyError::MalformedCsv(msg.to_string());

        let mut lines = text.lines();
        let comment = lines.next().ok_or_else(|| bad("empty input"))?;
        let comment = comment
            .strip_prefix('#')
            .ok_or_else(|| bad("missing `# bs_x,bs_y,region_side` comment line"))?
            .trim();
        let mut meta = comment.split(',');
        let mut next_f64 = |what: &str| -> Result<f64, TopologyError> {
            meta.next()
                .and_then(|s| s.trim().parse::<f64>().ok())
                .ok_or_else(|| bad(&format!("bad {what} in comment line")))
        };
        let bs_x = next_f64("bs_x")?;
        let bs_y = next_f64("bs_y")?;
        let region_side = next_f64("region_side")?;
        if !(region_side > 0.0) {
            return Err(TopologyError::InvalidRegionSide(region_side));
        }

        let header = lines.next().ok_or_else(|| bad("missing header"))?;
        if header.trim() != "id,x,y" {
            return Err(bad("expected header `id,x,y`"));
        }

        let bs_position = Position::new(bs_x, bs_y);
        let mut nodes = Vec::new();
        for line in lines {
            if line.trim().is_empty() {
                continue;
            }
            let mut fields = line.split(',');
            let id: usize = fields
                .next()
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| bad(&format!("bad id in row `{line}`")))?;
            let x: f64 = fields
                .next()
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| bad(&format!("bad x in row `{line}`")))?;
            let y: f64 = fields
                .next()
                .and_then(|s| s.trim().parse().ok())
                .ok_or_else(|| bad(&format!("bad y in row `{line}`")))?;
            if id != nodes.len() {
                return Err(bad(&format!(
                    "node ids must be contiguous from 0, got {id} at row {}",
                    nodes.len()
                )));
            }
            if !(0.0..=region_side).contains(&x) || !(0.0..=region_side).contains(&y) {
                return Err(bad(&format!("node {id} lies outside the region square")));
            }
            let position = Position::new(x, y);
            nodes.push(Node {
                id,
                position,
                distance_to_bs: distance(position, bs_position),
            });
        }
        if nodes.is_empty() {
            return Err(TopologyError::NoNodes);
        }
        Ok(Topology::from_parts(nodes, bs_position, region_side))
    }
}

/// Mean node-to-BS distance, recomputed from the node list.
pub fn average_distance(topology: &Topology) -> f64 {
    mean_distance(&topology.nodes)
}

fn mean_distance(nodes: &[Node]) -> f64 {
    assert!(!nodes.is_empty(), "topology has no nodes");
    nodes.iter().map(|n| n.distance_to_bs).sum::<f64>() / nodes.len() as f64
}
