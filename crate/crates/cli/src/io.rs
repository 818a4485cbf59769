//! JSON file formats.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use tensionweb::geom::Vec2;
use tensionweb::proj3d::{ForceMultiplet3, Vec3};
use tensionweb::statics::ForceMultiplet;
use tensionweb::web::{total_length, verify_equilibrium, Edge, Node, NodeKind, Web};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteriorLoad {
    pub point: [f64; 2],
    pub force: [f64; 2],
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default)]
    pub points: Vec<[f64; 2]>,
    #[serde(default)]
    pub forces: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub interior: Vec<InteriorLoad>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points3: Vec<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub forces3: Vec<[f64; 3]>,
    /// Force lists at `points`, one per cone generator.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub generators: Vec<Vec<[f64; 2]>>,
}

pub fn v2(a: [f64; 2]) -> Vec2 {
    Vec2::new(a[0], a[1])
}

pub fn v3(a: [f64; 3]) -> Vec3 {
    Vec3::new(a[0], a[1], a[2])
}

pub fn arr(v: Vec2) -> [f64; 2] {
    [v.x, v.y]
}

impl ProblemFile {
    pub fn multiplet(&self) -> Result<ForceMultiplet> {
        if self.points.len() != self.forces.len() {
            bail!("{} points but {} forces", self.points.len(), self.forces.len());
        }
        Ok(ForceMultiplet::new(
            self.points.iter().copied().map(v2).collect(),
            self.forces.iter().copied().map(v2).collect(),
        )?)
    }

    pub fn multiplet3(&self) -> Result<ForceMultiplet3> {
        if self.points3.is_empty() {
            bail!("problem has no points3/forces3");
        }
        if self.points3.len() != self.forces3.len() {
            bail!("{} points3 but {} forces3", self.points3.len(), self.forces3.len());
        }
        Ok(ForceMultiplet3::new(
            self.points3.iter().copied().map(v3).collect(),
            self.forces3.iter().copied().map(v3).collect(),
        )?)
    }

    pub fn generator_multiplets(&self) -> Result<Vec<ForceMultiplet>> {
        if self.generators.is_empty() {
            bail!("problem has no generators");
        }
        self.generators
            .iter()
            .enumerate()
            .map(|(k, g)| {
                if g.len() != self.points.len() {
                    bail!("generator {k} has {} forces for {} points", g.len(), self.points.len());
                }
                Ok(ForceMultiplet::new(self.points.iter().copied().map(v2).collect(), g.iter().copied().map(v2).collect())?)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Boundary,
    Interior,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeRecord {
    pub id: usize,
    pub xy: [f64; 2],
    pub kind: Kind,
    #[serde(default)]
    pub load: [f64; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub a: usize,
    pub b: usize,
    pub tension: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role: Option<String>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Metadata {
    pub total_length: f64,
    pub residual: f64,
    pub feasible: bool,
    /// Command-specific extras.
    #[serde(flatten)]
    pub extra: serde_json::Map<String, serde_json::Value>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WebFile {
    pub nodes: Vec<NodeRecord>,
    pub edges: Vec<EdgeRecord>,
    #[serde(default)]
    pub metadata: Metadata,
}

impl WebFile {
    /// Canonical node order; `roles` follow the edges.
    pub fn from_web(w: &Web, roles: Option<Vec<String>>) -> Result<WebFile> {
        let w = w.canonicalize();
        let report = verify_equilibrium(&w)?;
        let nodes = w
            .nodes
            .iter()
            .enumerate()
            .map(|(id, n)| NodeRecord {
                id,
                xy: arr(n.pos),
                kind: match n.kind {
                    NodeKind::Boundary => Kind::Boundary,
                    NodeKind::Interior => Kind::Interior,
                },
                load: arr(n.load),
            })
            .collect();
        let mut roles = roles.map(|r| r.into_iter());
        let edges = w
            .edges
            .iter()
            .map(|e| EdgeRecord { a: e.a, b: e.b, tension: e.tension, role: roles.as_mut().and_then(|r| r.next()) })
            .collect();
        let metadata = Metadata {
            total_length: total_length(&w),
            residual: report.max_node_residual,
            feasible: report.in_equilibrium,
            extra: Default::default(),
        };
        Ok(WebFile { nodes, edges, metadata })
    }

    pub fn to_web(&self) -> Result<Web> {
        let mut index = std::collections::HashMap::new();
        let mut w = Web::new();
        for (k, n) in self.nodes.iter().enumerate() {
            if index.insert(n.id, k).is_some() {
                bail!("duplicate node id {}", n.id);
            }
            let kind = match n.kind {
                Kind::Boundary => NodeKind::Boundary,
                Kind::Interior => NodeKind::Interior,
            };
            w.nodes.push(Node { pos: v2(n.xy), kind, load: v2(n.load) });
        }
        for e in &self.edges {
            let (Some(&a), Some(&b)) = (index.get(&e.a), index.get(&e.b)) else {
                bail!("edge ({}, {}) refers to a missing node", e.a, e.b);
            };
            w.edges.push(Edge { a, b, tension: e.tension });
        }
        Ok(w)
    }

    pub fn with_extra(mut self, key: &str, value: impl Serialize) -> Self {
        self.metadata.extra.insert(key.into(), serde_json::to_value(value).expect("serializable"));
        self
    }
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Pretty JSON to `path`, or stdout when absent.
pub fn write_json(path: Option<&Path>, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
