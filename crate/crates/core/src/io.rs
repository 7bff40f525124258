//! JSON documents for networks, solutions and tilings.
//!
//! Floating-point output is rounded to 12 significant digits and maps keep
//! the network's vertex or edge order, so equal inputs serialize to equal
//! bytes.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::enharmonic::EnharmonicSolution;
use crate::error::{Error, Result};
use crate::harmonic::HarmonicSolution;
use crate::network::{BoundaryValues, Energies, Network};
use crate::numtheory::{parse_rational, to_f64};
use crate::planar::{RectTiling, Tile};

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(round12(x)).map(Value::Number).unwrap_or(Value::Null)
}

/// `{id: value}` in the given order.
pub fn keyed(ids: &[String], values: &[f64]) -> Value {
    Value::Object(ids.iter().zip(values).map(|(k, &v)| (k.clone(), num(v))).collect())
}

fn edge_ids(net: &Network) -> Vec<String> {
    net.edges().iter().map(|e| e.id.clone()).collect()
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

/// Accepts JSON numbers, `"p/q"` strings and decimal strings.
fn scalar(v: &Value) -> Result<f64> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| bad("number out of range")),
        Value::String(s) => Ok(to_f64(&parse_rational(s)?)),
        other => Err(bad(format!("expected a number, got {other}"))),
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct EdgeDoc {
    id: String,
    tail: String,
    head: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct NetworkDoc {
    vertices: Vec<String>,
    edges: Vec<EdgeDoc>,
    boundary: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    u: Option<Map<String, Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    energies: Option<Map<String, Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    embedding: Option<Map<String, Value>>,
}

/// A network document with its optional data.
#[derive(Debug, Clone)]
pub struct NetworkFile {
    pub net: Network,
    pub u: Option<BoundaryValues>,
    pub energies: Option<Energies>,
    pub rotation: Option<Vec<Vec<usize>>>,
}

impl NetworkFile {
    pub fn require_u(&self) -> Result<&BoundaryValues> {
        self.u.as_ref().ok_or_else(|| bad("document has no \"u\""))
    }

    pub fn require_energies(&self) -> Result<&Energies> {
        self.energies.as_ref().ok_or_else(|| bad("document has no \"energies\""))
    }

    pub fn require_rotation(&self) -> Result<&[Vec<usize>]> {
        self.rotation.as_deref().ok_or_else(|| bad("document has no \"embedding\""))
    }
}

fn lookup_all(map: &Map<String, Value>, ids: &[String], what: &str) -> Result<Vec<f64>> {
    for k in map.keys() {
        if !ids.contains(k) {
            return Err(bad(format!("{what} names unknown id {k:?}")));
        }
    }
    ids.iter()
        .map(|id| map.get(id).ok_or_else(|| bad(format!("{what} is missing {id:?}"))).and_then(scalar))
        .collect()
}

pub fn parse_network(text: &str) -> Result<NetworkFile> {
    let doc: NetworkDoc = serde_json::from_str(text).map_err(|e| bad(format!("network JSON: {e}")))?;
    let net = Network::new(
        doc.vertices,
        doc.edges.into_iter().map(|e| (e.id, e.tail, e.head)).collect(),
        doc.boundary.clone(),
    )?;
    let u = doc
        .u
        .map(|m| lookup_all(&m, &doc.boundary, "u").and_then(|v| BoundaryValues::new(&net, v)))
        .transpose()?;
    let energies = doc
        .energies
        .map(|m| lookup_all(&m, &edge_ids(&net), "energies").and_then(|v| Energies::new(&net, v)))
        .transpose()?;
    let rotation = doc
        .embedding
        .map(|m| -> Result<Vec<Vec<usize>>> {
            (0..net.vertex_count())
                .map(|v| {
                    let id = net.vertex_id(v);
                    let list = m.get(id).and_then(Value::as_array).ok_or_else(|| bad(format!("embedding is missing {id:?}")))?;
                    list.iter()
                        .map(|e| {
                            e.as_str()
                                .and_then(|s| net.edge_index(s))
                                .ok_or_else(|| bad(format!("embedding at {id:?} names an unknown edge {e}")))
                        })
                        .collect()
                })
                .collect()
        })
        .transpose()?;
    Ok(NetworkFile { net, u, energies, rotation })
}

pub fn network_json(
    net: &Network,
    u: Option<&BoundaryValues>,
    energies: Option<&Energies>,
    rotation: Option<&[Vec<usize>]>,
) -> Value {
    let boundary: Vec<String> = net.boundary().iter().map(|&b| net.vertex_id(b).to_string()).collect();
    let doc = NetworkDoc {
        vertices: net.vertex_ids().to_vec(),
        edges: net
            .edges()
            .iter()
            .map(|e| EdgeDoc {
                id: e.id.clone(),
                tail: net.vertex_id(e.tail).into(),
                head: net.vertex_id(e.head).into(),
            })
            .collect(),
        u: u.map(|u| as_map(keyed(&boundary, u.values()))),
        boundary,
        energies: energies.map(|en| as_map(keyed(&edge_ids(net), en.values()))),
        embedding: rotation.map(|rot| {
            (0..net.vertex_count())
                .map(|v| {
                    let list = rot[v].iter().map(|&e| Value::String(net.edge(e).id.clone())).collect();
                    (net.vertex_id(v).to_string(), Value::Array(list))
                })
                .collect()
        }),
    };
    serde_json::to_value(doc).expect("network document serializes")
}

fn as_map(v: Value) -> Map<String, Value> {
    match v {
        Value::Object(m) => m,
        _ => unreachable!(),
    }
}

pub fn solution_json(net: &Network, sol: &EnharmonicSolution) -> Value {
    let edges = edge_ids(net);
    let mut m = Map::new();
    m.insert(
        "sigma".into(),
        Value::Object(edges.iter().zip(sol.sigma.signs()).map(|(k, &s)| (k.clone(), Value::from(s))).collect()),
    );
    m.insert("h".into(), keyed(net.vertex_ids(), &sol.h));
    m.insert("c".into(), keyed(&edges, &sol.conductances));
    m.insert("residual".into(), num(sol.residual));
    m.insert("logM".into(), num(sol.log_objective));
    Value::Object(m)
}

pub fn harmonic_json(net: &Network, sol: &HarmonicSolution) -> Value {
    let mut m = Map::new();
    m.insert("h".into(), keyed(net.vertex_ids(), &sol.h));
    m.insert("omega".into(), keyed(&edge_ids(net), &sol.omega));
    Value::Object(m)
}

/// Per-edge values from a `{edgeId: value}` object, e.g. the `"c"` field of
/// a solution document.
pub fn parse_edge_values(net: &Network, value: &Value) -> Result<Vec<f64>> {
    let map = value.as_object().ok_or_else(|| bad("expected an object keyed by edge id"))?;
    lookup_all(map, &edge_ids(net), "edge values")
}

#[derive(Debug, Serialize, Deserialize)]
struct TilingDoc {
    bounds: [f64; 4],
    tiles: Vec<TileDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TileDoc {
    id: String,
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
}

pub fn parse_tiling(text: &str) -> Result<RectTiling> {
    let doc: TilingDoc = serde_json::from_str(text).map_err(|e| bad(format!("tiling JSON: {e}")))?;
    RectTiling::new(
        doc.bounds,
        doc.tiles.into_iter().map(|t| Tile { id: t.id, x0: t.x0, y0: t.y0, x1: t.x1, y1: t.y1 }).collect(),
    )
}

pub fn tiling_json(tiling: &RectTiling) -> Value {
    let doc = TilingDoc {
        bounds: tiling.bounds.map(round12),
        tiles: tiling
            .tiles
            .iter()
            .map(|t| TileDoc { id: t.id.clone(), x0: round12(t.x0), y0: round12(t.y0), x1: round12(t.x1), y1: round12(t.y1) })
            .collect(),
    };
    serde_json::to_value(doc).expect("tiling document serializes")
}

/// Pretty JSON with a trailing newline.
pub fn to_pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::make_small_graph;

    #[test]
    fn network_round_trip() {
        let f = make_small_graph();
        let text = to_pretty(&network_json(&f.net, Some(&f.u), Some(&f.energies), f.rotation.as_deref()));
        let back = parse_network(&text).unwrap();
        assert_eq!(back.net.vertex_ids(), f.net.vertex_ids());
        assert_eq!(back.net.edges(), f.net.edges());
        assert_eq!(back.u.unwrap(), f.u);
        assert_eq!(back.rotation, f.rotation);
        assert_eq!(back.energies.unwrap(), f.energies);
    }

    #[test]
    fn rationals_and_unknown_ids() {
        let doc = r#"{"vertices":["a","b"],"edges":[{"id":"e","tail":"a","head":"b"}],
            "boundary":["a","b"],"u":{"a":"1/3","b":2},"energies":{"e":"0.5"}}"#;
        let f = parse_network(doc).unwrap();
        assert!((f.u.unwrap().values()[0] - 1.0 / 3.0).abs() < 1e-16);
        assert_eq!(f.energies.unwrap().values(), &[0.5]);
        let bad = doc.replace("\"b\":2", "\"q\":2");
        assert_eq!(parse_network(&bad).unwrap_err().name(), "InvalidInput");
    }

    #[test]
    fn rounding() {
        assert_eq!(round12(0.1 + 0.2), 0.3);
        assert_eq!(round12(2.0f64.sqrt()), 1.41421356237);
    }
}
