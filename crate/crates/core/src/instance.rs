//! JSON instance files. Costs are stored as integers over a shared
//! `scale_denominator`, so exact costs survive a round trip unchanged.

use crate::error::{input, Error, Result};
use crate::graph::{VertexId, WeightedGraph};
use crate::request::{PredictionSet, Request};
use crate::scalar::Scalar;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceFile {
    pub vertices: usize,
    /// `[u, v, scaled cost, priority]`
    pub edges: Vec<[u64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub facility_costs: Option<Vec<[u64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capacities: Option<Vec<[u64; 2]>>,
    pub scale_denominator: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub root: Option<VertexId>,
}

fn scaled<T: Scalar>(x: &T, den: u64, what: &str) -> Result<u64> {
    let v = x
        .to_scaled(den)
        .ok_or_else(|| Error::Input(format!("{what} {x} is not a multiple of 1/{den}")))?;
    if v > i64::MAX as u64 {
        return input(format!("{what} {x} overflows the scaled integer range"));
    }
    Ok(v)
}

impl InstanceFile {
    /// Snapshot of `graph`. With `denominator = None` the smallest common
    /// denominator of all costs is used (exact scalars only).
    pub fn from_graph<T: Scalar>(
        graph: &WeightedGraph<T>,
        root: Option<VertexId>,
        denominator: Option<u64>,
    ) -> Result<Self> {
        let den = match denominator {
            Some(0) => return input("scale denominator must be positive"),
            Some(d) => d,
            None => {
                let mut d = 1u64;
                let costs = graph
                    .edges()
                    .iter()
                    .map(|e| &e.cost)
                    .chain((0..graph.vertex_count()).filter_map(|v| graph.facility_cost(v)));
                for c in costs {
                    let h = c.denominator_hint().ok_or_else(|| {
                        Error::Input("cannot infer a scale denominator for float costs".into())
                    })?;
                    d = d.lcm(&h);
                }
                d
            }
        };
        let mut edges = Vec::with_capacity(graph.edge_count());
        for e in graph.edges() {
            edges.push([e.u as u64, e.v as u64, scaled(&e.cost, den, "edge cost")?, e.priority as u64]);
        }
        let facility_costs = if graph.has_facility_data() {
            let mut out = Vec::new();
            for v in 0..graph.vertex_count() {
                if let Some(f) = graph.facility_cost(v) {
                    out.push([v as u64, scaled(f, den, "facility cost")?]);
                }
            }
            Some(out)
        } else {
            None
        };
        let capacities = graph.has_capacity_data().then(|| {
            (0..graph.vertex_count())
                .filter_map(|v| graph.capacity(v).map(|b| [v as u64, b]))
                .collect()
        });
        Ok(InstanceFile {
            vertices: graph.vertex_count(),
            edges,
            facility_costs,
            capacities,
            scale_denominator: den,
            root,
        })
    }

    pub fn to_graph<T: Scalar>(&self) -> Result<WeightedGraph<T>> {
        if self.scale_denominator == 0 {
            return input("scale_denominator must be positive");
        }
        let den = self.scale_denominator;
        let cost = |c: u64| -> Result<T> {
            if c > i64::MAX as u64 {
                return input(format!("scaled cost {c} out of range"));
            }
            Ok(T::from_ratio(c as i64, den))
        };
        let mut g = WeightedGraph::new(self.vertices);
        for (i, &[u, v, c, p]) in self.edges.iter().enumerate() {
            if p > u32::MAX as u64 {
                return input(format!("edge {i}: priority {p} out of range"));
            }
            g.add_edge_with_priority(u as usize, v as usize, cost(c)?, p as u32)
                .map_err(|e| Error::Input(format!("edge {i}: {e}")))?;
        }
        if let Some(fc) = &self.facility_costs {
            for v in 0..self.vertices {
                g.set_facility_cost(v, None)?;
            }
            for &[v, c] in fc {
                g.set_facility_cost(v as usize, Some(cost(c)?))?;
            }
        }
        if let Some(caps) = &self.capacities {
            for &[v, b] in caps {
                g.set_capacity(v as usize, b)?;
            }
        }
        if let Some(r) = self.root {
            g.check_vertex(r)?;
        }
        Ok(g)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serialization cannot fail") + "\n"
    }

    pub fn parse(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

pub fn requests_to_json(requests: &[Request]) -> String {
    serde_json::to_string_pretty(requests).expect("request serialization cannot fail") + "\n"
}

pub fn parse_requests(text: &str) -> Result<Vec<Request>> {
    let requests: Vec<Request> = serde_json::from_str(text)?;
    for (i, r) in requests.iter().enumerate() {
        if r.arrival_index != i {
            return input(format!(
                "request {i} has arrival_index {}; indices must be 0,1,2,... in file order",
                r.arrival_index
            ));
        }
    }
    Ok(requests)
}

pub fn predictions_to_json(predictions: &PredictionSet) -> String {
    serde_json::to_string_pretty(predictions).expect("prediction serialization cannot fail") + "\n"
}

pub fn parse_predictions(text: &str) -> Result<PredictionSet> {
    Ok(serde_json::from_str(text)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    #[test]
    fn round_trip_is_bit_exact() {
        let mut g: WeightedGraph<BigRational> = WeightedGraph::new(3);
        g.add_edge(0, 1, BigRational::from_ratio(3, 4)).unwrap();
        g.add_edge_with_priority(1, 2, BigRational::from_ratio(5, 6), 2).unwrap();
        g.set_facility_cost(2, Some(BigRational::from_ratio(1, 3))).unwrap();
        g.set_capacity(2, 4).unwrap();
        let f = InstanceFile::from_graph(&g, Some(0), None).unwrap();
        assert_eq!(f.scale_denominator, 12);
        let text = f.to_json();
        let back = InstanceFile::parse(&text).unwrap();
        assert_eq!(back.to_json(), text);
        let g2: WeightedGraph<BigRational> = back.to_graph().unwrap();
        assert_eq!(InstanceFile::from_graph(&g2, Some(0), None).unwrap().to_json(), text);
        assert_eq!(g2.facility_cost(0), None);
        assert_eq!(g2.capacity(2), Some(4));
    }

    #[test]
    fn malformed_input_reports_location() {
        let err = InstanceFile::parse("{\n  \"vertices\": 2,\n  \"edges\": [[0, 1, \"x\", 1]]\n}").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
        let bad = InstanceFile {
            vertices: 2,
            edges: vec![[0, 0, 1, 1]],
            facility_costs: None,
            capacities: None,
            scale_denominator: 1,
            root: None,
        };
        assert!(bad.to_graph::<f64>().is_err());
    }

    #[test]
    fn request_indices_checked() {
        assert!(parse_requests(r#"[{"arrival_index":1,"terminal":0}]"#).is_err());
        let r = parse_requests(r#"[{"arrival_index":0,"client":3}]"#).unwrap();
        assert_eq!(requests_to_json(&r), "[\n  {\n    \"arrival_index\": 0,\n    \"client\": 3\n  }\n]\n");
    }
}
