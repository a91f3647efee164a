//! Seeded corruption of a request sequence into a prediction.

use crate::error::{input, Result};
use crate::graph::{VertexId, WeightedGraph};
use crate::request::{Demand, PredictionSet, Request};
use crate::scalar::Scalar;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    /// Probability of dropping each prediction.
    pub drop_rate: f64,
    /// Spurious predictions added, as a fraction of `|R|` (rounded).
    pub add_rate: f64,
    /// Each prediction moves to a uniform vertex within this distance of
    /// its true position (pairs move both endpoints); 0 keeps it in place.
    pub displacement_radius: f64,
    pub seed: u64,
}

impl Default for Perturbation {
    fn default() -> Self {
        Perturbation { drop_rate: 0.0, add_rate: 0.0, displacement_radius: 0.0, seed: 0 }
    }
}

impl Perturbation {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.drop_rate) {
            return input(format!("drop rate {} outside [0, 1]", self.drop_rate));
        }
        if !(self.add_rate >= 0.0 && self.add_rate.is_finite()) {
            return input(format!("add rate {} must be finite and non-negative", self.add_rate));
        }
        if !(self.displacement_radius >= 0.0) {
            return input(format!("displacement radius {} must be non-negative", self.displacement_radius));
        }
        Ok(())
    }

    /// Displace, then drop, then add. Cost comparisons go through `f64`.
    pub fn apply<T: Scalar>(&self, graph: &WeightedGraph<T>, requests: &[Request]) -> Result<PredictionSet> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let n = graph.vertex_count();
        let metric = graph.metric();
        let mut within: Vec<Option<Vec<VertexId>>> = vec![None; n];
        let mut moved = |v: VertexId, rng: &mut ChaCha8Rng| -> Result<VertexId> {
            if self.displacement_radius <= 0.0 {
                return Ok(v);
            }
            if within[v].is_none() {
                let d = metric.distances_from(v)?;
                let near = (0..n)
                    .filter(|&w| w != v && d[w].finite().is_some_and(|x| x.as_f64() <= self.displacement_radius))
                    .collect();
                within[v] = Some(near);
            }
            Ok(within[v].as_ref().unwrap().choose(rng).copied().unwrap_or(v))
        };
        let mut items = Vec::with_capacity(requests.len());
        for r in requests {
            let d = match &r.demand {
                Demand::Terminal(v) => Demand::Terminal(moved(*v, &mut rng)?),
                Demand::Client(v) => Demand::Client(moved(*v, &mut rng)?),
                Demand::TerminalPair { s, t, priority } => {
                    let s2 = moved(*s, &mut rng)?;
                    let mut t2 = moved(*t, &mut rng)?;
                    if s2 == t2 {
                        t2 = *t;
                    }
                    Demand::TerminalPair { s: s2, t: t2, priority: *priority }
                }
            };
            items.push(d);
        }
        if self.drop_rate > 0.0 {
            items.retain(|_| !rng.gen_bool(self.drop_rate));
        }
        let extra = (self.add_rate * requests.len() as f64).round() as usize;
        let template = requests.first().map(|r| r.demand.clone());
        for _ in 0..extra {
            let d = match template {
                Some(Demand::Terminal(_)) => Demand::Terminal(rng.gen_range(0..n)),
                Some(Demand::Client(_)) => Demand::Client(rng.gen_range(0..n)),
                Some(Demand::TerminalPair { priority, .. }) if n >= 2 => {
                    let s = rng.gen_range(0..n);
                    let mut t = rng.gen_range(0..n - 1);
                    if t >= s {
                        t += 1;
                    }
                    Demand::TerminalPair { s, t, priority }
                }
                _ => break,
            };
            items.push(d);
        }
        Ok(PredictionSet::new(items))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{path, random_graph};
    use crate::request::sequence;
    use num_rational::BigRational;

    type Q = BigRational;

    #[test]
    fn zero_rates_copy_requests() {
        let g: WeightedGraph<Q> = random_graph(&mut ChaCha8Rng::seed_from_u64(1), 8, 3, 5);
        let reqs = sequence((0..6).map(Demand::Terminal));
        let p = Perturbation { seed: 17, ..Default::default() }.apply(&g, &reqs).unwrap();
        assert_eq!(p, PredictionSet::from_requests(&reqs));
    }

    #[test]
    fn displacement_stays_within_radius() {
        let g = path::<Q>(10, Q::from_integer(1.into()));
        let reqs = sequence((0..10).map(Demand::Client));
        let p = Perturbation { displacement_radius: 2.0, seed: 4, ..Default::default() }.apply(&g, &reqs).unwrap();
        for (r, d) in reqs.iter().zip(&p.items) {
            let (a, b) = (r.demand.vertices()[0], d.vertices()[0]);
            assert!(a != b && a.abs_diff(b) <= 2);
        }
    }

    #[test]
    fn seeded_and_rates() {
        let g = path::<Q>(30, Q::from_integer(1.into()));
        let reqs = sequence((0..20).map(Demand::Terminal));
        let pert = Perturbation { drop_rate: 0.5, add_rate: 0.25, displacement_radius: 0.0, seed: 8 };
        let a = pert.apply(&g, &reqs).unwrap();
        assert_eq!(a, pert.apply(&g, &reqs).unwrap());
        assert!(a.len() >= 5 && a.len() < 25);
        assert!(Perturbation { drop_rate: 1.5, ..Default::default() }.validate().is_err());
    }
}
