//! JSON instance and result files. Rationals are always strings such as `"3/2"`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::certify::{
    verify_dual, verify_half_integral, verify_matching, verify_reported_pair, Certificate,
};
use crate::error::{Error, Result};
use crate::matroid::{validate_instance, ElementSet, Flat, Line, Matroid};
use crate::polytope::{FormalSum, FractionalMatching, MatchingPolytope};
use crate::rational::{self, int, Rational};
use crate::weighted::{solve_max_weight, solve_max_weight_perfect, IterationRecord};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MatroidDef {
    Uniform {
        n: usize,
        k: usize,
    },
    Free {
        n: usize,
    },
    /// Edge `i` is element `i`.
    Graphic {
        vertices: usize,
        edges: Vec<[usize; 2]>,
    },
    LinearGf {
        p: u64,
        columns: Vec<Vec<String>>,
    },
    LinearQ {
        #[serde(default)]
        p: Option<u64>,
        columns: Vec<Vec<String>>,
    },
    Partition {
        blocks: Vec<usize>,
        capacities: Vec<usize>,
    },
}

fn entry(text: &str) -> Result<Rational> {
    rational::parse(text).ok_or_else(|| Error::Parse(format!("not a rational: {text:?}")))
}

impl MatroidDef {
    pub fn build(&self) -> Result<Matroid> {
        match self {
            MatroidDef::Uniform { n, k } => Matroid::uniform(*n, *k),
            MatroidDef::Free { n } => Matroid::free(*n),
            MatroidDef::Graphic { vertices, edges } => {
                Matroid::graphic(*vertices, edges.iter().map(|&[u, v]| (u, v)).collect())
            }
            MatroidDef::LinearGf { p, columns } => {
                let modulus = BigInt::from(*p);
                let columns = columns
                    .iter()
                    .map(|c| {
                        c.iter()
                            .map(|v| {
                                let q = entry(v)?;
                                if !q.is_integer() {
                                    return Err(Error::Parse(format!(
                                        "GF({p}) entry {v:?} is not an integer"
                                    )));
                                }
                                let r = ((q.to_integer() % &modulus) + &modulus) % &modulus;
                                Ok(u64::try_from(r).expect("residue below p"))
                            })
                            .collect::<Result<Vec<u64>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                Matroid::linear_gf(*p, columns)
            }
            MatroidDef::LinearQ { p, columns } => {
                if let Some(p) = p {
                    return Err(Error::InvalidMatroid(format!(
                        "linear_q takes \"p\": null, found {p}; use linear_gf"
                    )));
                }
                let columns = columns
                    .iter()
                    .map(|c| c.iter().map(|v| entry(v)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                Matroid::linear_q(columns)
            }
            MatroidDef::Partition { blocks, capacities } => {
                Matroid::partition(blocks.clone(), capacities.clone())
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub matroid: MatroidDef,
    pub lines: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<String>>,
}

/// A validated instance ready for the solvers.
#[derive(Clone, Debug)]
pub struct Instance {
    pub matroid: Matroid,
    pub lines: Vec<Line>,
    pub weights: Vec<Rational>,
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    pub fn build(&self) -> Result<Instance> {
        let matroid = self.matroid.build()?;
        let n = matroid.ground_size();
        let mut lines = Vec::with_capacity(self.lines.len());
        for ids in &self.lines {
            if let Some(&e) = ids.iter().find(|&&e| e >= n) {
                return Err(Error::ElementOutOfRange {
                    element: e,
                    ground_size: n,
                });
            }
            lines.push(Line::new(ids.iter().copied()));
        }
        validate_instance(&matroid, &lines)?;
        let weights = match &self.weights {
            None => vec![Rational::from_integer(1.into()); lines.len()],
            Some(ws) => {
                if ws.len() != lines.len() {
                    return Err(Error::DimensionMismatch(format!(
                        "{} weights for {} lines",
                        ws.len(),
                        lines.len()
                    )));
                }
                ws.iter().map(|w| entry(w)).collect::<Result<_>>()?
            }
        };
        Ok(Instance {
            matroid,
            lines,
            weights,
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Problem {
    MaxWeight,
    Perfect,
    MaxSize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualTerm {
    pub flat: Vec<usize>,
    pub coeff: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    pub problem: Problem,
    pub objective: String,
    pub matching: BTreeMap<usize, String>,
    pub dual: Vec<DualTerm>,
    pub certificates: Vec<Certificate>,
    pub trace: Vec<IterationRecord>,
}

impl ResultFile {
    pub fn new(
        problem: Problem,
        objective: &Rational,
        x: &FractionalMatching,
        y: &FormalSum,
    ) -> Self {
        ResultFile {
            problem,
            objective: rational::format(objective),
            matching: x
                .values
                .iter()
                .enumerate()
                .map(|(i, v)| (i, rational::format(v)))
                .collect(),
            dual: y
                .iter()
                .map(|(f, c)| DualTerm {
                    flat: f.elements.to_vec(),
                    coeff: rational::format(c),
                })
                .collect(),
            certificates: Vec::new(),
            trace: Vec::new(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("result serializes")
    }

    pub fn objective_value(&self) -> Result<Rational> {
        entry(&self.objective)
    }

    /// The matching as a vector over `lines` entries; missing indices are zero.
    pub fn matching_vector(&self, lines: usize) -> Result<FractionalMatching> {
        let mut x = FractionalMatching::zero(lines);
        for (&i, v) in &self.matching {
            if i >= lines {
                return Err(Error::DimensionMismatch(format!(
                    "matching index {i} with {lines} lines"
                )));
            }
            x.values[i] = entry(v)?;
        }
        Ok(x)
    }

    /// The dual as a formal sum; ranks are recomputed, flatness is left to the verifier.
    pub fn dual_sum(&self, matroid: &Matroid) -> Result<FormalSum> {
        let mut y = FormalSum::new();
        for term in &self.dual {
            let elements: ElementSet = term.flat.iter().collect();
            let rank = matroid.rank(elements)?;
            y.add(Flat { elements, rank }, entry(&term.coeff)?);
        }
        Ok(y)
    }
}

/// Runs `problem` on `instance` and attaches the certificates a result must carry.
pub fn solve(instance: &Instance, problem: Problem, budget: usize) -> Result<ResultFile> {
    let Instance {
        matroid,
        lines,
        weights,
    } = instance;
    let mut result = match problem {
        Problem::MaxWeight | Problem::Perfect => {
            let solution = if problem == Problem::Perfect {
                solve_max_weight_perfect(matroid, lines, weights, budget)?
            } else {
                solve_max_weight(matroid, lines, weights, budget)?
            };
            let mut result = ResultFile::new(
                problem,
                &solution.objective(weights),
                &solution.matching,
                &solution.dual,
            );
            result.trace = solution.trace.records;
            result
        }
        Problem::MaxSize => {
            let polytope = MatchingPolytope::new(matroid, lines, budget)?;
            let (x, nu) = polytope.max_size_matching()?;
            let y = polytope.half_integer_dual(&vec![int(1); lines.len()])?;
            ResultFile::new(problem, &nu, &x, &y)
        }
    };
    result.certificates = result.verify(instance, budget)?;
    Ok(result)
}

impl ResultFile {
    /// Weights the objective refers to: the instance weights, or all ones for max-size.
    fn objective_weights(&self, instance: &Instance) -> Vec<Rational> {
        match self.problem {
            Problem::MaxSize => vec![int(1); instance.lines.len()],
            _ => instance.weights.clone(),
        }
    }

    /// Recomputes every applicable certificate against `instance`.
    pub fn verify(&self, instance: &Instance, budget: usize) -> Result<Vec<Certificate>> {
        let Instance { matroid, lines, .. } = instance;
        let weights = self.objective_weights(instance);
        let x = self.matching_vector(lines.len())?;
        let y = self.dual_sum(matroid)?;
        let perfect = self.problem == Problem::Perfect;
        let mut certificates = vec![
            verify_reported_pair(lines, &weights, &x, &y, &self.objective_value()?),
            verify_matching(matroid, lines, &x, budget)?,
            verify_dual(matroid, lines, &weights, &y, perfect),
        ];
        if self.problem == Problem::MaxSize {
            certificates.push(verify_half_integral(&y));
        }
        Ok(certificates)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    const TRIANGLE: &str =
        r#"{"matroid": {"kind": "free", "n": 3}, "lines": [[0, 1], [1, 2], [0, 2]]}"#;

    #[test]
    fn parses_triangle_with_default_weights() {
        let file = InstanceFile::parse(TRIANGLE).unwrap();
        let inst = file.build().unwrap();
        assert_eq!(inst.matroid.full_rank(), 3);
        assert_eq!(inst.weights, vec![int(1); 3]);
        assert_eq!(InstanceFile::parse(&file.to_json()).unwrap(), file);
    }

    #[test]
    fn matroid_kinds() {
        let cases = [
            (r#"{"kind": "uniform", "n": 4, "k": 2}"#, 2),
            (
                r#"{"kind": "graphic", "vertices": 3, "edges": [[0, 1], [1, 2], [0, 2]]}"#,
                2,
            ),
            (
                r#"{"kind": "linear_gf", "p": 2, "columns": [["1", "0"], ["0", "1"], ["1", "1"]]}"#,
                2,
            ),
            (
                r#"{"kind": "linear_gf", "p": 3, "columns": [["-1"], ["2"]]}"#,
                1,
            ),
            (
                r#"{"kind": "linear_q", "p": null, "columns": [["1/2", "0"], ["1", "0"]]}"#,
                1,
            ),
            (
                r#"{"kind": "linear_q", "columns": [["1", "0"], ["0", "3/4"]]}"#,
                2,
            ),
            (
                r#"{"kind": "partition", "blocks": [2, 1], "capacities": [1, 1]}"#,
                2,
            ),
        ];
        for (text, rank) in cases {
            let spec: MatroidDef = serde_json::from_str(text).unwrap();
            assert_eq!(spec.build().unwrap().full_rank(), rank, "{text}");
        }
        let bad: MatroidDef =
            serde_json::from_str(r#"{"kind": "linear_q", "p": 5, "columns": []}"#).unwrap();
        assert!(bad.build().is_err());
        assert!(serde_json::from_str::<MatroidDef>(r#"{"kind": "vector"}"#).is_err());
    }

    #[test]
    fn rejects_invalid_instances() {
        let err = InstanceFile::parse("{\"matroid\": ").unwrap_err();
        assert!(matches!(err, Error::Parse(ref m) if m.contains("line 1")));
        let wrong_len =
            r#"{"matroid": {"kind": "free", "n": 2}, "lines": [[0, 1]], "weights": ["1", "2"]}"#;
        assert!(InstanceFile::parse(wrong_len).unwrap().build().is_err());
        let out_of_range = r#"{"matroid": {"kind": "free", "n": 2}, "lines": [[0, 5]]}"#;
        assert!(InstanceFile::parse(out_of_range).unwrap().build().is_err());
        let too_big = r#"{"matroid": {"kind": "free", "n": 3}, "lines": [[0, 1, 2]]}"#;
        assert!(matches!(
            InstanceFile::parse(too_big).unwrap().build(),
            Err(Error::NotALine { .. })
        ));
        let bad_weight =
            r#"{"matroid": {"kind": "free", "n": 2}, "lines": [[0, 1]], "weights": ["x"]}"#;
        assert!(InstanceFile::parse(bad_weight).unwrap().build().is_err());
    }

    #[test]
    fn result_round_trip() {
        let m = Matroid::free(3).unwrap();
        let x = FractionalMatching {
            values: vec![ratio(1, 2); 3],
        };
        let y = FormalSum::single(m.flat(m.ground()).unwrap(), ratio(1, 2));
        let file = ResultFile::new(Problem::MaxWeight, &ratio(3, 2), &x, &y);
        let text = file.to_json();
        assert!(text.contains("\"objective\": \"3/2\""));
        let back = ResultFile::parse(&text).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.matching_vector(3).unwrap(), x);
        assert_eq!(back.dual_sum(&m).unwrap(), y);
        assert_eq!(back.objective_value().unwrap(), ratio(3, 2));
    }

    #[test]
    fn solve_and_verify_round_trip() {
        let inst = InstanceFile::parse(TRIANGLE).unwrap().build().unwrap();
        for problem in [Problem::MaxWeight, Problem::Perfect, Problem::MaxSize] {
            let result = solve(&inst, problem, 1000).unwrap();
            assert_eq!(result.objective, "3/2", "{problem:?}");
            assert!(
                result.certificates.iter().all(Certificate::passed),
                "{problem:?}"
            );
            let back = ResultFile::parse(&result.to_json()).unwrap();
            assert_eq!(back, result);
            assert!(back
                .verify(&inst, 1000)
                .unwrap()
                .iter()
                .all(Certificate::passed));
        }
    }

    #[test]
    fn tampering_is_caught() {
        let inst = InstanceFile::parse(TRIANGLE).unwrap().build().unwrap();
        let result = solve(&inst, Problem::MaxWeight, 1000).unwrap();
        let mut objective = result.clone();
        objective.objective = "2".into();
        let certs = objective.verify(&inst, 1000).unwrap();
        assert!(!certs[0].passed());
        let mut dual = result.clone();
        dual.dual[0].coeff = "1/4".into();
        let certs = dual.verify(&inst, 1000).unwrap();
        assert!(!certs[0].passed() || !certs[2].passed());
    }
}
