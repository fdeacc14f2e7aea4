use serde::{Deserialize, Serialize};

use super::{mutate_x, ClusterError};
use crate::quiver::{check_permutation, invert_permutation, Quiver};
use crate::ratfun::{RationalFunction, Scalar};

/// One instruction of a cluster program.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Step {
    /// X-mutation at a vertex with respect to the current quiver.
    Mutate(usize),
    /// `out[i] = in[p[i]]`.
    Permute(Vec<usize>),
}

/// A self-map or transition map of cluster X-spaces stored as a program.
///
/// `snapshots[s]` is the quiver in force before step `s`, so a program can
/// be executed without recomputing mutations and its consistency can be
/// re-checked after deserialization.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterMap {
    initial: Quiver,
    steps: Vec<Step>,
    snapshots: Vec<Quiver>,
    #[serde(rename = "final")]
    final_quiver: Quiver,
}

/// Component functions of a [`ClusterMap`].
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicMap {
    pub components: Vec<RationalFunction>,
    /// `false` when some component exceeded the term cap and is unreduced.
    pub reduced: bool,
}

impl SymbolicMap {
    /// One `y<i> -> formula` line per component.
    pub fn render(&self) -> String {
        self.components.iter().enumerate().map(|(i, f)| format!("y{} -> {f}\n", i + 1)).collect()
    }
}

impl ClusterMap {
    pub fn identity(q: Quiver) -> Self {
        ClusterMap { initial: q.clone(), steps: Vec::new(), snapshots: Vec::new(), final_quiver: q }
    }

    pub fn initial(&self) -> &Quiver {
        &self.initial
    }

    pub fn final_quiver(&self) -> &Quiver {
        &self.final_quiver
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn dimension(&self) -> usize {
        self.initial.len()
    }

    pub fn mutation_count(&self) -> usize {
        self.steps.iter().filter(|s| matches!(s, Step::Mutate(_))).count()
    }

    /// `true` when the final exchange matrix equals the initial one.
    pub fn is_self_map(&self) -> bool {
        self.initial.same_matrix(&self.final_quiver)
    }

    pub fn push_mutate(&mut self, k: usize) -> Result<(), ClusterError> {
        let next = self.final_quiver.mutate(k)?;
        self.snapshots.push(std::mem::replace(&mut self.final_quiver, next));
        self.steps.push(Step::Mutate(k));
        Ok(())
    }

    pub fn push_permute(&mut self, perm: Vec<usize>) -> Result<(), ClusterError> {
        let next = self.final_quiver.pull_back(&perm)?;
        self.snapshots.push(std::mem::replace(&mut self.final_quiver, next));
        self.steps.push(Step::Permute(perm));
        Ok(())
    }

    /// Runs `self` and then `next`.
    pub fn then(&self, next: &ClusterMap) -> Result<Self, ClusterError> {
        if !self.final_quiver.same_matrix(&next.initial) {
            return Err(ClusterError::Inconsistent("composed programs do not share a quiver".into()));
        }
        let mut out = self.clone();
        out.steps.extend(next.steps.iter().cloned());
        out.snapshots.extend(next.snapshots.iter().cloned());
        out.final_quiver = next.final_quiver.clone();
        Ok(out)
    }

    /// The same map in coordinates where new variable `i` is old variable
    /// `order[i]`.
    pub fn relabeled(&self, order: &[usize]) -> Result<Self, ClusterError> {
        check_permutation(order, self.dimension())?;
        let start = self.initial.pull_back(order)?;
        let mut out = ClusterMap::identity(start);
        out.push_permute(invert_permutation(order))?;
        let mut out = out.then(self)?;
        out.push_permute(order.to_vec())?;
        Ok(out)
    }

    /// Executes the program on a point of any scalar kind.
    pub fn apply<S: Scalar>(&self, point: &[S]) -> Result<Vec<S>, ClusterError> {
        let l = self.dimension();
        if point.len() != l {
            return Err(ClusterError::LengthMismatch { expected: l, got: point.len() });
        }
        let mut y = point.to_vec();
        for (s, (step, q)) in self.steps.iter().zip(&self.snapshots).enumerate() {
            y = match step {
                Step::Mutate(k) => mutate_x(&y, q, *k).map_err(|e| match e {
                    ClusterError::Singular { vertex, .. } => ClusterError::Singular { step: s, vertex },
                    other => other,
                })?,
                Step::Permute(p) => p.iter().map(|&i| y[i].clone()).collect(),
            };
        }
        Ok(y)
    }

    /// The component rational functions, obtained by running the program on
    /// the coordinate functions.
    pub fn symbolic(&self) -> Result<SymbolicMap, ClusterError> {
        let components = self.apply(&RationalFunction::coordinates(self.dimension()))?;
        let reduced = components.iter().all(RationalFunction::is_reduced);
        Ok(SymbolicMap { components, reduced })
    }

    /// Re-derives every snapshot from the initial quiver and the steps.
    pub fn verify(&self) -> Result<(), ClusterError> {
        if self.snapshots.len() != self.steps.len() {
            return Err(ClusterError::Inconsistent("one quiver snapshot per step is required".into()));
        }
        let mut q = self.initial.clone();
        for (s, (step, snap)) in self.steps.iter().zip(&self.snapshots).enumerate() {
            if !q.same_matrix(snap) {
                return Err(ClusterError::Inconsistent(format!("snapshot before step {s} does not match")));
            }
            q = match step {
                Step::Mutate(k) => q.mutate(*k)?,
                Step::Permute(p) => q.pull_back(p)?,
            };
        }
        if !q.same_matrix(&self.final_quiver) {
            return Err(ClusterError::Inconsistent("final quiver does not match".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ClusterError> {
        let m: ClusterMap = serde_json::from_str(text).map_err(|e| ClusterError::Json(e.to_string()))?;
        m.verify()?;
        Ok(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn q2() -> Quiver {
        Quiver::unlabeled(vec![vec![0, 1], vec![-1, 0]]).unwrap()
    }

    #[test]
    fn identity_applies_trivially() {
        let m = ClusterMap::identity(q2());
        let p = [Complex64::new(2.0, 1.0), Complex64::new(-3.0, 0.5)];
        assert_eq!(m.apply(&p).unwrap(), p.to_vec());
        let s = m.symbolic().unwrap();
        assert_eq!(s.components, RationalFunction::coordinates(2));
        assert!(s.reduced);
    }

    #[test]
    fn snapshots_track_mutations() {
        let mut m = ClusterMap::identity(q2());
        m.push_mutate(0).unwrap();
        m.push_permute(vec![1, 0]).unwrap();
        assert_eq!(m.final_quiver().epsilon(), &[vec![0, 1], vec![-1, 0]]);
        assert!(m.is_self_map());
        m.verify().unwrap();
        let text = m.to_json().to_string();
        assert!(text.contains("{\"mutate\":0}"));
        assert!(text.contains("{\"permute\":[1,0]}"));
        assert_eq!(ClusterMap::from_json(&text).unwrap(), m);
    }

    #[test]
    fn tampered_program_is_rejected() {
        let a2 = Quiver::unlabeled(vec![vec![0, 1, 0], vec![-1, 0, 1], vec![0, -1, 0]]).unwrap();
        let mut m = ClusterMap::identity(a2);
        m.push_mutate(0).unwrap();
        let mut v = m.to_json();
        v["steps"][0] = serde_json::json!({"mutate": 1});
        assert!(matches!(ClusterMap::from_json(&v.to_string()), Err(ClusterError::Inconsistent(_))));
    }

    #[test]
    fn singular_step_is_located() {
        let mut m = ClusterMap::identity(q2());
        m.push_mutate(0).unwrap();
        m.push_mutate(1).unwrap();
        // the first step sends y2 to y2 (1 + y1) = -1
        let p = [Complex64::new(1.0, 0.0), Complex64::new(-0.5, 0.0)];
        match m.apply(&p) {
            Err(ClusterError::Singular { step, vertex }) => assert_eq!((step, vertex), (1, 1)),
            other => panic!("expected a singular step, got {other:?}"),
        }
    }

    #[test]
    fn relabeling_conjugates() {
        let mut m = ClusterMap::identity(q2());
        m.push_mutate(0).unwrap();
        let r = m.relabeled(&[1, 0]).unwrap();
        let p = [Complex64::new(2.0, 0.0), Complex64::new(3.0, 0.0)];
        let a = m.apply(&p).unwrap();
        let b = r.apply(&[p[1], p[0]]).unwrap();
        assert!((a[0] - b[1]).norm() < 1e-15 && (a[1] - b[0]).norm() < 1e-15);
    }
}
