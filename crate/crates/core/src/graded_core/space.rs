use serde::{Deserialize, Serialize};

/// A finite-dimensional graded vector space given by the degrees of a fixed basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GradedSpace {
    degrees: Vec<i32>,
}

impl GradedSpace {
    pub fn new(degrees: Vec<i32>) -> Self {
        GradedSpace { degrees }
    }

    /// `dim` basis vectors all in degree `d`.
    pub fn concentrated(dim: usize, d: i32) -> Self {
        GradedSpace { degrees: vec![d; dim] }
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    pub fn degree(&self, i: usize) -> i32 {
        self.degrees[i]
    }

    pub fn degrees(&self) -> &[i32] {
        &self.degrees
    }

    /// `W[k]`, where an element of degree `d` in `W` has degree `d - k`.
    pub fn shift(&self, k: i32) -> Self {
        GradedSpace { degrees: self.degrees.iter().map(|d| d - k).collect() }
    }

    pub fn direct_sum(&self, other: &GradedSpace) -> Self {
        let mut degrees = self.degrees.clone();
        degrees.extend_from_slice(&other.degrees);
        GradedSpace { degrees }
    }

    pub fn is_odd(&self, i: usize) -> bool {
        self.degrees[i].rem_euclid(2) == 1
    }
}
