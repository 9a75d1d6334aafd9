use serde_json::json;

use super::graph::Vertex;
use crate::error::{rejected, Result};

/// Sorted, duplicate-free set of vertex labels.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Support(Vec<Vertex>);

impl Support {
    pub fn new(mut indices: Vec<Vertex>, d: usize) -> Result<Self> {
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(rejected("support has duplicate indices"));
        }
        if indices.first().is_some_and(|&i| i == 0) || indices.last().is_some_and(|&i| i > d) {
            return Err(rejected(format!("support {indices:?} not within [1, {d}]")));
        }
        Ok(Self(indices))
    }

    /// Caller guarantees sorted, distinct, in-range labels.
    pub(crate) fn from_sorted(indices: Vec<Vertex>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        Self(indices)
    }

    pub fn indices(&self) -> &[Vertex] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.0.binary_search(&v).is_ok()
    }
}

/// `{"supports":[[i1,..,is],..]}` in the given (canonical) order.
pub fn supports_to_json(supports: &[Support]) -> String {
    let lists: Vec<&[Vertex]> = supports.iter().map(Support::indices).collect();
    json!({ "supports": lists }).to_string()
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = match acc.checked_mul(u128::from(n - i)) {
            Some(v) => v / u128::from(i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn support_is_sorted_and_validated() {
        let s = Support::new(vec![3, 1, 2], 4).unwrap();
        assert_eq!(s.indices(), &[1, 2, 3]);
        assert!(Support::new(vec![1, 1], 4).is_err());
        assert!(Support::new(vec![0, 1], 4).is_err());
        assert!(Support::new(vec![5], 4).is_err());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(6, 4), 15);
        assert_eq!(binomial(15, 10), 3003);
        assert_eq!(binomial(4, 5), 0);
        assert_eq!(binomial(60, 30), 118264581564861424);
    }

    #[test]
    fn json_layout() {
        let s = vec![Support::new(vec![1, 2], 3).unwrap(), Support::new(vec![2, 3], 3).unwrap()];
        assert_eq!(supports_to_json(&s), r#"{"supports":[[1,2],[2,3]]}"#);
    }
}
