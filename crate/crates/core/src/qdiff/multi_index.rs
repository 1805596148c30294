use std::fmt;

/// Exponents `τ = (τ₀, …, τₙ)` of `y, σy, …, σⁿy` in a monomial, trailing
/// zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(mut tau: Vec<u32>) -> Self {
        while tau.last() == Some(&0) {
            tau.pop();
        }
        Self(tau)
    }

    /// The empty index: a monomial free of `y`.
    pub fn constant() -> Self {
        Self(Vec::new())
    }

    /// `σʲy`.
    pub fn shift(j: usize) -> Self {
        let mut v = vec![0; j + 1];
        v[j] = 1;
        Self(v)
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, j: usize) -> u32 {
        self.0.get(j).copied().unwrap_or(0)
    }

    /// Total degree `|τ|` in the `y` variables.
    pub fn height(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Shift weight `w(τ) = Σ j·τⱼ`.
    pub fn weight(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .map(|(j, &t)| j as u64 * u64::from(t))
            .sum()
    }

    /// Largest shift present, `None` for the constant index.
    pub fn order(&self) -> Option<usize> {
        if self.0.is_empty() {
            None
        } else {
            Some(self.0.len() - 1)
        }
    }

    pub fn product(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        Self::new((0..n).map(|j| self.get(j) + other.get(j)).collect())
    }

    pub(crate) fn with_entry(&self, j: usize, value: u32) -> Self {
        let mut v = self.0.clone();
        if v.len() <= j {
            v.resize(j + 1, 0);
        }
        v[j] = value;
        Self::new(v)
    }
}

impl fmt::Display for MultiIndex {
    /// `y0^2*y1`, or `1` for the constant index.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &t)| t > 0)
            .map(|(j, &t)| {
                if t == 1 {
                    format!("y{j}")
                } else {
                    format!("y{j}^{t}")
                }
            })
            .collect();
        if parts.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&parts.join("*"))
        }
    }
}
