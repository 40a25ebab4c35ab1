/// Size limits for the expensive searches.
///
/// `CYCLOSEP_SEARCH_BUDGET`, when set to an integer, overrides
/// [`Budget::search_nodes`] in [`Budget::from_env`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Budget {
    /// Largest degree accepted by the isomorphism and automorphism searches.
    pub max_search_degree: usize,
    /// Node limit for any single backtracking search.
    pub search_nodes: u64,
    /// Largest group order enumerated element by element.
    pub group_elements: u64,
    /// Largest degree accepted by the 2-extension.
    pub max_extension_degree: usize,
    /// Largest degree for the scheme builders.
    pub max_build_degree: usize,
    /// Largest number of bijections returned by a listing search.
    pub max_listed: usize,
}

pub const BUDGET_ENV: &str = "CYCLOSEP_SEARCH_BUDGET";

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_search_degree: 40,
            search_nodes: 50_000_000,
            group_elements: 10_000_000,
            max_extension_degree: 40,
            max_build_degree: 1024,
            max_listed: 100_000,
        }
    }
}

impl Budget {
    pub fn from_env() -> Self {
        let mut b = Self::default();
        if let Some(nodes) = std::env::var(BUDGET_ENV).ok().and_then(|v| v.trim().parse().ok()) {
            b.search_nodes = nodes;
        }
        b
    }
}
