/// Size guards shared by every exhaustive computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest number of free atoms in an enumerated interval.
    pub max_interval: usize,
    /// Largest domain that is expanded into explicit satisfiers.
    pub max_domain: usize,
    /// Largest signature accepted by the pair sweeps.
    pub max_sweep_atoms: usize,
    /// Largest number of visited sets in a reachability search.
    pub max_states: usize,
    /// Largest target set for the brute-force level-map search.
    pub max_kappa_atoms: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_interval: 24,
            max_domain: 20,
            max_sweep_atoms: 12,
            max_states: 1 << 20,
            max_kappa_atoms: 6,
        }
    }
}
