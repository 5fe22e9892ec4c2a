use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Algorithm {
    /// Plain loop-checked construction with approximate answers.
    One,
    /// Adds the two provably-correct shortcuts (exact non-termination and
    /// L-free skipping of single-subgoal variant loops).
    Two,
}

/// How argument growth is judged along a window when delaying cuts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Growth {
    /// Size strictly increases between every pair of consecutive loop goals.
    Strict,
    /// Size increases between at least one pair and never decreases.
    Some,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Config {
    /// Minimum number of same-clause loop goals before a derivation is cut (≥ 3).
    pub repetition: usize,
    pub algorithm: Algorithm,
    /// Delay cuts until growing arguments reach the deepest nesting seen in clause heads.
    pub heuristic1: bool,
    pub occurs_check: bool,
    /// Safety valve on the number of tree nodes.
    pub max_nodes: usize,
    /// Override for the substitution-chain length that counts as consuming an
    /// input variable; defaults to `repetition - 1`.
    pub cprime_steps: Option<usize>,
    pub growth: Growth,
    /// Retain the whole generalized tree for tracing and inspection.
    pub trace: bool,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            repetition: 3,
            algorithm: Algorithm::Two,
            heuristic1: true,
            occurs_check: true,
            max_nodes: 100_000,
            cprime_steps: None,
            growth: Growth::Strict,
            trace: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("repetition number must be at least 3, got {0}")]
    Repetition(usize),
    #[error("max_nodes must be positive")]
    MaxNodes,
    #[error("cprime step threshold must be positive")]
    CprimeSteps,
}

impl Config {
    pub fn with_algorithm(mut self, algorithm: Algorithm) -> Self {
        self.algorithm = algorithm;
        self
    }

    pub fn with_heuristic1(mut self, on: bool) -> Self {
        self.heuristic1 = on;
        self
    }

    pub fn with_trace(mut self, on: bool) -> Self {
        self.trace = on;
        self
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.repetition < 3 {
            return Err(ConfigError::Repetition(self.repetition));
        }
        if self.max_nodes == 0 {
            return Err(ConfigError::MaxNodes);
        }
        if self.cprime_steps == Some(0) {
            return Err(ConfigError::CprimeSteps);
        }
        Ok(())
    }

    pub fn cprime_threshold(&self) -> usize {
        self.cprime_steps.unwrap_or(self.repetition - 1)
    }
}
