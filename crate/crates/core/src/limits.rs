/// Resource caps shared by the algebra kernels and the driver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_degree: u32,
    pub max_basis: usize,
    pub oracle_k: usize,
    pub max_blowups: usize,
    pub max_depth: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_degree: 32,
            max_basis: 4096,
            oracle_k: 8,
            max_blowups: 256,
            max_depth: 32,
        }
    }
}
