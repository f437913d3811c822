pub mod algebra;
pub mod cli;
pub mod key;
pub mod numbers;
pub mod recursion;
pub mod oracle;
pub mod q_refinement;
pub mod specialization;
