pub mod bounds;
pub mod complexity;
pub mod discrepancy;
pub mod lemmas;
pub mod report;
pub mod sums;
