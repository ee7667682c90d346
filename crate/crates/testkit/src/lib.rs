//! Fixtures, random instance generators and brute-force oracles shared by
//! the foonplan test suites.

pub mod fixtures;
pub mod oracle;
pub mod random;
