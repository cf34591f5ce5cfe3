pub mod laurent;
pub mod linalg;
pub mod rational;
