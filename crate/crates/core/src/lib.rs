pub mod analytic;
pub mod cli;
pub mod control;
pub mod designer;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod oracle;
pub mod quadrature;
pub mod rootfind;
pub mod zeta;
