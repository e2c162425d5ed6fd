//! General numerical building blocks.

pub mod dd;
pub mod quadrature;
pub mod roots;
