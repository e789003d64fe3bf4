//! Hamburger-cheeseburger words, FK-decorated planar maps, and the fully
//! packed loop O(n) boundary partition function `F_l`.

pub mod analytics;
pub mod cli;
pub mod words;
pub mod maps;
pub mod par;
pub mod enumeration;
pub mod walks;
