pub mod csvfmt;
pub mod error;
pub mod majorana;
pub mod metrology;
pub mod multipole;
pub mod optim;
pub mod poly;
pub mod reference;
pub mod search;
pub mod special;
pub mod spin;

pub use error::{Error, Result};
