pub mod contrast;
pub mod error;
pub mod far_field;
pub mod io;
pub mod pswf;
pub mod quadrature;
pub mod reconstruction;
pub mod specfun;
pub mod tridiag;

pub use error::{Error, Result};
