pub mod algebra;
pub mod cmrep;
pub mod cylinder;
pub mod gen;
pub mod homotopy;
pub mod io;
pub mod limits;
pub mod net;
pub mod par;
pub mod poset;
pub mod report;

pub use par::Exec;
pub use report::{Check, Report};
