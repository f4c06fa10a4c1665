//! One module per subcommand family.

pub mod corpus;
pub mod evaluate;
pub mod features;
pub mod model;
pub mod ratings;
pub mod run;
