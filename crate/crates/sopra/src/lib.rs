//! File formats and the command line for social-practice knowledge bases.
//!
//! The engine itself lives in [`sopra_core`], which needs only `alloc`. This
//! crate adds what needs `std`: the `.sopra` text format ([`scenario`]), its
//! JSON mirror ([`json`]), text/JSON renderings of results ([`render`]) and
//! the `sopra` binary's command handling ([`cli`]).
//!
//! ```
//! let kb = sopra::scenario::parse(
//!     "[activities]\nactivity Commute\nactivity Drive\nactivity Cycle\n\
//!      [implementations]\nimplementation Drive Commute type=allOf\n\
//!      implementation Cycle Commute type=allOf\n",
//! )
//! .unwrap();
//! assert!(sopra_core::validate(&kb).is_valid());
//! assert_eq!(sopra::scenario::parse(&sopra::scenario::serialize(&kb)).unwrap(), kb);
//! ```

pub mod cli;
pub mod json;
pub mod render;
pub mod scenario;

pub use sopra_core;
