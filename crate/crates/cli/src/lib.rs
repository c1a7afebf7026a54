//! Library surface of the kudla-lab command line tool: report records,
//! verification suites and flag parsing helpers, shared with the
//! integration tests.

pub mod cxarg;
pub mod quad;
pub mod report;
pub mod suites;
