pub mod field;
pub mod linalg;
pub mod poly;
pub mod hyperelliptic;
pub mod tractable;
pub mod trigonal;
pub mod construction;
pub mod isogeny;
pub mod survey;
pub mod report;
