#![allow(dead_code)]

pub mod oracle;
pub mod ledgers;
pub mod trials;
pub mod model;
