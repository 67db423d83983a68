#![allow(dead_code)]

pub mod geometry;
pub mod golden;
pub mod prompts;
