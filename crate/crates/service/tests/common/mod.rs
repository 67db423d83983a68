#![allow(dead_code)]

pub mod client;
