//! Prompt assets checked against literal copies of their system prompts, frozen
//! digests, and the typed values of every few-shot answer.

mod common;

use std::time::Instant;

use common::prompts::*;
use recomb_core::blob::sha256_hex;
use recomb_core::prompt::{TemplateId, TemplateLibrary};

#[test]
fn system_prompts_match_literal_copies() {
    let lib = TemplateLibrary::builtin();
    let expected = [
        (TemplateId::Extract, EXTRACT_SYSTEM),
        (TemplateId::Recommend, RECOMMEND_SYSTEM),
        (TemplateId::Recombine, RECOMBINE_SYSTEM),
        (TemplateId::MatchLayout, MATCH_LAYOUT_SYSTEM),
        (TemplateId::GenLayout, GEN_LAYOUT_SYSTEM),
    ];
    for (id, text) in expected {
        assert_eq!(lib.get(id).system, text, "{id}");
    }
}

#[test]
fn assets_match_frozen_digests() {
    for (id, digest) in DIGESTS {
        assert_eq!(sha256_hex(TemplateLibrary::builtin_asset(id).as_bytes()), digest, "{id}");
    }
}

#[test]
fn serialized_templates_are_byte_identical() {
    let lib = TemplateLibrary::builtin();
    for id in TemplateId::ALL {
        assert_eq!(lib.get(id).to_asset_text(), TemplateLibrary::builtin_asset(id));
    }
}

#[test]
fn every_few_shot_answer_parses_to_its_documented_value() {
    let start = Instant::now();
    let lib = TemplateLibrary::builtin();
    let corpus = common::golden::load();
    let checked = common::golden::check(&lib, &corpus).unwrap();
    assert_eq!(checked, 26);
    assert!(start.elapsed().as_secs_f64() < 1.0);
}

#[test]
fn wooden_table_and_panda_layouts() {
    let lib = TemplateLibrary::builtin();
    let table = recomb_core::prompt::parse_layout_response(&lib.get(TemplateId::MatchLayout).shots[1].1).unwrap();
    assert_eq!(table[0].name, "wooden table");
    assert_eq!(table[0].bbox.to_array(), [0.219, 0.0, 0.562, 1.0]);
    assert_eq!(table[1].bbox.to_array(), [0.402, 0.138, 0.195, 0.195]);
    assert_eq!(table[2].bbox.to_array(), [0.402, 0.667, 0.195, 0.195]);

    let pandas = recomb_core::prompt::parse_layout_response(&lib.get(TemplateId::GenLayout).shots[5].1).unwrap();
    let names: Vec<&str> = pandas.iter().map(|e| e.name.as_str()).collect();
    assert_eq!(names, ["panda", "panda"]);
    assert_eq!(pandas[0].bbox.to_array(), [0.059, 0.335, 0.414, 0.441]);
    assert_eq!(pandas[1].bbox.to_array(), [0.516, 0.338, 0.434, 0.432]);
}
