use proptest::prelude::*;
use recomb_core::prompt::{
    format_layout_response, parse_keyword_response, parse_layout_response,
    parse_layout_response_with_canvas, parse_object_list, parse_recombination_response,
};
use recomb_core::BBox;

fn layout_fragment() -> impl Strategy<Value = String> {
    prop_oneof![
        Just("[".to_string()),
        Just("]".to_string()),
        Just("(".to_string()),
        Just(")".to_string()),
        Just(", ".to_string()),
        Just("'".to_string()),
        Just("\"".to_string()),
        Just("('cat', [0.1, 0.2, 0.3, 0.4])".to_string()),
        Just("Caption:".to_string()),
        Just("Objects:".to_string()),
        Just("1. ".to_string()),
        Just("\n".to_string()),
        Just("Subject matter: ".to_string()),
        Just("NaN".to_string()),
        Just("1e308".to_string()),
        Just("-7".to_string()),
        "[a-z ]{0,8}",
        any::<f64>().prop_map(|v| v.to_string()),
        "\\PC{0,6}",
    ]
}

fn adversarial_text() -> impl Strategy<Value = String> {
    prop_oneof![
        "\\PC{0,200}",
        prop::collection::vec(layout_fragment(), 0..40).prop_map(|v| v.concat()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn parsers_never_panic(text in adversarial_text(), canvas in 0u32..2048) {
        let _ = parse_keyword_response(&text);
        let _ = parse_recombination_response(&text);
        let _ = parse_object_list(&text);
        let _ = parse_layout_response(&text);
        if let Ok(entries) = parse_layout_response_with_canvas(&text, canvas) {
            for e in entries {
                prop_assert!(e.bbox.is_valid(), "{:?}", e);
            }
        }
    }
}

fn arb_entry() -> impl Strategy<Value = (String, BBox)> {
    (
        "[a-z][a-z ]{0,10}[a-z]",
        0.01f64..1.0,
        0.01f64..1.0,
        0.0f64..1.0,
        0.0f64..1.0,
    )
        .prop_map(|(name, w, h, fx, fy)| (name, BBox::new(fx * (1.0 - w), fy * (1.0 - h), w, h)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn formatted_layouts_parse_back(entries in prop::collection::vec(arb_entry(), 1..8)) {
        let text = format_layout_response(&entries);
        let parsed = parse_layout_response(&text).unwrap();
        prop_assert_eq!(parsed.len(), entries.len());
        for (p, (name, b)) in parsed.iter().zip(&entries) {
            prop_assert_eq!(&p.name, name);
            for (got, want) in p.bbox.to_array().iter().zip(b.to_array()) {
                prop_assert!((got - want).abs() <= 1e-3 + 1e-12, "{} vs {}", got, want);
            }
        }
    }
}

#[test]
fn layout_answer_inside_prose() {
    let text = "Sure! Here you go:\n[('dog', [0.1, 0.2, 0.3, 0.4]), ('ball', [0.5, 0.5, 0.2, 0.2])]\nEnjoy.";
    let parsed = parse_layout_response(text).unwrap();
    assert_eq!(parsed.len(), 2);
    assert_eq!(parsed[1].name, "ball");
}

#[test]
fn pixel_layouts_are_rescaled() {
    let parsed = parse_layout_response("[('dog', [100, 200, 300, 400])]").unwrap();
    assert!(parsed[0].pixel_input && parsed[0].clamped);
    let [x, y, w, h] = parsed[0].bbox.to_array();
    assert!((x - 100.0 / 512.0).abs() < 1e-12);
    assert!((y - 200.0 / 512.0).abs() < 1e-12);
    assert!((w - 300.0 / 512.0).abs() < 1e-12);
    assert!((h - 312.0 / 512.0).abs() < 1e-12);
}

#[test]
fn truncated_answers_are_errors() {
    assert!(parse_layout_response("[('dog', [0.1, 0.2, 0.3").is_err());
    assert!(parse_layout_response("no layout here").is_err());
    assert!(parse_recombination_response("").is_err());
}
