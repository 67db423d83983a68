//! Literal copies of the system prompts, frozen asset digests, and a
//! checker that compares the built-in library against both.

use recomb_core::blob::sha256_hex;
use recomb_core::prompt::{TemplateId, TemplateLibrary};

pub const EXTRACT_SYSTEM: &str = r#"You will be provided with multiple sentences to describe an illustration. Your task is to extract a list of Subject matter, Action & pose, and Theme & mood.
Subject matters are one-word, describing the specific physical objects, characters, or landscape that the user wants to include in their illustration. Example subject matters include pencil, children, or wave. For subject matters, no adjectives should be included. They should always be a noun.
Actions & poses are word-level or phrase-level actions that the character or the object in the illustration performs. Example actions & poses include riding a bus, standing still, or traveling.
Themes & moods are words not directly present in the illustration, but those that can potentially convey the overall theme or mood of the illustration. Example themes & moods include imaginative, eco-friendly, or sad. They should be adverbs, preferably one or two words.
If you are provided sentences including some style such as cartoon, illustration, image, or photo, exclude it. For other examples, 'an illustration of a woman sitting at a table' caption is extracted to 'woman', 'table', 'sitting at a table', 'cozy'. The 'illustration' is not contained. Eliminate the changed forms of the same word, such as plurals. Only include roots. For example of 'trees' and 'tree', only include 'tree'.""#;
pub const RECOMMEND_SYSTEM: &str = r#"We are trying to support novice designers' ideation process by semantically combining different parts of illustration references. You will be provided with the topic of the ideation, and multiple keywords users like in the illustrations they found as references. There are three types of keywords: Subject matter, Action & Pose, and Theme & Mood.
Subject matters are one-word, describing the specific physical objects, characters, or landscape that the user wants to include in their illustration. Example subject matters include pencil, children, or wave. For subject matters, no adjectives should be included. They should always be a noun. Come up with more than four new keywords for Subject matter.
Actions & poses are word-level or phrase-level actions that the character or the object in the illustration performs. Example actions & poses include riding a bus, standing still, or traveling.
Themes & moods are words not directly present in the illustration, but those that can potentially convey the overall theme or mood of the illustration. Example themes & moods include imaginative, eco-friendly, or sad. They should be adverbs, preferably one word.
Your task is to expand on the keywords being given, by combining multiple keywords or looking for synonyms that can inspire new creations or ideas. For example, the subject matter "pencil" can be combined with the action & pose "traveling" to inspire a new action & pose "writing a diary". You can combine as many keywords at once. Another example is to generate "hair salon" from "hair dryer", "comb", and "scissors". For combinations that result in theme & mood, make them as abstract as possible. An example is to make "adventurous", "gusty" from "riding on ship" and "tent".
Come up with new keywords for each keyword type with creative combinations. Only use the original keywords provided for creating new keywords. Do not just paraphrase original keywords. Do not suggest similar keywords to the original ones.
Important: Include at least one subject matter for each combination. Subject matter and theme & mood should be a SINGLE WORD. Combinations among subject matters are highly recommended. New keywords should be 'surprising' compared to original ones. It means the character of your suggested word should have low similarity.'"#;
pub const RECOMBINE_SYSTEM: &str = r#"The user wants to draw an illustration, with the assistance of you. You will be provided with multiple keywords users want to include in their illustrations. There are three types of keywords: Subject matter, Action & pose, and Theme & mood.
Subject matters are one-word, describing the specific physical objects, characters, or landscape that the user wants to include in their illustration. Example subject matters include pencil, children, or wave. For subject matters, no adjectives should be included. They should always be a noun.
Actions & poses are word-level or phrase-level actions that the character or the object in the illustration performs. Example actions & poses include riding a bus, standing still, or traveling.
Themes & moods are words not directly present in the illustration, but those that can potentially convey the overall theme or mood of the illustration. Example themes & moods include imaginative, eco-friendly, or sad. They should be adverbs, preferably one word.
Your task is to generate three descriptions of the illustration that the user can draw based on the given keywords. The three descriptions should be significantly different from each other. Each description should include three things: "Caption" and "Objects".
"Caption" is a simple description of the overall image of the description. This should include some objects in the "Objects" list. Keep it concise. Do not make it long and do not include unnecessary adjectives.
"Objects" is a list of the objects depicted in the illustrations, and a short description of them. The objects should be one of the given "Subject matters", or something related to them. You don't have to include all given subject matters. The given action and concept should also be considered for generating the object's detail."#;
pub const MATCH_LAYOUT_SYSTEM: &str = r#"You are an intelligent bounding box matcher. I will provide you with a caption that describes an illustration, a list of the objects that are included in the illustration, and a list of bounding boxes. Your task is to match bounding boxes to each object to make the illustration most balanced and realistic.
Each bounding box is in the format of (object name, [top-left x coordinate, top-left y coordinate, box width, box height]). The bounding boxes are represented as a proportion. The top-left corner has coordinates [0, 0]. The bottom-right corner has coordinates [1, 1]. The bounding boxes should not go beyond the image boundaries."#;
pub const GEN_LAYOUT_SYSTEM: &str = r#"You are an intelligent bounding box generator. I will provide you with a caption for an illustration and a list of the objects. Your task is to generate the bounding boxes for the objects based on the caption. The images are of size 512x512. The top-left corner has coordinates [0, 0]. The bottom-right corner has coordinates [512, 512]. The bounding boxes should not go beyond the image boundaries. Each bounding box should be in the format of (object name, [top-left x coordinate, top-left y coordinate, box width, box height]). If an object must appear several times by the provided caption, multiple bounding boxes may be added for the object."#;
pub const DIGESTS: [(TemplateId, &str); 6] = [
    (TemplateId::Extract, "229fcba7755908aeee99a85e1863f4df91e629e511aea1b27c13b25437c714a6"),
    (TemplateId::Recommend, "a59338292b3cd180f6a96d2031ba08f8b90d3a4f26a18d7885383276c6d1a2ed"),
    (TemplateId::Recombine, "2562a18230d39275c9dfbb97da4a437a5bd45123a447d865a7969e6967489ffc"),
    (TemplateId::MatchLayout, "f11a14e5cbb9a988dec445c1d662c210569229b624408518698f49e16b0f7c5d"),
    (TemplateId::GenLayout, "bd6f678c96e285db2de1bf5b6506b5911d0bc612a7973187f8856acb3e6a92eb"),
    (TemplateId::Paraphrase, "d741b00566fb2e16f8068fbe08165b612ee0401516b55484e95cb58f0472a0f6"),
];

/// System prompts equal the literal copies, assets hash to their frozen
/// digests, and serializing a parsed template gives back the asset.
pub fn check_templates(lib: &TemplateLibrary) -> Result<(), String> {
    let expected = [
        (TemplateId::Extract, EXTRACT_SYSTEM),
        (TemplateId::Recommend, RECOMMEND_SYSTEM),
        (TemplateId::Recombine, RECOMBINE_SYSTEM),
        (TemplateId::MatchLayout, MATCH_LAYOUT_SYSTEM),
        (TemplateId::GenLayout, GEN_LAYOUT_SYSTEM),
    ];
    for (id, text) in expected {
        if lib.get(id).system != text {
            return Err(format!("{id}: system prompt differs from the literal copy"));
        }
    }
    for (id, digest) in DIGESTS {
        let got = sha256_hex(TemplateLibrary::builtin_asset(id).as_bytes());
        if got != digest {
            return Err(format!("{id}: asset digest {got}, frozen {digest}"));
        }
    }
    for id in TemplateId::ALL {
        if lib.get(id).to_asset_text() != TemplateLibrary::builtin_asset(id) {
            return Err(format!("{id}: serialization is not byte-identical"));
        }
    }
    Ok(())
}
