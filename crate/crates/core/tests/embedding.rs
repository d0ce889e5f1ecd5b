mod common;

use proptest::prelude::*;
use revmine::embedding::{
    cosine_of, cosine_similarity, embed, embed_text, preprocess, TextVector, VectorStore,
};

fn fixture_store() -> VectorStore {
    VectorStore::load(&common::fixture_path("vectors50.txt"), 50).unwrap()
}

pub const PASTA_DRAFT: &str =
    "Boil the water with salt in a pot. Add the spaghetti and cook for ten minutes. \
Drain the pasta, then stir in tomato sauce with garlic and basil. Serve with parmesan cheese.";
pub const CAKE_DRAFT: &str =
    "Mix the flour, sugar, cocoa and baking powder. Whisk the eggs with butter, milk and vanilla. \
Bake the chocolate cake in the oven, then add frosting.";

// Sum of the looked-up rows, computed by an independent numpy script over the
// same vector file (tests/fixtures/make_vectors.py).
const PASTA_EMBEDDING: [f64; 50] = [
    4.020322000000001,
    7.704365999999999,
    1.9116639999999996,
    3.0003629999999997,
    7.700818000000002,
    5.346928999999999,
    -20.690871,
    -5.0382679999999995,
    0.3337800000000001,
    -4.132556,
    1.3705509999999996,
    -9.153340000000002,
    7.523277,
    8.865048000000002,
    -7.0415849999999995,
    -11.474946999999998,
    20.947198999999998,
    -5.229161,
    -3.117178000000001,
    16.170612,
    8.867398000000001,
    15.850204999999999,
    4.253926999999999,
    1.7476230000000001,
    -8.488712999999999,
    -8.912328,
    8.097069999999999,
    -11.243238,
    -4.558739,
    -0.4594269999999999,
    16.724410999999996,
    5.406829,
    20.134171,
    6.790941,
    0.44684,
    4.716186,
    -9.020695,
    13.160281999999995,
    0.4466380000000001,
    -9.735579,
    -8.606217,
    6.549785,
    2.958766,
    -3.011129,
    9.961182999999998,
    -4.0104940000000004,
    6.893699000000001,
    -13.54187,
    -5.681452,
    -5.136146000000001,
];

#[test]
fn real_recipe_embedding_matches_oracle() {
    let store = fixture_store();
    let v = embed(PASTA_DRAFT, &store);
    assert_eq!(v.total_tokens, 32);
    assert_eq!(v.matched_tokens, 30);
    for (got, want) in v.components.iter().zip(PASTA_EMBEDDING) {
        assert!((got - want).abs() <= 1e-9, "{got} vs {want}");
    }
}

#[test]
fn revision_and_new_recipe_similarities() {
    let store = fixture_store();
    let draft = embed(PASTA_DRAFT, &store);
    let revision = embed(&format!("{PASTA_DRAFT} Add olive oil and pepper."), &store);
    let cake = embed(CAKE_DRAFT, &store);
    let rev_sim = cosine_similarity(&draft, &revision).unwrap().unwrap();
    let cake_sim = cosine_similarity(&draft, &cake).unwrap().unwrap();
    assert!((rev_sim - 0.9997980973355868).abs() <= 1e-9);
    assert!((cake_sim - 0.10136573991100002).abs() <= 1e-9);
    assert!(rev_sim >= 0.995 && cake_sim < 0.995);
}

fn vec50() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0f64..10.0, 50)
}

proptest! {
    #[test]
    fn cosine_properties(a in vec50(), b in vec50(), lambda in 1e-3f64..1e3) {
        let ab = cosine_of(&a, &b).unwrap();
        let ba = cosine_of(&b, &a).unwrap();
        prop_assert_eq!(ab, ba);
        if let Some(s) = ab {
            prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&s));
            let scaled: Vec<f64> = a.iter().map(|x| x * lambda).collect();
            let s2 = cosine_of(&scaled, &b).unwrap().unwrap();
            prop_assert!((s - s2).abs() <= 1e-12);
        }
    }

    #[test]
    fn embedding_is_additive(words in prop::collection::vec(0usize..8, 0..30), split in 0usize..30) {
        // Dyadic components keep every partial sum exact.
        let rows: Vec<(String, Vec<f64>)> = (0..6)
            .map(|w| (format!("w{w}"), (0..4).map(|d| ((w * 7 + d * 3) % 11) as f64 / 8.0 - 0.5).collect()))
            .collect();
        let store = VectorStore::from_rows(4, rows).unwrap();
        let tokens: Vec<String> = words.iter().map(|w| format!("w{w}")).collect();
        let cut = split.min(tokens.len());
        let whole = embed_text(&tokens, &store);
        let parts: TextVector = &embed_text(&tokens[..cut], &store) + &embed_text(&tokens[cut..], &store);
        prop_assert_eq!(whole, parts);
    }

    #[test]
    fn preprocess_tokens_are_clean(text in "\\PC{0,80}") {
        for t in preprocess(&text) {
            prop_assert!(!t.is_empty());
            prop_assert!(t.chars().all(char::is_alphanumeric));
            prop_assert_eq!(t.to_lowercase(), t.clone());
        }
    }
}
