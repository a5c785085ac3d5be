#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(value) = serde_json::from_slice::<serde_json::Value>(data) else {
        return;
    };
    if let Ok(tree) = tamepi1::tree::MarkedTree::from_json_value(&value) {
        // Canonicalized output must parse back to the same tree.
        let rendered = tree.to_json_value();
        let back = tamepi1::tree::MarkedTree::from_json_value(&rendered).unwrap();
        assert_eq!(back, tree);
        assert_eq!(back.to_json_value(), rendered);
    }
});
