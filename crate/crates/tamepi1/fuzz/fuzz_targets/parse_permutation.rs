#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(g) = tamepi1::groups::parse_permutation(s, 0) {
            let rendered = g.to_string();
            let back = tamepi1::groups::parse_permutation(&rendered, g.degree()).unwrap();
            assert_eq!(back, g);
        }
    }
});
