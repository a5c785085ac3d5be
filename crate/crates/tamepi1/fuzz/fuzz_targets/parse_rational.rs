#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(q) = tamepi1::arith::parse_rational(s) {
            // The canonical form must round-trip exactly.
            let rendered = tamepi1::arith::format_rational(&q);
            let back = tamepi1::arith::parse_rational(&rendered).unwrap();
            assert_eq!(back, q);
        }
    }
});
