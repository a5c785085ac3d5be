#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(specs) = tamepi1::cli::parse_spec_file(s) {
            for (p, ld) in &specs {
                assert_eq!(*p, ld.prime);
            }
        }
    }
});
