#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(points) = tamepi1::cli::parse_points(s) {
            for point in points {
                let rendered = point.to_string();
                let back = tamepi1::tree::parse_point(&rendered).unwrap();
                assert_eq!(back, point);
            }
        }
    }
});
