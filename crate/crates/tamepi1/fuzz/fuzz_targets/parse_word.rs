#![no_main]

use libfuzzer_sys::fuzz_target;

// First byte selects the rank, the rest is the word string.
fuzz_target!(|data: &[u8]| {
    let Some((&rank_byte, rest)) = data.split_first() else {
        return;
    };
    let rank = usize::from(rank_byte % 8) + 1;
    if let Ok(s) = std::str::from_utf8(rest) {
        if let Ok(word) = tamepi1::words::parse_word(rank, s) {
            let rendered = word.to_string();
            let back = tamepi1::words::parse_word(rank, &rendered).unwrap();
            assert_eq!(back, word);
        }
    }
});
