#![no_main]

use libfuzzer_sys::fuzz_target;
use nk_monitor::landscape_file;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(landscape) = landscape_file::parse(text) {
            let again = landscape_file::parse(&landscape_file::to_text(&landscape)).unwrap();
            assert!(again.rows().eq(landscape.rows()));
        }
    }
});
