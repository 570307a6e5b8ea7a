#![no_main]

use libfuzzer_sys::fuzz_target;
use nk_monitor::output::{read_csv, write_csv};

fuzz_target!(|data: &[u8]| {
    if let Ok(rows) = read_csv(data) {
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let again = read_csv(buf.as_slice()).unwrap();
        assert_eq!(again.len(), rows.len());
    }
});
