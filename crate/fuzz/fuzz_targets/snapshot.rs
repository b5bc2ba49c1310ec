#![no_main]

use bgkpml::grid::{read_snapshot, write_snapshot};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok((meta, field)) = read_snapshot(data) {
        let mut buf = Vec::new();
        write_snapshot(&mut buf, &meta, &field, "").expect("rewrite");
        let (meta2, field2) = read_snapshot(buf.as_slice()).expect("reread");
        assert_eq!(meta2.grid.dim(), meta.grid.dim());
        assert_eq!(field2.dim(), field.dim());
    }
});
