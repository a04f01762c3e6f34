//! Layout JSON decoding must never panic, and a layout that passes
//! validation must support the derived queries (hash, channel spans).

#![no_main]

use dollarb::layout::BiosignalLayout;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(layout) = BiosignalLayout::from_json_str(text) {
        if layout.validate().is_ok() {
            let _ = layout.content_hash();
            let _ = layout.group_spans();
            let _ = layout.total_channels();
        }
    }
});
