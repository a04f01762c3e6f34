//! A template store JSON document must decode without panicking, and a
//! decoded store must survive the compatibility check against a layout
//! (returning an error is fine; crashing is not).

#![no_main]

use std::sync::LazyLock;

use dollarb::layout::BiosignalLayout;
use dollarb::store::TemplateStore;
use libfuzzer_sys::fuzz_target;

static LAYOUT: LazyLock<BiosignalLayout> = LazyLock::new(BiosignalLayout::emg_imu);

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(store) = TemplateStore::from_json_str(text) {
        let _ = store.validate_against(&LAYOUT);
    }
});
