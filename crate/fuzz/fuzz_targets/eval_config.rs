//! An evaluation config must decode and validate without panicking; the
//! CLI feeds user-supplied JSON straight into this path.

#![no_main]

use dollarb::eval::EvalConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(config) = serde_json::from_str::<EvalConfig>(text) {
        let _ = config.validate();
    }
});
