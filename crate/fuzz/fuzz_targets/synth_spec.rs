//! A synthetic-corpus spec must decode and validate without panicking on
//! any input (`from_json_str` runs the range checks itself).

#![no_main]

use dollarb::synthgen::SynthSpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let _ = SynthSpec::from_json_str(text);
});
