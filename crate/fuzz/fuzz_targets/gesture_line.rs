//! One line of a gestures.jsonl file must decode without panicking, and a
//! gesture that validates against the stock EMG+IMU layout must support the
//! derived queries that the pipeline calls on it.

#![no_main]

use std::sync::LazyLock;

use dollarb::dataset::parse_gesture_line;
use dollarb::layout::BiosignalLayout;
use libfuzzer_sys::fuzz_target;

static LAYOUT: LazyLock<BiosignalLayout> = LazyLock::new(BiosignalLayout::emg_imu);

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(gesture) = parse_gesture_line(text) {
        if gesture.validate(&LAYOUT).is_ok() {
            let _ = gesture.duration_s(&LAYOUT);
            for group in &LAYOUT.groups {
                let _ = gesture.group_signals(&group.name);
            }
        }
    }
});
