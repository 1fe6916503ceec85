//! CSV loader fuzzing: parsing must never panic, and any frame that parses
//! must survive a to_csv/load_csv round trip unchanged. Small frames are
//! additionally pushed through standardization and a distance matrix, which
//! must fail gracefully rather than panic.

#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(frame) = kpistats::load_csv(text) else { return };

    let reloaded = kpistats::load_csv(&frame.to_csv()).expect("serialized frame must parse");
    assert_eq!(frame, reloaded, "round trip changed the frame");

    if frame.n_samples() <= 32 && frame.n_variables() <= 16 {
        if let Ok(z) = kpistats::standardize(&frame, kpistats::StandardizeSpec::default()) {
            let _ = kpistats::distance_matrix(&z, kpistats::Metric::Euclidean);
        }
    }
});
