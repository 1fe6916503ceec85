//! Name parsers (metrics, linkages, standardize modes, datasets, formats):
//! must never panic, and every accepted value must round-trip through its
//! Display form.

#![no_main]

use std::str::FromStr;

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };

    if let Ok(m) = kpistats::Metric::from_str(text) {
        assert_eq!(kpistats::Metric::from_str(m.name()).unwrap(), m);
    }
    if let Ok(l) = kpistats::Linkage::from_str(text) {
        assert_eq!(kpistats::Linkage::from_str(&l.to_string()).unwrap(), l);
    }
    if let Ok(s) = kpistats::StandardizeMode::from_str(text) {
        assert_eq!(kpistats::StandardizeMode::from_str(&s.to_string()).unwrap(), s);
    }
    if let Ok(d) = kpistats::BuiltinDataset::from_str(text) {
        assert_eq!(kpistats::BuiltinDataset::from_str(d.name()).unwrap(), d);
    }
    let _ = kpistats::ReportFormat::from_str(text);
});
