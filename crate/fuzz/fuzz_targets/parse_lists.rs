#![no_main]
use libfuzzer_sys::{fuzz_target, Corpus};
use mfe_core::cli::{parse_list, parse_modes};
use mfe_core::inertia::AverageVector;

fuzz_target!(|data: &[u8]| -> Corpus {
    let Ok(text) = std::str::from_utf8(data) else {
        return Corpus::Reject;
    };
    if let Ok(modes) = parse_modes(text) {
        assert!(!modes.is_empty());
        assert!(modes.windows(2).all(|w| w[0] < w[1]));
    }
    let _ = parse_list::<usize>(text);
    if let Ok(m) = parse_list::<f64>(text) {
        if let Ok(avg) = AverageVector::new(m) {
            assert!(avg.total() > 0.0);
            assert!(avg.len() >= 2);
        }
    }
    Corpus::Keep
});
