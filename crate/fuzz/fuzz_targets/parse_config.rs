#![no_main]
use libfuzzer_sys::{fuzz_target, Corpus};
use mfe_core::cli::parse_config;

fuzz_target!(|data: &[u8]| -> Corpus {
    let Ok(text) = std::str::from_utf8(data) else {
        return Corpus::Reject;
    };
    if let Ok(config) = parse_config(text) {
        // accepted configs must satisfy the documented invariants
        assert!(config.grid_nodes >= 64);
        assert!(config.eigen_count >= 1);
        assert!(!config.modes.is_empty());
        assert!(config.modes.windows(2).all(|w| w[0] < w[1]));
        assert!(config.problem.validate().is_ok());
    }
    Corpus::Keep
});
