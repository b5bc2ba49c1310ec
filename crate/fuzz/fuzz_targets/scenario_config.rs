#![no_main]

use bgkpml::scenarios::ScenarioConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(cfg) = ScenarioConfig::from_toml_str(text) {
        // accepted configs must survive a round trip and expose valid geometry
        let again = ScenarioConfig::from_toml_str(&cfg.to_toml_string()).expect("round trip");
        assert_eq!(again, cfg);
        cfg.pml_grid().expect("layered grid");
        cfg.reference_grid().expect("reference grid");
        cfg.probe_column().expect("probe column");
    }
});
