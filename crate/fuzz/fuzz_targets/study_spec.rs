#![no_main]

use bgkpml::scenarios::StudySpec;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(spec) = StudySpec::from_toml_str(text) {
        assert_eq!(StudySpec::from_toml_str(&spec.to_toml_string()).expect("round trip"), spec);
        spec.parameter_box().expect("box");
        spec.rule().expect("rule");
    }
});
