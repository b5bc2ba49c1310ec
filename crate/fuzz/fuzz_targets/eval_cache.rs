#![no_main]

use bgkpml::anova::{CubatureRule, EvalCache};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let rule = CubatureRule::gauss_legendre(3, 2).expect("rule");
    if let Ok(cache) = EvalCache::read(data, &rule) {
        let mut buf = Vec::new();
        cache.write(&mut buf, &rule).expect("rewrite");
        let again = EvalCache::read(buf.as_slice(), &rule).expect("reread");
        assert_eq!(again.len(), cache.len());
    }
});
