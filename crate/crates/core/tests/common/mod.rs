#![allow(dead_code)]

use std::path::PathBuf;

use serde::{de::DeserializeOwned, Serialize};

/// Compares `value` with a frozen golden file. Set `AFFINE_BLESS=1` to (re)write it.
pub fn golden<T: Serialize + DeserializeOwned + PartialEq + std::fmt::Debug>(name: &str, value: &T) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    if std::env::var_os("AFFINE_BLESS").is_some() {
        let text = serde_json::to_string_pretty(value).unwrap() + "\n";
        std::fs::write(&path, text).unwrap();
        return;
    }
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|_| panic!("missing golden file {}; run with AFFINE_BLESS=1", path.display()));
    let frozen: T = serde_json::from_str(&text).unwrap();
    assert_eq!(&frozen, value, "golden mismatch for {name}");
}
