#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| qmacmahon::fuzzing::poly_roundtrip(data));
