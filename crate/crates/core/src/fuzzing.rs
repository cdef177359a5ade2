//! Bodies of the fuzz targets, shared with the corpus replay test so the
//! checked-in seeds also run under `cargo test`.

use crate::coeffs::LaurentPoly;
use crate::ncpoly::{parse_mixed_poly, parse_nc_poly};

/// Rank used when fuzzing the polynomial parser.
pub const FUZZ_RANK: usize = 4;

/// Parses a Laurent polynomial; anything accepted must survive a
/// `Display` round trip.
pub fn laurent_roundtrip(data: &[u8]) {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let Ok(p) = s.parse::<LaurentPoly>() else { return };
    let text = p.to_string();
    let back: LaurentPoly = text.parse().unwrap_or_else(|e| panic!("reparse of {text:?} failed: {e}"));
    assert_eq!(back, p, "round trip changed {text:?}");
}

/// Parses a mixed polynomial at [`FUZZ_RANK`], round-trips it, and checks
/// that the free-algebra parser agrees whenever the input has no `x` factors.
pub fn poly_roundtrip(data: &[u8]) {
    let Ok(s) = std::str::from_utf8(data) else { return };
    let nc = parse_nc_poly(s, FUZZ_RANK);
    let Ok(p) = parse_mixed_poly(s, FUZZ_RANK) else {
        assert!(nc.is_err(), "free-algebra parser accepted what the mixed parser rejected");
        return;
    };
    let text = p.to_string();
    let back = parse_mixed_poly(&text, FUZZ_RANK).unwrap_or_else(|e| panic!("reparse of {text:?} failed: {e}"));
    assert_eq!(back, p, "round trip changed {text:?}");
    if let Ok(nc) = nc {
        assert_eq!(nc.to_mixed(), p);
        let back = parse_nc_poly(&nc.to_string(), FUZZ_RANK).expect("reparse free-algebra text");
        assert_eq!(back, nc);
    }
}
