#[test]
fn generated_header_declares_the_api() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/include/tropmedian.h");
    let header = std::fs::read_to_string(path).expect("build script writes the header");
    for name in [
        "TmStatus",
        "TM_STATUS_OK",
        "typedef struct TmSites TmSites",
        "typedef struct TmPolytrope TmPolytrope",
        "tm_sites_from_i64",
        "tm_fw_point",
        "tm_fw_polytrope",
        "tm_polytrope_free",
        "tm_consensus",
        "tm_string_free",
        "tm_last_error",
    ] {
        assert!(header.contains(name), "header lacks {name}");
    }
}
