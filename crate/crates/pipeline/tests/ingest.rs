use std::path::PathBuf;

use buoyspec::WaterDepth;
use buoyspec_pipeline::*;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

#[test]
fn ten_row_fixture_is_parsed_with_header_metadata() {
    let r = ingest(&fixture("ten_rows.csv")).unwrap();
    assert_eq!(r.len(), 10);
    assert_eq!(r.delta, 0.78125);
    assert_eq!(r.depth, WaterDepth::Infinite);
    assert_eq!(r.station, "fixture");
    assert!(r.metadata.iter().any(|(k, v)| k == "units" && v == "m"));
    assert!(r.gaps.is_empty());
    assert_eq!(r.rows[1], [0.295520, 0.490033, 0.396666]);
    assert!((r.times[9] - r.times[0] - 9.0 * 0.78125).abs() < 1e-9);
}

#[test]
fn gaps_are_flagged_and_the_record_still_loads() {
    let r = ingest(&fixture("gap.csv")).unwrap();
    assert_eq!(r.len(), 10);
    assert_eq!(r.depth, WaterDepth::Finite(40.0));
    assert_eq!(
        r.gaps,
        vec![Gap {
            after_row: 4,
            missing: 2
        }]
    );
    assert_eq!(r.slots()[4], 6);
}

#[test]
fn malformed_row_is_named_in_the_error() {
    let err = ingest(&fixture("malformed_row7.csv")).unwrap_err();
    match &err {
        PipelineError::Parse { row, .. } => assert_eq!(*row, 7),
        other => panic!("unexpected error {other:?}"),
    }
    assert!(err.to_string().contains("row 7"), "{err}");
    assert_eq!(err.exit_code(), 2);
}

fn parse(text: &str) -> Result<RecordFile> {
    parse_record(text.as_bytes(), "inline")
}

#[test]
fn non_monotone_time_is_rejected_with_its_row() {
    let err = parse("# delta=1 depth=inf station=s\ntime,z,x,y\n0,1,2,3\n1,1,2,3\n1,1,2,3\n")
        .unwrap_err();
    assert!(err.to_string().contains("row 3"), "{err}");
}

#[test]
fn irregular_spacing_is_rejected() {
    let err = parse("# delta=1 depth=inf station=s\ntime,z,x,y\n0,1,2,3\n1.5,1,2,3\n").unwrap_err();
    assert!(err.to_string().contains("row 2"), "{err}");
}

#[test]
fn nan_runs_are_reported_with_their_rows() {
    let err = parse(
        "# delta=1 depth=inf station=s\ntime,z,x,y\n0,1,2,3\n1,NaN,2,3\n2,1,NaN,3\n3,1,2,3\n",
    )
    .unwrap_err();
    assert!(err.to_string().contains("rows 2..=3"), "{err}");
}

#[test]
fn schema_mismatches_are_rejected() {
    assert!(parse("time,z,x,y\n0,1,2,3\n").is_err());
    assert!(parse("# depth=inf\ntime,z,x,y\n0,1,2,3\n").is_err());
    assert!(parse("# delta=1\ntime,x,y,z\n0,1,2,3\n").is_err());
    assert!(parse("# delta=1\ntime,z,x,y\n0,1,2\n").is_err());
}

#[test]
fn written_records_read_back_identically() {
    let r = ingest(&fixture("gap.csv")).unwrap();
    let mut buf = Vec::new();
    write_record(&r, &mut buf).unwrap();
    let back = parse_record(buf.as_slice(), "round trip").unwrap();
    assert_eq!(back.rows, r.rows);
    assert_eq!(back.times, r.times);
    assert_eq!(back.gaps, r.gaps);
    assert_eq!(back.depth, r.depth);
}
