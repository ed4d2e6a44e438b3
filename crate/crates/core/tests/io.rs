use proptest::prelude::*;
use subdiff::fgn::sample_fgn;
use subdiff::io::{
    curve_from_table, curve_table, laplace_table, read_trace_csv, trace_from_table,
    write_trace_csv, Precision, Table,
};
use subdiff::{CovarianceCurve, CurveKind, Error, Hurst, LaplaceCurve, Trace};

fn parse(text: &str) -> subdiff::Result<Table> {
    Table::read_from(text.as_bytes())
}

#[test]
fn trace_round_trips_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.csv");
    let x = sample_fgn(Hurst::new(0.73).unwrap(), 1000, 17)
        .unwrap()
        .with_meta("regime", "overdamped");
    write_trace_csv(&path, &x).unwrap();
    let y = read_trace_csv(&path).unwrap();
    assert_eq!(x.values(), y.values());
    assert_eq!(x.dt(), y.dt());
    assert_eq!(x.start_time(), y.start_time());
    assert_eq!(x.meta, y.meta);
    assert_eq!(y.seed(), Some(17));
    assert_eq!(y.hurst(), Some(0.73));
}

#[test]
fn non_numeric_cell_names_its_line() {
    let err = parse("# dt=1\ntime,value\n0,1.5\n1,abc\n").unwrap_err();
    match &err {
        Error::Parse { line, msg } => {
            assert_eq!(*line, 4);
            assert!(msg.contains("abc"));
        }
        other => panic!("unexpected error {other:?}"),
    }
    assert!(err.to_string().contains("line 4"));
}

#[test]
fn header_and_shape_errors() {
    assert!(matches!(
        parse("0,1\n1,2\n"),
        Err(Error::Parse { line: 1, .. })
    ));
    assert!(matches!(parse("# only=meta\n"), Err(Error::Parse { .. })));
    assert!(matches!(
        parse("a,b\n1,2,3\n"),
        Err(Error::Parse { line: 2, .. })
    ));
    assert!(trace_from_table(&parse("time,value\n").unwrap()).is_err());
    assert!(trace_from_table(&parse("time,value\n0,1\n1,2\n5,3\n").unwrap()).is_err());
}

#[test]
fn step_is_inferred_from_a_uniform_time_column() {
    let t = trace_from_table(&parse("time,value\n2.0,1\n2.5,2\n3.0,3\n").unwrap()).unwrap();
    assert!((t.dt() - 0.5).abs() < 1e-15);
    assert_eq!(t.start_time(), 2.0);
    assert_eq!(t.values(), &[1.0, 2.0, 3.0]);
}

#[test]
fn metadata_and_blank_lines_are_preserved() {
    let mut t = Table::new(&["lag", "value"]).meta("h", 0.7).meta("seed", 3);
    t.push(vec![0.0, 1.0]);
    t.push(vec![0.5, 0.25]);
    let mut buf = Vec::new();
    t.write_to(&mut buf, Precision::Exact).unwrap();
    let text = String::from_utf8(buf).unwrap().replace("\nlag", "\n\nlag");
    let back = parse(&text).unwrap();
    assert_eq!(back, t);
    assert_eq!(back.get_meta("h"), Some("0.7"));
    assert_eq!(back.column("value"), Some(vec![1.0, 0.25]));
    assert_eq!(back.column("missing"), None);
}

#[test]
fn summary_precision_is_close() {
    let mut t = Table::new(&["v"]);
    t.push(vec![std::f64::consts::PI]);
    let mut buf = Vec::new();
    t.write_to(&mut buf, Precision::Summary).unwrap();
    let v = parse(std::str::from_utf8(&buf).unwrap()).unwrap().rows[0][0];
    assert!((v - std::f64::consts::PI).abs() < 1e-8);
}

#[test]
fn curves_round_trip() {
    let mut c = CovarianceCurve::new(
        vec![0.0, 1.0, 2.0],
        vec![1.0, 0.5, 0.2],
        CurveKind::Lifetime,
    )
    .unwrap();
    c.stderr = Some(vec![0.0, 0.01, 0.02]);
    let table = curve_table(&c);
    assert_eq!(table.get_meta("kind"), Some("lifetime"));
    let back = curve_from_table(&table, CurveKind::Lifetime).unwrap();
    assert_eq!(back, c);
    let l = LaplaceCurve::new(vec![0.1, 1.0], vec![3.0, 0.4]).unwrap();
    let table = laplace_table(&l);
    assert_eq!(table.column("s"), Some(vec![0.1, 1.0]));
    assert_eq!(table.column("value"), Some(vec![3.0, 0.4]));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exact_precision_round_trips(values in prop::collection::vec(any::<f64>().prop_filter("finite", |v| v.is_finite()), 1..50)) {
        let x = Trace::new(0.1, values).unwrap();
        let table = subdiff::io::trace_table(&x);
        let mut buf = Vec::new();
        table.write_to(&mut buf, Precision::Exact).unwrap();
        let y = trace_from_table(&parse(std::str::from_utf8(&buf).unwrap()).unwrap()).unwrap();
        prop_assert_eq!(x.values(), y.values());
    }
}
