use proptest::prelude::*;
use retrade::output::Output;
use retrade::series_file::{load_series, parse_series, Column, SeriesError};

fn parse(s: &str) -> Result<retrade::series_file::SeriesFile, SeriesError> {
    parse_series(s.as_bytes())
}

fn line_of(e: SeriesError) -> u64 {
    match e {
        SeriesError::Parse { line, .. } | SeriesError::Schema { line, .. } => line,
        other => panic!("expected a located error, got {other:?}"),
    }
}

#[test]
fn two_prices_give_one_ten_percent_return() {
    let f = parse("t,price\n0,100\n1,110\n").unwrap();
    assert_eq!(f.column, Column::Price);
    let r = f.returns().unwrap();
    assert_eq!(r.returns, vec![0.1]);
}

#[test]
fn return_column_passes_through() {
    let f = parse("# written by hand\nt,return\n5,0.25\n7,-0.125\n").unwrap();
    assert_eq!(f.column, Column::Return);
    assert_eq!(f.t, vec![5, 7]);
    assert_eq!(f.returns().unwrap().returns, vec![0.25, -0.125]);
}

#[test]
fn whitespace_and_comments_are_ignored() {
    let f = parse("# a\n# b\n t , price \n 0 , 1.5 \n# mid\n 3 , 2 \n").unwrap();
    assert_eq!(f.t, vec![0, 3]);
    assert_eq!(f.values, vec![1.5, 2.0]);
}

#[test]
fn decreasing_time_is_a_schema_error_on_its_line() {
    let e = parse("t,price\n0,1\n2,1\n1,1\n").unwrap_err();
    assert!(matches!(e, SeriesError::Schema { .. }), "{e:?}");
    assert_eq!(line_of(e), 4);
    let e = parse("t,price\n0,1\n0,1\n").unwrap_err();
    assert!(matches!(e, SeriesError::Schema { line: 3, .. }), "{e:?}");
}

#[test]
fn bad_values_are_parse_errors_counting_comment_lines() {
    let e = parse("# c\nt,price\n0,1\nx,2\n").unwrap_err();
    assert!(matches!(e, SeriesError::Parse { line: 4, .. }), "{e:?}");
    for bad in ["abc", "NaN", "inf", ""] {
        let e = parse(&format!("t,return\n0,{bad}\n")).unwrap_err();
        assert!(matches!(e, SeriesError::Parse { line: 2, .. }), "{bad}: {e:?}");
    }
    let e = parse("t,return\n1.5,0.1\n").unwrap_err();
    assert!(matches!(e, SeriesError::Parse { line: 2, .. }), "{e:?}");
}

#[test]
fn header_and_width_are_checked() {
    for header in ["time,price", "t,price,volume", "price,t", "t"] {
        let e = parse(&format!("{header}\n0,1\n")).unwrap_err();
        assert!(matches!(e, SeriesError::Schema { line: 1, .. }), "{header}: {e:?}");
    }
    let e = parse("# c\n# d\nt,volume\n0,1\n").unwrap_err();
    assert!(matches!(e, SeriesError::Schema { line: 3, .. }), "{e:?}");
    let e = parse("# only a comment\n").unwrap_err();
    assert!(matches!(e, SeriesError::Schema { .. }), "{e:?}");
    let e = parse("t,price\n0,1\n1,2,3\n").unwrap_err();
    assert!(matches!(e, SeriesError::Schema { line: 3, .. }), "{e:?}");
}

#[test]
fn non_positive_prices_cannot_become_returns() {
    let f = parse("t,price\n0,1\n1,0\n2,1\n").unwrap();
    assert!(matches!(f.returns(), Err(SeriesError::Returns(_))));
}

#[test]
fn missing_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let e = load_series(&dir.path().join("absent.csv")).unwrap_err();
    assert!(matches!(e, SeriesError::Io(_)));
}

fn write_and_reload(column: Column, t0: i64, values: &[f64]) -> retrade::series_file::SeriesFile {
    let dir = tempfile::tempdir().unwrap();
    let mut out = Output::new("test", String::new(), "0".repeat(64), Some(1));
    out.series("s.csv", column, t0, values);
    out.write(dir.path()).unwrap();
    load_series(&dir.path().join("s.csv")).unwrap()
}

#[test]
fn extreme_values_survive_a_round_trip() {
    let xs = [f64::MIN_POSITIVE, f64::MAX, -f64::MAX, 5e-324, -0.0, 0.1 + 0.2, 1e300];
    let back = write_and_reload(Column::Return, -3, &xs);
    let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&back.values), bits(&xs));
    assert_eq!(back.t, (-3..4).collect::<Vec<_>>());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn written_series_reload_bit_for_bit(
        values in prop::collection::vec(any::<f64>().prop_filter("finite", |x| x.is_finite()), 0..200),
        t0 in -1_000_000i64..1_000_000,
        price in any::<bool>(),
    ) {
        let column = if price { Column::Price } else { Column::Return };
        let back = write_and_reload(column, t0, &values);
        prop_assert_eq!(back.column, column);
        prop_assert_eq!(back.t, (0..values.len() as i64).map(|i| t0 + i).collect::<Vec<_>>());
        prop_assert_eq!(
            back.values.iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
            values.iter().map(|x| x.to_bits()).collect::<Vec<_>>()
        );
    }
}
