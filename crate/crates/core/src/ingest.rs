//! LOBSTER-style message files → per-day execution price series.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::str::FromStr;

use chrono::{NaiveDate, NaiveTime, Timelike};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const NANOS_PER_SEC: u64 = 1_000_000_000;

/// One row of a message file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TradeEvent {
    /// Nanoseconds after midnight.
    pub time_ns: u64,
    pub event_type: i32,
    pub order_id: u64,
    pub size: u64,
    /// Price in 1/10000 currency units.
    pub price: u64,
    pub direction: i8,
}

/// Execution prices of one ticker on one day, in file order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TradeDay {
    pub ticker: String,
    pub date: NaiveDate,
    pub prices: Vec<u64>,
    /// Event time of each price, nanoseconds after midnight.
    pub times_ns: Vec<u64>,
}

impl TradeDay {
    /// A day with no retained executions.
    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Field {
    Time,
    EventType,
    OrderId,
    Size,
    Price,
    Direction,
}

impl Field {
    const ALL: [Field; 6] = [
        Field::Time,
        Field::EventType,
        Field::OrderId,
        Field::Size,
        Field::Price,
        Field::Direction,
    ];

    fn name(self) -> &'static str {
        match self {
            Field::Time => "time",
            Field::EventType => "event_type",
            Field::OrderId => "order_id",
            Field::Size => "size",
            Field::Price => "price",
            Field::Direction => "direction",
        }
    }
}

impl FromStr for Field {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Field::ALL
            .into_iter()
            .find(|f| f.name() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown message field `{s}`")))
    }
}

/// Column layout of a message file and which event types count as executions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnMap {
    order: [Field; 6],
    exec_codes: Vec<i32>,
}

impl Default for ColumnMap {
    /// LOBSTER layout `time,event_type,order_id,size,price,direction`;
    /// visible (4) and hidden (5) executions.
    fn default() -> Self {
        Self {
            order: Field::ALL,
            exec_codes: vec![4, 5],
        }
    }
}

impl ColumnMap {
    /// Fails unless every field appears exactly once.
    pub fn new(order: [Field; 6], exec_codes: Vec<i32>) -> Result<Self> {
        for f in Field::ALL {
            let hits = order.iter().filter(|&&g| g == f).count();
            if hits != 1 {
                return Err(Error::Config(format!(
                    "field `{}` mapped {hits} times, expected once",
                    f.name()
                )));
            }
        }
        if exec_codes.is_empty() {
            return Err(Error::Config("execution code set is empty".into()));
        }
        Ok(Self { order, exec_codes })
    }

    /// Parses a comma-separated field order such as `time,event_type,order_id,size,price,direction`.
    pub fn with_columns(spec: &str, exec_codes: Vec<i32>) -> Result<Self> {
        let fields: Vec<Field> = spec.split(',').map(str::parse).collect::<Result<_>>()?;
        let order: [Field; 6] = fields
            .try_into()
            .map_err(|v: Vec<Field>| Error::Config(format!("expected 6 columns, got {}", v.len())))?;
        Self::new(order, exec_codes)
    }

    pub fn exec_codes(&self) -> &[i32] {
        &self.exec_codes
    }

    pub fn is_execution(&self, code: i32) -> bool {
        self.exec_codes.contains(&code)
    }

    fn column_of(&self, field: Field) -> usize {
        self.order.iter().position(|&f| f == field).expect("validated in new")
    }
}

/// Parses `seconds[.fraction]` after midnight into exact nanoseconds.
pub fn parse_seconds(text: &str) -> Option<u64> {
    let (whole, frac) = match text.split_once('.') {
        Some((w, f)) => (w, f),
        None => (text, ""),
    };
    if whole.is_empty() || !whole.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    if frac.len() > 9 || !frac.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let secs: u64 = whole.parse().ok()?;
    let mut nanos = 0u64;
    for (i, b) in frac.bytes().enumerate() {
        nanos += u64::from(b - b'0') * 10u64.pow(8 - i as u32);
    }
    secs.checked_mul(NANOS_PER_SEC)?.checked_add(nanos)
}

/// Parses a wall-clock time such as `09:30`, `16:00:00` or `09:29:59.999`.
pub fn parse_clock(text: &str) -> Result<u64> {
    let t = NaiveTime::parse_from_str(text, "%H:%M:%S%.f")
        .or_else(|_| NaiveTime::parse_from_str(text, "%H:%M"))
        .map_err(|e| Error::Config(format!("invalid time of day `{text}`: {e}")))?;
    Ok(u64::from(t.num_seconds_from_midnight()) * NANOS_PER_SEC + u64::from(t.nanosecond()))
}

/// Splits a LOBSTER file name `TICKER_YYYY-MM-DD_…` into ticker and date.
pub fn ticker_and_date(path: &Path) -> Result<(String, NaiveDate)> {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .ok_or_else(|| Error::Config(format!("{}: no file name", path.display())))?;
    let mut parts = stem.split('_');
    let ticker = parts.next().filter(|t| !t.is_empty());
    let date = parts.next().and_then(|d| NaiveDate::parse_from_str(d, "%Y-%m-%d").ok());
    match (ticker, date) {
        (Some(t), Some(d)) => Ok((t.to_string(), d)),
        _ => Err(Error::Config(format!(
            "{}: expected a name like TICKER_YYYY-MM-DD_…",
            path.display()
        ))),
    }
}

/// Parses a message file whose name follows the LOBSTER convention.
pub fn parse_message_file(path: &Path, map: &ColumnMap) -> Result<TradeDay> {
    let (ticker, date) = ticker_and_date(path)?;
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_messages(file, &path.display().to_string(), &ticker, date, map)
}

/// Streams message rows from `reader`, keeping executions only.
///
/// A day with no executions is returned empty rather than as an error.
pub fn parse_messages<R: Read>(
    reader: R,
    source: &str,
    ticker: &str,
    date: NaiveDate,
    map: &ColumnMap,
) -> Result<TradeDay> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut day = TradeDay {
        ticker: ticker.to_string(),
        date,
        prices: Vec::new(),
        times_ns: Vec::new(),
    };
    let mut last_time = 0u64;
    let mut record = csv::StringRecord::new();
    loop {
        let line = rdr.position().line() as usize;
        let more = rdr.read_record(&mut record).map_err(|e| Error::Parse {
            path: source.to_string(),
            line,
            message: e.to_string(),
        })?;
        if !more {
            break;
        }
        let line = record.position().map_or(line, |p| p.line() as usize);
        let event = parse_event(&record, map).map_err(|message| Error::Parse {
            path: source.to_string(),
            line,
            message,
        })?;
        if event.time_ns < last_time {
            return Err(Error::Parse {
                path: source.to_string(),
                line,
                message: "event time goes backwards".into(),
            });
        }
        last_time = event.time_ns;
        if map.is_execution(event.event_type) {
            day.prices.push(event.price);
            day.times_ns.push(event.time_ns);
        }
    }
    if day.is_empty() {
        log::warn!("{source}: no execution events, day flagged empty");
    }
    Ok(day)
}

fn parse_event(record: &csv::StringRecord, map: &ColumnMap) -> std::result::Result<TradeEvent, String> {
    if record.len() < 6 {
        return Err(format!("expected 6 fields, found {}", record.len()));
    }
    let get = |f: Field| &record[map.column_of(f)];
    let int = |f: Field| -> std::result::Result<i64, String> {
        get(f)
            .parse::<i64>()
            .map_err(|_| format!("field `{}` is not an integer: {:?}", f.name(), get(f)))
    };
    let time_ns = parse_seconds(get(Field::Time))
        .ok_or_else(|| format!("invalid time {:?}", get(Field::Time)))?;
    let price = int(Field::Price)?;
    if price <= 0 {
        return Err(format!("nonpositive price {price}"));
    }
    let direction = int(Field::Direction)?;
    if direction != 1 && direction != -1 {
        return Err(format!("direction must be -1 or 1, got {direction}"));
    }
    let nonneg = |f: Field| -> std::result::Result<u64, String> {
        u64::try_from(int(f)?).map_err(|_| format!("field `{}` is negative", f.name()))
    };
    Ok(TradeEvent {
        time_ns,
        event_type: i32::try_from(int(Field::EventType)?).map_err(|_| "event type out of range".to_string())?,
        order_id: nonneg(Field::OrderId)?,
        size: nonneg(Field::Size)?,
        price: price as u64,
        direction: direction as i8,
    })
}

/// Default trading session, 09:30:00 to 16:00:00.
pub const SESSION_OPEN_NS: u64 = (9 * 3600 + 30 * 60) * NANOS_PER_SEC;
pub const SESSION_CLOSE_NS: u64 = 16 * 3600 * NANOS_PER_SEC;

/// Keeps executions with `open <= time <= close`.
pub fn restrict_session(day: &TradeDay, open_ns: u64, close_ns: u64) -> Result<TradeDay> {
    if open_ns >= close_ns {
        return Err(Error::Config("session open must precede close".into()));
    }
    let (times_ns, prices) = day
        .times_ns
        .iter()
        .zip(&day.prices)
        .filter(|(&t, _)| (open_ns..=close_ns).contains(&t))
        .map(|(&t, &p)| (t, p))
        .unzip();
    Ok(TradeDay {
        ticker: day.ticker.clone(),
        date: day.date,
        prices,
        times_ns,
    })
}

/// Writes a day file: two metadata lines, a header, then `time_ns,price` rows.
pub fn write_day_file(path: &Path, day: &TradeDay) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut body = || -> std::io::Result<()> {
        writeln!(w, "ticker,{}", day.ticker)?;
        writeln!(w, "date,{}", day.date)?;
        writeln!(w, "time_ns,price")?;
        for (t, p) in day.times_ns.iter().zip(&day.prices) {
            writeln!(w, "{t},{p}")?;
        }
        w.flush()
    };
    body().map_err(|e| Error::io(path, e))
}

pub fn read_day_file(path: &Path) -> Result<TradeDay> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let source = path.display().to_string();
    let perr = |line: usize, message: &str| Error::Parse {
        path: source.clone(),
        line,
        message: message.to_string(),
    };
    let mut lines = BufReader::new(file).lines();
    let mut header = Vec::with_capacity(3);
    for _ in 0..3 {
        header.push(lines.next().transpose().map_err(|e| Error::io(path, e))?.unwrap_or_default());
    }
    let ticker = match header[0].strip_prefix("ticker,") {
        Some(t) if !t.is_empty() => t.to_string(),
        _ => return Err(perr(1, "expected `ticker,<symbol>`")),
    };
    let date = header[1]
        .strip_prefix("date,")
        .and_then(|d| NaiveDate::parse_from_str(d, "%Y-%m-%d").ok())
        .ok_or_else(|| perr(2, "expected `date,YYYY-MM-DD`"))?;
    if header[2] != "time_ns,price" {
        return Err(perr(3, "expected header `time_ns,price`"));
    }
    let mut day = TradeDay {
        ticker,
        date,
        prices: Vec::new(),
        times_ns: Vec::new(),
    };
    for (i, line) in lines.enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.is_empty() {
            continue;
        }
        let parsed = line
            .split_once(',')
            .and_then(|(t, p)| Some((t.parse::<u64>().ok()?, p.parse::<u64>().ok()?)));
        match parsed {
            Some((t, p)) if p > 0 => {
                day.times_ns.push(t);
                day.prices.push(p);
            }
            _ => return Err(perr(i + 4, &format!("expected `time_ns,price`, got {line:?}"))),
        }
    }
    Ok(day)
}

/// File name used for a day file: `TICKER_YYYY-MM-DD.day.csv`.
pub fn day_file_name(ticker: &str, date: NaiveDate) -> String {
    format!("{ticker}_{date}.day.csv")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn date() -> NaiveDate {
        NaiveDate::from_ymd_opt(2022, 8, 1).unwrap()
    }

    fn parse(text: &str) -> Result<TradeDay> {
        parse_messages(text.as_bytes(), "mem", "TEST", date(), &ColumnMap::default())
    }

    #[test]
    fn keeps_executions_only() {
        let day = parse(
            "34200.1,1,11,100,1000000,1\n\
             34200.2,4,12,50,1000100,-1\n\
             34200.3,5,0,20,1000200,1\n",
        )
        .unwrap();
        assert_eq!(day.prices, vec![1000100, 1000200]);
        assert_eq!(day.times_ns, vec![34_200_200_000_000, 34_200_300_000_000]);
    }

    #[test]
    fn cancellations_only_is_an_empty_day() {
        let day = parse("34200.1,2,11,100,1000000,1\n34201,3,11,0,1000000,1\n").unwrap();
        assert!(day.is_empty());
    }

    #[test]
    fn malformed_line_reports_its_number() {
        let err = parse("34200.1,4,1,1,100,1\n34200.2,4,1,1,abc,1\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other}"),
        }
        assert!(parse("34200.1,4,1,1,0,1\n").is_err());
        assert!(parse("34200.1,4,1,1,5\n").is_err());
        assert!(parse("34201,4,1,1,5,1\n34200,4,1,1,5,1\n").is_err());
    }

    #[test]
    fn custom_column_order() {
        let map = ColumnMap::with_columns("order_id,time,price,size,direction,event_type", vec![7]).unwrap();
        let day = parse_messages("9,34200,555,1,1,7\n9,34201,556,1,1,4\n".as_bytes(), "mem", "X", date(), &map)
            .unwrap();
        assert_eq!(day.prices, vec![555]);
        assert!(ColumnMap::with_columns("time,time,price,size,direction,event_type", vec![4]).is_err());
        assert!(ColumnMap::with_columns("time,price", vec![4]).is_err());
    }

    #[test]
    fn exact_nanosecond_times() {
        assert_eq!(parse_seconds("34200.004241176"), Some(34_200_004_241_176));
        assert_eq!(parse_seconds("34200"), Some(34_200_000_000_000));
        assert_eq!(parse_seconds("1.5"), Some(1_500_000_000));
        assert_eq!(parse_seconds("1.0000000001"), None);
        assert_eq!(parse_seconds("-1"), None);
        assert_eq!(parse_clock("09:30").unwrap(), SESSION_OPEN_NS);
        assert_eq!(parse_clock("16:00:00").unwrap(), SESSION_CLOSE_NS);
    }

    #[test]
    fn session_boundaries_are_inclusive() {
        let day = TradeDay {
            ticker: "T".into(),
            date: date(),
            prices: vec![1, 2, 3, 4],
            times_ns: vec![
                parse_clock("09:29:59.999").unwrap(),
                SESSION_OPEN_NS,
                SESSION_CLOSE_NS,
                SESSION_CLOSE_NS + 1,
            ],
        };
        let kept = restrict_session(&day, SESSION_OPEN_NS, SESSION_CLOSE_NS).unwrap();
        assert_eq!(kept.prices, vec![2, 3]);
        let inner = restrict_session(&kept, SESSION_OPEN_NS, SESSION_CLOSE_NS).unwrap();
        assert_eq!(inner, kept);
        assert!(restrict_session(&day, 5, 5).is_err());
    }

    #[test]
    fn lobster_file_names() {
        let (t, d) = ticker_and_date(Path::new("/x/AAPL_2012-06-21_34200000_57600000_message_10.csv")).unwrap();
        assert_eq!(t, "AAPL");
        assert_eq!(d, NaiveDate::from_ymd_opt(2012, 6, 21).unwrap());
        assert!(ticker_and_date(Path::new("messages.csv")).is_err());
    }

    proptest! {
        #[test]
        fn day_file_round_trip(rows in proptest::collection::vec((0u64..1_000_000, 1u64..10_000_000), 0..200)) {
            let mut times: Vec<u64> = rows.iter().map(|r| r.0).collect();
            times.sort_unstable();
            let day = TradeDay {
                ticker: "ABC".into(),
                date: date(),
                prices: rows.iter().map(|r| r.1).collect(),
                times_ns: times,
            };
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join(day_file_name("ABC", date()));
            write_day_file(&path, &day).unwrap();
            prop_assert_eq!(read_day_file(&path).unwrap(), day);
        }

        #[test]
        fn retained_count_bounded(codes in proptest::collection::vec(1i32..7, 1..100)) {
            let text: String = codes
                .iter()
                .enumerate()
                .map(|(i, c)| format!("{}.5,{c},1,1,{},1\n", 34200 + i, 100 + i))
                .collect();
            let day = parse(&text).unwrap();
            let execs = codes.iter().filter(|c| **c == 4 || **c == 5).count();
            prop_assert_eq!(day.len(), execs);
            prop_assert!(day.len() <= codes.len());
        }
    }
}
