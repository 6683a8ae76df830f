#![allow(dead_code)]

use chrono::NaiveDate;
use odsage::network::OdPair;
use odsage::simulator::{TripEvent, TripLog};
use odsage::time::{midnight, IntervalIndex, Timestamp};

pub fn monday() -> NaiveDate {
    NaiveDate::from_ymd_opt(2021, 2, 1).unwrap()
}

pub fn at(h: i64, m: i64) -> Timestamp {
    midnight(monday()) + h * 3600 + m * 60
}

/// Four passengers tap in on OD 0→1 between 08:00 and 08:20. Two have
/// tapped out by 08:40, the third at 08:50 and the fourth at 09:10.
pub fn figure_one_log() -> (TripLog, OdPair, IntervalIndex) {
    let trip = |tin, tout| TripEvent {
        origin: 0,
        destination: 1,
        tap_in: tin,
        tap_out: tout,
    };
    let log = TripLog::new(vec![
        trip(at(8, 2), at(8, 25)),
        trip(at(8, 5), at(8, 35)),
        trip(at(8, 10), at(8, 50)),
        trip(at(8, 15), at(9, 10)),
    ]);
    let od = OdPair {
        index: 0,
        origin: 0,
        destination: 1,
    };
    (log, od, IntervalIndex::new(monday(), 9).unwrap())
}
