//! Partial observability of one interval's demand as the prediction time
//! moves forward. Trips still travelling count towards `p` until they tap
//! out, after which they show up in the completed count `d`.

use chrono::NaiveDate;
use odsage::features::{observed_demand, target};
use odsage::network::OdPair;
use odsage::simulator::{TripEvent, TripLog};
use odsage::time::{format_iso, midnight, IntervalIndex};

fn main() -> odsage::Result<()> {
    let day = NaiveDate::from_ymd_opt(2021, 2, 1).expect("valid date");
    let at = |h: i64, m: i64| midnight(day) + h * 3600 + m * 60;
    let trip = |o, d, tin, tout| TripEvent {
        origin: o,
        destination: d,
        tap_in: tin,
        tap_out: tout,
    };
    // Four passengers from station 0 to 1 in the 08:00-08:20 interval, plus
    // one from 0 to 2 whose destination stays unknown until 08:55.
    let log = TripLog::new(vec![
        trip(0, 1, at(8, 2), at(8, 25)),
        trip(0, 1, at(8, 5), at(8, 35)),
        trip(0, 1, at(8, 10), at(8, 50)),
        trip(0, 1, at(8, 15), at(9, 10)),
        trip(0, 2, at(8, 12), at(8, 55)),
    ]);
    let od = OdPair {
        index: 0,
        origin: 0,
        destination: 1,
    };
    let interval = IntervalIndex::new(day, 9)?;
    println!(
        "interval {} .. {}",
        format_iso(interval.start()),
        format_iso(interval.end())
    );
    println!(
        "{:>20}  {:>3} {:>3} {:>3}",
        "prediction time", "x", "d", "p"
    );
    for (h, m) in [(8, 20), (8, 30), (8, 40), (8, 50), (9, 0), (9, 20)] {
        let obs = observed_demand(&log, &od, &interval, at(h, m))?;
        println!(
            "{:>20}  {:>3} {:>3} {:>3}",
            format_iso(at(h, m)),
            obs.x,
            obs.d,
            obs.p
        );
    }
    println!("hindsight target: {}", target(&log, &od, &interval));

    // Asking about an interval that has not finished is an error.
    match observed_demand(&log, &od, &interval, at(8, 10)) {
        Err(e) => println!("at 08:10: {e}"),
        Ok(_) => unreachable!("the interval ends at 08:20"),
    }
    Ok(())
}
