//! Service calendar: weekdays, the 05:00–12:00 window and its 20-minute slots.
//!
//! Timestamps are seconds since the Unix epoch, interpreted as naive local
//! time (no time-zone conversion).

use chrono::{Datelike, NaiveDate, NaiveDateTime, Weekday};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type Timestamp = i64;

pub const SLOT_SECONDS: i64 = 20 * 60;
pub const SLOTS_PER_DAY: usize = 21;
pub const SERVICE_START: i64 = 5 * 3600;
pub const SERVICE_END: i64 = 12 * 3600;
pub const HOUR: i64 = 3600;
pub const WEEKDAYS: usize = 5;

pub fn midnight(date: NaiveDate) -> Timestamp {
    date.and_hms_opt(0, 0, 0)
        .expect("midnight is valid")
        .and_utc()
        .timestamp()
}

pub fn is_weekday(date: NaiveDate) -> bool {
    !matches!(date.weekday(), Weekday::Sat | Weekday::Sun)
}

/// Monday = 0 .. Friday = 4.
pub fn weekday_index(date: NaiveDate) -> usize {
    date.weekday().num_days_from_monday() as usize
}

pub fn format_iso(ts: Timestamp) -> String {
    chrono::DateTime::from_timestamp(ts, 0)
        .map(|dt| dt.naive_utc().format("%Y-%m-%dT%H:%M:%S").to_string())
        .unwrap_or_else(|| ts.to_string())
}

pub fn parse_iso(s: &str) -> Result<Timestamp> {
    NaiveDateTime::parse_from_str(s.trim_end_matches('Z'), "%Y-%m-%dT%H:%M:%S")
        .map(|dt| dt.and_utc().timestamp())
        .map_err(|e| Error::parse(format!("timestamp `{s}`"), e))
}

/// A 20-minute demand interval on a service day.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct IntervalIndex {
    pub date: NaiveDate,
    pub slot: usize,
}

impl IntervalIndex {
    pub fn new(date: NaiveDate, slot: usize) -> Result<Self> {
        if slot >= SLOTS_PER_DAY {
            return Err(Error::InvalidArgument(format!(
                "slot {slot} outside 0..{SLOTS_PER_DAY}"
            )));
        }
        if !is_weekday(date) {
            return Err(Error::InvalidArgument(format!("{date} is not a weekday")));
        }
        Ok(Self { date, slot })
    }

    pub fn start(&self) -> Timestamp {
        midnight(self.date) + SERVICE_START + self.slot as i64 * SLOT_SECONDS
    }

    pub fn end(&self) -> Timestamp {
        self.start() + SLOT_SECONDS
    }

    pub fn weekday(&self) -> usize {
        weekday_index(self.date)
    }
}

/// Consecutive service weekdays starting at a given date.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ServiceCalendar {
    days: Vec<NaiveDate>,
}

impl ServiceCalendar {
    pub fn weekdays_from(start: NaiveDate, n_days: usize) -> Self {
        let days = start
            .iter_days()
            .filter(|d| is_weekday(*d))
            .take(n_days)
            .collect();
        Self { days }
    }

    pub fn from_days(mut days: Vec<NaiveDate>) -> Result<Self> {
        days.sort();
        days.dedup();
        if let Some(d) = days.iter().find(|d| !is_weekday(**d)) {
            return Err(Error::InvalidArgument(format!("{d} is not a weekday")));
        }
        Ok(Self { days })
    }

    pub fn days(&self) -> &[NaiveDate] {
        &self.days
    }

    pub fn len(&self) -> usize {
        self.days.len()
    }

    pub fn is_empty(&self) -> bool {
        self.days.is_empty()
    }

    pub fn day_index(&self, date: NaiveDate) -> Option<usize> {
        self.days.binary_search(&date).ok()
    }

    pub fn interval(&self, day: usize, slot: usize) -> IntervalIndex {
        IntervalIndex {
            date: self.days[day],
            slot,
        }
    }

    /// Position of an interval in the concatenated slot sequence of all days.
    pub fn global_slot(&self, interval: &IntervalIndex) -> Option<usize> {
        self.day_index(interval.date)
            .map(|d| d * SLOTS_PER_DAY + interval.slot)
    }

    pub fn from_global_slot(&self, g: usize) -> IntervalIndex {
        self.interval(g / SLOTS_PER_DAY, g % SLOTS_PER_DAY)
    }

    pub fn n_global_slots(&self) -> usize {
        self.days.len() * SLOTS_PER_DAY
    }

    /// Interval containing `ts`, if it falls inside a service window.
    pub fn locate(&self, ts: Timestamp) -> Option<IntervalIndex> {
        let date = chrono::DateTime::from_timestamp(ts, 0)?.date_naive();
        self.day_index(date)?;
        let offset = ts - midnight(date) - SERVICE_START;
        if offset < 0 || offset >= SERVICE_END - SERVICE_START {
            return None;
        }
        Some(IntervalIndex {
            date,
            slot: (offset / SLOT_SECONDS) as usize,
        })
    }
}
