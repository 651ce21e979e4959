//! Date arithmetic shared by the time-series metrics.

use chrono::{Datelike, Months, NaiveDate};

const DAYS_PER_YEAR: f64 = 365.25;

/// Signed span from `a` to `b` in years.
pub fn years_between(a: NaiveDate, b: NaiveDate) -> f64 {
    (b - a).num_days() as f64 / DAYS_PER_YEAR
}

/// Span of a period of `months` calendar months, in years.
pub fn period_years(months: u32) -> f64 {
    months as f64 / 12.0
}

pub fn add_months(d: NaiveDate, months: u32) -> NaiveDate {
    d.checked_add_months(Months::new(months)).unwrap_or(NaiveDate::MAX)
}

pub fn sub_months(d: NaiveDate, months: u32) -> NaiveDate {
    d.checked_sub_months(Months::new(months)).unwrap_or(NaiveDate::MIN)
}

/// Grid `start, start + p, start + 2p, ...` ending at the first point on or
/// after `end`. Always holds at least two points.
pub fn period_grid(start: NaiveDate, end: NaiveDate, months: u32) -> Vec<NaiveDate> {
    assert!(months > 0, "period must be at least one month");
    let mut grid = vec![start];
    let mut k = 1u32;
    loop {
        let t = add_months(start, months.saturating_mul(k));
        grid.push(t);
        if t >= end || t == NaiveDate::MAX {
            break;
        }
        k += 1;
    }
    grid
}

pub fn year_of(d: NaiveDate) -> i32 {
    d.year()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(y: i32, m: u32, day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, day).unwrap()
    }

    #[test]
    fn grid_covers_end() {
        let g = period_grid(d(2020, 1, 1), d(2022, 1, 1), 12);
        assert_eq!(g, vec![d(2020, 1, 1), d(2021, 1, 1), d(2022, 1, 1)]);
        let g = period_grid(d(2020, 1, 1), d(2020, 1, 1), 12);
        assert_eq!(g.len(), 2);
        let g = period_grid(d(2020, 1, 31), d(2020, 4, 1), 1);
        assert_eq!(g.last().copied(), Some(d(2020, 4, 30)));
    }

    #[test]
    fn year_span() {
        assert!((years_between(d(2020, 1, 1), d(2024, 1, 1)) - 4.0).abs() < 1e-9);
    }
}
