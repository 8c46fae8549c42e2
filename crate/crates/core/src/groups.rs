//! The 23-category duration/density taxonomy.
//!
//! Videos fall into four duration bands. The three short bands are split
//! four ways by boundaries per second; ten-second videos are numerous
//! enough to be split by raw boundary count instead (0..=9 and 10+), for
//! 3 * 4 + 11 = 23 groups total.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Duration band of a video.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DurationBucket {
    /// Under 4 seconds.
    D0To4,
    /// 4 to 8 seconds.
    D4To8,
    /// 8 to 10 seconds.
    D8To10,
    /// At least 10 seconds.
    About10,
}

impl DurationBucket {
    pub fn of(duration: f64) -> DurationBucket {
        if duration < 4.0 {
            DurationBucket::D0To4
        } else if duration < 8.0 {
            DurationBucket::D4To8
        } else if duration < 10.0 {
            DurationBucket::D8To10
        } else {
            DurationBucket::About10
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            DurationBucket::D0To4 => "d0-4",
            DurationBucket::D4To8 => "d4-8",
            DurationBucket::D8To10 => "d8-10",
            DurationBucket::About10 => "d10",
        }
    }
}

/// Duration bands that are grouped by splits per second.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ShortDuration {
    D0To4,
    D4To8,
    D8To10,
}

impl ShortDuration {
    pub const ALL: [ShortDuration; 3] = [
        ShortDuration::D0To4,
        ShortDuration::D4To8,
        ShortDuration::D8To10,
    ];

    pub fn widen(self) -> DurationBucket {
        match self {
            ShortDuration::D0To4 => DurationBucket::D0To4,
            ShortDuration::D4To8 => DurationBucket::D4To8,
            ShortDuration::D8To10 => DurationBucket::D8To10,
        }
    }
}

/// Boundaries-per-second band: none, (0, 0.55], (0.55, 1], (1, inf).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DensityBucket {
    NoSplit,
    UpTo055,
    UpTo1,
    Over1,
}

impl DensityBucket {
    pub const ALL: [DensityBucket; 4] = [
        DensityBucket::NoSplit,
        DensityBucket::UpTo055,
        DensityBucket::UpTo1,
        DensityBucket::Over1,
    ];

    pub fn of(duration: f64, count: usize) -> DensityBucket {
        if count == 0 {
            return DensityBucket::NoSplit;
        }
        let rate = count as f64 / duration;
        if rate <= 0.55 {
            DensityBucket::UpTo055
        } else if rate <= 1.0 {
            DensityBucket::UpTo1
        } else {
            DensityBucket::Over1
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            DensityBucket::NoSplit => "none",
            DensityBucket::UpTo055 => "r0-0.55",
            DensityBucket::UpTo1 => "r0.55-1",
            DensityBucket::Over1 => "r1+",
        }
    }
}

/// Raw boundary count band for ten-second videos: 0..=9 or 10+.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CountBucket(u8);

impl CountBucket {
    pub const TEN_PLUS: CountBucket = CountBucket(10);

    pub fn of(count: usize) -> CountBucket {
        CountBucket(count.min(10) as u8)
    }

    /// 0..=9 for exact counts, 10 for the open-ended bucket.
    pub fn index(self) -> u8 {
        self.0
    }

    pub fn all() -> impl Iterator<Item = CountBucket> {
        (0..=10).map(CountBucket)
    }
}

/// One of the 23 taxonomy cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupKey {
    /// Short video grouped by splits per second.
    Rate {
        duration: ShortDuration,
        density: DensityBucket,
    },
    /// Ten-second video grouped by raw boundary count.
    Count(CountBucket),
}

impl GroupKey {
    /// All 23 valid keys in canonical order.
    pub fn all() -> Vec<GroupKey> {
        let mut keys = Vec::with_capacity(23);
        for duration in ShortDuration::ALL {
            for density in DensityBucket::ALL {
                keys.push(GroupKey::Rate { duration, density });
            }
        }
        keys.extend(CountBucket::all().map(GroupKey::Count));
        keys
    }

    pub fn duration_bucket(self) -> DurationBucket {
        match self {
            GroupKey::Rate { duration, .. } => duration.widen(),
            GroupKey::Count(_) => DurationBucket::About10,
        }
    }
}

/// Assigns a video to its taxonomy cell from duration and boundary count.
pub fn classify_group(duration: f64, boundary_count: usize) -> GroupKey {
    match DurationBucket::of(duration) {
        DurationBucket::D0To4 => GroupKey::Rate {
            duration: ShortDuration::D0To4,
            density: DensityBucket::of(duration, boundary_count),
        },
        DurationBucket::D4To8 => GroupKey::Rate {
            duration: ShortDuration::D4To8,
            density: DensityBucket::of(duration, boundary_count),
        },
        DurationBucket::D8To10 => GroupKey::Rate {
            duration: ShortDuration::D8To10,
            density: DensityBucket::of(duration, boundary_count),
        },
        DurationBucket::About10 => GroupKey::Count(CountBucket::of(boundary_count)),
    }
}

impl fmt::Display for GroupKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            GroupKey::Rate { duration, density } => {
                write!(f, "{}:{}", duration.widen().label(), density.label())
            }
            GroupKey::Count(c) => {
                if c.index() >= 10 {
                    write!(f, "d10:c10+")
                } else {
                    write!(f, "d10:c{}", c.index())
                }
            }
        }
    }
}

impl FromStr for GroupKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<GroupKey> {
        GroupKey::all()
            .into_iter()
            .find(|k| k.to_string() == s)
            .ok_or_else(|| Error::InvalidInput(format!("unknown group label '{s}'")))
    }
}
