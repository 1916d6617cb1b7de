//! Synthetic event-camera streams and their conversion to time-images.

use std::io::BufRead;

use rand::Rng;
use rand_distr::{Distribution, Exp};

use crate::error::{Error, Result};
use crate::structures::Frame;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Polarity {
    On,
    Off,
}

impl Polarity {
    pub fn sign(self) -> i8 {
        match self {
            Polarity::On => 1,
            Polarity::Off => -1,
        }
    }
}

/// One brightness-change event; `t` in microseconds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Event {
    pub x: u16,
    pub y: u16,
    pub t: u64,
    pub polarity: Polarity,
}

/// A vertical edge sweeping horizontally across the sensor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StreamParams {
    /// Edge speed in pixels per second; the edge wraps around the grid.
    pub velocity: f64,
    pub duration_us: u64,
    pub width: u16,
    pub height: u16,
    /// Mean events per second over the whole edge.
    pub rate: f64,
    /// Edge column at `t = 0`.
    pub start_x: f64,
}

/// Poisson-timed events along a moving edge, sorted by time.
///
/// Each event lands on the column the edge occupies at its timestamp and on
/// a uniformly drawn row. Polarity follows the direction of motion.
pub fn generate_synthetic_stream<R: Rng + ?Sized>(params: &StreamParams, rng: &mut R) -> Result<Vec<Event>> {
    if params.duration_us == 0 || !params.rate.is_finite() || params.rate <= 0.0 {
        return Err(Error::invalid("duration and rate must be positive"));
    }
    if params.width == 0 || params.height == 0 {
        return Err(Error::invalid("sensor grid must be non-empty"));
    }
    if !params.velocity.is_finite() || !params.start_x.is_finite() {
        return Err(Error::invalid("edge position and velocity must be finite"));
    }
    let gap = Exp::new(params.rate).map_err(|e| Error::invalid(e.to_string()))?;
    let polarity = if params.velocity >= 0.0 { Polarity::On } else { Polarity::Off };
    let duration = params.duration_us as f64 * 1e-6;
    let width = params.width as f64;

    let mut events = Vec::with_capacity((params.rate * duration * 1.2) as usize + 16);
    let mut t = 0.0;
    loop {
        t += gap.sample(rng);
        if t >= duration {
            break;
        }
        let x = (params.start_x + params.velocity * t).rem_euclid(width).floor() as u16;
        events.push(Event {
            x: x.min(params.width - 1),
            y: rng.random_range(0..params.height),
            t: (t * 1e6) as u64,
            polarity,
        });
    }
    Ok(events)
}

/// Half-open time window `[start_us, end_us)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TimeWindow {
    pub start_us: u64,
    pub end_us: u64,
}

/// Accumulates events inside `window` into per-pixel counts and rescales
/// them linearly so the busiest pixel gets level `levels - 1`.
///
/// Scaling rounds to the nearest level. A window without events yields an
/// all-zero frame. The result depends only on counts, not event order.
pub fn events_to_frame(
    events: &[Event],
    window: TimeWindow,
    width: usize,
    height: usize,
    levels: usize,
) -> Result<Frame> {
    if levels < 2 {
        return Err(Error::invalid("need at least 2 intensity levels"));
    }
    if levels > u16::MAX as usize + 1 {
        return Err(Error::invalid("too many intensity levels"));
    }
    let mut counts = vec![0u64; width * height];
    for e in events {
        if (e.x as usize) >= width || (e.y as usize) >= height {
            return Err(Error::invalid(format!(
                "event at ({}, {}) outside the {width}x{height} grid",
                e.x, e.y
            )));
        }
        if e.t >= window.start_us && e.t < window.end_us {
            counts[e.y as usize * width + e.x as usize] += 1;
        }
    }
    let max = counts.iter().copied().max().unwrap_or(0);
    let top = (levels - 1) as u64;
    let pixels = counts
        .iter()
        .map(|&c| if max == 0 { 0 } else { ((c * top * 2 + max) / (2 * max)) as u16 })
        .collect();
    Frame::new(width, height, pixels)
}

/// Reads `x,y,t,polarity` rows; polarity is `1`/`-1` (or `+1`). A header
/// line starting with `x` is skipped.
pub fn read_events_csv<R: BufRead>(reader: R) -> Result<Vec<Event>> {
    let mut events = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || (i == 0 && line.starts_with('x')) {
            continue;
        }
        let bad = |what: &str| Error::format("event CSV", format!("line {}: {what}", i + 1));
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(bad("expected 4 fields"));
        }
        let x = fields[0].parse().map_err(|_| bad("bad x"))?;
        let y = fields[1].parse().map_err(|_| bad("bad y"))?;
        let t = fields[2].parse().map_err(|_| bad("bad timestamp"))?;
        let polarity = match fields[3] {
            "1" | "+1" => Polarity::On,
            "-1" => Polarity::Off,
            _ => return Err(bad("polarity must be 1 or -1")),
        };
        events.push(Event { x, y, t, polarity });
    }
    Ok(events)
}

pub fn events_to_csv(events: &[Event]) -> String {
    let mut out = String::from("x,y,t,polarity\n");
    for e in events {
        out.push_str(&format!("{},{},{},{}\n", e.x, e.y, e.t, e.polarity.sign()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use rand::seq::SliceRandom;

    fn params(velocity: f64, rate: f64) -> StreamParams {
        StreamParams {
            velocity,
            duration_us: 100_000,
            width: 32,
            height: 32,
            rate,
            start_x: 10.0,
        }
    }

    const ALL: TimeWindow = TimeWindow { start_us: 0, end_us: u64::MAX };

    #[test]
    fn no_events_gives_black_frame() {
        let f = events_to_frame(&[], ALL, 4, 3, 26).unwrap();
        assert!(f.pixels().iter().all(|&p| p == 0));
    }

    #[test]
    fn single_hot_pixel_saturates() {
        let ev: Vec<_> = (0..5)
            .map(|t| Event { x: 2, y: 1, t, polarity: Polarity::On })
            .collect();
        let f = events_to_frame(&ev, ALL, 4, 3, 26).unwrap();
        assert_eq!(f.get(2, 1), 25);
        assert_eq!(f.pixels().iter().filter(|&&p| p != 0).count(), 1);
    }

    #[test]
    fn window_and_grid_are_enforced() {
        let ev = [
            Event { x: 0, y: 0, t: 5, polarity: Polarity::On },
            Event { x: 1, y: 0, t: 50, polarity: Polarity::On },
        ];
        let f = events_to_frame(&ev, TimeWindow { start_us: 0, end_us: 10 }, 2, 1, 4).unwrap();
        assert_eq!(f.pixels(), &[3, 0]);
        assert!(events_to_frame(&ev, ALL, 1, 1, 4).is_err());
        assert!(events_to_frame(&ev, ALL, 2, 1, 1).is_err());
    }

    #[test]
    fn order_does_not_matter() {
        let mut ev = generate_synthetic_stream(&params(80.0, 20_000.0), &mut seeded(1)).unwrap();
        let a = events_to_frame(&ev, ALL, 32, 32, 26).unwrap();
        ev.shuffle(&mut seeded(2));
        assert_eq!(events_to_frame(&ev, ALL, 32, 32, 26).unwrap(), a);
    }

    #[test]
    fn static_edge_stays_put() {
        let ev = generate_synthetic_stream(&params(0.0, 5_000.0), &mut seeded(3)).unwrap();
        assert!(!ev.is_empty());
        assert!(ev.iter().all(|e| e.x == 10));
    }

    #[test]
    fn streams_are_sorted_and_reproducible() {
        let a = generate_synthetic_stream(&params(-120.0, 10_000.0), &mut seeded(4)).unwrap();
        let b = generate_synthetic_stream(&params(-120.0, 10_000.0), &mut seeded(4)).unwrap();
        assert_eq!(a, b);
        assert!(a.windows(2).all(|w| w[0].t <= w[1].t));
        assert!(a.iter().all(|e| e.polarity == Polarity::Off));
    }

    #[test]
    fn doubling_rate_doubles_events() {
        let long = |rate| StreamParams { duration_us: 10_000_000, ..params(50.0, rate) };
        let one = generate_synthetic_stream(&long(2_000.0), &mut seeded(5)).unwrap().len() as f64;
        let two = generate_synthetic_stream(&long(4_000.0), &mut seeded(6)).unwrap().len() as f64;
        let ratio = two / one;
        assert!((ratio - 2.0).abs() < 0.2, "{ratio}");
    }

    #[test]
    fn invalid_stream_parameters() {
        let mut rng = seeded(7);
        assert!(generate_synthetic_stream(&StreamParams { rate: 0.0, ..params(1.0, 1.0) }, &mut rng).is_err());
        assert!(generate_synthetic_stream(&StreamParams { duration_us: 0, ..params(1.0, 1.0) }, &mut rng).is_err());
        assert!(generate_synthetic_stream(&StreamParams { width: 0, ..params(1.0, 1.0) }, &mut rng).is_err());
    }

    #[test]
    fn event_csv_round_trip() {
        let ev = generate_synthetic_stream(&params(30.0, 2_000.0), &mut seeded(8)).unwrap();
        let text = events_to_csv(&ev);
        assert_eq!(read_events_csv(text.as_bytes()).unwrap(), ev);
        assert!(read_events_csv("1,2,3\n".as_bytes()).is_err());
        assert!(read_events_csv("1,2,3,0\n".as_bytes()).is_err());
    }
}
