//! Gaze sources and the constant-velocity Kalman smoother.
//!
//! Coordinates are normalized to `[0, 1]` across the screen; timestamps are
//! seconds on the source's clock.

use std::io::{BufRead, BufReader, Read};
use std::net::{TcpStream, ToSocketAddrs};
use std::path::Path;
use std::sync::{Arc, Mutex};
use std::thread;

use crate::{Error, Result};

/// A stream record older than this is reported invalid.
pub const STREAM_TIMEOUT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GazeSample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub valid: bool,
}

impl GazeSample {
    pub fn new(t: f64, x: f64, y: f64) -> Self {
        GazeSample {
            t,
            x,
            y,
            valid: true,
        }
    }

    pub fn invalid(t: f64, x: f64, y: f64) -> Self {
        GazeSample {
            t,
            x,
            y,
            valid: false,
        }
    }

    /// Position in pixels of a `width x height` frame, clamped into it.
    pub fn to_pixels(&self, width: usize, height: usize) -> (f64, f64) {
        (
            self.x.clamp(0.0, 1.0) * width as f64,
            self.y.clamp(0.0, 1.0) * height as f64,
        )
    }
}

/// Parses one `t x y valid` record.
pub fn parse_record(line: &str) -> Result<GazeSample> {
    let bad = |why: &str| Error::GazeRecord(format!("{why}: {line:?}"));
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != 4 {
        return Err(bad("expected `t x y valid`"));
    }
    let num = |s: &str| -> Result<f64> {
        s.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| bad("not a finite number"))
    };
    let valid = match fields[3] {
        "1" => true,
        "0" => false,
        _ => return Err(bad("valid flag must be 0 or 1")),
    };
    Ok(GazeSample {
        t: num(fields[0])?,
        x: num(fields[1])?,
        y: num(fields[2])?,
        valid,
    })
}

pub fn format_record(s: &GazeSample) -> String {
    format!("{} {} {} {}", s.t, s.x, s.y, u8::from(s.valid))
}

/// Parses a whole path file. Blank lines and `#` comments are skipped;
/// timestamps must not decrease.
pub fn parse_records(text: &str) -> Result<Vec<GazeSample>> {
    let mut out: Vec<GazeSample> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let s = parse_record(line)?;
        if let Some(last) = out.last() {
            if s.t < last.t {
                return Err(Error::OutOfSequence {
                    last: last.t,
                    got: s.t,
                });
            }
        }
        out.push(s);
    }
    Ok(out)
}

/// Smoother tuning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmootherParams {
    /// White-acceleration spectral density, normalized units²/s³.
    pub process_noise: f64,
    /// Measurement standard deviation per axis, normalized units.
    pub measurement_sigma: (f64, f64),
}

/// Webcam tracker accuracy (cm) on its reference screen (cm).
pub const TRACKER_ERROR_CM: (f64, f64) = (2.40, 2.55);
pub const TRACKER_SCREEN_CM: (f64, f64) = (34.5, 19.5);

impl SmootherParams {
    pub fn from_tracker_error(error_cm: (f64, f64), screen_cm: (f64, f64)) -> Self {
        SmootherParams {
            process_noise: 0.5,
            measurement_sigma: (error_cm.0 / screen_cm.0, error_cm.1 / screen_cm.1),
        }
    }
}

impl Default for SmootherParams {
    fn default() -> Self {
        Self::from_tracker_error(TRACKER_ERROR_CM, TRACKER_SCREEN_CM)
    }
}

/// Floor on the measurement variance so a zero-noise configuration still
/// yields a finite gain.
const MIN_VARIANCE: f64 = 1e-12;

/// Position/velocity estimate of one axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisState {
    pub position: f64,
    pub velocity: f64,
    /// Error covariance, symmetric.
    pub covariance: [[f64; 2]; 2],
}

impl AxisState {
    fn seed(position: f64, variance: f64) -> Self {
        AxisState {
            position,
            velocity: 0.0,
            covariance: [[variance, 0.0], [0.0, 1.0]],
        }
    }

    fn predict(&mut self, dt: f64, q: f64) {
        if dt <= 0.0 {
            return;
        }
        let [[p00, p01], [_, p11]] = self.covariance;
        self.position += dt * self.velocity;
        let n00 = p00 + dt * (2.0 * p01 + dt * p11) + q * dt * dt * dt / 3.0;
        let n01 = p01 + dt * p11 + q * dt * dt / 2.0;
        let n11 = p11 + q * dt;
        self.covariance = [[n00, n01], [n01, n11]];
    }

    fn update(&mut self, z: f64, variance: f64) {
        let [[p00, p01], [_, p11]] = self.covariance;
        let s = p00 + variance;
        let (k0, k1) = (p00 / s, p01 / s);
        let innovation = z - self.position;
        self.position += k0 * innovation;
        self.velocity += k1 * innovation;
        // Joseph-free form; symmetric by construction.
        let n00 = (1.0 - k0) * p00;
        let n01 = (1.0 - k0) * p01;
        let n11 = p11 - k1 * p01;
        self.covariance = [[n00, n01], [n01, n11]];
    }
}

/// Per-axis constant-velocity Kalman filter.
#[derive(Debug, Clone, PartialEq)]
pub struct GazeSmoother {
    params: SmootherParams,
    state: Option<(AxisState, AxisState)>,
    last_t: Option<f64>,
}

impl Default for GazeSmoother {
    fn default() -> Self {
        Self::new(SmootherParams::default())
    }
}

impl GazeSmoother {
    pub fn new(params: SmootherParams) -> Self {
        GazeSmoother {
            params,
            state: None,
            last_t: None,
        }
    }

    pub fn params(&self) -> SmootherParams {
        self.params
    }

    pub fn state(&self) -> Option<(AxisState, AxisState)> {
        self.state
    }

    /// Forgets the estimate; the next valid sample seeds it.
    pub fn reset(&mut self) {
        self.state = None;
        self.last_t = None;
    }

    fn variances(&self) -> (f64, f64) {
        let (sx, sy) = self.params.measurement_sigma;
        ((sx * sx).max(MIN_VARIANCE), (sy * sy).max(MIN_VARIANCE))
    }

    /// Feeds one sample and returns the smoothed estimate. Invalid samples
    /// only advance the prediction.
    pub fn smooth(&mut self, sample: GazeSample) -> Result<GazeSample> {
        if !sample.t.is_finite() {
            return Err(Error::GazeRecord(format!("non-finite timestamp {}", sample.t)));
        }
        if let Some(last) = self.last_t {
            if sample.t < last {
                return Err(Error::OutOfSequence {
                    last,
                    got: sample.t,
                });
            }
        }
        let measured = sample.valid && sample.x.is_finite() && sample.y.is_finite();
        let (vx, vy) = self.variances();
        let q = self.params.process_noise;
        let dt = self.last_t.map_or(0.0, |last| sample.t - last);

        let state = match (&mut self.state, measured) {
            (None, false) => return Ok(GazeSample { valid: false, ..sample }),
            (None, true) => {
                self.state = Some((AxisState::seed(sample.x, vx), AxisState::seed(sample.y, vy)));
                self.state.as_mut().expect("just seeded")
            }
            (Some(s), _) => {
                s.0.predict(dt, q);
                s.1.predict(dt, q);
                if measured {
                    s.0.update(sample.x, vx);
                    s.1.update(sample.y, vy);
                }
                s
            }
        };
        self.last_t = Some(sample.t);
        Ok(GazeSample {
            t: sample.t,
            x: state.0.position,
            y: state.1.position,
            valid: measured,
        })
    }
}

pub trait GazeSource: Send {
    fn poll(&mut self, now: f64) -> GazeSample;
}

/// Pointer position as gaze; holds the last position when the pointer
/// leaves the surface.
#[derive(Debug, Clone)]
pub struct MouseSource {
    width: f64,
    height: f64,
    position: Option<(f64, f64)>,
}

impl MouseSource {
    pub fn new(width: u32, height: u32) -> Self {
        MouseSource {
            width: width.max(1) as f64,
            height: height.max(1) as f64,
            position: None,
        }
    }

    /// Pointer moved to pixel `(px, py)`.
    pub fn move_to(&mut self, px: f64, py: f64) {
        self.position = Some((px / self.width, py / self.height));
    }
}

impl GazeSource for MouseSource {
    fn poll(&mut self, now: f64) -> GazeSample {
        match self.position {
            Some((x, y)) => GazeSample::new(now, x, y),
            None => GazeSample::invalid(now, 0.5, 0.5),
        }
    }
}

/// Piecewise-linear path through recorded points.
#[derive(Debug, Clone)]
pub struct ScriptedSource {
    points: Vec<GazeSample>,
}

impl ScriptedSource {
    pub fn new(points: Vec<GazeSample>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::GazeRecord("path has no points".into()));
        }
        Ok(ScriptedSource { points })
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::new(parse_records(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn points(&self) -> &[GazeSample] {
        &self.points
    }
}

impl GazeSource for ScriptedSource {
    fn poll(&mut self, now: f64) -> GazeSample {
        let pts = &self.points;
        let i = pts.partition_point(|p| p.t <= now);
        let s = if i == 0 {
            pts[0]
        } else if i == pts.len() {
            pts[i - 1]
        } else {
            let (a, b) = (pts[i - 1], pts[i]);
            let u = (now - a.t) / (b.t - a.t);
            GazeSample {
                t: now,
                x: a.x + (b.x - a.x) * u,
                y: a.y + (b.y - a.y) * u,
                valid: a.valid && b.valid,
            }
        };
        GazeSample { t: now, ..s }
    }
}

#[derive(Debug, Default)]
struct Mailbox {
    latest: Option<GazeSample>,
    fresh: bool,
    connected: bool,
}

/// Writer side of a [`StreamSource`] mailbox.
#[derive(Debug, Clone)]
pub struct StreamFeeder {
    mailbox: Arc<Mutex<Mailbox>>,
}

impl StreamFeeder {
    /// Replaces the pending record; older unread records are dropped.
    pub fn push(&self, sample: GazeSample) {
        let mut m = self.mailbox.lock().expect("mailbox poisoned");
        m.latest = Some(sample);
        m.fresh = true;
    }

    pub fn disconnect(&self) {
        self.mailbox.lock().expect("mailbox poisoned").connected = false;
    }
}

/// Latest-value mailbox filled from a record stream. A poll is valid only if
/// a record arrived since the previous poll, the stream is connected, and
/// the record is younger than [`STREAM_TIMEOUT`].
#[derive(Debug)]
pub struct StreamSource {
    mailbox: Arc<Mutex<Mailbox>>,
}

impl StreamSource {
    pub fn channel() -> (StreamSource, StreamFeeder) {
        let mailbox = Arc::new(Mutex::new(Mailbox {
            connected: true,
            ..Default::default()
        }));
        (
            StreamSource {
                mailbox: mailbox.clone(),
            },
            StreamFeeder { mailbox },
        )
    }

    /// Reads records on a background thread until EOF or a read error.
    /// Malformed lines are logged and skipped.
    pub fn from_reader<R: Read + Send + 'static>(reader: R) -> StreamSource {
        let (source, feeder) = Self::channel();
        thread::spawn(move || {
            for line in BufReader::new(reader).lines() {
                let Ok(line) = line else { break };
                if line.trim().is_empty() {
                    continue;
                }
                match parse_record(&line) {
                    Ok(s) => feeder.push(s),
                    Err(e) => log::warn!("{e}"),
                }
            }
            feeder.disconnect();
        });
        source
    }

    pub fn connect(addr: impl ToSocketAddrs) -> Result<StreamSource> {
        Ok(Self::from_reader(TcpStream::connect(addr)?))
    }

    pub fn stdin() -> StreamSource {
        Self::from_reader(std::io::stdin())
    }
}

impl GazeSource for StreamSource {
    fn poll(&mut self, now: f64) -> GazeSample {
        let mut m = self.mailbox.lock().expect("mailbox poisoned");
        let fresh = std::mem::take(&mut m.fresh);
        match m.latest {
            None => GazeSample::invalid(now, 0.5, 0.5),
            Some(s) => {
                let live = m.connected && fresh && now - s.t <= STREAM_TIMEOUT;
                GazeSample {
                    t: now,
                    x: s.x,
                    y: s.y,
                    valid: live && s.valid,
                }
            }
        }
    }
}

/// A source plus smoother; switching sources re-seeds the smoother from the
/// new source's first sample.
pub struct GazeTracker {
    source: Box<dyn GazeSource>,
    smoother: GazeSmoother,
}

impl GazeTracker {
    pub fn new(source: Box<dyn GazeSource>, params: SmootherParams) -> Self {
        GazeTracker {
            source,
            smoother: GazeSmoother::new(params),
        }
    }

    pub fn switch_source(&mut self, source: Box<dyn GazeSource>) {
        self.source = source;
        self.smoother.reset();
    }

    pub fn poll(&mut self, now: f64) -> Result<GazeSample> {
        let raw = self.source.poll(now);
        self.smoother.smooth(raw)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, Normal};

    fn std_dev(v: &[f64]) -> f64 {
        let m = v.iter().sum::<f64>() / v.len() as f64;
        (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / v.len() as f64).sqrt()
    }

    #[test]
    fn record_round_trip() {
        let s = GazeSample::new(1.25, 0.5, 0.75);
        assert_eq!(parse_record(&format_record(&s)).unwrap(), s);
        assert!(parse_record("1 0.5 0.5").is_err());
        assert!(parse_record("1 0,5 0.5 1").is_err());
        assert!(parse_record("1 0.5 0.5 2").is_err());
    }

    #[test]
    fn constant_input_is_fixed_point() {
        let mut k = GazeSmoother::default();
        let mut last = None;
        for i in 0..100 {
            last = Some(k.smooth(GazeSample::new(i as f64 / 60.0, 0.5, 0.5)).unwrap());
        }
        let s = last.unwrap();
        assert!((s.x - 0.5).abs() < 1e-3 && (s.y - 0.5).abs() < 1e-3);
    }

    #[test]
    fn noise_is_reduced() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let noise = Normal::new(0.0, 0.02).unwrap();
        let mut k = GazeSmoother::default();
        let (mut raw, mut out) = (Vec::new(), Vec::new());
        for i in 0..1000 {
            let x = 0.5 + noise.sample(&mut rng);
            raw.push(x);
            out.push(k.smooth(GazeSample::new(i as f64 / 60.0, x, 0.5)).unwrap().x);
        }
        assert!(std_dev(&out) <= 0.5 * std_dev(&raw));
    }

    #[test]
    fn step_response_is_bounded() {
        let mut k = GazeSmoother::default();
        k.smooth(GazeSample::new(0.0, 0.0, 0.0)).unwrap();
        let crossed = (1..=600)
            .find(|&i| k.smooth(GazeSample::new(i as f64 / 60.0, 1.0, 1.0)).unwrap().x > 0.9)
            .expect("crosses 0.9");
        assert!(crossed < 60, "{crossed}");
    }

    #[test]
    fn zero_noise_tracks_input() {
        let mut k = GazeSmoother::new(SmootherParams {
            process_noise: 0.5,
            measurement_sigma: (0.0, 0.0),
        });
        for i in 0..50 {
            let x = (i as f64 * 0.37).sin() * 0.4 + 0.5;
            let s = k.smooth(GazeSample::new(i as f64 / 60.0, x, 0.2)).unwrap();
            assert!((s.x - x).abs() < 1e-6);
        }
    }

    #[test]
    fn decreasing_time_is_rejected() {
        let mut k = GazeSmoother::default();
        k.smooth(GazeSample::new(1.0, 0.5, 0.5)).unwrap();
        assert!(matches!(
            k.smooth(GazeSample::new(0.5, 0.5, 0.5)),
            Err(Error::OutOfSequence { .. })
        ));
    }

    #[test]
    fn invalid_samples_predict_only() {
        let mut k = GazeSmoother::default();
        k.smooth(GazeSample::new(0.0, 0.3, 0.3)).unwrap();
        let s = k.smooth(GazeSample::invalid(0.1, 0.9, 0.9)).unwrap();
        assert!(!s.valid);
        assert!((s.x - 0.3).abs() < 1e-12);
    }

    #[test]
    fn covariance_stays_symmetric_positive_definite() {
        let mut k = GazeSmoother::default();
        for i in 0..500 {
            let valid = i % 7 != 3;
            let s = GazeSample {
                t: i as f64 * 0.013,
                x: (i as f64 * 0.1).cos(),
                y: 0.5,
                valid,
            };
            k.smooth(s).unwrap();
            let (ax, _) = k.state().unwrap();
            let [[a, b], [c, d]] = ax.covariance;
            assert_eq!(b, c);
            assert!(a > 0.0 && d > 0.0 && a * d - b * c > 0.0);
        }
    }

    #[test]
    fn scripted_midpoint_and_hold() {
        let mut s = ScriptedSource::parse("0 0 0 1\n1 1 1 1\n").unwrap();
        let m = s.poll(0.5);
        assert_eq!((m.x, m.y), (0.5, 0.5));
        let end = s.poll(7.0);
        assert_eq!((end.x, end.y, end.valid), (1.0, 1.0, true));
        assert!(ScriptedSource::parse("1 0 0 1\n0 1 1 1\n").is_err());
    }

    #[test]
    fn mouse_center_is_half() {
        let mut m = MouseSource::new(2560, 1440);
        m.move_to(1280.0, 720.0);
        let s = m.poll(0.0);
        assert_eq!((s.x, s.y, s.valid), (0.5, 0.5, true));
    }

    #[test]
    fn stream_timeout_and_disconnect() {
        let (mut src, feed) = StreamSource::channel();
        assert!(!src.poll(0.0).valid);
        feed.push(GazeSample::new(1.0, 0.2, 0.4));
        assert!(src.poll(1.1).valid);
        feed.push(GazeSample::new(1.2, 0.2, 0.4));
        let stale = src.poll(1.8);
        assert!(!stale.valid);
        assert_eq!((stale.x, stale.y), (0.2, 0.4));
        feed.push(GazeSample::new(2.0, 0.3, 0.4));
        feed.disconnect();
        assert!(!src.poll(2.0).valid);
    }

    #[test]
    fn reader_stream_delivers_latest() {
        let mut src = StreamSource::from_reader(std::io::Cursor::new("0 0.1 0.1 1\nbad\n0.2 0.6 0.7 1\n"));
        for _ in 0..200 {
            let connected = src.mailbox.lock().unwrap().connected;
            if !connected {
                break;
            }
            std::thread::sleep(std::time::Duration::from_millis(5));
        }
        let s = src.poll(0.2);
        assert_eq!((s.x, s.y), (0.6, 0.7));
        // Disconnected after EOF.
        assert!(!s.valid);
    }

    #[test]
    fn switching_source_reseeds() {
        let mut a = MouseSource::new(100, 100);
        a.move_to(10.0, 10.0);
        let mut t = GazeTracker::new(Box::new(a), SmootherParams::default());
        for i in 0..10 {
            t.poll(i as f64 / 60.0).unwrap();
        }
        let mut b = MouseSource::new(100, 100);
        b.move_to(90.0, 90.0);
        t.switch_source(Box::new(b));
        let s = t.poll(0.2).unwrap();
        assert_eq!((s.x, s.y), (0.9, 0.9));
    }
}
