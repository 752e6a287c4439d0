//! Driving a network with a signal stream until it stabilizes.

use std::fmt;

use crate::geometry::Point;
use crate::io::TelemetryFrame;
use crate::network::{IndexedComplex, Soam};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Termination {
    /// Upper bound on the total number of signals the network has seen,
    /// counting those processed before a resume.
    pub max_signals: u64,
    /// Consecutive all-stable signals that end the run.
    pub stability_window: u64,
    /// A telemetry frame is taken every this many signals.
    pub telemetry_interval: u64,
}

impl Termination {
    pub fn from_soam(soam: &Soam, telemetry_interval: u64) -> Self {
        Termination {
            max_signals: soam.params().max_signals,
            stability_window: soam.params().stability_window,
            telemetry_interval: telemetry_interval.max(1),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    Stable,
    MaxSignals,
    SourceExhausted,
}

impl StopReason {
    /// Process exit code for this outcome.
    pub fn exit_code(self) -> i32 {
        match self {
            StopReason::Stable => 0,
            StopReason::MaxSignals | StopReason::SourceExhausted => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            StopReason::Stable => "stable",
            StopReason::MaxSignals => "max_signals",
            StopReason::SourceExhausted => "source_exhausted",
        }
    }
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub stop: StopReason,
    /// Total signals seen by the network when the run ended.
    pub signals: u64,
    pub telemetry: Vec<TelemetryFrame>,
    pub complex: IndexedComplex,
}

/// Feeds `source` into `soam` until it has been stable for the whole window,
/// the signal budget is spent, or the source runs dry.
pub fn run(soam: &mut Soam, source: impl IntoIterator<Item = Point>, term: &Termination) -> Result<RunReport> {
    let interval = term.telemetry_interval.max(1);
    let mut telemetry = Vec::new();
    let mut source = source.into_iter();
    let start = soam.signals();
    let stop = loop {
        if soam.stable_streak() >= term.stability_window {
            break StopReason::Stable;
        }
        if soam.signals() >= term.max_signals {
            break StopReason::MaxSignals;
        }
        let Some(xi) = source.next() else { break StopReason::SourceExhausted };
        soam.process_signal(&xi)?;
        if soam.signals().is_multiple_of(interval) {
            telemetry.push(TelemetryFrame::capture(soam));
        }
    };
    if soam.signals() > start && !soam.signals().is_multiple_of(interval) {
        telemetry.push(TelemetryFrame::capture(soam));
    }
    Ok(RunReport { stop, signals: soam.signals(), telemetry, complex: soam.to_indexed() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{ParametricShape, SignalSource};
    use crate::{ManifoldDim, SoamParams};

    fn circle_soam(seed: u64) -> (Soam, SignalSource) {
        let mut src = SignalSource::parametric(ParametricShape::Circle { radius: 1.0 }, 256.0, 0.0, seed).unwrap();
        let a = src.next_signal().unwrap();
        let b = src.next_signal().unwrap();
        let soam = Soam::new(SoamParams::for_dim(ManifoldDim::Curve), a, b).unwrap();
        (soam, src)
    }

    #[test]
    fn zero_budget_stops_immediately() {
        let (mut soam, src) = circle_soam(1);
        let term = Termination { max_signals: 0, stability_window: 10, telemetry_interval: 100 };
        let r = run(&mut soam, src, &term).unwrap();
        assert_eq!(r.stop, StopReason::MaxSignals);
        assert_eq!(r.complex.positions.len(), 2);
        assert!(r.telemetry.is_empty());
        assert_eq!(r.stop.exit_code(), 2);
    }

    #[test]
    fn frame_count_is_ceiling() {
        for (n, interval) in [(1000u64, 100u64), (1001, 100), (999, 1000), (7, 1)] {
            let (mut soam, src) = circle_soam(2);
            let term = Termination { max_signals: n, stability_window: u64::MAX, telemetry_interval: interval };
            let r = run(&mut soam, src, &term).unwrap();
            assert_eq!(r.signals, n);
            assert_eq!(r.telemetry.len() as u64, n.div_ceil(interval));
            assert_eq!(r.telemetry.last().unwrap().signal, n);
        }
    }

    #[test]
    fn exhausted_source() {
        let (mut soam, mut src) = circle_soam(3);
        let pts = src.take_signals(50);
        let term = Termination { max_signals: 1000, stability_window: 10, telemetry_interval: 10 };
        let r = run(&mut soam, pts, &term).unwrap();
        assert_eq!(r.stop, StopReason::SourceExhausted);
        assert_eq!(r.signals, 50);
    }

    #[test]
    fn split_run_equals_single_run() {
        let (mut a, src_a) = circle_soam(4);
        let (mut b, mut src_b) = circle_soam(4);
        let full = Termination { max_signals: 20_000, stability_window: u64::MAX, telemetry_interval: 1000 };
        run(&mut a, src_a, &full).unwrap();
        let half = Termination { max_signals: 7_000, ..full };
        run(&mut b, &mut src_b, &half).unwrap();
        run(&mut b, &mut src_b, &full).unwrap();
        assert_eq!(a.to_indexed(), b.to_indexed());
        assert_eq!(a.counters(), b.counters());
    }
}
