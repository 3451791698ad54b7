//! Periodic delivery of solutions for `every(Time)` requests.

use std::sync::Arc;
use std::time::{Duration, Instant};

use parking_lot::{Condvar, Mutex};
use serde::{Deserialize, Serialize};

use crate::logic::Term;

use super::request::{Answer, Count};
use super::session::SessionRef;
use super::Service;

/// Margin added to every period so that receivers never see two deliveries
/// closer than the period after transport jitter.
pub fn delivery_guard(period: Duration) -> Duration {
    (period / 10).min(Duration::from_millis(10))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StreamStatus {
    Active,
    Paused,
    Closed,
}

#[derive(Debug)]
struct Ctl {
    status: StreamStatus,
    delivered: u64,
    last: Option<Instant>,
}

#[derive(Debug)]
pub(crate) struct StreamShared {
    pub period: Duration,
    pub count: Count,
    /// Deliveries continue one cursor instead of re-snapshotting per tick.
    pub pinned: bool,
    ctl: Mutex<Ctl>,
    cv: Condvar,
}

impl StreamShared {
    pub fn new(period: Duration, count: Count, pinned: bool) -> Self {
        StreamShared {
            period,
            count,
            pinned,
            ctl: Mutex::new(Ctl { status: StreamStatus::Active, delivered: 0, last: None }),
            cv: Condvar::new(),
        }
    }

    pub fn status(&self) -> StreamStatus {
        self.ctl.lock().status
    }

    pub fn set_status(&self, status: StreamStatus) {
        let mut ctl = self.ctl.lock();
        if ctl.status != StreamStatus::Closed {
            ctl.status = status;
        }
        self.cv.notify_all();
    }

    pub fn delivered(&self) -> u64 {
        self.ctl.lock().delivered
    }
}

/// What one tick produced.
pub(crate) enum Tick {
    Deliver(Vec<Answer>),
    /// Deliver this batch, then end the stream.
    Last(Vec<Answer>),
    /// Nothing left; the stream ends without a delivery.
    End,
}

/// Consumer side of a stream. Deliveries are spaced at least one period
/// apart; pausing blocks [`StreamHandle::next_delivery`] until resumed.
#[derive(Debug, Clone)]
pub struct StreamHandle {
    pub(crate) service: Service,
    pub(crate) session: SessionRef,
    pub(crate) shared: Arc<StreamShared>,
    pub(crate) session_id: String,
    pub(crate) goal: Term,
}

impl StreamHandle {
    pub fn session_id(&self) -> &str {
        &self.session_id
    }

    /// The session goal the stream enumerates.
    pub fn goal(&self) -> &Term {
        &self.goal
    }

    pub fn period(&self) -> Duration {
        self.shared.period
    }

    pub fn status(&self) -> StreamStatus {
        self.shared.status()
    }

    pub fn delivered(&self) -> u64 {
        self.shared.delivered()
    }

    /// Blocks until the next batch is due and returns it, or `None` once the
    /// stream is closed.
    pub fn next_delivery(&self) -> Option<Vec<Answer>> {
        loop {
            {
                let mut ctl = self.shared.ctl.lock();
                match ctl.status {
                    StreamStatus::Closed => return None,
                    StreamStatus::Paused => {
                        self.shared.cv.wait(&mut ctl);
                        continue;
                    }
                    StreamStatus::Active => {
                        if let Some(last) = ctl.last {
                            let due = last + self.shared.period + delivery_guard(self.shared.period);
                            if Instant::now() < due {
                                self.shared.cv.wait_until(&mut ctl, due);
                                continue;
                            }
                        }
                    }
                }
            }
            // session before stream, the same order as control operations
            let mut session = self.session.lock();
            let owns = session.stream.as_ref().is_some_and(|s| Arc::ptr_eq(s, &self.shared));
            if !owns {
                self.shared.set_status(StreamStatus::Closed);
                return None;
            }
            if self.shared.status() != StreamStatus::Active {
                continue;
            }
            let tick = self.service.stream_tick(&mut session, &self.shared);
            let mut ctl = self.shared.ctl.lock();
            ctl.last = Some(Instant::now());
            match tick {
                Tick::Deliver(batch) => {
                    ctl.delivered += 1;
                    return Some(batch);
                }
                Tick::Last(batch) => {
                    ctl.delivered += 1;
                    drop(ctl);
                    session.stop_stream();
                    return Some(batch);
                }
                Tick::End => {
                    drop(ctl);
                    session.stop_stream();
                    return None;
                }
            }
        }
    }

    /// Ends the stream from the consumer side (for example when the
    /// receiving connection went away).
    pub fn cancel(&self) {
        let mut session = self.session.lock();
        if session.stream.as_ref().is_some_and(|s| Arc::ptr_eq(s, &self.shared)) {
            session.stop_stream();
        } else {
            self.shared.set_status(StreamStatus::Closed);
        }
    }
}

impl Iterator for StreamHandle {
    type Item = Vec<Answer>;

    fn next(&mut self) -> Option<Self::Item> {
        self.next_delivery()
    }
}
