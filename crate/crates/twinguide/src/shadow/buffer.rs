//! Bounded frame queue decoupling ingestion from state emission.
//!
//! One writer pushes frames; any number of readers drain them. When the
//! queue is full the oldest unprocessed frame is dropped and counted, so a
//! slow consumer can never stall acquisition.

use std::collections::VecDeque;
use std::sync::{Condvar, Mutex};

use crate::shadow::SensorFrame;

pub struct FrameBuffer {
    inner: Mutex<Inner>,
    available: Condvar,
    capacity: usize,
}

struct Inner {
    frames: VecDeque<SensorFrame>,
    dropped: u64,
    closed: bool,
}

impl FrameBuffer {
    pub fn new(capacity: usize) -> Self {
        Self {
            inner: Mutex::new(Inner {
                frames: VecDeque::with_capacity(capacity),
                dropped: 0,
                closed: false,
            }),
            available: Condvar::new(),
            capacity: capacity.max(1),
        }
    }

    /// Push a frame, evicting the oldest one when full. Never blocks.
    pub fn push(&self, frame: SensorFrame) {
        let mut inner = self.inner.lock().unwrap();
        if inner.frames.len() >= self.capacity {
            inner.frames.pop_front();
            inner.dropped += 1;
        }
        inner.frames.push_back(frame);
        drop(inner);
        self.available.notify_one();
    }

    /// Pop the next frame, blocking until one arrives or the buffer closes.
    pub fn pop(&self) -> Option<SensorFrame> {
        let mut inner = self.inner.lock().unwrap();
        loop {
            if let Some(frame) = inner.frames.pop_front() {
                return Some(frame);
            }
            if inner.closed {
                return None;
            }
            inner = self.available.wait(inner).unwrap();
        }
    }

    /// Non-blocking pop for polling consumers.
    pub fn try_pop(&self) -> Option<SensorFrame> {
        self.inner.lock().unwrap().frames.pop_front()
    }

    /// Frames evicted because the consumer fell behind.
    pub fn dropped(&self) -> u64 {
        self.inner.lock().unwrap().dropped
    }

    pub fn len(&self) -> usize {
        self.inner.lock().unwrap().frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Wake blocked readers; further pops drain the backlog then return None.
    pub fn close(&self) {
        self.inner.lock().unwrap().closed = true;
        self.available.notify_all();
    }
}
