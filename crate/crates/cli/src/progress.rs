//! Progress reporting on standard error.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};
use std::thread::{self, JoinHandle};
use std::time::{Duration, Instant};

/// Prints stage messages as they happen and, while a stage runs, a
/// heartbeat line at a fixed interval.
pub struct Progress {
    start: Instant,
    quiet: bool,
    stage: Arc<Mutex<String>>,
    stop: Arc<AtomicBool>,
    heartbeat: Option<JoinHandle<()>>,
}

impl Progress {
    pub fn new(quiet: bool, interval: Duration) -> Self {
        let start = Instant::now();
        let stage = Arc::new(Mutex::new(String::from("starting")));
        let stop = Arc::new(AtomicBool::new(false));
        let heartbeat = (!quiet).then(|| {
            let stage = stage.clone();
            let stop = stop.clone();
            thread::spawn(move || {
                let tick = Duration::from_millis(100);
                let mut waited = Duration::ZERO;
                while !stop.load(Ordering::Relaxed) {
                    thread::sleep(tick);
                    waited += tick;
                    if waited >= interval {
                        waited = Duration::ZERO;
                        let current = stage.lock().unwrap().clone();
                        eprintln!("[{:>7.1}s] still working: {current}", start.elapsed().as_secs_f64());
                    }
                }
            })
        });
        Progress {
            start,
            quiet,
            stage,
            stop,
            heartbeat,
        }
    }

    pub fn message(&self, msg: &str) {
        *self.stage.lock().unwrap() = msg.to_string();
        if !self.quiet {
            eprintln!("[{:>7.1}s] {msg}", self.start.elapsed().as_secs_f64());
        }
    }
}

impl Drop for Progress {
    fn drop(&mut self) {
        self.stop.store(true, Ordering::Relaxed);
        if let Some(h) = self.heartbeat.take() {
            let _ = h.join();
        }
    }
}
