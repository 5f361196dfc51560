//! Trajectory recording shared by the simulators.

/// Recorded (time, unscaled state) samples along one path.
pub type Trajectory = Vec<(f64, Vec<i64>)>;

/// What to record along a path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Record {
    /// Final state only.
    None,
    /// Down-sample onto the grid `0, dt, 2dt, ..` plus the final time.
    Grid(f64),
    /// Every jump (exact-method paths only); memory grows with the event count.
    Jumps,
}

pub(crate) struct Recorder {
    mode: Record,
    next_grid: u64,
    last_time: f64,
    points: Trajectory,
}

impl Recorder {
    pub fn new(mode: Record, initial: &[i64]) -> Self {
        let mut points = Trajectory::new();
        if mode != Record::None {
            points.push((0.0, initial.to_vec()));
        }
        Self {
            mode,
            next_grid: 1,
            last_time: 0.0,
            points,
        }
    }

    /// Record grid points strictly before `t_new`; `state` is the path value
    /// on `[last_time, t_new)`. Call before applying the update at `t_new`.
    pub fn advance_to(&mut self, t_new: f64, state: &[i64]) {
        if let Record::Grid(dt) = self.mode {
            loop {
                let g = self.next_grid as f64 * dt;
                if g >= t_new {
                    break;
                }
                self.points.push((g, state.to_vec()));
                self.last_time = g;
                self.next_grid += 1;
            }
        }
    }

    /// Record the post-update state at `t` (jump recording only).
    pub fn observe_jump(&mut self, t: f64, state: &[i64]) {
        if self.mode == Record::Jumps {
            self.points.push((t, state.to_vec()));
            self.last_time = t;
        }
    }

    /// Record trailing grid points and the final time itself.
    pub fn finish(mut self, t_end: f64, state: &[i64]) -> Option<Trajectory> {
        match self.mode {
            Record::None => None,
            Record::Jumps => {
                if self.last_time < t_end {
                    self.points.push((t_end, state.to_vec()));
                }
                Some(self.points)
            }
            Record::Grid(dt) => {
                loop {
                    let g = self.next_grid as f64 * dt;
                    if g > t_end * (1.0 + 1e-12) {
                        break;
                    }
                    self.points.push((g.min(t_end), state.to_vec()));
                    self.last_time = g;
                    self.next_grid += 1;
                }
                if self.last_time < t_end {
                    self.points.push((t_end, state.to_vec()));
                }
                Some(self.points)
            }
        }
    }
}
