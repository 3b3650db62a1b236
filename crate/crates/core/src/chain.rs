//! State space and one-step transition rule for a closed chain of contours.
//!
//! The chain has `contours` rings of `2 * half_cells` cells each. Ring `i`
//! shares a node with ring `i + 1 (mod N)`: the node sits between cells 0
//! and 1 of ring `i` and between cells `m` and `m + 1` of ring `i + 1`.
//! Each ring carries a single cluster of `cluster_len` contiguous particles,
//! identified by the cell index of its leading particle. All clusters try to
//! advance one cell per step; a cluster that would drag its tail through a
//! node currently straddled by the neighbouring cluster waits instead, and
//! simultaneous arrivals at a node are won by the cluster approaching from
//! the left ring.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ChainError {
    #[error("need at least 2 contours, got {0}")]
    TooFewContours(u32),
    #[error("half_cells must be at least 1")]
    ZeroHalfCells,
    #[error("cluster_len {len} outside 1..={max}")]
    ClusterLenOutOfRange { len: u32, max: u32 },
    #[error("state has {got} positions, expected {want}")]
    WrongArity { got: usize, want: usize },
    #[error("position {pos} out of range for {cells} cells")]
    PositionOutOfRange { pos: u32, cells: u32 },
    #[error("state is not admissible")]
    Inadmissible,
    #[error("index {index} out of range for state space of size {size}")]
    IndexOutOfRange { index: u128, size: u128 },
}

/// Validated chain dimensions.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct ChainParams {
    contours: u32,
    half_cells: u32,
    cluster_len: u32,
}

impl ChainParams {
    /// `contours >= 2`, `half_cells >= 1`, `1 <= cluster_len <= 2 * half_cells - 1`
    pub fn new(contours: u32, half_cells: u32, cluster_len: u32) -> Result<ChainParams, ChainError> {
        if contours < 2 {
            return Err(ChainError::TooFewContours(contours));
        }
        if half_cells == 0 {
            return Err(ChainError::ZeroHalfCells);
        }
        let max = 2 * half_cells - 1;
        if cluster_len == 0 || cluster_len > max {
            return Err(ChainError::ClusterLenOutOfRange {
                len: cluster_len,
                max,
            });
        }
        Ok(ChainParams {
            contours,
            half_cells,
            cluster_len,
        })
    }

    pub fn contours(&self) -> u32 {
        self.contours
    }

    pub fn half_cells(&self) -> u32 {
        self.half_cells
    }

    pub fn cluster_len(&self) -> u32 {
        self.cluster_len
    }

    /// Cells per contour, `2 * half_cells`.
    pub fn cells(&self) -> u32 {
        2 * self.half_cells
    }

    /// `(2m)^N`, or `None` when it does not fit in a `u128`.
    pub fn state_space_size(&self) -> Option<u128> {
        (self.cells() as u128).checked_pow(self.contours)
    }

    /// Whether a cluster whose leader sits at `x` straddles the node shared
    /// with the next contour (the one between this contour's cells 0 and 1).
    pub fn occupies_right_node(&self, x: u32) -> bool {
        debug_assert!(x < self.cells());
        (1..self.cluster_len).contains(&x)
    }

    /// Whether a cluster whose leader sits at `x` straddles the node shared
    /// with the previous contour (between this contour's cells m and m + 1).
    pub fn occupies_left_node(&self, x: u32) -> bool {
        debug_assert!(x < self.cells());
        let off = (x + self.half_cells) % self.cells();
        (1..self.cluster_len).contains(&off)
    }

    /// Well-formedness: right arity, every position within the contour.
    pub fn check_state(&self, state: &SystemState) -> Result<(), ChainError> {
        let want = self.contours as usize;
        if state.0.len() != want {
            return Err(ChainError::WrongArity {
                got: state.0.len(),
                want,
            });
        }
        for &pos in &state.0 {
            if pos >= self.cells() {
                return Err(ChainError::PositionOutOfRange {
                    pos,
                    cells: self.cells(),
                });
            }
        }
        Ok(())
    }

    /// No shared node is straddled from both sides at once.
    ///
    /// The state must be well-formed; a malformed state is a caller bug and
    /// panics rather than returning `false`.
    pub fn is_admissible(&self, state: &SystemState) -> bool {
        self.check_state(state).expect("malformed state");
        let n = self.contours as usize;
        (0..n).all(|i| {
            !(self.occupies_right_node(state.0[i]) && self.occupies_left_node(state.0[(i + 1) % n]))
        })
    }

    /// Why cluster `i` cannot advance this step, if it cannot.
    ///
    /// `Second`: the leader sits in cell 0 and the next contour's cluster
    /// straddles the shared node, so entering cell 1 would collide.
    /// `First`: the leader sits in cell m and the previous contour's cluster
    /// is either mid-node or arrived simultaneously and has priority.
    pub fn blocked(&self, state: &SystemState, i: usize) -> Option<DelayType> {
        let n = self.contours as usize;
        let x = state.0[i];
        if x == 0 && self.occupies_left_node(state.0[(i + 1) % n]) {
            return Some(DelayType::Second);
        }
        if x == self.half_cells && state.0[(i + n - 1) % n] < self.cluster_len {
            return Some(DelayType::First);
        }
        None
    }

    /// Advance every unblocked cluster one cell, synchronously.
    pub fn step(&self, state: &SystemState) -> StepResult {
        debug_assert!(self.is_admissible(state));
        let n = self.contours as usize;
        let mut next = Vec::with_capacity(n);
        let mut moved = vec![false; n];
        let mut delays = Vec::new();
        for (i, flag) in moved.iter_mut().enumerate() {
            match self.blocked(state, i) {
                None => {
                    *flag = true;
                    next.push((state.0[i] + 1) % self.cells());
                }
                Some(delay_type) => {
                    let node = match delay_type {
                        DelayType::First => (i + n - 1) % n,
                        DelayType::Second => i,
                    };
                    delays.push(DelayEvent {
                        cluster: i,
                        delay_type,
                        node,
                    });
                    next.push(state.0[i]);
                }
            }
        }
        let next = SystemState(next);
        debug_assert!(self.is_admissible(&next));
        StepResult {
            next,
            moved,
            delays,
        }
    }

    /// Cell distance from leader `i` forward to leader `i + 1`, mod `2m`.
    pub fn delta(&self, state: &SystemState, i: usize) -> u32 {
        let n = self.contours as usize;
        (state.0[(i + 1) % n] + self.cells() - state.0[i]) % self.cells()
    }

    /// Little-endian mixed-radix encoding: position 0 is the least
    /// significant digit, base `2m`. Panics if the state space exceeds
    /// `u128`; use `state_space_size` to check first.
    pub fn encode(&self, state: &SystemState) -> u128 {
        debug_assert!(self.check_state(state).is_ok());
        let base = self.cells() as u128;
        let mut index: u128 = 0;
        for &pos in state.0.iter().rev() {
            index = index
                .checked_mul(base)
                .and_then(|i| i.checked_add(pos as u128))
                .expect("state space exceeds u128");
        }
        index
    }

    /// Inverse of `encode`.
    pub fn decode(&self, index: u128) -> Result<SystemState, ChainError> {
        let size = self
            .state_space_size()
            .ok_or(ChainError::IndexOutOfRange { index, size: 0 })?;
        if index >= size {
            return Err(ChainError::IndexOutOfRange { index, size });
        }
        let base = self.cells() as u128;
        let mut rest = index;
        let mut positions = Vec::with_capacity(self.contours as usize);
        for _ in 0..self.contours {
            positions.push((rest % base) as u32);
            rest /= base;
        }
        Ok(SystemState(positions))
    }
}

/// Leading-particle cell of every cluster, indexed by contour.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize)]
#[serde(transparent)]
pub struct SystemState(Vec<u32>);

impl SystemState {
    pub fn new(positions: Vec<u32>, params: &ChainParams) -> Result<SystemState, ChainError> {
        let state = SystemState(positions);
        params.check_state(&state)?;
        Ok(state)
    }

    pub(crate) fn from_raw(positions: Vec<u32>) -> SystemState {
        SystemState(positions)
    }

    pub fn positions(&self) -> &[u32] {
        &self.0
    }

    /// Reversed position tuple: contour `i` takes the position of contour
    /// `N - 1 - i`. Swaps the roles of the two node sides, so first-type
    /// behaviour maps to second-type. Admissibility is not preserved in
    /// general; callers re-check.
    pub fn mirrored(&self) -> SystemState {
        let mut positions = self.0.clone();
        positions.reverse();
        SystemState(positions)
    }
}

impl fmt::Display for SystemState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, pos) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{pos}")?;
        }
        Ok(())
    }
}

/// Which rule stopped a cluster.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DelayType {
    First,
    Second,
}

/// One cluster held still for one step at one node.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub struct DelayEvent {
    pub cluster: usize,
    pub delay_type: DelayType,
    /// Node `(j, j + 1)` is reported as `j`.
    pub node: usize,
}

pub struct StepResult {
    pub next: SystemState,
    pub moved: Vec<bool>,
    pub delays: Vec<DelayEvent>,
}
