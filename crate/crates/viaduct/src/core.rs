//! Domain types: duration laws with constant fluidities, apertures, junction
//! detectors, traffic states, and the multi-axis grid backing every relation.
//!
//! A traffic state is the tuple (t, d, p, x) of chronological time, travel
//! duration, position and monad (the attribute vector the network tracks,
//! e.g. a celerity or a jam measure). Incoming durations decrease to zero at
//! the junction, outgoing durations increase from zero after it; the zero
//! crossing is what detects the junction.

use crate::error::{Error, Result};

/// Constant rates at which the incoming duration falls and the outgoing
/// duration rises. Both are strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fluidities {
    pub incoming: f64,
    pub outgoing: f64,
}

impl Fluidities {
    pub fn new(incoming: f64, outgoing: f64) -> Result<Self> {
        for phi in [incoming, outgoing] {
            if !(phi.is_finite() && phi > 0.0) {
                return Err(Error::InvalidFluidity(phi));
            }
        }
        Ok(Self { incoming, outgoing })
    }
}

/// Direction of a travel duration: decreasing toward the junction,
/// stationary, or increasing away from it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DurationDirection {
    Incoming,
    Stationary,
    Outgoing,
}

impl DurationDirection {
    pub fn sign(self) -> f64 {
        match self {
            DurationDirection::Incoming => -1.0,
            DurationDirection::Stationary => 0.0,
            DurationDirection::Outgoing => 1.0,
        }
    }
}

/// A travel duration with constant fluidity: value(t) = max(0, a(rate·t − offset))
/// where a is the direction sign. The aperture offset/rate is the time at
/// which the duration touches zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DurationLaw {
    pub direction: DurationDirection,
    pub rate: f64,
    pub offset: f64,
}

impl DurationLaw {
    pub fn new(direction: DurationDirection, rate: f64, offset: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::InvalidFluidity(rate));
        }
        if !(offset.is_finite() && offset >= 0.0) {
            return Err(Error::ShapeMismatch(format!(
                "duration offset must be non-negative, got {offset}"
            )));
        }
        Ok(Self {
            direction,
            rate,
            offset,
        })
    }

    /// Duration at time `t`, clamped at zero.
    pub fn value(&self, t: f64) -> f64 {
        (self.direction.sign() * (self.rate * t - self.offset)).max(0.0)
    }

    /// Time at which the duration reaches (incoming) or leaves (outgoing) zero.
    pub fn aperture(&self) -> f64 {
        self.offset / self.rate
    }
}

/// Free-standing aperture: time to cross a duration `d` at rate `phi`.
pub fn aperture(d: f64, phi: f64) -> Result<f64> {
    if !(phi.is_finite() && phi > 0.0) {
        return Err(Error::InvalidFluidity(phi));
    }
    Ok(d / phi)
}

/// Spatial junction detector: Euclidean distance from `p` to the nearest
/// junction position. Zero exactly when `p` is a junction position.
pub fn spatial_detector(junction_positions: &[Vec<f64>], p: &[f64]) -> Result<f64> {
    if junction_positions.is_empty() {
        return Err(Error::NoJunction);
    }
    let mut best = f64::INFINITY;
    for j in junction_positions {
        if j.len() != p.len() {
            return Err(Error::ShapeMismatch(format!(
                "position has {} components but junction member has {}",
                p.len(),
                j.len()
            )));
        }
        let d2: f64 = j.iter().zip(p).map(|(a, b)| (a - b) * (a - b)).sum();
        best = best.min(d2.sqrt());
    }
    Ok(best)
}

/// One traffic state (t, d, p, x).
#[derive(Debug, Clone, PartialEq)]
pub struct TrafficState {
    pub t: f64,
    pub d: f64,
    pub p: Vec<f64>,
    pub x: Vec<f64>,
}

impl TrafficState {
    pub fn new(t: f64, d: f64, p: Vec<f64>, x: Vec<f64>) -> Result<Self> {
        if !t.is_finite()
            || !d.is_finite()
            || p.iter().any(|v| !v.is_finite())
            || x.iter().any(|v| !v.is_finite())
        {
            return Err(Error::ShapeMismatch(
                "traffic state components must be finite".into(),
            ));
        }
        if d < 0.0 {
            return Err(Error::ShapeMismatch(format!(
                "duration must be non-negative, got {d}"
            )));
        }
        Ok(Self { t, d, p, x })
    }

    /// Flatten to the grid's axis order: t, d, p..., x...
    pub fn flatten(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(2 + self.p.len() + self.x.len());
        v.push(self.t);
        v.push(self.d);
        v.extend_from_slice(&self.p);
        v.extend_from_slice(&self.x);
        v
    }
}

/// An incoming/outgoing pair of traffic states. Departure never follows arrival.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportState {
    pub incoming: TrafficState,
    pub outgoing: TrafficState,
}

impl TransportState {
    pub fn new(incoming: TrafficState, outgoing: TrafficState) -> Result<Self> {
        if incoming.t > outgoing.t {
            return Err(Error::ShapeMismatch(format!(
                "departure time {} exceeds arrival time {}",
                incoming.t, outgoing.t
            )));
        }
        Ok(Self { incoming, outgoing })
    }
}

/// Role of one grid axis. Product grids use Time/Duration/Position/Monad;
/// the reduced pair grid of the coupled solver uses the remaining roles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AxisRole {
    Time,
    Duration,
    Position(usize),
    Monad(usize),
    /// Shared aperture countdown of the pair grid (duration over fluidity).
    Omega,
    /// Incoming time of the pair grid.
    TimeIn,
    /// Invariant fiber axis: incoming time plus outgoing time.
    TimeSum,
    PositionIn(usize),
    MonadIn(usize),
    PositionOu(usize),
    MonadOu(usize),
}

impl AxisRole {
    pub fn token(&self) -> String {
        match self {
            AxisRole::Time => "t".into(),
            AxisRole::Duration => "d".into(),
            AxisRole::Position(i) => format!("p{i}"),
            AxisRole::Monad(i) => format!("x{i}"),
            AxisRole::Omega => "omega".into(),
            AxisRole::TimeIn => "tin".into(),
            AxisRole::TimeSum => "tsum".into(),
            AxisRole::PositionIn(i) => format!("pin{i}"),
            AxisRole::MonadIn(i) => format!("xin{i}"),
            AxisRole::PositionOu(i) => format!("pou{i}"),
            AxisRole::MonadOu(i) => format!("xou{i}"),
        }
    }

    pub fn parse(token: &str) -> Option<AxisRole> {
        let index = |s: &str| s.parse::<usize>().ok();
        match token {
            "t" => Some(AxisRole::Time),
            "d" => Some(AxisRole::Duration),
            "omega" => Some(AxisRole::Omega),
            "tin" => Some(AxisRole::TimeIn),
            "tsum" => Some(AxisRole::TimeSum),
            _ => {
                if let Some(rest) = token.strip_prefix("pin") {
                    index(rest).map(AxisRole::PositionIn)
                } else if let Some(rest) = token.strip_prefix("xin") {
                    index(rest).map(AxisRole::MonadIn)
                } else if let Some(rest) = token.strip_prefix("pou") {
                    index(rest).map(AxisRole::PositionOu)
                } else if let Some(rest) = token.strip_prefix("xou") {
                    index(rest).map(AxisRole::MonadOu)
                } else if let Some(rest) = token.strip_prefix('p') {
                    index(rest).map(AxisRole::Position)
                } else if let Some(rest) = token.strip_prefix('x') {
                    index(rest).map(AxisRole::Monad)
                } else {
                    None
                }
            }
        }
    }

    /// Axes carrying a duration-like quantity get the half-cell snap at zero.
    pub fn is_duration_like(&self) -> bool {
        matches!(self, AxisRole::Duration | AxisRole::Omega)
    }
}

/// One discretized axis: `count` equal cells covering [lo, hi].
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub role: AxisRole,
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Axis {
    pub fn new(role: AxisRole, lo: f64, hi: f64, count: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::ShapeMismatch(format!(
                "axis {} needs lo < hi, got [{lo}, {hi}]",
                role.token()
            )));
        }
        if count < 1 {
            return Err(Error::ShapeMismatch(format!(
                "axis {} needs at least one cell",
                role.token()
            )));
        }
        Ok(Self { role, lo, hi, count })
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.count as f64
    }

    pub fn center(&self, index: usize) -> f64 {
        self.lo + (index as f64 + 0.5) * self.width()
    }

    /// Cell containing `v`. Cells are half-open [lo + i·w, lo + (i+1)·w) with
    /// the top edge closed so `hi` itself is addressable.
    pub fn locate(&self, v: f64) -> Option<usize> {
        let u = (v - self.lo) / self.width();
        if u < 0.0 {
            return None;
        }
        let i = u.floor() as usize;
        if i < self.count {
            Some(i)
        } else if v <= self.hi {
            Some(self.count - 1)
        } else {
            None
        }
    }
}

/// A finite multi-axis grid. Cell indices are row-major with the first axis
/// (time) slowest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    axes: Vec<Axis>,
    strides: Vec<usize>,
    cells: usize,
}

impl GridSpec {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::ShapeMismatch("grid needs at least one axis".into()));
        }
        let mut cells = 1usize;
        for a in &axes {
            cells = cells.checked_mul(a.count).ok_or_else(|| {
                Error::ShapeMismatch("grid cell count overflows usize".into())
            })?;
        }
        let mut strides = vec![1usize; axes.len()];
        for i in (0..axes.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * axes[i + 1].count;
        }
        Ok(Self { axes, strides, cells })
    }

    /// Product-layout grid in the canonical axis order t, d, p..., x...
    pub fn product(
        t: Axis,
        d: Axis,
        positions: Vec<Axis>,
        monads: Vec<Axis>,
    ) -> Result<Self> {
        let mut axes = vec![t, d];
        axes.extend(positions);
        axes.extend(monads);
        Self::new(axes)
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn cell_count(&self) -> usize {
        self.cells
    }

    pub fn axis(&self, role: AxisRole) -> Option<&Axis> {
        self.axes.iter().find(|a| a.role == role)
    }

    pub fn axis_index(&self, role: AxisRole) -> Option<usize> {
        self.axes.iter().position(|a| a.role == role)
    }

    /// Number of position axes in a product-layout grid.
    pub fn position_dim(&self) -> usize {
        self.axes
            .iter()
            .filter(|a| matches!(a.role, AxisRole::Position(_)))
            .count()
    }

    /// Number of monad axes in a product-layout grid.
    pub fn monad_dim(&self) -> usize {
        self.axes
            .iter()
            .filter(|a| matches!(a.role, AxisRole::Monad(_)))
            .count()
    }

    pub fn index_of(&self, coords: &[usize]) -> usize {
        debug_assert_eq!(coords.len(), self.axes.len());
        coords
            .iter()
            .zip(&self.strides)
            .map(|(c, s)| c * s)
            .sum()
    }

    pub fn coords_of(&self, cell: usize, out: &mut Vec<usize>) {
        out.clear();
        let mut rest = cell;
        for s in &self.strides {
            out.push(rest / s);
            rest %= s;
        }
    }

    /// Cell center in axis order.
    pub fn center_of(&self, cell: usize, out: &mut Vec<f64>) {
        out.clear();
        let mut rest = cell;
        for (axis, s) in self.axes.iter().zip(&self.strides) {
            out.push(axis.center(rest / s));
            rest %= s;
        }
    }

    /// Cell containing an explicit point, or an out-of-bounds error.
    pub fn locate(&self, values: &[f64]) -> Result<usize> {
        if values.len() != self.axes.len() {
            return Err(Error::ShapeMismatch(format!(
                "point has {} components, grid has {} axes",
                values.len(),
                self.axes.len()
            )));
        }
        let mut cell = 0usize;
        for ((axis, stride), &v) in self.axes.iter().zip(&self.strides).zip(values) {
            let i = axis.locate(v).ok_or_else(|| Error::OutOfBounds {
                axis: axis.role.token(),
                value: v,
                lo: axis.lo,
                hi: axis.hi,
            })?;
            cell += i * stride;
        }
        Ok(cell)
    }

    pub fn locate_state(&self, s: &TrafficState) -> Result<usize> {
        self.locate(&s.flatten())
    }

    /// Successor-cell quantization used by the solver and the oracle.
    ///
    /// Out-of-bounds components kill the successor (`None`), with one
    /// exception: on a duration-like axis, values within half a cell below
    /// zero snap into the bottom cell (strict boundary — exactly −w/2 dies),
    /// so a trajectory may land on the junction slice but cannot linger there.
    pub fn successor_cell(&self, values: &[f64]) -> Option<usize> {
        debug_assert_eq!(values.len(), self.axes.len());
        let mut cell = 0usize;
        for ((axis, stride), &v) in self.axes.iter().zip(&self.strides).zip(values) {
            let i = match axis.locate(v) {
                Some(i) => i,
                None => {
                    if axis.role.is_duration_like()
                        && v < axis.lo
                        && v - axis.lo > -0.5 * axis.width()
                    {
                        0
                    } else {
                        return None;
                    }
                }
            };
            cell += i * stride;
        }
        Some(cell)
    }

    /// Visit the Chebyshev ball of `radius` cells around `cell` until the
    /// predicate returns true. Radius zero tests only the cell itself.
    pub fn ball_any(
        &self,
        cell: usize,
        radius: usize,
        mut pred: impl FnMut(usize) -> bool,
    ) -> bool {
        if radius == 0 {
            return pred(cell);
        }
        let n = self.axes.len();
        let mut coords = Vec::with_capacity(n);
        self.coords_of(cell, &mut coords);
        let r = radius as isize;
        let lo: Vec<isize> = coords
            .iter()
            .map(|&c| (c as isize - r).max(0))
            .collect();
        let hi: Vec<isize> = coords
            .iter()
            .zip(&self.axes)
            .map(|(&c, a)| (c as isize + r).min(a.count as isize - 1))
            .collect();
        let mut cur = lo.clone();
        loop {
            let idx: usize = cur
                .iter()
                .zip(&self.strides)
                .map(|(&c, s)| c as usize * s)
                .sum();
            if pred(idx) {
                return true;
            }
            // odometer increment
            let mut k = n;
            loop {
                if k == 0 {
                    return false;
                }
                k -= 1;
                if cur[k] < hi[k] {
                    cur[k] += 1;
                    for (j, c) in cur.iter_mut().enumerate().skip(k + 1) {
                        *c = lo[j];
                    }
                    break;
                }
            }
        }
    }

    /// Chebyshev distance between two cells in cell units.
    pub fn chebyshev(&self, a: usize, b: usize) -> usize {
        let mut ca = Vec::new();
        let mut cb = Vec::new();
        self.coords_of(a, &mut ca);
        self.coords_of(b, &mut cb);
        ca.iter()
            .zip(&cb)
            .map(|(&x, &y)| x.abs_diff(y))
            .max()
            .unwrap_or(0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn law(direction: DurationDirection, rate: f64, offset: f64) -> DurationLaw {
        DurationLaw::new(direction, rate, offset).unwrap()
    }

    #[test]
    fn duration_value_examples() {
        assert_eq!(law(DurationDirection::Incoming, 1.0, 2.0).value(0.0), 2.0);
        assert_eq!(law(DurationDirection::Incoming, 1.0, 2.0).value(2.0), 0.0);
        assert_eq!(law(DurationDirection::Outgoing, 2.0, 4.0).value(3.0), 2.0);
        assert_eq!(law(DurationDirection::Stationary, 1.0, 5.0).value(7.0), 0.0);
    }

    #[test]
    fn duration_vanishes_exactly_at_aperture() {
        for (dir, rate, offset) in [
            (DurationDirection::Incoming, 1.0, 2.0),
            (DurationDirection::Incoming, 1.5, 3.0),
            (DurationDirection::Outgoing, 2.0, 4.0),
            (DurationDirection::Outgoing, 0.5, 1.0),
        ] {
            let l = law(dir, rate, offset);
            assert_eq!(l.value(l.aperture()), 0.0);
        }
    }

    #[test]
    fn duration_monotone_by_direction() {
        let inc = law(DurationDirection::Incoming, 1.3, 2.7);
        let out = law(DurationDirection::Outgoing, 0.8, 1.1);
        let ts: Vec<f64> = (0..40).map(|k| -2.0 + 0.25 * k as f64).collect();
        for w in ts.windows(2) {
            assert!(inc.value(w[0]) >= inc.value(w[1]));
            assert!(out.value(w[0]) <= out.value(w[1]));
            assert!(inc.value(w[0]) >= 0.0);
            assert!(out.value(w[0]) >= 0.0);
        }
    }

    #[test]
    fn aperture_examples() {
        assert_eq!(aperture(2.0, 1.0).unwrap(), 2.0);
        assert_eq!(aperture(0.0, 3.0).unwrap(), 0.0);
        assert_eq!(aperture(3.0, 1.5).unwrap(), 2.0);
        assert!(matches!(
            aperture(1.0, 0.0),
            Err(Error::InvalidFluidity(_))
        ));
    }

    #[test]
    fn spatial_detector_examples() {
        let j1 = vec![vec![0.0]];
        let j2 = vec![vec![0.0], vec![5.0]];
        assert_eq!(spatial_detector(&j1, &[3.0]).unwrap(), 3.0);
        assert_eq!(spatial_detector(&j2, &[5.0]).unwrap(), 0.0);
        assert_eq!(spatial_detector(&j2, &[4.0]).unwrap(), 1.0);
        assert!(matches!(spatial_detector(&[], &[0.0]), Err(Error::NoJunction)));
    }

    #[test]
    fn spatial_detector_zero_iff_member() {
        let members = vec![vec![0.0, 1.0], vec![2.0, -3.0], vec![0.25, 0.75]];
        for m in &members {
            assert!(spatial_detector(&members, m).unwrap() < 1e-12);
        }
        assert!(spatial_detector(&members, &[0.1, 1.0]).unwrap() > 1e-12);
    }

    fn grid_2d() -> GridSpec {
        GridSpec::new(vec![
            Axis::new(AxisRole::Time, 0.0, 4.0, 4).unwrap(),
            Axis::new(AxisRole::Duration, 0.0, 2.0, 4).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn grid_indexing_round_trip() {
        let g = grid_2d();
        assert_eq!(g.cell_count(), 16);
        let mut coords = Vec::new();
        for cell in 0..16 {
            g.coords_of(cell, &mut coords);
            assert_eq!(g.index_of(&coords), cell);
        }
        // time axis is slowest
        g.coords_of(5, &mut coords);
        assert_eq!(coords, vec![1, 1]);
    }

    #[test]
    fn locate_edges() {
        let g = grid_2d();
        assert_eq!(g.locate(&[0.0, 0.0]).unwrap(), 0);
        // top edges are closed
        assert_eq!(g.locate(&[4.0, 2.0]).unwrap(), 15);
        assert!(matches!(
            g.locate(&[4.1, 0.0]),
            Err(Error::OutOfBounds { .. })
        ));
        assert!(matches!(
            g.locate(&[0.0, -0.01]),
            Err(Error::OutOfBounds { .. })
        ));
    }

    #[test]
    fn successor_snaps_duration_within_half_cell() {
        let g = grid_2d(); // duration cell width 0.5
        // slightly above -0.25 snaps into the bottom cell
        assert!(g.successor_cell(&[1.0, -0.2]).is_some());
        // the boundary itself and anything below dies
        assert_eq!(g.successor_cell(&[1.0, -0.25]), None);
        assert_eq!(g.successor_cell(&[1.0, -0.3]), None);
        // time never snaps
        assert_eq!(g.successor_cell(&[-0.1, 1.0]), None);
    }

    #[test]
    fn ball_visits_neighbors() {
        let g = grid_2d();
        let mut seen = Vec::new();
        g.ball_any(5, 1, |c| {
            seen.push(c);
            false
        });
        seen.sort_unstable();
        assert_eq!(seen, vec![0, 1, 2, 4, 5, 6, 8, 9, 10]);
        assert!(g.ball_any(5, 1, |c| c == 10));
        assert!(!g.ball_any(5, 0, |c| c == 10));
        assert!(g.ball_any(5, 0, |c| c == 5));
    }

    #[test]
    fn chebyshev_distance() {
        let g = grid_2d();
        assert_eq!(g.chebyshev(0, 5), 1);
        assert_eq!(g.chebyshev(0, 15), 3);
        assert_eq!(g.chebyshev(7, 7), 0);
    }

    #[test]
    fn axis_role_tokens_round_trip() {
        for role in [
            AxisRole::Time,
            AxisRole::Duration,
            AxisRole::Position(0),
            AxisRole::Monad(3),
            AxisRole::Omega,
            AxisRole::TimeIn,
            AxisRole::TimeSum,
            AxisRole::PositionIn(1),
            AxisRole::MonadIn(0),
            AxisRole::PositionOu(2),
            AxisRole::MonadOu(1),
        ] {
            assert_eq!(AxisRole::parse(&role.token()), Some(role));
        }
    }

    #[test]
    fn transport_state_orders_times() {
        let a = TrafficState::new(0.0, 1.0, vec![0.0], vec![0.0]).unwrap();
        let b = TrafficState::new(2.0, 1.0, vec![1.0], vec![0.0]).unwrap();
        assert!(TransportState::new(a.clone(), b.clone()).is_ok());
        assert!(TransportState::new(b, a).is_err());
    }
}
