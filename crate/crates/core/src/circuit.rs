//! Gate-level circuit representation.
//!
//! A [`Circuit`] is an ordered list of [`GateOp`]s over a fixed number of
//! qubits. Qubit 0 is the least-significant bit of a basis-state index.
//!
//! Depth is the length of the as-soon-as-possible layering: every gate is
//! placed one layer after the latest gate that shares a qubit with it.
//! Barriers synchronise the qubits they span but never occupy a layer.

use std::fmt;

use crate::error::{arg_err, QebError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateKind {
    H,
    X,
    Z,
    Ry(f64),
    Rz(f64),
    /// Single-control X. Equivalent to `Mcx` with one control.
    Cx,
    /// X on the target when every control is |1⟩.
    Mcx,
    /// R_y(theta) on the target when every control is |1⟩.
    McRy(f64),
    Barrier,
}

impl GateKind {
    pub fn name(&self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Z => "z",
            GateKind::Ry(_) => "ry",
            GateKind::Rz(_) => "rz",
            GateKind::Cx => "cx",
            GateKind::Mcx => "mcx",
            GateKind::McRy(_) => "mcry",
            GateKind::Barrier => "barrier",
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            GateKind::Ry(t) | GateKind::Rz(t) | GateKind::McRy(t) => Some(t),
            _ => None,
        }
    }

    fn is_controlled(&self) -> bool {
        matches!(self, GateKind::Cx | GateKind::Mcx | GateKind::McRy(_))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateOp {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub controls: Vec<usize>,
}

impl GateOp {
    fn single(kind: GateKind, q: usize) -> Self {
        Self {
            kind,
            targets: vec![q],
            controls: Vec::new(),
        }
    }

    pub fn h(q: usize) -> Self {
        Self::single(GateKind::H, q)
    }

    pub fn x(q: usize) -> Self {
        Self::single(GateKind::X, q)
    }

    pub fn z(q: usize) -> Self {
        Self::single(GateKind::Z, q)
    }

    pub fn ry(theta: f64, q: usize) -> Self {
        Self::single(GateKind::Ry(theta), q)
    }

    pub fn rz(theta: f64, q: usize) -> Self {
        Self::single(GateKind::Rz(theta), q)
    }

    pub fn cx(control: usize, target: usize) -> Self {
        Self {
            kind: GateKind::Cx,
            targets: vec![target],
            controls: vec![control],
        }
    }

    pub fn mcx(controls: &[usize], target: usize) -> Self {
        Self {
            kind: GateKind::Mcx,
            targets: vec![target],
            controls: controls.to_vec(),
        }
    }

    pub fn mcry(theta: f64, controls: &[usize], target: usize) -> Self {
        Self {
            kind: GateKind::McRy(theta),
            targets: vec![target],
            controls: controls.to_vec(),
        }
    }

    pub fn barrier(qubits: impl IntoIterator<Item = usize>) -> Self {
        Self {
            kind: GateKind::Barrier,
            targets: qubits.into_iter().collect(),
            controls: Vec::new(),
        }
    }

    /// Controls followed by targets.
    pub fn qubits(&self) -> impl Iterator<Item = usize> + '_ {
        self.controls.iter().chain(self.targets.iter()).copied()
    }

    pub fn is_barrier(&self) -> bool {
        self.kind == GateKind::Barrier
    }

    /// True for any non-barrier gate touching two or more qubits.
    pub fn is_multi_qubit(&self) -> bool {
        !self.is_barrier() && self.controls.len() + self.targets.len() >= 2
    }

    /// Checks the op in isolation (angles, arity, distinctness) and against `width`.
    pub fn validate(&self, width: usize) -> Result<()> {
        if let Some(t) = self.kind.angle() {
            if !t.is_finite() {
                return arg_err(format!("non-finite rotation angle {t}"));
            }
        }
        match self.kind {
            GateKind::Barrier => {
                if self.targets.is_empty() {
                    return arg_err("barrier must span at least one qubit");
                }
                if !self.controls.is_empty() {
                    return arg_err("barrier takes no controls");
                }
            }
            kind => {
                if self.targets.len() != 1 {
                    return arg_err(format!("{} expects exactly one target", kind.name()));
                }
                match kind {
                    GateKind::Cx if self.controls.len() != 1 => {
                        return arg_err("cx expects exactly one control");
                    }
                    k if k.is_controlled() && self.controls.is_empty() => {
                        return arg_err(format!("{} needs at least one control", k.name()));
                    }
                    k if !k.is_controlled() && !self.controls.is_empty() => {
                        return arg_err(format!("{} takes no controls", k.name()));
                    }
                    _ => {}
                }
            }
        }
        let mut seen = Vec::with_capacity(self.controls.len() + self.targets.len());
        for q in self.qubits() {
            if q >= width {
                return Err(QebError::Index { index: q, width });
            }
            if seen.contains(&q) {
                return arg_err(format!("qubit {q} used twice in one {}", self.kind.name()));
            }
            seen.push(q);
        }
        Ok(())
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.kind.name())?;
        if let Some(t) = self.kind.angle() {
            write!(f, "({t})")?;
        }
        write!(
            f,
            " targets={:?} controls={:?}",
            self.targets, self.controls
        )
    }
}

/// Layer index of every op under ASAP scheduling; `None` for barriers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layering {
    pub layer_of: Vec<Option<usize>>,
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    width: usize,
    ops: Vec<GateOp>,
}

impl Circuit {
    pub fn new(width: usize) -> Result<Self> {
        if width == 0 {
            return arg_err("circuit width must be at least 1");
        }
        Ok(Self {
            width,
            ops: Vec::new(),
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn ops(&self) -> &[GateOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn append(&mut self, op: GateOp) -> Result<&mut Self> {
        op.validate(self.width)?;
        self.ops.push(op);
        Ok(self)
    }

    pub fn extend(&mut self, ops: impl IntoIterator<Item = GateOp>) -> Result<&mut Self> {
        for op in ops {
            self.append(op)?;
        }
        Ok(self)
    }

    /// Barrier spanning every qubit.
    pub fn barrier_all(&mut self) -> &mut Self {
        self.ops.push(GateOp::barrier(0..self.width));
        self
    }

    /// Number of non-barrier ops.
    pub fn gate_count(&self) -> usize {
        self.ops.iter().filter(|op| !op.is_barrier()).count()
    }

    pub fn multi_qubit_gate_count(&self) -> usize {
        self.ops.iter().filter(|op| op.is_multi_qubit()).count()
    }

    pub fn layering(&self) -> Layering {
        // frontier[q] = number of layers already occupied on qubit q
        let mut frontier = vec![0usize; self.width];
        let mut layer_of = Vec::with_capacity(self.ops.len());
        let mut depth = 0;
        for op in &self.ops {
            let start = op.qubits().map(|q| frontier[q]).max().unwrap_or(0);
            if op.is_barrier() {
                for q in op.qubits() {
                    frontier[q] = start;
                }
                layer_of.push(None);
            } else {
                for q in op.qubits() {
                    frontier[q] = start + 1;
                }
                depth = depth.max(start + 1);
                layer_of.push(Some(start));
            }
        }
        Layering { layer_of, depth }
    }

    pub fn depth(&self) -> usize {
        self.layering().depth
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for op in &self.ops {
            writeln!(f, "{op}")?;
        }
        Ok(())
    }
}

/// Multi-controlled R_y as two half-angle rotations interleaved with two MCX.
///
/// When every control is |1⟩ the MCX pair conjugates the second rotation into
/// `Ry(theta/2)`, giving `Ry(theta)` in total; otherwise the rotations cancel.
pub fn decompose_mcry(theta: f64, controls: &[usize], target: usize) -> Result<Vec<GateOp>> {
    if controls.is_empty() {
        return arg_err("decompose_mcry needs at least one control");
    }
    if controls.contains(&target) {
        return arg_err(format!("target {target} is also a control"));
    }
    if !theta.is_finite() {
        return arg_err(format!("non-finite rotation angle {theta}"));
    }
    Ok(vec![
        GateOp::ry(theta / 2.0, target),
        GateOp::mcx(controls, target),
        GateOp::ry(-theta / 2.0, target),
        GateOp::mcx(controls, target),
    ])
}
