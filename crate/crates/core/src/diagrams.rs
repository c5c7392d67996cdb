//! Tree-level diagrams for n-photon single-quasiparticle tunneling amplitudes.
//!
//! A diagram is a rooted tree. The root is the tunneling vertex T(m, n); each
//! of its qubit legs ends on the external qubit line or on a propagator to a
//! drive vertex Φ(m, n), which recursively carries further legs. Photons are
//! absorbed only. Every vertex coefficient is multiplied by
//! m!/Π(multiplicity of identical children)!, the number of labeled ways to
//! attach its children.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::device::{DeviceParams, DriveSpec};
use crate::error::{Error, Result};
use crate::pair_breaking::Direction;
use crate::special::{bessel_j, complex_sum, factorial, z_factor};

pub const MAX_PHOTONS: u32 = 5;
pub const MAX_VERTICES: usize = 6;
const MAX_DIAGRAMS: usize = 100_000;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VertexKind {
    /// m qubit lines, n photon lines from the Josephson potential.
    QubitDrive { m: u32, n: u32 },
    /// The single tunneling vertex; identical for both junctions.
    Tunneling { m: u32, n: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Child {
    External,
    Vertex(Box<Node>),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Node {
    /// Photons absorbed directly at this vertex.
    pub photons: u32,
    /// Sorted canonically.
    pub children: Vec<Child>,
}

impl Child {
    fn photons(&self) -> u32 {
        match self {
            Child::External => 0,
            Child::Vertex(n) => n.total_photons(),
        }
    }

    fn has_external(&self) -> bool {
        match self {
            Child::External => true,
            Child::Vertex(n) => n.children.iter().any(Child::has_external),
        }
    }

    fn vertices(&self) -> usize {
        match self {
            Child::External => 0,
            Child::Vertex(n) => n.vertices(),
        }
    }
}

impl Node {
    fn total_photons(&self) -> u32 {
        self.photons + self.children.iter().map(Child::photons).sum::<u32>()
    }

    fn vertices(&self) -> usize {
        1 + self.children.iter().map(Child::vertices).sum::<usize>()
    }

    /// Qubit legs of a drive vertex: one toward the root plus the children.
    fn drive_kind(&self) -> VertexKind {
        VertexKind::QubitDrive { m: 1 + self.children.len() as u32, n: self.photons }
    }

    fn symmetry(&self, legs: u32) -> f64 {
        let mut counts: BTreeMap<&Child, u32> = BTreeMap::new();
        for c in &self.children {
            *counts.entry(c).or_default() += 1;
        }
        counts.values().fold(factorial(legs), |acc, &k| acc / factorial(k))
    }

    fn write_children(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.children.is_empty() {
            return Ok(());
        }
        f.write_str("[")?;
        for (k, c) in self.children.iter().enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            match c {
                Child::External => f.write_str("ext")?,
                Child::Vertex(n) => {
                    write!(f, "Phi({},{})", n.children.len() + 1, n.photons)?;
                    n.write_children(f)?;
                }
            }
        }
        f.write_str("]")
    }
}

/// One diagram: the tunneling vertex and its children.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Diagram {
    pub root: Node,
}

impl Diagram {
    pub fn tunneling_kind(&self) -> VertexKind {
        VertexKind::Tunneling { m: self.root.children.len() as u32, n: self.root.photons }
    }

    pub fn vertex_count(&self) -> usize {
        self.root.vertices()
    }

    pub fn photon_count(&self) -> u32 {
        self.root.total_photons()
    }
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "T({},{})", self.root.children.len(), self.root.photons)?;
        self.root.write_children(f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagramSet {
    pub photons: u32,
    pub transition: Direction,
    /// Drive-screening leaves Φ(1,1) are resummed into bold photon lines.
    pub bold: bool,
    pub diagrams: Vec<Diagram>,
}

fn drive_vertex_allowed(m: u32, n: u32) -> bool {
    (m + n) % 2 == 0 && !(m == 2 && n == 0) && m >= 1
}

struct Enumerator {
    max_photons: u32,
    bold: bool,
    /// Drive-rooted subtrees indexed by (photons, contains external).
    subtrees: BTreeMap<(u32, bool), Vec<Node>>,
}

impl Enumerator {
    fn new(max_photons: u32, bold: bool, max_vertices: usize) -> Result<Self> {
        let mut e = Enumerator { max_photons, bold, subtrees: BTreeMap::new() };
        for p in 0..=max_photons {
            for ext in [false, true] {
                let mut found = Vec::new();
                for own in 0..=p {
                    for children in e.child_multisets(p - own, ext, max_vertices.saturating_sub(1))? {
                        let m = 1 + children.len() as u32;
                        if !drive_vertex_allowed(m, own) || (e.bold && m == 1 && own == 1) {
                            continue;
                        }
                        found.push(Node { photons: own, children });
                    }
                }
                found.sort();
                e.subtrees.insert((p, ext), found);
            }
        }
        Ok(e)
    }

    /// Candidate children in a fixed order: the external line, then subtrees.
    fn candidates(&self, max_p: u32, max_vertices: usize) -> Vec<Child> {
        let mut out = vec![Child::External];
        for ((p, _), nodes) in &self.subtrees {
            if *p <= max_p {
                out.extend(
                    nodes.iter().filter(|n| n.vertices() <= max_vertices).map(|n| Child::Vertex(Box::new(n.clone()))),
                );
            }
        }
        out
    }

    /// All multisets of children with `photons` photons in total and exactly
    /// `ext as usize` external lines among them.
    fn child_multisets(&self, photons: u32, ext: bool, max_vertices: usize) -> Result<Vec<Vec<Child>>> {
        let cands = self.candidates(photons.min(self.max_photons), max_vertices);
        let mut out = Vec::new();
        let mut stack = Vec::new();
        Self::extend(&cands, 0, photons, ext, max_vertices, &mut stack, &mut out)?;
        Ok(out)
    }

    fn extend(
        cands: &[Child],
        start: usize,
        photons_left: u32,
        ext_left: bool,
        vertices_left: usize,
        stack: &mut Vec<Child>,
        out: &mut Vec<Vec<Child>>,
    ) -> Result<()> {
        if photons_left == 0 && !ext_left {
            let mut v = stack.clone();
            v.sort();
            out.push(v);
            if out.len() > MAX_DIAGRAMS {
                return Err(Error::BudgetExceeded(format!("more than {MAX_DIAGRAMS} child sets")));
            }
        }
        for k in start..cands.len() {
            let c = &cands[k];
            let (p, e, v) = (c.photons(), c.has_external(), c.vertices());
            if p > photons_left || (e && !ext_left) || v > vertices_left {
                continue;
            }
            // Zero-photon children are only the external line.
            if p == 0 && !e {
                continue;
            }
            stack.push(c.clone());
            Self::extend(cands, k, photons_left - p, ext_left && !e, vertices_left - v, stack, out)?;
            stack.pop();
        }
        Ok(())
    }
}

/// Enumerate connected tree diagrams for an n-photon transition between the
/// lowest two qubit levels.
pub fn enumerate_diagrams(
    n_photons: u32,
    transition: Direction,
    max_vertices: usize,
    bold: bool,
) -> Result<DiagramSet> {
    if n_photons > MAX_PHOTONS || max_vertices > MAX_VERTICES {
        return Err(Error::BudgetExceeded(format!(
            "enumeration limited to {MAX_PHOTONS} photons and {MAX_VERTICES} vertices"
        )));
    }
    if max_vertices == 0 {
        return Err(Error::InvalidParams("max_vertices must be at least 1".into()));
    }
    let e = Enumerator::new(n_photons, bold, max_vertices)?;
    let mut diagrams = Vec::new();
    for own in 0..=n_photons {
        for children in e.child_multisets(n_photons - own, true, max_vertices - 1)? {
            diagrams.push(Diagram { root: Node { photons: own, children } });
        }
    }
    diagrams.sort();
    diagrams.dedup();
    Ok(DiagramSet { photons: n_photons, transition, bold, diagrams })
}

/// Particle (uu) and hole (vv) coefficients multiplying t_j u u e^{iθ_j} and
/// t_j v v e^{−iθ_j}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelAmplitude {
    pub uu: Complex64,
    pub vv: Complex64,
    pub photon_count: u32,
    pub transition: Direction,
}

impl ChannelAmplitude {
    /// vv/uu; −1 destructive, +1 constructive.
    pub fn relative_sign(&self) -> Complex64 {
        self.vv / self.uu
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZMode {
    /// Z_n → 1.
    #[default]
    Unity,
    /// Exact Z_n from the Bessel series.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct EvalOptions {
    pub z: ZMode,
    /// Expand around the drive-averaged potential E_J J₀(a) instead of E_J.
    pub j0_base: bool,
}

impl EvalOptions {
    /// Explicit Z_n and exact Bessel factors.
    pub fn raw() -> Self {
        EvalOptions { z: ZMode::Exact, j0_base: false }
    }

    /// Z_n → 1; pair with a bold enumeration.
    pub fn leading_order() -> Self {
        EvalOptions { z: ZMode::Unity, j0_base: false }
    }
}

fn z(mode: ZMode, n: u32, a: f64) -> f64 {
    match mode {
        ZMode::Unity => 1.0,
        ZMode::Exact => z_factor(n, a),
    }
}

/// −iⁿ(−i)^m (aⁿ/(2ⁿn!)) (1/m!) [m+n even] Z_n(a) E_J(Φ).
pub fn vertex_coeff_phi(m: u32, n: u32, a: f64, dev: &DeviceParams) -> Complex64 {
    phi_coeff(m, n, a, a, ZMode::Exact, dev.ej_total())
}

/// (uu, vv) of T(m, n): uu = iⁿ(−i)^m (aⁿ/(4ⁿn!)) (1/(2^m m!)) Z_n(a/2),
/// vv = −(−1)^{m+n} uu.
pub fn vertex_coeff_tunneling(m: u32, n: u32, a: f64) -> (Complex64, Complex64) {
    tunneling_coeff(m, n, a, a, ZMode::Exact)
}

fn phi_coeff(m: u32, n: u32, a: f64, a_line: f64, zm: ZMode, ej: f64) -> Complex64 {
    if (m + n) % 2 == 1 {
        return Complex64::new(0.0, 0.0);
    }
    let phase = -I.powu(n) * (-I).powu(m);
    phase * (a_line.powi(n as i32) / (2f64.powi(n as i32) * factorial(n)) / factorial(m) * z(zm, n, a) * ej)
}

fn tunneling_coeff(m: u32, n: u32, a: f64, a_line: f64, zm: ZMode) -> (Complex64, Complex64) {
    let phase = I.powu(n) * (-I).powu(m);
    let uu = phase
        * (a_line.powi(n as i32) / (4f64.powi(n as i32) * factorial(n)) / (2f64.powi(m as i32) * factorial(m))
            * z(zm, n, 0.5 * a));
    let sign = if (m + n) % 2 == 0 { -1.0 } else { 1.0 };
    (uu, uu * sign)
}

/// Harmonic expansion point of the qubit.
struct Base {
    omega_q: f64,
    phi_zpf: f64,
    guard: f64,
}

impl Base {
    fn new(dev: &DeviceParams, a: f64, j0: bool) -> Result<Self> {
        let ej = dev.ej_total() * if j0 { bessel_j(0, a) } else { 1.0 };
        if !(ej > 0.0) {
            return Err(Error::FluxSweetSpotDegenerate { flux: dev.flux });
        }
        Ok(Base {
            omega_q: (8.0 * ej * dev.ec).sqrt(),
            phi_zpf: (2.0 * dev.ec / ej).powf(0.25),
            guard: dev.resonance_guard,
        })
    }

    fn propagator(&self, omega: f64) -> Result<f64> {
        let wq = self.omega_q;
        if (omega.abs() - wq).abs() <= self.guard * wq {
            return Err(Error::OnResonance { omega, omega_q: wq });
        }
        Ok(self.phi_zpf * self.phi_zpf * 2.0 * wq / ((omega - wq) * (omega + wq)))
    }
}

struct Evaluator {
    base: Base,
    a: f64,
    a_line: f64,
    z: ZMode,
    omega_d: f64,
    qubit_sign: f64,
    ej_vertex: f64,
}

impl Evaluator {
    fn child(&self, c: &Child) -> Result<Complex64> {
        match c {
            Child::External => Ok(Complex64::new(self.base.phi_zpf, 0.0)),
            Child::Vertex(node) => {
                let mut omega = node.total_photons() as f64 * self.omega_d;
                if c.has_external() {
                    omega += self.qubit_sign * self.base.omega_q;
                }
                Ok(self.base.propagator(omega)? * self.drive_node(node)?)
            }
        }
    }

    fn children(&self, node: &Node) -> Result<Complex64> {
        let mut acc = Complex64::new(1.0, 0.0);
        for c in &node.children {
            acc *= self.child(c)?;
        }
        Ok(acc)
    }

    fn drive_node(&self, node: &Node) -> Result<Complex64> {
        let VertexKind::QubitDrive { m, n } = node.drive_kind() else { unreachable!() };
        let coeff = phi_coeff(m, n, self.a, self.a_line, self.z, self.ej_vertex);
        Ok(coeff * node.symmetry(m) * self.children(node)?)
    }

    fn diagram(&self, d: &Diagram) -> Result<(Complex64, Complex64)> {
        let m = d.root.children.len() as u32;
        let (uu, vv) = tunneling_coeff(m, d.root.photons, self.a, self.a_line, self.z);
        let rest = d.root.symmetry(m) * self.children(&d.root)?;
        Ok((uu * rest, vv * rest))
    }
}

fn evaluator(set: &DiagramSet, dev: &DeviceParams, drive: &DriveSpec, opts: EvalOptions) -> Result<Evaluator> {
    drive.validate()?;
    let a = drive.amplitude(dev)?;
    let base = Base::new(dev, a, opts.j0_base)?;
    let a_line = if set.bold {
        let wd2 = drive.omega_d * drive.omega_d;
        let wq2 = base.omega_q * base.omega_q;
        if (drive.omega_d - base.omega_q).abs() <= base.guard * base.omega_q {
            return Err(Error::OnResonance { omega: drive.omega_d, omega_q: base.omega_q });
        }
        a * wd2 / (wd2 - wq2)
    } else {
        a
    };
    Ok(Evaluator {
        base,
        a,
        a_line,
        z: opts.z,
        omega_d: drive.omega_d,
        qubit_sign: match set.transition {
            Direction::Relax => 1.0,
            Direction::Excite => -1.0,
        },
        ej_vertex: dev.ej_total(),
    })
}

/// Per-diagram (uu, vv) contributions in enumeration order.
pub fn evaluate_each(
    set: &DiagramSet,
    dev: &DeviceParams,
    drive: &DriveSpec,
    opts: EvalOptions,
) -> Result<Vec<(Complex64, Complex64)>> {
    let ev = evaluator(set, dev, drive, opts)?;
    set.diagrams.iter().map(|d| ev.diagram(d)).collect()
}

pub fn evaluate_amplitude(
    set: &DiagramSet,
    dev: &DeviceParams,
    drive: &DriveSpec,
    opts: EvalOptions,
) -> Result<ChannelAmplitude> {
    let parts = evaluate_each(set, dev, drive, opts)?;
    Ok(ChannelAmplitude {
        uu: complex_sum(parts.iter().map(|p| p.0)),
        vv: complex_sum(parts.iter().map(|p| p.1)),
        photon_count: set.photons,
        transition: set.transition,
    })
}

/// One-photon relaxation amplitude φ_ZPF(ã/8)(uu − vv).
pub fn closed_form_1ph(dev: &DeviceParams, drive: &DriveSpec) -> Result<ChannelAmplitude> {
    let at = dev.renormalized_amplitude(drive)?;
    let c = Complex64::new(dev.phi_zpf()? * at / 8.0, 0.0);
    Ok(ChannelAmplitude { uu: c, vv: -c, photon_count: 1, transition: Direction::Relax })
}

/// Two-photon relaxation amplitude
/// −iφ_ZPF(a²/64)[1 + E_J D(ω_d)]²{1 + 4E_J D(2ω_d + ω_q)}(uu + vv).
pub fn closed_form_2ph(dev: &DeviceParams, drive: &DriveSpec) -> Result<ChannelAmplitude> {
    let a = drive.amplitude(dev)?;
    let screen = 1.0 + dev.response_d0(drive.omega_d)?;
    let vertex = 1.0 + 4.0 * dev.response_d0(2.0 * drive.omega_d + dev.omega_q()?)?;
    let c = -I * (dev.phi_zpf()? * a * a / 64.0 * screen * screen * vertex);
    Ok(ChannelAmplitude { uu: c, vv: c, photon_count: 2, transition: Direction::Relax })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::ghz;

    fn device(flux: f64) -> DeviceParams {
        DeviceParams::from_qubit_frequency(ghz(6.0), 0.9, ghz(0.2), ghz(45.0), ghz(55.0), flux).unwrap()
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1e-300)
    }

    #[test]
    fn one_photon_has_two_diagrams() {
        let set = enumerate_diagrams(1, Direction::Relax, 6, false).unwrap();
        let names: Vec<String> = set.diagrams.iter().map(|d| d.to_string()).collect();
        assert_eq!(names.len(), 2, "{names:?}");
        assert!(names.contains(&"T(1,1)[ext]".to_string()));
        assert!(names.contains(&"T(2,0)[ext, Phi(1,1)]".to_string()));
    }

    #[test]
    fn two_photon_bold_topologies() {
        let set = enumerate_diagrams(2, Direction::Relax, 6, true).unwrap();
        let names: Vec<String> = set.diagrams.iter().map(|d| d.to_string()).collect();
        assert_eq!(names, vec!["T(1,0)[Phi(2,2)[ext]]".to_string(), "T(1,2)[ext]".to_string()]);
    }

    #[test]
    fn vertex_coefficient_examples() {
        let dev = device(0.0);
        let a = 0.3;
        let c = vertex_coeff_phi(1, 1, a, &dev);
        assert!((c.norm() - a * z_factor(1, a) * dev.ej_total() / 2.0).abs() < 1e-9 * c.norm());
        assert_eq!(vertex_coeff_phi(2, 1, a, &dev), Complex64::new(0.0, 0.0));
        let q = vertex_coeff_phi(4, 0, a, &dev);
        assert!((q.re + dev.ej_total() * bessel_j(0, a) / 24.0).abs() < 1e-9 * q.norm());
        let (uu, vv) = vertex_coeff_tunneling(0, 0, a);
        assert!((uu.re - bessel_j(0, 0.5 * a)).abs() < 1e-15 && uu.im == 0.0);
        assert_eq!(vv, -uu);
        let (uu, vv) = vertex_coeff_tunneling(1, 1, a);
        assert_eq!(vv, -uu);
        let (uu, vv) = vertex_coeff_tunneling(0, 2, a);
        assert_eq!(vv, -uu);
        let (uu, vv) = vertex_coeff_tunneling(1, 2, a);
        assert_eq!(vv, uu);
    }

    #[test]
    fn one_photon_matches_closed_form() {
        let dev = device(0.2);
        let drive = DriveSpec::direct(ghz(9.0), 0.1).unwrap();
        let want = closed_form_1ph(&dev, &drive).unwrap();
        for bold in [false, true] {
            let set = enumerate_diagrams(1, Direction::Relax, 6, bold).unwrap();
            let got = evaluate_amplitude(&set, &dev, &drive, EvalOptions::leading_order()).unwrap();
            assert!(close(got.uu, want.uu, 1e-12) && close(got.vv, want.vv, 1e-12), "{bold}");
        }
    }

    #[test]
    fn two_photon_matches_closed_form_up_to_global_sign() {
        let dev = device(0.1);
        let drive = DriveSpec::direct(ghz(7.3), 0.1).unwrap();
        let want = closed_form_2ph(&dev, &drive).unwrap();
        let set = enumerate_diagrams(2, Direction::Relax, 6, true).unwrap();
        let got = evaluate_amplitude(&set, &dev, &drive, EvalOptions::leading_order()).unwrap();
        assert!(close(got.uu, -want.uu, 1e-12) && close(got.vv, -want.vv, 1e-12));
        assert!(close(got.relative_sign(), Complex64::new(1.0, 0.0), 1e-12));
    }

    #[test]
    fn bold_lines_resum_screening_insertions() {
        let dev = device(0.3);
        let drive = DriveSpec::direct(ghz(8.1), 0.2).unwrap();
        // Beyond n = 3 the fully expanded screening exceeds the vertex budget.
        for n in 1..=3 {
            let explicit = enumerate_diagrams(n, Direction::Relax, 6, false).unwrap();
            let bold = enumerate_diagrams(n, Direction::Relax, 6, true).unwrap();
            let a = evaluate_amplitude(&explicit, &dev, &drive, EvalOptions::leading_order()).unwrap();
            let b = evaluate_amplitude(&bold, &dev, &drive, EvalOptions::leading_order()).unwrap();
            assert!(close(a.uu, b.uu, 1e-12) && close(a.vv, b.vv, 1e-12), "n={n}");
        }
    }

    #[test]
    fn amplitude_scales_as_power_of_drive() {
        let dev = device(0.0);
        let set = enumerate_diagrams(3, Direction::Relax, 6, false).unwrap();
        let amp = |a: f64| {
            let drive = DriveSpec::direct(ghz(20.0), a).unwrap();
            evaluate_amplitude(&set, &dev, &drive, EvalOptions::raw()).unwrap().uu.norm() / a.powi(3)
        };
        let (x, y) = (amp(1e-3), amp(5e-4));
        assert!((x / y - 1.0).abs() < 1e-5);
    }

    #[test]
    fn excitation_uses_negative_qubit_frequency() {
        let dev = device(0.0);
        let drive = DriveSpec::direct(ghz(7.3), 0.1).unwrap();
        let set = enumerate_diagrams(2, Direction::Excite, 6, true).unwrap();
        let got = evaluate_amplitude(&set, &dev, &drive, EvalOptions::leading_order()).unwrap();
        let at = dev.renormalized_amplitude(&drive).unwrap();
        let d = dev.response_d0(2.0 * drive.omega_d - dev.omega_q().unwrap()).unwrap();
        let want = I * (dev.phi_zpf().unwrap() * at * at / 64.0 * (1.0 + 4.0 * d));
        assert!(close(got.uu, want, 1e-12));
    }

    #[test]
    fn diagram_counts() {
        let count = |n, bold| enumerate_diagrams(n, Direction::Relax, 6, bold).unwrap().diagrams.len();
        assert_eq!([count(1, false), count(2, false), count(3, false), count(4, false)], [2, 6, 14, 42]);
        assert_eq!([count(1, true), count(2, true), count(3, true), count(4, true)], [1, 2, 3, 6]);
    }

    #[test]
    fn channel_parity_at_zero_flux() {
        let dev = device(0.0);
        let drive = DriveSpec::direct(ghz(23.0), 0.1).unwrap();
        for n in 1..=4u32 {
            let set = enumerate_diagrams(n, Direction::Relax, 6, true).unwrap();
            let amp = evaluate_amplitude(&set, &dev, &drive, EvalOptions::raw()).unwrap();
            let expect = if n % 2 == 0 { 1.0 } else { -1.0 };
            assert!(close(amp.relative_sign(), Complex64::new(expect, 0.0), 1e-12), "n={n}");
        }
    }

    #[test]
    fn expansion_base_gauge() {
        let dev = device(0.1);
        let set = enumerate_diagrams(2, Direction::Relax, 6, true).unwrap();
        let rel = |a: f64| {
            let drive = DriveSpec::direct(ghz(9.0), a).unwrap();
            let x = evaluate_amplitude(&set, &dev, &drive, EvalOptions::leading_order()).unwrap();
            let opts = EvalOptions { j0_base: true, ..EvalOptions::leading_order() };
            let y = evaluate_amplitude(&set, &dev, &drive, opts).unwrap();
            (x.uu - y.uu).norm() / x.uu.norm()
        };
        let (r1, r2) = (rel(0.05), rel(0.025));
        assert!(r1 < 0.05 * 0.05);
        assert!((r1 / r2 - 4.0).abs() < 0.05, "{r1} {r2}");
    }

    #[test]
    fn budget_limits() {
        assert!(matches!(enumerate_diagrams(6, Direction::Relax, 6, false), Err(Error::BudgetExceeded(_))));
        assert!(matches!(enumerate_diagrams(2, Direction::Relax, 7, false), Err(Error::BudgetExceeded(_))));
    }
}
