//! Benchmark objectives with analytic Euclidean gradients, seeded instance
//! generators, and a plain-text matrix container for replayable instances.
//!
//! Three families:
//!
//! * nearest point: f(U) = ||U - U*||_F^2 / 2, minimized at U*; the "toy"
//!   instance places U* next to the singular set of the identity center
//!   (a rotation by 127 pi / 128 in the leading 2 x 2 block);
//! * eigenbasis extraction: f(U) = -trace(U^T A U) for symmetric A, whose
//!   optimum is the sum of the p largest eigenvalues (negated);
//! * unbalanced orthogonal Procrustes: f(U) = ||B U - C||_F^2 with C = B U*,
//!   so the optimal value is exactly zero.

use std::io::{BufRead, Write};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg;
use crate::manifold::StiefelPoint;
use crate::objective::Objective;

/// f(U) = ||U - target||_F^2 / 2 with gradient U - target.
pub struct NearestPointObjective {
    target: StiefelPoint,
}

impl Objective for NearestPointObjective {
    fn value(&self, u: &DMatrix<f64>) -> f64 {
        0.5 * (u - self.target.data()).norm_squared()
    }
    fn euclid_gradient(&self, u: &DMatrix<f64>) -> DMatrix<f64> {
        u - self.target.data()
    }
}

pub fn nearest_point(target: StiefelPoint) -> NearestPointObjective {
    NearestPointObjective { target }
}

/// f(U) = -trace(U^T A U) with gradient -2 A U.
pub struct EigenbasisObjective {
    a: DMatrix<f64>,
}

impl EigenbasisObjective {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }
}

impl Objective for EigenbasisObjective {
    fn value(&self, u: &DMatrix<f64>) -> f64 {
        -u.dot(&(&self.a * u))
    }
    fn euclid_gradient(&self, u: &DMatrix<f64>) -> DMatrix<f64> {
        (&self.a * u) * -2.0
    }
}

/// Symmetrizes the input on ingest.
pub fn eigenbasis(a: DMatrix<f64>) -> EigenbasisObjective {
    let sym = (&a + a.transpose()) * 0.5;
    EigenbasisObjective { a: sym }
}

/// f(U) = ||B U - C||_F^2 with gradient 2 B^T (B U - C).
pub struct ProcrustesObjective {
    b: DMatrix<f64>,
    c: DMatrix<f64>,
}

impl Objective for ProcrustesObjective {
    fn value(&self, u: &DMatrix<f64>) -> f64 {
        (&self.b * u - &self.c).norm_squared()
    }
    fn euclid_gradient(&self, u: &DMatrix<f64>) -> DMatrix<f64> {
        self.b.tr_mul(&(&self.b * u - &self.c)) * 2.0
    }
}

pub fn procrustes(b: DMatrix<f64>, c: DMatrix<f64>) -> Result<ProcrustesObjective> {
    if b.nrows() != c.nrows() {
        return Err(Error::ShapeMismatch {
            expected: format!("C with {} rows", b.nrows()),
            got: format!("{} x {}", c.nrows(), c.ncols()),
        });
    }
    Ok(ProcrustesObjective { b, c })
}

/// The near-singular target diag(R(127 pi/128), I_{N-2}) I_{N x p}; for
/// p = 1 that is just the first column [cos t, sin t, 0, ...].
pub fn toy_target(n: usize, p: usize) -> StiefelPoint {
    assert!(n >= 2 && p >= 1 && p <= n, "need N >= 2 and 1 <= p <= N");
    let theta = 127.0 * std::f64::consts::PI / 128.0;
    let (c, s) = (theta.cos(), theta.sin());
    let mut data = DMatrix::<f64>::zeros(n, p);
    data[(0, 0)] = c;
    data[(1, 0)] = s;
    if p >= 2 {
        data[(0, 1)] = -s;
        data[(1, 1)] = c;
        for j in 2..p {
            data[(j, j)] = 1.0;
        }
    }
    StiefelPoint::new(data).expect("rotation columns are orthonormal")
}

/// Problem family tags used by instances and the benchmark harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    /// Nearest-point with the near-singular toy target.
    NearestPoint,
    Eigenbasis,
    Procrustes,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 3] = [
        ProblemKind::NearestPoint,
        ProblemKind::Eigenbasis,
        ProblemKind::Procrustes,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ProblemKind::NearestPoint => "toy",
            ProblemKind::Eigenbasis => "eig",
            ProblemKind::Procrustes => "proc",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "toy" => Ok(ProblemKind::NearestPoint),
            "eig" => Ok(ProblemKind::Eigenbasis),
            "proc" => Ok(ProblemKind::Procrustes),
            other => Err(Error::Config(format!(
                "unknown problem '{other}' (expected toy, eig, proc)"
            ))),
        }
    }
}

impl std::fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
enum InstanceData {
    NearestPoint { u_star: StiefelPoint },
    Eigenbasis { a: DMatrix<f64> },
    Procrustes { b: DMatrix<f64>, c: DMatrix<f64>, u_star: StiefelPoint },
}

/// A fully materialized problem: kind, dimensions, data matrices, and the
/// seed they were generated from. Instances are deterministic per seed and
/// serializable, so runs replay across machines.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub kind: ProblemKind,
    pub n: usize,
    pub p: usize,
    pub seed: u64,
    data: InstanceData,
}

/// Generates an instance from a dedicated ChaCha stream (stream 0 of the
/// seed; trial streams start at 1).
pub fn generate(kind: ProblemKind, n: usize, p: usize, seed: u64) -> ProblemInstance {
    assert!(p >= 1 && p <= n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = match kind {
        ProblemKind::NearestPoint => InstanceData::NearestPoint {
            u_star: toy_target(n, p),
        },
        ProblemKind::Eigenbasis => {
            let raw = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
            InstanceData::Eigenbasis {
                a: raw.tr_mul(&raw),
            }
        }
        ProblemKind::Procrustes => {
            let b = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
            let u_star = StiefelPoint::random_from(n, p, &mut rng);
            let c = &b * u_star.data();
            InstanceData::Procrustes { b, c, u_star }
        }
    };
    ProblemInstance {
        kind,
        n,
        p,
        seed,
        data,
    }
}

impl ProblemInstance {
    pub fn objective(&self) -> Box<dyn Objective> {
        match &self.data {
            InstanceData::NearestPoint { u_star } => Box::new(nearest_point(u_star.clone())),
            InstanceData::Eigenbasis { a } => Box::new(EigenbasisObjective { a: a.clone() }),
            InstanceData::Procrustes { b, c, .. } => Box::new(ProcrustesObjective {
                b: b.clone(),
                c: c.clone(),
            }),
        }
    }

    /// Known optimal value: 0 for the nearest-point and Procrustes families
    /// (consistent construction), minus the sum of the p largest eigenvalues
    /// for the eigenbasis family (dense eigendecomposition).
    pub fn optimal_value(&self) -> f64 {
        match &self.data {
            InstanceData::NearestPoint { .. } | InstanceData::Procrustes { .. } => 0.0,
            InstanceData::Eigenbasis { a } => {
                -linalg::symmetric_eigenvalues_desc(a)[..self.p].iter().sum::<f64>()
            }
        }
    }

    /// Lipschitz constant of the Euclidean gradient over the manifold.
    pub fn lipschitz_constant(&self) -> f64 {
        match &self.data {
            InstanceData::NearestPoint { .. } => 1.0,
            InstanceData::Eigenbasis { a } => 2.0 * linalg::spectral_norm(a),
            InstanceData::Procrustes { b, .. } => 2.0 * linalg::spectral_norm(b).powi(2),
        }
    }

    fn matrices(&self) -> Vec<(&'static str, &DMatrix<f64>)> {
        match &self.data {
            InstanceData::NearestPoint { u_star } => vec![("Ustar", u_star.data())],
            InstanceData::Eigenbasis { a } => vec![("A", a)],
            InstanceData::Procrustes { b, c, u_star } => {
                vec![("B", b), ("C", c), ("Ustar", u_star.data())]
            }
        }
    }

    /// Writes the instance as a plain-text container: a header with the
    /// problem shape, then each matrix with its own shape line and row-major
    /// entries at 17 significant digits (bit-exact on reload).
    pub fn save(&self, w: &mut impl Write) -> Result<()> {
        writeln!(w, "stiefel-cayley-instance v1")?;
        writeln!(w, "problem {}", self.kind)?;
        writeln!(w, "N {}", self.n)?;
        writeln!(w, "p {}", self.p)?;
        writeln!(w, "seed {}", self.seed)?;
        for (name, m) in self.matrices() {
            writeln!(w, "matrix {} {} {}", name, m.nrows(), m.ncols())?;
            for i in 0..m.nrows() {
                let row: Vec<String> = (0..m.ncols()).map(|j| format!("{:.16e}", m[(i, j)])).collect();
                writeln!(w, "{}", row.join(" "))?;
            }
        }
        writeln!(w, "end")?;
        Ok(())
    }

    pub fn load(r: &mut impl BufRead) -> Result<Self> {
        let mut lines = r.lines();
        let mut next_line = |what: &str| -> Result<String> {
            lines
                .next()
                .transpose()?
                .ok_or_else(|| Error::Parse(format!("unexpected end of file, expected {what}")))
        };

        let magic = next_line("magic header")?;
        if magic.trim() != "stiefel-cayley-instance v1" {
            return Err(Error::Parse(format!("bad magic line '{magic}'")));
        }
        let field = |line: String, key: &str| -> Result<String> {
            let mut parts = line.split_whitespace();
            match (parts.next(), parts.next()) {
                (Some(k), Some(v)) if k == key => Ok(v.to_string()),
                _ => Err(Error::Parse(format!("expected '{key} <value>' line"))),
            }
        };
        let kind = ProblemKind::parse(&field(next_line("problem")?, "problem")?)?;
        let n: usize = field(next_line("N")?, "N")?
            .parse()
            .map_err(|e| Error::Parse(format!("bad N: {e}")))?;
        let p: usize = field(next_line("p")?, "p")?
            .parse()
            .map_err(|e| Error::Parse(format!("bad p: {e}")))?;
        let seed: u64 = field(next_line("seed")?, "seed")?
            .parse()
            .map_err(|e| Error::Parse(format!("bad seed: {e}")))?;

        let mut mats: Vec<(String, DMatrix<f64>)> = Vec::new();
        loop {
            let line = next_line("matrix or end")?;
            let line = line.trim();
            if line == "end" {
                break;
            }
            let mut parts = line.split_whitespace();
            let (tag, name, rows, cols) = match (parts.next(), parts.next(), parts.next(), parts.next())
            {
                (Some("matrix"), Some(name), Some(r), Some(c)) => {
                    let rows: usize = r.parse().map_err(|e| Error::Parse(format!("bad rows: {e}")))?;
                    let cols: usize = c.parse().map_err(|e| Error::Parse(format!("bad cols: {e}")))?;
                    ("matrix", name.to_string(), rows, cols)
                }
                _ => return Err(Error::Parse(format!("expected matrix header, got '{line}'"))),
            };
            debug_assert_eq!(tag, "matrix");
            let mut m = DMatrix::<f64>::zeros(rows, cols);
            for i in 0..rows {
                let row_line = next_line("matrix row")?;
                let mut values = row_line.split_whitespace();
                for j in 0..cols {
                    let tok = values
                        .next()
                        .ok_or_else(|| Error::Parse(format!("row {i} of {name} too short")))?;
                    m[(i, j)] = tok
                        .parse()
                        .map_err(|e| Error::Parse(format!("bad entry in {name}: {e}")))?;
                }
            }
            mats.push((name, m));
        }

        let take = |mats: &mut Vec<(String, DMatrix<f64>)>, key: &str| -> Result<DMatrix<f64>> {
            let idx = mats
                .iter()
                .position(|(name, _)| name == key)
                .ok_or_else(|| Error::Parse(format!("missing matrix '{key}'")))?;
            Ok(mats.remove(idx).1)
        };
        let data = match kind {
            ProblemKind::NearestPoint => InstanceData::NearestPoint {
                u_star: StiefelPoint::new(take(&mut mats, "Ustar")?)?,
            },
            ProblemKind::Eigenbasis => InstanceData::Eigenbasis {
                a: take(&mut mats, "A")?,
            },
            ProblemKind::Procrustes => InstanceData::Procrustes {
                b: take(&mut mats, "B")?,
                c: take(&mut mats, "C")?,
                u_star: StiefelPoint::new(take(&mut mats, "Ustar")?)?,
            },
        };
        Ok(Self {
            kind,
            n,
            p,
            seed,
            data,
        })
    }
}
