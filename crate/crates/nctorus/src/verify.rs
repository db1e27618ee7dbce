//! Seeded random generators and the identity suites: every operator law the
//! library claims is bound here to an executable check with a reported
//! maximal residual.
//!
//! Determinism contract: a fixed `SuiteConfig` yields bit-identical residuals.
//! Each identity derives its own generator seed from the config seed and the
//! identity name; identities may run in parallel but each one reduces
//! sequentially in canonical order.

use std::collections::BTreeMap;
use std::time::Instant;

use num_complex::Complex64 as C64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calculus::{
    apply_cyclic, apply_lie, apply_lie_pair, graded_commutator, GradedOp,
};
use crate::chain::{
    b_plus_big_b, boundary_b, connes_b, graded_boundary_b, graded_connes_b, Chain, GradedChain,
    Parity, PeriodicChain,
};
use crate::chern::{ch_idempotent, ch_invertible, generalized_trace};
use crate::cochain::{bracket, cup, hochschild_delta, MultiDiff};
use crate::error::{Error, Result};
use crate::functional::{
    contract_dual, dual_b, dual_big_b, eval_gamma_on_matrices, gamma,
    pair_chain, pairing, psi_correction, tau1, Functional,
};
use crate::invariant::{
    homotopy_h, project_axis, project_invariant, r_poly, transport_chain,
    transport_graded, transport_table, volume_cycle, weighted_lie_pair_full,
    weighted_lie_pair_invariant, wedge_generator_matrix, wedge_to_vector, FunctionalTable,
    InvariantChain, WedgeClass,
};
use crate::matrix::{mat_mul, mat_trace, try_invert, MatrixElement};
use crate::ode::{
    dyson_transport, matrix_exponential, nilpotent_transport, vec_norm_inf, vec_sub, CMatrix,
    LinearFamily,
};
use crate::section::{fd_derivative, ParamSection};
use crate::torus::{
    delta, mul, mul_derivative, trace, unit_phase, DeformationPoint, MultiIndex, SkewMatrix,
    TorusElement,
};

/// Golden-ratio conjugate, the default irrational deformation entry.
pub const GOLDEN_CONJUGATE: f64 = 0.618_033_988_749_894_9;

/// Configuration of a verification run.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    /// Ambient dimension of the torus.
    pub n: usize,
    /// Matrix size for matrix-algebra checks.
    pub matrix_size: usize,
    /// Deformation matrix; golden-ratio-based skew matrix when absent.
    pub theta: Option<Vec<Vec<f64>>>,
    /// Base deformation parameter.
    pub t: f64,
    /// Second parameter for transports.
    pub t1: f64,
    /// Number of random samples per identity.
    pub samples: usize,
    /// Maximal chain degree drawn by the generators.
    pub max_degree: usize,
    /// Terms per random element/chain.
    pub support: usize,
    /// Multi-index component bound.
    pub index_bound: i64,
    /// Truncation cap for periodic chains.
    pub cap: usize,
    /// Grid points for finite-difference identities.
    pub grid_points: usize,
    /// Generator seed.
    pub seed: u64,
    /// Per-identity tolerance overrides.
    pub tolerances: BTreeMap<String, f64>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            n: 2,
            matrix_size: 2,
            theta: None,
            t: 0.35,
            t1: 0.85,
            samples: 100,
            max_degree: 5,
            support: 4,
            index_bound: 3,
            cap: 6,
            grid_points: 21,
            seed: 7,
            tolerances: BTreeMap::new(),
        }
    }
}

impl SuiteConfig {
    pub fn theta_matrix(&self) -> Result<SkewMatrix> {
        match &self.theta {
            Some(rows) => SkewMatrix::new(self.n, rows.clone()),
            None => Ok(default_theta(self.n)),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("n", self.n),
            ("matrix_size", self.matrix_size),
            ("samples", self.samples),
            ("support", self.support),
        ];
        for (name, value) in positive {
            if value == 0 {
                return Err(Error::Format(format!("config field '{name}' must be positive")));
            }
        }
        if self.index_bound < 1 {
            return Err(Error::Format("config field 'index_bound' must be positive".into()));
        }
        if self.grid_points < 3 {
            return Err(Error::Format("config field 'grid_points' must be at least 3".into()));
        }
        Ok(())
    }
}

/// Deterministic irrational-looking skew matrix for dimension `n`.
pub fn default_theta(n: usize) -> SkewMatrix {
    let mut rows = vec![vec![0.0; n]; n];
    for j in 1..n {
        for k in 0..j {
            let v = GOLDEN_CONJUGATE / (j + k) as f64;
            rows[j][k] = v;
            rows[k][j] = -v;
        }
    }
    SkewMatrix::new(n, rows).expect("construction is skew")
}

/// Result of one identity check.
#[derive(Clone, Debug, Serialize)]
pub struct IdentityReport {
    pub name: String,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Result of a full suite run.
#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub identities: Vec<IdentityReport>,
    pub wall_ms: u128,
    pub pass: bool,
}

impl std::fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "suite {}: {} ({} ms, seed {})",
            self.suite,
            if self.pass { "PASS" } else { "FAIL" },
            self.wall_ms,
            self.seed
        )?;
        writeln!(
            f,
            "  {:<34} {:>8} {:>14} {:>11}   status",
            "identity", "samples", "max residual", "tolerance"
        )?;
        for id in &self.identities {
            writeln!(
                f,
                "  {:<34} {:>8} {:>14.3e} {:>11.1e}   {}{}",
                id.name,
                id.samples,
                id.max_residual,
                id.tolerance,
                if id.pass { "pass" } else { "FAIL" },
                id.note
                    .as_ref()
                    .map(|n| format!("  ({n})"))
                    .unwrap_or_default()
            )?;
        }
        Ok(())
    }
}

/// Which identities each suite covers.  Every identity the library claims
/// appears in exactly one suite (enforced by a test below).
pub const SUITES: &[(&str, &[&str])] = &[
    (
        "complex",
        &[
            "mul_associative",
            "mul_unit_exact",
            "commutation_relation",
            "delta_leibniz",
            "trace_commutator",
            "trace_delta_exact",
            "mul_derivative_fd",
            "b_squared",
            "big_b_squared",
            "b_anticommute",
        ],
    ),
    (
        "operators",
        &[
            "cartan_homotopy",
            "lie_b_commutator",
            "lie_big_b_commutator",
            "iota_b_commutator",
            "lie_bracket_representation",
            "lie_cyclic_equivariance",
            "lie_lie_equivariance",
            "two_derivation_homotopy",
            "two_derivation_corollary",
            "contraction_square_witness",
            "pair_equivariance",
            "lie_multiplication_is_minus_b",
            "coboundary_bracket_form",
            "coboundary_squared",
        ],
    ),
    (
        "invariant",
        &[
            "projection_composite",
            "homotopy_equivalence",
            "eigenvalue_r_full",
            "eigenvalue_r_invariant_form",
        ],
    ),
    (
        "transport",
        &[
            "transport_chain_map",
            "transport_pairing_covariance",
            "gamma_parallel",
            "transport_round_trip",
            "gm_tilde_commutation_fd",
            "wedge_vs_nilpotent",
            "wedge_tau_correction",
        ],
    ),
    (
        "pairing",
        &[
            "winding_integrality",
            "winding_constancy_fd",
            "pairing_adjunction",
            "gamma_cyclicity",
            "gamma_invariance",
            "gamma_cocycle",
            "psi_lemma",
            "psi_big_b",
            "contract_dual_recursion",
            "derivative_pairing_idempotent",
            "pairing_rank",
        ],
    ),
    (
        "chern",
        &[
            "chern_closure_idempotent",
            "chern_closure_invertible",
            "trace_chain_map_b",
            "trace_chain_map_big_b",
            "trace_pairing_affine",
            "tau2_matches_derivative",
        ],
    ),
    (
        "ode",
        &[
            "dyson_vs_exponential",
            "dyson_residual_monotone",
            "nilpotent_exact",
            "nilpotent_vs_dyson",
            "fd_quadratic",
            "fd_exponential",
        ],
    ),
];

pub fn suite_names() -> Vec<&'static str> {
    SUITES.iter().map(|(name, _)| *name).collect()
}

fn fnv_mix(seed: u64, name: &str) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64 ^ seed.wrapping_mul(0x0100_0000_01b3);
    for b in name.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

// deterministic generators

pub fn gen_coeff(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn gen_index(rng: &mut ChaCha8Rng, n: usize, bound: i64, nonzero: bool) -> MultiIndex {
    loop {
        let v: Vec<i64> = (0..n).map(|_| rng.random_range(-bound..=bound)).collect();
        let idx = MultiIndex::new(v);
        if !nonzero || !idx.is_zero() {
            return idx;
        }
    }
}

pub fn gen_element(rng: &mut ChaCha8Rng, n: usize, support: usize, bound: i64) -> TorusElement {
    let mut e = TorusElement::zero(n);
    for _ in 0..support {
        e.add_term(gen_index(rng, n, bound, false), gen_coeff(rng));
    }
    if e.is_zero() {
        e.add_term(MultiIndex::zero(n), C64::new(1.0, 0.0));
    }
    e
}

/// Deterministic sparse chain; interior indices are nonzero.
pub fn gen_chain(
    rng: &mut ChaCha8Rng,
    n: usize,
    degree: usize,
    support: usize,
    bound: i64,
) -> Chain {
    let mut c = Chain::zero(n, degree);
    for _ in 0..support {
        let mut factors = Vec::with_capacity(degree + 1);
        factors.push(gen_index(rng, n, bound, false));
        for _ in 0..degree {
            factors.push(gen_index(rng, n, bound, true));
        }
        c.add_term(factors, gen_coeff(rng));
    }
    c
}

/// Random chain whose terms are balanced (degree zero) along axes `1..j`.
/// With `j > n` the chain is fully invariant.
pub fn gen_balanced_chain(
    rng: &mut ChaCha8Rng,
    n: usize,
    below_axis: usize,
    degree: usize,
    support: usize,
    bound: i64,
) -> Chain {
    let mut c = Chain::zero(n, degree);
    'terms: for _ in 0..support {
        let mut factors = Vec::with_capacity(degree + 1);
        for _ in 0..degree {
            factors.push(gen_index(rng, n, bound, true));
        }
        let mut head: Vec<i64> = (0..n).map(|_| rng.random_range(-bound..=bound)).collect();
        for axis in 1..below_axis.min(n + 1) {
            let tail_sum: i64 = factors.iter().map(|a| a.component(axis)).sum();
            head[axis - 1] = -tail_sum;
        }
        let head = MultiIndex::new(head);
        // interior slots must stay nonzero
        for f in &factors {
            if f.is_zero() {
                continue 'terms;
            }
        }
        let mut tuple = vec![head];
        tuple.extend(factors);
        c.add_term(tuple, gen_coeff(rng));
    }
    c
}

pub fn gen_invariant_chain(
    rng: &mut ChaCha8Rng,
    n: usize,
    degree: usize,
    support: usize,
    bound: i64,
) -> Chain {
    gen_balanced_chain(rng, n, n + 1, degree, support, bound)
}

fn gen_monomial_unit(rng: &mut ChaCha8Rng, n: usize, bound: i64) -> TorusElement {
    let alpha = gen_index(rng, n, bound, false);
    loop {
        let c = gen_coeff(rng);
        if c.norm() > 0.1 {
            return TorusElement::monomial(alpha, c);
        }
    }
}

/// Unitriangular conjugator with monomial off-diagonal entries.
fn gen_unitriangular(
    rng: &mut ChaCha8Rng,
    n: usize,
    size: usize,
    bound: i64,
) -> MatrixElement {
    let mut v = MatrixElement::identity(n, size);
    for i in 0..size {
        for j in i + 1..size {
            if rng.random_range(0..3) > 0 {
                v.set(i, j, gen_monomial_unit(rng, n, bound));
            }
        }
    }
    v
}

/// Exact idempotent `V E_11 V^{-1}` at `p`.
fn gen_conjugated_idempotent(
    rng: &mut ChaCha8Rng,
    p: &DeformationPoint,
    size: usize,
    bound: i64,
) -> Result<MatrixElement> {
    let v = gen_unitriangular(rng, p.dim(), size, bound);
    let v_inv = try_invert(&v, p)?;
    let mut e11 = MatrixElement::zero(p.dim(), size);
    e11.set(0, 0, TorusElement::one(p.dim()));
    mat_mul(&mat_mul(&v, &e11, p)?, &v_inv, p)
}

fn element_scale(parts: &[&TorusElement]) -> f64 {
    let norm = parts.iter().map(|e| e.norm_inf()).fold(0.0, f64::max);
    let terms: usize = parts.iter().map(|e| e.support_size()).sum();
    (1.0 + norm) * terms.max(1) as f64
}

fn chain_scale(c: &Chain) -> f64 {
    (1.0 + c.norm_inf()) * c.num_terms().max(1) as f64
}

fn graded_scale(g: &GradedChain) -> f64 {
    (1.0 + g.norm_inf()) * g.num_terms().max(1) as f64
}

struct Ctx {
    cfg: SuiteConfig,
    theta: SkewMatrix,
    point: DeformationPoint,
}

impl Ctx {
    fn new(cfg: &SuiteConfig) -> Result<Self> {
        cfg.validate()?;
        let theta = cfg.theta_matrix()?;
        let point = DeformationPoint::new(theta.clone(), cfg.t);
        Ok(Ctx {
            cfg: cfg.clone(),
            theta,
            point,
        })
    }

    fn rng(&self, name: &str) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(fnv_mix(self.cfg.seed, name))
    }

    fn derivations(&self) -> Vec<MultiDiff> {
        (1..=self.cfg.n).map(MultiDiff::derivation).collect()
    }

    /// A normalized non-derivation 1-cochain with nontrivial derivation
    /// brackets: `a -> m_t(delta_1(a), u^alpha)`.
    fn twisted_cochain(&self) -> MultiDiff {
        let alpha = MultiIndex::unit(self.cfg.n, 1).expect("axis 1");
        MultiDiff::from_fn(1, "twist", true, move |args, p| {
            let d = delta(1, &args[0])?;
            mul(
                &d,
                &TorusElement::monomial(alpha.clone(), C64::new(1.0, 0.0)),
                p,
            )
        })
    }

    fn cochain_family(&self) -> Vec<MultiDiff> {
        let ds = self.derivations();
        let mut family: Vec<MultiDiff> = ds.clone();
        for j in 0..ds.len() {
            for k in 0..ds.len() {
                if j < k {
                    family.push(cup(&ds[j], &ds[k]));
                }
            }
        }
        family.push(MultiDiff::deformation_cocycle(&self.theta));
        let combo = ds[0]
            .scale(C64::new(0.7, 0.0))
            .add(&ds[ds.len() - 1].scale(C64::new(0.0, -0.4)));
        family.push(cup(&combo, &ds[0]));
        family
    }
}

type Runner<'a> = Box<dyn Fn(&mut ChaCha8Rng, &Ctx) -> Result<(f64, usize)> + Send + Sync + 'a>;

struct Identity<'a> {
    name: &'static str,
    tolerance: f64,
    runner: Runner<'a>,
}

fn identity<'a, F>(name: &'static str, tolerance: f64, f: F) -> Identity<'a>
where
    F: Fn(&mut ChaCha8Rng, &Ctx) -> Result<(f64, usize)> + Send + Sync + 'a,
{
    Identity {
        name,
        tolerance,
        runner: Box::new(f),
    }
}

fn execute(ctx: &Ctx, identities: Vec<Identity<'_>>) -> Vec<IdentityReport> {
    identities
        .par_iter()
        .map(|id| {
            let mut rng = ctx.rng(id.name);
            let tolerance = ctx
                .cfg
                .tolerances
                .get(id.name)
                .copied()
                .unwrap_or(id.tolerance);
            match (id.runner)(&mut rng, ctx) {
                Ok((max_residual, samples)) => IdentityReport {
                    name: id.name.to_string(),
                    samples,
                    max_residual,
                    tolerance,
                    pass: max_residual <= tolerance,
                    note: None,
                },
                Err(e) => IdentityReport {
                    name: id.name.to_string(),
                    samples: 0,
                    max_residual: f64::NAN,
                    tolerance,
                    pass: false,
                    note: Some(e.to_string()),
                },
            }
        })
        .collect()
}

/// Run one named suite.
pub fn run_suite(name: &str, cfg: &SuiteConfig) -> Result<SuiteReport> {
    let ctx = Ctx::new(cfg)?;
    let start = Instant::now();
    let identities = match name {
        "complex" => complex_suite(),
        "operators" => operators_suite(),
        "invariant" => invariant_suite(),
        "transport" => transport_suite(),
        "pairing" => pairing_suite(),
        "chern" => chern_suite(),
        "ode" => ode_suite(),
        _ => {
            return Err(Error::UnknownSuite {
                name: name.to_string(),
            })
        }
    };
    let identities = execute(&ctx, identities);
    let pass = identities.iter().all(|i| i.pass);
    Ok(SuiteReport {
        suite: name.to_string(),
        seed: cfg.seed,
        identities,
        wall_ms: start.elapsed().as_millis(),
        pass,
    })
}

/// Run every suite in the manifest order.
pub fn run_all(cfg: &SuiteConfig) -> Result<Vec<SuiteReport>> {
    suite_names()
        .into_iter()
        .map(|name| run_suite(name, cfg))
        .collect()
}

// ------------------------------------------------------------------
// complex suite
// ------------------------------------------------------------------

fn complex_suite<'a>() -> Vec<Identity<'a>> {
    vec![
        identity("mul_associative", 1e-10, |rng, ctx| {
            let cfg = &ctx.cfg;
            // at least 200 seeded triples with support <= 5 and |alpha_i| <= 3
            let triples = cfg.samples.max(200);
            let mut worst = 0.0f64;
            for _ in 0..triples {
                let x = gen_element(rng, cfg.n, cfg.support.min(5), 3);
                let y = gen_element(rng, cfg.n, cfg.support.min(5), 3);
                let z = gen_element(rng, cfg.n, cfg.support.min(5), 3);
                let left = mul(&mul(&x, &y, &ctx.point)?, &z, &ctx.point)?;
                let right = mul(&x, &mul(&y, &z, &ctx.point)?, &ctx.point)?;
                let r = left.sub(&right).norm_inf() / element_scale(&[&x, &y, &z]);
                worst = worst.max(r);
            }
            Ok((worst, triples))
        }),
        identity("mul_unit_exact", 0.0, |rng, ctx| {
            let cfg = &ctx.cfg;
            let one = TorusElement::one(cfg.n);
            let mut worst = 0.0f64;
            for _ in 0..cfg.samples {
                let x = gen_element(rng, cfg.n, cfg.support, cfg.index_bound);
                let left = mul(&one, &x, &ctx.point)?;
                let right = mul(&x, &one, &ctx.point)?;
                if left != x || right != x {
                    worst = worst.max(
                        left.sub(&x)
                            .norm_inf()
                            .max(right.sub(&x).norm_inf())
                            .max(f64::MIN_POSITIVE),
                    );
                }
            }
            Ok((worst, ctx.cfg.samples))
        }),
        identity("commutation_relation", 1e-12, |_rng, ctx| {
            let cfg = &ctx.cfg;
            let p1 = DeformationPoint::new(ctx.theta.clone(), 1.0);
            let mut worst = 0.0f64;
            for j in 1..=cfg.n {
                for k in 1..=cfg.n {
                    if j == k {
                        continue;
                    }
                    let uj = TorusElement::generator(cfg.n, j)?;
                    let uk = TorusElement::generator(cfg.n, k)?;
                    let lhs = mul(&uj, &uk, &p1)?;
                    let rhs = mul(&uk, &uj, &p1)?.scale(unit_phase(ctx.theta.entry(j, k)));
                    worst = worst.max(lhs.sub(&rhs).norm_inf());
                }
            }
            Ok((worst, cfg.n * (cfg.n - 1)))
        }),
        identity("delta_leibniz", 1e-10, |rng, ctx| {
            let cfg = &ctx.cfg;
            let mut worst = 0.0f64;
            for _ in 0..cfg.samples {
                let x = gen_element(rng, cfg.n, cfg.support, cfg.index_bound);
                let y = gen_element(rng, cfg.n, cfg.support, cfg.index_bound);
                for j in 1..=cfg.n {
                    let lhs = delta(j, &mul(&x, &y, &ctx.point)?)?;
                    let rhs = mul(&delta(j, &x)?, &y, &ctx.point)?
                        .add(&mul(&x, &delta(j, &y)?, &ctx.point)?);
                    let r = lhs.sub(&rhs).norm_inf() / element_scale(&[&x, &y]);
                    worst = worst.max(r);
                }
            }
            Ok((worst, ctx.cfg.samples))
        }),
        identity("trace_commutator", 1e-10, |rng, ctx| {
            let cfg = &ctx.cfg;
            let mut worst = 0.0f64;
            for _ in 0..cfg.samples {
                let x = gen_element(rng, cfg.n, cfg.support, cfg.index_bound);
                let y = gen_element(rng, cfg.n, cfg.support, cfg.index_bound);
                let r = (trace(&mul(&x, &y, &ctx.point)?) - trace(&mul(&y, &x, &ctx.point)?))
                    .norm()
                    / element_scale(&[&x, &y]);
                worst = worst.max(r);
            }
            Ok((worst, ctx.cfg.samples))
        }),
        identity("trace_delta_exact", 0.0, |rng, ctx| {
            let cfg = &ctx.cfg;
            let mut worst = 0.0f64;
            for _ in 0..cfg.samples {
                let x = gen_element(rng, cfg.n, cfg.support, cfg.index_bound);
                for j in 1..=cfg.n {
                    worst = worst.max(trace(&delta(j, &x)?).norm());
                }
            }
            Ok((worst, ctx.cfg.samples))
        }),
        identity("mul_derivative_fd", 1e-6, |rng, ctx| {
            let cfg = &ctx.cfg;
            let h = 1e-4;
            // the h^2 truncation term grows like (2 pi B)^3; small indices keep
            // it inside the stated tolerance
            let bound = cfg.index_bound.min(1);
            let mut worst = 0.0f64;
            for _ in 0..cfg.samples {
                let x = gen_element(rng, cfg.n, cfg.support.min(3), bound);
                let y = gen_element(rng, cfg.n, cfg.support.min(3), bound);
                let plus = mul(&x, &y, &ctx.point.at(cfg.t + h))?;
                let minus = mul(&x, &y, &ctx.point.at(cfg.t - h))?;
                let fd = plus.sub(&minus).scale(C64::new(0.5 / h, 0.0));
                let closed = mul_derivative(&x, &y, &ctx.point)?;
                let r = fd.sub(&closed).norm_inf() / element_scale(&[&x, &y]);
                worst = worst.max(r);
            }
            Ok((worst, ctx.cfg.samples))
        }),
        identity("b_squared", 1e-10, |rng, ctx| {
            let cfg = &ctx.cfg;
            let mut worst = 0.0f64;
            for _ in 0..cfg.samples {
                let degree = rng.random_range(2..=cfg.max_degree.max(2));
                let c = gen_chain(rng, cfg.n, degree, cfg.support, cfg.index_bound);
                let bb = boundary_b(&boundary_b(&c, &ctx.point)?, &ctx.point)?;
                worst = worst.max(bb.norm_inf() / chain_scale(&c));
            }
            Ok((worst, ctx.cfg.samples))
        }),
        identity("big_b_squared", 1e-10, |rng, ctx| {
            let cfg = &ctx.cfg;
            let mut worst = 0.0f64;
            for _ in 0..cfg.samples {
                let degree = rng.random_range(0..=cfg.max_degree);
                let c = gen_chain(rng, cfg.n, degree, cfg.support, cfg.index_bound);
                worst = worst.max(connes_b(&connes_b(&c)).norm_inf() / chain_scale(&c));
            }
            Ok((worst, ctx.cfg.samples))
        }),
        identity("b_anticommute", 1e-10, |rng, ctx| {
            let cfg = &ctx.cfg;
            let mut worst = 0.0f64;
            for _ in 0..cfg.samples {
                let degree = rng.random_range(0..=cfg.max_degree);
                let c = GradedChain::from_chain(gen_chain(
                    rng,
                    cfg.n,
                    degree,
                    cfg.support,
                    cfg.index_bound,
                ));
                let anti = graded_boundary_b(&graded_connes_b(&c), &ctx.point)
                    .add(&graded_connes_b(&graded_boundary_b(&c, &ctx.point)));
                worst = worst.max(anti.norm_inf() / graded_scale(&c));
            }
            Ok((worst, ctx.cfg.samples))
        }),
    ]
}

// ------------------------------------------------------------------
// operators suite
// ------------------------------------------------------------------

fn operators_suite<'a>() -> Vec<Identity<'a>> {
    vec![
        identity("cartan_homotopy", 1e-9, |rng, ctx| {
            let cfg = &ctx.cfg;
            let family = ctx.cochain_family();
            let mut worst = 0.0f64;
            let per_d = cfg.samples.div_ceil(family.len()).max(1);
            for d in &family {
                let dd = hochschild_delta(d);
                for _ in 0..per_d {
                    let degree = rng.random_range(0..=cfg.max_degree);
                    let c = GradedChain::from_chain(gen_chain(
                        rng,
                        cfg.n,
                        degree,
                        cfg.support,
                        cfg.index_bound,
                    ));
                    let bb = GradedOp::total_differential(&ctx.point);
                    let i_d = GradedOp::cyclic(d, &ctx.point);
                    let lhs = graded_commutator(&bb, &i_d, &c)?;
                    let rhs = apply_lie(d, &c, &ctx.point)?
                        .add(&apply_cyclic(&dd, &c, &ctx.point)?);
                    worst = worst.max(lhs.sub(&rhs).norm_inf() / graded_scale(&c));
                }
            }
            Ok((worst, per_d * family.len()))
        }),
        identity("lie_b_commutator", 1e-9, |rng, ctx| {
            let cfg = &ctx.cfg;
            let family = ctx.cochain_family();
            let mut worst = 0.0f64;
            let per_d = cfg.samples.div_ceil(family.len()).max(1);
            for d in &family {
                let dd = hochschild_delta(d);
                for _ in 0..per_d {
                    let degree = rng.random_range(0..=cfg.max_degree);
                    let c = GradedChain::from_chain(gen_chain(
                        rng,
                        cfg.n,
                        degree,
                        cfg.support,
                        cfg.index_bound,
                    ));
                    let b_op = GradedOp::new(true, |g| Ok(graded_boundary_b(g, &ctx.point)));
                    let l_d = GradedOp::lie(d, &ctx.point);
                    let lhs = graded_commutator(&b_op, &l_d, &c)?;
                    let rhs = apply_lie(&dd, &c, &ctx.point)?.scale(C64::new(-1.0, 0.0));
                    worst = worst.max(lhs.sub(&rhs).norm_inf() / graded_scale(&c));
                }
            }
            Ok((worst, per_d * family.len()))
        }),
        identity("lie_big_b_commutator", 1e-9, |rng, ctx| {
            let cfg = &ctx.cfg;
            let family = ctx.cochain_family();
            let mut worst = 0.0f64;
            let per_d = cfg.samples.div_ceil(family.len()).max(1);
            for d in &family {
                for _ in 0..per_d {
                    let degree = rng.random_range(0..=cfg.max_degree);
                    let c = GradedChain::from_chain(gen_chain(
                        rng,
                        cfg.n,
                        degree,
                        cfg.support,
                        cfg.index_bound,
                    ));
                    let b_op = GradedOp::new(true, |g| Ok(graded_connes_b(g)));
                    let l_d = GradedOp::lie(d, &ctx.point);
                    let lhs = graded_commutator(&b_op, &l_d, &c)?;
                    worst = worst.max(lhs.norm_inf() / graded_scale(&c));
                }
            }
            Ok((worst, per_d * family.len()))
        }),
        identity("iota_b_commutator", 1e-9, |rng, ctx| {
            let cfg = &ctx.cfg;
            let family = ctx.cochain_family();
            let mut worst = 0.0f64;
            let per_d = cfg.samples.div_ceil(family.len()).max(1);
            for d in &family {
                let dd = hochschild_delta(d);
                for _ in 0..per_d {
                    let degree = rng.random_range(0..=cfg.max_degree);
                    let c = GradedChain::from_chain(gen_chain(
                        rng,
                        cfg.n,
                        degree,
                        cfg.support,
                        cfg.index_bound,
                    ));
                    let b_op = GradedOp::new(true, |g| Ok(graded_boundary_b(g, &ctx.point)));
                    let i_op = GradedOp::iota(d, &ctx.point);
                    let lhs = graded_commutator(&b_op, &i_op, &c)?;
                    let rhs = crate::calculus::apply_iota(&dd, &c, &ctx.point)?;
                    worst = worst.max(lhs.sub(&rhs).norm_inf() / graded_scale(&c));
                }
            }
            Ok((worst, per_d * family.len()))
        }),
        identity("lie_bracket_representation", 1e-9, |rng, ctx| {
            let cfg = &ctx.cfg;
            let ds = ctx.derivations();
            let twist = ctx.twisted_cochain();
            let pairs: Vec<(MultiDiff, MultiDiff)> = vec![
                (ds[0].clone(), ds[ds.len() - 1].clone()),
                (ds[0].clone(), twist.clone()),
                (twist.clone(), cup(&ds[0], &ds[ds.len() - 1])),
            ];
            let mut worst = 0.0f64;
            let per_pair = cfg.samples.div_ceil(pairs.len()).max(1);
            for (d, e) in &pairs {
                let de = bracket(d, e);
                for _ in 0..per_pair {
                    let degree = rng.random_range(0..=cfg.max_degree);
                    let c = GradedChain::from_chain(gen_chain(
                        rng,
                        cfg.n,
                        degree,
                        cfg.support,
                        cfg.index_bound,
                    ));
                    let l_d = GradedOp::lie(d, &ctx.point);
                    let l_e = GradedOp::lie(e, &ctx.point);
                    let lhs = graded_commutator(&l_d, &l_e, &c)?;
                    let rhs = apply_lie(&de, &c, &ctx.point)?;
                    worst = worst.max(lhs.sub(&rhs).norm_inf() / graded_scale(&c));
                }
            }
            Ok((worst, per_pair * pairs.len()))
        }),
        identity("lie_cyclic_equivariance", 1e-9, |rng, ctx| {
            let cfg = &ctx.cfg;
            let ds = ctx.derivations();
            let twist = ctx.twisted_cochain();
            let targets: Vec<MultiDiff> = vec![
                twist.clone(),
                cup(&ds[0], &ds[ds.len() - 1]),
                MultiDiff::deformation_cocycle(&ctx.theta),
            ];
            let mut worst = 0.0f64;
            let per_pair = cfg.samples.div_ceil(targets.len() * ds.len()).max(1);
            for x in &ds {
                for d in &targets {
                    let xd = bracket(x, d);
                    for _ in 0..per_pair {
                        let degree = rng.random_range(0..=cfg.max_degree);
                        let c = GradedChain::from_chain(gen_chain(
                            rng,
                            cfg.n,
                            degree,
                            cfg.support,
                            cfg.index_bound,
                        ));
                        let l_x = GradedOp::lie(x, &ctx.point);
                        let i_d = GradedOp::cyclic(d, &ctx.point);
                        let lhs = graded_commutator(&l_x, &i_d, &c)?;
                        let rhs = apply_cyclic(&xd, &c, &ctx.point)?;
                        worst = worst.max(lhs.sub(&rhs).norm_inf() / graded_scale(&c));
                    }
                }
            }
            Ok((worst, per_pair * targets.len() * ds.len()))
        }),
        identity("lie_lie_equivariance", 1e-9, |rng, ctx| {
            let cfg = &ctx.cfg;
            let ds = ctx.derivations();
            let twist = ctx.twisted_cochain();
            let targets: Vec<MultiDiff> =
                vec![twist.clone(), cup(&twist, &ds[0])];
            let mut worst = 0.0f64;
            let per_pair = cfg.samples.div_ceil(targets.len() * ds.len()).max(1);
            for x in &ds {
                for d in &targets {
                    let xd = bracket(x, d);
                    for _ in 0..per_pair {
                        let degree = rng.random_range(0..=cfg.max_degree);
                        let c = GradedChain::from_chain(gen_chain(
                            rng,
                            cfg.n,
                            degree,
                            cfg.support,
                            cfg.index_bound,
                        ));
                        let l_x = GradedOp::lie(x, &ctx.point);
                        let l_d = GradedOp::lie(d, &ctx.point);
                        let lhs = graded_commutator(&l_x, &l_d, &c)?;
                        let rhs = apply_lie(&xd, &c, &ctx.point)?;
                        worst = worst.max(lhs.sub(&rhs).norm_inf() / graded_scale(&c));
                    }
                }
            }
            Ok((worst, per_pair * targets.len() * ds.len()))
        }),
        identity("two_derivation_homotopy", 1e-9, |rng, ctx| {
            let cfg = &ctx.cfg;
            let ds = ctx.derivations();
            let combo = ds[0]
                .scale(C64::new(0.8, 0.0))
                .add(&ds[ds.len() - 1].scale(C64::new(-0.5, 0.0)));
            let pairs: Vec<(MultiDiff, MultiDiff)> = vec![
                (ds[ds.len() - 1].clone(), ds[0].clone()),
                (ds[0].clone(), ds[0].clone()),
                (combo.clone(), ds[ds.len() - 1].clone()),
            ];
            let mut worst = 0.0f64;
            let per_pair = cfg.samples.div_ceil(pairs.len()).max(1);
            for (x, y) in &pairs {
                let x_cup_y = cup(x, y);
                for _ in 0..per_pair {
                    let degree = rng.random_range(0..=cfg.max_degree);
                    let c = GradedChain::from_chain(gen_chain(
                        rng,
                        cfg.n,
                        degree,
                        cfg.support,
                        cfg.index_bound,
                    ));
                    let bb = GradedOp::total_differential(&ctx.point);
                    let i_xy = GradedOp::contract_pair(x, y, &ctx.point);
                    let lhs = graded_commutator(&bb, &i_xy, &c)?;
                    let rhs = apply_lie_pair(x, y, &c, &ctx.point)?
                        .add(&apply_cyclic(&x_cup_y, &c, &ctx.point)?)
                        .sub(&apply_cyclic(
                            y,
                            &apply_cyclic(x, &c, &ctx.point)?,
                            &ctx.point,
                        )?);
                    worst = worst.max(lhs.sub(&rhs).norm_inf() / graded_scale(&c));
                }
            }
            Ok((worst, per_pair * pairs.len()))
        }),
        identity("two_derivation_corollary", 1e-9, |rng, ctx| {
            let cfg = &ctx.cfg;
            let ds = ctx.derivations();
            let pairs: Vec<(MultiDiff, MultiDiff)> = vec![
                (ds[ds.len() - 1].clone(), ds[0].clone()),
                (ds[0].clone(), ds[ds.len() - 1].clone()),
            ];
            let mut worst = 0.0f64;
            let per_pair = cfg.samples.div_ceil(pairs.len()).max(1);
            for (x, y) in &pairs {
                let x_cup_y = cup(x, y);
                for _ in 0..per_pair {
                    let degree = rng.random_range(0..=cfg.max_degree);
                    let c = GradedChain::from_chain(gen_chain(
                        rng,
                        cfg.n,
                        degree,
                        cfg.support,
                        cfg.index_bound,
                    ));
                    let bb = GradedOp::total_differential(&ctx.point);
                    let l_xy = GradedOp::lie_pair(x, y, &ctx.point);
                    let lhs = graded_commutator(&bb, &l_xy, &c)?;
                    let rhs = apply_lie(&x_cup_y, &c, &ctx.point)?
                        .scale(C64::new(-1.0, 0.0))
                        .add(&apply_lie(
                            y,
                            &apply_cyclic(x, &c, &ctx.point)?,
                            &ctx.point,
                        )?)
                        .sub(&apply_cyclic(
                            y,
                            &apply_lie(x, &c, &ctx.point)?,
                            &ctx.point,
                        )?);
                    worst = worst.max(lhs.sub(&rhs).norm_inf() / graded_scale(&c));
                }
            }
            Ok((worst, per_pair * pairs.len()))
        }),
        identity("contraction_square_witness", 1e-9, |rng, ctx| {
            let cfg = &ctx.cfg;
            let ds = ctx.derivations();
            let combo = ds[0]
                .scale(C64::new(1.0, 0.0))
                .add(&ds[ds.len() - 1].scale(C64::new(GOLDEN_CONJUGATE, 0.0)));
            let xs = vec![ds[0].clone(), ds[ds.len() - 1].clone(), combo];
            let mut worst = 0.0f64;
            let per_x = cfg.samples.div_ceil(xs.len()).max(1);
            for x in &xs {
                let x_inner = x.clone();
                let half_square = MultiDiff::from_fn(1, "x^2/2", true, move |args, p| {
                    let once = x_inner.evaluate(args, p)?;
                    Ok(x_inner.evaluate(&[once], p)?.scale(C64::new(0.5, 0.0)))
                });
                for _ in 0..per_x {
                    let degree = rng.random_range(0..=cfg.max_degree);
                    let c = GradedChain::from_chain(gen_invariant_chain(
                        rng,
                        cfg.n,
                        degree,
                        cfg.support,
                        cfg.index_bound,
                    ));
                    let bb = GradedOp::total_differential(&ctx.point);
                    let witness = GradedOp::new(true, |g| {
                        Ok(crate::calculus::apply_contract_pair(x, x, g, &ctx.point)?
                            .add(&apply_cyclic(&half_square, g, &ctx.point)?)
                            .scale(C64::new(-1.0, 0.0)))
                    });
                    let lhs = graded_commutator(&bb, &witness, &c)?;
                    let rhs = apply_cyclic(x, &apply_cyclic(x, &c, &ctx.point)?, &ctx.point)?;
                    worst = worst.max(lhs.sub(&rhs).norm_inf() / graded_scale(&c));
                }
            }
            Ok((worst, per_x * xs.len()))
        }),
        identity("pair_equivariance", 1e-9, |rng, ctx| {
            let cfg = &ctx.cfg;
            let ds = ctx.derivations();
            let mut worst = 0.0f64;
            let per = cfg.samples.div_ceil(ds.len()).max(1);
            for z in &ds {
                for _ in 0..per {
                    let degree = rng.random_range(0..=cfg.max_degree);
                    let c = GradedChain::from_chain(gen_chain(
                        rng,
                        cfg.n,
                        degree,
                        cfg.support,
                        cfg.index_bound,
                    ));
                    let l_z = GradedOp::lie(z, &ctx.point);
                    let i_xy = GradedOp::contract_pair(&ds[0], &ds[ds.len() - 1], &ctx.point);
                    // [Z, X] = [Z, Y] = 0 for the canonical derivations
                    let lhs = graded_commutator(&l_z, &i_xy, &c)?;
                    worst = worst.max(lhs.norm_inf() / graded_scale(&c));
                }
            }
            Ok((worst, per * ds.len()))
        }),
        identity("lie_multiplication_is_minus_b", 1e-10, |rng, ctx| {
            let cfg = &ctx.cfg;
            let m = MultiDiff::multiplication();
            let mut worst = 0.0f64;
            for _ in 0..cfg.samples {
                let degree = rng.random_range(1..=cfg.max_degree.max(1));
                let c = gen_chain(rng, cfg.n, degree, cfg.support, cfg.index_bound);
                let lm = crate::calculus::lie_derivative(&m, &c, &ctx.point)?;
                let b = boundary_b(&c, &ctx.point)?;
                worst = worst.max(lm.add(&b).norm_inf() / chain_scale(&c));
            }
            Ok((worst, ctx.cfg.samples))
        }),
        identity("coboundary_bracket_form", 1e-10, |rng, ctx| {
            let cfg = &ctx.cfg;
            let ds = ctx.derivations();
            let family = vec![
                cup(&ds[0], &ds[ds.len() - 1]),
                ctx.twisted_cochain(),
                MultiDiff::deformation_cocycle(&ctx.theta),
            ];
            let m = MultiDiff::multiplication();
            let mut worst = 0.0f64;
            let per = cfg.samples.div_ceil(family.len()).max(1);
            for d in &family {
                let delta_d = hochschild_delta(d);
                let m_bracket = bracket(&m, d);
                let arity = d.arity() + 1;
                for _ in 0..per {
                    let args: Vec<TorusElement> = (0..arity)
                        .map(|_| gen_element(rng, cfg.n, cfg.support.min(3), cfg.index_bound))
                        .collect();
                    let lhs = delta_d.evaluate(&args, &ctx.point)?;
                    let rhs = m_bracket.evaluate(&args, &ctx.point)?;
                    let refs: Vec<&TorusElement> = args.iter().collect();
                    worst = worst.max(lhs.sub(&rhs).norm_inf() / element_scale(&refs));
                }
            }
            Ok((worst, per * family.len()))
        }),
        identity("coboundary_squared", 1e-10, |rng, ctx| {
            let cfg = &ctx.cfg;
            let ds = ctx.derivations();
            let family = vec![cup(&ds[0], &ds[ds.len() - 1]), ctx.twisted_cochain()];
            let mut worst = 0.0f64;
            let per = cfg.samples.div_ceil(family.len()).max(1);
            for d in &family {
                let dd = hochschild_delta(&hochschild_delta(d));
                let arity = d.arity() + 2;
                for _ in 0..per {
                    let args: Vec<TorusElement> = (0..arity)
                        .map(|_| gen_element(rng, cfg.n, cfg.support.min(3), cfg.index_bound))
                        .collect();
                    let v = dd.evaluate(&args, &ctx.point)?;
                    let refs: Vec<&TorusElement> = args.iter().collect();
                    worst = worst.max(v.norm_inf() / element_scale(&refs));
                }
            }
            Ok((worst, per * family.len()))
        }),
    ]
}

// ------------------------------------------------------------------
// invariant suite
// ------------------------------------------------------------------

fn invariant_suite<'a>() -> Vec<Identity<'a>> {
    vec![
        identity("projection_composite", 0.0, |rng, ctx| {
            let cfg = &ctx.cfg;
            let mut worst = 0.0f64;
            for _ in 0..cfg.samples {
                let degree = rng.random_range(0..=cfg.max_degree);
                let c = gen_chain(rng, cfg.n, degree, cfg.support, cfg.index_bound);
                let mut composite = c.clone();
                for j in 1..=cfg.n {
                    composite = project_axis(j, &composite);
                }
                worst = worst.max(composite.sub(&project_invariant(&c)).norm_inf());
            }
            Ok((worst, ctx.cfg.samples))
        }),
        identity("homotopy_equivalence", 1e-10, |rng, ctx| {
            let cfg = &ctx.cfg;
            let mut worst = 0.0f64;
            let per_axis = cfg.samples.div_ceil(cfg.n).max(1);
            for j in 1..=cfg.n {
                for _ in 0..per_axis {
                    let degree = rng.random_range(0..=cfg.max_degree);
                    // chains in the joint kernel of the previous axes
                    let c = gen_balanced_chain(
                        rng,
                        cfg.n,
                        j,
                        degree,
                        cfg.support,
                        cfg.index_bound,
                    );
                    let g = GradedChain::from_chain(c.clone());
                    let bb = GradedOp::total_differential(&ctx.point);
                    let h_j = GradedOp::new(true, |x| {
                        let mut out = GradedChain::zero(x.dim());
                        for (_, comp) in x.components() {
                            out = out.add(&homotopy_h(j, comp, &ctx.point)?);
                        }
                        Ok(out)
                    });
                    let lhs = graded_commutator(&bb, &h_j, &g)?;
                    let rhs = GradedChain::from_chain(c.sub(&project_axis(j, &c)));
                    worst = worst.max(lhs.sub(&rhs).norm_inf() / graded_scale(&g));
                }
            }
            Ok((worst, per_axis * cfg.n))
        }),
        identity("eigenvalue_r_full", 1e-12, |rng, ctx| {
            let cfg = &ctx.cfg;
            let mut worst = 0.0f64;
            for _ in 0..cfg.samples {
                let degree = rng.random_range(1..=cfg.max_degree.max(1));
                let c = gen_invariant_chain(rng, cfg.n, degree, 1, cfg.index_bound);
                if c.is_zero() {
                    continue;
                }
                let factors = c.terms().next().unwrap().0.clone();
                let r = r_poly(&factors, &ctx.theta)?;
                let applied = weighted_lie_pair_full(&c, &ctx.point)?;
                let expected = GradedChain::from_chain(c.scale(C64::new(r, 0.0)));
                worst = worst.max(applied.sub(&expected).norm_inf() / chain_scale(&c));
            }
            Ok((worst, ctx.cfg.samples))
        }),
        identity("eigenvalue_r_invariant_form", 1e-12, |rng, ctx| {
            let cfg = &ctx.cfg;
            let mut worst = 0.0f64;
            for _ in 0..cfg.samples {
                let degree = rng.random_range(1..=cfg.max_degree.max(1));
                let c = gen_invariant_chain(rng, cfg.n, degree, 1, cfg.index_bound);
                if c.is_zero() {
                    continue;
                }
                let factors = c.terms().next().unwrap().0.clone();
                let r = r_poly(&factors, &ctx.theta)?;
                let applied = weighted_lie_pair_invariant(&c, &ctx.point)?;
                let expected = GradedChain::from_chain(c.scale(C64::new(r, 0.0)));
                worst = worst.max(applied.sub(&expected).norm_inf() / chain_scale(&c));
            }
            Ok((worst, ctx.cfg.samples))
        }),
    ]
}

// ------------------------------------------------------------------
// transport suite
// ------------------------------------------------------------------

fn transport_suite<'a>() -> Vec<Identity<'a>> {
    vec![
        identity("transport_chain_map", 1e-9, |rng, ctx| {
            let cfg = &ctx.cfg;
            let (t0, t1) = (cfg.t, cfg.t1);
            let p0 = ctx.point.at(t0);
            let p1 = ctx.point.at(t1);
            let mut worst = 0.0f64;
            for _ in 0..cfg.samples {
                let degree = rng.random_range(0..=cfg.max_degree);
                let c = gen_invariant_chain(rng, cfg.n, degree, cfg.support, cfg.index_bound);
                let g = GradedChain::from_chain(c);
                let lhs = transport_graded(&b_plus_big_b(&g, &p0), t0, t1, &ctx.theta)?;
                let rhs = b_plus_big_b(&transport_graded(&g, t0, t1, &ctx.theta)?, &p1);
                worst = worst.max(lhs.sub(&rhs).norm_inf() / graded_scale(&g));
            }
            Ok((worst, ctx.cfg.samples))
        }),
        identity("transport_pairing_covariance", 1e-10, |rng, ctx| {
            let cfg = &ctx.cfg;
            let (t0, t1) = (cfg.t, cfg.t1);
            let p0 = ctx.point.at(t0);
            let ds = ctx.derivations();
            let functionals: Vec<Functional> = vec![
                Functional::tau(),
                gamma(&[ds[0].clone()])?,
                gamma(&[ds[0].clone(), ds[ds.len() - 1].clone()])?,
            ];
            let mut worst = 0.0f64;
            let per = cfg.samples.div_ceil(functionals.len()).max(1);
            for phi in &functionals {
                for _ in 0..per {
                    let c = gen_invariant_chain(
                        rng,
                        cfg.n,
                        phi.degree(),
                        cfg.support,
                        cfg.index_bound,
                    );
                    let v = match InvariantChain::new(c) {
                        Ok(v) => v,
                        Err(_) => continue,
                    };
                    let table = FunctionalTable::tabulate(phi, &v, &p0)?;
                    let before = table.pair(&v);
                    let moved_chain = transport_chain(&v, t0, t1, &ctx.theta)?;
                    let moved_table = transport_table(&table, t0, t1, &ctx.theta)?;
                    let after = moved_table.pair(&moved_chain);
                    let scale = 1.0 + before.norm();
                    worst = worst.max((before - after).norm() / scale);
                }
            }
            Ok((worst, per * functionals.len()))
        }),
        identity("gamma_parallel", 1e-10, |rng, ctx| {
            let cfg = &ctx.cfg;
            let (t0, t1) = (cfg.t, cfg.t1);
            let p0 = ctx.point.at(t0);
            let p1 = ctx.point.at(t1);
            let ds = ctx.derivations();
            let functionals: Vec<Functional> = vec![
                Functional::tau(),
                gamma(&[ds[0].clone()])?,
                gamma(&[ds[0].clone(), ds[ds.len() - 1].clone()])?,
            ];
            let mut worst = 0.0f64;
            let per = cfg.samples.div_ceil(functionals.len()).max(1);
            for phi in &functionals {
                for _ in 0..per {
                    let c = gen_invariant_chain(
                        rng,
                        cfg.n,
                        phi.degree(),
                        cfg.support,
                        cfg.index_bound,
                    );
                    let v = match InvariantChain::new(c) {
                        Ok(v) => v,
                        Err(_) => continue,
                    };
                    let moved =
                        transport_table(&FunctionalTable::tabulate(phi, &v, &p0)?, t0, t1, &ctx.theta)?;
                    let fresh = FunctionalTable::tabulate(phi, &v, &p1)?;
                    for (factors, value) in moved.entries() {
                        let scale = 1.0 + value.norm();
                        worst = worst.max((value - fresh.value(factors)).norm() / scale);
                    }
                }
            }
            Ok((worst, per * functionals.len()))
        }),
        identity("transport_round_trip", 1e-12, |rng, ctx| {
            let cfg = &ctx.cfg;
            let (t0, t1) = (cfg.t, cfg.t1);
            let mut worst = 0.0f64;
            for _ in 0..cfg.samples {
                let degree = rng.random_range(0..=cfg.max_degree);
                let c = gen_invariant_chain(rng, cfg.n, degree, cfg.support, cfg.index_bound);
                let v = match InvariantChain::new(c) {
                    Ok(v) => v,
                    Err(_) => continue,
                };
                let there = transport_chain(&v, t0, t1, &ctx.theta)?;
                let back = transport_chain(&there, t1, t0, &ctx.theta)?;
                worst =
                    worst.max(back.chain().sub(v.chain()).norm_inf() / chain_scale(v.chain()));
            }
            Ok((worst, ctx.cfg.samples))
        }),
        identity("gm_tilde_commutation_fd", 1e-5, |rng, ctx| {
            let cfg = &ctx.cfg;
            let h = 1e-5;
            let e = MultiDiff::deformation_cocycle(&ctx.theta);
            let two_pi_i = C64::new(0.0, 2.0 * std::f64::consts::PI);
            let mut worst = 0.0f64;
            let samples = cfg.samples.min(24);
            for _ in 0..samples {
                let degree = rng.random_range(2..=cfg.max_degree.clamp(2, 3));
                let c = gen_invariant_chain(rng, cfg.n, degree, 1, cfg.index_bound.min(2));
                if c.is_zero() {
                    continue;
                }
                let g = GradedChain::from_chain(c.clone());
                let i_e_at = |t: f64, x: &GradedChain| -> Result<GradedChain> {
                    apply_cyclic(&e, x, &ctx.point.at(t))
                };
                // d/dt I_E + [A, I_E] = 0 with A = 2 pi i sum theta_jk L{delta_j, delta_k}
                let fd = i_e_at(cfg.t + h, &g)?
                    .sub(&i_e_at(cfg.t - h, &g)?)
                    .scale(C64::new(0.5 / h, 0.0));
                let a_of = |x: &GradedChain| -> Result<GradedChain> {
                    let mut out = GradedChain::zero(x.dim());
                    for (_, comp) in x.components() {
                        out = out.add(&weighted_lie_pair_full(comp, &ctx.point)?);
                    }
                    Ok(out.scale(two_pi_i))
                };
                let commutator = a_of(&i_e_at(cfg.t, &g)?)?.sub(&i_e_at(cfg.t, &a_of(&g)?)?);
                let residual = fd.add(&commutator);
                worst = worst.max(residual.norm_inf() / graded_scale(&g));
            }
            Ok((worst, samples))
        }),
        identity("wedge_vs_nilpotent", 1e-12, |rng, ctx| {
            let theta3 = default_theta(3.max(ctx.cfg.n));
            let n = theta3.dim();
            let mut worst = 0.0f64;
            let samples = ctx.cfg.samples.min(40);
            for _ in 0..samples {
                for parity in [Parity::Even, Parity::Odd] {
                    let basis = crate::invariant::wedge_basis(n, parity);
                    let mut w = WedgeClass::new(n, parity);
                    for subset in &basis {
                        if rng.random_range(0..2) == 1 {
                            w.set(subset.clone(), gen_coeff(rng))?;
                        }
                    }
                    let (t0, t1) = (ctx.cfg.t, ctx.cfg.t1);
                    let moved = crate::invariant::gm_transport_wedge(&w, t0, t1, &theta3);
                    let (basis, generator) = wedge_generator_matrix(&theta3, parity);
                    let x0 = wedge_to_vector(&w, &basis);
                    let expect =
                        nilpotent_transport(&generator.scale(C64::new(-1.0, 0.0)), &x0, t0, t1)?;
                    let got = wedge_to_vector(&moved, &basis);
                    let r = vec_norm_inf(&vec_sub(&got, &expect))
                        / (1.0 + vec_norm_inf(&x0));
                    worst = worst.max(r);
                }
            }
            Ok((worst, samples * 2))
        }),
        identity("wedge_tau_correction", 1e-12, |_rng, ctx| {
            let theta21 = ctx.theta.entry(2, 1);
            let s = ctx.cfg.t1 - ctx.cfg.t;
            let theta2 = SkewMatrix::two_dim(theta21);
            let mut w = WedgeClass::new(2, Parity::Even);
            w.set(vec![], C64::new(1.0, 0.0))?;
            let moved = crate::invariant::gm_transport_wedge(&w, ctx.cfg.t, ctx.cfg.t1, &theta2);
            let expect = C64::new(0.0, -2.0 * std::f64::consts::PI * theta21 * s);
            let r = (moved.coefficient(&[1, 2]) - expect).norm()
                + (moved.coefficient(&[]) - C64::new(1.0, 0.0)).norm();
            Ok((r, 1))
        }),
    ]
}

// ------------------------------------------------------------------
// pairing suite
// ------------------------------------------------------------------

fn pairing_suite<'a>() -> Vec<Identity<'a>> {
    vec![
        identity("winding_integrality", 1e-12, |rng, ctx| {
            let cfg = &ctx.cfg;
            let mut worst = 0.0f64;
            let count = 20usize;
            for _ in 0..count {
                let alpha = gen_index(rng, cfg.n, cfg.index_bound, false);
                let c = loop {
                    let c = gen_coeff(rng);
                    if c.norm() > 0.1 {
                        break c;
                    }
                };
                let u = MatrixElement::scalar(TorusElement::monomial(alpha.clone(), c));
                let u_inv = try_invert(&u, &ctx.point)?;
                let ch = ch_invertible(&u, &u_inv, 1, &ctx.point)?;
                for j in 1..=cfg.n {
                    let got = pairing(&tau1(j), &ch, &ctx.point)?;
                    let expect = C64::new(alpha.component(j) as f64, 0.0);
                    worst = worst.max((got - expect).norm());
                }
            }
            Ok((worst, count))
        }),
        identity("winding_constancy_fd", 1e-5, |rng, ctx| {
            let cfg = &ctx.cfg;
            let mut u = gen_unitriangular(rng, cfg.n, cfg.matrix_size, cfg.index_bound);
            // monomial-unit diagonal with nontrivial winding
            for i in 0..cfg.matrix_size {
                let axis = 1 + (i % cfg.n);
                u.set(
                    i,
                    i,
                    TorusElement::generator(cfg.n, axis)?,
                );
            }
            let mut worst = 0.0f64;
            let grid: Vec<f64> = (0..cfg.grid_points)
                .map(|i| i as f64 / (cfg.grid_points - 1) as f64)
                .collect();
            for j in 1..=cfg.n {
                let phi = tau1(j);
                let mut values = Vec::with_capacity(grid.len());
                for &t in &grid {
                    let p = ctx.point.at(t);
                    let u_inv = try_invert(&u, &p)?;
                    let ch = ch_invertible(&u, &u_inv, 1, &p)?;
                    values.push(pairing(&phi, &ch, &p)?);
                }
                let section = ParamSection::new(grid.clone(), values)?;
                let deriv = fd_derivative(&section)?;
                for v in deriv.values() {
                    worst = worst.max(v.norm());
                }
            }
            Ok((worst, cfg.grid_points * cfg.n))
        }),
        identity("pairing_adjunction", 1e-10, |rng, ctx| {
            let cfg = &ctx.cfg;
            let ds = ctx.derivations();
            // a non-cyclic normalized degree-1 functional
            let weight = MultiIndex::unit(cfg.n, 1)?;
            let phi = Functional::from_fn(1, "probe", false, move |args, p| {
                let d = delta(1, &args[1])?;
                let prod = mul(&args[0], &d, p)?;
                let w = TorusElement::monomial(weight.clone(), C64::new(1.0, 0.0));
                Ok(trace(&mul(&prod, &w, p)?))
            });
            let functionals = vec![phi, gamma(&[ds[0].clone()])?];
            let mut worst = 0.0f64;
            let per = cfg.samples.div_ceil(functionals.len()).max(1);
            for phi in &functionals {
                let b_phi = dual_b(phi);
                let big_b_phi = dual_big_b(phi)?;
                for _ in 0..per {
                    let up = gen_chain(rng, cfg.n, phi.degree() + 1, cfg.support, cfg.index_bound);
                    let lhs = pair_chain(&b_phi, &up, &ctx.point)?;
                    let rhs = pair_chain(phi, &boundary_b(&up, &ctx.point)?, &ctx.point)?;
                    worst = worst.max((lhs - rhs).norm() / chain_scale(&up));
                    if phi.degree() >= 1 {
                        let down =
                            gen_chain(rng, cfg.n, phi.degree() - 1, cfg.support, cfg.index_bound);
                        let lhs = pair_chain(&big_b_phi, &down, &ctx.point)?;
                        let rhs = pair_chain(phi, &connes_b(&down), &ctx.point)?;
                        worst = worst.max((lhs - rhs).norm() / chain_scale(&down));
                    }
                }
            }
            Ok((worst, per * functionals.len()))
        }),
        identity("gamma_cyclicity", 1e-10, |rng, ctx| {
            let cfg = &ctx.cfg;
            let ds = ctx.derivations();
            let functionals = vec![
                gamma(&[ds[0].clone()])?,
                gamma(&[ds[0].clone(), ds[ds.len() - 1].clone()])?,
            ];
            let mut worst = 0.0f64;
            let per = cfg.samples.div_ceil(functionals.len()).max(1);
            for phi in &functionals {
                let m = phi.degree();
                for _ in 0..per {
                    let args: Vec<TorusElement> = (0..=m)
                        .map(|_| gen_element(rng, cfg.n, cfg.support.min(3), cfg.index_bound))
                        .collect();
                    let direct = phi.evaluate(&args, &ctx.point)?;
                    let mut rotated = vec![args[m].clone()];
                    rotated.extend_from_slice(&args[..m]);
                    let rotated_value = phi.evaluate(&rotated, &ctx.point)?;
                    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                    let refs: Vec<&TorusElement> = args.iter().collect();
                    worst = worst
                        .max((rotated_value - direct * sign).norm() / element_scale(&refs));
                }
            }
            Ok((worst, per * functionals.len()))
        }),
        identity("gamma_invariance", 1e-10, |rng, ctx| {
            let cfg = &ctx.cfg;
            let ds = ctx.derivations();
            let functionals = vec![
                Functional::tau(),
                gamma(&[ds[0].clone()])?,
                gamma(&[ds[0].clone(), ds[ds.len() - 1].clone()])?,
            ];
            let mut worst = 0.0f64;
            let per = cfg.samples.div_ceil(functionals.len() * cfg.n).max(1);
            for phi in &functionals {
                for j in 1..=cfg.n {
                    let d = MultiDiff::derivation(j);
                    for _ in 0..per {
                        let c = gen_chain(rng, cfg.n, phi.degree(), cfg.support, cfg.index_bound);
                        let moved = crate::calculus::lie_derivative(&d, &c, &ctx.point)?;
                        let v = pair_chain(phi, &moved, &ctx.point)?;
                        worst = worst.max(v.norm() / chain_scale(&c));
                    }
                }
            }
            Ok((worst, per * functionals.len() * cfg.n))
        }),
        identity("gamma_cocycle", 1e-10, |rng, ctx| {
            let cfg = &ctx.cfg;
            let ds = ctx.derivations();
            let functionals = vec![
                gamma(&[ds[0].clone()])?,
                gamma(&[ds[0].clone(), ds[ds.len() - 1].clone()])?,
            ];
            let mut worst = 0.0f64;
            let per = cfg.samples.div_ceil(functionals.len()).max(1);
            for phi in &functionals {
                let b_phi = dual_b(phi);
                let big_b_phi = dual_big_b(phi)?;
                for _ in 0..per {
                    let up: Vec<TorusElement> = (0..=phi.degree() + 1)
                        .map(|_| gen_element(rng, cfg.n, cfg.support.min(3), cfg.index_bound))
                        .collect();
                    let refs: Vec<&TorusElement> = up.iter().collect();
                    worst = worst
                        .max(b_phi.evaluate(&up, &ctx.point)?.norm() / element_scale(&refs));
                    let down: Vec<TorusElement> = (0..phi.degree())
                        .map(|_| gen_element(rng, cfg.n, cfg.support.min(3), cfg.index_bound))
                        .collect();
                    let refs: Vec<&TorusElement> = down.iter().collect();
                    worst = worst.max(
                        big_b_phi.evaluate(&down, &ctx.point)?.norm() / element_scale(&refs),
                    );
                }
            }
            Ok((worst, per * functionals.len()))
        }),
        identity("psi_lemma", 1e-10, |rng, ctx| {
            let cfg = &ctx.cfg;
            let ds = ctx.derivations();
            // derivation tuples of length <= 3 (with repeats allowed)
            let tuples: Vec<Vec<MultiDiff>> = vec![
                vec![ds[0].clone()],
                vec![ds[0].clone(), ds[ds.len() - 1].clone()],
                vec![ds[0].clone(), ds[ds.len() - 1].clone(), ds[0].clone()],
            ];
            let mut worst = 0.0f64;
            let per = cfg.samples.div_ceil(tuples.len()).max(1);
            for xs in &tuples {
                let n = xs.len();
                let psi = psi_correction(xs)?;
                let b_psi = dual_b(&psi);
                for _ in 0..per {
                    let args: Vec<TorusElement> = (0..=n)
                        .map(|_| {
                            TorusElement::monomial(
                                gen_index(rng, cfg.n, cfg.index_bound, false),
                                gen_coeff(rng),
                            )
                        })
                        .collect();
                    // left side: tau(a_0 X_1(a_1) ... X_n(a_n))
                    let mut prod = args[0].clone();
                    for (i, x) in xs.iter().enumerate() {
                        let derived = x.evaluate(&[args[i + 1].clone()], &ctx.point)?;
                        prod = mul(&prod, &derived, &ctx.point)?;
                    }
                    let lhs = trace(&prod);
                    // cyclic average
                    let mut avg = C64::new(0.0, 0.0);
                    for j in 1..=n {
                        let mut prod = args[0].clone();
                        for slot in 0..n {
                            let which = (j - 1 + slot) % n;
                            let derived =
                                xs[which].evaluate(&[args[slot + 1].clone()], &ctx.point)?;
                            prod = mul(&prod, &derived, &ctx.point)?;
                        }
                        let sign = if ((j - 1) * (n + 1)) % 2 == 0 { 1.0 } else { -1.0 };
                        avg += trace(&prod) * sign;
                    }
                    avg /= n as f64;
                    let correction = b_psi.evaluate(&args, &ctx.point)?;
                    let refs: Vec<&TorusElement> = args.iter().collect();
                    worst =
                        worst.max((lhs - avg - correction).norm() / element_scale(&refs));
                }
            }
            Ok((worst, per * tuples.len()))
        }),
        identity("psi_big_b", 1e-10, |rng, ctx| {
            let cfg = &ctx.cfg;
            let ds = ctx.derivations();
            let tuples: Vec<Vec<MultiDiff>> = vec![
                vec![ds[0].clone(), ds[ds.len() - 1].clone()],
                vec![ds[ds.len() - 1].clone(), ds[0].clone(), ds[0].clone()],
            ];
            let mut worst = 0.0f64;
            let per = cfg.samples.div_ceil(tuples.len()).max(1);
            for xs in &tuples {
                let psi = psi_correction(xs)?;
                if psi.degree() == 0 {
                    continue;
                }
                let b_psi = dual_big_b(&psi)?;
                for _ in 0..per {
                    let args: Vec<TorusElement> = (0..psi.degree())
                        .map(|_| gen_element(rng, cfg.n, cfg.support.min(3), cfg.index_bound))
                        .collect();
                    let refs: Vec<&TorusElement> = args.iter().collect();
                    worst = worst
                        .max(b_psi.evaluate(&args, &ctx.point)?.norm() / element_scale(&refs));
                }
            }
            Ok((worst, per * tuples.len()))
        }),
        identity("contract_dual_recursion", 1e-10, |rng, ctx| {
            let cfg = &ctx.cfg;
            let ds = ctx.derivations();
            // (Z, [X_1..X_k]) with k <= 2
            let cases: Vec<(MultiDiff, Vec<MultiDiff>)> = vec![
                (ds[ds.len() - 1].clone(), vec![ds[0].clone()]),
                (ds[0].clone(), vec![ds[0].clone(), ds[ds.len() - 1].clone()]),
            ];
            let mut worst = 0.0f64;
            let per = cfg.samples.div_ceil(cases.len()).max(1);
            for (z, xs) in &cases {
                let k = xs.len();
                let phi = gamma(xs)?;
                let dc = contract_dual(z, &phi)?;
                let mut extended = vec![z.clone()];
                extended.extend(xs.iter().cloned());
                let target = gamma(&extended)?;
                // correction: antisymmetrized psi over the X permutations with Z fixed first
                let perms: Vec<(Vec<usize>, f64)> = permutations_with_signs(k);
                let mut correction: Option<Functional> = None;
                for (perm, sign) in &perms {
                    let mut seq = vec![z.clone()];
                    for &i in perm {
                        seq.push(xs[i].clone());
                    }
                    let psi = psi_correction(&seq)?
                        .scale(C64::new(sign / factorial_f(k), 0.0));
                    correction = Some(match correction {
                        None => psi,
                        Some(acc) => acc.add(&psi),
                    });
                }
                let b_corr = dual_b(&correction.expect("k >= 1"));
                for _ in 0..per {
                    let args: Vec<TorusElement> = (0..=k + 1)
                        .map(|_| {
                            TorusElement::monomial(
                                gen_index(rng, cfg.n, cfg.index_bound, false),
                                gen_coeff(rng),
                            )
                        })
                        .collect();
                    let lhs = dc.raised.evaluate(&args, &ctx.point)?;
                    let rhs = target.evaluate(&args, &ctx.point)?
                        + b_corr.evaluate(&args, &ctx.point)?;
                    let refs: Vec<&TorusElement> = args.iter().collect();
                    worst = worst.max((lhs - rhs).norm() / element_scale(&refs));
                }
            }
            Ok((worst, per * cases.len()))
        }),
        identity("derivative_pairing_idempotent", 1e-5, |rng, ctx| {
            let cfg = &ctx.cfg;
            let conjugator = gen_unitriangular(rng, cfg.n, cfg.matrix_size, 1);
            let grid: Vec<f64> = (0..cfg.grid_points)
                .map(|i| i as f64 / (cfg.grid_points - 1) as f64)
                .collect();
            let projector_at = |t: f64| -> MatrixElement {
                conjugate_projector(&conjugator, &ctx.point.at(t))
            };
            let mut worst = 0.0f64;
            // m = 0: d/dt tau(P) = -2 pi i * 2 * sum_{j>k} theta_jk gamma(d_j ^ d_k)(P,P,P)
            {
                let mut values = Vec::with_capacity(grid.len());
                for &t in &grid {
                    values.push(mat_trace(&projector_at(t)));
                }
                let section = ParamSection::new(grid.clone(), values)?;
                let deriv = fd_derivative(&section)?;
                for (t, d) in deriv.grid().iter().zip(deriv.values()) {
                    let rhs = trace_slope(&projector_at(*t), &ctx.theta, &ctx.point.at(*t))?;
                    worst = worst.max((d - rhs).norm());
                }
            }
            // m = 1 at n = 2: the six-fold wedge term vanishes, so the degree-2
            // evaluation gamma(d_1 ^ d_2)(P,P,P) is constant along the family
            if cfg.n == 2 {
                let mut values = Vec::with_capacity(grid.len());
                for &t in &grid {
                    let proj = projector_at(t);
                    values.push(eval_gamma_on_matrices(
                        &[1, 2],
                        &[proj.clone(), proj.clone(), proj],
                        &ctx.point.at(t),
                    )?);
                }
                let section = ParamSection::new(grid.clone(), values)?;
                let deriv = fd_derivative(&section)?;
                for d in deriv.values() {
                    worst = worst.max(d.norm());
                }
            }
            Ok((worst, 2 * cfg.grid_points))
        }),
        identity("pairing_rank", 0.0, |_rng, ctx| {
            let theta2 = SkewMatrix::two_dim(ctx.theta.entry(2, 1));
            let p2 = DeformationPoint::new(theta2, ctx.cfg.t);
            // even side: {tau, gamma(d1 ^ d2)} against {ch 1, volume cycle}
            let one = MatrixElement::identity(2, 1);
            let ch_one = ch_idempotent(&one, 2, &p2, 1e-12)?;
            let vol = volume_cycle(&p2)?;
            let mut vol_pc = PeriodicChain::new(2, Parity::Even, 2);
            vol_pc.set_component(vol.chain().clone())?;
            let tau = Functional::tau();
            let g12 = gamma(&[MultiDiff::derivation(1), MultiDiff::derivation(2)])?;
            let even = [
                [pairing(&tau, &ch_one, &p2)?, pairing(&tau, &vol_pc, &p2)?],
                [pairing(&g12, &ch_one, &p2)?, pairing(&g12, &vol_pc, &p2)?],
            ];
            // odd side: {gamma(d1), gamma(d2)} against {ch u1, ch u2}
            let u1 = MatrixElement::scalar(TorusElement::generator(2, 1)?);
            let u2 = MatrixElement::scalar(TorusElement::generator(2, 2)?);
            let ch_u1 = ch_invertible(&u1, &try_invert(&u1, &p2)?, 1, &p2)?;
            let ch_u2 = ch_invertible(&u2, &try_invert(&u2, &p2)?, 1, &p2)?;
            let g1 = tau1(1);
            let g2 = tau1(2);
            let odd = [
                [pairing(&g1, &ch_u1, &p2)?, pairing(&g1, &ch_u2, &p2)?],
                [pairing(&g2, &ch_u1, &p2)?, pairing(&g2, &ch_u2, &p2)?],
            ];
            let sigma_even = smallest_singular_value_2x2(&even);
            let sigma_odd = smallest_singular_value_2x2(&odd);
            let floor = 1e-6;
            let residual = (floor - sigma_even).max(0.0) + (floor - sigma_odd).max(0.0);
            Ok((residual, 2))
        }),
    ]
}

fn permutations_with_signs(k: usize) -> Vec<(Vec<usize>, f64)> {
    use itertools::Itertools;
    (0..k)
        .permutations(k)
        .map(|perm| {
            let mut inv = 0;
            for i in 0..perm.len() {
                for j in i + 1..perm.len() {
                    if perm[i] > perm[j] {
                        inv += 1;
                    }
                }
            }
            let sign = if inv % 2 == 0 { 1.0 } else { -1.0 };
            (perm, sign)
        })
        .collect()
}

fn factorial_f(k: usize) -> f64 {
    (1..=k).map(|v| v as f64).product()
}

/// Smallest singular value of a 2x2 complex matrix, in closed form.
fn smallest_singular_value_2x2(m: &[[C64; 2]; 2]) -> f64 {
    let frob: f64 = m.iter().flatten().map(|v| v.norm_sqr()).sum();
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = (frob * frob - 4.0 * det.norm_sqr()).max(0.0).sqrt();
    ((frob - disc) / 2.0).max(0.0).sqrt()
}

// ------------------------------------------------------------------
// chern suite
// ------------------------------------------------------------------

fn chern_suite<'a>() -> Vec<Identity<'a>> {
    vec![
        identity("chern_closure_idempotent", 1e-9, |rng, ctx| {
            let cfg = &ctx.cfg;
            let mut worst = 0.0f64;
            let samples = cfg.samples.min(8);
            for _ in 0..samples {
                let proj =
                    gen_conjugated_idempotent(rng, &ctx.point, cfg.matrix_size, cfg.index_bound)?;
                let tol = 1e-10 * (1.0 + proj.norm_inf());
                let ch = ch_idempotent(&proj, cfg.cap, &ctx.point, tol)?;
                let mut m = 0usize;
                while m + 2 <= cfg.cap {
                    let lower = ch
                        .component(m)
                        .cloned()
                        .unwrap_or_else(|| Chain::zero(cfg.n, m));
                    let upper = ch
                        .component(m + 2)
                        .cloned()
                        .unwrap_or_else(|| Chain::zero(cfg.n, m + 2));
                    let lhs = boundary_b(&upper, &ctx.point)?;
                    let rhs = connes_b(&lower).scale(C64::new(-1.0, 0.0));
                    let scale = chain_scale(&upper).max(chain_scale(&lower));
                    worst = worst.max(lhs.sub(&rhs).norm_inf() / scale);
                    m += 2;
                }
            }
            Ok((worst, samples))
        }),
        identity("chern_closure_invertible", 1e-9, |rng, ctx| {
            let cfg = &ctx.cfg;
            let mut worst = 0.0f64;
            let samples = cfg.samples.min(8);
            for _ in 0..samples {
                let mut u = gen_unitriangular(rng, cfg.n, cfg.matrix_size, cfg.index_bound);
                for i in 0..cfg.matrix_size {
                    if rng.random_range(0..2) == 1 {
                        u.set(i, i, gen_monomial_unit(rng, cfg.n, cfg.index_bound));
                    }
                }
                let u_inv = try_invert(&u, &ctx.point)?;
                let ch = ch_invertible(&u, &u_inv, cfg.cap, &ctx.point)?;
                let mut m = 1usize;
                while m + 2 <= cfg.cap {
                    let lower = ch
                        .component(m)
                        .cloned()
                        .unwrap_or_else(|| Chain::zero(cfg.n, m));
                    let upper = ch
                        .component(m + 2)
                        .cloned()
                        .unwrap_or_else(|| Chain::zero(cfg.n, m + 2));
                    let lhs = boundary_b(&upper, &ctx.point)?;
                    let rhs = connes_b(&lower).scale(C64::new(-1.0, 0.0));
                    let scale = chain_scale(&upper).max(chain_scale(&lower));
                    worst = worst.max(lhs.sub(&rhs).norm_inf() / scale);
                    m += 2;
                }
            }
            Ok((worst, samples))
        }),
        identity("trace_chain_map_b", 1e-10, |rng, ctx| {
            let cfg = &ctx.cfg;
            let size = cfg.matrix_size.min(3);
            let mut worst = 0.0f64;
            let samples = cfg.samples.min(30);
            for _ in 0..samples {
                let degree = rng.random_range(1..=3usize);
                let factors: Vec<MatrixElement> = (0..=degree)
                    .map(|_| gen_matrix(rng, cfg.n, size, 2, cfg.index_bound))
                    .collect();
                let traced = generalized_trace(&factors)?;
                let lhs = boundary_b(&traced, &ctx.point)?;
                // matrix-level boundary, then trace
                let mut rhs = Chain::zero(cfg.n, degree - 1);
                for j in 0..degree {
                    let mut tuple: Vec<MatrixElement> = Vec::with_capacity(degree);
                    tuple.extend_from_slice(&factors[..j]);
                    tuple.push(mat_mul(&factors[j], &factors[j + 1], &ctx.point)?);
                    tuple.extend_from_slice(&factors[j + 2..]);
                    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                    rhs = rhs.add(&generalized_trace(&tuple)?.scale(C64::new(sign, 0.0)));
                }
                let mut wrap: Vec<MatrixElement> = Vec::with_capacity(degree);
                wrap.push(mat_mul(&factors[degree], &factors[0], &ctx.point)?);
                wrap.extend_from_slice(&factors[1..degree]);
                let sign = if degree % 2 == 0 { 1.0 } else { -1.0 };
                rhs = rhs.add(&generalized_trace(&wrap)?.scale(C64::new(sign, 0.0)));
                let scale = chain_scale(&traced).max(1.0);
                worst = worst.max(lhs.sub(&rhs).norm_inf() / scale);
            }
            Ok((worst, samples))
        }),
        identity("trace_chain_map_big_b", 1e-10, |rng, ctx| {
            let cfg = &ctx.cfg;
            let size = cfg.matrix_size.min(3);
            let mut worst = 0.0f64;
            let samples = cfg.samples.min(30);
            for _ in 0..samples {
                let degree = rng.random_range(0..=3usize);
                let factors: Vec<MatrixElement> = (0..=degree)
                    .map(|_| gen_matrix(rng, cfg.n, size, 2, cfg.index_bound))
                    .collect();
                let traced = generalized_trace(&factors)?;
                let lhs = connes_b(&traced);
                let identity_mat = MatrixElement::identity(cfg.n, size);
                let mut rhs = Chain::zero(cfg.n, degree + 1);
                for j in 0..=degree {
                    let mut tuple: Vec<MatrixElement> = Vec::with_capacity(degree + 2);
                    tuple.push(identity_mat.clone());
                    tuple.extend_from_slice(&factors[j..]);
                    tuple.extend_from_slice(&factors[..j]);
                    let sign = if (j * degree) % 2 == 0 { 1.0 } else { -1.0 };
                    rhs = rhs.add(&generalized_trace(&tuple)?.scale(C64::new(sign, 0.0)));
                }
                let scale = chain_scale(&traced).max(1.0);
                worst = worst.max(lhs.sub(&rhs).norm_inf() / scale);
            }
            Ok((worst, samples))
        }),
        identity("trace_pairing_affine", 1e-6, |rng, ctx| {
            let cfg = &ctx.cfg;
            let tau = Functional::tau();
            let mut worst = 0.0f64;
            let samples = cfg.samples.min(5);
            let grid: Vec<f64> = (0..cfg.grid_points)
                .map(|i| i as f64 / (cfg.grid_points - 1) as f64)
                .collect();
            for _ in 0..samples {
                let v = gen_unitriangular(rng, cfg.n, cfg.matrix_size, cfg.index_bound);
                let mut values = Vec::with_capacity(grid.len());
                for &t in &grid {
                    let p = ctx.point.at(t);
                    let proj = conjugate_projector(&v, &p);
                    let ch = ch_idempotent(&proj, 0, &p, 1e-9 * (1.0 + proj.norm_inf()))?;
                    values.push(pairing(&tau, &ch, &p)?);
                }
                // least-squares affine fit c + d t
                let (c_fit, d_fit) = affine_fit(&grid, &values);
                for (t, v_t) in grid.iter().zip(&values) {
                    let fit = c_fit + d_fit * *t;
                    worst = worst.max((v_t - fit).norm());
                }
                // the slope matches the weighted two-wedge pairing pointwise
                // (tau_2 scaled by theta_21 at n = 2)
                for &t in &grid {
                    let p = ctx.point.at(t);
                    let proj = conjugate_projector(&v, &p);
                    let slope = trace_slope(&proj, &ctx.theta, &p)?;
                    worst = worst.max((d_fit - slope).norm());
                }
            }
            Ok((worst, samples))
        }),
        identity("tau2_matches_derivative", 1e-5, |rng, ctx| {
            let cfg = &ctx.cfg;
            let tau = Functional::tau();
            let mut worst = 0.0f64;
            let samples = cfg.samples.min(5);
            let grid: Vec<f64> = (0..cfg.grid_points)
                .map(|i| i as f64 / (cfg.grid_points - 1) as f64)
                .collect();
            for _ in 0..samples {
                let v = gen_unitriangular(rng, cfg.n, cfg.matrix_size, cfg.index_bound);
                let mut values = Vec::with_capacity(grid.len());
                for &t in &grid {
                    let p = ctx.point.at(t);
                    let proj = conjugate_projector(&v, &p);
                    let ch = ch_idempotent(&proj, 0, &p, 1e-9 * (1.0 + proj.norm_inf()))?;
                    values.push(pairing(&tau, &ch, &p)?);
                }
                let section = ParamSection::new(grid.clone(), values)?;
                let deriv = fd_derivative(&section)?;
                for (t, d) in deriv.grid().iter().zip(deriv.values()) {
                    let p = ctx.point.at(*t);
                    let proj = conjugate_projector(&v, &p);
                    let slope = trace_slope(&proj, &ctx.theta, &p)?;
                    worst = worst.max((d - slope).norm());
                }
            }
            Ok((worst, samples))
        }),
    ]
}

fn gen_matrix(
    rng: &mut ChaCha8Rng,
    n: usize,
    size: usize,
    support: usize,
    bound: i64,
) -> MatrixElement {
    let mut m = MatrixElement::zero(n, size);
    for i in 0..size {
        for j in 0..size {
            if rng.random_range(0..2) == 1 {
                m.set(i, j, gen_element(rng, n, support, bound));
            }
        }
    }
    m
}

fn conjugate_projector(v: &MatrixElement, p: &DeformationPoint) -> MatrixElement {
    let v_inv = try_invert(v, p).expect("unitriangular conjugator");
    let mut e11 = MatrixElement::zero(p.dim(), v.size());
    e11.set(0, 0, TorusElement::one(p.dim()));
    mat_mul(&mat_mul(v, &e11, p).expect("sizes agree"), &v_inv, p).expect("sizes agree")
}

/// `d/dt tau(P) = -4 pi i sum_{j>k} theta_jk gamma(d_j ^ d_k)(P,P,P)`; reduces
/// to `theta_21 tau_2(P,P,P)` at `n = 2`.
fn trace_slope(proj: &MatrixElement, theta: &SkewMatrix, p: &DeformationPoint) -> Result<C64> {
    let mut acc = C64::new(0.0, 0.0);
    for j in 2..=theta.dim() {
        for k in 1..j {
            let theta_jk = theta.entry(j, k);
            if theta_jk == 0.0 {
                continue;
            }
            acc += eval_gamma_on_matrices(&[j, k], &[proj.clone(), proj.clone(), proj.clone()], p)?
                * theta_jk;
        }
    }
    Ok(acc * C64::new(0.0, -4.0 * std::f64::consts::PI))
}

fn affine_fit(grid: &[f64], values: &[C64]) -> (C64, C64) {
    let n = grid.len() as f64;
    let sum_t: f64 = grid.iter().sum();
    let sum_tt: f64 = grid.iter().map(|t| t * t).sum();
    let sum_v: C64 = values.iter().sum();
    let sum_tv: C64 = grid
        .iter()
        .zip(values)
        .map(|(t, v)| v * *t)
        .sum();
    let det = n * sum_tt - sum_t * sum_t;
    let d = (sum_tv * n - sum_v * sum_t) / det;
    let c = (sum_v - d * sum_t) / n;
    (c, d)
}

// ------------------------------------------------------------------
// ode suite
// ------------------------------------------------------------------

fn gen_cmatrix(rng: &mut ChaCha8Rng, dim: usize, entry_bound: f64) -> CMatrix {
    let mut m = CMatrix::zero(dim);
    for i in 0..dim {
        for j in 0..dim {
            m.set(
                i,
                j,
                C64::new(
                    rng.random_range(-entry_bound..entry_bound),
                    rng.random_range(-entry_bound..entry_bound),
                ),
            );
        }
    }
    m
}

fn gen_cvector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<C64> {
    (0..dim)
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

fn ode_suite<'a>() -> Vec<Identity<'a>> {
    vec![
        identity("dyson_vs_exponential", 1e-8, |rng, _ctx| {
            let mut worst = 0.0f64;
            let count = 20usize;
            let (t0, t1) = (0.0, 1.6);
            for _ in 0..count {
                // keep the operator norm within |F| (t1-t0) <= 2
                let f = gen_cmatrix(rng, 4, 2.0 / (4.0 * (t1 - t0)));
                let x0 = gen_cvector(rng, 4);
                let family = LinearFamily::constant(f.clone());
                let (got, _) = dyson_transport(&family, &x0, t0, t1, 20, 64)?;
                let expect = matrix_exponential(&f.scale(C64::new(t1 - t0, 0.0))).matvec(&x0);
                worst = worst
                    .max(vec_norm_inf(&vec_sub(&got, &expect)) / (1.0 + vec_norm_inf(&x0)));
            }
            Ok((worst, count))
        }),
        identity("dyson_residual_monotone", 0.0, |rng, _ctx| {
            let mut worst = 0.0f64;
            let count = 5usize;
            for _ in 0..count {
                let f = gen_cmatrix(rng, 4, 0.25);
                let x0 = gen_cvector(rng, 4);
                let family = LinearFamily::constant(f);
                let mut last = f64::INFINITY;
                for order in [2usize, 4, 6, 8, 12, 16, 20] {
                    let (_, residual) = dyson_transport(&family, &x0, 0.0, 1.0, order, 64)?;
                    worst = worst.max((residual - last - 1e-13).max(0.0));
                    last = residual;
                }
            }
            Ok((worst, count))
        }),
        identity("nilpotent_exact", 1e-12, |rng, _ctx| {
            let mut worst = 0.0f64;
            let count = 20usize;
            for _ in 0..count {
                // strictly upper triangular 4x4 is nilpotent
                let mut f = CMatrix::zero(4);
                for i in 0..4 {
                    for j in i + 1..4 {
                        f.set(
                            i,
                            j,
                            C64::new(
                                rng.random_range(-1.0..1.0),
                                rng.random_range(-1.0..1.0),
                            ),
                        );
                    }
                }
                let x0 = gen_cvector(rng, 4);
                let (t0, t1) = (0.3, 1.7);
                let got = nilpotent_transport(&f, &x0, t0, t1)?;
                // reference: plain dense Taylor sum, truncated at the dimension
                let dt = t1 - t0;
                let mut expect = x0.clone();
                let mut term = x0.clone();
                for m in 1..4 {
                    term = f.matvec(&term);
                    let coeff = C64::new(dt.powi(m) / factorial_f(m as usize), 0.0);
                    for (e, v) in expect.iter_mut().zip(&term) {
                        *e += coeff * v;
                    }
                }
                worst = worst
                    .max(vec_norm_inf(&vec_sub(&got, &expect)) / (1.0 + vec_norm_inf(&x0)));
            }
            Ok((worst, count))
        }),
        identity("nilpotent_vs_dyson", 1e-10, |rng, _ctx| {
            let mut worst = 0.0f64;
            let count = 10usize;
            for _ in 0..count {
                let mut f = CMatrix::zero(4);
                for i in 0..4 {
                    for j in i + 1..4 {
                        f.set(
                            i,
                            j,
                            C64::new(
                                rng.random_range(-0.5..0.5),
                                rng.random_range(-0.5..0.5),
                            ),
                        );
                    }
                }
                let x0 = gen_cvector(rng, 4);
                let (t0, t1) = (0.0, 1.3);
                let exact = nilpotent_transport(&f, &x0, t0, t1)?;
                let family = LinearFamily::constant(f);
                let (dyson, _) = dyson_transport(&family, &x0, t0, t1, 12, 64)?;
                worst = worst
                    .max(vec_norm_inf(&vec_sub(&exact, &dyson)) / (1.0 + vec_norm_inf(&x0)));
            }
            Ok((worst, count))
        }),
        identity("fd_quadratic", 1e-6, |_rng, _ctx| {
            let s = ParamSection::sample(0.0, 0.02, 21, |t| C64::new(t * t, 0.0))?;
            let d = fd_derivative(&s)?;
            let mut worst = 0.0f64;
            for (t, v) in d.grid().iter().zip(d.values()) {
                worst = worst.max((v - C64::new(2.0 * t, 0.0)).norm());
            }
            Ok((worst, 21))
        }),
        identity("fd_exponential", 1e-5, |_rng, _ctx| {
            let theta = 2.0;
            let omega = 2.0 * std::f64::consts::PI * theta;
            let h = 1e-4;
            let s = ParamSection::sample(0.0, 200.0 * h, 201, |t| C64::new(0.0, omega * t).exp())?;
            let d = fd_derivative(&s)?;
            let mut worst = 0.0f64;
            for (v, orig) in d.values().iter().zip(s.values()) {
                worst = worst.max((v - C64::new(0.0, omega) * orig).norm());
            }
            Ok((worst, 201))
        }),
    ]
}
