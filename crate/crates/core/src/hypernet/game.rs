use serde::{Deserialize, Serialize};

use crate::cubic::{CubicMatrix, Dims};
use crate::dense::DenseMatrix;
use crate::error::{Error, Result};
use crate::products::{t_stp, ProductKind};
use crate::scalar::{Modular, Ring};
use crate::systems::{simulate_discrete, InputMap, InputSignal, InputValue, SystemSpec, Time, Trajectory};

use super::hypergraph::Hypergraph;
use super::snf::solve_congruence;

/// Supply chain of manufacturers → wholesalers → markets whose joint
/// profiles live in `Z_modulus`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameConfig {
    pub n_manufacturers: usize,
    pub n_wholesalers: usize,
    pub n_markets: usize,
    pub modulus: u64,
    /// Strategy counts of a manufacturer, a wholesaler and a market.
    pub strategy_alphabet: [usize; 3],
}

impl Default for GameConfig {
    fn default() -> Self {
        GameConfig { n_manufacturers: 2, n_wholesalers: 3, n_markets: 4, modulus: 12, strategy_alphabet: [2, 3, 2] }
    }
}

impl GameConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_manufacturers == 0 || self.n_wholesalers == 0 || self.n_markets == 0 {
            return Err(Error::InvalidValue("every player class needs at least one player".into()));
        }
        if self.strategy_alphabet.contains(&0) {
            return Err(Error::InvalidValue("strategy alphabets must be nonempty".into()));
        }
        let product: usize = self.strategy_alphabet.iter().product();
        if product as u64 != self.modulus {
            return Err(Error::InvalidValue(format!(
                "modulus {} must equal the number of joint strategies {product}",
                self.modulus
            )));
        }
        Modular::new(self.modulus).map(|_| ())
    }

    pub fn ring(&self) -> Result<Modular> {
        self.validate()?;
        Modular::new(self.modulus)
    }

    pub fn dims(&self) -> Dims {
        Dims { m: self.n_manufacturers, n: self.n_wholesalers, s: self.n_markets }
    }

    pub fn n_chains(&self) -> usize {
        self.n_manufacturers * self.n_wholesalers * self.n_markets
    }

    /// 0-based chain index of manufacturer `i`, wholesaler `j`, market `k`:
    /// the manufacturer varies fastest, then the market, then the wholesaler.
    pub fn chain_index(&self, i: usize, j: usize, k: usize) -> usize {
        (j * self.n_markets + k) * self.n_manufacturers + i
    }

    pub fn check_profile(&self, w: &CubicMatrix<Modular>) -> Result<()> {
        self.ring()?.check_same(&w.ring(), "profile")?;
        if w.dims() != self.dims() {
            return Err(Error::shape("profile", format!("profile is {}, config needs {}", w.dims(), self.dims())));
        }
        Ok(())
    }
}

/// The player hypergraph (one edge per chain) and its dual (one vertex per
/// chain, one edge per player), both built directly from the chain index.
pub fn build_supply_chain(config: &GameConfig) -> Result<(Hypergraph, Hypergraph)> {
    config.validate()?;
    let (nx, ny, nz) = (config.n_manufacturers, config.n_wholesalers, config.n_markets);
    let players: Vec<String> = (1..=nx)
        .map(|i| format!("x{i}"))
        .chain((1..=ny).map(|j| format!("y{j}")))
        .chain((1..=nz).map(|k| format!("z{k}")))
        .collect();
    let mut chains = vec![Default::default(); config.n_chains()];
    let mut membership = vec![std::collections::BTreeSet::new(); players.len()];
    for i in 0..nx {
        for j in 0..ny {
            for k in 0..nz {
                let w = config.chain_index(i, j, k);
                chains[w] = [i, nx + j, nx + ny + k].into_iter().collect();
                for p in [i, nx + j, nx + ny + k] {
                    membership[p].insert(w);
                }
            }
        }
    }
    let chain_names: Vec<String> = (1..=config.n_chains()).map(|w| format!("w{w}")).collect();
    let graph = Hypergraph { vertex_names: players, edges: chains, edge_names: chain_names.clone() };
    let dual = Hypergraph {
        vertex_names: chain_names,
        edges: membership,
        edge_names: (1..=graph.n_vertices()).map(|p| format!("e{p}")).collect(),
    };
    Ok((graph, dual))
}

/// Mixed-radix strategy code: `(x·|S_y| + y)·|S_z| + z`, i.e. `6x + 2y + z`
/// for the default alphabets.
pub fn encode_profile(config: &GameConfig, x: usize, y: usize, z: usize) -> Result<u64> {
    config.validate()?;
    let [ax, ay, az] = config.strategy_alphabet;
    for (what, v, size) in [("manufacturer", x, ax), ("wholesaler", y, ay), ("market", z, az)] {
        if v >= size {
            return Err(Error::InvalidValue(format!("{what} strategy {v} outside alphabet of size {size}")));
        }
    }
    Ok(((x * ay + y) * az + z) as u64)
}

pub fn decode_profile(config: &GameConfig, w: u64) -> Result<(usize, usize, usize)> {
    config.validate()?;
    if w >= config.modulus {
        return Err(Error::InvalidValue(format!("profile code {w} outside Z_{}", config.modulus)));
    }
    let [_, ay, az] = config.strategy_alphabet;
    let w = w as usize;
    Ok((w / (ay * az), (w / az) % ay, w % az))
}

/// Index of a strategy letter: `H, L` for two strategies, `H, M, L` for three.
pub fn strategy_index(alphabet_size: usize, symbol: char) -> Result<usize> {
    let letters: &[char] = match alphabet_size {
        2 => &['H', 'L'],
        3 => &['H', 'M', 'L'],
        n => return Err(Error::Unsupported(format!("no letters for an alphabet of size {n}"))),
    };
    letters
        .iter()
        .position(|&c| c == symbol.to_ascii_uppercase())
        .ok_or_else(|| Error::InvalidValue(format!("strategy {symbol:?} not in {letters:?}")))
}

/// `W(t+1) = A ⋉_* W(t)`.
pub fn evolve(a: &CubicMatrix<Modular>, w0: &CubicMatrix<Modular>, steps: usize) -> Result<Trajectory<Modular>> {
    let spec = SystemSpec::autonomous(ProductKind::TStp, Time::Discrete, a.clone(), w0.dims());
    simulate_discrete(&spec, w0, &InputSignal::None, steps)
}

/// `W(t+1) = A ⋉_* W(t) + B ⋉_* u(t)` with one input profile per step.
pub fn evolve_controlled(
    a: &CubicMatrix<Modular>,
    b: &CubicMatrix<Modular>,
    u: &[CubicMatrix<Modular>],
    w0: &CubicMatrix<Modular>,
    steps: usize,
) -> Result<Trajectory<Modular>> {
    let input_dims = u.first().map(CubicMatrix::dims).ok_or_else(|| Error::shape("evolve_controlled", "no inputs"))?;
    let spec = SystemSpec {
        kind: ProductKind::TStp,
        time: Time::Discrete,
        a: a.clone(),
        input: InputMap::Operator { b: b.clone(), input_dims },
        c: None,
        state_dims: w0.dims(),
    };
    let samples = InputSignal::Samples(u.iter().cloned().map(InputValue::Cubic).collect());
    simulate_discrete(&spec, w0, &samples, steps)
}

/// State feedback `u(t) = F ⋉_* W(t)` applied literally at every step.
pub fn evolve_closed_loop(
    a: &CubicMatrix<Modular>,
    b: &CubicMatrix<Modular>,
    f: &CubicMatrix<Modular>,
    w0: &CubicMatrix<Modular>,
    steps: usize,
) -> Result<Trajectory<Modular>> {
    let mut states = vec![w0.clone()];
    for _ in 0..steps {
        let w = states.last().unwrap();
        let u = t_stp(f, w)?;
        let next = t_stp(a, w)?.add(&t_stp(b, &u)?)?;
        if next.dims() != w0.dims() {
            return Err(Error::shape("evolve_closed_loop", format!("state {} became {}", w0.dims(), next.dims())));
        }
        states.push(next);
    }
    Trajectory::new((0..=steps).map(|k| k as f64).collect(), states, None)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackSolution {
    pub f: CubicMatrix<Modular>,
    pub rank: usize,
    pub invariant_factors: Vec<String>,
}

/// Solves `A + B ⋉_* F ≡ E` for `F` with the dims of `E`.
pub fn synthesize_feedback(
    a: &CubicMatrix<Modular>,
    b: &CubicMatrix<Modular>,
    target: &CubicMatrix<Modular>,
) -> Result<FeedbackSolution> {
    let ring = a.ring();
    ring.check_same(&b.ring(), "synthesize_feedback")?;
    ring.check_same(&target.ring(), "synthesize_feedback")?;
    if a.dims() != target.dims() {
        return Err(Error::shape("synthesize_feedback", format!("A is {}, target is {}", a.dims(), target.dims())));
    }
    let f_dims = target.dims();
    let out = ProductKind::TStp.result_dims(b.dims(), f_dims)?;
    if out != target.dims() {
        return Err(Error::shape("synthesize_feedback", format!("B {} times F {f_dims} gives {out}", b.dims())));
    }
    // column c of L is vec(B ⋉_* e_c)
    let (rows, cols) = (out.len(), f_dims.len());
    let mut l = DenseMatrix::zeros(ring, rows, cols);
    let mut unit = CubicMatrix::zeros(ring, f_dims);
    for c in 0..cols {
        let (k, rest) = (c / f_dims.slice_len(), c % f_dims.slice_len());
        let (i, j) = (rest / f_dims.n, rest % f_dims.n);
        unit.set(i, j, k, ring.one());
        for (r, &v) in t_stp(b, &unit)?.data().iter().enumerate() {
            l.set(r, c, v);
        }
        unit.set(i, j, k, ring.zero());
    }
    let rhs = target.sub(a)?.into_data();
    let sol = solve_congruence(&l, &rhs)?;
    let f = CubicMatrix::new(ring, f_dims, sol.x)?;
    if a.add(&t_stp(b, &f)?)? != *target {
        return Err(Error::Structure("congruence solution failed substitution".into()));
    }
    Ok(FeedbackSolution { f, rank: sol.rank, invariant_factors: sol.invariant_factors })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleReport {
    /// `W_{μ+λ} = W_μ` with `μ` the first repeated index and `λ` minimal.
    Found { preperiod: usize, period: usize },
    Exhausted { steps: usize },
}

/// Brent's cycle detection on `W ↦ A ⋉_* W` starting at `W0`.
pub fn detect_cycle(a: &CubicMatrix<Modular>, w0: &CubicMatrix<Modular>, max_steps: usize) -> Result<CycleReport> {
    let step = |w: &CubicMatrix<Modular>| -> Result<CubicMatrix<Modular>> {
        let next = t_stp(a, w)?;
        if next.dims() != w.dims() {
            return Err(Error::shape("detect_cycle", format!("state {} became {}", w.dims(), next.dims())));
        }
        Ok(next)
    };
    let mut power = 1usize;
    let mut period = 1usize;
    let mut tortoise = w0.clone();
    let mut hare = step(w0)?;
    let mut taken = 1usize;
    while tortoise != hare {
        if taken >= max_steps {
            return Ok(CycleReport::Exhausted { steps: taken });
        }
        if power == period {
            tortoise = hare.clone();
            power *= 2;
            period = 0;
        }
        hare = step(&hare)?;
        period += 1;
        taken += 1;
    }
    let mut tortoise = w0.clone();
    let mut hare = w0.clone();
    for _ in 0..period {
        hare = step(&hare)?;
    }
    let mut preperiod = 0;
    while tortoise != hare {
        tortoise = step(&tortoise)?;
        hare = step(&hare)?;
        preperiod += 1;
    }
    Ok(CycleReport::Found { preperiod, period })
}

/// `W ⋉_* W + A ⋉_* W`.
pub fn nonlinear_step(w: &CubicMatrix<Modular>, a: &CubicMatrix<Modular>) -> Result<CubicMatrix<Modular>> {
    t_stp(w, w)?.add(&t_stp(a, w)?)
}

pub fn check_fixed_point(a: &CubicMatrix<Modular>, w: &CubicMatrix<Modular>) -> Result<bool> {
    Ok(nonlinear_step(w, a)? == *w)
}
