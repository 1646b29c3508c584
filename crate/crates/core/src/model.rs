//! Modulated sinusoidal field network.
//!
//! The network maps a coordinate `x ∈ R^C` to a signal value in `R^D` through
//! `K` layers: a sinusoidal input layer, `K-2` sinusoidal hidden layers whose
//! pre-activations are shifted by a latent-conditioned modulation vector, and
//! a final linear layer. Each sinusoidal layer `k` has its own frequency
//! `omega_k`, linearly spaced from `omega_first` to `omega_last` across depth.
//!
//! With a zero latent the modulation path contributes exactly nothing, so the
//! conditioned network and the bare shared network coincide — the inner-loop
//! optimization of latents relies on this neutral element.

use crate::error::{Error, Result};
use crate::rng::{self, stream};
use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Architecture hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    /// Total layer count, including the linear output layer.
    pub layers: usize,
    /// Hidden width.
    pub hidden_dim: usize,
    /// Latent vector dimension.
    pub latent_dim: usize,
    /// Input coordinate dimension.
    pub coord_dim: usize,
    /// Output channel dimension.
    pub out_dim: usize,
    /// Frequency of the first sinusoidal layer.
    pub omega_first: f64,
    /// Frequency of the last sinusoidal layer.
    pub omega_last: f64,
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        if self.layers < 3 {
            return Err(Error::config(format!(
                "need at least 3 layers (input, hidden, output), got {}",
                self.layers
            )));
        }
        for (name, v) in [
            ("hidden_dim", self.hidden_dim),
            ("latent_dim", self.latent_dim),
            ("coord_dim", self.coord_dim),
            ("out_dim", self.out_dim),
        ] {
            if v < 1 {
                return Err(Error::config(format!("{name} must be >= 1, got {v}")));
            }
        }
        if !(self.omega_first > 0.0) || !(self.omega_last > 0.0) {
            return Err(Error::config(format!(
                "frequencies must be positive, got omega_first={} omega_last={}",
                self.omega_first, self.omega_last
            )));
        }
        Ok(())
    }

    /// Number of modulated hidden layers (`K - 2`).
    pub fn hidden_layers(&self) -> usize {
        self.layers - 2
    }
}

/// Per-layer frequencies for the `K-1` sinusoidal layers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OmegaSchedule {
    values: Vec<f64>,
}

/// Linear frequency schedule over the sinusoidal layers.
///
/// `values[k-1] = omega_first + (k-1) * (omega_last - omega_first) / (K-2)`
/// for `k = 1..K-1`; the endpoints are stored exactly.
pub fn build_omega_schedule(omega_first: f64, omega_last: f64, layers: usize) -> Result<OmegaSchedule> {
    if !(omega_first > 0.0) || !(omega_last > 0.0) {
        return Err(Error::config(format!(
            "frequencies must be positive, got {omega_first} and {omega_last}"
        )));
    }
    if layers < 3 {
        return Err(Error::config(format!("need at least 3 layers, got {layers}")));
    }
    let n = layers - 1;
    let step = (omega_last - omega_first) / (layers - 2) as f64;
    let mut values: Vec<f64> = (0..n).map(|i| omega_first + i as f64 * step).collect();
    values[0] = omega_first;
    values[n - 1] = omega_last;
    if values.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::config(format!(
            "schedule from {omega_first} to {omega_last} leaves the positive range"
        )));
    }
    Ok(OmegaSchedule { values })
}

impl OmegaSchedule {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Frequency of sinusoidal layer `k` (1-based, `1..=K-1`).
    pub fn omega(&self, layer: usize) -> f64 {
        self.values[layer - 1]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Weights and bias of one affine layer, row-major `(out_dim, in_dim)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerParams {
    pub weight: Array2<f64>,
    pub bias: Array1<f64>,
}

impl LayerParams {
    fn param_count(&self) -> usize {
        self.weight.len() + self.bias.len()
    }
}

/// Latent-to-shift map of one hidden layer: `(hidden_dim, latent_dim)`,
/// deliberately bias-free so the zero latent is neutral.
#[derive(Debug, Clone, PartialEq)]
pub struct ModulationMap {
    pub map: Array2<f64>,
}

/// All meta-learned parameters of the shared network.
#[derive(Debug, Clone, PartialEq)]
pub struct SharedParams {
    pub config: ModelConfig,
    pub first: LayerParams,
    pub hidden: Vec<LayerParams>,
    pub output: LayerParams,
    pub modulations: Vec<ModulationMap>,
    pub schedule: OmegaSchedule,
}

/// Signal-specific latent vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Latent {
    pub phi: Array1<f64>,
}

impl Latent {
    pub fn zeros(latent_dim: usize) -> Self {
        Latent { phi: Array1::zeros(latent_dim) }
    }

    pub fn dim(&self) -> usize {
        self.phi.len()
    }

    pub fn is_finite(&self) -> bool {
        self.phi.iter().all(|v| v.is_finite())
    }
}

fn uniform_matrix(rng: &mut rand_chacha::ChaCha8Rng, rows: usize, cols: usize, bound: f64) -> Array2<f64> {
    Array2::from_shape_simple_fn((rows, cols), || rng::uniform_in(rng, -bound, bound))
}

fn uniform_vector(rng: &mut rand_chacha::ChaCha8Rng, len: usize, bound: f64) -> Array1<f64> {
    Array1::from_shape_simple_fn(len, || rng::uniform_in(rng, -bound, bound))
}

/// Sinusoidal-layer init bound `sqrt(6/n) / omega` for input dimension `n`.
pub fn hidden_init_bound(fan_in: usize, omega: f64) -> f64 {
    (6.0 / fan_in as f64).sqrt() / omega
}

/// Initialize shared parameters.
///
/// First layer entries are uniform on `(-1/C, 1/C)`; sinusoidal layer `k`
/// uses the bound `sqrt(6/n)/omega_k`; the output layer reuses the bound of
/// the deepest sinusoidal layer; modulation maps are uniform on
/// `(-1/sqrt(P), 1/sqrt(P))`. Deterministic given `seed`.
pub fn init_shared(config: &ModelConfig, seed: u64) -> Result<SharedParams> {
    config.validate()?;
    let schedule = build_omega_schedule(config.omega_first, config.omega_last, config.layers)?;
    let l = config.hidden_dim;
    let mut rng = rng::derive_rng(seed, &[stream::INIT]);

    let first_bound = 1.0 / config.coord_dim as f64;
    let first = LayerParams {
        weight: uniform_matrix(&mut rng, l, config.coord_dim, first_bound),
        bias: uniform_vector(&mut rng, l, first_bound),
    };

    let mut hidden = Vec::with_capacity(config.hidden_layers());
    for k in 2..config.layers {
        let bound = hidden_init_bound(l, schedule.omega(k));
        hidden.push(LayerParams {
            weight: uniform_matrix(&mut rng, l, l, bound),
            bias: uniform_vector(&mut rng, l, bound),
        });
    }

    let out_bound = hidden_init_bound(l, schedule.omega(config.layers - 1));
    let output = LayerParams {
        weight: uniform_matrix(&mut rng, config.out_dim, l, out_bound),
        bias: uniform_vector(&mut rng, config.out_dim, out_bound),
    };

    let mod_bound = 1.0 / (config.latent_dim as f64).sqrt();
    let modulations = (0..config.hidden_layers())
        .map(|_| ModulationMap { map: uniform_matrix(&mut rng, l, config.latent_dim, mod_bound) })
        .collect();

    Ok(SharedParams { config: *config, first, hidden, output, modulations, schedule })
}

/// Modulation shift `m_k(phi)` of hidden layer `layer` (1-based network
/// index, valid range `2..=K-1`).
pub fn modulate(shared: &SharedParams, latent: &Latent, layer: usize) -> Result<Array1<f64>> {
    if layer < 2 || layer > shared.config.layers - 1 {
        return Err(Error::usage(format!(
            "layer {layer} has no modulation; valid range is 2..={}",
            shared.config.layers - 1
        )));
    }
    if latent.dim() != shared.config.latent_dim {
        return Err(Error::usage(format!(
            "latent dimension {} does not match model latent_dim {}",
            latent.dim(),
            shared.config.latent_dim
        )));
    }
    Ok(shared.modulations[layer - 2].map.dot(&latent.phi))
}

fn check_coords(shared: &SharedParams, coords: &Array2<f64>) -> Result<()> {
    if coords.ncols() != shared.config.coord_dim {
        return Err(Error::usage(format!(
            "coordinate dimension {} does not match model coord_dim {}",
            coords.ncols(),
            shared.config.coord_dim
        )));
    }
    Ok(())
}

fn forward_impl(shared: &SharedParams, modulations: Option<&[Array1<f64>]>, coords: &Array2<f64>) -> Array2<f64> {
    let omega1 = shared.schedule.omega(1);
    let mut h = coords.dot(&shared.first.weight.t()) + &shared.first.bias;
    h.mapv_inplace(|u| (omega1 * u).sin());
    for (i, layer) in shared.hidden.iter().enumerate() {
        let omega = shared.schedule.omega(i + 2);
        let mut u = h.dot(&layer.weight.t()) + &layer.bias;
        if let Some(mods) = modulations {
            u += &mods[i];
        }
        u.mapv_inplace(|v| (omega * v).sin());
        h = u;
    }
    h.dot(&shared.output.weight.t()) + &shared.output.bias
}

/// Evaluate the conditioned network on a batch of coordinates (rows).
pub fn forward(shared: &SharedParams, latent: &Latent, coords: &Array2<f64>) -> Result<Array2<f64>> {
    check_coords(shared, coords)?;
    let mods: Vec<Array1<f64>> = (2..shared.config.layers)
        .map(|k| modulate(shared, latent, k))
        .collect::<Result<_>>()?;
    Ok(forward_impl(shared, Some(&mods), coords))
}

/// Evaluate the bare shared network with the modulation path removed.
pub fn forward_base(shared: &SharedParams, coords: &Array2<f64>) -> Result<Array2<f64>> {
    check_coords(shared, coords)?;
    Ok(forward_impl(shared, None, coords))
}

impl SharedParams {
    /// Total number of meta-learned scalars.
    pub fn param_count(&self) -> usize {
        self.first.param_count()
            + self.hidden.iter().map(LayerParams::param_count).sum::<usize>()
            + self.output.param_count()
            + self.modulations.iter().map(|m| m.map.len()).sum::<usize>()
    }

    /// Flatten all parameters into one vector, in the canonical block order
    /// first / hidden... / output / modulations..., each block row-major.
    pub fn to_flat(&self) -> Array1<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        let mut push_layer = |layer: &LayerParams, out: &mut Vec<f64>| {
            out.extend(layer.weight.iter());
            out.extend(layer.bias.iter());
        };
        push_layer(&self.first, &mut out);
        for layer in &self.hidden {
            push_layer(layer, &mut out);
        }
        push_layer(&self.output, &mut out);
        for m in &self.modulations {
            out.extend(m.map.iter());
        }
        Array1::from_vec(out)
    }

    /// Rebuild parameters from a flat vector in the canonical block order.
    pub fn from_flat(config: &ModelConfig, flat: &Array1<f64>) -> Result<SharedParams> {
        config.validate()?;
        let schedule = build_omega_schedule(config.omega_first, config.omega_last, config.layers)?;
        let l = config.hidden_dim;
        let slice = flat.as_slice().ok_or_else(|| Error::usage("flat parameter vector must be contiguous"))?;
        let mut pos = 0usize;
        let mut take_layer = |rows: usize, cols: usize| -> Result<LayerParams> {
            let w_len = rows * cols;
            if pos + w_len + rows > slice.len() {
                return Err(Error::usage("flat parameter vector too short"));
            }
            let weight = Array2::from_shape_vec((rows, cols), slice[pos..pos + w_len].to_vec()).expect("shape");
            pos += w_len;
            let bias = Array1::from_vec(slice[pos..pos + rows].to_vec());
            pos += rows;
            Ok(LayerParams { weight, bias })
        };
        let first = take_layer(l, config.coord_dim)?;
        let hidden: Vec<LayerParams> =
            (0..config.hidden_layers()).map(|_| take_layer(l, l)).collect::<Result<_>>()?;
        let output = take_layer(config.out_dim, l)?;
        let mut modulations = Vec::with_capacity(config.hidden_layers());
        for _ in 0..config.hidden_layers() {
            let len = l * config.latent_dim;
            if pos + len > slice.len() {
                return Err(Error::usage("flat parameter vector too short"));
            }
            let map = Array2::from_shape_vec((l, config.latent_dim), slice[pos..pos + len].to_vec()).expect("shape");
            pos += len;
            modulations.push(ModulationMap { map });
        }
        if pos != slice.len() {
            return Err(Error::usage(format!(
                "flat parameter vector has {} entries, expected {pos}",
                slice.len()
            )));
        }
        Ok(SharedParams { config: *config, first, hidden, output, modulations, schedule })
    }

    /// Content hash over configuration and parameter values; identifies the
    /// exact shared network that produced an artifact.
    pub fn content_hash(&self) -> String {
        let mut hasher = Sha256::new();
        for v in [
            self.config.layers as u64,
            self.config.hidden_dim as u64,
            self.config.latent_dim as u64,
            self.config.coord_dim as u64,
            self.config.out_dim as u64,
        ] {
            hasher.update(v.to_le_bytes());
        }
        hasher.update(self.config.omega_first.to_le_bytes());
        hasher.update(self.config.omega_last.to_le_bytes());
        for v in self.to_flat().iter() {
            hasher.update(v.to_le_bytes());
        }
        let digest = hasher.finalize();
        let mut hex = String::with_capacity(64);
        for b in digest {
            use std::fmt::Write;
            write!(hex, "{b:02x}").expect("write to string");
        }
        hex
    }
}
