use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{dim, param, Error, Result};
use crate::rng::substream;
use crate::tensor::{Activation, DenseMatrix};

pub const PARAMS_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Mlpae,
    Gcnae,
    Dominant,
}

impl ModelKind {
    pub const ALL: [ModelKind; 3] = [ModelKind::Mlpae, ModelKind::Gcnae, ModelKind::Dominant];

    /// Whether the model has the `ZZᵀ` structure decoder.
    pub fn reconstructs_structure(self) -> bool {
        matches!(self, ModelKind::Dominant)
    }

    pub fn layer_kind(self) -> LayerKind {
        match self {
            ModelKind::Mlpae => LayerKind::Dense,
            ModelKind::Gcnae | ModelKind::Dominant => LayerKind::Gcn,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Mlpae => "mlpae",
            ModelKind::Gcnae => "gcnae",
            ModelKind::Dominant => "dominant",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mlpae" => Ok(ModelKind::Mlpae),
            "gcnae" => Ok(ModelKind::Gcnae),
            "dominant" => Ok(ModelKind::Dominant),
            other => Err(param("model", format!("unknown model `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayerKind {
    /// `act(Â · H · W)`
    Gcn,
    /// `act(H · W + b)`
    Dense,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub kind: LayerKind,
    pub activation: Activation,
    pub weight: DenseMatrix,
    pub bias: Option<Vec<f64>>,
}

impl Layer {
    pub fn in_width(&self) -> usize {
        self.weight.rows()
    }

    pub fn out_width(&self) -> usize {
        self.weight.cols()
    }
}

/// Encoder and attribute-decoder layers of one detector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub version: u32,
    pub kind: ModelKind,
    pub encoder: Vec<Layer>,
    pub decoder: Vec<Layer>,
}

/// `rows × cols` weights uniform in `±1/√rows`. The top-left
/// `base_rows × base_cols` block comes from its own stream so that widening
/// the input (appended eigenvector columns) leaves it unchanged up to the
/// fan-in factor.
fn init_weight(seed: u64, layer: u64, rows: usize, cols: usize, base_rows: usize, base_cols: usize) -> DenseMatrix {
    let mut base = substream(seed, "init", 2 * layer);
    let mut extra = substream(seed, "init", 2 * layer + 1);
    let bound = 1.0 / (rows as f64).sqrt();
    let mut w = DenseMatrix::zeros(rows, cols);
    for i in 0..base_rows.min(rows) {
        for j in 0..base_cols.min(cols) {
            w.set(i, j, base.gen_range(-1.0..1.0) * bound);
        }
    }
    for i in 0..rows {
        for j in 0..cols {
            if i >= base_rows || j >= base_cols {
                w.set(i, j, extra.gen_range(-1.0..1.0) * bound);
            }
        }
    }
    w
}

impl ModelParams {
    /// Default architecture: encoder `in → hidden → embed` (relu), attribute
    /// decoder `embed → in` (identity). `base_width` is the width of the raw
    /// features within `in_width`.
    pub fn init(kind: ModelKind, in_width: usize, base_width: usize, hidden: usize, embed: usize, seed: u64) -> Result<Self> {
        if in_width == 0 || hidden == 0 || embed == 0 {
            return Err(param("hidden", "layer widths must be positive"));
        }
        let lk = kind.layer_kind();
        let layer = |idx: u64, rows, cols, base_rows, base_cols, activation| Layer {
            kind: lk,
            activation,
            weight: init_weight(seed, idx, rows, cols, base_rows, base_cols),
            bias: (lk == LayerKind::Dense).then(|| vec![0.0; cols]),
        };
        let params = Self {
            version: PARAMS_FORMAT_VERSION,
            kind,
            encoder: vec![
                layer(0, in_width, hidden, base_width, hidden, Activation::Relu),
                layer(1, hidden, embed, hidden, embed, Activation::Relu),
            ],
            decoder: vec![layer(2, embed, in_width, embed, base_width, Activation::Identity)],
        };
        params.validate()?;
        Ok(params)
    }

    pub fn input_width(&self) -> usize {
        self.encoder.first().map_or(0, Layer::in_width)
    }

    pub fn embed_width(&self) -> usize {
        self.encoder.last().map_or(0, Layer::out_width)
    }

    pub fn layers(&self) -> impl Iterator<Item = &Layer> {
        self.encoder.iter().chain(&self.decoder)
    }

    fn layers_mut(&mut self) -> impl Iterator<Item = &mut Layer> {
        self.encoder.iter_mut().chain(self.decoder.iter_mut())
    }

    /// Checks that widths chain from input to embedding and back.
    pub fn validate(&self) -> Result<()> {
        if self.encoder.is_empty() || self.decoder.is_empty() {
            return Err(dim("model needs at least one encoder and one decoder layer"));
        }
        let layers: Vec<&Layer> = self.layers().collect();
        for pair in layers.windows(2) {
            if pair[0].out_width() != pair[1].in_width() {
                return Err(dim(format!(
                    "layer widths do not chain: {} then {}",
                    pair[0].out_width(),
                    pair[1].in_width()
                )));
            }
        }
        if layers.last().unwrap().out_width() != self.input_width() {
            return Err(dim("decoder output width must equal input width"));
        }
        for l in &layers {
            if l.kind != self.kind.layer_kind() {
                return Err(dim(format!("{:?} layer in a {} model", l.kind, self.kind)));
            }
            if let Some(b) = &l.bias {
                if b.len() != l.out_width() {
                    return Err(dim("bias length must match layer output width"));
                }
            }
        }
        Ok(())
    }

    pub fn num_parameters(&self) -> usize {
        self.layers()
            .map(|l| l.weight.as_slice().len() + l.bias.as_ref().map_or(0, Vec::len))
            .sum()
    }

    /// All parameters in layer order (weight then bias).
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.num_parameters());
        for l in self.layers() {
            out.extend_from_slice(l.weight.as_slice());
            if let Some(b) = &l.bias {
                out.extend_from_slice(b);
            }
        }
        out
    }

    pub fn set_flat(&mut self, flat: &[f64]) -> Result<()> {
        if flat.len() != self.num_parameters() {
            return Err(dim(format!("{} values for {} parameters", flat.len(), self.num_parameters())));
        }
        let mut pos = 0;
        for l in self.layers_mut() {
            let w = l.weight.as_mut_slice();
            w.copy_from_slice(&flat[pos..pos + w.len()]);
            pos += w.len();
            if let Some(b) = &mut l.bias {
                let len = b.len();
                b.copy_from_slice(&flat[pos..pos + len]);
                pos += len;
            }
        }
        Ok(())
    }

    /// Mutable parameter arrays with stable names, in [`Self::to_flat`] order.
    pub(crate) fn named_slices_mut(&mut self) -> Vec<(String, &mut [f64])> {
        let n_enc = self.encoder.len();
        let mut out = Vec::new();
        for (idx, l) in self.layers_mut().enumerate() {
            let name = if idx < n_enc {
                format!("encoder.{idx}")
            } else {
                format!("decoder.{}", idx - n_enc)
            };
            out.push((format!("{name}.weight"), l.weight.as_mut_slice()));
            if let Some(b) = &mut l.bias {
                out.push((format!("{name}.bias"), b.as_mut_slice()));
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("parameters serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let p: Self = serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))?;
        if p.version != PARAMS_FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported parameter format version {}", p.version)));
        }
        p.validate()?;
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_widths_chain() {
        for kind in ModelKind::ALL {
            let p = ModelParams::init(kind, 10, 8, 16, 4, 1).unwrap();
            assert_eq!(p.input_width(), 10);
            assert_eq!(p.embed_width(), 4);
            assert_eq!(p.decoder[0].out_width(), 10);
            assert_eq!(p.encoder[0].bias.is_some(), kind == ModelKind::Mlpae);
        }
    }

    #[test]
    fn init_respects_fan_in_bound_and_seed() {
        let a = ModelParams::init(ModelKind::Dominant, 9, 9, 16, 4, 3).unwrap();
        let b = ModelParams::init(ModelKind::Dominant, 9, 9, 16, 4, 3).unwrap();
        let c = ModelParams::init(ModelKind::Dominant, 9, 9, 16, 4, 4).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.encoder[0].weight.max_abs() <= 1.0 / 3.0);
        assert!(a.encoder[1].weight.max_abs() <= 0.25);
    }

    #[test]
    fn widened_input_keeps_base_block_direction() {
        let van = ModelParams::init(ModelKind::Gcnae, 4, 4, 6, 3, 5).unwrap();
        let aug = ModelParams::init(ModelKind::Gcnae, 6, 4, 6, 3, 5).unwrap();
        let ratio = (4.0f64 / 6.0).sqrt();
        for i in 0..4 {
            for j in 0..6 {
                let expect = van.encoder[0].weight.get(i, j) * ratio;
                assert!((aug.encoder[0].weight.get(i, j) - expect).abs() < 1e-15);
            }
        }
        assert_eq!(van.encoder[1], aug.encoder[1]);
    }

    #[test]
    fn flat_roundtrip_and_json() {
        let mut p = ModelParams::init(ModelKind::Mlpae, 5, 5, 4, 2, 9).unwrap();
        let flat: Vec<f64> = (0..p.num_parameters()).map(|i| i as f64 * 0.01).collect();
        p.set_flat(&flat).unwrap();
        assert_eq!(p.to_flat(), flat);
        let back = ModelParams::from_json(&p.to_json()).unwrap();
        assert_eq!(back, p);
        assert!(p.set_flat(&flat[1..]).is_err());
        let mut bad: serde_json::Value = serde_json::from_str(&p.to_json()).unwrap();
        bad["version"] = 99.into();
        assert!(ModelParams::from_json(&bad.to_string()).is_err());
    }

    #[test]
    fn validate_catches_broken_chain() {
        let mut p = ModelParams::init(ModelKind::Gcnae, 5, 5, 4, 2, 9).unwrap();
        p.decoder[0].weight = DenseMatrix::zeros(3, 5);
        assert!(p.validate().is_err());
    }

    #[test]
    fn parse_kind() {
        assert_eq!("DOMINANT".parse::<ModelKind>().unwrap(), ModelKind::Dominant);
        assert!("gaan".parse::<ModelKind>().is_err());
    }
}
