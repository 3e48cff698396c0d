use serde::{Deserialize, Serialize};

/// Architecture families with a known token mixer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Vit,
    Deit,
    Swin,
    Mixer,
    Metaformer,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::Vit,
        Family::Deit,
        Family::Swin,
        Family::Mixer,
        Family::Metaformer,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Vit => "vit",
            Family::Deit => "deit",
            Family::Swin => "swin",
            Family::Mixer => "mixer",
            Family::Metaformer => "metaformer",
        }
    }

    /// Self-attention families whose mixer is built from `q_weight`/`k_weight`.
    pub fn uses_position_attention(self) -> bool {
        matches!(self, Family::Vit | Family::Deit)
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| s.to_string())
    }
}

/// Architecture metadata stored in the archive manifest.
///
/// `family` is kept as text so that unknown families survive a read and are
/// reported by validation rather than by the manifest parser.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMeta {
    pub family: String,
    pub depth: usize,
    /// Channel count per stage.
    pub embed_dims: Vec<usize>,
    /// `(h, w)` token grid per stage.
    pub token_grids: Vec<(usize, usize)>,
    /// Layers per stage. Empty means a single stage of `depth` layers.
    #[serde(default)]
    pub stage_depths: Vec<usize>,
    #[serde(default)]
    pub has_class_token: bool,
    /// Attention heads per stage.
    #[serde(default)]
    pub heads: Vec<usize>,
    /// Window edge length per layer.
    #[serde(default)]
    pub window_sizes: Vec<usize>,
    /// Cyclic shift per layer; zero for unshifted layers.
    #[serde(default)]
    pub shift_sizes: Vec<usize>,
    /// Pooling kernel `K`.
    #[serde(default)]
    pub pool_kernel: Option<usize>,
    /// Denominator under the square root of every softmax. Defaults to the
    /// stage embedding width.
    #[serde(default)]
    pub head_dim_for_scaling: Option<usize>,
}

impl ModelMeta {
    /// Minimal single-stage metadata; family-specific fields start empty.
    pub fn single_stage(
        family: Family,
        depth: usize,
        embed_dim: usize,
        grid: (usize, usize),
    ) -> Self {
        Self {
            family: family.as_str().to_string(),
            depth,
            embed_dims: vec![embed_dim],
            token_grids: vec![grid],
            stage_depths: Vec::new(),
            has_class_token: false,
            heads: Vec::new(),
            window_sizes: Vec::new(),
            shift_sizes: Vec::new(),
            pool_kernel: None,
            head_dim_for_scaling: None,
        }
    }
}

/// Name of a per-layer tensor, e.g. `layer3.k_weight`.
pub fn layer_tensor_name(layer: usize, suffix: &str) -> String {
    format!("layer{layer}.{suffix}")
}
