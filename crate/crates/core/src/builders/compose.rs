use super::{BuildError, CanonicalAggregation};
use crate::graph::{softmax_rows, DenseGraph, GraphError, NodeKind};

/// Order in which layer matrices are multiplied.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ComposeOrder {
    /// `A_L · … · A_2 · A_1`: layer 1 acts on the token states first.
    #[default]
    Forward,
    /// `A_1 · A_2 · … · A_L`.
    Reverse,
}

/// Multiplies the canonical layer graphs and row-softmaxes the product with
/// unit scale.
pub fn compose_layers(
    layers: &[CanonicalAggregation],
    order: ComposeOrder,
) -> Result<DenseGraph, BuildError> {
    let first = layers.first().ok_or(GraphError::EmptyList)?;
    if layers
        .iter()
        .any(|l| l.graph.n() != first.graph.n() || l.class_token != first.class_token)
    {
        return Err(BuildError::MixedSizes);
    }
    let mut product = first.graph.weights().to_owned();
    for layer in &layers[1..] {
        let next = layer.graph.weights();
        product = match order {
            ComposeOrder::Forward => next.dot(&product),
            ComposeOrder::Reverse => product.dot(&next),
        };
    }
    let weights = softmax_rows(product.view(), 1.0)?;
    Ok(DenseGraph::from_parts(weights, NodeKind::Token, true))
}
