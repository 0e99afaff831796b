//! Minimal reverse-mode neural network engine covering the layer kinds the
//! two autoencoders need.

pub mod adam;
pub mod checkpoint;
pub mod gradcheck;
pub mod layer;
pub mod loss;
pub mod net;
pub mod tensor;

pub use adam::AdamState;
pub use checkpoint::Checkpoint;
pub use layer::{Activation, LayerSpec};
pub use loss::{loss_mae, loss_mse, Loss};
pub use net::{backward, backward_with_input, count_params, forward, forward_layers, NetParams, NetSpec};
pub use tensor::Tensor3;
