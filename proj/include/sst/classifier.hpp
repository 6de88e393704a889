#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sst/matrix.hpp"
#include "sst/softlabel.hpp"

namespace sst {

enum class BlockKind { kAttention, kSsm };

/// Single-head scaled dot-product attention projections plus an output
/// projection, all C1 x C1.
struct AttentionParams {
    Matrix query;
    Matrix key;
    Matrix value;
    Matrix output;
};

/// Gated diagonal state-space block. The transition gate is an affine map of
/// the input squashed onto (0,1); the input gate is affine. state_out and
/// skip are the C1 x C1 output projections applied to the hidden state and
/// the input.
struct SsmParams {
    Matrix transition_weight;  // C1 x C1
    Matrix transition_bias;    // 1 x C1
    Matrix input_weight;       // C1 x C1
    Matrix input_bias;         // 1 x C1
    Matrix state_out;          // C1 x C1
    Matrix skip;               // C1 x C1
};

struct ClassifierParams {
    std::vector<BlockKind> pattern;
    std::vector<AttentionParams> attention;  // one per attention tag, pattern order
    std::vector<SsmParams> ssm;              // one per ssm tag, pattern order
    Matrix head;                             // C1 x C

    std::size_t feature_dim() const noexcept { return head.rows(); }
    std::size_t class_count() const noexcept { return head.cols(); }
};

/// Deterministic seeded init, entries uniform in [-0.05, 0.05]. The stream is
/// consumed in checkpoint tensor order, so identical seeds give identical
/// parameters on every platform.
ClassifierParams init_classifier(std::span<const BlockKind> pattern, std::size_t feature_dim,
                                 std::size_t class_count, std::uint64_t seed);

ClassifierParams zeros_like(const ClassifierParams& params);

struct TensorRef {
    std::string name;
    Matrix* tensor;
};
struct ConstTensorRef {
    std::string name;
    const Matrix* tensor;
};

/// Every parameter tensor in checkpoint declaration order.
std::vector<TensorRef> tensor_refs(ClassifierParams& params);
std::vector<ConstTensorRef> tensor_refs(const ClassifierParams& params);

/// S' = softmax(Q K^T / sqrt(C1)) V followed by the output projection.
Matrix attention_forward(const Matrix& tokens, const AttentionParams& params);

/// Sequential scan in token order, h_0 = 0:
///   a_t = sigmoid(x_t W_A + b_A),  g_t = x_t W_B + b_B
///   h_t = a_t (.) h_{t-1} + g_t (.) x_t
///   y_t = h_t C + x_t D
Matrix ssm_forward(const Matrix& tokens, const SsmParams& params);

/// Blocks applied in pattern order with residual connections
/// (x <- block(x) + x), then linear head and row softmax. The pattern must be
/// non-empty and start with an attention block.
Matrix classify(const Matrix& tokens, const ClassifierParams& params);

struct LossTerms {
    double total = 0.0;
    double cross_entropy = 0.0;
    double separation = 0.0;
};

struct LossGrad {
    LossTerms loss;
    ClassifierParams gradient;
};

/// Total objective (soft cross-entropy plus the separation term computed from
/// separation_features when provided) and its reverse-mode gradient with
/// respect to every parameter tensor. The separation term does not depend on
/// the parameters, so it shifts the loss without touching the gradient.
LossGrad loss_and_gradient(const Matrix& tokens, const ClassifierParams& params,
                           const SoftLabelMatrix& labels, const Matrix* separation_features);

/// Plain gradient descent on the classifier parameters; clustering inputs are
/// fixed. Returns steps+1 losses (initial value first). Throws
/// training_diverged_error when the loss leaves the finite range.
std::vector<double> train_toy(const Matrix& tokens, ClassifierParams& params,
                              const SoftLabelMatrix& labels, const Matrix* separation_features,
                              int steps, double learning_rate);

}  // namespace sst
