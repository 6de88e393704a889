#include "sst/classifier.hpp"

#include <cmath>
#include <random>

#include "sst/dicf.hpp"
#include "sst/error.hpp"

namespace sst {

namespace {

constexpr double kLogFloor = 1e-12;

// out = a * b, a: n x k, b: k x m
Matrix matmul(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows(), b.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double* dst = out.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double v = a(i, k);
            const double* src = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j) dst[j] += v * src[j];
        }
    }
    return out;
}

// out = a^T * b, a: n x k, b: n x m -> k x m
Matrix matmul_at_b(const Matrix& a, const Matrix& b) {
    Matrix out(a.cols(), b.cols(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* arow = a.row(i);
        const double* brow = b.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            double* dst = out.row(k);
            const double v = arow[k];
            for (std::size_t j = 0; j < b.cols(); ++j) dst[j] += v * brow[j];
        }
    }
    return out;
}

// out = a * b^T, a: n x k, b: m x k -> n x m
Matrix matmul_a_bt(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows(), b.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const double* arow = a.row(i);
        for (std::size_t j = 0; j < b.rows(); ++j) {
            const double* brow = b.row(j);
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) acc += arow[k] * brow[k];
            out(i, j) = acc;
        }
    }
    return out;
}

void add_inplace(Matrix& a, const Matrix& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a.data()[i] += b.data()[i];
}

Matrix softmax_rows(const Matrix& logits) {
    Matrix out(logits.rows(), logits.cols());
    for (std::size_t i = 0; i < logits.rows(); ++i) {
        const double* src = logits.row(i);
        double* dst = out.row(i);
        double mx = src[0];
        for (std::size_t j = 1; j < logits.cols(); ++j) mx = std::max(mx, src[j]);
        double sum = 0.0;
        for (std::size_t j = 0; j < logits.cols(); ++j) {
            dst[j] = std::exp(src[j] - mx);
            sum += dst[j];
        }
        for (std::size_t j = 0; j < logits.cols(); ++j) dst[j] /= sum;
    }
    return out;
}

// dZ(i,:) = P(i,:) (.) (dP(i,:) - <dP(i,:), P(i,:)>)
Matrix softmax_rows_backward(const Matrix& probs, const Matrix& dprobs) {
    Matrix out(probs.rows(), probs.cols());
    for (std::size_t i = 0; i < probs.rows(); ++i) {
        double dot = 0.0;
        for (std::size_t j = 0; j < probs.cols(); ++j) dot += dprobs(i, j) * probs(i, j);
        for (std::size_t j = 0; j < probs.cols(); ++j)
            out(i, j) = probs(i, j) * (dprobs(i, j) - dot);
    }
    return out;
}

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

struct AttentionCache {
    Matrix input, q, k, v, probs, context;
};

struct SsmCache {
    Matrix input, gate, input_gate, hidden;
};

Matrix attention_forward_cached(const Matrix& x, const AttentionParams& p,
                                AttentionCache* cache) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(x.cols()));
    Matrix q = matmul(x, p.query);
    Matrix k = matmul(x, p.key);
    Matrix v = matmul(x, p.value);
    Matrix logits = matmul_a_bt(q, k);
    for (std::size_t i = 0; i < logits.size(); ++i) logits.data()[i] *= scale;
    Matrix probs = softmax_rows(logits);
    Matrix context = matmul(probs, v);
    Matrix out = matmul(context, p.output);
    if (cache) {
        cache->input = x;
        cache->q = std::move(q);
        cache->k = std::move(k);
        cache->v = std::move(v);
        cache->probs = std::move(probs);
        cache->context = std::move(context);
    }
    return out;
}

Matrix ssm_forward_cached(const Matrix& x, const SsmParams& p, SsmCache* cache) {
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    Matrix gate(n, d), input_gate(n, d), hidden(n, d);
    std::vector<double> h(d, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
        const double* xt = x.row(t);
        for (std::size_t c = 0; c < d; ++c) {
            double z = p.transition_bias(0, c);
            double g = p.input_bias(0, c);
            for (std::size_t k = 0; k < d; ++k) {
                z += xt[k] * p.transition_weight(k, c);
                g += xt[k] * p.input_weight(k, c);
            }
            const double a = sigmoid(z);
            gate(t, c) = a;
            input_gate(t, c) = g;
            h[c] = a * h[c] + g * xt[c];
            hidden(t, c) = h[c];
        }
    }
    Matrix out = matmul(hidden, p.state_out);
    add_inplace(out, matmul(x, p.skip));
    if (cache) {
        cache->input = x;
        cache->gate = std::move(gate);
        cache->input_gate = std::move(input_gate);
        cache->hidden = std::move(hidden);
    }
    return out;
}

void attention_backward(const AttentionCache& cache, const AttentionParams& p,
                        const Matrix& dout, AttentionParams& grad, Matrix& dx) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(cache.input.cols()));
    add_inplace(grad.output, matmul_at_b(cache.context, dout));
    Matrix dcontext = matmul_a_bt(dout, p.output);
    Matrix dprobs = matmul_a_bt(dcontext, cache.v);
    Matrix dv = matmul_at_b(cache.probs, dcontext);
    Matrix dlogits = softmax_rows_backward(cache.probs, dprobs);
    for (std::size_t i = 0; i < dlogits.size(); ++i) dlogits.data()[i] *= scale;
    Matrix dq = matmul(dlogits, cache.k);
    Matrix dk = matmul_at_b(dlogits, cache.q);
    add_inplace(grad.query, matmul_at_b(cache.input, dq));
    add_inplace(grad.key, matmul_at_b(cache.input, dk));
    add_inplace(grad.value, matmul_at_b(cache.input, dv));
    add_inplace(dx, matmul_a_bt(dq, p.query));
    add_inplace(dx, matmul_a_bt(dk, p.key));
    add_inplace(dx, matmul_a_bt(dv, p.value));
}

void ssm_backward(const SsmCache& cache, const SsmParams& p, const Matrix& dout,
                  SsmParams& grad, Matrix& dx) {
    const std::size_t n = cache.input.rows();
    const std::size_t d = cache.input.cols();

    add_inplace(grad.state_out, matmul_at_b(cache.hidden, dout));
    add_inplace(grad.skip, matmul_at_b(cache.input, dout));
    Matrix dhidden = matmul_a_bt(dout, p.state_out);
    add_inplace(dx, matmul_a_bt(dout, p.skip));

    // Reverse scan. dpregate / dinput_gate collect the per-step gradients of
    // the affine gate inputs; the weight gradients follow as matrix products.
    Matrix dpregate(n, d), dinput_gate(n, d);
    std::vector<double> carry(d, 0.0);
    for (std::size_t ti = n; ti-- > 0;) {
        const double* xt = cache.input.row(ti);
        for (std::size_t c = 0; c < d; ++c) {
            const double dh = dhidden(ti, c) + carry[c];
            const double h_prev = ti > 0 ? cache.hidden(ti - 1, c) : 0.0;
            const double a = cache.gate(ti, c);
            const double da = dh * h_prev;
            dinput_gate(ti, c) = dh * xt[c];
            dx(ti, c) += dh * cache.input_gate(ti, c);
            carry[c] = dh * a;
            dpregate(ti, c) = da * a * (1.0 - a);
        }
    }
    add_inplace(grad.transition_weight, matmul_at_b(cache.input, dpregate));
    add_inplace(grad.input_weight, matmul_at_b(cache.input, dinput_gate));
    for (std::size_t t = 0; t < n; ++t) {
        for (std::size_t c = 0; c < d; ++c) {
            grad.transition_bias(0, c) += dpregate(t, c);
            grad.input_bias(0, c) += dinput_gate(t, c);
        }
    }
    add_inplace(dx, matmul_a_bt(dpregate, p.transition_weight));
    add_inplace(dx, matmul_a_bt(dinput_gate, p.input_weight));
}

void validate_pattern(const ClassifierParams& params) {
    if (params.pattern.empty())
        throw invalid_input_error("classify: empty block pattern");
    if (params.pattern.front() != BlockKind::kAttention)
        throw invalid_input_error("classify: block pattern must start with attention");
}

struct ForwardTrace {
    std::vector<AttentionCache> attention;
    std::vector<SsmCache> ssm;
    Matrix features;  // block stack output
    Matrix probs;     // softmax(features * head)
};

ForwardTrace forward(const Matrix& tokens, const ClassifierParams& params) {
    validate_pattern(params);
    if (tokens.cols() != params.feature_dim())
        throw invalid_input_error("classify: token width disagrees with parameters");

    ForwardTrace trace;
    trace.attention.resize(params.attention.size());
    trace.ssm.resize(params.ssm.size());
    Matrix x = tokens;
    std::size_t ai = 0, si = 0;
    for (BlockKind kind : params.pattern) {
        Matrix y = kind == BlockKind::kAttention
                       ? attention_forward_cached(x, params.attention[ai], &trace.attention[ai])
                       : ssm_forward_cached(x, params.ssm[si], &trace.ssm[si]);
        (kind == BlockKind::kAttention ? ai : si) += 1;
        add_inplace(y, x);
        x = std::move(y);
    }
    trace.probs = softmax_rows(matmul(x, params.head));
    trace.features = std::move(x);
    return trace;
}

}  // namespace

ClassifierParams zeros_like(const ClassifierParams& params) {
    ClassifierParams out;
    out.pattern = params.pattern;
    out.attention.reserve(params.attention.size());
    for (const auto& a : params.attention)
        out.attention.push_back({Matrix(a.query.rows(), a.query.cols()),
                                 Matrix(a.key.rows(), a.key.cols()),
                                 Matrix(a.value.rows(), a.value.cols()),
                                 Matrix(a.output.rows(), a.output.cols())});
    out.ssm.reserve(params.ssm.size());
    for (const auto& s : params.ssm)
        out.ssm.push_back({Matrix(s.transition_weight.rows(), s.transition_weight.cols()),
                           Matrix(s.transition_bias.rows(), s.transition_bias.cols()),
                           Matrix(s.input_weight.rows(), s.input_weight.cols()),
                           Matrix(s.input_bias.rows(), s.input_bias.cols()),
                           Matrix(s.state_out.rows(), s.state_out.cols()),
                           Matrix(s.skip.rows(), s.skip.cols())});
    out.head = Matrix(params.head.rows(), params.head.cols());
    return out;
}

std::vector<TensorRef> tensor_refs(ClassifierParams& params) {
    std::vector<TensorRef> refs;
    std::size_t ai = 0, si = 0;
    for (std::size_t b = 0; b < params.pattern.size(); ++b) {
        const std::string prefix = "block" + std::to_string(b) + ".";
        if (params.pattern[b] == BlockKind::kAttention) {
            AttentionParams& a = params.attention[ai++];
            refs.push_back({prefix + "query", &a.query});
            refs.push_back({prefix + "key", &a.key});
            refs.push_back({prefix + "value", &a.value});
            refs.push_back({prefix + "output", &a.output});
        } else {
            SsmParams& s = params.ssm[si++];
            refs.push_back({prefix + "transition_weight", &s.transition_weight});
            refs.push_back({prefix + "transition_bias", &s.transition_bias});
            refs.push_back({prefix + "input_weight", &s.input_weight});
            refs.push_back({prefix + "input_bias", &s.input_bias});
            refs.push_back({prefix + "state_out", &s.state_out});
            refs.push_back({prefix + "skip", &s.skip});
        }
    }
    refs.push_back({"head", &params.head});
    return refs;
}

std::vector<ConstTensorRef> tensor_refs(const ClassifierParams& params) {
    std::vector<ConstTensorRef> refs;
    auto mutable_refs = tensor_refs(const_cast<ClassifierParams&>(params));
    refs.reserve(mutable_refs.size());
    for (const auto& r : mutable_refs) refs.push_back({r.name, r.tensor});
    return refs;
}

ClassifierParams init_classifier(std::span<const BlockKind> pattern, std::size_t feature_dim,
                                 std::size_t class_count, std::uint64_t seed) {
    if (pattern.empty())
        throw invalid_input_error("init_classifier: empty block pattern");
    if (feature_dim < 1 || class_count < 1)
        throw invalid_input_error("init_classifier: dimensions must be >= 1");

    ClassifierParams params;
    params.pattern.assign(pattern.begin(), pattern.end());
    for (BlockKind kind : pattern) {
        if (kind == BlockKind::kAttention) {
            params.attention.push_back({Matrix(feature_dim, feature_dim),
                                        Matrix(feature_dim, feature_dim),
                                        Matrix(feature_dim, feature_dim),
                                        Matrix(feature_dim, feature_dim)});
        } else {
            params.ssm.push_back({Matrix(feature_dim, feature_dim), Matrix(1, feature_dim),
                                  Matrix(feature_dim, feature_dim), Matrix(1, feature_dim),
                                  Matrix(feature_dim, feature_dim),
                                  Matrix(feature_dim, feature_dim)});
        }
    }
    params.head = Matrix(feature_dim, class_count);

    // Scale the top 53 bits of each draw into [0,1); this avoids the
    // implementation-defined std::uniform_real_distribution.
    std::mt19937_64 rng(seed);
    for (TensorRef& ref : tensor_refs(params)) {
        for (std::size_t i = 0; i < ref.tensor->size(); ++i) {
            const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
            ref.tensor->data()[i] = (2.0 * u - 1.0) * 0.05;
        }
    }
    return params;
}

Matrix attention_forward(const Matrix& tokens, const AttentionParams& params) {
    if (tokens.cols() != params.query.rows())
        throw invalid_input_error("attention_forward: shape mismatch");
    return attention_forward_cached(tokens, params, nullptr);
}

Matrix ssm_forward(const Matrix& tokens, const SsmParams& params) {
    if (tokens.cols() != params.transition_weight.rows())
        throw invalid_input_error("ssm_forward: shape mismatch");
    return ssm_forward_cached(tokens, params, nullptr);
}

Matrix classify(const Matrix& tokens, const ClassifierParams& params) {
    return forward(tokens, params).probs;
}

LossGrad loss_and_gradient(const Matrix& tokens, const ClassifierParams& params,
                           const SoftLabelMatrix& labels, const Matrix* separation_features) {
    ForwardTrace trace = forward(tokens, params);
    const Matrix& probs = trace.probs;

    LossGrad result;
    result.loss.cross_entropy = soft_cross_entropy(probs, labels);
    result.loss.separation =
        separation_features ? separation_loss(*separation_features).second : 0.0;
    result.loss.total = total_loss(result.loss.cross_entropy, result.loss.separation);
    result.gradient = zeros_like(params);

    std::size_t valid_count = 0;
    for (bool v : labels.valid) valid_count += v ? 1 : 0;

    // d(loss)/d(probs), consistent with the log floor: entries clamped below
    // the floor pass no gradient.
    Matrix dprobs(probs.rows(), probs.cols(), 0.0);
    const double inv_valid = 1.0 / static_cast<double>(valid_count);
    for (std::size_t m = 0; m < probs.rows(); ++m) {
        if (!labels.valid[m]) continue;
        for (std::size_t c = 0; c < probs.cols(); ++c) {
            const double l = labels.probabilities(m, c);
            if (l == 0.0) continue;
            const double p = probs(m, c);
            if (p > kLogFloor) dprobs(m, c) = -inv_valid * l / p;
        }
    }
    Matrix dlogits = softmax_rows_backward(probs, dprobs);
    add_inplace(result.gradient.head, matmul_at_b(trace.features, dlogits));
    Matrix dx = matmul_a_bt(dlogits, params.head);

    std::size_t ai = params.attention.size();
    std::size_t si = params.ssm.size();
    for (std::size_t b = params.pattern.size(); b-- > 0;) {
        // Residual: the incoming gradient feeds both the block and its input.
        Matrix dblock = dx;
        if (params.pattern[b] == BlockKind::kAttention) {
            --ai;
            attention_backward(trace.attention[ai], params.attention[ai], dblock,
                               result.gradient.attention[ai], dx);
        } else {
            --si;
            ssm_backward(trace.ssm[si], params.ssm[si], dblock, result.gradient.ssm[si], dx);
        }
    }
    return result;
}

std::vector<double> train_toy(const Matrix& tokens, ClassifierParams& params,
                              const SoftLabelMatrix& labels, const Matrix* separation_features,
                              int steps, double learning_rate) {
    if (steps < 1) throw invalid_input_error("train_toy: steps must be >= 1");

    // Once the parameters blow up, the forward pass yields non-finite
    // predictions and the loss evaluation rejects them; for the training loop
    // that failure mode is divergence, not a caller mistake.
    auto evaluate = [&]() -> LossGrad {
        try {
            return loss_and_gradient(tokens, params, labels, separation_features);
        } catch (const invalid_input_error& e) {
            throw training_diverged_error(std::string("train_toy: ") + e.what());
        }
    };

    std::vector<double> losses;
    losses.reserve(static_cast<std::size_t>(steps) + 1);
    LossGrad lg = evaluate();
    losses.push_back(lg.loss.total);
    for (int step = 0; step < steps; ++step) {
        auto prefs = tensor_refs(params);
        auto grefs = tensor_refs(lg.gradient);
        for (std::size_t t = 0; t < prefs.size(); ++t) {
            Matrix& p = *prefs[t].tensor;
            const Matrix& g = *grefs[t].tensor;
            for (std::size_t i = 0; i < p.size(); ++i)
                p.data()[i] -= learning_rate * g.data()[i];
        }
        lg = evaluate();
        if (!std::isfinite(lg.loss.total))
            throw training_diverged_error("train_toy: loss left the finite range");
        losses.push_back(lg.loss.total);
    }
    return losses;
}

}  // namespace sst
