#pragma once

// Multilayer perceptrons with rectifier, sigmoid, tanh and maxout units,
// inverted dropout, exact backpropagation and momentum SGD.
//
// Conventions fixed here (and relied on by the tests):
//   * batches are row-major: one sample per row, one unit per column
//   * a layer computes act(x W + b); maxout takes the max over its k
//     affine pieces, so each maxout layer owns k weight/bias blocks
//   * dropout is the inverted variant, applied to a layer's output in
//     train mode: entries are zeroed with probability `rate` and the
//     survivors scaled by 1/(1-rate), so inference is a plain pass
//   * maxout ties route the gradient to the first maximal piece
//   * the momentum update is  v <- momentum*v + lr*g ;  params <- params +/- v

#include <cstdint>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "ganlab/matrix.hpp"
#include "ganlab/numeric.hpp"
#include "ganlab/rng.hpp"

namespace ganlab {

enum class Activation { Linear, Relu, Sigmoid, Tanh, Maxout };

inline const char* activation_name(Activation a) {
    switch (a) {
        case Activation::Linear: return "linear";
        case Activation::Relu: return "relu";
        case Activation::Sigmoid: return "sigmoid";
        case Activation::Tanh: return "tanh";
        case Activation::Maxout: return "maxout";
    }
    return "?";
}

struct LayerSpec {
    std::size_t in_dim = 0;
    std::size_t out_dim = 0;
    Activation activation = Activation::Linear;
    std::size_t maxout_pieces = 1;  // >= 2 iff activation == Maxout
    double dropout_rate = 0.0;      // in [0,1), on the layer output

    std::size_t pieces() const {
        return activation == Activation::Maxout ? maxout_pieces : 1;
    }
    std::size_t parameter_count() const {
        return pieces() * (in_dim + 1) * out_dim;
    }
};

/// Weight/bias blocks for one layer; non-maxout layers hold one piece.
struct LayerBlocks {
    std::vector<Matrix> weights;  // each in_dim x out_dim
    std::vector<Matrix> biases;   // each 1 x out_dim
};

struct Gradients {
    std::vector<LayerBlocks> layers;
    Matrix input_gradient;  // dL/d(input batch), for chaining through stacked nets
};

struct Mlp {
    std::vector<LayerSpec> specs;
    std::vector<LayerBlocks> params;
    std::vector<LayerBlocks> velocity;

    std::size_t in_dim() const { return specs.front().in_dim; }
    std::size_t out_dim() const { return specs.back().out_dim; }

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (const auto& s : specs) n += s.parameter_count();
        return n;
    }
};

enum class RunMode { Train, Infer };
enum class Direction { Ascend, Descend };

namespace detail {

inline void validate_specs(const std::vector<LayerSpec>& specs) {
    if (specs.empty()) {
        throw std::invalid_argument("Mlp: no layers");
    }
    for (std::size_t l = 0; l < specs.size(); ++l) {
        const auto& s = specs[l];
        if (s.in_dim == 0 || s.out_dim == 0) {
            throw std::invalid_argument("Mlp: zero-width layer " + std::to_string(l));
        }
        if (s.activation == Activation::Maxout && s.maxout_pieces < 2) {
            throw std::invalid_argument("Mlp: maxout layer " + std::to_string(l) +
                                        " needs >= 2 pieces");
        }
        if (s.activation != Activation::Maxout && s.maxout_pieces != 1) {
            throw std::invalid_argument("Mlp: layer " + std::to_string(l) +
                                        " declares maxout pieces but is not maxout");
        }
        if (!(s.dropout_rate >= 0.0 && s.dropout_rate < 1.0)) {
            throw std::invalid_argument("Mlp: dropout rate must lie in [0,1)");
        }
        if (l + 1 < specs.size() && s.out_dim != specs[l + 1].in_dim) {
            throw std::invalid_argument("Mlp: dimension chain breaks between layers " +
                                        std::to_string(l) + " and " + std::to_string(l + 1));
        }
    }
}

}  // namespace detail

/// Fresh network: weights uniform in [-s, s] with s = sqrt(6/(in+out)),
/// biases and velocity zero.
inline Mlp init_mlp(std::vector<LayerSpec> specs, RngState& rng) {
    detail::validate_specs(specs);
    Mlp mlp;
    mlp.specs = std::move(specs);
    for (const auto& s : mlp.specs) {
        const double bound = std::sqrt(6.0 / static_cast<double>(s.in_dim + s.out_dim));
        LayerBlocks blocks, vel;
        for (std::size_t p = 0; p < s.pieces(); ++p) {
            Matrix w(s.in_dim, s.out_dim);
            for (double& v : w.values()) v = rng.next_uniform(-bound, bound);
            blocks.weights.push_back(std::move(w));
            blocks.biases.emplace_back(1, s.out_dim, 0.0);
            vel.weights.emplace_back(s.in_dim, s.out_dim, 0.0);
            vel.biases.emplace_back(1, s.out_dim, 0.0);
        }
        mlp.params.push_back(std::move(blocks));
        mlp.velocity.push_back(std::move(vel));
    }
    return mlp;
}

/// Inverted-dropout mask: entries 0 with probability rate, else 1/(1-rate).
inline Matrix dropout_mask(std::size_t rows, std::size_t cols, double rate, RngState& rng) {
    if (!(rate >= 0.0 && rate < 1.0)) {
        throw std::invalid_argument("dropout_mask: rate must lie in [0,1)");
    }
    Matrix mask(rows, cols, 1.0);
    if (rate == 0.0) return mask;
    const double keep_scale = 1.0 / (1.0 - rate);
    for (double& v : mask.values()) {
        v = rng.next_uniform() < rate ? 0.0 : keep_scale;
    }
    return mask;
}

/// Everything a matching backward pass needs: per-layer outputs, the exact
/// dropout masks that were applied, and which maxout piece won per element.
struct ForwardTrace {
    RunMode mode = RunMode::Infer;
    std::vector<Matrix> outputs;           // outputs[0] is the input batch
    std::vector<Matrix> activations;       // post-activation, pre-dropout
    std::vector<Matrix> dropout_masks;     // empty Matrix where no mask applied
    std::vector<std::vector<std::uint8_t>> maxout_choice;  // empty for non-maxout

    const Matrix& output() const { return outputs.back(); }
};

inline ForwardTrace forward(const Mlp& mlp, const Matrix& batch, RunMode mode,
                            RngState* rng = nullptr) {
    if (batch.cols() != mlp.in_dim()) {
        throw std::invalid_argument("forward: batch width " + std::to_string(batch.cols()) +
                                    " does not match input dim " +
                                    std::to_string(mlp.in_dim()));
    }
    ForwardTrace trace;
    trace.mode = mode;
    trace.outputs.push_back(batch);
    trace.activations.reserve(mlp.specs.size());
    trace.dropout_masks.resize(mlp.specs.size());
    trace.maxout_choice.resize(mlp.specs.size());

    for (std::size_t l = 0; l < mlp.specs.size(); ++l) {
        const LayerSpec& s = mlp.specs[l];
        const LayerBlocks& blocks = mlp.params[l];
        const Matrix& x = trace.outputs.back();
        const std::size_t n = x.rows();

        Matrix act(n, s.out_dim);
        if (s.activation == Activation::Maxout) {
            auto& choice = trace.maxout_choice[l];
            choice.assign(n * s.out_dim, 0);
            for (std::size_t p = 0; p < s.pieces(); ++p) {
                Matrix pre = matmul(x, blocks.weights[p]);
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j < s.out_dim; ++j) {
                        const double v = pre(i, j) + blocks.biases[p](0, j);
                        if (p == 0 || v > act(i, j)) {  // first maximal piece wins ties
                            act(i, j) = v;
                            choice[i * s.out_dim + j] = static_cast<std::uint8_t>(p);
                        }
                    }
            }
        } else {
            act = matmul(x, blocks.weights[0]);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < s.out_dim; ++j) {
                    double v = act(i, j) + blocks.biases[0](0, j);
                    switch (s.activation) {
                        case Activation::Linear: break;
                        case Activation::Relu: v = v > 0.0 ? v : 0.0; break;
                        case Activation::Sigmoid: v = sigmoid(v); break;
                        case Activation::Tanh: v = std::tanh(v); break;
                        case Activation::Maxout: break;  // handled above
                    }
                    act(i, j) = v;
                }
        }
        trace.activations.push_back(act);

        if (mode == RunMode::Train && s.dropout_rate > 0.0) {
            if (!rng) {
                throw std::invalid_argument("forward: train mode with dropout needs an rng");
            }
            trace.dropout_masks[l] = dropout_mask(n, s.out_dim, s.dropout_rate, *rng);
            trace.outputs.push_back(hadamard(act, trace.dropout_masks[l]));
        } else {
            trace.outputs.push_back(std::move(act));
        }
    }
    return trace;
}

/// Output-only forward in infer mode (deterministic, no masks).
inline Matrix infer(const Mlp& mlp, const Matrix& batch) {
    return forward(mlp, batch, RunMode::Infer).output();
}

/// Exact gradient of the scalar loss whose output-gradient is
/// upstream_grad, reusing the trace's dropout masks and maxout choices.
inline Gradients backward(const Mlp& mlp, const ForwardTrace& trace,
                          const Matrix& upstream_grad) {
    const std::size_t n_layers = mlp.specs.size();
    if (trace.outputs.size() != n_layers + 1 || trace.activations.size() != n_layers) {
        throw std::invalid_argument("backward: trace does not match this network");
    }
    if (!upstream_grad.same_shape(trace.output())) {
        throw std::invalid_argument("backward: upstream gradient shape mismatch");
    }
    for (std::size_t l = 0; l < n_layers; ++l) {
        if (trace.outputs[l].cols() != mlp.specs[l].in_dim ||
            trace.activations[l].cols() != mlp.specs[l].out_dim) {
            throw std::invalid_argument("backward: stale trace (layer shapes differ)");
        }
    }

    Gradients grads;
    grads.layers.resize(n_layers);

    Matrix g = upstream_grad;  // dL/d(layer output), walking down
    for (std::size_t l = n_layers; l-- > 0;) {
        const LayerSpec& s = mlp.specs[l];
        const LayerBlocks& blocks = mlp.params[l];
        const Matrix& x = trace.outputs[l];
        const Matrix& a = trace.activations[l];
        const std::size_t n = x.rows();

        if (trace.dropout_masks[l].size() > 0) {
            g = hadamard(g, trace.dropout_masks[l]);
        }

        LayerBlocks& lg = grads.layers[l];
        if (s.activation == Activation::Maxout) {
            const auto& choice = trace.maxout_choice[l];
            Matrix g_in(n, s.in_dim, 0.0);
            for (std::size_t p = 0; p < s.pieces(); ++p) {
                Matrix sel(n, s.out_dim, 0.0);
                bool any = false;
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j < s.out_dim; ++j)
                        if (choice[i * s.out_dim + j] == p) {
                            sel(i, j) = g(i, j);
                            any = true;
                        }
                lg.weights.push_back(any ? matmul(transpose(x), sel)
                                         : Matrix(s.in_dim, s.out_dim, 0.0));
                Matrix gb(1, s.out_dim, 0.0);
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j < s.out_dim; ++j) gb(0, j) += sel(i, j);
                lg.biases.push_back(std::move(gb));
                if (any) g_in += matmul(sel, transpose(blocks.weights[p]));
            }
            g = std::move(g_in);
        } else {
            Matrix g_pre = g;
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < s.out_dim; ++j) {
                    const double av = a(i, j);
                    switch (s.activation) {
                        case Activation::Linear: break;
                        case Activation::Relu:
                            if (av <= 0.0) g_pre(i, j) = 0.0;
                            break;
                        case Activation::Sigmoid: g_pre(i, j) *= av * (1.0 - av); break;
                        case Activation::Tanh: g_pre(i, j) *= 1.0 - av * av; break;
                        case Activation::Maxout: break;
                    }
                }
            lg.weights.push_back(matmul(transpose(x), g_pre));
            Matrix gb(1, s.out_dim, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < s.out_dim; ++j) gb(0, j) += g_pre(i, j);
            lg.biases.push_back(std::move(gb));
            g = matmul(g_pre, transpose(blocks.weights[0]));
        }
    }
    grads.input_gradient = std::move(g);
    return grads;
}

/// Elementwise sum of parameter gradients from two backward passes over the
/// same network (input gradients are not combined; batches may differ).
inline void accumulate(Gradients& into, const Gradients& other) {
    if (into.layers.size() != other.layers.size()) {
        throw std::invalid_argument("accumulate: gradient layer count mismatch");
    }
    for (std::size_t l = 0; l < into.layers.size(); ++l) {
        for (std::size_t p = 0; p < into.layers[l].weights.size(); ++p) {
            into.layers[l].weights[p] += other.layers[l].weights[p];
            into.layers[l].biases[p] += other.layers[l].biases[p];
        }
    }
}

/// v <- momentum*v + lr*g ; params <- params + v (ascend) or params - v (descend).
inline void sgd_momentum_step(Mlp& mlp, const Gradients& grads, double lr, double momentum,
                              Direction direction) {
    if (!(lr > 0.0)) {
        throw std::invalid_argument("sgd_momentum_step: lr must be positive");
    }
    if (!(momentum >= 0.0 && momentum < 1.0)) {
        throw std::invalid_argument("sgd_momentum_step: momentum must lie in [0,1)");
    }
    if (grads.layers.size() != mlp.params.size()) {
        throw std::invalid_argument("sgd_momentum_step: gradient layer count mismatch");
    }
    const double sign = direction == Direction::Ascend ? 1.0 : -1.0;
    for (std::size_t l = 0; l < mlp.params.size(); ++l) {
        auto& pb = mlp.params[l];
        auto& vb = mlp.velocity[l];
        const auto& gb = grads.layers[l];
        if (gb.weights.size() != pb.weights.size()) {
            throw std::invalid_argument("sgd_momentum_step: piece count mismatch at layer " +
                                        std::to_string(l));
        }
        for (std::size_t p = 0; p < pb.weights.size(); ++p) {
            if (!gb.weights[p].same_shape(pb.weights[p]) ||
                !gb.biases[p].same_shape(pb.biases[p])) {
                throw std::invalid_argument("sgd_momentum_step: block shape mismatch at layer " +
                                            std::to_string(l));
            }
            for (std::size_t i = 0; i < pb.weights[p].size(); ++i) {
                double& v = vb.weights[p].values()[i];
                v = momentum * v + lr * gb.weights[p].values()[i];
                pb.weights[p].values()[i] += sign * v;
            }
            for (std::size_t i = 0; i < pb.biases[p].size(); ++i) {
                double& v = vb.biases[p].values()[i];
                v = momentum * v + lr * gb.biases[p].values()[i];
                pb.biases[p].values()[i] += sign * v;
            }
        }
    }
}

}  // namespace ganlab
