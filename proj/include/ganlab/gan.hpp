#pragma once

// The two-player game: the minimax value function, alternating minibatch
// training with k discriminator ascent steps per generator step, both
// generator objectives, and generator-side sampling utilities.
//
// Objective conventions (all means over the minibatch, logs in nats):
//   * discriminator ascends   mean log D(x) + mean log(1 - D(G(z)))
//   * saturating generator    descends mean log(1 - D(G(z)))
//   * non-saturating          ascends  mean log D(G(z))
// Log arguments are floored at kLogEps so a saturated discriminator yields
// large-but-finite losses and gradients instead of infinities.

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ganlab/matrix.hpp"
#include "ganlab/mlp.hpp"
#include "ganlab/rng.hpp"

namespace ganlab {

inline constexpr double kLogEps = 1e-12;

struct NoisePrior {
    enum class Kind { Uniform, Gaussian };

    Kind kind = Kind::Uniform;
    double lo = -1.0, hi = 1.0;        // uniform
    double mean = 0.0, stddev = 1.0;   // gaussian
    std::size_t dim = 1;

    static NoisePrior uniform(double lo, double hi, std::size_t dim) {
        if (!(hi > lo) || dim == 0) {
            throw std::invalid_argument("NoisePrior::uniform: requires hi > lo and dim >= 1");
        }
        NoisePrior p;
        p.kind = Kind::Uniform;
        p.lo = lo;
        p.hi = hi;
        p.dim = dim;
        return p;
    }

    static NoisePrior gaussian(double mean, double stddev, std::size_t dim) {
        if (!(stddev > 0.0) || dim == 0) {
            throw std::invalid_argument("NoisePrior::gaussian: requires stddev > 0 and dim >= 1");
        }
        NoisePrior p;
        p.kind = Kind::Gaussian;
        p.mean = mean;
        p.stddev = stddev;
        p.dim = dim;
        return p;
    }

    Matrix sample(std::size_t n, RngState& rng) const {
        Matrix z(n, dim);
        for (double& v : z.values()) {
            v = kind == Kind::Uniform ? rng.next_uniform(lo, hi)
                                      : rng.next_gaussian(mean, stddev);
        }
        return z;
    }
};

struct GanModel {
    Mlp generator;
    Mlp discriminator;
    NoisePrior prior;

    void validate() const {
        if (generator.specs.empty() || discriminator.specs.empty()) {
            throw std::invalid_argument("GanModel: empty network");
        }
        if (prior.dim != generator.in_dim()) {
            throw std::invalid_argument("GanModel: prior dim " + std::to_string(prior.dim) +
                                        " does not match generator input " +
                                        std::to_string(generator.in_dim()));
        }
        if (generator.out_dim() != discriminator.in_dim()) {
            throw std::invalid_argument("GanModel: generator output " +
                                        std::to_string(generator.out_dim()) +
                                        " does not match discriminator input " +
                                        std::to_string(discriminator.in_dim()));
        }
        if (discriminator.out_dim() != 1 ||
            discriminator.specs.back().activation != Activation::Sigmoid) {
            throw std::invalid_argument("GanModel: discriminator must end in a single sigmoid "
                                        "unit");
        }
    }
};

enum class GeneratorLoss { Saturating, NonSaturating };

struct TrainConfig {
    std::size_t k = 1;             // discriminator steps per iteration
    std::size_t batch = 64;        // minibatch size m
    double lr_d = 0.1;
    double lr_g = 0.1;
    double momentum = 0.5;
    std::size_t iterations = 0;
    GeneratorLoss generator_loss = GeneratorLoss::NonSaturating;
    std::uint64_t seed = 0;
    std::size_t collapse_check_interval = 100;  // 0 disables the diagnostic

    void validate() const {
        if (k < 1) throw std::invalid_argument("TrainConfig: k must be >= 1");
        if (batch < 1) throw std::invalid_argument("TrainConfig: batch must be >= 1");
        if (!(lr_d > 0.0) || !(lr_g > 0.0)) {
            throw std::invalid_argument("TrainConfig: learning rates must be positive");
        }
        if (!(momentum >= 0.0 && momentum < 1.0)) {
            throw std::invalid_argument("TrainConfig: momentum must lie in [0,1)");
        }
    }
};

struct IterationRecord {
    std::size_t iteration = 0;  // 1-based; the last record carries iteration == iterations run
    double value_estimate = 0.0;  // minibatch estimate of V(D,G)
    double d_loss = 0.0;          // -value_estimate
    double g_loss = 0.0;          // the quantity the generator step descended
    double mean_d_data = 0.0;
    double mean_d_fake = 0.0;
    bool collapse_warning = false;
};

struct TrainMetrics {
    std::vector<IterationRecord> records;
    bool aborted = false;
    std::string abort_reason;
};

/// Observation points inside the training loop. Hooks see const state and
/// must not touch the training RNG — anything stochastic they do needs its
/// own stream, or determinism is lost.
struct TrainHooks {
    std::function<void(std::size_t completed_iterations, const GanModel&)> after_iteration;
};

namespace detail {

inline double clamped_log(double v) {
    return std::log(v > kLogEps ? v : kLogEps);
}

inline double mean_column0(const Matrix& m) {
    double sum = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) sum += m(i, 0);
    return sum / static_cast<double>(m.rows());
}

inline double mean_pairwise_distance(const Matrix& points) {
    const std::size_t n = points.rows();
    if (n < 2) return 0.0;
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double sq = 0.0;
            for (std::size_t c = 0; c < points.cols(); ++c) {
                const double diff = points(i, c) - points(j, c);
                sq += diff * diff;
            }
            sum += std::sqrt(sq);
            ++count;
        }
    }
    return sum / static_cast<double>(count);
}

/// Minibatch of `m` dataset rows drawn with replacement.
inline Matrix sample_minibatch(const Matrix& data, std::size_t m, RngState& rng) {
    Matrix batch(m, data.cols());
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t src = rng.next_index(data.rows());
        for (std::size_t c = 0; c < data.cols(); ++c) batch(i, c) = data(src, c);
    }
    return batch;
}

}  // namespace detail

/// Monte-Carlo estimate of V(D,G): mean log D(x) + mean log(1 - D(G(z))).
/// Pure evaluation; both networks run in infer mode.
inline double value_estimate(const GanModel& model, const Matrix& data_batch,
                             const Matrix& noise_batch) {
    if (data_batch.rows() == 0 || noise_batch.rows() == 0) {
        throw std::invalid_argument("value_estimate: empty batch");
    }
    const Matrix d_real = infer(model.discriminator, data_batch);
    const Matrix d_fake = infer(model.discriminator, infer(model.generator, noise_batch));
    double sum_real = 0.0;
    for (std::size_t i = 0; i < d_real.rows(); ++i) {
        sum_real += detail::clamped_log(d_real(i, 0));
    }
    double sum_fake = 0.0;
    for (std::size_t i = 0; i < d_fake.rows(); ++i) {
        sum_fake += detail::clamped_log(1.0 - d_fake(i, 0));
    }
    return sum_real / static_cast<double>(d_real.rows()) +
           sum_fake / static_cast<double>(d_fake.rows());
}

/// The generator's named objective as a pure evaluation (infer mode):
/// saturating -> mean log(1 - D(G(z))), non-saturating -> mean log D(G(z)).
inline double generator_objective(const GanModel& model, const Matrix& noise_batch,
                                  GeneratorLoss mode) {
    if (noise_batch.rows() == 0) {
        throw std::invalid_argument("generator_objective: empty batch");
    }
    const Matrix d_fake = infer(model.discriminator, infer(model.generator, noise_batch));
    double sum = 0.0;
    for (std::size_t i = 0; i < d_fake.rows(); ++i) {
        sum += mode == GeneratorLoss::Saturating ? detail::clamped_log(1.0 - d_fake(i, 0))
                                                 : detail::clamped_log(d_fake(i, 0));
    }
    return sum / static_cast<double>(d_fake.rows());
}

struct StepInfo {
    double objective = 0.0;  // value of the quantity stepped on, at the pre-step parameters
    double mean_d_data = 0.0;
    double mean_d_fake = 0.0;
};

/// Gradient of mean[log D(x)] + mean[log(1 - D(G(z)))] w.r.t. the
/// discriminator parameters. Train mode: dropout masks drawn from rng.
inline Gradients discriminator_gradients(const GanModel& model, const Matrix& data_batch,
                                         const Matrix& noise_batch, RngState& rng,
                                         StepInfo* info = nullptr) {
    if (data_batch.rows() != noise_batch.rows() || data_batch.rows() == 0) {
        throw std::invalid_argument("discriminator_gradients: batches must be non-empty and "
                                    "equally sized");
    }
    const auto m = static_cast<double>(data_batch.rows());

    const ForwardTrace real = forward(model.discriminator, data_batch, RunMode::Train, &rng);
    const Matrix fakes = forward(model.generator, noise_batch, RunMode::Train, &rng).output();
    const ForwardTrace fake = forward(model.discriminator, fakes, RunMode::Train, &rng);

    // d/d D(x) of log D(x) is 1/D; d/d D(G(z)) of log(1-D) is -1/(1-D).
    // Denominators mirror the objective's log flooring.
    Matrix up_real(real.output().rows(), 1);
    for (std::size_t i = 0; i < up_real.rows(); ++i) {
        up_real(i, 0) = 1.0 / (m * std::max(real.output()(i, 0), kLogEps));
    }
    Matrix up_fake(fake.output().rows(), 1);
    for (std::size_t i = 0; i < up_fake.rows(); ++i) {
        up_fake(i, 0) = -1.0 / (m * std::max(1.0 - fake.output()(i, 0), kLogEps));
    }

    Gradients grads = backward(model.discriminator, real, up_real);
    accumulate(grads, backward(model.discriminator, fake, up_fake));

    if (info) {
        double obj = 0.0;
        for (std::size_t i = 0; i < real.output().rows(); ++i) {
            obj += detail::clamped_log(real.output()(i, 0));
        }
        for (std::size_t i = 0; i < fake.output().rows(); ++i) {
            obj += detail::clamped_log(1.0 - fake.output()(i, 0));
        }
        info->objective = obj / m;
        info->mean_d_data = detail::mean_column0(real.output());
        info->mean_d_fake = detail::mean_column0(fake.output());
    }
    return grads;
}

/// Gradient of the chosen generator objective w.r.t. the generator
/// parameters, flowing through a frozen discriminator.
inline Gradients generator_gradients(const GanModel& model, const Matrix& noise_batch,
                                     GeneratorLoss mode, RngState& rng,
                                     StepInfo* info = nullptr) {
    if (noise_batch.rows() == 0) {
        throw std::invalid_argument("generator_gradients: empty batch");
    }
    const auto m = static_cast<double>(noise_batch.rows());

    const ForwardTrace gen = forward(model.generator, noise_batch, RunMode::Train, &rng);
    const ForwardTrace disc = forward(model.discriminator, gen.output(), RunMode::Train, &rng);

    Matrix up(disc.output().rows(), 1);
    for (std::size_t i = 0; i < up.rows(); ++i) {
        const double d = disc.output()(i, 0);
        up(i, 0) = mode == GeneratorLoss::Saturating
                       ? -1.0 / (m * std::max(1.0 - d, kLogEps))
                       : 1.0 / (m * std::max(d, kLogEps));
    }

    const Gradients through_disc = backward(model.discriminator, disc, up);
    Gradients grads = backward(model.generator, gen, through_disc.input_gradient);

    if (info) {
        double obj = 0.0;
        for (std::size_t i = 0; i < disc.output().rows(); ++i) {
            const double d = disc.output()(i, 0);
            obj += mode == GeneratorLoss::Saturating ? detail::clamped_log(1.0 - d)
                                                     : detail::clamped_log(d);
        }
        info->objective = obj / m;
        info->mean_d_fake = detail::mean_column0(disc.output());
    }
    return grads;
}

/// One momentum-ascent step on the discriminator objective. The generator's
/// parameters are untouched.
inline StepInfo discriminator_step(GanModel& model, const Matrix& data_batch,
                                   const Matrix& noise_batch, const TrainConfig& cfg,
                                   RngState& rng) {
    StepInfo info;
    const Gradients grads = discriminator_gradients(model, data_batch, noise_batch, rng, &info);
    // The log floor keeps the objective finite even when the forward pass has
    // gone NaN, so the mean D outputs are checked as well.
    if (!std::isfinite(info.objective) || !std::isfinite(info.mean_d_data) ||
        !std::isfinite(info.mean_d_fake)) {
        throw std::runtime_error("discriminator_step: non-finite objective or output (objective " +
                                 std::to_string(info.objective) + ", mean D(x) " +
                                 std::to_string(info.mean_d_data) + ", mean D(G(z)) " +
                                 std::to_string(info.mean_d_fake) + ")");
    }
    sgd_momentum_step(model.discriminator, grads, cfg.lr_d, cfg.momentum, Direction::Ascend);
    return info;
}

/// One generator step: saturating mode descends its objective, the
/// non-saturating mode ascends it. The discriminator is untouched.
inline StepInfo generator_step(GanModel& model, const Matrix& noise_batch,
                               const TrainConfig& cfg, RngState& rng) {
    StepInfo info;
    const Gradients grads =
        generator_gradients(model, noise_batch, cfg.generator_loss, rng, &info);
    if (!std::isfinite(info.objective) || !std::isfinite(info.mean_d_fake)) {
        throw std::runtime_error("generator_step: non-finite objective or output (objective " +
                                 std::to_string(info.objective) + ", mean D(G(z)) " +
                                 std::to_string(info.mean_d_fake) + ")");
    }
    const Direction dir = cfg.generator_loss == GeneratorLoss::Saturating ? Direction::Descend
                                                                          : Direction::Ascend;
    sgd_momentum_step(model.generator, grads, cfg.lr_g, cfg.momentum, dir);
    return info;
}

/// Alternating minibatch training: per iteration, k discriminator steps on
/// fresh data/noise minibatches, then one generator step on fresh noise.
/// Fully deterministic given (model bits, dataset bits, cfg). On a
/// non-finite loss the model is rolled back to the start of the failing
/// iteration and the metrics collected so far are returned with
/// `aborted` set.
inline TrainMetrics train(GanModel& model, const Matrix& dataset, const TrainConfig& cfg,
                          const TrainHooks& hooks = {}) {
    cfg.validate();
    model.validate();
    if (dataset.rows() < cfg.batch) {
        throw std::invalid_argument("train: dataset smaller than one minibatch");
    }
    TrainMetrics metrics;
    if (cfg.iterations == 0) return metrics;

    RngState rng(cfg.seed);
    RngState diag_rng = rng.split();  // diagnostics never disturb the training stream

    double data_spread = 0.0;
    if (cfg.collapse_check_interval > 0) {
        const std::size_t n_ref = std::min<std::size_t>(256, dataset.rows());
        data_spread = detail::mean_pairwise_distance(
            detail::sample_minibatch(dataset, n_ref, diag_rng));
    }

    for (std::size_t iter = 0; iter < cfg.iterations; ++iter) {
        const GanModel snapshot = model;
        IterationRecord rec;
        rec.iteration = iter + 1;
        try {
            StepInfo d_info;
            for (std::size_t j = 0; j < cfg.k; ++j) {
                const Matrix z = model.prior.sample(cfg.batch, rng);
                const Matrix x = detail::sample_minibatch(dataset, cfg.batch, rng);
                d_info = discriminator_step(model, x, z, cfg, rng);
            }
            const Matrix z = model.prior.sample(cfg.batch, rng);
            const StepInfo g_info = generator_step(model, z, cfg, rng);

            rec.value_estimate = d_info.objective;
            rec.d_loss = -d_info.objective;
            rec.g_loss = cfg.generator_loss == GeneratorLoss::Saturating
                             ? g_info.objective
                             : -g_info.objective;
            rec.mean_d_data = d_info.mean_d_data;
            rec.mean_d_fake = d_info.mean_d_fake;
        } catch (const std::runtime_error& e) {
            model = snapshot;  // last-good parameters
            metrics.aborted = true;
            metrics.abort_reason = "iteration " + std::to_string(iter + 1) + ": " + e.what();
            return metrics;
        }

        if (cfg.collapse_check_interval > 0 &&
            (iter + 1) % cfg.collapse_check_interval == 0 && data_spread > 0.0) {
            const Matrix samples = infer(model.generator, model.prior.sample(256, diag_rng));
            rec.collapse_warning =
                detail::mean_pairwise_distance(samples) < 0.01 * data_spread;
        }
        metrics.records.push_back(rec);
        if (hooks.after_iteration) hooks.after_iteration(iter + 1, model);
    }
    return metrics;
}

/// n generator samples through forward propagation alone (infer mode).
inline Matrix sample_generator(const GanModel& model, std::size_t n, RngState& rng) {
    if (n == 0) {
        throw std::invalid_argument("sample_generator: n must be >= 1");
    }
    return infer(model.generator, model.prior.sample(n, rng));
}

/// G applied along the straight line from z_a to z_b, inclusive.
inline Matrix interpolate_latent(const GanModel& model, const Matrix& z_a, const Matrix& z_b,
                                 std::size_t steps) {
    if (z_a.rows() != 1 || z_b.rows() != 1 || z_a.cols() != model.prior.dim ||
        z_b.cols() != model.prior.dim) {
        throw std::invalid_argument("interpolate_latent: endpoints must be 1 x prior_dim");
    }
    if (steps < 2) {
        throw std::invalid_argument("interpolate_latent: needs at least 2 steps");
    }
    Matrix line(steps, model.prior.dim);
    for (std::size_t i = 0; i < steps; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(steps - 1);
        for (std::size_t c = 0; c < model.prior.dim; ++c) {
            line(i, c) = (1.0 - t) * z_a(0, c) + t * z_b(0, c);
        }
    }
    return infer(model.generator, line);
}

}  // namespace ganlab
