#pragma once

// Experiment configs: one line-oriented `key = value` file describes a full
// run (training hyperparameters, noise prior, data source, both network
// architectures, seed, output directory). Parsing is strict — unknown keys,
// duplicate scalar keys and malformed values are errors naming the line —
// and serialize/parse round-trips losslessly (reals are written with enough
// digits to reproduce the exact double).
//
//   version = 1
//   out_dir = runs/demo
//   seed = 42
//   dataset_size = 10000
//   iterations = 2000
//   k = 1
//   batch = 64
//   lr_d = 0.05
//   lr_g = 0.05
//   momentum = 0.5
//   generator_loss = non_saturating        # or: saturating
//   collapse_check_interval = 100          # 0 disables the diagnostic
//   prior = uniform -1 1 dim=1             # or: gaussian <mean> <std> dim=<n>
//   data = gaussian 4 0.5                  # uniform <lo> <hi>
//                                          # mixture <w> <mean> <std> [...]
//                                          # ring2d <radius> <noise_std>
//                                          # idx <path-to-images-file>
//   gen.layer = 1 16 tanh                  # <in> <out> <activation>[(pieces)]
//   gen.layer = 16 1 linear                #   [dropout=<rate>]
//   disc.layer = 1 16 maxout(3) dropout=0.1
//   disc.layer = 16 1 sigmoid
//
// `#` starts a comment; blank lines are ignored.

#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ganlab/distributions.hpp"
#include "ganlab/gan.hpp"
#include "ganlab/io.hpp"
#include "ganlab/mlp.hpp"

namespace ganlab {

struct ExperimentConfig {
    int version = 1;
    std::string out_dir = "runs/out";
    std::size_t dataset_size = 10000;  // draws from `data` when it is synthetic
    TrainConfig train;
    NoisePrior prior = NoisePrior::uniform(-1.0, 1.0, 1);
    bool data_is_idx = false;          // true: train on the IDX file at idx_path
    std::string idx_path;
    Distribution data = Distribution::gaussian(0.0, 1.0);
    std::vector<LayerSpec> gen_layers;
    std::vector<LayerSpec> disc_layers;
};

/// 64-bit FNV-1a, used to fingerprint configs in run manifests.
inline std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

namespace detail {

struct ConfigCursor {
    std::string source;  // file name, for diagnostics
    std::size_t line = 0;

    [[noreturn]] void fail(const std::string& message) const {
        throw std::runtime_error(source + ":" + std::to_string(line) + ": " + message);
    }
};

inline std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

inline std::vector<std::string> split_tokens(const std::string& s) {
    std::vector<std::string> tokens;
    std::istringstream in(s);
    std::string t;
    while (in >> t) tokens.push_back(t);
    return tokens;
}

inline double config_real(const std::string& token, const ConfigCursor& at, const char* field) {
    double v = 0.0;
    if (!parse_double(token, v)) {
        at.fail(std::string(field) + ": '" + token + "' is not a number");
    }
    return v;
}

inline std::uint64_t config_count(const std::string& token, const ConfigCursor& at,
                                  const char* field) {
    try {
        if (!token.empty() && token[0] == '-') throw std::invalid_argument("negative");
        return std::stoull(token);
    } catch (const std::exception&) {
        at.fail(std::string(field) + ": '" + token + "' is not a non-negative integer");
    }
}

/// "<in> <out> <activation>[(pieces)] [dropout=<rate>]"
inline LayerSpec parse_layer(const std::string& value, const ConfigCursor& at) {
    const auto tokens = split_tokens(value);
    if (tokens.size() < 3 || tokens.size() > 4) {
        at.fail("layer: expected '<in> <out> <activation>[(pieces)] [dropout=<rate>]', got '" +
                value + "'");
    }
    LayerSpec s;
    s.in_dim = config_count(tokens[0], at, "layer in_dim");
    s.out_dim = config_count(tokens[1], at, "layer out_dim");

    std::string act = tokens[2];
    const auto paren = act.find('(');
    if (paren != std::string::npos) {
        if (act.back() != ')') at.fail("layer: unterminated '(' in '" + act + "'");
        s.maxout_pieces = config_count(act.substr(paren + 1, act.size() - paren - 2), at,
                                       "maxout pieces");
        act = act.substr(0, paren);
    }
    if (act == "linear") s.activation = Activation::Linear;
    else if (act == "relu") s.activation = Activation::Relu;
    else if (act == "sigmoid") s.activation = Activation::Sigmoid;
    else if (act == "tanh") s.activation = Activation::Tanh;
    else if (act == "maxout") s.activation = Activation::Maxout;
    else at.fail("layer: unknown activation '" + act + "'");
    if (s.activation == Activation::Maxout && paren == std::string::npos) {
        at.fail("layer: maxout needs a piece count, e.g. maxout(3)");
    }
    if (s.activation != Activation::Maxout && paren != std::string::npos) {
        at.fail("layer: only maxout takes a piece count");
    }

    if (tokens.size() == 4) {
        if (tokens[3].rfind("dropout=", 0) != 0) {
            at.fail("layer: expected 'dropout=<rate>', got '" + tokens[3] + "'");
        }
        s.dropout_rate = config_real(tokens[3].substr(8), at, "dropout rate");
        if (!(s.dropout_rate >= 0.0 && s.dropout_rate < 1.0)) {
            at.fail("layer: dropout rate must lie in [0,1)");
        }
    }
    return s;
}

inline NoisePrior parse_prior(const std::string& value, const ConfigCursor& at) {
    const auto tokens = split_tokens(value);
    if (tokens.size() != 4 || tokens[3].rfind("dim=", 0) != 0) {
        at.fail("prior: expected '<uniform|gaussian> <a> <b> dim=<n>', got '" + value + "'");
    }
    const double a = config_real(tokens[1], at, "prior parameter");
    const double b = config_real(tokens[2], at, "prior parameter");
    const std::size_t dim = config_count(tokens[3].substr(4), at, "prior dim");
    try {
        if (tokens[0] == "uniform") return NoisePrior::uniform(a, b, dim);
        if (tokens[0] == "gaussian") return NoisePrior::gaussian(a, b, dim);
    } catch (const std::invalid_argument& e) {
        at.fail(std::string("prior: ") + e.what());
    }
    at.fail("prior: unknown kind '" + tokens[0] + "'");
}

}  // namespace detail

inline std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "version = " << cfg.version << '\n';
    out << "out_dir = " << cfg.out_dir << '\n';
    out << "seed = " << cfg.train.seed << '\n';
    out << "dataset_size = " << cfg.dataset_size << '\n';
    out << "iterations = " << cfg.train.iterations << '\n';
    out << "k = " << cfg.train.k << '\n';
    out << "batch = " << cfg.train.batch << '\n';
    out << "lr_d = " << format_double(cfg.train.lr_d) << '\n';
    out << "lr_g = " << format_double(cfg.train.lr_g) << '\n';
    out << "momentum = " << format_double(cfg.train.momentum) << '\n';
    out << "generator_loss = "
        << (cfg.train.generator_loss == GeneratorLoss::Saturating ? "saturating"
                                                                  : "non_saturating")
        << '\n';
    out << "collapse_check_interval = " << cfg.train.collapse_check_interval << '\n';

    out << "prior = "
        << (cfg.prior.kind == NoisePrior::Kind::Uniform ? "uniform " : "gaussian ");
    if (cfg.prior.kind == NoisePrior::Kind::Uniform) {
        out << format_double(cfg.prior.lo) << ' ' << format_double(cfg.prior.hi);
    } else {
        out << format_double(cfg.prior.mean) << ' ' << format_double(cfg.prior.stddev);
    }
    out << " dim=" << cfg.prior.dim << '\n';

    out << "data = ";
    if (cfg.data_is_idx) {
        out << "idx " << cfg.idx_path;
    } else if (const auto* g = cfg.data.as_gaussian()) {
        out << "gaussian " << format_double(g->mean) << ' ' << format_double(g->stddev);
    } else if (const auto* u = cfg.data.as_uniform()) {
        out << "uniform " << format_double(u->lo) << ' ' << format_double(u->hi);
    } else if (const auto* m = cfg.data.as_mixture()) {
        out << "mixture";
        for (std::size_t c = 0; c < m->weights.size(); ++c) {
            out << ' ' << format_double(m->weights[c]) << ' '
                << format_double(m->components[c].mean) << ' '
                << format_double(m->components[c].stddev);
        }
    } else {
        const auto* r = cfg.data.as_ring2d();
        out << "ring2d " << format_double(r->radius) << ' ' << format_double(r->noise_std);
    }
    out << '\n';

    for (const auto& s : cfg.gen_layers) {
        out << "gen.layer = " << s.in_dim << ' ' << s.out_dim << ' '
            << activation_name(s.activation);
        if (s.activation == Activation::Maxout) out << '(' << s.maxout_pieces << ')';
        if (s.dropout_rate > 0.0) out << " dropout=" << format_double(s.dropout_rate);
        out << '\n';
    }
    for (const auto& s : cfg.disc_layers) {
        out << "disc.layer = " << s.in_dim << ' ' << s.out_dim << ' '
            << activation_name(s.activation);
        if (s.activation == Activation::Maxout) out << '(' << s.maxout_pieces << ')';
        if (s.dropout_rate > 0.0) out << " dropout=" << format_double(s.dropout_rate);
        out << '\n';
    }
    return out.str();
}

inline ExperimentConfig parse_config(const std::string& text, const std::string& source) {
    ExperimentConfig cfg;
    detail::ConfigCursor at{source, 0};
    std::istringstream in(text);
    std::string raw;
    std::vector<std::string> seen;  // scalar keys already assigned

    const auto mark_seen = [&](const std::string& key) {
        for (const auto& k : seen) {
            if (k == key) at.fail("duplicate key '" + key + "'");
        }
        seen.push_back(key);
    };

    while (std::getline(in, raw)) {
        ++at.line;
        const auto hash = raw.find('#');
        const std::string line = detail::trim(hash == std::string::npos ? raw
                                                                        : raw.substr(0, hash));
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            at.fail("expected 'key = value', got '" + line + "'");
        }
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty()) at.fail("empty key");
        if (value.empty()) at.fail("key '" + key + "' has no value");

        if (key == "version") {
            mark_seen(key);
            if (value != "1") at.fail("unsupported config version '" + value + "'");
            cfg.version = 1;
        } else if (key == "out_dir") {
            mark_seen(key);
            cfg.out_dir = value;
        } else if (key == "seed") {
            mark_seen(key);
            cfg.train.seed = detail::config_count(value, at, "seed");
        } else if (key == "dataset_size") {
            mark_seen(key);
            cfg.dataset_size = detail::config_count(value, at, "dataset_size");
        } else if (key == "iterations") {
            mark_seen(key);
            cfg.train.iterations = detail::config_count(value, at, "iterations");
        } else if (key == "k") {
            mark_seen(key);
            cfg.train.k = detail::config_count(value, at, "k");
        } else if (key == "batch") {
            mark_seen(key);
            cfg.train.batch = detail::config_count(value, at, "batch");
        } else if (key == "lr_d") {
            mark_seen(key);
            cfg.train.lr_d = detail::config_real(value, at, "lr_d");
        } else if (key == "lr_g") {
            mark_seen(key);
            cfg.train.lr_g = detail::config_real(value, at, "lr_g");
        } else if (key == "momentum") {
            mark_seen(key);
            cfg.train.momentum = detail::config_real(value, at, "momentum");
        } else if (key == "generator_loss") {
            mark_seen(key);
            if (value == "saturating") cfg.train.generator_loss = GeneratorLoss::Saturating;
            else if (value == "non_saturating") {
                cfg.train.generator_loss = GeneratorLoss::NonSaturating;
            } else {
                at.fail("generator_loss must be 'saturating' or 'non_saturating', got '" +
                        value + "'");
            }
        } else if (key == "collapse_check_interval") {
            mark_seen(key);
            cfg.train.collapse_check_interval = detail::config_count(value, at, key.c_str());
        } else if (key == "prior") {
            mark_seen(key);
            cfg.prior = detail::parse_prior(value, at);
        } else if (key == "data") {
            mark_seen(key);
            const auto tokens = detail::split_tokens(value);
            try {
                if (tokens[0] == "idx") {
                    if (tokens.size() < 2) at.fail("data: idx needs a file path");
                    cfg.data_is_idx = true;
                    cfg.idx_path = detail::trim(value.substr(3));  // path may contain spaces
                } else if (tokens[0] == "gaussian" && tokens.size() == 3) {
                    cfg.data = Distribution::gaussian(
                        detail::config_real(tokens[1], at, "data mean"),
                        detail::config_real(tokens[2], at, "data std"));
                } else if (tokens[0] == "uniform" && tokens.size() == 3) {
                    cfg.data = Distribution::uniform(
                        detail::config_real(tokens[1], at, "data lo"),
                        detail::config_real(tokens[2], at, "data hi"));
                } else if (tokens[0] == "ring2d" && tokens.size() == 3) {
                    cfg.data = Distribution::ring2d(
                        detail::config_real(tokens[1], at, "data radius"),
                        detail::config_real(tokens[2], at, "data noise_std"));
                } else if (tokens[0] == "mixture" && tokens.size() > 3 &&
                           (tokens.size() - 1) % 3 == 0) {
                    std::vector<double> weights;
                    std::vector<GaussianSpec> comps;
                    for (std::size_t i = 1; i + 3 <= tokens.size(); i += 3) {
                        weights.push_back(detail::config_real(tokens[i], at, "mixture weight"));
                        comps.push_back(
                            {detail::config_real(tokens[i + 1], at, "mixture mean"),
                             detail::config_real(tokens[i + 2], at, "mixture std")});
                    }
                    cfg.data = Distribution::gaussian_mixture(std::move(weights),
                                                              std::move(comps));
                } else {
                    at.fail("data: unrecognized spec '" + value + "'");
                }
            } catch (const std::invalid_argument& e) {
                at.fail(std::string("data: ") + e.what());
            }
        } else if (key == "gen.layer") {
            cfg.gen_layers.push_back(detail::parse_layer(value, at));
        } else if (key == "disc.layer") {
            cfg.disc_layers.push_back(detail::parse_layer(value, at));
        } else {
            at.fail("unknown key '" + key + "'");
        }
    }

    at.line = 0;  // whole-file diagnostics
    if (cfg.gen_layers.empty()) at.fail("config defines no gen.layer");
    if (cfg.disc_layers.empty()) at.fail("config defines no disc.layer");
    try {
        detail::validate_specs(cfg.gen_layers);
        detail::validate_specs(cfg.disc_layers);
        cfg.train.validate();
    } catch (const std::invalid_argument& e) {
        at.fail(e.what());
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    return parse_config(read_file(path), path);
}

/// Builds the (freshly initialized) model a config describes. Draws the
/// generator's weights first, then the discriminator's, from `rng`.
inline GanModel build_model(const ExperimentConfig& cfg, RngState& rng) {
    GanModel model;
    model.prior = cfg.prior;
    model.generator = init_mlp(cfg.gen_layers, rng);
    model.discriminator = init_mlp(cfg.disc_layers, rng);
    model.validate();
    return model;
}

}  // namespace ganlab
