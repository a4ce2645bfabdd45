#pragma once

// Model checkpoints: a versioned, self-describing text format that
// round-trips every parameter bitwise. Doubles are written as C hexfloats
// ("%a"), which encode the exact binary64 value, and read back with strtod
// (istream extraction of hexfloats is not portable).
//
// MLP record layout (whitespace-separated tokens after the header line):
//
//   ganlab-mlp 1
//   layers <L>
//   layer <in> <out> <activation> <pieces> <dropout-hexfloat>   (L times)
//   block <layer> <piece>
//   W <rows> <cols> <rows*cols hexfloats>
//   b <rows> <cols> <cols hexfloats>                            (one block
//                                                   per layer/piece, in order)
//   end
//
// A GAN record is a "ganlab-gan 1" header, one "prior" line, then the
// generator and discriminator MLP records back to back. Optimizer state
// (momentum velocity) is deliberately not persisted: a loaded model starts
// with zero velocity.

#include <cstdio>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ganlab/gan.hpp"
#include "ganlab/io.hpp"
#include "ganlab/matrix.hpp"
#include "ganlab/mlp.hpp"

namespace ganlab {

namespace detail {

inline std::string hex_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%a", v);
    return buf;
}

inline std::string next_token(std::istream& in, const char* context) {
    std::string token;
    if (!(in >> token)) {
        throw std::runtime_error(std::string("checkpoint: truncated record, expected ") +
                                 context);
    }
    return token;
}

inline void expect_token(std::istream& in, const std::string& want) {
    const std::string got = next_token(in, ("'" + want + "'").c_str());
    if (got != want) {
        throw std::runtime_error("checkpoint: expected '" + want + "', found '" + got + "'");
    }
}

inline std::size_t read_count(std::istream& in, const char* context) {
    const std::string token = next_token(in, context);
    try {
        return static_cast<std::size_t>(std::stoull(token));
    } catch (const std::exception&) {
        throw std::runtime_error(std::string("checkpoint: bad count '") + token + "' for " +
                                 context);
    }
}

inline double read_hex_double(std::istream& in, const char* context) {
    const std::string token = next_token(in, context);
    double v = 0.0;
    if (!parse_double(token, v)) {
        throw std::runtime_error(std::string("checkpoint: bad number '") + token + "' for " +
                                 context);
    }
    return v;
}

inline Activation parse_activation(const std::string& name) {
    for (Activation a : {Activation::Linear, Activation::Relu, Activation::Sigmoid,
                         Activation::Tanh, Activation::Maxout}) {
        if (name == activation_name(a)) return a;
    }
    throw std::runtime_error("checkpoint: unknown activation '" + name + "'");
}

inline void write_matrix(std::ostringstream& out, const char* tag, const Matrix& m) {
    out << tag << ' ' << m.rows() << ' ' << m.cols();
    for (double v : m.values()) out << ' ' << hex_double(v);
    out << '\n';
}

inline Matrix read_matrix(std::istream& in, const char* tag, std::size_t want_rows,
                          std::size_t want_cols) {
    expect_token(in, tag);
    const std::size_t rows = read_count(in, "matrix rows");
    const std::size_t cols = read_count(in, "matrix cols");
    if (rows != want_rows || cols != want_cols) {
        throw std::runtime_error("checkpoint: block '" + std::string(tag) + "' is " +
                                 std::to_string(rows) + "x" + std::to_string(cols) +
                                 ", layer spec implies " + std::to_string(want_rows) + "x" +
                                 std::to_string(want_cols));
    }
    Matrix m(rows, cols);
    for (double& v : m.values()) v = read_hex_double(in, "matrix entry");
    return m;
}

}  // namespace detail

inline std::string serialize_mlp(const Mlp& mlp) {
    std::ostringstream out;
    out << "ganlab-mlp 1\n";
    out << "layers " << mlp.specs.size() << '\n';
    for (const auto& s : mlp.specs) {
        out << "layer " << s.in_dim << ' ' << s.out_dim << ' ' << activation_name(s.activation)
            << ' ' << s.pieces() << ' ' << detail::hex_double(s.dropout_rate) << '\n';
    }
    for (std::size_t l = 0; l < mlp.params.size(); ++l) {
        for (std::size_t p = 0; p < mlp.params[l].weights.size(); ++p) {
            out << "block " << l << ' ' << p << '\n';
            detail::write_matrix(out, "W", mlp.params[l].weights[p]);
            detail::write_matrix(out, "b", mlp.params[l].biases[p]);
        }
    }
    out << "end\n";
    return out.str();
}

inline Mlp parse_mlp(std::istream& in) {
    detail::expect_token(in, "ganlab-mlp");
    const std::string version = detail::next_token(in, "format version");
    if (version != "1") {
        throw std::runtime_error("checkpoint: unsupported ganlab-mlp version '" + version + "'");
    }
    detail::expect_token(in, "layers");
    const std::size_t n_layers = detail::read_count(in, "layer count");
    if (n_layers == 0) {
        throw std::runtime_error("checkpoint: record declares zero layers");
    }

    Mlp mlp;
    for (std::size_t l = 0; l < n_layers; ++l) {
        detail::expect_token(in, "layer");
        LayerSpec s;
        s.in_dim = detail::read_count(in, "layer in_dim");
        s.out_dim = detail::read_count(in, "layer out_dim");
        s.activation = detail::parse_activation(detail::next_token(in, "activation name"));
        s.maxout_pieces = detail::read_count(in, "piece count");
        s.dropout_rate = detail::read_hex_double(in, "dropout rate");
        if (s.activation != Activation::Maxout && s.maxout_pieces != 1) {
            throw std::runtime_error("checkpoint: non-maxout layer " + std::to_string(l) +
                                     " declares " + std::to_string(s.maxout_pieces) + " pieces");
        }
        mlp.specs.push_back(s);
    }
    detail::validate_specs(mlp.specs);

    for (std::size_t l = 0; l < n_layers; ++l) {
        const LayerSpec& s = mlp.specs[l];
        LayerBlocks blocks, vel;
        for (std::size_t p = 0; p < s.pieces(); ++p) {
            detail::expect_token(in, "block");
            const std::size_t file_l = detail::read_count(in, "block layer index");
            const std::size_t file_p = detail::read_count(in, "block piece index");
            if (file_l != l || file_p != p) {
                throw std::runtime_error("checkpoint: block out of order, found (" +
                                         std::to_string(file_l) + "," + std::to_string(file_p) +
                                         "), expected (" + std::to_string(l) + "," +
                                         std::to_string(p) + ")");
            }
            blocks.weights.push_back(detail::read_matrix(in, "W", s.in_dim, s.out_dim));
            blocks.biases.push_back(detail::read_matrix(in, "b", 1, s.out_dim));
            vel.weights.emplace_back(s.in_dim, s.out_dim, 0.0);
            vel.biases.emplace_back(1, s.out_dim, 0.0);
        }
        mlp.params.push_back(std::move(blocks));
        mlp.velocity.push_back(std::move(vel));
    }
    detail::expect_token(in, "end");
    return mlp;
}

inline Mlp parse_mlp(const std::string& text) {
    std::istringstream in(text);
    return parse_mlp(in);
}

inline std::string serialize_gan(const GanModel& model) {
    std::ostringstream out;
    out << "ganlab-gan 1\n";
    out << "prior ";
    if (model.prior.kind == NoisePrior::Kind::Uniform) {
        out << "uniform " << detail::hex_double(model.prior.lo) << ' '
            << detail::hex_double(model.prior.hi);
    } else {
        out << "gaussian " << detail::hex_double(model.prior.mean) << ' '
            << detail::hex_double(model.prior.stddev);
    }
    out << ' ' << model.prior.dim << '\n';
    out << serialize_mlp(model.generator);
    out << serialize_mlp(model.discriminator);
    return out.str();
}

inline GanModel parse_gan(std::istream& in) {
    detail::expect_token(in, "ganlab-gan");
    const std::string version = detail::next_token(in, "format version");
    if (version != "1") {
        throw std::runtime_error("checkpoint: unsupported ganlab-gan version '" + version + "'");
    }
    detail::expect_token(in, "prior");
    const std::string kind = detail::next_token(in, "prior kind");
    const double a = detail::read_hex_double(in, "prior parameter");
    const double b = detail::read_hex_double(in, "prior parameter");
    const std::size_t dim = detail::read_count(in, "prior dim");

    GanModel model;
    if (kind == "uniform") {
        model.prior = NoisePrior::uniform(a, b, dim);
    } else if (kind == "gaussian") {
        model.prior = NoisePrior::gaussian(a, b, dim);
    } else {
        throw std::runtime_error("checkpoint: unknown prior kind '" + kind + "'");
    }
    model.generator = parse_mlp(in);
    model.discriminator = parse_mlp(in);
    model.validate();
    return model;
}

inline GanModel parse_gan(const std::string& text) {
    std::istringstream in(text);
    return parse_gan(in);
}

inline void save_mlp(const Mlp& mlp, const std::string& path) {
    write_file_atomic(path, serialize_mlp(mlp));
}

inline Mlp load_mlp(const std::string& path) {
    try {
        return parse_mlp(read_file(path));
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

inline void save_gan(const GanModel& model, const std::string& path) {
    write_file_atomic(path, serialize_gan(model));
}

inline GanModel load_gan(const std::string& path) {
    try {
        return parse_gan(read_file(path));
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

}  // namespace ganlab
