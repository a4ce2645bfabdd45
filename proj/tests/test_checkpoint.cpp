#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <string>

#include "ganlab/checkpoint.hpp"
#include "ganlab/gan.hpp"
#include "helpers.hpp"

using ganlab::Activation;
using ganlab::GanModel;
using ganlab::Matrix;
using ganlab::Mlp;
using ganlab::NoisePrior;
using ganlab::RngState;

namespace {

Mlp messy_mlp(std::uint64_t seed) {
    RngState rng(seed);
    Mlp mlp = ganlab::init_mlp({{2, 5, Activation::Relu, 1, 0.25},
                                {5, 4, Activation::Maxout, 3},
                                {4, 1, Activation::Sigmoid}},
                               rng);
    // Nudge the parameters off the init lattice, including awkward values.
    mlp.params[0].weights[0](0, 0) = 0.1 + 0.2;  // classic non-representable sum
    mlp.params[0].biases[0](0, 1) = -0.0;
    mlp.params[1].weights[2](3, 1) = 5e-324;  // smallest subnormal
    mlp.params[1].biases[1](0, 3) = 1.7976931348623157e308;
    mlp.params[2].weights[0](2, 0) = -1.0 / 3.0;
    return mlp;
}

bool bitwise_equal(const Matrix& a, const Matrix& b) {
    if (!a.same_shape(b)) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double x = a.values()[i], y = b.values()[i];
        if (std::memcmp(&x, &y, sizeof x) != 0) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("network round-trips bitwise, including subnormals and signed zero") {
    const Mlp original = messy_mlp(90);
    const std::string text = ganlab::serialize_mlp(original);
    const Mlp back = ganlab::parse_mlp(text);

    REQUIRE(back.specs.size() == original.specs.size());
    for (std::size_t l = 0; l < original.specs.size(); ++l) {
        CHECK(back.specs[l].in_dim == original.specs[l].in_dim);
        CHECK(back.specs[l].out_dim == original.specs[l].out_dim);
        CHECK(back.specs[l].activation == original.specs[l].activation);
        CHECK(back.specs[l].maxout_pieces == original.specs[l].maxout_pieces);
        CHECK(back.specs[l].dropout_rate == original.specs[l].dropout_rate);
        for (std::size_t p = 0; p < original.specs[l].pieces(); ++p) {
            CHECK(bitwise_equal(back.params[l].weights[p], original.params[l].weights[p]));
            CHECK(bitwise_equal(back.params[l].biases[p], original.params[l].biases[p]));
        }
    }
    CHECK(std::signbit(back.params[0].biases[0](0, 1)));

    // Serialization is canonical: a second round trip is byte-identical.
    CHECK(ganlab::serialize_mlp(back) == text);
}

TEST_CASE("optimizer velocity is not persisted and loads as zero") {
    Mlp mlp = messy_mlp(91);
    mlp.velocity[0].weights[0](0, 0) = 42.0;  // pretend mid-training state
    const Mlp back = ganlab::parse_mlp(ganlab::serialize_mlp(mlp));
    for (const auto& layer : back.velocity)
        for (const auto& block : layer.weights)
            for (double v : block.values()) CHECK(v == 0.0);
}

TEST_CASE("gan record carries the prior and both networks") {
    RngState rng(92);
    GanModel model{ganlab::init_mlp({{2, 6, Activation::Tanh}, {6, 1, Activation::Linear}}, rng),
                   ganlab::init_mlp({{1, 6, Activation::Tanh}, {6, 1, Activation::Sigmoid}}, rng),
                   NoisePrior::gaussian(0.25, 1.5, 2)};
    const std::string text = ganlab::serialize_gan(model);
    const GanModel back = ganlab::parse_gan(text);

    CHECK(back.prior.kind == NoisePrior::Kind::Gaussian);
    CHECK(back.prior.mean == 0.25);
    CHECK(back.prior.stddev == 1.5);
    CHECK(back.prior.dim == 2);
    CHECK(ganlab::serialize_gan(back) == text);

    GanModel uniform_model = model;
    uniform_model.prior = NoisePrior::uniform(-0.75, 0.5, 2);
    const GanModel back2 = ganlab::parse_gan(ganlab::serialize_gan(uniform_model));
    CHECK(back2.prior.kind == NoisePrior::Kind::Uniform);
    CHECK(back2.prior.lo == -0.75);
    CHECK(back2.prior.hi == 0.5);
}

TEST_CASE("file save/load round-trip") {
    testutil::TempDir dir("ckpt");
    const Mlp mlp = messy_mlp(93);
    const std::string path = dir.file("net.ckpt");
    ganlab::save_mlp(mlp, path);
    const Mlp back = ganlab::load_mlp(path);
    CHECK(ganlab::serialize_mlp(back) == ganlab::serialize_mlp(mlp));

    CHECK_THROWS_WITH(ganlab::load_mlp(dir.file("nope.ckpt")),
                      Catch::Matchers::ContainsSubstring("nope.ckpt"));
}

TEST_CASE("parser rejects malformed records with descriptive errors") {
    const Mlp mlp = messy_mlp(94);
    const std::string good = ganlab::serialize_mlp(mlp);

    SECTION("wrong header") {
        CHECK_THROWS_WITH(ganlab::parse_mlp("bogus 1\n"),
                          Catch::Matchers::ContainsSubstring("ganlab-mlp"));
    }
    SECTION("unsupported version") {
        std::string bad = good;
        bad.replace(bad.find("ganlab-mlp 1"), 12, "ganlab-mlp 9");
        CHECK_THROWS_WITH(ganlab::parse_mlp(bad),
                          Catch::Matchers::ContainsSubstring("version"));
    }
    SECTION("truncated stream") {
        CHECK_THROWS_AS(ganlab::parse_mlp(good.substr(0, good.size() / 2)),
                        std::runtime_error);
    }
    SECTION("corrupted number") {
        std::string bad = good;
        const auto pos = bad.find("0x");
        REQUIRE(pos != std::string::npos);
        bad.replace(pos, 2, "zz");
        CHECK_THROWS_AS(ganlab::parse_mlp(bad), std::runtime_error);
    }
    SECTION("declared shape disagrees with layer spec") {
        std::string bad = good;
        const auto pos = bad.find("W 2 5");
        REQUIRE(pos != std::string::npos);
        bad.replace(pos, 5, "W 2 6");
        CHECK_THROWS_AS(ganlab::parse_mlp(bad), std::runtime_error);
    }
    SECTION("gan header on an mlp parser and vice versa") {
        RngState rng(95);
        GanModel model{
            ganlab::init_mlp({{1, 2, Activation::Tanh}}, rng),
            ganlab::init_mlp({{2, 1, Activation::Sigmoid}}, rng),
            NoisePrior::uniform(-1.0, 1.0, 1)};
        CHECK_THROWS_AS(ganlab::parse_mlp(ganlab::serialize_gan(model)), std::runtime_error);
        CHECK_THROWS_AS(ganlab::parse_gan(good), std::runtime_error);
    }
}

TEST_CASE("parsed gan models are validated") {
    RngState rng(96);
    GanModel model{ganlab::init_mlp({{1, 2, Activation::Tanh}, {2, 1, Activation::Linear}}, rng),
                   ganlab::init_mlp({{1, 2, Activation::Tanh}, {2, 1, Activation::Sigmoid}}, rng),
                   NoisePrior::uniform(-1.0, 1.0, 1)};
    std::string text = ganlab::serialize_gan(model);
    // Sabotage the prior dimension so the wiring no longer matches.
    const auto pos = text.find("prior uniform");
    REQUIRE(pos != std::string::npos);
    const auto line_end = text.find('\n', pos);
    std::string line = text.substr(pos, line_end - pos);
    const auto last_space = line.rfind(' ');
    line.replace(last_space + 1, std::string::npos, "3");
    text.replace(pos, line_end - pos, line);
    CHECK_THROWS_AS(ganlab::parse_gan(text), std::invalid_argument);
}

TEST_CASE("checkpoints survive a real training run bit-for-bit") {
    RngState rng(97);
    GanModel model{ganlab::init_mlp({{1, 8, Activation::Tanh}, {8, 1, Activation::Linear}}, rng),
                   ganlab::init_mlp({{1, 8, Activation::Tanh}, {8, 1, Activation::Sigmoid}}, rng),
                   NoisePrior::uniform(-1.0, 1.0, 1)};
    Matrix data(128, 1);
    for (auto& v : data.values()) v = rng.next_gaussian(1.0, 0.3);
    ganlab::TrainConfig cfg;
    cfg.iterations = 30;
    cfg.batch = 16;
    cfg.seed = 5;
    ganlab::train(model, data, cfg);

    testutil::TempDir dir("ckpt-train");
    const std::string path = dir.file("gan.ckpt");
    ganlab::save_gan(model, path);
    const GanModel back = ganlab::load_gan(path);

    for (std::size_t l = 0; l < model.generator.params.size(); ++l)
        for (std::size_t p = 0; p < model.generator.params[l].weights.size(); ++p) {
            CHECK(bitwise_equal(back.generator.params[l].weights[p],
                                model.generator.params[l].weights[p]));
            CHECK(bitwise_equal(back.generator.params[l].biases[p],
                                model.generator.params[l].biases[p]));
        }
    for (std::size_t l = 0; l < model.discriminator.params.size(); ++l)
        for (std::size_t p = 0; p < model.discriminator.params[l].weights.size(); ++p) {
            CHECK(bitwise_equal(back.discriminator.params[l].weights[p],
                                model.discriminator.params[l].weights[p]));
        }

    // The reloaded model continues training exactly like the original
    // (velocity restarts at zero for both, so the streams coincide).
    GanModel reloaded = back;
    GanModel original = ganlab::parse_gan(ganlab::serialize_gan(model));
    ganlab::TrainConfig more = cfg;
    more.iterations = 10;
    more.seed = 6;
    const auto m1 = ganlab::train(reloaded, data, more);
    const auto m2 = ganlab::train(original, data, more);
    REQUIRE(m1.records.size() == m2.records.size());
    for (std::size_t i = 0; i < m1.records.size(); ++i) {
        CHECK(m1.records[i].value_estimate == m2.records[i].value_estimate);
    }
    CHECK(ganlab::serialize_gan(reloaded) == ganlab::serialize_gan(original));
}
