#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "ganlab/config.hpp"
#include "helpers.hpp"

using ganlab::Activation;
using ganlab::ExperimentConfig;
using ganlab::GeneratorLoss;
using ganlab::NoisePrior;

namespace {

const char* kFullConfig = R"(# full demo config
version = 1
out_dir = runs/demo

seed = 42
dataset_size = 5000
iterations = 1500          # inline comment
k = 2
batch = 32
lr_d = 0.05
lr_g = 0.025
momentum = 0.5
generator_loss = saturating
collapse_check_interval = 50
prior = gaussian 0 1 dim=2
data = mixture 0.3 -1 0.5 0.7 2 1.5
gen.layer = 2 16 tanh
gen.layer = 16 1 linear
disc.layer = 1 12 maxout(3) dropout=0.2
disc.layer = 12 1 sigmoid
)";

}  // namespace

TEST_CASE("full config parses field by field") {
    const ExperimentConfig cfg = ganlab::parse_config(kFullConfig, "demo.cfg");
    CHECK(cfg.version == 1);
    CHECK(cfg.out_dir == "runs/demo");
    CHECK(cfg.train.seed == 42);
    CHECK(cfg.dataset_size == 5000);
    CHECK(cfg.train.iterations == 1500);
    CHECK(cfg.train.k == 2);
    CHECK(cfg.train.batch == 32);
    CHECK(cfg.train.lr_d == 0.05);
    CHECK(cfg.train.lr_g == 0.025);
    CHECK(cfg.train.momentum == 0.5);
    CHECK(cfg.train.generator_loss == GeneratorLoss::Saturating);
    CHECK(cfg.train.collapse_check_interval == 50);

    CHECK(cfg.prior.kind == NoisePrior::Kind::Gaussian);
    CHECK(cfg.prior.mean == 0.0);
    CHECK(cfg.prior.stddev == 1.0);
    CHECK(cfg.prior.dim == 2);

    REQUIRE_FALSE(cfg.data_is_idx);
    const auto* mix = cfg.data.as_mixture();
    REQUIRE(mix != nullptr);
    REQUIRE(mix->weights.size() == 2);
    CHECK(mix->weights[0] == 0.3);
    CHECK(mix->components[1].mean == 2.0);
    CHECK(mix->components[1].stddev == 1.5);

    REQUIRE(cfg.gen_layers.size() == 2);
    CHECK(cfg.gen_layers[0].in_dim == 2);
    CHECK(cfg.gen_layers[0].out_dim == 16);
    CHECK(cfg.gen_layers[0].activation == Activation::Tanh);
    REQUIRE(cfg.disc_layers.size() == 2);
    CHECK(cfg.disc_layers[0].activation == Activation::Maxout);
    CHECK(cfg.disc_layers[0].maxout_pieces == 3);
    CHECK(cfg.disc_layers[0].dropout_rate == 0.2);
    CHECK(cfg.disc_layers[1].activation == Activation::Sigmoid);
}

TEST_CASE("serialize/parse is a lossless round-trip") {
    const ExperimentConfig cfg = ganlab::parse_config(kFullConfig, "demo.cfg");
    const std::string text = ganlab::serialize_config(cfg);
    const ExperimentConfig back = ganlab::parse_config(text, "round.cfg");
    CHECK(ganlab::serialize_config(back) == text);

    // Awkward reals survive exactly.
    ExperimentConfig tricky = cfg;
    tricky.train.lr_d = 0.1 + 0.2;
    tricky.train.momentum = 1.0 / 3.0;
    tricky.prior = NoisePrior::uniform(-1.0 / 7.0, 2.0 / 7.0, 1);
    tricky.gen_layers[0].in_dim = 1;
    const ExperimentConfig t2 =
        ganlab::parse_config(ganlab::serialize_config(tricky), "tricky.cfg");
    CHECK(t2.train.lr_d == tricky.train.lr_d);
    CHECK(t2.train.momentum == tricky.train.momentum);
    CHECK(t2.prior.lo == tricky.prior.lo);
    CHECK(t2.prior.hi == tricky.prior.hi);
}

TEST_CASE("CRLF input and whitespace-heavy lines parse") {
    const std::string text =
        "version = 1\r\n   seed=7\r\n\r\ndata = gaussian 0 1\r\n"
        "gen.layer = 1 4 tanh\r\ngen.layer = 4 1 linear\r\n"
        "disc.layer = 1 4 tanh\r\ndisc.layer = 4 1 sigmoid\r\n";
    const ExperimentConfig cfg = ganlab::parse_config(text, "crlf.cfg");
    CHECK(cfg.train.seed == 7);
    CHECK(cfg.gen_layers.size() == 2);
}

TEST_CASE("data source variants") {
    auto base = [](const std::string& data_line) {
        return "data = " + data_line +
               "\ngen.layer = 1 4 tanh\ngen.layer = 4 1 linear\n"
               "disc.layer = 1 4 tanh\ndisc.layer = 4 1 sigmoid\n";
    };

    const auto g = ganlab::parse_config(base("gaussian 2 0.5"), "t.cfg");
    REQUIRE(g.data.as_gaussian() != nullptr);
    CHECK(g.data.as_gaussian()->mean == 2.0);

    const auto u = ganlab::parse_config(base("uniform -3 4"), "t.cfg");
    REQUIRE(u.data.as_uniform() != nullptr);
    CHECK(u.data.as_uniform()->hi == 4.0);

    const auto r = ganlab::parse_config(base("ring2d 1 0.1"), "t.cfg");
    REQUIRE(r.data.as_ring2d() != nullptr);

    const auto idx = ganlab::parse_config(base("idx data dir/images file.idx"), "t.cfg");
    CHECK(idx.data_is_idx);
    CHECK(idx.idx_path == "data dir/images file.idx");  // spaces preserved
}

TEST_CASE("diagnostics carry the source name and line number") {
    auto fails_with = [](const std::string& text, const std::string& needle) {
        try {
            ganlab::parse_config(text, "bad.cfg");
            FAIL("expected parse_config to reject: " << text);
        } catch (const std::runtime_error& e) {
            INFO("message: " << e.what());
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
            CHECK(std::string(e.what()).find("bad.cfg:") == 0);
        }
    };

    fails_with("wibble = 3\n", "bad.cfg:1");
    fails_with("wibble = 3\n", "unknown key");
    fails_with("\n\nseed = 1\nseed = 2\n", "bad.cfg:4");
    fails_with("seed = 1\nseed = 2\n", "duplicate");
    fails_with("seed = banana\n", "not a non-negative integer");
    fails_with("lr_d = fast\n", "not a number");
    fails_with("version = 2\n", "version");
    fails_with("seed\n", "expected 'key = value'");
    fails_with("seed =\n", "no value");
    fails_with("= 3\n", "empty key");
    fails_with("generator_loss = softplus\n", "generator_loss");
    fails_with("prior = uniform -1 1\n", "prior");
    fails_with("prior = poisson 1 2 dim=1\n", "prior");
    fails_with("prior = uniform 1 -1 dim=1\n", "prior");
    fails_with("data = gaussian 0\n", "data");
    fails_with("data = gaussian 0 -1\n", "data");
    fails_with("data = idx\n", "idx");
    fails_with("data = mixture 0.5 0 1 0.6 1 1\n", "data");  // weights sum to 1.1
    fails_with("gen.layer = 1 4\n", "layer");
    fails_with("gen.layer = 1 4 softplus\n", "unknown activation");
    fails_with("gen.layer = 1 4 maxout\n", "piece count");
    fails_with("gen.layer = 1 4 tanh(2)\n", "only maxout");
    fails_with("gen.layer = 1 4 maxout(\n", "unterminated");
    fails_with("gen.layer = 1 4 tanh dropout=1.0\n", "dropout");
    fails_with("gen.layer = 1 4 tanh dropout=-0.1\n", "dropout");
    fails_with("gen.layer = 1 4 tanh dropout=0.5 extra\n", "layer");

    // Whole-file problems are reported at line 0.
    fails_with("seed = 1\n", "no gen.layer");
    fails_with("gen.layer = 1 4 tanh\ngen.layer = 4 1 linear\nseed = 1\n", "no disc.layer");
    // Layer chain breaks surface through validation.
    fails_with(
        "gen.layer = 1 4 tanh\ngen.layer = 5 1 linear\n"
        "disc.layer = 1 4 tanh\ndisc.layer = 4 1 sigmoid\n",
        "bad.cfg:0");
    // Train parameter problems too.
    fails_with(
        "momentum = 1.5\ngen.layer = 1 4 tanh\ngen.layer = 4 1 linear\n"
        "disc.layer = 1 4 tanh\ndisc.layer = 4 1 sigmoid\n",
        "momentum");
}

TEST_CASE("config hashing is stable and content-sensitive") {
    // FNV-1a with the standard 64-bit offset basis and prime.
    CHECK(ganlab::fnv1a64("") == 14695981039346656037ULL);
    CHECK(ganlab::fnv1a64("a") == 12638187200555641996ULL);
    const ExperimentConfig cfg = ganlab::parse_config(kFullConfig, "demo.cfg");
    const auto h1 = ganlab::fnv1a64(ganlab::serialize_config(cfg));
    ExperimentConfig chg = cfg;
    chg.train.seed += 1;
    const auto h2 = ganlab::fnv1a64(ganlab::serialize_config(chg));
    CHECK(h1 != h2);
}

TEST_CASE("load_config reads files and names them in errors") {
    testutil::TempDir dir("cfg");
    const std::string path = dir.file("exp.cfg");
    ganlab::write_file_atomic(path, kFullConfig);
    const ExperimentConfig cfg = ganlab::load_config(path);
    CHECK(cfg.train.seed == 42);

    CHECK_THROWS_WITH(ganlab::load_config(dir.file("absent.cfg")),
                      Catch::Matchers::ContainsSubstring("absent.cfg"));
}

TEST_CASE("build_model wires the configured networks to the prior") {
    const ExperimentConfig cfg = ganlab::parse_config(kFullConfig, "demo.cfg");
    ganlab::RngState rng(1234);
    const ganlab::GanModel model = ganlab::build_model(cfg, rng);
    CHECK(model.generator.in_dim() == 2);
    CHECK(model.generator.out_dim() == 1);
    CHECK(model.discriminator.in_dim() == 1);
    CHECK(model.prior.dim == 2);
    CHECK(model.discriminator.specs[0].maxout_pieces == 3);

    // Mismatched wiring is rejected at build time.
    ExperimentConfig broken = cfg;
    broken.prior = NoisePrior::uniform(-1.0, 1.0, 5);
    ganlab::RngState rng2(1234);
    CHECK_THROWS_AS(ganlab::build_model(broken, rng2), std::invalid_argument);
}

TEST_CASE("every shipped config parses, builds, and wires to its data") {
    const char* dir = std::getenv("GANLAB_CONFIG_DIR");
    if (dir == nullptr) {
        SKIP("GANLAB_CONFIG_DIR not set; run through ctest");
    }
    std::vector<std::string> paths;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() == ".cfg") paths.push_back(entry.path().string());
    }
    std::sort(paths.begin(), paths.end());
    REQUIRE_FALSE(paths.empty());

    for (const std::string& path : paths) {
        INFO(path);
        const ExperimentConfig cfg = ganlab::load_config(path);
        ganlab::RngState rng(1);
        const ganlab::GanModel model = ganlab::build_model(cfg, rng);
        REQUIRE_FALSE(cfg.data_is_idx);  // shipped demos are synthetic
        CHECK(model.generator.out_dim() == cfg.data.dim());
        CHECK(model.discriminator.in_dim() == cfg.data.dim());
        CHECK(model.discriminator.out_dim() == 1);
        CHECK(cfg.train.iterations > 0);
    }
}
