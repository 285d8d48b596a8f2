#include <doctest.h>

#include <string>

#include "ebfission/config.hpp"
#include "ebfission/error.hpp"

using namespace ebfission;

namespace {

std::string message_of(const std::string& text, const CliOverrides& ov = {}) {
  try {
    parse_cli_config(text, ov, "exp.toml");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

const char* kMinimal = R"(
seed = 9
n = 50
mc_reps = 3
[prior]
atoms = [1.0, 4.0, 7.0]
[[likelihood]]
kind = "gaussian"
[[estimator]]
kind = "mle"
)";

}  // namespace

TEST_CASE("benchmark defaults parse into two experiments") {
  const auto cli = parse_cli_config(benchmark_defaults_toml(11));
  REQUIRE(cli.experiments.size() == 2);
  CHECK(cli.seed == 11);
  CHECK(cli.out_dir == ".");
  for (const auto& e : cli.experiments) {
    CHECK(e.n == 1000);
    CHECK(e.mc_reps == 100);
    CHECK(e.base_seed == 11);
    CHECK(e.prior == PriorSpec::uniform({1.0, 4.0, 7.0}));
    REQUIRE(e.estimators.size() == 5);
    CHECK(e.estimators[0].label() == "mle");
    CHECK(e.estimators[1].label() == "npmle");
    CHECK(e.estimators[1].npmle.grid_size == 300);
    CHECK(e.estimators[2].label() == "aurora_g0.04_r100");
    CHECK(e.estimators[3].label() == "aurora_g0.14_r100");
    CHECK(e.estimators[4].label() == "oracle_bayes");
  }
  CHECK(cli.experiments[0].lik.kind() == LikelihoodKind::Gaussian);
  CHECK(cli.experiments[0].lik.variance() == 1.0);
  CHECK(cli.experiments[1].lik.kind() == LikelihoodKind::Poisson);
}

TEST_CASE("flag overrides take precedence") {
  CliOverrides ov;
  ov.seed = 123;
  ov.mc_reps = 2;
  ov.threads = 4;
  ov.out_dir = "elsewhere";
  const auto cli = parse_cli_config("threads = 1\n" + std::string(kMinimal), ov);
  CHECK(cli.seed == 123);
  CHECK(cli.threads == 4);
  CHECK(cli.out_dir == "elsewhere");
  CHECK(cli.experiments[0].mc_reps == 2);
  CHECK(cli.experiments[0].base_seed == 123);
  CHECK(cli.experiments[0].threads == 4);
}

TEST_CASE("single likelihood table and explicit weights") {
  const auto cli = parse_cli_config(R"(
n = 10
[prior]
atoms = [2, 5]
weights = [0.25, 0.75]
[likelihood]
kind = "gaussian"
variance = 2.5
[estimator]
kind = "aurora"
g_split = 0.2
)");
  REQUIRE(cli.experiments.size() == 1);
  const auto& e = cli.experiments[0];
  CHECK(e.prior.weights() == std::vector<double>{0.25, 0.75});
  CHECK(e.lik.variance() == 2.5);
  CHECK(e.estimators[0].fission_reps == 100);
  CHECK(e.estimators[0].g_split == 0.2);
}

TEST_CASE("config errors name the source") {
  CHECK(message_of("n = [").find("exp.toml:1") == 0);
  CHECK(message_of(std::string(kMinimal) + "bogus = 1\n").find("unknown key 'bogus'") != std::string::npos);
  CHECK(message_of(R"(
[[likelihood]]
kind = "gaussian"
)").find("estimator") != std::string::npos);
  CHECK(message_of(R"(
[[estimator]]
kind = "mle"
)").find("likelihood") != std::string::npos);
  CHECK(message_of(R"(
[prior]
atoms = [-1.0, 2.0]
[[likelihood]]
kind = "poisson"
[[estimator]]
kind = "mle"
)").find("poisson experiment") != std::string::npos);
  CHECK(message_of(R"(
[[likelihood]]
kind = "gaussian"
[[estimator]]
kind = "aurora"
g_split = 1.5
)").find("fraction outside (0,1)") != std::string::npos);
  CHECK(message_of(R"(
[[likelihood]]
kind = "cauchy"
[[estimator]]
kind = "mle"
)") != "");
  CHECK(message_of(R"(
[[likelihood]]
kind = "gaussian"
variance = -1.0
[[estimator]]
kind = "mle"
)") != "");
  CHECK(message_of(R"(
[prior]
atoms = [1.0, 2.0]
weights = [0.5, 0.6]
[[likelihood]]
kind = "gaussian"
[[estimator]]
kind = "mle"
)").find("[prior]") != std::string::npos);
  CHECK_THROWS_AS(load_cli_config("/nonexistent/exp.toml"), ConfigError);
  CHECK(message_of(std::string(kMinimal), CliOverrides{std::nullopt, std::size_t{0}, std::nullopt, std::nullopt}) != "");
}

TEST_CASE("missing file message carries the path") {
  try {
    load_cli_config("/nonexistent/exp.toml");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("/nonexistent/exp.toml") != std::string::npos);
  }
}

TEST_CASE("prior and likelihood TOML round trip") {
  for (const auto& prior : {PriorSpec::uniform({1.0, 4.0, 7.0}), PriorSpec::point_mass(3.0),
                            PriorSpec({-2.5, 0.1, 1e6}, {0.1, 0.2, 0.7}),
                            PriorSpec({1.0, 2.0}, {1.0 / 3.0, 2.0 / 3.0})}) {
    CHECK(prior_from_toml(prior_to_toml(prior)) == prior);
  }
  for (const auto& lik : {LikelihoodModel::gaussian(1.0), LikelihoodModel::gaussian(0.3),
                          LikelihoodModel::poisson()}) {
    const auto back = likelihood_from_toml(likelihood_to_toml(lik));
    CHECK(back.kind() == lik.kind());
    CHECK(back.variance() == lik.variance());
  }
}

TEST_CASE("shipped config matches the built-in defaults") {
  const auto shipped = load_cli_config(std::string(EBFISSION_SOURCE_DIR) + "/configs/benchmark.toml");
  const auto builtin = parse_cli_config(benchmark_defaults_toml());
  CHECK(shipped.out_dir == "results");
  CHECK(shipped.seed == builtin.seed);
  REQUIRE(shipped.experiments.size() == builtin.experiments.size());
  for (std::size_t i = 0; i < shipped.experiments.size(); ++i) {
    const auto& a = shipped.experiments[i];
    const auto& b = builtin.experiments[i];
    CHECK(a.lik == b.lik);
    CHECK(a.prior == b.prior);
    CHECK(a.n == b.n);
    CHECK(a.mc_reps == b.mc_reps);
    REQUIRE(a.estimators.size() == b.estimators.size());
    for (std::size_t e = 0; e < a.estimators.size(); ++e) CHECK(a.estimators[e].label() == b.estimators[e].label());
  }
}
