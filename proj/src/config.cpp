#include "ebfission/config.hpp"

#include <fstream>
#include <sstream>

#include <toml.hpp>

#include "ebfission/csv.hpp"
#include "ebfission/error.hpp"

namespace ebfission {

namespace {

class Reader {
 public:
  explicit Reader(std::string_view source) : source_(source) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError(std::string(source_) + ": " + what);
  }

  void check_keys(const toml::table& tbl, std::string_view where,
                  std::initializer_list<std::string_view> allowed) const {
    for (const auto& [key, node] : tbl) {
      (void)node;
      bool ok = false;
      for (auto a : allowed) ok = ok || key.str() == a;
      if (!ok) fail("unknown key '" + std::string(key.str()) + "' in " + std::string(where));
    }
  }

  double real(const toml::node_view<const toml::node>& node, std::string_view key) const {
    if (auto v = node.value<double>()) return *v;
    fail("'" + std::string(key) + "' must be a number");
  }

  std::int64_t integer(const toml::node_view<const toml::node>& node, std::string_view key) const {
    if (auto v = node.value_exact<std::int64_t>()) return *v;
    fail("'" + std::string(key) + "' must be an integer");
  }

  std::size_t count(const toml::node_view<const toml::node>& node, std::string_view key) const {
    const auto v = integer(node, key);
    if (v < 0) fail("'" + std::string(key) + "' must be nonnegative");
    return static_cast<std::size_t>(v);
  }

  std::string text(const toml::node_view<const toml::node>& node, std::string_view key) const {
    if (auto v = node.value_exact<std::string>()) return *v;
    fail("'" + std::string(key) + "' must be a string");
  }

  std::vector<double> reals(const toml::node_view<const toml::node>& node, std::string_view key) const {
    const auto* arr = node.as_array();
    if (!arr) fail("'" + std::string(key) + "' must be an array of numbers");
    std::vector<double> out;
    for (const auto& el : *arr) {
      auto v = el.value<double>();
      if (!v) fail("'" + std::string(key) + "' must contain only numbers");
      out.push_back(*v);
    }
    return out;
  }

  /// The nodes under `key`, accepting either one table or an array of tables.
  std::vector<const toml::table*> tables(const toml::table& root, std::string_view key) const {
    std::vector<const toml::table*> out;
    const auto node = root[key];
    if (const auto* t = node.as_table()) {
      out.push_back(t);
    } else if (const auto* arr = node.as_array()) {
      for (const auto& el : *arr) {
        const auto* t = el.as_table();
        if (!t) fail("'" + std::string(key) + "' entries must be tables");
        out.push_back(t);
      }
    } else if (node) {
      fail("'" + std::string(key) + "' must be a table or array of tables");
    }
    return out;
  }

  PriorSpec prior(const toml::table& tbl) const {
    check_keys(tbl, "[prior]", {"atoms", "weights"});
    if (!tbl["atoms"]) fail("[prior] needs 'atoms'");
    auto atoms = reals(tbl["atoms"], "atoms");
    try {
      if (!tbl["weights"]) return PriorSpec::uniform(std::move(atoms));
      return PriorSpec(std::move(atoms), reals(tbl["weights"], "weights"));
    } catch (const ConfigError& e) {
      fail(std::string("[prior]: ") + e.what());
    }
  }

  LikelihoodModel likelihood(const toml::table& tbl) const {
    check_keys(tbl, "[likelihood]", {"kind", "variance"});
    if (!tbl["kind"]) fail("[likelihood] needs 'kind'");
    LikelihoodKind kind{};
    try {
      kind = parse_likelihood_kind(text(tbl["kind"], "kind"));
    } catch (const ConfigError& e) {
      fail(e.what());
    }
    if (kind == LikelihoodKind::Poisson) {
      if (tbl["variance"]) fail("Poisson likelihood takes no 'variance'");
      return LikelihoodModel::poisson();
    }
    const double variance = tbl["variance"] ? real(tbl["variance"], "variance") : 1.0;
    try {
      return LikelihoodModel::gaussian(variance);
    } catch (const ConfigError& e) {
      fail(std::string("[likelihood]: ") + e.what());
    }
  }

  EstimatorSpec estimator(const toml::table& tbl) const {
    if (!tbl["kind"]) fail("[estimator] needs 'kind'");
    const auto kind = text(tbl["kind"], "kind");
    if (kind == "mle") {
      check_keys(tbl, "mle estimator", {"kind"});
      return EstimatorSpec::mle();
    }
    if (kind == "oracle_bayes") {
      check_keys(tbl, "oracle_bayes estimator", {"kind"});
      return EstimatorSpec::oracle_bayes();
    }
    if (kind == "npmle") {
      check_keys(tbl, "npmle estimator", {"kind", "grid_size", "max_iter", "tol"});
      NpmleOptions opts;
      if (tbl["grid_size"]) opts.grid_size = count(tbl["grid_size"], "grid_size");
      if (tbl["max_iter"]) opts.max_iter = count(tbl["max_iter"], "max_iter");
      if (tbl["tol"]) opts.tol = real(tbl["tol"], "tol");
      return EstimatorSpec::npmle_default(opts);
    }
    if (kind == "aurora") {
      check_keys(tbl, "aurora estimator", {"kind", "g_split", "fission_reps"});
      if (!tbl["g_split"]) fail("aurora estimator needs 'g_split'");
      const double g = real(tbl["g_split"], "g_split");
      const std::size_t reps = tbl["fission_reps"] ? count(tbl["fission_reps"], "fission_reps") : 100;
      return EstimatorSpec::aurora(g, reps);
    }
    fail("unknown estimator kind '" + kind + "'");
  }

 private:
  std::string_view source_;
};

toml::table parse_toml(std::string_view text, std::string_view source) {
  try {
    return toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << source << ":" << e.source().begin.line << ": " << e.description();
    throw ConfigError(msg.str());
  }
}

std::string toml_float(double v) {
  auto s = format_double(v);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string toml_float_array(const std::vector<double>& values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += toml_float(values[i]);
  }
  return out + "]";
}

}  // namespace

CliConfig parse_cli_config(std::string_view toml_text, const CliOverrides& overrides,
                           std::string_view source) {
  const Reader rd(source);
  const toml::table root = parse_toml(toml_text, source);
  rd.check_keys(root, "top level",
                {"seed", "n", "mc_reps", "threads", "out", "prior", "likelihood", "estimator"});

  CliConfig cli;
  ExperimentConfig base;
  if (root["seed"]) {
    const auto s = rd.integer(root["seed"], "seed");
    if (s < 0) rd.fail("'seed' must be nonnegative");
    cli.seed = static_cast<std::uint64_t>(s);
  }
  if (root["n"]) base.n = rd.count(root["n"], "n");
  if (root["mc_reps"]) base.mc_reps = rd.count(root["mc_reps"], "mc_reps");
  if (root["threads"]) cli.threads = static_cast<unsigned>(rd.count(root["threads"], "threads"));
  if (root["out"]) cli.out_dir = rd.text(root["out"], "out");
  if (const auto* p = root["prior"].as_table()) {
    base.prior = rd.prior(*p);
  } else if (root["prior"]) {
    rd.fail("'prior' must be a table");
  }

  for (const auto* t : rd.tables(root, "estimator")) base.estimators.push_back(rd.estimator(*t));
  if (base.estimators.empty()) rd.fail("at least one [[estimator]] is required");

  if (overrides.seed) cli.seed = *overrides.seed;
  if (overrides.mc_reps) base.mc_reps = *overrides.mc_reps;
  if (overrides.threads) cli.threads = *overrides.threads;
  if (overrides.out_dir) cli.out_dir = *overrides.out_dir;
  base.base_seed = cli.seed;
  base.threads = cli.threads;

  const auto liks = rd.tables(root, "likelihood");
  if (liks.empty()) rd.fail("at least one [[likelihood]] is required");
  for (const auto* t : liks) {
    ExperimentConfig cfg = base;
    cfg.lik = rd.likelihood(*t);
    try {
      cfg.validate();
    } catch (const std::exception& e) {
      rd.fail(std::string(cfg.lik.name()) + " experiment: " + e.what());
    }
    cli.experiments.push_back(std::move(cfg));
  }
  return cli;
}

CliConfig load_cli_config(const std::filesystem::path& path, const CliOverrides& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_cli_config(buf.str(), overrides, path.string());
}

std::string prior_to_toml(const PriorSpec& prior) {
  return "[prior]\natoms = " + toml_float_array(prior.atoms()) +
         "\nweights = " + toml_float_array(prior.weights()) + "\n";
}

PriorSpec prior_from_toml(std::string_view toml_text) {
  const Reader rd("<prior>");
  const auto root = parse_toml(toml_text, "<prior>");
  const auto* t = root["prior"].as_table();
  if (!t) rd.fail("missing [prior] table");
  return rd.prior(*t);
}

std::string likelihood_to_toml(const LikelihoodModel& lik) {
  std::string out = "[likelihood]\nkind = \"" + std::string(lik.name()) + "\"\n";
  if (lik.kind() == LikelihoodKind::Gaussian) out += "variance = " + toml_float(lik.variance()) + "\n";
  return out;
}

LikelihoodModel likelihood_from_toml(std::string_view toml_text) {
  const Reader rd("<likelihood>");
  const auto root = parse_toml(toml_text, "<likelihood>");
  const auto tabs = rd.tables(root, "likelihood");
  if (tabs.size() != 1) rd.fail("expected exactly one [likelihood] table");
  return rd.likelihood(*tabs.front());
}

std::string benchmark_defaults_toml(std::uint64_t seed) {
  std::ostringstream os;
  os << "seed = " << seed << "\n"
     << "n = 1000\n"
     << "mc_reps = 100\n\n"
     << "[prior]\natoms = [1.0, 4.0, 7.0]\n\n"
     << "[[likelihood]]\nkind = \"gaussian\"\nvariance = 1.0\n\n"
     << "[[likelihood]]\nkind = \"poisson\"\n\n"
     << "[[estimator]]\nkind = \"mle\"\n\n"
     << "[[estimator]]\nkind = \"npmle\"\ngrid_size = 300\nmax_iter = 2000\ntol = 1e-8\n\n"
     << "[[estimator]]\nkind = \"aurora\"\ng_split = 0.04\nfission_reps = 100\n\n"
     << "[[estimator]]\nkind = \"aurora\"\ng_split = 0.14\nfission_reps = 100\n\n"
     << "[[estimator]]\nkind = \"oracle_bayes\"\n";
  return os.str();
}

}  // namespace ebfission
