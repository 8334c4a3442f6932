#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "hopt/error.hpp"
#include "hopt/experiments.hpp"
#include "hopt/dual_ridge.hpp"

namespace hopt {
namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorKind::ConfigError, msg); }

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
    config_error(key + ": expected a number, got '" + text + "'");
  }
  return v;
}

std::uint64_t to_u64(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    config_error(key + ": expected a non-negative integer, got '" + text + "'");
  }
  return v;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

const std::map<std::string, std::string>& ExperimentConfig::defaults() {
  static const std::map<std::string, std::string> d{
      {"dataset", "synthetic"},
      {"outputs_dir", "outputs"},
      {"mu", "1e-6"},
      {"nu_rule", "quarter-sqrt"},
      {"epochs", "30"},
      {"seeds", "1,2,3"},
      {"step_rule", "diagonal"},
      {"sampling", "permutation"},
      {"split_seed", "0"},
      {"train_fraction", "0.8"},
      {"steps", "500"},
      {"gamma", "auto"},
      {"zeta_points", "10"},
      {"target_rel_subopt", "1e-4"},
      {"workers", "0"},
      {"synthetic.n", "300"},
      {"synthetic.d", "10"},
      {"synthetic.spectrum", "geometric:1:5e-4"},
      {"synthetic.correlations", "decay:0.25:1"},
      {"synthetic.seed", "1"},
      {"rcdm.trials", "50"},
      {"rcdm.rho", "gap"},
      {"glm.link", "logistic"},
      {"glm.n", "4000"},
      {"glm.spectrum", "1,0.3"},
      {"glm.w_true", "1,-0.5"},
      {"glm.noise", "0.1"},
      {"glm.population_factor", "10"},
      {"glm.steps", "40"},
      {"glm.seed", "7"},
      {"glm.stein_sizes", "1000,4000,16000"},
      {"glm.stein_replicates", "16"},
  };
  return d;
}

ExperimentConfig::ExperimentConfig() : values_(defaults()) {}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (!defaults().contains(key)) config_error("unknown key '" + key + "'");
  values_[key] = value;
}

void ExperimentConfig::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) config_error("override '" + assignment + "' is not key=value");
  set(trim(std::string_view(assignment).substr(0, eq)), trim(std::string_view(assignment).substr(eq + 1)));
}

ExperimentConfig ExperimentConfig::parse(std::istream& in, const std::string& source) {
  ExperimentConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      config_error(source + ":" + std::to_string(line_no) + ": expected key = value");
    }
    try {
      cfg.set(trim(std::string_view(body).substr(0, eq)), trim(std::string_view(body).substr(eq + 1)));
    } catch (const Error& e) {
      config_error(source + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot read config " + path.string());
  return parse(in, path.string());
}

const std::string& ExperimentConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) config_error("unknown key '" + key + "'");
  return it->second;
}

double ExperimentConfig::get_double(const std::string& key) const { return to_double(key, get(key)); }
std::uint64_t ExperimentConfig::get_u64(const std::string& key) const { return to_u64(key, get(key)); }

std::vector<double> ExperimentConfig::get_doubles(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split_list(get(key))) out.push_back(to_double(key, item));
  return out;
}

std::vector<std::uint64_t> ExperimentConfig::get_u64s(const std::string& key) const {
  std::vector<std::uint64_t> out;
  for (const auto& item : split_list(get(key))) out.push_back(to_u64(key, item));
  return out;
}

std::string ExperimentConfig::hash(const std::string& experiment) const {
  std::string canon = "experiment=" + experiment + "\n";
  for (const auto& [k, v] : values_) {
    if (k == "outputs_dir" || k == "workers") continue;
    canon += k + "=" + v + "\n";
  }
  return sha256_hex(canon).substr(0, 16);
}

double ExperimentConfig::mu() const {
  const double mu = get_double("mu");
  if (!(mu > 0.0)) config_error("mu must be positive");
  return mu;
}

double ExperimentConfig::nu() const {
  const std::string& rule = get("nu_rule");
  if (rule == "quarter-sqrt") return default_nu(mu());
  const double nu = to_double("nu_rule", rule);
  if (!(nu > 0.0)) config_error("nu_rule must be quarter-sqrt or a positive number");
  return nu;
}

SyntheticSpec synthetic_spec(const ExperimentConfig& cfg) {
  SyntheticSpec spec;
  spec.n = cfg.get_size("synthetic.n");
  spec.d = cfg.get_size("synthetic.d");
  spec.noise_seed = cfg.get_u64("synthetic.seed");
  if (spec.d == 0 || spec.n <= spec.d + 1) config_error("synthetic data needs n > d + 1 and d >= 1");

  auto colon_parts = [](const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ':');) parts.push_back(trim(item));
    return parts;
  };

  const auto sp = colon_parts(cfg.get("synthetic.spectrum"));
  if (sp.size() == 3 && sp[0] == "geometric") {
    spec.spectrum = geometric_spectrum(spec.d, to_double("synthetic.spectrum", sp[1]),
                                       to_double("synthetic.spectrum", sp[2]));
  } else {
    spec.spectrum = cfg.get_doubles("synthetic.spectrum");
  }
  if (spec.spectrum.size() != spec.d) config_error("synthetic.spectrum must have d entries");

  // decay:<tau>:<p>  ρ_j² = τσ_j²(σ_j²/σ_1²)^p;  equal:<tau>  ρ_j² = τσ_j²
  const auto cr = colon_parts(cfg.get("synthetic.correlations"));
  if (cr.size() == 3 && cr[0] == "decay") {
    spec.correlations = bounded_correlations(spec.spectrum, to_double("synthetic.correlations", cr[1]),
                                             to_double("synthetic.correlations", cr[2]));
  } else if (cr.size() == 2 && cr[0] == "equal") {
    spec.correlations = bounded_correlations(spec.spectrum, to_double("synthetic.correlations", cr[1]), 0.0);
  } else {
    spec.correlations = cfg.get_doubles("synthetic.correlations");
  }
  if (spec.correlations.size() != spec.d) config_error("synthetic.correlations must have d entries");
  return spec;
}

Dataset load_dataset(const ExperimentConfig& cfg) {
  const std::string& source = cfg.get("dataset");
  if (source == "synthetic") return generate_synthetic(synthetic_spec(cfg));
  RawDataset raw = read_libsvm_file(source);
  if (raw.rows.empty()) config_error("dataset " + source + " has no rows");
  return preprocess_all(raw);
}

}  // namespace hopt
