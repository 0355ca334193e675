#include "fplab/lab/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace fplab::lab {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ConfigError("config: key '" + key + "' has non-numeric value '" + value + "'");
  }
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long long v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ConfigError("config: key '" + key + "' has non-integer value '" + value + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("");
    return v;
  } catch (...) {
    throw ConfigError("config: key '" + key + "' has non-integer value '" + value + "'");
  }
}

const std::set<std::string> kKnownExperiments = {
    "lemma32_equality",  "lemma33_moments",    "thm35_terms",
    "covsamp_invariants", "fourth_moment_identity", "reduction_factor32",
    "heavy_tailed_assouad", "concentration_suite", "appendixC_product",
    "appendixC_gaussmean"};

const std::set<std::string> kKnownFamilies = {"bernoulli_product", "gaussian_mean",
                                              "gaussian_covariance"};

const std::set<std::string> kKnownMechanisms = {"constant", "plugin", "dp_gauss_cov",
                                                "dp_gauss_mean"};

}  // namespace

LabConfig parse_config_text(const std::string& text) {
  LabConfig cfg;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key or value");
    }
    if (!seen.insert(key).second) {
      throw ConfigError("config: duplicate key '" + key + "'");
    }

    if (key == "experiment") {
      cfg.experiment_id = value;
    } else if (key == "family") {
      cfg.family = value;
    } else if (key == "mech") {
      cfg.mech_id = value;
    } else if (key == "d") {
      cfg.d = static_cast<int>(parse_int(key, value));
    } else if (key == "n") {
      cfg.n = static_cast<int>(parse_int(key, value));
    } else if (key == "eps") {
      cfg.eps = parse_double(key, value);
    } else if (key == "delta") {
      cfg.delta = parse_double(key, value);
      cfg.has_delta = true;
    } else if (key == "clip") {
      cfg.clip = parse_double(key, value);
    } else if (key == "alpha") {
      cfg.alpha = parse_double(key, value);
    } else if (key == "t_thresh") {
      cfg.t_thresh = parse_double(key, value);
    } else if (key == "outer_trials") {
      cfg.outer_trials = parse_int(key, value);
    } else if (key == "inner_trials") {
      cfg.inner_trials = parse_int(key, value);
    } else if (key == "mc_samples") {
      cfg.mc_samples = parse_int(key, value);
    } else if (key == "reps") {
      cfg.reps = parse_int(key, value);
    } else if (key == "seed") {
      cfg.seed = parse_u64(key, value);
      cfg.has_seed = true;
    } else if (key == "workers") {
      cfg.workers = static_cast<int>(parse_int(key, value));
    } else if (key == "out") {
      cfg.out_dir = value;
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  return cfg;
}

LabConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void resolve_defaults(LabConfig& cfg) {
  if (cfg.experiment_id.empty()) throw ConfigError("config: missing 'experiment'");
  if (!kKnownExperiments.count(cfg.experiment_id)) {
    throw ConfigError("config: unknown experiment_id '" + cfg.experiment_id + "'");
  }
  if (!cfg.has_seed) throw ConfigError("config: 'seed' is mandatory (no wall-clock default)");

  const std::string& id = cfg.experiment_id;

  if (id == "lemma32_equality") {
    if (cfg.family.empty()) cfg.family = "bernoulli_product";
    if (cfg.mech_id.empty()) cfg.mech_id = "constant";
    if (cfg.d == 0) cfg.d = 4;
    if (cfg.n == 0) cfg.n = 20;
    if (cfg.outer_trials == 0) cfg.outer_trials = 10000;
  } else if (id == "lemma33_moments") {
    if (cfg.family.empty()) cfg.family = "gaussian_mean";
    if (cfg.mech_id.empty()) cfg.mech_id = "plugin";
    if (cfg.d == 0) cfg.d = 4;
    if (cfg.n == 0) cfg.n = 20;
    if (cfg.inner_trials == 0) cfg.inner_trials = 100000;
  } else if (id == "thm35_terms") {
    if (cfg.family.empty()) cfg.family = "gaussian_covariance";
    if (cfg.mech_id.empty()) cfg.mech_id = "dp_gauss_cov";
    if (cfg.d == 0) cfg.d = 3;
    if (cfg.n == 0) cfg.n = 30000;
    if (cfg.eps == 0.0) cfg.eps = 0.5;
    if (!cfg.has_delta) cfg.delta = 1e-5;
    if (cfg.clip == 0.0) cfg.clip = 8.0;
    if (cfg.outer_trials == 0) cfg.outer_trials = 200;
    if (cfg.inner_trials == 0) cfg.inner_trials = 500;
    if (cfg.mc_samples == 0) cfg.mc_samples = 20000;
  } else if (id == "covsamp_invariants") {
    if (cfg.d == 0) cfg.d = 5;
    if (cfg.reps == 0) cfg.reps = 1000;
  } else if (id == "fourth_moment_identity") {
    if (cfg.d == 0) cfg.d = 2;
    if (cfg.mc_samples == 0) cfg.mc_samples = 1000000;
  } else if (id == "reduction_factor32") {
    if (cfg.d == 0) cfg.d = 3;
    if (cfg.n == 0) cfg.n = 100000;
    if (cfg.reps == 0) cfg.reps = 200;
  } else if (id == "heavy_tailed_assouad") {
    if (cfg.d == 0) cfg.d = 20;
    if (cfg.alpha == 0.0) cfg.alpha = 0.5;
    if (cfg.n == 0) cfg.n = 100000;
    if (cfg.reps == 0) cfg.reps = 100;
    if (cfg.eps == 0.0) cfg.eps = 0.4;
    if (cfg.delta == 0.0) cfg.delta = 0.1;
  } else if (id == "concentration_suite") {
    if (cfg.mc_samples == 0) cfg.mc_samples = 1000000;
  } else if (id == "appendixC_product") {
    if (cfg.d == 0) cfg.d = 4;
    if (cfg.reps == 0) cfg.reps = 20;
    if (cfg.mc_samples == 0) cfg.mc_samples = 20000;
  } else if (id == "appendixC_gaussmean") {
    if (cfg.d == 0) cfg.d = 4;
    if (cfg.reps == 0) cfg.reps = 20;
    if (cfg.mc_samples == 0) cfg.mc_samples = 200000;
  }

  if (!cfg.family.empty() && !kKnownFamilies.count(cfg.family)) {
    throw ConfigError("config: unknown family '" + cfg.family + "'");
  }
  if (!cfg.mech_id.empty() && !kKnownMechanisms.count(cfg.mech_id)) {
    throw ConfigError("config: unknown mechanism '" + cfg.mech_id + "'");
  }
  if (cfg.d < 0 || cfg.n < 0 || cfg.outer_trials < 0 || cfg.inner_trials < 0 ||
      cfg.mc_samples < 0 || cfg.reps < 0) {
    throw ConfigError("config: counts must be non-negative");
  }
  if (cfg.out_dir.empty()) cfg.out_dir = "out/" + cfg.experiment_id;
}

}  // namespace fplab::lab
