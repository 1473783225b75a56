#include "homog/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>

namespace homog {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    if (!std::isfinite(x)) throw std::invalid_argument("nonfinite");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: '" + key + "' needs a finite number, got '" + v + "'");
  }
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: '" + key + "' needs an integer, got '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative");
    const unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: '" + key + "' needs an unsigned integer, got '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ConfigError("config: '" + key + "' needs a boolean, got '" + v + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const std::string& tok : split_ws(v)) out.push_back(parse_double(key, tok));
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += fmt(v[i]);
  }
  return out;
}

// raw section -> ordered (key, value) pairs with duplicate detection
using Section = std::vector<std::pair<std::string, std::string>>;

const std::string* find_key(const Section& sec, const std::string& key) {
  for (const auto& kv : sec)
    if (kv.first == key) return &kv.second;
  return nullptr;
}

}  // namespace

const char* experiment_kind_name(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Unset: return "unset";
    case ExperimentKind::Correctors: return "correctors";
    case ExperimentKind::BoundaryLayer: return "boundary-layer";
    case ExperimentKind::Excess: return "excess";
    case ExperimentKind::MeanValue: return "mean-value";
    case ExperimentKind::Hardy: return "hardy";
    case ExperimentKind::Meyers: return "meyers";
    case ExperimentKind::Cone: return "cone";
    case ExperimentKind::TwoScale: return "two-scale";
    case ExperimentKind::SpectralGap: return "spectral-gap";
  }
  return "?";
}

ExperimentKind experiment_kind_from_name(const std::string& s) {
  if (s == "correctors") return ExperimentKind::Correctors;
  if (s == "boundary-layer") return ExperimentKind::BoundaryLayer;
  if (s == "excess") return ExperimentKind::Excess;
  if (s == "mean-value") return ExperimentKind::MeanValue;
  if (s == "hardy") return ExperimentKind::Hardy;
  if (s == "meyers") return ExperimentKind::Meyers;
  if (s == "cone") return ExperimentKind::Cone;
  if (s == "two-scale") return ExperimentKind::TwoScale;
  if (s == "spectral-gap") return ExperimentKind::SpectralGap;
  throw ConfigError("config: unknown experiment kind '" + s + "'");
}

Grid ExperimentConfig::grid() const {
  try {
    return Grid(d, n, h);
  } catch (const Error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

void ExperimentConfig::validate() const {
  if (kind == ExperimentKind::Unset) throw ConfigError("config: experiment kind is not set");
  if (samples < 1) throw ConfigError("config: samples must be at least 1");
  if (threads < 1 || threads > 256)
    throw ConfigError("config: threads must lie in [1, 256]");
  if (!(h > 0.0)) throw ConfigError("config: grid h must be positive");
  (void)grid();  // dimension / cell-cap checks
  try {
    EnsembleSpec es = ensemble;
    es.d = d;
    es.validate();
  } catch (const Error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  auto need_sorted_radii = [&]() {
    if (radii.empty()) throw ConfigError("config: this experiment needs a radii sweep");
    double prev = 0.0;
    for (double r : radii) {
      if (!(r > prev))
        throw ConfigError("config: radii must be positive and strictly increasing");
      prev = r;
    }
  };
  auto need_eps = [&]() {
    if (eps.empty()) throw ConfigError("config: this experiment needs an eps sweep");
    for (double e : eps)
      if (!(e > 0.0)) throw ConfigError("config: eps values must be positive");
  };
  auto need_T = [&]() {
    if (T.empty()) throw ConfigError("config: this experiment needs a T sweep");
    if (T.size() != 1 && T.size() != eps.size())
      throw ConfigError("config: T sweep must have one entry or match eps");
    for (double t : T)
      if (!(t > 0.0)) throw ConfigError("config: T values must be positive");
  };

  switch (kind) {
    case ExperimentKind::Correctors:
    case ExperimentKind::SpectralGap:
      if (domain != DomainKind::Torus)
        throw ConfigError("config: this experiment runs on the torus");
      break;
    case ExperimentKind::BoundaryLayer:
      if (domain != DomainKind::Slab && domain != DomainKind::Box)
        throw ConfigError("config: boundary layers need a slab or box domain");
      need_eps();
      need_T();
      break;
    case ExperimentKind::Excess:
      if (domain != DomainKind::Slab && domain != DomainKind::Box)
        throw ConfigError("config: this experiment needs a slab or box domain");
      need_eps();
      need_T();
      need_sorted_radii();
      break;
    case ExperimentKind::MeanValue:
      if (domain != DomainKind::Slab && domain != DomainKind::Box)
        throw ConfigError("config: this experiment needs a slab or box domain");
      need_sorted_radii();
      for (double e : eps)
        if (!(e > 0.0)) throw ConfigError("config: eps values must be positive");
      break;
    case ExperimentKind::Hardy:
      if (domain == DomainKind::Torus)
        throw ConfigError("config: the halved-ball check needs a bounded domain");
      if (!(kappa > 0.0)) throw ConfigError("config: hardy needs kappa > 0");
      if (!(rho > 0.0)) throw ConfigError("config: hardy needs a ball radius rho > 0");
      break;
    case ExperimentKind::Meyers:
      if (domain == DomainKind::Torus)
        throw ConfigError("config: the weighted check needs a bounded domain");
      if (!(p >= 1.0) || !(p <= 1.1))
        throw ConfigError("config: meyers needs p in [1, 1.1]");
      if (alpha0 < 0.0) throw ConfigError("config: meyers needs alpha0 >= 0");
      if (alpha1 < alpha0) throw ConfigError("config: meyers needs alpha1 >= alpha0");
      if (!(R > 0.0)) throw ConfigError("config: meyers needs a base radius R > 0");
      break;
    case ExperimentKind::Cone:
      if (domain != DomainKind::Box && domain != DomainKind::CornerBox)
        throw ConfigError("config: cone probes need a box-like domain");
      need_sorted_radii();
      if (!(rho > 0.0)) throw ConfigError("config: cone needs an envelope radius rho > 0");
      for (double e : eps)
        if (!(e > 0.0)) throw ConfigError("config: eps values must be positive");
      break;
    case ExperimentKind::TwoScale:
      if (domain != DomainKind::Box)
        throw ConfigError("config: the two-scale study needs a box domain");
      need_eps();
      need_T();
      break;
    case ExperimentKind::Unset:
      break;
  }
}

std::string ExperimentConfig::canonical() const {
  std::string out;
  out += "kind = ";
  out += experiment_kind_name(kind);
  out += '\n';
  out += "samples = " + std::to_string(samples) + '\n';
  out += "seed = " + std::to_string(seed) + '\n';
  out += "\n[ensemble]\n";
  out += std::string("kind = ") + ensemble_kind_name(ensemble.kind) + '\n';
  out += "lambda = " + fmt(ensemble.lambda) + '\n';
  out += "\n[grid]\n";
  out += "d = " + std::to_string(d) + '\n';
  out += "n =";
  for (int k = 0; k < d; ++k) out += ' ' + std::to_string(n[k]);
  out += '\n';
  out += "h = " + fmt(h) + '\n';
  out += std::string("domain = ") + domain_kind_name(domain) + '\n';
  out += "\n[sweep]\n";
  out += "eps = " + fmt_list(eps) + '\n';
  out += "T = " + fmt_list(T) + '\n';
  out += "radii = " + fmt_list(radii) + '\n';
  out += "p = " + fmt(p) + '\n';
  out += "alpha0 = " + fmt(alpha0) + '\n';
  out += "alpha1 = " + fmt(alpha1) + '\n';
  out += "kappa = " + fmt(kappa) + '\n';
  out += "rho = " + fmt(rho) + '\n';
  out += "R = " + fmt(R) + '\n';
  return out;
}

std::uint64_t ExperimentConfig::hash() const {
  std::uint64_t h64 = 1469598103934665603ull;
  for (unsigned char c : canonical()) {
    h64 ^= c;
    h64 *= 1099511628211ull;
  }
  return h64;
}

void apply_override(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "kind")
    cfg.kind = experiment_kind_from_name(value);
  else if (key == "samples")
    cfg.samples = static_cast<int>(parse_int(key, value));
  else if (key == "seed") {
    cfg.seed = parse_u64(key, value);
    cfg.ensemble.master_seed = cfg.seed;
  }
  else if (key == "threads")
    cfg.threads = static_cast<int>(parse_int(key, value));
  else if (key == "out")
    cfg.out_dir = value;
  else if (key == "dump-fields")
    cfg.dump_fields = parse_bool(key, value);
  else
    throw ConfigError("config: unknown override key '" + key + "'");
}

ExperimentConfig parse_config_string(const std::string& text) {
  std::map<std::string, Section> sections;  // "" is the top level
  std::string current;
  sections[""];
  ExperimentConfig cfg;

  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::size_t hash_pos = raw.find('#');
    if (hash_pos != std::string::npos) raw.erase(hash_pos);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const std::string where = " (line " + std::to_string(lineno) + ")";

    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("config: malformed section header" + where);
      current = trim(line.substr(1, line.size() - 2));
      if (current != "ensemble" && current != "grid" && current != "sweep")
        throw ConfigError("config: unknown section '" + current + "'" + where);
      sections[current];
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: expected 'key = value'" + where);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("config: empty key" + where);
    Section& sec = sections[current];
    if (find_key(sec, key))
      throw ConfigError("config: duplicate key '" + key + "'" + where);
    sec.emplace_back(key, value);

    if (current.empty()) {
      // top-level keys are applied in place so errors stay line-anchored
      try {
        apply_override(cfg, key, value);
      } catch (const ConfigError& e) {
        throw ConfigError(e.what() + where);
      }
    }
  }

  if (sections.count("ensemble")) {
    for (const auto& kv : sections["ensemble"]) {
      if (kv.first == "kind") {
        try {
          cfg.ensemble.kind = ensemble_kind_from_name(kv.second);
        } catch (const Error& e) {
          throw ConfigError(std::string("config: ") + e.what());
        }
      } else if (kv.first == "lambda")
        cfg.ensemble.lambda = parse_double(kv.first, kv.second);
      else
        throw ConfigError("config: unknown ensemble key '" + kv.first + "'");
    }
  }

  if (sections.count("grid")) {
    const Section& sec = sections["grid"];
    for (const auto& kv : sec) {
      if (kv.first != "d" && kv.first != "n" && kv.first != "h" && kv.first != "domain")
        throw ConfigError("config: unknown grid key '" + kv.first + "'");
    }
    if (const std::string* v = find_key(sec, "d"))
      cfg.d = static_cast<int>(parse_int("d", *v));
    if (cfg.d != 2 && cfg.d != 3) throw ConfigError("config: grid d must be 2 or 3");
    if (const std::string* v = find_key(sec, "n")) {
      const auto toks = split_ws(*v);
      if (static_cast<int>(toks.size()) != cfg.d)
        throw ConfigError("config: grid n needs exactly d entries");
      for (int k = 0; k < cfg.d; ++k)
        cfg.n[k] = static_cast<int>(parse_int("n", toks[static_cast<std::size_t>(k)]));
    }
    if (const std::string* v = find_key(sec, "h")) cfg.h = parse_double("h", *v);
    if (const std::string* v = find_key(sec, "domain")) {
      try {
        cfg.domain = domain_kind_from_name(*v);
      } catch (const Error& e) {
        throw ConfigError(std::string("config: ") + e.what());
      }
    }
  }

  if (sections.count("sweep")) {
    for (const auto& kv : sections["sweep"]) {
      const std::string& k = kv.first;
      if (k == "eps")
        cfg.eps = parse_list(k, kv.second);
      else if (k == "T")
        cfg.T = parse_list(k, kv.second);
      else if (k == "radii")
        cfg.radii = parse_list(k, kv.second);
      else if (k == "p")
        cfg.p = parse_double(k, kv.second);
      else if (k == "alpha0")
        cfg.alpha0 = parse_double(k, kv.second);
      else if (k == "alpha1")
        cfg.alpha1 = parse_double(k, kv.second);
      else if (k == "kappa")
        cfg.kappa = parse_double(k, kv.second);
      else if (k == "rho")
        cfg.rho = parse_double(k, kv.second);
      else if (k == "R")
        cfg.R = parse_double(k, kv.second);
      else
        throw ConfigError("config: unknown sweep key '" + k + "'");
    }
  }

  cfg.ensemble.d = cfg.d;
  cfg.ensemble.master_seed = cfg.seed;
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_string(buf.str());
}

}  // namespace homog
