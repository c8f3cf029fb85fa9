#include "bhmf/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "bhmf/errors.hpp"

namespace bhmf {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream iss(s);
  std::string tok;
  while (iss >> tok) out.push_back(tok);
  return out;
}

double parse_double(const std::string& s, const std::string& field) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0' || !std::isfinite(v))
    throw ConfigError(field + ": expected a finite number, got '" + s + "'");
  return v;
}

long long parse_int(const std::string& s, const std::string& field) {
  char* end = nullptr;
  long long v = std::strtoll(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0')
    throw ConfigError(field + ": expected an integer, got '" + s + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& s, const std::string& field) {
  char* end = nullptr;
  unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (end == s.c_str() || *end != '\0' || s.find('-') != std::string::npos)
    throw ConfigError(field + ": expected a nonnegative integer, got '" + s + "'");
  return v;
}

std::complex<double> parse_complex_token(const std::string& token,
                                         const std::string& field) {
  std::string body = token;
  bool has_imag = false;
  if (!body.empty() && (body.back() == 'i' || body.back() == 'j')) {
    has_imag = true;
    body.pop_back();
  }
  if (!has_imag) return {parse_double(body, field), 0.0};

  // split "a+b" / "a-b" at the last sign not part of an exponent
  std::size_t split = std::string::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    char ch = body[i];
    if ((ch == '+' || ch == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  auto unit_imag = [&](const std::string& im) -> double {
    if (im.empty() || im == "+") return 1.0;
    if (im == "-") return -1.0;
    return parse_double(im, field);
  };
  if (split == std::string::npos) return {0.0, unit_imag(body)};
  return {parse_double(body.substr(0, split), field), unit_imag(body.substr(split))};
}

struct ParsedFile {
  // section -> key -> value (top-level keys live in section "")
  std::map<std::string, std::map<std::string, std::string>> data;
};

ParsedFile parse_sections(const std::string& text) {
  ParsedFile file;
  std::string section;
  std::istringstream iss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(iss, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    std::size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (!file.data[section].emplace(key, value).second)
      throw ConfigError("duplicate key '" + key + "' in section [" + section + "]");
  }
  return file;
}

class SectionReader {
 public:
  SectionReader(const ParsedFile& file, const std::string& section)
      : section_(section) {
    auto it = file.data.find(section);
    if (it != file.data.end()) entries_ = &it->second;
  }

  bool present() const { return entries_ != nullptr; }

  std::optional<std::string> get(const std::string& key) {
    if (!entries_) return std::nullopt;
    auto it = entries_->find(key);
    if (it == entries_->end()) return std::nullopt;
    used_.insert(key);
    return it->second;
  }

  std::string require(const std::string& key) {
    auto v = get(key);
    if (!v) throw ConfigError(qualified(key) + ": required key is missing");
    return *v;
  }

  void finish() const {
    if (!entries_) return;
    for (const auto& [key, value] : *entries_) {
      if (!used_.count(key))
        throw ConfigError(qualified(key) + ": unknown key");
    }
  }

  std::string qualified(const std::string& key) const {
    return section_.empty() ? key : section_ + "." + key;
  }

 private:
  std::string section_;
  const std::map<std::string, std::string>* entries_ = nullptr;
  std::set<std::string> used_;
};

}  // namespace

Eigen::VectorXcd parse_complex_list(const std::string& text, const std::string& field) {
  std::vector<std::string> tokens = split_ws(text);
  if (tokens.empty()) throw ConfigError(field + ": empty amplitude list");
  Eigen::VectorXcd v(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i)
    v[i] = parse_complex_token(tokens[i], field);
  return v;
}

namespace {

Eigen::VectorXcd normalize_amplitudes(const Eigen::VectorXcd& v, const std::string& field,
                                      std::vector<std::string>& warnings) {
  double dev = std::abs(v.norm() - 1.0);
  if (dev > 1e-6)
    throw ConfigError(field + ": amplitude list norm deviates by " +
                      std::to_string(dev) + " (limit 1e-6)");
  if (dev > 1e-9)
    warnings.push_back(field + ": renormalized amplitude list (deviation " +
                       std::to_string(dev) + ")");
  return v / v.norm();
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  ParsedFile file = parse_sections(text);
  for (const auto& [section, keys] : file.data) {
    static const std::set<std::string> known = {"",        "model",       "lattice",
                                                "cutoff",  "time",        "initial",
                                                "diagnostics", "sweep",   "output"};
    if (!known.count(section))
      throw ConfigError("unknown section [" + section + "]");
  }

  RunConfig cfg;

  SectionReader model(file, "model");
  cfg.J = parse_double(model.require("J"), "model.J");
  cfg.mu = parse_double(model.require("mu"), "model.mu");
  cfg.U = parse_double(model.require("U"), "model.U");
  model.finish();

  SectionReader lattice(file, "lattice");
  cfg.L = static_cast<int>(parse_int(lattice.require("L"), "lattice.L"));
  cfg.d = static_cast<int>(parse_int(lattice.require("d"), "lattice.d"));
  if (cfg.L < 2) throw ConfigError("lattice.L: must be >= 2");
  if (cfg.d < 1) throw ConfigError("lattice.d: must be >= 1");
  lattice.finish();

  SectionReader cutoff(file, "cutoff");
  cfg.M = static_cast<int>(parse_int(cutoff.require("M"), "cutoff.M"));
  if (cfg.M < 0) throw ConfigError("cutoff.M: must be >= 0");
  cutoff.finish();

  SectionReader time(file, "time");
  cfg.t_final = parse_double(time.require("t_final"), "time.t_final");
  if (!(cfg.t_final > 0.0)) throw ConfigError("time.t_final: must be > 0");
  if (auto v = time.get("dt")) {
    cfg.dt = parse_double(*v, "time.dt");
    if (!(cfg.dt > 0.0)) throw ConfigError("time.dt: must be > 0");
  }
  if (auto v = time.get("n_samples")) {
    cfg.n_samples = static_cast<int>(parse_int(*v, "time.n_samples"));
    if (cfg.n_samples < 2) throw ConfigError("time.n_samples: must be >= 2");
  }
  if (auto v = time.get("krylov_tol")) {
    cfg.krylov_tol = parse_double(*v, "time.krylov_tol");
    if (cfg.krylov_tol < 1e-14 || cfg.krylov_tol > 1e-6)
      throw ConfigError("time.krylov_tol: must lie in [1e-14, 1e-6]");
  }
  time.finish();

  SectionReader initial(file, "initial");
  std::string kind = initial.require("type");
  if (kind == "gutzwiller") {
    cfg.initial.kind = InitialKind::Gutzwiller;
    cfg.initial.amplitudes = normalize_amplitudes(
        parse_complex_list(initial.require("amplitudes"), "initial.amplitudes"),
        "initial.amplitudes", cfg.warnings);
  } else if (kind == "perturbed_gutzwiller") {
    cfg.initial.kind = InitialKind::PerturbedGutzwiller;
    cfg.initial.amplitudes = normalize_amplitudes(
        parse_complex_list(initial.require("amplitudes"), "initial.amplitudes"),
        "initial.amplitudes", cfg.warnings);
    cfg.initial.perp_amplitudes = normalize_amplitudes(
        parse_complex_list(initial.require("perp_amplitudes"),
                           "initial.perp_amplitudes"),
        "initial.perp_amplitudes", cfg.warnings);
    cfg.initial.num_perturbed_sites = static_cast<int>(
        parse_int(initial.require("num_perturbed_sites"), "initial.num_perturbed_sites"));
    if (cfg.initial.num_perturbed_sites < 0)
      throw ConfigError("initial.num_perturbed_sites: must be >= 0");
  } else if (kind == "fock_tuple") {
    cfg.initial.kind = InitialKind::FockTuple;
    for (const std::string& tok :
         split_ws(initial.require("occupations"))) {
      int n = static_cast<int>(parse_int(tok, "initial.occupations"));
      if (n < 0 || n > cfg.M)
        throw ConfigError("initial.occupations: entry outside [0, M]");
      cfg.initial.occupations.push_back(n);
    }
  } else {
    throw ConfigError("initial.type: unknown type '" + kind + "'");
  }
  initial.finish();

  if (cfg.initial.kind != InitialKind::FockTuple) {
    if (cfg.initial.amplitudes.size() > cfg.M + 1)
      throw ConfigError("initial.amplitudes: longer than cutoff dimension M+1");
    if (cfg.initial.kind == InitialKind::PerturbedGutzwiller &&
        cfg.initial.perp_amplitudes.size() > cfg.M + 1)
      throw ConfigError("initial.perp_amplitudes: longer than cutoff dimension M+1");
  }

  SectionReader diag(file, "diagnostics");
  if (auto v = diag.get("c_constant_C")) {
    cfg.c_constant_C = parse_double(*v, "diagnostics.c_constant_C");
    if (!(cfg.c_constant_C > 0.0))
      throw ConfigError("diagnostics.c_constant_C: must be > 0");
  }
  if (auto v = diag.get("k_moments")) {
    cfg.k_moments.clear();
    for (const std::string& tok : split_ws(*v)) {
      double k = parse_double(tok, "diagnostics.k_moments");
      if (!(k > 0.0) || std::abs(2.0 * k - std::lround(2.0 * k)) > 1e-12)
        throw ConfigError("diagnostics.k_moments: entries must be positive half-integers");
      cfg.k_moments.push_back(k);
    }
  }
  diag.finish();

  SectionReader sweep(file, "sweep");
  if (auto v = sweep.get("d_list")) {
    for (const std::string& tok : split_ws(*v)) {
      int d = static_cast<int>(parse_int(tok, "sweep.d_list"));
      if (d < 1) throw ConfigError("sweep.d_list: entries must be >= 1");
      cfg.d_list.push_back(d);
    }
  }
  if (auto v = sweep.get("seeds")) {
    for (const std::string& tok : split_ws(*v))
      cfg.seeds.push_back(parse_u64(tok, "sweep.seeds"));
  }
  sweep.finish();

  SectionReader output(file, "output");
  if (auto v = output.get("directory")) cfg.directory = *v;
  output.finish();

  SectionReader top(file, "");
  if (auto v = top.get("seed")) cfg.seed = parse_u64(*v, "seed");
  if (auto v = top.get("memory_cap_bytes"))
    cfg.memory_cap_bytes = parse_u64(*v, "memory_cap_bytes");
  top.finish();

  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace bhmf
