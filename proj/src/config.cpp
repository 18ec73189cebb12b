#include "optbasis/config.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace optbasis {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string &key, const std::string &what) {
  throw Error(ErrorKind::ConfigInvalid, "'" + key + "': " + what);
}

void reject_unknown(const json &section, const std::string &prefix,
                    std::initializer_list<const char *> known) {
  if (!section.is_object())
    bad(prefix, "expected an object");
  const std::set<std::string> allowed(known.begin(), known.end());
  for (const auto &[key, value] : section.items())
    if (!allowed.count(key))
      bad(prefix.empty() ? key : prefix + "." + key, "unknown key");
}

template <class T>
void read(const json &section, const std::string &prefix, const char *key, T &out) {
  if (!section.contains(key))
    return;
  const json &v = section.at(key);
  const std::string name = prefix + "." + key;
  if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string())
      bad(name, "expected a string");
    out = v.get<std::string>();
  } else if constexpr (std::is_same_v<T, double>) {
    if (!v.is_number())
      bad(name, "expected a number");
    out = v.get<double>();
  } else if constexpr (std::is_same_v<T, std::uint64_t>) {
    if (!v.is_number_unsigned())
      bad(name, "expected a nonnegative integer");
    out = v.get<std::uint64_t>();
  } else {
    if (!v.is_number_integer())
      bad(name, "expected an integer");
    out = static_cast<T>(v.get<std::int64_t>());
  }
}

const json *section(const json &doc, const char *name) {
  return doc.contains(name) ? &doc.at(name) : nullptr;
}

} // namespace

Index ExperimentConfig::unknowns() const {
  const Index pts = m_intervals - 1;
  if (problem == "elliptic_1d")
    return pts;
  return is_rte() ? pts * pts * n_v : pts * pts;
}

double default_amplitude(const std::string &problem) {
  if (problem == "semilinear_elliptic")
    return 100.0;
  if (problem == "semilinear_rte")
    return 0.1;
  return 1.0;
}

ExperimentConfig parse_config(const std::string &json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error &e) {
    throw Error(ErrorKind::ConfigInvalid, std::string("malformed JSON: ") + e.what());
  }
  reject_unknown(doc, "", {"problem", "grid", "weights", "rsvd", "nonlinear", "output"});

  ExperimentConfig c;
  bool amplitude_given = false;
  if (const json *s = section(doc, "problem")) {
    reject_unknown(*s, "problem", {"kind", "eps", "eps1", "eps2", "g", "source"});
    read(*s, "problem", "kind", c.problem);
    read(*s, "problem", "eps", c.eps);
    read(*s, "problem", "eps1", c.eps1);
    read(*s, "problem", "eps2", c.eps2);
    read(*s, "problem", "g", c.g);
    if (s->contains("source")) {
      const json &src = s->at("source");
      reject_unknown(src, "problem.source", {"kind", "amplitude"});
      read(src, "problem.source", "kind", c.source);
      amplitude_given = src.contains("amplitude");
      read(src, "problem.source", "amplitude", c.amplitude);
    }
  }
  if (!amplitude_given)
    c.amplitude = default_amplitude(c.problem);
  if (const json *s = section(doc, "grid")) {
    reject_unknown(*s, "grid", {"L", "m_intervals", "n_v"});
    read(*s, "grid", "L", c.length);
    read(*s, "grid", "m_intervals", c.m_intervals);
    read(*s, "grid", "n_v", c.n_v);
  }
  if (const json *s = section(doc, "weights")) {
    reject_unknown(*s, "weights", {"x", "p", "y"});
    read(*s, "weights", "x", c.weight_x);
    read(*s, "weights", "p", c.p);
    read(*s, "weights", "y", c.weight_y);
  }
  if (const json *s = section(doc, "rsvd")) {
    reject_unknown(*s, "rsvd", {"rank", "oversample", "power", "seed"});
    read(*s, "rsvd", "rank", c.rank);
    read(*s, "rsvd", "oversample", c.oversample);
    read(*s, "rsvd", "power", c.power);
    read(*s, "rsvd", "seed", c.seed);
  }
  if (const json *s = section(doc, "nonlinear")) {
    reject_unknown(*s, "nonlinear", {"tol", "max_iter", "relax"});
    read(*s, "nonlinear", "tol", c.tol);
    read(*s, "nonlinear", "max_iter", c.max_iter);
    read(*s, "nonlinear", "relax", c.relax);
  }
  if (const json *s = section(doc, "output")) {
    reject_unknown(*s, "output", {"dir", "basis", "nmax", "n_step"});
    read(*s, "output", "dir", c.out_dir);
    read(*s, "output", "basis", c.basis_file);
    read(*s, "output", "nmax", c.nmax);
    read(*s, "output", "n_step", c.n_step);
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorKind::IoError, "cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig &c) {
  json doc;
  doc["problem"] = {{"kind", c.problem},
                    {"eps", c.eps},
                    {"eps1", c.eps1},
                    {"eps2", c.eps2},
                    {"g", c.g},
                    {"source", {{"kind", c.source}, {"amplitude", c.amplitude}}}};
  doc["grid"] = {{"L", c.length}, {"m_intervals", c.m_intervals}, {"n_v", c.n_v}};
  doc["weights"] = {{"x", c.weight_x}, {"p", c.p}, {"y", c.weight_y}};
  doc["rsvd"] = {{"rank", c.rank},
                 {"oversample", c.oversample},
                 {"power", c.power},
                 {"seed", c.seed}};
  doc["nonlinear"] = {{"tol", c.tol}, {"max_iter", c.max_iter}, {"relax", c.relax}};
  doc["output"] = {{"dir", c.out_dir},
                   {"basis", c.basis_file},
                   {"nmax", c.nmax},
                   {"n_step", c.n_step}};
  return doc.dump(2) + "\n";
}

void validate(const ExperimentConfig &c) {
  static const std::array<const char *, 6> kinds = {
      "elliptic", "rte", "semilinear_elliptic", "semilinear_rte", "identity", "elliptic_1d"};
  if (std::find(kinds.begin(), kinds.end(), c.problem) == kinds.end())
    bad("problem.kind", "unknown problem '" + c.problem + "'");
  static const std::array<const char *, 4> sources = {"default", "sine", "gaussian", "zero"};
  if (std::find(sources.begin(), sources.end(), c.source) == sources.end())
    bad("problem.source.kind", "unknown source '" + c.source + "'");
  if (!(c.eps > 0.0)) bad("problem.eps", "must be positive");
  if (!(c.eps1 > 0.0)) bad("problem.eps1", "must be positive");
  if (!(c.eps2 > 0.0)) bad("problem.eps2", "must be positive");
  if (!(std::abs(c.g) < 1.0)) bad("problem.g", "must satisfy |g| < 1");
  if (!std::isfinite(c.amplitude)) bad("problem.source.amplitude", "must be finite");
  if (!(c.length > 0.0)) bad("grid.L", "must be positive");
  if (c.m_intervals < 2) bad("grid.m_intervals", "must be at least 2");
  if (c.n_v < 1) bad("grid.n_v", "must be positive");
  if (c.weight_x != "sobolev" && c.weight_x != "identity")
    bad("weights.x", "expected 'sobolev' or 'identity'");
  if (c.weight_y != "identity" && c.weight_y != "l2")
    bad("weights.y", "expected 'identity' or 'l2'");
  if (c.p < 0 || c.p > 2) bad("weights.p", "must be 0, 1 or 2");
  if (c.rank < 1) bad("rsvd.rank", "must be positive");
  if (c.oversample < 0) bad("rsvd.oversample", "must be nonnegative");
  if (c.power < 0) bad("rsvd.power", "must be nonnegative");
  if (!(c.tol > 0.0)) bad("nonlinear.tol", "must be positive");
  if (c.max_iter < 1) bad("nonlinear.max_iter", "must be positive");
  if (!(c.relax > 0.0 && c.relax <= 1.0)) bad("nonlinear.relax", "must lie in (0, 1]");
  if (c.nmax < 1) bad("output.nmax", "must be positive");
  if (c.n_step < 1) bad("output.n_step", "must be positive");
  if (c.basis_file.empty()) bad("output.basis", "must not be empty");
}

} // namespace optbasis
