#include "sera/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sera {

const char* gen_name(GenKind g) {
  switch (g) {
    case GenKind::ER: return "er";
    case GenKind::SBM: return "sbm";
    case GenKind::BUNDLE: return "bundle";
  }
  return "?";
}

const char* target_name(AttackTarget t) {
  switch (t) {
    case AttackTarget::AUTO: return "auto";
    case AttackTarget::FULL_GRAPH: return "full_graph";
    case AttackTarget::TEST_SUBGRAPH: return "test_subgraph";
  }
  return "?";
}

double ExperimentConfig::resolve_p(uint32_t n) const {
  if (p_spec == "auto") {
    if (n < 2) throw std::invalid_argument("p = auto needs n >= 2");
    return std::log(static_cast<double>(n)) / static_cast<double>(n);
  }
  return std::stod(p_spec);
}

namespace {

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw std::invalid_argument("config line " + std::to_string(line) + ": " + what);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string unquote(std::string_view s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
    return std::string(s.substr(1, s.size() - 2));
  return std::string(s);
}

// Splits "[a, b, c]" into elements; a bare scalar becomes a single element.
std::vector<std::string> elements(std::string_view value, std::size_t line) {
  std::vector<std::string> out;
  if (!value.empty() && value.front() == '[') {
    if (value.back() != ']') fail(line, "unterminated list");
    std::string_view inner = value.substr(1, value.size() - 2);
    std::size_t start = 0;
    while (start <= inner.size()) {
      const std::size_t comma = inner.find(',', start);
      std::string_view tok =
          comma == std::string_view::npos ? inner.substr(start) : inner.substr(start, comma - start);
      tok = trim(tok);
      if (!tok.empty()) out.push_back(unquote(tok));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (out.empty()) fail(line, "empty list");
  } else {
    out.push_back(unquote(value));
  }
  return out;
}

uint32_t to_u32(const std::string& tok, std::size_t line) {
  try {
    std::size_t used = 0;
    const unsigned long v = std::stoul(tok, &used);
    if (used != tok.size() || v == 0 || v > 0xFFFFFFFFull) throw std::invalid_argument(tok);
    return static_cast<uint32_t>(v);
  } catch (...) {
    fail(line, "expected a positive integer, got '" + tok + "'");
  }
}

uint64_t to_u64(const std::string& tok, std::size_t line) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (...) {
    fail(line, "expected an integer, got '" + tok + "'");
  }
}

double to_double(const std::string& tok, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size() || !std::isfinite(v)) throw std::invalid_argument(tok);
    return v;
  } catch (...) {
    fail(line, "expected a number, got '" + tok + "'");
  }
}

bool to_bool(const std::string& tok, std::size_t line) {
  if (tok == "true") return true;
  if (tok == "false") return false;
  fail(line, "expected true or false, got '" + tok + "'");
}

}  // namespace

ExperimentConfig parse_config_text(std::string_view text) {
  ExperimentConfig cfg;
  bool saw_n = false, saw_d = false;

  std::size_t lineno = 0, pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view raw =
        nl == std::string_view::npos ? text.substr(pos) : text.substr(pos, nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++lineno;

    const std::size_t hash = raw.find('#');
    if (hash != std::string_view::npos) raw = raw.substr(0, hash);
    raw = trim(raw);
    if (raw.empty()) continue;

    const std::size_t eq = raw.find('=');
    if (eq == std::string_view::npos) fail(lineno, "expected key = value");
    const std::string key(trim(raw.substr(0, eq)));
    const std::string_view value = trim(raw.substr(eq + 1));
    if (value.empty()) fail(lineno, "missing value for '" + key + "'");
    const std::vector<std::string> elems = elements(value, lineno);
    auto scalar = [&]() -> const std::string& {
      if (elems.size() != 1) fail(lineno, "'" + key + "' takes a single value");
      return elems.front();
    };

    if (key == "gen") {
      const std::string& v = scalar();
      if (v == "er") cfg.gen = GenKind::ER;
      else if (v == "sbm") cfg.gen = GenKind::SBM;
      else if (v == "bundle") cfg.gen = GenKind::BUNDLE;
      else fail(lineno, "gen must be er, sbm or bundle");
    } else if (key == "n") {
      cfg.n_list.clear();
      for (const auto& e : elems) cfg.n_list.push_back(to_u32(e, lineno));
      saw_n = true;
    } else if (key == "k") {
      cfg.sbm_k = to_u32(scalar(), lineno);
    } else if (key == "p") {
      const std::string& v = scalar();
      if (v != "auto") {
        const double p = to_double(v, lineno);
        if (p < 0.0 || p > 1.0) fail(lineno, "p must lie in [0, 1]");
      }
      cfg.p_spec = v;
    } else if (key == "q") {
      cfg.sbm_q = to_double(scalar(), lineno);
      if (cfg.sbm_q < 0.0 || cfg.sbm_q > 1.0) fail(lineno, "q must lie in [0, 1]");
    } else if (key == "bundle") {
      cfg.bundle_path = scalar();
    } else if (key == "d") {
      cfg.d_list.clear();
      for (const auto& e : elems) cfg.d_list.push_back(to_u32(e, lineno));
      saw_d = true;
    } else if (key == "L") {
      cfg.l_list.clear();
      for (const auto& e : elems) cfg.l_list.push_back(to_u32(e, lineno));
    } else if (key == "arch") {
      cfg.arch_list.clear();
      for (const auto& e : elems) {
        const auto a = arch_from_name(e);
        if (!a) fail(lineno, "unknown arch '" + e + "'");
        cfg.arch_list.push_back(*a);
      }
    } else if (key == "sigma") {
      cfg.sigma_list.clear();
      for (const auto& e : elems) {
        const double s = to_double(e, lineno);
        if (s < 0.0) fail(lineno, "sigma must be >= 0");
        cfg.sigma_list.push_back(s);
      }
    } else if (key == "init") {
      const std::string& v = scalar();
      if (v == "identity") cfg.init = InitScheme::IDENTITY;
      else if (v == "he") cfg.init = InitScheme::HE;
      else if (v == "product") cfg.init = InitScheme::PRODUCT;
      else fail(lineno, "init must be identity, he or product");
    } else if (key == "mode") {
      const std::string& v = scalar();
      if (v == "standard") cfg.mode = EncodeMode::STANDARD;
      else if (v == "nag") cfg.mode = EncodeMode::NAG;
      else fail(lineno, "mode must be standard or nag");
    } else if (key == "scheme") {
      const std::string& v = scalar();
      if (v == "unconstrained") cfg.scheme = WeightScheme::UNCONSTRAINED;
      else if (v == "constrained") cfg.scheme = WeightScheme::CONSTRAINED;
      else fail(lineno, "scheme must be unconstrained or constrained");
    } else if (key == "sim") {
      const auto s = sim_from_name(scalar());
      if (!s) fail(lineno, "sim must be cos or corr");
      cfg.sim = *s;
    } else if (key == "trained") {
      cfg.trained = to_bool(scalar(), lineno);
    } else if (key == "epochs") {
      cfg.epochs = to_u32(scalar(), lineno);
    } else if (key == "lr") {
      cfg.lr = to_double(scalar(), lineno);
      if (cfg.lr <= 0.0) fail(lineno, "lr must be > 0");
    } else if (key == "target") {
      const std::string& v = scalar();
      if (v == "auto") cfg.target = AttackTarget::AUTO;
      else if (v == "full_graph") cfg.target = AttackTarget::FULL_GRAPH;
      else if (v == "test_subgraph") cfg.target = AttackTarget::TEST_SUBGRAPH;
      else fail(lineno, "target must be auto, full_graph or test_subgraph");
    } else if (key == "seeds") {
      cfg.seeds = to_u32(scalar(), lineno);
    } else if (key == "master_seed") {
      cfg.master_seed = to_u64(scalar(), lineno);
    } else if (key == "out") {
      cfg.out = scalar();
    } else if (key == "fs_baseline") {
      cfg.fs_baseline = to_bool(scalar(), lineno);
    } else {
      fail(lineno, "unknown key '" + key + "'");
    }
  }

  // cross-key validation
  if (cfg.gen == GenKind::BUNDLE) {
    if (cfg.bundle_path.empty())
      throw std::invalid_argument("config: gen = bundle requires a bundle path");
  } else {
    if (!saw_n) throw std::invalid_argument("config: synthetic generators require n");
  }
  if (!saw_d && cfg.gen == GenKind::BUNDLE)
    throw std::invalid_argument("config: gen = bundle requires d (the layer width)");
  if (cfg.trained && cfg.gen != GenKind::BUNDLE)
    throw std::invalid_argument("config: trained runs need a bundle with labels and masks");
  if (cfg.mode == EncodeMode::STANDARD)
    for (double s : cfg.sigma_list)
      if (s > 0.0) throw std::invalid_argument("config: sigma > 0 requires mode = nag");
  if (cfg.target == AttackTarget::TEST_SUBGRAPH && cfg.gen != GenKind::BUNDLE)
    throw std::invalid_argument("config: test_subgraph target requires a bundle");
  if (cfg.gen == GenKind::SBM) {
    for (uint32_t n : cfg.n_list)
      if (n % cfg.sbm_k != 0)
        throw std::invalid_argument("config: sbm needs n divisible by k");
  }
  if (cfg.seeds == 0) throw std::invalid_argument("config: seeds must be >= 1");
  return cfg;
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("config file not found: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

}  // namespace sera
