#include "mgap/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mgap {

using nlohmann::json;

namespace {

std::string join_issues(const std::vector<std::string>& issues) {
  std::ostringstream os;
  os << "configuration rejected:";
  for (const std::string& s : issues) os << "\n  " << s;
  return os.str();
}

class Parser {
 public:
  std::vector<std::string> issues;

  void fail(const std::string& path, const std::string& msg) {
    issues.emplace_back(path + ": " + msg);
  }

  Complex parse_entry(const json& e, const std::string& path) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number()) {
      fail(path, "matrix entries must be [re, im] pairs");
      return 0.0;
    }
    return Complex(e[0].get<double>(), e[1].get<double>());
  }

  Matrix parse_matrix(const json& m, const std::string& path) {
    if (!m.is_array() || m.empty()) {
      fail(path, "expected a nonempty array of rows");
      return Matrix::Zero(0, 0);
    }
    const std::size_t rows = m.size();
    Matrix out(rows, rows);
    for (std::size_t r = 0; r < rows; ++r) {
      const json& row = m[r];
      if (!row.is_array() || row.size() != rows) {
        fail(path + "[" + std::to_string(r) + "]", "matrix must be square");
        return Matrix::Zero(0, 0);
      }
      for (std::size_t c = 0; c < rows; ++c) {
        out(r, c) = parse_entry(row[c], path + "[" + std::to_string(r) + "][" +
                                            std::to_string(c) + "]");
      }
    }
    return out;
  }

  // Bare matrix (single block) or {"blocks": [matrix, ...]}.
  std::optional<AlgebraElement> parse_element(const TracialAlgebra& algebra,
                                              const json& e,
                                              const std::string& path) {
    std::vector<Matrix> blocks;
    if (e.is_object() && e.contains("blocks")) {
      const json& list = e["blocks"];
      if (!list.is_array() ||
          static_cast<int>(list.size()) != algebra.num_blocks()) {
        fail(path + ".blocks", "expected one matrix per algebra block");
        return std::nullopt;
      }
      for (std::size_t i = 0; i < list.size(); ++i) {
        blocks.push_back(
            parse_matrix(list[i], path + ".blocks[" + std::to_string(i) + "]"));
      }
    } else if (e.is_array() && algebra.num_blocks() == 1) {
      blocks.push_back(parse_matrix(e, path));
    } else {
      fail(path, "expected a matrix or {\"blocks\": [...]}");
      return std::nullopt;
    }
    if (!issues.empty()) return std::nullopt;
    for (int i = 0; i < algebra.num_blocks(); ++i) {
      if (blocks[i].rows() != algebra.blocks()[i].dim) {
        fail(path, "block " + std::to_string(i) + " has the wrong dimension");
        return std::nullopt;
      }
    }
    return AlgebraElement(algebra, std::move(blocks));
  }

  std::optional<TracialAlgebra> parse_algebra(const json& a,
                                              const std::string& path) {
    if (!a.is_object() || !a.contains("blocks") || !a["blocks"].is_array() ||
        a["blocks"].empty()) {
      fail(path, "expected {\"blocks\": [{\"dim\": n, \"weight\": w}, ...]}");
      return std::nullopt;
    }
    std::vector<Block> blocks;
    for (std::size_t i = 0; i < a["blocks"].size(); ++i) {
      const json& b = a["blocks"][i];
      const std::string bp = path + ".blocks[" + std::to_string(i) + "]";
      if (!b.is_object() || !b.contains("dim") ||
          !b["dim"].is_number_integer()) {
        fail(bp, "block needs an integer \"dim\"");
        return std::nullopt;
      }
      const int dim = b["dim"].get<int>();
      double weight = b.value("weight", -1.0);
      if (!b.contains("weight")) {
        fail(bp, "block needs a positive \"weight\"");
        return std::nullopt;
      }
      if (dim < 1) {
        fail(bp + ".dim", "must be >= 1");
        return std::nullopt;
      }
      if (!(weight > 0.0)) {
        fail(bp + ".weight", "must be > 0");
        return std::nullopt;
      }
      blocks.push_back(Block{dim, weight});
    }
    try {
      return TracialAlgebra(std::move(blocks));
    } catch (const StructuralError& e) {
      fail(path, e.what());
      return std::nullopt;
    }
  }

  std::optional<Subalgebra> parse_subalgebra(const TracialAlgebra& algebra,
                                             const json& s,
                                             const std::string& path) {
    if (!s.is_object()) {
      fail(path, "expected a subalgebra object");
      return std::nullopt;
    }
    try {
      if (s.contains("preset")) {
        const std::string preset = s["preset"].get<std::string>();
        if (preset == "scalars") return scalar_subalgebra(algebra);
        if (preset == "diagonal") return diagonal_subalgebra(algebra);
        if (preset == "full") return full_subalgebra(algebra);
        if (preset == "rotated-diagonal") {
          if (!s.contains("angle") || !s["angle"].is_number()) {
            fail(path + ".angle", "rotated-diagonal needs a numeric angle");
            return std::nullopt;
          }
          return rotated_diagonal_subalgebra(algebra, s["angle"].get<double>());
        }
        fail(path + ".preset", "unknown preset \"" + preset + "\"");
        return std::nullopt;
      }
      if (s.contains("generators")) {
        std::vector<AlgebraElement> gens;
        const json& list = s["generators"];
        if (!list.is_array()) {
          fail(path + ".generators", "expected an array of elements");
          return std::nullopt;
        }
        for (std::size_t i = 0; i < list.size(); ++i) {
          auto g = parse_element(algebra, list[i],
                                 path + ".generators[" + std::to_string(i) + "]");
          if (!g) return std::nullopt;
          gens.push_back(std::move(*g));
        }
        return generate_subalgebra(algebra, gens);
      }
    } catch (const StructuralError& e) {
      fail(path, e.what());
      return std::nullopt;
    }
    fail(path, "expected \"preset\" or \"generators\"");
    return std::nullopt;
  }

  std::optional<MarkovMap> parse_channel(const TracialAlgebra& algebra,
                                         const json& c, const std::string& path,
                                         std::string* id) {
    if (!c.is_object() || !c.contains("kind") || !c["kind"].is_string()) {
      fail(path, "channel needs a string \"kind\"");
      return std::nullopt;
    }
    const std::string kind = c["kind"].get<std::string>();
    if (id->empty()) *id = kind;
    try {
      if (kind == "identity") return identity_channel(algebra);
      if (kind == "depolarizing") {
        if (!c.contains("lambda") || !c["lambda"].is_number()) {
          fail(path + ".lambda", "depolarizing needs a numeric lambda");
          return std::nullopt;
        }
        return depolarizing_channel(algebra, c["lambda"].get<double>());
      }
      if (kind == "kraus") {
        if (!c.contains("operators") || !c["operators"].is_array() ||
            c["operators"].empty()) {
          fail(path + ".operators", "kraus needs a nonempty operator list");
          return std::nullopt;
        }
        std::vector<AlgebraElement> ops;
        for (std::size_t i = 0; i < c["operators"].size(); ++i) {
          auto a = parse_element(algebra, c["operators"][i],
                                 path + ".operators[" + std::to_string(i) + "]");
          if (!a) return std::nullopt;
          ops.push_back(std::move(*a));
        }
        return kraus_channel(algebra, std::move(ops));
      }
      if (kind == "schur") {
        if (!c.contains("mask")) {
          fail(path + ".mask", "schur needs a mask matrix");
          return std::nullopt;
        }
        Matrix mask = parse_matrix(c["mask"], path + ".mask");
        if (!issues.empty()) return std::nullopt;
        return schur_channel(algebra, std::move(mask));
      }
      if (kind == "stochastic") {
        if (!c.contains("kernel") || !c["kernel"].is_array()) {
          fail(path + ".kernel", "stochastic needs a kernel (rows of numbers)");
          return std::nullopt;
        }
        const json& rows = c["kernel"];
        const int n = static_cast<int>(rows.size());
        RealMatrix k(n, n);
        for (int r = 0; r < n; ++r) {
          if (!rows[r].is_array() || static_cast<int>(rows[r].size()) != n) {
            fail(path + ".kernel", "kernel must be a square array of numbers");
            return std::nullopt;
          }
          for (int cidx = 0; cidx < n; ++cidx) {
            if (!rows[r][cidx].is_number()) {
              fail(path + ".kernel", "kernel entries must be numbers");
              return std::nullopt;
            }
            k(r, cidx) = rows[r][cidx].get<double>();
          }
        }
        return stochastic_kernel_channel(algebra, std::move(k));
      }
      if (kind == "cyclic") {
        if (!c.contains("distribution") || !c["distribution"].is_array()) {
          fail(path + ".distribution", "cyclic needs a probability vector");
          return std::nullopt;
        }
        std::vector<double> dist;
        for (const json& v : c["distribution"]) {
          if (!v.is_number()) {
            fail(path + ".distribution", "entries must be numbers");
            return std::nullopt;
          }
          dist.push_back(v.get<double>());
        }
        return cyclic_convolution_channel(algebra, dist);
      }
      if (kind == "conditional-expectation") {
        if (!c.contains("subalgebra")) {
          fail(path + ".subalgebra", "conditional-expectation needs a subalgebra");
          return std::nullopt;
        }
        auto s = parse_subalgebra(algebra, c["subalgebra"], path + ".subalgebra");
        if (!s) return std::nullopt;
        return conditional_expectation(*s);
      }
      if (kind == "transpose") return transpose_channel(algebra);
      if (kind == "transfer") {
        if (!c.contains("matrix")) {
          fail(path + ".matrix", "transfer needs a matrix");
          return std::nullopt;
        }
        Matrix m = parse_matrix(c["matrix"], path + ".matrix");
        if (!issues.empty()) return std::nullopt;
        return raw_transfer_channel(algebra, std::move(m));
      }
      if (kind == "composition") {
        if (!c.contains("factors") || !c["factors"].is_array() ||
            c["factors"].empty()) {
          fail(path + ".factors", "composition needs a nonempty factor list");
          return std::nullopt;
        }
        std::optional<MarkovMap> acc;
        for (std::size_t i = 0; i < c["factors"].size(); ++i) {
          std::string sub_id;
          auto f = parse_channel(algebra, c["factors"][i],
                                 path + ".factors[" + std::to_string(i) + "]",
                                 &sub_id);
          if (!f) return std::nullopt;
          acc = acc ? compose(*acc, *f) : *f;
        }
        return acc;
      }
    } catch (const StructuralError& e) {
      fail(path, e.what());
      return std::nullopt;
    } catch (const DomainError& e) {
      fail(path, e.what());
      return std::nullopt;
    }
    fail(path + ".kind", "unknown channel kind \"" + kind + "\"");
    return std::nullopt;
  }
};

}  // namespace

ConfigError::ConfigError(std::vector<std::string> issues_in)
    : std::runtime_error(join_issues(issues_in)), issues(std::move(issues_in)) {}

std::string to_string(Task t) {
  switch (t) {
    case Task::kValidate: return "validate";
    case Task::kGap: return "gap";
    case Task::kBounds: return "bounds";
    case Task::kLemmas: return "lemmas";
    case Task::kSigma: return "sigma";
  }
  return "?";
}

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError({std::string("$: not valid JSON (") + e.what() + ")"});
  }
  if (!doc.is_object()) throw ConfigError({"$: expected a JSON object"});

  Parser p;
  if (!doc.contains("algebra")) {
    throw ConfigError({"$.algebra: required"});
  }
  auto algebra = p.parse_algebra(doc["algebra"], "$.algebra");
  if (!algebra) throw ConfigError(std::move(p.issues));

  ExperimentConfig cfg{*algebra};

  if (doc.contains("channel")) {
    cfg.channel_id = doc["channel"].is_object()
                         ? doc["channel"].value("id", std::string())
                         : std::string();
    auto ch = p.parse_channel(*algebra, doc["channel"], "$.channel",
                              &cfg.channel_id);
    if (ch) cfg.channel = std::move(*ch);
  }
  if (doc.contains("subalgebras")) {
    const json& s = doc["subalgebras"];
    if (!s.is_object() || !s.contains("A") || !s.contains("B")) {
      p.fail("$.subalgebras", "expected {\"A\": ..., \"B\": ...}");
    } else {
      auto a = p.parse_subalgebra(*algebra, s["A"], "$.subalgebras.A");
      auto b = p.parse_subalgebra(*algebra, s["B"], "$.subalgebras.B");
      if (a) cfg.subalgebra_a = std::move(*a);
      if (b) cfg.subalgebra_b = std::move(*b);
    }
  }
  if (doc.contains("c2")) {
    if (!doc["c2"].is_number()) {
      p.fail("$.c2", "must be a number in [0, 1)");
    } else {
      cfg.c2_literal = doc["c2"].get<double>();
      if (!(*cfg.c2_literal >= 0.0 && *cfg.c2_literal < 1.0)) {
        p.fail("$.c2", "must lie in [0, 1)");
      }
    }
  }

  if (doc.contains("p_grid")) {
    if (!doc["p_grid"].is_array() || doc["p_grid"].empty()) {
      p.fail("$.p_grid", "expected a nonempty array of numbers");
    } else {
      for (const json& v : doc["p_grid"]) {
        if (!v.is_number()) {
          p.fail("$.p_grid", "entries must be numbers");
          break;
        }
        cfg.p_grid.push_back(v.get<double>());
      }
    }
  } else {
    cfg.p_grid = {1.5, 2.0, 3.0};
  }

  if (doc.contains("tasks")) {
    if (!doc["tasks"].is_array() || doc["tasks"].empty()) {
      p.fail("$.tasks", "expected a nonempty array of task names");
    } else {
      for (const json& v : doc["tasks"]) {
        const std::string name = v.is_string() ? v.get<std::string>() : "";
        if (name == "validate") cfg.tasks.push_back(Task::kValidate);
        else if (name == "gap") cfg.tasks.push_back(Task::kGap);
        else if (name == "bounds") cfg.tasks.push_back(Task::kBounds);
        else if (name == "lemmas") cfg.tasks.push_back(Task::kLemmas);
        else if (name == "sigma") cfg.tasks.push_back(Task::kSigma);
        else p.fail("$.tasks", "unknown task \"" + name + "\"");
      }
    }
  } else {
    cfg.tasks = {Task::kValidate, Task::kGap, Task::kBounds};
  }

  cfg.seed_given = doc.contains("seed");
  if (cfg.seed_given) {
    if (!doc["seed"].is_number_integer()) {
      p.fail("$.seed", "must be an integer");
    } else {
      cfg.seed = doc["seed"].get<std::uint64_t>();
    }
  }
  cfg.restarts = doc.value("restarts", 20);
  cfg.max_iters = doc.value("max_iters", 5000);
  cfg.tol = doc.value("tol", 1e-10);
  cfg.lemma_count = doc.value("lemma_count", 1000);
  cfg.threads = doc.value("threads", 1);
  cfg.out_path = doc.value("out", std::string());
  cfg.format = doc.value("format", std::string("csv"));
  if (cfg.format != "csv" && cfg.format != "json") {
    p.fail("$.format", "must be \"csv\" or \"json\"");
  }
  if (cfg.restarts < 1) p.fail("$.restarts", "must be >= 1");
  if (cfg.max_iters < 1) p.fail("$.max_iters", "must be >= 1");
  if (!(cfg.tol > 0.0)) p.fail("$.tol", "must be > 0");
  if (cfg.threads < 1) p.fail("$.threads", "must be >= 1");

  const bool has_gap_like =
      std::count(cfg.tasks.begin(), cfg.tasks.end(), Task::kGap) ||
      std::count(cfg.tasks.begin(), cfg.tasks.end(), Task::kSigma);
  if (has_gap_like) {
    for (double pv : cfg.p_grid) {
      if (!(pv > 1.0) || std::isinf(pv)) {
        p.fail("$.p_grid",
               "gap and sigma tasks need p strictly inside (1, inf); the gap "
               "does not transfer to the endpoints");
        break;
      }
    }
  }
  const bool stochastic =
      has_gap_like ||
      std::count(cfg.tasks.begin(), cfg.tasks.end(), Task::kLemmas);
  if (stochastic && !cfg.seed_given) {
    p.fail("$.seed", "required when a stochastic task (gap, sigma, lemmas) is present");
  }
  for (Task t : cfg.tasks) {
    if ((t == Task::kValidate || t == Task::kGap) && !cfg.channel) {
      p.fail("$.channel", "required by the " + to_string(t) + " task");
    }
    if (t == Task::kBounds && !cfg.channel && !cfg.c2_literal) {
      p.fail("$.channel", "bounds task needs a channel or a c2 literal");
    }
    if (t == Task::kSigma && (!cfg.subalgebra_a || !cfg.subalgebra_b)) {
      p.fail("$.subalgebras", "sigma task needs subalgebras A and B");
    }
  }

  if (!p.issues.empty()) throw ConfigError(std::move(p.issues));
  if (cfg.channel_id.empty()) cfg.channel_id = cfg.channel ? "channel" : "none";
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"$: cannot open config file " + path});
  std::ostringstream os;
  os << in.rdbuf();
  return parse_config(os.str());
}

std::string default_config_json() {
  return R"({
  "algebra": {"blocks": [{"dim": 2, "weight": 1.0}]},
  "channel": {"kind": "depolarizing", "lambda": 0.3},
  "subalgebras": {
    "A": {"preset": "diagonal"},
    "B": {"preset": "rotated-diagonal", "angle": 0.7853981633974483}
  },
  "p_grid": [1.5, 2.0, 3.0],
  "tasks": ["validate", "gap", "bounds", "lemmas", "sigma"],
  "seed": 1,
  "restarts": 8,
  "lemma_count": 250
})";
}

std::string element_to_json(const AlgebraElement& x) {
  json blocks = json::array();
  for (int i = 0; i < x.num_blocks(); ++i) {
    const Matrix& m = x.block(i);
    json rows = json::array();
    for (int r = 0; r < m.rows(); ++r) {
      json row = json::array();
      for (int c = 0; c < m.cols(); ++c) {
        row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
      }
      rows.push_back(std::move(row));
    }
    blocks.push_back(std::move(rows));
  }
  return json{{"blocks", std::move(blocks)}}.dump();
}

AlgebraElement element_from_json(const TracialAlgebra& algebra,
                                 const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError({std::string("$: not valid JSON (") + e.what() + ")"});
  }
  Parser p;
  auto el = p.parse_element(algebra, doc, "$");
  if (!el) throw ConfigError(std::move(p.issues));
  return *el;
}

}  // namespace mgap
