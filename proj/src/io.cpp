#include "pncgames/io.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace pnc::io {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& problem) {
  throw FormatError(field + ": " + problem);
}

json parse_text(std::string_view text, std::string_view source) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // Line and column from the byte offset.
    std::size_t line = 1, col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream msg;
    msg << source << ":" << line << ":" << col << ": JSON parse error: " << e.what();
    throw FormatError(msg.str());
  }
}

const json& field(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) fail(path.empty() ? "document" : path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(path.empty() ? key : path + "." + key, "missing");
  return *it;
}

std::string join(const std::string& path, const char* key) { return path.empty() ? key : path + "." + key; }

std::string idx(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

int as_int(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  const auto v = j.get<long long>();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) fail(path, "out of range");
  return static_cast<int>(v);
}

double as_real(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

const json& as_array(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array");
  return j;
}

std::vector<double> real_vector(const json& j, const std::string& path) {
  as_array(j, path);
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_real(j[i], idx(path, i)));
  return out;
}

template <class T, class Get>
Table<T> table(const json& j, int rows, int cols, const std::string& path, Get get) {
  as_array(j, path);
  if (static_cast<int>(j.size()) != rows) fail(path, "expected " + std::to_string(rows) + " rows");
  Table<T> t(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const std::string rp = idx(path, r);
    as_array(j[r], rp);
    if (static_cast<int>(j[r].size()) != cols) fail(rp, "expected " + std::to_string(cols) + " columns");
    for (int c = 0; c < cols; ++c) t(r, c) = get(j[r][c], idx(rp, c));
  }
  return t;
}

template <class T>
json table_json(const Table<T>& t) {
  json out = json::array();
  for (int r = 0; r < t.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < t.cols(); ++c) row.push_back(t(r, c));
    out.push_back(std::move(row));
  }
  return out;
}

Complex complex_entry(const json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  fail(path, "expected [re, im] or a real number");
}

ComplexMatrix complex_matrix(const json& j, int dim, const std::string& path) {
  as_array(j, path);
  ComplexMatrix m(dim, dim);
  const auto n = static_cast<std::size_t>(dim) * dim;
  auto is_entry = [](const json& e) {
    return e.is_number() || (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number());
  };
  const bool flat = j.size() == n && std::all_of(j.begin(), j.end(), is_entry);
  const bool nested = !flat && j.size() == static_cast<std::size_t>(dim);
  if (nested) {
    for (int r = 0; r < dim; ++r) {
      const std::string rp = idx(path, r);
      as_array(j[r], rp);
      if (static_cast<int>(j[r].size()) != dim) fail(rp, "expected " + std::to_string(dim) + " entries");
      for (int c = 0; c < dim; ++c) m(r, c) = complex_entry(j[r][c], idx(rp, c));
    }
    return m;
  }
  if (j.size() != n) fail(path, "expected " + std::to_string(n) + " entries (dim*dim, row-major)");
  for (std::size_t i = 0; i < n; ++i) m(i / dim, i % dim) = complex_entry(j[i], idx(path, i));
  return m;
}

json complex_json(const Complex& z) { return json::array({z.real(), z.imag()}); }

json matrix_json(const ComplexMatrix& m) {
  json out = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(complex_json(m(r, c)));
  }
  return out;
}

std::vector<std::vector<ComplexMatrix>> povm_list(const json& j, int dim, const std::string& path) {
  as_array(j, path);
  std::vector<std::vector<ComplexMatrix>> out;
  for (std::size_t y = 0; y < j.size(); ++y) {
    const std::string yp = idx(path, y);
    as_array(j[y], yp);
    auto& povm = out.emplace_back();
    for (std::size_t b = 0; b < j[y].size(); ++b) povm.push_back(complex_matrix(j[y][b], dim, idx(yp, b)));
  }
  return out;
}

json povm_list_json(const std::vector<std::vector<ComplexMatrix>>& ms) {
  json out = json::array();
  for (const auto& povm : ms) {
    json p = json::array();
    for (const auto& e : povm) p.push_back(matrix_json(e));
    out.push_back(std::move(p));
  }
  return out;
}

template <class F>
auto wrap(std::string_view source, F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw FormatError(std::string(source) + ": " + e.what());
  }
}

}  // namespace

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

Game parse_game(std::string_view text, std::string_view source) {
  const json j = parse_text(text, source);
  return wrap(source, [&] {
    Game g;
    g.alice_inputs = as_int(field(j, "alice_inputs", ""), "alice_inputs");
    g.bob_inputs = as_int(field(j, "bob_inputs", ""), "bob_inputs");
    g.num_outcomes = as_int(field(j, "num_outcomes", ""), "num_outcomes");
    if (g.alice_inputs < 1) fail("alice_inputs", "must be at least 1");
    if (g.bob_inputs < 1) fail("bob_inputs", "must be at least 1");
    if (g.num_outcomes < 1) fail("num_outcomes", "must be at least 1");
    g.prior_alice = real_vector(field(j, "prior_alice", ""), "prior_alice");
    g.prior_bob = real_vector(field(j, "prior_bob", ""), "prior_bob");
    const json& tasks = as_array(field(j, "tasks", ""), "tasks");
    const json& pays = as_array(field(j, "payoffs", ""), "payoffs");
    if (tasks.size() != pays.size()) fail("payoffs", "need one payoff table per task");
    for (std::size_t k = 0; k < tasks.size(); ++k) {
      g.tasks.push_back(table<int>(tasks[k], g.alice_inputs, g.bob_inputs, idx("tasks", k), as_int));
      g.payoffs.push_back(table<double>(pays[k], g.alice_inputs, g.bob_inputs, idx("payoffs", k), as_real));
    }
    const json& parts = as_array(field(j, "partitions", ""), "partitions");
    for (std::size_t p = 0; p < parts.size(); ++p) {
      const std::string pp = idx("partitions", p);
      as_array(parts[p], pp);
      Partition part;
      for (std::size_t c = 0; c < parts[p].size(); ++c) {
        const std::string cp = idx(pp, c);
        as_array(parts[p][c], cp);
        Cell cell;
        for (std::size_t e = 0; e < parts[p][c].size(); ++e) cell.push_back(as_int(parts[p][c][e], idx(cp, e)));
        part.cells.push_back(std::move(cell));
      }
      g.partitions.partitions.push_back(std::move(part));
    }
    infer_exact_priors(g);
    g.validate();
    return g;
  });
}

std::string dump_game(const Game& g) {
  json j;
  j["alice_inputs"] = g.alice_inputs;
  j["bob_inputs"] = g.bob_inputs;
  j["num_outcomes"] = g.num_outcomes;
  j["prior_alice"] = g.prior_alice;
  j["prior_bob"] = g.prior_bob;
  j["tasks"] = json::array();
  for (const auto& t : g.tasks) j["tasks"].push_back(table_json(t));
  j["payoffs"] = json::array();
  for (const auto& t : g.payoffs) j["payoffs"].push_back(table_json(t));
  j["partitions"] = json::array();
  for (const auto& p : g.partitions.partitions) j["partitions"].push_back(p.cells);
  return j.dump(1) + "\n";
}

Game load_game(const std::string& path) { return parse_game(read_file(path), path); }

void save_game(const Game& g, const std::string& path) { write_file(path, dump_game(g)); }

QuantumStrategy parse_strategy(std::string_view text, std::string_view source) {
  const json j = parse_text(text, source);
  return wrap(source, [&] {
    QuantumStrategy s;
    s.dim = as_int(field(j, "dim", ""), "dim");
    if (s.dim < 1) fail("dim", "must be at least 1");
    const json& states = as_array(field(j, "states", ""), "states");
    for (std::size_t x = 0; x < states.size(); ++x) s.states.push_back(complex_matrix(states[x], s.dim, idx("states", x)));
    s.measurements = povm_list(field(j, "measurements", ""), s.dim, "measurements");
    s.validate();
    return s;
  });
}

std::string dump_strategy(const QuantumStrategy& s) {
  json j;
  j["dim"] = s.dim;
  j["states"] = json::array();
  for (const auto& r : s.states) j["states"].push_back(matrix_json(r));
  j["measurements"] = povm_list_json(s.measurements);
  return j.dump() + "\n";
}

QuantumStrategy load_strategy(const std::string& path) { return parse_strategy(read_file(path), path); }

void save_strategy(const QuantumStrategy& s, const std::string& path) { write_file(path, dump_strategy(s)); }

BellScenario parse_scenario(std::string_view text, std::string_view source) {
  const json j = parse_text(text, source);
  return wrap(source, [&] {
    BellScenario s;
    s.m_a = as_int(field(j, "m_a", ""), "m_a");
    s.m_b = as_int(field(j, "m_b", ""), "m_b");
    s.d = as_int(field(j, "d", ""), "d");
    const json& pri = field(j, "priors", "");
    if (pri.is_object()) {
      s.prior_alice = real_vector(field(pri, "alice", "priors"), "priors.alice");
      s.prior_bob = real_vector(field(pri, "bob", "priors"), "priors.bob");
    } else if (pri.is_array() && pri.size() == 2) {
      s.prior_alice = real_vector(pri[0], "priors[0]");
      s.prior_bob = real_vector(pri[1], "priors[1]");
    } else {
      fail("priors", "expected {\"alice\": [...], \"bob\": [...]}");
    }
    s.exact_prior_alice = exact_prior_from(s.prior_alice);
    s.exact_prior_bob = exact_prior_from(s.prior_bob);
    const json& terms = as_array(field(j, "terms", ""), "terms");
    for (std::size_t n = 0; n < terms.size(); ++n) {
      const std::string tp = idx("terms", n);
      BellTerm t;
      t.x = as_int(field(terms[n], "x", tp), join(tp, "x"));
      t.y = as_int(field(terms[n], "y", tp), join(tp, "y"));
      t.i = as_int(field(terms[n], "i", tp), join(tp, "i"));
      t.k = as_int(field(terms[n], "k", tp), join(tp, "k"));
      t.payoff = as_real(field(terms[n], "payoff", tp), join(tp, "payoff"));
      t.f_value = as_int(field(terms[n], "f_value", tp), join(tp, "f_value"));
      s.terms.push_back(t);
    }
    if (auto it = j.find("classical_bound"); it != j.end() && !it->is_null()) {
      s.classical_bound = as_real(*it, "classical_bound");
    }
    s.validate();
    return s;
  });
}

std::string dump_scenario(const BellScenario& s) {
  json j;
  j["m_a"] = s.m_a;
  j["m_b"] = s.m_b;
  j["d"] = s.d;
  j["priors"] = {{"alice", s.prior_alice}, {"bob", s.prior_bob}};
  j["terms"] = json::array();
  for (const auto& t : s.terms) {
    j["terms"].push_back({{"x", t.x}, {"y", t.y}, {"i", t.i}, {"k", t.k}, {"payoff", t.payoff}, {"f_value", t.f_value}});
  }
  if (s.classical_bound) j["classical_bound"] = *s.classical_bound;
  return j.dump(1) + "\n";
}

BellScenario load_scenario(const std::string& path) { return parse_scenario(read_file(path), path); }

BipartiteQuantumSetup parse_setup(std::string_view text, std::string_view source) {
  const json j = parse_text(text, source);
  return wrap(source, [&] {
    BipartiteQuantumSetup s;
    const json& st = field(j, "state", "");
    if (!st.is_object()) fail("state", "expected an object with schmidt, vector or density");
    const int keys = static_cast<int>(st.contains("schmidt")) + static_cast<int>(st.contains("vector")) +
                     static_cast<int>(st.contains("density"));
    if (keys != 1) fail("state", "give exactly one of schmidt, vector, density");
    if (st.contains("schmidt")) {
      const auto gamma = real_vector(st["schmidt"], "state.schmidt");
      if (gamma.empty()) fail("state.schmidt", "empty");
      s.dim_a = static_cast<int>(gamma.size());
      s.dim_b = s.dim_a;
      for (const char* key : {"dim_a", "dim_b"}) {
        if (j.contains(key) && as_int(j[key], key) != s.dim_a) fail(key, "does not match the Schmidt vector length");
      }
      try {
        s.pure = schmidt_state(gamma);
      } catch (const std::invalid_argument& e) {
        fail("state.schmidt", e.what());
      }
    } else {
      s.dim_a = as_int(field(j, "dim_a", ""), "dim_a");
      s.dim_b = as_int(field(j, "dim_b", ""), "dim_b");
      if (s.dim_a < 1 || s.dim_b < 1) fail("dim_a", "dimensions must be positive");
      const int n = s.dim_a * s.dim_b;
      if (st.contains("vector")) {
        const json& v = as_array(st["vector"], "state.vector");
        if (static_cast<int>(v.size()) != n) fail("state.vector", "expected dim_a*dim_b entries");
        ComplexVector psi(n);
        for (int i = 0; i < n; ++i) psi(i) = complex_entry(v[i], idx("state.vector", i));
        s.pure = std::move(psi);
      } else {
        s.density = complex_matrix(st["density"], n, "state.density");
      }
    }
    s.alice_measurements = povm_list(field(j, "alice_measurements", ""), s.dim_a, "alice_measurements");
    s.bob_measurements = povm_list(field(j, "bob_measurements", ""), s.dim_b, "bob_measurements");
    s.validate();
    return s;
  });
}

std::string dump_setup(const BipartiteQuantumSetup& s) {
  json j;
  j["dim_a"] = s.dim_a;
  j["dim_b"] = s.dim_b;
  if (s.pure) {
    json v = json::array();
    for (Eigen::Index i = 0; i < s.pure->size(); ++i) v.push_back(complex_json((*s.pure)(i)));
    j["state"] = {{"vector", v}};
  } else if (s.density) {
    j["state"] = {{"density", matrix_json(*s.density)}};
  }
  j["alice_measurements"] = povm_list_json(s.alice_measurements);
  j["bob_measurements"] = povm_list_json(s.bob_measurements);
  return j.dump() + "\n";
}

BipartiteQuantumSetup load_setup(const std::string& path) { return parse_setup(read_file(path), path); }

}  // namespace pnc::io
