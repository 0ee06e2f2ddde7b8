#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pncgames/bell_bridge.hpp"
#include "pncgames/catalog.hpp"
#include "pncgames/classical_bound.hpp"
#include "pncgames/io.hpp"
#include "pncgames/quantum_eval.hpp"
#include "pncgames/seesaw.hpp"

namespace py = pybind11;
using namespace pnc;

namespace {

py::dict bound_dict(const BoundResult& b) {
  py::dict out;
  out["value"] = b.value;
  out["exact"] = b.exact_value ? py::object(py::str(b.exact_value->str())) : py::object(py::none());
  out["max_alphabet"] = b.max_alphabet;
  out["nodes"] = b.nodes;
  out["saturated"] = b.saturated;
  out["encoding"] = b.witness.encoding;
  std::vector<std::vector<int>> dec(b.witness.decoding.rows());
  for (int m = 0; m < b.witness.decoding.rows(); ++m) {
    for (int y = 0; y < b.witness.decoding.cols(); ++y) dec[m].push_back(b.witness.decoding(m, y));
  }
  out["decoding"] = dec;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Preparation-noncontextuality games: bounds, quantum values, see-saw, Bell bridge";

  py::register_exception<GameError>(m, "GameError", PyExc_ValueError);
  py::register_exception<io::FormatError>(m, "FormatError", PyExc_ValueError);

  py::class_<Game>(m, "Game")
      .def_readonly("alice_inputs", &Game::alice_inputs)
      .def_readonly("bob_inputs", &Game::bob_inputs)
      .def_readonly("num_outcomes", &Game::num_outcomes)
      .def_readonly("prior_alice", &Game::prior_alice)
      .def_readonly("prior_bob", &Game::prior_bob)
      .def_property_readonly("num_tasks", &Game::num_tasks)
      .def_property_readonly("partitions",
                             [](const Game& g) {
                               std::vector<std::vector<Cell>> out;
                               for (const auto& p : g.partitions.partitions) out.push_back(p.cells);
                               return out;
                             })
      .def("to_json", [](const Game& g) { return io::dump_game(g); })
      .def_static("from_json", [](const std::string& text) { return io::parse_game(text); })
      .def("__eq__", [](const Game& a, const Game& b) { return a == b; });

  py::class_<QuantumStrategy>(m, "QuantumStrategy")
      .def(py::init([](int dim, std::vector<ComplexMatrix> states,
                       std::vector<std::vector<ComplexMatrix>> measurements) {
             QuantumStrategy s{dim, std::move(states), std::move(measurements)};
             s.validate();
             return s;
           }),
           py::arg("dim"), py::arg("states"), py::arg("measurements"))
      .def_readonly("dim", &QuantumStrategy::dim)
      .def_readonly("states", &QuantumStrategy::states)
      .def_readonly("measurements", &QuantumStrategy::measurements)
      .def("to_json", [](const QuantumStrategy& s) { return io::dump_strategy(s); })
      .def_static("from_json", [](const std::string& text) { return io::parse_strategy(text); });

  m.def("build_rac", [](int n, int d) { return build_rac({n, d}); }, py::arg("n"), py::arg("d"));
  m.def("rac_pnc_bound", [](int n, int d) { return rac_pnc_bound({n, d}).str(); }, py::arg("n"), py::arg("d"),
        "Analytic bound (n+d-1)/(nd) as a fraction string.");
  m.def("build_cglmp_game", &build_cglmp_game, py::arg("d"));
  m.def("cglmp_quantum_strategy",
        [](int d, std::optional<std::vector<double>> schmidt) {
          return cglmp_quantum_strategy({d, schmidt.value_or(std::vector<double>(d, 1.0))});
        },
        py::arg("d"), py::arg("schmidt") = py::none());
  m.def("cglmp_value_formula",
        [](int d, std::optional<std::vector<double>> schmidt) {
          return cglmp_value_formula({d, schmidt.value_or(std::vector<double>(d, 1.0))});
        },
        py::arg("d"), py::arg("schmidt") = py::none());
  m.def("cglmp_mixed_value", &cglmp_mixed_value, py::arg("d"));

  m.def(
      "pnc_bound",
      [](const Game& g, int max_alphabet, const std::string& mode) {
        BoundOptions opts;
        opts.max_alphabet = max_alphabet;
        if (mode == "exact") opts.mode = SearchMode::exact;
        else if (mode != "bnb") throw std::invalid_argument("mode must be 'bnb' or 'exact'");
        return bound_dict(pnc_bound(g, opts));
      },
      py::arg("game"), py::arg("max_alphabet") = 0, py::arg("mode") = "bnb");

  m.def("quantum_performance", &quantum_performance, py::arg("game"), py::arg("strategy"));
  m.def(
      "obliviousness_deviation",
      [](const Game& g, const QuantumStrategy& s) { return check_quantum_obliviousness(g, s).max_deviation; },
      py::arg("game"), py::arg("strategy"));

  m.def(
      "seesaw",
      [](const Game& g, int dim, int restarts, std::uint64_t seed, double eps, int max_iters) {
        SeesawConfig cfg;
        cfg.dim = dim;
        cfg.restarts = restarts;
        cfg.rng_seed = seed;
        cfg.eps = eps;
        cfg.max_iters = max_iters;
        SeesawResult r;
        {
          py::gil_scoped_release release;
          r = seesaw(g, cfg);
        }
        py::dict out;
        out["value"] = r.value;
        out["strategy"] = r.strategy;
        out["best_restart"] = r.best_restart;
        std::vector<double> trace;
        for (const auto& p : r.trace) trace.push_back(p.objective);
        out["trace"] = trace;
        return out;
      },
      py::arg("game"), py::arg("dim"), py::arg("restarts") = 50, py::arg("seed") = 0, py::arg("eps") = 1e-9,
      py::arg("max_iters") = 2000);

  m.def(
      "bridge",
      [](const std::string& scenario_json, const std::string& setup_json) {
        const auto s = io::parse_scenario(scenario_json);
        const auto setup = io::parse_setup(setup_json);
        setup.validate_for(s);
        const Game g = bridge_game(s);
        const QuantumStrategy qs = steered_strategy(setup);
        py::dict out;
        out["bell_value"] = bell_value(s, setup);
        out["game_performance"] = quantum_performance(g, qs);
        out["obliviousness_deviation"] = check_quantum_obliviousness(g, qs).max_deviation;
        out["game"] = g;
        return out;
      },
      py::arg("scenario_json"), py::arg("setup_json"),
      "Bell value and steered game performance from scenario and setup JSON text.");
}
