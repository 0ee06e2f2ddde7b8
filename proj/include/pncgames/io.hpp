#pragma once

// JSON files for games, quantum strategies, Bell scenarios and bipartite
// setups.
//
// Complex matrices are written as a flat row-major list of [re, im] pairs;
// on input, a list of rows of pairs and plain reals for real entries are
// accepted as well.
//
// Setup files: {"dim_a", "dim_b", "state", "alice_measurements",
// "bob_measurements"} where state is one of {"schmidt": [gamma...]},
// {"vector": [[re, im], ...]} (index i * dim_b + j) or {"density": matrix}.
// With a Schmidt vector the dimensions may be omitted.

#include <stdexcept>
#include <string>
#include <string_view>

#include "pncgames/bell_bridge.hpp"
#include "pncgames/game.hpp"
#include "pncgames/quantum_eval.hpp"

namespace pnc::io {

/// Malformed document: bad JSON (message carries line and column) or a
/// schema violation (message starts with the field path).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

Game parse_game(std::string_view text, std::string_view source = "<input>");
std::string dump_game(const Game& g);
Game load_game(const std::string& path);
void save_game(const Game& g, const std::string& path);

QuantumStrategy parse_strategy(std::string_view text, std::string_view source = "<input>");
std::string dump_strategy(const QuantumStrategy& s);
QuantumStrategy load_strategy(const std::string& path);
void save_strategy(const QuantumStrategy& s, const std::string& path);

BellScenario parse_scenario(std::string_view text, std::string_view source = "<input>");
std::string dump_scenario(const BellScenario& s);
BellScenario load_scenario(const std::string& path);

BipartiteQuantumSetup parse_setup(std::string_view text, std::string_view source = "<input>");
std::string dump_setup(const BipartiteQuantumSetup& s);
BipartiteQuantumSetup load_setup(const std::string& path);

}  // namespace pnc::io
