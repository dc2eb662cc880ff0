#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "ssg/game.hpp"

namespace ssg {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses the instance format:
///   {"n": int, "nodes": [{"id": int, "kind": "max"|"min"|"avg"|"t0"|"t1",
///                         "arcs": [int, int] or []}, ...]}
/// Nodes must be listed in ascending id order starting at 1. Structural rules
/// (degrees, terminal placement) are not enforced here; see validate_structure.
Game parse_game(std::string_view json);

/// Canonical serialization: one node object per line, keys in format order.
std::string serialize_game(const Game& g);

NodeKind parse_kind(std::string_view s);

Game read_game(const std::filesystem::path& path);
void write_game(const std::filesystem::path& path, const Game& g);

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

}  // namespace ssg
