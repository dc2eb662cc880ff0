#pragma once

#include <utility>
#include <vector>

#include "ssg/game.hpp"

namespace testing_support {

using ssg::Node;
using ssg::NodeKind;

using Row = std::pair<NodeKind, std::vector<ssg::NodeId>>;

/// Builds a game from (kind, arcs) rows listed in id order; the two terminals
/// are appended automatically.
inline ssg::Game make_game(const std::vector<Row>& rows)
{
    std::vector<Node> nodes;
    for (const auto& [k, arcs] : rows) nodes.push_back({k, arcs});
    nodes.push_back({NodeKind::Terminal0, {}});
    nodes.push_back({NodeKind::Terminal1, {}});
    return ssg::Game(std::move(nodes));
}

constexpr NodeKind MAX = NodeKind::Max;
constexpr NodeKind MIN = NodeKind::Min;
constexpr NodeKind AVG = NodeKind::Average;

}  // namespace testing_support
