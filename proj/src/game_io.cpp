#include "ssg/game_io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace ssg {

NodeKind parse_kind(std::string_view s)
{
    if (s == "max") return NodeKind::Max;
    if (s == "min") return NodeKind::Min;
    if (s == "avg") return NodeKind::Average;
    if (s == "t0") return NodeKind::Terminal0;
    if (s == "t1") return NodeKind::Terminal1;
    throw FormatError(fmt::format("unknown node kind '{}'", s));
}

Game parse_game(std::string_view text)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(fmt::format("malformed JSON: {}", e.what()));
    }
    if (!doc.is_object() || !doc.contains("n") || !doc.contains("nodes"))
        throw FormatError("instance must be an object with \"n\" and \"nodes\"");
    if (!doc["n"].is_number_integer()) throw FormatError("\"n\" must be an integer");
    const auto n = doc["n"].get<long long>();
    const auto& list = doc["nodes"];
    if (!list.is_array()) throw FormatError("\"nodes\" must be an array");
    if (n < 1 || static_cast<long long>(list.size()) != n)
        throw FormatError(fmt::format("\"n\" is {} but {} nodes are listed", n, list.size()));

    std::vector<Node> nodes;
    nodes.reserve(list.size());
    for (std::size_t i = 0; i < list.size(); ++i) {
        const auto& item = list[i];
        if (!item.is_object() || !item.contains("id") || !item.contains("kind") || !item.contains("arcs"))
            throw FormatError(fmt::format("node entry {} needs \"id\", \"kind\" and \"arcs\"", i + 1));
        if (!item["id"].is_number_integer() || item["id"].get<long long>() != static_cast<long long>(i + 1))
            throw FormatError(fmt::format("node entry {} is out of order", i + 1));
        if (!item["kind"].is_string()) throw FormatError(fmt::format("node {} kind must be a string", i + 1));
        Node nd;
        nd.kind = parse_kind(item["kind"].get<std::string>());
        const auto& arcs = item["arcs"];
        if (!arcs.is_array() || arcs.size() > 2)
            throw FormatError(fmt::format("node {} arcs must be an array of at most two ids", i + 1));
        for (const auto& a : arcs) {
            if (!a.is_number_integer()) throw FormatError(fmt::format("node {} has a non-integer arc", i + 1));
            nd.arcs.push_back(a.get<NodeId>());
        }
        nodes.push_back(std::move(nd));
    }
    return Game(std::move(nodes));
}

std::string serialize_game(const Game& g)
{
    std::string out = fmt::format("{{\"n\": {}, \"nodes\": [\n", g.size());
    for (NodeId v = 1; v <= g.size(); ++v) {
        out += fmt::format("  {{\"id\": {}, \"kind\": \"{}\", \"arcs\": [", v, to_string(g.kind(v)));
        const auto& arcs = g.arcs(v);
        for (std::size_t i = 0; i < arcs.size(); ++i) {
            if (i) out += ", ";
            out += std::to_string(arcs[i]);
        }
        out += v == g.size() ? "]}\n" : "]},\n";
    }
    out += "]}\n";
    return out;
}

std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(fmt::format("cannot open {}", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
    out << text;
}

Game read_game(const std::filesystem::path& path) { return parse_game(read_text(path)); }

void write_game(const std::filesystem::path& path, const Game& g) { write_text(path, serialize_game(g)); }

}  // namespace ssg
