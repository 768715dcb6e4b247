#include "cord/exportgraph.hpp"

#include <sstream>

namespace cord {

namespace {

std::string quoted(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

const char* kind_name(ClusterKind k) {
    switch (k) {
        case ClusterKind::endogenous: return "endogenous";
        case ClusterKind::exogenous: return "exogenous";
        case ClusterKind::parameter: return "parameter";
    }
    return "?";
}

}  // namespace

std::string to_dot(const OrientedGraph& g) {
    std::ostringstream os;
    os << "digraph oriented {\n";
    for (const auto& v : g.vertices) os << "  " << quoted(v) << ";\n";
    for (const auto& [a, b] : g.edges)
        os << "  " << quoted(a) << " -> " << quoted(b) << ";\n";
    os << "}\n";
    return os.str();
}

std::string to_dot(const ClusterGraph& co) {
    std::ostringstream os;
    os << "digraph causal_ordering {\n  compound=true;\n";
    for (std::size_t i = 0; i < co.clusters.size(); ++i) {
        const Cluster& c = co.clusters[i];
        switch (c.kind) {
            case ClusterKind::endogenous:
                os << "  subgraph " << quoted("cluster_" + c.name) << " {\n"
                   << "    label=" << quoted(c.name) << ";\n";
                for (const auto& m : c.members) os << "    " << quoted(m) << ";\n";
                os << "  }\n";
                break;
            case ClusterKind::exogenous:
                os << "  " << quoted(c.members.front()) << " [style=dashed];\n";
                break;
            case ClusterKind::parameter:
                os << "  " << quoted(c.members.front()) << " [shape=point, xlabel="
                   << quoted(c.members.front()) << "];\n";
                break;
        }
    }
    for (const auto& [src, dst] : co.edges) {
        const Cluster& target = co.clusters[dst];
        // Edges point at the first member node, attributed to the whole box.
        os << "  " << quoted(src) << " -> " << quoted(target.members.front());
        if (target.kind == ClusterKind::endogenous)
            os << " [lhead=" << quoted("cluster_" + target.name) << "]";
        os << ";\n";
    }
    os << "}\n";
    return os.str();
}

std::string to_dot(const MarkovDag& mo) {
    std::ostringstream os;
    os << "digraph markov_ordering {\n";
    for (const auto& v : mo.vertices) os << "  " << quoted(v) << ";\n";
    for (const auto& [a, b] : mo.edges)
        os << "  " << quoted(a) << " -> " << quoted(b) << ";\n";
    os << "}\n";
    return os.str();
}

nlohmann::json to_json(const OrientedGraph& g) {
    nlohmann::json j;
    j["version"] = 1;
    j["vertices"] = g.vertices;
    auto& edges = j["edges"] = nlohmann::json::array();
    for (const auto& [a, b] : g.edges) edges.push_back({{"from", a}, {"to", b}});
    return j;
}

nlohmann::json to_json(const ClusterGraph& co) {
    nlohmann::json j;
    j["version"] = 1;
    auto& clusters = j["clusters"] = nlohmann::json::array();
    for (const auto& c : co.clusters)
        clusters.push_back(
            {{"name", c.name}, {"kind", kind_name(c.kind)}, {"members", c.members}});
    auto& edges = j["edges"] = nlohmann::json::array();
    for (const auto& [src, dst] : co.edges)
        edges.push_back({{"from", src}, {"to", co.clusters[dst].name}});
    return j;
}

nlohmann::json to_json(const MarkovDag& mo) {
    nlohmann::json j;
    j["version"] = 1;
    j["vertices"] = mo.vertices;
    auto& edges = j["edges"] = nlohmann::json::array();
    for (const auto& [a, b] : mo.edges) edges.push_back({{"from", a}, {"to", b}});
    return j;
}

}  // namespace cord
