#pragma once

// File formats: points CSV, edge-list graph files with id companions,
// explicit distance-matrix JSON, norm spec JSON, request CSV, and the
// deterministic JSON emitters used by the CLI (all floats with 17 significant
// digits so reruns are byte-identical).

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "normkc/ball_intersection.hpp"
#include "normkc/errors.hpp"
#include "normkc/metrics.hpp"
#include "normkc/norms.hpp"

namespace normkc {

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw input_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace detail {

inline std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : line) {
        if (ch == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos)
        return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline double parse_double(const std::string& s, const std::string& context) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size())
            throw input_error("");
        return v;
    } catch (...) {
        throw input_error(context + ": cannot parse number '" + s + "'");
    }
}

// Lines of non-empty, non-comment content.
inline std::vector<std::string> content_lines(const std::string& path) {
    std::vector<std::string> lines;
    for (const std::string& raw : split(read_file(path), '\n')) {
        const std::string line = trim(raw);
        if (!line.empty() && line[0] != '#')
            lines.push_back(line);
    }
    return lines;
}

}  // namespace detail

// One row per point, comma-separated float coordinates.
inline std::vector<Coords> load_points_csv(const std::string& path) {
    std::vector<Coords> rows;
    for (const std::string& line : detail::content_lines(path)) {
        Coords row;
        for (const std::string& cell : detail::split(line, ','))
            row.push_back(detail::parse_double(detail::trim(cell), path));
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw input_error(path + ": no points");
    return rows;
}

inline std::vector<std::string> load_id_list(const std::string& path) {
    return detail::content_lines(path);
}

// Lines "u v w" with string vertex ids and a positive float weight.
inline MetricSpace load_graph_metric(const std::string& graph_path,
                                     const std::string& points_path = "",
                                     const std::string& centers_path = "") {
    std::vector<MetricSpace::GraphEdge> edges;
    for (const std::string& line : detail::content_lines(graph_path)) {
        std::istringstream ss(line);
        MetricSpace::GraphEdge e;
        if (!(ss >> e.u >> e.v >> e.w))
            throw input_error(graph_path + ": malformed edge line '" + line + "'");
        std::string rest;
        if (ss >> rest)
            throw input_error(graph_path + ": trailing tokens on edge line '" + line + "'");
        edges.push_back(std::move(e));
    }
    std::vector<std::string> point_ids, center_ids;
    if (!points_path.empty())
        point_ids = load_id_list(points_path);
    if (!centers_path.empty())
        center_ids = load_id_list(centers_path);
    return MetricSpace::graph(edges, std::move(point_ids), std::move(center_ids));
}

// {"ids":[...], "points":[...], "centers":[...], "matrix":[[...],...]}
inline MetricSpace load_explicit_metric_json(const std::string& path, const MetricOptions& opts = {}) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw input_error(path + ": invalid JSON: " + e.what());
    }
    if (!doc.is_object() || !doc.contains("ids") || !doc.contains("matrix"))
        throw input_error(path + ": explicit metric needs 'ids' and 'matrix' fields");
    auto as_string_list = [&](const nlohmann::json& j, const char* field) {
        std::vector<std::string> out;
        if (!j.is_array())
            throw input_error(path + std::string(": field '") + field + "' must be an array");
        for (const auto& v : j)
            out.push_back(v.is_string() ? v.get<std::string>() : v.dump());
        return out;
    };
    std::vector<std::string> ids = as_string_list(doc["ids"], "ids");
    std::vector<std::string> points, centers;
    if (doc.contains("points"))
        points = as_string_list(doc["points"], "points");
    if (doc.contains("centers"))
        centers = as_string_list(doc["centers"], "centers");
    if (!doc["matrix"].is_array())
        throw input_error(path + ": field 'matrix' must be an array of rows");
    std::vector<std::vector<double>> matrix;
    for (const auto& row : doc["matrix"]) {
        if (!row.is_array())
            throw input_error(path + ": matrix rows must be arrays");
        std::vector<double> r;
        for (const auto& v : row) {
            if (!v.is_number())
                throw input_error(path + ": matrix entries must be numbers");
            r.push_back(v.get<double>());
        }
        matrix.push_back(std::move(r));
    }
    return MetricSpace::explicit_matrix(std::move(ids), std::move(points), std::move(centers),
                                        std::move(matrix), opts);
}

namespace detail {
// exponent fields accept a number >= 1 or the string "inf"
inline double parse_exponent(const nlohmann::json& v, const std::string& context) {
    if (v.is_string()) {
        if (v.get<std::string>() == "inf")
            return kInfExponent;
        throw input_error(context + ": expected a number or \"inf\"");
    }
    if (!v.is_number())
        throw input_error(context + ": expected a number or \"inf\"");
    return v.get<double>();
}

inline std::vector<double> parse_vector(const nlohmann::json& v, const std::string& context) {
    if (!v.is_array())
        throw input_error(context + ": expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number())
            throw input_error(context + ": expected an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}
}  // namespace detail

// Norm spec: {"type":"lz","z":2} | {"type":"weighted_max","weights":[...]} |
// {"type":"top_l","l":5} | {"type":"ordered","v":[...]} |
// {"type":"priority_ordered","v":[...],"w":[...]} |
// {"type":"fair_group","q":...,"z":...,"groups":[[...],...]} |
// {"type":"cascade","nodes":[{"id":..,"q":..}],"edges":[[u,v,w],...],"sources":[...]}
inline NormObjective norm_from_json(const nlohmann::json& doc, int n) {
    if (!doc.is_object() || !doc.contains("type") || !doc["type"].is_string())
        throw input_error("norm spec: missing string field 'type'");
    const std::string type = doc["type"].get<std::string>();
    auto need = [&](const char* field) -> const nlohmann::json& {
        if (!doc.contains(field))
            throw input_error("norm spec: '" + type + "' needs field '" + field + "'");
        return doc[field];
    };
    if (type == "lz")
        return NormObjective::lz(detail::parse_exponent(need("z"), "norm spec: 'z'"), n);
    if (type == "weighted_max") {
        std::vector<double> w = detail::parse_vector(need("weights"), "norm spec: 'weights'");
        if (static_cast<int>(w.size()) != n)
            throw input_error("norm spec: 'weights' length does not match the number of points");
        return NormObjective::weighted_max(std::move(w));
    }
    if (type == "top_l") {
        if (!need("l").is_number_integer())
            throw input_error("norm spec: 'l' must be an integer");
        return NormObjective::top_l(doc["l"].get<int>(), n);
    }
    if (type == "ordered") {
        std::vector<double> v = detail::parse_vector(need("v"), "norm spec: 'v'");
        if (static_cast<int>(v.size()) != n)
            throw input_error("norm spec: 'v' length does not match the number of points");
        return NormObjective::ordered(std::move(v));
    }
    if (type == "priority_ordered") {
        std::vector<double> v = detail::parse_vector(need("v"), "norm spec: 'v'");
        std::vector<double> w = detail::parse_vector(need("w"), "norm spec: 'w'");
        if (static_cast<int>(v.size()) != n || static_cast<int>(w.size()) != n)
            throw input_error("norm spec: 'v'/'w' length does not match the number of points");
        return NormObjective::priority_ordered(std::move(v), std::move(w));
    }
    if (type == "fair_group") {
        const double q = detail::parse_exponent(need("q"), "norm spec: 'q'");
        const double z = detail::parse_exponent(need("z"), "norm spec: 'z'");
        if (!need("groups").is_array() || doc["groups"].empty())
            throw input_error("norm spec: 'groups' must be a non-empty array of weight vectors");
        std::vector<std::vector<double>> groups;
        for (const auto& g : doc["groups"]) {
            groups.push_back(detail::parse_vector(g, "norm spec: 'groups'"));
            if (static_cast<int>(groups.back().size()) != n)
                throw input_error("norm spec: group weight vectors must have length |P|");
        }
        return NormObjective::fair_group(q, z, std::move(groups));
    }
    if (type == "cascade") {
        CascadeDag dag;
        for (const auto& node : need("nodes")) {
            if (!node.is_object() || !node.contains("id") || !node.contains("q"))
                throw input_error("norm spec: cascade nodes need 'id' and 'q'");
            dag.nodes.push_back({node["id"].get<int>(),
                                 detail::parse_exponent(node["q"], "norm spec: node 'q'")});
        }
        for (const auto& e : need("edges")) {
            if (!e.is_array() || e.size() != 3)
                throw input_error("norm spec: cascade edges must be [from,to,weight] triples");
            dag.edges.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<double>()});
        }
        for (const auto& s : need("sources"))
            dag.sources.push_back(s.get<int>());
        if (static_cast<int>(dag.sources.size()) != n)
            throw input_error("norm spec: cascade needs one source per point");
        return NormObjective::cascade(dag);
    }
    throw input_error("norm spec: unknown type '" + type + "'");
}

// Dimension pinned by the spec's own vectors, or the smallest legal one for
// the dimension-generic families (lz, top_l).
inline int norm_spec_natural_dimension(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("type") || !doc["type"].is_string())
        throw input_error("norm spec: missing string field 'type'");
    const std::string type = doc["type"].get<std::string>();
    try {
        if (type == "lz")
            return 1;
        if (type == "top_l")
            return doc.contains("l") && doc["l"].is_number_integer() ? doc["l"].get<int>() : 1;
        if (type == "weighted_max")
            return doc.contains("weights") && doc["weights"].is_array()
                       ? static_cast<int>(doc["weights"].size())
                       : 0;
        if (type == "ordered" || type == "priority_ordered")
            return doc.contains("v") && doc["v"].is_array() ? static_cast<int>(doc["v"].size()) : 0;
        if (type == "fair_group")
            return doc.contains("groups") && doc["groups"].is_array() && !doc["groups"].empty() &&
                           doc["groups"][0].is_array()
                       ? static_cast<int>(doc["groups"][0].size())
                       : 0;
        if (type == "cascade")
            return doc.contains("sources") && doc["sources"].is_array()
                       ? static_cast<int>(doc["sources"].size())
                       : 0;
    } catch (const nlohmann::json::exception&) {
    }
    return 0;
}

inline NormObjective load_norm_json(const std::string& path, int n) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw input_error(path + ": invalid JSON: " + e.what());
    }
    try {
        return norm_from_json(doc, n);
    } catch (const nlohmann::json::exception& e) {
        throw input_error(path + ": malformed norm spec: " + e.what());
    }
}

// CSV lines "point_id,radius"; the id is a point id string for matrix/graph
// spaces or a 0-based index otherwise.
inline std::vector<Request> load_requests_csv(const std::string& path, const MetricSpace& space) {
    std::vector<Request> out;
    for (const std::string& line : detail::content_lines(path)) {
        const std::vector<std::string> cells = detail::split(line, ',');
        if (cells.size() != 2)
            throw input_error(path + ": request lines must be 'point_id,radius'");
        const std::string id = detail::trim(cells[0]);
        int p = space.find_point(id);
        if (p < 0) {
            try {
                std::size_t pos = 0;
                p = std::stoi(id, &pos);
                if (pos != id.size())
                    throw input_error("");
            } catch (...) {
                throw input_error(path + ": unknown point id '" + id + "'");
            }
        }
        if (p < 0 || p >= space.num_points())
            throw input_error(path + ": point index out of range: " + id);
        const double r = detail::parse_double(detail::trim(cells[1]), path);
        if (r < 0.0)
            throw input_error(path + ": negative request radius");
        out.push_back({p, r});
    }
    return out;
}

// --- deterministic JSON emission -----------------------------------------

// Output values are rendered with 17 significant digits so a rerun with the
// same inputs and seed produces byte-identical files.
class JsonWriter {
public:
    static std::string number(double v) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }

    JsonWriter& begin_object() { return raw("{"); }
    JsonWriter& end_object() { return raw("}"); }
    JsonWriter& begin_array() { return raw("["); }
    JsonWriter& end_array() { return raw("]"); }

    JsonWriter& key(const std::string& k) {
        separator();
        out_ += '"' + k + "\":";
        pending_value_ = true;
        return *this;
    }
    JsonWriter& value(double v) { return value_raw(number(v)); }
    JsonWriter& value(int v) { return value_raw(std::to_string(v)); }
    JsonWriter& value(long long v) { return value_raw(std::to_string(v)); }
    JsonWriter& value(std::uint64_t v) { return value_raw(std::to_string(v)); }
    JsonWriter& value(bool v) { return value_raw(v ? "true" : "false"); }
    JsonWriter& value(const char* s) { return value(std::string(s)); }
    JsonWriter& value(const std::string& s) {
        std::string escaped = "\"";
        for (char ch : s) {
            if (ch == '"' || ch == '\\')
                escaped += '\\';
            escaped += ch;
        }
        escaped += '"';
        return value_raw(escaped);
    }

    const std::string& str() const { return out_; }

private:
    void separator() {
        if (!out_.empty()) {
            const char last = out_.back();
            if (last != '{' && last != '[' && last != ':')
                out_ += ',';
        }
    }
    JsonWriter& raw(const std::string& s) {
        if (!pending_value_ && (s == "{" || s == "["))
            separator();
        pending_value_ = false;
        out_ += s;
        return *this;
    }
    JsonWriter& value_raw(const std::string& s) {
        if (!pending_value_)
            separator();
        pending_value_ = false;
        out_ += s;
        return *this;
    }

    std::string out_;
    bool pending_value_ = false;
};

inline void append_center_json(JsonWriter& w, const Center& c) {
    if (is_index_center(c)) {
        w.value(center_index(c));
    } else {
        w.begin_array();
        for (double x : center_coords(c))
            w.value(x);
        w.end_array();
    }
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw input_error("cannot write file: " + path);
    out << content;
}

}  // namespace normkc
