#include "hydra/code_graph.hpp"

#include <algorithm>

#include "hydra/jsonl.hpp"

namespace hydra {

using nlohmann::json;

std::string_view to_string(UnitKind kind) {
    switch (kind) {
        case UnitKind::Function: return "Function";
        case UnitKind::Class: return "Class";
        case UnitKind::Variable: return "Variable";
    }
    return "Function";
}

UnitKind parse_unit_kind(std::string_view text) {
    if (text == "Function" || text == "function") return UnitKind::Function;
    if (text == "Class" || text == "class") return UnitKind::Class;
    if (text == "Variable" || text == "variable") return UnitKind::Variable;
    throw std::invalid_argument("unknown unit kind: " + std::string(text));
}

std::string_view CodeUnit::short_name() const {
    std::string_view name = qualified_name;
    auto dot = name.rfind('.');
    return dot == std::string_view::npos ? name : name.substr(dot + 1);
}

std::string document_text(const CodeUnit& unit) {
    std::string text = unit.signature;
    text += '\n';
    if (unit.docstring) {
        text += *unit.docstring;
        text += '\n';
    }
    text += unit.body_text;
    return text;
}

std::string make_unit_id(std::string_view path, std::string_view qualified_name, UnitKind kind,
                         int ordinal) {
    std::string id;
    id.reserve(path.size() + qualified_name.size() + 16);
    id.append(path).append("::").append(qualified_name);
    if (ordinal > 1) id.append("#").append(std::to_string(ordinal));
    id.append("::").append(to_string(kind));
    return id;
}

bool ImportEdge::has_star() const {
    return std::find(imported_names.begin(), imported_names.end(), kStar) != imported_names.end();
}

ImportedName parse_imported_name(std::string_view entry) {
    static constexpr std::string_view kAs = " as ";
    auto pos = entry.find(kAs);
    if (pos == std::string_view::npos) return {std::string(entry), std::string(entry)};
    return {std::string(entry.substr(0, pos)), std::string(entry.substr(pos + kAs.size()))};
}

CodeGraph::CodeGraph(std::string repo_root, std::vector<std::string> files, std::vector<CodeUnit> units,
                     std::vector<ImportEdge> import_edges)
    : repo_root_(std::move(repo_root)),
      files_(std::move(files)),
      units_(std::move(units)),
      import_edges_(std::move(import_edges)) {
    build_lookup();
}

void CodeGraph::build_lookup() {
    std::unordered_map<std::string, bool> file_set;
    for (const auto& f : files_) {
        if (!file_set.emplace(f, true).second) throw std::invalid_argument("duplicate file in graph: " + f);
        by_file_[f];
    }
    for (std::size_t i = 0; i < units_.size(); ++i) {
        const auto& u = units_[i];
        if (!by_id_.emplace(u.id, i).second) throw std::invalid_argument("duplicate unit id: " + u.id);
        auto it = by_file_.find(u.span.file_path);
        if (it == by_file_.end()) throw std::invalid_argument("unit " + u.id + " refers to unindexed file");
        it->second.push_back(i);
    }
    for (const auto& u : units_) {
        if (!u.parent_class) continue;
        auto it = by_id_.find(*u.parent_class);
        if (it == by_id_.end() || units_[it->second].kind != UnitKind::Class)
            throw std::invalid_argument("unit " + u.id + " has invalid parent class " + *u.parent_class);
    }
    for (std::size_t i = 0; i < import_edges_.size(); ++i) {
        const auto& e = import_edges_[i];
        if (!file_set.count(e.from_file) || !file_set.count(e.to_file))
            throw std::invalid_argument("import edge endpoint not indexed: " + e.from_file + " -> " + e.to_file);
        if (e.from_file == e.to_file) throw std::invalid_argument("self import edge: " + e.from_file);
        edges_by_file_[e.from_file].push_back(i);
    }
}

const CodeUnit* CodeGraph::lookup(std::string_view id) const {
    auto it = by_id_.find(std::string(id));
    return it == by_id_.end() ? nullptr : &units_[it->second];
}

bool CodeGraph::has_file(std::string_view path) const { return by_file_.count(std::string(path)) != 0; }

std::set<std::string> CodeGraph::imported_files(std::string_view file) const {
    if (!has_file(file)) throw UnindexedPathError(std::string(file));
    std::set<std::string> out;
    for (const auto* e : edges_from(file)) out.insert(e->to_file);
    return out;
}

std::vector<const ImportEdge*> CodeGraph::edges_from(std::string_view file) const {
    std::vector<const ImportEdge*> out;
    auto it = edges_by_file_.find(std::string(file));
    if (it == edges_by_file_.end()) return out;
    for (auto i : it->second) out.push_back(&import_edges_[i]);
    return out;
}

std::vector<const CodeUnit*> CodeGraph::units_in(std::string_view file) const {
    std::vector<const CodeUnit*> out;
    auto it = by_file_.find(std::string(file));
    if (it == by_file_.end()) return out;
    for (auto i : it->second) out.push_back(&units_[i]);
    return out;
}

bool CodeGraph::operator==(const CodeGraph& other) const {
    return repo_root_ == other.repo_root_ && files_ == other.files_ && units_ == other.units_ &&
           import_edges_ == other.import_edges_;
}

namespace {

json optional_string(const std::optional<std::string>& value) {
    return value ? json(*value) : json(nullptr);
}

std::optional<std::string> read_optional(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<std::string>();
}

}  // namespace

json to_json(const CodeUnit& unit) {
    const auto& s = unit.span;
    return json{
        {"id", unit.id},
        {"kind", std::string(to_string(unit.kind))},
        {"qualified_name", unit.qualified_name},
        {"signature", unit.signature},
        {"docstring", optional_string(unit.docstring)},
        {"body_text", unit.body_text},
        {"span",
         {{"file_path", s.file_path},
          {"start_line", s.start_line},
          {"end_line", s.end_line},
          {"start_byte", s.start_byte},
          {"end_byte", s.end_byte},
          {"start_col", s.start_col}}},
        {"parent_class", optional_string(unit.parent_class)},
    };
}

CodeUnit unit_from_json(const json& j) {
    CodeUnit u;
    u.id = j.at("id").get<std::string>();
    u.kind = parse_unit_kind(j.at("kind").get<std::string>());
    u.qualified_name = j.at("qualified_name").get<std::string>();
    u.signature = j.at("signature").get<std::string>();
    u.docstring = read_optional(j, "docstring");
    u.body_text = j.at("body_text").get<std::string>();
    const auto& s = j.at("span");
    u.span.file_path = s.at("file_path").get<std::string>();
    u.span.start_line = s.at("start_line").get<int>();
    u.span.end_line = s.at("end_line").get<int>();
    u.span.start_byte = s.at("start_byte").get<std::size_t>();
    u.span.end_byte = s.at("end_byte").get<std::size_t>();
    u.span.start_col = s.value("start_col", 0);
    u.parent_class = read_optional(j, "parent_class");
    return u;
}

json to_json(const ImportEdge& edge) {
    return json{{"from_file", edge.from_file},
                {"to_file", edge.to_file},
                {"imported_names", edge.imported_names},
                {"module_aliases", edge.module_aliases}};
}

ImportEdge edge_from_json(const json& j) {
    ImportEdge e;
    e.from_file = j.at("from_file").get<std::string>();
    e.to_file = j.at("to_file").get<std::string>();
    e.imported_names = j.at("imported_names").get<std::vector<std::string>>();
    if (j.contains("module_aliases")) e.module_aliases = j.at("module_aliases").get<std::vector<std::string>>();
    return e;
}

json to_json(const CodeGraph& graph) {
    json units = json::array();
    for (const auto& u : graph.units()) units.push_back(to_json(u));
    json edges = json::array();
    for (const auto& e : graph.import_edges()) edges.push_back(to_json(e));
    return json{{"repo_root", graph.repo_root()}, {"files", graph.files()}, {"units", units}, {"import_edges", edges}};
}

CodeGraph graph_from_json(const json& j) {
    if (!j.contains("units")) throw std::invalid_argument("not a unit index (missing \"units\")");
    std::vector<CodeUnit> units;
    for (const auto& u : j.at("units")) units.push_back(unit_from_json(u));
    std::vector<ImportEdge> edges;
    for (const auto& e : j.at("import_edges")) edges.push_back(edge_from_json(e));
    return CodeGraph(j.at("repo_root").get<std::string>(), j.at("files").get<std::vector<std::string>>(),
                     std::move(units), std::move(edges));
}

void save_graph(const CodeGraph& graph, const std::string& path) {
    write_text_file(path, to_json(graph).dump(1, ' ', false, json::error_handler_t::replace) + "\n");
}

CodeGraph load_graph(const std::string& path) {
    json j;
    try {
        j = json::parse(read_text_file(path));
    } catch (const json::parse_error& e) {
        throw std::runtime_error(path + ": invalid index JSON: " + e.what());
    }
    return graph_from_json(j);
}

}  // namespace hydra
