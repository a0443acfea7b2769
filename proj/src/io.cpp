#include "teamlog/io.hpp"

#include <filesystem>
#include <fstream>

#include "json.hpp"

namespace teamlog {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(path + ": " + e.what());
  }
}

void write_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << j.dump(2) << "\n";
}

std::string resolve(const std::string& base_file, const std::string& ref) {
  fs::path p(ref);
  if (p.is_absolute()) return ref;
  return (fs::path(base_file).parent_path() / p).string();
}

const json& field(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) throw Error(where + ": missing \"" + key + "\"");
  return *it;
}

Tuple tuple_from_json(const json& j, const Structure& a, const std::string& where) {
  if (!j.is_array()) throw Error(where + ": tuple must be an array of element names");
  Tuple t;
  for (const auto& e : j) t.push_back(a.elem(e.get<std::string>()));
  return t;
}

json tuple_to_json(const Tuple& t, const Structure& a) {
  json arr = json::array();
  for (Elem e : t) arr.push_back(a.elem_name(e));
  return arr;
}

Relation rel_from_json(const json& j, const Structure& a, const std::string& where) {
  int arity = field(j, "arity", where).get<int>();
  if (arity < 0) throw Error(where + ": negative arity");
  std::vector<Tuple> ts;
  for (const auto& tj : field(j, "tuples", where)) {
    Tuple t = tuple_from_json(tj, a, where);
    if (static_cast<int>(t.size()) != arity)
      throw Error(where + ": tuple length does not match the arity");
    ts.push_back(std::move(t));
  }
  return Relation(arity, std::move(ts));
}

json rel_to_json(const Relation& r, const Structure& a) {
  json tuples = json::array();
  for (const Tuple& t : r.tuples) tuples.push_back(tuple_to_json(t, a));
  return json{{"arity", r.arity}, {"tuples", tuples}};
}

json structure_to_json(const Structure& a) {
  json j;
  j["domain"] = a.domain;
  j["relations"] = json::object();
  for (const auto& [name, r] : a.relations) j["relations"][name] = rel_to_json(r, a);
  j["functions"] = json::object();
  for (const auto& [name, tab] : a.functions) {
    json table = json::array();
    for (uint64_t rank = 0; rank < tab.values.size(); ++rank) {
      Tuple args = a.tuple_unrank(rank, tab.arity);
      table.push_back(json::array(
          {tuple_to_json(args, a), a.elem_name(tab.values[static_cast<size_t>(rank)])}));
    }
    j["functions"][name] = json{{"arity", tab.arity}, {"table", table}};
  }
  j["constants"] = json::object();
  for (const auto& [name, e] : a.constants) j["constants"][name] = a.elem_name(e);
  return j;
}

json team_to_json(const Team& x, const Structure& a) {
  json rows = json::array();
  for (const Tuple& row : x.rows) {
    json r = json::object();
    for (size_t i = 0; i < x.domain.size(); ++i) r[x.domain[i]] = a.elem_name(row[i]);
    rows.push_back(std::move(r));
  }
  return json{{"domain", x.domain}, {"rows", rows}};
}

json family_to_json(const RelationFamily& fam, const Structure& a) {
  json j = json::array();
  for (const Relation& r : fam.relations) j.push_back(rel_to_json(r, a));
  return j;
}

}  // namespace

Structure load_structure(const std::string& path) {
  json j = read_json(path);
  Structure a;
  for (const auto& name : field(j, "domain", path))
    a.domain.push_back(name.get<std::string>());
  if (a.domain.empty()) throw Error(path + ": empty domain");
  if (j.contains("relations"))
    for (const auto& [name, rj] : j["relations"].items()) {
      Relation r = rel_from_json(rj, a, path + " relation " + name);
      a.sig.relations[name] = r.arity;
      a.relations[name] = std::move(r);
    }
  if (j.contains("functions"))
    for (const auto& [name, fj] : j["functions"].items()) {
      const std::string where = path + " function " + name;
      int arity = field(fj, "arity", where).get<int>();
      if (arity < 1) throw Error(where + ": arity must be positive");
      FunctionTable tab;
      tab.arity = arity;
      tab.values.assign(static_cast<size_t>(a.space_size(arity)), -1);
      for (const auto& entry : field(fj, "table", where)) {
        if (!entry.is_array() || entry.size() != 2)
          throw Error(where + ": table entries are [args, value] pairs");
        Tuple args = tuple_from_json(entry[0], a, where);
        if (static_cast<int>(args.size()) != arity)
          throw Error(where + ": argument tuple length does not match the arity");
        Elem& slot = tab.values[a.tuple_rank(args)];
        if (slot >= 0) throw Error(where + ": duplicate table entry");
        slot = a.elem(entry[1].get<std::string>());
      }
      for (Elem v : tab.values)
        if (v < 0) throw Error(where + ": table is not total");
      a.sig.functions[name] = arity;
      a.functions[name] = std::move(tab);
    }
  if (j.contains("constants"))
    for (const auto& [name, cj] : j["constants"].items()) {
      a.sig.constants.insert(name);
      a.constants[name] = a.elem(cj.get<std::string>());
    }
  a.validate();
  return a;
}

void save_structure(const Structure& a, const std::string& path) {
  write_json(structure_to_json(a), path);
}

Team load_team(const std::string& path, const Structure& a) {
  json j = read_json(path);
  std::vector<std::string> dom;
  for (const auto& v : field(j, "domain", path)) dom.push_back(v.get<std::string>());
  std::vector<Tuple> rows;
  for (const auto& rj : field(j, "rows", path)) {
    if (!rj.is_object()) throw Error(path + ": rows are variable-to-element objects");
    if (rj.size() != dom.size())
      throw Error(path + ": row does not cover the domain exactly");
    Tuple row;
    for (const std::string& v : dom) {
      if (!rj.contains(v)) throw Error(path + ": row misses variable " + v);
      row.push_back(a.elem(rj[v].get<std::string>()));
    }
    rows.push_back(std::move(row));
  }
  return Team(std::move(dom), std::move(rows));
}

void save_team(const Team& x, const Structure& a, const std::string& path) {
  write_json(team_to_json(x, a), path);
}

RelationFamily load_relation_family(const std::string& path, const Structure& a) {
  json j = read_json(path);
  if (!j.is_array()) throw Error(path + ": expected a list of relations");
  RelationFamily fam;
  for (const auto& rj : j) fam.relations.push_back(rel_from_json(rj, a, path));
  fam.normalize();
  return fam;
}

void save_relation_family(const RelationFamily& fam, const Structure& a,
                          const std::string& path) {
  write_json(family_to_json(fam, a), path);
}

Relation load_relation(const std::string& path, const Structure& a) {
  json j = read_json(path);
  return rel_from_json(j, a, path);
}

TeamMap load_team_map(const std::string& path) {
  json j = read_json(path);
  TeamMap f;
  f.source = load_structure(resolve(path, field(j, "source", path).get<std::string>()));
  f.target = load_structure(resolve(path, field(j, "target", path).get<std::string>()));
  for (const auto& ej : field(j, "entries", path)) {
    Relation from = rel_from_json(field(ej, "from", path), f.source, path);
    Relation to = rel_from_json(field(ej, "to", path), f.target, path);
    if (!f.entries.emplace(std::move(from), std::move(to)).second)
      throw Error(path + ": duplicate entry");
  }
  return f;
}

void save_team_map(const TeamMap& f, const std::string& path,
                   const std::string& source_ref, const std::string& target_ref) {
  json entries = json::array();
  for (const auto& [x, y] : f.entries)
    entries.push_back(json{{"from", rel_to_json(x, f.source)},
                           {"to", rel_to_json(y, f.target)}});
  write_json(json{{"source", source_ref}, {"target", target_ref}, {"entries", entries}},
             path);
}

Ultrafilter load_ultrafilter(const std::string& path) {
  json j = read_json(path);
  std::vector<std::string> index;
  for (const auto& v : field(j, "index", path)) index.push_back(v.get<std::string>());
  return principal_ultrafilter(index, field(j, "principal_at", path).get<std::string>());
}

void save_ultrafilter(const Ultrafilter& u, const std::string& path) {
  write_json(json{{"index", u.index},
                  {"principal_at", u.index[static_cast<size_t>(principal_index(u))]}},
             path);
}

DirectedSystem load_system(const std::string& path) {
  json j = read_json(path);
  DirectedSystem s;
  for (const auto& nj : field(j, "nodes", path)) {
    s.nodes.push_back(field(nj, "name", path).get<std::string>());
    s.structures.push_back(
        load_structure(resolve(path, field(nj, "structure", path).get<std::string>())));
  }
  if (s.nodes.empty()) throw Error(path + ": no nodes");
  s.leq.assign(s.nodes.size(), std::vector<bool>(s.nodes.size(), false));
  for (const auto& ej : field(j, "edges", path)) {
    int from = s.node(field(ej, "from", path).get<std::string>());
    int to = s.node(field(ej, "to", path).get<std::string>());
    if (from < 0 || to < 0) throw Error(path + ": edge endpoint is not a node");
    if (s.leq[static_cast<size_t>(from)][static_cast<size_t>(to)])
      throw Error(path + ": duplicate edge");
    s.leq[static_cast<size_t>(from)][static_cast<size_t>(to)] = true;
    s.maps.emplace(std::pair<int, int>(from, to),
                   load_team_map(resolve(path, field(ej, "map", path).get<std::string>())));
  }
  return s;
}

std::string to_json_string(const Structure& a) { return structure_to_json(a).dump(2); }

std::string to_json_string(const Relation& r, const Structure& a) {
  return rel_to_json(r, a).dump(2);
}

std::string to_json_string(const RelationFamily& fam, const Structure& a) {
  return family_to_json(fam, a).dump(2);
}

std::string to_json_string(const Team& x, const Structure& a) {
  return team_to_json(x, a).dump(2);
}

std::vector<const Formula*> load_corpus(const std::string& path, Dialect d,
                                        const Signature* sig) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::vector<const Formula*> out;
  std::string line;
  while (std::getline(in, line)) {
    size_t start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    out.push_back(parse_formula(line, d, sig));
  }
  return out;
}

}  // namespace teamlog
