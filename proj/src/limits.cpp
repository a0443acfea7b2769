#include "teamlog/limits.hpp"

#include <algorithm>

namespace teamlog {

namespace {

constexpr uint64_t kEnumCap = 1u << 20;

std::string edge_name(const DirectedSystem& s, int i, int j) {
  return "(" + s.nodes[static_cast<size_t>(i)] + "," + s.nodes[static_cast<size_t>(j)] + ")";
}

}  // namespace

int DirectedSystem::node(const std::string& name) const {
  auto it = std::find(nodes.begin(), nodes.end(), name);
  return it == nodes.end() ? -1 : static_cast<int>(it - nodes.begin());
}

const TeamMap& DirectedSystem::map(int i, int j) const {
  auto it = maps.find({i, j});
  if (it == maps.end()) throw Error("system has no map " + edge_name(*this, i, j));
  return it->second;
}

CheckReport validate_system(const DirectedSystem& s, int max_arity, bool check_axioms) {
  CheckReport rep;
  auto issue = [&](const std::string& id, const std::string& detail) {
    rep.issues.push_back({id, detail});
  };
  int n = static_cast<int>(s.nodes.size());
  if (n == 0 || s.leq.size() != s.nodes.size() ||
      s.structures.size() != s.nodes.size() ||
      std::any_of(s.leq.begin(), s.leq.end(),
                  [&](const auto& row) { return row.size() != s.nodes.size(); })) {
    issue("shape", "nodes, order matrix and structures must align");
    return rep;
  }
  for (const Structure& a : s.structures)
    if (a.sig != s.structures[0].sig) {
      issue("shape", "structures have different signatures");
      return rep;
    }

  for (int i = 0; i < n; ++i)
    if (!s.le(i, i)) issue("preorder", "not reflexive at " + s.nodes[static_cast<size_t>(i)]);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        if (s.le(i, j) && s.le(j, k) && !s.le(i, k))
          issue("preorder", "not transitive at (" + s.nodes[static_cast<size_t>(i)] + "," +
                                s.nodes[static_cast<size_t>(j)] + "," +
                                s.nodes[static_cast<size_t>(k)] + ")");
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      bool bounded = false;
      for (int k = 0; k < n && !bounded; ++k) bounded = s.le(i, k) && s.le(j, k);
      if (!bounded)
        issue("directed", "no upper bound for {" + s.nodes[static_cast<size_t>(i)] + "," +
                              s.nodes[static_cast<size_t>(j)] + "}");
    }

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      bool present = s.maps.count({i, j}) > 0;
      if (s.le(i, j) && !present) issue("maps", "missing map " + edge_name(s, i, j));
      if (!s.le(i, j) && present) issue("maps", "spurious map " + edge_name(s, i, j));
      if (!s.le(i, j) || !present) continue;
      const TeamMap& f = s.map(i, j);
      if (f.source != s.structures[static_cast<size_t>(i)] ||
          f.target != s.structures[static_cast<size_t>(j)])
        issue("maps", "endpoints of " + edge_name(s, i, j) + " do not match the nodes");
    }
  if (!rep.pass()) return rep;  // later conditions assume the maps exist

  for (int i = 0; i < n; ++i) {
    for (const auto& [x, y] : s.map(i, i).entries)
      if (x != y) {
        issue("identity", edge_name(s, i, i) + " moves " +
                              show_relation(s.structures[static_cast<size_t>(i)], x));
        break;
      }
    RelationFamily dom_ii = s.map(i, i).domain_family();
    for (int j = 0; j < n; ++j)
      if (s.le(i, j) && s.map(i, j).domain_family() != dom_ii)
        issue("domain", "dom" + edge_name(s, i, j) + " differs from dom" + edge_name(s, i, i));
  }

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        if (!s.le(i, j) || !s.le(j, k)) continue;
        const TeamMap& fij = s.map(i, j);
        const TeamMap& fjk = s.map(j, k);
        const TeamMap& fik = s.map(i, k);
        for (const auto& [x, y] : fij.entries) {
          if (!fjk.defined_on(y)) {
            issue("composition",
                  "ran" + edge_name(s, i, j) + " escapes dom" + edge_name(s, j, k) + " at " +
                      show_relation(s.structures[static_cast<size_t>(j)], y));
            continue;
          }
          if (!fik.defined_on(x) || fik.image(x) != fjk.image(y))
            issue("composition",
                  "triangle (" + s.nodes[static_cast<size_t>(i)] + "," +
                      s.nodes[static_cast<size_t>(j)] + "," + s.nodes[static_cast<size_t>(k)] +
                      ") breaks at " + show_relation(s.structures[static_cast<size_t>(i)], x));
        }
      }

  if (check_axioms)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (!s.le(i, j)) continue;
        CheckReport sub = check_partial_team_isomorphism(s.map(i, j), max_arity);
        for (const CheckIssue& is : sub.issues)
          issue("axioms", edge_name(s, i, j) + " " + is.id + ": " + is.detail);
      }
  return rep;
}

namespace {

// all limit elements, in canonical order
std::vector<LimitElement> enumerate_elements(const DirectedSystem& s) {
  int n = static_cast<int>(s.nodes.size());
  std::set<LimitElement> found;
  for (uint32_t mask = 1; mask < (1u << n); ++mask) {
    std::vector<int> dom;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) dom.push_back(i);
    bool upset = true;
    for (int i : dom)
      for (int k = 0; k < n && upset; ++k)
        if (s.le(i, k) && !(mask & (1u << k))) upset = false;
    if (!upset) continue;

    uint64_t total = 1;
    for (int i : dom) {
      total *= static_cast<uint64_t>(s.structures[static_cast<size_t>(i)].size());
      if (total > kEnumCap) throw Error("limit element enumeration too large");
    }
    std::vector<Elem> val(dom.size(), 0);
    for (uint64_t c = 0; c < total; ++c) {
      bool ok = true;
      // coherence along every comparable pair inside the upset
      for (size_t p = 0; p < dom.size() && ok; ++p)
        for (size_t q = 0; q < dom.size() && ok; ++q) {
          if (!s.le(dom[p], dom[q])) continue;
          auto img = s.map(dom[p], dom[q]).elem_image(val[p]);
          ok = img && *img == val[q];
        }
      // backward maximality: nothing outside the upset maps onto a value
      for (int i = 0; i < n && ok; ++i) {
        if (mask & (1u << i)) continue;
        for (size_t q = 0; q < dom.size() && ok; ++q) {
          if (!s.le(i, dom[q])) continue;
          const TeamMap& f = s.map(i, dom[q]);
          for (Elem a = 0; a < s.structures[static_cast<size_t>(i)].size(); ++a) {
            auto img = f.elem_image(a);
            if (img && *img == val[q]) {
              ok = false;
              break;
            }
          }
        }
      }
      if (ok) {
        LimitElement eta;
        for (size_t p = 0; p < dom.size(); ++p) eta.values[dom[p]] = val[p];
        found.insert(std::move(eta));
      }
      for (size_t pos = val.size(); pos-- > 0;) {
        if (++val[pos] < s.structures[static_cast<size_t>(dom[pos])].size()) break;
        val[pos] = 0;
      }
    }
  }
  return {found.begin(), found.end()};
}

TeamMap limit_map(const DirectedSystem& s, const std::vector<LimitElement>& elems,
                  const Structure& limit, int i) {
  TeamMap g;
  g.source = s.structures[static_cast<size_t>(i)];
  g.target = limit;
  int n = static_cast<int>(s.nodes.size());
  size_t b = elems.size();
  for (const auto& [x, same] : s.map(i, i).entries) {
    int arity = x.arity;
    uint64_t combos = 1;
    for (int k = 0; k < arity; ++k) {
      combos *= b;
      if (combos > kEnumCap) throw Error("limit map enumeration too large");
    }
    std::vector<Tuple> tuples;
    std::vector<size_t> pick(static_cast<size_t>(arity), 0);
    for (uint64_t c = 0; c < combos; ++c) {
      bool in = false;
      for (int j = 0; j < n && !in; ++j) {
        if (!s.le(i, j)) continue;
        Tuple at_j;
        bool shared = true;
        for (size_t k = 0; k < pick.size() && shared; ++k) {
          const auto& vals = elems[pick[k]].values;
          auto it = vals.find(j);
          if (it == vals.end())
            shared = false;
          else
            at_j.push_back(it->second);
        }
        in = shared && s.map(i, j).image(x).contains(at_j);
      }
      if (in) {
        Tuple t;
        for (size_t k = 0; k < pick.size(); ++k) t.push_back(static_cast<Elem>(pick[k]));
        tuples.push_back(std::move(t));
      }
      for (size_t pos = pick.size(); pos-- > 0;) {
        if (++pick[pos] < b) break;
        pick[pos] = 0;
      }
    }
    g.entries.emplace(x, Relation(arity, std::move(tuples)));
    (void)same;
  }
  return g;
}

}  // namespace

DirectLimitResult direct_limit(const DirectedSystem& s, int max_arity) {
  CheckReport rep = validate_system(s, max_arity);
  if (!rep.pass())
    throw Error("invalid system: " + rep.issues[0].id + ": " + rep.issues[0].detail);
  for (const auto& [edge, f] : s.maps)
    if (!f.element_total())
      throw Error("direct limit needs element-total maps; " +
                  edge_name(s, edge.first, edge.second) + " is not");

  DirectLimitResult res;
  res.elements = enumerate_elements(s);

  Structure& b = res.limit;
  b.sig = s.structures[0].sig;
  for (const LimitElement& eta : res.elements) {
    int at = eta.values.begin()->first;
    b.domain.push_back(
        s.nodes[static_cast<size_t>(at)] + "." +
        s.structures[static_cast<size_t>(at)].elem_name(eta.values.begin()->second));
  }

  // limit maps first (with an unfinished target: only the domain is needed)
  int n = static_cast<int>(s.nodes.size());
  std::vector<TeamMap> gs;
  for (int i = 0; i < n; ++i) gs.push_back(limit_map(s, res.elements, b, i));

  // symbol interpretations from every node must agree
  auto from_all_nodes = [&](const std::string& what,
                            const std::function<Relation(int)>& source) {
    Relation out = gs[0].image(source(0));
    for (int i = 1; i < n; ++i)
      if (gs[static_cast<size_t>(i)].image(source(i)) != out)
        throw Error("limit interpretation of " + what + " disagrees between nodes");
    return out;
  };
  for (const auto& [name, k] : b.sig.relations) {
    b.relations[name] = from_all_nodes(
        name, [&](int i) { return s.structures[static_cast<size_t>(i)].relations.at(name); });
    (void)k;
  }
  for (const auto& [name, k] : b.sig.functions) {
    Relation graph = from_all_nodes(name, [&](int i) {
      return s.structures[static_cast<size_t>(i)].function_graph(name);
    });
    FunctionTable tab;
    tab.arity = k;
    tab.values.assign(static_cast<size_t>(b.space_size(k)), -1);
    for (const Tuple& t : graph.tuples) {
      Tuple args(t.begin(), t.end() - 1);
      Elem& slot = tab.values[b.tuple_rank(args)];
      if (slot >= 0) throw Error("limit graph of " + name + " is not functional");
      slot = t.back();
    }
    for (Elem v : tab.values)
      if (v < 0) throw Error("limit graph of " + name + " is not total");
    b.functions[name] = std::move(tab);
  }
  for (const auto& name : b.sig.constants) {
    Relation c = from_all_nodes(name, [&](int i) {
      return s.structures[static_cast<size_t>(i)].constant_singleton(name);
    });
    if (!c.is_singleton()) throw Error("limit constant " + name + " is not a singleton");
    b.constants[name] = c.tuples[0][0];
  }
  b.validate();

  // the targets were built before the interpretations existed; patch them
  for (TeamMap& g : gs) g.target = b;
  res.maps = std::move(gs);
  for (const TeamMap& g : res.maps)
    for (const auto& [x, y] : g.entries) res.admissible.relations.push_back(y);
  res.admissible.normalize();
  return res;
}

CheckReport cofinal_restriction_check(const DirectedSystem& s, const std::set<int>& j,
                                      int max_arity) {
  int n = static_cast<int>(s.nodes.size());
  if (j.empty()) throw Error("restriction set is empty");
  for (int p : j)
    if (p < 0 || p >= n) throw Error("restriction set is not a subset of the nodes");
  for (int i = 0; i < n; ++i)
    if (std::none_of(j.begin(), j.end(), [&](int p) { return s.le(i, p); }))
      throw Error("restriction set is not cofinal");
  for (int p : j)
    for (int q : j)
      if (std::none_of(j.begin(), j.end(),
                       [&](int r) { return s.le(p, r) && s.le(q, r); }))
        throw Error("restriction set is not directed");

  DirectedSystem t;
  std::vector<int> old_of;  // restricted index -> original index
  std::vector<int> new_of(static_cast<size_t>(n), -1);
  for (int p : j) {
    new_of[static_cast<size_t>(p)] = static_cast<int>(old_of.size());
    old_of.push_back(p);
    t.nodes.push_back(s.nodes[static_cast<size_t>(p)]);
    t.structures.push_back(s.structures[static_cast<size_t>(p)]);
  }
  t.leq.assign(old_of.size(), std::vector<bool>(old_of.size(), false));
  for (size_t p = 0; p < old_of.size(); ++p)
    for (size_t q = 0; q < old_of.size(); ++q) {
      if (!s.le(old_of[p], old_of[q])) continue;
      t.leq[p][q] = true;
      t.maps.emplace(std::pair<int, int>(static_cast<int>(p), static_cast<int>(q)),
                     s.map(old_of[p], old_of[q]));
    }

  DirectLimitResult full = direct_limit(s, max_arity);
  DirectLimitResult restricted = direct_limit(t, max_arity);

  CheckReport rep;
  auto issue = [&](const std::string& id, const std::string& detail) {
    rep.issues.push_back({id, detail});
  };

  ElementMap pi;
  std::vector<bool> hit(restricted.elements.size(), false);
  for (size_t e = 0; e < full.elements.size(); ++e) {
    LimitElement cut;
    for (const auto& [node, v] : full.elements[e].values)
      if (new_of[static_cast<size_t>(node)] >= 0)
        cut.values[new_of[static_cast<size_t>(node)]] = v;
    auto it = std::find(restricted.elements.begin(), restricted.elements.end(), cut);
    if (it == restricted.elements.end()) {
      issue("restriction", "restricting " + full.limit.elem_name(static_cast<Elem>(e)) +
                               " is not a limit element of the subsystem");
      return rep;
    }
    size_t at = static_cast<size_t>(it - restricted.elements.begin());
    pi.push_back(static_cast<Elem>(at));
    hit[at] = true;
  }
  if (!std::all_of(hit.begin(), hit.end(), [](bool x) { return x; }) ||
      full.elements.size() != restricted.elements.size()) {
    issue("restriction", "restriction is not a bijection onto the subsystem limit");
    return rep;
  }

  std::string why;
  if (!is_isomorphism(pi, full.limit, restricted.limit, &why))
    issue("restriction-iso", why);

  for (int p : j) {
    const TeamMap& gi = full.maps[static_cast<size_t>(p)];
    const TeamMap& gj = restricted.maps[static_cast<size_t>(new_of[static_cast<size_t>(p)])];
    if (gi.domain_family() != gj.domain_family()) {
      issue("restriction-maps", "limit map domains differ at " + s.nodes[static_cast<size_t>(p)]);
      continue;
    }
    for (const auto& [x, y] : gi.entries)
      if (apply_element_map(pi, y) != gj.image(x))
        issue("restriction-maps",
              "limit maps disagree at " + s.nodes[static_cast<size_t>(p)] + " on " +
                  show_relation(s.structures[static_cast<size_t>(p)], x));
  }
  return rep;
}

TeamMap mediating_map(const DirectedSystem& s, const DirectLimitResult& lim,
                      const std::vector<TeamMap>& cone) {
  int n = static_cast<int>(s.nodes.size());
  if (static_cast<int>(cone.size()) != n) throw Error("cone needs one map per node");
  for (int i = 0; i < n; ++i) {
    if (cone[static_cast<size_t>(i)].source != s.structures[static_cast<size_t>(i)])
      throw Error("cone map at " + s.nodes[static_cast<size_t>(i)] +
                  " does not start at the node structure");
    if (cone[static_cast<size_t>(i)].target != cone[0].target)
      throw Error("cone maps have different targets");
  }
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      if (!s.le(i, k)) continue;
      const TeamMap& f = s.map(i, k);
      for (const auto& [x, y] : f.entries) {
        if (!cone[static_cast<size_t>(i)].defined_on(x) ||
            !cone[static_cast<size_t>(k)].defined_on(y))
          throw Error("cone map not defined on the system domain at " +
                      edge_name(s, i, k));
        if (cone[static_cast<size_t>(i)].image(x) != cone[static_cast<size_t>(k)].image(y))
          throw Error("cone does not commute over " + edge_name(s, i, k) + " at " +
                      show_relation(s.structures[static_cast<size_t>(i)], x));
      }
    }

  TeamMap k;
  k.source = lim.limit;
  k.target = cone[0].target;
  for (int i = 0; i < n; ++i)
    for (const auto& [x, gx] : lim.maps[static_cast<size_t>(i)].entries) {
      const Relation& hx = cone[static_cast<size_t>(i)].image(x);
      auto [it, fresh] = k.entries.emplace(gx, hx);
      if (!fresh && it->second != hx)
        throw Error("mediating map is not well defined at " +
                    show_relation(lim.limit, gx));
    }
  return k;
}

}  // namespace teamlog
