// Command-line surface over the library: evaluation, translation, closure,
// map checking, ultraproducts, direct limits, and the property harness.
// Exit codes: 0 = pass/true, 1 = check failed/query false, 2 = usage or
// input error.

#include <cstdio>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "teamlog/io.hpp"
#include "teamlog/maps.hpp"
#include "teamlog/properties.hpp"
#include "teamlog/semantics.hpp"
#include "teamlog/translate.hpp"

namespace {

using nlohmann::json;
using namespace teamlog;

void emit(const json& j) { std::cout << j.dump(2) << "\n"; }

int verdict(bool v, bool as_json) {
  if (as_json)
    emit(json{{"result", v}});
  else
    std::cout << (v ? "true" : "false") << "\n";
  return v ? 0 : 1;
}

json issues_json(const CheckReport& rep) {
  json a = json::array();
  for (const auto& is : rep.issues) a.push_back(json{{"id", is.id}, {"detail", is.detail}});
  return a;
}

void print_issues(const CheckReport& rep) {
  for (const auto& is : rep.issues) std::cout << "  " << is.id << ": " << is.detail << "\n";
}

struct EvalArgs {
  std::string structure, team, formula, dialect;
};

struct TranslateArgs {
  std::string dialect, formula;
  int arity = 0;
};

struct EvalSoArgs {
  std::string structure, sentence;
  std::vector<std::string> params;
};

struct ClosureArgs {
  std::string structure, relations;
  int max_arity = 2;
};

struct CheckMapArgs {
  std::string map, corpus;
  bool pi = false, elementary = false;
  int boolean_n = -1;
  int max_arity = 2;
};

struct FindMapArgs {
  std::string source, relations, target;
  int max_arity = 2;
};

struct UltraArgs {
  std::string ultrafilter, formula, dialect;
  std::vector<std::string> structures, teams;
};

struct LimitArgs {
  std::string system, cofinal;
  int max_arity = 2;
};

int cmd_eval(const EvalArgs& a, bool as_json) {
  Structure s = load_structure(a.structure);
  Team x = load_team(a.team, s);
  Dialect d = dialect_from_string(a.dialect);
  const Formula* f = parse_formula(a.formula, d, &s.sig);
  return verdict(eval_team(s, x, f), as_json);
}

int cmd_translate(const TranslateArgs& a, bool as_json) {
  Dialect d = dialect_from_string(a.dialect);
  const Formula* f = parse_formula(a.formula, d, nullptr);
  SOSentence chi = d == Dialect::FOT ? fot_to_fo(f, a.arity) : foil_to_eso(f, a.arity);
  if (as_json)
    emit(json{{"sentence", render(chi)}});
  else
    std::cout << render(chi) << "\n";
  return 0;
}

int cmd_eval_so(const EvalSoArgs& a, bool as_json) {
  Structure s = load_structure(a.structure);
  SOSentence sent = parse_sentence(a.sentence, &s.sig);
  std::map<std::string, Relation> params;
  for (const std::string& p : a.params) {
    size_t eq = p.find('=');
    if (eq == std::string::npos) throw Error("--param expects NAME=FILE, got " + p);
    params.emplace(p.substr(0, eq), load_relation(p.substr(eq + 1), s));
  }
  return verdict(eval_eso(s, sent, params), as_json);
}

int cmd_closure(const ClosureArgs& a, bool as_json) {
  Structure s = load_structure(a.structure);
  RelationFamily seeds = load_relation_family(a.relations, s);
  ClosureResult c = closure(s, seeds, a.max_arity);
  if (as_json) {
    emit(json{{"relations", json::parse(to_json_string(c.family, s))},
              {"truncated", c.truncated}});
  } else {
    std::cout << c.family.relations.size() << " relations"
              << (c.truncated ? " (cap truncated some products)" : "") << "\n";
    for (const Relation& r : c.family.relations) std::cout << show_relation(s, r) << "\n";
  }
  return 0;
}

int cmd_check_map(const CheckMapArgs& a, bool as_json) {
  TeamMap f = load_team_map(a.map);
  bool any = a.pi || a.elementary || a.boolean_n >= 0 || !a.corpus.empty();
  bool run_pi = a.pi || !any;

  json out = json::object();
  bool pass = true;
  if (run_pi) {
    CheckReport rep = check_partial_team_isomorphism(f, a.max_arity);
    pass = pass && rep.pass();
    if (as_json)
      out["pi"] = json{{"pass", rep.pass()}, {"issues", issues_json(rep)}};
    else {
      std::cout << "pi: " << (rep.pass() ? "pass" : "fail") << "\n";
      print_issues(rep);
    }
  }
  if (a.elementary) {
    bool ok = check_elementary_map(f);
    pass = pass && ok;
    if (as_json)
      out["elementary"] = json{{"pass", ok}};
    else
      std::cout << "elementary: " << (ok ? "pass" : "fail") << "\n";
  }
  if (a.boolean_n >= 0) {
    CheckReport rep = check_boolean_embedding(f, a.boolean_n);
    pass = pass && rep.pass();
    if (as_json)
      out["boolean"] = json{{"pass", rep.pass()}, {"issues", issues_json(rep)}};
    else {
      std::cout << "boolean: " << (rep.pass() ? "pass" : "fail") << "\n";
      print_issues(rep);
    }
  }
  if (!a.corpus.empty()) {
    std::vector<const Formula*> corpus = load_corpus(a.corpus, Dialect::FOT, &f.source.sig);
    CheckReport rep = check_tarski_vaught(f, corpus);
    pass = pass && rep.pass();
    if (as_json)
      out["tarski-vaught"] = json{{"pass", rep.pass()}, {"issues", issues_json(rep)}};
    else {
      std::cout << "tarski-vaught: " << (rep.pass() ? "pass" : "fail") << "\n";
      print_issues(rep);
    }
  }
  if (as_json) emit(out);
  return pass ? 0 : 1;
}

int cmd_find_map(const FindMapArgs& a, bool as_json) {
  Structure src = load_structure(a.source);
  RelationFamily seeds = load_relation_family(a.relations, src);
  Structure tgt = load_structure(a.target);
  std::optional<TeamMap> f = find_partial_elementary_map(src, seeds, tgt, a.max_arity);
  if (!f) {
    if (as_json)
      emit(json{{"found", false}});
    else
      std::cout << "no partial elementary map\n";
    return 1;
  }
  if (as_json) {
    json entries = json::array();
    for (const auto& [x, y] : f->entries)
      entries.push_back(json{{"from", json::parse(to_json_string(x, src))},
                             {"to", json::parse(to_json_string(y, tgt))}});
    emit(json{{"found", true}, {"entries", entries}});
  } else {
    std::cout << "found: " << f->entries.size() << " entries\n";
    for (const auto& [x, y] : f->entries)
      std::cout << "  " << show_relation(src, x) << " -> " << show_relation(tgt, y) << "\n";
  }
  return 0;
}

int cmd_ultra(const UltraArgs& a, bool as_json) {
  Ultrafilter u = load_ultrafilter(a.ultrafilter);
  std::vector<Structure> as;
  for (const std::string& p : a.structures) as.push_back(load_structure(p));

  if (a.teams.empty()) {
    UltraproductResult up = ultraproduct_structures(as, u);
    if (as_json)
      emit(json{{"principal", up.principal},
                {"structure", json::parse(to_json_string(up.product))}});
    else {
      std::cout << "ultraproduct collapses onto factor " << up.principal << "\n"
                << to_json_string(up.product) << "\n";
    }
    return 0;
  }

  if (a.formula.empty() || a.dialect.empty())
    throw Error("--teams needs --formula and --dialect");
  std::vector<Team> xs;
  for (size_t i = 0; i < a.teams.size(); ++i) {
    if (i >= as.size()) throw Error("more teams than structures");
    xs.push_back(load_team(a.teams[i], as[i]));
  }
  Dialect d = dialect_from_string(a.dialect);
  const Formula* f = parse_formula(a.formula, d, &as[0].sig);
  LosReport rep = verify_los(as, xs, u, f, d);
  if (as_json)
    emit(json{{"factors", rep.factor_side},
              {"product", rep.product_side},
              {"pass", rep.pass}});
  else
    std::cout << "factors: " << (rep.factor_side ? "true" : "false") << "\n"
              << "product: " << (rep.product_side ? "true" : "false") << "\n"
              << "los: " << (rep.pass ? "pass" : "fail") << "\n";
  return rep.pass ? 0 : 1;
}

int cmd_limit(const LimitArgs& a, bool as_json) {
  DirectedSystem s = load_system(a.system);

  if (!a.cofinal.empty()) {
    std::set<int> j;
    std::string cur;
    for (char c : a.cofinal + ",") {
      if (c == ',') {
        if (cur.empty()) continue;
        int n = s.node(cur);
        if (n < 0) throw Error("cofinal set names an unknown node: " + cur);
        j.insert(n);
        cur.clear();
      } else {
        cur += c;
      }
    }
    CheckReport rep = cofinal_restriction_check(s, j, a.max_arity);
    if (as_json)
      emit(json{{"pass", rep.pass()}, {"issues", issues_json(rep)}});
    else {
      std::cout << "cofinal restriction: " << (rep.pass() ? "pass" : "fail") << "\n";
      print_issues(rep);
    }
    return rep.pass() ? 0 : 1;
  }

  DirectLimitResult lim = direct_limit(s, a.max_arity);
  if (as_json) {
    json elems = json::array();
    for (const std::string& name : lim.limit.domain) elems.push_back(name);
    emit(json{{"structure", json::parse(to_json_string(lim.limit))},
              {"elements", elems},
              {"admissible", lim.admissible.relations.size()}});
  } else {
    std::cout << "limit has " << lim.limit.size() << " elements:";
    for (const std::string& name : lim.limit.domain) std::cout << " " << name;
    std::cout << "\n"
              << "admissible relations: " << lim.admissible.relations.size() << "\n";
  }
  return 0;
}

int cmd_properties(const PropertyConfig& cfg, bool as_json) {
  PropertyReport rep = run_properties(cfg);
  if (as_json) {
    json suites = json::array();
    for (const auto& s : rep.suites) {
      json e{{"name", s.name}, {"checked", s.checked}, {"failed", s.failed}};
      if (s.failed > 0) e["counterexample"] = s.counterexample;
      suites.push_back(std::move(e));
    }
    emit(json{{"suites", suites}, {"pass", rep.pass()}});
  } else {
    std::cout << render(rep);
  }
  return rep.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"workbench for team semantics over finite structures"};
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "machine-readable output");

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a formula on a team");
  eval_cmd->add_option("--structure", eval_args.structure, "structure file")->required();
  eval_cmd->add_option("--team", eval_args.team, "team file")->required();
  eval_cmd->add_option("--formula", eval_args.formula, "formula text")->required();
  eval_cmd->add_option("--dialect", eval_args.dialect, "fo, fot, or foil")->required();

  TranslateArgs tr_args;
  auto* tr_cmd = app.add_subcommand("translate", "compile a formula to a sentence");
  tr_cmd->add_option("--dialect", tr_args.dialect, "fot or foil")->required();
  tr_cmd->add_option("--arity", tr_args.arity, "window size (R arity)")->required();
  tr_cmd->add_option("--formula", tr_args.formula, "formula text")->required();

  EvalSoArgs so_args;
  auto* so_cmd = app.add_subcommand("eval-so", "evaluate a sentence with relation parameters");
  so_cmd->add_option("--structure", so_args.structure, "structure file")->required();
  so_cmd->add_option("--sentence", so_args.sentence, "sentence text")->required();
  so_cmd->add_option("--param", so_args.params, "NAME=FILE relation binding");

  ClosureArgs cl_args;
  auto* cl_cmd = app.add_subcommand("closure", "close a relation family");
  cl_cmd->add_option("--structure", cl_args.structure, "structure file")->required();
  cl_cmd->add_option("--relations", cl_args.relations, "relation family file")->required();
  cl_cmd->add_option("--max-arity", cl_args.max_arity, "arity cap")->required();

  CheckMapArgs cm_args;
  auto* cm_cmd = app.add_subcommand("check-map", "check a team map");
  cm_cmd->add_option("--map", cm_args.map, "team map file")->required();
  cm_cmd->add_flag("--pi", cm_args.pi, "partial team isomorphism axioms (default)");
  cm_cmd->add_flag("--elementary", cm_args.elementary, "elementary map check");
  cm_cmd->add_option("--boolean", cm_args.boolean_n, "boolean algebra embedding at arity N");
  cm_cmd->add_option("--tarski-vaught", cm_args.corpus, "corpus file for the Tarski-Vaught test");
  cm_cmd->add_option("--max-arity", cm_args.max_arity, "arity cap for the axiom checks");

  FindMapArgs fm_args;
  auto* fm_cmd = app.add_subcommand("find-map", "search for a partial elementary map");
  fm_cmd->add_option("--source", fm_args.source, "source structure file")->required();
  fm_cmd->add_option("--relations", fm_args.relations, "seed relation family file")->required();
  fm_cmd->add_option("--target", fm_args.target, "target structure file")->required();
  fm_cmd->add_option("--max-arity", fm_args.max_arity, "arity cap");

  UltraArgs ul_args;
  auto* ul_cmd = app.add_subcommand("ultra", "ultraproduct of structures (and teams)");
  ul_cmd->add_option("--ultrafilter", ul_args.ultrafilter, "ultrafilter file")->required();
  ul_cmd->add_option("--structures", ul_args.structures, "factor structure files")
      ->required();
  ul_cmd->add_option("--teams", ul_args.teams, "factor team files");
  ul_cmd->add_option("--formula", ul_args.formula, "formula text");
  ul_cmd->add_option("--dialect", ul_args.dialect, "fo, fot, or foil");

  LimitArgs lm_args;
  auto* lm_cmd = app.add_subcommand("limit", "direct limit of a system");
  lm_cmd->add_option("--system", lm_args.system, "system file")->required();
  lm_cmd->add_option("--cofinal", lm_args.cofinal, "comma-separated cofinal node set");
  lm_cmd->add_option("--max-arity", lm_args.max_arity, "arity cap");

  PropertyConfig cfg;
  auto* pr_cmd = app.add_subcommand("properties", "run the property suites");
  pr_cmd->add_option("--seed", cfg.seed, "random seed");
  pr_cmd->add_option("--count", cfg.count, "instances per suite");
  pr_cmd->add_option("--suite", cfg.suites, "suite names (default: all)");
  pr_cmd->add_option("--max-structure", cfg.max_structure, "domain size cap");
  pr_cmd->add_option("--max-team", cfg.max_team, "team row cap");
  pr_cmd->add_option("--max-formula-size", cfg.max_formula_size, "sampled formula depth");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (eval_cmd->parsed()) return cmd_eval(eval_args, as_json);
    if (tr_cmd->parsed()) return cmd_translate(tr_args, as_json);
    if (so_cmd->parsed()) return cmd_eval_so(so_args, as_json);
    if (cl_cmd->parsed()) return cmd_closure(cl_args, as_json);
    if (cm_cmd->parsed()) return cmd_check_map(cm_args, as_json);
    if (fm_cmd->parsed()) return cmd_find_map(fm_args, as_json);
    if (ul_cmd->parsed()) return cmd_ultra(ul_args, as_json);
    if (lm_cmd->parsed()) return cmd_limit(lm_args, as_json);
    if (pr_cmd->parsed()) return cmd_properties(cfg, as_json);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
