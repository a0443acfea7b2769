#pragma once

#include "teamlog/limits.hpp"
#include "teamlog/ultra.hpp"

// JSON files for structures, teams, relation families, team maps,
// ultrafilters and directed systems. Elements appear in files by name, never
// by index. Files that reference other files (team maps, systems) resolve
// those references relative to their own directory.

namespace teamlog {

Structure load_structure(const std::string& path);
void save_structure(const Structure& a, const std::string& path);

Team load_team(const std::string& path, const Structure& a);
void save_team(const Team& x, const Structure& a, const std::string& path);

RelationFamily load_relation_family(const std::string& path, const Structure& a);
void save_relation_family(const RelationFamily& fam, const Structure& a,
                          const std::string& path);

Relation load_relation(const std::string& path, const Structure& a);

// {"source": ref, "target": ref, "entries": [{"from": rel, "to": rel}, ...]}
TeamMap load_team_map(const std::string& path);
void save_team_map(const TeamMap& f, const std::string& path,
                   const std::string& source_ref, const std::string& target_ref);

Ultrafilter load_ultrafilter(const std::string& path);
void save_ultrafilter(const Ultrafilter& u, const std::string& path);

// {"nodes": [{"name": n, "structure": ref}, ...],
//  "edges": [{"from": n, "to": n, "map": ref}, ...]}
// The order relation holds exactly for the listed edges.
DirectedSystem load_system(const std::string& path);

// one formula per line; blank lines and lines starting with # are skipped
std::vector<const Formula*> load_corpus(const std::string& path, Dialect d,
                                        const Signature* sig);

// In-memory JSON forms (same shapes as the files), used for report output.
std::string to_json_string(const Structure& a);
std::string to_json_string(const Relation& r, const Structure& a);
std::string to_json_string(const RelationFamily& fam, const Structure& a);
std::string to_json_string(const Team& x, const Structure& a);

}  // namespace teamlog
