#pragma once

// The example systems as surface programs, with the facts we expect of
// them. Files under corpus/ are these texts verbatim.

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "asp/surface.hpp"
#include "asp/typecheck.hpp"

namespace asp {

struct ExpectedJudgment {
  std::string process;   // "main" or a proc name
  std::string judgment;  // "{} ; {b: beta @ inf}"
};

struct ExplorationFacts {
  std::size_t max_states = 10000;
  // Redex summaries (prefix match) occurring on every maximal trace.
  std::vector<std::string> must_occur;
  // Redex summaries (prefix match) occurring nowhere in the state graph.
  std::vector<std::string> must_not_occur;
};

struct CorpusEntry {
  std::string name;  // file stem under corpus/
  std::string source;
  SourceFile file;
  std::vector<ExpectedJudgment> judgments;
  ExplorationFacts facts;
};

// Workflow application: one workflow, two activities; the workflow
// logic tells activity 1 to update its environment and activity 2 not to.
CorpusEntry build_workflow();

// One-for-one supervision. The client sends (c1, c2) to the division
// server W3; a zero denominator makes S2 restart W3. With upgraded set the
// supervisor is S2', which installs W3' instead.
CorpusEntry build_one_for_one(std::int64_t c1, std::int64_t c2, bool upgraded = false);

// One-for-all supervision over workers w2, w3, w4, one client each. Workers
// named in fail_at receive an invalid value from their client.
CorpusEntry build_one_for_all(const std::set<std::string>& fail_at = {});

// Every entry that is checked in under corpus/.
std::vector<CorpusEntry> all_corpus_entries();

// The JSON sidecar describing an entry's expectations.
std::string expectations_json(const CorpusEntry& e);

struct DeclaredJudgment {
  std::string process;
  ErrorOr<Judgment, TypeError> result;
};

// Typechecks every `proc` declaration and main, in source order. Procs
// with parameters are checked with their parameters left free.
std::vector<DeclaredJudgment> check_declarations(const SourceFile& f);

// "{} ; {b: beta @ inf}"
std::string judgment_text(const Judgment& j, const TypeAliases& aliases);

}  // namespace asp
