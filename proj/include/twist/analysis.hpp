#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "twist/ast.hpp"
#include "twist/history.hpp"

namespace twist {

// Sequential fresh-symbol source for split indices; one per analysis run so
// two runs over the same program assign identical indices.
struct SplitIndexGen {
  int64_t next = 1;
  int64_t fresh() { return next++; }
};

// One visit of a purity-gated site (cast<P> or split<P>). Function bodies
// are re-analyzed per call site, so one source line may produce several
// records. The site passes when the argument's history is empty.
struct SiteVerdict {
  Span span;
  bool is_split = false;
  History residual;

  bool pass() const { return residual.is_pure(); }
  // "pure" | "cast-not-pure" (fractional residue) | "mixed-leak"
  std::string verdict() const;
};

struct AnalysisReport {
  std::vector<SiteVerdict> sites;

  bool ok() const;
  const SiteVerdict* first_failure() const;
};

// Static purity analysis over an elaborated program: abstract interpretation
// from main with function bodies inlined at each call site, purities
// generalized to measurement histories. Never throws on a failing site; all
// verdicts are collected in the report.
AnalysisReport analyze_program(const Program& prog);

}  // namespace twist
