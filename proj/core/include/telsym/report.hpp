#pragma once

#include "telsym/zero_test.hpp"

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace telsym {

// Outcome of one verification step. `ok` already accounts for the expected
// polarity: a control that is supposed to fail reports ok=true when the
// underlying identity test rejects it.
struct CheckResult {
  std::string id;      // record the step belongs to
  std::string kind;    // property that was checked
  bool ok = false;
  std::string verdict; // zero-test verdict or a short status code
  double worst = 0.0;  // worst scaled residual seen, 0 for structural proofs
  std::string detail;  // explanation, mandatory when ok is false
};

class Report {
 public:
  Report() = default;
  explicit Report(std::string section) : section_(std::move(section)) {}

  void add(CheckResult r) { results_.push_back(std::move(r)); }
  void merge(const Report& other);

  const std::string& section() const { return section_; }
  const std::vector<CheckResult>& results() const { return results_; }

  std::size_t passed() const;
  std::size_t failed() const;
  bool all_ok() const { return failed() == 0; }

  // One line per result; quiet mode prints failures and the tally only.
  void print_text(std::ostream& out, bool verbose = true) const;
  void print_json(std::ostream& out) const;

 private:
  std::string section_;
  std::vector<CheckResult> results_;
};

// Folds a zero-test outcome into a check result. expect_pass=false inverts
// the polarity for negative controls; such controls are satisfied by a
// ProvedNonzero or a clearly nonzero sample, not by an inconclusive run.
CheckResult from_zero(std::string id, std::string kind, const ZeroReport& zr,
                      bool expect_pass = true);

} // namespace telsym
