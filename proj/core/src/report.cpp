#include "telsym/report.hpp"

#include <json.hpp>

#include <ostream>

namespace telsym {

void Report::merge(const Report& other) {
  results_.insert(results_.end(), other.results_.begin(),
                  other.results_.end());
}

std::size_t Report::passed() const {
  std::size_t n = 0;
  for (const auto& r : results_)
    if (r.ok) ++n;
  return n;
}

std::size_t Report::failed() const { return results_.size() - passed(); }

void Report::print_text(std::ostream& out, bool verbose) const {
  if (!section_.empty()) out << "== " << section_ << " ==\n";
  for (const auto& r : results_) {
    if (!verbose && r.ok) continue;
    out << (r.ok ? "  ok   " : "  FAIL ") << r.id << " [" << r.kind << "] "
        << r.verdict;
    if (r.worst > 0.0) out << " worst=" << r.worst;
    if (!r.detail.empty()) out << " : " << r.detail;
    out << "\n";
  }
  out << "  " << passed() << "/" << results_.size() << " checks passed\n";
}

void Report::print_json(std::ostream& out) const {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : results_) {
    arr.push_back({{"id", r.id},
                   {"kind", r.kind},
                   {"ok", r.ok},
                   {"verdict", r.verdict},
                   {"worst", r.worst},
                   {"detail", r.detail}});
  }
  nlohmann::json doc = {{"section", section_},
                        {"passed", passed()},
                        {"failed", failed()},
                        {"results", std::move(arr)}};
  out << doc.dump(2) << "\n";
}

CheckResult from_zero(std::string id, std::string kind, const ZeroReport& zr,
                      bool expect_pass) {
  CheckResult r;
  r.id = std::move(id);
  r.kind = std::move(kind);
  r.verdict = verdict_name(zr.verdict);
  r.worst = zr.worst;
  if (expect_pass) {
    r.ok = zr.holds();
    if (!r.ok) r.detail = zr.detail.empty() ? "identity rejected" : zr.detail;
  } else {
    // A negative control must be rejected decisively, not time out.
    r.ok = zr.verdict == Verdict::ProvedNonzero;
    if (!r.ok)
      r.detail = zr.holds() ? "control unexpectedly passes"
                            : "control not decisively rejected";
  }
  return r;
}

} // namespace telsym
