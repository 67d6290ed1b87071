#pragma once

#include "telsym/expr.hpp"
#include "telsym/fields.hpp"
#include "telsym/jet.hpp"
#include "telsym/rewrite.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace telsym {

// Typed view of the classification database. Every expression string is
// parsed eagerly at load time; a malformed entry raises DbError tagged with
// the id of the record that holds it, so a bad data file cannot produce a
// half-verified run.

struct DbError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ZeroPolicy {
  int trials = 20;
  std::uint64_t seed = 20260819ULL;
  double zero_tol = 1e-9;
  double nonzero_tol = 1e-6;
  double grid_tol = 1e-8;
  int grid_points = 7;
};

// Ordered (name, expression) pairs; later entries may mention earlier names.
using NamedExprs = std::vector<std::pair<std::string, Expr>>;

struct DbControl {
  std::string kind;
  bool expect_pass = false;
  std::string display;
  std::optional<VectorField> vector;  // operator variants
  std::optional<Expr> beta;           // multiplier variants
  std::optional<Expr> ode;            // reduced-equation variants
};

struct SymmetryRow {
  std::string id;
  std::string kind = "row";  // "row" | "repair"
  PDEInstance slots;
  std::vector<VectorField> basis;
  RuleSet rules;
  NamedExprs subst;  // applied in order to slots, basis, and rule right sides
  std::vector<std::string> constraints;
  std::vector<std::string> nonzero;
  std::string status = "ok";  // "ok" | "amended" | "flagged"
  bool gated = true;
  bool verify = true;
  bool display_only = false;
  std::string display;
  std::string notes;
  std::vector<DbControl> controls;
};

struct SymmetryTable {
  std::string id;
  std::string display;
  std::string gauge;
  std::string H_family;
  std::vector<SymmetryRow> rows;
};

struct EquivalenceCert {
  std::string id;
  std::string display;
  std::string notes;
  bool expect_pass = true;
  std::string source_row;  // empty when literal slots were given
  std::string target_row;
  PDEInstance source;
  PDEInstance target;
  RuleSet source_rules;
  RuleSet target_rules;
  std::vector<VectorField> source_basis;
  std::vector<VectorField> target_basis;
  Expr map_t, map_x, map_u;  // image coordinates as source expressions
};

struct ReductionRow {
  std::string id;
  std::vector<VectorField> operators;
  NamedExprs defs;  // symbolic definitions substituted in order
  NamedExprs bind;  // parameter pins applied to the table equation too
  std::optional<Expr> invariant;  // w as a function of (t, x)
  std::optional<Expr> ansatz;     // u through phi(w)
  std::optional<Expr> ansatz_xu;  // direct closed form in x and constants
  Expr ode;
  Expr multiplier;
  std::vector<std::string> constraints;
  std::string status = "ok";
  std::vector<DbControl> controls;
};

struct AlgebraPin {
  int i = 0, j = 0;  // bracket of basis[i], basis[j]
  std::vector<std::pair<int, Expr>> coeffs;  // index -> structure coefficient
};

struct ReductionTable {
  std::string id;
  std::string display;
  PDEInstance equation;
  std::vector<VectorField> algebra_basis;
  std::vector<AlgebraPin> pins;
  std::vector<ReductionRow> rows;
};

struct SolutionEntry {
  std::string id;
  std::string display;
  std::string notes;
  std::string status = "ok";
  std::string special;  // "airy" marks entries needing the series evaluator
  PDEInstance equation;
  Expr u;
  NamedExprs arg;  // auxiliary argument bindings, e.g. w -> expression(t, x)
  RuleSet rules;
  bool gated = true;
  NamedExprs grid_binds;
  double t_lo = 0.5, t_hi = 2.0, x_lo = 0.5, x_hi = 2.0;
};

struct NonclassicalOperator {
  std::string id;
  std::string kind;  // "strictly-conditional" | "no-go" | "lie"
  std::string display;
  VectorField q;
  RuleSet rules;
  bool gated = true;
};

struct NonclassicalSection {
  PDEInstance equation;
  std::vector<VectorField> lie_basis;
  std::vector<NonclassicalOperator> operators;
  std::vector<DbControl> controls;
  std::vector<std::string> display_regular;
  std::vector<std::string> display_tau0;
  std::string singularity_display;
  int oracle_trials = 100;
  std::uint64_t oracle_seed = 20260819ULL;
};

struct ConservationRow {
  std::string id;
  std::string kind = "row";  // "row" | "pattern"
  std::string status = "ok";
  std::string notes;
  bool gated = true;
  PDEInstance slots;
  NamedExprs binds;    // closed forms for antiderivative atoms
  RuleSet rules;
  std::vector<Expr> betas;
  NamedExprs derived;  // numerically derived parameters, in order
  std::vector<Expr> positive;
  std::vector<DbControl> controls;
  std::string same_as;            // id of an identical row
  std::string reconstruct_from;   // id of the row this one is the image of
  std::optional<Expr> reconstruct_eps;
};

struct ConservationTable {
  std::string id;
  std::string display;
  std::vector<ConservationRow> rows;
};

struct ConservationSection {
  std::string density_display, flux_display, lambda_display,
      classifying_display, structure_display, generic_identity_display,
      linear_beta_display;
  std::string generic_beta_atom;  // opaque multiplier for the generic identity
  int mutation_controls = 10;
  std::vector<ConservationTable> tables;
};

struct TheoremDoc {
  std::string id;
  std::string gauge;
  std::map<std::string, std::string> vars;      // display strings
  std::map<std::string, std::string> elements;  // display strings
  std::string constraint;
  std::vector<DbControl> controls;  // documentary variants
};

struct InvolutionDoc {
  std::string id;
  std::vector<std::string> flip;
};

struct Preset {
  std::string id;
  std::string display;
  std::string notes;
  PDEInstance slots;
};

struct Determining {
  std::vector<std::string> display_raw;
  std::vector<std::string> display_reduced;
  std::string identity_note;
  // Monomial in first-order-and-mixed jets -> coefficient in the opaque
  // field components tau, xi, eta and the class slots.
  std::vector<std::pair<Expr, Expr>> split;
};

struct Database {
  int format_version = 0;
  std::string title;
  std::string class_display;
  std::string class_assumptions;
  Expr class_delta;
  std::vector<std::string> class_slots;
  ZeroPolicy zero;

  std::vector<VectorField> kernel_basis;
  std::string kernel_note;
  int kernel_trials = 50;

  Determining determining;
  std::vector<TheoremDoc> equivalence_theorems;
  std::vector<TheoremDoc> gauge_maps;
  std::vector<InvolutionDoc> involutions;

  std::vector<SymmetryTable> symmetry_tables;
  std::vector<EquivalenceCert> equivalences;
  std::vector<ReductionTable> reductions;
  std::vector<SolutionEntry> solutions;
  NonclassicalSection nonclassical;
  ConservationSection conservation;

  std::string appendix_display;
  std::string appendix_note;
  std::vector<SymmetryTable> appendix_tables;

  std::vector<Preset> presets;

  // The resolved location: $TELSYM_DATA when set, otherwise the file baked
  // in at configure time, otherwise "classification.json" beside the binary.
  static std::string default_path();
  static Database load(const std::string& path);
  static const Database& shared();  // loaded once from default_path()

  const SymmetryRow* find_row(const std::string& id) const;
  const ConservationRow* find_conservation_row(const std::string& id) const;
};

// Sequentially applies ordered (name -> value) substitutions.
Expr apply_named(const Expr& e, const NamedExprs& defs);
VectorField apply_named(const VectorField& q, const NamedExprs& defs);
PDEInstance apply_named(const PDEInstance& pde, const NamedExprs& defs);

// ZeroOptions preconfigured from the database policy plus per-row extras.
struct RowZeroContext {
  std::vector<Expr> positive;
  NamedExprs derived;
};

} // namespace telsym
