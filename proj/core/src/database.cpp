#include "telsym/database.hpp"

#include "telsym/parse.hpp"

#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace telsym {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw DbError(where + ": " + what);
}

Expr parse_at(const json& j, const std::string& where) {
  if (!j.is_string()) fail(where, "expected an expression string");
  const std::string text = j.get<std::string>();
  try {
    return parse(text);
  } catch (const std::exception& ex) {
    fail(where, "cannot parse \"" + text + "\": " + ex.what());
  }
}

std::string str_or(const json& j, const char* key, const std::string& def = "") {
  auto it = j.find(key);
  if (it == j.end()) return def;
  return it->get<std::string>();
}

bool bool_or(const json& j, const char* key, bool def) {
  auto it = j.find(key);
  if (it == j.end()) return def;
  return it->get<bool>();
}

std::vector<std::string> strings_or(const json& j, const char* key) {
  std::vector<std::string> out;
  auto it = j.find(key);
  if (it == j.end()) return out;
  for (const auto& s : *it) out.push_back(s.get<std::string>());
  return out;
}

VectorField field_at(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected a field object");
  return VectorField{parse_at(j.at("tau"), where + ".tau"),
                     parse_at(j.at("xi"), where + ".xi"),
                     parse_at(j.at("eta"), where + ".eta")};
}

std::vector<VectorField> fields_or(const json& j, const char* key,
                                   const std::string& where) {
  std::vector<VectorField> out;
  auto it = j.find(key);
  if (it == j.end()) return out;
  size_t i = 0;
  for (const auto& o : *it)
    out.push_back(field_at(o, where + "." + key + "[" + std::to_string(i++) + "]"));
  return out;
}

PDEInstance slots_at(const json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected a slot object");
  PDEInstance pde;
  pde.f = parse_at(j.at("f"), where + ".f");
  pde.g = parse_at(j.at("g"), where + ".g");
  pde.h = parse_at(j.at("h"), where + ".h");
  pde.H = parse_at(j.at("H"), where + ".H");
  pde.K = parse_at(j.at("K"), where + ".K");
  return pde;
}

RuleSet rules_or(const json& j, const char* key, const std::string& where) {
  RuleSet rs;
  auto it = j.find(key);
  if (it == j.end()) return rs;
  size_t i = 0;
  for (const auto& r : *it) {
    const std::string w = where + ".rules[" + std::to_string(i++) + "]";
    DerivRule dr;
    dr.atom = r.at("atom").get<std::string>();
    dr.arg_index = static_cast<size_t>(r.at("arg").get<int>());
    dr.order = r.at("order").get<int>();
    dr.rhs = parse_at(r.at("rhs"), w + ".rhs");
    rs.deriv.push_back(std::move(dr));
  }
  return rs;
}

NamedExprs named_or(const json& j, const char* key, const std::string& where) {
  NamedExprs out;
  auto it = j.find(key);
  if (it == j.end()) return out;
  size_t i = 0;
  for (const auto& pair : *it) {
    const std::string w = where + "." + key + "[" + std::to_string(i++) + "]";
    if (!pair.is_array() || pair.size() != 2) fail(w, "expected a [name, value] pair");
    out.emplace_back(pair[0].get<std::string>(), parse_at(pair[1], w));
  }
  return out;
}

std::vector<Expr> exprs_or(const json& j, const char* key,
                           const std::string& where) {
  std::vector<Expr> out;
  auto it = j.find(key);
  if (it == j.end()) return out;
  size_t i = 0;
  for (const auto& s : *it)
    out.push_back(parse_at(s, where + "." + key + "[" + std::to_string(i++) + "]"));
  return out;
}

bool expect_pass_of(const json& c, const std::string& where) {
  const std::string e = str_or(c, "expect", "fail");
  if (e == "pass") return true;
  if (e == "fail" || e == "ill-posed") return false;
  fail(where, "expect must be \"pass\", \"fail\", or \"ill-posed\"");
}

std::vector<DbControl> controls_or(const json& j, const std::string& where) {
  std::vector<DbControl> out;
  auto it = j.find("controls");
  if (it == j.end()) return out;
  size_t i = 0;
  for (const auto& c : *it) {
    const std::string w = where + ".controls[" + std::to_string(i++) + "]";
    DbControl ctl;
    ctl.kind = str_or(c, "kind", "operator");
    ctl.expect_pass = expect_pass_of(c, w);
    ctl.display = str_or(c, "display");
    if (c.contains("vector")) ctl.vector = field_at(c.at("vector"), w + ".vector");
    if (c.contains("tau"))  // flat form used by the conditional-symmetry list
      ctl.vector = field_at(c, w);
    if (c.contains("beta")) ctl.beta = parse_at(c.at("beta"), w + ".beta");
    if (c.contains("ode")) ctl.ode = parse_at(c.at("ode"), w + ".ode");
    out.push_back(std::move(ctl));
  }
  return out;
}

SymmetryRow row_at(const json& j, const std::string& table_id) {
  SymmetryRow row;
  row.id = j.at("id").get<std::string>();
  const std::string where = table_id + "." + row.id;
  row.kind = str_or(j, "kind", "row");
  row.display_only = bool_or(j, "display_only", false);
  row.display = str_or(j, "display");
  if (!row.display_only) {
    row.slots = slots_at(j.at("slots"), where + ".slots");
    row.basis = fields_or(j, "basis", where);
  }
  row.rules = rules_or(j, "rules", where);
  row.subst = named_or(j, "subst", where);
  row.constraints = strings_or(j, "constraints");
  row.nonzero = strings_or(j, "nonzero");
  row.status = str_or(j, "status", "ok");
  row.gated = bool_or(j, "gated", true);
  row.verify = bool_or(j, "verify", !row.display_only);
  row.notes = str_or(j, "notes");
  row.controls = controls_or(j, where);
  return row;
}

std::vector<SymmetryTable> tables_at(const json& arr) {
  std::vector<SymmetryTable> out;
  for (const auto& t : arr) {
    SymmetryTable tbl;
    tbl.id = t.at("id").get<std::string>();
    tbl.display = str_or(t, "display");
    tbl.gauge = str_or(t, "gauge");
    tbl.H_family = str_or(t, "H_family");
    for (const auto& r : t.at("rows")) tbl.rows.push_back(row_at(r, tbl.id));
    out.push_back(std::move(tbl));
  }
  return out;
}

TheoremDoc theorem_at(const json& j) {
  TheoremDoc doc;
  doc.id = j.at("id").get<std::string>();
  doc.gauge = str_or(j, "gauge");
  doc.constraint = str_or(j, "constraint");
  if (j.contains("display_vars"))
    for (const auto& [k, v] : j.at("display_vars").items())
      doc.vars[k] = v.get<std::string>();
  if (j.contains("display_elements"))
    for (const auto& [k, v] : j.at("display_elements").items())
      doc.elements[k] = v.get<std::string>();
  doc.controls = controls_or(j, doc.id);
  return doc;
}

}  // namespace

Expr apply_named(const Expr& e, const NamedExprs& defs) {
  Expr out = e;
  for (const auto& [name, value] : defs) out = substitute(out, {{name, value}});
  return out;
}

VectorField apply_named(const VectorField& q, const NamedExprs& defs) {
  return VectorField{apply_named(q.tau, defs), apply_named(q.xi, defs),
                     apply_named(q.eta, defs)};
}

PDEInstance apply_named(const PDEInstance& pde, const NamedExprs& defs) {
  PDEInstance out;
  out.f = apply_named(pde.f, defs);
  out.g = apply_named(pde.g, defs);
  out.h = apply_named(pde.h, defs);
  out.H = apply_named(pde.H, defs);
  out.K = apply_named(pde.K, defs);
  return out;
}

std::string Database::default_path() {
  if (const char* env = std::getenv("TELSYM_DATA")) return env;
#ifdef TELSYM_SOURCE_DATA_DIR
  return std::string(TELSYM_SOURCE_DATA_DIR) + "/classification.json";
#else
  return "classification.json";
#endif
}

const Database& Database::shared() {
  static const Database db = Database::load(default_path());
  return db;
}

const SymmetryRow* Database::find_row(const std::string& id) const {
  for (const auto& t : symmetry_tables)
    for (const auto& r : t.rows)
      if (r.id == id) return &r;
  for (const auto& t : appendix_tables)
    for (const auto& r : t.rows)
      if (r.id == id) return &r;
  return nullptr;
}

const ConservationRow* Database::find_conservation_row(
    const std::string& id) const {
  for (const auto& t : conservation.tables)
    for (const auto& r : t.rows)
      if (r.id == id) return &r;
  return nullptr;
}

Database Database::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DbError("cannot open database file: " + path);
  json root;
  try {
    in >> root;
  } catch (const std::exception& ex) {
    throw DbError("malformed JSON in " + path + ": " + ex.what());
  }

  Database db;
  try {
    db.format_version = root.at("format_version").get<int>();
    db.title = str_or(root, "title");

    const json& cls = root.at("class");
    db.class_display = str_or(cls, "display");
    db.class_assumptions = str_or(cls, "assumptions");
    db.class_delta = parse_at(cls.at("delta"), "class.delta");
    db.class_slots = strings_or(cls, "slots");

    const json& zp = root.at("zero_policy");
    db.zero.trials = zp.at("trials").get<int>();
    db.zero.seed = static_cast<std::uint64_t>(zp.at("seed").get<long long>());
    db.zero.zero_tol = zp.at("zero_tol").get<double>();
    db.zero.nonzero_tol = zp.at("nonzero_tol").get<double>();
    db.zero.grid_tol = zp.at("grid_tol").get<double>();
    db.zero.grid_points = zp.at("grid_points").get<int>();

    const json& kn = root.at("kernel");
    db.kernel_basis = fields_or(kn, "basis", "kernel");
    db.kernel_note = str_or(kn, "note");
    db.kernel_trials = kn.value("random_instance_trials", 50);

    const json& det = root.at("determining");
    db.determining.display_raw = strings_or(det, "display_raw");
    db.determining.display_reduced = strings_or(det, "display_reduced");
    db.determining.identity_note = str_or(det, "identity_note");
    for (const auto& [mono, coeff] : det.at("split_monomials").items())
      db.determining.split.emplace_back(
          parse_at(json(mono), "determining.split." + mono),
          parse_at(coeff, "determining.split." + mono));

    for (const auto& t : root.at("equivalence_theorems"))
      db.equivalence_theorems.push_back(theorem_at(t));
    for (const auto& t : root.at("gauge_maps"))
      db.gauge_maps.push_back(theorem_at(t));
    for (const auto& t : root.at("involutions")) {
      InvolutionDoc doc;
      doc.id = t.at("id").get<std::string>();
      doc.flip = strings_or(t, "flip");
      db.involutions.push_back(std::move(doc));
    }

    db.symmetry_tables = tables_at(root.at("symmetry_tables"));

    for (const auto& a : root.at("additional_equivalences")) {
      EquivalenceCert cert;
      cert.id = a.at("id").get<std::string>();
      cert.display = str_or(a, "display");
      cert.notes = str_or(a, "notes");
      cert.expect_pass = expect_pass_of(a, cert.id);

      auto resolve = [&](const json& side, const std::string& w,
                         PDEInstance& slots, std::vector<VectorField>& basis,
                         RuleSet& rules, std::string& row_id) {
        const NamedExprs bind = named_or(side, "bind", w);
        if (side.contains("row")) {
          row_id = side.at("row").get<std::string>();
          const SymmetryRow* row = nullptr;
          for (const auto& t : db.symmetry_tables)
            for (const auto& r : t.rows)
              if (r.id == row_id) row = &r;
          if (!row) fail(w, "unknown row id " + row_id);
          slots = apply_named(apply_named(row->slots, row->subst), bind);
          basis.clear();
          for (const auto& q : row->basis)
            basis.push_back(apply_named(apply_named(q, row->subst), bind));
          rules = row->rules;
        } else {
          slots = apply_named(slots_at(side.at("slots"), w + ".slots"), bind);
          basis.clear();
          for (auto& q : fields_or(side, "basis", w))
            basis.push_back(apply_named(q, bind));
        }
      };
      resolve(a.at("source"), cert.id + ".source", cert.source,
              cert.source_basis, cert.source_rules, cert.source_row);
      resolve(a.at("target"), cert.id + ".target", cert.target,
              cert.target_basis, cert.target_rules, cert.target_row);

      const json& m = a.at("map");
      cert.map_t = parse_at(m.at("t"), cert.id + ".map.t");
      cert.map_x = parse_at(m.at("x"), cert.id + ".map.x");
      cert.map_u = parse_at(m.at("u"), cert.id + ".map.u");
      db.equivalences.push_back(std::move(cert));
    }

    for (const auto& t : root.at("reduction_tables")) {
      ReductionTable tbl;
      tbl.id = t.at("id").get<std::string>();
      tbl.display = str_or(t, "display");
      tbl.equation = slots_at(t.at("equation"), tbl.id + ".equation");
      const json& alg = t.at("algebra");
      tbl.algebra_basis = fields_or(alg, "basis", tbl.id + ".algebra");
      for (const auto& p : alg.at("pins")) {
        AlgebraPin pin;
        pin.i = p.at("i").get<int>();
        pin.j = p.at("j").get<int>();
        for (const auto& [k, v] : p.at("coeffs").items())
          pin.coeffs.emplace_back(
              std::stoi(k), parse_at(v, tbl.id + ".algebra.pins"));
        tbl.pins.push_back(std::move(pin));
      }
      for (const auto& r : t.at("rows")) {
        ReductionRow row;
        row.id = r.at("id").get<std::string>();
        const std::string w = tbl.id + "." + row.id;
        row.operators = fields_or(r, "operators", w);
        row.defs = named_or(r, "defs", w);
        row.bind = named_or(r, "bind", w);
        if (r.contains("invariant"))
          row.invariant = parse_at(r.at("invariant"), w + ".invariant");
        if (r.contains("ansatz"))
          row.ansatz = parse_at(r.at("ansatz"), w + ".ansatz");
        if (r.contains("ansatz_xu"))
          row.ansatz_xu = parse_at(r.at("ansatz_xu"), w + ".ansatz_xu");
        row.ode = parse_at(r.at("ode"), w + ".ode");
        row.multiplier = parse_at(r.at("multiplier"), w + ".multiplier");
        row.constraints = strings_or(r, "constraints");
        row.status = str_or(r, "status", "ok");
        row.controls = controls_or(r, w);
        tbl.rows.push_back(std::move(row));
      }
      db.reductions.push_back(std::move(tbl));
    }

    for (const auto& s : root.at("solutions")) {
      SolutionEntry sol;
      sol.id = s.at("id").get<std::string>();
      sol.display = str_or(s, "display");
      sol.notes = str_or(s, "notes");
      sol.status = str_or(s, "status", "ok");
      sol.special = str_or(s, "special");
      sol.equation = slots_at(s.at("equation"), sol.id + ".equation");
      sol.u = parse_at(s.at("u"), sol.id + ".u");
      if (s.contains("arg"))
        for (const auto& [k, v] : s.at("arg").items())
          sol.arg.emplace_back(k, parse_at(v, sol.id + ".arg." + k));
      sol.rules = rules_or(s, "rules", sol.id);
      sol.gated = bool_or(s, "gated", true);
      if (s.contains("grid")) {
        const json& g = s.at("grid");
        sol.grid_binds = named_or(g, "binds", sol.id + ".grid");
        const json& box = g.at("box");
        sol.t_lo = box.at("t")[0].get<double>();
        sol.t_hi = box.at("t")[1].get<double>();
        sol.x_lo = box.at("x")[0].get<double>();
        sol.x_hi = box.at("x")[1].get<double>();
      }
      db.solutions.push_back(std::move(sol));
    }

    const json& nc = root.at("nonclassical");
    db.nonclassical.equation = slots_at(nc.at("equation"), "nonclassical.equation");
    db.nonclassical.lie_basis = fields_or(nc, "lie_basis", "nonclassical");
    for (const auto& o : nc.at("operators")) {
      NonclassicalOperator op;
      op.id = o.at("id").get<std::string>();
      op.kind = str_or(o, "kind", "strictly-conditional");
      op.display = str_or(o, "display");
      op.q = field_at(o, op.id);
      op.rules = rules_or(o, "rules", op.id);
      op.gated = bool_or(o, "gated", true);
      db.nonclassical.operators.push_back(std::move(op));
    }
    db.nonclassical.controls = controls_or(nc, "nonclassical");
    if (nc.contains("display")) {
      db.nonclassical.display_regular =
          strings_or(nc.at("display"), "regular_system");
      db.nonclassical.display_tau0 = strings_or(nc.at("display"), "tau0_system");
    }
    const json& sing = nc.at("singularity");
    db.nonclassical.singularity_display = str_or(sing, "display");
    db.nonclassical.oracle_trials = sing.value("oracle_trials", 100);
    db.nonclassical.oracle_seed =
        static_cast<std::uint64_t>(sing.value("seed", 20260819LL));

    const json& cv = root.at("conservation");
    const json& st = cv.at("structure");
    db.conservation.density_display = str_or(st, "density");
    db.conservation.flux_display = str_or(st, "flux");
    db.conservation.lambda_display = str_or(st, "lambda");
    db.conservation.classifying_display = str_or(st, "classifying");
    db.conservation.structure_display = str_or(st, "display");
    if (st.contains("generic_identity")) {
      db.conservation.generic_identity_display =
          str_or(st.at("generic_identity"), "display");
      db.conservation.generic_beta_atom =
          str_or(st.at("generic_identity"), "beta", "sigma");
    }
    if (st.contains("linear_beta_pattern"))
      db.conservation.linear_beta_display =
          str_or(st.at("linear_beta_pattern"), "display");
    db.conservation.mutation_controls = cv.value("mutation_controls", 10);
    for (const auto& t : cv.at("tables")) {
      ConservationTable tbl;
      tbl.id = t.at("id").get<std::string>();
      tbl.display = str_or(t, "display");
      for (const auto& r : t.at("rows")) {
        ConservationRow row;
        row.id = r.at("id").get<std::string>();
        const std::string w = tbl.id + "." + row.id;
        row.kind = str_or(r, "kind", "row");
        row.status = str_or(r, "status", "ok");
        row.notes = str_or(r, "notes");
        row.gated = bool_or(r, "gated", true);
        row.same_as = str_or(r, "same_as");
        if (r.contains("reconstruct")) {
          const json& rc = r.at("reconstruct");
          row.reconstruct_from = rc.at("source").get<std::string>();
          row.reconstruct_eps = parse_at(rc.at("eps"), w + ".reconstruct.eps");
        }
        if (r.contains("slots")) row.slots = slots_at(r.at("slots"), w + ".slots");
        row.binds = named_or(r, "binds", w);
        row.rules = rules_or(r, "rules", w);
        row.betas = exprs_or(r, "betas", w);
        row.derived = named_or(r, "derived", w);
        row.positive = exprs_or(r, "positive", w);
        row.controls = controls_or(r, w);
        tbl.rows.push_back(std::move(row));
      }
      db.conservation.tables.push_back(std::move(tbl));
    }

    const json& ap = root.at("appendix");
    db.appendix_display = str_or(ap, "display");
    db.appendix_note = str_or(ap, "column_note");
    db.appendix_tables = tables_at(ap.at("tables"));

    for (const auto& p : root.at("presets")) {
      Preset preset;
      preset.id = p.at("id").get<std::string>();
      preset.display = str_or(p, "display");
      preset.notes = str_or(p, "notes");
      preset.slots = slots_at(p.at("slots"), preset.id + ".slots");
      db.presets.push_back(std::move(preset));
    }
  } catch (const DbError&) {
    throw;
  } catch (const std::exception& ex) {
    throw DbError(std::string("database structure error: ") + ex.what());
  }
  return db;
}

} // namespace telsym
