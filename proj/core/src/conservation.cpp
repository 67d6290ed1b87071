#include "telsym/conservation.hpp"

#include "telsym/calculus.hpp"
#include "telsym/parse.hpp"
#include "telsym/printer.hpp"
#include "telsym/symmetry_check.hpp"

namespace telsym {

namespace {

Expr u_t() { return jet_var(JetVar{1, 0}); }
Expr u_x() { return jet_var(JetVar{0, 1}); }

// Generic family member with the g slot pinned to 1, the gauge the
// conservation tables are stated in.
Expr delta_g1() {
  Expr d = PDEInstance::generic().delta();
  return substitute(d, {{"g", Expr::integer(1)}});
}

Expr pipeline(const Expr& e, const PDEInstance& slots, const NamedExprs& binds,
              const RuleSet& rules) {
  Expr r = substitute(e, instance_bindings(slots));
  r = apply_named(r, binds);
  if (!rules.deriv.empty() || !rules.power.empty()) r = rewrite(r, rules);
  return r;
}

// Rows whose zero tests rely on numerically derived parameters (complex
// mode frequencies, eigenvalues) cannot reach a structural zero; for all
// others the divergence identity must be proved, not sampled.
CheckResult graded_zero(std::string id, std::string kind, const Expr& e,
                        const ZeroOptions& opt, bool allow_numeric) {
  const auto zr = test_zero(e, opt);
  CheckResult c = from_zero(std::move(id), std::move(kind), zr);
  if (c.ok && !allow_numeric && zr.verdict != Verdict::ProvedZero) {
    c.ok = false;
    c.detail = "expected a structural zero";
  }
  return c;
}

} // namespace

ConservedBundle conserved_bundle(const Expr& beta) {
  const Expr f = parse("f"), h = parse("h"), H = parse("H"), K = parse("K");
  const Expr IntH = parse("IntH"), IntK = parse("IntK");
  ConservedBundle b;
  b.density = beta * f * u_t() - Dt(beta) * f * dep_u();
  b.flux = -beta * H * u_x() + Dx(beta) * IntH - beta * h * IntK;
  b.lambda = beta;
  b.classifying = Dx(Dx(beta)) * H - Dx(beta * h) * K - Dt(Dt(beta)) * f;
  return b;
}

Report check_generic_divergence_identity(const ZeroPolicy& policy) {
  Report rep("divergence-identity");
  const ZeroOptions opt = zero_options(policy);
  const Expr sigma = parse("sigma");
  const Expr f = parse("f"), h = parse("h");
  const Expr IntH = parse("IntH"), IntK = parse("IntK");
  const ConservedBundle b = conserved_bundle(sigma);
  const Expr remainder = Dt(Dt(sigma)) * f * dep_u() -
                         Dx(Dx(sigma)) * IntH + Dx(sigma * h) * IntK;
  const Expr r =
      Dt(b.density) + Dx(b.flux) - b.lambda * delta_g1() + remainder;
  const auto zr = test_zero(r, opt);
  CheckResult c = from_zero("generic-multiplier", "structural-identity", zr);
  if (c.ok && zr.verdict != Verdict::ProvedZero) {
    c.ok = false;
    c.detail = "expected a structural zero";
  }
  rep.add(std::move(c));
  return rep;
}

namespace {

// Divergence and classifying checks of one concrete (slots, multiplier) row.
void check_multipliers(Report& rep, const std::string& id,
                       const PDEInstance& slots, const ConservationRow& row,
                       const ZeroPolicy& policy) {
  const bool allow_numeric = !row.derived.empty();
  const ZeroOptions opt = zero_options(policy, row.positive, row.derived);
  const Expr delta = delta_g1();
  for (size_t i = 0; i < row.betas.size(); ++i) {
    const ConservedBundle b = conserved_bundle(row.betas[i]);
    const Expr div = Dt(b.density) + Dx(b.flux) - b.lambda * delta;
    rep.add(graded_zero(id + "#" + std::to_string(i + 1), "divergence",
                        pipeline(div, slots, row.binds, row.rules), opt,
                        allow_numeric));
    rep.add(graded_zero(id + "#" + std::to_string(i + 1), "classifying",
                        pipeline(b.classifying, slots, row.binds, row.rules),
                        opt, allow_numeric));
  }
  for (size_t i = 0; i < row.controls.size(); ++i) {
    const DbControl& ctl = row.controls[i];
    if (!ctl.beta) continue;
    const ConservedBundle b = conserved_bundle(*ctl.beta);
    const Expr div = Dt(b.density) + Dx(b.flux) - b.lambda * delta;
    const auto zr =
        test_zero(pipeline(div, slots, row.binds, row.rules), opt);
    rep.add(from_zero(id + "!" + std::to_string(i + 1),
                      "control(" + ctl.kind + ")", zr, ctl.expect_pass));
  }
}

// Image-row certificate in source coordinates. The image chart stretches x
// by E = ExpIntH (dx_image/dx = E, so d/dx_image = (1/E) Dx), and the image
// member's slots are f/E^2, h/E, K + eps*H with multiplier beta*E and
// antiderivative IntK + eps*IntH. The residual is stated entirely through
// the source jet.
void check_reconstructed(Report& rep, const ConservationRow& row,
                         const ConservationRow& src, const Expr& eps_value,
                         const ZeroPolicy& policy) {
  const Expr E = parse("ExpIntH");
  const Expr Einv = pow_int(E, -1);
  const Expr f = parse("f"), h = parse("h"), H = parse("H"), K = parse("K");
  const Expr IntH = parse("IntH"), IntK = parse("IntK");
  const Expr eps = parse("eps");
  const Expr f_img = f * pow_int(E, -2);
  const Expr h_img = h * Einv;
  const Expr K_img = K + eps * H;
  const Expr IntK_img = IntK + eps * IntH;

  const bool allow_numeric = !src.derived.empty();
  const ZeroOptions opt = zero_options(policy, src.positive, src.derived);
  NamedExprs binds = src.binds;
  if (!normal_equal(eps_value, eps)) binds.emplace_back("eps", eps_value);

  const Expr delta = delta_g1();
  for (size_t i = 0; i < src.betas.size(); ++i) {
    const Expr beta_img = src.betas[i] * E;
    const Expr density =
        beta_img * f_img * u_t() - Dt(beta_img) * f_img * dep_u();
    const Expr flux = -beta_img * H * Einv * u_x() +
                      (Einv * Dx(beta_img)) * IntH - beta_img * h_img * IntK_img;
    // Image equation pulled back to the source chart is E^{-2} Delta.
    const Expr div = Dt(density) + Einv * Dx(flux) -
                     beta_img * pow_int(E, -2) * delta;
    rep.add(graded_zero(row.id + "#" + std::to_string(i + 1),
                        "divergence(image)",
                        pipeline(div, src.slots, binds, src.rules), opt,
                        allow_numeric));
    const Expr cls = Einv * Dx(Einv * Dx(beta_img)) * H -
                     Einv * Dx(beta_img * h_img) * K_img -
                     Dt(Dt(beta_img)) * f_img;
    rep.add(graded_zero(row.id + "#" + std::to_string(i + 1),
                        "classifying(image)",
                        pipeline(cls, src.slots, binds, src.rules), opt,
                        allow_numeric));
  }
}

} // namespace

Report check_conservation_row(const Database& db, const ConservationRow& row,
                              const ZeroPolicy& policy) {
  Report rep(row.id);
  if (!row.same_as.empty()) {
    const ConservationRow* src = db.find_conservation_row(row.same_as);
    if (!src) {
      rep.add({row.id, "resolve", false, "MissingRow",
               0.0, "duplicate source " + row.same_as + " not found"});
      return rep;
    }
    check_multipliers(rep, row.id, src->slots, *src, policy);
    return rep;
  }
  if (!row.reconstruct_from.empty()) {
    const ConservationRow* src =
        db.find_conservation_row(row.reconstruct_from);
    if (!src || !row.reconstruct_eps) {
      rep.add({row.id, "resolve", false, "MissingRow", 0.0,
               "reconstruction source " + row.reconstruct_from +
                   " not found"});
      return rep;
    }
    check_reconstructed(rep, row, *src, *row.reconstruct_eps, policy);
    return rep;
  }
  check_multipliers(rep, row.id, row.slots, row, policy);
  return rep;
}

Report check_conservation_mutations(const Database& db) {
  Report rep("multiplier-mutations");
  // Pinned (row, perturbation) pairs; each perturbed multiplier must fail
  // the classifying condition decisively.
  const std::pair<const char*, const char*> muts[] = {
      {"C1.1", "x^3"},  {"C1.2", "t^3"},    {"C1.3", "t*x^2"},
      {"C1.4", "x^3"},  {"C1.5a", "t^3"},   {"C1.5b", "x^3"},
      {"C1.5c", "t*x^2"}, {"C1.5d", "x^3"}, {"C1.6a", "t^3"},
      {"C1.6b", "t*x^2"}};
  for (const auto& [rid, delta_text] : muts) {
    const ConservationRow* row = db.find_conservation_row(rid);
    if (!row || row->betas.empty()) {
      rep.add({rid, "mutation", false, "MissingRow", 0.0,
               "pinned mutation row not found"});
      continue;
    }
    const Expr beta_mut = row->betas[0] + parse(delta_text);
    const ConservedBundle b = conserved_bundle(beta_mut);
    const ZeroOptions opt =
        zero_options(db.zero, row->positive, row->derived);
    const auto zr = test_zero(
        pipeline(b.classifying, row->slots, row->binds, row->rules), opt);
    rep.add(from_zero(std::string(rid) + "+" + delta_text,
                      "mutation(classifying)", zr, /*expect_pass=*/false));
  }
  return rep;
}

Report check_conservation(const Database& db) {
  Report rep("conservation");
  rep.merge(check_generic_divergence_identity(db.zero));
  for (const auto& table : db.conservation.tables)
    for (const auto& row : table.rows)
      rep.merge(check_conservation_row(db, row, db.zero));
  rep.merge(check_conservation_mutations(db));
  return rep;
}

} // namespace telsym
