#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hconv/checks.hpp"
#include "hconv/field_io.hpp"
#include "hconv/parallel.hpp"
#include "hconv/specfun.hpp"
#include "hconv/spectral.hpp"
#include "hconv/typeset.hpp"

namespace hconv::cli {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void emit(CommandResult& r, const Dir& out, const std::string& name, const std::string& content) {
  write_atomic(out / name, content);
  r.outputs.push_back(name);
}

Check at_most(std::string name, double achieved, double threshold, std::string detail = {}) {
  return {std::move(name), achieved <= threshold, achieved, threshold, std::move(detail)};
}

std::string join(const MultiIndex& alpha) {
  std::string s;
  for (std::size_t i = 0; i < alpha.size(); ++i) s += (i ? " " : "") + std::to_string(alpha[i]);
  return s;
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

CommandResult cmd_verify_transforms(const RunConfig& c, const Dir& out) {
  CommandResult r;
  const auto xis = symmetric_grid(c.transform_xi_extent, c.transform_xi_count);
  const auto rows = transform_sweep(c.transform_nmax, c.transform_kmax, xis, c.transform_quad_tol, c.workers);
  Csv csv({"n", "k", "xi", "closed_re", "closed_im", "quadrature_re", "quadrature_im", "relerr"});
  double worst = 0.0;
  for (const auto& t : rows) {
    csv.add(t.n).add(t.k).add(t.xi).add(t.closed.real()).add(t.closed.imag());
    csv.add(t.quadrature.real()).add(t.quadrature.imag()).add(t.relerr);
    csv.end_row();
    worst = std::max(worst, t.relerr);
  }
  emit(r, out, "transform.csv", csv.str());
  r.checks.push_back(at_most("transform_relerr", worst, c.transform_tol, std::to_string(rows.size()) + " rows"));

  // n = 1: |F^_{1,k}(xi)| = (1/4 + xi^2)^{-1/2} for every k.
  Csv mod({"k", "xi", "modulus", "expected", "gap"});
  double gap = 0.0;
  for (int k = 0; k <= c.modulus_kmax; ++k) {
    for (double xi : xis) {
      const double m = std::abs(F_nk_hat(1, k, xi));
      const double e = 1.0 / std::sqrt(0.25 + xi * xi);
      mod.add(k).add(xi).add(m).add(e).add(std::abs(m - e));
      mod.end_row();
      gap = std::max(gap, std::abs(m - e));
    }
  }
  emit(r, out, "modulus.csv", mod.str());
  r.checks.push_back(at_most("n1_modulus_gap", gap, c.modulus_tol));
  return r;
}

CommandResult cmd_spectral_bounds(const RunConfig& c, const Dir& out) {
  CommandResult r;
  const auto gm = c.measure();
  if (c.phase == "quadratic") {
    MuSweepSpec spec;
    spec.gm = gm;
    for (double y : c.spectral_z_imag) spec.z.emplace_back(-c.n, y);
    spec.N = c.spectral_N;
    spec.alpha_max = c.spectral_alpha_max;
    spec.lambdas = signed_log_grid(c.spectral_lambda_lo, c.spectral_lambda_hi, c.spectral_lambda_per_sign);
    spec.workers = c.workers;
    const auto rows = mu_sweep(spec);
    // One summary row per (z, N); the full table is |alpha| * |lambda| times larger.
    Csv csv({"re_z", "im_z", "N", "entries", "bound", "max_magnitude", "max_ratio", "argmax_alpha", "argmax_lambda"});
    double worst = 0.0;
    for (const Complex z : spec.z) {
      for (int N : spec.N) {
        const MuSweepRow* best = nullptr;
        long long count = 0;
        for (const auto& row : rows) {
          if (row.z != z || row.N != N) continue;
          ++count;
          if (!best || row.ratio > best->ratio) best = &row;
        }
        if (!best) continue;
        csv.add(z.real()).add(z.imag()).add(N).add(count).add(best->bound).add(best->magnitude).add(best->ratio);
        csv.add(join(best->alpha)).add(best->lambda);
        csv.end_row();
        worst = std::max(worst, best->ratio);
      }
    }
    emit(r, out, "mu_bounds.csv", csv.str());
    r.checks.push_back(at_most("mu_ratio", worst, 1.0, std::to_string(rows.size()) + " entries"));
  }

  std::vector<VanDerCorputFit> fits(c.vdc_m.size());
  parallel_for(fits.size(), c.workers, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) fits[i] = van_der_corput_fit(c.vdc_m[i], c.vdc_count);
  });
  Csv vdc({"m", "lambda", "sup", "normalized"});
  Csv slopes({"m", "slope", "expected", "r2", "trend"});
  for (const auto& f : fits) {
    for (std::size_t i = 0; i < f.lambdas.size(); ++i) {
      vdc.add(f.m).add(f.lambdas[i]).add(f.sups[i]).add(f.normalized[i]);
      vdc.end_row();
    }
    const double expected = (f.m - 1.0) / f.m;
    slopes.add(f.m).add(f.slope).add(expected).add(f.r2).add(f.trend);
    slopes.end_row();
    const std::string tag = "m" + std::to_string(f.m);
    r.checks.push_back(at_most("vdc_slope_" + tag, std::abs(f.slope - expected), c.vdc_tol,
                               "slope " + format_double(f.slope)));
    r.checks.push_back(at_most("vdc_trend_" + tag, f.trend, c.vdc_tol, "r2 " + format_double(f.r2)));
  }
  emit(r, out, "vdc.csv", vdc.str());
  emit(r, out, "vdc_slopes.csv", slopes.str());

  if (c.phase == "power" && c.n >= 2 && c.m >= 2) {
    // Uniform bound on the critical line Re z = -(n + (1 - m)/m).
    std::vector<double> lams;
    for (std::size_t i = 0; i < fits.size(); ++i) {
      if (c.vdc_m[i] == c.m) lams = fits[i].lambdas;
    }
    if (lams.empty()) lams = van_der_corput_fit(c.m, c.vdc_count).lambdas;
    const double cm = van_der_corput_constant(c.m, lams);
    const auto grid = signed_log_grid(c.spectral_lambda_lo, c.spectral_lambda_hi, c.upsilon_lambda_per_sign);
    struct Job {
      Complex z;
      int N, k;
      double lambda;
      double ratio = 0.0;
    };
    std::vector<Job> jobs;
    std::vector<double> denom;
    for (double y : c.spectral_z_imag) {
      const Complex z(-(c.n + (1.0 - c.m) / c.m), y);
      for (int N : c.spectral_N) {
        for (int k = 0; k <= c.upsilon_k_max; ++k) {
          for (double lam : grid) jobs.push_back({z, N, k, lam});
        }
      }
    }
    const CutoffSpec cutoff = gm.cutoffs.front();
    parallel_for(jobs.size(), c.workers, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        auto& j = jobs[i];
        const double d = upsilon_uniform_constant(j.z, c.n, cm, cutoff) * std::abs(rgamma(0.5 * (1.0 - j.z)));
        j.ratio = std::abs(upsilon_entry(j.z, j.N, j.k, j.lambda, c.m, c.n, cutoff).value) / d;
      }
    });
    Csv csv({"re_z", "im_z", "N", "k", "lambda", "ratio"});
    double worst = 0.0;
    for (const auto& j : jobs) {
      csv.add(j.z.real()).add(j.z.imag()).add(j.N).add(j.k).add(j.lambda).add(j.ratio);
      csv.end_row();
      worst = std::max(worst, j.ratio);
    }
    emit(r, out, "upsilon_bounds.csv", csv.str());
    r.checks.push_back(at_most("upsilon_ratio", worst, 1.0, "C_m " + format_double(cm)));
  }
  return r;
}

CommandResult cmd_scaling(const RunConfig& c, const Dir& out) {
  CommandResult r;
  const auto gm = c.measure();
  const auto ctx = c.context();
  const auto ladder = c.ladder(ctx);
  // Both sample sets depend only on the measure and the ladder, not on (p, q).
  const auto primary = sample_scaling(gm, ladder, ctx, false);
  const auto dual = sample_scaling(gm, ladder, ctx, true);

  Csv csv({"ip", "iq", "side", "fitted", "predicted", "r2", "fit_ok"});
  double worst = 0.0;
  for (const auto& p : c.scaling_points) {
    const TypePoint pt{p[0], p[1]};
    const auto f = fit_exponent(primary, pt.ip, pt.iq);
    const double pred = predicted_exponent(c.n, pt);
    csv.add(pt.ip).add(pt.iq).add("primary").add(f.exponent).add(pred).add(f.r2).add(f.ok);
    csv.end_row();
    const TypePoint d = dual_point(pt);
    const auto g = fit_exponent(dual, d.ip, d.iq);
    csv.add(pt.ip).add(pt.iq).add("dual").add(g.exponent).add(predicted_dual_exponent(c.n, pt)).add(g.r2).add(g.ok);
    csv.end_row();
    worst = std::max(worst, std::abs(f.exponent - pred));
  }
  emit(r, out, "scaling.csv", csv.str());
  r.checks.push_back(at_most("scaling_exponent_gap", worst, c.scaling_tol));

  Csv inf({"delta", "spacing", "f_measure", "infimum"});
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& level : primary.levels) {
    inf.add(level.delta).add(level.spacing).add(level.f_measure).add(level.infimum);
    inf.end_row();
    lo = std::min(lo, level.infimum);
    hi = std::max(hi, level.infimum);
  }
  emit(r, out, "infimum.csv", inf.str());
  r.checks.push_back({"infimum_positive", lo > 0.0, lo, 0.0, "min over the ladder of T f_delta / delta^(2n)"});
  r.checks.push_back(at_most("infimum_variation", lo > 0.0 ? hi / lo : kNaN, 2.0));

  if (!c.dump_fields) return r;
  // T f for f the indicator of the Euclidean ball of radius ladder.deltas[0], on the base grid.
  const double rad = ladder.deltas.front();
  const auto f = SampledField<double>::from_function(ctx.grid, [&](const double* x) {
    double s = 0.0;
    for (int a = 0; a < ctx.grid.dims(); ++a) s += x[a] * x[a];
    return s <= rad * rad ? 1.0 : 0.0;
  });
  std::filesystem::create_directories(out / "fields");
  write_field(f, out / "fields" / "f_delta");
  write_field(apply_Tnu(f, gm, ctx.q, c.workers), out / "fields" / "tnu_f_delta");
  for (const char* stem : {"f_delta", "tnu_f_delta"}) {
    r.outputs.push_back(std::string("fields/") + stem + ".json");
    r.outputs.push_back(std::string("fields/") + stem + ".bin");
  }
  return r;
}

CommandResult cmd_scan(const RunConfig& c, const Dir& out) {
  CommandResult r;
  const auto gm = c.measure();
  const auto ctx = c.context();
  const auto ladder = c.ladder(ctx);
  const auto points = square_grid(c.scan_k);
  auto results = scan(points, gm, ladder, ctx, ScanOptions{false});

  if (c.norm_bounds) {
    auto nctx = ctx;
    nctx.grid = Grid::box(c.n, 4.0, 8.0, c.norm_points_x, c.norm_points_t);
    nctx.workers = 1;
    parallel_for(results.size(), c.workers, [&](std::size_t b, std::size_t e) {
      for (std::size_t i = b; i < e; ++i) {
        const auto& pt = results[i].point;
        const bool interior = pt.ip > 0.0 && pt.ip < 1.0 && pt.iq > 0.0 && pt.iq < 1.0;
        if (!interior || !results[i].error.empty()) continue;
        try {
          results[i].norm_lb = pq_norm_lower_bound(pt, gm, nctx, c.norm_iterations).value;
        } catch (const Error& err) {
          results[i].error = err.what();
        }
      }
    });
  }

  const bool thm2 = c.phase == "power";
  const auto tri1 = thm1_triangle(c.n);
  std::vector<std::string> head{"ip", "iq", "fitted", "predicted", "norm_lb", "inside_thm1"};
  if (thm2) head.push_back("inside_thm2");
  head.push_back("r2");
  Csv csv(head);
  Csv plot({"ip", "iq", "fitted", "predicted", "residual", "fitted_primary", "fitted_dual", "predicted_primary",
            "predicted_dual", "norm_lb", "inside_thm1", "fit_ok", "violates_p_le_q"});
  json rows = json::array();
  int failures = 0, mismatched = 0;
  double gap = 0.0;
  for (const auto& s : results) {
    const bool inside2 = s.inside_thm2.value_or(false);
    csv.add(s.point.ip).add(s.point.iq).add(s.fitted).add(s.predicted).add(s.norm_lb).add(s.inside_thm1);
    if (thm2) csv.add(inside2);
    csv.add(s.r2);
    csv.end_row();
    plot.add(s.point.ip).add(s.point.iq).add(s.fitted).add(s.predicted).add(s.fitted - s.predicted);
    plot.add(s.fitted_primary).add(s.fitted_dual).add(s.predicted_primary).add(s.predicted_dual).add(s.norm_lb);
    plot.add(s.inside_thm1).add(s.fit_ok).add(s.violates_p_le_q);
    plot.end_row();
    json row = {{"ip", s.point.ip},
                {"iq", s.point.iq},
                {"fitted", num(s.fitted)},
                {"predicted", num(s.predicted)},
                {"fitted_primary", num(s.fitted_primary)},
                {"fitted_dual", num(s.fitted_dual)},
                {"predicted_primary", num(s.predicted_primary)},
                {"predicted_dual", num(s.predicted_dual)},
                {"norm_lb", num(s.norm_lb)},
                {"r2", num(s.r2)},
                {"fit_ok", s.fit_ok},
                {"inside_thm1", s.inside_thm1},
                {"violates_p_le_q", s.violates_p_le_q},
                {"infimum", s.infimum},
                {"error", s.error}};
    if (s.inside_thm2) row["inside_thm2"] = *s.inside_thm2;
    rows.push_back(std::move(row));
    failures += !s.error.empty();
    mismatched += s.inside_thm1 != contains(tri1, s.point);
    if (s.error.empty()) gap = std::max(gap, std::abs(s.fitted - s.predicted));
  }
  emit(r, out, "scan.csv", csv.str());
  emit(r, out, "scan_plot.csv", plot.str());
  json doc = {{"n", c.n}, {"phase", c.phase}, {"config", c.to_json()}, {"config_hash", c.hash()}, {"results", rows}};
  doc["config"].erase("out");
  doc["config"].erase("workers");
  emit(r, out, "scan.json", doc.dump(2) + "\n");
  r.checks.push_back(at_most("scan_point_errors", failures, 0, std::to_string(results.size()) + " points"));
  r.checks.push_back(at_most("thm1_membership_mismatch", mismatched, 0));
  // Endpoint fits (p = 1 or q = infinity) are resolution-limited, so this one only informs.
  auto info = at_most("exponent_gap", gap, c.scaling_tol, "max |fitted - predicted| over the grid");
  info.informational = true;
  r.checks.push_back(info);
  return r;
}

CommandResult cmd_kernel_decay(const RunConfig& c, const Dir& out) {
  CommandResult r;
  struct DecayJob {
    Complex z;
    int N;
    DecayProfile profile;
  };
  std::vector<DecayJob> decay;
  for (double re : c.decay_re)
    for (double im : c.decay_im)
      for (int N : c.decay_N) decay.push_back({Complex(re, im), N, {}});
  struct AgreeJob {
    Complex z;
    int N;
    double gap = 0.0;
  };
  std::vector<AgreeJob> agree;
  for (double re : c.agreement_re)
    for (double im : c.agreement_im)
      for (int N : c.decay_N) agree.push_back({Complex(re, im), N});

  const std::size_t total = decay.size() + agree.size();
  parallel_for(total, c.workers, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      if (i < decay.size()) {
        decay[i].profile = kernel_decay_profile(decay[i].z, decay[i].N, c.decay_s_max);
      } else {
        auto& j = agree[i - decay.size()];
        j.gap = path_agreement(j.z, j.N, -c.agreement_extent, c.agreement_extent, c.agreement_step);
      }
    }
  });

  Csv prof({"re_z", "im_z", "N", "s", "ratio"});
  Csv summary({"re_z", "im_z", "N", "first", "last", "sup", "limit", "bounded"});
  int unbounded = 0;
  for (const auto& j : decay) {
    const auto& p = j.profile;
    for (std::size_t i = 0; i < p.s.size(); ++i) {
      prof.add(j.z.real()).add(j.z.imag()).add(j.N).add(p.s[i]).add(p.ratio[i]);
      prof.end_row();
    }
    summary.add(j.z.real()).add(j.z.imag()).add(j.N).add(p.ratio.front()).add(p.ratio.back()).add(p.sup);
    summary.add(p.limit).add(p.bounded);
    summary.end_row();
    unbounded += !p.bounded;
  }
  emit(r, out, "decay.csv", prof.str());
  emit(r, out, "decay_summary.csv", summary.str());
  r.checks.push_back(at_most("decay_unbounded_profiles", unbounded, 0, std::to_string(decay.size()) + " profiles"));

  Csv ag({"re_z", "im_z", "N", "max_relative_gap"});
  double worst = 0.0;
  for (const auto& j : agree) {
    ag.add(j.z.real()).add(j.z.imag()).add(j.N).add(j.gap);
    ag.end_row();
    worst = std::max(worst, j.gap);
  }
  emit(r, out, "path_agreement.csv", ag.str());
  r.checks.push_back(at_most("path_agreement", worst, c.agreement_tol));
  return r;
}

CommandResult cmd_plancherel(const RunConfig& c, const Dir& out) {
  CommandResult r;
  const auto kernels = standard_plancherel_kernels();
  std::vector<PlancherelResult> res(kernels.size());
  parallel_for(kernels.size(), c.workers, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) res[i] = plancherel_ratio(kernels[i]);
  });
  Csv csv({"kernel", "ratio", "kernel_norm2", "entry_integral", "alpha_max", "lambda_hi", "small_lambda_tail"});
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t i = 0; i < res.size(); ++i) {
    const auto& p = res[i];
    csv.add(kernels[i].name).add(p.ratio).add(p.kernel_norm2).add(p.entry_integral).add(p.alpha_max);
    csv.add(p.lambda_hi).add(p.small_lambda_tail);
    csv.end_row();
    lo = std::min(lo, p.ratio);
    hi = std::max(hi, p.ratio);
  }
  emit(r, out, "plancherel.csv", csv.str());
  r.checks.push_back(at_most("plancherel_spread", hi / lo - 1.0, c.plancherel_tol, "max/min - 1 over kernels"));
  return r;
}

CommandResult cmd_group_selftest(const RunConfig& c, const Dir& out) {
  CommandResult r;
  const auto g = group_selftest(c.group_triples, c.group_seed);
  Csv csv({"triples", "seed", "max_associativity", "max_inverse", "max_identity"});
  csv.add(g.triples).add(static_cast<long long>(c.group_seed)).add(g.max_associativity).add(g.max_inverse);
  csv.add(g.max_identity);
  csv.end_row();
  emit(r, out, "group.csv", csv.str());
  r.checks.push_back(at_most("associativity", g.max_associativity, c.group_tol));
  r.checks.push_back(at_most("inverse", g.max_inverse, c.group_tol));
  r.checks.push_back(at_most("identity", g.max_identity, c.group_tol));
  return r;
}

}  // namespace hconv::cli
