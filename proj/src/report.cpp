#include "thirdform/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace thirdform {

namespace {

Json number(double value) {
  if (!std::isfinite(value)) return nullptr;
  return value;
}

Json vec_json(const Vec& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(number(v[i]));
  return a;
}

Json tolerances_json(const Tolerances& tol) {
  Json t;
  t["cluster"] = tol.cluster;
  t["certificate"] = tol.certificate;
  t["homothety"] = tol.homothety;
  t["curvature"] = tol.curvature;
  return t;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

void dump_into(const Json& j, std::string& out, int level) {
  const std::string pad(static_cast<std::size_t>(2 * (level + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(2 * level), ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(it.key()).dump() + ": ";
        dump_into(it.value(), out, level + 1);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& el : j) {
        if (!first) out += ",\n";
        first = false;
        out += pad;
        dump_into(el, out, level + 1);
      }
      out += "\n" + close_pad + "]";
      return;
    }
    case Json::value_t::number_float: {
      const double v = j.get<double>();
      out += std::isfinite(v) ? format_double(v) : "null";
      return;
    }
    default:
      out += j.dump();
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

Json measured(double value, double tol) {
  Json m;
  m["value"] = number(value);
  m["tol"] = number(tol);
  return m;
}

Json meta_json(const ReportMeta& meta) {
  Json m;
  m["tool"] = kToolName;
  m["version"] = kToolVersion;
  m["command"] = meta.command;
  m["entry"] = meta.entry;
  Json params = Json::object();
  for (const auto& [k, v] : meta.params) params[k] = v;
  m["params"] = params;
  m["seed"] = meta.seed;
  m["samples"] = meta.samples;
  m["frame"] = std::string(to_string(meta.frame));
  m["tolerances"] = tolerances_json(meta.tol);
  return m;
}

Json verdict_json(const Verdict& v, const Tolerances& tol) {
  const double mu_tol = tol.homothety * (1.0 + std::abs(v.iii_mean));
  Json j;
  j["kind"] = std::string(to_string(v.kind));
  j["frame"] = std::string(to_string(v.frame));
  j["n"] = v.n;
  j["codim"] = v.codim;
  j["c"] = v.c ? measured(*v.c, 0.0) : Json(nullptr);
  j["homothetic"] = v.homothetic;
  j["homothety_r2"] = v.homothety_r2 ? measured(*v.homothety_r2, mu_tol * *v.homothety_r2 * *v.homothety_r2) : Json(nullptr);
  j["iii_mean"] = measured(v.iii_mean, mu_tol);
  j["iii_mean_spread"] = measured(v.iii_mean_spread, mu_tol);
  j["max_homothety_residual"] = measured(v.max_homothety_residual, mu_tol);
  j["flat_normal_bundle"] = v.flat;
  j["max_commutator"] = measured(v.max_commutator, tol.certificate);
  j["block_count"] = v.k;
  j["block_count_consistent"] = v.k_consistent;
  j["principal_norm_min"] = measured(v.principal_norm_min, tol.certificate);
  j["principal_norm_max"] = measured(v.principal_norm_max, tol.certificate);
  j["equal_principal_norms"] = v.equal_norms;
  j["max_block_residual"] = measured(v.max_block_residual, tol.certificate);
  j["minimal"] = v.minimal;
  j["max_mean_curvature"] = measured(v.max_mean_curvature, tol.certificate);
  j["einstein"] = v.einstein ? Json(*v.einstein) : Json(nullptr);
  j["einstein_spread"] = measured(v.einstein_spread, tol.curvature);
  j["gauss_curvature"] = v.gauss_curvature ? measured(*v.gauss_curvature, tol.curvature) : Json(nullptr);
  j["curvature_matches"] = v.curvature_matches ? Json(*v.curvature_matches) : Json(nullptr);
  j["planar"] = v.planar ? Json(*v.planar) : Json(nullptr);
  j["max_gauss_residual"] = measured(v.max_gauss_residual, tol.curvature);
  return j;
}

Json sample_json(const SampleRow& row, const Tolerances& tol) {
  const double mu_tol = tol.homothety * (1.0 + std::abs(row.iii_mean));
  Json j;
  j["index"] = row.index;
  j["u"] = vec_json(row.u);
  j["iii_mean"] = measured(row.iii_mean, mu_tol);
  j["iii_spread"] = measured(row.iii_spread, mu_tol);
  j["homothety_residual"] = measured(row.homothety_residual, mu_tol);
  j["umbilic"] = row.umbilic;
  j["commutator"] = measured(row.commutator, row.commutator_bound);
  j["mean_curvature_norm"] = measured(row.mean_curvature_norm, tol.certificate);
  j["gauss_residual"] = measured(row.gauss_residual, tol.curvature);
  j["gauss_curvature"] = row.gauss_curvature ? measured(*row.gauss_curvature, tol.curvature) : Json(nullptr);
  Json lambdas = Json::array();
  for (const auto& l : row.lambdas) lambdas.push_back(Json::array({measured(l[0], tol.cluster), measured(l[1], tol.cluster)}));
  j["lambda_pairs"] = lambdas;
  j["block_dims"] = row.block_dims;
  j["block_residual"] = measured(row.block_residual, tol.certificate);
  Json norms = Json::array();
  for (double nrm : row.principal_norms) norms.push_back(measured(nrm, tol.certificate));
  j["principal_norms"] = norms;
  j["k"] = row.k;
  return j;
}

Json analysis_json(const ReportMeta& meta, const Analysis& analysis) {
  Json j;
  j["meta"] = meta_json(meta);
  j["verdict"] = verdict_json(analysis.verdict, meta.tol);
  Json samples = Json::array();
  for (const auto& row : analysis.report.rows) samples.push_back(sample_json(row, meta.tol));
  j["samples"] = samples;
  Json aggregates = Json::object();
  for (const auto& a : analysis.report.aggregates) {
    Json entry;
    entry["min"] = number(a.min);
    entry["max"] = number(a.max);
    entry["mean"] = number(a.mean);
    aggregates[a.name] = entry;
  }
  j["aggregates"] = aggregates;
  return j;
}

Json decomposition_json(const BilinearForm2& form, const AdaptedDecomposition& dec, const FormTolerances& tol) {
  const double scale = form.scale();
  Json j;
  j["dim"] = form.dim();
  j["k"] = dec.k();
  const bool zero = form.a1().spectral_radius() <= tol.certificate && form.a2().spectral_radius() <= tol.certificate;
  j["alpha_zero"] = zero;
  j["homothety_r2"] = dec.homothety_r2 ? measured(*dec.homothety_r2, tol.certificate) : Json(nullptr);
  j["umbilic_residual"] = measured(dec.umbilic_residual, tol.certificate * scale);
  j["adaptedness_residual"] = measured(dec.adaptedness_residual, tol.certificate * scale);
  j["generic_normal"] = Json::array({dec.generic_xi[0], dec.generic_xi[1]});

  Json blocks = Json::array();
  for (const Block& b : dec.blocks) {
    Json bj;
    bj["dim"] = b.dim();
    bj["lambda"] = Json::array({measured(b.lambda[0], tol.cluster), measured(b.lambda[1], tol.cluster)});
    const BilinearForm2 restricted = form.restricted(b.basis);
    try {
      const BlockAnalysis analysis = block_structure(restricted, tol.certificate);
      if (const auto* bs = std::get_if<BlockStructure>(&analysis)) {
        bj["type"] = "paired";
        bj["half_dim"] = bs->half_dim();
        bj["rho"] = measured(bs->rho, tol.certificate * scale);
        bj["sigma"] = measured(bs->sigma, tol.certificate * scale);
        Json res;
        res["a_star_a"] = measured(bs->a_star_a_residual, tol.certificate * scale);
        res["a_a_star"] = measured(bs->a_a_star_residual, tol.certificate * scale);
        res["rho_sigma"] = measured(bs->rho_sigma_residual, tol.certificate * scale);
        res["trace"] = measured(bs->trace_residual, tol.certificate * scale);
        res["rho"] = measured(bs->rho_residual, tol.certificate * scale);
        bj["residuals"] = res;
        const UmbilicalResiduals um = umbilical_subforms_check(*bs, restricted);
        Json sub;
        sub["plus"] = measured(um.plus, tol.certificate * scale);
        sub["minus"] = measured(um.minus, tol.certificate * scale);
        sub["alpha_a"] = measured(um.alpha_a, tol.certificate * scale);
        sub["alpha_a_star"] = measured(um.alpha_a_star, tol.certificate * scale);
        bj["subforms"] = sub;
      } else {
        const auto& d = std::get<DegenerateBlock>(analysis);
        bj["type"] = d.lambda_active <= tol.certificate * scale ? "zero" : "degenerate";
        bj["kernel_normal"] = Json::array({d.kernel_normal[0], d.kernel_normal[1]});
        bj["active_normal"] = Json::array({d.active_normal[0], d.active_normal[1]});
        bj["lambda_active"] = measured(d.lambda_active, tol.cluster);
        bj["plus_dim"] = static_cast<int>(d.e_plus.cols());
        bj["minus_dim"] = static_cast<int>(d.e_minus.cols());
      }
    } catch (const Error& e) {
      bj["type"] = "error";
      bj["error"] = e.what();
    }
    blocks.push_back(bj);
  }
  j["blocks"] = blocks;
  return j;
}

std::string dump_json(const Json& j) {
  std::string out;
  dump_into(j, out, 0);
  out += "\n";
  return out;
}

std::string analysis_text(const ReportMeta& meta, const Analysis& analysis) {
  const Verdict& v = analysis.verdict;
  std::ostringstream os;
  os << kToolName << " " << kToolVersion << "  " << meta.command << " " << meta.entry;
  for (const auto& [k, val] : meta.params) os << " " << k << "=" << fmt(val);
  os << "\nseed " << meta.seed << ", " << meta.samples << " samples, frame " << to_string(v.frame) << "\n\n";

  os << "verdict           " << to_string(v.kind) << "\n";
  os << "n, codim          " << v.n << ", " << v.codim << "\n";
  if (v.c) os << "c                 " << fmt(*v.c) << "\n";
  os << "homothetic        " << (v.homothetic ? "yes" : "no");
  if (v.homothety_r2) os << "  r^2 = " << fmt(*v.homothety_r2);
  os << "\n";
  os << "III mean          " << fmt(v.iii_mean) << "  (spread " << fmt(v.iii_mean_spread) << ")\n";
  os << "flat normals      " << (v.flat ? "yes" : "no") << "  max commutator " << fmt(v.max_commutator) << "\n";
  os << "blocks            " << v.k << (v.k_consistent ? "" : " (varies)") << "\n";
  if (v.principal_norm_max > 0.0) {
    os << "|eta_i|           " << fmt(v.principal_norm_min) << " .. " << fmt(v.principal_norm_max) << "\n";
  }
  os << "minimal           " << (v.minimal ? "yes" : "no") << "  max |H| " << fmt(v.max_mean_curvature) << "\n";
  if (v.einstein) os << "einstein          " << (*v.einstein ? "yes" : "no") << "  spread " << fmt(v.einstein_spread) << "\n";
  if (v.gauss_curvature) os << "K                 " << fmt(*v.gauss_curvature) << "\n";
  if (v.planar) os << "planar            " << (*v.planar ? "yes" : "no") << "\n";
  os << "Gauss residual    " << fmt(v.max_gauss_residual) << "\n\n";

  os << "  idx  III mean          homothety res    commutator       |H|\n";
  for (const auto& r : analysis.report.rows) {
    char line[160];
    std::snprintf(line, sizeof line, "  %3d  %-16.10g  %-15.3e  %-15.3e  %.3e\n", r.index, r.iii_mean,
                  r.homothety_residual, r.commutator, r.mean_curvature_norm);
    os << line;
  }
  return os.str();
}

std::string decomposition_text(const Json& d) {
  std::ostringstream os;
  os << "dim " << d["dim"].get<int>() << ", k = " << d["k"].get<int>() << "\n";
  if (d["alpha_zero"].get<bool>()) os << "alpha = 0: a single block with lambda = (0, 0)\n";
  if (!d["homothety_r2"].is_null()) os << "r^2 = " << fmt(d["homothety_r2"]["value"].get<double>()) << "\n";
  int index = 0;
  for (const auto& b : d["blocks"]) {
    os << "block " << index++ << ": dim " << b["dim"].get<int>() << ", lambda = ("
       << fmt(b["lambda"][0]["value"].get<double>()) << ", " << fmt(b["lambda"][1]["value"].get<double>()) << "), "
       << b["type"].get<std::string>();
    if (b["type"] == "paired") {
      os << ", rho = " << fmt(b["rho"]["value"].get<double>()) << ", sigma = " << fmt(b["sigma"]["value"].get<double>());
      double worst = 0.0;
      for (const char* group : {"residuals", "subforms"}) {
        for (const auto& r : b[group]) {
          worst = std::max(worst, r["value"].is_number() ? r["value"].get<double>() : HUGE_VAL);
        }
      }
      os << ", worst residual " << fmt(worst);
    } else if (b["type"] == "error") {
      os << ": " << b["error"].get<std::string>();
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace thirdform
