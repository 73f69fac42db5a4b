#include "thirdform/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "thirdform/report.hpp"

namespace thirdform {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

void emit(const RunConfig& config, const std::string& text, std::ostream& out) {
  if (config.out.empty()) {
    out << text;
    return;
  }
  std::ofstream file(config.out, std::ios::binary);
  if (!file) throw Error(ErrorCode::Io, "cannot open '" + config.out + "' for writing");
  file << text;
  if (!file) throw Error(ErrorCode::Io, "write to '" + config.out + "' failed");
}

double parse_real(const std::string& token, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(token, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != token.size() || token.empty()) throw Error(ErrorCode::ConfigParse, what + ": '" + token + "' is not a number");
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, sep)) parts.push_back(part);
  return parts;
}

BlockParams parse_block(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 4) throw Error(ErrorCode::ConfigParse, "--block expects lambda,rho,sigma,half_dim");
  const double h = parse_real(parts[3], "--block half_dim");
  if (h != std::floor(h) || h < 1) throw Error(ErrorCode::ConfigParse, "--block half_dim must be a positive integer");
  return BlockParams::paired(parse_real(parts[0], "--block"), parse_real(parts[1], "--block"),
                             parse_real(parts[2], "--block"), static_cast<int>(h));
}

BlockParams parse_line(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 2) throw Error(ErrorCode::ConfigParse, "--line expects eta1,eta2");
  return BlockParams::umbilic_line(Vec2(parse_real(parts[0], "--line"), parse_real(parts[1], "--line")));
}

int report_error(const std::exception& e, std::ostream& err) {
  err << "error: " << e.what() << "\n";
  return 1;
}

std::string params_text(const Params& params) {
  std::string s;
  for (const auto& [k, v] : params) s += (s.empty() ? "" : " ") + k + "=" + fmt(v);
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Inputs

std::pair<std::string, double> parse_param(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw Error(ErrorCode::ConfigParse, "--param expects key=value, got '" + text + "'");
  return {text.substr(0, eq), parse_real(text.substr(eq + 1), "--param " + text.substr(0, eq))};
}

BilinearForm2 read_shape_pair(std::istream& in) {
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) tokens.push_back(tok);
  }
  if (tokens.empty()) throw Error(ErrorCode::ConfigParse, "shape pair file is empty");
  const double nd = parse_real(tokens[0], "dimension");
  if (nd != std::floor(nd) || nd < 1 || nd > kMaxDimension) {
    throw Error(ErrorCode::ConfigParse, "dimension must be an integer in [1, " + std::to_string(kMaxDimension) + "]");
  }
  const int n = static_cast<int>(nd);
  const std::size_t expected = 1 + 2 * static_cast<std::size_t>(n) * n;
  if (tokens.size() != expected) {
    throw Error(ErrorCode::ConfigParse, "expected " + std::to_string(expected - 1) + " matrix entries, found " +
                                            std::to_string(tokens.size() - 1));
  }
  Mat a1(n, n);
  Mat a2(n, n);
  std::size_t at = 1;
  for (Mat* m : {&a1, &a2}) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) (*m)(i, j) = parse_real(tokens[at++], "matrix entry");
    }
  }
  return {SymOp(a1), SymOp(a2)};
}

BilinearForm2 read_shape_pair_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  return read_shape_pair(in);
}

void write_shape_pair(std::ostream& out, const BilinearForm2& form) {
  const int n = form.dim();
  out << "# shape operators A1 then A2\n" << n << "\n";
  char buf[40];
  for (const SymOp* op : {&form.a1(), &form.a2()}) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        std::snprintf(buf, sizeof buf, "%.17g", op->matrix()(i, j));
        out << (j ? " " : "") << buf;
      }
      out << "\n";
    }
    if (op == &form.a1()) out << "\n";
  }
}

RunConfig load_spec_file(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open spec file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
    if (!j.is_object()) throw Error(ErrorCode::ConfigParse, "spec file must hold a JSON object");
    if (!j.contains("entry") || !j["entry"].is_string()) throw Error(ErrorCode::ConfigParse, "spec file needs a string \"entry\"");
    base.entry = j["entry"].get<std::string>();
    if (j.contains("params")) {
      base.params.clear();
      for (const auto& [k, v] : j["params"].items()) {
        if (!v.is_number()) throw Error(ErrorCode::ConfigParse, "parameter '" + k + "' must be a number");
        base.params[k] = v.get<double>();
      }
    }
    if (j.contains("samples")) base.samples = j["samples"].get<int>();
    if (j.contains("seed")) base.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("frame")) {
      const auto frame = parse_analysis_frame(j["frame"].get<std::string>());
      if (!frame) throw Error(ErrorCode::ConfigParse, "unknown frame '" + j["frame"].get<std::string>() + "'");
      base.frame = *frame;
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigParse, "spec file '" + path + "': " + e.what());
  }
  base.spec_file.clear();
  return base;
}

std::uint64_t seed_from_environment(std::uint64_t fallback) {
  const char* raw = std::getenv("THIRDFORM_SEED");
  if (!raw || !*raw) return fallback;
  const std::string text(raw);
  std::size_t used = 0;
  std::uint64_t seed = 0;
  try {
    seed = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || text.front() == '-') throw Error(ErrorCode::ConfigParse, "THIRDFORM_SEED='" + text + "' is not an unsigned integer");
  return seed;
}

// ---------------------------------------------------------------------------
// Commands

int cmd_analyze(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig cfg = config.spec_file.empty() ? config : load_spec_file(config.spec_file, config);
    if (cfg.entry.empty()) throw Error(ErrorCode::ConfigParse, "analyze needs --entry or --spec-file");
    if (cfg.samples < 1) throw Error(ErrorCode::ConfigParse, "--samples must be at least 1");
    const CatalogEntry entry = make(cfg.entry, cfg.params);
    SamplingConfig sampling;
    sampling.samples = cfg.samples;
    sampling.seed = cfg.seed;
    sampling.tol = cfg.tol;
    sampling.frame = cfg.frame;
    const Analysis analysis = analyze(entry.immersion, sampling);

    ReportMeta meta;
    meta.command = "analyze";
    meta.entry = cfg.entry;
    meta.params = cfg.params;
    meta.seed = cfg.seed;
    meta.samples = cfg.samples;
    meta.tol = cfg.tol;
    meta.frame = cfg.frame;
    emit(cfg, cfg.format == OutputFormat::Json ? dump_json(analysis_json(meta, analysis)) : analysis_text(meta, analysis), out);
    return analysis.verdict.kind == VerdictKind::Inconclusive ? 2 : 0;
  } catch (const std::exception& e) {
    return report_error(e, err);
  }
}

int cmd_decompose(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.input.empty()) throw Error(ErrorCode::ConfigParse, "decompose needs an input file");
    const BilinearForm2 form = read_shape_pair_file(config.input);
    const FormTolerances tol{config.tol.cluster, config.tol.certificate};
    AdaptedDecomposition dec;
    try {
      dec = decompose(form, tol, config.seed);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NotUmbilicalThirdForm) throw;
      err << "not umbilical: " << e.what() << "\n";
      return 2;
    }
    const Json d = decomposition_json(form, dec, tol);
    if (config.format == OutputFormat::Text) {
      emit(config, decomposition_text(d), out);
    } else {
      Json j;
      Json meta;
      meta["tool"] = kToolName;
      meta["version"] = kToolVersion;
      meta["command"] = "decompose";
      meta["seed"] = config.seed;
      meta["tolerances"] = {{"cluster", tol.cluster}, {"certificate", tol.certificate}};
      j["meta"] = meta;
      j["decomposition"] = d;
      emit(config, dump_json(j), out);
    }
    return 0;
  } catch (const std::exception& e) {
    return report_error(e, err);
  }
}

int cmd_synth(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    if (config.blocks.empty()) throw Error(ErrorCode::ConfigParse, "synth needs at least one --block or --line");
    const BilinearForm2 form = synth_form(config.blocks, config.seed, config.rotate);
    std::ostringstream text;
    write_shape_pair(text, form);
    emit(config, text.str(), out);
    return 0;
  } catch (const std::exception& e) {
    return report_error(e, err);
  }
}

std::vector<std::pair<std::string, Params>> verification_cases() {
  return {
      {"plane", {}},
      {"plane", {{"n", 3}}},
      {"circle", {{"r", 2}}},
      {"helix", {}},
      {"round_sphere", {{"n", 2}, {"r", 2}}},
      {"round_sphere", {{"n", 3}, {"r", 0.5}}},
      {"sphere_product", {}},
      {"sphere_product", {{"m1", 1}, {"m2", 2}, {"r", 1.5}}},
      {"sphere_product", {{"m1", 2}, {"m2", 2}}},
      {"sphere_product", {{"r1", 1}, {"r2", 2}}},
      {"clifford_torus", {}},
      {"veronese", {{"c", 1}}},
      {"veronese", {{"c", 2}}},
      {"graph_custom", {}},
      {"hyperbolic_product", {}},
      {"horosphere_product", {}},
  };
}

CatalogCheck check_entry(const std::string& name, const Params& params, const RunConfig& config) {
  CatalogCheck check;
  check.entry = name;
  check.params = params;
  check.label = params.empty() ? name : name + " " + params_text(params);
  try {
    const CatalogEntry entry = make(name, params);
    if (!entry.expected) throw Error(ErrorCode::InvalidParams, "entry has no expected verdict");
    const ExpectedVerdict& x = *entry.expected;
    SamplingConfig sampling;
    sampling.samples = config.samples;
    sampling.seed = config.seed;
    sampling.tol = config.tol;
    sampling.frame = config.frame == AnalysisFrame::Auto ? x.frame : config.frame;
    const Verdict v = analyze(entry.immersion, sampling).verdict;

    check.expected = std::string(to_string(x.kind));
    check.observed = std::string(to_string(v.kind));
    if (v.kind != x.kind) check.failures.push_back("kind " + check.observed);
    if (x.r2) {
      check.expected += " r2=" + fmt(*x.r2);
      if (v.homothety_r2) check.observed += " r2=" + fmt(*v.homothety_r2);
      if (!v.homothety_r2 || std::abs(*v.homothety_r2 - *x.r2) > config.tol.homothety * *x.r2) {
        check.failures.push_back("r2 " + (v.homothety_r2 ? fmt(*v.homothety_r2) : std::string("none")));
      }
    }
    if (x.flat && *x.flat != v.flat) check.failures.push_back(std::string("flat ") + (v.flat ? "yes" : "no"));
    if (x.blocks && *x.blocks != v.k) check.failures.push_back("k " + std::to_string(v.k));
    if (x.minimal && *x.minimal != v.minimal) check.failures.push_back(std::string("minimal ") + (v.minimal ? "yes" : "no"));
  } catch (const std::exception& e) {
    check.failures.push_back(std::string("error: ") + e.what());
  }
  check.passed = check.failures.empty();
  return check;
}

int cmd_verify_catalog(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    std::vector<CatalogCheck> checks;
    for (const auto& [name, params] : verification_cases()) {
      if (!config.entry_filter.empty() && name.find(config.entry_filter) == std::string::npos) continue;
      checks.push_back(check_entry(name, params, config));
    }
    if (checks.empty()) throw Error(ErrorCode::UnknownName, "no catalog entry matches '" + config.entry_filter + "'");
    int failed = 0;
    for (const auto& c : checks) failed += c.passed ? 0 : 1;

    if (config.format == OutputFormat::Json) {
      Json j;
      Json meta;
      meta["tool"] = kToolName;
      meta["version"] = kToolVersion;
      meta["command"] = "verify-catalog";
      meta["seed"] = config.seed;
      meta["samples"] = config.samples;
      meta["tolerances"] = {{"cluster", config.tol.cluster},
                            {"certificate", config.tol.certificate},
                            {"homothety", config.tol.homothety},
                            {"curvature", config.tol.curvature}};
      j["meta"] = meta;
      Json rows = Json::array();
      for (const auto& c : checks) {
        Json r;
        r["entry"] = c.entry;
        Json params = Json::object();
        for (const auto& [k, v] : c.params) params[k] = v;
        r["params"] = params;
        r["expected"] = c.expected;
        r["observed"] = c.observed;
        r["passed"] = c.passed;
        r["failures"] = c.failures;
        rows.push_back(r);
      }
      j["checks"] = rows;
      j["failed"] = failed;
      emit(config, dump_json(j), out);
    } else {
      std::ostringstream os;
      char line[512];
      std::snprintf(line, sizeof line, "%-36s %-34s %-6s %s\n", "entry", "expected", "result", "detail");
      os << line;
      for (const auto& c : checks) {
        std::string detail;
        for (const auto& f : c.failures) detail += (detail.empty() ? "" : "; ") + f;
        std::snprintf(line, sizeof line, "%-36s %-34s %-6s %s\n", c.label.c_str(), c.expected.c_str(),
                      c.passed ? "pass" : "FAIL", detail.c_str());
        os << line;
      }
      os << checks.size() - static_cast<std::size_t>(failed) << "/" << checks.size() << " passed\n";
      emit(config, os.str(), out);
    }
    if (failed) {
      err << failed << " catalog check(s) failed:";
      for (const auto& c : checks) {
        if (!c.passed) err << " [" << c.label << "]";
      }
      err << "\n";
      return 1;
    }
    return 0;
  } catch (const std::exception& e) {
    return report_error(e, err);
  }
}

// ---------------------------------------------------------------------------
// Argument parsing

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Third fundamental form analysis of immersed submanifolds", "thirdform"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  RunConfig cfg;
  std::uint64_t seed = 0;
  std::string format = "json";
  std::string frame = "auto";
  std::vector<std::string> params;
  std::vector<std::string> blocks;
  std::vector<std::string> lines;
  double tol_all = 0.0;
  bool no_rotate = false;

  auto common = [&](CLI::App* sub, bool sampling) {
    sub->add_option("--seed", seed, "Random seed (default: THIRDFORM_SEED or 0)");
    sub->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "text"}));
    sub->add_option("--out", cfg.out, "Write the report to this file");
    sub->add_option("--tol-cluster", cfg.tol.cluster, "Eigenvalue clustering tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--tol-cert", cfg.tol.certificate, "Certificate tolerance")->check(CLI::PositiveNumber);
    if (sampling) {
      sub->add_option("--samples", cfg.samples, "Sample points per entry")->check(CLI::PositiveNumber);
      sub->add_option("--tol-homothety", cfg.tol.homothety, "Homothety tolerance")->check(CLI::PositiveNumber);
      sub->add_option("--tol-curvature", cfg.tol.curvature, "Intrinsic curvature tolerance")->check(CLI::PositiveNumber);
      sub->add_option("--frame", frame, "Analyzed second fundamental form")
          ->check(CLI::IsMember({"auto", "euclidean", "space_form"}));
    }
  };

  CLI::App* analyze_cmd = app.add_subcommand("analyze", "Classify a catalog entry");
  common(analyze_cmd, true);
  analyze_cmd->add_option("--entry", cfg.entry, "Catalog entry name");
  analyze_cmd->add_option("--param", params, "Entry parameter key=value (repeatable)");
  analyze_cmd->add_option("--spec-file", cfg.spec_file, "JSON file naming the entry and its parameters");

  CLI::App* decompose_cmd = app.add_subcommand("decompose", "Adapted decomposition of a shape-operator pair");
  common(decompose_cmd, false);
  decompose_cmd->add_option("input", cfg.input, "Shape pair file")->required();

  CLI::App* verify_cmd = app.add_subcommand("verify-catalog", "Check every catalog entry against its expected verdict");
  common(verify_cmd, true);
  verify_cmd->add_option("--entry-filter", cfg.entry_filter, "Only entries whose name contains this text");
  verify_cmd->add_option("--tol", tol_all, "Set every tolerance to this value")->check(CLI::PositiveNumber);

  CLI::App* synth_cmd = app.add_subcommand("synth", "Write a synthetic shape-operator pair");
  common(synth_cmd, false);
  synth_cmd->add_option("--block", blocks, "Paired block lambda,rho,sigma,half_dim (repeatable)");
  synth_cmd->add_option("--line", lines, "One-dimensional umbilic block eta1,eta2 (repeatable)");
  synth_cmd->add_flag("--no-rotate", no_rotate, "Keep blocks on coordinate axes");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    cfg.seed = sub->count("--seed") ? seed : seed_from_environment(0);
    cfg.format = format == "text" ? OutputFormat::Text : OutputFormat::Json;
    cfg.frame = *parse_analysis_frame(frame);
    for (const auto& p : params) {
      const auto [k, v] = parse_param(p);
      cfg.params[k] = v;
    }
    if (tol_all > 0.0) cfg.tol = {tol_all, tol_all, tol_all, tol_all};
    for (const auto& b : blocks) cfg.blocks.push_back(parse_block(b));
    for (const auto& l : lines) cfg.blocks.push_back(parse_line(l));
    cfg.rotate = !no_rotate;

    if (sub == analyze_cmd) return cmd_analyze(cfg, out, err);
    if (sub == decompose_cmd) return cmd_decompose(cfg, out, err);
    if (sub == verify_cmd) return cmd_verify_catalog(cfg, out, err);
    return cmd_synth(cfg, out, err);
  } catch (const std::exception& e) {
    return report_error(e, err);
  }
}

}  // namespace thirdform
