#pragma once

// Command-line front end. Subcommands:
//   analyze          --entry NAME [--param k=v]... | --spec-file FILE
//   decompose        FILE (shape-operator pair)
//   verify-catalog   [--entry-filter SUBSTR] [--tol T]
//   synth            --block l,rho,sigma,h... [--line e1,e2]... [--out FILE]
//
// Exit codes: 0 success, 1 error, 2 inconclusive verdict or non-umbilical
// third form.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "thirdform/catalog.hpp"
#include "thirdform/classify.hpp"
#include "thirdform/forms.hpp"

namespace thirdform {

enum class OutputFormat { Json, Text };

struct RunConfig {
  std::string entry;
  Params params;
  std::string spec_file;
  std::string input;  // decompose: shape pair file
  int samples = 25;
  std::uint64_t seed = 0;
  Tolerances tol;
  AnalysisFrame frame = AnalysisFrame::Auto;
  OutputFormat format = OutputFormat::Json;
  std::string out;  // empty: standard output
  std::string entry_filter;
  std::vector<BlockParams> blocks;  // synth
  bool rotate = true;               // synth
};

/// "k=v" -> (k, v); throws ConfigParse.
std::pair<std::string, double> parse_param(const std::string& text);

/// Reads the decompose input format: first line n, then two n x n blocks of
/// reals; '#' starts a comment. Throws ConfigParse or Io.
BilinearForm2 read_shape_pair(std::istream& in);
BilinearForm2 read_shape_pair_file(const std::string& path);
void write_shape_pair(std::ostream& out, const BilinearForm2& form);

/// Spec file: JSON object with "entry", optional "params", "samples",
/// "seed", "frame". Values present in the file override `base`.
RunConfig load_spec_file(const std::string& path, RunConfig base);

/// Seed from THIRDFORM_SEED, or `fallback` when unset. Throws ConfigParse.
std::uint64_t seed_from_environment(std::uint64_t fallback);

int cmd_analyze(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_decompose(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_verify_catalog(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_synth(const RunConfig& config, std::ostream& out, std::ostream& err);

/// One row of the verify-catalog table.
struct CatalogCheck {
  std::string label;
  std::string entry;
  Params params;
  bool passed = false;
  std::string expected;
  std::string observed;
  std::vector<std::string> failures;
};

/// Catalog instances checked by verify-catalog.
std::vector<std::pair<std::string, Params>> verification_cases();
CatalogCheck check_entry(const std::string& name, const Params& params, const RunConfig& config);

/// Parses argv and dispatches; returns the exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace thirdform
