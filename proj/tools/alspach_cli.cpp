// alspach: classify, evaluate and verify partition-and-weight sequence space norms.
//
// Exit codes: 0 success, 1 parse/validation failure, 2 UNCLASSIFIED,
// 3 check hypothesis not met, 4 inequality violation or corpus mismatch.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include "alspach/alspach.hpp"

#ifndef ALSPACH_FIXTURE_DIR
#define ALSPACH_FIXTURE_DIR "fixtures"
#endif

namespace fs = std::filesystem;
using namespace alspach;

namespace {

enum Exit { kOk = 0, kInvalid = 1, kUnclassified = 2, kHypothesis = 3, kViolation = 4 };

std::string fmt(double v) {
  std::ostringstream ss;
  ss << std::setprecision(10) << v;
  return ss.str();
}

std::string fmt(const Real& r) {
  std::string s = fmt(r.value);
  if (r.exact) s += " (" + to_string(*r.exact) + ")";
  return s;
}

void print_evidence(const ClassificationEvidence& ev, int depth) {
  std::string pad(static_cast<std::size_t>(depth) * 2, ' ');
  std::cout << pad << "route: " << ev.route << " -> " << to_string(ev.result) << "\n";
  if (!ev.reason.empty()) std::cout << pad << "  reason: " << ev.reason << "\n";
  for (const auto& r : ev.rules) {
    std::cout << pad << "  rule " << r.id;
    if (!r.detail.empty()) std::cout << ": " << r.detail;
    std::cout << "\n";
  }
  if (ev.delta) std::cout << pad << "  delta = " << fmt(*ev.delta) << "\n";
  if (ev.gamma) std::cout << pad << "  gamma = " << fmt(*ev.gamma) << "\n";
  if (ev.power_sum_finite) {
    std::cout << pad << "  sum w^q = " << (*ev.power_sum_finite ? fmt(*ev.power_sum) : std::string("inf")) << "\n";
  }
  for (const auto& b : ev.blocks) {
    std::cout << pad << "  blocks " << b.label << ": " << to_string(b.part().cls);
    if (b.delta) std::cout << ", inf w = " << fmt(*b.delta);
    if (b.family && b.scale_inf) std::cout << ", inf scale = " << fmt(*b.scale_inf);
    if (!b.reason.empty()) std::cout << " (" << b.reason << ")";
    std::cout << "\n";
  }
  if (ev.sandwich_lower) std::cout << pad << "  lower constant = " << fmt(*ev.sandwich_lower) << "\n";
  if (ev.sup_cm) std::cout << pad << "  sup C_M = " << fmt(*ev.sup_cm) << "\n";
  for (const auto& r : ev.reductions) {
    std::cout << pad << "  reduction " << r.fine << " -> " << r.coarse << ": " << (r.reduced ? "removed pair" : "kept");
    if (r.constant) std::cout << ", C = " << fmt(*r.constant);
    if (r.reduced_class) std::cout << ", reduced class " << to_string(*r.reduced_class);
    if (!r.reason.empty()) std::cout << " (" << r.reason << ")";
    std::cout << "\n";
  }
  for (const auto& s : ev.sub) print_evidence(s, depth + 1);
}

std::vector<std::size_t> parse_dims(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      long v = std::stol(tok, &used);
      if (used != tok.size() || v < 1) throw std::invalid_argument(tok);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      fail(ErrorCode::Parse, "--dims: bad dimension '" + tok + "'");
    }
  }
  if (out.empty()) fail(ErrorCode::Parse, "--dims: empty list");
  return out;
}

std::vector<fs::path> fixture_files(const std::string& dir) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) fail(ErrorCode::Parse, "fixture directory '" + dir + "' not found");
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".json") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

int cmd_classify(const std::string& path, bool as_json) {
  SpecDocument doc = load_spec(path);
  ClassificationResult r = classify(doc.spec);
  if (as_json) {
    std::cout << classification_json(r).dump(2) << "\n";
  } else {
    std::cout << to_string(r.cls()) << "\n";
    print_evidence(r.evidence, 0);
  }
  return r.cls() == IsoClass::Unclassified ? kUnclassified : kOk;
}

int cmd_norm(const std::string& spec_path, const std::string& vec_path, std::size_t ref, bool exact, bool as_json) {
  SpecDocument doc = load_spec(spec_path);
  const SpaceSpec& spec = doc.spec;
  if (ref >= spec.pairs().size()) fail(ErrorCode::Parse, "--ref: no pair " + std::to_string(ref));
  VectorFile vf = load_vector(vec_path, ref);
  NormBreakdown nb = space_norm(vf.values, spec);
  json j = norm_json(nb);
  if (exact) {
    if (!vf.exact) fail(ErrorCode::NotExact, "--exact needs rational entries");
    json ex = json::array();
    for (std::size_t k = 0; k < spec.pairs().size(); ++k) {
      ExactNorm en = exact_pair_norm(*vf.exact, spec, k);
      json e = {{"pair", k}, {"value", en.value.str(30)}};
      if (en.power_sum) e["power_sum"] = to_string(*en.power_sum);
      ex.push_back(e);
    }
    j["exact"] = ex;
  }
  if (as_json) {
    std::cout << j.dump(2) << "\n";
    return kOk;
  }
  for (std::size_t k = 0; k < nb.per_pair.size(); ++k) {
    std::cout << "pair " << k << " [" << spec.pair(k).describe() << "]: " << fmt(nb.per_pair[k]);
    if (exact) {
      const json& e = j["exact"][k];
      std::cout << "  exact " << e["value"].get<std::string>();
      if (e.contains("power_sum")) std::cout << "  (norm^p = " << e["power_sum"].get<std::string>() << ")";
    }
    std::cout << "\n";
  }
  std::cout << "norm: " << fmt(nb.overall) << " (pair " << nb.argmax << ")\n";
  return kOk;
}

struct VerifyOptions {
  std::string checks = "lower_lp";
  std::string dims = "8,16,32";
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
  double tol = 1e-12;
  std::string out_dir;
  bool timing = false;
  bool as_json = false;
};

int cmd_verify(const std::string& path, const VerifyOptions& o) {
  SpecDocument doc = load_spec(path);
  std::vector<std::size_t> dims = parse_dims(o.dims);
  std::vector<CheckKind> kinds;
  std::stringstream ss(o.checks);
  for (std::string tok; std::getline(ss, tok, ',');) kinds.push_back(parse_check_kind(tok));
  if (!o.out_dir.empty()) fs::create_directories(o.out_dir);

  bool violated = false;
  json all = json::array();
  for (CheckKind k : kinds) {
    VerificationReport rep = check_inequality(k, doc.spec, dims, o.samples, o.seed, o.tol);
    json rj = report_json(rep, o.timing);
    violated = violated || rep.violations > 0;
    if (!o.out_dir.empty()) {
      std::ofstream f(fs::path(o.out_dir) / (rep.check + ".json"));
      f << rj.dump(2) << "\n";
    }
    if (o.as_json) {
      all.push_back(rj);
      continue;
    }
    std::cout << rep.check << ": " << (rep.violations ? "VIOLATED" : "ok") << "  evaluations=" << rep.evaluations
              << " violations=" << rep.violations << " worst_slack=" << fmt(rep.worst_slack);
    for (const auto& [name, v] : rep.constants) std::cout << " " << name << "=" << fmt(v);
    if (o.timing) std::cout << " wall_ms=" << fmt(rep.wall_ms);
    std::cout << "\n";
  }
  if (o.as_json) std::cout << all.dump(2) << "\n";
  return violated ? kViolation : kOk;
}

int cmd_oracle(const std::string& path, std::size_t pair, std::size_t dim, std::size_t grid, bool as_json) {
  SpecDocument doc = load_spec(path);
  if (pair >= doc.spec.pairs().size()) fail(ErrorCode::Parse, "pair index " + std::to_string(pair) + " out of range");
  OracleResult r = sphere_oracle(doc.spec.pair(pair), doc.spec.p(), dim, grid);
  if (as_json) {
    std::cout << oracle_json(r).dump(2) << "\n";
    return kOk;
  }
  std::cout << "max: " << fmt(r.value) << "\nwitness:";
  for (double x : r.witness) std::cout << " " << fmt(x);
  std::cout << "\n";
  return kOk;
}

int cmd_corpus(const std::string& dir, bool check) {
  bool mismatch = false;
  for (const auto& f : fixture_files(dir)) {
    SpecDocument doc = load_spec(f.string());
    std::string expected = doc.expected_class ? to_string(*doc.expected_class) : "-";
    std::cout << std::left << std::setw(28) << f.stem().string() << std::setw(26) << expected;
    if (check) {
      IsoClass got = classify(doc.spec).cls();
      bool ok = !doc.expected_class || got == *doc.expected_class;
      mismatch = mismatch || !ok;
      std::cout << std::setw(26) << to_string(got) << (ok ? "ok" : "MISMATCH");
    } else {
      std::cout << doc.branch;
    }
    std::cout << "\n";
  }
  return mismatch ? kViolation : kOk;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::HypothesisNotMet: return kHypothesis;
    default: return kInvalid;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Partition-and-weight sequence space norms: classify, evaluate, verify"};
  app.require_subcommand(1);

  bool as_json = false;
  std::string spec_path, vec_path;

  auto* classify_cmd = app.add_subcommand("classify", "Classify a spec up to isomorphism");
  classify_cmd->add_option("spec", spec_path, "Spec file (JSON)")->required();
  classify_cmd->add_flag("--json", as_json, "Emit the structured report");

  std::size_t ref = 0;
  bool exact = false;
  auto* norm_cmd = app.add_subcommand("norm", "Evaluate the norm of a finitely supported vector");
  norm_cmd->add_option("spec", spec_path, "Spec file (JSON)")->required();
  norm_cmd->add_option("vector", vec_path, "Vector file of 'block offset value' lines")->required();
  norm_cmd->add_option("--ref", ref, "Pair whose blocks address the vector (0 = trivial)");
  norm_cmd->add_flag("--exact", exact, "Also evaluate in rational arithmetic");
  norm_cmd->add_flag("--json", as_json, "Emit the structured report");

  VerifyOptions vo;
  std::optional<std::uint64_t> seed;
  auto* verify_cmd = app.add_subcommand("verify", "Sample-check the inequalities a classification relies on");
  verify_cmd->add_option("spec", spec_path, "Spec file (JSON)")->required();
  verify_cmd->add_option("--checks", vo.checks,
                         "Comma list of holder, refinement_chain, delta_sandwich, coarse_sandwich, lower_lp, l2_domination")
      ->capture_default_str();
  verify_cmd->add_option("--dims", vo.dims, "Comma list of dimensions")->capture_default_str();
  verify_cmd->add_option("--samples", vo.samples, "Random samples per dimension")->capture_default_str();
  verify_cmd->add_option("--seed", seed, "Sampling seed (required when CI=1)");
  verify_cmd->add_option("--tol", vo.tol, "Relative tolerance")->capture_default_str();
  verify_cmd->add_option("--out", vo.out_dir, "Directory for per-check JSON reports");
  verify_cmd->add_flag("--timing", vo.timing, "Include wall time in reports");
  verify_cmd->add_flag("--json", vo.as_json, "Emit the structured reports");

  std::size_t pair = 1, dim = 2, grid = 16;
  auto* oracle_cmd = app.add_subcommand("oracle", "Maximize a pair norm over the l_p unit sphere (dim <= 6)");
  oracle_cmd->add_option("spec", spec_path, "Spec file (JSON)")->required();
  oracle_cmd->add_option("pair", pair, "Pair index (0 = trivial)")->capture_default_str();
  oracle_cmd->add_option("--dim", dim, "Dimension")->capture_default_str();
  oracle_cmd->add_option("--grid", grid, "Grid points per face axis")->capture_default_str();
  oracle_cmd->add_flag("--json", as_json, "Emit the structured report");

  std::string dir = ALSPACH_FIXTURE_DIR;
  bool check = false;
  auto* corpus_cmd = app.add_subcommand("corpus", "List the fixture specs");
  corpus_cmd->add_option("--dir", dir, "Fixture directory")->capture_default_str();
  corpus_cmd->add_flag("--check", check, "Classify every fixture and compare with its annotation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kInvalid;
  }

  try {
    if (*classify_cmd) return cmd_classify(spec_path, as_json);
    if (*norm_cmd) return cmd_norm(spec_path, vec_path, ref, exact, as_json);
    if (*verify_cmd) {
      const char* ci = std::getenv("CI");
      if (!seed && ci && std::string(ci) == "1") {
        std::cerr << "error: --seed is required when CI=1\n";
        return kInvalid;
      }
      vo.seed = seed.value_or(0);
      return cmd_verify(spec_path, vo);
    }
    if (*oracle_cmd) return cmd_oracle(spec_path, pair, dim, grid, as_json);
    if (*corpus_cmd) return cmd_corpus(dir, check);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalid;
  }
  return kInvalid;
}
