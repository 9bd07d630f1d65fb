#ifndef ALSPACH_IO_HPP
#define ALSPACH_IO_HPP

// JSON spec documents, plain-text vector files, and machine-readable reports.

#include <json.hpp>

#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "classifier.hpp"
#include "error.hpp"
#include "norm.hpp"
#include "partition.hpp"
#include "rational.hpp"
#include "space.hpp"
#include "verifier.hpp"
#include "weight_family.hpp"

namespace alspach {

using json = nlohmann::ordered_json;

namespace detail {

[[noreturn]] inline void parse_fail(const std::string& path, const std::string& msg) {
  fail(ErrorCode::Parse, (path.empty() ? std::string("document") : path) + ": " + msg);
}

inline const json& object_at(const json& j, const std::string& path) {
  if (!j.is_object()) parse_fail(path, "expected an object");
  return j;
}

inline void only_fields(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  object_at(j, path);
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || it.key() == a;
    if (!ok) parse_fail(path + "." + it.key(), "unknown field");
  }
}

inline const json& field(const json& j, const std::string& path, const char* name) {
  if (!j.contains(name)) parse_fail(path + "." + name, "missing field");
  return j.at(name);
}

inline Rational rational_at(const json& j, const std::string& path) {
  try {
    if (j.is_number_integer()) return Rational(j.get<long long>());
    if (j.is_number_unsigned()) return Rational(j.get<unsigned long long>());
    if (j.is_number_float()) return rational_from_double(j.get<double>());
    if (j.is_string()) return parse_rational(j.get<std::string>());
  } catch (const Error& e) {
    parse_fail(path, e.what());
  }
  parse_fail(path, "expected a number or a rational string");
}

inline Cardinal cardinal_at(const json& j, const std::string& path) {
  if (j.is_string() && j.get<std::string>() == "inf") return std::nullopt;
  if (j.is_number_integer() && j.get<long long>() >= 1) return static_cast<long>(j.get<long long>());
  parse_fail(path, "expected a positive integer or \"inf\"");
}

inline json rational_json(const Rational& r) {
  if (is_integer(r)) return json(to_long(r));
  return json(to_string(r));
}

inline json cardinal_json(const Cardinal& c) { return c ? json(*c) : json("inf"); }

inline json real_json(const Real& r) {
  json j;
  j["value"] = std::isfinite(r.value) ? json(r.value) : json("inf");
  if (r.exact) j["exact"] = to_string(*r.exact);
  return j;
}

}  // namespace detail

inline WeightFamily parse_weight_family(const json& j, const std::string& path) {
  detail::only_fields(j, path, {"kind", "params"});
  std::string kind = detail::field(j, path, "kind").get<std::string>();
  const json empty = json::object();
  const json& params = j.contains("params") ? j.at("params") : empty;
  std::string pp = path + ".params";
  auto num = [&](const char* name) { return detail::rational_at(detail::field(params, pp, name), pp + "." + name); };
  try {
    if (kind == "constant") {
      detail::only_fields(params, pp, {"c"});
      return WeightFamily::constant(num("c"));
    }
    if (kind == "geometric") {
      detail::only_fields(params, pp, {"c", "r"});
      return WeightFamily::geometric(params.contains("c") ? num("c") : Rational(1), num("r"));
    }
    if (kind == "power") {
      detail::only_fields(params, pp, {"c", "alpha"});
      return WeightFamily::power(params.contains("c") ? num("c") : Rational(1), num("alpha"));
    }
    if (kind == "explicit") {
      detail::only_fields(params, pp, {"values", "tail"});
      const json& vals = detail::field(params, pp, "values");
      if (!vals.is_array()) detail::parse_fail(pp + ".values", "expected an array");
      std::vector<Rational> vs;
      for (std::size_t i = 0; i < vals.size(); ++i) {
        vs.push_back(detail::rational_at(vals[i], pp + ".values[" + std::to_string(i) + "]"));
      }
      WeightFamily tail = params.contains("tail") ? parse_weight_family(params.at("tail"), pp + ".tail")
                                                  : WeightFamily::constant(vs.back());
      return WeightFamily::explicit_then(std::move(vs), std::move(tail));
    }
    if (kind == "interleave") {
      detail::only_fields(params, pp, {"odd", "even"});
      return WeightFamily::interleave(parse_weight_family(detail::field(params, pp, "odd"), pp + ".odd"),
                                      parse_weight_family(detail::field(params, pp, "even"), pp + ".even"));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Parse) throw;
    detail::parse_fail(path, e.what());
  }
  detail::parse_fail(path + ".kind", "unknown weight kind '" + kind + "'");
}

inline json weight_family_json(const WeightFamily& f) {
  json j;
  j["kind"] = to_string(f.kind());
  json params = json::object();
  switch (f.kind()) {
    case WeightKind::Constant: params["c"] = detail::rational_json(f.scale()); break;
    case WeightKind::Geometric:
      params["c"] = detail::rational_json(f.scale());
      params["r"] = detail::rational_json(f.ratio());
      break;
    case WeightKind::Power:
      params["c"] = detail::rational_json(f.scale());
      params["alpha"] = detail::rational_json(f.exponent());
      break;
    case WeightKind::Explicit: {
      json vals = json::array();
      for (const auto& v : f.values()) vals.push_back(detail::rational_json(v));
      params["values"] = vals;
      params["tail"] = weight_family_json(f.tail());
      break;
    }
    case WeightKind::Interleave:
      params["odd"] = weight_family_json(f.odd());
      params["even"] = weight_family_json(f.even());
      break;
  }
  j["params"] = params;
  return j;
}

inline PartitionScheme parse_partition(const json& j, const std::string& path) {
  detail::only_fields(j, path, {"kind", "blocks"});
  std::string kind = detail::field(j, path, "kind").get<std::string>();
  if (kind == "discrete" || kind == "indiscrete") {
    if (j.contains("blocks")) detail::parse_fail(path + ".blocks", "not allowed for kind '" + kind + "'");
    return kind == "discrete" ? PartitionScheme::discrete() : PartitionScheme::indiscrete();
  }
  if (kind != "blocks") detail::parse_fail(path + ".kind", "unknown partition kind '" + kind + "'");
  const json& blocks = detail::field(j, path, "blocks");
  if (!blocks.is_array()) detail::parse_fail(path + ".blocks", "expected an array");
  std::vector<BlockGroup> groups;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    std::string bp = path + ".blocks[" + std::to_string(i) + "]";
    detail::only_fields(blocks[i], bp, {"size", "count"});
    groups.push_back({detail::cardinal_at(detail::field(blocks[i], bp, "size"), bp + ".size"),
                      detail::cardinal_at(detail::field(blocks[i], bp, "count"), bp + ".count")});
  }
  try {
    return PartitionScheme(std::move(groups));
  } catch (const Error& e) {
    detail::parse_fail(path, e.what());
  }
}

inline json partition_json(const PartitionScheme& P) {
  json j;
  if (P.is_discrete()) {
    j["kind"] = "discrete";
  } else if (P.is_indiscrete()) {
    j["kind"] = "indiscrete";
  } else {
    j["kind"] = "blocks";
    json blocks = json::array();
    for (const auto& g : P.groups()) blocks.push_back({{"size", detail::cardinal_json(g.size)}, {"count", detail::cardinal_json(g.count)}});
    j["blocks"] = blocks;
  }
  return j;
}

namespace detail {

inline BlockWeights parse_block_weights(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  only_fields(j, path, allowed);
  BlockWeights bw;
  json fam = {{"kind", field(j, path, "kind")}};
  if (j.contains("params")) fam["params"] = j.at("params");
  bw.tmpl = parse_weight_family(fam, path);
  if (j.contains("per_block")) bw.scale = parse_weight_family(j.at("per_block"), path + ".per_block");
  return bw;
}

inline json block_weights_json(const BlockWeights& bw) {
  json j = weight_family_json(bw.tmpl);
  if (bw.scale) j["per_block"] = weight_family_json(*bw.scale);
  return j;
}

}  // namespace detail

struct SpecDocument {
  std::string name;
  std::string description;
  std::optional<IsoClass> expected_class;
  std::string branch;
  SpaceSpec spec{4, {}};
};

inline SpecDocument parse_spec(const json& doc) {
  detail::only_fields(doc, "", {"name", "description", "expected_class", "branch", "p", "pairs"});
  SpecDocument out;
  if (doc.contains("name")) out.name = doc.at("name").get<std::string>();
  if (doc.contains("description")) out.description = doc.at("description").get<std::string>();
  if (doc.contains("branch")) out.branch = doc.at("branch").get<std::string>();
  if (doc.contains("expected_class")) {
    try {
      out.expected_class = parse_iso_class(doc.at("expected_class").get<std::string>());
    } catch (const Error& e) {
      detail::parse_fail("expected_class", e.what());
    }
  }
  Rational p = detail::rational_at(detail::field(doc, "", "p"), "p");
  if (!(p > 2)) detail::parse_fail("p", "p must exceed 2");
  const json& pairs = detail::field(doc, "", "pairs");
  if (!pairs.is_array()) detail::parse_fail("pairs", "expected an array");
  std::vector<PartitionScheme> partitions;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    std::string path = "pairs[" + std::to_string(k) + "]";
    detail::only_fields(pairs[k], path, {"partition", "weights"});
    partitions.push_back(parse_partition(detail::field(pairs[k], path, "partition"), path + ".partition"));
  }
  std::vector<PartitionWeightPair> built;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    std::string path = "pairs[" + std::to_string(k) + "].weights";
    const json& w = detail::field(pairs[k], "pairs[" + std::to_string(k) + "]", "weights");
    WeightAssignment wa;
    wa.base = detail::parse_block_weights(w, path, {"kind", "params", "per_block", "frame", "groups"});
    if (w.contains("frame")) {
      const json& f = w.at("frame");
      if (f.is_number_integer()) {
        long idx = f.get<long>();
        if (idx < 0 || idx >= static_cast<long>(partitions.size())) detail::parse_fail(path + ".frame", "no such pair");
        wa.frame = partitions[static_cast<std::size_t>(idx)];
      } else {
        wa.frame = parse_partition(f, path + ".frame");
      }
    }
    if (w.contains("groups")) {
      const json& gs = w.at("groups");
      if (!gs.is_array()) detail::parse_fail(path + ".groups", "expected an array");
      for (std::size_t i = 0; i < gs.size(); ++i) {
        std::string gp = path + ".groups[" + std::to_string(i) + "]";
        const json& g = gs[i];
        long gi = 0;
        if (!g.is_object() || !g.contains("group") || !g.at("group").is_number_integer() || (gi = g.at("group").get<long>()) < 1) {
          detail::parse_fail(gp + ".group", "expected a group number >= 1");
        }
        json rest = g;
        rest.erase("group");
        wa.overrides[static_cast<std::size_t>(gi - 1)] = detail::parse_block_weights(rest, gp, {"kind", "params", "per_block"});
      }
    }
    try {
      built.emplace_back(partitions[k], std::move(wa));
    } catch (const Error& e) {
      detail::parse_fail(path, e.what());
    }
  }
  out.spec = SpaceSpec(p, std::move(built));
  return out;
}

inline SpecDocument parse_spec_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::Parse, std::string("malformed JSON: ") + e.what());
  }
  try {
    return parse_spec(doc);
  } catch (const json::exception& e) {
    fail(ErrorCode::Parse, std::string("wrong value type: ") + e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Parse, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline SpecDocument load_spec(const std::string& path) { return parse_spec_text(read_file(path)); }

/// Normalized spec as a document (trivial pair implicit, frames spelled out).
inline json spec_json(const SpaceSpec& spec) {
  json j;
  j["p"] = detail::rational_json(spec.p());
  json pairs = json::array();
  for (std::size_t k : spec.nontrivial()) {
    const auto& pr = spec.pair(k);
    json w = detail::block_weights_json(pr.weights().base);
    if (!pr.own_frame()) w["frame"] = partition_json(pr.frame());
    if (!pr.weights().overrides.empty()) {
      json gs = json::array();
      for (const auto& [g, bw] : pr.weights().overrides) {
        json o = {{"group", g + 1}};
        json body = detail::block_weights_json(bw);
        for (auto& [key, val] : body.items()) o[key] = val;
        gs.push_back(o);
      }
      w["groups"] = gs;
    }
    pairs.push_back({{"partition", partition_json(pr.partition())}, {"weights", w}});
  }
  j["pairs"] = pairs;
  return j;
}

// ---------------------------------------------------------------------------
// Vector files: one "block offset value" triple per line, '#' comments.

struct VectorFile {
  SparseVector values;
  std::optional<ExactSparseVector> exact;  ///< when every value parses as a rational
};

inline VectorFile parse_vector_text(const std::string& text, std::size_t reference_pair) {
  VectorFile out{SparseVector(reference_pair), ExactSparseVector(reference_pair)};
  std::istringstream in(text);
  std::string line;
  std::set<std::pair<long, long>> seen;
  for (long lineno = 1; std::getline(in, line); ++lineno) {
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ls(line);
    std::string b, o, v, extra;
    if (!(ls >> b)) continue;
    std::string where = "line " + std::to_string(lineno);
    if (!(ls >> o >> v) || (ls >> extra)) fail(ErrorCode::Parse, where + ": expected 'block offset value'");
    long block = 0, offset = 0;
    try {
      std::size_t used = 0;
      block = std::stol(b, &used);
      if (used != b.size()) throw std::invalid_argument(b);
      offset = std::stol(o, &used);
      if (used != o.size()) throw std::invalid_argument(o);
    } catch (const std::exception&) {
      fail(ErrorCode::Parse, where + ": block and offset must be integers");
    }
    if (!seen.insert({block, offset}).second) {
      fail(ErrorCode::Parse, where + ": duplicate entry (" + b + ", " + o + ")");
    }
    try {
      Rational r = parse_rational(v);
      out.values.set(block, offset, to_double(r));
      if (out.exact) out.exact->set(block, offset, r);
    } catch (const Error&) {
      char* end = nullptr;
      double d = std::strtod(v.c_str(), &end);
      if (end != v.c_str() + v.size() || !std::isfinite(d)) fail(ErrorCode::Parse, where + ": bad value '" + v + "'");
      out.values.set(block, offset, d);
      out.exact.reset();
    }
  }
  return out;
}

inline VectorFile load_vector(const std::string& path, std::size_t reference_pair) {
  return parse_vector_text(read_file(path), reference_pair);
}

// ---------------------------------------------------------------------------
// Reports

inline json evidence_json(const ClassificationEvidence& ev) {
  json j;
  j["route"] = ev.route;
  j["class"] = to_string(ev.result);
  if (!ev.reason.empty()) j["reason"] = ev.reason;
  json rules = json::array();
  for (const auto& r : ev.rules) rules.push_back({{"id", r.id}, {"detail", r.detail}});
  j["rules"] = rules;
  json q;
  q["p"] = detail::rational_json(ev.p);
  q["q"] = detail::rational_json(ev.q);
  if (ev.delta) q["delta"] = detail::real_json(*ev.delta);
  if (ev.gamma) q["gamma"] = detail::real_json(*ev.gamma);
  if (ev.infinite_blocks) q["infinite_blocks"] = detail::cardinal_json(*ev.infinite_blocks);
  if (ev.finite_blocks) q["finite_blocks"] = detail::cardinal_json(*ev.finite_blocks);
  if (!ev.pieces.empty()) {
    json ps = json::array();
    for (auto k : ev.pieces) ps.push_back(to_string(k));
    q["weight_runs"] = ps;
  }
  if (ev.power_sum_finite) q["power_sum"] = *ev.power_sum_finite ? detail::real_json(*ev.power_sum) : json("inf");
  if (ev.nested) {
    const auto& n = *ev.nested;
    json nj;
    if (ev.nested_pairs) nj["fine_pair"] = ev.nested_pairs->first, nj["coarse_pair"] = ev.nested_pairs->second;
    nj["delta_positive"] = n.delta_positive;
    nj["gamma_positive"] = n.gamma_positive;
    nj["coarse_blocks"] = detail::cardinal_json(n.coarse_blocks);
    nj["coarse_infinite_blocks"] = detail::cardinal_json(n.coarse_infinite_blocks);
    nj["fine_blocks"] = detail::cardinal_json(n.fine_blocks);
    nj["fine_all_finite"] = n.fine_all_finite;
    if (n.sup_cm_finite) nj["sup_cm_finite"] = *n.sup_cm_finite;
    q["nested"] = nj;
  }
  if (!ev.cm_values.empty()) {
    json cm = json::array();
    for (const auto& [label, v] : ev.cm_values) cm.push_back({{"blocks", label}, {"C_M", detail::real_json(v)}});
    q["C_M"] = cm;
  }
  if (ev.sup_cm) q["sup_C_M"] = detail::real_json(*ev.sup_cm);
  if (ev.sandwich_lower) q["sandwich_lower"] = detail::real_json(*ev.sandwich_lower);
  j["quantities"] = q;
  if (!ev.blocks.empty()) {
    json bs = json::array();
    for (const auto& b : ev.blocks) {
      json bj = {{"blocks", b.label}, {"count", detail::cardinal_json(b.count)}, {"class", to_string(b.cls)}};
      json ps = json::array();
      for (auto k : b.pieces) ps.push_back(to_string(k));
      bj["weight_runs"] = ps;
      if (b.delta) bj["delta"] = detail::real_json(*b.delta);
      if (b.family) {
        bj["family"] = true;
        if (b.scale_inf) bj["scale_inf"] = detail::real_json(*b.scale_inf);
        ClassOutcome fam = b.part();
        bj["family_class"] = to_string(fam.cls);
      }
      if (!b.reason.empty()) bj["reason"] = b.reason;
      bs.push_back(bj);
    }
    j["blocks"] = bs;
  }
  if (!ev.reductions.empty()) {
    json rs = json::array();
    for (const auto& r : ev.reductions) {
      json rj = {{"fine_pair", r.fine}, {"coarse_pair", r.coarse}, {"reduced", r.reduced}};
      if (r.constant) rj["C"] = detail::real_json(*r.constant);
      if (!r.reason.empty()) rj["reason"] = r.reason;
      if (r.reduced_class) rj["reduced_class"] = to_string(*r.reduced_class);
      rs.push_back(rj);
    }
    j["reductions"] = rs;
  }
  if (!ev.sub.empty()) {
    json s = json::array();
    for (const auto& e : ev.sub) s.push_back(evidence_json(e));
    j["sub"] = s;
  }
  return j;
}

inline json classification_json(const ClassificationResult& r) {
  json j;
  j["class"] = to_string(r.cls());
  if (!r.outcome.reason.empty()) j["reason"] = r.outcome.reason;
  j["evidence"] = evidence_json(r.evidence);
  return j;
}

inline json norm_json(const NormBreakdown& nb) {
  json j;
  j["per_pair"] = nb.per_pair;
  j["overall"] = nb.overall;
  j["argmax"] = nb.argmax;
  return j;
}

inline std::string digest_hex(std::uint64_t d) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(d));
  return buf;
}

inline json report_json(const VerificationReport& r, bool timing) {
  json j;
  j["check"] = r.check;
  j["spec_digest"] = digest_hex(r.spec_digest);
  j["dims"] = r.dims;
  j["samples"] = r.samples;
  j["seed"] = r.seed;
  j["tolerance"] = r.tolerance;
  json cs = json::array();
  for (const auto& [name, v] : r.constants) cs.push_back({{"name", name}, {"value", v}});
  j["constants"] = cs;
  j["worst_slack"] = std::isfinite(r.worst_slack) ? json(r.worst_slack) : json(nullptr);
  j["evaluations"] = r.evaluations;
  j["violations"] = r.violations;
  j["witness"] = r.witness;
  j["witness_lhs"] = r.witness_lhs;
  j["witness_rhs"] = r.witness_rhs;
  if (timing) j["wall_ms"] = r.wall_ms;
  return j;
}

inline VerificationReport report_from_json(const json& j) {
  VerificationReport r;
  r.check = j.at("check").get<std::string>();
  r.spec_digest = std::stoull(j.at("spec_digest").get<std::string>(), nullptr, 16);
  r.dims = j.at("dims").get<std::vector<std::size_t>>();
  r.samples = j.at("samples").get<std::size_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.tolerance = j.at("tolerance").get<double>();
  for (const auto& c : j.at("constants")) r.constants.emplace_back(c.at("name").get<std::string>(), c.at("value").get<double>());
  if (!j.at("worst_slack").is_null()) r.worst_slack = j.at("worst_slack").get<double>();
  r.evaluations = j.at("evaluations").get<std::size_t>();
  r.violations = j.at("violations").get<std::size_t>();
  r.witness = j.at("witness").get<std::vector<double>>();
  r.witness_lhs = j.at("witness_lhs").get<double>();
  r.witness_rhs = j.at("witness_rhs").get<double>();
  if (j.contains("wall_ms")) r.wall_ms = j.at("wall_ms").get<double>();
  return r;
}

inline json ratio_scan_json(const RatioScan& s) {
  json j;
  json rows = json::array();
  for (const auto& r : s.rows) rows.push_back({{"dim", r.dim}, {"min", r.min}, {"max", r.max}});
  j["rows"] = rows;
  j["trend"] = s.trend;
  j["note"] = "empirical ranges; evidence, not proof";
  return j;
}

inline RatioScan ratio_scan_from_json(const json& j) {
  RatioScan s;
  for (const auto& r : j.at("rows")) s.rows.push_back({r.at("dim").get<std::size_t>(), r.at("min").get<double>(), r.at("max").get<double>()});
  s.trend = j.at("trend").get<double>();
  return s;
}

inline json oracle_json(const OracleResult& o) { return {{"value", o.value}, {"witness", o.witness}}; }

}  // namespace alspach

#endif  // ALSPACH_IO_HPP
