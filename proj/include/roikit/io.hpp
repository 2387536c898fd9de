//=======================================================================
// Copyright 2026 The roikit authors.
// Distributed under the MIT License.
// (See accompanying file LICENSE or copy at
//  http://opensource.org/licenses/MIT)
//=======================================================================

#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "roikit/bound.hpp"
#include "roikit/config.hpp"
#include "roikit/construct.hpp"
#include "roikit/matrix.hpp"
#include "roikit/povm.hpp"
#include "roikit/roi.hpp"
#include "roikit/sdp_ipm.hpp"
#include "roikit/task.hpp"

namespace roikit {

using Json = nlohmann::json;

// ---------------------------------------------------------------------
// Canonical serialization. Keys are emitted in sorted order (the parser's
// object type is an ordered map), floats with 17 significant digits, which
// is enough to reproduce every double exactly, so save(load(x)) is
// byte-identical on canonical files. Non-finite numbers are not
// representable in JSON and are rejected instead of silently mangled.
// ---------------------------------------------------------------------

namespace io_detail {

inline void write_escaped(std::string& out, const std::string& s) {
  out += '"';
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\b': out += "\\b"; break;
      case '\f': out += "\\f"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", ch);
          out += buf;
        } else {
          out += ch;
        }
    }
  }
  out += '"';
}

inline void write_double(std::string& out, double v) {
  if (!std::isfinite(v)) throw SchemaError("canonical JSON: non-finite number");
  if (v == 0.0) v = 0.0;  // canonical form collapses the sign of zero
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  out.append(buf, res.ptr);
}

inline void write_value(std::string& out, const Json& j, int depth) {
  const std::string pad(2 * static_cast<std::size_t>(depth), ' ');
  const std::string pad_in(2 * static_cast<std::size_t>(depth + 1), ' ');
  switch (j.type()) {
    case Json::value_t::null: out += "null"; break;
    case Json::value_t::boolean: out += j.get<bool>() ? "true" : "false"; break;
    case Json::value_t::number_integer: {
      char buf[32];
      const auto res = std::to_chars(buf, buf + sizeof(buf), j.get<std::int64_t>());
      out.append(buf, res.ptr);
      break;
    }
    case Json::value_t::number_unsigned: {
      char buf[32];
      const auto res = std::to_chars(buf, buf + sizeof(buf), j.get<std::uint64_t>());
      out.append(buf, res.ptr);
      break;
    }
    case Json::value_t::number_float: write_double(out, j.get<double>()); break;
    case Json::value_t::string: write_escaped(out, j.get<std::string>()); break;
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        break;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        out += pad_in;
        write_value(out, j[i], depth + 1);
        if (i + 1 < j.size()) out += ',';
        out += '\n';
      }
      out += pad + "]";
      break;
    }
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        break;
      }
      out += "{\n";
      std::size_t i = 0;
      for (auto it = j.cbegin(); it != j.cend(); ++it, ++i) {
        out += pad_in;
        write_escaped(out, it.key());
        out += ": ";
        write_value(out, it.value(), depth + 1);
        if (i + 1 < j.size()) out += ',';
        out += '\n';
      }
      out += pad + "}";
      break;
    }
    default: throw SchemaError("canonical JSON: unsupported value type");
  }
}

inline std::string pointer_escape(const std::string& key) {
  std::string out;
  for (char ch : key) {
    if (ch == '~') out += "~0";
    else if (ch == '/') out += "~1";
    else out += ch;
  }
  return out;
}

}  // namespace io_detail

inline std::string canonical_json(const Json& j) {
  std::string out;
  io_detail::write_value(out, j, 0);
  out += '\n';
  return out;
}

// The canonical float rendering, exposed for anything that prints values a
// user may diff across runs.
inline std::string format_number(double v) {
  std::string out;
  io_detail::write_double(out, v);
  return out;
}

inline void save_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw SchemaError("cannot open for writing: " + path.string());
  f << canonical_json(j);
  if (!f) throw SchemaError("write failed: " + path.string());
}

inline Json load_json(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw SchemaError("cannot open: " + path.string());
  std::ostringstream buf;
  buf << f.rdbuf();
  try {
    return Json::parse(buf.str());
  } catch (const Json::parse_error& e) {
    throw SchemaError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------
// Pointer-tracked reader: every extraction failure names the offending
// location as a JSON pointer.
// ---------------------------------------------------------------------

class JsonCursor {
 public:
  explicit JsonCursor(const Json& j) : j_(&j) {}
  JsonCursor(const Json& j, std::string path) : j_(&j), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  const Json& raw() const { return *j_; }

  bool has(const char* key) const { return j_->is_object() && j_->contains(key); }

  JsonCursor at(const char* key) const {
    if (!j_->is_object()) fail("expected an object");
    auto it = j_->find(key);
    if (it == j_->end())
      throw SchemaError("missing field at " + path_ + "/" + io_detail::pointer_escape(key));
    return JsonCursor(*it, path_ + "/" + io_detail::pointer_escape(key));
  }

  JsonCursor at(std::size_t i) const {
    if (!j_->is_array()) fail("expected an array");
    if (i >= j_->size()) fail("index " + std::to_string(i) + " out of range");
    return JsonCursor((*j_)[i], path_ + "/" + std::to_string(i));
  }

  JsonCursor at(int i) const { return at(static_cast<std::size_t>(i)); }

  std::size_t size() const {
    if (!j_->is_array()) fail("expected an array");
    return j_->size();
  }

  double number() const {
    if (!j_->is_number()) fail("expected a number");
    const double v = j_->get<double>();
    if (!std::isfinite(v)) fail("non-finite number");
    return v;
  }

  int integer() const {
    if (!j_->is_number_integer() && !j_->is_number_unsigned()) fail("expected an integer");
    return j_->get<int>();
  }

  bool boolean() const {
    if (!j_->is_boolean()) fail("expected a boolean");
    return j_->get<bool>();
  }

  std::string str() const {
    if (!j_->is_string()) fail("expected a string");
    return j_->get<std::string>();
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw SchemaError(what + " at " + (path_.empty() ? std::string("/") : path_));
  }

 private:
  const Json* j_;
  std::string path_;
};

namespace io_detail {

inline void check_schema(const JsonCursor& root, const char* id) {
  const std::string got = root.at("schema").str();
  if (got != id)
    root.at("schema").fail("schema mismatch: expected \"" + std::string(id) +
                           "\", found \"" + got + "\"");
}

}  // namespace io_detail

// ---------------------------------------------------------------------
// Matrix codecs. Complex matrices carry separate real and imaginary
// layers; real symmetric blocks are plain nested arrays.
// ---------------------------------------------------------------------

inline Json matrix_to_json(const Cmat& m) {
  Json re = Json::array();
  Json im = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json rrow = Json::array();
    Json irow = Json::array();
    for (int j = 0; j < m.cols(); ++j) {
      rrow.push_back(m(i, j).real());
      irow.push_back(m(i, j).imag());
    }
    re.push_back(std::move(rrow));
    im.push_back(std::move(irow));
  }
  return Json{{"im", std::move(im)}, {"re", std::move(re)}};
}

inline Cmat matrix_from_json(const JsonCursor& c, int expect_dim = -1) {
  const JsonCursor re = c.at("re");
  const JsonCursor im = c.at("im");
  const std::size_t n = re.size();
  if (n == 0) re.fail("empty matrix");
  if (im.size() != n) im.fail("imaginary layer size mismatch");
  if (expect_dim >= 0 && n != static_cast<std::size_t>(expect_dim))
    re.fail("expected dimension " + std::to_string(expect_dim));
  Cmat m(static_cast<int>(n), static_cast<int>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const JsonCursor rrow = re.at(i);
    const JsonCursor irow = im.at(i);
    if (rrow.size() != n) rrow.fail("matrix is not square");
    if (irow.size() != n) irow.fail("matrix is not square");
    for (std::size_t j = 0; j < n; ++j)
      m(static_cast<int>(i), static_cast<int>(j)) =
          Complex(rrow.at(j).number(), irow.at(j).number());
  }
  return m;
}

inline Json rmat_to_json(const Rmat& m) {
  Json rows = Json::array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Rmat rmat_from_json(const JsonCursor& c) {
  const std::size_t n = c.size();
  if (n == 0) c.fail("empty matrix");
  Rmat m(static_cast<int>(n), static_cast<int>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const JsonCursor row = c.at(i);
    if (row.size() != n) row.fail("matrix is not square");
    for (std::size_t j = 0; j < n; ++j)
      m(static_cast<int>(i), static_cast<int>(j)) = row.at(j).number();
  }
  return m;
}

// ---------------------------------------------------------------------
// measurement_set.v1
// ---------------------------------------------------------------------

inline Json to_json(const MeasurementSet& set) {
  Json meas = Json::array();
  for (int k = 0; k < set.n_measurements(); ++k) {
    Json povm = Json::array();
    for (int c = 0; c < set.povm(k).n_outcomes(); ++c)
      povm.push_back(matrix_to_json(set.effect(k, c)));
    meas.push_back(std::move(povm));
  }
  return Json{
      {"dim", set.dim()}, {"measurements", std::move(meas)}, {"schema", "measurement_set.v1"}};
}

inline MeasurementSet measurement_set_from_json(const Json& j,
                                                const Tolerances& tol = {}) {
  const JsonCursor root(j);
  io_detail::check_schema(root, "measurement_set.v1");
  const int dim = root.at("dim").integer();
  if (dim < 2) root.at("dim").fail("dimension must be at least 2");
  const JsonCursor meas = root.at("measurements");
  if (meas.size() == 0) meas.fail("at least one measurement required");
  std::vector<Povm> povms;
  for (std::size_t k = 0; k < meas.size(); ++k) {
    const JsonCursor pk = meas.at(k);
    if (pk.size() == 0) pk.fail("measurement has no outcomes");
    Povm p;
    for (std::size_t c = 0; c < pk.size(); ++c) {
      const JsonCursor eff = pk.at(c);
      try {
        p.effects.emplace_back(matrix_from_json(eff, dim), tol.herm);
      } catch (const ValidationError& e) {
        eff.fail(e.what());
      }
    }
    povms.push_back(std::move(p));
  }
  MeasurementSet set(std::move(povms));
  const std::vector<SetViolation> violations = validate_set(set, tol);
  if (!violations.empty())
    root.fail("measurement set invalid: " + violations.front().kind + " at povm " +
              std::to_string(violations.front().povm));
  return set;
}

// ---------------------------------------------------------------------
// task.v1
// ---------------------------------------------------------------------

inline Json to_json(const DiscriminationTask& task) {
  Json dims = Json::array();
  for (int d : task.party_dims) dims.push_back(d);
  Json ensembles = Json::array();
  for (const Ensemble& e : task.ensembles) {
    Json states = Json::array();
    for (const WeightedState& ws : e.states)
      states.push_back(Json{{"rho", matrix_to_json(ws.rho.mat())}, {"weight", ws.weight}});
    ensembles.push_back(Json{{"prior", e.prior}, {"states", std::move(states)}});
  }
  return Json{{"ensembles", std::move(ensembles)},
              {"party_dims", std::move(dims)},
              {"schema", "task.v1"}};
}

inline DiscriminationTask task_from_json(const Json& j, const Tolerances& tol = {}) {
  const JsonCursor root(j);
  io_detail::check_schema(root, "task.v1");
  DiscriminationTask task;
  const JsonCursor dims = root.at("party_dims");
  for (std::size_t i = 0; i < dims.size(); ++i)
    task.party_dims.push_back(dims.at(i).integer());
  const JsonCursor ensembles = root.at("ensembles");
  const int d = task.total_dim();
  for (std::size_t y = 0; y < ensembles.size(); ++y) {
    const JsonCursor ey = ensembles.at(y);
    Ensemble e;
    e.prior = ey.at("prior").number();
    const JsonCursor states = ey.at("states");
    for (std::size_t b = 0; b < states.size(); ++b) {
      const JsonCursor sb = states.at(b);
      WeightedState ws;
      ws.weight = sb.at("weight").number();
      try {
        ws.rho = HermitianOperator(matrix_from_json(sb.at("rho"), d), tol.herm);
      } catch (const ValidationError& err) {
        sb.at("rho").fail(err.what());
      }
      e.states.push_back(std::move(ws));
    }
    task.ensembles.push_back(std::move(e));
  }
  try {
    task.validate(tol);
  } catch (const std::exception& e) {
    root.fail(e.what());
  }
  return task;
}

// ---------------------------------------------------------------------
// roi_cert.v1
// ---------------------------------------------------------------------

inline Json to_json(const RoiCertificate& cert) {
  Json strings = Json::array();
  for (const std::vector<int>& str : cert.strings) {
    Json s = Json::array();
    for (int c : str) s.push_back(c);
    strings.push_back(std::move(s));
  }
  Json parent = Json::array();
  for (const Cmat& g : cert.parent) parent.push_back(matrix_to_json(g));
  Json witness = Json::array();
  for (const auto& per_k : cert.witness_w) {
    Json row = Json::array();
    for (const Cmat& w : per_k) row.push_back(matrix_to_json(w));
    witness.push_back(std::move(row));
  }
  const CertResiduals& r = cert.residuals;
  Json residuals{{"completeness", r.completeness},
                 {"domination_min_eig", r.domination_min_eig},
                 {"gap", r.gap},
                 {"parent_min_eig", r.parent_min_eig},
                 {"scale_consistency", r.scale_consistency},
                 {"string_lmi_min_eig", r.string_lmi_min_eig},
                 {"witness_min_eig", r.witness_min_eig},
                 {"x_trace_err", r.x_trace_err}};
  return Json{{"dual_value", cert.dual_value},
              {"gap", cert.gap},
              {"parent", std::move(parent)},
              {"primal_value", cert.primal_value},
              {"residuals", std::move(residuals)},
              {"roi", cert.roi},
              {"scale", cert.scale},
              {"schema", "roi_cert.v1"},
              {"strings", std::move(strings)},
              {"witness_w", std::move(witness)},
              {"witness_x", matrix_to_json(cert.witness_x)}};
}

inline RoiCertificate roi_cert_from_json(const Json& j) {
  const JsonCursor root(j);
  io_detail::check_schema(root, "roi_cert.v1");
  RoiCertificate cert;
  cert.roi = root.at("roi").number();
  cert.scale = root.at("scale").number();
  cert.primal_value = root.at("primal_value").number();
  cert.dual_value = root.at("dual_value").number();
  cert.gap = root.at("gap").number();
  const JsonCursor strings = root.at("strings");
  for (std::size_t s = 0; s < strings.size(); ++s) {
    std::vector<int> str;
    for (std::size_t k = 0; k < strings.at(s).size(); ++k)
      str.push_back(strings.at(s).at(k).integer());
    cert.strings.push_back(std::move(str));
  }
  const JsonCursor parent = root.at("parent");
  if (parent.size() != cert.strings.size())
    parent.fail("one parent block per string required");
  for (std::size_t s = 0; s < parent.size(); ++s)
    cert.parent.push_back(matrix_from_json(parent.at(s)));
  const JsonCursor witness = root.at("witness_w");
  for (std::size_t k = 0; k < witness.size(); ++k) {
    std::vector<Cmat> row;
    for (std::size_t c = 0; c < witness.at(k).size(); ++c)
      row.push_back(matrix_from_json(witness.at(k).at(c)));
    cert.witness_w.push_back(std::move(row));
  }
  cert.witness_x = matrix_from_json(root.at("witness_x"));
  const JsonCursor r = root.at("residuals");
  cert.residuals.parent_min_eig = r.at("parent_min_eig").number();
  cert.residuals.completeness = r.at("completeness").number();
  cert.residuals.domination_min_eig = r.at("domination_min_eig").number();
  cert.residuals.witness_min_eig = r.at("witness_min_eig").number();
  cert.residuals.string_lmi_min_eig = r.at("string_lmi_min_eig").number();
  cert.residuals.x_trace_err = r.at("x_trace_err").number();
  cert.residuals.scale_consistency = r.at("scale_consistency").number();
  cert.residuals.gap = r.at("gap").number();
  return cert;
}

// ---------------------------------------------------------------------
// bound_report.v1
// ---------------------------------------------------------------------

inline Json to_json(const BoundReport& rep) {
  Json roi = Json::array();
  for (double v : rep.roi) roi.push_back(v);
  Json j{{"bound", rep.bound},           {"margin", BoundReport::margin},
         {"p_lo", rep.p_lo},             {"parent_guess", rep.parent_guess},
         {"parties", rep.parties},       {"pass", rep.pass},
         {"product", rep.product},       {"roi", std::move(roi)},
         {"schema", "bound_report.v1"}};
  if (rep.has_locc1) j["p_locc1"] = rep.p_locc1;
  if (rep.has_seesaw) {
    j["seesaw_value"] = rep.seesaw_value;
    j["ratio_seesaw"] = rep.ratio_seesaw;
  }
  return j;
}

inline BoundReport bound_report_from_json(const Json& j) {
  const JsonCursor root(j);
  io_detail::check_schema(root, "bound_report.v1");
  BoundReport rep;
  rep.parties = root.at("parties").integer();
  const JsonCursor roi = root.at("roi");
  for (std::size_t i = 0; i < roi.size(); ++i) rep.roi.push_back(roi.at(i).number());
  rep.product = root.at("product").number();
  rep.parent_guess = root.at("parent_guess").number();
  rep.bound = root.at("bound").number();
  rep.p_lo = root.at("p_lo").number();
  rep.pass = root.at("pass").boolean();
  if (root.has("p_locc1")) {
    rep.has_locc1 = true;
    rep.p_locc1 = root.at("p_locc1").number();
  }
  if (root.has("seesaw_value")) {
    rep.has_seesaw = true;
    rep.seesaw_value = root.at("seesaw_value").number();
    rep.ratio_seesaw = root.at("ratio_seesaw").number();
  }
  return rep;
}

// ---------------------------------------------------------------------
// bundle_meta.v1 — the construction's sidecar: normalizers and label maps.
// The task itself travels as task.v1.
// ---------------------------------------------------------------------

inline Json bundle_meta_to_json(const OptimalTaskBundle& bundle) {
  Json ens = Json::array();
  for (const auto& [k, l] : bundle.ensemble_labels) ens.push_back(Json::array({k, l}));
  Json states = Json::array();
  for (const auto& per_y : bundle.state_labels) {
    Json row = Json::array();
    for (const auto& [c, d] : per_y) row.push_back(Json::array({c, d}));
    states.push_back(std::move(row));
  }
  return Json{{"dropped_mass", bundle.dropped_mass},
              {"ensemble_labels", std::move(ens)},
              {"m_star", bundle.m_star},
              {"n_star", bundle.n_star},
              {"schema", "bundle_meta.v1"},
              {"state_labels", std::move(states)}};
}

// Returns a bundle whose task is empty; pair it with the task.v1 file.
inline OptimalTaskBundle bundle_meta_from_json(const Json& j) {
  const JsonCursor root(j);
  io_detail::check_schema(root, "bundle_meta.v1");
  OptimalTaskBundle bundle;
  bundle.m_star = root.at("m_star").number();
  bundle.n_star = root.at("n_star").number();
  bundle.dropped_mass = root.at("dropped_mass").number();
  const JsonCursor ens = root.at("ensemble_labels");
  for (std::size_t y = 0; y < ens.size(); ++y)
    bundle.ensemble_labels.emplace_back(ens.at(y).at(0).integer(),
                                        ens.at(y).at(1).integer());
  const JsonCursor states = root.at("state_labels");
  if (states.size() != ens.size()) states.fail("one label row per ensemble required");
  for (std::size_t y = 0; y < states.size(); ++y) {
    std::vector<std::pair<int, int>> row;
    for (std::size_t b = 0; b < states.at(y).size(); ++b)
      row.emplace_back(states.at(y).at(b).at(0).integer(),
                       states.at(y).at(b).at(1).integer());
    bundle.state_labels.push_back(std::move(row));
  }
  return bundle;
}

// ---------------------------------------------------------------------
// sdp_dump.v1 — a compiled block program, for offline inspection.
// ---------------------------------------------------------------------

inline Json sdp_dump_to_json(const sdp::BlockProblem& bp) {
  Json dims = Json::array();
  for (int d : bp.dims) dims.push_back(d);
  Json c = Json::array();
  for (const Rmat& m : bp.C) c.push_back(rmat_to_json(m));
  Json gens = Json::array();
  for (const auto& per_block : bp.gens) {
    Json row = Json::array();
    for (const Rmat& g : per_block) row.push_back(rmat_to_json(g));
    gens.push_back(std::move(row));
  }
  Json rows = Json::array();
  for (const auto& row : bp.rows) {
    Json entries = Json::array();
    for (const sdp::BlockProblem::Entry& e : row)
      entries.push_back(Json{{"block", e.block}, {"coeff", e.coeff}, {"gen", e.gen}});
    rows.push_back(std::move(entries));
  }
  Json b = Json::array();
  for (int i = 0; i < bp.b.size(); ++i) b.push_back(bp.b[i]);
  return Json{{"b", std::move(b)},       {"c", std::move(c)},
              {"dims", std::move(dims)}, {"gens", std::move(gens)},
              {"rows", std::move(rows)}, {"schema", "sdp_dump.v1"}};
}

inline sdp::BlockProblem sdp_dump_from_json(const Json& j) {
  const JsonCursor root(j);
  io_detail::check_schema(root, "sdp_dump.v1");
  sdp::BlockProblem bp;
  const JsonCursor dims = root.at("dims");
  for (std::size_t i = 0; i < dims.size(); ++i) bp.dims.push_back(dims.at(i).integer());
  const JsonCursor c = root.at("c");
  if (c.size() != bp.dims.size()) c.fail("one cost block per cone block required");
  for (std::size_t i = 0; i < c.size(); ++i) bp.C.push_back(rmat_from_json(c.at(i)));
  const JsonCursor gens = root.at("gens");
  if (gens.size() != bp.dims.size()) gens.fail("one generator list per cone block");
  for (std::size_t i = 0; i < gens.size(); ++i) {
    std::vector<Rmat> per_block;
    for (std::size_t g = 0; g < gens.at(i).size(); ++g)
      per_block.push_back(rmat_from_json(gens.at(i).at(g)));
    bp.gens.push_back(std::move(per_block));
  }
  const JsonCursor rows = root.at("rows");
  for (std::size_t r = 0; r < rows.size(); ++r) {
    std::vector<sdp::BlockProblem::Entry> row;
    for (std::size_t e = 0; e < rows.at(r).size(); ++e) {
      const JsonCursor ec = rows.at(r).at(e);
      sdp::BlockProblem::Entry entry;
      entry.block = ec.at("block").integer();
      entry.gen = ec.at("gen").integer();
      entry.coeff = ec.at("coeff").number();
      row.push_back(entry);
    }
    bp.rows.push_back(std::move(row));
  }
  const JsonCursor b = root.at("b");
  if (b.size() != rows.size()) b.fail("one right-hand side per row required");
  bp.b.resize(static_cast<int>(b.size()));
  for (std::size_t i = 0; i < b.size(); ++i) bp.b[static_cast<int>(i)] = b.at(i).number();
  return bp;
}

}  // namespace roikit
