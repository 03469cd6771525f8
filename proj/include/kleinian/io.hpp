#pragma once

// JSON input and output. Complex numbers are [re, im] pairs, triples are
// arrays of three pairs and matrices are row-major arrays of three triples.
// Output goes through a small writer that prints every double with 17
// significant digits, so reports are reproducible byte for byte.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "kleinian/group_engine.hpp"
#include "kleinian/pseudo_projective.hpp"

namespace kleinian::io {

using Json = nlohmann::ordered_json;

// ---- parsing ---------------------------------------------------------------

inline Complex parse_complex(const Json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw Error(ErrorCode::Parse, "complex entry must be a number or [re, im]");
}

inline Mat3 parse_matrix(const Json& j) {
  const Json& rows = j.is_object() && j.contains("matrix") ? j.at("matrix") : j;
  if (!rows.is_array() || rows.size() != 3) {
    throw Error(ErrorCode::Parse, "matrix must have 3 rows");
  }
  Mat3 m;
  for (int r = 0; r < 3; ++r) {
    if (!rows[r].is_array() || rows[r].size() != 3) {
      throw Error(ErrorCode::Parse, "matrix rows must have 3 entries");
    }
    for (int c = 0; c < 3; ++c) m(r, c) = parse_complex(rows[r][c]);
  }
  if (!m.allFinite()) throw Error(ErrorCode::Parse, "matrix entries must be finite");
  return m;
}

inline Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Parse, e.what());
  }
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Parse, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Mat3 load_matrix(const std::string& path) {
  return parse_matrix(parse_json_text(read_file(path)));
}

inline GroupPresentation parse_group(const Json& j) {
  if (!j.is_object() || !j.contains("generators") || !j.at("generators").is_array()) {
    throw Error(ErrorCode::Parse, "group file needs a \"generators\" array");
  }
  const Json& gens = j.at("generators");
  if (gens.empty()) throw Error(ErrorCode::Parse, "generator list is empty");
  std::vector<Mat3> matrices;
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < gens.size(); ++i) {
    const Json& g = gens[i];
    if (!g.is_object() || !g.contains("matrix")) {
      throw Error(ErrorCode::Parse, "generator needs a \"matrix\"");
    }
    matrices.push_back(parse_matrix(g.at("matrix")));
    if (g.contains("label")) {
      if (!g.at("label").is_string()) throw Error(ErrorCode::Parse, "label must be a string");
      labels.push_back(g.at("label").get<std::string>());
    } else {
      labels.push_back("g" + std::to_string(i + 1));
    }
  }
  try {
    return GroupPresentation(matrices, labels);
  } catch (const Error& e) {
    throw Error(ErrorCode::Parse, e.what());
  }
}

inline GroupPresentation load_group(const std::string& path) {
  return parse_group(parse_json_text(read_file(path)));
}

/// Letters separated by spaces or '*'; a label may carry ^-1 or ^n.
inline Word parse_word(const GroupPresentation& g, const std::string& text) {
  Word w;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    int exponent = 1;
    std::string label = token;
    if (const auto hat = token.find('^'); hat != std::string::npos) {
      label = token.substr(0, hat);
      try {
        std::size_t used = 0;
        exponent = std::stoi(token.substr(hat + 1), &used);
        if (used != token.size() - hat - 1) throw std::invalid_argument(token);
      } catch (const std::exception&) {
        throw Error(ErrorCode::Parse, "bad exponent in " + token);
      }
    }
    const auto& labels = g.labels();
    const auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) throw Error(ErrorCode::Parse, "unknown generator " + label);
    const int letter = static_cast<int>(it - labels.begin()) + 1;
    for (int i = 0; i < std::abs(exponent); ++i) w.push_back(exponent > 0 ? letter : -letter);
    token.clear();
  };
  for (char ch : text) {
    if (ch == ' ' || ch == '*' || ch == ',') {
      flush();
    } else {
      token += ch;
    }
  }
  flush();
  if (w.empty()) throw Error(ErrorCode::Parse, "empty word");
  return w;
}

// ---- writing ---------------------------------------------------------------

inline std::string format_double(double x) {
  if (x == 0.0) return "0";  // folds -0
  if (!std::isfinite(x)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace detail {

inline void write_string(std::string& out, const std::string& s) {
  out += Json(s).dump();
}

inline void write(std::string& out, const Json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  // Short arrays of scalars (pairs, words) stay on one line.
  auto flat = [](const Json& a) {
    if (!a.is_array() || a.size() > 32) return false;
    return std::all_of(a.begin(), a.end(), [](const Json& e) {
      return e.is_primitive() || (e.is_array() && e.size() <= 2 &&
                                  std::all_of(e.begin(), e.end(),
                                              [](const Json& x) { return x.is_primitive(); }));
    });
  };
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
        out += pad;
        write_string(out, it.key());
        out += ": ";
        write(out, it.value(), indent, depth + 1);
      }
      out += "\n" + close_pad + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      if (flat(j)) {
        out += "[";
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          write(out, j[i], indent, depth + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        write(out, j[i], indent, depth + 1);
      }
      out += "\n" + close_pad + "]";
      return;
    }
    case Json::value_t::number_float:
      out += format_double(j.get<double>());
      return;
    default:
      out += j.dump();
      return;
  }
}

}  // namespace detail

/// Indented JSON with 17-digit doubles and a trailing newline.
inline std::string dump(const Json& j, int indent = 2) {
  std::string out;
  detail::write(out, j, indent, 0);
  out += '\n';
  return out;
}

inline Json to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Json to_json(const Vec3& v) {
  return Json::array({to_json(v[0]), to_json(v[1]), to_json(v[2])});
}

inline Json to_json(const ProjPoint& p) { return to_json(p.coords()); }
inline Json to_json(const ProjLine& l) { return to_json(l.coords()); }

inline Json to_json(const Mat3& m) {
  Json rows = Json::array();
  for (int r = 0; r < 3; ++r) {
    rows.push_back(Json::array({to_json(m(r, 0)), to_json(m(r, 1)), to_json(m(r, 2))}));
  }
  return rows;
}

template <class T>
Json to_json_list(const std::vector<T>& xs) {
  Json a = Json::array();
  for (const T& x : xs) a.push_back(to_json(x));
  return a;
}

inline Json to_json(const Word& w) {
  Json a = Json::array();
  for (int letter : w) a.push_back(letter);
  return a;
}

inline Json to_json(const LimitSetDesc& d) {
  Json j;
  j["kind"] = to_string(d.kind);
  j["lines"] = to_json_list(d.lines);
  j["isolated_points"] = to_json_list(d.isolated_points);
  return j;
}

inline Json to_json(const ElementClass& c) {
  Json j;
  j["kind"] = to_string(c.kind);
  j["order"] = c.order ? Json(*c.order) : Json(nullptr);
  Json ev = Json::array();
  for (Complex z : c.eigenvalues) ev.push_back(to_json(z));
  j["eigenvalues"] = ev;
  j["fixed_points"] = to_json_list(c.fixed_points);
  j["invariant_lines"] = to_json_list(c.invariant_lines);
  return j;
}

inline Json to_json(const Subspace& s) {
  Json j;
  j["kind"] = to_string(s.kind);
  if (s.kind == Subspace::Kind::Point) j["coords"] = to_json(s.point);
  if (s.kind == Subspace::Kind::Line) j["dual_coords"] = to_json(s.line);
  return j;
}

inline Json to_json(const PseudoProjMap& s) {
  Json j;
  j["matrix"] = to_json(s.matrix());
  j["rank"] = s.rank();
  j["kernel"] = to_json(s.kernel());
  j["image"] = to_json(s.image());
  return j;
}

inline Json to_json(const DualAccumulation& a, const GroupPresentation& g) {
  Json j;
  j["cluster_radius"] = a.cluster_radius;
  Json lines = Json::array();
  for (std::size_t i = 0; i < a.lines.size(); ++i) {
    Json l;
    l["dual_coords"] = to_json(a.lines[i]);
    l["witness"] = to_json(a.line_witnesses[i]);
    l["word"] = g.spell(a.line_witnesses[i]);
    lines.push_back(l);
  }
  j["lines"] = lines;
  Json points = Json::array();
  for (std::size_t i = 0; i < a.isolated_points.size(); ++i) {
    Json p;
    p["coords"] = to_json(a.isolated_points[i]);
    p["witness"] = to_json(a.point_witnesses[i]);
    p["word"] = g.spell(a.point_witnesses[i]);
    points.push_back(p);
  }
  j["isolated_points"] = points;
  Json skipped = Json::array();
  for (const Word& w : a.unclassified) skipped.push_back(g.spell(w));
  j["unclassified"] = skipped;
  return j;
}

inline Json to_json(const GroupDiagnostics& d, const GroupPresentation& g) {
  Json j;
  Json v;
  v["verdict"] = d.discreteness.witness_found ? "NonDiscreteWitness" : "NoWitness";
  if (d.discreteness.witness_found) {
    v["witness"] = to_json(d.discreteness.witness);
    v["word"] = g.spell(d.discreteness.witness);
    v["reason"] = d.discreteness.reason;
  }
  j["discreteness"] = v;
  j["global_fixed_point"] =
      d.global_fixed_point ? to_json(*d.global_fixed_point) : Json(nullptr);
  j["invariant_line"] = d.invariant_line ? to_json(*d.invariant_line) : Json(nullptr);
  j["gp3"] = d.gp3;
  j["gp4"] = d.gp4;
  return j;
}

inline Json to_json(const GroupPresentation& g) {
  Json gens = Json::array();
  for (std::size_t i = 0; i < g.size(); ++i) {
    Json e;
    e["label"] = g.labels()[i];
    e["matrix"] = to_json(g.generators()[i].matrix());
    gens.push_back(e);
  }
  Json j;
  j["generators"] = gens;
  return j;
}

/// One accumulation line per row: dual coordinates, then the witness word.
inline std::string lines_csv(const DualAccumulation& a, const GroupPresentation& g) {
  std::string out = "re1,im1,re2,im2,re3,im3,word\n";
  for (std::size_t i = 0; i < a.lines.size(); ++i) {
    const Vec3& v = a.lines[i].coords();
    for (int k = 0; k < 3; ++k) {
      out += format_double(v[k].real()) + "," + format_double(v[k].imag()) + ",";
    }
    out += g.spell(a.line_witnesses[i]) + "\n";
  }
  return out;
}

/// Writes text to path; returns false if the file cannot be written.
inline bool write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return false;
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  out.close();
  return static_cast<bool>(out);
}

}  // namespace kleinian::io
