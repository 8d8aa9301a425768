#include "canonlab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "canonlab/error.hpp"

namespace canonlab {

namespace {

const Json& at(const Json& doc, const std::string& pointer) {
  const Json::json_pointer ptr(pointer);
  if (!doc.contains(ptr)) throw ParseError("missing required field", pointer);
  return doc.at(ptr);
}

double number(const Json& v, const std::string& pointer) {
  if (!v.is_number()) throw ParseError("expected a number", pointer);
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ParseError("number is not finite", pointer);
  return d;
}

std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json parse_json(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError("malformed JSON in " + origin, "byte " + std::to_string(e.byte));
  }
}

Json read_json(const std::string& path) { return parse_json(read_text(path), "'" + path + "'"); }

std::vector<double> number_array(const Json& doc, const std::string& pointer) {
  const Json& arr = at(doc, pointer);
  if (!arr.is_array()) throw ParseError("expected an array", pointer);
  std::vector<double> out;
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(number(arr[i], pointer + "/" + std::to_string(i)));
  return out;
}

ExtensionPair space_from_json(const Json& doc) {
  if (!doc.is_object()) throw ParseError("space document must be an object", "");
  const std::vector<double> w = number_array(doc, "/base_weights");
  const Json& n = at(doc, "/fiber_cells");
  if (!n.is_number_integer() || n.get<long long>() < 1) throw ParseError("expected a positive integer", "/fiber_cells");
  bool orth = false;
  if (doc.contains("orthogonal_part")) {
    if (!doc["orthogonal_part"].is_boolean()) throw ParseError("expected a boolean", "/orthogonal_part");
    orth = doc["orthogonal_part"].get<bool>();
  }
  return ExtensionPair(w, static_cast<std::size_t>(n.get<long long>()), orth);
}

LatticeElement element_from_json(const Json& doc, const ExtensionPair& pair) {
  if (!doc.is_object()) throw ParseError("element document must be an object", "");
  const Json& rows = at(doc, "/rows");
  if (!rows.is_array()) throw ParseError("expected an array of rows", "/rows");
  if (rows.size() != pair.base_atoms())
    throw ParseError("expected " + std::to_string(pair.base_atoms()) + " rows", "/rows");
  std::vector<std::vector<double>> r;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::string ptr = "/rows/" + std::to_string(i);
    r.push_back(number_array(doc, ptr));
    if (r.back().size() != pair.fiber_cells())
      throw ParseError("row length differs from fiber_cells = " + std::to_string(pair.fiber_cells()), ptr);
  }
  std::vector<double> plus, minus;
  for (const char* key : {"plus", "minus"}) {
    if (!doc.contains(key)) continue;
    const std::string ptr = std::string("/") + key;
    auto v = number_array(doc, ptr);
    if (!pair.has_orthogonal()) {
      for (double c : v)
        if (c != 0.0) throw ParseError("nonzero orthogonal fiber but the space has no orthogonal part", ptr);
      continue;
    }
    if (v.size() != pair.fiber_cells()) throw ParseError("fiber length differs from fiber_cells", ptr);
    (key[0] == 'p' ? plus : minus) = std::move(v);
  }
  return pair.from_rows(r, plus, minus);
}

Json element_to_json(const LatticeElement& f, const ExtensionPair& pair) {
  Json doc;
  doc["rows"] = Json::array();
  for (std::size_t i = 0; i < pair.base_atoms(); ++i) {
    const auto r = pair.row(f, i);
    doc["rows"].push_back(std::vector<double>(r.begin(), r.end()));
  }
  if (pair.has_orthogonal()) {
    const auto p = pair.plus_fiber(f), m = pair.minus_fiber(f);
    doc["plus"] = std::vector<double>(p.begin(), p.end());
    doc["minus"] = std::vector<double>(m.begin(), m.end());
  }
  return doc;
}

LatticeElement load_element(const std::string& path, const ExtensionPair& pair) {
  return element_from_json(read_json(path), pair);
}

std::vector<LatticeElement> load_tuple(const std::string& path, const ExtensionPair& pair) {
  const Json doc = read_json(path);
  if (!doc.is_object() || !doc.contains("elements")) return {element_from_json(doc, pair)};
  if (!doc["elements"].is_array() || doc["elements"].empty())
    throw ParseError("expected a nonempty array of element documents", "/elements");
  std::vector<LatticeElement> out;
  for (std::size_t i = 0; i < doc["elements"].size(); ++i) {
    try {
      out.push_back(element_from_json(doc["elements"][i], pair));
    } catch (const ParseError& e) {
      throw ParseError("bad tuple entry", "/elements/" + std::to_string(i) + e.position());
    }
  }
  return out;
}

PLConvexFn pl_from_json(const Json& doc) {
  if (!doc.is_object()) throw ParseError("PL document must be an object", "");
  auto bound = [&](const char* key) -> std::optional<double> {
    if (!doc.contains(key) || doc[key].is_null()) return std::nullopt;
    return number(doc[key], std::string("/") + key);
  };
  const Json& anchor = at(doc, "/anchor");
  if (!anchor.is_array() || anchor.size() != 2) throw ParseError("anchor must be [x, value]", "/anchor");
  std::vector<double> breaks;
  if (doc.contains("breakpoints")) breaks = number_array(doc, "/breakpoints");
  return PLConvexFn(bound("lower"), bound("upper"), std::move(breaks), number_array(doc, "/slopes"),
                    number(anchor[0], "/anchor/0"), number(anchor[1], "/anchor/1"));
}

Json pl_to_json(const PLConvexFn& phi) {
  Json doc;
  doc["lower"] = phi.lower() ? Json(*phi.lower()) : Json(nullptr);
  doc["upper"] = phi.upper() ? Json(*phi.upper()) : Json(nullptr);
  doc["breakpoints"] = phi.breakpoints();
  doc["slopes"] = phi.slopes();
  doc["anchor"] = {phi.anchor_x(), phi.anchor_value()};
  return doc;
}

Json base_to_json(const LpCanonicalBase& cb) {
  Json doc;
  doc["p"] = cb.p;
  doc["pos_norm"] = cb.pos_norm;
  doc["neg_norm"] = cb.neg_norm;
  doc["grid"] = cb.grid;
  if (!cb.intervals) {
    doc["partials"] = Json::array();
    for (std::size_t i = 0; i < cb.values.size(); ++i) {
      const auto v = cb.values[i].values();
      doc["partials"].push_back({{"t", cb.grid[i]}, {"values", std::vector<double>(v.begin(), v.end())}});
    }
  } else {
    doc["intervals"] = Json::array();
    std::size_t k = 0;
    for (std::size_t i = 0; i < cb.grid.size(); ++i)
      for (std::size_t j = i + 1; j < cb.grid.size(); ++j, ++k) {
        const auto v = cb.values[k].values();
        doc["intervals"].push_back(
            {{"t", cb.grid[i]}, {"s", cb.grid[j]}, {"values", std::vector<double>(v.begin(), v.end())}});
      }
  }
  return doc;
}

std::string curve_csv(const LpCanonicalBase& cb) {
  if (cb.intervals) throw InvalidInput("curves are exported from the partial family only");
  const std::size_t atoms = cb.values.empty() ? 0 : cb.values.front().size();
  std::string out = "t";
  for (std::size_t a = 0; a < atoms; ++a) out += ",atom_" + std::to_string(a);
  out += "\n";
  for (std::size_t i = 0; i < cb.values.size(); ++i) {
    out += fmt12(cb.grid[i]);
    for (std::size_t a = 0; a < atoms; ++a) out += "," + fmt12(cb.values[i][a]);
    out += "\n";
  }
  return out;
}

void emit_curve(const LpCanonicalBase& cb, const std::string& path) {
  const std::string text = curve_csv(cb);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  out << text;
  if (!out) throw InvalidInput("write to '" + path + "' failed");
}

std::uint64_t fnv1a(const std::string& bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace canonlab
