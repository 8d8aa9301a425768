#pragma once

// JSON documents for spaces, elements and PL functions; CSV curves.

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "canonlab/legendre.hpp"
#include "canonlab/lp_canon.hpp"
#include "canonlab/measure.hpp"

namespace canonlab {

using Json = nlohmann::json;

/// Whole file as text; InvalidInput when unreadable.
std::string read_text(const std::string& path);
/// ParseError with the byte offset when malformed.
Json parse_json(const std::string& text, const std::string& origin);
Json read_json(const std::string& path);

/// {"base_weights": [...], "fiber_cells": n, "orthogonal_part": bool}
ExtensionPair space_from_json(const Json& doc);
/// {"rows": [[...]], "plus": [...], "minus": [...]}; absent fibers are zero.
LatticeElement element_from_json(const Json& doc, const ExtensionPair& pair);
Json element_to_json(const LatticeElement& f, const ExtensionPair& pair);
LatticeElement load_element(const std::string& path, const ExtensionPair& pair);
/// A single element document or {"elements": [doc, ...]}.
std::vector<LatticeElement> load_tuple(const std::string& path, const ExtensionPair& pair);

/// {"lower", "upper", "breakpoints", "slopes", "anchor": [x, value]}; null bounds are unbounded.
PLConvexFn pl_from_json(const Json& doc);
Json pl_to_json(const PLConvexFn& phi);

Json base_to_json(const LpCanonicalBase& cb);

/// CSV of a partial family: header "t,atom_0,…", one row per grid point.
std::string curve_csv(const LpCanonicalBase& cb);
void emit_curve(const LpCanonicalBase& cb, const std::string& path);

/// Numeric helpers for documents: array of numbers at a JSON pointer.
std::vector<double> number_array(const Json& doc, const std::string& pointer);

std::uint64_t fnv1a(const std::string& bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace canonlab
