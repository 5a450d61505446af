#pragma once

#include "ultra/dynamics.hpp"
#include "ultra/kms.hpp"

#include <map>
#include <string>

namespace ultra {

/// Malformed input text. `code` is e.g. Syntax, MissingVersion, UnknownFamily, Semantic.
class DocumentError : public std::runtime_error {
public:
    DocumentError(std::string code, const std::string& what, int line = 0, int column = 0)
        : std::runtime_error(what), code(std::move(code)), line(line), column(column) {}
    std::string code;
    int line;
    int column;
};

/// "v0" or "V[3]".
VertexRef parse_vertex_ref(const std::string& text);
/// "e" or "g[3]".
EdgeRef parse_edge_ref(const std::string& text);

/**
 * Set expressions: FINITE(refs), FAMILY(id), UNION(...), INTER(...), and
 * infix MINUS. `bases` gives the base index of each vertex family.
 */
SymbolicVertexSet parse_set_expr(const std::string& text, const std::map<std::string, Index>& bases);
SymbolicVertexSet parse_set_expr(const std::string& text, const Ultragraph& g);

struct UltragraphDocument {
    std::string version = "1";
    Ultragraph graph;
    EdgeWeight weights;
    bool has_weights = false;
};

UltragraphDocument parse_document(const std::string& text);
Ultragraph parse(const std::string& text);
/// Canonical JSON text; parse(serialize(d)) reproduces d.
std::string serialize_document(const UltragraphDocument& doc);
UltragraphDocument load_document(const std::string& path);

/// FNV-1a 64-bit hash as 16 hex digits.
std::string digest(const std::string& text);

MFunction parse_mfunction(const std::string& text, const Ultragraph& g);
std::string serialize_mfunction(const MFunction& m);

/// {"path": [...], "range": expr} or {"prefix": [...], "cycle": [...]}.
BoundaryPoint parse_point(const std::string& text, const Ultragraph& g);
/// {"path": [...], "set": expr, "excluded_edges": [...], "excluded_sinks": expr}.
Cylinder parse_cylinder(const std::string& text, const Ultragraph& g);

/// Block map file; `target` is the path of the target document if given.
struct BlockMapFile {
    BlockMap map;
    std::string target;
};
BlockMapFile parse_block_map(const std::string& text);

std::string read_file(const std::string& path);

}  // namespace ultra
