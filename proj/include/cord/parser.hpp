#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cord/errors.hpp"
#include "cord/model.hpp"

namespace cord {

// ---------------------------------------------------------------------------
// Parse tree for .cmf model files. Declaration order is preserved; lowering
// to the core types happens in lower().
// ---------------------------------------------------------------------------

struct VarDecl {
    std::vector<std::string> names;
    SourceLoc loc;
};

struct ExoDecl {
    struct Item {
        std::string name;
        std::optional<Distribution> dist;
    };
    std::vector<Item> items;
    SourceLoc loc;
};

struct ParamDecl {
    struct Item {
        std::string name;
        std::optional<double> value;
    };
    std::vector<Item> items;
    SourceLoc loc;
};

struct EqDecl {
    std::string name;
    ExprPtr lhs, rhs;                  // null when structure-only
    std::vector<std::string> depends;  // structure-only dependency list
    SourceLoc loc;

    bool structural() const { return !lhs; }
};

struct DdtDecl {
    std::string var;
    ExprPtr rhs;  // null when structure-only
    std::vector<std::string> depends;
    SourceLoc loc;

    bool structural() const { return !rhs; }
};

struct SelfregDecl {
    std::vector<std::string> names;
    SourceLoc loc;
};

struct PositiveDecl {
    std::vector<std::string> names;
    SourceLoc loc;
};

struct PromoteDecl {
    std::string from, to;  // to == from when no rename given
    SourceLoc loc;
};

using Decl = std::variant<VarDecl, ExoDecl, ParamDecl, EqDecl, DdtDecl, SelfregDecl,
                          PositiveDecl, PromoteDecl>;

struct Block {
    enum class Kind { model, dynamics, extend };
    Kind kind = Kind::model;
    std::string name;
    std::string base;  // extend blocks only
    std::vector<Decl> decls;
    SourceLoc loc;
};

struct ModelFile {
    std::string filename;
    std::vector<Block> blocks;
};

/// Lowered content of one file, cross-references resolved.
struct LoweredFile {
    std::vector<IncidenceModel> models;
    std::vector<DynamicalModel> dynamics;
    std::vector<ExtensionSpec> extensions;

    const IncidenceModel* find_model(const std::string& name) const;
    const DynamicalModel* find_dynamics(const std::string& name) const;
    const ExtensionSpec* find_extension(const std::string& name) const;
};

/// Parses a .cmf document. Throws ParseError with file:line:col location.
ModelFile parse(const std::string& text, const std::string& filename = "<input>");

/// Resolves and validates a parsed file into core types. Throws
/// ValidationError on unresolved identifiers, duplicates, or bad structure.
LoweredFile lower(const ModelFile& file);

/// Renders a parse tree back to .cmf text. parse(serialize(parse(t))) lowers
/// to the same representation as parse(t).
std::string serialize(const ModelFile& file);

/// Reads, parses and lowers a file from disk.
LoweredFile load_file(const std::string& path);

}  // namespace cord
