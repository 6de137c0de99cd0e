#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "nisim/interferometer.hpp"

namespace nisim {

struct SourcePos {
    int line = 0;  // 1-based
    int col = 0;   // 1-based
};

/// Parse or lowering failure; what() is "line L, col C: message".
class DslError : public std::runtime_error {
  public:
    DslError(SourcePos pos, const std::string& message);

    SourcePos pos() const { return pos_; }

  private:
    SourcePos pos_;
};

/// One subsystem declaration: label, dimension, and per-slot name groups
/// (a group lists every name of one basis slot, canonical name first).
struct SubsystemDecl {
    std::string label;
    int dim = 0;
    std::vector<std::vector<std::string>> basis_groups;
    SourcePos pos;

    bool operator==(const SubsystemDecl& other) const {
        return label == other.label && dim == other.dim && basis_groups == other.basis_groups;
    }
};

struct SpaceDirective {
    std::vector<SubsystemDecl> decls;
    bool operator==(const SpaceDirective&) const = default;
};

struct InputDirective {
    std::vector<std::pair<std::string, std::string>> assignments;
    bool operator==(const InputDirective&) const = default;
};

struct ElementDirective {
    std::string kind;
    std::vector<std::pair<std::string, std::string>> args;
    bool operator==(const ElementDirective&) const = default;
};

struct SlotDirective {
    std::string name;
    std::string subsystem;
    std::optional<std::pair<std::string, std::string>> pair;
    bool operator==(const SlotDirective&) const = default;
};

struct AnalyzeDirective {
    std::string subsystem;
    std::string angle_expr;
    bool operator==(const AnalyzeDirective&) const = default;
};

struct Directive {
    SourcePos pos;
    std::variant<SpaceDirective, InputDirective, ElementDirective, SlotDirective,
                 AnalyzeDirective>
        payload;

    bool operator==(const Directive& other) const { return payload == other.payload; }
};

/// A parsed beamline document: directive list with source positions.
struct BeamlineDoc {
    std::vector<Directive> directives;

    bool operator==(const BeamlineDoc& other) const { return directives == other.directives; }
};

/// Angle literal: plain floating point or a pi expression such as
/// `pi`, `2pi`, `-pi/4`, `3pi/2`.
double parse_angle_expr(std::string_view text, SourcePos pos);

/// Parses `.nbl` text. Comments run from `#` to end of line; LF and CRLF
/// both accepted. Enforces: exactly one `space` and one `input`, unique
/// slot names, and `analyze` present as the last directive.
BeamlineDoc parse(std::string_view text);

/// Canonical text form; parse(render(doc)) yields an equal directive list.
std::string render(const BeamlineDoc& doc);

/// Semantic checks (labels, shapes, pairs) and construction of the runnable
/// beamline. Errors carry the offending directive's source position.
Beamline lower(const BeamlineDoc& doc);

/// parse + lower of a file on disk.
Beamline load_beamline(const std::string& path);

}  // namespace nisim
