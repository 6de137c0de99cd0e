#include "nisim/dsl.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace nisim {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Token {
    std::string text;
    SourcePos pos;
};

std::vector<std::vector<Token>> tokenize(std::string_view text) {
    std::vector<std::vector<Token>> lines;
    std::size_t start = 0;
    int line_no = 1;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        std::vector<Token> tokens;
        std::size_t i = 0;
        while (i < line.size()) {
            if (std::isspace(static_cast<unsigned char>(line[i]))) {
                ++i;
                continue;
            }
            std::size_t j = i;
            while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) {
                ++j;
            }
            tokens.push_back(Token{std::string(line.substr(i, j - i)),
                                   SourcePos{line_no, static_cast<int>(i) + 1}});
            i = j;
        }
        if (!tokens.empty()) {
            lines.push_back(std::move(tokens));
        }
        if (end == text.size()) {
            break;
        }
        start = end + 1;
        ++line_no;
    }
    return lines;
}

double parse_full_double(std::string_view text, SourcePos pos) {
    const std::string buf(text);
    char* end = nullptr;
    const double value = std::strtod(buf.c_str(), &end);
    if (buf.empty() || end != buf.c_str() + buf.size() || !std::isfinite(value)) {
        throw DslError(pos, "bad numeric literal '" + buf + "'");
    }
    return value;
}

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t end = text.find(sep, start);
        if (end == std::string_view::npos) {
            parts.emplace_back(text.substr(start));
            return parts;
        }
        parts.emplace_back(text.substr(start, end - start));
        start = end + 1;
    }
}

SubsystemDecl parse_subsystem_decl(const Token& token) {
    const std::string& text = token.text;
    const std::size_t colon = text.find(':');
    if (colon == std::string::npos || colon == 0) {
        throw DslError(token.pos, "subsystem declaration must look like label:dim");
    }
    SubsystemDecl decl;
    decl.pos = token.pos;
    decl.label = text.substr(0, colon);

    std::size_t i = colon + 1;
    std::size_t dim_end = i;
    while (dim_end < text.size() && std::isdigit(static_cast<unsigned char>(text[dim_end]))) {
        ++dim_end;
    }
    if (dim_end == i) {
        throw DslError(token.pos, "missing dimension in subsystem declaration '" + text + "'");
    }
    decl.dim = static_cast<int>(parse_full_double(text.substr(i, dim_end - i), token.pos));
    if (decl.dim < 2) {
        throw DslError(token.pos, "subsystem '" + decl.label + "' needs dim >= 2");
    }

    if (dim_end < text.size()) {
        if (text[dim_end] != '{' || text.back() != '}') {
            throw DslError(token.pos, "basis list must be {name,name,...}");
        }
        const std::string body = text.substr(dim_end + 1, text.size() - dim_end - 2);
        for (const std::string& group : split(body, ',')) {
            std::vector<std::string> names = split(group, '|');
            for (const std::string& name : names) {
                if (name.empty()) {
                    throw DslError(token.pos, "empty basis name in '" + text + "'");
                }
            }
            decl.basis_groups.push_back(std::move(names));
        }
        if (static_cast<int>(decl.basis_groups.size()) != decl.dim) {
            throw DslError(token.pos, "subsystem '" + decl.label + "' declares " +
                                          std::to_string(decl.basis_groups.size()) +
                                          " basis names for dim " + std::to_string(decl.dim));
        }
    } else {
        for (int k = 0; k < decl.dim; ++k) {
            decl.basis_groups.push_back({std::to_string(k)});
        }
    }
    return decl;
}

std::pair<std::string, std::string> parse_key_value(const Token& token) {
    const std::size_t eq = token.text.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 >= token.text.size()) {
        throw DslError(token.pos, "expected key=value, got '" + token.text + "'");
    }
    return {token.text.substr(0, eq), token.text.substr(eq + 1)};
}

/// Keyword-argument view over an element directive with strict key checking.
class ArgReader {
  public:
    ArgReader(const ElementDirective& element, SourcePos pos) : element_(element), pos_(pos) {}

    double angle(const std::string& key, double fallback) {
        if (const std::string* raw = find(key)) {
            return parse_angle_expr(*raw, pos_);
        }
        return fallback;
    }

    bool flag(const std::string& key, bool fallback) {
        if (const std::string* raw = find(key)) {
            if (*raw == "true") {
                return true;
            }
            if (*raw == "false") {
                return false;
            }
            throw DslError(pos_, "argument '" + key + "' must be true or false");
        }
        return fallback;
    }

    void finish() const {
        for (std::size_t i = 0; i < element_.args.size(); ++i) {
            if (!used_[i]) {
                throw DslError(pos_, "unknown argument '" + element_.args[i].first +
                                         "' for element " + element_.kind);
            }
        }
    }

  private:
    const std::string* find(const std::string& key) {
        if (used_.size() != element_.args.size()) {
            used_.assign(element_.args.size(), false);
        }
        for (std::size_t i = 0; i < element_.args.size(); ++i) {
            if (element_.args[i].first == key) {
                used_[i] = true;
                return &element_.args[i].second;
            }
        }
        return nullptr;
    }

    const ElementDirective& element_;
    SourcePos pos_;
    std::vector<bool> used_ = std::vector<bool>(element_.args.size(), false);
};

Vector kron_vector(const Vector& a, const Vector& b) {
    Vector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        for (Eigen::Index j = 0; j < b.size(); ++j) {
            out(i * b.size() + j) = a(i) * b(j);
        }
    }
    return out;
}

template <typename Fn>
auto at_pos(SourcePos pos, Fn&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const DslError&) {
        throw;
    } catch (const std::exception& e) {
        throw DslError(pos, e.what());
    }
}

}  // namespace

DslError::DslError(SourcePos pos, const std::string& message)
    : std::runtime_error("line " + std::to_string(pos.line) + ", col " +
                         std::to_string(pos.col) + ": " + message),
      pos_(pos) {}

double parse_angle_expr(std::string_view text, SourcePos pos) {
    if (text.empty()) {
        throw DslError(pos, "empty angle expression");
    }
    const std::size_t pi_at = text.find("pi");
    if (pi_at == std::string_view::npos) {
        return parse_full_double(text, pos);
    }
    const std::string_view prefix = text.substr(0, pi_at);
    const std::string_view suffix = text.substr(pi_at + 2);
    double coefficient = 1.0;
    if (prefix == "-") {
        coefficient = -1.0;
    } else if (prefix == "+" || prefix.empty()) {
        coefficient = 1.0;
    } else {
        coefficient = parse_full_double(prefix, pos);
    }
    double divisor = 1.0;
    if (!suffix.empty()) {
        if (suffix[0] != '/' || suffix.size() < 2) {
            throw DslError(pos, "bad angle expression '" + std::string(text) + "'");
        }
        divisor = parse_full_double(suffix.substr(1), pos);
        if (divisor == 0.0) {
            throw DslError(pos, "division by zero in angle expression");
        }
    }
    return coefficient * kPi / divisor;
}

BeamlineDoc parse(std::string_view text) {
    BeamlineDoc doc;
    int last_line = 0;
    std::optional<SourcePos> analyze_pos;
    bool have_space = false;
    bool have_input = false;
    std::vector<std::string> slot_names;

    for (const auto& tokens : tokenize(text)) {
        const Token& head = tokens.front();
        last_line = head.pos.line;
        if (analyze_pos) {
            throw DslError(head.pos, "directives after analyze");
        }

        if (head.text == "space") {
            if (have_space) {
                throw DslError(head.pos, "duplicate space directive");
            }
            have_space = true;
            SpaceDirective space;
            if (tokens.size() < 2) {
                throw DslError(head.pos, "space directive needs at least one subsystem");
            }
            for (std::size_t i = 1; i < tokens.size(); ++i) {
                space.decls.push_back(parse_subsystem_decl(tokens[i]));
            }
            doc.directives.push_back({head.pos, std::move(space)});
        } else if (head.text == "input") {
            if (have_input) {
                throw DslError(head.pos, "duplicate input directive");
            }
            have_input = true;
            InputDirective input;
            if (tokens.size() < 2) {
                throw DslError(head.pos, "input directive needs at least one assignment");
            }
            for (std::size_t i = 1; i < tokens.size(); ++i) {
                input.assignments.push_back(parse_key_value(tokens[i]));
            }
            doc.directives.push_back({head.pos, std::move(input)});
        } else if (head.text == "element") {
            if (tokens.size() < 2) {
                throw DslError(head.pos, "element directive needs a kind");
            }
            ElementDirective element;
            element.kind = tokens[1].text;
            for (std::size_t i = 2; i < tokens.size(); ++i) {
                element.args.push_back(parse_key_value(tokens[i]));
            }
            doc.directives.push_back({head.pos, std::move(element)});
        } else if (head.text == "slot") {
            if (tokens.size() < 3) {
                throw DslError(head.pos, "slot directive needs a name and a subsystem");
            }
            SlotDirective slot;
            slot.name = tokens[1].text;
            slot.subsystem = tokens[2].text;
            for (const std::string& seen : slot_names) {
                if (seen == slot.name) {
                    throw DslError(tokens[1].pos, "duplicate slot name '" + slot.name + "'");
                }
            }
            slot_names.push_back(slot.name);
            if (tokens.size() > 3) {
                const auto [key, value] = parse_key_value(tokens[3]);
                if (key != "pair") {
                    throw DslError(tokens[3].pos, "slot only accepts pair=name,name");
                }
                const std::vector<std::string> names = split(value, ',');
                if (names.size() != 2 || names[0].empty() || names[1].empty()) {
                    throw DslError(tokens[3].pos, "pair needs exactly two basis names");
                }
                slot.pair = std::make_pair(names[0], names[1]);
                if (tokens.size() > 4) {
                    throw DslError(tokens[4].pos, "unexpected token after slot pair");
                }
            }
            doc.directives.push_back({head.pos, std::move(slot)});
        } else if (head.text == "analyze") {
            if (tokens.size() != 3) {
                throw DslError(head.pos, "analyze directive needs a subsystem and an angle");
            }
            AnalyzeDirective analyze;
            analyze.subsystem = tokens[1].text;
            analyze.angle_expr = tokens[2].text;
            parse_angle_expr(analyze.angle_expr, tokens[2].pos);
            analyze_pos = head.pos;
            doc.directives.push_back({head.pos, std::move(analyze)});
        } else {
            throw DslError(head.pos, "unknown directive '" + head.text + "'");
        }
    }

    const SourcePos end_pos{last_line + 1, 1};
    if (!have_space) {
        throw DslError(end_pos, "missing space directive");
    }
    if (!have_input) {
        throw DslError(end_pos, "missing input directive");
    }
    if (!analyze_pos) {
        throw DslError(end_pos, "missing analyze directive");
    }
    return doc;
}

std::string render(const BeamlineDoc& doc) {
    std::ostringstream out;
    for (const auto& directive : doc.directives) {
        if (const auto* space = std::get_if<SpaceDirective>(&directive.payload)) {
            out << "space";
            for (const auto& decl : space->decls) {
                out << ' ' << decl.label << ':' << decl.dim << '{';
                for (std::size_t g = 0; g < decl.basis_groups.size(); ++g) {
                    if (g) {
                        out << ',';
                    }
                    for (std::size_t n = 0; n < decl.basis_groups[g].size(); ++n) {
                        out << (n ? "|" : "") << decl.basis_groups[g][n];
                    }
                }
                out << '}';
            }
        } else if (const auto* input = std::get_if<InputDirective>(&directive.payload)) {
            out << "input";
            for (const auto& [label, expr] : input->assignments) {
                out << ' ' << label << '=' << expr;
            }
        } else if (const auto* element = std::get_if<ElementDirective>(&directive.payload)) {
            out << "element " << element->kind;
            for (const auto& [key, value] : element->args) {
                out << ' ' << key << '=' << value;
            }
        } else if (const auto* slot = std::get_if<SlotDirective>(&directive.payload)) {
            out << "slot " << slot->name << ' ' << slot->subsystem;
            if (slot->pair) {
                out << " pair=" << slot->pair->first << ',' << slot->pair->second;
            }
        } else {
            const auto& analyze = std::get<AnalyzeDirective>(directive.payload);
            out << "analyze " << analyze.subsystem << ' ' << analyze.angle_expr;
        }
        out << '\n';
    }
    return out.str();
}

Beamline lower(const BeamlineDoc& doc) {
    const SpaceDirective* space_directive = nullptr;
    const InputDirective* input_directive = nullptr;
    SourcePos space_pos;
    SourcePos input_pos;
    for (const auto& directive : doc.directives) {
        if (const auto* space = std::get_if<SpaceDirective>(&directive.payload)) {
            space_directive = space;
            space_pos = directive.pos;
        } else if (const auto* input = std::get_if<InputDirective>(&directive.payload)) {
            input_directive = input;
            input_pos = directive.pos;
        }
    }
    if (space_directive == nullptr || input_directive == nullptr) {
        throw DslError(SourcePos{1, 1}, "document needs space and input directives");
    }

    std::vector<SubsystemSpec> subsystems;
    for (const auto& decl : space_directive->decls) {
        subsystems.push_back(at_pos(decl.pos, [&] {
            std::vector<std::string> names;
            std::vector<std::pair<std::string, int>> aliases;
            for (std::size_t g = 0; g < decl.basis_groups.size(); ++g) {
                names.push_back(decl.basis_groups[g].front());
                for (std::size_t n = 1; n < decl.basis_groups[g].size(); ++n) {
                    aliases.emplace_back(decl.basis_groups[g][n], static_cast<int>(g));
                }
            }
            return SubsystemSpec::make(decl.label, std::move(names), std::move(aliases));
        }));
    }
    const ProductSpace space =
        at_pos(space_pos, [&] { return make_space(std::move(subsystems)); });

    Vector amplitudes(1);
    amplitudes(0) = Complex(1.0, 0.0);
    for (const auto& sub : space.subsystems) {
        const std::string* expr = nullptr;
        for (const auto& [label, value] : input_directive->assignments) {
            if (label == sub.label) {
                if (expr != nullptr) {
                    throw DslError(input_pos, "subsystem '" + sub.label + "' assigned twice");
                }
                expr = &value;
            }
        }
        if (expr == nullptr) {
            throw DslError(input_pos, "input does not assign subsystem '" + sub.label + "'");
        }
        Vector local = Vector::Zero(sub.dim);
        if (*expr == "+x") {
            if (sub.dim != 2) {
                throw DslError(input_pos, "+x input needs a 2-dim subsystem, '" + sub.label +
                                              "' has dim " + std::to_string(sub.dim));
            }
            local(0) = local(1) = 1.0 / std::sqrt(2.0);
        } else {
            const int idx = at_pos(input_pos, [&] { return sub.basis_index(*expr); });
            local(idx) = Complex(1.0, 0.0);
        }
        amplitudes = kron_vector(amplitudes, local);
    }
    for (const auto& [label, value] : input_directive->assignments) {
        at_pos(input_pos, [&] { return space.subsystem_index(label); });
    }

    std::vector<BeamStage> stages;
    std::vector<std::string> slot_order;
    AnalyzerSpec analyzer;
    int projection_stages = 0;

    for (const auto& directive : doc.directives) {
        const SourcePos pos = directive.pos;
        if (const auto* element = std::get_if<ElementDirective>(&directive.payload)) {
            ArgReader args(*element, pos);
            const std::string& kind = element->kind;
            auto push_unitary = [&](ElementOperator op, bool adjoint) {
                stages.push_back(adjoint ? op.adjoint() : std::move(op));
            };
            at_pos(pos, [&] {
                if (kind == "mwp_entangler") {
                    EntanglerConfig config{EntanglerKind::mwp,
                                           LarmorPhase::of(args.angle("phi", 0.0)), 1.0,
                                           args.flag("redefined", true)};
                    const bool adjoint = args.flag("adjoint", false);
                    args.finish();
                    push_unitary(mwp_entangler(space, config), adjoint);
                } else if (kind == "rf3_entangler") {
                    EntanglerConfig config{EntanglerKind::rf3,
                                           LarmorPhase::of(args.angle("phi", 0.0)), 1.0,
                                           args.flag("redefined", true)};
                    const bool adjoint = args.flag("adjoint", false);
                    args.finish();
                    push_unitary(rf3_entangler(space, config), adjoint);
                } else if (kind == "rf2_entangler") {
                    EntanglerConfig config{EntanglerKind::rf2,
                                           LarmorPhase::of(args.angle("phi", 0.0)),
                                           args.angle("delta", 0.0),
                                           args.flag("redefined", true)};
                    const bool adjoint = args.flag("adjoint", false);
                    args.finish();
                    push_unitary(rf2_entangler(space, config), adjoint);
                } else if (kind == "larmor") {
                    const double phi = args.angle("phi", 0.0);
                    args.finish();
                    stages.push_back(larmor(space, LarmorPhase::of(phi)));
                } else if (kind == "crystal_beamsplitter") {
                    const bool adjoint = args.flag("adjoint", false);
                    args.finish();
                    push_unitary(crystal_beamsplitter(space), adjoint);
                } else if (kind == "dc_flipper") {
                    const bool adjoint = args.flag("adjoint", false);
                    args.finish();
                    push_unitary(dc_flipper(space), adjoint);
                } else if (kind == "crystal_rf_entangler") {
                    const bool adjoint = args.flag("adjoint", false);
                    args.finish();
                    push_unitary(crystal_rf_entangler(space), adjoint);
                } else if (kind == "energy_recombiner") {
                    const bool adjoint = args.flag("adjoint", false);
                    args.finish();
                    push_unitary(energy_recombiner(space), adjoint);
                } else if (kind == "blade_projection") {
                    args.finish();
                    if (++projection_stages > 1) {
                        throw DslError(pos,
                                       "at most one projection stage besides the analyzer");
                    }
                    stages.push_back(ProjectionStage{blade_projection(space), "blade"});
                } else {
                    throw DslError(pos, "unknown element kind '" + kind + "'");
                }
                return 0;
            });
        } else if (const auto* slot = std::get_if<SlotDirective>(&directive.payload)) {
            const SubsystemSpec& sub = at_pos(pos, [&]() -> const SubsystemSpec& {
                return space.subsystem(slot->subsystem);
            });
            std::optional<BasisPair> pair;
            if (slot->pair) {
                const int i = at_pos(pos, [&] { return sub.basis_index(slot->pair->first); });
                const int j = at_pos(pos, [&] { return sub.basis_index(slot->pair->second); });
                if (i == j) {
                    throw DslError(pos, "slot pair names the same basis state twice");
                }
                pair = *slot->pair;
            } else if (sub.dim != 2) {
                throw DslError(pos, "slot '" + slot->name + "' on subsystem '" + sub.label +
                                        "' (dim " + std::to_string(sub.dim) +
                                        ") needs pair=name,name");
            }
            stages.push_back(PhaseSlot{slot->name, slot->subsystem, pair});
            slot_order.push_back(slot->name);
        } else if (const auto* analyze = std::get_if<AnalyzeDirective>(&directive.payload)) {
            const SubsystemSpec& sub = at_pos(pos, [&]() -> const SubsystemSpec& {
                return space.subsystem(analyze->subsystem);
            });
            if (sub.dim != 2) {
                throw DslError(pos, "analyzer needs a 2-dim subsystem");
            }
            analyzer.subsystem = analyze->subsystem;
            analyzer.angle = parse_angle_expr(analyze->angle_expr, pos);
        }
    }

    // Canonical axis ordering when the slots use the conventional names.
    std::vector<std::string> axes;
    bool conventional = true;
    for (const auto& name : slot_order) {
        if (name != "alpha" && name != "chi" && name != "gamma") {
            conventional = false;
            break;
        }
    }
    if (conventional) {
        for (const char* name : {"alpha", "chi", "gamma"}) {
            for (const auto& seen : slot_order) {
                if (seen == name) {
                    axes.emplace_back(name);
                }
            }
        }
    } else {
        axes = slot_order;
    }

    StateVector input(space, std::move(amplitudes));
    return Beamline{space,
                    std::move(input),
                    std::move(stages),
                    analyzer,
                    std::move(axes),
                    std::vector<double>(slot_order.size(), 0.0)};
}

Beamline load_beamline(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) {
        throw std::runtime_error("cannot open beamline file '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return lower(parse(buffer.str()));
}

}  // namespace nisim
