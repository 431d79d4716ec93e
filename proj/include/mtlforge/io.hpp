#pragma once

// JSON and text file formats: timed words (.tw), flat formulas (.flat),
// formulas (.mtl), machines (.cm) and harness reports.

#include "mtlforge/counter_machine.hpp"
#include "mtlforge/harness.hpp"
#include "mtlforge/parser.hpp"
#include "mtlforge/past_elim.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace mtlf {

using json = nlohmann::ordered_json;

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path + "'");
    out << text;
}

inline json parse_json_text(const std::string& text, const std::string& where) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw IoError(where + ": " + e.what());
    }
}

// ── Alphabets ──

inline json alphabet_to_json(const Alphabet& a) { return json(a.props()); }

inline Alphabet alphabet_from_json(const json& j, const std::string& where) {
    if (!j.is_array()) throw IoError(where + ": expected an array of proposition names");
    std::vector<std::string> v;
    for (std::size_t k = 0; k < j.size(); ++k) {
        if (!j[k].is_string()) throw IoError(where + "[" + std::to_string(k) + "]: expected a string");
        v.push_back(j[k].get<std::string>());
    }
    try {
        return Alphabet(v);
    } catch (const std::exception& e) {
        throw IoError(where + ": " + e.what());
    }
}

// ── Timed words ──

inline json word_to_json(const TimedWord& w) {
    json pts = json::array();
    for (const auto& p : w.points()) pts.push_back({{"props", p.props}, {"t", time_to_string(p.t)}});
    return {{"alphabet", alphabet_to_json(w.alphabet())}, {"points", pts}};
}

inline TimedWord word_from_json(const json& j, const std::string& where = "word") {
    if (!j.is_object()) throw IoError(where + ": expected an object");
    if (!j.contains("alphabet")) throw IoError(where + ": missing \"alphabet\"");
    if (!j.contains("points") || !j["points"].is_array()) throw IoError(where + ": missing \"points\" array");
    Alphabet sigma = alphabet_from_json(j["alphabet"], where + ".alphabet");
    std::vector<TimedPoint> pts;
    const json& ps = j["points"];
    for (std::size_t k = 0; k < ps.size(); ++k) {
        const std::string at = where + ".points[" + std::to_string(k) + "]";
        const json& p = ps[k];
        if (!p.is_object() || !p.contains("props") || !p.contains("t")) throw IoError(at + ": expected {\"props\": [...], \"t\": \"...\"}");
        TimedPoint q;
        if (!p["props"].is_array()) throw IoError(at + ".props: expected an array");
        for (const auto& x : p["props"]) {
            if (!x.is_string()) throw IoError(at + ".props: expected strings");
            q.props.push_back(x.get<std::string>());
        }
        if (!p["t"].is_string()) throw IoError(at + ".t: timestamps are strings such as \"0.3\" or \"3/10\"");
        try {
            q.t = parse_time(p["t"].get<std::string>());
        } catch (const TimeFormatError& e) {
            throw IoError(at + ".t: " + e.what());
        }
        pts.push_back(std::move(q));
    }
    try {
        return make_word(std::move(sigma), std::move(pts));
    } catch (const WordError& e) {
        throw IoError(where + ": " + e.what());
    }
}

inline TimedWord read_word_file(const std::string& path) { return word_from_json(parse_json_text(read_text_file(path), path), path); }
inline std::string word_to_text(const TimedWord& w) { return word_to_json(w).dump(2) + "\n"; }

// ── Formulas ──

// Proposition names occurring in formula text, skipping keywords and operators.
inline Alphabet scan_atoms(std::string_view text) {
    static const std::set<std::string, std::less<>> keywords{"BP", "EP", "true", "false", "act", "wU", "wF", "wG", "inf"};
    std::vector<std::string> out;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (!(std::isalpha(static_cast<unsigned char>(c)) || c == '_')) {
            if (std::isdigit(static_cast<unsigned char>(c)))
                while (i < text.size() && std::isalnum(static_cast<unsigned char>(text[i]))) ++i;
            else
                ++i;
            continue;
        }
        std::size_t e = i;
        while (e < text.size() && (std::isalnum(static_cast<unsigned char>(text[e])) || text[e] == '_')) ++e;
        std::string id(text.substr(i, e - i));
        i = e;
        if (keywords.count(id) || is_reserved_name(id)) continue;
        out.push_back(id);
    }
    return Alphabet(out);
}

// '#' starts a comment in .mtl files.
inline std::string strip_comments(const std::string& text) {
    std::string out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
        out += line + "\n";
    }
    return out;
}

// ── Flat formulas ──

inline json flat_to_json(const FlatFormula& ff) {
    json defs = json::array();
    for (const auto& d : ff.definitions)
        defs.push_back({{"witness", d.witness}, {"body", render_formula(d.body)}, {"relativized", d.relativized}});
    json j{{"core", render_formula(ff.core)}, {"definitions", defs}};
    if (!ff.constraints.empty()) {
        json cs = json::array();
        for (const auto& c : ff.constraints) cs.push_back(render_formula(c));
        j["constraints"] = cs;
    }
    j["base_alphabet"] = alphabet_to_json(ff.base_alphabet);
    j["extended_alphabet"] = alphabet_to_json(ff.extended_alphabet);
    return j;
}

inline FlatFormula flat_from_json(const json& j, const std::string& where = "flat") {
    if (!j.is_object()) throw IoError(where + ": expected an object");
    for (const char* k : {"core", "definitions", "base_alphabet", "extended_alphabet"})
        if (!j.contains(k)) throw IoError(where + ": missing \"" + k + "\"");
    FlatFormula ff;
    ff.base_alphabet = alphabet_from_json(j["base_alphabet"], where + ".base_alphabet");
    ff.extended_alphabet = alphabet_from_json(j["extended_alphabet"], where + ".extended_alphabet");
    auto formula = [&](const json& x, const std::string& at) {
        if (!x.is_string()) throw IoError(at + ": expected formula text");
        try {
            return parse_formula(x.get<std::string>(), ff.extended_alphabet);
        } catch (const ParseError& e) {
            throw IoError(at + ": " + e.what());
        }
    };
    ff.core = formula(j["core"], where + ".core");
    if (!j["definitions"].is_array()) throw IoError(where + ".definitions: expected an array");
    for (std::size_t k = 0; k < j["definitions"].size(); ++k) {
        const std::string at = where + ".definitions[" + std::to_string(k) + "]";
        const json& d = j["definitions"][k];
        if (!d.is_object() || !d.contains("witness") || !d.contains("body") || !d["witness"].is_string())
            throw IoError(at + ": expected {\"witness\", \"body\", \"relativized\"}");
        TemporalDefinition td{d["witness"].get<std::string>(), formula(d["body"], at + ".body"), d.value("relativized", false)};
        if (!ff.extended_alphabet.contains(td.witness)) throw IoError(at + ": witness outside the extended alphabet");
        ff.definitions.push_back(td);
        ff.history.push_back(td);
    }
    if (j.contains("constraints"))
        for (std::size_t k = 0; k < j["constraints"].size(); ++k)
            ff.constraints.push_back(formula(j["constraints"][k], where + ".constraints[" + std::to_string(k) + "]"));
    return ff;
}

// ── Reports ──

inline json grid_to_json(const GridSpec& g) { return {{"max_len", g.max_len}, {"denom", g.denom}, {"horizon", g.horizon}}; }

inline json report_to_json(const EquisatReport& r) {
    json cs = json::array();
    for (const auto& c : r.counterexamples)
        cs.push_back({{"word", word_to_json(c.word)}, {"direction", c.direction}, {"position", c.position}, {"detail", c.detail}});
    return {{"suite", r.suite}, {"seed", r.seed}, {"grid", grid_to_json(r.grid)}, {"checked", r.checked}, {"counterexamples", cs}};
}

inline json pipeline_report(const PipelineResult& p) {
    json passes = json::array();
    for (const auto& s : p.passes) passes.push_back({{"pass", s.pass}, {"size", s.size}, {"fresh", s.fresh}});
    return {{"passes", passes},
            {"fragment", fragment_name(p.fragment)},
            {"base_alphabet", alphabet_to_json(p.base)},
            {"alphabet", alphabet_to_json(p.alphabet)},
            {"output", render_formula(p.output)}};
}

inline json run_to_json(const MachineRun& r) {
    json cs = json::array();
    for (const auto& c : r.configs) cs.push_back({{"label", c.label}, {"counters", c.counters}});
    return {{"halted", r.halted}, {"configs", cs}, {"errors", r.errors}};
}

inline CounterMachine read_machine_file(const std::string& path) {
    try {
        return parse_machine(read_text_file(path));
    } catch (const MachineError& e) {
        throw IoError(path + (e.line ? ":" + std::to_string(e.line) : std::string()) + ": " + e.what());
    }
}

}  // namespace mtlf
