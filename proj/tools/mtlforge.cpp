#include "mtlforge/io.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>

using namespace mtlf;

namespace {

constexpr int kOk = 0, kFalse = 1, kUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct FormulaInput {
    std::string file, text, alphabet;

    std::string source() const {
        if (!file.empty() && !text.empty()) throw UsageError("give either --formula or --text, not both");
        if (!file.empty()) return strip_comments(read_text_file(file));
        if (!text.empty()) return text;
        throw UsageError("a formula is required (--formula FILE or --text FORMULA)");
    }
    // --alphabet wins; otherwise the atoms of the formula, widened by `extra`.
    Alphabet sigma(const std::string& src, const Alphabet& extra = {}) const {
        if (!alphabet.empty()) {
            std::vector<std::string> v;
            std::stringstream ss(alphabet);
            for (std::string p; std::getline(ss, p, ',');)
                if (!p.empty()) v.push_back(p);
            return Alphabet(v);
        }
        return scan_atoms(src).united(extra);
    }
    Formula parse(const Alphabet& sigma) const { return parse_formula(source(), sigma); }

    void add_to(CLI::App* app) {
        app->add_option("--formula", file, "formula file (.mtl)");
        app->add_option("--text", text, "formula text");
        app->add_option("--alphabet", alphabet, "comma-separated base alphabet (default: atoms of the formula)");
    }
};

struct Output {
    std::string path;
    void write(const std::string& s) const {
        if (path.empty()) std::cout << s;
        else write_text_file(path, s);
    }
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
    if (flag) return *flag;
    if (const char* env = std::getenv("MTLFORGE_SEED")) {
        try {
            std::size_t used = 0;
            auto v = std::stoull(env, &used);
            if (used == std::string(env).size()) return v;
        } catch (const std::exception&) {
        }
        throw UsageError("MTLFORGE_SEED is not a number");
    }
    throw UsageError("this verb is randomized: pass --seed or set MTLFORGE_SEED");
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// Runs the pipeline up to and including `pass`.
json staged_transform(const Formula& f, const Alphabet& base, const std::string& pass, bool literal) {
    if (pass == "pipeline") {
        PipelineOptions opt;
        if (literal) opt.repairs = UnitRepairs::none();
        return pipeline_report(pipeline_to_future(f, base, opt));
    }
    NameSupply names(base);
    FlatFormula ff = flatten(rewrite_bounded_since(f), base, names);
    if (pass == "flatten") return flat_to_json(ff);
    ff = eliminate_untimed_since(ff);
    if (pass == "since") return flat_to_json(ff);
    ff = split_past_intervals(ff, names);
    if (pass == "split") return flat_to_json(ff);
    ff = oversample_close(ff);
    if (pass == "oversample") return flat_to_json(ff);
    const bool units = pass == "past-unit";
    if (pass != "past-inf" && !units) throw UsageError("unknown pass '" + pass + "'");
    FlatFormula out = ff;
    out.definitions.clear();
    std::string c;
    std::vector<std::string> aux;
    for (const auto& d : ff.definitions) {
        if (is_past_inf(d)) {
            out.constraints.push_back(eliminate_past_inf(d, base));
        } else if (units && is_past_unit(d)) {
            if (c.empty()) {
                c = names.used().contains("c") ? names.fresh("c") : "c";
                names.reserve(Alphabet{c});
                aux.push_back(c);
            }
            UnitAux ua = fresh_unit_aux(d, names, c);
            aux.insert(aux.end(), {ua.beg, ua.end});
            out.constraints.push_back(eliminate_past_unit(d, base, ua, literal ? UnitRepairs::none() : UnitRepairs::all()).psi);
        } else {
            out.definitions.push_back(d);
        }
    }
    out.extended_alphabet = out.extended_alphabet.with(aux);
    return flat_to_json(out);
}

RunMode parse_mode(const std::string& m) {
    if (m == "minsky" || m == "standard") return RunMode::Standard;
    if (m == "incrementing") return RunMode::IncrementError;
    throw UsageError("--mode must be minsky or incrementing");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mtlforge: metric temporal logic over finite timed words"};
    app.require_subcommand(1);
    Output out;
    app.add_option("--out", out.path, "write output to this file instead of stdout");
    int code = kOk;

    // parse
    FormulaInput parse_in;
    auto* parse = app.add_subcommand("parse", "parse a formula and print its canonical form");
    parse_in.add_to(parse);
    parse->callback([&] {
        auto src = parse_in.source();
        Alphabet sigma = parse_in.sigma(src);
        Formula f = parse_formula(src, sigma);
        out.write(dump({{"formula", render_formula(f)},
                        {"alphabet", alphabet_to_json(sigma)},
                        {"fragment", fragment_name(classify_fragment(f))},
                        {"size", dag_size(f)}}));
    });

    // eval
    FormulaInput eval_in;
    std::string eval_word;
    std::optional<std::size_t> eval_pos;
    auto* eval = app.add_subcommand("eval", "evaluate a formula on a timed word");
    eval_in.add_to(eval);
    eval->add_option("--word", eval_word, "timed word (.tw)")->required();
    eval->add_option("--pos", eval_pos, "1-based position (default 1)");
    eval->callback([&] {
        TimedWord w = read_word_file(eval_word);
        Formula f = eval_in.parse(w.alphabet());
        const std::size_t i = eval_pos.value_or(1);
        if (i < 1 || i > w.size()) throw UsageError("--pos must lie in 1.." + std::to_string(w.size()));
        const bool v = eval_row(w, f)[i - 1];
        out.write(v ? "true\n" : "false\n");
        code = v ? kOk : kFalse;
    });

    // transform
    FormulaInput tr_in;
    std::string tr_pass = "pipeline";
    bool tr_literal = false;
    auto* tr = app.add_subcommand("transform", "run the past-elimination passes");
    tr_in.add_to(tr);
    tr->add_option("--pass", tr_pass, "last pass to run")
        ->check(CLI::IsMember({"flatten", "since", "split", "oversample", "past-inf", "past-unit", "pipeline"}));
    tr->add_flag("--literal", tr_literal, "use the unit-interval clauses without repairs");
    tr->callback([&] {
        auto src = tr_in.source();
        Alphabet base = tr_in.sigma(src);
        out.write(dump(staged_transform(parse_formula(src, base), base, tr_pass, tr_literal)));
    });

    // equisat
    FormulaInput eq_in;
    std::optional<std::uint64_t> eq_seed;
    EquisatOptions eq;
    eq.grid = GridSpec{5, 2, 4};
    std::string eq_emit;
    bool eq_literal = false;
    auto* equi = app.add_subcommand("equisat", "check the pipeline output against its input on sampled words");
    eq_in.add_to(equi);
    equi->add_option("--samples", eq.samples, "models of the input to sample")->check(CLI::PositiveNumber);
    equi->add_option("--seed", eq_seed, "random seed (falls back to MTLFORGE_SEED)");
    equi->add_option("--max-len", eq.grid.max_len)->check(CLI::PositiveNumber);
    equi->add_option("--denom", eq.grid.denom)->check(CLI::PositiveNumber);
    equi->add_option("--horizon", eq.grid.horizon)->check(CLI::PositiveNumber);
    equi->add_option("--emit-dir", eq_emit, "write each counterexample as cex_<k>.tw plus the formula it fails");
    equi->add_flag("--literal", eq_literal, "use the unit-interval clauses without repairs");
    equi->callback([&] {
        auto src = eq_in.source();
        Alphabet base = eq_in.sigma(src);
        Formula f = parse_formula(src, base);
        PipelineOptions po;
        if (eq_literal) po.repairs = UnitRepairs::none();
        auto p = pipeline_to_future(f, base, po);
        eq.seed = resolve_seed(eq_seed);
        eq.suite = "pipeline";
        eq.extend = [&](const TimedWord& w) { return extend_model(p, w); };
        auto rep = check_equisat(f, p.output, base, p.alphabet, eq);
        if (!eq_emit.empty()) {
            std::filesystem::create_directories(eq_emit);
            for (std::size_t k = 0; k < rep.counterexamples.size(); ++k) {
                const auto& c = rep.counterexamples[k];
                const auto stem = (std::filesystem::path(eq_emit) / ("cex_" + std::to_string(k + 1))).string();
                if (c.direction == 1) {
                    auto back = restrict_word(c.word, base);
                    write_text_file(stem + ".tw", word_to_text(back ? *back : c.word));
                    write_text_file(stem + ".mtl", render_formula(f) + "\n");
                } else {
                    write_text_file(stem + ".tw", word_to_text(c.word));
                    write_text_file(stem + ".mtl", render_formula(p.output) + "\n");
                }
            }
        }
        out.write(dump(report_to_json(rep)));
        code = rep.ok() ? kOk : kFalse;
    });

    // sat
    FormulaInput sat_in;
    GridSpec sat_grid{4, 2, 4};
    bool sat_single = false;
    auto* sat = app.add_subcommand("sat", "search the grid for a model (bounded, incomplete)");
    sat_in.add_to(sat);
    sat->add_option("--max-len", sat_grid.max_len)->check(CLI::PositiveNumber);
    sat->add_option("--denom", sat_grid.denom)->check(CLI::PositiveNumber);
    sat->add_option("--horizon", sat_grid.horizon)->check(CLI::PositiveNumber);
    sat->add_flag("--singletons", sat_single, "only words with one proposition per point");
    sat->callback([&] {
        auto src = sat_in.source();
        Alphabet sigma = sat_in.sigma(src);
        auto w = bounded_sat(parse_formula(src, sigma), sigma, sat_grid, {true, sat_single});
        out.write(w ? word_to_text(*w) : "none\n");
        code = w ? kOk : kFalse;
    });

    // expr
    int ex_case = 1;
    std::uint64_t ex_n = 3;
    auto* expr = app.add_subcommand("expr", "print an expressiveness word pair and its verdicts");
    expr->add_option("--case", ex_case)->check(CLI::IsMember({1, 2, 3}));
    expr->add_option("--n", ex_n, "family size (>= 3)");
    expr->callback([&] {
        auto r = expressiveness_pairs(ex_case, ExpressivenessParams::defaults(ex_n));
        out.write(dump({{"case", r.which},
                        {"n", ex_n},
                        {"formula", render_formula(r.formula)},
                        {"w1", word_to_json(r.w1)},
                        {"w2", word_to_json(r.w2)},
                        {"v1", r.v1},
                        {"v2", r.v2},
                        {"distinguishes", r.distinguishes()},
                        {"corrections", r.corrections}}));
        code = r.distinguishes() ? kOk : kFalse;
    });

    // cm
    auto* cm = app.add_subcommand("cm", "counter machines");
    cm->require_subcommand(1);
    std::string cm_file, cm_mode = "minsky", cm_word;
    std::size_t cm_steps = 100;
    std::optional<std::uint64_t> cm_err_seed;
    EncodingOptions cm_opt;
    auto machine_opts = [&](CLI::App* s) {
        s->add_option("--machine", cm_file, "machine file (.cm)")->required();
        s->add_option("--max-steps", cm_steps)->check(CLI::PositiveNumber);
    };
    auto encoding_opts = [&](CLI::App* s) {
        s->add_option("--mode", cm_mode)->check(CLI::IsMember({"minsky", "incrementing"}));
        s->add_flag("--zero-guard", cm_opt.zero_increment_guard, "demand a new a when incrementing an empty counter");
        s->add_flag("--empty-initial", cm_opt.empty_initial_config, "forbid every point strictly inside the first configuration");
    };
    auto* sim = cm->add_subcommand("simulate", "run the machine");
    machine_opts(sim);
    sim->add_option("--error-seed", cm_err_seed, "inject random increment errors");
    sim->callback([&] {
        auto m = read_machine_file(cm_file);
        auto r = cm_err_seed ? run_machine(m, cm_steps, RunMode::IncrementError, random_errors(*cm_err_seed)) : run_machine(m, cm_steps);
        out.write(dump(run_to_json(r)));
        code = r.halted ? kOk : kFalse;
    });
    auto* enc = cm->add_subcommand("encode", "print the encoding formula");
    enc->add_option("--machine", cm_file, "machine file (.cm)")->required();
    encoding_opts(enc);
    enc->callback([&] {
        auto m = read_machine_file(cm_file);
        auto e = parse_mode(cm_mode) == RunMode::Standard ? encode_minsky(m, cm_opt) : encode_incrementing(m, cm_opt);
        json parts = json::object();
        for (std::size_t k = 0; k < e.parts.size(); ++k) parts[e.labels[k]] = render_formula(e.parts[k]);
        out.write(dump({{"mode", cm_mode},
                        {"alphabet", alphabet_to_json(e.alphabet)},
                        {"fragment", fragment_name(classify_fragment(e.formula))},
                        {"parts", parts},
                        {"formula", render_formula(e.formula)}}));
    });
    auto* ver = cm->add_subcommand("verify", "check a run (or a given word) against the encoding");
    machine_opts(ver);
    encoding_opts(ver);
    ver->add_option("--error-seed", cm_err_seed, "inject random increment errors into the run");
    ver->add_option("--word", cm_word, "evaluate this word instead of the machine's own run");
    ver->callback([&] {
        auto m = read_machine_file(cm_file);
        const RunMode mode = parse_mode(cm_mode);
        bool v = false;
        if (!cm_word.empty()) {
            auto e = mode == RunMode::Standard ? encode_minsky(m, cm_opt) : encode_incrementing(m, cm_opt);
            TimedWord w = read_word_file(cm_word);
            v = satisfies(make_word(e.alphabet.united(w.alphabet()), w.points()), e.formula);
        } else {
            auto r = cm_err_seed ? run_machine(m, cm_steps, RunMode::IncrementError, random_errors(*cm_err_seed)) : run_machine(m, cm_steps);
            if (!r.halted) {
                std::cerr << "mtlforge: run does not halt within " << cm_steps << " steps\n";
                code = kFalse;
                return;
            }
            v = verify_encoding(m, r, mode, cm_opt);
        }
        out.write(v ? "true\n" : "false\n");
        code = v ? kOk : kFalse;
    });
    auto* dec = cm->add_subcommand("decode", "read a run back from a word");
    dec->add_option("--machine", cm_file, "machine file (.cm)")->required();
    dec->add_option("--word", cm_word, "timed word (.tw)")->required();
    encoding_opts(dec);
    dec->callback([&] {
        auto m = read_machine_file(cm_file);
        auto d = decode_word(m, read_word_file(cm_word), parse_mode(cm_mode));
        json j = run_to_json(d.run);
        j["valid"] = d.valid;
        if (!d.valid) j["reason"] = d.reason;
        out.write(dump(j));
        code = d.valid ? kOk : kFalse;
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    } catch (const UsageError& e) {
        std::cerr << "mtlforge: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "mtlforge: " << e.what() << "\n";
        return kUsage;
    }
    return code;
}
