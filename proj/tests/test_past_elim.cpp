#include "mtlforge/generators.hpp"
#include "mtlforge/oracles.hpp"
#include "mtlforge/past_elim.hpp"

#include <gtest/gtest.h>

using namespace mtlf;

namespace {

const Alphabet kBase{"a", "x"};
const Alphabet kPrime{"a", "b", "x"};
const UnitAux kAux{"c", "beg_b", "end_b"};

TemporalDefinition unit_def(std::uint64_t l) { return {"b", once(Interval::left_closed(l, l + 1), atom("a")), true}; }

TimedWord word_of(const std::vector<std::pair<std::vector<std::string>, Rational>>& v, const Alphabet& sigma) {
    std::vector<TimedPoint> pts;
    for (const auto& [p, t] : v) pts.push_back({p, t});
    return make_word(sigma, pts);
}

Rational q(std::int64_t n, std::int64_t d = 1) { return Rational(n, d); }

}  // namespace

// ── unbounded past intervals ──

TEST(PastInf, ConjunctShapes) {
    TemporalDefinition d{"b", once(Interval::left_closed(1, std::nullopt), atom("a")), true};
    auto parts = past_inf_conjuncts(d, kBase);
    ASSERT_EQ(parts.size(), 2u);
    const Formula A = act(kBase);
    EXPECT_EQ(parts[1], weak_always(implies(conj(atom("a"), A), always(Interval::left_closed(1, std::nullopt), implies(A, atom("b"))))));
    TemporalDefinition o{"b", once(Interval::open(1, std::nullopt), atom("a")), true};
    EXPECT_EQ(past_inf_conjuncts(o, kBase)[1],
              weak_always(implies(conj(atom("a"), A), always(Interval::open(1, std::nullopt), implies(A, atom("b"))))));
    EXPECT_FALSE(has_since(eliminate_past_inf(d, kBase)));
}

TEST(PastInf, RejectsOtherShapes) {
    TemporalDefinition unrel{"b", once(Interval::left_closed(1, std::nullopt), atom("a")), false};
    EXPECT_THROW(past_inf_conjuncts(unrel, kBase), ShapeError);
    TemporalDefinition bounded{"b", once(Interval::left_closed(1, 2), atom("a")), true};
    EXPECT_THROW(past_inf_conjuncts(bounded, kBase), ShapeError);
    TemporalDefinition compound{"b", once(Interval::left_closed(1, std::nullopt), conj(atom("a"), atom("x"))), true};
    EXPECT_THROW(past_inf_conjuncts(compound, kBase), ShapeError);
}

TEST(PastInf, ExhaustivelyEquivalentOnSmallGrid) {
    for (std::uint64_t l : {0, 1, 2})
        for (bool open : {false, true}) {
            auto rep = check_past_inf_exhaustive(l, open, GridSpec{4, 2, 3});
            EXPECT_GT(rep.words, 90000u);
            EXPECT_EQ(rep.mismatches, 0u) << "l=" << l << " open=" << open;
        }
}

// ── unit past intervals ──

TEST(UnitPast, FirstLastCharacterization) {
    auto rep = check_unit_past_condition(99, 500, 2);
    EXPECT_EQ(rep.words, 500u);
    EXPECT_GT(rep.positions, 500u);
    EXPECT_EQ(rep.mismatches, 0u);
}

TEST(UnitElim, ClauseShapes) {
    auto r1 = eliminate_past_unit(unit_def(1), kBase, kAux);
    EXPECT_EQ(r1.labels, (std::vector<std::string>{"phi1", "phi2", "phi3", "phi4", "phi5", "phi6", "phi7", "phi8", "phi9", "phi10"}));
    const Formula A = act(kBase);
    EXPECT_EQ(r1.parts[7], weak_always(implies(conj(atom("a"), A), always(Interval::left_closed(1, 2), implies(A, atom("b"))))));
    EXPECT_EQ(r1.parts[2], weak_always(Interval::left_closed(0, 1), neg(atom("end_b"))));
    EXPECT_EQ(r1.parts[4], weak_always(Interval::left_closed(0, 2), neg(atom("beg_b"))));
    EXPECT_FALSE(has_since(r1.psi));
    EXPECT_TRUE(fragment_contains(Fragment::UntilI, r1.psi));

    auto r0 = eliminate_past_unit(unit_def(0), kBase, kAux);
    EXPECT_EQ(r0.parts.size(), 9u);
    EXPECT_EQ(std::count(r0.labels.begin(), r0.labels.end(), "phi3"), 0);
    EXPECT_EQ(std::count(r0.labels.begin(), r0.labels.end(), "phi5"), 1);
    EXPECT_NE(eliminate_past_unit(unit_def(1), kBase, kAux, UnitVariant::Literal).psi, r1.psi);
}

TEST(UnitElim, RejectsNonUnitIntervals) {
    EXPECT_THROW(eliminate_past_unit({"b", once(Interval::left_closed(1, 3), atom("a")), true}, kBase, kAux), ShapeError);
    EXPECT_THROW(eliminate_past_unit({"b", once(Interval::open(1, 2), atom("a")), true}, kBase, kAux), ShapeError);
    EXPECT_THROW(eliminate_past_unit({"b", once(Interval::left_closed(1, 2), atom("a")), false}, kBase, kAux), ShapeError);
}

TEST(UnitElim, WitnessForSingleA) {
    auto w = word_of({{{"a"}, q(0)}, {{"x"}, q(3)}}, kPrime);
    auto e = build_oversampled_witness(w, unit_def(1), kAux, kBase);
    auto expect = word_of({{{"a", "c"}, q(0)}, {{"c", "end_b"}, q(1)}, {{"beg_b", "c"}, q(2)}, {{"c", "x"}, q(3)}},
                          kPrime.with({"c", "beg_b", "end_b"}));
    EXPECT_EQ(e, expect);
    EXPECT_TRUE(satisfies(e, eliminate_past_unit(unit_def(1), kBase, kAux).psi));
}

TEST(UnitElim, WitnessWithoutA) {
    auto w = word_of({{{"x"}, q(0)}, {{"x"}, q(5, 2)}}, kPrime);
    auto e = build_oversampled_witness(w, unit_def(1), kAux, kBase);
    auto expect = word_of({{{"c", "x"}, q(0)}, {{"c"}, q(1)}, {{"c"}, q(2)}, {{"x"}, q(5, 2)}}, kPrime.with({"c", "beg_b", "end_b"}));
    EXPECT_EQ(e, expect);
}

TEST(UnitElim, WitnessMergesCollidingMarkers) {
    // beg from [0,1) (last a at 1/2) and end from [1,2) (first a at 3/2) share 5/2
    auto w = word_of({{{"a"}, q(0)}, {{"a"}, q(1, 2)}, {{"a", "b"}, q(3, 2)}, {{"b", "x"}, q(2)}, {{"b", "x"}, q(3)}}, kPrime);
    auto e = build_oversampled_witness(w, unit_def(1), kAux, kBase);
    ASSERT_EQ(e.size(), 7u);  // c@1 and the merged point are new
    EXPECT_EQ(e.time(6), q(5, 2));
    EXPECT_TRUE(e.at(6).has("beg_b") && e.at(6).has("end_b"));
    EXPECT_TRUE(e.at(3).has("c") && e.at(3).has("end_b"));
    EXPECT_TRUE(satisfies(e, eliminate_past_unit(unit_def(1), kBase, kAux).psi));
}

TEST(UnitElim, WitnessChecksDefinitionAndAnchor) {
    auto bad = word_of({{{"a"}, q(0)}, {{"b", "x"}, q(1, 2)}}, kPrime);
    try {
        build_oversampled_witness(bad, unit_def(1), kAux, kBase);
        FAIL();
    } catch (const WordError& e) {
        EXPECT_EQ(e.code, WordError::Code::Precondition);
        EXPECT_EQ(e.index, 2u);
    }
    auto late = word_of({{{"a"}, q(1)}}, kPrime);
    EXPECT_THROW(build_oversampled_witness(late, unit_def(1), kAux, kBase), WordError);
}

TEST(UnitElim, RepairedConstructionIsExactOnSmallGrid) {
    for (std::uint64_t l : {0, 1}) {
        auto rep = check_unit_elim_exhaustive(l, UnitRepairs::all(), GridSpec{4, 2, 3});
        EXPECT_GT(rep.psi_models, 100u);
        EXPECT_GT(rep.dir2_models, 100u);
        EXPECT_EQ(rep.c_mismatches, 0u);
        EXPECT_EQ(rep.dir1_violations, 0u);
        EXPECT_EQ(rep.uniqueness_violations, 0u);
        EXPECT_EQ(rep.dir2_violations, 0u);
        EXPECT_TRUE(rep.ok()) << "l=" << l;
    }
}

TEST(UnitElim, LiteralClausesFailBothDirections) {
    auto rep = check_unit_elim_exhaustive(1, UnitRepairs::none(), GridSpec{4, 2, 3});
    EXPECT_GT(rep.dir1_violations, 0u);
    EXPECT_GT(rep.dir2_violations, 0u);
    EXPECT_FALSE(rep.ok());
}

TEST(UnitElim, EveryRepairIsNeeded) {
    using Flag = bool UnitRepairs::*;
    for (Flag f : {&UnitRepairs::phi2_guard, &UnitRepairs::phi4_last, &UnitRepairs::phi4_guard, &UnitRepairs::phi7_edges,
                   &UnitRepairs::region, &UnitRepairs::phi9_anchor}) {
        UnitRepairs r = UnitRepairs::all();
        r.*f = false;
        bool broken = false;
        for (std::uint64_t l : {0, 1})
            broken = broken || !check_unit_elim_exhaustive(l, r, GridSpec{5, 2, 3}).ok();
        EXPECT_TRUE(broken);
    }
}

// ── full pipeline ──

TEST(Pipeline, UnboundedSinceUsesOnlyTheInfiniteElimination) {
    const Alphabet base{"a", "c"};
    auto p = pipeline_to_future(parse_formula("F(a & P(1,inf) c)", base), base);
    EXPECT_FALSE(has_since(p.output));
    EXPECT_TRUE(fragment_contains(Fragment::UntilI, p.output));
    EXPECT_EQ(p.inf_defs.size(), 1u);
    EXPECT_TRUE(p.unit_defs.empty());
    EXPECT_TRUE(p.c.empty());
    ASSERT_EQ(p.passes.size(), 6u);
    EXPECT_EQ(p.passes.front().pass, "rewrite_bounded_since");
    EXPECT_EQ(p.passes.back().pass, "eliminate_past");
    auto w = word_of({{{"c"}, q(0)}, {{"a"}, q(3, 2)}}, base);
    EXPECT_TRUE(satisfies(w, parse_formula("F(a & P(1,inf) c)", base)));
    EXPECT_TRUE(satisfies(extend_model(p, w), p.output));
}

TEST(Pipeline, UnitIntervalGetsMarkers) {
    const Alphabet base{"a", "b"};
    const Formula f = parse_formula("(b -> P[1,2) a) U EP", base);
    auto p = pipeline_to_future(f, base);
    EXPECT_FALSE(has_since(p.output));
    EXPECT_EQ(p.c, "c");
    ASSERT_EQ(p.unit_defs.size(), 1u);
    EXPECT_TRUE(p.alphabet.contains("c"));
    EXPECT_TRUE(p.alphabet.contains(p.unit_defs[0].aux.beg));
    EXPECT_TRUE(base.subset_of(p.alphabet));
    Rng rng(3);
    std::size_t models = 0;
    for (int n = 0; n < 400; ++n) {
        auto w = gen_random_word(rng, base, GridSpec{5, 2, 4});
        if (!satisfies(w, f)) continue;
        ++models;
        auto e = extend_model(p, w);
        EXPECT_TRUE(is_oversampling_of(e, w, base));
        EXPECT_TRUE(satisfies(e, p.output));
    }
    EXPECT_GT(models, 20u);
}

TEST(Pipeline, AvoidsNameClashWithSharedMarker) {
    const Alphabet base{"a", "c"};
    auto p = pipeline_to_future(parse_formula("F(c & P[1,2) a)", base), base);
    EXPECT_FALSE(p.c.empty());
    EXPECT_NE(p.c, "c");
}

TEST(Pipeline, FutureInputIsOnlyRelativized) {
    const Alphabet base{"a", "b"};
    const Formula f = parse_formula("a U[1,2] b", base);
    auto p = pipeline_to_future(f, base);
    EXPECT_EQ(p.alphabet, base);
    Rng rng(8);
    for (int n = 0; n < 200; ++n) {
        auto w = gen_random_word(rng, base, GridSpec{5, 2, 4});
        EXPECT_EQ(satisfies(w, f), satisfies(w, p.output));
    }
}

TEST(Pipeline, RejectsOpenUnitIntervals) {
    const Alphabet base{"a", "b"};
    EXPECT_THROW(pipeline_to_future(parse_formula("F(b & P(1,2) a)", base), base), ShapeError);
    EXPECT_THROW(pipeline_to_future(parse_formula("F(b & P[1,2] a)", base), base), ShapeError);
    EXPECT_THROW(pipeline_to_future(parse_formula("F z", Alphabet{"z"}), base), AlphabetError);
}
