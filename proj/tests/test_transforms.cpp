#include "mtlforge/generators.hpp"
#include "mtlforge/transforms.hpp"

#include <gtest/gtest.h>

using namespace mtlf;

namespace {

const Alphabet kAB{"a", "b"};
Formula f(const std::string& s, const Alphabet& sigma = kAB) { return parse_formula(s, sigma); }

std::string show(const TimedWord& w) {
    std::string s;
    for (const auto& p : w.points()) {
        s += "(";
        for (std::size_t k = 0; k < p.props.size(); ++k) s += (k ? "," : "") + p.props[k];
        s += ")@" + time_to_string(p.t) + " ";
    }
    return s;
}

const GridSpec kSmall{6, 2, 4};

}  // namespace

TEST(BoundedSince, RewriteIsEquivalent) {
    Rng rng(11);
    for (int n = 0; n < 500; ++n) {
        Formula x = gen_random_formula(rng, kAB, 3, Fragment::UntilISinceNS);
        Formula y = rewrite_bounded_since(x);
        TimedWord w = gen_random_word(rng, kAB, GridSpec{7, 4, 6});
        ASSERT_EQ(eval_row(w, x), eval_row(w, y)) << render_formula(x) << " on " << show(w);
        for (const auto& g : subformulas(y))
            if (g.kind() == Kind::Since) ASSERT_TRUE(g->left.kind() == Kind::True || g->iv.is_unbounded());
    }
}

TEST(BoundedSince, RejectsOtherShapes) {
    EXPECT_THROW(rewrite_bounded_since(f("a S(1,2) b")), ShapeError);
    EXPECT_THROW(rewrite_bounded_since(f("a S[1,2] b")), ShapeError);
    EXPECT_NO_THROW(rewrite_bounded_since(f("P(1,2) b")));
    EXPECT_EQ(rewrite_bounded_since(f("F(a S b)")), f("F(a S b)"));
}

TEST(Flatten, SinceUnderEventually) {
    Alphabet ac{"a", "c"};
    Formula phi = f("F(a & P(1,inf) c)", ac);
    NameSupply names;
    FlatFormula ff = flatten(phi, ac, names);
    ASSERT_EQ(ff.definitions.size(), 1u);
    EXPECT_EQ(ff.definitions[0].witness, "w1");
    EXPECT_EQ(ff.definitions[0].body, f("P(1,inf) c", ac));
    EXPECT_EQ(ff.core, f("F(a & w1)", ac.with({"w1"})));
    EXPECT_EQ(ff.extended_alphabet, ac.with({"w1"}));
}

TEST(Flatten, SelectEveryTemporalNode) {
    Alphabet ac{"a", "c"};
    NameSupply names;
    FlattenOptions opt;
    opt.select = [](const Formula& g) { return g.kind() == Kind::Until || g.kind() == Kind::Since; };
    FlatFormula ff = flatten(f("F(a & P(1,inf) c)", ac), ac, names, opt);
    ASSERT_EQ(ff.definitions.size(), 2u);
    EXPECT_EQ(ff.core, atom("w2"));
    EXPECT_EQ(ff.definitions[1].body, f("F(a & w1)", ac.with({"w1"})));
}

TEST(Flatten, AtomizesPastOperandsAndSharesWitnesses) {
    NameSupply names;
    FlatFormula ff = flatten(f("(a | b) S !a & P[1,2) (a | b)"), kAB, names);
    for (const auto& d : ff.definitions)
        if (d.body.kind() == Kind::Since) {
            EXPECT_TRUE(d.body->left.kind() == Kind::Atom || d.body->left.kind() == Kind::True);
            EXPECT_EQ(d.body->right.kind(), Kind::Atom);
        }
    // (a | b) gets one witness used by both past nodes
    int count = 0;
    for (const auto& d : ff.definitions) count += d.body == f("a | b");
    EXPECT_EQ(count, 1);
}

TEST(Flatten, FreshNamesAvoidAlphabet) {
    Alphabet sigma{"w1", "a"};
    NameSupply names;
    FlatFormula ff = flatten(f("P a", sigma), sigma, names);
    EXPECT_EQ(ff.definitions[0].witness, "w2");
}

// Every model of the flat conjunction is the canonical extension of its projection,
// so the equivalence below covers both directions; the flips probe direction 1 directly.
TEST(Flatten, PreservesModelsBothWays) {
    Rng rng(7);
    int models = 0;
    for (int n = 0; n < 200; ++n) {
        Formula x = gen_random_formula(rng, kAB, 3, Fragment::UntilISinceNS);
        NameSupply names;
        FlatFormula ff = flatten(x, kAB, names);
        Formula g = flat_conjunction(ff);
        for (int k = 0; k < 5; ++k) {
            TimedWord w = gen_random_word(rng, kAB, kSmall);
            TimedWord ext = canonical_extension(w, ff);
            ASSERT_TRUE(is_simple_extension(ext, w, kAB));
            ASSERT_EQ(satisfies(ext, g), satisfies(w, x)) << render_formula(x) << " on " << show(w);
            models += satisfies(w, x);
            std::vector<std::string> ws;
            for (const auto& d : ff.history) ws.push_back(d.witness);
            if (ws.empty()) continue;
            TimedWord m = flip_random_prop(rng, ext, Alphabet(ws));
            if (satisfies(m, g)) {
                auto back = restrict_word(m, kAB);
                ASSERT_TRUE(back && satisfies(*back, x)) << render_formula(x) << " on " << show(m);
            }
        }
    }
    EXPECT_GT(models, 100);
}

TEST(UntimedSince, NuIsExactWithWeakNext) {
    Alphabet sig{"c", "f", "r"};
    Formula def = weak_always(iff(since(atom("c"), atom("f")), atom("r")));
    Formula nu = conj_all(nu_untimed_since("r", atom("c"), atom("f")));
    Formula nu_strict = conj_all(nu_untimed_since("r", atom("c"), atom("f"), false));
    std::size_t words = 0, strict_misses = 0;
    enumerate_words(sig, GridSpec{5, 1, 5}, [&](const TimedWord& w) {
        ++words;
        bool d = satisfies(w, def);
        EXPECT_EQ(satisfies(w, nu), d) << show(w);
        if (d && !satisfies(w, nu_strict)) ++strict_misses;
        return true;
    });
    EXPECT_GT(words, 100000u);
    // the strong-next recurrence rejects models where f holds at the last point
    EXPECT_GT(strict_misses, 0u);
}

TEST(UntimedSince, EliminatesOnlyUnboundedSince) {
    NameSupply names;
    FlatFormula ff = eliminate_untimed_since(flatten(f("(a S b) & P[1,2) a"), kAB, names));
    ASSERT_EQ(ff.definitions.size(), 1u);
    EXPECT_TRUE(is_timed_past(ff.definitions[0].body));
    EXPECT_EQ(ff.constraints.size(), 5u);
    for (const auto& c : ff.constraints) EXPECT_FALSE(has_since(c));
    // unbounded once is eliminated too
    NameSupply n2;
    EXPECT_TRUE(eliminate_untimed_since(flatten(f("P a"), kAB, n2)).definitions.empty());
}

TEST(UntimedSince, PreservesModelsEndToEnd) {
    Rng rng(5);
    for (int n = 0; n < 200; ++n) {
        Formula x = rewrite_bounded_since(gen_random_formula(rng, kAB, 3, Fragment::UntilISinceNS));
        NameSupply names;
        FlatFormula ff = flatten(x, kAB, names);
        FlatFormula out = eliminate_untimed_since(ff);
        Formula g = flat_conjunction(out);
        for (int k = 0; k < 5; ++k) {
            TimedWord w = gen_random_word(rng, kAB, kSmall);
            ASSERT_EQ(satisfies(canonical_extension(w, out), g), satisfies(w, x)) << render_formula(x) << " on " << show(w);
        }
    }
}

TEST(Split, UnitPiecesAndDisjunction) {
    NameSupply names;
    FlatFormula ff = split_past_intervals(flatten(f("P[1,3) a"), kAB, names), names);
    ASSERT_EQ(ff.definitions.size(), 3u);
    EXPECT_EQ(ff.definitions[0].body, f("P[1,2) a"));
    EXPECT_EQ(ff.definitions[1].body, f("P[2,3) a"));
    EXPECT_EQ(ff.definitions[2].witness, "w1");
    EXPECT_EQ(ff.definitions[2].body, disj(atom("w2"), atom("w3")));
    Rng rng(3);
    Formula x = f("P[1,3) a");
    Formula g = flat_conjunction(ff);
    for (int k = 0; k < 300; ++k) {
        TimedWord w = gen_random_word(rng, kAB, GridSpec{7, 4, 5});
        TimedWord ext = canonical_extension(w, ff);
        ASSERT_EQ(satisfies(ext, g), satisfies(w, x)) << show(w);
    }
    NameSupply n2;
    EXPECT_THROW(split_past_intervals(flatten(f("P(1,3) a"), kAB, n2), n2), ShapeError);
    NameSupply n3;
    EXPECT_EQ(split_past_intervals(flatten(f("P(1,inf) a"), kAB, n3), n3).definitions.size(), 1u);
}

// Lemma 2 as an equivalence: w' ⊨ F iff any oversampling w'' ⊨ close(F).
TEST(OversampleClose, ClosurePreservesModelsBothWays) {
    Rng rng(19);
    Alphabet extra{"z1", "z2"};
    int models = 0;
    for (int n = 0; n < 200; ++n) {
        Formula x = gen_random_formula(rng, kAB, 3, Fragment::UntilISinceNS);
        NameSupply names;
        names.reserve(extra);
        FlatFormula ff = flatten(x, kAB, names);
        FlatFormula cl = oversample_close(ff);
        Formula g0 = flat_conjunction(ff), g1 = flat_conjunction(cl);
        std::vector<std::string> ws;
        for (const auto& d : ff.history) ws.push_back(d.witness);
        TimedWord w = canonical_extension(gen_random_word(rng, kAB, kSmall), ff);
        if (!ws.empty() && rng.coin()) w = flip_random_prop(rng, w, Alphabet(ws));
        TimedWord over = insert_random_points(rng, w, extra, 1 + rng.below(4));
        ASSERT_TRUE(is_oversampling_of(over, w, w.alphabet()));
        bool a = satisfies(w, g0), b = satisfies(over, g1);
        ASSERT_EQ(a, b) << render_formula(x) << " on " << show(over);
        models += a;
        auto back = restrict_word(over, ff.extended_alphabet);
        ASSERT_TRUE(back);
        ASSERT_EQ(*back, w);
    }
    EXPECT_GT(models, 20);
}

TEST(OversampleClose, GuardsEndpointsAndRelativizes) {
    NameSupply names;
    FlatFormula cl = oversample_close(flatten(f("F a"), kAB, names));
    for (const auto& d : cl.definitions) EXPECT_TRUE(d.relativized);
    Alphabet big = kAB.with({"z"});
    Formula g = flat_conjunction(cl);
    TimedPoint p0{{"z"}, 0}, p1{{"a"}, 1};
    EXPECT_FALSE(satisfies(make_word(big, {p0, p1}), g));
    EXPECT_TRUE(satisfies(make_word(big, {TimedPoint{{"b"}, 0}, TimedPoint{{"z"}, ratio(1, 2)}, p1}), g));
}
