#include <catch2/catch_amalgamated.hpp>

#include "matcrs/offline.hpp"
#include "test_support.hpp"

using namespace matcrs;

namespace {

Matroid triangle() { return Matroid::graphic(3, {{0, 1}, {1, 2}, {2, 0}}); }

ExtRat max_ext(const ExtRat& a, const ExtRat& b) { return a < b ? b : a; }

}  // namespace

TEST_CASE("alpha_star on the prefix chains") {
    SECTION("n=2: exactly 3/2 with the full set as witness") {
        AlphaReport r = alpha_star(Matroid::uniform(2, 1), prefix_chain_distribution(2));
        CHECK(r.alpha == ExtRat::of(Rat(3, 2)));
        CHECK(r.witness == 0b11);
        CHECK(r.witness_expected_size == Rat(3, 4));
        CHECK(r.witness_expected_rank == Rat(1, 2));
    }
    SECTION("n=3: exactly 7/4") {
        AlphaReport r = alpha_star(Matroid::uniform(3, 1), prefix_chain_distribution(3));
        CHECK(r.alpha == ExtRat::of(Rat(7, 4)));
        CHECK(r.witness == 0b111);
    }
    SECTION("closed form 2 - 2^(1-n) for n up to 6") {
        for (int n = 2; n <= 6; ++n) {
            AlphaReport r = alpha_star(Matroid::uniform(n, 1), prefix_chain_distribution(n));
            CHECK(r.alpha == ExtRat::of(2 - rat_pow(Rat(1, 2), n - 1)));
        }
    }
    SECTION("improving elements of the rank-1 matroid at p=1/2 stay below 2") {
        std::vector<Rat> w = {5, 4, 3, 2, 1};
        WeightedMatroid wm(Matroid::uniform(5, 1), w);
        AlphaReport r = alpha_star(wm.matroid(), improving_distribution(wm, Rat(1, 2)));
        CHECK(r.alpha == ExtRat::of(Rat(31, 16)));
        CHECK(r.alpha <= ExtRat::of(2));
    }
}

TEST_CASE("alpha_star edge cases") {
    SECTION("a point mass on an independent set is 1-uncontentious") {
        AlphaReport r = alpha_star(triangle(), SubsetDistribution::point(3, 0b011));
        CHECK(r.alpha == ExtRat::of(1));
        CHECK_FALSE(r.degenerate);
    }
    SECTION("a positive-marginal loop forces infinity") {
        Matroid m = Matroid::partition(2, {{0}}, {0});  // element 0 is a loop
        SubsetDistribution d = SubsetDistribution::from_pairs(
            2, {{0b01, Rat(1, 2)}, {0b10, Rat(1, 2)}});
        AlphaReport r = alpha_star(m, d);
        CHECK(r.alpha == ExtRat::inf());
        CHECK(r.loop_element == 0);
        CHECK(r.witness == 0b01);
    }
    SECTION("the empty point mass is flagged and reported as 1") {
        AlphaReport r = alpha_star(triangle(), SubsetDistribution::point(3, 0));
        CHECK(r.degenerate);
        CHECK(r.alpha == ExtRat::of(1));
    }
    SECTION("ground set mismatch is an error") {
        CHECK_THROWS_AS(alpha_star(triangle(), SubsetDistribution::point(2, 0)),
                        std::invalid_argument);
    }
}

TEST_CASE("CRM synthesis solves the dual route of the characterization") {
    SECTION("point mass on a base selects the base outright") {
        Matroid m = triangle();
        SynthesisResult s = synthesize_crm(m, SubsetDistribution::point(3, 0b011));
        CHECK(s.beta_star == 1);
        REQUIRE(s.crm.has_value());
        const ContentionMap::Entry* e = s.crm->find(0b011);
        REQUIRE(e != nullptr);
        REQUIRE(e->choices.size() == 1);
        CHECK(e->choices[0].set == 0b011);
    }
    SECTION("chain n=2: beta* = 2/3 = 1/alpha*") {
        SubsetDistribution d = prefix_chain_distribution(2);
        Matroid m = Matroid::uniform(2, 1);
        SynthesisResult s = synthesize_crm(m, d);
        CHECK(s.beta_star == Rat(2, 3));
        CHECK(s.alpha == ExtRat::of(Rat(3, 2)));
        REQUIRE(s.crm.has_value());
        CrmVerification v = verify_crm(m, d, *s.crm);
        CHECK(v.achieved_alpha == ExtRat::of(Rat(3, 2)));
    }
    SECTION("equality with alpha_star across random instances of all families") {
        CounterRng rng = CounterRng::seeded(606);
        for (int trial = 0; trial < 40; ++trial) {
            int family = trial % 5;
            int n = 2 + static_cast<int>(rng.below(4));
            Matroid m = testgen::random_matroid(family, n, rng);
            SubsetDistribution d = testgen::random_distribution(n, 8, rng);
            AlphaReport ar = alpha_star(m, d);
            SynthesisResult s = synthesize_crm(m, d);
            REQUIRE(s.alpha == ar.alpha);
            if (s.crm && !ar.alpha.infinite && !ar.degenerate) {
                CrmVerification v = verify_crm(m, d, *s.crm);
                REQUIRE(v.achieved_alpha == ar.alpha);
            }
        }
    }
    SECTION("loop with positive marginal gives beta* = 0 and no finite alpha") {
        Matroid m = Matroid::partition(2, {{0}}, {0});
        SubsetDistribution d = SubsetDistribution::point(2, 0b01);
        SynthesisResult s = synthesize_crm(m, d);
        CHECK(s.beta_star == 0);
        CHECK(s.alpha == ExtRat::inf());
    }
}

TEST_CASE("verify_crm: the prefix-last map is exactly 2-competitive on chains") {
    for (int n : {2, 3, 6, 10}) {
        Matroid m = Matroid::uniform(n, 1);
        SubsetDistribution d = prefix_chain_distribution(n);
        CrmVerification v = verify_crm(m, d, prefix_last_map(n));
        for (int i = 0; i < n - 1; ++i) CHECK(v.ratios[i] == ExtRat::of(2));
        CHECK(v.ratios[n - 1] == ExtRat::of(1));
        CHECK(v.achieved_alpha == ExtRat::of(2));
    }
}

TEST_CASE("verify_crm: uniform singleton selection degrades on the chain") {
    int n = 6;
    Matroid m = Matroid::uniform(n, 1);
    SubsetDistribution d = prefix_chain_distribution(n);
    ContentionMap naive = uniform_singleton_map(d);
    CrmVerification v = verify_crm(m, d, naive);
    // exact selection probability: sum over prefix sizes s > e of Pr[size s]/s
    for (int e = 0; e < n; ++e) {
        Rat expect = 0;
        for (int s = e + 1; s <= n - 1; ++s) expect += rat_pow(Rat(1, 2), s + 1) / s;
        expect += rat_pow(Rat(1, 2), n) / n;
        REQUIRE(v.selection_prob[e] == expect);
    }
    // elements beyond the first suffer ratios above 2, and it only gets worse
    for (int e = 1; e < n; ++e) {
        REQUIRE(v.ratios[e] > ExtRat::of(2));
        REQUIRE(v.ratios[e].value > v.ratios[e - 1].value);
    }
    CHECK(v.ratios[0] == ExtRat::of(Rat(160, 111)));  // 2^-1 / (sum_{s=1..5} 2^-(s+1)/s + 2^-6/6)
}

TEST_CASE("verify_crm rejects infeasible or incomplete maps") {
    Matroid m = Matroid::uniform(2, 1);
    SubsetDistribution d = prefix_chain_distribution(2);
    SECTION("missing support set") {
        ContentionMap phi;
        phi.add(0, {{0, 1}});
        CHECK_THROWS_AS(verify_crm(m, d, phi), std::invalid_argument);
    }
    SECTION("selects outside the active set") {
        ContentionMap phi = prefix_last_map(2);
        phi.entries[1].choices[0].set = 0b10;  // phi({0}) = {1}
        CHECK_THROWS_AS(verify_crm(m, d, phi), std::invalid_argument);
    }
    SECTION("selects a dependent set") {
        ContentionMap phi = prefix_last_map(2);
        phi.entries[2].choices[0].set = 0b11;  // phi({0,1}) = {0,1}, rank 1
        CHECK_THROWS_AS(verify_crm(m, d, phi), std::invalid_argument);
    }
    SECTION("weights must sum to one") {
        ContentionMap phi = prefix_last_map(2);
        phi.entries[2].choices[0].prob = Rat(1, 2);
        CHECK_THROWS_AS(verify_crm(m, d, phi), std::invalid_argument);
    }
}

TEST_CASE("identity map on an independent-support distribution has all ratios 1") {
    Matroid m = triangle();
    SubsetDistribution d = SubsetDistribution::from_pairs(
        3, {{0b011, Rat(1, 2)}, {0b101, Rat(1, 4)}, {0b000, Rat(1, 4)}});
    ContentionMap id;
    for (const auto& [mask, p] : d.support()) id.add(mask, {{mask, 1}});
    CrmVerification v = verify_crm(m, d, id);
    for (int i = 0; i < 3; ++i)
        if (d.marginals()[i] != 0) CHECK(v.ratios[i] == ExtRat::of(1));
    CHECK(v.achieved_alpha == ExtRat::of(1));
}

TEST_CASE("condition (b): weighted-rank certificates") {
    Matroid m = Matroid::uniform(3, 1);
    SubsetDistribution d = prefix_chain_distribution(3);
    SECTION("zero weights hold with zero slack") {
        ConditionB r = condition_b_check(m, d, {0, 0, 0}, ExtRat::of(2));
        CHECK(r.holds);
        CHECK(r.slack == 0);
    }
    SECTION("the witness indicator binds exactly at alpha*") {
        AlphaReport ar = alpha_star(m, d);
        std::vector<Rat> w(3, 0);
        for (int i : elements(ar.witness)) w[i] = 1;
        ConditionB r = condition_b_check(m, d, w, ar.alpha);
        CHECK(r.holds);
        CHECK(r.slack == 0);
    }
    SECTION("improving distributions pass at alpha = 1/p for random weights") {
        CounterRng rng = CounterRng::seeded(55);
        for (const Rat& p : {Rat(1, 4), Rat(1, 2), Rat(3, 4)}) {
            std::vector<Rat> wts(3);
            for (auto& w : wts) w = static_cast<int>(rng.below(9));
            WeightedMatroid wm(triangle(), {3, 2, 1});
            SubsetDistribution imp = improving_distribution(wm, p);
            ConditionB r = condition_b_check(triangle(), imp, wts, ExtRat::of(1 / p));
            REQUIRE(r.holds);
        }
    }
    SECTION("an infinite alpha asks only for nonnegativity") {
        ConditionB r = condition_b_check(m, d, {1, 1, 1}, ExtRat::inf());
        CHECK(r.holds);
        CHECK(r.scaled_expected_weight == 0);
    }
}

TEST_CASE("covering numbers") {
    CHECK(covering_number(triangle(), 0b011).value == 1);  // independent
    CHECK(covering_number(triangle(), 0).value == 1);
    CHECK(covering_number(Matroid::uniform(3, 1), 0b111).value == 3);
    SECTION("triangle needs two forests") {
        CoveringReport r = covering_number(triangle(), 0b111);
        CHECK(r.value == 2);
        CHECK(r.witness == 0b111);  // 3/2 rounds up
    }
    SECTION("loops are uncoverable") {
        Matroid m = Matroid::partition(2, {{1}}, {0});
        CoveringReport r = covering_number(m, 0b11);
        CHECK(r.infinite);
        CHECK(r.witness == 0b10);
    }
    SECTION("matches the ceiling of alpha_star on the point mass") {
        CounterRng rng = CounterRng::seeded(909);
        for (int trial = 0; trial < 25; ++trial) {
            Matroid m = testgen::random_matroid(trial % 5, 4, rng);
            Mask t = rng.below(16);
            CoveringReport c = covering_number(m, t);
            AlphaReport a = alpha_star(m, SubsetDistribution::point(4, t));
            if (a.alpha.infinite) {
                REQUIRE(c.infinite);
            } else {
                REQUIRE_FALSE(c.infinite);
                Int num = numerator(a.alpha.value), den = denominator(a.alpha.value);
                Int q = num / den;
                if (q * den != num) q += 1;
                REQUIRE(c.value == q.convert_to<int>());
            }
        }
    }
}

TEST_CASE("oblivious adversary punishes any fixed rank-1 map") {
    Matroid m = Matroid::uniform(3, 1);
    SECTION("uniform-over-singletons map: victim ratio exactly n") {
        SubsetDistribution full_support = SubsetDistribution::from_pairs(
            3, {{0b001, 1}, {0b010, 1}, {0b100, 1}, {0b111, 1}, {0b000, 1},
                {0b011, 1}, {0b101, 1}, {0b110, 1}});
        ContentionMap phi = uniform_singleton_map(full_support);
        AdversaryReport r = oblivious_adversary(m, phi, Rat(1, 2));
        CHECK(r.victim == 0);
        CHECK(r.achieved_ratio == ExtRat::of(3));
        CHECK(r.dist_alpha == ExtRat::of(Rat(7, 5)));
        CHECK(r.dist_alpha <= ExtRat::of(Rat(3, 2)));
        CHECK(r.dist.prob_of(0b111) == Rat(1, 5));
        CHECK(r.dist.prob_of(0b010) == Rat(2, 5));
    }
    SECTION("random fixed maps are at best n-competitive on the built distribution") {
        CounterRng rng = CounterRng::seeded(123);
        for (int n : {3, 4, 5}) {
            Matroid mn = Matroid::uniform(n, 1);
            for (int trial = 0; trial < 5; ++trial) {
                ContentionMap phi = testgen::random_rank1_crm(n, rng);
                Rat eps(static_cast<int>(rng.below(3)) + 1, 4);
                AdversaryReport r = oblivious_adversary(mn, phi, eps);
                REQUIRE(r.achieved_ratio >= ExtRat::of(n));
                REQUIRE(r.dist_alpha <= ExtRat::of(1 + eps));
            }
        }
    }
}

TEST_CASE("closure properties of uncontentious distributions") {
    CounterRng rng = CounterRng::seeded(777);

    SECTION("marginals live in alpha* times the polytope") {
        for (int trial = 0; trial < 20; ++trial) {
            Matroid m = testgen::random_matroid(trial % 5, 4, rng);
            SubsetDistribution d = testgen::random_distribution(4, 6, rng);
            AlphaReport ar = alpha_star(m, d);
            if (ar.alpha.infinite) continue;
            std::vector<Rat> x = d.marginals();
            for (Rat& xi : x) xi /= ar.alpha.value;
            REQUIRE(m.in_polytope(x).inside);
        }
    }

    SECTION("mixtures never exceed the worst component") {
        for (int trial = 0; trial < 15; ++trial) {
            Matroid m = testgen::random_matroid(trial % 5, 4, rng);
            SubsetDistribution a = testgen::random_distribution(4, 5, rng);
            SubsetDistribution b = testgen::random_distribution(4, 5, rng);
            Rat wa(static_cast<int>(rng.below(4)) + 1, 5);
            SubsetDistribution mix = SubsetDistribution::mixture({a, b}, {wa, 1 - wa});
            ExtRat bound = max_ext(alpha_star(m, a).alpha, alpha_star(m, b).alpha);
            REQUIRE(alpha_star(m, mix).alpha <= bound);
        }
    }

    SECTION("a distribution on a minor's elements does not get harder in the host") {
        for (int trial = 0; trial < 15; ++trial) {
            Matroid host = testgen::random_matroid(trial % 5, 6, rng);
            Mask del = rng.below(64);
            Mask con = rng.below(64) & ~del;
            Matroid minor = host.minor(del, con);
            if (minor.size() == 0) continue;
            SubsetDistribution d = testgen::random_distribution(minor.size(), 5, rng);
            const std::vector<int>& keep = *minor.minor_elements();
            std::vector<SubsetDistribution::Entry> lifted;
            for (const auto& [mask, p] : d.support()) {
                Mask up = 0;
                for (int i : elements(mask)) up |= bit(keep[i]);
                lifted.emplace_back(up, p);
            }
            SubsetDistribution host_d = SubsetDistribution::from_pairs(host.size(), lifted);
            REQUIRE(alpha_star(host, host_d).alpha <= alpha_star(minor, d).alpha);
        }
    }

    SECTION("independent subsampling never hurts") {
        for (int trial = 0; trial < 15; ++trial) {
            Matroid m = testgen::random_matroid(trial % 5, 4, rng);
            SubsetDistribution d = testgen::random_distribution(4, 5, rng);
            Rat p(static_cast<int>(rng.below(4)) + 1, 5);
            REQUIRE(alpha_star(m, d.subsample(p)).alpha <= alpha_star(m, d).alpha);
        }
    }
}

TEST_CASE("subsampling tightness: singletons plus the full set") {
    // base: each singleton and the full set with probability 1/(n+1), n = 6
    int n = 6;
    Matroid m = Matroid::uniform(n, 1);
    std::vector<SubsetDistribution::Entry> pairs;
    for (int i = 0; i < n; ++i) pairs.emplace_back(bit(i), Rat(1, n + 1));
    pairs.emplace_back(full_mask(n), Rat(1, n + 1));
    SubsetDistribution base = SubsetDistribution::from_pairs(n, pairs);

    AlphaReport before = alpha_star(m, base);
    CHECK(before.alpha == ExtRat::of(Rat(12, 7)));  // 2n/(n+1)

    AlphaReport after = alpha_star(m, base.subsample(Rat(1, 2)));
    // closed form: max_f f / (f/2 + 1 - 2^-f) at f = n
    CHECK(after.alpha == ExtRat::of(Rat(128, 85)));
    // the point: alpha stays near 2 rather than dropping toward p * alpha
    CHECK(after.alpha > ExtRat::of(Rat(3, 2)));
    CHECK(after.alpha <= before.alpha);
}

TEST_CASE("product distributions with polytope marginals stay below e/(e-1)") {
    CounterRng rng = CounterRng::seeded(31415);
    // 1 + upper rational bracket of 1/(e-1); implied by the known bound
    ExtRat bound = ExtRat::of(1 + Rat(58199, 100000));
    for (int trial = 0; trial < 15; ++trial) {
        Matroid m = testgen::random_matroid(trial % 5, 4, rng);
        std::vector<Rat> x = testgen::random_marginals_in_polytope(m, rng);
        SubsetDistribution d = SubsetDistribution::product(x);
        REQUIRE(alpha_star(m, d).alpha <= bound);
    }
}
