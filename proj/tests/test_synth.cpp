#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "identik/matching.hpp"
#include "identik/metrics.hpp"
#include "identik/partition.hpp"
#include "identik/synth.hpp"

using namespace identik;

TEST_CASE("huge concentration gives near-unit genuine cosine") {
    SynthSpec spec;
    spec.groups = {{{"AA", "M"}, 1, 2}};
    spec.dimension = 64;
    spec.within_subject_concentration = 1e6;
    auto [records, store] = generate(spec);
    REQUIRE(records.size() == 2);
    CHECK(cosine(store.vec(0), store.vec(1)) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("independent subject directions are near orthogonal in high dim") {
    SynthSpec spec;
    spec.groups = {{{"AA", "M"}, 2, 1}};
    spec.dimension = 512;
    spec.within_subject_concentration = 1e6;
    spec.between_subject_concentration = 0.0;
    spec.rng_seed = 12;
    auto [records, store] = generate(spec);
    CHECK(std::abs(cosine(store.vec(0), store.vec(1))) < 0.05);
}

TEST_CASE("generation is deterministic per seed") {
    SynthSpec spec;
    spec.groups = {{{"AA", "M"}, 10, 3}, {{"C", "F"}, 5, 2}};
    spec.dimension = 16;
    spec.rng_seed = 77;
    auto [r1, s1] = generate(spec);
    auto [r2, s2] = generate(spec);
    CHECK(s1.raw() == s2.raw());
    REQUIRE(r1.size() == r2.size());
    for (std::size_t i = 0; i < r1.size(); ++i) CHECK(r1[i].image_id == r2[i].image_id);

    spec.rng_seed = 78;
    auto [r3, s3] = generate(spec);
    CHECK(s3.raw() != s1.raw());
    CHECK(r3.size() == r1.size());
}

TEST_CASE("generated datasets always validate") {
    for (std::uint64_t seed : {1u, 2u, 3u, 4u}) {
        SynthSpec spec;
        spec.groups = {{{"AA", "M"}, 20, 3}, {{"C", "F"}, 10, 1}};
        spec.dimension = 8;
        spec.rng_seed = seed;
        auto [records, store] = generate(spec);
        CHECK(validate_dataset(records, store).valid());
    }
}

TEST_CASE("invalid specs are rejected") {
    SynthSpec spec;
    spec.groups = {{{"AA", "M"}, 1, 1}};
    spec.within_subject_concentration = 1.0;
    spec.between_subject_concentration = 2.0;
    CHECK_THROWS_AS(generate(spec), std::invalid_argument);
    spec.between_subject_concentration = 0.0;
    spec.dimension = 0;
    CHECK_THROWS_AS(generate(spec), std::invalid_argument);
}

TEST_CASE("measured d-prime is stable across seeds at scale") {
    auto measure = [](std::uint64_t seed) {
        SynthSpec spec;
        spec.groups = {{{"AA", "M"}, 1000, 2}};
        spec.dimension = 64;
        spec.within_subject_concentration = 4.0;
        spec.rng_seed = seed;
        auto [records, store] = generate(spec);
        auto split = build_split(records);
        auto out = rank_one_scores(split, records, store, 4);
        std::vector<double> mated, nonmated;
        for (const auto& r : out.results) {
            if (r.mated_score) mated.push_back(*r.mated_score);
            if (r.nonmated_score) nonmated.push_back(*r.nonmated_score);
        }
        return d_prime(DistributionStats::from(mated), DistributionStats::from(nonmated));
    };
    double a = measure(101), b = measure(202);
    CHECK(std::abs(a - b) / std::max(a, b) < 0.05);
}

TEST_CASE("shift_mated") {
    RankOneResult r;
    r.mated_score = 0.8;
    r.nonmated_score = 0.5;
    std::vector<RankOneResult> rs{r};

    auto same = shift_mated(rs, 0.0);
    CHECK(*same[0].mated_score == 0.8);

    auto clamped = shift_mated(rs, 2.0);
    CHECK(*clamped[0].mated_score == -1.0);
    CHECK(diff_distribution(clamped).fpir == 1.0);

    double prev = 0.0;
    for (double delta : {0.0, 0.1, 0.2}) {
        double f = diff_distribution(shift_mated(rs, delta)).fpir;
        CHECK(f >= prev);
        prev = f;
    }

    CHECK_THROWS_AS(shift_mated(rs, -0.1), std::invalid_argument);
}
