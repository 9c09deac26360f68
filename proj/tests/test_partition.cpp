#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "identik/partition.hpp"
#include "identik/synth.hpp"

using namespace identik;

namespace {

ImageRecord rec(const std::string& img, const std::string& subj, const std::string& date,
                DemographicGroup g = {"AA", "M"}) {
    ImageRecord r;
    r.image_id = img;
    r.subject_id = subj;
    r.group = g;
    REQUIRE(Date::parse(date, r.capture_date));
    r.embedding_index = 0;
    return r;
}

}  // namespace

TEST_CASE("most recent image becomes the probe") {
    auto split = build_split({rec("a", "s1", "2001-01-01"), rec("b", "s1", "2005-01-01")});
    CHECK(split.probes.at("s1") == "b");
    CHECK(split.gallery.at("s1") == std::vector<std::string>{"a"});
    CHECK(split.singleton_subjects.empty());
}

TEST_CASE("single-image subject lands in singletons") {
    auto split = build_split({rec("a", "s1", "2001-01-01")});
    CHECK(split.probes.at("s1") == "a");
    CHECK(split.gallery.at("s1").empty());
    CHECK(split.singleton_subjects.count("s1") == 1);
}

TEST_CASE("date ties go to the lexicographically greatest image_id") {
    auto split = build_split({rec("a", "s1", "2001-01-01"), rec("b", "s1", "2001-01-01")});
    CHECK(split.probes.at("s1") == "b");
}

TEST_CASE("gallery is ordered by date descending, id ascending on ties") {
    auto split = build_split({
        rec("d", "s1", "2009-01-01"),
        rec("c", "s1", "2005-01-01"),
        rec("a", "s1", "2005-01-01"),
        rec("b", "s1", "2001-01-01"),
    });
    CHECK(split.probes.at("s1") == "d");
    CHECK(split.gallery.at("s1") == std::vector<std::string>{"a", "c", "b"});
}

TEST_CASE("probe date dominates enrolled dates") {
    SynthSpec spec;
    spec.groups = {{{"AA", "M"}, 30, 4}, {{"C", "F"}, 30, 3}};
    spec.dimension = 8;
    spec.rng_seed = 11;
    auto [records, store] = generate(spec);
    auto split = build_split(records);
    std::map<std::string, const ImageRecord*> by_id;
    for (const auto& r : records) by_id[r.image_id] = &r;
    for (const auto& [subject, enrolled] : split.gallery) {
        const auto* probe = by_id.at(split.probes.at(subject));
        for (const auto& img : enrolled)
            CHECK(by_id.at(img)->capture_date <= probe->capture_date);
    }
}

TEST_CASE("balanced split samples exact counts per group, deterministically") {
    SynthSpec spec;
    spec.groups = {{{"AA", "M"}, 40, 3}, {{"C", "M"}, 25, 2}, {{"C", "F"}, 30, 4}};
    spec.dimension = 8;
    spec.rng_seed = 3;
    auto [records, store] = generate(spec);

    BalanceSpec bal{20, 1, 42};
    auto split = build_balanced_split(records, bal);

    std::map<std::string, std::size_t> probes_per_group, enrolled_per_group;
    std::map<std::string, const ImageRecord*> by_id;
    for (const auto& r : records) by_id[r.image_id] = &r;
    for (const auto& [subject, probe] : split.probes)
        ++probes_per_group[by_id.at(probe)->group.key()];
    for (const auto& [subject, enrolled] : split.gallery) {
        CHECK(enrolled.size() == 1);
        for (const auto& img : enrolled) ++enrolled_per_group[by_id.at(img)->group.key()];
    }
    for (const auto& [g, n] : probes_per_group) CHECK(n == 20);
    for (const auto& [g, n] : enrolled_per_group) CHECK(n == 20);

    // Determinism and probe agreement with the full split.
    auto split2 = build_balanced_split(records, bal);
    CHECK(split_to_json(split) == split_to_json(split2));
    auto full = build_split(records);
    for (const auto& [subject, probe] : split.probes)
        CHECK(full.probes.at(subject) == probe);

    // A different seed keeps counts but (overwhelmingly) changes the sample.
    BalanceSpec other{20, 1, 43};
    auto split3 = build_balanced_split(records, other);
    CHECK(split3.probes.size() == split.probes.size());
    CHECK(split_to_json(split3) != split_to_json(split));
}

TEST_CASE("balanced split rejects groups with too few eligible identities") {
    SynthSpec spec;
    spec.groups = {{{"AA", "M"}, 3, 2}};
    spec.dimension = 8;
    auto [records, store] = generate(spec);
    try {
        build_balanced_split(records, {5, 1, 0});
        FAIL("expected InsufficientIdentities");
    } catch (const InsufficientIdentities& e) {
        CHECK(e.have == 3);
        CHECK(e.need == 5);
        CHECK(e.group_key == "AA M");
    }
}

TEST_CASE("eligibility requires enough enrolled images") {
    // Subjects with a single image cannot supply one enrolled image.
    std::vector<ImageRecord> records{
        rec("a1", "s1", "2001-01-01"), rec("a2", "s1", "2002-01-01"),
        rec("b1", "s2", "2001-01-01"),
    };
    try {
        build_balanced_split(records, {2, 1, 0});
        FAIL("expected InsufficientIdentities");
    } catch (const InsufficientIdentities& e) {
        CHECK(e.have == 1);
    }
}

TEST_CASE("time between mated images") {
    std::vector<ImageRecord> records{
        rec("a1", "s1", "2005-01-01"), rec("a2", "s1", "2005-01-11"),
        rec("b1", "s2", "2005-03-01"), rec("b2", "s2", "2005-03-21"),
        rec("c1", "s3", "2005-05-01"), rec("c2", "s3", "2005-05-31"),
        rec("d1", "s4", "2005-07-01"),  // singleton, excluded
        rec("e1", "s5", "2005-08-01", {"C", "F"}),
        rec("e2", "s5", "2005-08-01", {"C", "F"}),  // zero-gap case
    };
    auto split = build_split(records);
    auto stats = time_between_mated(split, records);
    auto& aam = stats.at("AA M");
    CHECK(aam.n == 3);
    CHECK(aam.mean == doctest::Approx(20.0));
    CHECK(aam.min == 10.0);
    CHECK(aam.max == 30.0);
    CHECK(stats.at("C F").mean == doctest::Approx(0.0));
}

TEST_CASE("split json export shape") {
    auto split = build_split({rec("a", "s1", "2001-01-01")});
    auto j = split_to_json(split);
    CHECK(j.find("\"probes\"") != std::string::npos);
    CHECK(j.find("\"gallery\"") != std::string::npos);
    CHECK(j.find("\"singletons\"") != std::string::npos);
}
