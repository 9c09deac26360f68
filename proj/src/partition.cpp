#include "identik/partition.hpp"

#include <algorithm>
#include <unordered_map>

#include "identik/rng.hpp"
#include "json.hpp"

namespace identik {

namespace {

// Recency order: newer date first, larger image_id first on equal dates.
// The front of a sorted list is the probe.
bool more_recent(const ImageRecord* a, const ImageRecord* b) {
    if (a->capture_date != b->capture_date) return b->capture_date < a->capture_date;
    return b->image_id < a->image_id;
}

std::map<std::string, std::vector<const ImageRecord*>> by_subject_sorted(
    const std::vector<ImageRecord>& records) {
    std::map<std::string, std::vector<const ImageRecord*>> subjects;
    for (const auto& r : records) subjects[r.subject_id].push_back(&r);
    for (auto& [_, imgs] : subjects) std::sort(imgs.begin(), imgs.end(), more_recent);
    return subjects;
}

}  // namespace

ProbeGallerySplit build_split(const std::vector<ImageRecord>& records) {
    ProbeGallerySplit split;
    for (auto& [subject, imgs] : by_subject_sorted(records)) {
        split.probes[subject] = imgs.front()->image_id;
        // Gallery order: date descending, image_id ascending on ties.
        std::vector<const ImageRecord*> rest(imgs.begin() + 1, imgs.end());
        std::sort(rest.begin(), rest.end(), [](const ImageRecord* a, const ImageRecord* b) {
            if (a->capture_date != b->capture_date) return b->capture_date < a->capture_date;
            return a->image_id < b->image_id;
        });
        auto& enrolled = split.gallery[subject];
        for (auto* r : rest) enrolled.push_back(r->image_id);
        if (enrolled.empty()) split.singleton_subjects.insert(subject);
    }
    return split;
}

ProbeGallerySplit build_balanced_split(const std::vector<ImageRecord>& records,
                                       const BalanceSpec& spec) {
    auto subjects = by_subject_sorted(records);

    // Eligible subjects per group, in deterministic (sorted subject_id) order.
    std::map<std::string, std::vector<std::string>> eligible;
    for (auto& [subject, imgs] : subjects)
        if (imgs.size() >= 1 + spec.enrolled_per_identity)
            eligible[imgs.front()->group.key()].push_back(subject);

    for (auto& [group, subs] : eligible)
        if (subs.size() < spec.identities_per_group)
            throw InsufficientIdentities(group, subs.size(), spec.identities_per_group);

    ProbeGallerySplit split;
    Rng rng(spec.rng_seed);
    for (auto& [group, subs] : eligible) {
        auto picks = rng.sample_without_replacement(subs.size(), spec.identities_per_group);
        std::sort(picks.begin(), picks.end());
        for (std::size_t p : picks) {
            const auto& imgs = subjects[subs[p]];
            split.probes[subs[p]] = imgs.front()->image_id;
            std::vector<const ImageRecord*> kept(imgs.begin() + 1,
                                                 imgs.begin() + 1 + spec.enrolled_per_identity);
            std::sort(kept.begin(), kept.end(),
                      [](const ImageRecord* a, const ImageRecord* b) {
                          if (a->capture_date != b->capture_date)
                              return b->capture_date < a->capture_date;
                          return a->image_id < b->image_id;
                      });
            auto& enrolled = split.gallery[subs[p]];
            for (auto* r : kept) enrolled.push_back(r->image_id);
        }
    }
    return split;
}

std::map<std::string, DistributionStats> time_between_mated(
    const ProbeGallerySplit& split, const std::vector<ImageRecord>& records) {
    std::unordered_map<std::string, const ImageRecord*> by_id;
    for (const auto& r : records) by_id[r.image_id] = &r;

    std::map<std::string, std::vector<double>> gaps;
    for (const auto& [subject, enrolled] : split.gallery) {
        if (enrolled.empty()) continue;
        const auto* probe = by_id.at(split.probes.at(subject));
        const auto* newest = by_id.at(enrolled.front());
        gaps[probe->group.key()].push_back(static_cast<double>(
            probe->capture_date.to_days() - newest->capture_date.to_days()));
    }

    std::map<std::string, DistributionStats> out;
    for (auto& [group, samples] : gaps) out[group] = DistributionStats::from(samples);
    return out;
}

std::string split_to_json(const ProbeGallerySplit& split) {
    nlohmann::ordered_json j;
    j["probes"] = nlohmann::ordered_json::object();
    for (const auto& [s, p] : split.probes) j["probes"][s] = p;
    j["gallery"] = nlohmann::ordered_json::object();
    for (const auto& [s, g] : split.gallery) j["gallery"][s] = g;
    j["singletons"] = std::vector<std::string>(split.singleton_subjects.begin(),
                                               split.singleton_subjects.end());
    return j.dump(2);
}

}  // namespace identik
