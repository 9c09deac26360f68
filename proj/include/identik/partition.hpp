#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "identik/data_model.hpp"

namespace identik {

// Per-identity probe/gallery assignment. Gallery lists are ordered by
// capture_date descending, image_id ascending on ties.
struct ProbeGallerySplit {
    std::map<std::string, std::string> probes;                 // subject -> probe image
    std::map<std::string, std::vector<std::string>> gallery;   // subject -> enrolled images
    std::set<std::string> singleton_subjects;                  // probe but nothing enrolled
};

struct BalanceSpec {
    std::size_t identities_per_group = 0;
    std::size_t enrolled_per_identity = 1;
    std::uint64_t rng_seed = 0;
};

struct InsufficientIdentities : std::runtime_error {
    std::string group_key;
    std::size_t have, need;
    InsufficientIdentities(std::string group, std::size_t have_, std::size_t need_)
        : std::runtime_error("group \"" + group + "\" has " + std::to_string(have_) +
                             " eligible identities, need " + std::to_string(need_)),
          group_key(std::move(group)), have(have_), need(need_) {}
};

// Most recent image per subject is the probe (date ties broken by greatest
// image_id); everything older is enrolled.
ProbeGallerySplit build_split(const std::vector<ImageRecord>& records);

// Per group, samples identities_per_group subjects uniformly without
// replacement among subjects with >= 1 + enrolled_per_identity images, then
// keeps the probe plus the next enrolled_per_identity most recent images.
ProbeGallerySplit build_balanced_split(const std::vector<ImageRecord>& records,
                                       const BalanceSpec& spec);

// Days between each probe and its most recent enrolled image, grouped by
// demographic key. Singletons are excluded.
std::map<std::string, DistributionStats> time_between_mated(
    const ProbeGallerySplit& split, const std::vector<ImageRecord>& records);

// Audit export: {"probes": {...}, "gallery": {...}, "singletons": [...]}.
std::string split_to_json(const ProbeGallerySplit& split);

}  // namespace identik
