#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "identik/data_model.hpp"
#include "identik/matching.hpp"

namespace identik {

struct SynthGroupSpec {
    DemographicGroup group;
    std::size_t n_subjects = 0;
    std::size_t images_per_subject = 2;
};

// Embedding model: one unit identity direction per subject, images are the
// direction plus isotropic noise of magnitude 1/within_subject_concentration,
// renormalized. between_subject_concentration pulls identity directions
// toward a shared group center, raising impostor similarity.
struct SynthSpec {
    std::vector<SynthGroupSpec> groups;
    std::size_t dimension = 512;
    double within_subject_concentration = 10.0;
    double between_subject_concentration = 0.0;
    std::uint64_t rng_seed = 0;
};

std::pair<std::vector<ImageRecord>, EmbeddingStore> generate(const SynthSpec& spec);

// Degradation at score level: mated rank-one scores reduced by delta
// (clamped to -1), non-mated untouched.
std::vector<RankOneResult> shift_mated(const std::vector<RankOneResult>& results,
                                       double delta);

}  // namespace identik
