#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "identik/data_model.hpp"
#include "identik/partition.hpp"

namespace identik {

struct DimensionMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ZeroNorm : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Cosine similarity, clamped to [-1, 1]. Accumulation is in double with a
// fixed left-to-right reduction order, so the result is symmetric in (u, v)
// and reproducible across runs.
double cosine(std::span<const float> u, std::span<const float> v);

struct RankOneResult {
    std::string probe_image_id;
    std::string subject_id;
    DemographicGroup group;
    std::optional<double> mated_score;             // absent for singleton subjects
    std::optional<std::string> mated_argmax;
    std::optional<double> nonmated_score;          // absent only for degenerate galleries
    std::optional<std::string> nonmated_argmax;
};

struct RankOneOutput {
    std::vector<RankOneResult> results;            // sorted by probe_image_id
    std::vector<std::string> degenerate_probes;    // probes with an empty non-mated set
};

// Rank-one mated / non-mated scores for every probe in the split. Exact
// maxima over the full gallery; score ties resolved toward the smallest
// image_id. Deterministic for any worker count.
RankOneOutput rank_one_scores(const ProbeGallerySplit& split,
                              const std::vector<ImageRecord>& records,
                              const EmbeddingStore& store, unsigned workers = 1);

struct OneToOneOptions {
    std::optional<DemographicGroup> group_filter;
    bool cross_cohort_impostors = false;  // with a filter: pair filtered probes across cohorts
    double impostor_subsample = 1.0;      // keep probability per impostor pair
    std::uint64_t subsample_seed = 0;
};

struct OneToOneScores {
    std::vector<double> genuine;
    std::vector<double> impostor;
};

// All unordered same-subject pairs (genuine) and different-subject pairs
// (impostor), each scored once, in deterministic enumeration order.
OneToOneScores one_to_one_distributions(const std::vector<ImageRecord>& records,
                                        const EmbeddingStore& store,
                                        const OneToOneOptions& opts = {});

struct GallerySweepPoint {
    std::size_t size = 0;
    DistributionStats nonmated_stats;
    // Aligned with probe_ids below; NaN for probes whose non-mated set is
    // empty at this gallery size.
    std::vector<double> nonmated_scores;
};

struct GallerySweepResult {
    std::vector<std::string> probe_ids;
    std::vector<GallerySweepPoint> points;
};

// Recomputes non-mated rank-one stats for nested random subsets of gallery
// subjects (each smaller sample is contained in each larger one).
GallerySweepResult gallery_size_sweep(const ProbeGallerySplit& split,
                                      const std::vector<ImageRecord>& records,
                                      const EmbeddingStore& store,
                                      std::vector<std::size_t> sizes,
                                      std::uint64_t rng_seed, unsigned workers = 1);

void write_rank_one_csv(const RankOneOutput& out, const std::filesystem::path& path);

}  // namespace identik
