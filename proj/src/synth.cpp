#include "identik/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "identik/rng.hpp"

namespace identik {

namespace {

void renormalize(std::vector<double>& v) {
    double n2 = 0.0;
    for (double x : v) n2 += x * x;
    double inv = 1.0 / std::sqrt(n2);
    for (double& x : v) x *= inv;
}

std::string padded(std::size_t v, int width) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%0*zu", width, v);
    return buf;
}

}  // namespace

std::pair<std::vector<ImageRecord>, EmbeddingStore> generate(const SynthSpec& spec) {
    if (spec.dimension == 0) throw std::invalid_argument("dimension must be positive");
    if (!(spec.within_subject_concentration > spec.between_subject_concentration))
        throw std::invalid_argument(
            "within_subject_concentration must exceed between_subject_concentration");
    if (!(spec.within_subject_concentration > 0.0))
        throw std::invalid_argument("within_subject_concentration must be positive");

    Rng rng(spec.rng_seed);
    std::vector<ImageRecord> records;
    std::vector<float> data;

    const long base_date = Date{2000, 1, 1}.to_days();
    const double noise_scale = 1.0 / spec.within_subject_concentration;

    std::size_t group_idx = 0;
    for (const auto& gs : spec.groups) {
        // Group center only matters when between-subject pull is nonzero.
        std::vector<double> center(spec.dimension);
        for (double& x : center) x = rng.gaussian();
        renormalize(center);

        for (std::size_t s = 0; s < gs.n_subjects; ++s) {
            std::vector<double> dir(spec.dimension);
            for (std::size_t k = 0; k < spec.dimension; ++k)
                dir[k] = rng.gaussian() + spec.between_subject_concentration * center[k];
            renormalize(dir);

            std::string subject_id =
                "g" + std::to_string(group_idx) + "s" + padded(s, 6);
            for (std::size_t im = 0; im < gs.images_per_subject; ++im) {
                std::vector<double> v(spec.dimension);
                for (std::size_t k = 0; k < spec.dimension; ++k)
                    v[k] = dir[k] + noise_scale * rng.gaussian();
                renormalize(v);

                ImageRecord r;
                r.image_id = subject_id + "i" + padded(im, 3);
                r.subject_id = subject_id;
                r.group = gs.group;
                r.capture_date = Date::from_days(base_date + static_cast<long>(im));
                r.embedding_index = records.size();
                records.push_back(std::move(r));
                for (double x : v) data.push_back(static_cast<float>(x));
            }
        }
        ++group_idx;
    }
    return {std::move(records), EmbeddingStore(spec.dimension, std::move(data))};
}

std::vector<RankOneResult> shift_mated(const std::vector<RankOneResult>& results,
                                       double delta) {
    if (delta < 0.0) throw std::invalid_argument("delta must be non-negative");
    std::vector<RankOneResult> out = results;
    for (auto& r : out)
        if (r.mated_score) r.mated_score = std::max(-1.0, *r.mated_score - delta);
    return out;
}

}  // namespace identik
