#include "identik/matching.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>
#include <unordered_map>

#include "identik/rng.hpp"

namespace identik {

namespace {

double clamp_score(double s) { return std::clamp(s, -1.0, 1.0); }

// Row-major L2-normalized copy of the store, in double.
std::vector<double> normalized_rows(const EmbeddingStore& store) {
    std::vector<double> out(store.count() * store.dimension());
    for (std::size_t i = 0; i < store.count(); ++i) {
        auto v = store.vec(i);
        double norm2 = 0.0;
        for (float x : v) norm2 += static_cast<double>(x) * x;
        if (norm2 == 0.0) throw ZeroNorm("zero-norm embedding at row " + std::to_string(i));
        double inv = 1.0 / std::sqrt(norm2);
        double* dst = out.data() + i * store.dimension();
        for (std::size_t k = 0; k < v.size(); ++k) dst[k] = v[k] * inv;
    }
    return out;
}

double dot(const double* a, const double* b, std::size_t dim) {
    double s = 0.0;
    for (std::size_t k = 0; k < dim; ++k) s += a[k] * b[k];
    return s;
}

struct GalleryEntry {
    const std::string* image_id;
    std::size_t subject;  // dense subject index
    std::size_t row;      // embedding row
};

struct ProbeEntry {
    const std::string* image_id;
    const std::string* subject_id;
    std::size_t subject;
    std::size_t row;
    const DemographicGroup* group;
};

struct MatchContext {
    std::vector<double> norm;
    std::size_t dim;
    std::vector<GalleryEntry> gallery;  // sorted by image_id ascending
    std::vector<ProbeEntry> probes;     // sorted by probe image_id ascending
};

MatchContext build_context(const ProbeGallerySplit& split,
                           const std::vector<ImageRecord>& records,
                           const EmbeddingStore& store) {
    MatchContext ctx;
    ctx.norm = normalized_rows(store);
    ctx.dim = store.dimension();

    std::unordered_map<std::string, const ImageRecord*> by_id;
    by_id.reserve(records.size());
    for (const auto& r : records) by_id[r.image_id] = &r;

    std::unordered_map<std::string, std::size_t> subject_index;
    auto subj_idx = [&](const std::string& s) {
        auto [it, _] = subject_index.emplace(s, subject_index.size());
        return it->second;
    };

    for (const auto& [subject, enrolled] : split.gallery) {
        std::size_t si = subj_idx(subject);
        for (const auto& img : enrolled) {
            const auto* rec = by_id.at(img);
            ctx.gallery.push_back({&rec->image_id, si, rec->embedding_index});
        }
    }
    std::sort(ctx.gallery.begin(), ctx.gallery.end(),
              [](const GalleryEntry& a, const GalleryEntry& b) {
                  return *a.image_id < *b.image_id;
              });

    for (const auto& [subject, probe_img] : split.probes) {
        const auto* rec = by_id.at(probe_img);
        ctx.probes.push_back({&rec->image_id, &rec->subject_id, subj_idx(subject),
                              rec->embedding_index, &rec->group});
    }
    std::sort(ctx.probes.begin(), ctx.probes.end(),
              [](const ProbeEntry& a, const ProbeEntry& b) {
                  return *a.image_id < *b.image_id;
              });
    return ctx;
}

// Runs fn(probe_index) over all probes, chunked across `workers` threads.
// Each index is processed exactly once, so outputs are order-independent.
template <typename Fn>
void parallel_over_probes(std::size_t n, unsigned workers, Fn&& fn) {
    if (workers <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    workers = std::min<unsigned>(workers, static_cast<unsigned>(n));
    std::vector<std::thread> pool;
    std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace

double cosine(std::span<const float> u, std::span<const float> v) {
    if (u.size() != v.size())
        throw DimensionMismatch("cosine: dimensions " + std::to_string(u.size()) +
                                " vs " + std::to_string(v.size()));
    double dp = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        double a = u[k], b = v[k];
        dp += a * b;
        nu += a * a;
        nv += b * b;
    }
    if (nu == 0.0 || nv == 0.0) throw ZeroNorm("cosine: zero-norm input");
    return clamp_score(dp / (std::sqrt(nu) * std::sqrt(nv)));
}

RankOneOutput rank_one_scores(const ProbeGallerySplit& split,
                              const std::vector<ImageRecord>& records,
                              const EmbeddingStore& store, unsigned workers) {
    MatchContext ctx = build_context(split, records, store);

    RankOneOutput out;
    out.results.resize(ctx.probes.size());

    parallel_over_probes(ctx.probes.size(), workers, [&](std::size_t i) {
        const ProbeEntry& p = ctx.probes[i];
        const double* pv = ctx.norm.data() + p.row * ctx.dim;

        RankOneResult r;
        r.probe_image_id = *p.image_id;
        r.subject_id = *p.subject_id;
        r.group = *p.group;

        double best_mated = -std::numeric_limits<double>::infinity();
        double best_nonmated = -std::numeric_limits<double>::infinity();
        const std::string* mated_arg = nullptr;
        const std::string* nonmated_arg = nullptr;

        // Gallery is sorted by image_id, so a strict > keeps the smallest
        // image_id on exact score ties.
        for (const GalleryEntry& g : ctx.gallery) {
            double s = clamp_score(dot(pv, ctx.norm.data() + g.row * ctx.dim, ctx.dim));
            if (g.subject == p.subject) {
                if (s > best_mated) { best_mated = s; mated_arg = g.image_id; }
            } else {
                if (s > best_nonmated) { best_nonmated = s; nonmated_arg = g.image_id; }
            }
        }
        if (mated_arg) { r.mated_score = best_mated; r.mated_argmax = *mated_arg; }
        if (nonmated_arg) { r.nonmated_score = best_nonmated; r.nonmated_argmax = *nonmated_arg; }
        out.results[i] = std::move(r);
    });

    for (const auto& r : out.results)
        if (!r.nonmated_score) out.degenerate_probes.push_back(r.probe_image_id);
    return out;
}

OneToOneScores one_to_one_distributions(const std::vector<ImageRecord>& records,
                                        const EmbeddingStore& store,
                                        const OneToOneOptions& opts) {
    std::vector<double> norm = normalized_rows(store);
    std::size_t dim = store.dimension();

    auto in_cohort = [&](const ImageRecord& r) {
        return !opts.group_filter || r.group == *opts.group_filter;
    };

    // Deterministic enumeration order: records as given.
    OneToOneScores out;
    Rng rng(opts.subsample_seed);
    const bool subsample = opts.impostor_subsample < 1.0;

    for (std::size_t i = 0; i < records.size(); ++i) {
        for (std::size_t j = i + 1; j < records.size(); ++j) {
            const auto& a = records[i];
            const auto& b = records[j];
            bool same = a.subject_id == b.subject_id;
            bool both_in = in_cohort(a) && in_cohort(b);
            bool impostor_in = opts.cross_cohort_impostors ? (in_cohort(a) || in_cohort(b))
                                                           : both_in;
            if (same) {
                if (!both_in) continue;
            } else {
                if (!impostor_in) continue;
                if (subsample && rng.uniform() >= opts.impostor_subsample) continue;
            }
            double s = clamp_score(dot(norm.data() + a.embedding_index * dim,
                                       norm.data() + b.embedding_index * dim, dim));
            (same ? out.genuine : out.impostor).push_back(s);
        }
    }
    return out;
}

GallerySweepResult gallery_size_sweep(const ProbeGallerySplit& split,
                                      const std::vector<ImageRecord>& records,
                                      const EmbeddingStore& store,
                                      std::vector<std::size_t> sizes,
                                      std::uint64_t rng_seed, unsigned workers) {
    MatchContext ctx = build_context(split, records, store);

    // Enrollable subjects, deterministic order, then one shared permutation so
    // every smaller sample is a prefix of every larger one.
    std::vector<std::size_t> enrollable;
    {
        std::size_t n_subjects = 0;
        for (const auto& g : ctx.gallery) n_subjects = std::max(n_subjects, g.subject + 1);
        std::vector<char> seen(n_subjects, 0);
        for (const auto& g : ctx.gallery)
            if (!seen[g.subject]) { seen[g.subject] = 1; enrollable.push_back(g.subject); }
        std::sort(enrollable.begin(), enrollable.end());
    }
    for (std::size_t s : sizes)
        if (s > enrollable.size())
            throw InsufficientIdentities("(gallery sweep)", enrollable.size(), s);

    Rng rng(rng_seed);
    auto perm = rng.sample_without_replacement(enrollable.size(), enrollable.size());

    std::sort(sizes.begin(), sizes.end());
    GallerySweepResult res;
    for (const auto& p : ctx.probes) res.probe_ids.push_back(*p.image_id);

    std::size_t max_subject = 0;
    for (const auto& g : ctx.gallery) max_subject = std::max(max_subject, g.subject + 1);

    for (std::size_t s : sizes) {
        std::vector<char> allowed(max_subject, 0);
        for (std::size_t k = 0; k < s; ++k) allowed[enrollable[perm[k]]] = 1;

        GallerySweepPoint point;
        point.size = s;
        point.nonmated_scores.assign(ctx.probes.size(),
                                     std::numeric_limits<double>::quiet_NaN());

        parallel_over_probes(ctx.probes.size(), workers, [&](std::size_t i) {
            const ProbeEntry& p = ctx.probes[i];
            const double* pv = ctx.norm.data() + p.row * ctx.dim;
            double best = -std::numeric_limits<double>::infinity();
            bool any = false;
            for (const GalleryEntry& g : ctx.gallery) {
                if (!allowed[g.subject] || g.subject == p.subject) continue;
                double sc = clamp_score(dot(pv, ctx.norm.data() + g.row * ctx.dim, ctx.dim));
                if (!any || sc > best) { best = sc; any = true; }
            }
            if (any) point.nonmated_scores[i] = best;
        });

        std::vector<double> present;
        for (double v : point.nonmated_scores)
            if (!std::isnan(v)) present.push_back(v);
        point.nonmated_stats = DistributionStats::from(present);
        res.points.push_back(std::move(point));
    }
    return res;
}

void write_rank_one_csv(const RankOneOutput& out, const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << "probe_image_id,subject_id,race,gender,mated_score,mated_argmax,"
         "nonmated_score,nonmated_argmax\n";
    f.precision(17);
    for (const auto& r : out.results) {
        f << r.probe_image_id << ',' << r.subject_id << ',' << r.group.race << ','
          << r.group.gender << ',';
        if (r.mated_score) f << *r.mated_score;
        f << ',';
        if (r.mated_argmax) f << *r.mated_argmax;
        f << ',';
        if (r.nonmated_score) f << *r.nonmated_score;
        f << ',';
        if (r.nonmated_argmax) f << *r.nonmated_argmax;
        f << '\n';
    }
    if (!f) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace identik
