#include "identik/data_model.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <unordered_map>
#include <unordered_set>

namespace identik {

std::string Date::to_string() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", year, month, day);
    return buf;
}

bool Date::parse(const std::string& s, Date& out) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i == 4 || i == 7) continue;
        if (s[i] < '0' || s[i] > '9') return false;
    }
    Date d;
    d.year = std::stoi(s.substr(0, 4));
    d.month = static_cast<unsigned>(std::stoi(s.substr(5, 2)));
    d.day = static_cast<unsigned>(std::stoi(s.substr(8, 2)));
    if (!d.ok()) return false;
    out = d;
    return true;
}

DistributionStats DistributionStats::from(std::span<const double> samples) {
    DistributionStats s;
    s.n = samples.size();
    if (s.n == 0) return s;
    double sum = 0.0;
    s.min = std::numeric_limits<double>::infinity();
    s.max = -std::numeric_limits<double>::infinity();
    for (double v : samples) {
        sum += v;
        s.min = std::min(s.min, v);
        s.max = std::max(s.max, v);
    }
    s.mean = sum / static_cast<double>(s.n);
    double sq = 0.0;
    for (double v : samples) {
        double d = v - s.mean;
        sq += d * d;
    }
    s.std_dev = std::sqrt(sq / static_cast<double>(s.n));
    return s;
}

ValidationReport validate_dataset(const std::vector<ImageRecord>& records,
                                  const EmbeddingStore& store) {
    ValidationReport rep;

    std::unordered_set<std::string> seen;
    std::unordered_set<std::string> reported_dup;
    std::unordered_map<std::string, DemographicGroup> subject_group;
    std::unordered_set<std::string> reported_subject;
    const Date earliest{1900, 1, 1};

    for (const auto& r : records) {
        if (!seen.insert(r.image_id).second && reported_dup.insert(r.image_id).second)
            rep.duplicate_image_ids.push_back(r.image_id);

        auto [it, inserted] = subject_group.emplace(r.subject_id, r.group);
        if (!inserted && it->second != r.group &&
            reported_subject.insert(r.subject_id).second)
            rep.inconsistent_group_subjects.push_back(r.subject_id);

        if (r.embedding_index >= store.count()) {
            rep.out_of_range_image_ids.push_back(r.image_id);
        } else {
            auto v = store.vec(r.embedding_index);
            double norm2 = 0.0;
            bool finite = true;
            for (float x : v) {
                if (!std::isfinite(x)) finite = false;
                norm2 += static_cast<double>(x) * x;
            }
            if (!finite || norm2 == 0.0) rep.zero_norm_image_ids.push_back(r.image_id);
        }

        if (!r.capture_date.ok() || r.capture_date < earliest)
            rep.bad_date_image_ids.push_back(r.image_id);
    }
    return rep;
}

}  // namespace identik
